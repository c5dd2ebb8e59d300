//! Balanced-diet job selection: greedy set cover over the season, hazard
//! and region values represented in a job catalog, keeping monthly model
//! training spread across all three dimensions.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::PipelineError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Season {
    Winter,
    Spring,
    Summer,
    Fall,
}

impl std::fmt::Display for Season {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Season::Winter => "winter",
            Season::Spring => "spring",
            Season::Summer => "summer",
            Season::Fall => "fall",
        })
    }
}

impl std::str::FromStr for Season {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_lowercase().as_str() {
            "winter" => Ok(Season::Winter),
            "spring" => Ok(Season::Spring),
            "summer" => Ok(Season::Summer),
            "fall" | "autumn" => Ok(Season::Fall),
            other => Err(format!("unknown season {other:?}")),
        }
    }
}

/// Meteorological season of a month (1-12).
pub fn season_of_month(month: u8) -> Season {
    match month {
        12 | 1 | 2 => Season::Winter,
        3..=5 => Season::Spring,
        6..=8 => Season::Summer,
        _ => Season::Fall,
    }
}

/// One candidate training job with its coverage dimensions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JobCatalogEntry {
    pub product: String,
    pub season: Season,
    pub hazard: String,
    pub region: String,
}

impl JobCatalogEntry {
    pub fn new(
        product: impl Into<String>,
        season: Season,
        hazard: impl Into<String>,
        region: impl Into<String>,
    ) -> Result<Self, PipelineError> {
        let hazard = hazard.into();
        let region = region.into();
        if hazard.trim().is_empty() || region.trim().is_empty() {
            return Err(PipelineError::InvalidArgument(
                "hazard and region must be populated".into(),
            ));
        }
        Ok(Self {
            product: product.into(),
            season,
            hazard,
            region,
        })
    }

    fn cells(&self) -> [(u8, String); 3] {
        [
            (0, self.season.to_string()),
            (1, self.hazard.clone()),
            (2, self.region.clone()),
        ]
    }
}

/// The jobs picked for one month of training, in selection order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DietSelection {
    pub month: u8,
    pub selected: Vec<JobCatalogEntry>,
    /// dimension values covered by the selection
    pub covered_cells: usize,
    /// dimension values represented anywhere in the catalog
    pub total_cells: usize,
}

/// Greedy cover: repeatedly picks the entry covering the most uncovered
/// (season, hazard, region) values; ties prefer the region least selected so
/// far, then catalog order. Stops when every represented value is covered or
/// `k` entries are selected. `month` is recorded for audit.
pub fn balanced_diet_select(
    catalog: &[JobCatalogEntry],
    month: u8,
    k: usize,
) -> Result<DietSelection, PipelineError> {
    if catalog.is_empty() {
        return Err(PipelineError::InvalidArgument("empty job catalog".into()));
    }
    if k < 1 {
        return Err(PipelineError::InvalidArgument("k must be >= 1".into()));
    }
    if !(1..=12).contains(&month) {
        return Err(PipelineError::InvalidArgument(format!(
            "month {month} outside 1-12"
        )));
    }
    let mut uncovered: HashSet<(u8, String)> =
        catalog.iter().flat_map(|e| e.cells()).collect();
    let total_cells = uncovered.len();
    let mut region_picks: std::collections::HashMap<&str, usize> = std::collections::HashMap::new();
    let mut chosen: Vec<usize> = Vec::new();
    let mut used = vec![false; catalog.len()];
    while chosen.len() < k && !uncovered.is_empty() {
        let mut best: Option<(usize, usize, usize)> = None; // (gain, region_picks, idx)
        for (idx, entry) in catalog.iter().enumerate() {
            if used[idx] {
                continue;
            }
            let gain = entry
                .cells()
                .iter()
                .filter(|cell| uncovered.contains(*cell))
                .count();
            if gain == 0 {
                continue;
            }
            let picks = *region_picks.get(entry.region.as_str()).unwrap_or(&0);
            let candidate = (gain, picks, idx);
            let better = match best {
                None => true,
                Some((bg, bp, bi)) => {
                    gain > bg || (gain == bg && (picks < bp || (picks == bp && idx < bi)))
                }
            };
            if better {
                best = Some(candidate);
            }
        }
        match best {
            Some((_, _, idx)) => {
                used[idx] = true;
                for cell in catalog[idx].cells() {
                    uncovered.remove(&cell);
                }
                *region_picks.entry(catalog[idx].region.as_str()).or_insert(0) += 1;
                chosen.push(idx);
            }
            None => break,
        }
    }
    Ok(DietSelection {
        month,
        selected: chosen.iter().map(|&i| catalog[i].clone()).collect(),
        covered_cells: total_cells - uncovered.len(),
        total_cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(product: &str, season: Season, hazard: &str, region: &str) -> JobCatalogEntry {
        JobCatalogEntry::new(product, season, hazard, region).unwrap()
    }

    #[test]
    fn four_distinct_hazards_all_covered() {
        let catalog = vec![
            entry("p1", Season::Winter, "snow", "north"),
            entry("p2", Season::Spring, "tornado", "central"),
            entry("p3", Season::Summer, "hurricane", "south"),
            entry("p4", Season::Fall, "flood", "west"),
        ];
        let selection = balanced_diet_select(&catalog, 6, 4).unwrap();
        assert_eq!(selection.selected.len(), 4);
        let hazards: HashSet<&str> = selection.selected.iter().map(|e| e.hazard.as_str()).collect();
        assert_eq!(hazards.len(), 4);
        assert_eq!(selection.covered_cells, selection.total_cells);
    }

    #[test]
    fn k_one_picks_max_coverage() {
        // p2 shares season and region with p1, so p1 and p3 tie at 3 new
        // cells and p1 wins by catalog order
        let catalog = vec![
            entry("p1", Season::Summer, "hurricane", "south"),
            entry("p2", Season::Summer, "flood", "south"),
            entry("p3", Season::Winter, "snow", "north"),
        ];
        let selection = balanced_diet_select(&catalog, 7, 1).unwrap();
        assert_eq!(selection.selected.len(), 1);
        assert_eq!(selection.selected[0].product, "p1");
    }

    #[test]
    fn singleton_catalog() {
        let catalog = vec![entry("only", Season::Fall, "fire", "west")];
        let selection = balanced_diet_select(&catalog, 10, 3).unwrap();
        assert_eq!(selection.selected.len(), 1);
        assert_eq!(selection.selected[0].product, "only");
    }

    #[test]
    fn empty_catalog_rejected() {
        assert!(balanced_diet_select(&[], 1, 1).is_err());
    }

    #[test]
    fn invalid_month_rejected() {
        let catalog = vec![entry("p", Season::Fall, "fire", "west")];
        assert!(balanced_diet_select(&catalog, 0, 1).is_err());
        assert!(balanced_diet_select(&catalog, 13, 1).is_err());
    }

    #[test]
    fn region_tiebreak_spreads_selections() {
        // after p1 (south), p2 and p3 both gain 2; p3's region is fresh
        let catalog = vec![
            entry("p1", Season::Summer, "hurricane", "south"),
            entry("p2", Season::Winter, "snow", "south"),
            entry("p3", Season::Spring, "tornado", "north"),
        ];
        let selection = balanced_diet_select(&catalog, 3, 2).unwrap();
        assert_eq!(selection.selected[1].product, "p3");
    }

    #[test]
    fn stops_when_all_cells_covered() {
        let catalog = vec![
            entry("p1", Season::Summer, "hurricane", "south"),
            entry("p2", Season::Summer, "hurricane", "south"),
        ];
        let selection = balanced_diet_select(&catalog, 8, 5).unwrap();
        // the second entry adds nothing
        assert_eq!(selection.selected.len(), 1);
    }

    #[test]
    fn seasons_of_months() {
        assert_eq!(season_of_month(1), Season::Winter);
        assert_eq!(season_of_month(4), Season::Spring);
        assert_eq!(season_of_month(7), Season::Summer);
        assert_eq!(season_of_month(10), Season::Fall);
        assert_eq!(season_of_month(12), Season::Winter);
    }
}
