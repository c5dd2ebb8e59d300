//! County-to-CWA allocation with exact conservation.
//!
//! Whole counties assign fully. Split counties use census-tract sums when
//! the overlap lists tracts and tract rows exist for the language;
//! otherwise the county count is divided by overlap fraction with
//! largest-remainder rounding, so per-language totals are conserved
//! exactly. A capacity-constrained pass keeps `lep <= total` per CWA.

use std::collections::{BTreeMap, BTreeSet};

use super::{
    validate_overlap_fractions, CwaOverlap, CwaStats, GeoError, GeoLevel, LanguageCount, LepRecord,
};

/// Integer split of `count` by `fractions`: floors plus one unit to the
/// largest remainders (ties to the lower index), optionally capped per
/// index. The result always sums to `count` when the caps allow it.
fn largest_remainder(count: u64, fractions: &[f64], caps: Option<&[u64]>) -> Vec<u64> {
    let raw: Vec<f64> = fractions.iter().map(|f| count as f64 * f).collect();
    let mut alloc: Vec<u64> = raw
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let floored = r.floor() as u64;
            match caps {
                Some(caps) => floored.min(caps[i]),
                None => floored,
            }
        })
        .collect();
    let mut remaining = count - alloc.iter().sum::<u64>().min(count);
    let mut order: Vec<usize> = (0..fractions.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = raw[a] - raw[a].floor();
        let rb = raw[b] - raw[b].floor();
        rb.partial_cmp(&ra).expect("finite fractions").then(a.cmp(&b))
    });
    while remaining > 0 {
        let mut placed = false;
        for &i in &order {
            if remaining == 0 {
                break;
            }
            let cap = caps.map(|c| c[i]).unwrap_or(u64::MAX);
            if alloc[i] < cap {
                alloc[i] += 1;
                remaining -= 1;
                placed = true;
            }
        }
        if !placed {
            break; // caps exhausted; caller guarantees capacity
        }
    }
    alloc
}

/// Allocates county language counts to CWAs.
///
/// Errors list the offending geo_ids when an overlap references a county
/// with no records, or a county has no overlap at all (either would break
/// conservation silently).
pub fn allocate_to_cwa(
    county_records: &[LepRecord],
    overlaps: &[CwaOverlap],
    tract_records: &[LepRecord],
) -> Result<Vec<CwaStats>, GeoError> {
    for record in county_records {
        if record.geo_level != GeoLevel::County {
            return Err(GeoError::InvalidArgument(format!(
                "county record set contains {:?} row {}",
                record.geo_level, record.geo_id
            )));
        }
    }
    validate_overlap_fractions(overlaps)?;

    let mut by_county: BTreeMap<&str, Vec<&CwaOverlap>> = BTreeMap::new();
    for overlap in overlaps {
        by_county.entry(overlap.county_id.as_str()).or_default().push(overlap);
    }
    for sides in by_county.values_mut() {
        sides.sort_by(|a, b| a.cwa_id.cmp(&b.cwa_id));
    }

    // (county, language) -> counts
    let mut county_counts: BTreeMap<(&str, &str), LanguageCount> = BTreeMap::new();
    for record in county_records {
        let entry = county_counts
            .entry((record.geo_id.as_str(), record.language.as_str()))
            .or_default();
        entry.total += record.total_speakers;
        entry.lep += record.lep_speakers;
    }
    let counties_with_records: BTreeSet<&str> =
        county_counts.keys().map(|(county, _)| *county).collect();

    let missing: Vec<String> = by_county
        .keys()
        .filter(|county| !counties_with_records.contains(**county))
        .map(|c| c.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(GeoError::MissingCounties(missing));
    }
    let unassigned: Vec<String> = counties_with_records
        .iter()
        .filter(|county| !by_county.contains_key(**county))
        .map(|c| c.to_string())
        .collect();
    if !unassigned.is_empty() {
        return Err(GeoError::UnassignedCounties(unassigned));
    }

    // (tract, language) -> counts
    let mut tract_counts: BTreeMap<(&str, &str), LanguageCount> = BTreeMap::new();
    for record in tract_records {
        if record.geo_level != GeoLevel::Tract {
            return Err(GeoError::InvalidArgument(format!(
                "tract record set contains {:?} row {}",
                record.geo_level, record.geo_id
            )));
        }
        let entry = tract_counts
            .entry((record.geo_id.as_str(), record.language.as_str()))
            .or_default();
        entry.total += record.total_speakers;
        entry.lep += record.lep_speakers;
    }

    let mut stats: BTreeMap<String, CwaStats> = BTreeMap::new();
    let mut add = |cwa_id: &str, language: &str, count: LanguageCount| {
        if count.total == 0 && count.lep == 0 {
            return;
        }
        let stat = stats.entry(cwa_id.to_string()).or_insert_with(|| CwaStats {
            cwa_id: cwa_id.to_string(),
            ..CwaStats::default()
        });
        let entry = stat.languages.entry(language.to_string()).or_default();
        entry.total += count.total;
        entry.lep += count.lep;
    };

    for ((county, language), counts) in &county_counts {
        let sides = &by_county[county];
        if sides.len() == 1 {
            add(&sides[0].cwa_id, language, *counts);
            continue;
        }
        // tract override per (county, language): applies when every side
        // lists tracts and at least one listed tract has rows for the
        // language
        let tracts_listed = sides.iter().all(|s| !s.tract_ids.is_empty());
        let language_tract_sum = |side: &CwaOverlap| -> LanguageCount {
            let mut sum = LanguageCount::default();
            for tract in &side.tract_ids {
                if let Some(c) = tract_counts.get(&(tract.as_str(), *language)) {
                    sum.total += c.total;
                    sum.lep += c.lep;
                }
            }
            sum
        };
        if tracts_listed {
            let side_sums: Vec<LanguageCount> = sides.iter().map(|s| language_tract_sum(s)).collect();
            if side_sums.iter().any(|c| c.total > 0 || c.lep > 0) {
                for (side, sum) in sides.iter().zip(side_sums) {
                    add(&side.cwa_id, language, sum);
                }
                continue;
            }
        }
        let fractions: Vec<f64> = sides.iter().map(|s| s.fraction).collect();
        let totals = largest_remainder(counts.total, &fractions, None);
        let leps = largest_remainder(counts.lep, &fractions, Some(&totals));
        for ((side, total), lep) in sides.iter().zip(totals).zip(leps) {
            add(&side.cwa_id, language, LanguageCount { total, lep });
        }
    }

    Ok(stats.into_values().collect())
}
