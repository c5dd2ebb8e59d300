//! WFO ranking: weighted sum of min-max-normalized factors — distinct
//! language groups, LEP density, local translation resources and hazard
//! range.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{CwaStats, GeoError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedWfo {
    pub cwa_id: String,
    pub score: f64,
    /// raw factor values: [distinct languages, lep density, resources, hazards]
    pub factors: [f64; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankOutcome {
    pub ranking: Vec<RankedWfo>,
    pub warnings: Vec<String>,
}

fn min_max_normalize(values: &[f64]) -> Vec<f64> {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(max - min).is_normal() {
        return vec![0.0; values.len()];
    }
    values.iter().map(|v| (v - min) / (max - min)).collect()
}

/// Ranks WFOs by `w1*langs + w2*density + w3*resources + w4*hazards` over
/// min-max-normalized factors. WFOs missing a resources or hazards score are
/// excluded with a warning; ties break alphabetically by CWA id.
pub fn rank_wfos(
    stats: &[CwaStats],
    resources: &BTreeMap<String, f64>,
    hazards: &BTreeMap<String, f64>,
    weights: [f64; 4],
) -> Result<RankOutcome, GeoError> {
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(GeoError::InvalidArgument(format!(
            "weights sum to {sum}, expected 1"
        )));
    }
    if weights.iter().any(|w| *w < 0.0) {
        return Err(GeoError::InvalidArgument("negative weight".into()));
    }
    let mut warnings = Vec::new();
    let mut included: Vec<(&CwaStats, f64, f64)> = Vec::new();
    for stat in stats {
        let (Some(&res), Some(&haz)) = (resources.get(&stat.cwa_id), hazards.get(&stat.cwa_id))
        else {
            warnings.push(format!(
                "{}: missing resources or hazards score; excluded",
                stat.cwa_id
            ));
            continue;
        };
        included.push((stat, res, haz));
    }
    let langs: Vec<f64> = included
        .iter()
        .map(|(s, _, _)| s.distinct_language_count() as f64)
        .collect();
    let density: Vec<f64> = included.iter().map(|(s, _, _)| s.lep_density()).collect();
    let res: Vec<f64> = included.iter().map(|(_, r, _)| *r).collect();
    let haz: Vec<f64> = included.iter().map(|(_, _, h)| *h).collect();
    let norms = [
        min_max_normalize(&langs),
        min_max_normalize(&density),
        min_max_normalize(&res),
        min_max_normalize(&haz),
    ];
    let mut ranking: Vec<RankedWfo> = included
        .iter()
        .enumerate()
        .map(|(i, (stat, r, h))| RankedWfo {
            cwa_id: stat.cwa_id.clone(),
            score: weights
                .iter()
                .zip(&norms)
                .map(|(w, norm)| w * norm[i])
                .sum(),
            factors: [langs[i], density[i], *r, *h],
        })
        .collect();
    ranking.sort_by(|a, b| {
        b.score
            .partial_cmp(&a.score)
            .expect("finite scores")
            .then_with(|| a.cwa_id.cmp(&b.cwa_id))
    });
    Ok(RankOutcome { ranking, warnings })
}
