//! Dashboard exports: a per-CWA summary CSV (top-5 LEP languages with
//! percentage breakdown) and a GeoJSON-properties JSON keyed by CWA id.
//! Field order and formatting are fixed so identical stats export
//! byte-identically.

use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use super::{CwaStats, GeoError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExportPaths {
    pub summary_csv: PathBuf,
    pub properties_json: PathBuf,
}

const TOP_LANGUAGES: usize = 5;

/// floor to one decimal so the top-5 shares never round above 100
fn floor_pct(lep: u64, total: u64) -> f64 {
    (1000.0 * lep as f64 / total as f64).floor() / 10.0
}

fn top_languages(stats: &CwaStats) -> Vec<(&str, u64)> {
    let mut langs: Vec<(&str, u64)> = stats
        .languages
        .iter()
        .filter(|(_, c)| c.lep > 0)
        .map(|(l, c)| (l.as_str(), c.lep))
        .collect();
    langs.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
    langs.truncate(TOP_LANGUAGES);
    langs
}

/// Renders the summary CSV: one row per CWA, top-5 languages padded with
/// blanks, percentages of the CWA's LEP population with an `other` bucket
/// closing the gap to 100.
pub fn render_summary_csv(stats: &[CwaStats]) -> String {
    let mut out = String::from("cwa_id,total_lep,distinct_languages");
    for i in 1..=TOP_LANGUAGES {
        out.push_str(&format!(",lang_{i},lang_{i}_lep,lang_{i}_pct"));
    }
    out.push_str(",other_pct\n");
    let mut sorted: Vec<&CwaStats> = stats.iter().collect();
    sorted.sort_by(|a, b| a.cwa_id.cmp(&b.cwa_id));
    for stat in sorted {
        let total_lep = stat.total_lep();
        out.push_str(&format!(
            "{},{},{}",
            stat.cwa_id,
            total_lep,
            stat.distinct_language_count()
        ));
        let top = top_languages(stat);
        let mut pct_sum = 0.0;
        for i in 0..TOP_LANGUAGES {
            match top.get(i) {
                Some((lang, lep)) if total_lep > 0 => {
                    let pct = floor_pct(*lep, total_lep);
                    pct_sum += pct;
                    out.push_str(&format!(",{lang},{lep},{pct:.1}"));
                }
                _ => out.push_str(",,,"),
            }
        }
        if total_lep > 0 {
            out.push_str(&format!(",{:.1}\n", 100.0 - pct_sum));
        } else {
            out.push_str(",\n");
        }
    }
    out
}

/// Renders the GeoJSON-properties object: `{ "<cwa_id>": { ... } }` with
/// sorted keys.
pub fn render_properties_json(stats: &[CwaStats]) -> String {
    let mut root = Map::new();
    for stat in stats {
        let mut languages = Map::new();
        for (lang, count) in &stat.languages {
            languages.insert(
                lang.clone(),
                json!({ "total": count.total, "lep": count.lep }),
            );
        }
        let top: Vec<Value> = top_languages(stat)
            .into_iter()
            .map(|(lang, lep)| json!({ "language": lang, "lep": lep }))
            .collect();
        let mut properties = Map::new();
        properties.insert("cwa_id".into(), json!(stat.cwa_id));
        properties.insert("total_lep".into(), json!(stat.total_lep()));
        properties.insert(
            "distinct_languages".into(),
            json!(stat.distinct_language_count()),
        );
        if let Some(area) = stat.area_sq_km {
            properties.insert("area_sq_km".into(), json!(area));
            properties.insert("lep_density".into(), json!(stat.lep_density()));
        }
        properties.insert("languages".into(), Value::Object(languages));
        properties.insert("top_languages".into(), Value::Array(top));
        root.insert(stat.cwa_id.clone(), Value::Object(properties));
    }
    let mut rendered =
        serde_json::to_string_pretty(&Value::Object(root)).expect("stats serialize");
    rendered.push('\n');
    rendered
}

/// Writes `cwa_summary.csv` and `cwa_properties.json` under `out_dir`.
pub fn export_dashboard(stats: &[CwaStats], out_dir: &Path) -> Result<ExportPaths, GeoError> {
    std::fs::create_dir_all(out_dir)?;
    let summary_csv = out_dir.join("cwa_summary.csv");
    let properties_json = out_dir.join("cwa_properties.json");
    std::fs::write(&summary_csv, render_summary_csv(stats))?;
    std::fs::write(&properties_json, render_properties_json(stats))?;
    Ok(ExportPaths {
        summary_csv,
        properties_json,
    })
}
