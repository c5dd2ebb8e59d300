//! Census-driven LEP analysis: language-table ingestion, national priority
//! languages, county-to-CWA allocation and dashboard exports.

mod allocate;
mod export;
mod rank;

pub use allocate::allocate_to_cwa;
pub use export::{export_dashboard, render_properties_json, render_summary_csv, ExportPaths};
pub use rank::{rank_wfos, RankOutcome, RankedWfo};

use std::collections::BTreeMap;
use std::io::Read;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeoError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error at line {line}: {detail}")]
    Parse { line: usize, detail: String },
    #[error("counties referenced without records: {0:?}")]
    MissingCounties(Vec<String>),
    #[error("counties without any CWA overlap: {0:?}")]
    UnassignedCounties(Vec<String>),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeoLevel {
    County,
    Tract,
}

impl std::str::FromStr for GeoLevel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_lowercase().as_str() {
            "county" => Ok(GeoLevel::County),
            "tract" => Ok(GeoLevel::Tract),
            other => Err(format!("unknown geo level {other:?}")),
        }
    }
}

/// One census row: speakers of a language in a geography, with the count
/// who speak English less than very well.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LepRecord {
    pub geo_id: String,
    pub geo_level: GeoLevel,
    pub language: String,
    pub total_speakers: u64,
    pub lep_speakers: u64,
}

/// A county's share of one CWA, with the tracts inside the overlap when
/// tract-level refinement is available.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CwaOverlap {
    pub county_id: String,
    pub cwa_id: String,
    pub fraction: f64,
    #[serde(default)]
    pub tract_ids: Vec<String>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LanguageCount {
    pub total: u64,
    pub lep: u64,
}

/// Per-CWA aggregation of language counts.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CwaStats {
    pub cwa_id: String,
    pub languages: BTreeMap<String, LanguageCount>,
    /// area for LEP density; `None` degrades density to the raw LEP count
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub area_sq_km: Option<f64>,
}

impl CwaStats {
    pub fn total_lep(&self) -> u64 {
        self.languages.values().map(|c| c.lep).sum()
    }

    pub fn total_speakers(&self) -> u64 {
        self.languages.values().map(|c| c.total).sum()
    }

    /// Number of distinct language groups with LEP residents.
    pub fn distinct_language_count(&self) -> usize {
        self.languages.values().filter(|c| c.lep > 0).count()
    }

    pub fn lep_density(&self) -> f64 {
        self.total_lep() as f64 / self.area_sq_km.unwrap_or(1.0)
    }
}

/// A row rejected during table load, with the reason.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowDiagnostic {
    pub line: usize,
    pub geo_id: String,
    pub language: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct TableLoad {
    pub records: Vec<LepRecord>,
    pub rejected: Vec<RowDiagnostic>,
}

const LANGUAGE_TABLE_HEADER: [&str; 5] = [
    "geo_id",
    "geo_level",
    "language",
    "total_speakers",
    "lep_speakers",
];

/// Loads `geo_id,geo_level,language,total_speakers,lep_speakers` rows.
/// Malformed rows are hard errors with their line number; rows violating
/// `lep <= total` are rejected with a diagnostic and loading continues.
pub fn load_language_table<R: Read>(reader: R) -> Result<TableLoad, GeoError> {
    let mut csv_reader = csv::Reader::from_reader(reader);
    let headers = csv_reader
        .headers()
        .map_err(|e| GeoError::Parse {
            line: 1,
            detail: e.to_string(),
        })?
        .clone();
    let got: Vec<&str> = headers.iter().collect();
    if got != LANGUAGE_TABLE_HEADER {
        return Err(GeoError::Parse {
            line: 1,
            detail: format!("unexpected header {got:?}, expected {LANGUAGE_TABLE_HEADER:?}"),
        });
    }
    let mut load = TableLoad::default();
    for (i, record) in csv_reader.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| GeoError::Parse {
            line,
            detail: e.to_string(),
        })?;
        if record.len() != 5 {
            return Err(GeoError::Parse {
                line,
                detail: format!("expected 5 fields, got {}", record.len()),
            });
        }
        let geo_level: GeoLevel = record[1].parse().map_err(|e| GeoError::Parse {
            line,
            detail: e,
        })?;
        let total_speakers: u64 = record[3].trim().parse().map_err(|e| GeoError::Parse {
            line,
            detail: format!("total_speakers: {e}"),
        })?;
        let lep_speakers: u64 = record[4].trim().parse().map_err(|e| GeoError::Parse {
            line,
            detail: format!("lep_speakers: {e}"),
        })?;
        if lep_speakers > total_speakers {
            load.rejected.push(RowDiagnostic {
                line,
                geo_id: record[0].to_string(),
                language: record[2].to_string(),
                reason: format!("lep_speakers {lep_speakers} exceeds total_speakers {total_speakers}"),
            });
            continue;
        }
        load.records.push(LepRecord {
            geo_id: record[0].to_string(),
            geo_level,
            language: record[2].to_string(),
            total_speakers,
            lep_speakers,
        });
    }
    Ok(load)
}

const OVERLAP_HEADER: [&str; 4] = ["county_id", "cwa_id", "fraction", "tract_ids"];

/// Loads `county_id,cwa_id,fraction,tract_ids` rows; tract ids are
/// semicolon-separated. Fractions for each county must sum to 1 (±1e-9).
pub fn load_overlaps<R: Read>(reader: R) -> Result<Vec<CwaOverlap>, GeoError> {
    let mut csv_reader = csv::Reader::from_reader(reader);
    let headers = csv_reader
        .headers()
        .map_err(|e| GeoError::Parse {
            line: 1,
            detail: e.to_string(),
        })?
        .clone();
    let got: Vec<&str> = headers.iter().collect();
    if got != OVERLAP_HEADER {
        return Err(GeoError::Parse {
            line: 1,
            detail: format!("unexpected header {got:?}, expected {OVERLAP_HEADER:?}"),
        });
    }
    let mut overlaps = Vec::new();
    for (i, record) in csv_reader.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| GeoError::Parse {
            line,
            detail: e.to_string(),
        })?;
        let fraction: f64 = record[2].trim().parse().map_err(|e| GeoError::Parse {
            line,
            detail: format!("fraction: {e}"),
        })?;
        if !(0.0..=1.0).contains(&fraction) {
            return Err(GeoError::Parse {
                line,
                detail: format!("fraction {fraction} outside [0,1]"),
            });
        }
        overlaps.push(CwaOverlap {
            county_id: record[0].to_string(),
            cwa_id: record[1].to_string(),
            fraction,
            tract_ids: record[3]
                .split(';')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(str::to_string)
                .collect(),
        });
    }
    validate_overlap_fractions(&overlaps)?;
    Ok(overlaps)
}

pub(crate) fn validate_overlap_fractions(overlaps: &[CwaOverlap]) -> Result<(), GeoError> {
    let mut sums: BTreeMap<&str, f64> = BTreeMap::new();
    for overlap in overlaps {
        *sums.entry(overlap.county_id.as_str()).or_insert(0.0) += overlap.fraction;
    }
    for (county, sum) in sums {
        if (sum - 1.0).abs() > 1e-9 {
            return Err(GeoError::InvalidArgument(format!(
                "county {county} overlap fractions sum to {sum}, expected 1"
            )));
        }
    }
    Ok(())
}

/// A language passing the national priority filter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriorityLanguage {
    pub language: String,
    pub total_speakers: u64,
    pub lep_speakers: u64,
    pub ratio: f64,
}

pub const PRIORITY_RATIO_THRESHOLD: f64 = 0.35;
pub const PRIORITY_MIN_LEP: u64 = 200_000;

/// Languages whose LEP-to-total ratio exceeds 35% with a national LEP
/// population of at least 200,000, sorted by LEP population descending.
///
/// When records at both county and tract level are present, only county
/// rows are aggregated (tracts duplicate their counties). Languages with a
/// zero total are skipped with a warning.
pub fn select_priority_languages(records: &[LepRecord]) -> (Vec<PriorityLanguage>, Vec<String>) {
    let has_county = records.iter().any(|r| r.geo_level == GeoLevel::County);
    let mut totals: BTreeMap<&str, (u64, u64)> = BTreeMap::new();
    for record in records {
        if has_county && record.geo_level != GeoLevel::County {
            continue;
        }
        let entry = totals.entry(record.language.as_str()).or_insert((0, 0));
        entry.0 += record.total_speakers;
        entry.1 += record.lep_speakers;
    }
    let mut warnings = Vec::new();
    let mut selected = Vec::new();
    for (language, (total, lep)) in totals {
        if total == 0 {
            warnings.push(format!("language {language:?} has zero total speakers; skipped"));
            continue;
        }
        let ratio = lep as f64 / total as f64;
        if ratio > PRIORITY_RATIO_THRESHOLD && lep >= PRIORITY_MIN_LEP {
            selected.push(PriorityLanguage {
                language: language.to_string(),
                total_speakers: total,
                lep_speakers: lep,
                ratio,
            });
        }
    }
    selected.sort_by(|a, b| {
        b.lep_speakers
            .cmp(&a.lep_speakers)
            .then_with(|| a.language.cmp(&b.language))
    });
    (selected, warnings)
}
