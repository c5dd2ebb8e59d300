//! Synthetic training-sentence generation from slot templates, e.g.
//! `[Day] will be [sky] with a high temperature in the low [tens]s.`

use std::collections::BTreeMap;
use std::sync::LazyLock;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use regex::Regex;
use serde::{Deserialize, Serialize};

use super::PipelineError;

static MARKER: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\[([^\[\]]+)\]").unwrap());

/// A sentence pattern with named slot markers and their value pools.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyntheticTemplate {
    pub pattern: String,
    pub slots: BTreeMap<String, Vec<String>>,
}

impl SyntheticTemplate {
    pub fn validate(&self) -> Result<(), PipelineError> {
        for (name, values) in &self.slots {
            if values.is_empty() {
                return Err(PipelineError::InvalidArgument(format!(
                    "slot {name:?} has no values"
                )));
            }
        }
        for caps in MARKER.captures_iter(&self.pattern) {
            let name = &caps[1];
            if !self.slots.contains_key(name) {
                return Err(PipelineError::InvalidArgument(format!(
                    "marker [{name}] has no slot"
                )));
            }
        }
        Ok(())
    }
}

/// Generates `n` sentences: templates cycle round-robin and every marker is
/// filled with a uniformly drawn slot value. Deterministic for a fixed seed.
pub fn generate_synthetic(
    templates: &[SyntheticTemplate],
    n: usize,
    seed: u64,
) -> Result<Vec<String>, PipelineError> {
    if templates.is_empty() {
        return Err(PipelineError::InvalidArgument("no templates".into()));
    }
    for template in templates {
        template.validate()?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let template = &templates[i % templates.len()];
        let mut sentence = String::with_capacity(template.pattern.len());
        let mut last = 0usize;
        for caps in MARKER.captures_iter(&template.pattern) {
            let whole = caps.get(0).expect("match");
            sentence.push_str(&template.pattern[last..whole.start()]);
            let values = &template.slots[&caps[1]];
            sentence.push_str(&values[rng.gen_range(0..values.len())]);
            last = whole.end();
        }
        sentence.push_str(&template.pattern[last..]);
        out.push(sentence);
    }
    Ok(out)
}
