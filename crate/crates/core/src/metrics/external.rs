//! External-scorer adapter for neural metrics.
//!
//! The scorer speaks the shared wire protocol ([`crate::wire`]): request
//! `{"src": ..., "hyp": ..., "ref": ...}`, reply `{"score": <real>}`, over a
//! child process's standard streams or an HTTP POST, with a 10 s default
//! timeout. The neural model itself lives entirely on the other side.

use std::time::Duration;

use thiserror::Error;

use crate::wire::WireClient;

pub use crate::wire::DEFAULT_TIMEOUT;

#[derive(Debug, Error)]
pub enum ScorerError {
    #[error("no external scorer configured")]
    Unavailable,
    #[error("external scorer failed: {0}")]
    Failure(String),
}

/// Handle to a configured external scorer. Calls are serialized per handle.
#[derive(Debug)]
pub struct ExternalScorer {
    client: WireClient,
}

impl ExternalScorer {
    /// Scorer backed by a child process; `argv[0]` is the executable.
    pub fn command(argv: Vec<String>) -> Result<Self, ScorerError> {
        let client = WireClient::command(argv).map_err(|e| ScorerError::Failure(e.to_string()))?;
        Ok(Self { client })
    }

    /// Scorer backed by an HTTP endpoint accepting POSTed JSON requests.
    pub fn http(url: impl Into<String>) -> Self {
        Self {
            client: WireClient::http(url),
        }
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.client = self.client.with_timeout(timeout);
        self
    }

    /// Stable description of the scorer for provenance records.
    pub fn identity(&self) -> &str {
        self.client.identity()
    }

    pub fn score(&self, src: &str, hyp: &str, reference: &str) -> Result<f64, ScorerError> {
        let request = serde_json::json!({ "src": src, "hyp": hyp, "ref": reference });
        let reply = self
            .client
            .call(&request)
            .map_err(|e| ScorerError::Failure(e.to_string()))?;
        reply
            .get("score")
            .and_then(serde_json::Value::as_f64)
            .ok_or_else(|| ScorerError::Failure(format!("reply missing numeric score: {reply}")))
    }
}

/// Scores one pair through `scorer`, or fails with [`ScorerError::Unavailable`]
/// when none is configured.
pub fn external_score(
    src: &str,
    hyp: &str,
    reference: &str,
    scorer: Option<&ExternalScorer>,
) -> Result<f64, ScorerError> {
    scorer
        .ok_or(ScorerError::Unavailable)?
        .score(src, hyp, reference)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn echo_stub(score: &str) -> ExternalScorer {
        ExternalScorer::command(vec![
            "sh".into(),
            "-c".into(),
            format!("while read line; do echo '{{\"score\":{score}}}'; done"),
        ])
        .unwrap()
    }

    #[test]
    fn unconfigured_is_unavailable() {
        let err = external_score("s", "h", "r", None).unwrap_err();
        assert!(matches!(err, ScorerError::Unavailable));
    }

    #[test]
    fn stub_passthrough() {
        let scorer = echo_stub("0.5");
        assert_eq!(scorer.score("src", "hyp", "ref").unwrap(), 0.5);
        // session survives across calls
        assert_eq!(scorer.score("a", "b", "c").unwrap(), 0.5);
    }

    #[test]
    fn malformed_reply_is_a_failure() {
        let scorer = ExternalScorer::command(vec![
            "sh".into(),
            "-c".into(),
            "while read line; do echo not-json; done".into(),
        ])
        .unwrap();
        let err = scorer.score("s", "h", "r").unwrap_err();
        assert!(matches!(err, ScorerError::Failure(_)), "{err}");
    }

    #[test]
    fn reply_without_score_is_a_failure() {
        let scorer = ExternalScorer::command(vec![
            "sh".into(),
            "-c".into(),
            r#"while read line; do echo '{"note":"no score"}'; done"#.into(),
        ])
        .unwrap();
        let err = scorer.score("s", "h", "r").unwrap_err();
        assert!(err.to_string().contains("missing numeric score"), "{err}");
    }

    #[test]
    fn identity_is_recorded() {
        let scorer = echo_stub("0.9");
        assert!(scorer.identity().starts_with("cmd:sh -c"));
        let http = ExternalScorer::http("http://127.0.0.1:1/score");
        assert_eq!(http.identity(), "http:http://127.0.0.1:1/score");
    }
}
