//! Wire protocol shared by external translation engines and scorers:
//! one JSON object per request, one per reply, over either a child
//! process's standard streams (line-delimited) or an HTTP POST.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver};
use std::sync::{Arc, Mutex};
use std::time::Duration;

use thiserror::Error;

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(10);

#[derive(Debug, Error)]
pub enum WireError {
    #[error("{0}")]
    Failure(String),
}

struct ProcessSession {
    child: Child,
    stdin: ChildStdin,
    lines: Receiver<std::io::Result<String>>,
    stderr_tail: Arc<Mutex<String>>,
}

impl Drop for ProcessSession {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

enum Transport {
    Process {
        argv: Vec<String>,
        session: Mutex<Option<ProcessSession>>,
    },
    // the blocking client is built per call: it owns a runtime and must be
    // created and dropped on a blocking thread, never inside an async task
    Http {
        url: String,
    },
}

/// A JSON request/reply peer. Calls are serialized per client; a broken
/// child process is respawned on the next call.
pub struct WireClient {
    transport: Transport,
    timeout: Duration,
    identity: String,
}

impl std::fmt::Debug for WireClient {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("WireClient")
            .field("identity", &self.identity)
            .finish()
    }
}

impl WireClient {
    pub fn command(argv: Vec<String>) -> Result<Self, WireError> {
        if argv.is_empty() {
            return Err(WireError::Failure("empty command".into()));
        }
        let identity = format!("cmd:{}", argv.join(" "));
        Ok(Self {
            transport: Transport::Process {
                argv,
                session: Mutex::new(None),
            },
            timeout: DEFAULT_TIMEOUT,
            identity,
        })
    }

    pub fn http(url: impl Into<String>) -> Self {
        let url = url.into();
        Self {
            transport: Transport::Http { url: url.clone() },
            timeout: DEFAULT_TIMEOUT,
            identity: format!("http:{url}"),
        }
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }

    /// Stable peer description for provenance records.
    pub fn identity(&self) -> &str {
        &self.identity
    }

    /// Sends one JSON request and decodes one JSON reply.
    pub fn call(&self, request: &serde_json::Value) -> Result<serde_json::Value, WireError> {
        let encoded = serde_json::to_string(request)
            .map_err(|e| WireError::Failure(format!("request encode: {e}")))?;
        let reply = match &self.transport {
            Transport::Process { argv, session } => self.call_process(argv, session, &encoded)?,
            Transport::Http { url } => self.call_http(url, &encoded)?,
        };
        serde_json::from_str(reply.trim())
            .map_err(|e| WireError::Failure(format!("malformed reply {reply:?}: {e}")))
    }

    fn call_process(
        &self,
        argv: &[String],
        session: &Mutex<Option<ProcessSession>>,
        request: &str,
    ) -> Result<String, WireError> {
        let mut guard = session.lock().expect("wire session lock");
        if guard.is_none() {
            *guard = Some(spawn_session(argv)?);
        }
        let result = {
            let sess = guard.as_mut().expect("session present");
            write_and_read(sess, request, self.timeout)
        };
        result.map_err(|detail| {
            let tail = guard
                .as_ref()
                .map(|s| {
                    let buf = s.stderr_tail.lock().expect("stderr lock");
                    if buf.is_empty() {
                        String::new()
                    } else {
                        format!("; stderr: {}", buf.trim_end())
                    }
                })
                .unwrap_or_default();
            *guard = None;
            WireError::Failure(format!("{detail}{tail}"))
        })
    }

    fn call_http(&self, url: &str, request: &str) -> Result<String, WireError> {
        let client = reqwest::blocking::Client::new();
        let response = client
            .post(url)
            .header("content-type", "application/json")
            .timeout(self.timeout)
            .body(request.to_string())
            .send()
            .map_err(|e| WireError::Failure(format!("http: {e}")))?;
        let status = response.status();
        let body = response
            .text()
            .map_err(|e| WireError::Failure(format!("http body: {e}")))?;
        if !status.is_success() {
            return Err(WireError::Failure(format!("http status {status}: {body}")));
        }
        Ok(body)
    }
}

fn spawn_session(argv: &[String]) -> Result<ProcessSession, WireError> {
    let mut child = Command::new(&argv[0])
        .args(&argv[1..])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|e| WireError::Failure(format!("spawn {}: {e}", argv[0])))?;
    let stdin = child.stdin.take().expect("piped stdin");
    let stdout = child.stdout.take().expect("piped stdout");
    let stderr = child.stderr.take().expect("piped stderr");

    let (tx, rx) = mpsc::channel();
    std::thread::spawn(move || {
        let reader = BufReader::new(stdout);
        for line in reader.lines() {
            if tx.send(line).is_err() {
                break;
            }
        }
    });
    let stderr_tail = Arc::new(Mutex::new(String::new()));
    let tail = Arc::clone(&stderr_tail);
    std::thread::spawn(move || {
        let reader = BufReader::new(stderr);
        for line in reader.lines().map_while(Result::ok) {
            let mut buf = tail.lock().expect("stderr lock");
            buf.push_str(&line);
            buf.push('\n');
            if buf.len() > 4096 {
                let cut = buf.len() - 4096;
                buf.drain(..cut);
            }
        }
    });
    Ok(ProcessSession {
        child,
        stdin,
        lines: rx,
        stderr_tail,
    })
}

fn write_and_read(
    session: &mut ProcessSession,
    request: &str,
    timeout: Duration,
) -> Result<String, String> {
    session
        .stdin
        .write_all(request.as_bytes())
        .and_then(|_| session.stdin.write_all(b"\n"))
        .and_then(|_| session.stdin.flush())
        .map_err(|e| format!("write: {e}"))?;
    match session.lines.recv_timeout(timeout) {
        Ok(Ok(line)) => Ok(line),
        Ok(Err(e)) => Err(format!("read: {e}")),
        Err(mpsc::RecvTimeoutError::Timeout) => Err(format!("timed out after {timeout:?}")),
        Err(mpsc::RecvTimeoutError::Disconnected) => Err("peer exited".into()),
    }
}
