//! Running an external solver on a query file.

use std::ffi::OsString;
use std::io::{self, Read, Write};
use std::os::unix::process::{CommandExt, ExitStatusExt};
use std::path::Path;
use std::process::{Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use adt_eager_core::frontend::parse_backend_output;
use adt_eager_core::{Answer, Verdict};
use thiserror::Error;

/// Environment variable holding the default backend command.
pub const BACKEND_ENV: &str = "ADT_EAGER_BACKEND";
/// Backend used when [`BACKEND_ENV`] is unset.
pub const DEFAULT_BACKEND: &str = "z3";
/// Replaced by the query path in a command; appended when absent.
pub const FILE_PLACEHOLDER: &str = "{file}";

const POLL: Duration = Duration::from_millis(5);

#[derive(Debug, Error)]
pub enum BackendError {
    #[error("empty backend command")]
    EmptyCommand,
    #[error("cannot split backend command `{0}` into words")]
    BadCommand(String),
    #[error("backend timeout must be positive")]
    ZeroTimeout,
    #[error("cannot start `{program}`: {source}")]
    Spawn { program: String, source: io::Error },
    #[error("i/o error while running the backend: {0}")]
    Io(#[from] io::Error),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BackendConfig {
    pub name: String,
    /// Program and arguments.
    pub command: Vec<String>,
    pub timeout: Duration,
}

impl BackendConfig {
    /// Splits `command` with shell quoting rules.
    pub fn new(name: &str, command: &str, timeout: Duration) -> Result<Self, BackendError> {
        let words = shlex::split(command).ok_or_else(|| BackendError::BadCommand(command.into()))?;
        if words.is_empty() {
            return Err(BackendError::EmptyCommand);
        }
        if timeout.is_zero() {
            return Err(BackendError::ZeroTimeout);
        }
        Ok(BackendConfig {
            name: name.into(),
            command: words,
            timeout,
        })
    }

    /// `command`, else [`BACKEND_ENV`], else [`DEFAULT_BACKEND`]. The label
    /// is the program name.
    pub fn resolve(command: Option<&str>, timeout: Duration) -> Result<Self, BackendError> {
        let command = match command {
            Some(c) => c.to_string(),
            None => std::env::var(BACKEND_ENV).unwrap_or_else(|_| DEFAULT_BACKEND.into()),
        };
        let mut cfg = BackendConfig::new("", &command, timeout)?;
        cfg.name = Path::new(&cfg.command[0])
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| cfg.command[0].clone());
        Ok(cfg)
    }

    fn argv(&self, file: &Path) -> Vec<OsString> {
        let mut argv: Vec<OsString> = Vec::with_capacity(self.command.len() + 1);
        let mut substituted = false;
        for word in &self.command {
            if word.contains(FILE_PLACEHOLDER) {
                let parts: Vec<&str> = word.split(FILE_PLACEHOLDER).collect();
                let mut out = OsString::new();
                for (i, part) in parts.iter().enumerate() {
                    if i > 0 {
                        out.push(file.as_os_str());
                    }
                    out.push(part);
                }
                argv.push(out);
                substituted = true;
            } else {
                argv.push(word.into());
            }
        }
        if !substituted {
            argv.push(file.as_os_str().to_owned());
        }
        argv
    }
}

/// Writes `uf_text` to a temporary file and runs the backend on it.
pub fn run_backend(cfg: &BackendConfig, uf_text: &str) -> Result<Verdict, BackendError> {
    run_backend_within(cfg, uf_text, cfg.timeout)
}

/// [`run_backend`] with an explicit time limit.
pub fn run_backend_within(cfg: &BackendConfig, text: &str, limit: Duration) -> Result<Verdict, BackendError> {
    let mut file = tempfile::Builder::new()
        .prefix("adt-eager-")
        .suffix(".smt2")
        .tempfile()?;
    file.write_all(text.as_bytes())?;
    file.flush()?;
    run_backend_on_file(cfg, file.path(), limit)
}

/// Runs the backend on an existing file. On timeout the backend's whole
/// process group is killed.
pub fn run_backend_on_file(cfg: &BackendConfig, path: &Path, limit: Duration) -> Result<Verdict, BackendError> {
    let start = Instant::now();
    let argv = cfg.argv(path);
    let mut child = Command::new(&argv[0])
        .args(&argv[1..])
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .process_group(0)
        .spawn()
        .map_err(|source| BackendError::Spawn {
            program: cfg.command[0].clone(),
            source,
        })?;
    let mut stdout = child.stdout.take().expect("stdout is piped");
    let reader = thread::spawn(move || {
        let mut buf = Vec::new();
        let _ = stdout.read_to_end(&mut buf);
        buf
    });
    let deadline = start + limit;
    let status = loop {
        if let Some(status) = child.try_wait()? {
            break Some(status);
        }
        let now = Instant::now();
        if now >= deadline {
            break None;
        }
        thread::sleep(POLL.min(deadline - now));
    };
    // Also reaps anything the backend left running in its group.
    kill_group(child.id());
    if status.is_none() {
        let _ = child.wait();
    }
    let output = reader.join().unwrap_or_default();
    let elapsed = start.elapsed();
    let answer = match status {
        None => Answer::Unknown("timeout".into()),
        Some(status) => match parse_backend_output(&String::from_utf8_lossy(&output)) {
            Answer::Unknown(reason) => match status.signal() {
                Some(sig) => Answer::Unknown(format!("crashed with signal {sig}")),
                None => Answer::Unknown(reason),
            },
            decided => decided,
        },
    };
    Ok(Verdict {
        answer,
        elapsed,
        source: cfg.name.clone(),
    })
}

fn kill_group(pid: u32) {
    // SAFETY: kill has no memory-safety preconditions; the process group
    // was created for this child.
    unsafe {
        libc::kill(-(pid as libc::pid_t), libc::SIGKILL);
    }
}
