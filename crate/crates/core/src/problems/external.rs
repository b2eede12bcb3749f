//! Line-oriented protocol for objective functions that live in another
//! process.
//!
//! ```text
//! parent -> child   HELLO 1
//! child  -> parent  READY <M> <D>
//! parent -> child   EVAL <fe_index> <x_1> ... <x_D>
//! child  -> parent  OBJ <fe_index> <f_1> ... <f_M>
//! parent -> child   BYE
//! ```
//!
//! Numbers are written in Rust's shortest round-trip decimal form, so the
//! child sees exactly the parent's `f64` values.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::BoundsBox;

use super::Evaluator;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    #[default]
    Min,
    Max,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExternalEvaluatorSpec {
    /// Program followed by its arguments.
    pub command: Vec<String>,
    pub m: usize,
    pub d: usize,
    pub bounds: BoundsBox,
    #[serde(default = "default_timeout_ms")]
    pub timeout_ms: u64,
    /// Per objective; maximized objectives are negated on receipt. Empty
    /// means all minimized.
    #[serde(default)]
    pub senses: Vec<Sense>,
}

fn default_timeout_ms() -> u64 {
    60_000
}

impl ExternalEvaluatorSpec {
    pub fn validate(&self) -> Result<()> {
        if self.command.is_empty() {
            return Err(Error::Config("external evaluator command is empty".into()));
        }
        if self.m < 2 {
            return Err(Error::Config(format!("external problem needs M >= 2, got {}", self.m)));
        }
        if self.bounds.dim() != self.d {
            return Err(Error::Config(format!(
                "bounds have dimension {} but D = {}",
                self.bounds.dim(),
                self.d
            )));
        }
        if !self.senses.is_empty() && self.senses.len() != self.m {
            return Err(Error::Config(format!("{} senses for {} objectives", self.senses.len(), self.m)));
        }
        Ok(())
    }

    fn sense(&self, k: usize) -> Sense {
        self.senses.get(k).copied().unwrap_or_default()
    }
}

/// A running, handshaken evaluator process.
pub struct ExternalEvaluator {
    spec: ExternalEvaluatorSpec,
    child: Child,
    stdin: Option<ChildStdin>,
    lines: Receiver<std::io::Result<String>>,
    broken: bool,
}

impl std::fmt::Debug for ExternalEvaluator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ExternalEvaluator")
            .field("command", &self.spec.command)
            .field("pid", &self.child.id())
            .field("broken", &self.broken)
            .finish()
    }
}

impl ExternalEvaluator {
    /// Launches the process and performs the handshake (reported as
    /// evaluation 0 on failure).
    pub fn spawn(spec: ExternalEvaluatorSpec) -> Result<Self> {
        spec.validate()?;
        let mut child = Command::new(&spec.command[0])
            .args(&spec.command[1..])
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| Error::EvalFailure { fe_index: 0, message: format!("cannot launch {:?}: {e}", spec.command) })?;
        let stdin = child.stdin.take();
        let stdout = child.stdout.take().expect("stdout was piped");
        let (tx, rx) = mpsc::channel();
        std::thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                let stop = line.is_err();
                if tx.send(line).is_err() || stop {
                    break;
                }
            }
        });
        let mut ev = Self { spec, child, stdin, lines: rx, broken: false };
        ev.send("HELLO 1", 0)?;
        let reply = ev.receive(0)?;
        let fields: Vec<&str> = reply.split_whitespace().collect();
        let expected = [ev.spec.m.to_string(), ev.spec.d.to_string()];
        if fields.len() != 3 || fields[0] != "READY" || fields[1] != expected[0] || fields[2] != expected[1] {
            ev.broken = true;
            return Err(Error::Protocol {
                fe_index: 0,
                message: format!("expected `READY {} {}`, got `{reply}`", expected[0], expected[1]),
            });
        }
        Ok(ev)
    }

    pub fn spec(&self) -> &ExternalEvaluatorSpec {
        &self.spec
    }

    /// One request/response exchange.
    pub fn evaluate(&mut self, x: &[f64], fe_index: usize) -> Result<Vec<f64>> {
        if self.broken {
            return Err(Error::EvalFailure { fe_index, message: "evaluator is no longer usable".into() });
        }
        if x.len() != self.spec.d {
            return Err(Error::contract(format!("expected {} variables, got {}", self.spec.d, x.len())));
        }
        let mut request = format!("EVAL {fe_index}");
        for v in x {
            request.push(' ');
            request.push_str(&v.to_string());
        }
        self.send(&request, fe_index)?;
        let reply = self.receive(fe_index)?;
        let f = self.parse_objectives(&reply, fe_index).inspect_err(|_| self.broken = true)?;
        Ok(f.into_iter()
            .enumerate()
            .map(|(k, v)| if self.spec.sense(k) == Sense::Max { -v } else { v })
            .collect())
    }

    fn parse_objectives(&self, reply: &str, fe_index: usize) -> Result<Vec<f64>> {
        let bad = |message: String| Error::Protocol { fe_index, message };
        let mut fields = reply.split_whitespace();
        if fields.next() != Some("OBJ") {
            return Err(bad(format!("expected an OBJ line, got `{reply}`")));
        }
        let echoed = fields.next().and_then(|s| s.parse::<usize>().ok());
        if echoed != Some(fe_index) {
            return Err(bad(format!("response is not for evaluation {fe_index}: `{reply}`")));
        }
        let values: Vec<f64> = fields
            .map(|s| s.parse::<f64>().map_err(|_| bad(format!("`{s}` is not a number"))))
            .collect::<Result<_>>()?;
        if values.len() != self.spec.m {
            return Err(bad(format!("expected {} objectives, got {}", self.spec.m, values.len())));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(bad(format!("non-finite objective in `{reply}`")));
        }
        Ok(values)
    }

    fn send(&mut self, line: &str, fe_index: usize) -> Result<()> {
        let result = match self.stdin.as_mut() {
            Some(stdin) => writeln!(stdin, "{line}").and_then(|_| stdin.flush()),
            None => Err(std::io::Error::new(std::io::ErrorKind::BrokenPipe, "stdin closed")),
        };
        result.map_err(|e| {
            self.broken = true;
            self.failure(fe_index, format!("cannot write request: {e}"))
        })
    }

    fn receive(&mut self, fe_index: usize) -> Result<String> {
        let timeout = Duration::from_millis(self.spec.timeout_ms);
        match self.lines.recv_timeout(timeout) {
            Ok(Ok(line)) => Ok(line.trim_end().to_string()),
            Ok(Err(e)) => {
                self.broken = true;
                Err(Error::Protocol { fe_index, message: format!("unreadable response: {e}") })
            }
            Err(RecvTimeoutError::Timeout) => {
                self.broken = true;
                let _ = self.child.kill();
                let _ = self.child.wait();
                Err(Error::EvalTimeout { fe_index })
            }
            Err(RecvTimeoutError::Disconnected) => {
                self.broken = true;
                Err(self.failure(fe_index, "evaluator closed its output".into()))
            }
        }
    }

    /// Distinguishes a crashed child (non-zero exit) from one that simply
    /// stopped talking.
    fn failure(&mut self, fe_index: usize, context: String) -> Error {
        let status = match self.child.try_wait() {
            Ok(Some(s)) => Some(s),
            Ok(None) => {
                std::thread::sleep(Duration::from_millis(50));
                self.child.try_wait().ok().flatten()
            }
            Err(_) => None,
        };
        match status {
            Some(s) if !s.success() => Error::EvalFailure { fe_index, message: format!("{context}; exited with {s}") },
            _ => Error::Protocol { fe_index, message: context },
        }
    }
}

impl Drop for ExternalEvaluator {
    fn drop(&mut self) {
        if !self.broken {
            if let Some(mut stdin) = self.stdin.take() {
                let _ = writeln!(stdin, "BYE").and_then(|_| stdin.flush());
            }
        }
        self.stdin = None;
        for _ in 0..20 {
            if matches!(self.child.try_wait(), Ok(Some(_))) {
                return;
            }
            std::thread::sleep(Duration::from_millis(10));
        }
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

impl Evaluator for ExternalEvaluator {
    fn num_objectives(&self) -> usize {
        self.spec.m
    }

    fn bounds(&self) -> &BoundsBox {
        &self.spec.bounds
    }

    fn evaluate(&mut self, x: &[f64], fe_index: usize) -> Result<Vec<f64>> {
        ExternalEvaluator::evaluate(self, x, fe_index)
    }
}

pub fn external_evaluate(evaluator: &mut ExternalEvaluator, x: &[f64], fe_index: usize) -> Result<Vec<f64>> {
    evaluator.evaluate(x, fe_index)
}
