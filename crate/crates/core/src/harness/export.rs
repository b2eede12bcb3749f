use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::Archive;
use crate::optimizer::{TraceRecord, Variant};

/// First line of every trace file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceHeader {
    pub job: String,
    /// Position of the job in its experiment, used to order summaries.
    pub job_index: usize,
    pub group: String,
    pub problem: String,
    pub variant: Variant,
    pub run: usize,
    pub seed: u64,
    pub num_objectives: usize,
    pub dim: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub hv_reference: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub reference_front_size: Option<usize>,
}

/// One line of a trace file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TraceLine {
    Header(TraceHeader),
    Eval(TraceRecord),
    /// The run stopped early.
    Error { message: String },
    /// The run spent its budget.
    End { evaluations: usize, iterations: usize },
}

/// A run's evaluations in order, plus how it ended.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub header: TraceHeader,
    pub records: Vec<TraceRecord>,
    pub error: Option<String>,
    /// Loop rounds completed; `None` unless the run finished.
    pub iterations: Option<usize>,
}

impl Trace {
    pub fn completed(&self) -> bool {
        self.error.is_none() && self.iterations.is_some()
    }

    pub fn to_ndjson(&self) -> String {
        let mut out = String::new();
        let mut line = |l: TraceLine| {
            out.push_str(&serde_json::to_string(&l).expect("trace lines serialize"));
            out.push('\n');
        };
        line(TraceLine::Header(self.header.clone()));
        for r in &self.records {
            line(TraceLine::Eval(r.clone()));
        }
        if let Some(message) = &self.error {
            line(TraceLine::Error { message: message.clone() });
        }
        if let Some(iterations) = self.iterations {
            line(TraceLine::End { evaluations: self.records.len(), iterations });
        }
        out
    }

    pub fn from_ndjson(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let parse = |n: usize, l: &str| -> Result<TraceLine> {
            serde_json::from_str(l).map_err(|e| Error::Config(format!("trace line {}: {e}", n + 1)))
        };
        let header = match lines.next() {
            Some((n, l)) => match parse(n, l)? {
                TraceLine::Header(h) => h,
                _ => return Err(Error::Config("trace does not start with a header line".into())),
            },
            None => return Err(Error::Config("empty trace".into())),
        };
        let mut trace = Trace { header, records: Vec::new(), error: None, iterations: None };
        for (n, l) in lines {
            match parse(n, l)? {
                TraceLine::Eval(r) => trace.records.push(r),
                TraceLine::Error { message } => trace.error = Some(message),
                TraceLine::End { iterations, .. } => trace.iterations = Some(iterations),
                TraceLine::Header(_) => return Err(Error::Config(format!("trace line {}: second header", n + 1))),
            }
        }
        Ok(trace)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_ndjson(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// The archive the trace describes.
    pub fn archive(&self) -> Result<Archive> {
        crate::optimizer::RunResult::archive_from_trace(&self.records)
    }

    /// Indicator values after the last evaluation.
    pub fn final_igd(&self) -> Option<f64> {
        self.records.last().and_then(|r| r.igd)
    }

    pub fn final_hv(&self) -> Option<f64> {
        self.records.last().and_then(|r| r.hv)
    }

    /// `fe_index,tag,igd,best_igd,hv`, one row per evaluation. Missing
    /// indicators are left empty; `best_igd` is the running minimum.
    pub fn convergence_csv(&self) -> String {
        let mut out = String::from("fe_index,tag,igd,best_igd,hv\n");
        let mut best = f64::INFINITY;
        for r in &self.records {
            let igd = r.igd.map(|v| v.to_string()).unwrap_or_default();
            let best_igd = r
                .igd
                .map(|v| {
                    best = best.min(v);
                    best.to_string()
                })
                .unwrap_or_default();
            let hv = r.hv.map(|v| v.to_string()).unwrap_or_default();
            let _ = writeln!(out, "{},{},{igd},{best_igd},{hv}", r.fe_index, r.tag);
        }
        out
    }

    /// The final non-dominated samples as `fe_index,x_1..x_D,f_1..f_M`.
    pub fn front_csv(&self) -> Result<String> {
        let archive = self.archive()?;
        let (d, m) = (self.header.dim, self.header.num_objectives);
        let mut out = String::from("fe_index");
        for i in 1..=d {
            let _ = write!(out, ",x{i}");
        }
        for k in 1..=m {
            let _ = write!(out, ",f{k}");
        }
        out.push('\n');
        for i in archive.first_front() {
            let s = archive.get(i);
            out.push_str(&s.fe_index.to_string());
            for v in s.x.iter().chain(&s.f) {
                let _ = write!(out, ",{v}");
            }
            out.push('\n');
        }
        Ok(out)
    }
}
