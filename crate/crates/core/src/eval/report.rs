//! Evaluation report tables and their CSV/JSON encodings.
//!
//! One row per `(question, model, gamma, scope)`. The scope is a wave number,
//! `aggregate` (mean of per-wave scores) or `pooled` (one score over all
//! waves' predictions). Naming Game rows leave `gamma` empty.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::EvalError;
use crate::engine::ModelKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scope {
    Wave(u32),
    Aggregate,
    Pooled,
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scope::Wave(w) => write!(f, "{w}"),
            Scope::Aggregate => f.write_str("aggregate"),
            Scope::Pooled => f.write_str("pooled"),
        }
    }
}

impl FromStr for Scope {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "aggregate" => Ok(Scope::Aggregate),
            "pooled" => Ok(Scope::Pooled),
            w => w.parse().map(Scope::Wave).map_err(|_| format!("invalid scope {w:?}")),
        }
    }
}

impl Serialize for Scope {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Scope {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Mean, sample standard deviation and count of a set of run scores.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
    pub n: u32,
}

impl Summary {
    pub fn of(values: &[f64]) -> Summary {
        let n = values.len();
        if n == 0 {
            return Summary { mean: f64::NAN, std: f64::NAN, n: 0 };
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let std = if n > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Summary { mean, std, n: n as u32 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub question: String,
    pub gamma: Option<f64>,
    pub wave: Scope,
    pub model: ModelKind,
    /// Macro-F1 mean over runs.
    pub mean_f1: f64,
    pub std: f64,
    pub n_runs: u32,
    pub mean_micro_f1: f64,
    pub mean_weighted_f1: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub rows: Vec<ReportRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ExportFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GammaScope {
    Aggregate,
    PerWave,
}

/// Best-scoring gamma for one question and scope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestGamma {
    pub question: String,
    pub wave: Scope,
    pub gamma: f64,
    pub mean_f1: f64,
    /// Naming Game mean F1 in the same scope, when available.
    pub baseline_f1: Option<f64>,
}

impl EvaluationReport {
    pub fn extend(&mut self, other: EvaluationReport) {
        self.rows.extend(other.rows);
    }

    pub fn questions(&self) -> Vec<&str> {
        let mut qs: Vec<&str> = self.rows.iter().map(|r| r.question.as_str()).collect();
        qs.dedup();
        qs.sort_unstable();
        qs.dedup();
        qs
    }

    /// Argmax of mean macro-F1 over gamma; ties go to the smaller gamma.
    pub fn best_gamma(&self, scope: GammaScope) -> Vec<BestGamma> {
        let mut best: Vec<BestGamma> = Vec::new();
        let mut candidates: Vec<&ReportRow> = self
            .rows
            .iter()
            .filter(|r| r.model == ModelKind::Coding && r.gamma.is_some())
            .filter(|r| match scope {
                GammaScope::Aggregate => r.wave == Scope::Aggregate,
                GammaScope::PerWave => matches!(r.wave, Scope::Wave(_)),
            })
            .collect();
        candidates.sort_by(|a, b| {
            (a.question.as_str(), a.wave)
                .cmp(&(b.question.as_str(), b.wave))
                .then(a.gamma.unwrap().total_cmp(&b.gamma.unwrap()))
        });
        for row in candidates {
            match best.last_mut() {
                Some(b) if b.question == row.question && b.wave == row.wave => {
                    if row.mean_f1 > b.mean_f1 {
                        b.gamma = row.gamma.unwrap();
                        b.mean_f1 = row.mean_f1;
                    }
                }
                _ => best.push(BestGamma {
                    question: row.question.clone(),
                    wave: row.wave,
                    gamma: row.gamma.unwrap(),
                    mean_f1: row.mean_f1,
                    baseline_f1: None,
                }),
            }
        }
        for b in &mut best {
            b.baseline_f1 = self
                .rows
                .iter()
                .find(|r| r.model == ModelKind::NamingGame && r.question == b.question && r.wave == b.wave)
                .map(|r| r.mean_f1);
        }
        best
    }

    pub fn write<W: Write>(&self, sink: W, format: ExportFormat) -> Result<(), EvalError> {
        match format {
            ExportFormat::Csv => {
                let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(sink);
                w.write_record(CSV_HEADER)?;
                for row in &self.rows {
                    w.serialize(row)?;
                }
                w.flush()?;
            }
            ExportFormat::Json => {
                let mut sink = sink;
                serde_json::to_writer_pretty(&mut sink, self)?;
                sink.write_all(b"\n")?;
            }
        }
        Ok(())
    }

    pub fn read<R: Read>(source: R, format: ExportFormat) -> Result<EvaluationReport, EvalError> {
        Ok(match format {
            ExportFormat::Csv => {
                let mut r = csv::Reader::from_reader(source);
                let rows = r.deserialize().collect::<Result<Vec<ReportRow>, _>>()?;
                EvaluationReport { rows }
            }
            ExportFormat::Json => serde_json::from_reader(source)?,
        })
    }
}

pub const CSV_HEADER: [&str; 9] =
    ["question", "gamma", "wave", "model", "mean_f1", "std", "n_runs", "mean_micro_f1", "mean_weighted_f1"];
