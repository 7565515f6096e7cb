//! Scoring simulated snapshots against survey waves.

pub mod f1;
pub mod report;
pub mod sweep;

use thiserror::Error;

pub use f1::{f1_score, Averaging, Confusion};
pub use report::{BestGamma, EvaluationReport, ExportFormat, GammaScope, ReportRow, Scope, Summary};
pub use sweep::{default_gamma_grid, score_runs, sweep_gamma, sweep_questions, SweepConfig, WaveTruth};

use crate::engine::SimError;
use crate::types::ParamError;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("no agents shared between prediction and truth")]
    EmptyIntersection,
    #[error("question {question:?} wave {wave}: no agent answered both this wave and wave 1")]
    EmptyWave { question: String, wave: u32 },
    #[error("question {0:?} not found in the survey data")]
    UnknownQuestion(String),
    #[error("question {0:?} has no wave-1 answers to initialize from")]
    NoSeedWave(String),
    #[error("no timestamp configured for wave {0}")]
    MissingWaveTime(u32),
    #[error("question {0:?} has no scored waves (only wave 1)")]
    NoScoredWaves(String),
    #[error("gamma grid is empty")]
    EmptyGrid,
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
