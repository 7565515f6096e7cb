//! Gamma sweeps over survey questions, with the Naming Game as a baseline.
//!
//! Wave 1 seeds the initial state at its timestamp; every later wave is
//! scored on the agents that answered both wave 1 and that wave.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::f1::{Averaging, Confusion};
use super::report::{EvaluationReport, ReportRow, Scope, Summary};
use super::EvalError;
use crate::data::{Answer, Dataset, SurveyInit};
use crate::engine::{run_repeated, ModelKind, SimConfig, Trajectory, DEFAULT_REPETITIONS};
use crate::types::{Gamma, MemoryParams, TimeStamp};

/// `0.1, 0.2, ..., 0.9`.
pub fn default_gamma_grid() -> Vec<f64> {
    (1..=9).map(|i| i as f64 / 10.0).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub gammas: Vec<f64>,
    pub params: MemoryParams,
    pub seed: u64,
    pub repetitions: u32,
    /// `wave_times[w - 1]` is the collection time of wave `w`, in hours
    /// since the earliest event.
    pub wave_times: Vec<TimeStamp>,
    pub fixed_init: bool,
    pub include_baseline: bool,
}

impl SweepConfig {
    pub fn new(seed: u64, wave_times: Vec<TimeStamp>) -> Self {
        SweepConfig {
            gammas: default_gamma_grid(),
            params: MemoryParams::default(),
            seed,
            repetitions: DEFAULT_REPETITIONS,
            wave_times,
            fixed_init: false,
            include_baseline: true,
        }
    }

    fn wave_time(&self, wave: u32) -> Result<TimeStamp, EvalError> {
        wave.checked_sub(1)
            .and_then(|i| self.wave_times.get(i as usize))
            .copied()
            .ok_or(EvalError::MissingWaveTime(wave))
    }
}

/// Ground truth of one scored wave: `(agent index, answer)` pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveTruth {
    pub wave: u32,
    pub truth: Vec<(usize, Answer)>,
}

struct Cell {
    model: ModelKind,
    gamma: Option<f64>,
}

/// Scores every run against every wave. `trajectories[r].snapshots[k]` must
/// correspond to `waves[k]`.
pub fn score_runs(
    question: &str,
    model: ModelKind,
    gamma: Option<f64>,
    trajectories: &[Trajectory],
    waves: &[WaveTruth],
) -> Result<Vec<ReportRow>, EvalError> {
    let n_waves = waves.len();
    // scores[wave slot][run] = (macro, micro, weighted); the last two slots
    // hold the aggregate and pooled scores.
    let mut scores = vec![Vec::with_capacity(trajectories.len()); n_waves + 2];
    for traj in trajectories {
        let mut pooled = Confusion::default();
        let mut per_wave = [0.0; 3];
        for (k, w) in waves.iter().enumerate() {
            let snap = &traj.snapshots[k];
            let c = Confusion::from_pairs(w.truth.iter().map(|&(agent, truth)| (Answer::from_opinion(snap[agent]), truth)));
            pooled.merge(&c);
            let s = triple(&c)?;
            for (acc, v) in per_wave.iter_mut().zip(s) {
                *acc += v / n_waves as f64;
            }
            scores[k].push(s);
        }
        scores[n_waves].push(per_wave);
        scores[n_waves + 1].push(triple(&pooled)?);
    }
    let scopes = waves.iter().map(|w| Scope::Wave(w.wave)).chain([Scope::Aggregate, Scope::Pooled]);
    Ok(scopes
        .zip(&scores)
        .map(|(scope, runs)| {
            let column = |i: usize| runs.iter().map(|s| s[i]).collect::<Vec<f64>>();
            let headline = Summary::of(&column(0));
            ReportRow {
                question: question.to_string(),
                gamma,
                wave: scope,
                model,
                mean_f1: headline.mean,
                std: headline.std,
                n_runs: headline.n,
                mean_micro_f1: Summary::of(&column(1)).mean,
                mean_weighted_f1: Summary::of(&column(2)).mean,
            }
        })
        .collect())
}

fn triple(c: &Confusion) -> Result<[f64; 3], EvalError> {
    Ok([c.f1(Averaging::Macro)?, c.f1(Averaging::Micro)?, c.f1(Averaging::Weighted)?])
}

/// Sweeps `config.gammas` for one question. Rows come out in a fixed order:
/// the baseline first, then gammas in grid order; within each, waves
/// ascending, then `aggregate`, then `pooled`.
pub fn sweep_gamma(dataset: &Dataset, question: &str, config: &SweepConfig) -> Result<EvaluationReport, EvalError> {
    if config.gammas.is_empty() {
        return Err(EvalError::EmptyGrid);
    }
    let gammas = config.gammas.iter().map(|&g| Gamma::new(g)).collect::<Result<Vec<_>, _>>()?;
    config.params.validate()?;

    let answers = dataset.question(question).ok_or_else(|| EvalError::UnknownQuestion(question.to_string()))?;
    let seed_wave = answers.wave(1).ok_or_else(|| EvalError::NoSeedWave(question.to_string()))?;
    let start_time = config.wave_time(1)?;

    let mut waves = Vec::new();
    let mut snapshot_times = Vec::new();
    for (&wave, row) in answers.waves.range(2..) {
        let truth: Vec<(usize, Answer)> = row
            .iter()
            .enumerate()
            .filter_map(|(agent, a)| Some((agent, (*a)?)))
            .filter(|(agent, _)| seed_wave[*agent].is_some())
            .collect();
        if truth.is_empty() {
            return Err(EvalError::EmptyWave { question: question.to_string(), wave });
        }
        snapshot_times.push(config.wave_time(wave)?);
        waves.push(WaveTruth { wave, truth });
    }
    if waves.is_empty() {
        return Err(EvalError::NoScoredWaves(question.to_string()));
    }

    let sampler = SurveyInit { answers: seed_wave.to_vec() };
    let base = SimConfig {
        model: ModelKind::Coding,
        params: config.params,
        gamma: gammas[0],
        seed: config.seed,
        repetitions: config.repetitions,
        start_time,
        snapshot_times,
        fixed_init: config.fixed_init,
    };

    let mut cells = Vec::new();
    if config.include_baseline {
        cells.push(Cell { model: ModelKind::NamingGame, gamma: None });
    }
    cells.extend(config.gammas.iter().map(|&g| Cell { model: ModelKind::Coding, gamma: Some(g) }));

    let rows = cells
        .par_iter()
        .map(|cell| {
            let mut sim = base.clone();
            sim.model = cell.model;
            if let Some(g) = cell.gamma {
                sim.gamma = Gamma::new(g)?;
            }
            let runs = run_repeated(&dataset.events, &sampler, &sim)?;
            score_runs(question, cell.model, cell.gamma, &runs, &waves)
        })
        .collect::<Result<Vec<_>, EvalError>>()?;
    Ok(EvaluationReport { rows: rows.into_iter().flatten().collect() })
}

/// Sweeps several questions; rows are grouped by question in the given order.
pub fn sweep_questions(dataset: &Dataset, questions: &[String], config: &SweepConfig) -> Result<EvaluationReport, EvalError> {
    let mut report = EvaluationReport::default();
    for q in questions {
        report.extend(sweep_gamma(dataset, q, config)?);
    }
    Ok(report)
}

/// Per-question count of scored agents in each wave.
pub fn scored_population(dataset: &Dataset, question: &str) -> BTreeMap<u32, usize> {
    let Some(answers) = dataset.question(question) else { return BTreeMap::new() };
    let Some(seed) = answers.wave(1) else { return BTreeMap::new() };
    answers
        .waves
        .range(2..)
        .map(|(&w, row)| (w, row.iter().zip(seed).filter(|(a, s)| a.is_some() && s.is_some()).count()))
        .collect()
}
