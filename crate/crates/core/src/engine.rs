//! Deterministic replay of a contact stream through either model.
//!
//! A run is fully determined by `(events, initial state, seed, run_index)`.
//! Repetitions may execute in parallel; results are always returned in
//! run-index order.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::coding::{CodingError, CodingState};
use crate::naming_game::{ng_run, NgError, NgState};
use crate::rng::{EventRng, KeyedDraws};
use crate::types::{check_sorted, AgentId, AgentRegistry, ContactEvent, Gamma, MemoryParams, Opinion, ParamError, TimeStamp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    #[serde(rename = "ng")]
    NamingGame,
    Coding,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::NamingGame => "ng",
            ModelKind::Coding => "coding",
        }
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ModelKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ng" => Ok(ModelKind::NamingGame),
            "coding" => Ok(ModelKind::Coding),
            other => Err(format!("unknown model {other:?} (expected ng or coding)")),
        }
    }
}

pub const DEFAULT_REPETITIONS: u32 = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub model: ModelKind,
    pub params: MemoryParams,
    pub gamma: Gamma,
    pub seed: u64,
    pub repetitions: u32,
    /// Events before this time are skipped; initial states are stamped here.
    pub start_time: TimeStamp,
    pub snapshot_times: Vec<TimeStamp>,
    /// Reuse the run-0 initial state for every repetition.
    #[serde(default)]
    pub fixed_init: bool,
}

impl SimConfig {
    pub fn new(model: ModelKind, gamma: Gamma, seed: u64) -> Self {
        SimConfig {
            model,
            params: MemoryParams::default(),
            gamma,
            seed,
            repetitions: DEFAULT_REPETITIONS,
            start_time: TimeStamp::ZERO,
            snapshot_times: Vec::new(),
            fixed_init: false,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        self.params.validate()?;
        if self.repetitions == 0 {
            return Err(SimError::NoRepetitions);
        }
        if self.snapshot_times.windows(2).any(|w| w[1] < w[0]) {
            return Err(SimError::UnsortedSnapshots);
        }
        if let Some(t) = self.snapshot_times.iter().find(|t| **t < self.start_time) {
            return Err(SimError::SnapshotBeforeStart { at: t.hours(), start: self.start_time.hours() });
        }
        Ok(())
    }

    /// Hex SHA-256 of the canonical JSON encoding.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&json))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    NamingGame(NgState),
    Coding(CodingState),
}

impl InitialState {
    pub fn len(&self) -> usize {
        match self {
            InitialState::NamingGame(s) => s.len(),
            InitialState::Coding(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn model(&self) -> ModelKind {
        match self {
            InitialState::NamingGame(_) => ModelKind::NamingGame,
            InitialState::Coding(_) => ModelKind::Coding,
        }
    }
}

/// Snapshots of one run at each requested time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub run_index: u32,
    pub seed: u64,
    pub model: ModelKind,
    pub config_hash: String,
    pub times: Vec<TimeStamp>,
    /// `snapshots[k][agent]` is the exhibited opinion at `times[k]`.
    pub snapshots: Vec<Vec<Opinion>>,
    /// Decayed `(o_A, o_B)` per agent at each time; empty for the Naming Game.
    #[serde(skip)]
    pub latent: Vec<Vec<(f64, f64)>>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error("repetitions must be >= 1")]
    NoRepetitions,
    #[error("snapshot times must be sorted")]
    UnsortedSnapshots,
    #[error("snapshot at {at} h precedes start time {start} h")]
    SnapshotBeforeStart { at: f64, start: f64 },
    #[error("initial state is for {found} but the config runs {expected}")]
    ModelMismatch { expected: ModelKind, found: ModelKind },
    #[error("event {event_index} references agent {agent} but only {n_agents} are initialized")]
    MissingInit { event_index: usize, agent: u32, n_agents: usize },
    #[error(transparent)]
    NamingGame(#[from] NgError),
    #[error(transparent)]
    Coding(#[from] CodingError),
    #[error("initialization failed: {0}")]
    Init(String),
    #[error("run {run_index}: {source}")]
    Run {
        run_index: u32,
        #[source]
        source: Box<SimError>,
    },
}

fn check_coverage(events: &[ContactEvent], n_agents: usize) -> Result<(), SimError> {
    for (event_index, ev) in events.iter().enumerate() {
        for agent in [ev.sender, ev.receiver] {
            if agent.index() >= n_agents {
                return Err(SimError::MissingInit { event_index, agent: agent.0, n_agents });
            }
        }
    }
    Ok(())
}

/// Replays `events` from `init`, drawing event randomness from `draws`.
///
/// Snapshots at time `t` include every event with timestamp `<= t`.
pub fn replay<E: EventRng>(
    events: &[ContactEvent],
    init: &InitialState,
    config: &SimConfig,
    draws: &mut E,
) -> Result<(Vec<Vec<Opinion>>, Vec<Vec<(f64, f64)>>), SimError> {
    config.validate()?;
    check_sorted(events)?;
    if init.model() != config.model {
        return Err(SimError::ModelMismatch { expected: config.model, found: init.model() });
    }
    let skip = events.partition_point(|e| e.t < config.start_time);
    let active = &events[skip..];
    check_coverage(active, init.len())?;

    match init {
        InitialState::NamingGame(state) => {
            let traj = ng_run(active, state, draws)?;
            let snaps = traj.states_at(&config.snapshot_times).into_iter().map(|s| s.opinions).collect();
            Ok((snaps, Vec::new()))
        }
        InitialState::Coding(state) => {
            let mut state = state.clone();
            let mut snaps = Vec::with_capacity(config.snapshot_times.len());
            let mut latent = Vec::with_capacity(config.snapshot_times.len());
            let mut next = 0;
            for &t in &config.snapshot_times {
                while next < active.len() && active[next].t <= t {
                    let ev = &active[next];
                    draws.with_event(next, |rng| state.apply_event(ev, config.gamma, &config.params, rng))?;
                    next += 1;
                }
                let weights = state.latent_at(t, &config.params)?;
                snaps.push(weights.iter().map(|&(a, b)| crate::coding::exhibited_opinion(a, b, config.gamma)).collect());
                latent.push(weights);
            }
            Ok((snaps, latent))
        }
    }
}

/// One run with draws keyed by `(config.seed, run_index, event_index)`.
pub fn run_once(
    events: &[ContactEvent],
    init: &InitialState,
    config: &SimConfig,
    run_index: u32,
) -> Result<Trajectory, SimError> {
    let mut draws = KeyedDraws::new(config.seed, run_index);
    let (snapshots, latent) = replay(events, init, config, &mut draws)?;
    Ok(Trajectory {
        run_index,
        seed: config.seed,
        model: config.model,
        config_hash: config.hash(),
        times: config.snapshot_times.clone(),
        snapshots,
        latent,
    })
}

/// Produces the initial state of each repetition.
pub trait InitSampler: Sync {
    fn sample(&self, config: &SimConfig, run_index: u32) -> Result<InitialState, SimError>;
}

/// Always returns the same state.
pub struct FixedInit(pub InitialState);

impl InitSampler for FixedInit {
    fn sample(&self, _config: &SimConfig, _run_index: u32) -> Result<InitialState, SimError> {
        Ok(self.0.clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[default]
    Parallel,
    Sequential,
}

pub fn run_repeated<S: InitSampler + ?Sized>(
    events: &[ContactEvent],
    sampler: &S,
    config: &SimConfig,
) -> Result<Vec<Trajectory>, SimError> {
    run_repeated_with(events, sampler, config, Execution::Parallel)
}

pub fn run_repeated_with<S: InitSampler + ?Sized>(
    events: &[ContactEvent],
    sampler: &S,
    config: &SimConfig,
    execution: Execution,
) -> Result<Vec<Trajectory>, SimError> {
    config.validate()?;
    let one = |run_index: u32| -> Result<Trajectory, SimError> {
        let init_index = if config.fixed_init { 0 } else { run_index };
        sampler
            .sample(config, init_index)
            .and_then(|init| run_once(events, &init, config, run_index))
            .map_err(|e| SimError::Run { run_index, source: Box::new(e) })
    };
    match execution {
        Execution::Parallel => (0..config.repetitions).into_par_iter().map(one).collect(),
        Execution::Sequential => (0..config.repetitions).map(one).collect(),
    }
}

/// One `(run, agent, snapshot_time, opinion)` row of a trajectory export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub run: u32,
    pub agent: String,
    pub snapshot_time: f64,
    pub opinion: Opinion,
}

/// Flattens trajectories in run, time, agent order.
pub fn trajectory_rows(trajectories: &[Trajectory], agents: &AgentRegistry) -> Vec<TrajectoryRow> {
    let mut rows = Vec::new();
    for traj in trajectories {
        for (t, snap) in traj.times.iter().zip(&traj.snapshots) {
            for (i, &opinion) in snap.iter().enumerate() {
                rows.push(TrajectoryRow {
                    run: traj.run_index,
                    agent: agents.label(AgentId(i as u32)).to_string(),
                    snapshot_time: t.hours(),
                    opinion,
                });
            }
        }
    }
    rows
}

pub fn write_trajectories_csv<W: std::io::Write>(sink: W, rows: &[TrajectoryRow]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(sink);
    for row in rows {
        w.serialize(row)?;
    }
    if rows.is_empty() {
        w.write_record(["run", "agent", "snapshot_time", "opinion"])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coding::OpinionVector;
    use crate::types::AgentId;

    fn ts(h: f64) -> TimeStamp {
        TimeStamp::new(h).unwrap()
    }

    fn ev(s: u32, r: u32, t: f64) -> ContactEvent {
        ContactEvent::new(AgentId(s), AgentId(r), ts(t)).unwrap()
    }

    fn coding_config(times: &[f64]) -> SimConfig {
        let mut c = SimConfig::new(ModelKind::Coding, Gamma::new(0.25).unwrap(), 17);
        c.snapshot_times = times.iter().map(|&t| ts(t)).collect();
        c
    }

    fn stream() -> Vec<ContactEvent> {
        (0..300u32)
            .map(|i| ev(i % 5, (i + 1 + (i * 7) % 4) % 5, i as f64 * 0.7))
            .collect()
    }

    fn coding_init() -> InitialState {
        InitialState::Coding(CodingState::new(vec![
            OpinionVector::new(0.9, 0.1, TimeStamp::ZERO),
            OpinionVector::new(0.1, 0.9, TimeStamp::ZERO),
            OpinionVector::new(0.5, 0.5, TimeStamp::ZERO),
            OpinionVector::new(0.7, 0.2, TimeStamp::ZERO),
            OpinionVector::new(0.0, 0.0, TimeStamp::ZERO),
        ]))
    }

    #[test]
    fn no_events_snapshot_is_discretized_init() {
        let config = coding_config(&[0.0]);
        let traj = run_once(&[], &coding_init(), &config, 0).unwrap();
        use Opinion::*;
        assert_eq!(traj.snapshots, vec![vec![A, B, AB, A, AB]]);
    }

    #[test]
    fn same_run_is_identical() {
        let config = coding_config(&[10.0, 100.0, 200.0]);
        let a = run_once(&stream(), &coding_init(), &config, 3).unwrap();
        let b = run_once(&stream(), &coding_init(), &config, 3).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert_eq!(a.latent, b.latent);
    }

    #[test]
    fn snapshot_boundary_is_closed() {
        let init = InitialState::NamingGame(NgState::new(vec![Opinion::A, Opinion::B]));
        let mut config = coding_config(&[4.999, 5.0]);
        config.model = ModelKind::NamingGame;
        let traj = run_once(&[ev(0, 1, 5.0)], &init, &config, 0).unwrap();
        assert_eq!(traj.snapshots[0], vec![Opinion::A, Opinion::B]);
        assert_eq!(traj.snapshots[1], vec![Opinion::A, Opinion::AB]);
    }

    #[test]
    fn errors() {
        let config = coding_config(&[10.0]);
        let unsorted = vec![ev(0, 1, 5.0), ev(1, 0, 1.0)];
        assert!(matches!(run_once(&unsorted, &coding_init(), &config, 0), Err(SimError::Param(ParamError::Unsorted { .. }))));
        let uncovered = vec![ev(0, 7, 1.0)];
        assert!(matches!(run_once(&uncovered, &coding_init(), &config, 0), Err(SimError::MissingInit { agent: 7, .. })));
        let mut bad = config.clone();
        bad.repetitions = 0;
        assert_eq!(run_repeated(&[], &FixedInit(coding_init()), &bad), Err(SimError::NoRepetitions));
        let mut ng = config.clone();
        ng.model = ModelKind::NamingGame;
        assert!(matches!(run_once(&[], &coding_init(), &ng, 0), Err(SimError::ModelMismatch { .. })));
    }

    #[test]
    fn events_before_start_are_skipped() {
        let mut config = coding_config(&[20.0]);
        config.start_time = ts(10.0);
        let init = InitialState::Coding(CodingState::neutral(2, ts(10.0)));
        let events = vec![ev(0, 1, 1.0), ev(0, 1, 2.0)];
        let traj = run_once(&events, &init, &config, 0).unwrap();
        assert_eq!(traj.latent[0], vec![(0.0, 0.0), (0.0, 0.0)]);
    }

    #[test]
    fn single_repetition_equals_run_once() {
        let mut config = coding_config(&[50.0, 150.0]);
        config.repetitions = 1;
        let many = run_repeated(&stream(), &FixedInit(coding_init()), &config).unwrap();
        assert_eq!(many, vec![run_once(&stream(), &coding_init(), &config, 0).unwrap()]);
    }

    #[test]
    fn parallel_matches_sequential() {
        let config = coding_config(&[50.0, 150.0]);
        let par = run_repeated_with(&stream(), &FixedInit(coding_init()), &config, Execution::Parallel).unwrap();
        let seq = run_repeated_with(&stream(), &FixedInit(coding_init()), &config, Execution::Sequential).unwrap();
        assert_eq!(par.len(), 10);
        assert_eq!(serde_json::to_string(&par).unwrap(), serde_json::to_string(&seq).unwrap());
        assert!(par.iter().enumerate().all(|(i, t)| t.run_index == i as u32));
    }

    #[test]
    fn config_hash_tracks_content() {
        let a = coding_config(&[1.0]);
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.seed += 1;
        assert_ne!(a.hash(), b.hash());
    }
}
