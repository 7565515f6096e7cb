//! Synthetic contact streams and model-planted survey answers.

use rand::seq::IndexedRandom;
use rand::Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{Answer, SurveyInit, SurveyRecord};
use crate::engine::{run_once, InitSampler, SimConfig, SimError};
use crate::rng::{stream, Purpose};
use crate::types::{AgentId, AgentRegistry, ContactEvent, TimeStamp};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Topology {
    Complete,
    ErdosRenyi { p: f64 },
    BarabasiAlbert { m: u32 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub n_agents: u32,
    pub topology: Topology,
    /// Mean contacts per ordered agent pair per day.
    pub rate_per_day: f64,
    pub horizon_days: f64,
    pub seed: u64,
}

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("need at least 2 agents, got {0}")]
    TooFewAgents(u32),
    #[error("edge probability must be in [0, 1], got {0}")]
    Probability(f64),
    #[error("Barabasi-Albert needs 1 <= m < n, got m={m}, n={n}")]
    Attachment { m: u32, n: u32 },
    #[error("contact rate must be finite and >= 0, got {0}")]
    Rate(f64),
    #[error("horizon must be finite and >= 0, got {0}")]
    Horizon(f64),
    #[error("planted surveys need at least one wave time")]
    NoWaves,
    #[error(transparent)]
    Sim(#[from] SimError),
}

impl SynthSpec {
    pub fn validate(&self) -> Result<(), SynthError> {
        if self.n_agents < 2 {
            return Err(SynthError::TooFewAgents(self.n_agents));
        }
        match self.topology {
            Topology::ErdosRenyi { p } if !(0.0..=1.0).contains(&p) => return Err(SynthError::Probability(p)),
            Topology::BarabasiAlbert { m } if m == 0 || m >= self.n_agents => {
                return Err(SynthError::Attachment { m, n: self.n_agents })
            }
            _ => {}
        }
        if !(self.rate_per_day.is_finite() && self.rate_per_day >= 0.0) {
            return Err(SynthError::Rate(self.rate_per_day));
        }
        if !(self.horizon_days.is_finite() && self.horizon_days >= 0.0) {
            return Err(SynthError::Horizon(self.horizon_days));
        }
        Ok(())
    }
}

/// Undirected edge list `(i, j)` with `i < j`.
pub fn generate_edges<R: Rng + ?Sized>(spec: &SynthSpec, rng: &mut R) -> Result<Vec<(u32, u32)>, SynthError> {
    spec.validate()?;
    let n = spec.n_agents;
    let mut edges = Vec::new();
    match spec.topology {
        Topology::Complete => {
            for i in 0..n {
                for j in i + 1..n {
                    edges.push((i, j));
                }
            }
        }
        Topology::ErdosRenyi { p } => {
            for i in 0..n {
                for j in i + 1..n {
                    if rng.random_bool(p) {
                        edges.push((i, j));
                    }
                }
            }
        }
        Topology::BarabasiAlbert { m } => {
            // Seed clique of m + 1 nodes, then preferential attachment.
            let mut endpoints: Vec<u32> = Vec::new();
            for i in 0..=m {
                for j in i + 1..=m {
                    edges.push((i, j));
                    endpoints.extend([i, j]);
                }
            }
            for new in m + 1..n {
                let mut targets: Vec<u32> = Vec::with_capacity(m as usize);
                while targets.len() < m as usize {
                    let t = *endpoints.choose(rng).expect("seed clique is non-empty");
                    if !targets.contains(&t) {
                        targets.push(t);
                    }
                }
                targets.sort_unstable();
                for t in targets {
                    edges.push((t, new));
                    endpoints.extend([t, new]);
                }
            }
        }
    }
    Ok(edges)
}

/// Poisson contacts on both directions of every edge, sorted by time and
/// shifted so the earliest contact is at hour 0.
pub fn generate_events(spec: &SynthSpec) -> Result<Vec<ContactEvent>, SynthError> {
    let mut rng = stream(spec.seed, 0, Purpose::Synth);
    let edges = generate_edges(spec, &mut rng)?;
    let horizon = spec.horizon_days * 24.0;
    let mut events = Vec::new();
    if spec.rate_per_day > 0.0 {
        let gap = Exp::new(spec.rate_per_day / 24.0).map_err(|_| SynthError::Rate(spec.rate_per_day))?;
        for &(i, j) in &edges {
            for (s, r) in [(i, j), (j, i)] {
                let mut t = gap.sample(&mut rng);
                while t < horizon {
                    events.push((t, s, r));
                    t += gap.sample(&mut rng);
                }
            }
        }
    }
    events.sort_by(|a, b| a.0.total_cmp(&b.0));
    let origin = events.first().map_or(0.0, |e| e.0);
    Ok(events
        .into_iter()
        .map(|(t, s, r)| ContactEvent {
            sender: AgentId(s),
            receiver: AgentId(r),
            t: TimeStamp::new(t - origin).expect("shifted times are non-negative"),
        })
        .collect())
}

/// Uniformly random wave-1 answers.
pub fn random_answers(n_agents: u32, seed: u64) -> Vec<Answer> {
    let mut rng = stream(seed, 0, Purpose::Planted);
    (0..n_agents).map(|_| Answer::from_code(rng.random_range(0..3)).expect("code < 3")).collect()
}

/// Runs `config` once (run 0) from random wave-1 answers and records the
/// exhibited opinions at `wave_times[1..]` as waves 2, 3, ...
///
/// `config.start_time` and `config.snapshot_times` are overridden by
/// `wave_times`. Records are ordered by wave, then agent id, with agent
/// labels from `agents`.
pub fn generate_planted_surveys(
    events: &[ContactEvent],
    agents: &AgentRegistry,
    config: &SimConfig,
    wave_times: &[TimeStamp],
    question: &str,
) -> Result<Vec<SurveyRecord>, SynthError> {
    let (&start, rest) = wave_times.split_first().ok_or(SynthError::NoWaves)?;
    let seed_answers = random_answers(agents.len() as u32, config.seed);
    let mut config = config.clone();
    config.start_time = start;
    config.snapshot_times = rest.to_vec();
    let sampler = SurveyInit { answers: seed_answers.iter().copied().map(Some).collect() };
    let init = sampler.sample(&config, 0)?;
    let traj = run_once(events, &init, &config, 0)?;

    let record = |id: AgentId, wave: u32, answer: Answer| SurveyRecord {
        agent: agents.label(id).to_string(),
        wave,
        question: question.to_string(),
        answer,
    };
    let mut records: Vec<SurveyRecord> = agents.ids().map(|id| record(id, 1, seed_answers[id.index()])).collect();
    for (k, snap) in traj.snapshots.iter().enumerate() {
        records.extend(agents.ids().map(|id| record(id, k as u32 + 2, Answer::from_opinion(snap[id.index()]))));
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n: u32, topology: Topology, rate: f64, days: f64, seed: u64) -> SynthSpec {
        SynthSpec { n_agents: n, topology, rate_per_day: rate, horizon_days: days, seed }
    }

    #[test]
    fn zero_rate_is_empty() {
        assert!(generate_events(&spec(5, Topology::Complete, 0.0, 30.0, 1)).unwrap().is_empty());
    }

    #[test]
    fn deterministic_sorted_and_bounded() {
        let s = spec(8, Topology::ErdosRenyi { p: 0.5 }, 2.0, 10.0, 4);
        let a = generate_events(&s).unwrap();
        assert_eq!(a, generate_events(&s).unwrap());
        assert!(a.windows(2).all(|w| w[0].t <= w[1].t));
        assert_eq!(a[0].t, TimeStamp::ZERO);
        assert!(a.iter().all(|e| e.t.hours() < 240.0 && e.sender != e.receiver));
    }

    #[test]
    fn poisson_mean_two_agents() {
        // Expected 2 * r * T contacts per seed.
        let (r, days) = (3.0, 20.0);
        let total: usize = (0..100).map(|seed| generate_events(&spec(2, Topology::Complete, r, days, seed)).unwrap().len()).sum();
        let mean = total as f64 / 100.0;
        assert!((mean - 2.0 * r * days).abs() / (2.0 * r * days) < 0.05, "mean={mean}");
    }

    #[test]
    fn events_respect_edges() {
        let s = spec(30, Topology::BarabasiAlbert { m: 2 }, 1.0, 5.0, 9);
        let edges = generate_edges(&s, &mut stream(s.seed, 0, Purpose::Synth)).unwrap();
        assert_eq!(edges.len(), 3 + 2 * 27);
        for e in generate_events(&s).unwrap() {
            let key = (e.sender.0.min(e.receiver.0), e.sender.0.max(e.receiver.0));
            assert!(edges.contains(&key));
        }
        let mut degree = vec![0; 30];
        for (i, j) in &edges {
            degree[*i as usize] += 1;
            degree[*j as usize] += 1;
        }
        assert!(degree.iter().all(|&d| d >= 2));
    }

    #[test]
    fn degenerate_specs_rejected() {
        assert!(matches!(generate_events(&spec(0, Topology::Complete, 1.0, 1.0, 0)), Err(SynthError::TooFewAgents(0))));
        assert!(generate_events(&spec(4, Topology::ErdosRenyi { p: 1.5 }, 1.0, 1.0, 0)).is_err());
        assert!(generate_events(&spec(4, Topology::BarabasiAlbert { m: 4 }, 1.0, 1.0, 0)).is_err());
        assert!(generate_events(&spec(4, Topology::Complete, -1.0, 1.0, 0)).is_err());
    }

    #[test]
    fn planted_waves_cover_every_agent() {
        use crate::engine::ModelKind;
        use crate::types::Gamma;
        let s = spec(6, Topology::Complete, 1.0, 10.0, 2);
        let events = generate_events(&s).unwrap();
        let agents = AgentRegistry::numbered(6);
        let cfg = SimConfig::new(ModelKind::Coding, Gamma::new(0.3).unwrap(), 2);
        let waves = [TimeStamp::ZERO, TimeStamp::new(100.0).unwrap(), TimeStamp::new(200.0).unwrap()];
        let recs = generate_planted_surveys(&events, &agents, &cfg, &waves, "q").unwrap();
        assert_eq!(recs.len(), 18);
        assert_eq!(recs.iter().filter(|r| r.wave == 3).count(), 6);
        assert_eq!(recs[0].agent, "0");
        assert!(matches!(generate_planted_surveys(&events, &agents, &cfg, &[], "q"), Err(SynthError::NoWaves)));
    }
}
