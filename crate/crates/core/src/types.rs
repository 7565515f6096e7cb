//! Domain types shared by every model: time, agents, contact events,
//! opinions and the memory-kernel parameters.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Continuous simulation time in hours since the stream epoch.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TimeStamp(f64);

impl TimeStamp {
    pub const ZERO: TimeStamp = TimeStamp(0.0);

    pub fn new(hours: f64) -> Result<Self, ParamError> {
        if hours.is_finite() && hours >= 0.0 {
            Ok(TimeStamp(hours))
        } else {
            Err(ParamError::InvalidTime(hours))
        }
    }

    #[inline]
    pub fn hours(self) -> f64 {
        self.0
    }
}

impl fmt::Display for TimeStamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Dense agent index assigned on ingest. Labels live in [`AgentRegistry`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AgentId(pub u32);

impl AgentId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Maps opaque agent labels to dense ids in first-seen order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AgentRegistry {
    labels: Vec<String>,
    ids: HashMap<String, AgentId>,
}

impl AgentRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registry with labels "0", "1", ... for `n` agents.
    pub fn numbered(n: usize) -> Self {
        let mut reg = Self::new();
        for i in 0..n {
            reg.intern(&i.to_string());
        }
        reg
    }

    pub fn intern(&mut self, label: &str) -> AgentId {
        if let Some(&id) = self.ids.get(label) {
            return id;
        }
        let id = AgentId(self.labels.len() as u32);
        self.labels.push(label.to_owned());
        self.ids.insert(label.to_owned(), id);
        id
    }

    pub fn get(&self, label: &str) -> Option<AgentId> {
        self.ids.get(label).copied()
    }

    pub fn label(&self, id: AgentId) -> &str {
        &self.labels[id.index()]
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = AgentId> + '_ {
        (0..self.labels.len() as u32).map(AgentId)
    }
}

/// One directed communication: `sender` influences `receiver` at `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContactEvent {
    pub sender: AgentId,
    pub receiver: AgentId,
    pub t: TimeStamp,
}

impl ContactEvent {
    pub fn new(sender: AgentId, receiver: AgentId, t: TimeStamp) -> Result<Self, ParamError> {
        if sender == receiver {
            return Err(ParamError::SelfLoop(sender));
        }
        Ok(ContactEvent { sender, receiver, t })
    }
}

/// Checks that `events` are in non-decreasing time order.
pub fn check_sorted(events: &[ContactEvent]) -> Result<(), ParamError> {
    match events.windows(2).position(|w| w[1].t < w[0].t) {
        Some(i) => Err(ParamError::Unsorted { index: i + 1 }),
        None => Ok(()),
    }
}

/// A token transmitted from speaker to listener.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Token {
    A,
    B,
}

impl Token {
    pub fn swapped(self) -> Token {
        match self {
            Token::A => Token::B,
            Token::B => Token::A,
        }
    }
}

/// The exhibited (verbalized) opinion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Opinion {
    A,
    B,
    AB,
}

impl Opinion {
    pub const ALL: [Opinion; 3] = [Opinion::A, Opinion::B, Opinion::AB];

    pub fn swapped(self) -> Opinion {
        match self {
            Opinion::A => Opinion::B,
            Opinion::B => Opinion::A,
            Opinion::AB => Opinion::AB,
        }
    }

    pub fn holds(self, token: Token) -> bool {
        matches!(
            (self, token),
            (Opinion::A, Token::A) | (Opinion::B, Token::B) | (Opinion::AB, _)
        )
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Opinion::A => "A",
            Opinion::B => "B",
            Opinion::AB => "AB",
        }
    }
}

impl From<Token> for Opinion {
    fn from(t: Token) -> Self {
        match t {
            Token::A => Opinion::A,
            Token::B => Opinion::B,
        }
    }
}

impl fmt::Display for Opinion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Opinion {
    type Err = ParamError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "A" => Ok(Opinion::A),
            "B" => Ok(Opinion::B),
            "AB" => Ok(Opinion::AB),
            other => Err(ParamError::UnknownOpinion(other.to_owned())),
        }
    }
}

/// Forgetting function family. Only exponential forgetting is supported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Forgetting {
    #[default]
    Exponential,
}

/// Reinforcement peak `mu`, forgetting threshold `theta` and forgetting
/// intensity `lambda` (per hour).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MemoryParams {
    pub mu: f64,
    pub theta: f64,
    pub lambda: f64,
    #[serde(default)]
    pub forgetting: Forgetting,
}

impl MemoryParams {
    pub const DEFAULT_MU: f64 = 0.3;
    pub const DEFAULT_THETA: f64 = 0.2;
    pub const DEFAULT_LAMBDA: f64 = 0.005631;

    pub fn new(mu: f64, theta: f64, lambda: f64) -> Result<Self, ParamError> {
        let p = MemoryParams { mu, theta, lambda, forgetting: Forgetting::Exponential };
        p.validate()?;
        Ok(p)
    }

    /// Accepts iff `0 < theta < mu <= 1` and `lambda > 0`.
    pub fn validate(&self) -> Result<(), ParamError> {
        let MemoryParams { mu, theta, lambda, .. } = *self;
        if !(mu > 0.0 && mu <= 1.0) {
            return Err(ParamError::Mu(mu));
        }
        if !(theta > 0.0) {
            return Err(ParamError::ThetaNonPositive(theta));
        }
        if !(theta < mu) {
            return Err(ParamError::ThetaNotBelowMu { theta, mu });
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(ParamError::Lambda(lambda));
        }
        Ok(())
    }
}

impl Default for MemoryParams {
    fn default() -> Self {
        MemoryParams {
            mu: Self::DEFAULT_MU,
            theta: Self::DEFAULT_THETA,
            lambda: Self::DEFAULT_LAMBDA,
            forgetting: Forgetting::Exponential,
        }
    }
}

/// Minimum `|o_A - o_B|` needed to exhibit a definite opinion.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Gamma(f64);

impl Gamma {
    pub fn new(gamma: f64) -> Result<Self, ParamError> {
        if (0.0..1.0).contains(&gamma) {
            Ok(Gamma(gamma))
        } else {
            Err(ParamError::Gamma(gamma))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Gamma {
    type Error = ParamError;
    fn try_from(v: f64) -> Result<Self, Self::Error> {
        Gamma::new(v)
    }
}

impl From<Gamma> for f64 {
    fn from(g: Gamma) -> f64 {
        g.0
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("mu must satisfy 0 < mu <= 1 (got {0})")]
    Mu(f64),
    #[error("theta must be > 0 (got {0})")]
    ThetaNonPositive(f64),
    #[error("theta must be < mu (theta={theta}, mu={mu})")]
    ThetaNotBelowMu { theta: f64, mu: f64 },
    #[error("lambda must be a finite value > 0 (got {0})")]
    Lambda(f64),
    #[error("gamma must satisfy 0 <= gamma < 1 (got {0})")]
    Gamma(f64),
    #[error("timestamp must be finite and non-negative (got {0})")]
    InvalidTime(f64),
    #[error("self-loop contact for agent {0:?}")]
    SelfLoop(AgentId),
    #[error("events not sorted by time at index {index}")]
    Unsorted { index: usize },
    #[error("unknown opinion label {0:?}")]
    UnknownOpinion(String),
}
