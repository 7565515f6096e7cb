//! CoDiNG: a continuous latent opinion vector per agent, driven by memory
//! traces, discretized into an exhibited opinion through the `gamma`
//! threshold.
//!
//! Each agent keeps one trace per base opinion. A contact transmits the
//! sender's exhibited opinion (a fair coin when the sender is AB) and
//! reinforces the receiver's trace for that token. Nothing else is written;
//! traces decay lazily and are evaluated only when read.

use rand::RngCore;
use thiserror::Error;

use crate::kernel::{self, KernelError};
use crate::rng::fair_coin;
use crate::types::{AgentId, ContactEvent, Gamma, MemoryParams, Opinion, TimeStamp, Token};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CodingError {
    #[error("event references unknown agent {0:?}")]
    UnknownAgent(AgentId),
    #[error("out-of-order event for agent {agent:?}: {source}")]
    OutOfOrder {
        agent: AgentId,
        #[source]
        source: KernelError,
    },
    #[error("snapshot at {at} h precedes a stored update")]
    SnapshotInPast { at: f64 },
}

/// One opinion channel: the stored weight at its last update time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Trace {
    pub weight: f64,
    pub updated: TimeStamp,
    /// Number of reinforcing events (diagnostic only).
    pub events: u32,
}

impl Trace {
    pub fn new(weight: f64, updated: TimeStamp) -> Self {
        Trace { weight, updated, events: 0 }
    }

    pub fn value_at(&self, t: TimeStamp, params: &MemoryParams) -> Result<f64, KernelError> {
        kernel::decayed_weight(self.weight, self.updated, t, params)
    }

    fn reinforce(&mut self, t: TimeStamp, params: &MemoryParams) -> Result<(), KernelError> {
        self.weight = kernel::reinforce(self.weight, self.updated, t, params)?;
        self.updated = t;
        self.events += 1;
        Ok(())
    }
}

/// Latent preference for opinions A and B.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpinionVector {
    pub a: Trace,
    pub b: Trace,
}

impl OpinionVector {
    pub fn new(o_a: f64, o_b: f64, t: TimeStamp) -> Self {
        OpinionVector { a: Trace::new(o_a, t), b: Trace::new(o_b, t) }
    }

    pub fn channel(&self, token: Token) -> &Trace {
        match token {
            Token::A => &self.a,
            Token::B => &self.b,
        }
    }

    fn channel_mut(&mut self, token: Token) -> &mut Trace {
        match token {
            Token::A => &mut self.a,
            Token::B => &mut self.b,
        }
    }

    /// Both channels decayed to `t`.
    pub fn weights_at(&self, t: TimeStamp, params: &MemoryParams) -> Result<(f64, f64), KernelError> {
        Ok((self.a.value_at(t, params)?, self.b.value_at(t, params)?))
    }

    pub fn exhibited_at(&self, t: TimeStamp, gamma: Gamma, params: &MemoryParams) -> Result<Opinion, KernelError> {
        let (a, b) = self.weights_at(t, params)?;
        Ok(exhibited_opinion(a, b, gamma))
    }

    pub fn last_update(&self) -> TimeStamp {
        if self.a.updated >= self.b.updated {
            self.a.updated
        } else {
            self.b.updated
        }
    }

    pub fn swapped(&self) -> OpinionVector {
        OpinionVector { a: self.b, b: self.a }
    }
}

/// Discretizes a latent vector: a definite opinion needs `|o_A - o_B| > gamma`.
#[inline]
pub fn exhibited_opinion(o_a: f64, o_b: f64, gamma: Gamma) -> Opinion {
    let delta = (o_a - o_b).abs();
    if delta > gamma.value() {
        if o_a > o_b {
            Opinion::A
        } else {
            Opinion::B
        }
    } else {
        Opinion::AB
    }
}

/// The token a speaker transmits at `t`.
pub fn coding_transmit<R: RngCore + ?Sized>(
    speaker: &OpinionVector,
    t: TimeStamp,
    gamma: Gamma,
    params: &MemoryParams,
    rng: &mut R,
) -> Result<Token, KernelError> {
    Ok(match speaker.exhibited_at(t, gamma, params)? {
        Opinion::A => Token::A,
        Opinion::B => Token::B,
        Opinion::AB => {
            if fair_coin(rng) {
                Token::B
            } else {
                Token::A
            }
        }
    })
}

/// Latent vectors of every agent, indexed by [`AgentId`].
#[derive(Debug, Clone, PartialEq)]
pub struct CodingState {
    pub vectors: Vec<OpinionVector>,
}

impl CodingState {
    pub fn new(vectors: Vec<OpinionVector>) -> Self {
        CodingState { vectors }
    }

    /// `n` agents with both channels at zero (exhibiting AB).
    pub fn neutral(n: usize, t: TimeStamp) -> Self {
        CodingState { vectors: vec![OpinionVector::new(0.0, 0.0, t); n] }
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    fn vector(&self, agent: AgentId) -> Result<&OpinionVector, CodingError> {
        self.vectors.get(agent.index()).ok_or(CodingError::UnknownAgent(agent))
    }

    /// Processes one contact: transmits from the sender and reinforces the
    /// receiver's matching channel. Returns the transmitted token.
    pub fn apply_event<R: RngCore + ?Sized>(
        &mut self,
        ev: &ContactEvent,
        gamma: Gamma,
        params: &MemoryParams,
        rng: &mut R,
    ) -> Result<Token, CodingError> {
        let sender = *self.vector(ev.sender)?;
        let receiver = self.vector(ev.receiver)?;
        if ev.t < receiver.last_update() {
            return Err(CodingError::OutOfOrder {
                agent: ev.receiver,
                source: KernelError::TimeReversal { from: receiver.last_update().hours(), to: ev.t.hours() },
            });
        }
        let token = coding_transmit(&sender, ev.t, gamma, params, rng)
            .map_err(|source| CodingError::OutOfOrder { agent: ev.sender, source })?;
        self.vectors[ev.receiver.index()]
            .channel_mut(token)
            .reinforce(ev.t, params)
            .map_err(|source| CodingError::OutOfOrder { agent: ev.receiver, source })?;
        Ok(token)
    }

    /// Decayed `(o_A, o_B)` of every agent at `t`. Read-only.
    pub fn latent_at(&self, t: TimeStamp, params: &MemoryParams) -> Result<Vec<(f64, f64)>, CodingError> {
        self.vectors
            .iter()
            .map(|v| v.weights_at(t, params).map_err(|_| CodingError::SnapshotInPast { at: t.hours() }))
            .collect()
    }

    /// Exhibited opinion of every agent at `t`. Read-only.
    pub fn snapshot(&self, t: TimeStamp, gamma: Gamma, params: &MemoryParams) -> Result<Vec<Opinion>, CodingError> {
        Ok(self
            .latent_at(t, params)?
            .into_iter()
            .map(|(a, b)| exhibited_opinion(a, b, gamma))
            .collect())
    }

    pub fn swapped(&self) -> CodingState {
        CodingState { vectors: self.vectors.iter().map(OpinionVector::swapped).collect() }
    }
}
