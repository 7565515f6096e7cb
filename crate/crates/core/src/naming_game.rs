//! Classic Naming Game (binary agreement) replayed over a contact stream.
//!
//! The event's sender is the speaker and its receiver the listener. If the
//! listener already holds the transmitted token both sides collapse to it;
//! otherwise the listener becomes AB and the speaker is unchanged.

use rand::RngCore;
use thiserror::Error;

use crate::rng::{fair_coin, EventRng};
use crate::types::{AgentId, ContactEvent, Opinion, TimeStamp, Token};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NgError {
    #[error("speaker holding {speaker} cannot transmit {token:?}")]
    InconsistentToken { speaker: Opinion, token: Token },
    #[error("event {event_index} references unknown agent {agent:?}")]
    UnknownAgent { event_index: usize, agent: AgentId },
}

/// Exhibited opinion of every agent, indexed by [`AgentId`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NgState {
    pub opinions: Vec<Opinion>,
}

impl NgState {
    pub fn new(opinions: Vec<Opinion>) -> Self {
        NgState { opinions }
    }

    pub fn uniform(n: usize, opinion: Opinion) -> Self {
        NgState { opinions: vec![opinion; n] }
    }

    pub fn len(&self) -> usize {
        self.opinions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.opinions.is_empty()
    }

    pub fn get(&self, agent: AgentId) -> Option<Opinion> {
        self.opinions.get(agent.index()).copied()
    }

    /// `Some(opinion)` if every agent holds the same single opinion.
    pub fn consensus(&self) -> Option<Opinion> {
        let first = *self.opinions.first()?;
        (first != Opinion::AB && self.opinions.iter().all(|&o| o == first)).then_some(first)
    }

    pub fn swapped(&self) -> NgState {
        NgState { opinions: self.opinions.iter().map(|o| o.swapped()).collect() }
    }
}

/// The token a speaker utters. AB speakers pick A or B with a fair coin.
pub fn ng_transmit<R: RngCore + ?Sized>(speaker: Opinion, rng: &mut R) -> Token {
    match speaker {
        Opinion::A => Token::A,
        Opinion::B => Token::B,
        Opinion::AB => {
            if fair_coin(rng) {
                Token::B
            } else {
                Token::A
            }
        }
    }
}

/// One speaker→listener interaction; returns `(speaker', listener')`.
pub fn ng_apply(speaker: Opinion, listener: Opinion, token: Token) -> Result<(Opinion, Opinion), NgError> {
    if !speaker.holds(token) {
        return Err(NgError::InconsistentToken { speaker, token });
    }
    let agreed = Opinion::from(token);
    Ok(if listener.holds(token) {
        (agreed, agreed)
    } else {
        (speaker, Opinion::AB)
    })
}

/// A state change recorded during replay.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NgChange {
    pub event_index: usize,
    pub t: TimeStamp,
    pub agent: AgentId,
    pub opinion: Opinion,
}

/// Initial state plus the ordered log of changes; the state is piecewise
/// constant between events.
#[derive(Debug, Clone, PartialEq)]
pub struct NgTrajectory {
    pub initial: NgState,
    pub changes: Vec<NgChange>,
    pub tokens: Vec<Token>,
}

impl NgTrajectory {
    /// State after every event with timestamp `<= t`.
    pub fn state_at(&self, t: TimeStamp) -> NgState {
        let mut state = self.initial.clone();
        for c in self.changes.iter().take_while(|c| c.t <= t) {
            state.opinions[c.agent.index()] = c.opinion;
        }
        state
    }

    /// States at each of the sorted `times`, in a single pass.
    pub fn states_at(&self, times: &[TimeStamp]) -> Vec<NgState> {
        let mut state = self.initial.clone();
        let mut changes = self.changes.iter().peekable();
        times
            .iter()
            .map(|&t| {
                while let Some(c) = changes.next_if(|c| c.t <= t) {
                    state.opinions[c.agent.index()] = c.opinion;
                }
                state.clone()
            })
            .collect()
    }

    pub fn final_state(&self) -> NgState {
        let mut state = self.initial.clone();
        for c in &self.changes {
            state.opinions[c.agent.index()] = c.opinion;
        }
        state
    }
}

/// Replays `events` in order from `init`.
///
/// Event `i` draws its randomness from `rng.with_event(i, ..)`.
pub fn ng_run<E: EventRng>(events: &[ContactEvent], init: &NgState, rng: &mut E) -> Result<NgTrajectory, NgError> {
    let mut state = init.clone();
    let mut changes = Vec::new();
    let mut tokens = Vec::with_capacity(events.len());
    let n = state.len();
    for (event_index, ev) in events.iter().enumerate() {
        for agent in [ev.sender, ev.receiver] {
            if agent.index() >= n {
                return Err(NgError::UnknownAgent { event_index, agent });
            }
        }
        let speaker = state.opinions[ev.sender.index()];
        let listener = state.opinions[ev.receiver.index()];
        let token = rng.with_event(event_index, |r| ng_transmit(speaker, r));
        let (s, l) = ng_apply(speaker, listener, token)?;
        for (agent, before, after) in [(ev.sender, speaker, s), (ev.receiver, listener, l)] {
            if before != after {
                state.opinions[agent.index()] = after;
                changes.push(NgChange { event_index, t: ev.t, agent, opinion: after });
            }
        }
        tokens.push(token);
    }
    Ok(NgTrajectory { initial: init.clone(), changes, tokens })
}
