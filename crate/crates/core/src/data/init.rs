//! Survey-seeded initial states.
//!
//! A definite answer gets a high weight (>= 0.66) on its own opinion and a
//! low weight (<= 0.33) on the other; "not sure" gets both weights strictly
//! between 0.33 and 0.66. Samples are redrawn until the exhibited opinion
//! under `gamma` matches the answer.

use rand::Rng;
use thiserror::Error;

use super::survey::Answer;
use crate::coding::{exhibited_opinion, CodingState, OpinionVector};
use crate::engine::{InitSampler, InitialState, ModelKind, SimConfig, SimError};
use crate::naming_game::NgState;
use crate::rng::{stream, Purpose};
use crate::types::{Gamma, Opinion, TimeStamp};

pub const HIGH_MIN: f64 = 0.66;
pub const LOW_MAX: f64 = 0.33;
pub const MAX_ATTEMPTS: u32 = 100_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InitError {
    #[error("answer {answer:?} cannot exhibit its opinion at gamma={gamma}")]
    Infeasible { answer: Answer, gamma: f64 },
    #[error("agent {agent}: no gamma-consistent sample after {attempts} attempts")]
    Exhausted { agent: usize, attempts: u32 },
}

/// Whether the sampling box for `answer` contains a positive-measure region
/// consistent with `gamma`.
pub fn feasible(answer: Answer, gamma: Gamma) -> bool {
    match answer {
        // Largest difference is 1 - 0, and gamma < 1.
        Answer::Agree | Answer::Disagree => 1.0 - 0.0 > gamma.value(),
        // Differences inside (0.33, 0.66) can be made arbitrarily small but
        // never exactly zero with positive probability.
        Answer::NotSure => gamma.value() > 0.0,
    }
}

fn draw<R: Rng + ?Sized>(answer: Answer, rng: &mut R) -> (f64, f64) {
    match answer {
        Answer::Agree | Answer::Disagree => {
            let high = rng.random_range(HIGH_MIN..=1.0);
            let low = rng.random_range(0.0..=LOW_MAX);
            if answer == Answer::Agree {
                (high, low)
            } else {
                (low, high)
            }
        }
        Answer::NotSure => {
            let mut mid = || loop {
                let v = rng.random_range(LOW_MAX..HIGH_MIN);
                if v > LOW_MAX {
                    break v;
                }
            };
            (mid(), mid())
        }
    }
}

/// Samples one γ-consistent latent vector for `answer`.
pub fn sample_vector<R: Rng + ?Sized>(
    answer: Answer,
    gamma: Gamma,
    t0: TimeStamp,
    rng: &mut R,
) -> Result<Option<OpinionVector>, InitError> {
    if !feasible(answer, gamma) {
        return Err(InitError::Infeasible { answer, gamma: gamma.value() });
    }
    let want = answer.to_opinion();
    for _ in 0..MAX_ATTEMPTS {
        let (a, b) = draw(answer, rng);
        if exhibited_opinion(a, b, gamma) == want {
            return Ok(Some(OpinionVector::new(a, b, t0)));
        }
    }
    Ok(None)
}

/// CoDiNG state from wave-1 answers indexed by agent. Agents without an
/// answer start neutral (both channels zero).
pub fn initialize_coding<R: Rng + ?Sized>(
    answers: &[Option<Answer>],
    gamma: Gamma,
    t0: TimeStamp,
    rng: &mut R,
) -> Result<CodingState, InitError> {
    answers
        .iter()
        .enumerate()
        .map(|(agent, answer)| match answer {
            None => Ok(OpinionVector::new(0.0, 0.0, t0)),
            Some(a) => sample_vector(*a, gamma, t0, rng)?
                .ok_or(InitError::Exhausted { agent, attempts: MAX_ATTEMPTS }),
        })
        .collect::<Result<_, _>>()
        .map(CodingState::new)
}

/// Naming Game state: agree → A, disagree → B, not sure or missing → AB.
pub fn initialize_ng(answers: &[Option<Answer>]) -> NgState {
    NgState::new(answers.iter().map(|a| a.map_or(Opinion::AB, Answer::to_opinion)).collect())
}

/// Initial states drawn from wave-1 answers, one independent draw per run.
#[derive(Debug, Clone, PartialEq)]
pub struct SurveyInit {
    pub answers: Vec<Option<Answer>>,
}

impl InitSampler for SurveyInit {
    fn sample(&self, config: &SimConfig, run_index: u32) -> Result<InitialState, SimError> {
        Ok(match config.model {
            ModelKind::NamingGame => InitialState::NamingGame(initialize_ng(&self.answers)),
            ModelKind::Coding => {
                let mut rng = stream(config.seed, run_index, Purpose::Init);
                let state = initialize_coding(&self.answers, config.gamma, config.start_time, &mut rng)
                    .map_err(|e| SimError::Init(e.to_string()))?;
                InitialState::Coding(state)
            }
        })
    }
}
