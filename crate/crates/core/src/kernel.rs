//! Memory-trace kernel: exponential forgetting with a survival threshold and
//! reinforcement towards a peak.
//!
//! A trace stored with weight `w` at time `t0` reads, at `t >= t0`, as
//! `w * exp(-lambda * (t - t0))`, or `0` once that value drops below `theta`.
//! An event at `t` reinforces the trace to `mu` if the decayed value is below
//! `theta`, else to `mu + decayed * (1 - mu)`.
//!
//! All functions here are pure. Stateful bookkeeping lives in [`crate::coding`].

use thiserror::Error;

use crate::types::{MemoryParams, TimeStamp};

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum KernelError {
    #[error("negative elapsed time: trace updated at {from} h, queried at {to} h")]
    TimeReversal { from: f64, to: f64 },
    #[error("negative duration {0}")]
    NegativeDuration(f64),
}

/// Hours after which an unreinforced trace decays from `mu` to `theta`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct TraceLifetime(f64);

impl TraceLifetime {
    pub fn hours(self) -> f64 {
        self.0
    }
}

/// `exp(-lambda * delta_t)`.
#[inline]
pub fn forgetting_factor(delta_t: f64, lambda: f64) -> Result<f64, KernelError> {
    if delta_t < 0.0 {
        return Err(KernelError::NegativeDuration(delta_t));
    }
    Ok((-lambda * delta_t).exp())
}

fn elapsed(t_last: TimeStamp, t_now: TimeStamp) -> Result<f64, KernelError> {
    if t_now < t_last {
        return Err(KernelError::TimeReversal { from: t_last.hours(), to: t_now.hours() });
    }
    Ok(t_now.hours() - t_last.hours())
}

/// Decayed value without the survival cutoff.
#[inline]
fn raw_decay(w_last: f64, t_last: TimeStamp, t_now: TimeStamp, params: &MemoryParams) -> Result<f64, KernelError> {
    Ok(w_last * forgetting_factor(elapsed(t_last, t_now)?, params.lambda)?)
}

/// Weight of a trace at `t_now`; zero once it has fallen below `theta`.
pub fn decayed_weight(
    w_last: f64,
    t_last: TimeStamp,
    t_now: TimeStamp,
    params: &MemoryParams,
) -> Result<f64, KernelError> {
    let d = raw_decay(w_last, t_last, t_now, params)?;
    Ok(if d < params.theta { 0.0 } else { d })
}

/// New stored weight after an event at `t_event`.
pub fn reinforce(
    w_last: f64,
    t_last: TimeStamp,
    t_event: TimeStamp,
    params: &MemoryParams,
) -> Result<f64, KernelError> {
    let d = raw_decay(w_last, t_last, t_event, params)?;
    Ok(if d < params.theta { params.mu } else { params.mu + d * (1.0 - params.mu) })
}

/// `L = ln(mu / theta) / lambda`.
pub fn trace_lifetime(params: &MemoryParams) -> TraceLifetime {
    TraceLifetime((params.mu / params.theta).ln() / params.lambda)
}

/// Inverse of [`trace_lifetime`]: the intensity giving lifetime `hours`.
pub fn lambda_for_lifetime(mu: f64, theta: f64, hours: f64) -> Result<f64, KernelError> {
    if hours <= 0.0 {
        return Err(KernelError::NegativeDuration(hours));
    }
    Ok((mu / theta).ln() / hours)
}
