//! Seeded randomness for simulation runs.
//!
//! Every draw made while replaying events is keyed by
//! `(seed, run_index, event_index)`: a ChaCha8 stream is selected by
//! `(seed, run_index, purpose)` and repositioned to a fixed word offset per
//! event. Draws therefore never depend on how runs are scheduled, and
//! skipping or adding draws at one event cannot shift another event's draws.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// 32-bit words reserved per event. Enough for any transmit decision.
const WORDS_PER_EVENT: u128 = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Purpose {
    Events = 0,
    Init = 1,
    Synth = 2,
    Planted = 3,
}

/// A ChaCha8 stream for one `(seed, run_index, purpose)` triple.
pub fn stream(seed: u64, run_index: u32, purpose: Purpose) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((purpose as u64) << 32) | run_index as u64);
    rng
}

/// Fair coin from the top bit of one 64-bit draw.
#[inline]
pub fn fair_coin<R: RngCore + ?Sized>(rng: &mut R) -> bool {
    rng.next_u64() >> 63 == 1
}

/// Source of per-event random draws during a replay.
pub trait EventRng {
    /// Runs `f` with the generator positioned for `event_index`.
    fn with_event<T>(&mut self, event_index: usize, f: impl FnOnce(&mut dyn RngCore) -> T) -> T;
}

/// Event draws keyed by `(seed, run_index, event_index)`.
#[derive(Debug, Clone)]
pub struct KeyedDraws {
    rng: ChaCha8Rng,
}

impl KeyedDraws {
    pub fn new(seed: u64, run_index: u32) -> Self {
        KeyedDraws { rng: stream(seed, run_index, Purpose::Events) }
    }
}

impl EventRng for KeyedDraws {
    fn with_event<T>(&mut self, event_index: usize, f: impl FnOnce(&mut dyn RngCore) -> T) -> T {
        self.rng.set_word_pos(event_index as u128 * WORDS_PER_EVENT);
        f(&mut self.rng)
    }
}

/// Adapts a plain generator: draws are consumed sequentially in event order.
#[derive(Debug, Clone)]
pub struct Sequential<R>(pub R);

impl<R: RngCore> EventRng for Sequential<R> {
    fn with_event<T>(&mut self, _event_index: usize, f: impl FnOnce(&mut dyn RngCore) -> T) -> T {
        f(&mut self.0)
    }
}

/// Bitwise complement of another generator. Every [`fair_coin`] flips, so a
/// replay driven by `Mirrored` draws the A/B-swapped tokens.
#[derive(Debug, Clone)]
pub struct Mirrored<R>(pub R);

impl<R: RngCore> RngCore for Mirrored<R> {
    fn next_u32(&mut self) -> u32 {
        !self.0.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        !self.0.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.0.fill_bytes(dest);
        dest.iter_mut().for_each(|b| *b = !*b);
    }
}

impl<E: EventRng> EventRng for Mirrored<E> {
    fn with_event<T>(&mut self, event_index: usize, f: impl FnOnce(&mut dyn RngCore) -> T) -> T {
        self.0.with_event(event_index, |rng| f(&mut Mirrored(rng)))
    }
}
