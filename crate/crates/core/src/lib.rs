pub mod cli;
pub mod coding;
pub mod data;
pub mod engine;
pub mod error;
pub mod eval;
pub mod kernel;
pub mod naming_game;
pub mod rng;
pub mod synth;
pub mod types;

pub use error::{Error, Result};
