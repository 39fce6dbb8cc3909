//! Evaluation and ranking of agents in K-player general-sum meta-games
//! from noisy match outcomes.
//!
//! The crate is organised around a small set of subsystems:
//!
//! * [`game`] — normal-form meta-game tables, noisy outcome simulation,
//!   random game generation and table I/O,
//! * [`alpharank`] — evolutionary transition models, stationary
//!   distributions, response graphs, sink-component detection and
//!   sample-complexity calculators,
//! * [`rgucb`] — the adaptive `ResponseGraphUCB` sampler with pluggable
//!   sampling schemes and stopping criteria,
//! * [`uncertainty`] — propagation of element-wise payoff bounds into
//!   confidence intervals on ranking weights,
//! * [`elo`] — batch Elo fitting and prediction for two-player games,
//! * [`metrics`] — ranking/graph comparison metrics,
//! * [`completion`] — low-rank completion of partially observed win-loss
//!   matrices.

pub mod alpharank;
pub mod completion;
pub mod elo;
mod error;
pub mod game;
pub mod metrics;
pub mod rgucb;
pub mod rng;
pub mod uncertainty;

pub use error::{Error, Result};
