//! Memory-one iterated prisoner's dilemma between an honest and a dishonest
//! resource owner in a shared mining pool.
//!
//! Defecting stands for a block-withholding attack. A decay factor `m`
//! scales down a player's cooperation probability after its own defection.
//! The crate provides:
//!
//! * [`game`] and [`markov`]: strategies, the outcome Markov chain, and
//!   stationary payoffs by linear solve and by the payoff determinant.
//! * [`simulate`]: seeded Monte Carlo matches.
//! * [`zd`]: zero-determinant strategies (linear relation, equalizer,
//!   extortion) with feasibility checks.
//! * [`classic`]: WSLS, ALLC, ALLD, TFT and the random opponent sampler.
//! * [`arena`]: payoff clouds against random opponents with line, hull and
//!   dominance diagnostics.
//! * [`config`], [`output`] and [`cli`]: JSON configs, CSV/SVG files and the
//!   `zd-dilemma` command.

pub mod arena;
pub mod classic;
pub mod cli;
pub mod config;
pub mod error;
pub mod game;
pub mod markov;
pub mod output;
pub mod simulate;
pub mod zd;

pub use error::{Error, Result};
pub use game::{
    decay, make_payoffs, payoffs_from_donation, standard_payoffs, Action, DecayedStrategy,
    DonationParams, GamePayoffs, MemoryOneStrategy, OutcomeState, Role,
};
pub use markov::{expected_payoffs, press_dyson_d, stationary, transition_matrix};
