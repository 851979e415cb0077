use std::path::PathBuf;

use thiserror::Error;

/// Index of a strategy component, `p1`..`p4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Component(pub usize);

impl std::fmt::Display for Component {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "p{}", self.0 + 1)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("role mismatch: expected {expected} strategy, got {got}")]
    RoleMismatch {
        expected: &'static str,
        got: &'static str,
    },

    #[error("stationary distribution is not unique (rank of P^T - I is {rank}, expected 3)")]
    NonUniqueStationary { rank: usize },

    #[error("degenerate game: the chain has several closed classes and no unique long-run payoff")]
    DegenerateGame,

    #[error(
        "infeasible strategy: {component} = {value:.6} violates {constraint} (off by {excess:.3e})"
    )]
    Infeasible {
        component: Component,
        value: f64,
        excess: f64,
        constraint: &'static str,
    },

    #[error("phi bound phi <= 1/(s(c - r/2) + r/2): phi={phi} exceeds upper bound {hi:.4}")]
    PhiOutOfRange { phi: f64, hi: f64 },

    #[error("extortion factor range (r - 2c)/r <= s < 1: s={s} is outside [{lo:.4}, 1)")]
    ExtortionFactorOutOfRange { s: f64, lo: f64 },

    #[error(
        "degenerate equalizer: 1 - p1 + p4 = {denominator:.3e}, the opponent payoff cannot be set"
    )]
    DegenerateEqualizer { denominator: f64 },

    #[error("singular equalizer system: R == P, so beta and gamma are not determined")]
    SingularSystem,

    #[error("degenerate cloud: {0}")]
    DegenerateCloud(&'static str),

    #[error("config error: {0}")]
    Config(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Process exit code for the command line: 1 for infeasible or degenerate
    /// results, 2 for bad arguments, configuration and I/O problems.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NonUniqueStationary { .. }
            | Error::DegenerateGame
            | Error::Infeasible { .. }
            | Error::PhiOutOfRange { .. }
            | Error::ExtortionFactorOutOfRange { .. }
            | Error::DegenerateEqualizer { .. }
            | Error::SingularSystem
            | Error::DegenerateCloud(_) => 1,
            Error::Domain(_) | Error::RoleMismatch { .. } | Error::Config(_) | Error::Io { .. } => {
                2
            }
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
