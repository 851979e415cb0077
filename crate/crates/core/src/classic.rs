//! Reference strategies and the random opponent sampler.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::game::MemoryOneStrategy;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedStrategy {
    pub name: String,
    pub strategy: MemoryOneStrategy,
}

fn named(name: &str, probs: [f64; 4]) -> NamedStrategy {
    NamedStrategy {
        name: name.to_string(),
        strategy: MemoryOneStrategy::new(probs).expect("constant probabilities"),
    }
}

/// Win-stay lose-shift: keep the last move after R or T, switch after S or P.
pub fn wsls() -> NamedStrategy {
    named("wsls", [1.0, 0.0, 0.0, 1.0])
}

pub fn allc() -> NamedStrategy {
    named("allc", [1.0; 4])
}

pub fn alld() -> NamedStrategy {
    named("alld", [0.0; 4])
}

/// Tit-for-tat. Not part of any experiment figure.
pub fn tft() -> NamedStrategy {
    named("tft", [1.0, 0.0, 1.0, 0.0])
}

/// Fixed strategies addressable by name.
pub fn registry() -> Vec<NamedStrategy> {
    vec![wsls(), allc(), alld(), tft()]
}

pub fn lookup(name: &str) -> Option<NamedStrategy> {
    let name = name.to_ascii_lowercase();
    registry().into_iter().find(|s| s.name == name)
}

/// Four independent uniform draws from `[0, 1)`.
pub fn sample_random_strategy<R: Rng + ?Sized>(rng: &mut R) -> MemoryOneStrategy {
    let probs = [
        rng.random::<f64>(),
        rng.random::<f64>(),
        rng.random::<f64>(),
        rng.random::<f64>(),
    ];
    MemoryOneStrategy::new(probs).expect("uniform draws lie in [0, 1)")
}
