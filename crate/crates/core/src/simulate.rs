//! Seeded Monte Carlo play of a memory-one match.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{DecayedStrategy, GamePayoffs, OutcomeState, Role};

/// Upper bound on the number of batches used for the standard errors.
pub const BATCHES: u64 = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchOptions {
    /// Total rounds, including the initial round and any burn-in.
    pub rounds: u64,
    pub seed: u64,
    /// Outcome of round 0.
    pub initial: OutcomeState,
    /// Leading rounds excluded from averages and counts.
    pub burn_in: u64,
}

impl MatchOptions {
    pub fn new(rounds: u64, seed: u64) -> Self {
        Self {
            rounds,
            seed,
            initial: OutcomeState::CC,
            burn_in: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchOutcome {
    pub sx: f64,
    pub sy: f64,
    pub state_counts: [u64; 4],
    /// Batch-means standard errors of `sx` and `sy`; NaN when fewer than two
    /// batches fit into the recorded rounds.
    pub se_x: f64,
    pub se_y: f64,
}

/// Plays `rounds` rounds starting from mutual cooperation.
pub fn simulate_match(
    px: &DecayedStrategy,
    qy: &DecayedStrategy,
    payoffs: &GamePayoffs,
    rounds: u64,
    seed: u64,
) -> Result<MatchOutcome> {
    simulate_match_with(px, qy, payoffs, &MatchOptions::new(rounds, seed))
}

pub fn simulate_match_with(
    px: &DecayedStrategy,
    qy: &DecayedStrategy,
    payoffs: &GamePayoffs,
    opts: &MatchOptions,
) -> Result<MatchOutcome> {
    if px.role != Role::X || qy.role != Role::Y {
        return Err(Error::RoleMismatch {
            expected: "X then Y",
            got: if px.role == Role::X {
                qy.role.name()
            } else {
                px.role.name()
            },
        });
    }
    if opts.rounds == 0 {
        return Err(Error::Domain("a match needs at least one round".into()));
    }
    if opts.burn_in >= opts.rounds {
        return Err(Error::Domain(format!(
            "burn-in {} leaves no rounds out of {}",
            opts.burn_in, opts.rounds
        )));
    }

    let x = px.by_state();
    let y = qy.by_state();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    let recorded = opts.rounds - opts.burn_in;
    let batches = BATCHES.min(recorded);
    let batch_len = recorded / batches;

    let mut counts = [0u64; 4];
    let mut batch_counts = [0u64; 4];
    let mut in_batch = 0u64;
    let mut batch_means: Vec<(f64, f64)> = Vec::with_capacity(batches as usize);
    let mut state = opts.initial.index();

    for round in 0..opts.rounds {
        if round > 0 {
            let xc = rng.random::<f64>() < x[state];
            let yc = rng.random::<f64>() < y[state];
            state = match (xc, yc) {
                (true, true) => 0,
                (true, false) => 1,
                (false, true) => 2,
                (false, false) => 3,
            };
        }
        if round < opts.burn_in {
            continue;
        }
        counts[state] += 1;
        if (batch_means.len() as u64) < batches {
            batch_counts[state] += 1;
            in_batch += 1;
            if in_batch == batch_len {
                batch_means.push(mean_payoffs(&batch_counts, payoffs));
                batch_counts = [0; 4];
                in_batch = 0;
            }
        }
    }

    let (sx, sy) = mean_payoffs(&counts, payoffs);
    let (se_x, se_y) = batch_standard_errors(&batch_means);
    Ok(MatchOutcome {
        sx,
        sy,
        state_counts: counts,
        se_x,
        se_y,
    })
}

fn mean_payoffs(counts: &[u64; 4], payoffs: &GamePayoffs) -> (f64, f64) {
    let n = counts.iter().sum::<u64>() as f64;
    let mut sx = 0.0;
    let mut sy = 0.0;
    for (s, &k) in counts.iter().enumerate() {
        sx += k as f64 * payoffs.sx[s];
        sy += k as f64 * payoffs.sy[s];
    }
    (sx / n, sy / n)
}

fn batch_standard_errors(means: &[(f64, f64)]) -> (f64, f64) {
    let b = means.len();
    if b < 2 {
        return (f64::NAN, f64::NAN);
    }
    let bf = b as f64;
    let (mx, my) = means
        .iter()
        .fold((0.0, 0.0), |(a, c), &(x, y)| (a + x / bf, c + y / bf));
    let (vx, vy) = means.iter().fold((0.0, 0.0), |(a, c), &(x, y)| {
        (a + (x - mx).powi(2), c + (y - my).powi(2))
    });
    let denom = (bf - 1.0) * bf;
    ((vx / denom).sqrt(), (vy / denom).sqrt())
}
