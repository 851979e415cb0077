//! Zero-determinant strategies.
//!
//! X's tilted vector `(p1 - 1, p2 - 1, m p3, m p4)` is the second column of
//! the payoff determinant. Choosing it proportional to
//! `α S_X + β S_Y + γ 1` makes the numerator vanish for every opponent,
//! which pins the long-run payoffs to `α s_X + β s_Y + γ = 0`.

use serde::{Deserialize, Serialize};

use crate::error::{Component, Error, Result};
use crate::game::{check_decay, DonationParams, GamePayoffs, MemoryOneStrategy};

/// Rounding slack when snapping a component onto the edge of `[0, 1]`.
const EDGE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZDParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub phi: f64,
    /// Extortion factor; only set for extortion strategies.
    pub s: Option<f64>,
    /// The payoff the extortion line passes through (always `P`).
    pub reference_point: Option<f64>,
    pub m: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ZDKind {
    LinearGeneral,
    Equalizer,
    Extortion,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZDStrategy {
    pub strategy: MemoryOneStrategy,
    pub params: ZDParams,
    pub kind: ZDKind,
    /// Opponent payoff for an equalizer, slope `s` for extortion.
    pub predicted: Option<f64>,
}

impl ZDStrategy {
    /// Coefficients `(α, β, γ)` of the enforced relation `α s_X + β s_Y + γ = 0`.
    pub fn relation(&self) -> (f64, f64, f64) {
        (self.params.alpha, self.params.beta, self.params.gamma)
    }
}

fn feasible(raw: [f64; 4], constraints: [&'static str; 4]) -> Result<MemoryOneStrategy> {
    let mut probs = raw;
    for (i, p) in probs.iter_mut().enumerate() {
        if !p.is_finite() {
            return Err(Error::Infeasible {
                component: Component(i),
                value: *p,
                excess: f64::INFINITY,
                constraint: constraints[i],
            });
        }
        if *p < 0.0 && *p >= -EDGE_SLACK {
            *p = 0.0;
        } else if *p > 1.0 && *p <= 1.0 + EDGE_SLACK {
            *p = 1.0;
        }
        let excess = if *p < 0.0 {
            -*p
        } else if *p > 1.0 {
            *p - 1.0
        } else {
            0.0
        };
        if excess > 0.0 {
            return Err(Error::Infeasible {
                component: Component(i),
                value: *p,
                excess,
                constraint: constraints[i],
            });
        }
    }
    MemoryOneStrategy::new(probs)
}

const UNIT: [&str; 4] = [
    "0 <= p1 <= 1",
    "0 <= p2 <= 1",
    "0 <= p3 <= 1",
    "0 <= p4 <= 1",
];

/// Raw components of the linear-relation strategy before the `[0, 1]` check.
pub fn linear_components(params: &ZDParams, donation: DonationParams) -> Result<[f64; 4]> {
    donation.validate()?;
    check_decay(params.m)?;
    let DonationParams { r, c } = donation;
    let ZDParams {
        alpha,
        beta,
        gamma,
        phi,
        m,
        ..
    } = *params;
    Ok([
        1.0 + phi * ((alpha + beta) * (r - c) / 2.0 + gamma),
        1.0 + phi * (alpha * (r / 2.0 - c) + beta * r / 2.0 + gamma),
        phi * (beta * (r / 2.0 - c) + alpha * r / 2.0 + gamma) / m,
        phi * gamma / m,
    ])
}

/// Strategy enforcing `α s_X + β s_Y + γ = 0` under the donation payoffs,
/// for any shared decay `m`. The returned vector is pre-decay: `p3` and `p4`
/// carry the division by `m`.
pub fn linear_strategy(params: ZDParams, donation: DonationParams) -> Result<ZDStrategy> {
    let raw = linear_components(&params, donation)?;
    let strategy = feasible(raw, UNIT)?;
    Ok(ZDStrategy {
        strategy,
        params,
        kind: ZDKind::LinearGeneral,
        predicted: None,
    })
}

/// Equalizer in donation form: X fixes Y's long-run payoff at
/// `p4 (r - c) / (2 (1 - p1 + p4))` whatever Y plays.
pub fn zd_set(p1: f64, p4: f64, donation: DonationParams, m: f64) -> Result<ZDStrategy> {
    donation.validate()?;
    check_decay(m)?;
    check_probability("p1", p1)?;
    check_probability("p4", p4)?;
    let DonationParams { r, c } = donation;
    let denominator = 1.0 - p1 + p4;
    if denominator <= 1e-12 {
        return Err(Error::DegenerateEqualizer { denominator });
    }
    let p2 = (r * p1 - c * (1.0 + p4)) / (r - c);
    let p3 = ((2.0 * c - r) * (1.0 - p1) + c * p4) / (r - c);
    let predicted = p4 * (r - c) / (2.0 * denominator);
    let strategy = feasible([p1, p2, p3, p4], UNIT)?;
    // Scale with phi = 1: p̃ = β S_Y + γ 1.
    let beta = -2.0 * denominator / (r - c);
    Ok(ZDStrategy {
        strategy,
        params: ZDParams {
            alpha: 0.0,
            beta,
            gamma: p4,
            phi: 1.0,
            s: None,
            reference_point: None,
            m,
        },
        kind: ZDKind::Equalizer,
        predicted: Some(predicted),
    })
}

/// Equalizer for arbitrary `(R, S, T, P)`: solves `p̃ = β S_Y + γ 1` using
/// the CC and DD rows, then reads `p2` and `p3` off the other two.
pub fn solve_equalizer_general(p1: f64, p4: f64, payoffs: &GamePayoffs) -> Result<ZDStrategy> {
    check_probability("p1", p1)?;
    check_probability("p4", p4)?;
    let (r, s, t, p) = (
        payoffs.reward(),
        payoffs.sucker(),
        payoffs.temptation(),
        payoffs.punishment(),
    );
    if (r - p).abs() <= 1e-12 {
        return Err(Error::SingularSystem);
    }
    let beta = (p1 - 1.0 - p4) / (r - p);
    if beta.abs() <= 1e-12 {
        return Err(Error::DegenerateEqualizer {
            denominator: 1.0 - p1 + p4,
        });
    }
    let gamma = p4 - beta * p;
    let p2 = 1.0 + beta * t + gamma;
    let p3 = beta * s + gamma;
    let strategy = feasible([p1, p2, p3, p4], UNIT)?;
    Ok(ZDStrategy {
        strategy,
        params: ZDParams {
            alpha: 0.0,
            beta,
            gamma,
            phi: 1.0,
            s: None,
            reference_point: None,
            m: 1.0,
        },
        kind: ZDKind::Equalizer,
        predicted: Some(-gamma / beta),
    })
}

/// Inclusive lower bound and exclusive upper bound of the extortion factor.
pub fn s_range(donation: DonationParams) -> (f64, f64) {
    let DonationParams { r, c } = donation;
    ((r - 2.0 * c) / r, 1.0)
}

/// Admissible `φ` for an extortion factor `s`: `[0, 1/(s(c - r/2) + r/2)]`.
pub fn phi_range(s: f64, donation: DonationParams) -> Result<(f64, f64)> {
    donation.validate()?;
    let DonationParams { r, c } = donation;
    let denom = s * (c - r / 2.0) + r / 2.0;
    if denom <= 0.0 || !denom.is_finite() {
        return Err(Error::Domain(format!(
            "s(c - r/2) + r/2 = {denom} must be positive"
        )));
    }
    Ok((0.0, 1.0 / denom))
}

const EXTORTION: [&str; 4] = [
    "0 <= 1 - phi(1 - s)(r - c)/2 <= 1",
    "0 <= 1 - phi(s(c - r/2) + r/2) <= 1",
    "0 <= phi((c - r/2) + s r/2) <= 1",
    "p4 = 0",
];

/// Extortion through the reference point `P`: enforces
/// `s_Y - P = s (s_X - P)`.
pub fn zd_extortion(s: f64, phi: f64, donation: DonationParams) -> Result<ZDStrategy> {
    donation.validate()?;
    let (lo, hi) = s_range(donation);
    if !(s >= lo && s < hi) {
        return Err(Error::ExtortionFactorOutOfRange { s, lo });
    }
    let (_, phi_hi) = phi_range(s, donation)?;
    if phi.is_nan() || phi < 0.0 {
        return Err(Error::Domain(format!("phi must be nonnegative, got {phi}")));
    }
    if phi > phi_hi {
        return Err(Error::PhiOutOfRange { phi, hi: phi_hi });
    }
    let DonationParams { r, c } = donation;
    let raw = [
        1.0 - phi * (1.0 - s) * (r - c) / 2.0,
        1.0 - phi * (s * (c - r / 2.0) + r / 2.0),
        phi * ((c - r / 2.0) + s * r / 2.0),
        0.0,
    ];
    let strategy = feasible(raw, EXTORTION)?;
    // Donation payoffs have P = 0.
    let reference = 0.0;
    Ok(ZDStrategy {
        strategy,
        params: ZDParams {
            alpha: s,
            beta: -1.0,
            gamma: (1.0 - s) * reference,
            phi,
            s: Some(s),
            reference_point: Some(reference),
            m: 1.0,
        },
        kind: ZDKind::Extortion,
        predicted: Some(s),
    })
}

fn check_probability(name: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "{name} = {v} is not a probability in [0, 1]"
        )))
    }
}
