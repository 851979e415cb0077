//! The outcome Markov chain of a memory-one match and its long-run payoffs.
//!
//! Two independent routes reach the stationary payoffs: a dense linear solve
//! of `vᵀP = vᵀ`, and the determinant `D(p, q, f)` whose ratio
//! `D(p, q, S)/D(p, q, 1)` equals `vᵀS`.

use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{DecayedStrategy, GamePayoffs, Role};

pub const STOCHASTIC_TOL: f64 = 1e-12;
/// Relative singular-value threshold for the rank of `Pᵀ - I`.
pub const RANK_TOL: f64 = 1e-9;
/// Below this `|D(p, q, 1)|` the determinant route is not trusted.
pub const DETERMINANT_EPS: f64 = 1e-12;

/// Row-stochastic transition matrix over `CC, CD, DC, DD`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionMatrix {
    rows: [[f64; 4]; 4],
}

impl TransitionMatrix {
    pub fn new(rows: [[f64; 4]; 4]) -> Result<Self> {
        for (i, row) in rows.iter().enumerate() {
            if row.iter().any(|&e| !(0.0..=1.0).contains(&e)) {
                return Err(Error::Domain(format!("row {i} has an entry outside [0,1]")));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > STOCHASTIC_TOL {
                return Err(Error::Domain(format!("row {i} sums to {sum}, not 1")));
            }
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[[f64; 4]; 4] {
        &self.rows
    }

    pub fn to_matrix(&self) -> Matrix4<f64> {
        Matrix4::from_fn(|i, j| self.rows[i][j])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StationaryMethod {
    LinearSolve,
    TimeAverage,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StationaryResult {
    pub v: [f64; 4],
    pub method: StationaryMethod,
    pub unique: bool,
}

/// How a long-run payoff pair was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PayoffMethod {
    Determinant,
    LinearSolve,
    TimeAverage,
}

impl PayoffMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            PayoffMethod::Determinant => "determinant",
            PayoffMethod::LinearSolve => "linear-solve",
            PayoffMethod::TimeAverage => "time-average",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PayoffPair {
    pub sx: f64,
    pub sy: f64,
    pub method: PayoffMethod,
}

fn check_pair(px: &DecayedStrategy, qy: &DecayedStrategy) -> Result<()> {
    if px.role != Role::X {
        return Err(Error::RoleMismatch {
            expected: "X",
            got: px.role.name(),
        });
    }
    if qy.role != Role::Y {
        return Err(Error::RoleMismatch {
            expected: "Y",
            got: qy.role.name(),
        });
    }
    if px.m != qy.m {
        return Err(Error::Domain(format!(
            "both players must share the decay factor (X has m={}, Y has m={})",
            px.m, qy.m
        )));
    }
    Ok(())
}

/// Each row is the product of the two players' independent moves after that
/// prior outcome.
pub fn transition_matrix(px: &DecayedStrategy, qy: &DecayedStrategy) -> Result<TransitionMatrix> {
    check_pair(px, qy)?;
    let x = px.by_state();
    let y = qy.by_state();
    let mut rows = [[0.0; 4]; 4];
    for (s, row) in rows.iter_mut().enumerate() {
        let (a, b) = (x[s], y[s]);
        *row = [a * b, a * (1.0 - b), (1.0 - a) * b, (1.0 - a) * (1.0 - b)];
    }
    TransitionMatrix::new(rows)
}

/// Numerical rank of `Pᵀ - I`, relative to its largest singular value.
pub fn stationary_rank(matrix: &TransitionMatrix) -> usize {
    let a = matrix.to_matrix().transpose() - Matrix4::identity();
    let sv = a.singular_values();
    let largest = sv.max();
    if largest == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > RANK_TOL * largest).count()
}

/// Unique stationary distribution by a dense solve of `(Pᵀ - I)v = 0`,
/// `Σv = 1`. Chains with more than one closed class are rejected.
pub fn stationary(matrix: &TransitionMatrix) -> Result<StationaryResult> {
    let rank = stationary_rank(matrix);
    if rank != 3 {
        return Err(Error::NonUniqueStationary { rank });
    }
    let mut a = matrix.to_matrix().transpose() - Matrix4::identity();
    // The rows of Pᵀ - I sum to zero, so one of them is redundant.
    a.set_row(3, &nalgebra::RowVector4::repeat(1.0));
    let b = Vector4::new(0.0, 0.0, 0.0, 1.0);
    let sol = a
        .lu()
        .solve(&b)
        .ok_or(Error::NonUniqueStationary { rank })?;
    let mut v = [sol[0], sol[1], sol[2], sol[3]];
    for x in v.iter_mut() {
        if *x <= 0.0 {
            *x = 0.0;
        }
    }
    let total: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= total);
    Ok(StationaryResult {
        v,
        method: StationaryMethod::LinearSolve,
        unique: true,
    })
}

/// The determinant matrix with an arbitrary fourth column `f`: column one is
/// the joint cooperation probability minus the CC indicator, columns two and
/// three are X's and Y's tilted vectors.
pub fn determinant_matrix(
    px: &DecayedStrategy,
    qy: &DecayedStrategy,
    f: [f64; 4],
) -> Result<[[f64; 4]; 4]> {
    check_pair(px, qy)?;
    let x = px.by_state();
    let y = qy.by_state();
    let own_c = [1.0, 1.0, 0.0, 0.0];
    let opp_c = [1.0, 0.0, 1.0, 0.0];
    let joint_c = [1.0, 0.0, 0.0, 0.0];
    let mut d = [[0.0; 4]; 4];
    for s in 0..4 {
        d[s] = [
            x[s] * y[s] - joint_c[s],
            x[s] - own_c[s],
            y[s] - opp_c[s],
            f[s],
        ];
    }
    Ok(d)
}

fn det3(m: [[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Cofactors `(c14, c24, c34, c44)` of the last column. They do not depend on
/// `f`, and the stationary vector is proportional to them.
pub fn last_column_cofactors(px: &DecayedStrategy, qy: &DecayedStrategy) -> Result<[f64; 4]> {
    let d = determinant_matrix(px, qy, [0.0; 4])?;
    let mut c = [0.0; 4];
    for (i, ci) in c.iter_mut().enumerate() {
        let mut minor = [[0.0; 3]; 3];
        for (r, row) in (0..4).filter(|&r| r != i).enumerate() {
            minor[r] = [d[row][0], d[row][1], d[row][2]];
        }
        let sign = if (i + 3) % 2 == 0 { 1.0 } else { -1.0 };
        *ci = sign * det3(minor);
    }
    Ok(c)
}

/// `D(p, q, f)`: the determinant expanded along its `f` column.
pub fn press_dyson_d(px: &DecayedStrategy, qy: &DecayedStrategy, f: [f64; 4]) -> Result<f64> {
    let c = last_column_cofactors(px, qy)?;
    Ok(c.iter().zip(f.iter()).map(|(a, b)| a * b).sum())
}

fn dot(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

/// Long-run payoffs `D(S_X)/D(1)` and `D(S_Y)/D(1)`. Falls back to the
/// linear solve when `D(1)` vanishes, and reports
/// [`Error::DegenerateGame`] when that is not unique either.
pub fn expected_payoffs(
    px: &DecayedStrategy,
    qy: &DecayedStrategy,
    payoffs: &GamePayoffs,
) -> Result<PayoffPair> {
    let c = last_column_cofactors(px, qy)?;
    let norm = c.iter().sum::<f64>();
    if norm.abs() >= DETERMINANT_EPS {
        return Ok(PayoffPair {
            sx: dot(&c, &payoffs.sx) / norm,
            sy: dot(&c, &payoffs.sy) / norm,
            method: PayoffMethod::Determinant,
        });
    }
    let matrix = transition_matrix(px, qy)?;
    match stationary(&matrix) {
        Ok(st) => Ok(PayoffPair {
            sx: dot(&st.v, &payoffs.sx),
            sy: dot(&st.v, &payoffs.sy),
            method: PayoffMethod::LinearSolve,
        }),
        Err(Error::NonUniqueStationary { .. }) => Err(Error::DegenerateGame),
        Err(e) => Err(e),
    }
}
