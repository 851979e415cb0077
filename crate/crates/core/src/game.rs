//! Actions, outcome states, payoffs and memory-one strategies.
//!
//! Every 4-vector in this crate is indexed by the joint outcome of the
//! previous round seen from X's side: `CC, CD, DC, DD`, where the first
//! letter is X's move and the second is Y's.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Action {
    Cooperate,
    Defect,
}

impl Action {
    pub fn is_cooperate(self) -> bool {
        self == Action::Cooperate
    }
}

/// Joint outcome of one round, from X's perspective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum OutcomeState {
    CC = 0,
    CD = 1,
    DC = 2,
    DD = 3,
}

impl OutcomeState {
    pub const ALL: [OutcomeState; 4] = [
        OutcomeState::CC,
        OutcomeState::CD,
        OutcomeState::DC,
        OutcomeState::DD,
    ];

    pub fn new(x: Action, y: Action) -> Self {
        match (x, y) {
            (Action::Cooperate, Action::Cooperate) => OutcomeState::CC,
            (Action::Cooperate, Action::Defect) => OutcomeState::CD,
            (Action::Defect, Action::Cooperate) => OutcomeState::DC,
            (Action::Defect, Action::Defect) => OutcomeState::DD,
        }
    }

    pub fn from_index(index: usize) -> Option<Self> {
        Self::ALL.get(index).copied()
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn actions(self) -> (Action, Action) {
        match self {
            OutcomeState::CC => (Action::Cooperate, Action::Cooperate),
            OutcomeState::CD => (Action::Cooperate, Action::Defect),
            OutcomeState::DC => (Action::Defect, Action::Cooperate),
            OutcomeState::DD => (Action::Defect, Action::Defect),
        }
    }

    /// The same outcome as Y sees it (CD and DC swap).
    pub fn swapped(self) -> Self {
        let (x, y) = self.actions();
        OutcomeState::new(y, x)
    }
}

impl std::fmt::Display for OutcomeState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            OutcomeState::CC => "CC",
            OutcomeState::CD => "CD",
            OutcomeState::DC => "DC",
            OutcomeState::DD => "DD",
        };
        f.write_str(s)
    }
}

/// Cooperation probabilities conditioned on the previous outcome, indexed
/// from the owning player's own perspective (own move first).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MemoryOneStrategy {
    probs: [f64; 4],
}

impl MemoryOneStrategy {
    pub fn new(probs: [f64; 4]) -> Result<Self> {
        for (i, &p) in probs.iter().enumerate() {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Domain(format!(
                    "p{} = {p} is not a probability in [0, 1]",
                    i + 1
                )));
            }
        }
        Ok(Self { probs })
    }

    pub fn probs(&self) -> [f64; 4] {
        self.probs
    }

    pub fn p(&self, state: OutcomeState) -> f64 {
        self.probs[state.index()]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Role {
    X,
    Y,
}

impl Role {
    pub fn name(self) -> &'static str {
        match self {
            Role::X => "X",
            Role::Y => "Y",
        }
    }
}

/// A strategy after the betrayal decay factor `m` has been applied.
///
/// `effective` is the decayed vector in the owner's own indexing: X keeps
/// `(p1, p2, m p3, m p4)` and Y keeps `(q1, m q2, q3, m q4)`.
///
/// The Markov dynamics read the owner's cooperation probability per prior
/// outcome in X's state order through [`DecayedStrategy::by_state`]. For X
/// that is `effective`. For Y it is `(q1, m q3, q2, m q4)`: Y's own index
/// is the swapped outcome, and the decay applies in the rounds where Y
/// defected (X's CD and DD).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayedStrategy {
    pub raw: MemoryOneStrategy,
    pub effective: [f64; 4],
    pub m: f64,
    pub role: Role,
}

pub fn check_decay(m: f64) -> Result<()> {
    if m > 0.0 && m <= 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("m must be in (0,1], got {m}")))
    }
}

pub fn decay(strategy: MemoryOneStrategy, m: f64, role: Role) -> Result<DecayedStrategy> {
    check_decay(m)?;
    let [p1, p2, p3, p4] = strategy.probs();
    let effective = match role {
        Role::X => [p1, p2, m * p3, m * p4],
        Role::Y => [p1, m * p2, p3, m * p4],
    };
    Ok(DecayedStrategy {
        raw: strategy,
        effective,
        m,
        role,
    })
}

impl DecayedStrategy {
    /// Cooperation probability after each prior outcome `CC, CD, DC, DD`
    /// as seen from X, which is the row pairing of the transition matrix.
    pub fn by_state(&self) -> [f64; 4] {
        let [p1, p2, p3, p4] = self.raw.probs();
        let m = self.m;
        match self.role {
            Role::X => [p1, p2, m * p3, m * p4],
            Role::Y => [p1, m * p3, p2, m * p4],
        }
    }
}

/// Per-outcome payoffs for both players.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GamePayoffs {
    pub sx: [f64; 4],
    pub sy: [f64; 4],
    pub pd_valid: bool,
}

impl GamePayoffs {
    pub fn reward(&self) -> f64 {
        self.sx[0]
    }
    pub fn sucker(&self) -> f64 {
        self.sx[1]
    }
    pub fn temptation(&self) -> f64 {
        self.sx[2]
    }
    pub fn punishment(&self) -> f64 {
        self.sx[3]
    }
}

/// Builds `S_X = (R, S, T, P)` and `S_Y = (R, T, S, P)`. A payoff set that
/// is not a prisoner's dilemma is still returned, with `pd_valid` unset.
pub fn make_payoffs(r: f64, s: f64, t: f64, p: f64) -> Result<GamePayoffs> {
    if ![r, s, t, p].iter().all(|v| v.is_finite()) {
        return Err(Error::Domain("payoffs must be finite".into()));
    }
    Ok(GamePayoffs {
        sx: [r, s, t, p],
        sy: [r, t, s, p],
        pd_valid: t > r && r > p && p > s,
    })
}

/// The payoffs used for every experiment figure: `R = 1.5, S = -1, T = 3, P = 0`.
pub fn standard_payoffs() -> GamePayoffs {
    make_payoffs(1.5, -1.0, 3.0, 0.0).expect("finite constants")
}

/// Donation game: cooperating costs `c` and hands the pool a benefit `r`
/// that is split evenly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DonationParams {
    pub r: f64,
    pub c: f64,
}

impl DonationParams {
    pub fn new(r: f64, c: f64) -> Result<Self> {
        let d = Self { r, c };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        let DonationParams { r, c } = *self;
        if !(r.is_finite() && c.is_finite()) || r <= 0.0 || c <= 0.0 || r <= c {
            return Err(Error::Domain(format!(
                "donation parameters need r > c > 0, got r={r}, c={c}"
            )));
        }
        Ok(())
    }
}

/// `R = (r - c)/2, S = r/2 - c, T = r/2, P = 0`.
pub fn payoffs_from_donation(params: DonationParams) -> Result<GamePayoffs> {
    params.validate()?;
    let DonationParams { r, c } = params;
    make_payoffs((r - c) / 2.0, r / 2.0 - c, r / 2.0, 0.0)
}
