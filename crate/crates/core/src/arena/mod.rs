//! Payoff-cloud experiments: one fixed strategy for X against many random
//! opponents, plus the figure presets built on top of them.

pub mod diagnostics;
pub mod seed;

use std::path::{Path, PathBuf};

use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classic::{self, sample_random_strategy, NamedStrategy};
use crate::error::{Error, Result};
use crate::game::{
    check_decay, decay, payoffs_from_donation, standard_payoffs, DecayedStrategy, DonationParams,
    GamePayoffs, MemoryOneStrategy, Role,
};
use crate::markov::{expected_payoffs, PayoffMethod, PayoffPair};
use crate::simulate::{simulate_match, simulate_match_with, MatchOptions};
use crate::zd::{self, ZDStrategy};

pub use diagnostics::{analyze_cloud, CloudDiagnostics, LineFit};

/// Rounds of the simulation fallback used for degenerate analytic points.
pub const FALLBACK_ROUNDS: u64 = 100_000;
/// Opponents per figure.
pub const FIGURE_OPPONENTS: usize = 50_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum XStrategy {
    Named(NamedStrategy),
    Zd(ZDStrategy),
}

impl XStrategy {
    pub fn strategy(&self) -> MemoryOneStrategy {
        match self {
            XStrategy::Named(n) => n.strategy,
            XStrategy::Zd(z) => z.strategy,
        }
    }

    pub fn label(&self) -> String {
        match self {
            XStrategy::Named(n) => n.name.clone(),
            XStrategy::Zd(z) => match z.kind {
                zd::ZDKind::Equalizer => "zd-set".into(),
                zd::ZDKind::Extortion => "zd-extortion".into(),
                zd::ZDKind::LinearGeneral => "linear".into(),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    Analytic,
    Simulated { rounds: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub x_strategy: XStrategy,
    pub n_opponents: usize,
    pub payoffs: GamePayoffs,
    pub m: f64,
    pub mode: Mode,
    pub master_seed: u64,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_opponents == 0 {
            return Err(Error::Domain("n_opponents must be at least 1".into()));
        }
        if let Mode::Simulated { rounds: 0 } = self.mode {
            return Err(Error::Domain(
                "simulated mode needs at least one round".into(),
            ));
        }
        check_decay(self.m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PayoffPoint {
    pub sx: f64,
    pub sy: f64,
    pub opponent: MemoryOneStrategy,
    /// Set when the analytic route failed and the point is a time average.
    pub degenerate: bool,
    pub method: PayoffMethod,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PayoffCloud {
    pub points: Vec<PayoffPoint>,
    pub diagnostics: CloudDiagnostics,
}

impl PayoffCloud {
    pub fn pairs(&self) -> Vec<(f64, f64)> {
        self.points.iter().map(|p| (p.sx, p.sy)).collect()
    }
}

/// Analytic long-run payoffs, falling back to a time average over
/// [`FALLBACK_ROUNDS`] rounds (the first tenth discarded) when the chain has
/// no unique stationary distribution. The flag reports the fallback.
pub fn long_run_payoffs(
    px: &DecayedStrategy,
    qy: &DecayedStrategy,
    payoffs: &GamePayoffs,
    fallback_seed: u64,
) -> Result<(PayoffPair, bool)> {
    match expected_payoffs(px, qy, payoffs) {
        Ok(pair) => Ok((pair, false)),
        Err(Error::DegenerateGame) => {
            let opts = MatchOptions {
                burn_in: FALLBACK_ROUNDS / 10,
                ..MatchOptions::new(FALLBACK_ROUNDS, fallback_seed)
            };
            let out = simulate_match_with(px, qy, payoffs, &opts)?;
            let pair = PayoffPair {
                sx: out.sx,
                sy: out.sy,
                method: PayoffMethod::TimeAverage,
            };
            Ok((pair, true))
        }
        Err(e) => Err(e),
    }
}

fn evaluate(spec: &ExperimentSpec, index: u64) -> Result<PayoffPoint> {
    let mut rng = seed::opponent_rng(spec.master_seed, index);
    let opponent = sample_random_strategy(&mut rng);
    let match_seed = rng.next_u64();
    let px = decay(spec.x_strategy.strategy(), spec.m, Role::X)?;
    let qy = decay(opponent, spec.m, Role::Y)?;
    let (pair, degenerate) = match spec.mode {
        Mode::Analytic => long_run_payoffs(&px, &qy, &spec.payoffs, match_seed)?,
        Mode::Simulated { rounds } => {
            let out = simulate_match(&px, &qy, &spec.payoffs, rounds, match_seed)?;
            let pair = PayoffPair {
                sx: out.sx,
                sy: out.sy,
                method: PayoffMethod::TimeAverage,
            };
            (pair, false)
        }
    };
    Ok(PayoffPoint {
        sx: pair.sx,
        sy: pair.sy,
        opponent,
        degenerate,
        method: pair.method,
    })
}

/// Runs the experiment on the current rayon pool. Every opponent has its own
/// seed, so the result does not depend on the number of workers.
pub fn run_cloud(spec: &ExperimentSpec) -> Result<PayoffCloud> {
    spec.validate()?;
    let points = (0..spec.n_opponents as u64)
        .into_par_iter()
        .map(|i| evaluate(spec, i))
        .collect::<Result<Vec<_>>>()?;
    let pairs: Vec<(f64, f64)> = points.iter().map(|p| (p.sx, p.sy)).collect();
    let diagnostics = analyze_cloud(&pairs)?;
    Ok(PayoffCloud {
        points,
        diagnostics,
    })
}

/// [`run_cloud`] on a dedicated pool of `workers` threads.
pub fn run_cloud_with_workers(spec: &ExperimentSpec, workers: usize) -> Result<PayoffCloud> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| run_cloud(spec))
}

/// Overridable parameters of the figure presets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FigureParams {
    pub seed: u64,
    pub n_opponents: usize,
    pub equalizer_p1: f64,
    pub equalizer_p4: f64,
    pub extortion_s: f64,
    pub extortion_phi: f64,
    pub donation: DonationParams,
}

impl Default for FigureParams {
    fn default() -> Self {
        Self {
            seed: 0,
            n_opponents: FIGURE_OPPONENTS,
            equalizer_p1: 0.8,
            equalizer_p4: 0.1,
            extortion_s: 0.5,
            extortion_phi: 0.2,
            donation: DonationParams { r: 6.0, c: 4.0 },
        }
    }
}

/// Experiments behind each figure, labelled. Figure 3 has two clouds.
///
/// * 2: WSLS.
/// * 3: ALLC and ALLD.
/// * 4: equalizer solved directly on `R = 1.5, S = -1, T = 3, P = 0`.
/// * 5: extortion in donation form, played on the donation payoffs.
pub fn figure_specs(id: u8, params: &FigureParams) -> Result<Vec<(String, ExperimentSpec)>> {
    let spec = |x: XStrategy, payoffs: GamePayoffs| ExperimentSpec {
        x_strategy: x,
        n_opponents: params.n_opponents,
        payoffs,
        m: 1.0,
        mode: Mode::Analytic,
        master_seed: params.seed,
    };
    let g = standard_payoffs();
    let specs = match id {
        2 => vec![(
            "wsls".to_string(),
            spec(XStrategy::Named(classic::wsls()), g),
        )],
        3 => vec![
            (
                "allc".to_string(),
                spec(XStrategy::Named(classic::allc()), g),
            ),
            (
                "alld".to_string(),
                spec(XStrategy::Named(classic::alld()), g),
            ),
        ],
        4 => {
            let z = zd::solve_equalizer_general(params.equalizer_p1, params.equalizer_p4, &g)?;
            vec![("zd-set".to_string(), spec(XStrategy::Zd(z), g))]
        }
        5 => {
            let z = zd::zd_extortion(params.extortion_s, params.extortion_phi, params.donation)?;
            let g = payoffs_from_donation(params.donation)?;
            vec![("zd-extortion".to_string(), spec(XStrategy::Zd(z), g))]
        }
        other => {
            return Err(Error::Domain(format!(
                "figure id must be one of 2, 3, 4, 5 (got {other})"
            )))
        }
    };
    Ok(specs)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FigureRun {
    pub id: u8,
    pub clouds: Vec<(String, ExperimentSpec, PayoffCloud)>,
    pub files: Vec<PathBuf>,
}

/// Runs a figure preset and writes its CSV and SVG files into `out_dir`.
/// A single cloud goes to `cloud.csv`; figure 3 writes one
/// `cloud_<label>.csv` per cloud. Both share one `cloud.svg`.
pub fn reproduce_figure(
    id: u8,
    params: &FigureParams,
    out_dir: &Path,
    workers: Option<usize>,
) -> Result<FigureRun> {
    let mut clouds = Vec::new();
    for (label, spec) in figure_specs(id, params)? {
        let cloud = match workers {
            Some(w) => run_cloud_with_workers(&spec, w)?,
            None => run_cloud(&spec)?,
        };
        clouds.push((label, spec, cloud));
    }
    let files = crate::output::write_figure(out_dir, id, &clouds)?;
    Ok(FigureRun { id, clouds, files })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn analytic(x: XStrategy, n: usize, payoffs: GamePayoffs) -> ExperimentSpec {
        ExperimentSpec {
            x_strategy: x,
            n_opponents: n,
            payoffs,
            m: 1.0,
            mode: Mode::Analytic,
            master_seed: 42,
        }
    }

    #[test]
    fn alld_points_lie_on_its_segment() {
        let g = standard_payoffs();
        let cloud = run_cloud(&analytic(XStrategy::Named(classic::alld()), 3, g)).unwrap();
        assert_eq!(cloud.points.len(), 3);
        for p in &cloud.points {
            // Segment (P, P) - (T, S): s_Y = S + (s_X - T)(P - S)/(P - T).
            let line = -1.0 + (p.sx - 3.0) * (0.0 + 1.0) / (0.0 - 3.0);
            assert!((p.sy - line).abs() < 1e-9);
            assert!(!p.degenerate);
        }
        assert!(cloud.diagnostics.collinear);
    }

    #[test]
    fn equalizer_cloud_is_flat() {
        let d = DonationParams::new(6.0, 4.0).unwrap();
        let z = zd::zd_set(0.8, 0.1, d, 1.0).unwrap();
        let g = payoffs_from_donation(d).unwrap();
        let cloud = run_cloud(&analytic(XStrategy::Zd(z), 1000, g)).unwrap();
        for p in &cloud.points {
            assert!((p.sy - 1.0 / 3.0).abs() < 1e-9);
        }
        let line = cloud.diagnostics.line.unwrap();
        assert!(line.slope.abs() < 1e-9);
        assert!(cloud.diagnostics.collinear);
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let g = standard_payoffs();
        let spec = analytic(XStrategy::Named(classic::wsls()), 500, g);
        let a = run_cloud_with_workers(&spec, 1).unwrap();
        let b = run_cloud_with_workers(&spec, 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn simulated_mode_tracks_analytic() {
        let g = standard_payoffs();
        let mut spec = analytic(XStrategy::Named(classic::wsls()), 20, g);
        let exact = run_cloud(&spec).unwrap();
        spec.mode = Mode::Simulated { rounds: 200_000 };
        let sim = run_cloud(&spec).unwrap();
        for (a, b) in exact.points.iter().zip(sim.points.iter()) {
            assert_eq!(a.opponent, b.opponent);
            assert!((a.sx - b.sx).abs() < 0.05, "{a:?} {b:?}");
        }
    }

    #[test]
    fn invalid_specs() {
        let g = standard_payoffs();
        let mut spec = analytic(XStrategy::Named(classic::wsls()), 0, g);
        assert!(run_cloud(&spec).is_err());
        spec.n_opponents = 1;
        spec.m = 0.0;
        assert!(run_cloud(&spec).is_err());
        spec.m = 1.0;
        spec.mode = Mode::Simulated { rounds: 0 };
        assert!(run_cloud(&spec).is_err());
        assert!(figure_specs(6, &FigureParams::default()).is_err());
    }

    #[test]
    fn degenerate_pairs_fall_back_to_simulation() {
        // WSLS against ALLC: CC and DC are both absorbing; play starts in CC.
        let g = standard_payoffs();
        let px = decay(classic::wsls().strategy, 1.0, Role::X).unwrap();
        let qy = decay(classic::allc().strategy, 1.0, Role::Y).unwrap();
        assert!(matches!(
            expected_payoffs(&px, &qy, &g),
            Err(Error::DegenerateGame)
        ));
        let (pair, degenerate) = long_run_payoffs(&px, &qy, &g, 1).unwrap();
        assert!(degenerate);
        assert_eq!(pair.method, PayoffMethod::TimeAverage);
        assert_eq!((pair.sx, pair.sy), (1.5, 1.5));

        let qy = decay(classic::alld().strategy, 1.0, Role::Y).unwrap();
        let (pair, degenerate) = long_run_payoffs(&px, &qy, &g, 1).unwrap();
        assert!(!degenerate);
        assert!((pair.sx + 0.5).abs() < 1e-12);
    }
}
