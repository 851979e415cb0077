//! JSON run configuration shared by the `cloud` and `figure` commands.
//!
//! Every key is optional. Unknown keys are rejected. A config names exactly
//! one strategy source (`figure`, `strategy` or `p`) and at most one payoff
//! block (`rstp` or `rc`; the default is R=1.5, S=-1, T=3, P=0).
//!
//! ```json
//! {
//!   "strategy": "zd-set", "p1": 0.8, "p4": 0.1,
//!   "rstp": { "R": 1.5, "S": -1, "T": 3, "P": 0 },
//!   "n_opponents": 50000, "mode": "analytic", "seed": 7,
//!   "out_dir": "out/zd-set", "workers": 4
//! }
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::arena::{ExperimentSpec, FigureParams, Mode, XStrategy, FIGURE_OPPONENTS};
use crate::classic::{self, NamedStrategy};
use crate::error::{Error, Result};
use crate::game::{
    make_payoffs, payoffs_from_donation, standard_payoffs, DonationParams, GamePayoffs,
    MemoryOneStrategy,
};
use crate::zd::{self, ZDParams};

pub const OUT_DIR_ENV: &str = "ZD_DILEMMA_OUT";
pub const DEFAULT_SIM_ROUNDS: u64 = 100_000;

pub const STRATEGY_NAMES: [&str; 7] = [
    "wsls",
    "allc",
    "alld",
    "tft",
    "zd-set",
    "zd-extortion",
    "linear",
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rstp {
    #[serde(rename = "R")]
    pub r: f64,
    #[serde(rename = "S")]
    pub s: f64,
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(rename = "P")]
    pub p: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeName {
    Analytic,
    Simulated,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub figure: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategy: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<[f64; 4]>,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p4: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rstp: Option<Rstp>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rc: Option<DonationParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_opponents: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<ModeName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rounds: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

/// What a validated config asks for.
#[derive(Debug, Clone, PartialEq)]
pub enum Plan {
    Figure { id: u8, params: FigureParams },
    Cloud(ExperimentSpec),
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let cfg = parse_config(&text)
        .map_err(|e| Error::Config(format!("{}: {}", path.display(), strip_prefix(e))))?;
    Ok(cfg)
}

fn strip_prefix(e: Error) -> String {
    match e {
        Error::Config(msg) => msg,
        other => other.to_string(),
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    let cfg: RunConfig = serde_json::from_str(text)
        .map_err(|e| Error::Config(format!("line {} column {}: {e}", e.line(), e.column())))?;
    cfg.validate()?;
    Ok(cfg)
}

fn pick<T>(over: Option<T>, base: Option<T>) -> Option<T> {
    over.or(base)
}

impl RunConfig {
    fn has_strategy_source(&self) -> bool {
        self.figure.is_some() || self.strategy.is_some() || self.p.is_some()
    }

    /// Field-wise override. A strategy source or payoff block in `over`
    /// replaces the whole corresponding group of `self`.
    pub fn merged(self, over: RunConfig) -> RunConfig {
        let (figure, strategy, p) = if over.has_strategy_source() {
            (over.figure, over.strategy, over.p)
        } else {
            (self.figure, self.strategy, self.p)
        };
        let (rstp, rc) = if over.rstp.is_some() || over.rc.is_some() {
            (over.rstp, over.rc)
        } else {
            (self.rstp, self.rc)
        };
        RunConfig {
            figure,
            strategy,
            p,
            p1: pick(over.p1, self.p1),
            p4: pick(over.p4, self.p4),
            s: pick(over.s, self.s),
            phi: pick(over.phi, self.phi),
            alpha: pick(over.alpha, self.alpha),
            beta: pick(over.beta, self.beta),
            gamma: pick(over.gamma, self.gamma),
            rstp,
            rc,
            m: pick(over.m, self.m),
            n_opponents: pick(over.n_opponents, self.n_opponents),
            mode: pick(over.mode, self.mode),
            rounds: pick(over.rounds, self.rounds),
            seed: pick(over.seed, self.seed),
            out_dir: pick(over.out_dir, self.out_dir),
            workers: pick(over.workers, self.workers),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let sources = [
            self.figure.map(|_| "figure"),
            self.strategy.as_ref().map(|_| "strategy"),
            self.p.map(|_| "p"),
        ];
        let given: Vec<&str> = sources.iter().flatten().copied().collect();
        if given.len() != 1 {
            return Err(Error::Config(format!(
                "exactly one strategy source (figure, strategy or p) is required, got {}",
                if given.is_empty() {
                    "none".to_string()
                } else {
                    given.join(", ")
                }
            )));
        }
        if self.rstp.is_some() && self.rc.is_some() {
            return Err(Error::Config(
                "payoffs given twice: use either the 'rstp' or the 'rc' block, not both".into(),
            ));
        }
        if let Some(m) = self.m {
            if !(m > 0.0 && m <= 1.0) {
                return Err(Error::Config(format!("m must be in (0,1], got {m}")));
            }
        }
        if let Some(id) = self.figure {
            if !(2..=5).contains(&id) {
                return Err(Error::Config(format!(
                    "figure must be 2, 3, 4 or 5, got {id}"
                )));
            }
        }
        if let Some(name) = &self.strategy {
            if !STRATEGY_NAMES.contains(&name.as_str()) {
                return Err(Error::Config(format!(
                    "unknown strategy '{name}' (expected one of {})",
                    STRATEGY_NAMES.join(", ")
                )));
            }
        }
        if let Some(p) = self.p {
            MemoryOneStrategy::new(p).map_err(|e| Error::Config(e.to_string()))?;
        }
        if let Some(rc) = self.rc {
            rc.validate().map_err(|e| Error::Config(e.to_string()))?;
        }
        if self.n_opponents == Some(0) {
            return Err(Error::Config("n_opponents must be at least 1".into()));
        }
        if self.rounds == Some(0) {
            return Err(Error::Config("rounds must be at least 1".into()));
        }
        if self.workers == Some(0) {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        Ok(())
    }

    fn payoffs(&self) -> Result<GamePayoffs> {
        match (self.rstp, self.rc) {
            (Some(g), None) => make_payoffs(g.r, g.s, g.t, g.p),
            (None, Some(d)) => payoffs_from_donation(d),
            (None, None) => Ok(standard_payoffs()),
            (Some(_), Some(_)) => Err(Error::Config("payoffs given twice".into())),
        }
    }

    fn require(&self, value: Option<f64>, key: &str, strategy: &str) -> Result<f64> {
        value.ok_or_else(|| Error::Config(format!("strategy '{strategy}' needs '{key}'")))
    }

    fn donation_or_default(&self, strategy: &str) -> Result<DonationParams> {
        if self.rstp.is_some() {
            return Err(Error::Config(format!(
                "strategy '{strategy}' is defined in donation form; give an 'rc' block instead of 'rstp'"
            )));
        }
        Ok(self.rc.unwrap_or(FigureParams::default().donation))
    }

    fn x_strategy(&self) -> Result<(XStrategy, GamePayoffs)> {
        let m = self.m.unwrap_or(1.0);
        if let Some(p) = self.p {
            let named = NamedStrategy {
                name: "custom".into(),
                strategy: MemoryOneStrategy::new(p)?,
            };
            return Ok((XStrategy::Named(named), self.payoffs()?));
        }
        let name = self.strategy.as_deref().unwrap_or_default();
        match name {
            "zd-set" => {
                let p1 = self.require(self.p1, "p1", name)?;
                let p4 = self.require(self.p4, "p4", name)?;
                match self.rc {
                    Some(d) => Ok((
                        XStrategy::Zd(zd::zd_set(p1, p4, d, m)?),
                        payoffs_from_donation(d)?,
                    )),
                    None => {
                        let g = self.payoffs()?;
                        Ok((XStrategy::Zd(zd::solve_equalizer_general(p1, p4, &g)?), g))
                    }
                }
            }
            "zd-extortion" => {
                let s = self.require(self.s, "s", name)?;
                let phi = self.require(self.phi, "phi", name)?;
                let d = self.donation_or_default(name)?;
                Ok((
                    XStrategy::Zd(zd::zd_extortion(s, phi, d)?),
                    payoffs_from_donation(d)?,
                ))
            }
            "linear" => {
                let params = ZDParams {
                    alpha: self.require(self.alpha, "alpha", name)?,
                    beta: self.require(self.beta, "beta", name)?,
                    gamma: self.require(self.gamma, "gamma", name)?,
                    phi: self.require(self.phi, "phi", name)?,
                    s: None,
                    reference_point: None,
                    m,
                };
                let d = self.donation_or_default(name)?;
                Ok((
                    XStrategy::Zd(zd::linear_strategy(params, d)?),
                    payoffs_from_donation(d)?,
                ))
            }
            other => {
                let named = classic::lookup(other)
                    .ok_or_else(|| Error::Config(format!("unknown strategy '{other}'")))?;
                Ok((XStrategy::Named(named), self.payoffs()?))
            }
        }
    }

    pub fn plan(&self) -> Result<Plan> {
        self.validate()?;
        if let Some(id) = self.figure {
            let mut params = FigureParams {
                seed: self.seed.unwrap_or(0),
                n_opponents: self.n_opponents.unwrap_or(FIGURE_OPPONENTS),
                ..FigureParams::default()
            };
            if let Some(v) = self.p1 {
                params.equalizer_p1 = v;
            }
            if let Some(v) = self.p4 {
                params.equalizer_p4 = v;
            }
            if let Some(v) = self.s {
                params.extortion_s = v;
            }
            if let Some(v) = self.phi {
                params.extortion_phi = v;
            }
            if let Some(d) = self.rc {
                params.donation = d;
            }
            return Ok(Plan::Figure { id, params });
        }
        let (x_strategy, payoffs) = self.x_strategy()?;
        let mode = match self.mode.unwrap_or(ModeName::Analytic) {
            ModeName::Analytic => Mode::Analytic,
            ModeName::Simulated => Mode::Simulated {
                rounds: self.rounds.unwrap_or(DEFAULT_SIM_ROUNDS),
            },
        };
        Ok(Plan::Cloud(ExperimentSpec {
            x_strategy,
            n_opponents: self.n_opponents.unwrap_or(FIGURE_OPPONENTS),
            payoffs,
            m: self.m.unwrap_or(1.0),
            mode,
            master_seed: self.seed.unwrap_or(0),
        }))
    }

    /// Output directory: the config value, then `$ZD_DILEMMA_OUT`, then `out`.
    pub fn output_dir(&self) -> PathBuf {
        self.out_dir
            .clone()
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("out"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_figure_config() {
        let cfg = parse_config(r#"{"figure": 2, "seed": 1}"#).unwrap();
        assert_eq!(cfg.figure, Some(2));
        match cfg.plan().unwrap() {
            Plan::Figure { id, params } => {
                assert_eq!(id, 2);
                assert_eq!(params.seed, 1);
                assert_eq!(params.n_opponents, 50_000);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn conflicting_payoff_blocks() {
        let err = parse_config(
            r#"{"strategy": "wsls", "rstp": {"R": 1.5, "S": -1, "T": 3, "P": 0}, "rc": {"r": 6, "c": 4}}"#,
        )
        .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("rstp") && msg.contains("rc"), "{msg}");
    }

    #[test]
    fn decay_out_of_range() {
        let err = parse_config(r#"{"strategy": "wsls", "m": 1.5}"#).unwrap_err();
        assert!(err.to_string().contains("m must be in (0,1]"), "{err}");
    }

    #[test]
    fn unknown_keys_and_syntax_errors_have_context() {
        let err = parse_config("{\"strategy\": \"wsls\",\n \"sead\": 3}").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("sead") && msg.contains("line 2"), "{msg}");
        assert!(parse_config("{\"figure\": 2,,}").is_err());
    }

    #[test]
    fn strategy_sources_are_exclusive() {
        assert!(parse_config(r#"{"seed": 3}"#).is_err());
        assert!(parse_config(r#"{"figure": 4, "strategy": "wsls"}"#).is_err());
        assert!(parse_config(r#"{"strategy": "grim"}"#).is_err());
        assert!(parse_config(r#"{"figure": 7}"#).is_err());
    }

    #[test]
    fn flags_override_file_groups() {
        let file =
            parse_config(r#"{"strategy": "wsls", "rc": {"r": 6, "c": 4}, "seed": 1}"#).unwrap();
        let flags = RunConfig {
            p: Some([0.5; 4]),
            rstp: Some(Rstp {
                r: 1.5,
                s: -1.0,
                t: 3.0,
                p: 0.0,
            }),
            seed: Some(9),
            ..RunConfig::default()
        };
        let merged = file.merged(flags);
        merged.validate().unwrap();
        assert_eq!(merged.strategy, None);
        assert_eq!(merged.rc, None);
        assert_eq!(merged.seed, Some(9));
    }

    #[test]
    fn zd_strategies_resolve() {
        let cfg = parse_config(r#"{"strategy": "zd-set", "p1": 0.8, "p4": 0.1}"#).unwrap();
        let Plan::Cloud(spec) = cfg.plan().unwrap() else {
            panic!()
        };
        let XStrategy::Zd(z) = spec.x_strategy else {
            panic!()
        };
        assert!((z.predicted.unwrap() - 0.5).abs() < 1e-12);

        let cfg = parse_config(r#"{"strategy": "zd-extortion", "s": 0.5, "phi": 0.2}"#).unwrap();
        let Plan::Cloud(spec) = cfg.plan().unwrap() else {
            panic!()
        };
        assert_eq!(spec.payoffs.sx, [1.0, -1.0, 3.0, 0.0]);

        let cfg = parse_config(r#"{"strategy": "zd-extortion", "s": 0.5}"#).unwrap();
        assert!(matches!(cfg.plan(), Err(Error::Config(_))));
        let cfg = parse_config(r#"{"strategy": "zd-extortion", "s": 0.5, "phi": 0.9}"#).unwrap();
        assert!(matches!(cfg.plan(), Err(Error::PhiOutOfRange { .. })));
    }
}
