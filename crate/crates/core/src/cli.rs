//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when a result is infeasible or degenerate,
//! 2 for bad arguments, configuration or I/O errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::arena::{self, FigureRun, PayoffCloud, XStrategy};
use crate::classic;
use crate::config::{load_config, ModeName, Plan, Rstp, RunConfig};
use crate::error::{Error, Result};
use crate::game::{
    decay, make_payoffs, payoffs_from_donation, standard_payoffs, DonationParams, GamePayoffs,
    MemoryOneStrategy, Role,
};
use crate::markov::{expected_payoffs, stationary, transition_matrix};
use crate::simulate::{simulate_match_with, MatchOptions};
use crate::zd::{self, ZDKind, ZDParams, ZDStrategy};

#[derive(Debug, Parser)]
#[command(
    name = "zd-dilemma",
    version,
    about = "Memory-one iterated prisoner's dilemma: payoffs, zero-determinant strategies and payoff clouds"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Long-run payoffs of two strategies, analytic and simulated.
    #[command(allow_negative_numbers = true)]
    Payoff(PairArgs),
    /// Transition matrix and stationary distribution of two strategies.
    #[command(allow_negative_numbers = true)]
    Stationary(PairArgs),
    /// Construct a zero-determinant strategy.
    #[command(subcommand)]
    Zd(ZdCommand),
    /// One strategy against many random opponents.
    #[command(allow_negative_numbers = true)]
    Cloud(CloudArgs),
    /// Reproduce one of the preset experiment figures.
    #[command(allow_negative_numbers = true)]
    Figure(FigureArgs),
}

#[derive(Debug, Args, Default, Clone)]
pub struct PayoffArgs {
    #[arg(long = "R")]
    pub big_r: Option<f64>,
    #[arg(long = "S")]
    pub big_s: Option<f64>,
    #[arg(long = "T")]
    pub big_t: Option<f64>,
    #[arg(long = "P")]
    pub big_p: Option<f64>,
    /// Donation benefit.
    #[arg(long)]
    pub r: Option<f64>,
    /// Donation cost.
    #[arg(long)]
    pub c: Option<f64>,
}

impl PayoffArgs {
    fn rstp(&self) -> Result<Option<Rstp>> {
        match (self.big_r, self.big_s, self.big_t, self.big_p) {
            (None, None, None, None) => Ok(None),
            (Some(r), Some(s), Some(t), Some(p)) => Ok(Some(Rstp { r, s, t, p })),
            _ => Err(Error::Config(
                "--R, --S, --T and --P must be given together".into(),
            )),
        }
    }

    fn rc(&self) -> Result<Option<DonationParams>> {
        match (self.r, self.c) {
            (None, None) => Ok(None),
            (Some(r), Some(c)) => Ok(Some(DonationParams { r, c })),
            _ => Err(Error::Config("--r and --c must be given together".into())),
        }
    }

    fn payoffs(&self) -> Result<GamePayoffs> {
        match (self.rstp()?, self.rc()?) {
            (Some(_), Some(_)) => Err(Error::Config(
                "give payoffs either as --R/--S/--T/--P or as --r/--c, not both".into(),
            )),
            (Some(g), None) => make_payoffs(g.r, g.s, g.t, g.p),
            (None, Some(d)) => payoffs_from_donation(d),
            (None, None) => Ok(standard_payoffs()),
        }
    }

    fn donation(&self) -> Result<DonationParams> {
        if self.rstp()?.is_some() {
            return Err(Error::Config(
                "this construction is in donation form: use --r and --c".into(),
            ));
        }
        let d = self.rc()?.unwrap_or(DonationParams { r: 6.0, c: 4.0 });
        d.validate()?;
        Ok(d)
    }
}

#[derive(Debug, Args)]
pub struct PairArgs {
    /// X's strategy: a name (wsls, allc, alld, tft) or four comma-separated probabilities.
    #[arg(long)]
    pub x: String,
    /// Y's strategy, indexed from Y's own perspective.
    #[arg(long)]
    pub y: String,
    #[command(flatten)]
    pub payoffs: PayoffArgs,
    #[arg(long, default_value_t = 1.0)]
    pub m: f64,
    #[arg(long, default_value_t = 100_000)]
    pub rounds: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum ZdCommand {
    /// Equalizer fixing the opponent's payoff.
    #[command(allow_negative_numbers = true)]
    Set {
        #[arg(long)]
        p1: f64,
        #[arg(long)]
        p4: f64,
        #[command(flatten)]
        payoffs: PayoffArgs,
    },
    /// Extortion strategy with factor s.
    #[command(allow_negative_numbers = true)]
    Extort {
        #[arg(long)]
        s: f64,
        #[arg(long)]
        phi: f64,
        #[command(flatten)]
        payoffs: PayoffArgs,
    },
    /// Strategy enforcing alpha s_X + beta s_Y + gamma = 0.
    #[command(allow_negative_numbers = true)]
    Linear {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        phi: f64,
        #[arg(long, default_value_t = 1.0)]
        m: f64,
        #[command(flatten)]
        payoffs: PayoffArgs,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Analytic,
    Simulated,
}

#[derive(Debug, Args)]
pub struct CloudArgs {
    /// JSON run configuration; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// wsls, allc, alld, tft, zd-set, zd-extortion or linear.
    #[arg(long)]
    pub strategy: Option<String>,
    /// Explicit strategy vector p1,p2,p3,p4.
    #[arg(long)]
    pub p: Option<String>,
    #[command(flatten)]
    pub zd: ZdFlags,
    #[command(flatten)]
    pub payoffs: PayoffArgs,
    #[arg(long)]
    pub m: Option<f64>,
    /// Number of random opponents.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long)]
    pub rounds: Option<u64>,
    #[command(flatten)]
    pub run: RunFlags,
}

#[derive(Debug, Args, Default)]
pub struct ZdFlags {
    #[arg(long)]
    pub p1: Option<f64>,
    #[arg(long)]
    pub p4: Option<f64>,
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long)]
    pub phi: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
}

#[derive(Debug, Args, Default)]
pub struct RunFlags {
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory (default: $ZD_DILEMMA_OUT or ./out).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads for the opponent loop.
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Debug, Args)]
pub struct FigureArgs {
    #[arg(long)]
    pub id: u8,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    #[command(flatten)]
    pub zd: ZdFlags,
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub c: Option<f64>,
    #[command(flatten)]
    pub run: RunFlags,
}

fn parse_strategy(text: &str) -> Result<(String, MemoryOneStrategy)> {
    if let Some(named) = classic::lookup(text) {
        return Ok((named.name, named.strategy));
    }
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return Err(Error::Config(format!(
            "'{text}' is neither a strategy name nor four comma-separated probabilities"
        )));
    }
    let mut probs = [0.0; 4];
    for (slot, part) in probs.iter_mut().zip(parts) {
        *slot = part
            .parse()
            .map_err(|_| Error::Config(format!("'{part}' is not a number")))?;
    }
    Ok(("custom".into(), MemoryOneStrategy::new(probs)?))
}

fn fmt4(v: [f64; 4]) -> String {
    format!("({:.4}, {:.4}, {:.4}, {:.4})", v[0], v[1], v[2], v[3])
}

/// Parses `argv` (program name first) and runs the command, writing human
/// output to `out` and diagnostics to `err`. Returns the exit code.
pub fn cli_main<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn run(command: Command, out: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Payoff(args) => payoff(args, out),
        Command::Stationary(args) => stationary_cmd(args, out),
        Command::Zd(cmd) => zd_cmd(cmd, out),
        Command::Cloud(args) => cloud(args, out),
        Command::Figure(args) => figure(args, out),
    }
}

fn w(out: &mut dyn Write, line: std::fmt::Arguments<'_>) -> Result<()> {
    out.write_fmt(line)
        .and_then(|_| out.write_all(b"\n"))
        .map_err(|source| Error::Io {
            path: PathBuf::from("<stdout>"),
            source,
        })
}

fn payoff(args: PairArgs, out: &mut dyn Write) -> Result<i32> {
    let g = args.payoffs.payoffs()?;
    let (xn, xs) = parse_strategy(&args.x)?;
    let (yn, ys) = parse_strategy(&args.y)?;
    let px = decay(xs, args.m, Role::X)?;
    let qy = decay(ys, args.m, Role::Y)?;
    w(out, format_args!("X: {xn} p={}", fmt4(xs.probs())))?;
    w(out, format_args!("Y: {yn} q={}", fmt4(ys.probs())))?;
    let mut code = 0;
    let mut opts = MatchOptions::new(args.rounds, args.seed);
    match expected_payoffs(&px, &qy, &g) {
        Ok(pair) => w(
            out,
            format_args!(
                "analytic: ({:.4}, {:.4}) method={} degenerate=false",
                pair.sx,
                pair.sy,
                pair.method.as_str()
            ),
        )?,
        Err(Error::DegenerateGame) => {
            w(
                out,
                format_args!("analytic: none, degenerate=true (several closed classes)"),
            )?;
            opts.burn_in = args.rounds / 10;
            code = 1;
        }
        Err(e) => return Err(e),
    }
    let sim = simulate_match_with(&px, &qy, &g, &opts)?;
    w(
        out,
        format_args!(
            "simulated: ({:.4}, {:.4}) method=time-average rounds={} burn_in={} se=({:.4}, {:.4})",
            sim.sx, sim.sy, args.rounds, opts.burn_in, sim.se_x, sim.se_y
        ),
    )?;
    Ok(code)
}

fn stationary_cmd(args: PairArgs, out: &mut dyn Write) -> Result<i32> {
    let (_, xs) = parse_strategy(&args.x)?;
    let (_, ys) = parse_strategy(&args.y)?;
    let px = decay(xs, args.m, Role::X)?;
    let qy = decay(ys, args.m, Role::Y)?;
    let t = transition_matrix(&px, &qy)?;
    w(
        out,
        format_args!("transition matrix (rows/cols CC, CD, DC, DD):"),
    )?;
    for row in t.rows() {
        w(out, format_args!("  {}", fmt4(*row)))?;
    }
    let st = stationary(&t)?;
    w(out, format_args!("v = {}", fmt4(st.v)))?;
    Ok(0)
}

fn describe_zd(z: &ZDStrategy, out: &mut dyn Write) -> Result<()> {
    w(
        out,
        format_args!(
            "p=({}, {}, {}, {})",
            short(z.strategy.probs()[0]),
            short(z.strategy.probs()[1]),
            short(z.strategy.probs()[2]),
            short(z.strategy.probs()[3])
        ),
    )?;
    w(out, format_args!("feasible: true"))?;
    let (a, b, g) = z.relation();
    match z.kind {
        ZDKind::Equalizer => w(
            out,
            format_args!(
                "predicted opponent payoff s_Y = {:.4}",
                z.predicted.unwrap_or(f64::NAN)
            ),
        )?,
        ZDKind::Extortion => w(
            out,
            format_args!(
                "slope {} (s_Y - P = s (s_X - P), P = {})",
                short(z.predicted.unwrap_or(f64::NAN)),
                short(z.params.reference_point.unwrap_or(0.0))
            ),
        )?,
        ZDKind::LinearGeneral => {}
    }
    let signed = |v: f64| {
        if v < 0.0 {
            format!("- {:.4}", -v)
        } else {
            format!("+ {v:.4}")
        }
    };
    w(
        out,
        format_args!(
            "enforced relation: {a:.4} s_X {} s_Y {} = 0",
            signed(b),
            signed(g)
        ),
    )
}

/// Up to four decimals without trailing zeros.
fn short(v: f64) -> String {
    let s = format!("{v:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.to_string()
    }
}

fn zd_cmd(cmd: ZdCommand, out: &mut dyn Write) -> Result<i32> {
    let z = match cmd {
        ZdCommand::Set { p1, p4, payoffs } => match payoffs.rc()? {
            Some(d) if payoffs.rstp()?.is_none() => zd::zd_set(p1, p4, d, 1.0)?,
            _ => zd::solve_equalizer_general(p1, p4, &payoffs.payoffs()?)?,
        },
        ZdCommand::Extort { s, phi, payoffs } => {
            let d = payoffs.donation()?;
            let z = zd::zd_extortion(s, phi, d)?;
            let (lo, hi) = zd::phi_range(s, d)?;
            let (slo, _) = zd::s_range(d);
            describe_zd(&z, out)?;
            w(
                out,
                format_args!("phi range: [{lo}, {hi:.4}], s range: [{slo:.4}, 1)"),
            )?;
            return Ok(0);
        }
        ZdCommand::Linear {
            alpha,
            beta,
            gamma,
            phi,
            m,
            payoffs,
        } => {
            let params = ZDParams {
                alpha,
                beta,
                gamma,
                phi,
                s: None,
                reference_point: None,
                m,
            };
            zd::linear_strategy(params, payoffs.donation()?)?
        }
    };
    describe_zd(&z, out)?;
    Ok(0)
}

fn flags_config(zd: &ZdFlags, run: &RunFlags) -> RunConfig {
    RunConfig {
        p1: zd.p1,
        p4: zd.p4,
        s: zd.s,
        phi: zd.phi,
        alpha: zd.alpha,
        beta: zd.beta,
        gamma: zd.gamma,
        seed: run.seed,
        out_dir: run.out.clone(),
        workers: run.workers,
        ..RunConfig::default()
    }
}

fn base_config(path: &Option<PathBuf>) -> Result<RunConfig> {
    match path {
        Some(p) => load_config(p),
        None => Ok(RunConfig::default()),
    }
}

fn cloud(args: CloudArgs, out: &mut dyn Write) -> Result<i32> {
    let base = base_config(&args.config)?;
    let p = match &args.p {
        Some(text) => Some(parse_strategy(text)?.1.probs()),
        None => None,
    };
    let over = RunConfig {
        strategy: args.strategy.clone(),
        p,
        rstp: args.payoffs.rstp()?,
        rc: args.payoffs.rc()?,
        m: args.m,
        n_opponents: args.n,
        mode: args.mode.map(|m| match m {
            ModeArg::Analytic => ModeName::Analytic,
            ModeArg::Simulated => ModeName::Simulated,
        }),
        rounds: args.rounds,
        ..flags_config(&args.zd, &args.run)
    };
    let cfg = base.merged(over);
    execute(&cfg, out)
}

fn figure(args: FigureArgs, out: &mut dyn Write) -> Result<i32> {
    let base = base_config(&args.config)?;
    let rc = match (args.r, args.c) {
        (None, None) => None,
        (Some(r), Some(c)) => Some(DonationParams { r, c }),
        _ => return Err(Error::Config("--r and --c must be given together".into())),
    };
    let over = RunConfig {
        figure: Some(args.id),
        rc,
        n_opponents: args.n,
        ..flags_config(&args.zd, &args.run)
    };
    execute(&base.merged(over), out)
}

fn execute(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32> {
    let dir = cfg.output_dir();
    let files = match cfg.plan()? {
        Plan::Figure { id, params } => {
            let run = arena::reproduce_figure(id, &params, &dir, cfg.workers)?;
            summarize_figure(&run, out)?;
            run.files
        }
        Plan::Cloud(spec) => {
            let cloud = match cfg.workers {
                Some(n) => arena::run_cloud_with_workers(&spec, n)?,
                None => arena::run_cloud(&spec)?,
            };
            let label = spec.x_strategy.label();
            summarize(&label, &spec.x_strategy, &cloud, out)?;
            let clouds = vec![(label, spec, cloud)];
            crate::output::write_figure(&dir, 0, &clouds)?
        }
    };
    let names: Vec<String> = files.iter().map(|f| f.display().to_string()).collect();
    w(out, format_args!("wrote {}", names.join(", ")))?;
    Ok(0)
}

fn summarize_figure(run: &FigureRun, out: &mut dyn Write) -> Result<()> {
    for (label, spec, cloud) in &run.clouds {
        w(out, format_args!("figure {}: {label}", run.id))?;
        summarize(label, &spec.x_strategy, cloud, out)?;
    }
    Ok(())
}

fn summarize(label: &str, x: &XStrategy, cloud: &PayoffCloud, out: &mut dyn Write) -> Result<()> {
    let d = &cloud.diagnostics;
    let degenerate = cloud.points.iter().filter(|p| p.degenerate).count();
    w(
        out,
        format_args!(
            "{label} vs {} random opponents ({degenerate} degenerate)",
            cloud.points.len()
        ),
    )?;
    let within = |dev: f64| {
        if dev < 1e-9 {
            "1e-9".to_string()
        } else {
            format!("{dev:.1e}")
        }
    };
    match x {
        XStrategy::Zd(z) if z.kind == ZDKind::Equalizer => {
            let target = z.predicted.unwrap_or(f64::NAN);
            let dev = cloud
                .points
                .iter()
                .map(|p| (p.sy - target).abs())
                .fold(0.0, f64::max);
            w(
                out,
                format_args!(
                    "collinear: {}, s_Y = {target:.4} ± {}",
                    d.collinear,
                    within(dev)
                ),
            )?;
        }
        XStrategy::Zd(z) if z.kind == ZDKind::Extortion => {
            let s = z.params.s.unwrap_or(f64::NAN);
            let l = z.params.reference_point.unwrap_or(0.0);
            let dev = cloud
                .points
                .iter()
                .map(|p| (s * (p.sx - l) - (p.sy - l)).abs())
                .fold(0.0, f64::max);
            w(
                out,
                format_args!(
                    "collinear: {}, s_Y - P = {s:.4} (s_X - P) ± {}",
                    d.collinear,
                    within(dev)
                ),
            )?;
        }
        _ => w(out, format_args!("collinear: {}", d.collinear))?,
    }
    if let Some(line) = d.line {
        w(
            out,
            format_args!(
                "line: slope = {:.4}, intercept = {:.4}, max residual = {:.1e}",
                line.slope, line.intercept, line.max_residual
            ),
        )?;
    }
    w(
        out,
        format_args!(
            "hull area = {:.4}, dominance fraction (s_X >= s_Y) = {:.4}",
            d.hull_area, d.dominance_fraction
        ),
    )
}
