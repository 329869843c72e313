//! Command-line front end.
//!
//! Exit codes: 0 on success, 2 for invalid parameters or config, 3 for I/O
//! failures.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use bcast_aoi::analysis::{
    expected_delivery_age, inter_delivery_moments, interdelivery_params_for, lower_bound, min_mw_upper_bound,
    mw_upper_bound, optimize_randomized, optimize_uncoded, randomized_average_age, randomized_ewsaoi,
};
use bcast_aoi::sim::config::{parse_list, ConfigFile};
use bcast_aoi::sim::sweep::eps_grid;
use bcast_aoi::sim::{parse_script, parse_state, replicate, run_replicates, run_sweep, run_trace, write_csv, write_report};
use bcast_aoi::sim::{SimConfig, SweepConfig};
use bcast_aoi::{ActionWeights, AgeWeights, AoiState, ChannelParams, Error, Policy, Result, User};

const DEFAULT_ALPHA1: f64 = 0.3;
const DEFAULT_HORIZON: u64 = 1_000_000;
const DEFAULT_REPS: u32 = 20;
const DEFAULT_SEED: u64 = 2021;
const DEFAULT_TOLERANCE: f64 = 1e-6;

#[derive(Parser)]
#[command(name = "bcast-aoi", version, about = "Age of Information in two-user broadcast erasure channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Lower bound valid for every policy.
    Bound(Common),
    /// Weighted-sum average age of a randomized policy (needs --mu).
    Randomized(Common),
    /// Best coded and uncoded randomized policies.
    Optimize(Common),
    /// Max-Weight upper bound, at --mu or minimized over the simplex.
    MwBound(Common),
    /// Monte Carlo run of one policy.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        policy: Option<PolicyKind>,
        /// Drop the coded action.
        #[arg(long)]
        uncoded: bool,
    },
    /// Coded versus uncoded comparison over a range of erasure probabilities.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Write the rounded table instead of full-precision CSV.
        #[arg(long)]
        report: bool,
        /// Comma-separated erasure probabilities, overriding the grid.
        #[arg(long)]
        eps_list: Option<String>,
    },
    /// Replays an action/erasure script, e.g. "2:11,1:10,1:01,2:10,3:11".
    Trace {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        script: String,
        /// Initial state h1,h2,w1,w2 (default 1,1,0,0 or [run] initial).
        #[arg(long)]
        initial: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum PolicyKind {
    Randomized,
    MaxWeight,
}

#[derive(Args, Clone, Default)]
struct Common {
    #[arg(long)]
    eps1: Option<f64>,
    /// Defaults to --eps1.
    #[arg(long)]
    eps2: Option<f64>,
    #[arg(long)]
    eps12: Option<f64>,
    #[arg(long)]
    alpha1: Option<f64>,
    /// m1,m2,m3
    #[arg(long)]
    mu: Option<String>,
    #[arg(long)]
    horizon: Option<u64>,
    #[arg(long)]
    reps: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

/// Command-line values layered over the config file.
struct Settings {
    common: Common,
    file: ConfigFile,
}

impl Settings {
    fn load(common: Common) -> Result<Self> {
        let file = match &common.config {
            Some(path) => ConfigFile::load(path).inspect_err(|e| {
                if matches!(e, Error::Io(_)) {
                    eprintln!("cannot read {}", path.display());
                }
            })?,
            None => ConfigFile::default(),
        };
        Ok(Self { common, file })
    }

    fn eps1(&self) -> Result<Option<f64>> {
        Ok(self.common.eps1.or(self.file.get("channel", "eps1")?))
    }

    fn channel(&self) -> Result<ChannelParams> {
        let missing = |k: &str| Error::InvalidChannel(format!("{k} is not set (use --{k} or [channel] {k})"));
        let eps1 = self.eps1()?.ok_or_else(|| missing("eps1"))?;
        let eps2 = self.common.eps2.or(self.file.get("channel", "eps2")?).unwrap_or(eps1);
        let eps12 = self.common.eps12.or(self.file.get("channel", "eps12")?).ok_or_else(|| missing("eps12"))?;
        let params = ChannelParams::overhearing_model(eps1, eps2, eps12)?;
        if !params.is_realizable() {
            eprintln!(
                "note: 1 - eps1 - eps2 + eps12 = {:.6} < 0, so no single joint erasure law fits; \
                 the simulator draws each action's outcome from its own law",
                params.both_received()
            );
        }
        Ok(params)
    }

    fn alphas(&self) -> Result<AgeWeights> {
        AgeWeights::from_alpha1(self.common.alpha1.or(self.file.get("weights", "alpha1")?).unwrap_or(DEFAULT_ALPHA1))
    }

    fn mu(&self) -> Result<Option<ActionWeights>> {
        let list = match &self.common.mu {
            Some(s) => Some(parse_list(s).map_err(Error::InvalidActionWeights)?),
            None => self.file.get_list("policy", "mu")?,
        };
        match list.as_deref() {
            None => Ok(None),
            Some(&[a, b, c]) => ActionWeights::new(a, b, c).map(Some),
            Some(other) => Err(Error::InvalidActionWeights(format!("expected three values, got {}", other.len()))),
        }
    }

    fn require_mu(&self) -> Result<ActionWeights> {
        self.mu()?.ok_or_else(|| Error::InvalidActionWeights("--mu m1,m2,m3 is required".into()))
    }

    fn horizon(&self) -> Result<u64> {
        Ok(self.common.horizon.or(self.file.get("run", "horizon")?).unwrap_or(DEFAULT_HORIZON))
    }

    fn reps(&self) -> Result<u32> {
        Ok(self.common.reps.or(self.file.get("run", "reps")?).unwrap_or(DEFAULT_REPS))
    }

    fn seed(&self) -> Result<u64> {
        Ok(self.common.seed.or(self.file.get("run", "seed")?).unwrap_or(DEFAULT_SEED))
    }

    fn initial(&self) -> Result<AoiState> {
        match self.file.raw("run", "initial") {
            Some(s) => parse_state(s),
            None => Ok(AoiState::INITIAL),
        }
    }

    fn tolerance(&self) -> Result<f64> {
        Ok(self.file.get("sweep", "tolerance")?.unwrap_or(DEFAULT_TOLERANCE))
    }

    fn out(&self) -> Option<PathBuf> {
        self.common.out.clone().or_else(|| self.file.raw("sweep", "out").map(PathBuf::from))
    }

    fn policy(&self, kind: Option<PolicyKind>, uncoded: bool) -> Result<Policy> {
        let kind = match kind {
            Some(k) => k,
            None => match self.file.raw("policy", "kind") {
                Some("randomized") => PolicyKind::Randomized,
                Some("max-weight") | None => PolicyKind::MaxWeight,
                Some(other) => return Err(Error::InvalidConfig(format!("unknown policy kind '{other}'"))),
            },
        };
        let coded = !uncoded && self.file.get::<bool>("policy", "coded")?.unwrap_or(true);
        let policy = match kind {
            PolicyKind::Randomized => Policy::Randomized(self.require_mu()?),
            PolicyKind::MaxWeight => Policy::MaxWeight { coded: true },
        };
        if coded {
            Ok(policy)
        } else {
            policy.uncoded()
        }
    }
}

fn fmt_mu(mu: &ActionWeights) -> String {
    format!("{:.10},{:.10},{:.10}", mu.mu1(), mu.mu2(), mu.mu3())
}

fn cmd_bound(s: &Settings) -> Result<String> {
    let v = lower_bound(&s.alphas()?, &s.channel()?);
    Ok(format!("lower_bound = {v:.16e}\n"))
}

fn cmd_randomized(s: &Settings) -> Result<String> {
    let (a, p, mu) = (s.alphas()?, s.channel()?, s.require_mu()?);
    let mut out = format!("ewsaoi = {:.16e}\n", randomized_ewsaoi(&a, &mu, &p)?);
    for user in User::BOTH {
        let n = user.number();
        writeln!(out, "average_age_{n} = {:.16e}", randomized_average_age(user, &mu, &p)?).unwrap();
        writeln!(out, "mean_delivery_age_{n} = {:.16e}", expected_delivery_age(user, &mu, &p)?).unwrap();
        if let Ok(idp) = interdelivery_params_for(user, &mu, &p) {
            let (m1, m2) = inter_delivery_moments(&idp)?;
            writeln!(out, "mean_interval_{n} = {m1:.16e}\nsecond_moment_interval_{n} = {m2:.16e}").unwrap();
        }
    }
    Ok(out)
}

fn cmd_optimize(s: &Settings) -> Result<String> {
    let (a, p, tol) = (s.alphas()?, s.channel()?, s.tolerance()?);
    let coded = optimize_randomized(&a, &p, tol)?;
    let uncoded = optimize_uncoded(&a, &p, tol)?;
    Ok(format!(
        "coded_mu = {}\ncoded_ewsaoi = {:.16e}\nuncoded_mu = {}\nuncoded_ewsaoi = {:.16e}\n",
        fmt_mu(&coded.mu),
        coded.value,
        fmt_mu(&uncoded.mu),
        uncoded.value
    ))
}

fn cmd_mw_bound(s: &Settings) -> Result<String> {
    let (a, p) = (s.alphas()?, s.channel()?);
    match s.mu()? {
        Some(mu) => Ok(format!("mw_bound = {:.16e}\n", mw_upper_bound(&a, &mu, &p)?)),
        None => {
            let o = min_mw_upper_bound(&a, &p, s.tolerance()?)?;
            Ok(format!("mu = {}\nmw_bound = {:.16e}\n", fmt_mu(&o.mu), o.value))
        }
    }
}

fn cmd_simulate(s: &Settings, kind: Option<PolicyKind>, uncoded: bool) -> Result<String> {
    let (a, p) = (s.alphas()?, s.channel()?);
    let policy = s.policy(kind, uncoded)?;
    let cfg = SimConfig::new(policy, p, a)
        .with_horizon(s.horizon()?)
        .with_reps(s.reps()?)
        .with_seed(s.seed()?)
        .with_initial(s.initial()?);
    let mut out = format!("policy = {}\n", policy.name());
    let results = if cfg.reps >= 2 {
        let summary = replicate(&cfg)?;
        writeln!(out, "ewsaoi_mean = {:.16e}\newsaoi_ci95 = {:.16e}", summary.mean, summary.ci_halfwidth).unwrap();
        summary.results
    } else {
        let r = run_replicates(&cfg)?;
        writeln!(out, "ewsaoi = {:.16e}", r[0].ewsaoi).unwrap();
        r
    };
    if let Policy::Randomized(mu) = policy {
        writeln!(out, "closed_form = {:.16e}", randomized_ewsaoi(&a, &mu, &p)?).unwrap();
    }
    let reps = results.len() as f64;
    for user in User::BOTH {
        let n = user.number();
        let avg = |f: &dyn Fn(&bcast_aoi::sim::SimResult) -> f64| results.iter().map(f).sum::<f64>() / reps;
        writeln!(out, "throughput_{n} = {:.16e}", avg(&|r| r.user(user).throughput(r.horizon))).unwrap();
        writeln!(out, "average_age_{n} = {:.16e}", avg(&|r| r.user(user).average_age(r.horizon))).unwrap();
        writeln!(out, "q2_empty_fraction_{n} = {:.16e}", avg(&|r| r.user(user).q2_empty_fraction(r.horizon))).unwrap();
    }
    Ok(out)
}

fn cmd_sweep(s: &Settings, report: bool, eps_list: Option<&str>) -> Result<Vec<u8>> {
    let mut cfg = SweepConfig {
        alphas: s.alphas()?,
        horizon: s.horizon()?,
        reps: s.reps()?,
        seed: s.seed()?,
        tolerance: s.tolerance()?,
        ..SweepConfig::default()
    };
    if let Some(scale) = s.file.get("sweep", "eps12_scale")? {
        cfg.eps12_scale = scale;
    }
    let f = &s.file;
    if let Some(list) = eps_list {
        cfg.epsilons = parse_list(list).map_err(Error::InvalidConfig)?;
    } else if f.raw("sweep", "eps_start").is_some() || f.raw("sweep", "eps_stop").is_some() {
        cfg.epsilons = eps_grid(
            f.get("sweep", "eps_start")?.unwrap_or(0.10),
            f.get("sweep", "eps_stop")?.unwrap_or(0.95),
            f.get("sweep", "eps_step")?.unwrap_or(0.05),
        )?;
    }
    let rows = run_sweep(&cfg)?;
    let mut buf = Vec::new();
    if report {
        write_report(&rows, &mut buf)?;
    } else {
        write_csv(&rows, &mut buf)?;
    }
    Ok(buf)
}

fn cmd_trace(s: &Settings, script: &str, initial: Option<&str>) -> Result<String> {
    let steps = parse_script(script)?;
    let start = match initial {
        Some(text) => parse_state(text)?,
        None => s.initial()?,
    };
    let states = run_trace(start, &steps)?;
    let mut out = format!("k=0 state={start}\n");
    for (k, ((a, z), st)) in steps.iter().zip(&states).enumerate() {
        writeln!(out, "k={} action={a} z={}{} state={st}", k + 1, u8::from(z.z1), u8::from(z.z2)).unwrap();
    }
    Ok(out)
}

fn emit(out: Option<PathBuf>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => std::fs::write(&path, bytes).inspect_err(|_| eprintln!("cannot write {}", path.display()))?,
        None => std::io::stdout().write_all(bytes)?,
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let (common, body) = match cli.command {
        Command::Bound(c) => {
            let s = Settings::load(c)?;
            (s.out(), cmd_bound(&s)?.into_bytes())
        }
        Command::Randomized(c) => {
            let s = Settings::load(c)?;
            (s.out(), cmd_randomized(&s)?.into_bytes())
        }
        Command::Optimize(c) => {
            let s = Settings::load(c)?;
            (s.out(), cmd_optimize(&s)?.into_bytes())
        }
        Command::MwBound(c) => {
            let s = Settings::load(c)?;
            (s.out(), cmd_mw_bound(&s)?.into_bytes())
        }
        Command::Simulate { common, policy, uncoded } => {
            let s = Settings::load(common)?;
            (s.out(), cmd_simulate(&s, policy, uncoded)?.into_bytes())
        }
        Command::Sweep { common, report, eps_list } => {
            let s = Settings::load(common)?;
            (s.out(), cmd_sweep(&s, report, eps_list.as_deref())?)
        }
        Command::Trace { common, script, initial } => {
            let s = Settings::load(common)?;
            (s.out(), cmd_trace(&s, &script, initial.as_deref())?.into_bytes())
        }
    };
    emit(common, &body)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
