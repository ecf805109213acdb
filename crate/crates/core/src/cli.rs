//! Command-line front end. Exit codes: 0 success or accept, 1 reject or
//! failed check, 2 error.

use std::fmt::{Debug, Write as _};
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::chain::{self, Trajectory};
use crate::diagnostics::{self, Statistic};
use crate::error::{Error, Result};
use crate::exact::{self, GroupTable, TransitionStructure};
use crate::funineq::{self, Suite};
use crate::gf2::{self, BitMatrix, BitVector};
use crate::protocol::{self, Challenge, KeyPair, Response, Verdict};

/// Limit of `|GL_n(F_2)| / 2^{n^2}` as `n` grows.
pub const ORDER_RATIO_LIMIT: f64 = 0.288_788_095_086_602_4;

#[derive(Parser, Debug)]
#[command(
    name = "tvwalk",
    version,
    about = "Transvection random walk on invertible matrices over GF(2)"
)]
pub struct Cli {
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Flat key=value file; flags given on the command line win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Group order and its ratio to 2^(n^2).
    Order(OrderArgs),
    /// Run one walk from the identity.
    Walk(WalkArgs),
    /// Exact TV and l2 curves and mixing times (n <= 4).
    Exact(ExactArgs),
    /// Spectrum of the transition kernel (n <= 4).
    Spectrum(SpectrumArgs),
    /// Lower bound on the log-Sobolev constant (n <= 3).
    Lsi(LsiArgs),
    /// Randomized inequality suites.
    Check(CheckArgs),
    /// Single-column cutoff experiment.
    Cutoff(CutoffArgs),
    /// Mixing-time upper bound and counting lower bound.
    Bounds(BoundsArgs),
    /// Statistic-based TV estimate of the walk against the uniform law.
    Statistic(StatisticArgs),
    /// Challenge-response authentication.
    #[command(subcommand)]
    Protocol(ProtocolCommand),
}

#[derive(Args, Debug)]
pub struct OrderArgs {
    #[arg(long)]
    pub n: usize,
}

#[derive(Args, Debug)]
pub struct WalkArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub t: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub lazy: bool,
    /// Write the final matrix here.
    #[arg(long)]
    pub public: Option<PathBuf>,
    /// Write the move list here.
    #[arg(long)]
    pub secret: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ExactArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0.25)]
    pub eps: f64,
    #[arg(long)]
    pub lazy: bool,
    /// Last time on the curve; defaults to the later of the two mixing times.
    #[arg(long)]
    pub t_max: Option<u64>,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct SpectrumArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct LsiArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 20)]
    pub restarts: usize,
    #[arg(long, default_value_t = 2000)]
    pub iters: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    /// `all` or one of key, extension, row-decomposition, hypercube, kassabov.
    #[arg(long, default_value = "all")]
    pub suite: String,
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Cube dimension for the hypercube suite.
    #[arg(long, default_value_t = 8)]
    pub d: usize,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct CutoffArgs {
    /// One or more dimensions, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 20_240_601)]
    pub seed: u64,
    /// Grid start, in units of n ln n. The default grid runs from half to
    /// three times the predicted cutoff at 1.5 n ln n.
    #[arg(long, default_value_t = 0.75)]
    pub lo: f64,
    #[arg(long, default_value_t = 4.5)]
    pub hi: f64,
    #[arg(long, default_value_t = 76)]
    pub points: usize,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct BoundsArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0.25)]
    pub eps: f64,
    /// Log-Sobolev constant; estimated from below when n <= 3 and omitted.
    #[arg(long)]
    pub cls: Option<f64>,
    /// Inverse absolute spectral gap; computed exactly when n <= 4 and omitted.
    #[arg(long)]
    pub inv_abs_gap: Option<f64>,
    #[arg(long, default_value_t = 20)]
    pub restarts: usize,
    #[arg(long, default_value_t = 2000)]
    pub iters: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct StatisticArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub t: u64,
    /// weight, trace or leading-rank.
    #[arg(long, default_value = "weight")]
    pub statistic: String,
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub lazy: bool,
}

#[derive(Subcommand, Debug)]
pub enum ProtocolCommand {
    /// Generate a public key and the secret move list.
    Keygen(KeygenArgs),
    /// Answer a challenge, honestly from the secret or by matvec from the public key.
    Prove(ProveArgs),
    /// Check a response against the public key and an operation deadline.
    Verify(VerifyArgs),
    /// Honest versus dishonest cost table.
    Report(ReportArgs),
}

#[derive(Args, Debug)]
pub struct KeygenArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub t: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub lazy: bool,
    #[arg(long)]
    pub public: PathBuf,
    #[arg(long)]
    pub secret: PathBuf,
}

#[derive(Args, Debug)]
pub struct ProveArgs {
    /// Challenge as a string of 0s and 1s.
    #[arg(long)]
    pub challenge: String,
    #[arg(long, required_unless_present = "dishonest")]
    pub secret: Option<PathBuf>,
    #[arg(long)]
    pub public: Option<PathBuf>,
    /// Answer from the public key only.
    #[arg(long, requires = "public")]
    pub dishonest: bool,
    /// Response file; stdout when omitted.
    #[arg(long)]
    pub response: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long)]
    pub public: PathBuf,
    #[arg(long)]
    pub challenge: String,
    #[arg(long)]
    pub response: PathBuf,
    /// Largest accepted bit-operation count.
    #[arg(long)]
    pub deadline: u64,
}

#[derive(Args, Debug)]
pub struct ReportArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<u64>,
    #[arg(long)]
    pub t: u64,
}

/// What a successful run concluded.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Success,
    Reject,
}

impl Outcome {
    pub fn exit_code(self) -> u8 {
        match self {
            Outcome::Success => 0,
            Outcome::Reject => 1,
        }
    }
}

const FLAG_KEYS: &[&str] = &["lazy", "dishonest"];

/// Appends `--key value` for every config-file entry whose flag is not
/// already present in `argv`.
pub fn expand_config(argv: Vec<String>) -> Result<Vec<String>> {
    let path = argv.iter().enumerate().find_map(|(i, a)| {
        if a == "--config" {
            argv.get(i + 1).cloned()
        } else {
            a.strip_prefix("--config=").map(str::to_string)
        }
    });
    let Some(path) = path else { return Ok(argv) };
    let text = fs::read_to_string(&path)?;
    let mut out = argv.clone();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Format(format!("{path}:{}: expected key=value", lineno + 1)))?;
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        let flag = format!("--{key}");
        let present = argv
            .iter()
            .any(|a| *a == flag || a.starts_with(&format!("{flag}=")));
        if present {
            continue;
        }
        if FLAG_KEYS.contains(&key.as_str()) {
            match value {
                "true" | "1" | "yes" => out.push(flag),
                "false" | "0" | "no" => {}
                other => {
                    return Err(Error::Format(format!(
                        "{path}: {key} expects a boolean, got {other:?}"
                    )))
                }
            }
        } else {
            out.push(format!("{flag}={value}"));
        }
    }
    Ok(out)
}

/// Parses, runs and reports; the process exit code.
pub fn run<I, S>(args: I) -> ExitCode
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv: Vec<String> = args.into_iter().map(Into::into).collect();
    let argv = match expand_config(argv) {
        Ok(a) => a,
        Err(e) => return fail(&e.to_string()),
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            return fail(
                msg.lines()
                    .next()
                    .unwrap_or("invalid arguments")
                    .trim_start_matches("error: "),
            );
        }
    };
    let echo = argv.iter().skip(1).cloned().collect::<Vec<_>>().join(" ");
    match execute(&cli, &echo) {
        Ok(outcome) => ExitCode::from(outcome.exit_code()),
        Err(e) => fail(&e.to_string()),
    }
}

fn fail(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

/// Runs a parsed command inside a pool of the requested size.
pub fn execute(cli: &Cli, echo: &str) -> Result<Outcome> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(k) = cli.threads {
        if k == 0 {
            return Err(Error::InvalidParameter(
                "--threads must be at least 1".into(),
            ));
        }
        builder = builder.num_threads(k);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidParameter(format!("cannot build thread pool: {e}")))?;
    pool.install(|| dispatch(&cli.command, echo))
}

fn dispatch(command: &Command, echo: &str) -> Result<Outcome> {
    match command {
        Command::Order(a) => order(a),
        Command::Walk(a) => walk(a),
        Command::Exact(a) => exact_cmd(a, echo),
        Command::Spectrum(a) => spectrum(a, echo),
        Command::Lsi(a) => lsi(a, echo),
        Command::Check(a) => check(a, echo),
        Command::Cutoff(a) => cutoff(a, echo),
        Command::Bounds(a) => bounds(a),
        Command::Statistic(a) => statistic(a),
        Command::Protocol(p) => match p {
            ProtocolCommand::Keygen(a) => keygen(a),
            ProtocolCommand::Prove(a) => prove(a),
            ProtocolCommand::Verify(a) => verify(a),
            ProtocolCommand::Report(a) => report(a),
        },
    }
}

/// Writes a CSV whose first lines echo the command and its resolved config.
pub fn write_csv<C: Debug>(
    path: &Path,
    echo: &str,
    config: &C,
    header: &str,
    rows: &[String],
) -> Result<()> {
    let mut text = String::new();
    writeln!(text, "# tvwalk {}", env!("CARGO_PKG_VERSION")).unwrap();
    writeln!(text, "# command: {echo}").unwrap();
    writeln!(text, "# config: {config:?}").unwrap();
    writeln!(text, "{header}").unwrap();
    for r in rows {
        writeln!(text, "{r}").unwrap();
    }
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, text)?;
    println!("wrote {}", path.display());
    Ok(())
}

/// Lines of a CSV file that are not `#` comments.
pub fn csv_body(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

fn order(a: &OrderArgs) -> Result<Outcome> {
    if a.n == 0 {
        return Err(Error::TooSmall(0));
    }
    match gf2::group_order(a.n) {
        Some(order) => println!("order = {order}"),
        None => println!(
            "log10(order) = {:.6}",
            gf2::ln_group_order(a.n) / std::f64::consts::LN_10
        ),
    }
    println!("ratio = {:.12}", gf2::invertible_fraction(a.n));
    println!("limit = {ORDER_RATIO_LIMIT:.12}");
    Ok(Outcome::Success)
}

fn walk(a: &WalkArgs) -> Result<Outcome> {
    let (traj, x) = chain::run(a.n, a.t, a.seed, a.lazy)?;
    println!("n = {}", a.n);
    println!("steps = {}", traj.len());
    println!("moves = {}", traj.move_count());
    println!("weight = {}", x.weight());
    println!("invertible = {}", x.is_invertible());
    if a.n <= 16 {
        println!("{x}");
    }
    if let Some(p) = &a.public {
        x.write_to(BufWriter::new(File::create(p)?))?;
    }
    if let Some(s) = &a.secret {
        traj.write_to(BufWriter::new(File::create(s)?))?;
    }
    Ok(Outcome::Success)
}

fn tables(n: usize) -> Result<(GroupTable, TransitionStructure)> {
    let gt = GroupTable::enumerate(n)?;
    let ts = TransitionStructure::build(&gt)?;
    Ok((gt, ts))
}

fn exact_cmd(a: &ExactArgs, echo: &str) -> Result<Outcome> {
    let (gt, ts) = tables(a.n)?;
    let lazy = a.lazy || ts.period() == 2;
    if lazy && !a.lazy {
        println!("note: the chain has period 2; using the lazy kernel (I + P)/2");
    }
    let kernel = if lazy { "lazy" } else { "plain" };
    let mt = exact::mixing_times(&ts, a.eps, lazy, exact::DEFAULT_MAX_T)?;
    println!("n = {}, |G| = {}, kernel = {kernel}", a.n, gt.len());
    println!("t_mix({}) = {}", a.eps, mt.tv);
    println!("t_mix^(2)({}) = {}", a.eps, mt.l2);
    if 2.0 * a.eps < 1.0 {
        let wide = exact::mixing_times(&ts, 2.0 * a.eps, lazy, exact::DEFAULT_MAX_T)?;
        println!("t_mix^(2)({}) = {}", 2.0 * a.eps, wide.l2);
        println!(
            "t_mix({}) <= t_mix^(2)({}): {}",
            a.eps,
            2.0 * a.eps,
            mt.tv <= wide.l2
        );
    }
    let t_max = a.t_max.unwrap_or(mt.tv.max(mt.l2));
    let rows: Vec<String> = exact::exact_curve(&ts, t_max, lazy)
        .iter()
        .map(|p| format!("{},{},{},{}", p.t, p.tv, p.l2, u8::from(lazy)))
        .collect();
    write_csv(
        &a.out.join("exact_curve.csv"),
        echo,
        a,
        "t,tv,l2,lazy_flag",
        &rows,
    )?;
    Ok(Outcome::Success)
}

fn spectrum(a: &SpectrumArgs, echo: &str) -> Result<Outcome> {
    let (gt, ts) = tables(a.n)?;
    let rep = exact::spectral_report(&ts)?;
    println!("n = {}, |G| = {}", a.n, gt.len());
    println!("lambda_2 = {}", rep.lambda_2);
    println!("lambda_min = {}", rep.lambda_min);
    println!("gap = {}", rep.gap);
    println!("absolute_gap = {}", rep.absolute_gap);
    println!("period = {}", rep.period);
    if !rep.full_spectrum {
        println!("note: extremal eigenvalues only (1, lambda_2, lambda_min)");
    }
    let k = funineq::kassabov_spectral_check(a.n, &rep);
    println!(
        "gap >= 1/(4(31 sqrt(n) + 700)^2) = {:e}: {}",
        k.lhs, k.satisfied
    );
    let rows: Vec<String> = rep
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(i, v)| format!("{i},{v}"))
        .collect();
    write_csv(
        &a.out.join("spectrum.csv"),
        echo,
        a,
        "index,eigenvalue",
        &rows,
    )?;
    Ok(Outcome::Success)
}

fn lsi_estimate(
    n: usize,
    restarts: usize,
    iters: usize,
    seed: u64,
) -> Result<(funineq::LsiEstimate, TransitionStructure)> {
    if n > 3 {
        return Err(Error::InvalidParameter(format!(
            "log-Sobolev estimation supports n <= 3, got {n}"
        )));
    }
    let (_, ts) = tables(n)?;
    Ok((
        funineq::estimate_lsi_constant(&ts, restarts, iters, seed)?,
        ts,
    ))
}

fn lsi(a: &LsiArgs, echo: &str) -> Result<Outcome> {
    let (est, _) = lsi_estimate(a.n, a.restarts, a.iters, a.seed)?;
    println!("best_ratio = {}", est.best_ratio);
    println!("two_over_gap = {}", est.two_over_gap);
    println!(
        "lower bound on the log-Sobolev constant = {}",
        est.lower_bound
    );
    let row = format!(
        "{},{},{},{}",
        a.n, a.restarts, est.best_ratio, est.two_over_gap
    );
    write_csv(
        &a.out.join("lsi.csv"),
        echo,
        a,
        "n,restarts,best_ratio,two_over_gap",
        &[row],
    )?;
    Ok(Outcome::Success)
}

fn check(a: &CheckArgs, echo: &str) -> Result<Outcome> {
    let suites: Vec<Suite> = if a.suite == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![Suite::parse(&a.suite)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown suite {:?}", a.suite)))?]
    };
    let mut results = Vec::new();
    for &suite in &suites {
        let dim = if suite == Suite::Hypercube { a.d } else { a.n };
        results.push(funineq::run_random_suite(suite, dim, a.trials, a.seed)?);
        results.push(funineq::run_adversarial_suite(suite, dim)?);
        if suite == Suite::Kassabov {
            let (_, ts) = tables(a.n)?;
            let r = funineq::kassabov_spectral_check(a.n, &exact::spectral_report(&ts)?);
            results.push(funineq::SuiteResult {
                check_name: "kassabov/spectral".into(),
                n: a.n,
                trials: 1,
                violations: u64::from(!r.satisfied),
                min_slack: r.slack,
            });
        }
    }
    let mut rows = Vec::new();
    let mut total = 0;
    for r in &results {
        println!(
            "{} (n={}, trials={}): violations = {}, min_slack = {:e}",
            r.check_name, r.n, r.trials, r.violations, r.min_slack
        );
        rows.push(format!(
            "{},{},{},{},{}",
            r.check_name, r.n, r.trials, r.violations, r.min_slack
        ));
        total += r.violations;
    }
    write_csv(
        &a.out.join("inequality_suite.csv"),
        echo,
        a,
        "check_name,n,trials,violations,min_slack",
        &rows,
    )?;
    Ok(if total == 0 {
        Outcome::Success
    } else {
        Outcome::Reject
    })
}

fn cutoff(a: &CutoffArgs, echo: &str) -> Result<Outcome> {
    let mut rows = Vec::new();
    let mut curves = Vec::new();
    for &n in &a.n {
        let grid = diagnostics::scaled_grid(n, a.lo, a.hi, a.points);
        let points = diagnostics::cutoff_experiment(n, &grid, a.trials, a.seed)?;
        for p in &points {
            rows.push(format!(
                "{n},1,{},{},{},{},{},{}",
                p.t, p.t_over_nlogn, p.tv.estimate, p.tv.noise_floor, a.trials, a.seed
            ));
        }
        let curve: Vec<(f64, f64)> = points
            .iter()
            .map(|p| (p.t_over_nlogn, p.tv.estimate))
            .collect();
        match diagnostics::crossover_locator(&curve, 0.5) {
            Ok(c) => println!(
                "n = {n}: TV crosses 1/2 at {c:.4} n ln n (noise floor {:.4})",
                points[0].tv.noise_floor
            ),
            Err(e) => println!("n = {n}: {e}"),
        }
        curves.push(curve);
    }
    for w in curves.windows(2) {
        println!(
            "sup distance between consecutive rescaled curves = {:.4}",
            diagnostics::sup_distance(&w[0], &w[1])
        );
    }
    write_csv(
        &a.out.join("cutoff.csv"),
        echo,
        a,
        "n,k,t,t_over_nlogn,tv_estimate,noise_floor,trials,seed",
        &rows,
    )?;
    Ok(Outcome::Success)
}

fn bounds(a: &BoundsArgs) -> Result<Outcome> {
    println!(
        "counting lower bound = {}",
        funineq::counting_lower_bound(a.n, a.eps)?
    );
    let inv_abs_gap = match a.inv_abs_gap {
        Some(g) => Some(g),
        None if a.n <= exact::TRANSITION_MAX_N => {
            let (_, ts) = tables(a.n)?;
            let rep = exact::spectral_report(&ts)?;
            if rep.absolute_gap > 0.0 {
                Some(1.0 / rep.absolute_gap)
            } else {
                println!("note: absolute gap is 0 (period 2); no upper bound for the plain chain");
                None
            }
        }
        None => None,
    };
    let cls = match a.cls {
        Some(c) => Some(c),
        None if a.n <= 3 => {
            let (est, _) = lsi_estimate(a.n, a.restarts, a.iters, a.seed)?;
            println!("log-Sobolev constant lower estimate = {}", est.lower_bound);
            Some(est.lower_bound)
        }
        None => None,
    };
    match (cls, inv_abs_gap) {
        (Some(c), Some(g)) => println!(
            "mixing upper bound = {}",
            funineq::mixing_bound(a.n, a.eps, c, g)?
        ),
        _ => println!("mixing upper bound needs --cls and --inv-abs-gap for this n"),
    }
    Ok(Outcome::Success)
}

fn statistic(a: &StatisticArgs) -> Result<Outcome> {
    let stat = Statistic::parse(&a.statistic)
        .ok_or_else(|| Error::InvalidParameter(format!("unknown statistic {:?}", a.statistic)))?;
    let est = diagnostics::statistic_tv(a.n, a.t, stat, a.trials, a.seed, a.lazy)?;
    println!("estimate = {}", est.estimate);
    println!("noise_floor = {}", est.noise_floor);
    Ok(Outcome::Success)
}

fn read_matrix(path: &Path) -> Result<BitMatrix> {
    BitMatrix::read_from(File::open(path)?)
}

fn read_trajectory(path: &Path) -> Result<Trajectory> {
    Trajectory::read_from(File::open(path)?)
}

fn parse_challenge(bits: &str) -> Result<Challenge> {
    Ok(Challenge {
        x: BitVector::parse_bit_string(bits)?,
    })
}

fn keygen(a: &KeygenArgs) -> Result<Outcome> {
    let kp = protocol::keygen_with(a.n, a.t, a.seed, a.lazy)?;
    kp.public
        .write_to(BufWriter::new(File::create(&a.public)?))?;
    kp.secret
        .write_to(BufWriter::new(File::create(&a.secret)?))?;
    println!("public key: {}", a.public.display());
    println!(
        "secret: {} ({} moves)",
        a.secret.display(),
        kp.secret.move_count()
    );
    Ok(Outcome::Success)
}

fn prove(a: &ProveArgs) -> Result<Outcome> {
    let c = parse_challenge(&a.challenge)?;
    let r = if a.dishonest {
        let public = read_matrix(a.public.as_deref().expect("clap requires --public"))?;
        protocol::respond_dishonest(&public, &c)?
    } else {
        let secret = read_trajectory(a.secret.as_deref().expect("clap requires --secret"))?;
        let public = match &a.public {
            Some(p) => read_matrix(p)?,
            None => secret.replay(),
        };
        protocol::respond_honest(&KeyPair::from_parts(public, secret)?, &c)?
    };
    match &a.response {
        Some(p) => fs::write(p, r.to_text())?,
        None => print!("{}", r.to_text()),
    }
    Ok(Outcome::Success)
}

fn verify(a: &VerifyArgs) -> Result<Outcome> {
    let public = read_matrix(&a.public)?;
    let c = parse_challenge(&a.challenge)?;
    let r = Response::from_text(&fs::read_to_string(&a.response)?)?;
    let v = protocol::verify(&public, &c, &r, a.deadline);
    match v {
        Verdict::Accept => println!("accept"),
        Verdict::WrongAnswer => println!("reject: wrong answer"),
        Verdict::TooSlow => println!(
            "reject: {} bit operations exceed the deadline {}",
            r.ops.bit_ops, a.deadline
        ),
    }
    Ok(if v.accepted() {
        Outcome::Success
    } else {
        Outcome::Reject
    })
}

fn report(a: &ReportArgs) -> Result<Outcome> {
    println!("n,honest_bit_ops,dishonest_bit_ops,dishonest_word_ops,ratio");
    for &n in &a.n {
        if a.t == 0 {
            return Err(Error::InvalidParameter("t must be positive".into()));
        }
        let r = protocol::separation_report(n, a.t);
        println!(
            "{},{},{},{},{}",
            r.n, r.honest_bit_ops, r.dishonest_bit_ops, r.dishonest_word_ops, r.ratio
        );
    }
    Ok(Outcome::Success)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(s: &str) -> Vec<String> {
        s.split_whitespace().map(str::to_string).collect()
    }

    #[test]
    fn limit_constant_matches_product() {
        assert!((gf2::invertible_fraction(40) - ORDER_RATIO_LIMIT).abs() < 1e-12);
    }

    #[test]
    fn config_fills_missing_flags_only() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("run.cfg");
        fs::write(&cfg, "# comment\nn = 3\neps=0.1\nlazy=true\nt_max=5\n").unwrap();
        let argv = args(&format!("tvwalk exact --n 2 --config {}", cfg.display()));
        let out = expand_config(argv).unwrap();
        assert!(out.contains(&"--eps=0.1".to_string()));
        assert!(out.contains(&"--lazy".to_string()));
        assert!(out.contains(&"--t-max=5".to_string()));
        assert!(!out.iter().any(|a| a == "--n=3"));
        let cli = Cli::try_parse_from(&out).unwrap();
        match cli.command {
            Command::Exact(e) => {
                assert_eq!(e.n, 2);
                assert_eq!(e.eps, 0.1);
                assert!(e.lazy);
                assert_eq!(e.t_max, Some(5));
            }
            other => panic!("parsed {other:?}"),
        }
    }

    #[test]
    fn config_rejects_garbage() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("bad.cfg");
        fs::write(&cfg, "lazy=maybe\n").unwrap();
        assert!(expand_config(args(&format!("tvwalk exact --config {}", cfg.display()))).is_err());
        fs::write(&cfg, "no equals sign\n").unwrap();
        assert!(expand_config(args(&format!("tvwalk exact --config {}", cfg.display()))).is_err());
    }

    #[test]
    fn csv_body_drops_comments() {
        assert_eq!(csv_body("# a\n# b\nx,y\n1,2\n"), vec!["x,y", "1,2"]);
    }
}
