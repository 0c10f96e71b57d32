//! Command line front end.
//!
//! Every file artifact starts with a `#`-comment header embedding the
//! invocation (with `--workers` and `--out` stripped, so reruns on different
//! machines produce identical bytes), the master seed, a hash of the
//! resolved configuration, and a hash of the body that follows. Nothing is
//! written until the whole run has succeeded.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::design::{design, RippleTarget};
use crate::dist::{load_distribution, save_distribution, DegreeDistribution};
use crate::error::{Error, Result};
use crate::release::{redundancy_surface, release_prob};
use crate::rng::DEFAULT_SEED;
use crate::sim::{
    ripple_trajectory, run_experiment, sha256_hex, sweep, DistributionSource, ExperimentConfig,
    SweepFamily, DEFAULT_CAP_MULTIPLIER,
};
use crate::walk::{walk_biased, walk_symmetric, BarrierPolicy, WalkConfig};

const OUT_DIR_ENV: &str = "LT_RIPPLE_OUT_DIR";
const WORKERS_ENV: &str = "LT_RIPPLE_WORKERS";

#[derive(Parser)]
#[command(
    name = "lt-ripple",
    version,
    about = "LT fountain codes with ripple-targeted degree design",
    after_help = "Output directory comes from --out or LT_RIPPLE_OUT_DIR; \
                  worker count from --workers or LT_RIPPLE_WORKERS."
)]
struct Cli {
    /// Master seed for every random stream (default 0xC0DE5EED).
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Cap on parallel workers (default: one per core).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Stdout rendering; file artifacts are always CSV.
    #[arg(long, global = true, value_enum, default_value_t = StdoutFormat::Text)]
    format: StdoutFormat,
    /// Directory for file artifacts.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StdoutFormat {
    Text,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Design a degree distribution for a ripple target and write it as
    /// JSON with a .meta sidecar.
    Design(DesignArgs),
    /// Tabulate release probabilities or the redundancy surface.
    Analyze(AnalyzeArgs),
    /// Monte Carlo decoding: overhead, error rates, ripple trajectory.
    Simulate(SimulateArgs),
    /// Grid of experiments over a two-parameter family.
    Sweep(SweepArgs),
    /// Random-walk models of the ripple and their power-law fits.
    Walk(WalkArgs),
    /// Inspect a saved distribution file.
    Info(InfoArgs),
}

#[derive(Args)]
struct DesignArgs {
    #[arg(long)]
    k: usize,
    /// Ripple target scale in R(L) = c1 L^(1/c2).
    #[arg(long)]
    c1: f64,
    /// Ripple target exponent.
    #[arg(long)]
    c2: f64,
    /// Artifact stem (default design_k<k>).
    #[arg(long)]
    name: Option<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Figure {
    /// Release probability against remaining inputs, per degree.
    Release,
    /// Redundancy probability against constant ripple size, per degree.
    Redundancy,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long)]
    k: usize,
    #[arg(long, value_enum)]
    fig: Figure,
    /// Degrees to tabulate.
    #[arg(long, default_value = "1,2,3,4,5,10,20")]
    degrees: String,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    k: usize,
    /// ideal | rsd:<c>,<delta> | designed:<c1>,<c2> | file:<path>
    #[arg(long)]
    source: String,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    /// Failure cap as a multiple of k.
    #[arg(long, default_value_t = DEFAULT_CAP_MULTIPLIER)]
    cap_mult: f64,
    /// Overhead grid (range or list; default 0:0.5:0.01).
    #[arg(long)]
    grid: Option<String>,
    /// Also decode in batch mode with this many symbols (or "auto" for the
    /// designed expectation) and record the mean ripple trajectory.
    #[arg(long)]
    trajectory: Option<String>,
    /// Artifact stem (default simulate_k<k>).
    #[arg(long)]
    name: Option<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    Designed,
    Rsd,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    k: usize,
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// First axis: start:stop:step or comma list.
    #[arg(long)]
    axis1: Option<String>,
    /// Second axis: start:stop:step or comma list.
    #[arg(long)]
    axis2: Option<String>,
    /// First axis of the designed family (same as --axis1).
    #[arg(long, conflicts_with = "axis1")]
    c1: Option<String>,
    /// Second axis of the designed family (same as --axis2).
    #[arg(long, conflicts_with = "axis2")]
    c2: Option<String>,
    /// First axis of the rsd family (same as --axis1).
    #[arg(long, conflicts_with_all = ["axis1", "c1"])]
    c: Option<String>,
    /// Second axis of the rsd family (same as --axis2).
    #[arg(long, conflicts_with_all = ["axis2", "c2"])]
    delta: Option<String>,
    #[arg(long, default_value_t = 500)]
    trials: usize,
}

impl SweepArgs {
    fn axes(&self) -> Result<(&str, &str)> {
        let first = self.axis1.as_deref().or(self.c1.as_deref()).or(self.c.as_deref());
        let second = self.axis2.as_deref().or(self.c2.as_deref()).or(self.delta.as_deref());
        match (first, second) {
            (Some(a), Some(b)) => Ok((a, b)),
            _ => Err(Error::InvalidParameter(
                "sweep needs both axes: --axis1/--axis2 (or --c1/--c2, --c/--delta)".into(),
            )),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum WalkModel {
    Symmetric,
    Biased,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BarrierArg {
    None,
    Absorb,
    Clamp,
}

#[derive(Args)]
struct WalkArgs {
    #[arg(long)]
    k: usize,
    #[arg(long, value_enum)]
    model: WalkModel,
    #[arg(long, default_value_t = 10000)]
    trials: usize,
    /// Starting ripple size (default ceil(sqrt(k))).
    #[arg(long)]
    r0: Option<usize>,
    /// Boundary handling at zero (biased model).
    #[arg(long, value_enum, default_value_t = BarrierArg::Clamp)]
    barrier: BarrierArg,
}

#[derive(Args)]
struct InfoArgs {
    /// Saved distribution JSON.
    #[arg(long)]
    dist: PathBuf,
}

/// Entry point shared by the binary and the tests. `argv[0]` is the program
/// name.
pub fn run(argv: &[String]) -> Result<()> {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e)
            if e.kind() == clap::error::ErrorKind::DisplayHelp
                || e.kind() == clap::error::ErrorKind::DisplayVersion =>
        {
            print!("{e}");
            return Ok(());
        }
        Err(e) => {
            let line = e
                .to_string()
                .lines()
                .next()
                .unwrap_or("bad arguments")
                .trim_start_matches("error: ")
                .to_string();
            return Err(Error::InvalidParameter(line));
        }
    };
    init_workers(cli.workers)?;
    let invocation = canonical_invocation(argv);
    let ctx = Ctx {
        seed: cli.seed,
        format: cli.format,
        out: cli.out.clone(),
        invocation,
    };
    match &cli.cmd {
        Command::Design(a) => cmd_design(&ctx, a),
        Command::Analyze(a) => cmd_analyze(&ctx, a),
        Command::Simulate(a) => cmd_simulate(&ctx, a),
        Command::Sweep(a) => cmd_sweep(&ctx, a),
        Command::Walk(a) => cmd_walk(&ctx, a),
        Command::Info(a) => cmd_info(&ctx, a),
    }
}

struct Ctx {
    seed: u64,
    format: StdoutFormat,
    out: Option<PathBuf>,
    invocation: String,
}

impl Ctx {
    /// Resolved output directory; commands that write artifacts call this
    /// before doing any work.
    fn out_dir(&self) -> Result<PathBuf> {
        if let Some(dir) = &self.out {
            return Ok(dir.clone());
        }
        if let Ok(dir) = std::env::var(OUT_DIR_ENV) {
            if !dir.is_empty() {
                return Ok(PathBuf::from(dir));
            }
        }
        Err(Error::InvalidParameter(format!(
            "this command writes files; pass --out or set {OUT_DIR_ENV}"
        )))
    }
}

fn init_workers(flag: Option<usize>) -> Result<()> {
    let n = match flag {
        Some(n) => Some(n),
        None => match std::env::var(WORKERS_ENV) {
            Ok(s) if !s.is_empty() => Some(s.parse::<usize>().map_err(|_| {
                Error::InvalidParameter(format!("{WORKERS_ENV} must be a positive integer"))
            })?),
            _ => None,
        },
    };
    if let Some(n) = n {
        if n == 0 {
            return Err(Error::InvalidParameter("workers must be >= 1".into()));
        }
        // a second initialization in the same process is harmless: results
        // never depend on the worker count
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

/// The invocation embedded in artifact headers: program name plus arguments,
/// minus --workers/--out (and values), which affect scheduling and
/// destination but never content.
fn canonical_invocation(argv: &[String]) -> String {
    let mut parts = vec!["lt-ripple".to_string()];
    let mut it = argv.iter().skip(1).peekable();
    while let Some(arg) = it.next() {
        if arg == "--workers" || arg == "--out" {
            it.next();
            continue;
        }
        if arg.starts_with("--workers=") || arg.starts_with("--out=") {
            continue;
        }
        parts.push(arg.clone());
    }
    parts.join(" ")
}

/// start:stop:step (stop inclusive within half a step) or a comma list or a
/// single number.
fn parse_axis(spec: &str) -> Result<Vec<f64>> {
    let bad = |what: &str| Error::InvalidParameter(format!("bad axis value in {what:?}"));
    let vals = if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::InvalidParameter(format!(
                "range must be start:stop:step, got {spec:?}"
            )));
        }
        let start: f64 = parts[0].parse().map_err(|_| bad(spec))?;
        let stop: f64 = parts[1].parse().map_err(|_| bad(spec))?;
        let step: f64 = parts[2].parse().map_err(|_| bad(spec))?;
        if !(step > 0.0) || stop < start {
            return Err(Error::InvalidParameter(format!(
                "range needs stop >= start and step > 0, got {spec:?}"
            )));
        }
        let mut vals = Vec::new();
        let mut i = 0u32;
        loop {
            let v = start + f64::from(i) * step;
            if v > stop + step / 2.0 {
                break;
            }
            vals.push(v);
            i += 1;
        }
        vals
    } else {
        spec.split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|_| bad(spec)))
            .collect::<Result<Vec<f64>>>()?
    };
    if vals.is_empty() || vals.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(format!("empty or non-finite axis {spec:?}")));
    }
    Ok(vals)
}

fn parse_degrees(spec: &str) -> Result<Vec<usize>> {
    let degrees: Vec<usize> = spec
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidParameter(format!("bad degree list {spec:?}")))
        })
        .collect::<Result<_>>()?;
    if degrees.is_empty() || degrees.contains(&0) {
        return Err(Error::InvalidParameter("degrees must be positive".into()));
    }
    Ok(degrees)
}

/// ideal | rsd:<c>,<delta> | designed:<c1>,<c2> | file:<path>
fn parse_source(spec: &str) -> Result<DistributionSource> {
    if spec == "ideal" {
        return Ok(DistributionSource::Ideal);
    }
    if let Some(rest) = spec.strip_prefix("rsd:") {
        let (c, delta) = parse_pair(rest, spec)?;
        return Ok(DistributionSource::Robust { c, delta });
    }
    if let Some(rest) = spec.strip_prefix("designed:") {
        let (c1, c2) = parse_pair(rest, spec)?;
        return Ok(DistributionSource::Designed { c1, c2 });
    }
    if let Some(path) = spec.strip_prefix("file:") {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(std::io::Error::other(format!("reading {path}: {e}"))))?;
        return Ok(DistributionSource::Custom(load_distribution(&text)?));
    }
    Err(Error::InvalidParameter(format!(
        "unknown source {spec:?}; expected ideal, rsd:c,delta, designed:c1,c2, or file:path"
    )))
}

fn parse_pair(rest: &str, spec: &str) -> Result<(f64, f64)> {
    let parts: Vec<&str> = rest.split(',').collect();
    if parts.len() == 2 {
        if let (Ok(a), Ok(b)) = (parts[0].trim().parse(), parts[1].trim().parse()) {
            return Ok((a, b));
        }
    }
    Err(Error::InvalidParameter(format!(
        "source {spec:?} needs two comma-separated numbers"
    )))
}

/// A fully rendered artifact: header comments plus body, hashed before
/// anything touches the filesystem.
struct Artifact {
    file_name: String,
    bytes: String,
}

fn render_artifact(ctx: &Ctx, file_name: &str, config: &str, body: &str) -> Artifact {
    let content_sha256 = sha256_hex(body.as_bytes());
    let config_sha256 = sha256_hex(config.as_bytes());
    let mut bytes = String::with_capacity(body.len() + 256);
    let _ = writeln!(bytes, "# invocation: {}", ctx.invocation);
    let _ = writeln!(bytes, "# seed: {}", ctx.seed);
    let _ = writeln!(bytes, "# config_sha256: {config_sha256}");
    let _ = writeln!(bytes, "# content_sha256: {content_sha256}");
    bytes.push_str(body);
    Artifact {
        file_name: file_name.to_string(),
        bytes,
    }
}

fn write_artifacts(dir: &Path, artifacts: &[Artifact]) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)
        .map_err(|e| Error::Io(std::io::Error::other(format!("creating {}: {e}", dir.display()))))?;
    let mut paths = Vec::with_capacity(artifacts.len());
    for a in artifacts {
        let path = dir.join(&a.file_name);
        std::fs::write(&path, a.bytes.as_bytes())
            .map_err(|e| Error::Io(std::io::Error::other(format!("writing {}: {e}", path.display()))))?;
        paths.push(path);
    }
    Ok(paths)
}

fn print_written(paths: &[PathBuf]) {
    for p in paths {
        println!("wrote {}", p.display());
    }
}

fn sanitize_stem(name: &str) -> Result<String> {
    if name.is_empty()
        || name.starts_with('.')
        || !name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '.')
    {
        return Err(Error::InvalidParameter(format!(
            "artifact name {name:?} may only use alphanumerics, '_', '-', '.' and must not start with '.'"
        )));
    }
    Ok(name.to_string())
}

fn cmd_design(ctx: &Ctx, a: &DesignArgs) -> Result<()> {
    let dir = ctx.out_dir()?;
    let stem = sanitize_stem(&a.name.clone().unwrap_or_else(|| format!("design_k{}", a.k)))?;
    let target = RippleTarget::new(a.k, a.c1, a.c2)?;
    let sol = design(&target)?;
    let config = format!("design;k={};c1={:?};c2={:?}", a.k, a.c1, a.c2);
    let dist_json = save_distribution(&sol.distribution);
    let dist_sha256 = sha256_hex(dist_json.as_bytes());
    let meta = format!(
        concat!(
            "{{\n",
            "  \"invocation\": \"{}\",\n",
            "  \"seed\": {},\n",
            "  \"config_sha256\": \"{}\",\n",
            "  \"content_sha256\": \"{}\",\n",
            "  \"k\": {},\n",
            "  \"c1\": {:?},\n",
            "  \"c2\": {:?},\n",
            "  \"n_expected\": {:?},\n",
            "  \"residual_sq_norm\": {:?},\n",
            "  \"support_len\": {}\n",
            "}}\n"
        ),
        ctx.invocation,
        ctx.seed,
        sha256_hex(config.as_bytes()),
        dist_sha256,
        a.k,
        a.c1,
        a.c2,
        sol.n_expected,
        sol.residual_sq_norm,
        sol.distribution.support_len(),
    );
    let artifacts = [
        Artifact {
            file_name: format!("{stem}.json"),
            bytes: dist_json,
        },
        Artifact {
            file_name: format!("{stem}.json.meta"),
            bytes: meta,
        },
    ];
    let paths = write_artifacts(&dir, &artifacts)?;
    match ctx.format {
        StdoutFormat::Text => {
            println!(
                "designed k={} c1={} c2={}: {} support degrees, n_expected {:.3}, residual^2 {:.6}",
                a.k,
                a.c1,
                a.c2,
                sol.distribution.support_len(),
                sol.n_expected,
                sol.residual_sq_norm
            );
        }
        StdoutFormat::Csv => {
            println!("degree,probability");
            for (d, p) in sol.distribution.support() {
                println!("{d},{p:?}");
            }
        }
    }
    print_written(&paths);
    Ok(())
}

fn cmd_analyze(ctx: &Ctx, a: &AnalyzeArgs) -> Result<()> {
    let dir = ctx.out_dir()?;
    let degrees = parse_degrees(&a.degrees)?;
    if a.k < 2 {
        return Err(Error::InvalidParameter("analyze needs k >= 2".into()));
    }
    let artifact = match a.fig {
        Figure::Release => {
            let config = format!("analyze;k={};fig=release;degrees={:?}", a.k, degrees);
            let mut body = String::from("degree,remaining,release_prob\n");
            for &d in &degrees {
                if d > a.k {
                    return Err(Error::InvalidParameter(format!(
                        "degree {d} exceeds k = {}",
                        a.k
                    )));
                }
                for l in 1..=a.k {
                    let _ = writeln!(body, "{d},{l},{:?}", release_prob(a.k, d, l));
                }
            }
            render_artifact(ctx, &format!("release_k{}.csv", a.k), &config, &body)
        }
        Figure::Redundancy => {
            let config = format!("analyze;k={};fig=redundancy;degrees={:?}", a.k, degrees);
            let surface = redundancy_surface(a.k)?;
            let mut body = String::from("degree,ripple,redundancy\n");
            for (d, r, v) in surface.cells() {
                if degrees.contains(&d) {
                    let _ = writeln!(body, "{d},{r},{v:?}");
                }
            }
            if body.lines().count() <= 1 {
                return Err(Error::InvalidParameter(
                    "no admissible cells for those degrees (degree 1 never becomes redundant)"
                        .into(),
                ));
            }
            render_artifact(ctx, &format!("redundancy_k{}.csv", a.k), &config, &body)
        }
    };
    let paths = write_artifacts(&dir, std::slice::from_ref(&artifact))?;
    if ctx.format == StdoutFormat::Text {
        println!("tabulated {} rows", artifact.bytes.lines().count() - 5);
    }
    print_written(&paths);
    Ok(())
}

fn cmd_simulate(ctx: &Ctx, a: &SimulateArgs) -> Result<()> {
    let dir = ctx.out_dir()?;
    let stem = sanitize_stem(&a.name.clone().unwrap_or_else(|| format!("simulate_k{}", a.k)))?;
    let source = parse_source(&a.source)?;
    let mut cfg = ExperimentConfig::new(a.k, source, a.trials, ctx.seed);
    cfg.cap_multiplier = a.cap_mult;
    if let Some(grid) = &a.grid {
        cfg.overhead_grid = parse_axis(grid)?;
    }
    cfg.validate()?;
    let trajectory = match a.trajectory.as_deref() {
        None => None,
        Some("auto") => Some(None),
        Some(n) => Some(Some(n.parse::<usize>().map_err(|_| {
            Error::InvalidParameter(format!("trajectory must be a count or \"auto\", got {n:?}"))
        })?)),
    };
    let config = format!(
        "simulate;digest={};trajectory={:?}",
        cfg.digest(),
        a.trajectory
    );
    let res = run_experiment(&cfg)?;

    let mut summary = String::from("metric,value\n");
    let fmt_opt = |v: Option<f64>| v.map_or(String::new(), |v| format!("{v:?}"));
    let _ = writeln!(summary, "k,{}", res.k);
    let _ = writeln!(summary, "trials,{}", res.trials);
    let _ = writeln!(summary, "avg_overhead,{}", fmt_opt(res.avg_overhead));
    let _ = writeln!(summary, "overhead_std_err,{}", fmt_opt(res.overhead_std_err));
    let _ = writeln!(summary, "failures,{}", res.failures);
    let _ = writeln!(summary, "redundant_total,{}", res.redundant_total);

    let mut ber = String::from("alpha,ber\n");
    for &(alpha, rate) in &res.ber {
        let _ = writeln!(ber, "{alpha:?},{rate:?}");
    }

    let mut ripple = String::from("remaining,mean_ripple\n");
    for (l, m) in res.mean_ripple.iter().enumerate().rev() {
        let _ = writeln!(ripple, "{l},{m:?}");
    }

    let mut artifacts = vec![
        render_artifact(ctx, &format!("{stem}_summary.csv"), &config, &summary),
        render_artifact(ctx, &format!("{stem}_ber.csv"), &config, &ber),
        render_artifact(ctx, &format!("{stem}_ripple.csv"), &config, &ripple),
    ];
    if let Some(n_override) = trajectory {
        let traj = ripple_trajectory(&cfg, n_override)?;
        let mut body = String::from("remaining,mean_ripple,target,reached\n");
        for l in (0..=traj.k).rev() {
            let target = traj
                .target
                .as_ref()
                .map_or(String::new(), |t| format!("{:?}", t[l]));
            let _ = writeln!(
                body,
                "{l},{:?},{target},{}",
                traj.mean_ripple[l], traj.reached[l]
            );
        }
        artifacts.push(render_artifact(
            ctx,
            &format!("{stem}_trajectory.csv"),
            &config,
            &body,
        ));
    }
    let paths = write_artifacts(&dir, &artifacts)?;
    if ctx.format == StdoutFormat::Text {
        match (res.avg_overhead, res.overhead_std_err) {
            (Some(avg), Some(se)) => println!(
                "avg_overhead {avg:.4} (se {se:.4}), {} failures / {} trials",
                res.failures, res.trials
            ),
            _ => println!("no successful trials out of {}", res.trials),
        }
    } else {
        print!("{summary}");
    }
    print_written(&paths);
    Ok(())
}

fn cmd_sweep(ctx: &Ctx, a: &SweepArgs) -> Result<()> {
    let dir = ctx.out_dir()?;
    let (spec1, spec2) = a.axes()?;
    let axis1 = parse_axis(spec1)?;
    let axis2 = parse_axis(spec2)?;
    let family = match a.family {
        FamilyArg::Designed => SweepFamily::Designed,
        FamilyArg::Rsd => SweepFamily::Robust,
    };
    if a.trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    let res = sweep(a.k, family, &axis1, &axis2, a.trials, ctx.seed)?;
    let (n1, n2) = family.axis_names();
    let config = format!(
        "sweep;k={};family={n1},{n2};axis1={axis1:?};axis2={axis2:?};trials={};seed={}",
        a.k, a.trials, ctx.seed
    );
    // matrix: rows are axis1, columns axis2, cells are average overhead
    let mut body = String::new();
    let _ = write!(body, "{n1}\\{n2}");
    for v in &res.axis2 {
        let _ = write!(body, ",{v:?}");
    }
    body.push('\n');
    for (i, v1) in res.axis1.iter().enumerate() {
        let _ = write!(body, "{v1:?}");
        for j in 0..res.axis2.len() {
            match res.avg_overhead[i][j] {
                Some(o) => {
                    let _ = write!(body, ",{o:?}");
                }
                None => body.push(','),
            }
        }
        body.push('\n');
    }
    let name = format!(
        "sweep_k{}_{}.csv",
        a.k,
        match a.family {
            FamilyArg::Designed => "designed",
            FamilyArg::Rsd => "rsd",
        }
    );
    let artifact = render_artifact(ctx, &name, &config, &body);
    let paths = write_artifacts(&dir, std::slice::from_ref(&artifact))?;
    if ctx.format == StdoutFormat::Text {
        match res.argmin {
            Some((i, j)) => println!(
                "best cell {n1}={} {n2}={}: avg_overhead {:.4}",
                res.axis1[i],
                res.axis2[j],
                res.avg_overhead[i][j].unwrap()
            ),
            None => println!("no cell produced a successful decode"),
        }
        for (i, j, e) in &res.cell_errors {
            println!("cell {n1}={} {n2}={} failed: {e}", res.axis1[*i], res.axis2[*j]);
        }
    } else {
        print!("{body}");
    }
    print_written(&paths);
    Ok(())
}

fn cmd_walk(ctx: &Ctx, a: &WalkArgs) -> Result<()> {
    let dir = ctx.out_dir()?;
    let barrier = match a.barrier {
        BarrierArg::None => BarrierPolicy::None,
        BarrierArg::Absorb => BarrierPolicy::AbsorbAtZero,
        BarrierArg::Clamp => BarrierPolicy::Clamp,
    };
    let artifact = match a.model {
        WalkModel::Symmetric => {
            let cfg = WalkConfig::new(a.k, 1, BarrierPolicy::None, a.trials)?;
            let config = format!("walk;model=symmetric;k={};trials={}", a.k, a.trials);
            let walk = walk_symmetric(&cfg, ctx.seed)?;
            let mut body = String::from("steps,rms_empirical,rms_theory\n");
            for (i, rms) in walk.rms_by_steps.iter().enumerate() {
                let n = i + 1;
                let _ = writeln!(body, "{n},{rms:?},{:?}", (n as f64).sqrt());
            }
            render_artifact(ctx, &format!("walk_symmetric_{}steps.csv", a.k), &config, &body)
        }
        WalkModel::Biased => {
            let cfg = match a.r0 {
                Some(r0) => WalkConfig::new(a.k, r0, barrier, a.trials)?,
                None => {
                    let mut cfg = WalkConfig::with_defaults(a.k, a.trials)?;
                    cfg.barrier = barrier;
                    cfg
                }
            };
            let config = format!(
                "walk;model=biased;k={};r0={};barrier={:?};trials={}",
                cfg.k, cfg.r0, cfg.barrier, cfg.trials
            );
            let walk = walk_biased(&cfg, ctx.seed)?;
            let fit = walk.fit_default()?;
            let mut body = String::new();
            let _ = writeln!(
                body,
                "# fit: c1={:?} c2={:?} residual_sq={:?}",
                fit.c1, fit.c2, fit.residual_sq
            );
            body.push_str("remaining,rms_delta,fit\n");
            for (l, rms) in walk.rms_points() {
                let _ = writeln!(body, "{l},{rms:?},{:?}", fit.c1 * l.powf(1.0 / fit.c2));
            }
            if ctx.format == StdoutFormat::Text {
                println!(
                    "fit: rms displacement ~ {:.4} L^(1/{:.4}), residual_sq {:.5}",
                    fit.c1, fit.c2, fit.residual_sq
                );
            }
            render_artifact(ctx, &format!("walk_biased_k{}.csv", cfg.k), &config, &body)
        }
    };
    let paths = write_artifacts(&dir, std::slice::from_ref(&artifact))?;
    print_written(&paths);
    Ok(())
}

fn cmd_info(ctx: &Ctx, a: &InfoArgs) -> Result<()> {
    let text = std::fs::read_to_string(&a.dist)
        .map_err(|e| Error::Io(std::io::Error::other(format!("reading {}: {e}", a.dist.display()))))?;
    let dist: DegreeDistribution = load_distribution(&text)?;
    let file_sha = sha256_hex(text.as_bytes());
    let sum: f64 = dist.masses().iter().sum();
    match ctx.format {
        StdoutFormat::Text => {
            println!("k: {}", dist.k());
            println!("support degrees: {}", dist.support_len());
            println!("max degree: {}", dist.max_degree());
            println!("mean degree: {:.6}", dist.mean_degree());
            println!("omega(1): {:.6}", dist.mass(1));
            println!("omega(2): {:.6}", dist.mass(2));
            println!("mass total: {:.12}", sum);
            println!("sha256: {file_sha}");
        }
        StdoutFormat::Csv => {
            println!("key,value");
            println!("k,{}", dist.k());
            println!("support_len,{}", dist.support_len());
            println!("max_degree,{}", dist.max_degree());
            println!("mean_degree,{:?}", dist.mean_degree());
            println!("omega1,{:?}", dist.mass(1));
            println!("omega2,{:?}", dist.mass(2));
            println!("mass_total,{sum:?}");
            println!("sha256,{file_sha}");
        }
    }
    Ok(())
}
