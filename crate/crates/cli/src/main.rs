use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use squarepack::{
    account, cover_square, cover_type1, cover_type2, cover_type3, fit_slope, max_slant, pack_square, pack_type1,
    pack_type2, pack_type3, render_svg, run_series, to_csv, verify, verify_covering, verify_packing, BuildError, Mode,
    PackConfig, Plan, Region, RenderOptions, Type1Spec, Type2Spec, Type3Spec, VerifyReport, WasteReport,
};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "squarepack",
    version,
    about = "Pack or cover large squares with unit squares"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a packing plan and account for its waste.
    Pack(BuildArgs),
    /// Build a covering plan and account for its excess.
    Cover(BuildArgs),
    /// Check a plan file geometrically.
    Verify(VerifyArgs),
    /// Draw a plan file as SVG.
    Render(RenderArgs),
    /// Waste over several sizes with a log-log slope fit.
    Series(SeriesArgs),
}

#[derive(Args, Clone)]
struct Common {
    /// TOML file with construction and verification settings.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<u64>,
    /// Most squares enumerated for verification or drawing.
    #[arg(long)]
    limit: Option<u64>,
    #[arg(long)]
    base_cutoff: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Shape {
    Square,
    T1,
    T2,
    T3,
}

#[derive(Args)]
struct BuildArgs {
    /// Side length (the scale of the region).
    #[arg(long)]
    x: f64,
    #[arg(long, value_enum, default_value = "square")]
    kind: Shape,
    /// Other side of a t1 rectangle; defaults to x.
    #[arg(long)]
    width: Option<f64>,
    /// Slant of t2/t3 trapezoids as a fraction of the largest allowed.
    #[arg(long, default_value_t = 1.0)]
    slant: f64,
    /// Where to write the plan JSON.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Where to write the report JSON; it is always printed.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Also enumerate the plan and check it geometrically.
    #[arg(long)]
    verify: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct VerifyArgs {
    plan: PathBuf,
    /// Check against the square of this side instead of the plan's region.
    #[arg(long)]
    x: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct RenderArgs {
    plan: PathBuf,
    /// SVG path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Draw the region tree only.
    #[arg(long)]
    outline_only: bool,
    #[arg(long, default_value_t = 1000.0)]
    width: f64,
    #[command(flatten)]
    common: Common,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Pack,
    Cover,
}

#[derive(Args)]
struct SeriesArgs {
    /// Sizes, repeated or comma separated; at least three.
    #[arg(long, required = true, value_delimiter = ',')]
    x: Vec<f64>,
    #[arg(long, value_enum, default_value = "pack")]
    kind: Kind,
    /// CSV path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Verify rows whose plans are within the limit.
    #[arg(long)]
    enumerate: bool,
    #[command(flatten)]
    common: Common,
}

/// Exit 1 for a failed check, 2 for bad input.
enum Failure {
    Usage(anyhow::Error),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

fn usage(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Usage(e.into())
}

type Outcome = Result<bool, Failure>;

fn config(c: &Common) -> Result<PackConfig, Failure> {
    let mut cfg = match &c.config {
        Some(p) => {
            let s = std::fs::read_to_string(p)
                .with_context(|| format!("reading {}", p.display()))
                .map_err(usage)?;
            toml::from_str(&s)
                .with_context(|| format!("parsing {}", p.display()))
                .map_err(usage)?
        }
        None => PackConfig::default(),
    };
    if let Some(v) = c.seed {
        cfg.seed = v;
    }
    if let Some(v) = c.samples {
        cfg.samples = v;
    }
    if let Some(v) = c.limit {
        cfg.limit = v;
    }
    if let Some(v) = c.base_cutoff {
        if !(v.is_finite() && v >= 1.0) {
            return Err(usage(anyhow!("--base-cutoff must be at least 1")));
        }
        cfg.base_cutoff = v;
    }
    Ok(cfg)
}

/// Writes through a temporary file in the same directory, then renames.
/// Devices and pipes are written directly.
fn write_atomic(path: &Path, data: &[u8]) -> anyhow::Result<()> {
    if std::fs::metadata(path).is_ok_and(|m| !m.is_file() && !m.is_dir()) {
        return std::fs::write(path, data).with_context(|| format!("writing {}", path.display()));
    }
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp =
        tempfile::NamedTempFile::new_in(dir).with_context(|| format!("creating file in {}", dir.display()))?;
    tmp.write_all(data)?;
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        tmp.as_file().set_permissions(std::fs::Permissions::from_mode(0o644))?;
    }
    tmp.persist(path)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn emit(path: Option<&Path>, data: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => write_atomic(p, data.as_bytes()),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(data.as_bytes())?;
            Ok(out.flush()?)
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> anyhow::Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

fn read_plan(path: &Path) -> Result<Plan, Failure> {
    let s = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(usage)?;
    Plan::from_json(&s)
        .with_context(|| format!("parsing {}", path.display()))
        .map_err(usage)
}

fn build(args: &BuildArgs, mode: Mode, cfg: &PackConfig) -> Result<Plan, BuildError> {
    let x = args.x;
    let theta = args.slant * max_slant(x);
    match (args.kind, mode) {
        (Shape::Square, Mode::Pack) => pack_square(x, cfg),
        (Shape::Square, Mode::Cover) => cover_square(x, cfg),
        (Shape::T1, _) => {
            let mut spec = Type1Spec::new(x, args.width.unwrap_or(x));
            spec.c = cfg.c;
            match mode {
                Mode::Pack => pack_type1(&spec, cfg),
                Mode::Cover => cover_type1(&spec, cfg),
            }
        }
        (Shape::T2, _) => {
            let spec = Type2Spec {
                x,
                top: 2.0 * x.sqrt(),
                theta,
            };
            match mode {
                Mode::Pack => pack_type2(&spec, cfg),
                Mode::Cover => cover_type2(&spec, cfg),
            }
        }
        (Shape::T3, _) => {
            let spec = Type3Spec::new(x, 0.5 * x.sqrt(), theta, mode);
            match mode {
                Mode::Pack => pack_type3(&spec, cfg),
                Mode::Cover => cover_type3(&spec, cfg),
            }
        }
    }
}

#[derive(Serialize)]
struct BuildReport {
    accounting: WasteReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    verification: Option<VerifyReport>,
}

fn cmd_build(args: BuildArgs, mode: Mode) -> Outcome {
    if !(args.x.is_finite() && args.x >= 1.0) {
        return Err(usage(anyhow!(
            "--x must be a finite number of at least 1, got {}",
            args.x
        )));
    }
    let cfg = config(&args.common)?;
    let plan = build(&args, mode, &cfg).map_err(|e| match e {
        BuildError::Spec(_) => usage(e),
        _ => Failure::Runtime(e.into()),
    })?;
    let accounting = account(&plan).map_err(anyhow::Error::from)?;
    let verification = if args.verify {
        Some(verify(&plan, &cfg).map_err(anyhow::Error::from)?)
    } else {
        None
    };
    let passed = accounting.passed && verification.as_ref().is_none_or(|v| v.passed);
    if let Some(p) = &args.out {
        write_atomic(p, plan.to_json().map_err(anyhow::Error::from)?.as_bytes())?;
    }
    let report = to_json(&BuildReport {
        accounting,
        verification,
    })?;
    if let Some(p) = &args.report {
        write_atomic(p, report.as_bytes())?;
    }
    emit(None, &report)?;
    Ok(passed)
}

fn cmd_verify(args: VerifyArgs) -> Outcome {
    let cfg = config(&args.common)?;
    let plan = read_plan(&args.plan)?;
    let report = match args.x {
        Some(x) if !(x.is_finite() && x > 0.0) => return Err(usage(anyhow!("--x must be positive"))),
        Some(x) => {
            let region = Region::square(x);
            match plan.kind {
                Mode::Pack => verify_packing(&plan, &region, &cfg),
                Mode::Cover => verify_covering(&plan, &region, &cfg),
            }
        }
        None => verify(&plan, &cfg),
    }
    .map_err(anyhow::Error::from)?;
    let json = to_json(&report)?;
    if let Some(p) = &args.out {
        write_atomic(p, json.as_bytes())?;
    }
    emit(None, &json)?;
    Ok(report.passed)
}

fn cmd_render(args: RenderArgs) -> Outcome {
    let cfg = config(&args.common)?;
    let plan = read_plan(&args.plan)?;
    let opts = RenderOptions {
        outline_only: args.outline_only,
        limit: cfg.limit,
        width: args.width,
    };
    let svg = render_svg(&plan, &opts).map_err(|e| usage(anyhow!("{e}; use --outline-only for large plans")))?;
    emit(args.out.as_deref(), &svg)?;
    Ok(true)
}

#[derive(Serialize)]
struct FitSummary {
    rows: usize,
    slope: Option<f64>,
    intercept: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<&'static str>,
}

fn cmd_series(args: SeriesArgs) -> Outcome {
    if let Some(x) = args.x.iter().find(|x| !(x.is_finite() && **x >= 1.0)) {
        return Err(usage(anyhow!(
            "every --x must be a finite number of at least 1, got {x}"
        )));
    }
    let cfg = config(&args.common)?;
    let mode = match args.kind {
        Kind::Pack => Mode::Pack,
        Kind::Cover => Mode::Cover,
    };
    let rows = run_series(&args.x, mode, &cfg, args.enumerate).map_err(|e| match e {
        squarepack::SeriesError::TooFew(_) => usage(e),
        _ => Failure::Runtime(e.into()),
    })?;
    let csv = to_csv(&rows).map_err(anyhow::Error::from)?;
    let fit = fit_slope(&rows);
    let summary = to_json(&FitSummary {
        rows: fit.map_or(0, |f| f.rows),
        slope: fit.map(|f| f.slope),
        intercept: fit.map(|f| f.intercept),
        note: fit
            .is_none()
            .then_some("slope undefined: fewer than two rows with positive waste"),
    })?;
    match &args.out {
        Some(p) => {
            write_atomic(p, csv.as_bytes())?;
            emit(None, &summary)?;
        }
        None => {
            emit(None, &csv)?;
            eprint!("{summary}");
        }
    }
    Ok(rows.iter().all(|r| r.passed))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.cmd {
        Cmd::Pack(a) => cmd_build(a, Mode::Pack),
        Cmd::Cover(a) => cmd_build(a, Mode::Cover),
        Cmd::Verify(a) => cmd_verify(a),
        Cmd::Render(a) => cmd_render(a),
        Cmd::Series(a) => cmd_series(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
