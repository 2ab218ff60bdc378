use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use h2r::bvp::{run_job, write_field_csv, JobSpec};
use h2r::catenoid::{integrate_profile, period, profile_options, Catenoid};
use h2r::export::{catenoid_heights, tall_heights, write_catenoid_profile, write_heights, write_tall_profile, HeightRow};
use h2r::jacobi::{jacobi_apply, AnalyticField, FieldKind};
use h2r::mesh::{catenoid_mesh, parabolic_mesh, parametric_grid, q_mesh, tall_mesh, tall_periodic_mesh, unduloid_mesh, Mesh};
use h2r::parabolic::{Gauge, ParabolicCatenoid};
use h2r::verify::{run_suite, Suite, Tolerances};
use h2r::{Error, TallRectSpec};

#[derive(Parser)]
#[command(name = "h2r", version, about = "Catenoids, parabolic catenoids and tall rectangles in H2xR")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Obj,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    Catenoid,
    Parabolic,
    Tall,
    Q,
    Unduloid,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    All,
    Geometry,
    Jacobi,
    Bvp,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FieldArg {
    Psi,
    Utilde,
    WCat,
    WTall,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GaugeArg {
    Psi,
    Fhat,
}

#[derive(Subcommand)]
enum Command {
    /// Catenoid profile r(t) or tall-rectangle profile lambda_d(x) as CSV.
    Profile {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long, default_value_t = 1.0)]
        k: f64,
        #[arg(long, default_value_t = 0.5)]
        d: f64,
        /// Number of profile periods to integrate (catenoid).
        #[arg(long, default_value_t = 1.0)]
        periods: f64,
        /// Sample count (tall).
        #[arg(long, default_value_t = 201)]
        points: usize,
    },
    /// Height table with monotonicity flags.
    Height {
        #[arg(long, value_enum)]
        family: Family,
        /// Catenoid parameters; a 12-point log grid on [1e-4, 1e3] when omitted.
        #[arg(long, num_args = 1..)]
        k: Vec<f64>,
        /// Tall-rectangle parameters; a grid on [0.01, 0.99] when omitted.
        #[arg(long, num_args = 1..)]
        d: Vec<f64>,
    },
    /// OBJ mesh of a surface.
    Mesh {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long, default_value_t = 1.0)]
        k: f64,
        #[arg(long, default_value_t = 0.5)]
        d: f64,
        /// Horizontal dilation; meshes the parabolic catenoid in the half-plane chart.
        #[arg(long)]
        lambda: Option<f64>,
        /// Half-width of the parameter box (parabolic) or sampling cube (q).
        #[arg(long = "box", default_value_t = 2.0)]
        half_box: f64,
        #[arg(long, num_args = 2, value_names = ["NU", "NV"])]
        grid: Option<Vec<usize>>,
        /// Profile periods shown by the unduloid.
        #[arg(long, default_value_t = 2.0)]
        periods: f64,
        /// Tall rectangle: annular extension up to x = 1/d1 instead of the cylinder.
        #[arg(long)]
        extended: bool,
        /// Tall rectangle: periodic ambient surface with this many copies each way.
        #[arg(long)]
        copies: Option<i32>,
    },
    /// Runs the invariant suites and writes a JSON report.
    Verify {
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Samples a Jacobi field with its analytic residual L u.
    Jacobi {
        #[arg(long, value_enum, default_value_t = FieldArg::WCat)]
        field: FieldArg,
        #[arg(long, value_enum, default_value_t = GaugeArg::Psi)]
        gauge: GaugeArg,
        #[arg(long, num_args = 2, value_names = ["NX", "NT"])]
        grid: Option<Vec<usize>>,
        #[arg(long = "box", default_value_t = 5.0)]
        half_box: f64,
    },
    /// Solves a boundary-value job described by a JSON file.
    Solve {
        job: PathBuf,
        /// Where to write the solved field as CSV.
        #[arg(long)]
        field: Option<PathBuf>,
    },
}

/// Error raised by the front end: a library error or a failed invariant.
#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Usage(String),
    #[error("{} invariant checks failed", .0.len())]
    Invariant(Vec<String>),
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Core(e.into())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Core(e.into())
    }
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Core(Error::Domain { .. }) => "domain",
            CliError::Core(Error::DegenerateImmersion { .. }) => "degenerate_immersion",
            CliError::Core(Error::StepSize { .. }) => "step_size",
            CliError::Core(Error::Quadrature { .. }) => "quadrature",
            CliError::Core(Error::ZeroMode { .. }) => "zero_mode",
            CliError::Core(Error::Input(_)) => "input",
            CliError::Core(Error::Io(_)) => "io",
            CliError::Usage(_) => "usage",
            CliError::Invariant(_) => "invariant",
        }
    }

    fn to_json(&self) -> serde_json::Value {
        let mut e = json!({ "kind": self.kind(), "message": self.to_string() });
        if let CliError::Invariant(names) = self {
            e["failed"] = json!(names);
        }
        json!({ "error": e })
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn sink(out: &Option<PathBuf>) -> CliResult<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn expect_format(given: Option<Format>, allowed: &[Format], default: Format) -> CliResult<Format> {
    let f = given.unwrap_or(default);
    if allowed.contains(&f) {
        Ok(f)
    } else {
        Err(CliError::Usage("this command does not support the requested format".into()))
    }
}

fn grid_pair(grid: &Option<Vec<usize>>, default: (usize, usize), min: usize) -> CliResult<(usize, usize)> {
    let (a, b) = grid.as_ref().map_or(default, |g| (g[0], g[1]));
    if a < min || b < min {
        return Err(CliError::Usage(format!("grid sizes must be at least {min}, got {a}x{b}")));
    }
    Ok((a, b))
}

fn check_k(k: f64) -> CliResult<()> {
    if k > 0.0 && k.is_finite() {
        Ok(())
    } else {
        Err(CliError::Usage(format!("k = {k} must be positive")))
    }
}

fn check_d(d: f64) -> CliResult<()> {
    if d > 0.0 && d < 1.0 {
        Ok(())
    } else {
        Err(CliError::Usage(format!("d = {d} must lie in (0, 1)")))
    }
}

fn write_json<T: Serialize>(value: &T, w: &mut dyn Write) -> CliResult<()> {
    serde_json::to_writer_pretty(&mut *w, value)?;
    writeln!(w)?;
    Ok(())
}

fn profile(c: &Common, family: Family, k: f64, d: f64, periods: f64, points: usize) -> CliResult<()> {
    expect_format(c.format, &[Format::Csv], Format::Csv)?;
    let mut w = sink(&c.out)?;
    match family {
        Family::Catenoid => {
            check_k(k)?;
            let p = integrate_profile(k, periods * period(k)?, profile_options())?;
            write_catenoid_profile(&p, &mut w)?;
        }
        Family::Tall => {
            check_d(d)?;
            write_tall_profile(&TallRectSpec::new(d)?, points, &mut w)?;
        }
        _ => return Err(CliError::Usage("profile supports the catenoid and tall families".into())),
    }
    w.flush()?;
    Ok(())
}

fn height(c: &Common, family: Family, ks: Vec<f64>, ds: Vec<f64>) -> CliResult<()> {
    let format = expect_format(c.format, &[Format::Csv, Format::Json], Format::Csv)?;
    let (rows, name, label): (Vec<HeightRow>, &str, &str) = match family {
        Family::Catenoid => {
            let ks = if ks.is_empty() {
                (0..12).map(|i| 10f64.powf(-4.0 + 7.0 * i as f64 / 11.0)).collect()
            } else {
                ks
            };
            ks.iter().try_for_each(|&k| check_k(k))?;
            (catenoid_heights(&ks)?, "k", "catenoid")
        }
        Family::Tall => {
            let ds = if ds.is_empty() {
                (0..12).map(|i| 0.01 + 0.98 * i as f64 / 11.0).collect()
            } else {
                ds
            };
            ds.iter().try_for_each(|&d| check_d(d))?;
            (tall_heights(&ds)?, "d", "tall")
        }
        _ => return Err(CliError::Usage("height supports the catenoid and tall families".into())),
    };
    let mut w = sink(&c.out)?;
    match format {
        Format::Json => write_json(&json!({ "family": label, "parameter": name, "rows": rows }), &mut w)?,
        _ => write_heights(&rows, name, &mut w)?,
    }
    w.flush()?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn mesh(
    c: &Common,
    family: Family,
    k: f64,
    d: f64,
    lambda: Option<f64>,
    half_box: f64,
    grid: &Option<Vec<usize>>,
    periods: f64,
    extended: bool,
    copies: Option<i32>,
) -> CliResult<()> {
    expect_format(c.format, &[Format::Obj], Format::Obj)?;
    if !(half_box > 0.0 && half_box.is_finite()) {
        return Err(CliError::Usage(format!("box = {half_box} must be positive")));
    }
    let (nu, nv) = grid_pair(grid, (96, 64), 16)?;
    let m: Mesh = match family {
        Family::Catenoid => {
            check_k(k)?;
            catenoid_mesh(&Catenoid::new(k)?, nu, nv)?
        }
        Family::Unduloid => {
            check_k(k)?;
            unduloid_mesh(&Catenoid::new(k)?, nu, nv, periods)?
        }
        Family::Parabolic => match lambda {
            None => parabolic_mesh(half_box, nu, nv)?,
            Some(l) => {
                let cat = ParabolicCatenoid::new(l, Gauge::Psi)?;
                let lim = std::f64::consts::PI * 1e-6;
                let mut m = parametric_grid(nu, nv, (-half_box, half_box), (lim, std::f64::consts::PI - lim), |x, t| {
                    cat.point(x, t).ok().map(|p| p.to_array())
                });
                m.notes.push(format!("parabolic catenoid lambda={l}, upper half-plane chart"));
                m
            }
        },
        Family::Tall => {
            check_d(d)?;
            let spec = TallRectSpec::new(d)?;
            match copies {
                Some(n) => tall_periodic_mesh(&spec, nu, nv, n)?,
                None => tall_mesh(&spec, nu, nv, if extended { 1.0 / spec.d1 } else { 1.0 })?,
            }
        }
        Family::Q => q_mesh(half_box, nu.max(nv), (-half_box, half_box))?,
    };
    let mut w = sink(&c.out)?;
    m.write_obj(&mut w)?;
    w.flush()?;
    Ok(())
}

fn verify(c: &Common, suite: SuiteArg, seed: u64) -> CliResult<()> {
    expect_format(c.format, &[Format::Json], Format::Json)?;
    let tol = match std::env::var("H2R_TOL") {
        Ok(spec) => Tolerances::default().with_override(&spec)?,
        Err(_) => Tolerances::default(),
    };
    let suite = match suite {
        SuiteArg::All => Suite::All,
        SuiteArg::Geometry => Suite::Geometry,
        SuiteArg::Jacobi => Suite::Jacobi,
        SuiteArg::Bvp => Suite::Bvp,
    };
    let report = run_suite(suite, seed, tol)?;
    let mut w = sink(&c.out)?;
    write_json(&report, &mut w)?;
    w.flush()?;
    if report.passed {
        Ok(())
    } else {
        Err(CliError::Invariant(
            report.checks.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect(),
        ))
    }
}

fn jacobi(c: &Common, field: FieldArg, gauge: GaugeArg, grid: &Option<Vec<usize>>, half_box: f64) -> CliResult<()> {
    let format = expect_format(c.format, &[Format::Csv, Format::Json], Format::Csv)?;
    let (nx, nt) = grid_pair(grid, (64, 33), 16)?;
    let kind = match field {
        FieldArg::Psi => FieldKind::Psi,
        FieldArg::Utilde => FieldKind::Utilde,
        FieldArg::WCat => FieldKind::WCat,
        FieldArg::WTall => FieldKind::WTall,
    };
    let gauge = match gauge {
        GaugeArg::Psi => Gauge::Psi,
        GaugeArg::Fhat => Gauge::Fhat,
    };
    let f = AnalyticField::new(kind, gauge);
    let (a, b) = gauge.t_range::<f64>();
    // Open interval in t: the Jacobi operator degenerates on the boundary.
    let mut rows = Vec::with_capacity(nx * nt);
    let mut worst = 0.0f64;
    for i in 0..nx {
        let x = -half_box + 2.0 * half_box * i as f64 / (nx - 1) as f64;
        for j in 0..nt {
            let t = a + (b - a) * (j + 1) as f64 / (nt + 1) as f64;
            let r = jacobi_apply(&f, x, t)?;
            worst = worst.max(r.abs());
            rows.push((x, t, f.value(x, t)?, r));
        }
    }
    // The strip grid is periodic in x; stay clear of the wrap-around.
    let sampled = f.sample(half_box, nx, nt)?;
    let fd = sampled.interior_residual(half_box - 2.0 * sampled.hx());
    let mut w = sink(&c.out)?;
    match format {
        Format::Json => write_json(
            &json!({
                "field": kind,
                "gauge": gauge,
                "nx": nx,
                "nt": nt,
                "half_width": half_box,
                "max_abs_residual": worst,
                "finite_difference_residual": fd,
            }),
            &mut w,
        )?,
        _ => {
            writeln!(w, "x,t,u,lu")?;
            for (x, t, u, r) in rows {
                writeln!(w, "{x:.17e},{t:.17e},{u:.17e},{r:.17e}")?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn solve(c: &Common, job: &Path, field: &Option<PathBuf>) -> CliResult<()> {
    expect_format(c.format, &[Format::Json], Format::Json)?;
    let spec = JobSpec::from_reader(File::open(job)?)?;
    let base = job.parent().unwrap_or(Path::new("."));
    let (u, report) = run_job(&spec, base)?;
    if let Some(p) = field {
        let mut w = BufWriter::new(File::create(p)?);
        write_field_csv(&u, &mut w)?;
        w.flush()?;
    }
    let mut w = sink(&c.out)?;
    write_json(&report, &mut w)?;
    w.flush()?;
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    let c = &cli.common;
    match cli.command {
        Command::Profile { family, k, d, periods, points } => profile(c, family, k, d, periods, points),
        Command::Height { family, k, d } => height(c, family, k, d),
        Command::Mesh { family, k, d, lambda, half_box, grid, periods, extended, copies } => {
            mesh(c, family, k, d, lambda, half_box, &grid, periods, extended, copies)
        }
        Command::Verify { suite, seed } => verify(c, suite, seed),
        Command::Jacobi { field, gauge, grid, half_box } => jacobi(c, field, gauge, &grid, half_box),
        Command::Solve { job, field } => solve(c, &job, &field),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or_default().trim_start_matches("error: ");
            eprintln!("{}", CliError::Usage(first.to_string()).to_json());
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Core(Error::Io(e))) if e.0.contains("Broken pipe") => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            match e {
                CliError::Invariant(_) => ExitCode::from(1),
                _ => ExitCode::from(2),
            }
        }
    }
}
