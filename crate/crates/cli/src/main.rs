use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use zetacont::error_model::NGrid;
use zetacont::experiments::{curve_rows, eval_row, min_n_rows, ExperimentRow, RowStatus};
use zetacont::fixtures::{self, CoefficientFixture, FIXTURE_DIR_ENV};
use zetacont::progression::{CoefficientSystem, ProgressionModulus};
use zetacont::series_eval::{zeta_estimate_removable, EvalOptions, SumMode};
use zetacont::verify::{run_suite, SUITES};
use zetacont::{Complex64, Error, FilterCoefficients, SeriesWeights};

const EXIT_FAILED: u8 = 1;
const EXIT_PRECONDITION: u8 = 2;
const EXIT_NUMERIC: u8 = 3;
const EXIT_EXHAUSTED: u8 = 4;

#[derive(Parser)]
#[command(
    name = "zetacont",
    version,
    about = "Accelerated periodic Dirichlet series for zeta(s)"
)]
struct Cli {
    /// Directory holding m<M>.json coefficient fixtures.
    #[arg(long, global = true, env = FIXTURE_DIR_ENV)]
    fixture_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the coefficients for m and write them as a JSON fixture.
    Coeffs {
        #[arg(long)]
        m: u64,
        /// Output file; the fixture goes to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the truncated series at one point.
    Eval {
        #[arg(long)]
        m: u64,
        /// Evaluation point as RE,IM.
        #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
        s: Complex64,
        /// Number of complete blocks of m terms.
        #[arg(long)]
        n: u64,
        #[command(flatten)]
        eval: EvalArgs,
        /// Average over a circle of this radius around s (for removable singularities).
        #[arg(long)]
        removable: Option<f64>,
    },
    /// Smallest grid N reaching each target accuracy at s = 1/2 + it.
    MinN {
        #[arg(long)]
        m: u64,
        #[arg(long)]
        t: f64,
        /// Comma-separated, strictly decreasing accuracies.
        #[arg(long, value_parser = parse_targets)]
        targets: Targets,
        /// START:STOP:STEP
        #[arg(long)]
        grid: NGrid,
        #[command(flatten)]
        eval: EvalArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Error against the reference value at every grid point.
    Curve {
        #[arg(long)]
        m: u64,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_complex, default_value = "0.5,100000")]
        s: Complex64,
        /// START:STOP:STEP
        #[arg(long)]
        grid: NGrid,
        #[command(flatten)]
        eval: EvalArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the self-check suites and print one JSON line per suite.
    Verify {
        #[arg(long)]
        suite: Option<String>,
        /// Seed for the pseudo-random oracle points.
        #[arg(long, default_value_t = 2024)]
        seed: u64,
    },
}

#[derive(Args, Clone, Copy)]
struct EvalArgs {
    /// Summation mode: seq or par.
    #[arg(long, default_value = "seq")]
    mode: SumMode,
    /// Allow points outside the proven convergence half-plane.
    #[arg(long)]
    explore: bool,
}

impl EvalArgs {
    fn options(self) -> EvalOptions {
        EvalOptions {
            mode: self.mode,
            exploration: self.explore,
            ..EvalOptions::default()
        }
    }
}

#[derive(Clone, Debug)]
struct Targets(Vec<f64>);

fn parse_complex(text: &str) -> Result<Complex64, String> {
    let (re, im) = text.split_once(',').ok_or("expected RE,IM")?;
    let re: f64 = re
        .trim()
        .parse()
        .map_err(|_| format!("bad real part {re:?}"))?;
    let im: f64 = im
        .trim()
        .parse()
        .map_err(|_| format!("bad imaginary part {im:?}"))?;
    Ok(Complex64::new(re, im))
}

fn parse_targets(text: &str) -> Result<Targets, String> {
    let values = text
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| format!("bad target {p:?}"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if values.iter().any(|v| v.is_nan() || *v <= 0.0) {
        return Err("targets must be positive".into());
    }
    if values.windows(2).any(|w| w[1] >= w[0]) {
        return Err("targets must be strictly decreasing".into());
    }
    Ok(Targets(values))
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::DenominatorNearZero { .. }
        | Error::EtaDenominatorNearZero { .. }
        | Error::NonFinite { .. }
        | Error::PhaseBudget { .. }
        | Error::PrecisionUnreachable { .. } => EXIT_NUMERIC,
        Error::Io(_) => EXIT_FAILED,
        _ => EXIT_PRECONDITION,
    }
}

fn load(dir: Option<&Path>, m: u64) -> zetacont::Result<(FilterCoefficients, SeriesWeights)> {
    fixtures::load(dir, m)?.to_coefficients()
}

fn write_rows(out: Option<&Path>, rows: &[ExperimentRow]) -> zetacont::Result<()> {
    let sink: Box<dyn Write> = match out {
        Some(path) => Box::new(File::create(path)?),
        None => Box::new(io::stdout().lock()),
    };
    let mut w = csv::Writer::from_writer(sink);
    for row in rows {
        w.serialize(row)
            .map_err(|e| Error::Io(io::Error::other(e)))?;
    }
    w.flush()?;
    Ok(())
}

fn fmt_list<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(", ")
}

fn cmd_coeffs(m: u64, out: Option<&Path>) -> zetacont::Result<u8> {
    let fixture = CoefficientFixture::generate(m)?;
    if m != 2 {
        let system = CoefficientSystem::new(&ProgressionModulus::new(m)?);
        eprintln!(
            "rank(A) = {}, nullity = {}",
            system.rank(),
            system.nullity()
        );
    }
    eprintln!("a = [{}]", fmt_list(&fixture.a));
    eprintln!("b = [{}]", fmt_list(&fixture.b));
    eprintln!("vanishing order = {}", fixture.vanishing_order);
    match out {
        Some(path) => std::fs::write(path, fixture.to_json())?,
        None => print!("{}", fixture.to_json()),
    }
    Ok(0)
}

fn cmd_eval(
    dir: Option<&Path>,
    m: u64,
    s: Complex64,
    n: u64,
    opts: EvalOptions,
    removable: Option<f64>,
) -> zetacont::Result<u8> {
    let (fc, sw) = load(dir, m)?;
    if let Some(radius) = removable {
        let z = zeta_estimate_removable(&fc, &sw, s, n, radius, 8, opts)?;
        println!("m={m} s={s} N={n} zeta={z} (circle radius {radius})");
        return Ok(0);
    }
    let row = eval_row(&fc, &sw, s, n, opts)?;
    if row.status == RowStatus::DenominatorNearZero {
        let poly = zetacont::series_eval::dirichlet_poly(&fc, s);
        return Err(Error::DenominatorNearZero {
            modulus: poly.norm(),
            threshold: zetacont::series_eval::denominator_threshold(&fc),
        });
    }
    let z = Complex64::new(row.value_re.unwrap(), row.value_im.unwrap());
    let poly = zetacont::series_eval::dirichlet_poly(&fc, s);
    let show = |x: Option<f64>| x.map_or_else(|| "n/a".to_string(), |v| format!("{v:.3e}"));
    println!(
        "m={m} s={s} N={n} zeta={:.16}{:+.16}i |denominator|={:.6e} predicted_error={} abs_error={}",
        z.re,
        z.im,
        poly.norm(),
        show(row.predicted_error),
        show(row.abs_error)
    );
    Ok(0)
}

fn cmd_verify(dir: Option<&Path>, suite: Option<&str>, seed: u64) -> zetacont::Result<u8> {
    let names: Vec<&str> = match suite {
        Some(name) if !SUITES.contains(&name) => {
            return Err(Error::InvalidArgument(format!(
                "unknown suite {name:?}; expected one of {}",
                SUITES.join(", ")
            )))
        }
        Some(name) => vec![name],
        None => SUITES.to_vec(),
    };
    let mut all = true;
    for name in names {
        let report = run_suite(name, dir, seed).expect("known suite");
        all &= report.passed;
        println!("{}", serde_json::to_string(&report)?);
    }
    Ok(if all { 0 } else { EXIT_FAILED })
}

fn run(cli: Cli) -> zetacont::Result<u8> {
    let dir = cli.fixture_dir.as_deref();
    match cli.command {
        Command::Coeffs { m, out } => cmd_coeffs(m, out.as_deref()),
        Command::Eval {
            m,
            s,
            n,
            eval,
            removable,
        } => cmd_eval(dir, m, s, n, eval.options(), removable),
        Command::MinN {
            m,
            t,
            targets,
            grid,
            eval,
            out,
        } => {
            let (fc, sw) = load(dir, m)?;
            let rows = min_n_rows(&fc, &sw, t, &targets.0, grid, eval.options())?;
            write_rows(out.as_deref(), &rows)?;
            let exhausted = rows.iter().any(|r| r.status == RowStatus::Exhausted);
            Ok(if exhausted { EXIT_EXHAUSTED } else { 0 })
        }
        Command::Curve {
            m,
            s,
            grid,
            eval,
            out,
        } => {
            let (fc, sw) = load(dir, m)?;
            let rows = curve_rows(&fc, &sw, s, grid, eval.options())?;
            write_rows(Some(&out), &rows)?;
            Ok(0)
        }
        Command::Verify { suite, seed } => cmd_verify(dir, suite.as_deref(), seed),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
