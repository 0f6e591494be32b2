//! `polarcvx`: transforms, Santaló products and level-set checks from JSON specs.

mod report;
mod spec;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use polarcvx::integration::IntegrationConfig;
use polarcvx::transforms::{legendre_transform, polar_transform};
use polarcvx::GeomCvxFn;

use report::Failure;

#[derive(Parser)]
#[command(name = "polarcvx", version, about = "Polarity and Legendre transforms of geometric convex functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the polar or Legendre transform of a spec as a new spec.
    Transform {
        spec: PathBuf,
        #[arg(long, value_enum, default_value = "polar")]
        which: Which,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Santaló product and the two-sided bound check.
    Product {
        #[arg(required = true)]
        specs: Vec<PathBuf>,
        #[arg(long, default_value_t = 0.5)]
        c: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Relative accuracy of the integrals.
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Level-set inclusions, the Legendre/polar identity and the volume sandwich.
    Verify {
        #[arg(required = true)]
        specs: Vec<PathBuf>,
        #[arg(long, default_value = "0.25,0.5,1,2,4")]
        s_grid: String,
        #[arg(long, default_value = "0.25,0.5,1,2,4")]
        t_grid: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// The constant a, upper-bound factors for n = 1..10 and ball-argument bounds for n = 1..5.
    Constants {
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    Polar,
    Legendre,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match configure_threads().and_then(|_| run(cli)) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("polarcvx: {}", f.message);
            f.code
        }
    };
    ExitCode::from(code)
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("POLARCVX_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| Failure::input(format!("POLARCVX_THREADS must be a positive integer, got `{v}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::input(format!("thread pool: {e}")))
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Transform { spec, which, out } => {
            let f = load(&spec)?;
            let g = match which {
                Which::Polar => polar_transform(&f),
                Which::Legendre => legendre_transform(&f),
            }
            .map_err(Failure::from_lib)?;
            report::write_json(out.as_deref(), &spec::to_spec(&g))?;
            Ok(0)
        }
        Command::Product { specs, c, seed, tol, out, csv } => {
            if !(tol > 0.0 && tol < 1.0) {
                return Err(Failure::input(format!("--tol must lie in (0, 1), got {tol}")));
            }
            let fs = specs.iter().map(|p| load(p).map(|f| (p, f))).collect::<Result<Vec<_>, _>>()?;
            let entries = fs
                .iter()
                .map(|(p, f)| {
                    let mut cfg = IntegrationConfig::for_dim(f.dim(), seed);
                    cfg.rel_tol = tol;
                    report::product_entry(p, f, c, &cfg)
                })
                .collect::<Result<Vec<_>, _>>()?;
            let pass = entries.iter().all(|e| e.verdict.passes());
            let doc = report::Document::new(seed, report::ProductConfig { c, tol }, entries);
            report::write_json(out.as_deref(), &doc)?;
            if let Some(path) = csv {
                report::write_csv(&path, doc.results.iter().map(report::ProductRow::from))?;
            }
            Ok(if pass { 0 } else { 1 })
        }
        Command::Verify { specs, s_grid, t_grid, seed, out, csv } => {
            let s_grid = parse_grid(&s_grid, "--s-grid")?;
            let t_grid = parse_grid(&t_grid, "--t-grid")?;
            let fs = specs.iter().map(|p| load(p).map(|f| (p, f))).collect::<Result<Vec<_>, _>>()?;
            let entries = fs
                .iter()
                .map(|(p, f)| report::verify_entry(p, f, &s_grid, &t_grid, seed))
                .collect::<Result<Vec<_>, _>>()?;
            let pass = entries.iter().all(|e| e.passes);
            let config = report::VerifyConfig { s_grid, t_grid };
            let doc = report::Document::new(seed, config, entries);
            report::write_json(out.as_deref(), &doc)?;
            if let Some(path) = csv {
                report::write_csv(&path, doc.results.iter().flat_map(report::VerifyRow::rows))?;
            }
            Ok(if pass { 0 } else { 1 })
        }
        Command::Constants { out, csv } => {
            let doc = report::constants();
            report::write_json(out.as_deref(), &doc)?;
            if let Some(path) = csv {
                report::write_csv(&path, report::ConstantRow::rows(&doc))?;
            }
            Ok(if doc.a >= 0.7 { 0 } else { 1 })
        }
    }
}

fn load(path: &Path) -> Result<GeomCvxFn, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    spec::parse(&text, &path.display().to_string()).map_err(|e| Failure::input(e.to_string()))
}

fn parse_grid(text: &str, flag: &str) -> Result<Vec<f64>, Failure> {
    let mut grid = Vec::new();
    for part in text.split(',') {
        let v: f64 = part
            .trim()
            .parse()
            .map_err(|_| Failure::input(format!("{flag}: `{}` is not a number", part.trim())))?;
        if !(v > 0.0 && v.is_finite()) {
            return Err(Failure::input(format!("{flag}: levels must be positive, got {v}")));
        }
        grid.push(v);
    }
    Ok(grid)
}
