//! Report documents, exit codes and CSV rows.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use polarcvx::directions::default_directions;
use polarcvx::integration::IntegrationConfig;
use polarcvx::level_sets::{
    legendre_polar_identity, verify_legendre_levelsets, verify_polar_levelsets, volume_sandwich_check,
    LevelSetReport, VolumeSandwichReport,
};
use polarcvx::santalo::{
    ball_argument_bound, constant_a, upper_bound_factor, verify_theorem, TheoremVerdict, UpperBoundFactor,
};
use polarcvx::{Error, GeomCvxFn, VolumeConfig};

/// Identity discrepancies above this fail `verify`.
pub const IDENTITY_TOL: f64 = 1e-6;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn input(message: String) -> Self {
        Failure { code: 2, message }
    }

    pub fn from_lib(e: Error) -> Self {
        let code = match e {
            Error::NotIntegrable(_) => 4,
            Error::Unsupported(_) | Error::DepthExceeded(_) => 3,
            _ => 2,
        };
        Failure { code, message: e.to_string() }
    }
}

#[derive(Debug, Serialize)]
pub struct Document<C, E> {
    pub tool_version: &'static str,
    pub seed: u64,
    pub config: C,
    pub results: Vec<E>,
}

impl<C, E> Document<C, E> {
    pub fn new(seed: u64, config: C, results: Vec<E>) -> Self {
        Document { tool_version: env!("CARGO_PKG_VERSION"), seed, config, results }
    }
}

pub fn write_json<T: Serialize>(out: Option<&Path>, doc: &T) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(doc).map_err(|e| Failure::input(e.to_string()))?;
    text.push('\n');
    let io = |e: std::io::Error| Failure::input(format!("writing report: {e}"));
    match out {
        Some(p) => std::fs::write(p, text).map_err(io),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(io),
    }
}

pub fn write_csv<R: Serialize>(path: &Path, rows: impl IntoIterator<Item = R>) -> Result<(), Failure> {
    let err = |e: csv::Error| Failure::input(format!("writing {}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(err)?;
    for r in rows {
        w.serialize(r).map_err(err)?;
    }
    w.flush().map_err(|e| Failure::input(format!("writing {}: {e}", path.display())))
}

#[derive(Debug, Serialize)]
pub struct ProductConfig {
    pub c: f64,
    pub tol: f64,
}

#[derive(Debug, Serialize)]
pub struct ProductEntry {
    pub spec: PathBuf,
    #[serde(flatten)]
    pub verdict: TheoremVerdict,
}

pub fn product_entry(path: &Path, f: &GeomCvxFn, c: f64, cfg: &IntegrationConfig) -> Result<ProductEntry, Failure> {
    let verdict = verify_theorem(f, c, cfg).map_err(Failure::from_lib)?;
    Ok(ProductEntry { spec: path.to_path_buf(), verdict })
}

#[derive(Debug, Serialize)]
pub struct ProductRow {
    spec: String,
    family: String,
    n: usize,
    integral_phi: f64,
    integral_polar: f64,
    product: f64,
    product_error: f64,
    ratio_to_exponential: f64,
    lower_bound: f64,
    upper_bound: f64,
    implied_c: f64,
    lower_holds: bool,
    upper_check: &'static str,
}

impl From<&ProductEntry> for ProductRow {
    fn from(e: &ProductEntry) -> Self {
        let r = &e.verdict.report;
        ProductRow {
            spec: e.spec.display().to_string(),
            family: r.family.clone(),
            n: r.n,
            integral_phi: r.integral_phi.value,
            integral_polar: r.integral_polar.value,
            product: r.product,
            product_error: r.product_error,
            ratio_to_exponential: r.ratio_to_exponential,
            lower_bound: r.lower_bound_value,
            upper_bound: r.upper_bound_value,
            implied_c: r.implied_c,
            lower_holds: e.verdict.lower_holds,
            upper_check: match e.verdict.upper_holds {
                Some(true) => "pass",
                Some(false) => "fail",
                None => "skipped",
            },
        }
    }
}

#[derive(Debug, Serialize)]
pub struct VerifyConfig {
    pub s_grid: Vec<f64>,
    pub t_grid: Vec<f64>,
}

/// One level-set inclusion check, without the per-direction margins.
#[derive(Debug, Serialize)]
pub struct InclusionSummary {
    pub kind: &'static str,
    pub s: f64,
    pub t: f64,
    pub min_margin: [f64; 2],
    pub max_abs_first_margin: f64,
    pub verdict: [bool; 2],
    pub worst_direction: Vec<f64>,
    pub bracketed: bool,
}

impl InclusionSummary {
    fn new(kind: &'static str, r: &LevelSetReport) -> Self {
        InclusionSummary {
            kind,
            s: r.s,
            t: r.t,
            min_margin: [r.min_margin(0), r.min_margin(1)],
            max_abs_first_margin: r.max_abs_margin(0),
            verdict: r.verdict,
            worst_direction: r.worst_direction.clone(),
            bracketed: r.bracketed,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct IdentityCheck {
    pub c: f64,
    pub discrepancy: f64,
}

#[derive(Debug, Serialize)]
pub struct VerifyEntry {
    pub spec: PathBuf,
    pub family: String,
    pub n: usize,
    pub inclusions: Vec<InclusionSummary>,
    /// Empty when a transform has no closed form.
    pub identity: Vec<IdentityCheck>,
    /// Empty when the polar has no closed form or `n > 4`.
    pub volume_sandwich: Vec<VolumeSandwichReport>,
    pub passes: bool,
}

pub fn verify_entry(path: &Path, f: &GeomCvxFn, s_grid: &[f64], t_grid: &[f64], seed: u64) -> Result<VerifyEntry, Failure> {
    let n = f.dim();
    let dirs = default_directions(n);
    let mut inclusions = Vec::new();
    for &s in s_grid {
        for &t in t_grid {
            let p = verify_polar_levelsets(f, s, t, &dirs).map_err(Failure::from_lib)?;
            inclusions.push(InclusionSummary::new("polar", &p));
            let l = verify_legendre_levelsets(f, s, t, &dirs).map_err(Failure::from_lib)?;
            inclusions.push(InclusionSummary::new("legendre", &l));
        }
    }
    let mut identity = Vec::new();
    for &c in s_grid {
        match legendre_polar_identity(f, c, &dirs) {
            Ok(d) => identity.push(IdentityCheck { c, discrepancy: d }),
            Err(Error::Unsupported(_)) => break,
            Err(e) => return Err(Failure::from_lib(e)),
        }
    }
    let mut volume_sandwich = Vec::new();
    if n <= 4 {
        let cfg = VolumeConfig::for_dim(n, seed);
        for &t in t_grid {
            match volume_sandwich_check(f, t, &cfg) {
                Ok(r) => volume_sandwich.push(r),
                Err(Error::Unsupported(_)) => break,
                Err(e) => return Err(Failure::from_lib(e)),
            }
        }
    }
    let passes = inclusions.iter().all(|i| i.verdict[0] && i.verdict[1])
        && identity.iter().all(|i| i.discrepancy <= IDENTITY_TOL)
        && volume_sandwich.iter().all(|v| v.polar_reading[0] && v.polar_reading[1]);
    Ok(VerifyEntry {
        spec: path.to_path_buf(),
        family: f.family_name().to_string(),
        n,
        inclusions,
        identity,
        volume_sandwich,
        passes,
    })
}

#[derive(Debug, Serialize)]
pub struct VerifyRow {
    spec: String,
    check: String,
    s: f64,
    t: f64,
    first: f64,
    second: f64,
    pass: bool,
}

impl VerifyRow {
    /// Inclusion rows carry minimal margins, identity rows the discrepancy,
    /// volume rows the two ratios `|K_t(phi°)| / |K_{1/t}(phi)°|` and its bound `2^n`.
    pub fn rows(e: &VerifyEntry) -> Vec<VerifyRow> {
        let spec = e.spec.display().to_string();
        let mut rows: Vec<VerifyRow> = e
            .inclusions
            .iter()
            .map(|i| VerifyRow {
                spec: spec.clone(),
                check: i.kind.to_string(),
                s: i.s,
                t: i.t,
                first: i.min_margin[0],
                second: i.min_margin[1],
                pass: i.verdict[0] && i.verdict[1],
            })
            .collect();
        rows.extend(e.identity.iter().map(|i| VerifyRow {
            spec: spec.clone(),
            check: "identity".into(),
            s: i.c,
            t: 1.0 / i.c,
            first: i.discrepancy,
            second: 0.0,
            pass: i.discrepancy <= IDENTITY_TOL,
        }));
        rows.extend(e.volume_sandwich.iter().map(|v| VerifyRow {
            spec: spec.clone(),
            check: "volume".into(),
            s: 1.0 / v.t,
            t: v.t,
            first: v.polar_level_volume.value / v.level_polar_volume.value,
            second: 2f64.powi(e.n as i32),
            pass: v.polar_reading[0] && v.polar_reading[1],
        }));
        rows
    }
}

#[derive(Debug, Serialize)]
pub struct BallBound {
    pub n: usize,
    pub value: f64,
}

#[derive(Debug, Serialize)]
pub struct Constants {
    pub tool_version: &'static str,
    pub a: f64,
    pub upper_bound_factor: Vec<UpperBoundFactor>,
    pub ball_argument_bound: Vec<BallBound>,
}

pub fn constants() -> Constants {
    Constants {
        tool_version: env!("CARGO_PKG_VERSION"),
        a: constant_a(),
        upper_bound_factor: (1..=10).map(upper_bound_factor).collect(),
        ball_argument_bound: (1..=5).map(|n| BallBound { n, value: ball_argument_bound(n) }).collect(),
    }
}

#[derive(Debug, Serialize)]
pub struct ConstantRow {
    n: usize,
    factor: f64,
    t_star: f64,
    closed_form_t: f64,
    closed_form_factor: f64,
    ball_argument_bound: Option<f64>,
}

impl ConstantRow {
    pub fn rows(c: &Constants) -> Vec<ConstantRow> {
        c.upper_bound_factor
            .iter()
            .map(|u| ConstantRow {
                n: u.n,
                factor: u.factor,
                t_star: u.t_star,
                closed_form_t: u.closed_form_t,
                closed_form_factor: u.closed_form_factor,
                ball_argument_bound: c.ball_argument_bound.iter().find(|b| b.n == u.n).map(|b| b.value),
            })
            .collect()
    }
}
