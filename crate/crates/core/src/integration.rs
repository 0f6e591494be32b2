//! Layer-cake integration of log-concave densities `e^{-phi}`.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;
use statrs::function::gamma::gamma_ur;

use crate::directions::directions;
use crate::error::{Error, Result};
use crate::function::{Family, GeomCvxFn, Ray};
use crate::geometry::{body_volume, factorial, monte_carlo_volume, ConvexBody, RadialRule, VolumeConfig, VolumeMethod};
use crate::quad::adaptive_simpson;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimateMethod {
    Exact,
    RadialQuadrature,
    MonteCarlo,
    LayerCake,
    SandwichBracket,
}

/// A value with an error bar and the method that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegralEstimate {
    pub value: f64,
    pub abs_error: f64,
    pub method: EstimateMethod,
    /// Layer-cake upper limit, when truncation was used.
    pub s_truncation: Option<f64>,
    /// The value is only known to bound the truth from below.
    pub lower_bound_only: bool,
}

impl IntegralEstimate {
    pub fn new(value: f64, abs_error: f64, method: EstimateMethod) -> Self {
        IntegralEstimate { value, abs_error, method, s_truncation: None, lower_bound_only: false }
    }

    pub fn exact(value: f64) -> Self {
        Self::new(value, 0.0, EstimateMethod::Exact)
    }

    pub fn lo(&self) -> f64 {
        (self.value - self.abs_error).max(0.0)
    }

    pub fn hi(&self) -> f64 {
        self.value + self.abs_error
    }

    /// `true` when `x` lies inside the error bar, with relative slack `rel`.
    pub fn brackets(&self, x: f64, rel: f64) -> bool {
        (self.value - x).abs() <= self.abs_error + rel * x.abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegrationConfig {
    /// Relative accuracy target for the layer-cake quadrature and tail.
    pub rel_tol: f64,
    pub volume: VolumeConfig,
}

impl IntegrationConfig {
    /// `1e-3` with radial volumes (n <= 3), `1e-2` otherwise.
    pub fn for_dim(dim: usize, seed: u64) -> Self {
        let volume = VolumeConfig::for_dim(dim, seed);
        let rel_tol = if dim <= 3 && volume.method == VolumeMethod::RadialQuadrature { 1e-3 } else { 1e-2 };
        IntegrationConfig { rel_tol, volume }
    }
}

/// Angular resolution cap for Steiner nodes whose radii need a sphere search.
const STEINER_RESOLUTION: usize = 64;

/// Volumes `|{phi <= s}|` as a function of `s`.
enum Profile<'a> {
    /// `|K_s| = lambda(s)^n |K|`.
    Homothetic { f: &'a GeomCvxFn, base: IntegralEstimate },
    /// `|P + sM|` is a polynomial of degree `n` in `s` with leading
    /// coefficient `|M|`; the rest is interpolated at `s = 0, 1, ..., n-1`.
    Steiner { n: usize, lead: IntegralEstimate, nodes: Vec<(f64, IntegralEstimate)> },
    Radial { rule: RadialRule, fine: Vec<Ray<'a>>, coarse: Vec<Ray<'a>> },
    MonteCarlo { f: &'a GeomCvxFn, dirs: Vec<Vec<f64>>, cfg: VolumeConfig },
}

fn homothety(f: &GeomCvxFn, s: f64) -> Option<(f64, &ConvexBody)> {
    Some(match f.family() {
        Family::Indicator(k) => (1.0, k),
        Family::Gauge { body, t } => (s / t, body),
        Family::HingedGauge { body, a } => (1.0 + s / a, body),
        Family::PowerGauge { body, p, scale } => ((s / scale).powf(1.0 / p), body),
        _ => return None,
    })
}

impl<'a> Profile<'a> {
    fn new(f: &'a GeomCvxFn, cfg: &VolumeConfig) -> Result<Self> {
        cfg.check(f.dim())?;
        if f.is_sampled() {
            return Err(Error::Unsupported("integral of a sampled function".into()));
        }
        if let Some((_, body)) = homothety(f, 1.0) {
            let base = match body.exact_volume() {
                Some(v) => IntegralEstimate::exact(v),
                None => body_volume(body, cfg)?,
            };
            return Ok(Profile::Homothetic { f, base });
        }
        Ok(match cfg.method {
            VolumeMethod::RadialQuadrature if matches!(f.family(), Family::GaugeDistance(_)) => {
                let Family::GaugeDistance(gd) = f.family() else { unreachable!() };
                let n = f.dim();
                let vol = |b: &ConvexBody| match b.exact_volume() {
                    Some(v) => Ok(IntegralEstimate::exact(v)),
                    None => body_volume(b, cfg),
                };
                let searched = !(gd.m.is_polyhedral() && gd.p.is_polyhedral()) && n >= 3;
                let res = if searched { Some(cfg.resolution.unwrap_or(STEINER_RESOLUTION).min(STEINER_RESOLUTION)) } else { cfg.resolution };
                let rule = RadialRule::new(n, res);
                let mut nodes = vec![(0.0, vol(&gd.p)?)];
                for j in 1..n {
                    let s = j as f64;
                    nodes.push((s, rule.volume(|d| gd.level_radius(d, s))));
                }
                Profile::Steiner { n, lead: vol(&gd.m)?, nodes }
            }
            VolumeMethod::RadialQuadrature => {
                let rule = RadialRule::new(f.dim(), cfg.resolution);
                let fine = rule.fine.dirs.par_iter().map(|d| f.ray(d)).collect();
                let coarse = rule.coarse.dirs.par_iter().map(|d| f.ray(d)).collect();
                Profile::Radial { rule, fine, coarse }
            }
            VolumeMethod::MonteCarlo => Profile::MonteCarlo { f, dirs: directions(f.dim(), 2000), cfg: *cfg },
        })
    }

    fn volume(&self, s: f64) -> IntegralEstimate {
        match self {
            Profile::Homothetic { f, base } => {
                let (lambda, _) = homothety(f, s).unwrap();
                let k = lambda.powi(f.dim() as i32);
                IntegralEstimate::new(base.value * k, base.abs_error * k, base.method)
            }
            Profile::Steiner { n, lead, nodes } => {
                let mut value = lead.value * s.powi(*n as i32);
                let mut err = lead.abs_error * s.powi(*n as i32);
                for (j, (sj, vj)) in nodes.iter().enumerate() {
                    let l: f64 = nodes
                        .iter()
                        .enumerate()
                        .filter(|(k, _)| *k != j)
                        .map(|(_, (sk, _))| (s - sk) / (sj - sk))
                        .product();
                    value += l * (vj.value - lead.value * sj.powi(*n as i32));
                    err += l.abs() * (vj.abs_error + lead.abs_error * sj.powi(*n as i32));
                }
                IntegralEstimate::new(value, err, EstimateMethod::RadialQuadrature)
            }
            Profile::Radial { rule, fine, coarse } => {
                let rf: Vec<f64> = fine.par_iter().map(|r| r.radius(s)).collect();
                let rc: Vec<f64> = coarse.par_iter().map(|r| r.radius(s)).collect();
                rule.volume_from(&rf, &rc)
            }
            Profile::MonteCarlo { f, dirs, cfg } => {
                let r = 1.1 * dirs.iter().map(|d| f.sublevel_radius(d, s)).fold(0.0, f64::max);
                if !r.is_finite() {
                    return IntegralEstimate::new(f64::INFINITY, f64::INFINITY, EstimateMethod::MonteCarlo);
                }
                let n = f.dim();
                monte_carlo_volume(&vec![-r; n], &vec![r; n], cfg.samples, cfg.seed, |x| f.value(x) <= s)
            }
        }
    }
}

/// Upper bound on `int_S^inf e^{-s} |K_s| ds` from `K_s ⊆ (s/S) K_S`.
fn tail_upper(vol_s: f64, s_max: f64, n: usize) -> f64 {
    vol_s * s_max.powi(-(n as i32)) * factorial(n) * gamma_ur(n as f64 + 1.0, s_max)
}

/// `int e^{-phi} = int_0^inf e^{-s} |K_s(phi)| ds`.
pub fn logconcave_integral(f: &GeomCvxFn, cfg: &IntegrationConfig) -> Result<IntegralEstimate> {
    f.integrability_certificate()?;
    let profile = Profile::new(f, &cfg.volume)?;
    let n = f.dim();
    let mut memo: HashMap<u64, IntegralEstimate> = HashMap::new();
    let mut vol = |s: f64| -> IntegralEstimate { *memo.entry(s.to_bits()).or_insert_with(|| profile.volume(s)) };

    // truncation: grow S until the tail bound is small against a coarse value
    let mut s_max = (4.0 * n as f64).max(16.0);
    let (rough, tail_hi) = loop {
        let rough = coarse_simpson(&mut vol, s_max);
        if !rough.is_finite() {
            return Err(Error::NotIntegrable("a sublevel set has infinite volume".into()));
        }
        let t = tail_upper(vol(s_max).value, s_max, n);
        if t <= 0.1 * cfg.rel_tol * rough || s_max >= 1024.0 {
            break (rough, t);
        }
        s_max *= 2.0;
    };
    let tol = 0.5 * cfg.rel_tol * rough.max(f64::MIN_POSITIVE);
    let q = adaptive_simpson(|s| (-s).exp() * vol(s).value, 0.0, s_max, tol, 24);

    let mut nodes: Vec<(f64, IntegralEstimate)> = memo.iter().map(|(k, v)| (f64::from_bits(*k), *v)).collect();
    nodes.sort_by(|a, b| a.0.total_cmp(&b.0));
    let vol_err: f64 = nodes
        .windows(2)
        .map(|w| 0.5 * (w[1].0 - w[0].0) * ((-w[0].0).exp() * w[0].1.abs_error + (-w[1].0).exp() * w[1].1.abs_error))
        .sum();
    let last = nodes.last().map(|p| p.1).unwrap();
    let tail_lo = last.value * (-s_max).exp();
    let tail_hi = tail_hi + tail_upper(last.abs_error, s_max, n);
    let value = q.value + 0.5 * (tail_lo + tail_hi);
    let abs_error = q.abs_error + vol_err + 0.5 * (tail_hi - tail_lo);
    Ok(IntegralEstimate {
        value,
        abs_error,
        method: EstimateMethod::LayerCake,
        s_truncation: Some(s_max),
        lower_bound_only: false,
    })
}

/// Composite Simpson with 32 panels; its nodes are reused by the adaptive pass.
fn coarse_simpson(vol: &mut impl FnMut(f64) -> IntegralEstimate, s_max: f64) -> f64 {
    let m = 32;
    let h = s_max / m as f64;
    (0..=m)
        .map(|k| {
            let s = k as f64 * h;
            let w = if k == 0 || k == m { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
            w * (-s).exp() * vol(s).value
        })
        .sum::<f64>()
        * h
        / 3.0
}

/// `(s, |K_s(phi)|)` on a positive sorted grid.
pub fn layer_cake_profile(f: &GeomCvxFn, s_grid: &[f64], cfg: &VolumeConfig) -> Result<Vec<(f64, IntegralEstimate)>> {
    if s_grid.iter().any(|s| !(*s > 0.0 && s.is_finite())) || s_grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidConfig("level grid must be positive and sorted".into()));
    }
    let profile = Profile::new(f, cfg)?;
    Ok(s_grid.iter().map(|&s| (s, profile.volume(s))).collect())
}
