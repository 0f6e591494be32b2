//! Convex bodies, their polars and volumes.

mod body;
mod level;

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

pub use body::{BodyRep, ConvexBody, Halfspace, NamedShape, GEOM_TOL};
pub(crate) use body::{extreme_points, factorial};
pub use level::LevelBody;

use crate::directions::{default_resolution, SphereRule};
use crate::error::{Error, Result};
use crate::ext::dot;
use crate::integration::{EstimateMethod, IntegralEstimate};

/// `|B_2^n| = pi^(n/2) / Gamma(n/2 + 1)`, via `|B^n| = 2 pi |B^(n-2)| / n`.
pub fn ball_volume(n: usize) -> f64 {
    assert!(n >= 1, "dimension must be positive");
    let mut v = if n % 2 == 0 { 1.0 } else { 2.0 };
    let mut k = if n % 2 == 0 { 2 } else { 3 };
    while k <= n {
        v *= 2.0 * std::f64::consts::PI / k as f64;
        k += 2;
    }
    v
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VolumeMethod {
    RadialQuadrature,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VolumeConfig {
    pub method: VolumeMethod,
    /// Angular resolution of the radial rule (`None`: dimension default).
    pub resolution: Option<usize>,
    pub samples: usize,
    pub seed: u64,
}

impl VolumeConfig {
    pub fn radial() -> Self {
        VolumeConfig { method: VolumeMethod::RadialQuadrature, resolution: None, samples: 0, seed: 0 }
    }

    pub fn monte_carlo(samples: usize, seed: u64) -> Self {
        VolumeConfig { method: VolumeMethod::MonteCarlo, resolution: None, samples, seed }
    }

    /// Radial rule up to dimension 4, Monte Carlo above.
    pub fn for_dim(dim: usize, seed: u64) -> Self {
        if dim <= 4 {
            Self::radial()
        } else {
            Self::monte_carlo(400_000, seed)
        }
    }

    pub fn with_resolution(mut self, resolution: usize) -> Self {
        self.resolution = Some(resolution);
        self
    }

    pub(crate) fn check(&self, dim: usize) -> Result<()> {
        match self.method {
            VolumeMethod::RadialQuadrature if dim > 4 => Err(Error::InvalidConfig(format!(
                "radial quadrature supports n <= 4, got n = {dim}"
            ))),
            VolumeMethod::MonteCarlo if self.samples == 0 => {
                Err(Error::InvalidConfig("monte carlo needs a positive sample count".into()))
            }
            _ => Ok(()),
        }
    }
}

impl Default for VolumeConfig {
    fn default() -> Self {
        Self::radial()
    }
}

/// Shared, lazily built sphere rules.
pub fn sphere_rule(dim: usize, resolution: usize) -> Arc<SphereRule> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<SphereRule>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(r) = cache.lock().unwrap().get(&(dim, resolution)) {
        return r.clone();
    }
    let rule = Arc::new(SphereRule::new(dim, resolution));
    cache.lock().unwrap().entry((dim, resolution)).or_insert(rule).clone()
}

/// Fine and coarse sphere rules; their disagreement is the error estimate.
#[derive(Debug, Clone)]
pub struct RadialRule {
    pub fine: Arc<SphereRule>,
    pub coarse: Arc<SphereRule>,
}

impl RadialRule {
    pub fn new(dim: usize, resolution: Option<usize>) -> Self {
        let m = resolution.unwrap_or_else(|| default_resolution(dim));
        RadialRule { fine: sphere_rule(dim, m), coarse: sphere_rule(dim, (m / 2).max(2)) }
    }

    pub fn dim(&self) -> usize {
        self.fine.dim
    }

    /// Volume of the star body with radial function `radius`.
    pub fn volume<F>(&self, radius: F) -> IntegralEstimate
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        let fine: Vec<f64> = self.fine.dirs.par_iter().map(|d| radius(d)).collect();
        let coarse: Vec<f64> = self.coarse.dirs.par_iter().map(|d| radius(d)).collect();
        self.volume_from(&fine, &coarse)
    }

    pub fn volume_from(&self, fine: &[f64], coarse: &[f64]) -> IntegralEstimate {
        let v = self.fine.volume_from_radii(fine);
        let vc = self.coarse.volume_from_radii(coarse);
        let err = if self.dim() == 1 { 0.0 } else { (v - vc).abs() };
        let err = if v.is_finite() { err + 4.0 * f64::EPSILON * v } else { f64::INFINITY };
        IntegralEstimate::new(v, err, EstimateMethod::RadialQuadrature)
    }
}

/// Volume of a convex body.
pub fn body_volume(body: &ConvexBody, cfg: &VolumeConfig) -> Result<IntegralEstimate> {
    body.ensure_bounded()?;
    cfg.check(body.dim())?;
    match cfg.method {
        VolumeMethod::RadialQuadrature => {
            Ok(RadialRule::new(body.dim(), cfg.resolution).volume(|d| body.radial(d)))
        }
        VolumeMethod::MonteCarlo => {
            let n = body.dim();
            let mut lo = vec![0.0; n];
            let mut hi = vec![0.0; n];
            for k in 0..n {
                let mut e = vec![0.0; n];
                e[k] = 1.0;
                hi[k] = body.support(&e);
                e[k] = -1.0;
                lo[k] = -body.support(&e);
            }
            Ok(monte_carlo_volume(&lo, &hi, cfg.samples, cfg.seed, |x| body.contains(x)))
        }
    }
}

const MC_CHUNK: usize = 8192;

/// Hit-or-miss volume inside the box `[lo, hi]` with a 3-sigma error bar.
///
/// Chunk `k` draws from ChaCha stream `k` of `seed`, so the result does not
/// depend on thread scheduling.
pub fn monte_carlo_volume<F>(lo: &[f64], hi: &[f64], samples: usize, seed: u64, member: F) -> IntegralEstimate
where
    F: Fn(&[f64]) -> bool + Sync,
{
    let n = lo.len();
    let box_vol: f64 = lo.iter().zip(hi).map(|(a, b)| b - a).product();
    let chunks = samples.div_ceil(MC_CHUNK);
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let count = MC_CHUNK.min(samples - k * MC_CHUNK);
            let mut x = vec![0.0; n];
            let mut h = 0u64;
            for _ in 0..count {
                for (j, xj) in x.iter_mut().enumerate() {
                    *xj = lo[j] + (hi[j] - lo[j]) * rng.gen::<f64>();
                }
                if member(&x) {
                    h += 1;
                }
            }
            h
        })
        .sum();
    let p = hits as f64 / samples as f64;
    let value = box_vol * p;
    // a zero/full hit count still gets a one-sample resolution bar
    let sigma = (p * (1.0 - p) / samples as f64).sqrt().max(1.0 / samples as f64);
    IntegralEstimate::new(value, 3.0 * box_vol * sigma, EstimateMethod::MonteCarlo)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RadialKind {
    /// The vertex hull of the boundary points lies inside the set.
    Inner,
    /// The radial body contains the set.
    Outer,
}

/// Direction-radius sample of a star-shaped set.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialSet {
    pub dim: usize,
    pub directions: Vec<Vec<f64>>,
    pub radii: Vec<f64>,
    pub kind: RadialKind,
}

impl RadialSet {
    pub fn is_bounded(&self) -> bool {
        self.radii.iter().all(|r| r.is_finite())
    }

    pub fn points(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        self.directions
            .iter()
            .zip(&self.radii)
            .map(|(d, r)| d.iter().map(|x| x * r).collect())
    }

    /// Support function of the hull of the sampled boundary points.
    pub fn hull_support(&self, x: &[f64]) -> f64 {
        self.directions.iter().zip(&self.radii).fold(0.0, |m, (d, &r)| {
            let p = dot(d, x);
            if p <= 0.0 {
                m
            } else {
                f64::max(m, r * p)
            }
        })
    }

    pub fn max_radius(&self) -> f64 {
        self.radii.iter().fold(0.0, |m, &r| m.max(r))
    }

    pub fn min_radius(&self) -> f64 {
        self.radii.iter().fold(f64::INFINITY, |m, &r| m.min(r))
    }
}
