//! Deterministic direction sets on the unit sphere, sphere quadrature rules
//! and a maximiser for quasi-concave functions of a direction.

use std::f64::consts::PI;

use statrs::distribution::{ContinuousCDF, Normal};

use crate::ext::{dot, norm};

/// Default direction count for level-set comparisons.
pub fn default_direction_count(dim: usize) -> usize {
    match dim {
        1 => 2,
        2 => 360,
        3 => 1000,
        _ => 4000,
    }
}

/// Default direction set for `dim`: both signs in 1-D, uniform angles in 2-D,
/// a Fibonacci sphere in 3-D and normalised Halton points above.
pub fn default_directions(dim: usize) -> Vec<Vec<f64>> {
    directions(dim, default_direction_count(dim))
}

pub fn directions(dim: usize, count: usize) -> Vec<Vec<f64>> {
    match dim {
        0 => Vec::new(),
        1 => vec![vec![1.0], vec![-1.0]],
        2 => circle(count),
        3 => fibonacci_sphere(count),
        _ => halton_sphere(dim, count),
    }
}

pub fn circle(count: usize) -> Vec<Vec<f64>> {
    (0..count)
        .map(|k| {
            let a = 2.0 * PI * k as f64 / count as f64;
            vec![a.cos(), a.sin()]
        })
        .collect()
}

pub fn fibonacci_sphere(count: usize) -> Vec<Vec<f64>> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|k| {
            let z = 1.0 - 2.0 * (k as f64 + 0.5) / count as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let a = golden * k as f64;
            vec![r * a.cos(), r * a.sin(), z]
        })
        .collect()
}

const PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Radical inverse of `index` in `base`.
pub fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while index > 0 {
        r += f * (index % base) as f64;
        index /= base;
        f *= inv;
    }
    r
}

/// Halton point `index` (starting at 1) in `[0,1)^dim`.
pub fn halton(index: u64, dim: usize) -> Vec<f64> {
    (0..dim).map(|d| radical_inverse(index, PRIMES[d % PRIMES.len()])).collect()
}

/// Halton points pushed through the Gaussian quantile and normalised.
pub fn halton_sphere(dim: usize, count: usize) -> Vec<Vec<f64>> {
    let normal = Normal::standard();
    let mut out = Vec::with_capacity(count);
    let mut idx = 1u64;
    while out.len() < count {
        let g: Vec<f64> = halton(idx, dim).iter().map(|&u| normal.inverse_cdf(u)).collect();
        idx += 1;
        let l = norm(&g);
        if l > 1e-12 && l.is_finite() {
            out.push(g.iter().map(|x| x / l).collect());
        }
    }
    out
}

/// Quadrature rule on the unit sphere: weights sum to the surface area.
#[derive(Debug, Clone)]
pub struct SphereRule {
    pub dim: usize,
    pub dirs: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

/// Surface area of `S^{n-1}`, i.e. `n |B_2^n|`.
pub fn sphere_area(dim: usize) -> f64 {
    dim as f64 * crate::geometry::ball_volume(dim)
}

/// Default angular resolution for volume rules.
pub fn default_resolution(dim: usize) -> usize {
    match dim {
        1 => 1,
        2 => 1024,
        3 => 192,
        _ => 40,
    }
}

impl SphereRule {
    /// Hyperspherical-coordinate midpoint product rule. Polar angles get
    /// `resolution` nodes, the azimuth `2*resolution`; weights are rescaled so
    /// constants integrate exactly.
    pub fn new(dim: usize, resolution: usize) -> Self {
        assert!(dim >= 1);
        if dim == 1 {
            return SphereRule { dim, dirs: vec![vec![1.0], vec![-1.0]], weights: vec![1.0, 1.0] };
        }
        let m = resolution.max(2);
        let polar: Vec<f64> = (0..m).map(|k| (k as f64 + 0.5) * PI / m as f64).collect();
        let az: Vec<f64> = (0..2 * m).map(|k| (k as f64 + 0.5) * PI / m as f64).collect();
        let mut dirs = Vec::new();
        let mut weights = Vec::new();
        let n_polar = dim - 2;
        let mut idx = vec![0usize; n_polar];
        loop {
            let mut w_polar = 1.0;
            let mut sin_prod = 1.0;
            let mut head = Vec::with_capacity(dim);
            for (k, &i) in idx.iter().enumerate() {
                let a = polar[i];
                head.push(sin_prod * a.cos());
                w_polar *= a.sin().powi((dim - 2 - k) as i32);
                sin_prod *= a.sin();
            }
            for &b in &az {
                let mut d = head.clone();
                d.push(sin_prod * b.cos());
                d.push(sin_prod * b.sin());
                dirs.push(d);
                weights.push(w_polar);
            }
            // odometer
            let mut k = 0;
            loop {
                if k == n_polar {
                    let total: f64 = weights.iter().sum();
                    let s = sphere_area(dim) / total;
                    weights.iter_mut().for_each(|w| *w *= s);
                    return SphereRule { dim, dirs, weights };
                }
                idx[k] += 1;
                if idx[k] < m {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.dirs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dirs.is_empty()
    }

    /// `(1/n) sum w r^n` for per-direction radii.
    pub fn volume_from_radii(&self, radii: &[f64]) -> f64 {
        let n = self.dim as i32;
        self.weights.iter().zip(radii).map(|(w, r)| w * r.powi(n)).sum::<f64>() / self.dim as f64
    }
}

/// Orthonormal basis of the tangent space at unit vector `u`.
fn tangent_basis(u: &[f64]) -> Vec<Vec<f64>> {
    let n = u.len();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n - 1);
    for k in 0..n {
        let mut v = vec![0.0; n];
        v[k] = 1.0;
        let p = dot(&v, u);
        for (vi, ui) in v.iter_mut().zip(u) {
            *vi -= p * ui;
        }
        for b in &basis {
            let p = dot(&v, b);
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi -= p * bi;
            }
        }
        let l = norm(&v);
        if l > 1e-6 {
            basis.push(v.iter().map(|x| x / l).collect());
            if basis.len() == n - 1 {
                break;
            }
        }
    }
    basis
}

fn sanitize(v: f64) -> f64 {
    if v.is_nan() {
        f64::NEG_INFINITY
    } else {
        v
    }
}

/// Maximise `f` over the unit sphere.
///
/// `f` must be quasi-concave in the cone sense (superlevel sets are convex
/// cones intersected with the sphere), which makes any local maximum global.
/// 1-D is exact; otherwise a deterministic global grid is refined locally
/// (golden section on the circle, shrinking pattern search above).
pub fn sphere_sup<F>(dim: usize, f: F) -> (f64, Vec<f64>)
where
    F: Fn(&[f64]) -> f64,
{
    let f = |u: &[f64]| sanitize(f(u));
    match dim {
        1 => {
            let (a, b) = (f(&[1.0]), f(&[-1.0]));
            if a >= b {
                (a, vec![1.0])
            } else {
                (b, vec![-1.0])
            }
        }
        2 => {
            let g = 720;
            let at = |t: f64| [t.cos(), t.sin()];
            let step = 2.0 * PI / g as f64;
            let (mut best_t, mut best) = (0.0, f64::NEG_INFINITY);
            for k in 0..g {
                let t = k as f64 * step;
                let v = f(&at(t));
                if v > best {
                    best = v;
                    best_t = t;
                }
            }
            let (mut lo, mut hi) = (best_t - step, best_t + step);
            let r = (5f64.sqrt() - 1.0) / 2.0;
            let mut x1 = hi - r * (hi - lo);
            let mut x2 = lo + r * (hi - lo);
            let mut f1 = f(&at(x1));
            let mut f2 = f(&at(x2));
            for _ in 0..80 {
                if f1 < f2 {
                    lo = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = lo + r * (hi - lo);
                    f2 = f(&at(x2));
                } else {
                    hi = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = hi - r * (hi - lo);
                    f1 = f(&at(x1));
                }
            }
            for (t, v) in [(x1, f1), (x2, f2)] {
                if v > best {
                    best = v;
                    best_t = t;
                }
            }
            (best, at(best_t).to_vec())
        }
        _ => {
            let count = if dim == 3 { 2000 } else { 4000 };
            let grid = directions(dim, count);
            let mut best_u = grid[0].clone();
            let mut best = f64::NEG_INFINITY;
            for u in &grid {
                let v = f(u);
                if v > best {
                    best = v;
                    best_u = u.clone();
                }
            }
            let spacing = (sphere_area(dim) / count as f64).powf(1.0 / (dim - 1) as f64);
            let h = (2.0 * spacing).min(0.5);
            let iters = if dim == 3 { 64 } else { 40 };
            // gnomonic chart around the incumbent: the objective is a ratio of
            // a concave and a convex 1-homogeneous function, hence
            // quasi-concave in the chart, and nested golden sections apply
            for _ in 0..8 {
                let basis = tangent_basis(&best_u);
                let chart = |t: &[f64]| {
                    let mut w = best_u.clone();
                    for (b, &s) in basis.iter().zip(t) {
                        for (wi, bi) in w.iter_mut().zip(b) {
                            *wi += s * bi;
                        }
                    }
                    let l = norm(&w);
                    w.iter_mut().for_each(|x| *x /= l);
                    w
                };
                let (v, t) = nested_golden(&|t: &[f64]| f(&chart(t)), dim - 1, h, iters);
                let on_edge = t.iter().any(|x| x.abs() > 0.98 * h);
                if v > best {
                    best = v;
                    best_u = chart(&t);
                }
                if !on_edge {
                    break;
                }
            }
            (best, best_u)
        }
    }
}

/// Golden-section maximisation of a unimodal function; returns `(argmax, max)`.
fn golden_max<F: FnMut(f64) -> f64>(mut g: F, lo: f64, hi: f64, iters: usize) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (lo, hi);
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let mut f1 = g(x1);
    let mut f2 = g(x2);
    for _ in 0..iters {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = g(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = g(x1);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Maximise a quasi-concave `f` over `[-h, h]^k` by nested golden sections
/// (partial maxima of quasi-concave functions are quasi-concave).
fn nested_golden(f: &dyn Fn(&[f64]) -> f64, k: usize, h: f64, iters: usize) -> (f64, Vec<f64>) {
    if k == 1 {
        let (t, v) = golden_max(|t| f(&[t]), -h, h, iters);
        return (v, vec![t]);
    }
    let inner = |t0: f64| {
        let g = |rest: &[f64]| {
            let mut t = Vec::with_capacity(k);
            t.push(t0);
            t.extend_from_slice(rest);
            f(&t)
        };
        nested_golden(&g, k - 1, h, iters)
    };
    let (t0, _) = golden_max(|t0| inner(t0).0, -h, h, iters);
    let (v, rest) = inner(t0);
    let mut t = vec![t0];
    t.extend(rest);
    (v, t)
}
