//! Polarity transform `phi -> phi°` and Legendre transform `phi -> L phi`.

use rayon::prelude::*;

use crate::directions::{directions, halton};
use crate::error::{Error, Result};
use crate::ext::{dot, ext_div};
use crate::function::{Family, GeomCvxFn};
use crate::geometry::{ConvexBody, LevelBody};

/// Coarse samples per dimension for sampled transforms.
pub const SAMPLE_PER_DIM: usize = 4096;
/// Local refinement steps after the coarse sup.
pub const REFINE_ITERS: usize = 20;

/// `phi°(x) = sup_y (<x,y> - 1) / phi(y)`.
///
/// Closed forms for every family except `MaxOf` and `Sampled`, which come
/// back as `Sampled` lower bounds on [`default_query_points`].
pub fn polar_transform(f: &GeomCvxFn) -> Result<GeomCvxFn> {
    match f.family() {
        Family::Gauge { body, t } => GeomCvxFn::gauge(body.polar()?, 1.0 / t),
        Family::Indicator(k) => Ok(GeomCvxFn::indicator(k.polar()?)),
        Family::RestrictedGauge { k, l } => distance_or_hinged(k.polar()?, l.polar()?),
        Family::ZeroSetGauge { k, l } => GeomCvxFn::restricted_gauge(k.polar()?, l.polar()?),
        Family::HingedGauge { body, a } => {
            let p = body.polar()?;
            GeomCvxFn::restricted_gauge(p.scaled(*a), p)
        }
        Family::PowerGauge { body, p, scale } => {
            let c = (p - 1.0).powf(p - 1.0) / (scale * p.powf(*p));
            GeomCvxFn::power_gauge(body.polar()?, *p, c)
        }
        Family::GaugeDistance(gd) => GeomCvxFn::restricted_gauge(gd.m.polar()?, gd.p.polar()?),
        Family::MaxOf(..) | Family::Sampled(_) => {
            let queries = default_query_points(f)?;
            let sample = default_sample(f)?;
            let values: Vec<f64> = queries
                .par_iter()
                .map(|x| polar_sampled_with(f, x, &sample))
                .collect::<Result<_>>()?;
            GeomCvxFn::sampled(queries, values, true)
        }
    }
}

/// `inf_{z in p} ||x - z||_m`, collapsing to a hinged gauge when `p = mu m`.
fn distance_or_hinged(m: ConvexBody, p: ConvexBody) -> Result<GeomCvxFn> {
    match m.homothety_ratio(&p) {
        Some(mu) => GeomCvxFn::hinged_gauge(m.scaled(mu), mu),
        None => GeomCvxFn::gauge_distance(m, p),
    }
}

/// `L phi(x) = sup_y <x,y> - phi(y)`.
pub fn legendre_transform(f: &GeomCvxFn) -> Result<GeomCvxFn> {
    match f.family() {
        Family::Gauge { body, t } => Ok(GeomCvxFn::indicator(body.polar()?.scaled(*t))),
        Family::Indicator(k) => GeomCvxFn::gauge(k.polar()?, 1.0),
        Family::PowerGauge { body, p, scale } => {
            let kp = body.polar()?;
            if *p == 1.0 {
                Ok(GeomCvxFn::indicator(kp.scaled(*scale)))
            } else {
                let q = p / (p - 1.0);
                GeomCvxFn::power_gauge(kp, q, (scale * p).powf(1.0 - q) / q)
            }
        }
        Family::HingedGauge { body, a } => {
            let kp = body.polar()?;
            GeomCvxFn::restricted_gauge(kp.clone(), kp.scaled(*a))
        }
        Family::RestrictedGauge { k, l } => distance_or_hinged(l.polar()?, k.polar()?),
        Family::GaugeDistance(gd) => GeomCvxFn::restricted_gauge(gd.p.polar()?, gd.m.polar()?),
        Family::ZeroSetGauge { k, l } => GeomCvxFn::restricted_gauge(l.polar()?, k.polar()?),
        Family::MaxOf(..) | Family::Sampled(_) => {
            let queries = default_query_points(f)?;
            let sample = default_sample(f)?;
            let values: Vec<f64> = queries
                .par_iter()
                .map(|x| legendre_pointwise(f, x, &sample))
                .collect::<Result<_>>()?;
            GeomCvxFn::sampled(queries, values, true)
        }
    }
}

/// `max_{y in sample} ext_div(<x,y> - 1, phi(y))`; a lower bound for `phi°(x)`.
pub fn polar_pointwise(f: &GeomCvxFn, x: &[f64], sample: &[Vec<f64>]) -> Result<f64> {
    Ok(argmax_pointwise(f, x, sample)?.1)
}

fn polar_ratio(f: &GeomCvxFn, x: &[f64], y: &[f64]) -> Result<f64> {
    Ok(ext_div(dot(x, y) - 1.0, f.evaluate(y)?))
}

/// Sample index and value of the best ratio; ties go to the lowest index.
fn argmax_pointwise(f: &GeomCvxFn, x: &[f64], sample: &[Vec<f64>]) -> Result<(usize, f64)> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    if x.len() != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), got: x.len() });
    }
    let mut best = (0, f64::NEG_INFINITY);
    for (i, y) in sample.iter().enumerate() {
        let v = polar_ratio(f, x, y)?;
        if v > best.1 {
            best = (i, v);
        }
    }
    // the sup over all of R^n is never below the y -> 0 limit
    Ok((best.0, best.1.max(0.0)))
}

/// `max_{y in sample} <x,y> - phi(y)`; a lower bound for `L phi(x)`.
pub fn legendre_pointwise(f: &GeomCvxFn, x: &[f64], sample: &[Vec<f64>]) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut best = f64::NEG_INFINITY;
    for y in sample {
        let v = f.evaluate(y)?;
        if v.is_finite() {
            best = best.max(dot(x, y) - v);
        }
    }
    // y = 0 gives 0
    Ok(best.max(0.0))
}

/// Two-stage sampled polar: coarse sup over [`default_sample`], then local
/// refinement around the argmax.
pub fn polar_sampled(f: &GeomCvxFn, x: &[f64]) -> Result<f64> {
    let sample = default_sample(f)?;
    polar_sampled_with(f, x, &sample)
}

fn polar_sampled_with(f: &GeomCvxFn, x: &[f64], sample: &[Vec<f64>]) -> Result<f64> {
    let (i, mut best) = argmax_pointwise(f, x, sample)?;
    if f.is_sampled() {
        return Ok(best);
    }
    let n = f.dim();
    let mut y = sample[i].clone();
    let scale = sample.iter().map(|p| p.iter().fold(0.0f64, |m, v| m.max(v.abs()))).fold(0.0, f64::max);
    let mut h = 2.0 * scale / (sample.len() as f64 / n as f64).powf(1.0 / n as f64);
    for _ in 0..REFINE_ITERS {
        let mut improved = false;
        let mut moves: Vec<Vec<f64>> = Vec::with_capacity(2 * n + 2);
        for k in 0..n {
            for s in [1.0, -1.0] {
                let mut z = y.clone();
                z[k] += s * h;
                moves.push(z);
            }
        }
        for s in [1.0 + h / (1.0 + scale), 1.0 / (1.0 + h / (1.0 + scale))] {
            moves.push(y.iter().map(|v| v * s).collect());
        }
        for z in moves {
            let v = polar_ratio(f, x, &z)?;
            if v > best {
                best = v;
                y = z;
                improved = true;
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
    Ok(best)
}

/// `4096 n` Halton points in the box spanned by the level-8 extent.
pub fn default_sample(f: &GeomCvxFn) -> Result<Vec<Vec<f64>>> {
    if let Family::Sampled(s) = f.family() {
        return Ok(s.points.clone());
    }
    let n = f.dim();
    let r = extent(f, 8.0);
    let mut pts = vec![vec![0.0; n]];
    pts.extend((1..=(SAMPLE_PER_DIM * n) as u64).map(|i| halton(i, n).iter().map(|u| r * (2.0 * u - 1.0)).collect()));
    Ok(pts)
}

/// Origin plus 50 directions at radii `{0.25, 0.5, 1, 2, 4}` times the
/// level-1 extent.
pub fn default_query_points(f: &GeomCvxFn) -> Result<Vec<Vec<f64>>> {
    let n = f.dim();
    let r = match f.family() {
        Family::Sampled(s) => s.points.iter().map(|p| p.iter().fold(0.0f64, |m, v| m.max(v.abs()))).fold(0.0, f64::max),
        _ => extent(f, 1.0),
    };
    let r = if r > 0.0 && r.is_finite() { r } else { 1.0 };
    let mut pts = vec![vec![0.0; n]];
    for d in directions(n, 50) {
        for s in crate::function::RAY_RADII {
            pts.push(d.iter().map(|v| v * s * r).collect());
        }
    }
    Ok(pts)
}

/// Largest sampled radius of `{phi <= s}`, capped for unbounded sets.
fn extent(f: &GeomCvxFn, s: f64) -> f64 {
    let r = directions(f.dim(), 200)
        .iter()
        .map(|d| f.sublevel_radius(d, s))
        .fold(0.0, f64::max);
    if r.is_finite() && r > 0.0 {
        r.min(1e6)
    } else {
        10.0
    }
}

/// The two hat-min / max brackets of `phi°` built from one level set.
#[derive(Debug, Clone, PartialEq)]
pub struct SandwichPair {
    /// `(1/t)(||x|| - 1)_+` for the norm of `K_t(phi)°`.
    pub lower: GeomCvxFn,
    /// `(1/t)||x||` on `K_t(phi)°`, `+inf` outside.
    pub upper: GeomCvxFn,
    pub level_t: f64,
}

/// `psi_1^t <= phi° <= psi_2^t`.
pub fn sandwich(f: &GeomCvxFn, t: f64) -> Result<SandwichPair> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidConfig(format!("level t must be positive, got {t}")));
    }
    let kt = level_convex_body(&f.level_body(t)?)?;
    let kp = kt.polar()?;
    Ok(SandwichPair {
        lower: GeomCvxFn::hinged_gauge(kp.clone(), 1.0 / t)?,
        upper: GeomCvxFn::restricted_gauge(kp.scaled(t), kp)?,
        level_t: t,
    })
}

/// A level body as a single convex body, when it has a finite description.
pub fn level_convex_body(b: &LevelBody) -> Result<ConvexBody> {
    let fail = || Error::LevelSet("level set has no single-body representation".into());
    match b {
        LevelBody::Body(k) => Ok(k.clone()),
        LevelBody::Point(_) => Err(Error::LevelSet("level set is the origin".into())),
        LevelBody::Intersection(parts) => {
            let mut hs = Vec::new();
            for p in parts {
                hs.extend(level_convex_body(p)?.to_halfspaces().ok_or_else(fail)?);
            }
            let body = ConvexBody::from_halfspaces(hs)?;
            body.ensure_bounded()?;
            Ok(body)
        }
        LevelBody::Sum(parts) => {
            let mut acc: Vec<Vec<f64>> = vec![vec![0.0; b.dim()]];
            for p in parts {
                let vs = level_convex_body(p)?.to_vertices().ok_or_else(fail)?;
                acc = acc
                    .iter()
                    .flat_map(|a| vs.iter().map(move |v| a.iter().zip(v).map(|(x, y)| x + y).collect()))
                    .collect();
            }
            ConvexBody::from_vertices(acc)
        }
        LevelBody::Union(_) => Err(fail()),
    }
}

/// `(phi(x) + phi°(y)) / 2 >= sqrt((<x,y> - 1)_+)` for closed-form polars.
pub fn ball_pointwise_inequality(f: &GeomCvxFn, x: &[f64], y: &[f64]) -> Result<bool> {
    let fp = polar_transform(f)?;
    if fp.is_sampled() {
        return Err(Error::Unsupported("pointwise inequality needs a closed-form polar".into()));
    }
    ball_pointwise_with(f, &fp, x, y)
}

/// As [`ball_pointwise_inequality`] with a precomputed polar.
pub fn ball_pointwise_with(f: &GeomCvxFn, fp: &GeomCvxFn, x: &[f64], y: &[f64]) -> Result<bool> {
    let lhs = 0.5 * (f.evaluate(x)? + fp.evaluate(y)?);
    let rhs = (dot(x, y) - 1.0).max(0.0).sqrt();
    Ok(lhs >= rhs * (1.0 - 1e-12))
}

/// The displayed equality-case expression for the polar of `||x||_K` on `L`:
/// `0` on `L°`, `||x||_{K°} (1 - 1/||x||_{L°})` off `L°`.
pub fn restricted_polar_form(k_polar: &ConvexBody, l_polar: &ConvexBody, x: &[f64]) -> f64 {
    let gl = l_polar.gauge(x);
    if gl <= 1.0 {
        0.0
    } else {
        k_polar.gauge(x) * (1.0 - 1.0 / gl)
    }
}
