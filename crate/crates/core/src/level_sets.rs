//! Sublevel sets and the level-set inclusions between `phi`, `phi°` and `L phi`.
//!
//! All sets here are star-shaped about the origin, so inclusions are checked
//! radially, direction by direction.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::function::GeomCvxFn;
use crate::geometry::{LevelBody, RadialKind, RadialRule, RadialSet, VolumeConfig, VolumeMethod};
use crate::integration::{layer_cake_profile, IntegralEstimate};
use crate::transforms::{legendre_transform, polar_transform, sandwich};

/// Margins below `-INCLUSION_TOL` fail an inclusion.
pub const INCLUSION_TOL: f64 = 1e-6;

/// `K_t(phi) = {phi <= t}` sampled along `dirs`; unbounded rays give `+inf`.
pub fn sublevel_set(f: &GeomCvxFn, t: f64, dirs: &[Vec<f64>]) -> Result<RadialSet> {
    if !(t >= 0.0) {
        return Err(Error::LevelSet(format!("level must be nonnegative, got {t}")));
    }
    check_dirs(f.dim(), dirs)?;
    let radii = dirs.par_iter().map(|d| f.sublevel_radius(d, t)).collect();
    Ok(RadialSet { dim: f.dim(), directions: dirs.to_vec(), radii, kind: RadialKind::Inner })
}

/// `{e^{-phi} >= u} = K_{ln(1/u)}(phi)`.
pub fn superlevel_of_density(f: &GeomCvxFn, u: f64, dirs: &[Vec<f64>]) -> Result<RadialSet> {
    if !(u > 0.0 && u <= 1.0) {
        return Err(Error::LevelSet(format!("density level must lie in (0, 1], got {u}")));
    }
    sublevel_set(f, (1.0 / u).ln().max(0.0), dirs)
}

fn check_dirs(dim: usize, dirs: &[Vec<f64>]) -> Result<()> {
    match dirs.iter().find(|d| d.len() != dim) {
        Some(d) => Err(Error::DimensionMismatch { expected: dim, got: d.len() }),
        None => Ok(()),
    }
}

/// Radial check of `A ⊆ B ⊆ C` along a set of directions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelSetReport {
    pub s: f64,
    pub t: f64,
    /// `[first, second]` inclusion margins, one per direction (`>= 0` holds).
    pub inclusion_margins: [Vec<f64>; 2],
    pub verdict: [bool; 2],
    pub worst_direction: Vec<f64>,
    /// Set when the transform was replaced by its sandwich sets.
    pub bracketed: bool,
}

impl LevelSetReport {
    pub fn holds(&self) -> bool {
        self.verdict[0] && self.verdict[1]
    }

    /// Smallest margin of one inclusion.
    pub fn min_margin(&self, which: usize) -> f64 {
        self.inclusion_margins[which].iter().fold(f64::INFINITY, |m, &v| m.min(v))
    }

    /// Largest `|margin|` of one inclusion.
    pub fn max_abs_margin(&self, which: usize) -> f64 {
        self.inclusion_margins[which].iter().fold(0.0, |m, &v| m.max(v.abs()))
    }

    fn build(s: f64, t: f64, dirs: &[Vec<f64>], radii: Vec<[f64; 4]>, bracketed: bool) -> Self {
        // radii: [inner, middle lower set, middle upper set, outer]
        let first: Vec<f64> = radii.iter().map(|r| margin(r[0], r[1])).collect();
        let second: Vec<f64> = radii.iter().map(|r| margin(r[2], r[3])).collect();
        let mut worst = (f64::INFINITY, 0);
        for (k, m) in first.iter().zip(&second).map(|(a, b)| a.min(*b)).enumerate() {
            if m < worst.0 {
                worst = (m, k);
            }
        }
        let ok = |v: &[f64]| v.iter().all(|m| *m >= -INCLUSION_TOL);
        LevelSetReport {
            s,
            t,
            verdict: [ok(&first), ok(&second)],
            inclusion_margins: [first, second],
            worst_direction: dirs.get(worst.1).cloned().unwrap_or_default(),
            bracketed,
        }
    }
}

/// `(hi - lo)` relative to `max(1, hi)`; equal radii (also both infinite) give 0.
fn margin(lo: f64, hi: f64) -> f64 {
    if lo == hi {
        0.0
    } else if hi == f64::INFINITY {
        f64::INFINITY
    } else if lo == f64::INFINITY {
        f64::NEG_INFINITY
    } else {
        (hi - lo) / hi.abs().max(1.0)
    }
}

/// Radius of `K°` in direction `theta`: `1 / h_K(theta)`.
fn polar_radius(k: &LevelBody, theta: &[f64]) -> f64 {
    let h = k.support(theta);
    if h <= 0.0 {
        f64::INFINITY
    } else {
        1.0 / h
    }
}

/// `(K_{1/s} phi)° ⊆ K_s(phi°) ⊆ (st + 1)(K_t phi)°`.
///
/// When `phi°` has no closed form the middle set is replaced by the sandwich
/// sets: the first inclusion is tested against `K_s(psi_2)` and the second
/// against `K_s(psi_1)`, which only under- and over-state `K_s(phi°)`.
pub fn verify_polar_levelsets(f: &GeomCvxFn, s: f64, t: f64, dirs: &[Vec<f64>]) -> Result<LevelSetReport> {
    check_levels(s, t)?;
    check_dirs(f.dim(), dirs)?;
    let fp = polar_transform(f)?;
    let inner = f.level_body(1.0 / s)?;
    let outer = f.level_body(t)?;
    let middle = Middle::new(&fp, || Ok((sandwich(f, 1.0 / s)?.upper, sandwich(f, t)?.lower)))?;
    let radii = dirs
        .par_iter()
        .map(|d| {
            let (lo, hi) = middle.radii(d, s);
            [polar_radius(&inner, d), lo, hi, (s * t + 1.0) * polar_radius(&outer, d)]
        })
        .collect();
    Ok(LevelSetReport::build(s, t, dirs, radii, middle.bracketed()))
}

/// `s (K_s phi)° ⊆ K_s(L phi) ⊆ (s + t)(K_t phi)°`.
///
/// Without a closed-form `L phi` the middle set is `s K_{1/s}(phi°)` with
/// `phi°` replaced by its sandwich sets.
pub fn verify_legendre_levelsets(f: &GeomCvxFn, s: f64, t: f64, dirs: &[Vec<f64>]) -> Result<LevelSetReport> {
    check_levels(s, t)?;
    check_dirs(f.dim(), dirs)?;
    let fl = legendre_transform(f)?;
    let inner = f.level_body(s)?;
    let outer = f.level_body(t)?;
    let middle = if fl.is_sampled() {
        let (up, low) = (sandwich(f, s)?.upper, sandwich(f, t)?.lower);
        Some((up, low))
    } else {
        None
    };
    let radii = dirs
        .par_iter()
        .map(|d| {
            let (lo, hi) = match &middle {
                None => {
                    let r = fl.sublevel_radius(d, s);
                    (r, r)
                }
                Some((up, low)) => (s * up.sublevel_radius(d, 1.0 / s), s * low.sublevel_radius(d, 1.0 / s)),
            };
            [s * polar_radius(&inner, d), lo, hi, (s + t) * polar_radius(&outer, d)]
        })
        .collect();
    Ok(LevelSetReport::build(s, t, dirs, radii, middle.is_some()))
}

/// The middle set of the polar inclusion chain.
enum Middle {
    Exact(GeomCvxFn),
    /// `(psi_2, psi_1)`: the smaller and the larger sublevel set.
    Bracket(GeomCvxFn, GeomCvxFn),
}

impl Middle {
    fn new(fp: &GeomCvxFn, bracket: impl FnOnce() -> Result<(GeomCvxFn, GeomCvxFn)>) -> Result<Self> {
        if fp.is_sampled() {
            let (up, low) = bracket()?;
            Ok(Middle::Bracket(up, low))
        } else {
            Ok(Middle::Exact(fp.clone()))
        }
    }

    fn radii(&self, d: &[f64], s: f64) -> (f64, f64) {
        match self {
            Middle::Exact(g) => {
                let r = g.sublevel_radius(d, s);
                (r, r)
            }
            Middle::Bracket(up, low) => (up.sublevel_radius(d, s), low.sublevel_radius(d, s)),
        }
    }

    fn bracketed(&self) -> bool {
        matches!(self, Middle::Bracket(..))
    }
}

fn check_levels(s: f64, t: f64) -> Result<()> {
    for v in [s, t] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidConfig(format!("levels must be positive, got {v}")));
        }
    }
    Ok(())
}

/// `max_theta |r(K_c(L phi)) - c r(K_{1/c}(phi°))|` for closed-form transforms.
pub fn legendre_polar_identity(f: &GeomCvxFn, c: f64, dirs: &[Vec<f64>]) -> Result<f64> {
    check_levels(c, c)?;
    check_dirs(f.dim(), dirs)?;
    let fl = legendre_transform(f)?;
    let fp = polar_transform(f)?;
    if fl.is_sampled() || fp.is_sampled() {
        return Err(Error::Unsupported("identity needs closed-form transforms".into()));
    }
    Ok(dirs
        .par_iter()
        .map(|d| {
            let a = fl.sublevel_radius(d, c);
            let b = c * fp.sublevel_radius(d, 1.0 / c);
            if a == b {
                0.0
            } else {
                (a - b).abs()
            }
        })
        .reduce(|| 0.0, f64::max))
}

/// Volumes around the polar level-set sandwich at reciprocal levels.
///
/// `as_printed` checks `|K_{1/t}(phi)| <= |K_t(phi°)| <= 2^n |K_{1/t}(phi)|`;
/// `polar_reading` checks `|K_{1/t}(phi)°| <= |K_t(phi°)| <= 2^n |K_{1/t}(phi)°|`,
/// which is what the level-set inclusions give with `s = t`, `t -> 1/t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VolumeSandwichReport {
    pub t: f64,
    /// `|K_{1/t}(phi)|`
    pub level_volume: IntegralEstimate,
    /// `|K_{1/t}(phi)°|`
    pub level_polar_volume: IntegralEstimate,
    /// `|K_t(phi°)|`
    pub polar_level_volume: IntegralEstimate,
    pub as_printed: [bool; 2],
    pub polar_reading: [bool; 2],
}

impl VolumeSandwichReport {
    /// `(lower ok, upper ok)` for the polar reading.
    pub fn verdict(&self) -> (bool, bool) {
        (self.polar_reading[0], self.polar_reading[1])
    }
}

/// Cap on the angular resolution when the polar radius needs a sphere search.
const SEARCHED_POLAR_RESOLUTION: usize = 48;

/// `|K°|` from `r_{K°} = 1 / h_K` on the sphere.
pub fn polar_volume(k: &LevelBody, cfg: &VolumeConfig) -> Result<IntegralEstimate> {
    cfg.check(k.dim())?;
    if cfg.method != VolumeMethod::RadialQuadrature {
        return Err(Error::InvalidConfig("polar volumes use the radial rule".into()));
    }
    let searched = matches!(k, LevelBody::Intersection(_)) && !k.is_polyhedral();
    let res = match (cfg.resolution, searched && k.dim() >= 3) {
        (r, true) => Some(r.unwrap_or(SEARCHED_POLAR_RESOLUTION).min(SEARCHED_POLAR_RESOLUTION)),
        (r, false) => r,
    };
    Ok(RadialRule::new(k.dim(), res).volume(|d| polar_radius(k, d)))
}

/// Volume form of the level-set sandwich; `t = 0` is rejected.
pub fn volume_sandwich_check(f: &GeomCvxFn, t: f64, cfg: &VolumeConfig) -> Result<VolumeSandwichReport> {
    check_levels(t, t)?;
    let fp = polar_transform(f)?;
    if fp.is_sampled() {
        return Err(Error::Unsupported("volume sandwich needs a closed-form polar".into()));
    }
    let level_volume = layer_cake_profile(f, &[1.0 / t], cfg)?[0].1;
    let level_polar_volume = polar_volume(&f.level_body(1.0 / t)?, cfg)?;
    let polar_level_volume = layer_cake_profile(&fp, &[t], cfg)?[0].1;
    let two_n = 2f64.powi(f.dim() as i32);
    let le = |a: &IntegralEstimate, ka: f64, b: &IntegralEstimate| {
        ka * (a.value - a.abs_error) <= b.value + b.abs_error + 1e-12 * b.value.abs()
    };
    let ge = |a: &IntegralEstimate, b: &IntegralEstimate, kb: f64| {
        a.value - a.abs_error <= kb * (b.value + b.abs_error) * (1.0 + 1e-12)
    };
    Ok(VolumeSandwichReport {
        t,
        as_printed: [le(&level_volume, 1.0, &polar_level_volume), ge(&polar_level_volume, &level_volume, two_n)],
        polar_reading: [
            le(&level_polar_volume, 1.0, &polar_level_volume),
            ge(&polar_level_volume, &level_polar_volume, two_n),
        ],
        level_volume,
        level_polar_volume,
        polar_level_volume,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::directions::directions;
    use crate::geometry::ConvexBody;

    #[test]
    fn sublevel_examples() {
        let dirs = directions(2, 64);
        let g = GeomCvxFn::gauge(ConvexBody::cube(2, 1.0).unwrap(), 1.0).unwrap();
        let two = ConvexBody::cube(2, 2.0).unwrap();
        let rs = sublevel_set(&g, 2.0, &dirs).unwrap();
        for (d, r) in dirs.iter().zip(&rs.radii) {
            assert!((r - two.radial(d)).abs() < 1e-12);
        }
        let q = GeomCvxFn::half_square(2);
        assert!(sublevel_set(&q, 2.0, &dirs).unwrap().radii.iter().all(|r| (r - 2.0).abs() < 1e-12));
        let ind = GeomCvxFn::indicator(ConvexBody::cube(2, 1.0).unwrap());
        let a = superlevel_of_density(&ind, 0.3, &dirs).unwrap();
        let b = sublevel_set(&ind, 0.0, &dirs).unwrap();
        assert_eq!(a.radii, b.radii);
        let n = GeomCvxFn::euclidean_norm(2);
        let u = superlevel_of_density(&n, (-1.0f64).exp(), &dirs).unwrap();
        assert!(u.radii.iter().all(|r| (r - 1.0).abs() < 1e-12));
        assert!(superlevel_of_density(&n, 0.0, &dirs).is_err());
    }

    #[test]
    fn gauge_and_indicator_are_equality_cases() {
        let dirs = directions(2, 90);
        for f in [
            GeomCvxFn::gauge(ConvexBody::cube(2, 1.0).unwrap(), 1.0).unwrap(),
            GeomCvxFn::indicator(ConvexBody::cross_polytope(2, 1.0).unwrap()),
        ] {
            for (s, t) in [(0.5, 2.0), (1.0, 1.0), (2.0, 0.5), (4.0, 0.25)] {
                let r = verify_polar_levelsets(&f, s, t, &dirs).unwrap();
                assert!(r.holds() && r.max_abs_margin(0) <= 1e-9, "{r:?}");
            }
        }
    }

    #[test]
    fn quadratic_margins() {
        // phi = |x|^2/2 is self-polar: (K_1)° = B/sqrt(2), K_1(phi°) = sqrt(2) B = 2 (K_1)°
        let f = GeomCvxFn::half_square(2);
        let r = verify_polar_levelsets(&f, 1.0, 1.0, &directions(2, 90)).unwrap();
        assert!(r.holds());
        assert!(r.inclusion_margins[0].iter().all(|m| (m - 0.5).abs() < 1e-12), "{r:?}");
        assert!(r.max_abs_margin(1) < 1e-12);
    }

    #[test]
    fn legendre_examples() {
        let dirs = directions(2, 90);
        let f = GeomCvxFn::euclidean_norm(2);
        let r = verify_legendre_levelsets(&f, 1.0, 1.0, &dirs).unwrap();
        assert!(r.holds() && r.max_abs_margin(0) < 1e-12);
        // (1 + 3)(K_3)° = (4/3) B contains B
        let r = verify_legendre_levelsets(&f, 1.0, 3.0, &dirs).unwrap();
        assert!(r.holds());
        assert!(r.inclusion_margins[1].iter().all(|m| (m - 0.25).abs() < 1e-12));
        let q = GeomCvxFn::half_square(2);
        assert!(verify_legendre_levelsets(&q, 2.0, 2.0, &dirs).unwrap().holds());
    }

    #[test]
    fn identity_examples() {
        let n1 = GeomCvxFn::euclidean_norm(1);
        assert!(legendre_polar_identity(&n1, 2.0, &directions(1, 2)).unwrap() < 1e-12);
        let dirs = directions(2, 90);
        let ind = GeomCvxFn::indicator(ConvexBody::cube(2, 1.0).unwrap());
        assert!(legendre_polar_identity(&ind, 1.0, &dirs).unwrap() < 1e-12);
        assert!(legendre_polar_identity(&GeomCvxFn::half_square(2), 1.0, &dirs).unwrap() < 1e-12);
    }

    #[test]
    fn sampled_polar_uses_sound_brackets() {
        let a = GeomCvxFn::gauge(ConvexBody::cube(2, 1.0).unwrap(), 1.0).unwrap();
        let b = GeomCvxFn::power_gauge(ConvexBody::cross_polytope(2, 1.0).unwrap(), 2.0, 0.5).unwrap();
        let m = GeomCvxFn::max_of(a, b).unwrap();
        let r = verify_polar_levelsets(&m, 1.0, 1.0, &directions(2, 36)).unwrap();
        assert!(r.bracketed && r.holds(), "{r:?}");
    }

    #[test]
    fn volume_sandwich_examples() {
        let cfg = VolumeConfig::radial();
        let g = GeomCvxFn::gauge(ConvexBody::cube(2, 1.0).unwrap(), 1.0).unwrap();
        let r = volume_sandwich_check(&g, 1.0, &cfg).unwrap();
        assert_eq!(r.verdict(), (true, true));
        assert!((r.level_polar_volume.value - r.polar_level_volume.value).abs() < 1e-3);
        let ind = GeomCvxFn::indicator(ConvexBody::ball(2, 1.0).unwrap());
        assert_eq!(volume_sandwich_check(&ind, 1.0, &cfg).unwrap().verdict(), (true, true));
        let q = GeomCvxFn::half_square(2);
        let r = volume_sandwich_check(&q, 1.0, &cfg).unwrap();
        // |sqrt(2) B| against |(sqrt 2 B)°| = pi/2 and 4 pi/2
        assert_eq!(r.verdict(), (true, true));
        assert!((r.polar_level_volume.value - 2.0 * std::f64::consts::PI).abs() < 1e-9);
        assert!(volume_sandwich_check(&q, 0.0, &cfg).is_err());
    }
}
