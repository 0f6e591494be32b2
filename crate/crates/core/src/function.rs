//! Geometric convex functions: `phi >= 0`, `phi(0) = 0`, convex, lsc.

use std::sync::{Arc, OnceLock};

use serde::Serialize;

use crate::directions::{default_directions, directions, sphere_sup};
use crate::error::{Error, Result};
use crate::ext::{dot, norm};
use crate::geometry::{ConvexBody, LevelBody};
use crate::lp::{Affine, LinearProgram, LpOutcome};

/// Maximum nesting of [`Family::MaxOf`].
pub const MAX_DEPTH: usize = 8;

const MEMBER_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// `0` on `K`, `+inf` off `K`.
    Indicator(ConvexBody),
    /// `t ||x||_K`
    Gauge { body: ConvexBody, t: f64 },
    /// `||x||_K` on `L`, `+inf` off `L`.
    RestrictedGauge { k: ConvexBody, l: ConvexBody },
    /// `0` on `L`, `||x||_K` off `L`. Not convex unless the jump is absent;
    /// kept as a transform input.
    ZeroSetGauge { k: ConvexBody, l: ConvexBody },
    /// `max(0, a ||x||_K - a)`
    HingedGauge { body: ConvexBody, a: f64 },
    /// `scale ||x||_K^p`, `p >= 1`.
    PowerGauge { body: ConvexBody, p: f64, scale: f64 },
    /// `inf_{z in P} ||x - z||_M`, the exact polar of a restricted gauge.
    GaugeDistance(GaugeDistance),
    MaxOf(Box<GeomCvxFn>, Box<GeomCvxFn>),
    Sampled(SampledFn),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeomCvxFn {
    dim: usize,
    family: Family,
}

/// `x -> inf_{z in P} ||x - z||_M`; sublevel sets are `P + sM`.
#[derive(Debug, Clone)]
pub struct GaugeDistance {
    pub m: ConvexBody,
    pub p: ConvexBody,
    fan: Arc<OnceLock<Option<Vec<FanFacet>>>>,
}

/// Facet normal `u` of `P + M` together with `h_P(u)` and `h_M(u)`; the same
/// normals describe `P + sM` for every `s >= 0`.
#[derive(Debug, Clone)]
struct FanFacet {
    u: Vec<f64>,
    hp: f64,
    hm: f64,
}

impl PartialEq for GaugeDistance {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m && self.p == other.p
    }
}

impl GaugeDistance {
    fn new(m: ConvexBody, p: ConvexBody) -> Self {
        GaugeDistance { m, p, fan: Arc::new(OnceLock::new()) }
    }

    fn fan(&self) -> Option<&Vec<FanFacet>> {
        self.fan
            .get_or_init(|| {
                if !(self.m.is_bounded() && self.p.is_bounded()) {
                    return None;
                }
                let vp = self.p.to_vertices()?;
                let vm = self.m.to_vertices()?;
                let sums: Vec<Vec<f64>> = vp
                    .iter()
                    .flat_map(|a| vm.iter().map(move |b| a.iter().zip(b).map(|(x, y)| x + y).collect()))
                    .collect();
                let hull = ConvexBody::from_vertices(crate::geometry::extreme_points(&sums)).ok()?;
                let facets = hull.to_halfspaces()?;
                Some(
                    facets
                        .iter()
                        .map(|h| {
                            let l = norm(&h.normal);
                            let u: Vec<f64> = h.normal.iter().map(|x| x / l).collect();
                            FanFacet { hp: self.p.support(&u), hm: self.m.support(&u), u }
                        })
                        .collect(),
                )
            })
            .as_ref()
    }

    pub fn level_body(&self, s: f64) -> LevelBody {
        LevelBody::sum(vec![LevelBody::Body(self.p.clone()), LevelBody::scaled_body(&self.m, s)])
    }

    pub fn distance(&self, x: &[f64]) -> f64 {
        if self.p.gauge(x) <= 1.0 + MEMBER_TOL {
            return 0.0;
        }
        if let Some(fan) = self.fan() {
            return fan
                .iter()
                .fold(0.0, |m, f| f64::max(m, crate::ext::ext_div(dot(x, &f.u) - f.hp, f.hm)));
        }
        if self.p.is_polyhedral() && self.m.is_polyhedral() {
            let mut lp = LinearProgram::new();
            let n = x.len();
            let tau = lp.add_var(false);
            let p: Vec<Affine> = lp.add_vars(n, true).into_iter().map(Affine::var).collect();
            let q: Vec<Affine> = lp.add_vars(n, true).into_iter().map(Affine::var).collect();
            self.p.lp_member(&mut lp, &p, &Affine::constant(1.0));
            self.m.lp_member(&mut lp, &q, &Affine::var(tau));
            for k in 0..n {
                lp.add_eq(&p[k].clone().plus(&q[k]), &Affine::constant(x[k]));
            }
            lp.minimize(Affine::var(tau));
            return match lp.solve() {
                LpOutcome::Optimal(v) => v.max(0.0),
                _ => f64::INFINITY,
            };
        }
        // dist_M(x, P) = sup_u (<x,u> - h_P(u)) / h_M(u)
        let (v, _) = sphere_sup(x.len(), |u| crate::ext::ext_div(dot(x, u) - self.p.support(u), self.m.support(u)));
        v.max(0.0)
    }

    /// Radius of `P + sM` in direction `theta`.
    pub fn level_radius(&self, theta: &[f64], s: f64) -> f64 {
        if let Some(fan) = self.fan() {
            let g = fan.iter().fold(0.0, |m, f| f64::max(m, dot(theta, &f.u) / (f.hp + s * f.hm)));
            return if g <= 0.0 { f64::INFINITY } else { 1.0 / g };
        }
        self.level_body(s).radial(theta)
    }
}

/// A function known only at finitely many points.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFn {
    pub points: Vec<Vec<f64>>,
    /// Values in `[0, +inf]`.
    pub values: Vec<f64>,
    /// Values only bound the true function from below.
    pub lower_bound_only: bool,
    index: Vec<(Vec<u64>, usize)>,
}

fn key(x: &[f64]) -> Vec<u64> {
    // +0.0 and -0.0 share a key
    x.iter().map(|v| if *v == 0.0 { 0 } else { v.to_bits() }).collect()
}

impl SampledFn {
    pub fn new(points: Vec<Vec<f64>>, values: Vec<f64>, lower_bound_only: bool) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptySample);
        }
        if points.len() != values.len() {
            return Err(Error::InvalidConfig("points and values differ in length".into()));
        }
        let dim = points[0].len();
        if dim == 0 || points.iter().any(|p| p.len() != dim || p.iter().any(|v| !v.is_finite())) {
            return Err(Error::InvalidConfig("sample points must be finite and share one dimension".into()));
        }
        if values.iter().any(|v| v.is_nan() || *v < 0.0) {
            return Err(Error::InvalidConfig("sampled values must lie in [0, +inf]".into()));
        }
        let mut index: Vec<(Vec<u64>, usize)> = points.iter().enumerate().map(|(i, p)| (key(p), i)).collect();
        index.sort();
        Ok(SampledFn { points, values, lower_bound_only, index })
    }

    pub fn lookup(&self, x: &[f64]) -> Option<f64> {
        let k = key(x);
        self.index.binary_search_by(|(p, _)| p.cmp(&k)).ok().map(|i| self.values[self.index[i].1])
    }
}

impl GeomCvxFn {
    fn build(dim: usize, family: Family) -> Result<Self> {
        let f = GeomCvxFn { dim, family };
        let d = f.depth();
        if d > MAX_DEPTH {
            return Err(Error::DepthExceeded(d));
        }
        Ok(f)
    }

    fn same_dim(a: &ConvexBody, b: &ConvexBody) -> Result<()> {
        if a.dim() != b.dim() {
            return Err(Error::DimensionMismatch { expected: a.dim(), got: b.dim() });
        }
        Ok(())
    }

    fn positive(name: &str, v: f64) -> Result<()> {
        if v > 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("{name} must be positive and finite, got {v}")))
        }
    }

    pub fn indicator(body: ConvexBody) -> Self {
        GeomCvxFn { dim: body.dim(), family: Family::Indicator(body) }
    }

    pub fn gauge(body: ConvexBody, t: f64) -> Result<Self> {
        Self::positive("t", t)?;
        Self::build(body.dim(), Family::Gauge { body, t })
    }

    pub fn restricted_gauge(k: ConvexBody, l: ConvexBody) -> Result<Self> {
        Self::same_dim(&k, &l)?;
        Self::build(k.dim(), Family::RestrictedGauge { k, l })
    }

    pub fn zero_set_gauge(k: ConvexBody, l: ConvexBody) -> Result<Self> {
        Self::same_dim(&k, &l)?;
        Self::build(k.dim(), Family::ZeroSetGauge { k, l })
    }

    pub fn hinged_gauge(body: ConvexBody, a: f64) -> Result<Self> {
        Self::positive("a", a)?;
        Self::build(body.dim(), Family::HingedGauge { body, a })
    }

    pub fn power_gauge(body: ConvexBody, p: f64, scale: f64) -> Result<Self> {
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::InvalidConfig(format!("p must be >= 1, got {p}")));
        }
        Self::positive("scale", scale)?;
        Self::build(body.dim(), Family::PowerGauge { body, p, scale })
    }

    /// `inf_{z in p} ||x - z||_m`.
    pub fn gauge_distance(m: ConvexBody, p: ConvexBody) -> Result<Self> {
        Self::same_dim(&m, &p)?;
        Self::build(m.dim(), Family::GaugeDistance(GaugeDistance::new(m, p)))
    }

    pub fn max_of(a: GeomCvxFn, b: GeomCvxFn) -> Result<Self> {
        if a.dim != b.dim {
            return Err(Error::DimensionMismatch { expected: a.dim, got: b.dim });
        }
        Self::build(a.dim, Family::MaxOf(Box::new(a), Box::new(b)))
    }

    pub fn sampled(points: Vec<Vec<f64>>, values: Vec<f64>, lower_bound_only: bool) -> Result<Self> {
        let s = SampledFn::new(points, values, lower_bound_only)?;
        Ok(GeomCvxFn { dim: s.points[0].len(), family: Family::Sampled(s) })
    }

    /// `|x|`
    pub fn euclidean_norm(dim: usize) -> Self {
        Self::gauge(ConvexBody::ball(dim, 1.0).unwrap(), 1.0).unwrap()
    }

    /// `|x|^2 / 2`
    pub fn half_square(dim: usize) -> Self {
        Self::power_gauge(ConvexBody::ball(dim, 1.0).unwrap(), 2.0, 0.5).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn family_name(&self) -> &'static str {
        match &self.family {
            Family::Indicator(_) => "indicator",
            Family::Gauge { .. } => "gauge",
            Family::RestrictedGauge { .. } => "restricted_gauge",
            Family::ZeroSetGauge { .. } => "zero_set_gauge",
            Family::HingedGauge { .. } => "hinged_gauge",
            Family::PowerGauge { .. } => "power_gauge",
            Family::GaugeDistance(_) => "gauge_distance",
            Family::MaxOf(..) => "max_of",
            Family::Sampled(_) => "sampled",
        }
    }

    pub fn depth(&self) -> usize {
        match &self.family {
            Family::MaxOf(a, b) => 1 + a.depth().max(b.depth()),
            _ => 0,
        }
    }

    pub fn is_sampled(&self) -> bool {
        self.contains_sampled()
    }

    fn contains_sampled(&self) -> bool {
        match &self.family {
            Family::Sampled(_) => true,
            Family::MaxOf(a, b) => a.contains_sampled() || b.contains_sampled(),
            _ => false,
        }
    }

    /// `phi(x)` in `[0, +inf]`.
    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        match &self.family {
            Family::Sampled(s) => s.lookup(x).ok_or_else(|| Error::OffGrid(x.to_vec())),
            Family::MaxOf(a, b) => Ok(a.evaluate(x)?.max(b.evaluate(x)?)),
            _ => Ok(self.value(x)),
        }
    }

    /// Evaluation for closed-form families (NaN for off-grid sampled queries).
    pub(crate) fn value(&self, x: &[f64]) -> f64 {
        let inside = |b: &ConvexBody| b.gauge(x) <= 1.0 + MEMBER_TOL;
        match &self.family {
            Family::Indicator(k) => {
                if inside(k) {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            Family::Gauge { body, t } => t * body.gauge(x),
            Family::RestrictedGauge { k, l } => {
                if inside(l) {
                    k.gauge(x)
                } else {
                    f64::INFINITY
                }
            }
            Family::ZeroSetGauge { k, l } => {
                if inside(l) {
                    0.0
                } else {
                    k.gauge(x)
                }
            }
            Family::HingedGauge { body, a } => a * (body.gauge(x) - 1.0).max(0.0),
            Family::PowerGauge { body, p, scale } => scale * body.gauge(x).powf(*p),
            Family::GaugeDistance(gd) => gd.distance(x),
            Family::MaxOf(a, b) => a.value(x).max(b.value(x)),
            Family::Sampled(s) => s.lookup(x).unwrap_or(f64::NAN),
        }
    }

    /// Sublevel set `{phi <= s}` as a body combination.
    pub fn level_body(&self, s: f64) -> Result<LevelBody> {
        if !(s >= 0.0) {
            return Err(Error::LevelSet(format!("level must be nonnegative, got {s}")));
        }
        Ok(match &self.family {
            Family::Indicator(k) => LevelBody::Body(k.clone()),
            Family::Gauge { body, t } => LevelBody::scaled_body(body, s / t),
            Family::RestrictedGauge { k, l } => {
                LevelBody::intersection(vec![LevelBody::scaled_body(k, s), LevelBody::Body(l.clone())])
            }
            Family::ZeroSetGauge { k, l } => {
                LevelBody::union(vec![LevelBody::Body(l.clone()), LevelBody::scaled_body(k, s)])
            }
            Family::HingedGauge { body, a } => LevelBody::scaled_body(body, 1.0 + s / a),
            Family::PowerGauge { body, p, scale } => LevelBody::scaled_body(body, (s / scale).powf(1.0 / p)),
            Family::GaugeDistance(gd) => gd.level_body(s),
            Family::MaxOf(a, b) => LevelBody::intersection(vec![a.level_body(s)?, b.level_body(s)?]),
            Family::Sampled(_) => {
                return Err(Error::Unsupported("sublevel sets of a sampled function".into()))
            }
        })
    }

    /// `sup{r >= 0 : phi(r theta) <= s}` for a unit direction `theta`.
    pub fn sublevel_radius(&self, theta: &[f64], s: f64) -> f64 {
        self.ray(theta).radius(s)
    }

    /// Per-direction data for repeated sublevel-radius queries.
    pub fn ray(&self, theta: &[f64]) -> Ray<'_> {
        match &self.family {
            Family::Indicator(k) => Ray::Indicator { rho: k.radial(theta) },
            Family::Gauge { body, t } => Ray::Linear { slope: t * body.gauge(theta) },
            Family::RestrictedGauge { k, l } => Ray::Restricted { g: k.gauge(theta), rho: l.radial(theta) },
            Family::ZeroSetGauge { k, l } => Ray::ZeroSet { g: k.gauge(theta), rho: l.radial(theta) },
            Family::HingedGauge { body, a } => Ray::Hinged { a: *a, g: body.gauge(theta) },
            Family::PowerGauge { body, p, scale } => Ray::Power { c: *scale, p: *p, g: body.gauge(theta) },
            Family::GaugeDistance(gd) => Ray::Distance { gd, theta: theta.to_vec() },
            Family::MaxOf(a, b) => Ray::Max(Box::new(a.ray(theta)), Box::new(b.ray(theta))),
            Family::Sampled(_) => Ray::Unknown { f: self, theta: theta.to_vec() },
        }
    }

    /// Evenness: structural symmetry plus a numeric spot check.
    pub fn is_even(&self) -> bool {
        if let Family::Sampled(s) = &self.family {
            return s.points.iter().zip(&s.values).all(|(p, v)| {
                let q: Vec<f64> = p.iter().map(|x| -x).collect();
                s.lookup(&q).is_some_and(|w| same_value(*v, w, 1e-9))
            });
        }
        if self.contains_sampled() || !self.structurally_even() {
            return false;
        }
        let dirs = directions(self.dim, 100);
        dirs.iter().enumerate().all(|(k, d)| {
            let r1 = self.sublevel_radius(d, 1.0);
            let r1 = if r1.is_finite() && r1 > 0.0 { r1 } else { 1.0 };
            let frac = (k as f64 * 0.618_033_988_749_895).fract();
            let r = (0.2 + 2.8 * frac) * r1;
            let x: Vec<f64> = d.iter().map(|v| v * r).collect();
            let y: Vec<f64> = x.iter().map(|v| -v).collect();
            same_value(self.value(&x), self.value(&y), 1e-9)
        })
    }

    fn structurally_even(&self) -> bool {
        match &self.family {
            Family::Indicator(k)
            | Family::Gauge { body: k, .. }
            | Family::HingedGauge { body: k, .. }
            | Family::PowerGauge { body: k, .. } => k.is_centrally_symmetric(),
            Family::RestrictedGauge { k, l } | Family::ZeroSetGauge { k, l } => {
                k.is_centrally_symmetric() && l.is_centrally_symmetric()
            }
            Family::GaugeDistance(gd) => gd.m.is_centrally_symmetric() && gd.p.is_centrally_symmetric(),
            Family::MaxOf(a, b) => a.structurally_even() && b.structurally_even(),
            Family::Sampled(_) => false,
        }
    }

    /// Labels each ray restriction `r -> phi(r theta)`.
    pub fn classify_rays(&self, dirs: &[Vec<f64>]) -> RayClassification {
        let labels: Vec<RayLabel> = dirs.iter().map(|d| self.classify_ray(d)).collect();
        let all_equality_form = labels.iter().all(|l| *l != RayLabel::Other);
        RayClassification { labels, all_equality_form }
    }

    fn classify_ray(&self, d: &[f64]) -> RayLabel {
        let at = |r: f64| {
            let x: Vec<f64> = d.iter().map(|v| v * r).collect();
            self.value(&x)
        };
        let v1 = at(1.0);
        if v1.is_finite() {
            let linear = RAY_RADII.iter().all(|&r| {
                let v = at(r);
                v.is_finite() && (v - r * v1).abs() <= 1e-9 * (1.0 + r * v1)
            });
            if linear {
                return RayLabel::Linear;
            }
        }
        let r1 = self.sublevel_radius(d, 1.0);
        let extent = if r1.is_finite() && r1 > 0.0 { 10.0 * r1 } else { 10.0 };
        let mut seen_inf = false;
        let mut seen_zero = false;
        for k in 0..100 {
            let v = at(extent * (k + 1) as f64 / 100.0);
            if v == 0.0 {
                if seen_inf {
                    return RayLabel::Other;
                }
                seen_zero = true;
            } else if v == f64::INFINITY {
                seen_inf = true;
            } else {
                return RayLabel::Other;
            }
        }
        if seen_zero && seen_inf {
            RayLabel::Indicator
        } else {
            RayLabel::Other
        }
    }

    /// Witness that `e^{-phi}` is integrable.
    pub fn integrability_certificate(&self) -> Result<IntegrabilityCertificate> {
        if self.contains_sampled() {
            return Err(Error::Unsupported("integrability of a sampled function".into()));
        }
        let n = self.dim;
        let mut dirs = default_directions(n);
        for k in 0..n {
            for s in [1.0, -1.0] {
                let mut e = vec![0.0; n];
                e[k] = s;
                dirs.push(e);
            }
        }
        for d in &dirs {
            let mut r = 1.0;
            let mut all_zero = true;
            while r <= 2f64.powi(40) {
                let x: Vec<f64> = d.iter().map(|v| v * r).collect();
                if self.value(&x) > 0.0 {
                    all_zero = false;
                    break;
                }
                r *= 2.0;
            }
            if all_zero {
                return Err(Error::NotIntegrable(format!("phi vanishes on the ray through {d:?}")));
            }
        }
        if !self.level_body(1.0)?.is_bounded() {
            return Err(Error::NotIntegrable("the level-1 sublevel set is unbounded".into()));
        }
        let epsilon = 0.5;
        let inner = dirs.iter().map(|d| self.sublevel_radius(d, 2f64.ln())).fold(f64::INFINITY, f64::min);
        if !(inner > 0.0) {
            return Err(Error::NotIntegrable("support is not full-dimensional".into()));
        }
        let outer = dirs.iter().map(|d| self.sublevel_radius(d, 1.0)).fold(0.0, f64::max);
        if !outer.is_finite() {
            return Err(Error::NotIntegrable("the level-1 sublevel set is unbounded".into()));
        }
        let cert = IntegrabilityCertificate {
            epsilon,
            ball_center: vec![0.0; n],
            ball_radius: 0.5 * inner,
            decay_c: 1.0 / (1.05 * outer),
            decay_r: 1.05 * outer,
        };
        cert.validate(self)?;
        Ok(cert)
    }
}

fn same_value(a: f64, b: f64, tol: f64) -> bool {
    if a.is_infinite() || b.is_infinite() {
        return a == b;
    }
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

/// Radii of the linearity test.
pub const RAY_RADII: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 4.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RayLabel {
    Linear,
    Indicator,
    Other,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RayClassification {
    pub labels: Vec<RayLabel>,
    /// No ray is labelled `Other`.
    pub all_equality_form: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntegrabilityCertificate {
    pub epsilon: f64,
    pub ball_center: Vec<f64>,
    pub ball_radius: f64,
    pub decay_c: f64,
    pub decay_r: f64,
}

impl IntegrabilityCertificate {
    /// `eps 1_B <= e^{-phi}` and `e^{-phi(x)} <= e^{-c|x|}` for `|x| >= r`,
    /// checked on 1000 deterministic points.
    pub fn validate(&self, f: &GeomCvxFn) -> Result<()> {
        let n = f.dim();
        let dirs = directions(n, 500);
        for (k, d) in dirs.iter().enumerate() {
            let frac = (k as f64 * 0.618_033_988_749_895).fract();
            let x: Vec<f64> = d
                .iter()
                .zip(&self.ball_center)
                .map(|(v, c)| c + v * self.ball_radius * frac)
                .collect();
            if (-f.value(&x)).exp() < self.epsilon * (1.0 - 1e-12) {
                return Err(Error::NotIntegrable(format!("certificate ball check failed at {x:?}")));
            }
            let r = self.decay_r * (1.0 + 3.0 * frac);
            let y: Vec<f64> = d.iter().map(|v| v * r).collect();
            if f.value(&y) < self.decay_c * r * (1.0 - 1e-9) {
                return Err(Error::NotIntegrable(format!("certificate decay check failed at {y:?}")));
            }
        }
        Ok(())
    }
}

/// Restriction of a function to one ray, prepared for sublevel queries.
#[derive(Debug, Clone)]
pub enum Ray<'a> {
    Indicator { rho: f64 },
    Linear { slope: f64 },
    Restricted { g: f64, rho: f64 },
    ZeroSet { g: f64, rho: f64 },
    Hinged { a: f64, g: f64 },
    Power { c: f64, p: f64, g: f64 },
    Distance { gd: &'a GaugeDistance, theta: Vec<f64> },
    Max(Box<Ray<'a>>, Box<Ray<'a>>),
    Unknown { f: &'a GeomCvxFn, theta: Vec<f64> },
}

/// `s / slope`, with a zero slope meaning the ray never leaves the level.
fn lin(s: f64, slope: f64) -> f64 {
    if slope <= 0.0 {
        f64::INFINITY
    } else {
        s / slope
    }
}

impl Ray<'_> {
    /// `sup{r >= 0 : phi(r theta) <= s}`
    pub fn radius(&self, s: f64) -> f64 {
        match self {
            Ray::Indicator { rho } => *rho,
            Ray::Linear { slope } => lin(s, *slope),
            Ray::Restricted { g, rho } => lin(s, *g).min(*rho),
            Ray::ZeroSet { g, rho } => lin(s, *g).max(*rho),
            Ray::Hinged { a, g } => lin(1.0 + s / a, *g),
            Ray::Power { c, p, g } => lin((s / c).powf(1.0 / p), *g),
            Ray::Distance { gd, theta } => gd.level_radius(theta, s),
            Ray::Max(a, b) => a.radius(s).min(b.radius(s)),
            Ray::Unknown { f, theta } => bisect_radius(f, theta, s),
        }
    }
}

/// Doubling to `2^40` then 60 bisection steps, relying on monotonicity
/// along rays.
pub fn bisect_radius(f: &GeomCvxFn, theta: &[f64], s: f64) -> f64 {
    let at = |r: f64| {
        let x: Vec<f64> = theta.iter().map(|v| v * r).collect();
        f.value(&x)
    };
    let mut hi = 1.0;
    while at(hi) <= s {
        hi *= 2.0;
        if hi > 2f64.powi(40) {
            return f64::INFINITY;
        }
    }
    let mut lo = 0.0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if at(mid) <= s {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}
