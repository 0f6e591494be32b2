use std::fmt;
use std::sync::OnceLock;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::ext::{dot, norm};
use crate::lp::{Affine, LinearProgram, LpOutcome};

/// Tolerance used by geometric predicates.
pub const GEOM_TOL: f64 = 1e-9;

/// Above this many candidate subsets the exact V/H enumeration is skipped
/// and gauges / supports fall back to linear programming.
const ENUMERATION_BUDGET: usize = 250_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NamedShape {
    /// `[-s, s]^n`
    Cube,
    /// `s B_2^n`
    EuclideanBall,
    /// `conv{±s e_i}`
    CrossPolytope,
    /// Simplex with centroid at the origin and vertices `-s 1`, `(n+1) s e_j - s 1`.
    SimplexCentered,
}

impl NamedShape {
    pub fn as_str(self) -> &'static str {
        match self {
            NamedShape::Cube => "cube",
            NamedShape::EuclideanBall => "euclidean_ball",
            NamedShape::CrossPolytope => "cross_polytope",
            NamedShape::SimplexCentered => "simplex_centered",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "cube" => NamedShape::Cube,
            "euclidean_ball" | "ball" => NamedShape::EuclideanBall,
            "cross_polytope" | "cross" => NamedShape::CrossPolytope,
            "simplex_centered" | "simplex" => NamedShape::SimplexCentered,
            _ => return None,
        })
    }
}

/// `<normal, x> <= offset`, offset > 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Halfspace {
    pub normal: Vec<f64>,
    pub offset: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum BodyRep {
    Vertices(Vec<Vec<f64>>),
    Halfspaces(Vec<Halfspace>),
    Named { shape: NamedShape, scale: f64 },
}

/// A convex body in `R^n` with the origin in its interior.
///
/// H-rep bodies may be unbounded (flagged by [`ConvexBody::is_bounded`]); every
/// operation that needs compactness checks it.
#[derive(Clone)]
pub struct ConvexBody {
    dim: usize,
    rep: BodyRep,
    bounded: bool,
    /// Dual representation in low dimension: facets of a V-rep body or
    /// vertices of an H-rep body.
    dual: OnceLock<Option<Vec<Vec<f64>>>>,
}

impl fmt::Debug for ConvexBody {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConvexBody").field("dim", &self.dim).field("rep", &self.rep).finish()
    }
}

impl PartialEq for ConvexBody {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.rep == other.rep
    }
}

impl ConvexBody {
    pub fn named(shape: NamedShape, dim: usize, scale: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidBody("dimension must be positive".into()));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidBody(format!("scale must be positive and finite, got {scale}")));
        }
        Ok(Self::raw(dim, BodyRep::Named { shape, scale }, true))
    }

    pub fn cube(dim: usize, scale: f64) -> Result<Self> {
        Self::named(NamedShape::Cube, dim, scale)
    }

    pub fn ball(dim: usize, scale: f64) -> Result<Self> {
        Self::named(NamedShape::EuclideanBall, dim, scale)
    }

    pub fn cross_polytope(dim: usize, scale: f64) -> Result<Self> {
        Self::named(NamedShape::CrossPolytope, dim, scale)
    }

    pub fn simplex(dim: usize, scale: f64) -> Result<Self> {
        Self::named(NamedShape::SimplexCentered, dim, scale)
    }

    fn raw(dim: usize, rep: BodyRep, bounded: bool) -> Self {
        ConvexBody { dim, rep, bounded, dual: OnceLock::new() }
    }

    /// Convex hull of `vertices`. The origin must lie in the interior.
    pub fn from_vertices(vertices: Vec<Vec<f64>>) -> Result<Self> {
        let dim = vertices.first().map(|v| v.len()).unwrap_or(0);
        if dim == 0 {
            return Err(Error::InvalidBody("empty vertex list".into()));
        }
        if vertices.iter().any(|v| v.len() != dim || v.iter().any(|x| !x.is_finite())) {
            return Err(Error::InvalidBody("vertices must be finite and share one dimension".into()));
        }
        let body = Self::raw(dim, BodyRep::Vertices(vertices), true);
        // 0 in int conv(V) iff the polar {<v,y> <= 1} is bounded, which is
        // decided by its support in the 2n coordinate directions.
        let polar = Self::raw(dim, BodyRep::Halfspaces(body.polar_halfspaces()), true);
        for k in 0..dim {
            for sgn in [1.0, -1.0] {
                let mut e = vec![0.0; dim];
                e[k] = sgn;
                let h = polar.support_lp(&e);
                if !h.is_finite() || h > 1e12 {
                    return Err(Error::InvalidBody(
                        "origin is not in the interior of the vertex hull".into(),
                    ));
                }
            }
        }
        Ok(body)
    }

    /// `{x : <a_i, x> <= b_i}`. Requires every `b_i > 0`; may be unbounded.
    pub fn from_halfspaces(halfspaces: Vec<Halfspace>) -> Result<Self> {
        let dim = halfspaces.first().map(|h| h.normal.len()).unwrap_or(0);
        if dim == 0 {
            return Err(Error::InvalidBody("empty halfspace list".into()));
        }
        for h in &halfspaces {
            if h.normal.len() != dim || h.normal.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidBody("normals must be finite and share one dimension".into()));
            }
            if !(h.offset > 0.0 && h.offset.is_finite()) {
                return Err(Error::InvalidBody(
                    "halfspace offsets must be positive (origin strictly interior)".into(),
                ));
            }
        }
        let mut body = Self::raw(dim, BodyRep::Halfspaces(halfspaces), true);
        let mut bounded = true;
        'outer: for k in 0..dim {
            for sgn in [1.0, -1.0] {
                let mut e = vec![0.0; dim];
                e[k] = sgn;
                let h = body.support_lp(&e);
                if !h.is_finite() || h > 1e12 {
                    bounded = false;
                    break 'outer;
                }
            }
        }
        body.bounded = bounded;
        Ok(body)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rep(&self) -> &BodyRep {
        &self.rep
    }

    pub fn is_bounded(&self) -> bool {
        self.bounded
    }

    pub fn ensure_bounded(&self) -> Result<()> {
        if self.bounded {
            Ok(())
        } else {
            Err(Error::InvalidBody("body is unbounded".into()))
        }
    }

    pub fn is_polyhedral(&self) -> bool {
        !matches!(self.rep, BodyRep::Named { shape: NamedShape::EuclideanBall, .. })
    }

    /// Minkowski functional `inf{r > 0 : x in rK}`.
    pub fn gauge(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        match &self.rep {
            BodyRep::Named { shape, scale } => {
                let g = match shape {
                    NamedShape::Cube => x.iter().fold(0.0, |m, v| f64::max(m, v.abs())),
                    NamedShape::EuclideanBall => norm(x),
                    NamedShape::CrossPolytope => x.iter().map(|v| v.abs()).sum(),
                    NamedShape::SimplexCentered => {
                        let sum: f64 = x.iter().sum();
                        x.iter().fold(sum, |m, v| f64::max(m, -v))
                    }
                };
                g.max(0.0) / scale
            }
            BodyRep::Halfspaces(hs) => max_ratio(hs.iter().map(|h| (&h.normal[..], h.offset)), x),
            BodyRep::Vertices(_) => match self.dual_rep() {
                Some(facets) => facets.iter().fold(0.0, |m, a| f64::max(m, dot(a, x))),
                None => self.gauge_lp(x),
            },
        }
    }

    /// Support function `sup_{y in K} <x, y>`; `+inf` for unbounded bodies
    /// in unbounded directions.
    pub fn support(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        match &self.rep {
            BodyRep::Named { shape, scale } => {
                let h = match shape {
                    NamedShape::Cube => x.iter().map(|v| v.abs()).sum(),
                    NamedShape::EuclideanBall => norm(x),
                    NamedShape::CrossPolytope => x.iter().fold(0.0, |m, v| f64::max(m, v.abs())),
                    NamedShape::SimplexCentered => {
                        let n = self.dim as f64;
                        let sum: f64 = x.iter().sum();
                        x.iter().fold(-sum, |m, v| f64::max(m, (n + 1.0) * v - sum))
                    }
                };
                scale * h.max(0.0)
            }
            BodyRep::Vertices(vs) => vs.iter().fold(0.0, |m, v| f64::max(m, dot(v, x))),
            BodyRep::Halfspaces(_) => match (self.bounded, self.dual_rep()) {
                (true, Some(verts)) => verts.iter().fold(0.0, |m, v| f64::max(m, dot(v, x))),
                _ => self.support_lp(x),
            },
        }
    }

    /// Radial function `1 / gauge(theta)` (`+inf` where the gauge vanishes).
    pub fn radial(&self, theta: &[f64]) -> f64 {
        let g = self.gauge(theta);
        if g <= 0.0 {
            f64::INFINITY
        } else {
            1.0 / g
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.gauge(x) <= 1.0 + GEOM_TOL
    }

    /// Polar body `{x : <x, y> <= 1 for all y in K}`.
    pub fn polar(&self) -> Result<ConvexBody> {
        self.ensure_bounded()?;
        Ok(match &self.rep {
            BodyRep::Named { shape, scale } => match shape {
                NamedShape::Cube => Self::raw(self.dim, BodyRep::Named { shape: NamedShape::CrossPolytope, scale: 1.0 / scale }, true),
                NamedShape::CrossPolytope => Self::raw(self.dim, BodyRep::Named { shape: NamedShape::Cube, scale: 1.0 / scale }, true),
                NamedShape::EuclideanBall => Self::raw(self.dim, BodyRep::Named { shape: NamedShape::EuclideanBall, scale: 1.0 / scale }, true),
                NamedShape::SimplexCentered => {
                    let hs = self.to_halfspaces().expect("simplex is polyhedral");
                    Self::raw(self.dim, BodyRep::Vertices(hs.iter().map(|h| scale_vec(&h.normal, 1.0 / h.offset)).collect()), true)
                }
            },
            BodyRep::Vertices(_) => Self::raw(self.dim, BodyRep::Halfspaces(self.polar_halfspaces()), true),
            BodyRep::Halfspaces(hs) => Self::raw(
                self.dim,
                BodyRep::Vertices(hs.iter().map(|h| scale_vec(&h.normal, 1.0 / h.offset)).collect()),
                true,
            ),
        })
    }

    fn polar_halfspaces(&self) -> Vec<Halfspace> {
        match &self.rep {
            BodyRep::Vertices(vs) => vs.iter().map(|v| Halfspace { normal: v.clone(), offset: 1.0 }).collect(),
            _ => unreachable!("only used for V-rep bodies"),
        }
    }

    /// `lambda K` for `lambda > 0`.
    pub fn scaled(&self, lambda: f64) -> ConvexBody {
        assert!(lambda > 0.0 && lambda.is_finite(), "scale factor must be positive");
        let rep = match &self.rep {
            BodyRep::Named { shape, scale } => BodyRep::Named { shape: *shape, scale: scale * lambda },
            BodyRep::Vertices(vs) => BodyRep::Vertices(vs.iter().map(|v| scale_vec(v, lambda)).collect()),
            BodyRep::Halfspaces(hs) => BodyRep::Halfspaces(
                hs.iter().map(|h| Halfspace { normal: h.normal.clone(), offset: h.offset * lambda }).collect(),
            ),
        };
        Self::raw(self.dim, rep, self.bounded)
    }

    /// `Some(lambda)` when `other` is recognisably `lambda * self`.
    pub fn homothety_ratio(&self, other: &ConvexBody) -> Option<f64> {
        if self.dim != other.dim {
            return None;
        }
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * (1.0 + a.abs().max(b.abs()));
        match (&self.rep, &other.rep) {
            (BodyRep::Named { shape: s1, scale: a }, BodyRep::Named { shape: s2, scale: b }) => {
                if s1 == s2 || (self.dim == 1) {
                    Some(b / a)
                } else {
                    None
                }
            }
            (BodyRep::Vertices(v1), BodyRep::Vertices(v2)) if v1.len() == v2.len() => {
                let (i, j) = v1.iter().enumerate().find_map(|(i, v)| {
                    v.iter().position(|x| x.abs() > 1e-12).map(|j| (i, j))
                })?;
                let lambda = v2[i][j] / v1[i][j];
                if lambda <= 0.0 {
                    return None;
                }
                v1.iter()
                    .zip(v2)
                    .all(|(a, b)| a.iter().zip(b).all(|(x, y)| close(lambda * x, *y)))
                    .then_some(lambda)
            }
            (BodyRep::Halfspaces(h1), BodyRep::Halfspaces(h2)) if h1.len() == h2.len() => {
                let lambda = h2[0].offset / h1[0].offset;
                h1.iter()
                    .zip(h2)
                    .all(|(a, b)| {
                        a.normal.iter().zip(&b.normal).all(|(x, y)| close(*x, *y))
                            && close(lambda * a.offset, b.offset)
                    })
                    .then_some(lambda)
            }
            _ => None,
        }
    }

    /// Exact central-symmetry test.
    pub fn is_centrally_symmetric(&self) -> bool {
        match &self.rep {
            BodyRep::Named { shape, .. } => match shape {
                NamedShape::SimplexCentered => self.dim == 1,
                _ => true,
            },
            BodyRep::Vertices(vs) => vs.iter().all(|v| self.gauge(&scale_vec(v, -1.0)) <= 1.0 + GEOM_TOL),
            BodyRep::Halfspaces(hs) => hs
                .iter()
                .all(|h| self.support(&scale_vec(&h.normal, -1.0)) <= h.offset * (1.0 + GEOM_TOL)),
        }
    }

    /// Halfspace description when one is available without vertex enumeration.
    pub fn to_halfspaces(&self) -> Option<Vec<Halfspace>> {
        let n = self.dim;
        match &self.rep {
            BodyRep::Halfspaces(hs) => Some(hs.clone()),
            BodyRep::Named { shape, scale } => match shape {
                NamedShape::Cube => Some(
                    (0..n)
                        .flat_map(|k| {
                            [1.0, -1.0].map(|s| {
                                let mut a = vec![0.0; n];
                                a[k] = s;
                                Halfspace { normal: a, offset: *scale }
                            })
                        })
                        .collect(),
                ),
                NamedShape::CrossPolytope => Some(
                    sign_patterns(n).into_iter().map(|s| Halfspace { normal: s, offset: *scale }).collect(),
                ),
                NamedShape::SimplexCentered => {
                    let mut hs: Vec<Halfspace> = (0..n)
                        .map(|k| {
                            let mut a = vec![0.0; n];
                            a[k] = -1.0;
                            Halfspace { normal: a, offset: *scale }
                        })
                        .collect();
                    hs.push(Halfspace { normal: vec![1.0; n], offset: *scale });
                    Some(hs)
                }
                NamedShape::EuclideanBall => None,
            },
            BodyRep::Vertices(_) => self
                .dual_rep()
                .map(|f| f.iter().map(|a| Halfspace { normal: a.clone(), offset: 1.0 }).collect()),
        }
    }

    /// Vertex description when one is available without facet enumeration.
    pub fn to_vertices(&self) -> Option<Vec<Vec<f64>>> {
        let n = self.dim;
        match &self.rep {
            BodyRep::Vertices(vs) => Some(vs.clone()),
            BodyRep::Named { shape, scale } => match shape {
                NamedShape::Cube => Some(sign_patterns(n).into_iter().map(|s| scale_vec(&s, *scale)).collect()),
                NamedShape::CrossPolytope => Some(
                    (0..n)
                        .flat_map(|k| {
                            [1.0, -1.0].map(|s| {
                                let mut a = vec![0.0; n];
                                a[k] = s * scale;
                                a
                            })
                        })
                        .collect(),
                ),
                NamedShape::SimplexCentered => {
                    let mut vs = vec![vec![-scale; n]];
                    for j in 0..n {
                        let mut v = vec![-scale; n];
                        v[j] = n as f64 * scale;
                        vs.push(v);
                    }
                    Some(vs)
                }
                NamedShape::EuclideanBall => None,
            },
            BodyRep::Halfspaces(_) => {
                if self.bounded {
                    self.dual_rep().cloned()
                } else {
                    None
                }
            }
        }
    }

    /// Closed-form volume of named bodies.
    pub fn exact_volume(&self) -> Option<f64> {
        let n = self.dim as i32;
        let nf = self.dim as f64;
        match &self.rep {
            BodyRep::Named { shape, scale } => Some(match shape {
                NamedShape::Cube => (2.0 * scale).powi(n),
                NamedShape::EuclideanBall => super::ball_volume(self.dim) * scale.powi(n),
                NamedShape::CrossPolytope => (2.0 * scale).powi(n) / factorial(self.dim),
                NamedShape::SimplexCentered => ((nf + 1.0) * scale).powi(n) / factorial(self.dim),
            }),
            _ => None,
        }
    }

    /// Image under the invertible linear map `a` (polyhedral bodies only).
    pub fn linear_image(&self, a: &DMatrix<f64>) -> Result<ConvexBody> {
        if a.nrows() != self.dim || a.ncols() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: a.nrows() });
        }
        let inv = a.clone().try_inverse().ok_or_else(|| Error::InvalidConfig("matrix is singular".into()))?;
        if let Some(vs) = self.to_vertices() {
            let mapped = vs.iter().map(|v| mat_vec(a, v)).collect();
            return Ok(Self::raw(self.dim, BodyRep::Vertices(mapped), self.bounded));
        }
        if let Some(hs) = self.to_halfspaces() {
            let inv_t = inv.transpose();
            let mapped = hs
                .iter()
                .map(|h| Halfspace { normal: mat_vec(&inv_t, &h.normal), offset: h.offset })
                .collect();
            return Ok(Self::raw(self.dim, BodyRep::Halfspaces(mapped), self.bounded));
        }
        Err(Error::Unsupported("linear image of a Euclidean ball (ellipsoids are not represented)".into()))
    }

    /// Adds rows forcing `y in tau * K` to `lp`. Returns `false` for
    /// non-polyhedral bodies.
    pub fn lp_member(&self, lp: &mut LinearProgram, y: &[Affine], tau: &Affine) -> bool {
        if let Some(hs) = self.lp_halfspaces() {
            for h in hs {
                let mut lhs = Affine::default();
                for (yk, ak) in y.iter().zip(&h.normal) {
                    lhs = lhs.plus(&yk.scaled(*ak));
                }
                lp.add_le(&lhs, &tau.scaled(h.offset));
            }
            return true;
        }
        if let Some(vs) = self.to_vertices() {
            let mu = lp.add_vars(vs.len(), false);
            for k in 0..self.dim {
                let mut rhs = Affine::default();
                for (m, v) in mu.iter().zip(&vs) {
                    rhs.add_term(*m, v[k]);
                }
                lp.add_eq(&y[k], &rhs);
            }
            let mut total = Affine::default();
            for m in &mu {
                total.add_term(*m, 1.0);
            }
            lp.add_le(&total, tau);
            return true;
        }
        false
    }

    fn lp_halfspaces(&self) -> Option<Vec<Halfspace>> {
        match &self.rep {
            BodyRep::Vertices(_) => self.to_halfspaces_cached(),
            _ => self.to_halfspaces(),
        }
    }

    fn to_halfspaces_cached(&self) -> Option<Vec<Halfspace>> {
        self.dual_rep().map(|f| f.iter().map(|a| Halfspace { normal: a.clone(), offset: 1.0 }).collect())
    }

    fn support_lp(&self, x: &[f64]) -> f64 {
        let BodyRep::Halfspaces(hs) = &self.rep else {
            unreachable!("support LP is for H-rep bodies")
        };
        let mut lp = LinearProgram::new();
        let y = lp.add_vars(self.dim, true);
        for h in hs {
            let mut row = Affine::default();
            for (v, a) in y.iter().zip(&h.normal) {
                row.add_term(*v, *a);
            }
            lp.add_le(&row, &Affine::constant(h.offset));
        }
        let mut obj = Affine::default();
        for (v, c) in y.iter().zip(x) {
            obj.add_term(*v, *c);
        }
        lp.maximize(obj);
        match lp.solve() {
            LpOutcome::Optimal(v) => v.max(0.0),
            _ => f64::INFINITY,
        }
    }

    fn gauge_lp(&self, x: &[f64]) -> f64 {
        let BodyRep::Vertices(vs) = &self.rep else {
            unreachable!("gauge LP is for V-rep bodies")
        };
        // min sum(mu) s.t. V mu = x, mu >= 0
        let mut lp = LinearProgram::new();
        let mu = lp.add_vars(vs.len(), false);
        for k in 0..self.dim {
            let mut row = Affine::default();
            for (m, v) in mu.iter().zip(vs) {
                row.add_term(*m, v[k]);
            }
            lp.add_eq(&row, &Affine::constant(x[k]));
        }
        let mut obj = Affine::default();
        for m in &mu {
            obj.add_term(*m, 1.0);
        }
        lp.minimize(obj);
        match lp.solve() {
            LpOutcome::Optimal(v) => v.max(0.0),
            _ => f64::INFINITY,
        }
    }

    fn dual_rep(&self) -> Option<&Vec<Vec<f64>>> {
        self.dual
            .get_or_init(|| {
                let (rows, offsets): (Vec<Vec<f64>>, Vec<f64>) = match &self.rep {
                    BodyRep::Vertices(vs) => (vs.clone(), vec![1.0; vs.len()]),
                    BodyRep::Halfspaces(hs) if self.bounded => {
                        (hs.iter().map(|h| h.normal.clone()).collect(), hs.iter().map(|h| h.offset).collect())
                    }
                    _ => return None,
                };
                if binomial(rows.len(), self.dim) > ENUMERATION_BUDGET {
                    return None;
                }
                Some(enumerate_vertices(&rows, &offsets, self.dim))
            })
            .as_ref()
    }
}

/// The points of `points` that are not convex combinations of the others,
/// with exact duplicates dropped.
pub(crate) fn extreme_points(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut uniq: Vec<&Vec<f64>> = Vec::new();
    for p in points {
        if !uniq.iter().any(|q| q.iter().zip(p).all(|(a, b)| (a - b).abs() <= GEOM_TOL * (1.0 + a.abs()))) {
            uniq.push(p);
        }
    }
    uniq.iter()
        .enumerate()
        .filter(|&(i, p)| {
            let mut lp = LinearProgram::new();
            let others: Vec<usize> = (0..uniq.len()).filter(|&j| j != i).collect();
            let lambda = lp.add_vars(others.len(), false);
            let sum = lambda.iter().fold(Affine::constant(0.0), |a, &v| a.plus(&Affine::var(v)));
            lp.add_eq(&sum, &Affine::constant(1.0));
            for k in 0..p.len() {
                let mut row = Affine::constant(0.0);
                for (&v, &j) in lambda.iter().zip(&others) {
                    row.add_term(v, uniq[j][k]);
                }
                lp.add_eq(&row, &Affine::constant(p[k]));
            }
            lp.minimize(Affine::constant(0.0));
            lp.solve() == LpOutcome::Infeasible
        })
        .map(|(_, p)| (*p).clone())
        .collect()
}

/// Vertices of `{x : <a_i, x> <= b_i}` by brute force over `n`-subsets.
/// Applied to vertex lists with `b = 1` this yields the facet normals of their
/// hull (as vertices of the polar).
fn enumerate_vertices(rows: &[Vec<f64>], offsets: &[f64], dim: usize) -> Vec<Vec<f64>> {
    let m = rows.len();
    let mut out: Vec<Vec<f64>> = Vec::new();
    let mut idx: Vec<usize> = (0..dim).collect();
    if m < dim {
        return out;
    }
    loop {
        let a: Vec<Vec<f64>> = idx.iter().map(|&i| rows[i].clone()).collect();
        let b: Vec<f64> = idx.iter().map(|&i| offsets[i]).collect();
        if let Some(x) = solve_linear(a, b) {
            let feasible = rows
                .iter()
                .zip(offsets)
                .all(|(r, &o)| dot(r, &x) <= o + 1e-10 * (1.0 + o.abs()));
            if feasible {
                let dup = out
                    .iter()
                    .any(|y| y.iter().zip(&x).all(|(p, q)| (p - q).abs() <= 1e-10 * (1.0 + p.abs())));
                if !dup {
                    out.push(x);
                }
            }
        }
        // next combination
        let mut k = dim;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if idx[k] < m - dim + k {
                idx[k] += 1;
                for j in k + 1..dim {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Gaussian elimination with partial pivoting; `None` when (near) singular.
pub(crate) fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    let scale = a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-12 * scale {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            if f != 0.0 {
                for c in col..n {
                    a[r][c] -= f * a[col][c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

fn max_ratio<'a>(rows: impl Iterator<Item = (&'a [f64], f64)>, x: &[f64]) -> f64 {
    rows.fold(0.0, |m, (a, b)| f64::max(m, dot(a, x) / b))
}

fn scale_vec(v: &[f64], s: f64) -> Vec<f64> {
    v.iter().map(|x| x * s).collect()
}

fn mat_vec(a: &DMatrix<f64>, v: &[f64]) -> Vec<f64> {
    (0..a.nrows()).map(|i| (0..a.ncols()).map(|j| a[(i, j)] * v[j]).sum()).collect()
}

fn sign_patterns(n: usize) -> Vec<Vec<f64>> {
    (0..(1usize << n))
        .map(|mask| (0..n).map(|k| if mask >> k & 1 == 1 { -1.0 } else { 1.0 }).collect())
        .collect()
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn binomial(m: usize, k: usize) -> usize {
    if k > m {
        return 0;
    }
    let mut r: usize = 1;
    for i in 0..k {
        r = r.saturating_mul(m - i) / (i + 1);
    }
    r
}
