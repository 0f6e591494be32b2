use super::body::ConvexBody;
use crate::directions::sphere_sup;
use crate::ext::dot;
use crate::lp::{Affine, LinearProgram, LpOutcome};

/// A sublevel set built from convex bodies.
///
/// Gauges and supports are exact where the structure allows it (gauge of an
/// intersection is a max, support of a sum is a sum), solved as a linear
/// program when every part is polyhedral, and otherwise obtained from the dual
/// quantity by a maximisation over the sphere.
#[derive(Debug, Clone, PartialEq)]
pub enum LevelBody {
    /// `{0}`
    Point(usize),
    Body(ConvexBody),
    Intersection(Vec<LevelBody>),
    /// Minkowski sum.
    Sum(Vec<LevelBody>),
    /// Union of star bodies (not convex in general).
    Union(Vec<LevelBody>),
}

impl LevelBody {
    pub fn dim(&self) -> usize {
        match self {
            LevelBody::Point(n) => *n,
            LevelBody::Body(b) => b.dim(),
            LevelBody::Intersection(v) | LevelBody::Sum(v) | LevelBody::Union(v) => v[0].dim(),
        }
    }

    /// `lambda * body`; `lambda = 0` gives the origin.
    pub fn scaled_body(body: &ConvexBody, lambda: f64) -> LevelBody {
        if lambda <= 0.0 {
            LevelBody::Point(body.dim())
        } else if lambda.is_infinite() {
            panic!("infinite dilation of a body")
        } else {
            LevelBody::Body(body.scaled(lambda))
        }
    }

    pub fn intersection(parts: Vec<LevelBody>) -> LevelBody {
        if let Some(p) = parts.iter().find(|p| matches!(p, LevelBody::Point(_))) {
            return p.clone();
        }
        if parts.len() == 1 {
            return parts.into_iter().next().unwrap();
        }
        LevelBody::Intersection(parts)
    }

    pub fn sum(parts: Vec<LevelBody>) -> LevelBody {
        let n = parts[0].dim();
        let mut kept: Vec<LevelBody> = parts.into_iter().filter(|p| !matches!(p, LevelBody::Point(_))).collect();
        match kept.len() {
            0 => LevelBody::Point(n),
            1 => kept.pop().unwrap(),
            _ => LevelBody::Sum(kept),
        }
    }

    pub fn union(parts: Vec<LevelBody>) -> LevelBody {
        let n = parts[0].dim();
        let mut kept: Vec<LevelBody> = parts.into_iter().filter(|p| !matches!(p, LevelBody::Point(_))).collect();
        match kept.len() {
            0 => LevelBody::Point(n),
            1 => kept.pop().unwrap(),
            _ => LevelBody::Union(kept),
        }
    }

    pub fn is_polyhedral(&self) -> bool {
        match self {
            LevelBody::Point(_) => true,
            LevelBody::Body(b) => b.is_polyhedral(),
            LevelBody::Intersection(v) | LevelBody::Sum(v) => v.iter().all(|p| p.is_polyhedral()),
            LevelBody::Union(_) => false,
        }
    }

    pub fn is_bounded(&self) -> bool {
        match self {
            LevelBody::Point(_) => true,
            LevelBody::Body(b) => b.is_bounded(),
            LevelBody::Intersection(v) => {
                if v.iter().any(|p| p.is_bounded()) {
                    return true;
                }
                // all parts unbounded: check the coordinate extents
                let n = self.dim();
                (0..n).all(|k| {
                    [1.0, -1.0].iter().all(|&s| {
                        let mut e = vec![0.0; n];
                        e[k] = s;
                        self.support(&e).is_finite()
                    })
                })
            }
            LevelBody::Sum(v) | LevelBody::Union(v) => v.iter().all(|p| p.is_bounded()),
        }
    }

    /// Minkowski functional (`+inf` off the linear span, e.g. for `{0}`).
    pub fn gauge(&self, x: &[f64]) -> f64 {
        match self {
            LevelBody::Point(_) => {
                if x.iter().all(|v| *v == 0.0) {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            LevelBody::Body(b) => b.gauge(x),
            LevelBody::Intersection(v) => v.iter().fold(0.0, |m, p| f64::max(m, p.gauge(x))),
            LevelBody::Union(v) => v.iter().fold(f64::INFINITY, |m, p| f64::min(m, p.gauge(x))),
            LevelBody::Sum(_) => {
                if x.iter().all(|v| *v == 0.0) {
                    return 0.0;
                }
                if self.is_polyhedral() {
                    self.gauge_lp(x)
                } else {
                    // ||x||_A = sup_u <x,u> / h_A(u)
                    let (v, _) = sphere_sup(self.dim(), |u| {
                        let h = self.support(u);
                        let p = dot(x, u);
                        if p <= 0.0 {
                            0.0
                        } else {
                            p / h
                        }
                    });
                    v.max(0.0)
                }
            }
        }
    }

    /// Support function (`+inf` in unbounded directions).
    pub fn support(&self, x: &[f64]) -> f64 {
        match self {
            LevelBody::Point(_) => 0.0,
            LevelBody::Body(b) => b.support(x),
            LevelBody::Sum(v) => v.iter().map(|p| p.support(x)).sum(),
            LevelBody::Union(v) => v.iter().fold(0.0, |m, p| f64::max(m, p.support(x))),
            LevelBody::Intersection(_) => {
                if x.iter().all(|v| *v == 0.0) {
                    return 0.0;
                }
                if self.is_polyhedral() {
                    self.support_lp(x)
                } else {
                    // h_A(x) = sup_u <x,u> rho_A(u)
                    let (v, _) = sphere_sup(self.dim(), |u| {
                        let p = dot(x, u);
                        if p <= 0.0 {
                            return 0.0;
                        }
                        let g = self.gauge(u);
                        if g <= 0.0 {
                            f64::INFINITY
                        } else {
                            p / g
                        }
                    });
                    v.max(0.0)
                }
            }
        }
    }

    /// Radial function `1 / gauge`.
    pub fn radial(&self, theta: &[f64]) -> f64 {
        let g = self.gauge(theta);
        if g <= 0.0 {
            f64::INFINITY
        } else {
            1.0 / g
        }
    }

    /// Rows forcing `y in tau * self`. `false` if some part is not polyhedral.
    pub fn lp_member(&self, lp: &mut LinearProgram, y: &[Affine], tau: &Affine) -> bool {
        match self {
            LevelBody::Point(_) => {
                for yk in y {
                    lp.add_eq(yk, &Affine::constant(0.0));
                }
                true
            }
            LevelBody::Body(b) => b.lp_member(lp, y, tau),
            LevelBody::Intersection(v) => v.iter().all(|p| p.lp_member(lp, y, tau)),
            LevelBody::Sum(v) => {
                let n = y.len();
                let mut total = vec![Affine::default(); n];
                for p in v {
                    let z: Vec<Affine> = lp.add_vars(n, true).into_iter().map(Affine::var).collect();
                    if !p.lp_member(lp, &z, tau) {
                        return false;
                    }
                    for (t, zk) in total.iter_mut().zip(&z) {
                        *t = std::mem::take(t).plus(zk);
                    }
                }
                for (yk, t) in y.iter().zip(&total) {
                    lp.add_eq(yk, t);
                }
                true
            }
            LevelBody::Union(_) => false,
        }
    }

    fn gauge_lp(&self, x: &[f64]) -> f64 {
        let mut lp = LinearProgram::new();
        let tau = lp.add_var(false);
        let y: Vec<Affine> = x.iter().map(|&v| Affine::constant(v)).collect();
        assert!(self.lp_member(&mut lp, &y, &Affine::var(tau)));
        lp.minimize(Affine::var(tau));
        match lp.solve() {
            LpOutcome::Optimal(v) => v.max(0.0),
            _ => f64::INFINITY,
        }
    }

    fn support_lp(&self, x: &[f64]) -> f64 {
        let mut lp = LinearProgram::new();
        let yv = lp.add_vars(x.len(), true);
        let y: Vec<Affine> = yv.iter().map(|&v| Affine::var(v)).collect();
        assert!(self.lp_member(&mut lp, &y, &Affine::constant(1.0)));
        let mut obj = Affine::default();
        for (v, c) in yv.iter().zip(x) {
            obj.add_term(*v, *c);
        }
        lp.maximize(obj);
        match lp.solve() {
            LpOutcome::Optimal(v) => v.max(0.0),
            LpOutcome::Unbounded => f64::INFINITY,
            LpOutcome::Infeasible => 0.0,
        }
    }
}
