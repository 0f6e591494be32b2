//! Functional Santaló products `int e^{-phi} * int e^{-phi°}` and their bounds.

use serde::Serialize;
use statrs::function::gamma::{gamma_li, gamma_ui};

use crate::error::{Error, Result};
use crate::function::GeomCvxFn;
use crate::geometry::{ball_volume, factorial, VolumeConfig};
use crate::integration::{logconcave_integral, EstimateMethod, IntegralEstimate, IntegrationConfig};
use crate::level_sets::polar_volume;
use crate::quad::gauss_kronrod;
use crate::transforms::polar_transform;

/// The constant in `0.7 c^n |B|^2`.
pub const LOWER_CONSTANT: f64 = 0.7;

/// Levels at which the polar is bracketed when it has no closed form.
const BRACKET_LEVELS: [f64; 9] = [0.125, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 4.0, 8.0];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SantaloReport {
    pub n: usize,
    pub family: String,
    pub integral_phi: IntegralEstimate,
    pub integral_polar: IntegralEstimate,
    pub product: f64,
    pub product_error: f64,
    /// Sure bounds on the product from the error bars.
    pub product_interval: [f64; 2],
    /// `product / (n! |B|)^2`
    pub ratio_to_exponential: f64,
    pub upper_bound_value: f64,
    pub upper_bound_factor: f64,
    pub upper_bound_t: f64,
    pub c: f64,
    pub lower_bound_value: f64,
    /// `(product / (0.7 |B|^2))^(1/n)`
    pub implied_c: f64,
    pub even: bool,
}

/// Santaló product with bounds evaluated at lower-bound constant `c`.
pub fn santalo_product(f: &GeomCvxFn, c: f64, cfg: &IntegrationConfig) -> Result<SantaloReport> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidConfig(format!("c must be positive, got {c}")));
    }
    f.integrability_certificate()?;
    let n = f.dim();
    let fp = polar_transform(f)?;
    let (integral_phi, integral_polar) = rayon::join(
        || logconcave_integral(f, cfg),
        || {
            if fp.is_sampled() {
                bracketed_polar_integral(f, &cfg.volume)
            } else {
                logconcave_integral(&fp, cfg)
            }
        },
    );
    let (a, b) = (integral_phi?, integral_polar?);
    let product = a.value * b.value;
    let product_error = a.value.abs() * b.abs_error + b.value.abs() * a.abs_error + a.abs_error * b.abs_error;
    let bn = ball_volume(n);
    let ub = upper_bound_factor(n);
    let exp_product = (factorial(n) * bn).powi(2);
    Ok(SantaloReport {
        n,
        family: f.family_name().to_string(),
        product_interval: [a.lo().max(0.0) * b.lo().max(0.0), a.hi() * b.hi()],
        integral_phi: a,
        integral_polar: b,
        product,
        product_error,
        ratio_to_exponential: product / exp_product,
        upper_bound_value: exp_product * ub.factor,
        upper_bound_factor: ub.factor,
        upper_bound_t: ub.t_star,
        c,
        lower_bound_value: LOWER_CONSTANT * c.powi(n as i32) * bn * bn,
        implied_c: (product / (LOWER_CONSTANT * bn * bn)).powf(1.0 / n as f64),
        even: f.is_even(),
    })
}

/// `[int e^{-psi_2^t}, int e^{-psi_1^t}]` intersected over a grid of `t`.
///
/// With `V = |K_t(phi)°|`:
/// `int e^{-psi_1^t} = V e^{1/t} t^n Gamma(n+1, 1/t)` and
/// `int e^{-psi_2^t} = V (t^n gamma(n+1, 1/t) + e^{-1/t})`.
pub fn bracketed_polar_integral(f: &GeomCvxFn, cfg: &VolumeConfig) -> Result<IntegralEstimate> {
    f.integrability_certificate()?;
    let n = f.dim();
    let a = n as f64 + 1.0;
    let (mut lo, mut hi) = (0.0f64, f64::INFINITY);
    for &t in &BRACKET_LEVELS {
        let v = polar_volume(&f.level_body(t)?, cfg)?;
        let tn = t.powi(n as i32);
        let upper = (1.0 / t).exp() * tn * gamma_ui(a, 1.0 / t);
        let lower = tn * gamma_li(a, 1.0 / t) + (-1.0 / t).exp();
        lo = lo.max((v.value - v.abs_error).max(0.0) * lower);
        hi = hi.min((v.value + v.abs_error) * upper);
    }
    if !hi.is_finite() {
        return Err(Error::NotIntegrable("polar level sets are unbounded".into()));
    }
    let mut est = IntegralEstimate::new(0.5 * (lo + hi), 0.5 * (hi - lo), EstimateMethod::SandwichBracket);
    est.lower_bound_only = false;
    Ok(est)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UpperBoundFactor {
    pub n: usize,
    /// Grid minimiser of `e^{1/t}(t^n/n! + 1)`.
    pub t_star: f64,
    pub factor: f64,
    /// `t = ((n-1)!)^(1/(n+1))`
    pub closed_form_t: f64,
    pub closed_form_factor: f64,
}

/// `min_t e^{1/t}(t^n/n! + 1)` over 200 log-spaced `t` in `[1e-2, 1e2]` and
/// the choice `t = ((n-1)!)^(1/(n+1))`.
pub fn upper_bound_factor(n: usize) -> UpperBoundFactor {
    assert!(n >= 1, "dimension must be positive");
    let nf = factorial(n);
    let g = |t: f64| (1.0 / t).exp() * (t.powi(n as i32) / nf + 1.0);
    let closed_form_t = factorial(n - 1).powf(1.0 / (n as f64 + 1.0));
    let closed_form_factor = g(closed_form_t);
    let (mut t_star, mut factor) = (closed_form_t, closed_form_factor);
    for k in 0..200 {
        let t = 10f64.powf(-2.0 + 4.0 * k as f64 / 199.0);
        let v = g(t);
        if v < factor {
            t_star = t;
            factor = v;
        }
    }
    UpperBoundFactor { n, t_star, factor, closed_form_t, closed_form_factor }
}

/// `a = (int_0^inf e^{-s/2 - 1/(2s)} / s ds)^2`.
///
/// With `s = e^u` the inner integral is `int e^{-cosh u} du`, an even
/// integrand, so it is `2 int_0^U`; `e^{-cosh 8}` is below `1e-600`.
pub fn constant_a() -> f64 {
    let half = gauss_kronrod(|u| (-u.cosh()).exp(), 0.0, 8.0, 1e-14, 200);
    (2.0 * half.value).powi(2)
}

/// `(int_{R^n} e^{-sqrt((|x|^2 - 1)_+)} dx)^2`.
///
/// In polar coordinates the integral is `n |B| int r^{n-1} e^{-sqrt((r^2-1)_+)} dr`;
/// on `r > 1` the substitution `r = cosh v` turns the tail into
/// `int_0^inf cosh^{n-1} v sinh v e^{-sinh v} dv`.
pub fn ball_argument_bound(n: usize) -> f64 {
    assert!(n >= 1, "dimension must be positive");
    let tail = gauss_kronrod(
        |v: f64| v.cosh().powi(n as i32 - 1) * v.sinh() * (-v.sinh()).exp(),
        0.0,
        12.0,
        1e-13,
        400,
    );
    let inner = n as f64 * ball_volume(n) * (1.0 / n as f64 + tail.value);
    inner * inner
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremVerdict {
    pub report: SantaloReport,
    pub lower_holds: bool,
    /// `None` for non-even inputs.
    pub upper_holds: Option<bool>,
}

impl TheoremVerdict {
    pub fn passes(&self) -> bool {
        self.lower_holds && self.upper_holds.unwrap_or(true)
    }
}

/// Checks `0.7 c^n |B|^2 <= product` and, for even inputs,
/// `product <= (n! |B|)^2 * factor(n)`, each on the sure end of the product.
pub fn verify_theorem(f: &GeomCvxFn, c: f64, cfg: &IntegrationConfig) -> Result<TheoremVerdict> {
    let report = santalo_product(f, c, cfg)?;
    let lower_holds = report.product_interval[0] >= report.lower_bound_value;
    let upper_holds = report.even.then(|| report.product_interval[1] <= report.upper_bound_value);
    Ok(TheoremVerdict { report, lower_holds, upper_holds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ConvexBody;
    use std::f64::consts::{E, PI};

    fn cfg(n: usize) -> IntegrationConfig {
        IntegrationConfig::for_dim(n, 0)
    }

    #[test]
    fn constant_a_against_riemann_sum() {
        // midpoint sum of e^{-cosh u} on [-20, 20]
        let m = 1_000_000;
        let h = 40.0 / m as f64;
        let riemann: f64 = (0..m).map(|k| (-(-20.0 + (k as f64 + 0.5) * h).cosh()).exp()).sum::<f64>() * h;
        let a = constant_a();
        assert!(a >= 0.7);
        assert!((a - riemann * riemann).abs() < 1e-10, "{a} vs {}", riemann * riemann);
        assert!((a - 0.70904).abs() < 1e-4);
    }

    #[test]
    fn ball_bound_one_dimension() {
        // 2 (1 + int_0^inf sinh v e^{-sinh v} dv), tail by a plain midpoint sum
        let m = 2_000_000;
        let h = 30.0 / m as f64;
        let tail: f64 = (0..m)
            .map(|k| {
                let v = (k as f64 + 0.5) * h;
                v.sinh() * (-v.sinh()).exp()
            })
            .sum::<f64>()
            * h;
        let want = (2.0 * (1.0 + tail)).powi(2);
        assert!((ball_argument_bound(1) - want).abs() < 1e-8, "{} vs {want}", ball_argument_bound(1));
    }

    #[test]
    fn upper_factor_examples() {
        let u = upper_bound_factor(1);
        assert!((u.closed_form_factor - 2.0 * E).abs() < 1e-12);
        assert!(u.factor <= u.closed_form_factor);
        assert!(upper_bound_factor(10).factor <= 4.0);
        let u5 = upper_bound_factor(5);
        let t = 24f64.powf(1.0 / 6.0);
        assert!((u5.closed_form_factor - (1.0 / t).exp() * (t.powi(5) / 120.0 + 1.0)).abs() < 1e-12);
    }

    #[test]
    fn exponential_and_mahler_products() {
        let r = santalo_product(&GeomCvxFn::euclidean_norm(2), 0.5, &cfg(2)).unwrap();
        assert!((r.product - 4.0 * PI * PI).abs() < 1e-3 * 4.0 * PI * PI, "{r:?}");
        let r = santalo_product(&GeomCvxFn::indicator(ConvexBody::cube(2, 1.0).unwrap()), 0.5, &cfg(2)).unwrap();
        assert!((r.product - 8.0).abs() < 8e-3, "{r:?}");
        let r = santalo_product(&GeomCvxFn::half_square(1), 0.5, &cfg(1)).unwrap();
        assert!((r.product - 2.0 * PI).abs() < 2e-3 * PI, "{r:?}");
    }

    #[test]
    fn bracket_contains_closed_form() {
        let f = GeomCvxFn::gauge(ConvexBody::cube(2, 1.0).unwrap(), 1.0).unwrap();
        let exact = logconcave_integral(&polar_transform(&f).unwrap(), &cfg(2)).unwrap();
        let b = bracketed_polar_integral(&f, &VolumeConfig::radial()).unwrap();
        assert!(b.lo() <= exact.hi() && exact.lo() <= b.hi(), "{b:?} vs {exact:?}");
    }

    #[test]
    fn theorem_examples() {
        let v = verify_theorem(&GeomCvxFn::euclidean_norm(2), 0.5, &cfg(2)).unwrap();
        assert!(v.passes() && v.upper_holds == Some(true));
        let s = GeomCvxFn::gauge(ConvexBody::simplex(2, 1.0).unwrap(), 1.0).unwrap();
        let v = verify_theorem(&s, 0.5, &cfg(2)).unwrap();
        assert!(v.lower_holds && v.upper_holds.is_none());
        let c = GeomCvxFn::indicator(ConvexBody::cube(3, 1.0).unwrap());
        let v = verify_theorem(&c, 0.5, &cfg(3)).unwrap();
        assert!(v.passes());
        assert!((v.report.product - 32.0 / 3.0).abs() < 0.02 * 32.0 / 3.0);
    }
}
