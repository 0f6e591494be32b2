//! Extended-real helpers.
//!
//! Values live in `[0, +inf]` for convex functions and in `[-inf, +inf]` for
//! intermediate quotients. `f64::INFINITY` is a first-class value.

/// Quotient with the polarity-transform conventions:
/// `+/0 = +inf`, `0/0 = 0`, `-/0 = 0`.
///
/// A finite numerator over `+inf` gives `0` (the limit, clamped at zero for
/// negative numerators since such points never realise a positive sup).
pub fn ext_div(num: f64, den: f64) -> f64 {
    debug_assert!(den >= 0.0, "denominator must be nonnegative");
    if den == 0.0 {
        if num > 0.0 {
            f64::INFINITY
        } else {
            0.0
        }
    } else if den.is_infinite() {
        if num.is_infinite() && num > 0.0 {
            // never produced by finite x, y
            f64::INFINITY
        } else {
            0.0
        }
    } else {
        num / den
    }
}

/// `max(x, 0)`.
#[inline]
pub fn pos(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        0.0
    }
}

/// Convex combination `lambda*a + (1-lambda)*b` where `+inf` absorbs unless its
/// weight is zero.
pub fn ext_combo(lambda: f64, a: f64, b: f64) -> f64 {
    let term = |w: f64, v: f64| if w == 0.0 { 0.0 } else { w * v };
    term(lambda, a) + term(1.0 - lambda, b)
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conventions() {
        assert_eq!(ext_div(1.0, 0.0), f64::INFINITY);
        assert_eq!(ext_div(0.0, 0.0), 0.0);
        assert_eq!(ext_div(-1.0, 0.0), 0.0);
        assert_eq!(ext_div(3.0, f64::INFINITY), 0.0);
        assert_eq!(ext_div(-3.0, f64::INFINITY), 0.0);
        assert_eq!(ext_div(3.0, 2.0), 1.5);
    }

    #[test]
    fn combos_with_infinity() {
        assert_eq!(ext_combo(0.5, f64::INFINITY, 1.0), f64::INFINITY);
        assert_eq!(ext_combo(1.0, 2.0, f64::INFINITY), 2.0);
        assert_eq!(ext_combo(0.25, 4.0, 0.0), 1.0);
    }
}
