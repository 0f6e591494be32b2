mod common;

use nalgebra::DMatrix;
use rand::Rng;
use rayon::prelude::*;

use common::{families, named_bodies, random_point, random_polytope, rng};
use polarcvx::directions::circle;
use polarcvx::transforms::{legendre_pointwise, legendre_transform, polar_pointwise, polar_transform};
use polarcvx::{ConvexBody, GeomCvxFn};

/// A `0.01` grid on `[-3, 3]^2` plus rays through 720 directions at 160
/// log-spaced radii in `[1e-3, 1e4]`.
fn ray_sample() -> Vec<Vec<f64>> {
    let mut pts = Vec::new();
    for i in 0..=600 {
        for j in 0..=600 {
            pts.push(vec![-3.0 + 0.01 * i as f64, -3.0 + 0.01 * j as f64]);
        }
    }
    for d in circle(720) {
        for k in 0..160 {
            let r = 10f64.powf(-3.0 + 7.0 * k as f64 / 159.0);
            pts.push(vec![d[0] * r, d[1] * r]);
        }
    }
    pts
}

/// The ray part of the sample stretched by 100.
fn far_rays() -> Vec<Vec<f64>> {
    circle(720).into_iter().map(|d| vec![d[0] * 1e6, d[1] * 1e6]).collect()
}

/// Families cheap enough to evaluate ~10^5 times per query; distance
/// functions to a Euclidean ball need a sphere search per evaluation.
fn cheap_families(k: &ConvexBody) -> Vec<GeomCvxFn> {
    let mut fs = families(k);
    if !k.is_polyhedral() {
        fs.retain(|f| f.family_name() != "gauge_distance");
    }
    fs
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    a == b || (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

#[test]
fn closed_form_polar_matches_brute_force_sup() {
    let sample = ray_sample();
    let mut r = rng(1);
    for k in named_bodies(2).into_iter().chain([random_polytope(2, 3)]) {
        for f in cheap_families(&k) {
            let fp = polar_transform(&f).unwrap();
            let xs: Vec<Vec<f64>> = (0..12).map(|_| random_point(&mut r, 2, 2.5)).collect();
            xs.par_iter().for_each(|x| {
                let want = polar_pointwise(&f, x, &sample).unwrap();
                let got = fp.evaluate(x).unwrap();
                // the sample sup is a lower bound that converges from below
                assert!(want <= got + 1e-9 * (1.0 + got), "{} at {x:?}: {want} > {got}", f.family_name());
                assert!(close(want, got, 2e-2), "{} at {x:?}: {want} vs {got}", f.family_name());
            });
        }
    }
}

#[test]
fn closed_form_legendre_matches_brute_force_sup() {
    let sample = ray_sample();
    let mut r = rng(2);
    for k in named_bodies(2).into_iter().chain([random_polytope(2, 4)]) {
        for f in cheap_families(&k) {
            let fl = legendre_transform(&f).unwrap();
            let xs: Vec<Vec<f64>> = (0..12).map(|_| random_point(&mut r, 2, 2.5)).collect();
            xs.par_iter().for_each(|x| {
                let want = legendre_pointwise(&f, x, &sample).unwrap();
                let got = fl.evaluate(x).unwrap();
                assert!(want <= got + 1e-9 * (1.0 + got.abs()), "{} at {x:?}: {want} > {got}", f.family_name());
                if got.is_finite() {
                    assert!(close(want, got, 2e-2), "{} at {x:?}: {want} vs {got}", f.family_name());
                } else {
                    // +inf: the sup keeps growing along some ray
                    let far = legendre_pointwise(&f, x, &far_rays()).unwrap();
                    assert!(far > 2.0 * want + 1.0, "{} at {x:?}: {want} then {far}", f.family_name());
                }
            });
        }
    }
}

#[test]
fn polar_is_an_involution() {
    let mut r = rng(5);
    for n in [2, 3] {
        for k in named_bodies(n).into_iter().chain([random_polytope(n, 7)]) {
            for f in families(&k) {
                let back = polar_transform(&polar_transform(&f).unwrap()).unwrap();
                for _ in 0..100 {
                    let x = random_point(&mut r, n, 2.0);
                    let (a, b) = (f.evaluate(&x).unwrap(), back.evaluate(&x).unwrap());
                    assert!(close(a, b, 1e-6), "{}: {a} vs {b} at {x:?}", f.family_name());
                }
            }
        }
    }
}

#[test]
fn polar_reverses_order() {
    let mut r = rng(6);
    for n in [2, 3] {
        let k = random_polytope(n, 11);
        let big = k.scaled(1.7);
        let pairs = [
            // phi <= psi pointwise in each pair
            (GeomCvxFn::gauge(k.clone(), 1.0).unwrap(), GeomCvxFn::gauge(k.clone(), 2.0).unwrap()),
            (GeomCvxFn::indicator(big.clone()), GeomCvxFn::indicator(k.clone())),
            (GeomCvxFn::gauge(big.clone(), 1.0).unwrap(), GeomCvxFn::gauge(k.clone(), 1.0).unwrap()),
            (GeomCvxFn::gauge(k.clone(), 1.0).unwrap(), GeomCvxFn::restricted_gauge(k.clone(), big.clone()).unwrap()),
        ];
        for (phi, psi) in pairs {
            let (pp, qp) = (polar_transform(&phi).unwrap(), polar_transform(&psi).unwrap());
            for _ in 0..100 {
                let x = random_point(&mut r, n, 2.0);
                assert!(phi.evaluate(&x).unwrap() <= psi.evaluate(&x).unwrap() + 1e-12);
                let (a, b) = (qp.evaluate(&x).unwrap(), pp.evaluate(&x).unwrap());
                assert!(a <= b + 1e-6 * (1.0 + b.abs()), "{a} > {b} at {x:?}");
            }
        }
    }
}

#[test]
fn polar_is_linearly_equivariant() {
    // phi o A for phi = ||.||_K or 1_K is the same family on A^{-1} K
    let mut r = rng(8);
    for n in [2, 3] {
        let a = loop {
            let m: DMatrix<f64> = DMatrix::from_fn(n, n, |_, _| r.gen_range(-1.0..1.0));
            if m.determinant().abs() > 0.2 {
                break m;
            }
        };
        let a_inv = a.clone().try_inverse().unwrap();
        let a_inv_t = a_inv.transpose();
        for k in [random_polytope(n, 13), ConvexBody::cross_polytope(n, 1.0).unwrap(), ConvexBody::cube(n, 1.0).unwrap()] {
            let ak = k.linear_image(&a_inv).unwrap();
            let pairs = [
                (GeomCvxFn::gauge(k.clone(), 1.0).unwrap(), GeomCvxFn::gauge(ak.clone(), 1.0).unwrap()),
                (GeomCvxFn::indicator(k.clone()), GeomCvxFn::indicator(ak.clone())),
            ];
            for (phi, phi_a) in pairs {
                let pp = polar_transform(&phi).unwrap();
                let pa = polar_transform(&phi_a).unwrap();
                for _ in 0..100 {
                    let x = random_point(&mut r, n, 2.0);
                    let ax: Vec<f64> = (&a * nalgebra::DVector::from_vec(x.clone())).iter().copied().collect();
                    assert!(close(phi_a.evaluate(&x).unwrap(), phi.evaluate(&ax).unwrap(), 1e-9));
                    let y = random_point(&mut r, n, 2.0);
                    let ay: Vec<f64> = (&a_inv_t * nalgebra::DVector::from_vec(y.clone())).iter().copied().collect();
                    let (lhs, rhs) = (pa.evaluate(&y).unwrap(), pp.evaluate(&ay).unwrap());
                    assert!(close(lhs, rhs, 1e-6), "{lhs} vs {rhs}");
                }
            }
        }
    }
}
