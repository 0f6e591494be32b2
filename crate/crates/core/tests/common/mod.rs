#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use polarcvx::{ConvexBody, GeomCvxFn};

/// Random vertices with radii in `[0.6, 1.4]` plus `±0.5 e_i`, so the origin is interior.
pub fn random_polytope(n: usize, seed: u64) -> ConvexBody {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vs = Vec::new();
    while vs.len() < 3 * n + 3 {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(0.2..=1.0).contains(&r) {
            continue;
        }
        let rad = rng.gen_range(0.6..1.4);
        vs.push(v.iter().map(|x| x * rad / r).collect());
    }
    for k in 0..n {
        for s in [0.5, -0.5] {
            let mut e = vec![0.0; n];
            e[k] = s;
            vs.push(e);
        }
    }
    ConvexBody::from_vertices(vs).unwrap()
}

pub fn named_bodies(n: usize) -> Vec<ConvexBody> {
    vec![
        ConvexBody::cube(n, 1.0).unwrap(),
        ConvexBody::ball(n, 1.0).unwrap(),
        ConvexBody::cross_polytope(n, 1.0).unwrap(),
    ]
}

/// Closed-form families over one body; the second body of two-body families is `1.5` times the cube.
pub fn families(k: &ConvexBody) -> Vec<GeomCvxFn> {
    let n = k.dim();
    let l = ConvexBody::cube(n, 1.5).unwrap();
    vec![
        GeomCvxFn::gauge(k.clone(), 1.3).unwrap(),
        GeomCvxFn::indicator(k.clone()),
        GeomCvxFn::restricted_gauge(k.clone(), l.clone()).unwrap(),
        GeomCvxFn::hinged_gauge(k.clone(), 0.7).unwrap(),
        GeomCvxFn::power_gauge(k.clone(), 1.5, 1.0).unwrap(),
        GeomCvxFn::power_gauge(k.clone(), 2.0, 0.5).unwrap(),
        GeomCvxFn::power_gauge(k.clone(), 3.0, 2.0).unwrap(),
        GeomCvxFn::gauge_distance(k.clone(), l).unwrap(),
    ]
}

pub fn random_point(rng: &mut impl Rng, n: usize, r: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-r..r)).collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
