mod common;

use std::f64::consts::PI;

use common::{close, cos_k, sawtooth, simpson, N};
use trigapprox::*;

#[test]
fn cosine_has_a_single_coefficient() {
    let c = compute_coefficients(&cos_k(1024, 1.0), 8).unwrap();
    for (k, a, b) in c.rows() {
        let want = if k == 1 { 1.0 } else { 0.0 };
        assert!(close(a, want, 1e-12), "a_{k} = {a}");
        assert!(close(b, 0.0, 1e-12), "b_{k} = {b}");
    }
}

#[test]
fn constant_one_gives_a0_two() {
    let f = GridFunction64::from_fn(256, |_| 1.0).unwrap();
    let c = compute_coefficients(&f, 10).unwrap();
    assert!(close(c.a0(), 2.0, 1e-14));
    for k in 1..=10 {
        assert!(close(c.a(k), 0.0, 1e-14) && close(c.b(k), 0.0, 1e-14));
    }
}

#[test]
fn sawtooth_sine_coefficients_match_integration() {
    let c = compute_coefficients(&sawtooth(N), 16).unwrap();
    for k in 1..=16 {
        // (1/π) ∫ t sin(kt) dt over (-π, π), by Simpson on the smooth integrand.
        let oracle = simpson(|t| t * (k as f64 * t).sin(), -PI, PI, 20_000) / PI;
        assert!(close(oracle, 2.0 * (-1f64).powi(k as i32 + 1) / k as f64, 1e-9));
        assert!(close(c.b(k), oracle, 1e-5 * k as f64), "b_{k}: {} vs {oracle}", c.b(k));
        assert!(close(c.a(k), 0.0, 1e-12));
    }
}

#[test]
fn aliasing_guard_rejects_large_kmax() {
    let f = cos_k(64, 1.0);
    assert!(compute_coefficients(&f, 16).is_ok());
    assert!(matches!(compute_coefficients(&f, 17), Err(Error::Aliasing { .. })));
}

#[test]
fn partial_sums_truncate() {
    let c = compute_coefficients(&cos_k(256, 1.0), 8).unwrap();
    let s0 = partial_sum(&c, 0).unwrap();
    assert_eq!(s0.degree(), 0);
    assert!(close(s0.eval(0.3), c.a0() / 2.0, 1e-15));
    let s1 = partial_sum(&c, 1).unwrap();
    for x in [-2.0, 0.0, 0.4, 3.0] {
        assert!(close(s1.eval(x), f64::cos(x), 1e-12));
    }
    assert!(partial_sum(&c, 9).is_err());

    let s2 = partial_sum(&compute_coefficients(&sawtooth(N), 4).unwrap(), 2).unwrap();
    for x in [-1.0, 0.2, 2.5] {
        let want = 2.0 * f64::sin(x) - f64::sin(2.0 * x);
        assert!(close(s2.eval(x), want, 1e-5));
    }
}

#[test]
fn dirichlet_values() {
    for k in 0..6 {
        assert!(close(dirichlet_kernel(k, 0.0), k as f64 + 0.5, 1e-14));
        assert!(close(dirichlet_kernel(k, 1e-12), k as f64 + 0.5, 1e-10));
    }
    assert!(close(dirichlet_kernel(1, PI / 2.0), 0.5, 1e-14));
    for t in [0.3, 1.7, -2.9] {
        let sum = 0.5 + (1..=7).map(|j| (j as f64 * t).cos()).sum::<f64>();
        assert!(close(dirichlet_kernel(7, t), sum, 1e-12));
    }
}

fn trapezoid_over_q(g: impl Fn(f64) -> f64, n: usize) -> f64 {
    let h = 2.0 * PI / n as f64;
    (0..n).map(|j| g(-PI + h * j as f64)).sum::<f64>() * h
}

#[test]
fn kernels_are_normalized() {
    for k in [0, 1, 5, 40] {
        assert!(close(trapezoid_over_q(|t| dirichlet_kernel(k, t), 512) / PI, 1.0, 1e-12));
    }
    for (n, m) in [(1, 1), (5, 0), (8, 3), (40, 40), (100, 17)] {
        assert!(close(trapezoid_over_q(|t| vp_kernel(n, m, t).unwrap(), 1024) / PI, 1.0, 1e-12));
    }
    assert!(close(vp_kernel(1, 1, 0.0).unwrap(), 1.0, 1e-14));
    assert!(vp_kernel(2, 3, 0.1).is_err());
}

#[test]
fn vp_kernel_averages_dirichlet() {
    for (n, m) in [(4, 0), (6, 2), (9, 9)] {
        for t in [0.0, 0.25, 1.0, 3.0] {
            let avg = (n - m..=n).map(|k| dirichlet_kernel(k, t)).sum::<f64>() / (m + 1) as f64;
            assert!(close(vp_kernel(n, m, t).unwrap(), avg, 1e-12));
        }
    }
}

#[test]
fn vp_mean_examples() {
    let f = cos_k(256, 1.0);
    let c = compute_coefficients(&f, 8).unwrap();
    let s = vp_mean(&c, 1, 1).unwrap();
    assert!(close(s.eval(0.0), 0.5, 1e-12));
    assert!(close(vp_mean_by_kernel(&f, 1, 1, 0.0).unwrap(), 0.5, 1e-8));

    let one = GridFunction64::from_fn(256, |_| 1.0).unwrap();
    for (n, m, x) in [(0, 0, 0.0), (5, 2, 1.0), (7, 7, -2.0)] {
        assert!(close(vp_mean_by_kernel(&one, n, m, x).unwrap(), 1.0, 1e-12));
    }

    let saw = compute_coefficients(&sawtooth(N), 12).unwrap();
    let s0 = vp_mean(&saw, 9, 0).unwrap();
    let sn = partial_sum(&saw, 9).unwrap();
    assert!(s0.coeff_distance(&sn) == 0.0);
}

#[test]
fn vp_mean_is_average_of_partial_sums() {
    let c = compute_coefficients(&sawtooth(N), 20).unwrap();
    let (n, m) = (15, 6);
    let mean = vp_mean(&c, n, m).unwrap();
    for x in [-2.0, 0.3, 1.9] {
        let avg = (n - m..=n).map(|k| partial_sum(&c, k).unwrap().eval(x)).sum::<f64>() / (m + 1) as f64;
        assert!(close(mean.eval(x), avg, 1e-12));
    }
}

#[test]
fn fejer_weights() {
    for n in [1usize, 4, 31] {
        let w = vp_weights::<f64>(n, n).unwrap();
        for (k, wk) in w.iter().enumerate().skip(1) {
            assert_eq!(*wk, (n + 1 - k) as f64 / (n + 1) as f64);
        }
    }
    let w = vp_weights::<f64>(10, 3).unwrap();
    assert!(w[..=7].iter().all(|v| *v == 1.0));
    assert_eq!(w[8], 0.75);
    assert_eq!(w[10], 0.25);
}

#[test]
fn degree_five_polynomial_kernel_agreement() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand::rngs::StdRng::seed_from_u64(7);
    let a: Vec<f64> = (0..5).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let b: Vec<f64> = (0..5).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let p = TrigPolynomial64::new(rng.gen_range(-1.0..1.0), a, b).unwrap();
    let f = common::from_poly(1024, &p);
    let c = compute_coefficients(&f, 16).unwrap();
    let mean = vp_mean(&c, 12, 4).unwrap();
    for _ in 0..64 {
        let x = rng.gen_range(-PI..PI);
        assert!(close(vp_mean_by_kernel(&f, 12, 4, x).unwrap(), mean.eval(x), 1e-8));
        assert!(close(mean.eval(x), p.eval(x), 1e-12));
    }
}

#[test]
fn single_precision_path() {
    let f = GridFunction32::from_fn(256, |x: f32| x.cos() + 0.5 * (3.0 * x).sin()).unwrap();
    let c = compute_coefficients(&f, 8).unwrap();
    assert!((c.a(1) - 1.0).abs() < 1e-5);
    assert!((c.b(3) - 0.5).abs() < 1e-5);
    let s = vp_mean(&c, 6, 2).unwrap();
    assert!((s.eval(0.7f32) - f.eval(0.7)).abs() < 1e-5);
}

#[test]
fn exponent_parsing_round_trips() {
    for s in ["1", "2", "inf", "3.5"] {
        let p: LebesgueExponent = s.parse().unwrap();
        assert_eq!(p.to_string(), s);
    }
    assert!("0.5".parse::<LebesgueExponent>().is_err());
    assert!("nan".parse::<LebesgueExponent>().is_err());
}
