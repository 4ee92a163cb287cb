mod common;

use std::f64::consts::PI;

use common::{close, from_poly};
use proptest::prelude::*;
use trigapprox::*;

fn poly(max_degree: usize) -> impl Strategy<Value = TrigPolynomial64> {
    (0..=max_degree).prop_flat_map(|d| {
        (-1.0..1.0f64, prop::collection::vec(-1.0..1.0f64, d), prop::collection::vec(-1.0..1.0f64, d))
            .prop_map(|(a0, a, b)| TrigPolynomial64::new(a0, a, b).unwrap())
    })
}

fn samples(len: usize) -> impl Strategy<Value = GridFunction64> {
    prop::collection::vec(-3.0..3.0f64, len).prop_map(|v| GridFunction64::from_samples(v).unwrap())
}

fn exponent() -> impl Strategy<Value = LebesgueExponent> {
    prop_oneof![
        Just(LebesgueExponent::ONE),
        Just(LebesgueExponent::TWO),
        (1.0..6.0f64).prop_map(|p| LebesgueExponent::finite(p).unwrap()),
        Just(LebesgueExponent::INF),
    ]
}

fn variant() -> impl Strategy<Value = NormVariant> {
    prop_oneof![Just(NormVariant::SupOverH), Just(NormVariant::FixedDelta)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn vp_means_reproduce_low_degree_polynomials(p in poly(6), extra in 0usize..6, x in -PI..PI) {
        let d = p.degree();
        let n = d + extra + 1;
        let m = n - d;
        let f = from_poly(256, &p);
        let c = compute_coefficients(&f, 32).unwrap();
        let s = vp_mean(&c, n, m).unwrap();
        prop_assert!(close(s.eval(x), p.eval(x), 1e-10));
    }

    #[test]
    fn coefficients_and_means_are_linear(f in samples(64), g in samples(64), a in -2.0..2.0f64, b in -2.0..2.0f64, x in -PI..PI) {
        let h = f.combine(a, &g, b).unwrap();
        let (cf, cg, ch) = (compute_coefficients(&f, 12).unwrap(), compute_coefficients(&g, 12).unwrap(), compute_coefficients(&h, 12).unwrap());
        prop_assert!(close(ch.a0(), a * cf.a0() + b * cg.a0(), 1e-10));
        for k in 1..=12 {
            prop_assert!(close(ch.a(k), a * cf.a(k) + b * cg.a(k), 1e-10));
            prop_assert!(close(ch.b(k), a * cf.b(k) + b * cg.b(k), 1e-10));
        }
        let (sf, sg, sh) = (vp_mean(&cf, 9, 3).unwrap(), vp_mean(&cg, 9, 3).unwrap(), vp_mean(&ch, 9, 3).unwrap());
        prop_assert!(close(sh.eval(x), a * sf.eval(x) + b * sg.eval(x), 1e-9));
    }

    #[test]
    fn weights_are_fejer_shaped(n in 1usize..200, frac in 0.0..=1.0f64) {
        let m = ((n as f64) * frac).round() as usize;
        let w = vp_weights::<f64>(n, m).unwrap();
        prop_assert_eq!(w.len(), n + 1);
        prop_assert!(w.iter().all(|v| (0.0..=1.0).contains(v)));
        prop_assert!(w.windows(2).all(|p| p[1] <= p[0]));
        prop_assert!(w[..=n - m].iter().all(|v| *v == 1.0));
    }

    #[test]
    fn vp_kernel_integrates_to_pi(n in 0usize..60, frac in 0.0..=1.0f64) {
        let m = ((n as f64) * frac).floor() as usize;
        let len = 512;
        let h = 2.0 * PI / len as f64;
        let total: f64 = (0..len).map(|j| vp_kernel(n, m, -PI + h * j as f64).unwrap()).sum::<f64>() * h;
        prop_assert!(close(total, PI, 1e-10));
    }

    #[test]
    fn window_norms_are_monotone_and_dominated(f in samples(128), x in -PI..PI, p in exponent(), d1 in 0.0..PI, d2 in 0.0..PI) {
        let (lo, hi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
        let norm = |d: f64, v: NormVariant| windowed_norm(&f, &WindowSpec64::new(x, d, p, v).unwrap()).unwrap();
        prop_assert!(norm(lo, NormVariant::SupOverH) <= norm(hi, NormVariant::SupOverH) + 1e-12);
        prop_assert!(norm(hi, NormVariant::FixedDelta) <= norm(hi, NormVariant::SupOverH) + 1e-12);
        prop_assert!(norm(hi, NormVariant::SupOverH) <= f.max_abs() + 1e-12);
    }

    #[test]
    fn window_norms_scale(f in samples(128), x in -PI..PI, p in exponent(), v in variant(), d in 0.0..PI, a in -4.0..4.0f64) {
        let w = WindowSpec64::new(x, d, p, v).unwrap();
        let base = windowed_norm(&f, &w).unwrap();
        let scaled = windowed_norm(&f.scaled(a), &w).unwrap();
        prop_assert!(close(scaled, a.abs() * base, 1e-10 * (1.0 + base)));
    }

    #[test]
    fn window_norm_triangle_inequality(f in samples(128), g in samples(128), x in -PI..PI, v in variant(), d in 0.01..PI) {
        for p in [LebesgueExponent::ONE, LebesgueExponent::TWO, LebesgueExponent::INF] {
            let w = WindowSpec64::new(x, d, p, v).unwrap();
            let sum = windowed_norm(&f.combine(1.0, &g, 1.0).unwrap(), &w).unwrap();
            let parts = windowed_norm(&f, &w).unwrap() + windowed_norm(&g, &w).unwrap();
            prop_assert!(sum <= parts + 1e-10);
        }
    }

    #[test]
    fn best_error_is_monotone_in_degree(f in samples(64), p in prop_oneof![Just(LebesgueExponent::TWO), Just(LebesgueExponent::INF)]) {
        let opts = SolverOptions::default();
        let mut last = f64::INFINITY;
        for n in 0..=8 {
            let e = best_global(&f, n, p, &opts).unwrap().error;
            prop_assert!(e <= last * (1.0 + 1e-9) + 1e-12, "n={}: {} > {}", n, e, last);
            last = e;
        }
    }

    #[test]
    fn best_error_ignores_added_polynomials(f in samples(64), q in poly(4), p in prop_oneof![Just(LebesgueExponent::TWO), Just(LebesgueExponent::INF)]) {
        let opts = SolverOptions::default();
        let g = f.combine(1.0, &from_poly(64, &q), 1.0).unwrap();
        let a = best_global(&f, 4, p, &opts).unwrap().error;
        let b = best_global(&g, 4, p, &opts).unwrap().error;
        prop_assert!(close(a, b, 1e-7 * (1.0 + a)));
    }

    #[test]
    fn decreasing_seq_holds_invariants(m in 2usize..1_000_000) {
        prop_assert!(decreasing_seq(m).unwrap().violations().is_empty());
    }
}
