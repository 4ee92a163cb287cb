mod common;

use std::f64::consts::PI;
use std::sync::Arc;

use common::{abs_x, close, cos_k, from_poly, sawtooth, N};
use microlp::{ComparisonOp, OptimizationDirection, Problem};
use trigapprox::*;

const P1: LebesgueExponent = LebesgueExponent::ONE;
const P2: LebesgueExponent = LebesgueExponent::TWO;
const PINF: LebesgueExponent = LebesgueExponent::INF;

fn opts() -> SolverOptions {
    SolverOptions::default()
}

fn basis(x: f64, n: usize) -> Vec<f64> {
    let mut row = vec![1.0];
    for k in 1..=n {
        row.push((k as f64 * x).cos());
        row.push((k as f64 * x).sin());
    }
    row
}

/// Discrete `min_c Σ w_i |y_i - a_i·c|` (`inf = false`) or `min_c max_i |y_i - a_i·c|`
/// (`inf = true`) over the given points, solved as a linear program.
fn lp_oracle(xs: &[f64], ys: &[f64], n: usize, inf: bool) -> f64 {
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let coeffs: Vec<_> = (0..2 * n + 1).map(|_| lp.add_var(0.0, (f64::NEG_INFINITY, f64::INFINITY))).collect();
    let level = inf.then(|| lp.add_var(1.0, (0.0, f64::INFINITY)));
    for (&x, &y) in xs.iter().zip(ys) {
        let slack = level.unwrap_or_else(|| lp.add_var(1.0, (0.0, f64::INFINITY)));
        let row = basis(x, n);
        let mut upper: Vec<_> = coeffs.iter().zip(&row).map(|(v, a)| (*v, *a)).collect();
        upper.push((slack, 1.0));
        lp.add_constraint(upper.as_slice(), ComparisonOp::Ge, y);
        let mut lower: Vec<_> = coeffs.iter().zip(&row).map(|(v, a)| (*v, *a)).collect();
        lower.push((slack, -1.0));
        lp.add_constraint(lower.as_slice(), ComparisonOp::Le, y);
    }
    lp.solve().unwrap().into_solution().ok().expect("lp solution").objective()
}

fn grid_oracle(f: &GridFunction64, n: usize, p: LebesgueExponent) -> f64 {
    let xs: Vec<f64> = (0..f.len()).map(|j| f.node(j)).collect();
    match p {
        LebesgueExponent::Infinity => lp_oracle(&xs, f.samples(), n, true),
        _ => lp_oracle(&xs, f.samples(), n, false) * 2.0 * PI / f.len() as f64,
    }
}

fn step(n: usize) -> GridFunction64 {
    GridFunction64::from_fn(n, |x: f64| if wrap_angle(x).abs() < 1.0 { 1.0 } else { 0.0 }).unwrap()
}

#[test]
fn l2_example_with_lacunary_tail() {
    let f = GridFunction64::from_fn(1024, |x: f64| x.cos() + (5.0 * x).cos()).unwrap();
    let r = best_global(&f, 3, P2, &opts()).unwrap();
    assert!(close(r.error, PI.sqrt(), 1e-12));
    assert_eq!(r.method, Method::ExactL2);
    let want = TrigPolynomial64::new(0.0, vec![1.0, 0.0, 0.0], vec![0.0; 3]).unwrap();
    assert!(r.polynomial.coeff_distance(&want) < 1e-12);
}

#[test]
fn minimax_of_next_harmonic_is_one() {
    // The extrema kπ/(n+1) are grid nodes when n + 1 divides N/2.
    for n in [0, 1, 3, 7, 15] {
        let f = cos_k(1024, (n + 1) as f64);
        let r = best_global(&f, n, PINF, &opts()).unwrap();
        assert!(close(r.error, 1.0, 1e-12), "n={n}: {}", r.error);
        assert!(r.polynomial.coeff_distance(&TrigPolynomial64::constant(0.0)) < 1e-10);
    }
    // Otherwise the grid misses the peaks by at most half a spacing.
    let h = 2.0 * PI / 1024.0;
    for n in [2, 4, 5, 6] {
        let r = best_global(&cos_k(1024, (n + 1) as f64), n, PINF, &opts()).unwrap();
        let k = (n + 1) as f64;
        assert!(r.error <= 1.0 + 1e-12 && r.error >= (k * h / 2.0).cos() - 1e-12, "n={n}: {}", r.error);
    }
}

#[test]
fn polynomials_are_reproduced() {
    let p = TrigPolynomial64::new(0.4, vec![1.0, -0.5, 0.0, 0.25, 0.1], vec![0.3, 0.0, -0.7, 0.2, -0.05]).unwrap();
    let f = from_poly(512, &p);
    for q in [P1, P2, LebesgueExponent::finite(3.0).unwrap(), PINF] {
        let r = best_global(&f, 5, q, &opts()).unwrap();
        assert!(r.error < 1e-12, "p={q}: {}", r.error);
        assert!(r.polynomial.coeff_distance(&p) < 1e-12);
        assert!(best_global(&f, 4, q, &opts()).unwrap().error > 1e-3);
    }
    assert!(best_global(&f, 200, P2, &opts()).is_err());
}

#[test]
fn sup_norm_matches_lp() {
    for f in [abs_x(64), sawtooth(64), step(64)] {
        for n in 0..=8 {
            let got = best_global(&f, n, PINF, &opts()).unwrap().error;
            let want = grid_oracle(&f, n, PINF);
            assert!(close(got, want, 1e-8 * (1.0 + want)), "n={n}: {got} vs {want}");
        }
    }
}

#[test]
fn l1_matches_lp() {
    for f in [abs_x(64), sawtooth(64), step(64)] {
        for n in 0..=8 {
            let r = best_global(&f, n, P1, &opts()).unwrap();
            let want = grid_oracle(&f, n, P1);
            assert!(close(r.error, want, 1e-8 * (1.0 + want)), "n={n}: {} vs {want}", r.error);
            assert!(!r.certified);
        }
    }
}

#[test]
fn l1_on_a_fine_grid_beats_the_projection() {
    let f = abs_x(N);
    for n in [4, 16, 40] {
        let l1 = best_global(&f, n, P1, &opts()).unwrap();
        let l2 = best_global(&f, n, P2, &opts()).unwrap();
        let proj = f.minus_polynomial(&l2.polynomial).unwrap().norm(P1);
        assert!(l1.error <= proj + 1e-12);
    }
}

#[test]
fn finite_p_satisfies_first_order_condition() {
    let f = sawtooth(1024);
    for pv in [1.5, 3.0, 6.0] {
        let p = LebesgueExponent::finite(pv).unwrap();
        let r = best_global(&f, 3, p, &opts()).unwrap();
        let res = f.minus_polynomial(&r.polynomial).unwrap();
        let scale: f64 = res.samples().iter().map(|v| v.abs().powf(pv - 1.0)).sum();
        for k in 0..7 {
            let grad: f64 = (0..res.len())
                .map(|j| res.samples()[j].abs().powf(pv - 1.0) * res.samples()[j].signum() * basis(res.node(j), 3)[k])
                .sum();
            // The error is flat to second order near the optimum, so a relative
            // stop of 1e-10 on the error leaves a gradient of order 1e-5.
            assert!(grad.abs() <= 1e-4 * scale, "p={pv} k={k}: {grad}");
        }
        let proj = f.minus_polynomial(&best_global(&f, 3, P2, &opts()).unwrap().polynomial).unwrap();
        assert!(r.error <= proj.norm(p) + 1e-12);
    }
}

#[test]
fn exchange_budget_is_reported() {
    let o = SolverOptions { max_exchange_iterations: 1, ..opts() };
    let err = best_global(&abs_x(N), 12, PINF, &o).unwrap_err();
    assert!(matches!(err, Error::Solve(SolveError::NonConvergence { .. })), "{err}");
}

#[test]
fn single_precision_global() {
    let f = GridFunction32::from_fn(256, |x: f32| x.abs()).unwrap();
    let r = best_global(&f, 4, LebesgueExponent::INF, &SolverOptions::default()).unwrap();
    let d = best_global(&abs_x(256), 4, PINF, &opts()).unwrap();
    assert!((r.error as f64 - d.error).abs() < 1e-5);
}

#[test]
fn windowed_error_examples() {
    let f = cos_k(256, 2.0);
    let t = TrigPolynomial64::new(0.0, vec![0.0, 1.0], vec![0.0, 0.0]).unwrap();
    let w = WindowSpec64::new(0.3, 0.5, P2, NormVariant::SupOverH).unwrap();
    assert!(windowed_error(&f, &t, &w).unwrap() < 1e-12);
    let zero = TrigPolynomial64::constant(0.0);
    let w0 = WindowSpec64::new(0.3, 0.0, P2, NormVariant::FixedDelta).unwrap();
    assert!(close(windowed_error(&f, &zero, &w0).unwrap(), (0.6f64).cos().abs(), 1e-12));
    let one = GridFunction64::from_fn(256, |_| 1.0).unwrap();
    assert!(close(windowed_error(&one, &zero, &w).unwrap(), 1.0, 1e-12));
}

#[test]
fn full_window_is_scaled_global_error() {
    let app = Approximator64::new(sawtooth(1024), opts());
    for p in [P1, P2, LebesgueExponent::finite(4.0).unwrap()] {
        let e = app.best_global(5, p).unwrap().error;
        let w = WindowSpec64::new(0.0, PI, p, NormVariant::FixedDelta).unwrap();
        let via = app.e_windowed(5, &w, EMethod::ViaGlobal).unwrap();
        let pv = match p {
            LebesgueExponent::Finite(v) => v,
            LebesgueExponent::Infinity => unreachable!(),
        };
        assert!(close(via, e * (2.0 * PI).powf(-1.0 / pv), 1e-10), "p={p}");
    }
    let e = app.best_global(5, PINF).unwrap().error;
    let w = WindowSpec64::new(0.0, PI, PINF, NormVariant::SupOverH).unwrap();
    assert!(close(app.e_windowed(5, &w, EMethod::ViaGlobal).unwrap(), e, 1e-12));
}

#[test]
fn direct_l2_example() {
    let f = GridFunction64::from_fn(1024, |x: f64| x.cos() + (5.0 * x).cos()).unwrap();
    let w = WindowSpec64::new(0.0, PI, P2, NormVariant::FixedDelta).unwrap();
    let direct = windowed_best(&f, 3, &w, &opts()).unwrap();
    assert!(close(direct.error, 0.5f64.sqrt(), 1e-10));
    assert_eq!(direct.method, Method::WindowDirect);
}

#[test]
fn direct_sup_matches_lp_on_node_windows() {
    let f = abs_x(256);
    let h = 2.0 * PI / 256.0;
    for (j0, steps, n) in [(128usize, 20usize, 2usize), (100, 40, 4), (10, 64, 3), (200, 90, 6)] {
        let x = f.node(j0);
        let delta = steps as f64 * h;
        let w = WindowSpec64::new(x, delta, PINF, NormVariant::FixedDelta).unwrap();
        let got = windowed_best(&f, n, &w, &opts()).unwrap().error;
        let (xs, ys): (Vec<f64>, Vec<f64>) = (0..=2 * steps)
            .map(|i| {
                let j = (j0 + 256 + i - steps) % 256;
                (x + (i as f64 - steps as f64) * h, f.samples()[j])
            })
            .unzip();
        let want = lp_oracle(&xs, &ys, n, true);
        assert!(close(got, want, 1e-8 * (1.0 + want)), "x={x} δ={delta} n={n}: {got} vs {want}");
    }
}

#[test]
fn direct_is_below_via_global() {
    let app = Approximator64::new(abs_x(N), opts());
    for p in [P1, P2, PINF] {
        for (x, d) in [(0.0, PI / 4.0), (0.0, PI / 2.0), (1.3, 0.8), (-2.0, PI)] {
            let w = WindowSpec64::new(x, d, p, NormVariant::FixedDelta).unwrap();
            let direct = app.e_windowed(6, &w, EMethod::Direct).unwrap();
            let via = app.e_windowed(6, &w, EMethod::ViaGlobal).unwrap();
            assert!(direct <= via * (1.0 + 1e-8) + 1e-12, "p={p} x={x} δ={d}: {direct} > {via}");
        }
    }
    let w = WindowSpec64::new(0.0, 1.0, P2, NormVariant::SupOverH).unwrap();
    assert!(matches!(app.e_windowed(6, &w, EMethod::Direct), Err(Error::Solve(SolveError::Unsupported(_)))));
}

#[test]
fn f_table_properties() {
    let app = Approximator64::new(abs_x(N), opts());
    let t = app.f_average(4, 3, 0.0, PINF, NormVariant::SupOverH).unwrap();
    assert_eq!(t.entries.len(), 4);
    for (k, d) in t.deltas.iter().enumerate() {
        assert!(close(*d, PI / (k + 1) as f64, 1e-15));
    }
    for w in t.entries.windows(2) {
        assert!(w[1] <= w[0] + 1e-15);
    }
    let mean = t.entries.iter().sum::<f64>() / 4.0;
    assert!(close(t.average, mean, 1e-15));
    let rows = t.rows();
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[4].0, None);

    let t0 = app.f_average(4, 0, 0.7, P2, NormVariant::SupOverH).unwrap();
    let w = WindowSpec64::new(0.7, PI, P2, NormVariant::SupOverH).unwrap();
    assert!(close(t0.average, app.e_windowed(4, &w, EMethod::ViaGlobal).unwrap(), 1e-14));

    let p = TrigPolynomial64::new(1.0, vec![0.5, 0.5], vec![0.0, -1.0]).unwrap();
    let exact = Approximator64::new(from_poly(256, &p), opts());
    assert!(exact.f_average(2, 5, 0.3, PINF, NormVariant::SupOverH).unwrap().average < 1e-12);
}

#[test]
fn approximator_caches_results() {
    let app = Arc::new(Approximator64::new(sawtooth(1024), opts()));
    assert!(app.cached(3, PINF).is_none());
    let a = app.best_global(3, PINF).unwrap();
    let b = app.best_global(3, PINF).unwrap();
    assert!(Arc::ptr_eq(&a, &b));
    let handles: Vec<_> = (0..4)
        .map(|_| {
            let app = app.clone();
            std::thread::spawn(move || app.best_global(5, P1).unwrap())
        })
        .collect();
    let results: Vec<_> = handles.into_iter().map(|h| h.join().unwrap()).collect();
    for r in &results {
        assert_eq!(**r, *results[0]);
    }
    assert!(Arc::ptr_eq(&app.cached(5, P1).unwrap(), &app.best_global(5, P1).unwrap()));
}
