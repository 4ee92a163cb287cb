#![allow(dead_code)]

use std::f64::consts::PI;

use trigapprox::{wrap_angle, GridFunction64, TrigPolynomial64};

pub const N: usize = 4096;

/// `f(x) = x` on `(-π, π)`, with the mean of the one-sided limits at the jump.
pub fn sawtooth(n: usize) -> GridFunction64 {
    GridFunction64::from_fn(n, |x: f64| {
        let w = wrap_angle(x);
        if w == -PI {
            0.0
        } else {
            w
        }
    })
    .unwrap()
}

pub fn abs_x(n: usize) -> GridFunction64 {
    GridFunction64::from_fn(n, |x: f64| wrap_angle(x).abs()).unwrap()
}

pub fn cos_k(n: usize, k: f64) -> GridFunction64 {
    GridFunction64::from_fn(n, move |x: f64| (k * x).cos()).unwrap()
}

pub fn from_poly(n: usize, p: &TrigPolynomial64) -> GridFunction64 {
    let p = p.clone();
    GridFunction64::from_fn(n, move |x: f64| p.eval(x)).unwrap()
}

/// Composite Simpson rule with `2 * pieces` subintervals.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, pieces: usize) -> f64 {
    let m = 2 * pieces;
    let h = (b - a) / m as f64;
    let mut s = f(a) + f(b);
    for i in 1..m {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + h * i as f64);
    }
    s * h / 3.0
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}
