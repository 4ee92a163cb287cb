//! Test functions on the circle, with their smoothness class and jump set.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use trigapprox::{wrap_angle, Evaluator, GridFunction64, TrigPolynomial64};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "class")]
pub enum Smoothness {
    Polynomial { degree: usize },
    Lipschitz,
    Hoelder { alpha: f64 },
    BoundedVariationWithJump,
    Analytic,
}

#[derive(Clone)]
pub struct CorpusFunction {
    pub name: &'static str,
    pub class: Smoothness,
    /// Jump locations in `[-π, π]`; `π` and `-π` name the same point.
    pub jumps: &'static [f64],
    eval: fn(f64) -> f64,
}

impl std::fmt::Debug for CorpusFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CorpusFunction").field("name", &self.name).field("class", &self.class).finish()
    }
}

fn poly5_coeffs() -> TrigPolynomial64 {
    TrigPolynomial64::new(1.0, vec![1.0, 0.0, 0.25, 0.0, -0.1], vec![0.0, -0.5, 0.0, 0.2, 0.05]).expect("static coefficients")
}

fn poly5(x: f64) -> f64 {
    poly5_coeffs().eval(x)
}

fn abs(x: f64) -> f64 {
    wrap_angle(x).abs()
}

/// `x` on `(-π, π)`, 0 at the jump.
fn sawtooth(x: f64) -> f64 {
    let w = wrap_angle(x);
    if w == -PI {
        0.0
    } else {
        w
    }
}

fn weierstrass(x: f64) -> f64 {
    (0..=8).map(|j| 2f64.powf(-(j as f64) / 2.0) * ((1u32 << j) as f64 * x).cos()).sum()
}

fn expcos(x: f64) -> f64 {
    x.cos().exp()
}

fn abssin32(x: f64) -> f64 {
    x.sin().abs().powf(1.5)
}

/// 0 on `(-π, 1)`, 1 on `(1, π)`, midpoints at both jumps.
fn step(x: f64) -> f64 {
    let w = wrap_angle(x);
    if w == -PI || w == 1.0 {
        0.5
    } else if w > 1.0 {
        1.0
    } else {
        0.0
    }
}

fn constant_one(_: f64) -> f64 {
    1.0
}

fn cosx(x: f64) -> f64 {
    x.cos()
}

const REGISTRY: &[CorpusFunction] = &[
    CorpusFunction { name: "poly5", class: Smoothness::Polynomial { degree: 5 }, jumps: &[], eval: poly5 },
    CorpusFunction { name: "abs", class: Smoothness::Lipschitz, jumps: &[], eval: abs },
    CorpusFunction { name: "sawtooth", class: Smoothness::BoundedVariationWithJump, jumps: &[PI], eval: sawtooth },
    CorpusFunction { name: "weierstrass", class: Smoothness::Hoelder { alpha: 0.5 }, jumps: &[], eval: weierstrass },
    CorpusFunction { name: "expcos", class: Smoothness::Analytic, jumps: &[], eval: expcos },
    CorpusFunction { name: "abssin32", class: Smoothness::Hoelder { alpha: 1.5 }, jumps: &[], eval: abssin32 },
    CorpusFunction { name: "step", class: Smoothness::BoundedVariationWithJump, jumps: &[1.0, PI], eval: step },
    CorpusFunction { name: "constant-one", class: Smoothness::Polynomial { degree: 0 }, jumps: &[], eval: constant_one },
    CorpusFunction { name: "cosx", class: Smoothness::Polynomial { degree: 1 }, jumps: &[], eval: cosx },
];

/// Members of the default verification corpus, in report order.
pub const DEFAULT_CORPUS: [&str; 7] = ["poly5", "abs", "sawtooth", "weierstrass", "expcos", "abssin32", "step"];

pub fn registry() -> &'static [CorpusFunction] {
    REGISTRY
}

pub fn lookup(name: &str) -> Option<&'static CorpusFunction> {
    REGISTRY.iter().find(|f| f.name == name)
}

pub fn default_corpus() -> Vec<&'static CorpusFunction> {
    DEFAULT_CORPUS.iter().map(|n| lookup(n).expect("default member registered")).collect()
}

/// Cyclic distance between two angles.
pub fn circle_distance(a: f64, b: f64) -> f64 {
    wrap_angle(a - b).abs()
}

impl CorpusFunction {
    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    pub fn is_continuous(&self) -> bool {
        self.jumps.is_empty()
    }

    pub fn polynomial_degree(&self) -> Option<usize> {
        match self.class {
            Smoothness::Polynomial { degree } => Some(degree),
            _ => None,
        }
    }

    pub fn is_continuity_point(&self, x: f64) -> bool {
        self.jumps.iter().all(|&j| circle_distance(x, j) > 1e-9)
    }

    /// `f(x-)`.
    pub fn left_limit(&self, x: f64) -> f64 {
        self.eval(x - 1e-12)
    }

    /// `scale · f` on an `n`-point grid, keeping the exact evaluator.
    pub fn grid(&self, n: usize, scale: f64) -> trigapprox::Result<GridFunction64> {
        let eval = self.eval;
        let f: Evaluator<f64> = Arc::new(move |x: f64| scale * eval(x));
        GridFunction64::from_evaluator(n, f)
    }
}

/// `count` equispaced points `-π + 2π(i + 1/2)/count`, each moved off any jump
/// of `f` by a quarter spacing.
pub fn x_grid(f: &CorpusFunction, count: usize) -> Vec<f64> {
    let h = 2.0 * PI / count as f64;
    (0..count)
        .map(|i| {
            let x = -PI + h * (i as f64 + 0.5);
            if f.is_continuity_point(x) {
                x
            } else {
                x + h / 4.0
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluators_are_periodic_away_from_jumps() {
        for f in registry() {
            for x in [-3.0, -1.0, 0.2, 2.9] {
                assert!((f.eval(x) - f.eval(x + 2.0 * PI)).abs() < 1e-12, "{}", f.name);
            }
            if f.is_continuous() {
                assert!((f.eval(-PI) - f.eval(PI)).abs() < 1e-12, "{}", f.name);
            }
        }
    }

    #[test]
    fn poly5_matches_its_coefficients() {
        let p = poly5_coeffs();
        assert_eq!(p.degree(), 5);
        assert!((poly5(0.0) - (0.5 + 1.0 + 0.25 - 0.1)).abs() < 1e-15);
    }

    #[test]
    fn jump_conventions() {
        let saw = lookup("sawtooth").unwrap();
        assert_eq!(saw.eval(PI), 0.0);
        assert!((saw.left_limit(PI) - PI).abs() < 1e-9);
        assert!(!saw.is_continuity_point(-PI));
        let step = lookup("step").unwrap();
        assert_eq!(step.eval(1.0), 0.5);
        assert_eq!(step.eval(2.0), 1.0);
        assert_eq!(step.eval(0.0), 0.0);
    }

    #[test]
    fn x_grid_avoids_jumps() {
        for f in default_corpus() {
            let xs = x_grid(f, 17);
            assert_eq!(xs.len(), 17);
            assert!(xs.iter().all(|&x| f.is_continuity_point(x)));
        }
        let xs = x_grid(lookup("step").unwrap(), 2);
        assert!(xs.iter().all(|&x| circle_distance(x, 1.0) > 0.1));
    }

    #[test]
    fn default_corpus_has_seven_members() {
        let names: Vec<_> = default_corpus().iter().map(|f| f.name).collect();
        assert_eq!(names, DEFAULT_CORPUS);
        assert!(lookup("nope").is_none());
    }
}
