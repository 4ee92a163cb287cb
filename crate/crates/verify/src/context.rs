//! Per-function state: the sampled function, its coefficients, the global
//! best approximations, and tables of windowed errors of the residuals.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Arc;

use trigapprox::{
    compute_coefficients, standard_deltas, tau, vp_mean, Approximator64, FourierCoefficients64, GridFunction64,
    LebesgueExponent, NormVariant, SolverOptions, TrigPolynomial64, WindowProfile,
};

use crate::corpus::CorpusFunction;
use crate::{HarnessError, Result};

/// What the local tables must cover.
#[derive(Clone, Debug, Default)]
pub struct Needs {
    /// Standard radii `π/(j+1)` for `j = 0..=max_j`.
    pub max_j: usize,
    /// Radii `iπ/count`, `i = 1..=count`, tabulated for degrees up to `extra_max`.
    pub extra_deltas: usize,
    pub extra_max: usize,
    /// Grid pairs `(n, m)`; the table of degree `n - m` gets their integral terms.
    pub integral_pairs: Vec<(usize, usize)>,
    pub integral_points: usize,
}

/// The integral part of the first bound for one pair `(n, m)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegralTerm {
    pub n: usize,
    pub m: usize,
    /// `E°(π/(2n-m+1))`.
    pub e_low: f64,
    /// `∫ E°(t)/t dt` over `[π/(2n-m+1), π/(m+1)]`.
    pub integral: f64,
    /// `|I_P - I_{P/2}|` for the trapezoid rule in `ln t`.
    pub allowance: f64,
}

/// Windowed errors of `f - T_k` around one point.
#[derive(Clone, Debug)]
pub struct LocalErrors {
    /// `|f(x) - T_k(x)|`.
    pub at_zero: f64,
    sup_prefix: Vec<f64>,
    fixed_prefix: Vec<f64>,
    sup: Vec<f64>,
    /// Sup-variant errors at the extra radii, when tabulated.
    pub extra: Vec<f64>,
    pub integrals: Vec<IntegralTerm>,
}

impl LocalErrors {
    /// `F_{k,m}` (sup variant) or `F°_{k,m}` (fixed variant).
    pub fn average(&self, m: usize, variant: NormVariant) -> f64 {
        let prefix = match variant {
            NormVariant::SupOverH => &self.sup_prefix,
            NormVariant::FixedDelta => &self.fixed_prefix,
        };
        prefix[m + 1] / (m + 1) as f64
    }

    /// `E_k(f, x; π/(j+1))`.
    pub fn at_standard(&self, j: usize) -> f64 {
        self.sup[j]
    }

    pub fn integral(&self, n: usize, m: usize) -> Option<&IntegralTerm> {
        self.integrals.iter().find(|t| t.n == n && t.m == m)
    }
}

fn prefix_sums(values: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len() + 1);
    out.push(0.0);
    let mut acc = 0.0;
    for v in values {
        acc += v;
        out.push(acc);
    }
    out
}

/// Trapezoid rule for `∫_a^b g(t)/t dt = ∫ g(e^u) du` on `points` cells in `u`,
/// with the half-resolution estimate for the error allowance.
pub fn log_trapezoid(a: f64, b: f64, points: usize, g: impl Fn(f64) -> trigapprox::Result<f64>) -> trigapprox::Result<(f64, f64)> {
    if !(b > a) {
        return Ok((0.0, 0.0));
    }
    let (la, lb) = (a.ln(), b.ln());
    let du = (lb - la) / points as f64;
    let values: Vec<f64> = (0..=points)
        .map(|i| {
            // Pin the end points so the radii stay inside the tabulated reach.
            let t = if i == 0 { a } else if i == points { b } else { (la + du * i as f64).exp() };
            g(t)
        })
        .collect::<trigapprox::Result<_>>()?;
    let rule = |step: usize| {
        let h = du * step as f64;
        let inner: f64 = values.iter().step_by(step).skip(1).take(points / step - 1).sum();
        h * (0.5 * (values[0] + values[points]) + inner)
    };
    let fine = rule(1);
    let coarse = rule(2);
    Ok((fine, (fine - coarse).abs()))
}

pub struct FunctionContext {
    pub func: &'static CorpusFunction,
    /// The harness works with `scale · f`.
    pub scale: f64,
    pub grid: GridFunction64,
    pub coeffs: FourierCoefficients64,
    pub xs: Vec<f64>,
    app: Approximator64,
    needs: Needs,
    tables: HashMap<(usize, LebesgueExponent), Arc<Vec<LocalErrors>>>,
    means: HashMap<(usize, usize), Arc<TrigPolynomial64>>,
}

impl FunctionContext {
    pub fn new(
        func: &'static CorpusFunction,
        samples: usize,
        scale: f64,
        xs: Vec<f64>,
        needs: Needs,
        solver: SolverOptions,
    ) -> Result<Self> {
        let ctx = |what: &str| HarnessError::numeric(format!("{}: {what}", func.name));
        let grid = func.grid(samples, scale).map_err(ctx("sampling"))?;
        let coeffs = compute_coefficients(&grid, samples / 4).map_err(ctx("coefficients"))?;
        let app = Approximator64::new(grid.clone(), solver);
        Ok(FunctionContext { func, scale, grid, coeffs, xs, app, needs, tables: HashMap::new(), means: HashMap::new() })
    }

    fn err(&self, what: String) -> impl FnOnce(trigapprox::Error) -> HarnessError {
        HarnessError::numeric(format!("{}: {what}", self.func.name))
    }

    pub fn approximator(&self) -> &Approximator64 {
        &self.app
    }

    /// `f(x)` as seen by the harness (the scaled exact evaluator).
    pub fn value(&self, x: f64) -> f64 {
        self.grid.eval(x)
    }

    pub fn vp(&mut self, n: usize, m: usize) -> Result<Arc<TrigPolynomial64>> {
        if let Some(p) = self.means.get(&(n, m)) {
            return Ok(p.clone());
        }
        let p = Arc::new(vp_mean(&self.coeffs, n, m).map_err(self.err(format!("sigma_{n},{m}")))?);
        self.means.insert((n, m), p.clone());
        Ok(p)
    }

    pub fn sigma(&mut self, n: usize, m: usize, x: f64) -> Result<f64> {
        Ok(self.vp(n, m)?.eval(x))
    }

    pub fn tau(&self, n: usize, m: usize, x: f64) -> Result<f64> {
        Ok(tau(&self.coeffs, n, m, x).map_err(self.err(format!("tau_{n},{m}")))?.value)
    }

    /// `E_k(f)_p` over the whole circle.
    pub fn global_error(&self, k: usize, p: LebesgueExponent) -> Result<f64> {
        Ok(self.app.best_global(k, p).map_err(self.err(format!("E_{k} p={p}")))?.error)
    }

    /// Local error tables of `f - T_k` (with `T_k` the global best in `L^p`) at every x-grid point.
    pub fn local(&mut self, k: usize, p: LebesgueExponent) -> Result<Arc<Vec<LocalErrors>>> {
        if let Some(t) = self.tables.get(&(k, p)) {
            return Ok(t.clone());
        }
        let residual = self.app.residual(k, p).map_err(self.err(format!("residual k={k} p={p}")))?;
        let deltas = standard_deltas::<f64>(self.needs.max_j);
        let pairs: Vec<(usize, usize)> =
            self.needs.integral_pairs.iter().copied().filter(|&(n, m)| n >= m && n - m == k && m >= 1).collect();
        let mut rows = Vec::with_capacity(self.xs.len());
        for &x in &self.xs {
            let at = |what: &str| self.err(format!("{what} k={k} p={p} x={x}"));
            let profile = WindowProfile::new(&residual, x, p, PI).map_err(at("window"))?;
            let sup: Vec<f64> = deltas.iter().map(|&d| profile.sup(d)).collect::<trigapprox::Result<_>>().map_err(at("sup"))?;
            let fixed: Vec<f64> =
                deltas.iter().map(|&d| profile.fixed(d)).collect::<trigapprox::Result<_>>().map_err(at("fixed"))?;
            let extra = if k <= self.needs.extra_max && self.needs.extra_deltas > 0 {
                let count = self.needs.extra_deltas;
                (1..=count)
                    .map(|i| profile.sup(PI * i as f64 / count as f64))
                    .collect::<trigapprox::Result<_>>()
                    .map_err(at("extra radii"))?
            } else {
                Vec::new()
            };
            let mut integrals = Vec::with_capacity(pairs.len());
            for &(n, m) in &pairs {
                let low = PI / (2 * n - m + 1) as f64;
                let high = PI / (m + 1) as f64;
                let e_low = profile.fixed(low).map_err(at("E-low"))?;
                let (integral, allowance) =
                    log_trapezoid(low, high, self.needs.integral_points, |t| profile.fixed(t)).map_err(at("integral"))?;
                integrals.push(IntegralTerm { n, m, e_low, integral, allowance });
            }
            rows.push(LocalErrors {
                at_zero: profile.center_value().abs(),
                sup_prefix: prefix_sums(&sup),
                fixed_prefix: prefix_sums(&fixed),
                sup,
                extra,
                integrals,
            });
        }
        let table = Arc::new(rows);
        self.tables.insert((k, p), table.clone());
        Ok(table)
    }
}
