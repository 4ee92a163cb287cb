//! Global and windowed best trigonometric approximation.
//!
//! All global solvers work on the sample grid: the `L^2` solution is the
//! discrete orthogonal projection, the sup-norm solution is a discrete
//! minimax over the grid nodes, and other exponents use IRLS on the grid.

mod direct;
mod exchange;
mod irls;

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use rustfft::num_complex::Complex;
use serde::{Deserialize, Serialize};

pub use direct::windowed_best;

use crate::error::{Error, Result};
use crate::fourier::{GridFunction, LebesgueExponent, TrigPolynomial};
use crate::local_norms::{standard_deltas, windowed_norm, NormVariant, WindowProfile, WindowSpec};
use crate::scalar::Scalar;
use exchange::{minimax, ExchangeProblem};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ExactL2,
    ExchangeMinimax,
    IterativeP,
    WindowDirect,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BestApproxResult<T> {
    pub n: usize,
    pub p: LebesgueExponent,
    pub polynomial: TrigPolynomial<T>,
    pub error: T,
    pub method: Method,
    pub iterations: usize,
    /// False when the minimiser need not be unique (`p = 1`).
    pub certified: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverOptions {
    pub max_exchange_iterations: usize,
    /// Stop when `max|r| - |h| < tol (1 + max|r|)`.
    pub exchange_tol: f64,
    pub irls_max_iterations: usize,
    /// Relative change of the error at which IRLS stops.
    pub irls_tol: f64,
    /// Residual floor in the IRLS weights, relative to `max|f|`.
    pub irls_floor: f64,
    /// A residual below `exact_tol * max|f|` counts as an exact fit.
    pub exact_tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            max_exchange_iterations: 200,
            exchange_tol: 1e-8,
            irls_max_iterations: 2000,
            irls_tol: 1e-10,
            irls_floor: 1e-9,
            exact_tol: 1e-12,
        }
    }
}

/// `[1, cos x, sin x, ..., cos nx, sin nx]`.
pub(crate) fn basis_row<T: Scalar>(x: T, n: usize, out: &mut [T]) {
    out[0] = T::one();
    for k in 1..=n {
        let (s, c) = (x * T::of_usize(k)).sin_cos();
        out[2 * k - 1] = c;
        out[2 * k] = s;
    }
}

/// Discrete orthogonal projection onto `H_n`: the polynomial, the residual
/// on the grid and the Parseval tail `(2π/N²) Σ_{|k|>n} |F_k|²` (squared error).
fn l2_projection<T: Scalar>(f: &GridFunction<T>, n: usize) -> (TrigPolynomial<T>, Vec<T>, T) {
    let len = f.len();
    let spec = f.spectrum();
    let scale = (T::one() + T::one()) / T::of_usize(len);
    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    for (k, z) in spec.iter().enumerate().take(n + 1).skip(1) {
        let z = if k % 2 == 0 { *z } else { -*z };
        a.push(scale * z.re);
        b.push(-scale * z.im);
    }
    let poly = TrigPolynomial::new(scale * spec[0].re, a, b).expect("matching lengths");
    let mut tail: Vec<Complex<T>> = spec;
    let zero = Complex::new(T::zero(), T::zero());
    tail[0] = zero;
    for k in 1..=n {
        tail[k] = zero;
        tail[len - k] = zero;
    }
    let energy: T = tail.iter().map(|z| z.norm_sqr()).sum();
    let sq_err = energy * T::TAU() / T::of_usize(len * len);
    T::fft(&mut tail, true);
    let inv = T::one() / T::of_usize(len);
    let residual = tail.iter().map(|z| z.re * inv).collect();
    (poly, residual, sq_err)
}

struct GridProblem<'a, T: Scalar> {
    f: &'a GridFunction<T>,
    n: usize,
}

impl<T: Scalar> ExchangeProblem<T> for GridProblem<'_, T> {
    fn len(&self) -> usize {
        self.f.len()
    }

    fn dim(&self) -> usize {
        2 * self.n + 1
    }

    fn cyclic(&self) -> bool {
        true
    }

    fn target(&self, i: usize) -> T {
        self.f.samples()[i]
    }

    fn basis_row(&self, i: usize, out: &mut [T]) {
        basis_row(self.f.node(i), self.n, out);
    }

    fn residual(&self, c: &[T]) -> Vec<T> {
        let poly = TrigPolynomial::from_basis(c);
        let vals = poly.eval_grid(self.f.len()).expect("degree checked by caller");
        self.f.samples().iter().zip(&vals).map(|(a, b)| *a - *b).collect()
    }
}

/// `E_n(f)_{X^p}` and a minimiser, computed on the sample grid.
pub fn best_global<T: Scalar>(
    f: &GridFunction<T>,
    n: usize,
    p: LebesgueExponent,
    opts: &SolverOptions,
) -> Result<BestApproxResult<T>> {
    if f.len() < 4 * n {
        return Err(Error::Aliasing { samples: f.len(), kmax: n });
    }
    let (poly, residual, sq_err) = l2_projection(f, n);
    let make = |polynomial, error, method, iterations, certified| BestApproxResult {
        n,
        p,
        polynomial,
        error,
        method,
        iterations,
        certified,
    };
    if p.is_two() {
        return Ok(make(poly, sq_err.max(T::zero()).sqrt(), Method::ExactL2, 0, true));
    }
    let rmax = residual.iter().fold(T::zero(), |acc, v| acc.max(v.abs()));
    if rmax <= T::lit(opts.exact_tol) * f.max_abs() {
        let err = p.grid_norm(&residual);
        return Ok(make(poly, err, Method::ExactL2, 0, true));
    }
    match p {
        LebesgueExponent::Infinity => {
            // The projection, possibly shifted by a constant, is already optimal
            // when its residual equioscillates (e.g. lacunary tails).
            let (lo, hi) = residual.iter().fold((T::infinity(), T::neg_infinity()), |(a, b), v| (a.min(*v), b.max(*v)));
            let shift = (lo + hi) / (T::one() + T::one());
            let shifted: Vec<T> = residual.iter().map(|v| *v - shift).collect();
            let tol = T::lit(opts.exchange_tol);
            if exchange::alternates(&shifted, 2 * n + 2, true, tol) {
                let err = (hi - lo) / (T::one() + T::one());
                return Ok(make(poly.add(&TrigPolynomial::constant(shift)), err, Method::ExchangeMinimax, 0, true));
            }
            let prob = GridProblem { f, n };
            let out = minimax(&prob, &residual, opts.max_exchange_iterations, opts.exchange_tol)?;
            Ok(make(TrigPolynomial::from_basis(&out.coeffs), out.error, Method::ExchangeMinimax, out.iterations, true))
        }
        LebesgueExponent::Finite(pv) => {
            let out = irls::global(f, n, pv, &poly, residual, opts)?;
            let err = p.grid_norm(&out.residual);
            Ok(make(TrigPolynomial::from_basis(&out.coeffs), err, Method::IterativeP, out.iterations, pv > 1.0))
        }
    }
}

/// `‖f - T‖` in the window `w`.
pub fn windowed_error<T: Scalar>(f: &GridFunction<T>, t: &TrigPolynomial<T>, w: &WindowSpec<T>) -> Result<T> {
    windowed_norm(&f.minus_polynomial(t)?, w)
}

/// How `E_n(f, x; δ)` is obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EMethod {
    /// Windowed norm of the residual of the global best polynomial.
    ViaGlobal,
    /// Minimisation restricted to the window samples.
    Direct,
}

/// Windowed errors `E_n(f, x; π/(k+1))`, `k = 0..=m`, and their mean `F_{n,m}(f, x)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FTable<T> {
    pub n: usize,
    pub m: usize,
    pub x: T,
    pub p: LebesgueExponent,
    pub variant: NormVariant,
    pub deltas: Vec<T>,
    pub entries: Vec<T>,
    pub average: T,
}

impl<T: Scalar> FTable<T> {
    /// CSV rows `(k, δ_k, E)`; the trailing row carries the average with `k = None`.
    pub fn rows(&self) -> Vec<(Option<usize>, T, T)> {
        self.deltas
            .iter()
            .zip(&self.entries)
            .enumerate()
            .map(|(k, (d, e))| (Some(k), *d, *e))
            .chain(std::iter::once((None, T::nan(), self.average)))
            .collect()
    }
}

type CacheKey = (usize, LebesgueExponent);

/// A function together with a memo of its global best approximations.
///
/// The cache tolerates concurrent readers; when two threads race to insert
/// the same key the first insertion wins, and both computed values are
/// identical because the solvers are deterministic.
pub struct Approximator<T: Scalar> {
    f: GridFunction<T>,
    opts: SolverOptions,
    cache: RwLock<HashMap<CacheKey, Arc<BestApproxResult<T>>>>,
}

impl<T: Scalar> Approximator<T> {
    pub fn new(f: GridFunction<T>, opts: SolverOptions) -> Self {
        Approximator { f, opts, cache: RwLock::new(HashMap::new()) }
    }

    pub fn function(&self) -> &GridFunction<T> {
        &self.f
    }

    pub fn options(&self) -> &SolverOptions {
        &self.opts
    }

    pub fn cached(&self, n: usize, p: LebesgueExponent) -> Option<Arc<BestApproxResult<T>>> {
        self.cache.read().expect("cache lock").get(&(n, p)).cloned()
    }

    pub fn best_global(&self, n: usize, p: LebesgueExponent) -> Result<Arc<BestApproxResult<T>>> {
        if let Some(hit) = self.cached(n, p) {
            return Ok(hit);
        }
        let value = Arc::new(best_global(&self.f, n, p, &self.opts)?);
        let mut guard = self.cache.write().expect("cache lock");
        Ok(guard.entry((n, p)).or_insert(value).clone())
    }

    /// Residual `f - T_n` of the global best polynomial, with exact evaluation
    /// when `f` has an evaluator.
    pub fn residual(&self, n: usize, p: LebesgueExponent) -> Result<GridFunction<T>> {
        let best = self.best_global(n, p)?;
        self.f.minus_polynomial(&best.polynomial)
    }

    pub fn windowed_error(&self, t: &TrigPolynomial<T>, w: &WindowSpec<T>) -> Result<T> {
        windowed_error(&self.f, t, w)
    }

    /// `E_n(f, x; δ)` (sup variant) or `E°_n(f, x; δ)` (fixed variant).
    pub fn e_windowed(&self, n: usize, w: &WindowSpec<T>, method: EMethod) -> Result<T> {
        match method {
            EMethod::ViaGlobal => {
                let best = self.best_global(n, w.p)?;
                windowed_error(&self.f, &best.polynomial, w)
            }
            EMethod::Direct => Ok(windowed_best(&self.f, n, w, &self.opts)?.error),
        }
    }

    /// `F_{n,m}(f, x)` with its table of windowed errors, via the global minimiser.
    pub fn f_average(&self, n: usize, m: usize, x: T, p: LebesgueExponent, variant: NormVariant) -> Result<FTable<T>> {
        let residual = self.residual(n, p)?;
        let profile = WindowProfile::new(&residual, x, p, T::PI())?;
        let deltas = standard_deltas::<T>(m);
        let entries: Vec<T> = deltas.iter().map(|&d| profile.norm(d, variant)).collect::<Result<_>>()?;
        let average = entries.iter().copied().sum::<T>() / T::of_usize(m + 1);
        Ok(FTable { n, m, x, p, variant, deltas, entries, average })
    }
}
