//! Fourier analysis of 2π-periodic functions sampled on a uniform grid:
//! coefficients, partial sums, the Dirichlet and de la Vallée-Poussin
//! kernels, and the de la Vallée-Poussin means `σ_{n,m} f`.
//!
//! Conventions: the grid is `x_j = -π + 2πj/N`, `j = 0..N`, and a
//! trigonometric polynomial is `a0/2 + Σ_{k=1}^{n} (a_k cos kx + b_k sin kx)`.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Below this value of `|sin(t/2)|` the kernels switch to their cosine-sum form.
pub const KERNEL_SINGULARITY: f64 = 1e-8;

/// Smallest admissible grid.
pub const MIN_SAMPLES: usize = 16;

/// Exponent `p` of the space `X^p`: `L^p` for finite `p >= 1`, `C` for infinity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LebesgueExponent {
    Finite(f64),
    Infinity,
}

impl LebesgueExponent {
    pub const ONE: Self = LebesgueExponent::Finite(1.0);
    pub const TWO: Self = LebesgueExponent::Finite(2.0);
    pub const INF: Self = LebesgueExponent::Infinity;

    pub fn finite(p: f64) -> Result<Self> {
        if p.is_finite() && p >= 1.0 {
            Ok(LebesgueExponent::Finite(p))
        } else {
            Err(Error::InvalidExponent(p.to_string()))
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, LebesgueExponent::Infinity)
    }

    /// Finite exponent value, `None` for the sup norm.
    pub fn finite_value(self) -> Option<f64> {
        match self {
            LebesgueExponent::Finite(p) => Some(p),
            LebesgueExponent::Infinity => None,
        }
    }

    pub fn is_two(self) -> bool {
        self == LebesgueExponent::TWO
    }

    /// `|v|^p`, with cheap paths for the common exponents.
    #[inline]
    pub fn power<T: Scalar>(self, v: T) -> T {
        match self {
            LebesgueExponent::Finite(p) if p == 1.0 => v.abs(),
            LebesgueExponent::Finite(p) if p == 2.0 => v * v,
            LebesgueExponent::Finite(p) => v.abs().powf(T::lit(p)),
            LebesgueExponent::Infinity => v.abs(),
        }
    }

    /// Inverse of [`power`](Self::power) for nonnegative arguments.
    #[inline]
    pub fn root<T: Scalar>(self, v: T) -> T {
        let v = v.max(T::zero());
        match self {
            LebesgueExponent::Finite(p) if p == 1.0 => v,
            LebesgueExponent::Finite(p) if p == 2.0 => v.sqrt(),
            LebesgueExponent::Finite(p) => v.powf(T::one() / T::lit(p)),
            LebesgueExponent::Infinity => v,
        }
    }

    /// Unnormalised periodic norm `(∫_Q |g|^p)^{1/p}` (or the max) of grid samples.
    pub fn grid_norm<T: Scalar>(self, values: &[T]) -> T {
        if values.is_empty() {
            return T::zero();
        }
        match self {
            LebesgueExponent::Infinity => values.iter().fold(T::zero(), |acc, v| acc.max(v.abs())),
            finite => {
                let h = T::TAU() / T::of_usize(values.len());
                let sum: T = values.iter().map(|&v| finite.power(v)).sum();
                finite.root(sum * h)
            }
        }
    }
}

impl Eq for LebesgueExponent {}

impl Hash for LebesgueExponent {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            LebesgueExponent::Finite(p) => p.to_bits().hash(state),
            LebesgueExponent::Infinity => u64::MAX.hash(state),
        }
    }
}

impl fmt::Display for LebesgueExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LebesgueExponent::Finite(p) => write!(f, "{p}"),
            LebesgueExponent::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for LebesgueExponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "Infinity" | "∞" => Ok(LebesgueExponent::Infinity),
            other => other
                .parse::<f64>()
                .map_err(|_| Error::InvalidExponent(other.to_string()))
                .and_then(LebesgueExponent::finite),
        }
    }
}

impl Serialize for LebesgueExponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for LebesgueExponent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = String::deserialize(deserializer)?;
        raw.parse().map_err(serde::de::Error::custom)
    }
}

/// Exact point evaluation rule attached to a [`GridFunction`].
pub type Evaluator<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// Reduces `x` to the fundamental interval `[-π, π)`.
#[inline]
pub fn wrap_angle<T: Scalar>(x: T) -> T {
    let tau = T::TAU();
    x - tau * ((x + T::PI()) / tau).floor()
}

/// A 2π-periodic real function given by `N` uniform samples, optionally
/// backed by an exact evaluator that agrees with the samples on the grid.
#[derive(Clone)]
pub struct GridFunction<T: Scalar> {
    samples: Vec<T>,
    evaluator: Option<Evaluator<T>>,
}

impl<T: Scalar> fmt::Debug for GridFunction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GridFunction")
            .field("samples", &self.samples.len())
            .field("evaluator", &self.evaluator.is_some())
            .finish()
    }
}

fn check_grid(n: usize) -> Result<()> {
    if n >= MIN_SAMPLES && n.is_power_of_two() {
        Ok(())
    } else {
        Err(Error::InvalidGrid(n))
    }
}

impl<T: Scalar> GridFunction<T> {
    pub fn from_samples(samples: Vec<T>) -> Result<Self> {
        check_grid(samples.len())?;
        Ok(GridFunction { samples, evaluator: None })
    }

    /// Samples `f` on an `n`-point grid and keeps `f` as the exact evaluator.
    pub fn from_fn<F>(n: usize, f: F) -> Result<Self>
    where
        F: Fn(T) -> T + Send + Sync + 'static,
    {
        Self::from_evaluator(n, Arc::new(f))
    }

    pub fn from_evaluator(n: usize, f: Evaluator<T>) -> Result<Self> {
        check_grid(n)?;
        let h = T::TAU() / T::of_usize(n);
        let samples = (0..n).map(|j| f(-T::PI() + h * T::of_usize(j))).collect();
        Ok(GridFunction { samples, evaluator: Some(f) })
    }

    /// Same function sampled at a different resolution. Requires an evaluator.
    pub fn resampled(&self, n: usize) -> Result<Self> {
        match &self.evaluator {
            Some(f) => Self::from_evaluator(n, f.clone()),
            None => Err(Error::Precondition("resampling needs an exact evaluator".into())),
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[T] {
        &self.samples
    }

    pub fn evaluator(&self) -> Option<&Evaluator<T>> {
        self.evaluator.as_ref()
    }

    pub fn spacing(&self) -> T {
        T::TAU() / T::of_usize(self.samples.len())
    }

    pub fn node(&self, j: usize) -> T {
        -T::PI() + self.spacing() * T::of_usize(j)
    }

    /// Sample with periodic wrap-around indexing.
    #[inline]
    pub fn sample(&self, j: isize) -> T {
        let n = self.samples.len() as isize;
        self.samples[j.rem_euclid(n) as usize]
    }

    /// Grid cell containing `x`: index `i` with `x_i <= x < x_{i+1}` and the
    /// fractional offset in `[0, 1)`.
    pub fn locate(&self, x: T) -> (usize, T) {
        let n = self.samples.len();
        let u = (wrap_angle(x) + T::PI()) / self.spacing();
        let i = u.floor();
        let mut frac = u - i;
        let mut idx = i.to_usize().unwrap_or(0);
        if idx >= n {
            idx -= n;
        }
        if frac < T::zero() {
            frac = T::zero();
        }
        if frac >= T::one() {
            frac = T::zero();
            idx = (idx + 1) % n;
        }
        (idx, frac)
    }

    /// Piecewise-linear interpolation of the samples.
    pub fn interp(&self, x: T) -> T {
        let (i, frac) = self.locate(x);
        let a = self.samples[i];
        if frac == T::zero() {
            return a;
        }
        let b = self.sample(i as isize + 1);
        a + (b - a) * frac
    }

    /// Exact value if an evaluator is present, otherwise linear interpolation.
    pub fn eval(&self, x: T) -> T {
        match &self.evaluator {
            Some(f) => f(x),
            None => self.interp(x),
        }
    }

    pub fn max_abs(&self) -> T {
        self.samples.iter().fold(T::zero(), |acc, v| acc.max(v.abs()))
    }

    /// Global `X^p` norm by the trapezoid rule on the grid.
    pub fn norm(&self, p: LebesgueExponent) -> T {
        p.grid_norm(&self.samples)
    }

    /// `f - T`, evaluated on the grid through an FFT; the evaluator (if any)
    /// is composed with the exact polynomial evaluation.
    pub fn minus_polynomial(&self, poly: &TrigPolynomial<T>) -> Result<Self> {
        let values = poly.eval_grid(self.len())?;
        let samples = self.samples.iter().zip(&values).map(|(f, t)| *f - *t).collect();
        let evaluator = self.evaluator.as_ref().map(|f| {
            let f = f.clone();
            let poly = poly.clone();
            Arc::new(move |x: T| f(x) - poly.eval(x)) as Evaluator<T>
        });
        Ok(GridFunction { samples, evaluator })
    }

    /// `alpha * self + beta * other` on a common grid.
    pub fn combine(&self, alpha: T, other: &Self, beta: T) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::Precondition("grid sizes differ".into()));
        }
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(f, g)| alpha * *f + beta * *g)
            .collect();
        let evaluator = match (&self.evaluator, &other.evaluator) {
            (Some(f), Some(g)) => {
                let (f, g) = (f.clone(), g.clone());
                Some(Arc::new(move |x: T| alpha * f(x) + beta * g(x)) as Evaluator<T>)
            }
            _ => None,
        };
        Ok(GridFunction { samples, evaluator })
    }

    pub fn scaled(&self, alpha: T) -> Self {
        let samples = self.samples.iter().map(|v| alpha * *v).collect();
        let evaluator = self.evaluator.as_ref().map(|f| {
            let f = f.clone();
            Arc::new(move |x: T| alpha * f(x)) as Evaluator<T>
        });
        GridFunction { samples, evaluator }
    }

    /// Forward DFT of the samples, `F_k = Σ_j f_j exp(-2πijk/N)`.
    pub(crate) fn spectrum(&self) -> Vec<Complex<T>> {
        let mut buf: Vec<Complex<T>> = self.samples.iter().map(|&v| Complex::new(v, T::zero())).collect();
        T::fft(&mut buf, false);
        buf
    }
}

/// Element of `H_n`: `a0/2 + Σ_{k=1}^{n} (a_k cos kx + b_k sin kx)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrigPolynomial<T> {
    a0: T,
    a: Vec<T>,
    b: Vec<T>,
}

impl<T: Scalar> TrigPolynomial<T> {
    pub fn new(a0: T, a: Vec<T>, b: Vec<T>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::Precondition(format!(
                "cosine and sine coefficient arrays differ in length ({} vs {})",
                a.len(),
                b.len()
            )));
        }
        Ok(TrigPolynomial { a0, a, b })
    }

    pub fn zero(degree: usize) -> Self {
        TrigPolynomial { a0: T::zero(), a: vec![T::zero(); degree], b: vec![T::zero(); degree] }
    }

    /// The constant function `c` (so `a0 = 2c`).
    pub fn constant(c: T) -> Self {
        TrigPolynomial { a0: c + c, a: Vec::new(), b: Vec::new() }
    }

    /// Builds a polynomial from the packed basis order
    /// `[1, cos x, sin x, cos 2x, sin 2x, ...]` used by the solvers.
    pub(crate) fn from_basis(coeffs: &[T]) -> Self {
        let n = (coeffs.len() - 1) / 2;
        let a = (0..n).map(|k| coeffs[1 + 2 * k]).collect();
        let b = (0..n).map(|k| coeffs[2 + 2 * k]).collect();
        TrigPolynomial { a0: coeffs[0] + coeffs[0], a, b }
    }

    pub fn degree(&self) -> usize {
        self.a.len()
    }

    pub fn a0(&self) -> T {
        self.a0
    }

    pub fn cos_coeffs(&self) -> &[T] {
        &self.a
    }

    pub fn sin_coeffs(&self) -> &[T] {
        &self.b
    }

    /// Same polynomial viewed in `H_degree` (zero-padded or truncated).
    pub fn with_degree(&self, degree: usize) -> Self {
        let mut a = self.a.clone();
        let mut b = self.b.clone();
        a.resize(degree, T::zero());
        b.resize(degree, T::zero());
        TrigPolynomial { a0: self.a0, a, b }
    }

    pub fn eval(&self, x: T) -> T {
        let (s1, c1) = x.sin_cos();
        let (mut c, mut s) = (T::one(), T::zero());
        let mut acc = self.a0 / (T::one() + T::one());
        for (k, (ak, bk)) in self.a.iter().zip(&self.b).enumerate() {
            // Re-seed periodically so the rotation recurrence does not drift.
            if k % 64 == 63 {
                let (sk, ck) = (x * T::of_usize(k + 1)).sin_cos();
                c = ck;
                s = sk;
            } else {
                let cn = c * c1 - s * s1;
                s = s * c1 + c * s1;
                c = cn;
            }
            acc += *ak * c + *bk * s;
        }
        acc
    }

    /// Values at the `n`-point grid nodes, via one inverse FFT.
    pub fn eval_grid(&self, n: usize) -> Result<Vec<T>> {
        check_grid(n)?;
        if self.degree() >= n {
            return Err(Error::Aliasing { samples: n, kmax: self.degree() });
        }
        let mut buf = vec![Complex::new(T::zero(), T::zero()); n];
        for k in 1..=self.degree() {
            let c = Complex::new(self.a[k - 1], -self.b[k - 1]);
            buf[k] = if k % 2 == 0 { c } else { -c };
        }
        T::fft(&mut buf, true);
        let half = self.a0 / (T::one() + T::one());
        Ok(buf.iter().map(|z| half + z.re).collect())
    }

    pub fn scaled(&self, alpha: T) -> Self {
        TrigPolynomial {
            a0: alpha * self.a0,
            a: self.a.iter().map(|v| alpha * *v).collect(),
            b: self.b.iter().map(|v| alpha * *v).collect(),
        }
    }

    /// `self + other` in `H_max(deg)`.
    pub fn add(&self, other: &Self) -> Self {
        let d = self.degree().max(other.degree());
        let (x, y) = (self.with_degree(d), other.with_degree(d));
        TrigPolynomial {
            a0: x.a0 + y.a0,
            a: x.a.iter().zip(&y.a).map(|(p, q)| *p + *q).collect(),
            b: x.b.iter().zip(&y.b).map(|(p, q)| *p + *q).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scaled(-T::one()))
    }

    /// Largest absolute coefficient difference (degrees padded to match).
    pub fn coeff_distance(&self, other: &Self) -> T {
        let diff = self.sub(other);
        diff.a
            .iter()
            .chain(&diff.b)
            .fold((diff.a0 / (T::one() + T::one())).abs(), |acc, v| acc.max(v.abs()))
    }
}

/// Trapezoid-rule Fourier coefficients `a_0..a_kmax`, `b_1..b_kmax`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierCoefficients<T> {
    a0: T,
    a: Vec<T>,
    b: Vec<T>,
}

impl<T: Scalar> FourierCoefficients<T> {
    pub fn kmax(&self) -> usize {
        self.a.len()
    }

    pub fn a0(&self) -> T {
        self.a0
    }

    /// `a_k` for `k >= 1`.
    pub fn a(&self, k: usize) -> T {
        self.a[k - 1]
    }

    /// `b_k` for `k >= 1`.
    pub fn b(&self, k: usize) -> T {
        self.b[k - 1]
    }

    /// Dump rows `(k, a_k, b_k)`; the `k = 0` row carries `a_0` and `b_0 = 0`.
    pub fn rows(&self) -> Vec<(usize, T, T)> {
        std::iter::once((0, self.a0, T::zero()))
            .chain(self.a.iter().zip(&self.b).enumerate().map(|(k, (a, b))| (k + 1, *a, *b)))
            .collect()
    }

    /// Coefficients with every `a_k`, `b_k` multiplied by `weights[k]`
    /// (`weights[0]` applies to `a_0`), as a polynomial of degree `weights.len() - 1`.
    fn weighted(&self, weights: &[T]) -> TrigPolynomial<T> {
        let n = weights.len() - 1;
        TrigPolynomial {
            a0: self.a0 * weights[0],
            a: (1..=n).map(|k| self.a[k - 1] * weights[k]).collect(),
            b: (1..=n).map(|k| self.b[k - 1] * weights[k]).collect(),
        }
    }
}

/// Trapezoid-rule coefficients `(1/π)∫ f cos kt`, `(1/π)∫ f sin kt` for `k <= kmax`.
pub fn compute_coefficients<T: Scalar>(f: &GridFunction<T>, kmax: usize) -> Result<FourierCoefficients<T>> {
    let n = f.len();
    if n < 4 * kmax {
        return Err(Error::Aliasing { samples: n, kmax });
    }
    let spec = f.spectrum();
    let scale = (T::one() + T::one()) / T::of_usize(n);
    let mut a = Vec::with_capacity(kmax);
    let mut b = Vec::with_capacity(kmax);
    for (k, z) in spec.iter().enumerate().take(kmax + 1).skip(1) {
        // Σ f_j e^{-ik x_j} = (-1)^k F_k because x_j = -π + 2πj/N.
        let z = if k % 2 == 0 { *z } else { -*z };
        a.push(scale * z.re);
        b.push(-scale * z.im);
    }
    Ok(FourierCoefficients { a0: scale * spec[0].re, a, b })
}

/// `S_k f`, the truncation of the coefficients to degree `k`.
pub fn partial_sum<T: Scalar>(c: &FourierCoefficients<T>, k: usize) -> Result<TrigPolynomial<T>> {
    if k > c.kmax() {
        return Err(Error::range("partial sum degree", k, 0, c.kmax()));
    }
    Ok(TrigPolynomial { a0: c.a0, a: c.a[..k].to_vec(), b: c.b[..k].to_vec() })
}

/// `D_k(t) = sin((2k+1)t/2) / (2 sin(t/2))`.
pub fn dirichlet_kernel<T: Scalar>(k: usize, t: T) -> T {
    let two = T::one() + T::one();
    let s = (t / two).sin();
    if s.abs() < T::lit(KERNEL_SINGULARITY) {
        let mut acc = T::one() / two;
        for j in 1..=k {
            acc += (t * T::of_usize(j)).cos();
        }
        acc
    } else {
        (t * T::of_usize(2 * k + 1) / two).sin() / (two * s)
    }
}

fn check_vp_indices(n: usize, m: usize) -> Result<()> {
    if m > n {
        Err(Error::range("m", m, 0, n))
    } else {
        Ok(())
    }
}

/// `V_{n,m}(t) = (1/(m+1)) Σ_{k=n-m}^{n} D_k(t)`, evaluated in closed form
/// `sin((2n-m+1)t/2) sin((m+1)t/2) / (2 (m+1) sin²(t/2))` away from `t = 0`.
pub fn vp_kernel<T: Scalar>(n: usize, m: usize, t: T) -> Result<T> {
    check_vp_indices(n, m)?;
    let two = T::one() + T::one();
    let s = (t / two).sin();
    if s.abs() < T::lit(KERNEL_SINGULARITY) {
        let sum: T = (n - m..=n).map(|k| dirichlet_kernel(k, t)).sum();
        return Ok(sum / T::of_usize(m + 1));
    }
    let num = (t * T::of_usize(2 * n - m + 1) / two).sin() * (t * T::of_usize(m + 1) / two).sin();
    Ok(num / (two * T::of_usize(m + 1) * s * s))
}

/// Multipliers of `a_k`, `b_k` (index `k = 0..=n`) in `σ_{n,m}`.
pub fn vp_weights<T: Scalar>(n: usize, m: usize) -> Result<Vec<T>> {
    check_vp_indices(n, m)?;
    Ok((0..=n)
        .map(|k| {
            if k + m <= n {
                T::one()
            } else {
                T::of_usize(n + 1 - k) / T::of_usize(m + 1)
            }
        })
        .collect())
}

/// `σ_{n,m} f = (1/(m+1)) Σ_{k=n-m}^{n} S_k f` in coefficient form.
pub fn vp_mean<T: Scalar>(c: &FourierCoefficients<T>, n: usize, m: usize) -> Result<TrigPolynomial<T>> {
    if n > c.kmax() {
        return Err(Error::range("n", n, 0, c.kmax()));
    }
    Ok(c.weighted(&vp_weights(n, m)?))
}

/// `σ_{n,m} f(x) = (1/π) ∫_Q f(s) V_{n,m}(s - x) ds` by the trapezoid rule
/// over the sample grid. Independent of the coefficient route.
pub fn vp_mean_by_kernel<T: Scalar>(f: &GridFunction<T>, n: usize, m: usize, x: T) -> Result<T> {
    check_vp_indices(n, m)?;
    if f.len() < 4 * n {
        return Err(Error::Aliasing { samples: f.len(), kmax: n });
    }
    let h = f.spacing();
    let mut acc = T::zero();
    for (j, v) in f.samples().iter().enumerate() {
        acc += *v * vp_kernel(n, m, f.node(j) - x)?;
    }
    Ok(acc * h / T::PI())
}
