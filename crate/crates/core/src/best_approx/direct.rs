//! Direct minimisation of the windowed norm over `H_n`, restricted to the
//! samples of one window. Used as an independent check on the global
//! minimiser; intended for small degrees.

use super::exchange::{minimax, ExchangeProblem};
use super::{basis_row, irls, BestApproxResult, Method, SolverOptions};
use crate::error::{Error, Result, SolveError};
use crate::fourier::{GridFunction, LebesgueExponent, TrigPolynomial};
use crate::linalg::weighted_lstsq;
use crate::local_norms::{NormVariant, WindowPoint, WindowProfile, WindowSpec};
use crate::scalar::Scalar;

struct DenseProblem<'a, T> {
    rows: &'a [T],
    y: &'a [T],
    ncols: usize,
    cyclic: bool,
}

impl<T: Scalar> ExchangeProblem<T> for DenseProblem<'_, T> {
    fn len(&self) -> usize {
        self.y.len()
    }

    fn dim(&self) -> usize {
        self.ncols
    }

    fn cyclic(&self) -> bool {
        self.cyclic
    }

    fn target(&self, i: usize) -> T {
        self.y[i]
    }

    fn basis_row(&self, i: usize, out: &mut [T]) {
        out.copy_from_slice(&self.rows[i * self.ncols..(i + 1) * self.ncols]);
    }

    fn residual(&self, c: &[T]) -> Vec<T> {
        dense_residual(self.rows, self.ncols, self.y, c)
    }
}

fn dense_residual<T: Scalar>(rows: &[T], ncols: usize, y: &[T], c: &[T]) -> Vec<T> {
    y.iter()
        .enumerate()
        .map(|(i, yi)| *yi - rows[i * ncols..(i + 1) * ncols].iter().zip(c).map(|(a, b)| *a * *b).sum::<T>())
        .collect()
}

/// Basis row and function value of a linear combination of window points.
fn combine<T: Scalar>(
    f: &GridFunction<T>,
    x: T,
    center: T,
    n: usize,
    terms: &[(WindowPoint, T)],
    row: &mut [T],
    scratch: &mut [T],
) -> T {
    row.iter_mut().for_each(|v| *v = T::zero());
    let mut y = T::zero();
    for &(pt, coef) in terms {
        let (pos, val) = match pt {
            WindowPoint::Center => (x, center),
            WindowPoint::Node(j) => (f.node(j), f.samples()[j]),
        };
        basis_row(pos, n, scratch);
        for (r, s) in row.iter_mut().zip(scratch.iter()) {
            *r += coef * *s;
        }
        y += coef * val;
    }
    y
}

/// `inf_{T ∈ H_n} ‖f - T‖` in the window `w`, computed from the window samples only.
///
/// Supported: any finite `p` with the fixed-radius norm, and `p = ∞` with
/// either variant (the two coincide for the sup norm).
pub fn windowed_best<T: Scalar>(
    f: &GridFunction<T>,
    n: usize,
    w: &WindowSpec<T>,
    opts: &SolverOptions,
) -> Result<BestApproxResult<T>> {
    if w.variant == NormVariant::SupOverH && !w.p.is_infinite() {
        return Err(SolveError::Unsupported("direct solve of the sub-radius supremum for finite p").into());
    }
    let d = 2 * n + 1;
    if f.len() < 4 * n {
        return Err(Error::Aliasing { samples: f.len(), kmax: n });
    }
    let profile = WindowProfile::new(f, w.x, w.p, w.delta)?;
    let center = profile.center_value();
    let mut scratch = vec![T::zero(); d];
    let result = |coeffs: &[T], error: T, iterations: usize, certified: bool| BestApproxResult {
        n,
        p: w.p,
        polynomial: TrigPolynomial::from_basis(coeffs),
        error,
        method: Method::WindowDirect,
        iterations,
        certified,
    };
    match w.p {
        LebesgueExponent::Infinity => {
            let combos = profile.sup_rows(w.delta)?;
            let mut rows = vec![T::zero(); combos.len() * d];
            let mut y = Vec::with_capacity(combos.len());
            for (i, terms) in combos.iter().enumerate() {
                y.push(combine(f, w.x, center, n, terms, &mut rows[i * d..(i + 1) * d], &mut scratch));
            }
            if y.len() < d + 1 {
                return Err(SolveError::Underdetermined { rows: y.len(), cols: d + 1 }.into());
            }
            let ones = vec![T::one(); y.len()];
            let ls = weighted_lstsq(&rows, d, &ones, &y)?;
            let start = dense_residual(&rows, d, &y, &ls);
            let scale = y.iter().fold(T::zero(), |acc, v| acc.max(v.abs()));
            let rmax = start.iter().fold(T::zero(), |acc, v| acc.max(v.abs()));
            if rmax <= T::lit(opts.exact_tol) * scale.max(T::one()) {
                return Ok(result(&ls, rmax, 0, true));
            }
            let prob = DenseProblem { rows: &rows, y: &y, ncols: d, cyclic: w.delta >= T::PI() };
            let out = minimax(&prob, &start, opts.max_exchange_iterations, opts.exchange_tol)?;
            Ok(result(&out.coeffs, out.error, out.iterations, true))
        }
        p => {
            let quad = profile.quadrature(w.delta)?;
            let mut rows = vec![T::zero(); quad.len() * d];
            let mut y = Vec::with_capacity(quad.len());
            let mut weights = Vec::with_capacity(quad.len());
            for (i, (pt, wt)) in quad.iter().enumerate() {
                y.push(combine(f, w.x, center, n, &[(*pt, T::one())], &mut rows[i * d..(i + 1) * d], &mut scratch));
                weights.push(*wt);
            }
            if y.len() < d {
                return Err(SolveError::Underdetermined { rows: y.len(), cols: d }.into());
            }
            if p.is_two() {
                let coeffs = weighted_lstsq(&rows, d, &weights, &y)?;
                let r = dense_residual(&rows, d, &y, &coeffs);
                let total: T = r.iter().zip(&weights).map(|(r, w)| *w * *r * *r).sum();
                Ok(result(&coeffs, total.max(T::zero()).sqrt(), 1, true))
            } else {
                let pv = p.finite_value().expect("finite branch");
                let out = irls::dense(&rows, d, &weights, &y, pv, opts)?;
                Ok(result(&out.coeffs, p.root(out.objective), out.iterations, pv > 1.0))
            }
        }
    }
}
