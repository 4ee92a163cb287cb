//! Multi-point exchange for discrete minimax problems `min_c max_i |y_i - a_i·c|`
//! over an ordered point set, in the style of Remez.

use crate::error::SolveError;
use crate::linalg::lu_solve;
use crate::scalar::Scalar;

/// Largest relative gap between the error and the level accepted when the
/// exchange revisits a reference (rounding in nearly tied extrema).
const STALL_TOL: f64 = 1e-6;

/// A discrete minimax problem over `len()` ordered rows with `dim()` unknowns.
pub(crate) trait ExchangeProblem<T: Scalar> {
    fn len(&self) -> usize;
    fn dim(&self) -> usize;
    /// Whether the last row is adjacent to the first (full circle).
    fn cyclic(&self) -> bool;
    fn target(&self, i: usize) -> T;
    fn basis_row(&self, i: usize, out: &mut [T]);
    /// `y - A c` on every row.
    fn residual(&self, coeffs: &[T]) -> Vec<T>;
}

#[derive(Clone, Debug)]
pub(crate) struct ExchangeOutcome<T> {
    pub coeffs: Vec<T>,
    pub residual: Vec<T>,
    pub error: T,
    pub iterations: usize,
}

fn max_abs<T: Scalar>(r: &[T]) -> (usize, T) {
    r.iter()
        .enumerate()
        .fold((0, T::zero()), |(bi, bv), (i, v)| if v.abs() > bv { (i, v.abs()) } else { (bi, bv) })
}

#[inline]
fn positive<T: Scalar>(v: T) -> bool {
    v >= T::zero()
}

/// Extremum of each maximal run of constant sign.
fn sign_runs<T: Scalar>(r: &[T], cyclic: bool) -> Vec<usize> {
    let mut runs: Vec<usize> = Vec::new();
    for (i, &v) in r.iter().enumerate() {
        match runs.last_mut() {
            Some(last) if positive(r[*last]) == positive(v) => {
                if v.abs() > r[*last].abs() {
                    *last = i;
                }
            }
            _ => runs.push(i),
        }
    }
    if cyclic && runs.len() > 1 {
        let (first, last) = (runs[0], *runs.last().unwrap());
        if positive(r[first]) == positive(r[last]) {
            runs.pop();
            if r[last].abs() > r[first].abs() {
                runs[0] = last;
                runs.sort_unstable();
            }
        }
    }
    runs
}

/// Position of the smallest extremum. Near-ties are broken towards the point
/// whose removal leaves the smallest hole, so a reference built from many
/// equal extrema stays spread over the whole set instead of clustering.
fn weakest<T: Scalar>(r: &[T], refs: &[usize], cyclic: bool) -> usize {
    let len = refs.len();
    let min = refs.iter().fold(T::infinity(), |acc, &i| acc.min(r[i].abs()));
    let slack = min * T::lit(1e-9) + T::min_positive_value();
    let span = |k: usize| -> usize {
        let n = r.len();
        let (prev, next) = if cyclic {
            (refs[(k + len - 1) % len], refs[(k + 1) % len])
        } else {
            (refs[k.saturating_sub(1)], refs[(k + 1).min(len - 1)])
        };
        (next + n - prev) % n
    };
    (0..len)
        .filter(|&k| r[refs[k]].abs() <= min + slack)
        .min_by_key(|&k| (span(k), k))
        .expect("nonempty reference")
}

/// Whether `r` alternates in sign at least `size` times among the points where
/// `|r| >= (1 - tol) max|r|`. Such a residual is within a relative `tol` of the
/// minimax error (de la Vallée Poussin).
pub(crate) fn alternates<T: Scalar>(r: &[T], size: usize, cyclic: bool, tol: T) -> bool {
    let (_, top) = max_abs(r);
    let level = top * (T::one() - tol);
    let near: Vec<T> = r.iter().copied().filter(|v| v.abs() >= level).collect();
    sign_runs(&near, cyclic).len() >= size
}

/// Reduces sign-run extrema to exactly `size` alternating points.
fn select_reference<T: Scalar>(r: &[T], size: usize, cyclic: bool) -> Option<Vec<usize>> {
    let mut refs = sign_runs(r, cyclic);
    if refs.len() < size {
        return None;
    }
    while refs.len() > size {
        let excess = refs.len() - size;
        let len = refs.len();
        if !cyclic && excess % 2 == 1 {
            if r[refs[0]].abs() <= r[refs[len - 1]].abs() {
                refs.remove(0);
            } else {
                refs.pop();
            }
            continue;
        }
        let k = weakest(r, &refs, cyclic);
        if !cyclic && (k == 0 || k == len - 1) {
            refs.remove(k);
            continue;
        }
        let prev = (k + len - 1) % len;
        let next = (k + 1) % len;
        let drop = if r[refs[prev]].abs() <= r[refs[next]].abs() { prev } else { next };
        let (a, b) = if k > drop { (k, drop) } else { (drop, k) };
        refs.remove(a);
        refs.remove(b);
    }
    Some(refs)
}

/// Inserts the global extremum into a reference, replacing the neighbour
/// whose residual has the same sign so the pattern keeps alternating.
fn single_exchange<T: Scalar>(r: &[T], reference: &[usize], star: usize, cyclic: bool) -> Vec<usize> {
    let mut refs = reference.to_vec();
    if refs.contains(&star) {
        return refs;
    }
    let pos = refs.partition_point(|&i| i < star);
    let len = refs.len();
    let s = positive(r[star]);
    let prev = if pos > 0 { Some(pos - 1) } else if cyclic { Some(len - 1) } else { None };
    let next = if pos < len { Some(pos) } else if cyclic { Some(0) } else { None };
    match (prev, next) {
        (Some(i), _) if positive(r[refs[i]]) == s => refs[i] = star,
        (_, Some(i)) if positive(r[refs[i]]) == s => refs[i] = star,
        (None, _) => {
            refs.pop();
            refs.insert(0, star);
        }
        (_, None) => {
            refs.remove(0);
            refs.push(star);
        }
        (Some(i), Some(_)) => refs[i] = star,
    }
    refs.sort_unstable();
    refs
}

/// Levelled solve on a reference: `a_i·c + (-1)^i h = y_i`.
fn solve_reference<T: Scalar, P: ExchangeProblem<T>>(prob: &P, refs: &[usize]) -> Result<(Vec<T>, T), SolveError> {
    let d = prob.dim();
    let m = d + 1;
    let mut a = vec![T::zero(); m * m];
    let mut b = vec![T::zero(); m];
    for (row, &i) in refs.iter().enumerate() {
        prob.basis_row(i, &mut a[row * m..row * m + d]);
        a[row * m + d] = if row % 2 == 0 { T::one() } else { -T::one() };
        b[row] = prob.target(i);
    }
    lu_solve(&a, &mut b)?;
    let h = b[d];
    b.truncate(d);
    Ok((b, h))
}

pub(crate) fn minimax<T: Scalar, P: ExchangeProblem<T>>(
    prob: &P,
    initial_residual: &[T],
    max_iterations: usize,
    tol: f64,
) -> Result<ExchangeOutcome<T>, SolveError> {
    let size = prob.dim() + 1;
    if prob.len() < size {
        return Err(SolveError::Underdetermined { rows: prob.len(), cols: size });
    }
    let cyclic = prob.cyclic();
    let mut refs = match select_reference(initial_residual, size, cyclic) {
        Some(r) => r,
        None => (0..size).map(|j| j * prob.len() / size).collect(),
    };
    let tol = T::lit(tol);
    let mut best: Option<ExchangeOutcome<T>> = None;
    let mut last_change = f64::INFINITY;
    let mut visited = std::collections::HashSet::new();
    let mut best_gap = T::infinity();
    for iteration in 1..=max_iterations {
        let (coeffs, h) = solve_reference(prob, &refs)?;
        let residual = prob.residual(&coeffs);
        let (star, error) = max_abs(&residual);
        let outcome = ExchangeOutcome { coeffs, residual, error, iterations: iteration };
        let gap = error - h.abs();
        last_change = gap.as_f64();
        let improved = best.as_ref().map_or(true, |b| outcome.error < b.error);
        if gap <= tol * (T::one() + error) || alternates(&outcome.residual, size, cyclic, tol) {
            return Ok(outcome);
        }
        let next = match select_reference(&outcome.residual, size, cyclic) {
            Some(r) if r.contains(&star) => r,
            Some(r) => single_exchange(&outcome.residual, &r, star, cyclic),
            None => single_exchange(&outcome.residual, &refs, star, cyclic),
        };
        if improved {
            best = Some(outcome);
            best_gap = gap;
        }
        visited.insert(refs.clone());
        if visited.contains(&next) {
            // A repeated reference cannot raise the level further; accept only
            // a near-levelled iterate, otherwise report the stall.
            let b = best.expect("at least one iterate");
            if best_gap <= T::lit(STALL_TOL) * (T::one() + b.error) {
                return Ok(b);
            }
            return Err(SolveError::NonConvergence { method: "exchange", iterations: iteration, last_change });
        }
        refs = next;
    }
    Err(SolveError::NonConvergence { method: "exchange", iterations: max_iterations, last_change })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn runs_merge_across_the_seam() {
        let r = [1.0, 2.0, -1.0, -3.0, 0.5, 4.0];
        assert_eq!(sign_runs(&r, false), vec![1, 3, 5]);
        assert_eq!(sign_runs(&r, true), vec![3, 5]);
    }

    #[test]
    fn reference_reduction_keeps_alternation() {
        let r = [1.0, -0.1, 0.2, -2.0, 3.0, -1.5];
        let refs = select_reference(&r, 4, true).unwrap();
        assert_eq!(refs.len(), 4);
        for w in refs.windows(2) {
            assert_ne!(positive(r[w[0]]), positive(r[w[1]]));
        }
        assert!(refs.contains(&4));
        let refs = select_reference(&r, 3, false).unwrap();
        assert_eq!(refs.len(), 3);
        for w in refs.windows(2) {
            assert_ne!(positive(r[w[0]]), positive(r[w[1]]));
        }
    }
}
