//! Iteratively reweighted least squares for `L^p` best approximation, `p != 2`.

use rustfft::num_complex::Complex;

use super::SolverOptions;
use crate::error::SolveError;
use crate::fourier::{GridFunction, TrigPolynomial};
use crate::linalg::{cholesky_solve, invert, lu_solve, weighted_lstsq};
use crate::scalar::Scalar;

pub(crate) struct IrlsOutcome<T> {
    pub coeffs: Vec<T>,
    pub residual: Vec<T>,
    /// `Σ w_i |r_i|^p`, not yet raised to `1/p`.
    pub objective: T,
    pub iterations: usize,
}

/// IRLS iterations before the first attempt at an exact finish; later
/// attempts follow at doubling intervals.
const FINISH_AFTER: usize = 48;

#[inline]
fn reweight<T: Scalar>(r: T, p: T, floor: T) -> T {
    r.abs().max(floor).powf(p - T::one() - T::one())
}

fn objective<T: Scalar>(r: &[T], base: impl Fn(usize) -> T, p: T) -> T {
    r.iter().enumerate().map(|(i, v)| base(i) * v.abs().powf(p)).sum()
}

/// Shared iteration: `solve(weights)` returns coefficients of the weighted
/// least-squares fit, `residual(coeffs)` the residual on every row.
fn iterate<T: Scalar>(
    start: Vec<T>,
    start_coeffs: Vec<T>,
    base: impl Fn(usize) -> T + Copy,
    p: T,
    floor: T,
    opts: &SolverOptions,
    mut solve: impl FnMut(&[T]) -> Result<Vec<T>, SolveError>,
    residual: impl Fn(&[T]) -> Vec<T>,
    mut finish: impl FnMut(&[T]) -> Option<IrlsOutcome<T>>,
) -> Result<IrlsOutcome<T>, SolveError> {
    let mut best = IrlsOutcome {
        objective: objective(&start, base, p),
        coeffs: start_coeffs,
        residual: start,
        iterations: 0,
    };
    let tol = T::lit(opts.irls_tol);
    let mut last_change = f64::INFINITY;
    for iteration in 1..=opts.irls_max_iterations {
        let weights: Vec<T> = best.residual.iter().enumerate().map(|(i, r)| base(i) * reweight(*r, p, floor)).collect();
        let mut coeffs = solve(&weights)?;
        let mut res = residual(&coeffs);
        let mut obj = objective(&res, base, p);
        // Step halving keeps the objective monotone when the plain update overshoots.
        let mut halvings = 0;
        while obj > best.objective && halvings < 30 {
            for (c, b) in coeffs.iter_mut().zip(&best.coeffs) {
                *c = (*c + *b) / (T::one() + T::one());
            }
            res = residual(&coeffs);
            obj = objective(&res, base, p);
            halvings += 1;
        }
        let old = best.objective.powf(T::one() / p);
        let new = obj.min(best.objective).powf(T::one() / p);
        let change = (old - new).abs();
        last_change = (change / new.max(T::min_positive_value())).as_f64();
        if obj <= best.objective {
            best = IrlsOutcome { coeffs, residual: res, objective: obj, iterations: iteration };
        }
        if new == T::zero() || change <= tol * new {
            best.iterations = iteration;
            return Ok(best);
        }
        if iteration % FINISH_AFTER == 0 && (iteration / FINISH_AFTER).is_power_of_two() {
            if let Some(mut exact) = finish(&best.residual) {
                exact.iterations = iteration;
                return Ok(exact);
            }
        }
    }
    Err(SolveError::NonConvergence { method: "irls", iterations: opts.irls_max_iterations, last_change })
}

/// Packed-basis coefficients of a polynomial (`[c0, a1, b1, a2, b2, ...]`, `c0 = a0/2`).
pub(crate) fn to_basis<T: Scalar>(poly: &TrigPolynomial<T>) -> Vec<T> {
    let mut c = vec![poly.a0() / (T::one() + T::one())];
    for (a, b) in poly.cos_coeffs().iter().zip(poly.sin_coeffs()) {
        c.push(*a);
        c.push(*b);
    }
    c
}

/// Weighted trigonometric moments `Σ_j v_j e^{-ik x_j}` for `k = 0..=kmax`,
/// returned as `(Σ v cos kx, Σ v sin kx)`.
fn moments<T: Scalar>(values: &[T], kmax: usize) -> Vec<(T, T)> {
    let mut buf: Vec<Complex<T>> = values.iter().map(|&v| Complex::new(v, T::zero())).collect();
    T::fft(&mut buf, false);
    buf.iter()
        .take(kmax + 1)
        .enumerate()
        .map(|(k, z)| {
            let z = if k % 2 == 0 { *z } else { -*z };
            (z.re, -z.im)
        })
        .collect()
}

/// Normal equations of the weighted fit on the full grid, assembled from the
/// moments of the weights (the Gram matrix is Toeplitz plus Hankel).
fn grid_weighted_fit<T: Scalar>(f: &[T], weights: &[T], n: usize) -> Result<Vec<T>, SolveError> {
    let d = 2 * n + 1;
    let w = moments(weights, 2 * n);
    let wf: Vec<T> = weights.iter().zip(f).map(|(a, b)| *a * *b).collect();
    let rhs_m = moments(&wf, n);
    let half = T::one() / (T::one() + T::one());
    let c = |k: isize| w[k.unsigned_abs()].0;
    let s = |k: isize| if k < 0 { -w[k.unsigned_abs()].1 } else { w[k as usize].1 };
    let mut g = vec![T::zero(); d * d];
    let mut rhs = vec![T::zero(); d];
    g[0] = c(0);
    rhs[0] = rhs_m[0].0;
    for a in 1..=n {
        let ia = a as isize;
        g[2 * a - 1] = c(ia);
        g[(2 * a - 1) * d] = c(ia);
        g[2 * a] = s(ia);
        g[2 * a * d] = s(ia);
        rhs[2 * a - 1] = rhs_m[a].0;
        rhs[2 * a] = rhs_m[a].1;
        for b in 1..=n {
            let ib = b as isize;
            let (ca, sa, cb, sb) = (2 * a - 1, 2 * a, 2 * b - 1, 2 * b);
            g[ca * d + cb] = half * (c(ia - ib) + c(ia + ib));
            g[sa * d + sb] = half * (c(ia - ib) - c(ia + ib));
            // cos(a x) sin(b x) = (sin((a+b)x) - sin((a-b)x)) / 2
            g[ca * d + sb] = half * (s(ia + ib) - s(ia - ib));
            g[sb * d + ca] = g[ca * d + sb];
        }
    }
    let mut x = rhs.clone();
    if cholesky_solve(&g, &mut x).is_err() {
        x = rhs;
        lu_solve(&g, &mut x)?;
    }
    Ok(x)
}

/// IRLS for `min_T Σ_j |f_j - T(x_j)|^p` over `H_n` on the sample grid.
pub(crate) fn global<T: Scalar>(
    f: &GridFunction<T>,
    n: usize,
    p: f64,
    start: &TrigPolynomial<T>,
    start_residual: Vec<T>,
    opts: &SolverOptions,
) -> Result<IrlsOutcome<T>, SolveError> {
    let floor = T::lit(opts.irls_floor) * f.max_abs().max(T::min_positive_value());
    let samples = f.samples();
    let residual = |c: &[T]| -> Vec<T> {
        let poly = TrigPolynomial::from_basis(c);
        let vals = poly.eval_grid(samples.len()).expect("degree checked by caller");
        samples.iter().zip(&vals).map(|(a, b)| *a - *b).collect()
    };
    iterate(
        start_residual,
        to_basis(&start.with_degree(n)),
        |_| T::one(),
        T::lit(p),
        floor,
        opts,
        |w| grid_weighted_fit(samples, w, n),
        residual,
        |r| if p == 1.0 { l1_vertex(f, n, r) } else { None },
    )
}

/// Exact solution of the discrete `L^1` problem on the grid, started from an
/// approximate residual.
///
/// A minimiser interpolates `f` at `2n+1` nodes `Z` and is optimal iff the
/// multipliers `λ` solving `Σ_{z∈Z} λ_z φ(x_z) = -Σ_{j∉Z} sign(r_j) φ(x_j)`
/// satisfy `|λ_z| <= 1`. Starting from the nodes of smallest `|r|` next to
/// the sign changes, each step releases the node with the largest `|λ_z|` and
/// moves along the resulting edge to the minimising breakpoint (a simplex
/// step). Returns `None` when the step budget runs out or a basis is singular.
fn l1_vertex<T: Scalar>(f: &GridFunction<T>, n: usize, approx: &[T]) -> Option<IrlsOutcome<T>> {
    let len = approx.len();
    let d = 2 * n + 1;
    let samples = f.samples();
    let by_size = |a: &usize, b: &usize| approx[*a].abs().partial_cmp(&approx[*b].abs()).unwrap().then(a.cmp(b));
    let mut zset: Vec<usize> = (0..len)
        .filter_map(|j| {
            let k = (j + 1) % len;
            ((approx[j] >= T::zero()) != (approx[k] >= T::zero()))
                .then(|| if approx[j].abs() <= approx[k].abs() { j } else { k })
        })
        .collect();
    zset.sort_unstable();
    zset.dedup();
    zset.sort_by(by_size);
    zset.truncate(d);
    if zset.len() < d {
        let mut rest: Vec<usize> = (0..len).filter(|j| !zset.contains(j)).collect();
        rest.sort_by(by_size);
        zset.extend(rest.into_iter().take(d - zset.len()));
    }

    let one_plus = T::one() + T::lit(1e-9);
    let mut in_z = vec![false; len];
    zset.iter().for_each(|&z| in_z[z] = true);
    let mut rows = vec![T::zero(); d * d];
    let mut binv = Vec::new();
    let mut row = vec![T::zero(); d];
    for step in 0..4 * d + 20 {
        // The inverse is carried by rank-one updates and rebuilt now and then.
        if step % REFRESH_INVERSE == 0 {
            for (i, &z) in zset.iter().enumerate() {
                super::basis_row(f.node(z), n, &mut rows[i * d..(i + 1) * d]);
            }
            binv = invert(&rows, d).ok()?;
        }
        let fz: Vec<T> = zset.iter().map(|&z| samples[z]).collect();
        let coeffs = mat_vec(&binv, &fz, d);
        let vals = TrigPolynomial::from_basis(&coeffs).eval_grid(len).ok()?;
        let mut r: Vec<T> = samples.iter().zip(&vals).map(|(s, v)| *s - *v).collect();
        let mut signs: Vec<T> = r.iter().map(|v| if *v >= T::zero() { T::one() } else { -T::one() }).collect();
        for &z in &zset {
            r[z] = T::zero();
            signs[z] = T::zero();
        }
        let g = moments(&signs, n);
        let mut rhs = vec![T::zero(); d];
        rhs[0] = -g[0].0;
        for k in 1..=n {
            rhs[2 * k - 1] = -g[k].0;
            rhs[2 * k] = -g[k].1;
        }
        // λ = B^T rhs
        let mut lambda = vec![T::zero(); d];
        for (i, ri) in rhs.iter().enumerate() {
            for (l, b) in lambda.iter_mut().zip(&binv[i * d..(i + 1) * d]) {
                *l += *b * *ri;
            }
        }
        let (out, worst) = lambda
            .iter()
            .enumerate()
            .fold((0, T::zero()), |(bi, bv), (i, v)| if v.abs() > bv { (i, v.abs()) } else { (bi, bv) });
        if worst <= one_plus {
            let objective = r.iter().map(|v| v.abs()).sum();
            return Some(IrlsOutcome { coeffs, residual: r, objective, iterations: 0 });
        }
        // Edge direction: q vanishes on Z \ {z_out} and equals -sign(λ) there,
        // so the objective starts with slope 1 - |λ| < 0.
        let sigma = if lambda[out] > T::zero() { -T::one() } else { T::one() };
        let col: Vec<T> = (0..d).map(|i| binv[i * d + out]).collect();
        let e: Vec<T> = col.iter().map(|v| sigma * *v).collect();
        let q = TrigPolynomial::from_basis(&e).eval_grid(len).ok()?;
        let mut breaks: Vec<(T, usize)> = (0..len)
            .filter(|&j| !in_z[j] && q[j] != T::zero())
            .filter_map(|j| {
                let t = r[j] / q[j];
                (t > T::zero()).then_some((t, j))
            })
            .collect();
        breaks.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap().then(x.1.cmp(&y.1)));
        let mut slope = T::one() - worst;
        let mut enter = None;
        for (_, j) in breaks {
            slope += (T::one() + T::one()) * q[j].abs();
            if slope >= T::zero() {
                enter = Some(j);
                break;
            }
        }
        let enter = enter?;
        // Row `out` of the basis matrix becomes φ(x_enter): Sherman-Morrison.
        super::basis_row(f.node(enter), n, &mut row);
        let u_b: Vec<T> = {
            let mut acc = vec![T::zero(); d];
            for (i, ui) in row.iter().enumerate() {
                for (a, b) in acc.iter_mut().zip(&binv[i * d..(i + 1) * d]) {
                    *a += *ui * *b;
                }
            }
            acc
        };
        let denom = u_b[out];
        if denom.abs() <= T::epsilon() {
            return None;
        }
        // u = φ(x_enter) - φ(x_out), and φ(x_out)^T B = e_out^T.
        let mut w = u_b;
        w[out] -= T::one();
        for i in 0..d {
            let ci = col[i] / denom;
            for (b, wk) in binv[i * d..(i + 1) * d].iter_mut().zip(&w) {
                *b -= ci * *wk;
            }
        }
        rows[out * d..(out + 1) * d].copy_from_slice(&row);
        in_z[zset[out]] = false;
        in_z[enter] = true;
        zset[out] = enter;
    }
    None
}

const REFRESH_INVERSE: usize = 64;

fn mat_vec<T: Scalar>(m: &[T], v: &[T], d: usize) -> Vec<T> {
    (0..d).map(|i| m[i * d..(i + 1) * d].iter().zip(v).map(|(a, b)| *a * *b).sum()).collect()
}

/// IRLS for `min_c Σ_i base_i |y_i - A_i c|^p` with dense rows.
pub(crate) fn dense<T: Scalar>(
    rows: &[T],
    ncols: usize,
    base: &[T],
    y: &[T],
    p: f64,
    opts: &SolverOptions,
) -> Result<IrlsOutcome<T>, SolveError> {
    let scale = y.iter().fold(T::zero(), |acc, v| acc.max(v.abs())).max(T::min_positive_value());
    let floor = T::lit(opts.irls_floor) * scale;
    let residual = |c: &[T]| -> Vec<T> {
        y.iter()
            .enumerate()
            .map(|(i, yi)| {
                let row = &rows[i * ncols..(i + 1) * ncols];
                *yi - row.iter().zip(c).map(|(a, b)| *a * *b).sum::<T>()
            })
            .collect()
    };
    let start_coeffs = weighted_lstsq(rows, ncols, base, y)?;
    let start = residual(&start_coeffs);
    iterate(
        start,
        start_coeffs,
        |i| base[i],
        T::lit(p),
        floor,
        opts,
        |w| weighted_lstsq(rows, ncols, w, y),
        residual,
        |_| None,
    )
}
