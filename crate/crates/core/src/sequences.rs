//! Index sequences that telescope approximation errors across scales: the
//! halving sequence `m_s`, the adaptive increasing sequence `n_s` with its
//! thresholds `ν_s`, and the difference `τ_{n,m} = (m+1)(σ_{n+m+1,m} - σ_{n,m})`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{vp_mean, FourierCoefficients};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecreasingSeq {
    pub m: usize,
    pub values: Vec<usize>,
    pub t: usize,
}

/// `m_0 = m`, `m_s = m_{s-1} - ⌊m_{s-1}/2⌋`, down to `m_t = 1`.
pub fn decreasing_seq(m: usize) -> Result<DecreasingSeq> {
    if m < 2 {
        return Err(Error::range("m", m, 2, usize::MAX >> 1));
    }
    let mut values = vec![m];
    let mut cur = m;
    while cur > 1 {
        cur -= cur / 2;
        values.push(cur);
    }
    let seq = DecreasingSeq { m, t: values.len() - 1, values };
    let violations = seq.violations();
    assert!(violations.is_empty(), "halving sequence invariants: {violations:?}");
    Ok(seq)
}

impl DecreasingSeq {
    /// Descriptions of every violated invariant (empty when all hold).
    pub fn violations(&self) -> Vec<String> {
        let v = &self.values;
        let mut out = Vec::new();
        if v.first() != Some(&self.m) {
            out.push("m_0 != m".to_string());
        }
        if v.last() != Some(&1) {
            out.push("m_t != 1".to_string());
        }
        for s in 1..v.len() {
            if v[s] >= v[s - 1] {
                out.push(format!("not strictly decreasing at s={s}"));
            }
            if v[s] != v[s - 1] - v[s - 1] / 2 {
                out.push(format!("recurrence broken at s={s}"));
            }
            if 2 * v[s] < v[s - 1] {
                out.push(format!("m_s < m_(s-1)/2 at s={s}"));
            }
        }
        for s in 1..v.len().saturating_sub(1) {
            let (prev, cur, next) = (v[s - 1], v[s], v[s + 1]);
            if prev - cur > cur || cur > 3 * (cur - next) {
                out.push(format!("sandwich m_(s-1)-m_s <= m_s <= 3(m_s-m_(s+1)) fails at s={s}"));
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TauValue<T> {
    pub n: usize,
    pub m: usize,
    pub x: T,
    pub value: T,
}

/// `τ_{n,m} f(x) = (m+1) (σ_{n+m+1,m} f(x) - σ_{n,m} f(x))`.
pub fn tau<T: Scalar>(c: &FourierCoefficients<T>, n: usize, m: usize, x: T) -> Result<TauValue<T>> {
    if m > n {
        return Err(Error::range("m", m, 0, n));
    }
    if n + m + 1 > c.kmax() {
        return Err(Error::range("n + m + 1", n + m + 1, 0, c.kmax()));
    }
    let hi = vp_mean(c, n + m + 1, m)?.eval(x);
    let lo = vp_mean(c, n, m)?.eval(x);
    Ok(TauValue { n, m, x, value: T::of_usize(m + 1) * (hi - lo) })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IncreasingSeq {
    pub n: usize,
    pub m: usize,
    pub values: Vec<usize>,
    /// `ν_s` for `s = 0..t-1`; when no admissible `ν*` exists the search
    /// bound `2n + m - n_s` is recorded.
    pub thresholds: Vec<usize>,
    /// Per step, the `ν` whose own smallest admissible `ν*` is largest (the
    /// binding index under a one-`ν`-at-a-time reading), if any `ν` fails at `ν* = 1`.
    pub binding: Vec<Option<usize>>,
    pub t: usize,
}

impl IncreasingSeq {
    pub fn violations(&self) -> Vec<String> {
        let (n, m, v) = (self.n, self.m, &self.values);
        let mut out = Vec::new();
        if v.first() != Some(&n) {
            out.push("n_0 != n".to_string());
        }
        let last = *v.last().unwrap_or(&0);
        if last < 2 * n || last > 2 * n + m {
            out.push(format!("n_t = {last} outside [{}, {}]", 2 * n, 2 * n + m));
        }
        for s in 1..v.len() {
            if v[s] < v[s - 1] + m + 1 {
                out.push(format!("gap n_{s} - n_{} = {} < m+1", s - 1, v[s] as i64 - v[s - 1] as i64));
            }
        }
        out
    }
}

/// Halving comparison `a <= b/2` with relative slack.
pub fn halves<T: Scalar>(a: T, b: T, rel_tol: f64) -> bool {
    a <= b / (T::one() + T::one()) + T::lit(rel_tol) * (T::one() + b.abs())
}

/// Builds `n_0 = n < n_1 < ... < n_t` from an oracle `f_avg(k, ν) = F_{k,ν}(f, x)`.
///
/// `ν_s` is the smallest `ν* >= 1` with `F_{n_s-m+ν*, ν} <= F_{n_s-m, ν}/2` for
/// every `ν = 0..=n`; then `n_{s+1}` is `n_s + m + 1` if `ν_s <= m`,
/// `n_s + ν_s` if `m < ν_s < 2n + m - n_s`, and `2n + m` otherwise.
pub fn increasing_seq<T: Scalar>(
    n: usize,
    m: usize,
    rel_tol: f64,
    mut f_avg: impl FnMut(usize, usize) -> Result<T>,
) -> Result<IncreasingSeq> {
    if m == 0 || m > n {
        return Err(Error::range("m", m, 1, n));
    }
    let mut values = vec![n];
    let mut thresholds = Vec::new();
    let mut binding = Vec::new();
    let mut cur = n;
    let max_steps = 4 * n;
    while cur < 2 * n {
        if thresholds.len() >= max_steps {
            return Err(Error::Precondition(format!("increasing sequence did not reach 2n within {max_steps} steps")));
        }
        let bound = 2 * n + m - cur;
        let base: Vec<T> = (0..=n).map(|nu| f_avg(cur - m, nu)).collect::<Result<_>>()?;
        let mut first_ok: Vec<Option<usize>> = vec![None; n + 1];
        let mut found = None;
        for cand in 1..=bound {
            let mut all = true;
            for nu in 0..=n {
                let ok = halves(f_avg(cur - m + cand, nu)?, base[nu], rel_tol);
                if ok && first_ok[nu].is_none() {
                    first_ok[nu] = Some(cand);
                }
                all &= ok;
            }
            if all {
                found = Some(cand);
                break;
            }
        }
        let nu_s = found.unwrap_or(bound);
        let bind = (0..=n)
            .filter(|&nu| first_ok[nu] != Some(1))
            .max_by_key(|&nu| (first_ok[nu].unwrap_or(usize::MAX), std::cmp::Reverse(nu)));
        let next = if nu_s <= m {
            cur + m + 1
        } else if nu_s < bound {
            cur + nu_s
        } else {
            2 * n + m
        };
        thresholds.push(nu_s);
        binding.push(bind);
        values.push(next);
        cur = next;
    }
    let seq = IncreasingSeq { n, m, t: values.len() - 1, values, thresholds, binding };
    let violations = seq.violations();
    if !violations.is_empty() {
        return Err(Error::Precondition(format!("increasing sequence invariants: {violations:?}")));
    }
    Ok(seq)
}
