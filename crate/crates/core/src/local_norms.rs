//! Pointwise windowed norms, the difference operator `Δ_x f(t) = f(x+t) - f(x)`,
//! and moduli of continuity (pointwise, averaged and global).
//!
//! Window model: around a centre `x` the function is represented by the
//! exact value at `x` and the grid samples on each side. For finite `p` the
//! integrand `|g|^p` is interpolated linearly between those points (the
//! trapezoid rule, with a fractional last cell), so every window integral is
//! a piecewise quadratic function of the radius and can be maximised in
//! closed form over sub-radii. For `p = ∞` the window maximum is taken over
//! the centre, the nodes inside the window and the linearly interpolated
//! values at `x ± δ`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{GridFunction, LebesgueExponent};
use crate::scalar::Scalar;

/// `SupOverH` is `‖·‖_{x,δ}` (supremum over sub-radii); `FixedDelta` is `‖·‖°_{x,δ}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormVariant {
    SupOverH,
    FixedDelta,
}

impl NormVariant {
    pub fn label(self) -> &'static str {
        match self {
            NormVariant::SupOverH => "sup",
            NormVariant::FixedDelta => "fixed",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WindowSpec<T> {
    pub x: T,
    pub delta: T,
    pub p: LebesgueExponent,
    pub variant: NormVariant,
}

impl<T: Scalar> WindowSpec<T> {
    pub fn new(x: T, delta: T, p: LebesgueExponent, variant: NormVariant) -> Result<Self> {
        check_delta(delta)?;
        Ok(WindowSpec { x, delta, p, variant })
    }
}

fn check_delta<T: Scalar>(delta: T) -> Result<()> {
    if delta >= T::zero() && delta <= T::PI() {
        Ok(())
    } else {
        Err(Error::InvalidWindow(delta.as_f64()))
    }
}

/// Radii `π/(k+1)` for `k = 0..=n`.
pub fn standard_deltas<T: Scalar>(n: usize) -> Vec<T> {
    (0..=n).map(|k| T::PI() / T::of_usize(k + 1)).collect()
}

/// A point of a window: the centre itself or a grid node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum WindowPoint {
    Center,
    Node(usize),
}

/// One side of a window: the centre at offset 0 followed by the grid nodes
/// in order of increasing distance.
#[derive(Clone, Debug)]
struct Side<T> {
    nodes: Vec<usize>,
    off: Vec<T>,
    val: Vec<T>,
    phi: Vec<T>,
    cum: Vec<T>,
    pmax: Vec<T>,
}

impl<T: Scalar> Side<T> {
    fn build(
        n: usize,
        first: isize,
        dir: isize,
        off1: T,
        h: T,
        reach: T,
        center: T,
        values: impl Fn(usize) -> T,
        p: LebesgueExponent,
    ) -> Self {
        let mut side = Side {
            nodes: vec![usize::MAX],
            off: vec![T::zero()],
            val: vec![center],
            phi: vec![p.power(center)],
            cum: vec![T::zero()],
            pmax: vec![center.abs()],
        };
        let mut k = 0usize;
        while *side.off.last().unwrap() < reach || side.off.len() < 2 {
            let idx = (first + dir * k as isize).rem_euclid(n as isize) as usize;
            let o = off1 + h * T::of_usize(k);
            let v = values(idx);
            let phi = p.power(v);
            let last = side.off.len() - 1;
            let seg = o - side.off[last];
            let cum = side.cum[last] + seg * (side.phi[last] + phi) / (T::one() + T::one());
            let pm = side.pmax[last].max(v.abs());
            side.nodes.push(idx);
            side.off.push(o);
            side.val.push(v);
            side.phi.push(phi);
            side.cum.push(cum);
            side.pmax.push(pm);
            k += 1;
        }
        side
    }

    /// Segment `k` with `off[k] <= t < off[k+1]`.
    #[inline]
    fn segment(&self, t: T) -> usize {
        let k = self.off.partition_point(|&o| o <= t);
        k.saturating_sub(1).min(self.off.len() - 2)
    }

    #[inline]
    fn slope(&self, k: usize) -> T {
        (self.phi[k + 1] - self.phi[k]) / (self.off[k + 1] - self.off[k])
    }

    /// `∫_0^t` of the interpolated `|g|^p`.
    fn integral(&self, t: T) -> T {
        let k = self.segment(t);
        let u = t - self.off[k];
        self.cum[k] + self.phi[k] * u + self.slope(k) * u * u / (T::one() + T::one())
    }

    /// Linear interpolation of the signed values, with the segment and fraction used.
    fn interp(&self, t: T) -> (T, usize, T) {
        let k = self.segment(t);
        let len = self.off[k + 1] - self.off[k];
        let frac = ((t - self.off[k]) / len).max(T::zero()).min(T::one());
        (self.val[k] + (self.val[k + 1] - self.val[k]) * frac, k, frac)
    }

    /// `max |g|` over the centre, the nodes at offsets `<= t`, and the interpolated endpoint.
    fn sup(&self, t: T) -> T {
        let (end, k, _) = self.interp(t);
        self.pmax[k].max(end.abs())
    }

    fn point(&self, k: usize) -> WindowPoint {
        if k == 0 {
            WindowPoint::Center
        } else {
            WindowPoint::Node(self.nodes[k])
        }
    }
}

/// Cell of the merged left/right breakpoint partition. On the cell,
/// `I(b + u) = i0 + alpha u + beta u²/2` and `best` is `sup_{0<h<=b} I(h)/h`.
#[derive(Clone, Copy, Debug)]
struct Cell<T> {
    b: T,
    i0: T,
    alpha: T,
    beta: T,
    best: T,
}

impl<T: Scalar> Cell<T> {
    #[inline]
    fn ratio(&self, u: T) -> T {
        let h = self.b + u;
        (self.i0 + self.alpha * u + self.beta * u * u / (T::one() + T::one())) / h
    }

    /// Largest `I(h)/h` over interior critical points with `0 < u < limit`.
    fn interior_max(&self, limit: T) -> T {
        let mut best = T::neg_infinity();
        if self.b <= T::zero() || self.beta == T::zero() {
            return best;
        }
        let two = T::one() + T::one();
        let a2 = self.beta / two;
        let a1 = self.beta * self.b;
        let a0 = self.alpha * self.b - self.i0;
        let disc = a1 * a1 - (two + two) * a2 * a0;
        if disc < T::zero() {
            return best;
        }
        let q = -(a1 + a1.signum() * disc.sqrt()) / two;
        let mut roots = [T::nan(); 2];
        roots[0] = q / a2;
        if q != T::zero() {
            roots[1] = a0 / q;
        }
        for u in roots {
            if u > T::zero() && u < limit {
                best = best.max(self.ratio(u));
            }
        }
        best
    }
}

/// Precomputed window data for one function and centre, queried at many radii.
#[derive(Clone, Debug)]
pub struct WindowProfile<T> {
    p: LebesgueExponent,
    reach: T,
    center: T,
    right: Side<T>,
    left: Side<T>,
    cells: Vec<Cell<T>>,
}

impl<T: Scalar> WindowProfile<T> {
    /// Profile of `g` around `x`, usable for radii up to `reach <= π`.
    pub fn new(g: &GridFunction<T>, x: T, p: LebesgueExponent, reach: T) -> Result<Self> {
        let center = g.eval(x);
        Self::build(g, x, p, reach, center, T::zero())
    }

    /// Profile of `t ↦ Δ_x f(t)` centred at 0 (the integrand of the pointwise moduli).
    pub fn of_difference(f: &GridFunction<T>, x: T, p: LebesgueExponent, reach: T) -> Result<Self> {
        let fx = f.eval(x);
        Self::build(f, x, p, reach, T::zero(), fx)
    }

    fn build(g: &GridFunction<T>, x: T, p: LebesgueExponent, reach: T, center: T, shift: T) -> Result<Self> {
        check_delta(reach)?;
        let n = g.len();
        let h = g.spacing();
        let (i, theta) = g.locate(x);
        let i = i as isize;
        let values = |j: usize| g.samples()[j] - shift;
        let right = Side::build(n, i + 1, 1, (T::one() - theta) * h, h, reach, center, values, p);
        let (first_left, off_left) = if theta > T::zero() { (i, theta * h) } else { (i - 1, h) };
        let left = Side::build(n, first_left, -1, off_left, h, reach, center, values, p);
        let mut profile = WindowProfile { p, reach, center, right, left, cells: Vec::new() };
        if !p.is_infinite() {
            profile.cells = profile.build_cells();
        }
        Ok(profile)
    }

    fn build_cells(&self) -> Vec<Cell<T>> {
        let (r, l) = (&self.right, &self.left);
        let mut cells = Vec::with_capacity(r.off.len() + l.off.len());
        let (mut kr, mut kl) = (0usize, 0usize);
        let mut b = T::zero();
        let mut best = r.phi[0] + l.phi[0];
        loop {
            let (sr, sl) = (r.slope(kr), l.slope(kl));
            let (ur, ul) = (b - r.off[kr], b - l.off[kl]);
            let two = T::one() + T::one();
            let i0 = r.cum[kr] + r.phi[kr] * ur + sr * ur * ur / two + l.cum[kl] + l.phi[kl] * ul + sl * ul * ul / two;
            let alpha = r.phi[kr] + sr * ur + l.phi[kl] + sl * ul;
            let cell = Cell { b, i0, alpha, beta: sr + sl, best };
            cells.push(cell);
            let next = r.off[kr + 1].min(l.off[kl + 1]);
            if next >= self.reach || (kr + 2 >= r.off.len() && kl + 2 >= l.off.len()) {
                break;
            }
            let len = next - b;
            best = best.max(cell.ratio(len)).max(cell.interior_max(len));
            if r.off[kr + 1] <= next && kr + 2 < r.off.len() {
                kr += 1;
            }
            if l.off[kl + 1] <= next && kl + 2 < l.off.len() {
                kl += 1;
            }
            b = next;
        }
        cells
    }

    pub fn center_value(&self) -> T {
        self.center
    }

    pub fn exponent(&self) -> LebesgueExponent {
        self.p
    }

    fn check(&self, delta: T) -> Result<()> {
        check_delta(delta)?;
        if delta > self.reach * (T::one() + T::lit(1e-12)) {
            return Err(Error::InvalidWindow(delta.as_f64()));
        }
        Ok(())
    }

    /// `‖g‖°_{x,δ}`.
    pub fn fixed(&self, delta: T) -> Result<T> {
        self.check(delta)?;
        if delta == T::zero() {
            return Ok(self.center.abs());
        }
        Ok(match self.p {
            LebesgueExponent::Infinity => self.right.sup(delta).max(self.left.sup(delta)),
            p => {
                let total = self.right.integral(delta) + self.left.integral(delta);
                p.root(total / (delta + delta))
            }
        })
    }

    /// `‖g‖_{x,δ} = sup_{0<h<=δ} ‖g‖°_{x,h}`, exact for the window model.
    pub fn sup(&self, delta: T) -> Result<T> {
        self.check(delta)?;
        if delta == T::zero() {
            return Ok(self.center.abs());
        }
        Ok(match self.p {
            // The fixed-radius maximum is already nondecreasing in δ.
            LebesgueExponent::Infinity => self.right.sup(delta).max(self.left.sup(delta)),
            p => {
                let j = self.cells.partition_point(|c| c.b <= delta).saturating_sub(1);
                let cell = &self.cells[j];
                let u = delta - cell.b;
                let best = cell.best.max(cell.ratio(u)).max(cell.interior_max(u));
                p.root(best / (T::one() + T::one()))
            }
        })
    }

    pub fn norm(&self, delta: T, variant: NormVariant) -> Result<T> {
        match variant {
            NormVariant::SupOverH => self.sup(delta),
            NormVariant::FixedDelta => self.fixed(delta),
        }
    }

    /// Quadrature form of the fixed-radius window for finite `p`:
    /// `‖g‖°_{x,δ}^p = Σ weight_i |g(point_i)|^p`. Points may repeat when the
    /// two sides overlap at `δ = π`.
    pub fn quadrature(&self, delta: T) -> Result<Vec<(WindowPoint, T)>> {
        self.check(delta)?;
        if delta == T::zero() {
            return Ok(vec![(WindowPoint::Center, T::one())]);
        }
        let two = T::one() + T::one();
        let norm = T::one() / (delta + delta);
        let mut out = Vec::new();
        for side in [&self.right, &self.left] {
            let k_end = side.segment(delta);
            for k in 0..k_end {
                let len = side.off[k + 1] - side.off[k];
                out.push((side.point(k), len / two * norm));
                out.push((side.point(k + 1), len / two * norm));
            }
            let u = delta - side.off[k_end];
            let len = side.off[k_end + 1] - side.off[k_end];
            let t = u / len;
            out.push((side.point(k_end), u * (T::one() - t / two) * norm));
            out.push((side.point(k_end + 1), u * t / two * norm));
        }
        Ok(merge_points(out))
    }

    /// Rows of the `p = ∞` window maximum, each a linear combination of point
    /// values, ordered from `x - δ` to `x + δ`. At `δ = π` the two endpoints
    /// coincide and only the right one is kept; repeated nodes are dropped.
    pub fn sup_rows(&self, delta: T) -> Result<Vec<Vec<(WindowPoint, T)>>> {
        self.check(delta)?;
        let mut rows: Vec<Vec<(WindowPoint, T)>> = Vec::new();
        let full_circle = delta >= T::PI();
        let endpoint = |side: &Side<T>| -> Option<Vec<(WindowPoint, T)>> {
            let (_, k, frac) = side.interp(delta);
            if frac <= T::zero() {
                None
            } else if frac >= T::one() {
                Some(vec![(side.point(k + 1), T::one())])
            } else {
                Some(vec![(side.point(k), T::one() - frac), (side.point(k + 1), frac)])
            }
        };
        let inside = |side: &Side<T>| -> usize {
            if delta == T::zero() {
                0
            } else {
                side.off.partition_point(|&o| o <= delta) - 1
            }
        };
        let (kl, kr) = (inside(&self.left), inside(&self.right));
        if !full_circle && delta > T::zero() {
            if let Some(row) = endpoint(&self.left) {
                rows.push(row);
            }
        }
        for k in (1..=kl).rev() {
            rows.push(vec![(self.left.point(k), T::one())]);
        }
        rows.push(vec![(WindowPoint::Center, T::one())]);
        for k in 1..=kr {
            rows.push(vec![(self.right.point(k), T::one())]);
        }
        if delta > T::zero() {
            if let Some(row) = endpoint(&self.right) {
                rows.push(row);
            }
        }
        let mut seen = std::collections::HashSet::new();
        rows.retain(|row| {
            if row.len() == 1 {
                seen.insert(row[0].0)
            } else {
                true
            }
        });
        Ok(rows)
    }
}

fn merge_points<T: Scalar>(items: Vec<(WindowPoint, T)>) -> Vec<(WindowPoint, T)> {
    let mut out: Vec<(WindowPoint, T)> = Vec::with_capacity(items.len());
    let mut index = std::collections::HashMap::<WindowPoint, usize>::new();
    for (pt, w) in items {
        if w == T::zero() {
            continue;
        }
        match index.get(&pt) {
            Some(&i) => out[i].1 += w,
            None => {
                index.insert(pt, out.len());
                out.push((pt, w));
            }
        }
    }
    out
}

/// `Δ_x f(t) = f(x+t) - f(x)`, exact through the evaluator when present.
pub fn delta_op<T: Scalar>(f: &GridFunction<T>, x: T, t: T) -> T {
    if t == T::zero() {
        return T::zero();
    }
    f.eval(x + t) - f.eval(x)
}

/// `‖f‖_{x,δ}` or `‖f‖°_{x,δ}` depending on the variant.
pub fn windowed_norm<T: Scalar>(f: &GridFunction<T>, w: &WindowSpec<T>) -> Result<T> {
    check_delta(w.delta)?;
    WindowProfile::new(f, w.x, w.p, w.delta)?.norm(w.delta, w.variant)
}

/// `w_x f(δ)` (sup variant) or `w°_x f(δ)` (fixed variant).
pub fn pointwise_modulus<T: Scalar>(
    f: &GridFunction<T>,
    x: T,
    delta: T,
    p: LebesgueExponent,
    variant: NormVariant,
) -> Result<T> {
    check_delta(delta)?;
    WindowProfile::of_difference(f, x, p, delta)?.norm(delta, variant)
}

/// Pointwise modulus at the radii `δ_k = π/(k+1)`, `k = 0..=n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModulusTable<T> {
    pub n: usize,
    pub p: LebesgueExponent,
    pub variant: NormVariant,
    pub deltas: Vec<T>,
    pub values: Vec<T>,
}

impl<T: Scalar> ModulusTable<T> {
    pub fn new(f: &GridFunction<T>, x: T, n: usize, p: LebesgueExponent, variant: NormVariant) -> Result<Self> {
        let profile = WindowProfile::of_difference(f, x, p, T::PI())?;
        let deltas = standard_deltas::<T>(n);
        let values = deltas.iter().map(|&d| profile.norm(d, variant)).collect::<Result<_>>()?;
        Ok(ModulusTable { n, p, variant, deltas, values })
    }

    /// `Ω_x f(π/(n+1))` or `Ω°_x f(π/(n+1))`.
    pub fn average(&self) -> T {
        self.values.iter().copied().sum::<T>() / T::of_usize(self.values.len())
    }

    /// CSV rows `(k, δ_k, value)`.
    pub fn rows(&self) -> Vec<(usize, T, T)> {
        self.deltas.iter().zip(&self.values).enumerate().map(|(k, (d, v))| (k, *d, *v)).collect()
    }
}

pub fn averaged_modulus<T: Scalar>(
    f: &GridFunction<T>,
    x: T,
    n: usize,
    p: LebesgueExponent,
    variant: NormVariant,
) -> Result<T> {
    Ok(ModulusTable::new(f, x, n, p, variant)?.average())
}

/// `‖f(· + h) - f(·)‖_{X^p}` over the sample grid.
pub fn shift_norm<T: Scalar>(f: &GridFunction<T>, h: T, p: LebesgueExponent) -> T {
    let n = f.len();
    let step = f.spacing();
    let j = (h / step).round();
    let diffs: Vec<T> = if (h - j * step).abs() <= step * T::lit(1e-12) {
        let j = j.to_isize().unwrap_or(0);
        (0..n).map(|i| f.sample(i as isize + j) - f.samples()[i]).collect()
    } else {
        (0..n).map(|i| f.eval(f.node(i) + h) - f.samples()[i]).collect()
    };
    p.grid_norm(&diffs)
}

/// Global modulus `ω f(δ)` for radii up to a fixed reach. Shifts are the grid
/// multiples `jΔ <= δ` plus `δ` itself; the norm is shift-invariant, so only
/// positive shifts are needed.
#[derive(Clone, Debug)]
pub struct GlobalModulus<T: Scalar> {
    f: GridFunction<T>,
    p: LebesgueExponent,
    prefix: Vec<T>,
}

impl<T: Scalar> GlobalModulus<T> {
    pub fn new(f: &GridFunction<T>, p: LebesgueExponent, reach: T) -> Result<Self> {
        check_delta(reach)?;
        let steps = (reach / f.spacing() + T::lit(1e-9)).floor().to_usize().unwrap_or(0);
        let mut prefix = Vec::with_capacity(steps + 1);
        let mut best = T::zero();
        prefix.push(best);
        for j in 1..=steps {
            best = best.max(shift_norm(f, f.spacing() * T::of_usize(j), p));
            prefix.push(best);
        }
        Ok(GlobalModulus { f: f.clone(), p, prefix })
    }

    pub fn at(&self, delta: T) -> Result<T> {
        check_delta(delta)?;
        if delta == T::zero() {
            return Ok(T::zero());
        }
        let j = (delta / self.f.spacing() + T::lit(1e-9)).floor().to_usize().unwrap_or(0);
        if j >= self.prefix.len() {
            return Err(Error::InvalidWindow(delta.as_f64()));
        }
        Ok(self.prefix[j].max(shift_norm(&self.f, delta, self.p)))
    }

    /// `Ω f(π/(n+1))`.
    pub fn average(&self, n: usize) -> Result<T> {
        let mut acc = T::zero();
        for d in standard_deltas::<T>(n) {
            acc += self.at(d)?;
        }
        Ok(acc / T::of_usize(n + 1))
    }
}

pub fn global_modulus<T: Scalar>(f: &GridFunction<T>, delta: T, p: LebesgueExponent) -> Result<T> {
    if !(delta > T::zero()) {
        return Err(Error::InvalidWindow(delta.as_f64()));
    }
    GlobalModulus::new(f, p, delta)?.at(delta)
}

pub fn averaged_global_modulus<T: Scalar>(f: &GridFunction<T>, n: usize, p: LebesgueExponent) -> Result<T> {
    GlobalModulus::new(f, p, T::PI())?.average(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const INF: LebesgueExponent = LebesgueExponent::INF;
    const TWO: LebesgueExponent = LebesgueExponent::TWO;

    fn sawtooth(n: usize) -> GridFunction<f64> {
        GridFunction::from_fn(n, |x: f64| {
            let w = crate::fourier::wrap_angle(x);
            if w == -PI {
                0.0
            } else {
                w
            }
        })
        .unwrap()
    }

    #[test]
    fn constant_function_has_unit_norm() {
        let f = GridFunction::from_fn(256, |_| 1.0).unwrap();
        for p in [LebesgueExponent::ONE, TWO, LebesgueExponent::finite(3.5).unwrap(), INF] {
            for v in [NormVariant::SupOverH, NormVariant::FixedDelta] {
                for d in [0.0, 0.01, 0.7, PI] {
                    let w = WindowSpec::new(0.3, d, p, v).unwrap();
                    assert!((windowed_norm(&f, &w).unwrap() - 1.0).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn linear_window_values() {
        let f = sawtooth(1024);
        for v in [NormVariant::SupOverH, NormVariant::FixedDelta] {
            let w = WindowSpec::new(0.0, 0.5, INF, v).unwrap();
            assert!((windowed_norm(&f, &w).unwrap() - 0.5).abs() < 1e-12);
        }
        let w = WindowSpec::new(0.0, 0.3, TWO, NormVariant::FixedDelta).unwrap();
        let got = windowed_norm(&f, &w).unwrap();
        assert!((got - 0.3 / 3f64.sqrt()).abs() < 1e-4, "{got}");
    }

    #[test]
    fn rejects_bad_radius() {
        let f = sawtooth(64);
        assert!(WindowSpec::new(0.0, -0.1, TWO, NormVariant::FixedDelta).is_err());
        assert!(pointwise_modulus(&f, 0.0, 3.5, TWO, NormVariant::FixedDelta).is_err());
    }

    #[test]
    fn modulus_of_linear_function() {
        let f = sawtooth(2048);
        for d in [0.1, 0.4, 1.0] {
            let w = pointwise_modulus(&f, 0.2, d, INF, NormVariant::SupOverH).unwrap();
            assert!((w - d).abs() < 1e-12);
        }
        assert_eq!(pointwise_modulus(&f, 0.2, 0.0, INF, NormVariant::SupOverH).unwrap(), 0.0);
    }

    #[test]
    fn sup_dominates_fixed_and_is_monotone() {
        let f = GridFunction::from_fn(512, |x: f64| (3.0 * x).sin() + x.cos().abs()).unwrap();
        for p in [LebesgueExponent::ONE, TWO, LebesgueExponent::finite(1.7).unwrap()] {
            let prof = WindowProfile::of_difference(&f, 0.41, p, PI).unwrap();
            let mut last = 0.0;
            for i in 0..=200 {
                let d = PI * i as f64 / 200.0;
                let s = prof.sup(d).unwrap();
                assert!(s + 1e-14 >= prof.fixed(d).unwrap());
                assert!(s + 1e-14 >= last);
                last = s;
            }
        }
    }

    #[test]
    fn sup_matches_dense_scan() {
        let f = GridFunction::from_fn(128, |x: f64| (2.0 * x).sin() + 0.3 * x.cos()).unwrap();
        let prof = WindowProfile::new(&f, 0.123, TWO, PI).unwrap();
        let d = 2.1;
        let scan = (1..=20000).map(|i| prof.fixed(d * i as f64 / 20000.0).unwrap()).fold(0.0, f64::max);
        let sup = prof.sup(d).unwrap();
        assert!(sup >= scan - 1e-12 && sup <= scan + 1e-6, "{sup} vs {scan}");
    }

    #[test]
    fn quadrature_reproduces_fixed_norm() {
        let f = GridFunction::from_fn(256, |x: f64| x.sin() + 0.5).unwrap();
        let x = 0.77;
        let p = LebesgueExponent::finite(1.5).unwrap();
        let prof = WindowProfile::new(&f, x, p, PI).unwrap();
        for d in [0.05, 0.6, 2.0, PI] {
            let q = prof.quadrature(d).unwrap();
            let total: f64 = q
                .iter()
                .map(|(pt, w)| {
                    let v = match pt {
                        WindowPoint::Center => f.eval(x),
                        WindowPoint::Node(j) => f.samples()[*j],
                    };
                    w * p.power(v)
                })
                .sum();
            assert!((p.root(total) - prof.fixed(d).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn full_window_is_normalised_global_norm() {
        let f = GridFunction::from_fn(512, |x: f64| (x).cos() + (4.0 * x).sin()).unwrap();
        let x = f.node(100);
        let v = windowed_norm(&f, &WindowSpec::new(x, PI, TWO, NormVariant::FixedDelta).unwrap()).unwrap();
        let want = f.norm(TWO) / (2.0 * PI).sqrt();
        assert!((v - want).abs() < 1e-12);
    }

    #[test]
    fn averaged_modulus_of_linear_function() {
        let f = sawtooth(4096);
        let got = averaged_modulus(&f, 0.0, 3, INF, NormVariant::SupOverH).unwrap();
        // δ = π reaches the jump; the interpolated endpoint lies inside the last cell.
        let table = ModulusTable::new(&f, 0.0, 3, INF, NormVariant::SupOverH).unwrap();
        let tail: f64 = table.values[1..].iter().sum();
        assert!((tail - (PI / 2.0 + PI / 3.0 + PI / 4.0)).abs() < 1e-12);
        assert!((got - table.average()).abs() < 1e-15);
    }

    #[test]
    fn global_modulus_of_cosine() {
        let f = GridFunction::from_fn(1024, f64::cos).unwrap();
        for d in [0.3, 1.0, PI] {
            let w = global_modulus(&f, d, INF).unwrap();
            assert!((w - 2.0 * (d / 2.0).sin()).abs() < 1e-5, "{d}: {w}");
        }
        let avg = averaged_global_modulus(&f, 1, INF).unwrap();
        assert!((avg - (1.0 + 0.5f64.sqrt())).abs() < 1e-5);
    }

    #[test]
    fn sup_rows_cover_window() {
        let f = GridFunction::from_fn(64, f64::sin).unwrap();
        let prof = WindowProfile::new(&f, 0.05, INF, PI).unwrap();
        let rows = prof.sup_rows(0.4).unwrap();
        // Centre, nodes within 0.4 on either side, and two interpolated endpoints.
        let nodes = (0..64).filter(|&j| (f.node(j) - 0.05).abs() <= 0.4).count();
        assert_eq!(rows.len(), nodes + 3);
        let full = prof.sup_rows(PI).unwrap();
        assert_eq!(full.len(), 66);
    }
}
