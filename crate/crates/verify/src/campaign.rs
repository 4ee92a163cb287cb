//! The full verification run: every selected statement over the corpus grid.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::time::Instant;

use trigapprox::LebesgueExponent;

use crate::checks::{self, OracleWindow};
use crate::config::{RunConfig, StatementId};
use crate::context::{FunctionContext, Needs};
use crate::corpus::{circle_distance, x_grid, CorpusFunction};
use crate::reports::{CounterSample, DecaySeries, InequalityReport};
use crate::Result;

/// Everything a run produced, keyed by report file stem.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CampaignOutput {
    pub corpus: Vec<String>,
    /// `T1a`, ..., `CMP`, plus `L4-ln` for the `ln(m/μ)` form.
    pub reports: BTreeMap<String, Vec<InequalityReport>>,
    /// Number of oracle windows compared, when the oracle statement ran.
    pub oracle_windows: Option<usize>,
    pub counter_samples: Vec<CounterSample>,
    pub direct_failures: Vec<String>,
    pub decay: Vec<DecaySeries>,
    /// Wall time per statement in seconds. Not written to any report.
    pub elapsed: BTreeMap<StatementId, f64>,
}

impl CampaignOutput {
    fn push(&mut self, key: &str, r: InequalityReport) {
        self.reports.entry(key.to_string()).or_default().push(r);
    }
}

pub fn run(cfg: &RunConfig) -> Result<CampaignOutput> {
    run_scaled(cfg, 1.0)
}

/// Run with every corpus function multiplied by `scale`.
pub fn run_scaled(cfg: &RunConfig, scale: f64) -> Result<CampaignOutput> {
    let funcs = cfg.functions()?;
    cfg.validate()?;
    let mut out = CampaignOutput { corpus: funcs.iter().map(|f| f.name.to_string()).collect(), ..Default::default() };
    if cfg.statements.is_empty() {
        return Ok(out);
    }
    for f in funcs {
        run_function(cfg, f, scale, &mut out)?;
    }
    Ok(out)
}

fn needs(cfg: &RunConfig) -> Needs {
    let nmax = cfg.grid.n.iter().copied().max().unwrap_or(0);
    let l2 = cfg.statements.contains(&StatementId::L2);
    Needs {
        max_j: if l2 { nmax.max(cfg.grid.l2_max) } else { nmax },
        extra_deltas: if l2 { cfg.grid.l2_deltas } else { 0 },
        extra_max: cfg.grid.l2_max,
        integral_pairs: if cfg.statements.contains(&StatementId::T1a) { cfg.pairs() } else { Vec::new() },
        integral_points: cfg.tolerances.integral_points,
    }
}

fn run_function(cfg: &RunConfig, f: &'static CorpusFunction, scale: f64, out: &mut CampaignOutput) -> Result<()> {
    let tol = &cfg.tolerances;
    let xs = x_grid(f, cfg.grid.x_count);
    let mut ctx = FunctionContext::new(f, cfg.samples, scale, xs.clone(), needs(cfg), cfg.solver.clone())?;
    let pairs = cfg.pairs();
    let selected = |id: StatementId| cfg.statements.contains(&id);

    for id in StatementId::ALL {
        if !selected(id) {
            continue;
        }
        let start = Instant::now();
        match id {
            StatementId::T1a | StatementId::T1b | StatementId::T2 | StatementId::L3 | StatementId::L4 | StatementId::L5 => {
                for &p in &cfg.grid.p {
                    for &(n, m) in &pairs {
                        for xi in 0..xs.len() {
                            pointwise_rows(&mut ctx, cfg, id, p, xi, n, m, out)?;
                        }
                    }
                }
            }
            StatementId::T3 => {
                if f.is_continuous() {
                    for &(n, m) in &pairs {
                        out.push("T3", checks::t3(&mut ctx, tol, n, m)?);
                    }
                }
            }
            StatementId::C1 => {
                let g = &cfg.grid;
                if f.is_continuous() {
                    for &x in &xs {
                        let value = ctx.value(x);
                        let (rows, series) = checks::c1(&mut ctx, tol, &g.c1_n, g.c1_lo, g.c1_hi, x, value, false)?;
                        rows.into_iter().for_each(|r| out.push("C1", r));
                        out.decay.push(series);
                    }
                }
                for &jump in f.jumps {
                    // The control compares against the one-sided limit, which the means do not approach.
                    let x = if circle_distance(jump, PI) < 1e-12 { PI } else { jump };
                    let value = scale * f.left_limit(x);
                    let (rows, series) = checks::c1(&mut ctx, tol, &g.c1_n, g.c1_lo, g.c1_hi, x, value, true)?;
                    rows.into_iter().for_each(|r| out.push("C1", r));
                    out.decay.push(series);
                }
            }
            StatementId::L1 => {
                let mut local = 0usize;
                let mut rows = Vec::new();
                for &p in &cfg.grid.l1_p {
                    for &n in &cfg.grid.l1_n {
                        for &k in &cfg.grid.l1_k {
                            for xi in 0..xs.len() {
                                match checks::l1(&mut ctx, tol, p, xi, n, k)? {
                                    OracleWindow::Row(r, sample) => {
                                        local += 1;
                                        rows.push(r);
                                        out.counter_samples.extend(sample);
                                    }
                                    OracleWindow::DirectFailed(msg) => out.direct_failures.push(msg),
                                }
                            }
                        }
                    }
                }
                *out.oracle_windows.get_or_insert(0) += local;
                rows.into_iter().for_each(|r| out.push("L1", r));
            }
            StatementId::L2 => {
                for &p in &cfg.grid.p {
                    for xi in 0..xs.len() {
                        for r in checks::l2(&mut ctx, tol, p, xi, cfg.grid.l2_max)? {
                            out.push("L2", r);
                        }
                    }
                }
            }
            StatementId::Cmp => {
                for &p in &cfg.grid.p {
                    for r in checks::cmp(&ctx, tol, p, cfg.grid.cmp_samples, cfg.grid.cmp_k)? {
                        out.push("CMP", r);
                    }
                }
            }
        }
        *out.elapsed.entry(id).or_default() += start.elapsed().as_secs_f64();
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn pointwise_rows(
    ctx: &mut FunctionContext,
    cfg: &RunConfig,
    id: StatementId,
    p: LebesgueExponent,
    xi: usize,
    n: usize,
    m: usize,
    out: &mut CampaignOutput,
) -> Result<()> {
    let tol = &cfg.tolerances;
    match id {
        // These bounds are stated for m >= 1 only.
        StatementId::T1a if m >= 1 => out.push("T1a", checks::t1a(ctx, tol, p, xi, n, m)?),
        StatementId::T1b if m >= 1 => out.push("T1b", checks::t1b(ctx, tol, p, xi, n, m)?),
        StatementId::T2 if m >= 1 => out.push("T2", checks::t2(ctx, tol, p, xi, n, m)?),
        StatementId::L3 => {
            let mut qs = vec![m + 1];
            if n > m + 1 {
                qs.push(n);
            }
            for q in qs {
                out.push("L3", checks::l3(ctx, tol, p, xi, n, m, q)?);
            }
        }
        StatementId::L4 if m >= 2 => {
            let mut mus = vec![1];
            if m / 2 > 1 {
                mus.push(m / 2);
            }
            for mu in mus {
                let (full, ln_only) = checks::l4(ctx, tol, p, xi, n, m, mu)?;
                out.push("L4", full);
                out.push("L4-ln", ln_only);
            }
        }
        StatementId::L5 => out.push("L5", checks::l5(ctx, tol, p, xi, n, m)?),
        _ => {}
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reports::Summary;

    fn small(corpus: &str, statements: &str) -> RunConfig {
        RunConfig::from_toml(&format!(
            "corpus = [{corpus}]\nstatements = [{statements}]\nsamples = 1024\n\n[grid]\nn = [4, 8, 16]\nx_count = 3\nl1_n = [0, 1, 2]\nc1_n = [8, 16, 32, 64]\nc1_lo = 16\nc1_hi = 64\ncmp_samples = 64\ncmp_k = 4\n"
        ))
        .unwrap()
    }

    #[test]
    fn empty_statement_list_produces_nothing() {
        let out = run(&small("\"abs\"", "")).unwrap();
        assert!(out.reports.is_empty());
        assert!(out.oracle_windows.is_none());
    }

    #[test]
    fn fitted_constants_ignore_scaling() {
        let cfg = small("\"abs\", \"sawtooth\"", "\"T2\", \"L3\", \"L4\", \"L5\"");
        let one = Summary::build(&run(&cfg).unwrap(), &cfg);
        let two = Summary::build(&run_scaled(&cfg, 2.0).unwrap(), &cfg);
        assert_eq!(one.fitted_constants.len(), 5);
        for (key, fit) in &one.fitted_constants {
            let (a, b) = (fit.value().unwrap(), two.fitted_constants[key].value().unwrap());
            assert!((a - b).abs() <= 1e-9 * a.max(1.0), "{key}: {a} vs {b}");
        }
    }

    #[test]
    fn exact_polynomials_give_zero_left_sides() {
        let all = "\"T1a\", \"T1b\", \"T2\", \"T3\", \"C1\", \"L1\", \"L2\", \"L3\", \"L4\", \"L5\", \"CMP\"";
        let cfg = small("\"constant-one\"", all);
        let out = run(&cfg).unwrap();
        assert_eq!(out.reports.len(), 12);
        for r in out.reports.values().flatten() {
            assert!(r.lhs.abs() <= 1e-9, "{}: {}", r.label(), r.lhs);
            assert!(r.pass, "{}", r.label());
        }
        assert!(out.counter_samples.is_empty());
        assert!(out.direct_failures.is_empty());
    }
}
