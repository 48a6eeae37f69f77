use crate::constants::{kconst, KMethod};
use crate::energy::{gagliardo_full, wtq_distance};
use crate::grid::{local_gradient_norm, lp_norm};
use crate::solve::{
    dual_norm_fractional, dual_norm_local, first_eigen_fractional, local_eigen,
    second_eigen_fractional, SolverConfig,
};
use crate::{Domain, Eigen, FracError, Function, Grid, Params, Result};

use super::{ratio, strictly_decreasing, CheckCase, CheckReport, Meta, SweepReport, SweepRow};

fn require_s_list(s_list: &[f64]) -> Result<()> {
    if s_list.iter().any(|&s| !(s > 0.0 && s < 1.0)) {
        return Err(FracError::InvalidInput(format!(
            "every s must lie in (0, 1), got {s_list:?}"
        )));
    }
    if s_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(FracError::InvalidInput(format!(
            "s values must increase, got {s_list:?}"
        )));
    }
    Ok(())
}

fn list(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn eigen_at(grid: &Grid, s: f64, p: f64, m: usize, cfg: &SolverConfig) -> Result<Eigen> {
    let fp = Params::one_d(s, p)?;
    let u1 = first_eigen_fractional(grid, fp, cfg)?;
    if m == 1 {
        return Ok(u1);
    }
    second_eigen_fractional(grid, fp, &u1, cfg)
}

/// Tabulates `(1 - s) lambda^s_{m,p}` against `K(p, 1) lambda^1_{m,p}` on
/// one grid, with eigenfunction distances. A failed solve marks its row and
/// the sweep goes on.
pub fn run_sweep(
    domain: Domain,
    p: f64,
    m: usize,
    s_list: &[f64],
    n: usize,
    tq_pairs: &[(f64, f64)],
    cfg: &SolverConfig,
) -> Result<SweepReport> {
    require_s_list(s_list)?;
    if m != 1 && m != 2 {
        return Err(FracError::InvalidInput(format!("m must be 1 or 2, got {m}")));
    }
    for &(t, q) in tq_pairs {
        if !(q >= p && t > 0.0 && t < p / q) {
            return Err(FracError::Regime(format!(
                "(t, q) = ({t}, {q}) needs q >= p = {p} and 0 < t < p/q"
            )));
        }
    }
    cfg.validate()?;
    let grid = Grid::new(domain, n);
    let local = local_eigen(&grid, p, m, cfg)?;
    let target = kconst::<f64>(p, 1, KMethod::ClosedForm)? * local.lambda;
    let u = &local.eigenfunction;

    let rows = s_list
        .iter()
        .map(|&s| {
            let failed = |status: String| SweepRow {
                s,
                lambda: f64::NAN,
                scaled_lambda: f64::NAN,
                target,
                rel_err: f64::NAN,
                lp_dist: f64::NAN,
                wtq_dist: vec![f64::NAN; tq_pairs.len()],
                iterations: 0,
                residual: f64::NAN,
                status,
            };
            let row = || -> Result<SweepRow> {
                let eig = eigen_at(&grid, s, p, m, cfg)?;
                let mut us = eig.eigenfunction.clone();
                if us.l2_inner(u)? < 0.0 {
                    us = us.scaled(-1.0);
                }
                let scaled = (1.0 - s) * eig.lambda;
                let wtq = tq_pairs
                    .iter()
                    .map(|&(t, q)| wtq_distance(&us, u, t, q, cfg.seminorm))
                    .collect::<Result<Vec<_>>>()?;
                Ok(SweepRow {
                    s,
                    lambda: eig.lambda,
                    scaled_lambda: scaled,
                    target,
                    rel_err: (scaled - target).abs() / target,
                    lp_dist: lp_norm(&us.sub(u)?, p)?,
                    wtq_dist: wtq,
                    iterations: eig.iterations,
                    residual: eig.residual,
                    status: "ok".into(),
                })
            };
            row().unwrap_or_else(|e| failed(format!("failed: {e}")))
        })
        .collect();

    let meta = Meta {
        p: Some(p),
        m: Some(m),
        n: Some(n),
        a: Some(domain.a),
        b: Some(domain.b),
        seed: Some(cfg.seed),
        ..Meta::default()
    }
    .with("s_list", list(s_list))
    .with("local_lambda", local.lambda)
    .with("tol", cfg.tol)
    .with("max_iter", cfg.max_iter)
    .with("path_points", cfg.path_points)
    .with("quad_order", cfg.seminorm.quad_order)
    .with("subdivision_levels", cfg.seminorm.subdivision_levels);
    Ok(SweepReport {
        rows,
        tq_pairs: tq_pairs.to_vec(),
        meta,
    })
}

/// Marks the cases of a limit table: the last entry must be within `tol`
/// and the error must decrease over the last three entries.
fn trend_flags(errors: &[f64], tol: f64) -> Vec<bool> {
    let k = errors.len();
    (0..k)
        .map(|i| {
            let mut ok = errors[i].is_finite();
            // an error already at zero cannot decrease further
            if i + 3 > k && i > 0 && errors[i] != 0.0 {
                ok &= strictly_decreasing(&errors[i - 1..=i]);
            }
            if i + 1 == k {
                ok &= errors[i] < tol;
            }
            ok
        })
        .collect()
}

/// `(1 - s) [u]^p_{W^{s,p}(R)}` against `K(p, 1) ||u'||_p^p`.
pub fn run_bbm_table(
    u: &Function,
    p: f64,
    s_list: &[f64],
    cfg: &SolverConfig,
    tol: f64,
) -> Result<CheckReport> {
    require_s_list(s_list)?;
    let limit = kconst::<f64>(p, 1, KMethod::ClosedForm)? * local_gradient_norm(u, p).powf(p);
    let mut lhs = Vec::with_capacity(s_list.len());
    for &s in s_list {
        lhs.push((1.0 - s) * gagliardo_full(u, Params::one_d(s, p)?, cfg.seminorm)?);
    }
    let errors: Vec<f64> = lhs.iter().map(|&l| (ratio(l, limit) - 1.0).abs()).collect();
    let flags = trend_flags(&errors, tol);
    let rows = s_list
        .iter()
        .zip(lhs.iter().zip(&errors))
        .zip(flags)
        .map(|((&s, (&l, &e)), ok)| {
            CheckCase::new(format!("s={s}"), l, limit, ok)
                .input("s", s)
                .input("p", p)
                .input("rel_err", e)
        })
        .collect();
    let g = u.grid;
    let meta = Meta {
        p: Some(p),
        n: Some(g.n),
        a: Some(g.domain.a),
        b: Some(g.domain.b),
        ..Meta::default()
    }
    .with("s_list", list(s_list))
    .with("tol", tol);
    Ok(CheckReport::new("bbm", rows, meta))
}

/// `(1 - s)^{-1/p} ||F||_{W^{-s,p'}}` against `K(p, 1)^{-1/p} ||F||_{W^{-1,p'}}`,
/// plus the comparison of the two dual norms at each `s`, whose constant is
/// implicit: its ratio must stay within a factor 50 over the sweep.
pub fn check_dual_limit(
    f: &Function,
    p: f64,
    s_list: &[f64],
    cfg: &SolverConfig,
    tol: f64,
) -> Result<CheckReport> {
    require_s_list(s_list)?;
    let k = kconst::<f64>(p, 1, KMethod::ClosedForm)?;
    let local = dual_norm_local(f, p, cfg)?;
    let limit = k.powf(-1.0 / p) * local;
    let lambda1 = local_eigen(&f.grid, p, 1, cfg)?.lambda;
    let mut frac = Vec::with_capacity(s_list.len());
    for &s in s_list {
        frac.push(dual_norm_fractional(f, Params::one_d(s, p)?, cfg)?);
    }
    let errors: Vec<f64> = frac.iter().map(|&d| (ratio(d, limit) - 1.0).abs()).collect();
    let flags = trend_flags(&errors, tol);
    let mut rows: Vec<CheckCase> = s_list
        .iter()
        .zip(frac.iter().zip(&errors))
        .zip(flags)
        .map(|((&s, (&d, &e)), ok)| {
            CheckCase::new(format!("limit s={s}"), d, limit, ok)
                .input("s", s)
                .input("p", p)
                .input("rel_err", e)
        })
        .collect();

    // ||F||_{-1} <= (C / (s (1 - s)))^{1/p} lambda1^{(s-1)/p} ||F||_{-s}
    let comparison: Vec<CheckCase> = s_list
        .iter()
        .zip(&frac)
        .map(|(&s, &d)| {
            let rhs = s.powf(-1.0 / p) * lambda1.powf((s - 1.0) / p) * d;
            let r = ratio(local, rhs);
            CheckCase::new(format!("comparison s={s}"), local, rhs, r.is_finite() && r >= 0.0)
                .input("s", s)
                .input("p", p)
        })
        .collect();
    let cr: Vec<f64> = comparison.iter().map(|c| c.ratio).filter(|r| *r > 0.0).collect();
    let (hi, lo) = if cr.is_empty() {
        (1.0, 1.0)
    } else {
        (
            cr.iter().copied().fold(f64::MIN, f64::max),
            cr.iter().copied().fold(f64::MAX, f64::min),
        )
    };
    rows.extend(comparison);
    rows.push(CheckCase::new("comparison spread", hi, lo, hi / lo < 50.0).input("limit", 50.0));
    let g = f.grid;
    let meta = Meta {
        p: Some(p),
        n: Some(g.n),
        a: Some(g.domain.a),
        b: Some(g.domain.b),
        ..Meta::default()
    }
    .with("s_list", list(s_list))
    .with("tol", tol)
    .with("local_lambda", lambda1);
    Ok(CheckReport::new("dual", rows, meta))
}
