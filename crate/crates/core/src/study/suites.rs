//! Named suites with their default parameters, as run by `fraclim check`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::constants::{kconst, KMethod};
use crate::grid::lp_norm;
use crate::linalg::{DenseMatrix, SymmetricEigen};
use crate::solve::{cell_problem, courant_minimax, first_eigen_fractional, SolverConfig};
use crate::{FracError, Function, Grid, Params, Result};

use super::checks::{
    check_hardy, check_interpolation, check_linfty, check_poincare, check_sobolev, check_stima,
    interpolation_exponents, PoincareVariant,
};
use super::sweep::{check_dual_limit, run_bbm_table};
use super::{strictly_decreasing, CheckCase, CheckReport, Meta};

pub const SUITES: &[&str] = &[
    "interpolation",
    "poincare",
    "hardy",
    "sobolev",
    "linfty",
    "dual",
    "bbm",
    "cell",
    "courant",
];

/// Overrides of a suite's defaults. A given `s` replaces the suite's
/// `s`-list by that single value.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SuiteOptions {
    pub s: Option<f64>,
    pub p: Option<f64>,
    pub n: Option<usize>,
    pub samples: Option<usize>,
}

/// Maximum over minimum of the per-`s` maxima must stay below `limit`.
fn spread_case(label: &str, maxima: &[f64], limit: f64) -> CheckCase {
    let hi = maxima.iter().copied().fold(f64::MIN, f64::max);
    let lo = maxima.iter().copied().fold(f64::MAX, f64::min);
    let ok = maxima.iter().all(|m| m.is_finite() && *m > 0.0) && hi / lo < limit;
    CheckCase::new(format!("{label} spread"), hi, lo, ok).input("limit", limit)
}

fn max_ratio(r: &CheckReport, exclude: &str) -> f64 {
    r.rows
        .iter()
        .filter(|c| !c.label.contains(exclude))
        .map(|c| c.ratio)
        .fold(f64::MIN, f64::max)
}

pub fn run_suite(name: &str, seed: u64, opts: SuiteOptions, cfg: &SolverConfig) -> Result<CheckReport> {
    let p = opts.p.unwrap_or(2.0);
    let s_or = |default: &[f64]| opts.s.map_or(default.to_vec(), |s| vec![s]);
    let meta = Meta {
        seed: Some(seed),
        p: Some(p),
        ..Meta::default()
    };
    match name {
        "interpolation" => {
            let n = opts.n.unwrap_or(128);
            let samples = opts.samples.unwrap_or(20);
            let mut parts = Vec::new();
            let mut extra = Vec::new();
            for (t, q, r) in [(0.9, 3.0, Some(6.0)), (0.9, 3.0, None), (1.0, 3.0, Some(6.0))] {
                let (alpha, _) = interpolation_exponents(p, q, t, r);
                let rs = r.map_or("inf".to_string(), |r| r.to_string());
                let tag = format!("t={t} q={q} r={rs}");
                let mut maxima = Vec::new();
                for s in s_or(&[alpha / 4.0, alpha / 2.0, 0.75 * alpha]) {
                    let rep = check_interpolation(Params::one_d(s, p)?, t, q, r, samples, seed, n)?;
                    maxima.push(max_ratio(&rep, "dilated"));
                    parts.push((format!("{tag} s={s}"), rep));
                }
                extra.push(spread_case(&tag, &maxima, 2.0));
            }
            Ok(CheckReport::merge(name, parts, extra, meta.with("n", n).with("samples", samples)))
        }
        "poincare" => {
            let n = opts.n.unwrap_or(128);
            let samples = opts.samples.unwrap_or(20);
            let mut parts = Vec::new();
            let mut extra = Vec::new();
            let full = s_or(&[0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95]);
            let convex: Vec<f64> = s_or(&[0.55, 0.6, 0.7, 0.8, 0.9, 0.95])
                .into_iter()
                .filter(|s| s * p > 1.0)
                .collect();
            for (variant, list, tag) in [
                (PoincareVariant::Full, full, "whole line"),
                (PoincareVariant::Convex, convex, "interval"),
            ] {
                let mut maxima = Vec::new();
                for s in list {
                    let rep = check_poincare(Params::one_d(s, p)?, variant, samples, seed, n)?;
                    maxima.push(max_ratio(&rep, "dilated"));
                    parts.push((format!("{tag} s={s}"), rep));
                }
                if !maxima.is_empty() {
                    extra.push(spread_case(tag, &maxima, 50.0));
                }
            }
            Ok(CheckReport::merge(name, parts, extra, meta.with("n", n).with("samples", samples)))
        }
        "hardy" => {
            let n = opts.n.unwrap_or(128);
            let samples = opts.samples.unwrap_or(50);
            let mut parts = Vec::new();
            for s in s_or(&[0.6, 0.75, 0.9]) {
                parts.push((format!("s={s}"), check_hardy(Params::one_d(s, p)?, samples, seed, n)?));
            }
            parts.push(("constants".to_string(), check_stima()?));
            Ok(CheckReport::merge(name, parts, vec![], meta.with("n", n).with("samples", samples)))
        }
        "sobolev" => {
            let n = opts.n.unwrap_or(128);
            let samples = opts.samples.unwrap_or(20);
            let mut parts = Vec::new();
            let mut maxima = Vec::new();
            for s in s_or(&[0.2, 0.25, 0.3, 0.35, 0.4, 0.45]) {
                let rep = check_sobolev(Params::one_d(s, p)?, samples, seed, n)?;
                maxima.push(max_ratio(&rep, "-"));
                parts.push((format!("s={s}"), rep));
            }
            let extra = vec![spread_case("sobolev", &maxima, 10.0)];
            Ok(CheckReport::merge(name, parts, extra, meta.with("n", n).with("samples", samples)))
        }
        "linfty" => {
            let n = opts.n.unwrap_or(256);
            let grid = Grid::unit(n);
            let mut parts = Vec::new();
            let mut holder = Vec::new();
            let mut sup = Vec::new();
            for s in s_or(&[0.6, 0.75, 0.9]) {
                let fp = Params::one_d(s, p)?;
                let eig = first_eigen_fractional(&grid, fp, cfg)?;
                let rep = check_linfty(&eig, fp)?;
                if s * p > 1.0 {
                    holder.push(rep.rows[0].ratio);
                    sup.push(rep.rows[1].ratio);
                }
                parts.push((format!("s={s}"), rep));
            }
            if opts.s.is_none() {
                let fp = Params::one_d(0.4, p)?;
                let eig = first_eigen_fractional(&grid, fp, cfg)?;
                parts.push(("s=0.4".to_string(), check_linfty(&eig, fp)?));
            }
            let mut extra = Vec::new();
            if !holder.is_empty() {
                extra.push(spread_case("holder", &holder, 50.0));
                extra.push(spread_case("sup", &sup, 50.0));
            }
            Ok(CheckReport::merge(name, parts, extra, meta.with("n", n)))
        }
        "dual" => {
            let n = opts.n.unwrap_or(512);
            let f = Function::from_fn(Grid::unit(n), |_| 1.0);
            let mut rep = check_dual_limit(&f, p, &s_or(&[0.8, 0.9, 0.95]), cfg, 0.08)?;
            rep.meta.seed = Some(seed);
            Ok(rep)
        }
        "bbm" => {
            let n = opts.n.unwrap_or(1024);
            let u = Function::hat(Grid::unit(n));
            let ps = opts.p.map_or(vec![2.0, 3.0], |p| vec![p]);
            let mut parts = Vec::new();
            for q in &ps {
                parts.push((format!("p={q}"), run_bbm_table(&u, *q, &s_or(&[0.8, 0.9, 0.95]), cfg, 0.08)?));
            }
            let meta = Meta {
                p: opts.p,
                ..meta
            };
            Ok(CheckReport::merge(name, parts, vec![], meta.with("n", n)))
        }
        "cell" => {
            let n = opts.n.unwrap_or(512);
            let s_list = s_or(&[0.8, 0.9, 0.95]);
            cell_suite(p, n, &s_list, cfg, meta.with("n", n))
        }
        "courant" => Ok(courant_suite(seed, 10)?.with_meta(meta)),
        _ => Err(FracError::InvalidInput(format!(
            "unknown suite {name:?}; expected one of {}",
            SUITES.join(", ")
        ))),
    }
}

impl CheckReport {
    fn with_meta(mut self, meta: Meta) -> Self {
        self.meta = meta;
        self
    }
}

/// `(1 - s) [v_s]^p` against `K(p, 1)` with the usual trend rule, and the
/// distance of `v_s` to the linear profile, which must decrease.
fn cell_suite(p: f64, n: usize, s_list: &[f64], cfg: &SolverConfig, meta: Meta) -> Result<CheckReport> {
    let k = kconst::<f64>(p, 1, KMethod::ClosedForm)?;
    let mut energies = Vec::new();
    let mut dists = Vec::new();
    for &s in s_list {
        let (e, v) = cell_problem(Params::one_d(s, p)?, n, 1, cfg)?;
        let psi = Function::from_fn(v.grid, |x| x);
        energies.push(e);
        dists.push(lp_norm(&v.sub(&psi)?, 2.0)?);
    }
    let errors: Vec<f64> = energies.iter().map(|e| (e - k).abs() / k).collect();
    let last = s_list.len() - 1;
    let mut rows = Vec::new();
    for (i, &s) in s_list.iter().enumerate() {
        let mut ok = true;
        if i > 0 && i + 3 > s_list.len() {
            ok &= strictly_decreasing(&errors[i - 1..=i]);
        }
        if i == last {
            ok &= errors[i] < 0.08;
        }
        rows.push(
            CheckCase::new(format!("energy s={s}"), energies[i], k, ok)
                .input("s", s)
                .input("rel_err", errors[i]),
        );
    }
    for (i, &s) in s_list.iter().enumerate() {
        let ok = i == 0 || dists[i] < dists[i - 1];
        let prev = if i == 0 { dists[0] } else { dists[i - 1] };
        rows.push(CheckCase::new(format!("distance s={s}"), dists[i], prev, ok).input("s", s));
    }
    Ok(CheckReport::new("cell", rows, meta))
}

/// Seeded symmetric positive definite matrices of size 2 to 6; the minimax
/// value for `m <= 3` must equal the `m`-th eigenvalue within `1e-6`.
pub(crate) fn courant_suite(seed: u64, cases: usize) -> Result<CheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    for i in 0..cases {
        let d = 2 + i % 5;
        let m = (1 + i % 3).min(d);
        let b: Vec<Vec<f64>> = (0..d)
            .map(|_| (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        let mut q = DenseMatrix::zeros(d, d);
        for r in 0..d {
            for c in 0..d {
                q[(r, c)] = (0..d).map(|k| b[r][k] * b[c][k]).sum::<f64>();
            }
            q[(r, r)] += 0.1;
        }
        let exact = SymmetricEigen::new(&q)?.values[m - 1];
        let value = courant_minimax(&q, m, 8, rng.gen())?;
        let ok = (value - exact).abs() < 1e-6;
        rows.push(
            CheckCase::new(format!("case {i}"), value, exact, ok)
                .input("d", d as f64)
                .input("m", m as f64),
        );
    }
    Ok(CheckReport::new("courant", rows, Meta::default()))
}
