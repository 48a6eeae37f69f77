//! Functional inequalities evaluated on seeded random test functions.
//!
//! Where the constant is explicit the inequality itself is asserted. Where
//! it is not, each case records a ratio and the suites in `suites.rs` assert
//! that the ratio stays bounded across an `s`-sweep.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::constants::{hardy_constants, sobolev_bound, sobolev_exponent};
use crate::energy::{gagliardo_full, gagliardo_interior, SeminormConfig};
use crate::grid::{abs_pow, linf_norm, local_gradient_norm, lp_norm, FracParams};
use crate::quadrature::GaussRule;
use crate::{Eigen, FracError, Function, Grid, Params, Result};

use super::{random_bumps, ratio, CheckCase, CheckReport, Meta};

/// Relative tolerance for the dilation checks.
const DILATION_TOL: f64 = 1e-6;
/// Discretization slack of the Hardy check.
const HARDY_SLACK: f64 = 1e-3;

fn samples_for(n: usize, count: usize, seed: u64) -> Vec<Function> {
    let grid = Grid::unit(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_bumps(&grid, &mut rng)).collect()
}

fn seminorm(u: &Function, s: f64, p: f64, cfg: SeminormConfig) -> Result<f64> {
    gagliardo_full(u, FracParams { s, p, dim: 1 }, cfg)
}

fn meta(fp: Params, n: usize, seed: u64) -> Meta {
    Meta {
        p: Some(fp.p),
        n: Some(n),
        a: Some(0.0),
        b: Some(1.0),
        seed: Some(seed),
        ..Meta::default()
    }
    .with("s", fp.s)
}

fn positive(r: f64) -> bool {
    r.is_finite() && r > 0.0
}

fn dilation_case(label: String, scaled: f64, base: f64, factor: f64) -> CheckCase {
    let ok = (ratio(scaled, base) - 1.0).abs() < DILATION_TOL;
    CheckCase::new(label, scaled, base, ok).input("dilation", factor)
}

/// Exponents `(alpha, theta)` of the interpolation inequality; `r = None`
/// stands for `r = infinity`.
pub fn interpolation_exponents(p: f64, q: f64, t: f64, r: Option<f64>) -> (f64, f64) {
    match r {
        Some(r) => (t * p / q * (r - q) / (r - p), r / (r - p) * (q - p) / q),
        None => (t * p / q, (q - p) / q),
    }
}

/// Ratio of `s^{1/q} [u]_{W^{s,q}}` to the right-hand side of the
/// interpolation inequality without its constant. With `t = 1` the
/// `W^{t,p}` factor is replaced by `||u'||_p`.
fn interpolation_ratio(
    u: &Function,
    fp: Params,
    t: f64,
    q: f64,
    r: Option<f64>,
    cfg: SeminormConfig,
) -> Result<f64> {
    let (s, p) = (fp.s, fp.p);
    let (alpha, theta) = interpolation_exponents(p, q, t, r);
    let lhs = s.powf(1.0 / q) * seminorm(u, s, q, cfg)?.powf(1.0 / q);
    let top = if t < 1.0 {
        (1.0 - t).powf(1.0 / p) * seminorm(u, t, p, cfg)?.powf(1.0 / p)
    } else {
        local_gradient_norm(u, p)
    };
    let lr = match r {
        Some(r) => lp_norm(u, r)?,
        None => linf_norm(u),
    };
    let rhs = (alpha / (alpha - s)).powf(1.0 / q)
        * lp_norm(u, p)?.powf((1.0 - theta) * (1.0 - s / alpha))
        * lr.powf(theta)
        * top.powf(s / alpha * (1.0 - theta));
    Ok(lhs / rhs)
}

pub fn check_interpolation(
    fp: Params,
    t: f64,
    q: f64,
    r: Option<f64>,
    samples: usize,
    seed: u64,
    n: usize,
) -> Result<CheckReport> {
    let (s, p) = (fp.s, fp.p);
    if !(t > 0.0 && t <= 1.0) {
        return Err(FracError::InvalidInput(format!("t must lie in (0, 1], got {t}")));
    }
    if !(p <= q && r.map_or(true, |r| q < r)) {
        return Err(FracError::Regime(format!(
            "need p <= q < r, got p = {p}, q = {q}, r = {r:?}"
        )));
    }
    let (alpha, theta) = interpolation_exponents(p, q, t, r);
    if !(s > 0.0 && s < alpha) {
        return Err(FracError::Regime(format!("need 0 < s < alpha = {alpha}, got s = {s}")));
    }
    let cfg = SeminormConfig::default();
    let funcs = samples_for(n, samples, seed);
    let cases: Vec<Vec<CheckCase>> = funcs
        .par_iter()
        .enumerate()
        .map(|(i, u)| -> Result<Vec<CheckCase>> {
            let base = interpolation_ratio(u, fp, t, q, r, cfg)?;
            let mut out = vec![CheckCase::new(format!("sample {i}"), base, 1.0, positive(base))];
            for factor in [0.5, 2.0] {
                let scaled = interpolation_ratio(&u.dilate(factor), fp, t, q, r, cfg)?;
                out.push(dilation_case(format!("sample {i} dilated"), scaled, base, factor));
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let meta = meta(fp, n, seed)
        .with("t", t)
        .with("q", q)
        .with("r", r.map_or("inf".to_string(), |r| r.to_string()))
        .with("alpha", alpha)
        .with("theta", theta);
    Ok(CheckReport::new("interpolation", cases.concat(), meta))
}

/// The two Poincaré inequalities: against the seminorm on the whole line,
/// and (for `sp > 1` on an interval) against the seminorm on the interval
/// with the `(sp - 1)^p` compensation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoincareVariant {
    Full,
    Convex,
}

fn poincare_ratio(u: &Function, fp: Params, variant: PoincareVariant, cfg: SeminormConfig) -> Result<f64> {
    let (s, p) = (fp.s, fp.p);
    let diam = u.grid.domain.diam();
    let mass = lp_norm(u, p)?.powf(p);
    let scale = diam.powf(s * p) * (1.0 - s);
    Ok(match variant {
        PoincareVariant::Full => mass / (scale * gagliardo_full(u, fp, cfg)?),
        PoincareVariant::Convex => {
            mass * (s * p - 1.0).powf(p) / (scale * gagliardo_interior(u, fp, cfg)?)
        }
    })
}

pub fn check_poincare(
    fp: Params,
    variant: PoincareVariant,
    samples: usize,
    seed: u64,
    n: usize,
) -> Result<CheckReport> {
    if variant == PoincareVariant::Convex {
        fp.require_sp_above_one()?;
    }
    let cfg = SeminormConfig::default();
    let mut funcs = samples_for(n, samples, seed);
    funcs.push(Function::hat(Grid::unit(n)));
    let cases: Vec<Vec<CheckCase>> = funcs
        .par_iter()
        .enumerate()
        .map(|(i, u)| -> Result<Vec<CheckCase>> {
            let label = if i == samples { "hat".to_string() } else { format!("sample {i}") };
            let base = poincare_ratio(u, fp, variant, cfg)?;
            let scaled = poincare_ratio(&u.dilate(2.0), fp, variant, cfg)?;
            Ok(vec![
                CheckCase::new(label.clone(), base, 1.0, positive(base)),
                dilation_case(format!("{label} dilated"), scaled, base, 2.0),
            ])
        })
        .collect::<Result<_>>()?;
    let name = match variant {
        PoincareVariant::Full => "poincare",
        PoincareVariant::Convex => "poincare-convex",
    };
    Ok(CheckReport::new(name, cases.concat(), meta(fp, n, seed)))
}

/// `int_Omega |u|^p / delta^{sp}` for the piecewise-linear interpolant. The
/// boundary cells are integrated in closed form, the others by Gauss rules
/// split at the kinks of `|u|^p` and of `delta`.
pub fn hardy_weighted_integral(u: &Function, p: f64, sp: f64) -> Result<f64> {
    if !(p - sp > 0.0) {
        return Err(FracError::Regime(format!(
            "the weighted integral needs sp < p, got sp = {sp}, p = {p}"
        )));
    }
    let g = u.grid;
    let v = u.full_values();
    let h = g.h;
    let dom = g.domain;
    let mid = 0.5 * (dom.a + dom.b);
    let rule = GaussRule::<f64>::new(16);
    let edge = |x: f64| abs_pow(x, p) * h.powf(1.0 - sp) / (p + 1.0 - sp);
    let mut total = edge(v[1]) + edge(v[g.n]);
    for c in 1..g.n {
        let (x0, x1) = (g.node(c), g.node(c + 1));
        let (v0, v1) = (v[c], v[c + 1]);
        let f = |x: f64| {
            let w = v0 + (v1 - v0) * (x - x0) / h;
            abs_pow(w, p) * dom.delta(x).powf(-sp)
        };
        let mut cuts = vec![x0];
        if v0 * v1 < 0.0 {
            cuts.push(x0 + h * v0 / (v0 - v1));
        }
        if mid > x0 && mid < x1 {
            cuts.push(mid);
        }
        cuts.push(x1);
        cuts.sort_by(|a, b| a.total_cmp(b));
        total += cuts.windows(2).map(|w| rule.integrate(w[0], w[1], f)).sum::<f64>();
    }
    Ok(total)
}

/// Hardy inequality on the interval with the sharp constant,
/// `D int |u|^p / delta^{sp} <= [u]^p_{W^{s,p}(Omega)}`, and the displayed
/// weaker form `((sp - 1)/p)^p C int |u|^p / delta^{sp} <= (1 - s) [u]^p`.
pub fn check_hardy(fp: Params, samples: usize, seed: u64, n: usize) -> Result<CheckReport> {
    fp.require_sp_above_one()?;
    let hc = hardy_constants(fp)?;
    let (s, p) = (fp.s, fp.p);
    let weak = ((s * p - 1.0) / p).powf(p) * hc.c_np;
    let cfg = SeminormConfig::default();
    let funcs = samples_for(n, samples, seed);
    let cases: Vec<CheckCase> = funcs
        .par_iter()
        .enumerate()
        .map(|(i, u)| -> Result<CheckCase> {
            let w = hardy_weighted_integral(u, p, s * p)?;
            let e = gagliardo_interior(u, fp, cfg)?;
            let (lhs, rhs) = (hc.d_sharp * w, e);
            let (wl, wr) = (weak * w, (1.0 - s) * e);
            let ok = lhs <= rhs * (1.0 + HARDY_SLACK) && wl <= wr * (1.0 + HARDY_SLACK);
            Ok(CheckCase::new(format!("sample {i}"), lhs, rhs, ok)
                .input("displayed_lhs", wl)
                .input("displayed_rhs", wr))
        })
        .collect::<Result<_>>()?;
    let meta = meta(fp, n, seed)
        .with("d_sharp", hc.d_sharp)
        .with("c_np", hc.c_np)
        .with("slack", HARDY_SLACK);
    Ok(CheckReport::new("hardy", cases, meta))
}

/// `d_sharp >= c_lower` on the lattice `N in {1, 2}`, `p in {1.5, 2, 3}`,
/// `s in {0.6, 0.75, 0.9}` restricted to `sp > 1`.
pub fn check_stima() -> Result<CheckReport> {
    let mut rows = Vec::new();
    for dim in [1, 2] {
        for p in [1.5, 2.0, 3.0] {
            for s in [0.6, 0.75, 0.9] {
                if s * p <= 1.0 {
                    continue;
                }
                let hc = hardy_constants(FracParams::<f64>::new(s, p, dim)?)?;
                let ok = hc.d_sharp >= hc.c_lower && hc.c_lower > 0.0 && hc.d_sharp.is_finite();
                rows.push(
                    CheckCase::new(format!("N={dim} p={p} s={s}"), hc.c_lower, hc.d_sharp, ok)
                        .input("N", dim as f64)
                        .input("p", p)
                        .input("s", s),
                );
            }
        }
    }
    Ok(CheckReport::new("stima", rows, Meta::default()))
}

/// Bounds for an eigenfunction: for `sp > 1` the Hölder quotient of
/// exponent `s - 1/p` and the sup bound, both against
/// `((1 - s) lambda)^{1/p} ||u||_p`; for `sp < 1` the sup bound against
/// `(s (1 - s) lambda)^{1/(s p^2)} ||u||_p`.
pub fn check_linfty(eig: &Eigen, fp: Params) -> Result<CheckReport> {
    fp.require_1d()?;
    let (s, p) = (fp.s, fp.p);
    let sp = s * p;
    if (sp - 1.0).abs() < 1e-12 {
        return Err(FracError::Regime("sp = N is excluded".into()));
    }
    let u = &eig.eigenfunction;
    let g = u.grid;
    let lam = eig.lambda;
    let lp = lp_norm(u, p)?;
    let sup = linf_norm(u);
    let mut rows = Vec::new();
    if sp > 1.0 {
        let beta = s - 1.0 / p;
        let v = u.full_values();
        let x: Vec<f64> = (0..v.len()).map(|i| g.node(i)).collect();
        let mut holder: f64 = 0.0;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                holder = holder.max((v[i] - v[j]).abs() / (x[j] - x[i]).powf(beta));
            }
        }
        let scale = ((1.0 - s) * lam).powf(1.0 / p) * lp;
        let r1 = ratio(holder, scale);
        let bound = scale * g.domain.diam().powf(beta);
        let r2 = ratio(sup, bound);
        rows.push(CheckCase::new("holder", holder, scale, positive(r1)).input("s", s));
        rows.push(CheckCase::new("sup", sup, bound, positive(r2)).input("s", s));
    } else {
        let bound = (s * (1.0 - s) * lam).powf(1.0 / (sp * p)) * lp;
        let r = ratio(sup, bound);
        rows.push(CheckCase::new("sup", sup, bound, positive(r)).input("s", s));
    }
    let meta = Meta {
        p: Some(p),
        m: Some(eig.mode_index),
        n: Some(g.n),
        a: Some(g.domain.a),
        b: Some(g.domain.b),
        ..Meta::default()
    }
    .with("s", s)
    .with("lambda", lam);
    Ok(CheckReport::new("linfty", rows, meta))
}

/// `||u||^p_{L^{p*}} / (s (1 - s) [u]^p_{W^{s,p}(R)})` for `sp < 1`.
pub fn check_sobolev(fp: Params, samples: usize, seed: u64, n: usize) -> Result<CheckReport> {
    let bound = sobolev_bound(fp)?;
    let pstar = sobolev_exponent(fp)?;
    let p = fp.p;
    let cfg = SeminormConfig::default();
    let funcs = samples_for(n, samples, seed);
    let cases: Vec<CheckCase> = funcs
        .par_iter()
        .enumerate()
        .map(|(i, u)| -> Result<CheckCase> {
            let lhs = lp_norm(u, pstar)?.powf(p);
            let rhs = bound * gagliardo_full(u, fp, cfg)?;
            Ok(CheckCase::new(format!("sample {i}"), lhs, rhs, positive(ratio(lhs, rhs))))
        })
        .collect::<Result<_>>()?;
    Ok(CheckReport::new("sobolev", cases, meta(fp, n, seed).with("p_star", pstar)))
}
