//! Convex minimizations: the cell problem on `Q = (-1/2, 1/2)` and the dual
//! norms of a load `F`.

use crate::energy::{EnergyKind, FractionalEnergy};
use crate::functional::Functional;
use crate::grid::{mass_inner, DiscreteFunction, FracParams, Grid1D, IntervalDomain, LocalEnergy};
use crate::linalg::dot;
use crate::{FracError, Real, Result};

use super::descent::convergence;
use super::{axpy, SolverConfig};

/// Minimizes `c E(u) - <b, u>` by Hessian-preconditioned descent with
/// backtracking. Returns the minimum, the minimizer and the iteration count.
fn minimize_convex<T: Real, F: Functional<T>>(
    energy: &F,
    c: T,
    b: &[T],
    u0: Vec<T>,
    cfg: &SolverConfig,
) -> Result<(T, Vec<T>, usize)> {
    let n = u0.len();
    let objective = |u: &[T]| c * energy.value(u) - dot(b, u);
    let shrink = T::lit(cfg.shrink);
    let armijo = T::lit(cfg.armijo);
    let tol = T::lit(cfg.tol);
    let mut u = u0;
    let mut grad = vec![T::zero(); n];
    let mut value = T::zero();
    let mut precond = energy.hessian(&u).factor(T::lit(1e-12))?;
    for it in 1..=cfg.max_iter {
        let e = energy.value_grad(&u, &mut grad);
        value = c * e - dot(b, &u);
        let g: Vec<T> = grad.iter().zip(b).map(|(&x, &y)| c * x - y).collect();
        if it > 1 && !energy.hessian_is_constant() {
            precond = energy.hessian(&u).factor(T::lit(1e-12))?;
        }
        let mut d: Vec<T> = precond
            .apply_inverse(&g)
            .into_iter()
            .map(|x| -x / c)
            .collect();
        let mut slope = dot(&g, &d);
        if !(slope < T::zero()) {
            d = g.iter().map(|&x| -x).collect();
            slope = -dot(&g, &g);
        }
        if slope == T::zero() {
            return Ok((value, u, it));
        }
        let mut alpha = T::one();
        let mut next = None;
        for _ in 0..60 {
            let v = axpy(alpha, &d, &u);
            let fv = objective(&v);
            if fv <= value + armijo * alpha * slope {
                next = Some((v, fv));
                break;
            }
            alpha = alpha * shrink;
        }
        let Some((v, fv)) = next else {
            // rounding floor
            if -slope <= T::lit(1e-12) * value.abs().max(T::min_positive_value()) {
                return Ok((value, u, it));
            }
            return Err(convergence(it, value, -slope, &u));
        };
        let change = (value - fv).abs();
        u = v;
        let scale = fv.abs().max(T::min_positive_value());
        if change <= tol * scale || fv == T::zero() {
            return Ok((fv, u, it));
        }
    }
    Err(convergence(cfg.max_iter, value, T::nan(), &u))
}

/// Cell problem on `Q = (-1/2, 1/2)`: minimizes the interior energy over
/// `v = a x + w` with `w` vanishing at and outside the endpoints. Returns
/// `(1 - s) [v_s]^p_{W^{s,p}(Q)}` and the minimizer `v_s`.
pub fn cell_problem<T: Real>(
    fp: FracParams<T>,
    n: usize,
    a_sign: i32,
    cfg: &SolverConfig,
) -> Result<(T, DiscreteFunction<T>)> {
    cfg.validate()?;
    fp.require_1d()?;
    fp.require_sp_above_one()?;
    if a_sign != 1 && a_sign != -1 {
        return Err(FracError::invalid(format!("a_sign must be +1 or -1, got {a_sign}")));
    }
    if n < 1 {
        return Err(FracError::invalid("need at least one interior node"));
    }
    let a = if a_sign > 0 { T::one() } else { -T::one() };
    let half = T::lit(0.5);
    let grid = Grid1D::new(IntervalDomain::new(-half, half)?, n);
    let energy = FractionalEnergy::pinned(&grid, &fp, &cfg.seminorm, -a * half, a * half)?;
    let u0: Vec<T> = grid.nodes().iter().map(|&x| a * x).collect();
    let zero = vec![T::zero(); n];
    let (value, u, _) = minimize_convex(&energy, T::one(), &zero, u0, cfg)?;
    Ok(((T::one() - fp.s) * value, DiscreteFunction { grid, values: u }))
}

fn load_vector<T: Real>(f: &DiscreteFunction<T>) -> Vec<T> {
    // <F, u> = b^T u with b = M F
    let n = f.values.len();
    (0..n)
        .map(|i| {
            let mut e = vec![T::zero(); n];
            e[i] = T::one();
            mass_inner(f.grid.h, &f.values, &e)
        })
        .collect()
}

fn dual_from_minimum<T: Real>(min: T, p: T) -> T {
    let pc = p / (p - T::one());
    let m = (-pc * min).max(T::zero());
    p.powf(T::one() / p) * m.powf(T::one() / pc)
}

/// `||F||_{W^{-s,p'}} / (1 - s)^{1/p}`.
pub fn dual_norm_fractional<T: Real>(
    f: &DiscreteFunction<T>,
    fp: FracParams<T>,
    cfg: &SolverConfig,
) -> Result<T> {
    cfg.validate()?;
    fp.require_1d()?;
    if f.values.iter().all(|&x| x == T::zero()) {
        return Ok(T::zero());
    }
    let energy = FractionalEnergy::new(&f.grid, &fp, &cfg.seminorm, EnergyKind::Full)?;
    let b = load_vector(f);
    let zero = vec![T::zero(); b.len()];
    let (min, _, _) = minimize_convex(&energy, T::one() - fp.s, &b, zero, cfg)?;
    Ok(dual_from_minimum(min, fp.p))
}

/// `||F||_{W^{-1,p'}}` for the local energy `||u'||_p^p`.
pub fn dual_norm_local<T: Real>(f: &DiscreteFunction<T>, p: T, cfg: &SolverConfig) -> Result<T> {
    cfg.validate()?;
    if !(p > T::one()) {
        return Err(FracError::invalid(format!("p must exceed 1, got {p}")));
    }
    if f.values.iter().all(|&x| x == T::zero()) {
        return Ok(T::zero());
    }
    let energy = LocalEnergy { grid: f.grid, p };
    let b = load_vector(f);
    let zero = vec![T::zero(); b.len()];
    let (min, _, _) = minimize_convex(&energy, T::one(), &b, zero, cfg)?;
    Ok(dual_from_minimum(min, p))
}
