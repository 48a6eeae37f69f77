//! Preconditioned projected gradient descent of the Rayleigh quotient
//! `E(u) / ||u||_p^p` on the `L^p` unit sphere.

use crate::energy::{EnergyKind, FractionalEnergy};
use crate::functional::{Functional, Preconditioner};
use crate::grid::{DiscreteFunction, FracParams, Grid1D, LocalEnergy, LpPower};
use crate::linalg::dot;
use crate::{FracError, Real, Result};

use super::{axpy, require_nodes, EigenResult, SolverConfig};

const REL_SHIFT: f64 = 1e-10;

pub(crate) struct Descent<T> {
    pub lambda: T,
    pub u: Vec<T>,
    pub iterations: usize,
    pub residual: T,
    pub history: Vec<T>,
}

/// Scales `u` onto the unit sphere of `norm`.
pub(crate) fn project<T: Real>(norm: &LpPower<T>, u: &[T]) -> Option<Vec<T>> {
    let nv = norm.value(u);
    if !(nv > T::zero()) || !nv.is_finite() {
        return None;
    }
    let c = nv.powf(-T::one() / norm.p);
    Some(u.iter().map(|&x| x * c).collect())
}

/// `grad E - lambda grad N` at a point of the sphere.
pub(crate) fn sphere_gradient<T: Real, F: Functional<T>>(
    energy: &F,
    norm: &LpPower<T>,
    u: &[T],
) -> (T, Vec<T>) {
    let n = u.len();
    let mut ge = vec![T::zero(); n];
    let mut gn = vec![T::zero(); n];
    let e = energy.value_grad(u, &mut ge);
    let nv = norm.value_grad(u, &mut gn);
    let lambda = e / nv;
    let g = ge.iter().zip(&gn).map(|(&a, &b)| (a - lambda * b) / nv).collect();
    (lambda, g)
}

pub(crate) fn rayleigh_descent<T: Real, F: Functional<T>>(
    energy: &F,
    norm: &LpPower<T>,
    u0: &[T],
    cfg: &SolverConfig,
) -> Result<Descent<T>> {
    let p = norm.p;
    let tol = T::lit(cfg.tol);
    let shrink = T::lit(cfg.shrink);
    let armijo = T::lit(cfg.armijo);
    let mut u = project(norm, u0)
        .ok_or_else(|| FracError::Degenerate("initial guess is zero".into()))?;
    let (mut lambda, mut g) = sphere_gradient(energy, norm, &u);
    let mut precond: Preconditioner<T> = energy.hessian(&u).factor(T::lit(REL_SHIFT))?;
    let constant = energy.hessian_is_constant();
    let mut history = vec![lambda];
    let mut residual = T::infinity();
    let mut backtracked = false;

    for it in 1..=cfg.max_iter {
        if !constant && (it <= 5 || it % 5 == 0 || backtracked) && it > 1 {
            precond = energy.hessian(&u).factor(T::lit(REL_SHIFT))?;
        }
        let mut d: Vec<T> = precond.apply_inverse(&g).into_iter().map(|x| -x).collect();
        let mut slope = dot(&g, &d);
        if !(slope < T::zero()) {
            d = g.iter().map(|&x| -x).collect();
            slope = -dot(&g, &g);
        }
        let alpha0 = p - T::one();
        let mut alpha = alpha0;
        let mut accepted = None;
        for _ in 0..60 {
            if let Some(v) = project(norm, &axpy(alpha, &d, &u)) {
                let lv = energy.value(&v);
                if lv <= lambda + armijo * alpha * slope {
                    accepted = Some((v, lv));
                    break;
                }
            }
            alpha = alpha * shrink;
        }
        backtracked = alpha < alpha0;
        let Some((v, lv)) = accepted else {
            // No decrease is measurable any more: rounding floor.
            if -slope * alpha0 <= T::lit(1e-12) * lambda.abs() {
                return Ok(Descent {
                    lambda,
                    u,
                    iterations: it,
                    residual: residual.min(-slope * alpha0 / lambda.abs()),
                    history,
                });
            }
            return Err(convergence(it, lambda, residual, &u));
        };
        residual = (lambda - lv).abs() / lv.abs();
        u = v;
        let (l, gg) = sphere_gradient(energy, norm, &u);
        lambda = l;
        g = gg;
        history.push(lambda);
        if residual < tol {
            return Ok(Descent {
                lambda,
                u,
                iterations: it,
                residual,
                history,
            });
        }
    }
    Err(convergence(cfg.max_iter, lambda, residual, &u))
}

pub(crate) fn convergence<T: Real>(iterations: usize, value: T, residual: T, u: &[T]) -> FracError {
    FracError::Convergence {
        iterations,
        last_value: value.as_f64(),
        residual: residual.as_f64(),
        last_iterate: u.iter().map(|x| x.as_f64()).collect(),
    }
}

fn into_result<T: Real>(
    grid: &Grid1D<T>,
    mut d: Descent<T>,
    m: usize,
    s: Option<T>,
    p: T,
) -> EigenResult<T> {
    if m == 1 && d.u.iter().copied().sum::<T>() < T::zero() {
        for x in d.u.iter_mut() {
            *x = -*x;
        }
    }
    EigenResult {
        lambda: d.lambda,
        eigenfunction: DiscreteFunction {
            grid: *grid,
            values: d.u,
        },
        iterations: d.iterations,
        residual: d.residual,
        mode_index: m,
        s,
        p,
        history: d.history,
    }
}

/// First eigenvalue with an explicit starting point.
pub fn first_eigen_fractional_from<T: Real>(
    grid: &Grid1D<T>,
    fp: FracParams<T>,
    u0: &[T],
    cfg: &SolverConfig,
) -> Result<EigenResult<T>> {
    cfg.validate()?;
    fp.require_1d()?;
    require_nodes(grid, 2)?;
    if u0.len() != grid.n {
        return Err(FracError::invalid("initial guess has the wrong length"));
    }
    let energy = FractionalEnergy::new(grid, &fp, &cfg.seminorm, EnergyKind::Full)?;
    let norm = LpPower { grid: *grid, p: fp.p };
    let d = rayleigh_descent(&energy, &norm, u0, cfg)?;
    Ok(into_result(grid, d, 1, Some(fp.s), fp.p))
}

/// `lambda^s_{1,p}` of the interval, started from the hat function.
pub fn first_eigen_fractional<T: Real>(
    grid: &Grid1D<T>,
    fp: FracParams<T>,
    cfg: &SolverConfig,
) -> Result<EigenResult<T>> {
    let hat = DiscreteFunction::hat(*grid);
    first_eigen_fractional_from(grid, fp, &hat.values, cfg)
}

/// `lambda^1_{m,p}` of the interval for the local p-Laplacian, `m` in {1, 2}.
pub fn local_eigen<T: Real>(
    grid: &Grid1D<T>,
    p: T,
    m: usize,
    cfg: &SolverConfig,
) -> Result<EigenResult<T>> {
    cfg.validate()?;
    require_nodes(grid, 2)?;
    if !(p > T::one()) {
        return Err(FracError::invalid(format!("p must exceed 1, got {p}")));
    }
    let energy = LocalEnergy { grid: *grid, p };
    let norm = LpPower { grid: *grid, p };
    let hat = DiscreteFunction::hat(*grid);
    let d = rayleigh_descent(&energy, &norm, &hat.values, cfg)?;
    let first = into_result(grid, d, 1, None, p);
    match m {
        1 => Ok(first),
        2 => {
            let (lambda, u, iterations, residual, history) =
                super::string::mountain_pass(&energy, &norm, grid, &first.eigenfunction.values, cfg)?;
            Ok(EigenResult {
                lambda,
                eigenfunction: DiscreteFunction { grid: *grid, values: u },
                iterations,
                residual,
                mode_index: 2,
                s: None,
                p,
                history,
            })
        }
        _ => Err(FracError::invalid(format!(
            "local eigenvalues are available for m = 1, 2, got m = {m}"
        ))),
    }
}
