//! Mountain-pass level between `u_1` and `-u_1` by the string method on the
//! `L^p` sphere.
//!
//! Interior images take preconditioned descent steps with the path tangent
//! removed in the preconditioner inner product; the path is then
//! redistributed uniformly in `L^2` arclength. The energy, the sphere and the
//! initial path are invariant under `u -> -u(a + b - x)` combined with
//! reversing the path, so the middle image stays on the symmetric slice
//! where the saddle lives.

use crate::energy::{EnergyKind, FractionalEnergy};
use crate::functional::Functional;
use crate::grid::{mass_inner, DiscreteFunction, FracParams, Grid1D, LpPower};
use crate::linalg::dot;
use crate::{FracError, Real, Result};

use super::descent::{convergence, project, sphere_gradient};
use super::{axpy, require_nodes, EigenResult, SolverConfig};

type Path<T> = (T, Vec<T>, usize, T, Vec<T>);

/// Returns `(level, saddle image, sweeps, residual, level history)`.
pub(crate) fn mountain_pass<T: Real, F: Functional<T>>(
    energy: &F,
    norm: &LpPower<T>,
    grid: &Grid1D<T>,
    u1: &[T],
    cfg: &SolverConfig,
) -> Result<Path<T>> {
    let m = cfg.path_points;
    let p = norm.p;
    let h = grid.h;
    let tol = T::lit(cfg.tol);
    let shrink = T::lit(cfg.shrink);
    let armijo = T::lit(cfg.armijo);

    let u1 = project(norm, u1).ok_or_else(|| FracError::Degenerate("u1 is zero".into()))?;
    let neg: Vec<T> = u1.iter().map(|&x| -x).collect();

    // transverse direction: one full sine period, L^2-orthogonal to u1
    let (a, len) = (grid.domain.a, grid.domain.diam());
    let mut w: Vec<T> = grid
        .nodes()
        .iter()
        .map(|&x| (T::lit(2.0) * T::PI() * (x - a) / len).sin())
        .collect();
    let c = mass_inner(h, &w, &u1) / mass_inner(h, &u1, &u1);
    for (wi, &ui) in w.iter_mut().zip(&u1) {
        *wi = *wi - c * ui;
    }
    let w = project(norm, &w)
        .ok_or_else(|| FracError::DegeneratePath("no direction transverse to u1".into()))?;

    let mut images: Vec<Vec<T>> = (0..m)
        .map(|k| {
            if k == 0 {
                return u1.clone();
            }
            if k == m - 1 {
                return neg.clone();
            }
            let theta = T::PI() * T::from_usize_lossy(k) / T::from_usize_lossy(m - 1);
            let (sn, cs) = theta.sin_cos();
            let v: Vec<T> = u1.iter().zip(&w).map(|(&x, &y)| cs * x + sn * y).collect();
            project(norm, &v).expect("initial path avoids zero")
        })
        .collect();

    let hess = energy.hessian(&u1);
    let precond = hess.factor(T::lit(1e-10))?;
    let constant = energy.hessian_is_constant();
    let alpha0 = p - T::one();
    let mut steps = vec![alpha0; m];

    let mut level = T::infinity();
    let mut residual = T::infinity();
    let mut history = Vec::new();
    let mut calm = 0;
    for sweep in 1..=cfg.max_iter {
        // Jacobi sweep: every image moves against the old path, which keeps
        // the path symmetric
        let old = images.clone();
        for k in 1..m - 1 {
            let tau: Vec<T> = old[k + 1]
                .iter()
                .zip(&old[k - 1])
                .map(|(&x, &y)| x - y)
                .collect();
            let u = &old[k];
            let (lam, g) = sphere_gradient(energy, norm, u);
            let local;
            let (hess, precond) = if constant {
                (&hess, &precond)
            } else {
                let hk = energy.hessian(u);
                let pk = hk.factor(T::lit(1e-10))?;
                local = (hk, pk);
                (&local.0, &local.1)
            };
            let mut d: Vec<T> = precond.apply_inverse(&g).into_iter().map(|x| -x).collect();
            let ptau = hess.apply(&tau);
            let tpt = dot(&tau, &ptau);
            if tpt > T::zero() {
                let c = dot(&d, &ptau) / tpt;
                for (di, &ti) in d.iter_mut().zip(&tau) {
                    *di = *di - c * ti;
                }
            }
            let slope = dot(&g, &d);
            if !(slope < T::zero()) {
                continue;
            }
            // start from twice the last accepted step, capped at the
            // inverse-iteration step
            let mut alpha = (steps[k] / shrink).min(alpha0);
            for _ in 0..60 {
                if let Some(v) = project(norm, &axpy(alpha, &d, u)) {
                    let lv = energy.value(&v);
                    if lv <= lam + armijo * alpha * slope {
                        images[k] = v;
                        steps[k] = alpha;
                        break;
                    }
                }
                alpha = alpha * shrink;
            }
        }
        symmetrize(&mut images);
        reparametrize(norm, h, &mut images)?;

        let energies: Vec<T> = images.iter().map(|u| energy.value(u)).collect();
        let top = energies.iter().copied().fold(T::neg_infinity(), T::max);
        residual = (top - level).abs() / top.abs();
        level = top;
        history.push(level);
        calm = if residual < tol { calm + 1 } else { 0 };
        if calm >= 2 {
            let k = argmax(&energies);
            return Ok((level, images[k].clone(), sweep, residual, history));
        }
    }
    let k = argmax(&images.iter().map(|u| energy.value(u)).collect::<Vec<_>>());
    Err(convergence(cfg.max_iter, level, residual, &images[k]))
}

/// Averages each image with the reflection `-u(a + b - x)` of its mirror
/// image, removing rounding drift away from the symmetric path.
fn symmetrize<T: Real>(images: &mut [Vec<T>]) {
    let m = images.len();
    let half = T::lit(0.5);
    for k in 0..m / 2 + 1 {
        let j = m - 1 - k;
        let n = images[k].len();
        let a: Vec<T> = (0..n)
            .map(|i| half * (images[k][i] - images[j][n - 1 - i]))
            .collect();
        let b: Vec<T> = (0..n).map(|i| -a[n - 1 - i]).collect();
        images[k] = a;
        images[j] = b;
    }
}

fn argmax<T: Real>(v: &[T]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}

/// Redistributes the interior images uniformly in `L^2` arclength.
fn reparametrize<T: Real>(norm: &LpPower<T>, h: T, images: &mut [Vec<T>]) -> Result<()> {
    let m = images.len();
    let mut arc = vec![T::zero(); m];
    for k in 1..m {
        let diff: Vec<T> = images[k]
            .iter()
            .zip(&images[k - 1])
            .map(|(&x, &y)| x - y)
            .collect();
        let dist = mass_inner(h, &diff, &diff).max(T::zero()).sqrt();
        if !(dist > T::lit(1e-12)) {
            return Err(FracError::DegeneratePath(format!(
                "images {} and {k} coincide (distance {})",
                k - 1,
                dist
            )));
        }
        arc[k] = arc[k - 1] + dist;
    }
    let total = arc[m - 1];
    let old = images.to_vec();
    let mut seg = 0;
    for j in 1..m - 1 {
        let target = total * T::from_usize_lossy(j) / T::from_usize_lossy(m - 1);
        while seg + 1 < m - 1 && arc[seg + 1] < target {
            seg += 1;
        }
        let t = (target - arc[seg]) / (arc[seg + 1] - arc[seg]);
        let v: Vec<T> = old[seg]
            .iter()
            .zip(&old[seg + 1])
            .map(|(&x, &y)| x + t * (y - x))
            .collect();
        images[j] = project(norm, &v)
            .ok_or_else(|| FracError::DegeneratePath("path passes through zero".into()))?;
    }
    Ok(())
}

/// `lambda^s_{2,p}` as the mountain-pass level over paths from `u1` to `-u1`.
pub fn second_eigen_fractional<T: Real>(
    grid: &Grid1D<T>,
    fp: FracParams<T>,
    u1: &EigenResult<T>,
    cfg: &SolverConfig,
) -> Result<EigenResult<T>> {
    cfg.validate()?;
    fp.require_1d()?;
    require_nodes(grid, 3)?;
    if !u1.eigenfunction.grid.same_as(grid) {
        return Err(FracError::invalid("u1 lives on a different grid"));
    }
    let energy = FractionalEnergy::new(grid, &fp, &cfg.seminorm, EnergyKind::Full)?;
    let norm = LpPower { grid: *grid, p: fp.p };
    let (lambda, u, iterations, residual, history) =
        mountain_pass(&energy, &norm, grid, &u1.eigenfunction.values, cfg)?;
    Ok(EigenResult {
        lambda,
        eigenfunction: DiscreteFunction { grid: *grid, values: u },
        iterations,
        residual,
        mode_index: 2,
        s: Some(fp.s),
        p: fp.p,
        history,
    })
}
