//! Variational solvers: first and second eigenvalues on the `L^p` sphere,
//! the dense spectral route for `p = 2`, the cell problem, dual norms and
//! the Courant minimax check.

mod cell;
mod courant;
mod dense;
mod descent;
mod string;

use serde::{Deserialize, Serialize};

use crate::energy::SeminormConfig;
use crate::grid::{DiscreteFunction, Grid1D};
use crate::{FracError, Real, Result};

pub use cell::{cell_problem, dual_norm_fractional, dual_norm_local};
pub use courant::courant_minimax;
pub use dense::{dense_eigen_p2, mass_matrix};
pub use descent::{first_eigen_fractional, first_eigen_fractional_from, local_eigen};
pub use string::second_eigen_fractional;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub max_iter: usize,
    /// Relative change of the Rayleigh quotient (or objective) at which an
    /// iteration stops.
    pub tol: f64,
    /// Backtracking factor.
    pub shrink: f64,
    /// Armijo sufficient-decrease constant.
    pub armijo: f64,
    pub seed: u64,
    /// Images on the string joining `u_1` and `-u_1`.
    pub path_points: usize,
    pub seminorm: SeminormConfig,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_iter: 5000,
            tol: 1e-9,
            shrink: 0.5,
            armijo: 1e-4,
            seed: 0,
            path_points: 33,
            seminorm: SeminormConfig::default(),
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(FracError::invalid(format!("tol must be positive, got {}", self.tol)));
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return Err(FracError::invalid(format!(
                "shrink must lie in (0, 1), got {}",
                self.shrink
            )));
        }
        if !(self.armijo > 0.0 && self.armijo < 0.5) {
            return Err(FracError::invalid(format!(
                "armijo must lie in (0, 1/2), got {}",
                self.armijo
            )));
        }
        if self.path_points < 9 || self.path_points % 2 == 0 {
            return Err(FracError::invalid(format!(
                "path_points must be odd and at least 9, got {}",
                self.path_points
            )));
        }
        if self.max_iter == 0 {
            return Err(FracError::invalid("max_iter must be positive"));
        }
        self.seminorm.validate()
    }
}

/// A variational eigenvalue with its `L^p`-normalized eigenfunction.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult<T> {
    pub lambda: T,
    pub eigenfunction: DiscreteFunction<T>,
    pub iterations: usize,
    /// Relative Rayleigh-quotient change at termination.
    pub residual: T,
    pub mode_index: usize,
    /// `None` for the local p-Laplacian.
    pub s: Option<T>,
    pub p: T,
    /// Rayleigh quotient after every accepted step.
    pub history: Vec<T>,
}

/// Serialized form of an [`EigenResult`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenRecord {
    pub lambda: f64,
    pub m: usize,
    pub s: Option<f64>,
    pub p: f64,
    pub n: usize,
    pub a: f64,
    pub b: f64,
    pub iterations: usize,
    pub residual: f64,
    pub values: Vec<f64>,
}

impl<T: Real> EigenResult<T> {
    pub fn to_record(&self) -> EigenRecord {
        let g = self.eigenfunction.grid;
        EigenRecord {
            lambda: self.lambda.as_f64(),
            m: self.mode_index,
            s: self.s.map(Real::as_f64),
            p: self.p.as_f64(),
            n: g.n,
            a: g.domain.a.as_f64(),
            b: g.domain.b.as_f64(),
            iterations: self.iterations,
            residual: self.residual.as_f64(),
            values: self.eigenfunction.values.iter().map(|v| v.as_f64()).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_record()).expect("record serializes");
        s.push('\n');
        s
    }
}

impl EigenRecord {
    pub fn into_result(self) -> Result<EigenResult<f64>> {
        let dom = crate::grid::IntervalDomain::new(self.a, self.b)?;
        let grid = Grid1D::new(dom, self.n);
        Ok(EigenResult {
            lambda: self.lambda,
            eigenfunction: DiscreteFunction::new(grid, self.values)?,
            iterations: self.iterations,
            residual: self.residual,
            mode_index: self.m,
            s: self.s,
            p: self.p,
            history: Vec::new(),
        })
    }
}

pub(crate) fn require_nodes<T: Real>(grid: &Grid1D<T>, min: usize) -> Result<()> {
    if grid.n < min {
        return Err(FracError::invalid(format!(
            "need at least {min} interior nodes, got {}",
            grid.n
        )));
    }
    Ok(())
}

/// Fixes the sign of a mode: the first entry that is not negligible is
/// made positive.
pub(crate) fn canonical_sign<T: Real>(v: &mut [T]) {
    let big = v.iter().map(|x| x.abs()).fold(T::zero(), T::max);
    if let Some(first) = v.iter().find(|x| x.abs() > T::lit(1e-3) * big) {
        if *first < T::zero() {
            for x in v.iter_mut() {
                *x = -*x;
            }
        }
    }
}

pub(crate) fn axpy<T: Real>(alpha: T, x: &[T], y: &[T]) -> Vec<T> {
    y.iter().zip(x).map(|(&b, &a)| b + alpha * a).collect()
}
