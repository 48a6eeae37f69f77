//! Spectral route for `p = 2`: the pencil `A v = lambda M v` of the
//! Gagliardo stiffness matrix and the piecewise-linear mass matrix.

use crate::energy::{stiffness_matrix, SeminormConfig};
use crate::grid::{DiscreteFunction, FracParams, Grid1D};
use crate::linalg::{generalized_eigen, DenseMatrix};
use crate::{FracError, Real, Result};

use super::{canonical_sign, require_nodes, EigenResult};

/// Gramian of the interior hat functions.
pub fn mass_matrix<T: Real>(grid: &Grid1D<T>) -> DenseMatrix<T> {
    let n = grid.n;
    let mut m = DenseMatrix::zeros(n, n);
    let d = T::lit(4.0) * grid.h / T::lit(6.0);
    let o = grid.h / T::lit(6.0);
    for i in 0..n {
        m[(i, i)] = d;
        if i + 1 < n {
            m[(i, i + 1)] = o;
            m[(i + 1, i)] = o;
        }
    }
    m
}

/// Lowest `m_max` eigenpairs for `p = 2`, eigenfunctions `L^2`-normalized.
pub fn dense_eigen_p2<T: Real>(
    grid: &Grid1D<T>,
    fp: FracParams<T>,
    m_max: usize,
    cfg: SeminormConfig,
) -> Result<Vec<EigenResult<T>>> {
    if fp.p != T::lit(2.0) {
        return Err(FracError::invalid(format!(
            "the dense solver needs p = 2, got p = {}",
            fp.p
        )));
    }
    fp.require_1d()?;
    require_nodes(grid, 1)?;
    if m_max == 0 || m_max > grid.n {
        return Err(FracError::invalid(format!(
            "m_max must lie in 1..={}, got {m_max}",
            grid.n
        )));
    }
    let a = stiffness_matrix(grid, fp, cfg)?;
    let scale = a.max_diagonal();
    if a.asymmetry() > T::lit(1e-12) * scale {
        return Err(FracError::Assembly(format!(
            "stiffness matrix asymmetric by {}",
            a.asymmetry()
        )));
    }
    let mass = mass_matrix(grid);
    let (values, vectors) = generalized_eigen(&a, &mass)?;
    Ok(values
        .into_iter()
        .zip(vectors)
        .take(m_max)
        .enumerate()
        .map(|(k, (lambda, mut v))| {
            canonical_sign(&mut v);
            EigenResult {
                lambda,
                eigenfunction: DiscreteFunction {
                    grid: *grid,
                    values: v,
                },
                iterations: 0,
                residual: T::zero(),
                mode_index: k + 1,
                s: Some(fp.s),
                p: fp.p,
                history: Vec::new(),
            }
        })
        .collect())
}
