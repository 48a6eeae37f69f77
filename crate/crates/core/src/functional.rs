//! The interface the solvers see: a smooth functional of the interior nodal
//! values together with a positive definite model of its Hessian.

use crate::linalg::{Cholesky, DenseMatrix, TridiagonalLdl};
use crate::{FracError, Real, Result};

pub trait Functional<T: Real>: Sync {
    /// Number of unknowns.
    fn dim(&self) -> usize;

    fn value(&self, u: &[T]) -> T;

    /// Returns the value and overwrites `grad` with the gradient.
    fn value_grad(&self, u: &[T], grad: &mut [T]) -> T;

    fn hessian(&self, u: &[T]) -> Hessian<T>;

    /// True when the Hessian does not depend on `u` (quadratic functionals).
    fn hessian_is_constant(&self) -> bool {
        false
    }
}

/// Second derivative of a functional, stored in the cheapest exact format.
#[derive(Debug, Clone)]
pub enum Hessian<T> {
    Dense(DenseMatrix<T>),
    Tridiagonal { diag: Vec<T>, off: Vec<T> },
}

impl<T: Real> Hessian<T> {
    pub fn dim(&self) -> usize {
        match self {
            Hessian::Dense(m) => m.rows(),
            Hessian::Tridiagonal { diag, .. } => diag.len(),
        }
    }

    pub fn to_dense(&self) -> DenseMatrix<T> {
        match self {
            Hessian::Dense(m) => m.clone(),
            Hessian::Tridiagonal { diag, off } => {
                let mut m = DenseMatrix::from_diagonal(diag);
                for (i, &o) in off.iter().enumerate() {
                    m[(i, i + 1)] = o;
                    m[(i + 1, i)] = o;
                }
                m
            }
        }
    }

    pub fn apply(&self, x: &[T]) -> Vec<T> {
        match self {
            Hessian::Dense(m) => m.matvec(x),
            Hessian::Tridiagonal { diag, off } => {
                let n = diag.len();
                (0..n)
                    .map(|i| {
                        let mut v = diag[i] * x[i];
                        if i > 0 {
                            v = v + off[i - 1] * x[i - 1];
                        }
                        if i + 1 < n {
                            v = v + off[i] * x[i + 1];
                        }
                        v
                    })
                    .collect()
            }
        }
    }

    fn max_diagonal(&self) -> T {
        match self {
            Hessian::Dense(m) => m.max_diagonal(),
            Hessian::Tridiagonal { diag, .. } => {
                diag.iter().map(|d| d.abs()).fold(T::zero(), T::max)
            }
        }
    }

    fn shifted(&self, shift: T) -> Self {
        let mut h = self.clone();
        match &mut h {
            Hessian::Dense(m) => m.add_diagonal(shift),
            Hessian::Tridiagonal { diag, .. } => {
                for d in diag.iter_mut() {
                    *d = *d + shift;
                }
            }
        }
        h
    }

    /// Factors `H + shift I` into a preconditioner. The shift starts at
    /// `rel_shift * max |H_ii|` and grows until the factorization succeeds.
    pub fn factor(&self, rel_shift: T) -> Result<Preconditioner<T>> {
        let scale = self.max_diagonal();
        if scale <= T::zero() || !scale.is_finite() {
            return Err(FracError::Degenerate(
                "Hessian has no positive diagonal".into(),
            ));
        }
        let mut shift = rel_shift * scale;
        for _ in 0..8 {
            let h = self.shifted(shift);
            let attempt = match &h {
                Hessian::Dense(m) => Cholesky::new(m).map(Preconditioner::Dense),
                Hessian::Tridiagonal { diag, off } => {
                    TridiagonalLdl::new(diag, off).map(Preconditioner::Tridiagonal)
                }
            };
            if let Ok(p) = attempt {
                return Ok(p);
            }
            shift = (shift * T::lit(100.0)).max(T::lit(1e-10) * scale);
        }
        Err(FracError::Degenerate(
            "Hessian could not be regularized to positive definite".into(),
        ))
    }
}

/// Factored symmetric positive definite operator `P`; `apply_inverse`
/// computes `P^{-1} r`.
#[derive(Debug, Clone)]
pub enum Preconditioner<T> {
    Dense(Cholesky<T>),
    Tridiagonal(TridiagonalLdl<T>),
}

impl<T: Real> Preconditioner<T> {
    pub fn apply_inverse(&self, r: &[T]) -> Vec<T> {
        match self {
            Preconditioner::Dense(c) => c.solve(r),
            Preconditioner::Tridiagonal(t) => t.solve(r),
        }
    }
}
