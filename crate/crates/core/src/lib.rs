//! Fractional p-Laplacian eigenvalues on intervals and their singular limit.
//!
//! The crate computes discrete Gagliardo energies of piecewise-linear functions,
//! variational eigenvalues of the fractional and local p-Laplacian with
//! Dirichlet data on an interval, and the experiments that compare
//! `(1 - s) * lambda^s_{m,p}` against `K(p, N) * lambda^1_{m,p}` as `s -> 1`.
//!
//! Numerical code is generic over the scalar type through [`Real`]; the
//! aliases at the crate root fix it to `f64`, which is what the study drivers
//! and the command-line frontend use.

pub mod constants;
pub mod energy;
mod error;
pub mod functional;
pub mod grid;
pub mod linalg;
pub mod quadrature;
pub mod solve;
pub mod study;

use std::fmt::{Debug, Display};
use std::iter::Sum;

pub use error::{FracError, Result};

/// Floating point scalar the numerical core is written against.
pub trait Real:
    num_traits::Float
    + num_traits::FloatConst
    + num_traits::FromPrimitive
    + num_traits::ToPrimitive
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal; every supported scalar can represent it
    /// (possibly with rounding).
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar converts to f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Version string embedded in every report.
pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

pub type Domain = grid::IntervalDomain<f64>;
pub type Grid = grid::Grid1D<f64>;
pub type Function = grid::DiscreteFunction<f64>;
pub type Params = grid::FracParams<f64>;

pub type Matrix = linalg::DenseMatrix<f64>;
pub type Hardy = constants::HardyConstants<f64>;

pub use energy::SeminormConfig;

pub use solve::SolverConfig;

pub type Eigen = solve::EigenResult<f64>;
