//! Courant minimax for a small symmetric positive matrix: minimize, over
//! `m`-dimensional subspaces `F`, the largest Rayleigh quotient on `F`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{dot, Cholesky, DenseMatrix, SymmetricEigen};
use crate::{FracError, Real, Result};

const MAX_DIM: usize = 8;
const STEPS: usize = 20_000;

/// Orthonormalizes the columns in place; `false` if they are dependent.
fn gram_schmidt<T: Real>(frame: &mut [Vec<T>]) -> bool {
    for j in 0..frame.len() {
        for _ in 0..2 {
            for i in 0..j {
                let c = dot(&frame[i], &frame[j]);
                let (head, tail) = frame.split_at_mut(j);
                for (x, &y) in tail[0].iter_mut().zip(&head[i]) {
                    *x = *x - c * y;
                }
            }
        }
        let nrm = dot(&frame[j], &frame[j]).sqrt();
        if !(nrm > T::lit(1e-10)) {
            return false;
        }
        frame[j].iter_mut().for_each(|x| *x = *x / nrm);
    }
    true
}

/// Largest Rayleigh quotient on the span of an orthonormal frame, with the
/// coefficients of the maximizing vector.
fn top<T: Real>(q: &DenseMatrix<T>, frame: &[Vec<T>]) -> Result<(T, Vec<T>)> {
    let m = frame.len();
    let qv: Vec<Vec<T>> = frame.iter().map(|v| q.matvec(v)).collect();
    let mut b = DenseMatrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            b[(i, j)] = dot(&frame[i], &qv[j]);
        }
    }
    for i in 0..m {
        for j in 0..i {
            let avg = (b[(i, j)] + b[(j, i)]) / T::lit(2.0);
            b[(i, j)] = avg;
            b[(j, i)] = avg;
        }
    }
    let eig = SymmetricEigen::new(&b)?;
    Ok((eig.values[m - 1], eig.vector(m - 1)))
}

fn descend<T: Real>(q: &DenseMatrix<T>, mut frame: Vec<Vec<T>>) -> Result<T> {
    let d = q.rows();
    let (mut value, mut y) = top(q, &frame)?;
    let mut alpha = T::one() / q.max_diagonal();
    for _ in 0..STEPS {
        // w = V y, gradient column j is 2 y_j (Q w - lambda w)
        let mut w = vec![T::zero(); d];
        for (v, &c) in frame.iter().zip(&y) {
            for (wi, &vi) in w.iter_mut().zip(v) {
                *wi = *wi + c * vi;
            }
        }
        let r: Vec<T> = q.matvec(&w).iter().zip(&w).map(|(&a, &b)| a - value * b).collect();
        let gnorm2 = T::lit(4.0) * dot(&r, &r) * dot(&y, &y);
        if !(gnorm2.sqrt() > T::lit(1e-14) * value) {
            break;
        }
        alpha = alpha / T::lit(0.5);
        let mut moved = false;
        for _ in 0..60 {
            let mut trial: Vec<Vec<T>> = frame
                .iter()
                .zip(&y)
                .map(|(v, &c)| {
                    v.iter()
                        .zip(&r)
                        .map(|(&a, &b)| a - alpha * T::lit(2.0) * c * b)
                        .collect()
                })
                .collect();
            if gram_schmidt(&mut trial) {
                let (tv, ty) = top(q, &trial)?;
                if tv <= value - T::lit(1e-4) * alpha * gnorm2 {
                    frame = trial;
                    value = tv;
                    y = ty;
                    moved = true;
                    break;
                }
            }
            alpha = alpha * T::lit(0.5);
        }
        if !moved {
            break;
        }
    }
    Ok(value)
}

/// Best value of `max_{u in F} <Qu, u> / |u|^2` over `trials` random
/// orthonormal `m`-frames, each refined by descent on the frame.
pub fn courant_minimax<T: Real>(
    q: &DenseMatrix<T>,
    m: usize,
    trials: usize,
    seed: u64,
) -> Result<T> {
    let d = q.rows();
    if q.cols() != d || d == 0 || d > MAX_DIM {
        return Err(FracError::invalid(format!(
            "need a square matrix of size at most {MAX_DIM}, got {}x{}",
            d,
            q.cols()
        )));
    }
    if m < 1 || m > d {
        return Err(FracError::invalid(format!("m must lie in 1..={d}, got {m}")));
    }
    if trials == 0 {
        return Err(FracError::invalid("need at least one trial"));
    }
    if q.asymmetry() > T::lit(1e-12) {
        return Err(FracError::invalid("matrix is not symmetric"));
    }
    if Cholesky::new(q).is_err() {
        return Err(FracError::invalid("matrix is not positive definite"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = T::infinity();
    for _ in 0..trials {
        let mut frame: Vec<Vec<T>>;
        loop {
            frame = (0..m)
                .map(|_| (0..d).map(|_| T::lit(rng.gen_range(-1.0..1.0))).collect())
                .collect();
            if gram_schmidt(&mut frame) {
                break;
            }
        }
        best = best.min(descend(q, frame)?);
    }
    Ok(best)
}
