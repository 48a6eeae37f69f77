//! Small dense linear algebra: symmetric matrices, Cholesky factors, and a
//! symmetric eigensolver (Householder tridiagonalization followed by the
//! implicitly shifted QL iteration).

use crate::{FracError, Real, Result};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> DenseMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        DenseMatrix {
            rows: r,
            cols: c,
            data,
        }
    }

    pub fn from_diagonal(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// `x^T A x`.
    pub fn quadratic_form(&self, x: &[T]) -> T {
        dot(x, &self.matvec(x))
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                let src = other.row(k);
                let dst = out.row_mut(i);
                for (d, &s) in dst.iter_mut().zip(src) {
                    *d = *d + a * s;
                }
            }
        }
        out
    }

    /// Largest entry of `|A - A^T|` relative to the largest `|A_ij|`.
    pub fn asymmetry(&self) -> T {
        let mut max_abs = T::zero();
        let mut max_diff = T::zero();
        for i in 0..self.rows {
            for j in 0..self.cols {
                max_abs = max_abs.max(self[(i, j)].abs());
                if j > i {
                    max_diff = max_diff.max((self[(i, j)] - self[(j, i)]).abs());
                }
            }
        }
        if max_abs == T::zero() {
            T::zero()
        } else {
            max_diff / max_abs
        }
    }

    pub fn scale(&mut self, factor: T) {
        for v in &mut self.data {
            *v = *v * factor;
        }
    }

    pub fn add_diagonal(&mut self, shift: T) {
        for i in 0..self.rows.min(self.cols) {
            self[(i, i)] = self[(i, i)] + shift;
        }
    }

    pub fn max_diagonal(&self) -> T {
        (0..self.rows.min(self.cols))
            .map(|i| self[(i, i)].abs())
            .fold(T::zero(), T::max)
    }
}

impl<T> std::ops::Index<(usize, usize)> for DenseMatrix<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for DenseMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

#[inline]
pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    let mut acc = [T::zero(); 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        let k = 4 * c;
        acc[0] = acc[0] + a[k] * b[k];
        acc[1] = acc[1] + a[k + 1] * b[k + 1];
        acc[2] = acc[2] + a[k + 2] * b[k + 2];
        acc[3] = acc[3] + a[k + 3] * b[k + 3];
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for k in 4 * chunks..a.len() {
        s = s + a[k] * b[k];
    }
    s
}

/// Lower Cholesky factor `L` with `A = L L^T`.
#[derive(Debug, Clone)]
pub struct Cholesky<T> {
    l: DenseMatrix<T>,
}

impl<T: Real> Cholesky<T> {
    pub fn new(a: &DenseMatrix<T>) -> Result<Self> {
        let n = a.rows();
        if a.cols() != n {
            return Err(FracError::invalid("Cholesky needs a square matrix"));
        }
        let mut l = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let s = dot(&l.row(i)[..j], &l.row(j)[..j]);
                if i == j {
                    let d = a[(i, i)] - s;
                    if d <= T::zero() || !d.is_finite() {
                        return Err(FracError::Degenerate(format!(
                            "matrix not positive definite at pivot {i}"
                        )));
                    }
                    l[(i, i)] = d.sqrt();
                } else {
                    l[(i, j)] = (a[(i, j)] - s) / l[(j, j)];
                }
            }
        }
        Ok(Cholesky { l })
    }

    pub fn dim(&self) -> usize {
        self.l.rows()
    }

    pub fn factor(&self) -> &DenseMatrix<T> {
        &self.l
    }

    /// Solves `L y = b`.
    pub fn forward(&self, b: &[T]) -> Vec<T> {
        let n = self.dim();
        let mut y = b.to_vec();
        for i in 0..n {
            let s = dot(&self.l.row(i)[..i], &y[..i]);
            y[i] = (y[i] - s) / self.l[(i, i)];
        }
        y
    }

    /// Solves `L^T x = y`.
    pub fn backward(&self, y: &[T]) -> Vec<T> {
        let n = self.dim();
        let mut x = y.to_vec();
        for i in (0..n).rev() {
            let xi = x[i] / self.l[(i, i)];
            x[i] = xi;
            let row = self.l.row(i);
            for k in 0..i {
                x[k] = x[k] - row[k] * xi;
            }
        }
        x
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        self.backward(&self.forward(b))
    }
}

/// Symmetric tridiagonal matrix factored as `L D L^T`.
#[derive(Debug, Clone)]
pub struct TridiagonalLdl<T> {
    d: Vec<T>,
    l: Vec<T>,
}

impl<T: Real> TridiagonalLdl<T> {
    /// `diag` has length `n`, `off` length `n - 1`.
    pub fn new(diag: &[T], off: &[T]) -> Result<Self> {
        let n = diag.len();
        let mut d = vec![T::zero(); n];
        let mut l = vec![T::zero(); n.saturating_sub(1)];
        for i in 0..n {
            let mut di = diag[i];
            if i > 0 {
                di = di - l[i - 1] * l[i - 1] * d[i - 1];
            }
            if di <= T::zero() || !di.is_finite() {
                return Err(FracError::Degenerate(format!(
                    "tridiagonal matrix not positive definite at pivot {i}"
                )));
            }
            d[i] = di;
            if i + 1 < n {
                l[i] = off[i] / di;
            }
        }
        Ok(TridiagonalLdl { d, l })
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.d.len();
        let mut x = b.to_vec();
        for i in 1..n {
            x[i] = x[i] - self.l[i - 1] * x[i - 1];
        }
        for i in 0..n {
            x[i] = x[i] / self.d[i];
        }
        for i in (0..n.saturating_sub(1)).rev() {
            x[i] = x[i] - self.l[i] * x[i + 1];
        }
        x
    }
}

/// Eigen-decomposition of a symmetric matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct SymmetricEigen<T> {
    pub values: Vec<T>,
    /// Column `k` is the unit eigenvector for `values[k]`.
    pub vectors: DenseMatrix<T>,
}

impl<T: Real> SymmetricEigen<T> {
    pub fn new(a: &DenseMatrix<T>) -> Result<Self> {
        let n = a.rows();
        if a.cols() != n {
            return Err(FracError::invalid("eigensolver needs a square matrix"));
        }
        if n == 0 {
            return Ok(SymmetricEigen {
                values: vec![],
                vectors: DenseMatrix::zeros(0, 0),
            });
        }
        let mut v = a.clone();
        let mut d = vec![T::zero(); n];
        let mut e = vec![T::zero(); n];
        tridiagonalize(&mut v, &mut d, &mut e);
        tql2(&mut v, &mut d, &mut e)?;
        Ok(SymmetricEigen { values: d, vectors: v })
    }

    pub fn vector(&self, k: usize) -> Vec<T> {
        (0..self.vectors.rows()).map(|i| self.vectors[(i, k)]).collect()
    }
}

/// Householder reduction to tridiagonal form (after the EISPACK `tred2`
/// procedure). On exit `v` holds the accumulated orthogonal transformation,
/// `d` the diagonal and `e[1..]` the subdiagonal.
fn tridiagonalize<T: Real>(v: &mut DenseMatrix<T>, d: &mut [T], e: &mut [T]) {
    let n = d.len();
    for j in 0..n {
        d[j] = v[(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = T::zero();
        let mut h = T::zero();
        for &dk in &d[..i] {
            scale = scale + dk.abs();
        }
        if scale == T::zero() {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[(i - 1, j)];
                v[(i, j)] = T::zero();
                v[(j, i)] = T::zero();
            }
        } else {
            for dk in &mut d[..i] {
                *dk = *dk / scale;
                h = h + *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > T::zero() {
                g = -g;
            }
            e[i] = scale * g;
            h = h - f * g;
            d[i - 1] = f - g;
            for ej in &mut e[..i] {
                *ej = T::zero();
            }
            for j in 0..i {
                f = d[j];
                v[(j, i)] = f;
                g = e[j] + v[(j, j)] * f;
                for k in (j + 1)..i {
                    g = g + v[(k, j)] * d[k];
                    e[k] = e[k] + v[(k, j)] * f;
                }
                e[j] = g;
            }
            f = T::zero();
            for j in 0..i {
                e[j] = e[j] / h;
                f = f + e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] = e[j] - hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[(k, j)] = v[(k, j)] - (f * e[k] + g * d[k]);
                }
                d[j] = v[(i - 1, j)];
                v[(i, j)] = T::zero();
            }
        }
        d[i] = h;
    }

    for i in 0..n.saturating_sub(1) {
        v[(n - 1, i)] = v[(i, i)];
        v[(i, i)] = T::one();
        let h = d[i + 1];
        if h != T::zero() {
            for k in 0..=i {
                d[k] = v[(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = T::zero();
                for k in 0..=i {
                    g = g + v[(k, i + 1)] * v[(k, j)];
                }
                for k in 0..=i {
                    v[(k, j)] = v[(k, j)] - g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[(k, i + 1)] = T::zero();
        }
    }
    for j in 0..n {
        d[j] = v[(n - 1, j)];
        v[(n - 1, j)] = T::zero();
    }
    v[(n - 1, n - 1)] = T::one();
    e[0] = T::zero();
}

/// Implicit QL iteration with Wilkinson-style shifts on the tridiagonal
/// matrix (`tql2`). Sorts eigenvalues ascending together with the vectors.
fn tql2<T: Real>(v: &mut DenseMatrix<T>, d: &mut [T], e: &mut [T]) -> Result<()> {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = T::zero();

    let mut f = T::zero();
    let mut tst1 = T::zero();
    let eps = T::epsilon();
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m == n {
            m = n - 1;
        }

        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > 60 {
                    return Err(FracError::Convergence {
                        iterations: iter,
                        last_value: d[l].as_f64(),
                        residual: e[l].as_f64(),
                        last_iterate: vec![],
                    });
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (T::lit(2.0) * e[l]);
                let mut r = p.hypot(T::one());
                if p < T::zero() {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in &mut d[(l + 2)..n] {
                    *di = *di - h;
                }
                f = f + h;

                p = d[m];
                let mut c = T::one();
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = T::zero();
                let mut s2 = T::zero();
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        let vk1 = v[(k, i + 1)];
                        let vk = v[(k, i)];
                        v[(k, i + 1)] = s * vk + c * vk1;
                        v[(k, i)] = c * vk - s * vk1;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] = d[l] + f;
        e[l] = T::zero();
    }

    // selection sort, ascending
    for i in 0..n.saturating_sub(1) {
        let mut k = i;
        let mut p = d[i];
        for (j, &dj) in d.iter().enumerate().skip(i + 1) {
            if dj < p {
                k = j;
                p = dj;
            }
        }
        if k != i {
            d[k] = d[i];
            d[i] = p;
            for row in 0..n {
                let tmp = v[(row, i)];
                v[(row, i)] = v[(row, k)];
                v[(row, k)] = tmp;
            }
        }
    }
    Ok(())
}

/// Lowest modes of the symmetric-definite pencil `A v = lambda M v`,
/// reduced to standard form through the Cholesky factor of `M`. Returned
/// vectors are `M`-orthonormal.
pub fn generalized_eigen<T: Real>(
    a: &DenseMatrix<T>,
    m: &DenseMatrix<T>,
) -> Result<(Vec<T>, Vec<Vec<T>>)> {
    let n = a.rows();
    let chol = Cholesky::new(m)?;
    // C = L^{-1} A L^{-T}: first W = L^{-1} A (column by column), then C = L^{-1} W^T.
    let mut w = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let col: Vec<T> = (0..n).map(|i| a[(i, j)]).collect();
        let y = chol.forward(&col);
        for i in 0..n {
            w[(i, j)] = y[i];
        }
    }
    let mut c = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let col: Vec<T> = w.row(j).to_vec();
        let y = chol.forward(&col);
        for i in 0..n {
            c[(i, j)] = y[i];
        }
    }
    // symmetrize rounding noise
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = (c[(i, j)] + c[(j, i)]) * T::lit(0.5);
            c[(i, j)] = avg;
            c[(j, i)] = avg;
        }
    }
    let eig = SymmetricEigen::new(&c)?;
    let vectors = (0..n).map(|k| chol.backward(&eig.vector(k))).collect();
    Ok((eig.values, vectors))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_spd(n: usize, seed: u64) -> DenseMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut b = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                b[(i, j)] = rng.gen_range(-1.0..1.0);
            }
        }
        let mut a = b.transpose().matmul(&b);
        a.add_diagonal(0.5);
        a
    }

    #[test]
    fn cholesky_solves() {
        let a = random_spd(12, 3);
        let chol = Cholesky::new(&a).unwrap();
        let x: Vec<f64> = (0..12).map(|i| i as f64 - 4.0).collect();
        let b = a.matvec(&x);
        let y = chol.solve(&b);
        for (u, v) in x.iter().zip(&y) {
            assert!((u - v).abs() < 1e-10);
        }
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]);
        assert!(Cholesky::new(&a).is_err());
    }

    #[test]
    fn tridiagonal_matches_dense() {
        let diag: Vec<f64> = vec![2.0, 3.0, 4.0, 5.0];
        let off = vec![-1.0, 0.5, -0.25];
        let mut a = DenseMatrix::from_diagonal(&diag);
        for i in 0..3 {
            a[(i, i + 1)] = off[i];
            a[(i + 1, i)] = off[i];
        }
        let b = vec![1.0, -2.0, 0.5, 3.0];
        let x1 = TridiagonalLdl::new(&diag, &off).unwrap().solve(&b);
        let x2 = Cholesky::new(&a).unwrap().solve(&b);
        for (u, v) in x1.iter().zip(&x2) {
            assert!((u - v).abs() < 1e-13);
        }
    }

    #[test]
    fn eigen_of_diagonal() {
        let a = DenseMatrix::<f64>::from_diagonal(&[3.0, 1.0, 2.0]);
        let eig = SymmetricEigen::new(&a).unwrap();
        assert_eq!(eig.values.len(), 3);
        for (got, want) in eig.values.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn eigen_reconstructs_matrix() {
        let n = 9;
        let a = random_spd(n, 11);
        let eig = SymmetricEigen::new(&a).unwrap();
        for k in 0..n {
            let v = eig.vector(k);
            let av = a.matvec(&v);
            for i in 0..n {
                assert!((av[i] - eig.values[k] * v[i]).abs() < 1e-10);
            }
            assert!((dot(&v, &v) - 1.0).abs() < 1e-12);
        }
        for w in eig.values.windows(2) {
            assert!(w[0] <= w[1]);
        }
    }

    #[test]
    fn eigen_second_difference_matrix() {
        // tridiag(-1, 2, -1): eigenvalues 2 - 2 cos(k pi / (n + 1))
        let n = 40;
        let mut a = DenseMatrix::zeros(n, n);
        for i in 0..n {
            a[(i, i)] = 2.0;
            if i + 1 < n {
                a[(i, i + 1)] = -1.0;
                a[(i + 1, i)] = -1.0;
            }
        }
        let eig = SymmetricEigen::new(&a).unwrap();
        for k in 0..n {
            let want = 2.0 - 2.0 * (std::f64::consts::PI * (k + 1) as f64 / (n + 1) as f64).cos();
            assert!((eig.values[k] - want).abs() < 1e-12);
        }
    }

    #[test]
    fn generalized_pencil() {
        let n = 7;
        let a = random_spd(n, 5);
        let m = random_spd(n, 6);
        let (vals, vecs) = generalized_eigen(&a, &m).unwrap();
        for k in 0..n {
            let av = a.matvec(&vecs[k]);
            let mv = m.matvec(&vecs[k]);
            for i in 0..n {
                assert!((av[i] - vals[k] * mv[i]).abs() < 1e-9);
            }
            assert!((dot(&vecs[k], &mv) - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn eigen_works_in_f32() {
        let a = DenseMatrix::<f32>::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        let eig = SymmetricEigen::new(&a).unwrap();
        assert!((eig.values[0] - 1.0).abs() < 1e-6);
        assert!((eig.values[1] - 3.0).abs() < 1e-6);
    }
}
