//! Discrete Gagliardo energies of piecewise-linear functions.
//!
//! For cells `I <= J` of a uniform grid the double integral of
//! `|u(x) - u(y)|^p / |x - y|^{1 + sp}` over `cell_I x cell_J` is
//!
//! * closed form when `I = J` (the difference is linear in `x - y`);
//! * for touching cells, a homogeneous function of the corner coordinates,
//!   so the integral over the unit square is the integral over the L-shaped
//!   shell `[0,1]^2 \ [0,1/2]^2` times `1 / (1 - 2^{-(p + 1 - sp)})`. This is
//!   the dyadic subdivision toward the shared corner summed to infinity;
//! * tensor Gauss on dyadically split squares otherwise.
//!
//! The exterior contribution of the zero extension is integrated against the
//! closed-form tail density, exactly on the two boundary cells.

use rayon::prelude::*;

use crate::functional::{Functional, Hessian};
use crate::grid::{abs_pow, DiscreteFunction, FracParams, Grid1D, IntervalDomain};
use crate::linalg::DenseMatrix;
use crate::quadrature::GaussRule;
use crate::{FracError, Real, Result};

/// Cells per work unit in the pair loop. Fixed so that parallel and serial
/// evaluation add the same numbers in the same order.
const CHUNK: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeminormConfig {
    /// Maximum depth of dyadic square splitting toward the near corner.
    pub subdivision_levels: usize,
    /// Gauss points per subsquare and axis.
    pub quad_order: usize,
    pub parallel: bool,
}

impl Default for SeminormConfig {
    fn default() -> Self {
        SeminormConfig {
            subdivision_levels: 8,
            quad_order: 4,
            parallel: true,
        }
    }
}

impl SeminormConfig {
    pub fn validate(&self) -> Result<()> {
        if self.subdivision_levels > 20 {
            return Err(FracError::invalid(format!(
                "subdivision_levels must be at most 20, got {}",
                self.subdivision_levels
            )));
        }
        if self.quad_order == 0 || self.quad_order > 32 {
            return Err(FracError::invalid(format!(
                "quad_order must lie in 1..=32, got {}",
                self.quad_order
            )));
        }
        Ok(())
    }

    pub fn serial(self) -> Self {
        SeminormConfig {
            parallel: false,
            ..self
        }
    }
}

/// `|x|^p` and its first two derivatives with fast paths for small integer p.
#[derive(Debug, Clone, Copy)]
enum Power<T> {
    Two,
    Three,
    Four,
    General(T),
}

impl<T: Real> Power<T> {
    fn new(p: T) -> Self {
        if p == T::lit(2.0) {
            Power::Two
        } else if p == T::lit(3.0) {
            Power::Three
        } else if p == T::lit(4.0) {
            Power::Four
        } else {
            Power::General(p)
        }
    }

    #[inline(always)]
    fn value(self, x: T) -> T {
        match self {
            Power::Two => x * x,
            Power::Three => x * x * x.abs(),
            Power::Four => {
                let y = x * x;
                y * y
            }
            Power::General(p) => abs_pow(x, p),
        }
    }

    /// `p |x|^{p-2} x`
    #[inline(always)]
    fn deriv(self, x: T) -> T {
        match self {
            Power::Two => x + x,
            Power::Three => T::lit(3.0) * x * x.abs(),
            Power::Four => T::lit(4.0) * x * x * x,
            Power::General(p) => {
                if x == T::zero() {
                    T::zero()
                } else {
                    p * x.abs().powf(p - T::one()) * x.signum()
                }
            }
        }
    }

    /// `p (p-1) (x^2 + eps2)^{(p-2)/2}`; `eps2` only matters for `p < 2`.
    #[inline(always)]
    fn second(self, x: T, eps2: T) -> T {
        match self {
            Power::Two => T::lit(2.0),
            Power::Three => T::lit(6.0) * x.abs(),
            Power::Four => T::lit(12.0) * x * x,
            Power::General(p) => {
                let r = if p < T::lit(2.0) { x * x + eps2 } else { x * x };
                if r == T::zero() {
                    T::zero()
                } else {
                    p * (p - T::one()) * r.powf((p - T::lit(2.0)) / T::lit(2.0))
                }
            }
        }
    }
}

/// Neumaier compensated sum.
#[derive(Debug, Clone, Copy, Default)]
struct Compensated<T> {
    sum: T,
    err: T,
}

impl<T: Real> Compensated<T> {
    fn new() -> Self {
        Compensated {
            sum: T::zero(),
            err: T::zero(),
        }
    }

    #[inline]
    fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.err = self.err + ((self.sum - t) + x);
        } else {
            self.err = self.err + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    fn total(&self) -> T {
        self.sum + self.err
    }
}

/// Quadrature points of one cell offset, in local coordinates `xi` of the
/// left cell and `eta` of the right cell. Weights include the kernel, the
/// `h^{1-sp}` scale and the factor 2 for the mirrored pair.
#[derive(Debug, Clone)]
struct PairRule<T> {
    xi: Vec<T>,
    eta: Vec<T>,
    w: Vec<T>,
}

impl<T> PairRule<T> {
    fn len(&self) -> usize {
        self.w.len()
    }
}

/// Squares `(x0, y0, size)` covering the unit square, split while
/// `size > split * min_dist(square)` and `depth < levels`.
fn split_squares<T: Real>(
    x0: T,
    y0: T,
    size: T,
    depth: usize,
    levels: usize,
    min_dist: &dyn Fn(T, T, T) -> T,
    out: &mut Vec<(T, T, T)>,
) {
    if depth < levels && size > T::lit(0.5) * min_dist(x0, y0, size) {
        let half = size / T::lit(2.0);
        for (dx, dy) in [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)] {
            split_squares(
                x0 + half * T::lit(dx),
                y0 + half * T::lit(dy),
                half,
                depth + 1,
                levels,
                min_dist,
                out,
            );
        }
    } else {
        out.push((x0, y0, size));
    }
}

/// Precomputed weights for one grid and parameter set.
#[derive(Debug, Clone)]
struct KernelTable<T> {
    n: usize,
    pow: Power<T>,
    /// Coefficient of `|u_{I+1} - u_I|^p` for the same-cell integral.
    same: T,
    /// Entry `d - 1` holds the rule for cell offset `d`.
    offsets: Vec<PairRule<T>>,
    tail_t: Vec<T>,
    /// `cells x tail_t.len()` weights of `|u|^p` for the exterior term.
    tail_w: Vec<T>,
    /// Coefficient of `|u_1|^p` and `|u_n|^p` from the boundary cells.
    tail_boundary: T,
    parallel: bool,
}

impl<T: Real> KernelTable<T> {
    fn new(grid: &Grid1D<T>, fp: &FracParams<T>, cfg: &SeminormConfig) -> Result<Self> {
        cfg.validate()?;
        fp.require_1d()?;
        let n = grid.n;
        let h = grid.h;
        let p = fp.p;
        let sp = fp.sp();
        let one = T::one();
        let two = T::lit(2.0);
        let gamma = p + one - sp;
        let hs = h.powf(one - sp);
        let expo = -(one + sp);
        let rule = GaussRule::<T>::new(cfg.quad_order);
        let q = rule.len();

        let same = hs * two / ((p - sp) * gamma);

        let mut offsets = Vec::with_capacity(n);
        if n >= 1 {
            // touching cells, corner coordinates a = 1 - xi, b = eta
            let closure = one / (one - two.powf(-gamma));
            let half = T::lit(0.5);
            let mut squares = Vec::new();
            let corner = |a0: T, b0: T, _s: T| a0 + b0;
            for (a0, b0) in [(half, T::zero()), (T::zero(), half), (half, half)] {
                split_squares(a0, b0, half, 1, cfg.subdivision_levels, &corner, &mut squares);
            }
            let mut r = PairRule {
                xi: Vec::new(),
                eta: Vec::new(),
                w: Vec::new(),
            };
            for &(a0, b0, size) in &squares {
                for i in 0..q {
                    for j in 0..q {
                        let a = a0 + size * rule.nodes[i];
                        let b = b0 + size * rule.nodes[j];
                        let area = size * size * rule.weights[i] * rule.weights[j];
                        r.xi.push(one - a);
                        r.eta.push(b);
                        r.w.push(two * hs * area * (a + b).powf(expo) * closure);
                    }
                }
            }
            offsets.push(r);
        }
        for d in 2..=n {
            let df = T::from_usize_lossy(d);
            let mut squares = Vec::new();
            let near = |x0: T, y0: T, s: T| df + y0 - x0 - s;
            split_squares(
                T::zero(),
                T::zero(),
                one,
                0,
                cfg.subdivision_levels,
                &near,
                &mut squares,
            );
            let mut r = PairRule {
                xi: Vec::with_capacity(squares.len() * q * q),
                eta: Vec::with_capacity(squares.len() * q * q),
                w: Vec::with_capacity(squares.len() * q * q),
            };
            for &(x0, y0, size) in &squares {
                for i in 0..q {
                    for j in 0..q {
                        let xi = x0 + size * rule.nodes[i];
                        let eta = y0 + size * rule.nodes[j];
                        let area = size * size * rule.weights[i] * rule.weights[j];
                        r.xi.push(xi);
                        r.eta.push(eta);
                        r.w.push(two * hs * area * (df + eta - xi).powf(expo));
                    }
                }
            }
            offsets.push(r);
        }

        let tail_rule = GaussRule::<T>::new((2 * cfg.quad_order).max(8));
        let g = tail_rule.len();
        let cells = n + 1;
        let mut tail_w = Vec::with_capacity(cells * g);
        for c in 0..cells {
            for k in 0..g {
                let t = tail_rule.nodes[k];
                let left = (T::from_usize_lossy(c) + t) * h;
                let right = (T::from_usize_lossy(n + 1 - c) - t) * h;
                let mut dens = T::zero();
                if c != 0 {
                    dens = dens + left.powf(-sp);
                }
                if c != n {
                    dens = dens + right.powf(-sp);
                }
                tail_w.push(two * h * tail_rule.weights[k] * dens / sp);
            }
        }
        let tail_boundary = two * hs / (sp * gamma);

        Ok(KernelTable {
            n,
            pow: Power::new(p),
            same,
            offsets,
            tail_t: tail_rule.nodes,
            tail_w,
            tail_boundary,
            parallel: cfg.parallel,
        })
    }

    /// Pair energy over cells `lo..hi` (as left cell); adds into `grad` when
    /// given.
    fn pairs_chunk(&self, v: &[T], lo: usize, hi: usize, mut grad: Option<&mut [T]>) -> T {
        let n = self.n;
        let pw = self.pow;
        let one = T::one();
        let mut acc = Compensated::new();
        for i in lo..hi {
            let di = v[i + 1] - v[i];
            acc.add(self.same * pw.value(di));
            if let Some(g) = grad.as_deref_mut() {
                let gi = self.same * pw.deriv(di);
                g[i + 1] = g[i + 1] + gi;
                g[i] = g[i] - gi;
            }
            for d in 1..=(n - i) {
                let j = i + d;
                let rule = &self.offsets[d - 1];
                let dj = v[j + 1] - v[j];
                let base = v[i] - v[j];
                let mut s = T::zero();
                match grad.as_deref_mut() {
                    None => {
                        for k in 0..rule.len() {
                            let delta = base + di * rule.xi[k] - dj * rule.eta[k];
                            s = s + rule.w[k] * pw.value(delta);
                        }
                    }
                    Some(g) => {
                        let (mut g0, mut g1, mut g2, mut g3) =
                            (T::zero(), T::zero(), T::zero(), T::zero());
                        for k in 0..rule.len() {
                            let (xi, eta, w) = (rule.xi[k], rule.eta[k], rule.w[k]);
                            let delta = base + di * xi - dj * eta;
                            s = s + w * pw.value(delta);
                            let gd = w * pw.deriv(delta);
                            g0 = g0 + gd * (one - xi);
                            g1 = g1 + gd * xi;
                            g2 = g2 + gd * (one - eta);
                            g3 = g3 + gd * eta;
                        }
                        g[i] = g[i] + g0;
                        g[i + 1] = g[i + 1] + g1;
                        g[j] = g[j] - g2;
                        g[j + 1] = g[j + 1] - g3;
                    }
                }
                acc.add(s);
            }
        }
        acc.total()
    }

    fn chunks(&self) -> Vec<(usize, usize)> {
        let cells = self.n + 1;
        (0..cells)
            .step_by(CHUNK)
            .map(|lo| (lo, (lo + CHUNK).min(cells)))
            .collect()
    }

    fn pairs_value(&self, v: &[T]) -> T {
        let chunks = self.chunks();
        let parts: Vec<T> = if self.parallel {
            chunks
                .par_iter()
                .map(|&(lo, hi)| self.pairs_chunk(v, lo, hi, None))
                .collect()
        } else {
            chunks
                .iter()
                .map(|&(lo, hi)| self.pairs_chunk(v, lo, hi, None))
                .collect()
        };
        let mut acc = Compensated::new();
        for x in parts {
            acc.add(x);
        }
        acc.total()
    }

    fn pairs_value_grad(&self, v: &[T], grad: &mut [T]) -> T {
        let chunks = self.chunks();
        let run = |&(lo, hi): &(usize, usize)| {
            let mut g = vec![T::zero(); v.len()];
            let e = self.pairs_chunk(v, lo, hi, Some(&mut g));
            (e, g)
        };
        let parts: Vec<(T, Vec<T>)> = if self.parallel {
            chunks.par_iter().map(run).collect()
        } else {
            chunks.iter().map(run).collect()
        };
        let mut acc = Compensated::new();
        for (e, g) in parts {
            acc.add(e);
            for (a, b) in grad.iter_mut().zip(&g) {
                *a = *a + *b;
            }
        }
        acc.total()
    }

    fn tail_value(&self, v: &[T], mut grad: Option<&mut [T]>) -> T {
        let n = self.n;
        if n == 0 {
            return T::zero();
        }
        let pw = self.pow;
        let g = self.tail_t.len();
        let mut acc = Compensated::new();
        for c in 0..=n {
            let (l, r) = (v[c], v[c + 1]);
            let mut s = T::zero();
            let (mut gl, mut gr) = (T::zero(), T::zero());
            for k in 0..g {
                let t = self.tail_t[k];
                let w = self.tail_w[c * g + k];
                let x = l + (r - l) * t;
                s = s + w * pw.value(x);
                if grad.is_some() {
                    let d = w * pw.deriv(x);
                    gl = gl + d * (T::one() - t);
                    gr = gr + d * t;
                }
            }
            acc.add(s);
            if let Some(gg) = grad.as_deref_mut() {
                gg[c] = gg[c] + gl;
                gg[c + 1] = gg[c + 1] + gr;
            }
        }
        acc.add(self.tail_boundary * pw.value(v[1]));
        acc.add(self.tail_boundary * pw.value(v[n]));
        if let Some(gg) = grad {
            gg[1] = gg[1] + self.tail_boundary * pw.deriv(v[1]);
            gg[n] = gg[n] + self.tail_boundary * pw.deriv(v[n]);
        }
        acc.total()
    }

    /// Hessian with respect to all `n + 2` nodal values.
    fn hessian_full(&self, v: &[T], with_tail: bool) -> DenseMatrix<T> {
        let n = self.n;
        let pw = self.pow;
        let one = T::one();
        let scale = v
            .windows(2)
            .map(|w| (w[1] - w[0]).abs())
            .fold(T::zero(), T::max)
            .max(v.iter().map(|x| x.abs()).fold(T::zero(), T::max));
        let eps = T::lit(1e-6) * scale.max(T::min_positive_value());
        let eps2 = eps * eps;
        let mut hm = DenseMatrix::zeros(n + 2, n + 2);
        for i in 0..=n {
            let di = v[i + 1] - v[i];
            let a = self.same * pw.second(di, eps2);
            hm[(i, i)] = hm[(i, i)] + a;
            hm[(i + 1, i + 1)] = hm[(i + 1, i + 1)] + a;
            hm[(i, i + 1)] = hm[(i, i + 1)] - a;
            hm[(i + 1, i)] = hm[(i + 1, i)] - a;
            for d in 1..=(n - i) {
                let j = i + d;
                let rule = &self.offsets[d - 1];
                let dj = v[j + 1] - v[j];
                let base = v[i] - v[j];
                let mut local = [[T::zero(); 4]; 4];
                for k in 0..rule.len() {
                    let (xi, eta) = (rule.xi[k], rule.eta[k]);
                    let delta = base + di * xi - dj * eta;
                    let wk = rule.w[k] * pw.second(delta, eps2);
                    let c = [one - xi, xi, -(one - eta), -eta];
                    for r in 0..4 {
                        let wr = wk * c[r];
                        for s in r..4 {
                            local[r][s] = local[r][s] + wr * c[s];
                        }
                    }
                }
                scatter(&mut hm, [i, i + 1, j, j + 1], &local);
            }
        }
        if with_tail && n >= 1 {
            let g = self.tail_t.len();
            for c in 0..=n {
                let (l, r) = (v[c], v[c + 1]);
                let (mut a, mut b, mut e) = (T::zero(), T::zero(), T::zero());
                for k in 0..g {
                    let t = self.tail_t[k];
                    let x = l + (r - l) * t;
                    let w = self.tail_w[c * g + k] * pw.second(x, eps2);
                    a = a + w * (one - t) * (one - t);
                    b = b + w * (one - t) * t;
                    e = e + w * t * t;
                }
                hm[(c, c)] = hm[(c, c)] + a;
                hm[(c, c + 1)] = hm[(c, c + 1)] + b;
                hm[(c + 1, c)] = hm[(c + 1, c)] + b;
                hm[(c + 1, c + 1)] = hm[(c + 1, c + 1)] + e;
            }
            hm[(1, 1)] = hm[(1, 1)] + self.tail_boundary * pw.second(v[1], eps2);
            hm[(n, n)] = hm[(n, n)] + self.tail_boundary * pw.second(v[n], eps2);
        }
        hm
    }

    /// For `p = 2`: the matrix `A` on all `n + 2` nodes with `E(v) = v^T A v`.
    fn quadratic_matrix(&self, with_tail: bool) -> DenseMatrix<T> {
        let n = self.n;
        let one = T::one();
        // per-offset local matrices, independent of the cell
        let locals: Vec<[[T; 4]; 4]> = self
            .offsets
            .iter()
            .map(|rule| {
                let mut local = [[T::zero(); 4]; 4];
                for k in 0..rule.len() {
                    let (xi, eta) = (rule.xi[k], rule.eta[k]);
                    let c = [one - xi, xi, -(one - eta), -eta];
                    for r in 0..4 {
                        let wr = rule.w[k] * c[r];
                        for s in r..4 {
                            local[r][s] = local[r][s] + wr * c[s];
                        }
                    }
                }
                local
            })
            .collect();
        let mut a = DenseMatrix::zeros(n + 2, n + 2);
        for i in 0..=n {
            a[(i, i)] = a[(i, i)] + self.same;
            a[(i + 1, i + 1)] = a[(i + 1, i + 1)] + self.same;
            a[(i, i + 1)] = a[(i, i + 1)] - self.same;
            a[(i + 1, i)] = a[(i + 1, i)] - self.same;
            for d in 1..=(n - i) {
                scatter(&mut a, [i, i + 1, i + d, i + d + 1], &locals[d - 1]);
            }
        }
        if with_tail && n >= 1 {
            let g = self.tail_t.len();
            for c in 0..=n {
                let (mut p, mut q, mut r) = (T::zero(), T::zero(), T::zero());
                for k in 0..g {
                    let t = self.tail_t[k];
                    let w = self.tail_w[c * g + k];
                    p = p + w * (one - t) * (one - t);
                    q = q + w * (one - t) * t;
                    r = r + w * t * t;
                }
                a[(c, c)] = a[(c, c)] + p;
                a[(c, c + 1)] = a[(c, c + 1)] + q;
                a[(c + 1, c)] = a[(c + 1, c)] + q;
                a[(c + 1, c + 1)] = a[(c + 1, c + 1)] + r;
            }
            a[(1, 1)] = a[(1, 1)] + self.tail_boundary;
            a[(n, n)] = a[(n, n)] + self.tail_boundary;
        }
        a
    }
}

/// Adds the upper triangle `local` (and its mirror) at `idx`.
fn scatter<T: Real>(m: &mut DenseMatrix<T>, idx: [usize; 4], local: &[[T; 4]; 4]) {
    for r in 0..4 {
        for s in r..4 {
            let v = local[r][s];
            let (a, b) = (idx[r], idx[s]);
            m[(a, b)] = m[(a, b)] + v;
            if a != b || r != s {
                m[(b, a)] = m[(b, a)] + v;
            }
        }
    }
}

/// Which part of the full-space seminorm an energy measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnergyKind {
    /// `[u]^p` over `R x R` for the zero extension.
    Full,
    /// `[u]^p` over `Omega x Omega`.
    Interior,
}

/// The discrete seminorm energy as a functional of the interior nodal
/// values, for the solvers.
#[derive(Debug, Clone)]
pub struct FractionalEnergy<T> {
    table: KernelTable<T>,
    kind: EnergyKind,
    left: T,
    right: T,
    quadratic: Option<DenseMatrix<T>>,
}

impl<T: Real> FractionalEnergy<T> {
    pub fn new(
        grid: &Grid1D<T>,
        fp: &FracParams<T>,
        cfg: &SeminormConfig,
        kind: EnergyKind,
    ) -> Result<Self> {
        let table = KernelTable::new(grid, fp, cfg)?;
        let quadratic =
            (fp.p == T::lit(2.0)).then(|| table.quadratic_matrix(kind == EnergyKind::Full));
        Ok(FractionalEnergy {
            table,
            kind,
            left: T::zero(),
            right: T::zero(),
            quadratic,
        })
    }

    /// Interior energy of `v` with `v(a) = left`, `v(b) = right` and the
    /// interior nodal values as unknowns.
    pub fn pinned(
        grid: &Grid1D<T>,
        fp: &FracParams<T>,
        cfg: &SeminormConfig,
        left: T,
        right: T,
    ) -> Result<Self> {
        let mut e = Self::new(grid, fp, cfg, EnergyKind::Interior)?;
        e.left = left;
        e.right = right;
        Ok(e)
    }

    pub fn kind(&self) -> EnergyKind {
        self.kind
    }

    fn full(&self, u: &[T]) -> Vec<T> {
        let mut v = Vec::with_capacity(u.len() + 2);
        v.push(self.left);
        v.extend_from_slice(u);
        v.push(self.right);
        v
    }

    /// Energy evaluated by quadrature even when the quadratic form is
    /// available.
    pub fn value_by_quadrature(&self, u: &[T]) -> T {
        let v = self.full(u);
        let mut e = self.table.pairs_value(&v);
        if self.kind == EnergyKind::Full {
            e = e + self.table.tail_value(&v, None);
        }
        e
    }

    /// The matrix `A` on the interior nodes with `E(u) = u^T A u` when
    /// `p = 2` and the boundary values are zero.
    pub fn quadratic_form(&self) -> Option<DenseMatrix<T>> {
        self.quadratic.as_ref().map(|a| interior_block(a))
    }
}

fn interior_block<T: Real>(a: &DenseMatrix<T>) -> DenseMatrix<T> {
    let n = a.rows() - 2;
    let mut m = DenseMatrix::zeros(n, n);
    for i in 0..n {
        m.row_mut(i).copy_from_slice(&a.row(i + 1)[1..n + 1]);
    }
    m
}

impl<T: Real> Functional<T> for FractionalEnergy<T> {
    fn dim(&self) -> usize {
        self.table.n
    }

    fn value(&self, u: &[T]) -> T {
        match &self.quadratic {
            Some(a) => a.quadratic_form(&self.full(u)),
            None => self.value_by_quadrature(u),
        }
    }

    fn value_grad(&self, u: &[T], grad: &mut [T]) -> T {
        let v = self.full(u);
        let n = u.len();
        if let Some(a) = &self.quadratic {
            let av = a.matvec(&v);
            for i in 0..n {
                grad[i] = av[i + 1] + av[i + 1];
            }
            return crate::linalg::dot(&v, &av);
        }
        let mut g = vec![T::zero(); n + 2];
        let mut e = self.table.pairs_value_grad(&v, &mut g);
        if self.kind == EnergyKind::Full {
            e = e + self.table.tail_value(&v, Some(&mut g));
        }
        grad.copy_from_slice(&g[1..n + 1]);
        e
    }

    fn hessian(&self, u: &[T]) -> Hessian<T> {
        let full = match &self.quadratic {
            Some(a) => {
                let mut h = a.clone();
                h.scale(T::lit(2.0));
                h
            }
            None => self
                .table
                .hessian_full(&self.full(u), self.kind == EnergyKind::Full),
        };
        Hessian::Dense(interior_block(&full))
    }

    fn hessian_is_constant(&self) -> bool {
        self.quadratic.is_some()
    }
}

/// `[u]^p` over `Omega x Omega`.
pub fn gagliardo_interior<T: Real>(
    u: &DiscreteFunction<T>,
    fp: FracParams<T>,
    cfg: SeminormConfig,
) -> Result<T> {
    gagliardo_interior_pinned(u, T::zero(), T::zero(), fp, cfg)
}

/// `[v]^p` over `Omega x Omega` for the interpolant with endpoint values
/// `left`, `right` and interior values `u`.
pub fn gagliardo_interior_pinned<T: Real>(
    u: &DiscreteFunction<T>,
    left: T,
    right: T,
    fp: FracParams<T>,
    cfg: SeminormConfig,
) -> Result<T> {
    let table = KernelTable::new(&u.grid, &fp, &cfg)?;
    let mut v = Vec::with_capacity(u.values.len() + 2);
    v.push(left);
    v.extend_from_slice(&u.values);
    v.push(right);
    Ok(table.pairs_value(&v))
}

/// `int_{R \ Omega} |x - y|^{-1-sp} dy = ((x-a)^{-sp} + (b-x)^{-sp}) / (sp)`.
pub fn tail_density<T: Real>(x: T, dom: IntervalDomain<T>, fp: FracParams<T>) -> Result<T> {
    if !dom.contains(x) {
        return Err(FracError::invalid(format!(
            "tail density needs a < x < b, got x = {x} on ({}, {})",
            dom.a, dom.b
        )));
    }
    let sp = fp.sp();
    Ok(((x - dom.a).powf(-sp) + (dom.b - x).powf(-sp)) / sp)
}

/// `2 int_Omega |u|^p tail_density`.
pub fn tail_term<T: Real>(
    u: &DiscreteFunction<T>,
    fp: FracParams<T>,
    cfg: SeminormConfig,
) -> Result<T> {
    let table = KernelTable::new(&u.grid, &fp, &cfg)?;
    Ok(table.tail_value(&u.full_values(), None))
}

/// `[u]^p` over `R x R` for the zero extension of `u`.
pub fn gagliardo_full<T: Real>(
    u: &DiscreteFunction<T>,
    fp: FracParams<T>,
    cfg: SeminormConfig,
) -> Result<T> {
    let table = KernelTable::new(&u.grid, &fp, &cfg)?;
    let v = u.full_values();
    Ok(table.pairs_value(&v) + table.tail_value(&v, None))
}

/// `[u - v]_{W^{t,q}(R)}`.
pub fn wtq_distance<T: Real>(
    u: &DiscreteFunction<T>,
    v: &DiscreteFunction<T>,
    t: T,
    q: T,
    cfg: SeminormConfig,
) -> Result<T> {
    if !(t > T::zero() && t < T::one()) {
        return Err(FracError::invalid(format!("t must lie in (0, 1), got {t}")));
    }
    if !(q >= T::one()) || !q.is_finite() {
        return Err(FracError::invalid(format!("q must be at least 1, got {q}")));
    }
    let diff = u.sub(v)?;
    let fp = FracParams { s: t, p: q, dim: 1 };
    let e = gagliardo_full(&diff, fp, cfg)?;
    Ok(e.max(T::zero()).powf(T::one() / q))
}

/// Stiffness matrix of the full-space form for `p = 2` on the interior
/// nodes: `u^T A u = [u]^2_{W^{s,2}(R)}`.
pub fn stiffness_matrix<T: Real>(
    grid: &Grid1D<T>,
    fp: FracParams<T>,
    cfg: SeminormConfig,
) -> Result<DenseMatrix<T>> {
    if fp.p != T::lit(2.0) {
        return Err(FracError::invalid(format!(
            "the stiffness matrix needs p = 2, got p = {}",
            fp.p
        )));
    }
    let table = KernelTable::new(grid, &fp, &cfg)?;
    Ok(interior_block(&table.quadratic_matrix(true)))
}
