//! Intervals, uniform Dirichlet grids and piecewise-linear functions that
//! vanish outside the interval.

use std::fmt::Write as _;
use std::path::Path;

use crate::functional::{Functional, Hessian};
use crate::quadrature::GaussRule;
use crate::{FracError, Real, Result};

/// Open interval `(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalDomain<T> {
    pub a: T,
    pub b: T,
}

impl<T: Real> IntervalDomain<T> {
    pub fn new(a: T, b: T) -> Result<Self> {
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(FracError::invalid(format!(
                "interval needs finite a < b, got ({a}, {b})"
            )));
        }
        Ok(IntervalDomain { a, b })
    }

    pub fn unit() -> Self {
        IntervalDomain {
            a: T::zero(),
            b: T::one(),
        }
    }

    pub fn diam(&self) -> T {
        self.b - self.a
    }

    /// Distance to the boundary, `min(x - a, b - x)`.
    pub fn delta(&self, x: T) -> T {
        (x - self.a).min(self.b - x)
    }

    pub fn contains(&self, x: T) -> bool {
        self.a < x && x < self.b
    }
}

/// Uniform grid with `n` interior nodes `x_i = a + i h`, `i = 1..=n`,
/// `h = (b - a) / (n + 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D<T> {
    pub domain: IntervalDomain<T>,
    pub n: usize,
    pub h: T,
}

impl<T: Real> Grid1D<T> {
    pub fn new(domain: IntervalDomain<T>, n: usize) -> Self {
        let h = domain.diam() / T::from_usize_lossy(n + 1);
        Grid1D { domain, n, h }
    }

    pub fn unit(n: usize) -> Self {
        Self::new(IntervalDomain::unit(), n)
    }

    /// Number of cells, including the two boundary cells.
    pub fn cells(&self) -> usize {
        self.n + 1
    }

    /// Node `i` for `i = 0..=n+1`; nodes 0 and `n + 1` are the endpoints.
    pub fn node(&self, i: usize) -> T {
        if i == self.n + 1 {
            self.domain.b
        } else {
            self.domain.a + T::from_usize_lossy(i) * self.h
        }
    }

    /// Interior nodes.
    pub fn nodes(&self) -> Vec<T> {
        (1..=self.n).map(|i| self.node(i)).collect()
    }

    /// Same node count on `(a, a + factor (b - a))`.
    pub fn dilate(&self, factor: T) -> Self {
        let a = self.domain.a;
        Self::new(
            IntervalDomain {
                a,
                b: a + factor * self.domain.diam(),
            },
            self.n,
        )
    }

    pub fn same_as(&self, other: &Self) -> bool {
        self.n == other.n && self.domain == other.domain
    }
}

/// Nodal values at the interior nodes of a grid. The represented function is
/// the piecewise-linear interpolant that is zero at both endpoints and on
/// the complement of the interval.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteFunction<T> {
    pub grid: Grid1D<T>,
    pub values: Vec<T>,
}

impl<T: Real> DiscreteFunction<T> {
    pub fn new(grid: Grid1D<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.n {
            return Err(FracError::invalid(format!(
                "expected {} nodal values, got {}",
                grid.n,
                values.len()
            )));
        }
        Ok(DiscreteFunction { grid, values })
    }

    pub fn zeros(grid: Grid1D<T>) -> Self {
        DiscreteFunction {
            grid,
            values: vec![T::zero(); grid.n],
        }
    }

    /// Samples `f` at the interior nodes.
    pub fn from_fn<F: Fn(T) -> T>(grid: Grid1D<T>, f: F) -> Self {
        let values = grid.nodes().into_iter().map(f).collect();
        DiscreteFunction { grid, values }
    }

    /// Hat function `min(x - a, b - x)`.
    pub fn hat(grid: Grid1D<T>) -> Self {
        let dom = grid.domain;
        Self::from_fn(grid, |x| dom.delta(x))
    }

    /// Values at all `n + 2` nodes including the zero endpoints.
    pub fn full_values(&self) -> Vec<T> {
        let mut v = Vec::with_capacity(self.values.len() + 2);
        v.push(T::zero());
        v.extend_from_slice(&self.values);
        v.push(T::zero());
        v
    }

    /// Evaluates the interpolant anywhere on the real line.
    pub fn eval(&self, x: T) -> T {
        let g = &self.grid;
        if !g.domain.contains(x) {
            return T::zero();
        }
        let t = (x - g.domain.a) / g.h;
        let cell = t.floor().to_usize().unwrap_or(0).min(g.n);
        let frac = t - T::from_usize_lossy(cell);
        let left = if cell == 0 { T::zero() } else { self.values[cell - 1] };
        let right = if cell == g.n { T::zero() } else { self.values[cell] };
        left + (right - left) * frac
    }

    pub fn scaled(&self, c: T) -> Self {
        DiscreteFunction {
            grid: self.grid,
            values: self.values.iter().map(|&v| c * v).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if !self.grid.same_as(&other.grid) {
            return Err(FracError::invalid("functions live on different grids"));
        }
        Ok(DiscreteFunction {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| a - b)
                .collect(),
        })
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().map(|v| v.abs()).fold(T::zero(), T::max)
    }

    /// Same nodal values on the grid dilated by `factor` (i.e. `u(x / L)`).
    pub fn dilate(&self, factor: T) -> Self {
        DiscreteFunction {
            grid: self.grid.dilate(factor),
            values: self.values.clone(),
        }
    }

    /// `<u, v>_{L^2}` of the interpolants (exact, via the P1 Gramian).
    pub fn l2_inner(&self, other: &Self) -> Result<T> {
        if !self.grid.same_as(&other.grid) {
            return Err(FracError::invalid("functions live on different grids"));
        }
        Ok(mass_inner(self.grid.h, &self.values, &other.values))
    }

    /// CSV with header `x,value`, one row per interior node.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,value\n");
        for (x, v) in self.grid.nodes().iter().zip(&self.values) {
            let _ = writeln!(out, "{},{}", x.as_f64(), v.as_f64());
        }
        out
    }

    /// Parses the CSV written by [`to_csv`](Self::to_csv). Needs at least two
    /// rows to recover the spacing.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h.trim() == "x,value" => {}
            _ => return Err(FracError::invalid("missing `x,value` header")),
        }
        let mut xs = Vec::new();
        let mut vs = Vec::new();
        for (k, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split(',');
            let parse = |s: Option<&str>| -> Result<f64> {
                s.and_then(|s| s.trim().parse::<f64>().ok())
                    .ok_or_else(|| FracError::invalid(format!("bad CSV row {}", k + 2)))
            };
            xs.push(parse(parts.next())?);
            vs.push(parse(parts.next())?);
        }
        if xs.len() < 2 {
            return Err(FracError::invalid("need at least two nodes"));
        }
        let n = xs.len();
        let h = (xs[n - 1] - xs[0]) / (n - 1) as f64;
        let dom = IntervalDomain::new(T::lit(xs[0] - h), T::lit(xs[n - 1] + h))?;
        let grid = Grid1D::new(dom, n);
        DiscreteFunction::new(grid, vs.into_iter().map(T::lit).collect())
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(|source| FracError::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}

/// Fractional parameters `(s, p)` and the ambient dimension `N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FracParams<T> {
    pub s: T,
    pub p: T,
    pub dim: usize,
}

impl<T: Real> FracParams<T> {
    pub fn new(s: T, p: T, dim: usize) -> Result<Self> {
        if !(s > T::zero() && s < T::one()) {
            return Err(FracError::invalid(format!("s must lie in (0, 1), got {s}")));
        }
        if !(p > T::one()) || !p.is_finite() {
            return Err(FracError::invalid(format!("p must exceed 1, got {p}")));
        }
        if dim == 0 {
            return Err(FracError::invalid("dimension must be at least 1"));
        }
        Ok(FracParams { s, p, dim })
    }

    /// One-dimensional parameters, the only case the eigenproblems support.
    pub fn one_d(s: T, p: T) -> Result<Self> {
        Self::new(s, p, 1)
    }

    pub fn sp(&self) -> T {
        self.s * self.p
    }

    /// Conjugate exponent `p / (p - 1)`.
    pub fn p_conj(&self) -> T {
        self.p / (self.p - T::one())
    }

    pub fn require_1d(&self) -> Result<()> {
        if self.dim != 1 {
            return Err(FracError::invalid(format!(
                "only dimension 1 is supported here, got N = {}",
                self.dim
            )));
        }
        Ok(())
    }

    pub fn require_sp_above_one(&self) -> Result<()> {
        if !(self.sp() > T::one()) {
            return Err(FracError::regime(format!(
                "requires s p > 1, got s p = {}",
                self.sp()
            )));
        }
        Ok(())
    }

    pub fn require_subcritical(&self) -> Result<()> {
        if !(self.sp() < T::from_usize_lossy(self.dim)) {
            return Err(FracError::regime(format!(
                "requires s p < N, got s p = {} with N = {}",
                self.sp(),
                self.dim
            )));
        }
        Ok(())
    }
}

#[inline]
pub(crate) fn abs_pow<T: Real>(x: T, p: T) -> T {
    let a = x.abs();
    if a == T::zero() {
        T::zero()
    } else {
        a.powf(p)
    }
}

/// `int_0^1 |a + (b - a) t|^p dt` and its partial derivatives in `a`, `b`.
fn cell_power<T: Real>(a: T, b: T, p: T, rule: &GaussRule<T>) -> (T, T, T) {
    let diff = b - a;
    let big = a.abs().max(b.abs());
    if big == T::zero() {
        return (T::zero(), T::zero(), T::zero());
    }
    if diff.abs() <= T::lit(0.25) * big {
        // Same sign, nearly constant: the integrand is analytic on a
        // neighbourhood of [0, 1], Gauss is accurate to rounding.
        let mut v = T::zero();
        let mut da = T::zero();
        let mut db = T::zero();
        for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
            let x = a + diff * t;
            let ax = x.abs();
            let pw = ax.powf(p);
            v = v + w * pw;
            let d = p * pw / x;
            da = da + w * d * (T::one() - t);
            db = db + w * d * t;
        }
        (v, da, db)
    } else {
        // Divided difference of Phi(w) = sign(w)|w|^{p+1} / (p + 1).
        let q = p + T::one();
        let phi = |w: T| w.signum() * abs_pow(w, q) / q;
        let v = (phi(b) - phi(a)) / diff;
        let da = (v - abs_pow(a, p)) / diff;
        let db = (abs_pow(b, p) - v) / diff;
        (v, da, db)
    }
}

/// `int |u|^p` over the interval for the interpolant of `full` (all `n + 2`
/// nodal values, endpoints included).
pub(crate) fn lp_power_full<T: Real>(h: T, full: &[T], p: T, grad: Option<&mut [T]>) -> T {
    let rule = GaussRule::new(8);
    let mut total = T::zero();
    match grad {
        Some(g) => {
            for v in g.iter_mut() {
                *v = T::zero();
            }
            for c in 0..full.len() - 1 {
                let (v, da, db) = cell_power(full[c], full[c + 1], p, &rule);
                total = total + v;
                g[c] = g[c] + h * da;
                g[c + 1] = g[c + 1] + h * db;
            }
        }
        None => {
            for c in 0..full.len() - 1 {
                total = total + cell_power(full[c], full[c + 1], p, &rule).0;
            }
        }
    }
    total * h
}

pub(crate) fn mass_inner<T: Real>(h: T, u: &[T], v: &[T]) -> T {
    // interior values only; endpoint values are zero
    let n = u.len();
    let mut s = T::zero();
    for i in 0..n {
        let mut row = T::lit(4.0) * v[i];
        if i > 0 {
            row = row + v[i - 1];
        }
        if i + 1 < n {
            row = row + v[i + 1];
        }
        s = s + u[i] * row;
    }
    s * h / T::lit(6.0)
}

/// `||u||_{L^p}` of the interpolant.
pub fn lp_norm<T: Real>(u: &DiscreteFunction<T>, p: T) -> Result<T> {
    if u.values.is_empty() {
        return Err(FracError::invalid("empty grid"));
    }
    if !(p >= T::one()) {
        return Err(FracError::invalid(format!("p must be at least 1, got {p}")));
    }
    Ok(lp_power_full(u.grid.h, &u.full_values(), p, None).powf(T::one() / p))
}

/// `||u||_{L^infty}` of the interpolant, which is attained at a node.
pub fn linf_norm<T: Real>(u: &DiscreteFunction<T>) -> T {
    u.max_abs()
}

/// Rescales `u` to unit `L^p` norm.
pub fn normalize_lp<T: Real>(u: &DiscreteFunction<T>, p: T) -> Result<DiscreteFunction<T>> {
    let norm = lp_norm(u, p)?;
    if !(norm > T::zero()) || !norm.is_finite() {
        return Err(FracError::Degenerate("cannot normalize the zero function".into()));
    }
    Ok(u.scaled(T::one() / norm))
}

/// `||u'||_{L^p}`, exact for the interpolant (boundary cells included).
pub fn local_gradient_norm<T: Real>(u: &DiscreteFunction<T>, p: T) -> T {
    let h = u.grid.h;
    let full = u.full_values();
    let s: T = full
        .windows(2)
        .map(|w| abs_pow((w[1] - w[0]) / h, p))
        .sum();
    (s * h).powf(T::one() / p)
}

/// `N(u) = ||u||_{L^p}^p` as a functional of the interior nodal values.
#[derive(Debug, Clone)]
pub struct LpPower<T> {
    pub grid: Grid1D<T>,
    pub p: T,
}

impl<T: Real> Functional<T> for LpPower<T> {
    fn dim(&self) -> usize {
        self.grid.n
    }

    fn value(&self, u: &[T]) -> T {
        lp_power_full(self.grid.h, &pad(u), self.p, None)
    }

    fn value_grad(&self, u: &[T], grad: &mut [T]) -> T {
        let mut g = vec![T::zero(); u.len() + 2];
        let v = lp_power_full(self.grid.h, &pad(u), self.p, Some(&mut g));
        grad.copy_from_slice(&g[1..u.len() + 1]);
        v
    }

    fn hessian(&self, u: &[T]) -> Hessian<T> {
        let full = pad(u);
        let n = u.len();
        let p = self.p;
        let h = self.grid.h;
        let rule = GaussRule::<T>::new(8);
        let mut diag = vec![T::zero(); n + 2];
        let mut off = vec![T::zero(); n + 1];
        let scale = full.iter().map(|v| v.abs()).fold(T::zero(), T::max);
        let eps = T::lit(1e-8) * scale.max(T::min_positive_value());
        for c in 0..=n {
            let (a, b) = (full[c], full[c + 1]);
            for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
                let x = a + (b - a) * t;
                let weight = if p == T::lit(2.0) {
                    T::lit(2.0)
                } else {
                    p * (p - T::one()) * (x * x + eps * eps).powf((p - T::lit(2.0)) / T::lit(2.0))
                };
                let wl = w * h * weight;
                diag[c] = diag[c] + wl * (T::one() - t) * (T::one() - t);
                diag[c + 1] = diag[c + 1] + wl * t * t;
                off[c] = off[c] + wl * t * (T::one() - t);
            }
        }
        Hessian::Tridiagonal {
            diag: diag[1..=n].to_vec(),
            off: off[1..n].to_vec(),
        }
    }

    fn hessian_is_constant(&self) -> bool {
        self.p == T::lit(2.0)
    }
}

/// `||u'||_{L^p}^p` as a functional of the interior nodal values.
#[derive(Debug, Clone)]
pub struct LocalEnergy<T> {
    pub grid: Grid1D<T>,
    pub p: T,
}

impl<T: Real> Functional<T> for LocalEnergy<T> {
    fn dim(&self) -> usize {
        self.grid.n
    }

    fn value(&self, u: &[T]) -> T {
        let h = self.grid.h;
        let coef = h.powf(T::one() - self.p);
        pad(u).windows(2).map(|w| abs_pow(w[1] - w[0], self.p)).sum::<T>() * coef
    }

    fn value_grad(&self, u: &[T], grad: &mut [T]) -> T {
        let full = pad(u);
        let p = self.p;
        let coef = self.grid.h.powf(T::one() - p);
        let n = u.len();
        for g in grad.iter_mut() {
            *g = T::zero();
        }
        let mut total = T::zero();
        for c in 0..=n {
            let d = full[c + 1] - full[c];
            let ad = abs_pow(d, p);
            total = total + ad;
            let dd = if d == T::zero() { T::zero() } else { p * ad / d };
            // node c is interior index c - 1, node c + 1 is interior index c
            if c >= 1 {
                grad[c - 1] = grad[c - 1] - coef * dd;
            }
            if c < n {
                grad[c] = grad[c] + coef * dd;
            }
        }
        total * coef
    }

    fn hessian(&self, u: &[T]) -> Hessian<T> {
        let full = pad(u);
        let p = self.p;
        let n = u.len();
        let coef = self.grid.h.powf(T::one() - p);
        let scale = full
            .windows(2)
            .map(|w| (w[1] - w[0]).abs())
            .fold(T::zero(), T::max);
        let eps = T::lit(1e-6) * scale.max(T::min_positive_value());
        let mut diag = vec![T::zero(); n];
        let mut off = vec![T::zero(); n.saturating_sub(1)];
        for c in 0..=n {
            let d = full[c + 1] - full[c];
            let w = if p == T::lit(2.0) {
                T::lit(2.0) * coef
            } else {
                coef * p * (p - T::one()) * (d * d + eps * eps).powf((p - T::lit(2.0)) / T::lit(2.0))
            };
            if c >= 1 {
                diag[c - 1] = diag[c - 1] + w;
            }
            if c < n {
                diag[c] = diag[c] + w;
            }
            if c >= 1 && c < n {
                off[c - 1] = off[c - 1] - w;
            }
        }
        Hessian::Tridiagonal { diag, off }
    }

    fn hessian_is_constant(&self) -> bool {
        self.p == T::lit(2.0)
    }
}

pub(crate) fn pad<T: Real>(u: &[T]) -> Vec<T> {
    let mut v = Vec::with_capacity(u.len() + 2);
    v.push(T::zero());
    v.extend_from_slice(u);
    v.push(T::zero());
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn sine(n: usize) -> DiscreteFunction<f64> {
        DiscreteFunction::from_fn(Grid1D::unit(n), |x| 2f64.sqrt() * (PI * x).sin())
    }

    #[test]
    fn zero_function_norms_vanish() {
        let u = DiscreteFunction::<f64>::zeros(Grid1D::unit(10));
        assert_eq!(lp_norm(&u, 2.0).unwrap(), 0.0);
        assert_eq!(local_gradient_norm(&u, 3.0), 0.0);
    }

    #[test]
    fn sine_has_unit_l2_norm() {
        let v = lp_norm(&sine(512), 2.0).unwrap();
        assert!((v - 1.0).abs() < 1e-5, "{v}");
    }

    #[test]
    fn constant_nodal_values_lose_one_cell() {
        let g = Grid1D::<f64>::unit(99);
        let u = DiscreteFunction::from_fn(g, |_| 1.0);
        let v = lp_norm(&u, 1.0).unwrap();
        assert!((v - (1.0 - g.h)).abs() < 1e-13, "{v}");
    }

    #[test]
    fn empty_grid_is_rejected() {
        let u = DiscreteFunction::<f64>::zeros(Grid1D::unit(0));
        assert!(matches!(lp_norm(&u, 2.0), Err(FracError::InvalidInput(_))));
    }

    #[test]
    fn normalize_behaviour() {
        let u = sine(64).scaled(2.0);
        let nu = normalize_lp(&u, 3.0).unwrap();
        assert!((lp_norm(&nu, 3.0).unwrap() - 1.0).abs() < 1e-12);
        let again = normalize_lp(&nu, 3.0).unwrap();
        for (a, b) in nu.values.iter().zip(&again.values) {
            assert!((a - b).abs() < 1e-14);
        }
        let neg = normalize_lp(&u.scaled(-1.0), 3.0).unwrap();
        for (a, b) in nu.values.iter().zip(&neg.values) {
            assert!((a + b).abs() < 1e-14);
        }
        let zero = DiscreteFunction::<f64>::zeros(Grid1D::unit(5));
        assert!(matches!(normalize_lp(&zero, 2.0), Err(FracError::Degenerate(_))));
    }

    #[test]
    fn hat_gradient_norm_is_one() {
        // n odd puts the kink of the hat on a node
        for p in [1.5, 2.0, 3.0, 7.0] {
            let u = DiscreteFunction::<f64>::hat(Grid1D::unit(63));
            assert!((local_gradient_norm(&u, p) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sine_gradient_norm_is_pi() {
        let v = local_gradient_norm(&sine(512), 2.0);
        assert!((v - PI).abs() < 1e-3, "{v}");
    }

    #[test]
    fn cell_power_branches_agree() {
        let rule = GaussRule::<f64>::new(8);
        let fine = GaussRule::<f64>::new(40);
        for &(a, b) in &[(1.0, 1.1), (1.0, 3.0), (-1.0, 2.0), (0.0, 1.0), (-2.0, -1.9)] {
            for &p in &[1.5, 2.0, 2.5, 3.0] {
                let (v, da, db) = cell_power(a, b, p, &rule);
                let f = |t: f64| (a + (b - a) * t).abs().powf(p);
                let root = -a / (b - a);
                let want = if root > 0.0 && root < 1.0 {
                    fine.integrate(0.0, root, f) + fine.integrate(root, 1.0, f)
                } else {
                    fine.integrate(0.0, 1.0, f)
                };
                assert!((v - want).abs() < 1e-6 * want.max(1.0), "{a} {b} {p}");
                let e = 1e-6;
                let fa = (cell_power(a + e, b, p, &rule).0 - cell_power(a - e, b, p, &rule).0) / (2.0 * e);
                let fb = (cell_power(a, b + e, p, &rule).0 - cell_power(a, b - e, p, &rule).0) / (2.0 * e);
                assert!((da - fa).abs() < 1e-6, "da {a} {b} {p}");
                assert!((db - fb).abs() < 1e-6, "db {a} {b} {p}");
            }
        }
    }

    #[test]
    fn lp_power_gradient_matches_finite_differences() {
        let g = Grid1D::<f64>::unit(9);
        let u: Vec<f64> = (0..9).map(|i| ((i as f64) * 0.7).sin() - 0.2).collect();
        for p in [1.5, 2.0, 3.0] {
            let f = LpPower { grid: g, p };
            let mut grad = vec![0.0; 9];
            f.value_grad(&u, &mut grad);
            for k in 0..9 {
                let mut up = u.clone();
                let mut um = u.clone();
                up[k] += 1e-6;
                um[k] -= 1e-6;
                let fd = (f.value(&up) - f.value(&um)) / 2e-6;
                assert!((fd - grad[k]).abs() < 1e-7, "p={p} k={k}");
            }
        }
    }

    #[test]
    fn p2_hessian_is_twice_the_mass_matrix() {
        let g = Grid1D::<f64>::unit(6);
        let u = vec![0.3; 6];
        let x: Vec<f64> = (0..6).map(|i| i as f64 - 2.5).collect();
        let f = LpPower { grid: g, p: 2.0 };
        let hx = f.hessian(&u).apply(&x);
        let q: f64 = x.iter().zip(&hx).map(|(a, b)| a * b).sum();
        let xf = DiscreteFunction::new(g, x.clone()).unwrap();
        let m = xf.l2_inner(&xf).unwrap();
        assert!((q - 2.0 * m).abs() < 1e-13);
    }

    #[test]
    fn csv_round_trip() {
        let u = sine(17);
        let back = DiscreteFunction::<f64>::from_csv(&u.to_csv()).unwrap();
        assert_eq!(back.values, u.values);
        assert!((back.grid.h - u.grid.h).abs() < 1e-15);
        assert!(u.to_csv().starts_with("x,value\n"));
    }

    #[test]
    fn eval_interpolates_and_extends_by_zero() {
        let u = DiscreteFunction::<f64>::hat(Grid1D::unit(3));
        assert!((u.eval(0.25) - 0.25).abs() < 1e-15);
        assert!((u.eval(0.125) - 0.125).abs() < 1e-15);
        assert_eq!(u.eval(-0.5), 0.0);
        assert_eq!(u.eval(1.5), 0.0);
    }

    #[test]
    fn params_validation() {
        assert!(FracParams::<f64>::new(0.0, 2.0, 1).is_err());
        assert!(FracParams::<f64>::new(0.5, 1.0, 1).is_err());
        assert!(FracParams::<f64>::new(0.5, 2.0, 0).is_err());
        let fp = FracParams::<f64>::new(0.4, 2.0, 1).unwrap();
        assert!(fp.require_sp_above_one().is_err());
        assert!((fp.p_conj() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn grid_spacing_is_exact() {
        let g = Grid1D::new(IntervalDomain::<f64>::new(-0.5, 0.5).unwrap(), 127);
        assert!((g.h * 128.0 - 1.0).abs() < 1e-15);
        let nodes = g.nodes();
        assert!(nodes.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn f32_norms() {
        let u = DiscreteFunction::<f32>::hat(Grid1D::unit(31));
        assert!((local_gradient_norm(&u, 2.0f32) - 1.0).abs() < 1e-5);
    }
}
