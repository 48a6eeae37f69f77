//! One-dimensional quadrature rules.
//!
//! Gauss-Legendre rules drive the cell-wise integrals of the energy module;
//! the double-exponential rule handles the endpoint-singular integrals that
//! appear in the Hardy and limit constants.

use std::f64::consts::PI;

use crate::Real;

/// Gauss-Legendre rule on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> GaussRule<T> {
    /// Rule with `order` points, exact for polynomials of degree `2 order - 1`.
    pub fn new(order: usize) -> Self {
        let (x, w) = gauss_legendre(order);
        GaussRule {
            nodes: x.iter().map(|&v| T::lit(0.5 * (v + 1.0))).collect(),
            weights: w.iter().map(|&v| T::lit(0.5 * v)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integrates `f` over `[a, b]`.
    pub fn integrate<F: Fn(T) -> T>(&self, a: T, b: T, f: F) -> T {
        let len = b - a;
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(a + len * t))
            .sum::<T>()
            * len
    }
}

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`,
/// computed by Newton iteration on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss rule needs at least one point");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, z);
        if d != 0.0 {
            dp = d;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

fn legendre(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Tanh-sinh (double exponential) quadrature on `[a, b]`.
///
/// The integrand receives `(x, x - a, b - x)` so that factors such as
/// `(1 - r)^(-q)` can be evaluated without cancellation next to the
/// endpoints. Integrable endpoint singularities are handled at full accuracy.
pub fn tanh_sinh<F>(a: f64, b: f64, tol: f64, f: F) -> f64
where
    F: Fn(f64, f64, f64) -> f64,
{
    let half = 0.5 * (b - a);
    let eval = |t: f64| -> f64 {
        // x = mid + half * tanh(pi/2 sinh t); distances from the endpoints
        // written through exp to avoid cancellation.
        let u = 0.5 * PI * t.sinh();
        let cosh_u = u.cosh();
        let weight = 0.5 * PI * t.cosh() / (cosh_u * cosh_u);
        let e = (-2.0 * u.abs()).exp();
        let near = 2.0 * e / (1.0 + e); // 1 - tanh|u|
        let (dl, dr) = if u >= 0.0 {
            (half * (2.0 - near), half * near)
        } else {
            (half * near, half * (2.0 - near))
        };
        if dl <= 0.0 || dr <= 0.0 || weight == 0.0 {
            return 0.0;
        }
        let x = if u >= 0.0 { b - dr } else { a + dl };
        let v = f(x, dl, dr);
        if v.is_finite() {
            v * weight
        } else {
            0.0
        }
    };

    let t_max = 6.5;
    let mut step = 1.0;
    let mut sum = eval(0.0);
    let mut k = 1;
    while (k as f64) * step <= t_max {
        let t = k as f64 * step;
        sum += eval(t) + eval(-t);
        k += 1;
    }
    let mut estimate = sum * step * half;
    for _level in 0..12 {
        step *= 0.5;
        let mut k = 1;
        while (k as f64) * step <= t_max {
            let t = k as f64 * step;
            sum += eval(t) + eval(-t);
            k += 2;
        }
        let next = sum * step * half;
        let diff = (next - estimate).abs();
        estimate = next;
        if diff <= tol * next.abs().max(1e-300) && step < 0.5 {
            break;
        }
    }
    estimate
}

/// Integral over `[a, inf)` via the map `x = a + t / (1 - t)`.
pub fn tanh_sinh_semi_infinite<F>(a: f64, tol: f64, f: F) -> f64
where
    F: Fn(f64) -> f64,
{
    tanh_sinh(0.0, 1.0, tol, |t, _dl, dr| {
        let x = a + t / dr;
        f(x) / (dr * dr)
    })
}
