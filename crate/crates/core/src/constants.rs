//! The limit constant `K(p, N)`, the Hardy constants for convex sets and the
//! Sobolev ceiling shape.

use std::f64::consts::PI;

use statrs::function::gamma::ln_gamma;

use crate::grid::FracParams;
use crate::quadrature::{tanh_sinh, tanh_sinh_semi_infinite};
use crate::{FracError, Real, Result};

/// How to evaluate `K(p, N)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KMethod {
    /// Integrate `|<sigma, e>|^p` over the unit sphere numerically.
    Quadrature,
    /// `(2 pi^{(N-1)/2} / p) Gamma((p+1)/2) / Gamma((N+p)/2)`.
    ClosedForm,
}

impl std::str::FromStr for KMethod {
    type Err = FracError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quadrature" => Ok(KMethod::Quadrature),
            "closed_form" | "closed-form" => Ok(KMethod::ClosedForm),
            other => Err(FracError::invalid(format!("unknown method `{other}`"))),
        }
    }
}

/// Trapezoid points for the angular integral when `N = 2`.
const CIRCLE_POINTS: usize = 1 << 16;

/// `K(p, N) = (1/p) int_{S^{N-1}} |<sigma, e>|^p d sigma`.
pub fn kconst<T: Real>(p: T, dim: usize, method: KMethod) -> Result<T> {
    let pf = p.as_f64();
    if !(pf > 1.0) || !pf.is_finite() {
        return Err(FracError::invalid(format!("p must exceed 1, got {pf}")));
    }
    if dim == 0 {
        return Err(FracError::invalid("dimension must be at least 1"));
    }
    let v = match method {
        KMethod::ClosedForm => kconst_closed_form(pf, dim),
        KMethod::Quadrature => kconst_quadrature(pf, dim),
    };
    Ok(T::lit(v))
}

fn kconst_closed_form(p: f64, dim: usize) -> f64 {
    let n = dim as f64;
    let log = ln_gamma((p + 1.0) / 2.0) - ln_gamma((n + p) / 2.0);
    2.0 * PI.powf((n - 1.0) / 2.0) / p * log.exp()
}

fn kconst_quadrature(p: f64, dim: usize) -> f64 {
    match dim {
        1 => 2.0 / p,
        2 => circle_integral(|c, _| c.abs().powf(p)) / p,
        _ => {
            // |S^{N-2}| int_0^pi |cos phi|^p sin^{N-2} phi d phi
            let k = (dim - 2) as f64;
            let half = tanh_sinh(0.0, PI / 2.0, 1e-15, |phi, _, dr| {
                // cos(phi) = sin(pi/2 - phi), accurate near pi/2
                dr.sin().powf(p) * phi.sin().powf(k)
            });
            sphere_area(dim - 2) * 2.0 * half / p
        }
    }
}

/// Periodic trapezoid rule for `int_0^{2 pi} f(cos t, sin t) dt`.
fn circle_integral<F: Fn(f64, f64) -> f64>(f: F) -> f64 {
    let m = CIRCLE_POINTS;
    let step = 2.0 * PI / m as f64;
    let mut acc = 0.0;
    for i in 0..m {
        let t = step * i as f64;
        acc += f(t.cos(), t.sin());
    }
    acc * step
}

/// Surface measure of `S^k`, by the recursion
/// `|S^k| = |S^{k-1}| int_0^pi sin^{k-1}`.
fn sphere_area(k: usize) -> f64 {
    let mut area = 2.0;
    for j in 1..=k {
        if j == 1 {
            area = 2.0 * PI;
            continue;
        }
        let e = (j - 1) as f64;
        let w = 2.0 * tanh_sinh(0.0, PI / 2.0, 1e-15, |phi, _, _| phi.sin().powf(e));
        area *= w;
    }
    area
}

/// `K(p, N)` by quadrature along an explicit unit direction `e`, for `N` equal
/// to 2 or 3. The result does not depend on `e`.
pub fn kconst_direction(p: f64, e: &[f64]) -> Result<f64> {
    if !(p > 1.0) {
        return Err(FracError::invalid(format!("p must exceed 1, got {p}")));
    }
    let norm = e.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(norm > 0.0) {
        return Err(FracError::invalid("direction must be nonzero"));
    }
    let e: Vec<f64> = e.iter().map(|x| x / norm).collect();
    match e.len() {
        2 => Ok(circle_integral(|c, s| (c * e[0] + s * e[1]).abs().powf(p)) / p),
        3 => {
            // composite Gauss in the polar angle, trapezoid in the azimuth
            let panels = 200;
            let (gx, gw) = crate::quadrature::gauss_legendre(20);
            let azimuth = 2048;
            let dphi = 2.0 * PI / azimuth as f64;
            let trig: Vec<(f64, f64)> = (0..azimuth)
                .map(|j| {
                    let phi = dphi * j as f64;
                    (phi.cos(), phi.sin())
                })
                .collect();
            let width = PI / panels as f64;
            let mut total = 0.0;
            for k in 0..panels {
                let lo = width * k as f64;
                for (x, w) in gx.iter().zip(&gw) {
                    let theta = lo + 0.5 * width * (x + 1.0);
                    let (st, ct) = theta.sin_cos();
                    let ring: f64 = trig
                        .iter()
                        .map(|&(c, s)| (st * c * e[0] + st * s * e[1] + ct * e[2]).abs().powf(p))
                        .sum();
                    total += 0.5 * width * w * st * ring * dphi;
                }
            }
            Ok(total / p)
        }
        n => Err(FracError::invalid(format!(
            "explicit directions are supported for N = 2, 3, got N = {n}"
        ))),
    }
}

/// Constants of the Hardy inequality on convex sets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HardyConstants<T> {
    /// The optimal constant `D_{N,p,s}`.
    pub d_sharp: T,
    /// `((sp - 1)/p)^p C_{N,p} / (1 - s)`, a lower bound for `d_sharp`.
    pub c_lower: T,
    pub c1: T,
    pub c2: T,
    /// `C_{N,p} = 2 pi^{(N-1)/2} c1 / (p c2)`.
    pub c_np: T,
}

/// `int_0^1 (1 - r^{(sp-1)/p})^p / (1 - r)^{1+sp} dr`.
pub fn hardy_radial_integral(s: f64, p: f64) -> f64 {
    let sp = s * p;
    let alpha = (sp - 1.0) / p;
    tanh_sinh(0.0, 1.0, 1e-13, |_r, _dl, dr| {
        // 1 - r^alpha = -expm1(alpha ln(1 - dr)) without cancellation
        let one_minus = -(alpha * (-dr).ln_1p()).exp_m1();
        one_minus.powf(p) * dr.powf(-1.0 - sp)
    })
}

pub fn hardy_constants<T: Real>(fp: FracParams<T>) -> Result<HardyConstants<T>> {
    fp.require_sp_above_one()?;
    let s = fp.s.as_f64();
    let p = fp.p.as_f64();
    let sp = s * p;
    let n = fp.dim as f64;
    let gamma_ratio = (ln_gamma((1.0 + sp) / 2.0) - ln_gamma((n + sp) / 2.0)).exp();
    let area = 2.0 * PI.powf((n - 1.0) / 2.0);
    let d_sharp = area * gamma_ratio * hardy_radial_integral(s, p);

    let a1 = (p - 1.0) / 2.0;
    let c1 = tanh_sinh(0.0, 1.0, 1e-14, |t, _, _| t.powf(a1) * (-t).exp());
    let a2 = (n - 1.0) / 2.0;
    let a3 = (n - 2.0 + p) / 2.0;
    let c2 = tanh_sinh(0.0, 1.0, 1e-14, |t, _, _| t.powf(a2) * (-t).exp())
        + tanh_sinh_semi_infinite(1.0, 1e-14, |t| t.powf(a3) * (-t).exp());
    let c_np = area * c1 / (p * c2);
    let c_lower = ((sp - 1.0) / p).powf(p) * c_np / (1.0 - s);
    Ok(HardyConstants {
        d_sharp: T::lit(d_sharp),
        c_lower: T::lit(c_lower),
        c1: T::lit(c1),
        c2: T::lit(c2),
        c_np: T::lit(c_np),
    })
}

/// The `s`-dependence `s (1 - s)` of the fractional Sobolev constant, whose
/// `(N, p)` factor is not explicit.
pub fn sobolev_bound<T: Real>(fp: FracParams<T>) -> Result<T> {
    fp.require_subcritical()?;
    Ok(fp.s * (T::one() - fp.s))
}

/// Sobolev exponent `N p / (N - s p)`.
pub fn sobolev_exponent<T: Real>(fp: FracParams<T>) -> Result<T> {
    fp.require_subcritical()?;
    let n = T::from_usize_lossy(fp.dim);
    Ok(n * fp.p / (n - fp.sp()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_dimensional_constant() {
        for p in [1.5, 2.0, 3.0, 7.0] {
            for m in [KMethod::Quadrature, KMethod::ClosedForm] {
                let k: f64 = kconst(p, 1, m).unwrap();
                assert!((k - 2.0 / p).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn sphere_areas() {
        assert!((sphere_area(0) - 2.0).abs() < 1e-15);
        assert!((sphere_area(1) - 2.0 * PI).abs() < 1e-14);
        assert!((sphere_area(2) - 4.0 * PI).abs() < 1e-12);
        assert!((sphere_area(3) - 2.0 * PI * PI).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(kconst(1.0, 1, KMethod::ClosedForm).is_err());
        assert!(kconst(2.0, 0, KMethod::Quadrature).is_err());
        let fp = FracParams::one_d(0.4, 2.0).unwrap();
        assert!(matches!(hardy_constants(fp), Err(FracError::Regime(_))));
        let fp = FracParams::one_d(0.6, 2.0).unwrap();
        assert!(matches!(sobolev_bound(fp), Err(FracError::Regime(_))));
    }

    #[test]
    fn hardy_one_dimensional_gamma_ratio_is_one() {
        let fp = FracParams::one_d(0.75, 2.0).unwrap();
        let h = hardy_constants(fp).unwrap();
        let i = hardy_radial_integral(0.75, 2.0);
        assert!((h.d_sharp - 2.0 * i).abs() < 1e-14 * h.d_sharp);
    }

    #[test]
    fn sobolev_shape() {
        let fp = FracParams::one_d(0.5, 1.5).unwrap();
        assert!((sobolev_bound(fp).unwrap() - 0.25f64).abs() < 1e-15);
        let a: f64 = sobolev_bound(FracParams::one_d(0.3, 1.2).unwrap()).unwrap();
        let b = sobolev_bound(FracParams::one_d(0.7, 1.2).unwrap()).unwrap();
        assert!((a - b).abs() < 1e-15);
    }
}
