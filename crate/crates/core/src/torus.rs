//! Jacobi fields along the shear flow `u = ω ∂_y`, `ρ ≡ 1` on the flat torus.
//!
//! For `p = c²ρ²/2` and constant `ω` the linearized equations reduce to an
//! advected wave equation. Writing `v₀ = grad f₀ + z` with `div z = 0`,
//!
//! ```text
//! j(t, x, y) = Σ_k f̂_k sin(c|k|t)/(c|k|) · ik e^{i(k_x x + k_y (y − ωt))} + t z(x, y − ωt)
//! ```
//!
//! so `j` stays bounded exactly when `z = 0`.

use rustfft::num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::{hodge_decompose, Grid, ScalarField, TorusGrid, VectorField};
use crate::geodesic::steady_shear_torus;
use crate::jacobi::{integrate_jacobi, slope};
use crate::metric::{sectional_curvature, CurvatureReport, TangentVector};
use crate::pressure::PressureModel;

/// Threshold on `‖z‖₂` below which a perturbation counts as a pure gradient.
pub const GRADIENT_TOLERANCE: f64 = 1e-10;

/// The closed-form Jacobi field for one initial perturbation `v₀`.
#[derive(Clone, Debug)]
pub struct TorusModeSolution {
    grid: TorusGrid,
    /// Fourier coefficients of the gradient potential, `f₀ = Σ f̂_k e^{ik·x}`.
    potential: Vec<Complex64>,
    /// Fourier coefficients of the divergence-free part.
    z_hat: [Vec<Complex64>; 2],
    z: VectorField<TorusGrid>,
    pub c: f64,
    pub omega: f64,
}

impl TorusModeSolution {
    pub fn new(v0: &VectorField<TorusGrid>, omega: f64, c: f64) -> Result<Self> {
        if !(c > 0.0) || !omega.is_finite() {
            return Err(Error::Invalid(format!(
                "need c > 0 and finite ω, got c = {c}, ω = {omega}"
            )));
        }
        let grid = v0.grid();
        let (f, z) = hodge_decompose(v0);
        let n = grid.len() as f64;
        let normalize = |v: Vec<Complex64>| v.into_iter().map(|x| x / n).collect::<Vec<_>>();
        Ok(Self {
            grid,
            potential: normalize(grid.fft2(f.values())),
            z_hat: [
                normalize(grid.fft2(&z.comps()[0])),
                normalize(grid.fft2(&z.comps()[1])),
            ],
            z,
            c,
            omega,
        })
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    /// The divergence-free part of `v₀`.
    pub fn divergence_free_part(&self) -> &VectorField<TorusGrid> {
        &self.z
    }

    /// `Σ_{k≠0} |f̂_k| ‖grad e^{ik·x}‖_∞ / (c|k|) = Σ |f̂_k| / c`, a bound on the
    /// gradient part of `‖j(t)‖_∞` for all `t`.
    pub fn gradient_bound(&self) -> f64 {
        self.potential.iter().map(|a| a.norm()).sum::<f64>() / self.c
    }

    /// `j(t)` on the grid nodes.
    pub fn eval(&self, t: f64) -> VectorField<TorusGrid> {
        let g = self.grid;
        let (nx, ny) = (g.nx(), g.ny());
        let n = g.len() as f64;
        let mut jx = vec![Complex64::new(0.0, 0.0); g.len()];
        let mut jy = jx.clone();
        for i in 0..nx {
            for j in 0..ny {
                let idx = i * ny + j;
                let (kx, ky) = g.wavenumbers(i, j);
                let shift = Complex64::from_polar(n, -ky * self.omega * t);
                let k = (kx * kx + ky * ky).sqrt();
                let wave = if k > 0.0 {
                    (self.c * k * t).sin() / (self.c * k)
                } else {
                    0.0
                };
                let a = self.potential[idx] * Complex64::new(0.0, wave) * shift;
                jx[idx] = a * kx + self.z_hat[0][idx] * shift * t;
                jy[idx] = a * ky + self.z_hat[1][idx] * shift * t;
            }
        }
        VectorField::from_raw(g, vec![g.ifft2_real(jx), g.ifft2_real(jy)])
    }
}

/// Evaluates the closed-form Jacobi field at time `t`.
pub fn torus_jacobi(
    v0: &VectorField<TorusGrid>,
    omega: f64,
    c: f64,
    t: f64,
) -> Result<VectorField<TorusGrid>> {
    Ok(TorusModeSolution::new(v0, omega, c)?.eval(t))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundedness {
    Bounded,
    LinearGrowth,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundednessCertificate {
    pub class: Boundedness,
    /// `‖z‖₂` of the divergence-free part.
    pub divergence_free_norm: f64,
    /// `‖z‖_∞`, the growth rate of `‖j(t)‖_∞` for large `t`.
    pub growth_rate: f64,
    /// Uniform bound on `‖j(t)‖_∞`, present for the bounded class.
    pub series_bound: Option<f64>,
}

/// Bounded iff `v₀` is a gradient up to [`GRADIENT_TOLERANCE`].
pub fn classify_boundedness(v0: &VectorField<TorusGrid>, c: f64) -> Result<BoundednessCertificate> {
    let sol = TorusModeSolution::new(v0, 0.0, c)?;
    let z = sol.divergence_free_part();
    let norm = z.l2_norm();
    let bounded = norm < GRADIENT_TOLERANCE;
    Ok(BoundednessCertificate {
        class: if bounded {
            Boundedness::Bounded
        } else {
            Boundedness::LinearGrowth
        },
        divergence_free_norm: norm,
        growth_rate: z.max_norm(),
        series_bound: bounded.then(|| sol.gradient_bound()),
    })
}

/// `(φ′(1) + φ(1)²/λ(1)) / λ(1)²`.
pub fn torus_curvature_coefficient(model: &PressureModel) -> Result<f64> {
    let lam = model.lambda(1.0)?;
    let phi = model.phi(1.0)?;
    Ok((model.phi_prime(1.0)? + phi * phi / lam) / (lam * lam))
}

/// Full curvature quadrature against the reduced form `coefficient · ∫(div v)²`.
#[derive(Clone, Debug, Serialize)]
pub struct ShearCurvatureCheck {
    pub report: CurvatureReport,
    pub coefficient: f64,
    pub div_integral: f64,
    pub predicted: f64,
    pub relative_gap: f64,
}

/// Sectional curvature of `U = (ω(x)∂_y, 1/λ(1))`, `V = (v, 1/λ(1))` at `ρ ≡ 1`.
pub fn shear_curvature_check(
    omega: &ScalarField<TorusGrid>,
    v: &VectorField<TorusGrid>,
    model: &PressureModel,
) -> Result<ShearCurvatureCheck> {
    let grid = omega.grid();
    let bg = steady_shear_torus(omega, model)?;
    let f = ScalarField::constant(grid, 1.0 / model.lambda(1.0)?);
    let a = TangentVector::new(bg.u.clone(), f.clone())?;
    let b = TangentVector::new(v.clone(), f)?;
    let report = sectional_curvature(&a, &b, &bg.rho, model)?;
    let coefficient = torus_curvature_coefficient(model)?;
    let d = grid.div(v.comps());
    let div_integral = grid.integrate(&d.iter().map(|x| x * x).collect::<Vec<_>>());
    let predicted = coefficient * div_integral;
    let scale = predicted.abs().max(report.total.abs());
    let relative_gap = if scale > 0.0 {
        (report.total - predicted).abs() / scale
    } else {
        0.0
    };
    Ok(ShearCurvatureCheck {
        report,
        coefficient,
        div_integral,
        predicted,
        relative_gap,
    })
}

/// Numerical linearized flow against the closed-form series.
#[derive(Clone, Debug, Serialize)]
pub struct ModeCrosscheck {
    /// Largest `‖j_num − j_series‖₂ / ‖j_series‖₂` over the samples.
    pub max_relative_gap: f64,
    /// Least-squares slope of `‖j_num(t)‖₂`.
    pub numeric_slope: f64,
    /// `‖z‖₂`, the slope predicted by the series.
    pub predicted_slope: f64,
    /// `(t, ‖j_series‖₂, ‖j_num‖₂)`.
    pub samples: Vec<(f64, f64, f64)>,
}

/// Integrates the linearized equations along the shear flow with
/// `p = c²ρ²/2` and compares `j` with [`torus_jacobi`].
pub fn mode_numeric_crosscheck(
    v0: &VectorField<TorusGrid>,
    omega: f64,
    c: f64,
    dt: f64,
    t_end: f64,
    record_every: usize,
) -> Result<ModeCrosscheck> {
    let grid = v0.grid();
    let model = PressureModel::polytropic(c * c / 2.0, 2.0)?;
    let bg = steady_shear_torus(&ScalarField::constant(grid, omega), &model)?;
    let sol = TorusModeSolution::new(v0, omega, c)?;
    let runs = integrate_jacobi(&bg, v0, &model, dt, t_end, record_every)?;
    let mut max_relative_gap: f64 = 0.0;
    let mut samples = Vec::with_capacity(runs.len());
    for s in &runs {
        let t = s.time();
        let exact = sol.eval(t);
        let (a, b) = (exact.l2_norm(), s.pert.j.l2_norm());
        let gap = exact.sub(&s.pert.j)?.l2_norm();
        if a > 0.0 {
            max_relative_gap = max_relative_gap.max(gap / a);
        } else if gap > 0.0 {
            max_relative_gap = f64::INFINITY;
        }
        samples.push((t, a, b));
    }
    let pts: Vec<(f64, f64)> = samples.iter().map(|s| (s.0, s.2)).collect();
    Ok(ModeCrosscheck {
        max_relative_gap,
        numeric_slope: slope(&pts),
        predicted_slope: sol.divergence_free_part().l2_norm(),
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::grad;

    fn grid() -> TorusGrid {
        TorusGrid::new(16, 16).unwrap()
    }

    #[test]
    fn single_gradient_mode() {
        let g = grid();
        let c = 1.5;
        let v0 = grad(&ScalarField::from_fn(g, |p| p[0].cos()));
        for t in [0.0, 0.7, 2.3] {
            let j = torus_jacobi(&v0, 0.0, c, t).unwrap();
            let want = VectorField::from_fn(g, |p| vec![-(c * t).sin() / c * p[0].sin(), 0.0]);
            assert!(j.sub(&want).unwrap().max_norm() < 1e-13);
        }
        let cert = classify_boundedness(&v0, c).unwrap();
        assert_eq!(cert.class, Boundedness::Bounded);
        assert!((cert.series_bound.unwrap() - 1.0 / c).abs() < 1e-13);
    }

    #[test]
    fn divergence_free_grows_linearly() {
        let g = grid();
        let v0 = VectorField::from_fn(g, |_| vec![0.0, 1.0]);
        let j = torus_jacobi(&v0, 0.8, 2.0, 3.0).unwrap();
        let want = VectorField::from_fn(g, |_| vec![0.0, 3.0]);
        assert!(j.sub(&want).unwrap().max_norm() < 1e-12);
        let cert = classify_boundedness(&VectorField::from_fn(g, |p| vec![-p[1].sin(), 0.0]), 1.0)
            .unwrap();
        assert_eq!(cert.class, Boundedness::LinearGrowth);
        assert!(cert.series_bound.is_none());
    }

    #[test]
    fn zero_and_initial_derivative() {
        let g = grid();
        assert_eq!(
            torus_jacobi(&VectorField::zeros(g), 1.0, 1.0, 5.0)
                .unwrap()
                .max_norm(),
            0.0
        );
        let v0 = VectorField::from_fn(g, |p| {
            vec![(p[0] + 2.0 * p[1]).sin(), p[0].cos() - p[1].sin()]
        });
        let sol = TorusModeSolution::new(&v0, 0.6, 1.3).unwrap();
        assert!(sol.eval(0.0).max_norm() < 1e-14);
        let h = 1e-4;
        let d = sol.eval(h).sub(&sol.eval(-h)).unwrap().scale(0.5 / h);
        assert!(d.sub(&v0).unwrap().max_norm() < 1e-6);
    }

    #[test]
    fn coefficient_values() {
        let c: f64 = 1.7;
        let m = PressureModel::polytropic(c * c / 2.0, 2.0).unwrap();
        assert!((torus_curvature_coefficient(&m).unwrap() - c * c / 4.0).abs() < 1e-12);
        let m = PressureModel::polytropic(0.4, 3.0).unwrap();
        assert!(torus_curvature_coefficient(&m).unwrap().abs() < 1e-14);
    }

    #[test]
    fn shear_curvature_matches_reduced_form() {
        let g = grid();
        let omega = ScalarField::from_fn(g, |p| 0.5 + 0.3 * p[0].sin());
        let v = VectorField::from_fn(g, |p| {
            vec![(2.0 * p[0]).cos() * p[1].sin(), (p[0] - p[1]).cos()]
        });
        let m = PressureModel::polytropic(0.7, 2.0).unwrap();
        let chk = shear_curvature_check(&omega, &v, &m).unwrap();
        assert!(chk.relative_gap < 1e-8, "{chk:?}");
    }

    #[test]
    fn crosscheck_zero_and_gradient() {
        let g = TorusGrid::new(8, 8).unwrap();
        let r = mode_numeric_crosscheck(&VectorField::zeros(g), 0.5, 1.0, 0.05, 0.5, 5).unwrap();
        assert_eq!(r.max_relative_gap, 0.0);
        let v0 = grad(&ScalarField::from_fn(g, |p| (p[0] + p[1]).sin()));
        let r = mode_numeric_crosscheck(&v0, 0.5, 1.0, 0.01, 1.0, 10).unwrap();
        assert!(r.max_relative_gap < 1e-5, "{}", r.max_relative_gap);
    }
}
