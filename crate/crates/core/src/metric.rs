//! The weighted metric on (diffeomorphism, function) pairs, its Christoffel
//! map and sectional curvature.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::{same_grid, CircleGrid, Grid, ScalarField, VectorField};
use crate::pressure::PressureModel;
use crate::random;

/// A tangent vector `(u, f)`: a vector field on the base and a scalar function.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentVector<G: Grid> {
    pub u: VectorField<G>,
    pub f: ScalarField<G>,
}

impl<G: Grid> TangentVector<G> {
    pub fn new(u: VectorField<G>, f: ScalarField<G>) -> Result<Self> {
        same_grid(&u.grid(), &f.grid())?;
        Ok(Self { u, f })
    }

    pub fn grid(&self) -> G {
        self.u.grid()
    }

    pub fn scale(&self, a: f64) -> Self {
        Self {
            u: self.u.scale(a),
            f: self.f.scale(a),
        }
    }
}

/// Itemized sectional curvature `⟨⟨R(U,V)V,U⟩⟩`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurvatureReport {
    /// Intrinsic curvature of the base; zero on every supported grid.
    pub term_r: f64,
    pub term_div: f64,
    pub term_q: f64,
    pub term_grad: f64,
    pub total: f64,
    /// `total` divided by the Gram determinant; NaN for a degenerate plane.
    pub normalized: f64,
}

pub(crate) fn pointwise<G: Grid>(
    rho: &ScalarField<G>,
    f: impl Fn(f64) -> Result<f64>,
) -> Result<Vec<f64>> {
    rho.values().iter().map(|&r| f(r)).collect()
}

fn check_grids<G: Grid>(rho: &ScalarField<G>, tangents: &[&TangentVector<G>]) -> Result<()> {
    for t in tangents {
        same_grid(&rho.grid(), &t.grid())?;
    }
    Ok(())
}

/// `∫ λ(ρ) f g + ρ⟨u, v⟩`.
pub fn metric_inner<G: Grid>(
    a: &TangentVector<G>,
    b: &TangentVector<G>,
    rho: &ScalarField<G>,
    model: &PressureModel,
) -> Result<f64> {
    check_grids(rho, &[a, b])?;
    let grid = rho.grid();
    let lam = pointwise(rho, |r| model.lambda(r))?;
    let uv = grid.dot(a.u.comps(), b.u.comps());
    let integrand: Vec<f64> = (0..grid.len())
        .map(|k| lam[k] * a.f.values()[k] * b.f.values()[k] + rho.values()[k] * uv[k])
        .collect();
    Ok(grid.integrate(&integrand))
}

/// The Christoffel map `Γ_ρ((u,f),(v,g)) = (z, j)` with
/// `z = (1/ρ) grad(φ f g)` and `j = (φ/λ)(f div v + g div u)`.
pub fn christoffel<G: Grid>(
    a: &TangentVector<G>,
    b: &TangentVector<G>,
    rho: &ScalarField<G>,
    model: &PressureModel,
) -> Result<TangentVector<G>> {
    check_grids(rho, &[a, b])?;
    let grid = rho.grid();
    let lam = pointwise(rho, |r| model.lambda(r))?;
    let phi = pointwise(rho, |r| model.phi(r))?;
    let (f, g) = (a.f.values(), b.f.values());
    let div_u = grid.div(a.u.comps());
    let div_v = grid.div(b.u.comps());
    let j: Vec<f64> = (0..grid.len())
        .map(|k| phi[k] / lam[k] * (f[k] * div_v[k] + g[k] * div_u[k]))
        .collect();
    let phifg: Vec<f64> = (0..grid.len()).map(|k| phi[k] * f[k] * g[k]).collect();
    let z = grid
        .grad(&phifg)
        .into_iter()
        .map(|c| c.iter().zip(rho.values()).map(|(a, r)| a / r).collect())
        .collect();
    Ok(TangentVector {
        u: VectorField::from_raw(grid, z),
        f: ScalarField::from_raw(grid, j),
    })
}

/// Integration-by-parts form `∫ φ (h f div v + h g div u − f g div w)` of
/// `⟨⟨Γ_ρ(U,V), W⟩⟩`.
pub fn christoffel_weak<G: Grid>(
    a: &TangentVector<G>,
    b: &TangentVector<G>,
    c: &TangentVector<G>,
    rho: &ScalarField<G>,
    model: &PressureModel,
) -> Result<f64> {
    check_grids(rho, &[a, b, c])?;
    let grid = rho.grid();
    let phi = pointwise(rho, |r| model.phi(r))?;
    let (f, g, h) = (a.f.values(), b.f.values(), c.f.values());
    let div_u = grid.div(a.u.comps());
    let div_v = grid.div(b.u.comps());
    let div_w = grid.div(c.u.comps());
    let integrand: Vec<f64> = (0..grid.len())
        .map(|k| {
            phi[k] * (h[k] * f[k] * div_v[k] + h[k] * g[k] * div_u[k] - f[k] * g[k] * div_w[k])
        })
        .collect();
    Ok(grid.integrate(&integrand))
}

/// `Q(u,v) = div(∇_u v) − u(div v) − (div u)(div v)`, evaluated through the
/// flat-base identity `Q(u,v) = tr(∇u ∇v) − (div u)(div v)`, which is
/// symmetric node by node.
pub fn q_operator<G: Grid>(u: &VectorField<G>, v: &VectorField<G>) -> Result<ScalarField<G>> {
    same_grid(&u.grid(), &v.grid())?;
    Ok(ScalarField::from_raw(
        u.grid(),
        q_raw(&u.grid(), u.comps(), v.comps()),
    ))
}

/// Columns `∇_{e_j} u` of the covariant derivative, one per coordinate axis.
fn covariant_columns<G: Grid>(grid: &G, u: &[Vec<f64>]) -> Vec<Vec<Vec<f64>>> {
    let dim = grid.dim();
    (0..dim)
        .map(|j| {
            let e: Vec<Vec<f64>> = (0..dim)
                .map(|i| vec![if i == j { 1.0 } else { 0.0 }; grid.len()])
                .collect();
            grid.covariant(&e, u)
        })
        .collect()
}

fn q_raw<G: Grid>(grid: &G, u: &[Vec<f64>], v: &[Vec<f64>]) -> Vec<f64> {
    let du = covariant_columns(grid, u);
    let dv = covariant_columns(grid, v);
    let div_v = grid.div(v);
    let div_u = grid.div(u);
    let dim = grid.dim();
    (0..grid.len())
        .map(|k| {
            let mut tr = 0.0;
            for i in 0..dim {
                for j in 0..dim {
                    tr += du[j][i][k] * dv[i][j][k];
                }
            }
            tr - div_u[k] * div_v[k]
        })
        .collect()
}

/// Derivative of `Φ = ∫ α φ_fn(ρ)` along the flow of `w`:
/// `−∫ div(ρw) α φ_fn′(ρ)`.
pub fn density_functional_derivative<G: Grid>(
    alpha: &ScalarField<G>,
    phi_fn_prime: impl Fn(f64) -> f64,
    rho: &ScalarField<G>,
    w: &VectorField<G>,
) -> Result<f64> {
    same_grid(&alpha.grid(), &rho.grid())?;
    same_grid(&w.grid(), &rho.grid())?;
    if let Some(r) = rho.values().iter().find(|&&r| !(r > 0.0)) {
        return Err(Error::Domain(format!(
            "density must be positive, found {r}"
        )));
    }
    let grid = rho.grid();
    let rho_w: Vec<Vec<f64>> = w
        .comps()
        .iter()
        .map(|c| c.iter().zip(rho.values()).map(|(a, r)| a * r).collect())
        .collect();
    let d = grid.div(&rho_w);
    let integrand: Vec<f64> = (0..grid.len())
        .map(|k| -d[k] * alpha.values()[k] * phi_fn_prime(rho.values()[k]))
        .collect();
    Ok(grid.integrate(&integrand))
}

/// Unnormalized sectional curvature of the plane spanned by `U = (u,f)` and
/// `V = (v,g)` at density `ρ`, itemized by term. The base is flat, so the
/// intrinsic term is zero.
pub fn sectional_curvature<G: Grid>(
    a: &TangentVector<G>,
    b: &TangentVector<G>,
    rho: &ScalarField<G>,
    model: &PressureModel,
) -> Result<CurvatureReport> {
    check_grids(rho, &[a, b])?;
    let grid = rho.grid();
    let n = grid.len();
    let r = rho.values();
    let lam = pointwise(rho, |x| model.lambda(x))?;
    let phi = pointwise(rho, |x| model.phi(x))?;
    let dphi = pointwise(rho, |x| model.phi_prime(x))?;
    let (u, v) = (a.u.comps(), b.u.comps());
    let (f, g) = (a.f.values(), b.f.values());

    let div_u = grid.div(u);
    let div_v = grid.div(v);
    let div_integrand: Vec<f64> = (0..n)
        .map(|k| {
            let coef = r[k] * dphi[k] + phi[k] * phi[k] / lam[k];
            let s = f[k] * div_v[k] - g[k] * div_u[k];
            coef * s * s
        })
        .collect();

    let quu = q_raw(&grid, u, u);
    let qvv = q_raw(&grid, v, v);
    let quv = q_raw(&grid, u, v);
    let q_integrand: Vec<f64> = (0..n)
        .map(|k| {
            phi[k] * (f[k] * f[k] * qvv[k] + g[k] * g[k] * quu[k] - 2.0 * f[k] * g[k] * quv[k])
        })
        .collect();

    let grad_f = grid.grad(f);
    let grad_g = grid.grad(g);
    let mixed: Vec<Vec<f64>> = (0..grid.dim())
        .map(|i| {
            (0..n)
                .map(|k| f[k] * grad_g[i][k] - g[k] * grad_f[i][k])
                .collect()
        })
        .collect();
    let mixed_sq = grid.dot(&mixed, &mixed);
    let grad_integrand: Vec<f64> = (0..n)
        .map(|k| phi[k] * phi[k] / r[k] * mixed_sq[k])
        .collect();

    let term_div = grid.integrate(&div_integrand);
    let term_q = grid.integrate(&q_integrand);
    let term_grad = grid.integrate(&grad_integrand);
    let total = term_div + term_q + term_grad;

    let uu = metric_inner(a, a, rho, model)?;
    let vv = metric_inner(b, b, rho, model)?;
    let uv = metric_inner(a, b, rho, model)?;
    let gram = uu * vv - uv * uv;
    let normalized = if gram > 1e-14 * uu * vv {
        total / gram
    } else {
        f64::NAN
    };

    Ok(CurvatureReport {
        term_r: 0.0,
        term_div,
        term_q,
        term_grad,
        total,
        normalized,
    })
}

/// One trial of a curvature scan.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanRecord {
    pub trial: usize,
    pub seed: u64,
    pub term_r: f64,
    pub term_div: f64,
    pub term_q: f64,
    pub term_grad: f64,
    pub total: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanReport {
    pub trials: usize,
    pub seed: u64,
    pub grid_points: usize,
    pub min_total: f64,
    pub max_abs_term_div: f64,
    pub negative_count: usize,
    #[serde(skip)]
    pub records: Vec<ScanRecord>,
}

impl ScanReport {
    pub fn write_csv<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "trial,seed,term_r,term_div,term_q,term_grad,total")?;
        for r in &self.records {
            writeln!(
                out,
                "{},{},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}",
                r.trial, r.seed, r.term_r, r.term_div, r.term_q, r.term_grad, r.total
            )?;
        }
        Ok(())
    }
}

/// A random one-dimensional section `(U, V, ρ)` with modes `|k| ≤ n/4`;
/// the density is `1 + 0.5·r/max|r|`.
pub fn random_section_1d(
    grid: CircleGrid,
    seed: u64,
) -> (
    TangentVector<CircleGrid>,
    TangentVector<CircleGrid>,
    ScalarField<CircleGrid>,
) {
    let mut rng = random::rng(seed);
    let band = random::default_band(grid.n());
    let u = random::circle_vector(grid, band, &mut rng);
    let f = random::circle_field(grid, band, &mut rng);
    let v = random::circle_vector(grid, band, &mut rng);
    let g = random::circle_field(grid, band, &mut rng);
    let rho = random::positive_density(&random::circle_field(grid, band, &mut rng), 0.5);
    (TangentVector { u, f }, TangentVector { u: v, f: g }, rho)
}

/// Evaluates the sectional curvature on `trials` random sections; trial `i`
/// uses seed `seed + i`.
pub fn curvature_sign_scan_1d(
    model: &PressureModel,
    grid: CircleGrid,
    trials: usize,
    seed: u64,
) -> Result<ScanReport> {
    let mut records = Vec::with_capacity(trials);
    for trial in 0..trials {
        let s = seed.wrapping_add(trial as u64);
        let (a, b, rho) = random_section_1d(grid, s);
        let rep = sectional_curvature(&a, &b, &rho, model)?;
        records.push(ScanRecord {
            trial,
            seed: s,
            term_r: rep.term_r,
            term_div: rep.term_div,
            term_q: rep.term_q,
            term_grad: rep.term_grad,
            total: rep.total,
        });
    }
    let min_total = records
        .iter()
        .map(|r| r.total)
        .fold(f64::INFINITY, f64::min);
    let max_abs_term_div = records.iter().map(|r| r.term_div.abs()).fold(0.0, f64::max);
    let negative_count = records.iter().filter(|r| r.total < 0.0).count();
    Ok(ScanReport {
        trials,
        seed,
        grid_points: grid.n(),
        min_total,
        max_abs_term_div,
        negative_count,
        records,
    })
}

/// Potential energy `Φ = ∫ ρ ψ(ρ)`.
pub fn potential_energy<G: Grid>(rho: &ScalarField<G>, model: &PressureModel) -> Result<f64> {
    let integrand = pointwise(rho, |r| Ok(r * model.potential_density(r)?))?;
    Ok(rho.grid().integrate(&integrand))
}

/// Sectional curvature of the circle's diffeomorphism group in the Jacobi
/// metric at energy `E`, for velocity fields `u, v` that are orthonormal in the
/// `ρ`-weighted inner product (checked to `1e-8`).
pub fn jacobi_metric_curvature_1d(
    u: &ScalarField<CircleGrid>,
    v: &ScalarField<CircleGrid>,
    rho: &ScalarField<CircleGrid>,
    model: &PressureModel,
    energy: f64,
) -> Result<f64> {
    same_grid(&u.grid(), &rho.grid())?;
    same_grid(&v.grid(), &rho.grid())?;
    let grid = rho.grid();
    let r = rho.values();
    let (uu, vv, uv) = (
        grid.integrate(&weighted(r, u.values(), u.values())),
        grid.integrate(&weighted(r, v.values(), v.values())),
        grid.integrate(&weighted(r, u.values(), v.values())),
    );
    if (uu - 1.0).abs() > 1e-8 || (vv - 1.0).abs() > 1e-8 || uv.abs() > 1e-8 {
        return Err(Error::Precondition(format!(
            "fields must be ρ-orthonormal: ⟨u,u⟩ = {uu}, ⟨v,v⟩ = {vv}, ⟨u,v⟩ = {uv}"
        )));
    }
    let phi_eta = potential_energy(rho, model)?;
    let gap = energy - phi_eta;
    if !(gap > 0.0) {
        return Err(Error::Domain(format!(
            "energy {energy} must exceed the potential {phi_eta}"
        )));
    }
    let dp = pointwise(rho, |x| model.pressure_prime(x))?;
    let drho = grid.partial(0, r);
    let du = grid.partial(0, u.values());
    let dv = grid.partial(0, v.values());
    let n = grid.len();
    let kinetic: Vec<f64> = (0..n)
        .map(|k| r[k] * dp[k] * (du[k] * du[k] + dv[k] * dv[k]))
        .collect();
    let su: Vec<f64> = (0..n).map(|k| dp[k] * drho[k] * u.values()[k]).collect();
    let sv: Vec<f64> = (0..n).map(|k| dp[k] * drho[k] * v.values()[k]).collect();
    let neg: Vec<f64> = (0..n).map(|k| (dp[k] * drho[k]).powi(2) / r[k]).collect();
    let (iu, iv) = (grid.integrate(&su), grid.integrate(&sv));
    let bracket = 2.0 * grid.integrate(&kinetic)
        + (3.0 * iv * iv + 3.0 * iu * iu - grid.integrate(&neg)) / gap;
    Ok(bracket / (4.0 * gap * gap))
}

fn weighted(w: &[f64], a: &[f64], b: &[f64]) -> Vec<f64> {
    w.iter()
        .zip(a)
        .zip(b)
        .map(|((w, a), b)| w * a * b)
        .collect()
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::fields::{DiscGrid, TorusGrid};
    use crate::pressure::Catalog;

    fn circle(n: usize) -> CircleGrid {
        CircleGrid::new(n).unwrap()
    }

    fn tangent(
        grid: CircleGrid,
        u: impl Fn(f64) -> f64,
        f: impl Fn(f64) -> f64,
    ) -> TangentVector<CircleGrid> {
        TangentVector {
            u: VectorField::from_fn(grid, |x| vec![u(x[0])]),
            f: ScalarField::from_fn(grid, |x| f(x[0])),
        }
    }

    #[test]
    fn inner_product_examples() {
        let g = circle(32);
        let rho = ScalarField::constant(g, 1.0);
        let lin = PressureModel::catalog(Catalog::Linear).unwrap();
        let a = tangent(g, |_| 1.0, |_| 0.0);
        assert!((metric_inner(&a, &a, &rho, &lin).unwrap() - 2.0 * PI).abs() < 1e-12);
        let three = PressureModel::catalog(Catalog::ThreeOverRho).unwrap();
        let b = tangent(g, |_| 0.0, f64::sin);
        assert!((metric_inner(&b, &b, &rho, &three).unwrap() - 3.0 * PI).abs() < 1e-12);
        let bad = ScalarField::constant(g, 0.0);
        assert!(matches!(
            metric_inner(&b, &b, &bad, &three),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn christoffel_examples() {
        let g = circle(32);
        let rho = ScalarField::constant(g, 1.0);
        let a = tangent(g, f64::cos, f64::sin);
        let lin = PressureModel::catalog(Catalog::Linear).unwrap();
        let gam = christoffel(&a, &a, &rho, &lin).unwrap();
        assert!(gam.u.max_norm() == 0.0 && gam.f.max_abs() == 0.0);
        let three = PressureModel::catalog(Catalog::ThreeOverRho).unwrap();
        let b = tangent(g, |_| 0.0, f64::sin);
        let gam = christoffel(&b, &b, &rho, &three).unwrap();
        let expect = ScalarField::from_fn(g, |x| 3.0 * (2.0 * x[0]).sin());
        assert!(gam.u.component(0).sub(&expect).unwrap().max_abs() < 1e-12);
        assert!(gam.f.max_abs() < 1e-15);
    }

    #[test]
    fn rotation_field_on_disc_has_constant_q() {
        let d = DiscGrid::new(32, 16).unwrap();
        let a = 2.5;
        let z = VectorField::from_fn(d, |_| vec![0.0, a]);
        let q = q_operator(&z, &z).unwrap();
        assert!(q.map(|x| x + 2.0 * a * a).max_abs() < 1e-10);
    }

    #[test]
    fn q_vanishes_for_constants_on_torus() {
        let t = TorusGrid::new(8, 8).unwrap();
        let c = VectorField::from_fn(t, |_| vec![0.3, -1.2]);
        assert!(q_operator(&c, &c).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn one_dimensional_examples() {
        let g = circle(64);
        let rho = ScalarField::constant(g, 1.0);
        let three = PressureModel::catalog(Catalog::ThreeOverRho).unwrap();
        let a = tangent(g, |_| 0.0, |_| 1.0);
        let b = tangent(g, |_| 0.0, f64::sin);
        let rep = sectional_curvature(&a, &b, &rho, &three).unwrap();
        assert!(rep.term_div.abs() < 1e-12 && rep.term_q.abs() < 1e-12);
        assert!((rep.term_grad - 9.0 * PI).abs() < 1e-10);
        assert!(
            (rep.total - (rep.term_r + rep.term_div + rep.term_q + rep.term_grad)).abs() < 1e-12
        );
    }

    #[test]
    fn degenerate_plane_has_zero_curvature() {
        let g = circle(32);
        let (a, _, rho) = random_section_1d(g, 11);
        let m = PressureModel::polytropic(1.0, 2.0).unwrap();
        let rep = sectional_curvature(&a, &a, &rho, &m).unwrap();
        assert!(rep.total.abs() < 1e-10);
        assert!(rep.normalized.is_nan());
    }

    #[test]
    fn disjoint_supports_give_zero() {
        let g = circle(256);
        // Smooth bumps supported in disjoint arcs.
        let bump = |c: f64| {
            move |x: f64| {
                let s = (x - c).abs();
                if s < 1.0 {
                    (-1.0 / (1.0 - s * s)).exp()
                } else {
                    0.0
                }
            }
        };
        let a = tangent(g, bump(1.5), bump(1.5));
        let b = tangent(g, bump(4.5), bump(4.5));
        let rho = ScalarField::from_fn(g, |x| 1.0 + 0.2 * x[0].sin());
        let m = PressureModel::polytropic(1.0, 2.0).unwrap();
        let rep = sectional_curvature(&a, &b, &rho, &m).unwrap();
        assert!(rep.total.abs() < 1e-10, "{}", rep.total);
    }

    #[test]
    fn jacobi_metric_constant_density() {
        let g = circle(64);
        let rho = ScalarField::constant(g, 1.0);
        let s = (1.0 / PI).sqrt();
        let u = ScalarField::from_fn(g, |x| s * x[0].cos());
        let v = ScalarField::from_fn(g, |x| s * (2.0 * x[0]).sin());
        let m = PressureModel::polytropic(0.5, 2.0).unwrap();
        let phi = potential_energy(&rho, &m).unwrap();
        let e = phi + 2.0;
        let k = jacobi_metric_curvature_1d(&u, &v, &rho, &m, e).unwrap();
        // p′(1) = 1, ∫(u′² + v′²) = 1 + 4
        let expect = 2.0 * 5.0 / (4.0 * 4.0);
        assert!((k - expect).abs() < 1e-12);
        assert!(matches!(
            jacobi_metric_curvature_1d(&u, &v, &rho, &m, phi),
            Err(Error::Domain(_))
        ));
        let u2 = u.scale(2.0);
        assert!(matches!(
            jacobi_metric_curvature_1d(&u2, &v, &rho, &m, e),
            Err(Error::Precondition(_))
        ));
    }
}
