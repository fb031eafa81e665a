//! Closed forms for the one-dimensional flow with `p(ρ) = ρ³/3` (`λ = 3/ρ`).
//!
//! The Riemann invariants `α± = u ± ρ` each solve Burgers' equation
//! `α_t + α α_x = 0`, so they are constant along the characteristics
//! `ξ(t,x) = x + tα₀(x)`. Everything here is evaluated from the trigonometric
//! interpolants of the initial data, so results are exact up to root finding.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::{same_grid, CircleGrid, ScalarField, TrigPoly, VectorField};
use crate::geodesic::FluidState;

/// Initial Riemann invariants `α± = u₀ ± ρ₀`.
#[derive(Clone, Debug, PartialEq)]
pub struct RiemannData {
    pub plus: ScalarField<CircleGrid>,
    pub minus: ScalarField<CircleGrid>,
}

impl RiemannData {
    /// `(u, ρ) = ((α₊ + α₋)/2, (α₊ − α₋)/2)`.
    pub fn velocity_density(&self) -> (ScalarField<CircleGrid>, ScalarField<CircleGrid>) {
        let u = self
            .plus
            .zip(&self.minus, |a, b| 0.5 * (a + b))
            .expect("same grid");
        let rho = self
            .plus
            .zip(&self.minus, |a, b| 0.5 * (a - b))
            .expect("same grid");
        (u, rho)
    }
}

pub fn riemann_invariants(
    u0: &ScalarField<CircleGrid>,
    rho0: &ScalarField<CircleGrid>,
) -> Result<RiemannData> {
    same_grid(&u0.grid(), &rho0.grid())?;
    if let Some(r) = rho0.values().iter().find(|&&r| !(r > 0.0)) {
        return Err(Error::Domain(format!(
            "density must be positive, found {r}"
        )));
    }
    Ok(RiemannData {
        plus: u0.add(rho0)?,
        minus: u0.sub(rho0)?,
    })
}

/// `1/max(−α₀′)`, or infinity when `α₀` is nowhere decreasing.
pub fn shock_time(alpha0: &ScalarField<CircleGrid>) -> f64 {
    CharacteristicFlow::new(alpha0).shock_time()
}

/// Shock time of the system: the earlier of the two invariants.
pub fn system_shock_time(data: &RiemannData) -> f64 {
    shock_time(&data.plus).min(shock_time(&data.minus))
}

/// The characteristic map `ξ(t,x) = x + tα₀(x)` of one invariant.
#[derive(Clone, Debug)]
pub struct CharacteristicFlow {
    alpha: TrigPoly,
    shock_time: f64,
}

impl CharacteristicFlow {
    pub fn new(alpha0: &ScalarField<CircleGrid>) -> Self {
        Self::from_poly(TrigPoly::from_samples(alpha0.values()))
    }

    pub fn from_poly(alpha: TrigPoly) -> Self {
        let steepest = alpha.max_of_derivative(1, -1.0);
        let scale = alpha.coefficient_bound().max(1.0);
        let shock_time = if steepest > 1e-14 * scale {
            1.0 / steepest
        } else {
            f64::INFINITY
        };
        Self { alpha, shock_time }
    }

    pub fn shock_time(&self) -> f64 {
        self.shock_time
    }

    pub fn alpha(&self) -> &TrigPoly {
        &self.alpha
    }

    pub fn forward(&self, t: f64, x: f64) -> f64 {
        x + t * self.alpha.eval(x)
    }

    /// The lifted inverse `χ(t,x)` solving `x = χ + tα₀(χ)`.
    pub fn invert(&self, t: f64, x: f64) -> Result<f64> {
        if t >= self.shock_time {
            return Err(Error::ShockReached {
                time: t,
                stretch: 1.0 - t / self.shock_time,
            });
        }
        if t == 0.0 {
            return Ok(x);
        }
        let bound = self.alpha.coefficient_bound();
        let (mut lo, mut hi) = (x - t.abs() * bound, x + t.abs() * bound);
        let residual = |c: f64| c + t * self.alpha.eval(c) - x;
        let tol = 1e-13 * (1.0 + x.abs());
        let mut c = (x - t * self.alpha.eval(x)).clamp(lo, hi);
        for _ in 0..200 {
            let r = residual(c);
            if r.abs() <= tol {
                return Ok(c);
            }
            if r > 0.0 {
                hi = c;
            } else {
                lo = c;
            }
            let slope = 1.0 + t * self.alpha.derivative_at(c, 1);
            let newton = c - r / slope;
            c = if slope > 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if hi - lo <= f64::EPSILON * (1.0 + x.abs()) {
                return Ok(c);
            }
        }
        Err(Error::Convergence(format!(
            "characteristic inverse at t = {t}, x = {x}"
        )))
    }
}

fn flows(data: &RiemannData) -> (CharacteristicFlow, CharacteristicFlow) {
    (
        CharacteristicFlow::new(&data.plus),
        CharacteristicFlow::new(&data.minus),
    )
}

fn check_time(t: f64, plus: &CharacteristicFlow, minus: &CharacteristicFlow) -> Result<()> {
    let ts = plus.shock_time().min(minus.shock_time());
    if !(t >= 0.0) {
        return Err(Error::Invalid(format!("time must be nonnegative, got {t}")));
    }
    if t >= ts {
        return Err(Error::ShockReached {
            time: t,
            stretch: 1.0 - t / ts,
        });
    }
    Ok(())
}

/// The exact solution `α±(t,x) = α±₀(χ±(t,x))` at the grid nodes.
pub fn exact_state(
    u0: &ScalarField<CircleGrid>,
    rho0: &ScalarField<CircleGrid>,
    t: f64,
) -> Result<FluidState<CircleGrid>> {
    let data = riemann_invariants(u0, rho0)?;
    let (plus, minus) = flows(&data);
    check_time(t, &plus, &minus)?;
    let grid = u0.grid();
    let mut u = Vec::with_capacity(grid.n());
    let mut rho = Vec::with_capacity(grid.n());
    for x in grid.points() {
        let ap = plus.alpha().eval(plus.invert(t, x)?);
        let am = minus.alpha().eval(minus.invert(t, x)?);
        u.push(0.5 * (ap + am));
        rho.push(0.5 * (ap - am));
    }
    let rho = ScalarField::from_raw(grid, rho);
    Ok(FluidState {
        time: t,
        u: VectorField::from_raw(grid, vec![u]),
        q: rho.clone(),
        rho,
    })
}

/// The exact Jacobi field with `J(0) = 0`, `J′(0) = (v₀, 0)`:
/// `ρ(t,x) j(t,x) = ½ ∫_{χ₊(t,x)}^{χ₋(t,x)} v₀`.
pub fn exact_jacobi(
    u0: &ScalarField<CircleGrid>,
    rho0: &ScalarField<CircleGrid>,
    v0: &ScalarField<CircleGrid>,
    t: f64,
) -> Result<VectorField<CircleGrid>> {
    same_grid(&u0.grid(), &v0.grid())?;
    let data = riemann_invariants(u0, rho0)?;
    let (plus, minus) = flows(&data);
    check_time(t, &plus, &minus)?;
    let v = TrigPoly::from_samples(v0.values());
    let grid = u0.grid();
    let mut j = Vec::with_capacity(grid.n());
    for x in grid.points() {
        let (cp, cm) = (plus.invert(t, x)?, minus.invert(t, x)?);
        let rho = 0.5 * (plus.alpha().eval(cp) - minus.alpha().eval(cm));
        j.push(0.5 * v.integral(cp, cm) / rho);
    }
    Ok(VectorField::from_raw(grid, vec![j]))
}

/// `{2πm/n : m = 1..=m_max}`.
pub fn conjugate_times(n: u32, m_max: u32) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::Invalid("mode number must be at least 1".into()));
    }
    Ok((1..=m_max)
        .map(|m| 2.0 * PI * m as f64 / n as f64)
        .collect())
}

/// Jacobi field along `u ≡ ρ ≡ 1` with `v₀ = cos nx`: `sin(nt) cos(n(x−t))/n`.
pub fn conjugate_j(n: u32, t: f64, x: f64) -> f64 {
    let n = n as f64;
    (n * t).sin() * (n * (x - t)).cos() / n
}

/// Function component of the same Jacobi field: `(4/(3n)) sin(nx) sin²(nt/2)`.
pub fn conjugate_g(n: u32, t: f64, x: f64) -> f64 {
    let n = n as f64;
    4.0 / (3.0 * n) * (n * x).sin() * (0.5 * n * t).sin().powi(2)
}

/// `σ(t,x) = ½(v₀(x − 2t) − v₀(x))` for `v₀ = cos nx`.
pub fn conjugate_sigma(n: u32, t: f64, x: f64) -> f64 {
    let n = n as f64;
    0.5 * ((n * (x - 2.0 * t)).cos() - (n * x).cos())
}

/// `g = (2/3) σ`, the Eulerian rate of `G`.
pub fn conjugate_small_g(n: u32, t: f64, x: f64) -> f64 {
    2.0 / 3.0 * conjugate_sigma(n, t, x)
}

/// One row of the conjugate-time table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConjugateRow {
    pub m: u32,
    pub expected: f64,
    pub detected: Option<f64>,
    pub gap: Option<f64>,
}
