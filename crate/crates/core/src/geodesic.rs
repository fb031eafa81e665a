//! Geodesics of the weighted metric: the compressible Euler system together
//! with the auxiliary variable `q` and the flow map.
//!
//! The method of lines evolves
//!
//! ```text
//! u_t = −∇_u u − (1/ρ) grad(q²φ(ρ)/λ(ρ)²)
//! q_t = −div(q u)
//! ρ_t = −div(ρ u)
//! η_t = u∘η
//! ```
//!
//! with spectral derivatives and classical RK4 in time. The flow map starts at
//! the identity, so `ρ∘η · Jac(η) = ρ₀` holds along a trajectory.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::{same_grid, DiscGrid, Grid, PeriodicGrid, ScalarField, TorusGrid, VectorField};
use crate::metric::pointwise;
use crate::ode;
use crate::pressure::{EntropyPressure, PressureModel};

/// Integration stops once the flow map stretch drops to this value.
pub const SHOCK_STRETCH: f64 = 1e-3;

/// Integration also stops once a characteristic gradient spans this fraction
/// of a grid cell: `Δx · max(|∂u| + c_s |∂ρ|/ρ) ≥ SHOCK_STEEPNESS`.
/// Gas-dynamic shocks keep the density bounded, so steepening shows up here
/// rather than in the stretch.
pub const SHOCK_STEEPNESS: f64 = 0.5;

/// Courant number used for the step-size bound.
pub const CFL_NUMBER: f64 = 0.5;

/// Eulerian velocity, density and auxiliary variable `q = λ(ρ) f` at one time.
#[derive(Clone, Debug, PartialEq)]
pub struct FluidState<G: Grid> {
    pub time: f64,
    pub u: VectorField<G>,
    pub rho: ScalarField<G>,
    pub q: ScalarField<G>,
}

impl<G: Grid> FluidState<G> {
    pub fn grid(&self) -> G {
        self.rho.grid()
    }

    /// The function component `f = q/λ(ρ)` of the tangent vector.
    pub fn f(&self, model: &PressureModel) -> Result<ScalarField<G>> {
        let lam = pointwise(&self.rho, |r| model.lambda(r))?;
        let v = self
            .q
            .values()
            .iter()
            .zip(&lam)
            .map(|(q, l)| q / l)
            .collect();
        Ok(ScalarField::from_raw(self.grid(), v))
    }
}

/// Lifted positions `η(x)` of the reference nodes and the initial density.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowMap<G: Grid> {
    pub positions: Vec<Vec<f64>>,
    pub rho0: ScalarField<G>,
}

impl<G: PeriodicGrid> FlowMap<G> {
    pub fn identity(rho0: ScalarField<G>) -> Self {
        Self {
            positions: rho0.grid().reference_positions(),
            rho0,
        }
    }

    pub fn jacobian(&self) -> Vec<f64> {
        self.rho0.grid().jacobian(&self.positions)
    }

    pub fn min_stretch(&self) -> f64 {
        self.jacobian().into_iter().fold(f64::INFINITY, f64::min)
    }
}

/// Initial state of a barotropic geodesic: `q₀ = ρ₀`, that is `f₀ = ρ₀/λ(ρ₀)`.
pub fn barotropic_initializer<G: Grid>(
    u0: &VectorField<G>,
    rho0: &ScalarField<G>,
    model: &PressureModel,
) -> Result<FluidState<G>> {
    same_grid(&u0.grid(), &rho0.grid())?;
    pointwise(rho0, |r| model.lambda(r))?;
    Ok(FluidState {
        time: 0.0,
        u: u0.clone(),
        rho: rho0.clone(),
        q: rho0.clone(),
    })
}

/// Initial state carrying an entropy profile: `q₀ = ρ₀ ζ(s₀)`.
pub fn entropy_initializer<G: Grid>(
    u0: &VectorField<G>,
    rho0: &ScalarField<G>,
    s0: &ScalarField<G>,
    model: &EntropyPressure,
) -> Result<FluidState<G>> {
    let mut state = barotropic_initializer(u0, rho0, model.base())?;
    same_grid(&s0.grid(), &rho0.grid())?;
    let q = rho0
        .values()
        .iter()
        .zip(s0.values())
        .map(|(r, s)| r * model.zeta(*s))
        .collect();
    state.q = ScalarField::from_raw(rho0.grid(), q);
    Ok(state)
}

/// Entropy recovered from `q/ρ = ζ(s)`.
pub fn entropy_field<G: Grid>(state: &FluidState<G>, model: &EntropyPressure) -> ScalarField<G> {
    let s = state
        .q
        .values()
        .iter()
        .zip(state.rho.values())
        .map(|(q, r)| model.entropy_from_ratio(q / r))
        .collect();
    ScalarField::from_raw(state.grid(), s)
}

/// `½∫ [λ(ρ) f² + ρ|u|²]` with `f = q/λ(ρ)`.
pub fn energy<G: Grid>(state: &FluidState<G>, model: &PressureModel) -> Result<f64> {
    let grid = state.grid();
    let lam = pointwise(&state.rho, |r| model.lambda(r))?;
    let uu = grid.dot(state.u.comps(), state.u.comps());
    let integrand: Vec<f64> = (0..grid.len())
        .map(|k| {
            let q = state.q.values()[k];
            q * q / lam[k] + state.rho.values()[k] * uu[k]
        })
        .collect();
    Ok(0.5 * grid.integrate(&integrand))
}

/// Largest admissible step `0.5·Δx / max(|u| + c_s)`, with sound speed
/// `c_s = √p′(ρ) · |q/ρ|`.
pub fn cfl_limit<G: Grid>(state: &FluidState<G>, model: &PressureModel) -> Result<f64> {
    let grid = state.grid();
    let speed = grid.dot(state.u.comps(), state.u.comps());
    let mut fastest: f64 = 0.0;
    for ((&s, &r), &q) in speed.iter().zip(state.rho.values()).zip(state.q.values()) {
        let cs = model.pressure_prime(r)?.max(0.0).sqrt() * (q / r).abs();
        fastest = fastest.max(s.sqrt() + cs);
    }
    Ok(if fastest > 0.0 {
        CFL_NUMBER * grid.min_spacing() / fastest
    } else {
        f64::INFINITY
    })
}

/// Flat-vector layout `[u (dim·n), ρ (n), q (n), η (dim·n)]`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Layout {
    pub dim: usize,
    pub n: usize,
}

impl Layout {
    pub fn new<G: Grid>(grid: &G) -> Self {
        Self {
            dim: grid.dim(),
            n: grid.len(),
        }
    }

    pub fn len(&self) -> usize {
        2 * self.dim * self.n + 2 * self.n
    }

    pub fn comps(&self, block: &[f64]) -> Vec<Vec<f64>> {
        block
            .chunks(self.n)
            .take(self.dim)
            .map(|c| c.to_vec())
            .collect()
    }

    pub fn u<'a>(&self, y: &'a [f64]) -> &'a [f64] {
        &y[..self.dim * self.n]
    }

    pub fn rho<'a>(&self, y: &'a [f64]) -> &'a [f64] {
        &y[self.dim * self.n..(self.dim + 1) * self.n]
    }

    pub fn q<'a>(&self, y: &'a [f64]) -> &'a [f64] {
        &y[(self.dim + 1) * self.n..(self.dim + 2) * self.n]
    }

    pub fn eta<'a>(&self, y: &'a [f64]) -> &'a [f64] {
        &y[(self.dim + 2) * self.n..self.len()]
    }

    pub fn pack<G: Grid>(&self, state: &FluidState<G>, flow: &FlowMap<G>) -> Vec<f64> {
        let mut y = Vec::with_capacity(self.len());
        for c in state.u.comps() {
            y.extend_from_slice(c);
        }
        y.extend_from_slice(state.rho.values());
        y.extend_from_slice(state.q.values());
        for c in &flow.positions {
            y.extend_from_slice(c);
        }
        y
    }

    pub fn unpack<G: Grid>(
        &self,
        grid: G,
        y: &[f64],
        time: f64,
        rho0: &ScalarField<G>,
    ) -> (FluidState<G>, FlowMap<G>) {
        let state = FluidState {
            time,
            u: VectorField::from_raw(grid, self.comps(self.u(y))),
            rho: ScalarField::from_raw(grid, self.rho(y).to_vec()),
            q: ScalarField::from_raw(grid, self.q(y).to_vec()),
        };
        let flow = FlowMap {
            positions: self.comps(self.eta(y)),
            rho0: rho0.clone(),
        };
        (state, flow)
    }
}

/// Right-hand side of the geodesic system on a flat vector.
pub(crate) fn geodesic_rhs<G: PeriodicGrid>(
    grid: &G,
    model: &PressureModel,
    layout: Layout,
    y: &[f64],
) -> Result<Vec<f64>> {
    let n = layout.n;
    let u = layout.comps(layout.u(y));
    let rho = layout.rho(y);
    let q = layout.q(y);
    let eta = layout.comps(layout.eta(y));

    let mut pressure = Vec::with_capacity(n);
    for k in 0..n {
        let r = rho[k];
        let lam = model.lambda(r)?;
        pressure.push(q[k] * q[k] * model.phi(r)? / (lam * lam));
    }
    let grad_p = grid.grad(&pressure);
    let adv = grid.covariant(&u, &u);

    let mut out = Vec::with_capacity(layout.len());
    for i in 0..layout.dim {
        out.extend((0..n).map(|k| -adv[i][k] - grad_p[i][k] / rho[k]));
    }
    let flux = |w: &[f64]| -> Vec<Vec<f64>> {
        u.iter()
            .map(|c| c.iter().zip(w).map(|(a, b)| a * b).collect())
            .collect()
    };
    out.extend(grid.div(&flux(rho)).into_iter().map(|d| -d));
    out.extend(grid.div(&flux(q)).into_iter().map(|d| -d));
    for c in &u {
        out.extend(grid.interpolate(c, &eta));
    }
    Ok(out)
}

/// One RK4 step of the geodesic system.
///
/// Fails with [`Error::StepSize`] if `dt` exceeds [`cfl_limit`] and with
/// [`Error::ShockReached`] once the flow map stretch falls to [`SHOCK_STRETCH`],
/// the profile steepens past [`SHOCK_STEEPNESS`] or the density stops
/// being positive.
pub fn step_geodesic<G: PeriodicGrid>(
    state: &FluidState<G>,
    flow: &FlowMap<G>,
    model: &PressureModel,
    dt: f64,
) -> Result<(FluidState<G>, FlowMap<G>)> {
    let grid = state.grid();
    same_grid(&grid, &flow.rho0.grid())?;
    let limit = cfl_limit(state, model)?;
    if dt > limit {
        return Err(Error::StepSize { dt, limit });
    }
    let layout = Layout::new(&grid);
    let y = layout.pack(state, flow);
    let mut rhs = |_t: f64, y: &[f64]| geodesic_rhs(&grid, model, layout, y);
    let y1 = ode::rk4_step(&mut rhs, state.time, &y, dt)
        .map_err(|e| shock_if_density_lost(e, flow, state.time))?;
    let (next, next_flow) = layout.unpack(grid, &y1, state.time + dt, &flow.rho0);
    check_shock(&next, &next_flow, model)?;
    Ok((next, next_flow))
}

/// On a finite grid the density can lose positivity just before the
/// characteristics cross; that is reported as a shock.
pub(crate) fn shock_if_density_lost<G: PeriodicGrid>(
    err: Error,
    flow: &FlowMap<G>,
    time: f64,
) -> Error {
    match err {
        Error::Domain(_) => Error::ShockReached {
            time,
            stretch: flow.min_stretch(),
        },
        e => e,
    }
}

pub(crate) fn check_shock<G: PeriodicGrid>(
    state: &FluidState<G>,
    flow: &FlowMap<G>,
    model: &PressureModel,
) -> Result<()> {
    let stretch = flow.min_stretch();
    let steep = steepness(state, model)?;
    if !(stretch > SHOCK_STRETCH) || !(steep < SHOCK_STEEPNESS) {
        return Err(Error::ShockReached {
            time: state.time,
            stretch,
        });
    }
    Ok(())
}

/// `Δx · max(|∂u| + c_s |∂ρ|/ρ)` over nodes and axes, with `c_s` as in
/// [`cfl_limit`].
pub fn steepness<G: Grid>(state: &FluidState<G>, model: &PressureModel) -> Result<f64> {
    let grid = state.grid();
    let du: Vec<Vec<Vec<f64>>> = state.u.comps().iter().map(|c| grid.grad(c)).collect();
    let drho = grid.grad(state.rho.values());
    let mut worst: f64 = 0.0;
    for k in 0..grid.len() {
        let r = state.rho.values()[k];
        let cs = model.pressure_prime(r)?.max(0.0).sqrt() * (state.q.values()[k] / r).abs();
        for a in 0..grid.dim() {
            let shear: f64 = du.iter().map(|g| g[a][k].abs()).sum();
            worst = worst.max(shear + cs * drho[a][k].abs() / r);
        }
    }
    Ok(grid.min_spacing() * worst)
}

/// One recorded time of a trajectory.
#[derive(Clone, Debug)]
pub struct TrajectorySample<G: Grid> {
    pub state: FluidState<G>,
    pub flow: FlowMap<G>,
    pub energy: f64,
}

#[derive(Clone, Debug)]
pub struct GeodesicTrajectory<G: Grid> {
    pub samples: Vec<TrajectorySample<G>>,
}

impl<G: PeriodicGrid> GeodesicTrajectory<G> {
    pub fn last(&self) -> &TrajectorySample<G> {
        self.samples
            .last()
            .expect("a trajectory holds at least its initial sample")
    }

    /// Largest relative energy deviation from the initial sample.
    pub fn energy_drift(&self) -> f64 {
        let e0 = self.samples[0].energy;
        let scale = if e0.abs() > 0.0 { e0.abs() } else { 1.0 };
        self.samples
            .iter()
            .map(|s| (s.energy - e0).abs() / scale)
            .fold(0.0, f64::max)
    }
}

/// Integrates from `state` to `t_end` with equal steps no longer than `dt`,
/// recording every `record_every`-th step (and always the final one).
pub fn integrate_geodesic<G: PeriodicGrid>(
    state: &FluidState<G>,
    model: &PressureModel,
    dt: f64,
    t_end: f64,
    record_every: usize,
) -> Result<GeodesicTrajectory<G>> {
    if !(dt > 0.0) || !(t_end >= state.time) {
        return Err(Error::Invalid(format!(
            "need dt > 0 and t_end ≥ t0, got dt = {dt}, t_end = {t_end}"
        )));
    }
    let (steps, h) = ode::step_plan(t_end - state.time, dt);
    let mut flow = FlowMap::identity(state.rho.clone());
    let mut cur = state.clone();
    let mut samples = vec![TrajectorySample {
        energy: energy(&cur, model)?,
        state: cur.clone(),
        flow: flow.clone(),
    }];
    let every = record_every.max(1);
    for k in 1..=steps {
        let (next, next_flow) = step_geodesic(&cur, &flow, model, h)?;
        cur = next;
        flow = next_flow;
        if k % every == 0 || k == steps {
            samples.push(TrajectorySample {
                energy: energy(&cur, model)?,
                state: cur.clone(),
                flow: flow.clone(),
            });
        }
    }
    Ok(GeodesicTrajectory { samples })
}

/// `‖ρ∘η · Jac(η) − ρ₀‖_∞`.
pub fn density_defect<G: PeriodicGrid>(state: &FluidState<G>, flow: &FlowMap<G>) -> f64 {
    let grid = state.grid();
    let rho_eta = grid.interpolate(state.rho.values(), &flow.positions);
    let jac = flow.jacobian();
    rho_eta
        .iter()
        .zip(&jac)
        .zip(flow.rho0.values())
        .map(|((r, j), r0)| (r * j - r0).abs())
        .fold(0.0, f64::max)
}

/// Residuals `(‖∇_u u + (1/ρ) grad p(ρ)‖_∞, ‖div(ρu)‖_∞)` of the steady equations.
pub fn steady_residual<G: Grid>(
    state: &FluidState<G>,
    model: &PressureModel,
) -> Result<(f64, f64)> {
    let grid = state.grid();
    let rho = state.rho.values();
    let p = pointwise(&state.rho, |r| model.pressure(r))?;
    let grad_p = grid.grad(&p);
    let adv = grid.covariant(state.u.comps(), state.u.comps());
    let momentum: Vec<Vec<f64>> = (0..grid.dim())
        .map(|i| {
            (0..grid.len())
                .map(|k| adv[i][k] + grad_p[i][k] / rho[k])
                .collect()
        })
        .collect();
    let m = grid
        .dot(&momentum, &momentum)
        .into_iter()
        .fold(0.0, |a: f64, b| a.max(b.sqrt()));
    let flux: Vec<Vec<f64>> = state
        .u
        .comps()
        .iter()
        .map(|c| c.iter().zip(rho).map(|(a, r)| a * r).collect())
        .collect();
    let c = grid
        .div(&flux)
        .into_iter()
        .fold(0.0, |a: f64, b| a.max(b.abs()));
    Ok((m, c))
}

/// The shear flow `u = ω(x) ∂_y` with `ρ ≡ q ≡ 1`.
pub fn steady_shear_torus(
    omega: &ScalarField<TorusGrid>,
    model: &PressureModel,
) -> Result<FluidState<TorusGrid>> {
    let grid = omega.grid();
    let dy = grid.partial(1, omega.values());
    if dy.iter().any(|d| d.abs() > 1e-10 * (1.0 + omega.max_abs())) {
        return Err(Error::Invalid("shear profile must depend on x only".into()));
    }
    model.lambda(1.0)?;
    let u = VectorField::from_raw(grid, vec![vec![0.0; grid.len()], omega.values().to_vec()]);
    let one = ScalarField::constant(grid, 1.0);
    Ok(FluidState {
        time: 0.0,
        u,
        rho: one.clone(),
        q: one,
    })
}

/// Rigid rotation `u = ω ∂_θ` of the disc with
/// `ρ(r) = ρ₀ − ω²/(2c²) + ω² r²/(2c²)`, balanced by the pressure `p = c²ρ²/2`.
pub fn rigid_rotation_disc(
    grid: DiscGrid,
    omega: f64,
    c: f64,
    rho0: f64,
) -> Result<FluidState<DiscGrid>> {
    if !(c > 0.0) {
        return Err(Error::Invalid(format!(
            "sound speed must be positive, got {c}"
        )));
    }
    let threshold = omega * omega / (2.0 * c * c);
    if !(rho0 > threshold) {
        return Err(Error::Vacuum { rho0, threshold });
    }
    let rho = ScalarField::from_fn(grid, |p| rho0 - threshold + threshold * p[0] * p[0]);
    let u = VectorField::from_fn(grid, |_| vec![0.0, omega]);
    Ok(FluidState {
        time: 0.0,
        u,
        q: rho.clone(),
        rho,
    })
}

/// Summary written next to geodesic trajectories.
#[derive(Clone, Debug, Serialize)]
pub struct GeodesicSummary {
    pub t_end: f64,
    pub steps: usize,
    pub energy_initial: f64,
    pub energy_drift: f64,
    pub density_defect: f64,
    pub shock_time: Option<f64>,
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::fields::CircleGrid;
    use crate::pressure::Catalog;

    fn gamma3() -> PressureModel {
        PressureModel::catalog(Catalog::ThreeOverRho).unwrap()
    }

    #[test]
    fn initializers() {
        let g = CircleGrid::new(16).unwrap();
        let one = ScalarField::constant(g, 1.0);
        let u = VectorField::zeros(g);
        let s = barotropic_initializer(&u, &one, &gamma3()).unwrap();
        assert_eq!(s.q, one);
        assert!(s.f(&gamma3()).unwrap().map(|f| f - 1.0 / 3.0).max_abs() < 1e-15);
        let c = 1.5;
        let m = PressureModel::catalog(Catalog::Constant(1.0 / (c * c))).unwrap();
        assert!(s.f(&m).unwrap().map(|f| f - c * c).max_abs() < 1e-14);
        assert!(barotropic_initializer(&u, &ScalarField::zeros(g), &m).is_err());
    }

    #[test]
    fn constant_state_translates() {
        let g = CircleGrid::new(16).unwrap();
        let one = ScalarField::constant(g, 1.0);
        let u = VectorField::from_fn(g, |_| vec![1.0]);
        let s0 = barotropic_initializer(&u, &one, &gamma3()).unwrap();
        assert!((energy(&s0, &gamma3()).unwrap() - 4.0 * PI / 3.0).abs() < 1e-12);
        let traj = integrate_geodesic(&s0, &gamma3(), 0.05, 1.0, 1).unwrap();
        let last = traj.last();
        assert!(last.state.u.sub(&u).unwrap().max_norm() < 1e-13);
        for (i, e) in last.flow.positions[0].iter().enumerate() {
            assert!((e - g.point(i) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn oversized_step_rejected() {
        let g = CircleGrid::new(32).unwrap();
        let one = ScalarField::constant(g, 1.0);
        let u = VectorField::from_fn(g, |x| vec![x[0].sin()]);
        let s0 = barotropic_initializer(&u, &one, &gamma3()).unwrap();
        let flow = FlowMap::identity(one);
        assert!(matches!(
            step_geodesic(&s0, &flow, &gamma3(), 1.0),
            Err(Error::StepSize { .. })
        ));
    }

    #[test]
    fn shock_is_reported() {
        let g = CircleGrid::new(256).unwrap();
        let one = ScalarField::constant(g, 1.0);
        let u = VectorField::from_fn(g, |x| vec![x[0].sin()]);
        let s0 = barotropic_initializer(&u, &one, &gamma3()).unwrap();
        let err = integrate_geodesic(&s0, &gamma3(), 0.002, 1.5, 10).unwrap_err();
        match err {
            Error::ShockReached { time, stretch } => {
                assert!(time <= 1.0 + 1e-9, "{time} {stretch}")
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn conservation_along_smooth_trajectory() {
        let g = CircleGrid::new(128).unwrap();
        let rho = ScalarField::from_fn(g, |x| 1.0 + 0.2 * (x[0]).cos());
        let u = VectorField::from_fn(g, |x| vec![0.3 * x[0].sin()]);
        let m = PressureModel::polytropic(1.0, 2.0).unwrap();
        let s0 = barotropic_initializer(&u, &rho, &m).unwrap();
        let traj = integrate_geodesic(&s0, &m, 0.01, 0.5, 5).unwrap();
        assert!(traj.energy_drift() < 1e-8, "{}", traj.energy_drift());
        for s in &traj.samples {
            assert!(density_defect(&s.state, &s.flow) < 1e-6);
            assert!(s.state.q.sub(&s.state.rho).unwrap().max_abs() < 1e-8);
        }
    }

    #[test]
    fn entropy_is_transported() {
        let g = CircleGrid::new(128).unwrap();
        let rho = ScalarField::constant(g, 1.0);
        let u = VectorField::from_fn(g, |x| vec![0.5 * x[0].sin()]);
        let s_init = ScalarField::from_fn(g, |x| 0.2 * x[0].cos());
        let model = EntropyPressure::new(
            PressureModel::polytropic(0.5, 2.0).unwrap(),
            f64::exp,
            f64::ln,
        );
        let s0 = entropy_initializer(&u, &rho, &s_init, &model).unwrap();
        let traj = integrate_geodesic(&s0, model.base(), 0.01, 0.5, 50).unwrap();
        let last = traj.last();
        let s_t = entropy_field(&last.state, &model);
        let along = g.interpolate(s_t.values(), &last.flow.positions);
        let gap = along
            .iter()
            .zip(s_init.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(gap < 1e-8, "{gap}");
    }

    #[test]
    fn shear_and_rotation_are_steady() {
        let t = TorusGrid::new(16, 16).unwrap();
        let c = 1.0;
        let m = PressureModel::polytropic(c * c / 2.0, 2.0).unwrap();
        let omega = ScalarField::from_fn(t, |p| p[0].sin());
        let s = steady_shear_torus(&omega, &m).unwrap();
        let (a, b) = steady_residual(&s, &m).unwrap();
        assert!(a < 1e-10 && b < 1e-10);
        let bad = ScalarField::from_fn(t, |p| p[1].sin());
        assert!(steady_shear_torus(&bad, &m).is_err());

        let d = DiscGrid::new(32, 16).unwrap();
        let rot = rigid_rotation_disc(d, 1.0, 1.0, 1.0).unwrap();
        assert!((rot.rho.values()[d.index(d.nr() - 1, 0)] - 1.0).abs() < 1e-15);
        let (a, b) = steady_residual(&rot, &m).unwrap();
        assert!(a < 1e-10 && b < 1e-10, "{a} {b}");
        let still = rigid_rotation_disc(d, 0.0, 1.0, 0.7).unwrap();
        assert!(still.rho.map(|r| r - 0.7).max_abs() == 0.0);
        assert!(matches!(
            rigid_rotation_disc(d, 1.0, 1.0, 0.5),
            Err(Error::Vacuum { .. })
        ));
    }
}
