//! Jacobi fields along geodesics, integrated together with the background.
//!
//! The perturbation `(v, σ)` of the Eulerian velocity and density obeys
//!
//! ```text
//! σ_t = −div(σu) − div(ρv)
//! v_t = −∇_u v − ∇_v u − grad(h′(ρ)σ)
//! ```
//!
//! and the Jacobi field `J = (j∘η, G)` follows from `j_t = v − [u, j]` and
//! `G_t = g∘η` with `g = 2φ(ρ)σ/λ(ρ)² + ⟨grad(ρ/λ(ρ)), j⟩`. Only perturbations
//! with `J(0) = 0` and `J′(0) = (v₀, 0)` are supported.

use serde::Serialize;

use std::f64::consts::PI;

use crate::burgers::{conjugate_times, ConjugateRow};
use crate::error::{Error, Result};
use crate::fields::{same_grid, CircleGrid, PeriodicGrid, ScalarField, VectorField};
use crate::geodesic::{
    barotropic_initializer, cfl_limit, check_shock, geodesic_rhs, integrate_geodesic,
    shock_if_density_lost, FlowMap, FluidState, Layout,
};
use crate::ode;
use crate::pressure::{Catalog, PressureModel};

/// Perturbation fields at one time. `big_g` is indexed by reference labels.
#[derive(Clone, Debug, PartialEq)]
pub struct JacobiState<G: PeriodicGrid> {
    pub time: f64,
    pub v: VectorField<G>,
    pub sigma: ScalarField<G>,
    pub j: VectorField<G>,
    pub big_g: ScalarField<G>,
}

impl<G: PeriodicGrid> JacobiState<G> {
    /// `J(0) = 0`, `J′(0) = (v₀, 0)`.
    pub fn initial(v0: &VectorField<G>) -> Self {
        let grid = v0.grid();
        Self {
            time: 0.0,
            v: v0.clone(),
            sigma: ScalarField::zeros(grid),
            j: VectorField::zeros(grid),
            big_g: ScalarField::zeros(grid),
        }
    }
}

/// Background and perturbation at one recorded time.
#[derive(Clone, Debug)]
pub struct JacobiSample<G: PeriodicGrid> {
    pub background: FluidState<G>,
    pub flow: FlowMap<G>,
    pub pert: JacobiState<G>,
}

impl<G: PeriodicGrid> JacobiSample<G> {
    pub fn time(&self) -> f64 {
        self.pert.time
    }

    /// The displacement `j∘η` of each reference node.
    pub fn lagrangian_j(&self) -> Vec<Vec<f64>> {
        let grid = self.flow.rho0.grid();
        self.pert
            .j
            .comps()
            .iter()
            .map(|c| grid.interpolate(c, &self.flow.positions))
            .collect()
    }

    /// `‖σ + div(ρ j)‖_∞`.
    pub fn constraint_defect(&self) -> f64 {
        let grid = self.flow.rho0.grid();
        let rho_j = self
            .pert
            .j
            .weighted(&self.background.rho)
            .expect("same grid");
        let d = grid.div(rho_j.comps());
        d.iter()
            .zip(self.pert.sigma.values())
            .map(|(a, b)| (a + b).abs())
            .fold(0.0, f64::max)
    }

    /// `∫|j|² + ∫G²`, the squared norm used for locating zeros of `J`.
    pub fn norm_sq(&self) -> f64 {
        norm_sq(&self.pert.j, &self.pert.big_g)
    }
}

fn norm_sq<G: PeriodicGrid>(j: &VectorField<G>, big_g: &ScalarField<G>) -> f64 {
    let grid = j.grid();
    let jj = grid.dot(j.comps(), j.comps());
    let gg: Vec<f64> = big_g.values().iter().map(|x| x * x).collect();
    grid.integrate(&jj) + grid.integrate(&gg)
}

#[derive(Clone, Copy, Debug)]
struct Augmented {
    bg: Layout,
}

impl Augmented {
    fn len(&self) -> usize {
        self.bg.len() + 2 * self.bg.dim * self.bg.n + 2 * self.bg.n
    }

    fn split<'a>(&self, y: &'a [f64]) -> (&'a [f64], Pert<'a>) {
        let (bg, rest) = y.split_at(self.bg.len());
        let (dim, n) = (self.bg.dim, self.bg.n);
        let (v, rest) = rest.split_at(dim * n);
        let (sigma, rest) = rest.split_at(n);
        let (j, g) = rest.split_at(dim * n);
        (bg, Pert { v, sigma, j, g })
    }

    fn pack<G: PeriodicGrid>(
        &self,
        bg: &FluidState<G>,
        flow: &FlowMap<G>,
        p: &JacobiState<G>,
    ) -> Vec<f64> {
        let mut y = self.bg.pack(bg, flow);
        y.reserve(self.len() - y.len());
        for c in p.v.comps() {
            y.extend_from_slice(c);
        }
        y.extend_from_slice(p.sigma.values());
        for c in p.j.comps() {
            y.extend_from_slice(c);
        }
        y.extend_from_slice(p.big_g.values());
        y
    }

    fn unpack<G: PeriodicGrid>(
        &self,
        grid: G,
        y: &[f64],
        time: f64,
        rho0: &ScalarField<G>,
    ) -> JacobiSample<G> {
        let (bg, p) = self.split(y);
        let (background, flow) = self.bg.unpack(grid, bg, time, rho0);
        let pert = JacobiState {
            time,
            v: VectorField::from_raw(grid, self.bg.comps(p.v)),
            sigma: ScalarField::from_raw(grid, p.sigma.to_vec()),
            j: VectorField::from_raw(grid, self.bg.comps(p.j)),
            big_g: ScalarField::from_raw(grid, p.g.to_vec()),
        };
        JacobiSample {
            background,
            flow,
            pert,
        }
    }
}

struct Pert<'a> {
    v: &'a [f64],
    sigma: &'a [f64],
    j: &'a [f64],
    g: &'a [f64],
}

fn augmented_rhs<G: PeriodicGrid>(
    grid: &G,
    model: &PressureModel,
    lay: Augmented,
    y: &[f64],
) -> Result<Vec<f64>> {
    let (bg, p) = lay.split(y);
    let layout = lay.bg;
    let n = layout.n;
    let mut out = geodesic_rhs(grid, model, layout, bg)?;
    out.reserve(lay.len() - out.len());

    let u = layout.comps(layout.u(bg));
    let rho = layout.rho(bg);
    let eta = layout.comps(layout.eta(bg));
    let v = layout.comps(p.v);
    let j = layout.comps(p.j);
    let sigma = p.sigma;

    let mut hs = Vec::with_capacity(n);
    let mut two_phi_over_lam2 = Vec::with_capacity(n);
    let mut rho_over_lam = Vec::with_capacity(n);
    for k in 0..n {
        let r = rho[k];
        let lam = model.lambda(r)?;
        hs.push(model.linearization_coefficient(r)? * sigma[k]);
        two_phi_over_lam2.push(2.0 * model.phi(r)? / (lam * lam));
        rho_over_lam.push(r / lam);
    }

    // v_t
    let uv = grid.covariant(&u, &v);
    let vu = grid.covariant(&v, &u);
    let grad_hs = grid.grad(&hs);
    for i in 0..layout.dim {
        out.extend((0..n).map(|k| -uv[i][k] - vu[i][k] - grad_hs[i][k]));
    }
    // σ_t
    let product = |a: &[Vec<f64>], w: &[f64]| -> Vec<Vec<f64>> {
        a.iter()
            .map(|c| c.iter().zip(w).map(|(x, y)| x * y).collect())
            .collect()
    };
    let d1 = grid.div(&product(&u, sigma));
    let d2 = grid.div(&product(&v, rho));
    out.extend((0..n).map(|k| -d1[k] - d2[k]));
    // j_t = v − (∇_u j − ∇_j u)
    let uj = grid.covariant(&u, &j);
    let ju = grid.covariant(&j, &u);
    for i in 0..layout.dim {
        out.extend((0..n).map(|k| v[i][k] - uj[i][k] + ju[i][k]));
    }
    // G_t = g∘η
    let grad_rl = grid.grad(&rho_over_lam);
    let dir = grid.dot(&grad_rl, &j);
    let g: Vec<f64> = (0..n)
        .map(|k| two_phi_over_lam2[k] * sigma[k] + dir[k])
        .collect();
    out.extend(grid.interpolate(&g, &eta));
    Ok(out)
}

/// One RK4 step of background and perturbation together.
pub fn linearized_step<G: PeriodicGrid>(
    background: &FluidState<G>,
    flow: &FlowMap<G>,
    pert: &JacobiState<G>,
    model: &PressureModel,
    dt: f64,
) -> Result<JacobiSample<G>> {
    let grid = background.grid();
    same_grid(&grid, &pert.v.grid())?;
    let limit = cfl_limit(background, model)?;
    if dt > limit {
        return Err(Error::StepSize { dt, limit });
    }
    let lay = Augmented {
        bg: Layout::new(&grid),
    };
    let y = lay.pack(background, flow, pert);
    let mut rhs = |_t: f64, y: &[f64]| augmented_rhs(&grid, model, lay, y);
    let y1 = ode::rk4_step(&mut rhs, background.time, &y, dt)
        .map_err(|e| shock_if_density_lost(e, flow, background.time))?;
    let sample = lay.unpack(grid, &y1, background.time + dt, &flow.rho0);
    check_shock(&sample.background, &sample.flow, model)?;
    Ok(sample)
}

/// Integrates the Jacobi field with `J(0) = 0`, `J′(0) = (v₀, 0)` from the
/// barotropic state `background` up to `t_end`, recording every
/// `record_every`-th step, the initial and the final time.
pub fn integrate_jacobi<G: PeriodicGrid>(
    background: &FluidState<G>,
    v0: &VectorField<G>,
    model: &PressureModel,
    dt: f64,
    t_end: f64,
    record_every: usize,
) -> Result<Vec<JacobiSample<G>>> {
    let mut out = Vec::new();
    run(background, v0, model, dt, t_end, |k, steps, s| {
        if k % record_every.max(1) == 0 || k == steps {
            out.push(s.clone());
        }
        Ok(())
    })?;
    Ok(out)
}

fn run<G: PeriodicGrid>(
    background: &FluidState<G>,
    v0: &VectorField<G>,
    model: &PressureModel,
    dt: f64,
    t_end: f64,
    mut visit: impl FnMut(usize, usize, &JacobiSample<G>) -> Result<()>,
) -> Result<()> {
    if !(dt > 0.0) || !(t_end >= 0.0) {
        return Err(Error::Invalid(format!(
            "need dt > 0 and t_end ≥ 0, got dt = {dt}, t_end = {t_end}"
        )));
    }
    same_grid(&background.grid(), &v0.grid())?;
    let (steps, h) = ode::step_plan(t_end, dt);
    let mut bg = background.clone();
    bg.time = 0.0;
    let mut cur = JacobiSample {
        flow: FlowMap::identity(bg.rho.clone()),
        background: bg,
        pert: JacobiState::initial(v0),
    };
    visit(0, steps, &cur)?;
    for k in 1..=steps {
        cur = linearized_step(&cur.background, &cur.flow, &cur.pert, model, h)?;
        visit(k, steps, &cur)?;
    }
    Ok(())
}

/// `d/dt (∫|j|² + ∫G²)` at the state `y`.
fn norm_rate<G: PeriodicGrid>(
    grid: &G,
    model: &PressureModel,
    lay: Augmented,
    y: &[f64],
) -> Result<f64> {
    let dy = augmented_rhs(grid, model, lay, y)?;
    let (_, p) = lay.split(y);
    let (_, dp) = lay.split(&dy);
    let jc = lay.bg.comps(p.j);
    let djc = lay.bg.comps(dp.j);
    let jj = grid.dot(&jc, &djc);
    let gg: Vec<f64> = p.g.iter().zip(dp.g).map(|(a, b)| a * b).collect();
    Ok(2.0 * (grid.integrate(&jj) + grid.integrate(&gg)))
}

/// Times in `(0, t_end]` at which the Jacobi field `J = (j∘η, G)` vanishes.
///
/// Minima of `N(t) = ∫|j|² + ∫G²` are bracketed by sign changes of `N′` from
/// negative to positive and refined by bisection, re-integrating a single
/// RK4 sub-step from the left end of the bracket. A minimum counts as a zero
/// when `N` there is below `zero_tol` times the largest `N` seen so far.
pub fn detect_conjugate_times<G: PeriodicGrid>(
    background: &FluidState<G>,
    v0: &VectorField<G>,
    model: &PressureModel,
    dt: f64,
    t_end: f64,
    zero_tol: f64,
) -> Result<Vec<f64>> {
    let grid = background.grid();
    let lay = Augmented {
        bg: Layout::new(&grid),
    };
    let mut prev: Option<(f64, Vec<f64>, f64)> = None;
    let mut peak: f64 = 0.0;
    let mut found = Vec::new();
    run(background, v0, model, dt, t_end, |_, _, s| {
        let y = lay.pack(&s.background, &s.flow, &s.pert);
        let t = s.time();
        let rate = norm_rate(&grid, model, lay, &y)?;
        peak = peak.max(s.norm_sq());
        if let Some((t0, y0, r0)) = &prev {
            if *r0 < 0.0 && rate >= 0.0 {
                let (root, value) = bisect_rate(&grid, model, lay, *t0, y0, t - t0)?;
                if value <= zero_tol * peak {
                    found.push(root);
                }
            }
        }
        prev = Some((t, y, rate));
        Ok(())
    })?;
    Ok(found)
}

fn bisect_rate<G: PeriodicGrid>(
    grid: &G,
    model: &PressureModel,
    lay: Augmented,
    t0: f64,
    y0: &[f64],
    span: f64,
) -> Result<(f64, f64)> {
    let mut rhs = |_t: f64, y: &[f64]| augmented_rhs(grid, model, lay, y);
    let (mut lo, mut hi) = (0.0, span);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        let y = ode::rk4_step(&mut rhs, t0, y0, mid)?;
        if norm_rate(grid, model, lay, &y)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-13 {
            break;
        }
    }
    let tau = 0.5 * (lo + hi);
    let y = ode::rk4_step(&mut rhs, t0, y0, tau)?;
    let (_, p) = lay.split(&y);
    let j = VectorField::from_raw(*grid, lay.bg.comps(p.j));
    let g = ScalarField::from_raw(*grid, p.g.to_vec());
    Ok((t0 + tau, norm_sq(&j, &g)))
}

/// Detected zeros of the Jacobi field along `u ≡ ρ ≡ 1`, `p = ρ³/3` with
/// `v₀ = cos nx`, matched against `2πm/n`. `dt` defaults to `0.02/n`,
/// capped at 0.9 of the step-size bound.
pub fn conjugate_table(
    n: u32,
    m_max: u32,
    grid_points: usize,
    dt: Option<f64>,
) -> Result<Vec<ConjugateRow>> {
    let grid = CircleGrid::new(grid_points)?;
    if 4 * n as usize > grid_points {
        return Err(Error::Invalid(format!(
            "mode {n} is not resolved by {grid_points} points"
        )));
    }
    let expected = conjugate_times(n, m_max)?;
    let model = PressureModel::catalog(Catalog::ThreeOverRho)?;
    let one = ScalarField::constant(grid, 1.0);
    let bg = barotropic_initializer(&VectorField::from_fn(grid, |_| vec![1.0]), &one, &model)?;
    let v0 = VectorField::from_fn(grid, |x| vec![(n as f64 * x[0]).cos()]);
    let nf = n as f64;
    let t_end = expected.last().copied().unwrap_or(0.0) + PI / nf;
    let dt = match dt {
        Some(dt) => dt,
        None => (0.02 / nf).min(0.9 * cfl_limit(&bg, &model)?),
    };
    let found = detect_conjugate_times(&bg, &v0, &model, dt, t_end, 1e-6)?;
    Ok(expected
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let detected = found
                .iter()
                .copied()
                .find(|d| (d - t).abs() < 0.5 * PI / nf);
            ConjugateRow {
                m: i as u32 + 1,
                expected: t,
                detected,
                gap: detected.map(|d| (d - t).abs()),
            }
        })
        .collect())
}

/// Centered geodesic deviation `(η₊ − η₋)/(2s)` where `η±` start from the
/// barotropic states with velocities `u₀ ± s v₀`. Returns `(t, deviation)` at
/// every `record_every`-th step and at `t_end`.
#[allow(clippy::too_many_arguments)]
pub fn deviation_oracle<G: PeriodicGrid>(
    u0: &VectorField<G>,
    rho0: &ScalarField<G>,
    v0: &VectorField<G>,
    model: &PressureModel,
    s: f64,
    dt: f64,
    t_end: f64,
    record_every: usize,
) -> Result<Vec<(f64, Vec<Vec<f64>>)>> {
    let branch = |sign: f64, name: &'static str| {
        let u = u0.add(&v0.scale(sign * s))?;
        let state = barotropic_initializer(&u, rho0, model)?;
        integrate_geodesic(&state, model, dt, t_end, record_every).map_err(|e| Error::Branch {
            branch: name,
            source: Box::new(e),
        })
    };
    let plus = branch(1.0, "plus")?;
    let minus = branch(-1.0, "minus")?;
    Ok(plus
        .samples
        .iter()
        .zip(&minus.samples)
        .map(|(a, b)| {
            let dev = a
                .flow
                .positions
                .iter()
                .zip(&b.flow.positions)
                .map(|(p, m)| p.iter().zip(m).map(|(x, y)| (x - y) / (2.0 * s)).collect())
                .collect();
            (a.state.time, dev)
        })
        .collect())
}

/// Growth summary of `‖j(t)‖_∞`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthReport {
    /// `max_t ‖j(t)‖_∞ / (t ‖v₀‖_∞)` over samples with `t > 0`.
    pub max_ratio: f64,
    /// Least-squares slope of `‖j(t)‖_∞` against `t`.
    pub growth_rate: f64,
    pub samples: usize,
}

/// Builds a [`GrowthReport`] from `(t, ‖j(t)‖_∞)` pairs.
pub fn growth_report(series: &[(f64, f64)], v0_sup: f64) -> Result<GrowthReport> {
    if series.is_empty() {
        return Err(Error::Invalid("empty Jacobi series".into()));
    }
    let max_ratio = if v0_sup > 0.0 {
        series
            .iter()
            .filter(|(t, _)| *t > 0.0)
            .map(|(t, j)| j / (t * v0_sup))
            .fold(0.0, f64::max)
    } else {
        0.0
    };
    Ok(GrowthReport {
        max_ratio,
        growth_rate: slope(series),
        samples: series.len(),
    })
}

/// Least-squares slope through `(x, y)` pairs.
pub fn slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    if points.len() < 2 {
        return 0.0;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = points.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    if sxx > 0.0 {
        sxy / sxx
    } else {
        0.0
    }
}
