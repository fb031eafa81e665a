//! The named experiments. Each resolves its parameters against the config,
//! validates them and returns the tables and summary to write.

use baroflow::burgers::{
    exact_jacobi, exact_state, riemann_invariants, shock_time, system_shock_time,
};
use baroflow::disc::{
    characteristic_roots, cubic_coefficients, rayleigh_bound_check, sturm_liouville_eigs,
    synthesize_and_classify, DiscBackground,
};
use baroflow::fields::{grad, CircleGrid, DiscGrid, ScalarField, TorusGrid, TrigPoly, VectorField};
use baroflow::geodesic::{
    barotropic_initializer, cfl_limit, density_defect, integrate_geodesic, FluidState,
    GeodesicSummary,
};
use baroflow::jacobi::{conjugate_table, growth_report, integrate_jacobi, slope};
use baroflow::metric::curvature_sign_scan_1d;
use baroflow::pressure::PressureModel;
use baroflow::random;
use baroflow::torus::{classify_boundedness, TorusModeSolution};
use clap::{Args, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::config::{require, Settings};
use crate::output::{Artifacts, Cell, Table};
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Profile {
    /// `u₀ = u_amp·sin x`, `ρ₀ = 1 + ρ_amp·cos x`, `v₀ = cos(k_v x)`.
    Sine,
    /// Seeded band-limited data with modes `|k| ≤ kmax`.
    Random,
}

impl std::str::FromStr for Profile {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        <Self as ValueEnum>::from_str(s, true)
    }
}

/// Pressure law `p = Aρ^γ`.
#[derive(Args, Debug, Default, Clone)]
pub struct ModelArgs {
    /// Polytropic constant A [default: 1/3, so that γ = 3 gives λ = 3/ρ]
    #[arg(long)]
    pub a: Option<f64>,
    /// Polytropic exponent γ > 1 [default: 3]
    #[arg(long)]
    pub gamma: Option<f64>,
}

impl ModelArgs {
    fn resolve(
        &self,
        s: &mut Settings,
        default_a: f64,
        default_gamma: f64,
    ) -> Result<(PressureModel, f64, f64), CliError> {
        let a = s.get("a", self.a, default_a)?;
        let gamma = s.get("gamma", self.gamma, default_gamma)?;
        require(a > 0.0, || format!("a must be > 0, got {a}"))?;
        require(gamma > 1.0, || format!("gamma must be > 1, got {gamma}"))?;
        Ok((PressureModel::polytropic(a, gamma)?, a, gamma))
    }
}

fn is_gamma3(a: f64, gamma: f64) -> bool {
    gamma == 3.0 && (a - 1.0 / 3.0).abs() < 1e-12
}

/// Initial data on the circle.
#[derive(Args, Debug, Default, Clone)]
pub struct CircleData {
    /// Grid points on the circle [default: 256]
    #[arg(long)]
    pub n: Option<usize>,
    /// Initial data family [default: sine]
    #[arg(long)]
    pub profile: Option<Profile>,
    /// Velocity amplitude [default: 0.3]
    #[arg(long)]
    pub u_amp: Option<f64>,
    /// Density perturbation amplitude, below 1 [default: 0 for sine, 0.15 for random]
    #[arg(long)]
    pub rho_amp: Option<f64>,
    /// Highest Fourier mode of random data [default: 3]
    #[arg(long)]
    pub kmax: Option<usize>,
    /// Seed of random data [default: 1]
    #[arg(long)]
    pub seed: Option<u64>,
}

struct CircleFields {
    grid: CircleGrid,
    u0: ScalarField<CircleGrid>,
    rho0: ScalarField<CircleGrid>,
    v0: ScalarField<CircleGrid>,
}

impl CircleData {
    fn resolve(&self, s: &mut Settings, v_mode: Option<u32>) -> Result<CircleFields, CliError> {
        let n = s.get("n", self.n, 256)?;
        require(n >= 8 && n % 2 == 0 && n <= 8192, || {
            format!("n must be even and within [8, 8192], got {n}")
        })?;
        let grid = CircleGrid::new(n)?;
        let profile = s.get("profile", self.profile, Profile::Sine)?;
        let u_amp = s.get("u-amp", self.u_amp, 0.3)?;
        let default_rho = if profile == Profile::Sine { 0.0 } else { 0.15 };
        let rho_amp = s.get("rho-amp", self.rho_amp, default_rho)?;
        require(u_amp.is_finite(), || {
            format!("u-amp must be finite, got {u_amp}")
        })?;
        require((0.0..1.0).contains(&rho_amp), || {
            format!("rho-amp must be within [0, 1), got {rho_amp}")
        })?;
        match profile {
            Profile::Sine => {
                let k = v_mode.unwrap_or(1) as f64;
                Ok(CircleFields {
                    grid,
                    u0: ScalarField::from_fn(grid, |x| u_amp * x[0].sin()),
                    rho0: ScalarField::from_fn(grid, |x| 1.0 + rho_amp * x[0].cos()),
                    v0: ScalarField::from_fn(grid, |x| (k * x[0]).cos()),
                })
            }
            Profile::Random => {
                let kmax = s.get("kmax", self.kmax, 3)?;
                let seed = s.get("seed", self.seed, 1)?;
                require(kmax >= 1 && 4 * kmax <= n, || {
                    format!("kmax must be within [1, n/4 = {}], got {kmax}", n / 4)
                })?;
                let mut rng = random::rng(seed);
                let u0 = random::circle_field(grid, kmax, &mut rng).scale(u_amp);
                let rho0 =
                    random::positive_density(&random::circle_field(grid, kmax, &mut rng), rho_amp);
                let v0 = random::circle_field(grid, kmax, &mut rng);
                Ok(CircleFields { grid, u0, rho0, v0 })
            }
        }
    }
}

fn line(f: &ScalarField<CircleGrid>) -> VectorField<CircleGrid> {
    VectorField::new(f.grid(), vec![f.values().to_vec()]).expect("one component")
}

fn time_span(s: &mut Settings, t_end: Option<f64>, default: f64) -> Result<f64, CliError> {
    let t = s.get("t-end", t_end, default)?;
    require(t > 0.0 && t.is_finite(), || {
        format!("t-end must be > 0, got {t}")
    })?;
    Ok(t)
}

fn step(
    s: &mut Settings,
    dt: Option<f64>,
    state: &FluidState<CircleGrid>,
    model: &PressureModel,
) -> Result<f64, CliError> {
    let dt = s.get_opt("dt", dt)?;
    match dt {
        Some(dt) => {
            require(dt > 0.0, || format!("dt must be > 0, got {dt}"))?;
            Ok(dt)
        }
        None => Ok(0.4 * cfl_limit(state, model)?),
    }
}

fn riemann_shock_time(f: &CircleFields) -> Option<f64> {
    riemann_invariants(&f.u0, &f.rho0)
        .ok()
        .map(|d| system_shock_time(&d))
}

#[derive(Args, Debug, Default, Clone)]
pub struct GeodesicArgs {
    #[command(flatten)]
    pub data: CircleData,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Time step [default: 0.4 of the stability bound]
    #[arg(long)]
    pub dt: Option<f64>,
    /// Final time [default: 0.5]
    #[arg(long)]
    pub t_end: Option<f64>,
    /// Record every this many steps [default: 10]
    #[arg(long)]
    pub record_every: Option<usize>,
}

/// Compressible Euler trajectory on the circle with energy and mass diagnostics.
/// About a second at the defaults.
pub fn geodesic(args: &GeodesicArgs, s: &mut Settings) -> Result<Artifacts, CliError> {
    let f = args.data.resolve(s, None)?;
    let (model, a, gamma) = args.model.resolve(s, 1.0 / 3.0, 3.0)?;
    let t_end = time_span(s, args.t_end, 0.5)?;
    let every = s.get("record-every", args.record_every, 10)?;
    let state = barotropic_initializer(&line(&f.u0), &f.rho0, &model)?;
    let dt = step(s, args.dt, &state, &model)?;
    let traj = integrate_geodesic(&state, &model, dt, t_end, every)?;
    let mut series = Table::new(
        "geodesic",
        &[
            "time",
            "energy",
            "relative_energy_change",
            "min_stretch",
            "density_defect",
        ],
    );
    let e0 = traj.samples[0].energy;
    for smp in &traj.samples {
        series.row(&[
            smp.state.time.into(),
            smp.energy.into(),
            ((smp.energy - e0) / e0).into(),
            smp.flow.min_stretch().into(),
            density_defect(&smp.state, &smp.flow).into(),
        ]);
    }
    let last = traj.last();
    let mut profile = Table::new("geodesic_state", &["x", "u", "rho"]);
    for (i, x) in f.grid.points().into_iter().enumerate() {
        profile.row(&[
            x.into(),
            last.state.u.comps()[0][i].into(),
            last.state.rho.values()[i].into(),
        ]);
    }
    let (steps, _) = baroflow::ode::step_plan(t_end, dt);
    let summary = GeodesicSummary {
        t_end,
        steps,
        energy_initial: e0,
        energy_drift: traj.energy_drift(),
        density_defect: density_defect(&last.state, &last.flow),
        shock_time: if is_gamma3(a, gamma) {
            riemann_shock_time(&f)
        } else {
            None
        },
    };
    Ok(Artifacts::new(summary).with(series).with(profile))
}

#[derive(Args, Debug, Default, Clone)]
pub struct JacobiArgs {
    #[command(flatten)]
    pub data: CircleData,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Mode of the sine-profile perturbation v₀ = cos(k x) [default: 2]
    #[arg(long)]
    pub v_mode: Option<u32>,
    /// Time step [default: 0.4 of the stability bound]
    #[arg(long)]
    pub dt: Option<f64>,
    /// Final time [default: 0.5]
    #[arg(long)]
    pub t_end: Option<f64>,
    /// Record every this many steps [default: 10]
    #[arg(long)]
    pub record_every: Option<usize>,
}

/// Linearized flow along a circle geodesic, checked against the closed form
/// when γ = 3. About a second at the defaults.
pub fn jacobi(args: &JacobiArgs, s: &mut Settings) -> Result<Artifacts, CliError> {
    let v_mode = s.get("v-mode", args.v_mode, 2)?;
    let f = args.data.resolve(s, Some(v_mode))?;
    require(v_mode >= 1 && 4 * v_mode as usize <= f.grid.n(), || {
        format!("v-mode must be within [1, n/4], got {v_mode}")
    })?;
    let (model, a, gamma) = args.model.resolve(s, 1.0 / 3.0, 3.0)?;
    let t_end = time_span(s, args.t_end, 0.5)?;
    let every = s.get("record-every", args.record_every, 10)?;
    let bg = barotropic_initializer(&line(&f.u0), &f.rho0, &model)?;
    let dt = step(s, args.dt, &bg, &model)?;
    let samples = integrate_jacobi(&bg, &line(&f.v0), &model, dt, t_end, every)?;
    let closed = is_gamma3(a, gamma);
    let v_sup = TrigPoly::from_samples(f.v0.values()).sup_abs();
    let mut table = Table::new(
        "jacobi",
        &[
            "time",
            "j_sup",
            "j_l2",
            "growth_ratio",
            "constraint_defect",
            "closed_form_gap",
        ],
    );
    let (mut worst_defect, mut worst_gap) = (0.0f64, None::<f64>);
    let mut series = Vec::new();
    for smp in &samples {
        let t = smp.time();
        let j_sup = smp.pert.j.max_norm();
        series.push((t, j_sup));
        let defect = smp.constraint_defect();
        worst_defect = worst_defect.max(defect);
        let gap = if closed && t > 0.0 {
            let exact = exact_jacobi(&f.u0, &f.rho0, &f.v0, t)?;
            let g = exact.sub(&smp.pert.j)?.max_norm() / exact.max_norm().max(f64::MIN_POSITIVE);
            worst_gap = Some(worst_gap.unwrap_or(0.0).max(g));
            Some(g)
        } else {
            None
        };
        let ratio = (t > 0.0).then(|| j_sup / (t * v_sup));
        table.row(&[
            t.into(),
            j_sup.into(),
            smp.pert.j.l2_norm().into(),
            ratio.into(),
            defect.into(),
            gap.into(),
        ]);
    }
    let report = growth_report(&series, v_sup)?;
    let summary = json!({
        "dt": dt,
        "v0_sup": v_sup,
        "growth": report,
        "max_constraint_defect": worst_defect,
        "max_closed_form_gap": worst_gap,
        "shock_time": if closed { riemann_shock_time(&f) } else { None },
    });
    Ok(Artifacts::new(summary).with(table))
}

#[derive(Args, Debug, Default, Clone)]
pub struct BurgersArgs {
    #[command(flatten)]
    pub data: CircleData,
    /// Final time, below the shock time [default: 0.5]
    #[arg(long)]
    pub t_end: Option<f64>,
    /// Number of equal time intervals sampled [default: 5]
    #[arg(long)]
    pub samples: Option<usize>,
}

/// Exact γ = 3 solution by characteristics. Well under a second.
pub fn burgers_exact(args: &BurgersArgs, s: &mut Settings) -> Result<Artifacts, CliError> {
    let f = args.data.resolve(s, None)?;
    let t_end = time_span(s, args.t_end, 0.5)?;
    let samples = s.get("samples", args.samples, 5)?;
    require((1..=1000).contains(&samples), || {
        format!("samples must be within [1, 1000], got {samples}")
    })?;
    let data = riemann_invariants(&f.u0, &f.rho0)?;
    let t_star = system_shock_time(&data);
    let mut table = Table::new("burgers_exact", &["time", "x", "u", "rho"]);
    for i in 0..=samples {
        let t = t_end * i as f64 / samples as f64;
        let st = exact_state(&f.u0, &f.rho0, t)?;
        for (k, x) in f.grid.points().into_iter().enumerate() {
            table.row(&[
                t.into(),
                x.into(),
                st.u.comps()[0][k].into(),
                st.rho.values()[k].into(),
            ]);
        }
    }
    let finite = |t: f64| t.is_finite().then_some(t);
    let summary = json!({
        "shock_time": finite(t_star),
        "shock_time_plus": finite(shock_time(&data.plus)),
        "shock_time_minus": finite(shock_time(&data.minus)),
    });
    Ok(Artifacts::new(summary).with(table))
}

#[derive(Args, Debug, Default, Clone)]
pub struct ConjugateArgs {
    /// Mode number of v₀ = cos(n x) [default: 2]
    #[arg(long)]
    pub n: Option<u32>,
    /// Conjugate points 2πm/n for m = 1..=m_max [default: 2]
    #[arg(long)]
    pub m_max: Option<u32>,
    /// Grid points [default: 128]
    #[arg(long)]
    pub grid: Option<usize>,
    /// Time step [default: min(0.02/n, 0.9 of the stability bound)]
    #[arg(long)]
    pub dt: Option<f64>,
}

/// Conjugate points along u ≡ ρ ≡ 1 with γ = 3. A few seconds for n = 2,
/// m_max = 3.
pub fn conjugate(args: &ConjugateArgs, s: &mut Settings) -> Result<Artifacts, CliError> {
    let n = s.get("n", args.n, 2)?;
    let m_max = s.get("m-max", args.m_max, 2)?;
    let grid = s.get("grid", args.grid, 128)?;
    let dt = s.get_opt("dt", args.dt)?;
    require(n >= 1, || format!("n must be ≥ 1, got {n}"))?;
    require((1..=20).contains(&m_max), || {
        format!("m-max must be within [1, 20], got {m_max}")
    })?;
    require(grid >= 8 && grid % 2 == 0 && grid <= 4096, || {
        format!("grid must be even and within [8, 4096], got {grid}")
    })?;
    require(4 * n as usize <= grid, || {
        format!("n must be ≤ grid/4 = {}, got {n}", grid / 4)
    })?;
    if let Some(dt) = dt {
        require(dt > 0.0, || format!("dt must be > 0, got {dt}"))?;
    }
    let rows = conjugate_table(n, m_max, grid, dt)?;
    let mut table = Table::new("conjugate", &["m", "expected", "detected", "gap"]);
    for r in &rows {
        table.row(&[
            r.m.into(),
            r.expected.into(),
            r.detected.into(),
            r.gap.into(),
        ]);
    }
    let max_gap = rows.iter().filter_map(|r| r.gap).fold(0.0, f64::max);
    let summary = json!({
        "all_detected": rows.iter().all(|r| r.detected.is_some()),
        "max_gap": max_gap,
        "rows": rows,
    });
    Ok(Artifacts::new(summary).with(table))
}

#[derive(Args, Debug, Default, Clone)]
pub struct CurvatureScanArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Number of random sections [default: 200]
    #[arg(long)]
    pub trials: Option<usize>,
    /// Seed of the first section; section i uses seed + i [default: 7]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Grid points [default: 64]
    #[arg(long)]
    pub grid: Option<usize>,
}

/// Sectional curvature over random one-dimensional sections. Well under a
/// second at the defaults.
pub fn curvature_scan(args: &CurvatureScanArgs, s: &mut Settings) -> Result<Artifacts, CliError> {
    let (model, _, _) = args.model.resolve(s, 1.0, 2.0)?;
    let trials = s.get("trials", args.trials, 200)?;
    let seed = s.get("seed", args.seed, 7)?;
    let grid = s.get("grid", args.grid, 64)?;
    require((1..=100_000).contains(&trials), || {
        format!("trials must be within [1, 100000], got {trials}")
    })?;
    require(grid >= 8 && grid % 2 == 0 && grid <= 4096, || {
        format!("grid must be even and within [8, 4096], got {grid}")
    })?;
    let report = curvature_sign_scan_1d(&model, CircleGrid::new(grid)?, trials, seed)?;
    let mut table = Table::new(
        "curvature_scan",
        &[
            "trial",
            "seed",
            "term_r",
            "term_div",
            "term_q",
            "term_grad",
            "total",
        ],
    );
    for r in &report.records {
        table.row(&[
            r.trial.into(),
            Cell::Text(r.seed.to_string()),
            r.term_r.into(),
            r.term_div.into(),
            r.term_q.into(),
            r.term_grad.into(),
            r.total.into(),
        ]);
    }
    Ok(Artifacts::new(&report).with(table))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Perturbation {
    /// Random band-limited field.
    Random,
    /// Gradient of a random potential.
    Gradient,
    /// Divergence-free part of a random field.
    Rotational,
}

impl std::str::FromStr for Perturbation {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        <Self as ValueEnum>::from_str(s, true)
    }
}

#[derive(Args, Debug, Default, Clone)]
pub struct TorusModesArgs {
    /// Grid points in x [default: 32]
    #[arg(long)]
    pub nx: Option<usize>,
    /// Grid points in y [default: 32]
    #[arg(long)]
    pub ny: Option<usize>,
    /// Shear rate ω of the background u = ω ∂y [default: 0.7]
    #[arg(long)]
    pub omega: Option<f64>,
    /// Sound speed c [default: 1.3]
    #[arg(long)]
    pub c: Option<f64>,
    /// Perturbation family [default: random]
    #[arg(long)]
    pub kind: Option<Perturbation>,
    /// Seed [default: 11]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Final time [default: 100/c]
    #[arg(long)]
    pub t_end: Option<f64>,
    /// Number of equal time intervals sampled [default: 200]
    #[arg(long)]
    pub samples: Option<usize>,
}

/// Closed-form Jacobi fields along the torus shear flow with the boundedness
/// certificate. About a second at the defaults.
pub fn torus_modes(args: &TorusModesArgs, s: &mut Settings) -> Result<Artifacts, CliError> {
    let nx = s.get("nx", args.nx, 32)?;
    let ny = s.get("ny", args.ny, 32)?;
    let omega = s.get("omega", args.omega, 0.7)?;
    let c = s.get("c", args.c, 1.3)?;
    let kind = s.get("kind", args.kind, Perturbation::Random)?;
    let seed = s.get("seed", args.seed, 11)?;
    for (name, v) in [("nx", nx), ("ny", ny)] {
        require(v >= 8 && v % 2 == 0 && v <= 1024, || {
            format!("{name} must be even and within [8, 1024], got {v}")
        })?;
    }
    require(c > 0.0 && c.is_finite(), || {
        format!("c must be > 0, got {c}")
    })?;
    require(omega.is_finite(), || {
        format!("omega must be finite, got {omega}")
    })?;
    let t_end = time_span(s, args.t_end, 100.0 / c)?;
    let samples = s.get("samples", args.samples, 200)?;
    require((1..=100_000).contains(&samples), || {
        format!("samples must be within [1, 100000], got {samples}")
    })?;
    let grid = TorusGrid::new(nx, ny)?;
    let mut rng = random::rng(seed);
    let v0 = match kind {
        Perturbation::Random => random::torus_vector(grid, &mut rng),
        Perturbation::Gradient => grad(&random::torus_field(grid, &mut rng)),
        Perturbation::Rotational => {
            let v = random::torus_vector(grid, &mut rng);
            baroflow::fields::hodge_decompose(&v).1
        }
    };
    let cert = classify_boundedness(&v0, c)?;
    let sol = TorusModeSolution::new(&v0, omega, c)?;
    let mut table = Table::new("torus_modes", &["time", "j_sup", "j_l2"]);
    let mut late = Vec::new();
    let mut sup: f64 = 0.0;
    for i in 0..=samples {
        let t = t_end * i as f64 / samples as f64;
        let j = sol.eval(t);
        let (js, jl) = (j.max_norm(), j.l2_norm());
        sup = sup.max(js);
        if 2 * i >= samples {
            late.push((t, jl));
        }
        table.row(&[t.into(), js.into(), jl.into()]);
    }
    let summary = json!({
        "certificate": cert,
        "max_j_sup": sup,
        "late_l2_slope": slope(&late),
    });
    Ok(Artifacts::new(summary).with(table))
}

#[derive(Args, Debug, Default, Clone)]
pub struct DiscSpectrumArgs {
    /// Rotation rate ω [default: 1]
    #[arg(long)]
    pub omega: Option<f64>,
    /// Sound speed c [default: 1]
    #[arg(long)]
    pub c: Option<f64>,
    /// Density at the boundary ρ₀ [default: 1]
    #[arg(long)]
    pub rho0: Option<f64>,
    /// Radial nodes, at least 200 [default: 400]
    #[arg(long)]
    pub nodes: Option<usize>,
    /// Largest |n| [default: 16]
    #[arg(long)]
    pub n_max: Option<u32>,
    /// Radial eigenpairs per n [default: 12]
    #[arg(long)]
    pub k_max: Option<usize>,
    /// Also classify a built-in initial perturbation [default: none]
    #[arg(long)]
    pub classify: Option<DiscPerturbation>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiscPerturbation {
    None,
    /// `ρv₀ = ∇f` with `f = (1 − r²)³ + (3r³ − r⁵) cos θ`.
    Gradient,
    /// Axisymmetric swirl `ρv₀ = −6r(1 − r²)² e_θ`.
    Rotational,
}

impl std::str::FromStr for DiscPerturbation {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        <Self as ValueEnum>::from_str(s, true)
    }
}

/// Angular points of the classification grid; modes `|n| ≤ 7` are resolved.
const DISC_ANGLES: usize = 16;

fn disc_perturbation(
    kind: DiscPerturbation,
    grid: DiscGrid,
    bg: &DiscBackground,
) -> Option<VectorField<DiscGrid>> {
    match kind {
        DiscPerturbation::None => None,
        DiscPerturbation::Gradient => Some(VectorField::from_fn(grid, |p| {
            let (r, th) = (p[0], p[1]);
            let s = 1.0 - r * r;
            let fr = -6.0 * r * s * s + (9.0 * r * r - 5.0 * r.powi(4)) * th.cos();
            let ft = -(3.0 * r.powi(3) - r.powi(5)) * th.sin();
            vec![fr / bg.rho(r), ft / (r * r * bg.rho(r))]
        })),
        DiscPerturbation::Rotational => Some(VectorField::from_fn(grid, |p| {
            let r = p[0];
            vec![0.0, -6.0 * (1.0 - r * r).powi(2) / (r * bg.rho(r))]
        })),
    }
}

/// Radial spectrum and characteristic frequencies of the rotating disc. A
/// few seconds at the defaults.
pub fn disc_spectrum(args: &DiscSpectrumArgs, s: &mut Settings) -> Result<Artifacts, CliError> {
    let omega = s.get("omega", args.omega, 1.0)?;
    let c = s.get("c", args.c, 1.0)?;
    let rho0 = s.get("rho0", args.rho0, 1.0)?;
    let nodes = s.get("nodes", args.nodes, 400)?;
    let n_max = s.get("n-max", args.n_max, 16)?;
    let k_max = s.get("k-max", args.k_max, 12)?;
    require(c > 0.0 && c.is_finite(), || {
        format!("c must be > 0, got {c}")
    })?;
    require(omega.is_finite(), || {
        format!("omega must be finite, got {omega}")
    })?;
    require((200..=4000).contains(&nodes), || {
        format!("nodes must be within [200, 4000], got {nodes}")
    })?;
    require(n_max <= 64, || format!("n-max must be ≤ 64, got {n_max}"))?;
    require(k_max >= 1 && k_max < nodes, || {
        format!("k-max must be within [1, nodes), got {k_max}")
    })?;
    let bg = DiscBackground::new(omega, c, rho0)?;
    let mut table = Table::new(
        "disc_spectrum",
        &[
            "n",
            "k",
            "lambda",
            "p",
            "q",
            "discriminant_margin",
            "y1",
            "y2",
            "y3",
        ],
    );
    let (mut min_margin, mut vieta) = (f64::INFINITY, 0.0f64);
    let n = n_max as i32;
    for m in -n..=n {
        for pair in sturm_liouville_eigs(&bg, m, k_max, nodes)? {
            let (p, q) = cubic_coefficients(pair.lambda, m, omega, c);
            let margin = (p * p * p - q * q) / (p * p * p);
            min_margin = min_margin.min(margin);
            let [y1, y2, y3] = characteristic_roots(pair.lambda, m, omega, c)?;
            let scale = 3.0 * p;
            vieta = vieta
                .max((y1 + y2 + y3).abs() / scale.sqrt())
                .max((y1 * y2 + y1 * y3 + y2 * y3 + 3.0 * p).abs() / scale);
            table.row(&[
                m.into(),
                pair.k.into(),
                pair.lambda.into(),
                p.into(),
                q.into(),
                margin.into(),
                y1.into(),
                y2.into(),
                y3.into(),
            ]);
        }
    }
    let rayleigh = rayleigh_bound_check(&bg, n_max, nodes)?;
    let mut rt = Table::new(
        "disc_rayleigh",
        &[
            "n",
            "lambda1",
            "bessel_root",
            "rayleigh_margin",
            "frequency_margin",
            "arithmetic_margin",
        ],
    );
    for r in &rayleigh.rows {
        rt.row(&[
            r.n.into(),
            r.lambda1.into(),
            r.bessel_root.into(),
            r.rayleigh_margin.into(),
            r.frequency_margin.into(),
            r.arithmetic_margin.into(),
        ]);
    }
    let classify = s.get("classify", args.classify, DiscPerturbation::None)?;
    let classification = match disc_perturbation(classify, DiscGrid::new(nodes, DISC_ANGLES)?, &bg)
    {
        None => None,
        Some(v0) => Some(synthesize_and_classify(&v0, &bg, k_max, n_max.min(7))?.0),
    };
    let summary = json!({
        "a": bg.a(),
        "b": bg.b(),
        "min_discriminant_margin": min_margin,
        "max_vieta_residual": vieta,
        "rayleigh_holds": rayleigh.holds(),
        "rayleigh_violations": rayleigh.violations,
        "classification": classification,
    });
    Ok(Artifacts::new(summary).with(table).with(rt))
}
