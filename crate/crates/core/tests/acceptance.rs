//! Acceptance criteria, one line per criterion.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use baroflow::burgers::{exact_jacobi, exact_state, riemann_invariants, system_shock_time};
use baroflow::disc::{
    bessel_first_root, characteristic_roots, cubic_coefficients, curl_growth_rate,
    disc_curvature_adjudication, rayleigh_bound_check, sturm_liouville_eigs,
    synthesize_and_classify, DiscBackground,
};
use baroflow::fields::{
    grad, CircleGrid, DiscGrid, Grid, ScalarField, TorusGrid, TrigPoly, VectorField,
};
use baroflow::geodesic::{barotropic_initializer, integrate_geodesic};
use baroflow::jacobi::{conjugate_table, deviation_oracle, integrate_jacobi, slope};
use baroflow::metric::curvature_sign_scan_1d;
use baroflow::pressure::{Catalog, PressureModel};
use baroflow::random;
use baroflow::torus::{
    classify_boundedness, shear_curvature_check, torus_jacobi, Boundedness, TorusModeSolution,
};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(elapsed: Duration, limit_s: u64) -> bool {
    elapsed <= Duration::from_secs(limit_s)
}

fn gamma3() -> PressureModel {
    PressureModel::catalog(Catalog::ThreeOverRho).unwrap()
}

fn c1_conjugate_times() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut missing = Vec::new();
    for n in [1u32, 2, 4, 8] {
        for row in conjugate_table(n, 2, 128, None).map_err(|e| e.to_string())? {
            match row.gap {
                Some(g) => worst = worst.max(g),
                None => missing.push((n, row.m)),
            }
        }
    }
    let el = start.elapsed();
    check(
        missing.is_empty() && worst < 1e-6 && within(el, 30),
        format!("max |T_detected − 2πm/n| = {worst:.2e} (tol 1e-6), missing {missing:?}, {:.1}s (limit 30s)", el.as_secs_f64()),
    )
}

/// Smooth random data with three modes: `u₀ = 0.3 r₁`, `ρ₀ = 1 + 0.5 r₂/max|r₂|`, `v₀ = r₃`.
fn smooth_case(
    grid: CircleGrid,
    seed: u64,
) -> (
    ScalarField<CircleGrid>,
    ScalarField<CircleGrid>,
    ScalarField<CircleGrid>,
) {
    let mut rng = random::rng(seed);
    // Small amplitudes keep 0.9·T* resolved on 256 points.
    let u0 = random::circle_field(grid, 3, &mut rng).scale(0.1);
    let rho0 = random::positive_density(&random::circle_field(grid, 3, &mut rng), 0.15);
    let v0 = random::circle_field(grid, 3, &mut rng);
    (u0, rho0, v0)
}

fn c2_growth_bound() -> Outcome {
    let start = Instant::now();
    let grid = CircleGrid::new(256).unwrap();
    let model = gamma3();
    let (mut worst_exact, mut worst_num): (f64, f64) = (0.0, 0.0);
    let mut gap: f64 = 0.0;
    for seed in 0..50u64 {
        let (u0, rho0, v0) = smooth_case(grid, 1000 + seed);
        let t_star = system_shock_time(&riemann_invariants(&u0, &rho0).map_err(|e| e.to_string())?);
        let t_end = 0.9 * t_star;
        // sup of the interpolant; the node maximum can sit below it
        let v_sup = TrigPoly::from_samples(v0.values()).sup_abs();
        let bg = barotropic_initializer(
            &VectorField::new(grid, vec![u0.values().to_vec()]).unwrap(),
            &rho0,
            &model,
        )
        .map_err(|e| e.to_string())?;
        let vv = VectorField::new(grid, vec![v0.values().to_vec()]).unwrap();
        let dt = 0.4 * baroflow::geodesic::cfl_limit(&bg, &model).map_err(|e| e.to_string())?;
        let samples = integrate_jacobi(&bg, &vv, &model, dt, t_end, 1)
            .map_err(|e| format!("seed {seed}: {e}"))?;
        for s in samples.iter().filter(|s| s.time() > 0.0) {
            worst_num = worst_num.max(s.pert.j.max_norm() / (s.time() * v_sup));
        }
        for i in 1..=10 {
            let t = t_end * i as f64 / 10.0;
            let j = exact_jacobi(&u0, &rho0, &v0, t).map_err(|e| e.to_string())?;
            worst_exact = worst_exact.max(j.max_norm() / (t * v_sup));
        }
        let last = samples.last().unwrap();
        let j = exact_jacobi(&u0, &rho0, &v0, last.time()).map_err(|e| e.to_string())?;
        gap = gap.max(j.sub(&last.pert.j).unwrap().max_norm() / j.max_norm());
    }
    let el = start.elapsed();
    check(
        worst_exact <= 1.0 + 1e-6 && worst_num <= 1.0 + 1e-6 && within(el, 120),
        format!(
            "max ‖j‖∞/(t‖v₀‖∞): closed form {worst_exact:.6}, integrator {worst_num:.6} (tol 1+1e-6); \
             relative gap at 0.9·T* {gap:.1e}; {:.1}s (limit 120s)",
            el.as_secs_f64()
        ),
    )
}

fn c3_curvature_scan() -> Outcome {
    let start = Instant::now();
    let grid = CircleGrid::new(64).unwrap();
    let mut mins = Vec::new();
    for gamma in [1.4, 2.0, 3.0] {
        let m = PressureModel::polytropic(1.0, gamma).unwrap();
        let r = curvature_sign_scan_1d(&m, grid, 200, 7).map_err(|e| e.to_string())?;
        mins.push((gamma, r.min_total));
    }
    // The sign of the divergence term does not depend on A, but its weight
    // against the gradient term does; A = 10 lets it show.
    let m4 = PressureModel::polytropic(10.0, 4.0).unwrap();
    let r4 = curvature_sign_scan_1d(&m4, grid, 200, 7).map_err(|e| e.to_string())?;
    let el = start.elapsed();
    let ok = mins.iter().all(|(_, m)| *m >= -1e-10) && r4.negative_count > 0 && within(el, 60);
    check(
        ok,
        format!(
            "min total for γ=1.4,2,3: {:.3e}, {:.3e}, {:.3e} (tol −1e-10); γ=4 (A=10): {} of 200 negative, min {:.3e}; {:.1}s (limit 60s)",
            mins[0].1,
            mins[1].1,
            mins[2].1,
            r4.negative_count,
            r4.min_total,
            el.as_secs_f64()
        ),
    )
}

fn c4_exact_vs_numeric() -> Outcome {
    let start = Instant::now();
    let grid = CircleGrid::new(256).unwrap();
    let model = gamma3();
    let u0 = ScalarField::from_fn(grid, |x| x[0].sin());
    let rho0 = ScalarField::constant(grid, 1.0);
    let exact = exact_state(&u0, &rho0, 0.5).map_err(|e| e.to_string())?;
    let state = barotropic_initializer(
        &VectorField::from_fn(grid, |x| vec![x[0].sin()]),
        &rho0,
        &model,
    )
    .unwrap();
    let gap = |dt: f64| -> Result<f64, String> {
        let tr = integrate_geodesic(&state, &model, dt, 0.5, 1000).map_err(|e| e.to_string())?;
        let s = &tr.last().state;
        let du = s.u.sub(&exact.u).unwrap().max_norm();
        let dr = s.rho.sub(&exact.rho).unwrap().max_abs();
        Ok(du.max(dr))
    };
    let (g1, g2) = (gap(0.005)?, gap(0.0025)?);
    let el = start.elapsed();
    check(
        g1 < 1e-6 && g2 < 1e-6 && g1 / g2 >= 8.0 && within(el, 30),
        format!("L∞ gap {g1:.2e} (dt=0.005), {g2:.2e} (dt=0.0025), ratio {:.1} (need ≥ 8); {:.1}s (limit 30s)", g1 / g2, el.as_secs_f64()),
    )
}

fn c5_deviation_oracle() -> Outcome {
    let start = Instant::now();
    let grid = CircleGrid::new(64).unwrap();
    let model = gamma3();
    let u0 = VectorField::from_fn(grid, |x| vec![0.3 * x[0].sin()]);
    let rho0 = ScalarField::from_fn(grid, |x| 1.0 + 0.2 * x[0].cos());
    let v0 = VectorField::from_fn(grid, |x| vec![(2.0 * x[0]).cos() + 0.5 * x[0].sin()]);
    let (dt, t_end) = (0.01, 1.0);
    let bg = barotropic_initializer(&u0, &rho0, &model).unwrap();
    let lin = integrate_jacobi(&bg, &v0, &model, dt, t_end, 1000).map_err(|e| e.to_string())?;
    let j = lin.last().unwrap().lagrangian_j();
    let mut pts = Vec::new();
    for s in [1e-2, 1e-3, 1e-4] {
        let dev = deviation_oracle(&u0, &rho0, &v0, &model, s, dt, t_end, 1000)
            .map_err(|e| e.to_string())?;
        let d = &dev.last().unwrap().1;
        let diff: Vec<f64> = d[0]
            .iter()
            .zip(&j[0])
            .map(|(a, b)| (a - b) * (a - b))
            .collect();
        pts.push((s, grid.integrate(&diff).sqrt()));
    }
    let fit = slope(
        &pts.iter()
            .map(|(s, e)| (s.log10(), e.log10()))
            .collect::<Vec<_>>(),
    );
    let el = start.elapsed();
    check(
        (fit - 2.0).abs() <= 0.2 && within(el, 120),
        format!(
            "L² errors {:.2e}, {:.2e}, {:.2e} at s = 1e-2, 1e-3, 1e-4; slope {fit:.3} (need 2 ± 0.2); {:.1}s (limit 120s)",
            pts[0].1,
            pts[1].1,
            pts[2].1,
            el.as_secs_f64()
        ),
    )
}

fn c6_torus_classification() -> Outcome {
    let start = Instant::now();
    let grid = TorusGrid::new(32, 32).unwrap();
    let (omega, c) = (0.7, 1.3);
    let mut rng = random::rng(11);
    let f = random::torus_field(grid, &mut rng);
    let grad_v0 = grad(&f);
    let psi = random::torus_field(grid, &mut rng);
    let dpsi = grad(&psi);
    let div_free = VectorField::new(
        grid,
        vec![
            dpsi.comps()[1].iter().map(|x| -x).collect(),
            dpsi.comps()[0].clone(),
        ],
    )
    .unwrap();

    let cert_g = classify_boundedness(&grad_v0, c).map_err(|e| e.to_string())?;
    let bound = cert_g.series_bound.unwrap_or(f64::NAN);
    let sol = TorusModeSolution::new(&grad_v0, omega, c).map_err(|e| e.to_string())?;
    let t_max = 100.0 / c;
    let sup = (0..=2000)
        .map(|i| sol.eval(t_max * i as f64 / 2000.0).max_norm())
        .fold(0.0, f64::max);

    let cert_z = classify_boundedness(&div_free, c).map_err(|e| e.to_string())?;
    let series: Vec<(f64, f64)> = (0..=90)
        .map(|i| {
            let t = 10.0 + i as f64;
            (t, torus_jacobi(&div_free, omega, c, t).unwrap().l2_norm())
        })
        .collect();
    let fit = slope(&series);
    let z = div_free.l2_norm();

    let mixed = grad_v0.add(&div_free.scale(1e-3)).unwrap();
    let flips = classify_boundedness(&mixed, c).unwrap().class == Boundedness::LinearGrowth;
    let el = start.elapsed();
    check(
        cert_g.class == Boundedness::Bounded
            && sup <= bound + 1e-10
            && cert_z.class == Boundedness::LinearGrowth
            && (fit / z - 1.0).abs() < 0.01
            && flips
            && within(el, 60),
        format!(
            "gradient: sup‖j‖∞ {sup:.4} ≤ bound {bound:.4}; div-free: slope {fit:.6} vs ‖z‖₂ {z:.6}; \
             ε=1e-3 rotational part flips class: {flips}; {:.1}s (limit 60s)",
            el.as_secs_f64()
        ),
    )
}

fn c7_torus_curvature() -> Outcome {
    let grid = TorusGrid::new(32, 32).unwrap();
    let mut rng = random::rng(21);
    let omega = ScalarField::from_fn(grid, |p| 0.4 + 0.3 * p[0].sin() - 0.1 * (2.0 * p[0]).cos());
    let v = random::torus_vector(grid, &mut rng);
    let a = 0.8;
    let mut worst: f64 = 0.0;
    let mut coef_gap: f64 = 0.0;
    for gamma in [1.4, 2.0, 2.5] {
        let m = PressureModel::polytropic(a, gamma).unwrap();
        let chk = shear_curvature_check(&omega, &v, &m).map_err(|e| e.to_string())?;
        worst = worst.max(chk.relative_gap);
        let want = a * (3.0 - gamma) / 2.0;
        coef_gap = coef_gap.max((chk.coefficient - want).abs() / want);
    }
    check(
        worst < 1e-8 && coef_gap < 1e-8,
        format!("max relative gap to coefficient·∫(div v)² {worst:.2e} (tol 1e-8); coefficient vs A(3−γ)/2 {coef_gap:.1e}"),
    )
}

fn c8_disc_spectrum() -> Outcome {
    let start = Instant::now();
    let bg = DiscBackground::new(1.0, 1.0, 1.0).unwrap();
    let (mut min_margin, mut vieta) = (f64::INFINITY, 0.0f64);
    let mut bad = Vec::new();
    for n in 0..=16i32 {
        let eigs = sturm_liouville_eigs(&bg, n, 12, 400).map_err(|e| e.to_string())?;
        for sign in [1, -1] {
            let n = sign * n;
            for e in &eigs {
                let (p, q) = cubic_coefficients(e.lambda, n, bg.omega, bg.c);
                min_margin = min_margin.min((p * p * p - q * q) / (p * p * p));
                match characteristic_roots(e.lambda, n, bg.omega, bg.c) {
                    Ok(y) => {
                        let gaps = [
                            (y[0] - y[1]).abs(),
                            (y[1] - y[2]).abs(),
                            (y[0] - y[2]).abs(),
                        ];
                        if gaps.iter().any(|g| *g <= 1e-6) {
                            bad.push((n, e.k));
                        }
                        vieta = vieta
                            .max((y[0] + y[1] + y[2]).abs())
                            .max(
                                (y[0] * y[1] + y[0] * y[2] + y[1] * y[2] + 3.0 * p).abs()
                                    / (1.0 + 3.0 * p),
                            )
                            .max((y[0] * y[1] * y[2] - 2.0 * q).abs() / (1.0 + 2.0 * q.abs()));
                    }
                    Err(_) => bad.push((n, e.k)),
                }
            }
        }
    }
    let ray = rayleigh_bound_check(&bg, 16, 400).map_err(|e| e.to_string())?;
    let r_min = ray
        .rows
        .iter()
        .map(|r| r.rayleigh_margin)
        .fold(f64::INFINITY, f64::min);
    let f_min = ray
        .rows
        .iter()
        .map(|r| r.frequency_margin)
        .fold(f64::INFINITY, f64::min);
    let el = start.elapsed();
    check(
        bad.is_empty() && min_margin > 0.0 && ray.holds() && vieta < 1e-9 && within(el, 120),
        format!(
            "min (p³−q²)/p³ {min_margin:.3e}, failing pairs {bad:?}; min Rayleigh margin {r_min:.4}, \
             min frequency margin {f_min:.4}; Vieta residual {vieta:.1e} (tol 1e-9); {:.1}s (limit 120s)",
            el.as_secs_f64()
        ),
    )
}

fn c9_bessel() -> Outcome {
    let (c0, c1) = (
        bessel_first_root(0).map_err(|e| e.to_string())?,
        bessel_first_root(1).map_err(|e| e.to_string())?,
    );
    check(
        (c0 - 2.404826).abs() < 1e-6 && (c1 - 3.831706).abs() < 1e-6,
        format!("c₀ = {c0:.9}, c₁ = {c1:.9} (targets 2.404826, 3.831706, tol 1e-6)"),
    )
}

fn c10_disc_jacobi() -> Outcome {
    let start = Instant::now();
    let bg = DiscBackground::new(1.0, 1.0, 1.0).unwrap();
    let grid = DiscGrid::new(200, 16).unwrap();
    let gradient = VectorField::from_fn(grid, |p| {
        let (r, th) = (p[0], p[1]);
        let s = 1.0 - r * r;
        let fr = -6.0 * r * s * s + (9.0 * r * r - 5.0 * r.powi(4)) * th.cos();
        let ft = -(3.0 * r.powi(3) - r.powi(5)) * th.sin();
        vec![fr / bg.rho(r), ft / (r * r * bg.rho(r))]
    });
    let rotational = VectorField::from_fn(grid, |p| {
        let r = p[0];
        vec![0.0, -6.0 * (1.0 - r * r).powi(2) / bg.rho(r)]
    });
    let times: Vec<f64> = (5..=10).map(|i| 10.0 * i as f64).collect();
    let (cg, rg) = synthesize_and_classify(&gradient, &bg, 12, 4).map_err(|e| e.to_string())?;
    let grad_rate = curl_growth_rate(&rg, &times);
    let grad_scale = rg
        .curl_series(&times)
        .iter()
        .map(|s| s.1)
        .fold(0.0, f64::max);
    let (cr, rr) = synthesize_and_classify(&rotational, &bg, 12, 4).map_err(|e| e.to_string())?;
    let rot_rate = curl_growth_rate(&rr, &times);
    let el = start.elapsed();
    let nonzero = cg
        .modes
        .iter()
        .all(|m| m.n == 0 || m.frequencies.iter().all(|y| *y != 0.0));
    check(
        cg.class == Boundedness::Bounded
            && !cg.growth_detected
            && nonzero
            && cg.min_frequency_nonzero_n > 0.0
            && cr.class == Boundedness::LinearGrowth
            && cr.growth_detected
            && rot_rate > 0.0
            && (rot_rate / cr.secular_rate - 1.0).abs() < 0.05
            && within(el, 60),
        format!(
            "gradient: bounded, min |y| (n≠0) {:.3}, ‖curl ρj‖ slope {grad_rate:.1e} (scale {grad_scale:.2e}); \
             rotational n=0: growth rate {rot_rate:.4} vs secular {:.4}; {:.1}s (limit 60s)",
            cg.min_frequency_nonzero_n,
            cr.secular_rate,
            el.as_secs_f64()
        ),
    )
}

fn c11_disc_curvature() -> Outcome {
    let grid = DiscGrid::new(128, 16).unwrap();
    let mut worst: f64 = 0.0;
    let mut lines = Vec::new();
    for (k, c) in [(3.0, 1.0), (0.5, 1.7)] {
        let r = disc_curvature_adjudication(grid, k, c).map_err(|e| e.to_string())?;
        worst = worst.max(r.relative_gap);
        lines.push(format!(
            "k={k}, c={c}: total {:.6e}, −π(k−1)²/(12c²) {:.6e}, alternative /48 {:.6e}, ratio {:.4}",
            r.full.total, r.closed_form, r.alternative, r.alternative_ratio
        ));
    }
    check(
        worst < 1e-8,
        format!(
            "full vs reduced relative gap {worst:.1e} (tol 1e-8); {}",
            lines.join("; ")
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 11] = [
        ("conjugate times", c1_conjugate_times),
        ("1D Jacobi growth bound", c2_growth_bound),
        ("curvature sign scan", c3_curvature_scan),
        ("exact vs numeric geodesic", c4_exact_vs_numeric),
        ("deviation oracle convergence", c5_deviation_oracle),
        ("torus classification", c6_torus_classification),
        ("torus curvature coefficient", c7_torus_curvature),
        ("disc spectrum", c8_disc_spectrum),
        ("Bessel roots", c9_bessel),
        ("disc Jacobi criterion", c10_disc_jacobi),
        ("disc curvature adjudication", c11_disc_curvature),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome =
            catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(d) => println!("criterion {:>2} [{name}]: PASS ({d})", i + 1),
            Err(d) => {
                failed += 1;
                println!("criterion {:>2} [{name}]: FAIL ({d})", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
