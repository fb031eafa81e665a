use baroflow::fields::{CircleGrid, Grid, ScalarField, TorusGrid, TrigPoly, VectorField};
use baroflow::metric::{
    christoffel, christoffel_weak, curvature_sign_scan_1d, density_functional_derivative,
    metric_inner, q_operator, sectional_curvature, TangentVector,
};
use baroflow::pressure::PressureModel;
use baroflow::random;
use proptest::prelude::*;

const GAMMAS: [f64; 6] = [1.1, 1.4, 2.0, 3.0, 3.5, 4.0];

fn torus_tangent(g: TorusGrid, rng: &mut impl rand::Rng) -> TangentVector<TorusGrid> {
    TangentVector::new(random::torus_vector(g, rng), random::torus_field(g, rng)).unwrap()
}

fn circle_tangent(g: CircleGrid, rng: &mut impl rand::Rng) -> TangentVector<CircleGrid> {
    TangentVector::new(
        random::circle_vector(g, 8, rng),
        random::circle_field(g, 8, rng),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn polytropic_pressure_identity(a in 0.05f64..20.0, gamma in 1.05f64..5.0, rho in 0.1f64..10.0) {
        let m = PressureModel::polytropic(a, gamma).unwrap();
        let want = a * rho.powf(gamma);
        prop_assert!((m.pressure(rho).unwrap() - want).abs() <= 1e-10 * want);
    }

    #[test]
    fn finite_difference_phi_prime_agrees(a in 0.1f64..10.0, gamma in 1.1f64..4.0, rho in 0.1f64..10.0) {
        let m = PressureModel::polytropic(a, gamma).unwrap();
        let exact = m.phi_prime(rho).unwrap();
        prop_assert!((m.phi_prime_fd(rho) - exact).abs() <= 1e-6 * exact.abs().max(1e-12));
    }

    #[test]
    fn q_is_symmetric(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let t = TorusGrid::new(16, 16).unwrap();
        let (u, v) = (random::torus_vector(t, &mut rng), random::torus_vector(t, &mut rng));
        let gap = q_operator(&u, &v).unwrap().sub(&q_operator(&v, &u).unwrap()).unwrap();
        prop_assert!(gap.max_abs() < 1e-9);
        let c = CircleGrid::new(32).unwrap();
        let (u, v) = (random::circle_vector(c, 8, &mut rng), random::circle_vector(c, 8, &mut rng));
        let gap = q_operator(&u, &v).unwrap().sub(&q_operator(&v, &u).unwrap()).unwrap();
        prop_assert!(gap.max_abs() < 1e-9);
    }

    #[test]
    fn christoffel_weak_and_strong_forms_agree(seed in any::<u64>(), gi in 0usize..6) {
        let model = PressureModel::polytropic(1.0, GAMMAS[gi]).unwrap();
        let mut rng = random::rng(seed);
        let t = TorusGrid::new(16, 16).unwrap();
        let rho = random::positive_density(&random::torus_field(t, &mut rng), 0.5);
        let (a, b, c) = (torus_tangent(t, &mut rng), torus_tangent(t, &mut rng), torus_tangent(t, &mut rng));
        let strong = metric_inner(&christoffel(&a, &b, &rho, &model).unwrap(), &c, &rho, &model).unwrap();
        let weak = christoffel_weak(&a, &b, &c, &rho, &model).unwrap();
        prop_assert!((strong - weak).abs() < 1e-8 * strong.abs().max(1.0));

        let g = CircleGrid::new(64).unwrap();
        let rho = random::positive_density(&random::circle_field(g, 8, &mut rng), 0.5);
        let (a, b, c) = (circle_tangent(g, &mut rng), circle_tangent(g, &mut rng), circle_tangent(g, &mut rng));
        let strong = metric_inner(&christoffel(&a, &b, &rho, &model).unwrap(), &c, &rho, &model).unwrap();
        let weak = christoffel_weak(&a, &b, &c, &rho, &model).unwrap();
        prop_assert!((strong - weak).abs() < 1e-8 * strong.abs().max(1.0));
    }

    #[test]
    fn curvature_of_a_degenerate_plane_vanishes(seed in any::<u64>(), gi in 0usize..6) {
        let model = PressureModel::polytropic(1.0, GAMMAS[gi]).unwrap();
        let mut rng = random::rng(seed);
        let t = TorusGrid::new(16, 16).unwrap();
        let rho = random::positive_density(&random::torus_field(t, &mut rng), 0.5);
        let a = torus_tangent(t, &mut rng);
        prop_assert!(sectional_curvature(&a, &a, &rho, &model).unwrap().total.abs() < 1e-10);
    }
}

#[test]
fn curvature_coefficient_sign_follows_three_minus_gamma() {
    for gamma in GAMMAS {
        let m = PressureModel::polytropic(1.0, gamma).unwrap();
        for i in 0..=100 {
            let x = 0.1 * (100.0f64).powf(i as f64 / 100.0);
            let k = m.curvature_coefficient(x).unwrap();
            if gamma == 3.0 {
                assert!(k.abs() < 1e-12, "γ=3 x={x}: {k}");
            } else {
                assert_eq!(k.signum(), (3.0 - gamma).signum(), "γ={gamma} x={x}: {k}");
            }
        }
    }
}

#[test]
fn one_dimensional_scan_is_nonnegative_up_to_gamma_three() {
    let g = CircleGrid::new(64).unwrap();
    for gamma in [1.4, 2.0, 3.0] {
        let m = PressureModel::polytropic(1.0, gamma).unwrap();
        let r = curvature_sign_scan_1d(&m, g, 50, 99).unwrap();
        assert!(r.min_total >= -1e-10, "γ={gamma}: {}", r.min_total);
        if gamma == 3.0 {
            assert!(r.max_abs_term_div < 1e-10);
        }
    }
}

/// Pushes `ρ` forward along the flow of `w` for time `s` and evaluates
/// `∫ α φ_fn(ρ_s)` in the reference coordinate.
fn pushed_functional(
    alpha: &TrigPoly,
    w: &TrigPoly,
    rho: &ScalarField<CircleGrid>,
    phi_fn: impl Fn(f64) -> f64,
    s: f64,
) -> f64 {
    let g = rho.grid();
    let steps = 64;
    let h = s / steps as f64;
    let mut eta = g.points();
    for _ in 0..steps {
        for x in eta.iter_mut() {
            let k1 = w.eval(*x);
            let k2 = w.eval(*x + 0.5 * h * k1);
            let k3 = w.eval(*x + 0.5 * h * k2);
            let k4 = w.eval(*x + h * k3);
            *x += h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
        }
    }
    let disp: Vec<f64> = eta.iter().zip(g.points()).map(|(e, x)| e - x).collect();
    let stretch: Vec<f64> = g.partial(0, &disp).iter().map(|d| 1.0 + d).collect();
    let integrand: Vec<f64> = (0..g.len())
        .map(|i| alpha.eval(eta[i]) * phi_fn(rho.values()[i] / stretch[i]) * stretch[i])
        .collect();
    g.integrate(&integrand)
}

#[test]
fn density_functional_derivative_matches_flow_difference() {
    let g = CircleGrid::new(64).unwrap();
    for seed in 0..5u64 {
        let mut rng = random::rng(seed);
        let alpha = random::circle_field(g, 4, &mut rng);
        let rho = random::positive_density(&random::circle_field(g, 4, &mut rng), 0.5);
        let w = random::circle_field(g, 4, &mut rng);
        let phi_fn = |r: f64| r * r * r;
        let analytic = density_functional_derivative(
            &alpha,
            |r| 3.0 * r * r,
            &rho,
            &VectorField::new(g, vec![w.values().to_vec()]).unwrap(),
        )
        .unwrap();
        let (ap, wp) = (
            TrigPoly::from_samples(alpha.values()),
            TrigPoly::from_samples(w.values()),
        );
        let s = 1e-5;
        let fd = (pushed_functional(&ap, &wp, &rho, phi_fn, s)
            - pushed_functional(&ap, &wp, &rho, phi_fn, -s))
            / (2.0 * s);
        assert!(
            (fd - analytic).abs() < 1e-5 * analytic.abs(),
            "seed {seed}: {fd} vs {analytic}"
        );
    }
}

#[test]
fn total_mass_is_invariant_under_any_flow() {
    let g = CircleGrid::new(64).unwrap();
    let mut rng = random::rng(3);
    let rho = random::positive_density(&random::circle_field(g, 8, &mut rng), 0.5);
    let w = random::circle_vector(g, 8, &mut rng);
    let one = ScalarField::constant(g, 1.0);
    assert!(
        density_functional_derivative(&one, |_| 1.0, &rho, &w)
            .unwrap()
            .abs()
            < 1e-10
    );
}
