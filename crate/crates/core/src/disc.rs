//! Linear stability of the rigidly rotating disc `u = ω ∂_θ` with
//! `p = c²ρ²/2` and `ρ(r) = a + b r²`, `a = ρ₀ − ω²/(2c²)`, `b = ω²/(2c²)`.
//!
//! In the rotating frame each azimuthal mode `e^{inθ}` of the density
//! perturbation `σ`, of `F = div(ρv)` and of `G = −curl(ρv)` is expanded in the
//! Dirichlet eigenfunctions of `Λσ = div(ρ grad σ)`. Each eigenpair then
//! evolves by a constant 3×3 system
//!
//! ```text
//! σ′ = −F,   F′ = c²λσ − 2ωG,   G′ = 2ωF + inω²σ
//! ```
//!
//! whose frequencies are the negated roots of `y³ − 3py − 2q` with
//! `p = (c²λ + 4ω²)/3`, `q = nω³`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, Matrix3, SymmetricEigen, Vector3};
pub use rustfft::num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::{spectral, DiscGrid, Grid, ScalarField, VectorField};
use crate::geodesic::rigid_rotation_disc;
use crate::jacobi::slope;
use crate::metric::{q_operator, sectional_curvature, CurvatureReport, TangentVector};
use crate::pressure::{Catalog, PressureModel};
use crate::torus::Boundedness;

/// Smallest radial resolution accepted by the eigensolver.
pub const MIN_RADIAL_NODES: usize = 200;
/// Largest boundary value of `F₀`, `G₀` (relative to their sup) accepted for expansion.
pub const PROJECTION_TOLERANCE: f64 = 1e-6;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DiscBackground {
    pub omega: f64,
    pub c: f64,
    pub rho0: f64,
}

impl DiscBackground {
    pub fn new(omega: f64, c: f64, rho0: f64) -> Result<Self> {
        if !(c > 0.0) || !omega.is_finite() {
            return Err(Error::Invalid(format!(
                "need c > 0 and finite ω, got c = {c}, ω = {omega}"
            )));
        }
        let threshold = omega * omega / (2.0 * c * c);
        if !(rho0 > threshold) {
            return Err(Error::Vacuum { rho0, threshold });
        }
        Ok(Self { omega, c, rho0 })
    }

    /// `b = ω²/(2c²)`.
    pub fn b(&self) -> f64 {
        self.omega * self.omega / (2.0 * self.c * self.c)
    }

    /// `a = ρ₀ − b`.
    pub fn a(&self) -> f64 {
        self.rho0 - self.b()
    }

    pub fn rho(&self, r: f64) -> f64 {
        self.a() + self.b() * r * r
    }

    /// `λ ≡ 1/c²`, the weight for which `p = c²ρ²/2`.
    pub fn model(&self) -> Result<PressureModel> {
        PressureModel::catalog(Catalog::Constant(1.0 / (self.c * self.c)))
    }
}

/// The finite-difference form of `−Λ` for mode `n` on nodes `r_m = m/N`,
/// `m = 1..N−1`: `K ζ = λ W ζ` with `K` symmetric tridiagonal and `W`
/// diagonal. `ζ_N = 0`; at the centre the flux vanishes for `n = 0` and
/// `ζ_0 = 0` otherwise.
#[derive(Clone, Debug)]
struct RadialOperator {
    diag: Vec<f64>,
    off: Vec<f64>,
    weights: Vec<f64>,
    radii: Vec<f64>,
}

impl RadialOperator {
    fn new(bg: &DiscBackground, n: i32, nodes: usize) -> Result<Self> {
        if nodes < MIN_RADIAL_NODES {
            return Err(Error::Invalid(format!(
                "need at least {MIN_RADIAL_NODES} radial nodes, got {nodes}"
            )));
        }
        let h = 1.0 / nodes as f64;
        let size = nodes - 1;
        let kappa = |m: usize| {
            let r = (m as f64 + 0.5) * h;
            r * bg.rho(r) / h
        };
        let n2 = (n as f64).powi(2);
        let radii: Vec<f64> = (1..=size).map(|m| m as f64 * h).collect();
        let mut diag = Vec::with_capacity(size);
        for (idx, &r) in radii.iter().enumerate() {
            let m = idx + 1;
            let inner = if m == 1 && n == 0 { 0.0 } else { kappa(m - 1) };
            diag.push(inner + kappa(m) + n2 * bg.rho(r) * h / r);
        }
        let off = (1..size).map(|m| -kappa(m)).collect();
        let weights = radii.iter().map(|r| r * h).collect();
        Ok(Self {
            diag,
            off,
            weights,
            radii,
        })
    }

    fn len(&self) -> usize {
        self.diag.len()
    }

    /// All eigenpairs, ascending, with `Σ W ζ² = 1`.
    fn spectrum(&self) -> (Vec<f64>, Vec<Vec<f64>>) {
        let size = self.len();
        let s: Vec<f64> = self.weights.iter().map(|w| 1.0 / w.sqrt()).collect();
        let mut m = DMatrix::zeros(size, size);
        for i in 0..size {
            m[(i, i)] = self.diag[i] * s[i] * s[i];
            if i + 1 < size {
                let v = self.off[i] * s[i] * s[i + 1];
                m[(i, i + 1)] = v;
                m[(i + 1, i)] = v;
            }
        }
        let eig = SymmetricEigen::new(m);
        let mut order: Vec<usize> = (0..size).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = order
            .iter()
            .map(|&k| {
                let mut z: Vec<f64> = (0..size).map(|i| eig.eigenvectors[(i, k)] * s[i]).collect();
                let peak = z
                    .iter()
                    .copied()
                    .fold(0.0, |acc: f64, x| if x.abs() > acc.abs() { x } else { acc });
                if peak < 0.0 {
                    z.iter_mut().for_each(|x| *x = -*x);
                }
                z
            })
            .collect();
        (values, vectors)
    }

    /// `W⁻¹ K x`, the discrete `−Λ`.
    fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let size = self.len();
        (0..size)
            .map(|i| {
                let mut acc = x[i] * self.diag[i];
                if i > 0 {
                    acc += x[i - 1] * self.off[i - 1];
                }
                if i + 1 < size {
                    acc += x[i + 1] * self.off[i];
                }
                acc / self.weights[i]
            })
            .collect()
    }

    fn project(&self, zeta: &[f64], profile: &[Complex64]) -> Complex64 {
        zeta.iter()
            .zip(profile)
            .zip(&self.weights)
            .map(|((z, p), w)| p * (z * w))
            .sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EigenPair {
    pub n: i32,
    /// Radial index, starting at 1.
    pub k: usize,
    pub lambda: f64,
    /// Radial nodes `r_m = m/N`, `m = 1..N`.
    pub radii: Vec<f64>,
    /// `ζ` at `radii`; the last entry is the boundary value 0.
    pub zeta: Vec<f64>,
}

/// Smallest `k_max` eigenvalues of `−Λ` for azimuthal mode `n` with `ζ(1) = 0`.
pub fn sturm_liouville_eigs(
    bg: &DiscBackground,
    n: i32,
    k_max: usize,
    nodes: usize,
) -> Result<Vec<EigenPair>> {
    let op = RadialOperator::new(bg, n, nodes)?;
    let (values, vectors) = op.spectrum();
    let mut radii = op.radii.clone();
    radii.push(1.0);
    Ok(values
        .into_iter()
        .zip(vectors)
        .take(k_max)
        .enumerate()
        .map(|(k, (lambda, mut zeta))| {
            zeta.push(0.0);
            EigenPair {
                n,
                k: k + 1,
                lambda,
                radii: radii.clone(),
                zeta,
            }
        })
        .collect())
}

/// `(p, q)` of the depressed cubic `y³ − 3py − 2q`.
pub fn cubic_coefficients(lambda: f64, n: i32, omega: f64, c: f64) -> (f64, f64) {
    (
        (c * c * lambda + 4.0 * omega * omega) / 3.0,
        n as f64 * omega.powi(3),
    )
}

/// Real roots of `y³ − 3py − 2q = 0`, descending.
pub fn characteristic_roots(lambda: f64, n: i32, omega: f64, c: f64) -> Result<[f64; 3]> {
    if !(lambda > 0.0) {
        return Err(Error::Invalid(format!(
            "eigenvalue must be positive, got {lambda}"
        )));
    }
    let (p, q) = cubic_coefficients(lambda, n, omega, c);
    let (q2, p3) = (q * q, p * p * p);
    if !(q2 < p3) {
        return Err(Error::NotHyperbolic { q2, p3 });
    }
    let s = 2.0 * p.sqrt();
    if n == 0 {
        let y = (3.0 * p).sqrt();
        return Ok([y, 0.0, -y]);
    }
    let theta = (q / p.powf(1.5)).clamp(-1.0, 1.0).acos();
    Ok([0, 1, 2].map(|k| s * (theta / 3.0 - 2.0 * PI * k as f64 / 3.0).cos()))
}

#[derive(Clone, Copy, Debug)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    fn new(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    fn renorm(s: f64, e: f64) -> Self {
        let hi = s + e;
        Self {
            hi,
            lo: e - (hi - s),
        }
    }

    fn add(self, o: Self) -> Self {
        let s = self.hi + o.hi;
        let bb = s - self.hi;
        let e = (self.hi - (s - bb)) + (o.hi - bb) + self.lo + o.lo;
        Self::renorm(s, e)
    }

    fn mul(self, b: f64) -> Self {
        let p = self.hi * b;
        let e = self.hi.mul_add(b, -p) + self.lo * b;
        Self::renorm(p, e)
    }

    fn div(self, b: f64) -> Self {
        let q1 = self.hi / b;
        let p = q1 * b;
        let pe = q1.mul_add(b, -p);
        let r = (self.hi - p) - pe + self.lo;
        Self::renorm(q1, r / b)
    }

    fn neg(self) -> Self {
        Self {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

/// `J_n(x)` from its ascending series, summed in double-double arithmetic
/// and truncated once terms fall below `1e-18`.
pub fn bessel_j(n: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = Dd::new(1.0);
    for i in 1..=n {
        term = term.mul(half).div(i as f64);
    }
    let mut sum = term;
    let mut k = 0u32;
    loop {
        k += 1;
        term = term
            .mul(half)
            .mul(half)
            .div(k as f64 * (k + n) as f64)
            .neg();
        sum = sum.add(term);
        if k as f64 > half && term.hi.abs() < 1e-18 {
            break;
        }
    }
    sum.hi + sum.lo
}

/// First positive zero of `J_n`, `0 ≤ n ≤ 64`, by a 0.1 scan from
/// `max(n, 1)` and bisection inside `[max(n, 1), n + 10]`.
pub fn bessel_first_root(n: u32) -> Result<f64> {
    if n > 64 {
        return Err(Error::Invalid(format!(
            "Bessel order must be at most 64, got {n}"
        )));
    }
    let lo0 = (n as f64).max(1.0);
    let hi_end = n as f64 + 10.0;
    let mut a = lo0;
    let mut fa = bessel_j(n, a);
    while a < hi_end {
        let b = (a + 0.1).min(hi_end);
        let fb = bessel_j(n, b);
        if fa.signum() != fb.signum() {
            let (mut lo, mut hi) = (a, b);
            while hi - lo > 1e-14 * hi {
                let mid = 0.5 * (lo + hi);
                if bessel_j(n, mid).signum() == fa.signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Ok(0.5 * (lo + hi));
        }
        a = b;
        fa = fb;
    }
    Err(Error::Convergence(format!(
        "no zero of J_{n} in [{lo0}, {hi_end}]"
    )))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RayleighRow {
    pub n: i32,
    pub lambda1: f64,
    pub bessel_root: f64,
    /// `λ_{1n} − (a c_n² + b(n²+1))`.
    pub rayleigh_margin: f64,
    /// `c²λ_{1n} − ω²(3|n|^{2/3} − 4)`.
    pub frequency_margin: f64,
    /// `n² + 7 − 6|n|^{2/3}`.
    pub arithmetic_margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RayleighReport {
    pub rows: Vec<RayleighRow>,
    /// Rows with a nonpositive margin.
    pub violations: Vec<i32>,
}

impl RayleighReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `λ_{1n} ≥ a c_n² + b(n²+1)` and its consequences for `0 ≤ n ≤ n_max`.
pub fn rayleigh_bound_check(
    bg: &DiscBackground,
    n_max: u32,
    nodes: usize,
) -> Result<RayleighReport> {
    let (a, b) = (bg.a(), bg.b());
    let w2 = bg.omega * bg.omega;
    let mut rows = Vec::new();
    for n in 0..=n_max {
        let lambda1 = sturm_liouville_eigs(bg, n as i32, 1, nodes)?[0].lambda;
        let cn = bessel_first_root(n)?;
        let nf = n as f64;
        let n23 = nf.powf(2.0 / 3.0);
        rows.push(RayleighRow {
            n: n as i32,
            lambda1,
            bessel_root: cn,
            rayleigh_margin: lambda1 - (a * cn * cn + b * (nf * nf + 1.0)),
            frequency_margin: bg.c * bg.c * lambda1 - w2 * (3.0 * n23 - 4.0),
            arithmetic_margin: nf * nf + 7.0 - 6.0 * n23,
        });
    }
    let violations = rows
        .iter()
        .filter(|r| {
            !(r.rayleigh_margin > 0.0 && r.frequency_margin > 0.0 && r.arithmetic_margin > 0.0)
        })
        .map(|r| r.n)
        .collect();
    Ok(RayleighReport { rows, violations })
}

/// Coefficients of one eigenpair `(k, n)` in the rotating frame.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModeCoefficients {
    pub sigma: Complex64,
    pub f: Complex64,
    pub g: Complex64,
}

impl ModeCoefficients {
    pub const ZERO: Self = Self {
        sigma: ZERO,
        f: ZERO,
        g: ZERO,
    };

    fn to_vector(self) -> Vector3<Complex64> {
        Vector3::new(self.sigma, self.f, self.g)
    }

    fn from_vector(v: Vector3<Complex64>) -> Self {
        Self {
            sigma: v[0],
            f: v[1],
            g: v[2],
        }
    }

    pub fn norm(&self) -> f64 {
        (self.sigma.norm_sqr() + self.f.norm_sqr() + self.g.norm_sqr()).sqrt()
    }
}

fn mode_matrix(lambda: f64, n: i32, omega: f64, c: f64) -> Matrix3<Complex64> {
    let r = |x: f64| Complex64::new(x, 0.0);
    Matrix3::new(
        ZERO,
        r(-1.0),
        ZERO,
        r(c * c * lambda),
        ZERO,
        r(-2.0 * omega),
        I * (n as f64 * omega * omega),
        r(2.0 * omega),
        ZERO,
    )
}

/// Eigendecomposition of the 3×3 mode system for one eigenvalue `λ`.
#[derive(Clone, Debug)]
pub struct ModeSystem {
    pub lambda: f64,
    pub n: i32,
    /// Solutions are combinations of `e^{iyt}` over these `y`.
    pub frequencies: [f64; 3],
    vectors: Matrix3<Complex64>,
    inverse: Matrix3<Complex64>,
}

impl ModeSystem {
    pub fn new(lambda: f64, n: i32, omega: f64, c: f64) -> Result<Self> {
        let frequencies = characteristic_roots(lambda, n, omega, c)?.map(|y| -y);
        let scale = frequencies.iter().fold(1.0f64, |m, y| m.max(y.abs()));
        for i in 0..3 {
            for j in i + 1..3 {
                if (frequencies[i] - frequencies[j]).abs() <= 1e-12 * scale {
                    return Err(Error::Defective(format!(
                        "repeated frequency {} for λ = {lambda}, n = {n}",
                        frequencies[i]
                    )));
                }
            }
        }
        let a = mode_matrix(lambda, n, omega, c);
        let mut vectors = Matrix3::zeros();
        for (col, y) in frequencies.iter().enumerate() {
            let b = a - Matrix3::identity() * (I * *y);
            let rows = [
                b.row(0).transpose(),
                b.row(1).transpose(),
                b.row(2).transpose(),
            ];
            let mut best = Vector3::zeros();
            let mut best_norm = -1.0;
            for (i, j) in [(0, 1), (0, 2), (1, 2)] {
                let v = rows[i].cross(&rows[j]);
                let norm = v.norm();
                if norm > best_norm {
                    best = v / Complex64::new(norm, 0.0);
                    best_norm = norm;
                }
            }
            vectors.set_column(col, &best);
        }
        let inverse = vectors.try_inverse().ok_or_else(|| {
            Error::Defective(format!("singular eigenvectors for λ = {lambda}, n = {n}"))
        })?;
        Ok(Self {
            lambda,
            n,
            frequencies,
            vectors,
            inverse,
        })
    }

    /// Amplitudes along the eigenvectors.
    fn amplitudes(&self, x0: ModeCoefficients) -> Vector3<Complex64> {
        self.inverse * x0.to_vector()
    }

    pub fn evolve(&self, x0: ModeCoefficients, t: f64) -> ModeCoefficients {
        let a = self.amplitudes(x0);
        let phase =
            Vector3::from_fn(|j, _| a[j] * Complex64::from_polar(1.0, self.frequencies[j] * t));
        ModeCoefficients::from_vector(self.vectors * phase)
    }

    /// `∫₀ᵗ G(s) ds`.
    pub fn integrated_g(&self, x0: ModeCoefficients, t: f64) -> Complex64 {
        let a = self.amplitudes(x0);
        (0..3)
            .map(|j| {
                let y = self.frequencies[j];
                let w = if y == 0.0 {
                    Complex64::new(t, 0.0)
                } else {
                    (Complex64::from_polar(1.0, y * t) - 1.0) / (I * y)
                };
                self.vectors[(2, j)] * a[j] * w
            })
            .sum()
    }

    /// The time-independent part of `G`, carried by a zero frequency.
    pub fn secular_g(&self, x0: ModeCoefficients) -> Complex64 {
        let a = self.amplitudes(x0);
        (0..3)
            .filter(|&j| self.frequencies[j] == 0.0)
            .map(|j| self.vectors[(2, j)] * a[j])
            .sum()
    }
}

/// Exact evolution of one eigenpair's coefficients to time `t`.
pub fn mode_evolution(
    x0: ModeCoefficients,
    lambda: f64,
    n: i32,
    omega: f64,
    c: f64,
    t: f64,
) -> Result<ModeCoefficients> {
    Ok(ModeSystem::new(lambda, n, omega, c)?.evolve(x0, t))
}

/// The same evolution by RK4 with `steps` steps.
pub fn mode_evolution_rk4(
    x0: ModeCoefficients,
    lambda: f64,
    n: i32,
    omega: f64,
    c: f64,
    t: f64,
    steps: usize,
) -> ModeCoefficients {
    let a = mode_matrix(lambda, n, omega, c);
    let h = Complex64::new(t / steps.max(1) as f64, 0.0);
    let two = Complex64::new(2.0, 0.0);
    let mut x = x0.to_vector();
    for _ in 0..steps.max(1) {
        let k1 = a * x;
        let k2 = a * (x + k1 * (h * 0.5));
        let k3 = a * (x + k2 * (h * 0.5));
        let k4 = a * (x + k3 * h);
        x += (k1 + k2 * two + k3 * two + k4) * (h / 6.0);
    }
    ModeCoefficients::from_vector(x)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModeRecord {
    pub n: i32,
    pub k: usize,
    pub lambda: f64,
    pub frequencies: [f64; 3],
    /// `|F̂₀| + |Ĝ₀|` for this eigenpair.
    pub amplitude: f64,
    /// `|G|` carried by a zero frequency.
    pub secular: f64,
}

/// Projection of an initial perturbation onto the eigenpairs, ready for
/// evaluation at any time.
#[derive(Clone, Debug)]
pub struct DiscReconstruction {
    grid: DiscGrid,
    omega: f64,
    modes: Vec<AzimuthalModes>,
}

/// `(n, eigenvectors, systems, initial coefficients)` of one azimuthal mode.
type AzimuthalModes = (i32, Vec<Vec<f64>>, Vec<ModeSystem>, Vec<ModeCoefficients>);

#[derive(Clone, Debug, Serialize)]
pub struct DiscClassification {
    pub class: Boundedness,
    /// `sup_r |∫ curl(ρv₀) dθ|` relative to `sup |curl(ρv₀)|`.
    pub mean_curl: f64,
    /// `‖secular part of G‖₂`, the growth rate of `‖curl(ρj)‖₂`.
    pub secular_rate: f64,
    /// Whether the reconstruction carries a zero-frequency `G` component.
    pub growth_detected: bool,
    /// Smallest `|y|` over modes with `n ≠ 0`.
    pub min_frequency_nonzero_n: f64,
    pub boundary_residual: f64,
    /// Relative `L²` content of `F₀`, `G₀` not captured by the retained modes.
    pub truncation: f64,
    #[serde(skip)]
    pub modes: Vec<ModeRecord>,
}

/// Relative threshold on `mean_curl` and `secular_rate`.
pub const CURL_TOLERANCE: f64 = 1e-8;

fn ring_modes(grid: &DiscGrid, values: &[f64]) -> Vec<Vec<Complex64>> {
    let nt = grid.ntheta();
    (0..grid.nr())
        .map(|i| {
            let mut row = spectral::forward(&values[i * nt..(i + 1) * nt]);
            row.iter_mut().for_each(|c| *c /= nt as f64);
            row
        })
        .collect()
}

fn mode_index(n: i32, nt: usize) -> usize {
    if n >= 0 {
        n as usize
    } else {
        (nt as i32 + n) as usize
    }
}

/// Projects `ρv₀` onto the eigenpairs with `|n| ≤ n_max`, `k ≤ k_max` and
/// classifies the Jacobi field as bounded or linearly growing.
pub fn synthesize_and_classify(
    v0: &VectorField<DiscGrid>,
    bg: &DiscBackground,
    k_max: usize,
    n_max: u32,
) -> Result<(DiscClassification, DiscReconstruction)> {
    let grid = v0.grid();
    let state = rigid_rotation_disc(grid, bg.omega, bg.c, bg.rho0)?;
    let m = v0.weighted(&state.rho)?;
    let f0 = grid.div(m.comps());
    let g0: Vec<f64> = grid
        .curl(m.comps())
        .expect("disc curl")
        .into_iter()
        .map(|x| -x)
        .collect();

    let nt = grid.ntheta();
    let nr = grid.nr();
    let sup = f0.iter().chain(&g0).fold(0.0f64, |a, x| a.max(x.abs()));
    let boundary = (0..nt)
        .map(|j| {
            f0[grid.index(nr - 1, j)]
                .abs()
                .max(g0[grid.index(nr - 1, j)].abs())
        })
        .fold(0.0f64, f64::max);
    let boundary_residual = if sup > 0.0 { boundary / sup } else { 0.0 };
    if boundary_residual > PROJECTION_TOLERANCE {
        return Err(Error::ProjectionResidual {
            residual: boundary_residual,
            tolerance: PROJECTION_TOLERANCE,
        });
    }

    let mean_curl = (0..nr)
        .map(|i| (0..nt).map(|j| g0[grid.index(i, j)]).sum::<f64>().abs() / nt as f64)
        .fold(0.0f64, f64::max);
    let mean_curl = if sup > 0.0 { mean_curl / sup } else { 0.0 };

    let fr = ring_modes(&grid, &f0);
    let gr = ring_modes(&grid, &g0);
    let n_top = (n_max as i32).min(nt as i32 / 2 - 1);
    let mut modes = Vec::new();
    let mut records = Vec::new();
    let (mut total, mut captured) = (0.0, 0.0);
    let mut secular2 = 0.0;
    let mut min_freq = f64::INFINITY;
    for n in -n_top..=n_top {
        let op = RadialOperator::new(bg, n, nr)?;
        let idx = mode_index(n, nt);
        let fp: Vec<Complex64> = (0..nr - 1).map(|i| fr[i][idx]).collect();
        let gp: Vec<Complex64> = (0..nr - 1).map(|i| gr[i][idx]).collect();
        let energy: f64 = fp
            .iter()
            .zip(&gp)
            .zip(&op.weights)
            .map(|((a, b), w)| (a.norm_sqr() + b.norm_sqr()) * w)
            .sum();
        total += energy;
        if energy == 0.0 {
            continue;
        }
        let (values, vectors) = op.spectrum();
        let mut zetas = Vec::new();
        let mut systems = Vec::new();
        let mut coeffs = Vec::new();
        for (k, (lambda, zeta)) in values.into_iter().zip(vectors).take(k_max).enumerate() {
            let x0 = ModeCoefficients {
                sigma: ZERO,
                f: op.project(&zeta, &fp),
                g: op.project(&zeta, &gp),
            };
            captured += x0.f.norm_sqr() + x0.g.norm_sqr();
            let sys = ModeSystem::new(lambda, n, bg.omega, bg.c)?;
            let secular = sys.secular_g(x0).norm();
            secular2 += secular * secular;
            if n != 0 {
                min_freq = sys.frequencies.iter().fold(min_freq, |m, y| m.min(y.abs()));
            }
            records.push(ModeRecord {
                n,
                k: k + 1,
                lambda,
                frequencies: sys.frequencies,
                amplitude: x0.f.norm() + x0.g.norm(),
                secular,
            });
            zetas.push(zeta);
            systems.push(sys);
            coeffs.push(x0);
        }
        modes.push((n, zetas, systems, coeffs));
    }
    let truncation = if total > 0.0 {
        ((total - captured).max(0.0) / total).sqrt()
    } else {
        0.0
    };
    // ∫|·|² dμ = 2π Σ_n ∫|·_n|² r dr
    let secular_rate = (2.0 * PI * secular2).sqrt();
    let l2_scale = (2.0 * PI * total).sqrt();
    let growth_detected = secular_rate > CURL_TOLERANCE * l2_scale.max(f64::MIN_POSITIVE);
    let class = if mean_curl > CURL_TOLERANCE {
        Boundedness::LinearGrowth
    } else {
        Boundedness::Bounded
    };
    let report = DiscClassification {
        class,
        mean_curl,
        secular_rate,
        growth_detected,
        min_frequency_nonzero_n: min_freq,
        boundary_residual,
        truncation,
        modes: records,
    };
    Ok((
        report,
        DiscReconstruction {
            grid,
            omega: bg.omega,
            modes,
        },
    ))
}

impl DiscReconstruction {
    pub fn grid(&self) -> DiscGrid {
        self.grid
    }

    /// Lab-frame radial profiles of `σ` and `C = curl(ρj)` for mode `n` at
    /// the interior nodes, or `None` if the mode was not retained.
    pub fn mode_profiles(&self, n: i32, t: f64) -> Option<(Vec<Complex64>, Vec<Complex64>)> {
        let (_, zetas, systems, coeffs) = self.modes.iter().find(|m| m.0 == n)?;
        let size = self.grid.nr() - 1;
        let mut sigma = vec![ZERO; size];
        let mut curl = vec![ZERO; size];
        let rot = Complex64::from_polar(1.0, -(n as f64) * self.omega * t);
        for ((zeta, sys), x0) in zetas.iter().zip(systems).zip(coeffs) {
            let s = sys.evolve(*x0, t).sigma * rot;
            let cr = -sys.integrated_g(*x0, t) * rot;
            for i in 0..size {
                sigma[i] += s * zeta[i];
                curl[i] += cr * zeta[i];
            }
        }
        Some((sigma, curl))
    }

    /// `σ(t)` and `curl(ρj)(t)` on the grid, boundary ring included.
    pub fn fields(&self, t: f64) -> (ScalarField<DiscGrid>, ScalarField<DiscGrid>) {
        let g = self.grid;
        let (nr, nt) = (g.nr(), g.ntheta());
        let mut s = vec![vec![ZERO; nt]; nr];
        let mut c = vec![vec![ZERO; nt]; nr];
        for (n, ..) in &self.modes {
            let (sp, cp) = self.mode_profiles(*n, t).expect("retained mode");
            let idx = mode_index(*n, nt);
            for i in 0..nr - 1 {
                s[i][idx] = sp[i];
                c[i][idx] = cp[i];
            }
        }
        let assemble = |rows: Vec<Vec<Complex64>>| -> Vec<f64> {
            rows.into_iter()
                .flat_map(|mut row| {
                    row.iter_mut().for_each(|x| *x *= nt as f64);
                    spectral::inverse_real(row)
                })
                .collect()
        };
        (
            ScalarField::from_raw(g, assemble(s)),
            ScalarField::from_raw(g, assemble(c)),
        )
    }

    /// `(t, ‖curl(ρj)(t)‖₂)` at the given times.
    pub fn curl_series(&self, times: &[f64]) -> Vec<(f64, f64)> {
        times
            .iter()
            .map(|&t| (t, self.fields(t).1.l2_norm()))
            .collect()
    }
}

/// Least-squares growth rate of `‖curl(ρj)‖₂` over `times`.
pub fn curl_growth_rate(rec: &DiscReconstruction, times: &[f64]) -> f64 {
    slope(&rec.curl_series(times))
}

#[derive(Clone, Debug, Serialize)]
pub struct DiscCrosscheck {
    pub t: f64,
    pub steps: usize,
    /// `‖Δσ‖₂ / ‖σ‖₂` aggregated over modes.
    pub sigma_gap: f64,
    /// `‖ΔC‖₂ / ‖C‖₂` for `C = curl(ρj)`.
    pub curl_gap: f64,
}

/// Integrates `(σ, F, G, curl(ρj))` mode by mode in the lab frame by RK4 on
/// the discrete radial operator and compares with the reconstruction.
pub fn disc_crosscheck(
    v0: &VectorField<DiscGrid>,
    bg: &DiscBackground,
    n_max: u32,
    t: f64,
) -> Result<DiscCrosscheck> {
    let grid = v0.grid();
    let nr = grid.nr();
    let (_, rec) = synthesize_and_classify(v0, bg, nr - 1, n_max)?;
    let state = rigid_rotation_disc(grid, bg.omega, bg.c, bg.rho0)?;
    let m = v0.weighted(&state.rho)?;
    let f0 = ring_modes(&grid, &grid.div(m.comps()));
    let g0: Vec<f64> = grid
        .curl(m.comps())
        .expect("disc curl")
        .into_iter()
        .map(|x| -x)
        .collect();
    let g0 = ring_modes(&grid, &g0);
    let (w, c) = (bg.omega, bg.c);
    let (mut ds, mut ns, mut dc, mut nc) = (0.0, 0.0, 0.0, 0.0);
    let mut steps_max = 0;
    for (n, ..) in &rec.modes {
        let n = *n;
        let op = RadialOperator::new(bg, n, nr)?;
        let size = op.len();
        let idx = mode_index(n, grid.ntheta());
        let lam_max = op.spectrum().0.last().copied().unwrap_or(0.0);
        let rate = c * lam_max.sqrt() + (n as f64 * w).abs() * (1.0 + w.abs()) + 2.0 * w.abs();
        let steps = ((t * rate / 0.5).ceil() as usize).max(1);
        steps_max = steps_max.max(steps);
        let h = t / steps as f64;
        let adv = -I * (n as f64 * w);
        let rhs = |y: &[Vec<Complex64>; 4]| -> [Vec<Complex64>; 4] {
            let [s, f, g, cc] = y;
            let ks = op.apply(s);
            [
                (0..size).map(|i| adv * s[i] - f[i]).collect(),
                (0..size)
                    .map(|i| adv * f[i] + ks[i] * (c * c) - g[i] * (2.0 * w))
                    .collect(),
                (0..size)
                    .map(|i| adv * g[i] + f[i] * (2.0 * w) + I * (n as f64 * w * w) * s[i])
                    .collect(),
                (0..size).map(|i| adv * cc[i] - g[i]).collect(),
            ]
        };
        let axpy =
            |y: &[Vec<Complex64>; 4], k: &[Vec<Complex64>; 4], a: f64| -> [Vec<Complex64>; 4] {
                std::array::from_fn(|b| y[b].iter().zip(&k[b]).map(|(p, q)| p + q * a).collect())
            };
        let mut y: [Vec<Complex64>; 4] = [
            vec![ZERO; size],
            (0..size).map(|i| f0[i][idx]).collect(),
            (0..size).map(|i| g0[i][idx]).collect(),
            vec![ZERO; size],
        ];
        for _ in 0..steps {
            let k1 = rhs(&y);
            let k2 = rhs(&axpy(&y, &k1, 0.5 * h));
            let k3 = rhs(&axpy(&y, &k2, 0.5 * h));
            let k4 = rhs(&axpy(&y, &k3, h));
            for b in 0..4 {
                for i in 0..size {
                    y[b][i] += (k1[b][i] + k2[b][i] * 2.0 + k3[b][i] * 2.0 + k4[b][i]) * (h / 6.0);
                }
            }
        }
        let (sp, cp) = rec.mode_profiles(n, t).expect("retained mode");
        for i in 0..size {
            let wgt = op.weights[i];
            ds += (y[0][i] - sp[i]).norm_sqr() * wgt;
            ns += sp[i].norm_sqr() * wgt;
            dc += (y[3][i] - cp[i]).norm_sqr() * wgt;
            nc += cp[i].norm_sqr() * wgt;
        }
    }
    let rel = |d: f64, n: f64| {
        if n > 0.0 {
            (d / n).sqrt()
        } else if d > 0.0 {
            f64::INFINITY
        } else {
            0.0
        }
    };
    Ok(DiscCrosscheck {
        t,
        steps: steps_max,
        sigma_gap: rel(ds, ns),
        curl_gap: rel(dc, nc),
    })
}

/// Curvature of the plane spanned by `U = (∂_θ, ρ/λ)` and `V = (k∂_θ, ρ/λ)`
/// at `ρ = r²/(2c²)`, `λ = 1/c²`.
#[derive(Clone, Debug, Serialize)]
pub struct DiscCurvatureReport {
    pub k: f64,
    pub c: f64,
    pub full: CurvatureReport,
    /// `(c²/2) ∫ ρ² Q(z, z)` with `z = (k − 1)∂_θ`.
    pub reduced: f64,
    pub relative_gap: f64,
    /// `−π(k−1)²/(12c²)`.
    pub closed_form: f64,
    pub closed_form_gap: f64,
    /// `−π(k−1)²/(48c²)`, the alternative constant.
    pub alternative: f64,
    /// `full.total / alternative`.
    pub alternative_ratio: f64,
}

pub fn disc_curvature_adjudication(grid: DiscGrid, k: f64, c: f64) -> Result<DiscCurvatureReport> {
    if !(c > 0.0) {
        return Err(Error::Invalid(format!(
            "sound speed must be positive, got {c}"
        )));
    }
    let c2 = c * c;
    let model = PressureModel::catalog(Catalog::Constant(1.0 / c2))?;
    let rho = ScalarField::from_fn(grid, |p| p[0] * p[0] / (2.0 * c2));
    let f = rho.scale(c2);
    let rotation = |s: f64| VectorField::from_fn(grid, move |_| vec![0.0, s]);
    let a = TangentVector::new(rotation(1.0), f.clone())?;
    let b = TangentVector::new(rotation(k), f)?;
    let full = sectional_curvature(&a, &b, &rho, &model)?;
    let z = rotation(k - 1.0);
    let q = q_operator(&z, &z)?;
    let integrand: Vec<f64> = rho
        .values()
        .iter()
        .zip(q.values())
        .map(|(r, q)| r * r * q)
        .collect();
    let reduced = 0.5 * c2 * grid.integrate(&integrand);
    let rel = |x: f64, y: f64| {
        let s = x.abs().max(y.abs());
        if s > 0.0 {
            (x - y).abs() / s
        } else {
            0.0
        }
    };
    let closed_form = -PI * (k - 1.0).powi(2) / (12.0 * c2);
    let alternative = closed_form / 4.0;
    Ok(DiscCurvatureReport {
        k,
        c,
        relative_gap: rel(full.total, reduced),
        closed_form_gap: rel(full.total, closed_form),
        alternative_ratio: if alternative != 0.0 {
            full.total / alternative
        } else {
            f64::NAN
        },
        full,
        reduced,
        closed_form,
        alternative,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> DiscBackground {
        DiscBackground::new(1.0, 1.0, 1.0).unwrap()
    }

    fn bessel_integral(n: u32, x: f64) -> f64 {
        let m = 512;
        (0..m)
            .map(|i| {
                let tau = 2.0 * PI * i as f64 / m as f64;
                (n as f64 * tau - x * tau.sin()).cos()
            })
            .sum::<f64>()
            / m as f64
    }

    #[test]
    fn background_profile() {
        let bg = unit();
        assert!((bg.rho(0.0) - 0.5).abs() < 1e-15 && (bg.rho(1.0) - 1.0).abs() < 1e-15);
        assert!(matches!(
            DiscBackground::new(1.0, 1.0, 0.5),
            Err(Error::Vacuum { .. })
        ));
    }

    #[test]
    fn series_matches_integral() {
        for n in [0u32, 1, 5, 20, 64] {
            for x in [0.5, 3.0, 17.0, n as f64 + 7.3] {
                let (a, b) = (bessel_j(n, x), bessel_integral(n, x));
                assert!((a - b).abs() < 1e-12, "n={n} x={x}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn first_roots() {
        assert!((bessel_first_root(0).unwrap() - 2.404826).abs() < 1e-6);
        assert!((bessel_first_root(1).unwrap() - 3.831706).abs() < 1e-6);
        let mut prev = 0.0;
        for n in 0..=20 {
            let c = bessel_first_root(n).unwrap();
            assert!(c > prev);
            assert!(bessel_integral(n, c).abs() < 1e-12);
            prev = c;
        }
        let c64 = bessel_first_root(64).unwrap();
        assert!(bessel_integral(64, c64).abs() < 1e-12 && c64 > 64.0);
        assert!(bessel_first_root(65).is_err());
    }

    #[test]
    fn cubic_roots() {
        let [a, b, c] = characteristic_roots(2.0, 0, 1.0, 1.0).unwrap();
        let p: f64 = (2.0 + 4.0) / 3.0;
        assert!((a - (3.0 * p).sqrt()).abs() < 1e-14 && b == 0.0 && (c + a).abs() < 1e-14);
        let r = characteristic_roots(3.0, 4, 0.0, 2.0).unwrap();
        assert!((r[0] - 2.0 * 3f64.sqrt()).abs() < 1e-12 && r[1].abs() < 1e-12);
        let (lam, n, w, c) = (7.5, 3, 0.8, 1.1);
        let (p, q) = cubic_coefficients(lam, n, w, c);
        let y = characteristic_roots(lam, n, w, c).unwrap();
        assert!((y[0] + y[1] + y[2]).abs() < 1e-12);
        assert!((y[0] * y[1] + y[0] * y[2] + y[1] * y[2] + 3.0 * p).abs() < 1e-12);
        assert!((y[0] * y[1] * y[2] - 2.0 * q).abs() < 1e-12);
        assert!(matches!(
            characteristic_roots(0.01, 40, 1.0, 1.0),
            Err(Error::NotHyperbolic { .. })
        ));
    }

    #[test]
    fn constant_density_eigenvalue() {
        let bg = DiscBackground::new(0.0, 1.0, 1.3).unwrap();
        let e = sturm_liouville_eigs(&bg, 0, 3, 400).unwrap();
        let c0 = bessel_first_root(0).unwrap();
        assert!((e[0].lambda / (1.3 * c0 * c0) - 1.0).abs() < 1e-3);
        assert!(e.windows(2).all(|w| w[0].lambda < w[1].lambda));
        let norm: f64 = e[0]
            .zeta
            .iter()
            .zip(&e[0].radii)
            .map(|(z, r)| z * z * r / 400.0)
            .sum();
        assert!((norm - 1.0).abs() < 1e-12 && *e[0].zeta.last().unwrap() == 0.0);
        assert!(sturm_liouville_eigs(&bg, 0, 1, 100).is_err());
    }

    #[test]
    fn refinement() {
        let bg = unit();
        for n in [0, 1, 5] {
            let a = sturm_liouville_eigs(&bg, n, 1, 400).unwrap()[0].lambda;
            let b = sturm_liouville_eigs(&bg, n, 1, 800).unwrap()[0].lambda;
            assert!(((a - b) / b).abs() < 1e-4, "n={n}: {a} {b}");
        }
    }

    #[test]
    fn exact_evolution_matches_rk4() {
        let x0 = ModeCoefficients {
            sigma: Complex64::new(0.3, -0.1),
            f: Complex64::new(1.0, 0.2),
            g: Complex64::new(-0.4, 0.5),
        };
        for n in [0, 2, -3] {
            let a = mode_evolution(x0, 12.0, n, 1.0, 1.0, 10.0).unwrap();
            let b = mode_evolution_rk4(x0, 12.0, n, 1.0, 1.0, 10.0, 20000);
            let gap = ModeCoefficients {
                sigma: a.sigma - b.sigma,
                f: a.f - b.f,
                g: a.g - b.g,
            }
            .norm();
            assert!(gap < 1e-8, "n={n}: {gap}");
        }
        let z = mode_evolution(ModeCoefficients::ZERO, 12.0, 1, 1.0, 1.0, 3.0).unwrap();
        assert_eq!(z.norm(), 0.0);
    }

    #[test]
    fn n_zero_secular_part() {
        let sys = ModeSystem::new(6.0, 0, 1.0, 1.0).unwrap();
        let x0 = ModeCoefficients {
            sigma: ZERO,
            f: ZERO,
            g: Complex64::new(1.0, 0.0),
        };
        // 2ωσ + G is conserved; its zero-frequency share of G is c²λ/(4ω² + c²λ).
        assert!((sys.secular_g(x0).re - 0.6).abs() < 1e-12);
        let x1 = ModeCoefficients {
            sigma: ZERO,
            f: Complex64::new(1.0, 0.0),
            g: ZERO,
        };
        assert!(sys.secular_g(x1).norm() < 1e-14);
    }

    fn disc() -> DiscGrid {
        DiscGrid::new(200, 16).unwrap()
    }

    fn gradient_v0(grid: DiscGrid, bg: &DiscBackground) -> VectorField<DiscGrid> {
        VectorField::from_fn(grid, |p| {
            let (r, th) = (p[0], p[1]);
            let s = 1.0 - r * r;
            let fr = -6.0 * r * s * s + (9.0 * r * r - 5.0 * r.powi(4)) * th.cos();
            let ft = -(3.0 * r.powi(3) - r.powi(5)) * th.sin();
            vec![fr / bg.rho(r), ft / (r * r * bg.rho(r))]
        })
    }

    fn rotational_v0(grid: DiscGrid, bg: &DiscBackground) -> VectorField<DiscGrid> {
        VectorField::from_fn(grid, |p| {
            let r = p[0];
            let gr = -6.0 * r * (1.0 - r * r).powi(2);
            vec![0.0, gr / (r * bg.rho(r))]
        })
    }

    #[test]
    fn gradient_is_bounded() {
        let bg = unit();
        let g = disc();
        let (cls, rec) = synthesize_and_classify(&gradient_v0(g, &bg), &bg, 12, 4).unwrap();
        assert_eq!(cls.class, Boundedness::Bounded);
        assert!(!cls.growth_detected && cls.min_frequency_nonzero_n > 0.0);
        let times: Vec<f64> = (0..=10).map(|i| 10.0 * i as f64).collect();
        let series = rec.curl_series(&times);
        let peak = series.iter().map(|s| s.1).fold(0.0, f64::max);
        assert!(series.last().unwrap().1 <= peak && peak.is_finite());
    }

    #[test]
    fn rotation_grows() {
        let bg = unit();
        let g = disc();
        let (cls, rec) = synthesize_and_classify(&rotational_v0(g, &bg), &bg, 12, 4).unwrap();
        assert_eq!(cls.class, Boundedness::LinearGrowth);
        assert!(cls.growth_detected);
        let times: Vec<f64> = (5..=10).map(|i| 10.0 * i as f64).collect();
        let rate = curl_growth_rate(&rec, &times);
        assert!(
            (rate / cls.secular_rate - 1.0).abs() < 0.05,
            "{rate} vs {}",
            cls.secular_rate
        );
    }

    #[test]
    fn boundary_incompatible_rejected() {
        let bg = unit();
        let g = disc();
        let v0 = VectorField::from_fn(g, |p| vec![0.0, -2.0 / bg.rho(p[0])]);
        assert!(matches!(
            synthesize_and_classify(&v0, &bg, 12, 4),
            Err(Error::ProjectionResidual { .. })
        ));
    }

    #[test]
    fn reconstruction_matches_direct_integration() {
        let bg = unit();
        let g = disc();
        let v0 = gradient_v0(g, &bg).add(&rotational_v0(g, &bg)).unwrap();
        let chk = disc_crosscheck(&v0, &bg, 2, 1.0).unwrap();
        assert!(chk.sigma_gap < 1e-3 && chk.curl_gap < 1e-3, "{chk:?}");
    }

    #[test]
    fn curvature_adjudication() {
        let rep = disc_curvature_adjudication(DiscGrid::new(64, 16).unwrap(), 3.0, 1.3).unwrap();
        assert!(rep.relative_gap < 1e-8, "{rep:?}");
        assert!(rep.closed_form_gap < 1e-6);
        assert!((rep.alternative_ratio - 4.0).abs() < 1e-5);
    }
}
