use std::f64::consts::PI;
use std::fmt;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::spectral::{self, TrigPoly};
use crate::error::{Error, Result};

/// A discretized base manifold together with its differential operators.
///
/// Vector fields are stored as one value array per coordinate component.
/// On the circle and torus the components are Cartesian; on the disc they are
/// the polar coordinate components `(u^r, u^θ)` with respect to `∂_r, ∂_θ`.
pub trait Grid: Copy + PartialEq + fmt::Debug + Send + Sync + 'static {
    /// Number of nodes.
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of vector components.
    fn dim(&self) -> usize;

    /// Coordinate column names for CSV output.
    fn coordinate_names(&self) -> &'static [&'static str];

    fn coordinates(&self, node: usize) -> Vec<f64>;

    /// Quadrature of a nodal function against the Riemannian volume.
    fn integrate(&self, values: &[f64]) -> f64;

    /// Coordinate partial derivative along `axis`.
    fn partial(&self, axis: usize, values: &[f64]) -> Vec<f64>;

    fn grad(&self, f: &[f64]) -> Vec<Vec<f64>>;

    fn div(&self, u: &[Vec<f64>]) -> Vec<f64>;

    /// Scalar vorticity; `None` where it is not defined (the circle).
    fn curl(&self, u: &[Vec<f64>]) -> Option<Vec<f64>>;

    /// Pointwise Riemannian inner product of two vector fields.
    fn dot(&self, u: &[Vec<f64>], v: &[Vec<f64>]) -> Vec<f64>;

    /// The derivative `u(f) = Σ u^i ∂_i f`.
    fn directional(&self, u: &[Vec<f64>], f: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.len()];
        for (axis, comp) in u.iter().enumerate() {
            let df = self.partial(axis, f);
            for ((o, a), d) in out.iter_mut().zip(comp).zip(&df) {
                *o += a * d;
            }
        }
        out
    }

    /// Levi-Civita covariant derivative `∇_u v` of the base metric.
    fn covariant(&self, u: &[Vec<f64>], v: &[Vec<f64>]) -> Vec<Vec<f64>> {
        v.iter().map(|comp| self.directional(u, comp)).collect()
    }

    /// Smallest node spacing, used for step-size bounds.
    fn min_spacing(&self) -> f64;
}

/// Grids without boundary, on which flow maps can be carried by interpolation.
pub trait PeriodicGrid: Grid {
    /// Node positions, one array per coordinate.
    fn reference_positions(&self) -> Vec<Vec<f64>>;

    /// Evaluates the trigonometric interpolant of `values` at arbitrary points.
    fn interpolate(&self, values: &[f64], points: &[Vec<f64>]) -> Vec<f64>;

    /// Jacobian determinant of a map given by lifted node positions.
    fn jacobian(&self, positions: &[Vec<f64>]) -> Vec<f64>;
}

/// Equispaced points `x_i = 2πi/n` on the circle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircleGrid {
    n: usize,
}

impl CircleGrid {
    pub fn new(n: usize) -> Result<Self> {
        if n < 8 || !n.is_multiple_of(2) {
            return Err(Error::Invalid(format!(
                "circle grid needs an even count >= 8, got {n}"
            )));
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.n as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        i as f64 * self.spacing()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.point(i)).collect()
    }
}

impl Grid for CircleGrid {
    fn len(&self) -> usize {
        self.n
    }

    fn dim(&self) -> usize {
        1
    }

    fn coordinate_names(&self) -> &'static [&'static str] {
        &["x"]
    }

    fn coordinates(&self, node: usize) -> Vec<f64> {
        vec![self.point(node)]
    }

    fn integrate(&self, values: &[f64]) -> f64 {
        values.iter().sum::<f64>() * self.spacing()
    }

    fn partial(&self, axis: usize, values: &[f64]) -> Vec<f64> {
        debug_assert_eq!(axis, 0);
        spectral::spectral_derivative(values)
    }

    fn grad(&self, f: &[f64]) -> Vec<Vec<f64>> {
        vec![self.partial(0, f)]
    }

    fn div(&self, u: &[Vec<f64>]) -> Vec<f64> {
        self.partial(0, &u[0])
    }

    fn curl(&self, _u: &[Vec<f64>]) -> Option<Vec<f64>> {
        None
    }

    fn dot(&self, u: &[Vec<f64>], v: &[Vec<f64>]) -> Vec<f64> {
        u[0].iter().zip(&v[0]).map(|(a, b)| a * b).collect()
    }

    fn min_spacing(&self) -> f64 {
        self.spacing()
    }
}

impl PeriodicGrid for CircleGrid {
    fn reference_positions(&self) -> Vec<Vec<f64>> {
        vec![self.points()]
    }

    fn interpolate(&self, values: &[f64], points: &[Vec<f64>]) -> Vec<f64> {
        let poly = TrigPoly::from_samples(values);
        points[0].iter().map(|&x| poly.eval(x)).collect()
    }

    fn jacobian(&self, positions: &[Vec<f64>]) -> Vec<f64> {
        let periodic: Vec<f64> = positions[0]
            .iter()
            .enumerate()
            .map(|(i, &e)| e - self.point(i))
            .collect();
        spectral::spectral_derivative(&periodic)
            .into_iter()
            .map(|d| 1.0 + d)
            .collect()
    }
}

/// The flat torus `[0, 2π)²`; node `(i, j)` is stored at `i * ny + j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusGrid {
    nx: usize,
    ny: usize,
}

impl TorusGrid {
    pub fn new(nx: usize, ny: usize) -> Result<Self> {
        for n in [nx, ny] {
            if n < 8 || n % 2 != 0 {
                return Err(Error::Invalid(format!(
                    "torus grid needs even counts >= 8, got {nx} x {ny}"
                )));
            }
        }
        Ok(Self { nx, ny })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.ny + j
    }

    pub fn x(&self, i: usize) -> f64 {
        2.0 * PI * i as f64 / self.nx as f64
    }

    pub fn y(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.ny as f64
    }

    /// 2D DFT in the storage layout.
    pub(crate) fn fft2(&self, values: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.transform(&mut buf, false);
        buf
    }

    /// Inverse 2D DFT (normalized), returning real parts.
    pub(crate) fn ifft2_real(&self, mut spec: Vec<Complex64>) -> Vec<f64> {
        self.transform(&mut spec, true);
        spec.into_iter().map(|c| c.re).collect()
    }

    fn transform(&self, buf: &mut [Complex64], inverse: bool) {
        let (nx, ny) = (self.nx, self.ny);
        for row in buf.chunks_mut(ny) {
            if inverse {
                spectral::inverse_in_place(row);
            } else {
                spectral::forward_in_place(row);
            }
        }
        let mut column = vec![Complex64::new(0.0, 0.0); nx];
        for j in 0..ny {
            for i in 0..nx {
                column[i] = buf[i * ny + j];
            }
            if inverse {
                spectral::inverse_in_place(&mut column);
            } else {
                spectral::forward_in_place(&mut column);
            }
            for i in 0..nx {
                buf[i * ny + j] = column[i];
            }
        }
    }

    /// Differentiation wavenumbers `(k_x, k_y)` of spectral index `(i, j)`.
    pub(crate) fn wavenumbers(&self, i: usize, j: usize) -> (f64, f64) {
        (
            spectral::derivative_wavenumber(i, self.nx),
            spectral::derivative_wavenumber(j, self.ny),
        )
    }
}

impl Grid for TorusGrid {
    fn len(&self) -> usize {
        self.nx * self.ny
    }

    fn dim(&self) -> usize {
        2
    }

    fn coordinate_names(&self) -> &'static [&'static str] {
        &["x", "y"]
    }

    fn coordinates(&self, node: usize) -> Vec<f64> {
        vec![self.x(node / self.ny), self.y(node % self.ny)]
    }

    fn integrate(&self, values: &[f64]) -> f64 {
        let cell = (2.0 * PI / self.nx as f64) * (2.0 * PI / self.ny as f64);
        values.iter().sum::<f64>() * cell
    }

    fn partial(&self, axis: usize, values: &[f64]) -> Vec<f64> {
        let (nx, ny) = (self.nx, self.ny);
        let mut out = vec![0.0; values.len()];
        match axis {
            0 => {
                let mut column = vec![0.0; nx];
                for j in 0..ny {
                    for i in 0..nx {
                        column[i] = values[i * ny + j];
                    }
                    let d = spectral::spectral_derivative(&column);
                    for i in 0..nx {
                        out[i * ny + j] = d[i];
                    }
                }
            }
            1 => {
                for (row_in, row_out) in values.chunks(ny).zip(out.chunks_mut(ny)) {
                    row_out.copy_from_slice(&spectral::spectral_derivative(row_in));
                }
            }
            _ => panic!("torus has two axes"),
        }
        out
    }

    fn grad(&self, f: &[f64]) -> Vec<Vec<f64>> {
        vec![self.partial(0, f), self.partial(1, f)]
    }

    fn div(&self, u: &[Vec<f64>]) -> Vec<f64> {
        let dx = self.partial(0, &u[0]);
        let dy = self.partial(1, &u[1]);
        dx.iter().zip(&dy).map(|(a, b)| a + b).collect()
    }

    fn curl(&self, u: &[Vec<f64>]) -> Option<Vec<f64>> {
        let dvy = self.partial(0, &u[1]);
        let dux = self.partial(1, &u[0]);
        Some(dvy.iter().zip(&dux).map(|(a, b)| a - b).collect())
    }

    fn dot(&self, u: &[Vec<f64>], v: &[Vec<f64>]) -> Vec<f64> {
        (0..self.len())
            .map(|k| u[0][k] * v[0][k] + u[1][k] * v[1][k])
            .collect()
    }

    fn min_spacing(&self) -> f64 {
        2.0 * PI / self.nx.max(self.ny) as f64
    }
}

impl PeriodicGrid for TorusGrid {
    fn reference_positions(&self) -> Vec<Vec<f64>> {
        let xs = (0..self.len()).map(|k| self.x(k / self.ny)).collect();
        let ys = (0..self.len()).map(|k| self.y(k % self.ny)).collect();
        vec![xs, ys]
    }

    fn interpolate(&self, values: &[f64], points: &[Vec<f64>]) -> Vec<f64> {
        let (nx, ny) = (self.nx, self.ny);
        let spec = self.fft2(values);
        let norm = 1.0 / (nx * ny) as f64;
        // Modes -n/2..=n/2 with the Nyquist coefficient split evenly between ±n/2.
        let modes = |n: usize| -> Vec<(i64, usize, f64)> {
            let half = (n / 2) as i64;
            (-half..=half)
                .map(|k| {
                    let idx = k.rem_euclid(n as i64) as usize;
                    let w = if k.abs() == half { 0.5 } else { 1.0 };
                    (k, idx, w)
                })
                .collect()
        };
        let mx = modes(nx);
        let my = modes(ny);
        let npts = points[0].len();
        let mut out = Vec::with_capacity(npts);
        let mut ey = vec![Complex64::new(0.0, 0.0); my.len()];
        for (&x, &y) in points[0].iter().zip(&points[1]) {
            for (slot, &(k, _, w)) in ey.iter_mut().zip(&my) {
                *slot = Complex64::from_polar(w, k as f64 * y);
            }
            let mut acc = Complex64::new(0.0, 0.0);
            for &(kx, ix, wx) in &mx {
                let mut inner = Complex64::new(0.0, 0.0);
                for (&(_, iy, _), e) in my.iter().zip(&ey) {
                    inner += spec[ix * ny + iy] * e;
                }
                acc += inner * Complex64::from_polar(wx, kx as f64 * x);
            }
            out.push(acc.re * norm);
        }
        out
    }

    fn jacobian(&self, positions: &[Vec<f64>]) -> Vec<f64> {
        let reference = self.reference_positions();
        let px: Vec<f64> = positions[0]
            .iter()
            .zip(&reference[0])
            .map(|(e, x)| e - x)
            .collect();
        let py: Vec<f64> = positions[1]
            .iter()
            .zip(&reference[1])
            .map(|(e, y)| e - y)
            .collect();
        let (a, b) = (self.partial(0, &px), self.partial(1, &px));
        let (c, d) = (self.partial(0, &py), self.partial(1, &py));
        (0..self.len())
            .map(|k| (1.0 + a[k]) * (1.0 + d[k]) - b[k] * c[k])
            .collect()
    }
}

/// Polar grid on the unit disc: radii `r_i = (i+1)/n_r` (so `r = 0` is excluded
/// and the last ring is the boundary) times `n_θ` equispaced angles.
/// Node `(i, j)` is stored at `i * n_θ + j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscGrid {
    nr: usize,
    ntheta: usize,
}

impl DiscGrid {
    pub fn new(nr: usize, ntheta: usize) -> Result<Self> {
        if nr < 8 || !nr.is_multiple_of(2) || ntheta < 8 || !ntheta.is_multiple_of(2) {
            return Err(Error::Invalid(format!(
                "disc grid needs even counts >= 8, got {nr} x {ntheta}"
            )));
        }
        Ok(Self { nr, ntheta })
    }

    pub fn nr(&self) -> usize {
        self.nr
    }

    pub fn ntheta(&self) -> usize {
        self.ntheta
    }

    pub fn dr(&self) -> f64 {
        1.0 / self.nr as f64
    }

    pub fn radius(&self, i: usize) -> f64 {
        (i + 1) as f64 / self.nr as f64
    }

    pub fn radii(&self) -> Vec<f64> {
        (0..self.nr).map(|i| self.radius(i)).collect()
    }

    pub fn theta(&self, j: usize) -> f64 {
        2.0 * PI * j as f64 / self.ntheta as f64
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.ntheta + j
    }

    /// Composite Simpson weights for `∫_0^1 (·) r dr` on the radial nodes
    /// (the node at the origin carries no weight because `r = 0` there).
    pub fn radial_weights(&self) -> Vec<f64> {
        let h = self.dr();
        (1..=self.nr)
            .map(|m| {
                let simpson = if m == self.nr {
                    1.0
                } else if m % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                simpson * h / 3.0 * (m as f64 * h)
            })
            .collect()
    }

    /// Fourth-order radial derivative along one ray, one-sided near both ends.
    pub fn radial_derivative(&self, ray: &[f64]) -> Vec<f64> {
        let n = ray.len();
        let c = 1.0 / (12.0 * self.dr());
        let mut out = vec![0.0; n];
        for m in 0..n {
            out[m] = c * match m {
                0 => -25.0 * ray[0] + 48.0 * ray[1] - 36.0 * ray[2] + 16.0 * ray[3] - 3.0 * ray[4],
                1 => -3.0 * ray[0] - 10.0 * ray[1] + 18.0 * ray[2] - 6.0 * ray[3] + ray[4],
                _ if m == n - 2 => {
                    3.0 * ray[n - 1] + 10.0 * ray[n - 2] - 18.0 * ray[n - 3] + 6.0 * ray[n - 4]
                        - ray[n - 5]
                }
                _ if m == n - 1 => {
                    25.0 * ray[n - 1] - 48.0 * ray[n - 2] + 36.0 * ray[n - 3] - 16.0 * ray[n - 4]
                        + 3.0 * ray[n - 5]
                }
                _ => ray[m - 2] - 8.0 * ray[m - 1] + 8.0 * ray[m + 1] - ray[m + 2],
            };
        }
        out
    }

    fn radius_of(&self, node: usize) -> f64 {
        self.radius(node / self.ntheta)
    }
}

impl Grid for DiscGrid {
    fn len(&self) -> usize {
        self.nr * self.ntheta
    }

    fn dim(&self) -> usize {
        2
    }

    fn coordinate_names(&self) -> &'static [&'static str] {
        &["r", "theta"]
    }

    fn coordinates(&self, node: usize) -> Vec<f64> {
        vec![
            self.radius(node / self.ntheta),
            self.theta(node % self.ntheta),
        ]
    }

    fn integrate(&self, values: &[f64]) -> f64 {
        let w = self.radial_weights();
        let dtheta = 2.0 * PI / self.ntheta as f64;
        values
            .chunks(self.ntheta)
            .zip(&w)
            .map(|(ring, wr)| wr * ring.iter().sum::<f64>())
            .sum::<f64>()
            * dtheta
    }

    fn partial(&self, axis: usize, values: &[f64]) -> Vec<f64> {
        let (nr, nt) = (self.nr, self.ntheta);
        let mut out = vec![0.0; values.len()];
        match axis {
            0 => {
                let mut ray = vec![0.0; nr];
                for j in 0..nt {
                    for i in 0..nr {
                        ray[i] = values[i * nt + j];
                    }
                    let d = self.radial_derivative(&ray);
                    for i in 0..nr {
                        out[i * nt + j] = d[i];
                    }
                }
            }
            1 => {
                for (ring_in, ring_out) in values.chunks(nt).zip(out.chunks_mut(nt)) {
                    ring_out.copy_from_slice(&spectral::spectral_derivative(ring_in));
                }
            }
            _ => panic!("disc has two axes"),
        }
        out
    }

    fn grad(&self, f: &[f64]) -> Vec<Vec<f64>> {
        let fr = self.partial(0, f);
        let ft = self.partial(1, f);
        let gt = ft
            .iter()
            .enumerate()
            .map(|(k, d)| {
                let r = self.radius_of(k);
                d / (r * r)
            })
            .collect();
        vec![fr, gt]
    }

    fn div(&self, u: &[Vec<f64>]) -> Vec<f64> {
        let ru: Vec<f64> = u[0]
            .iter()
            .enumerate()
            .map(|(k, a)| self.radius_of(k) * a)
            .collect();
        let d_ru = self.partial(0, &ru);
        let d_ut = self.partial(1, &u[1]);
        (0..self.len())
            .map(|k| d_ru[k] / self.radius_of(k) + d_ut[k])
            .collect()
    }

    fn curl(&self, u: &[Vec<f64>]) -> Option<Vec<f64>> {
        let r2ut: Vec<f64> = u[1]
            .iter()
            .enumerate()
            .map(|(k, a)| {
                let r = self.radius_of(k);
                r * r * a
            })
            .collect();
        let d1 = self.partial(0, &r2ut);
        let d2 = self.partial(1, &u[0]);
        Some(
            (0..self.len())
                .map(|k| (d1[k] - d2[k]) / self.radius_of(k))
                .collect(),
        )
    }

    fn dot(&self, u: &[Vec<f64>], v: &[Vec<f64>]) -> Vec<f64> {
        (0..self.len())
            .map(|k| {
                let r = self.radius_of(k);
                u[0][k] * v[0][k] + r * r * u[1][k] * v[1][k]
            })
            .collect()
    }

    fn covariant(&self, u: &[Vec<f64>], v: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let mut vr = self.directional(u, &v[0]);
        let mut vt = self.directional(u, &v[1]);
        for k in 0..self.len() {
            let r = self.radius_of(k);
            vr[k] -= r * u[1][k] * v[1][k];
            vt[k] += (u[0][k] * v[1][k] + u[1][k] * v[0][k]) / r;
        }
        vec![vr, vt]
    }

    fn min_spacing(&self) -> f64 {
        self.dr().min(2.0 * PI * self.dr() / self.ntheta as f64)
    }
}
