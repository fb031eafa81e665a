//! Seeded band-limited random fields.
//!
//! Streams come from ChaCha8 (`rand_chacha::ChaCha8Rng::seed_from_u64`) with
//! standard normal draws, so a seed reproduces the same fields on any platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex64;

use crate::fields::{spectral, CircleGrid, Grid, ScalarField, TorusGrid, VectorField};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn normal(rng: &mut impl Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Fourier modes that are kept by default: `|k| ≤ n/4`.
pub fn default_band(n: usize) -> usize {
    n / 4
}

/// Real field on the circle with modes `|k| ≤ kmax` and standard normal coefficients.
pub fn circle_field(grid: CircleGrid, kmax: usize, rng: &mut impl Rng) -> ScalarField<CircleGrid> {
    let n = grid.n();
    let kmax = kmax.min(n / 2 - 1);
    let mut values = vec![normal(rng); n];
    for k in 1..=kmax {
        let (a, b) = (normal(rng), normal(rng));
        for (i, v) in values.iter_mut().enumerate() {
            let (s, c) = (k as f64 * grid.point(i)).sin_cos();
            *v += a * c + b * s;
        }
    }
    ScalarField::from_raw(grid, values)
}

/// Real field on the torus with modes `|k_x| ≤ nx/4`, `|k_y| ≤ ny/4`.
pub fn torus_field(grid: TorusGrid, rng: &mut impl Rng) -> ScalarField<TorusGrid> {
    let (nx, ny) = (grid.nx(), grid.ny());
    let (kx, ky) = (default_band(nx) as i64, default_band(ny) as i64);
    let mut spec = vec![Complex64::new(0.0, 0.0); nx * ny];
    let scale = (nx * ny) as f64;
    for i in -kx..=kx {
        for j in -ky..=ky {
            let (re, im) = (normal(rng), normal(rng));
            let idx = i.rem_euclid(nx as i64) as usize * ny + j.rem_euclid(ny as i64) as usize;
            spec[idx] = Complex64::new(re, im) * scale;
        }
    }
    ScalarField::from_raw(grid, grid.ifft2_real(spec))
}

pub fn torus_vector(grid: TorusGrid, rng: &mut impl Rng) -> VectorField<TorusGrid> {
    let a = torus_field(grid, rng).into_values();
    let b = torus_field(grid, rng).into_values();
    VectorField::from_raw(grid, vec![a, b])
}

pub fn circle_vector(grid: CircleGrid, kmax: usize, rng: &mut impl Rng) -> VectorField<CircleGrid> {
    VectorField::from_raw(grid, vec![circle_field(grid, kmax, rng).into_values()])
}

/// Positive density `1 + amplitude · r / max|r|` built from a random field `r`.
pub fn positive_density<G: Grid>(r: &ScalarField<G>, amplitude: f64) -> ScalarField<G> {
    let m = r.max_abs();
    if m == 0.0 {
        return ScalarField::constant(r.grid(), 1.0);
    }
    r.map(|v| 1.0 + amplitude * v / m)
}

/// Mean of a field, used to strip constants from random data.
pub fn mean<G: Grid>(f: &ScalarField<G>) -> f64 {
    let one = vec![1.0; f.grid().len()];
    f.integrate() / f.grid().integrate(&one)
}

#[allow(dead_code)]
pub(crate) fn is_band_limited(values: &[f64], kmax: usize) -> bool {
    let n = values.len();
    let spec = spectral::forward(values);
    spec.iter().enumerate().all(|(i, c)| {
        spectral::signed_mode(i, n).unsigned_abs() as usize <= kmax || c.norm() < 1e-9 * n as f64
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_field() {
        let g = CircleGrid::new(32).unwrap();
        let a = circle_field(g, 8, &mut rng(7));
        let b = circle_field(g, 8, &mut rng(7));
        assert_eq!(a, b);
        assert_ne!(a, circle_field(g, 8, &mut rng(8)));
    }

    #[test]
    fn fields_are_band_limited() {
        let g = CircleGrid::new(32).unwrap();
        assert!(is_band_limited(circle_field(g, 8, &mut rng(1)).values(), 8));
        let t = TorusGrid::new(16, 16).unwrap();
        let f = torus_field(t, &mut rng(2));
        for row in f.values().chunks(16) {
            assert!(is_band_limited(row, 4));
        }
    }

    #[test]
    fn density_is_positive() {
        let g = CircleGrid::new(32).unwrap();
        let rho = positive_density(&circle_field(g, 8, &mut rng(3)), 0.5);
        assert!(rho.min() >= 0.5 - 1e-15);
    }
}
