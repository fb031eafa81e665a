use rustfft::num_complex::Complex64;

use super::{ScalarField, TorusGrid, VectorField};

/// Splits `v = grad f + w` on the torus with `f` mean-zero and `div w = 0`.
///
/// Computed mode by mode: `f̂ = −i(k·v̂)/|k|²`. Constant fields and the Nyquist
/// content that the spectral gradient cannot represent stay in `w`.
pub fn hodge_decompose(
    v: &VectorField<TorusGrid>,
) -> (ScalarField<TorusGrid>, VectorField<TorusGrid>) {
    let grid = v.grid();
    let (nx, ny) = (grid.nx(), grid.ny());
    let vx = grid.fft2(&v.comps()[0]);
    let vy = grid.fft2(&v.comps()[1]);
    let zero = Complex64::new(0.0, 0.0);
    let mut fh = vec![zero; nx * ny];
    let mut gx = vec![zero; nx * ny];
    let mut gy = vec![zero; nx * ny];
    for i in 0..nx {
        for j in 0..ny {
            let (kx, ky) = grid.wavenumbers(i, j);
            let k2 = kx * kx + ky * ky;
            if k2 == 0.0 {
                continue;
            }
            let idx = i * ny + j;
            let kv = vx[idx] * kx + vy[idx] * ky;
            let f = Complex64::new(0.0, -1.0) * kv / k2;
            fh[idx] = f;
            gx[idx] = Complex64::new(0.0, kx) * f;
            gy[idx] = Complex64::new(0.0, ky) * f;
        }
    }
    let f = grid.ifft2_real(fh);
    let gx = grid.ifft2_real(gx);
    let gy = grid.ifft2_real(gy);
    let wx = v.comps()[0].iter().zip(&gx).map(|(a, b)| a - b).collect();
    let wy = v.comps()[1].iter().zip(&gy).map(|(a, b)| a - b).collect();
    (
        ScalarField::from_raw(grid, f),
        VectorField::from_raw(grid, vec![wx, wy]),
    )
}
