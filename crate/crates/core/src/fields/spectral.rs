//! Fourier machinery shared by the periodic grids: cached FFT plans,
//! spectral differentiation and trigonometric interpolants.

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

type PlanPair = (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>);

thread_local! {
    static PLANNER: RefCell<(FftPlanner<f64>, HashMap<usize, PlanPair>)> =
        RefCell::new((FftPlanner::new(), HashMap::new()));
}

fn plans(n: usize) -> PlanPair {
    PLANNER.with(|cell| {
        let mut guard = cell.borrow_mut();
        let (planner, cache) = &mut *guard;
        if let Some(pair) = cache.get(&n) {
            return pair.clone();
        }
        let pair = (planner.plan_fft_forward(n), planner.plan_fft_inverse(n));
        cache.insert(n, pair.clone());
        pair
    })
}

/// Unnormalized forward DFT of a real sequence.
pub(crate) fn forward(values: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    forward_in_place(&mut buf);
    buf
}

pub(crate) fn forward_in_place(buf: &mut [Complex64]) {
    let (fwd, _) = plans(buf.len());
    fwd.process(buf);
}

/// Inverse DFT including the 1/n normalization.
pub(crate) fn inverse_in_place(buf: &mut [Complex64]) {
    let n = buf.len();
    let (_, inv) = plans(n);
    inv.process(buf);
    let scale = 1.0 / n as f64;
    for c in buf.iter_mut() {
        *c *= scale;
    }
}

pub(crate) fn inverse_real(mut spec: Vec<Complex64>) -> Vec<f64> {
    inverse_in_place(&mut spec);
    spec.into_iter().map(|c| c.re).collect()
}

/// Signed mode number of DFT index `idx`; the Nyquist index maps to `n/2`.
pub(crate) fn signed_mode(idx: usize, n: usize) -> i64 {
    if idx <= n / 2 {
        idx as i64
    } else {
        idx as i64 - n as i64
    }
}

/// Wavenumber used for differentiation. The Nyquist mode has no
/// well-defined real derivative and is mapped to zero.
pub(crate) fn derivative_wavenumber(idx: usize, n: usize) -> f64 {
    if n.is_multiple_of(2) && idx == n / 2 {
        0.0
    } else {
        signed_mode(idx, n) as f64
    }
}

/// Derivative of a periodic sequence sampled on `[0, 2π)`.
pub fn spectral_derivative(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut spec = forward(values);
    for (idx, c) in spec.iter_mut().enumerate() {
        let k = derivative_wavenumber(idx, n);
        *c *= Complex64::new(0.0, k);
    }
    inverse_real(spec)
}

/// Real trigonometric interpolant
/// `mean + Σ_k (cos_k cos kx + sin_k sin kx)` through equispaced samples on `[0, 2π)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigPoly {
    mean: f64,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl TrigPoly {
    pub fn from_samples(values: &[f64]) -> Self {
        let n = values.len();
        let spec = forward(values);
        let scale = 1.0 / n as f64;
        let kmax = n / 2;
        let mut cos = vec![0.0; kmax];
        let mut sin = vec![0.0; kmax];
        for k in 1..=kmax {
            let c = spec[k];
            if n.is_multiple_of(2) && k == n / 2 {
                cos[k - 1] = c.re * scale;
            } else {
                cos[k - 1] = 2.0 * c.re * scale;
                sin[k - 1] = -2.0 * c.im * scale;
            }
        }
        Self {
            mean: spec[0].re * scale,
            cos,
            sin,
        }
    }

    /// Builds a polynomial directly from coefficient lists (index `k-1` holds mode `k`).
    pub fn from_coefficients(mean: f64, cos: Vec<f64>, sin: Vec<f64>) -> Self {
        assert_eq!(cos.len(), sin.len());
        Self { mean, cos, sin }
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn degree(&self) -> usize {
        self.cos.len()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.derivative_at(x, 0)
    }

    /// `order`-th derivative at `x`.
    pub fn derivative_at(&self, x: f64, order: u32) -> f64 {
        let (s1, c1) = x.sin_cos();
        let (mut sk, mut ck) = (s1, c1);
        let mut acc = if order == 0 { self.mean } else { 0.0 };
        for (i, (&a, &b)) in self.cos.iter().zip(&self.sin).enumerate() {
            let k = (i + 1) as f64;
            let (mut da, mut db) = (a, b);
            for _ in 0..order {
                let (na, nb) = (db * k, -da * k);
                da = na;
                db = nb;
            }
            acc += da * ck + db * sk;
            let next_c = ck * c1 - sk * s1;
            let next_s = sk * c1 + ck * s1;
            ck = next_c;
            sk = next_s;
        }
        acc
    }

    /// Antiderivative `mean·x + Σ (a_k sin kx − b_k cos kx)/k`, defined on all of ℝ.
    pub fn antiderivative(&self, x: f64) -> f64 {
        let mut acc = self.mean * x;
        for (i, (&a, &b)) in self.cos.iter().zip(&self.sin).enumerate() {
            let k = (i + 1) as f64;
            let (s, c) = (k * x).sin_cos();
            acc += (a * s - b * c) / k;
        }
        acc
    }

    /// Exact integral over `[lo, hi]`; the endpoints may be any reals.
    pub fn integral(&self, lo: f64, hi: f64) -> f64 {
        self.antiderivative(hi) - self.antiderivative(lo)
    }

    /// Upper bound `|mean| + Σ(|a_k| + |b_k|)` on `sup |p|`.
    pub fn coefficient_bound(&self) -> f64 {
        self.mean.abs()
            + self
                .cos
                .iter()
                .chain(&self.sin)
                .map(|c| c.abs())
                .sum::<f64>()
    }

    /// Global maximum over the circle of `sign · p^{(order)}`, located by dense
    /// sampling followed by Newton refinement on the next derivative.
    pub fn max_of_derivative(&self, order: u32, sign: f64) -> f64 {
        let samples = (16 * (self.degree() + 1)).max(64);
        let h = 2.0 * PI / samples as f64;
        let vals: Vec<f64> = (0..samples)
            .map(|i| sign * self.derivative_at(i as f64 * h, order))
            .collect();
        let mut best = f64::NEG_INFINITY;
        for i in 0..samples {
            let prev = vals[(i + samples - 1) % samples];
            let next = vals[(i + 1) % samples];
            if vals[i] >= prev && vals[i] >= next {
                let refined = self.refine_max(i as f64 * h, h, order, sign);
                best = best.max(refined).max(vals[i]);
            }
        }
        if best == f64::NEG_INFINITY {
            // constant function
            best = vals[0];
        }
        best
    }

    fn refine_max(&self, x0: f64, h: f64, order: u32, sign: f64) -> f64 {
        let (lo, hi) = (x0 - h, x0 + h);
        let mut x = x0;
        for _ in 0..50 {
            let d1 = sign * self.derivative_at(x, order + 1);
            let d2 = sign * self.derivative_at(x, order + 2);
            if d2 >= 0.0 {
                break;
            }
            let step = d1 / d2;
            let nx = x - step;
            if !(lo..=hi).contains(&nx) {
                break;
            }
            x = nx;
            if step.abs() < 1e-15 {
                break;
            }
        }
        sign * self.derivative_at(x, order)
    }

    /// `sup_x |p(x)|`.
    pub fn sup_abs(&self) -> f64 {
        self.max_of_derivative(0, 1.0)
            .max(self.max_of_derivative(0, -1.0))
    }
}
