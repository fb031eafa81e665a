//! Numerical Riemannian geometry of barotropic compressible flow.
//!
//! Fluid configurations are pairs of a diffeomorphism and a density-like
//! function, equipped with the weighted metric
//! `⟨⟨(u,f),(v,g)⟩⟩ = ∫ λ(ρ) f g + ρ⟨u,v⟩`. Geodesics of that metric are
//! solutions of the compressible Euler equations, and Jacobi fields along them
//! are solutions of the linearized equations.
//!
//! The crate provides grids on the circle, flat torus and unit disc
//! ([`fields`]), pressure laws ([`pressure`]), the metric, Christoffel map and
//! curvature ([`metric`]), geodesic and Jacobi integrators ([`geodesic`],
//! [`jacobi`]), and closed-form test cases ([`burgers`], [`torus`], [`disc`]).

// `!(x > 0.0)` is used on purpose throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod burgers;
pub mod disc;
pub mod error;
pub mod fields;
pub mod geodesic;
pub mod jacobi;
pub mod metric;
pub mod ode;
pub mod pressure;
pub mod random;
pub mod torus;

pub use error::{Error, Result};

// The guide's and README's listings run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/pressure.md")]
    mod pressure {}
    #[doc = include_str!("../../../book/src/metric.md")]
    mod metric {}
    #[doc = include_str!("../../../book/src/geodesics.md")]
    mod geodesics {}
    #[doc = include_str!("../../../book/src/jacobi.md")]
    mod jacobi {}
    #[doc = include_str!("../../../book/src/torus.md")]
    mod torus {}
    #[doc = include_str!("../../../book/src/disc.md")]
    mod disc {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../README.md")]
    mod readme {}
}
