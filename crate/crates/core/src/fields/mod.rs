//! Grids on the circle, flat torus and unit disc, the scalar and vector
//! fields that live on them, and their differential operators.

mod grid;
mod hodge;
pub mod spectral;

use std::io::Write;

pub use grid::{CircleGrid, DiscGrid, Grid, PeriodicGrid, TorusGrid};
pub use hodge::hodge_decompose;
pub use spectral::TrigPoly;

use crate::error::{Error, Result};

fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(Error::Invalid(format!("non-finite value at node {i}"))),
        None => Ok(()),
    }
}

fn check_len<G: Grid>(grid: &G, len: usize) -> Result<()> {
    if len != grid.len() {
        return Err(Error::GridMismatch(format!(
            "{len} values for a grid of {} nodes",
            grid.len()
        )));
    }
    Ok(())
}

/// Real values at the nodes of a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField<G: Grid> {
    grid: G,
    values: Vec<f64>,
}

impl<G: Grid> ScalarField<G> {
    pub fn new(grid: G, values: Vec<f64>) -> Result<Self> {
        check_len(&grid, values.len())?;
        check_finite(&values)?;
        Ok(Self { grid, values })
    }

    /// Samples `f` at the node coordinates.
    pub fn from_fn(grid: G, f: impl Fn(&[f64]) -> f64) -> Self {
        let values = (0..grid.len()).map(|k| f(&grid.coordinates(k))).collect();
        Self { grid, values }
    }

    pub fn constant(grid: G, c: f64) -> Self {
        Self {
            grid,
            values: vec![c; grid.len()],
        }
    }

    pub fn zeros(grid: G) -> Self {
        Self::constant(grid, 0.0)
    }

    /// Wraps operator output without re-validating.
    pub(crate) fn from_raw(grid: G, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn grid(&self) -> G {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::from_raw(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn scale(&self, a: f64) -> Self {
        self.map(|v| a * v)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a * b)
    }

    pub fn zip(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        same_grid(&self.grid, &other.grid)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(Self::from_raw(self.grid, values))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn integrate(&self) -> f64 {
        self.grid.integrate(&self.values)
    }

    /// `(∫ f²)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        let sq: Vec<f64> = self.values.iter().map(|v| v * v).collect();
        self.grid.integrate(&sq).max(0.0).sqrt()
    }
}

/// A vector field stored by coordinate component.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField<G: Grid> {
    grid: G,
    comps: Vec<Vec<f64>>,
}

impl<G: Grid> VectorField<G> {
    pub fn new(grid: G, comps: Vec<Vec<f64>>) -> Result<Self> {
        if comps.len() != grid.dim() {
            return Err(Error::GridMismatch(format!(
                "{} components for a {}-dimensional grid",
                comps.len(),
                grid.dim()
            )));
        }
        for c in &comps {
            check_len(&grid, c.len())?;
            check_finite(c)?;
        }
        Ok(Self { grid, comps })
    }

    pub fn from_fn(grid: G, f: impl Fn(&[f64]) -> Vec<f64>) -> Self {
        let mut comps = vec![Vec::with_capacity(grid.len()); grid.dim()];
        for k in 0..grid.len() {
            let v = f(&grid.coordinates(k));
            for (c, x) in comps.iter_mut().zip(v) {
                c.push(x);
            }
        }
        Self { grid, comps }
    }

    pub fn zeros(grid: G) -> Self {
        Self {
            grid,
            comps: vec![vec![0.0; grid.len()]; grid.dim()],
        }
    }

    pub(crate) fn from_raw(grid: G, comps: Vec<Vec<f64>>) -> Self {
        debug_assert_eq!(comps.len(), grid.dim());
        Self { grid, comps }
    }

    pub fn grid(&self) -> G {
        self.grid
    }

    pub fn comps(&self) -> &[Vec<f64>] {
        &self.comps
    }

    pub fn component(&self, axis: usize) -> ScalarField<G> {
        ScalarField::from_raw(self.grid, self.comps[axis].clone())
    }

    pub fn into_comps(self) -> Vec<Vec<f64>> {
        self.comps
    }

    pub fn scale(&self, a: f64) -> Self {
        let comps = self
            .comps
            .iter()
            .map(|c| c.iter().map(|v| a * v).collect())
            .collect();
        Self::from_raw(self.grid, comps)
    }

    /// Multiplies every component by a scalar field.
    pub fn weighted(&self, w: &ScalarField<G>) -> Result<Self> {
        same_grid(&self.grid, &w.grid)?;
        let comps = self
            .comps
            .iter()
            .map(|c| c.iter().zip(&w.values).map(|(a, b)| a * b).collect())
            .collect();
        Ok(Self::from_raw(self.grid, comps))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a - b)
    }

    fn zip(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        same_grid(&self.grid, &other.grid)?;
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| a.iter().zip(b).map(|(&x, &y)| f(x, y)).collect())
            .collect();
        Ok(Self::from_raw(self.grid, comps))
    }

    /// Pointwise Riemannian length.
    pub fn magnitude(&self) -> ScalarField<G> {
        let sq = self.grid.dot(&self.comps, &self.comps);
        ScalarField::from_raw(self.grid, sq.into_iter().map(f64::sqrt).collect())
    }

    /// Largest pointwise length over the nodes.
    pub fn max_norm(&self) -> f64 {
        self.magnitude().max_abs()
    }

    /// `(∫ |u|²)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        self.grid
            .integrate(&self.grid.dot(&self.comps, &self.comps))
            .max(0.0)
            .sqrt()
    }
}

pub(crate) fn same_grid<G: Grid>(a: &G, b: &G) -> Result<()> {
    if a != b {
        return Err(Error::GridMismatch(format!("{a:?} vs {b:?}")));
    }
    Ok(())
}

/// Spectral derivative of a periodic function on the circle.
pub fn derivative(f: &ScalarField<CircleGrid>) -> ScalarField<CircleGrid> {
    ScalarField::from_raw(f.grid, spectral::spectral_derivative(&f.values))
}

pub fn grad<G: Grid>(f: &ScalarField<G>) -> VectorField<G> {
    VectorField::from_raw(f.grid, f.grid.grad(&f.values))
}

pub fn div<G: Grid>(u: &VectorField<G>) -> ScalarField<G> {
    ScalarField::from_raw(u.grid, u.grid.div(&u.comps))
}

/// Scalar vorticity. The circle has none.
pub fn curl<G: Grid>(u: &VectorField<G>) -> Result<ScalarField<G>> {
    u.grid
        .curl(&u.comps)
        .map(|c| ScalarField::from_raw(u.grid, c))
        .ok_or_else(|| Error::Unsupported("curl is not defined on the circle".into()))
}

pub fn integrate<G: Grid>(f: &ScalarField<G>) -> f64 {
    f.integrate()
}

/// Writes one CSV row per node: coordinates followed by the named columns.
pub fn write_csv<G: Grid, W: Write>(
    out: &mut W,
    grid: &G,
    columns: &[(&str, &[f64])],
) -> std::io::Result<()> {
    let mut header: Vec<&str> = grid.coordinate_names().to_vec();
    header.extend(columns.iter().map(|(name, _)| *name));
    writeln!(out, "{}", header.join(","))?;
    for k in 0..grid.len() {
        let mut row: Vec<String> = grid
            .coordinates(k)
            .iter()
            .map(|x| format!("{x:.12e}"))
            .collect();
        row.extend(columns.iter().map(|(_, vals)| format!("{:.12e}", vals[k])));
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}
