//! Metric weights `λ(ρ)` and the pressure laws they induce.
//!
//! Given `λ`, the auxiliary function is `φ = (λ − ρλ′)/2` and the pressure is
//! `p = ρ²φ/λ²`. A power law `λ = Cρ^m` gives the polytrope `p = Aρ^γ` with
//! `γ = 2 − m` and `A = (1 − m)/(2C)`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Densities outside this range are rejected.
pub const RHO_MIN: f64 = 1e-6;
pub const RHO_MAX: f64 = 1e6;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum LambdaLaw {
    Power {
        coef: f64,
        exponent: f64,
    },
    Custom {
        lambda: ScalarFn,
        lambda_prime: ScalarFn,
    },
}

/// Named entries of the fixed `λ` catalog.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Catalog {
    /// `λ(ρ) = ρ`, for which `φ = 0` and the pressure vanishes.
    Linear,
    /// `λ(ρ) = 3/ρ`, giving `p = ρ³/3`.
    ThreeOverRho,
    /// `λ(ρ) = value`, giving `p = ρ²/(2·value)`.
    Constant(f64),
}

/// The triple `λ`, `φ`, `p` together with the derived potentials.
#[derive(Clone)]
pub struct PressureModel {
    law: LambdaLaw,
}

impl fmt::Debug for PressureModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.law {
            LambdaLaw::Power { coef, exponent } => {
                write!(f, "PressureModel(λ = {coef}·ρ^{exponent})")
            }
            LambdaLaw::Custom { .. } => write!(f, "PressureModel(custom λ)"),
        }
    }
}

fn check_rho(rho: f64) -> Result<()> {
    if !(RHO_MIN..=RHO_MAX).contains(&rho) {
        return Err(Error::Domain(format!(
            "density {rho} outside the working range [{RHO_MIN:e}, {RHO_MAX:e}]"
        )));
    }
    Ok(())
}

impl PressureModel {
    /// `λ(ρ) = coef · ρ^exponent`.
    pub fn power(coef: f64, exponent: f64) -> Result<Self> {
        if !(coef > 0.0) || !coef.is_finite() || !exponent.is_finite() {
            return Err(Error::Invalid(format!(
                "power law needs coef > 0, got {coef}"
            )));
        }
        Ok(Self {
            law: LambdaLaw::Power { coef, exponent },
        })
    }

    /// The weight reproducing `p = Aρ^γ`: `λ = ((γ − 1)/(2A)) ρ^{2−γ}`.
    pub fn polytropic(a: f64, gamma: f64) -> Result<Self> {
        if !(gamma > 1.0) {
            return Err(Error::Unsupported(format!(
                "polytropic exponent must exceed 1, got {gamma}"
            )));
        }
        if !(a > 0.0) {
            return Err(Error::Invalid(format!(
                "polytropic constant must be positive, got {a}"
            )));
        }
        Self::power((gamma - 1.0) / (2.0 * a), 2.0 - gamma)
    }

    pub fn catalog(entry: Catalog) -> Result<Self> {
        match entry {
            Catalog::Linear => Self::power(1.0, 1.0),
            Catalog::ThreeOverRho => Self::power(3.0, -1.0),
            Catalog::Constant(value) => Self::power(value, 0.0),
        }
    }

    /// A user-supplied pair `(λ, λ′)`. `φ′` and `p′` are then taken by
    /// centered differences with step `1e-6·ρ`.
    pub fn custom(
        lambda: impl Fn(f64) -> f64 + Send + Sync + 'static,
        lambda_prime: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            law: LambdaLaw::Custom {
                lambda: Arc::new(lambda),
                lambda_prime: Arc::new(lambda_prime),
            },
        }
    }

    /// `(A, γ)` when the model is a power law, with `A = 0` for `λ = ρ`.
    pub fn polytropic_parameters(&self) -> Option<(f64, f64)> {
        match self.law {
            LambdaLaw::Power { coef, exponent } => {
                Some(((1.0 - exponent) / (2.0 * coef), 2.0 - exponent))
            }
            LambdaLaw::Custom { .. } => None,
        }
    }

    pub fn lambda(&self, rho: f64) -> Result<f64> {
        check_rho(rho)?;
        Ok(self.lambda_unchecked(rho))
    }

    pub fn lambda_prime(&self, rho: f64) -> Result<f64> {
        check_rho(rho)?;
        Ok(match &self.law {
            LambdaLaw::Power { coef, exponent } => coef * exponent * rho.powf(exponent - 1.0),
            LambdaLaw::Custom { lambda_prime, .. } => lambda_prime(rho),
        })
    }

    fn lambda_unchecked(&self, rho: f64) -> f64 {
        match &self.law {
            LambdaLaw::Power { coef, exponent } => coef * rho.powf(*exponent),
            LambdaLaw::Custom { lambda, .. } => lambda(rho),
        }
    }

    fn phi_unchecked(&self, rho: f64) -> f64 {
        match &self.law {
            LambdaLaw::Power { coef, exponent } => {
                0.5 * coef * (1.0 - exponent) * rho.powf(*exponent)
            }
            LambdaLaw::Custom {
                lambda,
                lambda_prime,
            } => 0.5 * (lambda(rho) - rho * lambda_prime(rho)),
        }
    }

    /// `φ(ρ) = (λ − ρλ′)/2`.
    pub fn phi(&self, rho: f64) -> Result<f64> {
        check_rho(rho)?;
        Ok(self.phi_unchecked(rho))
    }

    /// `φ′(ρ)`, analytic for power laws.
    pub fn phi_prime(&self, rho: f64) -> Result<f64> {
        check_rho(rho)?;
        Ok(match &self.law {
            LambdaLaw::Power { coef, exponent } => {
                0.5 * coef * exponent * (1.0 - exponent) * rho.powf(exponent - 1.0)
            }
            LambdaLaw::Custom { .. } => self.phi_prime_fd(rho),
        })
    }

    /// Centered difference of `φ` with step `1e-6·ρ`.
    pub fn phi_prime_fd(&self, rho: f64) -> f64 {
        let h = 1e-6 * rho;
        (self.phi_unchecked(rho + h) - self.phi_unchecked(rho - h)) / (2.0 * h)
    }

    fn pressure_unchecked(&self, rho: f64) -> f64 {
        let lam = self.lambda_unchecked(rho);
        rho * rho * self.phi_unchecked(rho) / (lam * lam)
    }

    /// `p(ρ) = ρ²φ/λ²`.
    pub fn pressure(&self, rho: f64) -> Result<f64> {
        check_rho(rho)?;
        let lam = self.lambda_unchecked(rho);
        if !(lam > 0.0) {
            return Err(Error::Domain(format!("λ({rho}) = {lam} is not positive")));
        }
        Ok(self.pressure_unchecked(rho))
    }

    /// `p′(ρ)`.
    pub fn pressure_prime(&self, rho: f64) -> Result<f64> {
        check_rho(rho)?;
        Ok(match self.polytropic_parameters() {
            Some((a, gamma)) => a * gamma * rho.powf(gamma - 1.0),
            None => {
                let h = 1e-6 * rho;
                (self.pressure_unchecked(rho + h) - self.pressure_unchecked(rho - h)) / (2.0 * h)
            }
        })
    }

    /// `h′(ρ) = p′(ρ)/ρ`, the coefficient in the linearized momentum equation.
    pub fn linearization_coefficient(&self, rho: f64) -> Result<f64> {
        Ok(self.pressure_prime(rho)? / rho)
    }

    /// Potential density `ψ` with `ψ′ = p/ρ²`, normalized so that `ψ → 0` as
    /// `ρ → 0` for `γ > 1`. Only available for power laws.
    pub fn potential_density(&self, rho: f64) -> Result<f64> {
        check_rho(rho)?;
        match self.polytropic_parameters() {
            Some((0.0, _)) => Ok(0.0),
            Some((a, gamma)) if (gamma - 1.0).abs() > 1e-12 => {
                Ok(a * rho.powf(gamma - 1.0) / (gamma - 1.0))
            }
            Some((a, _)) => Ok(a * rho.ln()),
            None => Err(Error::Unsupported(
                "potential density needs a power-law model".into(),
            )),
        }
    }

    /// `xφ′(x) + φ(x)²/λ(x)`; its sign decides the one-dimensional curvature sign.
    pub fn curvature_coefficient(&self, x: f64) -> Result<f64> {
        let phi = self.phi(x)?;
        Ok(x * self.phi_prime(x)? + phi * phi / self.lambda_unchecked(x))
    }

    /// Compares `p(ρ)` with a reference pressure law at the given densities and
    /// returns the largest relative deviation.
    pub fn check_reference(&self, reference: impl Fn(f64) -> f64, samples: &[f64]) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for &rho in samples {
            let p = self.pressure(rho)?;
            let r = reference(rho);
            worst = worst.max((p - r).abs() / r.abs().max(f64::MIN_POSITIVE));
        }
        Ok(worst)
    }
}

/// Entropy-separable pressure `p(ρ, s) = ζ(s)² ρ²φ(ρ)/λ(ρ)²`.
#[derive(Clone)]
pub struct EntropyPressure {
    base: PressureModel,
    zeta: ScalarFn,
    zeta_inv: ScalarFn,
}

impl fmt::Debug for EntropyPressure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "EntropyPressure({:?})", self.base)
    }
}

impl EntropyPressure {
    /// `zeta_inv` must invert `zeta` on the range of entropies in use.
    pub fn new(
        base: PressureModel,
        zeta: impl Fn(f64) -> f64 + Send + Sync + 'static,
        zeta_inv: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            base,
            zeta: Arc::new(zeta),
            zeta_inv: Arc::new(zeta_inv),
        }
    }

    pub fn base(&self) -> &PressureModel {
        &self.base
    }

    pub fn zeta(&self, s: f64) -> f64 {
        (self.zeta)(s)
    }

    pub fn entropy_from_ratio(&self, q_over_rho: f64) -> f64 {
        (self.zeta_inv)(q_over_rho)
    }

    pub fn pressure(&self, rho: f64, s: f64) -> Result<f64> {
        let z = self.zeta(s);
        Ok(self.base.pressure(rho)? * z * z)
    }
}
