use thiserror::Error;

/// Errors raised by the geometry, integration and spectral routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("time step {dt:.3e} exceeds the stability bound {limit:.3e}")]
    StepSize { dt: f64, limit: f64 },

    #[error("shock reached near t = {time:.6}: minimum flow-map stretch {stretch:.3e}")]
    ShockReached { time: f64, stretch: f64 },

    #[error("vacuum: boundary density {rho0} must exceed {threshold}")]
    Vacuum { rho0: f64, threshold: f64 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error(
        "characteristic cubic has no three distinct real roots (q^2 = {q2:.6e}, p^3 = {p3:.6e})"
    )]
    NotHyperbolic { q2: f64, p3: f64 },

    #[error("defective mode system: {0}")]
    Defective(String),

    #[error("iteration did not converge: {0}")]
    Convergence(String),

    #[error("perturbed branch '{branch}' failed: {source}")]
    Branch {
        branch: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("initial data incompatible with the boundary condition: residual {residual:.3e} > {tolerance:.1e}")]
    ProjectionResidual { residual: f64, tolerance: f64 },
}

impl Error {
    /// Short machine-readable tag, used by the CLI error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::GridMismatch(_) => "grid_mismatch",
            Error::Invalid(_) => "invalid",
            Error::StepSize { .. } => "step_size",
            Error::ShockReached { .. } => "shock_reached",
            Error::Vacuum { .. } => "vacuum",
            Error::Precondition(_) => "precondition",
            Error::Unsupported(_) => "unsupported",
            Error::NotHyperbolic { .. } => "not_hyperbolic",
            Error::Defective(_) => "defective",
            Error::Convergence(_) => "convergence",
            Error::Branch { .. } => "branch",
            Error::ProjectionResidual { .. } => "projection_residual",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
