use thiserror::Error;

/// Failure modes of the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The energy coincides with a band edge, where the spinor ratio (and hence
    /// the Omega matrix) becomes singular.
    #[error("energy {energy} is at a band edge (edge {edge})")]
    BandEdgeDegeneracy { energy: f64, edge: f64 },

    #[error("well parameterization is degenerate at energy {energy} (alpha_minus = 0)")]
    DegenerateParameterization { energy: f64 },

    #[error("Omega matrix is singular (|det| = {det:e})")]
    SingularOmega { det: f64 },

    #[error("ODE integration failed at x = {x}: step size underflow")]
    IntegrationFailure { x: f64 },

    /// |M22| vanished on the real scattering axis: a spectral singularity.
    #[error("transmission pole at energy {energy} (|M22| = {m22_abs:e})")]
    TransmissionPole { energy: f64, m22_abs: f64 },

    #[error("energy grid is empty after band-edge exclusion")]
    EmptyGrid,

    #[error("real bound-state count is {count} at both ends of the V1 interval")]
    NoBreakingDetected { count: usize },

    #[error("nonrelativistic limit requested outside its validity range: {0}")]
    ScaleViolation(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("I/O failure: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
