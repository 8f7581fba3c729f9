use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid medium: {0}")]
    InvalidMedium(String),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("transverse wavenumber |k_t^2| = {magnitude:e} is below the degeneracy floor")]
    DegenerateTransverse { magnitude: f64 },

    #[error("longitudinal wavenumber |k_z| = {magnitude:e} is below the degeneracy floor")]
    DegenerateLongitudinal { magnitude: f64 },

    #[error(
        "quadrature did not converge after {subdivisions} subdivisions \
         (estimate magnitude {estimate:e}, error bound {error:e})"
    )]
    QuadratureNonConvergence {
        estimate: f64,
        error: f64,
        subdivisions: usize,
    },

    #[error("assembly failed at k_x = {k_x_re}{k_x_im:+}j, entry ({row}, {col}): {source}")]
    Assembly {
        k_x_re: f64,
        k_x_im: f64,
        row: usize,
        col: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("linear system is singular to working precision (condition estimate {condition:e})")]
    SingularSystem { condition: f64 },

    #[error("narrow-strip kernel {magnitude:e} below pole-proximity floor at k_x = {k_x_re}{k_x_im:+}j")]
    PoleProximity {
        magnitude: f64,
        k_x_re: f64,
        k_x_im: f64,
    },

    #[error("contour infeasible: {0}")]
    ContourInfeasible(String),

    #[error("requested x = {x} lies outside the contour guard range |x| <= {x_max}")]
    OutsideGuardRange { x: f64, x_max: f64 },

    #[error("point ({y}, {z}) lies inside the wire")]
    InsideWire { y: f64, z: f64 },

    #[error("probe at z = {z} lies on a source or strip plane")]
    ProbeOnPlane { z: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit status: 2 for input problems, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidMedium(_)
            | Error::InvalidScenario(_)
            | Error::InvalidArgument(_)
            | Error::ContourInfeasible(_)
            | Error::OutsideGuardRange { .. }
            | Error::InsideWire { .. }
            | Error::ProbeOnPlane { .. }
            | Error::Config(_)
            | Error::Io(_) => 2,
            Error::DegenerateTransverse { .. }
            | Error::DegenerateLongitudinal { .. }
            | Error::QuadratureNonConvergence { .. }
            | Error::Assembly { .. }
            | Error::SingularSystem { .. }
            | Error::PoleProximity { .. } => 3,
        }
    }
}
