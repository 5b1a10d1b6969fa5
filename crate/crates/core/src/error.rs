use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("quadrature of degree {degree} requested, rules are tabulated up to degree {max}")]
    QuadratureDegree { degree: usize, max: usize },

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("mesh file parse error on line {line}: {msg}")]
    MeshParse { line: usize, msg: String },

    #[error("invalid density parameters: {0}")]
    InvalidDensity(String),

    #[error("numerical conjugate did not converge (best value {best}, gradient norm {residual:e})")]
    ConjugateNotConverged { best: f64, residual: f64 },

    #[error("singular local matrix on triangle {0}")]
    SingularLocalMatrix(usize),

    #[error("sparse factorization failed: {0}")]
    Factorization(String),

    #[error("mesh mismatch: {0}")]
    MeshMismatch(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("root finder failed to bracket a positive root")]
    RootNotFound,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
