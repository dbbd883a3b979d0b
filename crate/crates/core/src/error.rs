use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },

    #[error("dimension {dim} exceeds the dense kernel limit {max}")]
    TooLarge { dim: usize, max: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("eigendecomposition failed: matrix is defective or an eigenvector basis could not be inverted")]
    DefectiveMatrix,

    #[error("linear algebra backend error: {0}")]
    Backend(String),

    #[error(
        "top transfer eigenvalue is degenerate (|λ1| = |λ2| = {modulus}); thermodynamic \
         quantities are undefined at the g = 0 transition point"
    )]
    DegenerateTop { modulus: f64 },

    #[error("partition norm is not positive (Z = {z}); state is degenerate")]
    DegenerateState { z: f64 },

    #[error("unknown rung operator label `{0}`")]
    UnknownOperator(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("operation requires a spin-flip constrained family, got `{0}`")]
    WrongFamily(String),

    #[error("negative projector weight {weight} for {label}")]
    NegativeWeight { label: String, weight: f64 },

    #[error("multiplet vector |{label}> lies outside the numeric null space (residual {residual:.3e})")]
    BasisVectorOutsideNullSpace { label: String, residual: f64 },

    #[error(
        "two-rung operator has weight {residual:.3e} outside the coupling ansatz; \
         the weight set breaks an assumed symmetry"
    )]
    StructureResidual { residual: f64 },
}

impl From<ndarray_linalg::error::LinalgError> for Error {
    fn from(e: ndarray_linalg::error::LinalgError) -> Self {
        Error::Backend(e.to_string())
    }
}
