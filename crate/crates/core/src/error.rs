use thiserror::Error;

/// Every failure the library can report. Each variant carries a stable
/// machine-readable code (see [`Error::code`]) used in CLI output.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("malformed algebra document: {0}")]
    Schema(String),
    #[error("Jacobi identity violated: residual {residual:e} on basis triple ({i}, {j}, {k})")]
    Jacobi {
        residual: f64,
        i: usize,
        j: usize,
        k: usize,
    },
    #[error("algebra is not step-two nilpotent: |[e_{i}, [e_{j}, e_{k}]]| = {residual:e}")]
    NotStepTwo {
        residual: f64,
        i: usize,
        j: usize,
        k: usize,
    },
    #[error("scalar product is degenerate: {0}")]
    Degenerate(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dim { expected: usize, got: usize },
    #[error("restriction of the scalar product to the center is degenerate")]
    CenterDegenerate,
    #[error("restriction of the scalar product to the complement is degenerate")]
    ComplementDegenerate,
    #[error("vector is not central: complement component has norm {0:e}")]
    NotCentral(f64),
    #[error("j(Z) failed the skew-symmetry check: residual {0:e}")]
    Skew(f64),
    #[error("eigenvalues cannot be paired into the four Hamiltonian families: {0}")]
    Pairing(String),
    #[error("time samples must be strictly monotone")]
    Times,
    #[error("step count must be at least 1")]
    Steps,
    #[error("point is not an equilibrium: |j(Y_z) Y_v| = {0:e}")]
    NotEquilibrium(f64),
    #[error("invalid Cartan parameters: {0}")]
    Params(String),
    #[error("family {family} requires p + q {parity}")]
    FamilyMismatch {
        family: &'static str,
        parity: &'static str,
    },
    #[error("unknown catalog entry '{0}'")]
    UnknownName(String),
    #[error("declared signature {declared:?} does not match computed {computed:?}")]
    Signature {
        declared: (usize, usize),
        computed: (usize, usize),
    },
    #[error("Phi*Phi is not diagonalizable over the reals: {0}")]
    NotDiagonalizable(String),
    #[error("image of Phi is a degenerate subspace")]
    DegenerateImage,
    #[error("semisimple-module conditions fail: {0}")]
    Conditions(String),
    #[error("scalar product is not positive-definite")]
    Definite,
    #[error("metric blocks are inconsistent: {0}")]
    Blocks(String),
    #[error("i/o failure: {0}")]
    Io(String),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::Schema(_) => "E_SCHEMA",
            Error::Jacobi { .. } => "E_JACOBI",
            Error::NotStepTwo { .. } => "E_NOT_STEP2",
            Error::Degenerate(_) => "E_DEGENERATE",
            Error::Dim { .. } => "E_DIM",
            Error::CenterDegenerate => "E_CENTER_DEGENERATE",
            Error::ComplementDegenerate => "E_COMPLEMENT_DEGENERATE",
            Error::NotCentral(_) => "E_NOT_CENTRAL",
            Error::Skew(_) => "E_SKEW",
            Error::Pairing(_) => "E_PAIRING",
            Error::Times => "E_TIMES",
            Error::Steps => "E_STEPS",
            Error::NotEquilibrium(_) => "E_NOT_EQUILIBRIUM",
            Error::Params(_) => "E_PARAMS",
            Error::FamilyMismatch { .. } => "E_FAMILY_MISMATCH",
            Error::UnknownName(_) => "E_UNKNOWN_NAME",
            Error::Signature { .. } => "E_SIGNATURE",
            Error::NotDiagonalizable(_) => "E_NOT_DIAGONALIZABLE",
            Error::DegenerateImage => "E_DEGENERATE_IMAGE",
            Error::Conditions(_) => "E_CONDITIONS",
            Error::Definite => "E_DEFINITE",
            Error::Blocks(_) => "E_BLOCKS",
            Error::Io(_) => "E_IO",
        }
    }

    /// Process exit status: 1 validation, 2 numerical hypothesis failure, 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NotDiagonalizable(_) | Error::Pairing(_) | Error::DegenerateImage => 2,
            Error::Io(_) => 3,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
