use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),
    #[error("matrix is not symmetric (max deviation {0:e})")]
    NotSymmetric(f64),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("entanglement {value} outside physical range [0, {max}]")]
    UnphysicalEntanglement { value: f64, max: f64 },
    #[error("angle {0} outside [0, pi/2]")]
    AngleOutOfRange(f64),
    #[error("spectra differ by {0:e}")]
    SpectrumMismatch(f64),
    #[error("eta {0} outside [0, 1]")]
    EtaOutOfRange(f64),
    #[error("state is not in X form")]
    NotXForm,
    #[error("state is not in TGX form")]
    NotTgxForm,
    #[error("state is not a minimal TGX state")]
    NotMinimalTgx,
    #[error("state is not a minimal SGX state")]
    NotMinimalSgx,
    #[error("state is not an EPU-minimal TGX state")]
    NotEpuMinimalTgx,
    #[error("coherence is spread over more than one quartet")]
    AmbiguousQuartet,
    #[error("{0:?} is not a product quartet")]
    InvalidQuartet(Vec<usize>),
    #[error("ket is not normalized (norm {0})")]
    NotNormalized(f64),
    #[error("matrix is not unitary (max deviation {0:e})")]
    NotUnitary(f64),
    #[error("D = {d} is below the rank {rank}")]
    DTooSmall { d: usize, rank: usize },
    #[error("D = {d} exceeds rank^2 = {max}")]
    DTooLarge { d: usize, max: usize },
}

impl Error {
    /// Stable variant name, used for machine-readable CLI output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotHermitian(_) => "NotHermitian",
            Error::NotSymmetric(_) => "NotSymmetric",
            Error::InvalidState(_) => "InvalidState",
            Error::InvalidSpectrum(_) => "InvalidSpectrum",
            Error::IndexOutOfRange(_) => "IndexOutOfRange",
            Error::UnphysicalEntanglement { .. } => "UnphysicalEntanglement",
            Error::AngleOutOfRange(_) => "AngleOutOfRange",
            Error::SpectrumMismatch(_) => "SpectrumMismatch",
            Error::EtaOutOfRange(_) => "EtaOutOfRange",
            Error::NotXForm => "NotXForm",
            Error::NotTgxForm => "NotTGXForm",
            Error::NotMinimalTgx => "NotMinimalTGX",
            Error::NotMinimalSgx => "NotMinimalSGX",
            Error::NotEpuMinimalTgx => "NotEPUMinimalTGX",
            Error::AmbiguousQuartet => "AmbiguousQuartet",
            Error::InvalidQuartet(_) => "InvalidQuartet",
            Error::NotNormalized(_) => "NotNormalized",
            Error::NotUnitary(_) => "NotUnitary",
            Error::DTooSmall { .. } => "DTooSmall",
            Error::DTooLarge { .. } => "DTooLarge",
        }
    }

    /// True for errors caused by a state not having the structural form an operation needs.
    pub fn is_form_precondition(&self) -> bool {
        matches!(
            self,
            Error::NotXForm
                | Error::NotTgxForm
                | Error::NotMinimalTgx
                | Error::NotMinimalSgx
                | Error::NotEpuMinimalTgx
                | Error::AmbiguousQuartet
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
