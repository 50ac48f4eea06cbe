use alloc::string::String;
use alloc::vec::Vec;
use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{model}: {nu_thz} THz lies outside the validity window [{lo_thz}, {hi_thz}] THz")]
    Domain {
        model: &'static str,
        nu_thz: f64,
        lo_thz: f64,
        hi_thz: f64,
    },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("integrand is not finite at {at:?}")]
    NonFinite { at: Vec<f64> },

    #[error("rms per photon is not unimodal on the bracket; samples (N, rms/N): {samples:?}")]
    NotUnimodal { samples: Vec<(f64, f64)> },

    #[error("matrix exponential did not converge (norm {norm})")]
    Expm { norm: f64 },

    #[error("Fock truncation too small: boundary population {population:e}")]
    Truncation { population: f64 },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
