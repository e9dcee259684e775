//! Spectra of integrated Euler and Wiener processes, average-case
//! information complexity of tensor-product approximation, and tractability
//! criteria evaluated over finite prefixes.
//!
//! The numeric kernels (`quad`, `linalg`, `spectra`, `tensor`) are generic
//! over [`Real`]; the report layers work in `f64`. Aliases below fix the
//! scalar to `f64` for the common case.

pub mod complexity;
pub mod error;
pub mod linalg;
pub mod quad;
pub mod rank_approx;
pub mod scalar;
pub mod smoothness;
pub mod spectra;
pub mod sum;
pub mod tensor;
pub mod tractability;

pub use error::{Error, Result};
pub use scalar::{ln_plus, Real};
pub use smoothness::{RateMode, Rule, SmoothnessSequence, HALF_INV_LN3};
pub use spectra::{Process, UnivariateSpectrum};

/// Double-precision univariate spectrum.
pub type Spectrum = spectra::UnivariateSpectrum<f64>;
/// Double-precision product eigenvalue.
pub type ProductEigenvalue = tensor::ProductEigenvalue<f64>;
/// Double-precision tensor account.
pub type TensorAccount = tensor::TensorAccount<f64>;
