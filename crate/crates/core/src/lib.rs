//! Two-qubit entanglement certification with chiral projectors over local frames,
//! cross-checked against the partial-transpose test.
//!
//! Everything numeric is generic over [`Real`] (`f32`, `f64`); the `*64` aliases
//! below are what the CLI and tests use.

pub mod criteria;
pub mod dirac;
pub mod error;
pub mod frame;
pub mod matrix;
pub mod scalar;
pub mod search;
pub mod states;

pub use criteria::{
    chsh_max, concurrence, correlation_matrix, expectation_identity_check, hefei_margins, ppt_test,
    HefeiMargins, PptResult, Verdict,
};
pub use dirac::{build_gammas, expansion_coefficients, verify_algebra, AlgebraReport, GammaSet};
pub use error::{Error, Result};
pub use frame::{EulerAngles, LocalFrame};
pub use matrix::{hermitian_eigh, kron, pauli, CMat, EigenDecomposition};
pub use scalar::Real;
pub use search::{certify, seed_frames, CriterionReport, SearchConfig};
pub use states::{DensityMatrix, PureState};

pub type CMat64 = CMat<f64>;
pub type PureState64 = PureState<f64>;
pub type DensityMatrix64 = DensityMatrix<f64>;
pub type LocalFrame64 = LocalFrame<f64>;
pub type EulerAngles64 = EulerAngles<f64>;
pub type GammaSet64 = GammaSet<f64>;
pub type HefeiMargins64 = HefeiMargins<f64>;
pub type PptResult64 = PptResult<f64>;
pub type CriterionReport64 = CriterionReport<f64>;
pub type AlgebraReport64 = AlgebraReport<f64>;
