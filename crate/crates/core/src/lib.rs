//! A desk-scale laboratory for uniformity on the Boolean cube and its
//! middle slice.
//!
//! * [`bitcore`]: points, dense tables, the table file format.
//! * [`fourier`]: characters, the Walsh-Hadamard transform, level weights.
//! * [`gowers`]: multiplicative derivatives and `U_s` norms, exact and
//!   Monte Carlo.
//! * [`slicemodel`]: slice and residue-class domains, the dense-model
//!   distance, atom-algebra counting oracles, conditioned samplers.
//! * [`testers`]: the quadruple and d-Gowers tests on the slice, linear
//!   decoding.
//! * [`nonclassical`]: torus-valued polynomials, degree verification,
//!   correlations and the residue search for biased polynomials.
//!
//! All tables index points little-endian: bit `i` of the index is
//! coordinate `i + 1`.

pub mod bitcore;
pub mod error;
pub mod estimate;
pub mod fourier;
pub mod gowers;
pub mod nonclassical;
pub mod report;
pub mod selftest;
pub mod slicemodel;
pub mod synth;
pub mod testers;

pub use bitcore::{pointwise_combine, BitVector, RealFunctionTable};
pub use error::{Error, Result};
pub use estimate::{EstimateMode, Mode};
pub use fourier::{wht, FourierSpectrum};
pub use gowers::{gowers_norm, gowers_norm_exact, gowers_norm_mc, GowersEstimate};
pub use nonclassical::{CorrelationReport, TorusPolynomial};
pub use slicemodel::{AtomAlgebra, DomainSpec};
pub use testers::{LinearDecoding, SliceFunction, TestOutcome};

/// Version string embedded in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
