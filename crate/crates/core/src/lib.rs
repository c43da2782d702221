//! Bit-accurate model of a reconfigurable DSP array.
//!
//! Filters, the wavelet decimator and the DCT evaluate their dot products
//! by distributed arithmetic; the FFT uses a three-multiplier butterfly.
//! [`fabric`] maps each function onto a fixed pool of common modules and
//! executes the resulting netlist tick by tick. [`oracle`] holds the naive
//! references every kernel is tested against.

pub mod cosine;
pub mod da;
pub mod error;
pub mod fabric;
pub mod filter;
pub mod formats;
pub mod fourier;
pub mod numerics;
pub mod oracle;
pub mod scalar;
pub mod wavelet;

pub use error::{Error, Result};
pub use numerics::{ComplexFixed, FixedPoint, QFormat, WideAccumulator};
pub use scalar::{RealScalar, Scalar};

/// Default floating scalar for references and reports.
pub type Real = f64;

/// Exact scalar for symbolic checks.
pub type Exact = num_rational::BigRational;

/// Complex value of the default scalar.
pub type RealComplex = num_complex::Complex<Real>;
