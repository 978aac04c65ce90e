//! Scattering matrices for waveguides with a single cylindrical end.
//!
//! The scattering matrix is evaluated through a finite-rank effective
//! Hamiltonian: interior Neumann modes are coupled to cross-section channels
//! by an interaction matrix built from boundary traces, and the resolvent of
//! `diag(tau^2) - i W W^t` yields the full matrix over retained channels. The
//! open-channel projection of that matrix is unitary at every truncation, a
//! fact the test suite and the `unitarity`/`compare-formulas` commands verify
//! numerically, alongside convergence-rate studies in both truncation
//! parameters.

// `!(x > 0.0)` guards are deliberate: they reject NaN along with the
// out-of-range values, which `x <= 0.0` would not.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Matrix kernels index several arrays by the same row/column counter;
// iterator rewrites obscure that symmetry.
#![allow(clippy::needless_range_loop)]

pub mod analysis;
pub mod channels;
pub mod config;
pub mod coupling;
pub mod effective;
pub mod error;
pub mod geometry;
pub mod interior;
pub mod kernels;
pub mod runner;
pub mod smatrix;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Convenience constructor for complex scalars.
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}
