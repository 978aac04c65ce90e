//! Assembly of the scattering matrix over the retained channels, its
//! restriction to the open channels, and the unitarity and symmetry
//! diagnostics.
//!
//! The full matrix is `-(I - 2i F (k^2 - H)^{-1} W)` with `F` the transpose
//! or conjugate transpose of `W` according to the variant; only the
//! open-channel restriction of the transpose variant is unitary once
//! evanescent channels are retained.

use num_complex::Complex64;

use crate::coupling::Variant;
use crate::effective::{resolvent_apply, EffectiveHamiltonian, ResolventMethod};
use crate::error::{Error, Result};
use crate::kernels::ComplexMatrix;

/// Scattering matrix over the retained channels together with its
/// open-channel restriction and standing diagnostics.
#[derive(Debug, Clone)]
pub struct ScatteringResult {
    /// Matrix over all retained channels, ordered by ascending sigma^2.
    pub s_full: ComplexMatrix,
    /// Principal submatrix over the open channels.
    pub s_open: ComplexMatrix,
    /// Local (retained-set) column indices of the open channels.
    pub open_columns: Vec<usize>,
    /// Channel thresholds of the retained channels.
    pub sigma_sq: Vec<f64>,
    pub variant: Variant,
    pub k: f64,
    /// ||S_open S_open^dagger - I||_F.
    pub unitarity_defect_open: f64,
    /// ||S_full S_full^dagger - I||_F.
    pub unitarity_defect_full: f64,
    /// ||S_full - S_full^t||_F.
    pub symmetry_defect_full: f64,
}

/// `-(I - 2i F (k^2 - H)^{-1} W)` over the retained channels, with the
/// resolvent applied to the columns of `W` by the requested method.
pub fn full_smatrix(
    h: &EffectiveHamiltonian,
    k: f64,
    method: ResolventMethod,
) -> Result<ComplexMatrix> {
    let w = h.coupling();
    let x = resolvent_apply(h, k, w.matrix(), method)?;
    let sandwich = w.variant_factor().mul(&x);
    let r = sandwich.rows();
    let s = ComplexMatrix::from_fn(r, r, |i, j| {
        let id = if i == j {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        };
        -(id - Complex64::new(0.0, 2.0) * sandwich[(i, j)])
    });
    Ok(s)
}

/// Principal submatrix of `s_full` on the open channels. `open` holds local
/// column indices into the retained channel set.
pub fn projected_smatrix(s_full: &ComplexMatrix, open: &[usize]) -> Result<ComplexMatrix> {
    for &j in open {
        if j >= s_full.cols() {
            return Err(Error::IndexError {
                row: j,
                col: j,
                rows: s_full.rows(),
                cols: s_full.cols(),
            });
        }
    }
    Ok(ComplexMatrix::from_fn(open.len(), open.len(), |i, j| {
        s_full[(open[i], open[j])]
    }))
}

/// `||S S^dagger - I||_F`.
pub fn unitarity_defect(s: &ComplexMatrix) -> f64 {
    let mut product = s.mul(&s.adjoint());
    let n = product.rows();
    for i in 0..n {
        product[(i, i)] -= 1.0;
    }
    product.fro_norm()
}

/// `||S - S^t||_F`.
pub fn symmetry_defect(s: &ComplexMatrix) -> f64 {
    s.sub(&s.transpose()).fro_norm()
}

/// Matrix entry in the retained-channel ordering.
pub fn entry(s: &ComplexMatrix, lambda: usize, lambda_prime: usize) -> Result<Complex64> {
    if lambda >= s.rows() || lambda_prime >= s.cols() {
        return Err(Error::IndexError {
            row: lambda,
            col: lambda_prime,
            rows: s.rows(),
            cols: s.cols(),
        });
    }
    Ok(s[(lambda, lambda_prime)])
}

/// Assemble the full matrix, verify that every open channel survived the
/// truncation, restrict, and attach the three defect diagnostics.
pub fn scattering_result(
    h: &EffectiveHamiltonian,
    k: f64,
    method: ResolventMethod,
) -> Result<ScatteringResult> {
    let w = h.coupling();
    // An open channel whose sigma^2 exceeded the channel cutoff never made
    // it into the retained set; the restriction would silently lose it.
    if let Some((index, sigma_sq)) = w.cut_open_channel() {
        let cutoff = w.sigma_sq().last().copied().unwrap_or(0.0);
        return Err(Error::OpenChannelsTruncated {
            index,
            sigma_sq,
            cutoff,
        });
    }
    let s_full = full_smatrix(h, k, method)?;
    let open = w.open_columns();
    let s_open = projected_smatrix(&s_full, &open)?;
    Ok(ScatteringResult {
        unitarity_defect_open: unitarity_defect(&s_open),
        unitarity_defect_full: unitarity_defect(&s_full),
        symmetry_defect_full: symmetry_defect(&s_full),
        open_columns: open,
        sigma_sq: w.sigma_sq().to_vec(),
        variant: h.variant(),
        k,
        s_full,
        s_open,
    })
}
