//! Assembly of the finite-rank interaction matrix that couples retained
//! interior modes to retained cross-section channels, together with its
//! transpose and conjugate variants.
//!
//! Rows index interior modes, columns index channels, and entry (n, lambda)
//! is `quarter_power(k, sigma_lambda^2) * c[n][lambda]` where `c` is the real
//! boundary-trace coefficient. For real k the open-channel columns are real
//! and the evanescent columns carry argument pi/4 (mod pi).

use num_complex::Complex64;

use crate::channels::{channel_momentum, quarter_power, ChannelBasis, ChannelMomentum, Regime};
use crate::error::{Error, Result};
use crate::interior::InteriorSpectrum;
use crate::kernels::ComplexMatrix;

/// Truncation rule for interior modes or channels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cutoff {
    /// Keep everything the spectrum or basis materialized.
    All,
    /// Keep entries whose eigenvalue (tau^2 or sigma^2) is at most the bound.
    Energy(f64),
}

impl Cutoff {
    fn admits(self, value: f64) -> bool {
        match self {
            Cutoff::All => true,
            Cutoff::Energy(e) => value <= e,
        }
    }
}

/// Which factor multiplies the resolvent on the left and which outer product
/// enters the effective Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// Plain transpose. This is the combination that stays consistent when
    /// evanescent channels are retained.
    Transpose,
    /// Conjugate transpose, kept for comparison runs: it yields a unitary
    /// matrix on the full retained channel set but distorts the physical
    /// open-channel block.
    Conjugate,
}

/// Finite-rank interaction matrix between retained interior modes (rows) and
/// retained channels (columns), frozen at a single real wavenumber.
#[derive(Debug, Clone)]
pub struct CouplingMatrix {
    matrix: ComplexMatrix,
    retained_modes: Vec<usize>,
    retained_channels: Vec<usize>,
    tau_sq: Vec<f64>,
    sigma_sq: Vec<f64>,
    momenta: Vec<ChannelMomentum>,
    variant: Variant,
    k: f64,
    lambda_at_most_k_sq: bool,
    cut_open_channel: Option<(usize, f64)>,
}

impl CouplingMatrix {
    /// Entries, rows = retained modes, cols = retained channels.
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Indices of the retained interior modes in the source spectrum.
    pub fn retained_modes(&self) -> &[usize] {
        &self.retained_modes
    }

    /// Indices of the retained channels in the source basis.
    pub fn retained_channels(&self) -> &[usize] {
        &self.retained_channels
    }

    /// Interior eigenvalues of the retained modes, ascending.
    pub fn tau_sq(&self) -> &[f64] {
        &self.tau_sq
    }

    /// Channel thresholds of the retained channels, ascending.
    pub fn sigma_sq(&self) -> &[f64] {
        &self.sigma_sq
    }

    /// Channel momenta of the retained channels at the assembly wavenumber.
    pub fn momenta(&self) -> &[ChannelMomentum] {
        &self.momenta
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    /// Wavenumber the matrix was assembled at.
    pub fn k(&self) -> f64 {
        self.k
    }

    /// True when the channel cutoff does not exceed k^2, the regime the
    /// truncation error bound excludes.
    pub fn lambda_at_most_k_sq(&self) -> bool {
        self.lambda_at_most_k_sq
    }

    /// First open channel of the source basis the channel cutoff dropped,
    /// as (basis index, sigma^2), if any. Projection onto open channels is
    /// meaningless while this is set.
    pub fn cut_open_channel(&self) -> Option<(usize, f64)> {
        self.cut_open_channel
    }

    /// Number of retained interior modes.
    pub fn mode_count(&self) -> usize {
        self.matrix.rows()
    }

    /// Number of retained channels.
    pub fn channel_count(&self) -> usize {
        self.matrix.cols()
    }

    /// Local column indices of the open channels.
    pub fn open_columns(&self) -> Vec<usize> {
        self.momenta
            .iter()
            .enumerate()
            .filter(|(_, m)| m.regime == Regime::Open)
            .map(|(j, _)| j)
            .collect()
    }

    /// Same matrix tagged with a different formula variant.
    pub fn with_variant(mut self, variant: Variant) -> Self {
        self.variant = variant;
        self
    }

    /// Same shape and bookkeeping with every entry set to zero; the
    /// decoupled limit used by tests.
    #[cfg(test)]
    pub(crate) fn zeroed(mut self) -> Self {
        self.matrix = ComplexMatrix::zeros(self.matrix.rows(), self.matrix.cols());
        self
    }

    /// The factor that multiplies the resolvent from the left: the plain
    /// transpose for `Variant::Transpose`, the conjugate transpose for
    /// `Variant::Conjugate`.
    pub fn variant_factor(&self) -> ComplexMatrix {
        match self.variant {
            Variant::Transpose => transpose_w(self),
            Variant::Conjugate => adjoint_w(self),
        }
    }
}

/// Assemble the interaction matrix at real wavenumber `k`, keeping interior
/// modes with tau^2 admitted by `n_cutoff` and channels with sigma^2 admitted
/// by `lambda_cutoff`. `eps` is the threshold guard half-width on |k^2 -
/// sigma^2|.
pub fn assemble_w(
    spectrum: &InteriorSpectrum,
    basis: &ChannelBasis,
    k: f64,
    n_cutoff: Cutoff,
    lambda_cutoff: Cutoff,
    eps: f64,
) -> Result<CouplingMatrix> {
    let retained_modes: Vec<usize> = (0..spectrum.len())
        .filter(|&n| n_cutoff.admits(spectrum.tau_sq()[n]))
        .collect();
    if retained_modes.is_empty() {
        return Err(Error::EmptyTruncation {
            what: "interior modes",
        });
    }
    let retained_channels: Vec<usize> = (0..basis.len())
        .filter(|&l| lambda_cutoff.admits(basis.sigma_sq()[l]))
        .collect();
    if retained_channels.is_empty() {
        return Err(Error::EmptyTruncation { what: "channels" });
    }

    let kc = Complex64::new(k, 0.0);
    let mut momenta = Vec::with_capacity(retained_channels.len());
    let mut quarters = Vec::with_capacity(retained_channels.len());
    for &l in &retained_channels {
        let s = basis.sigma_sq()[l];
        momenta.push(channel_momentum(kc, s, eps)?);
        quarters.push(quarter_power(kc, s, eps)?);
    }

    let matrix = ComplexMatrix::from_fn(retained_modes.len(), retained_channels.len(), |i, j| {
        quarters[j] * spectrum.trace(retained_modes[i], retained_channels[j])
    });

    let lambda_at_most_k_sq = match lambda_cutoff {
        Cutoff::Energy(e) => e <= k * k,
        Cutoff::All => false,
    };
    let cut_open_channel = basis
        .sigma_sq()
        .iter()
        .enumerate()
        .find(|&(_, &s)| s < k * k && !lambda_cutoff.admits(s))
        .map(|(l, &s)| (l, s));

    let tau_sq = retained_modes
        .iter()
        .map(|&n| spectrum.tau_sq()[n])
        .collect();
    let sigma_sq = retained_channels
        .iter()
        .map(|&l| basis.sigma_sq()[l])
        .collect();

    Ok(CouplingMatrix {
        matrix,
        retained_modes,
        retained_channels,
        tau_sq,
        sigma_sq,
        momenta,
        variant: Variant::Transpose,
        k,
        lambda_at_most_k_sq,
        cut_open_channel,
    })
}

/// Plain (unconjugated) transpose, channels by modes.
pub fn transpose_w(w: &CouplingMatrix) -> ComplexMatrix {
    w.matrix.transpose()
}

/// Conjugate transpose, channels by modes.
pub fn adjoint_w(w: &CouplingMatrix) -> ComplexMatrix {
    w.matrix.adjoint()
}
