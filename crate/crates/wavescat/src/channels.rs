//! Cross-section spectral data and channel kinematics: eigenvalues sigma^2,
//! channel momenta k_lambda = sqrt(k^2 - sigma^2) with Im k_lambda >= 0, the
//! quarter-power coupling weights sqrt(k_lambda), and the open-channel index
//! set that the projected scattering matrix lives on.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::Geometry;
use crate::kernels::{self, RealMatrix};

/// Excluded neighborhood of a channel threshold, measured on |k^2 - sigma^2|.
pub const DEFAULT_THRESHOLD_EPS: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    Open,
    Evanescent,
}

/// k_lambda on the physical sheet. For real k the value is either real
/// positive (open) or purely imaginary with positive imaginary part
/// (evanescent); the branch is continuous on the open upper half k-plane.
#[derive(Clone, Copy, Debug)]
pub struct ChannelMomentum {
    pub value: Complex64,
    pub regime: Regime,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ChannelKind {
    /// Point cross-section: the single constant channel.
    Point,
    /// Interval of the given width with Neumann ends; cosine channels.
    IntervalNeumann { width: f64 },
    /// Finite-difference interval: ny grid modes from the discrete eigenproblem.
    DiscreteInterval { width: f64, ny: usize },
}

/// Cross-section eigendata. Eigenvalues ascend; discrete bases also carry the
/// orthonormal eigenvector table used for boundary-trace overlaps.
#[derive(Clone, Debug)]
pub struct ChannelBasis {
    pub kind: ChannelKind,
    sigma_sq: Vec<f64>,
    vectors: Option<RealMatrix>,
}

impl ChannelBasis {
    pub fn len(&self) -> usize {
        self.sigma_sq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigma_sq.is_empty()
    }

    pub fn sigma_sq(&self) -> &[f64] {
        &self.sigma_sq
    }

    /// Unit-norm discrete eigenvectors (column lambda), present for
    /// `DiscreteInterval` bases only.
    pub fn vectors(&self) -> Option<&RealMatrix> {
        self.vectors.as_ref()
    }

    /// Analytic interval basis truncated to a channel count, mostly a test
    /// convenience; `build_channel_basis` truncates by energy instead.
    pub fn interval_with_count(width: f64, count: usize) -> Result<Self> {
        if !(width > 0.0) {
            return Err(Error::ConfigError(format!(
                "cross-section width must be positive, got {width}"
            )));
        }
        let sigma_sq = (0..count)
            .map(|l| {
                let s = l as f64 * std::f64::consts::PI / width;
                s * s
            })
            .collect();
        Ok(ChannelBasis {
            kind: ChannelKind::IntervalNeumann { width },
            sigma_sq,
            vectors: None,
        })
    }
}

/// Channel momentum k_lambda = sqrt(k^2 - sigma^2), branch with
/// Im k_lambda >= 0. Real inputs stay exactly on the real or imaginary axis.
pub fn channel_momentum(k: Complex64, sigma_sq: f64, eps: f64) -> Result<ChannelMomentum> {
    if k.im < 0.0 {
        return Err(Error::NonPhysicalSheet { im_k: k.im });
    }
    let z = k * k - sigma_sq;
    let gap = z.norm();
    if gap < eps {
        return Err(Error::ThresholdError { sigma_sq, gap, eps });
    }
    let value = if z.im == 0.0 {
        if z.re >= 0.0 {
            Complex64::new(z.re.sqrt(), 0.0)
        } else {
            Complex64::new(0.0, (-z.re).sqrt())
        }
    } else {
        let s = z.sqrt();
        if s.im < 0.0 {
            -s
        } else {
            s
        }
    };
    let regime = if z.im == 0.0 && z.re > 0.0 {
        Regime::Open
    } else {
        Regime::Evanescent
    };
    Ok(ChannelMomentum { value, regime })
}

/// sqrt(k_lambda) on the principal branch, so arg lies in [0, pi/2]; open
/// channels give a positive real weight, evanescent ones argument pi/4.
pub fn quarter_power(k: Complex64, sigma_sq: f64, eps: f64) -> Result<Complex64> {
    let m = channel_momentum(k, sigma_sq, eps)?;
    let v = m.value;
    let q = if v.im == 0.0 && v.re >= 0.0 {
        Complex64::new(v.re.sqrt(), 0.0)
    } else if v.re == 0.0 && v.im > 0.0 {
        // Exact argument pi/4 for the purely evanescent case.
        let s = v.im.sqrt() * std::f64::consts::FRAC_1_SQRT_2;
        Complex64::new(s, s)
    } else {
        v.sqrt()
    };
    Ok(q)
}

/// Indices of open channels (sigma^2 < k^2) for real k; errors out if any
/// channel sits within eps of its threshold.
pub fn open_projector(k: f64, basis: &ChannelBasis, eps: f64) -> Result<Vec<usize>> {
    let k_sq = k * k;
    let mut open = Vec::new();
    for (idx, &s) in basis.sigma_sq.iter().enumerate() {
        let gap = (k_sq - s).abs();
        if gap < eps {
            return Err(Error::ThresholdError {
                sigma_sq: s,
                gap,
                eps,
            });
        }
        if s < k_sq {
            open.push(idx);
        }
    }
    Ok(open)
}

/// Cross-section basis for a geometry. Analytic interval bases materialize
/// channels with sigma^2 <= sigma_sq_cap; point and discrete bases are finite
/// and ignore the cap.
pub fn build_channel_basis(geometry: &Geometry, sigma_sq_cap: f64) -> Result<ChannelBasis> {
    geometry.validate()?;
    match geometry {
        Geometry::Example1d => Ok(ChannelBasis {
            kind: ChannelKind::Point,
            sigma_sq: vec![0.0],
            vectors: None,
        }),
        Geometry::Rect2d { width, .. } => {
            // The constant channel is always present; higher cosines enter
            // while their eigenvalue stays under the cap.
            let mut sigma_sq = vec![0.0];
            for l in 1.. {
                let s = l as f64 * std::f64::consts::PI / width;
                if s * s > sigma_sq_cap {
                    break;
                }
                sigma_sq.push(s * s);
            }
            Ok(ChannelBasis {
                kind: ChannelKind::IntervalNeumann { width: *width },
                sigma_sq,
                vectors: None,
            })
        }
        Geometry::Fd2d { width, ny, .. } => {
            let basis = discrete_interval_basis(*width, *ny)?;
            Ok(basis)
        }
    }
}

/// Eigenpairs of the 1D finite-difference Neumann Laplacian on ny cells of
/// width h = width/ny (mirror boundary stencil, so the matrix is exactly
/// symmetric). Eigenvectors have unit Euclidean norm.
pub fn discrete_interval_basis(width: f64, ny: usize) -> Result<ChannelBasis> {
    if ny < 2 {
        return Err(Error::ConfigError(format!(
            "cross-section grid must have at least 2 cells, got {ny}"
        )));
    }
    let h = width / ny as f64;
    let s = 1.0 / (h * h);
    let a = RealMatrix::from_fn(ny, ny, |i, j| {
        if i == j {
            if i == 0 || i == ny - 1 {
                s
            } else {
                2.0 * s
            }
        } else if i.abs_diff(j) == 1 {
            -s
        } else {
            0.0
        }
    });
    let eig = kernels::eig_sym(&a)?;
    Ok(ChannelBasis {
        kind: ChannelKind::DiscreteInterval { width, ny },
        sigma_sq: eig.values,
        vectors: Some(eig.vectors),
    })
}
