//! Interior spectral providers: Neumann eigenvalues tau_n^2 together with the
//! boundary-trace coefficients c[n][lambda], the only functionals of the
//! interior eigenfunctions the scattering formula ever uses.
//!
//! Three providers exist. `example1d_spectrum` is the closed-form interval
//! (-pi, 0). `rect2d_spectrum` is the separable rectangle, where traces are
//! channel-diagonal and everything stays analytic. `fd2d_spectrum`
//! discretizes the rectangle with a five-point stencil so a potential bump
//! can mix channels; its eigenvectors are normalized in the grid-weighted
//! inner product so the coupling algebra holds exactly at the discrete level.

use crate::channels::{ChannelBasis, ChannelKind};
use crate::error::{Error, Result};
use crate::geometry::Bump;
use crate::kernels::{self, RealMatrix};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridMeta {
    pub nx: usize,
    pub ny: usize,
    pub hx: f64,
    pub hy: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SpectrumKind {
    Example1d,
    Rect2d,
    Fd2d(GridMeta),
}

/// Interior eigendata: ascending tau^2 plus the trace matrix c with one row
/// per interior mode and one column per cross-section channel.
#[derive(Clone, Debug)]
pub struct InteriorSpectrum {
    pub kind: SpectrumKind,
    tau_sq: Vec<f64>,
    traces: RealMatrix,
}

impl InteriorSpectrum {
    pub fn len(&self) -> usize {
        self.tau_sq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tau_sq.is_empty()
    }

    pub fn tau_sq(&self) -> &[f64] {
        &self.tau_sq
    }

    pub fn traces(&self) -> &RealMatrix {
        &self.traces
    }

    pub fn channel_count(&self) -> usize {
        self.traces.cols()
    }

    /// Trace coefficient, treating channels beyond the materialized columns
    /// as uncoupled. For the analytic providers that extension is exact:
    /// a channel above the materialization cutoff meets no retained mode.
    pub fn trace(&self, n: usize, lambda: usize) -> f64 {
        if lambda < self.traces.cols() {
            self.traces[(n, lambda)]
        } else {
            0.0
        }
    }
}

/// The 1D interval (-pi, 0): tau_n = n with Psi_0 = pi^{-1/2} and
/// Psi_n(x) = (2/pi)^{1/2} cos(n x), so every trace is Psi_n(0).
pub fn example1d_spectrum(n_modes: usize) -> Result<InteriorSpectrum> {
    if n_modes == 0 {
        return Err(Error::ConfigError(
            "example1d spectrum needs at least one mode".into(),
        ));
    }
    let pi = std::f64::consts::PI;
    let tau_sq = (0..n_modes).map(|n| (n * n) as f64).collect();
    let traces = RealMatrix::from_fn(n_modes, 1, |n, _| {
        if n == 0 {
            1.0 / pi.sqrt()
        } else {
            (2.0 / pi).sqrt()
        }
    });
    Ok(InteriorSpectrum {
        kind: SpectrumKind::Example1d,
        tau_sq,
        traces,
    })
}

/// Separable rectangle (-L, 0) x (0, a): modes cos(m pi x / L) cos(j pi y / a)
/// normalized on the rectangle, materialized up to tau^2 <= energy_cutoff.
/// The trace of mode (m, j) against channel lambda is delta_{j lambda} times
/// the x-factor at x = 0, so the trace matrix is channel-diagonal.
pub fn rect2d_spectrum(length: f64, width: f64, energy_cutoff: f64) -> Result<InteriorSpectrum> {
    if !(length > 0.0) || !(width > 0.0) {
        return Err(Error::ConfigError(format!(
            "rectangle dimensions must be positive, got L={length}, a={width}"
        )));
    }
    if !(energy_cutoff >= 0.0) {
        return Err(Error::ConfigError(format!(
            "energy cutoff must be nonnegative, got {energy_cutoff}"
        )));
    }
    let pi = std::f64::consts::PI;
    let mut modes: Vec<(f64, usize, usize)> = Vec::new();
    for m in 0.. {
        let ex = (m as f64 * pi / length).powi(2);
        if ex > energy_cutoff {
            break;
        }
        for j in 0.. {
            let t = ex + (j as f64 * pi / width).powi(2);
            if t > energy_cutoff {
                break;
            }
            modes.push((t, m, j));
        }
    }
    // Ascending tau^2; exact ties (e.g. (m,j) vs (j,m) on a square) are broken
    // by the mode indices so the ordering is reproducible.
    modes.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .expect("finite eigenvalues")
            .then(a.1.cmp(&b.1))
            .then(a.2.cmp(&b.2))
    });
    let n_channels = modes.iter().map(|&(_, _, j)| j + 1).max().unwrap_or(1);
    let tau_sq: Vec<f64> = modes.iter().map(|&(t, _, _)| t).collect();
    let traces = RealMatrix::from_fn(modes.len(), n_channels, |n, lambda| {
        let (_, m, j) = modes[n];
        if j == lambda {
            if m == 0 {
                (1.0 / length).sqrt()
            } else {
                (2.0 / length).sqrt()
            }
        } else {
            0.0
        }
    });
    Ok(InteriorSpectrum {
        kind: SpectrumKind::Rect2d,
        tau_sq,
        traces,
    })
}

/// Five-point finite-difference rectangle with Gaussian potential bumps.
///
/// Cell-centered grid x_i = -L + (i+1/2)hx, y_j = (j+1/2)hy with mirror
/// (ghost-point) Neumann walls, which keeps the matrix exactly symmetric.
/// Eigenvectors are normalized against the weight hx*hy; traces pair the
/// boundary column (the cells nearest x = 0) with the discrete cross-section
/// modes of `basis` under the weight hy.
pub fn fd2d_spectrum(
    nx: usize,
    ny: usize,
    length: f64,
    width: f64,
    bumps: &[Bump],
    basis: &ChannelBasis,
) -> Result<InteriorSpectrum> {
    if nx < 4 || ny < 4 {
        return Err(Error::ConfigError(format!(
            "fd2d grid must be at least 4x4, got {nx}x{ny}"
        )));
    }
    if !(length > 0.0) || !(width > 0.0) {
        return Err(Error::ConfigError(format!(
            "rectangle dimensions must be positive, got L={length}, a={width}"
        )));
    }
    match basis.kind {
        ChannelKind::DiscreteInterval { width: bw, ny: bny } if bny == ny && bw == width => {}
        _ => {
            return Err(Error::DimensionMismatch {
                context: "fd2d_spectrum",
                left: format!("grid ny={ny}, width={width}"),
                right: format!("channel basis {:?}", basis.kind),
            })
        }
    }
    let phi = basis
        .vectors()
        .expect("discrete channel bases carry eigenvectors");

    let hx = length / nx as f64;
    let hy = width / ny as f64;
    let sx = 1.0 / (hx * hx);
    let sy = 1.0 / (hy * hy);
    let n = nx * ny;
    let idx = |i: usize, j: usize| i * ny + j;

    let mut a = RealMatrix::zeros(n, n);
    for i in 0..nx {
        let x = -length + (i as f64 + 0.5) * hx;
        for j in 0..ny {
            let y = (j as f64 + 0.5) * hy;
            let p = idx(i, j);
            let mut diag = 0.0;
            // x-direction stencil; a mirrored ghost cell at a wall simply
            // removes that neighbor's contribution from the diagonal.
            if i > 0 {
                diag += sx;
                a[(p, idx(i - 1, j))] = -sx;
            }
            if i < nx - 1 {
                diag += sx;
                a[(p, idx(i + 1, j))] = -sx;
            }
            if j > 0 {
                diag += sy;
                a[(p, idx(i, j - 1))] = -sy;
            }
            if j < ny - 1 {
                diag += sy;
                a[(p, idx(i, j + 1))] = -sy;
            }
            let v: f64 = bumps.iter().map(|b| b.eval(x, y)).sum();
            a[(p, p)] = diag + v;
        }
    }

    let eig = kernels::eig_sym(&a)?;
    let mut tau_sq = eig.values;
    // The operator is positive semidefinite (Laplacian plus nonnegative V);
    // rounding may leave the bottom eigenvalue a hair below zero.
    let floor = -1e-9 * a.max_abs().max(1.0);
    for t in tau_sq.iter_mut() {
        if *t < 0.0 {
            assert!(*t > floor, "spectrum unexpectedly negative: {t}");
            *t = 0.0;
        }
    }

    // c[n][lambda] = hy * sum_j Psi_n(boundary, j) phi_lambda(j) with
    // Psi_n = v_n / sqrt(hx hy) and phi_lambda = w_lambda / sqrt(hy), which
    // collapses to the plain dot product of unit vectors over sqrt(hx).
    let inv_sqrt_hx = 1.0 / hx.sqrt();
    let boundary = idx(nx - 1, 0);
    let traces = RealMatrix::from_fn(n, ny, |mode, lambda| {
        let mut dot = 0.0;
        for j in 0..ny {
            dot += eig.vectors[(boundary + j, mode)] * phi[(j, lambda)];
        }
        dot * inv_sqrt_hx
    });

    Ok(InteriorSpectrum {
        kind: SpectrumKind::Fd2d(GridMeta { nx, ny, hx, hy }),
        tau_sq,
        traces,
    })
}
