//! Convergence and validation harness: scenario plumbing that caches a
//! geometry's spectrum and channel basis, wavenumber sweeps, truncation
//! studies with rate fits, and the separable-rectangle reference.

use num_complex::Complex64;

use crate::channels::{build_channel_basis, channel_momentum, ChannelBasis, Regime};
use crate::coupling::{assemble_w, Cutoff, Variant};
use crate::effective::{build_heff, ResolventMethod};
use crate::error::{Error, Result};
use crate::geometry::Geometry;
use crate::interior::{example1d_spectrum, fd2d_spectrum, rect2d_spectrum, InteriorSpectrum};
use crate::kernels::{fit_linear, fit_loglog, LineFit};
use crate::smatrix::{scattering_result, ScatteringResult};

/// A geometry with its interior spectrum and channel basis materialized
/// once; every scattering evaluation reuses them.
#[derive(Debug, Clone)]
pub struct Scenario {
    geometry: Geometry,
    spectrum: InteriorSpectrum,
    basis: ChannelBasis,
    eps: f64,
}

impl Scenario {
    /// Materialize interior modes and channels with eigenvalues up to
    /// `energy_cap` (discrete geometries materialize everything their grids
    /// carry). The cap must cover every cutoff used later.
    pub fn new(geometry: Geometry, energy_cap: f64, eps: f64) -> Result<Self> {
        geometry.validate()?;
        let basis = build_channel_basis(&geometry, energy_cap)?;
        let spectrum = match &geometry {
            Geometry::Example1d => {
                let n_modes = energy_cap.max(0.0).sqrt().floor() as usize + 1;
                example1d_spectrum(n_modes)?
            }
            Geometry::Rect2d { length, width } => rect2d_spectrum(*length, *width, energy_cap)?,
            Geometry::Fd2d {
                length,
                width,
                nx,
                ny,
                bumps,
            } => fd2d_spectrum(*nx, *ny, *length, *width, bumps, &basis)?,
        };
        Ok(Scenario {
            geometry,
            spectrum,
            basis,
            eps,
        })
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn spectrum(&self) -> &InteriorSpectrum {
        &self.spectrum
    }

    pub fn basis(&self) -> &ChannelBasis {
        &self.basis
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Number of open channels at wavenumber `k`.
    pub fn open_count(&self, k: f64) -> usize {
        self.basis.sigma_sq().iter().filter(|&&s| s < k * k).count()
    }

    /// Assemble, build the Hamiltonian, and scatter at one wavenumber.
    pub fn smatrix_at(
        &self,
        k: f64,
        n_cutoff: Cutoff,
        lambda_cutoff: Cutoff,
        variant: Variant,
        method: ResolventMethod,
    ) -> Result<ScatteringResult> {
        let w = assemble_w(
            &self.spectrum,
            &self.basis,
            k,
            n_cutoff,
            lambda_cutoff,
            self.eps,
        )?;
        let tau_sq = w.tau_sq().to_vec();
        let h = build_heff(&tau_sq, w, variant)?;
        scattering_result(&h, k, method)
    }
}

/// A truncation study: one error per control value, against a declared
/// reference, with an optional fitted line.
#[derive(Debug, Clone)]
pub struct ConvergenceRecord {
    /// Control parameter values, ascending.
    pub control: Vec<f64>,
    /// Nonnegative errors aligned with `control`.
    pub errors: Vec<f64>,
    /// Fitted line over the transformed coordinates described by
    /// `fit_coords`, present only when the data spans enough range.
    pub fit: Option<LineFit>,
    /// What the fitted line's coordinates are, e.g. "log error vs log M".
    pub fit_coords: &'static str,
    /// What the errors are measured against.
    pub reference: String,
}

/// Fit only when at least 4 points span at least a factor of 8 in the
/// control parameter and every error is positive. The control gates the
/// fit; the `points` carry the (possibly transformed) fit abscissa.
fn fit_when_meaningful(
    control: &[f64],
    points: &[(f64, f64)],
    log_abscissa: bool,
) -> Result<Option<LineFit>> {
    if points.len() < 4 {
        return Ok(None);
    }
    let lo = control.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = control.iter().copied().fold(0.0_f64, f64::max);
    if !(hi >= 8.0 * lo) {
        return Ok(None);
    }
    if points.iter().any(|&(_, e)| e <= 0.0) {
        return Ok(None);
    }
    let fit = if log_abscissa {
        fit_loglog(points)?
    } else {
        let transformed: Vec<(f64, f64)> = points.iter().map(|&(x, e)| (x, e.ln())).collect();
        fit_linear(&transformed)?
    };
    Ok(Some(fit))
}

/// Error of the 1D pipeline against the exact coefficient `e^{2 pi i k}` for
/// each mode count in `m_list`, with a log-log fit and a first-order bracket
/// check: every M * error must lie within a factor 2 of the list median.
pub fn compare_exact_1d(k: f64, m_list: &[usize]) -> Result<ConvergenceRecord> {
    if (k - k.round()).abs() < 1e-10 {
        return Err(Error::IntegerK { k });
    }
    let mut ms: Vec<usize> = m_list.to_vec();
    ms.sort_unstable();
    ms.dedup();
    if ms.is_empty() {
        return Err(Error::InsufficientData { got: 0 });
    }
    for &m in &ms {
        if (m as f64) <= k.abs() {
            return Err(Error::RangeError {
                key: "M".into(),
                value: m.to_string(),
                why: format!("every M must exceed |k| = {}", k.abs()),
            });
        }
    }
    let max_m = *ms.last().unwrap();
    let scenario = Scenario::new(
        Geometry::Example1d,
        (max_m * max_m) as f64,
        crate::channels::DEFAULT_THRESHOLD_EPS,
    )?;
    let exact = Complex64::new(0.0, 2.0 * std::f64::consts::PI * k).exp();
    let mut control = Vec::with_capacity(ms.len());
    let mut errors = Vec::with_capacity(ms.len());
    for &m in &ms {
        let result = scenario.smatrix_at(
            k,
            Cutoff::Energy((m * m) as f64),
            Cutoff::All,
            Variant::Transpose,
            ResolventMethod::Auto,
        )?;
        let s = result.s_open[(0, 0)];
        control.push(m as f64);
        errors.push((s - exact).norm());
    }

    // First-order bracket: M * error should be flat up to a factor of 2.
    let mut products: Vec<f64> = control.iter().zip(&errors).map(|(&m, &e)| m * e).collect();
    let mut sorted = products.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = sorted[sorted.len() / 2];
    for (i, &p) in products.iter().enumerate() {
        if !(p >= 0.5 * median && p <= 2.0 * median) {
            return Err(Error::RateBracket {
                control: control[i],
                product: p,
                median,
            });
        }
    }
    products.clear();

    let points: Vec<(f64, f64)> = control
        .iter()
        .copied()
        .zip(errors.iter().copied())
        .collect();
    let fit = fit_when_meaningful(&control, &points, true)?;
    Ok(ConvergenceRecord {
        control,
        errors,
        fit,
        fit_coords: "log error vs log M",
        reference: format!("exact coefficient e^(2 pi i k) at k = {k}"),
    })
}

fn require_lambda_above(k: f64, lambda: Cutoff) -> Result<()> {
    if let Cutoff::Energy(e) = lambda {
        if e <= k * k {
            return Err(Error::LambdaBelowThreshold {
                cutoff: e,
                k_sq: k * k,
            });
        }
    }
    Ok(())
}

/// Projected-matrix error against the largest interior cutoff in the list,
/// holding the channel cutoff fixed.
pub fn converge_n(
    scenario: &Scenario,
    k: f64,
    lambda: Cutoff,
    n_list: &[f64],
    variant: Variant,
    method: ResolventMethod,
) -> Result<ConvergenceRecord> {
    require_lambda_above(k, lambda)?;
    let mut ns: Vec<f64> = n_list.to_vec();
    ns.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ns.dedup();
    if ns.len() < 2 {
        return Err(Error::InsufficientData { got: ns.len() });
    }
    let reference_n = *ns.last().unwrap();
    let reference = scenario.smatrix_at(k, Cutoff::Energy(reference_n), lambda, variant, method)?;
    let mut control = Vec::new();
    let mut errors = Vec::new();
    for &n in &ns[..ns.len() - 1] {
        let result = scenario.smatrix_at(k, Cutoff::Energy(n), lambda, variant, method)?;
        control.push(n);
        errors.push(result.s_open.sub(&reference.s_open).fro_norm());
    }
    let points: Vec<(f64, f64)> = control
        .iter()
        .copied()
        .zip(errors.iter().copied())
        .collect();
    let fit = fit_when_meaningful(&control, &points, true)?;
    Ok(ConvergenceRecord {
        control,
        errors,
        fit,
        fit_coords: "log error vs log N",
        reference: format!("projected matrix at interior cutoff N = {reference_n}"),
    })
}

/// Projected-matrix error against the largest channel cutoff in the list,
/// holding the interior cutoff fixed. The fit abscissa is sqrt(Lambda - k^2),
/// the decay driver of the evanescent tail.
pub fn converge_lambda(
    scenario: &Scenario,
    k: f64,
    n: Cutoff,
    lambda_list: &[f64],
    variant: Variant,
    method: ResolventMethod,
) -> Result<ConvergenceRecord> {
    let mut lambdas: Vec<f64> = lambda_list.to_vec();
    lambdas.sort_by(|a, b| a.partial_cmp(b).unwrap());
    lambdas.dedup();
    if lambdas.len() < 2 {
        return Err(Error::InsufficientData { got: lambdas.len() });
    }
    for &l in &lambdas {
        require_lambda_above(k, Cutoff::Energy(l))?;
    }
    let reference_lambda = *lambdas.last().unwrap();
    let reference = scenario.smatrix_at(k, n, Cutoff::Energy(reference_lambda), variant, method)?;
    let mut control = Vec::new();
    let mut errors = Vec::new();
    for &l in &lambdas[..lambdas.len() - 1] {
        let result = scenario.smatrix_at(k, n, Cutoff::Energy(l), variant, method)?;
        control.push(l);
        errors.push(result.s_open.sub(&reference.s_open).fro_norm());
    }
    // ln(error) against sqrt(Lambda - k^2).
    let points: Vec<(f64, f64)> = control
        .iter()
        .zip(&errors)
        .map(|(&l, &e)| ((l - k * k).sqrt(), e))
        .collect();
    let fit = fit_when_meaningful(&control, &points, false)?;
    Ok(ConvergenceRecord {
        control,
        errors,
        fit,
        fit_coords: "log error vs sqrt(Lambda - k^2)",
        reference: format!("projected matrix at channel cutoff Lambda = {reference_lambda}"),
    })
}

/// Open-channel reflection coefficients of the flat rectangle: the matrix is
/// diagonal with entries `e^{2 i k_lambda L}` (round trip to the Neumann back
/// wall), one per open channel.
pub fn rect2d_reference(length: f64, width: f64, k: f64, eps: f64) -> Result<Vec<Complex64>> {
    let kc = Complex64::new(k, 0.0);
    let mut diag = Vec::new();
    for l in 0.. {
        let s = (l as f64 * std::f64::consts::PI / width).powi(2);
        if s >= k * k {
            // Confirm the gap clears the threshold guard, then stop: the
            // reference covers open channels only.
            channel_momentum(kc, s, eps)?;
            break;
        }
        let momentum = channel_momentum(kc, s, eps)?;
        debug_assert_eq!(momentum.regime, Regime::Open);
        diag.push((Complex64::new(0.0, 2.0 * length) * momentum.value).exp());
    }
    Ok(diag)
}

/// One row of a wavenumber sweep: a single projected-matrix entry with the
/// per-k diagnostics attached.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub k: f64,
    pub lambda: usize,
    pub lambda_prime: usize,
    pub s: Complex64,
    /// Absolute error against the analytic reference, when one exists.
    pub abs_err_vs_reference: Option<f64>,
    /// Unitarity defect of the projected matrix at this k.
    pub unitarity_defect: f64,
    pub open_channel_count: usize,
}

/// A sweep: data rows sorted by (k, lambda, lambda'), plus the wavenumbers
/// that were skipped for sitting within the threshold guard.
#[derive(Debug, Clone)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    /// (k, reason) pairs for non-fatal skips.
    pub skipped: Vec<(f64, String)>,
}

/// All open-channel matrix entries at one wavenumber as flat rows, with the
/// analytic reference error attached where the geometry has one.
pub fn smatrix_rows(
    scenario: &Scenario,
    k: f64,
    n_cutoff: Cutoff,
    lambda_cutoff: Cutoff,
    variant: Variant,
    method: ResolventMethod,
) -> Result<Vec<SweepRow>> {
    let result = scenario.smatrix_at(k, n_cutoff, lambda_cutoff, variant, method)?;
    let reference: Option<Vec<Complex64>> = match scenario.geometry() {
        Geometry::Example1d => Some(vec![
            (Complex64::new(0.0, 2.0 * std::f64::consts::PI * k)).exp()
        ]),
        Geometry::Rect2d { length, width } => {
            Some(rect2d_reference(*length, *width, k, scenario.eps())?)
        }
        Geometry::Fd2d { .. } => None,
    };
    let open = result.s_open.rows();
    let mut rows = Vec::with_capacity(open * open);
    for i in 0..open {
        for j in 0..open {
            let s = result.s_open[(i, j)];
            let abs_err = reference.as_ref().map(|diag| {
                let r = if i == j {
                    diag[i]
                } else {
                    Complex64::new(0.0, 0.0)
                };
                (s - r).norm()
            });
            rows.push(SweepRow {
                k,
                lambda: i,
                lambda_prime: j,
                s,
                abs_err_vs_reference: abs_err,
                unitarity_defect: result.unitarity_defect_open,
                open_channel_count: open,
            });
        }
    }
    Ok(rows)
}

/// Evaluate the projected matrix over a wavenumber grid. Wavenumbers whose
/// k^2 sits within the threshold guard of a channel are recorded as skips;
/// any other failure aborts the sweep.
pub fn sweep_k(
    scenario: &Scenario,
    k_grid: &[f64],
    n_cutoff: Cutoff,
    lambda_cutoff: Cutoff,
    variant: Variant,
    method: ResolventMethod,
) -> Result<SweepTable> {
    #[cfg(feature = "parallel")]
    let per_k: Vec<(f64, Result<Vec<SweepRow>>)> = {
        use rayon::prelude::*;
        k_grid
            .par_iter()
            .map(|&k| {
                (
                    k,
                    smatrix_rows(scenario, k, n_cutoff, lambda_cutoff, variant, method),
                )
            })
            .collect()
    };
    #[cfg(not(feature = "parallel"))]
    let per_k: Vec<(f64, Result<Vec<SweepRow>>)> = k_grid
        .iter()
        .map(|&k| {
            (
                k,
                smatrix_rows(scenario, k, n_cutoff, lambda_cutoff, variant, method),
            )
        })
        .collect();

    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for (k, outcome) in per_k {
        match outcome {
            Ok(mut r) => rows.append(&mut r),
            Err(e @ Error::ThresholdError { .. }) => skipped.push((k, e.to_string())),
            Err(other) => return Err(other),
        }
    }
    rows.sort_by(|a, b| {
        (a.k, a.lambda, a.lambda_prime)
            .partial_cmp(&(b.k, b.lambda, b.lambda_prime))
            .unwrap()
    });
    skipped.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    Ok(SweepTable { rows, skipped })
}
