//! The effective Hamiltonian `diag(tau^2) - i W F` (where F is the transpose
//! or conjugate transpose of W per variant), its resolvent applied by a dense
//! factorization or by a low-rank update formula, closed forms for the 1D
//! interval example, and a Green's-function reference solver for the same
//! example.

use num_complex::Complex64;

use crate::coupling::CouplingMatrix;
pub use crate::coupling::Variant;
use crate::error::{Error, Result};
use crate::kernels::{solve_complex, ComplexMatrix};

/// Relative guard on |k^2 - tau_n^2| below which the low-rank path refuses to
/// form the diagonal resolvent.
pub const DIAGONAL_RESONANCE_TOL: f64 = 1e-12;

/// How the resolvent is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResolventMethod {
    /// Factor the full shifted matrix.
    Dense,
    /// Diagonal resolvent plus a rank-r correction.
    Woodbury,
    /// Low-rank when the channel count is small next to the mode count and
    /// no retained eigenvalue resonates with k^2; dense otherwise.
    Auto,
}

/// `diag(tau^2) - i W F` over the retained interior modes. The dense matrix
/// is assembled on first use; the low-rank resolvent path never needs it.
#[derive(Debug, Clone)]
pub struct EffectiveHamiltonian {
    tau_sq: Vec<f64>,
    w: CouplingMatrix,
    variant: Variant,
    cache: std::sync::OnceLock<ComplexMatrix>,
}

impl EffectiveHamiltonian {
    pub fn tau_sq(&self) -> &[f64] {
        &self.tau_sq
    }

    pub fn coupling(&self) -> &CouplingMatrix {
        &self.w
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    /// The assembled dense matrix, built on first use.
    pub fn matrix(&self) -> &ComplexMatrix {
        self.cache.get_or_init(|| {
            let factor = self.w.variant_factor();
            let outer = self.w.matrix().mul(&factor);
            let mut matrix = outer.scale(Complex64::new(0.0, -1.0));
            for (n, &t) in self.tau_sq.iter().enumerate() {
                matrix[(n, n)] += t;
            }
            matrix
        })
    }

    /// Retained mode count.
    pub fn dim(&self) -> usize {
        self.tau_sq.len()
    }

    /// True when every |k^2 - tau_n^2| clears the diagonal-resonance guard.
    pub fn diagonal_clear(&self, k: f64) -> bool {
        let k_sq = k * k;
        let tol = DIAGONAL_RESONANCE_TOL * k_sq.abs().max(1.0);
        self.tau_sq.iter().all(|&t| (k_sq - t).abs() >= tol)
    }

    /// Concrete method the `Auto` policy picks at this wavenumber.
    pub fn auto_method(&self, k: f64) -> ResolventMethod {
        let r = self.w.channel_count();
        if r * 8 <= self.dim() && self.diagonal_clear(k) {
            ResolventMethod::Woodbury
        } else {
            ResolventMethod::Dense
        }
    }
}

/// Assemble `diag(tau_sq) - i W F` with F the factor selected by `variant`.
pub fn build_heff(
    tau_sq: &[f64],
    w: CouplingMatrix,
    variant: Variant,
) -> Result<EffectiveHamiltonian> {
    if tau_sq.len() != w.mode_count() {
        return Err(Error::DimensionMismatch {
            context: "effective Hamiltonian",
            left: tau_sq.len().to_string(),
            right: w.mode_count().to_string(),
        });
    }
    Ok(EffectiveHamiltonian {
        tau_sq: tau_sq.to_vec(),
        w: w.with_variant(variant),
        variant,
        cache: std::sync::OnceLock::new(),
    })
}

/// Apply `(k^2 I - H)^{-1}` to the columns of `b` through a dense LU solve.
pub fn resolvent_apply_dense(
    h: &EffectiveHamiltonian,
    k: f64,
    b: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    if b.rows() != h.dim() {
        return Err(Error::DimensionMismatch {
            context: "dense resolvent",
            left: h.dim().to_string(),
            right: b.rows().to_string(),
        });
    }
    let k_sq = k * k;
    let a = ComplexMatrix::from_fn(h.dim(), h.dim(), |i, j| {
        let shift = if i == j {
            Complex64::new(k_sq, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        };
        shift - h.matrix()[(i, j)]
    });
    solve_complex(&a, b)
}

/// Apply `(k^2 - D + i W F)^{-1}` to the columns of `b` as a diagonal
/// resolvent plus a rank-r correction:
///
/// `R0 b - i R0 W (I + i F R0 W)^{-1} F R0 b`,  `R0 = (k^2 - D)^{-1}`.
///
/// Costs O(modes * channels) per column plus one channels-sized solve.
pub fn resolvent_apply_woodbury(
    tau_sq: &[f64],
    w: &CouplingMatrix,
    k: f64,
    b: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    let n = tau_sq.len();
    if w.mode_count() != n {
        return Err(Error::DimensionMismatch {
            context: "low-rank resolvent",
            left: n.to_string(),
            right: w.mode_count().to_string(),
        });
    }
    if b.rows() != n {
        return Err(Error::DimensionMismatch {
            context: "low-rank resolvent",
            left: n.to_string(),
            right: b.rows().to_string(),
        });
    }
    let k_sq = k * k;
    let tol = DIAGONAL_RESONANCE_TOL * k_sq.abs().max(1.0);
    let mut r0 = Vec::with_capacity(n);
    for &t in tau_sq {
        let gap = k_sq - t;
        if gap.abs() < tol {
            return Err(Error::DiagonalResonance {
                k_sq,
                tau_sq: t,
                tol,
            });
        }
        r0.push(Complex64::new(1.0 / gap, 0.0));
    }
    let r = w.channel_count();
    let factor = w.variant_factor();
    let r0w = w.matrix().scale_rows(&r0);
    let r0b = b.scale_rows(&r0);
    // Core = I_r + i F R0 W.
    let mut core = factor.mul(&r0w).scale(Complex64::new(0.0, 1.0));
    for j in 0..r {
        core[(j, j)] += 1.0;
    }
    let rhs = factor.mul(&r0b);
    let z = solve_complex(&core, &rhs).map_err(|e| match e {
        Error::SingularMatrix { .. } => Error::CoreSingular { r },
        other => other,
    })?;
    let correction = r0w.mul(&z).scale(Complex64::new(0.0, -1.0));
    Ok(r0b.add(&correction))
}

/// Apply the resolvent by the requested method; `Auto` defers to
/// [`EffectiveHamiltonian::auto_method`].
pub fn resolvent_apply(
    h: &EffectiveHamiltonian,
    k: f64,
    b: &ComplexMatrix,
    method: ResolventMethod,
) -> Result<ComplexMatrix> {
    match method {
        ResolventMethod::Dense => resolvent_apply_dense(h, k, b),
        ResolventMethod::Woodbury => resolvent_apply_woodbury(&h.tau_sq, &h.w, k, b),
        ResolventMethod::Auto => match h.auto_method(k) {
            ResolventMethod::Woodbury => resolvent_apply_woodbury(&h.tau_sq, &h.w, k, b),
            _ => resolvent_apply_dense(h, k, b),
        },
    }
}

fn reject_integer_k(k: f64) -> Result<()> {
    if (k - k.round()).abs() < 1e-10 {
        return Err(Error::IntegerK { k });
    }
    Ok(())
}

/// Closed-form boundary sum for the interval example with modes up to M^2:
/// `(1/pi) (1/k + sum_{n=1}^{M} 2k / (k^2 - n^2))`, summed left to right.
pub fn closed_form_beta(k: f64, m: usize) -> Result<f64> {
    reject_integer_k(k)?;
    let mut sum = 1.0 / k;
    for n in 1..=m {
        let n_sq = (n * n) as f64;
        sum += 2.0 * k / (k * k - n_sq);
    }
    Ok(sum / std::f64::consts::PI)
}

/// Closed-form scattering coefficient for the interval example truncated at
/// M^2: `-1 + 2i (beta - i beta^2 / (1 + i beta))`.
pub fn closed_form_s1d(k: f64, m: usize) -> Result<Complex64> {
    let beta = closed_form_beta(k, m)?;
    let i = Complex64::new(0.0, 1.0);
    let denom = Complex64::new(1.0, beta);
    if denom.norm() < 1e-12 {
        return Err(Error::BetaPole {
            magnitude: denom.norm(),
        });
    }
    let inner = Complex64::new(beta, 0.0) - i * beta * beta / denom;
    Ok(Complex64::new(-1.0, 0.0) + 2.0 * i * inner)
}

/// Uniform grid of `n` samples spanning [-pi, 0] inclusive.
pub fn grid_1d(n: usize) -> Vec<f64> {
    let h = std::f64::consts::PI / (n - 1) as f64;
    (0..n)
        .map(|j| -std::f64::consts::PI + j as f64 * h)
        .collect()
}

/// Closed-form solution of `-u'' - k^2 u = f` on (-pi, 0) with `u'(-pi) = 0`
/// and the radiating condition `u'(0) = i k u(0)`, sampled on the same
/// uniform inclusive grid as `f`.
///
/// Built from the fundamental pair `u_l = cos(k(x+pi))` (flat at the closed
/// end) and `u_r = e^{ikx}` (radiating at the open end) with Wronskian
/// `u_l u_r' - u_l' u_r = i k e^{-i k pi}`; the two partial integrals are
/// accumulated by the trapezoid rule.
pub fn resolvent_1d_reference(k: f64, f: &[Complex64]) -> Result<Vec<Complex64>> {
    reject_integer_k(k)?;
    let n = f.len();
    if n < 3 {
        return Err(Error::InsufficientData { got: n });
    }
    let xs = grid_1d(n);
    let h = std::f64::consts::PI / (n - 1) as f64;
    let i = Complex64::new(0.0, 1.0);
    let u_l: Vec<Complex64> = xs
        .iter()
        .map(|&x| Complex64::new((k * (x + std::f64::consts::PI)).cos(), 0.0))
        .collect();
    let u_r: Vec<Complex64> = xs.iter().map(|&x| (i * k * x).exp()).collect();

    // left[j] = integral over (-pi, x_j) of u_l f, right[j] = integral over
    // (x_j, 0) of u_r f.
    let mut left = vec![Complex64::new(0.0, 0.0); n];
    for j in 1..n {
        left[j] = left[j - 1] + (u_l[j - 1] * f[j - 1] + u_l[j] * f[j]) * (h / 2.0);
    }
    let mut right = vec![Complex64::new(0.0, 0.0); n];
    for j in (0..n - 1).rev() {
        right[j] = right[j + 1] + (u_r[j] * f[j] + u_r[j + 1] * f[j + 1]) * (h / 2.0);
    }

    // G(x, y) = -u_l(min) u_r(max) / W, so u = (i e^{i k pi} / k) *
    // (u_r * left + u_l * right).
    let scale = i * (i * k * std::f64::consts::PI).exp() / k;
    Ok((0..n)
        .map(|j| scale * (u_r[j] * left[j] + u_l[j] * right[j]))
        .collect())
}
