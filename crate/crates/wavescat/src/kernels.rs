//! Numerical plumbing: dense complex and real matrices, a complex LU solver
//! with partial pivoting, real symmetric eigendecomposition, and least-squares
//! fits for convergence rates.
//!
//! Everything is dense and kept well under a few thousand rows, so no sparse
//! or iterative machinery appears anywhere.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Dense complex matrix in row-major order.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        ComplexMatrix {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.data[i * cols + j] = f(i, j);
            }
        }
        m
    }

    /// Build from explicit rows; all rows must have equal length.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        assert!(!rows.is_empty() && !rows[0].is_empty());
        let cols = rows[0].len();
        assert!(rows.iter().all(|r| r.len() == cols));
        ComplexMatrix {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().copied().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [Complex64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> Option<Complex64> {
        if i < self.rows && j < self.cols {
            Some(self.data[i * self.cols + j])
        } else {
            None
        }
    }

    pub fn mul(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            self.cols, rhs.rows,
            "incompatible shapes for multiplication"
        );
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let arow = self.row(i);
            let orow = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for (l, &a) in arow.iter().enumerate() {
                if a == ZERO {
                    continue;
                }
                let brow = &rhs.data[l * rhs.cols..(l + 1) * rhs.cols];
                for (o, &b) in orow.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.cols, self.rows, |i, j| self.data[j * self.cols + i])
    }

    pub fn conjugate(&self) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.cols, self.rows, |i, j| {
            self.data[j * self.cols + i].conj()
        })
    }

    pub fn add(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, alpha: Complex64) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| alpha * z).collect(),
        }
    }

    /// Multiply row i by d[i]; realizes a diagonal matrix acting from the left.
    pub fn scale_rows(&self, d: &[Complex64]) -> ComplexMatrix {
        assert_eq!(d.len(), self.rows);
        let mut out = self.clone();
        for i in 0..self.rows {
            let di = d[i];
            for z in out.row_mut(i) {
                *z *= di;
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn fro_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn all_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for col in 0..self.cols {
            self.data.swap(i * self.cols + col, j * self.cols + col);
        }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Dense real matrix in row-major order.
#[derive(Clone, Debug, PartialEq)]
pub struct RealMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        RealMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.data[i * cols + j] = f(i, j);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<f64> {
        (0..self.rows)
            .map(|i| self.data[i * self.cols + j])
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.abs()).fold(0.0, f64::max)
    }

    pub fn fro_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

impl Index<(usize, usize)> for RealMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RealMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Solve A X = B by LU with partial (row) pivoting. A pivot whose magnitude
/// falls below 1e-14 * max|A| is treated as singular rather than divided by.
pub fn solve_complex(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.rows != a.cols {
        return Err(Error::DimensionMismatch {
            context: "solve_complex",
            left: format!("{}x{}", a.rows, a.cols),
            right: "square matrix".into(),
        });
    }
    if b.rows != a.rows {
        return Err(Error::DimensionMismatch {
            context: "solve_complex",
            left: format!("A has {} rows", a.rows),
            right: format!("B has {} rows", b.rows),
        });
    }
    let n = a.rows;
    let m = b.cols;
    let threshold = 1e-14 * a.max_abs();
    let mut lu = a.data.clone();
    let mut x = b.clone();

    for step in 0..n {
        let mut pivot_row = step;
        let mut best = lu[step * n + step].norm();
        for i in step + 1..n {
            let mag = lu[i * n + step].norm();
            if mag > best {
                best = mag;
                pivot_row = i;
            }
        }
        if !(best > threshold) {
            return Err(Error::SingularMatrix {
                step,
                magnitude: best,
                threshold,
            });
        }
        if pivot_row != step {
            for j in 0..n {
                lu.swap(step * n + j, pivot_row * n + j);
            }
            x.swap_rows(step, pivot_row);
        }
        let (head, tail) = lu.split_at_mut((step + 1) * n);
        let prow = &head[step * n..(step + 1) * n];
        let pivot = prow[step];
        for row in tail.chunks_exact_mut(n) {
            let factor = row[step] / pivot;
            row[step] = factor;
            if factor != ZERO {
                for j in step + 1..n {
                    row[j] -= factor * prow[j];
                }
            }
        }
    }

    // X <- L^{-1} X, unit lower triangle stored below the diagonal of lu.
    for k in 0..n {
        let (head, tail) = x.data.split_at_mut((k + 1) * m);
        let xk = &head[k * m..(k + 1) * m];
        for (i, row) in tail.chunks_exact_mut(m).enumerate() {
            let factor = lu[(k + 1 + i) * n + k];
            if factor != ZERO {
                for (r, &s) in row.iter_mut().zip(xk) {
                    *r -= factor * s;
                }
            }
        }
    }
    // X <- U^{-1} X.
    for k in (0..n).rev() {
        let (head, tail) = x.data.split_at_mut(k * m);
        let xk = &mut tail[..m];
        let inv = Complex64::new(1.0, 0.0) / lu[k * n + k];
        for z in xk.iter_mut() {
            *z *= inv;
        }
        let xk = &tail[..m];
        for i in 0..k {
            let factor = lu[i * n + k];
            if factor != ZERO {
                let row = &mut head[i * m..(i + 1) * m];
                for (r, &s) in row.iter_mut().zip(xk) {
                    *r -= factor * s;
                }
            }
        }
    }
    Ok(x)
}

/// Eigendecomposition of a real symmetric matrix: ascending eigenvalues with
/// matching orthonormal eigenvector columns.
#[derive(Clone, Debug)]
pub struct SymEigenDecomposition {
    pub values: Vec<f64>,
    /// Column j is the eigenvector for values[j].
    pub vectors: RealMatrix,
}

pub fn eig_sym(a: &RealMatrix) -> Result<SymEigenDecomposition> {
    if a.rows != a.cols {
        return Err(Error::DimensionMismatch {
            context: "eig_sym",
            left: format!("{}x{}", a.rows, a.cols),
            right: "square matrix".into(),
        });
    }
    let n = a.rows;
    let tol = 1e-12 * a.max_abs();
    for i in 0..n {
        for j in i + 1..n {
            let defect = (a[(i, j)] - a[(j, i)]).abs();
            if defect > tol {
                return Err(Error::NotSymmetric { i, j, defect });
            }
        }
    }
    let m = nalgebra::DMatrix::from_row_slice(n, n, &a.data);
    let eig = m.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&p, &q| {
        eig.eigenvalues[p]
            .partial_cmp(&eig.eigenvalues[q])
            .expect("eigenvalues of a finite symmetric matrix are finite")
    });
    let values: Vec<f64> = order.iter().map(|&j| eig.eigenvalues[j]).collect();
    let mut vectors = RealMatrix::zeros(n, n);
    for (jnew, &jold) in order.iter().enumerate() {
        for i in 0..n {
            vectors[(i, jnew)] = eig.eigenvectors[(i, jold)];
        }
    }
    Ok(SymEigenDecomposition { values, vectors })
}

/// Ordinary least-squares line through (x, y) points.
#[derive(Clone, Copy, Debug)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
}

pub fn fit_linear(points: &[(f64, f64)]) -> Result<LineFit> {
    if points.len() < 3 {
        return Err(Error::InsufficientData { got: points.len() });
    }
    let n = points.len() as f64;
    let xm = points.iter().map(|p| p.0).sum::<f64>() / n;
    let ym = points.iter().map(|p| p.1).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for &(x, y) in points {
        sxx += (x - xm) * (x - xm);
        sxy += (x - xm) * (y - ym);
    }
    if sxx == 0.0 {
        return Err(Error::InsufficientData { got: points.len() });
    }
    let slope = sxy / sxx;
    Ok(LineFit {
        slope,
        intercept: ym - slope * xm,
    })
}

/// Least squares on (log x, log y); the intercept is reported in log space.
pub fn fit_loglog(points: &[(f64, f64)]) -> Result<LineFit> {
    if points.len() < 3 {
        return Err(Error::InsufficientData { got: points.len() });
    }
    for &(x, y) in points {
        if !(x > 0.0) || !(y > 0.0) {
            return Err(Error::NonPositive { x, y });
        }
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    fit_linear(&logs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn solve_identity_returns_rhs() {
        let a = ComplexMatrix::identity(3);
        let b =
            ComplexMatrix::from_rows(&[vec![c(1.0, 2.0)], vec![c(-0.5, 0.0)], vec![c(0.0, 3.0)]]);
        let x = solve_complex(&a, &b).unwrap();
        assert_eq!(x, b);
    }

    #[test]
    fn solve_diagonal() {
        let a = ComplexMatrix::from_rows(&[vec![c(2.0, 0.0), ZERO], vec![ZERO, c(4.0, 0.0)]]);
        let b = ComplexMatrix::from_rows(&[vec![c(1.0, 0.0)], vec![c(1.0, 0.0)]]);
        let x = solve_complex(&a, &b).unwrap();
        assert!((x[(0, 0)] - c(0.5, 0.0)).norm() < 1e-15);
        assert!((x[(1, 0)] - c(0.25, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn solve_rank_deficient_is_singular() {
        let a = ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(1.0, 0.0)],
        ]);
        let b = ComplexMatrix::zeros(2, 1);
        match solve_complex(&a, &b) {
            Err(Error::SingularMatrix { .. }) => {}
            other => panic!("expected SingularMatrix, got {other:?}"),
        }
    }

    #[test]
    fn solve_residual_on_random_well_conditioned() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..20 {
            let n = 1 + (trial % 10) * 3;
            let m = 1 + trial % 4;
            let mut a = ComplexMatrix::from_fn(n, n, |_, _| {
                c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            for i in 0..n {
                // Diagonal dominance keeps the condition number tame.
                a[(i, i)] += c(n as f64, n as f64);
            }
            let b = ComplexMatrix::from_fn(n, m, |_, _| {
                c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            });
            let x = solve_complex(&a, &b).unwrap();
            let resid = a.mul(&x).sub(&b).fro_norm();
            assert!(
                resid <= 1e-10 * b.fro_norm().max(1e-300),
                "residual {resid:.3e} too large at n={n}"
            );
        }
    }

    #[test]
    fn eig_diagonal_sorted_ascending() {
        let a = RealMatrix::from_fn(3, 3, |i, j| if i == j { [3.0, 1.0, 2.0][i] } else { 0.0 });
        let d = eig_sym(&a).unwrap();
        assert!(d
            .values
            .iter()
            .zip([1.0, 2.0, 3.0])
            .all(|(got, want)| (got - want).abs() < 1e-12));
    }

    #[test]
    fn eig_exchange_matrix() {
        let mut a = RealMatrix::zeros(2, 2);
        a[(0, 1)] = 1.0;
        a[(1, 0)] = 1.0;
        let d = eig_sym(&a).unwrap();
        assert!((d.values[0] + 1.0).abs() < 1e-14);
        assert!((d.values[1] - 1.0).abs() < 1e-14);
        let s = 0.5_f64.sqrt();
        for j in 0..2 {
            let v = d.vectors.col(j);
            assert!((v[0].abs() - s).abs() < 1e-12 && (v[1].abs() - s).abs() < 1e-12);
            // Eigenpair residual rather than a sign convention.
            let av = [v[1], v[0]];
            for i in 0..2 {
                assert!((av[i] - d.values[j] * v[i]).abs() < 1e-12);
            }
        }
    }

    /// 1D finite-difference Neumann Laplacian (mirror boundary) on n cells has
    /// eigenvalues (4/h^2) sin^2(j*pi/(2n)); computed here independently and
    /// compared against eig_sym.
    #[test]
    fn eig_matches_analytic_fd_neumann_spectrum() {
        let n = 12;
        let h = std::f64::consts::PI / n as f64;
        let a = fd_neumann_1d(n, h);
        let d = eig_sym(&a).unwrap();
        let scale = a.max_abs();
        for j in 0..n {
            let analytic = (4.0 / (h * h))
                * (j as f64 * std::f64::consts::PI / (2.0 * n as f64))
                    .sin()
                    .powi(2);
            assert!(
                (d.values[j] - analytic).abs() <= 1e-9 * scale,
                "eigenvalue {j}: got {}, analytic {analytic}",
                d.values[j]
            );
        }
    }

    fn fd_neumann_1d(n: usize, h: f64) -> RealMatrix {
        RealMatrix::from_fn(n, n, |i, j| {
            let s = 1.0 / (h * h);
            if i == j {
                if i == 0 || i == n - 1 {
                    s
                } else {
                    2.0 * s
                }
            } else if i.abs_diff(j) == 1 {
                -s
            } else {
                0.0
            }
        })
    }

    #[test]
    fn eig_reconstruction_and_orthonormality() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 25;
        let mut a = RealMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = rng.gen_range(-1.0..1.0);
                a[(i, j)] = v;
                a[(j, i)] = v;
            }
        }
        let d = eig_sym(&a).unwrap();
        let mut recon_err = 0.0_f64;
        let mut ortho_err = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                let mut recon = 0.0;
                let mut gram = 0.0;
                for l in 0..n {
                    recon += d.vectors[(i, l)] * d.values[l] * d.vectors[(j, l)];
                    gram += d.vectors[(l, i)] * d.vectors[(l, j)];
                }
                recon_err += (recon - a[(i, j)]).powi(2);
                let target = if i == j { 1.0 } else { 0.0 };
                ortho_err += (gram - target).powi(2);
            }
        }
        assert!(recon_err.sqrt() <= 1e-9 * a.fro_norm());
        assert!(ortho_err.sqrt() <= 1e-10);
    }

    #[test]
    fn eig_rejects_asymmetric() {
        let mut a = RealMatrix::zeros(2, 2);
        a[(0, 1)] = 1.0;
        match eig_sym(&a) {
            Err(Error::NotSymmetric { .. }) => {}
            other => panic!("expected NotSymmetric, got {other:?}"),
        }
    }

    #[test]
    fn fit_exact_square_law() {
        let pts: Vec<(f64, f64)> = [1.0, 2.0, 4.0].iter().map(|&x: &f64| (x, x * x)).collect();
        let fit = fit_loglog(&pts).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!(fit.intercept.abs() < 1e-12);
    }

    #[test]
    fn fit_exact_inverse_law_with_intercept() {
        let pts: Vec<(f64, f64)> = [1.0, 10.0, 100.0]
            .iter()
            .map(|&x: &f64| (x, 5.0 / x))
            .collect();
        let fit = fit_loglog(&pts).unwrap();
        assert!((fit.slope + 1.0).abs() < 1e-12);
        assert!((fit.intercept - 5.0_f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn fit_rejects_bad_input() {
        match fit_loglog(&[(1.0, 1.0), (2.0, 2.0)]) {
            Err(Error::InsufficientData { got: 2 }) => {}
            other => panic!("expected InsufficientData, got {other:?}"),
        }
        match fit_loglog(&[(1.0, 1.0), (-2.0, 2.0), (3.0, 3.0)]) {
            Err(Error::NonPositive { .. }) => {}
            other => panic!("expected NonPositive, got {other:?}"),
        }
    }

    #[test]
    fn fit_recovers_slope_under_one_percent_noise() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pts: Vec<(f64, f64)> = (0..24)
            .map(|i| {
                let x = 1.5_f64.powi(i);
                let noise = rng.gen_range(-0.01..0.01_f64).exp();
                (x, 2.0 * x.powf(-0.5) * noise)
            })
            .collect();
        let fit = fit_loglog(&pts).unwrap();
        assert!(
            (fit.slope + 0.5).abs() < 0.05,
            "slope {} drifted",
            fit.slope
        );
    }

    /// Manual performance probe; run with
    /// `cargo test -p wavescat eig_timing -- --ignored --nocapture`.
    #[test]
    #[ignore]
    fn eig_timing_probe_1600() {
        let n = 1600;
        let a = RealMatrix::from_fn(n, n, |i, j| {
            if i == j {
                2.0 + (i as f64 * 0.37).sin() * 0.1
            } else if i.abs_diff(j) == 1 {
                -1.0
            } else if i.abs_diff(j) == 40 {
                -0.5
            } else {
                0.0
            }
        });
        let t = std::time::Instant::now();
        let d = eig_sym(&a).unwrap();
        println!(
            "eig_sym n={n}: {:.2?} (lowest value {:.6})",
            t.elapsed(),
            d.values[0]
        );
    }

    /// Manual performance probe for the dense LU path.
    #[test]
    #[ignore]
    fn solve_timing_probe_2000() {
        let n = 2000;
        let a = ComplexMatrix::from_fn(n, n, |i, j| {
            if i == j {
                c(4.0, -1.0)
            } else {
                c(
                    1.0 / ((i + 2 * j + 1) as f64),
                    0.3 / ((2 * i + j + 1) as f64),
                )
            }
        });
        let b = ComplexMatrix::from_fn(n, 1, |i, _| c((i as f64 * 0.01).cos(), 0.0));
        let t = std::time::Instant::now();
        let x = solve_complex(&a, &b).unwrap();
        let resid = a.mul(&x).sub(&b).fro_norm() / b.fro_norm();
        println!("solve n={n}: {:.2?}, residual {resid:.3e}", t.elapsed());
    }
}
