//! Browser bindings: three interactive views onto the scattering library,
//! each returning a flat `Float64Array`-friendly vector so the page needs no
//! serialization layer.

use std::cell::OnceCell;

use wasm_bindgen::prelude::*;

use wavescat::analysis::{rect2d_reference, Scenario};
use wavescat::channels::DEFAULT_THRESHOLD_EPS;
use wavescat::coupling::{Cutoff, Variant};
use wavescat::effective::ResolventMethod;
use wavescat::geometry::{Bump, Geometry};
use wavescat::Complex64;

const PI: f64 = std::f64::consts::PI;

fn js_err(e: wavescat::Error) -> JsValue {
    JsValue::from_str(&e.to_string())
}

/// Crate version, for the page footer.
#[wasm_bindgen]
pub fn version() -> String {
    env!("CARGO_PKG_VERSION").to_string()
}

/// Scalar scattering on the interval with `m` retained interior modes,
/// swept over `count` wavenumbers in (0.05, 2.95). Wavenumbers within 5e-3
/// of an integer are nudged upward by 1e-2 to stay off the closed-form
/// poles. Returns rows of four: k, Re S, Im S, |S - exact round-trip phase|.
#[wasm_bindgen]
pub fn interval_sweep(m: usize, count: usize) -> Result<Vec<f64>, JsValue> {
    let m = m.clamp(2, 1024);
    let count = count.clamp(2, 2000);
    let scenario = Scenario::new(Geometry::Example1d, (m * m) as f64, DEFAULT_THRESHOLD_EPS)
        .map_err(js_err)?;
    let mut out = Vec::with_capacity(4 * count);
    for i in 0..count {
        let mut k = 0.05 + (2.95 - 0.05) * i as f64 / (count - 1) as f64;
        if (k - k.round()).abs() < 5e-3 {
            k += 1e-2;
        }
        let result = scenario
            .smatrix_at(
                k,
                Cutoff::All,
                Cutoff::All,
                Variant::Transpose,
                ResolventMethod::Auto,
            )
            .map_err(js_err)?;
        let s = result.s_open[(0, 0)];
        let exact = Complex64::new(0.0, 2.0 * PI * k).exp();
        out.extend_from_slice(&[k, s.re, s.im, (s - exact).norm()]);
    }
    Ok(out)
}

/// Open-channel scattering block of the pi-by-pi rectangular half-guide at
/// wavenumber `k`, with interior cutoff `n_cutoff` and the channel cutoff
/// placed six units above k^2. Returns [n, projected defect,
/// n^2 interleaved (re, im) block entries row-major,
/// n interleaved (re, im) exact diagonal phases].
#[wasm_bindgen]
pub fn rectangle_block(k: f64, n_cutoff: f64) -> Result<Vec<f64>, JsValue> {
    let scenario = Scenario::new(
        Geometry::Rect2d {
            length: PI,
            width: PI,
        },
        n_cutoff.clamp(16.0, 20000.0),
        DEFAULT_THRESHOLD_EPS,
    )
    .map_err(js_err)?;
    let result = scenario
        .smatrix_at(
            k,
            Cutoff::All,
            Cutoff::Energy(k * k + 6.0),
            Variant::Transpose,
            ResolventMethod::Auto,
        )
        .map_err(js_err)?;
    let reference = rect2d_reference(PI, PI, k, DEFAULT_THRESHOLD_EPS).map_err(js_err)?;
    let n = result.s_open.rows();
    let mut out = Vec::with_capacity(2 + 2 * n * n + 2 * n);
    out.push(n as f64);
    out.push(result.unitarity_defect_open);
    for i in 0..n {
        for j in 0..n {
            let s = result.s_open[(i, j)];
            out.push(s.re);
            out.push(s.im);
        }
    }
    for phase in reference {
        out.push(phase.re);
        out.push(phase.im);
    }
    Ok(out)
}

thread_local! {
    static CAVITY: OnceCell<Scenario> = const { OnceCell::new() };
}

fn with_cavity<T>(f: impl FnOnce(&Scenario) -> T) -> Result<T, JsValue> {
    CAVITY.with(|cell| {
        if cell.get().is_none() {
            let scenario = Scenario::new(
                Geometry::Fd2d {
                    length: 1.3,
                    width: 0.9,
                    nx: 16,
                    ny: 16,
                    bumps: vec![Bump {
                        amplitude: 40.0,
                        x_center: -0.975,
                        y_center: 0.45,
                        width: 0.065,
                    }],
                },
                f64::INFINITY,
                DEFAULT_THRESHOLD_EPS,
            )
            .map_err(js_err)?;
            let _ = cell.set(scenario);
        }
        Ok(f(cell.get().expect("just initialized")))
    })
}

/// Unitarity comparison of the two coupling conventions on a small bumped
/// cavity (16x16 grid, one bump), at wavenumber `k` with channel cutoff
/// `lambda`. Returns [open channels, retained channels,
/// transpose projected defect, conjugate projected defect,
/// transpose full defect, conjugate full defect, transpose symmetry defect].
#[wasm_bindgen]
pub fn cavity_contrast(k: f64, lambda: f64) -> Result<Vec<f64>, JsValue> {
    with_cavity(|scenario| {
        let cut = Cutoff::Energy(lambda);
        let transpose = scenario
            .smatrix_at(
                k,
                Cutoff::All,
                cut,
                Variant::Transpose,
                ResolventMethod::Auto,
            )
            .map_err(js_err)?;
        let conjugate = scenario
            .smatrix_at(
                k,
                Cutoff::All,
                cut,
                Variant::Conjugate,
                ResolventMethod::Auto,
            )
            .map_err(js_err)?;
        Ok(vec![
            transpose.open_columns.len() as f64,
            transpose.s_full.rows() as f64,
            transpose.unitarity_defect_open,
            conjugate.unitarity_defect_open,
            transpose.unitarity_defect_full,
            conjugate.unitarity_defect_full,
            transpose.symmetry_defect_full,
        ])
    })?
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_rows_have_unit_magnitude() {
        let rows = interval_sweep(32, 50).unwrap();
        assert_eq!(rows.len(), 200);
        for chunk in rows.chunks(4) {
            let mag = (chunk[1] * chunk[1] + chunk[2] * chunk[2]).sqrt();
            assert!((mag - 1.0).abs() < 1e-10, "|S| = {mag} at k = {}", chunk[0]);
            assert!(chunk[3] < 0.1);
        }
    }

    #[test]
    fn rectangle_block_is_square_plus_reference() {
        let out = rectangle_block(2.5, 400.0).unwrap();
        let n = out[0] as usize;
        assert_eq!(n, 3);
        assert_eq!(out.len(), 2 + 2 * n * n + 2 * n);
        assert!(out[1] < 1e-10);
    }

    #[test]
    fn cavity_contrast_orders_the_defects() {
        let out = cavity_contrast(2.5, 80.0).unwrap();
        assert_eq!(out.len(), 7);
        let (transpose_projected, conjugate_projected) = (out[2], out[3]);
        assert!(conjugate_projected > 1e3 * transpose_projected.max(1e-14));
        assert!(out[5] <= 1e-10, "conjugate full defect");
    }
}
