//! Geometry descriptions shared by the channel and interior providers.
//!
//! All three geometries share the same picture: an interior region occupying
//! x in (-L, 0) that meets a semi-infinite straight end at x = 0, with Neumann
//! conditions on every solid wall. `Example1d` is the one-dimensional interval
//! with a point cross-section, `Rect2d` the analytically solvable rectangle,
//! and `Fd2d` a finite-difference rectangle that can carry Gaussian potential
//! bumps to induce channel mixing.

use crate::error::{Error, Result};

/// Gaussian potential bump, amplitude * exp(-r^2 / (2 width^2)).
#[derive(Clone, Debug, PartialEq)]
pub struct Bump {
    pub amplitude: f64,
    pub x_center: f64,
    pub y_center: f64,
    pub width: f64,
}

impl Bump {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let dx = x - self.x_center;
        let dy = y - self.y_center;
        self.amplitude * (-(dx * dx + dy * dy) / (2.0 * self.width * self.width)).exp()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Geometry {
    /// Interval (-pi, 0) with a point cross-section; the closed-form example.
    Example1d,
    /// Rectangle (-length, 0) x (0, width) with separable analytic modes.
    Rect2d { length: f64, width: f64 },
    /// Finite-difference rectangle with optional potential bumps.
    Fd2d {
        length: f64,
        width: f64,
        nx: usize,
        ny: usize,
        bumps: Vec<Bump>,
    },
}

impl Geometry {
    /// Cross-section width; the point cross-section reports zero.
    pub fn cross_section_width(&self) -> f64 {
        match self {
            Geometry::Example1d => 0.0,
            Geometry::Rect2d { width, .. } | Geometry::Fd2d { width, .. } => *width,
        }
    }

    pub fn interior_length(&self) -> f64 {
        match self {
            Geometry::Example1d => std::f64::consts::PI,
            Geometry::Rect2d { length, .. } | Geometry::Fd2d { length, .. } => *length,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Geometry::Example1d => Ok(()),
            Geometry::Rect2d { length, width } => {
                require_positive("geometry.L", *length)?;
                require_positive("geometry.a", *width)
            }
            Geometry::Fd2d {
                length,
                width,
                nx,
                ny,
                bumps,
            } => {
                require_positive("geometry.L", *length)?;
                require_positive("geometry.a", *width)?;
                if *nx < 4 || *ny < 4 {
                    return Err(Error::ConfigError(format!(
                        "fd2d grid must be at least 4x4, got {nx}x{ny}"
                    )));
                }
                for (i, b) in bumps.iter().enumerate() {
                    if b.amplitude < 0.0 {
                        return Err(Error::ConfigError(format!(
                            "bump {i}: amplitude {} must be nonnegative",
                            b.amplitude
                        )));
                    }
                    if !(b.width > 0.0) {
                        return Err(Error::ConfigError(format!(
                            "bump {i}: width {} must be positive",
                            b.width
                        )));
                    }
                    // The product structure near the opening at x = 0 must be
                    // preserved; 4 widths of Gaussian tail count as support.
                    if b.x_center + 4.0 * b.width > -length / 2.0 {
                        return Err(Error::ConfigError(format!(
                            "bump {i}: support [{:.3}, {:.3}] must stay left of -L/2 = {:.3}",
                            b.x_center - 4.0 * b.width,
                            b.x_center + 4.0 * b.width,
                            -length / 2.0
                        )));
                    }
                    if b.x_center - 4.0 * b.width < -length {
                        return Err(Error::ConfigError(format!(
                            "bump {i}: support extends past the back wall at x = {:.3}",
                            -length
                        )));
                    }
                    if b.y_center < 0.0 || b.y_center > *width {
                        return Err(Error::ConfigError(format!(
                            "bump {i}: y-center {} outside the cross-section [0, {}]",
                            b.y_center, width
                        )));
                    }
                }
                Ok(())
            }
        }
    }
}

fn require_positive(name: &str, value: f64) -> Result<()> {
    if value > 0.0 {
        Ok(())
    } else {
        Err(Error::ConfigError(format!(
            "{name} must be positive, got {value}"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rect_rejects_nonpositive_dimensions() {
        let g = Geometry::Rect2d {
            length: -1.0,
            width: 1.0,
        };
        assert!(g.validate().is_err());
    }

    #[test]
    fn bump_support_must_avoid_the_opening() {
        let g = Geometry::Fd2d {
            length: std::f64::consts::PI,
            width: std::f64::consts::PI,
            nx: 8,
            ny: 8,
            bumps: vec![Bump {
                amplitude: 1.0,
                x_center: -0.5,
                y_center: 1.0,
                width: 0.2,
            }],
        };
        assert!(g.validate().is_err());
    }

    #[test]
    fn valid_bump_accepted() {
        let l = std::f64::consts::PI;
        let g = Geometry::Fd2d {
            length: l,
            width: l,
            nx: 8,
            ny: 8,
            bumps: vec![Bump {
                amplitude: 50.0,
                x_center: -0.75 * l,
                y_center: 0.5 * l,
                width: l / 20.0,
            }],
        };
        g.validate().unwrap();
    }
}
