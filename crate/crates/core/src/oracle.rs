//! Floating-point contour integration of the residue integrand, kept apart
//! from the exact pipeline so the two can check each other.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::algebra::MultiPoly;
use crate::exec::Exec;
use crate::residue::{ResidueError, SurfaceFieldInput};

/// Smallest `|B(0, y)|` tolerated at a sample point.
pub const POLE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error(transparent)]
    Residue(#[from] ResidueError),
    #[error("|B| drops to {min_abs:e} on the circle of radius {radius}")]
    PoleOnContour { radius: f64, min_abs: f64 },
    #[error("invalid contour: {0}")]
    InvalidContour(String),
}

impl OracleError {
    pub fn code(&self) -> &'static str {
        match self {
            OracleError::Residue(e) => e.code(),
            OracleError::PoleOnContour { .. } => "PoleOnContour",
            OracleError::InvalidContour(_) => "InvalidContour",
        }
    }
}

/// Circle `|y| = radius` sampled at `samples` equally spaced points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContourSpec {
    radius: f64,
    samples: usize,
}

impl ContourSpec {
    pub fn new(radius: f64, samples: usize) -> Result<Self, OracleError> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(OracleError::InvalidContour(format!("radius must be positive, got {}", radius)));
        }
        if samples < 16 {
            return Err(OracleError::InvalidContour(format!("need at least 16 samples, got {}", samples)));
        }
        Ok(ContourSpec { radius, samples })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn samples(&self) -> usize {
        self.samples
    }
}

impl Default for ContourSpec {
    fn default() -> Self {
        ContourSpec { radius: 0.5, samples: 512 }
    }
}

fn on_s(p: &MultiPoly) -> Vec<Complex64> {
    // coefficients of p(0, y) by power of y
    let mut c = Vec::new();
    for (m, a) in p.terms() {
        if m.exponents()[0] != 0 {
            continue;
        }
        let e = m.exponents()[1] as usize;
        if c.len() <= e {
            c.resize(e + 1, Complex64::new(0.0, 0.0));
        }
        c[e] += a.to_complex64();
    }
    c
}

fn horner(c: &[Complex64], y: Complex64) -> Complex64 {
    c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, a| acc * y + a)
}

/// `(1/2πi) ∮ ((∂A/∂x + ∂B/∂y)/B)(0, y) dy` by the trapezoidal rule.
pub fn contour_residue_numeric_with(
    input: &SurfaceFieldInput,
    spec: ContourSpec,
    exec: Exec,
) -> Result<Complex64, OracleError> {
    let da = input.a().partial_derivative("x").map_err(ResidueError::from)?;
    let db = input.b().partial_derivative("y").map_err(ResidueError::from)?;
    let num = on_s(&(&da + &db));
    let den = on_s(input.b());
    if den.iter().all(|c| c.norm() == 0.0) {
        return Err(ResidueError::ZeroOnS.into());
    }
    let n = spec.samples;
    let values = exec.map_range(n, |k| {
        let y = Complex64::from_polar(spec.radius, 2.0 * PI * k as f64 / n as f64);
        let b = horner(&den, y);
        (b.norm(), horner(&num, y) / b * y)
    });
    let min_abs = values.iter().map(|(b, _)| *b).fold(f64::INFINITY, f64::min);
    if min_abs < POLE_FLOOR {
        return Err(OracleError::PoleOnContour { radius: spec.radius, min_abs });
    }
    let sum: Complex64 = values.iter().map(|(_, f)| f).sum();
    Ok(sum / n as f64)
}

pub fn contour_residue_numeric(input: &SurfaceFieldInput, spec: ContourSpec) -> Result<Complex64, OracleError> {
    contour_residue_numeric_with(input, spec, Exec::default())
}
