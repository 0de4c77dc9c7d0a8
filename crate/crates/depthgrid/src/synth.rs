//! Deterministic synthetic test images: constants, separable polynomials, and
//! sinusoids, with optional punched-in holes.

use crate::image::{DepthImage, ImageError, RealImage};

/// How the per-axis polynomials are combined into a 2D surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Combine {
    /// `p(v) + q(h)`
    #[default]
    Add,
    /// `p(v) * q(h)`
    Mul,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SynthKind {
    Constant {
        value: f64,
    },
    /// Separable polynomial surface. Coefficients are ascending
    /// (`c0 + c1*t + c2*t^2 + c3*t^3`), at most degree 3 per axis.
    Polynomial {
        row_coeffs: Vec<f64>,
        col_coeffs: Vec<f64>,
        combine: Combine,
    },
    /// `offset + amplitude * sin(2*pi*frequency*(v + h))`
    Sinusoid {
        frequency: f64,
        amplitude: f64,
        offset: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub kind: SynthKind,
    pub width: usize,
    pub height: usize,
    /// `(row, col)` pixels zeroed out in the integer image to simulate holes.
    pub hole_pattern: Vec<(usize, usize)>,
    pub max_value: u16,
}

impl SyntheticSpec {
    pub fn new(kind: SynthKind, width: usize, height: usize, max_value: u16) -> Self {
        Self {
            kind,
            width,
            height,
            hole_pattern: Vec::new(),
            max_value,
        }
    }

    pub fn with_holes(mut self, holes: Vec<(usize, usize)>) -> Self {
        self.hole_pattern = holes;
        self
    }
}

fn poly_eval(coeffs: &[f64], t: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
}

fn validate(spec: &SyntheticSpec) -> Result<(), ImageError> {
    if spec.width == 0 || spec.height == 0 {
        return Err(ImageError::EmptyDimensions {
            width: spec.width,
            height: spec.height,
        });
    }
    if let SynthKind::Polynomial {
        row_coeffs,
        col_coeffs,
        ..
    } = &spec.kind
    {
        for coeffs in [row_coeffs, col_coeffs] {
            if coeffs.is_empty() || coeffs.len() > 4 {
                return Err(ImageError::BadPolynomialDegree { got: coeffs.len() });
            }
        }
    }
    for &(row, col) in &spec.hole_pattern {
        if row >= spec.height || col >= spec.width {
            return Err(ImageError::HoleOutOfBounds {
                row,
                col,
                width: spec.width,
                height: spec.height,
            });
        }
    }
    Ok(())
}

/// Evaluates the spec's surface exactly, without rounding or holes. This is
/// the float-pipeline companion of [`synth_image`].
pub fn synth_real(spec: &SyntheticSpec) -> Result<RealImage, ImageError> {
    validate(spec)?;
    RealImage::from_fn(spec.width, spec.height, |v, h| match &spec.kind {
        SynthKind::Constant { value } => *value,
        SynthKind::Polynomial {
            row_coeffs,
            col_coeffs,
            combine,
        } => {
            let p = poly_eval(row_coeffs, v as f64);
            let q = poly_eval(col_coeffs, h as f64);
            match combine {
                Combine::Add => p + q,
                Combine::Mul => p * q,
            }
        }
        SynthKind::Sinusoid {
            frequency,
            amplitude,
            offset,
        } => offset + amplitude * (std::f64::consts::TAU * frequency * (v + h) as f64).sin(),
    })
}

/// Integer-pipeline variant: rounds half-up, clamps to `[0, max_value]`, then
/// zeroes the hole pattern. Pure: identical spec gives identical output.
pub fn synth_image(spec: &SyntheticSpec) -> Result<DepthImage, ImageError> {
    let real = synth_real(spec)?;
    let image = real.to_depth(spec.max_value)?;
    if spec.hole_pattern.is_empty() {
        return Ok(image);
    }
    let mut samples = image.samples().to_vec();
    for &(row, col) in &spec.hole_pattern {
        samples[row * spec.width + col] = 0;
    }
    DepthImage::new(spec.width, spec.height, spec.max_value, samples)
}
