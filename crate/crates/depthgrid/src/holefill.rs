//! Hole detection and masked 3x3 weighted-average filling.
//!
//! A hole is a zero-valued pixel. Filling runs in Jacobi-style passes: every
//! pass reads only the previous pass's grid, so the result is independent of
//! scan order. Within a pass, each hole that has at least one valid (non-hole,
//! in-bounds) neighbor is replaced by the weighted average of those neighbors;
//! neighbors that are holes themselves are ignored. Passes repeat until no
//! holes remain, a pass fills nothing, or the pass budget is exhausted.

use std::num::NonZeroUsize;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::filters::{rational, Rational};
use crate::image::{DepthImage, HoleMask};

#[derive(Debug, Error, PartialEq)]
pub enum KernelError {
    #[error("fill kernel needs at least one nonzero off-center weight")]
    NoOffCenterWeight,
    #[error("fill kernel weights must be non-negative")]
    NegativeWeight,
}

/// 3x3 neighbor weights for hole filling. The default is the binomial
/// approximation of a Gaussian, `[[1,2,1],[2,4,2],[1,2,1]]`.
///
/// The center weight only participates when `center_included` is set, and
/// even then only for a valid center sample; during hole filling the center
/// is by definition a hole, so the default excludes it.
#[derive(Debug, Clone, PartialEq)]
pub struct FillKernel {
    weights: [[Rational; 3]; 3],
    center_included: bool,
}

impl FillKernel {
    pub fn new(weights: [[Rational; 3]; 3], center_included: bool) -> Result<Self, KernelError> {
        let mut any_off_center = false;
        for (r, row) in weights.iter().enumerate() {
            for (c, w) in row.iter().enumerate() {
                if w.is_negative() {
                    return Err(KernelError::NegativeWeight);
                }
                if (r, c) != (1, 1) && !w.is_zero() {
                    any_off_center = true;
                }
            }
        }
        if !any_off_center {
            return Err(KernelError::NoOffCenterWeight);
        }
        Ok(Self {
            weights,
            center_included,
        })
    }

    /// The integer binomial kernel `[[1,2,1],[2,4,2],[1,2,1]]`, center excluded.
    pub fn binomial() -> Self {
        let w = |n: i64| rational(n, 1);
        Self {
            weights: [[w(1), w(2), w(1)], [w(2), w(4), w(2)], [w(1), w(2), w(1)]],
            center_included: false,
        }
    }

    pub fn weights(&self) -> &[[Rational; 3]; 3] {
        &self.weights
    }

    pub fn center_included(&self) -> bool {
        self.center_included
    }
}

impl Default for FillKernel {
    fn default() -> Self {
        Self::binomial()
    }
}

/// What a [`fill_holes`] run did: how many passes ran, and how many holes
/// each pass closed. `holes_remaining` is always `holes_initial` minus the
/// sum of `per_pass_filled`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FillReport {
    pub passes_run: usize,
    pub holes_initial: usize,
    pub holes_remaining: usize,
    pub per_pass_filled: Vec<usize>,
}

/// Marks every zero-valued pixel.
pub fn detect_holes(image: &DepthImage) -> HoleMask {
    let flags = image.samples().iter().map(|&s| s == 0).collect();
    HoleMask::from_flags(image.width(), image.height(), flags)
}

/// Fills holes by repeated masked weighted averaging. Non-hole pixels are
/// preserved bit-exactly; filled values are rounded half-up and always lie
/// within the range of their contributing neighbors. An image whose holes
/// are unreachable (e.g. all-zero) is returned unchanged.
pub fn fill_holes(
    image: &DepthImage,
    kernel: &FillKernel,
    max_passes: NonZeroUsize,
) -> (DepthImage, FillReport) {
    let (width, height) = (image.width(), image.height());
    let mut current = image.samples().to_vec();
    let holes_initial = current.iter().filter(|&&s| s == 0).count();
    let mut holes_left = holes_initial;
    let mut per_pass_filled = Vec::new();

    while holes_left > 0 && per_pass_filled.len() < max_passes.get() {
        let mut next = current.clone();
        let mut filled = 0usize;
        for row in 0..height {
            for col in 0..width {
                if current[row * width + col] != 0 {
                    continue;
                }
                if let Some(value) = weighted_fill(&current, width, height, row, col, kernel) {
                    next[row * width + col] = value;
                    filled += 1;
                }
            }
        }
        per_pass_filled.push(filled);
        holes_left -= filled;
        current = next;
        if filled == 0 {
            break;
        }
    }

    let report = FillReport {
        passes_run: per_pass_filled.len(),
        holes_initial,
        holes_remaining: holes_left,
        per_pass_filled,
    };
    let filled_image = DepthImage::new(width, height, image.max_value(), current)
        .expect("fill preserves image invariants");
    (filled_image, report)
}

/// Weighted average of the valid neighbors of `(row, col)`, rounded half-up.
/// `None` when no weighted valid neighbor exists.
fn weighted_fill(
    samples: &[u16],
    width: usize,
    height: usize,
    row: usize,
    col: usize,
    kernel: &FillKernel,
) -> Option<u16> {
    let mut num = Rational::zero();
    let mut den = Rational::zero();
    for dv in -1i64..=1 {
        for dh in -1i64..=1 {
            if dv == 0 && dh == 0 && !kernel.center_included {
                continue;
            }
            let (v, h) = (row as i64 + dv, col as i64 + dh);
            if v < 0 || h < 0 || v >= height as i64 || h >= width as i64 {
                continue;
            }
            let sample = samples[v as usize * width + h as usize];
            if sample == 0 {
                continue; // neighbor is a hole itself
            }
            let w = &kernel.weights[(dv + 1) as usize][(dh + 1) as usize];
            if w.is_zero() {
                continue;
            }
            num += w * Rational::from_integer(BigInt::from(sample));
            den += w;
        }
    }
    if den.is_zero() {
        return None;
    }
    // Exact round-half-up: floor(num/den + 1/2). The mean lies within the
    // neighbor range, so the result always fits a valid sample.
    let value = ((num / den) + rational(1, 2)).floor();
    Some(
        value
            .to_integer()
            .to_u16()
            .expect("mean within sample range"),
    )
}
