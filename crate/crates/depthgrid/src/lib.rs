//! depthgrid: depth-image enhancement and measurement toolkit.
//!
//! The pipeline stages are:
//!
//! 1. **holefill** - detect zero-valued (invalid) pixels and close them by
//!    masked 3x3 weighted averaging.
//! 2. **filters** - FIR interpolation filters with exact rational taps,
//!    including a grid-adaptive design derived from the Lagrange basis.
//! 3. **interp** - uniform downsampling and separable FIR upsampling over
//!    integer or real-valued grids.
//! 4. **metrics** - MSE and PSNR scoring.
//! 5. **bench** - the halve/re-interpolate benchmark over image directories,
//!    with CSV/Markdown reporting.
//! 6. **anfis** - a first-order Sugeno neuro-fuzzy model trained on benchmark
//!    rows to predict PSNR from image size and filter choice.
//!
//! The `depthgrid` binary exposes each stage as a subcommand; see the crate
//! README for a walkthrough.

pub mod anfis;
pub mod bench;
pub mod cli;
pub mod filters;
pub mod holefill;
pub mod image;
pub mod interp;
pub mod metrics;
pub mod pgm;
pub mod synth;

pub use image::{DepthImage, HoleMask, RealImage};
