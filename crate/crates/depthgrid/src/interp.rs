//! Uniform grid downsampling and FIR upsampling.
//!
//! Downsampling keeps phase-0 samples (even row/column indices) and expects
//! odd dimensions so that the round trip through half-sample upsampling
//! restores the original size exactly: a `(2k+1)`-long axis decimates to
//! `k+1` samples and interpolates back to `2k+1`.
//!
//! Upsampling inserts `N` samples per interval, giving `K*(1+N) - N` samples
//! per axis. Known pixels pass through untouched; inserted samples are tap
//! sums over clamped (edge-replicated) neighbors. The 2D pass is separable:
//! rows first, then columns. [`upsample_bruteforce`] computes the same grid
//! by direct per-pixel classification and exists as an independent check.

use num_traits::ToPrimitive;
use thiserror::Error;

use crate::filters::{phase_filters, FilterError, FilterKind, FilterSpec, Rational};
use crate::image::{DepthImage, ImageError, RealImage};

#[derive(Debug, Error)]
pub enum InterpError {
    #[error("{axis} has even length {len}; apply crop_to_odd before downsampling")]
    EvenDimension { axis: &'static str, len: usize },
    #[error("need at least 2 samples per axis to interpolate, got {len}")]
    TooShort { len: usize },
    #[error("sampling interval T must be at least 1")]
    ZeroInterval,
    #[error("a single filter describes one insertion phase; N = {n} needs a per-phase FilterBank")]
    PhaseMismatch { n: usize },
    #[error(transparent)]
    Filter(#[from] FilterError),
    #[error(transparent)]
    Image(#[from] ImageError),
}

/// Sampling-grid arithmetic: source interval `T`, inserted samples `N`, and
/// the derived post-interpolation interval `D = T/(1+N)` per axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    t_v: u32,
    t_h: u32,
    n_v: u32,
    n_h: u32,
}

impl GridSpec {
    pub fn new(t_v: u32, t_h: u32, n_v: u32, n_h: u32) -> Result<Self, InterpError> {
        if t_v == 0 || t_h == 0 {
            return Err(InterpError::ZeroInterval);
        }
        Ok(Self { t_v, t_h, n_v, n_h })
    }

    /// The halving layout used by the benchmark pipeline: T = 2, N = 1, D = 1.
    pub fn halving() -> Self {
        Self {
            t_v: 2,
            t_h: 2,
            n_v: 1,
            n_h: 1,
        }
    }

    pub fn t_v(&self) -> u32 {
        self.t_v
    }

    pub fn t_h(&self) -> u32 {
        self.t_h
    }

    pub fn n_v(&self) -> u32 {
        self.n_v
    }

    pub fn n_h(&self) -> u32 {
        self.n_h
    }

    /// Post-interpolation vertical interval `D_v = T_v / (1 + N_v)`, exact.
    pub fn d_v(&self) -> Rational {
        crate::filters::rational(i64::from(self.t_v), i64::from(self.n_v) + 1)
    }

    /// Post-interpolation horizontal interval `D_h = T_h / (1 + N_h)`, exact.
    pub fn d_h(&self) -> Rational {
        crate::filters::rational(i64::from(self.t_h), i64::from(self.n_h) + 1)
    }

    /// Samples per axis after inserting `n` per interval: `k*(1+n) - n`.
    pub fn upsampled_len(k: usize, n: usize) -> usize {
        k * (1 + n) - n
    }
}

/// One interpolation filter per insertion phase `m/(1+N)`, `m = 1..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterBank {
    phases: Vec<FilterSpec>,
}

impl FilterBank {
    /// No insertion (N = 0); upsampling with it is the identity.
    pub fn identity() -> Self {
        Self { phases: Vec::new() }
    }

    /// Single half-sample phase (N = 1).
    pub fn half_pel(filter: FilterSpec) -> Self {
        Self {
            phases: vec![filter],
        }
    }

    /// Per-phase filters for a built-in kind. Lagrange-derived kinds
    /// (linear average, grid adaptive) generalize to any N; the fixed
    /// half-sample sets do not.
    pub fn for_kind(kind: FilterKind, n_insert: usize) -> Result<Self, FilterError> {
        Ok(Self {
            phases: phase_filters(kind, n_insert)?,
        })
    }

    pub fn n_insert(&self) -> usize {
        self.phases.len()
    }

    pub fn phases(&self) -> &[FilterSpec] {
        &self.phases
    }
}

/// Drops the last row and/or column so both dimensions are odd.
pub fn crop_to_odd(image: &DepthImage) -> DepthImage {
    let new_w = if image.width() % 2 == 0 {
        image.width() - 1
    } else {
        image.width()
    };
    let new_h = if image.height() % 2 == 0 {
        image.height() - 1
    } else {
        image.height()
    };
    if (new_w, new_h) == (image.width(), image.height()) {
        return image.clone();
    }
    let mut samples = Vec::with_capacity(new_w * new_h);
    for row in 0..new_h {
        let start = row * image.width();
        samples.extend_from_slice(&image.samples()[start..start + new_w]);
    }
    DepthImage::new(new_w, new_h, image.max_value(), samples).expect("crop keeps invariants")
}

fn decimate<T: Copy>(samples: &[T], width: usize, height: usize) -> (Vec<T>, usize, usize) {
    let out_w = (width + 1) / 2;
    let out_h = (height + 1) / 2;
    let mut out = Vec::with_capacity(out_w * out_h);
    for row in (0..height).step_by(2) {
        for col in (0..width).step_by(2) {
            out.push(samples[row * width + col]);
        }
    }
    (out, out_w, out_h)
}

/// Halves both dimensions by keeping even-indexed rows and columns. Requires
/// odd dimensions so the half-sample round trip restores the original size.
pub fn downsample(image: &DepthImage) -> Result<DepthImage, InterpError> {
    check_odd(image.width(), image.height())?;
    let (samples, w, h) = decimate(image.samples(), image.width(), image.height());
    Ok(DepthImage::new(w, h, image.max_value(), samples).expect("decimation keeps invariants"))
}

/// Real-pipeline variant of [`downsample`].
pub fn downsample_real(image: &RealImage) -> Result<RealImage, InterpError> {
    check_odd(image.width(), image.height())?;
    let (samples, w, h) = decimate(image.samples(), image.width(), image.height());
    Ok(RealImage::new(w, h, samples).expect("decimation keeps invariants"))
}

fn check_odd(width: usize, height: usize) -> Result<(), InterpError> {
    if width % 2 == 0 {
        return Err(InterpError::EvenDimension {
            axis: "width",
            len: width,
        });
    }
    if height % 2 == 0 {
        return Err(InterpError::EvenDimension {
            axis: "height",
            len: height,
        });
    }
    Ok(())
}

/// Precomputed f64 view of one phase filter.
struct PhaseKernel {
    taps: Vec<f64>,
    offsets: Vec<i64>,
}

impl PhaseKernel {
    fn of(filter: &FilterSpec) -> Self {
        Self {
            taps: filter.taps_f64(),
            offsets: filter.offsets().to_vec(),
        }
    }

    /// Tap sum over clamped neighbors of insertion interval `i`.
    #[inline]
    fn apply(&self, samples: &[f64], i: usize) -> f64 {
        let last = (samples.len() - 1) as i64;
        self.taps
            .iter()
            .zip(&self.offsets)
            .map(|(&t, &off)| t * samples[(i as i64 + off).clamp(0, last) as usize])
            .sum()
    }
}

fn upsample_axis(samples: &[f64], kernels: &[PhaseKernel]) -> Vec<f64> {
    let n = kernels.len();
    let k = samples.len();
    if n == 0 || k == 1 {
        return samples.to_vec();
    }
    let mut out = vec![0.0; GridSpec::upsampled_len(k, n)];
    for (i, &s) in samples.iter().enumerate() {
        out[i * (n + 1)] = s;
    }
    for i in 0..k - 1 {
        for (m, kernel) in kernels.iter().enumerate() {
            out[i * (n + 1) + m + 1] = kernel.apply(samples, i);
        }
    }
    out
}

/// Interpolates one real-valued sequence, inserting `n_insert` samples per
/// interval. Known samples pass through exactly; boundary taps replicate the
/// edge sample. A single filter describes the half-sample phase, so
/// `n_insert` must be 0 or 1 here; use [`upsample_1d_bank`] for larger N.
pub fn upsample_1d(
    samples: &[f64],
    filter: &FilterSpec,
    n_insert: usize,
) -> Result<Vec<f64>, InterpError> {
    upsample_1d_bank(samples, &single_phase_bank(filter, n_insert)?)
}

/// Interpolates one sequence with a per-phase filter bank.
pub fn upsample_1d_bank(samples: &[f64], bank: &FilterBank) -> Result<Vec<f64>, InterpError> {
    if samples.len() < 2 {
        return Err(InterpError::TooShort { len: samples.len() });
    }
    let kernels: Vec<PhaseKernel> = bank.phases.iter().map(PhaseKernel::of).collect();
    Ok(upsample_axis(samples, &kernels))
}

fn single_phase_bank(filter: &FilterSpec, n_insert: usize) -> Result<FilterBank, InterpError> {
    match n_insert {
        0 => Ok(FilterBank::identity()),
        1 => Ok(FilterBank::half_pel(filter.clone())),
        n => Err(InterpError::PhaseMismatch { n }),
    }
}

/// Separable 2D upsampling on the real pipeline: all rows first, then all
/// columns of the widened intermediate. Row/column order does not change the
/// result beyond float round-off.
pub fn upsample_real(
    image: &RealImage,
    filter: &FilterSpec,
    n_v: usize,
    n_h: usize,
) -> Result<RealImage, InterpError> {
    upsample_real_bank(
        image,
        &single_phase_bank(filter, n_v)?,
        &single_phase_bank(filter, n_h)?,
    )
}

/// Separable 2D upsampling with independent per-axis filter banks.
pub fn upsample_real_bank(
    image: &RealImage,
    bank_v: &FilterBank,
    bank_h: &FilterBank,
) -> Result<RealImage, InterpError> {
    let (w, h) = (image.width(), image.height());
    let (n_v, n_h) = (bank_v.n_insert(), bank_h.n_insert());
    let kernels_h: Vec<PhaseKernel> = bank_h.phases.iter().map(PhaseKernel::of).collect();
    let kernels_v: Vec<PhaseKernel> = bank_v.phases.iter().map(PhaseKernel::of).collect();

    let out_w = GridSpec::upsampled_len(w, if w == 1 { 0 } else { n_h });
    let out_h = GridSpec::upsampled_len(h, if h == 1 { 0 } else { n_v });

    // Row pass.
    let mut widened = Vec::with_capacity(out_w * h);
    for row in 0..h {
        let line = &image.samples()[row * w..(row + 1) * w];
        if w == 1 {
            widened.extend_from_slice(line);
        } else {
            widened.extend(upsample_axis(line, &kernels_h));
        }
    }

    // Column pass.
    let mut out = vec![0.0; out_w * out_h];
    let mut column = vec![0.0; h];
    for col in 0..out_w {
        for row in 0..h {
            column[row] = widened[row * out_w + col];
        }
        if h == 1 {
            out[col] = column[0];
        } else {
            for (row, &value) in upsample_axis(&column, &kernels_v).iter().enumerate() {
                out[row * out_w + col] = value;
            }
        }
    }
    Ok(RealImage::new(out_w, out_h, out).expect("separable pass keeps invariants"))
}

/// Integer-pipeline upsampling: runs the real pipeline, then rounds half-up
/// and clamps to `[0, max_value]`. Known pixels survive bit-exactly.
pub fn upsample(
    image: &DepthImage,
    filter: &FilterSpec,
    n_v: usize,
    n_h: usize,
) -> Result<DepthImage, InterpError> {
    let real = upsample_real(&image.to_real(), filter, n_v, n_h)?;
    Ok(real.to_depth(image.max_value())?)
}

/// Integer-pipeline upsampling with per-axis filter banks.
pub fn upsample_bank(
    image: &DepthImage,
    bank_v: &FilterBank,
    bank_h: &FilterBank,
) -> Result<DepthImage, InterpError> {
    let real = upsample_real_bank(&image.to_real(), bank_v, bank_h)?;
    Ok(real.to_depth(image.max_value())?)
}

/// Direct 2D evaluation of the half-sample upsampling grid, with no separable
/// pass structure: every output pixel is classified as original, row-insert,
/// column-insert, or center-insert, and center inserts apply the outer
/// product of the two tap sets to the 2D neighborhood. Kept deliberately
/// independent of [`upsample_real`] as a cross-check.
pub fn upsample_bruteforce(
    image: &RealImage,
    filter: &FilterSpec,
    n_v: usize,
    n_h: usize,
) -> Result<RealImage, InterpError> {
    if n_v > 1 || n_h > 1 {
        return Err(InterpError::PhaseMismatch { n: n_v.max(n_h) });
    }
    let (w, h) = (image.width(), image.height());
    let taps = filter.taps_f64();
    let offsets = filter.offsets();

    let eff_n_h = if w == 1 { 0 } else { n_h };
    let eff_n_v = if h == 1 { 0 } else { n_v };
    let out_w = GridSpec::upsampled_len(w, eff_n_h);
    let out_h = GridSpec::upsampled_len(h, eff_n_v);

    let clamp_row = |r: i64| -> usize { r.clamp(0, h as i64 - 1) as usize };
    let clamp_col = |c: i64| -> usize { c.clamp(0, w as i64 - 1) as usize };

    let mut out = vec![0.0; out_w * out_h];
    for y in 0..out_h {
        let (qv, rv) = (y / (eff_n_v + 1), y % (eff_n_v + 1));
        for x in 0..out_w {
            let (qh, rh) = (x / (eff_n_h + 1), x % (eff_n_h + 1));
            let value = match (rv, rh) {
                (0, 0) => image.get(qv, qh),
                (0, _) => {
                    let mut acc = 0.0;
                    for (t, &off) in taps.iter().zip(offsets) {
                        acc += t * image.get(qv, clamp_col(qh as i64 + off));
                    }
                    acc
                }
                (_, 0) => {
                    let mut acc = 0.0;
                    for (t, &off) in taps.iter().zip(offsets) {
                        acc += t * image.get(clamp_row(qv as i64 + off), qh);
                    }
                    acc
                }
                _ => {
                    let mut acc = 0.0;
                    for (tv, &ov) in taps.iter().zip(offsets) {
                        let row = clamp_row(qv as i64 + ov);
                        for (th, &oh) in taps.iter().zip(offsets) {
                            acc += tv * th * image.get(row, clamp_col(qh as i64 + oh));
                        }
                    }
                    acc
                }
            };
            out[y * out_w + x] = value;
        }
    }
    Ok(RealImage::new(out_w, out_h, out).expect("bruteforce keeps invariants"))
}

/// Width (in output pixels) of the border region whose values can be touched
/// by edge clamping; excluding it isolates filter quality from the boundary
/// policy.
pub fn clamp_margin(filter: &FilterSpec, n_insert: usize) -> usize {
    let off_min = filter.offsets().first().copied().unwrap_or(0);
    let off_max = filter.offsets().last().copied().unwrap_or(0);
    let reach = (-off_min).max(off_max).max(0).to_usize().unwrap_or(0);
    (1 + n_insert) * reach
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filters::builtin_filter;
    use proptest::prelude::*;

    fn depth(width: usize, height: usize, samples: Vec<u16>) -> DepthImage {
        DepthImage::new(width, height, 255, samples).unwrap()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn grid_spec_interval_identity() {
        for (t, n) in [(2u32, 1u32), (3, 2), (4, 0), (6, 5)] {
            let spec = GridSpec::new(t, t, n, n).unwrap();
            let expanded = spec.d_v() * crate::filters::rational(i64::from(n) + 1, 1);
            assert_eq!(expanded, crate::filters::rational(i64::from(t), 1));
        }
        let halving = GridSpec::halving();
        assert_eq!(halving.d_h(), crate::filters::rational(1, 1));
    }

    #[test]
    fn downsample_keeps_phase_zero() {
        let img = depth(5, 1, vec![10, 15, 20, 25, 30]);
        assert_eq!(downsample(&img).unwrap().samples(), &[10, 20, 30]);
    }

    #[test]
    fn downsample_3x3_keeps_corners() {
        let img = depth(3, 3, (1..=9).collect());
        let down = downsample(&img).unwrap();
        assert_eq!((down.width(), down.height()), (2, 2));
        assert_eq!(down.samples(), &[1, 3, 7, 9]);
    }

    #[test]
    fn downsample_even_dimension_rejected() {
        let img = depth(4, 3, vec![0; 12]);
        let err = downsample(&img).unwrap_err();
        assert!(err.to_string().contains("crop_to_odd"));
    }

    #[test]
    fn crop_to_odd_examples() {
        let odd = depth(5, 5, vec![1; 25]);
        assert_eq!(crop_to_odd(&odd), odd);

        let img = depth(6, 5, (0..30).map(|i| i as u16).collect());
        let cropped = crop_to_odd(&img);
        assert_eq!((cropped.width(), cropped.height()), (5, 5));
        for row in 0..5 {
            for col in 0..5 {
                assert_eq!(cropped.get(row, col), img.get(row, col));
            }
        }

        let big = depth(480, 2, vec![3; 960]);
        let c = crop_to_odd(&big);
        assert_eq!((c.width(), c.height()), (479, 1));
    }

    #[test]
    fn size_round_trip_5x7() {
        let img = depth(7, 5, (0..35).map(|i| (i * 3) as u16).collect());
        let down = downsample(&img).unwrap();
        assert_eq!((down.width(), down.height()), (4, 3));
        let up = upsample(&down, &builtin_filter(FilterKind::Grid4), 1, 1).unwrap();
        assert_eq!((up.width(), up.height()), (7, 5));
    }

    #[test]
    fn linear_midpoints() {
        let out = upsample_1d(
            &[10.0, 20.0, 30.0],
            &builtin_filter(FilterKind::LinearAverage),
            1,
        )
        .unwrap();
        assert_eq!(out, vec![10.0, 15.0, 20.0, 25.0, 30.0]);
    }

    #[test]
    fn grid4_with_clamped_edges() {
        // First insert reads clamped taps (10,10,20,30); second (10,20,30,30).
        let out = upsample_1d(&[10.0, 20.0, 30.0], &builtin_filter(FilterKind::Grid4), 1).unwrap();
        let expect = [10.0, 14.375, 20.0, 25.625, 30.0];
        assert!(close(&out, &expect, 1e-12), "{out:?}");
    }

    #[test]
    fn constant_sequences_survive_all_builtins() {
        for kind in FilterKind::ALL {
            let out = upsample_1d(&[7.0; 5], &builtin_filter(kind), 1).unwrap();
            assert_eq!(out.len(), 9);
            assert!(out.iter().all(|&x| (x - 7.0).abs() < 1e-12), "{kind}");
        }
    }

    #[test]
    fn upsample_1d_preconditions() {
        let f = builtin_filter(FilterKind::Grid4);
        assert!(matches!(
            upsample_1d(&[1.0], &f, 1),
            Err(InterpError::TooShort { len: 1 })
        ));
        assert!(matches!(
            upsample_1d(&[1.0, 2.0], &f, 2),
            Err(InterpError::PhaseMismatch { n: 2 })
        ));
    }

    #[test]
    fn two_d_size_formula() {
        let img = depth(3, 3, vec![5; 9]);
        let up = upsample(&img, &builtin_filter(FilterKind::Grid4), 1, 1).unwrap();
        assert_eq!((up.width(), up.height()), (5, 5));
        assert!(up.samples().iter().all(|&s| s == 5));

        for (k, n) in [(2usize, 0usize), (3, 1), (4, 2), (9, 3)] {
            assert_eq!(GridSpec::upsampled_len(k, n), k * (1 + n) - n);
        }
    }

    #[test]
    fn pass_through_is_exact() {
        let img = depth(5, 3, (0..15).map(|i| (i * 17 % 256) as u16).collect());
        let up = upsample(&img, &builtin_filter(FilterKind::H264Six), 1, 1).unwrap();
        for v in 0..3 {
            for h in 0..5 {
                assert_eq!(up.get(2 * v, 2 * h), img.get(v, h));
            }
        }
    }

    #[test]
    fn row_column_order_is_interchangeable() {
        let image = RealImage::from_fn(9, 7, |v, h| {
            (v as f64).mul_add(3.7, (h as f64) * 1.3) + (v * h) as f64 * 0.21
        })
        .unwrap();
        for kind in FilterKind::ALL {
            let filter = builtin_filter(kind);
            let rows_first = upsample_real(&image, &filter, 1, 1).unwrap();

            // Column-major order via transpose - upsample - transpose.
            let t = RealImage::from_fn(7, 9, |v, h| image.get(h, v)).unwrap();
            let t_up = upsample_real(&t, &filter, 1, 1).unwrap();
            let cols_first = RealImage::from_fn(17, 13, |v, h| t_up.get(h, v)).unwrap();

            assert!(
                close(rows_first.samples(), cols_first.samples(), 1e-12),
                "{kind}"
            );
        }
    }

    #[test]
    fn bruteforce_matches_separable_on_ramp() {
        let ramp = RealImage::from_fn(7, 5, |v, h| (2 * v + 3 * h) as f64).unwrap();
        for kind in FilterKind::ALL {
            let filter = builtin_filter(kind);
            let a = upsample_real(&ramp, &filter, 1, 1).unwrap();
            let b = upsample_bruteforce(&ramp, &filter, 1, 1).unwrap();
            assert!(close(a.samples(), b.samples(), 1e-12), "{kind}");
        }
    }

    #[test]
    fn bruteforce_single_row_degenerates_to_1d() {
        let row = RealImage::new(3, 1, vec![10.0, 20.0, 30.0]).unwrap();
        let filter = builtin_filter(FilterKind::Grid4);
        let b = upsample_bruteforce(&row, &filter, 1, 1).unwrap();
        let expect = upsample_1d(&[10.0, 20.0, 30.0], &filter, 1).unwrap();
        assert_eq!((b.width(), b.height()), (5, 1));
        assert!(close(b.samples(), &expect, 1e-12));
    }

    #[test]
    fn bank_insertion_of_two_per_interval() {
        let bank = FilterBank::for_kind(FilterKind::Grid4, 2).unwrap();
        // Cubic sequence: interior thirds must be reproduced exactly.
        let cubic = |t: f64| 0.5 * t * t * t - 2.0 * t * t + 3.0 * t + 1.0;
        let samples: Vec<f64> = (0..8).map(|i| cubic(i as f64)).collect();
        let out = upsample_1d_bank(&samples, &bank).unwrap();
        assert_eq!(out.len(), 8 * 3 - 2);
        for (i, &value) in out.iter().enumerate() {
            let t = i as f64 / 3.0;
            if i % 3 == 0 {
                assert_eq!(value, samples[i / 3]);
            } else if (6..=out.len() - 7).contains(&i) {
                assert!((value - cubic(t)).abs() < 1e-9, "i={i} {value}");
            }
        }
    }

    #[test]
    fn two_d_bank_insertion() {
        let bank = FilterBank::for_kind(FilterKind::Grid4, 2).unwrap();
        let img = depth(4, 3, vec![9; 12]);
        let up = upsample_bank(&img, &bank, &bank).unwrap();
        assert_eq!((up.width(), up.height()), (4 * 3 - 2, 3 * 3 - 2));
        assert!(up.samples().iter().all(|&s| s == 9));

        // Pass-through on non-constant content.
        let img = depth(4, 3, (0..12).map(|i| (i * 11) as u16).collect());
        let up = upsample_bank(&img, &bank, &bank).unwrap();
        for v in 0..3 {
            for h in 0..4 {
                assert_eq!(up.get(3 * v, 3 * h), img.get(v, h));
            }
        }
    }

    #[test]
    fn sixteen_bit_pipeline_keeps_peak_and_clamps() {
        let img = DepthImage::new(5, 5, 65535, (0..25).map(|i| i * 2500).collect()).unwrap();
        let up = upsample(&img, &builtin_filter(FilterKind::Grid4), 1, 1).unwrap();
        assert_eq!(up.max_value(), 65535);
        assert!(up.samples().iter().all(|&s| s <= 65535));
        for v in 0..5 {
            for h in 0..5 {
                assert_eq!(up.get(2 * v, 2 * h), img.get(v, h));
            }
        }
    }

    #[test]
    fn clamp_margin_widths() {
        assert_eq!(
            clamp_margin(&builtin_filter(FilterKind::LinearAverage), 1),
            2
        );
        assert_eq!(clamp_margin(&builtin_filter(FilterKind::Grid4), 1), 4);
        assert_eq!(clamp_margin(&builtin_filter(FilterKind::H264Six), 1), 6);
        assert_eq!(clamp_margin(&builtin_filter(FilterKind::Grid4), 2), 6);
    }

    proptest! {
        // Separable and direct 2D evaluation agree on random real images.
        #[test]
        fn bruteforce_equivalence(
            width in 2usize..10,
            height in 2usize..10,
            seed in any::<u64>(),
        ) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let img = RealImage::from_fn(width, height, |_, _| rng.random_range(0.0..255.0))
                .unwrap();
            for kind in FilterKind::ALL {
                let filter = builtin_filter(kind);
                let a = upsample_real(&img, &filter, 1, 1).unwrap();
                let b = upsample_bruteforce(&img, &filter, 1, 1).unwrap();
                prop_assert!(close(a.samples(), b.samples(), 1e-9));
            }
        }

        // Integer pipeline stays within [0, max_value] even with overshoot.
        #[test]
        fn integer_outputs_in_range(seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let samples: Vec<u16> = (0..49).map(|_| rng.random_range(0..=255)).collect();
            let img = depth(7, 7, samples);
            let up = upsample(&img, &builtin_filter(FilterKind::Grid4), 1, 1).unwrap();
            prop_assert!(up.samples().iter().all(|&s| s <= 255));
        }
    }
}
