//! Benchmark pipeline: hole-fill, crop, halve, re-interpolate, score.
//!
//! For every image and filter the pipeline computes
//! `reference = crop_to_odd(fill_holes(image))` and
//! `test = upsample(downsample(reference))`, then scores PSNR between the
//! two. Reference and reconstruction always share dimensions, so rows are
//! directly comparable across filters. Suites run images in parallel but
//! produce deterministically ordered output.

use std::fs;
use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::anfis::{AnfisError, Dataset};
use crate::filters::{builtin_filter, FilterKind};
use crate::holefill::{fill_holes, FillKernel};
use crate::image::DepthImage;
use crate::interp::{clamp_margin, crop_to_odd, downsample, upsample, GridSpec, InterpError};
use crate::metrics::{psnr_with_margin, MetricsError};
use crate::pgm::{load_pgm, PgmError};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("no readable PGM images in {dir}")]
    EmptyDirectory { dir: String },
    #[error("benchmark needs a non-empty filter set")]
    EmptyFilterSet,
    #[error("cannot list {dir}: {source}")]
    ReadDir {
        dir: String,
        #[source]
        source: std::io::Error,
    },
    #[error("every row has infinite PSNR; nothing to train on")]
    AllInfinitePsnr,
    #[error(transparent)]
    Interp(#[from] InterpError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Anfis(#[from] AnfisError),
    #[error("csv: {reason}")]
    Csv { reason: String },
    #[error("{reason}")]
    Internal { reason: String },
}

/// One (image, filter) measurement.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub image_name: String,
    /// Pixel count of the hole-filled, cropped reference image.
    pub image_pixels: usize,
    pub filter: FilterKind,
    pub mse: f64,
    /// `f64::INFINITY` on perfect reconstruction.
    pub psnr_db: f64,
    pub wall_time_ms: f64,
}

/// Table layout for [`export_table`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TableFormat {
    #[default]
    Csv,
    Markdown,
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub filters: Vec<FilterKind>,
    pub max_fill_passes: NonZeroUsize,
    pub format: TableFormat,
    /// Worker threads for the suite; `None` uses the process default.
    pub parallelism: Option<usize>,
    /// Exclude each filter's clamp-affected border from scoring, isolating
    /// filter quality from the boundary policy.
    pub interior_only: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            filters: FilterKind::ALL.to_vec(),
            max_fill_passes: NonZeroUsize::new(64).expect("nonzero"),
            format: TableFormat::Csv,
            parallelism: None,
            interior_only: false,
        }
    }
}

/// A file the suite could not process; suites keep going past these.
#[derive(Debug, Clone, Serialize)]
pub struct RowError {
    pub file: String,
    pub message: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchSummary {
    /// Mean PSNR per filter over rows with finite PSNR, in canonical filter
    /// order.
    pub per_filter_avg: Vec<(FilterKind, f64)>,
    /// The best-scoring filter per image.
    pub per_image_best: Vec<(String, FilterKind)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchOutcome {
    pub rows: Vec<BenchRow>,
    pub summary: BenchSummary,
    pub errors: Vec<RowError>,
}

/// Hole-fills and crops the image, then reconstructs it through the
/// halve/upsample round trip with the given filter. Returns
/// `(reference, reconstruction)`, always dimension-identical.
pub fn pipeline_pair(
    image: &DepthImage,
    kind: FilterKind,
    max_fill_passes: NonZeroUsize,
) -> Result<(DepthImage, DepthImage), BenchError> {
    let (filled, _report) = fill_holes(image, &FillKernel::binomial(), max_fill_passes);
    let reference = crop_to_odd(&filled);
    let down = downsample(&reference)?;
    // T = 2, N = 1: halve, then insert one sample per interval on each axis.
    let grid = GridSpec::halving();
    let filter = builtin_filter(kind);
    let test = upsample(&down, &filter, grid.n_v() as usize, grid.n_h() as usize)?;
    debug_assert_eq!(
        (reference.width(), reference.height()),
        (test.width(), test.height())
    );
    Ok((reference, test))
}

/// Runs the full pipeline for one image and filter and scores it.
pub fn run_pipeline(
    image: &DepthImage,
    image_name: &str,
    kind: FilterKind,
    config: &BenchConfig,
) -> Result<BenchRow, BenchError> {
    let started = Instant::now();
    let (reference, test) = pipeline_pair(image, kind, config.max_fill_passes)?;
    let margin = if config.interior_only {
        clamp_margin(&builtin_filter(kind), 1)
    } else {
        0
    };
    let quality = psnr_with_margin(&reference, &test, margin)?;
    Ok(BenchRow {
        image_name: image_name.to_owned(),
        image_pixels: reference.pixels(),
        filter: kind,
        mse: quality.mse,
        psnr_db: quality.psnr_db,
        wall_time_ms: started.elapsed().as_secs_f64() * 1000.0,
    })
}

fn canonical_index(kind: FilterKind) -> usize {
    FilterKind::ALL
        .iter()
        .position(|&k| k == kind)
        .expect("known kind")
}

/// Runs every configured filter over every PGM in the directory. Unreadable
/// files become row-level error records; the suite only fails when no image
/// can be processed at all. Rows come back sorted by (image, filter) no
/// matter how the work was scheduled.
pub fn run_suite(dir: impl AsRef<Path>, config: &BenchConfig) -> Result<BenchOutcome, BenchError> {
    if config.filters.is_empty() {
        return Err(BenchError::EmptyFilterSet);
    }
    let dir = dir.as_ref();
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|source| BenchError::ReadDir {
            dir: dir.display().to_string(),
            source,
        })?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension()
                .and_then(|e| e.to_str())
                .is_some_and(|e| e.eq_ignore_ascii_case("pgm"))
        })
        .collect();
    paths.sort();

    let work = |path: &PathBuf| -> Result<Vec<BenchRow>, RowError> {
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        let image = load_pgm(path).map_err(|e: PgmError| RowError {
            file: path.display().to_string(),
            message: e.to_string(),
        })?;
        config
            .filters
            .iter()
            .map(|&kind| {
                run_pipeline(&image, &name, kind, config).map_err(|e| RowError {
                    file: path.display().to_string(),
                    message: e.to_string(),
                })
            })
            .collect()
    };

    let results: Vec<Result<Vec<BenchRow>, RowError>> = match config.parallelism {
        Some(threads) if threads > 0 => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| BenchError::Internal {
                reason: e.to_string(),
            })?
            .install(|| {
                use rayon::prelude::*;
                paths.par_iter().map(work).collect()
            }),
        _ => {
            use rayon::prelude::*;
            paths.par_iter().map(work).collect()
        }
    };

    let mut rows = Vec::new();
    let mut errors = Vec::new();
    for result in results {
        match result {
            Ok(mut image_rows) => rows.append(&mut image_rows),
            Err(error) => errors.push(error),
        }
    }
    if rows.is_empty() {
        return Err(BenchError::EmptyDirectory {
            dir: dir.display().to_string(),
        });
    }
    rows.sort_by(|a, b| {
        (a.image_name.as_str(), canonical_index(a.filter))
            .cmp(&(b.image_name.as_str(), canonical_index(b.filter)))
    });

    let summary = summarize(&rows);
    Ok(BenchOutcome {
        rows,
        summary,
        errors,
    })
}

fn summarize(rows: &[BenchRow]) -> BenchSummary {
    let mut per_filter_avg = Vec::new();
    for kind in FilterKind::ALL {
        let finite: Vec<f64> = rows
            .iter()
            .filter(|r| r.filter == kind && r.psnr_db.is_finite())
            .map(|r| r.psnr_db)
            .collect();
        if !finite.is_empty() {
            per_filter_avg.push((kind, finite.iter().sum::<f64>() / finite.len() as f64));
        }
    }

    let mut per_image_best = Vec::new();
    let mut names: Vec<&str> = rows.iter().map(|r| r.image_name.as_str()).collect();
    names.dedup();
    for name in names {
        let best = rows
            .iter()
            .filter(|r| r.image_name == name)
            .max_by(|a, b| {
                (a.psnr_db, canonical_index(b.filter))
                    .partial_cmp(&(b.psnr_db, canonical_index(a.filter)))
                    .expect("psnr is never NaN")
            })
            .expect("image has rows");
        per_image_best.push((name.to_owned(), best.filter));
    }
    BenchSummary {
        per_filter_avg,
        per_image_best,
    }
}

fn format_psnr(psnr_db: f64) -> String {
    if psnr_db.is_infinite() {
        "inf".to_owned()
    } else {
        format!("{psnr_db:.4}")
    }
}

/// Renders rows as CSV (`image,pixels,filter,mse,psnr_db,wall_time_ms`, the
/// infinity sentinel spelled `inf`) or as a Markdown matrix of images by
/// filters.
pub fn export_table(rows: &[BenchRow], format: TableFormat) -> String {
    match format {
        TableFormat::Csv => export_csv(rows),
        TableFormat::Markdown => export_markdown(rows),
    }
}

fn export_csv(rows: &[BenchRow]) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record([
            "image",
            "pixels",
            "filter",
            "mse",
            "psnr_db",
            "wall_time_ms",
        ])
        .expect("in-memory write");
    for row in rows {
        writer
            .write_record([
                row.image_name.clone(),
                row.image_pixels.to_string(),
                row.filter.to_string(),
                row.mse.to_string(),
                format_psnr(row.psnr_db),
                format!("{:.3}", row.wall_time_ms),
            ])
            .expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf8")
}

fn export_markdown(rows: &[BenchRow]) -> String {
    let kinds: Vec<FilterKind> = FilterKind::ALL
        .into_iter()
        .filter(|&k| rows.iter().any(|r| r.filter == k))
        .collect();
    let mut names: Vec<&str> = rows.iter().map(|r| r.image_name.as_str()).collect();
    names.sort_unstable();
    names.dedup();

    let mut out = String::from("| Depth image |");
    for kind in &kinds {
        out.push_str(&format!(" {} |", kind.label()));
    }
    out.push('\n');
    out.push_str("|---|");
    out.push_str(&"---|".repeat(kinds.len()));
    out.push('\n');
    for name in names {
        out.push_str(&format!("| {name} |"));
        for kind in &kinds {
            let cell = rows
                .iter()
                .find(|r| r.image_name == name && r.filter == *kind)
                .map(|r| format_psnr(r.psnr_db))
                .unwrap_or_default();
            out.push_str(&format!(" {cell} |"));
        }
        out.push('\n');
    }
    out
}

/// Parses [`export_table`]'s CSV form back into rows.
pub fn parse_table(text: &str) -> Result<Vec<BenchRow>, BenchError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| BenchError::Csv {
            reason: e.to_string(),
        })?;
        let field = |i: usize| -> Result<&str, BenchError> {
            record.get(i).ok_or_else(|| BenchError::Csv {
                reason: format!("row {}: missing field {}", line + 2, i),
            })
        };
        let parse_named = |i: usize, what: &str| -> Result<f64, BenchError> {
            let raw = field(i)?;
            if raw == "inf" {
                return Ok(f64::INFINITY);
            }
            raw.parse::<f64>().map_err(|_| BenchError::Csv {
                reason: format!("row {}: bad {what} {raw:?}", line + 2),
            })
        };
        rows.push(BenchRow {
            image_name: field(0)?.to_owned(),
            image_pixels: field(1)?.parse().map_err(|_| BenchError::Csv {
                reason: format!("row {}: bad pixel count", line + 2),
            })?,
            filter: field(2)?
                .parse()
                .map_err(|reason| BenchError::Csv { reason })?,
            mse: parse_named(3, "mse")?,
            psnr_db: parse_named(4, "psnr_db")?,
            wall_time_ms: parse_named(5, "wall_time_ms")?,
        });
    }
    Ok(rows)
}

/// Converts finite-PSNR rows into model-training data: inputs are the
/// reference pixel count and the filter's numeric id, the target is PSNR in
/// dB, min-max normalized over the rows.
pub fn build_anfis_dataset(rows: &[BenchRow]) -> Result<Dataset, BenchError> {
    let finite: Vec<(Vec<f64>, f64)> = rows
        .iter()
        .filter(|r| r.psnr_db.is_finite())
        .map(|r| {
            (
                vec![r.image_pixels as f64, f64::from(r.filter.numeric_id())],
                r.psnr_db,
            )
        })
        .collect();
    if finite.is_empty() {
        return Err(BenchError::AllInfinitePsnr);
    }
    Ok(Dataset::fit(finite)?)
}

/// Bundled reference measurements: PSNR of the four filters over six
/// Middlebury 2006 depth maps, used as the default model-training dataset
/// and by the verification suite.
pub mod refdata {
    use super::*;

    /// Scene name plus nominal third-size dimensions. No image sizes were
    /// recorded alongside these measurements, so the pixel counts are
    /// stand-ins; rerunning the benchmark over real files regenerates exact
    /// ones.
    pub const SCENES: [(&str, usize, usize); 6] = [
        ("Aloe", 427, 370),
        ("Baby2", 437, 370),
        ("Baby3", 443, 370),
        ("Bowling2", 450, 370),
        ("Cloth", 417, 370),
        ("Cloth3", 465, 370),
    ];

    /// Measured PSNR (dB) per scene, in canonical filter order
    /// (linear_average, avs4, h264_6, grid4).
    pub const PSNR_DB: [[f64; 4]; 6] = [
        [39.9108, 40.0318, 40.0684, 40.0846],
        [47.1090, 47.2672, 47.2149, 47.2845],
        [47.1809, 47.4044, 47.2218, 47.4055],
        [44.2000, 44.4352, 44.3577, 44.4295],
        [47.6444, 47.7766, 47.7397, 47.8162],
        [49.6144, 49.7569, 49.6258, 49.7836],
    ];

    /// The 24 bundled (pixels, filter id) -> PSNR rows as a fitted dataset.
    pub fn dataset() -> Dataset {
        let mut rows = Vec::with_capacity(24);
        for ((_, width, height), psnr) in SCENES.iter().zip(&PSNR_DB) {
            for (column, &kind) in FilterKind::ALL.iter().enumerate() {
                rows.push((
                    vec![(width * height) as f64, f64::from(kind.numeric_id())],
                    psnr[column],
                ));
            }
        }
        Dataset::fit(rows).expect("bundled data is well-formed")
    }

    /// Mean PSNR of one filter over the six bundled scenes.
    pub fn filter_mean(kind: FilterKind) -> f64 {
        let column = FilterKind::ALL
            .iter()
            .position(|&k| k == kind)
            .expect("known kind");
        PSNR_DB.iter().map(|row| row[column]).sum::<f64>() / PSNR_DB.len() as f64
    }
}
