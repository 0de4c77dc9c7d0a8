//! Command-line surface: one executable, one subcommand per pipeline stage.
//!
//! Machine-readable payloads (JSON or CSV) go to stdout, diagnostics to
//! stderr. Exit codes: 0 success, 1 usage, 2 data/parse error, 3 numeric
//! failure.

use std::ffi::OsString;
use std::num::NonZeroUsize;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::anfis::{self, Dataset, TrainConfig};
use crate::bench::{
    build_anfis_dataset, export_table, run_suite, BenchConfig, BenchError, TableFormat,
};
use crate::filters::{builtin_filter, lagrange_filter, parse_rational, FilterKind};
use crate::holefill::{fill_holes, FillKernel};
use crate::interp::{upsample_bank, FilterBank};
use crate::metrics::psnr;
use crate::pgm::{load_pgm, save_pgm, PgmFormat};

/// Exit code 1: bad arguments. 2: unreadable or malformed data. 3: a
/// numerically impossible request (divergence, degenerate inputs, ...).
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

/// Outcome of one dispatch: what to print and how to exit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandOutcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl CommandOutcome {
    fn success(stdout: String) -> Self {
        Self {
            code: 0,
            stdout,
            stderr: String::new(),
        }
    }

    fn failure(code: i32, message: String) -> Self {
        Self {
            code,
            stdout: String::new(),
            stderr: format!("error: {message}\n"),
        }
    }
}

struct CliError {
    code: i32,
    message: String,
}

impl CliError {
    fn usage(message: impl ToString) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.to_string(),
        }
    }

    fn data(message: impl ToString) -> Self {
        Self {
            code: EXIT_DATA,
            message: message.to_string(),
        }
    }

    fn numeric(message: impl ToString) -> Self {
        Self {
            code: EXIT_NUMERIC,
            message: message.to_string(),
        }
    }
}

type CliResult = Result<String, CliError>;

#[derive(Parser, Debug)]
#[command(
    name = "depthgrid",
    version,
    about = "Depth-image hole filling, FIR interpolation, PSNR benchmarking, and ANFIS modeling"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fill zero-valued holes; prints the fill report as JSON.
    Fill(FillArgs),
    /// Inspect or design interpolation filters.
    Filter {
        #[command(subcommand)]
        action: FilterAction,
    },
    /// Upsample an image with a chosen filter.
    Interp(InterpArgs),
    /// PSNR/MSE between a reference and a test image.
    Psnr(PsnrArgs),
    /// Run the hole-fill/halve/re-interpolate benchmark over a directory.
    Bench(BenchArgs),
    /// Train or evaluate the PSNR prediction model.
    Anfis {
        #[command(subcommand)]
        action: AnfisAction,
    },
}

#[derive(Args, Debug)]
struct FillArgs {
    /// Input PGM image.
    #[arg(long = "in", value_name = "PGM")]
    input: PathBuf,
    /// Output PGM image (binary).
    #[arg(long, value_name = "PGM")]
    out: PathBuf,
    /// Pass budget for nested holes.
    #[arg(long, default_value = "64")]
    max_passes: NonZeroUsize,
}

#[derive(Subcommand, Debug)]
enum FilterAction {
    /// Print the built-in filters as JSON.
    List,
    /// Design a Lagrange filter; prints the exact rational coefficients.
    Design {
        /// Even tap count (2L nodes around the insertion interval).
        #[arg(long)]
        taps: usize,
        /// Insertion fraction in (0, 1), e.g. 1/2.
        #[arg(long)]
        phase: String,
    },
}

#[derive(Args, Debug)]
struct InterpArgs {
    #[arg(long = "in", value_name = "PGM")]
    input: PathBuf,
    #[arg(long, value_name = "PGM")]
    out: PathBuf,
    /// linear_average | avs4 | h264_6 | grid4
    #[arg(long, value_parser = parse_filter_kind)]
    filter: FilterKind,
    /// Samples inserted per interval and axis.
    #[arg(long, default_value_t = 1)]
    n: usize,
}

#[derive(Args, Debug)]
struct PsnrArgs {
    #[arg(long = "ref", value_name = "PGM")]
    reference: PathBuf,
    #[arg(long, value_name = "PGM")]
    test: PathBuf,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Markdown,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Directory of PGM depth maps.
    #[arg(long)]
    dir: PathBuf,
    /// Where to write the measurement table.
    #[arg(long)]
    out: PathBuf,
    /// Comma-separated filter subset (default: all four).
    #[arg(long, value_delimiter = ',', value_parser = parse_filter_kind)]
    filters: Option<Vec<FilterKind>>,
    /// Score only the interior region untouched by boundary clamping.
    #[arg(long)]
    interior_only: bool,
    /// Also write the model-training CSV (pixels,filter_id,psnr_db).
    #[arg(long, value_name = "CSV")]
    emit_anfis: Option<PathBuf>,
    #[arg(long, default_value = "64")]
    max_fill_passes: NonZeroUsize,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Worker threads (the DEPTHGRID_THREADS environment variable overrides).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum AnfisAction {
    /// Fit the model to a pixels,filter_id,psnr_db CSV.
    Train {
        #[arg(long, value_name = "CSV")]
        data: PathBuf,
        #[arg(long, default_value_t = 9)]
        rules: usize,
        #[arg(long, default_value_t = 50)]
        epochs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.05)]
        lr: f64,
        /// Fraction of rows held out for validation, in [0, 1).
        #[arg(long, default_value_t = 0.0)]
        holdout: f64,
        /// Where to write the model JSON.
        #[arg(long, value_name = "JSON")]
        out: PathBuf,
    },
    /// Evaluate a trained model on a CSV; prints rmse/mae/residuals.
    Eval {
        #[arg(long, value_name = "JSON")]
        model: PathBuf,
        #[arg(long, value_name = "CSV")]
        data: PathBuf,
    },
}

fn parse_filter_kind(s: &str) -> Result<FilterKind, String> {
    s.parse()
}

/// Parses and runs an argv. All effects besides file writes are captured in
/// the returned [`CommandOutcome`].
pub fn dispatch<I, T>(args: I) -> CommandOutcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let rendered = err.render().to_string();
            return match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => CommandOutcome {
                    code: 0,
                    stdout: rendered,
                    stderr: String::new(),
                },
                _ => CommandOutcome {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: rendered,
                },
            };
        }
    };

    let result = match cli.command {
        Command::Fill(args) => cmd_fill(args),
        Command::Filter { action } => cmd_filter(action),
        Command::Interp(args) => cmd_interp(args),
        Command::Psnr(args) => cmd_psnr(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Anfis { action } => cmd_anfis(action),
    };
    match result {
        Ok(stdout) => CommandOutcome::success(stdout),
        Err(err) => CommandOutcome::failure(err.code, err.message),
    }
}

fn cmd_fill(args: FillArgs) -> CliResult {
    let image = load_pgm(&args.input).map_err(CliError::data)?;
    let (filled, report) = fill_holes(&image, &FillKernel::binomial(), args.max_passes);
    save_pgm(&filled, &args.out, PgmFormat::Binary).map_err(CliError::data)?;
    let mut text = serde_json::to_string(&report).expect("report serializes");
    text.push('\n');
    Ok(text)
}

fn cmd_filter(action: FilterAction) -> CliResult {
    match action {
        FilterAction::List => {
            let list: Vec<_> = FilterKind::ALL
                .iter()
                .map(|&kind| {
                    let f = builtin_filter(kind);
                    json!({
                        "name": f.name(),
                        "taps": f.taps().iter().map(|t| t.to_string()).collect::<Vec<_>>(),
                        "offsets": f.offsets(),
                    })
                })
                .collect();
            Ok(format!("{}\n", serde_json::Value::Array(list)))
        }
        FilterAction::Design { taps, phase } => {
            let phase = parse_rational(&phase).map_err(CliError::usage)?;
            let filter = lagrange_filter(taps, &phase).map_err(CliError::usage)?;
            let coeffs: Vec<String> = filter.taps().iter().map(|t| t.to_string()).collect();
            Ok(format!("{}\n", coeffs.join(" ")))
        }
    }
}

fn cmd_interp(args: InterpArgs) -> CliResult {
    let bank = FilterBank::for_kind(args.filter, args.n).map_err(CliError::usage)?;
    let image = load_pgm(&args.input).map_err(CliError::data)?;
    let up = upsample_bank(&image, &bank, &bank).map_err(CliError::data)?;
    save_pgm(&up, &args.out, PgmFormat::Binary).map_err(CliError::data)?;
    Ok(format!(
        "{}\n",
        json!({
            "out": args.out.display().to_string(),
            "width": up.width(),
            "height": up.height(),
        })
    ))
}

fn json_psnr(psnr_db: f64) -> serde_json::Value {
    if psnr_db.is_infinite() {
        json!("inf")
    } else {
        json!(psnr_db)
    }
}

fn cmd_psnr(args: PsnrArgs) -> CliResult {
    let reference = load_pgm(&args.reference).map_err(CliError::data)?;
    let test = load_pgm(&args.test).map_err(CliError::data)?;
    let quality = psnr(&reference, &test).map_err(CliError::data)?;
    Ok(format!(
        "{}\n",
        json!({ "mse": quality.mse, "psnr_db": json_psnr(quality.psnr_db) })
    ))
}

fn bench_error(err: BenchError) -> CliError {
    match err {
        BenchError::AllInfinitePsnr => CliError::numeric(err),
        BenchError::EmptyFilterSet => CliError::usage(err),
        _ => CliError::data(err),
    }
}

fn cmd_bench(args: BenchArgs) -> CliResult {
    let threads = std::env::var("DEPTHGRID_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .or(args.threads);
    let config = BenchConfig {
        filters: args.filters.unwrap_or_else(|| FilterKind::ALL.to_vec()),
        max_fill_passes: args.max_fill_passes,
        format: match args.format {
            FormatArg::Csv => TableFormat::Csv,
            FormatArg::Markdown => TableFormat::Markdown,
        },
        parallelism: threads,
        interior_only: args.interior_only,
    };
    let outcome = run_suite(&args.dir, &config).map_err(bench_error)?;
    std::fs::write(&args.out, export_table(&outcome.rows, config.format))
        .map_err(CliError::data)?;
    if let Some(path) = &args.emit_anfis {
        let dataset = build_anfis_dataset(&outcome.rows).map_err(bench_error)?;
        std::fs::write(path, dataset.to_csv().map_err(CliError::numeric)?)
            .map_err(CliError::data)?;
    }
    let summary = json!({
        "rows": outcome.rows.len(),
        "table": args.out.display().to_string(),
        "per_filter_avg": outcome
            .summary
            .per_filter_avg
            .iter()
            .map(|(kind, avg)| (kind.to_string(), json!(avg)))
            .collect::<serde_json::Map<_, _>>(),
        "per_image_best": outcome
            .summary
            .per_image_best
            .iter()
            .map(|(name, kind)| (name.clone(), json!(kind.to_string())))
            .collect::<serde_json::Map<_, _>>(),
        "errors": outcome.errors,
    });
    Ok(format!("{summary}\n"))
}

fn anfis_error(err: anfis::AnfisError) -> CliError {
    use anfis::AnfisError::*;
    match err {
        Csv { .. }
        | EmptyDataset
        | MixedArity { .. }
        | ZeroRange { .. }
        | NonFinite { .. }
        | TooFewRows { .. } => CliError::data(err),
        InvalidConfig { .. } => CliError::usage(err),
        _ => CliError::numeric(err),
    }
}

fn cmd_anfis(action: AnfisAction) -> CliResult {
    match action {
        AnfisAction::Train {
            data,
            rules,
            epochs,
            seed,
            lr,
            holdout,
            out,
        } => {
            let config = TrainConfig {
                epochs,
                learning_rate: lr,
                n_rules: rules,
                seed,
                holdout_fraction: holdout,
            };
            config.validate().map_err(anfis_error)?;
            let dataset = Dataset::read_csv(&data).map_err(anfis_error)?;
            let model = anfis::init_model(&dataset, &config).map_err(anfis_error)?;
            let (model, history) = anfis::train(model, &dataset, &config).map_err(anfis_error)?;
            std::fs::write(&out, model.to_json()).map_err(CliError::data)?;
            let last = history.last().expect("at least one epoch");
            Ok(format!(
                "{}\n",
                json!({
                    "model": out.display().to_string(),
                    "epochs": history.len(),
                    "final_train_rmse": last.train_rmse,
                    "final_holdout_rmse": last.holdout_rmse,
                })
            ))
        }
        AnfisAction::Eval { model, data } => {
            let text = std::fs::read_to_string(&model).map_err(CliError::data)?;
            let model = crate::anfis::AnfisModel::from_json(&text).map_err(CliError::data)?;
            let dataset = Dataset::read_csv(&data).map_err(anfis_error)?;
            let eval = anfis::evaluate(&model, &dataset).map_err(anfis_error)?;
            let mut text = serde_json::to_string(&eval).expect("evaluation serializes");
            text.push('\n');
            Ok(text)
        }
    }
}
