use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use patdiv::corpus::{build_distributions, entity_counts, Corpus};
use patdiv::indices::{index_series, IndexKind, MissingDisparity};
use patdiv::io::{
    parse_matrix, parse_patents, parse_series, write_correlation_details, write_correlation_table,
    write_matrix, write_patents, write_periodogram, write_series, MatrixValueKind,
};
use patdiv::proximity::{build_disparity_from_cooccurrence, DisparityMatrix};
use patdiv::rankstats::correlation_matrix;
use patdiv::series::AnnualSeries;
use patdiv::spectral::{detrend_diff, dominant_cycle, moving_average, periodogram, CycleEstimate, Periodogram, SpectralError};
use patdiv::synth::{generate, ground_truth, SynthSpec};

/// Command errors split by exit code: usage (1) vs data (2).
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError::Usage(message.into())
    }
}

macro_rules! data_error_from {
    ($($ty:ty),* $(,)?) => {
        $(impl From<$ty> for CliError {
            fn from(e: $ty) -> Self {
                CliError::Data(e.to_string())
            }
        })*
    };
}

data_error_from!(
    patdiv::io::IngestError,
    patdiv::corpus::CorpusError,
    patdiv::proximity::ProximityError,
    patdiv::indices::IndicesError,
    patdiv::rankstats::RankStatsError,
    std::io::Error,
);

#[derive(Parser)]
#[command(
    name = "patdiv",
    version,
    about = "Diversity indices and life-cycle detection over patent classification time series"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute diversity index series from a patent corpus
    Diversity(DiversityArgs),
    /// Build a disparity matrix from co-classification profiles
    DisparityBuild(DisparityBuildArgs),
    /// Periodogram and dominant-cycle summary of one series column
    Spectrum(SpectrumArgs),
    /// Per-year patent, distinct-inventor, and distinct-assignee counts
    Counts(CountsArgs),
    /// Centered moving average of one series column
    Ma(MaArgs),
    /// Spearman correlation matrix across series files
    Correlate(CorrelateArgs),
    /// Generate a synthetic corpus with a known diversity cycle
    Synth(SynthArgs),
    /// Chain diversity → detrend → spectrum, writing all intermediates
    Pipeline(PipelineArgs),
}

#[derive(Args)]
struct DiversityArgs {
    /// Patent corpus CSV
    #[arg(long)]
    patents: PathBuf,
    /// Disparity matrix CSV (required for rao_stirling)
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Treat the matrix file's cells as cosine similarities (d = 1 − s)
    #[arg(long, requires = "matrix")]
    cosine: bool,
    /// Comma-separated indices: rao_stirling, variety, gini_simpson,
    /// simpson, herfindahl
    #[arg(long, value_delimiter = ',')]
    kinds: Vec<String>,
    /// Truncate classification codes to their first N characters
    #[arg(long)]
    truncate: Option<usize>,
    /// Policy for codes absent from the matrix: error | substitute
    #[arg(long, default_value = "error")]
    missing_disparity: String,
    /// Disparity substituted for unknown codes (with
    /// --missing-disparity substitute)
    #[arg(long, default_value_t = 1.0)]
    substitute: f64,
    /// Output series CSV
    #[arg(long, short)]
    output: PathBuf,
}

#[derive(Args)]
struct DisparityBuildArgs {
    /// Patent corpus CSV
    #[arg(long)]
    patents: PathBuf,
    /// Truncate classification codes to their first N characters
    #[arg(long)]
    truncate: Option<usize>,
    /// Output matrix CSV
    #[arg(long, short)]
    output: PathBuf,
}

#[derive(Args)]
struct SpectrumArgs {
    /// Series CSV
    #[arg(long)]
    series: PathBuf,
    /// Column to analyze
    #[arg(long)]
    column: String,
    /// First-difference the series before the transform
    #[arg(long)]
    detrend: bool,
    /// Ignore ordinates at or below this frequency in the summary
    #[arg(long, default_value_t = 0.0)]
    exclude_below: f64,
    /// Output periodogram CSV
    #[arg(long, short)]
    output: PathBuf,
}

#[derive(Args)]
struct CountsArgs {
    /// Patent corpus CSV
    #[arg(long)]
    patents: PathBuf,
    /// Output series CSV
    #[arg(long, short)]
    output: PathBuf,
}

#[derive(Args)]
struct MaArgs {
    /// Series CSV
    #[arg(long)]
    series: PathBuf,
    /// Column to smooth
    #[arg(long)]
    column: String,
    /// Odd window width
    #[arg(long, default_value_t = 5)]
    window: usize,
    /// Output series CSV
    #[arg(long, short)]
    output: PathBuf,
}

#[derive(Args)]
struct CorrelateArgs {
    /// Series CSV files; all their columns enter the matrix
    #[arg(long = "series", required = true)]
    series: Vec<PathBuf>,
    /// Prepend a synthetic year series as a trend column
    #[arg(long)]
    include_year: bool,
    /// Output table CSV (display-formatted cells)
    #[arg(long, short)]
    output: PathBuf,
    /// Companion CSV with full-precision rho, p, and per-cell n
    /// (default: <output>_details.csv)
    #[arg(long)]
    details: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    /// Number of consecutive years
    #[arg(long, default_value_t = 30)]
    years: usize,
    /// Ground-truth cycle period in years
    #[arg(long, default_value_t = 10.0)]
    period: f64,
    /// Patent count in the first year
    #[arg(long, default_value_t = 200)]
    patents_per_year: u32,
    /// Exponential growth factor per year
    #[arg(long, default_value_t = 1.05)]
    growth: f64,
    /// Number of available classification codes
    #[arg(long, default_value_t = 25)]
    class_pool: usize,
    /// Center of the Gini-Simpson oscillation
    #[arg(long, default_value_t = 0.55)]
    base_gini: f64,
    /// Amplitude of the oscillation
    #[arg(long, default_value_t = 0.15)]
    amplitude: f64,
    /// Years by which inventor counts trail the variety (negative = lead)
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    inventor_lag: i32,
    /// RNG seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// First calendar year
    #[arg(long, default_value_t = 1975)]
    start_year: i32,
    /// Output patent corpus CSV
    #[arg(long, short)]
    output: PathBuf,
    /// Also write the noise-free target series here
    #[arg(long)]
    truth: Option<PathBuf>,
}

#[derive(Args)]
struct PipelineArgs {
    /// Patent corpus CSV
    #[arg(long)]
    patents: PathBuf,
    /// Disparity matrix CSV (required for --kind rao_stirling)
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Treat the matrix file's cells as cosine similarities
    #[arg(long, requires = "matrix")]
    cosine: bool,
    /// Index to push through the pipeline
    #[arg(long, default_value = "gini_simpson")]
    kind: String,
    /// Truncate classification codes to their first N characters
    #[arg(long)]
    truncate: Option<usize>,
    /// Ignore ordinates at or below this frequency in the summary
    #[arg(long, default_value_t = 0.0)]
    exclude_below: f64,
    /// Directory for diversity.csv, detrended.csv, periodogram.csv
    #[arg(long)]
    out_dir: PathBuf,
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Diversity(args) => diversity(args),
        Command::DisparityBuild(args) => disparity_build(args),
        Command::Spectrum(args) => spectrum(args),
        Command::Counts(args) => counts(args),
        Command::Ma(args) => ma(args),
        Command::Correlate(args) => correlate(args),
        Command::Synth(args) => synth(args),
        Command::Pipeline(args) => pipeline(args),
    }
}

fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::Data(format!("cannot open {}: {e}", path.display())))
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))
}

fn load_corpus(path: &Path, truncate: Option<usize>) -> Result<Corpus, CliError> {
    Ok(parse_patents(open(path)?, truncate)?)
}

fn load_matrix(path: &Path, cosine: bool) -> Result<DisparityMatrix, CliError> {
    let kind = if cosine { MatrixValueKind::Cosine } else { MatrixValueKind::Disparity };
    Ok(parse_matrix(open(path)?, kind)?)
}

fn parse_kinds(names: &[String]) -> Result<Vec<IndexKind>, CliError> {
    if names.is_empty() {
        return Err(CliError::usage("--kinds requires at least one index"));
    }
    let mut kinds = Vec::new();
    for name in names {
        let kind = IndexKind::parse(name).ok_or_else(|| {
            CliError::usage(format!(
                "unknown index kind {name:?}; expected one of rao_stirling, variety, gini_simpson, simpson, herfindahl"
            ))
        })?;
        if !kinds.contains(&kind) {
            kinds.push(kind);
        }
    }
    Ok(kinds)
}

fn parse_missing_policy(policy: &str, substitute: f64) -> Result<MissingDisparity, CliError> {
    match policy {
        "error" => Ok(MissingDisparity::Error),
        "substitute" => {
            if !(0.0..=1.0).contains(&substitute) {
                return Err(CliError::usage(format!(
                    "--substitute must lie in [0, 1], got {substitute}"
                )));
            }
            Ok(MissingDisparity::Substitute(substitute))
        }
        other => Err(CliError::usage(format!(
            "unknown missing-disparity policy {other:?}; expected error or substitute"
        ))),
    }
}

/// Locates a column in parsed series by name, or reports the available
/// names.
fn pick_column(series: Vec<AnnualSeries>, column: &str) -> Result<AnnualSeries, CliError> {
    let names: Vec<String> = series.iter().map(|s| s.name().to_string()).collect();
    series.into_iter().find(|s| s.name() == column).ok_or_else(|| {
        CliError::Data(format!(
            "column {column:?} not found; available columns: {}",
            names.join(", ")
        ))
    })
}

fn print_summary(pgram: &Periodogram, estimate: &CycleEstimate) {
    println!(
        "dominant_frequency={} cycle_count={} period_years={} n={} dropped_first={} degenerate={}",
        estimate.dominant_frequency,
        estimate.cycle_count,
        estimate.period_years,
        pgram.n,
        pgram.dropped_first,
        estimate.degenerate
    );
}

fn diversity(args: DiversityArgs) -> Result<(), CliError> {
    let kinds = parse_kinds(&args.kinds)?;
    let missing = parse_missing_policy(&args.missing_disparity, args.substitute)?;
    if kinds.contains(&IndexKind::RaoStirling) && args.matrix.is_none() {
        return Err(CliError::usage("--kinds rao_stirling requires --matrix"));
    }
    let corpus = load_corpus(&args.patents, args.truncate)?;
    let matrix = args.matrix.as_deref().map(|p| load_matrix(p, args.cosine)).transpose()?;
    let dists = build_distributions(&corpus, None)?;
    let series = index_series(&dists, &kinds, matrix.as_ref(), missing)?;
    write_series(create(&args.output)?, &series)?;
    Ok(())
}

fn disparity_build(args: DisparityBuildArgs) -> Result<(), CliError> {
    let corpus = load_corpus(&args.patents, args.truncate)?;
    let matrix = build_disparity_from_cooccurrence(&corpus)?;
    write_matrix(create(&args.output)?, &matrix)?;
    Ok(())
}

fn spectrum(args: SpectrumArgs) -> Result<(), CliError> {
    let series = parse_series(open(&args.series)?)?;
    let mut column = pick_column(series, &args.column)?;
    if args.detrend {
        column = detrend_diff(&column).map_err(spectral_error)?;
    }
    let pgram = periodogram(&column).map_err(spectral_error)?;
    let estimate = dominant_cycle(&pgram, args.exclude_below).map_err(spectral_error)?;
    write_periodogram(create(&args.output)?, &pgram)?;
    print_summary(&pgram, &estimate);
    Ok(())
}

fn spectral_error(e: SpectralError) -> CliError {
    CliError::Data(e.to_string())
}

fn counts(args: CountsArgs) -> Result<(), CliError> {
    let corpus = load_corpus(&args.patents, None)?;
    let counts = entity_counts(&corpus);
    write_series(create(&args.output)?, &[counts.patents, counts.inventors, counts.assignees])?;
    Ok(())
}

fn ma(args: MaArgs) -> Result<(), CliError> {
    let series = parse_series(open(&args.series)?)?;
    let column = pick_column(series, &args.column)?;
    let smoothed = moving_average(&column, args.window).map_err(|e| match e {
        SpectralError::EvenWindow(_) | SpectralError::ZeroWindow => CliError::Usage(e.to_string()),
        other => CliError::Data(other.to_string()),
    })?;
    write_series(create(&args.output)?, std::slice::from_ref(&smoothed))?;
    Ok(())
}

fn correlate(args: CorrelateArgs) -> Result<(), CliError> {
    let mut all = Vec::new();
    for path in &args.series {
        all.extend(parse_series(open(path)?)?);
    }
    let matrix = correlation_matrix(&all, args.include_year)?;
    for (i, row_name) in matrix.names.iter().enumerate() {
        for (j, col_name) in matrix.names.iter().enumerate() {
            if j > i {
                if let Err(reason) = matrix.get(i, j) {
                    log::warn!("cell ({row_name}, {col_name}) left empty: {reason}");
                }
            }
        }
    }
    write_correlation_table(create(&args.output)?, &matrix)?;
    let details_path = args.details.clone().unwrap_or_else(|| details_path_for(&args.output));
    write_correlation_details(create(&details_path)?, &matrix)?;
    Ok(())
}

fn details_path_for(output: &Path) -> PathBuf {
    let stem = output.file_stem().and_then(|s| s.to_str()).unwrap_or("correlations");
    output.with_file_name(format!("{stem}_details.csv"))
}

fn synth(args: SynthArgs) -> Result<(), CliError> {
    let spec = SynthSpec {
        years: args.years,
        period_years: args.period,
        patents_per_year: args.patents_per_year,
        growth: args.growth,
        class_pool: args.class_pool,
        base_gini: args.base_gini,
        concentration_amplitude: args.amplitude,
        inventor_lag_years: args.inventor_lag,
        seed: args.seed,
        start_year: args.start_year,
    };
    let corpus = generate(&spec).map_err(|e| CliError::Usage(e.to_string()))?;
    write_patents(create(&args.output)?, &corpus)?;
    if let Some(truth) = &args.truth {
        let series = ground_truth(&spec).map_err(|e| CliError::Usage(e.to_string()))?;
        write_series(create(truth)?, std::slice::from_ref(&series))?;
    }
    Ok(())
}

fn pipeline(args: PipelineArgs) -> Result<(), CliError> {
    let kind = IndexKind::parse(&args.kind).ok_or_else(|| {
        CliError::usage(format!(
            "unknown index kind {:?}; expected one of rao_stirling, variety, gini_simpson, simpson, herfindahl",
            args.kind
        ))
    })?;
    if kind == IndexKind::RaoStirling && args.matrix.is_none() {
        return Err(CliError::usage("--kind rao_stirling requires --matrix"));
    }
    std::fs::create_dir_all(&args.out_dir)
        .map_err(|e| CliError::Data(format!("cannot create {}: {e}", args.out_dir.display())))?;

    let corpus = load_corpus(&args.patents, args.truncate)?;
    let matrix = args.matrix.as_deref().map(|p| load_matrix(p, args.cosine)).transpose()?;
    let dists = build_distributions(&corpus, None)?;
    let series = index_series(&dists, &[kind], matrix.as_ref(), MissingDisparity::Error)?;
    write_series(create(&args.out_dir.join("diversity.csv"))?, &series)?;

    let detrended = detrend_diff(&series[0]).map_err(spectral_error)?;
    write_series(create(&args.out_dir.join("detrended.csv"))?, std::slice::from_ref(&detrended))?;

    let pgram = periodogram(&detrended).map_err(spectral_error)?;
    write_periodogram(create(&args.out_dir.join("periodogram.csv"))?, &pgram)?;
    let estimate = dominant_cycle(&pgram, args.exclude_below).map_err(spectral_error)?;
    print_summary(&pgram, &estimate);
    Ok(())
}
