use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use ecbin::alphabet::discover_alphabet;
use ecbin::bench::{self, BenchConfig, BenchError, BenchRow, Distribution};
use ecbin::codec::{self, CodecError, OrderPolicy};
use ecbin::entropy::{weighted_plane_entropy, EntropyError, EntropyReport, CONSERVATION_TOLERANCE};

/// Exit statuses, one per error class.
mod status {
    pub const IO: u8 = 3;
    pub const BAD_ORDER: u8 = 4;
    pub const BAD_CONTAINER: u8 = 5;
    pub const CORRUPT_PAYLOAD: u8 = 6;
    pub const EMPTY_INPUT: u8 = 7;
    pub const CONSERVATION: u8 = 8;
    pub const OTHER: u8 = 1;
}

#[derive(Debug, Parser)]
#[command(name = "ecbin", version, about = "Entropy-conserving binarization compressor")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compress a file into an ECB1 container.
    Encode(EncodeArgs),
    /// Restore the original bytes from a container.
    Decode(DecodeArgs),
    /// Report source and plane entropies for a file.
    Analyze(AnalyzeArgs),
    /// Compare bit costs and timings on synthetic sources.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
struct ThreadArgs {
    /// Worker threads for plane coding; defaults to available parallelism.
    #[arg(long)]
    threads: Option<usize>,
}

impl ThreadArgs {
    fn resolve(&self) -> usize {
        self.threads.unwrap_or_else(|| {
            std::thread::available_parallelism().map_or(1, |n| n.get())
        })
    }
}

#[derive(Debug, Args)]
struct EncodeArgs {
    /// Input file, or `-` for stdin.
    input: PathBuf,
    /// Output file, or `-` for stdout. Defaults to `<input>.ecb`.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// freq | first-seen | explicit:<comma list of symbols>
    #[arg(long, default_value = "freq")]
    order: OrderPolicy,
    #[command(flatten)]
    threads: ThreadArgs,
}

#[derive(Debug, Args)]
struct DecodeArgs {
    input: PathBuf,
    /// Output file, or `-` for stdout. Defaults to the input name without
    /// `.ecb`, or `<input>.out`.
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    threads: ThreadArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    input: PathBuf,
    #[arg(long, default_value = "freq")]
    order: OrderPolicy,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Report destination; stdout when omitted or `-`.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Input lengths in symbols.
    #[arg(long, value_delimiter = ',', default_values_t = [1u64 << 20, 1 << 21, 1 << 22])]
    sizes: Vec<u64>,
    /// uniform | geometric:<p> | zipf:<s> | twospike:<p>
    #[arg(long, value_delimiter = ',', default_values = ["uniform", "geometric:0.5", "zipf:1", "twospike:0.9"])]
    dist: Vec<Distribution>,
    /// Number of distinct symbols in the synthetic alphabet.
    #[arg(long, default_value_t = 16)]
    alphabet: usize,
    /// Timing repetitions; the fastest run is reported.
    #[arg(long, default_value_t = 3)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "freq")]
    order: OrderPolicy,
    /// Add encode/decode wall-time columns (output is then not reproducible).
    #[arg(long)]
    timing: bool,
    #[command(flatten)]
    threads: ThreadArgs,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Entropy(#[from] EntropyError),
    #[error(transparent)]
    Bench(#[from] BenchError),
    #[error("conservation residual {residual:e} exceeds {CONSERVATION_TOLERANCE:e}")]
    Conservation { residual: f64 },
    #[error("writing report: {0}")]
    Report(String),
}

impl CliError {
    fn status(&self) -> u8 {
        match self {
            CliError::Io { .. } => status::IO,
            CliError::Codec(e) | CliError::Bench(BenchError::Codec(e)) => codec_status(e),
            CliError::Entropy(EntropyError::EmptyInput) => status::EMPTY_INPUT,
            CliError::Entropy(EntropyError::Order(_)) => status::BAD_ORDER,
            CliError::Conservation { .. } => status::CONSERVATION,
            CliError::Entropy(_) | CliError::Bench(_) | CliError::Report(_) => status::OTHER,
        }
    }
}

fn codec_status(e: &CodecError) -> u8 {
    match e {
        CodecError::Order(_) => status::BAD_ORDER,
        CodecError::Container(_) => status::BAD_CONTAINER,
        CodecError::Coder { .. } | CodecError::Binarize(_) => status::CORRUPT_PAYLOAD,
        CodecError::ThreadPool(_) => status::OTHER,
    }
}

fn is_stdio(path: &Path) -> bool {
    path.as_os_str() == "-"
}

fn read_input(path: &Path) -> Result<Vec<u8>, CliError> {
    let io_err = |source| CliError::Io {
        path: path.display().to_string(),
        source,
    };
    if is_stdio(path) {
        let mut buf = Vec::new();
        io::stdin().read_to_end(&mut buf).map_err(io_err)?;
        Ok(buf)
    } else {
        fs::read(path).map_err(io_err)
    }
}

fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    let shown = path.map_or_else(|| "<stdout>".to_owned(), |p| p.display().to_string());
    let io_err = |source| CliError::Io { path: shown.clone(), source };
    match path {
        Some(p) if !is_stdio(p) => fs::write(p, bytes).map_err(io_err),
        _ => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(bytes).and_then(|()| stdout.flush()).map_err(io_err)
        }
    }
}

fn cmd_encode(args: &EncodeArgs) -> Result<(), CliError> {
    let data = read_input(&args.input)?;
    let (bytes, summary) = codec::encode(&data, &args.order, args.threads.resolve())?;
    let output = args.output.clone().unwrap_or_else(|| {
        let mut name = args.input.clone().into_os_string();
        name.push(".ecb");
        PathBuf::from(name)
    });
    write_output(Some(&output), &bytes)?;
    eprintln!("ecbin: encoded {summary}");
    Ok(())
}

fn cmd_decode(args: &DecodeArgs) -> Result<(), CliError> {
    let bytes = read_input(&args.input)?;
    let data = codec::decode(&bytes, args.threads.resolve())?;
    let output = args.output.clone().unwrap_or_else(|| {
        if args.input.extension().is_some_and(|e| e == "ecb") {
            args.input.with_extension("")
        } else {
            let mut name = args.input.clone().into_os_string();
            name.push(".out");
            PathBuf::from(name)
        }
    });
    write_output(Some(&output), &data)?;
    log::info!("decoded {} bytes", data.len());
    Ok(())
}

fn join(values: &[f64]) -> String {
    values.iter().map(f64::to_string).collect::<Vec<_>>().join(";")
}

fn render_report(report: &EntropyReport, format: Format) -> Result<Vec<u8>, CliError> {
    match format {
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(report).map_err(|e| CliError::Report(e.to_string()))?;
            out.push(b'\n');
            Ok(out)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let report_err = |e: csv::Error| CliError::Report(e.to_string());
            w.write_record(["h_source", "h_weighted_sum", "residual", "plane_weights", "plane_entropies"])
                .map_err(report_err)?;
            w.write_record([
                report.h_source.to_string(),
                report.h_weighted_sum.to_string(),
                report.residual.to_string(),
                join(&report.plane_weights),
                join(&report.plane_entropies),
            ])
            .map_err(report_err)?;
            w.into_inner().map_err(|e| CliError::Report(e.to_string()))
        }
    }
}

fn cmd_analyze(args: &AnalyzeArgs) -> Result<(), CliError> {
    let data = read_input(&args.input)?;
    let alphabet = discover_alphabet(&data);
    if alphabet.total() == 0 {
        return Err(EntropyError::EmptyInput.into());
    }
    let order = args.order.resolve(&alphabet).map_err(CodecError::from)?;
    let report = weighted_plane_entropy(&alphabet, &order)?;
    write_output(args.output.as_deref(), &render_report(&report, args.format)?)?;
    if report.residual > CONSERVATION_TOLERANCE {
        return Err(CliError::Conservation {
            residual: report.residual,
        });
    }
    Ok(())
}

fn render_bench(rows: &[BenchRow], timing: bool) -> Result<Vec<u8>, CliError> {
    let report_err = |e: csv::Error| CliError::Report(e.to_string());
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["scheme", "distribution", "size", "bits_per_symbol", "source_entropy", "ratio"];
    if timing {
        header.extend(["encode_s", "decode_s"]);
    }
    w.write_record(&header).map_err(report_err)?;
    for row in rows {
        let mut record = vec![
            row.scheme.clone(),
            row.distribution.clone(),
            row.size.to_string(),
            row.bits_per_symbol.to_string(),
            row.source_entropy.to_string(),
            opt(row.ratio),
        ];
        if timing {
            record.push(opt(row.encode_seconds));
            record.push(opt(row.decode_seconds));
        }
        w.write_record(&record).map_err(report_err)?;
    }
    w.into_inner().map_err(|e| CliError::Report(e.to_string()))
}

fn cmd_bench(args: &BenchArgs) -> Result<(), CliError> {
    let config = BenchConfig {
        sizes: args.sizes.clone(),
        distributions: args.dist.clone(),
        alphabet_size: args.alphabet,
        repetitions: args.reps,
        seed: args.seed,
        order: args.order.clone(),
        threads: args.threads.resolve(),
        timing: args.timing,
    };
    let rows = bench::run(&config)?;
    write_output(args.output.as_deref(), &render_bench(&rows, args.timing)?)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("ECBIN_LOG", "warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Encode(args) => cmd_encode(args),
        Command::Decode(args) => cmd_decode(args),
        Command::Analyze(args) => cmd_analyze(args),
        Command::Bench(args) => cmd_bench(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ecbin: error: {e}");
            ExitCode::from(e.status())
        }
    }
}
