use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, ValueEnum};
use press_analyzer::{analyze_corpora, emit_scatter, AnalyzeOptions, Format, DEFAULT_THRESHOLD};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Svg,
}

/// Compare word frequencies between two corpora and plot them against the
/// equal-frequency diagonal.
#[derive(Debug, Parser)]
#[command(version)]
struct Args {
    /// Directory of text files for corpus A (x axis).
    #[arg(long)]
    corpus_a: PathBuf,
    /// Directory of text files for corpus B (y axis).
    #[arg(long)]
    corpus_b: PathBuf,
    /// Keep words occurring more than this many times.
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    threshold: u64,
    /// File of words to drop, one per line.
    #[arg(long)]
    stopwords: Option<PathBuf>,
    /// Apply the threshold to each corpus separately instead of the sum.
    #[arg(long)]
    per_corpus_threshold: bool,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let started = Instant::now();
    let options = AnalyzeOptions {
        threshold: args.threshold,
        stopwords: args.stopwords,
        per_corpus_threshold: args.per_corpus_threshold,
    };
    let records = match analyze_corpora(&args.corpus_a, &args.corpus_b, &options) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };
    let format = match args.format {
        FormatArg::Csv => Format::Csv,
        FormatArg::Svg => Format::Svg,
    };
    if let Err(e) = emit_scatter(&records, format, &args.out) {
        eprintln!("error: {e}");
        return ExitCode::FAILURE;
    }
    eprintln!(
        "{} words written to {} in {} ms",
        records.len(),
        args.out.display(),
        started.elapsed().as_millis()
    );
    ExitCode::SUCCESS
}
