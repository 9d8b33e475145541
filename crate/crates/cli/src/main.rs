use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use semascore::corpus::RecordResult;
use semascore::{
    benchmark, evaluate_corpus, load_corpus, BenchOptions, EmbedderConfig, Error, EvalOptions,
    Format, NormalizeOptions, Scorer,
};

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_BACKEND: u8 = 3;

#[derive(Parser)]
#[command(
    name = "semascore",
    version,
    about = "Segment-wise semantic scoring of ASR output"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Score a single ground-truth / hypothesis pair.
    Score {
        #[arg(long)]
        gt: String,
        #[arg(long = "h")]
        hyp: String,
        #[command(flatten)]
        common: Common,
    },
    /// Score every record of a corpus and aggregate.
    Eval {
        #[command(flatten)]
        input: InputArgs,
        /// Also write per-record rows as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Include wall-clock timings (makes output run-dependent).
        #[arg(long)]
        timing: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Time the metrics on a corpus, single-threaded.
    Bench {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, default_value_t = BenchOptions::default().repeats)]
        repeats: usize,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct InputArgs {
    #[arg(long)]
    input: PathBuf,
    /// Defaults to the file extension (.tsv, otherwise JSONL).
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Common {
    #[arg(long, value_enum, default_value_t = BackendArg::Mock)]
    backend: BackendArg,
    #[arg(long, env = "SEMASCORE_SERVICE_URL")]
    service_url: Option<String>,
    /// Seed of the mock backend.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = semascore::embedding::DEFAULT_MODEL_ID)]
    model: String,
    #[arg(long)]
    keep_case: bool,
    #[arg(long)]
    keep_punct: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Mock,
    Service,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Jsonl,
    Tsv,
}

enum Failure {
    Usage(String),
    Data(String),
    Backend(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_backend() {
            Failure::Backend(e.to_string())
        } else {
            Failure::Data(e.to_string())
        }
    }
}

impl Common {
    fn scorer(&self) -> Result<Scorer, Failure> {
        let mut cfg = match self.backend {
            BackendArg::Mock => EmbedderConfig::mock(self.seed),
            BackendArg::Service => match self.service_url.as_deref().map(str::trim) {
                Some(url) if !url.is_empty() => EmbedderConfig::service(url),
                _ => {
                    return Err(Failure::Usage(
                        "--backend service requires --service-url or SEMASCORE_SERVICE_URL".into(),
                    ))
                }
            },
        };
        cfg.model_id = self.model.clone();
        let norm = NormalizeOptions {
            lowercase: !self.keep_case,
            strip_punctuation: !self.keep_punct,
            ..NormalizeOptions::default()
        };
        Ok(Scorer::from_config(&cfg)?.with_normalization(norm))
    }
}

impl InputArgs {
    fn load(&self) -> Result<Vec<semascore::CorpusRecord>, Failure> {
        let format = match self.format {
            Some(FormatArg::Jsonl) => Format::Jsonl,
            Some(FormatArg::Tsv) => Format::Tsv,
            None => Format::from_path(&self.input),
        };
        load_corpus(&self.input, format).map_err(|e| Failure::Data(e.to_string()))
    }
}

/// One flat CSV row per record.
#[derive(Serialize)]
struct CsvRow<'a> {
    id: &'a str,
    group: &'a str,
    semascore: f64,
    wer: f64,
    cer: f64,
    mer: f64,
    word_mer: f64,
    baseline: f64,
    cosine_calls: usize,
    baseline_cosine_calls: usize,
}

impl<'a> From<&'a RecordResult> for CsvRow<'a> {
    fn from(r: &'a RecordResult) -> Self {
        Self {
            id: &r.id,
            group: r.group.as_deref().unwrap_or(""),
            semascore: r.semascore,
            wer: r.wer,
            cer: r.cer,
            mer: r.mer,
            word_mer: r.word_mer,
            baseline: r.baseline,
            cosine_calls: r.cosine_calls,
            baseline_cosine_calls: r.baseline_cosine_calls,
        }
    }
}

fn write_csv(path: &Path, rows: &[RecordResult]) -> Result<(), Failure> {
    let fail = |e: &dyn std::fmt::Display| Failure::Data(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(|e| fail(&e))?;
    for r in rows {
        w.serialize(CsvRow::from(r)).map_err(|e| fail(&e))?;
    }
    w.flush().map_err(|e| fail(&e))
}

fn to_json<T: Serialize>(value: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| Failure::Data(format!("serializing report: {e}")))
}

fn print_stdout(doc: &str) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    out.write_all(doc.as_bytes())
        .and_then(|()| out.flush())
        .map_err(|e| Failure::Data(format!("stdout: {e}")))
}

/// Writes the report to `out`, or to stdout. When a file is written, stdout
/// still gets one JSON document naming it.
fn emit<T: Serialize>(report: &T, out: Option<&Path>) -> Result<(), Failure> {
    let doc = to_json(report)?;
    match out {
        None => print_stdout(&doc),
        Some(path) => {
            fs::write(path, doc).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
            print_stdout(&to_json(
                &serde_json::json!({ "written": path.display().to_string() }),
            )?)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Score { gt, hyp, common } => {
            let report = common.scorer()?.score(&gt, &hyp)?;
            emit(&report, None)
        }
        Command::Eval {
            input,
            csv,
            workers,
            timing,
            common,
        } => {
            let scorer = common.scorer()?;
            let records = input.load()?;
            let report = evaluate_corpus(&records, &scorer, &EvalOptions { workers, timing })?;
            if let Some(path) = &csv {
                write_csv(path, &report.per_record)?;
            }
            emit(&report, input.out.as_deref())
        }
        Command::Bench {
            input,
            repeats,
            common,
        } => {
            let scorer = common.scorer()?;
            let records = input.load()?;
            let table = benchmark(&records, &scorer, &BenchOptions { repeats })?;
            emit(&table, input.out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version are not errors.
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_DATA)
        }
        Err(Failure::Backend(msg)) => {
            eprintln!("backend error: {msg}");
            ExitCode::from(EXIT_BACKEND)
        }
    }
}
