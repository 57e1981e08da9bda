//! The `trackwall` command line: ingest captures, label, train, evaluate,
//! serve and emit blocklists.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 runtime error.

mod label;

use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use clap::{Parser, Subcommand, ValueEnum};
use trackwall::classifiers::{Hyper, ModelKind};
use trackwall::evaluation::EvaluationReport;
use trackwall::features::SplitOptions;
use trackwall::ingest::{
    emit_blocklist, export_review_csv, parse_curl_file, parse_dataset_csv, parse_har,
    profile_payload, review_row, Label, RawRequest, ScreenConfig,
};
use trackwall::pipeline;
use trackwall::store::{load_bundle, save_bundle};
use trackwall_service::ServiceConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "trackwall",
    version,
    about = "Find and block invasive tracking requests"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CaptureFormat {
    Har,
    Curl,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse a capture, screen every request and write a review CSV.
    Ingest {
        format: CaptureFormat,
        path: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Domain of the site the capture was taken on.
        #[arg(long)]
        site: String,
        /// Comma-separated payload keys that mark a request as suspicious.
        #[arg(long, value_delimiter = ',')]
        suspect_keys: Option<Vec<String>>,
        /// Comma-separated domains treated as first party.
        #[arg(long, value_delimiter = ',', default_value = "")]
        related: Vec<String>,
    },
    /// Resolve pending rows of a review CSV at the terminal.
    Label {
        csv: PathBuf,
        /// Defaults to rewriting the input file.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also offer rows the screen already decided.
        #[arg(long)]
        all: bool,
    },
    /// Train a model on a labeled CSV and save the bundle.
    Train {
        csv: PathBuf,
        #[arg(long, value_parser = parse_kind)]
        model: ModelKind,
        #[arg(long, default_value_t = 0.7)]
        ratio: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        stratified: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score a bundle on a labeled CSV and print the metrics as JSON.
    Evaluate {
        csv: PathBuf,
        #[arg(long)]
        bundle: PathBuf,
        /// Also write the JSON report to this file.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Serve the prediction endpoints.
    Serve {
        #[arg(long)]
        lr: Option<PathBuf>,
        #[arg(long)]
        dt: Option<PathBuf>,
        #[arg(long)]
        svm: Option<PathBuf>,
        #[arg(long)]
        port: Option<u16>,
        #[arg(long)]
        host: Option<std::net::IpAddr>,
    },
    /// Write a hosts-format blocklist of every invasive host in a labeled CSV.
    Blocklist {
        csv: PathBuf,
        /// Defaults to standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "0.0.0.0")]
        sink: String,
    },
}

fn parse_kind(s: &str) -> Result<ModelKind, String> {
    s.parse()
        .map_err(|_| format!("expected lr, dt or svm, got {s:?}"))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandOutcome {
    pub exit_code: i32,
    /// One-line summary, or the error message on failure.
    pub summary: String,
    pub report_path: Option<PathBuf>,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Data(String),
    Runtime(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data(_) => EXIT_DATA,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Runtime(m) => m,
        }
    }
}

fn data(e: impl std::fmt::Display) -> CliError {
    CliError::Data(e.to_string())
}

fn runtime(e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Data(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes)
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}

fn with_path(path: &Path) -> impl Fn(&dyn std::fmt::Display) -> CliError + '_ {
    move |e| CliError::Data(format!("{}: {e}", path.display()))
}

struct Io<'a> {
    stdin: &'a mut dyn BufRead,
    stdout: &'a mut dyn Write,
    stderr: &'a mut dyn Write,
}

struct Done {
    summary: String,
    report_path: Option<PathBuf>,
}

impl Done {
    fn new(summary: impl Into<String>) -> Self {
        Done {
            summary: summary.into(),
            report_path: None,
        }
    }
}

/// Runs one command line. `argv[0]` is the program name.
pub fn run_command<S: AsRef<str>>(
    argv: &[S],
    stdin: &mut dyn BufRead,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> CommandOutcome {
    let cli = match Cli::try_parse_from(argv.iter().map(|s| s.as_ref())) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                write!(stdout, "{text}")
            } else {
                write!(stderr, "{text}")
            };
            return CommandOutcome {
                exit_code: code,
                summary: text.lines().next().unwrap_or_default().to_string(),
                report_path: None,
            };
        }
    };
    let mut io = Io {
        stdin,
        stdout,
        stderr,
    };
    match dispatch(cli.command, &mut io) {
        Ok(done) => CommandOutcome {
            exit_code: EXIT_OK,
            summary: done.summary,
            report_path: done.report_path,
        },
        Err(e) => {
            let _ = writeln!(io.stderr, "error: {}", e.message());
            CommandOutcome {
                exit_code: e.code(),
                summary: e.message().to_string(),
                report_path: None,
            }
        }
    }
}

fn dispatch(cmd: Command, io: &mut Io<'_>) -> Result<Done, CliError> {
    match cmd {
        Command::Ingest {
            format,
            path,
            out,
            site,
            suspect_keys,
            related,
        } => ingest(format, &path, &out, &site, suspect_keys, &related, io),
        Command::Label { csv, out, all } => {
            let out = out.unwrap_or_else(|| csv.clone());
            label::run(&csv, &out, all, io)
        }
        Command::Train {
            csv,
            model,
            ratio,
            seed,
            stratified,
            out,
        } => train(
            &csv,
            model,
            SplitOptions {
                ratio,
                seed,
                stratified,
            },
            &out,
            io,
        ),
        Command::Evaluate {
            csv,
            bundle,
            report,
        } => evaluate(&csv, &bundle, report, io),
        Command::Serve {
            lr,
            dt,
            svm,
            port,
            host,
        } => serve(lr, dt, svm, host, port, io),
        Command::Blocklist { csv, out, sink } => blocklist(&csv, out.as_deref(), &sink, io),
    }
}

fn ingest(
    format: CaptureFormat,
    path: &Path,
    out: &Path,
    site: &str,
    suspect_keys: Option<Vec<String>>,
    related: &[String],
    io: &mut Io<'_>,
) -> Result<Done, CliError> {
    let mut config = ScreenConfig::new(site).map_err(|e| CliError::Usage(e.to_string()))?;
    if let Some(keys) = suspect_keys {
        config = config.with_suspect_keys(keys.into_iter().filter(|k| !k.is_empty()));
    }
    config = config.with_related(related);

    let text = read_text(path)?;
    let (requests, skipped): (Vec<RawRequest>, usize) = match format {
        CaptureFormat::Har => {
            let import = parse_har(&text).map_err(|e| with_path(path)(&e))?;
            (import.requests, import.skipped)
        }
        CaptureFormat::Curl => (parse_curl_file(&text).map_err(|e| with_path(path)(&e))?, 0),
    };

    let mut counts = [0usize; 3];
    let rows: Vec<_> = requests
        .iter()
        .map(|req| {
            let profile = profile_payload(req);
            let verdict = config.screen(req, &profile);
            counts[match verdict.recommended_label {
                Label::Invasive => 0,
                Label::Benign => 1,
                Label::NeedsReview => 2,
            }] += 1;
            review_row(req, &profile, &verdict)
        })
        .collect();
    if rows.is_empty() {
        return Err(CliError::Data(format!(
            "{}: no requests found",
            path.display()
        )));
    }
    let csv = export_review_csv(&rows).map_err(data)?;
    write_file(out, csv.as_bytes())?;
    let summary = format!(
        "requests={} invasive={} benign={} needs_review={} skipped={}",
        rows.len(),
        counts[0],
        counts[1],
        counts[2],
        skipped
    );
    writeln!(io.stdout, "{summary}").map_err(runtime)?;
    Ok(Done::new(summary))
}

/// Bundle timestamp: `SOURCE_DATE_EPOCH` when set, else the input file's
/// modification time, so retraining on the same file gives the same bytes.
fn created_at(input: &Path) -> Result<DateTime<Utc>, CliError> {
    if let Ok(epoch) = std::env::var("SOURCE_DATE_EPOCH") {
        let secs: i64 = epoch.trim().parse().map_err(|_| {
            CliError::Usage(format!("SOURCE_DATE_EPOCH {epoch:?} is not an integer"))
        })?;
        return DateTime::from_timestamp(secs, 0)
            .ok_or_else(|| CliError::Usage(format!("SOURCE_DATE_EPOCH {secs} out of range")));
    }
    let modified = std::fs::metadata(input)
        .and_then(|m| m.modified())
        .map_err(|e| CliError::Data(format!("cannot stat {}: {e}", input.display())))?;
    let t: DateTime<Utc> = modified.into();
    Ok(DateTime::from_timestamp(t.timestamp(), 0).expect("whole seconds in range"))
}

fn train(
    csv: &Path,
    kind: ModelKind,
    split: SplitOptions,
    out: &Path,
    io: &mut Io<'_>,
) -> Result<Done, CliError> {
    let records = parse_dataset_csv(&read_text(csv)?).map_err(|e| with_path(csv)(&e))?;
    let mut hyper = Hyper::default_for(kind);
    if let Hyper::Svm(h) = &mut hyper {
        h.seed = split.seed;
    }
    let outcome = pipeline::train(&records, hyper, split, created_at(csv)?)
        .map_err(|e| with_path(csv)(&e))?;
    let bytes = save_bundle(&outcome.bundle).map_err(data)?;
    write_file(out, &bytes)?;

    let c = &outcome.clean;
    if c.duplicates_removed + c.rejected > 0 {
        writeln!(
            io.stderr,
            "note: dropped {} duplicate and {} invalid rows",
            c.duplicates_removed, c.rejected
        )
        .map_err(runtime)?;
    }
    let summary = format!(
        "train={} test={}",
        outcome.split.y_train.len(),
        outcome.split.y_test.len()
    );
    writeln!(io.stdout, "{summary}").map_err(runtime)?;
    Ok(Done::new(summary))
}

fn evaluate(
    csv: &Path,
    bundle_path: &Path,
    report_path: Option<PathBuf>,
    io: &mut Io<'_>,
) -> Result<Done, CliError> {
    let bytes = std::fs::read(bundle_path)
        .map_err(|e| CliError::Data(format!("cannot read {}: {e}", bundle_path.display())))?;
    let bundle = load_bundle(&bytes).map_err(|e| with_path(bundle_path)(&e))?;
    let records = parse_dataset_csv(&read_text(csv)?).map_err(|e| with_path(csv)(&e))?;
    let eval = pipeline::evaluate(&bundle, &records).map_err(|e| with_path(csv)(&e))?;

    if eval.matched_training_data {
        writeln!(
            io.stderr,
            "warning: {} contains the bundle's training data; scoring only the {} held-out rows",
            csv.display(),
            eval.evaluated
        )
        .map_err(runtime)?;
    }
    if eval.encode.unseen_keys > 0 {
        writeln!(
            io.stderr,
            "note: {} payload keys are not in the model schema and were ignored",
            eval.encode.unseen_keys
        )
        .map_err(runtime)?;
    }
    let report = EvaluationReport::new(bundle.kind().as_str(), &eval.matrix).map_err(data)?;
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    writeln!(io.stdout, "{json}").map_err(runtime)?;
    if let Some(p) = &report_path {
        write_file(p, format!("{json}\n").as_bytes())?;
    }
    Ok(Done {
        summary: format!("evaluated={}", eval.evaluated),
        report_path,
    })
}

fn serve(
    lr: Option<PathBuf>,
    dt: Option<PathBuf>,
    svm: Option<PathBuf>,
    host: Option<std::net::IpAddr>,
    port: Option<u16>,
    io: &mut Io<'_>,
) -> Result<Done, CliError> {
    let mut config = ServiceConfig::from_env().map_err(|e| CliError::Usage(e.to_string()))?;
    for (kind, path) in [
        (ModelKind::Lr, lr),
        (ModelKind::Dt, dt),
        (ModelKind::Svm, svm),
    ] {
        if let Some(p) = path {
            config.bundles.insert(kind, p);
        }
    }
    if let Some(h) = host {
        config.bind.set_ip(h);
    }
    if let Some(p) = port {
        config.bind.set_port(p);
    }
    let state = config.load().map_err(data)?;

    let rt = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(runtime)?;
    rt.block_on(async {
        let listener = tokio::net::TcpListener::bind(config.bind)
            .await
            .map_err(|e| CliError::Runtime(format!("cannot bind {}: {e}", config.bind)))?;
        let addr = listener.local_addr().map_err(runtime)?;
        let kinds: Vec<&str> = state.kinds().iter().map(|k| k.as_str()).collect();
        writeln!(
            io.stdout,
            "listening on http://{addr} models={}",
            kinds.join(",")
        )
        .map_err(runtime)?;
        io.stdout.flush().map_err(runtime)?;
        trackwall_service::serve(listener, state)
            .await
            .map_err(runtime)
    })?;
    Ok(Done::new("server stopped"))
}

fn blocklist(
    csv: &Path,
    out: Option<&Path>,
    sink: &str,
    io: &mut Io<'_>,
) -> Result<Done, CliError> {
    let records = parse_dataset_csv(&read_text(csv)?).map_err(|e| with_path(csv)(&e))?;
    let text = emit_blocklist(&records, sink).map_err(data)?;
    let hosts = text.lines().count();
    match out {
        Some(p) => write_file(p, text.as_bytes())?,
        None => io.stdout.write_all(text.as_bytes()).map_err(runtime)?,
    }
    let summary = format!("hosts={hosts}");
    if out.is_some() {
        writeln!(io.stdout, "{summary}").map_err(runtime)?;
    }
    Ok(Done::new(summary))
}
