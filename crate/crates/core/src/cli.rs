//! Command-line driver: configuration loading, runs, sweeps, channel-file
//! generation and plot-data reports.
//!
//! Every output is plain CSV or JSON. `results.csv` starts with a comment
//! line carrying the manifest hash, followed by one row per
//! trial × scheme × user × rate with the pre-FFT and post-FFT metrics side
//! by side.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::channel::{save_channels, N_USERS};
use crate::experiment::{
    aggregate, ecdf, histogram_pdf, sweep, DecodeMode, Experiment, ExperimentConfig, ExperimentError,
    ModeMetrics, Scheme, SweepAxis, SweepRow, TrialResult,
};
use crate::metrics;

/// Name of the per-row results table.
pub const RESULTS_FILE: &str = "results.csv";
/// Name of the run summary.
pub const SUMMARY_FILE: &str = "summary.json";
/// Name of the run manifest.
pub const MANIFEST_FILE: &str = "manifest.json";
/// Name of the combined sweep table.
pub const SWEEP_FILE: &str = "sweep.csv";

/// Process exit status of a successful command.
pub const EXIT_OK: i32 = 0;
/// Exit status for invalid configuration or arguments.
pub const EXIT_CONFIG: i32 = 2;
/// Exit status for failures while running or writing output.
pub const EXIT_RUNTIME: i32 = 3;

/// Failure of a CLI command, classified by exit status.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("runtime error: {0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }
}

impl From<ExperimentError> for CliError {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::Config { .. } | ExperimentError::EmptyInput => CliError::Config(e.to_string()),
            ExperimentError::Channel(crate::channel::ChannelError::InvalidConfig(_)) => {
                CliError::Config(e.to_string())
            }
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(format!("{}: {e}", path.display()))
}

#[derive(Debug, Parser)]
#[command(name = "iawlan", version, about = "Interference-alignment MIMO-OFDM WLAN link simulator")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    /// Print the default configuration as TOML and exit.
    #[arg(long)]
    pub print_defaults: bool,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// TOML configuration file; defaults are used for missing fields.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Master seed, overriding the configuration.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,
    /// Suppress progress messages.
    #[arg(long, global = true)]
    pub quiet: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run all trials and write results.csv, summary.json and manifest.json.
    Run {
        /// Override the number of trials.
        #[arg(long)]
        n_trials: Option<usize>,
    },
    /// Paired-seed parameter sweep writing sweep.csv.
    Sweep {
        /// Swept parameter: M, L, rho, snr or feedback.
        #[arg(long)]
        axis: String,
        /// Values as a comma list (`2,10,30`) or an inclusive range
        /// (`1:64` or `start:step:end`).
        #[arg(long, allow_hyphen_values = true)]
        values: String,
        /// Override the number of trials per value.
        #[arg(long)]
        n_trials: Option<usize>,
    },
    /// Generate a channel file from the configured generator.
    Genchan {
        /// Number of realizations.
        #[arg(long)]
        count: usize,
        /// Output file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Derive plot data for one figure from a results.csv or sweep.csv.
    Report {
        /// Input table.
        results: PathBuf,
        #[arg(long, value_enum)]
        figure: Figure,
        /// Rate (Mb/s) whose metrics are reported.
        #[arg(long, default_value_t = 24)]
        rate: u32,
        /// BER targets for `ber_sumrate`, comma separated.
        #[arg(long, default_value = "1e-1,1e-2,1e-3,1e-4,1e-5,1e-6")]
        ber_targets: String,
        /// Output CSV (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Plot-data figures produced by `report`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum Figure {
    /// SRNR density per scheme and decoding path.
    SrnrPdf,
    /// EVM density per scheme and decoding path, including asynchronous IA.
    AsyncEvmPdf,
    /// Pre-FFT EVM degradation versus decoder length.
    TradeoffL,
    /// EVM versus number of training symbols.
    EvmVsM,
    /// EVM versus feedback delay.
    EvmVsFeedback,
    /// Empirical EVM CDF per scheme and decoding path.
    EvmCdf,
    /// Mean sum-rate meeting each BER target.
    BerSumrate,
}

// ---------------------------------------------------------------------------
// Configuration.

/// Reads and validates a TOML configuration; `None` gives the defaults.
pub fn load_config(path: Option<&Path>) -> Result<ExperimentConfig, CliError> {
    let Some(path) = path else {
        return Ok(ExperimentConfig::default());
    };
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let mut cfg = parse_config(&text).map_err(|e| match e {
        CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
        other => other,
    })?;
    if let Some(f) = &cfg.channel_file {
        if f.is_relative() {
            if let Some(dir) = path.parent() {
                cfg.channel_file = Some(dir.join(f));
            }
        }
    }
    Ok(cfg)
}

/// Parses a TOML configuration document.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, CliError> {
    let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

/// The default configuration as a TOML document.
pub fn defaults_toml() -> String {
    toml::to_string_pretty(&ExperimentConfig::default()).expect("default config serializes")
}

/// Parses sweep values: `a,b,c`, `start:end` or `start:step:end`.
pub fn parse_values(s: &str) -> Result<Vec<f64>, CliError> {
    let bad = |m: String| CliError::Config(format!("--values: {m}"));
    let s = s.trim();
    if s.is_empty() {
        return Err(bad("no values given".into()));
    }
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad(format!("cannot parse {t:?}")));
    let values = if s.contains(':') {
        let parts: Vec<f64> = s.split(':').map(num).collect::<Result<_, _>>()?;
        let (start, step, end) = match parts[..] {
            [a, b] => (a, 1.0, b),
            [a, st, b] => (a, st, b),
            _ => return Err(bad(format!("bad range {s:?}"))),
        };
        if !(step > 0.0) || end < start {
            return Err(bad(format!("empty range {s:?}")));
        }
        let n = ((end - start) / step + 1e-9).floor() as usize + 1;
        (0..n).map(|k| start + k as f64 * step).collect()
    } else {
        s.split(',').filter(|t| !t.trim().is_empty()).map(num).collect::<Result<Vec<_>, _>>()?
    };
    if values.is_empty() {
        return Err(bad("no values given".into()));
    }
    Ok(values)
}

// ---------------------------------------------------------------------------
// Manifest.

/// Provenance record written next to every run's outputs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub config: ExperimentConfig,
    /// Extra command arguments (sweep axis and values, genchan count).
    pub arguments: BTreeMap<String, String>,
    /// Output files, relative to the output directory.
    pub outputs: Vec<String>,
    /// Hex SHA-256 of this manifest with timestamps omitted.
    #[serde(default)]
    pub hash: String,
    /// Unix seconds; from `SOURCE_DATE_EPOCH` when set.
    pub started_unix: u64,
    pub finished_unix: u64,
}

impl RunManifest {
    fn new(command: &str, config: &ExperimentConfig, outputs: &[&str]) -> Self {
        RunManifest {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            seed: config.seed,
            config: config.clone(),
            arguments: BTreeMap::new(),
            outputs: outputs.iter().map(|s| s.to_string()).collect(),
            hash: String::new(),
            started_unix: now_unix(),
            finished_unix: 0,
        }
    }

    /// SHA-256 over the manifest with `hash` and the timestamps blanked, so
    /// the value depends only on config, seed, version and outputs.
    pub fn compute_hash(&self) -> String {
        let mut m = self.clone();
        m.hash.clear();
        m.started_unix = 0;
        m.finished_unix = 0;
        let bytes = serde_json::to_vec(&m).expect("manifest serializes");
        Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
    }

    fn seal(&mut self) {
        self.hash = self.compute_hash();
    }
}

fn now_unix() -> u64 {
    if let Some(v) = std::env::var("SOURCE_DATE_EPOCH").ok().and_then(|s| s.trim().parse().ok()) {
        return v;
    }
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| io_err(path, e))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| io_err(path, e))
}

// ---------------------------------------------------------------------------
// results.csv

/// One row of `results.csv`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub trial: usize,
    pub scheme: String,
    pub user: usize,
    pub rate_mbps: u32,
    pub training_srnr_db: f64,
    pub evm_pre_db: Option<f64>,
    pub ber_pre: Option<f64>,
    pub srnr_pre_db: Option<f64>,
    pub leakage_pre: Option<f64>,
    pub sync_ok_pre: Option<bool>,
    pub evm_post_db: Option<f64>,
    pub ber_post: Option<f64>,
    pub srnr_post_db: Option<f64>,
    pub leakage_post: Option<f64>,
    pub sync_ok_post: Option<bool>,
}

impl ResultRow {
    /// `(evm_db, ber, srnr_db, leakage, sync_ok)` of one decoding path.
    pub fn mode(&self, m: DecodeMode) -> Option<(f64, f64, f64, f64, bool)> {
        match m {
            DecodeMode::PreFft => Some((
                self.evm_pre_db?,
                self.ber_pre?,
                self.srnr_pre_db?,
                self.leakage_pre?,
                self.sync_ok_pre?,
            )),
            DecodeMode::PostFft => Some((
                self.evm_post_db?,
                self.ber_post?,
                self.srnr_post_db?,
                self.leakage_post?,
                self.sync_ok_post?,
            )),
        }
    }
}

/// Flattens trial results into `results.csv` rows.
pub fn result_rows(results: &[TrialResult]) -> Vec<ResultRow> {
    let mut rows = Vec::new();
    for r in results {
        for s in &r.schemes {
            for u in &s.users {
                let srnr = r.training_srnr_db.get(u.user).copied().unwrap_or(f64::NAN);
                for rr in &u.rates {
                    let pre = rr.pre_fft.as_ref();
                    let post = rr.post_fft.as_ref();
                    let f = |m: Option<&ModeMetrics>, g: fn(&ModeMetrics) -> f64| m.map(g);
                    rows.push(ResultRow {
                        trial: r.trial,
                        scheme: s.scheme.name().into(),
                        user: u.user,
                        rate_mbps: rr.rate_mbps,
                        training_srnr_db: srnr,
                        evm_pre_db: f(pre, |m| m.evm_db),
                        ber_pre: f(pre, |m| m.ber),
                        srnr_pre_db: f(pre, |m| m.srnr_db),
                        leakage_pre: f(pre, |m| m.leakage),
                        sync_ok_pre: pre.map(|m| m.sync_ok),
                        evm_post_db: f(post, |m| m.evm_db),
                        ber_post: f(post, |m| m.ber),
                        srnr_post_db: f(post, |m| m.srnr_db),
                        leakage_post: f(post, |m| m.leakage),
                        sync_ok_post: post.map(|m| m.sync_ok),
                    });
                }
            }
        }
    }
    rows
}

/// Writes `results.csv` with the `# manifest_sha256=… n_trials=…` header.
pub fn write_results_csv(path: &Path, hash: &str, results: &[TrialResult]) -> Result<(), CliError> {
    let mut buf = format!("# manifest_sha256={hash} n_trials={}\n", results.len()).into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        for row in result_rows(results) {
            w.serialize(row).map_err(|e| io_err(path, e))?;
        }
        w.flush().map_err(|e| io_err(path, e))?;
    }
    fs::write(path, buf).map_err(|e| io_err(path, e))
}

/// Parsed `results.csv`.
#[derive(Clone, Debug)]
pub struct ResultsTable {
    pub manifest_hash: String,
    pub n_trials: usize,
    pub rows: Vec<ResultRow>,
}

fn parse_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(format!("{}: parse error: {e}", path.display()))
}

/// Reads a `results.csv` written by `run`.
pub fn read_results_csv(path: &Path) -> Result<ResultsTable, CliError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let (header, body) = text.split_once('\n').ok_or_else(|| parse_err(path, "empty file"))?;
    let mut hash = None;
    let mut n_trials = None;
    for kv in header.trim_start_matches('#').split_whitespace() {
        match kv.split_once('=') {
            Some(("manifest_sha256", v)) => hash = Some(v.to_string()),
            Some(("n_trials", v)) => n_trials = v.parse().ok(),
            _ => {}
        }
    }
    let (Some(manifest_hash), Some(n_trials)) = (hash, n_trials) else {
        return Err(parse_err(path, "missing manifest header line"));
    };
    let rows = csv::Reader::from_reader(body.as_bytes())
        .deserialize()
        .collect::<Result<Vec<ResultRow>, _>>()
        .map_err(|e| parse_err(path, e))?;
    Ok(ResultsTable {
        manifest_hash,
        n_trials,
        rows,
    })
}

/// Writes `sweep.csv`.
pub fn write_sweep_csv(path: &Path, rows: &[SweepRow]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io_err(path, e))?;
    for r in rows {
        w.serialize(r).map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

/// Reads a `sweep.csv`.
pub fn read_sweep_csv(path: &Path) -> Result<Vec<SweepRow>, CliError> {
    csv::Reader::from_path(path)
        .map_err(|e| io_err(path, e))?
        .deserialize()
        .collect::<Result<Vec<SweepRow>, _>>()
        .map_err(|e| parse_err(path, e))
}

// ---------------------------------------------------------------------------
// Commands.

struct Ctx {
    global: GlobalArgs,
}

impl Ctx {
    fn note(&self, msg: impl AsRef<str>) {
        if !self.global.quiet {
            eprintln!("{}", msg.as_ref());
        }
    }

    fn config(&self) -> Result<ExperimentConfig, CliError> {
        let mut cfg = load_config(self.global.config.as_deref())?;
        if let Some(s) = self.global.seed {
            cfg.seed = s;
        }
        Ok(cfg)
    }

    fn out_dir(&self) -> Result<&Path, CliError> {
        let d = self.global.out_dir.as_path();
        fs::create_dir_all(d).map_err(|e| io_err(d, e))?;
        Ok(d)
    }

    fn pool(&self) -> Result<rayon::ThreadPool, CliError> {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(j) = self.global.jobs {
            if j == 0 {
                return Err(CliError::Config("--jobs must be at least 1".into()));
            }
            b = b.num_threads(j);
        }
        b.build().map_err(|e| CliError::Runtime(e.to_string()))
    }
}

fn with_trials(mut cfg: ExperimentConfig, n: Option<usize>) -> Result<ExperimentConfig, CliError> {
    if let Some(n) = n {
        cfg.n_trials = n;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_run(ctx: &Ctx, n_trials: Option<usize>) -> Result<(), CliError> {
    let cfg = with_trials(ctx.config()?, n_trials)?;
    let exp = Experiment::new(cfg.clone())?;
    let pool = ctx.pool()?;
    let dir = ctx.out_dir()?;
    let mut manifest = RunManifest::new("run", &cfg, &[RESULTS_FILE, SUMMARY_FILE]);
    manifest.seal();
    write_json(&dir.join(MANIFEST_FILE), &manifest)?;

    ctx.note(format!("running {} trials (seed {})", cfg.n_trials, cfg.seed));
    let results = pool.install(|| exp.run_all());
    write_results_csv(&dir.join(RESULTS_FILE), &manifest.hash, &results)?;
    let summary = aggregate(&results, cfg.evm_rate, cfg.ber_target)?;
    write_json(&dir.join(SUMMARY_FILE), &summary)?;

    manifest.finished_unix = now_unix();
    write_json(&dir.join(MANIFEST_FILE), &manifest)?;
    ctx.note(format!("wrote {}", dir.display()));
    Ok(())
}

fn value_label(v: f64) -> String {
    format!("{v}")
}

fn cmd_sweep(ctx: &Ctx, axis: &str, values: &str, n_trials: Option<usize>) -> Result<(), CliError> {
    let axis = SweepAxis::parse(axis)
        .ok_or_else(|| CliError::Config(format!("--axis: unknown axis {axis:?} (M, L, rho, snr, feedback)")))?;
    let values = parse_values(values)?;
    let cfg = with_trials(ctx.config()?, n_trials)?;
    for &v in &values {
        axis.apply(&cfg, v)?;
    }
    let pool = ctx.pool()?;
    let dir = ctx.out_dir()?;

    let subdirs: Vec<String> = values.iter().map(|v| format!("{}_{}", axis.name(), value_label(*v))).collect();
    let mut outputs = vec![SWEEP_FILE.to_string()];
    for s in &subdirs {
        outputs.push(format!("{s}/{RESULTS_FILE}"));
        outputs.push(format!("{s}/{SUMMARY_FILE}"));
    }
    let output_refs: Vec<&str> = outputs.iter().map(String::as_str).collect();
    let mut manifest = RunManifest::new("sweep", &cfg, &output_refs);
    manifest.arguments.insert("axis".into(), axis.name().into());
    manifest.arguments.insert(
        "values".into(),
        values.iter().map(|v| value_label(*v)).collect::<Vec<_>>().join(","),
    );
    manifest.seal();
    write_json(&dir.join(MANIFEST_FILE), &manifest)?;

    ctx.note(format!("sweeping {} over {} values, {} trials each", axis.name(), values.len(), cfg.n_trials));
    let out = pool.install(|| sweep(&cfg, axis, &values))?;
    for ((v, results), sub) in values.iter().zip(&out.results).zip(&subdirs) {
        let d = dir.join(sub);
        fs::create_dir_all(&d).map_err(|e| io_err(&d, e))?;
        let c = axis.apply(&cfg, *v)?;
        write_results_csv(&d.join(RESULTS_FILE), &manifest.hash, results)?;
        write_json(&d.join(SUMMARY_FILE), &aggregate(results, c.evm_rate, c.ber_target)?)?;
    }
    write_sweep_csv(&dir.join(SWEEP_FILE), &out.rows)?;

    manifest.finished_unix = now_unix();
    write_json(&dir.join(MANIFEST_FILE), &manifest)?;
    ctx.note(format!("wrote {}", dir.display()));
    Ok(())
}

fn cmd_genchan(ctx: &Ctx, count: usize, out: &Path) -> Result<(), CliError> {
    if count == 0 {
        return Err(CliError::Config("--count must be at least 1".into()));
    }
    let mut cfg = ctx.config()?;
    cfg.channel_file = None;
    let exp = Experiment::new(cfg)?;
    let realizations: Vec<_> = (0..count).map(|t| exp.realization(t)).collect();
    save_channels(&realizations, out).map_err(|e| io_err(out, e))?;
    ctx.note(format!("wrote {count} realizations to {}", out.display()));
    Ok(())
}

fn cmd_report(
    ctx: &Ctx,
    input: &Path,
    figure: Figure,
    rate: u32,
    ber_targets: &str,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let targets = ber_targets
        .split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse::<f64>().map_err(|_| CliError::Config(format!("--ber-targets: cannot parse {t:?}"))))
        .collect::<Result<Vec<_>, _>>()?;
    let csv_text = report(input, figure, rate, &targets)?;
    match out {
        Some(p) => fs::write(p, csv_text).map_err(|e| io_err(p, e))?,
        None => io::stdout()
            .write_all(csv_text.as_bytes())
            .map_err(|e| CliError::Runtime(e.to_string()))?,
    }
    ctx.note(format!("{figure:?} report done"));
    Ok(())
}

// ---------------------------------------------------------------------------
// Reports.

fn csv_string<T: Serialize>(header: &[&str], rows: impl IntoIterator<Item = T>) -> Result<String, CliError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(header).map_err(|e| CliError::Runtime(e.to_string()))?;
    for r in rows {
        w.serialize(r).map_err(|e| CliError::Runtime(e.to_string()))?;
    }
    String::from_utf8(w.into_inner().map_err(|e| CliError::Runtime(e.to_string()))?)
        .map_err(|e| CliError::Runtime(e.to_string()))
}

/// Scheme/mode groups present in the table, in canonical order.
fn groups(rows: &[ResultRow]) -> Vec<(Scheme, DecodeMode)> {
    let mut out = Vec::new();
    for r in rows {
        let Some(s) = Scheme::from_name(&r.scheme) else { continue };
        for m in [DecodeMode::PreFft, DecodeMode::PostFft] {
            if r.mode(m).is_some() && !out.contains(&(s, m)) {
                out.push((s, m));
            }
        }
    }
    out.sort_by_key(|(s, m)| (*s, *m == DecodeMode::PostFft));
    out
}

fn column(rows: &[ResultRow], s: Scheme, m: DecodeMode, rate: u32, pick: impl Fn((f64, f64, f64, f64, bool)) -> f64) -> Vec<f64> {
    rows.iter()
        .filter(|r| r.rate_mbps == rate && r.scheme == s.name())
        .filter_map(|r| r.mode(m))
        .map(pick)
        .collect()
}

/// Mean sum-rate per scheme meeting `target`, from the rows of one table.
fn table_sum_rate(t: &ResultsTable, s: Scheme, m: DecodeMode, target: f64) -> f64 {
    let mut per_user: BTreeMap<(usize, usize), (Vec<f64>, Vec<u32>)> = BTreeMap::new();
    for r in t.rows.iter().filter(|r| r.scheme == s.name()) {
        if let Some((_, ber, ..)) = r.mode(m) {
            let e = per_user.entry((r.trial, r.user)).or_default();
            e.0.push(ber);
            e.1.push(r.rate_mbps);
        }
    }
    let share = if s.time_shared() { N_USERS as f64 } else { 1.0 };
    let total: f64 = per_user.values().map(|(b, rt)| metrics::best_rate(b, rt, target) / share).sum();
    if t.n_trials == 0 {
        0.0
    } else {
        total / t.n_trials as f64
    }
}

fn sweep_series(input: &Path, axis: &str, metric: &str, schemes: Option<&[Scheme]>) -> Result<String, CliError> {
    let rows = read_sweep_csv(input)?;
    let keep: Vec<&SweepRow> = rows
        .iter()
        .filter(|r| r.metric == metric)
        .filter(|r| schemes.is_none_or(|ss| ss.iter().any(|s| s.name() == r.scheme)))
        .collect();
    if keep.is_empty() {
        return Err(parse_err(input, format!("no `{metric}` rows in sweep table")));
    }
    csv_string(
        &[axis, "scheme", "mode", "median", "p10", "p90"],
        keep.iter().map(|r| (r.axis_value, &r.scheme, &r.mode, r.median, r.p10, r.p90)),
    )
}

/// Plot-data CSV for `figure` from a results.csv or sweep.csv.
pub fn report(input: &Path, figure: Figure, rate: u32, ber_targets: &[f64]) -> Result<String, CliError> {
    match figure {
        Figure::TradeoffL => sweep_series(input, "L", "degradation_db", Some(&[Scheme::Ia, Scheme::PerfectIa])),
        Figure::EvmVsM => sweep_series(input, "M", "evm_db", None),
        Figure::EvmVsFeedback => sweep_series(input, "feedback", "evm_db", None),
        Figure::SrnrPdf | Figure::AsyncEvmPdf | Figure::EvmCdf => {
            let t = read_results_csv(input)?;
            let mut out = Vec::new();
            for (s, m) in groups(&t.rows) {
                let pts = match figure {
                    Figure::SrnrPdf => histogram_pdf(&column(&t.rows, s, m, rate, |x| x.2), 0.5),
                    Figure::AsyncEvmPdf => histogram_pdf(&column(&t.rows, s, m, rate, |x| x.0), 0.5),
                    _ => ecdf(&column(&t.rows, s, m, rate, |x| x.0)),
                };
                out.extend(pts.into_iter().map(|(x, y)| (s.name(), m.name(), x, y)));
            }
            let (x, y) = match figure {
                Figure::SrnrPdf => ("srnr_db", "density"),
                Figure::AsyncEvmPdf => ("evm_db", "density"),
                _ => ("evm_db", "cdf"),
            };
            csv_string(&["scheme", "mode", x, y], out)
        }
        Figure::BerSumrate => {
            if ber_targets.is_empty() {
                return Err(CliError::Config("--ber-targets: no targets given".into()));
            }
            let t = read_results_csv(input)?;
            let mut schemes: Vec<Scheme> = groups(&t.rows).into_iter().map(|(s, _)| s).collect();
            schemes.dedup();
            let mut out = Vec::new();
            for s in schemes {
                for &target in ber_targets {
                    out.push((s.name(), target, table_sum_rate(&t, s, DecodeMode::PostFft, target)));
                }
            }
            csv_string(&["scheme", "ber_target", "mean_sum_rate_mbps"], out)
        }
    }
}

// ---------------------------------------------------------------------------
// Entry points.

/// Runs a parsed command line.
pub fn run(cli: Cli) -> Result<(), CliError> {
    if cli.print_defaults {
        print!("{}", defaults_toml());
        return Ok(());
    }
    let ctx = Ctx { global: cli.global };
    match cli.command {
        None => Err(CliError::Config("no command given; see --help".into())),
        Some(Command::Run { n_trials }) => cmd_run(&ctx, n_trials),
        Some(Command::Sweep { axis, values, n_trials }) => cmd_sweep(&ctx, &axis, &values, n_trials),
        Some(Command::Genchan { count, out }) => cmd_genchan(&ctx, count, &out),
        Some(Command::Report {
            results,
            figure,
            rate,
            ber_targets,
            out,
        }) => cmd_report(&ctx, &results, figure, rate, &ber_targets, out.as_deref()),
    }
}

/// Parses `args` and runs the command; returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("iawlan: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_and_lists() {
        assert_eq!(parse_values("1:64").unwrap().len(), 64);
        assert_eq!(parse_values("2,10,30,60,100").unwrap(), vec![2.0, 10.0, 30.0, 60.0, 100.0]);
        assert_eq!(parse_values("0:0.25:1").unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(parse_values("").is_err());
        assert!(parse_values(" , ").is_err());
        assert!(parse_values("5:1").is_err());
    }

    #[test]
    fn defaults_round_trip_through_toml() {
        let cfg = parse_config(&defaults_toml()).unwrap();
        assert_eq!(cfg, ExperimentConfig::default());
    }

    #[test]
    fn unknown_scheme_names_the_field() {
        let err = parse_config("schemes = [\"IA\", \"FOO\"]").unwrap_err();
        assert_eq!(err.exit_code(), EXIT_CONFIG);
        assert!(err.to_string().contains("schemes"), "{err}");
    }

    #[test]
    fn hash_ignores_timestamps() {
        let mut a = RunManifest::new("run", &ExperimentConfig::default(), &[RESULTS_FILE]);
        let mut b = a.clone();
        a.started_unix = 1;
        b.started_unix = 2;
        b.finished_unix = 3;
        assert_eq!(a.compute_hash(), b.compute_hash());
        b.seed = 9;
        assert_ne!(a.compute_hash(), b.compute_hash());
    }
}
