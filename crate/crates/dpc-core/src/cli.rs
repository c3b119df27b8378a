//! Command-line front end: training, evaluation, sweeps, baselines, and
//! map exports with reproducible seeds and self-describing output files.
//!
//! Options resolve in three layers: command-line flags override the optional
//! `key = value` configuration file, which overrides built-in defaults.
//! Unknown configuration keys are rejected rather than ignored, and every
//! output file starts with a comment echoing the fully resolved
//! configuration. Exit codes: 0 success, 2 configuration or argument error,
//! 3 training divergence, 4 I/O or checkpoint error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use crate::channel::{ChannelConfig, Interference};
use crate::classical::{mmse_alpha, LatticeDpc};
use crate::constellation::Constellation;
use crate::eval::{
    awgn_analytic_point, csv_header, decision_region_grid, encoder_map_grid, lambda_sweep,
    measure_curve_point, thp_snr_sweep, write_curve_csv, write_decision_region_csv,
    write_encoder_map_csv, CurvePoint, Scheme, CURVE_COLUMNS,
};
use crate::lattice::Lattice;
use crate::neural::checkpoint::Checkpoint;
use crate::neural::mlp::Activation;
use crate::neural::train::{train, TrainConfig};
use crate::{Error, Result};

#[derive(Parser)]
#[command(
    name = "dpc",
    version,
    about = "Dirty-paper coding experiments: classical precoding, trained codes, Monte Carlo sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train an encoder/decoder pair and write a checkpoint plus a loss log.
    Train(TrainArgs),
    /// Evaluate a checkpoint and append one curve row to a CSV.
    Eval(EvalArgs),
    /// Train one model per lambda (or scan THP intervals) and write a curve.
    Sweep(SweepArgs),
    /// Monte Carlo or closed-form rows for the classical baselines.
    Baseline(BaselineArgs),
    /// Export a model's encoder map (1-D) or decision regions (2-D).
    #[command(name = "export-maps")]
    ExportMaps(ExportArgs),
}

#[derive(Args)]
struct TrainArgs {
    /// `key = value` configuration file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Message constellation: bpsk, qpsk, or qpsk:<scale>.
    #[arg(long)]
    constellation: Option<String>,
    /// Interference process: gaussian:<variance> or qpsk:<power>.
    #[arg(long)]
    interference: Option<String>,
    /// Per-dimension channel noise variance.
    #[arg(long)]
    noise_var: Option<f64>,
    /// Power appetite: the objective charges |x|^2 / lambda per sample.
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    steps_per_epoch: Option<usize>,
    #[arg(long)]
    batch_size: Option<usize>,
    /// Adam learning rate.
    #[arg(long)]
    lr: Option<f64>,
    /// Activation: sin, lrelu, or lrelu:<slope>.
    #[arg(long)]
    activation: Option<String>,
    /// First-layer frequency scale for sinusoidal networks.
    #[arg(long)]
    omega0: Option<f64>,
    #[arg(long)]
    hidden_width: Option<usize>,
    #[arg(long)]
    hidden_layers: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Checkpoint output path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-epoch loss CSV path.
    #[arg(long)]
    log: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Checkpoint to evaluate.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Interference override for mismatch studies, e.g. gaussian:0.1.
    #[arg(long)]
    test_interference: Option<String>,
    /// Monte Carlo sample count.
    #[arg(long)]
    n_eval: Option<usize>,
    /// Row seed; defaults to the checkpoint's training seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Curve CSV the row is appended to.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Sweep scheme: neural (lambda list) or thp (SNR list).
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long)]
    constellation: Option<String>,
    #[arg(long)]
    interference: Option<String>,
    #[arg(long)]
    noise_var: Option<f64>,
    /// Comma-separated lambda list for neural sweeps.
    #[arg(long)]
    lambdas: Option<String>,
    /// Comma-separated target SNR list (dB) for THP sweeps.
    #[arg(long, allow_hyphen_values = true)]
    snr_list: Option<String>,
    /// Message count for THP sweeps; defaults to 2 (1-D) or 4 (2-D).
    #[arg(long)]
    messages: Option<usize>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    steps_per_epoch: Option<usize>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    activation: Option<String>,
    #[arg(long)]
    omega0: Option<f64>,
    #[arg(long)]
    hidden_width: Option<usize>,
    #[arg(long)]
    hidden_layers: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    n_eval: Option<usize>,
    /// Curve CSV output path.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BaselineArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Baseline scheme: thp, lattice, naive, or awgn.
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long)]
    constellation: Option<String>,
    #[arg(long)]
    interference: Option<String>,
    #[arg(long)]
    noise_var: Option<f64>,
    /// Comma-separated target SNR list (dB) for thp and awgn rows.
    #[arg(long, allow_hyphen_values = true)]
    snr_list: Option<String>,
    /// Message count; defaults to 2 (1-D) or 4 (2-D).
    #[arg(long)]
    messages: Option<usize>,
    /// Lattice preset for the lattice scheme: scalar:<delta>,
    /// cubic2:<delta>, hex:<volume>, or constructionA:<q>:<scale>.
    #[arg(long)]
    lattice: Option<String>,
    /// Inflation factor for the lattice scheme: mmse or a number in (0, 1].
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    n_eval: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Checkpoint whose maps are exported.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Grid bounds lo:hi, applied per axis.
    #[arg(long, allow_hyphen_values = true)]
    bounds: Option<String>,
    /// Grid points per axis.
    #[arg(long)]
    resolution: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Entry point for the `dpc` binary: parses `std::env` arguments, runs the
/// selected command, and returns the process exit code.
pub fn run_from_env() -> i32 {
    run(std::env::args_os())
}

/// Runs the CLI on explicit arguments (the first is the program name) and
/// returns the exit code instead of exiting, which keeps it testable.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let result = match cli.command {
        Command::Train(args) => cmd_train(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Baseline(args) => cmd_baseline(args),
        Command::ExportMaps(args) => cmd_export_maps(args),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Configuration file contents with layered resolution. Every `take_*`
/// consumes its key; leftovers at `finish` are unknown keys and fail.
struct Resolver {
    file: BTreeMap<String, String>,
}

impl Resolver {
    fn new(path: Option<&Path>) -> Result<Resolver> {
        let mut file = BTreeMap::new();
        if let Some(path) = path {
            let text = std::fs::read_to_string(path).map_err(|e| {
                Error::Config(format!("cannot read {}: {e}", path.display()))
            })?;
            for (idx, raw) in text.lines().enumerate() {
                let line = raw.split('#').next().unwrap_or("").trim();
                if line.is_empty() {
                    continue;
                }
                let (key, value) = line.split_once('=').ok_or_else(|| {
                    Error::Config(format!(
                        "{}:{}: expected 'key = value'",
                        path.display(),
                        idx + 1
                    ))
                })?;
                let key = key.trim().to_string();
                let value = value.trim().to_string();
                if key.is_empty() {
                    return Err(Error::Config(format!(
                        "{}:{}: empty key",
                        path.display(),
                        idx + 1
                    )));
                }
                if file.insert(key.clone(), value).is_some() {
                    return Err(Error::Config(format!(
                        "{}:{}: duplicate key '{key}'",
                        path.display(),
                        idx + 1
                    )));
                }
            }
        }
        Ok(Resolver { file })
    }

    /// Flag value if given, else the parsed file value, else the default.
    fn take<V>(&mut self, key: &str, flag: Option<V>, default: V) -> Result<V>
    where
        V: FromStr,
    {
        match (flag, self.file.remove(key)) {
            (Some(v), _) => Ok(v),
            (None, Some(text)) => text.parse().map_err(|_| {
                Error::Config(format!("key '{key}': cannot parse value '{text}'"))
            }),
            (None, None) => Ok(default),
        }
    }

    /// Like [`Resolver::take`] but without a default.
    fn take_optional<V>(&mut self, key: &str, flag: Option<V>) -> Result<Option<V>>
    where
        V: FromStr,
    {
        match (flag, self.file.remove(key)) {
            (Some(v), _) => Ok(Some(v)),
            (None, Some(text)) => text
                .parse()
                .map(Some)
                .map_err(|_| Error::Config(format!("key '{key}': cannot parse value '{text}'"))),
            (None, None) => Ok(None),
        }
    }

    fn finish(self) -> Result<()> {
        if let Some(key) = self.file.into_keys().next() {
            return Err(Error::Config(format!("unknown configuration key '{key}'")));
        }
        Ok(())
    }
}

fn parse_constellation(spec: &str) -> Result<Constellation> {
    match spec.split_once(':') {
        None if spec == "bpsk" => Ok(Constellation::bpsk()),
        None if spec == "qpsk" => Constellation::qpsk(1.0),
        Some(("qpsk", scale)) => {
            let scale: f64 = scale.parse().map_err(|_| {
                Error::Config(format!("constellation '{spec}': scale is not a number"))
            })?;
            Constellation::qpsk(scale)
        }
        _ => Err(Error::Config(format!(
            "constellation '{spec}': expected bpsk, qpsk, or qpsk:<scale>"
        ))),
    }
}

/// Parses a lattice preset. `constructionA:<q>:<scale>` builds from the
/// length-2 repetition code mod q.
fn parse_lattice_preset(spec: &str) -> Result<Lattice> {
    let parts: Vec<&str> = spec.split(':').collect();
    let num = |text: &str| -> Result<f64> {
        text.parse()
            .map_err(|_| Error::Config(format!("lattice '{spec}': '{text}' is not a number")))
    };
    match parts.as_slice() {
        ["scalar", delta] => Lattice::scalar(num(delta)?),
        ["cubic2", delta] => Lattice::cubic(num(delta)?),
        ["hex", volume] => Lattice::hexagonal(num(volume)?),
        ["constructionA", q, scale] => {
            let q: u32 = q.parse().map_err(|_| {
                Error::Config(format!("lattice '{spec}': modulus must be an integer"))
            })?;
            if q < 2 {
                return Err(Error::Config(format!(
                    "lattice '{spec}': modulus must be at least 2"
                )));
            }
            let words: Vec<[u32; 2]> = (0..q).map(|c| [c, c]).collect();
            Lattice::construction_a(&words, q, num(scale)?)
        }
        _ => Err(Error::Config(format!(
            "lattice '{spec}': expected scalar:<delta>, cubic2:<delta>, hex:<volume>, \
             or constructionA:<q>:<scale>"
        ))),
    }
}

fn parse_list<V: FromStr>(key: &str, text: &str) -> Result<Vec<V>> {
    let items: Result<Vec<V>> = text
        .split(',')
        .map(|item| {
            item.trim().parse().map_err(|_| {
                Error::Config(format!("{key}: cannot parse list entry '{item}'"))
            })
        })
        .collect();
    let items = items?;
    if items.is_empty() {
        return Err(Error::Config(format!("{key}: list is empty")));
    }
    Ok(items)
}

fn path_text(path: &Path) -> String {
    path.display().to_string()
}

/// Appends `key=value` to a config echo under construction.
fn push_echo(echo: &mut String, key: &str, value: impl Display) {
    if !echo.is_empty() {
        echo.push(' ');
    }
    echo.push_str(&format!("{key}={value}"));
}

/// Channel settings shared by several commands, resolved from the layered
/// configuration together with their echo fragment.
struct ChannelSetup {
    constellation: Constellation,
    channel: ChannelConfig,
    constellation_text: String,
}

fn resolve_channel(
    r: &mut Resolver,
    constellation: Option<String>,
    interference: Option<String>,
    noise_var: Option<f64>,
) -> Result<ChannelSetup> {
    let constellation_text =
        r.take("constellation", constellation, "bpsk".to_string())?;
    let interference_text =
        r.take("interference", interference, "gaussian:30".to_string())?;
    let noise_var = r.take("noise-var", noise_var, 1.0)?;
    let constellation = parse_constellation(&constellation_text)?;
    let interference = Interference::parse(&interference_text)?;
    let channel = ChannelConfig::new(constellation.k(), interference, noise_var)?;
    Ok(ChannelSetup { constellation, channel, constellation_text })
}

/// Training hyperparameters resolved from the layered configuration.
fn resolve_train_config(
    r: &mut Resolver,
    epochs: Option<usize>,
    steps_per_epoch: Option<usize>,
    batch_size: Option<usize>,
    lr: Option<f64>,
    activation: Option<String>,
    omega0: Option<f64>,
    hidden_width: Option<usize>,
    hidden_layers: Option<usize>,
    seed: Option<u64>,
) -> Result<TrainConfig> {
    let defaults = TrainConfig::default();
    let activation_text = r.take(
        "activation",
        activation,
        defaults.activation.descriptor(),
    )?;
    let cfg = TrainConfig {
        epochs: r.take("epochs", epochs, defaults.epochs)?,
        steps_per_epoch: r.take("steps-per-epoch", steps_per_epoch, defaults.steps_per_epoch)?,
        batch_size: r.take("batch-size", batch_size, defaults.batch_size)?,
        lr: r.take("lr", lr, defaults.lr)?,
        hidden_width: r.take("hidden-width", hidden_width, defaults.hidden_width)?,
        hidden_layers: r.take("hidden-layers", hidden_layers, defaults.hidden_layers)?,
        activation: Activation::parse(&activation_text)?,
        omega0: r.take("omega0", omega0, defaults.omega0)?,
        seed: r.take("seed", seed, defaults.seed)?,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn echo_channel(echo: &mut String, setup: &ChannelSetup) {
    push_echo(echo, "constellation", &setup.constellation_text);
    push_echo(echo, "interference", setup.channel.interference().descriptor());
    push_echo(echo, "noise-var", setup.channel.noise_var());
}

fn echo_train_config(echo: &mut String, cfg: &TrainConfig) {
    push_echo(echo, "epochs", cfg.epochs);
    push_echo(echo, "steps-per-epoch", cfg.steps_per_epoch);
    push_echo(echo, "batch-size", cfg.batch_size);
    push_echo(echo, "lr", cfg.lr);
    push_echo(echo, "activation", cfg.activation.descriptor());
    push_echo(echo, "omega0", cfg.omega0);
    push_echo(echo, "hidden-width", cfg.hidden_width);
    push_echo(echo, "hidden-layers", cfg.hidden_layers);
    push_echo(echo, "seed", cfg.seed);
}

fn cmd_train(args: TrainArgs) -> Result<()> {
    let mut r = Resolver::new(args.config.as_deref())?;
    let setup = resolve_channel(&mut r, args.constellation, args.interference, args.noise_var)?;
    let lambda = r.take("lambda", args.lambda, 100.0)?;
    let cfg = resolve_train_config(
        &mut r,
        args.epochs,
        args.steps_per_epoch,
        args.batch_size,
        args.lr,
        args.activation,
        args.omega0,
        args.hidden_width,
        args.hidden_layers,
        args.seed,
    )?;
    let out = r.take("out", args.out, PathBuf::from("checkpoint.ndpc"))?;
    let log = r.take("log", args.log, PathBuf::from("training_log.csv"))?;
    r.finish()?;

    let mut echo = String::from("cmd=train");
    echo_channel(&mut echo, &setup);
    push_echo(&mut echo, "lambda", lambda);
    echo_train_config(&mut echo, &cfg);
    push_echo(&mut echo, "out", path_text(&out));
    push_echo(&mut echo, "log", path_text(&log));

    let (checkpoint, losses) = train(&setup.constellation, &setup.channel, lambda, &cfg)?;
    checkpoint.save(&out)?;
    let mut csv = csv_header(&echo);
    csv.push_str("\nepoch,loss\n");
    for (epoch, loss) in losses.iter().enumerate() {
        csv.push_str(&format!("{epoch},{loss}\n"));
    }
    std::fs::write(&log, csv)?;
    println!("wrote {} and {}", out.display(), log.display());
    Ok(())
}

/// Reads `interference` and `noise-var` back out of a checkpoint's config
/// echo so a model can be evaluated under its training conditions.
fn channel_from_echo(echo: &str, k: usize) -> Result<ChannelConfig> {
    let mut fields = BTreeMap::new();
    for token in echo.split_whitespace() {
        if let Some((key, value)) = token.split_once('=') {
            fields.insert(key, value);
        }
    }
    let interference = fields.get("interference").ok_or_else(|| {
        Error::Checkpoint("config echo lacks an interference entry".into())
    })?;
    let noise_var: f64 = fields
        .get("noise-var")
        .ok_or_else(|| Error::Checkpoint("config echo lacks a noise-var entry".into()))?
        .parse()
        .map_err(|_| Error::Checkpoint("config echo has a malformed noise-var".into()))?;
    ChannelConfig::new(k, Interference::parse(interference)?, noise_var)
}

fn cmd_eval(args: EvalArgs) -> Result<()> {
    let mut r = Resolver::new(args.config.as_deref())?;
    let checkpoint_path = r.take_optional("checkpoint", args.checkpoint)?.ok_or_else(|| {
        Error::Config("eval needs --checkpoint".into())
    })?;
    let test_interference =
        r.take_optional("test-interference", args.test_interference)?;
    let n_eval = r.take("n-eval", args.n_eval, 1usize << 20)?;
    let seed = r.take_optional("seed", args.seed)?;
    let out = r.take("out", args.out, PathBuf::from("curves.csv"))?;
    r.finish()?;

    let checkpoint = Checkpoint::load(&checkpoint_path)?;
    let mut channel = channel_from_echo(&checkpoint.config_echo, checkpoint.model.k())?;
    if let Some(spec) = &test_interference {
        channel = channel.with_interference(Interference::parse(spec)?)?;
    }
    let seed = seed.unwrap_or(checkpoint.seed);

    let mut echo = String::from("cmd=eval");
    push_echo(&mut echo, "checkpoint", path_text(&checkpoint_path));
    push_echo(&mut echo, "interference", channel.interference().descriptor());
    push_echo(&mut echo, "noise-var", channel.noise_var());
    push_echo(&mut echo, "n-eval", n_eval);
    push_echo(&mut echo, "seed", seed);

    let scheme = Scheme::Neural(checkpoint.model);
    let point = measure_curve_point(&scheme, &channel, n_eval, seed)?;
    append_curve_row(&out, &echo, &point)?;
    println!("{}", point.csv_row());
    Ok(())
}

/// Appends one row to a curve CSV, creating it with headers if missing.
fn append_curve_row(path: &Path, echo: &str, point: &CurvePoint) -> Result<()> {
    use std::io::Write;
    let mut file = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)?;
    if file.metadata()?.len() == 0 {
        writeln!(file, "{}", csv_header(echo))?;
        writeln!(file, "{CURVE_COLUMNS}")?;
    }
    writeln!(file, "{}", point.csv_row())?;
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    let mut r = Resolver::new(args.config.as_deref())?;
    let scheme = r.take("scheme", args.scheme, "neural".to_string())?;
    let setup = resolve_channel(&mut r, args.constellation, args.interference, args.noise_var)?;
    let lambdas_text = r.take_optional("lambdas", args.lambdas)?;
    let snr_text = r.take_optional("snr-list", args.snr_list)?;
    let default_messages = if setup.channel.k() == 1 { 2 } else { 4 };
    let messages = r.take("messages", args.messages, default_messages)?;
    let cfg = resolve_train_config(
        &mut r,
        args.epochs,
        args.steps_per_epoch,
        args.batch_size,
        args.lr,
        args.activation,
        args.omega0,
        args.hidden_width,
        args.hidden_layers,
        args.seed,
    )?;
    let n_eval = r.take("n-eval", args.n_eval, 1usize << 20)?;
    let out = r.take("out", args.out, PathBuf::from("sweep.csv"))?;
    r.finish()?;

    let mut echo = String::from("cmd=sweep");
    push_echo(&mut echo, "scheme", &scheme);
    echo_channel(&mut echo, &setup);

    let points = match scheme.as_str() {
        "neural" => {
            let lambdas_text = lambdas_text
                .ok_or_else(|| Error::Config("neural sweep needs --lambdas".into()))?;
            let lambdas: Vec<f64> = parse_list("lambdas", &lambdas_text)?;
            push_echo(&mut echo, "lambdas", &lambdas_text);
            echo_train_config(&mut echo, &cfg);
            push_echo(&mut echo, "n-eval", n_eval);
            lambda_sweep(&setup.constellation, &setup.channel, &cfg, &lambdas, n_eval)?
        }
        "thp" => {
            let snr_text =
                snr_text.ok_or_else(|| Error::Config("thp sweep needs --snr-list".into()))?;
            let snrs: Vec<f64> = parse_list("snr-list", &snr_text)?;
            push_echo(&mut echo, "snr-list", &snr_text);
            push_echo(&mut echo, "messages", messages);
            push_echo(&mut echo, "seed", cfg.seed);
            push_echo(&mut echo, "n-eval", n_eval);
            thp_snr_sweep(&setup.channel, messages, &snrs, n_eval, cfg.seed)?
        }
        other => {
            return Err(Error::Config(format!(
                "sweep scheme must be neural or thp, got '{other}'"
            )))
        }
    };
    push_echo(&mut echo, "out", path_text(&out));
    write_curve_csv(&out, &echo, &points)?;
    println!("wrote {} ({} rows)", out.display(), points.len());
    Ok(())
}

fn cmd_baseline(args: BaselineArgs) -> Result<()> {
    let mut r = Resolver::new(args.config.as_deref())?;
    let scheme_text = r.take("scheme", args.scheme, "thp".to_string())?;
    let setup = resolve_channel(&mut r, args.constellation, args.interference, args.noise_var)?;
    let snr_text = r.take_optional("snr-list", args.snr_list)?;
    let default_messages = if setup.channel.k() == 1 { 2 } else { 4 };
    let messages = r.take("messages", args.messages, default_messages)?;
    let lattice_text = r.take("lattice", args.lattice, "hex:1".to_string())?;
    let alpha_text = r.take("alpha", args.alpha, "mmse".to_string())?;
    let seed = r.take("seed", args.seed, 1u64)?;
    let n_eval = r.take("n-eval", args.n_eval, 1usize << 20)?;
    let out = r.take("out", args.out, PathBuf::from("baseline.csv"))?;
    r.finish()?;

    let mut echo = String::from("cmd=baseline");
    push_echo(&mut echo, "scheme", &scheme_text);
    echo_channel(&mut echo, &setup);

    let snrs: Option<Vec<f64>> = match &snr_text {
        Some(text) => Some(parse_list("snr-list", text)?),
        None => None,
    };
    let points = match scheme_text.as_str() {
        "thp" => {
            let snrs =
                snrs.ok_or_else(|| Error::Config("thp baseline needs --snr-list".into()))?;
            push_echo(&mut echo, "snr-list", snr_text.as_deref().unwrap_or(""));
            push_echo(&mut echo, "messages", messages);
            thp_snr_sweep(&setup.channel, messages, &snrs, n_eval, seed)?
        }
        "awgn" => {
            let snrs =
                snrs.ok_or_else(|| Error::Config("awgn baseline needs --snr-list".into()))?;
            push_echo(&mut echo, "snr-list", snr_text.as_deref().unwrap_or(""));
            let mut points = Vec::with_capacity(snrs.len());
            for &snr in &snrs {
                points.push(awgn_analytic_point(&setup.constellation, snr, seed)?);
            }
            points
        }
        "naive" => {
            let scheme = Scheme::Naive(setup.constellation.clone());
            vec![measure_curve_point(&scheme, &setup.channel, n_eval, seed)?]
        }
        "lattice" => {
            let lattice = parse_lattice_preset(&lattice_text)?;
            push_echo(&mut echo, "lattice", &lattice_text);
            push_echo(&mut echo, "alpha", &alpha_text);
            push_echo(&mut echo, "messages", messages);
            let constellation = Constellation::from_lattice(&lattice, messages)?;
            let per_dim_power = lattice.second_moment_grid(512);
            let alpha = match alpha_text.as_str() {
                "mmse" => mmse_alpha(per_dim_power, setup.channel.noise_var())?,
                text => text.parse().map_err(|_| {
                    Error::Config(format!("alpha '{text}': expected mmse or a number"))
                })?,
            };
            let dpc = LatticeDpc::new(lattice, constellation, alpha)?;
            vec![measure_curve_point(&Scheme::Lattice(dpc), &setup.channel, n_eval, seed)?]
        }
        other => {
            return Err(Error::Config(format!(
                "baseline scheme must be thp, lattice, naive, or awgn, got '{other}'"
            )))
        }
    };
    push_echo(&mut echo, "seed", seed);
    push_echo(&mut echo, "n-eval", n_eval);
    push_echo(&mut echo, "out", path_text(&out));
    write_curve_csv(&out, &echo, &points)?;
    println!("wrote {} ({} rows)", out.display(), points.len());
    Ok(())
}

fn cmd_export_maps(args: ExportArgs) -> Result<()> {
    let mut r = Resolver::new(args.config.as_deref())?;
    let checkpoint_path = r.take_optional("checkpoint", args.checkpoint)?.ok_or_else(|| {
        Error::Config("export-maps needs --checkpoint".into())
    })?;
    let bounds_text = r.take("bounds", args.bounds, "-15:15".to_string())?;
    let resolution = r.take("resolution", args.resolution, 256usize)?;
    let out = r.take_optional("out", args.out)?;
    r.finish()?;

    let (lo, hi) = bounds_text
        .split_once(':')
        .and_then(|(lo, hi)| Some((lo.parse::<f64>().ok()?, hi.parse::<f64>().ok()?)))
        .ok_or_else(|| {
            Error::Config(format!("bounds '{bounds_text}': expected <lo>:<hi>"))
        })?;
    let checkpoint = Checkpoint::load(&checkpoint_path)?;
    let model = &checkpoint.model;

    let mut echo = String::from("cmd=export-maps");
    push_echo(&mut echo, "checkpoint", path_text(&checkpoint_path));
    push_echo(&mut echo, "bounds", format!("{lo}:{hi}"));
    push_echo(&mut echo, "resolution", resolution);

    if model.k() == 1 {
        let out = out.unwrap_or_else(|| PathBuf::from("encoder_map.csv"));
        push_echo(&mut echo, "out", path_text(&out));
        let rows = encoder_map_grid(model, (lo, hi), resolution)?;
        write_encoder_map_csv(&out, &echo, &rows)?;
        println!("wrote {} ({} rows)", out.display(), rows.len());
    } else {
        let out = out.unwrap_or_else(|| PathBuf::from("decision_regions.csv"));
        push_echo(&mut echo, "out", path_text(&out));
        let rows = decision_region_grid(model, [(lo, hi), (lo, hi)], resolution)?;
        write_decision_region_csv(&out, &echo, &rows)?;
        println!("wrote {} ({} rows)", out.display(), rows.len());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tmp(name: &str) -> PathBuf {
        std::env::temp_dir().join(format!("dpc-cli-{}-{name}", std::process::id()))
    }

    fn write_tmp(name: &str, contents: &str) -> PathBuf {
        let path = tmp(name);
        std::fs::write(&path, contents).unwrap();
        path
    }

    #[test]
    fn resolver_precedence_and_unknown_keys() {
        let path = write_tmp(
            "resolver.conf",
            "# comment line\nlr = 0.5   # trailing comment\nepochs = 7\n\n",
        );
        let mut r = Resolver::new(Some(&path)).unwrap();
        // Flag beats file, file beats default, default fills the rest.
        assert_eq!(r.take("lr", Some(0.25), 1e-3).unwrap(), 0.25);
        assert_eq!(r.take("epochs", None::<usize>, 150).unwrap(), 7);
        assert_eq!(r.take("seed", None::<u64>, 42).unwrap(), 42);
        r.finish().unwrap();

        let path = write_tmp("unknown.conf", "no_such_key = 1\n");
        let r = Resolver::new(Some(&path)).unwrap();
        match r.finish() {
            Err(Error::Config(msg)) => assert!(msg.contains("no_such_key")),
            other => panic!("expected unknown-key error, got {other:?}"),
        }
    }

    #[test]
    fn resolver_rejects_malformed_lines() {
        let path = write_tmp("malformed.conf", "just a line\n");
        assert!(matches!(Resolver::new(Some(&path)), Err(Error::Config(_))));
        let path = write_tmp("duplicate.conf", "a = 1\na = 2\n");
        assert!(matches!(Resolver::new(Some(&path)), Err(Error::Config(_))));
        let path = write_tmp("badvalue.conf", "epochs = soon\n");
        let mut r = Resolver::new(Some(&path)).unwrap();
        assert!(matches!(
            r.take("epochs", None::<usize>, 1),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn constellation_and_lattice_specs() {
        assert_eq!(parse_constellation("bpsk").unwrap().cardinality(), 2);
        let q = parse_constellation("qpsk:2").unwrap();
        assert_eq!(q.k(), 2);
        assert!((q.average_power() - 4.0).abs() < 1e-12);
        assert!(parse_constellation("pam8").is_err());

        assert_eq!(parse_lattice_preset("scalar:4").unwrap().k(), 1);
        assert_eq!(parse_lattice_preset("cubic2:3").unwrap().k(), 2);
        let hex = parse_lattice_preset("hex:2").unwrap();
        assert!((hex.cell_volume() - 2.0).abs() < 1e-9);
        let d2 = parse_lattice_preset("constructionA:2:1").unwrap();
        assert!((d2.cell_volume() - 2.0).abs() < 1e-9);
        assert!(parse_lattice_preset("constructionA:1:1").is_err());
        assert!(parse_lattice_preset("klein:1").is_err());
    }

    #[test]
    fn unknown_flag_exits_2() {
        assert_eq!(run(["dpc", "train", "--no-such-flag"]), 2);
        assert_eq!(run(["dpc", "no-such-command"]), 2);
    }

    #[test]
    fn missing_checkpoint_exits_4() {
        let out = tmp("missing-eval.csv");
        assert_eq!(
            run([
                "dpc",
                "eval",
                "--checkpoint",
                "/nonexistent/model.ndpc",
                "--out",
                out.to_str().unwrap(),
            ]),
            4
        );
    }

    #[test]
    fn train_eval_export_round_trip() {
        let ckpt = tmp("roundtrip.ndpc");
        let log = tmp("roundtrip-log.csv");
        let curves = tmp("roundtrip-curves.csv");
        let map = tmp("roundtrip-map.csv");
        for path in [&ckpt, &log, &curves, &map] {
            let _ = std::fs::remove_file(path);
        }
        let code = run([
            "dpc",
            "train",
            "--constellation",
            "bpsk",
            "--interference",
            "gaussian:4",
            "--noise-var",
            "1",
            "--lambda",
            "10",
            "--epochs",
            "1",
            "--steps-per-epoch",
            "4",
            "--batch-size",
            "16",
            "--hidden-width",
            "8",
            "--hidden-layers",
            "1",
            "--seed",
            "3",
            "--out",
            ckpt.to_str().unwrap(),
            "--log",
            log.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        let log_text = std::fs::read_to_string(&log).unwrap();
        assert!(log_text.starts_with("# dpc "));
        assert!(log_text.contains("cmd=train"));
        assert_eq!(log_text.lines().count(), 3);

        let code = run([
            "dpc",
            "eval",
            "--checkpoint",
            ckpt.to_str().unwrap(),
            "--n-eval",
            "4096",
            "--out",
            curves.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        // Appending a second row keeps one header.
        let code = run([
            "dpc",
            "eval",
            "--checkpoint",
            ckpt.to_str().unwrap(),
            "--n-eval",
            "4096",
            "--test-interference",
            "gaussian:0.5",
            "--out",
            curves.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        let curve_text = std::fs::read_to_string(&curves).unwrap();
        let lines: Vec<&str> = curve_text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[1], CURVE_COLUMNS);
        assert!(lines[2].starts_with("neural,10,"));
        assert!(lines[3].contains("gaussian:0.5"));
        // Same seed twice gives identical rows.
        let row_a: Vec<&str> = lines[2].split(',').collect();
        assert_eq!(row_a[7], "3");

        let code = run([
            "dpc",
            "export-maps",
            "--checkpoint",
            ckpt.to_str().unwrap(),
            "--bounds",
            "-4:4",
            "--resolution",
            "5",
            "--out",
            map.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        let map_text = std::fs::read_to_string(&map).unwrap();
        assert_eq!(map_text.lines().nth(1), Some("s,x_v0,x_v1"));
        assert_eq!(map_text.lines().count(), 7);

        for path in [&ckpt, &log, &curves, &map] {
            let _ = std::fs::remove_file(path);
        }
    }

    #[test]
    fn zero_epoch_train_writes_empty_log_body() {
        let ckpt = tmp("zero-epoch.ndpc");
        let log = tmp("zero-epoch-log.csv");
        let code = run([
            "dpc",
            "train",
            "--epochs",
            "0",
            "--hidden-width",
            "8",
            "--hidden-layers",
            "1",
            "--out",
            ckpt.to_str().unwrap(),
            "--log",
            log.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        let log_text = std::fs::read_to_string(&log).unwrap();
        assert_eq!(log_text.lines().count(), 2, "header and columns only");
        assert!(Checkpoint::load(&ckpt).is_ok());
        let _ = std::fs::remove_file(&ckpt);
        let _ = std::fs::remove_file(&log);
    }

    #[test]
    fn config_file_drives_baseline_and_flags_override() {
        let out_a = tmp("baseline-a.csv");
        let out_b = tmp("baseline-b.csv");
        let conf = write_tmp(
            "baseline.conf",
            &format!(
                "scheme = awgn\nsnr-list = 0,4\nconstellation = bpsk\nout = {}\n",
                out_a.display()
            ),
        );
        assert_eq!(run(["dpc", "baseline", "--config", conf.to_str().unwrap()]), 0);
        let text = std::fs::read_to_string(&out_a).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert!(text.contains("awgn:analytic=1"));
        let q = crate::math::q_function(2f64.sqrt());
        assert!(text.contains(&format!("awgn:analytic=1,,0,{q}")));

        // The same file with --out overridden writes elsewhere.
        assert_eq!(
            run([
                "dpc",
                "baseline",
                "--config",
                conf.to_str().unwrap(),
                "--out",
                out_b.to_str().unwrap(),
            ]),
            0
        );
        assert!(out_b.exists());
        for path in [&out_a, &out_b, &conf] {
            let _ = std::fs::remove_file(path);
        }
    }

    #[test]
    fn baseline_rejects_unknown_scheme_and_mismatched_lattice() {
        assert_eq!(run(["dpc", "baseline", "--scheme", "turbo"]), 2);
        // 2-D lattice under a 1-D (bpsk) channel is a dimension mismatch.
        let out = tmp("lattice-mismatch.csv");
        assert_eq!(
            run([
                "dpc",
                "baseline",
                "--scheme",
                "lattice",
                "--constellation",
                "bpsk",
                "--lattice",
                "hex:1",
                "--n-eval",
                "64",
                "--out",
                out.to_str().unwrap(),
            ]),
            2
        );
    }

    #[test]
    fn sweep_requires_matching_list() {
        assert_eq!(run(["dpc", "sweep", "--scheme", "thp"]), 2);
        assert_eq!(run(["dpc", "sweep", "--scheme", "neural"]), 2);
        assert_eq!(run(["dpc", "sweep", "--scheme", "dirty"]), 2);
    }

    #[test]
    fn thp_sweep_writes_sorted_rows() {
        let out = tmp("thp-sweep.csv");
        let code = run([
            "dpc",
            "sweep",
            "--scheme",
            "thp",
            "--snr-list",
            "6,2",
            "--n-eval",
            "2048",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        let text = std::fs::read_to_string(&out).unwrap();
        let rows: Vec<&str> = text.lines().skip(2).collect();
        assert_eq!(rows.len(), 2);
        let snr_of = |row: &str| row.split(',').nth(2).unwrap().parse::<f64>().unwrap();
        assert!(snr_of(rows[0]) < snr_of(rows[1]));
        let _ = std::fs::remove_file(&out);
    }

    #[test]
    fn channel_echo_round_trip() {
        let channel = channel_from_echo(
            "k=1 messages=2 interference=gaussian:30 noise-var=0.5 lambda=100",
            1,
        )
        .unwrap();
        assert_eq!(channel.noise_var(), 0.5);
        assert_eq!(
            channel.interference(),
            &Interference::Gaussian { variance: 30.0 }
        );
        assert!(channel_from_echo("k=1 messages=2", 1).is_err());
    }
}
