use std::fs::{self, File};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use gleak_core::bounds::{bound_report, ln_all_strategies, BoundInputs};
use gleak_core::preprocess::{channel_preprocess, data_preprocess, rationalize_gain};
use gleak_core::{
    leakage, posterior_vulnerability, prior_vulnerability, sample_pairs, Channel, GainFunction, LeakageMode, Prior,
    SampleSet,
};
use gleak_estimate::scenarios::{ScenarioConfig, ScenarioKind, DEFAULT_EXPANSION_CAP};
use gleak_estimate::{
    estimate_channel_preproc, estimate_data_preproc, frequentist_estimate, LearnerKind, LearnerSpec, Method,
};
use gleak_harness::trials::{channel_training_stream, learner_stream, training_stream, validation_stream};
use gleak_harness::{emit_reports, exit_code, run_trial_matrix, HarnessError, Profile, Result, TrialMatrixConfig};
use serde::Serialize;

/// Exact and black-box estimation of g-vulnerability.
///
/// With several learners the reports list the estimates side by side. A
/// learner can only under-estimate the vulnerability (up to validation
/// noise), so the largest estimate is the natural pick; the tool leaves that
/// choice to the reader.
#[derive(Parser)]
#[command(name = "leak", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact vulnerability and leakage from matrix files or a scenario.
    Exact(ExactArgs),
    /// One black-box estimate on a scenario.
    Estimate(EstimateArgs),
    /// Run the trial matrix of a scenario and write reports.
    Scenario(ScenarioArgs),
    /// Statistical bounds and sample complexity.
    Bounds(BoundsArgs),
    /// Write pre-processing artifacts.
    #[command(subcommand)]
    Preprocess(PreprocessCommand),
    /// Print the resolved configuration of a scenario as TOML.
    Config(ConfigArgs),
}

#[derive(Args)]
struct Selection {
    /// Scenario name: multi-guess, location, dp or password.
    #[arg(long)]
    scenario: Option<ScenarioKind>,
    #[arg(long, value_enum, default_value = "desk")]
    profile: Profile,
    /// TOML trial configuration (overrides scenario and profile).
    #[arg(long)]
    config: Option<PathBuf>,
}

impl Selection {
    fn resolve(&self) -> Result<TrialMatrixConfig> {
        match (&self.config, self.scenario) {
            (Some(path), _) => TrialMatrixConfig::load(path),
            (None, Some(kind)) => Ok(TrialMatrixConfig::preset(kind, self.profile)),
            (None, None) => Err(HarnessError::Config("give --scenario or --config".into())),
        }
    }
}

#[derive(Args)]
struct ExactArgs {
    #[arg(long, requires_all = ["channel", "gain"], conflicts_with_all = ["scenario", "config"])]
    prior: Option<PathBuf>,
    #[arg(long)]
    channel: Option<PathBuf>,
    #[arg(long)]
    gain: Option<PathBuf>,
    #[command(flatten)]
    selection: Selection,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EstimateArgs {
    #[command(flatten)]
    selection: Selection,
    #[arg(long, value_parser = parse_method, default_value = "data-preproc")]
    method: Method,
    #[arg(long, value_parser = parse_learner, default_value = "knn")]
    learner: LearnerKind,
    /// Training size.
    #[arg(long, default_value_t = 10_000)]
    m: usize,
    /// Validation size.
    #[arg(long, default_value_t = 10_000)]
    n: usize,
    /// Index of the training set (selects its random stream).
    #[arg(long, default_value_t = 0)]
    index: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Write the sampled training and validation pairs next to the report.
    #[arg(long)]
    dump_samples: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ScenarioArgs {
    /// multi-guess, location, dp or password.
    kind: Option<ScenarioKind>,
    #[arg(long, value_enum, default_value = "desk")]
    profile: Profile,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Report prefix; defaults to `<scenario>-<profile>`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long)]
    m: u64,
    #[arg(long)]
    n: u64,
    /// Variance proxy; defaults to the worst case `(b − a)²/4`.
    #[arg(long)]
    sigma2: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    low: f64,
    #[arg(long, default_value_t = 1.0)]
    high: f64,
    /// `ln |H|`; otherwise computed from `--guesses` and `--observables`.
    #[arg(long, conflicts_with_all = ["guesses", "observables"])]
    ln_hypotheses: Option<f64>,
    #[arg(long, requires = "observables")]
    guesses: Option<usize>,
    #[arg(long)]
    observables: Option<usize>,
    #[arg(long)]
    epsilon: f64,
    #[arg(long)]
    delta: f64,
    #[arg(long)]
    split: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum PreprocessCommand {
    /// Rewrite `(x, y)` pairs into weighted `(w, y)` pairs.
    Data {
        /// CSV of `x,y` pairs (secret indices).
        #[arg(long)]
        samples: PathBuf,
        #[arg(long)]
        gain: PathBuf,
        #[arg(long, default_value_t = DEFAULT_EXPANSION_CAP)]
        cap: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write `β`, `τ` and `R` for a prior and gain.
    Channel {
        #[arg(long)]
        prior: PathBuf,
        #[arg(long)]
        gain: PathBuf,
        /// Prefix for `<out>.tau` and `<out>.r`; `β` goes to stdout.
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct ConfigArgs {
    kind: ScenarioKind,
    #[arg(long, value_enum, default_value = "desk")]
    profile: Profile,
}

fn parse_method(s: &str) -> std::result::Result<Method, String> {
    match s {
        "data-preproc" => Ok(Method::DataPreproc),
        "channel-preproc" => Ok(Method::ChannelPreproc),
        "frequentist" => Ok(Method::Frequentist),
        _ => Err(format!("unknown method `{s}`")),
    }
}

fn parse_learner(s: &str) -> std::result::Result<LearnerKind, String> {
    match s {
        "knn" => Ok(LearnerKind::Knn),
        "mlp" => Ok(LearnerKind::Mlp),
        "none" => Ok(LearnerKind::None),
        _ => Err(format!("unknown learner `{s}`")),
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(p) => fs::write(p, text + "\n")?,
        None => writeln!(io::stdout(), "{text}")?,
    }
    Ok(())
}

#[derive(Serialize)]
struct ExactReport {
    scenario: Option<String>,
    prior_vulnerability: Option<f64>,
    posterior_vulnerability: f64,
    multiplicative_leakage: Option<f64>,
    additive_leakage: Option<f64>,
    wall_time_secs: f64,
}

fn exact(args: &ExactArgs) -> Result<()> {
    let start = Instant::now();
    let (name, model) = match &args.prior {
        Some(prior) => {
            let prior = Prior::parse(&read(prior)?)?;
            let channel = Channel::parse(&read(args.channel.as_deref().expect("required by clap"))?)?;
            let gain = GainFunction::parse(&read(args.gain.as_deref().expect("required by clap"))?)?;
            (None, Some((prior, channel, gain)))
        }
        None => {
            let cfg = args.selection.resolve()?;
            let name = cfg.scenario.kind().to_string();
            match &cfg.scenario {
                ScenarioConfig::Dp(c) => {
                    let v = c.exact_vulnerability()?;
                    return finish_exact(Some(name), None, v, start, args);
                }
                ScenarioConfig::Password(c) => {
                    let v = c.exact_vulnerability()?;
                    return finish_exact(Some(name), None, v, start, args);
                }
                _ => {
                    let s = cfg.scenario.build()?;
                    let m = s.matrix.expect("matrix scenario");
                    (Some(name), Some((m.prior, m.channel, m.gain)))
                }
            }
        }
    };
    let (prior, channel, gain) = model.expect("model is set");
    let post = gain.to_original_units(posterior_vulnerability(&prior, &channel, &gain)?);
    let pre = gain.to_original_units(prior_vulnerability(&prior, &gain)?);
    let report = ExactReport {
        scenario: name,
        prior_vulnerability: Some(pre),
        posterior_vulnerability: post,
        multiplicative_leakage: leakage(&prior, &channel, &gain, LeakageMode::Multiplicative).ok(),
        additive_leakage: Some(post - pre),
        wall_time_secs: start.elapsed().as_secs_f64(),
    };
    emit(&report, args.out.as_deref())
}

fn finish_exact(name: Option<String>, pre: Option<f64>, post: f64, start: Instant, args: &ExactArgs) -> Result<()> {
    let report = ExactReport {
        scenario: name,
        prior_vulnerability: pre,
        posterior_vulnerability: post,
        multiplicative_leakage: None,
        additive_leakage: None,
        wall_time_secs: start.elapsed().as_secs_f64(),
    };
    emit(&report, args.out.as_deref())
}

fn estimate(args: &EstimateArgs) -> Result<()> {
    let mut cfg = args.selection.resolve()?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let s = cfg.scenario.build()?;
    let size_index = cfg.sizes.iter().position(|&m| m >= args.m).unwrap_or(cfg.sizes.len() - 1);
    let spec = LearnerSpec {
        kind: args.learner,
        metric: s.metric,
        codec: s.codec.clone(),
        mlp: Some(cfg.mlp.for_method(args.method).at(size_index)),
    };
    let valid = sample_pairs(&*s.source, &*s.mechanism, args.n, cfg.seed, validation_stream(0));
    let train = || sample_pairs(&*s.source, &*s.mechanism, args.m, cfg.seed, training_stream(args.m, args.index));
    let lstream = learner_stream(args.method, args.learner, args.m, args.index);
    let mut train_set: Option<SampleSet> = None;
    let report = match args.method {
        Method::DataPreproc => {
            let t = train_set.insert(train());
            estimate_data_preproc(t, &valid, &*s.gain, &*s.weights, &spec, cfg.seed, lstream)?
        }
        Method::ChannelPreproc => estimate_channel_preproc(
            &*s.preprocessed,
            &*s.mechanism,
            args.m,
            &valid,
            &*s.gain,
            &spec,
            cfg.seed,
            channel_training_stream(args.m, args.index),
            lstream,
        )?,
        Method::Frequentist => {
            let t = train_set.insert(train());
            frequentist_estimate(t, &valid, &*s.gain)?
        }
    };
    #[derive(Serialize)]
    struct Out<'a> {
        scenario: &'a str,
        exact: f64,
        normalized_error: f64,
        #[serde(flatten)]
        report: gleak_estimate::EstimateReport,
    }
    let out = Out {
        scenario: &s.name,
        exact: s.exact,
        normalized_error: (report.estimate - s.exact).abs() / s.exact,
        report,
    };
    if args.dump_samples {
        let prefix = args.out.clone().unwrap_or_else(|| PathBuf::from(&s.name));
        let path = |suffix: &str| {
            let mut p = prefix.clone().into_os_string();
            p.push(suffix);
            PathBuf::from(p)
        };
        valid.write_csv(File::create(path(".valid.csv"))?, None)?;
        if let Some(t) = &train_set {
            t.write_csv(File::create(path(".train.csv"))?, None)?;
        }
    }
    emit(&out, args.out.as_deref().map(|p| p.with_extension("json")).as_deref())
}

fn scenario(args: &ScenarioArgs) -> Result<()> {
    let mut cfg = match (&args.config, args.kind) {
        (Some(path), _) => TrialMatrixConfig::load(path)?,
        (None, Some(kind)) => TrialMatrixConfig::preset(kind, args.profile),
        (None, None) => return Err(HarnessError::Config("give a scenario name or --config".into())),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let start = Instant::now();
    let outcome = run_trial_matrix(&cfg)?;
    let prefix = args.out.clone().unwrap_or_else(|| {
        let profile = match cfg.profile {
            Profile::Desk => "desk",
            Profile::Paper => "paper",
        };
        PathBuf::from(format!("{}-{profile}", outcome.scenario))
    });
    let files = emit_reports(&outcome, &cfg, &prefix)?;
    let mut err = io::stderr();
    writeln!(err, "scenario {} exact {:.6}", outcome.scenario, outcome.exact)?;
    for a in &outcome.arms {
        writeln!(
            err,
            "{:>16} {:>4} m={:<6} mean={:.4} dispersion={:.4} total={:.4}",
            a.method.to_string(),
            a.learner.to_string(),
            a.m,
            a.metrics.mean,
            a.metrics.dispersion,
            a.metrics.total_error
        )?;
    }
    writeln!(
        err,
        "wrote {}, {}, {} in {:.1}s",
        files.summary.display(),
        files.trials.display(),
        files.boxplot.display(),
        start.elapsed().as_secs_f64()
    )?;
    Ok(())
}

fn bounds(args: &BoundsArgs) -> Result<()> {
    let range = (args.low, args.high);
    let ln_hypotheses = match (args.ln_hypotheses, args.guesses, args.observables) {
        (Some(v), _, _) => v,
        (None, Some(w), Some(y)) => ln_all_strategies(w, y),
        _ => return Err(HarnessError::Config("give --ln-hypotheses or --guesses with --observables".into())),
    };
    let inputs = BoundInputs {
        m: args.m,
        n: args.n,
        sigma2: args
            .sigma2
            .unwrap_or_else(|| gleak_core::bounds::worst_case_variance(range)),
        range,
        ln_hypotheses,
        epsilon: args.epsilon,
        delta: args.delta,
        split: args.split,
    };
    emit(&bound_report(&inputs)?, args.out.as_deref())
}

fn preprocess(cmd: &PreprocessCommand) -> Result<()> {
    match cmd {
        PreprocessCommand::Data { samples, gain, cap, out } => {
            let gain = GainFunction::parse(&read(gain)?)?;
            let weights = rationalize_gain(&gain, *cap)?;
            let samples = SampleSet::read_csv(File::open(samples)?, None)?;
            samples.validate(gain.secrets())?;
            let data = data_preprocess(&samples, &weights)?;
            data.write_csv(File::create(out)?, None)?;
            #[derive(Serialize)]
            struct Info {
                pairs: usize,
                total_weight: u64,
                expansion: f64,
                gain_scale: u64,
            }
            emit(
                &Info {
                    pairs: samples.len(),
                    total_weight: data.total_weight(),
                    expansion: data.total_weight() as f64 / samples.len() as f64,
                    gain_scale: gleak_core::IntegerGain::scale(&weights),
                },
                None,
            )
        }
        PreprocessCommand::Channel { prior, gain, out } => {
            let prior = Prior::parse(&read(prior)?)?;
            let gain = GainFunction::parse(&read(gain)?)?;
            let d = channel_preprocess(&prior, &gain)?;
            let with = |suffix: &str| {
                let mut p = out.clone().into_os_string();
                p.push(suffix);
                PathBuf::from(p)
            };
            fs::write(with(".tau"), d.tau.to_text())?;
            fs::write(with(".r"), d.r.to_text())?;
            #[derive(Serialize)]
            struct Info {
                beta: f64,
            }
            emit(&Info { beta: d.beta }, None)
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Exact(a) => exact(a),
        Command::Estimate(a) => estimate(a),
        Command::Scenario(a) => scenario(a),
        Command::Bounds(a) => bounds(a),
        Command::Preprocess(c) => preprocess(c),
        Command::Config(a) => {
            let text = TrialMatrixConfig::preset(a.kind, a.profile).to_toml();
            write!(io::stdout(), "{text}")?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
