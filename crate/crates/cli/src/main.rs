//! `ladderfl`: steady states, spectra, correlations and named scenarios for
//! the driven three-level ladder atom.

mod config;
mod error;
mod output;
mod scenarios;
mod tasks;

use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use ladderfl::dressed::DressedOp;
use rayon::{ThreadPool, ThreadPoolBuilder};
use serde_json::Value;

use config::{parse_samples_flag, parse_sweep_flag, ParamsConfig, RunConfig, Samples};
use error::{CliError, CliResult};
use output::{write_outputs, Artifact, Metadata};

#[derive(Parser, Debug)]
#[command(name = "ladderfl", version, about = "Driven three-level ladder atom: populations, spectra and photon correlations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Steady-state populations, optionally over parameter sweeps.
    Steady(Common),
    /// Incoherent fluorescence spectrum and coherent weight.
    Spectrum {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        spectral: SpectralArgs,
    },
    /// Normalised first-order correlation g1(tau).
    G1 {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        delays: DelayArgs,
    },
    /// Normalised second-order correlation g2(tau).
    G2 {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        delays: DelayArgs,
    },
    /// Correlation between two dressed-state lines, regression and closed form.
    G2cross {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        delays: DelayArgs,
        /// First line: 0, +1, -1, +2, -2, +3 or -3.
        #[arg(long, allow_hyphen_values = true)]
        first: DressedOp,
        /// Second line.
        #[arg(long, allow_hyphen_values = true)]
        second: DressedOp,
    },
    /// Dressed eigensystem, spectral lines and secular rates.
    Dressed {
        #[command(flatten)]
        common: Common,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Named scenarios that regenerate the standard data sets.
    #[command(subcommand)]
    Scenario(ScenarioCommand),
}

#[derive(Subcommand, Debug)]
enum ScenarioCommand {
    /// List the available scenarios.
    List {
        /// Print a JSON array instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Run a scenario and write its CSV, JSON and plot files.
    Run {
        name: String,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        spectral: SpectralArgs,
        #[command(flatten)]
        delays: DelayArgs,
    },
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// JSON config file; flags override its fields.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Rabi frequency of the lower transition [Gamma].
    #[arg(long, allow_hyphen_values = true)]
    omega: Option<f64>,
    /// Anharmonicity [Gamma].
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    /// Detuning from two-photon resonance [Gamma].
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<f64>,
    /// Dipole moment ratio of the upper to the lower transition.
    #[arg(long)]
    xi: Option<f64>,
    /// full, effective, secular or secular-general.
    #[arg(long)]
    model: Option<String>,
    /// Sweep a parameter: name=start:stop:count or name=v1,v2,...
    #[arg(long = "sweep", value_name = "NAME=SPEC", value_parser = parse_sweep_flag)]
    sweeps: Vec<(String, Samples)>,
    /// Output file stem (commands) or directory (scenarios).
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps.
    #[arg(long, env = "LADDERFL_JOBS")]
    jobs: Option<usize>,
}

#[derive(Args, Debug, Clone)]
struct SpectralArgs {
    /// Frequency grid start:stop:count [Gamma].
    #[arg(long, allow_hyphen_values = true, value_parser = parse_samples_flag)]
    omega_grid: Option<Samples>,
    /// eigen-sum or fft.
    #[arg(long)]
    method: Option<String>,
    /// raw or peak.
    #[arg(long)]
    normalization: Option<String>,
}

#[derive(Args, Debug, Clone)]
struct DelayArgs {
    /// Delay grid start:stop:count [1/Gamma].
    #[arg(long, allow_hyphen_values = true, value_parser = parse_samples_flag)]
    tau_grid: Option<Samples>,
}

impl Common {
    fn overrides(&self) -> RunConfig {
        RunConfig {
            params: ParamsConfig { omega: self.omega, alpha: self.alpha, delta: self.delta, xi: self.xi },
            model: self.model.clone(),
            sweeps: self.sweeps.iter().cloned().collect(),
            output: self.out.clone(),
            ..Default::default()
        }
    }

    /// defaults ⊕ config file ⊕ flags
    fn resolve(&self, defaults: RunConfig, spectral: Option<&SpectralArgs>, delays: Option<&DelayArgs>) -> CliResult<RunConfig> {
        let mut cfg = defaults;
        if let Some(path) = &self.config {
            cfg.merge(&RunConfig::from_file(path)?);
        }
        let mut flags = self.overrides();
        if let Some(s) = spectral {
            flags.omega_grid = s.omega_grid.clone();
            flags.method = s.method.clone();
            flags.normalization = s.normalization.clone();
        }
        if let Some(d) = delays {
            flags.tau_grid = d.tau_grid.clone();
        }
        cfg.merge(&flags);
        Ok(cfg)
    }

    fn pool(&self) -> CliResult<ThreadPool> {
        let mut b = ThreadPoolBuilder::new();
        if let Some(n) = self.jobs {
            if n == 0 {
                return Err(CliError::Usage("--jobs must be at least 1".into()));
            }
            b = b.num_threads(n);
        }
        b.build().map_err(|e| CliError::Io(e.to_string()))
    }
}

/// Writes a single-command result: CSV to stdout, or stem.csv/.gp/.json.
fn emit(command: &str, cfg: &RunConfig, artifact: Artifact, results: Value, started: Instant) -> CliResult<()> {
    match &cfg.output {
        None => {
            let stdout = io::stdout();
            artifact.table.write_to(stdout.lock())
        }
        Some(stem_path) => {
            let dir = stem_path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
            let stem = stem_path
                .file_name()
                .and_then(|s| s.to_str())
                .ok_or_else(|| CliError::Usage(format!("bad output path {}", stem_path.display())))?
                .to_string();
            let artifact = Artifact { stem: stem.clone(), ..artifact };
            let mut meta = metadata(command, cfg, results, started);
            write_outputs(dir, &stem, &[artifact], &mut meta)?;
            Ok(())
        }
    }
}

fn metadata<'a>(command: &'a str, cfg: &'a RunConfig, results: Value, started: Instant) -> Metadata<'a, RunConfig> {
    Metadata {
        command,
        version: env!("CARGO_PKG_VERSION"),
        library_version: ladderfl::VERSION,
        config: cfg,
        wall_time_seconds: started.elapsed().as_secs_f64(),
        outputs: Vec::new(),
        results,
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let started = Instant::now();
    match cli.command {
        Command::Steady(common) => {
            let cfg = common.resolve(RunConfig::default(), None, None)?;
            let (a, v) = tasks::steady(&cfg, "steady", &common.pool()?)?;
            emit("steady", &cfg, a, v, started)
        }
        Command::Spectrum { common, spectral } => {
            let cfg = common.resolve(RunConfig::default(), Some(&spectral), None)?;
            let grid = cfg.omega_grid(Samples::range(-150.0, 150.0, 4096))?;
            let (a, v) = tasks::spectrum(&cfg, "spectrum", &grid, &common.pool()?)?;
            emit("spectrum", &cfg, a, v, started)
        }
        Command::G1 { common, delays } => {
            let cfg = common.resolve(RunConfig::default(), None, Some(&delays))?;
            let taus = cfg.tau_grid(Samples::range(0.0, 20.0, 2001))?;
            let (a, v) = tasks::first_order(&cfg, "g1", &taus, &common.pool()?)?;
            emit("g1", &cfg, a, v, started)
        }
        Command::G2 { common, delays } => {
            let cfg = common.resolve(RunConfig::default(), None, Some(&delays))?;
            let taus = cfg.tau_grid(Samples::range(0.0, 20.0, 2001))?;
            let (a, v) = tasks::second_order(&cfg, "g2", &taus, &common.pool()?)?;
            emit("g2", &cfg, a, v, started)
        }
        Command::G2cross { common, delays, first, second } => {
            let cfg = common.resolve(RunConfig::default(), None, Some(&delays))?;
            let taus = cfg.tau_grid(Samples::range(0.0, 10.0, 1001))?;
            let title = format!("g2({first};{second})");
            let (a, v) = tasks::dressed_pairs(&cfg, "g2cross", &title, &[(first, second)], &taus, &common.pool()?)?;
            emit("g2cross", &cfg, a, v, started)
        }
        Command::Dressed { common, json } => {
            let cfg = common.resolve(RunConfig::default(), None, None)?;
            if !cfg.sweeps.is_empty() {
                return Err(CliError::Usage("dressed takes single parameter values, not sweeps".into()));
            }
            let (a, v) = tasks::dressed_report(&cfg.base_params()?)?;
            if cfg.output.is_some() {
                return emit("dressed", &cfg, a, v, started);
            }
            let mut out = io::stdout().lock();
            if json {
                writeln!(out, "{}", serde_json::to_string_pretty(&v)?)?;
            } else {
                write!(out, "{}", dressed_text(&v))?;
            }
            Ok(())
        }
        Command::Scenario(ScenarioCommand::List { json }) => {
            let mut out = io::stdout().lock();
            if json {
                writeln!(out, "{}", serde_json::to_string_pretty(&scenarios::list_json())?)?;
            } else {
                write!(out, "{}", scenarios::list_text())?;
            }
            Ok(())
        }
        Command::Scenario(ScenarioCommand::Run { name, common, spectral, delays }) => {
            let scenario = scenarios::find(&name)?;
            let cfg = common.resolve(scenario.defaults(), Some(&spectral), Some(&delays))?;
            if cfg.scenario.as_deref() != Some(scenario.name) {
                return Err(CliError::Usage(format!(
                    "config names scenario {:?} but {name:?} was requested",
                    cfg.scenario.as_deref().unwrap_or("")
                )));
            }
            let (artifacts, results) = scenario.run(&cfg, &common.pool()?)?;
            let dir = cfg.output.clone().unwrap_or_else(|| PathBuf::from("."));
            let mut meta = metadata("scenario run", &cfg, results, started);
            let written = write_outputs(&dir, scenario.name, &artifacts, &mut meta)?;
            let mut err = io::stderr().lock();
            for path in written {
                writeln!(err, "wrote {}", path.display())?;
            }
            Ok(())
        }
    }
}

fn dressed_text(v: &Value) -> String {
    let num = |x: &Value| x.as_f64().map_or("-".to_string(), output::fmt_sig);
    let mut s = String::new();
    let e = &v["eigenfrequencies"];
    s.push_str(&format!("dressed frequencies  m={}  u={}  l={}\n", num(&e["m"]), num(&e["u"]), num(&e["l"])));
    s.push_str("spectral lines\n");
    for line in v["lines"].as_array().into_iter().flatten() {
        s.push_str(&format!("  {:>3}  {}\n", line["line"].as_str().unwrap_or("?"), num(&line["omega"])));
    }
    let join = |x: &Value| x.as_array().into_iter().flatten().map(num).collect::<Vec<_>>().join("  ");
    s.push_str(&format!("a1..a9               {}\n", join(&v["a"])));
    s.push_str(&format!("Gamma0..3            {}\n", join(&v["channel_rates"])));
    s.push_str(&format!("Gamma0..3 (Omega->inf) {}\n", join(&v["asymptotic_channel_rates"])));
    s.push_str(&format!("M eigenvalues        {}\n", join(&v["population_matrix_eigenvalues"])));
    let l = &v["asymptotic_lambdas"];
    s.push_str(&format!("lambda-, lambda+     {}  {}\n", num(&l["minus"]), num(&l["plus"])));
    s.push_str(&format!("shifted resonance    {}\n", num(&v["shifted_resonance"])));
    s
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) | Err(CliError::ClosedOutput) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ladderfl: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
