mod config;

use std::fmt::Display;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use config::ConfigFile;
use qnd_lab::bath::{BathSpec, TemperatureMode};
use qnd_lab::phase_space::GridSpec;
use qnd_lab::scenario::{self, BlochChannel, Figure, Quantity, ScenarioConfig, SystemConfig, Table, TimeGrid};
use qnd_lab::verify::{self, Fault, Level, Options};

const EXIT_VALIDATION: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;
const EXIT_VERIFICATION: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "qnd-lab", version, about = "QND decoherence in a squeezed thermal bath")]
struct Cli {
    /// Worker threads for parallel evaluation (default: all cores).
    #[arg(long, env = "QND_LAB_THREADS", global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Kernel table: t,eta,eta_dot,gamma,gamma_dot.
    Kernels(Params),
    /// Linear entropy and coherence: t,S,C.
    Entropy(Params),
    /// Two-level Bloch trajectory: t,sx,sy,sz.
    Bloch(Params),
    /// Husimi Q function snapshots: t,xi,theta,q.
    Qfunc(Params),
    /// Write the CSV curves of one reference figure into a directory.
    Figure {
        /// fig1, fig2, fig3, fig4, fig5b, fig5c or fig5d.
        name: String,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Run the acceptance criteria.
    Verify {
        /// quick or full (denser grids, more sample points).
        #[arg(long, default_value = "quick")]
        level: String,
        /// Deliberate defect to check the suite catches it (flip-gamma-dot-sign).
        #[arg(long)]
        inject_fault: Option<String>,
        /// Also write a machine-readable CSV report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Sweep parameters. Every flag may also be set in the `--config` file.
#[derive(Args, Debug, Default)]
struct Params {
    /// INI-style file of defaults; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Coupling strength (default 0.1).
    #[arg(long)]
    gamma0: Option<f64>,
    /// Ohmic cutoff frequency (default 50).
    #[arg(long = "omega-c")]
    omega_c: Option<f64>,
    /// Squeezing parameter (default 0).
    #[arg(long, allow_negative_numbers = true)]
    r: Option<f64>,
    /// Squeeze phase slope, Phi(omega) = a omega; closed forms need t > 2a (default 0).
    #[arg(long)]
    a: Option<f64>,
    /// zero, high or exact.
    #[arg(long = "temp-mode")]
    temp_mode: Option<String>,
    /// Bath temperature, required for high and exact modes.
    #[arg(long = "T")]
    temperature: Option<f64>,
    /// System frequency (default 1).
    #[arg(long)]
    omega: Option<f64>,
    /// Mean photon number of the initial coherent state (default 5).
    #[arg(long = "alpha-sq")]
    alpha_sq: Option<f64>,
    /// Fock truncation (default: chosen from alpha-sq).
    #[arg(long = "n-max")]
    n_max: Option<usize>,
    /// First time point (default 0).
    #[arg(long = "t-min")]
    t_min: Option<f64>,
    /// Last time point (default 5, or 20 for bloch).
    #[arg(long = "t-max")]
    t_max: Option<f64>,
    /// Number of time points (default 101).
    #[arg(long)]
    points: Option<usize>,
    /// Output CSV path (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    /// System for entropy sweeps: oscillator, two-level or custom.
    #[arg(long)]
    system: Option<String>,
    /// Comma-separated energies of a custom spectrum.
    #[arg(long, allow_hyphen_values = true)]
    energies: Option<String>,
    /// Comma-separated real initial amplitudes of a custom spectrum.
    #[arg(long, allow_hyphen_values = true)]
    amplitudes: Option<String>,
    /// Initial polar angle of the two-level state.
    #[arg(long)]
    theta0: Option<f64>,
    /// Initial azimuth of the two-level state.
    #[arg(long)]
    phi0: Option<f64>,
    /// Bloch channel: qnd or lindblad.
    #[arg(long)]
    channel: Option<String>,
    /// Squeeze phase of the Lindblad channel.
    #[arg(long, allow_negative_numbers = true)]
    phi: Option<f64>,
    /// Radial extent of the Q grid (default |alpha| + 6).
    #[arg(long = "xi-max")]
    xi_max: Option<f64>,
    /// Radial Q grid points (default 64).
    #[arg(long = "n-xi")]
    n_xi: Option<usize>,
    /// Angular Q grid points (default 64).
    #[arg(long = "n-theta")]
    n_theta: Option<usize>,
}

const KNOWN_KEYS: &[&str] = &[
    "gamma0", "omega_c", "r", "a", "temp_mode", "t", "omega", "alpha_sq", "n_max", "t_min", "t_max", "points", "out",
    "system", "energies", "amplitudes", "theta0", "phi0", "channel", "phi", "xi_max", "n_xi", "n_theta",
];

#[derive(Debug)]
enum Failure {
    Validation(String),
    Numerical(String),
    Verification(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Validation(_) => EXIT_VALIDATION,
            Failure::Numerical(_) => EXIT_NUMERICAL,
            Failure::Verification(_) => EXIT_VERIFICATION,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Validation(m) | Failure::Numerical(m) | Failure::Verification(m) => m,
        }
    }
}

impl From<qnd_lab::Error> for Failure {
    fn from(e: qnd_lab::Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Validation(e.to_string())
        }
    }
}

type CliResult<T> = Result<T, Failure>;

/// Flag values with the config file underneath.
struct Resolved<'a> {
    params: &'a Params,
    file: ConfigFile,
}

impl<'a> Resolved<'a> {
    fn new(params: &'a Params) -> CliResult<Self> {
        let file = match &params.config {
            Some(p) => ConfigFile::load(p).map_err(Failure::Validation)?,
            None => ConfigFile::default(),
        };
        if let Some(k) = file.keys().find(|k| !KNOWN_KEYS.contains(k)) {
            return Err(Failure::Validation(format!("config: unknown key '{k}'")));
        }
        Ok(Self { params, file })
    }

    fn pick<T>(&self, flag: Option<T>, key: &str) -> CliResult<Option<T>>
    where
        T: FromStr,
        T::Err: Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.file.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|e| Failure::Validation(format!("config: {key} = '{v}': {e}"))),
        }
    }

    fn or<T>(&self, flag: Option<T>, key: &str, default: T) -> CliResult<T>
    where
        T: FromStr,
        T::Err: Display,
    {
        Ok(self.pick(flag, key)?.unwrap_or(default))
    }

    fn list(&self, flag: &Option<String>, key: &str) -> CliResult<Option<Vec<f64>>> {
        let Some(raw) = self.pick(flag.clone(), key)? else {
            return Ok(None);
        };
        raw.split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Failure::Validation(format!("{key}: '{s}': {e}")))
            })
            .collect::<CliResult<Vec<f64>>>()
            .map(Some)
    }

    fn bath(&self) -> CliResult<BathSpec> {
        let p = self.params;
        let mode: TemperatureMode = self
            .or(p.temp_mode.clone(), "temp_mode", "zero".to_string())?
            .parse()?;
        let temperature = self.pick(p.temperature, "t")?;
        let temperature = match (mode, temperature) {
            (TemperatureMode::Zero, _) => 0.0,
            (_, Some(t)) => t,
            (_, None) => {
                return Err(Failure::Validation(format!(
                    "T: required for --temp-mode {}",
                    mode.name()
                )))
            }
        };
        let spec = BathSpec::new(
            self.or(p.gamma0, "gamma0", 0.1)?,
            self.or(p.omega_c, "omega_c", 50.0)?,
            self.or(p.r, "r", 0.0)?,
            self.or(p.a, "a", 0.0)?,
            mode,
            temperature,
        )?;
        if let Some(w) = spec.high_temperature_warning() {
            eprintln!("warning: {w}");
        }
        Ok(spec)
    }

    fn times(&self, default_max: f64) -> CliResult<TimeGrid> {
        let p = self.params;
        Ok(TimeGrid::new(
            self.or(p.t_min, "t_min", 0.0)?,
            self.or(p.t_max, "t_max", default_max)?,
            self.or(p.points, "points", 101)?,
        )?)
    }

    fn two_level(&self) -> CliResult<SystemConfig> {
        let p = self.params;
        Ok(SystemConfig::TwoLevel {
            omega: self.or(p.omega, "omega", 1.0)?,
            theta0: self.or(p.theta0, "theta0", std::f64::consts::FRAC_PI_2)?,
            phi0: self.or(p.phi0, "phi0", 0.0)?,
        })
    }

    fn oscillator(&self) -> CliResult<SystemConfig> {
        let p = self.params;
        Ok(SystemConfig::Oscillator {
            omega: self.or(p.omega, "omega", 1.0)?,
            alpha_sq: self.or(p.alpha_sq, "alpha_sq", 5.0)?,
            n_max: self.pick(p.n_max, "n_max")?,
        })
    }

    fn system(&self) -> CliResult<SystemConfig> {
        let p = self.params;
        let energies = self.list(&p.energies, "energies")?;
        let default = if energies.is_some() { "custom" } else { "oscillator" };
        match self.or(p.system.clone(), "system", default.to_string())?.as_str() {
            "oscillator" => self.oscillator(),
            "two-level" => self.two_level(),
            "custom" => {
                let energies = energies.ok_or_else(|| Failure::Validation("energies: required for a custom system".into()))?;
                let amplitudes = self
                    .list(&p.amplitudes, "amplitudes")?
                    .unwrap_or_else(|| vec![1.0; energies.len()]);
                Ok(SystemConfig::Custom { energies, amplitudes })
            }
            other => Err(Failure::Validation(format!(
                "system: unknown '{other}' (expected oscillator, two-level or custom)"
            ))),
        }
    }

    fn channel(&self) -> CliResult<BlochChannel> {
        let p = self.params;
        match self.or(p.channel.clone(), "channel", "qnd".to_string())?.as_str() {
            "qnd" => Ok(BlochChannel::Qnd),
            "lindblad" => Ok(BlochChannel::Lindblad {
                phi: self.or(p.phi, "phi", 0.0)?,
                temperature: self.or(p.temperature, "t", 0.0)?,
            }),
            other => Err(Failure::Validation(format!("channel: unknown '{other}' (expected qnd or lindblad)"))),
        }
    }

    fn q_grid(&self) -> CliResult<Option<GridSpec>> {
        let p = self.params;
        let (xi_max, n_xi, n_theta) = (
            self.pick(p.xi_max, "xi_max")?,
            self.pick(p.n_xi, "n_xi")?,
            self.pick(p.n_theta, "n_theta")?,
        );
        if xi_max.is_none() && n_xi.is_none() && n_theta.is_none() {
            return Ok(None);
        }
        let alpha_sq = self.or(p.alpha_sq, "alpha_sq", 5.0)?;
        let base = GridSpec::for_coherent(alpha_sq);
        Ok(Some(GridSpec {
            xi_max: xi_max.unwrap_or(base.xi_max),
            n_xi: n_xi.unwrap_or(base.n_xi),
            n_theta: n_theta.unwrap_or(base.n_theta),
        }))
    }

    fn out(&self) -> CliResult<Option<PathBuf>> {
        self.pick(self.params.out.clone(), "out")
    }
}

fn sweep(quantity: Quantity, params: &Params) -> CliResult<()> {
    let r = Resolved::new(params)?;
    let (system, default_max) = match quantity {
        Quantity::Kernels => (r.two_level()?, 5.0),
        Quantity::Entropy => (r.system()?, 5.0),
        Quantity::Bloch => (r.two_level()?, 20.0),
        Quantity::Qfunc => (r.oscillator()?, 5.0),
    };
    let config = ScenarioConfig {
        quantity,
        bath: r.bath()?,
        system,
        times: r.times(default_max)?,
        channel: r.channel()?,
        q_grid: r.q_grid()?,
    };
    let table = scenario::run_sweep(&config)?;
    emit(&table, r.out()?.as_deref())
}

fn emit(table: &Table, out: Option<&Path>) -> CliResult<()> {
    match out {
        Some(path) => table
            .write_file(path)
            .map_err(|e| Failure::Validation(format!("out {}: {e}", path.display()))),
        None => {
            let stdout = io::stdout();
            table.write_to(stdout.lock())?;
            Ok(())
        }
    }
}

fn figure(name: &str, out: &Path) -> CliResult<()> {
    let fig: Figure = name.parse()?;
    let paths = scenario::run_figure(fig, out).map_err(|e| match e {
        qnd_lab::Error::Io(io) => Failure::Validation(format!("out {}: {io}", out.display())),
        other => other.into(),
    })?;
    for p in paths {
        println!("{}", p.display());
    }
    Ok(())
}

fn run_verify(level: &str, fault: Option<&str>, out: Option<&Path>) -> CliResult<()> {
    let options = Options {
        level: level.parse::<Level>()?,
        fault: fault.map(Fault::from_str).transpose()?,
    };
    let report = verify::run_verify(options);
    let mut stdout = io::stdout().lock();
    for r in &report.results {
        let _ = writeln!(stdout, "{}", r.line());
    }
    if let Some(path) = out {
        std::fs::write(path, report.to_csv()?)
            .map_err(|e| Failure::Validation(format!("out {}: {e}", path.display())))?;
    }
    let failed = report.failed_ids();
    if failed.is_empty() {
        return Ok(());
    }
    let names: Vec<String> = report
        .results
        .iter()
        .filter(|r| !r.pass())
        .map(|r| format!("{} ({})", r.id, r.name))
        .collect();
    Err(Failure::Verification(format!("failed criteria: {}", names.join(", "))))
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Failure::Validation("threads: QND_LAB_THREADS must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Validation(format!("threads: {e}")))?;
    }
    match &cli.command {
        Command::Kernels(p) => sweep(Quantity::Kernels, p),
        Command::Entropy(p) => sweep(Quantity::Entropy, p),
        Command::Bloch(p) => sweep(Quantity::Bloch, p),
        Command::Qfunc(p) => sweep(Quantity::Qfunc, p),
        Command::Figure { name, out } => figure(name, out),
        Command::Verify { level, inject_fault, out } => run_verify(level, inject_fault.as_deref(), out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_VALIDATION } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
