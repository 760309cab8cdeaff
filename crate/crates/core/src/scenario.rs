//! Named figure scenarios, parameter sweeps and CSV output.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::bath::{self, BathSpec, TemperatureMode};
use crate::bloch::{self, BlochVector, Channel, TwoLevelInitial};
use crate::error::{Error, Result};
use crate::linalg::c;
use crate::phase_space::{self, GridSpec};
use crate::qnd::{self, PureState, SystemSpectrum};

/// Header plus rows of numbers, written with 17 significant digits.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Self { header, rows: Vec::new() }
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.header.iter().position(|h| *h == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    pub fn write_to<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| format!("{v:.16e}")))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_to(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is ascii"))
    }

    pub fn write_file(&self, path: &Path) -> Result<()> {
        self.write_to(fs::File::create(path)?)
    }
}

/// Uniform time grid `t_min, …, t_max` with `points` samples.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeGrid {
    pub t_min: f64,
    pub t_max: f64,
    pub points: usize,
}

impl TimeGrid {
    pub fn new(t_min: f64, t_max: f64, points: usize) -> Result<Self> {
        let g = Self { t_min, t_max, points };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_min >= 0.0 && self.t_min.is_finite()) {
            return Err(Error::invalid("t_min", "must be non-negative and finite", self.t_min));
        }
        if !(self.t_max.is_finite() && self.t_max > self.t_min) {
            return Err(Error::invalid("t_max", "must be finite and greater than t_min", self.t_max));
        }
        if self.points < 2 {
            return Err(Error::invalid("points", "must be at least 2", self.points as f64));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.points - 1;
        (0..=n)
            .map(|i| {
                if i == n {
                    self.t_max
                } else {
                    self.t_min + (self.t_max - self.t_min) * i as f64 / n as f64
                }
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quantity {
    Kernels,
    Entropy,
    Bloch,
    Qfunc,
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::Kernels => "kernels",
            Quantity::Entropy => "entropy",
            Quantity::Bloch => "bloch",
            Quantity::Qfunc => "qfunc",
        }
    }
}

impl FromStr for Quantity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kernels" => Ok(Quantity::Kernels),
            "entropy" => Ok(Quantity::Entropy),
            "bloch" => Ok(Quantity::Bloch),
            "qfunc" => Ok(Quantity::Qfunc),
            _ => Err(Error::Validation(format!(
                "scenario: unknown quantity '{s}' (expected kernels, entropy, bloch or qfunc)"
            ))),
        }
    }
}

/// The system whose reduced dynamics is swept.
#[derive(Clone, Debug, PartialEq)]
pub enum SystemConfig {
    /// Two-level atom, initial Bloch angles `(θ₀, φ₀)`.
    TwoLevel { omega: f64, theta0: f64, phi0: f64 },
    /// Oscillator prepared in a coherent state; `n_max` defaults to the
    /// smallest truncation meeting the tail tolerance.
    Oscillator { omega: f64, alpha_sq: f64, n_max: Option<usize> },
    /// Arbitrary spectrum with real initial amplitudes (normalised here).
    Custom { energies: Vec<f64>, amplitudes: Vec<f64> },
}

impl SystemConfig {
    pub fn state(&self) -> Result<(SystemSpectrum, PureState)> {
        match self {
            SystemConfig::TwoLevel { omega, theta0, phi0 } => {
                let init = TwoLevelInitial::new(*theta0, *phi0)?;
                let spectrum = SystemSpectrum::two_level(*omega)?;
                let (h, p) = (0.5 * init.theta0(), init.phi0());
                let state = PureState::new(vec![c(h.cos(), 0.0), Complex64::from_polar(h.sin(), p)])?;
                Ok((spectrum, state))
            }
            SystemConfig::Oscillator { omega, alpha_sq, n_max } => {
                let state = match n_max {
                    Some(n) => qnd::coherent_state_populations(*alpha_sq, *n)?,
                    None => qnd::coherent_state(*alpha_sq)?,
                };
                let spectrum = qnd::ho_spectrum(*omega, state.dimension() - 1)?;
                Ok((spectrum, state))
            }
            SystemConfig::Custom { energies, amplitudes } => {
                if energies.len() != amplitudes.len() {
                    return Err(Error::Validation(format!(
                        "system: {} energies but {} amplitudes",
                        energies.len(),
                        amplitudes.len()
                    )));
                }
                let spectrum = SystemSpectrum::new(energies.clone())?;
                let state = PureState::normalized(amplitudes.iter().map(|&a| c(a, 0.0)).collect())?;
                Ok((spectrum, state))
            }
        }
    }
}

/// Channel used by Bloch sweeps.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BlochChannel {
    Qnd,
    /// Squeezed-bath Lindblad map with squeeze phase `Φ`; only `γ₀` and
    /// `r` are taken from the bath spec.
    Lindblad { phi: f64, temperature: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub quantity: Quantity,
    pub bath: BathSpec,
    pub system: SystemConfig,
    pub times: TimeGrid,
    pub channel: BlochChannel,
    /// Q-function grid; `None` uses the coherent-state default.
    pub q_grid: Option<GridSpec>,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        self.times.validate()?;
        match (self.quantity, &self.system) {
            (Quantity::Bloch, SystemConfig::TwoLevel { .. }) => {}
            (Quantity::Bloch, _) => {
                return Err(Error::Validation("system: bloch sweeps need a two-level system".into()));
            }
            (Quantity::Qfunc, SystemConfig::Oscillator { .. }) => {}
            (Quantity::Qfunc, _) => {
                return Err(Error::Validation("system: qfunc sweeps need an oscillator system".into()));
            }
            _ => {}
        }
        if self.bath.mode() != TemperatureMode::Exact && self.bath.a() > 0.0 && self.times.t_min <= 2.0 * self.bath.a() {
            let needs_kernel = !matches!(self.channel, BlochChannel::Lindblad { .. }) || self.quantity != Quantity::Bloch;
            if needs_kernel {
                return Err(Error::ClosedFormDomain {
                    t: self.times.t_min,
                    bound: 2.0 * self.bath.a(),
                });
            }
        }
        self.system.state()?;
        Ok(())
    }
}

/// Evaluate the configured quantity over the time grid.
pub fn run_sweep(config: &ScenarioConfig) -> Result<Table> {
    config.validate()?;
    let times = config.times.values();
    let spec = &config.bath;
    match config.quantity {
        Quantity::Kernels => kernel_table(spec, &times),
        Quantity::Entropy => {
            let (spectrum, state) = config.system.state()?;
            entropy_table(spec, &spectrum, &state, &times)
        }
        Quantity::Bloch => {
            let SystemConfig::TwoLevel { omega, theta0, phi0 } = config.system else {
                unreachable!("validated above")
            };
            let init = TwoLevelInitial::new(theta0, phi0)?;
            let rows: Result<Vec<Vec<f64>>> = times
                .par_iter()
                .map(|&t| {
                    let s = match config.channel {
                        BlochChannel::Qnd => bloch::qnd_bloch(t, init, spec, omega)?,
                        BlochChannel::Lindblad { phi, temperature } => {
                            let p = bloch::lindblad_params(spec.gamma0(), spec.r(), phi, omega, temperature)?;
                            bloch::lindblad_bloch(t, init, &p)
                        }
                    };
                    Ok(vec![t, s.sx, s.sy, s.sz])
                })
                .collect();
            Ok(Table { header: vec!["t", "sx", "sy", "sz"], rows: rows? })
        }
        Quantity::Qfunc => {
            let SystemConfig::Oscillator { alpha_sq, .. } = config.system else {
                unreachable!("validated above")
            };
            let (spectrum, state) = config.system.state()?;
            let grid = config.q_grid.clone().unwrap_or_else(|| GridSpec::for_coherent(alpha_sq));
            let rho0 = state.density();
            let blocks: Result<Vec<Vec<Vec<f64>>>> = times
                .par_iter()
                .map(|&t| {
                    let rho = qnd::evolve_density(&rho0, t, spec, &spectrum)?;
                    let q = phase_space::q_from_density(rho.matrix(), &grid)?;
                    let mut rows = Vec::with_capacity(q.values.len());
                    for (i, &x) in q.xi.iter().enumerate() {
                        for (j, &th) in q.theta.iter().enumerate() {
                            rows.push(vec![t, x, th, q.at(i, j)]);
                        }
                    }
                    Ok(rows)
                })
                .collect();
            Ok(Table {
                header: vec!["t", "xi", "theta", "q"],
                rows: blocks?.into_iter().flatten().collect(),
            })
        }
    }
}

pub fn kernel_table(spec: &BathSpec, times: &[f64]) -> Result<Table> {
    let rows: Result<Vec<Vec<f64>>> = times
        .par_iter()
        .map(|&t| {
            let k = bath::kernels(t, spec)?;
            Ok(vec![k.t, k.eta, k.eta_dot, k.gamma, k.gamma_dot])
        })
        .collect();
    Ok(Table {
        header: vec!["t", "eta", "eta_dot", "gamma", "gamma_dot"],
        rows: rows?,
    })
}

pub fn entropy_table(spec: &BathSpec, spectrum: &SystemSpectrum, state: &PureState, times: &[f64]) -> Result<Table> {
    let rows: Result<Vec<Vec<f64>>> = times
        .par_iter()
        .map(|&t| {
            let coherence = qnd::coherence_measure(state, t, spec, spectrum)?;
            Ok(vec![t, 1.0 - coherence, coherence])
        })
        .collect();
    Ok(Table { header: vec!["t", "S", "C"], rows: rows? })
}

fn cloud_table(channel: &Channel, t: f64, n_theta: usize, n_phi: usize) -> Result<Table> {
    let cloud = bloch::bloch_cloud(channel, t, n_theta, n_phi)?;
    let row = |s: BlochVector, s0: BlochVector| vec![t, s.sx, s.sy, s.sz, s0.sx, s0.sy, s0.sz];
    Ok(Table {
        header: vec!["t", "sx", "sy", "sz", "sx0", "sy0", "sz0"],
        rows: cloud.iter().map(|p| row(p.evolved, p.initial)).collect(),
    })
}

/// Ohmic bath parameters shared by the curves of one figure.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FigureBath {
    pub gamma0: f64,
    pub omega_c: f64,
    pub a: f64,
    pub mode: TemperatureMode,
    pub temperature: f64,
}

impl FigureBath {
    pub fn spec(&self, r: f64) -> Result<BathSpec> {
        BathSpec::new(self.gamma0, self.omega_c, r, self.a, self.mode, self.temperature)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FigureKind {
    /// Kernel curves, one per squeezing value.
    Kernels { bath: FigureBath, r: &'static [f64], times: (f64, f64, usize) },
    /// Linear entropy of a coherent oscillator state, one curve per squeezing value.
    Entropy {
        bath: FigureBath,
        r: &'static [f64],
        omega: f64,
        alpha_sq: f64,
        times: (f64, f64, usize),
    },
    /// QND-evolved Bloch cloud at one time.
    QndCloud { bath: FigureBath, r: f64, omega: f64, t: f64, grid: (usize, usize) },
    /// Lindblad-evolved Bloch cloud at one time.
    LindbladCloud {
        gamma0: f64,
        temperature: f64,
        r: f64,
        phi: f64,
        omega: f64,
        t: f64,
        grid: (usize, usize),
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Figure {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5b,
    Fig5c,
    Fig5d,
}

impl Figure {
    pub const ALL: [Figure; 7] = [
        Figure::Fig1,
        Figure::Fig2,
        Figure::Fig3,
        Figure::Fig4,
        Figure::Fig5b,
        Figure::Fig5c,
        Figure::Fig5d,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig1 => "fig1",
            Figure::Fig2 => "fig2",
            Figure::Fig3 => "fig3",
            Figure::Fig4 => "fig4",
            Figure::Fig5b => "fig5b",
            Figure::Fig5c => "fig5c",
            Figure::Fig5d => "fig5d",
        }
    }

    /// Caption parameters. Time ranges and cloud grids are not in the
    /// captions and are chosen to cover the visible features.
    pub fn kind(self) -> FigureKind {
        const ZERO_T: FigureBath = FigureBath {
            gamma0: 0.1,
            omega_c: 50.0,
            a: 0.0,
            mode: TemperatureMode::Zero,
            temperature: 0.0,
        };
        const HIGH_T: FigureBath = FigureBath {
            gamma0: 0.1,
            omega_c: 50.0,
            a: 0.0,
            mode: TemperatureMode::High,
            temperature: 300.0,
        };
        const CLOUD: (usize, usize) = (16, 32);
        match self {
            Figure::Fig1 => FigureKind::Kernels { bath: ZERO_T, r: &[0.0, 0.4], times: (0.0, 5.0, 501) },
            Figure::Fig2 => FigureKind::Kernels { bath: HIGH_T, r: &[0.0, 0.4], times: (0.0, 5.0, 501) },
            Figure::Fig3 => FigureKind::Entropy {
                bath: ZERO_T,
                r: &[0.0, -0.3, 0.4],
                omega: 1.0,
                alpha_sq: 5.0,
                times: (0.0, 100.0, 1001),
            },
            Figure::Fig4 => FigureKind::Entropy {
                bath: HIGH_T,
                r: &[0.0, -0.5, 2.0],
                omega: 1.0,
                alpha_sq: 5.0,
                times: (0.0, 0.5, 501),
            },
            Figure::Fig5b => FigureKind::QndCloud {
                bath: FigureBath {
                    gamma0: 0.2,
                    omega_c: 40.0,
                    a: 0.5,
                    mode: TemperatureMode::Zero,
                    temperature: 0.0,
                },
                r: 0.5,
                omega: 1.0,
                t: 20.0,
                grid: CLOUD,
            },
            Figure::Fig5c => FigureKind::LindbladCloud {
                gamma0: 0.6,
                temperature: 5.0,
                r: 0.4,
                phi: 0.0,
                omega: 1.0,
                t: 0.15,
                grid: CLOUD,
            },
            Figure::Fig5d => FigureKind::LindbladCloud {
                gamma0: 0.6,
                temperature: 5.0,
                r: 0.4,
                phi: 1.5,
                omega: 1.0,
                t: 0.15,
                grid: CLOUD,
            },
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Figure {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Figure::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| {
                Error::Validation(format!(
                    "figure: unknown name '{s}' (expected fig1, fig2, fig3, fig4, fig5b, fig5c or fig5d)"
                ))
            })
    }
}

/// One emitted curve: a file stem and its data.
#[derive(Clone, Debug, PartialEq)]
pub struct Curve {
    pub stem: String,
    /// Squeezing parameter of the curve, where the figure varies it.
    pub r: Option<f64>,
    pub table: Table,
}

fn grid_from(times: (f64, f64, usize)) -> Result<Vec<f64>> {
    Ok(TimeGrid::new(times.0, times.1, times.2)?.values())
}

/// Compute every curve of a figure, in caption order.
pub fn figure_curves(fig: Figure) -> Result<Vec<Curve>> {
    let name = fig.name();
    let curve = |r: f64, table| Curve { stem: format!("{name}_r{r}"), r: Some(r), table };
    match fig.kind() {
        FigureKind::Kernels { bath, r, times } => {
            let t = grid_from(times)?;
            r.par_iter()
                .map(|&r| Ok(curve(r, kernel_table(&bath.spec(r)?, &t)?)))
                .collect()
        }
        FigureKind::Entropy { bath, r, omega, alpha_sq, times } => {
            let t = grid_from(times)?;
            let state = qnd::coherent_state(alpha_sq)?;
            let spectrum = qnd::ho_spectrum(omega, state.dimension() - 1)?;
            r.par_iter()
                .map(|&r| Ok(curve(r, entropy_table(&bath.spec(r)?, &spectrum, &state, &t)?)))
                .collect()
        }
        FigureKind::QndCloud { bath, r, omega, t, grid } => {
            let channel = Channel::Qnd { spec: bath.spec(r)?, omega };
            Ok(vec![Curve { stem: name.into(), r: None, table: cloud_table(&channel, t, grid.0, grid.1)? }])
        }
        FigureKind::LindbladCloud { gamma0, temperature, r, phi, omega, t, grid } => {
            let channel = Channel::Lindblad(bloch::lindblad_params(gamma0, r, phi, omega, temperature)?);
            Ok(vec![Curve { stem: name.into(), r: None, table: cloud_table(&channel, t, grid.0, grid.1)? }])
        }
    }
}

/// Write every curve of a figure as `<dir>/<stem>.csv`.
pub fn run_figure(fig: Figure, dir: &Path) -> Result<Vec<PathBuf>> {
    let curves = figure_curves(fig)?;
    fs::create_dir_all(dir)?;
    let mut paths = Vec::with_capacity(curves.len());
    for c in curves {
        let path = dir.join(format!("{}.csv", c.stem));
        c.table.write_file(&path)?;
        paths.push(path);
    }
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig1_bath() -> BathSpec {
        BathSpec::zero_temperature(0.1, 50.0, 0.0, 0.0).unwrap()
    }

    #[test]
    fn figure_parameters_match_captions() {
        let FigureKind::Kernels { bath, r, .. } = Figure::Fig1.kind() else { panic!() };
        assert_eq!((bath.gamma0, bath.omega_c, bath.a, bath.temperature), (0.1, 50.0, 0.0, 0.0));
        assert_eq!(bath.mode, TemperatureMode::Zero);
        assert_eq!(r, &[0.0, 0.4]);

        let FigureKind::Kernels { bath, r, .. } = Figure::Fig2.kind() else { panic!() };
        assert_eq!((bath.gamma0, bath.omega_c, bath.a, bath.temperature), (0.1, 50.0, 0.0, 300.0));
        assert_eq!(bath.mode, TemperatureMode::High);
        assert_eq!(r, &[0.0, 0.4]);

        let FigureKind::Entropy { bath, r, omega, alpha_sq, .. } = Figure::Fig3.kind() else { panic!() };
        assert_eq!((bath.gamma0, bath.omega_c, bath.a, bath.temperature), (0.1, 50.0, 0.0, 0.0));
        assert_eq!((omega, alpha_sq), (1.0, 5.0));
        assert_eq!(r, &[0.0, -0.3, 0.4]);

        let FigureKind::Entropy { bath, r, omega, alpha_sq, .. } = Figure::Fig4.kind() else { panic!() };
        assert_eq!((bath.gamma0, bath.omega_c, bath.a, bath.temperature), (0.1, 50.0, 0.0, 300.0));
        assert_eq!(bath.mode, TemperatureMode::High);
        assert_eq!((omega, alpha_sq), (1.0, 5.0));
        assert_eq!(r, &[0.0, -0.5, 2.0]);

        let FigureKind::QndCloud { bath, r, omega, t, .. } = Figure::Fig5b.kind() else { panic!() };
        assert_eq!((bath.gamma0, bath.omega_c, bath.a, bath.temperature), (0.2, 40.0, 0.5, 0.0));
        assert_eq!((r, omega, t), (0.5, 1.0, 20.0));

        for (fig, phi) in [(Figure::Fig5c, 0.0), (Figure::Fig5d, 1.5)] {
            let FigureKind::LindbladCloud { gamma0, temperature, r, phi: p, omega, t, .. } = fig.kind() else {
                panic!()
            };
            assert_eq!((gamma0, temperature, r, p, omega, t), (0.6, 5.0, 0.4, phi, 1.0, 0.15));
        }
    }

    #[test]
    fn figure_names_round_trip() {
        for f in Figure::ALL {
            assert_eq!(f.name().parse::<Figure>().unwrap(), f);
        }
        assert!("fig5a".parse::<Figure>().is_err());
    }

    #[test]
    fn kernel_sweep_shape() {
        let cfg = ScenarioConfig {
            quantity: Quantity::Kernels,
            bath: fig1_bath(),
            system: SystemConfig::TwoLevel { omega: 1.0, theta0: 0.0, phi0: 0.0 },
            times: TimeGrid::new(0.0, 1.0, 3).unwrap(),
            channel: BlochChannel::Qnd,
            q_grid: None,
        };
        let table = run_sweep(&cfg).unwrap();
        assert_eq!(table.rows.len(), 3);
        assert!(table.rows.iter().all(|r| r.len() == 5));
        let csv = table.to_csv_string().unwrap();
        assert!(csv.starts_with("t,eta,eta_dot,gamma,gamma_dot\n"));
        assert!(csv.lines().nth(1).unwrap().starts_with("0.0000000000000000e0,"));
    }

    #[test]
    fn entropy_starts_at_zero() {
        let cfg = ScenarioConfig {
            quantity: Quantity::Entropy,
            bath: fig1_bath(),
            system: SystemConfig::Oscillator { omega: 1.0, alpha_sq: 5.0, n_max: None },
            times: TimeGrid::new(0.0, 1.0, 2).unwrap(),
            channel: BlochChannel::Qnd,
            q_grid: None,
        };
        let table = run_sweep(&cfg).unwrap();
        assert!(table.rows[0][1].abs() < 1e-12);
        assert!(table.rows[1][1] > 0.0);
    }

    #[test]
    fn north_pole_is_stationary() {
        let cfg = ScenarioConfig {
            quantity: Quantity::Bloch,
            bath: fig1_bath(),
            system: SystemConfig::TwoLevel { omega: 1.0, theta0: 0.0, phi0: 0.0 },
            times: TimeGrid::new(0.0, 10.0, 5).unwrap(),
            channel: BlochChannel::Qnd,
            q_grid: None,
        };
        for row in run_sweep(&cfg).unwrap().rows {
            assert_eq!(&row[1..], &[0.0, 0.0, 1.0]);
        }
    }

    #[test]
    fn mismatched_system_is_rejected() {
        let cfg = ScenarioConfig {
            quantity: Quantity::Qfunc,
            bath: fig1_bath(),
            system: SystemConfig::TwoLevel { omega: 1.0, theta0: 0.0, phi0: 0.0 },
            times: TimeGrid::new(0.0, 1.0, 2).unwrap(),
            channel: BlochChannel::Qnd,
            q_grid: None,
        };
        assert!(matches!(run_sweep(&cfg), Err(Error::Validation(_))));
        assert!(TimeGrid::new(1.0, 1.0, 4).is_err());
        assert!(TimeGrid::new(0.0, 1.0, 1).is_err());
    }

    #[test]
    fn time_grid_hits_endpoints() {
        let v = TimeGrid::new(0.0, 100.0, 1001).unwrap().values();
        assert_eq!((v[0], v[1000]), (0.0, 100.0));
        assert!(v.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn qfunc_rows_carry_time() {
        let cfg = ScenarioConfig {
            quantity: Quantity::Qfunc,
            bath: fig1_bath(),
            system: SystemConfig::Oscillator { omega: 1.0, alpha_sq: 1.0, n_max: Some(25) },
            times: TimeGrid::new(0.0, 1.0, 2).unwrap(),
            channel: BlochChannel::Qnd,
            q_grid: Some(GridSpec { xi_max: 6.0, n_xi: 8, n_theta: 8 }),
        };
        let table = run_sweep(&cfg).unwrap();
        assert_eq!(table.header, vec!["t", "xi", "theta", "q"]);
        assert_eq!(table.rows.len(), 128);
        assert_eq!(table.rows[64][0], 1.0);
    }
}
