//! The acceptance suite: each criterion runs independent oracles against
//! the closed forms and reports measured values next to their tolerances.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

use crate::bath::{self, BathSpec, Occupation, TemperatureMode};
use crate::bloch::{self, BlochVector, Channel, TwoLevelInitial};
use crate::composite::{self, CompositeOptions, CompositeScenario, DiscreteBathSpec, DiscreteMode};
use crate::error::{Error, Result};
use crate::linalg::{self, c};
use crate::oracle;
use crate::phase_space::{self, DiffusionSolutionParams, GridSpec, QGrid};
use crate::qnd::{self, DensityMatrix, PureState, SystemSpectrum};
use crate::scenario::{self, Figure};
use crate::spin_bath::{self, SpinBathSpec, SpinBathState, SpinMode};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level {
    Quick,
    Full,
}

impl Level {
    pub fn name(self) -> &'static str {
        match self {
            Level::Quick => "quick",
            Level::Full => "full",
        }
    }
}

impl FromStr for Level {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quick" => Ok(Level::Quick),
            "full" => Ok(Level::Full),
            _ => Err(Error::Validation(format!("level: expected quick or full, got '{s}'"))),
        }
    }
}

/// Deliberate defects used to check that the suite notices them.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    /// Add the `sinh 2r` part of the zero-temperature `dγ/dt` instead of
    /// subtracting it.
    FlipGammaDotSqueezeSign,
}

impl FromStr for Fault {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "flip-gamma-dot-sign" => Ok(Fault::FlipGammaDotSqueezeSign),
            _ => Err(Error::Validation(format!(
                "fault: unknown name '{s}' (expected flip-gamma-dot-sign)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Options {
    pub level: Level,
    pub fault: Option<Fault>,
}

impl Options {
    pub fn new(level: Level) -> Self {
        Self { level, fault: None }
    }

    fn full(&self) -> bool {
        self.level == Level::Full
    }
}

/// One measured quantity against its tolerance.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub label: String,
    pub measured: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    /// Passes when `measured ≤ tolerance`.
    pub fn at_most(label: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Self { label: label.into(), measured, tolerance, pass: measured <= tolerance }
    }

    /// Passes when `measured ≥ tolerance`.
    pub fn at_least(label: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Self { label: label.into(), measured, tolerance, pass: measured >= tolerance }
    }

    /// Passes when `measured < bound`.
    pub fn below(label: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self { label: label.into(), measured, tolerance: bound, pass: measured < bound }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub checks: Vec<Check>,
    pub note: String,
}

impl CriterionResult {
    pub fn pass(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.pass)
    }

    /// `criterion N PASS|FAIL name: label = measured (tol …); …`.
    pub fn line(&self) -> String {
        let status = if self.pass() { "PASS" } else { "FAIL" };
        let checks: Vec<String> = self
            .checks
            .iter()
            .map(|c| {
                format!(
                    "{} = {:.3e} (tol {:.1e}{})",
                    c.label,
                    c.measured,
                    c.tolerance,
                    if c.pass { "" } else { ", failed" }
                )
            })
            .collect();
        let mut s = format!("criterion {:>2} {status} {}: {}", self.id, self.name, checks.join("; "));
        if !self.note.is_empty() {
            s.push_str(&format!(" [{}]", self.note));
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub options: Options,
    pub results: Vec<CriterionResult>,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| r.pass())
    }

    pub fn failed_ids(&self) -> Vec<u8> {
        self.results.iter().filter(|r| !r.pass()).map(|r| r.id).collect()
    }

    /// One row per check: `criterion,name,check,measured,tolerance,pass`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["criterion", "name", "check", "measured", "tolerance", "pass"])?;
        for r in &self.results {
            for ch in &r.checks {
                w.write_record([
                    r.id.to_string(),
                    r.name.to_string(),
                    ch.label.clone(),
                    format!("{:.16e}", ch.measured),
                    format!("{:.16e}", ch.tolerance),
                    ch.pass.to_string(),
                ])?;
            }
        }
        Ok(String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("ascii"))
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.results {
            writeln!(f, "{}", r.line())?;
        }
        Ok(())
    }
}

pub const CRITERIA: [(u8, &str); 10] = [
    (1, "kernel closed form vs quadrature"),
    (2, "thermal-limit regression"),
    (3, "long-time asymptotes"),
    (4, "exact composite oracle"),
    (5, "ODE oracles"),
    (6, "regime discrimination"),
    (7, "channel geometry"),
    (8, "figure reproduction"),
    (9, "Q-function suite"),
    (10, "spin bath"),
];

/// Run every criterion; criteria run in parallel, results keep id order.
pub fn run_verify(options: Options) -> Report {
    let results = CRITERIA
        .par_iter()
        .map(|&(id, _)| run_criterion(id, options))
        .collect();
    Report { options, results }
}

pub fn run_criterion(id: u8, options: Options) -> CriterionResult {
    let name = CRITERIA
        .iter()
        .find(|(i, _)| *i == id)
        .map(|(_, n)| *n)
        .unwrap_or("unknown criterion");
    let outcome = match id {
        1 => kernel_vs_quadrature(options),
        2 => thermal_regression(options),
        3 => asymptotes(options),
        4 => composite_oracle(options),
        5 => ode_oracles(options),
        6 => regime_discrimination(options),
        7 => channel_geometry(options),
        8 => figure_reproduction(options),
        9 => q_function_suite(options),
        10 => spin_bath_suite(options),
        _ => Err(Error::Validation(format!("no criterion {id}"))),
    };
    match outcome {
        Ok((checks, note)) => CriterionResult { id, name, checks, note },
        Err(e) => CriterionResult {
            id,
            name,
            checks: vec![Check::at_most("error", f64::NAN, 0.0)],
            note: e.to_string(),
        },
    }
}

type Outcome = Result<(Vec<Check>, String)>;

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |m, v| if v.is_nan() || m.is_nan() { f64::NAN } else { m.max(v) })
}

fn rel(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a.abs()
    } else {
        (a - b).abs() / b.abs()
    }
}

/// Closed-form `dγ/dt`, with the optional injected defect.
fn gamma_dot_closed(t: f64, spec: &BathSpec, fault: Option<Fault>) -> Result<f64> {
    let parts = bath::gamma_dot_parts(t, spec)?;
    Ok(match fault {
        Some(Fault::FlipGammaDotSqueezeSign) if spec.mode() == TemperatureMode::Zero => parts.thermal + parts.squeeze,
        _ => parts.value(),
    })
}

struct KernelGrid {
    gamma0: Vec<f64>,
    omega_c: Vec<f64>,
    r: Vec<f64>,
    a: Vec<f64>,
    n_t: usize,
}

impl KernelGrid {
    fn for_level(o: Options) -> Self {
        if o.full() {
            Self {
                gamma0: vec![0.1, 1.0],
                omega_c: vec![10.0, 50.0],
                r: vec![-0.4, 0.0, 0.4],
                a: vec![0.0, 0.01],
                n_t: 20,
            }
        } else {
            Self {
                gamma0: vec![0.1],
                omega_c: vec![50.0],
                r: vec![-0.4, 0.0, 0.4],
                a: vec![0.0, 0.01],
                n_t: 5,
            }
        }
    }

    fn points(&self) -> Vec<(f64, f64, f64, f64, f64)> {
        let mut out = Vec::new();
        for &g in &self.gamma0 {
            for &wc in &self.omega_c {
                for &r in &self.r {
                    for &a in &self.a {
                        for t in oracle::log_space(2.0 * a + 1e-3, 5.0, self.n_t) {
                            out.push((g, wc, r, a, t));
                        }
                    }
                }
            }
        }
        out
    }
}

const HIGH_T: f64 = 300.0;

fn kernel_vs_quadrature(o: Options) -> Outcome {
    let grid = KernelGrid::for_level(o);
    let tol = bath::DEFAULT_TOLERANCE;
    let errors: Result<Vec<[f64; 4]>> = grid
        .points()
        .par_iter()
        .map(|&(g, wc, r, a, t)| {
            let zero = BathSpec::zero_temperature(g, wc, r, a)?;
            let high = BathSpec::high_temperature(g, wc, r, a, HIGH_T)?;
            let classical = Occupation::Classical { temperature: HIGH_T };
            Ok([
                rel(bath::gamma(t, &zero)?, bath::gamma_quadrature(t, &zero, Occupation::Vacuum, tol)?.value),
                rel(
                    gamma_dot_closed(t, &zero, o.fault)?,
                    bath::gamma_dot_quadrature(t, &zero, Occupation::Vacuum, tol)?.value,
                ),
                rel(bath::gamma(t, &high)?, bath::gamma_quadrature(t, &high, classical, tol)?.value),
                rel(
                    gamma_dot_closed(t, &high, o.fault)?,
                    bath::gamma_dot_quadrature(t, &high, classical, tol)?.value,
                ),
            ])
        })
        .collect();
    let errors = errors?;
    let col = |k: usize| max_of(errors.iter().map(|e| e[k]));
    Ok((
        vec![
            Check::at_most("zero-T gamma rel err", col(0), 1e-6),
            Check::at_most("zero-T gamma_dot rel err", col(1), 1e-6),
            Check::at_most("high-T gamma rel err", col(2), 1e-6),
            Check::at_most("high-T gamma_dot rel err", col(3), 1e-6),
        ],
        format!("{} grid points", errors.len()),
    ))
}

fn thermal_regression(o: Options) -> Outcome {
    let grid = KernelGrid::for_level(o);
    let mut pts = grid.points();
    pts.retain(|p| p.2 == 0.0 && p.3 == 0.0);
    let errors: Result<Vec<[f64; 3]>> = pts
        .par_iter()
        .map(|&(g, wc, _, _, t)| {
            let zero = BathSpec::zero_temperature(g, wc, 0.0, 0.0)?;
            let high = BathSpec::high_temperature(g, wc, 0.0, 0.0, HIGH_T)?;
            let x = wc * t;
            let log_form = g / (2.0 * PI) * (1.0 + x * x).ln();
            let high_form = g * HIGH_T / (PI * wc) * (2.0 * x * x.atan() + (1.0 / (1.0 + x * x)).ln());
            let rate_form = 2.0 * g * HIGH_T / PI * x.atan();
            Ok([
                rel(bath::gamma(t, &zero)?, log_form),
                rel(bath::gamma(t, &high)?, high_form),
                rel(gamma_dot_closed(t, &high, o.fault)?, rate_form),
            ])
        })
        .collect();
    let errors = errors?;
    let col = |k: usize| max_of(errors.iter().map(|e| e[k]));
    Ok((
        vec![
            Check::at_most("zero-T gamma vs log form", col(0), 1e-12),
            Check::at_most("high-T gamma vs thermal form", col(1), 1e-12),
            Check::at_most("high-T gamma_dot vs arctan form", col(2), 1e-12),
        ],
        String::new(),
    ))
}

fn asymptotes(o: Options) -> Outcome {
    let (g, wc) = (0.1, 50.0);
    let t = 1e3 / wc;
    let mut zero_err: f64 = 0.0;
    let mut high_err: f64 = 0.0;
    let mut ratios = Vec::new();
    for r in [-0.4, 0.0, 0.4] {
        let zero = BathSpec::zero_temperature(g, wc, r, 0.0)?;
        let ratio = gamma_dot_closed(t, &zero, o.fault)? * PI * t / (g * (2.0 * r).cosh());
        ratios.push(format!("r={r}: {ratio:.4}"));
        zero_err = zero_err.max((ratio - 1.0).abs());
        let high = BathSpec::high_temperature(g, wc, r, 0.0, HIGH_T)?;
        let limit = 2.0 * g * HIGH_T * (2.0 * r).cosh() / PI * (PI / 2.0);
        high_err = high_err.max(rel(gamma_dot_closed(t, &high, o.fault)?, limit));
    }
    Ok((
        vec![
            Check::at_most("zero-T |gamma_dot pi t/(g0 cosh 2r) - 1|", zero_err, 1e-2),
            Check::at_most("high-T gamma_dot vs g0 T cosh 2r", high_err, 1e-3),
        ],
        format!("zero-T ratios at omega_c t = 1e3: {}", ratios.join(", ")),
    ))
}

fn qubit_state() -> Result<DensityMatrix> {
    Ok(PureState::normalized(vec![c(0.8, 0.0), c(0.3, 0.5)])?.density())
}

fn composite_oracle(o: Options) -> Outcome {
    let omega = 1.0;
    let spectrum = SystemSpectrum::two_level(omega)?;
    let n_t = if o.full() { 25 } else { 9 };
    let times: Vec<f64> = (0..n_t).map(|i| 4.0 * PI / omega * i as f64 / (n_t - 1) as f64).collect();
    let single = CompositeScenario {
        rho0: qubit_state()?,
        spectrum: spectrum.clone(),
        bath: DiscreteBathSpec::new(vec![DiscreteMode { omega: 1.3, g: 0.4, r: 0.0, phi: 0.0 }], 0.5, 30)?,
        times: times.clone(),
        options: CompositeOptions::default(),
    };
    let squeezed_times = if o.full() { times.iter().step_by(3).copied().collect() } else { vec![0.0, 2.5, 4.0 * PI] };
    let pair = CompositeScenario {
        rho0: qubit_state()?,
        spectrum,
        bath: DiscreteBathSpec::new(
            vec![
                DiscreteMode { omega: 1.0, g: 0.3, r: 0.3, phi: 0.2 },
                DiscreteMode { omega: 1.7, g: 0.25, r: 0.3, phi: 0.9 },
            ],
            0.5,
            25,
        )?,
        times: squeezed_times,
        options: CompositeOptions::default(),
    };
    let (a, b) = rayon::join(
        || composite::verify_against_analytic(&single),
        || composite::verify_against_analytic(&pair),
    );
    for rep in [&a, &b] {
        if let Some(f) = &rep.failure {
            return Err(Error::Validation(f.clone()));
        }
    }
    Ok((
        vec![
            Check::at_most("K=1 thermal max deviation", a.max_deviation, 1e-8),
            Check::at_most("K=2 squeezed max deviation", b.max_deviation, 1e-4),
            Check::at_most("diagonal drift", a.diagonal_drift.max(b.diagonal_drift), 1e-10),
        ],
        format!("K=2 truncation defects {:.1e}", max_of(b.truncation_defects.iter().copied())),
    ))
}

fn ode_oracles(o: Options) -> Outcome {
    let spectrum = qnd::ho_spectrum(1.0, 3)?;
    let state = PureState::normalized(vec![c(0.5, 0.0), c(0.4, 0.3), c(0.2, -0.5), c(0.6, 0.1)])?;
    let rho0 = state.density().into_matrix();
    let specs = [
        BathSpec::zero_temperature(0.1, 50.0, 0.0, 0.0)?,
        BathSpec::zero_temperature(0.1, 50.0, 0.4, 0.0)?,
        BathSpec::high_temperature(0.1, 50.0, 0.4, 0.0, HIGH_T)?,
    ];
    let (t_end, h): (f64, f64) = (if o.full() { 2.0 } else { 1.0 }, 2.5e-4);
    let steps = (t_end / h).round() as usize;
    let every = steps / 10;
    let master: Result<Vec<f64>> = specs
        .par_iter()
        .map(|spec| {
            let traj = oracle::rk4_trajectory(&rho0, 0.0, h, steps, |t, rho| {
                let eta_dot = bath::eta_dot(t, spec)?;
                let gamma_dot = if t == 0.0 { 0.0 } else { gamma_dot_closed(t, spec, o.fault)? };
                Ok(qnd::master_rhs_with(rho, &spectrum, eta_dot, gamma_dot))
            })?;
            let mut worst: f64 = 0.0;
            for k in (0..=steps).step_by(every) {
                let t = k as f64 * h;
                let exact = qnd::evolve_with_kernels(&rho0, &spectrum, t, bath::eta(t, spec)?, bath::gamma(t, spec)?);
                worst = worst.max(linalg::max_abs_diff(&traj[k], &exact));
            }
            Ok(worst)
        })
        .collect();

    let gamma0 = 0.6;
    let inits: Vec<TwoLevelInitial> = if o.full() {
        vec![
            TwoLevelInitial::new(0.0, 0.0)?,
            TwoLevelInitial::new(PI, 0.0)?,
            TwoLevelInitial::new(PI / 2.0, 0.0)?,
            TwoLevelInitial::new(PI / 2.0, PI / 2.0)?,
            TwoLevelInitial::new(PI / 3.0, 1.0)?,
            TwoLevelInitial::new(2.0, 4.0)?,
        ]
    } else {
        vec![TwoLevelInitial::new(PI / 2.0, 0.0)?, TwoLevelInitial::new(PI / 3.0, 1.0)?]
    };
    let mut cases = Vec::new();
    for r in [0.0, 0.4] {
        for phi in [0.0, 1.5] {
            for temp in [0.0, 5.0] {
                for init in &inits {
                    cases.push((bloch::lindblad_params(gamma0, r, phi, 1.0, temp)?, *init));
                }
            }
        }
    }
    let h_l = 2e-3;
    let steps_l = (5.0 / gamma0 / h_l).round() as usize;
    let lindblad: Result<Vec<f64>> = cases
        .par_iter()
        .map(|(p, init)| {
            let traj = oracle::rk4_trajectory(&init.bloch().density(), 0.0, h_l, steps_l, |_, rho| {
                Ok(bloch::lindblad_rhs(rho, p))
            })?;
            let mut worst: f64 = 0.0;
            for k in (0..=steps_l).step_by(steps_l / 20) {
                let s = BlochVector::from_density(&traj[k]);
                worst = worst.max(s.max_abs_diff(&bloch::lindblad_bloch(k as f64 * h_l, *init, p)));
            }
            Ok(worst)
        })
        .collect();
    Ok((
        vec![
            Check::at_most("master equation RK4 vs closed form", max_of(master?), 1e-6),
            Check::at_most("Lindblad RK4 vs closed-form map", max_of(lindblad?), 1e-6),
        ],
        String::new(),
    ))
}

fn regime_discrimination(_o: Options) -> Outcome {
    let (g, wc, omega) = (0.1, 50.0, 1.0);
    let spectrum = SystemSpectrum::two_level(omega)?;
    let rho0 = PureState::normalized(vec![c(1.0, 0.0), c(1.0, 0.0)])?.density();
    let de2 = omega * omega;
    let log_cross = |t: f64, spec: &BathSpec| -> Result<f64> {
        let rho = qnd::evolve_density(&rho0, t, spec, &spectrum)?;
        Ok(2.0 * rho.matrix()[(0, 1)].norm().ln())
    };

    let zero = BathSpec::zero_temperature(g, wc, 0.0, 0.0)?;
    let ts = oracle::log_space(10.0, 1000.0, 40);
    let ys: Result<Vec<f64>> = ts.iter().map(|&t| log_cross(t, &zero)).collect();
    let lx: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
    let (slope, _) = oracle::linear_fit(&lx, &ys?);
    let want_slope = -2.0 * g * de2 / PI;

    let mut rate_err: f64 = 0.0;
    let mut rates = Vec::new();
    for r in [0.0, 0.4] {
        let high = BathSpec::high_temperature(g, wc, r, 0.0, HIGH_T)?;
        let ts: Vec<f64> = (0..40).map(|i| 2.0 + 6.0 * i as f64 / 39.0).collect();
        let ys: Result<Vec<f64>> = ts.iter().map(|&t| log_cross(t, &high)).collect();
        let (s, _) = oracle::linear_fit(&ts, &ys?);
        let want = 2.0 * g * HIGH_T * (2.0 * r).cosh() * de2;
        rates.push(format!("r={r}: {:.4} vs {want:.4}", -s));
        rate_err = rate_err.max(rel(-s, want));
    }
    Ok((
        vec![
            Check::at_most("zero-T log-log slope rel err", rel(slope, want_slope), 0.02),
            Check::at_most("high-T semilog rate rel err", rate_err, 0.02),
        ],
        format!("slope {slope:.5} vs {want_slope:.5}; rates {}", rates.join(", ")),
    ))
}

fn channel_geometry(_o: Options) -> Outcome {
    let FigureKindQnd { spec, omega, t } = fig5b_channel()?;
    let cloud = bloch::bloch_cloud(&Channel::Qnd { spec, omega }, t, 16, 16)?;
    let sz_drift = max_of(cloud.iter().map(|p| (p.evolved.sz - p.initial.sz).abs()));

    let gamma0 = 0.6;
    let mut fixed_err: f64 = 0.0;
    let mut squeezed = Vec::new();
    for (r, temp) in [(0.0, 0.0), (0.0, 5.0), (0.4, 0.0), (0.4, 5.0)] {
        let p = bloch::lindblad_params(gamma0, r, 0.0, 1.0, temp)?;
        let k = 2.0 * p.n + 1.0;
        let t = 50.0 / (gamma0 * k);
        let target = BlochVector { sx: 0.0, sy: 0.0, sz: -1.0 / k };
        let cloud = bloch::bloch_cloud(&Channel::Lindblad(p), t, 16, 16)?;
        let err = max_of(cloud.iter().map(|q| q.evolved.max_abs_diff(&target)));
        if r == 0.0 {
            fixed_err = fixed_err.max(err);
        } else {
            squeezed.push(format!("r=0.4 T={temp}: {err:.1e}"));
        }
    }
    Ok((
        vec![
            Check::at_most("QND sz drift on 16x16 grid", sz_drift, 1e-12),
            Check::at_most("Lindblad distance to fixed point (r=0)", fixed_err, 1e-8),
        ],
        format!("squeezed baths converge more slowly at t=50/(g0(2N+1)): {}", squeezed.join(", ")),
    ))
}

struct FigureKindQnd {
    spec: BathSpec,
    omega: f64,
    t: f64,
}

fn fig5b_channel() -> Result<FigureKindQnd> {
    match Figure::Fig5b.kind() {
        scenario::FigureKind::QndCloud { bath, r, omega, t, .. } => Ok(FigureKindQnd { spec: bath.spec(r)?, omega, t }),
        _ => unreachable!("fig5b is a QND cloud"),
    }
}

fn curve_column(curves: &[scenario::Curve], r: f64, name: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let c = curves
        .iter()
        .find(|c| c.r == Some(r))
        .ok_or_else(|| Error::Validation(format!("no curve with r = {r}")))?;
    Ok((c.table.column("t").expect("t column"), c.table.column(name).expect("curve column")))
}

fn figure_reproduction(_o: Options) -> Outcome {
    let (fig3, fig1) = rayon::join(|| scenario::figure_curves(Figure::Fig3), || scenario::figure_curves(Figure::Fig1));
    let (fig3, fig1) = (fig3?, fig1?);
    let (t, s0) = curve_column(&fig3, 0.0, "S")?;
    let (_, s_neg) = curve_column(&fig3, -0.3, "S")?;
    let gap = t
        .iter()
        .zip(s_neg.iter().zip(&s0))
        .filter(|(t, _)| (5.0..=100.0).contains(*t))
        .map(|(_, (a, b))| a - b)
        .fold(f64::NEG_INFINITY, |m, d| if d.is_nan() { f64::NAN } else { m.max(d) });

    let (t1, g0) = curve_column(&fig1, 0.0, "gamma_dot")?;
    let (_, g4) = curve_column(&fig1, 0.4, "gamma_dot")?;
    let last = t1.len() - 1;
    let ratio = g4[last] / g0[last];
    let want = 0.8f64.cosh();
    Ok((
        vec![
            Check::below("fig3 max S(r=-0.3) - S(r=0) on t in [5,100]", gap, 0.0),
            Check::at_most("fig1 |ratio/cosh(0.8) - 1| at t=5", (ratio / want - 1.0).abs(), 0.02),
        ],
        format!("fig1 ratio {ratio:.4} vs cosh(0.8) = {want:.4}"),
    ))
}

/// Evolved coherent-state Q grids at `t0 + k dt`, `k = 0, 1, 2`.
fn q_snapshots(rho0: &DensityMatrix, spec: &BathSpec, spectrum: &SystemSpectrum, grid: &GridSpec, t0: f64, dt: f64) -> Result<Vec<QGrid>> {
    (0..3)
        .map(|k| {
            let rho = qnd::evolve_density(rho0, t0 + k as f64 * dt, spec, spectrum)?;
            phase_space::q_from_density(rho.matrix(), grid)
        })
        .collect()
}

fn q_function_suite(o: Options) -> Outcome {
    let (alpha_sq, n_max, omega, t) = (5.0, 30, 1.0, 1.0);
    let spectrum = qnd::ho_spectrum(omega, n_max)?;
    let rho0 = qnd::coherent_state_populations(alpha_sq, n_max)?.density();
    let xi_max = alpha_sq.sqrt() + 6.0;
    let grid = |n_xi, n_theta| GridSpec { xi_max, n_xi, n_theta };
    let rs: &[f64] = if o.full() { &[0.0, -0.3, 0.4] } else { &[0.4] };

    let per_r: Result<Vec<[f64; 5]>> = rs
        .par_iter()
        .map(|&r| {
            let spec = BathSpec::zero_temperature(0.1, 50.0, r, 0.0)?;
            let mut norm_err: f64 = 0.0;
            for tn in [0.0, 1.0, 10.0] {
                let rho = qnd::evolve_density(&rho0, tn, &spec, &spectrum)?;
                let q = phase_space::q_from_density(rho.matrix(), &grid(128, 64))?;
                norm_err = norm_err.max((q.normalization() - 1.0).abs());
            }
            let dt = 1e-3;
            let residual = |g: &GridSpec, dt: f64| -> Result<f64> {
                let snaps = q_snapshots(&rho0, &spec, &spectrum, g, t - dt, dt)?;
                Ok(phase_space::q_pde_residual(&snaps, t - dt, dt, &spec, omega)?.relative_norm)
            };
            let fine = grid(64, 256);
            let mut snaps = q_snapshots(&rho0, &spec, &spectrum, &fine, t - dt, dt)?;
            let base = phase_space::q_pde_residual(&snaps, t - dt, dt, &spec, omega)?.relative_norm;
            let mid = &mut snaps[1];
            for i in 0..mid.xi.len() {
                for j in 0..mid.theta.len() {
                    let k = i * mid.theta.len() + j;
                    mid.values[k] *= 1.0 + 0.01 * (3.0 * mid.theta[j]).cos();
                }
            }
            let rippled = phase_space::q_pde_residual(&snaps, t - dt, dt, &spec, omega)?.relative_norm;
            let coarse = residual(&grid(64, 128), dt)?;
            let halved = residual(&grid(127, 256), dt / 2.0)?;
            let spec_grid = residual(&grid(64, 64), dt)?;
            Ok([norm_err, base, (coarse / halved).log2(), rippled / base, spec_grid])
        })
        .collect();
    let per_r = per_r?;

    let n_random = 100;
    let mut rng = StdRng::seed_from_u64(0x51_u64);
    let mut analytic: f64 = 0.0;
    let mut fd: f64 = 0.0;
    for _ in 0..n_random {
        let (theta, tt) = (rng.random_range(-PI..PI), rng.random_range(0.0..5.0));
        let (lambda, w) = (rng.random_range(0.0..2.0), rng.random_range(0.2..2.0));
        analytic = analytic.max(phase_space::longtime_residual_t0(theta, tt, lambda, w)?);
        let q0 = |th: f64, s: f64| phase_space::longtime_solution_t0(th, s, lambda, w).unwrap_or(f64::NAN);
        fd = fd.max(fd_residual(&q0, theta, tt, w, 0.0));

        let a1 = rng.random_range(0.2..2.0);
        let bound = w * w / (4.0 * a1);
        let p = DiffusionSolutionParams::new(
            w,
            a1,
            rng.random_range(0.0..=bound),
            rng.random_range(0.1..1.0),
            rng.random_range(0.1..1.0),
        )?;
        analytic = analytic.max(phase_space::longtime_residual_high_t(theta, tt, &p));
        let q1 = |th: f64, s: f64| phase_space::longtime_solution_high_t(th, s, &p);
        fd = fd.max(fd_residual(&q1, theta, tt, w, a1));
    }

    let col = |k: usize| per_r.iter().map(move |v| v[k]);
    let min_of = |it: Box<dyn Iterator<Item = f64> + '_>| it.fold(f64::INFINITY, f64::min);
    Ok((
        vec![
            Check::at_most("normalization |1 - integral| (128x64)", max_of(col(0)), 1e-6),
            Check::at_most("PDE residual (64x256, dt=1e-3)", max_of(col(1)), 1e-3),
            Check::at_least("halving-grid order", min_of(Box::new(col(2))), 1.8),
            Check::at_least("1% ripple residual gain", min_of(Box::new(col(3))), 10.0),
            Check::at_most(format!("long-time solution residuals ({n_random} points each)"), analytic, 1e-12),
            Check::at_most("long-time solutions vs finite differences", fd, 1e-6),
        ],
        format!("64x64 residual {:.2e}", max_of(col(4))),
    ))
}

/// Relative residual of `∂_t Q = ω ∂_θ Q + D ∂²_θ Q` from fourth-order
/// central differences of `q`.
fn fd_residual(q: &dyn Fn(f64, f64) -> f64, theta: f64, t: f64, omega: f64, diffusion: f64) -> f64 {
    let h = 1e-3;
    let d1 = |f: &dyn Fn(f64) -> f64, x: f64| (8.0 * (f(x + h) - f(x - h)) - (f(x + 2.0 * h) - f(x - 2.0 * h))) / (12.0 * h);
    let d2 = |f: &dyn Fn(f64) -> f64, x: f64| {
        (16.0 * (f(x + h) + f(x - h)) - (f(x + 2.0 * h) + f(x - 2.0 * h)) - 30.0 * f(x)) / (12.0 * h * h)
    };
    let q_t = d1(&|s| q(theta, s), t);
    let q_th = d1(&|th| q(th, t), theta);
    let q_thth = d2(&|th| q(th, t), theta);
    let scale = q_t.abs().max((omega * q_th).abs()).max((diffusion * q_thth).abs());
    (q_t - omega * q_th - diffusion * q_thth).abs() / scale
}

fn spin_bath_suite(_o: Options) -> Outcome {
    let spectrum = SystemSpectrum::two_level(1.0)?;
    let rho0 = qubit_state()?;
    let modes = [SpinMode { omega: 1.0, coupling: 0.3 }, SpinMode { omega: 2.3, coupling: 0.7 }];
    let times: Vec<f64> = (0..=20).map(|i| 0.5 * i as f64).collect();
    let mut formula_err: f64 = 0.0;
    let mut state_gap: f64 = 0.0;
    for k in [1, 2] {
        let spec = SpinBathSpec::new(modes[..k].to_vec())?;
        for &t in &times {
            let formula = spin_bath::reduced_density_spin_bath(&rho0, t, &spec, &spectrum)?;
            let ground = spin_bath::exact_spin_bath_evolution(&rho0, t, &spec, &spectrum, &SpinBathState::Ground)?;
            let mixed = spin_bath::exact_spin_bath_evolution(&rho0, t, &spec, &spectrum, &SpinBathState::MaximallyMixed)?;
            formula_err = formula_err
                .max(linalg::max_abs_diff(formula.matrix(), ground.matrix()))
                .max(linalg::max_abs_diff(formula.matrix(), mixed.matrix()));
            state_gap = state_gap.max(linalg::max_abs_diff(ground.matrix(), mixed.matrix()));
        }
    }
    Ok((
        vec![
            Check::at_most("product formula vs exact 4x4/8x8", formula_err, 1e-10),
            Check::at_most("ground vs maximally mixed bath", state_gap, 1e-10),
        ],
        "spectrum E = +-0.5".into(),
    ))
}
