//! Brute-force evolution of system ⊗ discrete bosonic bath under
//!
//! `H = H_S + Σ_k ω_k b_k†b_k + H_S Σ_k g_k (b_k + b_k†) + H_S² Σ_k g_k²/ω_k`
//!
//! with every bath mode in a truncated Fock space. Because `H_S` is
//! diagonal in the system eigenbasis, `H` is block diagonal: level `n`
//! sees the bath Hamiltonian `H_n` obtained by replacing `H_S` with `E_n`.
//! Each block is diagonalised once; the reduced coherences are then
//!
//! `ρ_nm(t) = Tr_B[e^{-iH_n t} ρ_B e^{iH_m t}] ρ_nm(0)`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock;
use crate::linalg::{self, c, CMatrix, HermitianEigen};
use crate::qnd::{self, DensityMatrix, SystemSpectrum};

pub const DEFAULT_DIMENSION_CAP: usize = 4096;
pub const DEFAULT_N_MAX: usize = 30;

/// One bath oscillator: frequency, coupling, squeeze magnitude and phase.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiscreteMode {
    pub omega: f64,
    pub g: f64,
    pub r: f64,
    pub phi: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteBathSpec {
    modes: Vec<DiscreteMode>,
    temperature: f64,
    n_max: usize,
}

impl DiscreteBathSpec {
    pub fn new(modes: Vec<DiscreteMode>, temperature: f64, n_max: usize) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::Validation("discrete bath needs at least one mode".into()));
        }
        for m in &modes {
            if !(m.omega > 0.0 && m.omega.is_finite()) {
                return Err(Error::invalid("omega_k", "must be positive and finite", m.omega));
            }
            if !(m.g.is_finite() && m.r.is_finite() && m.phi.is_finite()) {
                return Err(Error::Validation("mode couplings and squeeze parameters must be finite".into()));
            }
        }
        if !(temperature >= 0.0 && temperature.is_finite()) {
            return Err(Error::invalid("T", "must be non-negative and finite", temperature));
        }
        if n_max < fock::MIN_N_MAX {
            return Err(Error::invalid("n_max", "must be at least 4", n_max as f64));
        }
        Ok(Self {
            modes,
            temperature,
            n_max,
        })
    }

    pub fn modes(&self) -> &[DiscreteMode] {
        &self.modes
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Smallest truncation the squeezing rule `10 sinh²r + 20` allows.
    pub fn required_n_max(&self) -> usize {
        self.modes
            .iter()
            .filter(|m| m.r != 0.0)
            .map(|m| (10.0 * m.r.sinh().powi(2) + 20.0).ceil() as usize)
            .max()
            .unwrap_or(fock::MIN_N_MAX)
    }

    fn coth_half(&self, omega: f64) -> f64 {
        if self.temperature == 0.0 {
            1.0
        } else {
            crate::bath::coth_half(omega / self.temperature)
        }
    }
}

/// Ohmic bath sampled at `k` midpoints of `[0, 8ω_c]` with
/// `g_k² = I(ω_k) Δω` and squeeze phase `Φ_k = a ω_k`.
pub fn ohmic_modes(gamma0: f64, omega_c: f64, r: f64, a: f64, k: usize) -> Vec<DiscreteMode> {
    let dw = 8.0 * omega_c / k as f64;
    (0..k)
        .map(|i| {
            let w = (i as f64 + 0.5) * dw;
            let density = gamma0 / std::f64::consts::PI * w * (-w / omega_c).exp();
            DiscreteMode {
                omega: w,
                g: (density * dw).sqrt(),
                r,
                phi: a * w,
            }
        })
        .collect()
}

/// Discrete-bath kernels.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiscreteKernels {
    pub gamma: f64,
    pub eta: f64,
}

/// `η_d = -Σ (g²/ω²) sin ωt` and
/// `γ_d = ½ Σ (g²/ω²) coth(βω/2) |(e^{iωt}-1) cosh r + (e^{-iωt}-1) sinh r e^{2iΦ}|²`.
pub fn discrete_gamma_eta(t: f64, spec: &DiscreteBathSpec) -> DiscreteKernels {
    let mut gamma = 0.0;
    let mut eta = 0.0;
    for m in &spec.modes {
        let weight = m.g * m.g / (m.omega * m.omega);
        let x = m.omega * t;
        let half = (0.5 * x).sin();
        let em1 = c(-2.0 * half * half, x.sin());
        let b = em1 * m.r.cosh() + em1.conj() * m.r.sinh() * Complex64::from_polar(1.0, 2.0 * m.phi);
        gamma += 0.5 * weight * spec.coth_half(m.omega) * b.norm_sqr();
        eta -= weight * x.sin();
    }
    DiscreteKernels { gamma, eta }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CompositeOptions {
    /// Include the `H_S² Σ g²/ω` renormalisation term.
    pub counter_term: bool,
    pub dimension_cap: usize,
}

impl Default for CompositeOptions {
    fn default() -> Self {
        Self {
            counter_term: true,
            dimension_cap: DEFAULT_DIMENSION_CAP,
        }
    }
}

/// Diagonalised blocks of the composite Hamiltonian, ready for evaluation
/// at any time.
pub struct CompositeEvolver {
    energies: Vec<f64>,
    /// Block eigenvalues per system level.
    values: Vec<Vec<f64>>,
    /// `V_n† ρ_B V_m`, indexed `[n][m]`.
    state_overlaps: Vec<Vec<CMatrix>>,
    /// `V_m† V_n`, indexed `[n][m]`.
    basis_overlaps: Vec<Vec<CMatrix>>,
    /// Truncation defect of each mode state.
    pub defects: Vec<f64>,
}

fn embed(op: &CMatrix, k: usize, dims: &[usize]) -> CMatrix {
    dims.iter().enumerate().fold(CMatrix::identity(1, 1), |acc, (j, &d)| {
        if j == k {
            linalg::kron(&acc, op)
        } else {
            linalg::kron(&acc, &CMatrix::identity(d, d))
        }
    })
}

impl CompositeEvolver {
    pub fn new(spectrum: &SystemSpectrum, spec: &DiscreteBathSpec, options: CompositeOptions) -> Result<Self> {
        let need = spec.required_n_max();
        if spec.n_max < need {
            return Err(Error::Validation(format!(
                "squeezed modes need n_max >= {need} (10 sinh^2 r + 20), got {}",
                spec.n_max
            )));
        }
        let d = spec.n_max + 1;
        let dims = vec![d; spec.modes.len()];
        let dim_b = dims
            .iter()
            .try_fold(1usize, |acc, &x| acc.checked_mul(x))
            .unwrap_or(usize::MAX);
        let total = dim_b.saturating_mul(spectrum.dimension());
        if total > options.dimension_cap {
            return Err(Error::DimensionCap {
                dimension: total,
                cap: options.dimension_cap,
            });
        }

        let mut rho_b = CMatrix::identity(1, 1);
        let mut defects = Vec::with_capacity(spec.modes.len());
        let mut free = CMatrix::zeros(dim_b, dim_b);
        let mut coupling = CMatrix::zeros(dim_b, dim_b);
        let mut counter = 0.0;
        let b = fock::annihilation(spec.n_max);
        let x = &b + b.adjoint();
        let num = fock::number(spec.n_max);
        for (k, m) in spec.modes.iter().enumerate() {
            let st = fock::squeezed_thermal_mode(m.omega, m.r, m.phi, spec.temperature, spec.n_max)?;
            defects.push(st.defect);
            rho_b = linalg::kron(&rho_b, &st.rho);
            free += embed(&num, k, &dims) * c(m.omega, 0.0);
            coupling += embed(&x, k, &dims) * c(m.g, 0.0);
            counter += m.g * m.g / m.omega;
        }

        let blocks: Vec<HermitianEigen> = spectrum
            .energies()
            .par_iter()
            .map(|&e| {
                let shift = e + if options.counter_term { e * e * counter } else { 0.0 };
                let h = &free + &coupling * c(e, 0.0) + CMatrix::identity(dim_b, dim_b) * c(shift, 0.0);
                HermitianEigen::new(&h)
            })
            .collect();

        let n = blocks.len();
        let pairs: Vec<(CMatrix, CMatrix)> = (0..n * n)
            .into_par_iter()
            .map(|idx| {
                let (i, j) = (idx / n, idx % n);
                let vi = &blocks[i].vectors;
                let vj = &blocks[j].vectors;
                (vi.adjoint() * &rho_b * vj, vj.adjoint() * vi)
            })
            .collect();
        let mut state_overlaps = vec![Vec::with_capacity(n); n];
        let mut basis_overlaps = vec![Vec::with_capacity(n); n];
        for (idx, (s, b)) in pairs.into_iter().enumerate() {
            state_overlaps[idx / n].push(s);
            basis_overlaps[idx / n].push(b);
        }

        Ok(Self {
            energies: spectrum.energies().to_vec(),
            values: blocks.into_iter().map(|b| b.values).collect(),
            state_overlaps,
            basis_overlaps,
            defects,
        })
    }

    /// `Tr_B[e^{-iH_n t} ρ_B e^{iH_m t}]`.
    pub fn influence(&self, n: usize, m: usize, t: f64) -> Complex64 {
        let a = &self.state_overlaps[n][m];
        let b = &self.basis_overlaps[n][m];
        let pn: Vec<Complex64> = self.values[n].iter().map(|&l| Complex64::from_polar(1.0, -l * t)).collect();
        let pm: Vec<Complex64> = self.values[m].iter().map(|&l| Complex64::from_polar(1.0, l * t)).collect();
        let d = pn.len();
        let mut total = c(0.0, 0.0);
        for i in 0..d {
            let mut row = c(0.0, 0.0);
            for j in 0..d {
                row += a[(i, j)] * pm[j] * b[(j, i)];
            }
            total += pn[i] * row;
        }
        total
    }

    pub fn reduced(&self, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
        let n = self.energies.len();
        if rho0.dimension() != n {
            return Err(Error::Validation(format!(
                "density matrix dimension {} does not match spectrum dimension {n}",
                rho0.dimension()
            )));
        }
        let r0 = rho0.matrix();
        Ok(DensityMatrix::from_trusted(CMatrix::from_fn(n, n, |i, j| {
            self.influence(i, j, t) * r0[(i, j)]
        })))
    }
}

/// Reduced system density matrix from the full composite evolution.
pub fn exact_reduced_evolution(
    rho0: &DensityMatrix,
    t: f64,
    spec: &DiscreteBathSpec,
    spectrum: &SystemSpectrum,
) -> Result<DensityMatrix> {
    CompositeEvolver::new(spectrum, spec, CompositeOptions::default())?.reduced(rho0, t)
}

/// Analytic reduced evolution with the discrete-bath kernels.
pub fn analytic_reduced_evolution(rho0: &DensityMatrix, t: f64, spec: &DiscreteBathSpec, spectrum: &SystemSpectrum) -> DensityMatrix {
    let k = discrete_gamma_eta(t, spec);
    DensityMatrix::from_trusted(qnd::evolve_with_kernels(rho0.matrix(), spectrum, t, k.eta, k.gamma))
}

#[derive(Clone, Debug)]
pub struct CompositeScenario {
    pub rho0: DensityMatrix,
    pub spectrum: SystemSpectrum,
    pub bath: DiscreteBathSpec,
    pub times: Vec<f64>,
    pub options: CompositeOptions,
}

#[derive(Clone, Debug)]
pub struct CompositeReport {
    /// Largest elementwise deviation from the analytic evolution, per time.
    pub deviations: Vec<f64>,
    pub max_deviation: f64,
    /// Largest change of any diagonal entry.
    pub diagonal_drift: f64,
    pub truncation_defects: Vec<f64>,
    /// Set when the scenario could not be run.
    pub failure: Option<String>,
}

/// Compare the exact composite evolution with the analytic formula.
/// Problems are reported in the result rather than returned as errors.
pub fn verify_against_analytic(scenario: &CompositeScenario) -> CompositeReport {
    let failed = |msg: String| CompositeReport {
        deviations: Vec::new(),
        max_deviation: f64::INFINITY,
        diagonal_drift: f64::INFINITY,
        truncation_defects: Vec::new(),
        failure: Some(msg),
    };
    let evolver = match CompositeEvolver::new(&scenario.spectrum, &scenario.bath, scenario.options) {
        Ok(e) => e,
        Err(e) => return failed(e.to_string()),
    };
    let r0 = scenario.rho0.matrix();
    let mut deviations = Vec::with_capacity(scenario.times.len());
    let mut drift: f64 = 0.0;
    for &t in &scenario.times {
        let exact = match evolver.reduced(&scenario.rho0, t) {
            Ok(m) => m,
            Err(e) => return failed(e.to_string()),
        };
        let analytic = analytic_reduced_evolution(&scenario.rho0, t, &scenario.bath, &scenario.spectrum);
        deviations.push(linalg::max_abs_diff(exact.matrix(), analytic.matrix()));
        for i in 0..r0.nrows() {
            drift = drift.max((exact.matrix()[(i, i)] - r0[(i, i)]).norm());
        }
    }
    CompositeReport {
        max_deviation: deviations.iter().copied().fold(0.0, f64::max),
        deviations,
        diagonal_drift: drift,
        truncation_defects: evolver.defects.clone(),
        failure: None,
    }
}
