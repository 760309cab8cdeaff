//! Reduced dynamics of a system QND-coupled to the squeezed bath.
//!
//! In the system eigenbasis each coherence evolves independently:
//!
//! `ρ_nm(t) = e^{-i(E_n-E_m)t} e^{+i(E_n²-E_m²)η(t)} e^{-(E_n-E_m)²γ(t)} ρ_nm(0)`
//!
//! The `+` sign on the `η` phase follows from `η` itself being negative.
//! Populations never change.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::bath::{self, BathSpec, TemperatureMode};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, HermitianEigen};

/// Tolerance on `Σ|p_n|² = 1` and on the trace and hermiticity of density matrices.
pub const NORM_TOLERANCE: f64 = 1e-12;
/// Smallest eigenvalue accepted for a density matrix.
pub const PSD_FLOOR: f64 = -1e-10;
/// Default Poisson tail mass discarded when truncating a coherent state.
pub const COHERENT_TAIL: f64 = 1e-12;

/// Eigenvalues `E_n` of the system Hamiltonian.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemSpectrum {
    energies: Vec<f64>,
}

impl SystemSpectrum {
    pub fn new(energies: Vec<f64>) -> Result<Self> {
        if energies.is_empty() {
            return Err(Error::Validation("spectrum needs at least one level".into()));
        }
        if let Some(&bad) = energies.iter().find(|e| !e.is_finite()) {
            return Err(Error::invalid("energy", "must be finite", bad));
        }
        Ok(Self { energies })
    }

    /// Two-level atom `±ω/2`, upper level first (index 0 is `|1⟩`).
    pub fn two_level(omega: f64) -> Result<Self> {
        Self::new(vec![0.5 * omega, -0.5 * omega])
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn dimension(&self) -> usize {
        self.energies.len()
    }
}

/// Harmonic oscillator levels `ω(n + ½)` for `n = 0..=n_max`.
pub fn ho_spectrum(omega: f64, n_max: usize) -> Result<SystemSpectrum> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::invalid("omega", "must be positive and finite", omega));
    }
    SystemSpectrum::new((0..=n_max).map(|n| omega * (n as f64 + 0.5)).collect())
}

/// Normalised amplitudes `p_n` of a pure initial state.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: Vec<Complex64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|p| p.norm_sqr()).sum();
        if !((norm - 1.0).abs() <= NORM_TOLERANCE) {
            return Err(Error::invalid(
                "state norm",
                "sum of |p_n|^2 must be 1 within 1e-12",
                norm,
            ));
        }
        Ok(Self { amplitudes })
    }

    /// Scale arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|p| p.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::invalid("state norm", "must be positive and finite", norm));
        }
        Ok(Self {
            amplitudes: amplitudes.into_iter().map(|p| p / norm).collect(),
        })
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn populations(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|p| p.norm_sqr()).collect()
    }

    pub fn dimension(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn density(&self) -> DensityMatrix {
        let n = self.amplitudes.len();
        DensityMatrix(CMatrix::from_fn(n, n, |i, j| {
            self.amplitudes[i] * self.amplitudes[j].conj()
        }))
    }
}

/// Density matrix `ρ_nm` in the system energy eigenbasis.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(CMatrix);

impl DensityMatrix {
    /// Validate hermiticity, unit trace and positivity.
    pub fn new(m: CMatrix) -> Result<Self> {
        if !m.is_square() || m.nrows() == 0 {
            return Err(Error::Validation(format!(
                "density matrix must be square and non-empty (got {}x{})",
                m.nrows(),
                m.ncols()
            )));
        }
        let herm = linalg::hermiticity_defect(&m);
        if !(herm <= NORM_TOLERANCE) {
            return Err(Error::invalid("density matrix", "must be hermitian within 1e-12", herm));
        }
        let tr = m.trace();
        if !((tr.re - 1.0).abs() <= NORM_TOLERANCE && tr.im.abs() <= NORM_TOLERANCE) {
            return Err(Error::invalid("density matrix trace", "must be 1 within 1e-12", tr.re));
        }
        let min = HermitianEigen::new(&m).min_eigenvalue();
        if min < PSD_FLOOR {
            return Err(Error::invalid(
                "density matrix",
                "must be positive semidefinite (eigenvalues >= -1e-10)",
                min,
            ));
        }
        Ok(Self(m))
    }

    /// Wrap a matrix known to be valid, e.g. the image of a valid matrix
    /// under a map that preserves the density-matrix properties.
    pub(crate) fn from_trusted(m: CMatrix) -> Self {
        Self(m)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn dimension(&self) -> usize {
        self.0.nrows()
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }
}

fn check_dimensions(rho_dim: usize, spectrum: &SystemSpectrum) -> Result<()> {
    if rho_dim != spectrum.dimension() {
        return Err(Error::Validation(format!(
            "density matrix dimension {rho_dim} does not match spectrum dimension {}",
            spectrum.dimension()
        )));
    }
    Ok(())
}

/// Apply the evolution factors for given kernel values `η`, `γ` at time `t`.
pub fn evolve_with_kernels(rho0: &CMatrix, spectrum: &SystemSpectrum, t: f64, eta: f64, gamma: f64) -> CMatrix {
    let e = spectrum.energies();
    CMatrix::from_fn(rho0.nrows(), rho0.ncols(), |n, m| {
        let de = e[n] - e[m];
        let de2 = e[n] * e[n] - e[m] * e[m];
        let factor = Complex64::new(-de * de * gamma, -de * t + de2 * eta).exp();
        factor * rho0[(n, m)]
    })
}

pub fn evolve_density(
    rho0: &DensityMatrix,
    t: f64,
    spec: &BathSpec,
    spectrum: &SystemSpectrum,
) -> Result<DensityMatrix> {
    check_dimensions(rho0.dimension(), spectrum)?;
    let eta = bath::eta(t, spec)?;
    let gamma = bath::gamma(t, spec)?;
    Ok(DensityMatrix(evolve_with_kernels(rho0.matrix(), spectrum, t, eta, gamma)))
}

/// Right-hand side of the master equation for given `η̇`, `γ̇`.
pub fn master_rhs_with(rho: &CMatrix, spectrum: &SystemSpectrum, eta_dot: f64, gamma_dot: f64) -> CMatrix {
    let e = spectrum.energies();
    CMatrix::from_fn(rho.nrows(), rho.ncols(), |n, m| {
        let de = e[n] - e[m];
        let de2 = e[n] * e[n] - e[m] * e[m];
        Complex64::new(-de * de * gamma_dot, -de + eta_dot * de2) * rho[(n, m)]
    })
}

/// `dρ/dt` at time `t`. Takes a bare matrix because intermediate ODE
/// stages need not be valid density matrices.
pub fn master_rhs(rho: &CMatrix, t: f64, spec: &BathSpec, spectrum: &SystemSpectrum) -> Result<CMatrix> {
    check_dimensions(rho.nrows(), spectrum)?;
    let eta_dot = bath::eta_dot(t, spec)?;
    let gamma_dot = bath::gamma_dot(t, spec)?;
    Ok(master_rhs_with(rho, spectrum, eta_dot, gamma_dot))
}

fn check_state(state: &PureState, spectrum: &SystemSpectrum) -> Result<()> {
    if state.dimension() != spectrum.dimension() {
        return Err(Error::Validation(format!(
            "state dimension {} does not match spectrum dimension {}",
            state.dimension(),
            spectrum.dimension()
        )));
    }
    Ok(())
}

/// `Σ_{n,m} |p_n|²|p_m|² exp(log_factor(E_n - E_m))`.
fn pair_sum(state: &PureState, spectrum: &SystemSpectrum, log_factor: impl Fn(f64) -> f64) -> f64 {
    let w = state.populations();
    let e = spectrum.energies();
    let mut total = 0.0;
    for n in 0..w.len() {
        if w[n] == 0.0 {
            continue;
        }
        let mut row = 0.0;
        for m in 0..w.len() {
            let de = e[n] - e[m];
            let f = if de == 0.0 { 1.0 } else { log_factor(de).exp() };
            row += w[m] * f;
        }
        total += w[n] * row;
    }
    total
}

/// `C = Tr ρ²` of the evolved pure state for a given `γ`.
pub fn coherence_from_gamma(state: &PureState, spectrum: &SystemSpectrum, gamma: f64) -> Result<f64> {
    check_state(state, spectrum)?;
    Ok(pair_sum(state, spectrum, |de| -2.0 * de * de * gamma))
}

pub fn coherence_measure(state: &PureState, t: f64, spec: &BathSpec, spectrum: &SystemSpectrum) -> Result<f64> {
    coherence_from_gamma(state, spectrum, bath::gamma(t, spec)?)
}

/// `S = 1 - C`.
pub fn linear_entropy(state: &PureState, t: f64, spec: &BathSpec, spectrum: &SystemSpectrum) -> Result<f64> {
    Ok(1.0 - coherence_measure(state, t, spec, spectrum)?)
}

fn check_closed_form(t: f64, spec: &BathSpec, mode: TemperatureMode, what: &'static str) -> Result<()> {
    if spec.mode() != mode {
        return Err(Error::WrongTemperatureMode {
            what,
            required: mode.name(),
        });
    }
    // reuse the kernel domain checks
    bath::gamma_parts(t, spec).map(|_| ())
}

/// Log of the zero-temperature coherence factor of a pair with gap `de`,
/// written as the product of powers of `(1+ω_c²t²)` and friends.
pub fn log_pair_factor_t0(de: f64, t: f64, spec: &BathSpec) -> Result<f64> {
    check_closed_form(t, spec, TemperatureMode::Zero, "zero-temperature closed-form coherence")?;
    Ok(log_pair_t0(de, t, spec))
}

fn log_pair_t0(de: f64, t: f64, spec: &BathSpec) -> f64 {
    let (g, wc, r, a) = (spec.gamma0(), spec.omega_c(), spec.r(), spec.a());
    let (ch, sh) = ((2.0 * r).cosh(), (2.0 * r).sinh());
    let de2 = de * de;
    let x = wc * t;
    let u = 2.0 * wc * (t - a);
    let v = wc * (t - 2.0 * a);
    let w = 2.0 * a * wc;
    let mut log = -(g * ch * de2 / PI) * (x * x).ln_1p();
    if sh != 0.0 {
        let k = g * sh * de2 / (2.0 * PI);
        log += k * ((u * u).ln_1p() - 2.0 * (v * v).ln_1p()) + k * (w * w).ln_1p();
    }
    log
}

/// Log of the high-temperature coherence factor of a pair with gap `de`:
/// exponential-in-`t` terms plus power-law prefactors.
pub fn log_pair_factor_high_t(de: f64, t: f64, spec: &BathSpec) -> Result<f64> {
    check_closed_form(t, spec, TemperatureMode::High, "high-temperature closed-form coherence")?;
    let (exponential, power) = log_pair_high_t(de, t, spec);
    Ok(exponential + power)
}

/// Split into the exponential part and the power-law part.
fn log_pair_high_t(de: f64, t: f64, spec: &BathSpec) -> (f64, f64) {
    let (g, wc, r, a, temp) = (spec.gamma0(), spec.omega_c(), spec.r(), spec.a(), spec.temperature());
    let (ch, sh) = ((2.0 * r).cosh(), (2.0 * r).sinh());
    let de2 = de * de;
    let x = wc * t;
    let u = 2.0 * wc * (t - a);
    let v = wc * (t - 2.0 * a);
    let w = 2.0 * a * wc;

    let mut exponential = -de2 * (4.0 * g * temp / PI) * ch * x.atan() * t;
    let mut power = (2.0 * g * temp * ch * de2 / (PI * wc)) * (x * x).ln_1p();
    if sh != 0.0 {
        exponential += -de2 * (4.0 * g * temp / PI) * sh * (v.atan() - u.atan()) * t
            - de2 * (4.0 * a * g * temp / PI) * sh * (u.atan() - 2.0 * v.atan() - w.atan());
        let k = g * temp * sh * de2 / (PI * wc);
        power += k * (2.0 * (v * v).ln_1p() - (u * u).ln_1p()) - k * (w * w).ln_1p();
    }
    (exponential, power)
}

/// Zero-temperature coherence from its closed product-of-powers form.
pub fn coherence_closed_t0(state: &PureState, t: f64, spec: &BathSpec, spectrum: &SystemSpectrum) -> Result<f64> {
    check_state(state, spectrum)?;
    check_closed_form(t, spec, TemperatureMode::Zero, "zero-temperature closed-form coherence")?;
    Ok(pair_sum(state, spectrum, |de| log_pair_t0(de, t, spec)))
}

/// High-temperature coherence from its closed exponential/power-law form.
pub fn coherence_closed_high_t(state: &PureState, t: f64, spec: &BathSpec, spectrum: &SystemSpectrum) -> Result<f64> {
    check_state(state, spectrum)?;
    check_closed_form(t, spec, TemperatureMode::High, "high-temperature closed-form coherence")?;
    Ok(pair_sum(state, spectrum, |de| {
        let (e, p) = log_pair_high_t(de, t, spec);
        e + p
    }))
}

/// Diagnostic: the high-temperature coherence keeping only the terms
/// exponential in `t`, which dominate once `ω_c t ≫ 1`.
pub fn dominant_high_t(state: &PureState, t: f64, spec: &BathSpec, spectrum: &SystemSpectrum) -> Result<f64> {
    check_state(state, spectrum)?;
    check_closed_form(t, spec, TemperatureMode::High, "high-temperature dominant term")?;
    Ok(pair_sum(state, spectrum, |de| log_pair_high_t(de, t, spec).0))
}

/// Long-time high-temperature coherence `Σ|p_n|²|p_m|² exp(-2γ₀T cosh 2r ΔE² t)`.
pub fn coherence_long_time_high_t(state: &PureState, t: f64, spec: &BathSpec, spectrum: &SystemSpectrum) -> Result<f64> {
    check_state(state, spectrum)?;
    let rate = 2.0 * bath::high_t_decoherence_rate(spec);
    Ok(pair_sum(state, spectrum, |de| -rate * de * de * t))
}

/// `ln p_n` for a coherent state with real `α = √alpha_sq`.
fn ln_coherent_amplitude(alpha_sq: f64, n: usize, ln_factorial: f64) -> f64 {
    -0.5 * alpha_sq + 0.5 * n as f64 * alpha_sq.ln() - 0.5 * ln_factorial
}

/// Poisson mass beyond `n_max`, summed directly from the tail.
fn poisson_tail(alpha_sq: f64, n_max: usize) -> f64 {
    if alpha_sq == 0.0 {
        return 0.0;
    }
    let mut ln_fact: f64 = (1..=n_max + 1).map(|k| (k as f64).ln()).sum();
    let mut n = n_max + 1;
    let mut tail = 0.0;
    loop {
        let term = (2.0 * ln_coherent_amplitude(alpha_sq, n, ln_fact)).exp();
        tail += term;
        if n as f64 > alpha_sq && term <= f64::EPSILON * tail.max(f64::MIN_POSITIVE) {
            break;
        }
        n += 1;
        ln_fact += (n as f64).ln();
    }
    tail
}

/// Smallest `n_max` whose discarded Poisson tail is below `tail_tol`.
pub fn required_n_max(alpha_sq: f64, tail_tol: f64) -> usize {
    let mut n = 1;
    while poisson_tail(alpha_sq, n) >= tail_tol {
        n += 1;
    }
    n
}

/// Coherent-state amplitudes `p_n = e^{-|α|²/2} αⁿ/√n!`, `n ≤ n_max`,
/// renormalised after truncation.
pub fn coherent_state_populations(alpha_sq: f64, n_max: usize) -> Result<PureState> {
    coherent_state_with_tail(alpha_sq, n_max, COHERENT_TAIL)
}

pub fn coherent_state_with_tail(alpha_sq: f64, n_max: usize, tail_tol: f64) -> Result<PureState> {
    if !(alpha_sq >= 0.0 && alpha_sq.is_finite()) {
        return Err(Error::invalid("alpha_sq", "must be non-negative and finite", alpha_sq));
    }
    if n_max < 1 {
        return Err(Error::invalid("n_max", "must be at least 1", n_max as f64));
    }
    let tail = poisson_tail(alpha_sq, n_max);
    if tail >= tail_tol {
        return Err(Error::Truncation {
            defect: tail,
            tolerance: tail_tol,
            required: Some(required_n_max(alpha_sq, tail_tol)),
        });
    }
    let mut ln_fact = 0.0;
    let amplitudes = (0..=n_max)
        .map(|n| {
            if n > 0 {
                ln_fact += (n as f64).ln();
            }
            let p = if alpha_sq == 0.0 {
                if n == 0 { 1.0 } else { 0.0 }
            } else {
                ln_coherent_amplitude(alpha_sq, n, ln_fact).exp()
            };
            Complex64::new(p, 0.0)
        })
        .collect();
    PureState::normalized(amplitudes)
}

/// Coherent state truncated at the smallest `n_max` meeting the default tail tolerance.
pub fn coherent_state(alpha_sq: f64) -> Result<PureState> {
    if !(alpha_sq >= 0.0 && alpha_sq.is_finite()) {
        return Err(Error::invalid("alpha_sq", "must be non-negative and finite", alpha_sq));
    }
    coherent_state_populations(alpha_sq, required_n_max(alpha_sq, COHERENT_TAIL))
}
