//! QND coupling to a bath of two-level systems,
//! `H = H_S + Σ_k ω_k σ_zk + H_S Σ_k C_k σ_xk`.
//!
//! For bath states diagonal in the `σ_z` product basis with `⟨σ_zk⟩ = 0`
//! (the maximally mixed state in particular) the reduced coherences are
//! multiplied by a product of single-mode overlaps that carries no
//! temperature or squeezing parameter. For other diagonal bath states the
//! same holds between levels with `E_n² = E_m²`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix};
use crate::qnd::{DensityMatrix, SystemSpectrum};

/// One bath spin with splitting `omega` and coupling `coupling` (so that
/// `E·coupling` is a frequency).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpinMode {
    pub omega: f64,
    pub coupling: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpinBathSpec {
    modes: Vec<SpinMode>,
}

impl SpinBathSpec {
    pub fn new(modes: Vec<SpinMode>) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::Validation("spin bath needs at least one mode".into()));
        }
        for m in &modes {
            if !(m.omega > 0.0 && m.omega.is_finite()) {
                return Err(Error::invalid("omega_k", "must be positive and finite", m.omega));
            }
            if !m.coupling.is_finite() {
                return Err(Error::invalid("C_k", "must be finite", m.coupling));
            }
        }
        Ok(Self { modes })
    }

    pub fn modes(&self) -> &[SpinMode] {
        &self.modes
    }
}

/// `ω'_k(E) = √(ω_k² + E²C_k²)`.
pub fn omega_prime(energy: f64, mode_index: usize, spec: &SpinBathSpec) -> Result<f64> {
    let m = spec.modes.get(mode_index).ok_or_else(|| {
        Error::Validation(format!(
            "mode index {mode_index} out of range for {} modes",
            spec.modes.len()
        ))
    })?;
    Ok(m.omega.hypot(energy * m.coupling))
}

/// Overlap factor of one mode between levels `e_n` and `e_m`.
pub fn mode_factor(t: f64, e_n: f64, e_m: f64, mode: SpinMode) -> f64 {
    let wn = mode.omega.hypot(e_n * mode.coupling);
    let wm = mode.omega.hypot(e_m * mode.coupling);
    let overlap = (mode.omega * mode.omega + e_m * e_n * mode.coupling * mode.coupling) / (wm * wn);
    (wm * t).cos() * (wn * t).cos() + (wm * t).sin() * (wn * t).sin() * overlap
}

/// Product of mode factors, accumulated left to right.
pub fn coherence_factor(t: f64, e_n: f64, e_m: f64, spec: &SpinBathSpec) -> f64 {
    spec.modes.iter().fold(1.0, |acc, &m| acc * mode_factor(t, e_n, e_m, m))
}

pub fn reduced_density_spin_bath(
    rho0: &DensityMatrix,
    t: f64,
    spec: &SpinBathSpec,
    spectrum: &SystemSpectrum,
) -> Result<DensityMatrix> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::invalid("t", "must be non-negative and finite", t));
    }
    if rho0.dimension() != spectrum.dimension() {
        return Err(Error::Validation(format!(
            "density matrix dimension {} does not match spectrum dimension {}",
            rho0.dimension(),
            spectrum.dimension()
        )));
    }
    let e = spectrum.energies();
    let rho = rho0.matrix();
    Ok(DensityMatrix::from_trusted(CMatrix::from_fn(
        rho.nrows(),
        rho.ncols(),
        |n, m| {
            if n == m {
                return rho[(n, n)];
            }
            let phase = Complex64::from_polar(1.0, -(e[n] - e[m]) * t);
            phase * coherence_factor(t, e[n], e[m], spec) * rho[(n, m)]
        },
    )))
}

/// Initial bath state, always diagonal in the `σ_z` product basis.
#[derive(Clone, Debug, PartialEq)]
pub enum SpinBathState {
    /// Every spin down (`σ_z = -1`), the ground state of `Σ ω_k σ_zk`.
    Ground,
    MaximallyMixed,
    /// Probability of spin up for each mode.
    Diagonal(Vec<f64>),
}

impl SpinBathState {
    fn single_mode(&self, k: usize) -> Result<CMatrix> {
        let p_up = match self {
            SpinBathState::Ground => 0.0,
            SpinBathState::MaximallyMixed => 0.5,
            SpinBathState::Diagonal(p) => *p.get(k).ok_or_else(|| {
                Error::Validation("diagonal bath state has fewer entries than modes".into())
            })?,
        };
        if !(0.0..=1.0).contains(&p_up) {
            return Err(Error::invalid("spin-up probability", "must lie in [0, 1]", p_up));
        }
        Ok(CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            c(p_up, 0.0),
            c(1.0 - p_up, 0.0),
        ])))
    }
}

fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)])
}

fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)])
}

/// Embed a single-spin operator at position `k` among `count` spins.
fn embed(op: &CMatrix, k: usize, count: usize) -> CMatrix {
    let id = CMatrix::identity(2, 2);
    (0..count).fold(CMatrix::identity(1, 1), |acc, j| {
        linalg::kron(&acc, if j == k { op } else { &id })
    })
}

/// Exact evolution of system ⊗ spins under the full Hamiltonian, traced
/// over the spins.
pub fn exact_spin_bath_evolution(
    rho0: &DensityMatrix,
    t: f64,
    spec: &SpinBathSpec,
    spectrum: &SystemSpectrum,
    bath_state: &SpinBathState,
) -> Result<DensityMatrix> {
    let k = spec.modes.len();
    if k > 10 {
        return Err(Error::DimensionCap {
            dimension: spectrum.dimension() << k,
            cap: spectrum.dimension() << 10,
        });
    }
    let n = spectrum.dimension();
    let dim_b = 1usize << k;
    let h_s = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        n,
        spectrum.energies().iter().map(|&e| c(e, 0.0)),
    ));
    let mut h_free = CMatrix::zeros(dim_b, dim_b);
    let mut h_coupling = CMatrix::zeros(dim_b, dim_b);
    let mut rho_b = CMatrix::identity(1, 1);
    for (j, m) in spec.modes.iter().enumerate() {
        h_free += embed(&pauli_z(), j, k) * c(m.omega, 0.0);
        h_coupling += embed(&pauli_x(), j, k) * c(m.coupling, 0.0);
        rho_b = linalg::kron(&rho_b, &bath_state.single_mode(j)?);
    }
    let h = linalg::kron(&h_s, &CMatrix::identity(dim_b, dim_b))
        + linalg::kron(&CMatrix::identity(n, n), &h_free)
        + linalg::kron(&h_s, &h_coupling);
    let u = linalg::unitary_propagator(&h, t);
    let joint = linalg::kron(rho0.matrix(), &rho_b);
    let evolved = &u * joint * u.adjoint();
    Ok(DensityMatrix::from_trusted(linalg::partial_trace_second(&evolved, n, dim_b)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(omega: f64, coupling: f64) -> SpinBathSpec {
        SpinBathSpec::new(vec![SpinMode { omega, coupling }]).unwrap()
    }

    fn qubit_rho() -> DensityMatrix {
        DensityMatrix::new(CMatrix::from_row_slice(
            2,
            2,
            &[c(0.6, 0.0), c(0.3, 0.35), c(0.3, -0.35), c(0.4, 0.0)],
        ))
        .unwrap()
    }

    #[test]
    fn omega_prime_cases() {
        assert_eq!(omega_prime(0.0, 0, &single(3.0, 1.0)).unwrap(), 3.0);
        assert_eq!(omega_prime(2.0, 0, &single(3.0, 0.0)).unwrap(), 3.0);
        assert_eq!(omega_prime(4.0, 0, &single(3.0, 1.0)).unwrap(), 5.0);
        assert!(omega_prime(1.0, 1, &single(3.0, 1.0)).is_err());
    }

    #[test]
    fn uncoupled_bath_gives_free_phases() {
        let spec = single(1.0, 0.0);
        let spectrum = SystemSpectrum::two_level(1.3).unwrap();
        let t = 0.9;
        let rho = reduced_density_spin_bath(&qubit_rho(), t, &spec, &spectrum).unwrap();
        let want = Complex64::from_polar(1.0, -1.3 * t) * qubit_rho().matrix()[(0, 1)];
        assert!((rho.matrix()[(0, 1)] - want).norm() < 1e-15);
    }

    #[test]
    fn matches_exact_evolution_for_symmetric_spectrum() {
        let spec = single(1.0, 0.5);
        let spectrum = SystemSpectrum::two_level(1.0).unwrap();
        for t in [0.5, 1.0, 2.0] {
            let formula = reduced_density_spin_bath(&qubit_rho(), t, &spec, &spectrum).unwrap();
            for state in [SpinBathState::Ground, SpinBathState::MaximallyMixed] {
                let exact = exact_spin_bath_evolution(&qubit_rho(), t, &spec, &spectrum, &state).unwrap();
                let dev = linalg::max_abs_diff(formula.matrix(), exact.matrix());
                assert!(dev < 1e-12, "t={t} {state:?}: {dev}");
            }
        }
    }

    #[test]
    fn maximally_mixed_bath_matches_for_any_spectrum() {
        let spec = SpinBathSpec::new(vec![
            SpinMode { omega: 1.0, coupling: 0.5 },
            SpinMode { omega: 0.7, coupling: -0.3 },
        ])
        .unwrap();
        let spectrum = SystemSpectrum::new(vec![1.0, -0.3]).unwrap();
        let formula = reduced_density_spin_bath(&qubit_rho(), 1.7, &spec, &spectrum).unwrap();
        let exact =
            exact_spin_bath_evolution(&qubit_rho(), 1.7, &spec, &spectrum, &SpinBathState::MaximallyMixed)
                .unwrap();
        assert!(linalg::max_abs_diff(formula.matrix(), exact.matrix()) < 1e-12);
    }

    #[test]
    fn revival_at_commensurate_time() {
        // ω'(4) = 5 and ω'(0) = 3 are both odd multiples of 1, so t = π revives
        let spec = single(3.0, 1.0);
        let f = coherence_factor(std::f64::consts::PI, 4.0, 0.0, &spec);
        assert!((f.abs() - 1.0).abs() < 1e-14);
        assert!(coherence_factor(1.0, 4.0, 0.0, &spec).abs() < 1.0);
    }

    #[test]
    fn factor_is_bounded() {
        let spec = single(0.8, 1.7);
        for i in 0..500 {
            let t = i as f64 * 0.037;
            assert!(coherence_factor(t, 1.3, -0.4, &spec).abs() <= 1.0 + 1e-15);
        }
    }
}
