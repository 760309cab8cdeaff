//! Truncated Fock-space operators for a single bosonic mode.
//!
//! Matrices have dimension `n_max + 1`. Operators defined by exponentials
//! (squeeze, displacement) are built in a larger padded space and then cut
//! back, so the kept block is free of the truncation edge.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix};

/// Minimum truncation accepted by the composite oracle.
pub const MIN_N_MAX: usize = 4;
/// Largest trace deficit of a truncated mode state before it is rejected.
pub const TRUNCATION_TOLERANCE: f64 = 1e-6;

/// Annihilation operator `b` with `b|n⟩ = √n |n-1⟩`.
pub fn annihilation(n_max: usize) -> CMatrix {
    let d = n_max + 1;
    let mut b = CMatrix::zeros(d, d);
    for n in 1..d {
        b[(n - 1, n)] = c((n as f64).sqrt(), 0.0);
    }
    b
}

pub fn creation(n_max: usize) -> CMatrix {
    annihilation(n_max).adjoint()
}

pub fn number(n_max: usize) -> CMatrix {
    CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        n_max + 1,
        (0..=n_max).map(|n| c(n as f64, 0.0)),
    ))
}

fn padded(n_max: usize) -> usize {
    2 * n_max + 40
}

fn top_left(m: &CMatrix, d: usize) -> CMatrix {
    m.view((0, 0), (d, d)).into_owned()
}

/// `S(r, Φ) = exp[(r/2)(e^{-2iΦ} b² - e^{2iΦ} b†²)]` at dimension `n_max + 1`.
pub fn squeeze_operator(r: f64, phi: f64, n_max: usize) -> CMatrix {
    top_left(&squeeze_exact_dim(r, phi, padded(n_max)), n_max + 1)
}

/// Squeeze operator exponentiated directly in dimension `n_max + 1`.
fn squeeze_exact_dim(r: f64, phi: f64, n_max: usize) -> CMatrix {
    let b = annihilation(n_max);
    let bd = b.adjoint();
    let g = (&b * &b) * Complex64::from_polar(0.5 * r, -2.0 * phi)
        - (&bd * &bd) * Complex64::from_polar(0.5 * r, 2.0 * phi);
    linalg::expm_anti_hermitian(&g)
}

/// `D(α) = exp(α b† - α* b)` at dimension `n_max + 1`.
pub fn displacement_matrix(alpha: Complex64, n_max: usize) -> Result<CMatrix> {
    let big = padded(n_max);
    let b = annihilation(big);
    let gen = b.adjoint() * alpha - &b * alpha.conj();
    let d = top_left(&linalg::expm_anti_hermitian(&gen), n_max + 1);
    let defect = unitarity_defect(&d, n_max.div_ceil(2));
    if defect > TRUNCATION_TOLERANCE {
        return Err(Error::Truncation {
            defect,
            tolerance: TRUNCATION_TOLERANCE,
            required: None,
        });
    }
    Ok(d)
}

/// Advisory message when `|α|²` is large for the truncation.
pub fn displacement_warning(alpha: Complex64, n_max: usize) -> Option<String> {
    (alpha.norm_sqr() > n_max as f64 / 8.0).then(|| {
        format!(
            "|alpha|^2 = {:.3} exceeds n_max/8 = {:.3}; truncation error may be significant",
            alpha.norm_sqr(),
            n_max as f64 / 8.0
        )
    })
}

/// Largest deviation of `D†D` from the identity on the first `k` basis states.
fn unitarity_defect(d: &CMatrix, k: usize) -> f64 {
    let dd = d.adjoint() * d;
    let mut worst: f64 = 0.0;
    for i in 0..k {
        for j in 0..k {
            let want = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((dd[(i, j)] - c(want, 0.0)).norm());
        }
    }
    worst
}

/// Planck occupation `1/(e^{ω/T} - 1)`, zero at `T = 0`.
pub fn planck(omega: f64, temperature: f64) -> f64 {
    if temperature == 0.0 {
        0.0
    } else {
        1.0 / (omega / temperature).exp_m1()
    }
}

/// Thermal populations `(1 - q) qⁿ`, `q = e^{-ω/T}`, for `n < dim`.
fn thermal_populations(omega: f64, temperature: f64, dim: usize) -> Vec<f64> {
    if temperature == 0.0 {
        let mut p = vec![0.0; dim];
        p[0] = 1.0;
        return p;
    }
    let q = (-omega / temperature).exp();
    let mut w = -(-omega / temperature).exp_m1();
    (0..dim)
        .map(|_| {
            let v = w;
            w *= q;
            v
        })
        .collect()
}

/// Squeezed thermal state of one mode after truncation and renormalisation.
#[derive(Clone, Debug)]
pub struct TruncatedState {
    pub rho: CMatrix,
    /// `1 - Tr` of the truncated state before renormalisation.
    pub defect: f64,
}

/// `S(r, Φ) ρ_th S†(r, Φ)` truncated at `n_max`.
pub fn squeezed_thermal_mode(omega: f64, r: f64, phi: f64, temperature: f64, n_max: usize) -> Result<TruncatedState> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::invalid("omega_k", "must be positive and finite", omega));
    }
    if !(temperature >= 0.0 && temperature.is_finite()) {
        return Err(Error::invalid("T", "must be non-negative and finite", temperature));
    }
    if n_max < MIN_N_MAX {
        return Err(Error::invalid("n_max", "must be at least 4", n_max as f64));
    }
    let big = padded(n_max);
    let pops = thermal_populations(omega, temperature, big + 1);
    let rho_th = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        big + 1,
        pops.iter().map(|&p| c(p, 0.0)),
    ));
    let rho = if r == 0.0 {
        rho_th
    } else {
        let s = squeeze_exact_dim(r, phi, big);
        &s * rho_th * s.adjoint()
    };
    let mut kept = top_left(&rho, n_max + 1);
    let trace = kept.trace().re;
    let defect = 1.0 - trace;
    if defect > TRUNCATION_TOLERANCE {
        return Err(Error::Truncation {
            defect,
            tolerance: TRUNCATION_TOLERANCE,
            required: None,
        });
    }
    kept /= c(trace, 0.0);
    Ok(TruncatedState { rho: kept, defect })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn interior_diff(a: &CMatrix, b: &CMatrix, k: usize) -> f64 {
        linalg::max_abs_diff(&top_left(a, k), &top_left(b, k))
    }

    #[test]
    fn commutator_is_identity_except_last_state() {
        let n = 10;
        let b = annihilation(n);
        let comm = &b * b.adjoint() - b.adjoint() * &b;
        assert!(interior_diff(&comm, &CMatrix::identity(n + 1, n + 1), n) < 1e-14);
        assert!((comm[(n, n)] - c(-(n as f64), 0.0)).norm() < 1e-12);
    }

    #[test]
    fn vacuum_and_thermal_states() {
        let vac = squeezed_thermal_mode(1.0, 0.0, 0.0, 0.0, 10).unwrap();
        assert_eq!(vac.rho[(0, 0)], c(1.0, 0.0));
        assert_eq!(vac.defect, 0.0);
        let th = squeezed_thermal_mode(1.0, 0.0, 0.0, 2.0, 60).unwrap();
        let mean = (number(60) * &th.rho).trace().re;
        assert!((mean - planck(1.0, 2.0)).abs() < 1e-9);
    }

    #[test]
    fn squeezed_vacuum_photon_number() {
        let st = squeezed_thermal_mode(1.0, 0.5, 0.3, 0.0, 40).unwrap();
        let mean = (number(40) * &st.rho).trace().re;
        assert!((mean - 0.5f64.sinh().powi(2)).abs() < 1e-8);
        assert!(st.defect < 1e-8);
    }

    #[test]
    fn truncation_defect_is_reported() {
        assert!(matches!(
            squeezed_thermal_mode(1.0, 0.0, 0.0, 20.0, 10),
            Err(Error::Truncation { .. })
        ));
    }

    #[test]
    fn displacement_of_vacuum_is_coherent_state() {
        let alpha = c(0.8, -0.5);
        let d = displacement_matrix(alpha, 30).unwrap();
        let mut fact = 1.0;
        for n in 0..=30 {
            if n > 0 {
                fact *= n as f64;
            }
            let want = (-0.5 * alpha.norm_sqr()).exp() * alpha.powu(n as u32) / fact.sqrt();
            assert!((d[(n, 0)] - want).norm() < 1e-8, "n={n}");
        }
        assert!(linalg::max_abs_diff(&displacement_matrix(c(0.0, 0.0), 8).unwrap(), &CMatrix::identity(9, 9)) < 1e-15);
    }

    #[test]
    fn free_rotation_of_displacement() {
        let (n, w, t) = (30, 1.3, 0.7);
        let alpha = c(0.6, 0.2);
        let rot = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            n + 1,
            (0..=n).map(|k| Complex64::from_polar(1.0, w * k as f64 * t)),
        ));
        let lhs = &rot * displacement_matrix(alpha, n).unwrap() * rot.adjoint();
        let rhs = displacement_matrix(alpha * Complex64::from_polar(1.0, w * t), n).unwrap();
        assert!(interior_diff(&lhs, &rhs, n / 2) < 1e-8);
    }

    #[test]
    fn squeeze_conjugates_displacement() {
        let (n, r, phi) = (30, 0.4, 0.35);
        let theta = c(0.5, 0.3);
        let s = squeeze_operator(r, phi, 2 * n);
        let d = displacement_matrix(theta, 2 * n).unwrap();
        let lhs = s.adjoint() * d * &s;
        let mapped = theta * r.cosh() + theta.conj() * r.sinh() * Complex64::from_polar(1.0, 2.0 * phi);
        let rhs = displacement_matrix(mapped, 2 * n).unwrap();
        assert!(interior_diff(&lhs, &rhs, n / 2) < 1e-7);
    }

    #[test]
    fn thermal_characteristic_function() {
        let (n, w, temp) = (60, 1.0, 0.8);
        let theta = c(0.4, -0.7);
        let th = squeezed_thermal_mode(w, 0.0, 0.0, temp, n).unwrap();
        let got = (&th.rho * displacement_matrix(theta, n).unwrap()).trace();
        let coth = 1.0 / (0.5 * w / temp).tanh();
        let want = (-0.5 * theta.norm_sqr() * coth).exp();
        assert!((got - c(want, 0.0)).norm() < 1e-8);
    }
}
