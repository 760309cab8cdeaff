//! Bloch-vector dynamics of a two-level atom with `H_S = ω J_z`.
//!
//! Basis order is `(|1⟩, |0⟩)`: index 0 is the upper level, so
//! `σ_z = diag(1, -1)`, `σ_+ = |1⟩⟨0|` and `⟨σ_x⟩ = 2 Re ρ₁₀`,
//! `⟨σ_y⟩ = 2 Im ρ₁₀` with `ρ₁₀` the lower-left entry.
//!
//! Two channels are provided: QND phase damping, which freezes `⟨σ_z⟩`
//! and spirals the transverse part onto the `z` axis, and the squeezed
//! thermal Lindblad equation (interaction picture), which contracts the
//! ball toward a point on the `z` axis.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::bath::{self, BathSpec};
use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix};

/// Initial pure state `cos(θ₀/2)|1⟩ + e^{iφ₀} sin(θ₀/2)|0⟩`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoLevelInitial {
    theta0: f64,
    phi0: f64,
}

impl TwoLevelInitial {
    pub fn new(theta0: f64, phi0: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta0) {
            return Err(Error::invalid("theta0", "must lie in [0, pi]", theta0));
        }
        if !(0.0..2.0 * PI).contains(&phi0) {
            return Err(Error::invalid("phi0", "must lie in [0, 2pi)", phi0));
        }
        Ok(Self { theta0, phi0 })
    }

    pub fn theta0(&self) -> f64 {
        self.theta0
    }

    pub fn phi0(&self) -> f64 {
        self.phi0
    }

    pub fn bloch(&self) -> BlochVector {
        let s = self.theta0.sin();
        BlochVector {
            sx: s * self.phi0.cos(),
            sy: s * self.phi0.sin(),
            sz: self.theta0.cos(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochVector {
    pub sx: f64,
    pub sy: f64,
    pub sz: f64,
}

impl BlochVector {
    pub fn norm(&self) -> f64 {
        (self.sx * self.sx + self.sy * self.sy + self.sz * self.sz).sqrt()
    }

    /// `½(I + s·σ)`.
    pub fn density(&self) -> CMatrix {
        CMatrix::from_row_slice(
            2,
            2,
            &[
                c(0.5 * (1.0 + self.sz), 0.0),
                c(0.5 * self.sx, -0.5 * self.sy),
                c(0.5 * self.sx, 0.5 * self.sy),
                c(0.5 * (1.0 - self.sz), 0.0),
            ],
        )
    }

    pub fn from_density(rho: &CMatrix) -> Self {
        let lower = rho[(1, 0)];
        Self {
            sx: 2.0 * lower.re,
            sy: 2.0 * lower.im,
            sz: (rho[(0, 0)] - rho[(1, 1)]).re,
        }
    }

    pub fn max_abs_diff(&self, other: &BlochVector) -> f64 {
        (self.sx - other.sx)
            .abs()
            .max((self.sy - other.sy).abs())
            .max((self.sz - other.sz).abs())
    }
}

/// QND evolution: transverse components rotate at `ω` and shrink by
/// `e^{-ω²γ(t)}`; `⟨σ_z⟩` is untouched.
pub fn qnd_bloch(t: f64, init: TwoLevelInitial, spec: &BathSpec, omega: f64) -> Result<BlochVector> {
    let gamma = bath::gamma(t, spec)?;
    Ok(qnd_bloch_with_gamma(t, init, omega, gamma))
}

fn qnd_bloch_with_gamma(t: f64, init: TwoLevelInitial, omega: f64, gamma: f64) -> BlochVector {
    let radius = init.theta0.sin() * (-omega * omega * gamma).exp();
    let angle = omega * t + init.phi0;
    BlochVector {
        sx: radius * angle.cos(),
        sy: radius * angle.sin(),
        sz: init.theta0.cos(),
    }
}

/// Squeezed thermal bath constants of the Lindblad equation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LindbladParams {
    pub gamma0: f64,
    pub r: f64,
    pub phi: f64,
    pub omega: f64,
    pub temperature: f64,
    /// Planck occupation at `ω`.
    pub n_th: f64,
    pub n: f64,
    pub m: Complex64,
    /// `sinh 2r (2N_th + 1)`.
    pub a_sq: f64,
}

pub fn lindblad_params(gamma0: f64, r: f64, phi: f64, omega: f64, temperature: f64) -> Result<LindbladParams> {
    if !(gamma0 > 0.0 && gamma0.is_finite()) {
        return Err(Error::invalid("gamma0", "must be positive and finite", gamma0));
    }
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::invalid("omega", "must be positive and finite", omega));
    }
    if !(temperature >= 0.0 && temperature.is_finite()) {
        return Err(Error::invalid("T", "must be non-negative and finite", temperature));
    }
    if !r.is_finite() {
        return Err(Error::invalid("r", "must be finite", r));
    }
    if !phi.is_finite() {
        return Err(Error::invalid("Phi", "must be finite", phi));
    }
    let n_th = if temperature == 0.0 {
        0.0
    } else {
        1.0 / (omega / temperature).exp_m1()
    };
    let (ch, sh) = (r.cosh(), r.sinh());
    let n = n_th * (ch * ch + sh * sh) + sh * sh;
    let m = Complex64::from_polar(-0.5 * (2.0 * r).sinh() * (2.0 * n_th + 1.0), phi);
    Ok(LindbladParams {
        gamma0,
        r,
        phi,
        omega,
        temperature,
        n_th,
        n,
        m,
        a_sq: (2.0 * r).sinh() * (2.0 * n_th + 1.0),
    })
}

/// Closed-form interaction-picture Bloch vector.
pub fn lindblad_bloch(t: f64, init: TwoLevelInitial, params: &LindbladParams) -> BlochVector {
    lindblad_map(t, init.bloch(), params)
}

/// The Lindblad map applied to an arbitrary Bloch vector.
pub fn lindblad_map(t: f64, s0: BlochVector, p: &LindbladParams) -> BlochVector {
    let k = 2.0 * p.n + 1.0;
    let decay = (-0.5 * p.gamma0 * k * t).exp();
    let s = 0.5 * p.gamma0 * p.a_sq * t;
    let (ch, sh) = (s.cosh(), s.sinh());
    let (cos, sin) = (p.phi.cos(), p.phi.sin());
    let longitudinal = (-p.gamma0 * k * t).exp();
    BlochVector {
        sx: decay * ((ch + cos * sh) * s0.sx - sin * sh * s0.sy),
        sy: decay * ((ch - cos * sh) * s0.sy - sin * sh * s0.sx),
        sz: longitudinal * s0.sz + (-(p.gamma0 * k * t)).exp_m1() / k,
    }
}

/// Right-hand side of the squeezed-bath Lindblad equation.
pub fn lindblad_rhs(rho: &CMatrix, p: &LindbladParams) -> CMatrix {
    let sp = CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(0., 0.), c(0., 0.)]);
    let sm = sp.adjoint();
    let g = p.gamma0;
    let half = c(0.5, 0.0);
    let dissipator = |jump: &CMatrix, rate: f64| -> CMatrix {
        let jd = jump.adjoint();
        let jdj = &jd * jump;
        (jump * rho * &jd - (&jdj * rho) * half - (rho * &jdj) * half) * c(rate, 0.0)
    };
    dissipator(&sm, g * (p.n + 1.0)) + dissipator(&sp, g * p.n)
        - (&sp * rho * &sp) * (p.m * g)
        - (&sm * rho * &sm) * (p.m.conj() * g)
}

/// Fixed point `(0, 0, -1/(2N+1))` and lower-level population `p`.
pub fn asymptotic_state(params: &LindbladParams) -> (BlochVector, f64) {
    let k = 2.0 * params.n + 1.0;
    (
        BlochVector {
            sx: 0.0,
            sy: 0.0,
            sz: -1.0 / k,
        },
        0.5 * (1.0 + 1.0 / k),
    )
}

#[derive(Clone, Debug, PartialEq)]
pub enum Channel {
    Qnd { spec: BathSpec, omega: f64 },
    Lindblad(LindbladParams),
}

/// One cloud point: initial and evolved Bloch vectors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CloudPoint {
    pub initial: BlochVector,
    pub evolved: BlochVector,
}

/// Latitude–longitude grid of initial states, `θ_i = πi/(n_θ-1)`,
/// `φ_j = 2πj/n_φ`, in row-major `(i, j)` order.
pub fn bloch_grid(n_theta: usize, n_phi: usize) -> Result<Vec<TwoLevelInitial>> {
    if n_theta < 2 || n_phi < 2 {
        return Err(Error::Validation(format!(
            "bloch grid needs n_theta, n_phi >= 2 (got {n_theta}, {n_phi})"
        )));
    }
    let mut out = Vec::with_capacity(n_theta * n_phi);
    for i in 0..n_theta {
        let theta = (PI * i as f64 / (n_theta - 1) as f64).min(PI);
        for j in 0..n_phi {
            out.push(TwoLevelInitial::new(theta, 2.0 * PI * j as f64 / n_phi as f64)?);
        }
    }
    Ok(out)
}

pub fn bloch_cloud(channel: &Channel, t: f64, n_theta: usize, n_phi: usize) -> Result<Vec<CloudPoint>> {
    let grid = bloch_grid(n_theta, n_phi)?;
    match channel {
        Channel::Qnd { spec, omega } => {
            let gamma = bath::gamma(t, spec)?;
            Ok(grid
                .par_iter()
                .map(|init| CloudPoint {
                    initial: init.bloch(),
                    evolved: qnd_bloch_with_gamma(t, *init, *omega, gamma),
                })
                .collect())
        }
        Channel::Lindblad(p) => Ok(grid
            .par_iter()
            .map(|init| CloudPoint {
                initial: init.bloch(),
                evolved: lindblad_bloch(t, *init, p),
            })
            .collect()),
    }
}

/// Orientation in `[0, π)` of the major principal axis of the evolved
/// transverse components of a cloud.
pub fn transverse_principal_angle(cloud: &[CloudPoint]) -> f64 {
    let n = cloud.len() as f64;
    let mx = cloud.iter().map(|p| p.evolved.sx).sum::<f64>() / n;
    let my = cloud.iter().map(|p| p.evolved.sy).sum::<f64>() / n;
    let (mut cxx, mut cyy, mut cxy) = (0.0, 0.0, 0.0);
    for p in cloud {
        let (dx, dy) = (p.evolved.sx - mx, p.evolved.sy - my);
        cxx += dx * dx;
        cyy += dy * dy;
        cxy += dx * dy;
    }
    (0.5 * (2.0 * cxy).atan2(cxx - cyy)).rem_euclid(PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;
    use crate::oracle;

    fn fig5c() -> LindbladParams {
        lindblad_params(0.6, 0.4, 0.0, 1.0, 5.0).unwrap()
    }

    #[test]
    fn bloch_density_round_trip() {
        let init = TwoLevelInitial::new(1.1, 4.0).unwrap();
        let b = init.bloch();
        let back = BlochVector::from_density(&b.density());
        assert!(b.max_abs_diff(&back) < 1e-15);
        // the lower-left entry carries e^{+iφ}
        let rho = b.density();
        assert!((rho[(1, 0)].arg() - (4.0 - 2.0 * PI)).abs() < 1e-12);
    }

    #[test]
    fn qnd_pole_is_fixed_and_sz_invariant() {
        let spec = BathSpec::zero_temperature(0.2, 40.0, 0.5, 0.5).unwrap();
        let pole = qnd_bloch(20.0, TwoLevelInitial::new(0.0, 0.0).unwrap(), &spec, 1.0).unwrap();
        assert_eq!(pole, BlochVector { sx: 0.0, sy: 0.0, sz: 1.0 });
        let init = TwoLevelInitial::new(0.7, 1.0).unwrap();
        assert_eq!(qnd_bloch(20.0, init, &spec, 1.0).unwrap().sz, 0.7f64.cos());
    }

    #[test]
    fn params_limits() {
        let p = lindblad_params(0.6, 0.0, 0.0, 1.0, 5.0).unwrap();
        assert_eq!((p.n, p.m, p.a_sq), (p.n_th, c(0.0, 0.0), 0.0));
        let q = lindblad_params(0.6, 0.4, 1.0, 1.0, 0.0).unwrap();
        assert_eq!(q.n_th, 0.0);
        assert!((q.n - 0.4f64.sinh().powi(2)).abs() < 1e-15);
        assert!((q.m.norm() - 0.5 * 0.8f64.sinh()).abs() < 1e-15);
        // |M|² = N(N+1) at T = 0, strictly below otherwise
        assert!((q.m.norm_sqr() - q.n * (q.n + 1.0)).abs() < 1e-14);
        let hot = fig5c();
        assert!(hot.m.norm_sqr() < hot.n * (hot.n + 1.0));
    }

    #[test]
    fn closed_form_matches_rk4_of_master_equation() {
        for (r, phi, temp) in [(0.0, 0.0, 0.0), (0.4, 1.5, 5.0), (0.4, 0.0, 0.0)] {
            let p = lindblad_params(0.6, r, phi, 1.0, temp).unwrap();
            let init = TwoLevelInitial::new(1.2, 0.4).unwrap();
            let h = 1e-3;
            let steps = 2000;
            let rho = oracle::rk4(&init.bloch().density(), 0.0, h, steps, |_, rho| {
                Ok(lindblad_rhs(rho, &p))
            })
            .unwrap();
            let closed = lindblad_bloch(h * steps as f64, init, &p);
            let dev = closed.max_abs_diff(&BlochVector::from_density(&rho));
            assert!(dev < 1e-9, "r={r} phi={phi} T={temp}: {dev}");
        }
    }

    #[test]
    fn rhs_is_traceless_and_vanishes_at_fixed_point() {
        let p = lindblad_params(0.6, 0.0, 0.0, 1.0, 5.0).unwrap();
        let (fixed, pop) = asymptotic_state(&p);
        let rhs = lindblad_rhs(&fixed.density(), &p);
        assert!(max_abs_diff(&rhs, &CMatrix::zeros(2, 2)) < 1e-15);
        assert!((fixed.density()[(1, 1)].re - pop).abs() < 1e-15);
        let mixed = lindblad_rhs(&(CMatrix::identity(2, 2) * c(0.5, 0.0)), &p);
        let dsz = (mixed[(0, 0)] - mixed[(1, 1)]).re;
        assert!((dsz + 0.6).abs() < 1e-15);
        assert!(lindblad_rhs(&fixed.density(), &fig5c()).trace().norm() < 1e-15);
    }

    #[test]
    fn zero_temperature_collapses_to_ground() {
        let p = lindblad_params(0.6, 0.0, 0.0, 1.0, 0.0).unwrap();
        let b = lindblad_bloch(200.0, TwoLevelInitial::new(0.3, 0.0).unwrap(), &p);
        assert!(b.max_abs_diff(&BlochVector { sx: 0.0, sy: 0.0, sz: -1.0 }) < 1e-15);
        let (fixed, pop) = asymptotic_state(&p);
        assert_eq!((fixed.sz, pop), (-1.0, 1.0));
    }

    #[test]
    fn transverse_rates_split_by_squeezing() {
        let p = fig5c();
        let t = 0.5;
        // eigenvectors of the transverse map for Φ = 0 are the x and y axes
        let x = lindblad_map(t, BlochVector { sx: 1.0, sy: 0.0, sz: 0.0 }, &p).sx;
        let y = lindblad_map(t, BlochVector { sx: 0.0, sy: 1.0, sz: 0.0 }, &p).sy;
        let k = 2.0 * p.n + 1.0;
        assert!((-x.ln() / t - 0.6 * (k - p.a_sq) / 2.0).abs() < 1e-12);
        assert!((-y.ln() / t - 0.6 * (k + p.a_sq) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn cloud_tilt_follows_squeeze_phase() {
        let flat = bloch_cloud(&Channel::Lindblad(fig5c()), 0.15, 16, 16).unwrap();
        let tilted = lindblad_params(0.6, 0.4, 1.5, 1.0, 5.0).unwrap();
        let tilted = bloch_cloud(&Channel::Lindblad(tilted), 0.15, 16, 16).unwrap();
        let a0 = transverse_principal_angle(&flat);
        let a1 = transverse_principal_angle(&tilted);
        let diff = (a1 - a0).rem_euclid(PI);
        let diff = diff.min(PI - diff);
        assert!(a0.min(PI - a0) < 1e-9);
        assert!((diff - 0.75).abs() < 1e-6, "tilt {diff}");
    }

    #[test]
    fn cloud_order_is_row_major() {
        let spec = BathSpec::zero_temperature(0.2, 40.0, 0.0, 0.0).unwrap();
        let cloud = bloch_cloud(&Channel::Qnd { spec, omega: 1.0 }, 0.0, 3, 4).unwrap();
        assert_eq!(cloud.len(), 12);
        assert_eq!(cloud[0].initial.sz, 1.0);
        assert!((cloud[11].initial.sz + 1.0).abs() < 1e-15);
        for p in &cloud {
            assert!(p.initial.max_abs_diff(&p.evolved) < 1e-15);
        }
    }
}
