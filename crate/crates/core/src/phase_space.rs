//! Husimi Q-function of the QND harmonic oscillator.
//!
//! `Q(α) = ⟨α|ρ|α⟩/π` on a polar grid `α = ξe^{iθ}`. Under the QND master
//! equation it obeys
//!
//! `∂_t Q = ω ∂_θ Q - ω²η̇ [(1 + 2ξ²)∂_θ + ξ ∂²_{ξθ}] Q + ω²γ̇ ∂²_θ Q`
//!
//! which [`q_pde_residual`] checks by finite differences. The long-time
//! solutions treat `θ` as an unrestricted real variable; they are not
//! periodic, unlike Q-functions computed from a density matrix.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::bath::{self, BathSpec};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;

/// Largest top-level population accepted as a truncation tail.
pub const TAIL_TOLERANCE: f64 = 1e-10;

/// Uniform polar grid `ξ_i = ξ_max i/(n_ξ-1)`, `θ_j = 2πj/n_θ`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    pub xi_max: f64,
    pub n_xi: usize,
    pub n_theta: usize,
}

impl GridSpec {
    /// `ξ_max = |α| + 6` with 64 × 64 points.
    pub fn for_coherent(alpha_sq: f64) -> Self {
        Self {
            xi_max: alpha_sq.sqrt() + 6.0,
            n_xi: 64,
            n_theta: 64,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.xi_max > 0.0 && self.xi_max.is_finite()) {
            return Err(Error::invalid("xi_max", "must be positive and finite", self.xi_max));
        }
        if self.n_xi < 3 || self.n_theta < 4 {
            return Err(Error::Validation(format!(
                "Q grid needs at least 3 radial and 4 angular points (got {} x {})",
                self.n_xi, self.n_theta
            )));
        }
        Ok(())
    }

    pub fn xi(&self) -> Vec<f64> {
        (0..self.n_xi)
            .map(|i| self.xi_max * i as f64 / (self.n_xi - 1) as f64)
            .collect()
    }

    pub fn theta(&self) -> Vec<f64> {
        (0..self.n_theta)
            .map(|j| 2.0 * PI * j as f64 / self.n_theta as f64)
            .collect()
    }
}

/// Q-function samples, row-major in `(ξ, θ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct QGrid {
    pub xi: Vec<f64>,
    pub theta: Vec<f64>,
    pub values: Vec<f64>,
}

impl QGrid {
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.theta.len() + j]
    }

    fn d_xi(&self) -> f64 {
        self.xi[1] - self.xi[0]
    }

    fn d_theta(&self) -> f64 {
        2.0 * PI / self.theta.len() as f64
    }

    /// `∫ Q dθ` at each `ξ` (periodic trapezoid rule).
    pub fn radial_marginal(&self) -> Vec<f64> {
        let n = self.theta.len();
        let h = self.d_theta();
        (0..self.xi.len())
            .map(|i| self.values[i * n..(i + 1) * n].iter().sum::<f64>() * h)
            .collect()
    }

    /// `∬ Q ξ dξ dθ`: periodic trapezoid in `θ`, Simpson in `ξ`.
    pub fn normalization(&self) -> f64 {
        let f: Vec<f64> = self
            .radial_marginal()
            .iter()
            .zip(&self.xi)
            .map(|(m, x)| m * x)
            .collect();
        simpson(&f, self.d_xi())
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Composite Simpson on uniform samples; an odd number of intervals ends
/// with a three-eighths panel.
pub fn simpson(f: &[f64], h: f64) -> f64 {
    let n = f.len();
    match n {
        0 | 1 => 0.0,
        2 => 0.5 * h * (f[0] + f[1]),
        3 => h / 3.0 * (f[0] + 4.0 * f[1] + f[2]),
        _ => {
            let intervals = n - 1;
            let even_end = if intervals.is_multiple_of(2) { n - 1 } else { n - 4 };
            let mut s = 0.0;
            let mut i = 0;
            while i < even_end {
                s += h / 3.0 * (f[i] + 4.0 * f[i + 1] + f[i + 2]);
                i += 2;
            }
            if even_end != n - 1 {
                let k = even_end;
                s += 3.0 * h / 8.0 * (f[k] + 3.0 * f[k + 1] + 3.0 * f[k + 2] + f[k + 3]);
            }
            s
        }
    }
}

/// `Q(ξ, θ) = (1/π) Σ_{nm} ρ_nm ⟨α|n⟩⟨m|α⟩` for a Fock-basis density matrix.
pub fn q_from_density(rho: &CMatrix, grid: &GridSpec) -> Result<QGrid> {
    grid.validate()?;
    if !rho.is_square() || rho.nrows() < 2 {
        return Err(Error::Validation("Fock density matrix must be square with dimension >= 2".into()));
    }
    let d = rho.nrows();
    let top = rho[(d - 1, d - 1)].re;
    if top > TAIL_TOLERANCE {
        return Err(Error::Truncation {
            defect: top,
            tolerance: TAIL_TOLERANCE,
            required: None,
        });
    }
    let xi = grid.xi();
    let theta = grid.theta();
    let nt = theta.len();

    let rows: Vec<Vec<f64>> = xi
        .par_iter()
        .map(|&x| {
            // ⟨n|α⟩ modulus e^{-ξ²/2} ξⁿ/√n!, built by recurrence
            let mut amp = Vec::with_capacity(d);
            let mut a = (-0.5 * x * x).exp();
            amp.push(a);
            for n in 1..d {
                a *= x / (n as f64).sqrt();
                amp.push(a);
            }
            // f_k = Σ_{n-m=k} ρ_nm a_n a_m; Q = (f_0 + 2 Re Σ_{k>0} f_k e^{-ikθ})/π
            let f: Vec<num_complex::Complex64> = (0..d)
                .map(|k| (k..d).map(|n| rho[(n, n - k)] * (amp[n] * amp[n - k])).sum())
                .collect();
            theta
                .iter()
                .map(|&th| {
                    let mut q = f[0].re;
                    for (k, fk) in f.iter().enumerate().skip(1) {
                        q += 2.0 * (fk * num_complex::Complex64::from_polar(1.0, -(k as f64) * th)).re;
                    }
                    q / PI
                })
                .collect()
        })
        .collect();

    let mut values = Vec::with_capacity(xi.len() * nt);
    for r in rows {
        values.extend(r);
    }
    Ok(QGrid { xi, theta, values })
}

/// Pointwise residual of the Q-function PDE at the middle snapshots.
#[derive(Clone, Debug)]
pub struct PdeResidual {
    /// One field per interior snapshot, row-major over interior `ξ` and all `θ`.
    pub fields: Vec<Vec<f64>>,
    /// `‖residual‖ / max_term ‖term‖` in the `ξ`-weighted L2 norm.
    pub relative_norm: f64,
}

/// Check `q_series` (snapshots at `t0 + k·dt`) against the QND Q-equation.
pub fn q_pde_residual(q_series: &[QGrid], t0: f64, dt: f64, spec: &BathSpec, omega: f64) -> Result<PdeResidual> {
    if q_series.len() < 3 {
        return Err(Error::Validation(format!(
            "PDE residual needs at least 3 snapshots (got {})",
            q_series.len()
        )));
    }
    if !(dt > 0.0) {
        return Err(Error::invalid("dt", "must be positive", dt));
    }
    let first = &q_series[0];
    if q_series
        .iter()
        .any(|q| q.xi != first.xi || q.theta != first.theta)
    {
        return Err(Error::Validation("all snapshots must share one grid".into()));
    }
    let nx = first.xi.len();
    let nt = first.theta.len();
    let hx = first.d_xi();
    let ht = first.d_theta();
    let w2 = omega * omega;

    let mut fields = Vec::new();
    let mut res_sq = 0.0;
    let mut term_sq = [0.0f64; 4];
    for k in 1..q_series.len() - 1 {
        let t = t0 + k as f64 * dt;
        let eta_dot = bath::eta_dot(t, spec)?;
        let gamma_dot = bath::gamma_dot(t, spec)?;
        let (prev, now, next) = (&q_series[k - 1], &q_series[k], &q_series[k + 1]);
        let mut field = Vec::with_capacity((nx - 2) * nt);
        for i in 1..nx - 1 {
            let x = first.xi[i];
            for j in 0..nt {
                let jp = (j + 1) % nt;
                let jm = (j + nt - 1) % nt;
                let q_t = (next.at(i, j) - prev.at(i, j)) / (2.0 * dt);
                let q_th = (now.at(i, jp) - now.at(i, jm)) / (2.0 * ht);
                let q_thth = (now.at(i, jp) - 2.0 * now.at(i, j) + now.at(i, jm)) / (ht * ht);
                let q_xith = (now.at(i + 1, jp) - now.at(i + 1, jm) - now.at(i - 1, jp) + now.at(i - 1, jm))
                    / (4.0 * hx * ht);
                let drift = omega * q_th;
                let kerr = -w2 * eta_dot * ((1.0 + 2.0 * x * x) * q_th + x * q_xith);
                let diffusion = w2 * gamma_dot * q_thth;
                let r = q_t - drift - kerr - diffusion;
                field.push(r);
                res_sq += x * r * r;
                for (acc, v) in term_sq.iter_mut().zip([q_t, drift, kerr, diffusion]) {
                    *acc += x * v * v;
                }
            }
        }
        fields.push(field);
    }
    let scale = term_sq.iter().copied().fold(0.0, f64::max).sqrt();
    let relative_norm = if scale > 0.0 { res_sq.sqrt() / scale } else { res_sq.sqrt() };
    Ok(PdeResidual { fields, relative_norm })
}

/// Zero-temperature long-time solution `e^{-λt} e^{-λθ/ω}` of `∂_t Q = ω ∂_θ Q`.
pub fn longtime_solution_t0(theta: f64, t: f64, lambda: f64, omega: f64) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::invalid("omega", "must be positive", omega));
    }
    Ok((-lambda * t - lambda * theta / omega).exp())
}

/// Residual of `∂_t Q = ω ∂_θ Q` for the zero-temperature solution, from
/// its analytic derivatives, relative to the largest term.
pub fn longtime_residual_t0(theta: f64, t: f64, lambda: f64, omega: f64) -> Result<f64> {
    let q = longtime_solution_t0(theta, t, lambda, omega)?;
    let q_t = -lambda * q;
    let drift = omega * (-lambda / omega * q);
    Ok(relative(q_t - drift, &[q_t, drift]))
}

fn relative(residual: f64, terms: &[f64]) -> f64 {
    let scale = terms.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        residual.abs()
    } else {
        residual.abs() / scale
    }
}

/// Constants of the high-temperature solution
/// `e^{-αt} e^{-Aθ}(c₁e^{Bθ} + c₂e^{-Bθ})` of `∂_t Q = ω ∂_θ Q + A₁ ∂²_θ Q`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiffusionSolutionParams {
    pub omega: f64,
    pub a1: f64,
    pub alpha_sep: f64,
    pub c1: f64,
    pub c2: f64,
    /// `ω/(2A₁)`.
    pub a: f64,
    /// `A √(1 - 4αA₁/ω²)`.
    pub b: f64,
}

impl DiffusionSolutionParams {
    pub fn new(omega: f64, a1: f64, alpha_sep: f64, c1: f64, c2: f64) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::invalid("omega", "must be positive and finite", omega));
        }
        if !(a1 > 0.0 && a1.is_finite()) {
            return Err(Error::invalid("A1", "must be positive and finite", a1));
        }
        let bound = omega * omega / (4.0 * a1);
        if !(alpha_sep <= bound) {
            return Err(Error::ComplexExponent {
                alpha: alpha_sep,
                bound,
            });
        }
        let a = omega / (2.0 * a1);
        Ok(Self {
            omega,
            a1,
            alpha_sep,
            c1,
            c2,
            a,
            b: a * (1.0 - 4.0 * alpha_sep * a1 / (omega * omega)).sqrt(),
        })
    }

    /// Diffusion constant `A₁ = ω² γ₀ T cosh 2r` taken from the bath.
    pub fn from_bath(spec: &BathSpec, omega: f64, alpha_sep: f64, c1: f64, c2: f64) -> Result<Self> {
        Self::new(omega, diffusion_coefficient(spec, omega), alpha_sep, c1, c2)
    }
}

/// `A₁ = ω² γ̇(∞)` in the high-temperature limit.
pub fn diffusion_coefficient(spec: &BathSpec, omega: f64) -> f64 {
    omega * omega * bath::high_t_decoherence_rate(spec)
}

pub fn longtime_solution_high_t(theta: f64, t: f64, p: &DiffusionSolutionParams) -> f64 {
    (-p.alpha_sep * t).exp()
        * (p.c1 * ((p.b - p.a) * theta).exp() + p.c2 * (-(p.a + p.b) * theta).exp())
}

/// Residual of `∂_t Q = ω ∂_θ Q + A₁ ∂²_θ Q` from the analytic derivatives,
/// relative to the largest term.
pub fn longtime_residual_high_t(theta: f64, t: f64, p: &DiffusionSolutionParams) -> f64 {
    let decay = (-p.alpha_sep * t).exp();
    let (k1, k2) = (p.b - p.a, -(p.a + p.b));
    let (e1, e2) = (p.c1 * (k1 * theta).exp(), p.c2 * (k2 * theta).exp());
    let q = decay * (e1 + e2);
    let q_t = -p.alpha_sep * q;
    let drift = p.omega * decay * (k1 * e1 + k2 * e2);
    let diffusion = p.a1 * decay * (k1 * k1 * e1 + k2 * k2 * e2);
    relative(q_t - drift - diffusion, &[q_t, drift, diffusion])
}
