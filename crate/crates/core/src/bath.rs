//! Bath-induced kernels for an Ohmic squeezed thermal reservoir.
//!
//! With the Ohmic spectral density `I(ω) = (γ₀/π) ω e^{-ω/ω_c}` and the
//! squeezing parametrisation `r(ω) = r`, `Φ(ω) = aω`, the QND reduced
//! dynamics are governed by two real functions of time:
//!
//! * the phase kernel `η(t) = -(γ₀/π) arctan(ω_c t)`, independent of the
//!   bath state, and
//! * the decoherence exponent
//!   `γ(t) = ½ ∫₀^∞ dω I(ω)/ω² coth(βω/2) |(e^{iωt}-1) cosh r + (e^{-iωt}-1) sinh r e^{2iaω}|²`.
//!
//! `γ(t)` has closed forms in the zero- and high-temperature limits, valid
//! for `t > 2a`; [`TemperatureMode::Exact`] evaluates the integral directly.
//! Units are `ħ = k_B = 1` throughout.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::{self, Integral, Tolerance};

/// How `γ(t)` is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TemperatureMode {
    /// `T = 0` closed form.
    Zero,
    /// Closed form with `coth(βω/2) → 2/(βω)`.
    High,
    /// Direct quadrature with the full Planck factor.
    Exact,
}

impl TemperatureMode {
    pub fn name(self) -> &'static str {
        match self {
            TemperatureMode::Zero => "zero",
            TemperatureMode::High => "high",
            TemperatureMode::Exact => "exact",
        }
    }
}

impl std::str::FromStr for TemperatureMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero" => Ok(TemperatureMode::Zero),
            "high" => Ok(TemperatureMode::High),
            "exact" => Ok(TemperatureMode::Exact),
            other => Err(Error::Validation(format!(
                "unknown temperature mode '{other}' (expected zero, high or exact)"
            ))),
        }
    }
}

/// Ohmic squeezed-bath parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BathSpec {
    gamma0: f64,
    omega_c: f64,
    r: f64,
    a: f64,
    mode: TemperatureMode,
    temperature: f64,
}

impl BathSpec {
    pub fn new(
        gamma0: f64,
        omega_c: f64,
        r: f64,
        a: f64,
        mode: TemperatureMode,
        temperature: f64,
    ) -> Result<Self> {
        if !(gamma0 > 0.0 && gamma0.is_finite()) {
            return Err(Error::invalid("gamma0", "must be positive and finite", gamma0));
        }
        if !(omega_c > 0.0 && omega_c.is_finite()) {
            return Err(Error::invalid("omega_c", "must be positive and finite", omega_c));
        }
        if !r.is_finite() {
            return Err(Error::invalid("r", "must be finite", r));
        }
        if !(a >= 0.0 && a.is_finite()) {
            return Err(Error::invalid("a", "must be non-negative and finite", a));
        }
        let temperature = match mode {
            TemperatureMode::Zero => 0.0,
            _ if temperature > 0.0 && temperature.is_finite() => temperature,
            _ => {
                return Err(Error::invalid(
                    "T",
                    "must be positive for the high and exact modes",
                    temperature,
                ))
            }
        };
        Ok(Self {
            gamma0,
            omega_c,
            r,
            a,
            mode,
            temperature,
        })
    }

    pub fn zero_temperature(gamma0: f64, omega_c: f64, r: f64, a: f64) -> Result<Self> {
        Self::new(gamma0, omega_c, r, a, TemperatureMode::Zero, 0.0)
    }

    pub fn high_temperature(gamma0: f64, omega_c: f64, r: f64, a: f64, temperature: f64) -> Result<Self> {
        Self::new(gamma0, omega_c, r, a, TemperatureMode::High, temperature)
    }

    pub fn exact(gamma0: f64, omega_c: f64, r: f64, a: f64, temperature: f64) -> Result<Self> {
        Self::new(gamma0, omega_c, r, a, TemperatureMode::Exact, temperature)
    }

    /// Same bath with different squeezing.
    pub fn with_squeezing(&self, r: f64, a: f64) -> Result<Self> {
        Self::new(self.gamma0, self.omega_c, r, a, self.mode, self.temperature)
    }

    pub fn gamma0(&self) -> f64 {
        self.gamma0
    }

    pub fn omega_c(&self) -> f64 {
        self.omega_c
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn mode(&self) -> TemperatureMode {
        self.mode
    }

    /// Temperature in energy units; exactly zero in [`TemperatureMode::Zero`].
    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    /// Warning text when the high-temperature closed form is requested at a
    /// temperature not well above the cutoff (`T < 10 ω_c`).
    pub fn high_temperature_warning(&self) -> Option<String> {
        (self.mode == TemperatureMode::High && self.temperature < 10.0 * self.omega_c).then(|| {
            format!(
                "high-temperature closed form used with T = {} < 10 omega_c = {}; consider --temp-mode exact",
                self.temperature,
                10.0 * self.omega_c
            )
        })
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::invalid("t", "must be non-negative and finite", t));
        }
        Ok(())
    }

    fn check_closed_form_domain(&self, t: f64) -> Result<()> {
        self.check_time(t)?;
        if self.mode != TemperatureMode::Exact && self.a > 0.0 && t <= 2.0 * self.a {
            return Err(Error::ClosedFormDomain {
                t,
                bound: 2.0 * self.a,
            });
        }
        Ok(())
    }
}

/// One row of kernel values.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelSample {
    pub t: f64,
    pub eta: f64,
    pub eta_dot: f64,
    pub gamma: f64,
    pub gamma_dot: f64,
}

/// A closed-form kernel split as `value = thermal - squeeze`, where the
/// thermal part carries `cosh 2r` and the squeeze part carries `sinh 2r`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelParts {
    pub thermal: f64,
    pub squeeze: f64,
}

impl KernelParts {
    pub fn value(&self) -> f64 {
        self.thermal - self.squeeze
    }
}

pub fn eta(t: f64, spec: &BathSpec) -> Result<f64> {
    spec.check_time(t)?;
    Ok(-spec.gamma0 / PI * (spec.omega_c * t).atan())
}

pub fn eta_dot(t: f64, spec: &BathSpec) -> Result<f64> {
    spec.check_time(t)?;
    let wc = spec.omega_c;
    Ok(-spec.gamma0 / PI * wc / (1.0 + wc * wc * t * t))
}

/// `γ(t)` in the mode selected by `spec`.
pub fn gamma(t: f64, spec: &BathSpec) -> Result<f64> {
    match spec.mode {
        TemperatureMode::Exact => {
            spec.check_time(t)?;
            Ok(gamma_quadrature(t, spec, Occupation::planck(spec.temperature), DEFAULT_TOLERANCE)?.value)
        }
        _ => gamma_parts(t, spec).map(|p| p.value()),
    }
}

/// `dγ/dt` in the mode selected by `spec`.
pub fn gamma_dot(t: f64, spec: &BathSpec) -> Result<f64> {
    match spec.mode {
        TemperatureMode::Exact => {
            spec.check_time(t)?;
            Ok(gamma_dot_quadrature(t, spec, Occupation::planck(spec.temperature), DEFAULT_TOLERANCE)?
                .value)
        }
        _ => gamma_dot_parts(t, spec).map(|p| p.value()),
    }
}

/// Closed-form `γ(t)` split into its `cosh 2r` and `sinh 2r` pieces.
pub fn gamma_parts(t: f64, spec: &BathSpec) -> Result<KernelParts> {
    spec.check_closed_form_domain(t)?;
    let BathSpec { gamma0, omega_c: wc, r, a, .. } = *spec;
    let (ch, sh) = ((2.0 * r).cosh(), (2.0 * r).sinh());
    let x = wc * t;
    let u = 2.0 * wc * (t - a);
    let v = wc * (t - 2.0 * a);
    let w = 2.0 * a * wc;

    match spec.mode {
        TemperatureMode::Zero => {
            let thermal = gamma0 / (2.0 * PI) * ch * (x * x).ln_1p();
            let squeeze = if sh == 0.0 {
                0.0
            } else {
                gamma0 / (4.0 * PI) * sh * ((u * u).ln_1p() - 2.0 * (v * v).ln_1p() + (w * w).ln_1p())
            };
            Ok(KernelParts { thermal, squeeze })
        }
        TemperatureMode::High => {
            let temp = spec.temperature;
            let thermal = gamma0 * temp / (PI * wc) * ch * (2.0 * x * x.atan() - (x * x).ln_1p());
            let squeeze = if sh == 0.0 {
                0.0
            } else {
                gamma0 * temp / (2.0 * PI * wc)
                    * sh
                    * (2.0 * u * u.atan() - 4.0 * v * v.atan() + 2.0 * w * w.atan()
                        + 2.0 * (v * v).ln_1p()
                        - (u * u).ln_1p()
                        - (w * w).ln_1p())
            };
            Ok(KernelParts { thermal, squeeze })
        }
        TemperatureMode::Exact => Err(Error::WrongTemperatureMode {
            what: "closed-form gamma",
            required: "zero or high",
        }),
    }
}

/// Closed-form `dγ/dt` split into its `cosh 2r` and `sinh 2r` pieces.
pub fn gamma_dot_parts(t: f64, spec: &BathSpec) -> Result<KernelParts> {
    spec.check_closed_form_domain(t)?;
    let BathSpec { gamma0, omega_c: wc, r, a, .. } = *spec;
    let (ch, sh) = ((2.0 * r).cosh(), (2.0 * r).sinh());
    let wc2 = wc * wc;

    match spec.mode {
        TemperatureMode::Zero => {
            let thermal = gamma0 / PI * ch * wc2 * t / (1.0 + wc2 * t * t);
            let (p, q) = (t - a, t - 2.0 * a);
            let squeeze = gamma0 / (4.0 * PI)
                * sh
                * (8.0 * wc2 * p / (1.0 + 4.0 * wc2 * p * p) - 4.0 * wc2 * q / (1.0 + wc2 * q * q));
            Ok(KernelParts { thermal, squeeze })
        }
        TemperatureMode::High => {
            let pref = 2.0 * gamma0 * spec.temperature / PI;
            let thermal = pref * ch * (wc * t).atan();
            let squeeze = pref * sh * ((2.0 * wc * (t - a)).atan() - (wc * (t - 2.0 * a)).atan());
            Ok(KernelParts { thermal, squeeze })
        }
        TemperatureMode::Exact => Err(Error::WrongTemperatureMode {
            what: "closed-form gamma_dot",
            required: "zero or high",
        }),
    }
}

pub fn kernels(t: f64, spec: &BathSpec) -> Result<KernelSample> {
    Ok(KernelSample {
        t,
        eta: eta(t, spec)?,
        eta_dot: eta_dot(t, spec)?,
        gamma: gamma(t, spec)?,
        gamma_dot: gamma_dot(t, spec)?,
    })
}

/// Large-time behaviour of the kernels.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LongTimeLimits {
    /// `η(∞) = -γ₀/2`.
    pub eta_inf: f64,
    /// High-temperature linear growth `γ(t) → slope·t + offset` as `ω_c → ∞`.
    pub high_t: Option<LinearAsymptote>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearAsymptote {
    pub slope: f64,
    pub offset: f64,
}

pub fn longtime_limits(spec: &BathSpec) -> LongTimeLimits {
    let high_t = (spec.mode == TemperatureMode::High).then(|| LinearAsymptote {
        slope: high_t_decoherence_rate(spec),
        offset: -2.0 * spec.gamma0 * spec.temperature * (2.0 * spec.r).sinh() * spec.a,
    });
    LongTimeLimits {
        eta_inf: -0.5 * spec.gamma0,
        high_t,
    }
}

/// `γ₀ T cosh 2r`: the saturated high-temperature `dγ/dt`, which is also
/// the phase-diffusion constant of the oscillator Q-function per `ω²`.
pub fn high_t_decoherence_rate(spec: &BathSpec) -> f64 {
    spec.gamma0 * spec.temperature * (2.0 * spec.r).cosh()
}

/// Thermal weighting `coth(βω/2)` applied inside the bath integrals.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Occupation {
    /// `coth → 1`
    Vacuum,
    /// `coth → 2T/ω`
    Classical { temperature: f64 },
    /// full `coth(ω/2T)`
    Planck { temperature: f64 },
}

impl Occupation {
    pub fn planck(temperature: f64) -> Self {
        Occupation::Planck { temperature }
    }

    /// The weighting implied by a spec's temperature mode.
    pub fn for_spec(spec: &BathSpec) -> Self {
        match spec.mode {
            TemperatureMode::Zero => Occupation::Vacuum,
            TemperatureMode::High => Occupation::Classical {
                temperature: spec.temperature,
            },
            TemperatureMode::Exact => Occupation::Planck {
                temperature: spec.temperature,
            },
        }
    }

    pub fn factor(&self, omega: f64) -> f64 {
        match *self {
            Occupation::Vacuum => 1.0,
            Occupation::Classical { temperature } => 2.0 * temperature / omega,
            Occupation::Planck { temperature } => coth_half(omega / temperature),
        }
    }
}

/// `coth(x/2)`, using `2/x + x/6` below `x = 1e-4`.
pub fn coth_half(x: f64) -> f64 {
    if x < 1e-4 {
        2.0 / x + x / 6.0
    } else {
        1.0 / (0.5 * x).tanh()
    }
}

pub const DEFAULT_TOLERANCE: Tolerance = Tolerance {
    abs: 1e-15,
    rel: 1e-11,
};

const MAX_PANELS: usize = 400_000;

/// `e^{ix} - 1` without cancellation near `x = 0`.
fn expm1_i(x: f64) -> Complex64 {
    let s = (0.5 * x).sin();
    Complex64::new(-2.0 * s * s, x.sin())
}

/// The squeezed displacement amplitude `(e^{iωt}-1) cosh r + (e^{-iωt}-1) sinh r e^{2iaω}`
/// and its time derivative divided by `ω`.
fn squeezed_amplitude(omega: f64, t: f64, r: f64, a: f64) -> (Complex64, Complex64) {
    let (ch, sh) = (r.cosh(), r.sinh());
    let phase = Complex64::from_polar(1.0, 2.0 * a * omega);
    let e1 = expm1_i(omega * t);
    let e2 = e1.conj();
    let amp = e1 * ch + e2 * sh * phase;
    let rot = Complex64::from_polar(1.0, omega * t);
    let i = Complex64::i();
    let deriv = i * rot * ch - i * rot.conj() * sh * phase;
    (amp, deriv)
}

fn integration_range(t: f64, spec: &BathSpec, tol: Tolerance) -> (Vec<f64>, f64) {
    let wc = spec.omega_c;
    let omega_max = wc * (1.0 / tol.abs).ln().max(40.0);
    let mut scale = wc;
    for period_time in [t, 2.0 * (t - spec.a).abs(), (t - 2.0 * spec.a).abs(), 2.0 * spec.a] {
        if period_time > 0.0 {
            scale = scale.min(2.0 * PI / period_time);
        }
    }
    (quadrature::uniform_breaks(0.0, omega_max, 0.5 * scale), omega_max)
}

/// `γ(t)` by direct quadrature of the spectral integral.
pub fn gamma_quadrature(t: f64, spec: &BathSpec, occupation: Occupation, tol: Tolerance) -> Result<Integral> {
    spec.check_time(t)?;
    if t == 0.0 {
        return Ok(Integral { value: 0.0, error: 0.0, evaluations: 0 });
    }
    let BathSpec { gamma0, omega_c, r, a, .. } = *spec;
    let (breaks, omega_max) = integration_range(t, spec, tol);
    let integrand = |w: f64| {
        let (amp, _) = squeezed_amplitude(w, t, r, a);
        gamma0 / (2.0 * PI) * (-w / omega_c).exp() / w * occupation.factor(w) * amp.norm_sqr()
    };
    let tail = gamma0 / (2.0 * PI) * 4.0 * (2.0 * r.abs()).exp() * occupation.factor(omega_max) / omega_max
        * omega_c
        * (-omega_max / omega_c).exp();
    quadrature::integrate(integrand, &breaks, tol, tail, MAX_PANELS)
}

/// `dγ/dt` by differentiating the spectral integrand under the integral.
pub fn gamma_dot_quadrature(t: f64, spec: &BathSpec, occupation: Occupation, tol: Tolerance) -> Result<Integral> {
    spec.check_time(t)?;
    if t == 0.0 {
        return Ok(Integral { value: 0.0, error: 0.0, evaluations: 0 });
    }
    let BathSpec { gamma0, omega_c, r, a, .. } = *spec;
    let (breaks, omega_max) = integration_range(t, spec, tol);
    let integrand = |w: f64| {
        let (amp, deriv) = squeezed_amplitude(w, t, r, a);
        gamma0 / PI * (-w / omega_c).exp() * occupation.factor(w) * (amp.conj() * deriv).re
    };
    let tail =
        gamma0 / PI * 2.0 * (2.0 * r.abs()).exp() * occupation.factor(omega_max) * omega_c * (-omega_max / omega_c).exp();
    quadrature::integrate(integrand, &breaks, tol, tail, MAX_PANELS)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig1(r: f64) -> BathSpec {
        BathSpec::zero_temperature(0.1, 50.0, r, 0.0).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-30)
    }

    #[test]
    fn eta_values() {
        let s = fig1(0.0);
        assert_eq!(eta(0.0, &s).unwrap(), 0.0);
        assert!((eta(0.02, &s).unwrap() + 0.025).abs() < 1e-15);
        assert!((eta(1e9, &s).unwrap() + 0.05).abs() < 1e-10);
        assert_eq!(longtime_limits(&s).eta_inf, -0.05);
    }

    #[test]
    fn eta_ignores_bath_state() {
        let a = eta(0.3, &fig1(0.0)).unwrap();
        let b = eta(0.3, &BathSpec::high_temperature(0.1, 50.0, 1.2, 0.05, 300.0).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn eta_dot_values() {
        let s = fig1(0.0);
        assert!((eta_dot(0.0, &s).unwrap() + 5.0 / PI).abs() < 1e-14);
        assert!(eta_dot(1e8, &s).unwrap().abs() < 1e-15);
        let h = 1e-5;
        let fd = (eta(0.5 + h, &s).unwrap() - eta(0.5 - h, &s).unwrap()) / (2.0 * h);
        assert!((fd - eta_dot(0.5, &s).unwrap()).abs() < 1e-8);
    }

    #[test]
    fn negative_time_rejected() {
        let s = fig1(0.0);
        assert!(eta(-1.0, &s).is_err());
        assert!(eta_dot(-1.0, &s).is_err());
        assert!(gamma(-1.0, &s).is_err());
        assert!(gamma_dot(-0.1, &s).is_err());
    }

    #[test]
    fn zero_squeezing_zero_t_is_log_law() {
        let s = fig1(0.0);
        for t in [0.0f64, 0.01, 0.3, 2.0, 40.0] {
            let want = 0.1 / (2.0 * PI) * (1.0 + 2500.0 * t * t).ln();
            assert!((gamma(t, &s).unwrap() - want).abs() <= 1e-12 * want.max(1e-300));
        }
    }

    #[test]
    fn zero_squeezing_high_t_rate_is_arctan() {
        let s = BathSpec::high_temperature(0.1, 50.0, 0.0, 0.0, 300.0).unwrap();
        for t in [0.0f64, 0.01, 0.5, 3.0] {
            let want = 2.0 * 0.1 * 300.0 / PI * (50.0 * t).atan();
            assert!((gamma_dot(t, &s).unwrap() - want).abs() <= 1e-12 * want.abs().max(1e-300));
        }
        let far = gamma_dot(1e9, &s).unwrap();
        assert!(rel(far, 0.1 * 300.0) < 1e-9);
    }

    #[test]
    fn closed_form_domain_enforced() {
        let s = BathSpec::zero_temperature(0.1, 50.0, 0.4, 0.01).unwrap();
        assert!(matches!(gamma(0.02, &s), Err(Error::ClosedFormDomain { .. })));
        assert!(matches!(gamma_dot(0.01, &s), Err(Error::ClosedFormDomain { .. })));
        assert!(gamma(0.0201, &s).is_ok());
        let exact = BathSpec::exact(0.1, 50.0, 0.4, 0.01, 1.0).unwrap();
        assert!(gamma(0.01, &exact).is_ok());
    }

    #[test]
    fn spec_validation() {
        assert!(BathSpec::zero_temperature(0.0, 50.0, 0.0, 0.0).is_err());
        assert!(BathSpec::zero_temperature(0.1, -1.0, 0.0, 0.0).is_err());
        assert!(BathSpec::zero_temperature(0.1, 50.0, 0.0, -0.1).is_err());
        assert!(BathSpec::high_temperature(0.1, 50.0, 0.0, 0.0, 0.0).is_err());
        assert!(BathSpec::exact(0.1, 50.0, 0.0, 0.0, -3.0).is_err());
        // zero mode forces T = 0
        let s = BathSpec::new(0.1, 50.0, 0.0, 0.0, TemperatureMode::Zero, 17.0).unwrap();
        assert_eq!(s.temperature(), 0.0);
    }

    #[test]
    fn gamma_at_origin_vanishes_in_every_mode() {
        for mode in [TemperatureMode::Zero, TemperatureMode::High, TemperatureMode::Exact] {
            let s = BathSpec::new(0.1, 50.0, 0.0, 0.0, mode, 2.0).unwrap();
            assert_eq!(gamma(0.0, &s).unwrap(), 0.0);
        }
    }

    #[test]
    fn zero_t_squeezed_matches_quadrature() {
        let s = BathSpec::zero_temperature(0.1, 50.0, 0.4, 0.01).unwrap();
        let closed = gamma(1.0, &s).unwrap();
        let quad = gamma_quadrature(1.0, &s, Occupation::Vacuum, DEFAULT_TOLERANCE).unwrap();
        assert!(rel(closed, quad.value) < 1e-6, "{closed} vs {}", quad.value);
    }

    #[test]
    fn zero_t_gamma_dot_matches_finite_difference() {
        let s = BathSpec::zero_temperature(0.1, 50.0, 0.4, 0.0).unwrap();
        let (t, h) = (0.05, 1e-6);
        let fd = (gamma(t + h, &s).unwrap() - gamma(t - h, &s).unwrap()) / (2.0 * h);
        assert!((fd - gamma_dot(t, &s).unwrap()).abs() < 1e-7);
    }

    #[test]
    fn zero_t_gamma_dot_vanishes_at_origin_without_phase_slope() {
        let s = BathSpec::zero_temperature(0.1, 50.0, 0.4, 0.0).unwrap();
        assert_eq!(gamma_dot(0.0, &s).unwrap(), 0.0);
    }

    #[test]
    fn zero_t_unsqueezed_gamma_dot_tail_is_one_over_pi_t() {
        let s = fig1(0.0);
        let t = 1e3 / 50.0;
        let ratio = gamma_dot(t, &s).unwrap() * PI * t / 0.1;
        assert!((ratio - 1.0).abs() < 1e-5);
    }

    #[test]
    fn zero_t_squeezed_gamma_dot_tail_keeps_sinh_contribution() {
        // Both logarithms in the squeeze term grow like 2 ln t at large t,
        // so the tail is (γ₀/πt)(cosh 2r + sinh 2r / 2), not (γ₀/πt) cosh 2r.
        for r in [-0.4, 0.4] {
            let s = fig1(r);
            let t = 1e4;
            let want = 0.1 / (PI * t) * ((2.0 * r).cosh() + 0.5 * (2.0 * r).sinh());
            assert!(rel(gamma_dot(t, &s).unwrap(), want) < 1e-6);
        }
    }

    #[test]
    fn high_t_linear_asymptote() {
        let s = BathSpec::high_temperature(0.1, 1e7, 0.4, 0.01, 300.0).unwrap();
        let lim = longtime_limits(&s).high_t.unwrap();
        assert!(rel(lim.slope, 0.1 * 300.0 * 0.8f64.cosh()) < 1e-15);
        let (t1, t2) = (50.0, 60.0);
        let secant = (gamma(t2, &s).unwrap() - gamma(t1, &s).unwrap()) / (t2 - t1);
        assert!(rel(secant, lim.slope) < 1e-6);
        let r0 = BathSpec::high_temperature(0.1, 50.0, 0.0, 0.0, 300.0).unwrap();
        let lim0 = longtime_limits(&r0).high_t.unwrap();
        assert_eq!(lim0.offset, 0.0);
        assert!(rel(lim0.slope, 30.0) < 1e-15);
    }

    #[test]
    fn zero_mode_has_no_high_t_asymptote() {
        assert!(longtime_limits(&fig1(0.4)).high_t.is_none());
    }

    #[test]
    fn coth_series_branch_is_continuous() {
        let x = 1e-4f64;
        let series = 2.0 / x + x / 6.0;
        let direct = 1.0 / (0.5 * x).tanh();
        assert!(rel(series, direct) < 1e-12);
        assert!(rel(coth_half(x * (1.0 - 1e-12)), coth_half(x)) < 1e-9);
    }

    #[test]
    fn amplitude_is_finite_and_quadratic_near_zero_frequency() {
        let (amp, deriv) = squeezed_amplitude(1e-12, 1.0, 0.4, 0.01);
        assert!(amp.norm().is_finite() && deriv.norm().is_finite());
        assert!(amp.norm_sqr() < 1e-23);
    }

    #[test]
    fn high_t_warning() {
        let s = BathSpec::high_temperature(0.1, 50.0, 0.0, 0.0, 300.0).unwrap();
        assert!(s.high_temperature_warning().is_some());
        let s = BathSpec::high_temperature(0.1, 5.0, 0.0, 0.0, 300.0).unwrap();
        assert!(s.high_temperature_warning().is_none());
        assert!(fig1(0.0).high_temperature_warning().is_none());
    }

    #[test]
    fn exact_mode_matches_closed_forms_in_their_limits() {
        // T ≫ ω_c: Planck weighting approaches the classical one
        let hot = BathSpec::exact(0.1, 5.0, 0.3, 0.0, 5e4).unwrap();
        let closed = BathSpec::high_temperature(0.1, 5.0, 0.3, 0.0, 5e4).unwrap();
        assert!(rel(gamma(0.7, &hot).unwrap(), gamma(0.7, &closed).unwrap()) < 1e-4);
        // T ≪ ω_c: Planck weighting approaches the vacuum one
        let cold = BathSpec::exact(0.1, 50.0, 0.3, 0.0, 1e-3).unwrap();
        let zero = BathSpec::zero_temperature(0.1, 50.0, 0.3, 0.0).unwrap();
        assert!(rel(gamma(0.7, &cold).unwrap(), gamma(0.7, &zero).unwrap()) < 1e-4);
    }
}
