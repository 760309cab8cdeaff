//! Small numerical tools used to cross-check the closed forms.

use crate::error::Result;
use crate::linalg::{c, CMatrix};

/// Fixed-step classical Runge–Kutta for `dy/dt = f(t, y)` on matrices,
/// returning the state after each step (the initial state first).
pub fn rk4_trajectory<F>(y0: &CMatrix, t0: f64, h: f64, steps: usize, f: F) -> Result<Vec<CMatrix>>
where
    F: Fn(f64, &CMatrix) -> Result<CMatrix>,
{
    let half = c(0.5 * h, 0.0);
    let full = c(h, 0.0);
    let sixth = c(h / 6.0, 0.0);
    let two = c(2.0, 0.0);
    let mut out = Vec::with_capacity(steps + 1);
    let mut y = y0.clone();
    out.push(y.clone());
    for i in 0..steps {
        let t = t0 + i as f64 * h;
        let k1 = f(t, &y)?;
        let k2 = f(t + 0.5 * h, &(&y + &k1 * half))?;
        let k3 = f(t + 0.5 * h, &(&y + &k2 * half))?;
        let k4 = f(t + h, &(&y + &k3 * full))?;
        y += (k1 + &k2 * two + &k3 * two + k4) * sixth;
        out.push(y.clone());
    }
    Ok(out)
}

/// Final state of [`rk4_trajectory`].
pub fn rk4<F>(y0: &CMatrix, t0: f64, h: f64, steps: usize, f: F) -> Result<CMatrix>
where
    F: Fn(f64, &CMatrix) -> Result<CMatrix>,
{
    Ok(rk4_trajectory(y0, t0, h, steps, f)?.pop().expect("trajectory holds y0"))
}

/// `(f(x+h) - f(x-h)) / 2h`.
pub fn central_difference<F>(f: F, x: f64, h: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    Ok((f(x + h)? - f(x - h)?) / (2.0 * h))
}

/// Least-squares slope and intercept of `y` against `x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// `n` points spaced evenly in `log` between `lo` and `hi` inclusive.
pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rk4_exponential() {
        let y0 = CMatrix::from_element(1, 1, c(1.0, 0.0));
        let y = rk4(&y0, 0.0, 1e-2, 100, |_, y| Ok(y * c(-1.0, 2.0))).unwrap();
        let want = c(-1.0, 2.0).exp();
        assert!((y[(0, 0)] - want).norm() < 1e-7);
    }

    #[test]
    fn fit_recovers_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v - 1.0).collect();
        let (m, b) = linear_fit(&x, &y);
        assert!((m - 3.0).abs() < 1e-14 && (b + 1.0).abs() < 1e-14);
    }

    #[test]
    fn log_space_endpoints() {
        let v = log_space(1e-3, 5.0, 20);
        assert_eq!(v.len(), 20);
        assert!((v[0] - 1e-3).abs() < 1e-18 && (v[19] - 5.0).abs() < 1e-14);
    }
}
