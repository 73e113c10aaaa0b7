//! Cole–Hopf series solution for `u(0, x) = sin x` on the 2π-periodic domain:
//!
//! ```text
//! u(t, x) = 2ν Σ_{j≥1} a_j j e^{-ν t j²} sin jx / Σ_{j≥0} a_j e^{-ν t j²} cos jx
//! ```
//!
//! with `a_j` the cosine coefficients of `exp(-(1 - cos x)/(2ν))`.

use crate::error::{ensure_positive, Error, Result};
use std::f64::consts::TAU;

/// Largest truncation index accepted before reporting [`Error::NoDecay`].
pub const MAX_TERMS: usize = 8192;
// a truncation at J needs 4J <= M, so larger M cannot help
const MAX_QUADRATURE: usize = 4 * MAX_TERMS;
const MIN_QUADRATURE: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct FourierCoeffs {
    pub nu: f64,
    /// `a_0 … a_J`.
    pub a: Vec<f64>,
    /// Trapezoid points used for the final coefficients.
    pub quad_points: usize,
    pub tol: f64,
    /// Smallest time for which the truncation was sized.
    pub t_guard: f64,
}

/// Coefficients sized so the dropped tail stays below `tol` times the smallest
/// denominator value for every `t ≥ 0`.
pub fn coefficients(nu: f64, tol: f64) -> Result<FourierCoeffs> {
    coefficients_for_time(nu, tol, 0.0)
}

/// Like [`coefficients`] but truncated for evaluation times `t ≥ t_min` only,
/// where the Gaussian factor `e^{-ν t j²}` shortens the series.
pub fn coefficients_for_time(nu: f64, tol: f64, t_min: f64) -> Result<FourierCoeffs> {
    ensure_positive("nu", nu)?;
    ensure_positive("tol", tol)?;
    if !(t_min >= 0.0 && t_min.is_finite()) {
        return Err(Error::InvalidArgument(format!("t_min must be >= 0, got {t_min}")));
    }
    let mut m = MIN_QUADRATURE;
    let mut previous = trapezoid_coefficients(nu, m);
    loop {
        m *= 2;
        if m > MAX_QUADRATURE {
            return Err(Error::NoDecay { cap: MAX_TERMS });
        }
        let current = trapezoid_coefficients(nu, m);
        let a0 = current[0];
        // the denominator is smallest at x = π; the tail must be small against it
        let (d_min, d_abs) = denominator_at_pi(&current[..current.len() / 2], nu, t_min);
        if d_min <= 64.0 * f64::EPSILON * d_abs {
            // cancellation leaves no correct digits; more points will not help once a_0 settled
            if (a0 - previous[0]).abs() <= tol * a0 {
                return Err(Error::NoDecay { cap: MAX_TERMS });
            }
            previous = current;
            continue;
        }
        let Some(j_max) = truncation_index(&current, nu, tol * d_min.min(a0), t_min) else {
            previous = current;
            continue;
        };
        if j_max > MAX_TERMS {
            return Err(Error::NoDecay { cap: MAX_TERMS });
        }
        let settled = 4 * j_max <= m
            && (0..=j_max).all(|j| (current[j] - previous.get(j).copied().unwrap_or(0.0)).abs() <= tol * a0);
        if settled {
            let mut a = current;
            a.truncate(j_max + 1);
            return Ok(FourierCoeffs { nu, a, quad_points: m, tol, t_guard: t_min });
        }
        previous = current;
    }
}

/// `(Σ a_j (-1)^j e^{-ν t j²}, Σ |a_j| e^{-ν t j²})`.
fn denominator_at_pi(a: &[f64], nu: f64, t: f64) -> (f64, f64) {
    a.iter().enumerate().fold((0.0, 0.0), |(d, abs), (j, &aj)| {
        let term = aj * (-nu * t * (j * j) as f64).exp();
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        (d + sign * term, abs + term.abs())
    })
}

/// Smallest `J` such that every computed `j ≥ J` has `|a_j| j e^{-ν t j²} < bound`
/// or `a_j` at the rounding level of the quadrature.
fn truncation_index(a: &[f64], nu: f64, bound: f64, t_min: f64) -> Option<usize> {
    let noise = 16.0 * f64::EPSILON * a[0];
    let tail_ok = |j: usize| {
        a[j].abs() <= noise || a[j].abs() * j as f64 * (-nu * t_min * (j * j) as f64).exp() < bound
    };
    // only the first half of the trapezoid coefficients is free of aliasing
    let usable = a.len() / 2;
    let mut j = usable;
    while j > 1 && tail_ok(j - 1) {
        j -= 1;
    }
    (j < usable).then_some(j.max(1))
}

/// `a_0 … a_{M/2}` by the `M`-point trapezoid rule.
fn trapezoid_coefficients(nu: f64, m: usize) -> Vec<f64> {
    let step = TAU / m as f64;
    let weight: Vec<f64> = (0..m)
        .map(|k| {
            let half = (0.5 * k as f64 * step).sin();
            // 1 - cos x = 2 sin²(x/2), accurate for small ν
            (-(2.0 * half * half) / (2.0 * nu)).exp()
        })
        .collect();
    let cosines: Vec<f64> = (0..m).map(|k| (k as f64 * step).cos()).collect();
    (0..=m / 2)
        .map(|j| {
            let sum: f64 = weight.iter().enumerate().map(|(k, w)| w * cosines[(j * k) % m]).sum();
            if j == 0 {
                sum / m as f64
            } else {
                2.0 * sum / m as f64
            }
        })
        .collect()
}

impl FourierCoeffs {
    /// Truncation index `J`.
    pub fn terms(&self) -> usize {
        self.a.len() - 1
    }

    pub fn evaluate(&self, t: f64, x: f64) -> Result<f64> {
        if t.is_nan() || t < 0.0 {
            return Err(Error::InvalidArgument(format!("time must be >= 0, got {t}")));
        }
        if t < self.t_guard {
            return Err(Error::TruncationUnsafe { t, guard: self.t_guard });
        }
        // reduce into [-π, π] so that odd symmetry is exact
        let x = x - TAU * (x / TAU).round();
        let mut num = 0.0;
        let mut den = self.a[0];
        for (j, &a) in self.a.iter().enumerate().skip(1) {
            let jf = j as f64;
            let decay = a * (-self.nu * t * jf * jf).exp();
            let (s, c) = (jf * x).sin_cos();
            num += decay * jf * s;
            den += decay * c;
        }
        Ok(2.0 * self.nu * num / den)
    }

    pub fn evaluate_many(&self, t: f64, xs: &[f64]) -> Result<Vec<f64>> {
        xs.iter().map(|&x| self.evaluate(t, x)).collect()
    }
}
