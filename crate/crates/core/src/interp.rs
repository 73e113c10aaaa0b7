//! Periodic interpolation on non-uniform nodes.
//!
//! All three operators reproduce affine data and act on node positions only
//! through differences, so shifting positions by a constant, scaling them, or
//! adding an affine-in-time offset to positions and a constant to values
//! commutes with interpolation. That is what keeps the evolution–projection
//! scheme invariant.

use crate::error::{ensure_positive, Error, Result};
use crate::scheme::DiscreteField;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum InterpKind {
    Linear,
    /// Three-point Lagrange interpolation on `{i-1, i, i+1}` for a query in `[x_i, x_{i+1})`.
    #[default]
    Quadratic,
    /// C² periodic cubic spline.
    CubicSpline,
}

impl InterpKind {
    pub fn name(self) -> &'static str {
        match self {
            InterpKind::Linear => "linear",
            InterpKind::Quadratic => "quadratic",
            InterpKind::CubicSpline => "cubic",
        }
    }

    fn min_nodes(self) -> usize {
        match self {
            InterpKind::Linear => 2,
            InterpKind::Quadratic | InterpKind::CubicSpline => 3,
        }
    }
}

impl fmt::Display for InterpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for InterpKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "linear" => Ok(InterpKind::Linear),
            "quadratic" => Ok(InterpKind::Quadratic),
            "cubic" | "spline" | "cubic-spline" | "cubicspline" => Ok(InterpKind::CubicSpline),
            other => Err(Error::InvalidArgument(format!("unknown interpolation '{other}'"))),
        }
    }
}

/// Interpolant over one period of nodal data. Immutable once built.
#[derive(Debug, Clone)]
pub struct PeriodicInterpolant {
    kind: InterpKind,
    x: Vec<f64>,
    u: Vec<f64>,
    period: f64,
    /// Spline second derivatives; empty for the other kinds.
    curvature: Vec<f64>,
}

impl PeriodicInterpolant {
    pub fn new(x: &[f64], u: &[f64], period: f64, kind: InterpKind) -> Result<Self> {
        ensure_positive("period", period)?;
        if x.len() != u.len() {
            return Err(Error::ShapeMismatch { expected: x.len(), found: u.len() });
        }
        if x.len() < kind.min_nodes() {
            return Err(Error::InvalidArgument(format!(
                "{kind} interpolation needs at least {} nodes",
                kind.min_nodes()
            )));
        }
        check_monotone(x, Some(period))?;
        let mut interp = PeriodicInterpolant {
            kind,
            x: x.to_vec(),
            u: u.to_vec(),
            period,
            curvature: Vec::new(),
        };
        if kind == InterpKind::CubicSpline {
            interp.curvature = interp.spline_curvature();
        }
        Ok(interp)
    }

    pub fn kind(&self) -> InterpKind {
        self.kind
    }

    pub fn eval(&self, q: f64) -> f64 {
        let (i, r) = self.bracket(q);
        match self.kind {
            InterpKind::Linear => {
                let (x0, x1) = (self.node(i as isize), self.node(i as isize + 1));
                let (u0, u1) = (self.value(i as isize), self.value(i as isize + 1));
                u0 + (u1 - u0) / (x1 - x0) * (r - x0)
            }
            InterpKind::Quadratic => {
                let i = i as isize;
                let (xm, x0, xp) = (self.node(i - 1), self.node(i), self.node(i + 1));
                let (um, u0, up) = (self.value(i - 1), self.value(i), self.value(i + 1));
                um * (r - x0) * (r - xp) / ((xm - x0) * (xm - xp))
                    + u0 * (r - xm) * (r - xp) / ((x0 - xm) * (x0 - xp))
                    + up * (r - xm) * (r - x0) / ((xp - xm) * (xp - x0))
            }
            InterpKind::CubicSpline => {
                let n = self.x.len();
                let (x0, x1) = (self.node(i as isize), self.node(i as isize + 1));
                let h = x1 - x0;
                let a = (x1 - r) / h;
                let b = 1.0 - a;
                a * self.u[i]
                    + b * self.u[(i + 1) % n]
                    + ((a * a * a - a) * self.curvature[i] + (b * b * b - b) * self.curvature[(i + 1) % n]) * h * h
                        / 6.0
            }
        }
    }

    pub fn eval_many(&self, queries: &[f64]) -> Vec<f64> {
        queries.iter().map(|&q| self.eval(q)).collect()
    }

    /// Index of the bracketing interval and the query reduced into `[x_0, x_0 + L)`.
    fn bracket(&self, q: f64) -> (usize, f64) {
        let x0 = self.x[0];
        let r = if q >= x0 && q < x0 + self.period {
            q
        } else {
            let r = x0 + (q - x0).rem_euclid(self.period);
            if r >= x0 + self.period {
                x0
            } else {
                r
            }
        };
        let i = self.x.partition_point(|&v| v <= r).max(1) - 1;
        (i, r)
    }

    /// Unwrapped position of node `j`, any integer `j`.
    #[inline]
    fn node(&self, j: isize) -> f64 {
        let n = self.x.len() as isize;
        let k = j.div_euclid(n);
        self.x[j.rem_euclid(n) as usize] + k as f64 * self.period
    }

    #[inline]
    fn value(&self, j: isize) -> f64 {
        self.u[j.rem_euclid(self.x.len() as isize) as usize]
    }

    fn spline_curvature(&self) -> Vec<f64> {
        let n = self.x.len();
        let gap = |i: usize| self.node(i as isize + 1) - self.node(i as isize);
        let mut lower = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut upper = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        for i in 0..n {
            let hl = gap((i + n - 1) % n);
            let hr = gap(i);
            lower[i] = hl;
            diag[i] = 2.0 * (hl + hr);
            upper[i] = hr;
            let ur = self.u[(i + 1) % n];
            let ul = self.u[(i + n - 1) % n];
            rhs[i] = 6.0 * ((ur - self.u[i]) / hr - (self.u[i] - ul) / hl);
        }
        solve_cyclic_tridiagonal(&lower, &diag, &upper, &rhs)
    }
}

/// Interpolates nodal data at `query` positions (taken modulo `period`).
pub fn interpolate(x: &[f64], u: &[f64], period: f64, kind: InterpKind, query: &[f64]) -> Result<Vec<f64>> {
    Ok(PeriodicInterpolant::new(x, u, period, kind)?.eval_many(query))
}

/// Values of `source` at `target_x`, wrapping both nodes and queries periodically.
pub fn project_periodic(source: &DiscreteField, target_x: &[f64], kind: InterpKind) -> Result<Vec<f64>> {
    check_monotone(target_x, None)?;
    interpolate(source.x(), source.u(), source.grid().domain_length(), kind, target_x)
}

fn check_monotone(x: &[f64], period: Option<f64>) -> Result<()> {
    if let Some(i) = x.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonMonotoneNodes { index: i });
    }
    if let Some(i) = x.windows(2).position(|w| w[1] <= w[0]) {
        return Err(Error::NonMonotoneNodes { index: i + 1 });
    }
    if let (Some(p), Some(first), Some(last)) = (period, x.first(), x.last()) {
        if first + p <= *last {
            return Err(Error::NonMonotoneNodes { index: 0 });
        }
    }
    Ok(())
}

/// Solves a tridiagonal system with corner entries `lower[0]` (row 0, column
/// n-1) and `upper[n-1]` (row n-1, column 0) via Sherman–Morrison.
fn solve_cyclic_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let alpha = upper[n - 1];
    let beta = lower[0];
    let gamma = -diag[0];
    let mut b = diag.to_vec();
    b[0] -= gamma;
    b[n - 1] -= alpha * beta / gamma;
    let x = solve_tridiagonal(lower, &b, upper, rhs);
    let mut corr = vec![0.0; n];
    corr[0] = gamma;
    corr[n - 1] = alpha;
    let z = solve_tridiagonal(lower, &b, upper, &corr);
    let fact = (x[0] + beta * x[n - 1] / gamma) / (1.0 + z[0] + beta * z[n - 1] / gamma);
    x.iter().zip(&z).map(|(xi, zi)| xi - fact * zi).collect()
}

/// Thomas algorithm; `lower[0]` and `upper[n-1]` are ignored.
fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = upper[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - lower[i] * c[i - 1];
        c[i] = if i + 1 < n { upper[i] / m } else { 0.0 };
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / m;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    d
}
