//! Experiment layer: error norms against the exact solution, convergence and
//! frame-comparison studies, and the CSV artifacts written by the CLI.

mod csv;
mod settings;

pub use self::csv::{
    write_convergence_csv, write_error_csv, write_frames_csv, write_spacing_csv, write_trajectory_csv, FrameRow,
};
pub use self::settings::{apply_settings, parse_settings, Settings};

use crate::error::{Error, Result};
use crate::exact::{coefficients, FourierCoeffs};
use crate::interp::{project_periodic, InterpKind};
use crate::mesh::GridSlice;
use crate::scheme::{run, DiscreteField, SchemeConfig, SchemeKind, Trajectory};
use crate::symmetry::GroupElement;
use rayon::prelude::*;

/// Tolerance used for the reference series; far below the scheme errors.
pub const EXACT_TOL: f64 = 1e-12;

/// The benchmark initial condition `u(0, x) = sin x`.
pub fn benchmark_initial(x: f64) -> f64 {
    x.sin()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub scheme: SchemeKind,
    pub n: usize,
    pub h: f64,
    pub linf: f64,
    pub rms: f64,
    /// `(x, u_num - u_exact)` at the final nodes, rest frame, wrapped positions.
    pub pointwise: Option<Vec<(f64, f64)>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    pub h: f64,
    pub linf: f64,
    /// `log2(e_{N/2} / e_N)`; `None` on the first row.
    pub order: Option<f64>,
}

/// Final rest-frame field of a trajectory.
pub fn rest_frame_final(traj: &Trajectory) -> Result<DiscreteField> {
    GroupElement::galilean(-traj.config.frame_velocity).apply_field(traj.last())
}

/// Max-norm error of the final layer against the exact solution at the final nodes.
pub fn linf_error(traj: &Trajectory, coeffs: &FourierCoeffs) -> Result<ErrorReport> {
    let field = rest_frame_final(traj)?;
    let exact = coeffs.evaluate_many(field.t(), field.x())?;
    let pointwise: Vec<(f64, f64)> = field
        .grid()
        .wrapped_positions()
        .into_iter()
        .zip(field.u().iter().zip(&exact).map(|(u, e)| u - e))
        .collect();
    let linf = pointwise.iter().map(|(_, d)| d.abs()).fold(0.0, f64::max);
    let rms = (pointwise.iter().map(|(_, d)| d * d).sum::<f64>() / pointwise.len() as f64).sqrt();
    Ok(ErrorReport {
        scheme: traj.config.scheme,
        n: field.len(),
        h: traj.config.h(),
        linf,
        rms,
        pointwise: Some(pointwise),
    })
}

/// Runs the benchmark problem with `config` and measures the final error.
pub fn benchmark_error(config: &SchemeConfig, coeffs: &FourierCoeffs) -> Result<ErrorReport> {
    let traj = run(config, &benchmark_initial, 0)?;
    linf_error(&traj, coeffs)
}

/// One benchmark run per `N` (independent, run concurrently), ordered by `N`.
pub fn convergence_study(template: &SchemeConfig, ns: &[usize]) -> Result<Vec<ConvergenceRow>> {
    if ns.is_empty() {
        return Err(Error::InvalidArgument("no resolutions given".into()));
    }
    if let Some(&n) = ns.iter().find(|n| !n.is_power_of_two()) {
        return Err(Error::InvalidArgument(format!("resolution {n} is not a power of two")));
    }
    if ns.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("resolutions must be strictly increasing".into()));
    }
    let coeffs = coefficients(template.nu, EXACT_TOL)?;
    let errors: Vec<Result<(usize, f64, f64)>> = ns
        .par_iter()
        .map(|&n| {
            let config = SchemeConfig { n_points: n, ..template.clone() };
            let report = benchmark_error(&config, &coeffs).map_err(|e| e.at_resolution(n))?;
            Ok((n, config.h(), report.linf))
        })
        .collect();
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(ns.len());
    for entry in errors {
        let (n, h, linf) = entry?;
        let order = rows.last().map(|prev| (prev.linf / linf).log2() / (prev.h / h).log2());
        rows.push(ConvergenceRow { n, h, linf, order });
    }
    Ok(rows)
}

/// Discrepancy between a run and the same run started from `Γ3(eps3)`-boosted data,
/// after mapping the boosted result back and projecting both final layers onto
/// a common uniform grid with the cubic spline.
///
/// For [`SchemeKind::ConstantFrame`] the grid speed is boosted along with the
/// data (the `c ↦ c + ε` extension).
pub fn frame_comparison(config: &SchemeConfig, eps3: f64) -> Result<f64> {
    if !eps3.is_finite() {
        return Err(Error::InvalidArgument(format!("eps3 must be finite, got {eps3}")));
    }
    let boosted = SchemeConfig { frame_velocity: config.frame_velocity + eps3, ..config.clone() };
    let (a, b) = rayon::join(
        || run(config, &benchmark_initial, 0),
        || run(&boosted, &benchmark_initial, 0),
    );
    let a = rest_frame_final(&a?)?;
    let b = rest_frame_final(&b?)?;
    let common = GridSlice::uniform(config.n_points, config.domain_start, config.domain_length, a.t())?;
    let pa = project_periodic(&a, common.x(), InterpKind::CubicSpline)?;
    let pb = project_periodic(&b, common.x(), InterpKind::CubicSpline)?;
    Ok(pa.iter().zip(&pb).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max))
}

/// `(x_i, x_{i+1} - x_i)` at the final layer, positions wrapped into the domain.
pub fn grid_spacing_profile(traj: &Trajectory) -> Vec<(f64, f64)> {
    let grid = traj.last().grid();
    grid.wrapped_positions().into_iter().zip(grid.gaps()).collect()
}
