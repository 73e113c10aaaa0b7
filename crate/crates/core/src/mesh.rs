//! Grid slices on a periodic interval and the grid equations that move them.
//!
//! Node positions are stored unwrapped: the array index plays the role of the
//! computational coordinate, so a node keeps its index for the whole run even
//! if it drifts out of `[domain_start, domain_start + domain_length)`. Every
//! neighbour difference that crosses the periodic seam gets a `±L` jump.
//!
//! Four grid equations are provided:
//!
//! | equation        | update                                        |
//! |-----------------|-----------------------------------------------|
//! | stationary      | `x_i^{n+1} = x_i^n`                           |
//! | Lagrangian      | `x_i^{n+1} = x_i^n + dt u_i^n`                |
//! | constant frame  | `x_i^{n+1} = x_i^n + c dt`                    |
//! | equidistributed | `(ρ_{i+1}+ρ_i)Δx_i = (ρ_i+ρ_{i-1})Δx_{i-1}`   |

use crate::error::{ensure_positive, Error, Result};
use crate::scheme::DiscreteField;
use std::f64::consts::{PI, TAU};

/// Smallest admissible number of nodes.
pub const MIN_NODES: usize = 4;

/// One time layer of the mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSlice {
    t: f64,
    x: Vec<f64>,
    domain_start: f64,
    domain_length: f64,
}

impl GridSlice {
    /// Validates ordering (including the periodic closure gap) before building the slice.
    pub fn new(t: f64, x: Vec<f64>, domain_start: f64, domain_length: f64) -> Result<Self> {
        if !t.is_finite() || !domain_start.is_finite() {
            return Err(Error::InvalidArgument("time and domain start must be finite".into()));
        }
        ensure_positive("domain_length", domain_length)?;
        if x.len() < MIN_NODES {
            return Err(Error::InvalidArgument(format!(
                "a grid needs at least {MIN_NODES} nodes, got {}",
                x.len()
            )));
        }
        if let Some(index) = x.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonMonotoneNodes { index });
        }
        let grid = GridSlice { t, x, domain_start, domain_length };
        grid.check_ordering()?;
        Ok(grid)
    }

    /// `n` equally spaced nodes starting at `domain_start`.
    pub fn uniform(n: usize, domain_start: f64, domain_length: f64, t: f64) -> Result<Self> {
        let h = domain_length / n as f64;
        let x = (0..n).map(|i| domain_start + i as f64 * h).collect();
        GridSlice::new(t, x, domain_start, domain_length)
    }

    /// `n` uniform nodes on `[0, 2π)` at `t = 0`.
    pub fn uniform_2pi(n: usize) -> Result<Self> {
        GridSlice::uniform(n, 0.0, TAU, 0.0)
    }

    pub(crate) fn from_parts(t: f64, x: Vec<f64>, domain_start: f64, domain_length: f64) -> Self {
        GridSlice { t, x, domain_start, domain_length }
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn domain_start(&self) -> f64 {
        self.domain_start
    }

    pub fn domain_length(&self) -> f64 {
        self.domain_length
    }

    pub fn into_positions(self) -> Vec<f64> {
        self.x
    }

    /// Same nodes, different time stamp.
    pub fn with_time(&self, t: f64) -> Self {
        GridSlice { t, ..self.clone() }
    }

    /// Position of node `i + 1` with the seam jump applied for the last node.
    #[inline]
    pub fn right_neighbor(&self, i: usize) -> f64 {
        let n = self.x.len();
        if i + 1 == n {
            self.x[0] + self.domain_length
        } else {
            self.x[i + 1]
        }
    }

    /// Position of node `i - 1` with the seam jump applied for node 0.
    #[inline]
    pub fn left_neighbor(&self, i: usize) -> f64 {
        if i == 0 {
            self.x[self.x.len() - 1] - self.domain_length
        } else {
            self.x[i - 1]
        }
    }

    /// Periodic gaps `x_{i+1} - x_i`, closing with `x_0 + L - x_{N-1}`.
    pub fn gaps(&self) -> Vec<f64> {
        (0..self.x.len()).map(|i| self.right_neighbor(i) - self.x[i]).collect()
    }

    /// Node positions reduced into `[domain_start, domain_start + L)`.
    pub fn wrapped_positions(&self) -> Vec<f64> {
        self.x.iter().map(|&v| self.wrap(v)).collect()
    }

    pub fn wrap(&self, v: f64) -> f64 {
        let r = self.domain_start + (v - self.domain_start).rem_euclid(self.domain_length);
        if r >= self.domain_start + self.domain_length {
            self.domain_start
        } else {
            r
        }
    }

    /// Largest relative deviation of a gap from the mean spacing.
    pub fn uniformity_defect(&self) -> f64 {
        let h = mean_spacing(self);
        self.gaps().iter().map(|g| (g - h).abs() / h).fold(0.0, f64::max)
    }

    fn check_ordering(&self) -> Result<()> {
        for i in 0..self.x.len() {
            let gap = self.right_neighbor(i) - self.x[i];
            if gap.is_nan() || gap <= 0.0 {
                return Err(Error::NodeCrossing { index: i, gap });
            }
        }
        Ok(())
    }

    fn advanced(&self, x: Vec<f64>, dt: f64) -> Result<Self> {
        let grid = GridSlice::from_parts(self.t + dt, x, self.domain_start, self.domain_length);
        grid.check_ordering()?;
        Ok(grid)
    }
}

/// Which discretisation of `ρ = sqrt(1 + α u_x²)` to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MonitorForm {
    /// `sqrt(1 + α q²)` with the centred quotient `q`.
    #[default]
    Squared,
    /// `sqrt(1 + α q)`, the unsquared form; the radicand can become negative.
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonitorParams {
    /// Units of length²/velocity² so that `α u_x²` is dimensionless.
    pub alpha: f64,
    pub form: MonitorForm,
}

impl MonitorParams {
    pub fn new(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha < 0.0 {
            return Err(Error::InvalidArgument(format!("alpha must be finite and >= 0, got {alpha}")));
        }
        Ok(MonitorParams { alpha, form: MonitorForm::Squared })
    }

    pub fn with_form(self, form: MonitorForm) -> Self {
        MonitorParams { form, ..self }
    }
}

impl Default for MonitorParams {
    fn default() -> Self {
        MonitorParams { alpha: 1.0, form: MonitorForm::Squared }
    }
}

/// Stopping rule for the equidistribution sweeps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelaxationParams {
    pub max_iters: usize,
    /// Largest nodal update of a sweep at which iteration stops.
    pub tolerance: f64,
}

impl RelaxationParams {
    pub fn new(max_iters: usize, tolerance: f64) -> Result<Self> {
        if max_iters == 0 {
            return Err(Error::InvalidArgument("max_iters must be at least 1".into()));
        }
        ensure_positive("tolerance", tolerance)?;
        Ok(RelaxationParams { max_iters, tolerance })
    }

    /// `50 N` sweeps and a `1e-12 L` tolerance on the estimated error.
    pub fn default_for(n: usize, domain_length: f64) -> Self {
        RelaxationParams { max_iters: 50 * n.max(1), tolerance: 1e-12 * domain_length }
    }
}

/// `L / N`.
pub fn mean_spacing(grid: &GridSlice) -> f64 {
    grid.domain_length / grid.len() as f64
}

pub fn advance_stationary(grid: &GridSlice, dt: f64) -> Result<GridSlice> {
    ensure_positive("dt", dt)?;
    Ok(grid.with_time(grid.t + dt))
}

/// Moves every node with the local fluid velocity.
pub fn advance_lagrangian(grid: &GridSlice, u: &[f64], dt: f64) -> Result<GridSlice> {
    ensure_positive("dt", dt)?;
    if u.len() != grid.len() {
        return Err(Error::ShapeMismatch { expected: grid.len(), found: u.len() });
    }
    let x = grid.x.iter().zip(u).map(|(&x, &v)| x + dt * v).collect();
    grid.advanced(x, dt)
}

/// Rigid translation with the frame velocity `c`.
pub fn advance_constant(grid: &GridSlice, c: f64, dt: f64) -> Result<GridSlice> {
    ensure_positive("dt", dt)?;
    if !c.is_finite() {
        return Err(Error::InvalidArgument(format!("frame velocity must be finite, got {c}")));
    }
    let x = grid.x.iter().map(|&x| x + c * dt).collect();
    grid.advanced(x, dt)
}

/// Arc-length type monitor evaluated with the periodic centred difference quotient.
pub fn monitor(field: &DiscreteField, params: &MonitorParams) -> Vec<f64> {
    let grid = field.grid();
    let u = field.u();
    let n = u.len();
    if params.alpha == 0.0 {
        return vec![1.0; n];
    }
    (0..n)
        .map(|i| {
            let up = u[(i + 1) % n];
            let um = u[(i + n - 1) % n];
            let q = (up - um) / (grid.right_neighbor(i) - grid.left_neighbor(i));
            match params.form {
                MonitorForm::Squared => (1.0 + params.alpha * q * q).sqrt(),
                MonitorForm::Literal => (1.0 + params.alpha * q).sqrt(),
            }
        })
        .collect()
}

/// Residual `(ρ_{i+1}+ρ_i)(x_{i+1}-x_i) - (ρ_i+ρ_{i-1})(x_i-x_{i-1})` at every node.
pub fn equidistribution_residual(grid: &GridSlice, rho: &[f64]) -> Vec<f64> {
    let n = grid.len();
    (0..n)
        .map(|i| {
            let rp = rho[(i + 1) % n];
            let rm = rho[(i + n - 1) % n];
            (rp + rho[i]) * (grid.right_neighbor(i) - grid.x[i])
                - (rho[i] + rm) * (grid.x[i] - grid.left_neighbor(i))
        })
        .collect()
}

/// Places `x^{n+1}` by equidistributing the lagged monitor `ρ(x^n, u^n)`.
///
/// Node 0 moves Lagrangianly, `x_0^{n+1} = x_0^n + dt u_0^n`, which closes the
/// otherwise singular cyclic system without breaking any of Γ1–Γ4.
pub fn advance_equidistributed(
    field: &DiscreteField,
    params: &MonitorParams,
    relax: &RelaxationParams,
    dt: f64,
) -> Result<GridSlice> {
    let grid = field.grid();
    advance_equidistributed_from(field, params, relax, dt, &anchor_offsets(grid.x()))
}

/// [`advance_equidistributed`] with the sweeps started from `guess`, the
/// predicted offsets `x_i^{n+1} - x_0^{n+1}` (so `guess[0] = 0`).
///
/// The guess only affects the number of sweeps, not the converged mesh.
pub fn advance_equidistributed_from(
    field: &DiscreteField,
    params: &MonitorParams,
    relax: &RelaxationParams,
    dt: f64,
    guess: &[f64],
) -> Result<GridSlice> {
    ensure_positive("dt", dt)?;
    let grid = field.grid();
    if guess.len() != grid.len() {
        return Err(Error::ShapeMismatch { expected: grid.len(), found: guess.len() });
    }
    let rho = monitor(field, params);
    let anchor = grid.x[0] + dt * field.u()[0];
    let x = equidistribute(grid, &rho, anchor, guess, relax)?;
    grid.advanced(x, dt)
}

/// `x_i - x_0`.
pub fn anchor_offsets(x: &[f64]) -> Vec<f64> {
    x.iter().map(|&v| v - x[0]).collect()
}

/// Iterates `x ← equidistribute(ρ(x, u0(x)))` with node 0 pinned until the mesh
/// stops moving, giving a starting mesh already adapted to `u0`.
pub fn equidistributed_initial_grid(
    grid: &GridSlice,
    initial: &dyn Fn(f64) -> f64,
    params: &MonitorParams,
    relax: &RelaxationParams,
) -> Result<GridSlice> {
    const MAX_OUTER: usize = 500;
    let mut current = grid.clone();
    for _ in 0..MAX_OUTER {
        let u: Vec<f64> = current.x.iter().map(|&x| initial(x)).collect();
        let field = DiscreteField::new(current.clone(), u)?;
        let rho = monitor(&field, params);
        let x = equidistribute(&current, &rho, current.x[0], &anchor_offsets(&current.x), relax)?;
        let change = x.iter().zip(&current.x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        current = GridSlice::from_parts(grid.t, x, grid.domain_start, grid.domain_length);
        current.check_ordering()?;
        if change <= relax.tolerance {
            return Ok(current);
        }
    }
    Err(Error::NoConvergence { iterations: MAX_OUTER, last_update: f64::NAN })
}

/// SOR sweeps on the anchored equidistribution system.
///
/// Unknowns are offsets `y_i = x_i - anchor` with `y_0 = 0` and `y_N = L`, so
/// the sweeps see identical numbers in any translated or boosted frame.
fn equidistribute(
    grid: &GridSlice,
    rho: &[f64],
    anchor: f64,
    guess: &[f64],
    relax: &RelaxationParams,
) -> Result<Vec<f64>> {
    let n = grid.len();
    let length = grid.domain_length;
    if let Some(index) = rho.iter().position(|r| !r.is_finite()) {
        return Err(Error::InvalidMonitor { index });
    }
    // cell weights: w[i] couples nodes i and i+1
    let w: Vec<f64> = (0..n).map(|i| rho[i] + rho[(i + 1) % n]).collect();
    let mut y = guess.to_vec();
    y.push(length);
    y[0] = 0.0;

    let omega = sor_factor(&w);
    let max_rho = rho.iter().cloned().fold(1.0, f64::max);
    let residual_bound = relax.tolerance * length * max_rho;
    let floor = 16.0 * f64::EPSILON * length;
    // sweep updates, for the contraction estimate
    let mut updates: Vec<f64> = Vec::new();
    let mut last_update = f64::INFINITY;
    for _ in 0..relax.max_iters {
        let mut update = 0.0f64;
        for i in 1..n {
            let target = (w[i] * y[i + 1] + w[i - 1] * y[i - 1]) / (w[i] + w[i - 1]);
            let delta = omega * (target - y[i]);
            y[i] += delta;
            update = update.max(delta.abs());
        }
        last_update = update;
        updates.push(update);
        if update <= floor || estimated_error(&updates) <= relax.tolerance {
            let residual = (1..n)
                .map(|i| (w[i] * (y[i + 1] - y[i]) - w[i - 1] * (y[i] - y[i - 1])).abs())
                .fold(0.0, f64::max);
            if residual <= residual_bound {
                y.pop();
                return Ok(y.into_iter().map(|v| anchor + v).collect());
            }
        }
    }
    Err(Error::NoConvergence { iterations: relax.max_iters, last_update })
}

/// Over-relaxation factor from the slowest mode of the weighted chain.
///
/// With resistance `R = Σ 1/w_i` and capacity `C = Σ (w_i + w_{i-1})` that mode
/// decays like `λ ≈ π² / (R C)`, which reduces to `1 - cos(π/N)` for constant weights.
fn sor_factor(w: &[f64]) -> f64 {
    let n = w.len();
    let resistance: f64 = w.iter().map(|v| 1.0 / v).sum();
    let capacity: f64 = (0..n).map(|i| w[i] + w[(i + n - 1) % n]).sum();
    let mu = 1.0 - PI * PI / (resistance * capacity);
    2.0 / (1.0 + (1.0 - mu * mu).max(0.0).sqrt())
}

/// Distance to the fixed point, `δ r / (1 - r)` with `r` the mean contraction
/// over the last 8 sweeps; infinite until that is available.
fn estimated_error(updates: &[f64]) -> f64 {
    const SPAN: usize = 8;
    let k = updates.len();
    if k <= SPAN || updates[k - 1 - SPAN] <= 0.0 {
        return f64::INFINITY;
    }
    let last = updates[k - 1];
    let r = (last / updates[k - 1 - SPAN]).powf(1.0 / SPAN as f64);
    if r < 1.0 {
        last * r / (1.0 - r)
    } else {
        f64::INFINITY
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sin_field(n: usize) -> DiscreteField {
        let grid = GridSlice::uniform_2pi(n).unwrap();
        let u = grid.x().iter().map(|x| x.sin()).collect();
        DiscreteField::new(grid, u).unwrap()
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(GridSlice::new(0.0, vec![0.0, 1.0, 2.0], 0.0, 4.0).is_err());
        assert!(matches!(
            GridSlice::new(0.0, vec![0.0, 1.0, 1.0, 2.0], 0.0, 4.0),
            Err(Error::NodeCrossing { index: 1, .. })
        ));
        // closure gap x_0 + L - x_{N-1} must be positive
        assert!(GridSlice::new(0.0, vec![0.0, 1.0, 2.0, 4.5], 0.0, 4.0).is_err());
        assert!(GridSlice::new(0.0, vec![0.0, 1.0, 2.0, 3.0], 0.0, 4.0).is_ok());
    }

    #[test]
    fn stationary_keeps_positions() {
        let grid = GridSlice::uniform_2pi(64).unwrap();
        let next = advance_stationary(&grid, 0.01).unwrap();
        assert_eq!(next.x(), grid.x());
        assert!((next.t() - 0.01).abs() < 1e-15);
        assert!(advance_stationary(&grid, 0.0).is_err());
    }

    #[test]
    fn lagrangian_matches_elementwise_formula() {
        let field = sin_field(8);
        let next = advance_lagrangian(field.grid(), field.u(), 0.1).unwrap();
        let h = TAU / 8.0;
        for i in 0..8 {
            let xi = i as f64 * h;
            assert_eq!(next.x()[i], xi + 0.1 * xi.sin());
        }
    }

    #[test]
    fn lagrangian_zero_and_constant_velocity() {
        let grid = GridSlice::uniform_2pi(16).unwrap();
        let still = advance_lagrangian(&grid, &[0.0; 16], 0.2).unwrap();
        assert_eq!(still.x(), grid.x());
        let moved = advance_lagrangian(&grid, &[3.0; 16], 0.2).unwrap();
        for (a, b) in moved.gaps().iter().zip(grid.gaps()) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!((moved.x()[5] - grid.x()[5] - 0.6).abs() < 1e-14);
    }

    #[test]
    fn lagrangian_reports_node_crossing() {
        let grid = GridSlice::uniform_2pi(8).unwrap();
        let mut u = vec![0.0; 8];
        u[2] = 10.0;
        let err = advance_lagrangian(&grid, &u, 0.5).unwrap_err();
        assert!(matches!(err, Error::NodeCrossing { index: 2, .. }));
        assert!(advance_lagrangian(&grid, &[0.0; 7], 0.1).is_err());
    }

    #[test]
    fn constant_frame_shift() {
        let grid = GridSlice::uniform_2pi(16).unwrap();
        assert_eq!(advance_constant(&grid, 0.0, 0.01).unwrap(), advance_stationary(&grid, 0.01).unwrap());
        let next = advance_constant(&grid, 1.0, 0.01).unwrap();
        for (a, b) in next.x().iter().zip(grid.x()) {
            assert!((a - b - 0.01).abs() < 1e-15);
        }
    }

    #[test]
    fn mean_spacing_depends_on_n_and_l_only() {
        assert_eq!(mean_spacing(&GridSlice::uniform_2pi(64).unwrap()), TAU / 64.0);
        let g = GridSlice::new(0.0, vec![0.0, 0.5, 2.0, 3.9], 0.0, 4.0).unwrap();
        assert_eq!(mean_spacing(&g), 1.0);
    }

    #[test]
    fn monitor_values() {
        let field = sin_field(64);
        let flat = monitor(&field, &MonitorParams::new(0.0).unwrap());
        assert!(flat.iter().all(|&r| r == 1.0));

        let grid = GridSlice::uniform_2pi(64).unwrap();
        let constant = DiscreteField::new(grid, vec![5.0; 64]).unwrap();
        assert!(monitor(&constant, &MonitorParams::default()).iter().all(|&r| r == 1.0));

        let rho = monitor(&field, &MonitorParams::default());
        let h = TAU / 64.0;
        // centred quotient at x = 0 wraps to x_{N-1} - L
        let oracle = (1.0 + ((h.sin() - (-h).sin()) / (2.0 * h)).powi(2)).sqrt();
        assert!((rho[0] - oracle).abs() < 1e-14);
        assert!((rho[0] - (1.0 + (h.sin() / h).powi(2)).sqrt()).abs() < 1e-14);
        assert!(rho.iter().all(|&r| r >= 1.0));
    }

    #[test]
    fn literal_monitor_can_fail() {
        let field = sin_field(16);
        let params = MonitorParams::new(4.0).unwrap().with_form(MonitorForm::Literal);
        let rho = monitor(&field, &params);
        assert!(rho.iter().any(|r| r.is_nan()));
        let err = advance_equidistributed(&field, &params, &RelaxationParams::default_for(16, TAU), 0.01);
        assert!(matches!(err, Err(Error::InvalidMonitor { .. })));
    }

    #[test]
    fn constant_monitor_gives_uniform_mesh() {
        let field = sin_field(32);
        let params = MonitorParams::new(0.0).unwrap();
        let relax = RelaxationParams::default_for(32, TAU);
        let next = advance_equidistributed(&field, &params, &relax, 0.01).unwrap();
        for g in next.gaps() {
            assert!((g - TAU / 32.0).abs() < 1e-10);
        }
    }

    #[test]
    fn equidistributed_mesh_balances_weighted_cells() {
        let field = sin_field(64);
        let params = MonitorParams::default();
        let relax = RelaxationParams::default_for(64, TAU);
        let next = advance_equidistributed(&field, &params, &relax, 0.01).unwrap();
        let rho = monitor(&field, &params);
        let res = equidistribution_residual(&next, &rho);
        let bound = relax.tolerance * TAU * rho.iter().cloned().fold(0.0, f64::max);
        assert!(res.iter().all(|r| r.abs() <= bound), "{res:?}");
        let total: f64 = next.gaps().iter().sum();
        assert!((total - TAU).abs() <= 1e-12 * TAU);
        assert_eq!(next.x()[0], 0.0);
    }

    #[test]
    fn exhausted_sweeps_report_no_convergence() {
        let field = sin_field(64);
        let relax = RelaxationParams::new(1, 1e-14).unwrap();
        let err = advance_equidistributed(&field, &MonitorParams::default(), &relax, 0.01).unwrap_err();
        assert!(matches!(err, Error::NoConvergence { iterations: 1, .. }));
    }

    #[test]
    fn initial_mesh_is_a_fixed_point() {
        let grid = GridSlice::uniform_2pi(32).unwrap();
        let params = MonitorParams::default();
        let relax = RelaxationParams::default_for(32, TAU);
        let adapted = equidistributed_initial_grid(&grid, &|x: f64| x.sin(), &params, &relax).unwrap();
        let u: Vec<f64> = adapted.x().iter().map(|x| x.sin()).collect();
        let rho = monitor(&DiscreteField::new(adapted.clone(), u).unwrap(), &params);
        let res = equidistribution_residual(&adapted, &rho);
        assert!(res.iter().all(|r| r.abs() < 1e-9));
    }

    #[test]
    fn wrap_into_fundamental_domain() {
        let g = GridSlice::new(0.0, vec![-0.5, 1.0, 2.0, 3.0], 0.0, 4.0).unwrap();
        assert_eq!(g.wrapped_positions(), vec![3.5, 1.0, 2.0, 3.0]);
        assert_eq!(g.left_neighbor(0), -1.0);
        assert_eq!(g.right_neighbor(3), 3.5);
    }
}
