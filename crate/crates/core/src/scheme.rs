//! Explicit time stepping for `u_t + u u_x - ν u_xx = 0` on a periodic mesh.
//!
//! [`invariant_step`] is the moving-mesh update
//!
//! ```text
//! (u_i^{n+1} - u_i^n)/Δt + (u_i^n - ẋ_i) D u_i - 2ν/(x_{i+1}-x_{i-1}) [Δ⁺u/Δ⁺x - Δ⁻u/Δ⁻x] = 0,
//! ẋ_i = (x_i^{n+1} - x_i^n)/Δt,
//! ```
//!
//! which is unchanged by time and space translations, Galilean boosts and
//! scalings. [`run`] pairs it with one of the grid equations from
//! [`crate::mesh`] according to [`SchemeKind`].

use crate::error::{ensure_positive, Error, Result};
use crate::interp::{project_periodic, InterpKind};
use crate::mesh::{
    advance_constant, advance_equidistributed_from, anchor_offsets, advance_lagrangian, advance_stationary,
    equidistributed_initial_grid, mean_spacing, GridSlice, MonitorForm, MonitorParams, RelaxationParams,
    MIN_NODES,
};
use crate::symmetry::GroupElement;
use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

/// Relative gap deviation below which a grid counts as uniform.
pub const UNIFORM_TOLERANCE: f64 = 1e-12;

/// Nodal velocities on one grid slice.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteField {
    grid: GridSlice,
    u: Vec<f64>,
}

impl DiscreteField {
    pub fn new(grid: GridSlice, u: Vec<f64>) -> Result<Self> {
        if u.len() != grid.len() {
            return Err(Error::ShapeMismatch { expected: grid.len(), found: u.len() });
        }
        if let Some(i) = u.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite velocity at node {i}")));
        }
        Ok(DiscreteField { grid, u })
    }

    /// Samples `f` at the grid nodes.
    pub fn sample(grid: GridSlice, f: impl Fn(f64) -> f64) -> Result<Self> {
        let u = grid.x().iter().map(|&x| f(x)).collect();
        DiscreteField::new(grid, u)
    }

    pub fn grid(&self) -> &GridSlice {
        &self.grid
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn t(&self) -> f64 {
        self.grid.t()
    }

    pub fn x(&self) -> &[f64] {
        self.grid.x()
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn into_parts(self) -> (GridSlice, Vec<f64>) {
        (self.grid, self.u)
    }

    pub fn mean(&self) -> f64 {
        self.u.iter().sum::<f64>() / self.u.len() as f64
    }
}

/// Scheme and grid-equation pairing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    /// FTCS on the fixed uniform grid.
    ClassicalFtcs,
    /// Invariant scheme with nodes moving at the fluid velocity.
    Lagrangian,
    /// Invariant scheme on an equidistributing mesh.
    EulerianAdaptive,
    /// Invariant scheme with nodes moving at the constant frame velocity.
    ConstantFrame,
    /// One Lagrangian step followed by projection back to a uniform grid.
    EvolutionProjection,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 5] = [
        SchemeKind::ClassicalFtcs,
        SchemeKind::Lagrangian,
        SchemeKind::EulerianAdaptive,
        SchemeKind::ConstantFrame,
        SchemeKind::EvolutionProjection,
    ];

    /// The four schemes compared in the error table and convergence plots.
    pub const COMPARED: [SchemeKind; 4] = [
        SchemeKind::ClassicalFtcs,
        SchemeKind::Lagrangian,
        SchemeKind::EulerianAdaptive,
        SchemeKind::EvolutionProjection,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::ClassicalFtcs => "ftcs",
            SchemeKind::Lagrangian => "lagrangian",
            SchemeKind::EulerianAdaptive => "adaptive",
            SchemeKind::ConstantFrame => "constant-frame",
            SchemeKind::EvolutionProjection => "evolution-projection",
        }
    }

    /// Whether the full discrete map commutes with Galilean boosts.
    pub fn is_galilean_invariant(self) -> bool {
        matches!(
            self,
            SchemeKind::Lagrangian | SchemeKind::EulerianAdaptive | SchemeKind::EvolutionProjection
        )
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "ftcs" | "classical" | "classical-ftcs" | "fd" => Ok(SchemeKind::ClassicalFtcs),
            "lagrangian" | "lag" => Ok(SchemeKind::Lagrangian),
            "adaptive" | "eulerian-adaptive" | "eulerian" => Ok(SchemeKind::EulerianAdaptive),
            "constant-frame" | "constant" | "frame" => Ok(SchemeKind::ConstantFrame),
            "evolution-projection" | "projection" | "ep" => Ok(SchemeKind::EvolutionProjection),
            other => Err(Error::InvalidArgument(format!("unknown scheme '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemeConfig {
    pub scheme: SchemeKind,
    pub nu: f64,
    pub n_points: usize,
    pub t_final: f64,
    /// `C` in `Δt = C h²`.
    pub dt_factor: f64,
    pub alpha: f64,
    pub monitor_form: MonitorForm,
    /// Galilean parameter applied to the initial data; also the grid speed of
    /// [`SchemeKind::ConstantFrame`].
    pub frame_velocity: f64,
    pub interp: InterpKind,
    /// `None` selects [`RelaxationParams::default_for`].
    pub relax: Option<RelaxationParams>,
    pub domain_start: f64,
    pub domain_length: f64,
}

impl Default for SchemeConfig {
    fn default() -> Self {
        SchemeConfig {
            scheme: SchemeKind::ClassicalFtcs,
            nu: 0.1,
            n_points: 64,
            t_final: 0.5,
            dt_factor: 1.0,
            alpha: 1.0,
            monitor_form: MonitorForm::Squared,
            frame_velocity: 0.0,
            interp: InterpKind::Quadratic,
            relax: None,
            domain_start: 0.0,
            domain_length: TAU,
        }
    }
}

impl SchemeConfig {
    pub fn new(scheme: SchemeKind) -> Self {
        SchemeConfig { scheme, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("nu", self.nu)?;
        ensure_positive("t_final", self.t_final)?;
        ensure_positive("dt_factor", self.dt_factor)?;
        ensure_positive("domain_length", self.domain_length)?;
        if self.n_points < MIN_NODES {
            return Err(Error::InvalidArgument(format!("n_points must be >= {MIN_NODES}")));
        }
        if !self.frame_velocity.is_finite() || !self.domain_start.is_finite() {
            return Err(Error::InvalidArgument("frame velocity and domain start must be finite".into()));
        }
        MonitorParams::new(self.alpha)?;
        if let Some(r) = self.relax {
            RelaxationParams::new(r.max_iters, r.tolerance)?;
        }
        Ok(())
    }

    /// Mean grid spacing `L / N`.
    pub fn h(&self) -> f64 {
        self.domain_length / self.n_points as f64
    }

    /// `C h²`.
    pub fn dt(&self) -> f64 {
        self.dt_factor * self.h() * self.h()
    }

    pub fn monitor(&self) -> MonitorParams {
        MonitorParams { alpha: self.alpha, form: self.monitor_form }
    }

    pub fn relaxation(&self) -> RelaxationParams {
        self.relax.unwrap_or_else(|| RelaxationParams::default_for(self.n_points, self.domain_length))
    }

    /// Step times `0 = t_0 < … < t_K = t_final`; only the last step may be shorter.
    pub fn step_times(&self) -> Vec<f64> {
        let dt = self.dt();
        let steps = ((self.t_final / dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        let mut times: Vec<f64> = (0..steps).map(|k| k as f64 * dt).collect();
        times.push(self.t_final);
        times
    }
}

/// Snapshots of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub snapshots: Vec<DiscreteField>,
    pub config: SchemeConfig,
}

impl Trajectory {
    pub fn initial(&self) -> &DiscreteField {
        &self.snapshots[0]
    }

    pub fn last(&self) -> &DiscreteField {
        self.snapshots.last().expect("trajectory holds at least two snapshots")
    }

    /// Snapshots mapped back to the rest frame with `Γ3(-frame_velocity)`.
    pub fn rest_frame(&self) -> Result<Vec<DiscreteField>> {
        let back = GroupElement::galilean(-self.config.frame_velocity);
        self.snapshots.iter().map(|f| back.apply_field(f)).collect()
    }
}

/// Forward-time centred-space update on a uniform stationary grid.
pub fn ftcs_step_fixed(field: &DiscreteField, dt: f64, nu: f64) -> Result<DiscreteField> {
    ensure_positive("dt", dt)?;
    ensure_positive("nu", nu)?;
    let grid = field.grid();
    let deviation = grid.uniformity_defect();
    if deviation > UNIFORM_TOLERANCE {
        return Err(Error::NonUniformGrid { deviation });
    }
    let h = mean_spacing(grid);
    let u = field.u();
    let n = u.len();
    let next = (0..n)
        .map(|i| {
            let up = u[(i + 1) % n];
            let um = u[(i + n - 1) % n];
            u[i] - dt * u[i] * (up - um) / (2.0 * h) + dt * nu * (up - 2.0 * u[i] + um) / (h * h)
        })
        .collect();
    DiscreteField::new(grid.with_time(grid.t() + dt), next)
}

/// Explicit invariant update from `field_n` onto the already placed `grid_n1`.
pub fn invariant_step(field_n: &DiscreteField, grid_n1: &GridSlice, dt: f64, nu: f64) -> Result<DiscreteField> {
    ensure_positive("dt", dt)?;
    ensure_positive("nu", nu)?;
    let grid = field_n.grid();
    if grid_n1.len() != grid.len() {
        return Err(Error::ShapeMismatch { expected: grid.len(), found: grid_n1.len() });
    }
    let expected_t = grid.t() + dt;
    if (grid_n1.t() - expected_t).abs() > 1e-12 * expected_t.abs().max(1.0) {
        return Err(Error::InvalidArgument(format!(
            "next layer is at t = {} but t + dt = {expected_t}",
            grid_n1.t()
        )));
    }
    let u = field_n.u();
    let x = grid.x();
    let n = u.len();
    let next = (0..n)
        .map(|i| {
            let xp = grid.right_neighbor(i);
            let xm = grid.left_neighbor(i);
            let up = u[(i + 1) % n];
            let um = u[(i + n - 1) % n];
            let grid_velocity = (grid_n1.x()[i] - x[i]) / dt;
            let advection = (u[i] - grid_velocity) * (up - um) / (xp - xm);
            let diffusion = 2.0 * nu / (xp - xm) * ((up - u[i]) / (xp - x[i]) - (u[i] - um) / (x[i] - xm));
            u[i] - dt * (advection - diffusion)
        })
        .collect();
    DiscreteField::new(grid_n1.clone(), next)
}

/// Lagrangian move, invariant update, then projection onto the previous layer
/// translated by `dt` times the nodal mean velocity.
///
/// The rigid translation keeps the grid uniform and makes the projection
/// targets transform like every other node under a Galilean boost; for
/// zero-mean data it is the original grid.
pub fn evolution_projection_step(
    field: &DiscreteField,
    dt: f64,
    nu: f64,
    interp: InterpKind,
) -> Result<DiscreteField> {
    let moved = advance_lagrangian(field.grid(), field.u(), dt)?;
    let evolved = invariant_step(field, &moved, dt, nu)?;
    let target = advance_constant(field.grid(), field.mean(), dt)?;
    let u = project_periodic(&evolved, target.x(), interp)?;
    DiscreteField::new(target, u)
}

/// Integrates `initial` from `t = 0` to `config.t_final`.
///
/// The initial data is boosted with `Γ3(frame_velocity)` before stepping.
/// `snapshot_every = k > 0` keeps every k-th step; the first and last layers
/// are always kept.
pub fn run(config: &SchemeConfig, initial: &dyn Fn(f64) -> f64, snapshot_every: usize) -> Result<Trajectory> {
    config.validate()?;
    let uniform = GridSlice::uniform(config.n_points, config.domain_start, config.domain_length, 0.0)?;
    let relax = config.relaxation();
    let monitor = config.monitor();
    let grid0 = match config.scheme {
        SchemeKind::EulerianAdaptive => equidistributed_initial_grid(&uniform, initial, &monitor, &relax)?,
        _ => uniform,
    };
    let rest = DiscreteField::sample(grid0, initial)?;
    let mut field = GroupElement::galilean(config.frame_velocity).apply_field(&rest)?;

    let times = config.step_times();
    let steps = times.len() - 1;
    let mut snapshots = vec![field.clone()];
    // recent mesh offsets, newest last; only the adaptive grid uses them
    let mut history: Vec<Vec<f64>> = Vec::new();
    for k in 0..steps {
        let dt = times[k + 1] - times[k];
        if config.scheme == SchemeKind::EulerianAdaptive {
            history.push(anchor_offsets(field.x()));
            if history.len() > 3 {
                history.remove(0);
            }
        }
        let guess = extrapolate(&history);
        field = step(config, &field, dt, &monitor, &relax, &guess).map_err(|e| e.at_step(k))?;
        // land exactly on the nominal step time
        let (grid, u) = field.into_parts();
        field = DiscreteField { grid: grid.with_time(times[k + 1]), u };
        if k + 1 == steps || (snapshot_every > 0 && (k + 1) % snapshot_every == 0) {
            snapshots.push(field.clone());
        }
    }
    Ok(Trajectory { snapshots, config: config.clone() })
}

/// Polynomial extrapolation of the next mesh offsets from the last (up to) three.
fn extrapolate(history: &[Vec<f64>]) -> Vec<f64> {
    match history {
        [] => Vec::new(),
        [a] => a.clone(),
        [a, b] => b.iter().zip(a).map(|(b, a)| 2.0 * b - a).collect(),
        [.., a, b, c] => (0..c.len()).map(|i| 3.0 * c[i] - 3.0 * b[i] + a[i]).collect(),
    }
}

fn step(
    config: &SchemeConfig,
    field: &DiscreteField,
    dt: f64,
    monitor: &MonitorParams,
    relax: &RelaxationParams,
    guess: &[f64],
) -> Result<DiscreteField> {
    let nu = config.nu;
    match config.scheme {
        SchemeKind::ClassicalFtcs => ftcs_step_fixed(field, dt, nu),
        SchemeKind::Lagrangian => {
            let next = advance_lagrangian(field.grid(), field.u(), dt)?;
            invariant_step(field, &next, dt, nu)
        }
        SchemeKind::EulerianAdaptive => {
            let next = advance_equidistributed_from(field, monitor, relax, dt, guess)?;
            invariant_step(field, &next, dt, nu)
        }
        SchemeKind::ConstantFrame => {
            let next = if config.frame_velocity == 0.0 {
                advance_stationary(field.grid(), dt)?
            } else {
                advance_constant(field.grid(), config.frame_velocity, dt)?
            };
            invariant_step(field, &next, dt, nu)
        }
        SchemeKind::EvolutionProjection => evolution_projection_step(field, dt, nu, config.interp),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sin_field(n: usize) -> DiscreteField {
        DiscreteField::sample(GridSlice::uniform_2pi(n).unwrap(), f64::sin).unwrap()
    }

    #[test]
    fn field_shape_is_checked() {
        let grid = GridSlice::uniform_2pi(8).unwrap();
        assert!(matches!(
            DiscreteField::new(grid.clone(), vec![0.0; 7]),
            Err(Error::ShapeMismatch { expected: 8, found: 7 })
        ));
        assert!(DiscreteField::new(grid, vec![f64::NAN; 8]).is_err());
    }

    #[test]
    fn ftcs_fixed_points() {
        let grid = GridSlice::uniform_2pi(16).unwrap();
        let c = DiscreteField::new(grid.clone(), vec![0.7; 16]).unwrap();
        assert_eq!(ftcs_step_fixed(&c, 1e-3, 0.1).unwrap().u(), c.u());
        let z = DiscreteField::new(grid, vec![0.0; 16]).unwrap();
        assert!(ftcs_step_fixed(&z, 1e-3, 0.1).unwrap().u().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn ftcs_matches_direct_formula() {
        let field = sin_field(8);
        let next = ftcs_step_fixed(&field, 1e-3, 0.1).unwrap();
        let h = TAU / 8.0;
        for i in 0..8 {
            let s = |k: i64| ((i as i64 + k) as f64 * h).sin();
            let expected = s(0) - 1e-3 * s(0) * (s(1) - s(-1)) / (2.0 * h)
                + 1e-3 * 0.1 * (s(1) - 2.0 * s(0) + s(-1)) / (h * h);
            assert!((next.u()[i] - expected).abs() <= 1e-15, "node {i}");
        }
    }

    #[test]
    fn ftcs_rejects_nonuniform_grid() {
        let grid = GridSlice::new(0.0, vec![0.0, 1.0, 2.5, 3.0], 0.0, 4.0).unwrap();
        let f = DiscreteField::new(grid, vec![0.0; 4]).unwrap();
        assert!(matches!(ftcs_step_fixed(&f, 0.01, 0.1), Err(Error::NonUniformGrid { .. })));
    }

    #[test]
    fn ftcs_conserves_sum() {
        let grid = GridSlice::uniform_2pi(32).unwrap();
        let f = DiscreteField::sample(grid, |x| 0.3 + x.sin() + 0.5 * (2.0 * x).cos()).unwrap();
        let next = ftcs_step_fixed(&f, 1e-3, 0.1).unwrap();
        let before: f64 = f.u().iter().sum();
        let after: f64 = next.u().iter().sum();
        assert!((before - after).abs() < 1e-13);
    }

    #[test]
    fn invariant_step_degenerates_to_ftcs() {
        let field = sin_field(64);
        let dt = 1e-3;
        let still = advance_stationary(field.grid(), dt).unwrap();
        let a = invariant_step(&field, &still, dt, 0.1).unwrap();
        let b = ftcs_step_fixed(&field, dt, 0.1).unwrap();
        for (p, q) in a.u().iter().zip(b.u()) {
            assert!((p - q).abs() <= 1e-15, "{p} vs {q}");
        }
    }

    #[test]
    fn invariant_step_keeps_constant_state_on_any_mesh() {
        let field = DiscreteField::sample(GridSlice::uniform_2pi(16).unwrap(), |_| 1.25).unwrap();
        let moved = advance_lagrangian(field.grid(), &(0..16).map(|i| (i as f64).cos()).collect::<Vec<_>>(), 0.05)
            .unwrap();
        let next = invariant_step(&field, &moved, 0.05, 0.1).unwrap();
        assert!(next.u().iter().all(|&v| v == 1.25));
    }

    #[test]
    fn invariant_step_checks_layers() {
        let field = sin_field(8);
        let wrong_time = field.grid().with_time(0.3);
        assert!(invariant_step(&field, &wrong_time, 0.1, 0.1).is_err());
        let other = GridSlice::uniform_2pi(9).unwrap().with_time(0.1);
        assert!(matches!(invariant_step(&field, &other, 0.1, 0.1), Err(Error::ShapeMismatch { .. })));
    }

    #[test]
    fn evolution_projection_reproduces_constants() {
        let grid = GridSlice::uniform_2pi(16).unwrap();
        for c in [0.0, 0.8] {
            let field = DiscreteField::new(grid.clone(), vec![c; 16]).unwrap();
            for kind in [InterpKind::Linear, InterpKind::Quadratic, InterpKind::CubicSpline] {
                let next = evolution_projection_step(&field, 0.01, 0.1, kind).unwrap();
                assert!(next.u().iter().all(|&v| (v - c).abs() < 1e-14));
                assert!(next.grid().uniformity_defect() < 1e-12);
                for (a, b) in next.x().iter().zip(grid.x()) {
                    assert!((a - b - c * 0.01).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn step_times_land_on_final_time() {
        let cfg = SchemeConfig { t_final: 0.5, ..Default::default() };
        let times = cfg.step_times();
        assert_eq!(times[0], 0.0);
        assert_eq!(*times.last().unwrap(), 0.5);
        let dt = cfg.dt();
        assert!(times.windows(2).all(|w| w[1] > w[0] && w[1] - w[0] <= dt * (1.0 + 1e-12)));
        let exact = SchemeConfig { t_final: 4.0 * cfg.dt(), ..cfg.clone() };
        assert_eq!(exact.step_times().len(), 5);
    }

    #[test]
    fn zero_data_single_step_for_every_scheme() {
        for scheme in SchemeKind::ALL {
            let cfg = SchemeConfig { n_points: 16, ..SchemeConfig::new(scheme) };
            let cfg = SchemeConfig { t_final: cfg.dt(), ..cfg };
            let traj = run(&cfg, &|_| 0.0, 0).unwrap();
            assert_eq!(traj.snapshots.len(), 2, "{scheme}");
            assert!(traj.snapshots.iter().all(|f| f.u().iter().all(|&v| v == 0.0)));
            assert_eq!(traj.last().t(), cfg.t_final);
        }
    }

    #[test]
    fn snapshot_selection() {
        let cfg = SchemeConfig { n_points: 16, t_final: 0.1, ..Default::default() };
        let steps = cfg.step_times().len() - 1;
        let all = run(&cfg, &f64::sin, 1).unwrap();
        assert_eq!(all.snapshots.len(), steps + 1);
        assert!(all.snapshots.windows(2).all(|w| w[1].t() > w[0].t()));
        let ends = run(&cfg, &f64::sin, 0).unwrap();
        assert_eq!(ends.snapshots.len(), 2);
        assert_eq!(ends.last(), all.last());
    }

    #[test]
    fn run_errors_carry_step_index() {
        // a huge time step forces the Lagrangian nodes to cross
        let cfg = SchemeConfig { scheme: SchemeKind::Lagrangian, n_points: 8, dt_factor: 5.0, ..Default::default() };
        let err = run(&cfg, &|x| 3.0 * x.sin(), 0).unwrap_err();
        assert!(matches!(err, Error::AtStep { .. }), "{err:?}");
        assert_eq!(err.code(), "node_crossing");
    }

    #[test]
    fn scheme_names_round_trip() {
        for s in SchemeKind::ALL {
            assert_eq!(s.name().parse::<SchemeKind>().unwrap(), s);
        }
        assert!("spectral".parse::<SchemeKind>().is_err());
    }
}
