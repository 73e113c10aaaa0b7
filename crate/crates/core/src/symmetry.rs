//! Point symmetries of the viscous Burgers equation acting on discrete data.
//!
//! The five one-parameter groups are
//!
//! ```text
//! Γ1: (t, x, u) ↦ (t + ε, x, u)
//! Γ2: (t, x, u) ↦ (t, x + ε, u)
//! Γ3: (t, x, u) ↦ (t, x + ε t, u + ε)
//! Γ4: (t, x, u) ↦ (e^{2ε} t, e^{ε} x, e^{-ε} u)
//! Γ5: (t, x, u) ↦ (t/(1 - ε t), x/(1 - ε t), u (1 - ε t) + ε x)
//! ```
//!
//! Γ1–Γ4 form the subgroup compatible with periodic boundary conditions; Γ5 is
//! provided as a map only. The second half of the module measures how much a
//! discrete relation changes when its stencil is transformed, which certifies
//! (or refutes) invariance sample by sample.

use crate::error::{Error, Result};
use crate::mesh::{GridSlice, MonitorForm, MonitorParams};
use crate::scheme::DiscreteField;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Generator {
    TimeTranslation,
    SpaceTranslation,
    GalileanBoost,
    Scaling,
    TimeInversion,
}

impl Generator {
    /// Γ1–Γ4.
    pub const PERIODIC_SUBGROUP: [Generator; 4] = [
        Generator::TimeTranslation,
        Generator::SpaceTranslation,
        Generator::GalileanBoost,
        Generator::Scaling,
    ];
}

/// A group element `exp(ε v)` plus the optional equivalence extensions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupElement {
    pub generator: Generator,
    pub epsilon: f64,
    /// Scale the monitor parameter under [`Generator::Scaling`] so that the
    /// monitor values are unchanged; see [`GroupElement::apply_monitor`].
    pub extend_alpha: bool,
    /// Transform the frame velocity like a velocity: `c ↦ c + ε` under a boost,
    /// `c ↦ e^{-ε} c` under scaling.
    pub extend_c: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceTimePoint {
    pub t: f64,
    pub x: f64,
    pub u: f64,
}

impl SpaceTimePoint {
    pub fn new(t: f64, x: f64, u: f64) -> Self {
        SpaceTimePoint { t, x, u }
    }
}

impl GroupElement {
    pub fn new(generator: Generator, epsilon: f64) -> Self {
        GroupElement { generator, epsilon, extend_alpha: false, extend_c: false }
    }

    pub fn galilean(epsilon: f64) -> Self {
        GroupElement::new(Generator::GalileanBoost, epsilon)
    }

    pub fn scaling(epsilon: f64) -> Self {
        GroupElement::new(Generator::Scaling, epsilon)
    }

    pub fn with_alpha_extension(self) -> Self {
        GroupElement { extend_alpha: true, ..self }
    }

    pub fn with_c_extension(self) -> Self {
        GroupElement { extend_c: true, ..self }
    }

    pub fn inverse(self) -> Self {
        GroupElement { epsilon: -self.epsilon, ..self }
    }

    fn inversion_factor(&self, t: f64) -> Result<f64> {
        let f = 1.0 - self.epsilon * t;
        if f > 0.0 {
            Ok(f)
        } else {
            Err(Error::DomainViolation { t, epsilon: self.epsilon })
        }
    }

    pub fn apply_point(&self, p: SpaceTimePoint) -> Result<SpaceTimePoint> {
        let e = self.epsilon;
        let SpaceTimePoint { t, x, u } = p;
        Ok(match self.generator {
            Generator::TimeTranslation => SpaceTimePoint::new(t + e, x, u),
            Generator::SpaceTranslation => SpaceTimePoint::new(t, x + e, u),
            Generator::GalileanBoost => SpaceTimePoint::new(t, x + e * t, u + e),
            Generator::Scaling => SpaceTimePoint::new((2.0 * e).exp() * t, e.exp() * x, (-e).exp() * u),
            Generator::TimeInversion => {
                let f = self.inversion_factor(t)?;
                SpaceTimePoint::new(t / f, x / f, u * f + e * x)
            }
        })
    }

    /// Image of a time stamp.
    pub fn apply_time(&self, t: f64) -> Result<f64> {
        Ok(self.apply_point(SpaceTimePoint::new(t, 0.0, 0.0))?.t)
    }

    /// Image of a position at time `t`; does not depend on `u` for any generator.
    pub fn apply_position(&self, t: f64, x: f64) -> Result<f64> {
        Ok(self.apply_point(SpaceTimePoint::new(t, x, 0.0))?.x)
    }

    /// Image of a time difference `dt` starting at `t`.
    pub fn apply_duration(&self, t: f64, dt: f64) -> Result<f64> {
        let e = self.epsilon;
        Ok(match self.generator {
            Generator::TimeTranslation | Generator::SpaceTranslation | Generator::GalileanBoost => dt,
            Generator::Scaling => (2.0 * e).exp() * dt,
            Generator::TimeInversion => {
                let f0 = self.inversion_factor(t)?;
                let f1 = self.inversion_factor(t + dt)?;
                dt / (f0 * f1)
            }
        })
    }

    /// Image of a length such as the domain period.
    fn apply_length(&self, t: f64, length: f64) -> Result<f64> {
        Ok(match self.generator {
            Generator::Scaling => self.epsilon.exp() * length,
            Generator::TimeInversion => length / self.inversion_factor(t)?,
            _ => length,
        })
    }

    pub fn apply_grid(&self, grid: &GridSlice) -> Result<GridSlice> {
        let t = grid.t();
        let x = grid.x().iter().map(|&x| self.apply_position(t, x)).collect::<Result<Vec<_>>>()?;
        GridSlice::new(
            self.apply_time(t)?,
            x,
            self.apply_position(t, grid.domain_start())?,
            self.apply_length(t, grid.domain_length())?,
        )
    }

    /// Acts on every node `(t, x_i, u_i)` of the slice at once.
    pub fn apply_field(&self, field: &DiscreteField) -> Result<DiscreteField> {
        let t = field.t();
        let u = field
            .x()
            .iter()
            .zip(field.u())
            .map(|(&x, &u)| Ok(self.apply_point(SpaceTimePoint::new(t, x, u))?.u))
            .collect::<Result<Vec<_>>>()?;
        DiscreteField::new(self.apply_grid(field.grid())?, u)
    }

    /// `α ↦ e^{4ε} α` for the squared monitor: `u_x` scales like `e^{-2ε}`.
    pub fn apply_alpha(&self, alpha: f64) -> f64 {
        self.apply_monitor(&MonitorParams { alpha, form: MonitorForm::Squared }).alpha
    }

    /// Transforms the monitor parameter; the literal form `√(1 + α u_x)` needs `e^{2ε}`.
    pub fn apply_monitor(&self, params: &MonitorParams) -> MonitorParams {
        if !(self.extend_alpha && self.generator == Generator::Scaling) {
            return *params;
        }
        let power = match params.form {
            MonitorForm::Squared => 4.0,
            MonitorForm::Literal => 2.0,
        };
        MonitorParams { alpha: (power * self.epsilon).exp() * params.alpha, ..*params }
    }

    pub fn apply_frame_velocity(&self, c: f64) -> f64 {
        if !self.extend_c {
            return c;
        }
        match self.generator {
            Generator::GalileanBoost => c + self.epsilon,
            Generator::Scaling => (-self.epsilon).exp() * c,
            _ => c,
        }
    }

    /// Transforms every member of a stencil, with `dt` treated as a time difference.
    pub fn apply_stencil(&self, s: &Stencil) -> Result<Stencil> {
        let mut x = [0.0; 3];
        let mut u = [0.0; 3];
        for k in 0..3 {
            let p = self.apply_point(SpaceTimePoint::new(s.t, s.x[k], s.u[k]))?;
            x[k] = p.x;
            u[k] = p.u;
        }
        let next = self.apply_point(SpaceTimePoint::new(s.t + s.dt, s.x_next, s.u_next))?;
        Ok(Stencil {
            t: self.apply_time(s.t)?,
            dt: self.apply_duration(s.t, s.dt)?,
            x,
            u,
            x_next: next.x,
            u_next: next.u,
            c: self.apply_frame_velocity(s.c),
        })
    }
}

/// Three-point stencil on layer `n` plus the centre node on layer `n + 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stencil {
    pub t: f64,
    pub dt: f64,
    /// `x_{i-1}, x_i, x_{i+1}` on layer `n`.
    pub x: [f64; 3],
    pub u: [f64; 3],
    pub x_next: f64,
    pub u_next: f64,
    /// Frame velocity of the constant-velocity grid equation.
    pub c: f64,
}

impl Stencil {
    fn grid_velocity(&self) -> f64 {
        (self.x_next - self.x[1]) / self.dt
    }
}

/// A discrete relation `R(stencil) = 0`.
pub trait DiscreteRelation {
    fn residual(&self, s: &Stencil) -> f64;

    /// Rounding magnitude of evaluating [`Self::residual`]: the same expression
    /// with every operand taken in absolute value.
    fn scale(&self, s: &Stencil) -> f64;

    /// `u^{n+1}` making the residual vanish, when the relation determines it.
    fn solve_next(&self, _s: &Stencil) -> Option<f64> {
        None
    }
}

/// Moving-mesh Burgers scheme with grid velocity `ẋ = (x^{n+1} - x^n)/Δt`.
#[derive(Debug, Clone, Copy)]
pub struct InvariantScheme {
    pub nu: f64,
}

/// FTCS read as a moving-mesh relation with `ẋ = 0` regardless of the node motion.
#[derive(Debug, Clone, Copy)]
pub struct FixedGridFtcs {
    pub nu: f64,
}

/// `x_i^{n+1} - x_i^n = 0`.
#[derive(Debug, Clone, Copy)]
pub struct StationaryGrid;

/// `x_i^{n+1} - x_i^n - c Δt = 0`.
#[derive(Debug, Clone, Copy)]
pub struct ConstantVelocityGrid;

/// `(x_i^{n+1} - x_i^n)/Δt - u_i^n = 0`.
#[derive(Debug, Clone, Copy)]
pub struct LagrangianGrid;

fn burgers_terms(s: &Stencil, nu: f64, grid_velocity: f64) -> (f64, f64) {
    let [xm, x0, xp] = s.x;
    let [um, u0, up] = s.u;
    let advection = (u0 - grid_velocity) * (up - um) / (xp - xm);
    let diffusion = 2.0 * nu / (xp - xm) * ((up - u0) / (xp - x0) - (u0 - um) / (x0 - xm));
    (advection, diffusion)
}

fn burgers_scale(s: &Stencil, nu: f64, moving: bool) -> f64 {
    let [xm, x0, xp] = s.x;
    let [um, u0, up] = s.u;
    let velocity = if moving { (s.x_next.abs() + x0.abs()) / s.dt } else { 0.0 };
    (s.u_next.abs() + u0.abs()) / s.dt
        + (u0.abs() + velocity) * (up.abs() + um.abs()) / (xp - xm).abs()
        + 2.0 * nu / (xp - xm).abs() * ((up.abs() + u0.abs()) / (xp - x0).abs() + (u0.abs() + um.abs()) / (x0 - xm).abs())
}

impl DiscreteRelation for InvariantScheme {
    fn residual(&self, s: &Stencil) -> f64 {
        let (adv, diff) = burgers_terms(s, self.nu, s.grid_velocity());
        (s.u_next - s.u[1]) / s.dt + adv - diff
    }

    fn scale(&self, s: &Stencil) -> f64 {
        burgers_scale(s, self.nu, true)
    }

    fn solve_next(&self, s: &Stencil) -> Option<f64> {
        let (adv, diff) = burgers_terms(s, self.nu, s.grid_velocity());
        Some(s.u[1] - s.dt * (adv - diff))
    }
}

impl DiscreteRelation for FixedGridFtcs {
    fn residual(&self, s: &Stencil) -> f64 {
        let (adv, diff) = burgers_terms(s, self.nu, 0.0);
        (s.u_next - s.u[1]) / s.dt + adv - diff
    }

    fn scale(&self, s: &Stencil) -> f64 {
        burgers_scale(s, self.nu, false)
    }

    fn solve_next(&self, s: &Stencil) -> Option<f64> {
        let (adv, diff) = burgers_terms(s, self.nu, 0.0);
        Some(s.u[1] - s.dt * (adv - diff))
    }
}

impl DiscreteRelation for StationaryGrid {
    fn residual(&self, s: &Stencil) -> f64 {
        s.x_next - s.x[1]
    }

    fn scale(&self, s: &Stencil) -> f64 {
        s.x_next.abs() + s.x[1].abs()
    }
}

impl DiscreteRelation for ConstantVelocityGrid {
    fn residual(&self, s: &Stencil) -> f64 {
        s.x_next - s.x[1] - s.c * s.dt
    }

    fn scale(&self, s: &Stencil) -> f64 {
        s.x_next.abs() + s.x[1].abs() + (s.c * s.dt).abs()
    }
}

impl DiscreteRelation for LagrangianGrid {
    fn residual(&self, s: &Stencil) -> f64 {
        s.grid_velocity() - s.u[1]
    }

    fn scale(&self, s: &Stencil) -> f64 {
        (s.x_next.abs() + s.x[1].abs()) / s.dt + s.u[1].abs()
    }
}

/// `|R(g·s) - R(s)|`.
pub fn invariance_defect(relation: &dyn DiscreteRelation, g: &GroupElement, stencil: &Stencil) -> Result<f64> {
    let image = g.apply_stencil(stencil)?;
    Ok((relation.residual(&image) - relation.residual(stencil)).abs())
}

/// Deterministic sampler of random stencils.
///
/// Positions lie in `[0, 2π)` with gaps of at least `1e-3`, velocities in
/// `[-2, 2]`, `Δt` is log-uniform in `[1e-5, 1e-2]` and `t` uniform in `[0, 1]`.
#[derive(Debug, Clone)]
pub struct StencilSampler {
    rng: ChaCha8Rng,
}

impl StencilSampler {
    pub const MIN_GAP: f64 = 1e-3;

    pub fn new(seed: u64) -> Self {
        StencilSampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn sample(&mut self) -> Stencil {
        let x = loop {
            let mut x = [
                self.rng.gen_range(0.0..TAU),
                self.rng.gen_range(0.0..TAU),
                self.rng.gen_range(0.0..TAU),
            ];
            x.sort_by(f64::total_cmp);
            if x[1] - x[0] >= Self::MIN_GAP && x[2] - x[1] >= Self::MIN_GAP {
                break x;
            }
        };
        let u = [
            self.rng.gen_range(-2.0..=2.0),
            self.rng.gen_range(-2.0..=2.0),
            self.rng.gen_range(-2.0..=2.0),
        ];
        let dt = 10f64.powf(self.rng.gen_range(-5.0..=-2.0));
        let t = self.rng.gen_range(0.0..=1.0);
        let grid_velocity: f64 = self.rng.gen_range(-2.0..=2.0);
        Stencil {
            t,
            dt,
            x,
            u,
            x_next: x[1] + dt * grid_velocity,
            u_next: self.rng.gen_range(-2.0..=2.0),
            c: self.rng.gen_range(-2.0..=2.0),
        }
    }

    /// A sample whose `u^{n+1}` satisfies `relation` (falls back to a plain sample).
    pub fn sample_on(&mut self, relation: &dyn DiscreteRelation) -> Stencil {
        let mut s = self.sample();
        if let Some(u_next) = relation.solve_next(&s) {
            s.u_next = u_next;
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DefectReport {
    pub samples: usize,
    pub max_defect: f64,
    /// Largest `defect / scale` over the samples.
    pub max_relative: f64,
}

/// Largest invariance defect over `samples` seeded stencils.
///
/// With `on_solutions` the stencils satisfy the relation, which is needed for
/// relations that are only invariant as equations (e.g. scaled by a factor).
pub fn certify(
    relation: &dyn DiscreteRelation,
    g: &GroupElement,
    seed: u64,
    samples: usize,
    on_solutions: bool,
) -> Result<DefectReport> {
    let mut sampler = StencilSampler::new(seed);
    let mut report = DefectReport { samples, max_defect: 0.0, max_relative: 0.0 };
    for _ in 0..samples {
        let s = if on_solutions { sampler.sample_on(relation) } else { sampler.sample() };
        let defect = invariance_defect(relation, g, &s)?;
        let scale = relation.scale(&s).max(relation.scale(&g.apply_stencil(&s)?));
        report.max_defect = report.max_defect.max(defect);
        report.max_relative = report.max_relative.max(defect / scale);
    }
    Ok(report)
}
