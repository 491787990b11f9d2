//! Time integration of the nonlocal reaction-diffusion system
//!
//! ```text
//! eps n_t = eps^2 theta n_xx + alpha n_thth + r n (1 - rho),
//! rho(x, t) = int n(x, theta, t) dtheta,
//! ```
//!
//! with zero-flux conditions on both trait endpoints. `eps = 1` is the
//! unscaled system. After division by `eps` the step integrates x-diffusion
//! `eps theta`, trait diffusion `alpha / eps` and reaction `(r / eps) n (1 - rho)`.
//! The space axis is truncated with reflecting ends; runs abort before the
//! front reaches them.
//!
//! `rho` is frozen over a step, so the update is local to each space node.
//! Columns are independent and processed in parallel; every reduction runs
//! in a fixed order, so results do not depend on the worker count.

use rayon::prelude::*;

use crate::domain::{
    build_initial_field, Field, InitialDataSpec, ModelParams, SpaceGrid, ThetaGrid,
};
use crate::error::{invalid, Error, Result};
use crate::tridiag::TridiagonalLu;

/// Density level of `rho` that marks the front.
pub const FRONT_LEVEL: f64 = 0.5;
/// Floor used before taking logarithms of the density.
pub const LOG_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Forward Euler on every term.
    Explicit,
    /// Trait diffusion implicit (theta-method weighting), the rest explicit.
    ImexThetaImplicit,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub params: ModelParams,
    pub space: SpaceGrid,
    pub theta: ThetaGrid,
    pub epsilon: f64,
    pub horizon: f64,
    pub cfl_factor: f64,
    pub scheme: Scheme,
    /// Keep every `snapshot_stride`-th step (plus the first and last).
    pub snapshot_stride: usize,
    pub initial: InitialDataSpec,
    /// Implicit weight of the trait diffusion in the IMEX scheme; 0.5 is
    /// Crank-Nicolson, 1 is backward Euler.
    pub implicit_weight: f64,
    /// Switches the theta-dependent x-diffusion off. Only for tests.
    pub x_diffusion: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        let params = ModelParams::default();
        Self {
            params,
            space: SpaceGrid::new(-10.0, 90.0, 1001).expect("valid default grid"),
            theta: ThetaGrid::new(&params, 21).expect("valid default grid"),
            epsilon: 1.0,
            horizon: 30.0,
            cfl_factor: 0.4,
            scheme: Scheme::ImexThetaImplicit,
            snapshot_stride: 5000,
            initial: InitialDataSpec::default(),
            implicit_weight: 0.5,
            x_diffusion: true,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
            return Err(invalid(
                "epsilon",
                format!("must lie in (0, 1], got {}", self.epsilon),
            ));
        }
        if !(self.cfl_factor > 0.0 && self.cfl_factor < 1.0) {
            return Err(invalid(
                "cfl_factor",
                format!("must lie in (0, 1), got {}", self.cfl_factor),
            ));
        }
        if !(self.horizon >= 0.0 && self.horizon.is_finite()) {
            return Err(invalid("horizon", "must be finite and nonnegative"));
        }
        if self.snapshot_stride == 0 {
            return Err(invalid("snapshot_stride", "must be at least 1"));
        }
        if !(self.implicit_weight >= 0.5 && self.implicit_weight <= 1.0) {
            return Err(invalid("implicit_weight", "must lie in [0.5, 1]"));
        }
        if self.theta.theta_min != self.params.theta_min
            || self.theta.theta_max != self.params.theta_max
        {
            return Err(Error::Config(
                "trait grid does not match the model parameters".into(),
            ));
        }
        Ok(())
    }

    /// Stable step: `cfl * min(dx^2 / (2 eps theta_max), dtheta^2 eps / (2 alpha), eps / r)`;
    /// the trait-diffusion bound is dropped for the IMEX scheme.
    pub fn time_step(&self) -> f64 {
        let eps = self.epsilon;
        let p = &self.params;
        let mut bound = eps / p.r;
        if self.x_diffusion {
            bound = bound.min(self.space.spacing().powi(2) / (2.0 * eps * p.theta_max));
        }
        if self.scheme == Scheme::Explicit {
            bound = bound.min(self.theta.spacing().powi(2) * eps / (2.0 * p.alpha));
        }
        self.cfl_factor * bound
    }
}

/// Trapezoid integral over the trait axis at every space node.
pub fn compute_rho(field: &Field) -> Vec<f64> {
    field.columns().map(|c| field.theta.integrate(c)).collect()
}

/// Result of one step with its positivity diagnostic.
#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub field: Field,
    /// Quadrature mass removed by clipping negative values.
    pub clipped_mass: f64,
}

/// Pre-assembled single-step operator for a fixed `dt`.
struct Stepper {
    cfg: SimConfig,
    dt: f64,
    // x-diffusion coefficient per trait node: eps theta_j / dx^2
    x_coef: Vec<f64>,
    theta_coef: f64,
    reaction: f64,
    implicit: Option<TridiagonalLu>,
}

impl Stepper {
    fn new(cfg: &SimConfig, dt: f64) -> Self {
        let eps = cfg.epsilon;
        let dx2 = cfg.space.spacing().powi(2);
        let x_coef = (0..cfg.theta.node_count)
            .map(|j| {
                if cfg.x_diffusion {
                    eps * cfg.theta.node(j) / dx2
                } else {
                    0.0
                }
            })
            .collect();
        let theta_coef = cfg.params.alpha / eps / cfg.theta.spacing().powi(2);
        let implicit = (cfg.scheme == Scheme::ImexThetaImplicit).then(|| {
            let m = cfg.theta.node_count;
            let a = cfg.implicit_weight * dt * theta_coef;
            let mut lower = vec![-a; m];
            let mut upper = vec![-a; m];
            let diag = vec![1.0 + 2.0 * a; m];
            // ghost-node reflection doubles the inward coupling at both ends
            upper[0] = -2.0 * a;
            lower[m - 1] = -2.0 * a;
            lower[0] = 0.0;
            upper[m - 1] = 0.0;
            TridiagonalLu::new(&lower, &diag, &upper)
        });
        Self {
            cfg: *cfg,
            dt,
            x_coef,
            theta_coef,
            reaction: cfg.params.r / eps,
            implicit,
        }
    }

    fn advance(&self, field: &Field) -> Result<StepOutcome> {
        let nx = field.space.node_count;
        let m = field.theta.node_count;
        let rho = compute_rho(field);
        let old = field.values();
        let explicit_theta = match self.cfg.scheme {
            Scheme::Explicit => 1.0,
            Scheme::ImexThetaImplicit => 1.0 - self.cfg.implicit_weight,
        };
        let mut next = vec![0.0; old.len()];
        let clipped: Vec<f64> = next
            .par_chunks_mut(m)
            .enumerate()
            .map(|(i, out)| {
                let here = &old[i * m..(i + 1) * m];
                let left = if i == 0 {
                    &old[m..2 * m]
                } else {
                    &old[(i - 1) * m..i * m]
                };
                let right = if i + 1 == nx {
                    &old[(nx - 2) * m..(nx - 1) * m]
                } else {
                    &old[(i + 1) * m..(i + 2) * m]
                };
                let growth = self.reaction * (1.0 - rho[i]);
                for j in 0..m {
                    let n = here[j];
                    let below = if j == 0 { here[1] } else { here[j - 1] };
                    let above = if j + 1 == m { here[m - 2] } else { here[j + 1] };
                    let x_diff = self.x_coef[j] * (left[j] - 2.0 * n + right[j]);
                    let th_diff = self.theta_coef * (below - 2.0 * n + above);
                    out[j] = n + self.dt * (x_diff + explicit_theta * th_diff + growth * n);
                }
                if let Some(lu) = &self.implicit {
                    lu.solve_in_place(out);
                }
                if out.iter().any(|v| !v.is_finite()) {
                    return f64::NAN;
                }
                let mut removed = 0.0;
                for (j, v) in out.iter_mut().enumerate() {
                    if *v < 0.0 {
                        removed -= *v * field.theta.weight(j);
                        *v = 0.0;
                    }
                }
                removed
            })
            .collect();
        let time = field.time + self.dt;
        if clipped.iter().any(|c| c.is_nan()) {
            return Err(Error::NonFinite { time });
        }
        let clipped_mass = clipped.iter().sum::<f64>() * field.space.spacing();
        Ok(StepOutcome {
            field: Field::from_raw(field.space, field.theta, next, time),
            clipped_mass,
        })
    }
}

/// Advances `field` by one step of size `dt`.
pub fn step(field: &Field, dt: f64, cfg: &SimConfig) -> Result<StepOutcome> {
    cfg.validate()?;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(invalid("dt", "must be positive"));
    }
    if field.space != cfg.space || field.theta != cfg.theta {
        return Err(Error::Config(
            "field grids do not match the configuration".into(),
        ));
    }
    Stepper::new(cfg, dt).advance(field)
}

/// Time-ordered output of [`run_simulation`].
#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    pub snapshots: Vec<Field>,
    /// `(t, x_front)` at every step where a front exists.
    pub front_track: Vec<(f64, f64)>,
    /// `(t, sup n)` at every step.
    pub sup_track: Vec<(f64, f64)>,
    pub dt: f64,
    pub steps: usize,
    pub clipped_mass: f64,
}

impl Trajectory {
    pub fn final_field(&self) -> &Field {
        self.snapshots
            .last()
            .expect("trajectory holds the initial snapshot")
    }
}

/// Integrates from the configured initial data to the horizon.
///
/// The step is `horizon / ceil(horizon / time_step)`. Aborts with
/// [`Error::BoundaryReached`] once the front is within ten cells of either
/// end of the space grid.
pub fn run_simulation(cfg: &SimConfig) -> Result<Trajectory> {
    cfg.validate()?;
    let mut field = build_initial_field(&cfg.initial, cfg.space, cfg.theta)?;
    let mut traj = Trajectory::default();
    let margin = 10.0 * cfg.space.spacing();
    let record = |traj: &mut Trajectory, field: &Field| -> Result<()> {
        let t = field.time;
        if let Some(x) = front_position(field, FRONT_LEVEL) {
            if x >= cfg.space.x_max - margin || x <= cfg.space.x_min + margin {
                return Err(Error::BoundaryReached { time: t, front: x });
            }
            traj.front_track.push((t, x));
        }
        traj.sup_track.push((t, field.sup()));
        Ok(())
    };
    record(&mut traj, &field)?;
    if cfg.horizon == 0.0 {
        traj.snapshots.push(field);
        return Ok(traj);
    }
    let steps = (cfg.horizon / cfg.time_step()).ceil().max(1.0) as usize;
    let dt = cfg.horizon / steps as f64;
    traj.dt = dt;
    traj.steps = steps;
    traj.snapshots.push(field.clone());
    let stepper = Stepper::new(cfg, dt);
    for k in 1..=steps {
        let StepOutcome {
            field: mut next,
            clipped_mass,
        } = stepper.advance(&field)?;
        next.time = if k == steps {
            cfg.horizon
        } else {
            k as f64 * dt
        };
        traj.clipped_mass += clipped_mass;
        field = next;
        record(&mut traj, &field)?;
        if k % cfg.snapshot_stride == 0 || k == steps {
            traj.snapshots.push(field.clone());
        }
    }
    Ok(traj)
}

/// Rightmost position where `rho` crosses `level`, by linear interpolation
/// between neighbouring nodes.
pub fn front_position(field: &Field, level: f64) -> Option<f64> {
    front_position_profile(&field.space, &compute_rho(field), level)
}

/// [`front_position`] for a precomputed `rho` profile.
pub fn front_position_profile(space: &SpaceGrid, rho: &[f64], level: f64) -> Option<f64> {
    let last = rho.iter().rposition(|&v| v >= level)?;
    if last + 1 == rho.len() {
        return Some(space.node(last));
    }
    let (a, b) = (rho[last], rho[last + 1]);
    let frac = (a - level) / (a - b);
    Some(space.node(last) + frac * space.spacing())
}

/// Logarithmic transform `u = eps ln n` and its trait derivative.
#[derive(Debug, Clone)]
pub struct LogTransform {
    /// `eps ln max(n, LOG_FLOOR)`, same layout as the field.
    pub u: Vec<f64>,
    /// Centered trait difference of `u`; zero at the trait endpoints, where
    /// the zero-flux reflection makes the centered difference vanish.
    pub u_theta: Vec<f64>,
    /// Max of `|u_theta|` over the query window, restricted to nodes whose
    /// stencil stays above `1e3 * LOG_FLOOR`.
    pub max_gradient: Option<f64>,
    pub window_nodes: usize,
    /// Window nodes dropped for being too close to the floor.
    pub floor_nodes: usize,
}

/// Computes `u = eps ln n` and `max |d_theta u|` over space nodes inside
/// `window = (x_lo, x_hi)`.
pub fn u_epsilon_field(field: &Field, epsilon: f64, window: (f64, f64)) -> LogTransform {
    let m = field.theta.node_count;
    let dtheta = field.theta.spacing();
    let u: Vec<f64> = field
        .values()
        .iter()
        .map(|&n| epsilon * n.max(LOG_FLOOR).ln())
        .collect();
    let mut u_theta = vec![0.0; u.len()];
    for (col, out) in u.chunks_exact(m).zip(u_theta.chunks_exact_mut(m)) {
        for j in 1..m - 1 {
            out[j] = (col[j + 1] - col[j - 1]) / (2.0 * dtheta);
        }
    }
    let trusted = 1e3 * LOG_FLOOR;
    let mut max_gradient: Option<f64> = None;
    let mut window_nodes = 0;
    let mut floor_nodes = 0;
    for i in 0..field.space.node_count {
        let x = field.space.node(i);
        if x < window.0 || x > window.1 {
            continue;
        }
        let col = field.column(i);
        for j in 0..m {
            window_nodes += 1;
            let lo = j.saturating_sub(1);
            let hi = (j + 1).min(m - 1);
            if col[lo..=hi].iter().any(|&n| n <= trusted) {
                floor_nodes += 1;
                continue;
            }
            let g = u_theta[i * m + j].abs();
            max_gradient = Some(max_gradient.map_or(g, |cur| cur.max(g)));
        }
    }
    LogTransform {
        u,
        u_theta,
        max_gradient,
        window_nodes,
        floor_nodes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::TraitProfile;
    use approx::assert_abs_diff_eq;
    use nalgebra::{DMatrix, DVector};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn small_config(scheme: Scheme, epsilon: f64) -> SimConfig {
        let params = ModelParams::new(1.0, 2.0, 1.0, 1.0).unwrap();
        SimConfig {
            params,
            space: SpaceGrid::new(-3.0, 3.0, 13).unwrap(),
            theta: ThetaGrid::new(&params, 7).unwrap(),
            epsilon,
            horizon: 1.0,
            scheme,
            initial: InitialDataSpec {
                x_halfwidth: 1.0,
                ..InitialDataSpec::default()
            },
            ..SimConfig::default()
        }
    }

    fn random_field(cfg: &SimConfig, seed: u64) -> Field {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Field::from_fn(cfg.space, cfg.theta, 0.0, |_, _| rng.gen_range(0.0..0.2)).unwrap()
    }

    /// Naive per-node reference of one step: explicit parts by direct
    /// indexing with mirrored indices, implicit part by a dense solve.
    fn reference_step(field: &Field, dt: f64, cfg: &SimConfig) -> Vec<f64> {
        let nx = cfg.space.node_count;
        let m = cfg.theta.node_count;
        let dx = cfg.space.spacing();
        let dth = cfg.theta.spacing();
        let eps = cfg.epsilon;
        let p = cfg.params;
        let mirror = |k: isize, n: usize| -> usize {
            if k < 0 {
                (-k) as usize
            } else if k as usize >= n {
                2 * (n - 1) - k as usize
            } else {
                k as usize
            }
        };
        let n = |i: isize, j: isize| field.get(mirror(i, nx), mirror(j, m));
        let w = match cfg.scheme {
            Scheme::Explicit => 0.0,
            Scheme::ImexThetaImplicit => cfg.implicit_weight,
        };
        let mut out = vec![0.0; nx * m];
        for i in 0..nx {
            let mut rho = 0.0;
            for j in 0..m {
                let wt = if j == 0 || j == m - 1 { 0.5 } else { 1.0 };
                rho += wt * dth * field.get(i, j);
            }
            let mut rhs = DVector::<f64>::zeros(m);
            let mut mat = DMatrix::<f64>::identity(m, m);
            for j in 0..m {
                let (ii, jj) = (i as isize, j as isize);
                let theta = p.theta_min + j as f64 * dth;
                let xdiff = if cfg.x_diffusion {
                    eps * theta * (n(ii - 1, jj) - 2.0 * n(ii, jj) + n(ii + 1, jj)) / (dx * dx)
                } else {
                    0.0
                };
                let tdiff =
                    p.alpha / eps * (n(ii, jj - 1) - 2.0 * n(ii, jj) + n(ii, jj + 1)) / (dth * dth);
                let react = p.r / eps * n(ii, jj) * (1.0 - rho);
                rhs[j] = n(ii, jj) + dt * (xdiff + (1.0 - w) * tdiff + react);
                let a = w * dt * p.alpha / eps / (dth * dth);
                mat[(j, j)] += 2.0 * a;
                for (nb, coef) in [(jj - 1, -a), (jj + 1, -a)] {
                    let col = mirror(nb, m);
                    mat[(j, col)] += coef;
                }
            }
            let sol = mat.lu().solve(&rhs).unwrap();
            for j in 0..m {
                out[i * m + j] = sol[j].max(0.0);
            }
        }
        out
    }

    #[test]
    fn rho_quadrature() {
        let cfg = small_config(Scheme::Explicit, 1.0);
        let zero = Field::zeros(cfg.space, cfg.theta, 0.0);
        assert!(compute_rho(&zero).iter().all(|&r| r == 0.0));
        let c = Field::from_fn(cfg.space, cfg.theta, 0.0, |_, _| 0.37).unwrap();
        for r in compute_rho(&c) {
            assert_abs_diff_eq!(r, 0.37, epsilon = 1e-15);
        }
        let theta = ThetaGrid::new(&cfg.params, 81).unwrap();
        let lin = Field::from_fn(cfg.space, theta, 0.0, |_, th| th).unwrap();
        for r in compute_rho(&lin) {
            assert_abs_diff_eq!(r, 1.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn zero_field_is_stationary() {
        for scheme in [Scheme::Explicit, Scheme::ImexThetaImplicit] {
            let cfg = small_config(scheme, 1.0);
            let zero = Field::zeros(cfg.space, cfg.theta, 0.0);
            let out = step(&zero, cfg.time_step(), &cfg).unwrap();
            assert!(out.field.values().iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn uniform_field_follows_logistic_step() {
        for scheme in [Scheme::Explicit, Scheme::ImexThetaImplicit] {
            for eps in [1.0, 0.25] {
                let cfg = small_config(scheme, eps);
                let n0 = 0.3;
                let f = Field::from_fn(cfg.space, cfg.theta, 0.0, |_, _| n0).unwrap();
                let dt = cfg.time_step();
                let out = step(&f, dt, &cfg).unwrap();
                let expected =
                    n0 + dt * (cfg.params.r / eps) * n0 * (1.0 - n0 * cfg.params.trait_width());
                for &v in out.field.values() {
                    assert_abs_diff_eq!(v, expected, epsilon = 1e-14);
                }
            }
        }
    }

    #[test]
    fn matches_naive_reference() {
        for scheme in [Scheme::Explicit, Scheme::ImexThetaImplicit] {
            for (seed, eps) in [(1u64, 1.0), (2, 0.3)] {
                let cfg = small_config(scheme, eps);
                let f = random_field(&cfg, seed);
                let dt = cfg.time_step();
                let fast = step(&f, dt, &cfg).unwrap();
                let slow = reference_step(&f, dt, &cfg);
                for (a, b) in fast.field.values().iter().zip(&slow) {
                    assert!((a - b).abs() <= 1e-13, "{a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn constant_in_x_stays_constant_in_x() {
        let cfg = small_config(Scheme::ImexThetaImplicit, 0.5);
        let f = Field::from_fn(cfg.space, cfg.theta, 0.0, |_, th| {
            0.2 + 0.1 * (3.0 * th).cos()
        })
        .unwrap();
        let out = step(&f, cfg.time_step(), &cfg).unwrap().field;
        let first = out.column(0).to_vec();
        for col in out.columns() {
            for (a, b) in col.iter().zip(&first) {
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn trait_symmetry_persists_without_x_diffusion() {
        for scheme in [Scheme::Explicit, Scheme::ImexThetaImplicit] {
            let mut cfg = small_config(scheme, 1.0);
            cfg.x_diffusion = false;
            cfg.theta = ThetaGrid::new(&cfg.params, 21).unwrap();
            let mid = 1.5;
            let mut f = Field::from_fn(cfg.space, cfg.theta, 0.0, |x, th| {
                (0.3 + 0.2 * (4.0 * (th - mid)).cos()) * (-x * x).exp()
            })
            .unwrap();
            let dt = cfg.time_step();
            for _ in 0..50 {
                f = step(&f, dt, &cfg).unwrap().field;
            }
            for col in f.columns() {
                for j in 0..21 {
                    assert!((col[j] - col[20 - j]).abs() <= 1e-12);
                }
            }
        }
    }

    #[test]
    fn rejects_bad_config() {
        let mut cfg = small_config(Scheme::Explicit, 1.0);
        cfg.epsilon = 0.0;
        assert!(cfg.validate().is_err());
        cfg.epsilon = 1.5;
        assert!(cfg.validate().is_err());
        let mut cfg = small_config(Scheme::Explicit, 1.0);
        cfg.cfl_factor = 1.0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn non_finite_values_abort() {
        let cfg = small_config(Scheme::Explicit, 1.0);
        let f = Field::from_fn(cfg.space, cfg.theta, 0.0, |_, _| 1e300).unwrap();
        assert!(matches!(step(&f, 1.0, &cfg), Err(Error::NonFinite { .. })));
    }

    #[test]
    fn horizon_zero_keeps_initial_snapshot() {
        let mut cfg = small_config(Scheme::Explicit, 1.0);
        cfg.space = SpaceGrid::new(-10.0, 10.0, 101).unwrap();
        cfg.horizon = 0.0;
        let traj = run_simulation(&cfg).unwrap();
        assert_eq!(traj.snapshots.len(), 1);
        assert_eq!(traj.sup_track.len(), 1);
    }

    #[test]
    fn boundary_proximity_aborts() {
        let params = ModelParams::default();
        let cfg = SimConfig {
            space: SpaceGrid::new(-4.0, 4.0, 81).unwrap(),
            theta: ThetaGrid::new(&params, 11).unwrap(),
            horizon: 5.0,
            ..SimConfig::default()
        };
        assert!(matches!(
            run_simulation(&cfg),
            Err(Error::BoundaryReached { .. })
        ));
    }

    #[test]
    fn front_position_cases() {
        let space = SpaceGrid::new(0.0, 20.0, 201).unwrap();
        assert_eq!(front_position_profile(&space, &vec![0.0; 201], 0.5), None);
        let step_profile: Vec<f64> = space
            .nodes()
            .iter()
            .map(|&x| if x < 3.0 { 1.0 } else { 0.0 })
            .collect();
        let x = front_position_profile(&space, &step_profile, 0.5).unwrap();
        assert!((x - 3.0).abs() <= space.spacing());
        let ramp: Vec<f64> = space
            .nodes()
            .iter()
            .map(|&x| (1.0 - x / 10.0).max(0.0))
            .collect();
        assert_abs_diff_eq!(
            front_position_profile(&space, &ramp, 0.5).unwrap(),
            5.0,
            epsilon = 1e-10
        );
    }

    #[test]
    fn log_transform_of_unit_field() {
        let cfg = small_config(Scheme::Explicit, 1.0);
        let f = Field::from_fn(cfg.space, cfg.theta, 0.0, |_, _| 1.0).unwrap();
        let t = u_epsilon_field(&f, 0.1, (-1.0, 1.0));
        assert!(t.u.iter().all(|&u| u == 0.0));
        assert_eq!(t.max_gradient, Some(0.0));
    }

    #[test]
    fn log_transform_recovers_phase() {
        let params = ModelParams::default();
        let space = SpaceGrid::new(-1.0, 1.0, 5).unwrap();
        let eps = 0.05;
        let phi = |th: f64| -0.5 * (th - 1.3).powi(2) - 0.2 * th;
        let dphi = |th: f64| -(th - 1.3) - 0.2;
        let mut errs = Vec::new();
        for nodes in [41, 81] {
            let theta = ThetaGrid::new(&params, nodes).unwrap();
            let f = Field::from_fn(space, theta, 0.0, |_, th| (phi(th) / eps).exp()).unwrap();
            let t = u_epsilon_field(&f, eps, (-1.0, 1.0));
            let mut err: f64 = 0.0;
            for j in 0..nodes {
                let th = theta.node(j);
                assert_abs_diff_eq!(t.u[j], phi(th), epsilon = 1e-12);
                if j > 0 && j + 1 < nodes {
                    err = err.max((t.u_theta[j] - dphi(th)).abs());
                }
            }
            errs.push(err);
        }
        // centered differences of a quadratic are exact
        assert!(errs.iter().all(|&e| e < 1e-9), "{errs:?}");
    }

    #[test]
    fn log_transform_skips_floor_nodes() {
        let cfg = small_config(Scheme::Explicit, 1.0);
        let f = Field::zeros(cfg.space, cfg.theta, 0.0);
        let t = u_epsilon_field(&f, 0.1, (-1.0, 1.0));
        assert_eq!(t.max_gradient, None);
        assert_eq!(t.floor_nodes, t.window_nodes);
    }

    #[test]
    fn sim_keeps_positivity_and_snapshots_ordered() {
        let params = ModelParams::default();
        let cfg = SimConfig {
            space: SpaceGrid::new(-6.0, 14.0, 201).unwrap(),
            theta: ThetaGrid::new(&params, 11).unwrap(),
            horizon: 2.0,
            snapshot_stride: 50,
            initial: InitialDataSpec {
                x_halfwidth: 1.0,
                profile: TraitProfile::Uniform,
                ..InitialDataSpec::default()
            },
            ..SimConfig::default()
        };
        let traj = run_simulation(&cfg).unwrap();
        assert_eq!(traj.clipped_mass, 0.0);
        assert!(traj.snapshots.windows(2).all(|w| w[0].time < w[1].time));
        assert_eq!(traj.final_field().time, 2.0);
        assert!(traj.final_field().values().iter().all(|&v| v >= 0.0));
    }
}
