//! The constrained Hamilton-Jacobi equation `max{u, u_t - H(u_x)} = 0`.
//!
//! Two routes to the interface:
//!
//! * the explicit law: starting from `0` on `omega` and `-inf` elsewhere,
//!   the zero set at time `t` is `{x : d(x, omega) < c* t}`;
//! * a monotone upwind scheme (Godunov by default, Lax-Friedrichs on
//!   request) with the constraint applied by clamping, started from finite
//!   cutoff data `-mu zeta(x)` that tends to the infinite data as `mu`
//!   grows.

use rayon::prelude::*;

use crate::domain::{IntervalSet, SpaceGrid};
use crate::error::{invalid, Result};
use crate::spectral::HTable;

/// Solution of the constrained equation on a space grid.
#[derive(Debug, Clone, PartialEq)]
pub struct HJField {
    pub space: SpaceGrid,
    pub u: Vec<f64>,
    pub time: f64,
    /// Cutoff amplitude of the initial data.
    pub mu: f64,
    /// Number of Hamiltonian evaluations that fell outside the trusted
    /// range of the table.
    pub untrusted_lookups: usize,
}

/// Partition of the grid into the zero set and the negative set.
#[derive(Debug, Clone, PartialEq)]
pub struct FrontClassification {
    pub zero_set: IntervalSet,
    pub negative_set: IntervalSet,
    pub boundary_tolerance: f64,
}

/// Classification by the explicit distance law at time `t`.
///
/// A node is in the zero set when it lies in the interior of `omega` or
/// `d(x, omega) < c t`, in the negative set when `d(x, omega) > c t` (and
/// it is not in the closure of `omega`). Nodes on the boundary belong to
/// neither.
pub fn explicit_front(
    omega: &IntervalSet,
    c_star: f64,
    t: f64,
    space: &SpaceGrid,
) -> FrontClassification {
    let reach = c_star * t;
    let mut zero = Vec::with_capacity(space.node_count);
    let mut negative = Vec::with_capacity(space.node_count);
    for x in space.nodes() {
        let d = omega.distance(x);
        zero.push(omega.contains_interior(x) || d < reach);
        negative.push(d > reach);
    }
    FrontClassification {
        zero_set: IntervalSet::from_node_mask(space, &zero),
        negative_set: IntervalSet::from_node_mask(space, &negative),
        boundary_tolerance: space.spacing(),
    }
}

/// Exact zero set of the explicit law, `{x : d(x, omega) <= c t}`.
pub fn explicit_zero_set(omega: &IntervalSet, c_star: f64, t: f64) -> IntervalSet {
    omega.dilate(c_star * t)
}

/// C^2 ramp on `[0, 1]`: `6 s^5 - 15 s^4 + 10 s^3`, clamped outside.
fn smootherstep(s: f64) -> f64 {
    let s = s.clamp(0.0, 1.0);
    s * s * s * (s * (6.0 * s - 15.0) + 10.0)
}

/// Cutoff data `-mu zeta(x)`, where `zeta` vanishes on `omega`, rises as a
/// C^2 ramp of the distance to `omega` and equals 1 beyond `ramp_width`.
pub fn cutoff_initial(
    omega: &IntervalSet,
    mu: f64,
    ramp_width: f64,
    space: &SpaceGrid,
) -> Result<HJField> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(invalid("mu", format!("must be positive, got {mu}")));
    }
    if !(ramp_width > 0.0) {
        return Err(invalid("hj_ramp_width", "must be positive"));
    }
    let u = space
        .nodes()
        .into_iter()
        .map(|x| -mu * smootherstep(omega.distance(x) / ramp_width))
        .collect();
    Ok(HJField {
        space: *space,
        u,
        time: 0.0,
        mu,
        untrusted_lookups: 0,
    })
}

/// Largest one-sided difference quotient of `u`.
pub fn max_gradient(u: &[f64], dx: f64) -> f64 {
    u.windows(2)
        .map(|w| (w[1] - w[0]).abs() / dx)
        .fold(0.0, f64::max)
}

/// Two-point numerical Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NumericalFlux {
    /// Exact Riemann flux of the even convex `H`: the max of `H` over
    /// `[p-, p+]` when `p- <= p+`, otherwise the min over `[p+, p-]`.
    #[default]
    Godunov,
    /// `H((p- + p+)/2) + (L / 2)(p+ - p-)` with the global constant `L`.
    LaxFriedrichs,
}

/// Evaluates `flux` on the one-sided gradients; the flag reports a table
/// lookup outside the trusted range.
pub fn numerical_hamiltonian(
    flux: NumericalFlux,
    table: &HTable,
    p_minus: f64,
    p_plus: f64,
    lipschitz: f64,
) -> (f64, bool) {
    match flux {
        NumericalFlux::Godunov => {
            let a = table.lookup(p_minus);
            let b = table.lookup(p_plus);
            let trusted = a.beyond_trusted || b.beyond_trusted;
            let value = if p_minus <= p_plus {
                a.value.max(b.value)
            } else if p_plus <= 0.0 && 0.0 <= p_minus {
                table.eval(0.0)
            } else {
                a.value.min(b.value)
            };
            (value, trusted)
        }
        NumericalFlux::LaxFriedrichs => {
            let look = table.lookup(0.5 * (p_minus + p_plus));
            (
                look.value + 0.5 * lipschitz * (p_plus - p_minus),
                look.beyond_trusted,
            )
        }
    }
}

/// One step with an explicit Lipschitz constant; `lipschitz` must bound
/// `|H'|` over the gradients present and `dt <= dx / lipschitz`.
pub fn hj_step_with(
    field: &HJField,
    dt: f64,
    table: &HTable,
    lipschitz: f64,
    flux: NumericalFlux,
) -> Result<HJField> {
    let dx = field.space.spacing();
    if !(dt > 0.0 && dt * lipschitz <= dx * (1.0 + 1e-12)) {
        return Err(invalid(
            "dt",
            format!(
                "monotonicity needs dt <= dx / L = {}, got {dt}",
                dx / lipschitz
            ),
        ));
    }
    let u = &field.u;
    let n = u.len();
    let updated: Vec<(f64, bool)> = (0..n)
        .into_par_iter()
        .map(|i| {
            // reflecting ends
            let left = if i == 0 { u[1] } else { u[i - 1] };
            let right = if i + 1 == n { u[n - 2] } else { u[i + 1] };
            let p_minus = (u[i] - left) / dx;
            let p_plus = (right - u[i]) / dx;
            let (h, beyond) = numerical_hamiltonian(flux, table, p_minus, p_plus, lipschitz);
            ((u[i] + dt * h).min(0.0), beyond)
        })
        .collect();
    let untrusted = updated.iter().filter(|(_, b)| *b).count();
    Ok(HJField {
        space: field.space,
        u: updated.into_iter().map(|(v, _)| v).collect(),
        time: field.time + dt,
        mu: field.mu,
        untrusted_lookups: field.untrusted_lookups + untrusted,
    })
}

/// One Godunov step with the Lipschitz constant taken from the table slope
/// over the gradients currently present in `field`.
pub fn hj_step(field: &HJField, dt: f64, table: &HTable) -> Result<HJField> {
    let p_max = max_gradient(&field.u, field.space.spacing());
    hj_step_with(
        field,
        dt,
        table,
        table.max_slope(p_max),
        NumericalFlux::Godunov,
    )
}

/// Zero/negative split of a numerical solution with threshold `tol_zero`.
pub fn classify(field: &HJField, tol_zero: f64) -> FrontClassification {
    let zero: Vec<bool> = field.u.iter().map(|&v| v > -tol_zero).collect();
    let negative: Vec<bool> = field.u.iter().map(|&v| v < -tol_zero).collect();
    FrontClassification {
        zero_set: IntervalSet::from_node_mask(&field.space, &zero),
        negative_set: IntervalSet::from_node_mask(&field.space, &negative),
        boundary_tolerance: field.space.spacing(),
    }
}

/// Outermost crossings of `u = -tol_zero`, interpolated linearly between
/// nodes. `None` when no node lies above the threshold.
pub fn zero_set_boundaries(field: &HJField, tol_zero: f64) -> Option<(f64, f64)> {
    let u = &field.u;
    let level = -tol_zero;
    let first = u.iter().position(|&v| v > level)?;
    let last = u.iter().rposition(|&v| v > level)?;
    let dx = field.space.spacing();
    let left = if first == 0 {
        field.space.node(0)
    } else {
        let (a, b) = (u[first - 1], u[first]);
        field.space.node(first) - dx * (b - level) / (b - a)
    };
    let right = if last + 1 == u.len() {
        field.space.node(last)
    } else {
        let (a, b) = (u[last], u[last + 1]);
        field.space.node(last) + dx * (a - level) / (a - b)
    };
    Some((left, right))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HjOptions {
    pub ramp_width: f64,
    /// Fraction of the monotonicity limit `dx / L` used as time step.
    pub cfl: f64,
    pub flux: NumericalFlux,
}

impl Default for HjOptions {
    fn default() -> Self {
        Self {
            ramp_width: 4.0,
            cfl: 0.9,
            flux: NumericalFlux::Godunov,
        }
    }
}

/// Outcome for one cutoff amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct HjRun {
    pub mu: f64,
    pub field: HJField,
    pub classification: FrontClassification,
    /// Interpolated outer boundary of the zero set.
    pub boundaries: Option<(f64, f64)>,
}

/// Result of [`hj_solve`]: one run per amplitude plus the step history.
#[derive(Debug, Clone, PartialEq)]
pub struct HjSolution {
    pub runs: Vec<HjRun>,
    pub steps: usize,
    /// Largest time step taken.
    pub max_dt: f64,
    /// Lipschitz bound of the first step, the largest of the run.
    pub initial_lipschitz: f64,
    pub tol_zero: f64,
}

/// Lipschitz bound shared by a family: the table slope over the steepest
/// gradient present in any member.
pub fn family_lipschitz(fields: &[HJField], table: &HTable) -> f64 {
    let p_max = fields
        .iter()
        .map(|f| max_gradient(&f.u, f.space.spacing()))
        .fold(0.0, f64::max);
    table.max_slope(p_max)
}

/// Advances every member of a family by one shared step of at most
/// `max_dt`, returning the step taken.
pub fn family_step(
    fields: &mut [HJField],
    max_dt: f64,
    table: &HTable,
    opts: &HjOptions,
) -> Result<f64> {
    let lipschitz = family_lipschitz(fields, table);
    let dx = fields[0].space.spacing();
    let dt = (opts.cfl * dx / lipschitz).min(max_dt);
    for f in fields.iter_mut() {
        *f = hj_step_with(f, dt, table, lipschitz, opts.flux)?;
    }
    Ok(dt)
}

/// Solves from cutoff data for every amplitude in `mu_list` up to `horizon`.
///
/// The amplitudes advance in lockstep with one time step and Lipschitz
/// bound per step, recomputed from the current gradients, so the comparison
/// ordering of the scheme carries over between them. The zero-set
/// threshold is `1e-3 * min(mu_list)`.
pub fn hj_solve(
    omega: &IntervalSet,
    mu_list: &[f64],
    horizon: f64,
    space: &SpaceGrid,
    table: &HTable,
    opts: &HjOptions,
) -> Result<HjSolution> {
    if mu_list.is_empty() || mu_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("hj_mu_list", "must be a nonempty increasing list"));
    }
    if !(horizon >= 0.0 && horizon.is_finite()) {
        return Err(invalid("hj_horizon", "must be finite and nonnegative"));
    }
    if omega.is_empty() {
        return Err(invalid("omega", "initial zero set is empty"));
    }
    if !(opts.cfl > 0.0 && opts.cfl <= 1.0) {
        return Err(invalid("hj_cfl", "must lie in (0, 1]"));
    }
    let tol_zero = 1e-3 * mu_list[0];
    let mut fields = mu_list
        .iter()
        .map(|&mu| cutoff_initial(omega, mu, opts.ramp_width, space))
        .collect::<Result<Vec<_>>>()?;
    let initial_lipschitz = family_lipschitz(&fields, table);
    let mut time = 0.0;
    let mut steps = 0;
    let mut max_dt: f64 = 0.0;
    // guards against a final sliver step
    while horizon - time > 1e-12 * horizon.max(1.0) {
        let dt = family_step(&mut fields, horizon - time, table, opts)?;
        time += dt;
        steps += 1;
        max_dt = max_dt.max(dt);
    }
    let runs = fields
        .into_iter()
        .map(|mut field| {
            field.time = horizon;
            HjRun {
                mu: field.mu,
                classification: classify(&field, tol_zero),
                boundaries: zero_set_boundaries(&field, tol_zero),
                field,
            }
        })
        .collect();
    Ok(HjSolution {
        runs,
        steps,
        max_dt,
        initial_lipschitz,
        tol_zero,
    })
}
