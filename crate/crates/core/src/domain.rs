//! Parameters, grids, density fields and initial data.
//!
//! Everything here is an immutable value type. The trait axis is the bounded
//! interval `[theta_min, theta_max]`; the space axis is a truncation of the
//! real line to `[x_min, x_max]`. Both are sampled on uniform node grids.

use crate::error::{invalid, Error, Result};

/// The four constants of the model: trait interval, mutation rate and
/// net reproduction rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub theta_min: f64,
    pub theta_max: f64,
    pub alpha: f64,
    pub r: f64,
}

impl ModelParams {
    pub fn new(theta_min: f64, theta_max: f64, alpha: f64, r: f64) -> Result<Self> {
        if !(theta_min.is_finite() && theta_min > 0.0) {
            return Err(invalid(
                "theta_min",
                format!("must be positive, got {theta_min}"),
            ));
        }
        if !(theta_max.is_finite() && theta_max > theta_min) {
            return Err(invalid(
                "theta_max",
                format!("must exceed theta_min = {theta_min}, got {theta_max}"),
            ));
        }
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(invalid("alpha", format!("must be positive, got {alpha}")));
        }
        if !(r.is_finite() && r > 0.0) {
            return Err(invalid("r", format!("must be positive, got {r}")));
        }
        Ok(Self {
            theta_min,
            theta_max,
            alpha,
            r,
        })
    }

    /// Length of the trait interval.
    pub fn trait_width(&self) -> f64 {
        self.theta_max - self.theta_min
    }

    /// Fisher-KPP speed of the slowest trait, `2 sqrt(theta_min r)`.
    pub fn kpp_lower(&self) -> f64 {
        2.0 * (self.theta_min * self.r).sqrt()
    }

    /// Fisher-KPP speed of the fastest trait, `2 sqrt(theta_max r)`.
    pub fn kpp_upper(&self) -> f64 {
        2.0 * (self.theta_max * self.r).sqrt()
    }
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            theta_min: 1.0,
            theta_max: 2.0,
            alpha: 1.0,
            r: 1.0,
        }
    }
}

/// Uniform nodes on `[theta_min, theta_max]`, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaGrid {
    pub theta_min: f64,
    pub theta_max: f64,
    pub node_count: usize,
}

impl ThetaGrid {
    pub const DEFAULT_NODES: usize = 81;

    pub fn new(params: &ModelParams, node_count: usize) -> Result<Self> {
        if node_count < 3 {
            return Err(invalid(
                "theta_nodes",
                format!("need at least 3 nodes, got {node_count}"),
            ));
        }
        Ok(Self {
            theta_min: params.theta_min,
            theta_max: params.theta_max,
            node_count,
        })
    }

    pub fn spacing(&self) -> f64 {
        (self.theta_max - self.theta_min) / (self.node_count - 1) as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        if j + 1 == self.node_count {
            self.theta_max
        } else {
            self.theta_min + j as f64 * self.spacing()
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.node_count).map(|j| self.node(j)).collect()
    }

    /// Trapezoid quadrature weight of node `j`.
    pub fn weight(&self, j: usize) -> f64 {
        let h = self.spacing();
        if j == 0 || j + 1 == self.node_count {
            0.5 * h
        } else {
            h
        }
    }

    /// Trapezoid rule over the trait axis. Summation runs in node order.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.node_count);
        let n = values.len();
        let interior: f64 = values[1..n - 1].iter().sum();
        self.spacing() * (0.5 * (values[0] + values[n - 1]) + interior)
    }
}

/// Uniform nodes on `[x_min, x_max]`, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub node_count: usize,
}

impl SpaceGrid {
    pub fn new(x_min: f64, x_max: f64, node_count: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite() && x_min < x_max) {
            return Err(invalid(
                "x_max",
                format!("need x_min < x_max, got [{x_min}, {x_max}]"),
            ));
        }
        if node_count < 3 {
            return Err(invalid(
                "x_nodes",
                format!("need at least 3 nodes, got {node_count}"),
            ));
        }
        Ok(Self {
            x_min,
            x_max,
            node_count,
        })
    }

    /// Grid on `[x_min, x_max]` whose spacing does not exceed `max_spacing`.
    pub fn with_max_spacing(x_min: f64, x_max: f64, max_spacing: f64) -> Result<Self> {
        if !(max_spacing > 0.0) {
            return Err(invalid("x_spacing", "must be positive"));
        }
        let cells = ((x_max - x_min) / max_spacing).ceil().max(2.0) as usize;
        Self::new(x_min, x_max, cells + 1)
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.node_count - 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        if i + 1 == self.node_count {
            self.x_max
        } else {
            self.x_min + i as f64 * self.spacing()
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.node_count).map(|i| self.node(i)).collect()
    }
}

/// Population density `n(x_i, theta_j)` at time `time`.
///
/// Values are stored row-major with the trait index fastest, so the trait
/// profile at a fixed position is a contiguous slice.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub space: SpaceGrid,
    pub theta: ThetaGrid,
    pub time: f64,
    values: Vec<f64>,
}

impl Field {
    /// Checked constructor: shape must match the grids and every value must
    /// be finite and nonnegative.
    pub fn new(space: SpaceGrid, theta: ThetaGrid, values: Vec<f64>, time: f64) -> Result<Self> {
        let expected = space.node_count * theta.node_count;
        if values.len() != expected {
            return Err(Error::Config(format!(
                "field has {} values, grids need {expected}",
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::Config(format!(
                "field value {v} is negative or not finite"
            )));
        }
        Ok(Self {
            space,
            theta,
            time,
            values,
        })
    }

    pub fn zeros(space: SpaceGrid, theta: ThetaGrid, time: f64) -> Self {
        Self {
            space,
            theta,
            time,
            values: vec![0.0; space.node_count * theta.node_count],
        }
    }

    /// Builds a field by sampling `f(x, theta)` at every node. Negative
    /// samples are rejected.
    pub fn from_fn(
        space: SpaceGrid,
        theta: ThetaGrid,
        time: f64,
        mut f: impl FnMut(f64, f64) -> f64,
    ) -> Result<Self> {
        let mut values = Vec::with_capacity(space.node_count * theta.node_count);
        for i in 0..space.node_count {
            let x = space.node(i);
            for j in 0..theta.node_count {
                values.push(f(x, theta.node(j)));
            }
        }
        Self::new(space, theta, values, time)
    }

    pub(crate) fn from_raw(
        space: SpaceGrid,
        theta: ThetaGrid,
        values: Vec<f64>,
        time: f64,
    ) -> Self {
        debug_assert_eq!(values.len(), space.node_count * theta.node_count);
        Self {
            space,
            theta,
            time,
            values,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.theta.node_count + j]
    }

    /// Trait profile at space node `i`.
    pub fn column(&self, i: usize) -> &[f64] {
        let m = self.theta.node_count;
        &self.values[i * m..(i + 1) * m]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.theta.node_count)
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }
}

/// Trait dependence of the initial data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TraitProfile {
    /// `h(theta) = 1`.
    Uniform,
    /// `h(theta) = cos^4(pi (theta - center) / (2 halfwidth))` inside the bump,
    /// zero outside.
    CosineBump { center: f64, halfwidth: f64 },
}

/// Product initial data `n_0(x, theta) = amplitude * g((x - x_center) / x_halfwidth) * h(theta)`
/// with `g(s) = ((1 - s^2)_+)^3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialDataSpec {
    pub x_center: f64,
    pub x_halfwidth: f64,
    pub amplitude: f64,
    pub profile: TraitProfile,
}

impl Default for InitialDataSpec {
    fn default() -> Self {
        Self {
            x_center: 0.0,
            x_halfwidth: 2.0,
            amplitude: 1.0,
            profile: TraitProfile::Uniform,
        }
    }
}

impl InitialDataSpec {
    /// Spatial factor; C^2 with compact support `[-1, 1]`.
    pub fn space_factor(&self, x: f64) -> f64 {
        let s = (x - self.x_center) / self.x_halfwidth;
        let base = 1.0 - s * s;
        if base > 0.0 {
            base * base * base
        } else {
            0.0
        }
    }

    pub fn trait_factor(&self, theta: f64) -> f64 {
        match self.profile {
            TraitProfile::Uniform => 1.0,
            TraitProfile::CosineBump { center, halfwidth } => {
                let s = (theta - center) / halfwidth;
                if s.abs() >= 1.0 {
                    0.0
                } else {
                    let c = (0.5 * std::f64::consts::PI * s).cos();
                    let c2 = c * c;
                    c2 * c2
                }
            }
        }
    }

    pub fn eval(&self, x: f64, theta: f64) -> f64 {
        self.amplitude * self.space_factor(x) * self.trait_factor(theta)
    }

    /// Closed support of the spatial factor.
    pub fn support(&self) -> (f64, f64) {
        (
            self.x_center - self.x_halfwidth,
            self.x_center + self.x_halfwidth,
        )
    }

    fn validate(&self, space: &SpaceGrid, theta: &ThetaGrid) -> Result<()> {
        if !(self.x_halfwidth > 0.0) {
            return Err(invalid("init_x_halfwidth", "must be positive"));
        }
        if !(self.amplitude >= 0.0 && self.amplitude.is_finite()) {
            return Err(invalid("init_amplitude", "must be finite and nonnegative"));
        }
        let (lo, hi) = self.support();
        if !(lo > space.x_min && hi < space.x_max) {
            return Err(Error::Config(format!(
                "initial support [{lo}, {hi}] must lie strictly inside [{}, {}]",
                space.x_min, space.x_max
            )));
        }
        if let TraitProfile::CosineBump { center, halfwidth } = self.profile {
            if !(halfwidth > 0.0) {
                return Err(invalid("init_trait_halfwidth", "must be positive"));
            }
            // Each trait endpoint is either outside the open bump or at its centre,
            // so the profile has zero slope there.
            let eps = 1e-12 * (theta.theta_max - theta.theta_min);
            for edge in [theta.theta_min, theta.theta_max] {
                let d = (edge - center).abs();
                if d > eps && d < halfwidth {
                    return Err(Error::Config(format!(
                        "trait bump centred at {center} with halfwidth {halfwidth} \
                         has nonzero slope at trait endpoint {edge}"
                    )));
                }
            }
            if center < theta.theta_min - eps || center > theta.theta_max + eps {
                return Err(invalid(
                    "init_trait_center",
                    "must lie in the trait interval",
                ));
            }
        }
        Ok(())
    }
}

/// Reflection extension of the trait interval to the real line: identity on
/// `[theta_min, theta_max]`, even across each endpoint, periodic with period
/// `2 (theta_max - theta_min)`.
pub fn extend_theta(theta: f64, params: &ModelParams) -> f64 {
    let width = params.trait_width();
    let shifted = (theta - params.theta_min).rem_euclid(2.0 * width);
    if shifted <= width {
        params.theta_min + shifted
    } else {
        params.theta_min + 2.0 * width - shifted
    }
}

/// Samples the initial data on the grids.
pub fn build_initial_field(
    spec: &InitialDataSpec,
    space: SpaceGrid,
    theta: ThetaGrid,
) -> Result<Field> {
    spec.validate(&space, &theta)?;
    Field::from_fn(space, theta, 0.0, |x, th| spec.eval(x, th))
}

/// A sorted list of disjoint closed intervals on the space axis.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IntervalSet {
    intervals: Vec<(f64, f64)>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Sorts the input and merges overlapping or touching intervals.
    pub fn new(mut intervals: Vec<(f64, f64)>) -> Self {
        intervals.retain(|(a, b)| a <= b);
        intervals.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(intervals.len());
        for (a, b) in intervals {
            match merged.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => merged.push((a, b)),
            }
        }
        Self { intervals: merged }
    }

    pub fn single(a: f64, b: f64) -> Self {
        Self::new(vec![(a, b)])
    }

    /// Runs of consecutive flagged nodes become intervals `[x_first, x_last]`.
    pub fn from_node_mask(space: &SpaceGrid, mask: &[bool]) -> Self {
        debug_assert_eq!(mask.len(), space.node_count);
        let mut intervals = Vec::new();
        let mut start: Option<usize> = None;
        for (i, &flag) in mask.iter().enumerate() {
            match (flag, start) {
                (true, None) => start = Some(i),
                (false, Some(s)) => {
                    intervals.push((space.node(s), space.node(i - 1)));
                    start = None;
                }
                _ => {}
            }
        }
        if let Some(s) = start {
            intervals.push((space.node(s), space.node(mask.len() - 1)));
        }
        Self { intervals }
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|&(a, b)| a <= x && x <= b)
    }

    /// True when `x` lies in the interior of one of the intervals.
    pub fn contains_interior(&self, x: f64) -> bool {
        self.intervals.iter().any(|&(a, b)| a < x && x < b)
    }

    /// Euclidean distance from `x` to the set; infinite for the empty set.
    pub fn distance(&self, x: f64) -> f64 {
        self.intervals
            .iter()
            .map(|&(a, b)| {
                if x < a {
                    a - x
                } else if x > b {
                    x - b
                } else {
                    0.0
                }
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// `{x : d(x, self) <= radius}`.
    pub fn dilate(&self, radius: f64) -> Self {
        Self::new(
            self.intervals
                .iter()
                .map(|&(a, b)| (a - radius, b + radius))
                .collect(),
        )
    }

    pub fn is_subset_of(&self, other: &IntervalSet) -> bool {
        self.intervals
            .iter()
            .all(|&(a, b)| other.intervals.iter().any(|&(c, d)| c <= a && b <= d))
    }

    /// Smallest and largest point of the set.
    pub fn hull(&self) -> Option<(f64, f64)> {
        Some((self.intervals.first()?.0, self.intervals.last()?.1))
    }
}

/// The support sets of the initial data: `j` where some trait is present,
/// `k` where every trait is present.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportSets {
    pub j: IntervalSet,
    pub k: IntervalSet,
}

impl SupportSets {
    /// An empty `j` means there is no population to follow.
    pub fn is_degenerate(&self) -> bool {
        self.j.is_empty()
    }
}

/// Default threshold for [`sets_jk`]: `1e-12 * amplitude`.
pub fn default_support_tol(spec: &InitialDataSpec) -> f64 {
    1e-12 * spec.amplitude
}

/// Extracts the support sets from an initial field by thresholding the
/// trait-wise maximum and minimum at every space node.
pub fn sets_jk(field0: &Field, tol: f64) -> SupportSets {
    let (any, all): (Vec<bool>, Vec<bool>) = field0
        .columns()
        .map(|col| {
            let max = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let min = col.iter().copied().fold(f64::INFINITY, f64::min);
            (max > tol, min > tol)
        })
        .unzip();
    SupportSets {
        j: IntervalSet::from_node_mask(&field0.space, &any),
        k: IntervalSet::from_node_mask(&field0.space, &all),
    }
}
