//! Principal eigenpair of the trait operator, the dispersion curve and the
//! minimal front speed.
//!
//! For a wave number `lambda` the trait operator is
//!
//! ```text
//! Q  ->  alpha Q'' + (theta lambda^2 + r) Q      on [theta_min, theta_max],
//!        Q'(theta_min) = Q'(theta_max) = 0
//! ```
//!
//! and `H(lambda)` is its principal eigenvalue. The discrete operator uses
//! the three-point Laplacian with ghost-node reflection at both ends. That
//! matrix is self-adjoint in the trapezoid inner product, so a diagonal
//! similarity by the square roots of the trapezoid weights makes it a
//! symmetric tridiagonal matrix with the same spectrum.
//!
//! The dispersion relation is `c(lambda) = H(lambda) / lambda` for
//! `lambda > 0`; its minimum over `lambda > 0` is the front speed `c*`.

use rayon::prelude::*;

use crate::domain::{ModelParams, ThetaGrid};
use crate::error::{invalid, Error, Result};
use crate::search::{golden_section, log_space, Minimum};
use crate::tridiag::TridiagonalLu;

/// Eigenvector tolerance of the inverse iteration (max-norm change).
pub const EIGEN_TOL: f64 = 1e-12;
const MAX_ITERATIONS: usize = 10_000;

/// Principal eigenpair at one wave number.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralSolution {
    pub lambda: f64,
    /// Principal eigenvalue `H(lambda)`.
    pub h: f64,
    /// Positive eigenfunction at the trait nodes, trapezoid-normalized to 1.
    pub q: Vec<f64>,
    pub iterations: usize,
}

impl SpectralSolution {
    /// Max-norm residual of the discrete eigen-equation
    /// `alpha D Q + (theta lambda^2 + r) Q - H Q` with the ghost-node
    /// Neumann second difference `D`.
    pub fn residual(&self, params: &ModelParams, grid: &ThetaGrid) -> f64 {
        let m = grid.node_count;
        let k = params.alpha / grid.spacing().powi(2);
        let lam2 = self.lambda * self.lambda;
        let q = &self.q;
        (0..m)
            .map(|j| {
                let left = if j == 0 { q[1] } else { q[j - 1] };
                let right = if j + 1 == m { q[m - 2] } else { q[j + 1] };
                let lap = k * (left - 2.0 * q[j] + right);
                (lap + (grid.node(j) * lam2 + params.r - self.h) * q[j]).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Symmetrized trait operator: diagonal and the `m - 1` off-diagonal entries.
fn symmetric_operator(lambda: f64, params: &ModelParams, grid: &ThetaGrid) -> (Vec<f64>, Vec<f64>) {
    let m = grid.node_count;
    let k = params.alpha / grid.spacing().powi(2);
    let lam2 = lambda * lambda;
    let diag: Vec<f64> = (0..m)
        .map(|j| grid.node(j) * lam2 + params.r - 2.0 * k)
        .collect();
    let off: Vec<f64> = (0..m - 1)
        .map(|j| {
            if j == 0 || j + 2 == m {
                std::f64::consts::SQRT_2 * k
            } else {
                k
            }
        })
        .collect();
    (diag, off)
}

/// Relative trapezoid weights: 1/2 at the end nodes, 1 inside.
fn edge_weight(j: usize, m: usize) -> f64 {
    if j == 0 || j + 1 == m {
        0.5
    } else {
        1.0
    }
}

/// Principal eigenvalue `H(lambda)` and positive eigenfunction of the
/// discrete trait operator, by shifted inverse iteration.
///
/// The shift is the Gershgorin upper bound plus one, so `S - shift` is
/// negative definite and the principal eigenvalue is the one closest to the
/// shift. `H` is even in `lambda`; only `|lambda|` enters.
#[allow(non_snake_case)]
pub fn eigen_H(lambda: f64, params: &ModelParams, grid: &ThetaGrid) -> Result<SpectralSolution> {
    if !lambda.is_finite() {
        return Err(invalid("lambda", "must be finite"));
    }
    let lambda = lambda.abs();
    let m = grid.node_count;
    let (diag, off) = symmetric_operator(lambda, params, grid);

    // Gershgorin bound of the similar ghost-node form, whose rows sum to
    // `theta lambda^2 + r`; the symmetrized rows give a far looser bound.
    let gershgorin = params.theta_max * lambda * lambda + params.r;
    let shift = gershgorin + 1.0;

    let mut lower = vec![0.0; m];
    let mut upper = vec![0.0; m];
    lower[1..].copy_from_slice(&off);
    upper[..m - 1].copy_from_slice(&off);
    let shifted: Vec<f64> = diag.iter().map(|d| d - shift).collect();
    let lu = TridiagonalLu::new(&lower, &shifted, &upper);

    // The constant Q maps to sqrt(w) in symmetric coordinates; it is the
    // exact eigenvector at lambda = 0 and positive in general.
    let mut y: Vec<f64> = (0..m).map(|j| edge_weight(j, m).sqrt()).collect();
    normalize_signed(&mut y);
    let mut next = vec![0.0; m];
    let mut iterations = 0;
    let mut change = f64::INFINITY;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        next.copy_from_slice(&y);
        lu.solve_in_place(&mut next);
        normalize_signed(&mut next);
        change = y
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        std::mem::swap(&mut y, &mut next);
        if change <= EIGEN_TOL {
            break;
        }
    }
    if change > EIGEN_TOL {
        return Err(Error::EigenNotConverged {
            lambda,
            iterations,
            last_change: change,
        });
    }

    let mut q: Vec<f64> = (0..m).map(|j| y[j] / edge_weight(j, m).sqrt()).collect();
    let h = rayleigh_quotient(&q, lambda, params, grid);
    let mass = grid.integrate(&q);
    q.iter_mut().for_each(|v| *v /= mass);
    Ok(SpectralSolution {
        lambda,
        h,
        q,
        iterations,
    })
}

/// Rayleigh quotient in the trapezoid inner product, with the Laplacian in
/// summation-by-parts form so constants give exactly `r` at `lambda = 0`.
fn rayleigh_quotient(q: &[f64], lambda: f64, params: &ModelParams, grid: &ThetaGrid) -> f64 {
    let m = q.len();
    let k = params.alpha / grid.spacing().powi(2);
    let lam2 = lambda * lambda;
    let mut num = 0.0;
    let mut den = 0.0;
    for j in 0..m {
        let w = edge_weight(j, m);
        num += w * (grid.node(j) * lam2 + params.r) * q[j] * q[j];
        den += w * q[j] * q[j];
    }
    let dirichlet: f64 = q.windows(2).map(|p| (p[1] - p[0]) * (p[1] - p[0])).sum();
    (num - k * dirichlet) / den
}

fn normalize_signed(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let sign = if v.iter().sum::<f64>() < 0.0 {
        -1.0
    } else {
        1.0
    };
    let scale = sign / norm;
    v.iter_mut().for_each(|x| *x *= scale);
}

/// Dispersion relation `c(lambda) = H(lambda) / lambda`, `lambda > 0`.
pub fn dispersion_c(lambda: f64, params: &ModelParams, grid: &ThetaGrid) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(invalid(
            "lambda",
            format!("dispersion speed needs lambda > 0, got {lambda}"),
        ));
    }
    Ok(eigen_H(lambda, params, grid)?.h / lambda)
}

/// `gamma(lambda) = lambda^2 theta_max + r - H(lambda)`. Zero at the
/// origin, positive elsewhere.
pub fn gamma_of_lambda(lambda: f64, params: &ModelParams, grid: &ThetaGrid) -> Result<f64> {
    let h = eigen_H(lambda, params, grid)?.h;
    Ok(lambda * lambda * params.theta_max + params.r - h)
}

/// One row of a tabulated dispersion curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionSample {
    pub lambda: f64,
    pub c: f64,
    pub h: f64,
    pub gamma: f64,
}

impl DispersionSample {
    /// `lambda theta_min + r / lambda <= c <= lambda theta_max + r / lambda`
    /// up to a relative slack.
    pub fn within_envelope(&self, params: &ModelParams, rel_slack: f64) -> bool {
        let lo = self.lambda * params.theta_min + params.r / self.lambda;
        let hi = self.lambda * params.theta_max + params.r / self.lambda;
        self.c >= lo * (1.0 - rel_slack) && self.c <= hi * (1.0 + rel_slack)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DispersionCurve {
    pub samples: Vec<DispersionSample>,
}

/// Evaluates the dispersion curve at the given positive wave numbers.
/// Samples come back sorted by `lambda`.
pub fn dispersion_curve(
    lambdas: &[f64],
    params: &ModelParams,
    grid: &ThetaGrid,
) -> Result<DispersionCurve> {
    let mut lambdas = lambdas.to_vec();
    lambdas.sort_by(f64::total_cmp);
    let samples = lambdas
        .par_iter()
        .map(|&lambda| {
            if !(lambda > 0.0) {
                return Err(invalid("lambda", "dispersion samples need lambda > 0"));
            }
            let h = eigen_H(lambda, params, grid)?.h;
            Ok(DispersionSample {
                lambda,
                c: h / lambda,
                h,
                gamma: lambda * lambda * params.theta_max + params.r - h,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DispersionCurve { samples })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CstarOptions {
    pub scan_points: usize,
    /// Golden-section stop: bracket width relative to its midpoint.
    pub rel_width: f64,
}

impl Default for CstarOptions {
    fn default() -> Self {
        Self {
            scan_points: 48,
            rel_width: 1e-8,
        }
    }
}

/// Minimal speed of the dispersion curve and its minimizer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrontSpeedResult {
    pub c_star: f64,
    pub lambda_star: f64,
    pub bracket: (f64, f64),
}

/// Default wave-number scan range: the minimizers `sqrt(r / theta)` of the
/// two envelope speeds `lambda theta + r / lambda`, widened to
/// `[0.05 sqrt(r / theta_max), 20 sqrt(r / theta_min)]`.
pub fn lambda_scan_range(params: &ModelParams) -> (f64, f64) {
    (
        0.05 * (params.r / params.theta_max).sqrt(),
        20.0 * (params.r / params.theta_min).sqrt(),
    )
}

/// Minimizes `c(lambda)` over `lambda > 0`: a log-spaced scan brackets the
/// minimum, golden-section search refines it.
pub fn compute_cstar(
    params: &ModelParams,
    grid: &ThetaGrid,
    opts: &CstarOptions,
) -> Result<FrontSpeedResult> {
    let (mut lo, mut hi) = lambda_scan_range(params);
    for attempt in 0..2 {
        let lambdas = log_space(lo, hi, opts.scan_points.max(8));
        let speeds = lambdas
            .par_iter()
            .map(|&l| dispersion_c(l, params, grid))
            .collect::<Result<Vec<_>>>()?;
        let best = speeds
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .expect("non-empty scan");
        if best == 0 || best + 1 == lambdas.len() {
            if attempt == 0 {
                lo /= 10.0;
                hi *= 10.0;
                continue;
            }
            return Err(Error::BracketFailure {
                lower: lo,
                upper: hi,
            });
        }
        let Minimum {
            argmin,
            value,
            bracket,
        } = golden_section(
            |l| dispersion_c(l, params, grid),
            lambdas[best - 1],
            lambdas[best + 1],
            opts.rel_width,
        )?;
        // The scan point can beat the refined value by eigensolver noise.
        let (c_star, lambda_star) = if speeds[best] < value {
            (speeds[best], lambdas[best])
        } else {
            (value, argmin)
        };
        return Ok(FrontSpeedResult {
            c_star,
            lambda_star,
            bracket,
        });
    }
    unreachable!("loop returns on its second pass")
}

/// Observed order of `H(lambda)` on three trait grids with node counts
/// `n, 2n - 1, 4n - 3`, from the ratio of successive differences.
pub fn convergence_order(lambda: f64, params: &ModelParams, coarse_nodes: usize) -> Result<f64> {
    let h =
        |n: usize| -> Result<f64> { Ok(eigen_H(lambda, params, &ThetaGrid::new(params, n)?)?.h) };
    let (a, b, c) = (
        h(coarse_nodes)?,
        h(2 * coarse_nodes - 1)?,
        h(4 * coarse_nodes - 3)?,
    );
    Ok(((a - b) / (b - c)).abs().log2())
}

/// Outcome of checking `inf_{s > 0} s H(lambda / s) = |lambda| c*`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HcstarCheck {
    pub lambda: f64,
    /// Infimum of `s H(lambda / s)` found by the search.
    pub infimum: f64,
    /// Scale `s` at which it is attained; `|lambda| / lambda*` in theory.
    pub minimizing_scale: f64,
    pub relative_error: f64,
}

/// Minimizes `s H(lambda / s)` over `s > 0` and compares it with
/// `|lambda| c*` taken from `front`.
pub fn check_hcstar_identity_with(
    lambda: f64,
    params: &ModelParams,
    grid: &ThetaGrid,
    front: &FrontSpeedResult,
    opts: &CstarOptions,
) -> Result<HcstarCheck> {
    let lam = lambda.abs();
    if !(lam > 0.0) {
        return Err(invalid("lambda", "identity check needs lambda != 0"));
    }
    let objective = |s: f64| eigen_H(lam / s, params, grid).map(|sol| s * sol.h);
    let (l_lo, l_hi) = lambda_scan_range(params);
    let scales = log_space(lam / l_hi, lam / l_lo, opts.scan_points.max(8));
    let values = scales
        .par_iter()
        .map(|&s| objective(s))
        .collect::<Result<Vec<_>>>()?;
    let best = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .expect("non-empty scan");
    let a = scales[best.saturating_sub(1)];
    let b = scales[(best + 1).min(scales.len() - 1)];
    let refined = golden_section(objective, a, b, opts.rel_width)?;
    let (infimum, minimizing_scale) = if values[best] < refined.value {
        (values[best], scales[best])
    } else {
        (refined.value, refined.argmin)
    };
    let target = lam * front.c_star;
    Ok(HcstarCheck {
        lambda,
        infimum,
        minimizing_scale,
        relative_error: (infimum - target).abs() / target,
    })
}

/// As [`check_hcstar_identity_with`], computing `c*` with default options.
pub fn check_hcstar_identity(
    lambda: f64,
    params: &ModelParams,
    grid: &ThetaGrid,
) -> Result<HcstarCheck> {
    let opts = CstarOptions::default();
    let front = compute_cstar(params, grid, &opts)?;
    check_hcstar_identity_with(lambda, params, grid, &front, &opts)
}

/// `H` sampled uniformly on `[0, lambda_max]`, evaluated by linear
/// interpolation, even reflection for negative arguments and secant
/// extrapolation beyond `lambda_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct HTable {
    step: f64,
    values: Vec<f64>,
}

/// Value looked up from an [`HTable`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HLookup {
    pub value: f64,
    /// Set when `|p|` exceeds twice the tabulated range.
    pub beyond_trusted: bool,
}

pub fn build_h_table(
    lambda_max: f64,
    sample_count: usize,
    params: &ModelParams,
    grid: &ThetaGrid,
) -> Result<HTable> {
    if !(lambda_max > 0.0 && lambda_max.is_finite()) {
        return Err(invalid("lambda_max", "must be positive"));
    }
    if sample_count < 16 {
        return Err(invalid(
            "sample_count",
            format!("need at least 16 samples, got {sample_count}"),
        ));
    }
    let step = lambda_max / (sample_count - 1) as f64;
    let values = (0..sample_count)
        .into_par_iter()
        .map(|k| {
            let lambda = if k + 1 == sample_count {
                lambda_max
            } else {
                k as f64 * step
            };
            eigen_H(lambda, params, grid).map(|s| s.h)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(HTable { step, values })
}

impl HTable {
    pub fn lambda_max(&self) -> f64 {
        self.step * (self.values.len() - 1) as f64
    }

    pub fn samples(&self) -> &[f64] {
        &self.values
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn eval(&self, p: f64) -> f64 {
        let x = p.abs();
        let n = self.values.len();
        let pos = x / self.step;
        let k = (pos.floor() as usize).min(n - 2);
        let t = pos - k as f64;
        self.values[k] + t * (self.values[k + 1] - self.values[k])
    }

    pub fn lookup(&self, p: f64) -> HLookup {
        HLookup {
            value: self.eval(p),
            beyond_trusted: p.abs() > 2.0 * self.lambda_max(),
        }
    }

    /// Largest `|H'|` of the piecewise-linear table over `[-p_max, p_max]`,
    /// counting the extrapolation slope when `p_max` exceeds the range.
    pub fn max_slope(&self, p_max: f64) -> f64 {
        let segments = ((p_max.abs() / self.step).ceil() as usize).clamp(1, self.values.len() - 1);
        self.values[..=segments]
            .windows(2)
            .map(|w| ((w[1] - w[0]) / self.step).abs())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::DMatrix;

    fn base() -> (ModelParams, ThetaGrid) {
        let p = ModelParams::new(1.0, 2.0, 1.0, 1.0).unwrap();
        let g = ThetaGrid::new(&p, ThetaGrid::DEFAULT_NODES).unwrap();
        (p, g)
    }

    /// Largest eigenvalue of the ghost-node matrix assembled directly in its
    /// non-symmetric form, via a dense general eigensolver.
    fn dense_h(lambda: f64, p: &ModelParams, nodes: usize) -> f64 {
        let h = (p.theta_max - p.theta_min) / (nodes - 1) as f64;
        let k = p.alpha / (h * h);
        let mut a = DMatrix::<f64>::zeros(nodes, nodes);
        for j in 0..nodes {
            let theta = p.theta_min + j as f64 * h;
            a[(j, j)] = -2.0 * k + theta * lambda * lambda + p.r;
            if j == 0 {
                a[(0, 1)] = 2.0 * k;
            } else if j + 1 == nodes {
                a[(j, j - 1)] = 2.0 * k;
            } else {
                a[(j, j - 1)] = k;
                a[(j, j + 1)] = k;
            }
        }
        a.complex_eigenvalues()
            .iter()
            .map(|z| z.re)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    #[test]
    fn lambda_zero_is_exact() {
        for (tm, tmx, alpha, r) in [
            (1.0, 2.0, 1.0, 1.0),
            (0.5, 3.0, 0.2, 2.5),
            (2.0, 2.5, 7.0, 0.3),
        ] {
            let p = ModelParams::new(tm, tmx, alpha, r).unwrap();
            let g = ThetaGrid::new(&p, 81).unwrap();
            let sol = eigen_H(0.0, &p, &g).unwrap();
            assert_abs_diff_eq!(sol.h, r, epsilon = 1e-10);
            for q in &sol.q {
                assert_abs_diff_eq!(*q, 1.0 / (tmx - tm), epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn h_matches_dense_oracle() {
        let p = ModelParams::new(1.0, 2.0, 1.0, 1.0).unwrap();
        let g = ThetaGrid::new(&p, 41).unwrap();
        let sol = eigen_H(1.0, &p, &g).unwrap();
        let oracle = dense_h(1.0, &p, 41);
        assert!(sol.h >= 2.0 && sol.h <= 3.0);
        assert!(
            (sol.h - oracle).abs() < 1e-9 * oracle,
            "{} vs {oracle}",
            sol.h
        );
        assert_abs_diff_eq!(dispersion_c(1.0, &p, &g).unwrap(), oracle, epsilon = 1e-9);
        let gamma = gamma_of_lambda(2.0, &p, &g).unwrap();
        assert_abs_diff_eq!(
            gamma,
            4.0 * 2.0 + 1.0 - dense_h(2.0, &p, 41),
            epsilon = 1e-8
        );
        assert!(gamma > 0.0);
    }

    #[test]
    fn eigenpair_invariants() {
        let (p, g) = base();
        for lambda in [-3.0, -0.4, 0.0, 0.3, 1.0, 2.5, 8.0, 30.0] {
            let sol = eigen_H(lambda, &p, &g).unwrap();
            assert!(sol.q.iter().all(|&q| q > 0.0));
            assert_abs_diff_eq!(g.integrate(&sol.q), 1.0, epsilon = 1e-10);
            let res = sol.residual(&p, &g);
            assert!(res < 1e-6, "residual {res} at lambda {lambda}");
            let l2 = lambda * lambda;
            assert!(sol.h >= l2 * p.theta_min + p.r - 1e-9);
            assert!(sol.h <= l2 * p.theta_max + p.r + 1e-9);
        }
    }

    #[test]
    fn evenness_is_exact() {
        let (p, g) = base();
        for lambda in [0.1, 0.9, 4.0] {
            assert_eq!(
                eigen_H(lambda, &p, &g).unwrap().h,
                eigen_H(-lambda, &p, &g).unwrap().h
            );
        }
    }

    #[test]
    fn discrete_convexity() {
        let (p, g) = base();
        let hs: Vec<f64> = (-40..=40)
            .map(|k| eigen_H(k as f64 * 0.1, &p, &g).unwrap().h)
            .collect();
        for w in hs.windows(3) {
            assert!(w[1] <= 0.5 * (w[0] + w[2]) + 1e-9);
        }
    }

    #[test]
    fn gamma_zero_at_origin_positive_elsewhere() {
        let (p, g) = base();
        assert_abs_diff_eq!(gamma_of_lambda(0.0, &p, &g).unwrap(), 0.0, epsilon = 1e-10);
        for lambda in [0.05, 0.5, 1.0, 3.0] {
            assert!(gamma_of_lambda(lambda, &p, &g).unwrap() > 0.0);
        }
        assert!(gamma_of_lambda(1.0, &p, &g).unwrap() < 1.0);
    }

    #[test]
    fn dispersion_rejects_nonpositive() {
        let (p, g) = base();
        assert!(dispersion_c(0.0, &p, &g).is_err());
        assert!(dispersion_c(-1.0, &p, &g).is_err());
    }

    #[test]
    fn dispersion_small_lambda_blows_up() {
        let (p, g) = base();
        let at_kpp = dispersion_c((p.r / p.theta_max).sqrt(), &p, &g).unwrap();
        assert!(at_kpp <= p.kpp_upper() + 1e-9);
        assert!(dispersion_c(1e-3, &p, &g).unwrap() > 100.0 * at_kpp);
    }

    #[test]
    fn dispersion_curve_respects_envelope() {
        let (p, g) = base();
        let lambdas = log_space(0.05, 10.0, 50);
        let curve = dispersion_curve(&lambdas, &p, &g).unwrap();
        assert_eq!(curve.samples.len(), 50);
        assert!(curve.samples.iter().all(|s| s.within_envelope(&p, 1e-4)));
    }

    #[test]
    fn cstar_within_kpp_bounds() {
        let (p, g) = base();
        let res = compute_cstar(&p, &g, &CstarOptions::default()).unwrap();
        assert!(res.c_star >= p.kpp_lower() && res.c_star <= p.kpp_upper());
        assert!(res.lambda_star > 0.0);
        assert!(res.bracket.1 - res.bracket.0 <= 1e-8 * res.lambda_star * 1.01);
    }

    #[test]
    fn cstar_degenerate_interval() {
        let p = ModelParams::new(1.0, 1.001, 1.0, 1.0).unwrap();
        let g = ThetaGrid::new(&p, 81).unwrap();
        let res = compute_cstar(&p, &g, &CstarOptions::default()).unwrap();
        assert!((res.c_star / p.kpp_lower() - 1.0).abs() < 5e-3);
    }

    #[test]
    fn hcstar_identity_minimizer() {
        let (p, g) = base();
        let opts = CstarOptions::default();
        let front = compute_cstar(&p, &g, &opts).unwrap();
        let at_star = check_hcstar_identity_with(front.lambda_star, &p, &g, &front, &opts).unwrap();
        assert!(at_star.relative_error <= 1e-6);
        assert!((at_star.minimizing_scale - 1.0).abs() < 1e-3);
        let doubled =
            check_hcstar_identity_with(2.0 * front.lambda_star, &p, &g, &front, &opts).unwrap();
        assert!(
            (doubled.minimizing_scale - 2.0).abs() < 2e-3,
            "{}",
            doubled.minimizing_scale
        );
    }

    #[test]
    fn hcstar_identity_against_scale_scan() {
        let (p, g) = base();
        let check = check_hcstar_identity(1.0, &p, &g).unwrap();
        assert!(check.relative_error <= 1e-3);
        // brute-force scan of s H(1/s)
        let brute = (1..=4000)
            .map(|k| 0.2 + k as f64 * 0.0005)
            .map(|s| s * eigen_H(1.0 / s, &p, &g).unwrap().h)
            .fold(f64::INFINITY, f64::min);
        assert!((check.infimum - brute).abs() <= 1e-6 * brute);
    }

    #[test]
    fn h_table_lookup() {
        let (p, g) = base();
        let table = build_h_table(6.0, 61, &p, &g).unwrap();
        assert_abs_diff_eq!(table.eval(0.0), p.r, epsilon = 1e-12);
        assert_eq!(table.eval(-2.35), table.eval(2.35));
        assert!(table.samples().windows(2).all(|w| w[1] >= w[0]));
        // max curvature from fine second differences of direct solves
        let d = table.step() / 4.0;
        let curvature = (1..240)
            .map(|k| {
                let l = k as f64 * d;
                let h = |x: f64| eigen_H(x, &p, &g).unwrap().h;
                (h(l + d) - 2.0 * h(l) + h(l - d)) / (d * d)
            })
            .fold(0.0, f64::max);
        let bound = curvature * table.step().powi(2) / 8.0;
        for k in 0..60 {
            let mid = (k as f64 + 0.5) * table.step();
            let direct = eigen_H(mid, &p, &g).unwrap().h;
            assert!((table.eval(mid) - direct).abs() <= bound + 1e-9);
        }
        assert!(!table.lookup(11.0).beyond_trusted);
        assert!(table.lookup(-12.5).beyond_trusted);
        let n = table.samples().len();
        let last = (table.samples()[n - 1] - table.samples()[n - 2]) / table.step();
        assert_abs_diff_eq!(
            table.eval(7.0),
            table.samples()[n - 1] + last,
            epsilon = 1e-9
        );
        assert_abs_diff_eq!(table.max_slope(100.0), last, epsilon = 1e-12);
        assert!(build_h_table(6.0, 8, &p, &g).is_err());
    }

    /// Largest eigenvalue of the symmetric tridiagonal `(diag, off)` by
    /// Sturm-sequence bisection.
    fn sturm_max(diag: &[f64], off: &[f64]) -> f64 {
        let n = diag.len();
        // number of eigenvalues below x
        let below = |x: f64| {
            let mut count = 0;
            let mut q = diag[0] - x;
            if q < 0.0 {
                count += 1;
            }
            for i in 1..n {
                let denom = if q == 0.0 { 1e-300 } else { q };
                q = diag[i] - x - off[i - 1] * off[i - 1] / denom;
                if q < 0.0 {
                    count += 1;
                }
            }
            count
        };
        let radius = off.iter().map(|e| 2.0 * e.abs()).fold(0.0, f64::max);
        let mut lo = diag.iter().cloned().fold(f64::INFINITY, f64::min) - radius;
        let mut hi = diag.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + radius;
        while hi - lo > 1e-13 * hi.abs().max(1.0) {
            let mid = 0.5 * (lo + hi);
            if below(mid) == n {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Global minimum of `c` over `count` log-spaced wave numbers.
    fn brute_cstar(p: &ModelParams, nodes: usize, count: usize) -> f64 {
        let grid = ThetaGrid::new(p, nodes).unwrap();
        let (lo, hi) = lambda_scan_range(p);
        log_space(lo, hi, count)
            .into_par_iter()
            .map(|l| {
                let (d, e) = symmetric_operator(l, p, &grid);
                sturm_max(&d, &e) / l
            })
            .reduce(|| f64::INFINITY, f64::min)
    }

    #[test]
    fn sturm_oracle_agrees_with_dense() {
        let p = ModelParams::new(1.0, 2.0, 1.0, 1.0).unwrap();
        let g = ThetaGrid::new(&p, 41).unwrap();
        let (d, e) = symmetric_operator(1.0, &p, &g);
        assert!((sturm_max(&d, &e) - dense_h(1.0, &p, 41)).abs() < 1e-9);
    }

    #[test]
    fn cstar_matches_brute_force_scan() {
        let (p, g) = base();
        let front = compute_cstar(&p, &g, &CstarOptions::default()).unwrap();
        // same grid: only the search differs
        // a scan minimum lies above the true one by about c'' (dlambda)^2 / 8
        let same = brute_cstar(&p, g.node_count, 10_000);
        assert!(front.c_star <= same + 1e-12, "{} vs {same}", front.c_star);
        assert!(
            same - front.c_star <= 1e-6 * same,
            "{} vs {same}",
            front.c_star
        );
        // 4x refined grid: adds the O(dtheta^2) discretization gap
        let refined = brute_cstar(&p, 4 * (g.node_count - 1) + 1, 10_000);
        assert!(
            (front.c_star - refined).abs() <= 1e-5 * refined,
            "{} vs {refined}",
            front.c_star
        );
    }

    #[test]
    fn cstar_alpha_sweep_matches_brute_force() {
        for alpha in [0.1, 10.0] {
            let p = ModelParams::new(1.0, 2.0, alpha, 1.0).unwrap();
            let g = ThetaGrid::new(&p, 81).unwrap();
            let front = compute_cstar(&p, &g, &CstarOptions::default()).unwrap();
            let same = brute_cstar(&p, 81, 10_000);
            assert!(
                front.c_star <= same + 1e-12 && same - front.c_star <= 1e-6 * same,
                "alpha {alpha}"
            );
            assert!(front.c_star >= 2.0 && front.c_star <= 2.0 * std::f64::consts::SQRT_2);
        }
    }

    #[test]
    fn second_order_in_trait_spacing() {
        let (p, _) = base();
        let order = convergence_order(1.0, &p, 41).unwrap();
        assert!((1.7..=2.3).contains(&order), "order {order}");
    }
}
