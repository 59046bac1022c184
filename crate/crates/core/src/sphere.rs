//! Zonal two-point bound for spherical codes: the Delsarte linear
//! programming bound.
//!
//! A code on `S^{n−1}` with minimal angle `θ` has all pairwise inner products
//! in `[−1, cos θ]`. If `f = Σ_k f_k G_k^n` with `f_k ≥ 0` and `f(t) ≤ −1` on
//! that interval, then `Σ_{x,y} f(x·y) ≥ 0` forces `N ≤ 1 + f(1)`. The LP
//! over the coefficients is solved on a sampled interval; the resulting
//! polynomial is then checked on the whole interval. If `f ≤ −1 + v` with
//! `v < 1` the same argument gives `N ≤ 1 + f(1)/(1 − v)`, which is the
//! certified value.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::Serialize;
use thiserror::Error;

use crate::hierarchy::{BoundResult, Certificate};
use crate::sdp::{self, Block, Entry, SdpError, SdpProblem, SdpSolution, Sense, SolveStatus, SolverOptions, SparseBlockMatrix};

pub const MAX_DEGREE: usize = 400;
pub const MAX_GRID: usize = 200_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SphereError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("{what} of {size} exceeds the cap of {cap}")]
    CapExceeded { what: &'static str, size: usize, cap: usize },
    #[error(transparent)]
    Sdp(#[from] SdpError),
}

/// Normalised Gegenbauer polynomials `G_k^n` with `G_k^n(1) = 1`.
#[derive(Clone, Debug)]
pub struct GegenbauerEvaluator {
    n: usize,
    degree: usize,
}

impl GegenbauerEvaluator {
    pub fn new(n: usize, degree: usize) -> Result<Self, SphereError> {
        if n < 2 {
            return Err(SphereError::InvalidParameter(format!("dimension must be at least 2, got {n}")));
        }
        if degree > MAX_DEGREE {
            return Err(SphereError::CapExceeded {
                what: "polynomial degree",
                size: degree,
                cap: MAX_DEGREE,
            });
        }
        Ok(Self { n, degree })
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    fn coefficients(&self, k: usize) -> (f64, f64, f64) {
        let (n, k) = (self.n as f64, k as f64);
        (2.0 * k + n - 4.0, k - 1.0, k + n - 3.0)
    }

    /// `[G_0(x), …, G_d(x)]`.
    pub fn eval_all(&self, x: f64) -> Vec<f64> {
        let mut g = Vec::with_capacity(self.degree + 1);
        g.push(1.0);
        if self.degree >= 1 {
            g.push(x);
        }
        for k in 2..=self.degree {
            let (a, b, c) = self.coefficients(k);
            g.push((a * x * g[k - 1] - b * g[k - 2]) / c);
        }
        g
    }

    /// Values, first and second derivatives of all `G_k` at `x`.
    pub fn eval_with_derivatives(&self, x: f64) -> [Vec<f64>; 3] {
        let d = self.degree;
        let mut g = vec![0.0; d + 1];
        let mut g1 = vec![0.0; d + 1];
        let mut g2 = vec![0.0; d + 1];
        g[0] = 1.0;
        if d >= 1 {
            g[1] = x;
            g1[1] = 1.0;
        }
        for k in 2..=d {
            let (a, b, c) = self.coefficients(k);
            g[k] = (a * x * g[k - 1] - b * g[k - 2]) / c;
            g1[k] = (a * (g[k - 1] + x * g1[k - 1]) - b * g1[k - 2]) / c;
            g2[k] = (a * (2.0 * g1[k - 1] + x * g2[k - 1]) - b * g2[k - 2]) / c;
        }
        [g, g1, g2]
    }
}

/// `G_k^n(x)` for `n ≥ 2` and `x ∈ [−1, 1]`.
pub fn gegenbauer_eval(n: usize, k: usize, x: f64) -> Result<f64, SphereError> {
    if !(-1.0..=1.0).contains(&x) {
        return Err(SphereError::InvalidParameter(format!("x = {x} lies outside [-1, 1]")));
    }
    Ok(GegenbauerEvaluator::new(n, k)?.eval_all(x)[k])
}

/// `Σ_k c_k G_k(x)` and its first two derivatives.
fn eval_poly(ev: &GegenbauerEvaluator, c: &[f64], x: f64) -> (f64, f64, f64) {
    let [g, g1, g2] = ev.eval_with_derivatives(x);
    let dot = |v: &[f64]| c.iter().zip(v).map(|(a, b)| a * b).sum::<f64>();
    (dot(&g), dot(&g1), dot(&g2))
}

/// `N` Chebyshev–Lobatto points of `[lo, hi]`, ascending and including
/// both endpoints.
pub fn chebyshev_points(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 || lo == hi {
        return vec![lo];
    }
    let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
    let mut pts: Vec<f64> = (0..count)
        .rev()
        .map(|j| mid + half * (std::f64::consts::PI * j as f64 / (count - 1) as f64).cos())
        .collect();
    pts[0] = lo;
    pts[count - 1] = hi;
    pts.dedup();
    pts
}

/// Sampling and verification data for one Delsarte LP.
#[derive(Clone, Debug)]
pub struct DelsarteProblem {
    pub n: usize,
    pub theta: f64,
    pub degree: usize,
    /// LP constraint points in `[−1, cos θ]`, sorted and duplicate-free.
    pub grid: Vec<f64>,
    /// Points for the posterior check.
    pub verification_grid: Vec<f64>,
}

impl DelsarteProblem {
    /// Grids of `grid_density · d` and `100 · d` Chebyshev points.
    pub fn new(n: usize, theta: f64, degree: usize, grid_density: usize) -> Result<Self, SphereError> {
        GegenbauerEvaluator::new(n, degree)?;
        if degree < 1 {
            return Err(SphereError::InvalidParameter("degree must be at least 1".into()));
        }
        if !(theta > 0.0 && theta <= std::f64::consts::PI) {
            return Err(SphereError::InvalidParameter(format!("theta must lie in (0, pi], got {theta}")));
        }
        let coarse = (grid_density.max(1) * degree).max(2);
        let fine = (100 * degree).max(coarse);
        if fine > MAX_GRID {
            return Err(SphereError::CapExceeded {
                what: "sample grid",
                size: fine,
                cap: MAX_GRID,
            });
        }
        let c = theta.cos();
        Ok(Self {
            n,
            theta,
            degree,
            grid: chebyshev_points(-1.0, c, coarse),
            verification_grid: chebyshev_points(-1.0, c, fine),
        })
    }

    pub fn upper_end(&self) -> f64 {
        self.theta.cos()
    }

    /// The LP on the current grid, as an SDP with one diagonal block:
    /// `f_k ≥ 0` for every coefficient and `−1 − f(t_j) ≥ 0` for every grid
    /// point, maximising `−Σ f_k`.
    pub fn linear_program(&self) -> SdpProblem {
        let ev = GegenbauerEvaluator::new(self.n, self.degree).expect("validated on construction");
        let d = self.degree;
        let rows: Vec<Vec<f64>> = self.grid.iter().map(|&t| ev.eval_all(t)).collect();
        let mut p = SdpProblem::new(vec![Block::Diagonal(d + 1 + self.grid.len())], Sense::Minimize);
        p.set_objective(SparseBlockMatrix::from_entries((0..self.grid.len()).map(|j| Entry {
            block: 0,
            row: d + 1 + j,
            col: d + 1 + j,
            value: -1.0,
        })));
        for k in 0..=d {
            let entries = std::iter::once(Entry { block: 0, row: k, col: k, value: -1.0 }).chain(
                rows.iter()
                    .enumerate()
                    .map(|(j, g)| Entry { block: 0, row: d + 1 + j, col: d + 1 + j, value: g[k] }),
            );
            p.add_constraint(SparseBlockMatrix::from_entries(entries), -1.0);
        }
        p
    }
}

#[derive(Clone, Debug)]
pub struct DelsarteOptions {
    /// Coarse grid size per unit of degree.
    pub grid_density: usize,
    /// Fine grid size passed to [`verify_certificate`].
    pub fine_grid_size: Option<usize>,
    /// Rounds of adding the worst points back into the grid.
    pub refine_rounds: usize,
    pub solver: SolverOptions,
    /// Tolerance for the certificate check.
    pub verify_tol: f64,
}

impl Default for DelsarteOptions {
    fn default() -> Self {
        Self {
            grid_density: 10,
            fine_grid_size: None,
            refine_rounds: 10,
            solver: SolverOptions {
                tol: 1e-10,
                ..SolverOptions::default()
            },
            verify_tol: 1e-6,
        }
    }
}

/// Outcome of checking a polynomial certificate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PolynomialReport {
    /// Smallest coefficient before clamping.
    pub coefficient_floor: f64,
    /// Coefficients used for the check (entries within tolerance of zero
    /// clamped to zero).
    pub coefficients: Vec<f64>,
    pub f_at_one: f64,
    /// Largest value of `f` seen on the fine grid.
    pub grid_max: f64,
    pub grid_argmax: f64,
    /// Upper bound on `sup f` over `[−1, cos θ]`.
    pub sup_bound: f64,
    /// `max(0, sup_bound + 1)`.
    pub violation: f64,
    /// `sup_bound + 1`; at most the tolerance when the check passes.
    pub margin: f64,
    /// `1 + f(1)/(1 − violation)` when the check passed.
    pub certified_bound: Option<f64>,
    pub passed: bool,
}

struct Interval {
    lo: f64,
    hi: f64,
    f_lo: f64,
    f_hi: f64,
    upper: f64,
}

impl PartialEq for Interval {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Interval {}
impl PartialOrd for Interval {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Interval {
    fn cmp(&self, other: &Self) -> Ordering {
        self.upper
            .total_cmp(&other.upper)
            .then_with(|| other.lo.total_cmp(&self.lo))
    }
}

const MAX_BISECTIONS: usize = 200_000;

/// Branch and bound for `sup f` on the hull of `points`, using
/// `f ≤ max(f(a), f(b)) + L(b − a)²/8` on `[a, b]` when `|f''| ≤ L`.
/// Returns `(upper bound, best value, argmax)`.
fn sup_bound(f: impl Fn(f64) -> f64, points: &[f64], l2: f64, eps: f64) -> (f64, f64, f64) {
    let values: Vec<f64> = points.iter().map(|&x| f(x)).collect();
    let (mut best, mut arg) = (f64::NEG_INFINITY, points[0]);
    for (&x, &v) in points.iter().zip(&values) {
        if v > best {
            best = v;
            arg = x;
        }
    }
    let make = |lo: f64, hi: f64, f_lo: f64, f_hi: f64| Interval {
        lo,
        hi,
        f_lo,
        f_hi,
        upper: f_lo.max(f_hi) + l2 * (hi - lo) * (hi - lo) / 8.0,
    };
    let mut heap: BinaryHeap<Interval> = points
        .windows(2)
        .zip(values.windows(2))
        .map(|(x, v)| make(x[0], x[1], v[0], v[1]))
        .collect();
    let mut bisections = 0;
    while let Some(top) = heap.peek() {
        if top.upper <= best + eps || bisections >= MAX_BISECTIONS {
            return (top.upper.max(best), best, arg);
        }
        let iv = heap.pop().expect("peeked");
        let mid = 0.5 * (iv.lo + iv.hi);
        if mid <= iv.lo || mid >= iv.hi {
            // The interval cannot be split further in floating point.
            return (iv.upper.max(best), best, arg);
        }
        let fm = f(mid);
        if fm > best {
            best = fm;
            arg = mid;
        }
        heap.push(make(iv.lo, mid, iv.f_lo, fm));
        heap.push(make(mid, iv.hi, fm, iv.f_hi));
        bisections += 1;
    }
    (best, best, arg)
}

/// Checks `f = Σ f_k G_k^n` against the Delsarte conditions on
/// `[−1, cos θ]`: coefficients at least `−tol` (then clamped to zero), and
/// `f ≤ −1 + tol`. The fine grid seeds a branch and bound that bounds
/// `sup f` over the whole interval.
pub fn verify_certificate(coeffs: &[f64], n: usize, theta: f64, fine_grid_size: usize, tol: f64) -> PolynomialReport {
    let coefficient_floor = coeffs.iter().copied().fold(f64::INFINITY, f64::min);
    let admissible = coefficient_floor >= -tol && coeffs.iter().all(|c| c.is_finite());
    let clamped: Vec<f64> = coeffs.iter().map(|&c| c.max(0.0)).collect();
    let degree = coeffs.len().saturating_sub(1);
    let ev = match GegenbauerEvaluator::new(n, degree) {
        Ok(ev) => ev,
        Err(_) => {
            return PolynomialReport {
                coefficient_floor,
                coefficients: clamped,
                f_at_one: f64::NAN,
                grid_max: f64::NAN,
                grid_argmax: f64::NAN,
                sup_bound: f64::INFINITY,
                violation: f64::INFINITY,
                margin: f64::INFINITY,
                certified_bound: None,
                passed: false,
            }
        }
    };
    let f = |x: f64| eval_poly(&ev, &clamped, x).0;
    let f_at_one: f64 = clamped.iter().sum();
    // |G_k''| on [−1, 1] peaks at x = 1.
    let [_, _, g2] = ev.eval_with_derivatives(1.0);
    let l2: f64 = clamped.iter().zip(&g2).map(|(c, g)| c * g.abs()).sum();
    // Rounding in the recurrence, scaled by the coefficient mass.
    let guard = 64.0 * (degree as f64 + 2.0) * f64::EPSILON * (1.0 + f_at_one);

    let points = chebyshev_points(-1.0, theta.cos(), fine_grid_size.max(2));
    let (upper, grid_max_refined, arg) = sup_bound(f, &points, l2, 1e-12 * (1.0 + f_at_one));
    let sup = upper + guard;
    let violation = (sup + 1.0).max(0.0);
    let margin = sup + 1.0;
    let passed = admissible && margin <= tol;
    let certified_bound = passed.then(|| 1.0 + f_at_one / (1.0 - violation));
    PolynomialReport {
        coefficient_floor,
        coefficients: clamped,
        f_at_one,
        grid_max: grid_max_refined,
        grid_argmax: arg,
        sup_bound: sup,
        violation,
        margin,
        certified_bound,
        passed,
    }
}

/// The Delsarte LP bound with default options.
pub fn delsarte_lp_bound(
    n: usize,
    theta: f64,
    degree: usize,
    grid_density: usize,
    tol: f64,
) -> Result<(BoundResult, PolynomialReport), SphereError> {
    let opts = DelsarteOptions {
        grid_density,
        solver: SolverOptions {
            tol,
            ..SolverOptions::default()
        },
        ..DelsarteOptions::default()
    };
    delsarte_lp_bound_with(n, theta, degree, &opts)
}

pub fn delsarte_lp_bound_with(
    n: usize,
    theta: f64,
    degree: usize,
    opts: &DelsarteOptions,
) -> Result<(BoundResult, PolynomialReport), SphereError> {
    let mut problem = DelsarteProblem::new(n, theta, degree, opts.grid_density)?;
    let fine = opts.fine_grid_size.unwrap_or(problem.verification_grid.len());
    let ev = GegenbauerEvaluator::new(n, degree)?;
    let c = problem.upper_end();
    let mut iterations = 0;

    let mut best: Option<(SdpSolution, PolynomialReport)> = None;
    let (mut best_violation, mut stale) = (f64::INFINITY, 0);
    for round in 0..=opts.refine_rounds {
        let lp = problem.linear_program();
        let sol = sdp::solve_with(&lp, &opts.solver)?;
        iterations += sol.iterations;
        let report = verify_certificate(&sol.y, n, theta, fine, opts.verify_tol);
        let improves = match &best {
            None => true,
            Some((b, r)) => ranks_above(&sol, &report, b, r),
        };
        let coeffs = sol.y.clone();
        if report.violation < best_violation {
            best_violation = report.violation;
            stale = 0;
        } else {
            stale += 1;
        }
        let done = report.violation <= 1e-3 * opts.verify_tol || stale >= 3;
        if improves {
            best = Some((sol, report));
        }
        if done || round == opts.refine_rounds {
            break;
        }
        let added = refinement_points(&ev, &coeffs, &problem, c);
        if added.is_empty() {
            break;
        }
        problem.grid.extend(added);
        problem.grid.sort_by(f64::total_cmp);
        problem.grid.dedup();
        if problem.grid.len() > MAX_GRID {
            return Err(SphereError::CapExceeded {
                what: "sample grid",
                size: problem.grid.len(),
                cap: MAX_GRID,
            });
        }
    }
    let (solution, report) = best.expect("at least one round runs");
    let coeffs = solution.y.clone();

    let value = 1.0 + coeffs.iter().sum::<f64>();
    let dual_value = 1.0 - solution.primal_objective;
    let certified = report.passed;
    let result = BoundResult {
        value,
        dual_value,
        gap: (value - dual_value).abs(),
        status: solution.status,
        iterations,
        verification_margin: report.margin,
        certified_bound: if certified { report.certified_bound } else { None },
        certificate: Some(Certificate::Polynomial {
            n,
            theta,
            coefficients: report.coefficients.clone(),
        }),
        moments: None,
    };
    Ok((result, report))
}

/// Whether round `a` should replace round `b` as the reported one: a
/// verified certificate beats an unverified one, then an optimal solve beats
/// a non-optimal one, then the smaller certified bound or the smaller
/// violation wins.
fn ranks_above(a: &SdpSolution, ra: &PolynomialReport, b: &SdpSolution, rb: &PolynomialReport) -> bool {
    let key = |s: &SdpSolution, r: &PolynomialReport| (r.passed, s.status == SolveStatus::Optimal);
    let (ka, kb) = (key(a, ra), key(b, rb));
    if ka != kb {
        return ka > kb;
    }
    match (ra.certified_bound, rb.certified_bound) {
        (Some(x), Some(y)) => x <= y,
        _ => ra.violation <= rb.violation,
    }
}

/// Smallest distance between a new sample point and the existing grid.
const MIN_SEPARATION: f64 = 1e-7;

/// Local maxima of `f` above `−1` on the verification grid, polished by
/// Newton steps, each with two close neighbours.
fn refinement_points(ev: &GegenbauerEvaluator, coeffs: &[f64], problem: &DelsarteProblem, c: f64) -> Vec<f64> {
    let fine_pts = &problem.verification_grid;
    let vals: Vec<f64> = fine_pts.iter().map(|&x| eval_poly(ev, coeffs, x).0).collect();
    let floor = -1.0 + 1e-13 * (1.0 + coeffs.iter().sum::<f64>().abs());
    let mut added = Vec::new();
    for i in 0..vals.len() {
        let left = i == 0 || vals[i] >= vals[i - 1];
        let right = i + 1 == vals.len() || vals[i] >= vals[i + 1];
        if !(left && right) {
            continue;
        }
        let (lo, hi) = (fine_pts[i.saturating_sub(1)], fine_pts[(i + 1).min(fine_pts.len() - 1)]);
        let mut x = fine_pts[i];
        for _ in 0..20 {
            let (_, d1, d2) = eval_poly(ev, coeffs, x);
            if d2 >= 0.0 {
                break;
            }
            let next = (x - d1 / d2).clamp(lo, hi);
            if next == x {
                break;
            }
            x = next;
        }
        if eval_poly(ev, coeffs, x).0 > floor {
            let h = 0.05 * (hi - lo);
            for p in [x - h, x, x + h] {
                added.push(p.clamp(-1.0, c));
            }
        }
    }
    added.sort_by(f64::total_cmp);
    added.dedup_by(|a, b| (*a - *b).abs() < MIN_SEPARATION);
    added.retain(|&x| {
        let i = problem.grid.partition_point(|&g| g < x);
        let near = |j: usize| problem.grid.get(j).is_some_and(|&g| (g - x).abs() < MIN_SEPARATION);
        !near(i) && !(i > 0 && near(i - 1))
    });
    added
}

/// JSON certificate record.
#[derive(Clone, Debug, Serialize)]
pub struct SphereCertificate {
    pub n: usize,
    pub theta: f64,
    pub degree: usize,
    pub coefficients: Vec<f64>,
    pub verified_margin: f64,
    pub certified_bound: Option<f64>,
}

impl SphereCertificate {
    pub fn new(n: usize, theta: f64, report: &PolynomialReport) -> Self {
        Self {
            n,
            theta,
            degree: report.coefficients.len().saturating_sub(1),
            coefficients: report.coefficients.clone(),
            verified_margin: report.margin,
            certified_bound: report.certified_bound,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serialises")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn special_cases() {
        for x in [-1.0, -0.3, 0.0, 0.7, 1.0] {
            let legendre = (3.0 * x * x - 1.0) / 2.0;
            assert!((gegenbauer_eval(3, 2, x).unwrap() - legendre).abs() < 1e-15);
            for k in 0..8 {
                let cheb = (k as f64 * f64::acos(x)).cos();
                assert!((gegenbauer_eval(2, k, x).unwrap() - cheb).abs() < 1e-12);
            }
        }
        for n in 2..10 {
            for k in 0..12 {
                assert!((gegenbauer_eval(n, k, 1.0).unwrap() - 1.0).abs() < 1e-13);
            }
        }
        assert!(gegenbauer_eval(1, 2, 0.0).is_err());
        assert!(gegenbauer_eval(3, 2, 1.5).is_err());
    }

    #[test]
    fn derivatives_match_differences() {
        let ev = GegenbauerEvaluator::new(5, 7).unwrap();
        let h = 1e-5;
        let x = 0.3;
        let [_, d1, d2] = ev.eval_with_derivatives(x);
        let (p, m) = (ev.eval_all(x + h), ev.eval_all(x - h));
        let c = ev.eval_all(x);
        for k in 0..=7 {
            assert!((d1[k] - (p[k] - m[k]) / (2.0 * h)).abs() < 1e-6);
            assert!((d2[k] - (p[k] - 2.0 * c[k] + m[k]) / (h * h)).abs() < 1e-3);
        }
    }

    #[test]
    fn chebyshev_grid() {
        let g = chebyshev_points(-1.0, 0.5, 11);
        assert_eq!(g.len(), 11);
        assert_eq!((g[0], g[10]), (-1.0, 0.5));
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn trivial_certificates() {
        let r = verify_certificate(&[0.0], 3, PI / 3.0, 100, 1e-9);
        assert!(!r.passed);
        assert!((r.violation - 1.0).abs() < 1e-9);
        assert_eq!(r.certified_bound, None);
        let r = verify_certificate(&[-1.0], 3, PI / 3.0, 100, 1e-9);
        assert!(!r.passed);
        assert_eq!(r.coefficient_floor, -1.0);
    }

    #[test]
    fn square_on_the_circle() {
        let (r, rep) = delsarte_lp_bound(2, PI / 2.0, 4, 10, 1e-10).unwrap();
        assert!(r.is_certified(), "{rep:?}");
        let b = r.certified_bound.unwrap();
        assert!((4.0..=4.001).contains(&b), "{b}");
    }
}
