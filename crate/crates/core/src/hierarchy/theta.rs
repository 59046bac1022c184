//! The two-point bounds `ϑ` and `ϑ′` assembled directly on `V × V`.
//!
//! For weights `w`, `ϑ′*` is: minimise `a` over kernels `F ⪰ 0` with
//! `F(x,x) ≤ a·w(x) − w(x)²` and `F(x,y) ≤ −w(x)w(y)` on non-edges. With
//! unit weights these are `F(x,x) ≤ a − 1` and `F(x,y) ≤ −1`. Dropping the
//! inequality on non-edges in favour of equality gives `ϑ`.

use faer::Mat;

use super::lasserre::{assemble_lasserre_with, solve_moment_program, verify_dual_certificate};
use super::{BoundOptions, BoundResult, Certificate, HierarchyError};
use crate::graph::Graph;
use crate::sdp::{self, Block, Entry, SdpProblem, Sense, SolveStatus, SparseBlockMatrix};

/// An optimal (or near-optimal) `(a, F)` pair for `ϑ′*` or `ϑ*`.
#[derive(Clone, Debug)]
pub struct TwoPointKernel {
    pub a: f64,
    /// `F` over all vertices; rows of zero-weight vertices are zero.
    pub f: Mat<f64>,
    pub status: SolveStatus,
    pub iterations: usize,
    /// `−⟨C, X⟩` from the solver's primal side.
    pub dual_value: f64,
}

/// The direct two-point program over the positive-weight vertices, which
/// are returned alongside. `nonnegative` selects `ϑ′` over `ϑ`.
///
/// In the solver's normal form the variable `y_0` is `a` and the dual slack
/// on block 0 is `F`.
pub fn two_point_program(g: &Graph, nonnegative: bool) -> (SdpProblem, Vec<usize>) {
    let support: Vec<usize> = (0..g.n()).filter(|&v| g.weight(v) > 0.0).collect();
    let k = support.len();
    let w: Vec<f64> = support.iter().map(|&v| g.weight(v)).collect();
    let mut edges = Vec::new();
    let mut non_edges = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            if g.is_adjacent(support[i], support[j]) {
                edges.push((i, j));
            } else {
                non_edges.push((i, j));
            }
        }
    }
    let slack_block = nonnegative && !non_edges.is_empty();
    let mut blocks = vec![Block::Psd(k)];
    if slack_block {
        blocks.push(Block::Diagonal(non_edges.len()));
    }
    let mut p = SdpProblem::new(blocks, Sense::Minimize);
    p.set_objective(SparseBlockMatrix::from_entries((0..k).flat_map(|i| {
        let w = &w;
        (i..k).map(move |j| Entry { block: 0, row: i, col: j, value: -w[i] * w[j] })
    })));
    p.add_constraint(
        SparseBlockMatrix::from_entries((0..k).map(|i| Entry { block: 0, row: i, col: i, value: -w[i] })),
        -1.0,
    );
    for &(i, j) in &edges {
        p.add_constraint(
            SparseBlockMatrix::from_entries([Entry { block: 0, row: i, col: j, value: -1.0 }]),
            0.0,
        );
    }
    if slack_block {
        for (s, &(i, j)) in non_edges.iter().enumerate() {
            p.add_constraint(
                SparseBlockMatrix::from_entries([
                    Entry { block: 0, row: i, col: j, value: 1.0 },
                    Entry { block: 1, row: s, col: s, value: -1.0 },
                ]),
                0.0,
            );
        }
    }
    (p, support)
}

/// Solves the direct two-point program; `nonnegative` selects `ϑ′` over `ϑ`.
pub fn two_point_kernel(g: &Graph, nonnegative: bool, opts: &BoundOptions) -> Result<TwoPointKernel, HierarchyError> {
    let n = g.n();
    let (p, support) = two_point_program(g, nonnegative);
    if support.is_empty() {
        return Ok(TwoPointKernel {
            a: 0.0,
            f: Mat::zeros(n, n),
            status: SolveStatus::Optimal,
            iterations: 0,
            dual_value: 0.0,
        });
    }
    let k = support.len();
    let sol = sdp::solve_with(&p, &opts.solver)?;
    let z = p.dual_slack(&sol.y);
    let fz = z[0].as_psd().expect("block 0 is dense");
    let mut f = Mat::zeros(n, n);
    for i in 0..k {
        for j in 0..k {
            f[(support[i], support[j])] = fz[(i, j)];
        }
    }
    Ok(TwoPointKernel {
        a: sol.y[0],
        f,
        status: sol.status,
        iterations: sol.iterations,
        dual_value: -sol.primal_objective,
    })
}

/// Turns `(a, F)` into a kernel over `I_1 × I_1`:
/// `K(∅,∅) = a`, `K(∅,{x}) = −w(x)`, `K({x},{y}) = (F(x,y) + w(x)w(y))/a`.
/// By the Schur complement `K ⪰ 0` iff `F ⪰ 0`, and the `ϑ′*` constraints
/// become the `las_1*` constraints.
pub fn lift_theta_prime_solution(a: f64, f: &Mat<f64>, weights: &[f64]) -> Result<Mat<f64>, HierarchyError> {
    let n = weights.len();
    if f.nrows() != n || f.ncols() != n {
        return Err(HierarchyError::InvalidInput(format!(
            "F is {}×{} for {n} vertices",
            f.nrows(),
            f.ncols()
        )));
    }
    let max_w = weights.iter().copied().fold(0.0, f64::max);
    if max_w == 0.0 {
        if !(a >= 0.0) {
            return Err(HierarchyError::InvalidInput(format!("a = {a} is negative")));
        }
        let mut k = Mat::zeros(n + 1, n + 1);
        k[(0, 0)] = a;
        return Ok(k);
    }
    // F(x,x) ≥ 0 forces a ≥ w(x); with unit weights this is a ≥ 1.
    if !(a >= max_w * (1.0 - 1e-9)) {
        return Err(HierarchyError::InvalidInput(format!(
            "a = {a} is below the largest weight {max_w}"
        )));
    }
    Ok(Mat::from_fn(n + 1, n + 1, |i, j| match (i, j) {
        (0, 0) => a,
        (0, y) => -weights[y - 1],
        (x, 0) => -weights[x - 1],
        (x, y) if weights[x - 1] == 0.0 || weights[y - 1] == 0.0 => 0.0,
        (x, y) => (f[(x - 1, y - 1)] + weights[x - 1] * weights[y - 1]) / a,
    }))
}

fn two_point_bound(g: &Graph, nonnegative: bool, opts: &BoundOptions) -> Result<BoundResult, HierarchyError> {
    let sol = two_point_kernel(g, nonnegative, opts)?;
    let k = lift_theta_prime_solution(sol.a, &sol.f, g.weights())?;
    let report = verify_dual_certificate(g, 1, &k, opts.verify_tol)?;
    let certified = report.passed;
    Ok(BoundResult {
        value: sol.a,
        dual_value: sol.dual_value,
        gap: (sol.a - sol.dual_value).abs(),
        status: sol.status,
        iterations: sol.iterations,
        verification_margin: report.margin,
        certified_bound: certified.then_some(report.bound),
        certificate: Some(Certificate::Kernel { level: 1, matrix: k }),
        moments: None,
    })
}

/// Lovász `ϑ(G)` (weighted by the vertex weights).
pub fn theta(g: &Graph, tol: f64) -> Result<BoundResult, HierarchyError> {
    two_point_bound(g, false, &BoundOptions::with_tol(tol))
}

/// Schrijver's `ϑ′(G)` (weighted by the vertex weights).
pub fn theta_prime(g: &Graph, tol: f64) -> Result<BoundResult, HierarchyError> {
    two_point_bound(g, true, &BoundOptions::with_tol(tol))
}

pub fn theta_with(g: &Graph, nonnegative: bool, opts: &BoundOptions) -> Result<BoundResult, HierarchyError> {
    two_point_bound(g, nonnegative, opts)
}

/// `ϑ(G)` as `las_1` without the `y ≥ 0` block.
pub fn theta_moment(g: &Graph, tol: f64) -> Result<BoundResult, HierarchyError> {
    let opts = BoundOptions::with_tol(tol);
    let program = assemble_lasserre_with(g, 1, false, opts.basis_cap)?;
    solve_moment_program(g, &program, &opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generators::{complete, cycle, petersen};

    #[test]
    fn theta_of_c5_is_sqrt5() {
        let r = theta(&cycle(5).unwrap(), 1e-9).unwrap();
        assert!((r.value - 5f64.sqrt()).abs() < 1e-6, "{}", r.value);
        assert!((r.certified_bound.unwrap() - 5f64.sqrt()).abs() < 1e-6);
        let m = theta_moment(&cycle(5).unwrap(), 1e-9).unwrap();
        assert!((m.value - 5f64.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn complete_and_petersen() {
        let r = theta(&complete(5).unwrap(), 1e-9).unwrap();
        assert!((r.value - 1.0).abs() < 1e-6);
        let r = theta_prime(&petersen(), 1e-9).unwrap();
        assert!((r.value - 4.0).abs() < 1e-6);
        assert!(r.is_certified());
    }

    #[test]
    fn single_vertex_lift() {
        let k = lift_theta_prime_solution(1.0, &Mat::zeros(1, 1), &[1.0]).unwrap();
        let rep = verify_dual_certificate(&Graph::edgeless(1), 1, &k, 1e-12).unwrap();
        assert!(rep.passed);
        assert_eq!(rep.bound, 1.0);
        assert!(lift_theta_prime_solution(0.5, &Mat::zeros(1, 1), &[1.0]).is_err());
    }

    #[test]
    fn weighted_theta_prime_bounds_weighted_alpha() {
        let g = cycle(5).unwrap().with_weights(vec![3.0, 1.0, 1.0, 1.0, 1.0]).unwrap();
        let r = theta_prime(&g, 1e-9).unwrap();
        assert!(r.is_certified());
        assert!(r.value >= 4.0 - 1e-6);
        let las = super::super::las_bound(&g, 1, 1e-9).unwrap();
        assert!((las.value - r.value).abs() < 1e-6);
    }
}
