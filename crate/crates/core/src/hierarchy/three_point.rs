//! Three-point bounds through the local subgraph `Gᵉ` on the non-neighbours
//! of a vertex `e`.
//!
//! `w(e) + las_t(Gᵉ) ≤ las_t(G)` for every vertex. When the automorphism
//! group acts transitively, `α(G) = 1 + α(Gᵉ)` and the left-hand side is a
//! bound on `α(G)`; otherwise it only bounds `1 + α(Gᵉ)`.

use faer::Mat;

use super::lasserre::{las_bound_with, verify_dual_certificate};
use super::{BoundOptions, BoundResult, Certificate, HierarchyError};
use crate::graph::{Graph, GraphError};
use crate::sdp::{self, Block, Entry, SdpProblem, Sense, SparseBlockMatrix};

/// `w(e) + las_t(Gᵉ)`. The certificate is the kernel of `las_t(Gᵉ)*`.
pub fn three_point_bound(g: &Graph, e: usize, t: usize, tol: f64) -> Result<BoundResult, HierarchyError> {
    three_point_bound_with(g, e, t, &BoundOptions::with_tol(tol))
}

pub fn three_point_bound_with(
    g: &Graph,
    e: usize,
    t: usize,
    opts: &BoundOptions,
) -> Result<BoundResult, HierarchyError> {
    let (local, _) = g.local_subgraph(e)?;
    let mut r = las_bound_with(&local, t, opts)?;
    shift(&mut r, g.weight(e));
    Ok(r)
}

fn shift(r: &mut BoundResult, by: f64) {
    r.value += by;
    r.dual_value += by;
    r.certified_bound = r.certified_bound.map(|b| b + by);
}

/// The program of [`three_point_direct`]; block 0 is `F` over `{e} ∪ Vᵉ`
/// with `e` first and `Vᵉ` in ascending order.
pub fn three_point_program(g: &Graph, e: usize) -> Result<SdpProblem, HierarchyError> {
    if e >= g.n() {
        return Err(GraphError::VertexOutOfRange { vertex: e, n: g.n() }.into());
    }
    let others: Vec<usize> = (0..g.n()).filter(|&x| x != e && !g.is_adjacent(e, x)).collect();
    let k = others.len();
    let mut pairs = Vec::new();
    for p in 0..k {
        for q in p + 1..k {
            if !g.is_adjacent(others[p], others[q]) {
                pairs.push((p + 1, q + 1));
            }
        }
    }
    let mut p = SdpProblem::new(vec![Block::Psd(k + 1), Block::Diagonal(k + pairs.len())], Sense::Minimize);
    p.set_objective(SparseBlockMatrix::from_entries([Entry { block: 0, row: 0, col: 0, value: 1.0 }]));
    for (slot, &x) in others.iter().enumerate() {
        let i = slot + 1;
        p.add_constraint(
            SparseBlockMatrix::from_entries([
                Entry { block: 0, row: i, col: i, value: 1.0 },
                Entry { block: 0, row: 0, col: i, value: 1.0 },
                Entry { block: 1, row: slot, col: slot, value: 1.0 },
            ]),
            -g.weight(x),
        );
    }
    for (s, &(i, j)) in pairs.iter().enumerate() {
        let slot = k + s;
        p.add_constraint(
            SparseBlockMatrix::from_entries([
                Entry { block: 0, row: i, col: j, value: 1.0 },
                Entry { block: 1, row: slot, col: slot, value: 1.0 },
            ]),
            0.0,
        );
    }

    Ok(p)
}

/// The three-point program written directly on `Vᵉ ∪ {e}`:
///
/// minimise `F(e,e)` over `F ⪰ 0` with `F(x,x) + 2F(e,x) ≤ −w(x)` for
/// `x ∈ Vᵉ` and `F(x,y) ≤ 0` whenever `{e,x,y}` is independent. The value
/// reported is `w(e) + F(e,e)`. Renaming `e` to `∅` turns `F` into a kernel
/// for `las_1(Gᵉ)*`, which is how the certificate is checked.
pub fn three_point_direct(g: &Graph, e: usize, tol: f64) -> Result<BoundResult, HierarchyError> {
    three_point_direct_with(g, e, &BoundOptions::with_tol(tol))
}

pub fn three_point_direct_with(g: &Graph, e: usize, opts: &BoundOptions) -> Result<BoundResult, HierarchyError> {
    let (local, _) = g.local_subgraph(e)?;
    let we = g.weight(e);
    if local.n() == 0 {
        let mut r = BoundResult::trivial(1, 1);
        shift(&mut r, we);
        return Ok(r);
    }
    let p = three_point_program(g, e)?;
    let sol = sdp::solve_with(&p, &opts.solver)?;
    let f: Mat<f64> = sol.x[0].as_psd().expect("block 0 is dense").clone();
    let report = verify_dual_certificate(&local, 1, &f, opts.verify_tol)?;
    let certified = report.passed;
    Ok(BoundResult {
        value: we + sol.primal_objective,
        dual_value: we + sol.dual_objective,
        gap: sol.absolute_gap(),
        status: sol.status,
        iterations: sol.iterations,
        verification_margin: report.margin,
        certified_bound: certified.then_some(we + report.bound),
        certificate: Some(Certificate::Kernel { level: 1, matrix: f }),
        moments: None,
    })
}
