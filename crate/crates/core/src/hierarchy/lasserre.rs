use std::collections::HashMap;

use faer::{Mat, Side};
use serde::Serialize;

use super::{BoundOptions, BoundResult, Certificate, HierarchyError};
use crate::basis::{build_union_table, sorted_union, IndepSetBasis, UnionTable, DEFAULT_BASIS_CAP};
use crate::graph::Graph;
use crate::sdp::{self, Block, Entry, SdpProblem, SdpSolution, Sense, SparseBlockMatrix};

/// The SDP for `las_t(G)`.
///
/// Variable `i` of the SDP is `y_S` for the `(i + 1)`-th set of the level-`2t`
/// basis (`y_∅ = 1` is eliminated). Block 0 is the moment matrix `M_t(y)`
/// and, when present, block 1 holds `y ≥ 0`.
#[derive(Clone, Debug)]
pub struct MomentProgram {
    level: usize,
    basis_t: IndepSetBasis,
    basis_2t: IndepSetBasis,
    union: UnionTable,
    objective: Vec<f64>,
    problem: SdpProblem,
}

pub fn assemble_lasserre(g: &Graph, t: usize) -> Result<MomentProgram, HierarchyError> {
    assemble_lasserre_with(g, t, true, DEFAULT_BASIS_CAP)
}

/// Assembles `las_t(G)`; without `nonnegative` the `y ≥ 0` block is left
/// out, which at `t = 1` gives the Lovász `ϑ`.
pub fn assemble_lasserre_with(
    g: &Graph,
    t: usize,
    nonnegative: bool,
    cap: usize,
) -> Result<MomentProgram, HierarchyError> {
    if t == 0 {
        return Err(HierarchyError::InvalidInput("the hierarchy starts at t = 1".into()));
    }
    let basis_2t = IndepSetBasis::new(g, 2 * t, cap)?;
    let basis_t = IndepSetBasis::new(g, t, cap)?;
    let union = build_union_table(&basis_t, &basis_2t)?;
    let objective: Vec<f64> = basis_2t
        .sets()
        .iter()
        .map(|s| if s.len() == 1 { g.weight(s[0]) } else { 0.0 })
        .collect();

    let m = basis_2t.len() - 1;
    let mut blocks = vec![Block::Psd(basis_t.len())];
    if nonnegative && m > 0 {
        blocks.push(Block::Diagonal(m));
    }
    let mut problem = SdpProblem::new(blocks, Sense::Maximize);
    let mut c = SparseBlockMatrix::new();
    c.add(0, 0, 0, 1.0);
    problem.set_objective(c);
    for (s, pairs) in union.pairs_by_union(basis_2t.len()).into_iter().enumerate().skip(1) {
        let mut entries: Vec<Entry> = pairs
            .into_iter()
            .map(|(row, col)| Entry { block: 0, row, col, value: -1.0 })
            .collect();
        if nonnegative {
            entries.push(Entry { block: 1, row: s - 1, col: s - 1, value: -1.0 });
        }
        problem.add_constraint(SparseBlockMatrix::from_entries(entries), objective[s]);
    }
    Ok(MomentProgram {
        level: t,
        basis_t,
        basis_2t,
        union,
        objective,
        problem,
    })
}

/// Feasibility of a moment vector.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentCheck {
    pub min_eigenvalue: f64,
    pub min_entry: f64,
    /// `|y_∅ − 1|`.
    pub normalization_error: f64,
    pub objective: f64,
    pub feasible: bool,
}

impl MomentProgram {
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn basis_t(&self) -> &IndepSetBasis {
        &self.basis_t
    }

    pub fn basis_2t(&self) -> &IndepSetBasis {
        &self.basis_2t
    }

    pub fn union_table(&self) -> &UnionTable {
        &self.union
    }

    /// Objective coefficients over `I_{2t}`.
    pub fn objective_vector(&self) -> &[f64] {
        &self.objective
    }

    pub fn problem(&self) -> &SdpProblem {
        &self.problem
    }

    pub fn has_nonnegativity(&self) -> bool {
        self.problem.blocks().len() > 1
    }

    /// `Σ_S c_S y_S` for `y` over `I_{2t}`.
    pub fn objective(&self, y: &[f64]) -> f64 {
        self.objective.iter().zip(y).map(|(c, y)| c * y).sum()
    }

    /// `M_t(y)`: entry `(J, J′)` is `y_{J∪J′}`, or zero when the union is
    /// not independent.
    pub fn moment_matrix(&self, y: &[f64]) -> Mat<f64> {
        let d = self.union.dim();
        Mat::from_fn(d, d, |i, j| self.union.get(i, j).map_or(0.0, |k| y[k]))
    }

    /// Checks `y_∅ = 1`, `y ≥ 0` (when the program has that block) and
    /// `M_t(y) ⪰ 0`, each within `tol`.
    pub fn check(&self, y: &[f64], tol: f64) -> Result<MomentCheck, HierarchyError> {
        if y.len() != self.basis_2t.len() {
            return Err(HierarchyError::InvalidInput(format!(
                "moment vector has length {}, expected {}",
                y.len(),
                self.basis_2t.len()
            )));
        }
        let min_eigenvalue = min_eigenvalue(&self.moment_matrix(y));
        let min_entry = y.iter().copied().fold(f64::INFINITY, f64::min);
        let normalization_error = (y[0] - 1.0).abs();
        let feasible = min_eigenvalue >= -tol
            && normalization_error <= tol
            && (!self.has_nonnegativity() || min_entry >= -tol);
        Ok(MomentCheck {
            min_eigenvalue,
            min_entry,
            normalization_error,
            objective: self.objective(y),
            feasible,
        })
    }

    /// Full moment vector (with `y_∅ = 1`) from the solver's dual vector.
    pub fn moments_from(&self, solution: &SdpSolution) -> Vec<f64> {
        std::iter::once(1.0).chain(solution.y.iter().copied()).collect()
    }
}

pub(crate) fn min_eigenvalue(m: &Mat<f64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    m.self_adjoint_eigenvalues(Side::Lower)
        .ok()
        .and_then(|e| e.first().copied())
        .unwrap_or(f64::NEG_INFINITY)
}

/// Upper bound `las_t(G)` (weighted by the vertex weights of `g`).
pub fn las_bound(g: &Graph, t: usize, tol: f64) -> Result<BoundResult, HierarchyError> {
    las_bound_with(g, t, &BoundOptions::with_tol(tol))
}

pub fn las_bound_with(g: &Graph, t: usize, opts: &BoundOptions) -> Result<BoundResult, HierarchyError> {
    let program = assemble_lasserre_with(g, t, true, opts.basis_cap)?;
    solve_moment_program(g, &program, opts)
}

pub(crate) fn solve_moment_program(
    g: &Graph,
    program: &MomentProgram,
    opts: &BoundOptions,
) -> Result<BoundResult, HierarchyError> {
    let t = program.level();
    if program.problem().m() == 0 {
        return Ok(BoundResult::trivial(t, program.basis_t().len()));
    }
    let solution = sdp::solve_with(program.problem(), &opts.solver)?;
    let kernel = solution.x[0]
        .as_psd()
        .expect("block 0 is the moment matrix")
        .clone();
    let report = verify_dual_certificate(g, t, &kernel, opts.verify_tol)?;
    let certified = report.passed;
    Ok(BoundResult {
        value: solution.dual_objective,
        dual_value: solution.primal_objective,
        gap: solution.absolute_gap(),
        status: solution.status,
        iterations: solution.iterations,
        verification_margin: report.margin,
        certified_bound: certified.then_some(report.bound),
        certificate: Some(Certificate::Kernel { level: t, matrix: kernel }),
        moments: Some(program.moments_from(&solution)),
    })
}

/// A violated constraint `A_tK(S) ≤ −w(S)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub set: Vec<usize>,
    /// `A_tK(S) + w(S)`; positive means violated.
    pub excess: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertificateReport {
    /// `K(∅, ∅)`.
    pub bound: f64,
    pub min_eigenvalue: f64,
    /// Largest `A_tK(S) + w(S)` over nonempty `S ∈ I_{2t}`.
    pub max_excess: f64,
    pub worst_set: Option<Vec<usize>>,
    /// `max |K − Kᵀ|`.
    pub asymmetry: f64,
    /// `max(max_excess, −min_eigenvalue)`.
    pub margin: f64,
    /// Violations beyond the tolerance, worst first (at most 32 listed).
    pub violations: Vec<Violation>,
    pub violation_count: usize,
    pub passed: bool,
}

const LISTED_VIOLATIONS: usize = 32;

/// Checks that `K` over `I_t × I_t` is feasible for `las_t(G)*`: `K ⪰ 0`
/// and `Σ_{J∪J′=S} K(J, J′) ≤ −w(S)` for every nonempty `S ∈ I_{2t}`, where
/// `w(S)` is the vertex weight for singletons and zero otherwise. Unions are
/// recomputed from the graph, not taken from an assembled program.
pub fn verify_dual_certificate(
    g: &Graph,
    t: usize,
    k: &Mat<f64>,
    tol: f64,
) -> Result<CertificateReport, HierarchyError> {
    let basis = IndepSetBasis::new(g, t, DEFAULT_BASIS_CAP)?;
    let d = basis.len();
    if k.nrows() != d || k.ncols() != d {
        return Err(HierarchyError::InvalidInput(format!(
            "kernel is {}×{}, but |I_{t}| = {d}",
            k.nrows(),
            k.ncols()
        )));
    }
    let mut asymmetry: f64 = 0.0;
    let mut a_t: HashMap<Vec<usize>, f64> = HashMap::new();
    for i in 0..d {
        for j in i..d {
            asymmetry = asymmetry.max((k[(i, j)] - k[(j, i)]).abs());
            let u = sorted_union(basis.set(i), basis.set(j));
            if g.is_independent(&u) {
                let v = if i == j { k[(i, i)] } else { k[(i, j)] + k[(j, i)] };
                *a_t.entry(u).or_insert(0.0) += v;
            }
        }
    }
    let mut excesses: Vec<Violation> = a_t
        .into_iter()
        .filter(|(s, _)| !s.is_empty())
        .map(|(set, a)| {
            let w = if set.len() == 1 { g.weight(set[0]) } else { 0.0 };
            Violation { excess: a + w, set }
        })
        .collect();
    excesses.sort_by(|a, b| b.excess.total_cmp(&a.excess).then_with(|| a.set.cmp(&b.set)));
    let max_excess = excesses.first().map_or(f64::NEG_INFINITY, |v| v.excess);
    let worst_set = excesses.first().map(|v| v.set.clone());
    let violation_count = excesses.iter().take_while(|v| v.excess > tol).count();
    excesses.truncate(violation_count.min(LISTED_VIOLATIONS));

    let sym = Mat::from_fn(d, d, |i, j| 0.5 * (k[(i, j)] + k[(j, i)]));
    let min_eigenvalue = min_eigenvalue(&sym);
    let margin = max_excess.max(-min_eigenvalue);
    let passed = margin <= tol && asymmetry <= tol && min_eigenvalue.is_finite();
    Ok(CertificateReport {
        bound: k[(0, 0)],
        min_eigenvalue,
        max_excess,
        worst_set,
        asymmetry,
        margin,
        violations: excesses,
        violation_count,
        passed,
    })
}

/// The moment vector of the point measure at `S`: `y_R = 1` for `R ⊆ S`,
/// else 0. Its objective is the weight of `S`.
pub fn indicator_solution(g: &Graph, basis_2t: &IndepSetBasis, set: &[usize]) -> Result<Vec<f64>, HierarchyError> {
    let mut s = set.to_vec();
    s.sort_unstable();
    s.dedup();
    if s.iter().any(|&v| v >= g.n()) || !g.is_independent(&s) {
        return Err(HierarchyError::InvalidInput(format!("{set:?} is not an independent set")));
    }
    Ok(basis_2t
        .sets()
        .iter()
        .map(|r| if is_subset(r, &s) { 1.0 } else { 0.0 })
        .collect())
}

pub(crate) fn is_subset(small: &[usize], big: &[usize]) -> bool {
    let mut it = big.iter();
    small.iter().all(|x| it.any(|y| y == x))
}
