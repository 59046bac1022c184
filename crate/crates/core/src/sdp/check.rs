//! Feasibility check of a candidate solution, computed from the problem
//! data alone.

use faer::Side;
use serde::Serialize;

use super::{BlockValue, SdpProblem, SdpSolution};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FeasibilityReport {
    /// `max_i |⟨A_i, X⟩ − b_i|`.
    pub primal_residual: f64,
    /// `max |C − Σ y_i A_i − Z|` over all entries.
    pub dual_residual: f64,
    /// Smallest eigenvalue (or diagonal entry) of `X` over all blocks.
    pub min_eig_x: f64,
    /// Smallest eigenvalue (or diagonal entry) of `Z = C − Σ y_i A_i`.
    pub min_eig_z: f64,
    /// `⟨C, X⟩ − bᵀy`.
    pub gap: f64,
    /// Whether every quantity above is within the tolerance.
    pub feasible: bool,
}

fn min_eigenvalue(blocks: &[BlockValue]) -> f64 {
    blocks
        .iter()
        .map(|b| match b {
            BlockValue::Psd(m) => m
                .self_adjoint_eigenvalues(Side::Lower)
                .ok()
                .and_then(|e| e.first().copied())
                .unwrap_or(f64::NEG_INFINITY),
            BlockValue::Diagonal(d) => d.iter().copied().fold(f64::INFINITY, f64::min),
        })
        .fold(f64::INFINITY, f64::min)
}

/// Recomputes residuals and cone membership of `s` against `p`. The dual
/// slack is rebuilt from `y`, so a wrong `s.z` shows up as a dual residual.
pub fn check_feasibility(p: &SdpProblem, s: &SdpSolution, tol: f64) -> FeasibilityReport {
    let primal_residual = p
        .constraints()
        .iter()
        .zip(p.rhs())
        .map(|(a, b)| (a.inner(&s.x) - b).abs())
        .fold(0.0, f64::max);
    let z = p.dual_slack(&s.y);
    let dual_residual = z
        .iter()
        .zip(&s.z)
        .map(|(a, b)| match (a, b) {
            (BlockValue::Psd(a), BlockValue::Psd(b)) => {
                let mut m: f64 = 0.0;
                for j in 0..a.ncols() {
                    for i in 0..a.nrows() {
                        m = m.max((a[(i, j)] - b[(i, j)]).abs());
                    }
                }
                m
            }
            (BlockValue::Diagonal(a), BlockValue::Diagonal(b)) => {
                a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
            }
            _ => f64::INFINITY,
        })
        .fold(0.0, f64::max);
    let min_eig_x = min_eigenvalue(&s.x);
    let min_eig_z = min_eigenvalue(&z);
    let gap = p.objective().inner(&s.x) - p.rhs().iter().zip(&s.y).map(|(b, y)| b * y).sum::<f64>();
    let feasible = primal_residual <= tol && dual_residual <= tol && min_eig_x >= -tol && min_eig_z >= -tol;
    FeasibilityReport {
        primal_residual,
        dual_residual,
        min_eig_x,
        min_eig_z,
        gap,
        feasible,
    }
}
