//! Block-diagonal semidefinite programs.
//!
//! Every problem is stored in one normalised form:
//!
//! ```text
//!   (P)  minimize   ⟨C, X⟩   s.t. ⟨A_i, X⟩ = b_i  (i = 1..m),  X ⪰ 0
//!   (D)  maximize   bᵀy      s.t. Z = C − Σ y_i A_i ⪰ 0
//! ```
//!
//! `X`, `Z`, `C` and the `A_i` are block diagonal. A block is either a dense
//! PSD block or a diagonal block whose entries must be nonnegative (an LP
//! block, written with a negative size in SDPA files). Models usually put
//! their decision variables in `y`; [`Sense`] records whether the modelling
//! problem maximises `bᵀy` or minimises `−bᵀy` so reports can quote the
//! value the user asked for.

mod check;
mod sdpa;
mod solver;

use faer::Mat;
use serde::Serialize;
use thiserror::Error;

pub use check::{check_feasibility, FeasibilityReport};
pub use sdpa::{export_sdpa, import_sdpa};
pub use solver::{solve, solve_with, IterationRecord, SolverOptions};

/// Cap on the total dimension of the PSD blocks.
pub const DEFAULT_PSD_CAP: usize = 3000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SdpError {
    #[error("malformed problem: {0}")]
    Malformed(String),
    #[error("total PSD dimension {size} exceeds the cap of {cap}")]
    CapExceeded { size: usize, cap: usize },
    #[error("SDPA parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Block {
    Psd(usize),
    Diagonal(usize),
}

impl Block {
    pub fn dim(&self) -> usize {
        match *self {
            Block::Psd(n) | Block::Diagonal(n) => n,
        }
    }

    /// Size as written in SDPA files (negative for diagonal blocks).
    pub fn sdpa_size(&self) -> i64 {
        match *self {
            Block::Psd(n) => n as i64,
            Block::Diagonal(n) => -(n as i64),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Maximize,
    Minimize,
}

/// One upper-triangular entry (`row <= col`) of a symmetric block matrix.
/// An off-diagonal entry stands for both `(row, col)` and `(col, row)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Entry {
    pub block: usize,
    pub row: usize,
    pub col: usize,
    pub value: f64,
}

/// Sparse symmetric block-diagonal matrix, kept sorted with duplicates
/// summed and zeros dropped.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SparseBlockMatrix {
    entries: Vec<Entry>,
}

impl SparseBlockMatrix {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `value` at `(row, col)` and its mirror image.
    pub fn add(&mut self, block: usize, row: usize, col: usize, value: f64) -> &mut Self {
        let (row, col) = if row <= col { (row, col) } else { (col, row) };
        let key = (block, row, col);
        match self
            .entries
            .binary_search_by(|e| (e.block, e.row, e.col).cmp(&key))
        {
            Ok(pos) => {
                self.entries[pos].value += value;
                if self.entries[pos].value == 0.0 {
                    self.entries.remove(pos);
                }
            }
            Err(pos) => {
                if value != 0.0 {
                    self.entries.insert(pos, Entry { block, row, col, value });
                }
            }
        }
        self
    }

    pub fn from_entries(entries: impl IntoIterator<Item = Entry>) -> Self {
        let mut raw: Vec<Entry> = entries
            .into_iter()
            .map(|e| {
                if e.row <= e.col {
                    e
                } else {
                    Entry { row: e.col, col: e.row, ..e }
                }
            })
            .collect();
        raw.sort_by_key(|e| (e.block, e.row, e.col));
        let mut entries: Vec<Entry> = Vec::with_capacity(raw.len());
        for e in raw {
            match entries.last_mut() {
                Some(last) if (last.block, last.row, last.col) == (e.block, e.row, e.col) => {
                    last.value += e.value;
                }
                _ => entries.push(e),
            }
        }
        entries.retain(|e| e.value != 0.0);
        Self { entries }
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, e| m.max(e.value.abs()))
    }

    /// `⟨self, X⟩` for a dense block-diagonal `X`.
    pub fn inner(&self, x: &[BlockValue]) -> f64 {
        self.entries
            .iter()
            .map(|e| match &x[e.block] {
                BlockValue::Psd(m) => {
                    if e.row == e.col {
                        e.value * m[(e.row, e.col)]
                    } else {
                        e.value * (m[(e.row, e.col)] + m[(e.col, e.row)])
                    }
                }
                BlockValue::Diagonal(d) => {
                    if e.row == e.col {
                        e.value * d[e.row]
                    } else {
                        0.0
                    }
                }
            })
            .sum()
    }

    /// Adds `scale · self` into a dense block-diagonal value.
    pub fn accumulate_into(&self, scale: f64, out: &mut [BlockValue]) {
        for e in &self.entries {
            match &mut out[e.block] {
                BlockValue::Psd(m) => {
                    m[(e.row, e.col)] += scale * e.value;
                    if e.row != e.col {
                        m[(e.col, e.row)] += scale * e.value;
                    }
                }
                BlockValue::Diagonal(d) => d[e.row] += scale * e.value,
            }
        }
    }
}

/// Dense value of one block.
#[derive(Clone, Debug, PartialEq)]
pub enum BlockValue {
    Psd(Mat<f64>),
    Diagonal(Vec<f64>),
}

impl BlockValue {
    pub fn zeros(block: Block) -> Self {
        match block {
            Block::Psd(n) => BlockValue::Psd(Mat::zeros(n, n)),
            Block::Diagonal(n) => BlockValue::Diagonal(vec![0.0; n]),
        }
    }

    pub fn as_psd(&self) -> Option<&Mat<f64>> {
        match self {
            BlockValue::Psd(m) => Some(m),
            BlockValue::Diagonal(_) => None,
        }
    }

    pub fn as_diagonal(&self) -> Option<&[f64]> {
        match self {
            BlockValue::Diagonal(d) => Some(d),
            BlockValue::Psd(_) => None,
        }
    }
}

/// Zero value for every block of a structure.
pub fn zero_blocks(blocks: &[Block]) -> Vec<BlockValue> {
    blocks.iter().map(|&b| BlockValue::zeros(b)).collect()
}

/// Block-diagonal SDP in the normalised form described in the module docs.
#[derive(Clone, Debug, PartialEq)]
pub struct SdpProblem {
    blocks: Vec<Block>,
    objective: SparseBlockMatrix,
    constraints: Vec<SparseBlockMatrix>,
    rhs: Vec<f64>,
    sense: Sense,
}

impl SdpProblem {
    pub fn new(blocks: Vec<Block>, sense: Sense) -> Self {
        Self {
            blocks,
            objective: SparseBlockMatrix::new(),
            constraints: Vec::new(),
            rhs: Vec::new(),
            sense,
        }
    }

    /// Sets `C`.
    pub fn set_objective(&mut self, c: SparseBlockMatrix) {
        self.objective = c;
    }

    /// Appends a dual variable `y_i` with constraint matrix `A_i` and
    /// objective coefficient `b_i`; returns `i`.
    pub fn add_constraint(&mut self, a: SparseBlockMatrix, b: f64) -> usize {
        self.constraints.push(a);
        self.rhs.push(b);
        self.constraints.len() - 1
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn objective(&self) -> &SparseBlockMatrix {
        &self.objective
    }

    pub fn constraints(&self) -> &[SparseBlockMatrix] {
        &self.constraints
    }

    pub fn constraint(&self, i: usize) -> &SparseBlockMatrix {
        &self.constraints[i]
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn set_sense(&mut self, sense: Sense) {
        self.sense = sense;
    }

    /// Number of dual variables.
    pub fn m(&self) -> usize {
        self.constraints.len()
    }

    pub fn psd_dimension(&self) -> usize {
        self.blocks
            .iter()
            .filter_map(|b| match b {
                Block::Psd(n) => Some(*n),
                Block::Diagonal(_) => None,
            })
            .sum()
    }

    /// The modelling objective for a dual objective value `bᵀy`.
    pub fn user_objective(&self, dual_objective: f64) -> f64 {
        match self.sense {
            Sense::Maximize => dual_objective,
            Sense::Minimize => -dual_objective,
        }
    }

    /// Checks dimensions, entry placement and finiteness.
    pub fn validate(&self) -> Result<(), SdpError> {
        if self.blocks.is_empty() {
            return Err(SdpError::Malformed("no blocks".into()));
        }
        if self.blocks.iter().any(|b| b.dim() == 0) {
            return Err(SdpError::Malformed("empty block".into()));
        }
        if self.constraints.is_empty() {
            return Err(SdpError::Malformed("at least one constraint is required".into()));
        }
        if self.rhs.iter().any(|v| !v.is_finite()) {
            return Err(SdpError::Malformed("non-finite right-hand side".into()));
        }
        let check = |name: String, mat: &SparseBlockMatrix| -> Result<(), SdpError> {
            for e in mat.entries() {
                let block = self
                    .blocks
                    .get(e.block)
                    .ok_or_else(|| SdpError::Malformed(format!("{name}: block {} does not exist", e.block)))?;
                if e.col >= block.dim() || e.row > e.col {
                    return Err(SdpError::Malformed(format!(
                        "{name}: entry ({}, {}) outside block {} of size {}",
                        e.row,
                        e.col,
                        e.block,
                        block.dim()
                    )));
                }
                if matches!(block, Block::Diagonal(_)) && e.row != e.col {
                    return Err(SdpError::Malformed(format!(
                        "{name}: off-diagonal entry in diagonal block {}",
                        e.block
                    )));
                }
                if !e.value.is_finite() {
                    return Err(SdpError::Malformed(format!("{name}: non-finite entry")));
                }
            }
            Ok(())
        };
        check("objective".into(), &self.objective)?;
        for (i, a) in self.constraints.iter().enumerate() {
            check(format!("constraint {}", i + 1), a)?;
        }
        Ok(())
    }

    /// `Z = C − Σ y_i A_i`.
    pub fn dual_slack(&self, y: &[f64]) -> Vec<BlockValue> {
        let mut z = zero_blocks(&self.blocks);
        self.objective.accumulate_into(1.0, &mut z);
        for (a, &yi) in self.constraints.iter().zip(y) {
            if yi != 0.0 {
                a.accumulate_into(-yi, &mut z);
            }
        }
        z
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Optimal,
    MaxIterations,
    Infeasible,
    NumericalTrouble,
}

impl std::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::MaxIterations => "max-iterations",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::NumericalTrouble => "numerical-trouble",
        })
    }
}

/// Primal–dual solution of an [`SdpProblem`].
#[derive(Clone, Debug)]
pub struct SdpSolution {
    pub x: Vec<BlockValue>,
    pub y: Vec<f64>,
    pub z: Vec<BlockValue>,
    /// `⟨C, X⟩`.
    pub primal_objective: f64,
    /// `bᵀy`.
    pub dual_objective: f64,
    /// `‖b − A(X)‖ / (1 + ‖b‖)`.
    pub primal_residual: f64,
    /// `‖C − Z − Aᵀy‖_F / (1 + ‖C‖_F)`.
    pub dual_residual: f64,
    /// `|⟨C,X⟩ − bᵀy| / (1 + |⟨C,X⟩| + |bᵀy|)`.
    pub gap: f64,
    pub iterations: usize,
    pub status: SolveStatus,
    pub log: Vec<IterationRecord>,
}

impl SdpSolution {
    /// Absolute duality gap `|⟨C,X⟩ − bᵀy|`.
    pub fn absolute_gap(&self) -> f64 {
        (self.primal_objective - self.dual_objective).abs()
    }

    /// Iteration log, one line per iteration.
    pub fn format_log(&self) -> String {
        let mut out = String::from(IterationRecord::HEADER);
        out.push('\n');
        for r in &self.log {
            out.push_str(&r.to_string());
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sparse_matrix_canonical_form() {
        let mut a = SparseBlockMatrix::new();
        a.add(0, 2, 1, 1.0).add(0, 1, 2, 2.0).add(1, 0, 0, -1.0).add(0, 0, 0, 0.0);
        assert_eq!(
            a.entries(),
            &[
                Entry { block: 0, row: 1, col: 2, value: 3.0 },
                Entry { block: 1, row: 0, col: 0, value: -1.0 },
            ]
        );
        a.add(1, 0, 0, 1.0);
        assert_eq!(a.entries().len(), 1);
        let b = SparseBlockMatrix::from_entries([
            Entry { block: 0, row: 2, col: 1, value: 1.0 },
            Entry { block: 0, row: 1, col: 2, value: 2.0 },
        ]);
        assert_eq!(b.entries(), &[Entry { block: 0, row: 1, col: 2, value: 3.0 }]);
    }

    #[test]
    fn validation() {
        let mut p = SdpProblem::new(vec![Block::Psd(2), Block::Diagonal(2)], Sense::Maximize);
        assert!(p.validate().is_err());
        let mut a = SparseBlockMatrix::new();
        a.add(0, 0, 1, 1.0);
        p.add_constraint(a, 1.0);
        assert!(p.validate().is_ok());
        let mut bad = SparseBlockMatrix::new();
        bad.add(1, 0, 1, 1.0);
        p.add_constraint(bad, 0.0);
        assert!(p.validate().is_err());
    }

    #[test]
    fn inner_and_accumulate_agree() {
        let blocks = [Block::Psd(2), Block::Diagonal(2)];
        let mut a = SparseBlockMatrix::new();
        a.add(0, 0, 1, 2.0).add(0, 1, 1, 1.0).add(1, 1, 1, 3.0);
        let mut dense = zero_blocks(&blocks);
        a.accumulate_into(1.0, &mut dense);
        // ⟨A, A⟩ = 2·2² + 1 + 3²
        assert_eq!(a.inner(&dense), 18.0);
    }
}
