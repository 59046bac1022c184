//! Primal–dual path-following interior-point method.
//!
//! Nesterov–Todd scaling with a Mehrotra predictor–corrector, infeasible
//! start from `X = Z = τI`, `y = 0`, and a dense Cholesky factorisation of
//! the Schur complement. Everything runs sequentially, so repeated solves of
//! the same problem are bitwise identical.
//!
//! For a PSD block with `X = L₁L₁ᵀ`, `Z = L₂L₂ᵀ` and `L₂ᵀL₁ = UΛVᵀ`, the
//! scaling matrix is `G = L₁VΛ^{-1/2}`; then `GᵀZG = G⁻¹XG⁻ᵀ = Λ` and
//! `W = GGᵀ` satisfies `WZW = X`. Diagonal blocks use `w = √(x/z)`.

use std::fmt;

use faer::linalg::solvers::Solve;
use faer::{Mat, Side};
use serde::Serialize;

use super::{Block, BlockValue, SdpError, SdpProblem, SdpSolution, SolveStatus, DEFAULT_PSD_CAP};

#[derive(Clone, Debug)]
pub struct SolverOptions {
    /// Target for the relative gap and both relative residuals.
    pub tol: f64,
    pub max_iter: usize,
    /// Fraction of the distance to the cone boundary taken per step.
    pub step_fraction: f64,
    /// Cap on the total dimension of the PSD blocks.
    pub psd_cap: usize,
    /// `|objective|` beyond which the iterates are declared divergent.
    pub divergence_threshold: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 100,
            step_fraction: 0.98,
            psd_cap: DEFAULT_PSD_CAP,
            divergence_threshold: 1e10,
        }
    }
}

/// One line of the iteration log.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IterationRecord {
    pub iter: usize,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub gap: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub mu: f64,
    pub sigma: f64,
    pub primal_step: f64,
    pub dual_step: f64,
}

impl IterationRecord {
    pub const HEADER: &'static str =
        "iter          pobj                dobj           gap      pres      dres        mu     sigma   step_p   step_d";
}

impl fmt::Display for IterationRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:>4} {:+.12e} {:+.12e} {:.2e} {:.2e} {:.2e} {:.2e} {:.3} {:.4} {:.4}",
            self.iter,
            self.primal_objective,
            self.dual_objective,
            self.gap,
            self.primal_residual,
            self.dual_residual,
            self.mu,
            self.sigma,
            self.primal_step,
            self.dual_step
        )
    }
}

/// Solves with default options apart from `tol` and `max_iter`.
pub fn solve(p: &SdpProblem, tol: f64, max_iter: usize) -> Result<SdpSolution, SdpError> {
    solve_with(
        p,
        &SolverOptions {
            tol,
            max_iter,
            ..SolverOptions::default()
        },
    )
}

/// Entries of one constraint restricted to one PSD block.
struct PsdTerm {
    con: usize,
    /// Upper-triangular entries with the off-diagonal multiplicity folded in.
    upper: Vec<(usize, usize, f64)>,
    /// Rows with nonzeros, and the full symmetric row contents.
    rows: Vec<usize>,
    row_entries: Vec<Vec<(usize, f64)>>,
}

struct Prepared {
    blocks: Vec<Block>,
    m: usize,
    psd_terms: Vec<Vec<PsdTerm>>,
    /// For diagonal blocks: per position, the constraints touching it.
    diag_cols: Vec<Vec<Vec<(usize, f64)>>>,
    c: Vec<BlockValue>,
    b: Vec<f64>,
    c_norm: f64,
    b_norm: f64,
}

impl Prepared {
    fn new(p: &SdpProblem) -> Self {
        let blocks = p.blocks().to_vec();
        let m = p.m();
        let mut psd_terms: Vec<Vec<PsdTerm>> = blocks.iter().map(|_| Vec::new()).collect();
        let mut diag_cols: Vec<Vec<Vec<(usize, f64)>>> = blocks
            .iter()
            .map(|b| match b {
                Block::Diagonal(n) => vec![Vec::new(); *n],
                Block::Psd(_) => Vec::new(),
            })
            .collect();

        for (con, a) in p.constraints().iter().enumerate() {
            let mut by_block: Vec<Vec<(usize, usize, f64)>> = blocks.iter().map(|_| Vec::new()).collect();
            for e in a.entries() {
                by_block[e.block].push((e.row, e.col, e.value));
            }
            for (bi, entries) in by_block.into_iter().enumerate() {
                if entries.is_empty() {
                    continue;
                }
                match blocks[bi] {
                    Block::Diagonal(_) => {
                        for (r, _, v) in entries {
                            diag_cols[bi][r].push((con, v));
                        }
                    }
                    Block::Psd(n) => {
                        let mut full: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
                        let mut upper = Vec::with_capacity(entries.len());
                        for (r, c, v) in entries {
                            full[r].push((c, v));
                            if r != c {
                                full[c].push((r, v));
                                upper.push((r, c, 2.0 * v));
                            } else {
                                upper.push((r, c, v));
                            }
                        }
                        let (rows, row_entries): (Vec<_>, Vec<_>) =
                            full.into_iter().enumerate().filter(|(_, e)| !e.is_empty()).unzip();
                        psd_terms[bi].push(PsdTerm {
                            con,
                            upper,
                            rows,
                            row_entries,
                        });
                    }
                }
            }
        }

        let mut c = super::zero_blocks(&blocks);
        p.objective().accumulate_into(1.0, &mut c);
        let c_norm = norm_blocks(&c);
        let b = p.rhs().to_vec();
        let b_norm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
        Self {
            blocks,
            m,
            psd_terms,
            diag_cols,
            c,
            b,
            c_norm,
            b_norm,
        }
    }

    /// `A(X)_i = ⟨A_i, X⟩`.
    fn apply(&self, x: &[BlockValue]) -> Vec<f64> {
        let mut out = vec![0.0; self.m];
        for (bi, xb) in x.iter().enumerate() {
            match xb {
                BlockValue::Psd(xm) => {
                    for term in &self.psd_terms[bi] {
                        out[term.con] += term.upper.iter().map(|&(r, c, v)| v * xm[(r, c)]).sum::<f64>();
                    }
                }
                BlockValue::Diagonal(d) => {
                    for (k, col) in self.diag_cols[bi].iter().enumerate() {
                        for &(con, v) in col {
                            out[con] += v * d[k];
                        }
                    }
                }
            }
        }
        out
    }

    /// `Aᵀy = Σ y_i A_i`.
    fn adjoint(&self, y: &[f64]) -> Vec<BlockValue> {
        let mut out = super::zero_blocks(&self.blocks);
        for (bi, ob) in out.iter_mut().enumerate() {
            match ob {
                BlockValue::Psd(om) => {
                    for term in &self.psd_terms[bi] {
                        let yi = y[term.con];
                        if yi == 0.0 {
                            continue;
                        }
                        for (&r, entries) in term.rows.iter().zip(&term.row_entries) {
                            for &(c, v) in entries {
                                om[(r, c)] += yi * v;
                            }
                        }
                    }
                }
                BlockValue::Diagonal(d) => {
                    for (k, col) in self.diag_cols[bi].iter().enumerate() {
                        d[k] = col.iter().map(|&(con, v)| y[con] * v).sum();
                    }
                }
            }
        }
        out
    }
}

fn inner_blocks(a: &[BlockValue], b: &[BlockValue]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| match (x, y) {
            (BlockValue::Psd(x), BlockValue::Psd(y)) => {
                let mut s = 0.0;
                for j in 0..x.ncols() {
                    for i in 0..x.nrows() {
                        s += x[(i, j)] * y[(i, j)];
                    }
                }
                s
            }
            (BlockValue::Diagonal(x), BlockValue::Diagonal(y)) => x.iter().zip(y).map(|(a, b)| a * b).sum(),
            _ => unreachable!("block kinds always line up"),
        })
        .sum()
}

fn norm_blocks(a: &[BlockValue]) -> f64 {
    inner_blocks(a, a).sqrt()
}

/// `a + s·b`, blockwise.
fn axpy_blocks(a: &mut [BlockValue], s: f64, b: &[BlockValue]) {
    for (x, y) in a.iter_mut().zip(b) {
        match (x, y) {
            (BlockValue::Psd(x), BlockValue::Psd(y)) => {
                *x += faer::Scale(s) * y;
            }
            (BlockValue::Diagonal(x), BlockValue::Diagonal(y)) => {
                for (a, b) in x.iter_mut().zip(y) {
                    *a += s * b;
                }
            }
            _ => unreachable!("block kinds always line up"),
        }
    }
}

fn sub_blocks(a: &[BlockValue], b: &[BlockValue]) -> Vec<BlockValue> {
    let mut out = a.to_vec();
    axpy_blocks(&mut out, -1.0, b);
    out
}

fn symmetrize(m: &mut Mat<f64>) {
    let n = m.nrows();
    for j in 0..n {
        for i in j + 1..n {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

/// Nesterov–Todd scaling of one block.
enum Scaling {
    Psd {
        g: Mat<f64>,
        w: Mat<f64>,
        lambda: Vec<f64>,
    },
    Diagonal {
        w: Vec<f64>,
        lambda: Vec<f64>,
    },
}

impl Scaling {
    fn new(x: &BlockValue, z: &BlockValue) -> Option<Self> {
        match (x, z) {
            (BlockValue::Psd(x), BlockValue::Psd(z)) => {
                let l1 = x.llt(Side::Lower).ok()?.L().to_owned();
                let l2 = z.llt(Side::Lower).ok()?.L().to_owned();
                let svd = (l2.transpose() * &l1).svd().ok()?;
                let s = svd.S().column_vector();
                let n = x.nrows();
                let lambda: Vec<f64> = (0..n).map(|i| s[i]).collect();
                if lambda.iter().any(|&l| !(l > 0.0) || !l.is_finite()) {
                    return None;
                }
                let mut v_scaled = svd.V().to_owned();
                for (j, &l) in lambda.iter().enumerate() {
                    let f = 1.0 / l.sqrt();
                    for i in 0..n {
                        v_scaled[(i, j)] *= f;
                    }
                }
                let g = &l1 * &v_scaled;
                let mut w = &g * g.transpose();
                symmetrize(&mut w);
                Some(Scaling::Psd { g, w, lambda })
            }
            (BlockValue::Diagonal(x), BlockValue::Diagonal(z)) => {
                if x.iter().chain(z).any(|&v| !(v > 0.0) || !v.is_finite()) {
                    return None;
                }
                let w = x.iter().zip(z).map(|(a, b)| (a / b).sqrt()).collect();
                let lambda = x.iter().zip(z).map(|(a, b)| (a * b).sqrt()).collect();
                Some(Scaling::Diagonal { w, lambda })
            }
            _ => unreachable!("block kinds always line up"),
        }
    }

    fn lambda(&self) -> &[f64] {
        match self {
            Scaling::Psd { lambda, .. } | Scaling::Diagonal { lambda, .. } => lambda,
        }
    }

    /// `W R W`.
    fn congruence_w(&self, r: &BlockValue) -> BlockValue {
        match (self, r) {
            (Scaling::Psd { w, .. }, BlockValue::Psd(r)) => {
                let mut out = w * (r * w);
                symmetrize(&mut out);
                BlockValue::Psd(out)
            }
            (Scaling::Diagonal { w, .. }, BlockValue::Diagonal(r)) => {
                BlockValue::Diagonal(w.iter().zip(r).map(|(w, r)| w * w * r).collect())
            }
            _ => unreachable!("block kinds always line up"),
        }
    }

    /// `G D Gᵀ`: from the scaled space back to the original one.
    fn unscale(&self, d: &BlockValue) -> BlockValue {
        match (self, d) {
            (Scaling::Psd { g, .. }, BlockValue::Psd(d)) => {
                let mut out = g * (d * g.transpose());
                symmetrize(&mut out);
                BlockValue::Psd(out)
            }
            (Scaling::Diagonal { w, .. }, BlockValue::Diagonal(d)) => {
                BlockValue::Diagonal(w.iter().zip(d).map(|(w, d)| w * d).collect())
            }
            _ => unreachable!("block kinds always line up"),
        }
    }

    /// `Gᵀ Δ G`: a dual-side quantity into the scaled space.
    fn scale_dual(&self, dz: &BlockValue) -> BlockValue {
        match (self, dz) {
            (Scaling::Psd { g, .. }, BlockValue::Psd(dz)) => {
                let mut out = g.transpose() * (dz * g);
                symmetrize(&mut out);
                BlockValue::Psd(out)
            }
            (Scaling::Diagonal { w, .. }, BlockValue::Diagonal(dz)) => {
                BlockValue::Diagonal(w.iter().zip(dz).map(|(w, d)| w * d).collect())
            }
            _ => unreachable!("block kinds always line up"),
        }
    }

    /// Largest `α` with `Λ + α·Δ ⪰ 0` for a scaled direction `Δ`.
    fn max_step(&self, delta: &BlockValue) -> Option<f64> {
        let lambda = self.lambda();
        let min_ratio = match delta {
            BlockValue::Psd(d) => {
                let n = d.nrows();
                let inv_sqrt: Vec<f64> = lambda.iter().map(|l| 1.0 / l.sqrt()).collect();
                let p = Mat::from_fn(n, n, |i, j| inv_sqrt[i] * d[(i, j)] * inv_sqrt[j]);
                let eig = p.self_adjoint_eigenvalues(Side::Lower).ok()?;
                eig.first().copied().unwrap_or(0.0)
            }
            BlockValue::Diagonal(d) => d
                .iter()
                .zip(lambda)
                .map(|(d, l)| d / l)
                .fold(f64::INFINITY, f64::min),
        };
        if !min_ratio.is_finite() {
            return None;
        }
        Some(if min_ratio < 0.0 { -1.0 / min_ratio } else { f64::INFINITY })
    }
}

/// The diagonal matrix `diag(v)` as a block value shaped like `block`.
fn diag_block(block: Block, v: &[f64]) -> BlockValue {
    match block {
        Block::Psd(n) => BlockValue::Psd(Mat::from_fn(n, n, |i, j| if i == j { v[i] } else { 0.0 })),
        Block::Diagonal(_) => BlockValue::Diagonal(v.to_vec()),
    }
}

/// `⟨Λ + αₚΔX̃, Λ + α_dΔZ̃⟩` in the scaled space.
fn scaled_complementarity(
    scalings: &[Scaling],
    dxs: &[BlockValue],
    dzs: &[BlockValue],
    ap: f64,
    ad: f64,
) -> f64 {
    scalings
        .iter()
        .zip(dxs.iter().zip(dzs))
        .map(|(s, (dx, dz))| {
            let lam = s.lambda();
            match (dx, dz) {
                (BlockValue::Psd(dx), BlockValue::Psd(dz)) => {
                    let n = dx.nrows();
                    let mut acc = 0.0;
                    for j in 0..n {
                        for i in 0..n {
                            let a = if i == j { lam[i] } else { 0.0 } + ap * dx[(i, j)];
                            let b = if i == j { lam[i] } else { 0.0 } + ad * dz[(i, j)];
                            acc += a * b;
                        }
                    }
                    acc
                }
                (BlockValue::Diagonal(dx), BlockValue::Diagonal(dz)) => lam
                    .iter()
                    .zip(dx.iter().zip(dz))
                    .map(|(l, (x, z))| (l + ap * x) * (l + ad * z))
                    .sum(),
                _ => unreachable!("block kinds always line up"),
            }
        })
        .sum()
}

struct Direction {
    dx: Vec<BlockValue>,
    dy: Vec<f64>,
    dz: Vec<BlockValue>,
    dx_scaled: Vec<BlockValue>,
    dz_scaled: Vec<BlockValue>,
}

struct Iterate<'a> {
    prep: &'a Prepared,
    scalings: Vec<Scaling>,
    schur: faer::linalg::solvers::Llt<f64>,
    rp: Vec<f64>,
    rd: Vec<BlockValue>,
    w_rd_w: Vec<BlockValue>,
}

impl Iterate<'_> {
    /// Solves `A(ΔX) = r_p`, `AᵀΔy + ΔZ = R_d`, `ΔX̃ + ΔZ̃ = D` where the
    /// tildes denote the scaled space.
    fn direction(&self, d: &[BlockValue]) -> Direction {
        let rc: Vec<BlockValue> = self.scalings.iter().zip(d).map(|(s, d)| s.unscale(d)).collect();
        let t = sub_blocks(&rc, &self.w_rd_w);
        let at = self.prep.apply(&t);
        let rhs = Mat::from_fn(self.prep.m, 1, |i, _| self.rp[i] - at[i]);
        let sol = self.schur.solve(&rhs);
        let mut dy: Vec<f64> = (0..self.prep.m).map(|i| sol[(i, 0)]).collect();
        let mut dir = self.complete(d, &dy);
        // Refine Δy against the true operator so that A(ΔX) = r_p holds to
        // working precision even when the Schur matrix is ill-conditioned.
        let mut res_norm = f64::INFINITY;
        for _ in 0..REFINE_STEPS {
            let adx = self.prep.apply(&dir.dx);
            let r: Vec<f64> = self.rp.iter().zip(&adx).map(|(rp, a)| rp - a).collect();
            let norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
            if !(norm < 0.5 * res_norm) {
                break;
            }
            res_norm = norm;
            let corr = self.schur.solve(&Mat::from_fn(self.prep.m, 1, |i, _| r[i]));
            let trial: Vec<f64> = dy.iter().enumerate().map(|(i, v)| v + corr[(i, 0)]).collect();
            let next = self.complete(d, &trial);
            let adx = self.prep.apply(&next.dx);
            let next_norm = self.rp.iter().zip(&adx).map(|(rp, a)| (rp - a).powi(2)).sum::<f64>().sqrt();
            if next_norm >= norm {
                break;
            }
            dy = trial;
            dir = next;
        }
        dir
    }

    /// `ΔZ` and `ΔX` from a given `Δy`.
    fn complete(&self, d: &[BlockValue], dy: &[f64]) -> Direction {
        let dy = dy.to_vec();
        let aty = self.prep.adjoint(&dy);
        let dz = sub_blocks(&self.rd, &aty);
        let dz_scaled: Vec<BlockValue> = self.scalings.iter().zip(&dz).map(|(s, dz)| s.scale_dual(dz)).collect();
        let dx_scaled = sub_blocks(d, &dz_scaled);
        let dx = self.scalings.iter().zip(&dx_scaled).map(|(s, v)| s.unscale(v)).collect();
        Direction {
            dx,
            dy,
            dz,
            dx_scaled,
            dz_scaled,
        }
    }

    fn max_steps(&self, dir: &Direction) -> Option<(f64, f64)> {
        let mut ap = f64::INFINITY;
        let mut ad = f64::INFINITY;
        for (s, (dx, dz)) in self.scalings.iter().zip(dir.dx_scaled.iter().zip(&dir.dz_scaled)) {
            ap = ap.min(s.max_step(dx)?);
            ad = ad.min(s.max_step(dz)?);
        }
        Some((ap, ad))
    }
}

/// Schur complement `M_ij = Σ_blocks ⟨A_i, W A_j W⟩`.
fn schur_complement(prep: &Prepared, scalings: &[Scaling]) -> Mat<f64> {
    let m = prep.m;
    let mut schur = Mat::<f64>::zeros(m, m);
    for (bi, scaling) in scalings.iter().enumerate() {
        match scaling {
            Scaling::Psd { w, .. } => {
                let n = w.nrows();
                let terms = &prep.psd_terms[bi];
                let mut tail_nnz = vec![0usize; terms.len() + 1];
                for k in (0..terms.len()).rev() {
                    tail_nnz[k] = tail_nnz[k + 1] + terms[k].upper.len();
                }
                for (ti, term) in terms.iter().enumerate() {
                    let r = term.rows.len();
                    // H = W A_i W = W[:, rows] · (A_i[rows, :] W)
                    let right = Mat::from_fn(r, n, |k, col| {
                        term.row_entries[k].iter().map(|&(q, v)| v * w[(q, col)]).sum::<f64>()
                    });
                    if 4 * tail_nnz[ti] < n * n {
                        // Only the entries of H that later constraints touch.
                        let h = |a: usize, b: usize| -> f64 {
                            term.rows
                                .iter()
                                .enumerate()
                                .map(|(k, &p)| w[(a, p)] * right[(k, b)])
                                .sum()
                        };
                        for other in &terms[ti..] {
                            let s: f64 = other.upper.iter().map(|&(a, b, v)| v * h(a, b)).sum();
                            schur[(term.con, other.con)] += s;
                        }
                    } else {
                        let left = Mat::from_fn(n, r, |row, k| w[(row, term.rows[k])]);
                        let h = &left * &right;
                        for other in &terms[ti..] {
                            let s: f64 = other.upper.iter().map(|&(a, b, v)| v * h[(a, b)]).sum();
                            schur[(term.con, other.con)] += s;
                        }
                    }
                }
            }
            Scaling::Diagonal { w, .. } => {
                for (k, col) in prep.diag_cols[bi].iter().enumerate() {
                    let wk = w[k] * w[k];
                    for (a, &(ci, vi)) in col.iter().enumerate() {
                        for &(cj, vj) in &col[a..] {
                            let (i, j) = if ci <= cj { (ci, cj) } else { (cj, ci) };
                            schur[(i, j)] += vi * vj * wk;
                        }
                    }
                }
            }
        }
    }
    // Only the upper triangle was filled; mirror it.
    for j in 0..m {
        for i in j + 1..m {
            let v = schur[(i, j)] + schur[(j, i)];
            schur[(i, j)] = v;
            schur[(j, i)] = v;
        }
    }
    schur
}

fn factor_schur(mut schur: Mat<f64>) -> Option<faer::linalg::solvers::Llt<f64>> {
    let m = schur.nrows();
    if let Ok(l) = schur.llt(Side::Lower) {
        return Some(l);
    }
    let max_diag = (0..m).map(|i| schur[(i, i)].abs()).fold(1.0, f64::max);
    let mut reg = 1e-12 * max_diag;
    for _ in 0..6 {
        for i in 0..m {
            schur[(i, i)] += reg;
        }
        if let Ok(l) = schur.llt(Side::Lower) {
            return Some(l);
        }
        reg *= 100.0;
    }
    None
}

/// Merit, `X`, `y` and `Z` of the best iterate so far.
type BestIterate = (f64, Vec<BlockValue>, Vec<f64>, Vec<BlockValue>);

/// Rounds of iterative refinement per search direction.
const REFINE_STEPS: usize = 2;
/// Iterations without progress after which a diverging objective counts
/// as an infeasibility certificate.
const STAGNATION_WINDOW: usize = 3;
/// Iterations without progress, once close to optimal, after which the
/// solver gives up and returns the best iterate seen.
const STALL_LIMIT: usize = 8;

/// Solves `p` with the given options.
pub fn solve_with(p: &SdpProblem, opts: &SolverOptions) -> Result<SdpSolution, SdpError> {
    p.validate()?;
    let psd = p.psd_dimension();
    if psd > opts.psd_cap {
        return Err(SdpError::CapExceeded {
            size: psd,
            cap: opts.psd_cap,
        });
    }
    let prep = Prepared::new(p);
    let blocks = prep.blocks.clone();
    let nu: usize = blocks.iter().map(Block::dim).sum();

    let max_entry = p
        .constraints()
        .iter()
        .map(|a| a.max_abs())
        .chain([p.objective().max_abs()])
        .chain(prep.b.iter().map(|v| v.abs()))
        .fold(0.0, f64::max);
    let tau = 1.0 + max_entry;
    let ones_scaled = |b: Block| diag_block(b, &vec![tau; b.dim()]);
    let mut x: Vec<BlockValue> = blocks.iter().map(|&b| ones_scaled(b)).collect();
    let mut z = x.clone();
    let mut y = vec![0.0; prep.m];

    let mut log = Vec::new();
    let mut status = SolveStatus::MaxIterations;
    let mut iterations = 0;
    let mut best: Option<BestIterate> = None;
    let mut since_best = 0usize;

    let summary = |x: &[BlockValue], y: &[f64], z: &[BlockValue]| {
        let ax = prep.apply(x);
        let rp: Vec<f64> = prep.b.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let aty = prep.adjoint(y);
        let mut rd = sub_blocks(&prep.c, z);
        axpy_blocks(&mut rd, -1.0, &aty);
        let pobj = inner_blocks(&prep.c, x);
        let dobj: f64 = prep.b.iter().zip(y).map(|(b, y)| b * y).sum();
        let pres = rp.iter().map(|v| v * v).sum::<f64>().sqrt() / (1.0 + prep.b_norm);
        let dres = norm_blocks(&rd) / (1.0 + prep.c_norm);
        let gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
        (rp, rd, pobj, dobj, pres, dres, gap)
    };

    loop {
        let (rp, rd, pobj, dobj, pres, dres, gap) = summary(&x, &y, &z);
        let mu = inner_blocks(&x, &z) / nu as f64;
        let mut record = IterationRecord {
            iter: iterations,
            primal_objective: pobj,
            dual_objective: dobj,
            gap,
            primal_residual: pres,
            dual_residual: dres,
            mu,
            sigma: f64::NAN,
            primal_step: f64::NAN,
            dual_step: f64::NAN,
        };

        let merit = gap.max(pres).max(dres);
        if merit <= opts.tol {
            status = SolveStatus::Optimal;
            log.push(record);
            break;
        }
        if best.as_ref().is_none_or(|b| merit < b.0) {
            best = Some((merit, x.clone(), y.clone(), z.clone()));
            since_best = 0;
        } else {
            since_best += 1;
        }
        let diverging = dobj.abs() > opts.divergence_threshold || pobj.abs() > opts.divergence_threshold;
        if diverging && since_best >= STAGNATION_WINDOW {
            status = SolveStatus::Infeasible;
            log.push(record);
            break;
        }
        let near = best.as_ref().is_some_and(|b| b.0 <= opts.tol.sqrt());
        if !diverging && near && since_best >= STALL_LIMIT {
            status = SolveStatus::NumericalTrouble;
            log.push(record);
            break;
        }
        if iterations >= opts.max_iter {
            log.push(record);
            break;
        }

        let Some(scalings) = x
            .iter()
            .zip(&z)
            .map(|(x, z)| Scaling::new(x, z))
            .collect::<Option<Vec<_>>>()
        else {
            status = SolveStatus::NumericalTrouble;
            log.push(record);
            break;
        };
        let Some(schur) = factor_schur(schur_complement(&prep, &scalings)) else {
            status = SolveStatus::NumericalTrouble;
            log.push(record);
            break;
        };
        let w_rd_w = scalings.iter().zip(&rd).map(|(s, r)| s.congruence_w(r)).collect();
        let it = Iterate {
            prep: &prep,
            scalings,
            schur,
            rp,
            rd,
            w_rd_w,
        };

        // Predictor: D = −Λ.
        let d_aff: Vec<BlockValue> = it
            .scalings
            .iter()
            .zip(&blocks)
            .map(|(s, &b)| diag_block(b, &s.lambda().iter().map(|l| -l).collect::<Vec<_>>()))
            .collect();
        let aff = it.direction(&d_aff);
        let Some((ap_max, ad_max)) = it.max_steps(&aff) else {
            status = SolveStatus::NumericalTrouble;
            log.push(record);
            break;
        };
        let (ap, ad) = (ap_max.min(1.0), ad_max.min(1.0));
        let lam_sq: f64 = it.scalings.iter().flat_map(|s| s.lambda().iter().map(|l| l * l)).sum();
        let rho = scaled_complementarity(&it.scalings, &aff.dx_scaled, &aff.dz_scaled, ap, ad) / lam_sq;
        let sigma = rho.clamp(0.0, 1.0).powi(3);

        // Corrector: Λ∘D = σμI − Λ² − ΔX̃ₐ∘ΔZ̃ₐ.
        let d_cc: Vec<BlockValue> = it
            .scalings
            .iter()
            .zip(aff.dx_scaled.iter().zip(&aff.dz_scaled))
            .map(|(s, (dx, dz))| {
                let lam = s.lambda();
                match (dx, dz) {
                    (BlockValue::Psd(dx), BlockValue::Psd(dz)) => {
                        let prod = dx * dz;
                        let n = lam.len();
                        BlockValue::Psd(Mat::from_fn(n, n, |i, j| {
                            let sym = 0.5 * (prod[(i, j)] + prod[(j, i)]);
                            let target = if i == j { sigma * mu - lam[i] * lam[i] } else { 0.0 };
                            2.0 * (target - sym) / (lam[i] + lam[j])
                        }))
                    }
                    (BlockValue::Diagonal(dx), BlockValue::Diagonal(dz)) => BlockValue::Diagonal(
                        lam.iter()
                            .zip(dx.iter().zip(dz))
                            .map(|(l, (a, b))| (sigma * mu - l * l - a * b) / l)
                            .collect(),
                    ),
                    _ => unreachable!("block kinds always line up"),
                }
            })
            .collect();
        let dir = it.direction(&d_cc);
        let Some((ap_max, ad_max)) = it.max_steps(&dir) else {
            status = SolveStatus::NumericalTrouble;
            log.push(record);
            break;
        };
        let ap = (opts.step_fraction * ap_max).min(1.0);
        let ad = (opts.step_fraction * ad_max).min(1.0);

        axpy_blocks(&mut x, ap, &dir.dx);
        axpy_blocks(&mut z, ad, &dir.dz);
        for (yi, dyi) in y.iter_mut().zip(&dir.dy) {
            *yi += ad * dyi;
        }
        for b in x.iter_mut().chain(z.iter_mut()) {
            if let BlockValue::Psd(m) = b {
                symmetrize(m);
            }
        }

        record.sigma = sigma;
        record.primal_step = ap;
        record.dual_step = ad;
        log.push(record);
        iterations += 1;
    }

    if matches!(status, SolveStatus::MaxIterations | SolveStatus::NumericalTrouble) {
        if let Some((_, bx, by, bz)) = best {
            (x, y, z) = (bx, by, bz);
        }
    }
    let (_, _, pobj, dobj, pres, dres, gap) = summary(&x, &y, &z);
    Ok(SdpSolution {
        x,
        y,
        z,
        primal_objective: pobj,
        dual_objective: dobj,
        primal_residual: pres,
        dual_residual: dres,
        gap,
        iterations,
        status,
        log,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sdp::{Sense, SparseBlockMatrix};

    /// minimize x s.t. x ≥ 3, as: maximize −y s.t. y − 3 ≥ 0.
    pub(crate) fn trivial_lp() -> SdpProblem {
        let mut p = SdpProblem::new(vec![Block::Diagonal(1)], Sense::Minimize);
        let mut c = SparseBlockMatrix::new();
        c.add(0, 0, 0, -3.0);
        p.set_objective(c);
        let mut a = SparseBlockMatrix::new();
        a.add(0, 0, 0, -1.0);
        p.add_constraint(a, -1.0);
        p
    }

    #[test]
    fn trivial_lp_solves() {
        let p = trivial_lp();
        let s = solve(&p, 1e-10, 100).unwrap();
        assert_eq!(s.status, SolveStatus::Optimal);
        assert!((s.y[0] - 3.0).abs() < 1e-8);
        assert!((p.user_objective(s.dual_objective) - 3.0).abs() < 1e-8);
    }

    #[test]
    fn trace_minimisation() {
        // min tr X s.t. X₁₁ = 1 → 1, attained at e₁e₁ᵀ
        let mut p = SdpProblem::new(vec![Block::Psd(2)], Sense::Maximize);
        let mut c = SparseBlockMatrix::new();
        c.add(0, 0, 0, 1.0).add(0, 1, 1, 1.0);
        p.set_objective(c);
        let mut a = SparseBlockMatrix::new();
        a.add(0, 0, 0, 1.0);
        p.add_constraint(a, 1.0);
        let s = solve(&p, 1e-9, 100).unwrap();
        assert_eq!(s.status, SolveStatus::Optimal);
        assert!((s.primal_objective - 1.0).abs() < 1e-8);
        let x = s.x[0].as_psd().unwrap();
        assert!((x[(0, 0)] - 1.0).abs() < 1e-8);
        assert!(x[(1, 1)].abs() < 1e-7);
    }

    #[test]
    fn unbounded_dual_is_flagged() {
        // min 0 s.t. x = −1, x ≥ 0 is primal infeasible: the dual
        // max −y s.t. −y ≥ 0 ... written as C − yA with C = 0, A = 1, b = −1
        // has the ray y → −∞.
        let mut p = SdpProblem::new(vec![Block::Diagonal(1)], Sense::Maximize);
        let mut a = SparseBlockMatrix::new();
        a.add(0, 0, 0, 1.0);
        p.add_constraint(a, -1.0);
        let s = solve(&p, 1e-8, 200).unwrap();
        assert_ne!(s.status, SolveStatus::Optimal);
    }

    #[test]
    fn cap_is_enforced() {
        let mut p = SdpProblem::new(vec![Block::Psd(5)], Sense::Maximize);
        let mut a = SparseBlockMatrix::new();
        a.add(0, 0, 0, 1.0);
        p.add_constraint(a, 1.0);
        let opts = SolverOptions {
            psd_cap: 4,
            ..SolverOptions::default()
        };
        assert!(matches!(solve_with(&p, &opts), Err(SdpError::CapExceeded { .. })));
    }
}
