//! Oracles and instance builders shared by the integration tests.

#![allow(dead_code)]

use packbound::faer::Mat;
use packbound::graph::generators::{code_graph, cycle, petersen, random};
use packbound::sdp::{Block, Entry, SdpProblem, Sense, SparseBlockMatrix};
use packbound::Graph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Calls `f` on every independent set with at most `t` vertices, each
/// listed in increasing order.
fn for_each_independent(g: &Graph, t: usize, f: &mut dyn FnMut(&[usize])) {
    fn grow(g: &Graph, t: usize, from: usize, set: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        f(set);
        if set.len() == t {
            return;
        }
        for v in from..g.n() {
            if set.iter().all(|&u| !g.is_adjacent(u, v)) {
                set.push(v);
                grow(g, t, v + 1, set, f);
                set.pop();
            }
        }
    }
    grow(g, t, 0, &mut Vec::new(), f);
}

/// `α_w(G)` by listing every independent set.
pub fn brute_force_alpha(g: &Graph) -> f64 {
    let mut best = 0.0f64;
    for_each_independent(g, g.n(), &mut |s| best = best.max(g.set_weight(s)));
    best
}

/// Every independent set with at most `t` vertices.
pub fn brute_force_sets(g: &Graph, t: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for_each_independent(g, t, &mut |s| out.push(s.to_vec()));
    out
}

/// The graphs named in the acceptance criteria.
pub fn named_graphs() -> Vec<(String, Graph)> {
    vec![
        ("C4".into(), cycle(4).unwrap()),
        ("C5".into(), cycle(5).unwrap()),
        ("C7".into(), cycle(7).unwrap()),
        ("Petersen".into(), petersen()),
        ("code(2,5,3)".into(), code_graph(2, 5, 3).unwrap()),
    ]
}

/// Twenty seeded random graphs on 6 to 12 vertices.
pub fn random_graphs() -> Vec<(String, Graph)> {
    (0..20u64)
        .map(|seed| {
            let n = 6 + (seed as usize * 5) % 7;
            let p = 0.3 + 0.05 * (seed % 5) as f64;
            (format!("G({n},{p:.2};{seed})"), random(n, p, 1000 + seed).unwrap())
        })
        .collect()
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

fn random_orthogonal(n: usize, rng: &mut ChaCha8Rng) -> Mat<f64> {
    let a = Mat::from_fn(n, n, |_, _| gaussian(rng));
    a.svd().unwrap().U().to_owned()
}

/// `Σ_k d_k q_k q_kᵀ` for the columns `q_k` of `q`.
fn spectral(q: &Mat<f64>, d: &[f64]) -> Mat<f64> {
    let n = q.nrows();
    Mat::from_fn(n, n, |i, j| (0..n).map(|k| d[k] * q[(i, k)] * q[(j, k)]).sum())
}

/// A block-diagonal value: dense PSD blocks followed by one diagonal block.
#[derive(Clone, Debug)]
pub struct BlockMat {
    pub psd: Vec<Mat<f64>>,
    pub diag: Vec<f64>,
}

impl BlockMat {
    fn inner(&self, o: &BlockMat) -> f64 {
        let mut s: f64 = self.diag.iter().zip(&o.diag).map(|(a, b)| a * b).sum();
        for (a, b) in self.psd.iter().zip(&o.psd) {
            for i in 0..a.nrows() {
                for j in 0..a.ncols() {
                    s += a[(i, j)] * b[(i, j)];
                }
            }
        }
        s
    }

    fn axpy(&mut self, alpha: f64, o: &BlockMat) {
        for (a, b) in self.psd.iter_mut().zip(&o.psd) {
            for i in 0..a.nrows() {
                for j in 0..a.ncols() {
                    a[(i, j)] += alpha * b[(i, j)];
                }
            }
        }
        for (a, b) in self.diag.iter_mut().zip(&o.diag) {
            *a += alpha * b;
        }
    }

    fn to_sparse(&self) -> SparseBlockMatrix {
        let mut entries = Vec::new();
        for (bi, a) in self.psd.iter().enumerate() {
            for i in 0..a.nrows() {
                for j in i..a.ncols() {
                    entries.push(Entry { block: bi, row: i, col: j, value: a[(i, j)] });
                }
            }
        }
        let db = self.psd.len();
        for (i, &v) in self.diag.iter().enumerate() {
            entries.push(Entry { block: db, row: i, col: i, value: v });
        }
        SparseBlockMatrix::from_entries(entries)
    }
}

/// A random SDP whose optimum is known and whose primal and dual are both
/// strictly feasible.
///
/// `X*` and `Z*` are complementary in a random orthonormal basis per block.
/// Every constraint is orthogonal to a fixed `W ≻ 0`, so `X* + εW` is a
/// strictly feasible primal point. The first constraint is `P₁ − cP₂`
/// (projectors onto the ranges of `X*` and `Z*`, `c` chosen for
/// orthogonality to `W`), so `Z* + εA₁` is a strictly feasible dual slack.
/// The optimum is `⟨C, X*⟩ = bᵀy*`.
pub fn random_sdp(seed: u64) -> (SdpProblem, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_blocks = 1 + rng.random_range(0..2usize);
    let sizes: Vec<usize> = (0..n_blocks).map(|_| 2 + rng.random_range(0..5usize)).collect();
    let n_diag = rng.random_range(1..4usize);

    let mut x_star = BlockMat { psd: Vec::new(), diag: Vec::new() };
    let mut z_star = x_star.clone();
    let mut p1 = x_star.clone();
    let mut p2 = x_star.clone();
    let mut w = x_star.clone();
    for &n in &sizes {
        let q = random_orthogonal(n, &mut rng);
        let r = 1 + rng.random_range(0..n - 1);
        let lam: Vec<f64> = (0..n).map(|k| if k < r { 0.5 + rng.random::<f64>() } else { 0.0 }).collect();
        let mu: Vec<f64> = (0..n).map(|k| if k >= r { 0.5 + rng.random::<f64>() } else { 0.0 }).collect();
        x_star.psd.push(spectral(&q, &lam));
        z_star.psd.push(spectral(&q, &mu));
        p1.psd.push(spectral(&q, &(0..n).map(|k| f64::from(u8::from(k < r))).collect::<Vec<_>>()));
        p2.psd.push(spectral(&q, &(0..n).map(|k| f64::from(u8::from(k >= r))).collect::<Vec<_>>()));
        let qw = random_orthogonal(n, &mut rng);
        w.psd.push(spectral(&qw, &(0..n).map(|_| 0.5 + rng.random::<f64>()).collect::<Vec<_>>()));
    }
    for k in 0..n_diag {
        let active = k % 2 == 0;
        x_star.diag.push(if active { 0.5 + rng.random::<f64>() } else { 0.0 });
        z_star.diag.push(if active { 0.0 } else { 0.5 + rng.random::<f64>() });
        p1.diag.push(f64::from(u8::from(active)));
        p2.diag.push(f64::from(u8::from(!active)));
        w.diag.push(0.5 + rng.random::<f64>());
    }

    let ww = w.inner(&w);
    let mut constraints = Vec::new();
    let c = p1.inner(&w) / p2.inner(&w);
    let mut a1 = p1.clone();
    a1.axpy(-c, &p2);
    constraints.push(a1);
    let dim: usize = sizes.iter().map(|n| n * (n + 1) / 2).sum::<usize>() + n_diag;
    let m = 1 + rng.random_range(0..dim.saturating_sub(2).max(1));
    for _ in 1..m {
        let mut b = BlockMat {
            psd: sizes
                .iter()
                .map(|&n| {
                    let g = Mat::from_fn(n, n, |_, _| gaussian(&mut rng));
                    Mat::from_fn(n, n, |i, j| 0.5 * (g[(i, j)] + g[(j, i)]))
                })
                .collect(),
            diag: (0..n_diag).map(|_| gaussian(&mut rng)).collect(),
        };
        let proj = b.inner(&w) / ww;
        b.axpy(-proj, &w);
        constraints.push(b);
    }
    let y_star: Vec<f64> = (0..constraints.len()).map(|_| gaussian(&mut rng)).collect();

    let mut cmat = z_star.clone();
    for (a, &y) in constraints.iter().zip(&y_star) {
        cmat.axpy(y, a);
    }
    let mut blocks: Vec<Block> = sizes.iter().map(|&n| Block::Psd(n)).collect();
    blocks.push(Block::Diagonal(n_diag));
    let mut p = SdpProblem::new(blocks, Sense::Maximize);
    p.set_objective(cmat.to_sparse());
    let mut optimum = 0.0;
    for (a, &y) in constraints.iter().zip(&y_star) {
        let b = a.inner(&x_star);
        optimum += b * y;
        p.add_constraint(a.to_sparse(), b);
    }
    (p, optimum)
}

/// The 240 roots of E8, scaled to the unit sphere.
pub fn e8_roots() -> Vec<[f64; 8]> {
    let mut roots = Vec::new();
    for i in 0..8 {
        for j in i + 1..8 {
            for si in [-1.0, 1.0] {
                for sj in [-1.0, 1.0] {
                    let mut v = [0.0; 8];
                    v[i] = si;
                    v[j] = sj;
                    roots.push(v);
                }
            }
        }
    }
    for mask in 0u32..256 {
        if mask.count_ones() % 2 == 0 {
            let mut v = [0.5; 8];
            for (k, x) in v.iter_mut().enumerate() {
                if mask >> k & 1 == 1 {
                    *x = -0.5;
                }
            }
            roots.push(v);
        }
    }
    let s = 2f64.sqrt();
    roots.iter().map(|v| v.map(|x| x / s)).collect()
}

/// The 12 vertices of the icosahedron on the unit sphere.
pub fn icosahedron() -> Vec<[f64; 3]> {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let mut out = Vec::new();
    for a in [-1.0, 1.0] {
        for b in [-phi, phi] {
            out.push([0.0, a, b]);
            out.push([a, b, 0.0]);
            out.push([b, 0.0, a]);
        }
    }
    let norm = (1.0 + phi * phi).sqrt();
    out.iter().map(|v| v.map(|x| x / norm)).collect()
}

/// Largest pairwise inner product of distinct points.
pub fn max_inner_product<const N: usize>(points: &[[f64; N]]) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let ip: f64 = points[i].iter().zip(&points[j]).map(|(a, b)| a * b).sum();
            best = best.max(ip);
        }
    }
    best
}
