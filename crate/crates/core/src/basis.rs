//! Canonical enumeration of `I_t`, the independent sets with at most `t`
//! vertices, and the union table behind moment-matrix entries.
//!
//! Sets are ordered by cardinality and then lexicographically on their
//! sorted vertex lists, so `sets[0]` is the empty set and each stratum
//! `I_{=k}` occupies a contiguous index range.

use std::collections::HashMap;
use std::fmt;
use std::ops::Range;

use fixedbitset::FixedBitSet;
use thiserror::Error;

use crate::graph::Graph;

/// Default cap on `|I_t|`.
pub const DEFAULT_BASIS_CAP: usize = 20_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BasisError {
    #[error("independent-set enumeration exceeded the cap of {cap} sets while building cardinality {level} ({size} sets so far)")]
    CapExceeded { level: usize, size: usize, cap: usize },
    #[error("bases do not match: {0}")]
    Mismatch(String),
    #[error("stratum {k} requested from a level-{t} basis")]
    LevelOutOfRange { k: usize, t: usize },
}

/// Ordered enumeration of `I_t` with set ↔ index maps.
#[derive(Clone, Debug)]
pub struct IndepSetBasis {
    t: usize,
    sets: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
    strata: Vec<Range<usize>>,
    graph_fingerprint: u64,
    n_vertices: usize,
    exhaustive: bool,
}

/// Enumerates `I_t` with the default cap.
pub fn enumerate_independent_sets(g: &Graph, t: usize) -> Result<IndepSetBasis, BasisError> {
    IndepSetBasis::new(g, t, DEFAULT_BASIS_CAP)
}

impl IndepSetBasis {
    /// Enumerates `I_t`, failing once more than `cap` sets are produced.
    pub fn new(g: &Graph, t: usize, cap: usize) -> Result<Self, BasisError> {
        let n = g.n();
        let mut sets: Vec<Vec<usize>> = vec![Vec::new()];
        let mut strata: Vec<Range<usize>> = std::iter::once(0..1).collect();
        // Candidates that may extend each set of the current frontier:
        // vertices above the set's maximum that are adjacent to none of it.
        let mut all = FixedBitSet::with_capacity(n);
        all.insert_range(..);
        let mut frontier: Vec<(usize, FixedBitSet)> = vec![(0, all)];
        let mut exhaustive = false;

        for level in 1..=t + 1 {
            let mut next = Vec::new();
            let start = sets.len();
            for (idx, cand) in &frontier {
                if level == t + 1 {
                    if !cand.is_clear() {
                        break;
                    }
                    continue;
                }
                for v in cand.ones() {
                    let mut set = sets[*idx].clone();
                    set.push(v);
                    let mut c = cand.clone();
                    c.set_range(..v + 1, false);
                    c.difference_with(g.neighbors(v));
                    next.push((sets.len(), c));
                    sets.push(set);
                    if sets.len() > cap {
                        return Err(BasisError::CapExceeded {
                            level,
                            size: sets.len(),
                            cap,
                        });
                    }
                }
            }
            if level == t + 1 {
                exhaustive = frontier.iter().all(|(_, c)| c.is_clear());
                break;
            }
            strata.push(start..sets.len());
            frontier = next;
        }

        let index = sets
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        Ok(Self {
            t,
            sets,
            index,
            strata,
            graph_fingerprint: g.fingerprint(),
            n_vertices: n,
            exhaustive,
        })
    }

    pub fn level(&self) -> usize {
        self.t
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    pub fn set(&self, i: usize) -> &[usize] {
        &self.sets[i]
    }

    /// Position of a sorted vertex list, if it is in the basis.
    pub fn index_of(&self, set: &[usize]) -> Option<usize> {
        self.index.get(set).copied()
    }

    /// Index range of `I_{=k}`, empty when `k > t`.
    pub fn stratum(&self, k: usize) -> Range<usize> {
        self.strata.get(k).cloned().unwrap_or(self.len()..self.len())
    }

    /// True when the basis holds every independent set of the graph, i.e.
    /// `t ≥ α(G)`.
    pub fn is_exhaustive(&self) -> bool {
        self.exhaustive
    }

    /// Size of the largest set in the basis, `min(t, α(G))`.
    pub fn max_cardinality(&self) -> usize {
        self.sets.last().map_or(0, Vec::len)
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn graph_fingerprint(&self) -> u64 {
        self.graph_fingerprint
    }

    /// One set per line in canonical order.
    pub fn dump(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for IndepSetBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.sets {
            let body: Vec<String> = s.iter().map(usize::to_string).collect();
            writeln!(f, "{{{}}}", body.join(","))?;
        }
        Ok(())
    }
}

/// The 0/1 indicator of the stratum `I_{=k}` over the basis.
pub fn stratum_indicator(basis: &IndepSetBasis, k: usize) -> Result<Vec<f64>, BasisError> {
    if k > basis.level() {
        return Err(BasisError::LevelOutOfRange { k, t: basis.level() });
    }
    let mut v = vec![0.0; basis.len()];
    for i in basis.stratum(k) {
        v[i] = 1.0;
    }
    Ok(v)
}

pub(crate) fn sorted_union(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// For each pair of level-`t` indices, the level-`2t` index of their union,
/// or blocked when the union spans an edge.
#[derive(Clone, Debug)]
pub struct UnionTable {
    dim: usize,
    entries: Vec<u32>,
}

const BLOCKED: u32 = u32::MAX;

pub fn build_union_table(basis_t: &IndepSetBasis, basis_2t: &IndepSetBasis) -> Result<UnionTable, BasisError> {
    if basis_t.graph_fingerprint != basis_2t.graph_fingerprint || basis_t.n_vertices != basis_2t.n_vertices {
        return Err(BasisError::Mismatch("bases were built from different graphs".into()));
    }
    if basis_2t.level() != 2 * basis_t.level() {
        return Err(BasisError::Mismatch(format!(
            "expected levels t and 2t, got {} and {}",
            basis_t.level(),
            basis_2t.level()
        )));
    }
    let dim = basis_t.len();
    let mut entries = vec![BLOCKED; dim * dim];
    for i in 0..dim {
        for j in i..dim {
            let u = sorted_union(basis_t.set(i), basis_t.set(j));
            if let Some(k) = basis_2t.index_of(&u) {
                entries[i * dim + j] = k as u32;
                entries[j * dim + i] = k as u32;
            }
        }
    }
    Ok(UnionTable { dim, entries })
}

impl UnionTable {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Index of `J ∪ J′` in the level-`2t` basis, `None` when blocked.
    pub fn get(&self, i: usize, j: usize) -> Option<usize> {
        let e = self.entries[i * self.dim + j];
        (e != BLOCKED).then_some(e as usize)
    }

    /// For every level-`2t` index `S`, the pairs `(J, J′)` with `J ≤ J′` and
    /// `J ∪ J′ = S`.
    pub fn pairs_by_union(&self, len_2t: usize) -> Vec<Vec<(usize, usize)>> {
        let mut out = vec![Vec::new(); len_2t];
        for i in 0..self.dim {
            for j in i..self.dim {
                if let Some(k) = self.get(i, j) {
                    out[k].push((i, j));
                }
            }
        }
        out
    }
}
