//! Exact (weighted) independence number by branch and bound.
//!
//! Vertices are packed into `u64` masks, so graphs are limited to 64
//! vertices. The search branches on a maximum-degree vertex of the residual
//! graph and prunes with a greedy clique-cover bound: every independent set
//! meets each clique of a partition at most once, so the sum of the
//! per-clique maximum weights bounds what the residual graph can add.

use serde::Serialize;

use super::{Graph, GraphError};

/// Default size guard for [`alpha_exact`].
pub const DEFAULT_ALPHA_LIMIT: usize = 64;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AlphaResult {
    /// `α(G)` or `α_w(G)`.
    pub value: f64,
    /// A maximum independent set, sorted.
    pub witness: Vec<usize>,
}

struct Search<'a> {
    adj: Vec<u64>,
    weights: &'a [f64],
    best_value: f64,
    best_set: u64,
}

#[inline]
fn bit(v: usize) -> u64 {
    1u64 << v
}

fn ones(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let v = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(v)
        }
    })
}

impl Search<'_> {
    fn mask_weight(&self, mask: u64) -> f64 {
        ones(mask).map(|v| self.weights[v]).sum()
    }

    fn clique_cover_bound(&self, cand: u64) -> f64 {
        let mut remaining = cand;
        let mut bound = 0.0;
        while remaining != 0 {
            let v = remaining.trailing_zeros() as usize;
            let mut clique_max = self.weights[v];
            let mut clique = bit(v);
            let mut extend = remaining & self.adj[v];
            while extend != 0 {
                let u = extend.trailing_zeros() as usize;
                clique |= bit(u);
                clique_max = clique_max.max(self.weights[u]);
                extend &= self.adj[u];
            }
            remaining &= !clique;
            bound += clique_max;
        }
        bound
    }

    fn run(&mut self, cand: u64, chosen: u64, value: f64) {
        // Residual-isolated vertices can always be added.
        let isolated = ones(cand)
            .filter(|&v| self.adj[v] & cand == 0)
            .fold(0u64, |m, v| m | bit(v));
        let chosen = chosen | isolated;
        let value = value + self.mask_weight(isolated);
        let cand = cand & !isolated;

        if cand == 0 {
            if value > self.best_value {
                self.best_value = value;
                self.best_set = chosen;
            }
            return;
        }
        if value + self.clique_cover_bound(cand) <= self.best_value {
            return;
        }
        let v = ones(cand)
            .max_by_key(|&v| ((self.adj[v] & cand).count_ones(), std::cmp::Reverse(v)))
            .expect("cand is nonempty");
        self.run(cand & !self.adj[v] & !bit(v), chosen | bit(v), value + self.weights[v]);
        self.run(cand & !bit(v), chosen, value);
    }
}

/// Exact maximum (weighted when `weighted`) independent set, for graphs with
/// at most [`DEFAULT_ALPHA_LIMIT`] vertices.
pub fn alpha_exact(g: &Graph, weighted: bool) -> Result<AlphaResult, GraphError> {
    alpha_exact_with_limit(g, weighted, DEFAULT_ALPHA_LIMIT)
}

pub fn alpha_exact_with_limit(g: &Graph, weighted: bool, limit: usize) -> Result<AlphaResult, GraphError> {
    let n = g.n();
    let limit = limit.min(64);
    if n > limit {
        return Err(GraphError::CapExceeded {
            what: "branch-and-bound vertex set",
            size: n,
            cap: limit,
        });
    }
    let unit = vec![1.0; n];
    let weights = if weighted { g.weights() } else { &unit[..] };
    let adj = (0..n)
        .map(|v| g.neighbors(v).ones().fold(0u64, |m, u| m | bit(u)))
        .collect();
    let mut search = Search {
        adj,
        weights,
        best_value: f64::NEG_INFINITY,
        best_set: 0,
    };
    let all = if n == 64 { u64::MAX } else { bit(n) - 1 };
    search.run(all, 0, 0.0);
    let witness: Vec<usize> = ones(search.best_set).collect();
    let value = witness.iter().map(|&v| weights[v]).sum();
    Ok(AlphaResult { value, witness })
}
