//! Instance generators.
//!
//! The geometric generators produce finite induced subgraphs of the
//! infinite packing graphs on the circle. Their independence numbers bound
//! nothing about the infinite graph from above; callers should label bounds
//! computed on them as subgraph bounds.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Graph, GraphError};

/// Default cap on the number of vertices a generator may produce.
pub const DEFAULT_VERTEX_CAP: usize = 4096;

/// Relative tolerance used for the strict angular comparisons.
pub const ANGLE_REL_TOL: f64 = 1e-12;

/// `true` when `dist` lies strictly below `limit`, ties (up to the relative
/// tolerance) counting as not below.
fn strictly_below(dist: f64, limit: f64) -> bool {
    dist < limit * (1.0 - ANGLE_REL_TOL)
}

/// Angular distance between points `i` and `j` of `m` equally spaced points
/// on the circle.
fn circle_distance(i: usize, j: usize, m: usize) -> f64 {
    let k = i.abs_diff(j);
    let k = k.min(m - k);
    2.0 * PI * k as f64 / m as f64
}

pub fn cycle(n: usize) -> Result<Graph, GraphError> {
    if n < 3 {
        return Err(GraphError::InvalidParameter(format!(
            "a cycle needs at least 3 vertices, got {n}"
        )));
    }
    let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    Graph::from_edges(n, &edges)
}

pub fn complete(n: usize) -> Result<Graph, GraphError> {
    let edges: Vec<_> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    Graph::from_edges(n, &edges)
}

/// The Petersen graph: outer 5-cycle `0..5`, inner pentagram `5..10`.
pub fn petersen() -> Graph {
    let mut edges = Vec::with_capacity(15);
    for i in 0..5 {
        edges.push((i, (i + 1) % 5));
        edges.push((i, i + 5));
        edges.push((5 + i, 5 + (i + 2) % 5));
    }
    Graph::from_edges(10, &edges).expect("static edge list is valid")
}

/// q-ary code graph on `F_qⁿ`: two words are adjacent when their Hamming
/// distance lies in the open interval `(0, d)`.
pub fn code_graph(q: usize, n: usize, d: usize) -> Result<Graph, GraphError> {
    code_graph_capped(q, n, d, DEFAULT_VERTEX_CAP)
}

pub fn code_graph_capped(q: usize, n: usize, d: usize, cap: usize) -> Result<Graph, GraphError> {
    if q < 2 || n < 1 || d < 1 {
        return Err(GraphError::InvalidParameter(format!(
            "code graph needs q >= 2, n >= 1, d >= 1 (got q={q}, n={n}, d={d})"
        )));
    }
    let size = (0..n)
        .try_fold(1usize, |acc, _| acc.checked_mul(q))
        .filter(|&s| s <= cap)
        .ok_or(GraphError::CapExceeded {
            what: "code graph vertex set",
            size: q.checked_pow(n as u32).unwrap_or(usize::MAX),
            cap,
        })?;

    let words: Vec<Vec<usize>> = (0..size)
        .map(|mut x| {
            let mut w = vec![0; n];
            for digit in w.iter_mut().rev() {
                *digit = x % q;
                x /= q;
            }
            w
        })
        .collect();
    let mut g = Graph::edgeless(size);
    for a in 0..size {
        for b in a + 1..size {
            let dist = words[a]
                .iter()
                .zip(&words[b])
                .filter(|(x, y)| x != y)
                .count();
            if dist < d {
                g.insert_edge(a, b)?;
            }
        }
    }
    let labels = words
        .iter()
        .map(|w| {
            w.iter()
                .map(|&c| char::from_digit(c as u32, 36).unwrap_or('?'))
                .collect()
        })
        .collect();
    g.with_labels(labels)
}

/// `m` equally spaced points on S¹, adjacent when their angular distance is
/// in `(0, theta)`.
pub fn circle_code(m: usize, theta: f64) -> Result<Graph, GraphError> {
    circle_code_capped(m, theta, DEFAULT_VERTEX_CAP)
}

pub fn circle_code_capped(m: usize, theta: f64, cap: usize) -> Result<Graph, GraphError> {
    if m < 1 {
        return Err(GraphError::InvalidParameter("need at least one point".into()));
    }
    if m > cap {
        return Err(GraphError::CapExceeded {
            what: "circle code point set",
            size: m,
            cap,
        });
    }
    if !(theta > 0.0 && theta <= PI) {
        return Err(GraphError::InvalidParameter(format!(
            "theta must lie in (0, pi], got {theta}"
        )));
    }
    let mut g = Graph::edgeless(m);
    for i in 0..m {
        for j in i + 1..m {
            if strictly_below(circle_distance(i, j, m), theta) {
                g.insert_edge(i, j)?;
            }
        }
    }
    let labels = (0..m).map(|i| format!("p{i}")).collect();
    g.with_labels(labels)
}

/// Binary cap packing graph on `m` equally spaced centres of S¹.
///
/// Vertex `2x + (i-1)` is the cap of type `i ∈ {1, 2}` centred at point `x`.
/// Caps `(x,i)` and `(y,j)` are adjacent when the centres are closer than
/// `theta_i + theta_j`; the weight of a type-`i` cap is its arc length
/// `2 theta_i`.
pub fn cap_graph(m: usize, theta1: f64, theta2: f64) -> Result<Graph, GraphError> {
    cap_graph_capped(m, theta1, theta2, DEFAULT_VERTEX_CAP)
}

pub fn cap_graph_capped(m: usize, theta1: f64, theta2: f64, cap: usize) -> Result<Graph, GraphError> {
    if m < 1 {
        return Err(GraphError::InvalidParameter("need at least one cap centre".into()));
    }
    if !(theta1 > 0.0 && theta2 > 0.0 && theta1.is_finite() && theta2.is_finite()) {
        return Err(GraphError::InvalidParameter(format!(
            "cap angles must be positive, got {theta1} and {theta2}"
        )));
    }
    if 2 * m > cap {
        return Err(GraphError::CapExceeded {
            what: "cap graph vertex set",
            size: 2 * m,
            cap,
        });
    }
    let thetas = [theta1, theta2];
    let n = 2 * m;
    let mut g = Graph::edgeless(n);
    for a in 0..n {
        for b in a + 1..n {
            let (x, i) = (a / 2, a % 2);
            let (y, j) = (b / 2, b % 2);
            if strictly_below(circle_distance(x, y, m), thetas[i] + thetas[j]) {
                g.insert_edge(a, b)?;
            }
        }
    }
    let weights = (0..n).map(|a| 2.0 * thetas[a % 2]).collect();
    let labels = (0..n).map(|a| format!("({},{})", a / 2, a % 2 + 1)).collect();
    g.with_weights(weights)?.with_labels(labels)
}

/// Erdős–Rényi graph `G(n, p)` from a seeded ChaCha8 stream.
pub fn random(n: usize, p: f64, seed: u64) -> Result<Graph, GraphError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(GraphError::InvalidParameter(format!(
            "edge probability must be in [0, 1], got {p}"
        )));
    }
    if n > DEFAULT_VERTEX_CAP {
        return Err(GraphError::CapExceeded {
            what: "random graph vertex set",
            size: n,
            cap: DEFAULT_VERTEX_CAP,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Graph::edgeless(n);
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(p) {
                g.insert_edge(i, j)?;
            }
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::alpha_exact;

    fn assert_well_formed(g: &Graph) {
        for u in 0..g.n() {
            assert!(!g.is_adjacent(u, u));
            for v in 0..g.n() {
                assert_eq!(g.is_adjacent(u, v), g.is_adjacent(v, u));
            }
            assert!(g.weight(u) >= 0.0);
        }
    }

    #[test]
    fn cycles() {
        assert!(cycle(2).is_err());
        let c5 = cycle(5).unwrap();
        assert_eq!(c5.edge_count(), 5);
        assert_eq!(alpha_exact(&c5, false).unwrap().value, 2.0);
        assert_eq!(alpha_exact(&cycle(4).unwrap(), false).unwrap().value, 2.0);
        assert_eq!(alpha_exact(&cycle(3).unwrap(), false).unwrap().value, 1.0);
    }

    #[test]
    fn petersen_is_cubic() {
        let p = petersen();
        assert_well_formed(&p);
        assert_eq!(p.edge_count(), 15);
        assert!((0..10).all(|v| p.degree(v) == 3));
    }

    #[test]
    fn code_graphs() {
        let g = code_graph(2, 5, 3).unwrap();
        assert_well_formed(&g);
        assert_eq!(g.n(), 32);
        // distance 1 or 2: C(5,1) + C(5,2)
        assert!((0..32).all(|v| g.degree(v) == 15));
        assert_eq!(g.label(5), Some("00101"));

        let e = code_graph(2, 4, 1).unwrap();
        assert_eq!(e.n(), 16);
        assert_eq!(e.edge_count(), 0);

        let k4 = code_graph(2, 2, 3).unwrap();
        assert_eq!(k4.edge_count(), 6);

        let t = code_graph(3, 2, 2).unwrap();
        assert_eq!(t.n(), 9);
        assert!((0..9).all(|v| t.degree(v) == 4));

        assert!(matches!(
            code_graph_capped(2, 13, 3, 4096),
            Err(GraphError::CapExceeded { .. })
        ));
        assert!(code_graph(1, 3, 2).is_err());
    }

    #[test]
    fn circle_codes() {
        let g = circle_code(6, 2.0 * PI / 3.0 - 1e-9).unwrap();
        assert_well_formed(&g);
        assert_eq!(alpha_exact(&g, false).unwrap().value, 3.0);

        // spacing pi/2 equals the threshold: a tie, so no edge
        let g = circle_code(4, PI / 4.0).unwrap();
        assert_eq!(g.edge_count(), 0);
        let g = circle_code(4, PI / 2.0).unwrap();
        assert_eq!(g.edge_count(), 0);

        let g = circle_code(3, PI).unwrap();
        assert_eq!(g.edge_count(), 3);

        assert!(circle_code(5, 0.0).is_err());
        assert!(circle_code(5, 4.0).is_err());
        assert!(circle_code_capped(10, 1.0, 5).is_err());
    }

    #[test]
    fn cap_graphs() {
        let g = cap_graph(1, 0.3, 0.7).unwrap();
        assert_eq!(g.n(), 2);
        assert!(g.is_adjacent(0, 1));
        let a = alpha_exact(&g, true).unwrap();
        assert!((a.value - 1.4).abs() < 1e-12);

        // Neighbouring centres are pi/2 apart, exactly 2 * pi/4: touching
        // caps do not overlap, so all four centres carry a cap.
        let g = cap_graph(4, PI / 4.0, PI / 4.0).unwrap();
        assert_well_formed(&g);
        assert_eq!(g.edge_count(), 4);
        let a = alpha_exact(&g, true).unwrap();
        assert!((a.value - 2.0 * PI).abs() < 1e-12);

        assert!(cap_graph(3, -0.1, 0.2).is_err());
        assert!(cap_graph(3, 0.1, 0.0).is_err());
    }

    #[test]
    fn random_is_seeded() {
        let a = random(12, 0.4, 7).unwrap();
        let b = random(12, 0.4, 7).unwrap();
        assert_eq!(a, b);
        assert_well_formed(&a);
        assert!(random(5, 1.5, 0).is_err());
        assert_eq!(random(6, 1.0, 1).unwrap().edge_count(), 15);
    }
}
