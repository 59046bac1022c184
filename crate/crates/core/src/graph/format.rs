//! Edge-list text format.
//!
//! ```text
//! # C5 with one heavy vertex
//! n=5
//! w0=3
//! edge 0 1
//! edge 1 2
//! edges: (2,3), (3,4), (4,0)
//! ```
//!
//! Statements are separated by newlines or `;`. `#` starts a comment. The
//! vertex count must come first. Recognised statements are `n=<int>`,
//! `w<i>=<float>`, `label <i> <text>`, `edge <i> <j>` and
//! `edges: (i,j) (k,l) ...`. Anything else is rejected.

use super::{Graph, GraphError};

fn parse_err(line: usize, message: impl Into<String>) -> GraphError {
    GraphError::Parse {
        line,
        message: message.into(),
    }
}

fn parse_index(line: usize, s: &str) -> Result<usize, GraphError> {
    s.trim()
        .parse::<usize>()
        .map_err(|_| parse_err(line, format!("expected a vertex index, found `{}`", s.trim())))
}

/// Parses the edge-list format into a [`Graph`].
pub fn parse_graph(text: &str) -> Result<Graph, GraphError> {
    let mut graph: Option<Graph> = None;
    let mut labels: Vec<Option<String>> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        for stmt in content.split(';').map(str::trim).filter(|s| !s.is_empty()) {
            if let Some(rest) = stmt.strip_prefix("n=").or_else(|| {
                stmt.strip_prefix('n')
                    .map(str::trim_start)
                    .and_then(|s| s.strip_prefix('='))
            }) {
                if graph.is_some() {
                    return Err(parse_err(line_no, "vertex count declared twice"));
                }
                let n = rest
                    .trim()
                    .parse::<usize>()
                    .map_err(|_| parse_err(line_no, format!("bad vertex count `{}`", rest.trim())))?;
                graph = Some(Graph::edgeless(n));
                labels = vec![None; n];
                continue;
            }

            let g = graph
                .as_mut()
                .ok_or_else(|| parse_err(line_no, "`n=<int>` must come before other statements"))?;

            if let Some(rest) = stmt.strip_prefix("edges:") {
                for token in rest.split(')') {
                    let token = token.trim().trim_start_matches(',').trim();
                    if token.is_empty() {
                        continue;
                    }
                    let inner = token
                        .strip_prefix('(')
                        .ok_or_else(|| parse_err(line_no, format!("expected `(i,j)`, found `{token}`")))?;
                    let (a, b) = inner
                        .split_once(',')
                        .ok_or_else(|| parse_err(line_no, format!("expected `(i,j)`, found `{token})`")))?;
                    g.insert_edge(parse_index(line_no, a)?, parse_index(line_no, b)?)?;
                }
            } else if let Some(rest) = stmt.strip_prefix("edge ") {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                if parts.len() != 2 {
                    return Err(parse_err(line_no, "expected `edge <i> <j>`"));
                }
                g.insert_edge(parse_index(line_no, parts[0])?, parse_index(line_no, parts[1])?)?;
            } else if let Some(rest) = stmt.strip_prefix("label ") {
                let rest = rest.trim_start();
                let (i, text) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
                let i = parse_index(line_no, i)?;
                if i >= g.n() {
                    return Err(GraphError::VertexOutOfRange { vertex: i, n: g.n() });
                }
                labels[i] = Some(text.trim().to_string());
            } else if let Some((key, value)) = stmt
                .strip_prefix('w')
                .and_then(|rest| rest.split_once('='))
            {
                let i = parse_index(line_no, key)?;
                let w = value
                    .trim()
                    .parse::<f64>()
                    .map_err(|_| parse_err(line_no, format!("bad weight `{}`", value.trim())))?;
                if i >= g.n() {
                    return Err(GraphError::VertexOutOfRange { vertex: i, n: g.n() });
                }
                if !w.is_finite() || w < 0.0 {
                    return Err(GraphError::InvalidWeight { vertex: i, weight: w });
                }
                g.weights[i] = w;
            } else {
                return Err(parse_err(line_no, format!("unknown directive `{stmt}`")));
            }
        }
    }

    let mut g = graph.ok_or_else(|| parse_err(text.lines().count().max(1), "missing `n=<int>`"))?;
    if labels.iter().any(Option::is_some) {
        g.labels = Some(labels.into_iter().map(Option::unwrap_or_default).collect());
    }
    Ok(g)
}

pub(super) fn write_graph(g: &Graph) -> String {
    let mut out = format!("n={}\n", g.n());
    for (v, &w) in g.weights().iter().enumerate() {
        if w != 1.0 {
            out.push_str(&format!("w{v}={w:?}\n"));
        }
    }
    if let Some(labels) = g.labels() {
        for (v, l) in labels.iter().enumerate() {
            out.push_str(&format!("label {v} {l}\n"));
        }
    }
    for (u, v) in g.edges() {
        out.push_str(&format!("edge {u} {v}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inline_statements() {
        let g = parse_graph("n=3; edges: (0,1)").unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1)]);
    }

    #[test]
    fn empty_graph() {
        let g = parse_graph("n=0").unwrap();
        assert_eq!(g.n(), 0);
    }

    #[test]
    fn self_loop_rejected() {
        let err = parse_graph("n=2; w0=1.5; edges: (0,0)").unwrap_err();
        assert_eq!(err, GraphError::SelfLoop(0));
    }

    #[test]
    fn line_format_with_comments() {
        let text = "# a path\nn=4\nw2=0.5 # light\nlabel 0 start\nedge 0 1\nedge 1 2\n\nedge 2 3\n";
        let g = parse_graph(text).unwrap();
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.weight(2), 0.5);
        assert_eq!(g.label(0), Some("start"));
        assert_eq!(g.label(1), Some(""));
    }

    #[test]
    fn errors_carry_line_numbers() {
        match parse_graph("n=3\nedge 0 1\nfrobnicate 2\n") {
            Err(GraphError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        match parse_graph("edge 0 1\n") {
            Err(GraphError::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_graph("n=2\nedge 0 5"),
            Err(GraphError::VertexOutOfRange { vertex: 5, n: 2 })
        ));
        assert!(matches!(
            parse_graph("n=2\nw1=-1"),
            Err(GraphError::InvalidWeight { vertex: 1, .. })
        ));
        assert!(parse_graph("n=2\nn=3").is_err());
        assert!(parse_graph("").is_err());
    }

    #[test]
    fn write_then_parse_is_identity() {
        let g = Graph::from_edges(4, &[(0, 1), (2, 3), (1, 3)])
            .unwrap()
            .with_weights(vec![1.0, 0.1, 2.5, 1.0 / 3.0])
            .unwrap();
        assert_eq!(parse_graph(&g.to_edge_list()).unwrap(), g);
    }
}
