//! Three-point bounds `w(e) + las_t(Gᵉ)` through local subgraphs.
//!
//! ```text
//! cargo run --release --example three_point
//! ```

use std::error::Error;

use packbound::graph::alpha_exact;
use packbound::graph::generators::{code_graph, cycle, petersen};
use packbound::hierarchy::{las_bound, three_point_bound, three_point_direct};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let graphs = [("C7", cycle(7)?), ("Petersen", petersen()), ("code (2,5,3)", code_graph(2, 5, 3)?)];
    for (name, g) in graphs {
        let (local, kept) = g.local_subgraph(0)?;
        let alpha = alpha_exact(&g, false)?.value;
        let alpha_local = alpha_exact(&local, false)?.value;
        let full = las_bound(&g, 1, 1e-9)?;
        let three = three_point_bound(&g, 0, 1, 1e-9)?;
        let direct = three_point_direct(&g, 0, 1e-9)?;
        println!(
            "{name:<13} |Vᵉ| = {:>2}  α = {alpha}  1 + α(Gᵉ) = {}  las_1 = {:.6}  1 + las_1(Gᵉ) = {:.6}  direct {:.6}",
            kept.len(),
            1.0 + alpha_local,
            full.value,
            three.value,
            direct.value
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
