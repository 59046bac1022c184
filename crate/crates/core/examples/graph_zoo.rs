//! Instance generators, the edge-list format and the exact `α` oracle.
//!
//! ```text
//! cargo run --example graph_zoo
//! ```

use std::error::Error;
use std::f64::consts::PI;

use packbound::graph::generators::{cap_graph, circle_code, code_graph, cycle, petersen, random};
use packbound::graph::{alpha_exact, parse_graph};
use packbound::Graph;

fn describe(name: &str, g: &Graph) -> Result<(), Box<dyn Error>> {
    let a = alpha_exact(g, !g.is_unweighted())?;
    println!(
        "{name:<22} n = {:>3}  edges = {:>4}  α = {:<8.4} witness {:?}",
        g.n(),
        g.edge_count(),
        a.value,
        a.witness
    );
    Ok(())
}

pub fn run_example() -> Result<(), Box<dyn Error>> {
    describe("C5", &cycle(5)?)?;
    describe("C7", &cycle(7)?)?;
    describe("Petersen", &petersen())?;
    describe("code graph (2,5,3)", &code_graph(2, 5, 3)?)?;
    describe("circle code 12, 60°", &circle_code(12, PI / 3.0)?)?;
    describe("caps 8, 30° + 15°", &cap_graph(8, PI / 6.0, PI / 12.0)?)?;
    describe("G(10, 0.3) seed 7", &random(10, 0.3, 7)?)?;

    let text = "# C5 with a heavy vertex\nn=5\nw0=3\nedges: (0,1) (1,2) (2,3) (3,4) (4,0)\n";
    let g = parse_graph(text)?;
    describe("weighted C5 from text", &g)?;
    println!("\nround trip through the edge-list format:\n{}", g.to_edge_list());
    assert_eq!(parse_graph(&g.to_edge_list())?, g);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
