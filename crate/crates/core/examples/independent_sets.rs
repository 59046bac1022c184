//! The canonical basis `I_t` of independent sets and the union rule that
//! indexes moment-matrix entries.
//!
//! ```text
//! cargo run --example independent_sets
//! ```

use std::error::Error;

use packbound::basis::{build_union_table, IndepSetBasis};
use packbound::graph::generators::{cycle, petersen};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let g = cycle(5)?;
    let b1 = IndepSetBasis::new(&g, 1, 1000)?;
    let b2 = IndepSetBasis::new(&g, 2, 1000)?;
    println!("C5: |I_1| = {}, |I_2| = {}", b1.len(), b2.len());
    print!("{}", b2.dump());

    let table = build_union_table(&b1, &b2)?;
    println!("\nM_1(y) for C5, entry (J, J') names y_(J ∪ J'):");
    for i in 0..table.dim() {
        let row: Vec<String> = (0..table.dim())
            .map(|j| match table.get(i, j) {
                Some(s) => format!("{:>6}", format!("{:?}", b2.set(s))),
                None => format!("{:>6}", "0"),
            })
            .collect();
        println!("  {}", row.join(" "));
    }

    let p = petersen();
    for t in 1..=5 {
        let b = IndepSetBasis::new(&p, t, 10_000)?;
        println!(
            "Petersen: |I_{t}| = {:>3}, largest set {}{}",
            b.len(),
            b.max_cardinality(),
            if b.is_exhaustive() { ", every independent set listed" } else { "" }
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
