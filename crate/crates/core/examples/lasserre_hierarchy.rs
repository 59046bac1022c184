//! The chain `α(G) ≤ … ≤ las_2(G) ≤ las_1(G)` with verified certificates.
//!
//! ```text
//! cargo run --release --example lasserre_hierarchy
//! ```

use std::error::Error;

use packbound::graph::alpha_exact;
use packbound::graph::generators::{code_graph, cycle, petersen};
use packbound::hierarchy::{assemble_lasserre, las_bound, verify_dual_certificate};
use packbound::{Certificate, Graph};

fn chain(name: &str, g: &Graph) -> Result<(), Box<dyn Error>> {
    let alpha = alpha_exact(g, false)?.value;
    println!("{name}: α = {alpha}");
    for t in 1..=alpha as usize {
        let program = assemble_lasserre(g, t)?;
        let r = las_bound(g, t, 1e-9)?;
        let Some(Certificate::Kernel { matrix, .. }) = &r.certificate else {
            unreachable!("las_t carries a kernel");
        };
        let check = verify_dual_certificate(g, t, matrix, 1e-6)?;
        println!(
            "  las_{t}: {:.8}  |I_t| = {:>3}, |I_2t| = {:>3}, gap {:.1e}, certified {:?}, λmin(K) {:.1e}",
            r.value,
            program.basis_t().len(),
            program.basis_2t().len(),
            r.gap,
            r.certified_bound,
            check.min_eigenvalue
        );
    }
    Ok(())
}

pub fn run_example() -> Result<(), Box<dyn Error>> {
    chain("C5", &cycle(5)?)?;
    chain("C7", &cycle(7)?)?;
    chain("Petersen", &petersen())?;
    let code = code_graph(2, 5, 3)?;
    let r = las_bound(&code, 1, 1e-9)?;
    println!("code graph (2,5,3): las_1 = {:.8}, α = {}", r.value, alpha_exact(&code, false)?.value);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
