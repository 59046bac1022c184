//! The interior-point solver on a small hand-built SDP, with the iteration
//! log, an independent feasibility check and an SDPA round trip.
//!
//! ```text
//! cargo run --example sdp_solver
//! ```

use std::error::Error;

use packbound::sdp::{
    check_feasibility, export_sdpa, import_sdpa, solve, Block, Entry, SdpProblem, Sense, SparseBlockMatrix,
};

/// `max y₁ + y₂` subject to `[[2, 1], [1, 2]] − y₁I ⪰ 0` and `1 − y₂ ≥ 0`:
/// the smallest eigenvalue `1` plus the scalar bound `1`.
fn problem() -> SdpProblem {
    let mut p = SdpProblem::new(vec![Block::Psd(2), Block::Diagonal(1)], Sense::Maximize);
    p.set_objective(SparseBlockMatrix::from_entries([
        Entry { block: 0, row: 0, col: 0, value: 2.0 },
        Entry { block: 0, row: 0, col: 1, value: 1.0 },
        Entry { block: 0, row: 1, col: 1, value: 2.0 },
        Entry { block: 1, row: 0, col: 0, value: 1.0 },
    ]));
    p.add_constraint(
        SparseBlockMatrix::from_entries([
            Entry { block: 0, row: 0, col: 0, value: 1.0 },
            Entry { block: 0, row: 1, col: 1, value: 1.0 },
        ]),
        1.0,
    );
    p.add_constraint(SparseBlockMatrix::from_entries([Entry { block: 1, row: 0, col: 0, value: 1.0 }]), 1.0);
    p
}

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let p = problem();
    let s = solve(&p, 1e-10, 100)?;
    print!("{}", s.format_log());
    println!("status {}, objective {:.10} (expected 2)", s.status, p.user_objective(s.dual_objective));

    let report = check_feasibility(&p, &s, 1e-8);
    println!(
        "independent check: primal residual {:.1e}, dual residual {:.1e}, λmin(X) {:.1e}, λmin(Z) {:.1e}, feasible {}",
        report.primal_residual, report.dual_residual, report.min_eig_x, report.min_eig_z, report.feasible
    );

    let text = export_sdpa(&p);
    println!("\nSDPA sparse format:\n{text}");
    let back = import_sdpa(&text)?;
    let again = solve(&back, 1e-10, 100)?;
    println!("re-imported problem solves to {:.10}", back.user_objective(again.dual_objective));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
