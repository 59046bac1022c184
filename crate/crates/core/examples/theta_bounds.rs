//! `ϑ` and `ϑ′` from their direct programs, and the lift of a `ϑ′*`
//! solution to a kernel for `las_1(G)*`.
//!
//! ```text
//! cargo run --example theta_bounds
//! ```

use std::error::Error;

use packbound::graph::generators::{cycle, petersen};
use packbound::hierarchy::{
    las_bound, lift_theta_prime_solution, theta, theta_prime, two_point_kernel, verify_dual_certificate,
    BoundOptions,
};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    for (name, g) in [("C5", cycle(5)?), ("C7", cycle(7)?), ("Petersen", petersen())] {
        let th = theta(&g, 1e-9)?;
        let thp = theta_prime(&g, 1e-9)?;
        let las = las_bound(&g, 1, 1e-9)?;
        println!(
            "{name:<9} ϑ = {:.8}  ϑ′ = {:.8}  las_1 = {:.8}  |ϑ′ − las_1| = {:.1e}",
            th.value,
            thp.value,
            las.value,
            (thp.value - las.value).abs()
        );
    }
    println!("ϑ(C5) = √5 = {:.8}", 5f64.sqrt());

    let g = cycle(5)?.with_weights(vec![3.0, 1.0, 1.0, 1.0, 1.0])?;
    let sol = two_point_kernel(&g, true, &BoundOptions::with_tol(1e-9))?;
    let k = lift_theta_prime_solution(sol.a, &sol.f, g.weights())?;
    let report = verify_dual_certificate(&g, 1, &k, 1e-6)?;
    println!(
        "weighted C5: ϑ′ = {:.8}, lifted kernel passes las_1* check: {} (margin {:.1e})",
        sol.a, report.passed, report.margin
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
