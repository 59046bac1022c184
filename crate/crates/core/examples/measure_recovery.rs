//! At `t = α(G)` an optimal moment vector is the zeta transform of a
//! probability measure on independent sets; Möbius inversion recovers it.
//!
//! ```text
//! cargo run --example measure_recovery
//! ```

use std::error::Error;

use packbound::graph::generators::cycle;
use packbound::hierarchy::{inclusion_exclusion, las_bound, moebius_recover_measure, zeta_transform};
use packbound::IndepSetBasis;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let g = cycle(5)?;
    let r = las_bound(&g, 2, 1e-10)?;
    let y = r.moments.expect("las_t returns its moments");
    let basis = IndepSetBasis::new(&g, 4, 1000)?;
    let sigma = moebius_recover_measure(&basis, &y)?;
    println!("las_2(C5) = {:.8}", r.value);
    for (set, mass) in basis.sets().iter().zip(&sigma) {
        if mass.abs() > 1e-6 {
            println!("  σ{set:?} = {mass:.6}");
        }
    }
    println!("  Σσ = {:.8}", sigma.iter().sum::<f64>());

    let back = zeta_transform(&basis, &sigma)?;
    let err = back.iter().zip(&y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("zeta(σ) reproduces y to {err:.1e}");

    let ok = (0..basis.len()).all(|s| {
        inclusion_exclusion(&basis, s)
            .iter()
            .enumerate()
            .all(|(i, &v)| v == i64::from(i == s))
    });
    println!("integer inclusion–exclusion identity holds on all {} sets: {ok}", basis.len());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
