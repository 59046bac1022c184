//! The Delsarte bound for spherical codes with rigorous polynomial
//! certificates.
//!
//! ```text
//! cargo run --release --example kissing_numbers
//! ```

use std::error::Error;
use std::f64::consts::PI;

use packbound::sphere::{delsarte_lp_bound, SphereCertificate};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let cases = [(2, PI / 3.0, 6, "hexagon, 6"), (3, PI / 3.0, 10, "between 12 and 13"), (4, PI / 3.0, 12, "24"), (8, PI / 3.0, 6, "E8, 240")];
    for (n, theta, degree, known) in cases {
        let (r, report) = delsarte_lp_bound(n, theta, degree, 10, 1e-9)?;
        println!(
            "S^{} θ = 60°, degree {degree:>2}: LP value {:.6}, certified {:?}, sup f + 1 = {:.1e}  (kissing number {known})",
            n - 1,
            r.value,
            r.certified_bound,
            report.margin
        );
    }
    let (_, report) = delsarte_lp_bound(8, PI / 3.0, 6, 10, 1e-9)?;
    println!("\n{}", SphereCertificate::new(8, PI / 3.0, &report).to_json());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
