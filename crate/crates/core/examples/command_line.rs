//! The `packbound` command line driven in-process.
//!
//! ```text
//! cargo run --example command_line
//! ```

use std::error::Error;

use packbound::cli::run_from;

fn run(args: &[&str]) -> Result<(), Box<dyn Error>> {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run_from(std::iter::once("packbound").chain(args.iter().copied()), &mut out, &mut err);
    println!("$ packbound {}", args.join(" "));
    print!("{}{}", String::from_utf8(out)?, String::from_utf8(err)?);
    println!("(exit {code})\n");
    Ok(())
}

pub fn run_example() -> Result<(), Box<dyn Error>> {
    run(&["gen-list"])?;
    run(&["bound", "--gen", "cycle:5", "--method", "las", "--t", "2", "--with-alpha"])?;
    run(&["bound", "--gen", "petersen", "--method", "three-point", "--t", "1"])?;
    run(&["bound", "--gen", "circle:10,72deg", "--method", "theta-prime", "--format", "json"])?;
    run(&["bound", "--delsarte", "--n", "8", "--theta", "60deg", "--degree", "6", "--format", "json"])?;
    run(&["alpha", "--gen", "code:2,5,3"])?;
    run(&["bound", "--gen", "code:2,6,3", "--t", "3", "--basis-cap", "100"])?;
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
