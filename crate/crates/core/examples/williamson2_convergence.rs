//! Steady zonal flow (Williamson 2): spatial convergence with both fluxes.
//! Tables and per-run artifacts go under the system temp directory.
//!
//! `cargo run --release --example williamson2_convergence -- 1`

use dgswe::driver::{convergence_harness, parse_config};

fn main() -> dgswe::Result<()> {
    let days = std::env::args().nth(1).unwrap_or_else(|| "1".into());
    for flux in ["conserving", "dissipative"] {
        let out = std::env::temp_dir().join(format!("dgswe-tc2-{flux}"));
        let text = format!("testcase = tc2\norder = 3\nflux = {flux}\ndays = {days}\nout = {}\n", out.display());
        let manifest = parse_config(Some(&text), &[])?;
        let table = convergence_harness(&manifest, &[3, 5, 8])?;
        println!("{flux} flux, {days} day(s):");
        print!("{}", table.to_text());
        println!("written to {}\n", out.display());
    }
    Ok(())
}
