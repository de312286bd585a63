//! Zonal flow over an isolated mountain (Williamson 5).
//!
//! `cargo run --release --example williamson5_mountain -- 8 5`

use dgswe::build_mesh;
use dgswe::diagnostics::BudgetLog;
use dgswe::swe::{FluxConfig, ShallowWater};
use dgswe::testcases::{self, DAY, EARTH_RADIUS};
use dgswe::timestepping::{integrate, Cadence, TimeControls};

fn main() -> dgswe::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(6);
    let days: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(5.0);
    let mesh = build_mesh(n, 3, EARTH_RADIUS)?;
    let setup = testcases::init_williamson5(&mesh)?;
    let model = ShallowWater::new(&mesh, setup.phys, FluxConfig::dissipative())?;
    let mut log = BudgetLog::new(&model);
    let controls = TimeControls::adaptive(0.8, days * DAY).with_cadence(Cadence::Time(DAY));
    let out = integrate(&model, setup.state, &controls, &mut [&mut log])?;

    let b = model.phys.topography.as_ref().expect("mountain topography");
    let surface = out.state.d.lin_comb(1.0, b, 1.0);
    let (lo, hi) = surface
        .values()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    println!("6x{n}x{n}, order 3, {} steps to day {days}", out.steps);
    println!("surface height range [{lo:.1}, {hi:.1}] m");
    println!("{:>5} {:>12} {:>12}", "day", "mass drift", "energy drift");
    for r in &log.records {
        println!("{:>5.1} {:>12.3e} {:>12.3e}", r.t / DAY, r.mass_drift, r.energy_drift);
    }
    Ok(())
}
