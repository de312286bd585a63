//! Linear geostrophic balance: the discrete steady state is kept to round-off.
//!
//! `cargo run --release --example geostrophic_balance -- 2000`

use dgswe::build_mesh;
use dgswe::diagnostics::l2_error;
use dgswe::swe::{FluxConfig, ShallowWater};
use dgswe::testcases::{self, linear_geostrophic};
use dgswe::timestepping::{integrate, TimeControls};

fn main() -> dgswe::Result<()> {
    let steps: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1000);
    let mesh = build_mesh(5, 3, linear_geostrophic::RADIUS)?;
    let setup = testcases::init_linear_geostrophic(&mesh)?;
    for (label, flux) in [("conserving", FluxConfig::conserving()), ("dissipative", FluxConfig::dissipative())] {
        let model = ShallowWater::new(&mesh, setup.phys.clone(), flux)?;
        let dt = dgswe::timestepping::adaptive_dt(&model, &setup.state, &TimeControls::adaptive(0.8, 1.0))?;
        let out = integrate(&model, setup.state.clone(), &TimeControls::fixed(dt, steps as f64 * dt), &mut [])?;
        let err = l2_error(&out.state, &setup.state, &mesh)?;
        println!("{label:>11}: {} steps of {dt:.4e}, relative deviation D {:.2e}, u {:.2e}", out.steps, err.d, err.u);
    }
    Ok(())
}
