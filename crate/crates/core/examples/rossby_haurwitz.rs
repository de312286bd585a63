//! Rossby-Haurwitz wave (Williamson 6): measured westward-eastward pattern
//! speed against the analytic angular velocity.
//!
//! `cargo run --release --example rossby_haurwitz -- 8 4`

use dgswe::build_mesh;
use dgswe::swe::{FluxConfig, ShallowWater, State};
use dgswe::testcases::{self, williamson6, DAY, EARTH_RADIUS};
use dgswe::timestepping::{integrate, Cadence, TimeControls};
use std::f64::consts::PI;

fn main() -> dgswe::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(8);
    let days: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(4.0);
    let mesh = build_mesh(n, 3, EARTH_RADIUS)?;
    let setup = testcases::init_williamson6(&mesh)?;
    let model = ShallowWater::new(&mesh, setup.phys, FluxConfig::dissipative())?;

    let mut last: Option<(f64, f64)> = None;
    let mut unwrapped = 0.0;
    let mut obs = |t: f64, _: usize, s: &State| {
        let p = testcases::rossby_haurwitz_phase(&s.d, &mesh);
        if let Some((_, q)) = last {
            unwrapped += (p - q + PI).rem_euclid(2.0 * PI) - PI;
        }
        last = Some((t, p));
        Ok(())
    };
    let controls = TimeControls::adaptive(0.8, days * DAY).with_cadence(Cadence::Steps(1));
    let out = integrate(&model, setup.state, &controls, &mut [&mut obs])?;

    let measured = -unwrapped / (williamson6::WAVENUMBER as f64 * out.t);
    let analytic = testcases::rossby_haurwitz_angular_speed();
    println!("6x{n}x{n}, {} steps to day {days}", out.steps);
    println!("pattern angular speed {measured:.5e} rad/s, analytic {analytic:.5e} rad/s");
    println!("ratio {:.4}", measured / analytic);
    Ok(())
}
