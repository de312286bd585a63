//! SSP-RK3 time integration with a CFL-adaptive or fixed step.

use crate::error::{Error, Result};
use crate::swe::{ShallowWater, State};

/// When observers are called during [`integrate`]. The initial and final
/// states are always observed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Cadence {
    /// Every `n` steps.
    Steps(usize),
    /// At multiples of this simulated interval (s). Steps are shortened to
    /// land on each observation time.
    Time(f64),
    /// Initial and final states only.
    Ends,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeControls {
    pub cfl: f64,
    /// When set, used for every step instead of the CFL rule.
    pub fixed_dt: Option<f64>,
    pub t_end: f64,
    pub cadence: Cadence,
}

impl TimeControls {
    pub fn adaptive(cfl: f64, t_end: f64) -> Self {
        TimeControls {
            cfl,
            fixed_dt: None,
            t_end,
            cadence: Cadence::Ends,
        }
    }

    pub fn fixed(dt: f64, t_end: f64) -> Self {
        TimeControls {
            cfl: 0.8,
            fixed_dt: Some(dt),
            t_end,
            cadence: Cadence::Ends,
        }
    }

    pub fn with_cadence(mut self, cadence: Cadence) -> Self {
        self.cadence = cadence;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidTimeControls(msg));
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return bad(format!("t_end must be finite and non-negative, got {}", self.t_end));
        }
        match self.fixed_dt {
            Some(dt) if !(dt > 0.0 && dt.is_finite()) => return bad(format!("fixed dt must be positive, got {dt}")),
            None if !(self.cfl > 0.0 && self.cfl.is_finite()) => return bad(format!("cfl must be positive, got {}", self.cfl)),
            _ => {}
        }
        match self.cadence {
            Cadence::Steps(0) => bad("observation cadence of zero steps".into()),
            Cadence::Time(dt) if !(dt > 0.0 && dt.is_finite()) => bad(format!("observation interval must be positive, got {dt}")),
            _ => Ok(()),
        }
    }
}

/// One Shu–Osher SSP-RK3 step:
///
/// ```text
/// y1 = y + dt L(y)
/// y2 = ¾ y + ¼ (y1 + dt L(y1))
/// y' = ⅓ y + ⅔ (y2 + dt L(y2))
/// ```
pub fn ssp_rk3_step(state: &State, dt: f64, mut rhs: impl FnMut(&State) -> Result<State>) -> Result<State> {
    let mut y1 = state.clone();
    y1.axpy(dt, &rhs(state)?);
    let mut s = y1.clone();
    s.axpy(dt, &rhs(&y1)?);
    let y2 = state.lin_comb(0.75, &s, 0.25);
    let mut s = y2.clone();
    s.axpy(dt, &rhs(&y2)?);
    Ok(state.lin_comb(1.0 / 3.0, &s, 2.0 / 3.0))
}

/// `dt = cfl·Δx / (c_max (2p + 1))`.
pub fn cfl_dt(cfl: f64, spacing: f64, c_max: f64, order: usize) -> Result<f64> {
    if !(c_max > 0.0) {
        return Err(Error::ZeroWaveSpeed);
    }
    Ok(cfl * spacing / (c_max * (2 * order + 1) as f64))
}

/// Step size for `state`: the fixed step when one is set, otherwise the CFL
/// rule with the mesh's element spacing and the current maximum wave speed.
pub fn adaptive_dt(model: &ShallowWater, state: &State, controls: &TimeControls) -> Result<f64> {
    if let Some(dt) = controls.fixed_dt {
        return Ok(dt);
    }
    cfl_dt(
        controls.cfl,
        model.mesh.element_spacing(),
        model.max_wave_speed(state),
        model.mesh.order(),
    )
}

/// Receives the state at observation times.
pub trait Observer {
    fn observe(&mut self, t: f64, step: usize, state: &State) -> Result<()>;
}

impl<F: FnMut(f64, usize, &State) -> Result<()>> Observer for F {
    fn observe(&mut self, t: f64, step: usize, state: &State) -> Result<()> {
        self(t, step, state)
    }
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub state: State,
    pub t: f64,
    pub steps: usize,
    pub observations: usize,
}

/// Relative slack under which a step is stretched to land on a target time.
const LANDING_TOL: f64 = 1e-9;

/// Advances `state` to `controls.t_end`. The final step is shortened to land
/// exactly on `t_end`. Errors raised by the right-hand side carry the time of
/// the step that failed.
pub fn integrate(
    model: &ShallowWater,
    state: State,
    controls: &TimeControls,
    observers: &mut [&mut dyn Observer],
) -> Result<RunOutcome> {
    controls.validate()?;
    state.check_mesh(model.mesh)?;
    let mut state = state;
    let mut t = 0.0;
    let mut steps = 0usize;
    let mut observations = 0usize;
    let mut next_obs = 1usize;

    let mut notify = |t: f64, steps: usize, state: &State, count: &mut usize| -> Result<()> {
        for o in observers.iter_mut() {
            o.observe(t, steps, state)?;
        }
        *count += 1;
        Ok(())
    };
    notify(t, steps, &state, &mut observations)?;

    while t < controls.t_end {
        let mut dt = adaptive_dt(model, &state, controls).map_err(|e| e.at_time(t))?;
        let mut target = controls.t_end;
        if let Cadence::Time(iv) = controls.cadence {
            target = target.min(next_obs as f64 * iv);
        }
        let remaining = target - t;
        if dt >= remaining * (1.0 - LANDING_TOL) {
            dt = remaining;
        }
        state = ssp_rk3_step(&state, dt, |s| model.rhs(s)).map_err(|e| e.at_time(t))?;
        steps += 1;
        t = if dt == remaining { target } else { t + dt };
        let done = t >= controls.t_end;
        let due = match controls.cadence {
            Cadence::Steps(n) => steps.is_multiple_of(n),
            Cadence::Time(iv) => {
                if t >= next_obs as f64 * iv {
                    next_obs += 1;
                    true
                } else {
                    false
                }
            }
            Cadence::Ends => false,
        };
        if due || done {
            notify(t, steps, &state, &mut observations)?;
        }
    }
    Ok(RunOutcome {
        state,
        t,
        steps,
        observations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{ScalarField, VectorField};
    use crate::geometry::build_mesh;
    use crate::swe::{FluxConfig, PhysConfig};

    #[test]
    fn zero_rhs_leaves_state_unchanged() {
        let mesh = build_mesh(1, 2, 1.0).unwrap();
        let s = State::new(VectorField::zeros(&mesh), ScalarField::constant(&mesh, 2.0));
        let z = State::zeros(&mesh);
        let out = ssp_rk3_step(&s, 0.3, |_| Ok(z.clone())).unwrap();
        assert_eq!(out, s);
    }

    #[test]
    fn scalar_step_is_cubic_taylor_polynomial() {
        let mesh = build_mesh(1, 1, 1.0).unwrap();
        let lambda = -1.7;
        let s = State::new(VectorField::zeros(&mesh), ScalarField::constant(&mesh, 1.0));
        for dt in [0.1, 0.37, 1.0] {
            let out = ssp_rk3_step(&s, dt, |y| {
                let mut r = y.clone();
                r.d.scale(lambda);
                Ok(r)
            })
            .unwrap();
            let z: f64 = lambda * dt;
            let taylor = 1.0 + z + z * z / 2.0 + z * z * z / 6.0;
            assert!((out.d.get(0, 0) - taylor).abs() < 1e-15);
        }
    }

    #[test]
    fn cfl_rule() {
        assert!((cfl_dt(0.8, 1.0, 10.0, 3).unwrap() - 0.8 / 70.0).abs() < 1e-18);
        assert!(matches!(cfl_dt(0.8, 1.0, 0.0, 3), Err(Error::ZeroWaveSpeed)));
        let a = 1.0e6;
        let m1 = build_mesh(2, 3, a).unwrap();
        let m2 = build_mesh(4, 3, a).unwrap();
        let dt1 = cfl_dt(0.8, m1.element_spacing(), 100.0, 3).unwrap();
        let dt2 = cfl_dt(0.8, m2.element_spacing(), 100.0, 3).unwrap();
        assert!(dt1 > 1.5 * dt2);
        assert!((m1.nominal_spacing() / m2.nominal_spacing() - 2.0).abs() < 1e-14);
        assert!(m2.element_spacing() < m2.nominal_spacing());
        let one = build_mesh(1, 2, a).unwrap();
        assert!((one.element_spacing() - a * (1.0f64 / 3.0).acos()).abs() < 1e-9 * a);
    }

    #[test]
    fn controls_validation() {
        assert!(TimeControls::adaptive(0.0, 1.0).validate().is_err());
        assert!(TimeControls::fixed(-1.0, 1.0).validate().is_err());
        assert!(TimeControls::adaptive(0.8, -1.0).validate().is_err());
        assert!(TimeControls::adaptive(0.8, 1.0).with_cadence(Cadence::Steps(0)).validate().is_err());
        assert!(TimeControls::fixed(0.1, 1.0).with_cadence(Cadence::Time(0.25)).validate().is_ok());
    }

    fn rest_model(mesh: &crate::geometry::Mesh) -> (ShallowWater<'_>, State) {
        let f = ScalarField::constant(mesh, 1e-4);
        let model = ShallowWater::new(mesh, PhysConfig::nonlinear(9.8, f), FluxConfig::dissipative()).unwrap();
        let s = State::new(VectorField::zeros(mesh), ScalarField::constant(mesh, 100.0));
        (model, s)
    }

    #[test]
    fn zero_horizon_observes_once() {
        let mesh = build_mesh(1, 2, 1.0e6).unwrap();
        let (model, s) = rest_model(&mesh);
        let mut seen = Vec::new();
        let mut obs = |t: f64, _: usize, _: &State| {
            seen.push(t);
            Ok(())
        };
        let out = integrate(&model, s.clone(), &TimeControls::adaptive(0.8, 0.0), &mut [&mut obs]).unwrap();
        assert_eq!(out.steps, 0);
        assert_eq!(out.state, s);
        assert_eq!(seen, vec![0.0]);
    }

    #[test]
    fn lands_on_end_and_observation_times() {
        let mesh = build_mesh(1, 2, 1.0e6).unwrap();
        let (model, s) = rest_model(&mesh);
        let mut seen = Vec::new();
        let mut obs = |t: f64, _: usize, _: &State| {
            seen.push(t);
            Ok(())
        };
        let controls = TimeControls::fixed(70.0, 1000.0).with_cadence(Cadence::Time(250.0));
        let out = integrate(&model, s, &controls, &mut [&mut obs]).unwrap();
        assert_eq!(out.t, 1000.0);
        assert_eq!(seen, vec![0.0, 250.0, 500.0, 750.0, 1000.0]);
    }

    #[test]
    fn rest_state_stays_at_rest() {
        let mesh = build_mesh(1, 3, 1.0e6).unwrap();
        let (model, s) = rest_model(&mesh);
        let controls = TimeControls::fixed(10.0, 10_000.0);
        let out = integrate(&model, s.clone(), &controls, &mut []).unwrap();
        assert_eq!(out.steps, 1000);
        assert!(out.state.u.max_norm() < 1e-9);
        assert!(out.state.d.lin_comb(1.0, &s.d, -1.0).max_abs() < 1e-9);
    }

    #[test]
    fn adaptive_rest_state_has_finite_step() {
        let mesh = build_mesh(1, 3, 1.0e6).unwrap();
        let (model, s) = rest_model(&mesh);
        let dt = adaptive_dt(&model, &s, &TimeControls::adaptive(0.8, 1.0)).unwrap();
        let expected = 0.8 * mesh.element_spacing() / ((9.8f64 * 100.0).sqrt() * 7.0);
        assert!((dt - expected).abs() < 1e-12 * expected);
    }

    #[test]
    fn depth_failure_carries_time() {
        let mesh = build_mesh(1, 2, 1.0e6).unwrap();
        let (model, mut s) = rest_model(&mesh);
        s.d.set(0, 0, -1.0);
        let err = integrate(&model, s, &TimeControls::fixed(1.0, 5.0), &mut []).unwrap_err();
        assert!(matches!(err, Error::NonPositiveDepth { time: Some(t), .. } if t == 0.0));
    }
}
