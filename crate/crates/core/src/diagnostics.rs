//! Conserved-quantity budgets, error norms and convergence orders.

use std::fmt::Write as _;

use crate::error::Result;
use crate::field::ScalarField;
use crate::geometry::Mesh;
use crate::operators::{inner_scalar, inner_vector, integral};
use crate::swe::{EquationMode, ShallowWater, State};
use crate::timestepping::Observer;

/// Global integrals at one time, with drifts relative to a reference record.
///
/// Mass and energy drifts are relative to their initial values. Total
/// absolute vorticity integrates to nearly zero on the sphere, so its drift
/// is normalised by the initial `⟨1, |ω|⟩` instead.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BudgetRecord {
    pub t: f64,
    /// `⟨1, D⟩`, or `⟨1, H + D⟩` in linear mode.
    pub mass: f64,
    /// `⟨1, ω⟩`.
    pub vorticity: f64,
    /// `⟨1, |ω|⟩`, the scale for the vorticity drift.
    pub abs_vorticity: f64,
    /// `½⟨Du, u⟩ + ½⟨gD, D⟩ + ⟨gD, b⟩` (`D → H` in the kinetic term in
    /// linear mode).
    pub energy: f64,
    /// `½⟨ω/D, ω⟩` with the total depth.
    pub enstrophy: f64,
    pub mass_drift: f64,
    pub vorticity_drift: f64,
    pub energy_drift: f64,
    pub enstrophy_drift: f64,
}

pub const CSV_HEADER: &str = "t,mass,vorticity,energy,enstrophy,mass_drift,vorticity_drift,energy_drift,enstrophy_drift";

impl BudgetRecord {
    /// Fills the drift fields against `reference`.
    pub fn relative_to(mut self, reference: &BudgetRecord) -> Self {
        let rel = |x: f64, x0: f64, scale: f64| if scale == 0.0 { x - x0 } else { (x - x0) / scale };
        self.mass_drift = rel(self.mass, reference.mass, reference.mass.abs());
        self.vorticity_drift = rel(self.vorticity, reference.vorticity, reference.abs_vorticity);
        self.energy_drift = rel(self.energy, reference.energy, reference.energy.abs());
        self.enstrophy_drift = rel(self.enstrophy, reference.enstrophy, reference.enstrophy.abs());
        self
    }

    pub fn csv_row(&self) -> String {
        let mut s = String::new();
        for (i, v) in [
            self.t,
            self.mass,
            self.vorticity,
            self.energy,
            self.enstrophy,
            self.mass_drift,
            self.vorticity_drift,
            self.energy_drift,
            self.enstrophy_drift,
        ]
        .iter()
        .enumerate()
        {
            if i > 0 {
                s.push(',');
            }
            write!(s, "{v:.16e}").expect("write to string");
        }
        s
    }

    pub fn is_finite(&self) -> bool {
        [self.mass, self.vorticity, self.energy, self.enstrophy].iter().all(|v| v.is_finite())
    }
}

/// Budgets of `state` at time `t`; drifts are zero.
pub fn budgets(model: &ShallowWater, state: &State, t: f64) -> Result<BudgetRecord> {
    let mesh = model.mesh;
    let g = model.phys.gravity;
    let omega = crate::swe::compute_vorticity(&state.u, &model.phys.coriolis, mesh)?;
    let (total_depth, kinetic) = match model.phys.mode {
        EquationMode::Nonlinear => {
            state.check_depth()?;
            (state.d.clone(), 0.5 * inner_vector(&state.u.zip_map(&state.d, |u, d| u * d), &state.u, mesh)?)
        }
        EquationMode::Linear { mean_depth } => (
            state.d.map(|d| mean_depth + d),
            0.5 * mean_depth * inner_vector(&state.u, &state.u, mesh)?,
        ),
    };
    let mut potential = 0.5 * g * inner_scalar(&state.d, &state.d, mesh)?;
    if let (EquationMode::Nonlinear, Some(b)) = (model.phys.mode, &model.phys.topography) {
        potential += g * inner_scalar(&state.d, b, mesh)?;
    }
    let q = omega.zip_map(&total_depth, |w, d| w / d);
    Ok(BudgetRecord {
        t,
        mass: integral(&total_depth, mesh)?,
        vorticity: integral(&omega, mesh)?,
        abs_vorticity: integral(&omega.map(f64::abs), mesh)?,
        energy: kinetic + potential,
        enstrophy: 0.5 * inner_scalar(&q, &omega, mesh)?,
        mass_drift: 0.0,
        vorticity_drift: 0.0,
        energy_drift: 0.0,
        enstrophy_drift: 0.0,
    })
}

/// Observer collecting a [`BudgetRecord`] at every observation, with drifts
/// relative to the first one.
pub struct BudgetLog<'a, 'm> {
    model: &'a ShallowWater<'m>,
    pub records: Vec<BudgetRecord>,
}

impl<'a, 'm> BudgetLog<'a, 'm> {
    pub fn new(model: &'a ShallowWater<'m>) -> Self {
        BudgetLog {
            model,
            records: Vec::new(),
        }
    }

    /// Largest `|drift|` over the log for each of mass, vorticity, energy.
    pub fn max_drifts(&self) -> (f64, f64, f64) {
        self.records.iter().fold((0.0, 0.0, 0.0), |(m, v, e), r| {
            (m.max(r.mass_drift.abs()), v.max(r.vorticity_drift.abs()), e.max(r.energy_drift.abs()))
        })
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from(CSV_HEADER);
        s.push('\n');
        for r in &self.records {
            s.push_str(&r.csv_row());
            s.push('\n');
        }
        s
    }
}

impl Observer for BudgetLog<'_, '_> {
    fn observe(&mut self, t: f64, _step: usize, state: &State) -> Result<()> {
        let rec = budgets(self.model, state, t)?;
        let rec = match self.records.first() {
            Some(first) => rec.relative_to(first),
            None => rec,
        };
        self.records.push(rec);
        Ok(())
    }
}

/// Normalised L² distance `√(⟨a − r, a − r⟩ / ⟨r, r⟩)` between scalar fields.
pub fn l2_error_scalar(a: &ScalarField, reference: &ScalarField, mesh: &Mesh) -> Result<f64> {
    let e = a.lin_comb(1.0, reference, -1.0);
    normalised(inner_scalar(&e, &e, mesh)?, inner_scalar(reference, reference, mesh)?)
}

pub fn l2_error_vector(a: &crate::field::VectorField, reference: &crate::field::VectorField, mesh: &Mesh) -> Result<f64> {
    let e = a.lin_comb(1.0, reference, -1.0);
    normalised(inner_vector(&e, &e, mesh)?, inner_vector(reference, reference, mesh)?)
}

fn normalised(err: f64, reference: f64) -> Result<f64> {
    Ok(if reference > 0.0 { (err / reference).sqrt() } else { err.sqrt() })
}

/// Normalised L² errors of depth and velocity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateError {
    pub d: f64,
    pub u: f64,
}

/// Normalised L² error of `state` against a reference state sampled on the
/// same nodes.
pub fn l2_error(state: &State, reference: &State, mesh: &Mesh) -> Result<StateError> {
    Ok(StateError {
        d: l2_error_scalar(&state.d, &reference.d, mesh)?,
        u: l2_error_vector(&state.u, &reference.u, mesh)?,
    })
}

/// Interval orders `log(e_k/e_{k+1}) / log(h_k/h_{k+1})` from `(h, e)` pairs.
pub fn convergence_order(series: &[(f64, f64)]) -> Vec<f64> {
    series
        .windows(2)
        .map(|w| (w[0].1 / w[1].1).ln() / (w[0].0 / w[1].0).ln())
        .collect()
}

/// Least-squares slope of `log e` against `log h`.
pub fn least_squares_order(series: &[(f64, f64)]) -> f64 {
    let n = series.len() as f64;
    let pts: Vec<(f64, f64)> = series.iter().map(|&(h, e)| (h.ln(), e.ln())).collect();
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::VectorField;
    use crate::geometry::build_mesh;
    use crate::swe::{FluxConfig, PhysConfig};

    #[test]
    fn resting_budgets() {
        let mesh = build_mesh(2, 3, 1.0).unwrap();
        let f = ScalarField::constant(&mesh, 0.0);
        let model = ShallowWater::new(&mesh, PhysConfig::nonlinear(9.0, f), FluxConfig::conserving()).unwrap();
        let d0 = 3.0;
        let s = State::new(VectorField::zeros(&mesh), ScalarField::constant(&mesh, d0));
        let r = budgets(&model, &s, 0.0).unwrap();
        let area = mesh.area();
        assert!((r.mass - d0 * area).abs() < 1e-13 * r.mass);
        assert!((r.energy - 0.5 * 9.0 * d0 * d0 * area).abs() < 1e-13 * r.energy);
        assert_eq!(r.vorticity, 0.0);
        let again = budgets(&model, &s, 0.0).unwrap().relative_to(&r);
        assert_eq!(again.mass_drift, 0.0);
        assert_eq!(again.energy_drift, 0.0);
        assert_eq!(again.vorticity_drift, 0.0);
    }

    #[test]
    fn csv_row_round_trips() {
        let r = BudgetRecord {
            t: 1.5,
            mass: 2.0 / 3.0,
            vorticity: -1e-20,
            abs_vorticity: 1.0,
            energy: 12.0,
            enstrophy: 0.1,
            mass_drift: 0.0,
            vorticity_drift: 0.0,
            energy_drift: -1e-9,
            enstrophy_drift: 0.0,
        };
        let row = r.csv_row();
        let vals: Vec<f64> = row.split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(vals.len(), CSV_HEADER.split(',').count());
        assert_eq!(vals[1], r.mass);
        assert_eq!(vals[7], r.energy_drift);
    }

    #[test]
    fn l2_examples() {
        let mesh = build_mesh(2, 3, 1.0).unwrap();
        let one = ScalarField::constant(&mesh, 1.0);
        assert_eq!(l2_error_scalar(&one, &one, &mesh).unwrap(), 0.0);
        let off = ScalarField::constant(&mesh, 1.0 + 1e-3);
        assert!((l2_error_scalar(&off, &one, &mesh).unwrap() - 1e-3).abs() < 1e-15);
    }

    #[test]
    fn orders_from_synthetic_series() {
        let series: Vec<(f64, f64)> = [1.0, 0.5, 0.25, 0.1].iter().map(|&h: &f64| (h, 2.0 * h.powf(3.4))).collect();
        for o in convergence_order(&series) {
            assert!((o - 3.4).abs() < 1e-12);
        }
        assert!((least_squares_order(&series) - 3.4).abs() < 1e-12);
        assert_eq!(convergence_order(&[(1.0, 0.1), (0.5, 0.1)]), vec![0.0]);
        assert!(convergence_order(&[(1.0, 0.1)]).is_empty());
    }
}
