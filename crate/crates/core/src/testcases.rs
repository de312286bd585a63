//! Initial conditions for the standard experiments.
//!
//! Latitude `θ` and longitude `λ` follow the usual convention (`θ = ±π/2` at
//! the poles) in every case. Zonal and meridional components are turned into
//! Cartesian tangent vectors with the local east/north unit vectors.
//!
//! Constants follow the standard definitions of
//! Williamson et al. (1992) and Galewsky et al. (2004):
//!
//! * TC2 depth uses the rotation rate `Ω = 7.292e-5` in
//!   `gD = gD0 − (aΩu0 + ½u0²) sin²θ`, the exact steady solution.
//! * TC5 mountain centre `(λc, θc) = (−π/2, π/6)`.
//! * TC6 Rossby–Haurwitz wave with `R = 4`, `ω = K = 7.848e-6 s⁻¹`,
//!   `h0 = 8000 m`.
//! * Galewsky perturbation
//!   `120 cosθ exp(−(3λ)²) exp(−(15(π/4 − θ))²)` m.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::geometry::{Mesh, Vec3};
use crate::operators::{d_curl_scalar, project_scalar, project_vector};
use crate::quadrature::{integrate_adaptive, integrate_adaptive_abs};
use crate::swe::{PhysConfig, State};

pub const EARTH_RADIUS: f64 = 6.37122e6;
pub const GRAVITY: f64 = 9.80616;
/// Earth's rotation rate (1/s); the Coriolis parameter is `2Ω sinθ`.
pub const OMEGA: f64 = 7.292e-5;
pub const DAY: f64 = 86_400.0;

pub mod linear_geostrophic {
    pub const RADIUS: f64 = 1.0;
    pub const CORIOLIS: f64 = 8.0;
    pub const GRAVITY: f64 = 8.0;
    pub const MEAN_DEPTH: f64 = 0.2;
    pub const PSI_AMPLITUDE: f64 = 0.1;
}

pub mod williamson2 {
    pub const U0: f64 = 38.61068;
    /// `gD0` (m²/s²).
    pub const GEOPOTENTIAL0: f64 = 2.94e4;
}

pub mod williamson5 {
    use std::f64::consts::{FRAC_PI_2, PI};
    pub const U0: f64 = 20.0;
    pub const D0: f64 = 5960.0;
    pub const MOUNTAIN_HEIGHT: f64 = 2000.0;
    pub const MOUNTAIN_RADIUS: f64 = PI / 9.0;
    pub const LON_C: f64 = -FRAC_PI_2;
    pub const LAT_C: f64 = PI / 6.0;
}

pub mod williamson6 {
    pub const WAVENUMBER: u32 = 4;
    pub const OMEGA_RH: f64 = 7.848e-6;
    pub const K: f64 = 7.848e-6;
    pub const H0: f64 = 8000.0;
}

pub mod galewsky {
    use std::f64::consts::{FRAC_PI_2, PI};
    pub const U0: f64 = 80.0;
    pub const D0: f64 = 1.0e4;
    pub const THETA0: f64 = PI / 7.0;
    pub const THETA1: f64 = FRAC_PI_2 - THETA0;
    pub const HILL_HEIGHT: f64 = 120.0;
    pub const HILL_ALPHA: f64 = 1.0 / 3.0;
    pub const HILL_BETA: f64 = 1.0 / 15.0;
    pub const HILL_LAT: f64 = PI / 4.0;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TestCase {
    LinearGeostrophic,
    Williamson2,
    Williamson5,
    Williamson6,
    Galewsky,
}

impl TestCase {
    pub const ALL: [TestCase; 5] = [
        TestCase::LinearGeostrophic,
        TestCase::Williamson2,
        TestCase::Williamson5,
        TestCase::Williamson6,
        TestCase::Galewsky,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TestCase::LinearGeostrophic => "linear-geostrophic",
            TestCase::Williamson2 => "tc2",
            TestCase::Williamson5 => "tc5",
            TestCase::Williamson6 => "tc6",
            TestCase::Galewsky => "galewsky",
        }
    }

    pub fn radius(self) -> f64 {
        match self {
            TestCase::LinearGeostrophic => linear_geostrophic::RADIUS,
            _ => EARTH_RADIUS,
        }
    }

    /// Default simulated duration (s, or model time units for the
    /// nondimensional linear case).
    pub fn default_t_end(self) -> f64 {
        match self {
            TestCase::LinearGeostrophic => 100.0,
            TestCase::Williamson2 => 5.0 * DAY,
            TestCase::Williamson5 => 15.0 * DAY,
            TestCase::Williamson6 => 14.0 * DAY,
            TestCase::Galewsky => 7.0 * DAY,
        }
    }

    /// Default `(n, m)`.
    pub fn default_resolution(self) -> (usize, usize) {
        match self {
            TestCase::LinearGeostrophic => (5, 3),
            TestCase::Williamson2 => (5, 3),
            TestCase::Williamson5 | TestCase::Williamson6 => (16, 3),
            TestCase::Galewsky => (5, 3),
        }
    }

    pub fn is_linear(self) -> bool {
        self == TestCase::LinearGeostrophic
    }
}

impl fmt::Display for TestCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TestCase {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase();
        let alias = match key.as_str() {
            "williamson2" => "tc2",
            "williamson5" => "tc5",
            "williamson6" | "rossby-haurwitz" => "tc6",
            "linear" | "geostrophic" => "linear-geostrophic",
            other => other,
        };
        TestCase::ALL
            .into_iter()
            .find(|c| c.name() == alias)
            .ok_or_else(|| Error::UnknownTestCase(s.to_string()))
    }
}

/// Initial state and physics for one experiment.
#[derive(Clone, Debug)]
pub struct Setup {
    pub state: State,
    pub phys: PhysConfig,
}

/// `(λ, θ)` of a point.
pub fn lon_lat(x: &Vec3) -> (f64, f64) {
    let r = x.norm();
    (x[1].atan2(x[0]), (x[2] / r).clamp(-1.0, 1.0).asin())
}

/// Local east and north unit vectors; at the poles east is taken along `+y`.
pub fn east_north(x: &Vec3) -> (Vec3, Vec3) {
    let up = x.normalize();
    let z = Vec3::z();
    let e = z.cross(&up);
    let east = if e.norm() > 0.0 { e.normalize() } else { Vec3::y() };
    (east, up.cross(&east))
}

/// Tangent vector from zonal and meridional components at `x`.
pub fn from_components(x: &Vec3, zonal: f64, meridional: f64) -> Vec3 {
    let (east, north) = east_north(x);
    east * zonal + north * meridional
}

fn coriolis(mesh: &Mesh) -> ScalarField {
    project_scalar(mesh, |x| 2.0 * OMEGA * lon_lat(x).1.sin())
}

fn wrap_angle(a: f64) -> f64 {
    (a + PI).rem_euclid(2.0 * PI) - PI
}

/// Stream function `0.1 cosλ cosθ = 0.1 x/a` of the linear balance test.
pub fn linear_geostrophic_psi(x: &Vec3) -> f64 {
    linear_geostrophic::PSI_AMPLITUDE * x[0] / x.norm()
}

/// `ψ^h = Π_S ψ`, `u = ∇_d × ψ^h k`, `D = −(f/g) ψ^h`, constant `f`, linear
/// mode with mean depth `H`.
pub fn init_linear_geostrophic(mesh: &Mesh) -> Result<Setup> {
    use linear_geostrophic::*;
    let psi = project_scalar(mesh, linear_geostrophic_psi);
    let u = d_curl_scalar(&psi, mesh)?;
    let d = psi.map(|p| -(CORIOLIS / GRAVITY) * p);
    let f = ScalarField::constant(mesh, CORIOLIS);
    Ok(Setup {
        state: State::new(u, d),
        phys: PhysConfig::linear(GRAVITY, f, MEAN_DEPTH),
    })
}

/// Depth of the steady zonal flow `u0 cosθ` with equatorial depth `d0`.
pub fn zonal_steady_depth(lat: f64, u0: f64, d0: f64, radius: f64) -> f64 {
    let s = lat.sin();
    d0 - (radius * OMEGA * u0 + 0.5 * u0 * u0) * s * s / GRAVITY
}

/// Solid-body zonal wind `u0 cosθ e_λ = (u0/a) ẑ × x`.
fn solid_body(x: &Vec3, u0: f64) -> Vec3 {
    Vec3::z().cross(x) * (u0 / x.norm())
}

pub fn init_williamson2(mesh: &Mesh) -> Result<Setup> {
    use williamson2::*;
    let a = mesh.radius();
    let d0 = GEOPOTENTIAL0 / GRAVITY;
    let u = project_vector(mesh, |x| solid_body(x, U0))?;
    let d = project_scalar(mesh, |x| zonal_steady_depth(lon_lat(x).1, U0, d0, a));
    Ok(Setup {
        state: State::new(u, d),
        phys: PhysConfig::nonlinear(GRAVITY, coriolis(mesh)),
    })
}

/// Conical mountain `b0 (1 − r/R)` for `r < R`.
pub fn williamson5_mountain(x: &Vec3) -> f64 {
    use williamson5::*;
    let (lon, lat) = lon_lat(x);
    let dl = wrap_angle(lon - LON_C);
    let r = (dl * dl + (lat - LAT_C) * (lat - LAT_C)).sqrt();
    if r < MOUNTAIN_RADIUS {
        MOUNTAIN_HEIGHT * (1.0 - r / MOUNTAIN_RADIUS)
    } else {
        0.0
    }
}

/// TC2-type balanced flow with the mountain subtracted from the free surface.
pub fn init_williamson5(mesh: &Mesh) -> Result<Setup> {
    use williamson5::*;
    let a = mesh.radius();
    let b = project_scalar(mesh, williamson5_mountain);
    let u = project_vector(mesh, |x| solid_body(x, U0))?;
    let d = project_scalar(mesh, |x| zonal_steady_depth(lon_lat(x).1, U0, D0, a) - williamson5_mountain(x));
    Ok(Setup {
        state: State::new(u, d),
        phys: PhysConfig::nonlinear(GRAVITY, coriolis(mesh)).with_topography(b),
    })
}

/// Zonal and meridional Rossby–Haurwitz wind at `(λ, θ)`.
pub fn rossby_haurwitz_wind(lon: f64, lat: f64, radius: f64) -> (f64, f64) {
    use williamson6::*;
    let r = WAVENUMBER as i32;
    let rf = r as f64;
    let c = lat.cos();
    let s = lat.sin();
    let cr1 = c.powi(r - 1);
    let u = radius * OMEGA_RH * c + radius * K * cr1 * (rf * s * s - c * c) * (rf * lon).cos();
    let v = -radius * K * rf * cr1 * s * (rf * lon).sin();
    (u, v)
}

/// Balanced Rossby–Haurwitz depth `h0 + (a²/g)(A + B cos Rλ + C cos 2Rλ)`.
pub fn rossby_haurwitz_depth(lon: f64, lat: f64, radius: f64) -> f64 {
    let (a, b, c) = rossby_haurwitz_abc(lat);
    let rf = williamson6::WAVENUMBER as f64;
    williamson6::H0 + radius * radius / GRAVITY * (a + b * (rf * lon).cos() + c * (2.0 * rf * lon).cos())
}

/// The latitude profiles `A, B, C` of the Rossby–Haurwitz depth.
pub fn rossby_haurwitz_abc(lat: f64) -> (f64, f64, f64) {
    use williamson6::*;
    let r = WAVENUMBER as i32;
    let rf = r as f64;
    let w = OMEGA_RH;
    let c = lat.cos();
    let c2 = c * c;
    let c2r = c.powi(2 * r);
    let a = 0.5 * w * (2.0 * OMEGA + w) * c2
        + 0.25 * K * K * (c2r * ((rf + 1.0) * c2 + (2.0 * rf * rf - rf - 2.0)) - 2.0 * rf * rf * c.powi(2 * r - 2));
    let b = 2.0 * (OMEGA + w) * K / ((rf + 1.0) * (rf + 2.0)) * c.powi(r) * ((rf * rf + 2.0 * rf + 2.0) - (rf + 1.0).powi(2) * c2);
    let cc = 0.25 * K * K * c2r * ((rf + 1.0) * c2 - (rf + 2.0));
    (a, b, cc)
}

/// Angular phase speed (rad/s) of the Rossby–Haurwitz pattern in the
/// nondivergent barotropic vorticity equation:
/// `(R(3+R)ω − 2Ω) / ((1+R)(2+R))`.
pub fn rossby_haurwitz_angular_speed() -> f64 {
    use williamson6::*;
    let rf = WAVENUMBER as f64;
    (rf * (3.0 + rf) * OMEGA_RH - 2.0 * OMEGA) / ((1.0 + rf) * (2.0 + rf))
}

/// Phase of `⟨D, e^{−iRλ}⟩`; a pattern `cos R(λ − νt)` gives `−Rνt`.
pub fn rossby_haurwitz_phase(d: &ScalarField, mesh: &Mesh) -> f64 {
    let rf = williamson6::WAVENUMBER as f64;
    let (mut re, mut im) = (0.0, 0.0);
    for e in 0..mesh.num_elements() {
        for k in 0..mesh.nodes_per_element() {
            let (lon, _) = lon_lat(&mesh.node(e, k).x);
            let w = mesh.mass(e, k) * d.get(e, k);
            re += w * (rf * lon).cos();
            im -= w * (rf * lon).sin();
        }
    }
    im.atan2(re)
}

pub fn init_williamson6(mesh: &Mesh) -> Result<Setup> {
    let a = mesh.radius();
    let u = project_vector(mesh, |x| {
        let (lon, lat) = lon_lat(x);
        let (zu, mv) = rossby_haurwitz_wind(lon, lat, a);
        from_components(x, zu, mv)
    })?;
    let d = project_scalar(mesh, |x| {
        let (lon, lat) = lon_lat(x);
        rossby_haurwitz_depth(lon, lat, a)
    });
    Ok(Setup {
        state: State::new(u, d),
        phys: PhysConfig::nonlinear(GRAVITY, coriolis(mesh)),
    })
}

/// Galewsky jet profile `u(θ)`.
pub fn galewsky_wind(lat: f64) -> f64 {
    use galewsky::*;
    if lat <= THETA0 || lat >= THETA1 {
        return 0.0;
    }
    let en = (-4.0 / ((THETA1 - THETA0) * (THETA1 - THETA0))).exp();
    U0 / en * (1.0 / ((lat - THETA0) * (lat - THETA1))).exp()
}

/// Integrand `u (f + u tanθ / a)` of the balanced Galewsky depth.
fn galewsky_integrand(lat: f64, radius: f64) -> f64 {
    let u = galewsky_wind(lat);
    if u == 0.0 {
        return 0.0;
    }
    u * (2.0 * OMEGA * lat.sin() + lat.tan() / radius * u)
}

/// Balanced depth `D0 − (a/g) ∫_{−π/2}^{θ} u (f + u tanθ'/a) dθ'` at each of
/// the given latitudes, integrated cumulatively between sorted latitudes.
pub fn galewsky_depths(lats: &[f64], radius: f64) -> Result<Vec<f64>> {
    const REL_TOL: f64 = 1e-13;
    let mut order: Vec<usize> = (0..lats.len()).collect();
    order.sort_by(|&i, &j| lats[i].total_cmp(&lats[j]));
    let mut out = vec![0.0; lats.len()];
    let mut acc = 0.0;
    let mut prev = -FRAC_PI_2;
    let jet = integrate_adaptive(|t| galewsky_integrand(t, radius).abs(), galewsky::THETA0, galewsky::THETA1, REL_TOL)?;
    let abs_tol = REL_TOL * jet;
    for i in order {
        let lat = lats[i];
        if lat > prev {
            let lo = prev.clamp(galewsky::THETA0, galewsky::THETA1);
            let hi = lat.clamp(galewsky::THETA0, galewsky::THETA1);
            if hi > lo {
                acc += integrate_adaptive_abs(|t| galewsky_integrand(t, radius), lo, hi, abs_tol * (hi - lo) / (galewsky::THETA1 - galewsky::THETA0))?;
            }
            prev = lat;
        }
        out[i] = galewsky::D0 - radius / GRAVITY * acc;
    }
    Ok(out)
}

/// Gaussian depth perturbation that triggers the barotropic instability.
pub fn galewsky_perturbation(lon: f64, lat: f64) -> f64 {
    use galewsky::*;
    let lon = wrap_angle(lon);
    HILL_HEIGHT * lat.cos() * (-(lon / HILL_ALPHA).powi(2)).exp() * (-((HILL_LAT - lat) / HILL_BETA).powi(2)).exp()
}

pub fn init_galewsky(mesh: &Mesh, perturbed: bool) -> Result<Setup> {
    let a = mesh.radius();
    let u = project_vector(mesh, |x| {
        let (_, lat) = lon_lat(x);
        from_components(x, galewsky_wind(lat), 0.0)
    })?;
    let lats: Vec<f64> = (0..mesh.num_elements())
        .flat_map(|e| (0..mesh.nodes_per_element()).map(move |k| (e, k)))
        .map(|(e, k)| lon_lat(&mesh.node(e, k).x).1)
        .collect();
    let depths = galewsky_depths(&lats, a)?;
    let mut d = ScalarField::from_values(mesh, depths)?;
    if perturbed {
        let npe = mesh.nodes_per_element();
        for (idx, v) in d.values_mut().iter_mut().enumerate() {
            let (lon, lat) = lon_lat(&mesh.node(idx / npe, idx % npe).x);
            *v += galewsky_perturbation(lon, lat);
        }
    }
    Ok(Setup {
        state: State::new(u, d),
        phys: PhysConfig::nonlinear(GRAVITY, coriolis(mesh)),
    })
}

/// Initial condition of `case` on `mesh`. `perturbed` only affects Galewsky.
pub fn initialize(case: TestCase, mesh: &Mesh, perturbed: bool) -> Result<Setup> {
    match case {
        TestCase::LinearGeostrophic => init_linear_geostrophic(mesh),
        TestCase::Williamson2 => init_williamson2(mesh),
        TestCase::Williamson5 => init_williamson5(mesh),
        TestCase::Williamson6 => init_williamson6(mesh),
        TestCase::Galewsky => init_galewsky(mesh, perturbed),
    }
}

/// Exact solution at time `t` where one is known: the steady TC2 flow and
/// the discrete geostrophic state. Other cases return `None`.
pub fn reference_solution(case: TestCase, mesh: &Mesh, _t: f64) -> Result<Option<State>> {
    match case {
        TestCase::LinearGeostrophic | TestCase::Williamson2 => Ok(Some(initialize(case, mesh, false)?.state)),
        _ => Ok(None),
    }
}

/// [`reference_solution`] looked up by name.
pub fn reference_solution_by_name(name: &str, mesh: &Mesh, t: f64) -> Result<Option<State>> {
    reference_solution(name.parse()?, mesh, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_mesh;
    use crate::swe::entropy_hessian_eigs;

    #[test]
    fn names_round_trip() {
        for c in TestCase::ALL {
            assert_eq!(c.name().parse::<TestCase>().unwrap(), c);
        }
        assert!(matches!("tc9".parse::<TestCase>(), Err(Error::UnknownTestCase(_))));
    }

    #[test]
    fn williamson2_equator_and_pole() {
        let a = EARTH_RADIUS;
        let d0 = williamson2::GEOPOTENTIAL0 / GRAVITY;
        assert_eq!(zonal_steady_depth(0.0, williamson2::U0, d0, a), d0);
        let pole = d0 - (a * OMEGA * williamson2::U0 + 0.5 * williamson2::U0.powi(2)) / GRAVITY;
        assert!((zonal_steady_depth(FRAC_PI_2, williamson2::U0, d0, a) - pole).abs() < 1e-9);
        let eq = Vec3::new(0.0, a, 0.0);
        assert!((solid_body(&eq, williamson2::U0).norm() - williamson2::U0).abs() < 1e-12);
        assert_eq!(solid_body(&Vec3::new(0.0, 0.0, a), 1.0).norm(), 0.0);
    }

    #[test]
    fn williamson2_state_is_subcritical_and_tangent() {
        let mesh = build_mesh(3, 3, EARTH_RADIUS).unwrap();
        let s = init_williamson2(&mesh).unwrap();
        assert!(s.state.u.max_normal_component(&mesh) < 1e-12);
        for (u, d) in s.state.u.values().iter().zip(s.state.d.values()) {
            let (eigs, sub) = entropy_hessian_eigs(&(u / williamson2::U0), d * GRAVITY / williamson2::GEOPOTENTIAL0, 1.0);
            assert!(sub && eigs[0] > 0.0);
        }
    }

    #[test]
    fn mountain_shape() {
        let a = EARTH_RADIUS;
        let peak = Vec3::new(
            a * williamson5::LAT_C.cos() * williamson5::LON_C.cos(),
            a * williamson5::LAT_C.cos() * williamson5::LON_C.sin(),
            a * williamson5::LAT_C.sin(),
        );
        assert!((williamson5_mountain(&peak) - 2000.0).abs() < 1e-9);
        assert_eq!(williamson5_mountain(&Vec3::new(a, 0.0, 0.0)), 0.0);
        assert_eq!(zonal_steady_depth(0.0, williamson5::U0, williamson5::D0, a), 5960.0);
    }

    #[test]
    fn galewsky_profile() {
        use galewsky::*;
        assert_eq!(galewsky_wind(0.1), 0.0);
        let mid = 0.5 * (THETA0 + THETA1);
        assert!((galewsky_wind(mid) - U0).abs() < 1e-12);
        let d = galewsky_depths(&[-1.0, 0.0, THETA0, mid, 1.3, THETA0], EARTH_RADIUS).unwrap();
        assert_eq!(&d[..3], &[D0, D0, D0]);
        assert_eq!(d[5], D0);
        assert!(d[3] < D0 && d[4] < d[3]);
    }

    #[test]
    fn rossby_haurwitz_symmetry() {
        let a = EARTH_RADIUS;
        for lat in [-1.2, -0.3, 0.0, 0.7, 1.4] {
            for lon in [0.0, 0.4, 2.0] {
                let d1 = rossby_haurwitz_depth(lon, lat, a);
                let d2 = rossby_haurwitz_depth(lon + FRAC_PI_2, lat, a);
                assert!((d1 - d2).abs() < 1e-9 * d1);
            }
        }
        let nu = rossby_haurwitz_angular_speed();
        assert!((nu - 2.4635e-6).abs() < 1e-9);
    }

    #[test]
    fn linear_state_ratio() {
        let mesh = build_mesh(2, 3, 1.0).unwrap();
        let s = init_linear_geostrophic(&mesh).unwrap();
        let psi = project_scalar(&mesh, linear_geostrophic_psi);
        for (d, p) in s.state.d.values().iter().zip(psi.values()) {
            assert_eq!(*d, -*p);
        }
    }
}
