use std::sync::OnceLock;

use dgswe::driver::{parse_config, FluxMode, RunManifest, StepControl};
use dgswe::operators::{integral, project_scalar};
use dgswe::swe::{
    compute_vorticity, energy_rate, entropy_hessian_eigs, rhs_nonlinear, AlphaMode, FluxConfig, PhysConfig, State,
};
use dgswe::testcases::TestCase;
use dgswe::timestepping::cfl_dt;
use dgswe::{build_mesh, Mesh, ScalarField, Vec3, VectorField};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn mesh() -> &'static Mesh {
    static MESH: OnceLock<Mesh> = OnceLock::new();
    MESH.get_or_init(|| build_mesh(2, 3, 1.0).unwrap())
}

fn coriolis(mesh: &Mesh) -> ScalarField {
    ScalarField::from_fn(mesh, |e, k| 2.0 * mesh.node(e, k).k[2])
}

/// Nodally random tangent velocity and depth in `[depth - 1, depth + 1]`.
fn random_state(mesh: &Mesh, seed: u64, speed: f64, depth: f64) -> State {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = VectorField::from_fn(mesh, |e, k| {
        let r = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        mesh.node(e, k).k.cross(&r) * speed
    });
    let d = ScalarField::from_fn(mesh, |_, _| depth + rng.gen_range(-1.0..1.0));
    State::new(u, d)
}

fn flux_strategy() -> impl Strategy<Value = FluxConfig> {
    prop_oneof![
        Just(FluxConfig::conserving()),
        Just(FluxConfig::dissipative()),
        (0.0..2.0f64).prop_map(|beta| FluxConfig { alpha: AlphaMode::Rusanov, beta }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn mass_is_conserved(seed in any::<u64>(), flux in flux_strategy()) {
        let mesh = mesh();
        let s = random_state(mesh, seed, 3.0, 10.0);
        let phys = PhysConfig::nonlinear(9.8, coriolis(mesh));
        let t = rhs_nonlinear(&s, &phys, &flux, mesh).unwrap();
        let scale = integral(&t.d.map(f64::abs), mesh).unwrap();
        prop_assert!(integral(&t.d, mesh).unwrap().abs() <= 1e-12 * scale);
    }

    #[test]
    fn total_vorticity_equals_total_coriolis(seed in any::<u64>()) {
        let mesh = mesh();
        let s = random_state(mesh, seed, 3.0, 10.0);
        let f = coriolis(mesh);
        let omega = compute_vorticity(&s.u, &f, mesh).unwrap();
        let rel = omega.lin_comb(1.0, &f, -1.0);
        let scale = integral(&rel.map(f64::abs), mesh).unwrap();
        prop_assert!(integral(&rel, mesh).unwrap().abs() <= 1e-12 * scale);
    }

    #[test]
    fn energy_never_grows_for_subcritical_states(seed in any::<u64>(), flux in flux_strategy()) {
        let mesh = mesh();
        let s = random_state(mesh, seed, 3.0, 10.0);
        let phys = PhysConfig::nonlinear(9.8, coriolis(mesh));
        let t = rhs_nonlinear(&s, &phys, &flux, mesh).unwrap();
        let rate = energy_rate(&s, &t, &phys, mesh).unwrap();
        let scale = 10.0 * 9.8 * mesh.area() * (t.d.max_abs() + t.u.max_norm());
        if flux == FluxConfig::conserving() {
            prop_assert!(rate.abs() <= 1e-12 * scale);
        } else {
            prop_assert!(rate <= 1e-12 * scale);
        }
    }

    #[test]
    fn lake_at_rest_stays_at_rest(level in 5.0..50.0f64, amp in 0.0..2.0f64, kx in 1.0..4.0f64) {
        let mesh = mesh();
        let b = project_scalar(mesh, |x| amp * (kx * x[0]).sin() * x[1]);
        let d = b.map(|b| level - b);
        let s = State::new(VectorField::zeros(mesh), d);
        let phys = PhysConfig::nonlinear(9.8, coriolis(mesh)).with_topography(b);
        let t = rhs_nonlinear(&s, &phys, &FluxConfig::dissipative(), mesh).unwrap();
        prop_assert!(t.u.max_norm() <= 1e-11 * 9.8 * level);
        prop_assert!(t.d.max_abs() <= 1e-11 * level);
    }

    #[test]
    fn hessian_positive_iff_subcritical(
        ux in -20.0..20.0f64, uy in -20.0..20.0f64, uz in -20.0..20.0f64,
        d in 0.1..50.0f64, g in 0.5..20.0f64,
    ) {
        let u = Vec3::new(ux, uy, uz);
        let (eig, sub) = entropy_hessian_eigs(&u, d, g);
        prop_assert!(eig.windows(2).all(|w| w[0] <= w[1]));
        prop_assert_eq!(sub, u.dot(&u) < g * d);
        if sub {
            prop_assert!(eig[0] > 0.0);
        } else {
            prop_assert!(eig[0] <= 0.0);
        }
    }

    #[test]
    fn cfl_step_scales(cfl in 0.01..2.0f64, dx in 1.0..1e6f64, c in 0.1..500.0f64, order in 1usize..8) {
        let dt = cfl_dt(cfl, dx, c, order).unwrap();
        prop_assert!(dt > 0.0);
        let dt2 = cfl_dt(2.0 * cfl, dx, 2.0 * c, order).unwrap();
        prop_assert!((dt2 - dt).abs() <= 1e-14 * dt);
        prop_assert!((c * (2 * order + 1) as f64 * dt / dx - cfl).abs() <= 1e-13 * cfl);
    }

    #[test]
    fn manifest_round_trips(
        case in prop_oneof![Just("tc2"), Just("tc5"), Just("tc6"), Just("galewsky"), Just("linear-geostrophic")],
        n in 1usize..40, order in 1usize..9, conserving in any::<bool>(),
        step in prop_oneof![(0.01..2.0f64).prop_map(StepControl::Cfl), (0.1..1e3f64).prop_map(StepControl::Fixed)],
        t_end in 0.0..1e7f64, linear in any::<bool>(), perturbed in any::<bool>(), seed in any::<u64>(),
    ) {
        let m = RunManifest {
            testcase: case.parse::<TestCase>().unwrap(),
            n,
            order,
            flux: if conserving { FluxMode::Conserving } else { FluxMode::Dissipative },
            step,
            t_end,
            out: "runs/x".into(),
            snapshot_every: Some(3600.0),
            budget_every: 600.0,
            linear,
            perturbed,
            seed,
        };
        prop_assert_eq!(parse_config(Some(&m.to_text()), &[]).unwrap(), m);
    }
}
