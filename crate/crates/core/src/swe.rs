//! Semi-discrete rotating shallow water equations in vector-invariant form.
//!
//! The right-hand side is assembled in strong form on each element:
//!
//! ```text
//! u_t = −(ω k×u + ∇_d G + g∇_d b) − M⁻¹ ∮ (Ĝ − G) n
//! D_t = −∇_d·F − M⁻¹ ∮ (F̂ − F)·n
//! ```
//!
//! with `G = ½u·u + gD`, `F = Du` and the interface fluxes
//! `Ĝ = {{G}} + α[[F]]·n⁺`, `F̂·n⁺ = {{F}}·n⁺ + β[[G]]`. Both sides of an edge
//! evaluate the fluxes from the owner's point of view (owner normal, owner
//! edge scale, identical operand order), so `Ĝ` and `F̂·n` are bitwise
//! single-valued and mass and vorticity cancel pairwise.
//!
//! The linearised equations reuse the same assembly with `G = gD`, `F = Hu`
//! and the Coriolis parameter in place of the absolute vorticity.

use crate::error::{Error, Result};
use crate::field::{ScalarField, VectorField};
use crate::geometry::{side_node, Mesh, Vec3, SIDES_PER_ELEMENT};
use crate::operators::{curl_vec_element, div_element, grad_element};

/// Prognostic state: tangent velocity `u` (m/s) and depth `D` (m).
#[derive(Clone, Debug, PartialEq)]
pub struct State {
    pub u: VectorField,
    pub d: ScalarField,
}

impl State {
    pub fn new(u: VectorField, d: ScalarField) -> Self {
        State { u, d }
    }

    pub fn zeros(mesh: &Mesh) -> Self {
        State {
            u: VectorField::zeros(mesh),
            d: ScalarField::zeros(mesh),
        }
    }

    pub fn check_mesh(&self, mesh: &Mesh) -> Result<()> {
        self.u.check_mesh(mesh)?;
        self.d.check_mesh(mesh)
    }

    /// `self += a · other`.
    pub fn axpy(&mut self, a: f64, other: &State) {
        self.u.axpy(a, &other.u);
        self.d.axpy(a, &other.d);
    }

    /// `a · self + b · other`.
    pub fn lin_comb(&self, a: f64, other: &State, b: f64) -> State {
        State {
            u: self.u.lin_comb(a, &other.u, b),
            d: self.d.lin_comb(a, &other.d, b),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.d.is_finite()
    }

    /// Fails on the first node with `D ≤ 0` (or NaN).
    pub fn check_depth(&self) -> Result<()> {
        let npe = self.d.nodes_per_element();
        match self.d.values().iter().position(|&d| !(d > 0.0)) {
            None => Ok(()),
            Some(idx) => Err(Error::NonPositiveDepth {
                element: idx / npe,
                node: idx % npe,
                depth: self.d.values()[idx],
                time: None,
            }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EquationMode {
    Nonlinear,
    /// Linearised about a resting state of mean depth `mean_depth`; `D` is
    /// then the depth perturbation.
    Linear { mean_depth: f64 },
}

#[derive(Clone, Debug)]
pub struct PhysConfig {
    pub gravity: f64,
    /// Coriolis parameter at the nodes (1/s).
    pub coriolis: ScalarField,
    /// Bottom topography (m), entering only as the forcing `−g∇_d b`.
    pub topography: Option<ScalarField>,
    pub mode: EquationMode,
}

impl PhysConfig {
    pub fn nonlinear(gravity: f64, coriolis: ScalarField) -> Self {
        PhysConfig {
            gravity,
            coriolis,
            topography: None,
            mode: EquationMode::Nonlinear,
        }
    }

    pub fn linear(gravity: f64, coriolis: ScalarField, mean_depth: f64) -> Self {
        PhysConfig {
            gravity,
            coriolis,
            topography: None,
            mode: EquationMode::Linear { mean_depth },
        }
    }

    pub fn with_topography(mut self, b: ScalarField) -> Self {
        self.topography = Some(b);
        self
    }

    pub fn validate(&self, mesh: &Mesh) -> Result<()> {
        if !(self.gravity > 0.0 && self.gravity.is_finite()) {
            return Err(Error::Config(format!("gravity must be positive, got {}", self.gravity)));
        }
        if let EquationMode::Linear { mean_depth } = self.mode {
            if !(mean_depth > 0.0 && mean_depth.is_finite()) {
                return Err(Error::Config(format!("mean depth must be positive, got {mean_depth}")));
            }
        }
        self.coriolis.check_mesh(mesh)?;
        if let Some(b) = &self.topography {
            b.check_mesh(mesh)?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlphaMode {
    /// `α = 0`.
    Centered,
    /// `α = ½ max(c⁺/D⁺, c⁻/D⁻)`, `c = |u| + √(gD)`.
    Rusanov,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FluxConfig {
    pub alpha: AlphaMode,
    pub beta: f64,
}

impl FluxConfig {
    /// `α = β = 0`: semi-discretely energy conserving.
    pub fn conserving() -> Self {
        FluxConfig {
            alpha: AlphaMode::Centered,
            beta: 0.0,
        }
    }

    /// Rusanov-type `α`, `β = 0`: energy dissipating.
    pub fn dissipative() -> Self {
        FluxConfig {
            alpha: AlphaMode::Rusanov,
            beta: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(Error::Config(format!("beta must be non-negative, got {}", self.beta)));
        }
        Ok(())
    }
}

/// `G = ½u·u + gD` (nonlinear) or `gD` (linear).
pub fn potential_g(state: &State, cfg: &PhysConfig) -> ScalarField {
    let g = cfg.gravity;
    match cfg.mode {
        EquationMode::Nonlinear => state.d.zip_map(&state.u, |d, u| 0.5 * u.dot(&u) + g * d),
        EquationMode::Linear { .. } => state.d.map(|d| g * d),
    }
}

/// `F = Du` (nonlinear) or `Hu` (linear).
pub fn mass_flux_f(state: &State, cfg: &PhysConfig) -> VectorField {
    match cfg.mode {
        EquationMode::Nonlinear => state.u.zip_map(&state.d, |u, d| u * d),
        EquationMode::Linear { mean_depth } => state.u.map(|u| u * mean_depth),
    }
}

/// `c = |u| + √(gD)` at one node.
#[inline]
pub fn node_wave_speed(u: &Vec3, d: f64, g: f64) -> f64 {
    u.norm() + (g * d).sqrt()
}

/// Nodal wave speed: `|u| + √(gD)`, or `√(gH)` in linear mode.
pub fn wave_speed(state: &State, cfg: &PhysConfig) -> ScalarField {
    let g = cfg.gravity;
    match cfg.mode {
        EquationMode::Nonlinear => state.d.zip_map(&state.u, |d, u| node_wave_speed(&u, d, g)),
        EquationMode::Linear { mean_depth } => state.d.map(|_| (g * mean_depth).sqrt()),
    }
}

/// `Ĝ = {{G}} + α[[F]]·n⁺` from the owner (`+`) and neighbour (`−`) traces,
/// with `fn_plus = F⁺·n⁺`, `fn_minus = F⁻·n⁺`.
#[inline]
pub fn flux_ghat(g_plus: f64, g_minus: f64, fn_plus: f64, fn_minus: f64, alpha: f64) -> f64 {
    0.5 * (g_plus + g_minus) + alpha * (fn_plus - fn_minus)
}

/// `F̂·n⁺ = {{F}}·n⁺ + β[[G]]`.
#[inline]
pub fn flux_fhat_n(fn_plus: f64, fn_minus: f64, g_plus: f64, g_minus: f64, beta: f64) -> f64 {
    0.5 * (fn_plus + fn_minus) + beta * (g_plus - g_minus)
}

/// `α = ½ max(c⁺/D⁺, c⁻/D⁻)`.
pub fn alpha_rusanov(u_plus: &Vec3, d_plus: f64, u_minus: &Vec3, d_minus: f64, g: f64) -> Result<f64> {
    for d in [d_plus, d_minus] {
        if !(d > 0.0) {
            return Err(Error::NonPositiveDepth {
                element: usize::MAX,
                node: usize::MAX,
                depth: d,
                time: None,
            });
        }
    }
    let rp = node_wave_speed(u_plus, d_plus, g) / d_plus;
    let rm = node_wave_speed(u_minus, d_minus, g) / d_minus;
    Ok(0.5 * rp.max(rm))
}

/// Geometry of one element boundary node seen through its link's owner.
struct EdgeNode {
    k: usize,
    nb_element: usize,
    nb_k: usize,
    owner: bool,
    /// Owner's outward normal `n⁺` and tangent.
    normal: Vec3,
    tangent: Vec3,
    /// `w_t · scale` from the owner side.
    weight: f64,
}

impl EdgeNode {
    #[inline]
    fn new(mesh: &Mesh, e: usize, side: usize, t: usize) -> Self {
        let m = mesh.order();
        let link = mesh.link(e, side);
        let tn = link.neighbor_index(t, m);
        let owner = link.is_owner();
        let frame = if owner {
            mesh.frame(e, side, t)
        } else {
            mesh.frame(link.neighbor, link.neighbor_side, tn)
        };
        let w = mesh.rule().weights()[t];
        EdgeNode {
            k: side_node(side, t, m),
            nb_element: link.neighbor,
            nb_k: side_node(link.neighbor_side, tn, m),
            owner,
            normal: frame.normal,
            tangent: frame.tangent,
            weight: w * frame.scale,
        }
    }

    /// `+1` on the owner side, `−1` on the other.
    #[inline]
    fn sign(&self) -> f64 {
        if self.owner {
            1.0
        } else {
            -1.0
        }
    }

    /// Orders a (mine, neighbour) pair as (owner, other).
    #[inline]
    fn order<T>(&self, mine: T, nb: T) -> (T, T) {
        if self.owner {
            (mine, nb)
        } else {
            (nb, mine)
        }
    }
}

/// Discrete absolute vorticity
/// `ω = k·∇_d×u + f + M⁻¹ ∮ ({{u}} − u)·t`.
///
/// This is the collocated strong form of
/// `⟨φ, ω⟩ = ⟨∇_d×φk, u⟩ + ⟨φ, f⟩ + ⟨φ, {{u}}·t⟩_∂` for all `φ ∈ S`.
pub fn compute_vorticity(u: &VectorField, f: &ScalarField, mesh: &Mesh) -> Result<ScalarField> {
    u.check_mesh(mesh)?;
    f.check_mesh(mesh)?;
    let mut omega = ScalarField::zeros(mesh);
    let np = mesh.nodes_per_side();
    for (e, el) in mesh.elements().iter().enumerate() {
        let out = omega.element_mut(e);
        curl_vec_element(mesh.diff(), el, u.element(e), out);
        for (o, fv) in out.iter_mut().zip(f.element(e)) {
            *o += fv;
        }
        for side in 0..SIDES_PER_ELEMENT {
            for t in 0..np {
                let en = EdgeNode::new(mesh, e, side, t);
                let mine = u.get(e, en.k);
                let (up, um) = en.order(mine, u.get(en.nb_element, en.nb_k));
                let avg_t = (0.5 * (up + um)).dot(&en.tangent);
                let mine_t = mine.dot(&en.tangent);
                let lift = en.weight / mesh.mass(e, en.k);
                omega.element_mut(e)[en.k] += lift * en.sign() * (avg_t - mine_t);
            }
        }
    }
    Ok(omega)
}

/// Per-node flux ingredients shared by the nonlinear and linear modes.
struct Ingredients {
    g: ScalarField,
    f: VectorField,
    /// Absolute vorticity (nonlinear) or Coriolis parameter (linear).
    omega: ScalarField,
    /// `c/D` per node when the Rusanov `α` is in use.
    speed_ratio: Option<ScalarField>,
}

fn ingredients(state: &State, cfg: &PhysConfig, flux: &FluxConfig, mesh: &Mesh) -> Result<Ingredients> {
    state.check_mesh(mesh)?;
    cfg.validate(mesh)?;
    flux.validate()?;
    let g = cfg.gravity;
    let (omega, speed_ratio) = match cfg.mode {
        EquationMode::Nonlinear => {
            state.check_depth()?;
            let omega = compute_vorticity(&state.u, &cfg.coriolis, mesh)?;
            let ratio = (flux.alpha == AlphaMode::Rusanov)
                .then(|| state.d.zip_map(&state.u, |d, u| node_wave_speed(&u, d, g) / d));
            (omega, ratio)
        }
        EquationMode::Linear { mean_depth } => {
            let r = (g * mean_depth).sqrt() / mean_depth;
            let ratio = (flux.alpha == AlphaMode::Rusanov).then(|| state.d.map(|_| r));
            (cfg.coriolis.clone(), ratio)
        }
    };
    Ok(Ingredients {
        g: potential_g(state, cfg),
        f: mass_flux_f(state, cfg),
        omega,
        speed_ratio,
    })
}

#[inline]
fn edge_alpha(ing: &Ingredients, e: usize, en: &EdgeNode) -> f64 {
    match &ing.speed_ratio {
        None => 0.0,
        Some(r) => {
            let (rp, rm) = en.order(r.get(e, en.k), r.get(en.nb_element, en.nb_k));
            0.5 * rp.max(rm)
        }
    }
}

fn assemble(state: &State, cfg: &PhysConfig, flux: &FluxConfig, mesh: &Mesh, ing: &Ingredients) -> Result<State> {
    let mut tend = State::zeros(mesh);
    let npe = mesh.nodes_per_element();
    let np = mesh.nodes_per_side();
    let gravity = cfg.gravity;
    let mut grad_g = vec![Vec3::zeros(); npe];
    let mut grad_b = vec![Vec3::zeros(); npe];
    let mut div_f = vec![0.0; npe];

    for (e, el) in mesh.elements().iter().enumerate() {
        grad_element(mesh.diff(), el, ing.g.element(e), &mut grad_g);
        div_element(mesh.diff(), el, ing.f.element(e), &mut div_f);
        if let Some(b) = &cfg.topography {
            grad_element(mesh.diff(), el, b.element(e), &mut grad_b);
        }
        {
            let du = tend.u.element_mut(e);
            for k in 0..npe {
                let nm = &el.nodes[k];
                let u = state.u.get(e, k);
                let mut acc = nm.k.cross(&u) * ing.omega.get(e, k) + grad_g[k];
                if cfg.topography.is_some() {
                    acc += grad_b[k] * gravity;
                }
                du[k] = -acc;
            }
        }
        for (dd, dv) in tend.d.element_mut(e).iter_mut().zip(&div_f) {
            *dd = -dv;
        }

        for side in 0..SIDES_PER_ELEMENT {
            for t in 0..np {
                let en = EdgeNode::new(mesh, e, side, t);
                let g_mine = ing.g.get(e, en.k);
                let f_mine = ing.f.get(e, en.k);
                let (gp, gm) = en.order(g_mine, ing.g.get(en.nb_element, en.nb_k));
                let (fp, fm) = en.order(f_mine, ing.f.get(en.nb_element, en.nb_k));
                let fnp = fp.dot(&en.normal);
                let fnm = fm.dot(&en.normal);
                let alpha = edge_alpha(ing, e, &en);
                let ghat = flux_ghat(gp, gm, fnp, fnm, alpha);
                let fhat_np = flux_fhat_n(fnp, fnm, gp, gm, flux.beta);
                let fn_mine = if en.owner { fnp } else { fnm };
                let s = en.sign();
                let lift = en.weight / mesh.mass(e, en.k);
                tend.d.element_mut(e)[en.k] -= lift * s * (fhat_np - fn_mine);
                tend.u.element_mut(e)[en.k] -= en.normal * (lift * s * (ghat - g_mine));
            }
        }
    }
    Ok(tend)
}

/// Nonlinear tendencies `(u_t, D_t)`.
pub fn rhs_nonlinear(state: &State, cfg: &PhysConfig, flux: &FluxConfig, mesh: &Mesh) -> Result<State> {
    if cfg.mode != EquationMode::Nonlinear {
        return Err(Error::Config("rhs_nonlinear called with a linear configuration".into()));
    }
    let ing = ingredients(state, cfg, flux, mesh)?;
    assemble(state, cfg, flux, mesh, &ing)
}

/// Linearised tendencies:
/// `u_t = −(f k×u + g∇_d D) − M⁻¹∮ g(D̂ − D)n`,
/// `D_t = −H∇_d·u − M⁻¹∮ H(û − u)·n`.
pub fn rhs_linear(state: &State, cfg: &PhysConfig, flux: &FluxConfig, mesh: &Mesh) -> Result<State> {
    if !matches!(cfg.mode, EquationMode::Linear { .. }) {
        return Err(Error::Config("rhs_linear called with a nonlinear configuration".into()));
    }
    let ing = ingredients(state, cfg, flux, mesh)?;
    assemble(state, cfg, flux, mesh, &ing)
}

/// Right-hand side dispatching on the equation mode.
pub fn rhs(state: &State, cfg: &PhysConfig, flux: &FluxConfig, mesh: &Mesh) -> Result<State> {
    let ing = ingredients(state, cfg, flux, mesh)?;
    assemble(state, cfg, flux, mesh, &ing)
}

/// A mesh together with its physical and flux configuration.
#[derive(Clone, Debug)]
pub struct ShallowWater<'m> {
    pub mesh: &'m Mesh,
    pub phys: PhysConfig,
    pub flux: FluxConfig,
}

impl<'m> ShallowWater<'m> {
    pub fn new(mesh: &'m Mesh, phys: PhysConfig, flux: FluxConfig) -> Result<Self> {
        phys.validate(mesh)?;
        flux.validate()?;
        Ok(ShallowWater { mesh, phys, flux })
    }

    pub fn rhs(&self, state: &State) -> Result<State> {
        rhs(state, &self.phys, &self.flux, self.mesh)
    }

    pub fn vorticity(&self, state: &State) -> Result<ScalarField> {
        match self.phys.mode {
            EquationMode::Nonlinear => compute_vorticity(&state.u, &self.phys.coriolis, self.mesh),
            EquationMode::Linear { .. } => Ok(self.phys.coriolis.clone()),
        }
    }

    pub fn max_wave_speed(&self, state: &State) -> f64 {
        wave_speed(state, &self.phys).max_abs()
    }
}

/// Global energy rate `Σ_q ⟨F, u_t⟩ + ⟨G + gb, D_t⟩` for a given tendency.
pub fn energy_rate(state: &State, tend: &State, cfg: &PhysConfig, mesh: &Mesh) -> Result<f64> {
    let mut g = potential_g(state, cfg);
    if let (EquationMode::Nonlinear, Some(b)) = (cfg.mode, &cfg.topography) {
        g.axpy(cfg.gravity, b);
    }
    let f = mass_flux_f(state, cfg);
    Ok(crate::operators::inner_vector(&f, &tend.u, mesh)? + crate::operators::inner_scalar(&g, &tend.d, mesh)?)
}

/// Predicted energy rate `−Σ_edges ∮ α([[F]]·n⁺)² + β[[G]]²`, each edge
/// visited once from its owner side.
pub fn interface_dissipation(state: &State, cfg: &PhysConfig, flux: &FluxConfig, mesh: &Mesh) -> Result<f64> {
    let ing = ingredients(state, cfg, flux, mesh)?;
    let np = mesh.nodes_per_side();
    let mut total = 0.0;
    for e in 0..mesh.num_elements() {
        for side in 0..SIDES_PER_ELEMENT {
            if !mesh.link(e, side).is_owner() {
                continue;
            }
            for t in 0..np {
                let en = EdgeNode::new(mesh, e, side, t);
                let jf = (ing.f.get(e, en.k) - ing.f.get(en.nb_element, en.nb_k)).dot(&en.normal);
                let jg = ing.g.get(e, en.k) - ing.g.get(en.nb_element, en.nb_k);
                let alpha = edge_alpha(&ing, e, &en);
                total -= en.weight * (alpha * jf * jf + flux.beta * jg * jg);
            }
        }
    }
    Ok(total)
}

/// Eigenvalues of the energy Hessian with respect to `(u, v, w, D)`, in
/// ascending order, and whether the state is subcritical (`|u|² < gD`, all
/// eigenvalues positive).
pub fn entropy_hessian_eigs(u: &Vec3, d: f64, g: f64) -> ([f64; 4], bool) {
    let u2 = u.dot(u);
    let det = d * g - u2;
    let disc = ((d - g) * (d - g) + 4.0 * u2).sqrt();
    let big = 0.5 * ((d + g) + disc);
    let small = if big > 0.0 { det / big } else { 0.0 };
    let mut eig = [d, d, small, big];
    eig.sort_by(f64::total_cmp);
    (eig, u2 < g * d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_mesh;
    use crate::operators::{boundary_integral, element_inner_scalar, integral, project_scalar};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_state(mesh: &Mesh, rng: &mut impl Rng, depth: f64, speed: f64) -> State {
        let u = VectorField::from_fn(mesh, |e, k| {
            let nm = mesh.node(e, k);
            (nm.g1.normalize() * rng.gen_range(-1.0..1.0) + nm.g2.normalize() * rng.gen_range(-1.0..1.0)) * speed
        });
        let d = ScalarField::from_fn(mesh, |_, _| depth * rng.gen_range(0.5..1.5));
        State::new(u, d)
    }

    fn phys(mesh: &Mesh, g: f64) -> PhysConfig {
        PhysConfig::nonlinear(g, project_scalar(mesh, |x| 2.0 * x[2] / x.norm()))
    }

    #[test]
    fn pointwise_helpers() {
        assert_eq!(flux_ghat(2.0, 0.0, 3.0, 0.0, 0.5), 2.5);
        assert_eq!(flux_ghat(1.5, 1.5, 4.0, 4.0, 0.7), 1.5);
        assert_eq!(flux_ghat(2.0, 4.0, 1.0, 0.0, 0.0), 3.0);
        assert_eq!(flux_fhat_n(1.0, 3.0, 4.0, 0.0, 0.25), 3.0);
        assert_eq!(flux_fhat_n(2.0, 2.0, 1.0, 7.0, 0.0), 2.0);
        let z = Vec3::zeros();
        assert_eq!(alpha_rusanov(&z, 1.0, &z, 1.0, 1.0).unwrap(), 0.5);
        assert_eq!(alpha_rusanov(&z, 4.0, &z, 1.0, 1.0).unwrap(), 0.5);
        assert!(alpha_rusanov(&z, 0.0, &z, 1.0, 1.0).is_err());
        let u = Vec3::new(3.0, 4.0, 0.0);
        assert_eq!(node_wave_speed(&u, 10.0, 9.80616), 5.0 + 98.0616f64.sqrt());
    }

    #[test]
    fn potential_and_mass_flux() {
        let mesh = build_mesh(1, 2, 1.0).unwrap();
        let u = VectorField::from_fn(&mesh, |e, k| mesh.node(e, k).g1.normalize() * 2.0);
        let s = State::new(u.clone(), ScalarField::constant(&mesh, 1.0));
        let cfg = phys(&mesh, 10.0);
        for v in potential_g(&s, &cfg).values() {
            assert!((v - 12.0).abs() < 1e-13);
        }
        assert_eq!(mass_flux_f(&s, &cfg), u);
        let rest = State::new(VectorField::zeros(&mesh), ScalarField::constant(&mesh, 3.0));
        assert!(potential_g(&rest, &cfg).values().iter().all(|&v| v == 30.0));
        assert!(mass_flux_f(&rest, &cfg).max_norm() == 0.0);
    }

    #[test]
    fn rest_state_has_zero_tendency() {
        let mesh = build_mesh(2, 3, 1.0).unwrap();
        let cfg = phys(&mesh, 9.0);
        let s = State::new(VectorField::zeros(&mesh), ScalarField::constant(&mesh, 2.0));
        for flux in [FluxConfig::conserving(), FluxConfig::dissipative()] {
            let t = rhs_nonlinear(&s, &cfg, &flux, &mesh).unwrap();
            assert!(t.u.max_norm() < 1e-12 && t.d.max_abs() < 1e-12);
        }
    }

    #[test]
    fn zero_velocity_vorticity_is_coriolis() {
        let mesh = build_mesh(2, 3, 1.0).unwrap();
        let f = project_scalar(&mesh, |x| x[2]);
        let w = compute_vorticity(&VectorField::zeros(&mesh), &f, &mesh).unwrap();
        assert_eq!(w, f);
    }

    #[test]
    fn global_vorticity_equals_coriolis_integral() {
        let mesh = build_mesh(2, 3, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = random_state(&mesh, &mut rng, 1.0, 1.0);
        let f = ScalarField::zeros(&mesh);
        let w = compute_vorticity(&s.u, &f, &mesh).unwrap();
        let scale: f64 = w.values().iter().map(|v| v.abs()).sum::<f64>() / w.len() as f64 * mesh.area();
        assert!(integral(&w, &mesh).unwrap().abs() < 1e-13 * scale);
    }

    #[test]
    fn nonpositive_depth_is_flagged() {
        let mesh = build_mesh(1, 2, 1.0).unwrap();
        let cfg = phys(&mesh, 9.0);
        let mut d = ScalarField::constant(&mesh, 1.0);
        d.set(3, 4, -0.1);
        let s = State::new(VectorField::zeros(&mesh), d);
        let err = rhs_nonlinear(&s, &cfg, &FluxConfig::conserving(), &mesh).unwrap_err();
        assert!(matches!(err, Error::NonPositiveDepth { element: 3, node: 4, .. }));
    }

    #[test]
    fn local_mass_conservation_and_tangency() {
        let mesh = build_mesh(2, 3, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = random_state(&mesh, &mut rng, 10.0, 1.0);
        let cfg = phys(&mesh, 9.8);
        let np = mesh.nodes_per_side();
        for flux in [FluxConfig::conserving(), FluxConfig::dissipative(), FluxConfig { alpha: AlphaMode::Rusanov, beta: 0.3 }] {
            let t = rhs_nonlinear(&s, &cfg, &flux, &mesh).unwrap();
            let one = ScalarField::constant(&mesh, 1.0);
            let ing = ingredients(&s, &cfg, &flux, &mesh).unwrap();
            let mut global = 0.0;
            for e in 0..mesh.num_elements() {
                let mut fhat = vec![0.0; 4 * np];
                let mut scale_fix = vec![0.0; 4 * np];
                for side in 0..4 {
                    for tt in 0..np {
                        let en = EdgeNode::new(&mesh, e, side, tt);
                        let (gp, gm) = en.order(ing.g.get(e, en.k), ing.g.get(en.nb_element, en.nb_k));
                        let (fp, fm) = en.order(ing.f.get(e, en.k), ing.f.get(en.nb_element, en.nb_k));
                        fhat[side * np + tt] = en.sign() * flux_fhat_n(fp.dot(&en.normal), fm.dot(&en.normal), gp, gm, flux.beta);
                        scale_fix[side * np + tt] = en.weight / (mesh.rule().weights()[tt] * mesh.frame(e, side, tt).scale);
                    }
                }
                let weighted: Vec<f64> = fhat.iter().zip(&scale_fix).map(|(a, b)| a * b).collect();
                let dm = element_inner_scalar(&one, &t.d, &mesh, e);
                let bnd = boundary_integral(&weighted, &mesh, e);
                assert!((dm + bnd).abs() < 1e-12 * (dm.abs() + bnd.abs() + 1e-3), "element {e}: {dm} {bnd}");
                global += dm;
            }
            assert!(global.abs() < 1e-12);
            assert!(t.u.max_normal_component(&mesh) < 1e-12);
        }
    }

    #[test]
    fn fluxes_are_single_valued() {
        let mesh = build_mesh(2, 3, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let s = random_state(&mesh, &mut rng, 5.0, 1.0);
        let cfg = phys(&mesh, 9.8);
        let flux = FluxConfig { alpha: AlphaMode::Rusanov, beta: 0.1 };
        let ing = ingredients(&s, &cfg, &flux, &mesh).unwrap();
        let eval = |e: usize, side: usize, t: usize| {
            let en = EdgeNode::new(&mesh, e, side, t);
            let (gp, gm) = en.order(ing.g.get(e, en.k), ing.g.get(en.nb_element, en.nb_k));
            let (fp, fm) = en.order(ing.f.get(e, en.k), ing.f.get(en.nb_element, en.nb_k));
            let a = edge_alpha(&ing, e, &en);
            let (fnp, fnm) = (fp.dot(&en.normal), fm.dot(&en.normal));
            (flux_ghat(gp, gm, fnp, fnm, a), flux_fhat_n(fnp, fnm, gp, gm, flux.beta))
        };
        for e in 0..mesh.num_elements() {
            for side in 0..4 {
                let link = *mesh.link(e, side);
                for t in 0..mesh.nodes_per_side() {
                    let tn = link.neighbor_index(t, mesh.order());
                    assert_eq!(eval(e, side, t), eval(link.neighbor, link.neighbor_side, tn));
                }
            }
        }
    }

    #[test]
    fn energy_identity() {
        let mesh = build_mesh(2, 3, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let cfg = phys(&mesh, 9.8);
        for flux in [FluxConfig::conserving(), FluxConfig::dissipative(), FluxConfig { alpha: AlphaMode::Rusanov, beta: 0.2 }] {
            let s = random_state(&mesh, &mut rng, 10.0, 1.0);
            let t = rhs_nonlinear(&s, &cfg, &flux, &mesh).unwrap();
            let rate = energy_rate(&s, &t, &cfg, &mesh).unwrap();
            let pred = interface_dissipation(&s, &cfg, &flux, &mesh).unwrap();
            let g = potential_g(&s, &cfg);
            let f = mass_flux_f(&s, &cfg);
            let scale = crate::operators::inner_vector(&f, &t.u.map(|v| v.abs()), &mesh).unwrap().abs()
                + crate::operators::inner_scalar(&g, &t.d.map(f64::abs), &mesh).unwrap().abs();
            assert!((rate - pred).abs() < 1e-12 * scale, "{rate} vs {pred}");
            assert!(pred <= 0.0);
        }
    }

    #[test]
    fn energy_identity_with_topography() {
        let mesh = build_mesh(2, 3, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let b = crate::operators::project_scalar(&mesh, |x| 0.5 * (3.0 * x[0]).sin() * x[2]);
        let cfg = phys(&mesh, 9.8).with_topography(b);
        for flux in [FluxConfig::conserving(), FluxConfig::dissipative()] {
            let s = random_state(&mesh, &mut rng, 10.0, 1.0);
            let t = rhs_nonlinear(&s, &cfg, &flux, &mesh).unwrap();
            let rate = energy_rate(&s, &t, &cfg, &mesh).unwrap();
            let pred = interface_dissipation(&s, &cfg, &flux, &mesh).unwrap();
            let scale = t.d.max_abs() * 10.0 * 9.8 * mesh.area() + t.u.max_norm() * 10.0 * mesh.area();
            assert!((rate - pred).abs() < 1e-12 * scale, "{rate} vs {pred}");
        }
    }

    #[test]
    fn linear_energy_and_rest() {
        let mesh = build_mesh(2, 3, 1.0).unwrap();
        let f = ScalarField::constant(&mesh, 8.0);
        let cfg = PhysConfig::linear(8.0, f, 0.2);
        let rest = State::new(VectorField::zeros(&mesh), ScalarField::constant(&mesh, 0.3));
        let t = rhs_linear(&rest, &cfg, &FluxConfig::conserving(), &mesh).unwrap();
        assert!(t.u.max_norm() < 1e-12 && t.d.max_abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut s = random_state(&mesh, &mut rng, 1.0, 1.0);
        s.d = s.d.map(|d| d - 1.0);
        let t = rhs_linear(&s, &cfg, &FluxConfig::conserving(), &mesh).unwrap();
        let rate = energy_rate(&s, &t, &cfg, &mesh).unwrap();
        assert!(rate.abs() < 1e-12 * (t.d.max_abs() + t.u.max_norm()) * mesh.area());
        assert!(rhs_nonlinear(&s, &cfg, &FluxConfig::conserving(), &mesh).is_err());
    }

    #[test]
    fn hessian_closed_form() {
        let (e, sub) = entropy_hessian_eigs(&Vec3::zeros(), 2.0, 3.0);
        assert_eq!(e, [2.0, 2.0, 2.0, 3.0]);
        assert!(sub);
        let (e, sub) = entropy_hessian_eigs(&Vec3::new(3.0, 4.0, 0.0), 1.0, 25.0);
        assert_eq!(e[0], 0.0);
        assert!(!sub);
        let (_, sub) = entropy_hessian_eigs(&Vec3::new(3.0, 4.0, 0.0), 1.0, 25.000000000000004);
        assert!(sub);
    }
}
