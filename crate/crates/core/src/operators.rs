//! Discrete inner products, projections and differential operators.
//!
//! All operators act element by element on nodal data. With GLL collocation
//! the mass matrix is diagonal (`w_i w_j J_ij`), so the projections `Π_S`,
//! `Π_V` reduce to nodal interpolation and every operator is a pointwise
//! combination of tensor-line derivatives with the stored metric:
//!
//! * `∇_d φ      = ∂ξφ g^1 + ∂ηφ g^2`
//! * `∇_d·w      = (∂ξ(J w·g^1) + ∂η(J w·g^2)) / J`
//! * `k·∇_d×w    = (∂ξ(w·g2) − ∂η(w·g1)) / J`
//! * `∇_d×(φk)   = (∂ηφ g1 − ∂ξφ g2) / J`
//!
//! Jumps use the link's canonical orientation: `[[a]] = a⁺ − a⁻` where `+` is
//! the owning side (see [`EdgeLink::is_owner`]).

use crate::error::{Error, Result};
use crate::field::{Field, NodalValue, ScalarField, VectorField};
use crate::geometry::{side_node, EdgeLink, ElementMetric, Mesh, Vec3, SIDES_PER_ELEMENT};
use crate::quadrature::{lagrange_eval, DiffMatrix};

/// Reference-square partial derivatives of nodal data on one element.
pub(crate) fn partials<T: NodalValue>(diff: &DiffMatrix, vals: &[T], d_xi: &mut [T], d_eta: &mut [T]) {
    let np = diff.size();
    for j in 0..np {
        for i in 0..np {
            let mut sx = T::zero();
            let mut se = T::zero();
            for (l, (&dil, &djl)) in diff.row(i).iter().zip(diff.row(j)).enumerate() {
                sx = sx + vals[l + np * j] * dil;
                se = se + vals[i + np * l] * djl;
            }
            d_xi[i + np * j] = sx;
            d_eta[i + np * j] = se;
        }
    }
}

pub(crate) fn grad_element(diff: &DiffMatrix, el: &ElementMetric, phi: &[f64], out: &mut [Vec3]) {
    let n = phi.len();
    let mut dx = vec![0.0; n];
    let mut de = vec![0.0; n];
    partials(diff, phi, &mut dx, &mut de);
    for (k, o) in out.iter_mut().enumerate() {
        let nm = &el.nodes[k];
        *o = nm.gup1 * dx[k] + nm.gup2 * de[k];
    }
}

pub(crate) fn div_element(diff: &DiffMatrix, el: &ElementMetric, w: &[Vec3], out: &mut [f64]) {
    let n = w.len();
    let a: Vec<f64> = el.nodes.iter().zip(w).map(|(nm, w)| nm.jac * w.dot(&nm.gup1)).collect();
    let b: Vec<f64> = el.nodes.iter().zip(w).map(|(nm, w)| nm.jac * w.dot(&nm.gup2)).collect();
    let (mut ax, mut ae) = (vec![0.0; n], vec![0.0; n]);
    let (mut bx, mut be) = (vec![0.0; n], vec![0.0; n]);
    partials(diff, &a, &mut ax, &mut ae);
    partials(diff, &b, &mut bx, &mut be);
    for (k, o) in out.iter_mut().enumerate() {
        *o = (ax[k] + be[k]) / el.nodes[k].jac;
    }
}

pub(crate) fn curl_vec_element(diff: &DiffMatrix, el: &ElementMetric, w: &[Vec3], out: &mut [f64]) {
    let n = w.len();
    let w1: Vec<f64> = el.nodes.iter().zip(w).map(|(nm, w)| w.dot(&nm.g1)).collect();
    let w2: Vec<f64> = el.nodes.iter().zip(w).map(|(nm, w)| w.dot(&nm.g2)).collect();
    let (mut w1x, mut w1e) = (vec![0.0; n], vec![0.0; n]);
    let (mut w2x, mut w2e) = (vec![0.0; n], vec![0.0; n]);
    partials(diff, &w1, &mut w1x, &mut w1e);
    partials(diff, &w2, &mut w2x, &mut w2e);
    for (k, o) in out.iter_mut().enumerate() {
        *o = (w2x[k] - w1e[k]) / el.nodes[k].jac;
    }
}

pub(crate) fn curl_scalar_element(diff: &DiffMatrix, el: &ElementMetric, phi: &[f64], out: &mut [Vec3]) {
    let n = phi.len();
    let mut dx = vec![0.0; n];
    let mut de = vec![0.0; n];
    partials(diff, phi, &mut dx, &mut de);
    for (k, o) in out.iter_mut().enumerate() {
        let nm = &el.nodes[k];
        *o = (nm.g1 * de[k] - nm.g2 * dx[k]) / nm.jac;
    }
}

/// `∇_d φ`, tangent by construction.
pub fn d_grad(phi: &ScalarField, mesh: &Mesh) -> Result<VectorField> {
    phi.check_mesh(mesh)?;
    let mut out = VectorField::zeros(mesh);
    for (e, el) in mesh.elements().iter().enumerate() {
        grad_element(mesh.diff(), el, phi.element(e), out.element_mut(e));
    }
    Ok(out)
}

/// `∇_d · w`.
pub fn d_div(w: &VectorField, mesh: &Mesh) -> Result<ScalarField> {
    w.check_mesh(mesh)?;
    let mut out = ScalarField::zeros(mesh);
    for (e, el) in mesh.elements().iter().enumerate() {
        div_element(mesh.diff(), el, w.element(e), out.element_mut(e));
    }
    Ok(out)
}

/// k-component of `∇_d × w`.
pub fn d_curl_vec(w: &VectorField, mesh: &Mesh) -> Result<ScalarField> {
    w.check_mesh(mesh)?;
    let mut out = ScalarField::zeros(mesh);
    for (e, el) in mesh.elements().iter().enumerate() {
        curl_vec_element(mesh.diff(), el, w.element(e), out.element_mut(e));
    }
    Ok(out)
}

/// `∇_d × (φ k)`.
pub fn d_curl_scalar(phi: &ScalarField, mesh: &Mesh) -> Result<VectorField> {
    phi.check_mesh(mesh)?;
    let mut out = VectorField::zeros(mesh);
    for (e, el) in mesh.elements().iter().enumerate() {
        curl_scalar_element(mesh.diff(), el, phi.element(e), out.element_mut(e));
    }
    Ok(out)
}

/// `⟨f, g⟩` on element `e`.
pub fn element_inner_scalar(f: &ScalarField, g: &ScalarField, mesh: &Mesh, e: usize) -> f64 {
    f.element(e)
        .iter()
        .zip(g.element(e))
        .enumerate()
        .map(|(k, (a, b))| mesh.mass(e, k) * a * b)
        .sum()
}

/// `⟨f, g⟩` on element `e` for vector fields.
pub fn element_inner_vector(f: &VectorField, g: &VectorField, mesh: &Mesh, e: usize) -> f64 {
    f.element(e)
        .iter()
        .zip(g.element(e))
        .enumerate()
        .map(|(k, (a, b))| mesh.mass(e, k) * a.dot(b))
        .sum()
}

/// Global `⟨f, g⟩ = Σ_q Σ_ij w_i w_j J_ij f_ij g_ij`.
pub fn inner_scalar(f: &ScalarField, g: &ScalarField, mesh: &Mesh) -> Result<f64> {
    f.check_mesh(mesh)?;
    g.check_mesh(mesh)?;
    Ok((0..mesh.num_elements()).map(|e| element_inner_scalar(f, g, mesh, e)).sum())
}

pub fn inner_vector(f: &VectorField, g: &VectorField, mesh: &Mesh) -> Result<f64> {
    f.check_mesh(mesh)?;
    g.check_mesh(mesh)?;
    Ok((0..mesh.num_elements()).map(|e| element_inner_vector(f, g, mesh, e)).sum())
}

/// `⟨1, f⟩` over the sphere.
pub fn integral(f: &ScalarField, mesh: &Mesh) -> Result<f64> {
    f.check_mesh(mesh)?;
    Ok((0..mesh.num_elements())
        .map(|e| f.element(e).iter().enumerate().map(|(k, v)| mesh.mass(e, k) * v).sum::<f64>())
        .sum())
}

/// GLL boundary quadrature `Σ_sides Σ_t w_t scale_t f_t` over element `e`.
///
/// `integrand` holds `4(m+1)` values, side-major, each side in its own node
/// order.
pub fn boundary_integral(integrand: &[f64], mesh: &Mesh, e: usize) -> f64 {
    let np = mesh.nodes_per_side();
    assert_eq!(integrand.len(), SIDES_PER_ELEMENT * np);
    let w = mesh.rule().weights();
    (0..SIDES_PER_ELEMENT)
        .map(|side| {
            (0..np)
                .map(|t| w[t] * mesh.frame(e, side, t).scale * integrand[side * np + t])
                .sum::<f64>()
        })
        .sum()
}

/// Own-side boundary traces of `w·n̂` on element `e`, laid out for
/// [`boundary_integral`].
pub fn normal_trace(w: &VectorField, mesh: &Mesh, e: usize) -> Vec<f64> {
    frame_trace(w, mesh, e, |f| f.normal)
}

/// Own-side boundary traces of `w·t̂` on element `e`.
pub fn tangent_trace(w: &VectorField, mesh: &Mesh, e: usize) -> Vec<f64> {
    frame_trace(w, mesh, e, |f| f.tangent)
}

fn frame_trace(w: &VectorField, mesh: &Mesh, e: usize, dir: impl Fn(&crate::geometry::BoundaryFrame) -> Vec3) -> Vec<f64> {
    let m = mesh.order();
    let np = m + 1;
    let mut out = Vec::with_capacity(SIDES_PER_ELEMENT * np);
    for side in 0..SIDES_PER_ELEMENT {
        for t in 0..np {
            out.push(w.get(e, side_node(side, t, m)).dot(&dir(mesh.frame(e, side, t))));
        }
    }
    out
}

/// Own-side boundary traces of a scalar on element `e`.
pub fn scalar_trace(f: &ScalarField, mesh: &Mesh, e: usize) -> Vec<f64> {
    let m = mesh.order();
    (0..SIDES_PER_ELEMENT)
        .flat_map(|side| (0..=m).map(move |t| f.get(e, side_node(side, t, m))))
        .collect()
}

/// `Π_S b`: nodal interpolation of a function of position.
pub fn project_scalar(mesh: &Mesh, b: impl Fn(&Vec3) -> f64) -> ScalarField {
    ScalarField::from_fn(mesh, |e, k| b(&mesh.node(e, k).x))
}

/// `Π_S` of an element-local function of `(element, ξ, η)`; used for
/// functions that are themselves discontinuous across elements.
pub fn project_scalar_local(mesh: &Mesh, b: impl Fn(usize, f64, f64) -> f64) -> ScalarField {
    let np = mesh.nodes_per_side();
    let x = mesh.rule().nodes();
    ScalarField::from_fn(mesh, |e, k| b(e, x[k % np], x[k / np]))
}

/// Relative tolerance on `|w·k|/|w|` accepted by [`project_vector`].
pub const TANGENCY_TOL: f64 = 1e-10;

/// `Π_V w`: nodal interpolation of a tangent vector function. Samples with a
/// normal component above [`TANGENCY_TOL`] are rejected.
pub fn project_vector(mesh: &Mesh, w: impl Fn(&Vec3) -> Vec3) -> Result<VectorField> {
    let mut out = VectorField::zeros(mesh);
    for e in 0..mesh.num_elements() {
        for k in 0..mesh.nodes_per_element() {
            let nm = mesh.node(e, k);
            let v = w(&nm.x);
            let norm = v.norm();
            if norm > 0.0 {
                let ratio = v.dot(&nm.k).abs() / norm;
                if !(ratio <= TANGENCY_TOL) {
                    return Err(Error::NotTangent { element: e, node: k, ratio });
                }
            }
            out.set(e, k, v);
        }
    }
    Ok(out)
}

/// Evaluates the element interpolant of a nodal field at reference point
/// `(ξ, η)`.
pub fn evaluate<T: NodalValue>(field: &Field<T>, mesh: &Mesh, e: usize, xi: f64, eta: f64) -> T {
    let rule = mesh.rule();
    let np = rule.len();
    let lx: Vec<f64> = (0..np).map(|i| lagrange_eval(rule, i, xi).expect("index in range")).collect();
    let ly: Vec<f64> = (0..np).map(|j| lagrange_eval(rule, j, eta).expect("index in range")).collect();
    let vals = field.element(e);
    let mut acc = T::zero();
    for j in 0..np {
        for i in 0..np {
            acc = acc + vals[i + np * j] * (lx[i] * ly[j]);
        }
    }
    acc
}

/// Traces of a field on both sides of one element side, in this side's node
/// order.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeTraces<T> {
    pub link: EdgeLink,
    pub mine: Vec<T>,
    pub neighbor: Vec<T>,
}

impl<T: NodalValue + std::ops::Sub<Output = T>> EdgeTraces<T> {
    /// `{{a}} = (a⁺ + a⁻)/2`.
    pub fn average(&self) -> Vec<T> {
        self.mine.iter().zip(&self.neighbor).map(|(&a, &b)| average(a, b)).collect()
    }

    /// `[[a]] = a⁺ − a⁻` with `+` the owning side of the link.
    pub fn jump(&self) -> Vec<T> {
        let owner = self.link.is_owner();
        self.mine
            .iter()
            .zip(&self.neighbor)
            .map(|(&a, &b)| if owner { jump(a, b) } else { jump(b, a) })
            .collect()
    }
}

/// Gathers own and neighbour traces of `field` along `side` of element `e`.
/// Vector values are exchanged as raw Cartesian vectors.
pub fn edge_traces<T: NodalValue>(field: &Field<T>, mesh: &Mesh, e: usize, side: usize) -> EdgeTraces<T> {
    let m = mesh.order();
    let link = *mesh.link(e, side);
    let mine = (0..=m).map(|t| field.get(e, side_node(side, t, m))).collect();
    let neighbor = (0..=m)
        .map(|t| field.get(link.neighbor, side_node(link.neighbor_side, link.neighbor_index(t, m), m)))
        .collect();
    EdgeTraces { link, mine, neighbor }
}

#[inline]
pub fn average<T: NodalValue>(plus: T, minus: T) -> T {
    (plus + minus) * 0.5
}

#[inline]
pub fn jump<T: NodalValue + std::ops::Sub<Output = T>>(plus: T, minus: T) -> T {
    plus - minus
}
