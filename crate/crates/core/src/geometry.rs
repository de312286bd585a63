//! Equiangular cubed-sphere meshes.
//!
//! Each of the six cube faces is mapped to the sphere by the gnomonic
//! equiangular projection and split into `n × n` quadrilateral elements.
//! Every element carries `(m+1)²` GLL nodes with analytic metric terms: the
//! covariant basis `g1 = ∂x/∂ξ`, `g2 = ∂x/∂η`, the contravariant basis
//! `g^α` dual to it, the area Jacobian `J = |g1 × g2|` and the outward
//! surface normal `k`.
//!
//! # Panel layout
//!
//! A panel point with local angles `(α, β) = (π/4)(X, Y)` sits on the cube at
//! `center + tan α · e_s + tan β · e_t` and is projected radially to radius `a`.
//!
//! | panel | center | e_s  | e_t  |
//! |-------|--------|------|------|
//! | 0     | +x     | +y   | +z   |
//! | 1     | +y     | -x   | +z   |
//! | 2     | -x     | -y   | +z   |
//! | 3     | -y     | +x   | +z   |
//! | 4     | +z     | +y   | -x   |
//! | 5     | -z     | +y   | +x   |
//!
//! `e_s × e_t = center` on every panel, so `(g1, g2, k)` is right-handed.
//!
//! # Element sides
//!
//! Sides are numbered 0: ξ = -1, 1: ξ = +1, 2: η = -1, 3: η = +1. Side nodes
//! are ordered by increasing free parameter. Neighbouring sides are matched
//! through exact integer cube-lattice coordinates of their corner vertices,
//! so connectivity never depends on floating-point comparisons. At the eight
//! cube corners three elements meet at a vertex only; no element side is
//! shared by more than two elements and boundary sums run side by side, so
//! corner nodes are never counted twice across a link.

use std::collections::HashMap;
use std::f64::consts::FRAC_PI_4;
use std::fmt;

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::quadrature::{diff_matrix, gll_rule, DiffMatrix, QuadRule};

pub type Vec3 = Vector3<f64>;

pub const NUM_PANELS: usize = 6;
pub const SIDES_PER_ELEMENT: usize = 4;

/// `(center, e_s, e_t)` of each panel as integer cube directions.
pub const PANEL_FRAMES: [[[i64; 3]; 3]; NUM_PANELS] = [
    [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
    [[0, 1, 0], [-1, 0, 0], [0, 0, 1]],
    [[-1, 0, 0], [0, -1, 0], [0, 0, 1]],
    [[0, -1, 0], [1, 0, 0], [0, 0, 1]],
    [[0, 0, 1], [0, 1, 0], [-1, 0, 0]],
    [[0, 0, -1], [0, 1, 0], [1, 0, 0]],
];

fn frame_vec(v: [i64; 3]) -> Vec3 {
    Vec3::new(v[0] as f64, v[1] as f64, v[2] as f64)
}

/// `tan(π/4 · x)`, exact at the panel edges and centre.
fn equiangular_tan(x: f64) -> f64 {
    if x == 1.0 {
        1.0
    } else if x == -1.0 {
        -1.0
    } else if x == 0.0 {
        0.0
    } else {
        (FRAC_PI_4 * x).tan()
    }
}

fn cube_point(panel: usize, s: f64, t: f64) -> Vec3 {
    let [c, es, et] = PANEL_FRAMES[panel];
    frame_vec(c) + s * frame_vec(es) + t * frame_vec(et)
}

/// Maps panel coordinates `(ξ, η) ∈ [-1, 1]²` to the sphere of radius `a`.
pub fn equiangular_map(panel: usize, xi: f64, eta: f64, a: f64) -> Result<Vec3> {
    if panel >= NUM_PANELS {
        return Err(Error::InvalidPanel(panel));
    }
    let p = cube_point(panel, equiangular_tan(xi), equiangular_tan(eta));
    Ok(p * (a / p.norm()))
}

/// Metric terms at one node.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeMetric {
    pub x: Vec3,
    pub g1: Vec3,
    pub g2: Vec3,
    pub gup1: Vec3,
    pub gup2: Vec3,
    pub jac: f64,
    pub k: Vec3,
}

impl NodeMetric {
    fn new(panel: usize, px: f64, py: f64, dxi: f64, a: f64) -> Self {
        let [_, es, et] = PANEL_FRAMES[panel];
        let (es, et) = (frame_vec(es), frame_vec(et));
        let s = equiangular_tan(px);
        let t = equiangular_tan(py);
        let p = cube_point(panel, s, t);
        let r = p.norm();
        let k = p / r;
        let x = k * a;
        // d/dX tan(πX/4) = (π/4)(1 + tan²), and dX/dξ = 1/n (= dxi).
        let tangential = |e: &Vec3| (e - k * k.dot(e)) * (a / r);
        let g1 = tangential(&es) * (FRAC_PI_4 * (1.0 + s * s) * dxi);
        let g2 = tangential(&et) * (FRAC_PI_4 * (1.0 + t * t) * dxi);
        let jac = g1.cross(&g2).norm();
        let gup1 = g2.cross(&k) / jac;
        let gup2 = k.cross(&g1) / jac;
        NodeMetric {
            x,
            g1,
            g2,
            gup1,
            gup2,
            jac,
            k,
        }
    }
}

/// Per-element metric data, nodes indexed `i + (m+1)·j` with `i` along ξ.
#[derive(Clone, Debug)]
pub struct ElementMetric {
    pub panel: usize,
    /// Element position `(ei, ej)` within its panel.
    pub position: (usize, usize),
    pub nodes: Vec<NodeMetric>,
}

/// Oriented connection from one element side to its neighbour.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EdgeLink {
    pub element: usize,
    pub side: usize,
    pub neighbor: usize,
    pub neighbor_side: usize,
    /// Node order along the shared edge runs opposite on the two sides.
    pub reversed: bool,
}

impl EdgeLink {
    /// Index along the neighbour's side of the node matching `t` on this side.
    #[inline]
    pub fn neighbor_index(&self, t: usize, order: usize) -> usize {
        if self.reversed {
            order - t
        } else {
            t
        }
    }

    /// The side whose orientation defines `+` for jumps: the lower
    /// `(element, side)` pair.
    #[inline]
    pub fn is_owner(&self) -> bool {
        (self.element, self.side) < (self.neighbor, self.neighbor_side)
    }
}

/// Outward unit normal, unit tangent (`t = k × n`) and line-element scale at a
/// boundary node.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryFrame {
    pub normal: Vec3,
    pub tangent: Vec3,
    /// `|g2|` on ξ = ±1 sides, `|g1|` on η = ±1 sides.
    pub scale: f64,
}

#[derive(Clone, Debug)]
pub struct Mesh {
    n: usize,
    order: usize,
    radius: f64,
    rule: QuadRule,
    diff: DiffMatrix,
    elements: Vec<ElementMetric>,
    links: Vec<EdgeLink>,
    frames: Vec<BoundaryFrame>,
}

/// Local node index of the `t`-th node on `side`.
#[inline]
pub fn side_node(side: usize, t: usize, order: usize) -> usize {
    let np = order + 1;
    match side {
        0 => t * np,
        1 => order + t * np,
        2 => t,
        3 => t + order * np,
        _ => panic!("element side {side} out of range"),
    }
}

pub fn build_mesh(n: usize, m: usize, a: f64) -> Result<Mesh> {
    if n < 1 {
        return Err(Error::InvalidMesh(format!("need at least one element per panel edge, got {n}")));
    }
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::InvalidMesh(format!("radius must be positive, got {a}")));
    }
    let rule = gll_rule(m)?;
    let diff = diff_matrix(&rule);
    let np = m + 1;
    let dxi = 1.0 / n as f64;

    let mut elements = Vec::with_capacity(NUM_PANELS * n * n);
    for panel in 0..NUM_PANELS {
        for ej in 0..n {
            for ei in 0..n {
                let mut nodes = Vec::with_capacity(np * np);
                for j in 0..np {
                    let py = panel_coord(ej, rule.nodes()[j], n);
                    for i in 0..np {
                        let px = panel_coord(ei, rule.nodes()[i], n);
                        nodes.push(NodeMetric::new(panel, px, py, dxi, a));
                    }
                }
                elements.push(ElementMetric {
                    panel,
                    position: (ei, ej),
                    nodes,
                });
            }
        }
    }

    let links = connect(n, &elements)?;
    unify_shared_nodes(m, &mut elements, &links);

    let mut frames = Vec::with_capacity(elements.len() * SIDES_PER_ELEMENT * np);
    for el in &elements {
        for side in 0..SIDES_PER_ELEMENT {
            for t in 0..np {
                let nm = &el.nodes[side_node(side, t, m)];
                let (normal, scale) = match side {
                    0 => (-nm.gup1.normalize(), nm.g2.norm()),
                    1 => (nm.gup1.normalize(), nm.g2.norm()),
                    2 => (-nm.gup2.normalize(), nm.g1.norm()),
                    _ => (nm.gup2.normalize(), nm.g1.norm()),
                };
                let tangent = nm.k.cross(&normal);
                frames.push(BoundaryFrame {
                    normal,
                    tangent,
                    scale,
                });
            }
        }
    }

    Ok(Mesh {
        n,
        order: m,
        radius: a,
        rule,
        diff,
        elements,
        links,
        frames,
    })
}

/// Panel coordinate `(2e + 1 + ξ)/n - 1` of an element node; exact at
/// element boundaries so shared nodes land on identical coordinates.
fn panel_coord(e: usize, xi: f64, n: usize) -> f64 {
    let nf = n as f64;
    if xi == -1.0 {
        (2 * e) as f64 / nf - 1.0
    } else if xi == 1.0 {
        (2 * e + 2) as f64 / nf - 1.0
    } else {
        ((2 * e + 1) as f64 + xi) / nf - 1.0
    }
}

/// Gives every physically shared boundary node (including the three or four
/// copies at element corners) the position and surface normal of its
/// lowest-indexed copy, so nodal samples of a global function agree
/// bitwise across links.
fn unify_shared_nodes(m: usize, elements: &mut [ElementMetric], links: &[EdgeLink]) {
    let npe = (m + 1) * (m + 1);
    let mut parent: Vec<usize> = (0..elements.len() * npe).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for link in links {
        for t in 0..=m {
            let a = link.element * npe + side_node(link.side, t, m);
            let b = link.neighbor * npe + side_node(link.neighbor_side, link.neighbor_index(t, m), m);
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
    }
    for idx in 0..parent.len() {
        let root = find(&mut parent, idx);
        if root != idx {
            let src = &elements[root / npe].nodes[root % npe];
            let (x, k) = (src.x, src.k);
            let dst = &mut elements[idx / npe].nodes[idx % npe];
            dst.x = x;
            dst.k = k;
        }
    }
}

type Vertex = [i64; 3];

/// Integer cube-lattice vertex of panel lattice point `(k, l)`, `0 ≤ k, l ≤ n`.
fn lattice_vertex(panel: usize, k: usize, l: usize, n: usize) -> Vertex {
    let [c, es, et] = PANEL_FRAMES[panel];
    let n = n as i64;
    let s = 2 * k as i64 - n;
    let t = 2 * l as i64 - n;
    [0, 1, 2].map(|d| c[d] * n + s * es[d] + t * et[d])
}

fn side_vertices(el: &ElementMetric, side: usize, n: usize) -> (Vertex, Vertex) {
    let (ei, ej) = el.position;
    let p = el.panel;
    match side {
        0 => (lattice_vertex(p, ei, ej, n), lattice_vertex(p, ei, ej + 1, n)),
        1 => (lattice_vertex(p, ei + 1, ej, n), lattice_vertex(p, ei + 1, ej + 1, n)),
        2 => (lattice_vertex(p, ei, ej, n), lattice_vertex(p, ei + 1, ej, n)),
        _ => (lattice_vertex(p, ei, ej + 1, n), lattice_vertex(p, ei + 1, ej + 1, n)),
    }
}

fn connect(n: usize, elements: &[ElementMetric]) -> Result<Vec<EdgeLink>> {
    let mut by_edge: HashMap<(Vertex, Vertex), Vec<(usize, usize, Vertex)>> = HashMap::new();
    for (e, el) in elements.iter().enumerate() {
        for side in 0..SIDES_PER_ELEMENT {
            let (start, end) = side_vertices(el, side, n);
            let key = if start < end { (start, end) } else { (end, start) };
            by_edge.entry(key).or_default().push((e, side, start));
        }
    }
    let mut links = vec![None; elements.len() * SIDES_PER_ELEMENT];
    for (key, sides) in &by_edge {
        let [(e0, s0, st0), (e1, s1, st1)] = sides.as_slice() else {
            return Err(Error::InvalidMesh(format!(
                "edge {key:?} shared by {} element sides",
                sides.len()
            )));
        };
        let reversed = st0 != st1;
        links[e0 * SIDES_PER_ELEMENT + s0] = Some(EdgeLink {
            element: *e0,
            side: *s0,
            neighbor: *e1,
            neighbor_side: *s1,
            reversed,
        });
        links[e1 * SIDES_PER_ELEMENT + s1] = Some(EdgeLink {
            element: *e1,
            side: *s1,
            neighbor: *e0,
            neighbor_side: *s0,
            reversed,
        });
    }
    links
        .into_iter()
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| Error::InvalidMesh("element side without a neighbour".into()))
}

impl Mesh {
    /// Elements per panel edge.
    pub fn resolution(&self) -> usize {
        self.n
    }

    /// Polynomial order.
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn rule(&self) -> &QuadRule {
        &self.rule
    }

    pub fn diff(&self) -> &DiffMatrix {
        &self.diff
    }

    pub fn num_elements(&self) -> usize {
        self.elements.len()
    }

    /// Nodes per side, `m + 1`.
    pub fn nodes_per_side(&self) -> usize {
        self.order + 1
    }

    pub fn nodes_per_element(&self) -> usize {
        (self.order + 1) * (self.order + 1)
    }

    pub fn num_nodes(&self) -> usize {
        self.num_elements() * self.nodes_per_element()
    }

    pub fn elements(&self) -> &[ElementMetric] {
        &self.elements
    }

    pub fn element(&self, e: usize) -> &ElementMetric {
        &self.elements[e]
    }

    #[inline]
    pub fn node(&self, e: usize, k: usize) -> &NodeMetric {
        &self.elements[e].nodes[k]
    }

    pub fn links(&self) -> &[EdgeLink] {
        &self.links
    }

    #[inline]
    pub fn link(&self, e: usize, side: usize) -> &EdgeLink {
        &self.links[e * SIDES_PER_ELEMENT + side]
    }

    pub fn boundary_frames(&self) -> &[BoundaryFrame] {
        &self.frames
    }

    #[inline]
    pub fn frame(&self, e: usize, side: usize, t: usize) -> &BoundaryFrame {
        &self.frames[(e * SIDES_PER_ELEMENT + side) * (self.order + 1) + t]
    }

    /// Quadrature weight `w_i w_j` of local node `k`.
    #[inline]
    pub fn tensor_weight(&self, k: usize) -> f64 {
        let np = self.order + 1;
        let w = self.rule.weights();
        w[k % np] * w[k / np]
    }

    /// Diagonal mass entry `w_i w_j J_ij`.
    #[inline]
    pub fn mass(&self, e: usize, k: usize) -> f64 {
        self.tensor_weight(k) * self.node(e, k).jac
    }

    /// Boundary lift coefficient for side node `t`: the side quadrature weight
    /// `w_t · scale` divided by the diagonal mass of the node it lands on.
    #[inline]
    pub fn lift(&self, e: usize, side: usize, t: usize) -> f64 {
        let w = self.rule.weights();
        let k = side_node(side, t, self.order);
        w[t] * self.frame(e, side, t).scale / self.mass(e, k)
    }

    /// Element spacing used by the CFL rule: the shortest great-circle
    /// element edge. Corner elements of the equiangular grid make this
    /// smaller than [`Mesh::nominal_spacing`].
    pub fn element_spacing(&self) -> f64 {
        let m = self.order;
        let mut min = f64::INFINITY;
        for el in &self.elements {
            for side in 0..SIDES_PER_ELEMENT {
                let a = el.nodes[side_node(side, 0, m)].x;
                let b = el.nodes[side_node(side, m, m)].x;
                let angle = a.cross(&b).norm().atan2(a.dot(&b));
                min = min.min(self.radius * angle);
            }
        }
        min
    }

    /// Panel angular width over `n`, times the radius.
    pub fn nominal_spacing(&self) -> f64 {
        self.radius * std::f64::consts::FRAC_PI_2 / self.n as f64
    }

    /// Discrete sphere area `Σ_q ⟨1, 1⟩_q`.
    pub fn area(&self) -> f64 {
        (0..self.num_elements())
            .map(|e| (0..self.nodes_per_element()).map(|k| self.mass(e, k)).sum::<f64>())
            .sum()
    }

    pub fn summary(&self) -> MeshSummary {
        let (min_j, max_j) = self
            .elements
            .iter()
            .flat_map(|el| el.nodes.iter().map(|n| n.jac))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), j| (lo.min(j), hi.max(j)));
        let exact = 4.0 * std::f64::consts::PI * self.radius * self.radius;
        MeshSummary {
            resolution: self.n,
            order: self.order,
            radius: self.radius,
            elements: self.num_elements(),
            area: self.area(),
            relative_area_error: (self.area() - exact) / exact,
            min_jacobian: min_j,
            max_jacobian: max_j,
        }
    }
}

/// Plain-text mesh report for debugging.
#[derive(Clone, Debug, PartialEq)]
pub struct MeshSummary {
    pub resolution: usize,
    pub order: usize,
    pub radius: f64,
    pub elements: usize,
    pub area: f64,
    pub relative_area_error: f64,
    pub min_jacobian: f64,
    pub max_jacobian: f64,
}

impl fmt::Display for MeshSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "cubed sphere 6x{n}x{n}, order {}", self.order, n = self.resolution)?;
        writeln!(f, "radius              {:e}", self.radius)?;
        writeln!(f, "elements            {}", self.elements)?;
        writeln!(f, "area                {:.16e}", self.area)?;
        writeln!(f, "relative area error {:.6e}", self.relative_area_error)?;
        writeln!(f, "min J               {:.6e}", self.min_jacobian)?;
        write!(f, "max J               {:.6e}", self.max_jacobian)
    }
}
