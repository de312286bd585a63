//! Gauss-Lobatto-Legendre rules and the 1D Lagrange machinery behind the
//! tensor-product element basis.
//!
//! Nodes and weights are computed once per order and are immutable after
//! construction. The collocated derivative matrix `D[i][j] = l_j'(ξ_i)`
//! satisfies the summation-by-parts identity `W D + Dᵀ W = diag(-1, 0, …, 0, 1)`
//! to round-off, which every discrete operator identity in this crate leans on.

use crate::error::{Error, Result};

const NEWTON_TOL: f64 = 1e-15;
const NEWTON_MAX_ITER: usize = 100;

/// GLL quadrature rule of order `m` (m + 1 points including both endpoints).
#[derive(Clone, Debug, PartialEq)]
pub struct QuadRule {
    order: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadRule {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.order + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Applies the rule to `f` on `[a, b]`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let sum: f64 = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum();
        half * sum
    }
}

/// Collocation derivative matrix, `entries[i][j] = l_j'(ξ_i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiffMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl DiffMatrix {
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    /// Differentiates nodal samples.
    pub fn apply(&self, samples: &[f64]) -> Vec<f64> {
        assert_eq!(samples.len(), self.n);
        (0..self.n)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(samples)
                    .map(|(d, f)| d * f)
                    .sum()
            })
            .collect()
    }
}

/// Legendre polynomial `P_n(x)` and its predecessor `P_{n-1}(x)`.
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * x * p - kf * p_prev) / (kf + 1.0);
        p_prev = p;
        p = next;
    }
    (p, p_prev)
}

/// Evaluates the Legendre polynomial `P_n(x)`.
pub fn legendre(n: usize, x: f64) -> f64 {
    legendre_pair(n, x).0
}

/// Builds the GLL rule of order `m`: nodes are the roots of `(1 - x²) P_m'(x)`.
pub fn gll_rule(m: usize) -> Result<QuadRule> {
    if m < 1 {
        return Err(Error::InvalidOrder(m));
    }
    let np = m + 1;
    let mf = m as f64;
    let mut nodes = vec![0.0; np];
    nodes[0] = -1.0;
    nodes[m] = 1.0;

    // Interior nodes are the roots of P_m'. Newton on P_m' with P_m'' from the
    // Legendre ODE: (1 - x²) P'' = 2x P' - m(m+1) P.
    for (i, node) in nodes.iter_mut().enumerate().take(m).skip(1) {
        let mut x = -(std::f64::consts::PI * i as f64 / mf).cos();
        for _ in 0..NEWTON_MAX_ITER {
            let (p, p_prev) = legendre_pair(m, x);
            let dp = mf * (x * p - p_prev) / (x * x - 1.0);
            let d2p = (2.0 * x * dp - mf * (mf + 1.0) * p) / (1.0 - x * x);
            let dx = dp / d2p;
            x -= dx;
            if dx.abs() < NEWTON_TOL {
                break;
            }
        }
        *node = x;
    }

    let mut weights: Vec<f64> = nodes
        .iter()
        .map(|&x| {
            let p = legendre(m, x);
            2.0 / (mf * (mf + 1.0) * p * p)
        })
        .collect();

    // Symmetrize so that mirrored nodes and weights agree bit for bit.
    for i in 0..np / 2 {
        let j = m - i;
        let x = 0.5 * (nodes[j] - nodes[i]);
        nodes[i] = -x;
        nodes[j] = x;
        let w = 0.5 * (weights[i] + weights[j]);
        weights[i] = w;
        weights[j] = w;
    }
    if np % 2 == 1 {
        nodes[m / 2] = 0.0;
    }

    Ok(QuadRule {
        order: m,
        nodes,
        weights,
    })
}

/// Evaluates the Lagrange cardinal polynomial `l_i` of `rule` at `x`.
pub fn lagrange_eval(rule: &QuadRule, i: usize, x: f64) -> Result<f64> {
    let nodes = rule.nodes();
    if i >= nodes.len() {
        return Err(Error::IndexOutOfRange {
            index: i,
            len: nodes.len(),
        });
    }
    let xi = nodes[i];
    Ok(nodes
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != i)
        .map(|(_, &xk)| (x - xk) / (xi - xk))
        .product())
}

/// Evaluates the interpolant of nodal `samples` at `x`.
pub fn interpolate(rule: &QuadRule, samples: &[f64], x: f64) -> f64 {
    samples
        .iter()
        .enumerate()
        .map(|(i, &s)| s * lagrange_eval(rule, i, x).expect("index in range"))
        .sum()
}

pub fn diff_matrix(rule: &QuadRule) -> DiffMatrix {
    let x = rule.nodes();
    let n = x.len();
    // Barycentric-style products c_i = Π_{k≠i} (x_i - x_k).
    let c: Vec<f64> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&k| k != i)
                .map(|k| x[i] - x[k])
                .product()
        })
        .collect();
    let mut entries = vec![0.0; n * n];
    for i in 0..n {
        let mut diag = 0.0;
        for j in 0..n {
            if i != j {
                let d = (c[i] / c[j]) / (x[i] - x[j]);
                entries[i * n + j] = d;
                diag -= d;
            }
        }
        // Negative-sum diagonal: rows annihilate constants to round-off.
        entries[i * n + i] = diag;
    }
    DiffMatrix { n, entries }
}

/// Adaptive composite quadrature on `[a, b]` with a fixed high-order GLL rule,
/// bisecting until the one-panel and two-panel estimates agree to `rel_tol`
/// (relative to the integral of `|f|`).
pub fn integrate_adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let scale = gll_rule(ADAPTIVE_RULE_ORDER)?.integrate(a, b, |x| f(x).abs());
    integrate_adaptive_abs(f, a, b, rel_tol * scale.max(f64::MIN_POSITIVE))
}

const ADAPTIVE_RULE_ORDER: usize = 16;

/// As [`integrate_adaptive`] with an absolute tolerance `abs_tol` for the
/// whole interval, shared among panels in proportion to their width.
pub fn integrate_adaptive_abs<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64) -> Result<f64> {
    const MAX_DEPTH: usize = 48;
    if a == b {
        return Ok(0.0);
    }
    let rule = gll_rule(ADAPTIVE_RULE_ORDER)?;
    let mut total = 0.0;
    let mut stack = vec![(a, b, rule.integrate(a, b, &f), 0usize)];
    while let Some((lo, hi, coarse, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = rule.integrate(lo, mid, &f);
        let right = rule.integrate(mid, hi, &f);
        let fine = left + right;
        if (fine - coarse).abs() <= abs_tol * (hi - lo) / (b - a).abs()
            || (fine - coarse).abs() <= 1e-15 * fine.abs()
            || hi - lo <= 64.0 * f64::EPSILON * lo.abs().max(hi.abs())
        {
            total += fine;
        } else if depth >= MAX_DEPTH {
            return Err(Error::QuadratureNonConvergence { a: lo, b: hi });
        } else {
            stack.push((mid, hi, right, depth + 1));
            stack.push((lo, mid, left, depth + 1));
        }
    }
    Ok(total)
}
