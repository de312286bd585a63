//! Gauss-Lobatto-Legendre nodes, weights and the differentiation matrix.
//!
//! `cargo run --example quadrature -- 4`

use dgswe::quadrature::{diff_matrix, gll_rule, integrate_adaptive};

fn main() -> dgswe::Result<()> {
    let m: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let rule = gll_rule(m)?;
    println!("GLL rule of order {m}");
    for (x, w) in rule.nodes().iter().zip(rule.weights()) {
        println!("  x = {x:+.16}  w = {w:.16}");
    }

    // Exact up to degree 2m - 1; the odd term integrates to zero.
    let p = (2 * m - 1) as i32;
    let q = rule.integrate(-1.0, 1.0, |x| x.powi(p) + x.powi(p - 1));
    println!("integral of x^{p} + x^{} on [-1, 1]: {q:.16} (exact {:.16})", p - 1, 2.0 / p as f64);

    let d = diff_matrix(&rule);
    let samples: Vec<f64> = rule.nodes().iter().map(|x| x.powi(m as i32)).collect();
    let deriv = d.apply(&samples);
    let worst = rule
        .nodes()
        .iter()
        .zip(&deriv)
        .map(|(x, dv)| (dv - m as f64 * x.powi(m as i32 - 1)).abs())
        .fold(0.0, f64::max);
    println!("max error differentiating x^{m}: {worst:.2e}");

    let gauss = integrate_adaptive(|x: f64| (-x * x).exp(), -1.0, 1.0, 1e-14)?;
    println!("adaptive integral of exp(-x^2) on [-1, 1]: {gauss:.16}");
    Ok(())
}
