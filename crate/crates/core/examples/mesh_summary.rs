//! Cubed-sphere mesh construction and metric summary.
//!
//! `cargo run --example mesh_summary -- 8 4`

use dgswe::build_mesh;
use dgswe::testcases::EARTH_RADIUS;

fn main() -> dgswe::Result<()> {
    let mut args = std::env::args().skip(1).map(|s| s.parse::<usize>());
    let n = args.next().and_then(|r| r.ok()).unwrap_or(4);
    let m = args.next().and_then(|r| r.ok()).unwrap_or(3);
    let mesh = build_mesh(n, m, EARTH_RADIUS)?;
    println!("{}", mesh.summary());
    println!("edge links          {}", mesh.links().len());
    println!("nodes               {}", mesh.num_nodes());
    println!("min edge length     {:.3} km", mesh.element_spacing() / 1e3);
    println!("nominal spacing     {:.3} km", mesh.nominal_spacing() / 1e3);

    println!("\narea error by order at n = {n}:");
    for order in 1..=6 {
        let s = build_mesh(n, order, 1.0)?.summary();
        println!("  m = {order}: {:.3e}", s.relative_area_error);
    }
    Ok(())
}
