//! Eigenvalues of the entropy Hessian across the subcritical boundary.

use dgswe::swe::entropy_hessian_eigs;
use dgswe::Vec3;

fn main() {
    let g: f64 = 9.81;
    let d = 100.0;
    let c = (g * d).sqrt();
    println!("g = {g}, D = {d}, gravity-wave speed {c:.4} m/s");
    println!("{:>8} {:>12} {:>12} {:>12} {:>12}  subcritical", "|u|/c", "l1", "l2", "l3", "l4");
    for froude in [0.0, 0.5, 0.9, 0.999, 1.001, 1.5] {
        let u = Vec3::new(froude * c, 0.0, 0.0);
        let (eig, sub) = entropy_hessian_eigs(&u, d, g);
        println!(
            "{froude:>8} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e}  {sub}",
            eig[0], eig[1], eig[2], eig[3]
        );
    }
}
