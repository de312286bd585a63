//! Discrete identities of the DG operators on a random field.

use dgswe::operators::{d_curl_scalar, d_curl_vec, d_div, d_grad, inner_scalar, inner_vector, project_vector};
use dgswe::{build_mesh, ScalarField, VectorField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> dgswe::Result<()> {
    let mesh = build_mesh(6, 3, 1.0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let phi = ScalarField::from_fn(&mesh, |_, _| rng.gen_range(-1.0..1.0));
    let coeffs: Vec<f64> = (0..9).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let w = project_vector(&mesh, |x| {
        let a = dgswe::Vec3::new(coeffs[0], coeffs[1], coeffs[2]);
        let b = dgswe::Vec3::new(coeffs[3], coeffs[4], coeffs[5]);
        a.cross(x) * (1.0 + coeffs[6] * x[0] * x[1]) + b.cross(x) * (coeffs[7] * x[2] + coeffs[8])
    })?;

    let kw = VectorField::from_fn(&mesh, |e, q| mesh.node(e, q).k.cross(&w.get(e, q)));
    let div_kw = d_div(&kw, &mesh)?;
    let curl_w = d_curl_vec(&w, &mesh)?;
    let cancel = div_kw.lin_comb(1.0, &curl_w, 1.0).max_abs() / curl_w.max_abs();
    println!("div(k x w) + curl(w)           {cancel:.2e}");

    let grad = d_grad(&phi, &mesh)?;
    let curl_grad = d_curl_vec(&grad, &mesh)?.max_abs() / grad.max_norm();
    println!("curl(grad phi) / |grad phi|    {curl_grad:.2e}");

    // Element-local integration by parts: the global sum of the volume terms
    // leaves only the interface contributions.
    let lhs = inner_vector(&grad, &w, &mesh)? + inner_scalar(&phi, &d_div(&w, &mesh)?, &mesh)?;
    println!("<grad phi, w> + <phi, div w>   {lhs:.6e} (boundary terms only)");

    let c = d_curl_scalar(&phi, &mesh)?;
    println!("max |curl phi|                 {:.4e}", c.max_norm());
    Ok(())
}
