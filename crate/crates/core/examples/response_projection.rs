//! Projects ±1 response functions onto span{cos, sin} and shows the
//! saturating step function that reaches the norm bound.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rotinv::functional_space::projection_norm_bound;
use rotinv::*;

fn main() -> rotinv::Result<()> {
    println!("norm bound 4/sqrt(pi) = {:.9}", projection_norm_bound());

    let flat = ResponseFunction::constant(1.0)?.project();
    println!("constant +1: a = {}, b = {}, norm = {}", flat.a, flat.b, flat.norm);

    let step = ResponseFunction::new(vec![1.0, 2.5], -1.0)?.project();
    println!("two-break step: a = {:.6}, b = {:.6}, norm = {:.6}", step.a, step.b, step.norm);

    let psi = 0.7;
    let sat = saturating_response(psi);
    let p = sat.project();
    println!(
        "saturating at psi = {psi}: breakpoints {:?}, norm = {:.9}, beta = {:.6}",
        sat.breakpoints(),
        p.norm,
        p.beta
    );

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..4 {
        let r = ResponseFunction::random(&mut rng);
        println!("random ({} breaks): norm = {:.6}", r.breakpoints().len(), r.project().norm);
    }
    Ok(())
}
