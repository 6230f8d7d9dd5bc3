//! Compares brute-force quadrature of (E, E) with the closed form π^N ΣT².

use rotinv::functional_space::correlation_function;
use rotinv::*;

fn main() -> rotinv::Result<()> {
    for n in 1..=3 {
        let t = ghz_planar_tensor(n, 1.0)?;
        let f = correlation_function(&t);
        let quad = quadrature_inner_product(&f, &f, n, 64)?;
        let exact = analytic_inner_product(&t, &t)?;
        println!("N={n}: quadrature {quad:.12}  closed form {exact:.12}");
    }

    // A local realistic model against the quantum correlations.
    let t = ghz_planar_tensor(2, 1.0)?;
    let strategy = optimal_strategy(&t, &TMaxConfig::default())?.strategy;
    let f = |a: &[f64]| strategy.outcome(a);
    let g = correlation_function(&t);
    let quad = quadrature_inner_product(f, &g, 2, 512)?;
    println!("(E_LR, E) for N=2: quadrature {quad:.6}, exact {:.6}", lr_inner_product(&strategy, &t)?);
    Ok(())
}
