//! Builds a noisy GHZ state, reads off its planar correlation tensor and
//! compares it with the closed form.

use rotinv::correlation::key_to_digits;
use rotinv::*;

fn main() -> rotinv::Result<()> {
    let (n, v) = (3, 0.8);
    let rho = mix_with_white_noise(&build_ghz(n)?, v)?;
    let from_state = tensor_from_state(&rho)?;
    let closed = ghz_planar_tensor(n, v)?;

    println!("GHZ({n}, {v}) planar tensor:");
    for key in 0..1usize << n {
        println!(
            "  T_{} = {:+.6}   closed form {:+.1}",
            key_to_digits(key, n),
            from_state.entry(key),
            closed.entry(key)
        );
    }
    println!("sum of squares: {}", sum_of_squares(&closed));

    // E(α) depends only on the sum of the angles.
    let settings = AngleSettings::new(vec![0.3, 1.1, -0.2]);
    println!("E(0.3, 1.1, -0.2) = {:.6}  (V cos 1.2 = {:.6})", correlation_value(&closed, &settings)?, v * 1.2f64.cos());

    println!("\n{}", closed.to_json()?);
    Ok(())
}
