//! Maximizes a correlation tensor over product unit vectors.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rotinv::*;

fn main() -> rotinv::Result<()> {
    let cfg = TMaxConfig::default().with_seed(11);

    let ghz = ghz_planar_tensor(5, 0.6)?;
    let r = t_max(&ghz, &cfg)?;
    println!("GHZ(5, 0.6): T_max = {:.12} after {} starts", r.value, r.starts_used);
    println!("  maximizer angles: {:?}", r.angles().iter().map(|a| format!("{a:.4}")).collect::<Vec<_>>());

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let entries = (0..16).map(|_| rng.random_range(-1.0..=1.0)).collect();
    let random = CorrelationTensor::new(4, entries)?;
    let r = t_max(&random, &cfg)?;
    println!(
        "random N=4: T_max = {:.12}, certified = {} (grid checked: {}), max |entry| = {:.6}",
        r.value,
        r.certified,
        r.grid_checked,
        random.max_abs_entry()
    );

    // Rotating one party's frame leaves T_max unchanged.
    let rotated = random.rotate_party(2, 0.9)?;
    println!("after rotating party 3 by 0.9 rad: {:.12}", t_max(&rotated, &cfg)?.value);
    Ok(())
}
