//! Checks the local realistic bound (E_LR, E) <= 4^N T_max by sampling
//! random ensembles and by the strategy that attains it.

use rotinv::lhv::bound;
use rotinv::*;

fn main() -> rotinv::Result<()> {
    let t = ghz_planar_tensor(4, 0.34)?;
    let cfg = TMaxConfig::default();

    let opt = optimal_strategy(&t, &cfg)?;
    println!("4^N T_max = {:.9}", bound(&t, &opt.t_max));
    println!("optimal deterministic strategy reaches {:.9}", opt.value);

    let report = verify_bound(&t, 20_000, 1)?;
    println!(
        "{} random ensembles: best {:.6} ({:.1}% of the bound), violations: {}",
        report.trials,
        report.max_found,
        100.0 * report.ratio.unwrap_or(0.0),
        report.violations
    );

    // Negating one party flips the sign of the inner product.
    let flipped = opt.strategy.with_party_negated(0);
    println!("one party negated: {:.9}", lr_inner_product(&flipped, &t)?);
    Ok(())
}
