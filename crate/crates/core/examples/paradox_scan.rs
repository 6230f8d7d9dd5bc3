//! Scans GHZ visibilities and reports where the criterion switches on and
//! where two-setting models stop existing.

use rotinv::criterion::write_scan_csv;
use rotinv::*;

fn main() -> rotinv::Result<()> {
    for n in 3..=6 {
        let th = ghz_thresholds(n)?;
        println!(
            "N={n}: violation above {:.6}, two-setting model up to {:.6}, paradox window {}",
            th.v_ri,
            th.v_two_setting,
            if th.gap_nonempty { "open" } else { "empty" }
        );
    }

    let points = ghz_scan(4, 0.30, 0.40, 20, &TMaxConfig::default())?;
    println!();
    write_scan_csv(&points, std::io::stdout().lock()).expect("stdout");
    Ok(())
}
