//! Block error rate against reception overhead for a designed distribution
//! and a robust soliton baseline.

use lt_ripple::{run_experiment, DistributionSource, ExperimentConfig};

fn main() -> lt_ripple::Result<()> {
    let k = 1024;
    let trials = 2000;
    let seed = 0xBE12;
    let designed = ExperimentConfig::new(
        k,
        DistributionSource::Designed { c1: 1.9, c2: 2.6 },
        trials,
        seed,
    );
    let rsd = ExperimentConfig::new(
        k,
        DistributionSource::Robust { c: 0.07, delta: 4.0 },
        trials,
        seed,
    );
    let a = run_experiment(&designed)?;
    let b = run_experiment(&rsd)?;

    println!("k = {k}, {trials} trials; error rate = share of blocks not decoded");
    println!("{:>6}  {:>10}  {:>10}", "alpha", "designed", "rsd");
    for (&(alpha, ber_a), &(_, ber_b)) in a.ber.iter().zip(&b.ber) {
        // print every fifth grid point to keep the table short
        if (alpha * 100.0).round() as usize % 5 == 0 {
            println!("{alpha:>6.2}  {ber_a:>10.4}  {ber_b:>10.4}");
        }
    }
    Ok(())
}
