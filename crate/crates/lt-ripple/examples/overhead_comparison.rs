//! Average reception overhead of a designed distribution against two
//! robust soliton parameterizations at the same block size.

use lt_ripple::{run_experiment, DistributionSource, ExperimentConfig};

fn main() -> lt_ripple::Result<()> {
    let k = 1024;
    let trials = 1000;
    let seed = 0xFACE;
    let contenders = [
        ("designed c1=1.9 c2=2.6", DistributionSource::Designed { c1: 1.9, c2: 2.6 }),
        ("rsd c=0.07 delta=4.0", DistributionSource::Robust { c: 0.07, delta: 4.0 }),
        ("rsd c=0.03 delta=0.5", DistributionSource::Robust { c: 0.03, delta: 0.5 }),
    ];

    println!("k = {k}, {trials} trials each, shared random numbers");
    println!("{:<24}  {:>12}  {:>10}  {:>8}", "distribution", "avg_overhead", "std_err", "failures");
    for (label, source) in contenders {
        let cfg = ExperimentConfig::new(k, source, trials, seed);
        let res = run_experiment(&cfg)?;
        println!(
            "{label:<24}  {:>12.4}  {:>10.4}  {:>8}",
            res.avg_overhead.unwrap(),
            res.overhead_std_err.unwrap(),
            res.failures
        );
    }
    Ok(())
}
