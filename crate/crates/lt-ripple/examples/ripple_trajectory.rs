//! Feed a decoder exactly the designed symbol demand and watch the mean
//! ripple track its target R(L) = c1 L^(1/c2).

use lt_ripple::{ripple_trajectory, DistributionSource, ExperimentConfig};

fn main() -> lt_ripple::Result<()> {
    let k = 256;
    let cfg = ExperimentConfig::new(
        k,
        DistributionSource::Designed { c1: 1.7, c2: 2.5 },
        2000,
        0x7121,
    );
    let traj = ripple_trajectory(&cfg, None)?;
    let target = traj.target.as_ref().unwrap();

    println!(
        "k = {k}, {} symbols per decode, {} trials, {:.1}% complete within them",
        traj.n_symbols,
        traj.trials,
        100.0 * traj.success_rate
    );
    println!("{:>5}  {:>10}  {:>8}  {:>7}", "L", "mean R(L)", "target", "ratio");
    for l in (16..=k).rev().step_by(16) {
        let m = traj.mean_ripple[l];
        let t = target[l];
        println!("{l:>5}  {m:>10.3}  {t:>8.3}  {:>7.3}", m / t);
    }
    Ok(())
}
