//! Model the ripple as a random walk and fit its displacement growth.
//!
//! An unbiased walk spreads like sqrt(steps). The decoder's ripple walk is
//! biased toward its starting level, so its spread grows with a smaller
//! exponent; the fit below recovers it from simulated trajectories.

use lt_ripple::{fit_power_law_fixed, walk_biased, walk_symmetric, BarrierPolicy, WalkConfig};

fn main() -> lt_ripple::Result<()> {
    let seed = 0x57E9;

    let sym = walk_symmetric(&WalkConfig::new(10_000, 1, BarrierPolicy::None, 20_000)?, seed)?;
    println!("unbiased walk, RMS displacement vs sqrt(N):");
    for n in [10usize, 100, 1000, 10_000] {
        let rms = sym.rms_by_steps[n - 1];
        println!("  N = {n:>6}: {rms:>8.3} vs {:>8.3}", (n as f64).sqrt());
    }

    let k = 1024;
    let cfg = WalkConfig::with_defaults(k, 20_000)?;
    let walk = walk_biased(&cfg, seed)?;
    let free = walk.fit_default()?;
    let fixed = fit_power_law_fixed(&walk.rms_points(), 2.0)?;
    println!();
    println!("ripple walk at k = {k}, started at {}:", cfg.r0);
    println!("  free fit:     {:.4} L^(1/{:.4})  (residual {:.4})", free.c1, free.c2, free.residual_sq);
    println!("  sqrt-law fit: {:.4} L^(1/2)       (residual {:.4})", fixed.c1, fixed.residual_sq);
    println!("  the bias pushes the exponent below 1/2, so a ripple target");
    println!("  R(L) = c1 L^(1/c2) with c2 > 2 absorbs it without waste");
    Ok(())
}
