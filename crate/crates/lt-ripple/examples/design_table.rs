//! Design sparse degree distributions for two block sizes and print them.

use lt_ripple::{design, RippleTarget};

fn main() -> lt_ripple::Result<()> {
    for &(k, c1, c2) in &[(256usize, 1.7, 2.5), (1024, 1.9, 2.6)] {
        let target = RippleTarget::new(k, c1, c2)?;
        let sol = design(&target)?;
        println!("k = {k}, target R(L) = {c1} L^(1/{c2})");
        println!("  expected symbol demand: {:.3} ({:.4} k)", sol.n_expected, sol.n_expected / k as f64);
        println!("  residual^2 of the design system: {:.6}", sol.residual_sq_norm);
        println!("  degree  probability");
        for (d, p) in sol.distribution.support() {
            println!("  {d:>6}  {p:.4}");
        }
        println!();
    }
    Ok(())
}
