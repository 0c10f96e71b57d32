//! Tabulate the probability that a degree-d symbol is released when the
//! decoder has L of k inputs left, for a handful of degrees.
//!
//! Low degrees release early (large L) and high degrees late; the curves
//! overlap only narrowly, which is what makes degree design worthwhile.

use lt_ripple::release::release_prob;

fn main() {
    let k = 100;
    let degrees = [1usize, 2, 5, 10, 20];

    print!("{:>4}", "L");
    for d in degrees {
        print!("  d={d:<8}");
    }
    println!();
    for l in (5..=k).rev().step_by(5) {
        print!("{l:>4}");
        for d in degrees {
            print!("  {:<10.6}", release_prob(k, d, l));
        }
        println!();
    }

    // each column sums to 1 over all L: every symbol is released exactly once
    print!(" sum");
    for d in degrees {
        let total: f64 = (1..=k).map(|l| release_prob(k, d, l)).sum();
        print!("  {total:<10.6}");
    }
    println!();
}
