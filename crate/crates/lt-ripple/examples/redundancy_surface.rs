//! Redundancy probability of a symbol as a function of its degree and a
//! constant ripple size: large ripples waste high-degree symbols.

use lt_ripple::release::redundancy_surface;

fn main() -> lt_ripple::Result<()> {
    let k = 100;
    let surface = redundancy_surface(k)?;
    let degrees = [2usize, 3, 5, 10, 20, 40];
    let ripples = [1usize, 2, 4, 8, 16, 32];

    print!("{:>4}", "d\\R");
    for r in ripples {
        print!("  {r:>8}");
    }
    println!();
    for d in degrees {
        print!("{d:>4}");
        for r in ripples {
            match surface.get(d, r) {
                Some(v) => print!("  {v:>8.5}"),
                None => print!("  {:>8}", "-"),
            }
        }
        println!();
    }
    println!();
    println!("rows: symbol degree, columns: ripple size held constant while decoding");
    println!("'-' marks cells outside the admissible domain (d > k - R + 1)");
    Ok(())
}
