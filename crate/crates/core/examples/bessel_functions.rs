//! Bessel and Hankel functions of orders 0 and 1, with two identities as a sanity check.

use std::f64::consts::FRAC_2_PI;

use osm::specfun::{bessel_j0, bessel_j1, bessel_y0, bessel_y1, hankel1_0};

fn main() -> osm::Result<()> {
    println!("{:>6} {:>14} {:>14} {:>14} {:>14} {:>10}", "x", "J0", "J1", "Y0", "Y1", "wronskian");
    for x in [0.1, 0.5, 1.0, 2.404825557695773, 5.0, 10.0, 25.0, 80.0] {
        let (j0, j1, y0, y1) = (bessel_j0(x)?, bessel_j1(x)?, bessel_y0(x)?, bessel_y1(x)?);
        let w = j1 * y0 - j0 * y1 - FRAC_2_PI / x;
        println!("{x:>6.3} {j0:>14.10} {j1:>14.10} {y0:>14.10} {y1:>14.10} {w:>10.1e}");
    }
    let h = hankel1_0(1.0)?;
    println!("\nH0(1) = {h}");
    println!("Green's function at distance 1, k = 1: {}", h * num_complex::Complex64::new(0.0, 0.25));
    match bessel_y0(0.0) {
        Err(e) => println!("Y0(0): {e}"),
        Ok(v) => println!("Y0(0) = {v}"),
    }
    Ok(())
}
