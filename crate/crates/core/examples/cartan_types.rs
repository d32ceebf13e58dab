//! Canonical Cartan matrices of so(p, q): predicted versus computed
//! Williamson types over every shape up to p + q = 8.
//!
//! ```text
//! cargo run --example cartan_types
//! ```

use nilflow::cartan::{all_shapes, cartan_matrix, cross_check, CartanParams, Family};
use nilflow::Tolerances;

fn main() -> nilflow::Result<()> {
    let tol = Tolerances::default();
    let params = CartanParams::new(Family::B, 2, 3, 0, 0, vec![0.7, 1.1])?;
    println!("B so(2,3) at h = (0.7, 1.1):{}", cartan_matrix(&params)?.matrix);
    for (i, shape) in all_shapes(8).iter().enumerate() {
        let r = cross_check(shape, 8, i as u64, &tol)?;
        println!(
            "{:>6} so({},{}) l={} k={}: predicted {:?}, {}/{} match",
            shape.family.name(),
            shape.p,
            shape.q,
            shape.l,
            shape.k,
            r.predicted,
            r.matches,
            r.trials
        );
    }
    Ok(())
}
