//! Algebras built from so(3)-modules: every j(Z) is elliptic and the
//! orbit-restricted verdict is Stable.
//!
//! ```text
//! cargo run --example semisimple_module
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use nilflow::algebra::orthogonal_split;
use nilflow::constructors::semisimple::{build_semisimple_module, center_vector, random_so3_module};
use nilflow::jmap::j_operator;
use nilflow::spectrum::williamson_on_orbit;
use nilflow::{AlgebraVector, Tolerances};

fn main() -> nilflow::Result<()> {
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..5 {
        let data = random_so3_module(&mut rng);
        let (alg, product) = build_semisimple_module(&data, &tol)?;
        let split = orthogonal_split(&alg, &product, &tol)?;
        let z = AlgebraVector::new(center_vector(&data, &[0.3, -0.5, 0.8]));
        let j = j_operator(&split, &z)?;
        let (full, orbit) = williamson_on_orbit(&j, &tol)?;
        println!(
            "dim v = {}: full type {:?} (k_0 = {}), orbit type {:?}, verdict {}",
            data.dim_v,
            full.counts.williamson_type(),
            full.counts.k_0,
            orbit.counts.williamson_type(),
            orbit.verdict
        );
    }
    Ok(())
}
