//! Indefinite singular value decomposition and the Heisenberg-Reiter
//! Williamson type, checked against the spectrum of the assembled j(Z).
//!
//! ```text
//! cargo run --example indefinite_svd
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use nilflow::constructors::hr::{build_heisenberg_reiter, hr_williamson, indefinite_svd, random_instance};
use nilflow::jmap::j_operator;
use nilflow::spectrum::classify_eigenvalues;
use nilflow::{AlgebraVector, Tolerances};

fn main() -> nilflow::Result<()> {
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..8 {
        let (data, phi, _) = random_instance(&mut rng, 4)?;
        let svd = indefinite_svd(&phi, data.sig1, data.sig2, &tol)?;
        let predicted = hr_williamson(&svd, data.m1(), data.m2());
        let (alg, _, split) = build_heisenberg_reiter(&data, &tol)?;
        let j = j_operator(&split, &AlgebraVector::basis(alg.dim(), data.m1() + data.m2()))?;
        let computed = classify_eigenvalues(j.matrix(), &tol)?;
        println!(
            "sig {:?} x {:?}: d = {:?}, predicted {:?}, computed {:?}, reconstruction {:.1e}",
            data.sig1,
            data.sig2,
            svd.counts,
            predicted.williamson_type,
            computed.counts.williamson_type(),
            svd.reconstruction_residual
        );
    }
    Ok(())
}
