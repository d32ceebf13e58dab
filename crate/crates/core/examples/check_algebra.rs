//! Build an algebra from structure constants, split it against a metric and
//! classify it.
//!
//! ```text
//! cargo run --example check_algebra
//! ```

use nilflow::algebra::{orthogonal_split, AlgebraDocument};
use nilflow::jmap::classify_algebra;
use nilflow::{ScalarProduct, StepTwoAlgebra, Tolerances};

fn main() -> nilflow::Result<()> {
    let tol = Tolerances::default();
    // Two Heisenberg factors sharing one centre: [X1,Y1] = Z, [X2,Y2] = 2Z.
    let labels = ["X1", "Y1", "X2", "Y2", "Z"].map(String::from).to_vec();
    let alg = StepTwoAlgebra::new(labels, &[(0, 1, 4, 1.0), (2, 3, 4, 2.0)], &tol)?;
    let product = ScalarProduct::identity(5);
    let split = orthogonal_split(&alg, &product, &tol)?;
    println!(
        "dim {}, centre dim {} with signature {:?}",
        alg.dim(),
        split.dim_z(),
        split.signature_z()
    );
    let report = classify_algebra(&split, 32, 0)?;
    println!(
        "carnot: {}, metivier: {}, h_type: {}",
        report.carnot, report.metivier, report.h_type
    );
    println!("{}", report.evidence);
    println!("{}", AlgebraDocument::from_parts(&alg, &product).to_json());

    // A Jacobi violation is rejected with its offending triple.
    let bad = StepTwoAlgebra::from_brackets(3, &[(0, 1, 2, 1.0), (0, 2, 0, 1.0)], &tol);
    println!("invalid input: {}", bad.unwrap_err());
    Ok(())
}
