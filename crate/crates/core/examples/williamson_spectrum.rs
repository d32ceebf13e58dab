//! Eigenvalue families, Williamson counts and the linear stability verdict.
//!
//! ```text
//! cargo run --example williamson_spectrum
//! ```

use nalgebra::DMatrix;
use nilflow::spectrum::classify_eigenvalues;
use nilflow::Tolerances;

fn main() -> nilflow::Result<()> {
    let tol = Tolerances::default();
    let cases = [
        ("elliptic pair", DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0])),
        ("hyperbolic pair", DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0])),
        (
            "focus-focus quadruple",
            DMatrix::from_row_slice(
                4,
                4,
                &[
                    0.5, -1.0, 0.0, 0.0, //
                    1.0, 0.5, 0.0, 0.0, //
                    0.0, 0.0, -0.5, -1.0, //
                    0.0, 0.0, 1.0, -0.5,
                ],
            ),
        ),
        ("Jordan block at zero", DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0])),
        ("zero 4x4", DMatrix::zeros(4, 4)),
    ];
    for (name, m) in cases {
        let r = classify_eigenvalues(&m, &tol)?;
        let c = r.counts;
        println!(
            "{name:22} (k_e,k_h,k_f,k_0) = ({},{},{},{}), semisimple {}, verdict {}",
            c.k_e, c.k_h, c.k_f, c.k_0, r.semisimple, r.verdict
        );
    }
    Ok(())
}
