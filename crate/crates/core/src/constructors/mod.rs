//! Built-in algebras and builders for Heisenberg-Reiter and semisimple-module
//! algebras.

pub mod catalog;
pub mod hr;
pub mod semisimple;

use nalgebra::DMatrix;

use crate::algebra::{ScalarProduct, StepTwoAlgebra};
use crate::error::{Error, Result};
use crate::linalg;
use crate::tol::Tolerances;

pub use catalog::{builtin, names};
pub use hr::{build_heisenberg_reiter, hr_williamson, indefinite_svd, HRData, IndefSvdResult};
pub use semisimple::{build_semisimple_module, SemisimpleModuleData};

/// Step-two algebra on `v + z` whose j-mapping on the centre basis is `js`.
///
/// Brackets solve `<[V_a, V_b], Z_c> = <j(Z_c) V_a, V_b>`, so the result is
/// `[V_a, V_b] = sum_c beta_c[a][b] Z_c` with `beta = G_z^{-1} (j_c^T G_v)`.
/// Each `j_c` must be skew for `gram_v`.
pub fn algebra_from_j(
    labels: Vec<String>,
    gram_v: &DMatrix<f64>,
    gram_z: &DMatrix<f64>,
    js: &[DMatrix<f64>],
    tol: &Tolerances,
) -> Result<(StepTwoAlgebra, ScalarProduct)> {
    let (dv, dz) = (gram_v.nrows(), gram_z.nrows());
    if js.len() != dz {
        return Err(Error::Dim {
            expected: dz,
            got: js.len(),
        });
    }
    if labels.len() != dv + dz {
        return Err(Error::Dim {
            expected: dv + dz,
            got: labels.len(),
        });
    }
    let gz_inv = gram_z
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Degenerate("centre gram is singular".into()))?;
    let pairings: Vec<DMatrix<f64>> = js.iter().map(|j| j.transpose() * gram_v).collect();
    let mut brackets = Vec::new();
    for a in 0..dv {
        for b in (a + 1)..dv {
            for c in 0..dz {
                let beta: f64 = (0..dz).map(|e| gz_inv[(c, e)] * pairings[e][(a, b)]).sum();
                if beta != 0.0 {
                    brackets.push((a, b, dv + c, beta));
                }
            }
        }
    }
    let alg = StepTwoAlgebra::new(labels, &brackets, tol)?;
    let mut gram = DMatrix::zeros(dv + dz, dv + dz);
    gram.view_mut((0, 0), (dv, dv)).copy_from(gram_v);
    gram.view_mut((dv, dv), (dz, dz)).copy_from(gram_z);
    let product = ScalarProduct::new(gram, tol)?;
    Ok((alg, product))
}

/// `max |G j + (G j)^T|`.
pub fn skew_residual(gram: &DMatrix<f64>, j: &DMatrix<f64>) -> f64 {
    let gj = gram * j;
    linalg::max_abs(&(&gj + gj.transpose()))
}
