//! Named example algebras with their canonical metrics.

use nalgebra::{DMatrix, DVector};

use super::hr::{build_heisenberg_reiter, HRData};
use super::semisimple::{build_semisimple_module, SemisimpleModuleData};
use super::algebra_from_j;
use crate::algebra::{ScalarProduct, StepTwoAlgebra};
use crate::error::{Error, Result};
use crate::tol::Tolerances;

const NAMES: [&str; 7] = [
    "heisenberg3",
    "h3_plus_h3",
    "metivier5",
    "pseudoH_1_1",
    "pseudoH_2_2",
    "hr_example",
    "ss_so3",
];

pub fn names() -> &'static [&'static str] {
    &NAMES
}

fn diag(d: &[f64]) -> DMatrix<f64> {
    DMatrix::from_diagonal(&DVector::from_column_slice(d))
}

fn labels(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

/// Look up a catalog entry.
pub fn builtin(name: &str) -> Result<(StepTwoAlgebra, ScalarProduct)> {
    let tol = Tolerances::default();
    match name {
        "heisenberg3" => Ok((
            StepTwoAlgebra::new(labels(&["X", "Y", "Z"]), &[(0, 1, 2, 1.0)], &tol)?,
            ScalarProduct::identity(3),
        )),
        "h3_plus_h3" => Ok((
            StepTwoAlgebra::new(
                labels(&["X1", "Y1", "Z1", "X2", "Y2", "Z2"]),
                &[(0, 1, 2, 1.0), (3, 4, 5, 1.0)],
                &tol,
            )?,
            ScalarProduct::identity(6),
        )),
        "metivier5" => Ok((
            StepTwoAlgebra::new(
                labels(&["X1", "Y1", "X2", "Y2", "Z"]),
                &[(0, 1, 4, 1.0), (2, 3, 4, 2.0)],
                &tol,
            )?,
            ScalarProduct::identity(5),
        )),
        "pseudoH_1_1" => {
            let j = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
            algebra_from_j(
                labels(&["V1", "V2", "Z"]),
                &diag(&[1.0, -1.0]),
                &DMatrix::from_element(1, 1, -1.0),
                &[j],
                &tol,
            )
        }
        "pseudoH_2_2" => {
            // j1 = diag(R, R), j2 = [[0, C], [C, 0]] with R a quarter turn and C = diag(1, -1).
            let j1 = DMatrix::from_row_slice(
                4,
                4,
                &[
                    0.0, -1.0, 0.0, 0.0, //
                    1.0, 0.0, 0.0, 0.0, //
                    0.0, 0.0, 0.0, -1.0, //
                    0.0, 0.0, 1.0, 0.0,
                ],
            );
            let j2 = DMatrix::from_row_slice(
                4,
                4,
                &[
                    0.0, 0.0, 1.0, 0.0, //
                    0.0, 0.0, 0.0, -1.0, //
                    1.0, 0.0, 0.0, 0.0, //
                    0.0, -1.0, 0.0, 0.0,
                ],
            );
            algebra_from_j(
                labels(&["V1", "V2", "V3", "V4", "Z1", "Z2"]),
                &diag(&[1.0, 1.0, -1.0, -1.0]),
                &diag(&[1.0, -1.0]),
                &[j1, j2],
                &tol,
            )
        }
        "hr_example" => {
            let phi = diag(&[1.0, 2.0]);
            let data = HRData::from_phi(&phi, (1, 1), (1, 1))?;
            let (alg, product, _) = build_heisenberg_reiter(&data, &tol)?;
            Ok((alg, product))
        }
        "ss_so3" => build_semisimple_module(&SemisimpleModuleData::so3_standard(), &tol),
        other => Err(Error::UnknownName(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::orthogonal_split;
    use crate::jmap::{check_pseudo_h, j_operator};
    use crate::spectrum::classify_eigenvalues;
    use crate::AlgebraVector;

    #[test]
    fn every_name_resolves() {
        for name in names() {
            let (alg, product) = builtin(name).unwrap();
            assert_eq!(alg.dim(), product.dim(), "{name}");
        }
        assert!(matches!(builtin("nope"), Err(Error::UnknownName(_))));
    }

    #[test]
    fn pseudo_h_11_reproduces_its_j() {
        let (alg, product) = builtin("pseudoH_1_1").unwrap();
        let tol = Tolerances::default();
        let split = orthogonal_split(&alg, &product, &tol).unwrap();
        let j = j_operator(&split, &AlgebraVector::basis(3, 2)).unwrap();
        assert_eq!(*j.matrix(), DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]));
        assert_eq!(split.gram_z()[(0, 0)], -1.0);
        assert_eq!(check_pseudo_h(&split).unwrap().residual, 0.0);
    }

    #[test]
    fn pseudo_h_22_is_pseudo_h() {
        let (alg, product) = builtin("pseudoH_2_2").unwrap();
        let tol = Tolerances::default();
        let split = orthogonal_split(&alg, &product, &tol).unwrap();
        let check = check_pseudo_h(&split).unwrap();
        assert!(check.holds && check.residual < 1e-14);
        // Z1 + Z2 is null, so j is nilpotent there.
        let z = AlgebraVector::from(vec![0.0, 0.0, 0.0, 0.0, 1.0, 1.0]);
        let j = j_operator(&split, &z).unwrap();
        assert!((j.matrix() * j.matrix()).amax() < 1e-14);
    }

    #[test]
    fn metivier_spectrum() {
        let (alg, product) = builtin("metivier5").unwrap();
        let tol = Tolerances::default();
        let split = orthogonal_split(&alg, &product, &tol).unwrap();
        let j = j_operator(&split, &AlgebraVector::basis(5, 4)).unwrap();
        let rep = classify_eigenvalues(j.matrix(), &tol).unwrap();
        assert_eq!(rep.counts.williamson_type(), (2, 0, 0));
        let mut im: Vec<f64> = rep.eigenvalues().iter().map(|l| l.im).collect();
        im.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (got, want) in im.iter().zip([-2.0, -1.0, 1.0, 2.0]) {
            assert!((got - want).abs() < 1e-10);
        }
    }
}
