//! The j-mapping `j : z -> so(v)` and the class predicates built on it.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::algebra::{AlgebraVector, Splitting};
use crate::error::{Error, Result};
use crate::linalg;

/// `j(Z)` as a matrix on the complement basis, together with `Z`.
#[derive(Debug, Clone, PartialEq)]
pub struct JOperator {
    source: DVector<f64>,
    matrix: DMatrix<f64>,
}

impl JOperator {
    /// The central vector `Z` in ambient coordinates.
    pub fn source(&self) -> &DVector<f64> {
        &self.source
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }
}

/// `(B_Z)_{ab} = <Z, [V_a, V_b]>` over the complement basis.
pub fn bracket_pairing(split: &Splitting, z: &DVector<f64>) -> DMatrix<f64> {
    let alg = split.algebra();
    let d = alg.dim();
    let w = split.product().gram() * z;
    let cw = DMatrix::from_fn(d, d, |i, j| {
        (0..d).map(|k| alg.structure_constant(i, j, k) * w[k]).sum()
    });
    let v = split.complement_basis();
    v.transpose() * cw * v
}

/// Solve `<j(Z) V_a, V_b>_v = <Z, [V_a, V_b]>_z` for `j(Z)`.
pub fn j_operator(split: &Splitting, z: &AlgebraVector) -> Result<JOperator> {
    split.algebra().check_dim(z)?;
    let tol = split.tol();
    let off = split.v_part(z).norm();
    if off > tol.num * z.norm().max(1.0) {
        return Err(Error::NotCentral(off));
    }
    let m = split.dim_v();
    if m == 0 {
        return Ok(JOperator {
            source: z.coords().clone(),
            matrix: DMatrix::zeros(0, 0),
        });
    }
    let bz = bracket_pairing(split, z);
    let gv = split.gram_v();
    let matrix = linalg::solve(gv, &(-&bz)).ok_or(Error::ComplementDegenerate)?;
    let gj = gv * &matrix;
    let skew = (&gj + gj.transpose()).amax();
    if skew > tol.num * bz.amax().max(1.0) * split.scale() {
        return Err(Error::Skew(skew));
    }
    Ok(JOperator {
        source: z.coords().clone(),
        matrix,
    })
}

/// `j(Z)` for `Z` given in center-basis coordinates.
pub fn j_from_center_coords(split: &Splitting, b: &DVector<f64>) -> Result<JOperator> {
    if b.len() != split.dim_z() {
        return Err(Error::Dim {
            expected: split.dim_z(),
            got: b.len(),
        });
    }
    j_operator(split, &AlgebraVector::new(split.from_z_coords(b)))
}

/// The closed form `(ad_U)^T Y = j(Y_z) U_v`, in ambient coordinates.
pub fn ad_transpose_closed_form(
    split: &Splitting,
    u: &AlgebraVector,
    y: &AlgebraVector,
) -> Result<DVector<f64>> {
    split.algebra().check_dim(u)?;
    let j = j_operator(split, &AlgebraVector::new(split.z_part(y)))?;
    Ok(split.from_v_coords(&(j.matrix() * split.v_coords(u))))
}

/// Largest violation of the defining relation over all basis pairs and
/// center basis vectors.
pub fn defining_residual(split: &Splitting) -> Result<f64> {
    let gv = split.gram_v();
    let mut worst = 0.0_f64;
    for c in 0..split.dim_z() {
        let z = split.center_basis().column(c).into_owned();
        let j = j_operator(split, &AlgebraVector::new(z.clone()))?;
        let lhs = j.matrix().transpose() * gv;
        let rhs = bracket_pairing(split, &z);
        worst = worst.max((lhs - rhs).amax());
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PseudoHCheck {
    /// `max |j(Z)^2 + <Z,Z> id|` over the polarization set.
    pub residual: f64,
    pub holds: bool,
}

/// Test `j(Z)^2 = -<Z,Z> id` on `{Z_i} + {Z_i + Z_j}`.
pub fn check_pseudo_h(split: &Splitting) -> Result<PseudoHCheck> {
    let n = split.dim_z();
    let m = split.dim_v();
    let mut probes = Vec::new();
    for i in 0..n {
        let mut e = DVector::zeros(n);
        e[i] = 1.0;
        probes.push(e);
        for k in (i + 1)..n {
            let mut e = DVector::zeros(n);
            e[i] = 1.0;
            e[k] = 1.0;
            probes.push(e);
        }
    }
    let mut residual = 0.0_f64;
    let mut scale = 1.0_f64;
    for b in probes {
        let zz = (b.transpose() * split.gram_z() * &b)[(0, 0)];
        let j = j_from_center_coords(split, &b)?;
        let sq = j.matrix() * j.matrix();
        scale = scale.max(sq.amax()).max(zz.abs());
        residual = residual.max((sq + DMatrix::identity(m, m) * zz).amax());
    }
    Ok(PseudoHCheck {
        residual,
        holds: residual <= split.tol().num * scale,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Metivier {
    True,
    False,
    ProbablyTrue,
}

impl std::fmt::Display for Metivier {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Metivier::True => "true",
            Metivier::False => "false",
            Metivier::ProbablyTrue => "probably_true",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassReport {
    pub carnot: bool,
    pub metivier: Metivier,
    pub h_type: bool,
    pub pseudo_h_type: bool,
    pub pseudo_h_residual: f64,
    /// A central `Z` (ambient coordinates) with singular `j(Z)` when `metivier` is false.
    pub witness: Option<Vec<f64>>,
    /// Basis label of the witness when it is a multiple of one basis vector.
    pub witness_label: Option<String>,
    pub evidence: String,
}

fn singular(split: &Splitting, b: &DVector<f64>) -> Result<bool> {
    let j = j_from_center_coords(split, b)?;
    Ok(linalg::rank(j.matrix(), split.tol().rank) < split.dim_v())
}

fn label_of(split: &Splitting, z: &DVector<f64>) -> Option<String> {
    let amax = z.amax();
    let mut nz = z.iter().enumerate().filter(|(_, x)| x.abs() > 1e-12 * amax);
    let (i, _) = nz.next()?;
    if nz.next().is_some() {
        return None;
    }
    Some(split.algebra().labels()[i].clone())
}

/// Decide the Carnot, Métivier, H-type and pseudo-H-type predicates.
///
/// Métivier is certified when the algebra is not Carnot, when it is
/// pseudo-H-type, or when the center is one-dimensional; otherwise `probes`
/// seeded random directions plus the center basis are tested and a clean
/// sweep gives `ProbablyTrue`.
pub fn classify_algebra(split: &Splitting, probes: usize, seed: u64) -> Result<ClassReport> {
    let tol = split.tol();
    let n = split.dim_z();
    let m = split.dim_v();

    // Center coordinates of every [V_a, V_b].
    let v = split.complement_basis();
    let mut images = Vec::new();
    for a in 0..m {
        for b in (a + 1)..m {
            let br = split.algebra().bracket(
                &AlgebraVector::new(v.column(a).into_owned()),
                &AlgebraVector::new(v.column(b).into_owned()),
            )?;
            images.push(split.z_coords(&br));
        }
    }
    let span = if images.is_empty() {
        0
    } else {
        linalg::rank(&linalg::columns_to_matrix(n, &images), tol.rank)
    };
    let carnot = span == n;

    let ph = check_pseudo_h(split)?;
    let positive = split.product().is_positive_definite();
    let h_type = ph.holds && positive;

    let (metivier, witness_b, evidence) = if !carnot {
        // Any Z orthogonal to [v, v] pairs trivially with every bracket.
        let img = if images.is_empty() {
            DMatrix::zeros(n, 0)
        } else {
            linalg::columns_to_matrix(n, &images)
        };
        let ortho = linalg::null_space(&(img.transpose() * split.gram_z()), tol.rank);
        let w = ortho.column(0).into_owned();
        (
            Metivier::False,
            Some(w),
            format!("[v, v] spans {span} of {n} center dimensions"),
        )
    } else if ph.holds {
        let (pos, neg) = split.signature_z();
        if pos == 0 || neg == 0 {
            (
                Metivier::True,
                None,
                "pseudo-H-type with definite center form: j(Z)^2 = -<Z,Z> id is invertible".into(),
            )
        } else {
            let eig = SymmetricEigen::new(split.gram_z().clone());
            let ip = (0..n).find(|&i| eig.eigenvalues[i] > 0.0).expect("positive eigenvalue");
            let ineg = (0..n).find(|&i| eig.eigenvalues[i] < 0.0).expect("negative eigenvalue");
            let w = eig.eigenvectors.column(ip) / eig.eigenvalues[ip].sqrt()
                + eig.eigenvectors.column(ineg) / (-eig.eigenvalues[ineg]).sqrt();
            (
                Metivier::False,
                Some(w),
                "pseudo-H-type with indefinite center form: null Z has j(Z)^2 = 0".into(),
            )
        }
    } else if n == 1 {
        let e = DVector::from_element(1, 1.0);
        if singular(split, &e)? {
            (Metivier::False, Some(e), "j(Z) is singular on the one-dimensional center".into())
        } else {
            (Metivier::True, None, "j(Z) is invertible on the one-dimensional center".into())
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut found = None;
        for i in 0..n {
            let mut e = DVector::zeros(n);
            e[i] = 1.0;
            if singular(split, &e)? {
                found = Some(e);
                break;
            }
        }
        if found.is_none() {
            for _ in 0..probes {
                let mut b = DVector::from_fn(n, |_, _| StandardNormal.sample(&mut rng));
                b /= b.norm();
                if singular(split, &b)? {
                    found = Some(b);
                    break;
                }
            }
        }
        match found {
            Some(b) => (Metivier::False, Some(b), "probe found a singular j(Z)".into()),
            None => (
                Metivier::ProbablyTrue,
                None,
                format!("j(Z) nonsingular on {} basis and {probes} random probes", n),
            ),
        }
    };
    let witness = witness_b.map(|b| {
        let mut z = split.from_z_coords(&b);
        let s = z.amax();
        if s > 0.0 {
            z /= s;
        }
        z
    });
    let witness_label = witness.as_ref().and_then(|z| label_of(split, z));
    Ok(ClassReport {
        carnot,
        metivier,
        h_type,
        pseudo_h_type: ph.holds,
        pseudo_h_residual: ph.residual,
        witness: witness.map(|z| z.iter().copied().collect()),
        witness_label,
        evidence,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{orthogonal_split, ScalarProduct, StepTwoAlgebra};
    use crate::tol::Tolerances;

    fn h3_split() -> Splitting {
        let t = Tolerances::default();
        let a = StepTwoAlgebra::from_brackets(3, &[(0, 1, 2, 1.0)], &t).unwrap();
        orthogonal_split(&a, &ScalarProduct::identity(3), &t).unwrap()
    }

    #[test]
    fn h3_j_is_rotation_generator() {
        let s = h3_split();
        let j = j_operator(&s, &AlgebraVector::basis(3, 2)).unwrap();
        assert_eq!(j.matrix(), &DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]));
    }

    #[test]
    fn zero_z_gives_zero_matrix() {
        let s = h3_split();
        let j = j_operator(&s, &AlgebraVector::zeros(3)).unwrap();
        assert_eq!(j.matrix().amax(), 0.0);
    }

    #[test]
    fn non_central_input_is_rejected() {
        let s = h3_split();
        let r = j_operator(&s, &AlgebraVector::basis(3, 0));
        assert!(matches!(r, Err(Error::NotCentral(_))));
    }

    #[test]
    fn closed_form_matches_matrix_ad_transpose() {
        let s = h3_split();
        let u = AlgebraVector::from(vec![0.3, -0.7, 2.0]);
        let y = AlgebraVector::from(vec![1.1, 0.4, -1.5]);
        let m = crate::algebra::ad_transpose(&s, &u).unwrap();
        let closed = ad_transpose_closed_form(&s, &u, &y).unwrap();
        assert!((m * y.coords() - closed).amax() < 1e-14);
    }

    #[test]
    fn h3_is_h_type_and_metivier() {
        let s = h3_split();
        let r = classify_algebra(&s, 8, 0).unwrap();
        assert!(r.carnot && r.h_type && r.pseudo_h_type);
        assert_eq!(r.metivier, Metivier::True);
    }

    #[test]
    fn abelian_is_not_carnot() {
        let t = Tolerances::default();
        let a = StepTwoAlgebra::from_brackets(2, &[], &t).unwrap();
        let s = orthogonal_split(&a, &ScalarProduct::identity(2), &t).unwrap();
        let r = classify_algebra(&s, 8, 0).unwrap();
        assert!(!r.carnot);
        assert_eq!(r.metivier, Metivier::False);
        assert!(r.witness.is_some());
    }
}
