//! Step-two algebras `v + k` built from an orthogonal representation of a
//! compact semisimple Lie algebra `k` on `v`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{algebra_from_j, skew_residual};
use crate::algebra::{ScalarProduct, StepTwoAlgebra};
use crate::error::{Error, Result};
use crate::expm::expm;
use crate::linalg;
use crate::tol::Tolerances;

#[derive(Debug, Clone, PartialEq)]
pub struct SemisimpleModuleData {
    pub dim_v: usize,
    pub dim_z: usize,
    /// `reps[c]` is the action of the `c`-th basis vector of `z` on `v`.
    pub reps: Vec<DMatrix<f64>>,
    /// Dense structure constants of `z`, index `(a * dim_z + b) * dim_z + c`.
    pub bracket_z: Vec<f64>,
    pub gram_v: DMatrix<f64>,
    pub gram_z: DMatrix<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionResiduals {
    /// `[rho(a), rho(b)] = rho([a, b])`.
    pub homomorphism: f64,
    /// `rho(a)` skew for `gram_v`.
    pub skew: f64,
    /// `gram_z` invariant under `ad`.
    pub invariance: f64,
}

impl ConditionResiduals {
    pub fn max(&self) -> f64 {
        self.homomorphism.max(self.skew).max(self.invariance)
    }
}

fn levi_civita() -> Vec<f64> {
    let mut c = vec![0.0; 27];
    for (a, b, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
        c[(a * 3 + b) * 3 + k] = 1.0;
        c[(b * 3 + a) * 3 + k] = -1.0;
    }
    c
}

impl SemisimpleModuleData {
    pub fn structure_constant(&self, a: usize, b: usize, c: usize) -> f64 {
        self.bracket_z[(a * self.dim_z + b) * self.dim_z + c]
    }

    /// `so(3)` acting on `R^3` by `(L_a)_{bc} = -eps_{abc}`.
    pub fn so3_standard() -> Self {
        let eps = levi_civita();
        let reps = (0..3)
            .map(|a| DMatrix::from_fn(3, 3, |b, c| -eps[(a * 3 + b) * 3 + c]))
            .collect();
        Self {
            dim_v: 3,
            dim_z: 3,
            reps,
            bracket_z: eps,
            gram_v: DMatrix::identity(3, 3),
            gram_z: DMatrix::identity(3, 3),
        }
    }

    /// `so(3) = su(2)` acting on `H = R^4` by half of left multiplication by `i, j, k`.
    pub fn so3_spinor() -> Self {
        // Left multiplication by i, j, k in the basis (1, i, j, k).
        let li = DMatrix::from_row_slice(
            4,
            4,
            &[
                0.0, -1.0, 0.0, 0.0, //
                1.0, 0.0, 0.0, 0.0, //
                0.0, 0.0, 0.0, -1.0, //
                0.0, 0.0, 1.0, 0.0,
            ],
        );
        let lj = DMatrix::from_row_slice(
            4,
            4,
            &[
                0.0, 0.0, -1.0, 0.0, //
                0.0, 0.0, 0.0, 1.0, //
                1.0, 0.0, 0.0, 0.0, //
                0.0, -1.0, 0.0, 0.0,
            ],
        );
        let lk = &li * &lj;
        Self {
            dim_v: 4,
            dim_z: 3,
            reps: vec![li * 0.5, lj * 0.5, lk * 0.5],
            bracket_z: levi_civita(),
            gram_v: DMatrix::identity(4, 4),
            gram_z: DMatrix::identity(3, 3),
        }
    }

    /// Direct sum of modules over the same `z`.
    pub fn direct_sum(&self, other: &Self) -> Self {
        assert_eq!(self.dim_z, other.dim_z, "modules over different algebras");
        let n = self.dim_v + other.dim_v;
        let block = |a: &DMatrix<f64>, b: &DMatrix<f64>| {
            let mut m = DMatrix::zeros(n, n);
            m.view_mut((0, 0), a.shape()).copy_from(a);
            m.view_mut((a.nrows(), a.ncols()), b.shape()).copy_from(b);
            m
        };
        Self {
            dim_v: n,
            dim_z: self.dim_z,
            reps: self.reps.iter().zip(&other.reps).map(|(a, b)| block(a, b)).collect(),
            bracket_z: self.bracket_z.clone(),
            gram_v: block(&self.gram_v, &other.gram_v),
            gram_z: self.gram_z.clone(),
        }
    }

    /// `ad_a` on `z`, `(ad_a)_{cb} = c_{ab}^c`.
    fn ad(&self, a: usize) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim_z, self.dim_z, |c, b| self.structure_constant(a, b, c))
    }

    pub fn residuals(&self) -> ConditionResiduals {
        let dz = self.dim_z;
        let mut homomorphism = 0.0_f64;
        for a in 0..dz {
            for b in 0..dz {
                let comm = &self.reps[a] * &self.reps[b] - &self.reps[b] * &self.reps[a];
                let mut image = DMatrix::zeros(self.dim_v, self.dim_v);
                for c in 0..dz {
                    image += &self.reps[c] * self.structure_constant(a, b, c);
                }
                homomorphism = homomorphism.max(linalg::max_abs(&(comm - image)));
            }
        }
        let skew = self
            .reps
            .iter()
            .map(|j| skew_residual(&self.gram_v, j))
            .fold(0.0, f64::max);
        let invariance = (0..dz)
            .map(|a| skew_residual(&self.gram_z, &self.ad(a)))
            .fold(0.0, f64::max);
        ConditionResiduals {
            homomorphism,
            skew,
            invariance,
        }
    }
}

/// Assemble the algebra `v + z` whose j-mapping is the given representation.
pub fn build_semisimple_module(
    data: &SemisimpleModuleData,
    tol: &Tolerances,
) -> Result<(StepTwoAlgebra, ScalarProduct)> {
    let (dv, dz) = (data.dim_v, data.dim_z);
    if data.reps.len() != dz || data.reps.iter().any(|r| r.shape() != (dv, dv)) {
        return Err(Error::Dim {
            expected: dz,
            got: data.reps.len(),
        });
    }
    if data.bracket_z.len() != dz * dz * dz
        || data.gram_v.shape() != (dv, dv)
        || data.gram_z.shape() != (dz, dz)
    {
        return Err(Error::Schema("semisimple module data has inconsistent shapes".into()));
    }
    for g in [&data.gram_v, &data.gram_z] {
        match linalg::signature(g, tol.rank) {
            Ok((_, 0)) => {}
            _ => return Err(Error::Definite),
        }
    }
    let r = data.residuals();
    if r.max() > tol.num {
        return Err(Error::Conditions(format!(
            "homomorphism {:e}, skew {:e}, invariance {:e}",
            r.homomorphism, r.skew, r.invariance
        )));
    }
    let mut labels: Vec<String> = (1..=dv).map(|i| format!("V{i}")).collect();
    labels.extend((1..=dz).map(|i| format!("Z{i}")));
    algebra_from_j(labels, &data.gram_v, &data.gram_z, &data.reps, tol)
}

fn random_orthogonal<R: Rng>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let mut s = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let x: f64 = StandardNormal.sample(rng);
            s[(i, j)] = x;
            s[(j, i)] = -x;
        }
    }
    expm(&s)
}

/// A random `so(3)`-module: one to three irreducible summands (vector or
/// spinor), conjugated by a random rotation of `v`, with the basis of `z`
/// rotated and `gram_z` rescaled.
pub fn random_so3_module<R: Rng>(rng: &mut R) -> SemisimpleModuleData {
    let pick = |rng: &mut R| {
        if rng.random_bool(0.5) {
            SemisimpleModuleData::so3_standard()
        } else {
            SemisimpleModuleData::so3_spinor()
        }
    };
    let mut data = pick(rng);
    for _ in 0..rng.random_range(0..3) {
        data = data.direct_sum(&pick(rng));
    }
    let q = random_orthogonal(rng, data.dim_v);
    let rot = random_orthogonal(rng, 3);
    let reps: Vec<DMatrix<f64>> = (0..3)
        .map(|a| {
            let mut m = DMatrix::zeros(data.dim_v, data.dim_v);
            for b in 0..3 {
                m += &data.reps[b] * rot[(b, a)];
            }
            &q * m * q.transpose()
        })
        .collect();
    // A rotation preserves eps, so the structure constants are unchanged.
    data.reps = reps;
    data.gram_z *= rng.random_range(0.5..2.0);
    data
}

/// Unit vector in `z` in the coordinates of the built algebra.
pub fn center_vector(data: &SemisimpleModuleData, coeffs: &[f64]) -> DVector<f64> {
    let mut y = DVector::zeros(data.dim_v + data.dim_z);
    for (c, x) in coeffs.iter().enumerate() {
        y[data.dim_v + c] = *x;
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::orthogonal_split;
    use crate::jmap::j_operator;
    use crate::spectrum::{classify_eigenvalues, williamson_on_orbit, Verdict};
    use crate::AlgebraVector;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn standard_and_spinor_satisfy_conditions() {
        for d in [SemisimpleModuleData::so3_standard(), SemisimpleModuleData::so3_spinor()] {
            assert!(d.residuals().max() <= 1e-12, "{:?}", d.residuals());
        }
    }

    #[test]
    fn round_trip_reproduces_representation() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let data = random_so3_module(&mut rng);
            let (alg, product) = build_semisimple_module(&data, &tol()).unwrap();
            let split = orthogonal_split(&alg, &product, &tol()).unwrap();
            assert_eq!(split.dim_z(), 3);
            for c in 0..3 {
                let j = j_operator(&split, &AlgebraVector::basis(alg.dim(), data.dim_v + c)).unwrap();
                assert!((j.matrix() - &data.reps[c]).amax() < 1e-9);
            }
        }
    }

    #[test]
    fn so3_unit_vector_spectrum() {
        let data = SemisimpleModuleData::so3_standard();
        let (alg, product) = build_semisimple_module(&data, &tol()).unwrap();
        let split = orthogonal_split(&alg, &product, &tol()).unwrap();
        let z = AlgebraVector::new(center_vector(&data, &[0.6, 0.0, 0.8]));
        let j = j_operator(&split, &z).unwrap();
        let rep = classify_eigenvalues(j.matrix(), &tol()).unwrap();
        assert_eq!(rep.counts.williamson_type(), (1, 0, 0));
        assert!(rep.unpaired_zero);
        let (_, orbit) = williamson_on_orbit(&j, &tol()).unwrap();
        assert_eq!(orbit.counts.williamson_type(), (1, 0, 0));
        assert_eq!(orbit.verdict, Verdict::Stable);
    }

    #[test]
    fn zero_representation_is_abelian() {
        let mut data = SemisimpleModuleData::so3_standard();
        data.reps = vec![DMatrix::zeros(3, 3); 3];
        // The zero map is a homomorphism of a different algebra; drop the brackets of z.
        data.bracket_z = vec![0.0; 27];
        let (alg, _) = build_semisimple_module(&data, &tol()).unwrap();
        assert!(alg.is_abelian());
    }

    #[test]
    fn non_skew_representation_is_rejected() {
        let mut data = SemisimpleModuleData::so3_standard();
        data.reps[0][(0, 0)] = 1.0;
        assert!(matches!(build_semisimple_module(&data, &tol()), Err(Error::Conditions(_))));
    }

    #[test]
    fn indefinite_gram_is_rejected() {
        let mut data = SemisimpleModuleData::so3_standard();
        data.gram_v[(2, 2)] = -1.0;
        assert_eq!(build_semisimple_module(&data, &tol()).unwrap_err(), Error::Definite);
    }
}
