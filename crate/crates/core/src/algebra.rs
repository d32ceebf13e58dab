//! Step-two nilpotent Lie algebras with a scalar product, and the
//! orthogonal splitting `g = v + z` into complement and center.

use std::ops::Deref;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::tol::Tolerances;

/// Coordinates of an element of the algebra in the declared basis.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraVector(DVector<f64>);

impl AlgebraVector {
    pub fn new(coords: DVector<f64>) -> Self {
        Self(coords)
    }

    pub fn zeros(dim: usize) -> Self {
        Self(DVector::zeros(dim))
    }

    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = DVector::zeros(dim);
        v[i] = 1.0;
        Self(v)
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DVector<f64> {
        self.0
    }
}

impl Deref for AlgebraVector {
    type Target = DVector<f64>;
    fn deref(&self) -> &DVector<f64> {
        &self.0
    }
}

impl From<Vec<f64>> for AlgebraVector {
    fn from(v: Vec<f64>) -> Self {
        Self(DVector::from_vec(v))
    }
}

impl From<DVector<f64>> for AlgebraVector {
    fn from(v: DVector<f64>) -> Self {
        Self(v)
    }
}

/// A Lie algebra given by structure constants `[e_i, e_j] = sum_k c[i][j][k] e_k`,
/// validated to satisfy the Jacobi identity and to be step-two nilpotent.
#[derive(Debug, Clone, PartialEq)]
pub struct StepTwoAlgebra {
    dim: usize,
    labels: Vec<String>,
    // Dense tensor, index (i * dim + j) * dim + k.
    c: Vec<f64>,
}

impl StepTwoAlgebra {
    /// Build from bracket declarations `(i, j, k, c)` meaning `[e_i, e_j]`
    /// has `c` as its `e_k` coefficient. Repeated declarations accumulate and
    /// the antisymmetric partner `[e_j, e_i]` is filled in.
    pub fn new(
        labels: Vec<String>,
        brackets: &[(usize, usize, usize, f64)],
        tol: &Tolerances,
    ) -> Result<Self> {
        let dim = labels.len();
        let mut c = vec![0.0; dim * dim * dim];
        for &(i, j, k, v) in brackets {
            if i >= dim || j >= dim || k >= dim {
                return Err(Error::Schema(format!(
                    "bracket index ({i}, {j}, {k}) out of range for dimension {dim}"
                )));
            }
            if i == j {
                return Err(Error::Schema(format!("bracket [e_{i}, e_{i}] declared")));
            }
            c[(i * dim + j) * dim + k] += v;
            c[(j * dim + i) * dim + k] -= v;
        }
        let alg = Self { dim, labels, c };
        alg.validate(tol)?;
        Ok(alg)
    }

    /// Same as [`StepTwoAlgebra::new`] with generated labels `e1..ed`.
    pub fn from_brackets(
        dim: usize,
        brackets: &[(usize, usize, usize, f64)],
        tol: &Tolerances,
    ) -> Result<Self> {
        let labels = (1..=dim).map(|i| format!("e{i}")).collect();
        Self::new(labels, brackets, tol)
    }

    fn validate(&self, tol: &Tolerances) -> Result<()> {
        let d = self.dim;
        let cmax = self.c.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
        let thresh = tol.alg * cmax.max(1.0).powi(2);
        let e = |i| AlgebraVector::basis(d, i);
        for i in 0..d {
            for j in (i + 1)..d {
                for k in (j + 1)..d {
                    let a = self.bracket_raw(&e(i), &self.bracket_raw(&e(j), &e(k)));
                    let b = self.bracket_raw(&e(j), &self.bracket_raw(&e(k), &e(i)));
                    let cc = self.bracket_raw(&e(k), &self.bracket_raw(&e(i), &e(j)));
                    let residual = (a + b + cc).amax();
                    if residual > thresh {
                        return Err(Error::Jacobi {
                            residual,
                            i,
                            j,
                            k,
                        });
                    }
                }
            }
        }
        for j in 0..d {
            for k in (j + 1)..d {
                let inner = self.bracket_raw(&e(j), &e(k));
                if inner.amax() == 0.0 {
                    continue;
                }
                for i in 0..d {
                    let residual = self.bracket_raw(&e(i), &inner).amax();
                    if residual > thresh {
                        return Err(Error::NotStepTwo {
                            residual,
                            i,
                            j,
                            k,
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> f64 {
        self.c[(i * self.dim + j) * self.dim + k]
    }

    /// Non-zero structure constants with `i < j`.
    pub fn declared_brackets(&self) -> Vec<(usize, usize, usize, f64)> {
        let d = self.dim;
        let mut out = Vec::new();
        for i in 0..d {
            for j in (i + 1)..d {
                for k in 0..d {
                    let v = self.structure_constant(i, j, k);
                    if v != 0.0 {
                        out.push((i, j, k, v));
                    }
                }
            }
        }
        out
    }

    pub fn is_abelian(&self) -> bool {
        self.c.iter().all(|x| *x == 0.0)
    }

    fn bracket_raw(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let d = self.dim;
        let mut out = DVector::zeros(d);
        for i in 0..d {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..d {
                let w = x[i] * y[j];
                if w == 0.0 {
                    continue;
                }
                let base = (i * d + j) * d;
                for k in 0..d {
                    out[k] += w * self.c[base + k];
                }
            }
        }
        out
    }

    pub fn bracket(&self, x: &AlgebraVector, y: &AlgebraVector) -> Result<AlgebraVector> {
        self.check_dim(x)?;
        self.check_dim(y)?;
        Ok(AlgebraVector(self.bracket_raw(x, y)))
    }

    /// Matrix of `ad_U : W -> [U, W]`.
    pub fn ad(&self, u: &DVector<f64>) -> DMatrix<f64> {
        let d = self.dim;
        DMatrix::from_fn(d, d, |k, j| {
            (0..d).map(|i| u[i] * self.structure_constant(i, j, k)).sum()
        })
    }

    pub(crate) fn check_dim(&self, x: &DVector<f64>) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::Dim {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(())
    }
}

/// Non-degenerate symmetric bilinear form on the algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarProduct {
    gram: DMatrix<f64>,
    signature: (usize, usize),
}

impl ScalarProduct {
    pub fn new(gram: DMatrix<f64>, tol: &Tolerances) -> Result<Self> {
        if gram.nrows() != gram.ncols() {
            return Err(Error::Dim {
                expected: gram.nrows(),
                got: gram.ncols(),
            });
        }
        let asym = (&gram - gram.transpose()).amax();
        if asym > 1e-12 * linalg::max_abs(&gram).max(1.0) {
            return Err(Error::Degenerate(format!("gram is not symmetric ({asym:e})")));
        }
        let gram = (&gram + gram.transpose()) * 0.5;
        let signature = linalg::signature(&gram, tol.rank)?;
        Ok(Self { gram, signature })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            gram: DMatrix::identity(dim, dim),
            signature: (dim, 0),
        }
    }

    pub fn diagonal(entries: &[f64], tol: &Tolerances) -> Result<Self> {
        Self::new(
            DMatrix::from_diagonal(&DVector::from_column_slice(entries)),
            tol,
        )
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn signature(&self) -> (usize, usize) {
        self.signature
    }

    pub fn dim(&self) -> usize {
        self.gram.nrows()
    }

    pub fn is_positive_definite(&self) -> bool {
        self.signature.1 == 0
    }

    pub fn inner(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        linalg::form(&self.gram, x, y)
    }
}

/// Signature of a symmetric matrix with the relative dead band `tol.rank`.
pub fn signature(m: &DMatrix<f64>, tol: &Tolerances) -> Result<(usize, usize)> {
    linalg::signature(m, tol.rank)
}

/// Euclidean-orthonormal basis of the center `{X : [X, g] = 0}`, as columns.
///
/// Depends only on the structure constants. Basis vectors of the declared
/// basis that are central are returned exactly.
pub fn compute_center(alg: &StepTwoAlgebra, tol: &Tolerances) -> DMatrix<f64> {
    let d = alg.dim();
    // Row block j holds the map X -> [X, e_j].
    let stacked = DMatrix::from_fn(d * d, d, |r, i| {
        let (j, k) = (r / d, r % d);
        alg.structure_constant(i, j, k)
    });
    let kernel = linalg::null_space(&stacked, tol.rank);
    let mut basis = linalg::orthonormalize_columns(&kernel, tol.rank);
    linalg::snap(&mut basis, 1e-15);
    for mut c in basis.column_iter_mut() {
        let n = c.norm();
        if n > 0.0 {
            c /= n;
        }
    }
    basis
}

/// The decomposition `g = v + z` with `v` the orthogonal complement of the center.
#[derive(Debug, Clone)]
pub struct Splitting {
    algebra: StepTwoAlgebra,
    product: ScalarProduct,
    tol: Tolerances,
    complement: DMatrix<f64>,
    center: DMatrix<f64>,
    // Inverse of [complement | center]; maps ambient coordinates to split ones.
    to_split: DMatrix<f64>,
    gram_v: DMatrix<f64>,
    gram_z: DMatrix<f64>,
    sig_v: (usize, usize),
    sig_z: (usize, usize),
}

/// Split the algebra orthogonally. Fails when the scalar product restricted to
/// the center is degenerate.
pub fn orthogonal_split(
    alg: &StepTwoAlgebra,
    product: &ScalarProduct,
    tol: &Tolerances,
) -> Result<Splitting> {
    let d = alg.dim();
    if product.dim() != d {
        return Err(Error::Dim {
            expected: d,
            got: product.dim(),
        });
    }
    let g = product.gram();
    let center = compute_center(alg, tol);
    let c = center.ncols();
    let gram_z = center.transpose() * g * &center;
    let sig_z = if c == 0 {
        (0, 0)
    } else {
        linalg::signature(&gram_z, tol.rank).map_err(|_| Error::CenterDegenerate)?
    };

    // Projector onto z^perp along z.
    let proj_v = if c == 0 {
        DMatrix::identity(d, d)
    } else {
        let inv = gram_z
            .clone()
            .try_inverse()
            .ok_or(Error::CenterDegenerate)?;
        DMatrix::identity(d, d) - &center * inv * center.transpose() * g
    };
    let m = d - c;
    let mut cols = linalg::independent_columns(&proj_v, m);
    if cols.len() < m {
        return Err(Error::ComplementDegenerate);
    }
    cols.truncate(m);
    let mut complement = DMatrix::from_fn(d, m, |i, j| proj_v[(i, cols[j])]);
    linalg::snap(&mut complement, 1e-15);

    let gram_v = complement.transpose() * g * &complement;
    let sig_v = if m == 0 {
        (0, 0)
    } else {
        linalg::signature(&gram_v, tol.rank).map_err(|_| Error::ComplementDegenerate)?
    };
    let mut full = DMatrix::zeros(d, d);
    full.columns_mut(0, m).copy_from(&complement);
    full.columns_mut(m, c).copy_from(&center);
    let to_split = full.try_inverse().ok_or(Error::ComplementDegenerate)?;
    Ok(Splitting {
        algebra: alg.clone(),
        product: product.clone(),
        tol: *tol,
        complement,
        center,
        to_split,
        gram_v,
        gram_z,
        sig_v,
        sig_z,
    })
}

impl Splitting {
    pub fn algebra(&self) -> &StepTwoAlgebra {
        &self.algebra
    }

    pub fn product(&self) -> &ScalarProduct {
        &self.product
    }

    pub fn tol(&self) -> &Tolerances {
        &self.tol
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    pub fn dim_v(&self) -> usize {
        self.complement.ncols()
    }

    pub fn dim_z(&self) -> usize {
        self.center.ncols()
    }

    /// Complement basis vectors as columns (ambient coordinates).
    pub fn complement_basis(&self) -> &DMatrix<f64> {
        &self.complement
    }

    /// Center basis vectors as columns (ambient coordinates).
    pub fn center_basis(&self) -> &DMatrix<f64> {
        &self.center
    }

    pub fn gram_v(&self) -> &DMatrix<f64> {
        &self.gram_v
    }

    pub fn gram_z(&self) -> &DMatrix<f64> {
        &self.gram_z
    }

    pub fn signature_v(&self) -> (usize, usize) {
        self.sig_v
    }

    pub fn signature_z(&self) -> (usize, usize) {
        self.sig_z
    }

    /// Coordinates of `y` in the complement basis and in the center basis.
    pub fn split(&self, y: &DVector<f64>) -> (DVector<f64>, DVector<f64>) {
        let s = &self.to_split * y;
        let m = self.dim_v();
        (s.rows(0, m).into_owned(), s.rows(m, self.dim_z()).into_owned())
    }

    pub fn v_coords(&self, y: &DVector<f64>) -> DVector<f64> {
        self.split(y).0
    }

    pub fn z_coords(&self, y: &DVector<f64>) -> DVector<f64> {
        self.split(y).1
    }

    pub fn from_v_coords(&self, a: &DVector<f64>) -> DVector<f64> {
        &self.complement * a
    }

    pub fn from_z_coords(&self, b: &DVector<f64>) -> DVector<f64> {
        &self.center * b
    }

    /// Ambient component `Y_v`.
    pub fn v_part(&self, y: &DVector<f64>) -> DVector<f64> {
        self.from_v_coords(&self.v_coords(y))
    }

    /// Ambient component `Y_z`.
    pub fn z_part(&self, y: &DVector<f64>) -> DVector<f64> {
        self.from_z_coords(&self.z_coords(y))
    }

    pub fn scale(&self) -> f64 {
        linalg::max_abs(self.product.gram()).max(1.0)
    }
}

/// Matrix of `Y -> (ad_U)^T Y`, the adjoint of `ad_U` with respect to the
/// scalar product: `<(ad_U)^T Y, W> = <Y, [U, W]>`.
pub fn ad_transpose(split: &Splitting, u: &AlgebraVector) -> Result<DMatrix<f64>> {
    split.algebra.check_dim(u)?;
    let g = split.product.gram();
    let ad = split.algebra.ad(u);
    let ginv = g
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Degenerate("gram not invertible".into()))?;
    Ok(ginv * ad.transpose() * g)
}

/// Serialized algebra description: structure constants plus metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraDocument {
    pub dim: usize,
    pub basis: Vec<String>,
    pub brackets: Vec<BracketEntry>,
    pub metric: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BracketEntry {
    pub i: usize,
    pub j: usize,
    pub out: Vec<BracketTerm>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BracketTerm {
    pub k: usize,
    pub c: f64,
}

impl AlgebraDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }

    pub fn from_parts(alg: &StepTwoAlgebra, product: &ScalarProduct) -> Self {
        let d = alg.dim();
        let mut brackets: Vec<BracketEntry> = Vec::new();
        for (i, j, k, c) in alg.declared_brackets() {
            match brackets.last_mut() {
                Some(b) if b.i == i && b.j == j => b.out.push(BracketTerm { k, c }),
                _ => brackets.push(BracketEntry {
                    i,
                    j,
                    out: vec![BracketTerm { k, c }],
                }),
            }
        }
        let g = product.gram();
        Self {
            dim: d,
            basis: alg.labels().to_vec(),
            brackets,
            metric: (0..d).map(|i| (0..d).map(|j| g[(i, j)]).collect()).collect(),
        }
    }
}

/// Parse and validate an algebra JSON document.
pub fn load_algebra(text: &str, tol: &Tolerances) -> Result<(StepTwoAlgebra, ScalarProduct)> {
    let doc = AlgebraDocument::from_json(text)?;
    algebra_from_document(&doc, tol)
}

pub fn algebra_from_document(
    doc: &AlgebraDocument,
    tol: &Tolerances,
) -> Result<(StepTwoAlgebra, ScalarProduct)> {
    let d = doc.dim;
    if d == 0 {
        return Err(Error::Schema("dim must be positive".into()));
    }
    if doc.basis.len() != d {
        return Err(Error::Schema(format!(
            "basis has {} labels, expected {d}",
            doc.basis.len()
        )));
    }
    let mut entries = Vec::new();
    for b in &doc.brackets {
        if b.i >= b.j {
            return Err(Error::Schema(format!(
                "bracket entries need i < j, got ({}, {})",
                b.i, b.j
            )));
        }
        if b.j >= d {
            return Err(Error::Schema(format!("bracket index {} out of range", b.j)));
        }
        for t in &b.out {
            if t.k >= d {
                return Err(Error::Schema(format!("output index {} out of range", t.k)));
            }
            if !t.c.is_finite() {
                return Err(Error::Schema("non-finite structure constant".into()));
            }
            entries.push((b.i, b.j, t.k, t.c));
        }
    }
    if doc.metric.len() != d || doc.metric.iter().any(|r| r.len() != d) {
        return Err(Error::Schema(format!("metric must be {d}x{d}")));
    }
    let gram = DMatrix::from_fn(d, d, |i, j| doc.metric[i][j]);
    if gram.iter().any(|x| !x.is_finite()) {
        return Err(Error::Schema("non-finite metric entry".into()));
    }
    if (&gram - gram.transpose()).amax() > 1e-12 {
        return Err(Error::Schema("metric is not symmetric to 1e-12".into()));
    }
    let alg = StepTwoAlgebra::new(doc.basis.clone(), &entries, tol)?;
    let product = ScalarProduct::new(gram, tol)?;
    Ok((alg, product))
}
