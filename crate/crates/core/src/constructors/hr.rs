//! Heisenberg-Reiter algebras `g = u1 + u2 + w` and the indefinite singular
//! value decomposition of `Phi : v2 -> v1`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::algebra::{orthogonal_split, ScalarProduct, Splitting, StepTwoAlgebra};
use crate::error::{Error, Result};
use crate::expm::expm;
use crate::linalg;
use crate::spectrum::eigenvalues;
use crate::tol::Tolerances;

/// `diag(E_p, -E_q)`.
pub fn sign_matrix(sig: (usize, usize)) -> DMatrix<f64> {
    let n = sig.0 + sig.1;
    DMatrix::from_fn(n, n, |i, j| match (i == j, i < sig.0) {
        (true, true) => 1.0,
        (true, false) => -1.0,
        _ => 0.0,
    })
}

/// Data of a Heisenberg-Reiter algebra. `b[c]` is the `m1 x m2` matrix of
/// `W_c`-coefficients: `B(U1_a, U2_b) = sum_c b[c][(a, b)] W_c`.
#[derive(Debug, Clone, PartialEq)]
pub struct HRData {
    pub sig1: (usize, usize),
    pub sig2: (usize, usize),
    pub sig_w: (usize, usize),
    pub b: Vec<DMatrix<f64>>,
    /// Gram matrices of `u1`, `u2`, `w`; `None` means `diag(E_p, -E_q)`.
    pub grams: Option<[DMatrix<f64>; 3]>,
}

impl HRData {
    pub fn new(
        sig1: (usize, usize),
        sig2: (usize, usize),
        sig_w: (usize, usize),
        b: Vec<DMatrix<f64>>,
    ) -> Result<Self> {
        let data = Self {
            sig1,
            sig2,
            sig_w,
            b,
            grams: None,
        };
        data.check_shapes()?;
        Ok(data)
    }

    /// One-dimensional `w` with `<W, W> = 1`, encoded so that `j12(W) = Phi`.
    pub fn from_phi(phi: &DMatrix<f64>, sig1: (usize, usize), sig2: (usize, usize)) -> Result<Self> {
        if phi.shape() != (sig1.0 + sig1.1, sig2.0 + sig2.1) {
            return Err(Error::Dim {
                expected: sig1.0 + sig1.1,
                got: phi.nrows(),
            });
        }
        Self::new(sig1, sig2, (1, 0), vec![sign_matrix(sig1) * phi])
    }

    /// Supply explicit Gram matrices; their signatures must match the declared ones.
    pub fn with_grams(mut self, g1: DMatrix<f64>, g2: DMatrix<f64>, gw: DMatrix<f64>, tol: &Tolerances) -> Result<Self> {
        for (g, declared) in [(&g1, self.sig1), (&g2, self.sig2), (&gw, self.sig_w)] {
            if g.nrows() != declared.0 + declared.1 || !g.is_square() {
                return Err(Error::Dim {
                    expected: declared.0 + declared.1,
                    got: g.nrows(),
                });
            }
            let computed = linalg::signature(g, tol.rank)?;
            if computed != declared {
                return Err(Error::Signature { declared, computed });
            }
        }
        self.grams = Some([g1, g2, gw]);
        Ok(self)
    }

    pub fn m1(&self) -> usize {
        self.sig1.0 + self.sig1.1
    }

    pub fn m2(&self) -> usize {
        self.sig2.0 + self.sig2.1
    }

    pub fn dim_w(&self) -> usize {
        self.sig_w.0 + self.sig_w.1
    }

    fn check_shapes(&self) -> Result<()> {
        if self.b.len() != self.dim_w() {
            return Err(Error::Dim {
                expected: self.dim_w(),
                got: self.b.len(),
            });
        }
        for m in &self.b {
            if m.shape() != (self.m1(), self.m2()) {
                return Err(Error::Dim {
                    expected: self.m1(),
                    got: m.nrows(),
                });
            }
        }
        Ok(())
    }

    pub fn grams(&self) -> [DMatrix<f64>; 3] {
        match &self.grams {
            Some(g) => g.clone(),
            None => [
                sign_matrix(self.sig1),
                sign_matrix(self.sig2),
                sign_matrix(self.sig_w),
            ],
        }
    }

    /// `j12(W) : u2 -> u1` with `<j12(W) U2, U1> = <W, B(U1, U2)>`.
    pub fn j12(&self, w: &DVector<f64>) -> DMatrix<f64> {
        let [g1, _, gw] = self.grams();
        let gww = gw * w;
        let mut pairing = DMatrix::zeros(self.m1(), self.m2());
        for (c, bc) in self.b.iter().enumerate() {
            pairing += bc * gww[c];
        }
        linalg::solve(&g1, &pairing).expect("non-degenerate gram")
    }

    /// `j21(W) : u1 -> u2` with `<j21(W) U1, U2> = <W, B(U1, U2)>`.
    pub fn j21(&self, w: &DVector<f64>) -> DMatrix<f64> {
        let [_, g2, gw] = self.grams();
        let gww = gw * w;
        let mut pairing = DMatrix::zeros(self.m1(), self.m2());
        for (c, bc) in self.b.iter().enumerate() {
            pairing += bc * gww[c];
        }
        linalg::solve(&g2, &pairing.transpose()).expect("non-degenerate gram")
    }

    /// `[[0, -j12(W)], [j21(W), 0]]` on `u1 + u2`.
    pub fn block_j(&self, w: &DVector<f64>) -> DMatrix<f64> {
        let (m1, m2) = (self.m1(), self.m2());
        let mut m = DMatrix::zeros(m1 + m2, m1 + m2);
        m.view_mut((0, m1), (m1, m2)).copy_from(&(-self.j12(w)));
        m.view_mut((m1, 0), (m2, m1)).copy_from(&self.j21(w));
        m
    }
}

/// Assemble the algebra, its block-diagonal metric and the splitting.
pub fn build_heisenberg_reiter(
    data: &HRData,
    tol: &Tolerances,
) -> Result<(StepTwoAlgebra, ScalarProduct, Splitting)> {
    data.check_shapes()?;
    let (m1, m2, nw) = (data.m1(), data.m2(), data.dim_w());
    let mut labels = Vec::new();
    labels.extend((1..=m1).map(|i| format!("U1_{i}")));
    labels.extend((1..=m2).map(|i| format!("U2_{i}")));
    labels.extend((1..=nw).map(|i| format!("W_{i}")));
    let mut brackets = Vec::new();
    for (c, bc) in data.b.iter().enumerate() {
        for a in 0..m1 {
            for b in 0..m2 {
                let v = bc[(a, b)];
                if v != 0.0 {
                    brackets.push((a, m1 + b, m1 + m2 + c, v));
                }
            }
        }
    }
    let alg = StepTwoAlgebra::new(labels, &brackets, tol)?;
    let [g1, g2, gw] = data.grams();
    let d = m1 + m2 + nw;
    let mut gram = DMatrix::zeros(d, d);
    gram.view_mut((0, 0), (m1, m1)).copy_from(&g1);
    gram.view_mut((m1, m1), (m2, m2)).copy_from(&g2);
    gram.view_mut((m1 + m2, m1 + m2), (nw, nw)).copy_from(&gw);
    let product = ScalarProduct::new(gram, tol)?;
    let declared = (
        data.sig1.0 + data.sig2.0 + data.sig_w.0,
        data.sig1.1 + data.sig2.1 + data.sig_w.1,
    );
    if product.signature() != declared {
        return Err(Error::Signature {
            declared,
            computed: product.signature(),
        });
    }
    let split = orthogonal_split(&alg, &product, tol)?;
    Ok((alg, product, split))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IndefSvdResult {
    /// Columns `A_1..A_m1`, pseudo-orthonormal for `eta1`: positive vectors first.
    #[serde(skip)]
    pub basis_a: DMatrix<f64>,
    /// Columns `B_1..B_m2`, pseudo-orthonormal for `eta2`: positive vectors first.
    #[serde(skip)]
    pub basis_b: DMatrix<f64>,
    /// Diagonals of `D1..D4`: `sqrt|lambda|` for each class.
    pub blocks: [Vec<f64>; 4],
    /// `(d1, d2, d3, d4)`.
    pub counts: [usize; 4],
    pub rank: usize,
    /// `Phi` in the new bases, `S1 A^T eta1 Phi B` with `S1` the norms of `A`.
    #[serde(skip)]
    pub reconstruction: DMatrix<f64>,
    /// Expected sparse pattern of the reconstruction.
    #[serde(skip)]
    pub pattern: DMatrix<f64>,
    pub gram_residual_a: f64,
    pub gram_residual_b: f64,
    pub reconstruction_residual: f64,
}

struct Eigenspace {
    lambda: f64,
    vectors: Vec<(DVector<f64>, f64)>,
}

/// Indefinite SVD of `Phi : (R^m2, eta2) -> (R^m1, eta1)`.
pub fn indefinite_svd(
    phi: &DMatrix<f64>,
    sig1: (usize, usize),
    sig2: (usize, usize),
    tol: &Tolerances,
) -> Result<IndefSvdResult> {
    let (m1, m2) = (sig1.0 + sig1.1, sig2.0 + sig2.1);
    if phi.shape() != (m1, m2) {
        return Err(Error::Dim {
            expected: m1,
            got: phi.nrows(),
        });
    }
    let eta1 = sign_matrix(sig1);
    let eta2 = sign_matrix(sig2);
    let adj = &eta2 * phi.transpose() * &eta1;
    let k = &adj * phi;
    let scale = k.norm().max(1.0);

    // Real spectrum with a complete eigenbasis.
    let eigs = eigenvalues(&k);
    if let Some(bad) = eigs.iter().find(|l| l.im.abs() > tol.spec * scale) {
        return Err(Error::NotDiagonalizable(format!(
            "complex eigenvalue {} + {}i",
            bad.re, bad.im
        )));
    }
    let mut reals: Vec<f64> = eigs.iter().map(|l| l.re).collect();
    reals.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
    let radius = tol.cluster * scale;
    let mut clusters: Vec<Vec<f64>> = Vec::new();
    for x in reals {
        match clusters.last_mut() {
            Some(c) if (c.last().unwrap() - x).abs() <= radius => c.push(x),
            _ => clusters.push(vec![x]),
        }
    }
    let mut spaces = Vec::new();
    for c in &clusters {
        let mean = c.iter().sum::<f64>() / c.len() as f64;
        let lambda = if mean.abs() <= tol.spec * scale { 0.0 } else { mean };
        let spread = c.iter().fold(0.0_f64, |a, x| a.max((x - mean).abs()));
        let shifted = &k - DMatrix::identity(m2, m2) * lambda;
        let thresh = (tol.rank * scale).max(10.0 * spread);
        let w = linalg::svd_null_space(&shifted, thresh);
        if w.ncols() != c.len() {
            return Err(Error::NotDiagonalizable(format!(
                "eigenvalue {lambda} has multiplicity {} but {} eigenvectors",
                c.len(),
                w.ncols()
            )));
        }
        // eta2-orthonormalize inside the eigenspace.
        let g = w.transpose() * &eta2 * &w;
        let eig = SymmetricEigen::new((&g + g.transpose()) * 0.5);
        let gscale = eig.eigenvalues.amax();
        let mut vectors = Vec::new();
        for i in 0..w.ncols() {
            let mu = eig.eigenvalues[i];
            if mu.abs() <= tol.rank.sqrt() * gscale.max(f64::MIN_POSITIVE) {
                return Err(Error::DegenerateImage);
            }
            let v = &w * eig.eigenvectors.column(i) / mu.abs().sqrt();
            vectors.push((v, mu.signum()));
        }
        spaces.push(Eigenspace { lambda, vectors });
    }

    // Sort B: d1, d2, zero(+) | d3, d4, zero(-).
    let mut classes: [Vec<(DVector<f64>, f64)>; 6] = Default::default();
    for s in &spaces {
        for (v, sign) in &s.vectors {
            let slot = match (s.lambda.partial_cmp(&0.0).expect("finite"), *sign > 0.0) {
                (std::cmp::Ordering::Greater, true) => 0,
                (std::cmp::Ordering::Less, true) => 1,
                (std::cmp::Ordering::Equal, true) => 2,
                (std::cmp::Ordering::Less, false) => 3,
                (std::cmp::Ordering::Greater, false) => 4,
                (std::cmp::Ordering::Equal, false) => 5,
            };
            classes[slot].push((v.clone(), s.lambda));
        }
    }
    let counts = [
        classes[0].len(),
        classes[1].len(),
        classes[3].len(),
        classes[4].len(),
    ];
    let rank = counts.iter().sum::<usize>();
    if classes[0].len() + classes[1].len() + classes[2].len() != sig2.0 {
        return Err(Error::DegenerateImage);
    }
    // ker K must equal ker Phi.
    let phi_scale = phi.amax().max(1.0);
    for (v, _) in classes[2].iter().chain(classes[5].iter()) {
        if (phi * v).amax() > tol.rank.sqrt() * phi_scale * v.amax().max(1.0) {
            return Err(Error::DegenerateImage);
        }
    }
    let b_cols: Vec<DVector<f64>> = classes.iter().flatten().map(|(v, _)| v.clone()).collect();
    let basis_b = linalg::columns_to_matrix(m2, &b_cols);

    // A_i = Phi B_i / sqrt|lambda_i|; norms: d1 +, d2 -, d3 +, d4 -.
    let image = |cls: &[(DVector<f64>, f64)]| -> Vec<DVector<f64>> {
        cls.iter().map(|(v, l)| phi * v / l.abs().sqrt()).collect()
    };
    let a1 = image(&classes[0]);
    let a2 = image(&classes[1]);
    let a3 = image(&classes[3]);
    let a4 = image(&classes[4]);
    let mut known: Vec<DVector<f64>> = Vec::new();
    known.extend(a1.iter().cloned());
    known.extend(a2.iter().cloned());
    known.extend(a3.iter().cloned());
    known.extend(a4.iter().cloned());
    let ext = if known.len() < m1 {
        let am = linalg::columns_to_matrix(m1, &known);
        let constraints = am.transpose() * &eta1;
        let comp = if known.is_empty() {
            DMatrix::identity(m1, m1)
        } else {
            linalg::null_space(&constraints, tol.rank)
        };
        let cand: Vec<DVector<f64>> = comp.column_iter().map(|c| c.into_owned()).collect();
        linalg::indefinite_orthonormalize(&cand, &eta1, tol.rank)?
    } else {
        Vec::new()
    };
    if known.len() + ext.len() != m1 {
        return Err(Error::DegenerateImage);
    }
    let pos_ext: Vec<DVector<f64>> = ext.iter().filter(|e| e.1 > 0.0).map(|e| e.0.clone()).collect();
    let neg_ext: Vec<DVector<f64>> = ext.iter().filter(|e| e.1 < 0.0).map(|e| e.0.clone()).collect();
    let mut a_cols = Vec::new();
    a_cols.extend(a1.iter().cloned());
    a_cols.extend(a3.iter().cloned());
    a_cols.extend(pos_ext.iter().cloned());
    let n_pos = a_cols.len();
    a_cols.extend(a2.iter().cloned());
    a_cols.extend(a4.iter().cloned());
    a_cols.extend(neg_ext.iter().cloned());
    if n_pos != sig1.0 {
        return Err(Error::DegenerateImage);
    }
    let basis_a = linalg::columns_to_matrix(m1, &a_cols);
    let signs_a: Vec<f64> = (0..m1).map(|i| if i < sig1.0 { 1.0 } else { -1.0 }).collect();

    let gram_a = basis_a.transpose() * &eta1 * &basis_a;
    let gram_b = basis_b.transpose() * &eta2 * &basis_b;
    let gram_residual_a = (&gram_a - &eta1).amax();
    let gram_residual_b = (&gram_b - &eta2).amax();
    if gram_residual_a > tol.num.sqrt() {
        return Err(Error::DegenerateImage);
    }

    let s1 = DMatrix::from_diagonal(&DVector::from_vec(signs_a));
    let reconstruction = &s1 * basis_a.transpose() * &eta1 * phi * &basis_b;

    // Expected pattern: column of B_i holds sqrt|lambda_i| in the row of A_i.
    let blocks = [
        classes[0].iter().map(|(_, l)| l.abs().sqrt()).collect::<Vec<_>>(),
        classes[1].iter().map(|(_, l)| l.abs().sqrt()).collect::<Vec<_>>(),
        classes[3].iter().map(|(_, l)| l.abs().sqrt()).collect::<Vec<_>>(),
        classes[4].iter().map(|(_, l)| l.abs().sqrt()).collect::<Vec<_>>(),
    ];
    let mut pattern = DMatrix::zeros(m1, m2);
    let (d1, d2, d3) = (counts[0], counts[1], counts[2]);
    let z2p = classes[2].len();
    // Column offsets in B.
    let cb = [0, d1, d1 + d2 + z2p, d1 + d2 + z2p + d3];
    // Row offsets in A.
    let ra = [0, n_pos, d1, n_pos + d2];
    for (cls, block) in blocks.iter().enumerate() {
        for (i, s) in block.iter().enumerate() {
            pattern[(ra[cls] + i, cb[cls] + i)] = *s;
        }
    }
    let reconstruction_residual = (&reconstruction - &pattern).amax();
    Ok(IndefSvdResult {
        basis_a,
        basis_b,
        blocks,
        counts,
        rank,
        reconstruction,
        pattern,
        gram_residual_a,
        gram_residual_b,
        reconstruction_residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HrWilliamson {
    pub williamson_type: (usize, usize, usize),
    pub zero_pairs: usize,
}

/// `(d1 + d4, d2 + d3, 0)` with `(m1 + m2 - 2r) / 2` zero pairs.
pub fn hr_williamson(r: &IndefSvdResult, m1: usize, m2: usize) -> HrWilliamson {
    let [d1, d2, d3, d4] = r.counts;
    HrWilliamson {
        williamson_type: (d1 + d4, d2 + d3, 0),
        zero_pairs: (m1 + m2 - 2 * r.rank) / 2,
    }
}

/// Random element of `O(p, q)` as `exp(eta S)` with `S` antisymmetric.
pub fn random_pseudo_orthogonal<R: Rng>(rng: &mut R, sig: (usize, usize), spread: f64) -> DMatrix<f64> {
    let n = sig.0 + sig.1;
    let mut s = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let x: f64 = StandardNormal.sample(rng);
            s[(i, j)] = spread * x;
            s[(j, i)] = -spread * x;
        }
    }
    expm(&(sign_matrix(sig) * s))
}

/// A random instance satisfying both hypotheses of the indefinite SVD:
/// `Phi = A0 P B0^{-1}` with `P` a random sparse pattern and `A0`, `B0`
/// random pseudo-orthogonal. Returns `Phi` and the planted counts.
pub fn random_phi<R: Rng>(
    rng: &mut R,
    sig1: (usize, usize),
    sig2: (usize, usize),
) -> (DMatrix<f64>, [usize; 4]) {
    let (m1, m2) = (sig1.0 + sig1.1, sig2.0 + sig2.1);
    // Free positive/negative slots on each side.
    let mut a_pos: Vec<usize> = (0..sig1.0).collect();
    let mut a_neg: Vec<usize> = (sig1.0..m1).collect();
    let mut counts = [0; 4];
    let mut p = DMatrix::zeros(m1, m2);
    for col in 0..m2 {
        let b_pos = col < sig2.0;
        // Leave some columns in the kernel.
        if rng.random_bool(0.2) {
            continue;
        }
        let to_pos = rng.random_bool(0.5);
        let slot = if to_pos { a_pos.pop() } else { a_neg.pop() };
        let Some(row) = slot else { continue };
        p[(row, col)] = rng.random_range(0.5..2.0);
        let class = match (b_pos, to_pos) {
            (true, true) => 0,
            (true, false) => 1,
            (false, true) => 2,
            (false, false) => 3,
        };
        counts[class] += 1;
    }
    let a0 = random_pseudo_orthogonal(rng, sig1, 0.3);
    let b0 = random_pseudo_orthogonal(rng, sig2, 0.3);
    let eta2 = sign_matrix(sig2);
    // B0^{-1} = eta2 B0^T eta2.
    let b0_inv = &eta2 * b0.transpose() * &eta2;
    (a0 * p * b0_inv, counts)
}

/// Heisenberg-Reiter data whose `W_1` component realizes `Phi` and whose
/// extra `W` directions touch every row and column of `u1 x u2`, so that the
/// center is exactly `w`.
pub fn hr_data_with_full_support(
    phi: &DMatrix<f64>,
    sig1: (usize, usize),
    sig2: (usize, usize),
) -> Result<HRData> {
    let (m1, m2) = phi.shape();
    let extra = m1.max(m2);
    let mut b = vec![sign_matrix(sig1) * phi];
    for c in 0..extra {
        let mut e = DMatrix::zeros(m1, m2);
        e[(c % m1, c % m2)] = 1.0;
        b.push(e);
    }
    HRData::new(sig1, sig2, (1 + extra, 0), b)
}

/// A random instance for `m_i <= max_m`: signatures, `Phi` and the
/// Heisenberg-Reiter data realizing it with centre exactly `w`.
pub fn random_instance<R: Rng>(
    rng: &mut R,
    max_m: usize,
) -> Result<(HRData, DMatrix<f64>, [usize; 4])> {
    let sig = |rng: &mut R| {
        let m = rng.random_range(1..=max_m);
        let p = rng.random_range(0..=m);
        (p, m - p)
    };
    let sig1 = sig(rng);
    let sig2 = sig(rng);
    let (phi, counts) = random_phi(rng, sig1, sig2);
    let data = hr_data_with_full_support(&phi, sig1, sig2)?;
    Ok((data, phi, counts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jmap::j_operator;
    use crate::spectrum::classify_eigenvalues;
    use crate::AlgebraVector;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn diagonal_phi() {
        let phi = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 2.0]);
        let r = indefinite_svd(&phi, (1, 1), (1, 1), &tol()).unwrap();
        assert_eq!(r.counts, [1, 0, 0, 1]);
        assert_eq!(r.rank, 2);
        assert!(r.reconstruction_residual < 1e-12);
        let w = hr_williamson(&r, 2, 2);
        assert_eq!(w.williamson_type, (2, 0, 0));
        assert_eq!(w.zero_pairs, 0);
    }

    #[test]
    fn antidiagonal_phi() {
        let phi = DMatrix::from_row_slice(2, 2, &[0.0, 1.5, 0.7, 0.0]);
        let r = indefinite_svd(&phi, (1, 1), (1, 1), &tol()).unwrap();
        assert_eq!(r.counts, [0, 1, 1, 0]);
        assert_eq!(hr_williamson(&r, 2, 2).williamson_type, (0, 2, 0));
        assert!(r.reconstruction_residual < 1e-12);
    }

    #[test]
    fn zero_phi() {
        let r = indefinite_svd(&DMatrix::zeros(2, 2), (1, 1), (1, 1), &tol()).unwrap();
        assert_eq!(r.rank, 0);
        assert_eq!(r.counts, [0, 0, 0, 0]);
        assert!(r.gram_residual_a < 1e-12 && r.gram_residual_b < 1e-12);
        let w = hr_williamson(&r, 2, 2);
        assert_eq!(w.williamson_type, (0, 0, 0));
        assert_eq!(w.zero_pairs, 2);
    }

    #[test]
    fn rotation_like_phi_is_not_diagonalizable() {
        // Both columns are null and pair to 2, so Phi* Phi = [[0, 2], [-2, 0]].
        let phi = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, -1.0]);
        let r = indefinite_svd(&phi, (1, 1), (1, 1), &tol());
        assert!(matches!(r, Err(Error::NotDiagonalizable(_))), "{r:?}");
    }

    #[test]
    fn null_image_is_degenerate() {
        // Phi e = (1, 1), a null vector of diag(1, -1).
        let phi = DMatrix::from_row_slice(2, 1, &[1.0, 1.0]);
        let r = indefinite_svd(&phi, (1, 1), (1, 0), &tol());
        assert_eq!(r.unwrap_err(), Error::DegenerateImage);
    }

    #[test]
    fn assembled_j_matches_block_form() {
        let phi = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 2.0]);
        let data = HRData::from_phi(&phi, (1, 1), (1, 1)).unwrap();
        let (_, _, split) = build_heisenberg_reiter(&data, &tol()).unwrap();
        assert_eq!(split.dim_z(), 1);
        let j = j_operator(&split, &AlgebraVector::basis(5, 4)).unwrap();
        let want = data.block_j(&DVector::from_element(1, 1.0));
        assert!((j.matrix() - &want).amax() < 1e-14);
        assert!((want.view((0, 2), (2, 2)) + &phi).amax() == 0.0);
        let rep = classify_eigenvalues(j.matrix(), &tol()).unwrap();
        assert_eq!(rep.counts.williamson_type(), (2, 0, 0));
    }

    #[test]
    fn random_instances_match_spectrum() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let (data, phi, planted) = random_instance(&mut rng, 6).unwrap();
            let r = indefinite_svd(&phi, data.sig1, data.sig2, &tol()).unwrap();
            assert_eq!(r.counts, planted);
            assert!(r.reconstruction_residual < 1e-9, "{}", r.reconstruction_residual);
            assert!(r.gram_residual_a < 1e-9 && r.gram_residual_b < 1e-9);
            let (alg, _, split) = build_heisenberg_reiter(&data, &tol()).unwrap();
            assert_eq!(split.dim_z(), data.dim_w());
            let w1 = AlgebraVector::basis(alg.dim(), data.m1() + data.m2());
            let j = j_operator(&split, &w1).unwrap();
            let rep = classify_eigenvalues(j.matrix(), &tol()).unwrap();
            let w = hr_williamson(&r, data.m1(), data.m2());
            assert_eq!(rep.counts.williamson_type(), w.williamson_type);
        }
    }

    #[test]
    fn zero_row_lands_in_center() {
        let phi = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        let data = HRData::from_phi(&phi, (2, 0), (2, 0)).unwrap();
        let (_, _, split) = build_heisenberg_reiter(&data, &tol()).unwrap();
        // U1_2, U2_2 and W are central.
        assert_eq!(split.dim_z(), 3);
    }

    #[test]
    fn zero_tensor_is_abelian() {
        let data = HRData::new((1, 0), (1, 0), (1, 0), vec![DMatrix::zeros(1, 1)]).unwrap();
        let (alg, _, split) = build_heisenberg_reiter(&data, &tol()).unwrap();
        assert!(alg.is_abelian());
        assert_eq!(split.dim_z(), 3);
    }

    #[test]
    fn gram_with_wrong_signature_is_rejected() {
        let phi = DMatrix::identity(2, 2);
        let data = HRData::from_phi(&phi, (1, 1), (1, 1)).unwrap();
        let r = data.with_grams(
            DMatrix::identity(2, 2),
            sign_matrix((1, 1)),
            DMatrix::identity(1, 1),
            &tol(),
        );
        assert!(matches!(r, Err(Error::Signature { .. })));
    }
}
