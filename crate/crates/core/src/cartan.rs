//! Canonical Cartan-subalgebra matrices of `so(p, q)` and their predicted
//! Williamson types.
//!
//! Coordinates are ordered block by block so that all positive directions come
//! first: the form is `eta = diag(E_p, -E_q)` in the same ordering as the
//! assembled matrix, with no further permutation.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::spectrum::{classify_eigenvalues, WilliamsonCounts};
use crate::tol::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Family {
    D,
    Dprime,
    B,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::D => "D",
            Family::Dprime => "Dprime",
            Family::B => "B",
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "D" | "d" => Ok(Family::D),
            "Dprime" | "dprime" | "D'" => Ok(Family::Dprime),
            "B" | "b" => Ok(Family::B),
            other => Err(Error::Params(format!(
                "unknown family '{other}' (expected D, Dprime or B)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CartanParams {
    pub family: Family,
    pub p: usize,
    pub q: usize,
    pub l: usize,
    pub k: usize,
    pub h: Vec<f64>,
}

impl CartanParams {
    /// Validated parameters; `h` must have `rank()` entries.
    pub fn new(family: Family, p: usize, q: usize, l: usize, k: usize, h: Vec<f64>) -> Result<Self> {
        let params = Self {
            family,
            p,
            q,
            l,
            k,
            h,
        };
        params.validate_shape()?;
        if params.h.len() != params.rank() {
            return Err(Error::Params(format!(
                "expected {} values of h, got {}",
                params.rank(),
                params.h.len()
            )));
        }
        if params.h.iter().any(|x| !x.is_finite()) {
            return Err(Error::Params("h must be finite".into()));
        }
        Ok(params)
    }

    /// Same shape with all `h_i = 0`.
    pub fn shape(family: Family, p: usize, q: usize, l: usize, k: usize) -> Result<Self> {
        let mut s = Self {
            family,
            p,
            q,
            l,
            k,
            h: Vec::new(),
        };
        s.validate_shape()?;
        s.h = vec![0.0; s.rank()];
        Ok(s)
    }

    pub fn with_h(&self, h: Vec<f64>) -> Result<Self> {
        Self::new(self.family, self.p, self.q, self.l, self.k, h)
    }

    fn validate_shape(&self) -> Result<()> {
        let (p, q, l, k) = (self.p, self.q, self.l, self.k);
        if p > q {
            return Err(Error::Params(format!("need p <= q, got p = {p}, q = {q}")));
        }
        let even = (p + q) % 2 == 0;
        match self.family {
            Family::D | Family::Dprime if !even => {
                return Err(Error::FamilyMismatch {
                    family: self.family.name(),
                    parity: "even",
                })
            }
            Family::B if even => {
                return Err(Error::FamilyMismatch {
                    family: "B",
                    parity: "odd",
                })
            }
            _ => {}
        }
        match self.family {
            Family::D => {
                if p + q < 2 {
                    return Err(Error::Params("need p + q >= 2".into()));
                }
                if 2 * (k + l) > p {
                    return Err(Error::Params(format!(
                        "need 2(k + l) <= p, got 2({k} + {l}) > {p}"
                    )));
                }
            }
            Family::B => {
                if 2 * (k + l) + 1 > p {
                    return Err(Error::Params(format!(
                        "need 2(k + l) + 1 <= p, got 2({k} + {l}) + 1 > {p}"
                    )));
                }
            }
            Family::Dprime => {
                if p != q || p % 2 != 0 || p < 2 {
                    return Err(Error::Params(format!(
                        "Dprime needs p = q = n with n even and n >= 2, got ({p}, {q})"
                    )));
                }
                if l != 0 || 2 * k + 2 != p {
                    return Err(Error::Params(format!(
                        "Dprime needs l = 0 and k = (n - 2)/2 = {}, got l = {l}, k = {k}",
                        (p - 2) / 2
                    )));
                }
            }
        }
        Ok(())
    }

    /// `n`, with `p + q = 2n` or `2n + 1`.
    pub fn rank(&self) -> usize {
        (self.p + self.q) / 2
    }

    pub fn size(&self) -> usize {
        self.p + self.q
    }

    /// `diag(E_p, -E_q)`.
    pub fn eta(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.size(), self.size(), |i, j| match (i == j, i < self.p) {
            (true, true) => 1.0,
            (true, false) => -1.0,
            _ => 0.0,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalMatrix {
    pub matrix: DMatrix<f64>,
    pub params: CartanParams,
}

impl CanonicalMatrix {
    /// `max |M^T eta + eta M|`.
    pub fn membership_residual(&self) -> f64 {
        let eta = self.params.eta();
        (self.matrix.transpose() * &eta + &eta * &self.matrix).amax()
    }
}

/// Block-diagonal placement helper over a list of block sizes.
struct Layout {
    offsets: Vec<usize>,
}

impl Layout {
    fn new(sizes: &[usize]) -> Self {
        let mut offsets = vec![0];
        for s in sizes {
            offsets.push(offsets.last().unwrap() + s);
        }
        Self { offsets }
    }

    fn total(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    fn put(&self, m: &mut DMatrix<f64>, bi: usize, bj: usize, block: &DMatrix<f64>, scale: f64) {
        let (r, c) = (self.offsets[bi], self.offsets[bj]);
        for i in 0..block.nrows() {
            for j in 0..block.ncols() {
                m[(r + i, c + j)] += scale * block[(i, j)];
            }
        }
    }
}

/// `[[0, -diag(h)], [diag(h), 0]]`.
fn rotation_block(h: &[f64]) -> DMatrix<f64> {
    let n = h.len();
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for (i, &x) in h.iter().enumerate() {
        m[(i, n + i)] = -x;
        m[(n + i, i)] = x;
    }
    m
}

fn diag(h: &[f64]) -> DMatrix<f64> {
    DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(h))
}

/// Assemble the canonical matrix for the given parameters.
pub fn cartan_matrix(params: &CartanParams) -> Result<CanonicalMatrix> {
    let params = params.with_h(params.h.clone())?;
    let h = &params.h;
    let (p, l, k) = (params.p, params.l, params.k);
    let n = params.rank();
    let matrix = match params.family {
        Family::D | Family::B => {
            let odd = params.family == Family::B;
            let d1 = rotation_block(&h[0..l]);
            let d2 = rotation_block(&h[l..2 * l]);
            let h3 = &h[2 * l..2 * l + k];
            let d3 = diag(&[h3, h3].concat());
            let d4 = rotation_block(&h[2 * l + k..2 * l + 2 * k]);
            let r = p - 2 * l - 2 * k;
            let d5 = if odd {
                let mut e = h[2 * l + 2 * k..p].to_vec();
                e[0] = 0.0;
                diag(&e)
            } else {
                diag(&h[2 * l + 2 * k..p])
            };
            let d6 = rotation_block(&h[p..n]);
            let mut sizes = vec![2 * l, 2 * k, r, 2 * l, 2 * k, r, 2 * (n - p)];
            if odd {
                sizes.push(1);
            }
            let lay = Layout::new(&sizes);
            let mut m = DMatrix::zeros(lay.total(), lay.total());
            lay.put(&mut m, 0, 0, &(&d1 + &d2), 1.0);
            lay.put(&mut m, 1, 1, &d4, 1.0);
            lay.put(&mut m, 1, 4, &d3, -1.0);
            lay.put(&mut m, 2, 5, &d5, -1.0);
            lay.put(&mut m, 3, 3, &(&d1 - &d2), 1.0);
            lay.put(&mut m, 4, 1, &d3, -1.0);
            lay.put(&mut m, 4, 4, &d4, 1.0);
            lay.put(&mut m, 5, 2, &d5, -1.0);
            lay.put(&mut m, 6, 6, &d6, 1.0);
            if odd {
                let mut d8 = DMatrix::zeros(r, 1);
                d8[(0, 0)] = h[2 * l + 2 * k];
                let s = std::f64::consts::FRAC_1_SQRT_2;
                lay.put(&mut m, 5, 7, &d8, s);
                lay.put(&mut m, 7, 5, &d8.transpose(), -s);
            }
            m
        }
        Family::Dprime => {
            let half = k; // (n - 2) / 2
            let h3 = &h[0..half];
            let d3 = diag(&[h3, h3].concat());
            let d4 = rotation_block(&h[half..2 * half]);
            let d5p = diag(&[h[n - 2], -h[n - 2]]);
            let d7 = rotation_block(&h[n - 1..n]);
            let lay = Layout::new(&[2 * half, 2, 2 * half, 2]);
            let mut m = DMatrix::zeros(lay.total(), lay.total());
            lay.put(&mut m, 0, 0, &d4, 1.0);
            lay.put(&mut m, 0, 2, &d3, -1.0);
            lay.put(&mut m, 2, 0, &d3, -1.0);
            lay.put(&mut m, 2, 2, &d4, 1.0);
            lay.put(&mut m, 1, 1, &d7, 1.0);
            lay.put(&mut m, 1, 3, &d5p, 1.0);
            lay.put(&mut m, 3, 1, &d5p, 1.0);
            lay.put(&mut m, 3, 3, &d7, -1.0);
            m
        }
    };
    let out = CanonicalMatrix { matrix, params };
    let res = out.membership_residual();
    debug_assert!(res <= 1e-12, "membership residual {res:e}");
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prediction {
    pub williamson_type: (usize, usize, usize),
    /// The matrix at the supplied `h` has rank below `2n`, so the predicted
    /// type need not apply.
    pub rank_deficient: bool,
    pub matrix_rank: usize,
}

/// The predicted type `(k_e, k_h, k_f)` for the family at generic `h`.
pub fn predicted_type(params: &CartanParams) -> (usize, usize, usize) {
    let (p, l, k) = (params.p, params.l, params.k);
    let n = params.rank();
    match params.family {
        Family::D => (2 * l + n - p, p - 2 * l - 2 * k, k),
        Family::Dprime => (0, 0, n / 2),
        Family::B => (2 * l + 1 + n - p, p - 2 * l - 2 * k - 1, k),
    }
}

pub fn predicted_williamson(params: &CartanParams, tol: &Tolerances) -> Result<Prediction> {
    let m = cartan_matrix(params)?;
    let matrix_rank = linalg::rank(&m.matrix, tol.rank);
    Ok(Prediction {
        williamson_type: predicted_type(params),
        rank_deficient: matrix_rank < 2 * params.rank(),
        matrix_rank,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Comparison {
    Match,
    Mismatch {
        computed: WilliamsonCounts,
    },
    /// Rank below `2n`; no comparison made.
    Skipped,
}

/// Classify the matrix at `params.h` and compare with the prediction,
/// requiring `k_0 = 0`.
pub fn compare_at(params: &CartanParams, tol: &Tolerances) -> Result<(Comparison, f64)> {
    let m = cartan_matrix(params)?;
    let residual = m.membership_residual();
    let pred = predicted_williamson(params, tol)?;
    if pred.rank_deficient {
        return Ok((Comparison::Skipped, residual));
    }
    let report = classify_eigenvalues(&m.matrix, tol)?;
    let ok = report.counts.williamson_type() == pred.williamson_type && report.counts.k_0 == 0;
    Ok((
        if ok {
            Comparison::Match
        } else {
            Comparison::Mismatch {
                computed: report.counts,
            }
        },
        residual,
    ))
}

/// `count` values in `[0.5, 2]` whose pairwise gaps are at least 0.01.
pub fn generic_h<R: Rng>(rng: &mut R, count: usize) -> Vec<f64> {
    loop {
        let h: Vec<f64> = (0..count).map(|_| rng.random_range(0.5..=2.0)).collect();
        let mut sorted = h.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        if sorted.windows(2).all(|w| w[1] - w[0] >= 0.01) {
            return h;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossCheckReport {
    pub family: Family,
    pub p: usize,
    pub q: usize,
    pub l: usize,
    pub k: usize,
    pub predicted: (usize, usize, usize),
    pub trials: usize,
    pub matches: usize,
    pub skipped: usize,
    pub mismatches: Vec<(Vec<f64>, WilliamsonCounts)>,
    pub max_membership_residual: f64,
}

impl CrossCheckReport {
    pub fn all_match(&self) -> bool {
        self.mismatches.is_empty() && self.matches + self.skipped == self.trials
    }
}

/// Compare prediction and numerical classification on `trials` seeded generic draws.
pub fn cross_check(
    params: &CartanParams,
    trials: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<CrossCheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = CrossCheckReport {
        family: params.family,
        p: params.p,
        q: params.q,
        l: params.l,
        k: params.k,
        predicted: predicted_type(params),
        trials,
        matches: 0,
        skipped: 0,
        mismatches: Vec::new(),
        max_membership_residual: 0.0,
    };
    for _ in 0..trials {
        let h = generic_h(&mut rng, params.rank());
        let at = params.with_h(h.clone())?;
        let (cmp, res) = match compare_at(&at, tol) {
            Ok(x) => x,
            Err(Error::Pairing(_)) => {
                let m = cartan_matrix(&at)?;
                let counts = WilliamsonCounts {
                    k_e: 0,
                    k_h: 0,
                    k_f: 0,
                    k_0: 0,
                };
                (Comparison::Mismatch { computed: counts }, m.membership_residual())
            }
            Err(e) => return Err(e),
        };
        report.max_membership_residual = report.max_membership_residual.max(res);
        match cmp {
            Comparison::Match => report.matches += 1,
            Comparison::Skipped => report.skipped += 1,
            Comparison::Mismatch { computed } => report.mismatches.push((h, computed)),
        }
    }
    Ok(report)
}

/// All valid `(family, p, q, l, k)` with `p + q <= max_size`.
pub fn all_shapes(max_size: usize) -> Vec<CartanParams> {
    let mut out = Vec::new();
    for size in 2..=max_size {
        for p in 0..=size / 2 {
            let q = size - p;
            let families: &[Family] = if size % 2 == 0 {
                &[Family::D, Family::Dprime]
            } else {
                &[Family::B]
            };
            for &family in families {
                for l in 0..=p / 2 {
                    for k in 0..=p / 2 {
                        if let Ok(s) = CartanParams::shape(family, p, q, l, k) {
                            out.push(s);
                        }
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn d22_with_l1_is_elliptic() {
        let p = CartanParams::new(Family::D, 2, 2, 1, 0, vec![0.7, 1.3]).unwrap();
        let m = cartan_matrix(&p).unwrap();
        assert_eq!(m.matrix.nrows(), 4);
        assert!(m.membership_residual() <= 1e-12);
        assert_eq!(predicted_type(&p), (2, 0, 0));
        assert_eq!(compare_at(&p, &tol()).unwrap().0, Comparison::Match);
    }

    #[test]
    fn d22_with_k1_is_focus_focus() {
        let p = CartanParams::new(Family::D, 2, 2, 0, 1, vec![0.7, 1.3]).unwrap();
        assert_eq!(predicted_type(&p), (0, 0, 1));
        assert_eq!(compare_at(&p, &tol()).unwrap().0, Comparison::Match);
    }

    #[test]
    fn b23_has_sqrt2_column() {
        let p = CartanParams::new(Family::B, 2, 3, 0, 0, vec![0.7, 1.1]).unwrap();
        let m = cartan_matrix(&p).unwrap();
        assert_eq!(m.matrix.nrows(), 5);
        assert!((m.matrix[(2, 4)] - 0.7 / 2f64.sqrt()).abs() < 1e-15);
        assert!((m.matrix[(4, 2)] + 0.7 / 2f64.sqrt()).abs() < 1e-15);
        assert!(m.membership_residual() <= 1e-12);
        assert_eq!(predicted_type(&p), (1, 1, 0));
        assert_eq!(compare_at(&p, &tol()).unwrap().0, Comparison::Match);
    }

    #[test]
    fn zero_h_gives_zero_matrix_and_rank_flag() {
        let p = CartanParams::shape(Family::D, 2, 2, 0, 0).unwrap();
        assert_eq!(cartan_matrix(&p).unwrap().matrix.amax(), 0.0);
        assert!(predicted_williamson(&p, &tol()).unwrap().rank_deficient);
        let rep = CartanParams::new(Family::D, 2, 2, 0, 0, vec![1.0, 0.0]).unwrap();
        assert_eq!(compare_at(&rep, &tol()).unwrap().0, Comparison::Skipped);
    }

    #[test]
    fn parameter_errors() {
        assert!(matches!(
            CartanParams::shape(Family::D, 3, 3, 2, 0),
            Err(Error::Params(_))
        ));
        assert!(matches!(
            CartanParams::shape(Family::D, 2, 3, 0, 0),
            Err(Error::FamilyMismatch { .. })
        ));
        assert!(matches!(
            CartanParams::shape(Family::B, 2, 2, 0, 0),
            Err(Error::FamilyMismatch { .. })
        ));
        assert!(matches!(
            CartanParams::shape(Family::Dprime, 2, 4, 0, 0),
            Err(Error::Params(_))
        ));
        assert!(matches!(
            CartanParams::new(Family::D, 2, 2, 0, 0, vec![1.0]),
            Err(Error::Params(_))
        ));
    }

    #[test]
    fn dprime_is_all_focus_focus() {
        let p = CartanParams::shape(Family::Dprime, 4, 4, 0, 1).unwrap();
        let r = cross_check(&p, 32, 3, &tol()).unwrap();
        assert_eq!(r.predicted, (0, 0, 2));
        assert_eq!(r.matches, 32, "{r:?}");
    }

    #[test]
    fn same_family_matrices_commute() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for shape in all_shapes(8) {
            let a = cartan_matrix(&shape.with_h(generic_h(&mut rng, shape.rank())).unwrap()).unwrap();
            let b = cartan_matrix(&shape.with_h(generic_h(&mut rng, shape.rank())).unwrap()).unwrap();
            let c = &a.matrix * &b.matrix - &b.matrix * &a.matrix;
            assert!(c.amax() < 1e-10, "{shape:?}");
        }
    }
}
