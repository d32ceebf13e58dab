//! Eigenvalue classification into elliptic, hyperbolic, focus-focus and zero
//! families, Williamson counts, and the linear stability verdict.

use nalgebra::linalg::Schur;
use nalgebra::{Complex, DMatrix};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::jmap::JOperator;
use crate::linalg;
use crate::tol::Tolerances;

/// One group of numerically coincident eigenvalues.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenCluster {
    pub re: f64,
    pub im: f64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct WilliamsonCounts {
    pub k_e: usize,
    pub k_h: usize,
    pub k_f: usize,
    pub k_0: usize,
}

impl WilliamsonCounts {
    pub fn williamson_type(&self) -> (usize, usize, usize) {
        (self.k_e, self.k_h, self.k_f)
    }

    /// `k_e + k_h + 2 k_f + k_0`.
    pub fn total(&self) -> usize {
        self.k_e + self.k_h + 2 * self.k_f + self.k_0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Stable,
    Unstable,
    Indeterminate,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Stable => "Stable",
            Verdict::Unstable => "Unstable",
            Verdict::Indeterminate => "Indeterminate",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumReport {
    pub size: usize,
    pub clusters: Vec<EigenCluster>,
    pub counts: WilliamsonCounts,
    /// Set for odd sizes, where one zero eigenvalue has no partner.
    pub unpaired_zero: bool,
    pub semisimple: bool,
    pub verdict: Verdict,
}

impl SpectrumReport {
    /// Half the matrix size, rounded down.
    pub fn n(&self) -> usize {
        self.size / 2
    }

    /// All eigenvalues with repetition, in cluster order.
    pub fn eigenvalues(&self) -> Vec<Complex<f64>> {
        self.clusters
            .iter()
            .flat_map(|c| std::iter::repeat_n(Complex::new(c.re, c.im), c.multiplicity))
            .collect()
    }

    pub fn is_purely_imaginary(&self) -> bool {
        self.clusters.iter().all(|c| c.re == 0.0)
    }

    pub fn is_real(&self) -> bool {
        self.clusters.iter().all(|c| c.im == 0.0)
    }
}

pub fn stability_verdict(counts: &WilliamsonCounts, semisimple: bool) -> Verdict {
    if counts.k_h > 0 || counts.k_f > 0 {
        Verdict::Unstable
    } else if semisimple {
        Verdict::Stable
    } else {
        Verdict::Indeterminate
    }
}

struct RawCluster {
    center: Complex<f64>,
    members: Vec<Complex<f64>>,
}

fn cluster(eigs: &[Complex<f64>], radius: f64) -> Vec<RawCluster> {
    let n = eigs.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        let mut i = i;
        while p[i] != r {
            let next = p[i];
            p[i] = r;
            i = next;
        }
        r
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (eigs[i] - eigs[j]).norm() <= radius {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut groups: Vec<(usize, Vec<Complex<f64>>)> = Vec::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        match groups.iter_mut().find(|g| g.0 == r) {
            Some(g) => g.1.push(eigs[i]),
            None => groups.push((r, vec![eigs[i]])),
        }
    }
    groups
        .into_iter()
        .map(|(_, members)| {
            let sum: Complex<f64> = members.iter().sum();
            RawCluster {
                center: sum / members.len() as f64,
                members,
            }
        })
        .collect()
}

fn complex_rank(m: &DMatrix<Complex<f64>>, thresh: f64) -> usize {
    if m.nrows() == 0 {
        return 0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .filter(|s| **s > thresh)
        .count()
}

const SCHUR_MAX_ITER: usize = 10_000;

/// Eigenvalues of a real square matrix, computed through a real Schur form.
///
/// nalgebra's Francis iteration has no exceptional shifts and can cycle on
/// highly structured inputs such as some canonical Cartan matrices. When it
/// does not converge, the matrix is conjugated by a seeded random orthogonal
/// matrix and retried.
pub fn eigenvalues(m: &DMatrix<f64>) -> Vec<Complex<f64>> {
    let n = m.nrows();
    if n == 0 {
        return Vec::new();
    }
    if let Some(s) = Schur::try_new(m.clone(), f64::EPSILON, SCHUR_MAX_ITER) {
        return s.complex_eigenvalues().iter().copied().collect();
    }
    for attempt in 0..16u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(attempt);
        let g = DMatrix::from_fn(n, n, |_, _| -> f64 { StandardNormal.sample(&mut rng) });
        let q = g.qr().q();
        let conj = q.transpose() * m * &q;
        if let Some(s) = Schur::try_new(conj, f64::EPSILON, SCHUR_MAX_ITER) {
            return s.complex_eigenvalues().iter().copied().collect();
        }
    }
    panic!("real Schur iteration failed to converge on a {n}x{n} matrix");
}

/// Classify the eigenvalues of `m` and compute the Williamson counts.
pub fn classify_eigenvalues(m: &DMatrix<f64>, tol: &Tolerances) -> Result<SpectrumReport> {
    let size = m.nrows();
    if m.ncols() != size {
        return Err(Error::Dim {
            expected: size,
            got: m.ncols(),
        });
    }
    let scale = m.norm().max(1.0);
    let zero_band = tol.spec * scale;
    let radius = tol.cluster * scale;
    let snap = |x: f64| if x.abs() <= zero_band { 0.0 } else { x };

    let raw: Vec<Complex<f64>> = eigenvalues(m)
        .into_iter()
        .map(|l| Complex::new(snap(l.re), snap(l.im)))
        .collect();
    let mut raw_clusters = cluster(&raw, radius);

    // Semisimplicity per cluster from the rank of (M - lambda id).
    let mc = m.map(|x| Complex::new(x, 0.0));
    let mut semisimple = true;
    for c in &raw_clusters {
        let spread = c
            .members
            .iter()
            .fold(0.0_f64, |a, x| a.max((x - c.center).norm()));
        let shifted = &mc - DMatrix::from_diagonal_element(size, size, c.center);
        let thresh = (tol.rank * scale).max(4.0 * spread);
        if complex_rank(&shifted, thresh) != size - c.members.len() {
            semisimple = false;
        }
    }

    for c in raw_clusters.iter_mut() {
        c.center = Complex::new(snap(c.center.re), snap(c.center.im));
    }
    raw_clusters.sort_by(|a, b| {
        (a.center.re, a.center.im)
            .partial_cmp(&(b.center.re, b.center.im))
            .expect("finite eigenvalues")
    });
    let clusters: Vec<EigenCluster> = raw_clusters
        .iter()
        .map(|c| EigenCluster {
            re: c.center.re,
            im: c.center.im,
            multiplicity: c.members.len(),
        })
        .collect();

    let match_tol = 10.0 * radius;
    let find = |target: Complex<f64>| {
        clusters
            .iter()
            .map(|c| (c, (Complex::new(c.re, c.im) - target).norm()))
            .filter(|(_, d)| *d <= match_tol)
            .min_by(|a, b| a.1.partial_cmp(&b.1).expect("finite"))
            .map(|(c, _)| c)
    };
    let require = |c: &EigenCluster, partner: Complex<f64>| -> Result<()> {
        match find(partner) {
            Some(p) if p.multiplicity == c.multiplicity => Ok(()),
            Some(p) => Err(Error::Pairing(format!(
                "{} + {}i has multiplicity {} but its partner {} + {}i has {}",
                c.re, c.im, c.multiplicity, p.re, p.im, p.multiplicity
            ))),
            None => Err(Error::Pairing(format!(
                "{} + {}i has no partner near {} + {}i",
                c.re, c.im, partner.re, partner.im
            ))),
        }
    };

    let mut counts = WilliamsonCounts {
        k_e: 0,
        k_h: 0,
        k_f: 0,
        k_0: 0,
    };
    let mut zeros = 0;
    for c in &clusters {
        let l = Complex::new(c.re, c.im);
        match (c.re == 0.0, c.im == 0.0) {
            (true, true) => zeros += c.multiplicity,
            (true, false) => {
                require(c, -l)?;
                if c.im > 0.0 {
                    counts.k_e += c.multiplicity;
                }
            }
            (false, true) => {
                require(c, -l)?;
                if c.re > 0.0 {
                    counts.k_h += c.multiplicity;
                }
            }
            (false, false) => {
                require(c, l.conj())?;
                require(c, -l)?;
                require(c, -l.conj())?;
                if c.re > 0.0 && c.im > 0.0 {
                    counts.k_f += c.multiplicity;
                }
            }
        }
    }
    let unpaired_zero = size % 2 == 1;
    if zeros % 2 != size % 2 {
        return Err(Error::Pairing(format!(
            "{zeros} zero eigenvalues in a matrix of size {size}"
        )));
    }
    counts.k_0 = zeros / 2;
    if counts.total() != size / 2 {
        return Err(Error::Pairing(format!(
            "counts {:?} do not account for size {size}",
            counts
        )));
    }
    let verdict = stability_verdict(&counts, semisimple);
    Ok(SpectrumReport {
        size,
        clusters,
        counts,
        unpaired_zero,
        semisimple,
        verdict,
    })
}

/// Spectrum of `j(Z)` on all of `v` and restricted to its image `Im j(Z)`.
pub fn williamson_on_orbit(
    j: &JOperator,
    tol: &Tolerances,
) -> Result<(SpectrumReport, SpectrumReport)> {
    let m = j.matrix();
    let full = classify_eigenvalues(m, tol)?;
    let q = linalg::column_space(m, tol.rank);
    let restricted = q.transpose() * m * &q;
    let orbit = classify_eigenvalues(&restricted, tol)?;
    Ok((full, orbit))
}
