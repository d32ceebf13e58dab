//! Dense linear-algebra helpers on top of `nalgebra`.
//!
//! Kernels are computed by Gauss-Jordan elimination with complete pivoting so
//! that integer-valued inputs produce exact basis vectors; ranks of
//! floating-point data use singular values.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

/// Kernel of `a` as the columns of an `ncols x nullity` matrix.
///
/// Pivots smaller than `tol * max(1, max|a_ij|)` are treated as zero. Each
/// basis vector has a unit entry on one free variable.
pub fn null_space(a: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let (rows, cols) = a.shape();
    let mut m = a.clone();
    let mut perm: Vec<usize> = (0..cols).collect();
    let thresh = tol * max_abs(a).max(1.0);
    let mut rank = 0;
    for k in 0..rows.min(cols) {
        let mut best = (k, k, 0.0);
        for i in k..rows {
            for j in k..cols {
                let v = m[(i, j)].abs();
                if v > best.2 {
                    best = (i, j, v);
                }
            }
        }
        if best.2 <= thresh {
            break;
        }
        m.swap_rows(k, best.0);
        m.swap_columns(k, best.1);
        perm.swap(k, best.1);
        let pivot = m[(k, k)];
        for j in 0..cols {
            m[(k, j)] /= pivot;
        }
        for i in 0..rows {
            if i != k {
                let f = m[(i, k)];
                if f != 0.0 {
                    for j in 0..cols {
                        m[(i, j)] -= f * m[(k, j)];
                    }
                }
            }
        }
        rank = k + 1;
    }
    let nullity = cols - rank;
    let mut out = DMatrix::zeros(cols, nullity);
    for f in 0..nullity {
        let free = rank + f;
        out[(perm[free], f)] = 1.0;
        for r in 0..rank {
            out[(perm[r], f)] = -m[(r, free)];
        }
    }
    // Order basis vectors by the position of their free variable.
    let mut order: Vec<usize> = (0..nullity).collect();
    order.sort_by_key(|&f| perm[rank + f]);
    DMatrix::from_fn(cols, nullity, |i, f| out[(i, order[f])])
}

/// Kernel of a square matrix from its right singular vectors with singular
/// value at most `thresh`. Columns are orthonormal.
pub fn svd_null_space(a: &DMatrix<f64>, thresh: f64) -> DMatrix<f64> {
    let n = a.ncols();
    if n == 0 {
        return DMatrix::zeros(0, 0);
    }
    let svd = a.clone().svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] <= thresh)
        .collect();
    DMatrix::from_fn(n, keep.len(), |i, j| vt[(keep[j], i)])
}

/// Euclidean Gram-Schmidt (two passes) on the columns, dropping columns whose
/// residual falls below `tol` relative to their original norm.
pub fn orthonormalize_columns(m: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for c in m.column_iter() {
        let norm0 = c.norm();
        if norm0 == 0.0 {
            continue;
        }
        let mut v: DVector<f64> = c.into_owned();
        for _ in 0..2 {
            for b in &basis {
                let p = b.dot(&v);
                v.axpy(-p, b, 1.0);
            }
        }
        let n = v.norm();
        if n > tol * norm0 {
            basis.push(v / n);
        }
    }
    columns_to_matrix(m.nrows(), &basis)
}

pub fn columns_to_matrix(rows: usize, cols: &[DVector<f64>]) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols.len(), |i, j| cols[j][i])
}

pub fn singular_values(a: &DMatrix<f64>) -> Vec<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Vec::new();
    }
    a.clone().svd(false, false).singular_values.iter().copied().collect()
}

/// Numerical rank: singular values above `tol * max(1, sigma_max)`.
pub fn rank(a: &DMatrix<f64>, tol: f64) -> usize {
    let sv = singular_values(a);
    let smax = sv.iter().fold(0.0_f64, |m, s| m.max(*s));
    let thresh = tol * smax.max(1.0);
    sv.iter().filter(|s| **s > thresh).count()
}

/// Orthonormal basis of the column space (left singular vectors).
pub fn column_space(a: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let rows = a.nrows();
    if rows == 0 || a.ncols() == 0 {
        return DMatrix::zeros(rows, 0);
    }
    let svd = a.clone().svd(true, false);
    let u = svd.u.expect("requested U");
    let smax = svd.singular_values.iter().fold(0.0_f64, |m, s| m.max(*s));
    let thresh = tol * smax.max(1.0);
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > thresh)
        .collect();
    DMatrix::from_fn(rows, keep.len(), |i, j| u[(i, keep[j])])
}

/// Counts of positive and negative eigenvalues of a symmetric matrix.
///
/// Fails when any eigenvalue lies within `tol * |M|_2` of zero.
pub fn signature(m: &DMatrix<f64>, tol: f64) -> Result<(usize, usize)> {
    if m.nrows() != m.ncols() {
        return Err(Error::Dim {
            expected: m.nrows(),
            got: m.ncols(),
        });
    }
    if m.nrows() == 0 {
        return Ok((0, 0));
    }
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym).eigenvalues;
    let norm = eig.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
    let thresh = tol * norm;
    let mut pos = 0;
    let mut neg = 0;
    for &l in eig.iter() {
        if l > thresh {
            pos += 1;
        } else if l < -thresh {
            neg += 1;
        } else {
            return Err(Error::Degenerate(format!(
                "eigenvalue {l:e} inside dead band {thresh:e}"
            )));
        }
    }
    if norm == 0.0 {
        return Err(Error::Degenerate("zero matrix".into()));
    }
    Ok((pos, neg))
}

/// Indices of a well-conditioned maximal independent subset of the columns,
/// chosen by column-pivoted Gram-Schmidt and returned in ascending order.
pub fn independent_columns(m: &DMatrix<f64>, target: usize) -> Vec<usize> {
    let mut residual: Vec<DVector<f64>> = m.column_iter().map(|c| c.into_owned()).collect();
    let mut chosen = Vec::new();
    for _ in 0..target.min(residual.len()) {
        let (best, norm) = residual
            .iter()
            .enumerate()
            .filter(|(i, _)| !chosen.contains(i))
            .map(|(i, v)| (i, v.norm()))
            .fold((usize::MAX, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best == usize::MAX || norm == 0.0 {
            break;
        }
        chosen.push(best);
        let q = &residual[best] / norm;
        for (i, r) in residual.iter_mut().enumerate() {
            if !chosen.contains(&i) {
                let p = q.dot(r);
                r.axpy(-p, &q, 1.0);
            }
        }
    }
    chosen.sort_unstable();
    chosen
}

/// Indefinite product `x^T g y`.
pub fn form(g: &DMatrix<f64>, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
    (x.transpose() * g * y)[(0, 0)]
}

/// Gram-Schmidt with respect to a possibly indefinite symmetric form `g`.
///
/// At each step the candidate with the largest `|<x,x>| / |x|^2` is taken;
/// when every remaining candidate is nearly null, a sum or difference of two
/// candidates with non-zero mutual product is used instead. Returns the new
/// vectors and their norms (each `+1` or `-1`).
pub fn indefinite_orthonormalize(
    candidates: &[DVector<f64>],
    g: &DMatrix<f64>,
    tol: f64,
) -> Result<Vec<(DVector<f64>, f64)>> {
    let scale = max_abs(g).max(1.0);
    let mut pool: Vec<DVector<f64>> = candidates.to_vec();
    let mut out: Vec<(DVector<f64>, f64)> = Vec::new();
    loop {
        pool.retain(|v| v.norm() > tol);
        if pool.is_empty() {
            break;
        }
        let ratio = |v: &DVector<f64>| form(g, v, v).abs() / v.norm_squared();
        let (best, best_ratio) = pool
            .iter()
            .enumerate()
            .map(|(i, v)| (i, ratio(v)))
            .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        let pick = if best_ratio > tol * scale {
            pool.swap_remove(best)
        } else {
            let mut pair = None;
            'outer: for a in 0..pool.len() {
                for b in (a + 1)..pool.len() {
                    let c = form(g, &pool[a], &pool[b]);
                    if c.abs() > tol * scale * pool[a].norm() * pool[b].norm() {
                        pair = Some((a, b, c));
                        break 'outer;
                    }
                }
            }
            match pair {
                Some((a, b, _)) => {
                    let s = &pool[a] + &pool[b];
                    let d = &pool[a] - &pool[b];
                    pool.swap_remove(b);
                    if ratio(&s) >= ratio(&d) {
                        pool[a] = d;
                        s
                    } else {
                        pool[a] = s;
                        d
                    }
                }
                None => {
                    // Everything left is null and mutually orthogonal.
                    return Err(Error::DegenerateImage);
                }
            }
        };
        let n = form(g, &pick, &pick);
        let sign = n.signum();
        let unit = pick / n.abs().sqrt();
        for v in pool.iter_mut() {
            let p = form(g, &unit, v) * sign;
            v.axpy(-p, &unit, 1.0);
        }
        out.push((unit, sign));
    }
    Ok(out)
}

/// Zero out entries whose magnitude is below `thresh`.
pub fn snap(m: &mut DMatrix<f64>, thresh: f64) {
    for x in m.iter_mut() {
        if x.abs() <= thresh {
            *x = 0.0;
        }
    }
}

pub fn solve(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    a.clone().lu().solve(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn null_space_of_rank_one_matrix() {
        let a = DMatrix::from_row_slice(2, 3, &[1.0, 2.0, 3.0, 2.0, 4.0, 6.0]);
        let n = null_space(&a, 1e-12);
        assert_eq!(n.ncols(), 2);
        assert!((&a * &n).norm() < 1e-14);
    }

    #[test]
    fn null_space_keeps_unit_vectors_exact() {
        // Zero last column: kernel is exactly e_3.
        let a = DMatrix::from_row_slice(2, 3, &[0.0, 1.0, 0.0, -1.0, 0.0, 0.0]);
        let n = null_space(&a, 1e-12);
        assert_eq!(n.ncols(), 1);
        assert_eq!(n.column(0).as_slice(), &[0.0, 0.0, 1.0]);
    }

    #[test]
    fn signature_examples() {
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -1.0]));
        assert_eq!(signature(&d, 1e-10).unwrap(), (1, 1));
        assert_eq!(signature(&DMatrix::identity(4, 4), 1e-10).unwrap(), (4, 0));
        let h = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        assert_eq!(signature(&h, 1e-10).unwrap(), (1, 1));
        let s = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        assert!(matches!(signature(&s, 1e-10), Err(Error::Degenerate(_))));
    }

    #[test]
    fn indefinite_gram_schmidt_handles_null_candidates() {
        let g = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -1.0]));
        // Both candidates are null vectors of diag(1, -1).
        let c = vec![
            DVector::from_vec(vec![1.0, 1.0]),
            DVector::from_vec(vec![1.0, -1.0]),
        ];
        let out = indefinite_orthonormalize(&c, &g, 1e-10).unwrap();
        assert_eq!(out.len(), 2);
        let mut signs: Vec<f64> = out.iter().map(|(_, s)| *s).collect();
        signs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(signs, vec![-1.0, 1.0]);
        assert!(form(&g, &out[0].0, &out[1].0).abs() < 1e-14);
    }

    #[test]
    fn independent_columns_prefers_well_conditioned_subset() {
        let m = DMatrix::from_row_slice(2, 3, &[1.0, 0.5, 0.0, 0.0, 1e-9, 1.0]);
        assert_eq!(independent_columns(&m, 2), vec![0, 2]);
    }
}
