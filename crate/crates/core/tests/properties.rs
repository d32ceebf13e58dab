use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use nilflow::algebra::{ad_transpose, load_algebra, orthogonal_split, AlgebraDocument};
use nilflow::constructors::{builtin, names};
use nilflow::dynamics::{momentum_map, GroupElement};
use nilflow::expm::expm;
use nilflow::jmap::{ad_transpose_closed_form, j_from_center_coords};
use nilflow::spectrum::classify_eigenvalues;
use nilflow::{AlgebraVector, Splitting, Tolerances};

fn split_of(idx: usize) -> Splitting {
    let name = names()[idx % names().len()];
    let (alg, product) = builtin(name).unwrap();
    orthogonal_split(&alg, &product, &Tolerances::default()).unwrap()
}

fn coords(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0..2.0f64, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bracket_is_antisymmetric(idx in 0usize..7, x in coords(7), y in coords(7)) {
        let split = split_of(idx);
        let d = split.dim();
        let alg = split.algebra();
        let x = AlgebraVector::from(x[..d].to_vec());
        let y = AlgebraVector::from(y[..d].to_vec());
        let xy = alg.bracket(&x, &y).unwrap();
        let yx = alg.bracket(&y, &x).unwrap();
        prop_assert!((xy.coords() + yx.coords()).amax() < 1e-14);
        // Brackets land in the centre.
        prop_assert!(split.v_part(xy.coords()).amax() < 1e-12);
    }

    #[test]
    fn closed_form_matches_adjoint(idx in 0usize..7, u in coords(7), y in coords(7)) {
        let split = split_of(idx);
        let d = split.dim();
        let u = AlgebraVector::from(u[..d].to_vec());
        let y = AlgebraVector::from(y[..d].to_vec());
        let general = ad_transpose(&split, &u).unwrap() * y.coords();
        let closed = ad_transpose_closed_form(&split, &u, &y).unwrap();
        prop_assert!((general - closed).amax() < 1e-12);
    }

    #[test]
    fn j_is_skew_and_linear(idx in 0usize..7, a in coords(3), b in coords(3), s in -3.0..3.0f64) {
        let split = split_of(idx);
        let n = split.dim_z();
        let a = DVector::from_column_slice(&a[..n.min(3)]).resize_vertically(n, 0.0);
        let b = DVector::from_column_slice(&b[..n.min(3)]).resize_vertically(n, 0.0);
        let ja = j_from_center_coords(&split, &a).unwrap().into_matrix();
        let jb = j_from_center_coords(&split, &b).unwrap().into_matrix();
        let jab = j_from_center_coords(&split, &(&a * s + &b)).unwrap().into_matrix();
        let gj = split.gram_v() * &ja;
        prop_assert!((&gj + gj.transpose()).amax() < 1e-12);
        prop_assert!((jab - (ja * s + jb)).amax() < 1e-12);
    }

    #[test]
    fn momentum_map_is_equivariant(idx in 0usize..7, u in coords(7), w in coords(7), y in coords(7)) {
        // J(q w, Y) = J(w, J(q, Y)).
        let split = split_of(idx);
        let d = split.dim();
        let alg = split.algebra();
        let q = GroupElement::exp(DVector::from_column_slice(&u[..d]));
        let r = GroupElement::exp(DVector::from_column_slice(&w[..d]));
        let y = DVector::from_column_slice(&y[..d]);
        let lhs = momentum_map(&split, &q.mul(&r, alg), &y).unwrap();
        let rhs = momentum_map(&split, &r, &momentum_map(&split, &q, &y).unwrap()).unwrap();
        prop_assert!((lhs - rhs).amax() < 1e-10);
    }

    #[test]
    fn group_law_is_associative(idx in 0usize..7, a in coords(7), b in coords(7), c in coords(7)) {
        let split = split_of(idx);
        let d = split.dim();
        let alg = split.algebra();
        let (a, b, c) = (
            GroupElement::exp(DVector::from_column_slice(&a[..d])),
            GroupElement::exp(DVector::from_column_slice(&b[..d])),
            GroupElement::exp(DVector::from_column_slice(&c[..d])),
        );
        let left = a.mul(&b, alg).mul(&c, alg);
        let right = a.mul(&b.mul(&c, alg), alg);
        prop_assert!((left.expcoord - right.expcoord).amax() < 1e-12);
        let id = a.mul(&a.inverse(), alg);
        prop_assert!(id.expcoord.amax() < 1e-15);
    }

    #[test]
    fn williamson_counts_add_up(n in 1usize..5, entries in prop::collection::vec(-1.0..1.0f64, 64)) {
        // J S with S symmetric is Hamiltonian.
        let m = 2 * n;
        let s = DMatrix::from_fn(m, m, |i, j| {
            let (a, b) = if i <= j { (i, j) } else { (j, i) };
            entries[(a * m + b) % entries.len()]
        });
        let mut jmat = DMatrix::zeros(m, m);
        for i in 0..n {
            jmat[(i, n + i)] = -1.0;
            jmat[(n + i, i)] = 1.0;
        }
        if let Ok(rep) = classify_eigenvalues(&(jmat * s), &Tolerances::default()) {
            prop_assert_eq!(rep.counts.total(), n);
        }
    }

    #[test]
    fn exp_of_negative_is_inverse(entries in prop::collection::vec(-3.0..3.0f64, 16)) {
        let a = DMatrix::from_column_slice(4, 4, &entries);
        let prod = expm(&a) * expm(&(-&a));
        prop_assert!((prod - DMatrix::<f64>::identity(4, 4)).amax() < 1e-9);
    }
}

#[test]
fn catalog_documents_round_trip() {
    let tol = Tolerances::default();
    for name in names() {
        let (alg, product) = builtin(name).unwrap();
        let text = AlgebraDocument::from_parts(&alg, &product).to_json();
        let (alg2, product2) = load_algebra(&text, &tol).unwrap();
        assert_eq!(alg, alg2, "{name}");
        assert_eq!(product.gram(), product2.gram(), "{name}");
    }
}
