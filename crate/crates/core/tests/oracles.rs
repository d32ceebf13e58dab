//! Independent oracles: characteristic polynomials, closed-form solutions and
//! a hand-rolled integrator for the block-metric flow.

use nalgebra::{Complex, DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use nilflow::algebra::orthogonal_split;
use nilflow::constructors::builtin;
use nilflow::dynamics::{flow_exact, MetricBlocks};
use nilflow::jmap::j_operator;
use nilflow::spectrum::classify_eigenvalues;
use nilflow::{AlgebraVector, Tolerances};

/// Coefficients `c_0..c_n` of `det(lambda - M)` by Faddeev-LeVerrier.
fn char_poly(m: &DMatrix<f64>) -> Vec<f64> {
    let n = m.nrows();
    let mut c = vec![0.0; n + 1];
    c[n] = 1.0;
    let mut mk = DMatrix::<f64>::zeros(n, n);
    for k in 1..=n {
        mk = m * &mk + DMatrix::identity(n, n) * c[n - k + 1];
        c[n - k] = -(m * &mk).trace() / k as f64;
    }
    c
}

/// Coefficients of `prod (lambda - mu_i)`.
fn poly_from_roots(roots: &[Complex<f64>]) -> Vec<Complex<f64>> {
    let mut p = vec![Complex::new(1.0, 0.0)];
    for r in roots {
        let mut next = vec![Complex::new(0.0, 0.0); p.len() + 1];
        for (i, c) in p.iter().enumerate() {
            next[i + 1] += *c;
            next[i] -= *c * r;
        }
        p = next;
    }
    p
}

fn random_hamiltonian(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let m = 2 * n;
    let a = DMatrix::from_fn(m, m, |_, _| -> f64 { StandardNormal.sample(rng) });
    let s = &a + a.transpose();
    let mut j = DMatrix::zeros(m, m);
    for i in 0..n {
        j[(i, n + i)] = -1.0;
        j[(n + i, i)] = 1.0;
    }
    j * s
}

#[test]
fn metivier_characteristic_polynomial() {
    let (alg, product) = builtin("metivier5").unwrap();
    let tol = Tolerances::default();
    let split = orthogonal_split(&alg, &product, &tol).unwrap();
    let j = j_operator(&split, &AlgebraVector::basis(5, 4)).unwrap();
    // lambda^4 + 5 lambda^2 + 4
    assert_eq!(char_poly(j.matrix()), vec![4.0, 0.0, 5.0, 0.0, 1.0]);
}

#[test]
fn eigenvalues_reproduce_characteristic_polynomial() {
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for n in 1..=4 {
        for _ in 0..10 {
            let m = random_hamiltonian(&mut rng, n);
            let rep = classify_eigenvalues(&m, &tol).unwrap();
            assert_eq!(rep.counts.total(), n);
            let from_roots = poly_from_roots(&rep.eigenvalues());
            let direct = char_poly(&m);
            let scale = direct.iter().fold(1.0_f64, |a, c| a.max(c.abs()));
            for (a, b) in from_roots.iter().zip(&direct) {
                assert!((a.re - b).abs() < 1e-8 * scale, "{a} vs {b}");
                assert!(a.im.abs() < 1e-8 * scale);
            }
        }
    }
}

#[test]
fn counts_agree_with_root_kinds() {
    // One hyperbolic pair (+-1.5) and one elliptic pair (+-2i).
    let tol = Tolerances::default();
    let d = DMatrix::from_row_slice(
        4,
        4,
        &[
            0.0, 0.0, 1.5, 0.0, //
            0.0, 0.0, 0.0, -2.0, //
            1.5, 0.0, 0.0, 0.0, //
            0.0, 2.0, 0.0, 0.0,
        ],
    );
    let rep = classify_eigenvalues(&d, &tol).unwrap();
    assert_eq!(rep.counts.williamson_type(), (1, 1, 0));
}

#[test]
fn heisenberg_flow_is_a_rotation() {
    let (alg, product) = builtin("heisenberg3").unwrap();
    let tol = Tolerances::default();
    let split = orthogonal_split(&alg, &product, &tol).unwrap();
    let times: Vec<f64> = (0..50).map(|k| k as f64 * 0.3).collect();
    let y0 = AlgebraVector::from(vec![0.4, -1.2, 2.0]);
    let traj = flow_exact(&split, None, &y0, &times).unwrap();
    for (t, y) in times.iter().zip(&traj.states) {
        // Y_v' = j(2) Y_v with j(Z) = [[0,-1],[1,0]].
        let (c, s) = ((2.0 * t).cos(), (2.0 * t).sin());
        let want = DVector::from_vec(vec![c * 0.4 + s * 1.2, s * 0.4 - c * 1.2, 2.0]);
        assert!((y - want).amax() < 1e-12);
    }
}

#[test]
fn block_metric_flow_matches_rk4() {
    // Y_v' = j(Y_z) (g11 Y_v + g12 Y_z), integrated independently.
    let (alg, product) = builtin("h3_plus_h3").unwrap();
    let tol = Tolerances::default();
    let split = orthogonal_split(&alg, &product, &tol).unwrap();
    let g11 = DMatrix::from_row_slice(
        4,
        4,
        &[
            2.0, 0.3, 0.0, 0.1, //
            0.3, 1.0, 0.2, 0.0, //
            0.0, 0.2, 1.5, 0.0, //
            0.1, 0.0, 0.0, 0.7,
        ],
    );
    let g12 = DMatrix::from_row_slice(4, 2, &[0.5, 0.0, 0.0, 0.2, 0.1, 0.1, 0.0, -0.3]);
    let g22 = DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.1, 2.0]);
    let blocks = MetricBlocks::new(&split, g11.clone(), g12.clone(), g12.transpose(), g22).unwrap();
    let y0 = DVector::from_vec(vec![0.3, -0.2, 1.1, 0.5, 0.8, -0.4]);
    let b = split.z_coords(&y0);
    let j = j_operator(&split, &AlgebraVector::new(split.z_part(&y0))).unwrap().into_matrix();
    let rhs = |a: &DVector<f64>| &j * (&g11 * a + &g12 * &b);
    let dt = 1e-3;
    let mut a = split.v_coords(&y0);
    for _ in 0..3000 {
        let k1 = rhs(&a);
        let k2 = rhs(&(&a + &k1 * (dt / 2.0)));
        let k3 = rhs(&(&a + &k2 * (dt / 2.0)));
        let k4 = rhs(&(&a + &k3 * dt));
        a += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
    }
    let traj = flow_exact(&split, Some(&blocks), &AlgebraVector::new(y0), &[0.0, 3.0]).unwrap();
    let exact = split.v_coords(&traj.states[1]);
    assert!((exact - a).amax() < 1e-10);
    assert!(traj.max_energy_drift() < 1e-12);
}
