//! Matrix exponential and the affine flow integral built on it.

use nalgebra::DMatrix;

/// `exp(A)` for a square matrix `A` (nalgebra's scaling and squaring).
pub fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    assert_eq!(a.nrows(), a.ncols(), "expm needs a square matrix");
    if a.nrows() == 0 {
        return DMatrix::zeros(0, 0);
    }
    a.exp()
}

/// `(exp(tA), int_0^t exp(sA) ds b)` from one exponential of the augmented
/// matrix `[[A, b], [0, 0]]`.
pub fn expm_affine(
    a: &DMatrix<f64>,
    b: &nalgebra::DVector<f64>,
    t: f64,
) -> (DMatrix<f64>, nalgebra::DVector<f64>) {
    let n = a.nrows();
    let mut aug = DMatrix::zeros(n + 1, n + 1);
    aug.view_mut((0, 0), (n, n)).copy_from(&(a * t));
    aug.view_mut((0, n), (n, 1)).copy_from(&(b * t));
    let e = expm(&aug);
    (
        e.view((0, 0), (n, n)).into_owned(),
        e.view((0, n), (n, 1)).column(0).into_owned(),
    )
}
