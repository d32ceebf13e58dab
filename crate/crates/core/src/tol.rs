use serde::Serialize;

/// Numerical thresholds shared across the library.
///
/// * `alg`: algebraic identities on supplied structure constants (Jacobi, step two).
/// * `rank`: relative dead band for rank, kernel and signature decisions.
/// * `num`: relative bound for derived numerical identities.
/// * `spec`: relative threshold below which a real or imaginary part of an
///   eigenvalue counts as zero.
/// * `cluster`: relative radius used to merge nearby eigenvalues into one
///   cluster before multiplicities are read off.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    pub alg: f64,
    pub rank: f64,
    pub num: f64,
    pub spec: f64,
    pub cluster: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            alg: 1e-10,
            rank: 1e-10,
            num: 1e-9,
            spec: 1e-8,
            cluster: 1e-6,
        }
    }
}
