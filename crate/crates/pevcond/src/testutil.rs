//! Shared helpers for the unit-test suites.

use crate::linalg::Matrix;
use crate::matpoly::MatrixPolynomial;
use rand_chacha::ChaCha12Rng;

pub fn random_poly(n: usize, d: usize, rng: &mut ChaCha12Rng) -> MatrixPolynomial {
    crate::randutil::random_polynomial(n, d, rng)
}

pub fn random_orthogonal(n: usize, rng: &mut ChaCha12Rng) -> Matrix {
    crate::randutil::random_orthogonal_matrix(n, rng)
}

/// The worked two-by-two pencil used across the suites:
/// A₀ = diag(2, 3), A₁ = −I, with eigenvalues [2:1] and [3:1].
pub fn diag_example() -> MatrixPolynomial {
    MatrixPolynomial::new(vec![
        Matrix::from_rows(2, 2, vec![2.0, 0.0, 0.0, 3.0]),
        Matrix::from_rows(2, 2, vec![-1.0, 0.0, 0.0, -1.0]),
    ])
    .unwrap()
}
