//! Small random constructions shared by the verification suite.

use crate::linalg::Matrix;
use crate::matpoly::MatrixPolynomial;
use rand::prelude::*;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

/// Matrix polynomial with i.i.d. standard normal entries drawn from `rng`.
pub(crate) fn random_polynomial(n: usize, d: usize, rng: &mut ChaCha12Rng) -> MatrixPolynomial {
    MatrixPolynomial::new(
        (0..=d)
            .map(|_| Matrix::from_rows(n, n, (0..n * n).map(|_| rng.sample(StandardNormal)).collect()))
            .collect(),
    )
    .expect("gaussian coefficients are finite")
}

/// Orthogonal matrix from Gram-Schmidt on Gaussian columns.
pub(crate) fn random_orthogonal_matrix(n: usize, rng: &mut ChaCha12Rng) -> Matrix {
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        for c in &cols {
            let dot: f64 = v.iter().zip(c).map(|(a, b)| a * b).sum();
            for (vi, ci) in v.iter_mut().zip(c) {
                *vi -= dot * ci;
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-6 {
            for vi in &mut v {
                *vi /= norm;
            }
            cols.push(v);
        }
    }
    let mut m = Matrix::zeros(n, n);
    for (j, c) in cols.iter().enumerate() {
        for (i, val) in c.iter().enumerate() {
            m.set(i, j, *val);
        }
    }
    m
}
