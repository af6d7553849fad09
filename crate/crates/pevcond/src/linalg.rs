//! Dense row-major matrices sized for desk-scale problems (n ≤ 32), with the
//! two factorizations the rest of the crate needs: partially pivoted LU for
//! determinants and a one-sided Jacobi SVD for smallest singular pairs.

use serde::{Deserialize, Serialize};

/// Dense real matrix, row-major storage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// Builds from row-major data; panics if the length does not match.
    pub fn from_rows(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "row-major data length mismatch");
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Frobenius inner product tr(AᵀB).
    pub fn frobenius_dot(&self, other: &Matrix) -> f64 {
        debug_assert_eq!(self.rows, other.rows);
        debug_assert_eq!(self.cols, other.cols);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn scale(&self, t: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * t).collect(),
        }
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        debug_assert_eq!(self.rows, other.rows);
        debug_assert_eq!(self.cols, other.cols);
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// In-place `self += t * other`.
    pub fn axpy(&mut self, t: f64, other: &Matrix) {
        debug_assert_eq!(self.rows, other.rows);
        debug_assert_eq!(self.cols, other.cols);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += t * b;
        }
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "inner dimension mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, x.len());
        (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(x)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    pub fn matvec_transposed(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.rows, x.len());
        let mut out = vec![0.0; self.cols];
        for i in 0..self.rows {
            let xi = x[i];
            for j in 0..self.cols {
                out[j] += self.data[i * self.cols + j] * xi;
            }
        }
        out
    }

    /// Determinant by partially pivoted LU. A zero pivot means det = 0.
    pub fn det(&self) -> f64 {
        assert_eq!(self.rows, self.cols, "determinant needs a square matrix");
        let n = self.rows;
        if n == 1 {
            return self.data[0];
        }
        if n == 2 {
            return self.data[0] * self.data[3] - self.data[1] * self.data[2];
        }
        let mut a = self.data.clone();
        let mut det = 1.0;
        for k in 0..n {
            let mut p = k;
            let mut pmax = a[k * n + k].abs();
            for i in k + 1..n {
                let v = a[i * n + k].abs();
                if v > pmax {
                    pmax = v;
                    p = i;
                }
            }
            if pmax == 0.0 {
                return 0.0;
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                det = -det;
            }
            let pivot = a[k * n + k];
            det *= pivot;
            for i in k + 1..n {
                let f = a[i * n + k] / pivot;
                if f == 0.0 {
                    continue;
                }
                for j in k + 1..n {
                    a[i * n + j] -= f * a[k * n + j];
                }
            }
        }
        det
    }

    /// Full SVD A = U Σ Vᵀ by one-sided Jacobi, singular values descending.
    ///
    /// Column pairs are rotated until every off-diagonal inner product is
    /// below `1e-14` relative to the column norms. Left vectors of
    /// (numerically) zero singular values are completed by orthogonalization
    /// so that U is always a full orthogonal basis.
    pub fn svd(&self) -> Svd {
        assert_eq!(self.rows, self.cols, "svd here is for square matrices");
        let n = self.rows;
        let mut w = self.clone(); // becomes U * Σ
        let mut v = Matrix::identity(n);
        let tol = 1e-14;
        let max_sweeps = 60;
        for _ in 0..max_sweeps {
            let mut rotated = false;
            for p in 0..n {
                for q in p + 1..n {
                    let mut app = 0.0;
                    let mut aqq = 0.0;
                    let mut apq = 0.0;
                    for i in 0..n {
                        let wp = w.get(i, p);
                        let wq = w.get(i, q);
                        app += wp * wp;
                        aqq += wq * wq;
                        apq += wp * wq;
                    }
                    if apq.abs() <= tol * (app * aqq).sqrt() || apq == 0.0 {
                        continue;
                    }
                    rotated = true;
                    let zeta = (aqq - app) / (2.0 * apq);
                    let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = c * t;
                    for i in 0..n {
                        let wp = w.get(i, p);
                        let wq = w.get(i, q);
                        w.set(i, p, c * wp - s * wq);
                        w.set(i, q, s * wp + c * wq);
                        let vp = v.get(i, p);
                        let vq = v.get(i, q);
                        v.set(i, p, c * vp - s * vq);
                        v.set(i, q, s * vp + c * vq);
                    }
                }
            }
            if !rotated {
                break;
            }
        }

        let mut sigma: Vec<f64> = (0..n)
            .map(|j| (0..n).map(|i| w.get(i, j).powi(2)).sum::<f64>().sqrt())
            .collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| sigma[b].partial_cmp(&sigma[a]).unwrap());

        let mut u = Matrix::zeros(n, n);
        let mut v_sorted = Matrix::zeros(n, n);
        let sigma_max = order.first().map(|&j| sigma[j]).unwrap_or(0.0);
        let tiny = 1e-300f64.max(sigma_max * 1e-150);
        let mut pending: Vec<usize> = Vec::new();
        for (dst, &src) in order.iter().enumerate() {
            for i in 0..n {
                v_sorted.set(i, dst, v.get(i, src));
            }
            if sigma[src] > tiny {
                for i in 0..n {
                    u.set(i, dst, w.get(i, src) / sigma[src]);
                }
            } else {
                pending.push(dst);
            }
        }
        // Columns with σ = 0 get left vectors from the orthogonal complement.
        for dst in pending {
            complete_column(&mut u, dst);
        }
        sigma.sort_by(|a, b| b.partial_cmp(a).unwrap());
        Svd {
            u,
            sigma,
            v: v_sorted,
        }
    }
}

/// Result of [`Matrix::svd`]: `u * diag(sigma) * v.transpose()` reconstructs
/// the input; `sigma` is sorted descending.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: Matrix,
    pub sigma: Vec<f64>,
    pub v: Matrix,
}

/// Fills column `col` of `m` with a unit vector orthogonal to every other
/// (already orthonormal) column.
fn complete_column(m: &mut Matrix, col: usize) {
    let n = m.rows();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for k in 0..n {
        let mut cand = vec![0.0; n];
        cand[k] = 1.0;
        for j in 0..n {
            if j == col {
                continue;
            }
            let dot: f64 = (0..n).map(|i| cand[i] * m.get(i, j)).sum();
            if dot != 0.0 {
                for i in 0..n {
                    cand[i] -= dot * m.get(i, j);
                }
            }
        }
        let norm = cand.iter().map(|v| v * v).sum::<f64>().sqrt();
        if best.as_ref().map_or(true, |(b, _)| norm > *b) {
            best = Some((norm, cand));
        }
    }
    let (norm, cand) = best.expect("nonempty candidate set");
    debug_assert!(norm > 0.0, "orthogonal complement must be nonempty");
    for i in 0..n {
        m.set(i, col, cand[i] / norm);
    }
}

pub fn vec_norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn vec_dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha12Rng;
    use rand_distr::StandardNormal;

    fn random_matrix(n: usize, rng: &mut ChaCha12Rng) -> Matrix {
        Matrix::from_rows(n, n, (0..n * n).map(|_| rng.sample(StandardNormal)).collect())
    }

    #[test]
    fn det_of_diagonal_and_singular() {
        let m = Matrix::from_rows(2, 2, vec![2.0, 0.0, 0.0, 3.0]);
        assert_eq!(m.det(), 6.0);
        let s = Matrix::from_rows(2, 2, vec![1.0, 2.0, 2.0, 4.0]);
        assert!(s.det().abs() < 1e-15);
    }

    #[test]
    fn det_matches_cofactor_expansion_3x3() {
        let m = Matrix::from_rows(3, 3, vec![2.0, -1.0, 0.5, 1.0, 3.0, -2.0, 0.0, 4.0, 1.5]);
        // cofactor expansion by hand
        let expected = 2.0 * (3.0 * 1.5 - (-2.0) * 4.0) - (-1.0) * (1.0 * 1.5 - (-2.0) * 0.0)
            + 0.5 * (1.0 * 4.0 - 3.0 * 0.0);
        assert!((m.det() - expected).abs() <= 1e-13 * expected.abs());
    }

    #[test]
    fn det_is_multiplicative() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        for n in 1..=6 {
            let a = random_matrix(n, &mut rng);
            let b = random_matrix(n, &mut rng);
            let lhs = a.matmul(&b).det();
            let rhs = a.det() * b.det();
            assert!(
                (lhs - rhs).abs() <= 1e-10 * rhs.abs().max(1.0),
                "n={n}: {lhs} vs {rhs}"
            );
        }
    }

    #[test]
    fn svd_reconstructs_and_orders() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        for n in 1..=6 {
            let a = random_matrix(n, &mut rng);
            let svd = a.svd();
            for j in 0..n.saturating_sub(1) {
                assert!(svd.sigma[j] >= svd.sigma[j + 1]);
            }
            // U Σ Vᵀ = A
            let mut us = svd.u.clone();
            for j in 0..n {
                for i in 0..n {
                    us.set(i, j, us.get(i, j) * svd.sigma[j]);
                }
            }
            let recon = us.matmul(&svd.v.transpose());
            for (x, y) in recon.data().iter().zip(a.data()) {
                assert!((x - y).abs() <= 1e-12 * a.frobenius_norm().max(1.0));
            }
            // orthogonality
            let utu = svd.u.transpose().matmul(&svd.u);
            let vtv = svd.v.transpose().matmul(&svd.v);
            for i in 0..n {
                for j in 0..n {
                    let id = if i == j { 1.0 } else { 0.0 };
                    assert!((utu.get(i, j) - id).abs() < 1e-12);
                    assert!((vtv.get(i, j) - id).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn svd_handles_exact_rank_deficiency() {
        let a = Matrix::from_rows(2, 2, vec![0.0, 0.0, 0.0, 1.0]);
        let svd = a.svd();
        assert!((svd.sigma[0] - 1.0).abs() < 1e-15);
        assert!(svd.sigma[1].abs() < 1e-15);
        // smallest pair must still be a unit vector
        let u_min: Vec<f64> = (0..2).map(|i| svd.u.get(i, 1)).collect();
        assert!((vec_norm(&u_min) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn svd_singular_values_match_gram_eigenvalues_2x2() {
        let a = Matrix::from_rows(2, 2, vec![1.0, 2.0, 3.0, 4.0]);
        let svd = a.svd();
        // reference values from the characteristic polynomial of AᵀA
        assert!((svd.sigma[0] - 5.464985704219043).abs() < 1e-12);
        assert!((svd.sigma[1] - 0.3659661906262578).abs() < 1e-12);
    }
}
