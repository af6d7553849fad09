//! Homogeneous matrix polynomials P(A, α, β) = Σ αⁱ β^{d-i} A_i: storage,
//! evaluation, partial derivatives, norms and coefficient-basis changes.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use serde::{Deserialize, Serialize};

/// Point [α : β] of the real projective line, stored as its canonical unit
/// representative: β > 0, or β = 0 and α = 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectivePoint {
    alpha: f64,
    beta: f64,
}

impl ProjectivePoint {
    /// Canonicalizes an arbitrary nonzero direction (a, b).
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::Domain("projective point must be finite".into()));
        }
        let norm = a.hypot(b);
        if norm == 0.0 {
            return Err(Error::Domain("projective point must be nonzero".into()));
        }
        let (mut alpha, mut beta) = (a / norm, b / norm);
        if beta < 0.0 || (beta == 0.0 && alpha < 0.0) {
            alpha = -alpha;
            beta = -beta;
        }
        if beta == 0.0 {
            return Ok(ProjectivePoint {
                alpha: 1.0,
                beta: 0.0,
            });
        }
        Ok(ProjectivePoint { alpha, beta })
    }

    /// The point [1 : 0] (the root at infinity of the affine chart t = α/β).
    pub fn infinity() -> Self {
        ProjectivePoint {
            alpha: 1.0,
            beta: 0.0,
        }
    }

    /// The point with affine coordinate t, i.e. [t : 1] normalized.
    pub fn from_affine(t: f64) -> Self {
        ProjectivePoint::new(t, 1.0).expect("finite affine coordinate")
    }

    /// Canonical representative from an angle on the circle.
    pub fn from_angle(theta: f64) -> Self {
        ProjectivePoint::new(theta.cos(), theta.sin()).expect("unit direction")
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Angle of the canonical representative, in [0, π).
    pub fn angle(&self) -> f64 {
        let theta = self.beta.atan2(self.alpha);
        if theta < 0.0 {
            theta + std::f64::consts::PI
        } else {
            theta
        }
    }

    /// Projective distance: the angle between the two lines, in [0, π/2].
    pub fn angle_distance(&self, other: &ProjectivePoint) -> f64 {
        let diff = (self.angle() - other.angle()).abs();
        diff.min(std::f64::consts::PI - diff)
    }

    pub fn approx_eq(&self, other: &ProjectivePoint, tol: f64) -> bool {
        self.angle_distance(other) <= tol
    }
}

/// The tuple A = (A₀, …, A_d) of real n×n coefficient matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixPolynomial {
    n: usize,
    d: usize,
    coeffs: Vec<Matrix>,
}

impl MatrixPolynomial {
    pub fn new(coeffs: Vec<Matrix>) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::BadPolynomial(
                "need at least two coefficient matrices (degree ≥ 1)".into(),
            ));
        }
        let n = coeffs[0].rows();
        if n == 0 {
            return Err(Error::BadPolynomial("matrix dimension must be ≥ 1".into()));
        }
        for (i, m) in coeffs.iter().enumerate() {
            if m.rows() != n || m.cols() != n {
                return Err(Error::BadPolynomial(format!(
                    "coefficient {i} is {}x{}, expected {n}x{n}",
                    m.rows(),
                    m.cols()
                )));
            }
            if !m.is_finite() {
                return Err(Error::BadPolynomial(format!(
                    "coefficient {i} contains a non-finite entry"
                )));
            }
        }
        let d = coeffs.len() - 1;
        Ok(MatrixPolynomial { n, d, coeffs })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn coeffs(&self) -> &[Matrix] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &Matrix {
        &self.coeffs[i]
    }

    pub fn coeff_mut(&mut self, i: usize) -> &mut Matrix {
        &mut self.coeffs[i]
    }

    /// ‖A‖ = √(Σ ‖A_i‖_F²), the norm of the product Frobenius structure.
    pub fn frobenius_norm(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|m| {
                let f = m.frobenius_norm();
                f * f
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Multiplies every coefficient matrix by t.
    pub fn scale_coeffs(&self, t: f64) -> MatrixPolynomial {
        MatrixPolynomial {
            n: self.n,
            d: self.d,
            coeffs: self.coeffs.iter().map(|m| m.scale(t)).collect(),
        }
    }

    /// P(A, α, β) at a raw direction (α, β), not necessarily canonical.
    ///
    /// Horner-style accumulation in the dominant homogeneous variable keeps
    /// the power products bounded when |α|, |β| ≤ 1.
    pub fn evaluate_at(&self, alpha: f64, beta: f64) -> Matrix {
        let d = self.d;
        if alpha.abs() <= beta.abs() {
            // Σ A_i (α/β)^i  scaled by β^d, Horner from i = d down
            let t = if beta == 0.0 { 0.0 } else { alpha / beta };
            let mut acc = self.coeffs[d].clone();
            for i in (0..d).rev() {
                acc = acc.scale(t);
                acc.axpy(1.0, &self.coeffs[i]);
            }
            acc.scale(beta.powi(d as i32))
        } else {
            let s = beta / alpha;
            let mut acc = self.coeffs[0].clone();
            for i in 1..=d {
                acc = acc.scale(s);
                acc.axpy(1.0, &self.coeffs[i]);
            }
            acc.scale(alpha.powi(d as i32))
        }
    }

    pub fn evaluate(&self, pt: &ProjectivePoint) -> Matrix {
        self.evaluate_at(pt.alpha(), pt.beta())
    }

    /// (∂P/∂α, ∂P/∂β) at a raw direction. Terms whose exponent vanishes are
    /// dropped rather than evaluated as 0 · (negative power).
    pub fn evaluate_partials_at(&self, alpha: f64, beta: f64) -> (Matrix, Matrix) {
        let d = self.d;
        if d == 1 {
            return (self.coeffs[1].clone(), self.coeffs[0].clone());
        }
        // ∂α P is the degree d-1 polynomial with coefficients (i+1)·A_{i+1};
        // ∂β P has coefficients (d-i)·A_i, i = 0..d-1.
        let d_alpha = MatrixPolynomial {
            n: self.n,
            d: d - 1,
            coeffs: (1..=d)
                .map(|i| self.coeffs[i].scale(i as f64))
                .collect(),
        };
        let d_beta = MatrixPolynomial {
            n: self.n,
            d: d - 1,
            coeffs: (0..d)
                .map(|i| self.coeffs[i].scale((d - i) as f64))
                .collect(),
        };
        (
            d_alpha.evaluate_at(alpha, beta),
            d_beta.evaluate_at(alpha, beta),
        )
    }

    pub fn evaluate_partials(&self, pt: &ProjectivePoint) -> (Matrix, Matrix) {
        self.evaluate_partials_at(pt.alpha(), pt.beta())
    }

    /// Rewrites the coefficients under a change of binary-form basis:
    /// A′_j = Σ_i t_ij A_i, so that monomial-basis evaluation of the result
    /// equals f-basis evaluation of the input (see [`BinaryFormBasis`]).
    pub fn apply_coefficient_map(&self, basis: &BinaryFormBasis) -> Result<MatrixPolynomial> {
        if basis.degree() != self.d {
            return Err(Error::BadPolynomial(format!(
                "basis degree {} does not match polynomial degree {}",
                basis.degree(),
                self.d
            )));
        }
        basis.check_invertible()?;
        let t = basis.transform();
        let coeffs = (0..=self.d)
            .map(|j| {
                let mut acc = Matrix::zeros(self.n, self.n);
                for i in 0..=self.d {
                    acc.axpy(t.get(i, j), &self.coeffs[i]);
                }
                acc
            })
            .collect();
        Ok(MatrixPolynomial {
            n: self.n,
            d: self.d,
            coeffs,
        })
    }

    pub fn to_json(&self) -> MatrixPolynomialDoc {
        MatrixPolynomialDoc {
            n: self.n,
            d: self.d,
            matrices: self
                .coeffs
                .iter()
                .map(|m| {
                    (0..self.n)
                        .map(|i| (0..self.n).map(|j| m.get(i, j)).collect())
                        .collect()
                })
                .collect(),
        }
    }
}

/// JSON interchange document: `{"n": int, "d": int, "matrices": [...]}` with
/// d+1 matrices, each n rows of n numbers.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixPolynomialDoc {
    pub n: usize,
    pub d: usize,
    pub matrices: Vec<Vec<Vec<f64>>>,
}

impl MatrixPolynomialDoc {
    pub fn into_polynomial(self) -> Result<MatrixPolynomial> {
        if self.matrices.len() != self.d + 1 {
            return Err(Error::BadPolynomial(format!(
                "expected {} matrices for degree {}, got {}",
                self.d + 1,
                self.d,
                self.matrices.len()
            )));
        }
        let coeffs = self
            .matrices
            .into_iter()
            .enumerate()
            .map(|(idx, rows)| {
                if rows.len() != self.n || rows.iter().any(|r| r.len() != self.n) {
                    return Err(Error::BadPolynomial(format!(
                        "matrix {idx} is not {0}x{0}",
                        self.n
                    )));
                }
                Ok(Matrix::from_rows(
                    self.n,
                    self.n,
                    rows.into_iter().flatten().collect(),
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        MatrixPolynomial::new(coeffs)
    }
}

/// A basis f = (f_0, …, f_d) of the binary forms of degree d, encoded by the
/// invertible matrix t with f_i(α, β) = Σ_j t_ij α^j β^{d-j}.
///
/// The identity transform encodes the monomial basis itself.
#[derive(Debug, Clone)]
pub struct BinaryFormBasis {
    d: usize,
    transform: Matrix,
}

impl BinaryFormBasis {
    pub fn new(d: usize, transform: Matrix) -> Result<Self> {
        if transform.rows() != d + 1 || transform.cols() != d + 1 {
            return Err(Error::BadPolynomial(format!(
                "transform must be {0}x{0} for degree {1}",
                d + 1,
                d
            )));
        }
        let basis = BinaryFormBasis { d, transform };
        basis.check_invertible()?;
        Ok(basis)
    }

    pub fn monomial(d: usize) -> Self {
        BinaryFormBasis {
            d,
            transform: Matrix::identity(d + 1),
        }
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn transform(&self) -> &Matrix {
        &self.transform
    }

    /// Evaluates the i-th basis form at a raw direction.
    pub fn form_value(&self, i: usize, alpha: f64, beta: f64) -> f64 {
        let d = self.d;
        (0..=d)
            .map(|j| self.transform.get(i, j) * alpha.powi(j as i32) * beta.powi((d - j) as i32))
            .sum()
    }

    /// Invertibility against the Hadamard row-norm scale of the determinant.
    pub fn check_invertible(&self) -> Result<()> {
        let m = &self.transform;
        let det = m.det();
        let mut scale = 1.0;
        for i in 0..m.rows() {
            let row_norm: f64 = (0..m.cols())
                .map(|j| m.get(i, j).powi(2))
                .sum::<f64>()
                .sqrt();
            scale *= row_norm;
        }
        if !(det.abs() > 1e-10 * scale) {
            return Err(Error::SingularTransform {
                det: det.abs(),
                scale,
            });
        }
        Ok(())
    }
}
