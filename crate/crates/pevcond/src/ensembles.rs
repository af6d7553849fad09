//! Deterministic, seeded samplers for the random models under study:
//! i.i.d. standard Gaussian matrices, GOE matrices, and the standard normal
//! on an arbitrary Frobenius-orthonormal subspace of M(n, R).
//!
//! Sampling is keyed by (seed, stream): every trial owns a disjoint stream
//! of a counter-based generator, so results are reproducible bit-for-bit
//! under any thread schedule. Normal variates come from the ziggurat of
//! `rand_distr::StandardNormal`; this choice is fixed here once so that the
//! moments (not the bits) are the cross-implementation contract.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::matpoly::MatrixPolynomial;
use rand::prelude::*;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

const BASIS_ORTHO_TOL: f64 = 1e-10;

/// Which random model to sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnsembleKind {
    #[serde(rename = "gaussian")]
    FullGaussian,
    Goe,
    Subspace,
}

impl EnsembleKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EnsembleKind::FullGaussian => "gaussian",
            EnsembleKind::Goe => "goe",
            EnsembleKind::Subspace => "subspace",
        }
    }
}

/// A random model: the ensemble kind, the matrix dimension and degree, and
/// for subspace sampling an explicit Frobenius-orthonormal basis.
#[derive(Debug, Clone)]
pub struct EnsembleSpec {
    kind: EnsembleKind,
    n: usize,
    d: usize,
    basis: Option<Vec<Matrix>>,
}

impl EnsembleSpec {
    pub fn gaussian(n: usize, d: usize) -> Result<Self> {
        Self::validate_dims(n, d)?;
        Ok(EnsembleSpec {
            kind: EnsembleKind::FullGaussian,
            n,
            d,
            basis: None,
        })
    }

    pub fn goe(n: usize, d: usize) -> Result<Self> {
        Self::validate_dims(n, d)?;
        Ok(EnsembleSpec {
            kind: EnsembleKind::Goe,
            n,
            d,
            basis: None,
        })
    }

    pub fn subspace(n: usize, d: usize, basis: Vec<Matrix>) -> Result<Self> {
        Self::validate_dims(n, d)?;
        if basis.is_empty() {
            return Err(Error::Config("subspace basis must be nonempty".into()));
        }
        for (i, b) in basis.iter().enumerate() {
            if b.rows() != n || b.cols() != n {
                return Err(Error::Config(format!(
                    "basis matrix {i} is {}x{}, expected {n}x{n}",
                    b.rows(),
                    b.cols()
                )));
            }
        }
        check_orthonormal(&basis)?;
        Ok(EnsembleSpec {
            kind: EnsembleKind::Subspace,
            n,
            d,
            basis: Some(basis),
        })
    }

    fn validate_dims(n: usize, d: usize) -> Result<()> {
        if n < 1 || d < 1 {
            return Err(Error::Config(format!(
                "need matrix dimension ≥ 1 and degree ≥ 1, got n={n}, d={d}"
            )));
        }
        Ok(())
    }

    pub fn kind(&self) -> EnsembleKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn basis(&self) -> Option<&[Matrix]> {
        self.basis.as_deref()
    }

    /// Dimension k of the sampled subspace of M(n, R).
    pub fn subspace_dim(&self) -> usize {
        match self.kind {
            EnsembleKind::FullGaussian => self.n * self.n,
            EnsembleKind::Goe => self.n * (self.n + 1) / 2,
            EnsembleKind::Subspace => self.basis.as_ref().map(|b| b.len()).unwrap_or(0),
        }
    }
}

/// Key of one reproducible sample: trial t of a run uses stream = t.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngKey {
    pub seed: u64,
    pub stream: u64,
}

impl RngKey {
    pub fn new(seed: u64, stream: u64) -> Self {
        RngKey { seed, stream }
    }

    /// The counter-based generator positioned on this key's stream.
    pub fn rng(&self) -> ChaCha12Rng {
        let mut rng = ChaCha12Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// Draws one matrix polynomial from the ensemble.
pub fn sample(spec: &EnsembleSpec, key: RngKey) -> Result<MatrixPolynomial> {
    let mut rng = key.rng();
    let n = spec.n;
    let coeffs: Vec<Matrix> = match spec.kind {
        EnsembleKind::FullGaussian => (0..=spec.d)
            .map(|_| gaussian_matrix(n, &mut rng))
            .collect(),
        EnsembleKind::Goe => (0..=spec.d).map(|_| goe_matrix(n, &mut rng)).collect(),
        EnsembleKind::Subspace => {
            let basis = spec.basis.as_ref().expect("subspace spec carries a basis");
            (0..=spec.d)
                .map(|_| {
                    let mut acc = Matrix::zeros(n, n);
                    for b in basis {
                        let c: f64 = rng.sample(StandardNormal);
                        acc.axpy(c, b);
                    }
                    acc
                })
                .collect()
        }
    };
    MatrixPolynomial::new(coeffs)
}

fn gaussian_matrix(n: usize, rng: &mut ChaCha12Rng) -> Matrix {
    Matrix::from_rows(n, n, (0..n * n).map(|_| rng.sample(StandardNormal)).collect())
}

/// (G + Gᵀ)/2 with G entrywise standard normal: diagonal variance 1,
/// off-diagonal variance 1/2 — the standard normal of the Frobenius
/// structure on the symmetric matrices.
fn goe_matrix(n: usize, rng: &mut ChaCha12Rng) -> Matrix {
    let g = gaussian_matrix(n, rng);
    let mut out = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            out.set(i, j, 0.5 * (g.get(i, j) + g.get(j, i)));
        }
    }
    out
}

/// The canonical Frobenius-orthonormal basis of Sym(n, R):
/// {E_ii} followed by {(E_ij + E_ji)/√2 : i < j} in lexicographic order.
pub fn sym_orthonormal_basis(n: usize) -> Vec<Matrix> {
    let mut basis = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        let mut e = Matrix::zeros(n, n);
        e.set(i, i, 1.0);
        basis.push(e);
    }
    let half = 1.0 / 2f64.sqrt();
    for i in 0..n {
        for j in i + 1..n {
            let mut e = Matrix::zeros(n, n);
            e.set(i, j, half);
            e.set(j, i, half);
            basis.push(e);
        }
    }
    basis
}

fn check_orthonormal(basis: &[Matrix]) -> Result<()> {
    let mut deviation = 0.0f64;
    for (i, a) in basis.iter().enumerate() {
        for (j, b) in basis.iter().enumerate().skip(i) {
            let target = if i == j { 1.0 } else { 0.0 };
            deviation = deviation.max((a.frobenius_dot(b) - target).abs());
        }
    }
    if deviation > BASIS_ORTHO_TOL {
        return Err(Error::BadBasis { deviation });
    }
    Ok(())
}

/// JSON interchange form of an ensemble spec:
/// `{"kind": "gaussian"|"goe"|"subspace", "n": int, "d": int, "basis": [...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnsembleSpecDoc {
    pub kind: EnsembleKind,
    pub n: usize,
    pub d: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<Vec<Vec<f64>>>>,
}

impl EnsembleSpecDoc {
    pub fn into_spec(self) -> Result<EnsembleSpec> {
        match self.kind {
            EnsembleKind::FullGaussian => EnsembleSpec::gaussian(self.n, self.d),
            EnsembleKind::Goe => EnsembleSpec::goe(self.n, self.d),
            EnsembleKind::Subspace => {
                let rows = self
                    .basis
                    .ok_or_else(|| Error::Config("subspace spec needs a basis".into()))?;
                let basis = rows
                    .into_iter()
                    .enumerate()
                    .map(|(idx, m)| {
                        if m.len() != self.n || m.iter().any(|r| r.len() != self.n) {
                            return Err(Error::Config(format!(
                                "basis matrix {idx} is not {0}x{0}",
                                self.n
                            )));
                        }
                        Ok(Matrix::from_rows(
                            self.n,
                            self.n,
                            m.into_iter().flatten().collect(),
                        ))
                    })
                    .collect::<Result<Vec<_>>>()?;
                EnsembleSpec::subspace(self.n, self.d, basis)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_keys_reproduce_identical_bytes() {
        let spec = EnsembleSpec::gaussian(3, 2).unwrap();
        let a = sample(&spec, RngKey::new(42, 7)).unwrap();
        let b = sample(&spec, RngKey::new(42, 7)).unwrap();
        assert_eq!(a, b);
        let c = sample(&spec, RngKey::new(42, 8)).unwrap();
        assert_ne!(a, c);
        let d = sample(&spec, RngKey::new(43, 7)).unwrap();
        assert_ne!(a, d);
    }

    #[test]
    fn gaussian_second_moment() {
        let spec = EnsembleSpec::gaussian(2, 1).unwrap();
        let trials = 100_000u64;
        let mut acc = 0.0;
        for t in 0..trials {
            let a = sample(&spec, RngKey::new(1, t)).unwrap();
            let f = a.frobenius_norm();
            acc += f * f;
        }
        let mean = acc / trials as f64;
        let expected = 8.0; // (d+1)·n² unit-variance squares
        assert!(
            (mean / expected - 1.0).abs() < 0.01,
            "mean ‖A‖² = {mean}, expected {expected}"
        );
    }

    #[test]
    fn goe_entry_variances() {
        let spec = EnsembleSpec::goe(3, 1).unwrap();
        let mut diag = Vec::new();
        let mut off = Vec::new();
        let mut t = 0u64;
        while diag.len() < 100_000 {
            let a = sample(&spec, RngKey::new(2, t)).unwrap();
            t += 1;
            let m = a.coeff(0);
            for i in 0..3 {
                diag.push(m.get(i, i));
                for j in i + 1..3 {
                    off.push(m.get(i, j));
                    assert_eq!(m.get(i, j), m.get(j, i), "sample must be symmetric");
                }
            }
        }
        let var = |xs: &[f64]| {
            let mean = xs.iter().sum::<f64>() / xs.len() as f64;
            xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64
        };
        let vd = var(&diag);
        let vo = var(&off);
        assert!((vd - 1.0).abs() < 0.02, "diagonal variance {vd}");
        assert!((vo - 0.5).abs() < 0.01, "off-diagonal variance {vo}");
    }

    #[test]
    fn singleton_subspace_spans_one_direction() {
        let mut e11 = Matrix::zeros(2, 2);
        e11.set(0, 0, 1.0);
        let spec = EnsembleSpec::subspace(2, 1, vec![e11]).unwrap();
        for t in 0..50 {
            let a = sample(&spec, RngKey::new(3, t)).unwrap();
            for m in a.coeffs() {
                assert_eq!(m.get(0, 1), 0.0);
                assert_eq!(m.get(1, 0), 0.0);
                assert_eq!(m.get(1, 1), 0.0);
            }
        }
    }

    #[test]
    fn sym_basis_shape_and_gram() {
        assert_eq!(sym_orthonormal_basis(1).len(), 1);
        assert_eq!(sym_orthonormal_basis(1)[0].get(0, 0), 1.0);
        let basis = sym_orthonormal_basis(2);
        assert_eq!(basis.len(), 3);
        for (i, a) in basis.iter().enumerate() {
            for (j, b) in basis.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((a.frobenius_dot(b) - target).abs() < 1e-15);
            }
        }
        for n in 1..=6 {
            assert_eq!(sym_orthonormal_basis(n).len(), n * (n + 1) / 2);
        }
    }

    #[test]
    fn sym_subspace_matches_goe_in_distribution() {
        // both are the standard normal on Sym(n, R): compare E ‖A₀‖² by a
        // two-sample test at three combined standard errors
        let n = 3;
        let trials = 10_000u64;
        let goe_spec = EnsembleSpec::goe(n, 1).unwrap();
        let sub_spec = EnsembleSpec::subspace(n, 1, sym_orthonormal_basis(n)).unwrap();
        let collect = |spec: &EnsembleSpec, seed: u64| -> (f64, f64) {
            let xs: Vec<f64> = (0..trials)
                .map(|t| {
                    let a = sample(spec, RngKey::new(seed, t)).unwrap();
                    let f = a.coeff(0).frobenius_norm();
                    f * f
                })
                .collect();
            let mean = xs.iter().sum::<f64>() / xs.len() as f64;
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
            (mean, (var / xs.len() as f64).sqrt())
        };
        let (m_goe, se_goe) = collect(&goe_spec, 11);
        let (m_sub, se_sub) = collect(&sub_spec, 12);
        let combined = (se_goe * se_goe + se_sub * se_sub).sqrt();
        assert!(
            (m_goe - m_sub).abs() <= 3.0 * combined,
            "GOE mean {m_goe} vs subspace mean {m_sub} (3se = {})",
            3.0 * combined
        );
        // and both must match the exact second moment n(n+1)/2
        let exact = (n * (n + 1) / 2) as f64;
        assert!((m_goe - exact).abs() <= 4.0 * se_goe);
    }

    #[test]
    fn gaussian_mu_mean_is_invariant_under_right_rotation() {
        // post-multiplying every coefficient by a fixed orthogonal matrix
        // leaves the sampling distribution (and so E μ) unchanged
        use crate::conditioning::total_condition;
        use crate::matpoly::MatrixPolynomial;
        use crate::randutil::random_orthogonal_matrix;

        let spec = EnsembleSpec::gaussian(2, 1).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(99);
        let q = random_orthogonal_matrix(2, &mut rng);
        let trials = 2000u64;
        let collect = |seed: u64, rotate: bool| -> (f64, f64) {
            let xs: Vec<f64> = (0..trials)
                .filter_map(|t| {
                    let a = sample(&spec, RngKey::new(seed, t)).unwrap();
                    let a = if rotate {
                        MatrixPolynomial::new(
                            a.coeffs().iter().map(|m| m.matmul(&q)).collect(),
                        )
                        .unwrap()
                    } else {
                        a
                    };
                    let mu = total_condition(&a).unwrap().total_mu;
                    mu.is_finite().then_some(mu)
                })
                .collect();
            let mean = xs.iter().sum::<f64>() / xs.len() as f64;
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
            (mean, (var / xs.len() as f64).sqrt())
        };
        let (m_plain, se_plain) = collect(21, false);
        let (m_rot, se_rot) = collect(22, true);
        let combined = (se_plain * se_plain + se_rot * se_rot).sqrt();
        assert!(
            (m_plain - m_rot).abs() <= 3.0 * combined,
            "plain {m_plain} vs rotated {m_rot} (3se = {})",
            3.0 * combined
        );
    }

    #[test]
    fn non_orthonormal_basis_is_rejected() {
        let mut b1 = Matrix::zeros(2, 2);
        b1.set(0, 0, 1.0);
        let mut b2 = Matrix::zeros(2, 2);
        b2.set(0, 0, 0.9);
        b2.set(1, 1, 0.1);
        assert!(matches!(
            EnsembleSpec::subspace(2, 1, vec![b1, b2]),
            Err(Error::BadBasis { .. })
        ));
    }

    #[test]
    fn spec_doc_round_trip() {
        let doc: EnsembleSpecDoc =
            serde_json::from_str(r#"{"kind":"goe","n":3,"d":2}"#).unwrap();
        let spec = doc.into_spec().unwrap();
        assert_eq!(spec.kind(), EnsembleKind::Goe);
        assert_eq!(spec.subspace_dim(), 6);
        let sub: EnsembleSpecDoc = serde_json::from_str(
            r#"{"kind":"subspace","n":1,"d":1,"basis":[[[1.0]]]}"#,
        )
        .unwrap();
        assert_eq!(sub.into_spec().unwrap().subspace_dim(), 1);
        let text = serde_json::to_string(&EnsembleSpecDoc {
            kind: EnsembleKind::FullGaussian,
            n: 2,
            d: 1,
            basis: None,
        })
        .unwrap();
        assert_eq!(text, r#"{"kind":"gaussian","n":2,"d":1}"#);
    }
}
