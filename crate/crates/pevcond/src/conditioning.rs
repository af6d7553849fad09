//! Local and total relative condition numbers of polynomial eigenvalues.
//!
//! The closed-form route evaluates
//! μ(A, (α, β)) = (Σ_k α^{2k} β^{2d-2k})^{1/2} · ‖r‖‖ℓ‖/|ℓᵀv| · ‖A‖ with
//! v = β·(∂αP)r − α·(∂βP)r, where (r, ℓ) is the smallest singular pair of
//! P(A, α, β). The finite-difference route re-solves the nearest root under
//! elementary coefficient perturbations and measures the angle drift on the
//! projective line; the two must agree, and the agreement suite is the
//! anti-regression gate for the formula.

use crate::error::{Error, Result};
use crate::linalg::{vec_dot, vec_norm};
use crate::matpoly::{MatrixPolynomial, ProjectivePoint};
use crate::pevsolver::{self, polish_angle, RootSet, SolveOutcome};

const EIG_RESIDUAL_TOL: f64 = 1e-8;
const CRITICAL_CUTOFF_REL: f64 = 1e-14;
const TRACKING_LIMIT: f64 = 0.1;
const ORACLE_SEPARATION: f64 = 1e-3;

/// One eigenvalue with its singular pair, local condition number and solve
/// diagnostics. `residual` is the root residual |q(point)|/scale when the
/// record comes out of [`total_condition`], and the relative eigen-residual
/// σ_min/‖P‖_F for records built directly at a point.
#[derive(Debug, Clone)]
pub struct PevRecord {
    pub point: ProjectivePoint,
    pub right: Vec<f64>,
    pub left: Vec<f64>,
    pub sigma_min: f64,
    pub local_mu: f64,
    pub residual: f64,
}

/// Every eigenvalue of one input with the summed condition number.
#[derive(Debug, Clone)]
pub struct ConditionReport {
    pub records: Vec<PevRecord>,
    /// Σ local_mu; +∞ when the input is degenerate or any local value is.
    pub total_mu: f64,
    /// True when the determinant form vanishes identically, i.e. the whole
    /// projective line consists of eigenvalues.
    pub degenerate: bool,
}

/// Smallest singular pair of P(A, α, β) at a numerical eigenvalue.
///
/// Signs follow a fixed convention: the first non-negligible component of r
/// is positive, and ℓ is oriented so that ℓᵀ(P r) ≥ 0.
pub fn eigenvectors_at(
    mp: &MatrixPolynomial,
    pt: &ProjectivePoint,
) -> Result<(Vec<f64>, Vec<f64>, f64)> {
    eigenvectors_at_raw(mp, pt.alpha(), pt.beta())
}

fn eigenvectors_at_raw(mp: &MatrixPolynomial, alpha: f64, beta: f64) -> Result<(Vec<f64>, Vec<f64>, f64)> {
    let n = mp.dim();
    let m = mp.evaluate_at(alpha, beta);
    let svd = m.svd();
    let sigma_min = svd.sigma[n - 1];
    // ‖P(α,β)‖ ≤ ‖A‖ on the unit circle, and ‖P‖ itself collapses at roots
    // of one-dimensional problems, so ‖A‖ is the reference magnitude.
    let tol = EIG_RESIDUAL_TOL * mp.frobenius_norm();
    if sigma_min > tol {
        return Err(Error::NotAnEigenvalue { sigma_min, tol });
    }
    let mut r: Vec<f64> = (0..n).map(|i| svd.v.get(i, n - 1)).collect();
    let mut l: Vec<f64> = (0..n).map(|i| svd.u.get(i, n - 1)).collect();
    let lead = r.iter().find(|c| c.abs() > 1e-12).copied().unwrap_or(r[0]);
    if lead < 0.0 {
        for c in r.iter_mut() {
            *c = -*c;
        }
        for c in l.iter_mut() {
            *c = -*c;
        }
    }
    let mr = m.matvec(&r);
    if vec_dot(&l, &mr) < 0.0 {
        for c in l.iter_mut() {
            *c = -*c;
        }
    }
    Ok((r, l, sigma_min))
}

/// (Σ_{k=0}^{d} α^{2k} β^{2d-2k})^{1/2}, the output-metric prefactor.
fn metric_prefactor(d: usize, alpha: f64, beta: f64) -> f64 {
    let (a2, b2) = (alpha * alpha, beta * beta);
    let mut term = b2.powi(d as i32);
    let mut sum = term;
    for _ in 0..d {
        // multiply by α²/β² stably: recompute when β is tiny
        if b2 > 0.0 {
            term = term * a2 / b2;
        } else {
            term = 0.0;
        }
        sum += term;
    }
    if b2 == 0.0 {
        // only the k = d term survives: α^{2d} = 1 on the unit circle
        sum = a2.powi(d as i32);
    }
    sum.sqrt()
}

/// Local relative condition number at a numerical eigenvalue.
pub fn local_condition(mp: &MatrixPolynomial, pt: &ProjectivePoint) -> Result<PevRecord> {
    local_condition_at(mp, pt.alpha(), pt.beta())
}

/// Same as [`local_condition`] at a raw unit direction (α, β), which need
/// not be the canonical representative; both antipodes give the same value.
pub fn local_condition_at(mp: &MatrixPolynomial, alpha: f64, beta: f64) -> Result<PevRecord> {
    let (r, l, sigma_min) = eigenvectors_at_raw(mp, alpha, beta)?;
    let (pa, pb) = mp.evaluate_partials_at(alpha, beta);
    let par = pa.matvec(&r);
    let pbr = pb.matvec(&r);
    let v: Vec<f64> = par
        .iter()
        .zip(&pbr)
        .map(|(x, y)| beta * x - alpha * y)
        .collect();
    let ltv = vec_dot(&l, &v).abs();
    let norm_a = mp.frobenius_norm();
    // ℓᵀv collapsing to the noise floor of the partials marks a critical
    // point, where the condition number is +∞ by definition.
    let cutoff = CRITICAL_CUTOFF_REL * (pa.frobenius_norm() + pb.frobenius_norm());
    let local_mu = if ltv <= cutoff {
        f64::INFINITY
    } else {
        metric_prefactor(mp.degree(), alpha, beta) * norm_a / ltv
    };
    let m_norm = mp.evaluate_at(alpha, beta).frobenius_norm();
    let residual = if m_norm > 0.0 { sigma_min / m_norm } else { 0.0 };
    Ok(PevRecord {
        point: ProjectivePoint::new(alpha, beta)?,
        right: r,
        left: l,
        sigma_min,
        local_mu,
        residual,
    })
}

/// Solves for all eigenvalues and sums their local condition numbers.
pub fn total_condition(mp: &MatrixPolynomial) -> Result<ConditionReport> {
    match pevsolver::polynomial_eigenvalues(mp)? {
        SolveOutcome::Degenerate => Ok(ConditionReport {
            records: Vec::new(),
            total_mu: f64::INFINITY,
            degenerate: true,
        }),
        SolveOutcome::Roots(root_set) => {
            let RootSet {
                roots, residuals, ..
            } = root_set;
            let mut records = Vec::with_capacity(roots.len());
            let mut total = 0.0f64;
            for (pt, res) in roots.iter().zip(&residuals) {
                let mut rec = local_condition(mp, pt)?;
                rec.residual = *res;
                total += rec.local_mu;
                records.push(rec);
            }
            Ok(ConditionReport {
                records,
                total_mu: total,
                degenerate: false,
            })
        }
    }
}

/// The step the finite-difference oracle uses by default.
pub fn fd_default_step(mp: &MatrixPolynomial) -> f64 {
    1e-6 * mp.frobenius_norm()
}

/// Finite-difference estimate of the local condition number, independent of
/// the closed-form route: for every elementary coefficient direction the
/// root nearest to `pt` is re-solved at ±h and the central angle drift per
/// unit step is assembled into a gradient; the estimate is ‖A‖ times its
/// Euclidean norm.
///
/// Requires a simple, well-separated eigenvalue (nearest other root at least
/// 1e-3 away in angle).
pub fn finite_difference_condition(
    mp: &MatrixPolynomial,
    pt: &ProjectivePoint,
    h: f64,
) -> Result<f64> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::Domain(format!("step must be positive, got {h}")));
    }
    let q0 = pevsolver::det_binary_form(mp)?;
    let base = pevsolver::real_projective_roots(&q0)?;
    if base.roots.is_empty() {
        return Err(Error::Domain("input has no real eigenvalues".into()));
    }
    let mut best = 0usize;
    let mut best_gap = f64::INFINITY;
    for (i, r) in base.roots.iter().enumerate() {
        let gap = r.angle_distance(pt);
        if gap < best_gap {
            best_gap = gap;
            best = i;
        }
    }
    if best_gap > 1e-5 {
        return Err(Error::Domain(format!(
            "point is {best_gap:.3e} rad away from the nearest computed eigenvalue"
        )));
    }
    for (i, r) in base.roots.iter().enumerate() {
        if i != best {
            let gap = base.roots[best].angle_distance(r);
            if gap < ORACLE_SEPARATION {
                return Err(Error::RootTrackingLost { delta: gap });
            }
        }
    }
    let theta_star = base.roots[best].angle();

    let n = mp.dim();
    let d = mp.degree();
    let mut gradient = Vec::with_capacity((d + 1) * n * n);
    let track = |poly: &MatrixPolynomial| -> Result<f64> {
        let q = pevsolver::det_binary_form(poly)?;
        let theta = polish_angle(&q, theta_star);
        let delta = wrap_signed(theta - theta_star);
        if delta.abs() > TRACKING_LIMIT {
            return Err(Error::RootTrackingLost { delta });
        }
        Ok(delta)
    };
    for i in 0..=d {
        for row in 0..n {
            for col in 0..n {
                let mut plus = mp.clone();
                let e = plus.coeff(i).get(row, col);
                plus.coeff_mut(i).set(row, col, e + h);
                let mut minus = mp.clone();
                minus.coeff_mut(i).set(row, col, e - h);
                let dp = track(&plus)?;
                let dm = track(&minus)?;
                gradient.push((dp - dm) / (2.0 * h));
            }
        }
    }
    Ok(mp.frobenius_norm() * vec_norm(&gradient))
}

/// Signed angle difference folded into (-π/2, π/2], the tangent line of the
/// projective circle.
fn wrap_signed(raw: f64) -> f64 {
    let pi = std::f64::consts::PI;
    let mut x = raw.rem_euclid(pi);
    if x > pi / 2.0 {
        x -= pi;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;
    use crate::testutil::{diag_example, random_orthogonal, random_poly};
    use rand::prelude::*;
    use rand_chacha::ChaCha12Rng;

    fn scalar_pencil(a0: f64, a1: f64) -> MatrixPolynomial {
        MatrixPolynomial::new(vec![
            Matrix::from_rows(1, 1, vec![a0]),
            Matrix::from_rows(1, 1, vec![a1]),
        ])
        .unwrap()
    }

    #[test]
    fn diag_example_singular_pair() {
        let mp = diag_example();
        let pt = ProjectivePoint::new(2.0, 1.0).unwrap();
        let (r, l, sigma_min) = eigenvectors_at(&mp, &pt).unwrap();
        assert!(sigma_min < 1e-14);
        assert!((r[0] - 1.0).abs() < 1e-12 && r[1].abs() < 1e-12);
        assert!((l[0].abs() - 1.0).abs() < 1e-12 && l[1].abs() < 1e-12);
    }

    #[test]
    fn scalar_matrix_gives_trivial_pair() {
        let mp = scalar_pencil(1.0, 1.0);
        let pt = ProjectivePoint::new(-1.0, 1.0).unwrap();
        let (r, l, sigma_min) = eigenvectors_at(&mp, &pt).unwrap();
        assert_eq!(r, vec![1.0]);
        assert_eq!(l.len(), 1);
        assert!(sigma_min < 1e-14);
    }

    #[test]
    fn svd_relation_holds_at_solver_roots() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let mp = random_poly(3, 2, &mut rng);
        let SolveOutcome::Roots(rs) = pevsolver::polynomial_eigenvalues(&mp).unwrap() else {
            panic!()
        };
        for pt in &rs.roots {
            let (r, l, sigma_min) = eigenvectors_at(&mp, pt).unwrap();
            let m = mp.evaluate(pt);
            let mr = m.matvec(&r);
            let mtl = m.matvec_transposed(&l);
            assert!((vec_norm(&mr) - sigma_min).abs() <= 1e-12 * m.frobenius_norm().max(1.0));
            assert!((vec_norm(&mtl) - sigma_min).abs() <= 1e-12 * m.frobenius_norm().max(1.0));
        }
    }

    #[test]
    fn not_an_eigenvalue_is_rejected() {
        let mp = diag_example();
        let pt = ProjectivePoint::new(1.0, 1.0).unwrap(); // not a root
        assert!(matches!(
            eigenvectors_at(&mp, &pt),
            Err(Error::NotAnEigenvalue { .. })
        ));
    }

    #[test]
    fn scalar_pencil_mu_is_exactly_one() {
        for (a0, a1) in [(3.0, 4.0), (1.0, 1.0), (-2.5, 0.7), (0.0, 5.0)] {
            let mp = scalar_pencil(a0, a1);
            let report = total_condition(&mp).unwrap();
            assert_eq!(report.records.len(), 1);
            assert!(
                (report.total_mu - 1.0).abs() <= 1e-12,
                "(a0, a1) = ({a0}, {a1}): mu = {}",
                report.total_mu
            );
        }
    }

    #[test]
    fn diag_example_local_values() {
        let mp = diag_example();
        let rec = local_condition(&mp, &ProjectivePoint::new(2.0, 1.0).unwrap()).unwrap();
        assert!((rec.local_mu - 3f64.sqrt()).abs() <= 1e-12, "{}", rec.local_mu);
        let report = total_condition(&mp).unwrap();
        let expected = 3f64.sqrt() + 1.5f64.sqrt();
        assert!((report.total_mu - expected).abs() <= 1e-12, "{}", report.total_mu);
        assert!(!report.degenerate);
    }

    #[test]
    fn mu_is_scale_invariant() {
        let mut rng = ChaCha12Rng::seed_from_u64(13);
        let mp = random_poly(3, 2, &mut rng);
        let SolveOutcome::Roots(rs) = pevsolver::polynomial_eigenvalues(&mp).unwrap() else {
            panic!()
        };
        for pt in &rs.roots {
            let base = local_condition(&mp, pt).unwrap().local_mu;
            for t in [1e-3, 1e3] {
                let scaled = local_condition(&mp.scale_coeffs(t), pt).unwrap().local_mu;
                assert!((scaled - base).abs() <= 1e-12 * base, "t={t}");
            }
        }
    }

    #[test]
    fn mu_is_antipodal_invariant() {
        let mut rng = ChaCha12Rng::seed_from_u64(19);
        for _ in 0..10 {
            let n = rng.random_range(1..=4);
            let d = rng.random_range(1..=3);
            let mp = random_poly(n, d, &mut rng);
            let SolveOutcome::Roots(rs) = pevsolver::polynomial_eigenvalues(&mp).unwrap() else {
                continue;
            };
            for pt in &rs.roots {
                let here = local_condition_at(&mp, pt.alpha(), pt.beta()).unwrap().local_mu;
                let there = local_condition_at(&mp, -pt.alpha(), -pt.beta())
                    .unwrap()
                    .local_mu;
                assert!((here - there).abs() <= 1e-12 * here.max(1.0));
            }
        }
    }

    #[test]
    fn mu_is_orthogonal_invariant() {
        let mut rng = ChaCha12Rng::seed_from_u64(29);
        let n = 3;
        let u = random_orthogonal(n, &mut rng);
        let v = random_orthogonal(n, &mut rng);
        let mp = random_poly(n, 2, &mut rng);
        let rotated = MatrixPolynomial::new(
            mp.coeffs()
                .iter()
                .map(|a| u.matmul(&a.matmul(&v.transpose())))
                .collect(),
        )
        .unwrap();
        let SolveOutcome::Roots(rs) = pevsolver::polynomial_eigenvalues(&mp).unwrap() else {
            panic!()
        };
        for pt in &rs.roots {
            let base = local_condition(&mp, pt).unwrap().local_mu;
            let rot = local_condition(&rotated, pt).unwrap().local_mu;
            assert!((rot - base).abs() <= 1e-10 * base.max(1.0));
        }
    }

    #[test]
    fn defective_pencil_reports_infinite_mu() {
        // P = β·[[0,1],[0,0]] − α·I has a defective double eigenvalue at [0:1]
        let mp = MatrixPolynomial::new(vec![
            Matrix::from_rows(2, 2, vec![0.0, 1.0, 0.0, 0.0]),
            Matrix::from_rows(2, 2, vec![-1.0, 0.0, 0.0, -1.0]),
        ])
        .unwrap();
        let rec = local_condition(&mp, &ProjectivePoint::new(0.0, 1.0).unwrap()).unwrap();
        assert!(rec.local_mu.is_infinite());
        let report = total_condition(&mp).unwrap();
        assert!(report.total_mu.is_infinite());
        assert!(!report.degenerate);
    }

    #[test]
    fn degenerate_input_reports_infinite_total() {
        let a = Matrix::from_rows(2, 2, vec![1.0, 0.0, 0.0, 0.0]);
        let mp = MatrixPolynomial::new(vec![a.clone(), a]).unwrap();
        let report = total_condition(&mp).unwrap();
        assert!(report.degenerate);
        assert!(report.total_mu.is_infinite());
        assert!(report.records.is_empty());
    }

    #[test]
    fn oracle_matches_on_scalar_pencil() {
        let mp = scalar_pencil(3.0, 4.0);
        let report = total_condition(&mp).unwrap();
        let pt = report.records[0].point;
        let est = finite_difference_condition(&mp, &pt, 1e-6).unwrap();
        assert!((est - 1.0).abs() <= 1e-6, "estimate {est}");
    }

    #[test]
    fn oracle_matches_on_diag_example() {
        let mp = diag_example();
        let pt = ProjectivePoint::new(2.0, 1.0).unwrap();
        let est = finite_difference_condition(&mp, &pt, fd_default_step(&mp)).unwrap();
        assert!((est - 3f64.sqrt()).abs() <= 1e-5, "estimate {est}");
    }

    #[test]
    fn oracle_matches_closed_form_on_random_instances() {
        let mut rng = ChaCha12Rng::seed_from_u64(41);
        let mut checked = 0;
        while checked < 20 {
            let n = rng.random_range(1..=4);
            let d = rng.random_range(1..=3);
            let mp = random_poly(n, d, &mut rng);
            let SolveOutcome::Roots(rs) = pevsolver::polynomial_eigenvalues(&mp).unwrap() else {
                continue;
            };
            let separated = rs.roots.iter().all(|a| {
                rs.roots
                    .iter()
                    .filter(|b| !std::ptr::eq(a, *b))
                    .all(|b| a.angle_distance(b) >= ORACLE_SEPARATION)
            });
            if !separated || rs.roots.is_empty() {
                continue;
            }
            for pt in &rs.roots {
                let mu = local_condition(&mp, pt).unwrap().local_mu;
                if !mu.is_finite() {
                    continue;
                }
                let est = finite_difference_condition(&mp, pt, fd_default_step(&mp)).unwrap();
                assert!(
                    (est - mu).abs() <= 1e-4 * mu,
                    "n={n} d={d}: closed form {mu}, oracle {est}"
                );
            }
            checked += 1;
        }
    }

    #[test]
    fn oracle_rejects_clustered_roots() {
        // roots at t = 1 and t = 1 + 5e-4 are closer than the separation bound
        let eps = 5e-4;
        let q_roots = [1.0, 1.0 + eps];
        // build diag pencil with those eigenvalues: A₀ = diag(roots), A₁ = -I
        let mp = MatrixPolynomial::new(vec![
            Matrix::from_rows(2, 2, vec![q_roots[0], 0.0, 0.0, q_roots[1]]),
            Matrix::from_rows(2, 2, vec![-1.0, 0.0, 0.0, -1.0]),
        ])
        .unwrap();
        let pt = ProjectivePoint::new(1.0, 1.0).unwrap();
        assert!(matches!(
            finite_difference_condition(&mp, &pt, 1e-8),
            Err(Error::RootTrackingLost { .. })
        ));
    }
}
