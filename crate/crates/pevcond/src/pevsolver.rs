//! Real polynomial eigenvalues on the projective line: extract the degree-nd
//! determinant binary form by evaluation–interpolation at Chebyshev nodes,
//! isolate its real roots with certified Sturm counts, polish them by Newton
//! iteration on the angle parametrization, and detect identically vanishing
//! forms.

use crate::error::{Error, Result};
use crate::matpoly::{MatrixPolynomial, ProjectivePoint};

/// Largest determinant-form degree the Chebyshev interpolation budget allows.
pub const MAX_FORM_DEGREE: usize = 64;

/// Relative threshold below which the whole form counts as identically zero.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// Relative threshold for the top coefficient to declare a root at infinity.
pub const INFINITY_TOL: f64 = 1e-10;

/// Relative coefficient pruning threshold inside Sturm chains.
pub const STURM_PRUNE_TOL: f64 = 1e-14;

const BISECTION_WIDTH: f64 = 1e-10;
const POLISH_RESIDUAL_REL: f64 = 1e-13;
const DEDUP_ANGLE: f64 = 1e-9;
const CLUSTER_WARN_ANGLE: f64 = 1e-7;

/// Homogeneous bivariate polynomial q(α, β) = Σ c_i α^i β^{deg-i}.
#[derive(Debug, Clone)]
pub struct BinaryForm {
    deg: usize,
    coeffs: Vec<f64>,
    scale: f64,
    input_scale: f64,
}

impl BinaryForm {
    /// Builds a form from monomial coefficients c₀..c_deg. The degeneracy
    /// reference scale defaults to the coefficient scale itself, so a raw
    /// form is degenerate only when every coefficient vanishes.
    pub fn from_coeffs(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Domain("binary form needs at least one coefficient".into()));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::Domain("binary form coefficients must be finite".into()));
        }
        let scale = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        Ok(BinaryForm {
            deg: coeffs.len() - 1,
            coeffs,
            scale,
            input_scale: scale,
        })
    }

    fn with_input_scale(coeffs: Vec<f64>, input_scale: f64) -> Result<Self> {
        let mut form = BinaryForm::from_coeffs(coeffs)?;
        form.input_scale = input_scale;
        Ok(form)
    }

    pub fn degree(&self) -> usize {
        self.deg
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// max |c_i| recorded at construction.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// True when the form vanishes identically at working precision,
    /// relative to the magnitude the construction could have produced.
    pub fn is_degenerate(&self) -> bool {
        self.scale <= DEGENERACY_TOL * self.input_scale
    }

    /// Evaluates at a raw direction, dividing through by the dominant
    /// variable so the Horner argument stays inside the unit interval.
    pub fn eval_at(&self, alpha: f64, beta: f64) -> f64 {
        if alpha.abs() <= beta.abs() {
            let t = if beta == 0.0 { 0.0 } else { alpha / beta };
            horner(&self.coeffs, t) * beta.powi(self.deg as i32)
        } else {
            let s = beta / alpha;
            let mut acc = 0.0;
            for &c in &self.coeffs {
                acc = acc * s + c;
            }
            acc * alpha.powi(self.deg as i32)
        }
    }

    pub fn eval_angle(&self, theta: f64) -> f64 {
        self.eval_at(theta.cos(), theta.sin())
    }

    /// Monomial coefficients of (∂q/∂α, ∂q/∂β), each a form of degree-1.
    fn partial_forms(&self) -> (Vec<f64>, Vec<f64>) {
        let d = self.deg;
        let pa: Vec<f64> = (1..=d).map(|i| i as f64 * self.coeffs[i]).collect();
        let pb: Vec<f64> = (0..d).map(|i| (d - i) as f64 * self.coeffs[i]).collect();
        (pa, pb)
    }
}

/// Non-fatal diagnostics attached to a root set.
#[derive(Debug, Clone, PartialEq)]
pub enum RootWarning {
    /// Two isolated roots closer than the cluster threshold in angle.
    ClosePair { i: usize, j: usize, gap: f64 },
    /// A root of even multiplicity located through the derivative.
    MultipleRoot { i: usize },
}

/// The real projective roots of a binary form.
#[derive(Debug, Clone)]
pub struct RootSet {
    pub roots: Vec<ProjectivePoint>,
    /// Distinct-root count certified by the Sturm chain plus the infinity
    /// test; absent when the chain was inconclusive and the solver fell
    /// back to sign-change subdivision.
    pub certified_count: Option<usize>,
    /// |q(root)| / scale for each returned root.
    pub residuals: Vec<f64>,
    pub warnings: Vec<RootWarning>,
}

/// Outcome of a full eigenvalue solve.
#[derive(Debug, Clone)]
pub enum SolveOutcome {
    Roots(RootSet),
    /// The determinant form vanishes identically: every point of the
    /// projective line is an eigenvalue.
    Degenerate,
}

/// Coefficients of q(t, 1) = det P(A, t, 1), recovered by sampling the
/// determinant at nd+1 Chebyshev nodes of the first kind (radius 1 + 1/(nd))
/// and interpolating. The two endpoint coefficients are then replaced by the
/// exactly computable values det(A₀) and det(A_d).
pub fn det_binary_form(mp: &MatrixPolynomial) -> Result<BinaryForm> {
    let n = mp.dim();
    let nd = n * mp.degree();
    if nd > MAX_FORM_DEGREE {
        return Err(Error::DegreeOverflow {
            degree: nd,
            max: MAX_FORM_DEGREE,
        });
    }
    let points = nd + 1;
    let radius = 1.0 + 1.0 / nd as f64;

    let thetas: Vec<f64> = (0..points)
        .map(|j| std::f64::consts::PI * (2 * j + 1) as f64 / (2 * points) as f64)
        .collect();
    let values: Vec<f64> = thetas
        .iter()
        .map(|&th| mp.evaluate_at(radius * th.cos(), 1.0).det())
        .collect();

    // Discrete Chebyshev transform: exact at first-kind nodes.
    let mut cheb = vec![0.0f64; points];
    for (k, ck) in cheb.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (j, &fj) in values.iter().enumerate() {
            acc += fj * (k as f64 * thetas[j]).cos();
        }
        *ck = 2.0 * acc / points as f64;
    }
    cheb[0] *= 0.5;

    // Convert Σ cheb_k T_k(u) to monomials in u via the recurrence
    // T_{k+1} = 2u·T_k − T_{k-1}, then substitute u = t / radius.
    let mut coeffs = vec![0.0f64; points];
    let mut t_prev = vec![0.0f64; points];
    let mut t_cur = vec![0.0f64; points];
    t_prev[0] = 1.0; // T_0
    coeffs[0] += cheb[0];
    if points > 1 {
        t_cur[1] = 1.0; // T_1
        for (i, c) in t_cur.iter().enumerate() {
            coeffs[i] += cheb[1] * c;
        }
    }
    for k in 2..points {
        let mut t_next = vec![0.0f64; points];
        for i in 0..k {
            t_next[i + 1] += 2.0 * t_cur[i];
        }
        for i in 0..points {
            t_next[i] -= t_prev[i];
        }
        for (i, c) in t_next.iter().enumerate() {
            coeffs[i] += cheb[k] * c;
        }
        t_prev = t_cur;
        t_cur = t_next;
    }
    let mut r_pow = 1.0;
    for c in coeffs.iter_mut() {
        *c /= r_pow;
        r_pow *= radius;
    }

    // Exact endpoints: q(0,1) = det(A₀), q(1,0) = det(A_d).
    coeffs[0] = mp.coeff(0).det();
    coeffs[nd] = mp.coeff(mp.degree()).det();

    // det is n-homogeneous in the coefficients, so ‖A‖ⁿ is the reference
    // magnitude against which an identically zero form is judged.
    let input_scale = mp.frobenius_norm().powi(n as i32);
    BinaryForm::with_input_scale(coeffs, input_scale)
}

/// All real projective roots of a non-degenerate binary form.
pub fn real_projective_roots(q: &BinaryForm) -> Result<RootSet> {
    if q.is_degenerate() {
        return Err(Error::DegenerateForm);
    }
    let scale = q.scale();
    let coeffs = q.coeffs();
    let deg = q.degree();

    // Effective degree for the finite-root polynomial: leading coefficients
    // at the infinity threshold correspond to roots indistinguishable from
    // [1:0] and are handled by the infinity test instead.
    let mut eff = deg;
    while eff > 0 && coeffs[eff].abs() <= INFINITY_TOL * scale {
        eff -= 1;
    }

    let mut candidates: Vec<f64> = Vec::new(); // angles in (0, π)
    let mut warnings = Vec::new();
    let mut certified_finite: Option<usize> = Some(0);

    if eff >= 1 {
        let p = &coeffs[..=eff];
        let bound = cauchy_bound(p);
        match SturmChain::build(p) {
            Ok(chain) => {
                let total = chain.count(-bound, bound);
                let mut intervals = Vec::new();
                chain.isolate(-bound, bound, total, 0, &mut intervals);
                certified_finite = Some(total);
                for (lo, hi) in intervals {
                    let (t, even) = refine_root(p, lo, hi);
                    let theta0 = (1.0f64).atan2(t);
                    let polished = polish_angle(q, theta0);
                    if even {
                        warnings.push(RootWarning::MultipleRoot { i: candidates.len() });
                    }
                    candidates.push(polished);
                }
            }
            Err(Error::InconclusiveChain) => {
                certified_finite = None;
                candidates = fallback_roots(q, p, &mut warnings);
            }
            Err(e) => return Err(e),
        }
    }

    // Root at infinity: present exactly when the formal top coefficient
    // (det of the leading matrix) vanishes.
    let at_infinity = coeffs[deg].abs() <= INFINITY_TOL * scale;

    // Canonicalize, deduplicate, and attach residuals.
    let mut roots: Vec<ProjectivePoint> = Vec::new();
    for theta in candidates {
        let pt = ProjectivePoint::from_angle(theta);
        if !roots.iter().any(|r| r.approx_eq(&pt, DEDUP_ANGLE)) {
            roots.push(pt);
        }
    }
    roots.sort_by(|a, b| a.angle().partial_cmp(&b.angle()).unwrap());
    if at_infinity {
        let inf = ProjectivePoint::infinity();
        if !roots.iter().any(|r| r.approx_eq(&inf, DEDUP_ANGLE)) {
            roots.insert(0, inf);
        }
    }

    let residuals: Vec<f64> = roots
        .iter()
        .map(|r| q.eval_at(r.alpha(), r.beta()).abs() / scale)
        .collect();

    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            let gap = roots[i].angle_distance(&roots[j]);
            if gap <= CLUSTER_WARN_ANGLE {
                warnings.push(RootWarning::ClosePair { i, j, gap });
            }
        }
    }

    let certified_count = certified_finite.map(|c| c + usize::from(at_infinity));
    Ok(RootSet {
        roots,
        certified_count,
        residuals,
        warnings,
    })
}

/// Determinant-form extraction followed by root isolation; an identically
/// vanishing determinant yields the distinguished degenerate outcome.
pub fn polynomial_eigenvalues(mp: &MatrixPolynomial) -> Result<SolveOutcome> {
    let q = det_binary_form(mp)?;
    if q.is_degenerate() {
        return Ok(SolveOutcome::Degenerate);
    }
    Ok(SolveOutcome::Roots(real_projective_roots(&q)?))
}

/// Exact number of distinct real roots of p(t) = q(t, 1) in (t_lo, t_hi],
/// by Sturm sign-variation difference with coefficient pruning at
/// [`STURM_PRUNE_TOL`] relative to the form scale.
pub fn sturm_root_count(q: &BinaryForm, t_lo: f64, t_hi: f64) -> Result<usize> {
    if q.is_degenerate() {
        return Err(Error::DegenerateForm);
    }
    if !(t_lo < t_hi) {
        return Err(Error::Domain(format!(
            "need t_lo < t_hi, got ({t_lo}, {t_hi})"
        )));
    }
    let chain = SturmChain::build(q.coeffs())?;
    Ok(chain.count(t_lo, t_hi))
}

fn horner(coeffs: &[f64], t: f64) -> f64 {
    let mut acc = 0.0;
    for &c in coeffs.iter().rev() {
        acc = acc * t + c;
    }
    acc
}

/// All real roots of p lie strictly inside (−b, b).
fn cauchy_bound(p: &[f64]) -> f64 {
    let deg = p.len() - 1;
    let lead = p[deg].abs();
    let max_rest = p[..deg].iter().fold(0.0f64, |m, c| m.max(c.abs()));
    1.0 + max_rest / lead
}

/// Sturm chain with every element normalized to unit max-coefficient and
/// pruned at [`STURM_PRUNE_TOL`]. An exactly zero remainder terminates the
/// chain at the gcd (so distinct roots are still counted correctly for
/// polynomials with multiple roots); a remainder that collapses to noise
/// level without vanishing is reported as inconclusive.
struct SturmChain {
    polys: Vec<Vec<f64>>,
}

impl SturmChain {
    fn build(p: &[f64]) -> Result<Self> {
        let p0 = normalize_pruned(p.to_vec());
        if p0.len() <= 1 {
            return Ok(SturmChain { polys: vec![p0] });
        }
        let p1 = normalize_pruned(derivative(&p0));
        let mut polys = vec![p0, p1];
        loop {
            let last = &polys[polys.len() - 1];
            if last.len() <= 1 {
                break;
            }
            let prev = &polys[polys.len() - 2];
            let mut rem = poly_rem(prev, last);
            for c in rem.iter_mut() {
                *c = -*c;
            }
            let max_r = rem.iter().fold(0.0f64, |m, c| m.max(c.abs()));
            if max_r == 0.0 {
                break; // exact common factor: chain ends at the gcd
            }
            if max_r <= STURM_PRUNE_TOL {
                return Err(Error::InconclusiveChain);
            }
            polys.push(normalize_pruned(rem));
        }
        Ok(SturmChain { polys })
    }

    fn variations(&self, t: f64) -> usize {
        let mut count = 0;
        let mut last_sign = 0i8;
        for p in &self.polys {
            let v = horner(p, t);
            let sign = if v > 0.0 {
                1i8
            } else if v < 0.0 {
                -1i8
            } else {
                0i8
            };
            if sign != 0 {
                if last_sign != 0 && sign != last_sign {
                    count += 1;
                }
                last_sign = sign;
            }
        }
        count
    }

    /// Distinct roots in (lo, hi]; endpoints landing on a root are nudged
    /// upward so the half-open semantics survive.
    fn count(&self, lo: f64, hi: f64) -> usize {
        let lo = self.nudge(lo);
        let hi = self.nudge(hi);
        self.variations(lo).saturating_sub(self.variations(hi))
    }

    fn nudge(&self, mut x: f64) -> f64 {
        let p = &self.polys[0];
        for _ in 0..16 {
            if horner(p, x) != 0.0 {
                return x;
            }
            x += 1e-12 * x.abs().max(1.0);
        }
        x
    }

    fn isolate(&self, lo: f64, hi: f64, count: usize, depth: usize, out: &mut Vec<(f64, f64)>) {
        if count == 0 {
            return;
        }
        let mid = 0.5 * (lo + hi);
        if count == 1 || depth > 200 || mid <= lo || mid >= hi {
            // either isolated, or the interval can no longer be split in f64
            for _ in 0..count {
                out.push((lo, hi));
            }
            return;
        }
        let left = self.count(lo, mid);
        self.isolate(lo, mid, left, depth + 1, out);
        self.isolate(mid, hi, count - left, depth + 1, out);
    }
}

fn derivative(p: &[f64]) -> Vec<f64> {
    if p.len() <= 1 {
        return vec![0.0];
    }
    (1..p.len()).map(|i| i as f64 * p[i]).collect()
}

/// Zeroes coefficients below the pruning threshold, trims the degree
/// accordingly, and rescales to unit max-coefficient.
fn normalize_pruned(mut p: Vec<f64>) -> Vec<f64> {
    let m = p.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if m == 0.0 {
        return vec![0.0];
    }
    for c in p.iter_mut() {
        if c.abs() <= STURM_PRUNE_TOL * m {
            *c = 0.0;
        } else {
            *c /= m;
        }
    }
    while p.len() > 1 && *p.last().unwrap() == 0.0 {
        p.pop();
    }
    p
}

/// Remainder of a mod b; b must have nonzero leading coefficient.
fn poly_rem(a: &[f64], b: &[f64]) -> Vec<f64> {
    let db = b.len() - 1;
    debug_assert!(db >= 1);
    let lead = b[db];
    let mut r = a.to_vec();
    for i in (db..r.len()).rev() {
        let f = r[i] / lead;
        if f == 0.0 {
            continue;
        }
        r[i] = 0.0;
        for j in 0..db {
            r[i - db + j] -= f * b[j];
        }
    }
    r.truncate(db);
    if r.is_empty() {
        r.push(0.0);
    }
    r
}

/// Bisection inside an isolating interval, to [`BISECTION_WIDTH`] or f64
/// exhaustion. Returns the root estimate and whether the root has even
/// multiplicity (no sign change, located through the derivative).
fn refine_root(p: &[f64], mut lo: f64, mut hi: f64) -> (f64, bool) {
    let f_lo = horner(p, lo);
    let f_hi = horner(p, hi);
    if f_lo == 0.0 {
        return (lo, false);
    }
    if f_hi == 0.0 {
        return (hi, false);
    }
    if f_lo.signum() != f_hi.signum() {
        let mut s_lo = f_lo.signum();
        while hi - lo > BISECTION_WIDTH {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let f_mid = horner(p, mid);
            if f_mid == 0.0 {
                return (mid, false);
            }
            if f_mid.signum() == s_lo {
                lo = mid;
                s_lo = f_mid.signum();
            } else {
                hi = mid;
            }
        }
        return (0.5 * (lo + hi), false);
    }
    // Even multiplicity: the extremum touching zero is a simple-ish root of p'.
    let dp = derivative(p);
    let g_lo = horner(&dp, lo);
    let g_hi = horner(&dp, hi);
    if g_lo.signum() != g_hi.signum() && g_lo != 0.0 && g_hi != 0.0 {
        let mut s_lo = g_lo.signum();
        while hi - lo > BISECTION_WIDTH {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let g_mid = horner(&dp, mid);
            if g_mid == 0.0 {
                return (mid, true);
            }
            if g_mid.signum() == s_lo {
                lo = mid;
                s_lo = g_mid.signum();
            } else {
                hi = mid;
            }
        }
    }
    (0.5 * (lo + hi), true)
}

/// Newton iteration on θ ↦ q(cos θ, sin θ) starting from `theta0`. The step
/// is capped and the total drift bounded so a near-cluster start cannot
/// escape its isolating basin; on stall the best-seen angle is returned.
pub(crate) fn polish_angle(q: &BinaryForm, theta0: f64) -> f64 {
    let (pa, pb) = q.partial_forms();
    let target = 0.1 * POLISH_RESIDUAL_REL * q.scale();
    let mut theta = theta0;
    let mut best = (q.eval_angle(theta).abs(), theta);
    for _ in 0..100 {
        let (s, c) = theta.sin_cos();
        let g = q.eval_at(c, s);
        if g.abs() < best.0 {
            best = (g.abs(), theta);
        }
        if g.abs() <= target {
            return theta;
        }
        let da = eval_form(&pa, c, s);
        let db = eval_form(&pb, c, s);
        let dg = -s * da + c * db;
        if dg == 0.0 {
            break;
        }
        let mut step = g / dg;
        if step.abs() > 1e-2 {
            step = step.signum() * 1e-2;
        }
        theta -= step;
        if (theta - theta0).abs() > 0.05 {
            return best.1;
        }
        if step.abs() < 1e-17 {
            break;
        }
    }
    best.1
}

fn eval_form(coeffs: &[f64], alpha: f64, beta: f64) -> f64 {
    let deg = coeffs.len() - 1;
    if alpha.abs() <= beta.abs() {
        let t = if beta == 0.0 { 0.0 } else { alpha / beta };
        horner(coeffs, t) * beta.powi(deg as i32)
    } else {
        let s = beta / alpha;
        let mut acc = 0.0;
        for &c in coeffs {
            acc = acc * s + c;
        }
        acc * alpha.powi(deg as i32)
    }
}

/// Uncertified fallback when the Sturm chain collapses: scan the angle
/// parametrization on a fine grid, bisect sign changes of q, and pick up
/// even-multiplicity roots as extrema of q whose value dips inside the
/// polish tolerance band.
fn fallback_roots(q: &BinaryForm, p_eff: &[f64], warnings: &mut Vec<RootWarning>) -> Vec<f64> {
    let deg = p_eff.len() - 1;
    let samples = 32 * (deg + 1);
    let mut thetas = Vec::new();
    let grid: Vec<f64> = (0..=samples)
        .map(|i| 1e-9 + (std::f64::consts::PI - 2e-9) * i as f64 / samples as f64)
        .collect();
    let values: Vec<f64> = grid.iter().map(|&t| q.eval_angle(t)).collect();
    for w in 0..samples {
        let (a, b) = (values[w], values[w + 1]);
        if a == 0.0 {
            thetas.push(grid[w]);
            continue;
        }
        if a.signum() != b.signum() {
            // bisect on the angle
            let (mut lo, mut hi, mut sa) = (grid[w], grid[w + 1], a.signum());
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                let v = q.eval_angle(mid);
                if v == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if v.signum() == sa {
                    lo = mid;
                    sa = v.signum();
                } else {
                    hi = mid;
                }
            }
            thetas.push(polish_angle(q, 0.5 * (lo + hi)));
        }
    }
    // extrema that touch zero within tolerance
    let (pa, pb) = q.partial_forms();
    let dval = |t: f64| {
        let (s, c) = t.sin_cos();
        -s * eval_form(&pa, c, s) + c * eval_form(&pb, c, s)
    };
    let dvals: Vec<f64> = grid.iter().map(|&t| dval(t)).collect();
    for w in 0..samples {
        if dvals[w] == 0.0 || dvals[w].signum() == dvals[w + 1].signum() {
            continue;
        }
        let (mut lo, mut hi, mut sa) = (grid[w], grid[w + 1], dvals[w].signum());
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            let v = dval(mid);
            if v == 0.0 {
                lo = mid;
                hi = mid;
                break;
            }
            if v.signum() == sa {
                lo = mid;
                sa = v.signum();
            } else {
                hi = mid;
            }
        }
        let ext = 0.5 * (lo + hi);
        if q.eval_angle(ext).abs() <= POLISH_RESIDUAL_REL * q.scale()
            && !thetas
                .iter()
                .any(|&t| rp1_angle_gap(t, ext) <= DEDUP_ANGLE)
        {
            warnings.push(RootWarning::MultipleRoot { i: thetas.len() });
            thetas.push(ext);
        }
    }
    thetas
}

/// Distance of two angles as points of the projective line.
pub(crate) fn rp1_angle_gap(a: f64, b: f64) -> f64 {
    let pi = std::f64::consts::PI;
    let mut d = (a - b).rem_euclid(pi);
    if d > pi / 2.0 {
        d = pi - d;
    }
    d
}
