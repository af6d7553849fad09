//! Seeded Monte Carlo estimation of the expected total condition number
//! over an ensemble, with robust estimators for its heavy-tailed samples
//! and closed-form/bound columns for comparison.
//!
//! Trials are embarrassingly parallel: trial t draws from stream t of the
//! run seed, so reports are bit-identical for any worker count.

use crate::closedform::{self, ClosedFormValue};
use crate::conditioning;
use crate::ensembles::{sample, EnsembleKind, EnsembleSpec, RngKey};
use crate::error::{Error, Result};
use crate::jsonfmt::{fmt_f64, fmt_opt_f64};
use crate::pevsolver::MAX_FORM_DEGREE;
use rayon::prelude::*;
use serde::Serialize;
use std::time::Instant;

/// Configuration of one Monte Carlo run.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub spec: EnsembleSpec,
    pub trials: usize,
    pub seed: u64,
    /// Median-of-means block count; `None` picks ⌈√trials⌉.
    pub mom_blocks: Option<usize>,
    /// Symmetric trimming fraction for the trimmed mean, in [0, 0.05].
    pub trim: f64,
    /// Worker threads; `None` uses the default pool. Results do not depend
    /// on this value.
    pub workers: Option<usize>,
}

impl ExperimentConfig {
    pub fn new(spec: EnsembleSpec, trials: usize, seed: u64) -> Self {
        ExperimentConfig {
            spec,
            trials,
            seed,
            mom_blocks: None,
            trim: 0.0,
            workers: None,
        }
    }

    pub fn resolved_mom_blocks(&self) -> usize {
        self.mom_blocks
            .unwrap_or_else(|| (self.trials as f64).sqrt().ceil() as usize)
            .max(1)
    }

    fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(Error::Config("need at least one trial".into()));
        }
        let blocks = self.resolved_mom_blocks();
        if blocks > self.trials {
            return Err(Error::Config(format!(
                "mom_blocks {blocks} exceeds trials {}",
                self.trials
            )));
        }
        if !(0.0..=0.05).contains(&self.trim) {
            return Err(Error::Config(format!(
                "trim must lie in [0, 0.05], got {}",
                self.trim
            )));
        }
        let nd = self.spec.dim() * self.spec.degree();
        if nd > MAX_FORM_DEGREE {
            return Err(Error::Config(format!(
                "n·d = {nd} exceeds the solver budget {MAX_FORM_DEGREE}"
            )));
        }
        Ok(())
    }
}

/// Deterministic estimator bundle over one sample vector.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Estimators {
    pub mean: f64,
    pub stderr: f64,
    pub ci95: (f64, f64),
    pub mom: f64,
    /// Median absolute deviation of the block means around the median of
    /// means — the honest spread notion for the robust estimator.
    pub mom_mad: f64,
    pub trimmed: f64,
}

/// Mean, normal-approximation CI, median-of-means over contiguous
/// index-stable blocks, and symmetric trimmed mean.
pub fn estimate(samples: &[f64], mom_blocks: usize, trim: f64) -> Result<Estimators> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = samples.len();
    let mean = samples.iter().sum::<f64>() / n as f64;
    let stderr = if n > 1 {
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        (var / n as f64).sqrt()
    } else {
        0.0
    };
    let ci95 = (mean - 1.96 * stderr, mean + 1.96 * stderr);

    let blocks = mom_blocks.clamp(1, n);
    let base = n / blocks;
    let extra = n % blocks; // first `extra` blocks take one more sample
    let mut block_means = Vec::with_capacity(blocks);
    let mut start = 0;
    for b in 0..blocks {
        let len = base + usize::from(b < extra);
        let chunk = &samples[start..start + len];
        block_means.push(chunk.iter().sum::<f64>() / len as f64);
        start += len;
    }
    let mom = median(&mut block_means.clone());
    let mut devs: Vec<f64> = block_means.iter().map(|m| (m - mom).abs()).collect();
    let mom_mad = median(&mut devs);

    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut cut = (trim * n as f64 + 1e-9).floor() as usize;
    if 2 * cut >= n {
        cut = (n - 1) / 2;
    }
    let kept = &sorted[cut..n - cut];
    let trimmed = kept.iter().sum::<f64>() / kept.len() as f64;

    Ok(Estimators {
        mean,
        stderr,
        ci95,
        mom,
        mom_mad,
        trimmed,
    })
}

fn median(xs: &mut [f64]) -> f64 {
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

/// Echo of the run parameters inside a report.
#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    pub ensemble: String,
    pub n: usize,
    pub d: usize,
    pub k: usize,
    pub trials: usize,
    pub seed: u64,
    pub mom_blocks: usize,
    pub trim: f64,
    pub workers: Option<usize>,
}

/// Result of one Monte Carlo run.
#[derive(Debug, Clone, Serialize)]
pub struct McReport {
    pub config: ConfigEcho,
    pub n_finite: usize,
    pub n_infinite: usize,
    pub n_failed: usize,
    pub invalid_count: usize,
    pub mean: f64,
    pub stderr: f64,
    pub ci95: (f64, f64),
    pub mom: f64,
    pub mom_mad: f64,
    pub trimmed: f64,
    pub closed_form: Option<ClosedFormValue>,
    pub asymptotic: Option<f64>,
    pub bound: ClosedFormValue,
    pub elapsed_s: f64,
    pub per_trial_path: Option<String>,
}

/// Total condition number of trial t, or +∞ for degenerate/critical inputs,
/// or NaN when the solve failed outright.
fn run_trial(spec: &EnsembleSpec, seed: u64, t: usize) -> f64 {
    match sample(spec, RngKey::new(seed, t as u64))
        .and_then(|mp| conditioning::total_condition(&mp))
    {
        Ok(report) => report.total_mu,
        Err(_) => f64::NAN,
    }
}

/// Runs the Monte Carlo experiment; returns the report and the raw
/// per-trial values in trial order (+∞ and NaN mark invalid trials).
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<(McReport, Vec<f64>)> {
    cfg.validate()?;
    let start = Instant::now();
    let spec = &cfg.spec;
    let seed = cfg.seed;

    let compute = || -> Vec<f64> {
        (0..cfg.trials)
            .into_par_iter()
            .map(|t| run_trial(spec, seed, t))
            .collect()
    };
    let samples: Vec<f64> = match cfg.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(compute),
        None => compute(),
    };

    let finite: Vec<f64> = samples.iter().copied().filter(|x| x.is_finite()).collect();
    let n_infinite = samples.iter().filter(|x| x.is_infinite()).count();
    let n_failed = samples.iter().filter(|x| x.is_nan()).count();
    if finite.is_empty() {
        return Err(Error::EmptyInput);
    }
    let est = estimate(&finite, cfg.resolved_mom_blocks(), cfg.trim)?;

    let n = spec.dim() as u32;
    let d = spec.degree() as u32;
    let k = spec.subspace_dim() as u32;
    let (closed_form, asymptotic) = match spec.kind() {
        EnsembleKind::FullGaussian => (
            Some(closedform::expected_mu_full_gaussian(n, d)),
            Some(closedform::asymptotic_full_gaussian(n, d).value),
        ),
        EnsembleKind::Goe => (
            Some(closedform::expected_mu_goe(n, d)),
            Some(closedform::asymptotic_goe(n, d).value),
        ),
        EnsembleKind::Subspace => (None, None),
    };
    let bound = closedform::upper_bound(n, k, d);

    let report = McReport {
        config: ConfigEcho {
            ensemble: spec.kind().as_str().to_string(),
            n: spec.dim(),
            d: spec.degree(),
            k: spec.subspace_dim(),
            trials: cfg.trials,
            seed: cfg.seed,
            mom_blocks: cfg.resolved_mom_blocks(),
            trim: cfg.trim,
            workers: cfg.workers,
        },
        n_finite: finite.len(),
        n_infinite,
        n_failed,
        invalid_count: n_infinite + n_failed,
        mean: est.mean,
        stderr: est.stderr,
        ci95: est.ci95,
        mom: est.mom,
        mom_mad: est.mom_mad,
        trimmed: est.trimmed,
        closed_form,
        asymptotic,
        bound,
        elapsed_s: start.elapsed().as_secs_f64(),
        per_trial_path: None,
    };
    Ok((report, samples))
}

/// Grid of Monte Carlo cells over ensembles × n × d.
#[derive(Debug, Clone, serde::Deserialize)]
pub struct SweepGrid {
    pub ensembles: Vec<EnsembleKind>,
    pub n: Vec<usize>,
    pub d: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    #[serde(default)]
    pub mom_blocks: Option<usize>,
    #[serde(default)]
    pub trim: f64,
    #[serde(default)]
    pub workers: Option<usize>,
}

/// One sweep cell, distilled to the CSV columns.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub ensemble: String,
    pub n: usize,
    pub d: usize,
    pub trials: usize,
    pub seed: u64,
    pub mean: Option<f64>,
    pub stderr: Option<f64>,
    pub mom: Option<f64>,
    pub trimmed: Option<f64>,
    pub closed_form: Option<f64>,
    pub asymptotic: Option<f64>,
    pub bound: Option<f64>,
    pub invalid_count: Option<usize>,
    pub elapsed_s: Option<f64>,
    pub error: Option<String>,
}

/// Runs every grid cell, one row per cell; failures are recorded in the row
/// and the sweep continues. Each cell derives its own seed from the grid
/// seed and the cell index so cells do not share sample streams.
pub fn sweep(grid: &SweepGrid) -> Result<Vec<SweepRow>> {
    if grid.ensembles.iter().any(|k| *k == EnsembleKind::Subspace) {
        return Err(Error::Config(
            "sweep supports the gaussian and goe ensembles (subspace needs an explicit basis)"
                .into(),
        ));
    }
    let mut rows = Vec::new();
    let mut cell_idx = 0u64;
    for kind in &grid.ensembles {
        for &n in &grid.n {
            for &d in &grid.d {
                let seed = grid.seed.wrapping_add(cell_idx.wrapping_mul(0x9E37_79B9_7F4A_7C15));
                cell_idx += 1;
                let spec = match kind {
                    EnsembleKind::FullGaussian => EnsembleSpec::gaussian(n, d),
                    EnsembleKind::Goe => EnsembleSpec::goe(n, d),
                    EnsembleKind::Subspace => unreachable!(),
                };
                let outcome = spec.and_then(|spec| {
                    let cfg = ExperimentConfig {
                        spec,
                        trials: grid.trials,
                        seed,
                        mom_blocks: grid.mom_blocks,
                        trim: grid.trim,
                        workers: grid.workers,
                    };
                    run_experiment(&cfg)
                });
                let row = match outcome {
                    Ok((r, _)) => SweepRow {
                        ensemble: r.config.ensemble.clone(),
                        n,
                        d,
                        trials: r.config.trials,
                        seed,
                        mean: Some(r.mean),
                        stderr: Some(r.stderr),
                        mom: Some(r.mom),
                        trimmed: Some(r.trimmed),
                        closed_form: r.closed_form.map(|c| c.value),
                        asymptotic: r.asymptotic,
                        bound: Some(r.bound.value),
                        invalid_count: Some(r.invalid_count),
                        elapsed_s: Some(r.elapsed_s),
                        error: None,
                    },
                    Err(e) => SweepRow {
                        ensemble: kind.as_str().to_string(),
                        n,
                        d,
                        trials: grid.trials,
                        seed,
                        mean: None,
                        stderr: None,
                        mom: None,
                        trimmed: None,
                        closed_form: None,
                        asymptotic: None,
                        bound: None,
                        invalid_count: None,
                        elapsed_s: None,
                        error: Some(e.to_string()),
                    },
                };
                rows.push(row);
            }
        }
    }
    Ok(rows)
}

pub const SWEEP_CSV_HEADER: &str =
    "ensemble,n,d,trials,seed,mean,stderr,mom,trimmed,closed_form,asymptotic,bound,invalid_count,elapsed_s";

/// CSV table of sweep rows, floats at 17 significant digits.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.ensemble,
            r.n,
            r.d,
            r.trials,
            r.seed,
            fmt_opt_f64(r.mean),
            fmt_opt_f64(r.stderr),
            fmt_opt_f64(r.mom),
            fmt_opt_f64(r.trimmed),
            fmt_opt_f64(r.closed_form),
            fmt_opt_f64(r.asymptotic),
            fmt_opt_f64(r.bound),
            r.invalid_count.map(|c| c.to_string()).unwrap_or_default(),
            fmt_opt_f64(r.elapsed_s),
        ));
    }
    out
}

/// Raw per-trial CSV: trial index and total condition number.
pub fn raw_samples_csv(samples: &[f64]) -> String {
    let mut out = String::from("trial,mu\n");
    for (t, mu) in samples.iter().enumerate() {
        out.push_str(&format!("{t},{}\n", fmt_f64(*mu)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::sym_orthonormal_basis;

    #[test]
    fn estimator_reference_cases() {
        let e = estimate(&[1.0, 1.0, 1.0, 1.0], 2, 0.0).unwrap();
        assert_eq!((e.mean, e.mom, e.trimmed), (1.0, 1.0, 1.0));
        assert_eq!(e.stderr, 0.0);

        let e = estimate(&[0.0, 2.0], 2, 0.0).unwrap();
        assert_eq!(e.mom, 1.0); // median of two block means is their average

        let ladder: Vec<f64> = (1..=100).map(|i| i as f64).collect();
        let e = estimate(&ladder, 10, 0.02).unwrap();
        assert_eq!(e.trimmed, 50.5); // mean over 3..=98
        assert_eq!(e.mean, 50.5);

        assert!(matches!(estimate(&[], 1, 0.0), Err(Error::EmptyInput)));
    }

    #[test]
    fn mom_uses_index_stable_blocks() {
        // sizes 2,2,1: blocks {1,2}, {3,4}, {5} with means 1.5, 3.5, 5.0
        let e = estimate(&[1.0, 2.0, 3.0, 4.0, 5.0], 3, 0.0).unwrap();
        assert_eq!(e.mom, 3.5);
        assert_eq!(e.mom_mad, 1.5); // deviations 2.0, 0.0, 1.5
    }

    #[test]
    fn scalar_gaussian_run_is_exact() {
        let cfg = ExperimentConfig::new(EnsembleSpec::gaussian(1, 1).unwrap(), 100, 42);
        let (report, samples) = run_experiment(&cfg).unwrap();
        assert_eq!(report.n_finite, 100);
        assert_eq!(report.invalid_count, 0);
        assert!((report.mean - 1.0).abs() < 1e-12);
        assert!(report.stderr < 1e-12);
        for s in samples {
            assert!((s - 1.0).abs() < 1e-10);
        }
        assert!((report.closed_form.unwrap().value - 1.0).abs() < 1e-10);
        assert!(report.ci95.0 <= report.mean && report.mean <= report.ci95.1);
    }

    #[test]
    fn reports_are_identical_across_worker_counts() {
        let spec = EnsembleSpec::gaussian(2, 1).unwrap();
        let mut cfg = ExperimentConfig::new(spec, 500, 7);
        cfg.workers = Some(1);
        let (r1, s1) = run_experiment(&cfg).unwrap();
        cfg.workers = Some(4);
        let (r4, s4) = run_experiment(&cfg).unwrap();
        assert_eq!(s1.len(), s4.len());
        for (a, b) in s1.iter().zip(&s4) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        for (a, b) in [
            (r1.mean, r4.mean),
            (r1.stderr, r4.stderr),
            (r1.mom, r4.mom),
            (r1.mom_mad, r4.mom_mad),
            (r1.trimmed, r4.trimmed),
        ] {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn trimmed_no_larger_than_mean_on_right_skewed_mu() {
        let spec = EnsembleSpec::gaussian(2, 1).unwrap();
        let mut cfg = ExperimentConfig::new(spec, 2000, 11);
        cfg.trim = 0.02;
        let (report, _) = run_experiment(&cfg).unwrap();
        assert!(report.trimmed <= report.mean);
    }

    #[test]
    fn degenerate_subspace_yields_no_finite_trials() {
        // span{E₁₁} inside M(2): every sample is rank-deficient everywhere,
        // so the determinant form vanishes identically in every trial
        let mut e11 = crate::linalg::Matrix::zeros(2, 2);
        e11.set(0, 0, 1.0);
        let spec = EnsembleSpec::subspace(2, 1, vec![e11]).unwrap();
        let cfg = ExperimentConfig::new(spec, 10, 1);
        assert!(matches!(run_experiment(&cfg), Err(Error::EmptyInput)));
    }

    #[test]
    fn subspace_runs_report_bound_but_no_closed_form() {
        let spec = EnsembleSpec::subspace(2, 1, sym_orthonormal_basis(2)).unwrap();
        let cfg = ExperimentConfig::new(spec, 200, 3);
        let (report, _) = run_experiment(&cfg).unwrap();
        assert!(report.closed_form.is_none());
        assert!(report.bound.value > 0.0);
        assert_eq!(report.config.k, 3);
    }

    #[test]
    fn sweep_produces_a_row_per_cell() {
        let grid = SweepGrid {
            ensembles: vec![EnsembleKind::FullGaussian, EnsembleKind::Goe],
            n: vec![1, 2],
            d: vec![1],
            trials: 50,
            seed: 5,
            mom_blocks: None,
            trim: 0.0,
            workers: None,
        };
        let rows = sweep(&grid).unwrap();
        assert_eq!(rows.len(), 4);
        for row in &rows {
            assert!(row.error.is_none(), "{:?}", row.error);
            assert!(row.closed_form.is_some());
            assert!(row.bound.unwrap() > 0.0);
            assert_eq!(row.invalid_count, Some(0));
        }
        let csv = sweep_csv(&rows);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), SWEEP_CSV_HEADER);
        for line in lines {
            assert_eq!(line.split(',').count(), 14);
        }
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let spec = EnsembleSpec::gaussian(2, 1).unwrap();
        let mut cfg = ExperimentConfig::new(spec.clone(), 0, 1);
        assert!(run_experiment(&cfg).is_err());
        cfg.trials = 10;
        cfg.trim = 0.2;
        assert!(run_experiment(&cfg).is_err());
        cfg.trim = 0.0;
        cfg.mom_blocks = Some(11);
        assert!(run_experiment(&cfg).is_err());
        let big = ExperimentConfig::new(EnsembleSpec::gaussian(9, 8).unwrap(), 10, 1);
        assert!(matches!(run_experiment(&big), Err(Error::Config(_))));
    }
}
