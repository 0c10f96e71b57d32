//! Monte Carlo experiment harness: average overhead, block error rates,
//! parameter sweeps, and empirical ripple trajectories.
//!
//! Determinism contract: every trial draws from its own stream derived from
//! (master seed, trial index), all aggregation uses integer accumulators,
//! and per-trial samples are re-sorted by trial index after the parallel
//! reduce. Results are therefore bit-identical for any worker count.

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::codec::{decode_batch, decode_incremental, RippleDiscipline};
use crate::design::{design, RippleTarget};
use crate::dist::{ideal_soliton, robust_soliton, save_distribution, DegreeDistribution, RsdParams};
use crate::error::{Error, Result};
use crate::rng::trial_stream;

pub(crate) fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

/// Where an experiment's degree distribution comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum DistributionSource {
    Ideal,
    Robust { c: f64, delta: f64 },
    Designed { c1: f64, c2: f64 },
    Custom(DegreeDistribution),
}

/// A resolved source: the distribution plus, for designed sources, the
/// expected symbol demand and the ripple target behind it.
pub struct ResolvedSource {
    pub dist: DegreeDistribution,
    pub n_expected: Option<f64>,
    pub target: Option<RippleTarget>,
}

impl DistributionSource {
    pub fn resolve(&self, k: usize) -> Result<ResolvedSource> {
        match self {
            Self::Ideal => Ok(ResolvedSource {
                dist: ideal_soliton(k)?,
                n_expected: None,
                target: None,
            }),
            Self::Robust { c, delta } => Ok(ResolvedSource {
                dist: robust_soliton(k, &RsdParams { c: *c, delta: *delta })?,
                n_expected: None,
                target: None,
            }),
            Self::Designed { c1, c2 } => {
                let target = RippleTarget::new(k, *c1, *c2)?;
                let sol = design(&target)?;
                Ok(ResolvedSource {
                    dist: sol.distribution,
                    n_expected: Some(sol.n_expected),
                    target: Some(target),
                })
            }
            Self::Custom(dist) => {
                if dist.k() != k {
                    return Err(Error::InvalidParameter(format!(
                        "custom distribution is over k = {}, experiment wants k = {k}",
                        dist.k()
                    )));
                }
                Ok(ResolvedSource {
                    dist: dist.clone(),
                    n_expected: None,
                    target: None,
                })
            }
        }
    }

    /// Stable label for CSV columns and digests.
    pub fn label(&self) -> String {
        match self {
            Self::Ideal => "ideal".into(),
            Self::Robust { c, delta } => format!("rsd(c={c:?},delta={delta:?})"),
            Self::Designed { c1, c2 } => format!("designed(c1={c1:?},c2={c2:?})"),
            Self::Custom(dist) => {
                let digest = sha256_hex(save_distribution(dist).as_bytes());
                format!("custom({})", &digest[..8])
            }
        }
    }
}

/// Overhead grid 0, 0.01, ..., 0.5.
pub fn default_overhead_grid() -> Vec<f64> {
    (0..=50).map(|i| i as f64 / 100.0).collect()
}

pub const DEFAULT_CAP_MULTIPLIER: f64 = 3.0;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub k: usize,
    pub source: DistributionSource,
    pub trials: usize,
    pub seed: u64,
    pub overhead_grid: Vec<f64>,
    pub cap_multiplier: f64,
}

impl ExperimentConfig {
    pub fn new(k: usize, source: DistributionSource, trials: usize, seed: u64) -> Self {
        Self {
            k,
            source,
            trials,
            seed,
            overhead_grid: default_overhead_grid(),
            cap_multiplier: DEFAULT_CAP_MULTIPLIER,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidParameter("k must be >= 1".into()));
        }
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be >= 1".into()));
        }
        if self.overhead_grid.iter().any(|&a| !a.is_finite() || a < 0.0) {
            return Err(Error::InvalidParameter(
                "overhead grid values must be finite and >= 0".into(),
            ));
        }
        if !(self.cap_multiplier > 1.0) {
            return Err(Error::InvalidParameter("cap multiplier must exceed 1".into()));
        }
        Ok(())
    }

    /// Symbols after which a trial counts as failed.
    pub fn cap(&self) -> usize {
        (self.cap_multiplier * self.k as f64).ceil() as usize
    }

    /// Canonical content hash of the configuration.
    pub fn digest(&self) -> String {
        let source = match &self.source {
            DistributionSource::Custom(dist) => {
                format!("custom:{}", save_distribution(dist))
            }
            other => other.label(),
        };
        let grid: Vec<String> = self.overhead_grid.iter().map(|a| format!("{a:?}")).collect();
        let canonical = format!(
            "k={};source={};trials={};seed={};grid={};cap={:?}",
            self.k,
            source,
            self.trials,
            self.seed,
            grid.join(","),
            self.cap_multiplier
        );
        sha256_hex(canonical.as_bytes())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub k: usize,
    pub trials: usize,
    /// Per trial, in trial order: symbols consumed at success, None if the
    /// trial hit the cap.
    pub n_success: Vec<Option<u32>>,
    /// Mean n_success / k over successful trials; None if every trial
    /// failed.
    pub avg_overhead: Option<f64>,
    /// Standard error of the overhead mean (sample std / sqrt(successes)).
    pub overhead_std_err: Option<f64>,
    /// (alpha, block error rate): fraction of trials with
    /// n_success > (1 + alpha) k, counting capped trials as failures.
    pub ber: Vec<(f64, f64)>,
    pub failures: usize,
    pub redundant_total: u64,
    /// Mean ripple size after the step leaving L remaining, indexed by L;
    /// averaged over the trials that reached L.
    pub mean_ripple: Vec<f64>,
}

struct TrialAcc {
    samples: Vec<(u64, Option<u32>)>,
    redundant: u64,
    ripple_sum: Vec<u64>,
    ripple_cnt: Vec<u64>,
}

impl TrialAcc {
    fn new(k: usize) -> Self {
        Self {
            samples: Vec::new(),
            redundant: 0,
            ripple_sum: vec![0; k],
            ripple_cnt: vec![0; k],
        }
    }

    fn merge(mut self, other: Self) -> Self {
        self.samples.extend(other.samples);
        self.redundant += other.redundant;
        for (a, b) in self.ripple_sum.iter_mut().zip(other.ripple_sum) {
            *a += b;
        }
        for (a, b) in self.ripple_cnt.iter_mut().zip(other.ripple_cnt) {
            *a += b;
        }
        self
    }
}

fn summarize(cfg: &ExperimentConfig, acc: TrialAcc) -> ExperimentResult {
    let k = cfg.k;
    let mut samples = acc.samples;
    samples.sort_unstable_by_key(|&(t, _)| t);
    let n_success: Vec<Option<u32>> = samples.into_iter().map(|(_, n)| n).collect();

    let mut sum = 0u64;
    let mut sum_sq = 0u64;
    let mut successes = 0u64;
    for n in n_success.iter().flatten() {
        sum += *n as u64;
        sum_sq += (*n as u64) * (*n as u64);
        successes += 1;
    }
    let failures = cfg.trials - successes as usize;
    let (avg_overhead, overhead_std_err) = if successes == 0 {
        (None, None)
    } else {
        let mean = sum as f64 / successes as f64;
        let avg = mean / k as f64;
        let err = if successes > 1 {
            let var = (sum_sq as f64 - sum as f64 * mean) / (successes - 1) as f64;
            Some(var.max(0.0).sqrt() / k as f64 / (successes as f64).sqrt())
        } else {
            None
        };
        (Some(avg), err)
    };

    let cap = cfg.cap();
    let ber = cfg
        .overhead_grid
        .iter()
        .map(|&alpha| {
            let threshold = (1.0 + alpha) * k as f64;
            let mut bad = 0usize;
            for n in &n_success {
                match n {
                    Some(n) => {
                        if *n as f64 > threshold {
                            bad += 1;
                        }
                    }
                    // capped trials fail at every alpha below the cap
                    None => {
                        if threshold < cap as f64 {
                            bad += 1;
                        }
                    }
                }
            }
            (alpha, bad as f64 / cfg.trials as f64)
        })
        .collect();

    let mean_ripple = acc
        .ripple_sum
        .iter()
        .zip(&acc.ripple_cnt)
        .map(|(&s, &c)| if c == 0 { 0.0 } else { s as f64 / c as f64 })
        .collect();

    ExperimentResult {
        k,
        trials: cfg.trials,
        n_success,
        avg_overhead,
        overhead_std_err,
        ber,
        failures,
        redundant_total: acc.redundant,
        mean_ripple,
    }
}

/// Runs `trials` independent incremental decodes and aggregates overhead,
/// error-rate, and ripple statistics.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let resolved = cfg.source.resolve(cfg.k)?;
    let dist = resolved.dist;
    let cap = cfg.cap();
    let acc = (0..cfg.trials as u64)
        .into_par_iter()
        .fold(
            || TrialAcc::new(cfg.k),
            |mut acc, t| {
                let mut rng = trial_stream(cfg.seed, t);
                let trace = decode_incremental(&dist, cap, RippleDiscipline::Fifo, &mut rng)
                    .expect("cap >= k by validation");
                acc.samples.push((t, trace.n_success.map(|n| n as u32)));
                acc.redundant += trace.redundant as u64;
                for row in &trace.rows {
                    acc.ripple_sum[row.remaining] += row.ripple as u64;
                    acc.ripple_cnt[row.remaining] += 1;
                }
                acc
            },
        )
        .reduce(|| TrialAcc::new(cfg.k), TrialAcc::merge);
    Ok(summarize(cfg, acc))
}

/// Parameter families a sweep can walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepFamily {
    /// axis1 = c1, axis2 = c2.
    Designed,
    /// axis1 = c, axis2 = delta.
    Robust,
}

impl SweepFamily {
    pub fn source(&self, a1: f64, a2: f64) -> DistributionSource {
        match self {
            Self::Designed => DistributionSource::Designed { c1: a1, c2: a2 },
            Self::Robust => DistributionSource::Robust { c: a1, delta: a2 },
        }
    }

    pub fn axis_names(&self) -> (&'static str, &'static str) {
        match self {
            Self::Designed => ("c1", "c2"),
            Self::Robust => ("c", "delta"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub family: SweepFamily,
    pub k: usize,
    pub trials: usize,
    pub axis1: Vec<f64>,
    pub axis2: Vec<f64>,
    /// Row-major [axis1][axis2]; None where the cell's distribution could
    /// not be built.
    pub avg_overhead: Vec<Vec<Option<f64>>>,
    pub std_err: Vec<Vec<Option<f64>>>,
    /// (axis1 index, axis2 index) of the smallest average overhead.
    pub argmin: Option<(usize, usize)>,
    /// Construction failures: (axis1 index, axis2 index, error text).
    pub cell_errors: Vec<(usize, usize, String)>,
}

/// One `run_experiment` per grid cell, every cell reusing the same master
/// seed so cells share common random numbers.
pub fn sweep(
    k: usize,
    family: SweepFamily,
    axis1: &[f64],
    axis2: &[f64],
    trials: usize,
    seed: u64,
) -> Result<SweepResult> {
    if axis1.is_empty() || axis2.is_empty() {
        return Err(Error::InvalidParameter("sweep axes must be nonempty".into()));
    }
    let mut avg = vec![vec![None; axis2.len()]; axis1.len()];
    let mut err = vec![vec![None; axis2.len()]; axis1.len()];
    let mut cell_errors = Vec::new();
    let mut argmin: Option<(usize, usize)> = None;
    let mut best = f64::INFINITY;
    for (i, &a1) in axis1.iter().enumerate() {
        for (j, &a2) in axis2.iter().enumerate() {
            let cfg = ExperimentConfig::new(k, family.source(a1, a2), trials, seed);
            match run_experiment(&cfg) {
                Ok(res) => {
                    avg[i][j] = res.avg_overhead;
                    err[i][j] = res.overhead_std_err;
                    if let Some(o) = res.avg_overhead {
                        if o < best {
                            best = o;
                            argmin = Some((i, j));
                        }
                    }
                }
                Err(e) => cell_errors.push((i, j, e.to_string())),
            }
        }
    }
    Ok(SweepResult {
        family,
        k,
        trials,
        axis1: axis1.to_vec(),
        axis2: axis2.to_vec(),
        avg_overhead: avg,
        std_err: err,
        argmin,
        cell_errors,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareEntry {
    pub k: usize,
    pub label: String,
    pub avg_overhead: Option<f64>,
    pub std_err: Option<f64>,
    pub failures: usize,
    pub ber: Vec<(f64, f64)>,
}

/// Side-by-side experiments: each source at each k, common random numbers
/// within a k.
pub fn compare(
    ks: &[usize],
    sources: &[DistributionSource],
    trials: usize,
    seed: u64,
) -> Result<Vec<CompareEntry>> {
    if ks.is_empty() || sources.is_empty() {
        return Err(Error::InvalidParameter(
            "compare needs at least one k and one source".into(),
        ));
    }
    let mut entries = Vec::with_capacity(ks.len() * sources.len());
    for &k in ks {
        for source in sources {
            let cfg = ExperimentConfig::new(k, source.clone(), trials, seed);
            let res = run_experiment(&cfg)?;
            entries.push(CompareEntry {
                k,
                label: source.label(),
                avg_overhead: res.avg_overhead,
                std_err: res.overhead_std_err,
                failures: res.failures,
                ber: res.ber,
            });
        }
    }
    Ok(entries)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryResult {
    pub k: usize,
    /// Symbols given to every batch decode.
    pub n_symbols: usize,
    pub trials: usize,
    /// Mean ripple size at L remaining, indexed by L in 0..=k; entry k is
    /// the ripple right after intake, before any processing.
    pub mean_ripple: Vec<f64>,
    /// Trials that reached each L.
    pub reached: Vec<u64>,
    /// The designed target R(L) when the source carries one.
    pub target: Option<Vec<f64>>,
    pub success_rate: f64,
}

/// Batch-decodes with a fixed symbol count and averages the ripple
/// trajectory. Designed sources default to ceil(n_expected) symbols; other
/// sources need an explicit count.
pub fn ripple_trajectory(cfg: &ExperimentConfig, n_symbols: Option<usize>) -> Result<TrajectoryResult> {
    cfg.validate()?;
    let resolved = cfg.source.resolve(cfg.k)?;
    let n = match n_symbols.or_else(|| resolved.n_expected.map(|n| n.ceil() as usize)) {
        Some(n) if n > 0 => n,
        Some(_) => return Err(Error::InvalidParameter("symbol count must be >= 1".into())),
        None => {
            return Err(Error::InvalidParameter(
                "this source has no expected symbol demand; pass a symbol count".into(),
            ))
        }
    };
    let k = cfg.k;
    let dist = resolved.dist;
    let (sum, cnt, successes) = (0..cfg.trials as u64)
        .into_par_iter()
        .fold(
            || (vec![0u64; k + 1], vec![0u64; k + 1], 0u64),
            |(mut sum, mut cnt, mut successes), t| {
                let mut rng = trial_stream(cfg.seed, t);
                let trace = decode_batch(&dist, n, RippleDiscipline::Fifo, &mut rng)
                    .expect("batch decode cannot fail on valid inputs");
                let initial = trace.rows.first().map_or(0, |r| r.ripple_before);
                sum[k] += initial as u64;
                cnt[k] += 1;
                for row in &trace.rows {
                    sum[row.remaining] += row.ripple as u64;
                    cnt[row.remaining] += 1;
                }
                if trace.success {
                    successes += 1;
                }
                (sum, cnt, successes)
            },
        )
        .reduce(
            || (vec![0u64; k + 1], vec![0u64; k + 1], 0u64),
            |(mut a, mut b, s1), (c, d, s2)| {
                for (x, y) in a.iter_mut().zip(c) {
                    *x += y;
                }
                for (x, y) in b.iter_mut().zip(d) {
                    *x += y;
                }
                (a, b, s1 + s2)
            },
        );
    let mean_ripple = sum
        .iter()
        .zip(&cnt)
        .map(|(&s, &c)| if c == 0 { 0.0 } else { s as f64 / c as f64 })
        .collect();
    let target = resolved
        .target
        .map(|t| (0..=k).map(|l| t.ripple(l)).collect());
    Ok(TrajectoryResult {
        k,
        n_symbols: n,
        trials: cfg.trials,
        mean_ripple,
        reached: cnt,
        target,
        success_rate: successes as f64 / cfg.trials as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::DegreeDistribution;

    fn point_mass(k: usize, d: usize) -> DegreeDistribution {
        let mut mass = vec![0.0; k];
        mass[d - 1] = 1.0;
        DegreeDistribution::new(k, mass).unwrap()
    }

    #[test]
    fn config_validation() {
        let mut cfg = ExperimentConfig::new(8, DistributionSource::Ideal, 10, 0);
        cfg.validate().unwrap();
        cfg.cap_multiplier = 1.0;
        assert!(cfg.validate().is_err());
        cfg.cap_multiplier = 3.0;
        cfg.overhead_grid = vec![-0.1];
        assert!(cfg.validate().is_err());
        cfg.overhead_grid = default_overhead_grid();
        cfg.trials = 0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn trivial_k1_overhead_is_exact() {
        let cfg = ExperimentConfig::new(
            1,
            DistributionSource::Custom(point_mass(1, 1)),
            64,
            9,
        );
        let res = run_experiment(&cfg).unwrap();
        assert_eq!(res.avg_overhead, Some(1.0));
        assert_eq!(res.failures, 0);
        assert_eq!(res.ber[0], (0.0, 0.0));
        assert!(res.n_success.iter().all(|n| *n == Some(1)));
    }

    #[test]
    fn results_are_deterministic() {
        let cfg = ExperimentConfig::new(
            64,
            DistributionSource::Robust { c: 0.1, delta: 1.0 },
            400,
            0xD00D,
        );
        let a = run_experiment(&cfg).unwrap();
        let b = run_experiment(&cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn ber_is_nonincreasing_in_alpha() {
        let cfg = ExperimentConfig::new(
            64,
            DistributionSource::Robust { c: 0.1, delta: 0.5 },
            500,
            3,
        );
        let res = run_experiment(&cfg).unwrap();
        for w in res.ber.windows(2) {
            assert!(w[1].1 <= w[0].1, "{:?} then {:?}", w[0], w[1]);
        }
    }

    #[test]
    fn hopeless_distribution_fails_every_trial() {
        // degree-k symbols only: nothing ever reaches the ripple
        let cfg = ExperimentConfig::new(
            32,
            DistributionSource::Custom(point_mass(32, 32)),
            50,
            1,
        );
        let res = run_experiment(&cfg).unwrap();
        assert_eq!(res.failures, 50);
        assert_eq!(res.avg_overhead, None);
        assert!(res.ber.iter().all(|&(_, rate)| rate == 1.0));
    }

    #[test]
    fn single_cell_sweep_matches_run_experiment() {
        let res = sweep(48, SweepFamily::Robust, &[0.1], &[1.0], 200, 77).unwrap();
        let cfg = ExperimentConfig::new(
            48,
            DistributionSource::Robust { c: 0.1, delta: 1.0 },
            200,
            77,
        );
        let direct = run_experiment(&cfg).unwrap();
        assert_eq!(res.avg_overhead[0][0], direct.avg_overhead);
        assert_eq!(res.argmin, Some((0, 0)));
    }

    #[test]
    fn sweep_shape_and_errors() {
        // delta >= k makes the robust soliton unbuildable in one cell
        let res = sweep(16, SweepFamily::Robust, &[0.1, 0.2], &[1.0, 16.0], 50, 5).unwrap();
        assert_eq!(res.avg_overhead.len(), 2);
        assert_eq!(res.avg_overhead[0].len(), 2);
        assert_eq!(res.cell_errors.len(), 2);
        assert!(res.cell_errors.iter().all(|&(_, j, _)| j == 1));
        assert!(res.argmin.is_some());
    }

    #[test]
    fn compare_identical_sources_agree() {
        let sources = vec![
            DistributionSource::Robust { c: 0.1, delta: 1.0 },
            DistributionSource::Robust { c: 0.1, delta: 1.0 },
        ];
        let entries = compare(&[32], &sources, 150, 4).unwrap();
        assert_eq!(entries[0].avg_overhead, entries[1].avg_overhead);
        assert_eq!(entries[0].ber, entries[1].ber);
    }

    #[test]
    fn trajectory_needs_a_symbol_count_without_design() {
        let cfg = ExperimentConfig::new(32, DistributionSource::Ideal, 10, 0);
        assert!(ripple_trajectory(&cfg, None).is_err());
        assert!(ripple_trajectory(&cfg, Some(40)).is_ok());
    }

    #[test]
    fn trajectory_stays_in_bounds() {
        let cfg = ExperimentConfig::new(
            64,
            DistributionSource::Robust { c: 0.1, delta: 1.0 },
            100,
            8,
        );
        let res = ripple_trajectory(&cfg, Some(80)).unwrap();
        assert_eq!(res.mean_ripple.len(), 65);
        for (l, &m) in res.mean_ripple.iter().enumerate() {
            // ripple <= remaining: recovered-but-unprocessed inputs are a
            // subset of the unprocessed ones
            assert!(m >= 0.0 && m <= l as f64, "L={l}: {m}");
            assert!(m.is_finite());
        }
        assert_eq!(res.reached[64], 100);
    }

    #[test]
    fn designed_trajectory_tracks_target() {
        // the designer promises the mean ripple follows the target in
        // expectation when exactly n_expected symbols are supplied
        let cfg = ExperimentConfig::new(
            256,
            DistributionSource::Designed { c1: 1.7, c2: 2.5 },
            1500,
            0x7247,
        );
        let res = ripple_trajectory(&cfg, None).unwrap();
        let target = res.target.as_ref().unwrap();
        for l in 26..=230usize {
            let rel = (res.mean_ripple[l] - target[l]).abs() / target[l];
            assert!(
                rel < 0.15,
                "L={l}: mean {} vs target {}",
                res.mean_ripple[l],
                target[l]
            );
        }
        assert!(res.success_rate > 0.1);
    }
}
