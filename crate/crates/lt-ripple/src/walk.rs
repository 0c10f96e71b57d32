//! Random-walk models of the ripple size.
//!
//! The symmetric walk moves the ripple up or down by one with equal
//! probability each step; its RMS displacement after N steps is sqrt(N).
//! The biased walk moves redundancy probability mass from the up outcome to
//! the stay and down outcomes, which pulls the ripple towards zero as
//! decoding progresses; its RMS displacement grows slower than sqrt and is
//! what motivates ripple targets of the form c1 * L^(1/c2) with c2 > 2.

use crate::error::{Error, Result};
use crate::rng::trial_stream;
use rand::RngExt;
use rayon::prelude::*;

/// What happens when the walk touches zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BarrierPolicy {
    /// No intervention; the position may go negative.
    None,
    /// The walk freezes at zero.
    AbsorbAtZero,
    /// Position evolves unclamped, but the redundancy probability is
    /// evaluated as if the ripple were at least 1.
    #[default]
    Clamp,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkConfig {
    /// Steps in the walk; plays the role of k.
    pub k: usize,
    /// Initial ripple size R(k).
    pub r0: usize,
    pub barrier: BarrierPolicy,
    pub trials: usize,
}

impl WalkConfig {
    pub fn new(k: usize, r0: usize, barrier: BarrierPolicy, trials: usize) -> Result<Self> {
        let cfg = Self { k, r0, barrier, trials };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Defaults for the biased model: r0 = ceil(sqrt(k)), clamp barrier.
    pub fn with_defaults(k: usize, trials: usize) -> Result<Self> {
        let r0 = (k as f64).sqrt().ceil() as usize;
        Self::new(k, r0.max(1), BarrierPolicy::Clamp, trials)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidParameter("walk needs k >= 1 steps".into()));
        }
        if self.r0 == 0 {
            return Err(Error::InvalidParameter("initial ripple r0 must be >= 1".into()));
        }
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be >= 1".into()));
        }
        Ok(())
    }
}

/// RMS and mean displacement from the start, indexed by steps taken
/// (entry n-1 holds the statistics after n steps).
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricWalk {
    pub rms_by_steps: Vec<f64>,
    pub mean_by_steps: Vec<f64>,
    pub trials: usize,
}

/// Per-L statistics of the biased walk displacement Delta_L = R(0) - R(L),
/// indexed by L (entry 0 is identically zero), plus a few raw trajectories.
#[derive(Debug, Clone, PartialEq)]
pub struct BiasedWalk {
    pub k: usize,
    pub r0: usize,
    pub trials: usize,
    pub rms_by_remaining: Vec<f64>,
    pub mean_by_remaining: Vec<f64>,
    /// Positions R(L) of the first few trials, each indexed by L.
    pub sample_trajectories: Vec<Vec<i64>>,
}

const SAMPLE_TRAJECTORIES: usize = 8;

/// Transition probabilities (up, stay, down) of the biased walk at
/// excess redundancy probability `p_prime`; they sum to one for any
/// p_prime in [0, 1], and degenerate to the symmetric walk at zero.
pub fn biased_step_probs(p_prime: f64) -> [f64; 3] {
    let q = 1.0 - p_prime;
    [0.5 * q * q, p_prime * q, 0.5 + 0.5 * p_prime * p_prime]
}

/// Symmetric unit-step walk: after N steps the mean squared displacement
/// is N.
pub fn walk_symmetric(cfg: &WalkConfig, seed: u64) -> Result<SymmetricWalk> {
    cfg.validate()?;
    if cfg.barrier != BarrierPolicy::None {
        return Err(Error::InvalidParameter(
            "the symmetric walk is unbarriered; use barrier policy none".into(),
        ));
    }
    let k = cfg.k;
    // u64/i64 accumulators keep the reduction exact and order-independent
    let (sumsq, summ) = (0..cfg.trials as u64)
        .into_par_iter()
        .fold(
            || (vec![0u64; k], vec![0i64; k]),
            |(mut sumsq, mut summ), t| {
                let mut rng = trial_stream(seed, t);
                let mut pos: i64 = 0;
                let mut bits: u64 = 0;
                let mut left = 0u32;
                for (sq, m) in sumsq.iter_mut().zip(summ.iter_mut()) {
                    if left == 0 {
                        bits = rng.random::<u64>();
                        left = 64;
                    }
                    pos += ((bits & 1) as i64) * 2 - 1;
                    bits >>= 1;
                    left -= 1;
                    *sq += (pos * pos) as u64;
                    *m += pos;
                }
                (sumsq, summ)
            },
        )
        .reduce(
            || (vec![0u64; k], vec![0i64; k]),
            |(mut a, mut b), (c, d)| {
                for (x, y) in a.iter_mut().zip(c) {
                    *x += y;
                }
                for (x, y) in b.iter_mut().zip(d) {
                    *x += y;
                }
                (a, b)
            },
        );
    let n = cfg.trials as f64;
    Ok(SymmetricWalk {
        rms_by_steps: sumsq.iter().map(|&s| (s as f64 / n).sqrt()).collect(),
        mean_by_steps: summ.iter().map(|&s| s as f64 / n).collect(),
        trials: cfg.trials,
    })
}

/// One biased trajectory: positions R(L) for L = k..0, written into `traj`
/// (indexed by L). The pre-walk state is r0; the step producing R(L) uses
/// p_r = (R(L+1) - 1)/L against the baseline p_r0 = (r0 - 1)/k, so the
/// first step carries exactly zero bias. The final step L = 0 processes
/// the last input and can add nothing, so R(0) = R(1) - 1.
fn biased_trajectory(cfg: &WalkConfig, seed: u64, trial: u64, traj: &mut [i64]) {
    let mut rng = trial_stream(seed, trial);
    let p_r0 = (cfg.r0 as f64 - 1.0) / cfg.k as f64;
    let mut pos = cfg.r0 as i64;
    let mut absorbed = false;
    for l in (1..=cfg.k).rev() {
        if !absorbed {
            let eval = match cfg.barrier {
                BarrierPolicy::Clamp => pos.max(1),
                _ => pos,
            };
            let p_r = (eval as f64 - 1.0) / l as f64;
            let p_prime = (p_r - p_r0).clamp(0.0, 1.0);
            let [up, stay, _] = biased_step_probs(p_prime);
            let x: f64 = rng.random();
            pos += if x < up {
                1
            } else if x < up + stay {
                0
            } else {
                -1
            };
            if cfg.barrier == BarrierPolicy::AbsorbAtZero && pos <= 0 {
                pos = 0;
                absorbed = true;
            }
        }
        traj[l] = pos;
    }
    traj[0] = if absorbed { 0 } else { traj[1] - 1 };
}

/// Biased walk ensemble: RMS and mean of Delta_L = R(0) - R(L) versus L.
pub fn walk_biased(cfg: &WalkConfig, seed: u64) -> Result<BiasedWalk> {
    cfg.validate()?;
    let k = cfg.k;
    let (sumsq, summ, _) = (0..cfg.trials as u64)
        .into_par_iter()
        .fold(
            || (vec![0u64; k + 1], vec![0i64; k + 1], vec![0i64; k + 1]),
            |(mut sumsq, mut summ, mut traj), t| {
                biased_trajectory(cfg, seed, t, &mut traj);
                let origin = traj[0];
                for l in 0..=k {
                    let delta = origin - traj[l];
                    sumsq[l] += (delta * delta) as u64;
                    summ[l] += delta;
                }
                (sumsq, summ, traj)
            },
        )
        .reduce(
            || (vec![0u64; k + 1], vec![0i64; k + 1], vec![0i64; k + 1]),
            |(mut a, mut b, t), (c, d, _)| {
                for (x, y) in a.iter_mut().zip(c) {
                    *x += y;
                }
                for (x, y) in b.iter_mut().zip(d) {
                    *x += y;
                }
                (a, b, t)
            },
        );
    let n = cfg.trials as f64;
    let mut sample_trajectories = Vec::new();
    let mut traj = vec![0i64; k + 1];
    for t in 0..cfg.trials.min(SAMPLE_TRAJECTORIES) as u64 {
        biased_trajectory(cfg, seed, t, &mut traj);
        sample_trajectories.push(traj.clone());
    }
    Ok(BiasedWalk {
        k,
        r0: cfg.r0,
        trials: cfg.trials,
        rms_by_remaining: sumsq.iter().map(|&s| (s as f64 / n).sqrt()).collect(),
        mean_by_remaining: summ.iter().map(|&s| s as f64 / n).collect(),
        sample_trajectories,
    })
}

impl BiasedWalk {
    /// (L, RMS) pairs for L >= 1, ready for power-law fitting.
    pub fn rms_points(&self) -> Vec<(f64, f64)> {
        (1..=self.k)
            .map(|l| (l as f64, self.rms_by_remaining[l]))
            .collect()
    }

    /// Fit over the default window L in [k/100, k], which avoids small-L
    /// noise.
    pub fn fit_default(&self) -> Result<PowerLawFit> {
        let lo = (self.k / 100).max(1);
        let points: Vec<(f64, f64)> = (lo..=self.k)
            .map(|l| (l as f64, self.rms_by_remaining[l]))
            .collect();
        fit_power_law(&points)
    }
}

/// Least-squares power law c1 * L^(1/c2) fitted in log-log space;
/// `residual_sq` is the sum of squared log residuals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit {
    pub c1: f64,
    pub c2: f64,
    pub residual_sq: f64,
}

fn fit_points_checked(points: &[(f64, f64)]) -> Result<Vec<(f64, f64)>> {
    if points.len() < 10 {
        return Err(Error::InvalidParameter(format!(
            "power-law fit needs at least 10 points, got {}",
            points.len()
        )));
    }
    if points.iter().any(|&(x, y)| x <= 0.0 || y <= 0.0 || !x.is_finite() || !y.is_finite()) {
        return Err(Error::InvalidParameter(
            "power-law fit needs positive finite points".into(),
        ));
    }
    Ok(points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect())
}

pub fn fit_power_law(points: &[(f64, f64)]) -> Result<PowerLawFit> {
    let logs = fit_points_checked(points)?;
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter(
            "power-law fit needs at least two distinct abscissae".into(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    // meaningful exponents give slopes of order 0.1..1; anything at noise
    // level has no finite c2
    if slope.abs() < 1e-9 {
        return Err(Error::InvalidParameter(
            "fitted curve is flat; no finite exponent".into(),
        ));
    }
    let residual_sq = logs
        .iter()
        .map(|&(x, y)| {
            let e = y - (intercept + slope * x);
            e * e
        })
        .sum();
    Ok(PowerLawFit {
        c1: intercept.exp(),
        c2: 1.0 / slope,
        residual_sq,
    })
}

/// Best c1 for a fixed exponent c2; for comparing against the free fit.
pub fn fit_power_law_fixed(points: &[(f64, f64)], c2: f64) -> Result<PowerLawFit> {
    if c2 == 0.0 || !c2.is_finite() {
        return Err(Error::InvalidParameter("fixed exponent must be finite and nonzero".into()));
    }
    let logs = fit_points_checked(points)?;
    let slope = 1.0 / c2;
    let n = logs.len() as f64;
    let intercept = logs.iter().map(|&(x, y)| y - slope * x).sum::<f64>() / n;
    let residual_sq = logs
        .iter()
        .map(|&(x, y)| {
            let e = y - (intercept + slope * x);
            e * e
        })
        .sum();
    Ok(PowerLawFit {
        c1: intercept.exp(),
        c2,
        residual_sq,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        assert!(WalkConfig::new(0, 1, BarrierPolicy::None, 1).is_err());
        assert!(WalkConfig::new(10, 0, BarrierPolicy::None, 1).is_err());
        assert!(WalkConfig::new(10, 1, BarrierPolicy::None, 0).is_err());
        assert_eq!(WalkConfig::with_defaults(1024, 5).unwrap().r0, 32);
    }

    #[test]
    fn symmetric_rejects_barriers() {
        let cfg = WalkConfig::new(10, 1, BarrierPolicy::Clamp, 10).unwrap();
        assert!(walk_symmetric(&cfg, 0).is_err());
    }

    #[test]
    fn symmetric_first_step_rms_is_one() {
        let cfg = WalkConfig::new(3, 1, BarrierPolicy::None, 500).unwrap();
        let w = walk_symmetric(&cfg, 7).unwrap();
        assert_eq!(w.rms_by_steps[0], 1.0);
    }

    #[test]
    fn symmetric_second_moment_grows_linearly() {
        let trials = 20_000;
        let cfg = WalkConfig::new(10_000, 1, BarrierPolicy::None, trials).unwrap();
        let w = walk_symmetric(&cfg, 0x5A17).unwrap();
        for n in [100usize, 1_000, 10_000] {
            let second_moment = w.rms_by_steps[n - 1].powi(2);
            // Var(Delta^2) = 2 N^2 for the unbiased walk
            let se = (n as f64) * (2.0 / trials as f64).sqrt();
            assert!(
                (second_moment - n as f64).abs() < 3.0 * se,
                "N = {n}: second moment {second_moment}"
            );
            let mean_se = (n as f64 / trials as f64).sqrt();
            assert!(
                w.mean_by_steps[n - 1].abs() < 3.0 * mean_se,
                "N = {n}: mean {}",
                w.mean_by_steps[n - 1]
            );
        }
    }

    #[test]
    fn step_probs_normalize_and_degenerate() {
        assert_eq!(biased_step_probs(0.0), [0.5, 0.0, 0.5]);
        let mut p = 0.0;
        while p <= 1.0 {
            let [up, stay, down] = biased_step_probs(p);
            assert!((up + stay + down - 1.0).abs() < 1e-12, "p = {p}");
            assert!(up >= 0.0 && stay >= 0.0 && down >= 0.0);
            p += 1e-3;
        }
    }

    #[test]
    fn biased_walk_is_deterministic() {
        let cfg = WalkConfig::with_defaults(256, 500).unwrap();
        let a = walk_biased(&cfg, 42).unwrap();
        let b = walk_biased(&cfg, 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn biased_rms_grows_slower_than_sqrt() {
        let cfg = WalkConfig::with_defaults(1024, 20_000).unwrap();
        let w = walk_biased(&cfg, 0xB1A5).unwrap();
        let free = w.fit_default().unwrap();
        let points: Vec<(f64, f64)> = (10..=1024).map(|l| (l as f64, w.rms_by_remaining[l])).collect();
        let fixed = fit_power_law_fixed(&points, 2.0).unwrap();
        let free_same = fit_power_law(&points).unwrap();
        assert!(free.c2 > 2.0, "free exponent c2 = {}", free.c2);
        assert!(
            free_same.residual_sq < fixed.residual_sq,
            "free fit {} vs sqrt fit {}",
            free_same.residual_sq,
            fixed.residual_sq
        );
    }

    #[test]
    fn absorbing_barrier_freezes_at_zero() {
        let cfg = WalkConfig::new(400, 1, BarrierPolicy::AbsorbAtZero, 32).unwrap();
        let w = walk_biased(&cfg, 3).unwrap();
        let mut saw_absorption = false;
        for traj in &w.sample_trajectories {
            let mut frozen = false;
            for l in (0..=cfg.k).rev() {
                if frozen {
                    assert_eq!(traj[l], 0);
                } else if traj[l] == 0 {
                    frozen = true;
                    saw_absorption = true;
                }
                assert!(traj[l] >= 0);
            }
        }
        assert!(saw_absorption, "r0 = 1 walks should hit the barrier");
    }

    #[test]
    fn final_step_is_a_pure_decrement() {
        let cfg = WalkConfig::with_defaults(64, 16).unwrap();
        let w = walk_biased(&cfg, 11).unwrap();
        for traj in &w.sample_trajectories {
            assert_eq!(traj[0], traj[1] - 1);
        }
    }

    #[test]
    fn fit_recovers_exact_power_laws() {
        let cubic: Vec<(f64, f64)> = (1..=60).map(|l| (l as f64, 2.0 * (l as f64).powf(1.0 / 3.0))).collect();
        let f = fit_power_law(&cubic).unwrap();
        assert!((f.c1 - 2.0).abs() < 1e-6, "c1 = {}", f.c1);
        assert!((f.c2 - 3.0).abs() < 1e-6, "c2 = {}", f.c2);
        assert!(f.residual_sq < 1e-18);

        let sqrt: Vec<(f64, f64)> = (1..=60).map(|l| (l as f64, 1.3 * (l as f64).sqrt())).collect();
        let f = fit_power_law(&sqrt).unwrap();
        assert!((f.c2 - 2.0).abs() < 1e-6, "c2 = {}", f.c2);
        let fixed = fit_power_law_fixed(&sqrt, 2.0).unwrap();
        assert!((fixed.c1 - 1.3).abs() < 1e-9);
    }

    #[test]
    fn fit_rejects_degenerate_input() {
        let short: Vec<(f64, f64)> = (1..=5).map(|l| (l as f64, l as f64)).collect();
        assert!(fit_power_law(&short).is_err());
        let negative: Vec<(f64, f64)> = (1..=12).map(|l| (l as f64, -1.0)).collect();
        assert!(fit_power_law(&negative).is_err());
        let flat: Vec<(f64, f64)> = (1..=12).map(|l| (l as f64, 3.0)).collect();
        assert!(fit_power_law(&flat).is_err());
    }
}
