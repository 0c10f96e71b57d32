//! Release and redundancy analysis of the peeling decoder.
//!
//! A buffered symbol of degree `d` is *released* at the processing step that
//! reduces it to degree one. The released neighbor either joins the ripple
//! (it was unrecovered) or is redundant. This module gives closed forms for
//! the joint probability of release-with-ripple-addition, the marginal
//! release law, and the per-degree redundancy probability, plus an
//! exhaustive counting oracle for verifying the closed forms at small `k`.

use crate::error::{Error, Result};

/// A point query against the release law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReleaseQuery {
    /// Number of input symbols.
    pub k: usize,
    /// Degree of the encoded symbol.
    pub degree: usize,
    /// Input symbols still unprocessed at the point of release.
    pub remaining: usize,
    /// Ripple size at the point of release. Real-valued so design targets
    /// (fractional ripple sizes) can be evaluated directly.
    pub ripple: f64,
}

impl ReleaseQuery {
    pub fn prob(&self) -> f64 {
        release_add_prob(self.k, self.degree, self.remaining, self.ripple)
    }
}

/// Probability that a degree-`d` symbol is released when `l` of `k` inputs
/// remain unprocessed *and* its released neighbor joins the ripple, given
/// ripple size `r` at that point.
///
/// Degree-1 symbols are released on arrival: the mass sits at
/// `(l, r) = (k, 0)`. For `d >= 2` the value is nonzero when `r >= 1`,
/// `l <= k - d + 1`, and the eligible weight `l - r + 1` (unprocessed
/// symbols outside the ripple) is positive; at integer `r` that is exactly
/// the band `1 <= r <= l <= k - d + 1`. Everything else returns 0. Total on
/// all inputs, no failure paths.
pub fn release_add_prob(k: usize, d: usize, l: usize, r: f64) -> f64 {
    if k == 0 || d == 0 || d > k {
        return 0.0;
    }
    if d == 1 {
        return if l == k && r == 0.0 { 1.0 } else { 0.0 };
    }
    if l < 1 || l > k - d + 1 || !(r >= 1.0) {
        return 0.0;
    }
    let eligible = l as f64 - r + 1.0;
    if eligible <= 0.0 {
        return 0.0;
    }
    release_core(k, d, l) * eligible
}

/// Marginal probability that a degree-`d` symbol is released when `l` of `k`
/// inputs remain unprocessed, with no conditioning on the ripple. Degree-1
/// symbols release on arrival, recorded at `l = k`.
pub fn release_prob(k: usize, d: usize, l: usize) -> f64 {
    if k == 0 || d == 0 || d > k {
        return 0.0;
    }
    if d == 1 {
        return if l == k { 1.0 } else { 0.0 };
    }
    if l < 1 || l > k - d + 1 {
        return 0.0;
    }
    release_core(k, d, l) * l as f64
}

/// Shared factor of the release laws: the probability weight per eligible
/// placement of the last neighbor.
///
/// Evaluated as a running product of per-factor ratios so intermediates stay
/// near 1 for any `k`; a partial product that underflows to zero exits early
/// (the true value is below every useful tolerance there).
fn release_core(k: usize, d: usize, l: usize) -> f64 {
    debug_assert!(d >= 2 && l >= 1 && l <= k - d + 1);
    let df = d as f64;
    let kf = k as f64;
    let mut prod = df * (df - 1.0) / ((kf - df + 2.0) * (kf - df + 1.0));
    for j in 0..d - 2 {
        prod *= (k - l - 1 - j) as f64 / (k - j) as f64;
        if prod == 0.0 {
            return 0.0;
        }
    }
    prod
}

/// Exhaustive counting oracle for [`release_add_prob`] at integer ripple
/// sizes: enumerates all `C(k, d)` neighbor sets against a fixed processing
/// order and counts the release-and-add event directly. Independent of the
/// closed form. Only for `k <= 16`.
pub fn release_add_prob_oracle(k: usize, d: usize, l: usize, r: usize) -> Result<f64> {
    if k == 0 || k > 16 {
        return Err(Error::Unsupported(format!(
            "oracle enumerates 2^k subsets; k = {k} is outside 1..=16"
        )));
    }
    if d == 0 || d > k {
        return Err(Error::InvalidParameter(format!(
            "degree {d} out of range 1..={k}"
        )));
    }
    if d == 1 {
        // released on arrival, by definition
        return Ok(if l == k && r == 0 { 1.0 } else { 0.0 });
    }
    // zero branch, by definition
    if r < 1 || r > l || l > k - d + 1 {
        return Ok(0.0);
    }
    // Fixed processing order 0, 1, ..., k-1. At the release point:
    //   prefix   = indices 0 .. k-l-2   (processed before the release step)
    //   pivot    = index k-l-1          (processed at the release step)
    //   eligible = indices k-l .. k-r   (unprocessed, outside the ripple)
    //   ripple   = indices k-r+1 .. k-1 (unprocessed, inside the ripple)
    // The event: d-2 neighbors in the prefix, one at the pivot, one eligible.
    let pivot = k - l - 1;
    let mut hits = 0u64;
    let mut total = 0u64;
    for set in 0u32..1 << k {
        if set.count_ones() as usize != d {
            continue;
        }
        total += 1;
        if set & (1 << pivot) == 0 {
            continue;
        }
        let mut in_prefix = 0;
        let mut in_eligible = 0;
        let mut in_ripple = 0;
        for i in 0..k {
            if set & (1 << i) != 0 {
                if i < pivot {
                    in_prefix += 1;
                } else if i > pivot {
                    if i <= k - r {
                        in_eligible += 1;
                    } else {
                        in_ripple += 1;
                    }
                }
            }
        }
        if in_prefix == d - 2 && in_eligible == 1 && in_ripple == 0 {
            hits += 1;
        }
    }
    Ok(hits as f64 / total as f64)
}

/// Probability that a degree-`d` symbol ends up redundant when decoding with
/// a constant ripple size `r`: the complement of the release-and-add mass
/// summed over all release points (ascending `l`, for stable accumulation).
pub fn redundancy_prob(k: usize, d: usize, r: usize) -> Result<f64> {
    if k < 2 {
        return Err(Error::InvalidParameter("redundancy needs k >= 2".into()));
    }
    if r < 1 || r > k - 1 {
        return Err(Error::InvalidParameter(format!(
            "ripple size {r} out of range 1..={}",
            k - 1
        )));
    }
    if d < 2 || d > k - r + 1 {
        return Err(Error::InvalidParameter(format!(
            "degree {d} out of range 2..={} at ripple size {r}",
            k - r + 1
        )));
    }
    let sum: f64 = (r..=k - d + 1)
        .map(|l| release_add_prob(k, d, l, r as f64))
        .sum();
    Ok((1.0 - sum).clamp(0.0, 1.0))
}

/// Redundancy probability over every admissible `(d, r)` cell for a given
/// `k`; cells outside the domain hold `None`. Built by direct summation, so
/// it is meant for figure-scale `k` (hundreds, not tens of thousands).
#[derive(Debug, Clone)]
pub struct RedundancySurface {
    k: usize,
    /// Row-major: `(d - 2) * (k - 1) + (r - 1)`, d in 2..=k, r in 1..=k-1.
    values: Vec<Option<f64>>,
}

impl RedundancySurface {
    pub fn k(&self) -> usize {
        self.k
    }

    /// Value at `(d, r)`, or `None` outside the admissible domain.
    pub fn get(&self, d: usize, r: usize) -> Option<f64> {
        if d < 2 || d > self.k || r < 1 || r > self.k - 1 {
            return None;
        }
        self.values[(d - 2) * (self.k - 1) + (r - 1)]
    }

    /// All present cells as `(d, r, value)`, ascending by `d` then `r`.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let k = self.k;
        self.values.iter().enumerate().filter_map(move |(i, v)| {
            v.map(|value| (i / (k - 1) + 2, i % (k - 1) + 1, value))
        })
    }
}

pub fn redundancy_surface(k: usize) -> Result<RedundancySurface> {
    if k < 2 {
        return Err(Error::InvalidParameter("redundancy needs k >= 2".into()));
    }
    let mut values = vec![None; (k - 1) * (k - 1)];
    for d in 2..=k {
        for r in 1..=k - d + 1 {
            if r > k - 1 {
                break;
            }
            values[(d - 2) * (k - 1) + (r - 1)] = Some(redundancy_prob(k, d, r)?);
        }
    }
    Ok(RedundancySurface { k, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn release_add_prob_small_case_by_hand() {
        // k=4, d=2, l=3, r=1: 2 * 1 * (3-1+1) / (4*3) = 0.5
        assert!((release_add_prob(4, 2, 3, 1.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn degree_one_releases_on_arrival() {
        assert_eq!(release_add_prob(10, 1, 10, 0.0), 1.0);
        assert_eq!(release_add_prob(10, 1, 9, 0.0), 0.0);
        assert_eq!(release_add_prob(10, 1, 10, 1.0), 0.0);
        assert_eq!(release_prob(10, 1, 10), 1.0);
        assert_eq!(release_prob(10, 1, 9), 0.0);
    }

    #[test]
    fn zero_branch_outside_band() {
        assert_eq!(release_add_prob(100, 2, 101, 1.0), 0.0); // l beyond k
        assert_eq!(release_add_prob(100, 2, 100, 1.0), 0.0); // l = k with d >= 2
        assert_eq!(release_add_prob(100, 2, 50, 0.0), 0.0); // r below 1
        assert_eq!(release_add_prob(100, 2, 50, 51.0), 0.0); // r above l
        assert_eq!(release_add_prob(100, 101, 50, 1.0), 0.0); // d beyond k
        assert_eq!(release_prob(100, 2, 0), 0.0);
    }

    #[test]
    fn closed_form_matches_counting_oracle_exhaustively() {
        for k in 2..=8 {
            for d in 2..=k {
                for r in 1..=k - d + 1 {
                    for l in r..=k - d + 1 {
                        let formula = release_add_prob(k, d, l, r as f64);
                        let oracle = release_add_prob_oracle(k, d, l, r).unwrap();
                        assert!(
                            (formula - oracle).abs() <= 1e-12,
                            "k={k} d={d} l={l} r={r}: formula={formula} oracle={oracle}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn oracle_rejects_large_k() {
        assert!(matches!(
            release_add_prob_oracle(17, 2, 3, 1),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn release_law_sums_to_one() {
        for k in [4, 10, 100, 1024] {
            for d in [1, 2, 3, k / 2, k - 1, k] {
                let sum: f64 = (1..=k).map(|l| release_prob(k, d, l)).sum();
                assert!((sum - 1.0).abs() < 1e-9, "k={k} d={d}: sum={sum}");
            }
        }
    }

    #[test]
    fn release_prob_is_unit_ripple_release_add() {
        let k = 61;
        for d in 2..=k {
            for l in 1..=k - d + 1 {
                assert_eq!(release_prob(k, d, l), release_add_prob(k, d, l, 1.0));
            }
        }
    }

    #[test]
    fn redundancy_vanishes_at_unit_ripple() {
        for k in [10, 100] {
            for d in 2..=k {
                let r = redundancy_prob(k, d, 1).unwrap();
                assert!(r.abs() < 1e-9, "k={k} d={d}: r={r}");
            }
        }
    }

    #[test]
    fn redundancy_grows_with_ripple_size() {
        let k = 30;
        for d in 2..=k {
            let mut prev = 0.0;
            for r in 1..=k - d + 1 {
                if r > k - 1 {
                    break;
                }
                let cur = redundancy_prob(k, d, r).unwrap();
                assert!(
                    cur >= prev - 1e-12,
                    "k={k} d={d} r={r}: {cur} < {prev}"
                );
                prev = cur;
            }
        }
    }

    #[test]
    fn redundancy_domain_errors() {
        assert!(redundancy_prob(10, 1, 1).is_err());
        assert!(redundancy_prob(10, 2, 0).is_err());
        assert!(redundancy_prob(10, 2, 10).is_err());
        assert!(redundancy_prob(10, 8, 4).is_err()); // d > k - r + 1
        assert!(redundancy_prob(1, 2, 1).is_err());
    }

    #[test]
    fn surface_matches_pointwise_values() {
        let k = 24;
        let surf = redundancy_surface(k).unwrap();
        assert_eq!(surf.get(2, 1).unwrap(), redundancy_prob(k, 2, 1).unwrap());
        assert_eq!(
            surf.get(5, 10).unwrap(),
            redundancy_prob(k, 5, 10).unwrap()
        );
        assert_eq!(surf.get(24, 1).unwrap(), redundancy_prob(k, 24, 1).unwrap());
        // outside the domain
        assert_eq!(surf.get(24, 2), None);
        assert_eq!(surf.get(1, 1), None);
        assert_eq!(surf.get(2, 24), None);
        // every present cell is a probability
        for (d, r, v) in surf.cells() {
            assert!((0.0..=1.0).contains(&v), "({d},{r}) = {v}");
        }
    }

    #[test]
    fn evaluation_is_stable_at_extreme_degrees() {
        let k = 4096;
        // a degree-k symbol is certainly released at the last step
        assert!((release_add_prob(k, k, 1, 1.0) - 1.0).abs() < 1e-9);
        for d in [2, 100, 2048, 4095, 4096] {
            for l in [1, 2, k / 4, k - d + 1] {
                let p = release_prob(k, d, l);
                assert!(p.is_finite() && (0.0..=1.0 + 1e-12).contains(&p));
            }
        }
    }

    proptest! {
        #[test]
        fn release_add_prob_is_a_probability(
            k in 2usize..200,
            d in 2usize..200,
            l in 0usize..220,
            r in 0usize..220,
        ) {
            let q = release_add_prob(k, d, l, r as f64);
            prop_assert!(q.is_finite());
            prop_assert!((0.0..=1.0 + 1e-12).contains(&q));
            // the ripple-addition event is contained in the release event
            prop_assert!(q <= release_prob(k, d, l) + 1e-15);
        }
    }
}
