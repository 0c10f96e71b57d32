//! Degree distribution design from a target ripple evolution.
//!
//! Pick how large the ripple should be at every stage of decoding, express
//! the per-step ripple additions that evolution needs, and solve a
//! nonnegative least squares system over the release-and-add probabilities
//! to find the degree distribution (and expected symbol count) that delivers
//! them.

use crate::dist::DegreeDistribution;
use crate::error::{Error, Result};
use crate::nnls::nnls;
use crate::release::release_add_prob;
use nalgebra::{DMatrix, DVector};

/// Target ripple size as a function of the remaining unprocessed symbols:
/// `R(L) = min(c1 * L^(1/c2), L)`.
///
/// `R(0) = 0`, and `R(L) = 0 for L > k` by convention: the design system's
/// first row describes the initial ripple, built when no symbol has been
/// processed yet and the ripple therefore has nothing it could have carried
/// over.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RippleTarget {
    k: usize,
    c1: f64,
    c2: f64,
}

impl RippleTarget {
    pub fn new(k: usize, c1: f64, c2: f64) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidParameter("design needs k >= 2".into()));
        }
        if !(c1 > 0.0) || !c1.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "c1 must be positive and finite, got {c1}"
            )));
        }
        if !(c2 >= 2.0) || !c2.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "c2 must be >= 2 and finite, got {c2}"
            )));
        }
        Ok(Self { k, c1, c2 })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn c2(&self) -> f64 {
        self.c2
    }

    /// Target ripple size with `l` symbols remaining.
    pub fn ripple(&self, l: usize) -> f64 {
        if l == 0 || l > self.k {
            return 0.0;
        }
        let lf = l as f64;
        (self.c1 * lf.powf(1.0 / self.c2)).min(lf)
    }

    /// Expected ripple additions per decoding stage: `Q(L)` for `L = k`
    /// down to `0`. `Q(k) = R(k)` seeds the initial ripple; each later step
    /// consumes one ripple symbol, so stage `L` must add
    /// `R(L) - R(L+1) + 1` on average. Before clamping, the entries
    /// telescope to exactly `k`.
    pub fn additions(&self) -> Vec<f64> {
        additions_for(self.k, |l| self.ripple(l))
    }
}

/// `Q` vector for an arbitrary ripple evolution (hook for synthetic
/// targets). Index `i` holds `Q(k - i)`. Negative entries (a target that
/// falls faster than one per step) are clamped to zero.
pub fn additions_for(k: usize, ripple: impl Fn(usize) -> f64) -> Vec<f64> {
    let mut q = Vec::with_capacity(k + 1);
    q.push(ripple(k));
    for l in (0..k).rev() {
        q.push((ripple(l) - ripple(l + 1) + 1.0).max(0.0));
    }
    q
}

/// Release-and-add probability matrix of the design system. The row for `L`
/// (descending from `k`) and column for degree `d` holds the probability
/// that a degree-`d` symbol is released with `L` remaining and adds to the
/// ripple, evaluated at the target ripple size `R(L+1)` left by the
/// previous stage. The row for `L = k` reduces to `[1, 0, .., 0]`: only
/// degree-1 symbols can seed the initial ripple.
pub fn build_release_matrix(t: &RippleTarget) -> DMatrix<f64> {
    let k = t.k();
    DMatrix::from_fn(k, k, |i, j| {
        let l = k - i;
        release_add_prob(k, j + 1, l, t.ripple(l + 1))
    })
}

/// A designed degree distribution with its diagnostics.
#[derive(Debug, Clone)]
pub struct DesignSolution {
    pub distribution: DegreeDistribution,
    /// Expected number of symbols a decoder should collect: the total raw
    /// solver weight. The distribution is the raw weights over this total.
    pub n_expected: f64,
    /// Squared residual norm of the design system at the solution.
    pub residual_sq_norm: f64,
    /// Right-hand side `Q(L)`, `L = k..1`.
    pub target_additions: Vec<f64>,
    /// `A x` at the solution, same rows.
    pub achieved_additions: Vec<f64>,
}

/// Solve the design system for a target ripple evolution.
///
/// Rows cover `L = k..1`; the `L = 0` stage needs no additions and is
/// excluded. Raw weights below `1e-12` of their total are zeroed before
/// normalizing into a distribution.
pub fn design(t: &RippleTarget) -> Result<DesignSolution> {
    let k = t.k();
    let a = build_release_matrix(t);
    let q = t.additions();
    let b = DVector::from_iterator(k, q[..k].iter().copied());
    let sol = nnls(&a, &b)?;
    let n_expected: f64 = sol.x.iter().sum();
    if !(n_expected > 0.0) {
        return Err(Error::DegenerateDesign(
            "solver returned the zero vector; the target admits no symbols".into(),
        ));
    }
    let achieved: Vec<f64> = (&a * DVector::from_column_slice(&sol.x))
        .iter()
        .copied()
        .collect();
    let mut mass: Vec<f64> = sol
        .x
        .iter()
        .map(|&v| if v < 1e-12 * n_expected { 0.0 } else { v })
        .collect();
    let total: f64 = mass.iter().sum();
    for m in &mut mass {
        *m /= total;
    }
    let distribution = DegreeDistribution::new(k, mass)?;
    Ok(DesignSolution {
        distribution,
        n_expected,
        residual_sq_norm: sol.residual_sq_norm,
        target_additions: q[..k].to_vec(),
        achieved_additions: achieved,
    })
}
