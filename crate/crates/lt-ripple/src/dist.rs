//! Degree distributions for LT encoding.
//!
//! Provides the two classical soliton families (ideal and robust), a fast
//! sampler, and a sparse JSON file format for exchanging distributions.

use crate::error::{Error, Result};
use rand::{Rng, RngExt};
use serde::{Deserialize, Serialize};

/// Constructors must normalize to within this tolerance.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// Files are accepted if their probabilities sum to 1 within this tolerance,
/// which admits hand-entered tables rounded to a few decimals.
pub const LOAD_NORMALIZATION_TOL: f64 = 1e-6;

/// Probability mass over symbol degrees `1..=k`.
///
/// Invariants, checked on construction: `k >= 1`, every mass is finite and
/// nonnegative, and the total mass is 1 within [`NORMALIZATION_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeDistribution {
    k: usize,
    mass: Vec<f64>, // index d-1
}

impl DegreeDistribution {
    pub fn new(k: usize, mass: Vec<f64>) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("k must be >= 1".into()));
        }
        if mass.len() != k {
            return Err(Error::InvalidParameter(format!(
                "mass vector has {} entries, expected k = {k}",
                mass.len()
            )));
        }
        for (i, &p) in mass.iter().enumerate() {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "mass at degree {} is {p}, must be finite and nonnegative",
                    i + 1
                )));
            }
        }
        let sum: f64 = mass.iter().sum();
        if (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidParameter(format!(
                "masses sum to {sum}, outside 1 +/- {NORMALIZATION_TOL:e}"
            )));
        }
        Ok(Self { k, mass })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Mass at degree `d`; zero outside `1..=k`.
    pub fn mass(&self, d: usize) -> f64 {
        if d >= 1 && d <= self.k {
            self.mass[d - 1]
        } else {
            0.0
        }
    }

    /// Dense mass vector, index `d - 1`.
    pub fn masses(&self) -> &[f64] {
        &self.mass
    }

    /// Nonzero `(degree, mass)` pairs, ascending by degree.
    pub fn support(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.mass
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(i, &p)| (i + 1, p))
    }

    pub fn support_len(&self) -> usize {
        self.support().count()
    }

    pub fn mean_degree(&self) -> f64 {
        self.support().map(|(d, p)| d as f64 * p).sum()
    }

    /// Largest degree with nonzero mass.
    pub fn max_degree(&self) -> usize {
        self.support().map(|(d, _)| d).max().unwrap_or(0)
    }
}

/// Ideal soliton distribution: `rho(1) = 1/k`, `rho(d) = 1/(d(d-1))` for
/// `d = 2..=k`. The masses telescope to exactly 1.
pub fn ideal_soliton(k: usize) -> Result<DegreeDistribution> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be >= 1".into()));
    }
    DegreeDistribution::new(k, ideal_mass(k))
}

fn ideal_mass(k: usize) -> Vec<f64> {
    let mut mass = vec![0.0; k];
    mass[0] = 1.0 / k as f64;
    for d in 2..=k {
        mass[d - 1] = 1.0 / (d as f64 * (d - 1) as f64);
    }
    mass
}

/// Parameters of the robust soliton family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RsdParams {
    pub c: f64,
    pub delta: f64,
}

/// Scale quantities of a robust soliton distribution: the expected ripple
/// scale `S = c * ln(k/delta) * sqrt(k)` and the spike position `ceil(k/S)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RsdScale {
    pub s: f64,
    pub spike: usize,
}

pub fn rsd_scale(k: usize, params: &RsdParams) -> Result<RsdScale> {
    if k < 2 {
        return Err(Error::InvalidParameter("robust soliton needs k >= 2".into()));
    }
    if !(params.c > 0.0) || !params.c.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "c must be positive and finite, got {}",
            params.c
        )));
    }
    if !(params.delta > 0.0) || !params.delta.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "delta must be positive and finite, got {}",
            params.delta
        )));
    }
    let kf = k as f64;
    let s = params.c * (kf / params.delta).ln() * kf.sqrt();
    if !(s > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "scale S = c*ln(k/delta)*sqrt(k) = {s} is not positive (delta must be < k)"
        )));
    }
    let spike_f = (kf / s).ceil();
    if spike_f > kf {
        return Err(Error::InvalidParameter(format!(
            "spike position ceil(k/S) = {spike_f} exceeds k = {k}; increase c or delta"
        )));
    }
    Ok(RsdScale {
        s,
        spike: spike_f as usize,
    })
}

/// Robust soliton distribution: normalize `rho(d) + tau(d)` where `tau` adds
/// `S/(k d)` below the spike and `S ln(S/delta)/k` at the spike. A negative
/// spike term (when `S < delta`) is clamped to zero.
pub fn robust_soliton(k: usize, params: &RsdParams) -> Result<DegreeDistribution> {
    let scale = rsd_scale(k, params)?;
    let kf = k as f64;
    let mut tau = vec![0.0; k];
    for d in 1..scale.spike {
        tau[d - 1] = scale.s / (kf * d as f64);
    }
    tau[scale.spike - 1] = (scale.s * (scale.s / params.delta).ln() / kf).max(0.0);
    soliton_mix(k, &tau)
}

/// Normalized mixture of the ideal soliton mass with an additive `tau` term.
/// With `tau = 0` this reduces to the ideal soliton exactly.
fn soliton_mix(k: usize, tau: &[f64]) -> Result<DegreeDistribution> {
    let rho = ideal_mass(k);
    let beta: f64 = rho.iter().sum::<f64>() + tau.iter().sum::<f64>();
    let mass: Vec<f64> = rho
        .iter()
        .zip(tau.iter())
        .map(|(&r, &t)| (r + t) / beta)
        .collect();
    DegreeDistribution::new(k, mass)
}

/// Inverse-CDF sampler over a distribution's support.
#[derive(Debug, Clone)]
pub struct DegreeSampler {
    degrees: Vec<u32>,
    cum: Vec<f64>,
}

impl DegreeSampler {
    pub fn new(dist: &DegreeDistribution) -> Self {
        let mut degrees = Vec::with_capacity(dist.support_len());
        let mut cum = Vec::with_capacity(dist.support_len());
        let mut acc = 0.0;
        for (d, p) in dist.support() {
            acc += p;
            degrees.push(d as u32);
            cum.push(acc);
        }
        Self { degrees, cum }
    }

    /// Draw one degree. Deterministic given the stream state.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let total = *self.cum.last().expect("sampler over empty support");
        let u: f64 = rng.random::<f64>() * total;
        let idx = self.cum.partition_point(|&c| c <= u);
        self.degrees[idx.min(self.degrees.len() - 1)] as usize
    }
}

#[derive(Serialize, Deserialize)]
struct FileEntry {
    d: usize,
    p: f64,
}

#[derive(Serialize, Deserialize)]
struct FileModel {
    k: usize,
    entries: Vec<FileEntry>,
}

/// Serialize a distribution to the sparse JSON format
/// `{"k": .., "entries": [{"d": .., "p": ..}, ..]}`. Probabilities are
/// written in shortest round-trip form, so `load_distribution` reconstructs
/// the exact stored values.
pub fn save_distribution(dist: &DegreeDistribution) -> String {
    let model = FileModel {
        k: dist.k(),
        entries: dist
            .support()
            .map(|(d, p)| FileEntry { d, p })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&model).expect("distribution serializes");
    text.push('\n');
    text
}

/// Parse and validate a distribution file.
///
/// Degrees must be unique and within `1..=k`, probabilities finite and
/// nonnegative, and the total within [`LOAD_NORMALIZATION_TOL`] of 1. A total
/// that is off by more than the construction tolerance (a rounded table) is
/// renormalized; otherwise the stored values are kept bit-exact.
pub fn load_distribution(text: &str) -> Result<DegreeDistribution> {
    let model: FileModel = serde_json::from_str(text)?;
    if model.k == 0 {
        return Err(Error::Format("k must be >= 1".into()));
    }
    if model.entries.is_empty() {
        return Err(Error::Format("empty degree list".into()));
    }
    let mut mass = vec![0.0; model.k];
    for e in &model.entries {
        if e.d < 1 || e.d > model.k {
            return Err(Error::Format(format!(
                "degree {} out of range 1..={}",
                e.d, model.k
            )));
        }
        if !e.p.is_finite() || e.p < 0.0 {
            return Err(Error::Format(format!(
                "probability {} at degree {} must be finite and nonnegative",
                e.p, e.d
            )));
        }
        if mass[e.d - 1] != 0.0 {
            return Err(Error::Format(format!("duplicate entry for degree {}", e.d)));
        }
        mass[e.d - 1] = e.p;
    }
    let sum: f64 = mass.iter().sum();
    if (sum - 1.0).abs() > LOAD_NORMALIZATION_TOL {
        return Err(Error::Format(format!(
            "probabilities sum to {sum}, outside 1 +/- {LOAD_NORMALIZATION_TOL:e}"
        )));
    }
    if (sum - 1.0).abs() > NORMALIZATION_TOL {
        for p in &mut mass {
            *p /= sum;
        }
    }
    DegreeDistribution::new(model.k, mass)
}
