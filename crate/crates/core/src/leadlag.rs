// SPDX-License-Identifier: Apache-2.0

//! Lead-lag (Hoff) lift of a discretised path and its area counter-term.
//!
//! For samples `X_0..X_n` on `[0, 1]` the Hoff path in `R^{2d}` has knots
//!
//! ```text
//! t = 2i/2n     : (X_i, X_i)
//! t = (2i+1)/2n : (X_i, X_{i+1})
//! ```
//!
//! and is linear in between. The first `d` coordinates are the lag copy, the
//! last `d` the lead copy. At partition points `m/n, k/n` the cross block of its
//! Lévy area equals the area of `(Y, Y)` (with `Y` the piecewise-linear
//! interpolation) minus half the quadratic-variation sum
//! `Σ_r ΔX_r ⊗ ΔX_r`, whose mean is `n^{1-2H}/2` per unit time for fBm.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauss::{rng_from_seed, trial_seed, FbmMethod, FbmSampler, GridPath};
use crate::stats::Stat;
use crate::tensor2::{holder_distance, lift_piecewise_linear, LiftedPath, RenormTerm};

#[derive(Debug, Clone, PartialEq)]
pub struct LeadLagPath {
    n: usize,
    d: usize,
    times: Vec<f64>,
    knots: Vec<Vec<f64>>,
}

impl LeadLagPath {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Dimension of the underlying path (the Hoff path lives in `2d`).
    pub fn base_dim(&self) -> usize {
        self.d
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn knots(&self) -> &[Vec<f64>] {
        &self.knots
    }

    pub fn lag(&self, j: usize) -> &[f64] {
        &self.knots[j][..self.d]
    }

    pub fn lead(&self, j: usize) -> &[f64] {
        &self.knots[j][self.d..]
    }

    pub fn lift(&self) -> Result<LiftedPath> {
        lift_piecewise_linear(&self.times, &self.knots)
    }
}

/// Build the Hoff path of `samples = (X_0, ..., X_n)` on `[0, 1]`.
pub fn hoff_path<P: AsRef<[f64]>>(samples: &[P]) -> Result<LeadLagPath> {
    if samples.len() < 2 {
        return Err(Error::TooFewPoints {
            needed: 2,
            found: samples.len(),
        });
    }
    let n = samples.len() - 1;
    let d = samples[0].as_ref().len();
    if let Some(s) = samples.iter().find(|s| s.as_ref().len() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: s.as_ref().len(),
        });
    }
    let knot = |lag: &[f64], lead: &[f64]| -> Vec<f64> { lag.iter().chain(lead).copied().collect() };
    let mut knots = Vec::with_capacity(2 * n + 1);
    for i in 0..n {
        let (x, y) = (samples[i].as_ref(), samples[i + 1].as_ref());
        knots.push(knot(x, x));
        knots.push(knot(x, y));
    }
    let last = samples[n].as_ref();
    knots.push(knot(last, last));
    let times = (0..=2 * n).map(|j| j as f64 / (2 * n) as f64).collect();
    Ok(LeadLagPath { n, d, times, knots })
}

/// Counter-term for the lead-lag lift at resolution `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct LeadLagRenorm {
    pub hurst: f64,
    pub n: usize,
    /// `n^{1-2H} / 2`.
    pub v_scalar: f64,
    /// Block matrix `[[0, vI], [-vI, 0]]` in `R^{2d × 2d}`: adds `(t - s) v` to the
    /// lag-lead block, cancelling the `-½ Σ ΔX ⊗ ΔX` drift of that block.
    pub v_tilde: RenormTerm,
}

pub fn leadlag_renorm(hurst: f64, n: usize, d: usize) -> Result<LeadLagRenorm> {
    if !(hurst > 0.0 && hurst < 1.0) {
        return Err(Error::InvalidParameter(format!("Hurst parameter {hurst} outside (0, 1)")));
    }
    if n == 0 || d == 0 {
        return Err(Error::InvalidParameter("lead-lag counter-term needs n ≥ 1 and d ≥ 1".into()));
    }
    let v_scalar = (n as f64).powf(1.0 - 2.0 * hurst) / 2.0;
    let mut m = DMatrix::zeros(2 * d, 2 * d);
    for i in 0..d {
        m[(i, d + i)] = v_scalar;
        m[(d + i, i)] = -v_scalar;
    }
    Ok(LeadLagRenorm {
        hurst,
        n,
        v_scalar,
        v_tilde: RenormTerm::new(m)?,
    })
}

/// Lévy area of the Hoff lift between partition points `m/n` and `k/n`,
/// evaluated from the discrete sums (no path integration).
pub fn leadlag_area_oracle<P: AsRef<[f64]>>(samples: &[P], m: usize, k: usize) -> Result<DMatrix<f64>> {
    let n = samples.len().checked_sub(1).ok_or(Error::TooFewPoints { needed: 2, found: 0 })?;
    if m > k || k > n {
        return Err(Error::IndexOutOfRange(format!(
            "partition pair ({m}, {k}) with n = {n}"
        )));
    }
    let d = samples[0].as_ref().len();
    let x = |r: usize, i: usize| samples[r].as_ref()[i];
    // Lévy area of (Y, Y) between lag/lead copies is the area of Y itself.
    let mut y = DMatrix::<f64>::zeros(d, d);
    let mut qv = DMatrix::<f64>::zeros(d, d);
    for r in m..k {
        for i in 0..d {
            let di = x(r + 1, i) - x(r, i);
            for j in 0..d {
                let dj = x(r + 1, j) - x(r, j);
                y[(i, j)] += 0.5 * ((x(r, i) - x(m, i)) * dj - (x(r, j) - x(m, j)) * di);
                qv[(i, j)] += di * dj;
            }
        }
    }
    let mut area = DMatrix::zeros(2 * d, 2 * d);
    for i in 0..d {
        for j in 0..d {
            area[(i, j)] = y[(i, j)];
            area[(d + i, d + j)] = y[(i, j)];
            // lag i, lead j
            area[(i, d + j)] = y[(i, j)] - 0.5 * qv[(i, j)];
            // lead i, lag j: antisymmetry of the lag-lead entry (j, d + i)
            area[(d + i, j)] = y[(i, j)] + 0.5 * qv[(j, i)];
        }
    }
    Ok(area)
}

fn rho_sq(x: i64, hurst: f64) -> f64 {
    let h2 = 2.0 * hurst;
    let x = x.abs() as f64;
    let r = (x + 1.0).powf(h2) + (x - 1.0).abs().powf(h2) - 2.0 * x.powf(h2);
    r * r
}

fn check_psi_args(n: usize, k: usize, hurst: f64) -> Result<()> {
    if !(hurst > 0.0 && hurst < 1.0) {
        return Err(Error::InvalidParameter(format!("Hurst parameter {hurst} outside (0, 1)")));
    }
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!("ψ needs 1 ≤ K ≤ n, got K = {k}, n = {n}")));
    }
    Ok(())
}

/// `ψ(n, K) = n^{-4H}/4 · Σ_{|x|<K} (K - |x|) (|x+1|^{2H} + |x-1|^{2H} - 2|x|^{2H})²`,
/// the second moment of a `K`-block of the off-diagonal quadratic-variation sum.
pub fn psi_closed(n: usize, k: usize, hurst: f64) -> Result<f64> {
    check_psi_args(n, k, hurst)?;
    let k = k as i64;
    let mut s = k as f64 * rho_sq(0, hurst);
    for x in 1..k {
        s += 2.0 * (k - x) as f64 * rho_sq(x, hurst);
    }
    Ok((n as f64).powf(-4.0 * hurst) / 4.0 * s)
}

/// `C · K · n^{-4H}`.
pub fn psi_bound(n: usize, k: usize, hurst: f64, constant: f64) -> f64 {
    constant * k as f64 * (n as f64).powf(-4.0 * hurst)
}

/// Validated constant in `ψ(n, K) ≤ C K n^{-4H}` for `H ∈ [0.3, 0.5]`.
pub const PSI_CONSTANT: f64 = 2.0;

/// Prefix table of the ψ sum for all `K ≤ k_max`, so that a sweep over every
/// `(n, K)` costs O(1) per entry.
#[derive(Debug, Clone)]
pub struct PsiTable {
    hurst: f64,
    sums: Vec<f64>,
}

impl PsiTable {
    pub fn new(hurst: f64, k_max: usize) -> Result<Self> {
        check_psi_args(k_max.max(1), 1, hurst)?;
        // S(K) = Σ_{|x|<K} (K - |x|) ρ(x)², S(K+1) = S(K) + Σ_{|x|≤K} ρ(x)²
        let mut sums = vec![0.0; k_max + 1];
        let mut window = 0.0;
        for k in 1..=k_max {
            let x = (k - 1) as i64;
            window += if x == 0 { rho_sq(0, hurst) } else { 2.0 * rho_sq(x, hurst) };
            sums[k] = sums[k - 1] + window;
        }
        Ok(Self { hurst, sums })
    }

    pub fn k_max(&self) -> usize {
        self.sums.len() - 1
    }

    pub fn psi(&self, n: usize, k: usize) -> f64 {
        (n as f64).powf(-4.0 * self.hurst) / 4.0 * self.sums[k]
    }
}

fn default_method() -> FbmMethod {
    FbmMethod::Circulant
}

fn default_true() -> bool {
    true
}

fn default_trials() -> usize {
    64
}

fn default_nref() -> usize {
    4096
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct LeadLagConfig {
    pub d: usize,
    pub hurst: f64,
    pub alpha: f64,
    pub n_schedule: Vec<usize>,
    #[serde(default = "default_nref")]
    pub n_ref: usize,
    #[serde(default = "default_trials")]
    pub mc_trials: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default = "default_method")]
    pub method: FbmMethod,
    /// Enforce `1/4 < H ≤ 1/2` and `α < H`, the hypotheses of the convergence result.
    #[serde(default = "default_true")]
    pub theorem_mode: bool,
}

impl LeadLagConfig {
    pub fn validate(&self) -> Result<()> {
        let reject = |msg: String| Err(Error::Config(msg));
        if self.d == 0 {
            return reject("d must be at least 1".into());
        }
        if !(self.hurst > 0.0 && self.hurst < 1.0) {
            return reject(format!("hurst = {} outside (0, 1)", self.hurst));
        }
        if self.theorem_mode && !(self.hurst > 0.25 && self.hurst <= 0.5) {
            return reject(format!(
                "hurst = {} violates the lead-lag convergence hypothesis 1/4 < H <= 1/2",
                self.hurst
            ));
        }
        if !(self.alpha >= 0.0 && self.alpha < 0.5) {
            return reject(format!("alpha = {} outside [0, 1/2)", self.alpha));
        }
        if self.theorem_mode && self.alpha >= self.hurst {
            return reject(format!(
                "alpha = {} violates the Hölder window alpha < H = {}",
                self.alpha, self.hurst
            ));
        }
        if self.n_schedule.is_empty() {
            return reject("nSchedule is empty".into());
        }
        if self.n_schedule.windows(2).any(|w| w[1] <= w[0]) || self.n_schedule[0] == 0 {
            return reject("nSchedule must be positive and strictly increasing".into());
        }
        let n_min = self.n_schedule[0];
        let n_max = *self.n_schedule.last().unwrap();
        if let Some(n) = self.n_schedule.iter().find(|&&n| n % n_min != 0) {
            return reject(format!("n = {n} is not a multiple of the coarsest resolution {n_min}"));
        }
        if self.n_ref < 4 * n_max {
            return reject(format!("nRef = {} must be at least 4 * max(nSchedule) = {}", self.n_ref, 4 * n_max));
        }
        if let Some(n) = self.n_schedule.iter().find(|&&n| self.n_ref % n != 0) {
            return reject(format!("nRef = {} is not a multiple of n = {n}", self.n_ref));
        }
        if self.mc_trials == 0 {
            return reject("mcTrials must be at least 1".into());
        }
        Ok(())
    }
}

/// Per-resolution statistics of one trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LeadLagPoint {
    pub n: usize,
    pub v_scalar: f64,
    pub dist_renorm: f64,
    pub dist_raw: f64,
    /// Mean over components of the lead-minus-lag cross area deviation at `(0, 1)`;
    /// its expectation is `n^{1-2H}/2`.
    pub area_dev1: f64,
}

/// Holds the reference-resolution fBm sampler so repeated trials reuse the FFT plan.
#[derive(Debug)]
pub struct LeadLagRunner {
    cfg: LeadLagConfig,
    sampler: FbmSampler,
}

impl LeadLagRunner {
    pub fn new(cfg: &LeadLagConfig) -> Result<Self> {
        cfg.validate()?;
        let sampler = FbmSampler::new(cfg.n_ref, cfg.hurst, 1.0, cfg.method)?;
        Ok(Self {
            cfg: cfg.clone(),
            sampler,
        })
    }

    pub fn method(&self) -> FbmMethod {
        self.sampler.method()
    }

    /// Draw the reference fBm path for a trial.
    pub fn sample(&self, trial: usize) -> Result<GridPath> {
        let mut rng = rng_from_seed(trial_seed(self.cfg.base_seed, 0, trial));
        self.sampler.sample_path(&mut rng, self.cfg.d)
    }

    pub fn run_trial(&self, trial: usize) -> Result<Vec<LeadLagPoint>> {
        let path = self.sample(trial)?;
        leadlag_points(&self.cfg, &path)
    }
}

/// Compare every schedule resolution against the reference lift of `(Y, Y)`
/// built from the same `n_ref` draw, on the coarsest schedule grid.
pub fn leadlag_points(cfg: &LeadLagConfig, path: &GridPath) -> Result<Vec<LeadLagPoint>> {
    let d = cfg.d;
    let n_ref = path.len() - 1;
    let n_min = cfg.n_schedule[0];

    let doubled: Vec<Vec<f64>> = path.values().iter().map(|x| x.iter().chain(x).copied().collect()).collect();
    let reference = lift_piecewise_linear(path.times(), &doubled)?;
    let ref_idx: Vec<usize> = (0..=n_min).map(|k| k * (n_ref / n_min)).collect();
    let reference = reference.restrict(&ref_idx)?;
    let ref_area = reference.interval(0, n_min).levy_area();

    cfg.n_schedule
        .iter()
        .map(|&n| {
            let sub = path.subsample(n_ref / n)?;
            let hoff = hoff_path(sub.values())?.lift()?;
            let idx: Vec<usize> = (0..=n_min).map(|k| 2 * k * (n / n_min)).collect();
            let hoff = hoff.restrict(&idx)?;
            let renorm = leadlag_renorm(cfg.hurst, n, d)?;
            let dist_raw = holder_distance(&hoff, &reference, cfg.alpha)?;
            let dist_renorm = holder_distance(&hoff.translate(&renorm.v_tilde)?, &reference, cfg.alpha)?;
            let area = hoff.interval(0, n_min).levy_area();
            let area_dev1 = (0..d).map(|i| ref_area[(i, d + i)] - area[(i, d + i)]).sum::<f64>() / d as f64;
            Ok(LeadLagPoint {
                n,
                v_scalar: renorm.v_scalar,
                dist_renorm,
                dist_raw,
                area_dev1,
            })
        })
        .collect()
}

pub fn run_leadlag_trial(cfg: &LeadLagConfig, trial: usize) -> Result<Vec<LeadLagPoint>> {
    LeadLagRunner::new(cfg)?.run_trial(trial)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LeadLagRow {
    pub n: usize,
    pub v_scalar: f64,
    pub dist_renorm: Stat,
    pub dist_raw: Stat,
    pub area_dev1: Stat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LeadLagTable {
    pub rows: Vec<LeadLagRow>,
    pub method: FbmMethod,
}

pub fn leadlag_experiment(cfg: &LeadLagConfig) -> Result<LeadLagTable> {
    let runner = LeadLagRunner::new(cfg)?;
    let trials: Vec<Vec<LeadLagPoint>> = (0..cfg.mc_trials)
        .into_par_iter()
        .map(|t| runner.run_trial(t))
        .collect::<Result<_>>()?;
    let rows = cfg
        .n_schedule
        .iter()
        .enumerate()
        .map(|(p, &n)| {
            let col = |f: fn(&LeadLagPoint) -> f64| -> Stat {
                Stat::from_samples(&trials.iter().map(|t| f(&t[p])).collect::<Vec<_>>())
            };
            LeadLagRow {
                n,
                v_scalar: trials[0][p].v_scalar,
                dist_renorm: col(|x| x.dist_renorm),
                dist_raw: col(|x| x.dist_raw),
                area_dev1: col(|x| x.area_dev1),
            }
        })
        .collect();
    Ok(LeadLagTable {
        rows,
        method: runner.method(),
    })
}
