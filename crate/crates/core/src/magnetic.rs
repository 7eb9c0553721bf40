// SPDX-License-Identifier: Apache-2.0

//! Small-mass limit with a strong magnetic field.
//!
//! The momentum `P` solves `ε² dP = -M P dt + ε² dW` (after the diffusive
//! rescaling) with `M = A - ε^{-β} B0`, and `Z = W - P`. The lifts of `P` and `Z`
//! pick up a deterministic area drift `-(t - s) v`; translating by the counter-term
//! `v` removes it, so `T_v(P) → 0` and `T_v(Z) → W` as `ε → 0`.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauss::{derive_seed, required_steps, trial_seed, uniform_grid, PhysicalStepper, DEFAULT_STEP_FACTOR};
use crate::linalg::{renorm_v, StableDrift};
use crate::stats::Stat;
use crate::tensor2::{holder_distance, lift_piecewise_linear, LiftedPath, RenormTerm, RunningLift};

fn default_grid() -> usize {
    256
}

fn default_trials() -> usize {
    64
}

fn default_horizon() -> f64 {
    1.0
}

fn default_step_factor() -> f64 {
    DEFAULT_STEP_FACTOR
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct MagneticConfig {
    pub d: usize,
    /// Symmetric positive definite friction, row-major.
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    /// Antisymmetric field shape, row-major; the field is `ε^{-β} B0`.
    #[serde(rename = "B0")]
    pub b0: Vec<Vec<f64>>,
    pub beta: f64,
    pub eps_schedule: Vec<f64>,
    #[serde(default = "default_horizon", alias = "T")]
    pub horizon: f64,
    pub alpha: f64,
    /// Number of output intervals on which distances are measured.
    #[serde(default = "default_grid")]
    pub grid_n: usize,
    #[serde(default = "default_trials")]
    pub mc_trials: usize,
    #[serde(default)]
    pub base_seed: u64,
    /// Fine step `h ≤ stepFactor · ε² / |M|_F`.
    #[serde(default = "default_step_factor")]
    pub step_factor: f64,
}

fn to_matrix(rows: &[Vec<f64>], d: usize, name: &str) -> Result<DMatrix<f64>> {
    if rows.len() != d || rows.iter().any(|r| r.len() != d) {
        return Err(Error::Config(format!("{name} must be a {d}x{d} row-major array")));
    }
    Ok(DMatrix::from_fn(d, d, |i, j| rows[i][j]))
}

impl MagneticConfig {
    pub fn a_matrix(&self) -> Result<DMatrix<f64>> {
        to_matrix(&self.a, self.d, "A")
    }

    pub fn b0_matrix(&self) -> Result<DMatrix<f64>> {
        to_matrix(&self.b0, self.d, "B0")
    }

    pub fn validate(&self) -> Result<()> {
        let reject = |msg: String| Err(Error::Config(msg));
        if self.d == 0 {
            return reject("d must be at least 1".into());
        }
        StableDrift::new(self.a_matrix()?, self.b0_matrix()?)
            .map_err(|e| Error::Config(format!("invalid drift: {e}")))?;
        if !(self.beta >= 0.0 && self.beta < 1.0) {
            return reject(format!(
                "beta = {} violates the field growth bound 0 <= beta < 1",
                self.beta
            ));
        }
        let alpha_max = 0.5 - self.beta / 4.0;
        if !(self.alpha >= 0.0 && self.alpha < alpha_max) {
            return reject(format!(
                "alpha = {} violates the Hölder window 0 <= alpha < 1/2 - beta/4 = {alpha_max}",
                self.alpha
            ));
        }
        if self.eps_schedule.is_empty() {
            return reject("epsSchedule is empty".into());
        }
        if self.eps_schedule.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
            return reject("epsSchedule entries must be positive and finite".into());
        }
        if self.eps_schedule.windows(2).any(|w| w[1] >= w[0]) {
            return reject("epsSchedule must be strictly decreasing".into());
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return reject(format!("horizon T = {} must be positive", self.horizon));
        }
        if self.grid_n == 0 {
            return reject("gridN must be at least 1".into());
        }
        if self.mc_trials == 0 {
            return reject("mcTrials must be at least 1".into());
        }
        if !(self.step_factor > 0.0 && self.step_factor <= DEFAULT_STEP_FACTOR) {
            return reject(format!(
                "stepFactor = {} outside (0, {DEFAULT_STEP_FACTOR}]",
                self.step_factor
            ));
        }
        Ok(())
    }
}

/// `M = A - ε^{-β} B0`.
pub fn drift_at(cfg: &MagneticConfig, eps: f64) -> Result<StableDrift> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidParameter(format!("ε must be positive, got {eps}")));
    }
    StableDrift::new(cfg.a_matrix()?, cfg.b0_matrix()? * eps.powf(-cfg.beta))
}

/// Fine simulation steps for `eps`: a multiple of `gridN` satisfying the step rule.
pub fn fine_steps(cfg: &MagneticConfig, eps: f64) -> Result<usize> {
    let required = required_steps(&drift_at(cfg, eps)?, eps, cfg.horizon, cfg.step_factor);
    Ok(cfg.grid_n * required.div_ceil(cfg.grid_n))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TrialResult {
    pub eps: f64,
    pub dist_p_renorm: f64,
    pub dist_p_raw: f64,
    pub dist_z_renorm: f64,
    pub dist_z_raw: f64,
    /// `|ℤ_{0,T} - 𝕎_{0,T}|_F` on level 2, without the counter-term.
    pub area_dev1: f64,
    pub v_norm: f64,
}

/// Lifts of `P`, `W` and `Z = W - P` on the output grid, integrated on the fine grid.
#[derive(Debug, Clone)]
pub struct MagneticLifts {
    pub p: LiftedPath,
    pub w: LiftedPath,
    pub z: LiftedPath,
    pub fine_steps: usize,
}

pub fn trial_rng_seed(cfg: &MagneticConfig, eps: f64, trial: usize) -> u64 {
    trial_seed(derive_seed(cfg.base_seed, eps.to_bits()), 0, trial)
}

/// Simulate one trial, streaming fine increments into the lifts.
pub fn magnetic_lifts(cfg: &MagneticConfig, eps: f64, trial: usize) -> Result<MagneticLifts> {
    let drift = drift_at(cfg, eps)?;
    let n = fine_steps(cfg, eps)?;
    let stride = n / cfg.grid_n;
    let d = cfg.d;
    let mut stepper = PhysicalStepper::new(&drift, eps, cfg.horizon / n as f64, trial_rng_seed(cfg, eps, trial))?;
    let (mut lp, mut lw, mut lz) = (RunningLift::new(d), RunningLift::new(d), RunningLift::new(d));
    let (mut dp, mut dw, mut dz) = (vec![0.0; d], vec![0.0; d], vec![0.0; d]);
    let snap = |l: &RunningLift| l.snapshot();
    let (mut sp, mut sw, mut sz) = (vec![snap(&lp)], vec![snap(&lw)], vec![snap(&lz)]);
    for k in 1..=n {
        stepper.advance(&mut dp, &mut dw);
        for i in 0..d {
            dz[i] = dw[i] - dp[i];
        }
        lp.push(&dp);
        lw.push(&dw);
        lz.push(&dz);
        if k % stride == 0 {
            sp.push(snap(&lp));
            sw.push(snap(&lw));
            sz.push(snap(&lz));
        }
    }
    let times = uniform_grid(cfg.horizon, cfg.grid_n);
    Ok(MagneticLifts {
        p: LiftedPath::from_running(times.clone(), sp)?,
        w: LiftedPath::from_running(times.clone(), sw)?,
        z: LiftedPath::from_running(times, sz)?,
        fine_steps: n,
    })
}

/// Renormalised and raw distances of `P` to the zero path and of `Z` to `W`.
pub fn magnetic_distances(
    p: &LiftedPath,
    w: &LiftedPath,
    z: &LiftedPath,
    v: &RenormTerm,
    alpha: f64,
    eps: f64,
) -> Result<TrialResult> {
    let zeros = vec![vec![0.0; p.dim()]; p.len()];
    let zero = lift_piecewise_linear(p.times(), &zeros)?;
    let last = z.len() - 1;
    Ok(TrialResult {
        eps,
        dist_p_renorm: holder_distance(&p.translate(v)?, &zero, alpha)?,
        dist_p_raw: holder_distance(p, &zero, alpha)?,
        dist_z_renorm: holder_distance(&z.translate(v)?, w, alpha)?,
        dist_z_raw: holder_distance(z, w, alpha)?,
        area_dev1: (z.interval(0, last).level2() - w.interval(0, last).level2()).norm(),
        v_norm: v.norm(),
    })
}

pub fn run_magnetic_trial(cfg: &MagneticConfig, eps: f64, trial: usize) -> Result<TrialResult> {
    cfg.validate()?;
    let v = renorm_v(&drift_at(cfg, eps)?)?;
    let lifts = magnetic_lifts(cfg, eps, trial)?;
    magnetic_distances(&lifts.p, &lifts.w, &lifts.z, &v, cfg.alpha, eps)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MagneticRow {
    pub eps: f64,
    pub v_norm: f64,
    pub fine_steps: usize,
    pub dist_p_renorm: Stat,
    pub dist_p_raw: Stat,
    pub dist_z_renorm: Stat,
    pub dist_z_raw: Stat,
    pub area_dev1: Stat,
}

pub fn magnetic_experiment(cfg: &MagneticConfig) -> Result<Vec<MagneticRow>> {
    cfg.validate()?;
    let trials = cfg.mc_trials;
    let jobs: Vec<(usize, usize)> = (0..cfg.eps_schedule.len())
        .flat_map(|p| (0..trials).map(move |t| (p, t)))
        .collect();
    let results: Vec<TrialResult> = jobs
        .par_iter()
        .map(|&(p, t)| run_magnetic_trial(cfg, cfg.eps_schedule[p], t))
        .collect::<Result<_>>()?;
    cfg.eps_schedule
        .iter()
        .zip(results.chunks(trials))
        .map(|(&eps, chunk)| {
            let col = |f: fn(&TrialResult) -> f64| Stat::from_samples(&chunk.iter().map(f).collect::<Vec<_>>());
            Ok(MagneticRow {
                eps,
                v_norm: chunk[0].v_norm,
                fine_steps: fine_steps(cfg, eps)?,
                dist_p_renorm: col(|r| r.dist_p_renorm),
                dist_p_raw: col(|r| r.dist_p_raw),
                dist_z_renorm: col(|r| r.dist_z_renorm),
                dist_z_raw: col(|r| r.dist_z_raw),
                area_dev1: col(|r| r.area_dev1),
            })
        })
        .collect()
}
