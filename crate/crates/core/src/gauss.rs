// SPDX-License-Identifier: Apache-2.0

//! Exact Gaussian samplers on uniform grids.
//!
//! Fractional Brownian motion is generated from its stationary increments by
//! circulant embedding: the `2n` circulant extension `C = F Λ F^{-1}` of the
//! increment covariance has the real symmetric square root `F Λ^{1/2} F^{-1}`,
//! and the first `n` entries of `C^{1/2} z` have exactly the Toeplitz law.
//! Using the symmetric root (rather than complex Gaussian weights) means the
//! circulant and Cholesky routes consume the same real normals, and at
//! `H = 1/2` both reduce to the identity map.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ou_joint_transition, OuTransition, StableDrift};
use crate::tensor2::{lift_piecewise_linear, LiftedPath};

/// Circulant eigenvalues below `-EMBEDDING_TOL * max` trigger the Cholesky fallback.
pub const EMBEDDING_TOL: f64 = 1e-10;

/// Default fraction of the relaxation scale `ε²/|M|` allowed per fine step.
pub const DEFAULT_STEP_FACTOR: f64 = 0.1;

pub type SeededRng = ChaCha8Rng;

pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of substream `key`: `base ⊕ splitmix64(key)`.
pub fn derive_seed(base: u64, key: u64) -> u64 {
    base ^ splitmix64(key)
}

/// Seed for trial `trial` at schedule point `point`.
pub fn trial_seed(base: u64, point: usize, trial: usize) -> u64 {
    derive_seed(base, ((point as u64) << 32) ^ trial as u64)
}

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform grid `t_i = i T / n`, `i = 0..=n`.
pub fn uniform_grid(horizon: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| horizon * i as f64 / n as f64).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridPath {
    times: Vec<f64>,
    values: Vec<Vec<f64>>,
}

impl GridPath {
    pub fn new(times: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: times.len(),
                found: values.len(),
            });
        }
        if values.len() < 2 {
            return Err(Error::TooFewPoints {
                needed: 2,
                found: values.len(),
            });
        }
        let d = values[0].len();
        if let Some(v) = values.iter().find(|v| v.len() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: v.len(),
            });
        }
        if values[0].iter().any(|&x| x != 0.0) {
            return Err(Error::InvalidParameter("grid paths start at the origin".into()));
        }
        Ok(Self { times, values })
    }

    /// Path whose increments are the rows of `increments` (`d` components each).
    pub fn from_increments(times: Vec<f64>, increments: &[Vec<f64>]) -> Result<Self> {
        let d = increments.first().map_or(0, Vec::len);
        let mut values = Vec::with_capacity(increments.len() + 1);
        let mut cur = vec![0.0; d];
        values.push(cur.clone());
        for inc in increments {
            for (c, x) in cur.iter_mut().zip(inc) {
                *c += x;
            }
            values.push(cur.clone());
        }
        Self::new(times, values)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.values[i]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.values[0].len()
    }

    /// Subsample every `stride`-th point.
    pub fn subsample(&self, stride: usize) -> Result<Self> {
        if stride == 0 || (self.len() - 1) % stride != 0 {
            return Err(Error::InvalidParameter(format!(
                "stride {stride} does not divide {} intervals",
                self.len() - 1
            )));
        }
        let times = self.times.iter().step_by(stride).copied().collect();
        let values = self.values.iter().step_by(stride).cloned().collect();
        Self::new(times, values)
    }

    pub fn lift(&self) -> Result<LiftedPath> {
        lift_piecewise_linear(&self.times, &self.values)
    }
}

fn check_grid(horizon: f64, n: usize, d: usize) -> Result<()> {
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(Error::InvalidParameter(format!("horizon must be positive, got {horizon}")));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("need at least one step".into()));
    }
    if d == 0 {
        return Err(Error::InvalidParameter("need at least one component".into()));
    }
    Ok(())
}

/// Brownian motion on `n` uniform steps of `[0, T]`.
pub fn sample_bm(horizon: f64, n: usize, d: usize, seed: u64) -> Result<GridPath> {
    sample_bm_with(&mut rng_from_seed(seed), horizon, n, d)
}

pub fn sample_bm_with<R: Rng>(rng: &mut R, horizon: f64, n: usize, d: usize) -> Result<GridPath> {
    check_grid(horizon, n, d)?;
    let sd = (horizon / n as f64).sqrt();
    let incs: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..d).map(|_| sd * rng.sample::<f64, _>(StandardNormal)).collect())
        .collect();
    GridPath::from_increments(uniform_grid(horizon, n), &incs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FbmMethod {
    Circulant,
    Cholesky,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerSpec {
    pub seed: u64,
    pub method: FbmMethod,
    pub hurst: f64,
    pub n: usize,
    pub d: usize,
    pub horizon: f64,
}

impl SamplerSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.hurst > 0.0 && self.hurst < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "Hurst parameter {} outside (0, 1)",
                self.hurst
            )));
        }
        check_grid(self.horizon, self.n, self.d)
    }
}

/// Increment autocovariance at lag `k` for grid step `1/n`:
/// `½ n^{-2H} (|k+1|^{2H} + |k-1|^{2H} - 2|k|^{2H})`.
pub fn fgn_autocovariance(k: i64, hurst: f64, n: usize) -> f64 {
    let h2 = 2.0 * hurst;
    let k = k.abs() as f64;
    0.5 * (n as f64).powf(-h2) * ((k + 1.0).powf(h2) + (k - 1.0).abs().powf(h2) - 2.0 * k.powf(h2))
}

/// Unit-step autocovariance `ρ(k) = ½(|k+1|^{2H} + |k-1|^{2H} - 2|k|^{2H})`.
fn unit_autocovariance(k: usize, hurst: f64) -> f64 {
    let h2 = 2.0 * hurst;
    let k = k as f64;
    0.5 * ((k + 1.0).powf(h2) + (k - 1.0).abs().powf(h2) - 2.0 * k.powf(h2))
}

enum Factor {
    Circulant {
        sqrt_eig: Vec<f64>,
        forward: Arc<dyn Fft<f64>>,
        inverse: Arc<dyn Fft<f64>>,
    },
    Cholesky(DMatrix<f64>),
}

/// Reusable fBm sampler for a fixed `(n, H, T)`.
pub struct FbmSampler {
    n: usize,
    hurst: f64,
    horizon: f64,
    scale: f64,
    factor: Factor,
}

impl std::fmt::Debug for FbmSampler {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FbmSampler")
            .field("n", &self.n)
            .field("hurst", &self.hurst)
            .field("horizon", &self.horizon)
            .field("method", &self.method())
            .finish()
    }
}

impl FbmSampler {
    pub fn new(n: usize, hurst: f64, horizon: f64, method: FbmMethod) -> Result<Self> {
        SamplerSpec {
            seed: 0,
            method,
            hurst,
            n,
            d: 1,
            horizon,
        }
        .validate()?;
        let scale = (horizon / n as f64).powf(hurst);
        let factor = match method {
            FbmMethod::Circulant => match Self::circulant(n, hurst) {
                Some(f) => f,
                None => Self::cholesky(n, hurst)?,
            },
            FbmMethod::Cholesky => Self::cholesky(n, hurst)?,
        };
        Ok(Self {
            n,
            hurst,
            horizon,
            scale,
            factor,
        })
    }

    fn circulant(n: usize, hurst: f64) -> Option<Factor> {
        let m = 2 * n;
        let mut buf: Vec<Complex64> = (0..m)
            .map(|j| {
                let lag = if j <= n { j } else { m - j };
                Complex64::new(unit_autocovariance(lag, hurst), 0.0)
            })
            .collect();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(m);
        let inverse = planner.plan_fft_inverse(m);
        forward.process(&mut buf);
        let max = buf.iter().map(|c| c.re).fold(f64::MIN, f64::max);
        let min = buf.iter().map(|c| c.re).fold(f64::MAX, f64::min);
        if min < -EMBEDDING_TOL * max {
            return None;
        }
        let sqrt_eig = buf.iter().map(|c| c.re.max(0.0).sqrt()).collect();
        Some(Factor::Circulant {
            sqrt_eig,
            forward,
            inverse,
        })
    }

    fn cholesky(n: usize, hurst: f64) -> Result<Factor> {
        let cov = DMatrix::from_fn(n, n, |i, j| unit_autocovariance(i.abs_diff(j), hurst));
        let chol = nalgebra::Cholesky::new(cov).ok_or(Error::NotPsd { min_eig: f64::NAN })?;
        Ok(Factor::Cholesky(chol.l()))
    }

    /// Method actually in use (after any fallback).
    pub fn method(&self) -> FbmMethod {
        match self.factor {
            Factor::Circulant { .. } => FbmMethod::Circulant,
            Factor::Cholesky(_) => FbmMethod::Cholesky,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn hurst(&self) -> f64 {
        self.hurst
    }

    /// Number of standard normals consumed per component.
    pub fn normals_per_component(&self) -> usize {
        2 * self.n
    }

    /// Map `2n` standard normals to `n` increments with the fGn law.
    pub fn increments_from_normals(&self, z: &[f64]) -> Vec<f64> {
        assert_eq!(z.len(), 2 * self.n, "fBm sampler expects 2n normals");
        match &self.factor {
            Factor::Circulant {
                sqrt_eig,
                forward,
                inverse,
            } => {
                let m = 2 * self.n;
                let mut buf: Vec<Complex64> = z.iter().map(|&x| Complex64::new(x, 0.0)).collect();
                forward.process(&mut buf);
                for (b, s) in buf.iter_mut().zip(sqrt_eig) {
                    *b *= *s;
                }
                inverse.process(&mut buf);
                let norm = self.scale / m as f64;
                buf[..self.n].iter().map(|c| c.re * norm).collect()
            }
            Factor::Cholesky(l) => {
                let zn = DVector::from_column_slice(&z[..self.n]);
                (l * zn).iter().map(|x| x * self.scale).collect()
            }
        }
    }

    pub fn sample_increments<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        let z: Vec<f64> = (0..2 * self.n).map(|_| rng.sample(StandardNormal)).collect();
        self.increments_from_normals(&z)
    }

    /// `d` independent components on the grid `i T / n`.
    pub fn sample_path<R: Rng>(&self, rng: &mut R, d: usize) -> Result<GridPath> {
        if d == 0 {
            return Err(Error::InvalidParameter("need at least one component".into()));
        }
        let comps: Vec<Vec<f64>> = (0..d).map(|_| self.sample_increments(rng)).collect();
        let incs: Vec<Vec<f64>> = (0..self.n).map(|i| comps.iter().map(|c| c[i]).collect()).collect();
        GridPath::from_increments(uniform_grid(self.horizon, self.n), &incs)
    }
}

#[derive(Debug, Clone)]
pub struct FbmSample {
    pub path: GridPath,
    pub method: FbmMethod,
}

pub fn sample_fbm(spec: &SamplerSpec) -> Result<FbmSample> {
    spec.validate()?;
    let sampler = FbmSampler::new(spec.n, spec.hurst, spec.horizon, spec.method)?;
    let path = sampler.sample_path(&mut rng_from_seed(spec.seed), spec.d)?;
    Ok(FbmSample {
        path,
        method: sampler.method(),
    })
}

/// Smallest number of steps on `[0, T]` with `h ≤ factor · ε² / |M|_F`.
pub fn required_steps(drift: &StableDrift, eps: f64, horizon: f64, factor: f64) -> usize {
    let hmax = factor * eps * eps / drift.norm();
    let n = (horizon / hmax * (1.0 - 1e-12)).ceil();
    (n as usize).max(1)
}

/// Streams exact joint increments `(ΔP, ΔW)` of the physical Brownian motion.
pub struct PhysicalStepper {
    transition: OuTransition,
    p: Vec<f64>,
    next_p: Vec<f64>,
    z: Vec<f64>,
    xi: Vec<f64>,
    rng: SeededRng,
}

impl PhysicalStepper {
    pub fn new(drift: &StableDrift, eps: f64, h: f64, seed: u64) -> Result<Self> {
        let transition = ou_joint_transition(drift, eps, h)?;
        let d = drift.dim();
        Ok(Self {
            transition,
            p: vec![0.0; d],
            next_p: vec![0.0; d],
            z: vec![0.0; 2 * d],
            xi: vec![0.0; d],
            rng: rng_from_seed(seed),
        })
    }

    pub fn state(&self) -> &[f64] {
        &self.p
    }

    pub fn transition(&self) -> &OuTransition {
        &self.transition
    }

    /// Advance one step, writing the increments of `P` and `W`.
    pub fn advance(&mut self, dp: &mut [f64], dw: &mut [f64]) {
        let d = self.p.len();
        for z in self.z.iter_mut() {
            *z = self.rng.sample(StandardNormal);
        }
        let (zw, zp) = self.z.split_at(d);
        self.transition.noise_from_normals(zw, zp, dw, &mut self.xi);
        let e = self.transition.mean_map();
        for i in 0..d {
            let mut acc = self.xi[i];
            for j in 0..d {
                acc += e[(i, j)] * self.p[j];
            }
            self.next_p[i] = acc;
        }
        for i in 0..d {
            dp[i] = self.next_p[i] - self.p[i];
        }
        std::mem::swap(&mut self.p, &mut self.next_p);
    }
}

/// Sample `(P^ε, W)` on `n` uniform steps of `[0, T]` from the exact transition.
pub fn sample_physical(
    drift: &StableDrift,
    eps: f64,
    horizon: f64,
    n: usize,
    seed: u64,
) -> Result<(GridPath, GridPath)> {
    sample_physical_with_factor(drift, eps, horizon, n, seed, DEFAULT_STEP_FACTOR)
}

pub fn sample_physical_with_factor(
    drift: &StableDrift,
    eps: f64,
    horizon: f64,
    n: usize,
    seed: u64,
    factor: f64,
) -> Result<(GridPath, GridPath)> {
    check_grid(horizon, n, drift.dim())?;
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!("ε must be positive, got {eps}")));
    }
    let required = required_steps(drift, eps, horizon, factor);
    if n < required {
        return Err(Error::StepTooCoarse { required, given: n });
    }
    let d = drift.dim();
    let mut stepper = PhysicalStepper::new(drift, eps, horizon / n as f64, seed)?;
    let mut p = vec![vec![0.0; d]; n + 1];
    let mut w = vec![vec![0.0; d]; n + 1];
    let (mut dp, mut dw) = (vec![0.0; d], vec![0.0; d]);
    for k in 0..n {
        stepper.advance(&mut dp, &mut dw);
        for i in 0..d {
            p[k + 1][i] = stepper.state()[i];
            w[k + 1][i] = w[k][i] + dw[i];
        }
    }
    let times = uniform_grid(horizon, n);
    Ok((GridPath::new(times.clone(), p)?, GridPath::new(times, w)?))
}

/// `Z = W - P`, equal to `M X` because both sides start at the origin.
pub fn derive_z(p: &GridPath, w: &GridPath) -> Result<GridPath> {
    if p.times != w.times {
        return Err(Error::GridMismatch);
    }
    if p.dim() != w.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: w.dim(),
        });
    }
    let values = p
        .values
        .iter()
        .zip(&w.values)
        .map(|(pv, wv)| wv.iter().zip(pv).map(|(a, b)| a - b).collect())
        .collect();
    GridPath::new(p.times.clone(), values)
}
