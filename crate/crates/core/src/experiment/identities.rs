// SPDX-License-Identifier: Apache-2.0

//! Algebraic and oracle checks that need no Monte Carlo averaging.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::gauss::{derive_seed, rng_from_seed, sample_fbm, FbmMethod, SamplerSpec, SeededRng};
use crate::leadlag::{hoff_path, leadlag_area_oracle, psi_closed, PsiTable, PSI_CONSTANT};
use crate::linalg::{counter_term_forms, lyapunov_c, renorm_v, StableDrift};
use crate::tensor2::{lift_piecewise_linear, RenormTerm, StepTwoLift};

fn default_drifts() -> usize {
    100
}

fn default_paths() -> usize {
    1000
}

fn default_psi_n() -> usize {
    4096
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct IdentitiesConfig {
    #[serde(default)]
    pub base_seed: u64,
    /// Random stable drifts in the Lyapunov suite.
    #[serde(default = "default_drifts")]
    pub drifts: usize,
    /// Random piecewise-linear paths in the tensor suite.
    #[serde(default = "default_paths")]
    pub paths: usize,
    /// Largest `n` in the exhaustive ψ bound sweep.
    #[serde(default = "default_psi_n")]
    pub psi_max_n: usize,
}

impl Default for IdentitiesConfig {
    fn default() -> Self {
        Self {
            base_seed: 0,
            drifts: default_drifts(),
            paths: default_paths(),
            psi_max_n: default_psi_n(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SuiteResult {
    pub suite: String,
    pub max_error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl SuiteResult {
    fn new(suite: &str, max_error: f64, tolerance: f64) -> Self {
        Self {
            suite: suite.to_string(),
            max_error,
            tolerance,
            pass: max_error <= tolerance,
        }
    }
}

/// Random stable drift in dimension `dim`: `A = Q^T D Q` with `Q` orthogonal and
/// `D` uniform in `[0.2, 2]`, `B` antisymmetric with `|B|_F = b_norm`.
pub fn random_drift(rng: &mut SeededRng, dim: usize, b_norm: f64) -> Result<StableDrift> {
    let g = DMatrix::<f64>::from_fn(dim, dim, |_, _| rng.sample(StandardNormal));
    let q = g.qr().q();
    let diag = DMatrix::from_diagonal(&nalgebra::DVector::from_fn(dim, |_, _| rng.random_range(0.2..=2.0)));
    let a = q.transpose() * diag * &q;
    let a = (&a + a.transpose()) * 0.5;
    let h = DMatrix::<f64>::from_fn(dim, dim, |_, _| rng.sample(StandardNormal));
    let mut b = &h - h.transpose();
    let norm = b.norm();
    if norm > 0.0 {
        b *= b_norm / norm;
    }
    StableDrift::new(a, b)
}

fn random_path(rng: &mut SeededRng, dim: usize, len: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    let mut t = 0.0;
    let times = (0..len)
        .map(|i| {
            if i > 0 {
                t += rng.random_range(0.01..1.0);
            }
            t
        })
        .collect();
    let points = (0..len)
        .map(|_| (0..dim).map(|_| rng.sample(StandardNormal)).collect())
        .collect();
    (times, points)
}

fn lift_error(a: &StepTwoLift, b: &StepTwoLift) -> f64 {
    let scale = 1.0 + a.level1().amax().max(b.level1().amax()) + a.level2().amax().max(b.level2().amax());
    ((a.level1() - b.level1()).amax()).max((a.level2() - b.level2()).amax()) / scale
}

fn lyapunov_suites(cfg: &IdentitiesConfig) -> Result<Vec<SuiteResult>> {
    let mut rng = rng_from_seed(derive_seed(cfg.base_seed, 1));
    let (mut residual, mut forms, mut antisym) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..cfg.drifts {
        let dim = rng.random_range(1..=5);
        let b_norm = 10f64.powf(rng.random_range(0.0..=3.0));
        let drift = random_drift(&mut rng, dim, b_norm)?;
        let c = lyapunov_c(&drift)?;
        let m = drift.m();
        let r = m * &c + &c * m.transpose() - DMatrix::identity(dim, dim);
        residual = residual.max(r.norm());
        let [f0, f1, f2] = counter_term_forms(&drift)?;
        forms = forms.max((&f0 - &f1).norm()).max((&f1 - &f2).norm()).max((&f0 - &f2).norm());
        let v = renorm_v(&drift)?;
        antisym = antisym.max((v.matrix() + v.matrix().transpose()).norm());
    }

    // A = I, B = bJ has C = I/2 and v = (b/2) J.
    let j = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
    let mut closed = 0.0f64;
    for beta in [0.0, 0.25, 0.5, 0.75, 0.99] {
        for k in 0..=10 {
            let eps = 2f64.powi(-k);
            let b = eps.powf(-beta);
            let drift = StableDrift::new(DMatrix::identity(2, 2), &j * b)?;
            let v = renorm_v(&drift)?;
            closed = closed.max((v.matrix() - &j * (b / 2.0)).amax());
        }
    }
    Ok(vec![
        SuiteResult::new("lyapunov_residual", residual, 1e-10),
        SuiteResult::new("counter_term_forms", forms, 1e-10),
        SuiteResult::new("counter_term_antisymmetry", antisym, 1e-12),
        SuiteResult::new("magnetic_closed_form", closed, 1e-10),
    ])
}

fn tensor_suites(cfg: &IdentitiesConfig) -> Result<Vec<SuiteResult>> {
    let mut rng = rng_from_seed(derive_seed(cfg.base_seed, 2));
    let (mut chen, mut geo, mut inv, mut trans) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..cfg.paths {
        let dim = rng.random_range(1..=4);
        let len = rng.random_range(3..=64);
        let (times, points) = random_path(&mut rng, dim, len);
        let lift = lift_piecewise_linear(&times, &points)?;
        for i in 0..len {
            for j in i + 1..len {
                let sij = lift.interval(i, j);
                geo = geo.max(sij.geometric_defect() / (1.0 + sij.level1().norm_squared()));
                inv = inv.max(lift_error(&sij.mul(&sij.inverse())?, &StepTwoLift::identity(dim)));
                for k in j + 1..len {
                    chen = chen.max(lift_error(&sij.mul(&lift.interval(j, k))?, &lift.interval(i, k)));
                }
            }
        }
        let h = DMatrix::<f64>::from_fn(dim, dim, |_, _| rng.sample(StandardNormal));
        let v = RenormTerm::new(&h - h.transpose())?;
        let back = lift.translate(&v)?.translate(&v.negated())?;
        for idx in 0..len {
            trans = trans.max(lift_error(back.running(idx), lift.running(idx)));
        }
    }
    let square = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.0, 0.0]];
    let lift = lift_piecewise_linear(&[0.0, 1.0, 2.0, 3.0, 4.0], &square)?;
    let area = lift.interval(0, 4).levy_area();
    Ok(vec![
        SuiteResult::new("chen_relation", chen, 1e-12),
        SuiteResult::new("geometricity", geo, 1e-12),
        SuiteResult::new("group_inverse", inv, 1e-12),
        SuiteResult::new("translate_roundtrip", trans, 1e-12),
        SuiteResult::new("square_loop_area", (area[(0, 1)] - 1.0).abs(), 1e-12),
    ])
}

fn leadlag_suites(cfg: &IdentitiesConfig) -> Result<Vec<SuiteResult>> {
    let (mut cross, mut diag) = (0.0f64, 0.0f64);
    let mut case = 0u64;
    for hurst in [0.3, 0.4, 0.5] {
        for d in 1..=3 {
            for n in [1, 2, 5, 8, 17, 32] {
                case += 1;
                let spec = SamplerSpec {
                    seed: derive_seed(cfg.base_seed, 1000 + case),
                    method: FbmMethod::Circulant,
                    hurst,
                    n,
                    d,
                    horizon: 1.0,
                };
                let path = sample_fbm(&spec)?.path;
                let hoff = hoff_path(path.values())?.lift()?;
                let base = path.lift()?;
                for m in 0..=n {
                    for k in m..=n {
                        let oracle = leadlag_area_oracle(path.values(), m, k)?;
                        let integrated = hoff.interval(2 * m, 2 * k).levy_area();
                        cross = cross.max((&oracle - &integrated).amax());
                        let y = base.interval(m, k).levy_area();
                        let lag = integrated.view((0, 0), (d, d)).into_owned();
                        let lead = integrated.view((d, d), (d, d)).into_owned();
                        diag = diag.max((&lag - &y).amax()).max((&lead - &y).amax());
                    }
                }
            }
        }
    }
    Ok(vec![
        SuiteResult::new("leadlag_area_oracle", cross, 1e-12),
        SuiteResult::new("leadlag_diagonal_blocks", diag, 0.0),
    ])
}

/// `ψ(n, K)` as the variance of `Σ_{r<K} ΔX_r ΔY_r` for independent fBm
/// components, summing squared increment covariances built from `R(s, t)`.
fn psi_double_sum(n: usize, hurst: f64, out: &mut Vec<f64>) {
    let h2 = 2.0 * hurst;
    // Integer time units; rescaled by n^{-2H} per covariance factor.
    let r = |s: f64, t: f64| 0.5 * (s.powf(h2) + t.powf(h2) - (t - s).abs().powf(h2));
    let gamma = |a: usize, b: usize| {
        let (a, b) = (a as f64, b as f64);
        r(a + 1.0, b + 1.0) - r(a + 1.0, b) - r(a, b + 1.0) + r(a, b)
    };
    let scale = (n as f64).powf(-2.0 * h2);
    out.clear();
    let mut sum = 0.0;
    for k in 0..n {
        let mut border = 0.0;
        for a in 0..k {
            border += gamma(a, k).powi(2);
        }
        sum += 2.0 * border + gamma(k, k).powi(2);
        out.push(sum * scale);
    }
}

fn psi_suites(cfg: &IdentitiesConfig) -> Result<Vec<SuiteResult>> {
    let mut brute = 0.0f64;
    let mut sums = Vec::new();
    for hurst in [0.3, 0.4, 0.5] {
        for n in 1..=256 {
            psi_double_sum(n, hurst, &mut sums);
            for (k, &b) in sums.iter().enumerate() {
                let c = psi_closed(n, k + 1, hurst)?;
                brute = brute.max((c - b).abs() / b);
            }
        }
    }
    let mut ratio = 0.0f64;
    let mut half = 0.0f64;
    let table_half = PsiTable::new(0.5, 256)?;
    for n in 1..=256 {
        for k in 1..=n {
            let exact = k as f64 / (n * n) as f64;
            half = half.max((table_half.psi(n, k) - exact).abs() / exact);
        }
    }
    for hurst in [0.30, 0.35, 0.40, 0.45, 0.50] {
        let table = PsiTable::new(hurst, cfg.psi_max_n)?;
        for n in 1..=cfg.psi_max_n {
            for k in 1..=n {
                ratio = ratio.max(table.psi(n, k) / crate::leadlag::psi_bound(n, k, hurst, PSI_CONSTANT));
            }
        }
    }
    Ok(vec![
        SuiteResult::new("psi_double_sum", brute, 1e-12),
        SuiteResult::new("psi_bound_ratio", ratio, 1.0),
        SuiteResult::new("psi_brownian", half, 1e-12),
    ])
}

/// Run every suite in a fixed order.
pub fn run_identities(cfg: &IdentitiesConfig) -> Result<Vec<SuiteResult>> {
    let mut out = lyapunov_suites(cfg)?;
    out.extend(tensor_suites(cfg)?);
    out.extend(leadlag_suites(cfg)?);
    out.extend(psi_suites(cfg)?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_passes() {
        let cfg = IdentitiesConfig {
            base_seed: 3,
            drifts: 10,
            paths: 50,
            psi_max_n: 64,
        };
        for s in run_identities(&cfg).unwrap() {
            assert!(s.pass, "{s:?}");
        }
    }

    #[test]
    fn double_sum_at_half_is_linear() {
        let mut out = Vec::new();
        psi_double_sum(10, 0.5, &mut out);
        for (k, v) in out.iter().enumerate() {
            assert!((v - (k + 1) as f64 / 100.0).abs() < 1e-15);
        }
    }
}
