// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

/// Sample mean with its standard error (`s / √n`, zero for a single sample).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    pub se: f64,
}

impl Stat {
    pub fn from_samples(xs: &[f64]) -> Stat {
        let n = xs.len();
        if n == 0 {
            return Stat {
                mean: f64::NAN,
                se: f64::NAN,
            };
        }
        let mean = xs.iter().sum::<f64>() / n as f64;
        if n == 1 {
            return Stat { mean, se: 0.0 };
        }
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        Stat {
            mean,
            se: (var / n as f64).sqrt(),
        }
    }

    /// `|mean - target| ≤ k · se`.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.mean - target).abs() <= k * self.se
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope.
    pub stderr: f64,
    /// 95% confidence half-width of the slope (Student t with `k - 2` degrees of freedom).
    pub half_width: f64,
}

/// Least squares of `log y` on `log x`.
pub fn fit_loglog(points: &[(f64, f64)]) -> Result<LogLogFit> {
    if points.len() < 3 {
        return Err(Error::InvalidParameter(format!(
            "log-log fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    if let Some(&(x, y)) = points.iter().find(|(x, y)| !(*x > 0.0 && *y > 0.0) || !x.is_finite() || !y.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "log-log fit needs positive finite values, got ({x}, {y})"
        )));
    }
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx <= 1e-24 * lx.iter().map(|x| x * x).sum::<f64>().max(1.0) {
        return Err(Error::InvalidParameter("log-log fit with degenerate abscissae".into()));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let dof = n - 2.0;
    let stderr = if dof > 0.0 { (rss / dof / sxx).sqrt() } else { 0.0 };
    let t = StudentsT::new(0.0, 1.0, dof.max(1.0))
        .map(|d| d.inverse_cdf(0.975))
        .unwrap_or(1.96);
    Ok(LogLogFit {
        slope,
        intercept,
        stderr,
        half_width: t * stderr,
    })
}

/// Two-sample Kolmogorov–Smirnov statistic `sup |F_a - F_b|`.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Asymptotic two-sample KS critical value at level 1%.
pub fn ks_critical_1pct(na: usize, nb: usize) -> f64 {
    let (na, nb) = (na as f64, nb as f64);
    1.628 * ((na + nb) / (na * nb)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn stat_basics() {
        let s = Stat::from_samples(&[2.5]);
        assert_eq!(s, Stat { mean: 2.5, se: 0.0 });
        let s = Stat::from_samples(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(s.mean, 2.5);
        assert!((s.se - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn exact_power_laws() {
        let pts: Vec<(f64, f64)> = [1.0, 2.0, 5.0, 10.0].iter().map(|&x| (x, x * x)).collect();
        let f = fit_loglog(&pts).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-14);
        assert!(f.stderr < 1e-7);

        let pts: Vec<(f64, f64)> = [1.0, 2.0, 5.0, 10.0].iter().map(|&x| (x, 3.0)).collect();
        let f = fit_loglog(&pts).unwrap();
        assert!(f.slope.abs() < 1e-14);
        assert!((f.intercept - 3f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn noisy_power_law() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let pts: Vec<(f64, f64)> = (0..12)
            .map(|k| {
                let x = 2f64.powi(k);
                (x, x.powf(-0.2) * (1.0 + rng.random_range(-0.01..0.01)))
            })
            .collect();
        let f = fit_loglog(&pts).unwrap();
        assert!((-0.25..=-0.15).contains(&f.slope));
        assert!(f.half_width > 0.0);
    }

    #[test]
    fn fit_rejects_bad_input() {
        assert!(fit_loglog(&[(1.0, 1.0), (2.0, 2.0)]).is_err());
        assert!(fit_loglog(&[(1.0, 1.0), (2.0, 0.0), (3.0, 1.0)]).is_err());
        assert!(fit_loglog(&[(2.0, 1.0), (2.0, 2.0), (2.0, 3.0)]).is_err());
    }

    #[test]
    fn ks_identical_and_shifted() {
        let a: Vec<f64> = (0..100).map(|i| i as f64).collect();
        assert_eq!(ks_statistic(&a, &a), 0.0);
        let b: Vec<f64> = a.iter().map(|x| x + 1000.0).collect();
        assert_eq!(ks_statistic(&a, &b), 1.0);
        let c: Vec<f64> = a.iter().map(|x| x + 10.0).collect();
        assert!((ks_statistic(&a, &c) - 0.1).abs() < 1e-12);
    }
}
