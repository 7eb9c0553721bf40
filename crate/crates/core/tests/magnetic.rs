// SPDX-License-Identifier: Apache-2.0

use roughlift::linalg::renorm_v;
use roughlift::magnetic::{drift_at, magnetic_distances, magnetic_experiment, magnetic_lifts, MagneticConfig};
use roughlift::stats::{fit_loglog, Stat};
use roughlift::tensor2::lift_piecewise_linear;

fn rotation(beta: f64, eps: Vec<f64>, trials: usize, grid_n: usize) -> MagneticConfig {
    MagneticConfig {
        d: 2,
        a: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        b0: vec![vec![0.0, -1.0], vec![1.0, 0.0]],
        beta,
        eps_schedule: eps,
        horizon: 1.0,
        alpha: 0.3,
        grid_n,
        mc_trials: trials,
        base_seed: 11,
        step_factor: 0.1,
    }
}

#[test]
fn renormalised_momentum_area_decays() {
    let beta = 0.5;
    let eps: Vec<f64> = (2..=6).map(|k| 2f64.powi(-k)).collect();
    let cfg = rotation(beta, eps.clone(), 48, 16);
    for (t_idx, t) in [(8usize, 0.5), (16, 1.0)] {
        let mut pts = Vec::new();
        for &e in &eps {
            let v = renorm_v(&drift_at(&cfg, e).unwrap()).unwrap();
            let mut sq = 0.0;
            for trial in 0..cfg.mc_trials {
                let l = magnetic_lifts(&cfg, e, trial).unwrap();
                let s = l.p.interval(0, t_idx);
                sq += (s.level2() + v.matrix() * t).norm_squared();
            }
            pts.push((e, (sq / cfg.mc_trials as f64).sqrt()));
        }
        let fit = fit_loglog(&pts).unwrap();
        println!("t = {t}: L2 slope {:.3} ± {:.3}", fit.slope, fit.half_width);
        assert!(fit.slope >= (1.0 - beta) - 0.15, "slope {} at t = {t}", fit.slope);
    }
}

#[test]
fn distances_ignore_constant_offsets_of_w() {
    let cfg = rotation(0.5, vec![0.25], 1, 16);
    let l = magnetic_lifts(&cfg, 0.25, 0).unwrap();
    let v = renorm_v(&drift_at(&cfg, 0.25).unwrap()).unwrap();
    let samples: Vec<Vec<f64>> = (0..l.w.len())
        .map(|k| l.w.interval(0, k).level1().as_slice().to_vec())
        .collect();
    let shifted: Vec<Vec<f64>> = samples.iter().map(|x| vec![x[0] + 3.5, x[1] - 7.25]).collect();
    let w = lift_piecewise_linear(l.w.times(), &samples).unwrap();
    let w_shifted = lift_piecewise_linear(l.w.times(), &shifted).unwrap();
    let a = magnetic_distances(&l.p, &w, &l.z, &v, cfg.alpha, 0.25).unwrap();
    let b = magnetic_distances(&l.p, &w_shifted, &l.z, &v, cfg.alpha, 0.25).unwrap();
    assert!((a.dist_z_renorm - b.dist_z_renorm).abs() < 1e-12);
    assert!((a.dist_z_raw - b.dist_z_raw).abs() < 1e-12);
    assert!((a.area_dev1 - b.area_dev1).abs() < 1e-12);
    assert_eq!(a.dist_p_renorm, b.dist_p_renorm);
}

#[test]
fn finer_steps_agree_within_errors() {
    let eps = 2f64.powi(-4);
    let mut coarse = rotation(0.5, vec![eps], 64, 16);
    coarse.base_seed = 1;
    let mut fine = coarse.clone();
    fine.step_factor = 0.05;
    fine.base_seed = 2;
    let a = &magnetic_experiment(&coarse).unwrap()[0];
    let b = &magnetic_experiment(&fine).unwrap()[0];
    assert!(b.fine_steps >= 2 * a.fine_steps - coarse.grid_n);
    for (x, y) in [
        (a.dist_z_renorm, b.dist_z_renorm),
        (a.dist_p_renorm, b.dist_p_renorm),
        (a.area_dev1, b.area_dev1),
    ] {
        let se = (x.se * x.se + y.se * y.se).sqrt();
        assert!((x.mean - y.mean).abs() <= 3.0 * se, "{x:?} vs {y:?}");
    }
}

#[test]
fn standard_errors_shrink_with_trials() {
    let eps = vec![0.25];
    let small = magnetic_experiment(&rotation(0.5, eps.clone(), 32, 16)).unwrap();
    let mut big_cfg = rotation(0.5, eps, 128, 16);
    big_cfg.base_seed = 12;
    let big = magnetic_experiment(&big_cfg).unwrap();
    let ratio = small[0].dist_z_renorm.se / big[0].dist_z_renorm.se;
    // Quadrupling the trials halves the standard error; the band allows for
    // the sampling noise of the standard errors themselves.
    assert!((1.4..=2.8).contains(&ratio), "se ratio {ratio}");
}

#[test]
fn renormalised_distance_shrinks_with_eps() {
    let eps: Vec<f64> = (2..=5).map(|k| 2f64.powi(-k)).collect();
    let rows = magnetic_experiment(&rotation(0.5, eps, 16, 32)).unwrap();
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.eps, r.dist_z_renorm.mean)).collect();
    assert!(fit_loglog(&pts).unwrap().slope > 0.0);
    let raw: Vec<Stat> = rows.iter().map(|r| r.dist_z_raw).collect();
    let renorm: Vec<Stat> = rows.iter().map(|r| r.dist_z_renorm).collect();
    assert!(raw.last().unwrap().mean > renorm.last().unwrap().mean);
}
