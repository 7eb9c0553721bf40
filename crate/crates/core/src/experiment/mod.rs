// SPDX-License-Identifier: Apache-2.0

//! Experiment orchestration behind the command-line tool.

pub mod emit;
pub mod identities;

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::leadlag::{leadlag_experiment, psi_bound, LeadLagConfig, PsiTable, PSI_CONSTANT};
use crate::magnetic::{magnetic_experiment, MagneticConfig};
use crate::stats::{fit_loglog, Stat};

pub use emit::{emit, Cell, Plot, Report, Series};
pub use identities::{run_identities, IdentitiesConfig, SuiteResult};

pub const MAGNETIC_HEADER: [&str; 12] = [
    "eps",
    "vnorm",
    "distP_renorm_mean",
    "distP_renorm_se",
    "distP_raw_mean",
    "distP_raw_se",
    "distZ_renorm_mean",
    "distZ_renorm_se",
    "distZ_raw_mean",
    "distZ_raw_se",
    "areaDev1_mean",
    "areaDev1_se",
];

pub const LEADLAG_HEADER: [&str; 8] = [
    "n",
    "vscalar",
    "dist_renorm_mean",
    "dist_renorm_se",
    "dist_raw_mean",
    "dist_raw_se",
    "areaDev1_mean",
    "areaDev1_se",
];

pub const PSI_HEADER: [&str; 6] = ["hurst", "n", "K", "psi", "bound", "ratio"];

pub const IDENTITIES_HEADER: [&str; 4] = ["suite", "max_error", "tolerance", "pass"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Identities,
    Magnetic,
    Leadlag,
    Psi,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Identities => "identities",
            Kind::Magnetic => "magnetic",
            Kind::Leadlag => "leadlag",
            Kind::Psi => "psi",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct PsiConfig {
    pub hursts: Vec<f64>,
    pub n_values: Vec<usize>,
    /// Block sizes; defaults to the powers of two up to `n` together with `n`.
    #[serde(default)]
    pub k_values: Option<Vec<usize>>,
}

impl PsiConfig {
    pub fn validate(&self) -> Result<()> {
        if self.hursts.is_empty() || self.n_values.is_empty() {
            return Err(Error::Config("hursts and nValues must be non-empty".into()));
        }
        if let Some(h) = self.hursts.iter().find(|&&h| !(h > 0.0 && h < 1.0)) {
            return Err(Error::Config(format!("hurst = {h} outside (0, 1)")));
        }
        if self.n_values.contains(&0) {
            return Err(Error::Config("nValues must be positive".into()));
        }
        if let Some(ks) = &self.k_values {
            if ks.is_empty() || ks.contains(&0) {
                return Err(Error::Config("kValues must be non-empty and positive".into()));
            }
        }
        Ok(())
    }

    fn blocks(&self, n: usize) -> Vec<usize> {
        match &self.k_values {
            Some(ks) => ks.iter().copied().filter(|&k| k <= n).collect(),
            None => {
                let mut ks: Vec<usize> = (0..).map(|e| 1usize << e).take_while(|&k| k < n).collect();
                ks.push(n);
                ks
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExperimentConfig {
    Identities(IdentitiesConfig),
    Magnetic(MagneticConfig),
    Leadlag(LeadLagConfig),
    Psi(PsiConfig),
}

impl ExperimentConfig {
    pub fn kind(&self) -> Kind {
        match self {
            ExperimentConfig::Identities(_) => Kind::Identities,
            ExperimentConfig::Magnetic(_) => Kind::Magnetic,
            ExperimentConfig::Leadlag(_) => Kind::Leadlag,
            ExperimentConfig::Psi(_) => Kind::Psi,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ExperimentConfig::Identities(_) => Ok(()),
            ExperimentConfig::Magnetic(c) => c.validate(),
            ExperimentConfig::Leadlag(c) => c.validate(),
            ExperimentConfig::Psi(c) => c.validate(),
        }
    }

    /// Replace the base seed, where the experiment has one.
    pub fn with_seed(mut self, seed: u64) -> Self {
        match &mut self {
            ExperimentConfig::Identities(c) => c.base_seed = seed,
            ExperimentConfig::Magnetic(c) => c.base_seed = seed,
            ExperimentConfig::Leadlag(c) => c.base_seed = seed,
            ExperimentConfig::Psi(_) => {}
        }
        self
    }

    fn to_json(&self) -> Result<Value> {
        Ok(match self {
            ExperimentConfig::Identities(c) => serde_json::to_value(c)?,
            ExperimentConfig::Magnetic(c) => serde_json::to_value(c)?,
            ExperimentConfig::Leadlag(c) => serde_json::to_value(c)?,
            ExperimentConfig::Psi(c) => serde_json::to_value(c)?,
        })
    }
}

/// Parse and validate a JSON config for `kind`. Every failure is a [`Error::Config`].
pub fn parse_config_str(kind: Kind, text: &str) -> Result<ExperimentConfig> {
    let bad = |e: serde_json::Error| Error::Config(format!("malformed {} config: {e}", kind.name()));
    let cfg = match kind {
        Kind::Identities => ExperimentConfig::Identities(serde_json::from_str(text).map_err(bad)?),
        Kind::Magnetic => ExperimentConfig::Magnetic(serde_json::from_str(text).map_err(bad)?),
        Kind::Leadlag => ExperimentConfig::Leadlag(serde_json::from_str(text).map_err(bad)?),
        Kind::Psi => ExperimentConfig::Psi(serde_json::from_str(text).map_err(bad)?),
    };
    cfg.validate()?;
    Ok(cfg)
}

pub fn parse_config(kind: Kind, path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config_str(kind, &text)
}

fn slope_json(points: &[(f64, f64)]) -> Value {
    match fit_loglog(points) {
        Ok(f) => json!({
            "slope": f.slope,
            "intercept": f.intercept,
            "stderr": f.stderr,
            "halfWidth95": f.half_width,
        }),
        Err(e) => json!({ "error": e.to_string() }),
    }
}

fn stat_cells(s: &Stat) -> [Cell; 2] {
    [Cell::Float(s.mean), Cell::Float(s.se)]
}

fn manifest(cfg: &ExperimentConfig, schedule: Value, seed: Option<u64>, rows: Value, slopes: Value, notes: Value) -> Result<Value> {
    Ok(json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "experiment": cfg.kind().name(),
        "config": cfg.to_json()?,
        "schedule": schedule,
        "baseSeed": seed,
        "rows": rows,
        "slopes": slopes,
        "notes": notes,
    }))
}

fn metric_plots(x_label: &str, x: &[f64], metrics: &[(&str, Vec<f64>)]) -> Vec<Plot> {
    metrics
        .iter()
        .map(|(name, y)| Plot {
            name: name.to_string(),
            x_label: x_label.to_string(),
            series: vec![Series {
                label: format!("{name} (mean)"),
                x: x.to_vec(),
                y: y.clone(),
            }],
        })
        .collect()
}

fn slopes_for(x: &[f64], metrics: &[(&str, Vec<f64>)]) -> Value {
    let mut m = serde_json::Map::new();
    for (name, y) in metrics {
        let pts: Vec<(f64, f64)> = x.iter().copied().zip(y.iter().copied()).collect();
        m.insert(name.to_string(), slope_json(&pts));
    }
    Value::Object(m)
}

fn magnetic_report(exp: &ExperimentConfig, cfg: &MagneticConfig) -> Result<Report> {
    let rows = magnetic_experiment(cfg)?;
    let x: Vec<f64> = rows.iter().map(|r| r.eps).collect();
    let metrics = vec![
        ("distP_renorm", rows.iter().map(|r| r.dist_p_renorm.mean).collect()),
        ("distP_raw", rows.iter().map(|r| r.dist_p_raw.mean).collect()),
        ("distZ_renorm", rows.iter().map(|r| r.dist_z_renorm.mean).collect()),
        ("distZ_raw", rows.iter().map(|r| r.dist_z_raw.mean).collect()),
        ("areaDev1", rows.iter().map(|r| r.area_dev1.mean).collect::<Vec<f64>>()),
    ];
    let table = rows
        .iter()
        .map(|r| {
            let mut row = vec![Cell::Float(r.eps), Cell::Float(r.v_norm)];
            for s in [&r.dist_p_renorm, &r.dist_p_raw, &r.dist_z_renorm, &r.dist_z_raw, &r.area_dev1] {
                row.extend(stat_cells(s));
            }
            row
        })
        .collect();
    let notes = json!({
        "fineSteps": rows.iter().map(|r| json!({"eps": r.eps, "n": r.fine_steps})).collect::<Vec<_>>(),
        "sampler": "exact joint Gaussian transition of (P, W)",
    });
    Ok(Report {
        header: MAGNETIC_HEADER.iter().map(|s| s.to_string()).collect(),
        rows: table,
        manifest: manifest(
            exp,
            json!(cfg.eps_schedule),
            Some(cfg.base_seed),
            serde_json::to_value(&rows)?,
            slopes_for(&x, &metrics),
            notes,
        )?,
        plots: metric_plots("eps", &x, &metrics),
    })
}

fn leadlag_report(exp: &ExperimentConfig, cfg: &LeadLagConfig) -> Result<Report> {
    let table = leadlag_experiment(cfg)?;
    let rows = &table.rows;
    let x: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let metrics = vec![
        ("dist_renorm", rows.iter().map(|r| r.dist_renorm.mean).collect()),
        ("dist_raw", rows.iter().map(|r| r.dist_raw.mean).collect()),
        ("areaDev1", rows.iter().map(|r| r.area_dev1.mean).collect::<Vec<f64>>()),
    ];
    let cells = rows
        .iter()
        .map(|r| {
            let mut row = vec![Cell::Int(r.n as u64), Cell::Float(r.v_scalar)];
            for s in [&r.dist_renorm, &r.dist_raw, &r.area_dev1] {
                row.extend(stat_cells(s));
            }
            row
        })
        .collect();
    let notes = json!({
        "fbmMethod": table.method,
        "referenceN": cfg.n_ref,
        "comparisonGrid": cfg.n_schedule[0],
    });
    Ok(Report {
        header: LEADLAG_HEADER.iter().map(|s| s.to_string()).collect(),
        rows: cells,
        manifest: manifest(
            exp,
            json!(cfg.n_schedule),
            Some(cfg.base_seed),
            serde_json::to_value(rows)?,
            slopes_for(&x, &metrics),
            notes,
        )?,
        plots: metric_plots("n", &x, &metrics),
    })
}

fn psi_report(exp: &ExperimentConfig, cfg: &PsiConfig) -> Result<Report> {
    let n_max = *cfg.n_values.iter().max().unwrap_or(&1);
    let mut cells = Vec::new();
    let mut series = Vec::new();
    let mut worst = 0.0f64;
    for &h in &cfg.hursts {
        let table = PsiTable::new(h, n_max)?;
        for &n in &cfg.n_values {
            let ks = cfg.blocks(n);
            for &k in &ks {
                let psi = table.psi(n, k);
                let bound = psi_bound(n, k, h, PSI_CONSTANT);
                worst = worst.max(psi / bound);
                cells.push(vec![
                    Cell::Float(h),
                    Cell::Int(n as u64),
                    Cell::Int(k as u64),
                    Cell::Float(psi),
                    Cell::Float(bound),
                    Cell::Float(psi / bound),
                ]);
            }
            if n == n_max {
                series.push(Series {
                    label: format!("H = {h}"),
                    x: ks.iter().map(|&k| k as f64).collect(),
                    y: ks.iter().map(|&k| table.psi(n, k)).collect(),
                });
            }
        }
    }
    Ok(Report {
        header: PSI_HEADER.iter().map(|s| s.to_string()).collect(),
        rows: cells,
        manifest: manifest(
            exp,
            json!(cfg.n_values),
            None,
            json!([]),
            json!({}),
            json!({"boundConstant": PSI_CONSTANT, "maxRatio": worst}),
        )?,
        plots: vec![Plot {
            name: "psi".into(),
            x_label: format!("K (n = {n_max})"),
            series,
        }],
    })
}

fn identities_report(exp: &ExperimentConfig, cfg: &IdentitiesConfig) -> Result<(Report, bool)> {
    let suites = run_identities(cfg)?;
    let all = suites.iter().all(|s| s.pass);
    let cells = suites
        .iter()
        .map(|s| {
            vec![
                Cell::Text(s.suite.clone()),
                Cell::Float(s.max_error),
                Cell::Float(s.tolerance),
                Cell::Bool(s.pass),
            ]
        })
        .collect();
    let report = Report {
        header: IDENTITIES_HEADER.iter().map(|s| s.to_string()).collect(),
        rows: cells,
        manifest: manifest(
            exp,
            json!([]),
            Some(cfg.base_seed),
            serde_json::to_value(&suites)?,
            json!({}),
            json!({"allPass": all}),
        )?,
        plots: Vec::new(),
    };
    Ok((report, all))
}

/// Outcome of a run: the report plus whether every check passed
/// (always true except for the identity suites).
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: Report,
    pub all_pass: bool,
}

pub fn run(cfg: &ExperimentConfig) -> Result<RunOutcome> {
    cfg.validate()?;
    let (report, all_pass) = match cfg {
        ExperimentConfig::Identities(c) => identities_report(cfg, c)?,
        ExperimentConfig::Magnetic(c) => (magnetic_report(cfg, c)?, true),
        ExperimentConfig::Leadlag(c) => (leadlag_report(cfg, c)?, true),
        ExperimentConfig::Psi(c) => (psi_report(cfg, c)?, true),
    };
    Ok(RunOutcome { report, all_pass })
}
