//! Degree and regression sweeps, cubature tables and their CSV output.

use std::io::{self, Write};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bench::functions::TestFunctionId;
use crate::bench::metrics::{error_metrics, ErrorReport};
use crate::bench::reference::{reference_integral, Quadrature};
use crate::cubature::{domain_rule, integrate_operator};
use crate::domains::{BasisVariant, MappedBasis};
use crate::error::{Error, Result};
use crate::sampling::{mock_optimal_select, optimal_nodes, uniform_points, uniform_sample};
use crate::solver::{build_design, evaluate_operator, fit};
use crate::zernike::basis_dimension;
use crate::Domain;

/// Desk-scale grid parameter (`N = 41²`).
pub const DESK_N: usize = 40;
/// Grid parameter of the published experiments (`N = 101²`).
pub const PAPER_N: usize = 100;
pub const DEFAULT_TEST_POINTS: usize = 5000;
pub const DEFAULT_SAMPLE_SEED: u64 = 20250101;
pub const DEFAULT_TEST_SEED: u64 = 20250102;

/// Regression degree paired with interpolation degree `m`: `m + ⌊√m⌋`.
pub fn default_rtilde(m: usize) -> usize {
    m + m.isqrt()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Sweep {
    /// Vary `m` with `r̃ = m + ⌊√m⌋`.
    Degree { ms: Vec<usize> },
    /// Fix `m` and vary `r̃`.
    Regression { m: usize, rtildes: Vec<usize> },
}

impl Sweep {
    pub fn entries(&self) -> Vec<(usize, usize)> {
        match self {
            Sweep::Degree { ms } => ms.iter().map(|&m| (m, default_rtilde(m))).collect(),
            Sweep::Regression { m, rtildes } => rtildes.iter().map(|&r| (*m, r)).collect(),
        }
    }

    pub fn is_degree(&self) -> bool {
        matches!(self, Sweep::Degree { .. })
    }
}

fn default_test_points() -> usize {
    DEFAULT_TEST_POINTS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub domain: Domain,
    #[serde(default)]
    pub variant: BasisVariant,
    pub function: TestFunctionId,
    pub n: usize,
    pub sweep: Sweep,
    #[serde(default = "default_test_points")]
    pub test_points: usize,
    pub sample_seed: u64,
    pub test_seed: u64,
}

impl ExperimentConfig {
    pub fn sample_size(&self) -> usize {
        (self.n + 1) * (self.n + 1)
    }

    pub fn validate(&self) -> Result<()> {
        self.domain.validate()?;
        if self.test_points == 0 {
            return Err(Error::Config("test set must not be empty".into()));
        }
        let entries = self.sweep.entries();
        if entries.is_empty() {
            return Err(Error::Config("sweep has no entries".into()));
        }
        let n = self.sample_size();
        for (m, r) in entries {
            if m >= r {
                return Err(Error::Config(format!("need m < r_tilde, got m={m}, r_tilde={r}")));
            }
            if basis_dimension(r) >= n {
                return Err(Error::Config(format!(
                    "r_tilde={r} needs more than N={n} samples (R_tilde={})",
                    basis_dimension(r)
                )));
            }
        }
        Ok(())
    }
}

/// One sweep entry: dimensions and either metrics or the failure message.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub m: usize,
    pub r_tilde: usize,
    pub big_m: usize,
    pub big_r: usize,
    pub report: std::result::Result<ErrorReport, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentTable {
    pub config: ExperimentConfig,
    pub rows: Vec<ExperimentRow>,
}

/// Runs every sweep entry on one shared sample and one shared test set.
/// Entries run in parallel on the current rayon pool; row order follows the
/// sweep.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentTable> {
    cfg.validate()?;
    let f = cfg.function;
    let sample = uniform_sample(&cfg.domain, cfg.n, cfg.sample_seed).with_values(|p| f.eval(p));
    let tests = uniform_points(&cfg.domain, cfg.test_points, cfg.test_seed);
    let truth: Vec<f64> = tests.iter().map(|&p| f.eval(p)).collect();
    let basis = MappedBasis::new(cfg.domain, cfg.variant);

    let rows = cfg
        .sweep
        .entries()
        .into_par_iter()
        .map(|(m, r_tilde)| {
            let report = (|| -> Result<ErrorReport> {
                let mock = mock_optimal_select(&sample.points, &optimal_nodes(&cfg.domain, m))?;
                let sys = build_design(basis, r_tilde, &sample, &mock)?;
                let model = fit(&sys)?;
                let timed = evaluate_operator(&model, &tests)?;
                error_metrics(&truth, &timed.values, timed.elapsed)
            })()
            .map_err(|e| e.to_string());
            ExperimentRow {
                m,
                r_tilde,
                big_m: basis_dimension(m),
                big_r: basis_dimension(r_tilde),
                report,
            }
        })
        .collect();
    Ok(ExperimentTable {
        config: cfg.clone(),
        rows,
    })
}

fn sci(x: f64) -> String {
    format!("{x:e}")
}

impl ExperimentTable {
    pub fn csv_header(&self) -> &'static str {
        if self.config.sweep.is_degree() {
            "m,rtilde,M,Rtilde,mse,max_ae,mre,max_re,ex_time,skipped_rel"
        } else {
            "rtilde,Rtilde,mse,max_ae,mre,max_re,ex_time,skipped_rel"
        }
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{}", self.csv_header())?;
        for row in &self.rows {
            let mut fields = Vec::with_capacity(10);
            if self.config.sweep.is_degree() {
                fields.extend([row.m.to_string(), row.r_tilde.to_string(), row.big_m.to_string()]);
            } else {
                fields.push(row.r_tilde.to_string());
            }
            fields.push(row.big_r.to_string());
            match &row.report {
                Ok(r) => fields.extend([
                    sci(r.mse),
                    sci(r.max_ae),
                    sci(r.mre),
                    sci(r.max_re),
                    sci(r.ex_time),
                    r.skipped_rel.to_string(),
                ]),
                Err(_) => fields.extend(std::iter::repeat_n("NaN".to_string(), 6)),
            }
            writeln!(out, "{}", fields.join(","))?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV is ASCII")
    }

    /// Messages of rows whose fit failed.
    pub fn failures(&self) -> Vec<(usize, usize, &str)> {
        self.rows
            .iter()
            .filter_map(|r| r.report.as_ref().err().map(|e| (r.m, r.r_tilde, e.as_str())))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CubatureTableConfig {
    pub domain: Domain,
    #[serde(default)]
    pub variant: BasisVariant,
    pub functions: Vec<TestFunctionId>,
    pub degree: usize,
    pub m: usize,
    pub r_tilde: usize,
    pub n: usize,
    pub sample_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CubatureRow {
    pub function: TestFunctionId,
    pub actual: Quadrature,
    pub cubature: f64,
    /// Seconds spent evaluating the operator at the nodes and summing.
    pub ex_time: f64,
    pub sq_error: f64,
    /// `None` when the integral is zero to within its own error estimate.
    pub rel_error: Option<f64>,
}

/// Integrates the fitted operator of every listed function with the
/// degree-`q` mapped rule and compares against the reference integral.
pub fn run_cubature_table(cfg: &CubatureTableConfig) -> Result<Vec<CubatureRow>> {
    cfg.domain.validate()?;
    let rule = domain_rule(&cfg.domain, cfg.degree)?;
    let sample = uniform_sample(&cfg.domain, cfg.n, cfg.sample_seed).with_values(|_| 1.0);
    let mock = mock_optimal_select(&sample.points, &optimal_nodes(&cfg.domain, cfg.m))?;
    let base = build_design(MappedBasis::new(cfg.domain, cfg.variant), cfg.r_tilde, &sample, &mock)?;
    cfg.functions
        .par_iter()
        .map(|&f| {
            let values: Vec<f64> = sample.points.iter().map(|&p| f.eval(p)).collect();
            let model = fit(&base.with_values(&values)?)?;
            let start = Instant::now();
            let cubature = integrate_operator(&rule, &model, None)?;
            let ex_time = start.elapsed().as_secs_f64();
            let actual = reference_integral(&cfg.domain, f);
            let diff = cubature - actual.value;
            let rel_error = (actual.value.abs() > actual.est_error.max(1e-14)).then(|| diff.abs() / actual.value.abs());
            Ok(CubatureRow {
                function: f,
                actual,
                cubature,
                ex_time,
                sq_error: diff * diff,
                rel_error,
            })
        })
        .collect()
}

pub const CUBATURE_CSV_HEADER: &str = "function,actual,est_error,cubature,ex_time,sq_error,rel_error";

pub fn write_cubature_csv<W: Write>(rows: &[CubatureRow], mut out: W) -> io::Result<()> {
    writeln!(out, "{CUBATURE_CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.function,
            sci(r.actual.value),
            sci(r.actual.est_error),
            sci(r.cubature),
            sci(r.ex_time),
            sci(r.sq_error),
            r.rel_error.map_or_else(|| "-".to_string(), sci)
        )?;
    }
    Ok(())
}

/// Named domain/function pairs mirroring the published experiments:
/// `paper-f<k>-<ellipse|annulus|polygon|disk>`.
pub fn preset(name: &str) -> Result<(Domain, TestFunctionId)> {
    let bad = || Error::Config(format!("unknown preset '{name}' (expected paper-f<0..6>-<ellipse|annulus|polygon|disk>)"));
    let rest = name.strip_prefix("paper-f").ok_or_else(bad)?;
    let (id, dom) = rest.split_once('-').ok_or_else(bad)?;
    let id: u8 = id.parse().map_err(|_| bad())?;
    let domain = match dom {
        "ellipse" => Domain::paper_ellipse(),
        "annulus" => Domain::paper_annulus(),
        "polygon" => Domain::paper_polygon(),
        "disk" => Domain::disk(),
        _ => return Err(bad()),
    };
    Ok((domain, TestFunctionId::new(id).map_err(|_| bad())?))
}

/// Interpolation degrees of the published degree sweep.
pub fn paper_degrees() -> Vec<usize> {
    (1..=9).map(|k| 5 * k).collect()
}

/// Regression degrees of the published regression sweep (with `m = 20`).
pub fn paper_rtildes() -> Vec<usize> {
    (5..=11).map(|k| 5 * k).collect()
}
