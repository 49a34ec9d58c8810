//! Command-line driver: configuration, suites and report emission.

pub mod config;
pub mod report;
pub mod suites;

use std::io::Write;
use std::path::Path;

pub use config::{parse_tolerance, ConfigFile, GaugeChoice, Overrides, RunConfig, CONFIG_ENV};
pub use report::{CheckRecord, Environment, Report};

use crate::error::{Error, Result};
use crate::kuiper::{self, GaugeField, TorusGrid};
use crate::sampling::Sampler;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Module,
    Equivariance,
    Cohomology,
    Hodge,
}

impl Suite {
    pub const ALL: [Suite; 4] = [
        Suite::Cohomology,
        Suite::Equivariance,
        Suite::Hodge,
        Suite::Module,
    ];

    pub fn run(self, cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
        match self {
            Suite::Module => suites::module_suite(cfg),
            Suite::Equivariance => suites::equivariance_suite(cfg),
            Suite::Cohomology => suites::cohomology_suite(cfg),
            Suite::Hodge => suites::hodge_suite(cfg),
        }
    }
}

/// Runs the suites concurrently and merges them in name order.
pub fn run_suites(cfg: &RunConfig, selected: &[Suite]) -> Result<Report> {
    use rayon::prelude::*;
    let results: Vec<Result<Vec<CheckRecord>>> = selected.par_iter().map(|s| s.run(cfg)).collect();
    let mut checks = Vec::new();
    for r in results {
        checks.extend(r?);
    }
    Ok(Report::new(Environment::capture(cfg), checks))
}

pub fn cmd_verify_module(cfg: &RunConfig) -> Result<Report> {
    run_suites(cfg, &[Suite::Module])
}

pub fn cmd_verify_equivariance(cfg: &RunConfig) -> Result<Report> {
    run_suites(cfg, &[Suite::Equivariance])
}

pub fn cmd_cohomology(cfg: &RunConfig) -> Result<Report> {
    run_suites(cfg, &[Suite::Cohomology])
}

pub fn cmd_hodge(cfg: &RunConfig) -> Result<Report> {
    run_suites(cfg, &[Suite::Hodge])
}

pub fn cmd_report_all(cfg: &RunConfig) -> Result<Report> {
    run_suites(cfg, &Suite::ALL)
}

/// `(ranks, expected)` for the configured gauge, as printed by `cohomology`.
pub fn rank_tuple(cfg: &RunConfig) -> Result<([usize; 3], [usize; 3])> {
    let grid = TorusGrid::new(cfg.grid)?;
    let gauge = match cfg.gauge {
        GaugeChoice::Identity => GaugeField::identity(grid, cfg.n),
        GaugeChoice::Random => {
            GaugeField::random(grid, cfg.n, &mut Sampler::derived(cfg.seed, "rank-tuple"))
        }
    };
    let r = kuiper::cohomology_ranks(&gauge)?;
    Ok((r.ranks, r.expected))
}

pub fn write_report(report: &Report, path: &Path) -> Result<()> {
    let mut file =
        std::fs::File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    file.write_all(report.to_json().as_bytes())
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn exit_code(report: &Report) -> i32 {
    if report.pass {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}
