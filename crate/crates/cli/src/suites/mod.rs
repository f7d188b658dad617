//! The verification suites behind the CLI subcommands.

pub mod cancellation;
pub mod charsum;
pub mod decay;
pub mod delta;
pub mod transforms;
pub mod voronoi;

use std::time::Instant;

use crate::config::GridConfig;
use crate::report::VerificationReport;

/// Suite identifiers accepted by `run_suite`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuiteName {
    Charsum,
    Delta,
    Cancellation,
    VoronoiGl2,
    Decay,
    Transforms,
    All,
}

impl SuiteName {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "charsum" => Self::Charsum,
            "delta" => Self::Delta,
            "cancellation" => Self::Cancellation,
            "voronoi-gl2" => Self::VoronoiGl2,
            "decay" => Self::Decay,
            "transforms" => Self::Transforms,
            "all" => Self::All,
            _ => return None,
        })
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Charsum => "charsum",
            Self::Delta => "delta",
            Self::Cancellation => "cancellation",
            Self::VoronoiGl2 => "voronoi-gl2",
            Self::Decay => "decay",
            Self::Transforms => "transforms",
            Self::All => "all",
        }
    }
}

/// Execute a suite over the given config. The returned report is finalized
/// (sorted cases, summary counts, wall clock).
pub fn run_suite(name: SuiteName, cfg: &GridConfig) -> anyhow::Result<VerificationReport> {
    let started = Instant::now();
    let mut report = match name {
        SuiteName::Charsum => charsum::run(cfg)?,
        SuiteName::Delta => delta::run(cfg)?,
        SuiteName::Cancellation => cancellation::run(cfg)?,
        SuiteName::VoronoiGl2 => voronoi::run(cfg)?,
        SuiteName::Decay => decay::run(cfg)?,
        SuiteName::Transforms => transforms::run(cfg)?,
        SuiteName::All => {
            let mut all = VerificationReport::new("all", cfg.echo());
            for sub in [
                SuiteName::Charsum,
                SuiteName::Delta,
                SuiteName::Cancellation,
                SuiteName::VoronoiGl2,
                SuiteName::Decay,
                SuiteName::Transforms,
            ] {
                all.absorb(run_suite(sub, cfg)?);
            }
            all
        }
    };
    report.finalize();
    report.wall_clock = started.elapsed();
    Ok(report)
}
