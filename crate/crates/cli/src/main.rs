//! Command-line front door.
//!
//! Exit codes: 0 all hard assertions passed, 1 hard assertion failed,
//! 2 configuration error, 3 numeric failure (quadrature or truncation).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use deltasum_cli::config::GridConfig;
use deltasum_cli::report::{emit_report, ReportFormat};
use deltasum_cli::suites::{cancellation, run_suite, SuiteName};

#[derive(Parser)]
#[command(
    name = "deltasum",
    about = "Verification suites for delta-method decompositions, twisted character sums and oscillatory transforms",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct CommonArgs {
    /// TOML configuration file; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Report output path (default: <suite>-report.<ext>).
    #[arg(long)]
    report: Option<PathBuf>,
    /// Report format.
    #[arg(long, value_parser = ["json", "csv"], default_value = "json")]
    format: String,
    /// Worker threads (0 = library default).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Scale factor on every hard tolerance.
    #[arg(long)]
    tolerance: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Factorization identities, correlation structure and Weil bounds.
    VerifyCharsum {
        #[command(flatten)]
        common: CommonArgs,
        /// Restrict to one modulus pair.
        #[arg(long)]
        m1: Option<u64>,
        #[arg(long)]
        m2: Option<u64>,
        /// Largest q in the factorization grid (powers of 2 up to this).
        #[arg(long)]
        q_max: Option<u64>,
        #[arg(long)]
        r_max: Option<u64>,
        #[arg(long)]
        n2_max: Option<u64>,
        /// Character pair indices "j1,j2" (may repeat).
        #[arg(long = "char-index")]
        char_index: Vec<String>,
        /// Skip the correlation part.
        #[arg(long)]
        no_correlations: bool,
    },
    /// Delta values and the conductor-lowering rearrangement.
    VerifyDelta {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long = "Q")]
        big_q: Option<f64>,
        #[arg(long)]
        m1: Option<u64>,
        #[arg(long)]
        m2: Option<u64>,
        /// n range as "lo:hi".
        #[arg(long)]
        n_range: Option<String>,
        /// Weight stub: one | rational | dfi (may repeat).
        #[arg(long)]
        stub: Vec<String>,
    },
    /// Square-root-cancellation statistic and trace-function closed forms.
    ScanCancellation {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        m1_min: Option<u64>,
        #[arg(long)]
        m1_max: Option<u64>,
        #[arg(long)]
        tuples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Dual-expansion identity on the weight-12 form.
    VoronoiGl2 {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        c_max: Option<u64>,
        #[arg(long)]
        coeff_budget: Option<usize>,
    },
    /// Dual-frequency and kernel decay scans.
    ScanDecay {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Transform self-consistency checks.
    Transforms {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Every suite in sequence.
    All {
        #[command(flatten)]
        common: CommonArgs,
    },
}

fn load_config(common: &CommonArgs) -> Result<GridConfig, ExitCode> {
    let mut cfg = match &common.config {
        Some(path) => GridConfig::load(path).map_err(|e| {
            eprintln!("{e}");
            ExitCode::from(2)
        })?,
        None => GridConfig::default(),
    };
    if let Some(t) = common.tolerance {
        cfg.global.tolerance_scale = t;
    }
    cfg.global.jobs = common.jobs;
    cfg.validate().map_err(|e| {
        eprintln!("{e}");
        ExitCode::from(2)
    })?;
    if cfg.global.jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.global.jobs)
            .build_global()
            .ok();
    }
    Ok(cfg)
}

fn parse_char_indices(raw: &[String]) -> Result<Vec<(u64, u64)>, ExitCode> {
    raw.iter()
        .map(|s| {
            let parts: Vec<&str> = s.split(',').collect();
            if parts.len() != 2 {
                eprintln!("invalid config: --char-index wants \"j1,j2\", got {s:?}");
                return Err(ExitCode::from(2));
            }
            let j1 = parts[0].trim().parse().map_err(|_| ExitCode::from(2))?;
            let j2 = parts[1].trim().parse().map_err(|_| ExitCode::from(2))?;
            Ok((j1, j2))
        })
        .collect()
}

fn run(name: SuiteName, cfg: &GridConfig, common: &CommonArgs) -> ExitCode {
    let report = match run_suite(name, cfg) {
        Ok(r) => r,
        Err(e) => {
            // Numeric failures (quadrature/truncation) exit with 3.
            eprintln!("suite {} failed: {e}", name.as_str());
            return ExitCode::from(3);
        }
    };
    let format = if common.format == "csv" { ReportFormat::Csv } else { ReportFormat::Json };
    let ext = if format == ReportFormat::Csv { "csv" } else { "json" };
    let path = common
        .report
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}-report.{ext}", name.as_str())));
    if let Err(e) = emit_report(&report, format, &path) {
        eprintln!("cannot write report {}: {e}", path.display());
        return ExitCode::from(2);
    }

    // The cancellation scan additionally emits its per-tuple CSV.
    if name == SuiteName::Cancellation || name == SuiteName::All {
        match cancellation::run_with_rows(cfg) {
            Ok(out) => {
                let csv_path = path.with_extension("rows.csv");
                if let Ok(mut w) = csv::Writer::from_path(&csv_path) {
                    for row in &out.rows {
                        let _ = w.serialize(row);
                    }
                    let _ = w.flush();
                    println!("cancellation rows: {}", csv_path.display());
                }
            }
            Err(e) => eprintln!("cancellation rows not emitted: {e}"),
        }
    }

    println!(
        "suite {}: {} cases, {} passed, {} hard failures, {} monitored flags ({} notes) in {:.1?}",
        report.suite,
        report.summary.total,
        report.summary.passed,
        report.summary.hard_failed,
        report.summary.monitored_failed,
        report.notes.len(),
        report.wall_clock
    );
    println!("report: {}", path.display());
    if report.all_hard_passed() {
        ExitCode::SUCCESS
    } else {
        for c in report.cases.iter().filter(|c| !c.pass && c.hard).take(10) {
            eprintln!("FAIL {} [{}] diff {:.3e}", c.case, c.identity, c.abs_diff);
        }
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::VerifyCharsum {
            common,
            m1,
            m2,
            q_max,
            r_max,
            n2_max,
            char_index,
            no_correlations,
        } => {
            let mut cfg = match load_config(&common) {
                Ok(c) => c,
                Err(e) => return e,
            };
            if let (Some(m1), Some(m2)) = (m1, m2) {
                cfg.charsum.prime_pairs = vec![(m1, m2)];
            }
            if let Some(q) = q_max {
                cfg.charsum.q_values = (0..).map(|k| 1u64 << k).take_while(|&v| v <= q).collect();
            }
            if let Some(r) = r_max {
                cfg.charsum.r_max = r;
            }
            if let Some(n2) = n2_max {
                cfg.charsum.n2_max = n2;
            }
            match parse_char_indices(&char_index) {
                Ok(v) => cfg.charsum.char_index = v,
                Err(e) => return e,
            }
            if no_correlations {
                cfg.charsum.correlations = false;
            }
            if let Err(e) = cfg.validate() {
                eprintln!("{e}");
                return ExitCode::from(2);
            }
            run(SuiteName::Charsum, &cfg, &common)
        }
        Command::VerifyDelta { common, big_q, m1, m2, n_range, stub } => {
            let mut cfg = match load_config(&common) {
                Ok(c) => c,
                Err(e) => return e,
            };
            if let Some(q) = big_q {
                cfg.delta.big_q = q;
                cfg.delta.rearrangement_q = vec![q];
            }
            if let (Some(m1), Some(m2)) = (m1, m2) {
                cfg.delta.rearrangement_pairs = vec![(m1, m2)];
            }
            if let Some(range) = n_range {
                let parts: Vec<&str> = range.split(':').collect();
                if parts.len() != 2 {
                    eprintln!("invalid config: --n-range wants \"lo:hi\", got {range:?}");
                    return ExitCode::from(2);
                }
                match (parts[0].parse(), parts[1].parse()) {
                    (Ok(lo), Ok(hi)) => {
                        cfg.delta.n_min = lo;
                        cfg.delta.n_max = hi;
                    }
                    _ => {
                        eprintln!("invalid config: --n-range wants integers");
                        return ExitCode::from(2);
                    }
                }
            }
            if !stub.is_empty() {
                cfg.delta.stubs = stub;
            }
            if let Err(e) = cfg.validate() {
                eprintln!("{e}");
                return ExitCode::from(2);
            }
            run(SuiteName::Delta, &cfg, &common)
        }
        Command::ScanCancellation { common, m1_min, m1_max, tuples, seed } => {
            let mut cfg = match load_config(&common) {
                Ok(c) => c,
                Err(e) => return e,
            };
            if let Some(v) = m1_min {
                cfg.cancellation.m1_min = v;
            }
            if let Some(v) = m1_max {
                cfg.cancellation.m1_max = v;
            }
            if let Some(v) = tuples {
                cfg.cancellation.tuples_per_modulus = v;
            }
            if let Some(v) = seed {
                cfg.cancellation.seed = v;
            }
            if let Err(e) = cfg.validate() {
                eprintln!("{e}");
                return ExitCode::from(2);
            }
            run(SuiteName::Cancellation, &cfg, &common)
        }
        Command::VoronoiGl2 { common, c_max, coeff_budget } => {
            let mut cfg = match load_config(&common) {
                Ok(c) => c,
                Err(e) => return e,
            };
            if let Some(v) = c_max {
                cfg.voronoi.c_max = v;
            }
            if let Some(v) = coeff_budget {
                cfg.voronoi.coeff_budget = v;
            }
            run(SuiteName::VoronoiGl2, &cfg, &common)
        }
        Command::ScanDecay { common } => {
            let cfg = match load_config(&common) {
                Ok(c) => c,
                Err(e) => return e,
            };
            run(SuiteName::Decay, &cfg, &common)
        }
        Command::Transforms { common } => {
            let cfg = match load_config(&common) {
                Ok(c) => c,
                Err(e) => return e,
            };
            run(SuiteName::Transforms, &cfg, &common)
        }
        Command::All { common } => {
            let cfg = match load_config(&common) {
                Ok(c) => c,
                Err(e) => return e,
            };
            run(SuiteName::All, &cfg, &common)
        }
    }
}
