//! Dual-expansion suite on the weight-12 form over the (a, c, N) grid.

use rayon::prelude::*;

use deltasum_core::arith::gcd;
use deltasum_core::oscillatory::tau::TauTable;
use deltasum_core::oscillatory::voronoi::gl2_voronoi_check;
use deltasum_core::weights::SmoothWeight;

use crate::config::GridConfig;
use crate::report::{CaseResult, VerificationReport};

pub fn run(cfg: &GridConfig) -> anyhow::Result<VerificationReport> {
    let mut report = VerificationReport::new("voronoi-gl2", cfg.echo());
    let vc = &cfg.voronoi;
    let tol = vc.tolerance * cfg.global.tolerance_scale;
    let tau = TauTable::build(vc.coeff_budget);
    let phi = SmoothWeight::plateau(0.8, 1.0, 2.0, 2.2);

    let mut jobs = Vec::new();
    for c in 1..=vc.c_max {
        for a in 1..=c {
            if gcd(a, c) == 1 {
                for &n in &vc.n_values {
                    jobs.push((a as i64, c, n));
                }
            }
        }
    }
    let cases: Vec<CaseResult> = jobs
        .par_iter()
        .map(|&(a, c, n)| {
            let rep = gl2_voronoi_check(a, c, &phi, n, vc.coeff_budget, &tau, tol)?;
            let mut case = CaseResult::compare(
                format!("voronoi a={a} c={c} N={n}"),
                "gl2-voronoi-identity",
                rep.lhs,
                rep.rhs,
                tol,
                true,
                true,
            );
            // Report the truncation information through the rel field's
            // companion: keep abs_diff as computed, note dual terms in case.
            case.case = format!(
                "voronoi a={a} c={c} N={n} (dual terms {}, tail {:.1e})",
                rep.dual_terms, rep.tail_estimate
            );
            Ok(case)
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    for c in cases {
        report.push(c);
    }
    Ok(report)
}
