//! Delta-symbol suite: the conductor-lowering rearrangement on its grid,
//! the delta values themselves, the unit bijection, the term ledger, and
//! the weight's decay properties.

use num_complex::Complex64;
use rayon::prelude::*;

use deltasum_core::arith::FactoredModulus;
use deltasum_core::delta::{
    congruence_detector_check, delta_eval, lemma21_rearrangement_check, unit_bijection_check,
    DeltaParams, DfiWeight, OmegaStub, TermLedger,
};

use crate::config::GridConfig;
use crate::report::{CaseResult, VerificationReport};

/// Shared ζ-nodes for the rearrangement checks: the identity is exact per
/// node, so any fixed set serves.
fn shared_nodes() -> Vec<(f64, f64)> {
    (0..9)
        .map(|k| (-2.0 + 0.5 * k as f64, 0.31 + 0.07 * (k % 4) as f64))
        .collect()
}

pub fn run(cfg: &GridConfig) -> anyhow::Result<VerificationReport> {
    let mut report = VerificationReport::new("delta", cfg.echo());
    let dc = &cfg.delta;
    let tol_exact = 1e-10 * cfg.global.tolerance_scale;
    let tol_delta = 1e-6 * cfg.global.tolerance_scale;

    // Rearrangement grid: n × (M₁,M₂) × Q × stub.
    let weights: Vec<(f64, DfiWeight)> = dc
        .rearrangement_q
        .iter()
        .map(|&q| (q, DfiWeight::new(DeltaParams::new(q))))
        .collect();
    let nodes = shared_nodes();
    let mut jobs = Vec::new();
    for &(m1, m2) in &dc.rearrangement_pairs {
        for &(big_q, _) in &weights {
            for stub_name in &dc.stubs {
                for n in dc.n_min..=dc.n_max {
                    jobs.push((m1, m2, big_q, stub_name.clone(), n));
                }
            }
        }
    }
    let cases: Vec<CaseResult> = jobs
        .par_iter()
        .map(|(m1, m2, big_q, stub_name, n)| {
            let m = FactoredModulus::new(*m1, *m2).expect("validated pair");
            let weight = &weights.iter().find(|(q, _)| q == big_q).unwrap().1;
            let stub = match stub_name.as_str() {
                "one" => OmegaStub::One,
                "rational" => OmegaStub::Rational,
                _ => OmegaStub::Dfi(weight),
            };
            let (lhs, rhs) = lemma21_rearrangement_check(*n, *big_q, &m, &stub, &nodes);
            CaseResult::compare(
                format!("rearrangement M=({m1},{m2}) Q={big_q} stub={stub_name} n={n:+03}"),
                "conductor-lowering-rearrangement",
                lhs,
                rhs,
                tol_exact,
                false,
                true,
            )
        })
        .collect();
    for c in cases {
        report.push(c);
    }

    // Delta values at the configured Q.
    let weight = DfiWeight::new(DeltaParams::new(dc.big_q));
    let d0 = delta_eval(0, &weight)?;
    report.push(CaseResult::compare(
        format!("delta Q={} n=0", dc.big_q),
        "delta-normalization",
        d0,
        Complex64::new(1.0, 0.0),
        tol_delta,
        false,
        true,
    ));
    for n in 1..=20i64 {
        for s in [1i64, -1] {
            let d = delta_eval(s * n, &weight)?;
            report.push(CaseResult::compare(
                format!("delta Q={} n={:+03}", dc.big_q, s * n),
                "delta-vanishing",
                d,
                Complex64::new(0.0, 0.0),
                tol_delta,
                false,
                true,
            ));
        }
    }

    // Term ledger multiset equality on the rearrangement grid.
    for &(m1, m2) in &dc.rearrangement_pairs {
        let m = FactoredModulus::new(m1, m2)?;
        for &big_q in &dc.rearrangement_q {
            let lhs = TermLedger::lhs(big_q, &m);
            let rhs = TermLedger::rhs(big_q, &m);
            report.push(CaseResult::bound(
                format!("ledger M=({m1},{m2}) Q={big_q} ({} keys)", lhs.len()),
                "term-ledger-multiset-equality",
                lhs.max_difference(&rhs),
                1e-12,
                true,
            ));
        }
    }

    // Unit bijection over the coprime grid.
    let mut worst = true;
    for m1 in [3u64, 5, 7, 11, 13] {
        for q in 1..=30u64 {
            if deltasum_core::arith::gcd(q, m1) == 1 {
                worst &= unit_bijection_check(q, m1)?;
            }
        }
    }
    report.push(CaseResult::bound(
        "unit bijection q<=30, M1 in {3,5,7,11,13}".into(),
        "unit-bijection",
        if worst { 0.0 } else { 1.0 },
        0.5,
        true,
    ));

    // Congruence detector spot grid.
    for (n, m1) in [(6i64, 3u64), (4, 3), (0, 7), (35, 5), (36, 5)] {
        let (lhs, rhs) = congruence_detector_check(n, m1);
        report.push(CaseResult::compare(
            format!("detector n={n} M1={m1}"),
            "congruence-detector",
            lhs,
            Complex64::new(rhs as f64, 0.0),
            1e-12,
            false,
            true,
        ));
    }

    // Weight properties: plateau near 1 (monitored) and the ζ-derivative
    // decay bound (hard with the measured constant).
    let w_small = weight.eval(1.0, 0.05)?;
    report.push(CaseResult::compare(
        "omega(1, 0.05)".into(),
        "weight-plateau",
        Complex64::new(w_small, 0.0),
        Complex64::new(1.0, 0.0),
        0.3,
        false,
        false,
    ));
    let log_q = dc.big_q.ln();
    let h = 1e-4;
    let mut worst_ratio = 0.0f64;
    for q in [1.0f64, 2.0, 5.0, 10.0, 20.0, dc.big_q - 1.0] {
        for zeta in [0.1f64, 0.5, 1.0, 2.0, 5.0, 10.0] {
            let d = (weight.eval(q, zeta + h)? - weight.eval(q, zeta - h)?) / (2.0 * h);
            let bound = log_q * (dc.big_q / q).min(1.0 / zeta);
            worst_ratio = worst_ratio.max((zeta * d).abs() / bound);
        }
    }
    report.push(CaseResult::bound(
        "zeta-derivative decay grid".into(),
        "weight-derivative-decay",
        worst_ratio,
        10.0,
        true,
    ));

    Ok(report)
}
