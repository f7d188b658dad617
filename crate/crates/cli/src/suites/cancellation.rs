//! Trace-function suite: the closed-form identities (L̂, Z, shifted
//! Plancherel) on their moduli, and the square-root-cancellation statistic
//! scanned over random unit tuples with degenerate directions monitored.

use num_complex::Complex64;
use rayon::prelude::*;

use deltasum_core::arith::is_prime;
use deltasum_core::characters::primitive_characters;
use deltasum_core::expsums::{
    cancellation_scan, finite_fourier, is_degenerate_pair, l_hat_closed_form, l_table,
    mult_convolution, shifted_correlation, shifted_correlation_dual, z_transform,
    z_via_transform_chain, CancellationRow, Kl2Table, TraceFunctionParams,
};

use crate::config::GridConfig;
use crate::report::{CaseResult, VerificationReport};

/// splitmix64: deterministic, seedable, and free of external state.
#[derive(Debug, Clone)]
pub struct SplitMix64(u64);

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// A unit mod p (p prime).
    pub fn unit(&mut self, p: u64) -> i64 {
        (self.next_u64() % (p - 1) + 1) as i64
    }
}

/// One row of the emitted cancellation CSV.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CancellationCsvRow {
    pub m1: u64,
    pub alpha: i64,
    pub beta: i64,
    pub gamma: i64,
    pub alpha_p: i64,
    pub beta_p: i64,
    pub gamma_p: i64,
    pub eta: i64,
    pub value_re: f64,
    pub value_im: f64,
    pub abs: f64,
    pub ratio_to_sqrt_m1: f64,
}

/// Scan results kept for CSV emission next to the report.
pub struct CancellationOutput {
    pub report: VerificationReport,
    pub rows: Vec<CancellationCsvRow>,
}

pub fn run(cfg: &GridConfig) -> anyhow::Result<VerificationReport> {
    Ok(run_with_rows(cfg)?.report)
}

pub fn run_with_rows(cfg: &GridConfig) -> anyhow::Result<CancellationOutput> {
    let mut report = VerificationReport::new("cancellation", cfg.echo());
    let cc = &cfg.cancellation;
    let tol = 1e-10 * cfg.global.tolerance_scale;

    // Closed-form identities per modulus and character.
    for &m1 in &cc.calculus_moduli {
        let kl2 = Kl2Table::build(m1);
        let mut rng = SplitMix64::new(cc.seed ^ m1);
        for chi in primitive_characters(m1)? {
            let chi_id = chi.label()[0].1;
            let mut tuples: Vec<(i64, i64, i64)> = vec![(1, 1, 1), (2 % m1 as i64, 1, 1)];
            while tuples.len() < cc.calculus_tuples {
                tuples.push((rng.unit(m1), rng.unit(m1), rng.unit(m1)));
            }
            for (idx, &(alpha, beta, gamma)) in tuples.iter().enumerate() {
                // L̂ closed form against the transform route.
                let hat = finite_fourier(&l_table(alpha, beta, m1, &chi), m1);
                let mut worst = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), 0.0f64);
                for v in 0..m1 as i64 {
                    let closed = l_hat_closed_form(alpha, beta, v, m1, &chi, &kl2)?;
                    let diff = (closed - hat[v as usize]).norm();
                    if diff > worst.2 {
                        worst = (closed, hat[v as usize], diff);
                    }
                }
                report.push(CaseResult::compare(
                    format!("lhat M1={m1} chi={chi_id} t={idx:02} a={alpha} b={beta}"),
                    "l-hat-closed-form",
                    worst.0,
                    worst.1,
                    tol,
                    false,
                    true,
                ));

                // Z closed form against the convolution-transform chain.
                let z = z_transform(alpha, beta, gamma, m1, &chi, &kl2)?;
                let chain = z_via_transform_chain(alpha, beta, gamma, m1, &chi, &kl2);
                let mut worst = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), 0.0f64);
                for v in 0..m1 as usize {
                    let diff = (z[v] - chain[v]).norm();
                    if diff > worst.2 {
                        worst = (z[v], chain[v], diff);
                    }
                }
                report.push(CaseResult::compare(
                    format!("z M1={m1} chi={chi_id} t={idx:02} a={alpha} b={beta} g={gamma}"),
                    "z-closed-form",
                    worst.0,
                    worst.1,
                    tol,
                    false,
                    true,
                ));

                // Shifted Plancherel for the pair (K⋆L, K'⋆L') with an
                // independent primed tuple.
                let (ap, bp, gp) = (rng.unit(m1), rng.unit(m1), rng.unit(m1));
                let k: Vec<Complex64> = (0..m1 as i64).map(|u| kl2.get(gamma * u)).collect();
                let kp: Vec<Complex64> = (0..m1 as i64).map(|u| kl2.get(gp * u)).collect();
                let conv = mult_convolution(&k, &l_table(alpha, beta, m1, &chi), m1);
                let conv_p = mult_convolution(&kp, &l_table(ap, bp, m1, &chi), m1);
                let hat = finite_fourier(&conv, m1);
                let hat_p = finite_fourier(&conv_p, m1);
                for eta in 0..m1 as i64 {
                    let lhs = shifted_correlation(&conv, &conv_p, eta, m1);
                    let rhs = shifted_correlation_dual(&hat, &hat_p, eta, m1);
                    if eta <= 2 || (lhs - rhs).norm() > tol {
                        report.push(CaseResult::compare(
                            format!(
                                "plancherel M1={m1} chi={chi_id} t={idx:02} eta={eta}"
                            ),
                            "shifted-plancherel",
                            lhs,
                            rhs,
                            tol,
                            false,
                            true,
                        ));
                    }
                }
            }
        }
    }

    // Cancellation statistic over generic tuples.
    let primes: Vec<u64> = (cc.m1_min..=cc.m1_max).filter(|&p| is_prime(p)).collect();
    let per_prime: Vec<(Vec<CancellationCsvRow>, Vec<CaseResult>, Vec<String>)> = primes
        .par_iter()
        .map(|&m1| scan_modulus(m1, cfg))
        .collect::<anyhow::Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    for (mut r, cases, notes) in per_prime {
        rows.append(&mut r);
        for c in cases {
            report.push(c);
        }
        for n in notes {
            report.note(n);
        }
    }

    Ok(CancellationOutput { report, rows })
}

fn scan_modulus(
    m1: u64,
    cfg: &GridConfig,
) -> anyhow::Result<(Vec<CancellationCsvRow>, Vec<CaseResult>, Vec<String>)> {
    let cc = &cfg.cancellation;
    let mut rng = SplitMix64::new(cc.seed.wrapping_mul(0x51ed_2701).wrapping_add(m1));
    let chi = primitive_characters(m1)?.remove(0);
    let sqrt_m1 = (m1 as f64).sqrt();
    let mut rows = Vec::new();
    let mut cases = Vec::new();
    let mut notes = Vec::new();

    let mut generic_max_ratio = 0.0f64;
    let mut ratios = Vec::new();
    for t in 0..cc.tuples_per_modulus {
        let params = TraceFunctionParams {
            m1,
            alpha: rng.unit(m1),
            beta: rng.unit(m1),
            gamma: rng.unit(m1),
            alpha_p: rng.unit(m1),
            beta_p: rng.unit(m1),
            gamma_p: rng.unit(m1),
            eta: 0,
            chi1: chi.clone(),
        };
        let scan: Vec<CancellationRow> = cancellation_scan(&params)?;
        for r in &scan {
            rows.push(CancellationCsvRow {
                m1,
                alpha: params.alpha,
                beta: params.beta,
                gamma: params.gamma,
                alpha_p: params.alpha_p,
                beta_p: params.beta_p,
                gamma_p: params.gamma_p,
                eta: r.eta,
                value_re: r.value.re,
                value_im: r.value.im,
                abs: r.value.norm(),
                ratio_to_sqrt_m1: r.ratio_to_sqrt_m1,
            });
        }
        let max_nonzero = scan
            .iter()
            .filter(|r| r.eta != 0)
            .fold(0.0f64, |m, r| m.max(r.ratio_to_sqrt_m1));
        generic_max_ratio = generic_max_ratio.max(max_nonzero);
        ratios.push(max_nonzero);
        if is_degenerate_pair(&params) {
            notes.push(format!("tuple {t} at M1={m1} is degenerate by chance"));
        }
    }
    // Monitored soft threshold on the generic scan.
    cases.push(CaseResult::bound(
        format!("cancellation M1={m1:03} max ratio"),
        "square-root-cancellation",
        generic_max_ratio,
        cc.soft_threshold,
        false,
    ));
    let mean = ratios.iter().sum::<f64>() / ratios.len().max(1) as f64;
    notes.push(format!(
        "M1={m1}: max|ZZ'|/sqrt(M1) over eta!=0: max={generic_max_ratio:.3} mean={mean:.3}"
    ));

    // Degenerate direction: α = α', βγ = β'γ', η = 0 should sit at ≈ M₁.
    let alpha = rng.unit(m1);
    let beta = rng.unit(m1);
    let gamma = rng.unit(m1);
    let params = TraceFunctionParams {
        m1,
        alpha,
        beta,
        gamma,
        alpha_p: alpha,
        beta_p: beta,
        gamma_p: gamma,
        eta: 0,
        chi1: chi,
    };
    debug_assert!(is_degenerate_pair(&params));
    let scan = cancellation_scan(&params)?;
    let at_zero = scan[0].value.norm();
    // Within a factor of 3 of M₁, reported only.
    let factor = (at_zero / m1 as f64).max(m1 as f64 / at_zero.max(1e-300));
    cases.push(CaseResult::bound(
        format!("degenerate M1={m1:03} |corr(0)| vs M1"),
        "degenerate-direction-magnitude",
        factor,
        3.0,
        false,
    ));
    notes.push(format!(
        "M1={m1}: degenerate corr(0) = {:.3}·M1; sqrt(M1) reference = {sqrt_m1:.3}",
        at_zero / m1 as f64
    ));
    Ok((rows, cases, notes))
}
