//! Ramanujan τ(n) from the weight-12 eta product q·Π_{n≥1}(1−qⁿ)²⁴ in
//! exact integer arithmetic.
//!
//! Π(1−qⁿ) is expanded by the pentagonal number theorem
//! Σ_{k∈Z} (−1)^k q^{k(3k−1)/2}, and the 24th power by repeated
//! multiplication with that sparse series; coefficients stay inside i128
//! for every budget in scope (|τ(n)| < n^{6}).

/// Table of τ(1), …, τ(budget).
#[derive(Debug, Clone)]
pub struct TauTable {
    values: Vec<i128>,
}

impl TauTable {
    /// Expand the eta product up to q^budget.
    pub fn build(budget: usize) -> Self {
        assert!(budget >= 1 && budget <= 100_000);
        let len = budget; // coefficients of q^0 .. q^{budget-1} in Π^24
        // Pentagonal series: exponent k(3k−1)/2, sign (−1)^k, k ∈ Z \ {0}.
        let mut pent: Vec<(usize, i128)> = vec![(0, 1)];
        let mut k = 1i64;
        loop {
            let e1 = k * (3 * k - 1) / 2;
            let e2 = k * (3 * k + 1) / 2;
            if e1 as usize >= len && e2 as usize >= len {
                break;
            }
            let sign = if k % 2 == 0 { 1i128 } else { -1 };
            if (e1 as usize) < len {
                pent.push((e1 as usize, sign));
            }
            if (e2 as usize) < len {
                pent.push((e2 as usize, sign));
            }
            k += 1;
        }
        pent.sort_unstable();

        let mut acc = vec![0i128; len];
        acc[0] = 1;
        for _ in 0..24 {
            let mut next = vec![0i128; len];
            for (e, s) in &pent {
                for i in 0..len - e {
                    if acc[i] != 0 {
                        next[i + e] += s * acc[i];
                    }
                }
            }
            acc = next;
        }
        // τ(n) is the coefficient of q^n in q·Π^24, i.e. acc[n−1].
        Self { values: acc }
    }

    pub fn budget(&self) -> usize {
        self.values.len()
    }

    /// τ(n) for 1 ≤ n ≤ budget.
    pub fn tau(&self, n: usize) -> i128 {
        self.values[n - 1]
    }

    /// Hecke-normalized coefficient λ(n) = τ(n)/n^{11/2}.
    pub fn lambda(&self, n: usize) -> f64 {
        self.tau(n) as f64 / (n as f64).powf(5.5)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: multiply out (1−q)^24·(1−q²)^24·… directly.
    fn eta24_direct(len: usize) -> Vec<i128> {
        let mut acc = vec![0i128; len];
        acc[0] = 1;
        for n in 1..len {
            for _ in 0..24 {
                // multiply by (1 − q^n)
                for i in (n..len).rev() {
                    let t = acc[i - n];
                    acc[i] -= t;
                }
            }
        }
        acc
    }

    #[test]
    fn matches_direct_expansion() {
        let table = TauTable::build(64);
        let direct = eta24_direct(64);
        for n in 1..=64usize {
            assert_eq!(table.tau(n), direct[n - 1], "n={n}");
        }
    }

    #[test]
    fn first_values() {
        let table = TauTable::build(10);
        assert_eq!(table.tau(1), 1);
        assert_eq!(table.tau(2), -24);
        assert_eq!(table.tau(3), 252);
        assert_eq!(table.tau(4), -1472);
        assert_eq!(table.tau(5), 4830);
        assert_eq!(table.tau(6), -6048);
    }

    #[test]
    fn hecke_multiplicativity() {
        // τ(mn) = τ(m)τ(n) for coprime m, n; τ(p²) = τ(p)² − p^11.
        let t = TauTable::build(200);
        for (m, n) in [(2usize, 3usize), (3, 5), (4, 9), (5, 7), (8, 25)] {
            assert_eq!(t.tau(m * n), t.tau(m) * t.tau(n), "({m},{n})");
        }
        for p in [2usize, 3, 5, 7, 11] {
            assert_eq!(
                t.tau(p * p),
                t.tau(p) * t.tau(p) - (p as i128).pow(11),
                "p={p}"
            );
        }
    }

    #[test]
    fn deligne_bound() {
        // |λ(n)| ≤ d(n).
        let t = TauTable::build(500);
        for n in 1..=500usize {
            let d = (1..=n).filter(|k| n % k == 0).count() as f64;
            assert!(t.lambda(n).abs() <= d + 1e-9, "n={n}");
        }
    }
}
