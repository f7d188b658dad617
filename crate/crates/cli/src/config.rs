//! Declarative suite configuration: one TOML file with per-suite sections,
//! overridable from the command line. The effective config is echoed into
//! every report.

use serde::{Deserialize, Serialize};

use deltasum_core::arith::is_prime;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GlobalConfig {
    /// Worker threads; 0 keeps the library default.
    pub jobs: usize,
    /// Multiplier applied to every hard tolerance.
    pub tolerance_scale: f64,
}

impl Default for GlobalConfig {
    fn default() -> Self {
        Self { jobs: 0, tolerance_scale: 1.0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CharsumConfig {
    pub prime_pairs: Vec<(u64, u64)>,
    pub q_values: Vec<u64>,
    pub r_max: u64,
    pub n2_max: u64,
    pub m_max: u64,
    /// Restrict to one character pair (index per prime factor); empty = all.
    pub char_index: Vec<(u64, u64)>,
    /// Correlation extension: candidate q₁, q₂, q₂′ values.
    pub q1_values: Vec<u64>,
    pub q2_values: Vec<u64>,
    pub n2_tilde_values: Vec<i64>,
    /// Run the correlation part of the suite.
    pub correlations: bool,
}

impl Default for CharsumConfig {
    fn default() -> Self {
        Self {
            prime_pairs: vec![(3, 5), (5, 3), (5, 7), (7, 5), (11, 3), (3, 11)],
            q_values: vec![1, 2, 4],
            r_max: 2,
            n2_max: 3,
            m_max: 2,
            char_index: Vec::new(),
            q1_values: vec![1, 2, 3],
            q2_values: vec![1, 2, 3],
            n2_tilde_values: vec![0, 1, 2],
            correlations: true,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeltaConfig {
    pub big_q: f64,
    pub n_min: i64,
    pub n_max: i64,
    pub rearrangement_q: Vec<f64>,
    pub rearrangement_pairs: Vec<(u64, u64)>,
    pub stubs: Vec<String>,
}

impl Default for DeltaConfig {
    fn default() -> Self {
        Self {
            big_q: 40.0,
            n_min: -20,
            n_max: 20,
            rearrangement_q: vec![10.0, 20.0, 31.0],
            rearrangement_pairs: vec![(3, 5), (5, 3), (5, 7), (7, 5)],
            stubs: vec!["one".into(), "rational".into(), "dfi".into()],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CancellationConfig {
    pub m1_min: u64,
    pub m1_max: u64,
    pub tuples_per_modulus: usize,
    pub soft_threshold: f64,
    pub seed: u64,
    /// Trace-calculus identity moduli (closed forms + shifted Plancherel).
    pub calculus_moduli: Vec<u64>,
    pub calculus_tuples: usize,
}

impl Default for CancellationConfig {
    fn default() -> Self {
        Self {
            m1_min: 5,
            m1_max: 97,
            tuples_per_modulus: 50,
            soft_threshold: 10.0,
            seed: 1,
            calculus_moduli: vec![3, 5, 7, 11, 13],
            calculus_tuples: 20,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VoronoiConfig {
    pub c_max: u64,
    pub n_values: Vec<f64>,
    pub coeff_budget: usize,
    pub tolerance: f64,
}

impl Default for VoronoiConfig {
    fn default() -> Self {
        Self { c_max: 5, n_values: vec![20.0, 30.0, 40.0, 50.0], coeff_budget: 4000, tolerance: 1e-5 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecayConfig {
    pub n: f64,
    pub m1: f64,
    pub c: f64,
    pub y1: f64,
    pub y2_scale: f64,
    pub tail_ratio_bound: f64,
    pub w_dagger_a: f64,
    pub psi_minus_mu: f64,
    pub psi_minus_x: Vec<f64>,
}

impl Default for DecayConfig {
    fn default() -> Self {
        Self {
            n: 1e4,
            m1: 10.0,
            c: 4.0,
            y1: 0.5,
            y2_scale: 1e-4,
            tail_ratio_bound: 1e-3,
            w_dagger_a: 50.0,
            psi_minus_mu: 1.0,
            psi_minus_x: vec![25.0, 40.0, 80.0],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TransformsConfig {
    pub n: f64,
    pub m1: f64,
    pub q: f64,
    pub zeta: f64,
    pub x_small: f64,
    pub y2: f64,
}

impl Default for TransformsConfig {
    fn default() -> Self {
        Self { n: 1e4, m1: 10.0, q: 3.0, zeta: 1.0, x_small: 0.5, y2: 1.0 / 2.7e4 }
    }
}

/// The whole declarative configuration.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub global: GlobalConfig,
    pub charsum: CharsumConfig,
    pub delta: DeltaConfig,
    pub cancellation: CancellationConfig,
    pub voronoi: VoronoiConfig,
    pub decay: DecayConfig,
    pub transforms: TransformsConfig,
}

/// A config error with field-level diagnostics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigInvalid {
    pub problems: Vec<String>,
}

impl std::fmt::Display for ConfigInvalid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "invalid config: {}", self.problems.join("; "))
    }
}

impl std::error::Error for ConfigInvalid {}

impl GridConfig {
    pub fn from_toml_str(s: &str) -> Result<Self, ConfigInvalid> {
        let cfg: GridConfig = toml::from_str(s)
            .map_err(|e| ConfigInvalid { problems: vec![format!("parse error: {e}")] })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, ConfigInvalid> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigInvalid { problems: vec![format!("{}: {e}", path.display())] })?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigInvalid> {
        let mut problems = Vec::new();
        for &(m1, m2) in &self.charsum.prime_pairs {
            if m1 == m2 {
                problems.push(format!("charsum.prime_pairs: M1 = M2 = {m1}"));
            }
            for p in [m1, m2] {
                if !is_prime(p) || p == 2 {
                    problems.push(format!("charsum.prime_pairs: {p} is not an odd prime"));
                }
            }
        }
        if self.delta.big_q < 2.0 {
            problems.push(format!("delta.big_q = {} must be ≥ 2", self.delta.big_q));
        }
        for &(m1, m2) in &self.delta.rearrangement_pairs {
            if m1 == m2 || !is_prime(m1) || !is_prime(m2) {
                problems.push(format!(
                    "delta.rearrangement_pairs: ({m1}, {m2}) must be distinct primes"
                ));
            }
        }
        for s in &self.delta.stubs {
            if !matches!(s.as_str(), "one" | "rational" | "dfi") {
                problems.push(format!("delta.stubs: unknown stub {s:?}"));
            }
        }
        if self.cancellation.m1_min < 3 {
            problems.push("cancellation.m1_min must be ≥ 3".into());
        }
        if self.voronoi.tolerance <= 0.0 || self.voronoi.tolerance > 1e-2 {
            problems.push(format!(
                "voronoi.tolerance = {} out of (0, 1e-2]",
                self.voronoi.tolerance
            ));
        }
        if self.global.tolerance_scale <= 0.0 {
            problems.push("global.tolerance_scale must be positive".into());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(ConfigInvalid { problems })
        }
    }

    /// The echo embedded into reports.
    pub fn echo(&self) -> toml::Value {
        toml::Value::try_from(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid() {
        GridConfig::default().validate().unwrap();
    }

    #[test]
    fn equal_primes_rejected() {
        let mut cfg = GridConfig::default();
        cfg.charsum.prime_pairs = vec![(5, 5)];
        let err = cfg.validate().unwrap_err();
        assert!(err.problems[0].contains("M1 = M2"));
    }

    #[test]
    fn toml_roundtrip() {
        let cfg = GridConfig::default();
        let text = toml::to_string(&cfg).unwrap();
        let back = GridConfig::from_toml_str(&text).unwrap();
        assert_eq!(back.charsum.prime_pairs, cfg.charsum.prime_pairs);
    }

    #[test]
    fn unknown_stub_rejected() {
        let mut cfg = GridConfig::default();
        cfg.delta.stubs = vec!["bogus".into()];
        assert!(cfg.validate().is_err());
    }
}
