//! Compactly supported smooth weights (the V, W, U, φ, ϖ roles) built from
//! the C∞ bump exp(−1/(x(1−x))).
//!
//! A [`SmoothWeight`] is either a pure bump on [lo, hi] or a plateau that is
//! identically 1 on an inner interval with bump-shaped shoulders. Values
//! vanish identically outside the support.

/// exp(−1/(t(1−t))) on (0,1), 0 outside, rescaled so the peak value is 1
/// (the raw peak at t = 1/2 is e^{−4}).
#[inline]
fn unit_bump(t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        0.0
    } else {
        (4.0 - 1.0 / (t * (1.0 - t))).exp()
    }
}

/// Smooth monotone step: 0 for t ≤ 0, 1 for t ≥ 1.
#[inline]
fn unit_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / t).exp();
        let b = (-1.0 / (1.0 - t)).exp();
        a / (a + b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Shape {
    /// Bump supported on [lo, hi], peak 1 at the midpoint.
    Bump { lo: f64, hi: f64 },
    /// 1 on [flat_lo, flat_hi], smooth shoulders down to 0 at lo and hi.
    Plateau { lo: f64, flat_lo: f64, flat_hi: f64, hi: f64 },
}

/// A compactly supported C∞ weight function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothWeight {
    shape: Shape,
}

impl SmoothWeight {
    /// Bump supported on [lo, hi] with peak value 1.
    pub fn bump(lo: f64, hi: f64) -> Self {
        assert!(lo < hi, "empty support");
        Self { shape: Shape::Bump { lo, hi } }
    }

    /// Plateau equal to 1 on [flat_lo, flat_hi], supported on [lo, hi].
    pub fn plateau(lo: f64, flat_lo: f64, flat_hi: f64, hi: f64) -> Self {
        assert!(lo < flat_lo && flat_lo < flat_hi && flat_hi < hi, "bad plateau");
        Self { shape: Shape::Plateau { lo, flat_lo, flat_hi, hi } }
    }

    /// The V of the main sums: a bump supported on [1, 2].
    pub fn v_weight() -> Self {
        Self::bump(1.0, 2.0)
    }

    /// The W of the dual sums: supported on (1/2, 5/2), 1 on [1, 2].
    pub fn w_weight() -> Self {
        Self::plateau(0.5, 1.0, 2.0, 2.5)
    }

    /// The U cutoff of the ζ-integrals: supported on (−2, 2), 1 on [−1, 1].
    pub fn u_cutoff() -> Self {
        Self::plateau(-2.0, -1.0, 1.0, 2.0)
    }

    /// The φ of the Poisson ξ-integrals: supported on [2/3, 3], 1 on [1, 2].
    pub fn phi_weight() -> Self {
        Self::plateau(2.0 / 3.0, 1.0, 2.0, 3.0)
    }

    pub fn support(&self) -> (f64, f64) {
        match self.shape {
            Shape::Bump { lo, hi } => (lo, hi),
            Shape::Plateau { lo, hi, .. } => (lo, hi),
        }
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        match self.shape {
            Shape::Bump { lo, hi } => unit_bump((x - lo) / (hi - lo)),
            Shape::Plateau { lo, flat_lo, flat_hi, hi } => {
                if x <= lo || x >= hi {
                    0.0
                } else if x < flat_lo {
                    unit_step((x - lo) / (flat_lo - lo))
                } else if x <= flat_hi {
                    1.0
                } else {
                    unit_step((hi - x) / (hi - flat_hi))
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn supports_and_plateaus() {
        let v = SmoothWeight::v_weight();
        assert_eq!(v.eval(0.999), 0.0);
        assert_eq!(v.eval(2.001), 0.0);
        assert!((v.eval(1.5) - 1.0).abs() < 1e-15);
        assert!(v.eval(1.2) > 0.0);

        let w = SmoothWeight::w_weight();
        for x in [1.0, 1.3, 1.7, 2.0] {
            assert_eq!(w.eval(x), 1.0);
        }
        assert_eq!(w.eval(0.5), 0.0);
        assert_eq!(w.eval(2.5), 0.0);
        assert!(w.eval(0.75) > 0.0 && w.eval(0.75) < 1.0);

        let u = SmoothWeight::u_cutoff();
        assert_eq!(u.eval(-1.0), 1.0);
        assert_eq!(u.eval(0.0), 1.0);
        assert_eq!(u.eval(2.0), 0.0);
    }

    #[test]
    fn smooth_at_support_edges() {
        // Values decay fast approaching the edges; no jumps.
        let v = SmoothWeight::v_weight();
        assert!(v.eval(1.0 + 1e-4) < 1e-300);
        let w = SmoothWeight::w_weight();
        assert!(w.eval(0.5 + 1e-4) < 1e-300);
    }
}
