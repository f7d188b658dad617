use std::time::Instant;
use deltasum_core::delta::{DeltaParams, DfiWeight};
use deltasum_core::oscillatory::transforms::*;
use deltasum_core::oscillatory::voronoi::gl2_voronoi_check;
use deltasum_core::oscillatory::tau::TauTable;
use deltasum_core::oscillatory::{OscParams, Sign, SpectralParams};
use deltasum_core::weights::SmoothWeight;

fn main() {
    let osc = OscParams { tolerance: 1e-9, ..OscParams::new(1e4, 10.0, 3.0) };
    let w = SmoothWeight::w_weight();
    let v = SmoothWeight::v_weight();
    let u = SmoothWeight::u_cutoff();
    let gl3 = SpectralParams::gl3_trivial();
    let gl2 = SpectralParams::Holomorphic { weight: 12 };

    let t = Instant::now();
    let x = 1.0 / 2.7e4;
    let j1 = j_transform(Sign::Plus, x, 1.0, &osc, &w, &gl3, 1e-8).unwrap();
    println!("j_transform: {:?} -> {:.6e} (est {:.1e})", t.elapsed(), j1.value.norm(), j1.error_estimate);

    let t = Instant::now();
    let omega = DfiWeight::new(DeltaParams::new(osc.big_q()));
    let _ = omega.eval(1.0, 0.0).unwrap();
    println!("DfiWeight build: {:?}", t.elapsed());

    let ctx = RContext { osc, v_weight: &v, w_weight: &w, u_cutoff: &u, zeta_scale: 1.0, gl2: &gl2, gl3: &gl3, x_switch: 1.0 };
    let t = Instant::now();
    let r1 = FusedR::build(&ctx, Sign::Plus, Sign::Plus, 0.5, &omega, 1.0, FusedResolution::standard()).unwrap();
    println!("FusedR standard build: {:?} (tau_max {})", t.elapsed(), r1.tau_max());
    let t = Instant::now();
    let val = r1.eval(x);
    println!("FusedR eval: {:?} -> {:.6e}", t.elapsed(), val.norm());

    let t = Instant::now();
    let tau = TauTable::build(4000);
    println!("TauTable: {:?}", t.elapsed());
    let phi = SmoothWeight::plateau(0.8, 1.0, 2.0, 2.2);
    for (a, c, n) in [(1i64, 1u64, 30.0), (2, 3, 40.0), (3, 5, 50.0)] {
        let t = Instant::now();
        let rep = gl2_voronoi_check(a, c, &phi, n, 4000, &tau, 1e-5).unwrap();
        println!("voronoi a={a} c={c} N={n}: {:?} rel={:.2e} dual_terms={}", t.elapsed(), rep.rel_diff, rep.dual_terms);
    }
}
