use deltasum_core::oscillatory::transforms::{j_window, w_dagger};
use deltasum_core::oscillatory::gamma3::gamma_pm;
use deltasum_core::oscillatory::{OscParams, Sign, SpectralParams};
use deltasum_core::weights::SmoothWeight;
use num_complex::Complex64;

fn main() {
    let osc = OscParams::new(1e4, 10.0, 3.0);
    let w = SmoothWeight::w_weight();
    let gl3 = SpectralParams::gl3_trivial();
    let a = osc.zeta_rate();
    println!("A = {a}");
    for tau in [0.0f64, -50.0, -100.0, -165.0, -200.0, -275.0, -400.0, -600.0, -900.0, 275.0, 50.0] {
        let g1 = gamma_pm(Sign::Plus, Complex64::new(-0.5, tau), &gl3).map(|v| v.norm()).unwrap_or(f64::NAN);
        let g2 = gamma_pm(Sign::Minus, Complex64::new(-0.5, tau), &gl3).map(|v| v.norm()).unwrap_or(f64::NAN);
        let wd = w_dagger(a, Complex64::new(0.5, -tau), &w, 1e-12).map(|r| r.value.norm());
        println!("tau={tau:8.1}: |g+|={g1:.3e} |g-|={g2:.3e} wd={wd:?}");
    }
    let t0 = std::time::Instant::now();
    let win = j_window(a, &w, &gl3);
    println!("window = {win:?} in {:?}", t0.elapsed());
}
