use deltasum_core::oscillatory::bessel::ln_gamma;
use num_complex::Complex64;
fn main() {
    for z in [
        Complex64::new(0.25, 300.0),
        Complex64::new(0.25, -450.0),
        Complex64::new(-0.3, 777.0),
        Complex64::new(0.1, 15.0),
    ] {
        println!("{z}: {}", ln_gamma(z));
    }
}
