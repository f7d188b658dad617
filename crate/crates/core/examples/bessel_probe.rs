use deltasum_core::oscillatory::bessel::{bessel_j, bessel_j_imag_order, bessel_k_imag_order};

fn main() {
    let refs: &[(u32, f64, f64)] = &[
        (0, 0.1, 0.997501562066040032),
        (1, 0.1, 0.0499375260362420003),
        (11, 0.1, 1.22299266103564533e-22),
        (0, 1.0, 0.765197686557966551),
        (1, 1.0, 0.440050585744933516),
        (11, 1.0, 1.19800674630313710e-11),
        (11, 5.0, 0.000350927449766209010),
        (0, 12.0, 0.0476893107968335366),
        (11, 12.0, 0.270412482550964484),
        (11, 17.9, -0.208587268958003658),
        (0, 18.1, 0.00542702483849282666),
        (1, 18.1, -0.187350182706376147),
        (11, 18.1, -0.198290317922981031),
        (11, 25.0, -0.168235990032257010),
        (11, 60.0, 0.0528133264789797631),
        (0, 150.0, -0.000774090375394291247),
        (11, 150.0, 0.0602958516826939153),
    ];
    for &(n, x, want) in refs {
        let got = bessel_j(n, x);
        println!("J_{n}({x}): got {got:+.15e} want {want:+.15e} diff {:.2e}", (got - want).abs());
    }
    println!("K0(1): {:+.15e}", bessel_k_imag_order(0.0, 1.0));
    println!("K2i(1): {:+.15e}", bessel_k_imag_order(1.0, 1.0));
    let j2i5 = bessel_j_imag_order(1.0, 5.0);
    println!("J_2i(5): {:+.12e} {:+.12e} (want -3.146234855367744 -2.433412848105169)", j2i5.re, j2i5.im);
    let j2i25 = bessel_j_imag_order(1.0, 25.0);
    println!("J_2i(25): {:+.12e} {:+.12e} (want 0.993063584918349 -1.551137317572040)", j2i25.re, j2i25.im);
}
