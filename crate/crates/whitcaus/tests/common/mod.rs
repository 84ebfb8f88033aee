//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64;
use std::f64::consts::PI;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub const GAMMA_1_3: f64 = 2.678_938_534_707_747_6;
pub const GAMMA_2_3: f64 = 1.354_117_939_426_400_4;
pub const GAMMA_5_4: f64 = 0.906_402_477_055_477_1;

/// Maclaurin series of the Airy function.
pub fn airy_series(y: f64) -> f64 {
    let c1 = 3f64.powf(-2.0 / 3.0) / GAMMA_2_3;
    let c2 = 3f64.powf(-1.0 / 3.0) / GAMMA_1_3;
    let (mut f, mut g) = (0.0, 0.0);
    let (mut tf, mut tg) = (1.0, y);
    let y3 = y * y * y;
    for k in 0..200 {
        f += tf;
        g += tg;
        let k = k as f64;
        tf *= y3 / ((3.0 * k + 2.0) * (3.0 * k + 3.0));
        tg *= y3 / ((3.0 * k + 3.0) * (3.0 * k + 4.0));
    }
    c1 * f - c2 * g
}

/// Pearcey by Simpson's rule on [−R, R] with a two-term asymptotic tail.
pub fn pearcey_brute(y1: f64, y2: f64, r: f64) -> Complex64 {
    let phi = |x: f64| y2 * x + y1 * x * x / 2.0 + x.powi(4) / 4.0;
    let d1 = |x: f64| y2 + y1 * x + x.powi(3);
    let d2 = |x: f64| y1 + 3.0 * x * x;
    // keep the phase step below 0.05 rad at the ends
    let n = 2 * ((2.0 * r * r.powi(3) / 0.05) as usize / 2);
    let h = 2.0 * r / n as f64;
    let mut s = c(0.0, 0.0);
    for i in 0..=n {
        let x = -r + h * i as f64;
        let w = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
        s += Complex64::from_polar(w, phi(x));
    }
    s *= h / 3.0;
    // ∫_R^∞ e^{iφ} ≈ e^{iφ(R)} (i/φ'(R) + φ''(R)/φ'(R)³)
    let tail = |x: f64, sgn: f64| {
        let e = Complex64::from_polar(1.0, phi(x));
        e * (c(0.0, 1.0) / d1(x) + d2(x) / d1(x).powi(3)) * sgn
    };
    s + tail(r, 1.0) - tail(-r, 1.0)
}

/// `K_{iτ}(z) = ∫₀^∞ e^{−z cosh θ} cos(τθ) dθ` by composite Simpson.
pub fn bessel_k(tau: f64, z: f64) -> f64 {
    // integrand below e^{-40} relative beyond this point
    let top = ((40.0 + z) / z).acosh() + 1.0;
    let n = ((top * (tau + z) * 40.0) as usize).max(2000) & !1;
    let h = top / n as f64;
    let f = |th: f64| (-z * th.cosh()).exp() * (tau * th).cos();
    let mut s = f(0.0) + f(top);
    for i in 1..n {
        s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}


/// `ln Γ(z)` for `Re z > 0` by the Lanczos approximation (g = 7, 9 terms).
pub fn ln_gamma_lanczos(z: Complex64) -> Complex64 {
    const G: f64 = 7.0;
    const C: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    let z = z - 1.0;
    let mut x = Complex64::new(C[0], 0.0);
    for (i, c) in C.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + x.ln()
}
