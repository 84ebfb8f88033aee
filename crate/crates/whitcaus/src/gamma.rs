//! Complex log-Gamma by Stirling's series after upward recurrence, with
//! reflection on the left half-plane.

use num_complex::Complex64;
use std::f64::consts::PI;

const STIRLING_MIN: f64 = 15.0;

// B_{2k} / (2k (2k-1)) for k = 1..8
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
];

/// `ln Γ(z)`. On `Re z ≥ 1/2` this is the principal branch (continuous,
/// real on the positive axis); on the left half-plane it is correct modulo
/// `2πi`.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        // Γ(z) Γ(1−z) = π / sin(πz)
        return Complex64::new(PI.ln(), 0.0) - ln_sin_pi(z) - ln_gamma(Complex64::new(1.0, 0.0) - z);
    }
    let mut z = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while z.norm() < STIRLING_MIN {
        shift += z.ln();
        z += 1.0;
    }
    let zinv = z.inv();
    let zinv2 = zinv * zinv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut pow = zinv;
    for c in STIRLING {
        series += pow * c;
        pow *= zinv2;
    }
    (z - 0.5) * z.ln() - z + 0.5 * (2.0 * PI).ln() + series - shift
}

/// `ln sin(πz)` without overflow for large `|Im z|` (mod 2πi).
fn ln_sin_pi(z: Complex64) -> Complex64 {
    let i = Complex64::i();
    let ln2i = Complex64::new(2f64.ln(), PI / 2.0);
    if z.im > 1.0 {
        -i * PI * z + (1.0 - (2.0 * i * PI * z).exp()).ln() - ln2i + i * PI
    } else if z.im < -1.0 {
        i * PI * z + (1.0 - (-2.0 * i * PI * z).exp()).ln() - ln2i
    } else {
        (z * PI).sin().ln()
    }
}

pub fn gamma(z: Complex64) -> Complex64 {
    ln_gamma(z).exp()
}

/// `ln Γ_ℝ(s) = −(s/2) ln π + ln Γ(s/2)`.
pub fn ln_gamma_r(s: Complex64) -> Complex64 {
    -s * 0.5 * PI.ln() + ln_gamma(s * 0.5)
}

/// Real `ln Γ(x)` for `x > 0`.
pub fn ln_gamma_real(x: f64) -> f64 {
    ln_gamma(Complex64::new(x, 0.0)).re
}
