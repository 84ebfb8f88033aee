//! GL(2): `W(y) = √y ∫ (1+x²)^{−1/2−iτ} e^{−2πixy} dx`, which equals
//! `2π^{1/2+iτ} y^{1/2+iτ} K_{iτ}(2πy) / Γ(1/2+iτ)`.

use std::f64::consts::{PI, SQRT_2};

use nalgebra::Matrix2;
use num_complex::Complex64;

use crate::oscint::{oscillatory_1d, OscResult, QuadConfig};
use crate::{Error, Result};

/// GL(2) phase `−τ log(1+x²) − 2πxy`.
pub fn phase_gl2(x: f64, y: f64, tau: f64) -> f64 {
    -tau * (1.0 + x * x).ln() - 2.0 * PI * x * y
}

/// Same phase through the Iwasawa decomposition of `[[0,1],[−1,0]]·[[1,x],[0,1]]`.
pub fn phase_gl2_iwasawa(x: f64, y: f64, tau: f64) -> f64 {
    let g = Matrix2::new(0.0, 1.0, -1.0, -x);
    // g gᵀ = n·diag(a₁², a₂²)·nᵀ
    let m = g * g.transpose();
    let a2sq = m[(1, 1)];
    let a1sq = m[(0, 0)] - m[(0, 1)] * m[(0, 1)] / a2sq;
    tau * 0.5 * (a1sq.ln() - a2sq.ln()) - 2.0 * PI * x * y
}

/// Factor turning [`gl2_whittaker`] into the function with
/// `Γ_ℝ(2)·∫|W|² dy/y² = 1`.
pub const GL2_UNIT_CONSTANT: f64 = SQRT_2;

const SHIFTS: [f64; 11] = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95];

fn log_integrand(z: Complex64, y: f64, tau: f64) -> Complex64 {
    Complex64::new(-0.5, -tau) * (1.0 + z * z).ln() - Complex64::new(0.0, 2.0 * PI * y) * z
}

/// The integral is taken over the line `Im x = −η`; `η` is picked among a
/// few values by the smallest sampled modulus of the integrand, which is
/// where the least cancellation happens.
fn pick_shift(y: f64, tau: f64, reach: f64) -> f64 {
    let samples = 400;
    let mut best = (f64::INFINITY, 0.0);
    for &eta in &SHIFTS {
        let peak = (0..=samples)
            .map(|i| {
                let x = -reach + 2.0 * reach * i as f64 / samples as f64;
                log_integrand(Complex64::new(x, -eta), y, tau).re
            })
            .fold(f64::NEG_INFINITY, f64::max);
        if peak < best.0 {
            best = (peak, eta);
        }
    }
    best.1
}

/// `W(y)` for spectral parameter `τ`, unnormalized.
pub fn gl2_whittaker(y: f64, tau: f64, cfg: &QuadConfig) -> Result<OscResult> {
    if !(y > 0.0 && tau >= 0.0 && y.is_finite() && tau.is_finite()) {
        return Err(Error::InvalidInput(format!("need y > 0 and τ ≥ 0, got y = {y}, τ = {tau}")));
    }
    // stationary points of the phase lie within |x| ≤ τ/(πy)
    let reach = tau / (PI * y) + 2.0;
    let eta = pick_shift(y, tau, reach);
    let e = |x: f64| log_integrand(Complex64::new(x, -eta), y, tau);
    let r = oscillatory_1d(|x| e(x).im, |x| Complex64::new(e(x).re.exp(), 0.0), 2.0 * reach, cfg)?;
    let s = y.sqrt();
    Ok(OscResult { value: r.value * s, err_estimate: r.err_estimate * s })
}
