//! Whittaker functions of GL(2) and GL(3) through the Jacquet integral.
//!
//! Conventions. For `n = 3` the spectral matrix is `freq·diag(h)` with
//! `freq = 2πt` and `h` traceless (self-dual ray `h = (1, 0, −1)`), and the
//! Langlands parameters are `μ = i·freq·h`. After conjugating the torus
//! `t·a` into the unipotent variable, the Jacquet integral over `U` becomes
//! `∫ δ(wu)^{1/2} e^{i·freq·φ(u; y)} du` with the unit-frequency phase
//! `φ(u; y) = ⟨h, H(wu)⟩ − (y₁u₁₂ + y₂u₂₃)` of [`phase`]. For `n = 2` the
//! parameter is `τ` itself, `μ = ±iτ`, and the phase is
//! `−τ log(1+x²) − 2πxy`.

mod critical;
mod gl2;
mod gl3;
mod predict;
mod stade;

pub use critical::*;
pub use gl2::*;
pub use gl3::*;
pub use predict::*;
pub use stade::*;

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

use crate::caustics::ChamberPoint;
use crate::oscint::{OscResult, QuadConfig};
use crate::sym3::{iwasawa, long_weyl, unipotent, Sym3};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SpectralParam {
    pub n: usize,
    pub t: f64,
    /// Traceless diagonal of the spectral direction (`n = 3`); for `n = 2`
    /// it is `(1, −1, 0)`.
    pub direction: [f64; 3],
}

impl SpectralParam {
    pub fn gl2(tau: f64) -> Result<Self> {
        Self::check_t(tau)?;
        Ok(SpectralParam { n: 2, t: tau, direction: [1.0, -1.0, 0.0] })
    }

    pub fn self_dual(t: f64) -> Result<Self> {
        Self::gl3(t, [1.0, 0.0, -1.0])
    }

    pub fn gl3(t: f64, direction: [f64; 3]) -> Result<Self> {
        Self::check_t(t)?;
        let tr: f64 = direction.iter().sum();
        let scale: f64 = direction.iter().map(|d| d.abs()).sum();
        if !(scale > 0.0) || tr.abs() > 1e-12 * scale || direction.iter().any(|d| !d.is_finite()) {
            return Err(Error::InvalidInput(format!("direction {direction:?} must be traceless and nonzero")));
        }
        Ok(SpectralParam { n: 3, t, direction })
    }

    fn check_t(t: f64) -> Result<()> {
        if t > 0.0 && t.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("spectral scale must be positive, got {t}")))
        }
    }

    pub fn is_self_dual(&self) -> bool {
        self.n == 3 && self.direction == [1.0, 0.0, -1.0]
    }

    /// Frequency multiplying the unit phase: `τ` for GL(2), `2πt` for GL(3).
    pub fn freq(&self) -> f64 {
        if self.n == 2 {
            self.t
        } else {
            2.0 * PI * self.t
        }
    }

    /// Langlands parameters, purely imaginary and summing to zero.
    pub fn mu(&self) -> Vec<Complex64> {
        let f = self.freq();
        self.direction[..self.n].iter().map(|&h| Complex64::new(0.0, f * h)).collect()
    }

    /// Laplace eigenvalue `(n³ − n)/24 + ½Σ|μᵢ|²`.
    pub fn laplace_eigenvalue(&self) -> f64 {
        let n = self.n as f64;
        (n * n * n - n) / 24.0 + 0.5 * self.mu().iter().map(|m| m.norm_sqr()).sum::<f64>()
    }

    /// Exponent `c(n) = n(n−1)(n−2)/12` of the generic sup-norm lower bound
    /// `λ^{c(n)/2}`.
    pub fn c_exponent(n: usize) -> f64 {
        let n = n as f64;
        n * (n - 1.0) * (n - 2.0) / 12.0
    }

    fn h(&self) -> Vector3<f64> {
        Vector3::from(self.direction)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct UnipotentPoint {
    pub u12: f64,
    pub u13: f64,
    pub u23: f64,
}

impl UnipotentPoint {
    pub fn new(u12: f64, u13: f64, u23: f64) -> Self {
        UnipotentPoint { u12, u13, u23 }
    }

    pub fn origin() -> Self {
        Self::new(0.0, 0.0, 0.0)
    }

    pub fn from_vector(v: &Vector3<f64>) -> Self {
        Self::new(v[0], v[1], v[2])
    }

    /// Coordinates in the order `(u12, u13, u23)`.
    pub fn to_vector(&self) -> Vector3<f64> {
        Vector3::new(self.u12, self.u13, self.u23)
    }

    pub fn to_matrix(&self) -> Matrix3<f64> {
        unipotent(self.u12, self.u13, self.u23)
    }

    pub fn from_matrix(m: &Matrix3<f64>) -> Self {
        Self::new(m[(0, 1)], m[(0, 2)], m[(1, 2)])
    }

    /// `a⁻¹·u·a` for `a = diag(a)`.
    pub fn conj_by_torus(&self, a: &Vector3<f64>) -> Self {
        Self::new(self.u12 * a[1] / a[0], self.u13 * a[2] / a[0], self.u23 * a[2] / a[1])
    }

    pub fn norm(&self) -> f64 {
        self.to_vector().norm()
    }

    pub fn dist(&self, o: &UnipotentPoint) -> f64 {
        (self.to_vector() - o.to_vector()).norm()
    }
}

/// `⟨h, H(w·u·g)⟩` together with the K-part of the Iwasawa decomposition.
fn spectral_term(m: &Matrix3<f64>, h: &Vector3<f64>) -> Result<(f64, Matrix3<f64>)> {
    let parts = iwasawa(&(long_weyl() * m))?;
    Ok((parts.h().dot(h), parts.k))
}

/// Unit-frequency scaled phase `φ(u; y) = ⟨h, H(wu)⟩ − (y₁u₁₂ + y₂u₂₃)`;
/// the integrand carries `e^{i·freq·φ}`.
pub fn phase(u: &UnipotentPoint, y1: f64, y2: f64, nu: &SpectralParam) -> f64 {
    // w·u is always invertible, so the decomposition cannot fail
    let (s, _) = spectral_term(&u.to_matrix(), &nu.h()).expect("w·u is invertible");
    s - (y1 * u.u12 + y2 * u.u23)
}

/// Scaled phase at a chamber point.
pub fn phase_at(u: &UnipotentPoint, p: &ChamberPoint, nu: &SpectralParam) -> f64 {
    phase(u, p.y1(), p.y2(), nu)
}

/// Self-dual phase in closed form: `−½ log(Δ₁Δ₂) − (y₁u₁₂ + y₂u₂₃)` with
/// `Δ₁ = 1 + u₁₂² + u₁₃²`, `Δ₂ = 1 + u₂₃² + (u₁₃ − u₁₂u₂₃)²`.
pub fn phase_self_dual_closed(u: &UnipotentPoint, y1: f64, y2: f64) -> f64 {
    let (d1, d2) = minors(u);
    -0.5 * (d1 * d2).ln() - (y1 * u.u12 + y2 * u.u23)
}

fn minors(u: &UnipotentPoint) -> (f64, f64) {
    let m = u.u13 - u.u12 * u.u23;
    (1.0 + u.u12 * u.u12 + u.u13 * u.u13, 1.0 + u.u23 * u.u23 + m * m)
}

/// `δ(wu)^{1/2} = (Δ₁Δ₂)^{−1/2}`.
pub fn delta_half_wu(u: &UnipotentPoint) -> f64 {
    let (d1, d2) = minors(u);
    1.0 / (d1 * d2).sqrt()
}

/// Unscaled phase `F(u, g) = freq·⟨h, H(wug)⟩ − 2π(u₁₂ + u₂₃)`.
pub fn phase_unscaled(u: &UnipotentPoint, g: &Matrix3<f64>, nu: &SpectralParam) -> Result<f64> {
    let (s, _) = spectral_term(&(u.to_matrix() * g), &nu.h())?;
    Ok(nu.freq() * s - 2.0 * PI * (u.u12 + u.u23))
}

/// `k(wu)ᵀ·diag(h)·k(wu)`: the symmetric matrix whose upper triangle is the
/// derivative of `⟨h, H(wu·e^{X})⟩` in `X`.
pub fn moment_image(u: &UnipotentPoint, nu: &SpectralParam) -> Sym3 {
    let (_, k) = spectral_term(&u.to_matrix(), &nu.h()).expect("w·u is invertible");
    let h = Matrix3::from_diagonal(&nu.h());
    Sym3::from_matrix(&(k.transpose() * h * k))
}

/// Analytic gradient of [`phase`] in `(u12, u13, u23)`. Moving `u` by
/// `δu` right-multiplies by `u⁻¹δu`, so the coordinate derivatives are the
/// entries of the moment image paired against `u⁻¹·E_ij`.
pub fn grad_phase(u: &UnipotentPoint, y1: f64, y2: f64, nu: &SpectralParam) -> Vector3<f64> {
    let m = moment_image(u, nu);
    Vector3::new(m.s12 - y1, m.s13, m.s23 - u.u12 * m.s13 - y2)
}

/// Closed-form gradient of [`phase_self_dual_closed`].
pub fn grad_self_dual_closed(u: &UnipotentPoint, y1: f64, y2: f64) -> Vector3<f64> {
    let (d1, d2) = minors(u);
    let m = u.u13 - u.u12 * u.u23;
    Vector3::new(
        -u.u12 / d1 + m * u.u23 / d2 - y1,
        -u.u13 / d1 - m / d2,
        -(u.u23 - m * u.u12) / d2 - y2,
    )
}

pub const HESSIAN_STEP: f64 = 1e-4;

/// Hessian of [`phase`] by central differences of [`grad_phase`], symmetrized.
pub fn hessian_phase(u: &UnipotentPoint, y1: f64, y2: f64, nu: &SpectralParam) -> Matrix3<f64> {
    let v = u.to_vector();
    let mut h = Matrix3::zeros();
    for i in 0..3 {
        let mut e = Vector3::zeros();
        e[i] = HESSIAN_STEP;
        let gp = grad_phase(&UnipotentPoint::from_vector(&(v + e)), y1, y2, nu);
        let gm = grad_phase(&UnipotentPoint::from_vector(&(v - e)), y1, y2, nu);
        h.set_column(i, &((gp - gm) / (2.0 * HESSIAN_STEP)));
    }
    0.5 * (h + h.transpose())
}

/// Evaluates the Whittaker function at `t·a` for a chamber point `a`
/// (`n = 3`, in the normalization `t²y₁y₂·∫δ(wu)^{1/2}e^{i·freq·φ}du` up to a
/// unimodular factor), or at `y = p.y1()` for `n = 2`.
pub fn jacquet_whittaker(p: &ChamberPoint, nu: &SpectralParam, cfg: &QuadConfig) -> Result<OscResult> {
    match nu.n {
        2 => gl2_whittaker(p.y1(), nu.t, cfg),
        3 => {
            let eval = Gl3Evaluator::new(nu)?;
            eval.eval_scaled(p.y1(), p.y2(), cfg.rel_tol)
        }
        n => Err(Error::InvalidInput(format!("n = {n} is not supported"))),
    }
}
