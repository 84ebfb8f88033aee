//! GL(3) Whittaker values from the double Mellin–Barnes representation
//!
//! `W(Y) = c_μ (2πi)⁻² ∬ G(s₁, s₂) Y₁^{1−s₁} Y₂^{1−s₂} ds₁ ds₂`,
//! `G = ∏ₘ Γ_ℝ(s₁+μₘ)Γ_ℝ(s₂−μₘ) / Γ_ℝ(s₁+s₂)`, `c_μ = 1/(4∏_{i<j}Γ_ℝ(1+μᵢ−μⱼ))`,
//!
//! whose modulus equals `Y₁Y₂|∫_U δ(wu)^{1/2} e^{i·freq·φ(u; Y/t)} du|`.
//! The integrand decays exponentially beyond `|Im s| ≈ max|μ|`, and the
//! trapezoid rule on the vertical lines converges geometrically in the step,
//! so the kernel `G` is tabulated once and every evaluation is a bilinear
//! form in the plane waves `e^{−iv ln Y}`. The 3-D oscillatory integral at
//! frequency `2πt` is never formed.

use std::f64::consts::PI;
use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::SpectralParam;
use crate::gamma::ln_gamma_r;
use crate::oscint::OscResult;
use crate::{Error, Result};

/// Integration window beyond the largest `|Im μ|`.
const MARGIN: f64 = 40.0;
/// Largest kernel held in memory (entries).
const MAX_ENTRIES: usize = 20_000_000;
const STEPS: [f64; 3] = [0.5, 0.25, 0.125];

/// Tabulated Mellin–Barnes kernel on the lines `Re s₁ = σ₁`, `Re s₂ = σ₂`.
pub struct MbKernel {
    pub sigma: [f64; 2],
    pub h: f64,
    nodes: Vec<f64>,
    /// Row-major `n×n`, scaled by `e^{−shift}`.
    kernel: Vec<Complex64>,
    /// Log of everything outside the double sum.
    log_scale: Complex64,
    abs_sum: f64,
}

impl MbKernel {
    pub fn new(mu: &[Complex64], sigma: [f64; 2], h: f64) -> Result<Self> {
        if mu.len() != 3 || !(sigma[0] > 0.0 && sigma[1] > 0.0) || !(h > 0.0) {
            return Err(Error::InvalidInput("kernel needs three parameters, σ > 0 and h > 0".into()));
        }
        let top = mu.iter().map(|m| m.im.abs()).fold(0.0, f64::max);
        let half = ((top + MARGIN) / h).ceil() as usize;
        let n = 2 * half + 1;
        if n * n > MAX_ENTRIES {
            return Err(Error::InvalidInput(format!("kernel of {n}² entries exceeds the memory cap")));
        }
        let nodes: Vec<f64> = (0..n).map(|i| (i as f64 - half as f64) * h).collect();
        let la: Vec<Complex64> =
            nodes.iter().map(|&v| mu.iter().map(|&m| ln_gamma_r(Complex64::new(sigma[0], v) + m)).sum()).collect();
        let lb: Vec<Complex64> =
            nodes.iter().map(|&v| mu.iter().map(|&m| ln_gamma_r(Complex64::new(sigma[1], v) - m)).sum()).collect();
        let lc: Vec<Complex64> = (0..2 * n - 1)
            .map(|k| -ln_gamma_r(Complex64::new(sigma[0] + sigma[1], 2.0 * nodes[0] + h * k as f64)))
            .collect();
        let shift = (0..n)
            .into_par_iter()
            .map(|i| (0..n).map(|j| la[i].re + lb[j].re + lc[i + j].re).fold(f64::NEG_INFINITY, f64::max))
            .reduce(|| f64::NEG_INFINITY, f64::max);
        let rows: Vec<(Vec<Complex64>, f64)> = (0..n)
            .into_par_iter()
            .map(|i| {
                let row: Vec<Complex64> = (0..n).map(|j| (la[i] + lb[j] + lc[i + j] - shift).exp()).collect();
                let abs: f64 = row.iter().map(|z| z.norm()).sum();
                (row, abs)
            })
            .collect();
        let mut kernel = Vec::with_capacity(n * n);
        let mut abs_sum = 0.0;
        for (row, abs) in rows {
            kernel.extend(row);
            abs_sum += abs;
        }
        let ln_norm: Complex64 = (0..3)
            .flat_map(|i| (i + 1..3).map(move |j| (i, j)))
            .map(|(i, j)| ln_gamma_r(1.0 + mu[i] - mu[j]))
            .sum();
        let log_scale = Complex64::new(shift + (h * h / (16.0 * PI * PI)).ln(), 0.0) - ln_norm;
        Ok(MbKernel { sigma, h, nodes, kernel, log_scale, abs_sum })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    fn prefactor(&self, l1: f64, l2: f64) -> Complex64 {
        (self.log_scale + (1.0 - self.sigma[0]) * l1 + (1.0 - self.sigma[1]) * l2).exp()
    }

    fn waves(&self, l: f64) -> Vec<Complex64> {
        self.nodes.iter().map(|&v| Complex64::from_polar(1.0, -v * l)).collect()
    }

    /// Value at `Y = (e^{l₁}, e^{l₂})`, the value from the even sub-grid
    /// (step `2h`) and the modulus of the sum of absolute terms.
    pub fn eval_log(&self, l1: f64, l2: f64) -> (Complex64, Complex64, f64) {
        let n = self.len();
        let (e1, e2) = (self.waves(l1), self.waves(l2));
        let rows: Vec<(Complex64, Complex64)> = (0..n)
            .into_par_iter()
            .map(|i| {
                let row = &self.kernel[i * n..(i + 1) * n];
                let (mut full, mut even) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
                for (j, (k, e)) in row.iter().zip(&e2).enumerate() {
                    let z = k * e;
                    full += z;
                    if j % 2 == 0 {
                        even += z;
                    }
                }
                (full * e1[i], if i % 2 == 0 { even * e1[i] } else { Complex64::new(0.0, 0.0) })
            })
            .collect();
        let (mut full, mut even) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        for (f, e) in rows {
            full += f;
            even += e;
        }
        let scale = self.prefactor(l1, l2);
        (full * scale, even * scale * 4.0, self.abs_sum * scale.norm())
    }

    /// Values on the tensor grid `Y = (e^{a}, e^{b})`, `a ∈ l1`, `b ∈ l2`;
    /// entry `[i][j]` belongs to `(l1[i], l2[j])`.
    pub fn eval_grid(&self, l1: &[f64], l2: &[f64]) -> Vec<Vec<Complex64>> {
        let n = self.len();
        let k = DMatrix::from_row_slice(n, n, &self.kernel);
        let e2 = DMatrix::from_fn(n, l2.len(), |j, b| Complex64::from_polar(1.0, -self.nodes[j] * l2[b]));
        let p = k * e2;
        let e1 = DMatrix::from_fn(l1.len(), n, |a, i| Complex64::from_polar(1.0, -self.nodes[i] * l1[a]));
        let s = e1 * p;
        (0..l1.len())
            .map(|a| {
                (0..l2.len())
                    .map(|b| s[(a, b)] * self.prefactor(l1[a], l2[b]))
                    .collect()
            })
            .collect()
    }
}

/// Contour for one variable at scaled coordinate `y = Y/t`: the left line
/// keeps cancellation low for small `Y`, the right one reaches into the
/// shadow zone where the left one loses all digits.
pub fn line_index(y: f64) -> usize {
    usize::from(y >= 0.5)
}

pub const MB_LINES: [f64; 2] = [1.0, 3.0];

/// Evaluator for one spectral parameter, with kernels built on demand.
pub struct Gl3Evaluator {
    pub nu: SpectralParam,
    mu: Vec<Complex64>,
    kernels: [[[OnceLock<Result<MbKernel>>; 3]; 2]; 2],
}

impl Gl3Evaluator {
    pub fn new(nu: &SpectralParam) -> Result<Self> {
        if nu.n != 3 {
            return Err(Error::InvalidInput("GL(3) evaluator needs n = 3".into()));
        }
        Ok(Gl3Evaluator { nu: *nu, mu: nu.mu(), kernels: Default::default() })
    }

    /// Kernel on the lines `(MB_LINES[lines.0], MB_LINES[lines.1])` with step
    /// `0.5 / 2^level`.
    pub fn kernel(&self, lines: (usize, usize), level: usize) -> Result<&MbKernel> {
        self.kernels[lines.0][lines.1][level]
            .get_or_init(|| MbKernel::new(&self.mu, [MB_LINES[lines.0], MB_LINES[lines.1]], STEPS[level]))
            .as_ref()
            .map_err(Clone::clone)
    }

    /// `W(Y)` at unscaled torus coordinates `Y = (Y₁, Y₂)`. The step is
    /// halved until the step-doubling estimate meets `rel_tol`, or the
    /// value sits at the round-off floor of the kernel sum.
    pub fn eval(&self, big_y1: f64, big_y2: f64, rel_tol: f64) -> Result<OscResult> {
        if !(big_y1 > 0.0 && big_y2 > 0.0) {
            return Err(Error::InvalidInput("torus coordinates must be positive".into()));
        }
        let lines = (line_index(big_y1 / self.nu.t), line_index(big_y2 / self.nu.t));
        let mut last = None;
        for level in 0..STEPS.len() {
            let k = match self.kernel(lines, level) {
                Ok(k) => k,
                Err(_) if last.is_some() => break,
                Err(e) => return Err(e),
            };
            let (v, coarse, abs) = k.eval_log(big_y1.ln(), big_y2.ln());
            let diff = (v - coarse).norm();
            let floor = 64.0 * f64::EPSILON * abs;
            let err = if diff < 0.1 * v.norm() { diff * diff / v.norm() } else { diff };
            let err = err.max(floor);
            let res = OscResult { value: v, err_estimate: err };
            if err <= rel_tol * v.norm() || err <= floor {
                return Ok(res);
            }
            last = Some(res);
        }
        let r = last.expect("first kernel evaluated");
        Err(Error::NoConvergence { value: r.value, err: r.err_estimate })
    }

    /// `W(t·a)` for chamber coordinates `(y₁, y₂)`.
    pub fn eval_scaled(&self, y1: f64, y2: f64, rel_tol: f64) -> Result<OscResult> {
        self.eval(self.nu.t * y1, self.nu.t * y2, rel_tol)
    }
}
