//! Stade's formula: the Mellin transform of `|W|²` against `det(a)^σ` is a
//! product of archimedean Gamma factors.

use num_complex::Complex64;
use rayon::prelude::*;

use super::{gl2_whittaker, line_index, Gl3Evaluator, SpectralParam, GL2_UNIT_CONSTANT};
use crate::gamma::ln_gamma_r;
use crate::oscint::{cutoff, QuadConfig};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct StadeReport {
    pub sigma: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// Constant applied to the raw integral so that `lhs(1) = 1`; exact for
    /// GL(2), fitted for GL(3).
    pub constant: f64,
}

impl StadeReport {
    pub fn ratio(&self) -> f64 {
        self.lhs / self.rhs
    }
}

/// `∏_{i,j}Γ_ℝ(σ+μᵢ−μⱼ) / ∏_{i,j}Γ_ℝ(1+μᵢ−μⱼ)`.
pub fn stade_rhs(sigma: f64, mu: &[Complex64]) -> f64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for a in mu {
        for b in mu {
            acc += ln_gamma_r(sigma + a - b) - ln_gamma_r(1.0 + a - b);
        }
    }
    acc.re.exp()
}

/// Lower end of the log-grid, where the integrand has decayed like `y^σ`.
const LOG_FLOOR: f64 = -12.0;

fn log_grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).ceil() as usize;
    (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect()
}

/// Truncation weight: 1 up to `1.5t`, 0 beyond `3t`.
fn taper(y: f64, t: f64) -> f64 {
    cutoff(y / (1.5 * t))
}

/// Stade check at several `σ` (the grid of `|W|²` values is shared).
pub fn stade_check_many(sigmas: &[f64], nu: &SpectralParam, cfg: &QuadConfig) -> Result<Vec<StadeReport>> {
    if sigmas.iter().any(|s| !(*s > 0.0)) {
        return Err(Error::InvalidInput("σ must be positive".into()));
    }
    let mu = nu.mu();
    match nu.n {
        2 => {
            let tau = nu.t;
            let hi = (3.0 * tau).ln();
            let us = log_grid(LOG_FLOOR, hi, 0.25 * std::f64::consts::PI / (2.0 * tau).max(1.0));
            let du = us[1] - us[0];
            let w2 = us
                .par_iter()
                .map(|&u| gl2_whittaker(u.exp(), tau, cfg).map(|r| (GL2_UNIT_CONSTANT * r.value.norm()).powi(2)))
                .collect::<Result<Vec<f64>>>()?;
            Ok(sigmas
                .iter()
                .map(|&s| {
                    let integral: f64 = us
                        .iter()
                        .zip(&w2)
                        .map(|(&u, &w)| w * ((s - 1.0) * u).exp() * taper(u.exp(), tau))
                        .sum::<f64>()
                        * du;
                    let lhs = ln_gamma_r(Complex64::new(2.0 * s, 0.0)).re.exp() * integral;
                    StadeReport { sigma: s, lhs, rhs: stade_rhs(s, &mu), constant: GL2_UNIT_CONSTANT }
                })
                .collect())
        }
        3 => {
            let t = nu.t;
            let ev = Gl3Evaluator::new(nu)?;
            let hi = (3.0 * t).ln();
            let step = 0.25 * std::f64::consts::PI / (2.0 * nu.freq()).max(1.0);
            let us = log_grid(LOG_FLOOR, hi, step);
            let du = us[1] - us[0];
            // tensor blocks by contour choice per variable
            let split: [Vec<usize>; 2] = [0, 1].map(|k| (0..us.len()).filter(|&i| line_index(us[i].exp() / t) == k).collect());
            let mut w = vec![vec![Complex64::new(0.0, 0.0); us.len()]; us.len()];
            for a in 0..2 {
                for b in 0..2 {
                    if split[a].is_empty() || split[b].is_empty() {
                        continue;
                    }
                    let l1: Vec<f64> = split[a].iter().map(|&i| us[i]).collect();
                    let l2: Vec<f64> = split[b].iter().map(|&j| us[j]).collect();
                    let level = if a == 0 || b == 0 { 1 } else { 0 };
                    let block = ev.kernel((a, b), level)?.eval_grid(&l1, &l2);
                    for (bi, &i) in split[a].iter().enumerate() {
                        for (bj, &j) in split[b].iter().enumerate() {
                            w[i][j] = block[bi][bj];
                        }
                    }
                }
            }
            let raw = |s: f64| -> f64 {
                let mut acc = 0.0;
                for (i, &u1) in us.iter().enumerate() {
                    for (j, &u2) in us.iter().enumerate() {
                        let (y1, y2) = (u1.exp(), u2.exp());
                        let weight = (s * (u1 + 2.0 * u2) - 2.0 * (u1 + u2)).exp() * taper(y1.max(y2), t);
                        acc += w[i][j].norm_sqr() * weight;
                    }
                }
                acc * du * du * ln_gamma_r(Complex64::new(3.0 * s, 0.0)).re.exp()
            };
            let base = raw(1.0);
            if !(base > 0.0 && base.is_finite()) {
                return Err(Error::NoConvergence { value: Complex64::new(base, 0.0), err: f64::INFINITY });
            }
            let c2 = 1.0 / base;
            Ok(sigmas
                .iter()
                .map(|&s| StadeReport { sigma: s, lhs: raw(s) * c2, rhs: stade_rhs(s, &mu), constant: c2.sqrt() })
                .collect())
        }
        n => Err(Error::InvalidInput(format!("n = {n} is not supported"))),
    }
}

pub fn stade_check(sigma: f64, nu: &SpectralParam, cfg: &QuadConfig) -> Result<StadeReport> {
    Ok(stade_check_many(&[sigma], nu, cfg)?[0])
}
