//! Stationary-phase predictions and the cusp invariants of the phase.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, Vector2, Vector3};
use num_complex::Complex64;
use rayon::prelude::*;

use super::critical::{critical_points, restricted_hessian, CriticalPoint, GRAD_TOL};
use super::{grad_phase, hessian_phase, phase, Gl3Evaluator, SpectralParam, UnipotentPoint};
use crate::caustics::{ChamberPoint, Degeneracy};
use crate::oscint::{pearcey, QuadConfig};
use crate::{Error, Result};

/// One named numeric check with its tolerance.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub target: f64,
    pub rel_tol: f64,
    pub pass: bool,
}

impl Check {
    pub fn rel(name: &str, value: f64, target: f64, rel_tol: f64) -> Self {
        let pass = (value - target).abs() <= rel_tol * target.abs();
        Check { name: name.into(), value, target, rel_tol, pass }
    }
}

/// Data of one cusp critical point over `a_cusp`.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CuspSide {
    pub point: CriticalPoint,
    /// `ε` of the two-vector basis `(s, ε, 0)/(2√ε)`, `(0, ε, −s)/(2√ε)`
    /// (coordinates `(u12, u13, u23)`) that avoids the kernel.
    pub basis_eps: f64,
    pub basis_sign: f64,
    /// Determinant of the Hessian's Gram matrix in that basis.
    pub gram_det: f64,
    /// Product of the two nonzero eigenvalues.
    pub orth_det: f64,
    pub kernel: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CuspReport {
    pub plus: CuspSide,
    pub minus: CuspSide,
    /// `|det|^{−1/2}δ^{1/2}` ratio with Gram determinants.
    pub amplitude_ratio: f64,
    /// Same ratio with the orthonormal transverse determinants.
    pub amplitude_ratio_orth: f64,
    /// `|det|·δ^{1/2}` ratio (Gram determinants).
    pub det_times_delta_ratio: f64,
    pub checks: Vec<Check>,
}

impl CuspReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

fn cusp_basis(eps: f64, s: f64) -> [Vector3<f64>; 2] {
    let c = 1.0 / (2.0 * eps.sqrt());
    [Vector3::new(s, eps, 0.0) * c, Vector3::new(0.0, eps, -s) * c]
}

fn cusp_side(cp: CriticalPoint) -> Result<CuspSide> {
    let n = cp.kernel().ok_or(Error::Degenerate)?;
    let r3 = 3f64.sqrt();
    let mut best: Option<(f64, f64, f64)> = None;
    for eps in [2.0 + r3, 2.0 - r3] {
        for s in [1.0, -1.0] {
            let b = cusp_basis(eps, s);
            let off = b[0].dot(&n).abs() + b[1].dot(&n).abs();
            if best.map_or(true, |(o, _, _)| off < o) {
                best = Some((off, eps, s));
            }
        }
    }
    let (_, eps, s) = best.expect("four candidates");
    let gram = restricted_hessian(&cp.hessian_matrix(), &cusp_basis(eps, s));
    Ok(CuspSide {
        point: cp,
        basis_eps: eps,
        basis_sign: s,
        gram_det: gram.determinant(),
        orth_det: cp.transverse_det(),
        kernel: [n[0], n[1], n[2]],
    })
}

/// The two critical points over `a_cusp`, the `+` one having larger `u13`.
pub fn cusp_critical_points() -> Result<(CriticalPoint, CriticalPoint)> {
    let nu = SpectralParam::self_dual(1.0)?;
    let pts = critical_points(&ChamberPoint::cusp(), &nu)?;
    if pts.len() != 2 {
        return Err(Error::IncompleteCriticalSet { found: pts.len(), expected: 2 });
    }
    // sorted by u13
    Ok((pts[1], pts[0]))
}

/// Recomputes the Hessian invariants at the two cusp critical points and
/// compares them with their closed forms.
pub fn hessian_invariants_at_cusp() -> Result<CuspReport> {
    let (p, m) = cusp_critical_points()?;
    let (plus, minus) = (cusp_side(p)?, cusp_side(m)?);
    let r3 = 3f64.sqrt();
    let amp = |s: &CuspSide, det: f64| det.abs().powf(-0.5) * s.point.delta_half;
    let amplitude_ratio = amp(&plus, plus.gram_det) / amp(&minus, minus.gram_det);
    let amplitude_ratio_orth = amp(&plus, plus.orth_det) / amp(&minus, minus.orth_det);
    let det_times_delta_ratio =
        plus.gram_det.abs() * plus.point.delta_half / (minus.gram_det.abs() * minus.point.delta_half);
    let mut checks = vec![
        Check::rel("u13(+)", plus.point.u.u13, 2.0 + r3, 1e-8),
        Check::rel("u12(+)", plus.point.u.u12, -1.0 - r3, 1e-8),
        Check::rel("u23(+)", plus.point.u.u23, -1.0 - r3, 1e-8),
        Check::rel("u13(-)", minus.point.u.u13, 2.0 - r3, 1e-8),
        Check::rel("u12(-)", minus.point.u.u12, 1.0 - r3, 1e-8),
        Check::rel("u23(-)", minus.point.u.u23, 1.0 - r3, 1e-8),
        Check::rel("corank(+)", plus.point.corank as f64, 1.0, 0.0),
        Check::rel("corank(-)", minus.point.corank as f64, 1.0, 0.0),
        Check::rel("|det Q(+)|", plus.gram_det.abs(), (13.0 - 4.0 * r3) / 288.0, 1e-6),
        Check::rel("|det Q(-)|", minus.gram_det.abs(), (13.0 + 4.0 * r3) / 288.0, 1e-6),
        Check::rel("signature(+)", plus.point.signature_transverse as f64, 2.0, 0.0),
        Check::rel("signature(-)", minus.point.signature_transverse as f64, -2.0, 0.0),
        Check::rel("delta_half(+)", plus.point.delta_half, 1.0 / (12.0 + 6.0 * r3), 1e-10),
        Check::rel("delta_half(-)", minus.point.delta_half, 1.0 / (12.0 - 6.0 * r3), 1e-10),
    ];
    checks.push(Check::rel("amplitude ratio", amplitude_ratio, 121.0 / (2767.0 + 1596.0 * r3), 1e-6));
    Ok(CuspReport { plus, minus, amplitude_ratio, amplitude_ratio_orth, det_times_delta_ratio, checks })
}

/// `Y₁Y₂(Y₁Y₂)^{−i·freq}`: converts a `U`-integral into the Whittaker value.
fn prefactor(p: &ChamberPoint, nu: &SpectralParam) -> Complex64 {
    let prod = nu.t * nu.t * p.y1() * p.y2();
    Complex64::from_polar(prod, -nu.freq() * prod.ln())
}

/// Morse stationary-phase prediction of `W(t·a)` (self-dual, all critical
/// points nondegenerate; an empty critical set gives 0).
pub fn predict_morse(p: &ChamberPoint, nu: &SpectralParam) -> Result<Complex64> {
    let pts = critical_points(p, nu)?;
    if pts.iter().any(|c| c.corank > 0) {
        return Err(Error::Degenerate);
    }
    let f = nu.freq();
    let sum: Complex64 = pts
        .iter()
        .map(|c| {
            let det = c.hessian_matrix().determinant().abs();
            let ph = f * c.phase + PI * c.signature_transverse as f64 / 4.0;
            Complex64::from_polar((2.0 * PI / f).powf(1.5) * c.delta_half / det.sqrt(), ph)
        })
        .sum();
    Ok(prefactor(p, nu) * sum)
}

/// Pearcey prediction near the cusp, split by critical point.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PearceyPrediction {
    pub total: Complex64,
    pub plus: Complex64,
    pub minus: Complex64,
    /// Pearcey arguments used for each side.
    pub args_plus: [f64; 2],
    pub args_minus: [f64; 2],
}

/// `|y₁+y₂−2/√3| ≤ K t^{−3/4}` and `|y₁−y₂| ≤ K t^{−1/2}`.
pub fn in_cusp_window(p: &ChamberPoint, t: f64, k: f64) -> bool {
    let (y1, y2) = (p.y1(), p.y2());
    (y1 + y2 - 2.0 / 3f64.sqrt()).abs() <= k * t.powf(-0.75) && (y1 - y2).abs() <= k * t.powf(-0.5)
}

/// The transverse Hessian stays invertible along the kernel line of both
/// cusp points up to about 0.35.
const MAX_FIT_WIDTH: f64 = 0.3;
const MIN_FIT_WIDTH: f64 = 0.05;
const FIT_NODES: usize = 41;
const FIT_DEGREE: usize = 6;
const Y_STEPS: usize = 16;

/// Phase reduced to the kernel line through a cusp critical point: for each
/// kernel offset `s` in `[−half_width, half_width]` the transverse critical
/// point is found by Newton, continued outward from `s = 0`.
fn reduced_phase(cp: &CriticalPoint, y1: f64, y2: f64, nu: &SpectralParam, half_width: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let (_, vecs) = cp.eigen();
    let n = vecs.column(0).into_owned();
    let q = [vecs.column(1).into_owned(), vecs.column(2).into_owned()];
    let base = cp.u.to_vector();
    let at = |s: f64, c: &Vector2<f64>| UnipotentPoint::from_vector(&(base + n * s + q[0] * c[0] + q[1] * c[1]));
    let residual = |s: f64, c: &Vector2<f64>, y: (f64, f64)| {
        let g = grad_phase(&at(s, c), y.0, y.1, nu);
        Vector2::new(q[0].dot(&g), q[1].dot(&g))
    };
    // Newton with backtracking on the transverse gradient norm
    let solve = |s: f64, mut c: Vector2<f64>, y: (f64, f64)| -> Result<Vector2<f64>> {
        let mut r = residual(s, &c, y);
        for _ in 0..60 {
            if r.norm() <= 1e-3 * GRAD_TOL {
                return Ok(c);
            }
            let h = restricted_hessian(&hessian_phase(&at(s, &c), y.0, y.1, nu), &q);
            let mut step = h.try_inverse().ok_or(Error::Singular)? * r;
            if step.norm() > 0.25 {
                step *= 0.25 / step.norm();
            }
            let mut lambda = 1.0;
            loop {
                let cn = c - step * lambda;
                let rn = residual(s, &cn, y);
                if rn.norm() < r.norm() || lambda < 1e-3 {
                    c = cn;
                    r = rn;
                    break;
                }
                lambda *= 0.5;
            }
        }
        Err(Error::NoConvergence { value: Complex64::new(s, 0.0), err: r.norm() })
    };
    let m = FIT_NODES / 2;
    let node = |i: usize| half_width * (i as f64 - m as f64) / m as f64;
    // at s = 0 walk y in from a_cusp, where the transverse solution is c = 0
    let a = 1.0 / 3f64.sqrt();
    let mut c0 = Vector2::zeros();
    for k in 1..=Y_STEPS {
        let f = k as f64 / Y_STEPS as f64;
        c0 = solve(0.0, c0, (a + f * (y1 - a), a + f * (y2 - a)))?;
    }
    let value = |s: f64, c: &Vector2<f64>| phase(&at(s, c), y1, y2, nu);
    let mut vals = vec![0.0; FIT_NODES];
    vals[m] = value(0.0, &c0);
    for dir in [1isize, -1] {
        let mut c = c0;
        for k in 1..=m {
            let i = (m as isize + dir * k as isize) as usize;
            c = solve(node(i), c, (y1, y2))?;
            vals[i] = value(node(i), &c);
        }
    }
    Ok(((0..FIT_NODES).map(node).collect(), vals))
}

/// Least-squares polynomial coefficients (ascending).
fn poly_fit(x: &[f64], y: &[f64], degree: usize) -> Result<Vec<f64>> {
    let a = DMatrix::from_fn(x.len(), degree + 1, |i, j| x[i].powi(j as i32));
    let b = DVector::from_column_slice(y);
    let sol = a.svd(true, true).solve(&b, 1e-14).map_err(|e| Error::InvalidInput(e.to_string()))?;
    Ok(sol.iter().copied().collect())
}

fn pearcey_term(cp: &CriticalPoint, p: &ChamberPoint, nu: &SpectralParam, cfg: &QuadConfig) -> Result<(Complex64, [f64; 2])> {
    let f = nu.freq();
    // fit over a few Pearcey lengths `(4·freq·b₄)^{−1/4}`
    // (the transverse problem can lose its solution near the ends; the
    // interval is shrunk when that happens)
    let mut width = MAX_FIT_WIDTH;
    let mut c = Vec::new();
    for _ in 0..2 {
        let (s, g) = loop {
            match reduced_phase(cp, p.y1(), p.y2(), nu, width) {
                Ok(r) => break r,
                Err(_) if width > MIN_FIT_WIDTH => width = (width * 0.7).max(MIN_FIT_WIDTH),
                Err(e) => return Err(e),
            }
        };
        c = poly_fit(&s, &g, FIT_DEGREE)?;
        width = (3.0 * (4.0 * f * c[4].abs()).powf(-0.25)).clamp(MIN_FIT_WIDTH, width);
    }
    // remove the cubic term by a shift of the kernel coordinate
    let s0 = -c[3] / (4.0 * c[4]);
    let ev = |k: usize| -> f64 {
        // k-th Taylor coefficient of the fitted polynomial at s0
        (k..c.len())
            .map(|j| c[j] * binom(j, k) * s0.powi((j - k) as i32))
            .sum()
    };
    let (b0, b1, b2, b4) = (ev(0), ev(1), ev(2), ev(4));
    let kappa = (4.0 * f * b4.abs()).powf(0.25);
    let sign = b4.signum();
    let args = [sign * 2.0 * f * b2 / (kappa * kappa), sign * f * b1 / kappa];
    let pe = pearcey(args[0], args[1], cfg)?.value;
    let pe = if sign > 0.0 { pe } else { pe.conj() };
    let (ev_h, _) = cp.eigen();
    let q_det = ev_h[1] * ev_h[2];
    let sig = (ev_h[1].signum() + ev_h[2].signum()) as f64;
    let amp = (2.0 * PI / f) * q_det.abs().powf(-0.5) * cp.delta_half / kappa;
    Ok((Complex64::from_polar(amp, f * b0 + PI * sig / 4.0) * pe, args))
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Pearcey prediction of `W(t·a)` for `a` in the cusp window with constant
/// `window`: one uniform Pearcey term per cusp critical point.
pub fn predict_pearcey(p: &ChamberPoint, nu: &SpectralParam, window: f64, cfg: &QuadConfig) -> Result<PearceyPrediction> {
    if !nu.is_self_dual() {
        return Err(Error::InvalidInput("Pearcey prediction is for the self-dual ray".into()));
    }
    if !in_cusp_window(p, nu.t, window) {
        return Err(Error::OutsideWindow);
    }
    // kernel and transverse frames are taken at a_cusp; the reduced phase at a
    let (cp, cm) = cusp_critical_points()?;
    let (plus, args_plus) = pearcey_term(&cp, p, nu, cfg)?;
    let (minus, args_minus) = pearcey_term(&cm, p, nu, cfg)?;
    let pre = prefactor(p, nu);
    Ok(PearceyPrediction { total: pre * (plus + minus), plus: pre * plus, minus: pre * minus, args_plus, args_minus })
}

/// Least-squares slope of `log v` against `log x`.
pub fn loglog_slope(x: &[f64], v: &[f64]) -> f64 {
    let n = x.len() as f64;
    let lx: Vec<f64> = x.iter().map(|a| a.ln()).collect();
    let lv: Vec<f64> = v.iter().map(|a| a.ln()).collect();
    let (mx, mv) = (lx.iter().sum::<f64>() / n, lv.iter().sum::<f64>() / n);
    let cov: f64 = lx.iter().zip(&lv).map(|(a, b)| (a - mx) * (b - mv)).sum();
    let var: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    cov / var
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SupnormRow {
    pub t: f64,
    pub y1: f64,
    pub y2: f64,
    pub abs_w: f64,
    pub err: f64,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SupnormReport {
    pub n: usize,
    /// Maximizer per `t`.
    pub maxima: Vec<SupnormRow>,
    /// Every evaluated point.
    pub rows: Vec<SupnormRow>,
    pub slope: f64,
    /// Expected t-exponent of the maximum.
    pub expected: f64,
}

/// GL(2): maximum of `|W|` (unit normalized) over `y` near the turning point
/// `τ/2π`, for each `τ`. The Airy layer there has width `∝ τ^{1/3}`.
pub fn supnorm_scan_gl2(taus: &[f64], per_tau: usize, cfg: &QuadConfig) -> Result<SupnormReport> {
    if taus.len() < 3 {
        return Err(Error::InvalidInput("need at least three spectral values".into()));
    }
    let mut rows = Vec::new();
    let mut maxima = Vec::new();
    for &tau in taus {
        let turn = tau / (2.0 * PI);
        let width = tau.powf(1.0 / 3.0) / (2.0 * PI);
        let ys: Vec<f64> = (0..per_tau).map(|i| turn - 4.0 * width + 5.0 * width * i as f64 / (per_tau - 1) as f64).filter(|y| *y > 0.0).collect();
        let vals = ys
            .par_iter()
            .map(|&y| super::gl2_whittaker(y, tau, cfg).map(|r| (y, r)))
            .collect::<Result<Vec<_>>>()?;
        let mut here: Vec<SupnormRow> = vals
            .into_iter()
            .map(|(y, r)| SupnormRow { t: tau, y1: y, y2: 0.0, abs_w: super::GL2_UNIT_CONSTANT * r.value.norm(), err: super::GL2_UNIT_CONSTANT * r.err_estimate })
            .collect();
        let best = refine_gl2_max(&here, tau, cfg)?;
        maxima.push(best.clone());
        rows.append(&mut here);
        rows.push(best);
    }
    let slope = loglog_slope(taus, &maxima.iter().map(|r| r.abs_w).collect::<Vec<_>>());
    Ok(SupnormReport { n: 2, maxima, rows, slope, expected: 2.0 * (SpectralParam::c_exponent(2) / 2.0 + 1.0 / 12.0) })
}

/// Golden-section refinement around the best sampled point.
fn refine_gl2_max(rows: &[SupnormRow], tau: f64, cfg: &QuadConfig) -> Result<SupnormRow> {
    let i = (0..rows.len()).max_by(|&a, &b| rows[a].abs_w.total_cmp(&rows[b].abs_w)).expect("nonempty scan");
    let lo = rows[i.saturating_sub(1)].y1;
    let hi = rows[(i + 1).min(rows.len() - 1)].y1;
    let f = |y: f64| super::gl2_whittaker(y, tau, cfg).map(|r| (super::GL2_UNIT_CONSTANT * r.value.norm(), super::GL2_UNIT_CONSTANT * r.err_estimate));
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    for _ in 0..30 {
        if fc.0 > fd.0 {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d)?;
        }
    }
    let (y, v) = if fc.0 > fd.0 { (c, fc) } else { (d, fd) };
    let best = if v.0 >= rows[i].abs_w { SupnormRow { t: tau, y1: y, y2: 0.0, abs_w: v.0, err: v.1 } } else { rows[i].clone() };
    Ok(best)
}

/// GL(3) self-dual: maximum of `|W(t·a)|` over the cusp window for each
/// `t` (`window` is the constant of the window). The window is sampled on a
/// `per_axis²` grid and the best node is refined by compass search.
pub fn supnorm_scan_gl3(ts: &[f64], window: f64, per_axis: usize, rel_tol: f64) -> Result<SupnormReport> {
    if ts.len() < 3 {
        return Err(Error::InvalidInput("need at least three spectral values".into()));
    }
    let c = 1.0 / 3f64.sqrt();
    let mut rows = Vec::new();
    let mut maxima = Vec::new();
    for &t in ts {
        let ev = Gl3Evaluator::new(&SpectralParam::self_dual(t)?)?;
        let node = |i: usize| if per_axis == 1 { 0.0 } else { -1.0 + 2.0 * i as f64 / (per_axis - 1) as f64 };
        // window coordinates in [−1, 1]²
        let at = |a: f64, b: f64| -> Result<SupnormRow> {
            let sum = 2.0 * c + window * t.powf(-0.75) * a;
            let diff = window * t.powf(-0.5) * b;
            let (y1, y2) = (0.5 * (sum + diff), 0.5 * (sum - diff));
            let r = eval_lenient(&ev, y1, y2, rel_tol)?;
            Ok(SupnormRow { t, y1, y2, abs_w: r.value.norm(), err: r.err_estimate })
        };
        let mut here = Vec::new();
        let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
        for i in 0..per_axis {
            for j in 0..per_axis {
                let row = at(node(i), node(j))?;
                if row.abs_w > best.0 {
                    best = (row.abs_w, node(i), node(j));
                }
                here.push(row);
            }
        }
        // compass search from the best node, kept inside the window
        let mut step = if per_axis > 1 { 2.0 / (per_axis - 1) as f64 } else { 0.5 };
        let (mut a, mut b) = (best.1, best.2);
        let mut top = at(a, b)?;
        while step > 1e-4 {
            let mut moved = false;
            for (da, db) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
                let (na, nb) = ((a + da).clamp(-1.0, 1.0), (b + db).clamp(-1.0, 1.0));
                if (na, nb) == (a, b) {
                    continue;
                }
                let cand = at(na, nb)?;
                if cand.abs_w > top.abs_w {
                    (a, b, top, moved) = (na, nb, cand, true);
                    break;
                }
            }
            if !moved {
                step *= 0.5;
            }
        }
        maxima.push(top);
        rows.extend(here);
    }
    let slope = loglog_slope(ts, &maxima.iter().map(|r| r.abs_w).collect::<Vec<_>>());
    Ok(SupnormReport { n: 3, maxima, rows, slope, expected: 2.0 * (SpectralParam::c_exponent(3) / 2.0 + 1.0 / 8.0) })
}

/// Accepts a value whose step-doubling estimate missed `rel_tol` when the
/// estimate is still below one percent; the error is carried along.
pub fn eval_lenient(ev: &Gl3Evaluator, y1: f64, y2: f64, rel_tol: f64) -> Result<crate::oscint::OscResult> {
    match ev.eval_scaled(y1, y2, rel_tol) {
        Err(Error::NoConvergence { value, err }) if err <= 1e-2 * value.norm() => {
            Ok(crate::oscint::OscResult { value, err_estimate: err })
        }
        r => r,
    }
}

/// Degeneracy labels of the located critical points (sorted by `u13`).
pub fn degeneracy_labels(p: &ChamberPoint, nu: &SpectralParam) -> Result<Vec<Degeneracy>> {
    Ok(critical_points(p, nu)?.iter().map(|c| c.degeneracy).collect())
}
