//! Oscillatory quadrature: adaptive Gauss–Kronrod in one dimension, dyadic
//! smooth partitions for improper oscillatory integrals, a radially cut off
//! 3-D integrator, and the generalized Airy / Pearcey functions.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct OscResult {
    pub value: Complex64,
    pub err_estimate: f64,
}

impl OscResult {
    pub fn zero() -> Self {
        OscResult { value: Complex64::new(0.0, 0.0), err_estimate: 0.0 }
    }
}

impl std::ops::Add for OscResult {
    type Output = OscResult;
    fn add(self, o: OscResult) -> OscResult {
        OscResult { value: self.value + o.value, err_estimate: self.err_estimate + o.err_estimate }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Maximal bisection depth below the initial subdivision (1-D), or box
    /// refinement depth (3-D).
    pub max_levels: u32,
    /// First cutoff radius of the 3-D radius-doubling schedule.
    pub initial_radius: f64,
    /// Number of doublings allowed before giving up.
    pub max_doublings: u32,
}

impl QuadConfig {
    pub fn one_d() -> Self {
        QuadConfig { rel_tol: 1e-8, abs_tol: 1e-14, max_levels: 40, initial_radius: 4.0, max_doublings: 4 }
    }

    pub fn three_d() -> Self {
        QuadConfig { rel_tol: 1e-4, abs_tol: 1e-12, max_levels: 6, initial_radius: 4.0, max_doublings: 4 }
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    fn check(&self) -> Result<()> {
        if self.rel_tol > 0.0 && self.abs_tol >= 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidInput("rel_tol must be positive".into()))
        }
    }
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self::one_d()
    }
}

// Gauss–Kronrod 7/15 nodes on [-1, 1] (nonnegative half).
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Kronrod value, error estimate `|K − G|` floored at the rounding level,
/// and `∫|f|` for the panel.
fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> (Complex64, f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    let mut abs = fc.norm() * WGK[7];
    for j in 0..7 {
        let x = h * XGK[j];
        let (l, r) = (f(c - x), f(c + x));
        k += (l + r) * WGK[j];
        abs += (l.norm() + r.norm()) * WGK[j];
        if j % 2 == 1 {
            g += (l + r) * WG[j / 2];
        }
    }
    let abs = abs * h.abs();
    let err = ((k - g) * h).norm().max(50.0 * f64::EPSILON * abs);
    (k * h, err, abs)
}

struct Piece {
    a: f64,
    b: f64,
    value: Complex64,
    err: f64,
    depth: u32,
}

impl PartialEq for Piece {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Piece {
    fn cmp(&self, o: &Self) -> Ordering {
        self.err.total_cmp(&o.err)
    }
}

/// Adaptive Gauss–Kronrod on `[a, b]`, starting from `pieces` equal parts.
/// Stops when the summed error is below `max(abs_tol, rel_tol·|value|)`.
pub fn integrate<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, pieces: usize, cfg: &QuadConfig) -> Result<OscResult> {
    cfg.check()?;
    let pieces = pieces.max(1);
    let mut heap = BinaryHeap::with_capacity(2 * pieces);
    let mut total = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    let mut abs_total = 0.0;
    let w = (b - a) / pieces as f64;
    for i in 0..pieces {
        let lo = a + w * i as f64;
        let hi = if i + 1 == pieces { b } else { lo + w };
        let (v, e, m) = gk15(&f, lo, hi);
        total += v;
        err += e;
        abs_total += m;
        heap.push(Piece { a: lo, b: hi, value: v, err: e, depth: 0 });
    }
    loop {
        let floor = 100.0 * f64::EPSILON * abs_total;
        let target = cfg.abs_tol.max(cfg.rel_tol * total.norm()).max(floor);
        if err <= target {
            return Ok(OscResult { value: total, err_estimate: err });
        }
        let Some(p) = heap.pop() else { break };
        if p.depth >= cfg.max_levels || !err.is_finite() {
            return Err(Error::NoConvergence { value: total, err });
        }
        let m = 0.5 * (p.a + p.b);
        let (v1, e1, _) = gk15(&f, p.a, m);
        let (v2, e2, _) = gk15(&f, m, p.b);
        total += v1 + v2 - p.value;
        err += e1 + e2 - p.err;
        heap.push(Piece { a: p.a, b: m, value: v1, err: e1, depth: p.depth + 1 });
        heap.push(Piece { a: m, b: p.b, value: v2, err: e2, depth: p.depth + 1 });
    }
    Err(Error::NoConvergence { value: total, err })
}

/// Smooth step: 1 on `r ≤ 1`, 0 on `r ≥ 2`.
pub fn cutoff(r: f64) -> f64 {
    if r <= 1.0 {
        1.0
    } else if r >= 2.0 {
        0.0
    } else {
        let u = 2.0 - r;
        let a = (-1.0 / u).exp();
        let b = (-1.0 / (1.0 - u)).exp();
        a / (a + b)
    }
}

/// Number of starting pieces so that each carries at most about half an
/// oscillation of `phase` on `[a, b]`.
fn pieces_for<P: Fn(f64) -> f64>(phase: &P, a: f64, b: f64) -> usize {
    const SAMPLES: usize = 64;
    let h = (b - a) / SAMPLES as f64;
    let mut var = 0.0;
    let mut prev = phase(a);
    for i in 1..=SAMPLES {
        let cur = phase(a + h * i as f64);
        var += (cur - prev).abs();
        prev = cur;
    }
    ((var / PI).ceil() as usize).clamp(4, 1 << 20)
}

const MAX_SHELLS: u32 = 64;

/// `∫_ℝ amplitude(x) e^{i·phase(x)} dx` for an improper, possibly only
/// conditionally convergent integral. The line is cut by the dyadic
/// partition `χ(|x|)`, `χ(|x|/2ⁿ) − χ(|x|/2ⁿ⁻¹)`; shells are summed until two
/// consecutive ones are negligible. Shells beyond `tail_from` must be free of
/// stationary points.
pub fn oscillatory_1d<P, A>(phase: P, amplitude: A, tail_from: f64, cfg: &QuadConfig) -> Result<OscResult>
where
    P: Fn(f64) -> f64 + Sync,
    A: Fn(f64) -> Complex64 + Sync,
{
    cfg.check()?;
    let f = |x: f64, w: f64| amplitude(x) * Complex64::from_polar(w, phase(x));
    let shell_cfg = QuadConfig { rel_tol: cfg.rel_tol / 8.0, ..*cfg };
    let core = integrate(|x| f(x, cutoff(x.abs())), -2.0, 2.0, pieces_for(&phase, -2.0, 2.0), &shell_cfg)?;
    let mut total = core;
    let mut quiet = 0;
    for n in 1..MAX_SHELLS {
        let r = 2f64.powi(n as i32);
        let weight = |x: f64| cutoff(x.abs() / r) - cutoff(2.0 * x.abs() / r);
        let (lo, hi) = (0.5 * r, 2.0 * r);
        let in_tail = lo >= tail_from;
        if in_tail {
            check_nonstationary(&phase, lo, hi)?;
            check_nonstationary(&phase, -hi, -lo)?;
        }
        let sides: Vec<Result<OscResult>> = [(-hi, -lo), (lo, hi)]
            .par_iter()
            .map(|&(a, b)| {
                let shell_tol = QuadConfig { abs_tol: cfg.abs_tol.max(cfg.rel_tol * total.value.norm() / 8.0), ..shell_cfg };
                integrate(|x| f(x, weight(x)), a, b, pieces_for(&phase, a, b), &shell_tol)
            })
            .collect();
        let mut shell = OscResult::zero();
        for s in sides {
            shell = shell + s?;
        }
        total = total + shell;
        let small = shell.value.norm() <= cfg.abs_tol.max(0.1 * cfg.rel_tol * total.value.norm());
        quiet = if in_tail && small { quiet + 1 } else { 0 };
        if quiet >= 2 {
            total.err_estimate += shell.value.norm();
            return Ok(total);
        }
    }
    Err(Error::NoConvergence { value: total.value, err: total.err_estimate })
}

/// The phase derivative must keep one sign and stay away from zero on
/// `[a, b]`.
fn check_nonstationary<P: Fn(f64) -> f64>(phase: &P, a: f64, b: f64) -> Result<()> {
    const SAMPLES: usize = 256;
    let d = |x: f64| {
        let h = 1e-6 * x.abs().max(1.0);
        (phase(x + h) - phase(x - h)) / (2.0 * h)
    };
    let step = (b - a) / SAMPLES as f64;
    let first = d(a);
    for i in 0..=SAMPLES {
        let x = a + step * i as f64;
        let v = d(x);
        if v == 0.0 || v.signum() != first.signum() {
            return Err(Error::TailNotNonstationary(format!("phase derivative changes sign near x = {x:.4}")));
        }
    }
    Ok(())
}

/// Generalized Airy function `Ai_k(y) = ∫ exp(i(y_{k−1}x + y_{k−2}x²/2 + ⋯
/// + y₁x^{k−1}/(k−1) + x^{k+1}/(k+1))) dx` for `k ∈ {2, 3, 4}`.
pub fn airy_k(k: usize, y: &[f64], cfg: &QuadConfig) -> Result<OscResult> {
    rotated_integral(k, y, &[1.0], cfg)
}

/// Pearcey function `Pe(y₁, y₂) = ∫ exp(i(y₂x + y₁x²/2 + x⁴/4)) dx`.
pub fn pearcey(y1: f64, y2: f64, cfg: &QuadConfig) -> Result<OscResult> {
    rotated_integral(3, &[y1, y2], &[1.0], cfg)
}

/// `∂Pe/∂y₁`: amplitude `i x²/2`.
pub fn pearcey_d1(y1: f64, y2: f64, cfg: &QuadConfig) -> Result<OscResult> {
    rotated_integral_c(3, &[y1, y2], &[Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.5)], cfg)
}

/// `∂Pe/∂y₂`: amplitude `i x`.
pub fn pearcey_d2(y1: f64, y2: f64, cfg: &QuadConfig) -> Result<OscResult> {
    rotated_integral_c(3, &[y1, y2], &[Complex64::new(0.0, 0.0), Complex64::i()], cfg)
}

fn rotated_integral(k: usize, y: &[f64], amp: &[f64], cfg: &QuadConfig) -> Result<OscResult> {
    let amp: Vec<Complex64> = amp.iter().map(|&a| Complex64::new(a, 0.0)).collect();
    rotated_integral_c(k, y, &amp, cfg)
}

/// `∫ P(x) e^{i q(x)} dx` with `q` the Airy phase and polynomial amplitude `P`
/// (ascending coefficients). Each half-line is rotated so that the leading
/// term becomes `−r^{k+1}/(k+1)`.
fn rotated_integral_c(k: usize, y: &[f64], amp: &[Complex64], cfg: &QuadConfig) -> Result<OscResult> {
    if !(2..=4).contains(&k) {
        return Err(Error::InvalidInput(format!("Ai_k supported for k in 2..=4, got {k}")));
    }
    if y.len() != k - 1 {
        return Err(Error::InvalidInput(format!("Ai_{k} takes {} arguments", k - 1)));
    }
    // phase coefficients c_m of x^m, m = 1..=k+1
    let mut c = vec![0.0; k + 2];
    for (j, &yj) in y.iter().enumerate() {
        let m = k - 1 - j;
        c[m] = yj / m as f64;
    }
    c[k + 1] = 1.0 / (k + 1) as f64;
    let theta = PI / (2.0 * (k + 1) as f64);
    // x = +r e^{iθ} on the right; x = −r e^{±iθ} on the left
    let left_angle = if (k + 1) % 2 == 0 { theta } else { -theta };
    let rays = [(Complex64::from_polar(1.0, theta), Complex64::from_polar(1.0, theta)), (
        -Complex64::from_polar(1.0, left_angle),
        Complex64::from_polar(1.0, left_angle),
    )];
    // radius where the Gaussian-like decay wins by e^{-60}
    let growth = |r: f64| -> f64 {
        let lower: f64 = (1..=k).map(|m| c[m].abs() * r.powi(m as i32)).sum();
        r.powi(k as i32 + 1) / (k + 1) as f64 - lower - 60.0 - amp.len() as f64 * r.max(1.0).ln()
    };
    let mut rmax = 1.0;
    while growth(rmax) < 0.0 {
        rmax *= 1.25;
    }
    let eval = |dir: Complex64, jac: Complex64, r: f64| -> Complex64 {
        let x = dir * r;
        let mut q = Complex64::new(0.0, 0.0);
        for m in (1..=k + 1).rev() {
            q = (q + c[m]) * x;
        }
        let mut p = Complex64::new(0.0, 0.0);
        for &a in amp.iter().rev() {
            p = p * x + a;
        }
        p * (Complex64::i() * q).exp() * jac
    };
    let mut out = OscResult::zero();
    for &(dir, jac) in &rays {
        let pieces = (rmax.ceil() as usize * 4).max(8);
        let part = integrate(|r| eval(dir, jac, r), 0.0, rmax, pieces, &QuadConfig { rel_tol: cfg.rel_tol / 4.0, ..*cfg })?;
        out = out + part;
    }
    Ok(out)
}

/// `∫_{ℝ³} amplitude(x) e^{i·phase(x)} χ(|x|/R) dx` with `R` doubled from
/// `cfg.initial_radius` until two successive values agree to `rel_tol`.
pub fn oscillatory_3d<P, A>(phase: P, amplitude: A, cfg: &QuadConfig) -> Result<OscResult>
where
    P: Fn([f64; 3]) -> f64 + Sync,
    A: Fn([f64; 3]) -> Complex64 + Sync,
{
    cfg.check()?;
    let mut r = cfg.initial_radius;
    let mut prev: Option<OscResult> = None;
    for _ in 0..=cfg.max_doublings {
        let f = |x: [f64; 3]| {
            let w = cutoff((x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt() / r);
            if w == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                amplitude(x) * Complex64::from_polar(w, phase(x))
            }
        };
        let cur = cube_integral(&f, 2.0 * r, cfg)?;
        if let Some(p) = prev {
            let diff = (cur.value - p.value).norm();
            if diff <= cfg.rel_tol * cur.value.norm() || diff <= cfg.abs_tol {
                return Ok(OscResult { value: cur.value, err_estimate: cur.err_estimate + diff });
            }
        }
        prev = Some(cur);
        r *= 2.0;
    }
    let p = prev.expect("at least one radius");
    Err(Error::NoConvergence { value: p.value, err: p.err_estimate })
}

const GL_ORDER: usize = 8;

fn gauss_legendre() -> ([f64; GL_ORDER], [f64; GL_ORDER]) {
    // 8-point rule
    let x = [
        -0.960289856497536231683560868569473,
        -0.796666477413626739591553936475830,
        -0.525532409916328985817739049189254,
        -0.183434642495649804939476142360184,
        0.183434642495649804939476142360184,
        0.525532409916328985817739049189254,
        0.796666477413626739591553936475830,
        0.960289856497536231683560868569473,
    ];
    let w = [
        0.101228536290376259152531354309962,
        0.222381034453374470544355994426241,
        0.313706645877887287337962201986601,
        0.362683783378361982965150449277225,
        0.362683783378361982965150449277225,
        0.313706645877887287337962201986601,
        0.222381034453374470544355994426241,
        0.101228536290376259152531354309962,
    ];
    (x, w)
}

fn box_rule<F: Fn([f64; 3]) -> Complex64>(f: &F, lo: [f64; 3], h: f64) -> Complex64 {
    let (x, w) = gauss_legendre();
    let half = 0.5 * h;
    let mut s = Complex64::new(0.0, 0.0);
    for i in 0..GL_ORDER {
        let a = lo[0] + half * (1.0 + x[i]);
        for j in 0..GL_ORDER {
            let b = lo[1] + half * (1.0 + x[j]);
            let wij = w[i] * w[j];
            for k in 0..GL_ORDER {
                let c = lo[2] + half * (1.0 + x[k]);
                s += f([a, b, c]) * (wij * w[k]);
            }
        }
    }
    s * half.powi(3)
}

fn children(lo: [f64; 3], h: f64) -> impl Iterator<Item = [f64; 3]> {
    let hh = 0.5 * h;
    (0..8).map(move |m| [lo[0] + hh * (m & 1) as f64, lo[1] + hh * ((m >> 1) & 1) as f64, lo[2] + hh * ((m >> 2) & 1) as f64])
}

/// Box `lo + [0,h]³`: tensor Gauss–Legendre against the sum over its eight
/// children, recursing where they disagree by more than `tol`.
fn refine_box<F: Fn([f64; 3]) -> Complex64 + Sync>(f: &F, lo: [f64; 3], h: f64, coarse: Complex64, tol: f64, depth: u32) -> Result<OscResult> {
    let kids: Vec<([f64; 3], Complex64)> = children(lo, h).map(|c| (c, box_rule(f, c, 0.5 * h))).collect();
    let fine: Complex64 = kids.iter().map(|k| k.1).sum();
    let diff = (fine - coarse).norm();
    if diff <= tol {
        return Ok(OscResult { value: fine, err_estimate: diff });
    }
    if depth == 0 {
        return Err(Error::NoConvergence { value: fine, err: diff });
    }
    let mut out = OscResult::zero();
    for (c, v) in kids {
        out = out + refine_box(f, c, 0.5 * h, v, tol / 8f64.sqrt(), depth - 1)?;
    }
    Ok(out)
}

/// Integral over `[-half, half]³`, split into unit-ish boxes evaluated in
/// parallel and summed in a fixed order.
fn cube_integral<F: Fn([f64; 3]) -> Complex64 + Sync>(f: &F, half: f64, cfg: &QuadConfig) -> Result<OscResult> {
    let n = (2.0 * half).ceil().max(1.0) as usize;
    let h = 2.0 * half / n as f64;
    let boxes: Vec<[f64; 3]> = (0..n * n * n)
        .map(|m| [-half + h * (m % n) as f64, -half + h * ((m / n) % n) as f64, -half + h * (m / (n * n)) as f64])
        .collect();
    let coarse: Vec<Complex64> = boxes.par_iter().map(|&lo| box_rule(f, lo, h)).collect();
    let scale = coarse.iter().sum::<Complex64>().norm();
    let tol_box = (cfg.rel_tol * scale).max(cfg.abs_tol) / (4.0 * boxes.len() as f64).sqrt();
    let parts: Vec<Result<OscResult>> =
        boxes.par_iter().zip(&coarse).map(|(&lo, &c)| refine_box(f, lo, h, c, tol_box, cfg.max_levels)).collect();
    let mut out = OscResult::zero();
    for p in parts {
        out = out + p?;
    }
    Ok(out)
}
