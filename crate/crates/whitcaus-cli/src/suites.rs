//! Self-checks run by `whitcaus verify`.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Rotation3, Vector3};
use num_complex::Complex64;
use whitcaus::caustics::*;
use whitcaus::oscint::QuadConfig;
use whitcaus::realpoly::{rat, real_roots, Rat, RatPoly};
use whitcaus::sym3::{ad_k, h_matrix, Sym3};
use whitcaus::whittaker::*;

use crate::report::CheckLine;

fn exact(a: Rat, b: Rat) -> ChamberPoint {
    ChamberPoint::from_squares(a, b).expect("positive squares")
}

fn coeffs(p: &RatPoly) -> Vec<String> {
    p.coeffs().iter().map(|c| c.to_string()).collect()
}

pub fn caustics(slow: bool) -> Vec<CheckLine> {
    let mut out = Vec::new();
    let e = build_e(&exact(rat(1, 4), rat(1, 4))).expect("inside the light zone").primitive();
    out.push(CheckLine::eq("E at (1/2,1/2)", coeffs(&e), coeffs(&RatPoly::from_ints(&[1, 12, -21, -56, -3, 30, 10]))));
    let roots = real_roots(&e).expect("nonzero");
    out.push(CheckLine::eq("E at (1/2,1/2) simple real roots", roots.iter().filter(|r| r.multiplicity == 1).count(), 6));
    let e = build_e(&exact(rat(3, 8), rat(3, 8))).expect("inside the light zone");
    out.push(CheckLine::eq("E on the Light2 diagonal real roots", real_roots(&e).expect("nonzero").len(), 2));
    let e = build_e(&ChamberPoint::cusp()).expect("inside the light zone").primitive();
    out.push(CheckLine::eq("E at a_cusp", coeffs(&e), coeffs(&RatPoly::from_ints(&[-1, 2, 2]).pow(3))));

    // reference sample points: (y1, y2, membership tol, |F|, multiplicities)
    let samples: [(f64, f64, f64, usize, &[usize]); 5] = [
        (0.257, 0.129, 2e-3, 6, &[1; 6]),
        (0.614, 0.573, 2e-3, 2, &[1, 1]),
        (0.739, 0.674, 2e-3, 1, &[2]),
        (0.525, 0.382, 1e-2, 4, &[1, 1, 2, 2]),
        (0.57735, 0.57735, 2e-3, 2, &[3, 3]),
    ];
    for (y1, y2, tol, n, mult) in samples {
        let f = fiber_with_tol(&ChamberPoint::new(y1, y2).expect("positive"), tol);
        let mut m: Vec<usize> = f.points.iter().map(|p| p.multiplicity).collect();
        m.sort();
        out.push(CheckLine::eq(format!("fiber at ({y1}, {y2}) tol {tol:e}"), (f.points.len(), m), (n, mult.to_vec())));
    }

    let pts = [(1, 4, 1, 4), (1, 5, 1, 7), (1, 10, 2, 3), (2, 3, 1, 9), (1, 3, 1, 5), (3, 8, 1, 8), (1, 2, 1, 3)];
    let mut kappas = Vec::new();
    let mut kappas3 = Vec::new();
    let mut relation = true;
    for (a, b, c, d) in pts {
        let p = exact(rat(a, b), rat(c, d));
        let (y1, y2) = p.exact_squares().expect("exact").clone();
        kappas.push((resultant_ed(&p).expect("inside") / resultant_shape(&y1, &y2)).to_string());
        kappas3.push((pspc3_e(&p).expect("inside") / pspc3_shape(&y1, &y2)).to_string());
        let e = build_e(&p).expect("inside");
        let rhs = &e * &RatPoly::new(vec![rat(-1, 3), rat(-2, 3)]) + &e.derivative() * &RatPoly::new(vec![rat(1, 9), rat(1, 9), rat(1, 9)]);
        relation &= build_d(&p).expect("inside") == rhs;
    }
    out.push(CheckLine::eq("resultant constant", kappas, vec!["-918330048".to_string(); pts.len()]));
    out.push(CheckLine::eq("subdiscriminant constant", kappas3, vec!["11664".to_string(); pts.len()]));
    out.push(CheckLine::eq("D = ((-2t-1)/3) E + ((t^2+t+1)/9) E'", relation, true));

    let (worst, spec_dev) = moment_map_recovery(if slow { 10_000 } else { 1_000 });
    out.push(CheckLine::new("moment map recovery (worst distance)", worst, "< 1e-8", worst < 1e-8));
    out.push(CheckLine::new("fiber spectrum deviation", spec_dev, "< 1e-10", spec_dev < 1e-10));

    let mut shadow_ok = true;
    for i in 1..40 {
        for j in 1..40 {
            let (y1, y2) = (0.037 * i as f64, 0.037 * j as f64);
            let empty = fiber(&ChamberPoint::new(y1, y2).expect("positive")).points.is_empty();
            shadow_ok &= empty == (y1 * y1 + y2 * y2 > 1.0);
        }
    }
    out.push(CheckLine::eq("fiber empty exactly outside the unit circle", shadow_ok, true));
    out
}

/// Conjugates of `diag(1,0,−1)` by a deterministic family of rotations,
/// brought to positive Jacobi form and located in the computed fiber.
fn moment_map_recovery(n: usize) -> (f64, f64) {
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    let mut worst = 0f64;
    let mut spec_dev = 0f64;
    for i in 0..n {
        let f = i as f64 + 0.5;
        let angles = [2.0 * PI * (f * golden).fract() - PI, 2.0 * PI * (f * golden * golden).fract() - PI, 2.0 * PI * f / n as f64 - PI];
        let k = Rotation3::from_euler_angles(angles[0], angles[1], angles[2]);
        let s = tridiagonalize(&ad_k(k.matrix(), &h_matrix()).expect("orthogonal"));
        let Ok(p) = ChamberPoint::new(s.s12, s.s23) else { continue };
        let fib = fiber(&p);
        let best = fib.points.iter().map(|q| q.sym().frob_dist(&s)).fold(f64::INFINITY, f64::min);
        worst = worst.max(best);
        for q in &fib.points {
            for (a, b) in q.sym().spectrum().iter().zip([1.0, 0.0, -1.0]) {
                spec_dev = spec_dev.max((a - b).abs());
            }
        }
    }
    (worst, spec_dev)
}

fn tridiagonalize(s: &Sym3) -> Sym3 {
    let (b, c) = (s.s12, s.s13);
    let r = b.hypot(c);
    let (cs, sn) = (b / r, c / r);
    let g = Matrix3::new(1.0, 0.0, 0.0, 0.0, cs, sn, 0.0, -sn, cs);
    let t = ad_k(&g, s).expect("orthogonal");
    let d2 = t.s12.signum();
    let d3 = d2 * t.s23.signum();
    let d = Matrix3::from_diagonal(&Vector3::new(1.0, d2, d3));
    let d = if d.determinant() < 0.0 { -d } else { d };
    ad_k(&d, &t).expect("orthogonal")
}

pub fn hessian() -> Vec<CheckLine> {
    let r = match hessian_invariants_at_cusp() {
        Ok(r) => r,
        Err(e) => return vec![CheckLine::error("cusp critical points", e)],
    };
    let mut out: Vec<CheckLine> = r
        .checks
        .iter()
        .map(|c| CheckLine::new(&c.name, c.value, serde_json::json!({ "target": c.target, "rel_tol": c.rel_tol }), c.pass))
        .collect();
    out.push(CheckLine::eq("signature +", r.plus.point.signature_transverse, 2));
    out.push(CheckLine::eq("signature -", r.minus.point.signature_transverse, -2));
    let r3 = 3f64.sqrt();
    out.push(CheckLine::rel("ratio with the determinant to the first power", r.det_times_delta_ratio, 121.0 / (2767.0 + 1596.0 * r3), 1e-6));
    out
}

pub fn stade() -> Vec<CheckLine> {
    let mut out = Vec::new();
    let gl2 = SpectralParam::gl2(5.0).expect("positive");
    match stade_check_many(&[1.0, 2.0], &gl2, &QuadConfig::one_d().with_rel_tol(1e-7)) {
        Ok(r) => {
            out.push(CheckLine::rel("GL2 tau=5 Stade at 1", r[0].lhs, 1.0, 1e-2));
            out.push(CheckLine::rel("GL2 tau=5 Stade ratio at 2", r[1].ratio(), 1.0, 2e-2));
        }
        Err(e) => out.push(CheckLine::error("GL2 Stade", e)),
    }
    let gl3 = SpectralParam::self_dual(3.0).expect("positive");
    match stade_check_many(&[1.0, 2.5, 3.0], &gl3, &QuadConfig::one_d()) {
        Ok(r) => {
            for s in &r[1..] {
                out.push(CheckLine::rel(format!("GL3 t=3 Stade ratio at {}", s.sigma), s.ratio(), 1.0, 5e-2));
            }
        }
        Err(e) => out.push(CheckLine::error("GL3 Stade", e)),
    }
    out
}

/// `K_{iτ}(z) = ∫₀^∞ e^{−z cosh θ} cos(τθ) dθ` by composite Simpson.
pub fn bessel_k(tau: f64, z: f64) -> f64 {
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

pub fn bessel_shape(y: f64, tau: f64) -> Complex64 {
    Complex64::from_polar(y.sqrt(), tau * y.ln()) * bessel_k(tau, 2.0 * PI * y)
}

pub fn gl2() -> Vec<CheckLine> {
    let mut out = Vec::new();
    let cfg = QuadConfig::one_d();
    let mut worst = 0f64;
    let mut count = 0;
    for tau in [5.0, 10.0] {
        let c = match gl2_whittaker(1.0, tau, &cfg) {
            Ok(w) => w.value / bessel_shape(1.0, tau),
            Err(e) => return vec![CheckLine::error("GL2 calibration", e)],
        };
        // |Γ(1/2+iτ)|² = π / cosh(πτ)
        let expected = 2.0 * PI.sqrt() * ((PI * tau).cosh() / PI).sqrt();
        out.push(CheckLine::rel(format!("GL2 tau={tau} Bessel constant"), c.norm(), expected, 1e-6));
        for i in 0..10 {
            let y = 0.1 * (10.0 * tau).powf(i as f64 / 9.0);
            let o = c * bessel_shape(y, tau);
            match gl2_whittaker(y, tau, &cfg) {
                Ok(w) => worst = worst.max((w.value - o).norm() / o.norm()),
                Err(_) => worst = f64::INFINITY,
            }
            count += 1;
        }
    }
    out.push(CheckLine::new(format!("GL2 vs Bessel oracle, worst of {count}"), worst, "<= 1e-4", worst <= 1e-4));
    match supnorm_scan_gl2(&[10.0, 20.0, 40.0, 80.0], 17, &cfg.with_rel_tol(1e-6)) {
        Ok(r) => out.push(CheckLine::abs("GL2 supnorm slope", r.slope, r.expected, 0.05)),
        Err(e) => out.push(CheckLine::error("GL2 supnorm slope", e)),
    }
    out
}

/// GL(3) growth at the cusp and stationary-phase consistency.
pub fn gl3() -> Vec<CheckLine> {
    let mut out = Vec::new();
    let cfg = QuadConfig::one_d().with_rel_tol(1e-6);
    let ts = [20.0, 40.0, 80.0];
    let mut norm = Vec::new();
    for &t in &ts {
        let nu = SpectralParam::self_dual(t).expect("positive");
        match jacquet_whittaker(&ChamberPoint::cusp(), &nu, &cfg) {
            Ok(w) => {
                let v = w.value.norm() / t.powf(0.75);
                out.push(CheckLine::new(format!("|W|/t^(3/4) at a_cusp, t={t}"), v, "in [0.1, 10]", (0.1..=10.0).contains(&v)));
                norm.push(w.value.norm());
            }
            Err(e) => out.push(CheckLine::error(format!("W at a_cusp, t={t}"), e)),
        }
    }
    if norm.len() == ts.len() {
        out.push(CheckLine::abs("log-log slope of |W| at a_cusp", loglog_slope(&ts, &norm), 0.75, 0.1));
    }
    // the O(1/t) remainder oscillates in t, so its decay is read off RMS
    // values over t in [t0, t0 + 4]
    let p = ChamberPoint::new(0.2, 0.15).expect("positive");
    let band = |t0: f64| -> whitcaus::Result<f64> {
        let (mut e2, mut w2) = (0.0, 0.0);
        for k in 0..9 {
            let nu = SpectralParam::self_dual(t0 + 0.5 * k as f64).expect("positive");
            let w = eval_lenient(&Gl3Evaluator::new(&nu)?, p.y1(), p.y2(), 1e-8)?.value;
            e2 += (predict_morse(&p, &nu)? - w).norm_sqr();
            w2 += w.norm_sqr();
        }
        Ok((e2 / w2).sqrt())
    };
    match (band(40.0), band(80.0)) {
        (Ok(e40), Ok(e80)) => {
            out.push(CheckLine::new("Morse RMS relative error, t in [40, 44]", e40, "< 0.1", e40 < 0.1));
            let r = e40 / e80;
            out.push(CheckLine::new("Morse error reduction 40 -> 80", r, "in [1.5, 3]", (1.5..=3.0).contains(&r)));
        }
        (Err(e), _) | (_, Err(e)) => out.push(CheckLine::error("Morse band", e)),
    }
    out
}
