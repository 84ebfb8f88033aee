//! Zones of the self-dual GL(3) chamber and the critical fibers over them.
//!
//! A chamber point is given by its simple-root coordinates `(y1, y2)`; the
//! algebra only ever sees the squares `Y = y²`, which are kept exact when
//! the caller supplies them as rationals.

use num_traits::{Signed, Zero};

use crate::realpoly::{self, rat, rat_approx, rat_from_f64, rat_int, rat_to_f64, Rat, RatPoly};
use crate::sym3::{Jacobi3, Sym3};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ChamberPoint {
    y1: f64,
    y2: f64,
    squares: Option<(Rat, Rat)>,
}

impl ChamberPoint {
    pub fn new(y1: f64, y2: f64) -> Result<Self> {
        if !(y1 > 0.0 && y2 > 0.0 && y1.is_finite() && y2.is_finite()) {
            return Err(Error::InvalidInput(format!("chamber coordinates must be positive, got ({y1}, {y2})")));
        }
        Ok(ChamberPoint { y1, y2, squares: None })
    }

    /// Exact point from `(y1², y2²)`.
    pub fn from_squares(y1sq: Rat, y2sq: Rat) -> Result<Self> {
        if !(y1sq.is_positive() && y2sq.is_positive()) {
            return Err(Error::InvalidInput("squared coordinates must be positive".into()));
        }
        let (y1, y2) = (rat_to_f64(&y1sq).sqrt(), rat_to_f64(&y2sq).sqrt());
        Ok(ChamberPoint { y1, y2, squares: Some((y1sq, y2sq)) })
    }

    pub fn cusp() -> Self {
        Self::from_squares(rat(1, 3), rat(1, 3)).unwrap()
    }

    pub fn y1(&self) -> f64 {
        self.y1
    }

    pub fn y2(&self) -> f64 {
        self.y2
    }

    pub fn is_exact(&self) -> bool {
        self.squares.is_some()
    }

    pub fn exact_squares(&self) -> Option<&(Rat, Rat)> {
        self.squares.as_ref()
    }

    /// Squares as rationals: exact when known, otherwise a short continued
    /// fraction within 1e-16 relative.
    pub fn rational_squares(&self) -> (Rat, Rat) {
        match &self.squares {
            Some(s) => s.clone(),
            None => {
                let (a, b) = (self.y1 * self.y1, self.y2 * self.y2);
                (rat_approx(a, 1e-16 * a), rat_approx(b, 1e-16 * b))
            }
        }
    }

    pub fn squares_f64(&self) -> (f64, f64) {
        match &self.squares {
            Some((a, b)) => (rat_to_f64(a), rat_to_f64(b)),
            None => (self.y1 * self.y1, self.y2 * self.y2),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Zone {
    Shadow,
    Light1,
    Light2,
    Caustic1,
    Caustic2,
    CuspPoint,
}

impl Zone {
    /// Fiber cardinality over this zone.
    pub fn fiber_size(self) -> usize {
        match self {
            Zone::Shadow => 0,
            Zone::Light1 => 6,
            Zone::Light2 => 2,
            Zone::Caustic1 => 1,
            Zone::Caustic2 => 4,
            Zone::CuspPoint => 2,
        }
    }
}

impl std::fmt::Display for Zone {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        std::fmt::Debug::fmt(self, f)
    }
}

/// `Y1 + Y2 − 1` (outer caustic).
pub fn defect1_exact(y1sq: &Rat, y2sq: &Rat) -> Rat {
    y1sq + y2sq - rat_int(1)
}

/// `27Y1²Y2² − 18Y1Y2 + 4Y1 + 4Y2 − 1` (inner caustic).
pub fn defect2_exact(y1sq: &Rat, y2sq: &Rat) -> Rat {
    let p = y1sq * y2sq;
    rat_int(27) * &p * &p - rat_int(18) * &p + rat_int(4) * (y1sq + y2sq) - rat_int(1)
}

pub fn defect1_f64(a: f64, b: f64) -> f64 {
    a + b - 1.0
}

pub fn defect2_f64(a: f64, b: f64) -> f64 {
    let p = a * b;
    27.0 * p * p - 18.0 * p + 4.0 * (a + b) - 1.0
}

/// Both caustic defects at `p` (as floats).
pub fn defects(p: &ChamberPoint) -> (f64, f64) {
    match p.exact_squares() {
        Some((a, b)) => (rat_to_f64(&defect1_exact(a, b)), rat_to_f64(&defect2_exact(a, b))),
        None => {
            let (a, b) = p.squares_f64();
            (defect1_f64(a, b), defect2_f64(a, b))
        }
    }
}

pub fn zone(p: &ChamberPoint, tol: f64) -> Zone {
    // signs from exact arithmetic whenever available
    let (s1, s2, m1, m2) = match p.exact_squares() {
        Some((a, b)) => {
            let (d1, d2) = (defect1_exact(a, b), defect2_exact(a, b));
            (sgn(&d1), sgn(&d2), rat_to_f64(&d1).abs(), rat_to_f64(&d2).abs())
        }
        None => {
            let (a, b) = p.squares_f64();
            let (d1, d2) = (defect1_f64(a, b), defect2_f64(a, b));
            (d1.signum() as i32, d2.signum() as i32, d1.abs(), d2.abs())
        }
    };
    let cusp = match p.exact_squares() {
        Some((a, b)) if tol == 0.0 => *a == rat(1, 3) && *b == rat(1, 3),
        _ => {
            let c = 1.0 / 3f64.sqrt();
            (p.y1 - c).abs() <= tol && (p.y2 - c).abs() <= tol
        }
    };
    if cusp {
        Zone::CuspPoint
    } else if s1 == 0 || m1 <= tol {
        Zone::Caustic1
    } else if s1 > 0 {
        Zone::Shadow
    } else if s2 == 0 || m2 <= tol {
        Zone::Caustic2
    } else if s2 < 0 {
        Zone::Light1
    } else {
        Zone::Light2
    }
}

fn sgn(r: &Rat) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

fn poly(c: &[i64]) -> RatPoly {
    RatPoly::from_ints(c)
}

fn require_inside(p: &ChamberPoint) -> Result<(Rat, Rat)> {
    let (a, b) = p.rational_squares();
    if defect1_exact(&a, &b).is_negative() {
        Ok((a, b))
    } else {
        Err(Error::OutsideLightZone)
    }
}

fn e_form(a: &Rat, b: &Rat) -> RatPoly {
    let q1 = poly(&[1, 4, 1]).pow(3).scale(a);
    let q2 = poly(&[-2, -2, 1]).pow(3).scale(b);
    q1 + q2 + poly(&[2, 6, -15, -40, -15, 6, 2])
}

fn d_form(a: &Rat, b: &Rat) -> RatPoly {
    let q1 = (poly(&[1, 0, -1]) * poly(&[1, 4, 1]).pow(2)).scale(a);
    let q2 = (poly(&[0, 2, 1]) * poly(&[-2, -2, 1]).pow(2)).scale(b);
    q1 + q2 + poly(&[0, -6, -15, 0, 15, 6])
}

/// The determinant condition restricted to the trace ellipse, in the
/// rational parameter `t`.
pub fn build_e(p: &ChamberPoint) -> Result<RatPoly> {
    let (a, b) = require_inside(p)?;
    Ok(e_form(&a, &b))
}

/// The transversality condition on the trace ellipse, in `t`.
pub fn build_d(p: &ChamberPoint) -> Result<RatPoly> {
    let (a, b) = require_inside(p)?;
    Ok(d_form(&a, &b))
}

/// Trace condition in the diagonal coordinates (a conic).
pub fn c_x(p: &ChamberPoint, x1: f64, x2: f64) -> f64 {
    let (a, b) = p.squares_f64();
    x1 * x1 + x1 * x2 + x2 * x2 - 3.0 * (1.0 - a - b)
}

/// Determinant condition in the diagonal coordinates (a cubic).
pub fn e_x(p: &ChamberPoint, x1: f64, x2: f64) -> f64 {
    let (a, b) = p.squares_f64();
    2.0 * x1.powi(3) + 3.0 * x1 * x1 * x2 + 9.0 * x1 * a + 18.0 * x2 * a
        - 2.0 * x2.powi(3)
        - 3.0 * x1 * x2 * x2
        - 9.0 * x2 * b
        - 18.0 * x1 * b
}

/// Transversality condition in the diagonal coordinates.
pub fn d_x(p: &ChamberPoint, x1: f64, x2: f64) -> f64 {
    let (a, b) = p.squares_f64();
    x1 * a + x2 * b - x1 * x1 * x2 - x1 * x2 * x2
}

/// `Res(E, D)` with both taken with formal degree 6.
pub fn resultant_ed(p: &ChamberPoint) -> Result<Rat> {
    let (a, b) = require_inside(p)?;
    realpoly::resultant_with_degrees(&e_form(&a, &b), &d_form(&a, &b), 6, 6)
}

/// `(Y1+Y2−1)⁴·(inner defect)²`.
pub fn resultant_shape(y1sq: &Rat, y2sq: &Rat) -> Rat {
    let d1 = defect1_exact(y1sq, y2sq);
    let d2 = defect2_exact(y1sq, y2sq);
    num_traits::pow(d1, 4) * &d2 * &d2
}

/// Third subdiscriminant of `E` (PSPC₃(E, E′)/lc(E)).
pub fn pspc3_e(p: &ChamberPoint) -> Result<Rat> {
    let (a, b) = require_inside(p)?;
    realpoly::subdiscriminant(&e_form(&a, &b), 3)
}

/// The closed-form polynomial in `(Y1, Y2)` that the third subdiscriminant
/// of `E` is proportional to.
pub fn pspc3_shape(a: &Rat, b: &Rat) -> Rat {
    let i = |n: i64| rat_int(n);
    let (a2, b2) = (a * a, b * b);
    let (a3, b3) = (&a2 * a, &b2 * b);
    i(80) * (a + b) - i(50) * (&a2 + &b2) + i(7) * (&a3 + &b3) - i(51) * (&a2 * b + a * &b2)
        + i(57) * (&a3 * b + a * &b3)
        + i(249) * &a2 * &b2
        - i(166) * a * b
        - i(25)
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum TParam {
    Finite(f64),
    Infinity,
    /// The trace ellipse has collapsed to a point.
    C1Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Degeneracy {
    NonDegenerate,
    FoldA2,
    CuspA3,
}

impl Degeneracy {
    pub fn from_multiplicity(m: usize) -> Self {
        match m {
            1 => Degeneracy::NonDegenerate,
            2 => Degeneracy::FoldA2,
            _ => Degeneracy::CuspA3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FiberPoint {
    pub jacobi: Jacobi3,
    pub t_param: TParam,
    pub multiplicity: usize,
    pub degeneracy: Degeneracy,
}

impl FiberPoint {
    pub fn sym(&self) -> Sym3 {
        self.jacobi.to_sym()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fiber {
    pub points: Vec<FiberPoint>,
    pub zone: Zone,
    /// The chamber point the fiber was computed over. Differs from the input
    /// only when a float point was snapped onto a caustic.
    pub base: ChamberPoint,
}

/// Point on the trace ellipse with parameter `t` (radius `r = √(3(1−Y1−Y2))`).
fn ellipse_point(t: f64, r: f64) -> (f64, f64) {
    let den = 1.0 + t + t * t;
    ((1.0 - t * t) / den * r, t * (t + 2.0) / den * r)
}

fn e_f64(a: f64, b: f64, t: f64) -> (f64, f64) {
    let p1 = t * t + 4.0 * t + 1.0;
    let p2 = t * t - 2.0 * t - 2.0;
    let base = [2.0, 6.0, -15.0, -40.0, -15.0, 6.0, 2.0];
    let (mut v, mut dv) = (0.0, 0.0);
    for &c in base.iter().rev() {
        dv = dv * t + v;
        v = v * t + c;
    }
    let val = a * p1.powi(3) + b * p2.powi(3) + v;
    let der = 3.0 * a * p1 * p1 * (2.0 * t + 4.0) + 3.0 * b * p2 * p2 * (2.0 * t - 2.0) + dv;
    (val, der)
}

/// Real roots of E for float squares from companion eigenvalues. Accepted only
/// when the count matches the zone and every root is well separated from the
/// rest of the spectrum; otherwise the caller runs exact isolation.
fn float_roots(a: f64, b: f64, expect: usize) -> Option<Vec<realpoly::RealRoot>> {
    const Q1: [f64; 7] = [1.0, 12.0, 51.0, 88.0, 51.0, 12.0, 1.0];
    const Q2: [f64; 7] = [-8.0, -24.0, -12.0, 16.0, 6.0, -6.0, 1.0];
    const BASE: [f64; 7] = [2.0, 6.0, -15.0, -40.0, -15.0, 6.0, 2.0];
    if expect == 0 {
        return None;
    }
    let c: Vec<f64> = (0..7).map(|i| a * Q1[i] + b * Q2[i] + BASE[i]).collect();
    let lead = c[6];
    if !(lead.abs() > 0.0) {
        return None;
    }
    let comp = nalgebra::DMatrix::from_fn(6, 6, |i, j| {
        if j == 5 {
            -c[i] / lead
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    let eig = comp.complex_eigenvalues();
    let scale = |z: f64| 1.0 + z.abs();
    let mut real = Vec::new();
    for z in eig.iter() {
        let im = z.im.abs() / scale(z.re);
        if im < 1e-6 {
            real.push(z.re);
        } else if im < 1e-3 {
            return None;
        }
    }
    if real.len() != expect {
        return None;
    }
    for t in real.iter_mut() {
        for _ in 0..4 {
            let (v, dv) = e_f64(a, b, *t);
            if dv == 0.0 {
                return None;
            }
            *t -= v / dv;
        }
    }
    real.sort_by(f64::total_cmp);
    if real.windows(2).any(|w| w[1] - w[0] < 1e-3 * scale(w[0])) {
        return None;
    }
    Some(
        real.into_iter()
            .map(|value| {
                let w = 1e-9 * scale(value);
                let iv = (realpoly::rat_from_f64(value - w), realpoly::rat_from_f64(value + w));
                realpoly::RealRoot { value, isolating_interval: iv, multiplicity: 1 }
            })
            .collect(),
    )
}

/// Fiber over `p`. Exact points are used as given; a float point is only
/// moved when its defects vanish in floating point (see `fiber_with_tol`).
pub fn fiber(p: &ChamberPoint) -> Fiber {
    fiber_with_tol(p, 0.0)
}

/// Fiber over `p`, classifying with curve tolerance `tol`. A float point
/// classified onto a caustic is moved to an exact rational point on that
/// caustic first, so the degenerate multiplicities are visible.
pub fn fiber_with_tol(p: &ChamberPoint, tol: f64) -> Fiber {
    let z = zone(p, tol);
    let degenerate = matches!(z, Zone::CuspPoint | Zone::Caustic1 | Zone::Caustic2);
    if p.is_exact() || !degenerate {
        return fiber_at(p, z);
    }
    let snapped = match z {
        Zone::CuspPoint => Some(ChamberPoint::cusp()),
        Zone::Caustic1 => snap_c1(p),
        Zone::Caustic2 => snap_c2(p),
        _ => None,
    };
    match snapped {
        Some(q) => fiber_at(&q, z),
        None => fiber_at(p, zone(p, 0.0)),
    }
}

fn snap_c1(p: &ChamberPoint) -> Option<ChamberPoint> {
    let (a, _) = p.squares_f64();
    if !(0.0..1.0).contains(&a) {
        return None;
    }
    let a = rat_approx(a, 1e-12);
    let b = rat_int(1) - &a;
    ChamberPoint::from_squares(a, b).ok()
}

/// Rational point on the inner caustic near `p`: `Y1 = (1 − r²)/3` with
/// rational `r`, `Y2` from the quadratic whose discriminant is `16r⁶`.
fn snap_c2(p: &ChamberPoint) -> Option<ChamberPoint> {
    let (a, b) = p.squares_f64();
    let mut best: Option<(f64, ChamberPoint)> = None;
    for swap in [false, true] {
        let (u, v) = if swap { (b, a) } else { (a, b) };
        if !(u > 0.0 && u < 1.0 / 3.0) {
            continue;
        }
        let r = rat_approx((1.0 - 3.0 * u).sqrt(), 1e-12);
        let u_r = (rat_int(1) - &r * &r) / rat_int(3);
        let lin = rat_int(18) * &u_r - rat_int(4);
        let den = rat_int(54) * &u_r * &u_r;
        let r3 = rat_int(4) * &r * &r * &r;
        for v_r in [(&lin + &r3) / &den, (&lin - &r3) / &den] {
            if !v_r.is_positive() {
                continue;
            }
            let dist = (rat_to_f64(&v_r) - v).abs() + (rat_to_f64(&u_r) - u).abs();
            let q = if swap {
                ChamberPoint::from_squares(v_r.clone(), u_r.clone())
            } else {
                ChamberPoint::from_squares(u_r.clone(), v_r.clone())
            };
            if let Ok(q) = q {
                if best.as_ref().map_or(true, |(d, _)| dist < *d) {
                    best = Some((dist, q));
                }
            }
        }
    }
    best.map(|(_, q)| q)
}

fn fiber_at(p: &ChamberPoint, zone: Zone) -> Fiber {
    let mut points = Vec::new();
    let (a, b) = p.rational_squares();
    let d1 = defect1_exact(&a, &b);
    let (y1, y2) = (p.y1, p.y2);
    if d1.is_zero() {
        points.push(FiberPoint {
            jacobi: Jacobi3 { x1: 0.0, x2: 0.0, y1, y2 },
            t_param: TParam::C1Degenerate,
            multiplicity: 2,
            degeneracy: Degeneracy::FoldA2,
        });
    } else if d1.is_negative() {
        let e = e_form(&a, &b);
        let (af, bf) = p.squares_f64();
        let r = (3.0 * (1.0 - af - bf)).sqrt();
        let roots = (!p.is_exact())
            .then(|| float_roots(af, bf, zone.fiber_size()))
            .flatten()
            .map_or_else(|| realpoly::real_roots(&e).expect("E is never the zero polynomial"), |r| r);
        for root in roots {
            let mut t = root.value;
            if !p.is_exact() && root.multiplicity == 1 {
                // polish against the unrounded squares
                for _ in 0..3 {
                    let (v, dv) = e_f64(af, bf, t);
                    if dv == 0.0 {
                        break;
                    }
                    let step = v / dv;
                    t -= step;
                    if step.abs() <= 1e-16 * t.abs().max(1.0) {
                        break;
                    }
                }
            }
            let (x1, x2) = ellipse_point(t, r);
            points.push(FiberPoint {
                jacobi: Jacobi3 { x1, x2, y1, y2 },
                t_param: TParam::Finite(t),
                multiplicity: root.multiplicity,
                degeneracy: Degeneracy::from_multiplicity(root.multiplicity),
            });
        }
        // roots at t = ∞ (never occur: the leading coefficient is Y1+Y2+2)
        let lost = 6 - e.degree().unwrap_or(0);
        if lost > 0 {
            points.push(FiberPoint {
                jacobi: Jacobi3 { x1: -r, x2: r, y1, y2 },
                t_param: TParam::Infinity,
                multiplicity: lost,
                degeneracy: Degeneracy::from_multiplicity(lost),
            });
        }
    }
    Fiber { points, zone, base: p.clone() }
}

/// `x ↦ −x` on the fiber, `t ↦ (t+2)/(−2t−1)` on the parameter.
pub fn involution(fp: &FiberPoint) -> Result<FiberPoint> {
    let t_param = match fp.t_param {
        TParam::C1Degenerate => return Err(Error::FixedPoint),
        TParam::Infinity => TParam::Finite(-0.5),
        TParam::Finite(t) if t == -0.5 => TParam::Infinity,
        TParam::Finite(t) => TParam::Finite(sigma(t)),
    };
    if fp.jacobi.x1 == 0.0 && fp.jacobi.x2 == 0.0 {
        return Err(Error::FixedPoint);
    }
    let mut out = *fp;
    out.jacobi.x1 = -fp.jacobi.x1;
    out.jacobi.x2 = -fp.jacobi.x2;
    out.t_param = t_param;
    Ok(out)
}

pub fn sigma(t: f64) -> f64 {
    (t + 2.0) / (-2.0 * t - 1.0)
}

/// Chamber coordinates of a Jacobi matrix together with exact squares when
/// the caller wants an exact fiber.
pub fn chamber_of(s: &Sym3) -> Result<ChamberPoint> {
    ChamberPoint::new(s.s12, s.s23)
}

/// Exact squares of a float, for callers building exact points from decimals.
pub fn exact_square(y: f64) -> Rat {
    let r = rat_from_f64(y);
    &r * &r
}
