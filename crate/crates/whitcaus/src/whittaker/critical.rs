//! Critical points of the scaled phase and the invariants of its Hessian.

use nalgebra::{Matrix2, Matrix3, SymmetricEigen, Vector3};
use rayon::prelude::*;

use super::{delta_half_wu, grad_phase, hessian_phase, moment_image, phase, SpectralParam, UnipotentPoint};
use crate::caustics::{fiber, ChamberPoint, Degeneracy};
use crate::sym3::{long_weyl, Sym3};
use crate::{Error, Result};

pub const GRAD_TOL: f64 = 1e-9;
pub const CORANK_TOL: f64 = 1e-6;
const NEWTON_ITERS: usize = 80;
const CUBIC_STEP: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CriticalPoint {
    pub u: UnipotentPoint,
    /// Rows of the Hessian in `(u12, u13, u23)` coordinates.
    pub hessian: [[f64; 3]; 3],
    pub corank: usize,
    /// Number of positive minus negative Hessian eigenvalues off the kernel.
    pub signature_transverse: i32,
    pub degeneracy: Degeneracy,
    pub phase: f64,
    pub delta_half: f64,
    pub grad_norm: f64,
}

impl CriticalPoint {
    pub fn hessian_matrix(&self) -> Matrix3<f64> {
        Matrix3::from_fn(|i, j| self.hessian[i][j])
    }

    /// Hessian eigenvalues in ascending order of modulus, with eigenvectors.
    pub fn eigen(&self) -> (Vector3<f64>, Matrix3<f64>) {
        sorted_eigen(&self.hessian_matrix())
    }

    /// Product of the nonzero Hessian eigenvalues.
    pub fn transverse_det(&self) -> f64 {
        let (ev, _) = self.eigen();
        ev.iter().skip(self.corank).product()
    }

    /// Unit kernel vector of a corank-one Hessian.
    pub fn kernel(&self) -> Option<Vector3<f64>> {
        (self.corank == 1).then(|| self.eigen().1.column(0).into_owned())
    }
}

fn sorted_eigen(h: &Matrix3<f64>) -> (Vector3<f64>, Matrix3<f64>) {
    let e = SymmetricEigen::new(*h);
    let mut idx = [0usize, 1, 2];
    idx.sort_by(|&a, &b| e.eigenvalues[a].abs().total_cmp(&e.eigenvalues[b].abs()));
    let vals = Vector3::from_fn(|i, _| e.eigenvalues[idx[i]]);
    let vecs = Matrix3::from_fn(|r, c| e.eigenvectors[(r, idx[c])]);
    (vals, vecs)
}

/// Classifies a located critical point.
pub fn analyze(u: &UnipotentPoint, y1: f64, y2: f64, nu: &SpectralParam) -> CriticalPoint {
    let h = hessian_phase(u, y1, y2, nu);
    let (ev, vecs) = sorted_eigen(&h);
    let scale = ev[2].abs();
    let corank = ev.iter().filter(|v| v.abs() <= CORANK_TOL * scale).count();
    let signature_transverse = ev.iter().skip(corank).map(|v| v.signum() as i32).sum();
    let degeneracy = match corank {
        0 => Degeneracy::NonDegenerate,
        _ => {
            // third derivative along the kernel decides fold against cusp
            let n = vecs.column(0).into_owned();
            let v = u.to_vector();
            let g = |s: f64| grad_phase(&UnipotentPoint::from_vector(&(v + n * s)), y1, y2, nu).dot(&n);
            let d3 = (g(CUBIC_STEP) - 2.0 * g(0.0) + g(-CUBIC_STEP)) / (CUBIC_STEP * CUBIC_STEP);
            if d3.abs() <= 1e-4 * scale.max(1.0) {
                Degeneracy::CuspA3
            } else {
                Degeneracy::FoldA2
            }
        }
    };
    CriticalPoint {
        u: *u,
        hessian: [0, 1, 2].map(|i| [0, 1, 2].map(|j| h[(i, j)])),
        corank,
        signature_transverse,
        degeneracy,
        phase: phase(u, y1, y2, nu),
        delta_half: delta_half_wu(u),
        grad_norm: grad_phase(u, y1, y2, nu).norm(),
    }
}

/// Damped Newton iteration on the gradient; singular directions are
/// handled by a truncated eigen-solve. Returns the best point and its
/// gradient norm.
pub fn newton(start: &UnipotentPoint, y1: f64, y2: f64, nu: &SpectralParam) -> (UnipotentPoint, f64) {
    let mut v = start.to_vector();
    let gnorm = |v: &Vector3<f64>| grad_phase(&UnipotentPoint::from_vector(v), y1, y2, nu).norm();
    let mut g = grad_phase(start, y1, y2, nu);
    let mut best = (v, g.norm());
    for _ in 0..NEWTON_ITERS {
        if best.1 <= 1e-3 * GRAD_TOL {
            break;
        }
        let h = hessian_phase(&UnipotentPoint::from_vector(&v), y1, y2, nu);
        let e = SymmetricEigen::new(h);
        let top = e.eigenvalues.amax();
        if !(top > 0.0) || !top.is_finite() {
            break;
        }
        let mut step = Vector3::zeros();
        for i in 0..3 {
            let lam = e.eigenvalues[i];
            if lam.abs() > 1e-12 * top {
                let q = e.eigenvectors.column(i);
                step -= q * (q.dot(&g) / lam);
            }
        }
        let cap = 1.0 + 0.5 * v.norm();
        if step.norm() > cap {
            step *= cap / step.norm();
        }
        let mut t = 1.0;
        let mut next = v + step;
        while gnorm(&next) > g.norm() && t > 1.0 / 64.0 {
            t *= 0.5;
            next = v + step * t;
        }
        v = next;
        g = grad_phase(&UnipotentPoint::from_vector(&v), y1, y2, nu);
        if !g.norm().is_finite() {
            break;
        }
        if g.norm() < best.1 {
            best = (v, g.norm());
        } else if t <= 1.0 / 64.0 {
            break;
        }
    }
    (UnipotentPoint::from_vector(&best.0), best.1)
}

/// Newton from every node of a `per_axis³` grid on the box of radius
/// `max(4, 2/min(y))`; converged points are merged.
pub fn critical_points_multistart(y1: f64, y2: f64, nu: &SpectralParam, per_axis: usize) -> Vec<UnipotentPoint> {
    let r = (2.0 / y1.min(y2)).max(4.0);
    let node = |i: usize| -r + 2.0 * r * i as f64 / (per_axis.max(2) - 1) as f64;
    let starts: Vec<UnipotentPoint> = (0..per_axis.pow(3))
        .map(|m| UnipotentPoint::new(node(m % per_axis), node((m / per_axis) % per_axis), node(m / per_axis / per_axis)))
        .collect();
    let found: Vec<UnipotentPoint> = starts
        .par_iter()
        .filter_map(|s| {
            let (u, g) = newton(s, y1, y2, nu);
            (g <= GRAD_TOL).then_some(u)
        })
        .collect();
    let mut out: Vec<UnipotentPoint> = Vec::new();
    for u in found {
        if !out.iter().any(|o| o.dist(&u) <= 1e-5 * (1.0 + u.norm())) {
            out.push(u);
        }
    }
    out
}

/// Lower-upper factorization without pivoting.
fn lu(m: &Matrix3<f64>) -> Result<(Matrix3<f64>, Matrix3<f64>)> {
    let mut l = Matrix3::identity();
    let mut u = Matrix3::zeros();
    for i in 0..3 {
        for j in i..3 {
            u[(i, j)] = m[(i, j)] - (0..i).map(|k| l[(i, k)] * u[(k, j)]).sum::<f64>();
        }
        if u[(i, i)].abs() < 1e-12 {
            return Err(Error::Singular);
        }
        for r in i + 1..3 {
            l[(r, i)] = (m[(r, i)] - (0..i).map(|k| l[(r, k)] * u[(k, i)]).sum::<f64>()) / u[(i, i)];
        }
    }
    Ok((l, u))
}

/// The unipotent element whose moment image is `s` (spectrum `(1, 0, −1)`).
/// With `k` the eigenbasis of `s`, `w·kᵀ = L·b` (lower unipotent times
/// upper) gives `u = w·L⁻¹·w`; row signs of `k` do not affect `L`.
pub fn unipotent_from_moment(s: &Sym3) -> Result<UnipotentPoint> {
    let e = SymmetricEigen::new(s.to_matrix());
    let mut idx = [0usize, 1, 2];
    idx.sort_by(|&a, &b| e.eigenvalues[b].total_cmp(&e.eigenvalues[a]));
    let kt = Matrix3::from_fn(|r, c| e.eigenvectors[(r, idx[c])]);
    let w = long_weyl();
    let (l, _) = lu(&(w * kt))?;
    let linv = l.try_inverse().ok_or(Error::Singular)?;
    Ok(UnipotentPoint::from_matrix(&(w * linv * w)))
}

fn match_tol(u: &UnipotentPoint, degenerate: bool) -> f64 {
    (if degenerate { 1e-3 } else { 1e-5 }) * (1.0 + u.norm())
}

/// All critical points over `p` for the self-dual parameter. Seeds come from
/// the fiber over `p`, the multistart grid is merged in, and the combined
/// count must equal the fiber size (the grid is densified twice before
/// giving up).
pub fn critical_points(p: &ChamberPoint, nu: &SpectralParam) -> Result<Vec<CriticalPoint>> {
    if !nu.is_self_dual() {
        return Err(Error::InvalidInput("critical set is tied to the fiber only for the self-dual ray".into()));
    }
    let (y1, y2) = (p.y1(), p.y2());
    let fib = fiber(p);
    let expected = fib.points.len();
    let mut seeds: Vec<(UnipotentPoint, bool)> = Vec::new();
    for fp in &fib.points {
        let s = unipotent_from_moment(&fp.sym())?;
        let (u, g) = newton(&s, y1, y2, nu);
        if g <= GRAD_TOL {
            seeds.push((u, fp.multiplicity > 1));
        }
    }
    let mut per_axis = 7;
    for _ in 0..3 {
        let mut all = seeds.clone();
        for u in critical_points_multistart(y1, y2, nu, per_axis) {
            if !all.iter().any(|(o, deg)| o.dist(&u) <= match_tol(o, *deg)) {
                all.push((u, false));
            }
        }
        if all.len() == expected {
            let mut pts: Vec<CriticalPoint> = all.iter().map(|(u, _)| analyze(u, y1, y2, nu)).collect();
            pts.sort_by(|a, b| a.u.u13.total_cmp(&b.u.u13));
            return Ok(pts);
        }
        if all.len() > expected {
            return Err(Error::IncompleteCriticalSet { found: all.len(), expected });
        }
        per_axis = 2 * per_axis - 1;
    }
    Err(Error::IncompleteCriticalSet { found: seeds.len(), expected })
}

/// Hessian restricted to the span of the columns of `basis`, as a Gram
/// matrix `Bᵀ·H·B`.
pub fn restricted_hessian(h: &Matrix3<f64>, basis: &[Vector3<f64>; 2]) -> Matrix2<f64> {
    Matrix2::from_fn(|i, j| basis[i].dot(&(h * basis[j])))
}

/// Moment image of a critical point: must be the tridiagonal matrix of the
/// corresponding fiber point.
pub fn critical_moment(cp: &CriticalPoint, nu: &SpectralParam) -> Sym3 {
    moment_image(&cp.u, nu)
}
