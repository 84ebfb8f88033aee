//! 3×3 symmetric matrices, Iwasawa decomposition and Jacobi coordinates.

use nalgebra::{Matrix3, Vector3};

use crate::{Error, Result};

/// Real symmetric 3×3 matrix stored by its upper triangle.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Sym3 {
    pub s11: f64,
    pub s22: f64,
    pub s33: f64,
    pub s12: f64,
    pub s13: f64,
    pub s23: f64,
}

impl Sym3 {
    pub fn diag(a: f64, b: f64, c: f64) -> Self {
        Sym3 { s11: a, s22: b, s33: c, s12: 0.0, s13: 0.0, s23: 0.0 }
    }

    pub fn zero() -> Self {
        Self::diag(0.0, 0.0, 0.0)
    }

    /// Symmetric part of `m`.
    pub fn from_matrix(m: &Matrix3<f64>) -> Self {
        Sym3 {
            s11: m[(0, 0)],
            s22: m[(1, 1)],
            s33: m[(2, 2)],
            s12: 0.5 * (m[(0, 1)] + m[(1, 0)]),
            s13: 0.5 * (m[(0, 2)] + m[(2, 0)]),
            s23: 0.5 * (m[(1, 2)] + m[(2, 1)]),
        }
    }

    pub fn to_matrix(&self) -> Matrix3<f64> {
        Matrix3::new(
            self.s11, self.s12, self.s13, //
            self.s12, self.s22, self.s23, //
            self.s13, self.s23, self.s33,
        )
    }

    pub fn trace(&self) -> f64 {
        self.s11 + self.s22 + self.s33
    }

    pub fn det(&self) -> f64 {
        self.to_matrix().determinant()
    }

    /// Coefficients `[c0, c1, c2]` of the monic cubic `x³ + c2 x² + c1 x + c0`.
    pub fn char_poly(&self) -> [f64; 3] {
        let Sym3 { s11, s22, s33, s12, s13, s23 } = *self;
        let minors = s11 * s22 - s12 * s12 + s11 * s33 - s13 * s13 + s22 * s33 - s23 * s23;
        [-self.det(), minors, -self.trace()]
    }

    /// Eigenvalues in descending order.
    pub fn spectrum(&self) -> [f64; 3] {
        let e = self.to_matrix().symmetric_eigen();
        let mut v = [e.eigenvalues[0], e.eigenvalues[1], e.eigenvalues[2]];
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }

    pub fn frob_dist(&self, other: &Sym3) -> f64 {
        (self.to_matrix() - other.to_matrix()).norm()
    }
}

/// Tridiagonal traceless symmetric matrix in the coordinates
/// `diag = ((2x₁+x₂)/3, (x₂−x₁)/3, −(x₁+2x₂)/3)`, off-diagonals `y₁, y₂`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Jacobi3 {
    pub x1: f64,
    pub x2: f64,
    pub y1: f64,
    pub y2: f64,
}

impl Jacobi3 {
    pub fn to_sym(&self) -> Sym3 {
        let Jacobi3 { x1, x2, y1, y2 } = *self;
        Sym3 {
            s11: (2.0 * x1 + x2) / 3.0,
            s22: (x2 - x1) / 3.0,
            s33: -(x1 + 2.0 * x2) / 3.0,
            s12: y1,
            s13: 0.0,
            s23: y2,
        }
    }

    /// Inverse of [`Jacobi3::to_sym`]; the corner entry must vanish to `tol`
    /// and the off-diagonals must be positive. Trace is projected away.
    pub fn from_sym(s: &Sym3, tol: f64) -> Result<Self> {
        if s.s13.abs() > tol {
            return Err(Error::InvalidInput(format!("not tridiagonal (s13 = {:e})", s.s13)));
        }
        if s.s12 <= 0.0 || s.s23 <= 0.0 {
            return Err(Error::InvalidInput("off-diagonal entries must be positive".into()));
        }
        Ok(Jacobi3 { x1: s.s11 - s.s22, x2: s.s22 - s.s33, y1: s.s12, y2: s.s23 })
    }
}

/// `g = u·a·k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IwasawaParts {
    pub u: Matrix3<f64>,
    pub a: Vector3<f64>,
    pub k: Matrix3<f64>,
}

impl IwasawaParts {
    /// a-part modulo the center, scaled so that a₃₃ = 1.
    pub fn a_projective(&self) -> Vector3<f64> {
        self.a / self.a[2]
    }

    /// Iwasawa projection: `log a`.
    pub fn h(&self) -> Vector3<f64> {
        self.a.map(f64::ln)
    }
}

/// `diag(1, 0, −1)`.
pub fn h_matrix() -> Sym3 {
    Sym3::diag(1.0, 0.0, -1.0)
}

/// Fixed long Weyl representative in SO(3).
pub fn long_weyl() -> Matrix3<f64> {
    Matrix3::new(0.0, 0.0, 1.0, 0.0, -1.0, 0.0, 1.0, 0.0, 0.0)
}

pub fn unipotent(u12: f64, u13: f64, u23: f64) -> Matrix3<f64> {
    Matrix3::new(1.0, u12, u13, 0.0, 1.0, u23, 0.0, 0.0, 1.0)
}

/// Reverse Cholesky `m = u·d·uᵀ` of a symmetric positive definite matrix,
/// with `u` unit upper triangular. Returns `(u, d)`.
pub fn reverse_cholesky(m: &Matrix3<f64>) -> Result<(Matrix3<f64>, Vector3<f64>)> {
    let d3 = m[(2, 2)];
    if !(d3 > 0.0) {
        return Err(Error::Singular);
    }
    let u13 = m[(0, 2)] / d3;
    let u23 = m[(1, 2)] / d3;
    let m11 = m[(0, 0)] - u13 * u13 * d3;
    let m12 = m[(0, 1)] - u13 * u23 * d3;
    let d2 = m[(1, 1)] - u23 * u23 * d3;
    if !(d2 > 0.0) {
        return Err(Error::Singular);
    }
    let u12 = m12 / d2;
    let d1 = m11 - u12 * u12 * d2;
    if !(d1 > 0.0) {
        return Err(Error::Singular);
    }
    Ok((unipotent(u12, u13, u23), Vector3::new(d1, d2, d3)))
}

pub fn iwasawa(g: &Matrix3<f64>) -> Result<IwasawaParts> {
    let det = g.determinant();
    if det == 0.0 || !det.is_finite() {
        return Err(Error::Singular);
    }
    let (u, d) = reverse_cholesky(&(g * g.transpose()))?;
    let a = d.map(f64::sqrt);
    let uinv = unipotent(-u[(0, 1)], u[(0, 1)] * u[(1, 2)] - u[(0, 2)], -u[(1, 2)]);
    let ainv = Matrix3::from_diagonal(&a.map(|x| 1.0 / x));
    let k = ainv * uinv * g;
    Ok(IwasawaParts { u, a, k })
}

/// `e^{⟨ρ,H(g)⟩} = a₁₁/a₃₃`.
pub fn delta_half(g: &Matrix3<f64>) -> Result<f64> {
    let p = iwasawa(g)?;
    Ok(p.a[0] / p.a[2])
}

pub fn orthogonality_defect(k: &Matrix3<f64>) -> f64 {
    (k * k.transpose() - Matrix3::identity()).norm()
}

/// `k·s·kᵀ`.
pub fn ad_k(k: &Matrix3<f64>, s: &Sym3) -> Result<Sym3> {
    let dev = orthogonality_defect(k);
    if dev > 1e-10 {
        return Err(Error::NotOrthogonal(dev));
    }
    Ok(Sym3::from_matrix(&(k * s.to_matrix() * k.transpose())))
}
