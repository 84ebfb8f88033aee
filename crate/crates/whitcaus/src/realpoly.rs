//! Exact univariate polynomials over the rationals.
//!
//! Root counting uses Sturm chains on the squarefree part, root isolation
//! bisects with exact Sturm counts, and resultants come from the signed
//! subresultant remainder sequence.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Exact binary value of a finite double.
pub fn rat_from_f64(x: f64) -> Rat {
    Rat::from_float(x).expect("finite float")
}

/// Continued-fraction convergent of `x` within `tol` (smallest denominators
/// first), falling back to the exact binary value.
pub fn rat_approx(x: f64, tol: f64) -> Rat {
    let exact = rat_from_f64(x);
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let mut rem = exact.clone();
    for _ in 0..64 {
        let a = rem.floor().to_integer();
        let h = &a * &h1 + &h0;
        let k = &a * &k1 + &k0;
        let c = Rat::new(h.clone(), k.clone());
        if rat_to_f64(&(&c - &exact)).abs() <= tol {
            return c;
        }
        let frac = &rem - Rat::from_integer(a);
        if frac.is_zero() {
            return c;
        }
        rem = frac.recip();
        (h0, h1, k0, k1) = (h1, h, k1, k);
    }
    exact
}

/// Parses "p/q", an integer, or a decimal literal such as "0.257".
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::InvalidInput(format!("not a rational number: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rat::new(n, d));
    }
    if let Some((ip, fp)) = s.split_once('.') {
        let neg = ip.starts_with('-');
        let digits = format!("{}{}", ip.trim_start_matches(['-', '+']), fp);
        if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let n: BigInt = digits.parse().map_err(|_| bad())?;
        let d = num_traits::pow(BigInt::from(10), fp.len());
        let r = Rat::new(n, d);
        return Ok(if neg { -r } else { r });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rat::from_integer(n))
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // numerator/denominator too large for a direct conversion
        let n = r.numer().bits() as i64;
        let d = r.denom().bits() as i64;
        let shift = (n - d - 60).max(0) as usize;
        let scaled = r / Rat::from_integer(BigInt::one() << shift);
        scaled.to_f64().unwrap_or(f64::NAN) * 2f64.powi(shift as i32)
    })
}

fn sign(r: &Rat) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

/// Endpoint of a counting interval.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Bound {
    NegInf,
    At(Rat),
    PosInf,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatPoly {
    coeffs: Vec<Rat>,
}

/// An isolated real root with its multiplicity.
#[derive(Clone, Debug, PartialEq)]
pub struct RealRoot {
    pub value: f64,
    /// The root lies in the half-open interval (lo, hi].
    pub isolating_interval: (Rat, Rat),
    pub multiplicity: usize,
}

impl RatPoly {
    /// Builds from ascending coefficients; trailing zeros are dropped.
    pub fn new(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        RatPoly { coeffs }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&v| rat_int(v)).collect())
    }

    pub fn zero() -> Self {
        RatPoly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        Self::constant(Rat::one())
    }

    pub fn x() -> Self {
        Self::from_ints(&[0, 1])
    }

    pub fn constant(c: Rat) -> Self {
        Self::new(vec![c])
    }

    /// (x - r)
    pub fn linear_root(r: Rat) -> Self {
        Self::new(vec![-r, Rat::one()])
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rat {
        self.coeffs.get(i).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn leading(&self) -> Rat {
        self.coeffs.last().cloned().unwrap_or_else(Rat::zero)
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + rat_to_f64(c))
    }

    pub fn to_f64_coeffs(&self) -> Vec<f64> {
        self.coeffs.iter().map(rat_to_f64).collect()
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * rat_int(i as i64))
                .collect(),
        )
    }

    pub fn scale(&self, c: &Rat) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Integer multiple with coprime coefficients and positive leading term.
    pub fn primitive(&self) -> Self {
        use num_integer::Integer;
        if self.is_zero() {
            return self.clone();
        }
        let l = self.coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self.coeffs.iter().map(|c| (c * Rat::from_integer(l.clone())).to_integer()).collect();
        let mut g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        if ints.last().unwrap().is_negative() {
            g = -g;
        }
        RatPoly::new(ints.into_iter().map(|c| Rat::from_integer(c / &g)).collect())
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&(Rat::one() / self.leading()))
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(), |acc, _| &acc * self)
    }

    /// Multiplies by x^k.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = vec![Rat::zero(); k];
        c.extend(self.coeffs.iter().cloned());
        Self::new(c)
    }

    /// Euclidean division over the rationals.
    pub fn div_rem(&self, d: &Self) -> Result<(Self, Self)> {
        if d.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let dd = d.deg();
        let inv_lc = Rat::one() / d.leading();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return Ok((Self::zero(), self.clone()));
        }
        let mut q = vec![Rat::zero(); r.len() - dd];
        for i in (0..q.len()).rev() {
            let c = &r[i + dd] * &inv_lc;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[i + j] -= &c * dc;
                }
            }
            q[i] = c;
        }
        r.truncate(dd);
        Ok((Self::new(q), Self::new(r)))
    }

    pub fn rem(&self, d: &Self) -> Result<Self> {
        Ok(self.div_rem(d)?.1)
    }

    /// Exact division; errors if `d` does not divide `self`.
    pub fn exact_div(&self, d: &Self) -> Result<Self> {
        let (q, r) = self.div_rem(d)?;
        if !r.is_zero() {
            return Err(Error::InvalidInput("inexact polynomial division".into()));
        }
        Ok(q)
    }

    /// Monic gcd; gcd(0, 0) = 0.
    pub fn gcd(a: &Self, b: &Self) -> Self {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_zero() {
            let r = a.rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn squarefree_part(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let g = Self::gcd(self, &self.derivative());
        Ok(self.exact_div(&g)?.monic())
    }

    /// Yun's algorithm: monic, pairwise coprime, squarefree factors `f_i`
    /// with self = lc · ∏ f_i^i. Constant factors are omitted.
    pub fn squarefree_decomposition(&self) -> Result<Vec<(Self, usize)>> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let mut out = Vec::new();
        if self.deg() == 0 {
            return Ok(out);
        }
        let f = self.monic();
        let d = f.derivative();
        let a0 = Self::gcd(&f, &d);
        let mut b = f.exact_div(&a0)?;
        let mut c = d.exact_div(&a0)?;
        let mut dd = &c - &b.derivative();
        let mut i = 1;
        loop {
            let a = Self::gcd(&b, &dd);
            if a.deg() > 0 {
                out.push((a.clone(), i));
            }
            b = b.exact_div(&a)?;
            if b.deg() == 0 {
                break;
            }
            c = dd.exact_div(&a)?;
            dd = &c - &b.derivative();
            i += 1;
        }
        Ok(out)
    }

    fn sign_at(&self, b: &Bound) -> i32 {
        match b {
            Bound::At(x) => sign(&self.eval(x)),
            Bound::PosInf => sign(&self.leading()),
            Bound::NegInf => {
                let s = sign(&self.leading());
                if self.deg() % 2 == 0 {
                    s
                } else {
                    -s
                }
            }
        }
    }

    /// Cauchy bound, rounded up to a power of two.
    fn root_bound(&self) -> Rat {
        let lc = self.leading().abs();
        let m = self.coeffs[..self.deg()]
            .iter()
            .map(|c| c.abs() / &lc)
            .fold(Rat::zero(), |a, b| if b > a { b } else { a });
        let bound = m + Rat::one();
        let mut p = Rat::one();
        while p < bound {
            p *= rat_int(2);
        }
        p
    }
}

impl fmt::Display for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let show_coeff = i == 0 || !a.is_one();
            if show_coeff {
                if a.is_integer() {
                    write!(f, "{}", a.numer())?;
                } else {
                    write!(f, "({}/{})", a.numer(), a.denom())?;
                }
            }
            match i {
                0 => {}
                1 => write!(f, "t")?,
                _ => write!(f, "t^{i}")?,
            }
        }
        Ok(())
    }
}

impl Add for &RatPoly {
    type Output = RatPoly;
    fn add(self, o: &RatPoly) -> RatPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        RatPoly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }
}

impl Sub for &RatPoly {
    type Output = RatPoly;
    fn sub(self, o: &RatPoly) -> RatPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        RatPoly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }
}

impl Mul for &RatPoly {
    type Output = RatPoly;
    fn mul(self, o: &RatPoly) -> RatPoly {
        if self.is_zero() || o.is_zero() {
            return RatPoly::zero();
        }
        let mut c = vec![Rat::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        RatPoly::new(c)
    }
}

impl Neg for &RatPoly {
    type Output = RatPoly;
    fn neg(self) -> RatPoly {
        RatPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for RatPoly {
            type Output = RatPoly;
            fn $m(self, o: RatPoly) -> RatPoly { (&self).$m(&o) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul);

/// Sturm chain of a squarefree polynomial. Members are rescaled by positive
/// constants (harmless for sign counts) to keep coefficients small, and
/// carry a float copy for certified fast sign evaluation.
struct SturmChain {
    polys: Vec<RatPoly>,
    floats: Vec<(Vec<f64>, Vec<f64>)>,
}

fn positive_content_free(p: &RatPoly) -> RatPoly {
    use num_integer::Integer;
    if p.is_zero() {
        return p.clone();
    }
    let l = p.coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = p.coeffs.iter().map(|c| (c * Rat::from_integer(l.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c)).abs();
    RatPoly::new(ints.into_iter().map(|c| Rat::from_integer(c / &g)).collect())
}

impl SturmChain {
    fn new(p: &RatPoly) -> Self {
        let mut chain = vec![positive_content_free(p), positive_content_free(&p.derivative())];
        while !chain.last().unwrap().is_zero() {
            let n = chain.len();
            let r = chain[n - 2].rem(&chain[n - 1]).expect("nonzero");
            chain.push(positive_content_free(&-&r));
        }
        chain.pop();
        let floats = chain
            .iter()
            .map(|q| {
                let c = q.to_f64_coeffs();
                let a = c.iter().map(|x| x.abs()).collect();
                (c, a)
            })
            .collect();
        SturmChain { polys: chain, floats }
    }

    fn signs(&self, b: &Bound) -> Vec<i32> {
        if let Bound::At(x) = b {
            let xf = rat_to_f64(x);
            if xf.is_finite() && Rat::from_float(xf).as_ref() == Some(x) {
                return self
                    .polys
                    .iter()
                    .zip(&self.floats)
                    .map(|(q, (c, a))| {
                        let (mut v, mut m) = (0.0, 0.0);
                        for (ci, ai) in c.iter().zip(a).rev() {
                            v = v * xf + ci;
                            m = m * xf.abs() + ai;
                        }
                        let gamma = 4.0 * (c.len() as f64 + 1.0) * f64::EPSILON;
                        if m.is_finite() && v.abs() > gamma * m {
                            v.signum() as i32
                        } else {
                            q.sign_at(b)
                        }
                    })
                    .collect();
            }
        }
        self.polys.iter().map(|q| q.sign_at(b)).collect()
    }

    fn variations(&self, b: &Bound) -> usize {
        let mut last = 0;
        let mut v = 0;
        for s in self.signs(b).into_iter().filter(|&s| s != 0) {
            if last != 0 && s != last {
                v += 1;
            }
            last = s;
        }
        v
    }

    /// Distinct roots in (lo, hi].
    fn count(&self, lo: &Bound, hi: &Bound) -> usize {
        let (a, b) = (self.variations(lo), self.variations(hi));
        a.saturating_sub(b)
    }
}

/// Number of distinct real roots of `p` in (lo, hi].
pub fn sturm_count(p: &RatPoly, lo: &Bound, hi: &Bound) -> Result<usize> {
    let sf = p.squarefree_part()?;
    if sf.deg() == 0 {
        return Ok(0);
    }
    let ordered = match (lo, hi) {
        (Bound::PosInf, _) | (_, Bound::NegInf) => false,
        (Bound::At(a), Bound::At(b)) => a < b,
        _ => true,
    };
    if !ordered {
        return Ok(0);
    }
    Ok(SturmChain::new(&sf).count(lo, hi))
}

const REFINE_WIDTH: f64 = 1e-10;

/// All distinct real roots with multiplicities, sorted ascending.
pub fn real_roots(p: &RatPoly) -> Result<Vec<RealRoot>> {
    let mut out = Vec::new();
    for (factor, mult) in p.squarefree_decomposition()? {
        let chain = SturmChain::new(&factor);
        let bnd = factor.root_bound();
        let mut stack = vec![(-bnd.clone(), bnd)];
        let two = rat_int(2);
        let width = rat_from_f64(REFINE_WIDTH);
        while let Some((lo, hi)) = stack.pop() {
            let n = chain.count(&Bound::At(lo.clone()), &Bound::At(hi.clone()));
            if n == 0 {
                continue;
            }
            if n > 1 {
                let mid = (&lo + &hi) / &two;
                stack.push((lo, mid.clone()));
                stack.push((mid, hi));
                continue;
            }
            let (a, b, value) = refine(&factor, &chain, lo, hi, &width);
            out.push(RealRoot {
                value,
                isolating_interval: (a, b),
                multiplicity: mult,
            });
        }
    }
    out.sort_by(|x, y| x.value.total_cmp(&y.value));
    Ok(out)
}

/// Shrinks an isolating interval `(lo, hi]` of a simple root. Bisection runs
/// in floating point while the sign of `f` is certified by a Horner error
/// bound, and falls back to exact evaluation otherwise.
fn refine(f: &RatPoly, chain: &SturmChain, lo: Rat, hi: Rat, width: &Rat) -> (Rat, Rat, f64) {
    let two = rat_int(2);
    if f.eval(&hi).is_zero() {
        let v = rat_to_f64(&hi);
        return (lo, hi, v);
    }
    let sa = sign(&f.eval(&lo));
    if sa == 0 {
        // lo is a root owned by the neighbouring interval: exact Sturm bisection
        let (mut a, mut b) = (lo, hi);
        while &b - &a > *width {
            let mid = (&a + &b) / &two;
            if chain.count(&Bound::At(a.clone()), &Bound::At(mid.clone())) == 1 {
                b = mid;
            } else {
                a = mid;
            }
        }
        let v = newton_polish(f, rat_to_f64(&a), rat_to_f64(&b));
        return (a, b, v);
    }
    let c = f.to_f64_coeffs();
    let cabs: Vec<f64> = c.iter().map(|x| x.abs()).collect();
    let gamma = 4.0 * (c.len() as f64) * f64::EPSILON;
    let sign_at = |x: f64| -> i32 {
        let (mut v, mut m) = (0.0, 0.0);
        for (ci, ai) in c.iter().zip(&cabs).rev() {
            v = v * x + ci;
            m = m * x.abs() + ai;
        }
        if v.abs() > gamma * m {
            v.signum() as i32
        } else {
            sign(&f.eval(&rat_from_f64(x)))
        }
    };
    let (mut a, mut b) = (rat_to_f64(&lo), rat_to_f64(&hi));
    let (mut ra, mut rb) = (lo, hi);
    let w = rat_to_f64(width);
    while b - a > w {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let sm = sign_at(m);
        if sm == 0 {
            let r = rat_from_f64(m);
            return (r.clone(), r, m);
        }
        if sm == sa {
            a = m;
            ra = rat_from_f64(m);
        } else {
            b = m;
            rb = rat_from_f64(m);
        }
    }
    (ra, rb, newton_polish(f, a, b))
}

fn newton_polish(f: &RatPoly, a: f64, b: f64) -> f64 {
    let df = f.derivative();
    let mut x = 0.5 * (a + b);
    for _ in 0..5 {
        let d = df.eval_f64(x);
        if d == 0.0 {
            break;
        }
        let nx = x - f.eval_f64(x) / d;
        if !(nx >= a && nx <= b) {
            break;
        }
        x = nx;
    }
    x
}

fn eps(i: usize) -> i32 {
    // (-1)^{i(i-1)/2}
    if (i * i.saturating_sub(1) / 2) % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Signed subresultant coefficients sRes_0..=sRes_p for deg P = p > deg Q.
fn signed_subresultant_coeffs(p: &RatPoly, q: &RatPoly) -> Vec<Rat> {
    let pd = p.deg();
    let qd = q.deg();
    debug_assert!(pd > qd && !q.is_zero());
    let mut s = vec![Rat::zero(); pd + 1];
    let mut t = vec![Rat::zero(); pd + 1];
    let mut sres: Vec<RatPoly> = vec![RatPoly::zero(); pd + 1];
    sres[pd] = p.clone();
    s[pd] = Rat::one();
    t[pd] = Rat::one();
    sres[pd - 1] = q.clone();
    t[pd - 1] = q.leading();
    if qd == pd - 1 {
        s[pd - 1] = t[pd - 1].clone();
    }
    let (mut i, mut j) = (pd + 1, pd);
    while !sres[j - 1].is_zero() {
        let k = sres[j - 1].deg();
        let next;
        if k == j - 1 {
            s[j - 1] = t[j - 1].clone();
            if k == 0 {
                break;
            }
            let num = sres[i - 1].scale(&(&s[j - 1] * &s[j - 1]));
            let den = &s[j] * &t[i - 1];
            next = -&num.rem(&sres[j - 1]).unwrap().scale(&(Rat::one() / den));
        } else {
            s[j - 1] = Rat::zero();
            for delta in 1..j - k {
                let sg = if delta % 2 == 0 { Rat::one() } else { -Rat::one() };
                t[j - delta - 1] = sg * &t[j - 1] * &t[j - delta] / &s[j];
            }
            s[k] = t[k].clone();
            sres[k] = sres[j - 1].scale(&(&s[k] / &t[j - 1]));
            if k == 0 {
                break;
            }
            let num = sres[i - 1].scale(&(&t[j - 1] * &s[k]));
            let den = &s[j] * &t[i - 1];
            next = -&num.rem(&sres[j - 1]).unwrap().scale(&(Rat::one() / den));
        }
        t[k - 1] = next.leading();
        sres[k - 1] = next;
        i = j;
        j = k;
    }
    s
}

/// Exact resultant Res(p, q).
pub fn resultant(p: &RatPoly, q: &RatPoly) -> Result<Rat> {
    if p.is_zero() || q.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let (pd, qd) = (p.deg(), q.deg());
    if pd == 0 {
        return Ok(num_traits::pow(p.leading(), qd));
    }
    if qd == 0 {
        return Ok(num_traits::pow(q.leading(), pd));
    }
    let swap_sign = |r: Rat| if (pd * qd) % 2 == 1 { -r } else { r };
    if pd < qd {
        return Ok(swap_sign(resultant(q, p)?));
    }
    if pd == qd {
        // Res(q, p) = lc(q)^{deg p - deg r} Res(q, r) with r = p - (lc p / lc q) q
        let r = p - &q.scale(&(p.leading() / q.leading()));
        if r.is_zero() {
            return Ok(Rat::zero());
        }
        let f = num_traits::pow(q.leading(), pd - r.deg());
        return Ok(swap_sign(f * resultant(q, &r)?));
    }
    let s = signed_subresultant_coeffs(p, q);
    Ok(&s[0] * rat_int(eps(pd) as i64))
}

/// Resultant with formal degrees `dp >= deg p`, `dq >= deg q` (the
/// homogeneous resultant, vanishing also on a common root at infinity).
pub fn resultant_with_degrees(p: &RatPoly, q: &RatPoly, dp: usize, dq: usize) -> Result<Rat> {
    if p.is_zero() || q.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let (pd, qd) = (p.deg(), q.deg());
    if pd > dp || qd > dq {
        return Err(Error::InvalidInput("formal degree below actual degree".into()));
    }
    if pd < dp && qd < dq {
        return Ok(Rat::zero());
    }
    if qd < dq {
        return Ok(num_traits::pow(p.leading(), dq - qd) * resultant(p, q)?);
    }
    // Res_{dp,dq}(p,q) = (-1)^{dp dq} Res_{dq,dp}(q,p)
    let r = num_traits::pow(q.leading(), dp - pd) * resultant(q, p)?;
    let sg = (dp * dq) % 2 == 1;
    Ok(if sg { -r } else { r })
}

/// ℓ-th subdiscriminant PSPC_ℓ(p, p') / lc(p).
pub fn subdiscriminant(p: &RatPoly, l: usize) -> Result<Rat> {
    if p.degree().unwrap_or(0) == 0 {
        return Err(Error::InvalidInput("subdiscriminant of a constant".into()));
    }
    Ok(subresultant_pspc(p, &p.derivative(), l)? / p.leading())
}

/// ℓ-th principal subresultant coefficient.
pub fn subresultant_pspc(p: &RatPoly, q: &RatPoly, l: usize) -> Result<Rat> {
    if p.is_zero() || q.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let (pd, qd) = (p.deg(), q.deg());
    let max = pd.min(qd);
    if l > max {
        return Err(Error::OutOfRange { index: l, max });
    }
    if pd < qd {
        let sg = if ((pd - l) * (qd - l)) % 2 == 1 { -1 } else { 1 };
        return Ok(subresultant_pspc(q, p, l)? * rat_int(sg));
    }
    if pd == qd {
        return Ok(sylvester_minor(p, q, l));
    }
    let s = signed_subresultant_coeffs(p, q);
    Ok(&s[l] * rat_int(eps(pd - l) as i64))
}

/// det of the leading square block of the ℓ-th Sylvester submatrix
/// (used only when both degrees coincide).
fn sylvester_minor(p: &RatPoly, q: &RatPoly, l: usize) -> Rat {
    let (pd, qd) = (p.deg(), q.deg());
    let n = pd + qd - 2 * l;
    if n == 0 {
        return Rat::one();
    }
    let width = pd + qd - l;
    let mut rows: Vec<Vec<Rat>> = Vec::with_capacity(n);
    for (poly, copies) in [(p, qd - l), (q, pd - l)] {
        let d = poly.deg();
        for shift in 0..copies {
            let mut row = vec![Rat::zero(); width];
            for (k, c) in poly.coeffs.iter().enumerate() {
                row[shift + d - k] = c.clone();
            }
            row.truncate(n);
            rows.push(row);
        }
    }
    det(rows)
}

/// Determinant by exact Gaussian elimination.
pub(crate) fn det(mut m: Vec<Vec<Rat>>) -> Rat {
    let n = m.len();
    let mut d = Rat::one();
    for c in 0..n {
        let Some(piv) = (c..n).find(|&r| !m[r][c].is_zero()) else {
            return Rat::zero();
        };
        if piv != c {
            m.swap(piv, c);
            d = -d;
        }
        let pv = m[c][c].clone();
        d *= &pv;
        for r in c + 1..n {
            if m[r][c].is_zero() {
                continue;
            }
            let f = &m[r][c] / &pv;
            for k in c..n {
                let v = &f * &m[c][k];
                m[r][k] -= v;
            }
        }
    }
    d
}
