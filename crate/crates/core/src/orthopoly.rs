//! `(1,1)`-Jacobi polynomials and the coefficient polynomials of the
//! axisymmetric eigenfields, with exact rational arithmetic for expansion and
//! Sturm-certified real root isolation.
//!
//! The Jacobi normalization is pinned by `P_n(1) = n + 1`, via
//! `n(n+2) P_n = (2n+1)(n+1) x P_{n-1} - n(n+1) P_{n-2}`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn frac(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Polynomial with exact rational coefficients, ascending degree.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatPoly {
    coeffs: Vec<BigRational>,
}

impl RatPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    /// The identity polynomial `x`.
    pub fn x() -> Self {
        Self::new(vec![BigRational::zero(), BigRational::one()])
    }

    pub fn from_integers(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&n| rat(n)).collect())
    }

    /// Coefficients given as `(numerator, denominator)` pairs.
    pub fn from_fractions(c: &[(i64, i64)]) -> Self {
        Self::new(c.iter().map(|&(p, q)| frac(p, q)).collect())
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> BigRational {
        self.coeffs.last().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * rat(k as i64))
                .collect(),
        )
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    /// `p(a + b x)`.
    pub fn compose_affine(&self, a: &BigRational, b: &BigRational) -> Self {
        let lin = Self::new(vec![a.clone(), b.clone()]);
        self.coeffs
            .iter()
            .rev()
            .fold(Self::zero(), |acc, c| &(&acc * &lin) + &Self::constant(c.clone()))
    }

    /// Coefficients rounded to the nearest double.
    pub fn to_f64(&self) -> Polynomial {
        Polynomial::new(
            self.coeffs
                .iter()
                .map(|c| c.to_f64().unwrap_or(f64::NAN))
                .collect(),
        )
    }

    /// Euclidean quotient and remainder by a nonzero `d`.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let dd = d.degree().unwrap_or(0);
        let lead = d.leading();
        let mut r = self.coeffs.clone();
        let mut q = vec![BigRational::zero(); r.len().saturating_sub(dd).max(1)];
        while r.len() > dd && !r.is_empty() {
            let k = r.len() - 1;
            let c = &r[k] / &lead;
            for (i, dc) in d.coeffs.iter().enumerate() {
                let idx = k - dd + i;
                r[idx] = &r[idx] - &c * dc;
            }
            q[k - dd] = c;
            r.pop();
            while r.last().is_some_and(Zero::is_zero) {
                r.pop();
            }
        }
        (Self::new(q), Self::new(r))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.div_rem(d).1
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            let l = a.leading();
            a.scale(&(BigRational::one() / l))
        }
    }

    /// Sturm chain `p, p', -rem(p, p'), ...`.
    pub fn sturm_chain(&self) -> Vec<Self> {
        let mut chain = vec![self.clone()];
        let d = self.derivative();
        if d.is_zero() {
            return chain;
        }
        chain.push(d);
        loop {
            let n = chain.len();
            let r = -&chain[n - 2].rem(&chain[n - 1]);
            if r.is_zero() {
                break;
            }
            chain.push(r);
        }
        chain
    }

    /// `self / gcd(self, self')`: same roots, all simple.
    pub fn squarefree(&self) -> Self {
        let g = self.gcd(&self.derivative());
        if g.degree().unwrap_or(0) == 0 {
            self.clone()
        } else {
            self.div_rem(&g).0
        }
    }

    /// Number of distinct real roots in the open interval `(a, b)`.
    pub fn count_roots(&self, a: &BigRational, b: &BigRational) -> usize {
        if self.is_zero() {
            return 0;
        }
        let p = self.squarefree();
        let chain = p.sturm_chain();
        let variations = |x: &BigRational| {
            let signs: Vec<bool> = chain
                .iter()
                .map(|q| q.eval(x))
                .filter(|v| !v.is_zero())
                .map(|v| v.is_positive())
                .collect();
            signs.windows(2).filter(|w| w[0] != w[1]).count()
        };
        // V(a) - V(b) counts roots in (a, b]
        let n = variations(a).saturating_sub(variations(b));
        if p.eval(b).is_zero() {
            n.saturating_sub(1)
        } else {
            n
        }
    }
}

impl Add for &RatPoly {
    type Output = RatPoly;
    fn add(self, o: &RatPoly) -> RatPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        let zero = BigRational::zero();
        RatPoly::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&zero) + o.coeffs.get(i).unwrap_or(&zero))
                .collect(),
        )
    }
}

impl Sub for &RatPoly {
    type Output = RatPoly;
    fn sub(self, o: &RatPoly) -> RatPoly {
        self + &(-o)
    }
}

impl Neg for &RatPoly {
    type Output = RatPoly;
    fn neg(self) -> RatPoly {
        RatPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &RatPoly {
    type Output = RatPoly;
    fn mul(self, o: &RatPoly) -> RatPoly {
        if self.is_zero() || o.is_zero() {
            return RatPoly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RatPoly::new(out)
    }
}

impl fmt::Display for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            first = false;
            let a = c.abs();
            match k {
                0 => write!(f, "{a}")?,
                1 => write!(f, "{a} z")?,
                _ => write!(f, "{a} z^{k}")?,
            }
        }
        Ok(())
    }
}

/// Polynomial with double coefficients, ascending degree.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Polynomial {
    pub coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * k as f64)
                .collect(),
        )
    }

    /// Exact rational image; every finite double is a dyadic rational.
    pub fn to_exact(&self) -> RatPoly {
        RatPoly::new(
            self.coeffs
                .iter()
                .map(|&c| BigRational::from_float(c).unwrap_or_else(BigRational::zero))
                .collect(),
        )
    }
}

/// Chebyshev series in `u = 2z - 1 = cos 2s`, evaluated by Clenshaw's
/// recurrence. The monomial basis in `z` loses about `log10 max|c_k|` digits
/// for high degree; the Chebyshev coefficients of these polynomials stay small.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct ChebyshevSeries {
    pub coeffs: Vec<f64>,
}

impl ChebyshevSeries {
    /// Exact conversion of a polynomial in `z`.
    pub fn from_z_poly(p: &RatPoly) -> Self {
        let half = frac(1, 2);
        let q = p.compose_affine(&half, &half);
        // Horner in the Chebyshev basis, using u T_0 = T_1 and
        // u T_j = (T_{j+1} + T_{j-1}) / 2
        let mut acc: Vec<BigRational> = Vec::new();
        for c in q.coeffs().iter().rev() {
            let mut next = vec![BigRational::zero(); acc.len() + 1];
            for (j, a) in acc.iter().enumerate() {
                if j == 0 {
                    next[1] += a;
                } else {
                    next[j + 1] += a * &half;
                    next[j - 1] += a * &half;
                }
            }
            if next.is_empty() {
                next.push(BigRational::zero());
            }
            next[0] += c;
            acc = next;
        }
        let mut coeffs: Vec<f64> = acc.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect();
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn eval_u(&self, u: f64) -> f64 {
        let (mut b1, mut b2) = (0.0, 0.0);
        for c in self.coeffs.iter().skip(1).rev() {
            let b0 = c + 2.0 * u * b1 - b2;
            b2 = b1;
            b1 = b0;
        }
        self.coeffs.first().copied().unwrap_or(0.0) + u * b1 - b2
    }

    pub fn eval_z(&self, z: f64) -> f64 {
        self.eval_u(2.0 * z - 1.0)
    }
}

/// `P_n^{(1,1)}(x)` by the three-term recurrence.
pub fn jacobi11(n: usize, x: f64) -> f64 {
    let (mut p0, mut p1) = (1.0, 2.0 * x);
    if n == 0 {
        return p0;
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * (kf + 1.0) * x * p1 - kf * (kf + 1.0) * p0) / (kf * (kf + 2.0));
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// Exact coefficients of `P_n^{(1,1)}(x)`.
pub fn jacobi11_poly(n: usize) -> RatPoly {
    let x = RatPoly::x();
    let mut p0 = RatPoly::from_integers(&[1]);
    let mut p1 = RatPoly::from_integers(&[0, 2]);
    if n == 0 {
        return p0;
    }
    for k in 2..=n {
        let k = k as i64;
        let a = RatPoly::constant(frac((2 * k + 1) * (k + 1), k * (k + 2)));
        let b = RatPoly::constant(frac(k * (k + 1), k * (k + 2)));
        let p2 = &(&(&a * &x) * &p1) - &(&b * &p0);
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// Gegenbauer `C_n^{(3/2)}(x)`, the coefficients of `(1 - 2tx + t^2)^{-3/2}`.
pub fn gegenbauer32(n: usize, x: f64) -> f64 {
    let (mut c0, mut c1) = (1.0, 3.0 * x);
    if n == 0 {
        return c0;
    }
    for k in 2..=n {
        let kf = k as f64;
        let c2 = (2.0 * x * (kf + 0.5) * c1 - (kf + 1.0) * c0) / kf;
        c0 = c1;
        c1 = c2;
    }
    c1
}

/// Coefficient polynomials `F_m`, `G_m` in `z = cos^2 s` of the even
/// eigenvalue `2m` axisymmetric eigenfield.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EigenPair {
    pub m: u32,
    pub f: RatPoly,
    pub g: RatPoly,
}

impl EigenPair {
    pub fn f_poly(&self) -> Polynomial {
        self.f.to_f64()
    }

    pub fn g_poly(&self) -> Polynomial {
        self.g.to_f64()
    }
}

/// `F_m(z) = P_{m-1}(1 - 2z) / m`, `G_m(z) = P_{m-2}(1 - 2z) / (m + 1)`.
pub fn eigenpair(m: u32) -> Result<EigenPair> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!("eigenpair needs m >= 2, got {m}")));
    }
    let (one, mtwo) = (rat(1), rat(-2));
    let mi = i64::from(m);
    let f = jacobi11_poly(m as usize - 1)
        .compose_affine(&one, &mtwo)
        .scale(&frac(1, mi));
    let g = jacobi11_poly(m as usize - 2)
        .compose_affine(&one, &mtwo)
        .scale(&frac(1, mi + 1));
    Ok(EigenPair { m, f, g })
}

/// `F + (2z - 1) G`, the component of the field along `R`.
pub fn char_poly_of(f: &RatPoly, g: &RatPoly) -> RatPoly {
    f + &(&RatPoly::from_integers(&[-1, 2]) * g)
}

pub fn char_poly_exact(m: u32) -> Result<RatPoly> {
    let p = eigenpair(m)?;
    Ok(char_poly_of(&p.f, &p.g))
}

pub fn char_poly(m: u32) -> Result<Polynomial> {
    Ok(char_poly_exact(m)?.to_f64())
}

/// Residuals of the first-order system satisfied by an eigenpair with
/// eigenvalue `lambda`; both vanish identically for a genuine eigenpair.
pub fn rotational_system_residuals(f: &RatPoly, g: &RatPoly, lambda: &BigRational) -> (RatPoly, RatPoly) {
    let u = RatPoly::from_integers(&[-1, 2]);
    let two = RatPoly::from_integers(&[2]);
    let lam = RatPoly::constant(lambda.clone());
    let r1 = &(&(&(&u * &f.derivative()) + &(&two * f)) + &g.derivative()) - &(&lam * f);
    let r2 = &(&(&(&u * &g.derivative()) + &(&two * g)) + &f.derivative()) + &(&lam * g);
    (r1, r2)
}

/// All real roots of `p` in `(a, b)` to within `tol`.
///
/// Roots are bracketed by sign changes on a uniform grid of `10 deg` cells,
/// refined until the number of brackets matches the exact Sturm count, then
/// bisected. A root shared with `p'` is reported as a possible multiple root.
pub fn isolate_roots(p: &Polynomial, a: f64, b: f64, tol: f64) -> Result<Vec<f64>> {
    if !(a < b) {
        return Err(Error::InvalidArgument(format!("empty interval ({a}, {b})")));
    }
    if p.is_zero() {
        return Err(Error::InvalidArgument("zero polynomial has no isolated roots".into()));
    }
    let deg = p.degree().unwrap_or(0);
    if deg == 0 {
        return Ok(Vec::new());
    }
    let exact = p.to_exact();
    let (ea, eb) = (
        BigRational::from_float(a).expect("finite endpoint"),
        BigRational::from_float(b).expect("finite endpoint"),
    );
    let expected = exact.count_roots(&ea, &eb);
    let repeated = exact.gcd(&exact.derivative());

    let mut cells = 10 * deg;
    let mut brackets = Vec::new();
    for _ in 0..16 {
        brackets = sign_brackets(p, a, b, cells);
        if brackets.len() >= expected {
            break;
        }
        cells *= 2;
    }
    if brackets.len() != expected {
        let (lo, hi) = first_unmatched_cell(&exact, a, b, cells, &brackets);
        return Err(Error::PossibleMultipleRoot { a: lo, b: hi });
    }
    let mut roots = Vec::with_capacity(brackets.len());
    for (lo, hi) in brackets {
        if repeated.degree().unwrap_or(0) > 0 {
            let (l, h) = (
                BigRational::from_float(lo).expect("finite"),
                BigRational::from_float(hi).expect("finite"),
            );
            let touches = repeated.count_roots(&l, &h) > 0
                || repeated.eval(&l).is_zero()
                || repeated.eval(&h).is_zero();
            if touches {
                return Err(Error::PossibleMultipleRoot { a: lo, b: hi });
            }
        }
        roots.push(bisect(p, lo, hi, tol));
    }
    Ok(roots)
}

/// Degenerate brackets `(x, x)` mark grid points where `p` vanishes exactly.
fn sign_brackets(p: &Polynomial, a: f64, b: f64, cells: usize) -> Vec<(f64, f64)> {
    let h = (b - a) / cells as f64;
    let xs: Vec<f64> = (0..=cells)
        .map(|i| if i == cells { b } else { a + h * i as f64 })
        .collect();
    let vs: Vec<f64> = xs.iter().map(|&x| p.eval(x)).collect();
    let mut out = Vec::new();
    for i in 0..cells {
        if i > 0 && vs[i] == 0.0 {
            out.push((xs[i], xs[i]));
        }
        if vs[i] * vs[i + 1] < 0.0 {
            out.push((xs[i], xs[i + 1]));
        }
    }
    out
}

fn first_unmatched_cell(exact: &RatPoly, a: f64, b: f64, cells: usize, found: &[(f64, f64)]) -> (f64, f64) {
    let h = (b - a) / cells as f64;
    for i in 0..cells {
        let (lo, hi) = (a + h * i as f64, if i + 1 == cells { b } else { a + h * (i + 1) as f64 });
        let (l, r) = (
            BigRational::from_float(lo).expect("finite"),
            BigRational::from_float(hi).expect("finite"),
        );
        let n = exact.count_roots(&l, &r);
        let seen = found.iter().filter(|&&(x, y)| x >= lo && y <= hi && x < y).count();
        if n != seen {
            return (lo, hi);
        }
    }
    (a, b)
}

fn bisect(p: &Polynomial, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    if lo == hi {
        return lo;
    }
    let mut flo = p.eval(lo);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = p.eval(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Outcome of the interlacing test for `F_m` and `G_m`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interlacing {
    pub holds: bool,
    /// Smallest distance between a root of `F_m` and a root of `G_m`;
    /// infinite when `G_m` has no roots.
    pub margin: f64,
}

/// Roots of `F_m` and `G_m` in `(0, 1)` strictly alternate, starting and
/// ending with a root of `F_m`, and the two share no root.
pub fn check_interlacing(m: u32) -> Result<Interlacing> {
    let p = eigenpair(m)?;
    if p.f.gcd(&p.g).degree().unwrap_or(0) > 0 {
        return Ok(Interlacing { holds: false, margin: 0.0 });
    }
    let fr = isolate_roots(&p.f_poly(), 0.0, 1.0, 1e-14)?;
    let gr = isolate_roots(&p.g_poly(), 0.0, 1.0, 1e-14)?;
    let mut merged: Vec<(f64, bool)> = fr.iter().map(|&x| (x, true)).chain(gr.iter().map(|&x| (x, false))).collect();
    merged.sort_by(|x, y| x.0.total_cmp(&y.0));
    let alternates = merged.windows(2).all(|w| w[0].1 != w[1].1);
    let holds = fr.len() == m as usize - 1
        && gr.len() == m as usize - 2
        && alternates
        && merged.first().is_none_or(|x| x.1)
        && merged.last().is_none_or(|x| x.1);
    let margin = fr
        .iter()
        .flat_map(|x| gr.iter().map(move |y| (x - y).abs()))
        .fold(f64::INFINITY, f64::min);
    Ok(Interlacing { holds, margin })
}

/// Minimum of `P_{m-1}(w)^2 - m^2/(m^2-1) P_m(w) P_{m-2}(w)` over `n - 1`
/// interior points of a uniform grid on `[-1, 1]`.
pub fn turan_margin(m: u32, n: usize) -> Result<f64> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!("Turan check needs m >= 2, got {m}")));
    }
    let mu = m as usize;
    let mf = f64::from(m);
    let c = mf * mf / (mf * mf - 1.0);
    Ok((1..n)
        .map(|j| {
            let w = -1.0 + 2.0 * j as f64 / n as f64;
            let p = jacobi11(mu - 1, w);
            p * p - c * jacobi11(mu, w) * jacobi11(mu - 2, w)
        })
        .fold(f64::INFINITY, f64::min))
}
