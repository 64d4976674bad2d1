//! Curl eigenfields on the round `S^3`.
//!
//! Axisymmetric fields `F(z) R + G(z) R'` with `z = cos^2 s` are evaluated
//! without the Hopf chart: with `z1 = cos s e^{i phi1}`, `z2 = sin s e^{i phi2}`
//! one has `cos 2s = |z1|^2 - |z2|^2` and `sin 2s e^{i(phi1+phi2)} = 2 z1 z2`,
//! and
//!
//! ```text
//! R' = cos 2s R + sin 2s sin(phi1+phi2) X1 - sin 2s cos(phi1+phi2) X2.
//! ```

use std::f64::consts::FRAC_PI_2;
use std::io::Write;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::manifold::{hopf_grid_closed, FrameVector, HopfPoint, S3Field};
use crate::nodal::S2Eigenfunction;
use crate::orthopoly::{char_poly_of, eigenpair, jacobi11_poly, ChebyshevSeries, RatPoly};
use crate::vec3::{dot4, Vec3, Vec4};
use crate::{Error, Result};

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `cos 2s` and `sin 2s e^{i(phi1+phi2)}` (as a real pair) at an embedded point.
#[inline]
fn axial_invariants(x: &Vec4) -> (f64, f64, f64) {
    let [x1, y1, x2, y2] = *x;
    let u = x1 * x1 + y1 * y1 - x2 * x2 - y2 * y2;
    let re = 2.0 * (x1 * x2 - y1 * y2);
    let im = 2.0 * (x1 * y2 + y1 * x2);
    (u, re, im)
}

/// `V = F(z) R + G(z) R'` with exact polynomial coefficients.
#[derive(Clone, Debug)]
pub struct AxisymmetricField {
    f: RatPoly,
    g: RatPoly,
    lambda: Option<f64>,
    fc: ChebyshevSeries,
    gc: ChebyshevSeries,
    dfc: ChebyshevSeries,
    dgc: ChebyshevSeries,
}

impl PartialEq for AxisymmetricField {
    fn eq(&self, other: &Self) -> bool {
        self.f == other.f && self.g == other.g && self.lambda == other.lambda
    }
}

impl AxisymmetricField {
    pub fn new(f: RatPoly, g: RatPoly, lambda: Option<f64>) -> Self {
        let fc = ChebyshevSeries::from_z_poly(&f);
        let gc = ChebyshevSeries::from_z_poly(&g);
        let dfc = ChebyshevSeries::from_z_poly(&f.derivative());
        let dgc = ChebyshevSeries::from_z_poly(&g.derivative());
        Self { f, g, lambda, fc, gc, dfc, dgc }
    }

    /// `R`, eigenvalue 2.
    pub fn hopf() -> Self {
        Self::new(RatPoly::from_integers(&[1]), RatPoly::zero(), Some(2.0))
    }

    /// `R'`, eigenvalue -2.
    pub fn anti_hopf() -> Self {
        Self::new(RatPoly::zero(), RatPoly::from_integers(&[1]), Some(-2.0))
    }

    /// `V_m = F_m R + G_m R'` for `m >= 2`, and `V'_|m| = G_|m| R + F_|m| R'`
    /// with eigenvalue `-2|m|` for `m <= -2`.
    pub fn build_vm(m: i32) -> Result<Self> {
        if m.unsigned_abs() < 2 {
            return Err(Error::InvalidArgument(format!(
                "|m| must be at least 2 (got {m}); use hopf() or anti_hopf() for eigenvalue +-2"
            )));
        }
        let p = eigenpair(m.unsigned_abs())?;
        let lambda = Some(2.0 * f64::from(m));
        Ok(if m > 0 {
            Self::new(p.f, p.g, lambda)
        } else {
            Self::new(p.g, p.f, lambda)
        })
    }

    /// The deformation from `V_m` (`t = 0`) to a multiple of `R` (odd `m`)
    /// or `R'` (even `m`) at `t = 1`:
    ///
    /// ```text
    /// F^t = P_{m-1}(1-t) P_{m-1}((1-t)(1-2z)) / m^2
    /// G^t = P_m(1-t) P_{m-2}((1-t)(1-2z)) / (m+1)^2
    /// ```
    pub fn homotopy_vtm(m: u32, t: f64) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidArgument(format!("homotopy needs m >= 2, got {m}")));
        }
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidArgument(format!("t = {t} outside [0, 1]")));
        }
        let w = rat(1) - BigRational::from_float(t).expect("finite t");
        let mu = m as usize;
        let mi = i64::from(m);
        let arg = |n: usize| jacobi11_poly(n).compose_affine(&w, &(&w * rat(-2)));
        let cf = jacobi11_poly(mu - 1).eval(&w) / rat(mi * mi);
        let cg = jacobi11_poly(mu).eval(&w) / rat((mi + 1) * (mi + 1));
        let f = arg(mu - 1).scale(&cf);
        let g = arg(mu - 2).scale(&cg);
        let lambda = (t == 0.0).then_some(2.0 * f64::from(m));
        Ok(Self::new(f, g, lambda))
    }

    pub fn f_exact(&self) -> &RatPoly {
        &self.f
    }

    pub fn g_exact(&self) -> &RatPoly {
        &self.g
    }

    pub fn lambda(&self) -> Option<f64> {
        self.lambda
    }

    /// `F` and `G` at `u = cos 2s = 2z - 1`.
    #[inline]
    pub fn coefficients_u(&self, u: f64) -> (f64, f64) {
        (self.fc.eval_u(u), self.gc.eval_u(u))
    }

    /// `dF/dz` and `dG/dz` at `u = 2z - 1`.
    #[inline]
    pub fn derivatives_u(&self, u: f64) -> (f64, f64) {
        (self.dfc.eval_u(u), self.dgc.eval_u(u))
    }

    pub fn components_at(&self, p: &HopfPoint) -> FrameVector {
        self.frame_components(&p.embedding())
    }

    /// Coefficients of `d/dphi1` and `d/dphi2`: `(F + G, F - G)`.
    pub fn phi_coefficients(&self, s: f64) -> (f64, f64) {
        let (f, g) = self.coefficients_u((2.0 * s).cos());
        (f + g, f - g)
    }

    /// `|V|^2 = F^2 + 2 cos 2s F G + G^2`.
    pub fn norm_sq_at(&self, s: f64) -> f64 {
        let u = (2.0 * s).cos();
        let (f, g) = self.coefficients_u(u);
        f * f + 2.0 * u * f * g + g * g
    }

    /// Exact values on the Hopf link: the `d/dphi1` coefficient on `{s = 0}`
    /// and the `d/dphi2` coefficient on `{s = pi/2}`.
    pub fn link_values(&self) -> (BigRational, BigRational) {
        let one = rat(1);
        let zero = BigRational::zero();
        (
            self.f.eval(&one) + self.g.eval(&one),
            self.f.eval(&zero) - self.g.eval(&zero),
        )
    }

    /// Exact curl,
    /// `[(2z-1)F' + 2F + G'] R - [(2z-1)G' + 2G + F'] R'`.
    pub fn curl_exact(&self) -> Self {
        let u = RatPoly::from_integers(&[-1, 2]);
        let two = RatPoly::from_integers(&[2]);
        let (df, dg) = (self.f.derivative(), self.g.derivative());
        let cf = &(&(&u * &df) + &(&two * &self.f)) + &dg;
        let cg = -&(&(&(&u * &dg) + &(&two * &self.g)) + &df);
        Self::new(cf, cg, None)
    }

    pub fn scaled(&self, c: &BigRational) -> Self {
        Self::new(self.f.scale(c), self.g.scale(c), self.lambda)
    }

    /// `curl V = lambda V` as an identity of polynomials.
    pub fn is_exact_eigenfield(&self) -> bool {
        let Some(lambda) = self.lambda else {
            return false;
        };
        let Some(l) = BigRational::from_float(lambda) else {
            return false;
        };
        let c = self.curl_exact();
        c.f == self.f.scale(&l) && c.g == self.g.scale(&l)
    }

    /// `R . V = F + (2z - 1) G`, whose zeros in `(0, 1)` are the tori of the
    /// characteristic surface.
    pub fn char_poly(&self) -> RatPoly {
        char_poly_of(&self.f, &self.g)
    }

    /// Minimum of `|V|` over `n` closed samples of `s` (including both Hopf
    /// link circles), refined by golden-section search around the best
    /// sample. The norm is independent of the angles.
    pub fn min_norm(&self, n: usize) -> NormExtremum {
        self.extremum(n, false)
    }

    pub fn max_norm(&self, n: usize) -> NormExtremum {
        self.extremum(n, true)
    }

    fn extremum(&self, n: usize, maximize: bool) -> NormExtremum {
        let n = n.max(2);
        let sign = if maximize { -1.0 } else { 1.0 };
        let obj = |s: f64| sign * self.norm_sq_at(s).sqrt();
        let ds = FRAC_PI_2 / (n - 1) as f64;
        let (mut best_i, mut best) = (0, f64::INFINITY);
        for i in 0..n {
            let s = if i == n - 1 { FRAC_PI_2 } else { i as f64 * ds };
            let v = obj(s);
            if v < best {
                best = v;
                best_i = i;
            }
        }
        let lo = (best_i as f64 - 1.0).max(0.0) * ds;
        let hi = ((best_i as f64 + 1.0) * ds).min(FRAC_PI_2);
        let (s, v) = golden_section(obj, lo, hi, 1e-12);
        let (s, v) = if v < best { (s, v) } else { (best_i as f64 * ds, best) };
        NormExtremum {
            value: sign * v,
            point: HopfPoint::raw(s.min(FRAC_PI_2), 0.0, 0.0),
        }
    }
}

impl S3Field for AxisymmetricField {
    #[inline]
    fn frame_components(&self, x: &Vec4) -> FrameVector {
        let (u, re, im) = axial_invariants(x);
        let (f, g) = self.coefficients_u(u);
        FrameVector::new(f + u * g, g * im, -g * re)
    }
}

/// Minimum (or maximum) of `|V|` and a point where it is attained.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormExtremum {
    pub value: f64,
    pub point: HopfPoint,
}

/// Golden-section minimization on `[a, b]`.
pub fn golden_section<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// `V = lambda f R + X2(f) X1 - X1(f) X2` with `f = fbar o pi` the pullback
/// of a spherical harmonic by the Hopf map, `lambda = 2 + 2k`.
#[derive(Clone, Debug)]
pub struct S1InvariantField {
    fbar: S2Eigenfunction,
    lambda: f64,
}

impl S1InvariantField {
    pub fn fbar(&self) -> &S2Eigenfunction {
        &self.fbar
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// The pulled-back function `f` at an embedded point.
    pub fn basic_function(&self, x: &Vec4) -> f64 {
        self.fbar.eval(&hopf_map(x))
    }

    /// `(X1(f), X2(f))` by the chain rule through the Hopf map.
    pub fn frame_derivatives(&self, x: &Vec4) -> (f64, f64) {
        let u = hopf_map(x);
        let grad = self.fbar.gradient(&u);
        let [_, e1, e2] = crate::manifold::frame_at_embedded(x);
        let jac = hopf_map_jacobian(x);
        let along = |e: &Vec4| -> f64 { (0..3).map(|j| grad[j] * dot4(&jac[j], e)).sum() };
        (along(&e1), along(&e2))
    }
}

impl S3Field for S1InvariantField {
    fn frame_components(&self, x: &Vec4) -> FrameVector {
        let f = self.basic_function(x);
        let (x1f, x2f) = self.frame_derivatives(x);
        FrameVector::new(self.lambda * f, x2f, -x1f)
    }
}

/// The Hopf map `S^3 -> S^2`, `(2 Re z1 conj(z2), 2 Im z1 conj(z2), |z1|^2 - |z2|^2)`.
pub fn hopf_map(x: &Vec4) -> Vec3 {
    let [x1, y1, x2, y2] = *x;
    [
        2.0 * (x1 * x2 + y1 * y2),
        2.0 * (y1 * x2 - x1 * y2),
        x1 * x1 + y1 * y1 - x2 * x2 - y2 * y2,
    ]
}

/// Euclidean gradients in `R^4` of the three Hopf map components.
fn hopf_map_jacobian(x: &Vec4) -> [Vec4; 3] {
    let [x1, y1, x2, y2] = *x;
    [
        [2.0 * x2, 2.0 * y2, 2.0 * x1, 2.0 * y1],
        [-2.0 * y2, 2.0 * x2, 2.0 * y1, -2.0 * x1],
        [2.0 * x1, 2.0 * y1, -2.0 * x2, -2.0 * y2],
    ]
}

/// S^1-invariant eigenfield from an `S^2` eigenfunction. The Laplace
/// eigenvalue on the radius-1/2 sphere is `4k(k+1)` and must match `k`.
pub fn s1_invariant_field(fbar: &S2Eigenfunction, k: u32) -> Result<S1InvariantField> {
    if fbar.degree() != k {
        return Err(Error::NotEigenfunction(format!(
            "harmonic of degree {} has eigenvalue {} on the half sphere, not 4k(k+1) = {} for k = {k}",
            fbar.degree(),
            4 * fbar.degree() * (fbar.degree() + 1),
            4 * k * (k + 1)
        )));
    }
    Ok(S1InvariantField {
        fbar: fbar.clone(),
        lambda: 2.0 + 2.0 * f64::from(k),
    })
}

/// `V = (L d/dphi1 + K d/dphi2) / (L^2 cos^2 s + K^2 sin^2 s)`, a Beltrami
/// field with factor `2KL / (L^2 cos^2 s + K^2 sin^2 s)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KlField {
    pub k: f64,
    pub l: f64,
}

impl KlField {
    pub fn new(k: f64, l: f64) -> Result<Self> {
        if k * l == 0.0 || !(k * l).is_finite() {
            return Err(Error::InvalidArgument(format!("k = {k}, l = {l} need kl != 0")));
        }
        Ok(Self { k, l })
    }

    fn denominator(&self, z: f64) -> f64 {
        self.l * self.l * z + self.k * self.k * (1.0 - z)
    }

    pub fn beltrami_factor(&self, x: &Vec4) -> f64 {
        let z = x[0] * x[0] + x[1] * x[1];
        2.0 * self.k * self.l / self.denominator(z)
    }
}

impl S3Field for KlField {
    fn frame_components(&self, x: &Vec4) -> FrameVector {
        let (u, re, im) = axial_invariants(x);
        let d = self.denominator(0.5 * (1.0 + u));
        // a d/dphi1 + b d/dphi2 = (a+b)/2 R + (a-b)/2 R'
        let f = 0.5 * (self.l + self.k) / d;
        let g = 0.5 * (self.l - self.k) / d;
        FrameVector::new(f + u * g, g * im, -g * re)
    }
}

/// The closed-form eigenvalue-4 field
/// `1/2 (x1^2 + 4 x1 x2 - x2^2 + 2(y1^2 - y2^2)) R - (x2 y1 + x1 y2) X1
///  - (x1^2 - x2^2 + y1 y2) X2`, which is not axisymmetric.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct NonAxisymmetricExample;

impl S3Field for NonAxisymmetricExample {
    fn frame_components(&self, x: &Vec4) -> FrameVector {
        let [x1, y1, x2, y2] = *x;
        FrameVector::new(
            0.5 * (x1 * x1 + 4.0 * x1 * x2 - x2 * x2 + 2.0 * (y1 * y1 - y2 * y2)),
            -(x2 * y1 + x1 * y2),
            -(x1 * x1 - x2 * x2 + y1 * y2),
        )
    }
}

/// Any of the sphere fields handled by the pipeline.
#[derive(Clone, Debug)]
pub enum SphereField {
    Axisymmetric(AxisymmetricField),
    S1Invariant(S1InvariantField),
    NonAxisymmetric(NonAxisymmetricExample),
    Kl(KlField),
}

impl SphereField {
    /// Eigenvalue for curl eigenfields; `None` for a nonconstant factor.
    pub fn lambda(&self) -> Option<f64> {
        match self {
            Self::Axisymmetric(a) => a.lambda(),
            Self::S1Invariant(s) => Some(s.lambda()),
            Self::NonAxisymmetric(_) => Some(4.0),
            Self::Kl(_) => None,
        }
    }

    /// Proportionality factor of `curl V = f V` at an embedded point.
    pub fn beltrami_factor(&self, x: &Vec4) -> Option<f64> {
        match self {
            Self::Kl(k) => Some(k.beltrami_factor(x)),
            _ => self.lambda(),
        }
    }

    pub fn as_axisymmetric(&self) -> Option<&AxisymmetricField> {
        match self {
            Self::Axisymmetric(a) => Some(a),
            _ => None,
        }
    }
}

impl S3Field for SphereField {
    fn frame_components(&self, x: &Vec4) -> FrameVector {
        match self {
            Self::Axisymmetric(a) => a.frame_components(x),
            Self::S1Invariant(s) => s.frame_components(x),
            Self::NonAxisymmetric(n) => n.frame_components(x),
            Self::Kl(k) => k.frame_components(x),
        }
    }
}

pub const BUILTIN_NAMES: [&str; 5] = ["nonaxisymmetric", "hopf", "antihopf", "v2", "v3"];

pub fn builtin_example(name: &str) -> Result<SphereField> {
    Ok(match name {
        "nonaxisymmetric" => SphereField::NonAxisymmetric(NonAxisymmetricExample),
        "hopf" => SphereField::Axisymmetric(AxisymmetricField::hopf()),
        "antihopf" => SphereField::Axisymmetric(AxisymmetricField::anti_hopf()),
        "v2" => SphereField::Axisymmetric(AxisymmetricField::build_vm(2)?),
        "v3" => SphereField::Axisymmetric(AxisymmetricField::build_vm(3)?),
        _ => return Err(Error::UnknownName(name.to_string())),
    })
}

/// Minimum of `|V|` over `hopf_grid_closed(n, n)`.
pub fn min_norm_on_grid<V: S3Field + ?Sized>(v: &V, n: usize) -> NormExtremum {
    use rayon::prelude::*;
    hopf_grid_closed(n, n)
        .par_iter()
        .map(|p| NormExtremum {
            value: v.eval(p).norm(),
            point: *p,
        })
        .min_by(|a, b| a.value.total_cmp(&b.value))
        .expect("nonempty grid")
}

/// CSV with header `s,phi1,phi2,f,f1,f2` and `n^3` rows.
pub fn write_samples_csv<V: S3Field + ?Sized, W: Write>(v: &V, n: usize, out: &mut W) -> Result<()> {
    writeln!(out, "s,phi1,phi2,f,f1,f2")?;
    for p in hopf_grid_closed(n, n) {
        let c = v.eval(&p);
        writeln!(out, "{},{},{},{},{},{}", p.s, p.phi1, p.phi2, c.f, c.f1, c.f2)?;
    }
    Ok(())
}
