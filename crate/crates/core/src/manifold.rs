//! Round `S^3` in Hopf coordinates and the flat torus `T^3`.
//!
//! Points of `S^3` are `(cos s e^{i phi1}, sin s e^{i phi2})` in `C^2 = R^4`
//! with real coordinates ordered `(x1, y1, x2, y2)`. Vector fields on `S^3`
//! are described by their components in the global orthonormal frame
//! `{R, X1, X2}`, which is taken to be positively oriented. With this choice
//! the volume form in Hopf coordinates is `-sin s cos s ds^dphi1^dphi2`, and
//! every sign downstream (curl, Whitehead integral, open books) comes from
//! [`volume_coefficient`].

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::quadrature::{periodic_nodes, GaussLegendre};
use crate::vec3::{dot4, Vec3, Vec4};
use crate::{Error, Result};

/// Default finite-difference step.
pub const DEFAULT_STEP: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HopfPoint {
    pub s: f64,
    pub phi1: f64,
    pub phi2: f64,
}

impl HopfPoint {
    /// Angles are reduced to `[0, 2 pi)`; `s` must lie in `[0, pi/2]`.
    pub fn new(s: f64, phi1: f64, phi2: f64) -> Result<Self> {
        if !(0.0..=FRAC_PI_2).contains(&s) {
            return Err(Error::InvalidArgument(format!(
                "Hopf radius s = {s} outside [0, pi/2]"
            )));
        }
        Ok(Self {
            s,
            phi1: phi1.rem_euclid(TAU),
            phi2: phi2.rem_euclid(TAU),
        })
    }

    /// Unchecked constructor for internal grid and stencil points.
    pub(crate) const fn raw(s: f64, phi1: f64, phi2: f64) -> Self {
        Self { s, phi1, phi2 }
    }

    pub fn embedding(&self) -> Vec4 {
        let (ss, cs) = self.s.sin_cos();
        let (s1, c1) = self.phi1.sin_cos();
        let (s2, c2) = self.phi2.sin_cos();
        [cs * c1, cs * s1, ss * c2, ss * s2]
    }

    /// Inverse of [`HopfPoint::embedding`] for a unit vector of `R^4`. On the
    /// Hopf link the undefined angle is set to zero.
    pub fn from_embedding(x: &Vec4) -> Self {
        let r1 = x[0].hypot(x[1]);
        let r2 = x[2].hypot(x[3]);
        let s = r2.atan2(r1);
        let phi1 = if r1 > 0.0 { x[1].atan2(x[0]).rem_euclid(TAU) } else { 0.0 };
        let phi2 = if r2 > 0.0 { x[3].atan2(x[2]).rem_euclid(TAU) } else { 0.0 };
        Self { s, phi1, phi2 }
    }

    /// `z = cos^2 s`, the variable of the axisymmetric coefficient polynomials.
    pub fn z(&self) -> f64 {
        let c = self.s.cos();
        c * c
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusPoint {
    pub x: [f64; 3],
}

impl TorusPoint {
    pub fn new(x1: f64, x2: f64, x3: f64) -> Self {
        Self {
            x: [x1.rem_euclid(TAU), x2.rem_euclid(TAU), x3.rem_euclid(TAU)],
        }
    }

    pub fn reduced(&self) -> Self {
        Self::new(self.x[0], self.x[1], self.x[2])
    }
}

/// Components of a tangent vector of `S^3` along `R`, `X1`, `X2`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FrameVector {
    pub f: f64,
    pub f1: f64,
    pub f2: f64,
}

impl FrameVector {
    pub const fn new(f: f64, f1: f64, f2: f64) -> Self {
        Self { f, f1, f2 }
    }

    pub fn to_array(self) -> Vec3 {
        [self.f, self.f1, self.f2]
    }

    pub fn from_array(a: Vec3) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn norm_sq(&self) -> f64 {
        self.f * self.f + self.f1 * self.f1 + self.f2 * self.f2
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// The vector in `R^4` at the embedded point `x`.
    pub fn ambient(&self, x: &Vec4) -> Vec4 {
        let [r, x1, x2] = frame_at_embedded(x);
        let mut out = [0.0; 4];
        for i in 0..4 {
            out[i] = self.f * r[i] + self.f1 * x1[i] + self.f2 * x2[i];
        }
        out
    }
}

/// `R`, `X1`, `X2` at an embedded point `(x1, y1, x2, y2)`.
pub fn frame_at_embedded(p: &Vec4) -> [Vec4; 3] {
    let [x1, y1, x2, y2] = *p;
    [
        [-y1, x1, -y2, x2],
        [-x2, y2, x1, -y1],
        [-y2, -x2, y1, x1],
    ]
}

pub fn frame_at(p: &HopfPoint) -> [Vec4; 3] {
    frame_at_embedded(&p.embedding())
}

/// Coordinate vectors `d/ds`, `d/dphi1`, `d/dphi2` at `p`, as vectors of `R^4`.
pub fn coordinate_vectors(p: &HopfPoint) -> [Vec4; 3] {
    let (ss, cs) = p.s.sin_cos();
    let (s1, c1) = p.phi1.sin_cos();
    let (s2, c2) = p.phi2.sin_cos();
    [
        [-ss * c1, -ss * s1, cs * c2, cs * s2],
        [-cs * s1, cs * c1, 0.0, 0.0],
        [0.0, 0.0, -ss * s2, ss * c2],
    ]
}

/// Frame components of an ambient tangent vector at an embedded point.
pub fn frame_components_of(x: &Vec4, v: &Vec4) -> FrameVector {
    let [r, x1, x2] = frame_at_embedded(x);
    FrameVector::new(dot4(v, &r), dot4(v, &x1), dot4(v, &x2))
}

/// Coefficient of `ds^dphi1^dphi2` in the oriented volume form.
#[inline]
pub fn volume_coefficient(s: f64) -> f64 {
    -s.sin() * s.cos()
}

/// A vector field on `S^3` given by its frame components.
///
/// Implementors evaluate on embedded points so that the Hopf link needs no
/// special treatment.
pub trait S3Field: Sync {
    fn frame_components(&self, x: &Vec4) -> FrameVector;

    fn eval(&self, p: &HopfPoint) -> FrameVector {
        self.frame_components(&p.embedding())
    }
}

impl<F> S3Field for F
where
    F: Fn(&Vec4) -> FrameVector + Sync,
{
    fn frame_components(&self, x: &Vec4) -> FrameVector {
        self(x)
    }
}

/// Finite-difference scheme. `Richardson` combines central differences at
/// `h` and `h/2` for a fourth-order result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum FdScheme {
    Central,
    #[default]
    Richardson,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdOptions {
    pub h: f64,
    pub scheme: FdScheme,
}

impl Default for FdOptions {
    fn default() -> Self {
        Self {
            h: DEFAULT_STEP,
            scheme: FdScheme::Richardson,
        }
    }
}

impl FdOptions {
    pub fn central(h: f64) -> Self {
        Self {
            h,
            scheme: FdScheme::Central,
        }
    }

    pub fn richardson(h: f64) -> Self {
        Self {
            h,
            scheme: FdScheme::Richardson,
        }
    }

    fn check(&self) -> Result<()> {
        if self.h > 0.0 && self.h.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("step h = {} must be positive", self.h)))
        }
    }
}

fn first_derivative<const N: usize>(g: impl Fn(f64) -> [f64; N], h: f64, scheme: FdScheme) -> [f64; N] {
    let central = |h: f64| {
        let (a, b) = (g(h), g(-h));
        let mut out = [0.0; N];
        for i in 0..N {
            out[i] = (a[i] - b[i]) / (2.0 * h);
        }
        out
    };
    match scheme {
        FdScheme::Central => central(h),
        FdScheme::Richardson => {
            let (d1, d2) = (central(h), central(0.5 * h));
            let mut out = [0.0; N];
            for i in 0..N {
                out[i] = (4.0 * d2[i] - d1[i]) / 3.0;
            }
            out
        }
    }
}

fn second_derivative(g: impl Fn(f64) -> f64, h: f64, scheme: FdScheme) -> f64 {
    let g0 = g(0.0);
    let central = |h: f64| (g(h) - 2.0 * g0 + g(-h)) / (h * h);
    match scheme {
        FdScheme::Central => central(h),
        FdScheme::Richardson => (4.0 * central(0.5 * h) - central(h)) / 3.0,
    }
}

fn check_away_from_link(p: &HopfPoint, h: f64) -> Result<()> {
    if p.s < h || p.s > FRAC_PI_2 - h {
        Err(Error::DegenerateCoordinate { s: p.s, h })
    } else {
        Ok(())
    }
}

/// Finite-difference curl defined by `i_{curl V} vol = d(V^flat)`.
///
/// The dual form `a_s ds + a_1 dphi1 + a_2 dphi2` has components
/// `a_i = <V, d_i>`; its exterior derivative is differenced in Hopf
/// coordinates and converted back to a vector with the volume coefficient.
pub fn curl_s3_numeric<V: S3Field + ?Sized>(v: &V, p: &HopfPoint, opts: FdOptions) -> Result<FrameVector> {
    opts.check()?;
    check_away_from_link(p, opts.h)?;
    let form = |q: HopfPoint| -> Vec3 {
        let x = q.embedding();
        let amb = v.frame_components(&x).ambient(&x);
        let [ds, d1, d2] = coordinate_vectors(&q);
        [dot4(&amb, &ds), dot4(&amb, &d1), dot4(&amb, &d2)]
    };
    let d_s = first_derivative(|e| form(HopfPoint::raw(p.s + e, p.phi1, p.phi2)), opts.h, opts.scheme);
    let d_1 = first_derivative(|e| form(HopfPoint::raw(p.s, p.phi1 + e, p.phi2)), opts.h, opts.scheme);
    let d_2 = first_derivative(|e| form(HopfPoint::raw(p.s, p.phi1, p.phi2 + e)), opts.h, opts.scheme);
    // i_W (sigma ds^dphi1^dphi2) = sigma (w_s dphi1^dphi2 - w_1 ds^dphi2 + w_2 ds^dphi1)
    let sigma = volume_coefficient(p.s);
    let w_s = (d_1[2] - d_2[1]) / sigma;
    let w_1 = -(d_s[2] - d_2[0]) / sigma;
    let w_2 = (d_s[1] - d_1[0]) / sigma;
    let [cs, c1, c2] = coordinate_vectors(p);
    let mut w = [0.0; 4];
    for i in 0..4 {
        w[i] = w_s * cs[i] + w_1 * c1[i] + w_2 * c2[i];
    }
    Ok(frame_components_of(&p.embedding(), &w))
}

/// Finite-difference Laplace-Beltrami operator in Hopf coordinates,
/// `f_ss + 2 cot(2s) f_s + f_11 / cos^2 s + f_22 / sin^2 s`.
pub fn laplace_beltrami_s3<F>(f: F, p: &HopfPoint, opts: FdOptions) -> Result<f64>
where
    F: Fn(&HopfPoint) -> f64,
{
    opts.check()?;
    check_away_from_link(p, opts.h)?;
    let (s, a, b) = (p.s, p.phi1, p.phi2);
    let gs = |e: f64| f(&HopfPoint::raw(s + e, a, b));
    let f_s = first_derivative(|e| [gs(e)], opts.h, opts.scheme)[0];
    let f_ss = second_derivative(gs, opts.h, opts.scheme);
    let f_11 = second_derivative(|e| f(&HopfPoint::raw(s, a + e, b)), opts.h, opts.scheme);
    let f_22 = second_derivative(|e| f(&HopfPoint::raw(s, a, b + e)), opts.h, opts.scheme);
    let (ss, cs) = s.sin_cos();
    Ok(f_ss + 2.0 * f_s * (2.0 * s).cos() / (2.0 * s).sin() + f_11 / (cs * cs) + f_22 / (ss * ss))
}

/// `int_{S^3} f dvol` by Gauss-Legendre in `s` and the trapezoid rule in
/// both angles.
pub fn quadrature_s3<F>(f: F, n_s: usize, n_phi: usize) -> f64
where
    F: Fn(&HopfPoint) -> f64 + Sync,
{
    use rayon::prelude::*;
    let gl = GaussLegendre::new(n_s);
    let nodes: Vec<(f64, f64)> = gl.on_interval(0.0, FRAC_PI_2).collect();
    let dphi = TAU / n_phi as f64;
    nodes
        .par_iter()
        .map(|&(s, w)| {
            let jac = s.sin() * s.cos();
            let mut acc = 0.0;
            for a in periodic_nodes(n_phi) {
                for b in periodic_nodes(n_phi) {
                    acc += f(&HopfPoint::raw(s, a, b));
                }
            }
            w * jac * acc * dphi * dphi
        })
        .sum()
}

/// Integral of the 3-form `g ds^dphi1^dphi2` over `S^3` with its positive
/// orientation. Because the oriented volume carries `-sin s cos s`, the
/// coordinate 3-form is negatively oriented and the Lebesgue integral
/// changes sign.
pub fn integrate_3form_s3<F>(g: F, n_s: usize, n_phi: usize) -> f64
where
    F: Fn(&HopfPoint) -> f64 + Sync,
{
    let sign = volume_coefficient(PI / 4.0).signum();
    let gl = GaussLegendre::new(n_s);
    let dphi = TAU / n_phi as f64;
    let mut total = 0.0;
    for (s, w) in gl.on_interval(0.0, FRAC_PI_2) {
        let mut acc = 0.0;
        for a in periodic_nodes(n_phi) {
            for b in periodic_nodes(n_phi) {
                acc += g(&HopfPoint::raw(s, a, b));
            }
        }
        total += w * acc * dphi * dphi;
    }
    sign * total
}

/// `int_{T^3} f dx` by the trapezoid rule with `n` points per direction.
pub fn quadrature_t3<F>(f: F, n: usize) -> f64
where
    F: Fn(&TorusPoint) -> f64 + Sync,
{
    let h = TAU / n as f64;
    let mut total = 0.0;
    for a in periodic_nodes(n) {
        for b in periodic_nodes(n) {
            for c in periodic_nodes(n) {
                total += f(&TorusPoint { x: [a, b, c] });
            }
        }
    }
    total * h * h * h
}

/// A vector field on `T^3` in Cartesian components.
pub trait T3Field: Sync {
    fn eval(&self, p: &TorusPoint) -> Vec3;

    /// Analytic curl when the representation supports it.
    fn exact_curl(&self, _p: &TorusPoint) -> Option<Vec3> {
        None
    }
}

/// Curl on the flat torus: exact when the field provides it, otherwise the
/// Richardson-extrapolated central difference at the default step.
pub fn curl_t3<V: T3Field + ?Sized>(v: &V, p: &TorusPoint) -> Vec3 {
    v.exact_curl(p)
        .unwrap_or_else(|| curl_t3_fd(v, p, FdOptions::default()))
}

pub fn curl_t3_fd<V: T3Field + ?Sized>(v: &V, p: &TorusPoint, opts: FdOptions) -> Vec3 {
    let [a, b, c] = p.x;
    let d1 = first_derivative(|e| v.eval(&TorusPoint { x: [a + e, b, c] }), opts.h, opts.scheme);
    let d2 = first_derivative(|e| v.eval(&TorusPoint { x: [a, b + e, c] }), opts.h, opts.scheme);
    let d3 = first_derivative(|e| v.eval(&TorusPoint { x: [a, b, c + e] }), opts.h, opts.scheme);
    [d2[2] - d3[1], d3[0] - d1[2], d1[1] - d2[0]]
}

/// `n^3` points with `s` at interval midpoints, so that every point is at
/// least `pi/(4n)` from the Hopf link.
pub fn hopf_grid_open(n: usize) -> Vec<HopfPoint> {
    let ds = FRAC_PI_2 / n as f64;
    let mut out = Vec::with_capacity(n * n * n);
    for i in 0..n {
        let s = (i as f64 + 0.5) * ds;
        for a in periodic_nodes(n) {
            for b in periodic_nodes(n) {
                out.push(HopfPoint::raw(s, a, b));
            }
        }
    }
    out
}

/// `n_s` values of `s` including both components of the Hopf link, times an
/// `n_phi x n_phi` angular grid.
pub fn hopf_grid_closed(n_s: usize, n_phi: usize) -> Vec<HopfPoint> {
    let n_s = n_s.max(2);
    let ds = FRAC_PI_2 / (n_s - 1) as f64;
    let mut out = Vec::with_capacity(n_s * n_phi * n_phi);
    for i in 0..n_s {
        let s = if i == n_s - 1 { FRAC_PI_2 } else { i as f64 * ds };
        for a in periodic_nodes(n_phi) {
            for b in periodic_nodes(n_phi) {
                out.push(HopfPoint::raw(s, a, b));
            }
        }
    }
    out
}

pub fn torus_grid(n: usize) -> Vec<TorusPoint> {
    let mut out = Vec::with_capacity(n * n * n);
    for a in periodic_nodes(n) {
        for b in periodic_nodes(n) {
            for c in periodic_nodes(n) {
                out.push(TorusPoint { x: [a, b, c] });
            }
        }
    }
    out
}

/// Open grid of `n` values of `s` in `(0, pi/2)`.
pub fn s_samples_open(n: usize) -> impl Iterator<Item = f64> {
    let ds = FRAC_PI_2 / n as f64;
    (0..n).map(move |i| (i as f64 + 0.5) * ds)
}
