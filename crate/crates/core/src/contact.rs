//! Contact forms dual to Beltrami fields: contact volume, characteristic
//! surfaces, tight/overtwisted classification of circle-invariant
//! structures, collinearity sets and linear contact homotopies.
//!
//! For a Beltrami field `curl V = f V` with dual form `alpha`,
//! `alpha ^ d alpha = <V, curl V> vol = f |V|^2 vol`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, TAU};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::manifold::{
    coordinate_vectors, curl_s3_numeric, curl_t3, curl_t3_fd, hopf_grid_closed, hopf_grid_open, torus_grid,
    FdOptions, FrameVector, HopfPoint, S3Field, T3Field, TorusPoint,
};
use crate::nodal::{extract_nodal_set, s2_nodal_regularity, NodalCurveSet, S2NodalReport, IRREGULAR_THRESHOLD};
use crate::orthopoly::{char_poly_of, isolate_roots, RatPoly};
use crate::quadrature::periodic_nodes;
use crate::sphere_fields::{golden_section, AxisymmetricField, KlField, SphereField};
use crate::torus_fields::{build_vk, ShearBeltrami, TorusField, TorusOrigin, WaveSpec};
use crate::vec3::{cross, dot, dot4, norm, scale, sub, Vec3};
use crate::{Error, Result};

/// Samples in `s` used to confirm that an axisymmetric field has no zero.
pub const NONVANISHING_SAMPLES: usize = 2049;

/// Default alignment tolerance on the normalized cross product.
pub const ALIGNMENT_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Manifold {
    S3,
    T3,
}

/// A 1-form by its components in an orthonormal coframe: the dual of the
/// Hopf frame on `S^3`, `dx1, dx2, dx3` on `T^3`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OneForm {
    pub manifold: Manifold,
    pub components: Vec3,
}

impl OneForm {
    pub fn dual_s3<V: S3Field + ?Sized>(v: &V, p: &HopfPoint) -> Self {
        Self {
            manifold: Manifold::S3,
            components: v.eval(p).to_array(),
        }
    }

    pub fn dual_t3<V: T3Field + ?Sized>(v: &V, p: &TorusPoint) -> Self {
        Self {
            manifold: Manifold::T3,
            components: v.eval(p),
        }
    }

    /// `alpha(W)` for a vector given in the matching orthonormal frame.
    pub fn pair(&self, w: &Vec3) -> f64 {
        dot(&self.components, w)
    }

    pub fn norm(&self) -> f64 {
        norm(&self.components)
    }

    /// Coefficients on `ds, dphi1, dphi2` at `p`, i.e. `alpha(d/ds)`,
    /// `alpha(d/dphi1)`, `alpha(d/dphi2)`.
    pub fn hopf_coordinates(&self, p: &HopfPoint) -> Result<Vec3> {
        if self.manifold != Manifold::S3 {
            return Err(Error::InvalidArgument("Hopf coordinates need a form on S^3".into()));
        }
        let x = p.embedding();
        let amb = FrameVector::from_array(self.components).ambient(&x);
        let [ds, d1, d2] = coordinate_vectors(p);
        Ok([dot4(&amb, &ds), dot4(&amb, &d1), dot4(&amb, &d2)])
    }
}

/// `<V, curl V>` with the curl differenced at `opts`.
pub fn contact_volume_s3_fd<V: S3Field + ?Sized>(v: &V, p: &HopfPoint, opts: FdOptions) -> Result<f64> {
    let c = curl_s3_numeric(v, p, opts)?;
    Ok(dot(&v.eval(p).to_array(), &c.to_array()))
}

/// `f |V|^2` from the known Beltrami factor.
pub fn contact_volume_s3(v: &SphereField, p: &HopfPoint) -> Option<f64> {
    let x = p.embedding();
    Some(v.beltrami_factor(&x)? * v.frame_components(&x).norm_sq())
}

/// `<V, curl V>` on the torus, exact when the field provides its curl.
pub fn contact_volume_t3<V: T3Field + ?Sized>(v: &V, p: &TorusPoint) -> f64 {
    dot(&v.eval(p), &curl_t3(v, p))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Tight,
    Overtwisted,
    Inconclusive,
}

/// Tori `s = s0` of the characteristic surface of an axisymmetric field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CharacteristicTori {
    /// Roots in `z = cos^2 s`.
    pub z_roots: Vec<f64>,
    pub s_roots: Vec<f64>,
    /// Exact Sturm count of roots in `(0, 1)`.
    pub sturm_count: usize,
}

/// Pairing of the circle-action generator with an axisymmetric field, as a
/// polynomial in `z`. Positive eigenvalues use the Hopf field `R`; negative
/// ones use the anti-Hopf field `R'`, which is what the orientation-reversing
/// mirror `(x1, y1, x2, y2) -> (x1, y1, x2, -y2)` exchanges with `R`.
pub fn generator_pairing(v: &AxisymmetricField) -> RatPoly {
    if v.lambda().is_some_and(|l| l < 0.0) {
        // R' . (F R + G R') = F cos 2s + G
        char_poly_of(v.g_exact(), v.f_exact())
    } else {
        char_poly_of(v.f_exact(), v.g_exact())
    }
}

pub fn characteristic_surface_s3(v: &AxisymmetricField) -> Result<CharacteristicTori> {
    let p = generator_pairing(v);
    if p.is_zero() {
        return Err(Error::Inapplicable("generator tangent to the contact planes everywhere".into()));
    }
    let zero = BigRational::from_integer(BigInt::from(0));
    let one = BigRational::from_integer(BigInt::from(1));
    let sturm_count = p.count_roots(&zero, &one);
    let z_roots = isolate_roots(&p.to_f64(), 0.0, 1.0, 1e-15)?;
    if z_roots.len() != sturm_count {
        return Err(Error::Consistency(format!(
            "isolated {} roots, Sturm count {sturm_count}",
            z_roots.len()
        )));
    }
    let s_roots = z_roots.iter().map(|z| z.sqrt().acos()).collect();
    Ok(CharacteristicTori {
        z_roots,
        s_roots,
        sturm_count,
    })
}

/// Evidence attached to a verdict.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// Roots of the generator pairing; empty means no characteristic surface.
    CharacteristicTori(CharacteristicTori),
    /// Nodal set of the basic function on `S^2`.
    SphereNodal(S2NodalReport),
    /// Nodal set of the `T^2` eigenfunction behind a torus field.
    TorusNodal(NodalCurveSet),
    /// The lift of `V_k / |b|` to `R^3` is the standard tight form after an
    /// orthogonal change of frame.
    LiftFrame { frame_defect: f64, form_defect: f64 },
    /// A verified contact path to a model form.
    Homotopy(NamedHomotopyReport),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub verdict: Verdict,
    pub min_norm: f64,
    pub certificate: Certificate,
}

fn nonvanishing_axisymmetric(v: &AxisymmetricField) -> Result<f64> {
    let m = v.min_norm(NONVANISHING_SAMPLES).value;
    if m <= 0.0 || !m.is_finite() {
        return Err(Error::VanishingField { norm: m });
    }
    Ok(m)
}

/// Circle-invariant classification on `S^3`: tight exactly when the
/// characteristic surface is empty.
pub fn giroux_classify_sphere(v: &SphereField) -> Result<Classification> {
    match v {
        SphereField::Axisymmetric(a) => {
            let min_norm = nonvanishing_axisymmetric(a)?;
            let tori = characteristic_surface_s3(a)?;
            let verdict = if tori.s_roots.is_empty() {
                Verdict::Tight
            } else {
                Verdict::Overtwisted
            };
            Ok(Classification {
                verdict,
                min_norm,
                certificate: Certificate::CharacteristicTori(tori),
            })
        }
        SphereField::S1Invariant(s) => {
            let report = s2_nodal_regularity(s.fbar(), 128);
            let min_norm = crate::sphere_fields::min_norm_on_grid(s, 48).value;
            if min_norm <= 0.0 {
                return Err(Error::VanishingField { norm: min_norm });
            }
            let verdict = if !report.nonempty {
                Verdict::Tight
            } else if report.margin > IRREGULAR_THRESHOLD {
                Verdict::Overtwisted
            } else {
                Verdict::Inconclusive
            };
            Ok(Classification {
                verdict,
                min_norm,
                certificate: Certificate::SphereNodal(report),
            })
        }
        SphereField::Kl(kl) => {
            let min_norm = crate::sphere_fields::min_norm_on_grid(kl, 64).value;
            let report = verify_named_homotopy(&NamedHomotopy::KlFamily { k: kl.k, l: kl.l }, 16, 11)?;
            // R . V = (L z + K (1 - z)) / D has no zero in (0, 1) iff K L > 0
            let verdict = if kl.k * kl.l > 0.0 && report.margin > 0.0 {
                Verdict::Tight
            } else {
                Verdict::Inconclusive
            };
            Ok(Classification {
                verdict,
                min_norm,
                certificate: Certificate::Homotopy(report),
            })
        }
        SphereField::NonAxisymmetric(_) => Err(Error::Inapplicable(
            "field is not invariant under a circle action".into(),
        )),
    }
}

/// Classification on `T^3` for plane waves (tight) and for fields built from
/// a `T^2` eigenfunction (overtwisted when the nodal set certifies it,
/// otherwise inconclusive).
pub fn giroux_classify_torus(v: &TorusField, nodal_grid: usize) -> Result<Classification> {
    match v.origin() {
        TorusOrigin::Wave(spec) => {
            let (frame_defect, form_defect) = lift_frame_defects(spec, v);
            let min_norm = norm(&spec.b());
            let verdict = if frame_defect < 1e-12 && form_defect < 1e-12 {
                Verdict::Tight
            } else {
                Verdict::Inconclusive
            };
            Ok(Classification {
                verdict,
                min_norm,
                certificate: Certificate::LiftFrame {
                    frame_defect,
                    form_defect,
                },
            })
        }
        TorusOrigin::Ansatz(f) => {
            let min_norm = torus_grid(32)
                .iter()
                .map(|p| norm(&v.eval(p)))
                .fold(f64::INFINITY, f64::min);
            if min_norm <= 0.0 {
                return Err(Error::VanishingField { norm: min_norm });
            }
            let curves = extract_nodal_set(f, nodal_grid)?;
            let verdict = if curves.certifies_overtwisted() {
                Verdict::Overtwisted
            } else {
                Verdict::Inconclusive
            };
            Ok(Classification {
                verdict,
                min_norm,
                certificate: Certificate::TorusNodal(curves),
            })
        }
        TorusOrigin::Other => Err(Error::Inapplicable(
            "torus field is neither a plane wave nor built from a T^2 eigenfunction".into(),
        )),
    }
}

/// With `e1 = b x k / (|b||k|)`, `e2 = b / |b|`, `e3 = k / |k|`, checks that
/// the frame is orthonormal and that `V_k / |b| = cos(|k| y3) e2 + sin(|k| y3) e1`
/// with `y3 = e3 . x`, so the lifted form is `cos(|k| y3) dy2 + sin(|k| y3) dy1`.
fn lift_frame_defects(spec: &WaveSpec, v: &TorusField) -> (f64, f64) {
    let k = spec.k.map(|c| c as f64);
    let b = spec.b();
    let (kn, bn) = (norm(&k), norm(&b));
    let e2 = scale(1.0 / bn, &b);
    let e3 = scale(1.0 / kn, &k);
    let e1 = cross(&e2, &e3);
    let frame = [e1, e2, e3];
    let mut frame_defect: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            let target = if i == j { 1.0 } else { 0.0 };
            frame_defect = frame_defect.max((dot(&frame[i], &frame[j]) - target).abs());
        }
    }
    let mut form_defect: f64 = 0.0;
    for p in torus_grid(6) {
        let y3 = dot(&e3, &p.x);
        let (s, c) = (kn * y3).sin_cos();
        let model = [s * e1[0] + c * e2[0], s * e1[1] + c * e2[1], s * e1[2] + c * e2[2]];
        let d = sub(&scale(1.0 / bn, &v.eval(&p)), &model);
        form_defect = form_defect.max(norm(&d));
    }
    (frame_defect, form_defect)
}

/// A point where two fields are aligned.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlignedPoint {
    pub coords: Vec3,
    /// `|V x W| / (|V||W|)` at the point.
    pub sine: f64,
    /// `|V| / |W|`.
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CollinearitySets {
    pub tol: f64,
    pub c_plus: Vec<AlignedPoint>,
    pub c_minus: Vec<AlignedPoint>,
}

impl CollinearitySets {
    pub fn is_empty(&self) -> bool {
        self.c_plus.is_empty() && self.c_minus.is_empty()
    }
}

fn alignment(v: &Vec3, w: &Vec3) -> (f64, f64, f64) {
    let (nv, nw) = (norm(v), norm(w));
    (norm(&cross(v, w)) / (nv * nw), dot(v, w), nv / nw)
}

/// Scans lines of a grid in the last coordinate, refines each local minimum
/// of the alignment sine by golden section, and keeps those below `tol`.
fn scan_lines<E>(eval: E, bases: &[(f64, f64)], range: (f64, f64, bool), n: usize, tol: f64) -> CollinearitySets
where
    E: Fn(f64, f64, f64) -> (Vec3, Vec3, Vec3) + Sync,
{
    use rayon::prelude::*;
    let (lo, hi, periodic) = range;
    let step = if periodic { (hi - lo) / n as f64 } else { (hi - lo) / (n - 1) as f64 };
    let at = |i: usize| if !periodic && i == n - 1 { hi } else { lo + step * i as f64 };
    let found: Vec<(bool, AlignedPoint)> = bases
        .par_iter()
        .flat_map_iter(|&(a, b)| {
            let sines: Vec<f64> = (0..n)
                .map(|i| {
                    let (_, v, w) = eval(a, b, at(i));
                    alignment(&v, &w).0
                })
                .collect();
            let mut out = Vec::new();
            for i in 0..n {
                let (prev, next) = if periodic {
                    (sines[(i + n - 1) % n], sines[(i + 1) % n])
                } else {
                    (
                        if i == 0 { f64::INFINITY } else { sines[i - 1] },
                        if i == n - 1 { f64::INFINITY } else { sines[i + 1] },
                    )
                };
                if !(sines[i] <= prev && sines[i] <= next) || sines[i] > 0.5 {
                    continue;
                }
                let x = at(i);
                let (l, r) = if periodic {
                    (x - step, x + step)
                } else {
                    ((x - step).max(lo), (x + step).min(hi))
                };
                let (xr, sr) = golden_section(|t| alignment(&eval(a, b, t).1, &eval(a, b, t).2).0, l, r, 1e-13);
                let (xb, sb) = if sr < sines[i] { (xr, sr) } else { (x, sines[i]) };
                if sb < tol {
                    let (coords, v, w) = eval(a, b, xb);
                    let (sine, d, ratio) = alignment(&v, &w);
                    out.push((d > 0.0, AlignedPoint { coords, sine, ratio }));
                }
            }
            out
        })
        .collect();
    let mut sets = CollinearitySets {
        tol,
        c_plus: Vec::new(),
        c_minus: Vec::new(),
    };
    for (plus, p) in found {
        if plus {
            sets.c_plus.push(p);
        } else {
            sets.c_minus.push(p);
        }
    }
    sets
}

/// Aligned points of two fields on `S^3`, scanning lines in `s` (both Hopf
/// link circles included) over an `n_phi x n_phi` angular grid.
pub fn collinearity_sets_s3<V, W>(v: &V, w: &W, n_s: usize, n_phi: usize, tol: f64) -> CollinearitySets
where
    V: S3Field + ?Sized,
    W: S3Field + ?Sized,
{
    let bases: Vec<(f64, f64)> = periodic_nodes(n_phi)
        .flat_map(|a| periodic_nodes(n_phi).map(move |b| (a, b)))
        .collect();
    scan_lines(
        |a, b, s| {
            let p = HopfPoint::raw(s.clamp(0.0, FRAC_PI_2), a, b);
            ([p.s, p.phi1, p.phi2], v.eval(&p).to_array(), w.eval(&p).to_array())
        },
        &bases,
        (0.0, FRAC_PI_2, false),
        n_s.max(3),
        tol,
    )
}

/// Aligned points of two fields on `T^3`, scanning lines in `x3`.
pub fn collinearity_sets_t3<V, W>(v: &V, w: &W, n: usize, tol: f64) -> CollinearitySets
where
    V: T3Field + ?Sized,
    W: T3Field + ?Sized,
{
    let bases: Vec<(f64, f64)> = periodic_nodes(n)
        .flat_map(|a| periodic_nodes(n).map(move |b| (a, b)))
        .collect();
    scan_lines(
        |a, b, c| {
            let p = TorusPoint { x: [a, b, c] };
            (p.x, v.eval(&p), w.eval(&p))
        },
        &bases,
        (0.0, TAU, true),
        n.max(3),
        tol,
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlignmentConstant {
    /// `min |V| / |W|` over the aligned points; `+inf` when never aligned.
    pub value: f64,
    pub never_aligned: bool,
    pub points: usize,
}

pub fn compute_c0(sets: &CollinearitySets) -> AlignmentConstant {
    let points = sets.c_plus.len() + sets.c_minus.len();
    let value = sets
        .c_plus
        .iter()
        .chain(&sets.c_minus)
        .map(|p| p.ratio)
        .fold(f64::INFINITY, f64::min);
    AlignmentConstant {
        value,
        never_aligned: points == 0,
        points,
    }
}

/// Path between the dual forms `alpha` of `V` and `beta` of `W`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum HomotopyFamily {
    /// `t alpha + (1 - t) beta`.
    Linear,
    /// `alpha + c t beta`.
    Shifted { c: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomotopyCertificate {
    /// Minimum of `|lambda| |alpha_t|^2` over the sample points and all `t` in `[0, 1]`.
    pub margin: f64,
    pub t_at_min: f64,
    /// `1` for a path to `beta`, `-1` for a path to `-beta`. The linear path
    /// needs `C_-` empty; when only `C_+` is empty the path to `-beta` works
    /// and reaches the same plane field.
    pub beta_sign: i8,
    pub points: usize,
    pub grid_spacing: f64,
    pub caveat: String,
}

/// Exact minimum over `t in [0, 1]` of `|alpha_t|^2` for one pair of
/// covectors; the path is a quadratic in `t`.
pub fn path_minimum(a: &Vec3, b: &Vec3, family: HomotopyFamily) -> (f64, f64) {
    let (aa, bb, ab) = (dot(a, a), dot(b, b), dot(a, b));
    let (q2, q1, q0) = match family {
        HomotopyFamily::Linear => (aa + bb - 2.0 * ab, 2.0 * ab - 2.0 * bb, bb),
        HomotopyFamily::Shifted { c } => (c * c * bb, 2.0 * c * ab, aa),
    };
    let q = |t: f64| (q2 * t + q1) * t + q0;
    let mut best = (q(0.0), 0.0);
    for t in [1.0, if q2 > 0.0 { -q1 / (2.0 * q2) } else { -1.0 }] {
        if (0.0..=1.0).contains(&t) && q(t) < best.0 {
            best = (q(t), t);
        }
    }
    best
}

fn check_eigenvalues(lv: f64, lw: f64) -> Result<f64> {
    if (lv - lw).abs() > 1e-12 * lv.abs().max(1.0) {
        return Err(Error::EigenvalueMismatch(lv, lw));
    }
    Ok(lv.abs())
}

fn homotopy_over(pairs: Vec<(Vec3, Vec3)>, lambda: f64, family: HomotopyFamily, spacing: f64) -> HomotopyCertificate {
    let signs: &[i8] = match family {
        HomotopyFamily::Linear => &[1, -1],
        HomotopyFamily::Shifted { .. } => &[1],
    };
    let mut best: Option<(f64, f64, i8)> = None;
    for &sign in signs {
        let (mut margin, mut t_at_min) = (f64::INFINITY, 0.0);
        for (a, b) in &pairs {
            let (q, t) = path_minimum(a, &scale(f64::from(sign), b), family);
            if q < margin {
                margin = q;
                t_at_min = t;
            }
        }
        if best.is_none_or(|(m, _, _)| margin > m) {
            best = Some((margin, t_at_min, sign));
        }
    }
    let (margin, t_at_min, beta_sign) = best.expect("at least one sign");
    HomotopyCertificate {
        margin: lambda * margin,
        t_at_min,
        beta_sign,
        points: pairs.len(),
        grid_spacing: spacing,
        caveat: format!(
            "positive on the sampled points with t minimized exactly; points within {spacing:.3e} of the samples are not covered"
        ),
    }
}

/// Linear contact homotopy between the duals of two eigenfields on `S^3`
/// with the same eigenvalue, on the closed `n^3` Hopf grid.
pub fn check_linear_homotopy_s3<V, W>(
    v: &V,
    lambda_v: f64,
    w: &W,
    lambda_w: f64,
    n: usize,
    family: HomotopyFamily,
) -> Result<HomotopyCertificate>
where
    V: S3Field + ?Sized,
    W: S3Field + ?Sized,
{
    let lambda = check_eigenvalues(lambda_v, lambda_w)?;
    let pairs = hopf_grid_closed(n, n)
        .iter()
        .map(|p| (v.eval(p).to_array(), w.eval(p).to_array()))
        .collect();
    Ok(homotopy_over(pairs, lambda, family, TAU / n as f64))
}

pub fn check_linear_homotopy_t3<V, W>(
    v: &V,
    lambda_v: f64,
    w: &W,
    lambda_w: f64,
    n: usize,
    family: HomotopyFamily,
) -> Result<HomotopyCertificate>
where
    V: T3Field + ?Sized,
    W: T3Field + ?Sized,
{
    let lambda = check_eigenvalues(lambda_v, lambda_w)?;
    let pairs = torus_grid(n).iter().map(|p| (v.eval(p), w.eval(p))).collect();
    Ok(homotopy_over(pairs, lambda, family, TAU / n as f64))
}

/// Explicit contact paths with closed-form contact volumes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum NamedHomotopy {
    /// `alpha_t = -(3t/sqrt 2) sin x1 dx1 + sqrt(t+1) sin x1 dx2 + cos x1 dx3`
    /// on `T^3`, from `sin x1 dx2 + cos x1 dx3` to the pullback of the
    /// `k = (1,1,0)` wave form by `(2x1 - x2, -x1 + x2, x3)`.
    Sqrt2Class,
    /// `(A cos^2 s dphi1 + B sin^2 s dphi2) / (A^2 cos^2 s + B^2 sin^2 s)`
    /// with `A = 1 + t(l - 1)`, `B = 1 + t(k - 1)`, from the standard form to
    /// the dual of the `(k, l)` field.
    KlFamily { k: f64, l: f64 },
    /// `alpha_t = (cos th - sin th) dx1 / sqrt 2 - (cos th + sin th) dx2 / sqrt 2`
    /// with `th = 2 x3 - t cos x3`, ending at the shear field with profile
    /// `-2x + cos x`.
    ShearProfile,
}

pub const NAMED_HOMOTOPIES: [&str; 3] = ["t3_sqrt2_class", "s3_kl_family(k,l)", "shear_profile"];

impl NamedHomotopy {
    pub fn parse(name: &str) -> Result<Self> {
        let name = name.trim();
        if name == "t3_sqrt2_class" {
            return Ok(Self::Sqrt2Class);
        }
        if name == "shear_profile" {
            return Ok(Self::ShearProfile);
        }
        if let Some(rest) = name.strip_prefix("s3_kl_family") {
            if rest.is_empty() {
                return Ok(Self::KlFamily { k: 1.0, l: 1.0 });
            }
            let inner = rest
                .strip_prefix('(')
                .and_then(|r| r.strip_suffix(')'))
                .ok_or_else(|| Error::UnknownName(name.to_string()))?;
            let parts: Vec<&str> = inner.split(',').collect();
            if parts.len() == 2 {
                let k = parts[0].trim().parse::<f64>();
                let l = parts[1].trim().parse::<f64>();
                if let (Ok(k), Ok(l)) = (k, l) {
                    return Ok(Self::KlFamily { k, l });
                }
            }
        }
        Err(Error::UnknownName(name.to_string()))
    }

    pub fn name(&self) -> String {
        match self {
            Self::Sqrt2Class => "t3_sqrt2_class".into(),
            Self::KlFamily { k, l } => format!("s3_kl_family({k},{l})"),
            Self::ShearProfile => "shear_profile".into(),
        }
    }
}

struct Sqrt2Path {
    t: f64,
}

impl T3Field for Sqrt2Path {
    fn eval(&self, p: &TorusPoint) -> Vec3 {
        let (s, c) = p.x[0].sin_cos();
        [-3.0 * self.t * FRAC_1_SQRT_2 * s, (self.t + 1.0).sqrt() * s, c]
    }

    fn exact_curl(&self, p: &TorusPoint) -> Option<Vec3> {
        let (s, c) = p.x[0].sin_cos();
        Some([0.0, s, (self.t + 1.0).sqrt() * c])
    }
}

struct ShearPath {
    t: f64,
}

impl ShearPath {
    fn angle(&self, x3: f64) -> (f64, f64) {
        (2.0 * x3 - self.t * x3.cos(), 2.0 + self.t * x3.sin())
    }
}

impl T3Field for ShearPath {
    fn eval(&self, p: &TorusPoint) -> Vec3 {
        let (s, c) = self.angle(p.x[2]).0.sin_cos();
        [FRAC_1_SQRT_2 * (c - s), -FRAC_1_SQRT_2 * (c + s), 0.0]
    }

    fn exact_curl(&self, p: &TorusPoint) -> Option<Vec3> {
        Some(scale(self.angle(p.x[2]).1, &self.eval(p)))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedHomotopyReport {
    pub name: String,
    /// Minimum contact volume over the grid and the `t` samples.
    pub margin: f64,
    pub t_at_min: f64,
    /// Largest deviation of the contact volume from its closed form.
    pub closed_form_error: f64,
    /// Largest deviation between the analytic and the differenced volume.
    pub fd_error: f64,
    /// Largest deviation of the path's endpoint from the form it should reach.
    pub endpoint_error: f64,
}

fn t_values(n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
}

/// Pullback of the `k = (1,1,0)`, `b = (0,0,1)` wave form by
/// `Psi(x) = (2x1 - x2, -x1 + x2, x3)`: `(D Psi)^T eta(Psi(x))`.
pub fn sqrt2_pullback(x: &Vec3) -> Result<Vec3> {
    let eta = build_vk(&WaveSpec::from_integers([1, 1, 0], [0, 0, 1])?);
    let y = [2.0 * x[0] - x[1], -x[0] + x[1], x[2]];
    let e = eta.eval_at(&y);
    Ok([2.0 * e[0] - e[1], -e[0] + e[1], e[2]])
}

/// Contact volume along a named path on an `n`-point-per-axis grid and
/// `n_t` values of `t`.
pub fn verify_named_homotopy(h: &NamedHomotopy, n: usize, n_t: usize) -> Result<NamedHomotopyReport> {
    let ts = t_values(n_t);
    let mut report = NamedHomotopyReport {
        name: h.name(),
        margin: f64::INFINITY,
        t_at_min: 0.0,
        closed_form_error: 0.0,
        fd_error: 0.0,
        endpoint_error: 0.0,
    };
    let mut record = |t: f64, vol: f64, closed: f64, fd: f64| {
        if vol < report.margin {
            report.margin = vol;
            report.t_at_min = t;
        }
        report.closed_form_error = report.closed_form_error.max((vol - closed).abs());
        report.fd_error = report.fd_error.max((vol - fd).abs());
    };
    let fd = FdOptions::default();
    match *h {
        NamedHomotopy::Sqrt2Class | NamedHomotopy::ShearProfile => {
            let grid = torus_grid(n);
            for &t in &ts {
                for p in &grid {
                    let (vol, closed, fd_vol) = if *h == NamedHomotopy::Sqrt2Class {
                        let a = Sqrt2Path { t };
                        (contact_volume_t3(&a, p), (t + 1.0).sqrt(), dot(&a.eval(p), &curl_t3_fd(&a, p, fd)))
                    } else {
                        let a = ShearPath { t };
                        (
                            contact_volume_t3(&a, p),
                            2.0 + t * p.x[2].sin(),
                            dot(&a.eval(p), &curl_t3_fd(&a, p, fd)),
                        )
                    };
                    record(t, vol, closed, fd_vol);
                }
            }
            let mut endpoint: f64 = 0.0;
            for p in &grid {
                let (got, want) = if *h == NamedHomotopy::Sqrt2Class {
                    (Sqrt2Path { t: 1.0 }.eval(p), sqrt2_pullback(&p.x)?)
                } else {
                    (ShearPath { t: 1.0 }.eval(p), ShearBeltrami::standard().eval(p))
                };
                endpoint = endpoint.max(norm(&sub(&got, &want)));
            }
            report.endpoint_error = endpoint;
        }
        NamedHomotopy::KlFamily { k, l } => {
            let closed_grid = hopf_grid_closed(n, n);
            let open_grid = hopf_grid_open(n.clamp(2, 8));
            for &t in &ts {
                let (a, b) = (1.0 + t * (l - 1.0), 1.0 + t * (k - 1.0));
                let field = SphereField::Kl(KlField::new(b, a)?);
                for p in &closed_grid {
                    let vol = contact_volume_s3(&field, p).expect("Beltrami factor known");
                    // |V|^2 = 1 / D and f = 2KL / D
                    let z = p.z();
                    let d = a * a * z + b * b * (1.0 - z);
                    record(t, vol, 2.0 * a * b / (d * d), vol);
                }
                for p in &open_grid {
                    let vol = contact_volume_s3(&field, p).expect("Beltrami factor known");
                    let fd_vol = contact_volume_s3_fd(&field, p, fd)?;
                    let z = p.z();
                    let d = a * a * z + b * b * (1.0 - z);
                    record(t, vol, 2.0 * a * b / (d * d), fd_vol);
                }
            }
            // t = 0 is the Hopf field R, t = 1 the (k, l) field
            let start = KlField::new(1.0, 1.0)?;
            let end = KlField::new(k, l)?;
            let r = AxisymmetricField::hopf();
            let mut endpoint: f64 = 0.0;
            for p in &closed_grid {
                let d0 = sub(&start.eval(p).to_array(), &r.eval(p).to_array());
                let (a, b) = (l, k);
                let d1 = sub(
                    &KlField::new(b, a)?.eval(p).to_array(),
                    &end.eval(p).to_array(),
                );
                endpoint = endpoint.max(norm(&d0)).max(norm(&d1));
            }
            report.endpoint_error = endpoint;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere_fields::{builtin_example, NonAxisymmetricExample};
    use crate::torus_fields::{aligned_unit_pair, build_from_t2_eigenfunction, standard_form};
    use std::f64::consts::FRAC_PI_4;

    fn vm(m: i32) -> AxisymmetricField {
        AxisymmetricField::build_vm(m).unwrap()
    }

    #[test]
    fn hopf_volume_is_two() {
        let r = SphereField::Axisymmetric(AxisymmetricField::hopf());
        for p in hopf_grid_open(4) {
            assert!((contact_volume_s3(&r, &p).unwrap() - 2.0).abs() < 1e-14);
            assert!((contact_volume_s3_fd(&r, &p, FdOptions::default()).unwrap() - 2.0).abs() < 1e-8);
        }
    }

    #[test]
    fn v2_volume_matches_norm() {
        let v = SphereField::Axisymmetric(vm(2));
        let a = vm(2);
        for p in hopf_grid_open(5) {
            let exact = 4.0 * a.norm_sq_at(p.s);
            assert!((contact_volume_s3(&v, &p).unwrap() - exact).abs() < 1e-13);
            assert!((contact_volume_s3_fd(&v, &p, FdOptions::default()).unwrap() - exact).abs() < 1e-8);
        }
    }

    #[test]
    fn one_form_duality_and_coordinates() {
        let v = vm(3);
        let p = HopfPoint::new(0.3, 0.2, 1.1).unwrap();
        let a = OneForm::dual_s3(&v, &p);
        let comps = v.eval(&p).to_array();
        assert!((a.pair(&comps) - v.norm_sq_at(0.3)).abs() < 1e-14);
        // the Hopf field's form is cos^2 s dphi1 + sin^2 s dphi2
        let r = OneForm::dual_s3(&AxisymmetricField::hopf(), &p);
        let c = r.hopf_coordinates(&p).unwrap();
        assert!(c[0].abs() < 1e-15);
        assert!((c[1] - 0.3f64.cos().powi(2)).abs() < 1e-15);
        assert!((c[2] - 0.3f64.sin().powi(2)).abs() < 1e-15);
    }

    #[test]
    fn characteristic_tori() {
        let t2 = characteristic_surface_s3(&vm(2)).unwrap();
        assert_eq!(t2.s_roots.len(), 1);
        assert!((t2.s_roots[0] - FRAC_PI_4).abs() < 1e-10);
        let t3 = characteristic_surface_s3(&vm(3)).unwrap();
        // 1/2 - 3z + 3z^2 = 0
        assert_eq!(t3.sturm_count, 2);
        for z in &t3.z_roots {
            assert!((0.5 - 3.0 * z + 3.0 * z * z).abs() < 1e-14);
        }
        assert!(characteristic_surface_s3(&AxisymmetricField::hopf()).unwrap().s_roots.is_empty());
        assert!(characteristic_surface_s3(&AxisymmetricField::anti_hopf()).unwrap().s_roots.is_empty());
    }

    #[test]
    fn classify_sphere_fields() {
        for m in (2..=20).chain(-20..=-2) {
            let c = giroux_classify_sphere(&SphereField::Axisymmetric(vm(m))).unwrap();
            assert_eq!(c.verdict, Verdict::Overtwisted, "m = {m}");
        }
        for f in [AxisymmetricField::hopf(), AxisymmetricField::anti_hopf()] {
            let c = giroux_classify_sphere(&SphereField::Axisymmetric(f)).unwrap();
            assert_eq!(c.verdict, Verdict::Tight);
        }
        assert!(matches!(
            giroux_classify_sphere(&SphereField::NonAxisymmetric(NonAxisymmetricExample)),
            Err(Error::Inapplicable(_))
        ));
        let kl = giroux_classify_sphere(&SphereField::Kl(KlField::new(2.0, 3.0).unwrap())).unwrap();
        assert_eq!(kl.verdict, Verdict::Tight);
    }

    #[test]
    fn classify_s1_invariant() {
        let y = crate::nodal::seeded_s2(1, 4).unwrap();
        let v = crate::sphere_fields::s1_invariant_field(&y, 1).unwrap();
        let c = giroux_classify_sphere(&SphereField::S1Invariant(v)).unwrap();
        assert_eq!(c.verdict, Verdict::Overtwisted);
    }

    #[test]
    fn classify_torus_fields() {
        let eta = standard_form(5).unwrap();
        assert_eq!(giroux_classify_torus(&eta, 64).unwrap().verdict, Verdict::Tight);
        let wave = build_vk(&WaveSpec::from_integers([1, 2, 2], [2, -1, 0]).unwrap());
        assert_eq!(giroux_classify_torus(&wave, 64).unwrap().verdict, Verdict::Tight);
        // a single direction: parallel lines, never a disk
        let f = crate::nodal::T2Eigenfunction::new(1, vec![crate::nodal::T2Mode { k: [1, 0], a: 1.0, b: 0.3 }]).unwrap();
        let c = giroux_classify_torus(&build_from_t2_eigenfunction(&f), 64).unwrap();
        assert_eq!(c.verdict, Verdict::Inconclusive);
        let (v, _) = aligned_unit_pair(1).unwrap();
        let other = TorusField::new(v.modes().to_vec(), v.eigenvalue());
        assert!(giroux_classify_torus(&other, 64).is_err());
    }

    #[test]
    fn hopf_pair_collinearity() {
        let r = AxisymmetricField::hopf();
        let rp = AxisymmetricField::anti_hopf();
        let sets = collinearity_sets_s3(&r, &rp, 33, 8, ALIGNMENT_TOL);
        assert!(!sets.c_plus.is_empty() && !sets.c_minus.is_empty());
        assert!(sets.c_plus.iter().all(|p| p.coords[0] < 1e-6));
        assert!(sets.c_minus.iter().all(|p| (p.coords[0] - FRAC_PI_2).abs() < 1e-6));
        assert!((compute_c0(&sets).value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn consecutive_fields_align_on_link() {
        for m in 2..=5 {
            let sets = collinearity_sets_s3(&vm(m), &vm(m + 1), 65, 6, ALIGNMENT_TOL);
            assert!(!sets.c_plus.is_empty() && !sets.c_minus.is_empty());
            assert!(sets.c_plus.iter().all(|p| (p.coords[0] - FRAC_PI_2).abs() < 1e-6), "m={m}");
            assert!(sets.c_minus.iter().all(|p| p.coords[0] < 1e-6), "m={m}");
        }
        let c0 = compute_c0(&collinearity_sets_s3(&vm(2), &vm(3), 65, 6, ALIGNMENT_TOL));
        assert!((c0.value - 4.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn torus_pair_c0() {
        let (v, w) = aligned_unit_pair(2).unwrap();
        let sets = collinearity_sets_t3(&v, &w, 32, ALIGNMENT_TOL);
        assert!(!sets.c_plus.is_empty() && !sets.c_minus.is_empty());
        assert!((compute_c0(&sets).value - 1.0).abs() < 1e-12);
        let h = check_linear_homotopy_t3(&v, 2.0, &w, 2.0, 16, HomotopyFamily::Shifted { c: 0.5 }).unwrap();
        assert!((h.margin - 2.0 * 0.25).abs() < 1e-9, "{}", h.margin);
    }

    #[test]
    fn v2_and_nonaxisymmetric_homotopy() {
        let v2 = vm(2);
        let n = builtin_example("nonaxisymmetric").unwrap();
        let h = check_linear_homotopy_s3(&v2, 4.0, &n, 4.0, 24, HomotopyFamily::Linear).unwrap();
        assert!(h.margin > 0.0);
        assert_eq!(h.beta_sign, -1);
        let swapped = check_linear_homotopy_s3(&n, 4.0, &v2, 4.0, 24, HomotopyFamily::Linear).unwrap();
        assert!((h.margin - swapped.margin).abs() < 1e-12);
        let sets = collinearity_sets_s3(&v2, &n, 65, 16, 1e-6);
        assert!(sets.c_plus.is_empty());
        assert!(matches!(
            check_linear_homotopy_s3(&v2, 4.0, &vm(3), 6.0, 8, HomotopyFamily::Linear),
            Err(Error::EigenvalueMismatch(..))
        ));
    }

    #[test]
    fn constant_path_margin() {
        let v = vm(2);
        let h = check_linear_homotopy_s3(&v, 4.0, &v, 4.0, 33, HomotopyFamily::Linear).unwrap();
        assert!((h.margin - 4.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn path_minimum_is_exact() {
        let a = [1.0, 0.0, 0.0];
        let b = [-1.0, 0.0, 0.0];
        let (q, t) = path_minimum(&a, &b, HomotopyFamily::Linear);
        assert!(q.abs() < 1e-15 && (t - 0.5).abs() < 1e-15);
    }

    #[test]
    fn named_paths() {
        let r = verify_named_homotopy(&NamedHomotopy::Sqrt2Class, 8, 11).unwrap();
        assert!((r.margin - 1.0).abs() < 1e-15 && r.t_at_min == 0.0);
        assert!(r.closed_form_error < 1e-12 && r.endpoint_error < 1e-14);
        assert!(r.fd_error < 1e-8);
        let s = verify_named_homotopy(&NamedHomotopy::ShearProfile, 8, 11).unwrap();
        assert!(s.closed_form_error < 1e-12 && s.endpoint_error < 1e-14 && s.margin >= 1.0 - 1e-12);
        let kl = verify_named_homotopy(&NamedHomotopy::KlFamily { k: 1.0, l: 1.0 }, 8, 5).unwrap();
        assert!((kl.margin - 2.0).abs() < 1e-12 && kl.fd_error < 1e-7);
        let kl = verify_named_homotopy(&NamedHomotopy::parse("s3_kl_family(2,3)").unwrap(), 8, 5).unwrap();
        assert!(kl.margin > 0.0 && kl.closed_form_error < 1e-12 && kl.fd_error < 1e-6);
        assert!(NamedHomotopy::parse("bogus").is_err());
    }

    #[test]
    fn torus_volume_on_wave() {
        let v = standard_form(3).unwrap();
        for p in torus_grid(5) {
            assert!((contact_volume_t3(&v, &p) - 3.0).abs() < 1e-13);
        }
    }
}
