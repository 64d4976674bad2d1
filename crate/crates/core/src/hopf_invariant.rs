//! Hopf invariants of axisymmetric Gauss maps `S^3 -> S^2`.
//!
//! An axisymmetric field `V = F R + G R'` has Gauss map
//! `(a(s), b(s) e^{i(phi1 + phi2 - pi/2)})` in the frame `{R, X1, X2}`, with
//! `a = (F + cos 2s G) / |V|` and `b = sin 2s G / |V|`. The pullback of the
//! area form is `w(s) (ds ^ dphi1 + ds ^ dphi2)` with `w = -a'`, and a
//! primitive is `c1 dphi1 + c2 dphi2` with `c1' = c2' = w`,
//! `c1(pi/2) = 0`, `c2(0) = 0`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::contact::{collinearity_sets_s3, ALIGNMENT_TOL};
use crate::manifold::volume_coefficient;
use crate::quadrature::{periodic_nodes, CompositeRule, GaussLegendre};
use crate::sphere_fields::AxisymmetricField;
use crate::vec3::{cross, dot, norm, sub, Vec3, Vec4};
use crate::{Error, Result};

/// Quadrature nodes used by [`hopf_class_vm`] for its cross-check.
pub const DEFAULT_RESOLUTION: usize = 2048;

/// Distance to the nearest integer above which a result counts as under-resolved.
pub const INTEGRALITY_TOL: f64 = 0.01;

type ProfileFn = Arc<dyn Fn(f64) -> (f64, f64) + Send + Sync>;
type SlopeFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// The pair `(a(s), b(s))` on `[0, pi/2]` with `a^2 + b^2 = 1`.
#[derive(Clone)]
pub struct AxiProfile {
    eval: ProfileFn,
    slope: Option<SlopeFn>,
}

impl std::fmt::Debug for AxiProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AxiProfile")
            .field("analytic_slope", &self.slope.is_some())
            .finish()
    }
}

impl AxiProfile {
    /// A profile given by a function; `a'` is then differenced.
    pub fn from_fn<P>(p: P) -> Self
    where
        P: Fn(f64) -> (f64, f64) + Send + Sync + 'static,
    {
        Self {
            eval: Arc::new(p),
            slope: None,
        }
    }

    pub fn eval(&self, s: f64) -> (f64, f64) {
        (self.eval)(s)
    }

    /// `a'(s)`, analytic when known.
    pub fn slope(&self, s: f64) -> f64 {
        if let Some(d) = &self.slope {
            return d(s);
        }
        // one-sided near the ends so the stencil stays in [0, pi/2]
        let h = 1e-4;
        let c = s.clamp(2.0 * h, FRAC_PI_2 - 2.0 * h);
        let a = |x: f64| self.eval(x).0;
        let d1 = (a(c + h) - a(c - h)) / (2.0 * h);
        let d2 = (a(c + 2.0 * h) - a(c - 2.0 * h)) / (4.0 * h);
        let base = (4.0 * d1 - d2) / 3.0;
        if c == s {
            base
        } else {
            // second-order Taylor correction from the clamped centre
            let dd = (a(c + h) - 2.0 * a(c) + a(c - h)) / (h * h);
            base + dd * (s - c)
        }
    }

    /// Largest `|a^2 + b^2 - 1|` on `n` samples.
    pub fn unit_defect(&self, n: usize) -> f64 {
        let n = n.max(2);
        (0..n)
            .map(|i| {
                let (a, b) = self.eval(FRAC_PI_2 * i as f64 / (n - 1) as f64);
                (a * a + b * b - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Reparametrizes by an increasing diffeomorphism `sigma` of `[0, pi/2]`.
    pub fn reparametrized<S>(&self, sigma: S) -> Self
    where
        S: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let inner = self.eval.clone();
        Self::from_fn(move |s| inner(sigma(s)))
    }
}

/// Gauss-map profile of an axisymmetric field, with analytic `a'`.
pub fn gauss_profile(v: &AxisymmetricField) -> Result<AxiProfile> {
    let m = v.min_norm(1025).value;
    if m <= 0.0 {
        return Err(Error::VanishingField { norm: m });
    }
    let (ve, vd) = (v.clone(), v.clone());
    let eval = move |s: f64| {
        let u = (2.0 * s).cos();
        let (f, g) = ve.coefficients_u(u);
        let h = (f * f + 2.0 * u * f * g + g * g).sqrt();
        ((f + u * g) / h, (2.0 * s).sin() * g / h)
    };
    let slope = move |s: f64| {
        let (s2, u) = (2.0 * s).sin_cos();
        let (f, g) = vd.coefficients_u(u);
        let (fz, gz) = vd.derivatives_u(u);
        // dz/ds = -sin 2s, du/ds = -2 sin 2s
        let (fs, gs, us) = (-s2 * fz, -s2 * gz, -2.0 * s2);
        let n = f + u * g;
        let ns = fs + us * g + u * gs;
        let h2 = f * f + 2.0 * u * f * g + g * g;
        let h2s = 2.0 * f * fs + 2.0 * us * f * g + 2.0 * u * (fs * g + f * gs) + 2.0 * g * gs;
        let h = h2.sqrt();
        ns / h - n * h2s / (2.0 * h * h2)
    };
    Ok(AxiProfile {
        eval: Arc::new(eval),
        slope: Some(Arc::new(slope)),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HopfInvariant {
    pub value: f64,
    pub rounded: i64,
    pub distance: f64,
}

/// Whitehead integral `(1/16 pi^2) int A ^ dA` with `resolution` nodes in `s`.
///
/// The angular integrals are exact (`4 pi^2`); the sign of
/// `ds ^ dphi1 ^ dphi2` relative to the volume form comes from
/// [`volume_coefficient`].
pub fn whitehead_integral(profile: &AxiProfile, resolution: usize) -> f64 {
    let order = 8;
    let panels = (resolution / order).max(1);
    let rule = CompositeRule::new(0.0, FRAC_PI_2, panels, order);
    let sub_rule = GaussLegendre::new(order);
    let w = |s: f64| -profile.slope(s);
    // c2(s) = int_0^s w: full panels plus a partial panel
    let mut panel_start = Vec::with_capacity(panels + 1);
    let mut acc = 0.0;
    panel_start.push(0.0);
    for win in rule.panel_edges.windows(2) {
        acc += rule.rule.integrate(win[0], win[1], w);
        panel_start.push(acc);
    }
    let total = acc;
    let mut integral = 0.0;
    for (p, win) in rule.panel_edges.windows(2).enumerate() {
        for (s, wt) in rule.rule.on_interval(win[0], win[1]) {
            let c2 = panel_start[p] + sub_rule.integrate(win[0], s, w);
            // c1(s) = -int_s^{pi/2} w
            let c1 = c2 - total;
            integral += wt * w(s) * (c2 - c1);
        }
    }
    let orientation = volume_coefficient(FRAC_PI_2 / 2.0).signum();
    orientation * 4.0 * PI * PI * integral / (16.0 * PI * PI)
}

/// Whitehead integral rounded to the nearest integer.
pub fn whitehead_hopf_invariant(profile: &AxiProfile, resolution: usize) -> Result<HopfInvariant> {
    let value = whitehead_integral(profile, resolution);
    let rounded = value.round();
    let distance = (value - rounded).abs();
    if distance > INTEGRALITY_TOL {
        return Err(Error::UnderResolved { value, distance });
    }
    Ok(HopfInvariant {
        value,
        rounded: rounded as i64,
        distance,
    })
}

/// Primitive coefficients `(c1(s), c2(s))` from the closed-form integrals
/// `c1 = a(pi/2) - a(s)` and `c2 = a(0) - a(s)`.
pub fn primitive_coefficients(profile: &AxiProfile, s: f64) -> (f64, f64) {
    let a = profile.eval(s).0;
    (profile.eval(FRAC_PI_2).0 - a, profile.eval(0.0).0 - a)
}

/// `(sign(m) (-1)^(m+1) - 1) / 2`.
pub fn hopf_class_formula(m: i32) -> i64 {
    let parity = if m.rem_euclid(2) == 0 { -1 } else { 1 };
    (i64::from(m.signum()) * parity - 1) / 2
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HopfClass {
    pub m: i32,
    pub formula: i64,
    pub quadrature: HopfInvariant,
    /// Class of the `t = 1` end of the homotopy family (positive `m` only):
    /// `0` when it is a multiple of `R`, `-1` for a multiple of `R'`.
    pub endpoint: Option<i64>,
}

/// Hopf class of `V_m`, cross-checked against the Whitehead quadrature and
/// the endpoint of the homotopy family.
pub fn hopf_class_vm(m: i32) -> Result<HopfClass> {
    if m.abs() < 2 {
        return Err(Error::InvalidArgument(format!("need |m| >= 2, got {m}")));
    }
    let formula = hopf_class_formula(m);
    let v = AxisymmetricField::build_vm(m)?;
    let quadrature = whitehead_hopf_invariant(&gauss_profile(&v)?, DEFAULT_RESOLUTION)?;
    let endpoint = if m > 0 {
        let end = AxisymmetricField::homotopy_vtm(m as u32, 1.0)?;
        match (end.f_exact().is_zero(), end.g_exact().is_zero()) {
            (false, true) => Some(0),
            (true, false) => Some(-1),
            _ => return Err(Error::Consistency("homotopy endpoint is not a multiple of R or R'".into())),
        }
    } else {
        None
    };
    if quadrature.rounded != formula || endpoint.is_some_and(|e| e != formula) {
        return Err(Error::Consistency(format!(
            "Hopf class of V_{m}: formula {formula}, quadrature {}, endpoint {endpoint:?}",
            quadrature.rounded
        )));
    }
    Ok(HopfClass {
        m,
        formula,
        quadrature,
        endpoint,
    })
}

/// Stereographic projection from the unit vector `pole`, in an orthonormal
/// basis of its complement.
fn stereographic(p: &Vec4, pole: &Vec4, basis: &[Vec4; 3]) -> Vec3 {
    let d = crate::vec3::dot4(p, pole);
    let q = [p[0] - d * pole[0], p[1] - d * pole[1], p[2] - d * pole[2], p[3] - d * pole[3]];
    let k = 1.0 / (1.0 - d);
    [0, 1, 2].map(|i| k * crate::vec3::dot4(&q, &basis[i]))
}

/// Gauss linking integral of two closed curves in `R^3`, by the trapezoid
/// rule with `n` points on each.
pub fn gauss_linking<A, B>(a: A, b: B, n: usize) -> f64
where
    A: Fn(f64) -> Vec3,
    B: Fn(f64) -> Vec3,
{
    let h = TAU / n as f64;
    let diff = |c: &dyn Fn(f64) -> Vec3, t: f64| {
        let e = 1e-4;
        let d1 = sub(&c(t + e), &c(t - e));
        let d2 = sub(&c(t + 2.0 * e), &c(t - 2.0 * e));
        [0, 1, 2].map(|i| (8.0 * d1[i] - d2[i]) / (12.0 * e))
    };
    let pa: Vec<(Vec3, Vec3)> = periodic_nodes(n).map(|t| (a(t), diff(&a, t))).collect();
    let pb: Vec<(Vec3, Vec3)> = periodic_nodes(n).map(|t| (b(t), diff(&b, t))).collect();
    let mut acc = 0.0;
    for (ra, da) in &pa {
        for (rb, db) in &pb {
            let r = sub(ra, rb);
            acc += dot(&r, &cross(da, db)) / norm(&r).powi(3);
        }
    }
    acc * h * h / (4.0 * PI)
}

/// Linking number of the two Hopf-link circles `{s = 0}` and `{s = pi/2}`
/// after stereographic projection from a point off both.
pub fn hopf_link_linking(n: usize) -> f64 {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let pole: Vec4 = [r * 0.6, r * 0.8, r, 0.0];
    // orthonormal complement of the pole
    let basis: [Vec4; 3] = [
        [0.8, -0.6, 0.0, 0.0],
        [r * 0.6, r * 0.8, -r, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ];
    let a = |t: f64| stereographic(&[t.cos(), t.sin(), 0.0, 0.0], &pole, &basis);
    let b = |t: f64| stereographic(&[0.0, 0.0, t.cos(), t.sin()], &pole, &basis);
    gauss_linking(a, b, n)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinkingCheck {
    pub m: i32,
    pub c_plus_points: usize,
    pub c_minus_points: usize,
    pub linking: f64,
    pub linking_magnitude: i64,
}

/// For `V_m, V_{m+1}`: positively aligned only on `{s = pi/2}`, negatively
/// aligned only on `{s = 0}`, and those circles link once.
pub fn collinearity_linking_check(m: i32) -> Result<LinkingCheck> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!("need m >= 2, got {m}")));
    }
    let v = AxisymmetricField::build_vm(m)?;
    let w = AxisymmetricField::build_vm(m + 1)?;
    let sets = collinearity_sets_s3(&v, &w, 129, 8, ALIGNMENT_TOL);
    let link_tol = 1e-6;
    for p in &sets.c_plus {
        if (p.coords[0] - FRAC_PI_2).abs() > link_tol {
            return Err(Error::OffLinkCollinearity { s: p.coords[0] });
        }
    }
    for p in &sets.c_minus {
        if p.coords[0] > link_tol {
            return Err(Error::OffLinkCollinearity { s: p.coords[0] });
        }
    }
    if sets.c_plus.is_empty() || sets.c_minus.is_empty() {
        return Err(Error::Consistency("expected alignment on both Hopf-link circles".into()));
    }
    let linking = hopf_link_linking(256);
    Ok(LinkingCheck {
        m,
        c_plus_points: sets.c_plus.len(),
        c_minus_points: sets.c_minus.len(),
        linking,
        linking_magnitude: linking.abs().round() as i64,
    })
}
