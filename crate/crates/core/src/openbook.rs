//! The planar open books supporting the contact structures of `-(3/2) V_2`
//! and `2 V_3`.
//!
//! `pi_minus(z1, z2) = z1 conj(z2) / |z1 conj(z2)|` with binding the negative
//! Hopf link, and
//! `pi_tilde(z1, z2) = z1 z2 (conj(z1) - conj(z2))^2 / (|z1 z2| |z1 - z2|^2)`
//! with a three-component binding.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};

use num_complex::Complex64;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::manifold::{s_samples_open, HopfPoint};
use crate::sphere_fields::AxisymmetricField;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OpenBookKind {
    PiMinus,
    PiTilde,
}

impl OpenBookKind {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "pi_minus" => Ok(Self::PiMinus),
            "pi_tilde" => Ok(Self::PiTilde),
            _ => Err(Error::UnknownName(name.to_string())),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::PiMinus => "pi_minus",
            Self::PiTilde => "pi_tilde",
        }
    }
}

/// A binding component `{s = s0, (phi1, phi2) = direction * t}`, oriented by
/// increasing `t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BindingCircle {
    pub s: f64,
    pub direction: [f64; 2],
}

impl BindingCircle {
    pub fn point(&self, t: f64) -> HopfPoint {
        HopfPoint {
            s: self.s,
            phi1: self.direction[0] * t,
            phi2: self.direction[1] * t,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OpenBook {
    pub kind: OpenBookKind,
    pub binding: Vec<BindingCircle>,
}

fn z_pair(p: &HopfPoint) -> (Complex64, Complex64) {
    let e = p.embedding();
    (Complex64::new(e[0], e[1]), Complex64::new(e[2], e[3]))
}

/// Distance below which a point counts as lying on the binding.
const BINDING_TOL: f64 = 1e-12;

impl OpenBook {
    pub fn new(kind: OpenBookKind) -> Self {
        let binding = match kind {
            OpenBookKind::PiMinus => vec![
                BindingCircle { s: 0.0, direction: [1.0, 0.0] },
                BindingCircle { s: FRAC_PI_2, direction: [0.0, -1.0] },
            ],
            OpenBookKind::PiTilde => vec![
                BindingCircle { s: 0.0, direction: [1.0, 0.0] },
                BindingCircle { s: FRAC_PI_4, direction: [-1.0, -1.0] },
                BindingCircle { s: FRAC_PI_2, direction: [0.0, 1.0] },
            ],
        };
        Self { kind, binding }
    }

    /// `-(3/2) V_2` for `pi_minus`, `2 V_3` for `pi_tilde`.
    pub fn supported_field(&self) -> AxisymmetricField {
        let (m, c) = match self.kind {
            OpenBookKind::PiMinus => (2, BigRational::new((-3).into(), 2.into())),
            OpenBookKind::PiTilde => (3, BigRational::from_integer(2.into())),
        };
        AxisymmetricField::build_vm(m).expect("m >= 2").scaled(&c)
    }

    /// Page angle from the complex formula; `None` on the binding.
    pub fn theta(&self, p: &HopfPoint) -> Option<f64> {
        let (z1, z2) = z_pair(p);
        let w = match self.kind {
            OpenBookKind::PiMinus => z1 * z2.conj(),
            OpenBookKind::PiTilde => {
                let d = (z1 - z2).conj();
                z1 * z2 * d * d
            }
        };
        (w.norm() > BINDING_TOL).then(|| w.arg())
    }

    /// Page angle from the coordinate formula,
    /// `phi1 - phi2` or `phi1 + phi2 - 2 arctan(...)`.
    pub fn theta_coordinates(&self, s: f64, phi1: f64, phi2: f64) -> Option<f64> {
        let (ss, cs) = s.sin_cos();
        match self.kind {
            OpenBookKind::PiMinus => (ss * cs > BINDING_TOL).then_some(phi1 - phi2),
            OpenBookKind::PiTilde => {
                let num = cs * phi1.sin() - ss * phi2.sin();
                let den = cs * phi1.cos() - ss * phi2.cos();
                if ss * cs <= BINDING_TOL || num.hypot(den) <= BINDING_TOL {
                    return None;
                }
                // atan(num/den) and atan2 differ by a multiple of pi, which
                // the factor 2 turns into a multiple of 2 pi
                Some(phi1 + phi2 - 2.0 * (num / den).atan())
            }
        }
    }

    /// Page-area positivity at a point off the binding.
    ///
    /// For `pi_minus` this is `d alpha` on the page frame
    /// `(-d/ds, d/dphi1)` in page coordinates `(s, phi1)`, which reduces to
    /// `sin 2s (F' + (2z - 1) G' + 2G)`. For `pi_tilde` it is `d Theta(V)`,
    /// which has the same sign for a curl eigenfield with positive
    /// eigenvalue because `d alpha = lambda i_V vol`.
    pub fn page_rate(&self, field: &AxisymmetricField, s: f64, phi1: f64, phi2: f64) -> f64 {
        let (s2, u) = (2.0 * s).sin_cos();
        let (f, g) = field.coefficients_u(u);
        match self.kind {
            OpenBookKind::PiMinus => {
                let (fz, gz) = field.derivatives_u(u);
                s2 * (fz + u * gz + 2.0 * g)
            }
            OpenBookKind::PiTilde => {
                let (p1, p2) = (f + g, f - g);
                let (ss, cs) = s.sin_cos();
                let e1 = Complex64::from_polar(cs, phi1);
                let e2 = Complex64::from_polar(ss, phi2);
                let w = e1 - e2;
                let n2 = w.norm_sqr();
                let d1 = (w.conj() * e1).re / n2;
                let d2 = -(w.conj() * e2).re / n2;
                p1 + p2 - 2.0 * (p1 * d1 + p2 * d2)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PageMargin {
    pub min_margin: f64,
    /// `(s, phi1, phi2)` of the minimum.
    pub argmin: [f64; 3],
    pub samples: usize,
}

fn near_binding(book: &OpenBook, s: f64, phi1: f64, phi2: f64) -> bool {
    book.theta_coordinates(s, phi1, phi2).is_none()
}

/// Minimum of [`OpenBook::page_rate`] over an open `n x n x n` Hopf grid
/// (binding points skipped).
pub fn page_area_positivity(book: &OpenBook, field: &AxisymmetricField, n: usize) -> PageMargin {
    let n = n.max(2);
    let ss: Vec<f64> = s_samples_open(n).collect();
    let dphi = TAU / n as f64;
    let best = ss
        .par_iter()
        .map(|&s| {
            let mut best = (f64::INFINITY, [s, 0.0, 0.0], 0usize);
            for i in 0..n {
                for j in 0..n {
                    let (p1, p2) = (i as f64 * dphi, j as f64 * dphi);
                    if near_binding(book, s, p1, p2) {
                        continue;
                    }
                    let r = book.page_rate(field, s, p1, p2);
                    best.2 += 1;
                    if r < best.0 {
                        best = (r, [s, p1, p2], best.2);
                    }
                }
            }
            best
        })
        .reduce(
            || (f64::INFINITY, [0.0; 3], 0),
            |a, b| {
                let count = a.2 + b.2;
                if a.0 <= b.0 {
                    (a.0, a.1, count)
                } else {
                    (b.0, b.1, count)
                }
            },
        );
    PageMargin {
        min_margin: best.0,
        argmin: best.1,
        samples: best.2,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BindingMargin {
    pub s: f64,
    /// `alpha(T)` for the binding tangent `T`; positive means the contact
    /// planes are positively transverse to the binding.
    pub pairing: f64,
    /// Metric norm of the part of `V` orthogonal to `T`.
    pub tangency_defect: f64,
}

/// `alpha(T)` along each binding circle. The field is axisymmetric, so one
/// evaluation per circle suffices.
pub fn binding_positivity(book: &OpenBook, field: &AxisymmetricField) -> Vec<BindingMargin> {
    book.binding
        .iter()
        .map(|c| {
            let (p1, p2) = field.phi_coefficients(c.s);
            let (ss, cs) = c.s.sin_cos();
            let (g11, g22) = (cs * cs, ss * ss);
            let [t1, t2] = c.direction;
            let pairing = g11 * p1 * t1 + g22 * p2 * t2;
            let k = pairing / (g11 * t1 * t1 + g22 * t2 * t2);
            let defect = (g11 * (p1 - k * t1).powi(2) + g22 * (p2 - k * t2).powi(2)).sqrt();
            BindingMargin {
                s: c.s,
                pairing,
                tangency_defect: defect,
            }
        })
        .collect()
}

/// Largest difference, modulo `2 pi`, between the complex and coordinate
/// page angles over an `n^3` grid.
pub fn theta_consistency(book: &OpenBook, n: usize) -> f64 {
    let n = n.max(2);
    let ss: Vec<f64> = s_samples_open(n).collect();
    let dphi = TAU / n as f64;
    ss.par_iter()
        .map(|&s| {
            let mut worst: f64 = 0.0;
            for i in 0..n {
                for j in 0..n {
                    let p = HopfPoint {
                        s,
                        phi1: i as f64 * dphi + 0.1,
                        phi2: j as f64 * dphi + 0.3,
                    };
                    if let (Some(a), Some(b)) = (book.theta(&p), book.theta_coordinates(s, p.phi1, p.phi2)) {
                        worst = worst.max(angle_distance(a, b));
                    }
                }
            }
            worst
        })
        .reduce(|| 0.0, f64::max)
}

/// Distance between two angles on the circle.
pub fn angle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// `d/dphi1` and `d/dphi2` rates of the integral curves of `V_3` through
/// `phi1 = phi2 = 0`: `3/2 - 6 c^2 + 5 c^4` and `1/2 - 4 c^2 + 5 c^4`.
pub fn pi_tilde_curve_rates(s: f64) -> (f64, f64) {
    let c2 = s.cos().powi(2);
    (1.5 - 6.0 * c2 + 5.0 * c2 * c2, 0.5 - 4.0 * c2 + 5.0 * c2 * c2)
}

/// Closed form of `d Theta / dt` along those curves,
/// `cos^2 2s / (1 - cos(t cos 2s) sin 2s)`.
pub fn pi_tilde_rate_formula(s: f64, t: f64) -> f64 {
    let (s2, c2) = (2.0 * s).sin_cos();
    c2 * c2 / (1.0 - (t * c2).cos() * s2)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateCheck {
    /// Smallest closed-form rate on the grid.
    pub min_rate: f64,
    /// Largest gap between the closed form and the chain-rule derivative.
    pub max_error: f64,
    /// Largest gap between the displayed curve rates and the
    /// `d/dphi` coefficients of `V_3`.
    pub coefficient_error: f64,
    pub samples: usize,
}

/// Compares the closed-form `d Theta / dt` with the chain-rule derivative of
/// the page angle along the integral curves, on `n_s` open radii (avoiding
/// `s = pi/4`) and `n_t` times in `[0, 2 pi]`.
pub fn pi_tilde_rate_check(n_s: usize, n_t: usize) -> RateCheck {
    let book = OpenBook::new(OpenBookKind::PiTilde);
    let v3 = AxisymmetricField::build_vm(3).expect("m = 3");
    let n_s = n_s.max(2) & !1; // even, so pi/4 is not an open-grid node
    let n_t = n_t.max(2);
    let mut out = RateCheck {
        min_rate: f64::INFINITY,
        max_error: 0.0,
        coefficient_error: 0.0,
        samples: 0,
    };
    for s in s_samples_open(n_s) {
        let (r1, r2) = pi_tilde_curve_rates(s);
        let (p1, p2) = v3.phi_coefficients(s);
        out.coefficient_error = out.coefficient_error.max((r1 - p1).abs()).max((r2 - p2).abs());
        for j in 0..n_t {
            let t = TAU * j as f64 / (n_t - 1) as f64;
            let formula = pi_tilde_rate_formula(s, t);
            let chain = book.page_rate(&v3, s, r1 * t, r2 * t);
            out.min_rate = out.min_rate.min(formula);
            out.max_error = out.max_error.max((formula - chain).abs());
            out.samples += 1;
        }
    }
    out
}

/// `|grad Theta|` of the `pi_tilde` page angle at `(s, phi1 - phi2 = delta)`,
/// by central differences in `s` and `delta`.
pub fn pi_tilde_theta_gradient(s: f64, delta: f64) -> Option<f64> {
    let book = OpenBook::new(OpenBookKind::PiTilde);
    let h = 1e-5;
    let th = |s: f64, d: f64| book.theta(&HopfPoint { s, phi1: d, phi2: 0.0 });
    let ds = angle_signed(th(s + h, delta)?, th(s - h, delta)?) / (2.0 * h);
    let dd = angle_signed(th(s, delta + h)?, th(s, delta - h)?) / (2.0 * h);
    Some(ds.hypot(dd))
}

fn angle_signed(a: f64, b: f64) -> f64 {
    (a - b + PI).rem_euclid(TAU) - PI
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn pi_minus_page_margin_is_two_sin_2s() {
        let book = OpenBook::new(OpenBookKind::PiMinus);
        let v = book.supported_field();
        for s in s_samples_open(64) {
            let r = book.page_rate(&v, s, 0.3, 1.1);
            assert!((r - 2.0 * (2.0 * s).sin()).abs() < 1e-12, "s = {s}");
        }
        assert!((book.page_rate(&v, FRAC_PI_4, 0.0, 1.0) - 2.0).abs() < 1e-12);
        let m = page_area_positivity(&book, &v, 16);
        assert!(m.min_margin > 0.0);
    }

    #[test]
    fn pi_minus_alpha_closed_form() {
        // alpha = (3c^2 - 2) c^2 dphi1 + (3c^2 - 1) s^2 dphi2
        let v = OpenBook::new(OpenBookKind::PiMinus).supported_field();
        for s in s_samples_open(20) {
            let (p1, p2) = v.phi_coefficients(s);
            let (sn, c) = s.sin_cos();
            assert!((p1 * c * c - (3.0 * c * c - 2.0) * c * c).abs() < 1e-13);
            assert!((p2 * sn * sn - (3.0 * c * c - 1.0) * sn * sn).abs() < 1e-13);
        }
    }

    #[test]
    fn pi_minus_page_margin_matches_differenced_alpha() {
        let book = OpenBook::new(OpenBookKind::PiMinus);
        let v = AxisymmetricField::build_vm(5).unwrap();
        // alpha coefficients a1 = (F+G) cos^2 s, a2 = (F-G) sin^2 s; the page
        // margin is -(a1 + a2)'
        let sum = |s: f64| {
            let (p1, p2) = v.phi_coefficients(s);
            p1 * s.cos().powi(2) + p2 * s.sin().powi(2)
        };
        let h = 1e-3;
        for s in s_samples_open(16) {
            let d1 = (sum(s + h) - sum(s - h)) / (2.0 * h);
            let d2 = (sum(s + h / 2.0) - sum(s - h / 2.0)) / h;
            let fd = -(4.0 * d2 - d1) / 3.0;
            assert!((book.page_rate(&v, s, 0.0, 0.0) - fd).abs() < 1e-8);
        }
    }

    #[test]
    fn bindings_positive() {
        for kind in [OpenBookKind::PiMinus, OpenBookKind::PiTilde] {
            let book = OpenBook::new(kind);
            let v = book.supported_field();
            for b in binding_positivity(&book, &v) {
                assert!(b.pairing > 0.0, "{kind:?} at s = {}", b.s);
                assert!(b.tangency_defect < 1e-13);
            }
        }
        let book = OpenBook::new(OpenBookKind::PiMinus);
        let m = binding_positivity(&book, &book.supported_field());
        assert!((m[0].pairing - 1.0).abs() < 1e-13);
        assert!((m[1].pairing - 1.0).abs() < 1e-13);
        let book = OpenBook::new(OpenBookKind::PiTilde);
        let m = binding_positivity(&book, &book.supported_field());
        let want = [1.0, 0.5, 1.0];
        for (b, w) in m.iter().zip(want) {
            assert!((b.pairing - w).abs() < 1e-13);
        }
    }

    #[test]
    fn theta_paths_agree() {
        for kind in [OpenBookKind::PiMinus, OpenBookKind::PiTilde] {
            let e = theta_consistency(&OpenBook::new(kind), 24);
            assert!(e < 1e-10, "{kind:?}: {e}");
        }
    }

    #[test]
    fn pi_tilde_rate_matches_formula() {
        let r = pi_tilde_rate_check(40, 60);
        assert!(r.min_rate > 0.0);
        assert!(r.max_error < 1e-10, "{}", r.max_error);
        assert!(r.coefficient_error < 1e-13);
    }

    #[test]
    fn pi_tilde_rate_by_differencing_theta() {
        let book = OpenBook::new(OpenBookKind::PiTilde);
        let h = 1e-4;
        for &s in &[0.2, 0.5, 1.0, 1.4] {
            let (r1, r2) = pi_tilde_curve_rates(s);
            let th = |t: f64| book.theta(&HopfPoint { s, phi1: r1 * t, phi2: r2 * t }).unwrap();
            for &t in &[0.0, 1.0, 3.0] {
                let fd = angle_signed(th(t + h), th(t - h)) / (2.0 * h);
                assert!((fd - pi_tilde_rate_formula(s, t)).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn pi_tilde_page_angle_is_critical_on_a_circle() {
        // on {s = pi/4, phi1 - phi2 = pi} both partials of the page angle
        // vanish, so the rate infimum over the open page is 0
        let g = pi_tilde_theta_gradient(FRAC_PI_4, PI).unwrap();
        assert!(g < 1e-6, "{g}");
        assert!(pi_tilde_theta_gradient(0.5, 1.0).unwrap() > 0.1);
        let book = OpenBook::new(OpenBookKind::PiTilde);
        let v = book.supported_field();
        assert!(book.page_rate(&v, FRAC_PI_4 + 1e-3, PI, 0.0).abs() < 1e-5);
    }

    #[test]
    fn names_round_trip() {
        for k in [OpenBookKind::PiMinus, OpenBookKind::PiTilde] {
            assert_eq!(OpenBookKind::parse(k.name()).unwrap(), k);
        }
        assert!(OpenBookKind::parse("pi_plus").is_err());
    }

    proptest! {
        #[test]
        fn margins_scale_linearly(c in 0.1f64..10.0, s in 0.05f64..1.5, p in 0.0f64..6.28) {
            let cr = BigRational::from_float(c).unwrap();
            for kind in [OpenBookKind::PiMinus, OpenBookKind::PiTilde] {
                let book = OpenBook::new(kind);
                let v = book.supported_field();
                let w = v.scaled(&cr);
                if near_binding(&book, s, p, 0.0) {
                    continue;
                }
                let a = book.page_rate(&v, s, p, 0.0);
                let b = book.page_rate(&w, s, p, 0.0);
                prop_assert!((b - c * a).abs() <= 1e-12 * (1.0 + b.abs()));
            }
        }
    }
}
