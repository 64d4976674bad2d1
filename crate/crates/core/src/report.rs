//! Machine-readable reports.
//!
//! Every float written by [`to_json_string`] is rounded to 15 significant
//! digits, so a report parsed and re-emitted is byte-identical.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::contact::{giroux_classify_sphere, giroux_classify_torus, Certificate, Classification, Verdict};
use crate::hopf_invariant::{gauss_profile, whitehead_hopf_invariant, DEFAULT_RESOLUTION};
use crate::manifold::{curl_s3_numeric, curl_t3_fd, hopf_grid_open, torus_grid, FdOptions, S3Field, T3Field};
use crate::nodal::NodalCurveSet;
use crate::openbook::{binding_positivity, page_area_positivity, OpenBook, OpenBookKind};
use crate::sphere_fields::SphereField;
use crate::torus_fields::TorusField;
use crate::vec3::{norm, sub};
use crate::{Error, Result};

pub const SIGNIFICANT_DIGITS: usize = 15;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportOptions {
    /// Points per axis of the residual grid.
    pub grid: usize,
    /// Finite-difference step.
    pub h: f64,
    /// Marching-squares resolution for torus nodal certificates.
    pub nodal_grid: usize,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            grid: 16,
            h: 1e-3,
            nodal_grid: 256,
        }
    }
}

impl ReportOptions {
    pub fn validate(&self) -> Result<()> {
        if self.grid < 2 {
            return Err(Error::InvalidArgument(format!("grid must be at least 2, got {}", self.grid)));
        }
        if !(self.h > 0.0 && self.h < 0.1) {
            return Err(Error::InvalidArgument(format!("h must lie in (0, 0.1), got {}", self.h)));
        }
        if self.nodal_grid < crate::nodal::MIN_GRID {
            return Err(Error::InvalidArgument(format!(
                "nodal grid must be at least {}, got {}",
                crate::nodal::MIN_GRID,
                self.nodal_grid
            )));
        }
        Ok(())
    }
}

/// Compact view of a torus nodal certificate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodalSummary {
    pub components: usize,
    pub contractible: usize,
    pub margin: f64,
    pub homology: Vec<[i64; 2]>,
}

impl From<&NodalCurveSet> for NodalSummary {
    fn from(c: &NodalCurveSet) -> Self {
        Self {
            components: c.components.len(),
            contractible: c.contractible_count(),
            margin: c.margin,
            homology: c.homology_multiset(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContactReport {
    pub field: String,
    pub lambda: Option<f64>,
    /// Sup-norm of `curl V - f V` by finite differences.
    pub eig_residual: f64,
    pub min_norm: f64,
    /// Radii `s` of the characteristic tori (sphere fields).
    pub char_surface: Vec<f64>,
    pub nodal: Option<NodalSummary>,
    pub verdict: Verdict,
    pub hopf_invariant: Option<i64>,
    pub margins: BTreeMap<String, f64>,
}

impl ContactReport {
    /// Checks that the verdict carries the evidence it needs.
    pub fn check_invariants(&self, certificate: &Certificate) -> Result<()> {
        let ok = match (self.verdict, certificate) {
            (Verdict::Overtwisted, Certificate::CharacteristicTori(t)) => !t.s_roots.is_empty(),
            (Verdict::Overtwisted, Certificate::TorusNodal(c)) => c.certifies_overtwisted(),
            (Verdict::Overtwisted, Certificate::SphereNodal(r)) => r.nonempty,
            (Verdict::Overtwisted, _) => false,
            (Verdict::Tight, Certificate::CharacteristicTori(t)) => t.s_roots.is_empty(),
            (Verdict::Tight, Certificate::SphereNodal(r)) => !r.nonempty,
            (Verdict::Tight, Certificate::LiftFrame { .. }) => true,
            (Verdict::Tight, Certificate::Homotopy(h)) => h.margin > 0.0,
            (Verdict::Tight, Certificate::TorusNodal(_)) => false,
            (Verdict::Inconclusive, _) => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Consistency(format!("{:?} verdict without matching certificate", self.verdict)))
        }
    }
}

/// Sup-norm of `curl V - f V` over the open Hopf grid.
pub fn sphere_eig_residual(v: &SphereField, grid: usize, opts: FdOptions) -> Result<f64> {
    hopf_grid_open(grid)
        .par_iter()
        .map(|p| {
            let x = p.embedding();
            let c = curl_s3_numeric(v, p, opts)?.to_array();
            let f = v
                .beltrami_factor(&x)
                .ok_or_else(|| Error::Inapplicable("field has no proportionality factor".into()))?;
            let w = v.frame_components(&x).to_array();
            Ok(norm(&sub(&c, &w.map(|a| f * a))))
        })
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}

/// Sup-norm of `curl V - lambda V` over the periodic torus grid, with
/// finite-difference curl.
pub fn torus_eig_residual(v: &TorusField, grid: usize, opts: FdOptions) -> Result<f64> {
    let lambda = v
        .lambda()
        .ok_or_else(|| Error::Inapplicable("torus field has no eigenvalue".into()))?;
    Ok(torus_grid(grid)
        .par_iter()
        .map(|p| {
            let c = curl_t3_fd(v, p, opts);
            norm(&sub(&c, &v.eval(p).map(|a| lambda * a)))
        })
        .reduce(|| 0.0, f64::max))
}

pub fn sphere_report(name: &str, v: &SphereField, opts: &ReportOptions) -> Result<(ContactReport, Classification)> {
    opts.validate()?;
    let class = giroux_classify_sphere(v)?;
    let eig_residual = sphere_eig_residual(v, opts.grid, FdOptions::richardson(opts.h))?;
    let mut margins = BTreeMap::new();
    let mut char_surface = Vec::new();
    let mut hopf = None;
    if let Certificate::CharacteristicTori(t) = &class.certificate {
        char_surface = t.s_roots.clone();
    }
    if let Some(a) = v.as_axisymmetric() {
        let h = whitehead_hopf_invariant(&gauss_profile(a)?, DEFAULT_RESOLUTION)?;
        hopf = Some(h.rounded);
        margins.insert("hopf_integrality".into(), h.distance);
        let book = match a.lambda() {
            Some(l) if l == 4.0 => Some(OpenBook::new(OpenBookKind::PiMinus)),
            Some(l) if l == 6.0 => Some(OpenBook::new(OpenBookKind::PiTilde)),
            _ => None,
        };
        if let Some(book) = book {
            let supported = book.supported_field();
            let name = book.kind.name();
            let page = page_area_positivity(&book, &supported, opts.grid);
            margins.insert(format!("openbook_{name}_page"), page.min_margin);
            let binding = binding_positivity(&book, &supported)
                .iter()
                .map(|b| b.pairing)
                .fold(f64::INFINITY, f64::min);
            margins.insert(format!("openbook_{name}_binding"), binding);
        }
    }
    if let Certificate::Homotopy(h) = &class.certificate {
        margins.insert("homotopy".into(), h.margin);
    }
    if let Certificate::SphereNodal(r) = &class.certificate {
        margins.insert("nodal_regularity".into(), r.margin);
    }
    let report = ContactReport {
        field: name.to_string(),
        lambda: v.lambda(),
        eig_residual,
        min_norm: class.min_norm,
        char_surface,
        nodal: None,
        verdict: class.verdict,
        hopf_invariant: hopf,
        margins,
    };
    report.check_invariants(&class.certificate)?;
    Ok((report, class))
}

pub fn torus_report(name: &str, v: &TorusField, opts: &ReportOptions) -> Result<(ContactReport, Classification)> {
    opts.validate()?;
    let class = giroux_classify_torus(v, opts.nodal_grid)?;
    let eig_residual = torus_eig_residual(v, opts.grid, FdOptions::richardson(opts.h))?;
    let mut margins = BTreeMap::new();
    if let Some(r) = v.eigen_coefficient_residual() {
        margins.insert("exact_curl_coefficients".into(), r);
    }
    let mut nodal = None;
    match &class.certificate {
        Certificate::TorusNodal(c) => {
            margins.insert("nodal_regularity".into(), c.margin);
            nodal = Some(NodalSummary::from(c));
        }
        Certificate::LiftFrame { frame_defect, form_defect } => {
            margins.insert("lift_frame_defect".into(), *frame_defect);
            margins.insert("lift_form_defect".into(), *form_defect);
        }
        _ => {}
    }
    let report = ContactReport {
        field: name.to_string(),
        lambda: v.lambda(),
        eig_residual,
        min_norm: class.min_norm,
        char_surface: Vec::new(),
        nodal,
        verdict: class.verdict,
        hopf_invariant: None,
        margins,
    };
    report.check_invariants(&class.certificate)?;
    Ok((report, class))
}

/// `x` rounded to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().unwrap_or(x)
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(r) = n.as_f64().map(round_sig).and_then(serde_json::Number::from_f64) {
                *n = r;
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_value),
        Value::Object(o) => o.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Pretty JSON with floats rounded; integers are written exactly.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut v = serde_json::to_value(value)?;
    round_value(&mut v);
    Ok(serde_json::to_string_pretty(&v)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere_fields::{builtin_example, AxisymmetricField};
    use crate::torus_fields::{build_vk, WaveSpec};
    use proptest::prelude::*;

    fn small() -> ReportOptions {
        ReportOptions {
            grid: 8,
            ..ReportOptions::default()
        }
    }

    #[test]
    fn v3_report() {
        let v = SphereField::Axisymmetric(AxisymmetricField::build_vm(3).unwrap());
        let (r, _) = sphere_report("v3", &v, &small()).unwrap();
        assert_eq!(r.verdict, Verdict::Overtwisted);
        assert_eq!(r.hopf_invariant, Some(0));
        assert_eq!(r.char_surface.len(), 2);
        assert!(r.eig_residual < 1e-6);
        assert!(r.margins["openbook_pi_tilde_page"] > 0.0);
        assert!(r.margins["openbook_pi_tilde_binding"] > 0.0);
    }

    #[test]
    fn anti_hopf_report_is_tight() {
        let v = builtin_example("antihopf").unwrap();
        let (r, _) = sphere_report("antihopf", &v, &small()).unwrap();
        assert_eq!(r.verdict, Verdict::Tight);
        assert_eq!(r.hopf_invariant, Some(-1));
    }

    #[test]
    fn nonaxisymmetric_is_rejected() {
        let v = builtin_example("nonaxisymmetric").unwrap();
        assert!(matches!(sphere_report("x", &v, &small()), Err(Error::Inapplicable(_))));
    }

    #[test]
    fn wave_report_round_trips() {
        let v = build_vk(&WaveSpec::from_integers([1, 2, 0], [2, -1, 3]).unwrap());
        let (r, _) = torus_report("wave", &v, &small()).unwrap();
        assert_eq!(r.verdict, Verdict::Tight);
        let text = to_json_string(&r).unwrap();
        let back: ContactReport = serde_json::from_str(&text).unwrap();
        assert_eq!(to_json_string(&back).unwrap(), text);
    }

    #[test]
    fn invariant_check_rejects_bare_verdicts() {
        let v = SphereField::Axisymmetric(AxisymmetricField::build_vm(2).unwrap());
        let (mut r, c) = sphere_report("v2", &v, &small()).unwrap();
        r.check_invariants(&c.certificate).unwrap();
        r.verdict = Verdict::Tight;
        assert!(r.check_invariants(&c.certificate).is_err());
    }

    #[test]
    fn rounding() {
        assert_eq!(round_sig(0.1 + 0.2), 0.3);
        assert_eq!(round_sig(0.0), 0.0);
        assert_eq!(round_sig(-1.0 / 3.0), -0.333333333333333);
    }

    #[test]
    fn bad_options() {
        let mut o = ReportOptions::default();
        o.h = -1.0;
        assert!(o.validate().is_err());
        o = ReportOptions::default();
        o.grid = 1;
        assert!(o.validate().is_err());
    }

    proptest! {
        #[test]
        fn json_round_trip(x in proptest::num::f64::NORMAL, y in -1e6f64..1e6, n in 0usize..5) {
            let mut margins = BTreeMap::new();
            margins.insert("a".to_string(), y);
            let r = ContactReport {
                field: "f".into(),
                lambda: Some(x),
                eig_residual: y.abs(),
                min_norm: x.abs(),
                char_surface: vec![y; n],
                nodal: None,
                verdict: Verdict::Inconclusive,
                hopf_invariant: Some(n as i64),
                margins,
            };
            let text = to_json_string(&r).unwrap();
            let back: ContactReport = serde_json::from_str(&text).unwrap();
            prop_assert_eq!(to_json_string(&back).unwrap(), text);
        }
    }
}
