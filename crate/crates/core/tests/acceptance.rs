//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::time::Instant;

use beltrami_lab::contact::{
    check_linear_homotopy_s3, collinearity_sets_s3, collinearity_sets_t3, compute_c0, giroux_classify_sphere,
    giroux_classify_torus, verify_named_homotopy, Certificate, HomotopyFamily, NamedHomotopy, Verdict,
    ALIGNMENT_TOL,
};
use beltrami_lab::hopf_invariant::{gauss_profile, hopf_class_formula, hopf_class_vm, whitehead_hopf_invariant};
use beltrami_lab::manifold::{
    curl_s3_numeric, hopf_grid_open, laplace_beltrami_s3, torus_grid, FdOptions, HopfPoint, S3Field, T3Field,
};
use beltrami_lab::nodal::search_contractible;
use beltrami_lab::openbook::{
    binding_positivity, page_area_positivity, pi_tilde_rate_check, theta_consistency, OpenBook, OpenBookKind,
};
use beltrami_lab::orthopoly::{char_poly_exact, RatPoly};
use beltrami_lab::sphere_fields::{builtin_example, AxisymmetricField, SphereField};
use beltrami_lab::torus_fields::{aligned_unit_pair, build_from_t2_eigenfunction, build_vk, WaveSpec};
use beltrami_lab::vec3::norm;
use num_rational::{BigRational, Rational64};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn vm(m: i32) -> AxisymmetricField {
    AxisymmetricField::build_vm(m).expect("|m| >= 2")
}

fn ratpoly(c: &[(i64, i64)]) -> RatPoly {
    RatPoly::new(c.iter().map(|&(p, q)| BigRational::new(p.into(), q.into())).collect())
}

fn ms(max: i32) -> impl Iterator<Item = i32> {
    (2..=max).chain(-max..=-2)
}

fn sup_curl_residual(v: &AxisymmetricField, pts: &[HopfPoint], opts: FdOptions) -> f64 {
    let lambda = v.lambda().expect("eigenfield");
    pts.par_iter()
        .map(|p| {
            let c = curl_s3_numeric(v, p, opts).expect("grid avoids the link").to_array();
            let w = v.eval(p).to_array();
            (0..3).map(|i| (c[i] - lambda * w[i]).abs()).fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

fn c1_polynomial_anchors() -> Outcome {
    let want = [
        (2, ratpoly(&[(2, 3), (-4, 3)])),
        (3, ratpoly(&[(1, 2), (-3, 1), (3, 1)])),
        (4, ratpoly(&[(2, 5), (-24, 5), (12, 1), (-8, 1)])),
    ];
    for (m, p) in &want {
        let got = char_poly_exact(*m).map_err(|e| e.to_string())?;
        ensure(&got == p, || format!("m = {m}: got {got:?}"))?;
    }
    Ok("char_poly(2), (3), (4) equal exactly".into())
}

fn c2_eigen_equation() -> Outcome {
    let pts = hopf_grid_open(64);
    let mut worst: f64 = 0.0;
    let mut orders = Vec::new();
    for m in ms(12) {
        let v = vm(m);
        ensure(v.is_exact_eigenfield(), || format!("curl V_{m} != {} V_{m} exactly", 2 * m))?;
        let r = sup_curl_residual(&v, &pts, FdOptions::richardson(1e-3));
        ensure(r < 1e-5, || format!("m = {m}: FD residual {r:e}"))?;
        worst = worst.max(r);
        let a = sup_curl_residual(&v, &pts, FdOptions::central(1e-3));
        let b = sup_curl_residual(&v, &pts, FdOptions::central(5e-4));
        let order = (a / b).log2();
        ensure((order - 2.0).abs() < 0.1, || format!("m = {m}: observed order {order}"))?;
        orders.push(order);
    }
    let (lo, hi) = orders.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &o| (l.min(o), h.max(o)));
    Ok(format!("exact for 2 <= |m| <= 12; FD sup residual {worst:.2e} on 64^3; central order in [{lo:.3}, {hi:.3}]"))
}

fn c3_nonvanishing() -> Outcome {
    let mut least = f64::INFINITY;
    for m in ms(12) {
        let v = vm(m);
        let n = v.min_norm(4097).value;
        ensure(n > 0.0, || format!("m = {m}: min |V| = {n}"))?;
        least = least.min(n);
    }
    let mut worst: f64 = 0.0;
    for m in 2..=12 {
        let v = vm(m);
        let (on_s0, _) = v.phi_coefficients(0.0);
        let (_, on_s1) = v.phi_coefficients(FRAC_PI_2);
        let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
        let d0 = (on_s0 - 2.0 * sign / f64::from(m + 1)).abs();
        let d1 = (on_s1 - 2.0 / f64::from(m + 1)).abs();
        worst = worst.max(d0).max(d1);
        ensure(d0 < 1e-12 && d1 < 1e-12, || format!("m = {m}: link values off by {d0:e}, {d1:e}"))?;
    }
    Ok(format!("min |V_m| >= {least:.4}; link values within {worst:.1e}"))
}

fn c4_overtwisted() -> Outcome {
    for m in ms(20) {
        let c = giroux_classify_sphere(&SphereField::Axisymmetric(vm(m))).map_err(|e| format!("m = {m}: {e}"))?;
        ensure(c.verdict == Verdict::Overtwisted, || format!("m = {m}: {:?}", c.verdict))?;
        let Certificate::CharacteristicTori(t) = &c.certificate else {
            return Err(format!("m = {m}: wrong certificate"));
        };
        ensure(!t.z_roots.is_empty() && t.z_roots.iter().all(|&z| z > 0.0 && z < 1.0), || {
            format!("m = {m}: roots {:?}", t.z_roots)
        })?;
    }
    let c = giroux_classify_sphere(&SphereField::Axisymmetric(vm(2))).map_err(|e| e.to_string())?;
    let Certificate::CharacteristicTori(t) = &c.certificate else {
        return Err("V_2: wrong certificate".into());
    };
    ensure(t.s_roots.len() == 1 && (t.s_roots[0] - FRAC_PI_4).abs() < 1e-10, || {
        format!("V_2 tori at {:?}", t.s_roots)
    })?;
    Ok(format!("Overtwisted for 2 <= |m| <= 20; V_2 torus at s = pi/4 {:+.1e}", t.s_roots[0] - FRAC_PI_4))
}

fn c5_hopf_invariants() -> Outcome {
    let cases = [
        ("anti-Hopf", AxisymmetricField::anti_hopf(), -1),
        ("Hopf", AxisymmetricField::hopf(), 0),
        ("V_2", vm(2), -1),
        ("V_3", vm(3), 0),
    ];
    let mut worst: f64 = 0.0;
    for (name, v, want) in cases {
        let h = whitehead_hopf_invariant(&gauss_profile(&v).map_err(|e| e.to_string())?, 2048)
            .map_err(|e| format!("{name}: {e}"))?;
        ensure(h.rounded == want && h.distance < 1e-4, || format!("{name}: {}", h.value))?;
        worst = worst.max(h.distance);
    }
    for m in ms(8) {
        let c = hopf_class_vm(m).map_err(|e| format!("m = {m}: {e}"))?;
        ensure(c.quadrature.rounded == hopf_class_formula(m), || format!("m = {m}"))?;
    }
    Ok(format!("-1, 0, -1, 0 within {worst:.1e}; closed formula agrees for 2 <= |m| <= 8"))
}

fn c6_homotopies() -> Outcome {
    let w = builtin_example("nonaxisymmetric").map_err(|e| e.to_string())?;
    let cert = check_linear_homotopy_s3(&vm(2), 4.0, &w, 4.0, 32, HomotopyFamily::Linear).map_err(|e| e.to_string())?;
    ensure(cert.margin > 0.0, || format!("(V_2, nonaxisymmetric) margin {}", cert.margin))?;
    let mut errs = Vec::new();
    for name in ["t3_sqrt2_class", "shear_profile"] {
        let h = NamedHomotopy::parse(name).map_err(|e| e.to_string())?;
        let r = verify_named_homotopy(&h, 16, 21).map_err(|e| format!("{name}: {e}"))?;
        ensure(r.closed_form_error < 1e-12 && r.margin > 0.0, || {
            format!("{name}: closed-form error {:e}, margin {}", r.closed_form_error, r.margin)
        })?;
        errs.push(r.closed_form_error);
    }
    let (v, u) = aligned_unit_pair(2).map_err(|e| e.to_string())?;
    let c_torus = compute_c0(&collinearity_sets_t3(&v, &u, 32, ALIGNMENT_TOL)).value;
    let c_sphere = compute_c0(&collinearity_sets_s3(&vm(2), &vm(3), 65, 6, ALIGNMENT_TOL)).value;
    ensure((c_torus - 1.0).abs() < 1e-12, || format!("torus c0 = {c_torus}"))?;
    ensure((c_sphere - 4.0 / 3.0).abs() < 1e-12, || format!("(V_2, V_3) c0 = {c_sphere}"))?;
    Ok(format!(
        "(V_2, nonaxisymmetric) margin {:.3}; named volumes within {:.1e}; c0 = {c_torus}, {c_sphere:.12}",
        cert.margin,
        errs.iter().cloned().fold(0.0, f64::max)
    ))
}

fn random_spec(rng: &mut ChaCha8Rng) -> WaveSpec {
    loop {
        let k: [i64; 3] = std::array::from_fn(|_| rng.random_range(-4..=4));
        let r: [i64; 3] = std::array::from_fn(|_| rng.random_range(-3..=3));
        let b = [k[1] * r[2] - k[2] * r[1], k[2] * r[0] - k[0] * r[2], k[0] * r[1] - k[1] * r[0]];
        if b == [0, 0, 0] {
            continue;
        }
        let d = rng.random_range(1..=5);
        let b = b.map(|c| Rational64::new(c, d));
        return WaveSpec::new(k, b).expect("k x r is perpendicular to k");
    }
}

fn c7_torus_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let pts = torus_grid(12);
    let (mut norm_dev, mut energy_dev, mut coeff): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for i in 0..50 {
        let spec = random_spec(&mut rng);
        ensure(spec.verify_identities(), || format!("spec {i}: integer identities fail"))?;
        let v = build_vk(&spec);
        let r = v.eigen_coefficient_residual().ok_or("no eigenvalue")?;
        ensure(r < 1e-12, || format!("spec {i}: curl coefficients off by {r:e}"))?;
        coeff = coeff.max(r);
        let bn = norm(&spec.b());
        let mut emin = f64::INFINITY;
        let mut emax = f64::NEG_INFINITY;
        for p in &pts {
            norm_dev = norm_dev.max((norm(&v.eval(p)) - bn).abs());
            let e = v.gauss_energy_density(&p.x, bn);
            emin = emin.min(e);
            emax = emax.max(e);
        }
        energy_dev = energy_dev.max(emax - emin);
    }
    ensure(norm_dev < 1e-13, || format!("| |V_k| - |b| | up to {norm_dev:e}"))?;
    ensure(energy_dev < 1e-10, || format!("energy density varies by {energy_dev:e}"))?;

    let cert = search_contractible(25, 100, 7, 256).map_err(|e| e.to_string())?;
    let field = build_from_t2_eigenfunction(&cert.eigenfunction);
    let min_norm = torus_grid(32)
        .par_iter()
        .map(|p| norm(&field.eval(p)))
        .reduce(|| f64::INFINITY, f64::min);
    ensure(min_norm > 0.0, || format!("ansatz field vanishes ({min_norm})"))?;
    let c = giroux_classify_torus(&field, 256).map_err(|e| e.to_string())?;
    ensure(c.verdict == Verdict::Overtwisted, || format!("ansatz verdict {:?}", c.verdict))?;
    let lambda = field.lambda().ok_or("ansatz without eigenvalue")?;
    let curl_dev = torus_grid(8)
        .iter()
        .map(|p| {
            let c = field.exact_curl(p).expect("mode-list field");
            let v = field.eval(p);
            (0..3).map(|i| (c[i] - lambda * v[i]).abs()).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);
    ensure(curl_dev < 1e-10, || format!("ansatz curl residual {curl_dev:e}"))?;
    Ok(format!(
        "50 waves exact (coeff {coeff:.1e}), norm dev {norm_dev:.1e}, energy dev {energy_dev:.1e}; \
         ansatz found at trial {} with min |V| {min_norm:.3}, Overtwisted",
        cert.trial
    ))
}

fn c8_component_laplacian() -> Outcome {
    let pts = hopf_grid_open(24);
    let opts = FdOptions::richardson(1e-3);
    let cos2s = |p: &HopfPoint| (2.0 * p.s).cos();
    let mut worst: f64 = 0.0;
    for p in &pts {
        let l = laplace_beltrami_s3(cos2s, p, opts).map_err(|e| e.to_string())?;
        worst = worst.max((l + 8.0 * cos2s(p)).abs());
    }
    ensure(worst < 1e-4, || format!("Delta cos 2s residual {worst:e}"))?;
    let base = worst;
    for m in ms(12) {
        let v = vm(m);
        let mu = f64::from(2 * m * (2 * m - 2));
        let r = pts
            .par_iter()
            .map(|p| {
                (0..3)
                    .map(|i| {
                        let comp = |q: &HopfPoint| v.eval(q).to_array()[i];
                        let l = laplace_beltrami_s3(comp, p, opts).expect("grid avoids the link");
                        (l + mu * comp(p)).abs()
                    })
                    .fold(0.0, f64::max)
            })
            .reduce(|| 0.0, f64::max);
        ensure(r < 1e-4, || format!("m = {m}: residual {r:e}"))?;
        worst = worst.max(r);
    }
    Ok(format!("Delta cos 2s = -8 cos 2s within {base:.1e}; components of V_m for 2 <= |m| <= 12 within {worst:.1e}"))
}

fn c9_open_books() -> Outcome {
    let minus = OpenBook::new(OpenBookKind::PiMinus);
    let v = minus.supported_field();
    let mut worst: f64 = 0.0;
    for s in beltrami_lab::manifold::s_samples_open(256) {
        let r = minus.page_rate(&v, s, 0.7, 2.1);
        worst = worst.max((r - 2.0 * (2.0 * s).sin()).abs());
    }
    ensure(worst < 1e-10, || format!("pi_minus margin differs from 2 sin 2s by {worst:e}"))?;
    let page = page_area_positivity(&minus, &v, 32);
    ensure(page.min_margin > 0.0, || format!("pi_minus page margin {}", page.min_margin))?;
    let rate = pi_tilde_rate_check(128, 128);
    ensure(rate.min_rate > 0.0 && rate.max_error < 1e-10, || {
        format!("pi_tilde rate min {:e}, error {:e}", rate.min_rate, rate.max_error)
    })?;
    let tilde = OpenBook::new(OpenBookKind::PiTilde);
    let mut least_binding = f64::INFINITY;
    for book in [&minus, &tilde] {
        for b in binding_positivity(book, &book.supported_field()) {
            ensure(b.pairing > 0.0, || format!("{:?} binding at s = {}: {}", book.kind, b.s, b.pairing))?;
            least_binding = least_binding.min(b.pairing);
        }
        let t = theta_consistency(book, 32);
        ensure(t < 1e-10, || format!("{:?} page angle paths differ by {t:e}", book.kind))?;
    }
    Ok(format!(
        "pi_minus = 2 sin 2s within {worst:.1e}; pi_tilde rate within {:.1e} (min {:.2e}); binding pairings >= {least_binding}",
        rate.max_error, rate.min_rate
    ))
}

fn c10_nonconstant_norm() -> Outcome {
    let mut least = f64::INFINITY;
    for m in 2..=8 {
        let v = vm(m);
        let spread = v.max_norm(4097).value - v.min_norm(4097).value;
        ensure(spread > 0.1, || format!("m = {m}: spread {spread}"))?;
        least = least.min(spread);
    }
    let mut dev: f64 = 0.0;
    for u in [AxisymmetricField::hopf(), AxisymmetricField::anti_hopf()] {
        for p in hopf_grid_open(16) {
            dev = dev.max((u.eval(&p).norm() - 1.0).abs());
        }
    }
    ensure(dev < 1e-14, || format!("|R|, |R'| deviate from 1 by {dev:e}"))?;
    Ok(format!("max - min of |V_m| >= {least:.4} for 2 <= m <= 8; |R|, |R'| within {dev:.1e} of 1"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("exact polynomial anchors", c1_polynomial_anchors),
        ("eigen-equation", c2_eigen_equation),
        ("nonvanishing and link values", c3_nonvanishing),
        ("overtwistedness", c4_overtwisted),
        ("Hopf invariants by quadrature", c5_hopf_invariants),
        ("homotopy certificates", c6_homotopies),
        ("torus suite", c7_torus_suite),
        ("component eigenfunctions", c8_component_laplacian),
        ("open books", c9_open_books),
        ("nonconstant norm", c10_nonconstant_norm),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name} ({secs:.1}s): {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL {:>2} {name} ({secs:.1}s): {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
