//! Laplace eigenfunctions on `T^2` and `S^2` and their nodal sets.
//!
//! Nodal curves on `T^2` are extracted by marching squares on a periodic
//! grid. Each component carries its homology class in `H_1(T^2) = Z^2`;
//! an embedded closed curve is contractible exactly when that class is zero.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::vec3::{dot, norm, Vec3};
use crate::{Error, Result};

/// Gradients below this on the nodal set mark it as possibly singular.
pub const IRREGULAR_THRESHOLD: f64 = 1e-6;

/// Smallest grid accepted by [`extract_nodal_set`].
pub const MIN_GRID: usize = 64;

/// `a cos(k.x) + b sin(k.x)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct T2Mode {
    pub k: [i32; 2],
    pub a: f64,
    pub b: f64,
}

/// A finite Fourier sum on `T^2` with `-Laplacian f = lambda f`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct T2Eigenfunction {
    lambda: u32,
    modes: Vec<T2Mode>,
}

impl T2Eigenfunction {
    pub fn new(lambda: u32, modes: Vec<T2Mode>) -> Result<Self> {
        if lambda == 0 {
            return Err(Error::InvalidArgument("eigenvalue must be positive".into()));
        }
        for m in &modes {
            let k2 = i64::from(m.k[0]).pow(2) + i64::from(m.k[1]).pow(2);
            if k2 != i64::from(lambda) {
                return Err(Error::NotEigenfunction(format!(
                    "mode ({}, {}) has |k|^2 = {k2}, expected {lambda}",
                    m.k[0], m.k[1]
                )));
            }
        }
        if modes.iter().all(|m| m.a == 0.0 && m.b == 0.0) {
            return Err(Error::VanishingField { norm: 0.0 });
        }
        Ok(Self { lambda, modes })
    }

    pub fn lambda(&self) -> u32 {
        self.lambda
    }

    pub fn modes(&self) -> &[T2Mode] {
        &self.modes
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.modes
            .iter()
            .map(|m| {
                let (s, c) = (f64::from(m.k[0]) * x + f64::from(m.k[1]) * y).sin_cos();
                m.a * c + m.b * s
            })
            .sum()
    }

    pub fn gradient(&self, x: f64, y: f64) -> [f64; 2] {
        let mut g = [0.0; 2];
        for m in &self.modes {
            let (s, c) = (f64::from(m.k[0]) * x + f64::from(m.k[1]) * y).sin_cos();
            let d = -m.a * s + m.b * c;
            g[0] += f64::from(m.k[0]) * d;
            g[1] += f64::from(m.k[1]) * d;
        }
        g
    }

    pub fn hessian(&self, x: f64, y: f64) -> [[f64; 2]; 2] {
        let mut h = [[0.0; 2]; 2];
        for m in &self.modes {
            let (s, c) = (f64::from(m.k[0]) * x + f64::from(m.k[1]) * y).sin_cos();
            let d2 = -(m.a * c + m.b * s);
            let k = [f64::from(m.k[0]), f64::from(m.k[1])];
            for i in 0..2 {
                for j in 0..2 {
                    h[i][j] += k[i] * k[j] * d2;
                }
            }
        }
        h
    }

    /// Sum of absolute coefficients, a bound for `|f|`.
    pub fn amplitude(&self) -> f64 {
        self.modes.iter().map(|m| m.a.abs() + m.b.abs()).sum()
    }

    /// Independent Gaussian coefficients on every lattice representative.
    pub fn random<R: rand::Rng + ?Sized>(lambda: u32, rng: &mut R) -> Result<Self> {
        let reps = lattice_representatives(lambda);
        if reps.is_empty() {
            return Err(Error::InvalidArgument(format!("{lambda} is not a sum of two squares")));
        }
        let modes = reps
            .into_iter()
            .map(|k| T2Mode {
                k,
                a: rng.sample(StandardNormal),
                b: rng.sample(StandardNormal),
            })
            .collect();
        Self::new(lambda, modes)
    }
}

/// Lattice vectors with `|k|^2 = lambda`, one from each pair `{k, -k}`.
pub fn lattice_representatives(lambda: u32) -> Vec<[i32; 2]> {
    let r = f64::from(lambda).sqrt().ceil() as i32 + 1;
    let mut out = Vec::new();
    for a in 0..=r {
        for b in -r..=r {
            if (a > 0 || b > 0) && i64::from(a * a + b * b) == i64::from(lambda) {
                out.push([a, b]);
            }
        }
    }
    out
}

/// One closed nodal curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodalComponent {
    /// Polyline vertices in `[0, 2 pi)^2`.
    pub vertices: Vec<[f64; 2]>,
    /// Class in `H_1(T^2)` from the lifted displacement, sign-normalized so
    /// that the first nonzero entry is positive.
    pub homology: [i64; 2],
    /// Same class from signed crossings with the circles `x1 = c`, `x2 = c`.
    pub crossing_homology: [i64; 2],
    pub min_gradient: f64,
    /// Number of contractible components enclosing this one.
    pub nesting_depth: usize,
    /// Contractible and enclosing no other component.
    pub bounds_disk: bool,
}

impl NodalComponent {
    pub fn is_contractible(&self) -> bool {
        self.homology == [0, 0]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodalCurveSet {
    pub grid: usize,
    pub components: Vec<NodalComponent>,
    /// Minimum `|grad f|` over the extracted vertices and over critical
    /// points of `f` found on the zero set.
    pub margin: f64,
    pub irregular_suspected: bool,
}

impl NodalCurveSet {
    pub fn is_regular(&self) -> bool {
        !self.irregular_suspected && self.margin > IRREGULAR_THRESHOLD
    }

    pub fn contractible_count(&self) -> usize {
        self.components.iter().filter(|c| c.is_contractible()).count()
    }

    pub fn has_contractible(&self) -> bool {
        self.contractible_count() > 0
    }

    /// Regular, disconnected, and with a contractible component.
    pub fn certifies_overtwisted(&self) -> bool {
        self.is_regular() && self.components.len() >= 2 && self.has_contractible()
    }

    /// Homology classes sorted, for comparisons across resolutions.
    pub fn homology_multiset(&self) -> Vec<[i64; 2]> {
        let mut v: Vec<_> = self.components.iter().map(|c| c.homology).collect();
        v.sort();
        v
    }
}

fn wrap_angle(d: f64) -> f64 {
    let mut r = d.rem_euclid(TAU);
    if r > PI {
        r -= TAU;
    }
    r
}

fn normalize_class(c: [i64; 2]) -> [i64; 2] {
    let first = if c[0] != 0 { c[0] } else { c[1] };
    if first < 0 {
        [-c[0], -c[1]]
    } else {
        c
    }
}

/// Zero-level curves of `f` on an `n x n` periodic grid.
pub fn extract_nodal_set(f: &T2Eigenfunction, n: usize) -> Result<NodalCurveSet> {
    if n < MIN_GRID {
        return Err(Error::InvalidArgument(format!("nodal grid {n} below minimum {MIN_GRID}")));
    }
    let h = TAU / n as f64;
    let idx = |i: usize, j: usize| (i % n) * n + (j % n);
    let vals: Vec<f64> = (0..n * n)
        .map(|k| f.eval((k / n) as f64 * h, (k % n) as f64 * h))
        .collect();
    let pos = |k: usize| vals[k] >= 0.0;

    // edge ids: 2*idx(i,j) along x1 from (i,j); 2*idx(i,j)+1 along x2
    let crossing = |e: usize| -> Option<[f64; 2]> {
        let k = e / 2;
        let (i, j) = (k / n, k % n);
        let k2 = if e.is_multiple_of(2) { idx(i + 1, j) } else { idx(i, j + 1) };
        if pos(k) == pos(k2) {
            return None;
        }
        let t = vals[k] / (vals[k] - vals[k2]);
        Some(if e.is_multiple_of(2) {
            [((i as f64 + t) * h).rem_euclid(TAU), j as f64 * h]
        } else {
            [i as f64 * h, ((j as f64 + t) * h).rem_euclid(TAU)]
        })
    };

    let mut adj: Vec<[usize; 2]> = vec![[usize::MAX; 2]; 2 * n * n];
    let mut link = |a: usize, b: usize| {
        for (x, y) in [(a, b), (b, a)] {
            let slot = &mut adj[x];
            if slot[0] == usize::MAX {
                slot[0] = y;
            } else {
                slot[1] = y;
            }
        }
    };
    let mut nodal_cells = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let c = [idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)];
            let s = c.map(pos);
            let edges = [2 * c[0], 2 * c[1] + 1, 2 * c[3], 2 * c[0] + 1];
            let crosses = [s[0] != s[1], s[1] != s[2], s[3] != s[2], s[0] != s[3]];
            let count = crosses.iter().filter(|&&b| b).count();
            match count {
                0 => continue,
                2 => {
                    let e: Vec<usize> = (0..4).filter(|&k| crosses[k]).map(|k| edges[k]).collect();
                    link(e[0], e[1]);
                }
                _ => {
                    let centre = f.eval((i as f64 + 0.5) * h, (j as f64 + 0.5) * h) >= 0.0;
                    if centre == s[0] {
                        link(edges[0], edges[1]);
                        link(edges[2], edges[3]);
                    } else {
                        link(edges[0], edges[3]);
                        link(edges[1], edges[2]);
                    }
                }
            }
            nodal_cells.push((i, j));
        }
    }

    let mut visited = vec![false; 2 * n * n];
    let mut raw: Vec<Vec<[f64; 2]>> = Vec::new();
    for start in 0..2 * n * n {
        if visited[start] || adj[start][0] == usize::MAX {
            continue;
        }
        let mut cycle = Vec::new();
        let (mut prev, mut cur) = (usize::MAX, start);
        loop {
            visited[cur] = true;
            cycle.push(crossing(cur).expect("linked edge has a crossing"));
            let next = if adj[cur][0] != prev { adj[cur][0] } else { adj[cur][1] };
            if next == usize::MAX {
                return Err(Error::Consistency("open nodal polyline".into()));
            }
            prev = cur;
            cur = next;
            if cur == start {
                break;
            }
        }
        raw.push(cycle);
    }

    let offset = [0.5 * h * (2f64.sqrt() - 1.0), 0.5 * h * (3f64.sqrt() - 1.0)];
    let mut components: Vec<NodalComponent> = Vec::with_capacity(raw.len());
    let mut lifts: Vec<Vec<[f64; 2]>> = Vec::with_capacity(raw.len());
    for verts in raw {
        let mut lifted = vec![verts[0]];
        let mut crossings = [0i64; 2];
        for k in 0..verts.len() {
            let (a, b) = (verts[k], verts[(k + 1) % verts.len()]);
            let d = [wrap_angle(b[0] - a[0]), wrap_angle(b[1] - a[1])];
            let last = *lifted.last().expect("nonempty");
            let next = [last[0] + d[0], last[1] + d[1]];
            for c in 0..2 {
                let before = ((last[c] - offset[c]) / TAU).floor() as i64;
                let after = ((next[c] - offset[c]) / TAU).floor() as i64;
                crossings[c] += after - before;
            }
            lifted.push(next);
        }
        let end = *lifted.last().expect("nonempty");
        let disp = [(end[0] - lifted[0][0]) / TAU, (end[1] - lifted[0][1]) / TAU];
        let class = [disp[0].round() as i64, disp[1].round() as i64];
        if (disp[0] - class[0] as f64).abs() > 1e-6 || (disp[1] - class[1] as f64).abs() > 1e-6 {
            return Err(Error::Consistency(format!("non-integral winding {disp:?}")));
        }
        lifted.pop();
        let min_gradient = verts
            .iter()
            .map(|p| {
                let g = f.gradient(p[0], p[1]);
                g[0].hypot(g[1])
            })
            .fold(f64::INFINITY, f64::min);
        components.push(NodalComponent {
            vertices: verts,
            homology: normalize_class(class),
            crossing_homology: normalize_class(crossings),
            min_gradient,
            nesting_depth: 0,
            bounds_disk: false,
        });
        lifts.push(lifted);
    }

    assign_nesting(&mut components, &lifts);

    let mut margin = components.iter().map(|c| c.min_gradient).fold(f64::INFINITY, f64::min);
    margin = margin.min(critical_points_on_zero_set(f, &nodal_cells, h));
    Ok(NodalCurveSet {
        grid: n,
        components,
        margin,
        irregular_suspected: margin < IRREGULAR_THRESHOLD,
    })
}

fn point_in_polygon(p: [f64; 2], poly: &[[f64; 2]]) -> bool {
    let mut inside = false;
    let mut j = poly.len() - 1;
    for i in 0..poly.len() {
        let (a, b) = (poly[i], poly[j]);
        if (a[1] > p[1]) != (b[1] > p[1]) && p[0] < (b[0] - a[0]) * (p[1] - a[1]) / (b[1] - a[1]) + a[0] {
            inside = !inside;
        }
        j = i;
    }
    inside
}

/// Whether some lattice translate of `p` lies inside the closed lift `poly`.
fn encloses(poly: &[[f64; 2]], p: [f64; 2]) -> bool {
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for v in poly {
        for c in 0..2 {
            lo[c] = lo[c].min(v[c]);
            hi[c] = hi[c].max(v[c]);
        }
    }
    let range = |c: usize| {
        let a = ((lo[c] - p[c]) / TAU).floor() as i64;
        let b = ((hi[c] - p[c]) / TAU).ceil() as i64;
        a..=b
    };
    for a in range(0) {
        for b in range(1) {
            let q = [p[0] + TAU * a as f64, p[1] + TAU * b as f64];
            if q[0] >= lo[0] && q[0] <= hi[0] && q[1] >= lo[1] && q[1] <= hi[1] && point_in_polygon(q, poly) {
                return true;
            }
        }
    }
    false
}

fn assign_nesting(components: &mut [NodalComponent], lifts: &[Vec<[f64; 2]>]) {
    let n = components.len();
    let contractible: Vec<bool> = components.iter().map(NodalComponent::is_contractible).collect();
    // inside[i][j]: component j lies inside contractible component i
    let mut inside = vec![vec![false; n]; n];
    for i in (0..n).filter(|&i| contractible[i]) {
        for j in (0..n).filter(|&j| j != i) {
            inside[i][j] = encloses(&lifts[i], components[j].vertices[0]);
        }
    }
    for j in 0..n {
        components[j].nesting_depth = (0..n).filter(|&i| inside[i][j]).count();
        components[j].bounds_disk = contractible[j] && !inside[j].iter().any(|&b| b);
    }
}

/// Smallest `|grad f|` at critical points of `f` (found by Newton from the
/// centres of nodal cells) that lie on the zero set.
fn critical_points_on_zero_set(f: &T2Eigenfunction, cells: &[(usize, usize)], h: f64) -> f64 {
    let scale = f.amplitude();
    let mut best = f64::INFINITY;
    for &(i, j) in cells {
        let (cx, cy) = ((i as f64 + 0.5) * h, (j as f64 + 0.5) * h);
        let (mut x, mut y) = (cx, cy);
        let mut converged = false;
        for _ in 0..30 {
            let g = f.gradient(x, y);
            let hs = f.hessian(x, y);
            let det = hs[0][0] * hs[1][1] - hs[0][1] * hs[1][0];
            if det.abs() < 1e-300 {
                break;
            }
            let dx = (hs[1][1] * g[0] - hs[0][1] * g[1]) / det;
            let dy = (hs[0][0] * g[1] - hs[1][0] * g[0]) / det;
            x -= dx;
            y -= dy;
            if dx.hypot(dy) < 1e-14 {
                converged = true;
                break;
            }
        }
        let near = wrap_angle(x - cx).abs() <= 2.0 * h && wrap_angle(y - cy).abs() <= 2.0 * h;
        if converged && near && f.eval(x, y).abs() <= 1e-8 * scale {
            let g = f.gradient(x, y);
            best = best.min(g[0].hypot(g[1]));
        }
    }
    best
}

/// Same as [`NodalCurveSet::margin`] for an already extracted set.
pub fn regularity_margin(_f: &T2Eigenfunction, curves: &NodalCurveSet) -> f64 {
    curves.margin
}

/// Outcome of [`search_contractible`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchCertificate {
    pub trial: usize,
    pub eigenfunction: T2Eigenfunction,
    pub curves: NodalCurveSet,
}

/// Random search for an eigenfunction whose nodal set is regular,
/// disconnected and has a contractible component.
///
/// Two lattice directions (up to sign) never suffice: in the coordinates
/// `(k.x, k'.x)` such an `f` becomes `a cos(X + p) + b cos(Y + q)`, whose
/// regular nodal curves are graphs over a circle, and the covering map is
/// injective on homology. So at least three representatives are required.
pub fn search_contractible(lambda: u32, trials: usize, seed: u64, n: usize) -> Result<SearchCertificate> {
    use rayon::prelude::*;
    let reps = lattice_representatives(lambda);
    if reps.len() < 3 {
        return Err(Error::Inapplicable(format!(
            "eigenvalue {lambda} has {} lattice direction(s) up to sign; contractible nodal curves need at least 3",
            reps.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let candidates: Vec<T2Eigenfunction> = (0..trials)
        .map(|_| T2Eigenfunction::random(lambda, &mut rng))
        .collect::<Result<_>>()?;
    let outcomes: Vec<Result<NodalCurveSet>> = candidates.par_iter().map(|f| extract_nodal_set(f, n)).collect();
    let mut best_margin: f64 = 0.0;
    for (trial, (f, out)) in candidates.into_iter().zip(outcomes).enumerate() {
        let curves = out?;
        if curves.certifies_overtwisted() {
            return Ok(SearchCertificate {
                trial,
                eigenfunction: f,
                curves,
            });
        }
        best_margin = best_margin.max(curves.margin);
    }
    Err(Error::SearchFailed { trials, best_margin })
}

/// Homogeneous polynomial in three variables.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Poly3 {
    terms: BTreeMap<[u32; 3], f64>,
}

impl Poly3 {
    pub fn monomial(e: [u32; 3], c: f64) -> Self {
        let mut terms = BTreeMap::new();
        if c != 0.0 {
            terms.insert(e, c);
        }
        Self { terms }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (e, c) in &o.terms {
            *terms.entry(*e).or_insert(0.0) += c;
        }
        terms.retain(|_, c| *c != 0.0);
        Self { terms }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut terms = BTreeMap::new();
        for (a, ca) in &self.terms {
            for (b, cb) in &o.terms {
                *terms.entry([a[0] + b[0], a[1] + b[1], a[2] + b[2]]).or_insert(0.0) += ca * cb;
            }
        }
        terms.retain(|_, c| *c != 0.0);
        Self { terms }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            terms: self.terms.iter().map(|(e, c)| (*e, c * s)).filter(|(_, c)| *c != 0.0).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::monomial([0, 0, 0], 1.0), |acc, _| acc.mul(self))
    }

    pub fn eval(&self, u: &Vec3) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| c * u[0].powi(e[0] as i32) * u[1].powi(e[1] as i32) * u[2].powi(e[2] as i32))
            .sum()
    }

    pub fn partial(&self, var: usize) -> Self {
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            if e[var] > 0 {
                let mut d = *e;
                d[var] -= 1;
                *terms.entry(d).or_insert(0.0) += c * f64::from(e[var]);
            }
        }
        Self { terms }
    }

    pub fn laplacian(&self) -> Self {
        (0..3).fold(Self::default(), |acc, v| acc.add(&self.partial(v).partial(v)))
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.abs()))
    }
}

fn legendre_coeffs(k: u32) -> Vec<f64> {
    let mut p0 = vec![1.0];
    let mut p1 = vec![0.0, 1.0];
    if k == 0 {
        return p0;
    }
    for n in 2..=k {
        let nf = f64::from(n);
        let mut p2 = vec![0.0; n as usize + 1];
        for (i, c) in p1.iter().enumerate() {
            p2[i + 1] += (2.0 * nf - 1.0) / nf * c;
        }
        for (i, c) in p0.iter().enumerate() {
            p2[i] -= (nf - 1.0) / nf * c;
        }
        p0 = p1;
        p1 = p2;
    }
    p1
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Real orthonormal spherical harmonic of degree `k`, as a harmonic
/// homogeneous polynomial. `order` 0 is zonal; `2m-1` and `2m` are the
/// `cos(m phi)` and `sin(m phi)` harmonics.
pub fn real_harmonic(k: u32, order: usize) -> Poly3 {
    let m = order.div_ceil(2) as u32;
    let sine = order > 0 && order.is_multiple_of(2);
    let mut d = legendre_coeffs(k);
    for _ in 0..m {
        d = d.iter().enumerate().skip(1).map(|(i, c)| c * i as f64).collect();
    }
    let r2 = Poly3::monomial([2, 0, 0], 1.0)
        .add(&Poly3::monomial([0, 2, 0], 1.0))
        .add(&Poly3::monomial([0, 0, 2], 1.0));
    let mut q = Poly3::default();
    for (j, c) in d.iter().enumerate() {
        let rest = k - m - j as u32;
        if *c == 0.0 || rest % 2 == 1 {
            continue;
        }
        q = q.add(&Poly3::monomial([0, 0, j as u32], *c).mul(&r2.pow(rest / 2)));
    }
    let mut ang = Poly3::default();
    for l in 0..=m {
        let binom = factorial(m) / (factorial(l) * factorial(m - l));
        let sign = if (l / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if (l % 2 == 1) == sine {
            ang = ang.add(&Poly3::monomial([m - l, l, 0], sign * binom));
        }
    }
    let mut norm = ((2.0 * f64::from(k) + 1.0) / (4.0 * PI) * factorial(k - m) / factorial(k + m)).sqrt();
    if m > 0 {
        norm *= 2f64.sqrt();
    }
    q.mul(&ang).scale(norm)
}

/// Combination of the `2k + 1` real harmonics of degree `k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct S2Eigenfunction {
    degree: u32,
    coeffs: Vec<f64>,
    poly: Poly3,
}

impl S2Eigenfunction {
    pub fn new(degree: u32, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != 2 * degree as usize + 1 {
            return Err(Error::InvalidArgument(format!(
                "degree {degree} needs {} coefficients, got {}",
                2 * degree + 1,
                coeffs.len()
            )));
        }
        if coeffs.iter().all(|&c| c == 0.0) {
            return Err(Error::VanishingField { norm: 0.0 });
        }
        let poly = coeffs
            .iter()
            .enumerate()
            .fold(Poly3::default(), |acc, (o, &c)| acc.add(&real_harmonic(degree, o).scale(c)));
        Ok(Self { degree, coeffs, poly })
    }

    pub fn random<R: rand::Rng + ?Sized>(degree: u32, rng: &mut R) -> Result<Self> {
        let coeffs = (0..2 * degree + 1).map(|_| rng.sample(StandardNormal)).collect();
        Self::new(degree, coeffs)
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn poly(&self) -> &Poly3 {
        &self.poly
    }

    pub fn eval(&self, u: &Vec3) -> f64 {
        self.poly.eval(u)
    }

    /// Gradient of the homogeneous extension to `R^3`.
    pub fn gradient(&self, u: &Vec3) -> Vec3 {
        [
            self.poly.partial(0).eval(u),
            self.poly.partial(1).eval(u),
            self.poly.partial(2).eval(u),
        ]
    }

    /// Gradient along the unit sphere at a unit vector `u`.
    pub fn tangential_gradient(&self, u: &Vec3) -> Vec3 {
        let g = self.gradient(u);
        let r = dot(&g, u);
        [g[0] - r * u[0], g[1] - r * u[1], g[2] - r * u[2]]
    }
}

pub fn s2_eigenfunction(k: u32, coeffs: Vec<f64>) -> Result<S2Eigenfunction> {
    S2Eigenfunction::new(k, coeffs)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct S2NodalReport {
    pub nonempty: bool,
    pub crossings: usize,
    /// Minimum tangential `|grad f|` at the detected nodal points.
    pub margin: f64,
}

fn sphere_point(theta: f64, phi: f64) -> Vec3 {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    [st * cp, st * sp, ct]
}

/// Nodal points on the edges of an `n x 2n` latitude-longitude grid with
/// cell-centred colatitudes, plus edges joining each pole to its nearest ring.
pub fn s2_nodal_regularity(f: &S2Eigenfunction, n: usize) -> S2NodalReport {
    let n = n.max(4);
    let nphi = 2 * n;
    let dt = PI / n as f64;
    let dp = TAU / nphi as f64;
    let pts: Vec<Vec<Vec3>> = (0..n)
        .map(|i| (0..nphi).map(|j| sphere_point((i as f64 + 0.5) * dt, j as f64 * dp)).collect())
        .collect();
    let vals: Vec<Vec<f64>> = pts.iter().map(|row| row.iter().map(|p| f.eval(p)).collect()).collect();
    let mut edges: Vec<(Vec3, f64, Vec3, f64)> = Vec::new();
    for i in 0..n {
        for j in 0..nphi {
            let jn = (j + 1) % nphi;
            edges.push((pts[i][j], vals[i][j], pts[i][jn], vals[i][jn]));
            if i + 1 < n {
                edges.push((pts[i][j], vals[i][j], pts[i + 1][j], vals[i + 1][j]));
            }
        }
    }
    for (pole, ring) in [([0.0, 0.0, 1.0], 0usize), ([0.0, 0.0, -1.0], n - 1)] {
        let fp = f.eval(&pole);
        for j in 0..nphi {
            edges.push((pole, fp, pts[ring][j], vals[ring][j]));
        }
    }
    let mut crossings = 0;
    let mut margin = f64::INFINITY;
    for (a, fa, b, fb) in edges {
        if (fa >= 0.0) == (fb >= 0.0) {
            continue;
        }
        crossings += 1;
        let t = fa / (fa - fb);
        let mut p = [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]), a[2] + t * (b[2] - a[2])];
        let r = norm(&p);
        p = [p[0] / r, p[1] / r, p[2] / r];
        margin = margin.min(norm(&f.tangential_gradient(&p)));
    }
    S2NodalReport {
        nonempty: crossings > 0,
        crossings,
        margin,
    }
}

/// Random eigenfunction on `T^2` from a seed, for the command line.
pub fn seeded_t2(lambda: u32, seed: u64) -> Result<T2Eigenfunction> {
    T2Eigenfunction::random(lambda, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Random degree-`k` harmonic from a seed.
pub fn seeded_s2(k: u32, seed: u64) -> Result<S2Eigenfunction> {
    S2Eigenfunction::random(k, &mut ChaCha8Rng::seed_from_u64(seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::GaussLegendre;
    use proptest::prelude::*;

    fn single(k: [i32; 2], a: f64, b: f64) -> T2Mode {
        T2Mode { k, a, b }
    }

    #[test]
    fn sine_has_two_vertical_lines() {
        let f = T2Eigenfunction::new(1, vec![single([1, 0], 0.0, 1.0)]).unwrap();
        let c = extract_nodal_set(&f, 64).unwrap();
        assert_eq!(c.components.len(), 2);
        for comp in &c.components {
            assert_eq!(comp.homology, [0, 1]);
            assert_eq!(comp.crossing_homology, comp.homology);
            assert!(!comp.bounds_disk);
        }
        assert!((c.margin - 1.0).abs() < 1e-12);
        assert!(c.is_regular() && !c.certifies_overtwisted());
    }

    #[test]
    fn diagonal_lines() {
        // cos x1 + cos x2 = 2 cos((x1+x2)/2) cos((x1-x2)/2): lines x1 +- x2 = pi
        let f = T2Eigenfunction::new(1, vec![single([1, 0], 1.0, 0.0), single([0, 1], 1.0, 0.0)]).unwrap();
        let c = extract_nodal_set(&f, 64).unwrap();
        // the two lines cross at (0, pi) and (pi, 0), where the gradient
        // vanishes, so the resolved topology is not meaningful
        assert!(c.irregular_suspected);
        assert!(!c.certifies_overtwisted());
    }

    #[test]
    fn product_of_sines_is_irregular() {
        let f = T2Eigenfunction::new(2, vec![single([1, 1], 0.5, 0.0), single([1, -1], -0.5, 0.0)]).unwrap();
        // 0.5 cos(x1+x2) - 0.5 cos(x1-x2) = -sin x1 sin x2
        assert!((f.eval(0.3, 0.9) + 0.3f64.sin() * 0.9f64.sin()).abs() < 1e-15);
        let c = extract_nodal_set(&f, 64).unwrap();
        assert!(c.irregular_suspected);
        assert!(c.margin < 1e-6);
    }

    #[test]
    fn oval_from_three_directions() {
        // cos 5x1 + cos 5x2 has lines; adding a (3,4) mode splits them into ovals
        let f = T2Eigenfunction::new(
            25,
            vec![
                single([5, 0], 1.0, 0.0),
                single([0, 5], 1.0, 0.0),
                single([3, 4], 0.4, 0.0),
            ],
        )
        .unwrap();
        let c = extract_nodal_set(&f, 256).unwrap();
        for comp in &c.components {
            assert_eq!(comp.homology, comp.crossing_homology);
        }
        let c2 = extract_nodal_set(&f, 512).unwrap();
        if c.is_regular() {
            assert_eq!(c.homology_multiset(), c2.homology_multiset());
        }
    }

    #[test]
    fn grid_minimum_enforced() {
        let f = T2Eigenfunction::new(1, vec![single([1, 0], 0.0, 1.0)]).unwrap();
        assert!(extract_nodal_set(&f, 32).is_err());
    }

    #[test]
    fn eigenfunction_validation() {
        assert!(matches!(
            T2Eigenfunction::new(2, vec![single([1, 0], 1.0, 0.0)]),
            Err(Error::NotEigenfunction(_))
        ));
        assert!(matches!(
            T2Eigenfunction::new(1, vec![single([1, 0], 0.0, 0.0)]),
            Err(Error::VanishingField { .. })
        ));
    }

    #[test]
    fn lattice_counts() {
        assert_eq!(lattice_representatives(1).len(), 2);
        assert_eq!(lattice_representatives(2).len(), 2);
        assert_eq!(lattice_representatives(5).len(), 4);
        assert_eq!(lattice_representatives(25).len(), 6);
        assert!(lattice_representatives(3).is_empty());
    }

    #[test]
    fn search_rejects_too_few_directions() {
        for lambda in [1, 2, 4] {
            assert!(matches!(search_contractible(lambda, 5, 1, 64), Err(Error::Inapplicable(_))));
        }
    }

    #[test]
    fn search_finds_oval_and_refines() {
        let cert = search_contractible(25, 100, 7, 256).unwrap();
        assert!(cert.curves.certifies_overtwisted());
        assert!(cert.curves.components.iter().any(|c| c.bounds_disk));
        let fine = extract_nodal_set(&cert.eigenfunction, 512).unwrap();
        assert_eq!(fine.homology_multiset(), cert.curves.homology_multiset());
        for comp in &cert.curves.components {
            assert_eq!(comp.homology, comp.crossing_homology);
        }
        // deterministic under the seed
        let again = search_contractible(25, 100, 7, 256).unwrap();
        assert_eq!(again.trial, cert.trial);
    }

    #[test]
    fn harmonics_are_harmonic_and_orthonormal() {
        let gl = GaussLegendre::new(24);
        for k in 0..=4u32 {
            let basis: Vec<Poly3> = (0..2 * k as usize + 1).map(|o| real_harmonic(k, o)).collect();
            for b in &basis {
                assert!(b.laplacian().max_abs_coefficient() < 1e-10);
            }
            for (i, a) in basis.iter().enumerate() {
                for (j, b) in basis.iter().enumerate() {
                    let mut acc = 0.0;
                    for (t, w) in gl.on_interval(-1.0, 1.0) {
                        for q in 0..32 {
                            let phi = TAU * q as f64 / 32.0;
                            let p = sphere_point(t.acos(), phi);
                            acc += w * TAU / 32.0 * a.eval(&p) * b.eval(&p);
                        }
                    }
                    let target = if i == j { 1.0 } else { 0.0 };
                    assert!((acc - target).abs() < 1e-10, "k={k} ({i},{j}) {acc}");
                }
            }
        }
    }

    #[test]
    fn s2_equator() {
        let f = S2Eigenfunction::new(1, vec![1.0, 0.0, 0.0]).unwrap();
        // the zonal degree-1 harmonic is proportional to z
        assert!(f.eval(&[1.0, 0.0, 0.0]).abs() < 1e-15);
        let r = s2_nodal_regularity(&f, 32);
        assert!(r.nonempty);
        let c = (3.0 / (4.0 * PI)).sqrt();
        assert!((r.margin - c).abs() < 1e-12);
    }

    #[test]
    fn s2_random_degree_two() {
        let f = seeded_s2(2, 3).unwrap();
        let r = s2_nodal_regularity(&f, 64);
        assert!(r.nonempty && r.margin > 0.0);
    }

    proptest! {
        #[test]
        fn positive_degree_has_nodal_points(k in 1u32..5, seed in 0u64..1000) {
            let f = seeded_s2(k, seed).unwrap();
            prop_assert!(s2_nodal_regularity(&f, 48).nonempty);
        }

        #[test]
        fn homology_oracles_agree(seed in 0u64..40) {
            let f = seeded_t2(5, seed).unwrap();
            let c = extract_nodal_set(&f, 128).unwrap();
            for comp in &c.components {
                prop_assert_eq!(comp.homology, comp.crossing_homology);
            }
        }

        #[test]
        fn eigen_identity(seed in 0u64..100, x in 0.0f64..6.28, y in 0.0f64..6.28) {
            let f = seeded_t2(25, seed).unwrap();
            let h = f.hessian(x, y);
            prop_assert!((h[0][0] + h[1][1] + 25.0 * f.eval(x, y)).abs() < 1e-9);
        }
    }
}
