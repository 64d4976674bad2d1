//! Curl eigenfields and Beltrami fields on the flat torus `T^3 = R^3 / (2 pi Z)^3`.
//!
//! Fields are finite Fourier sums, so curls are computed on the mode list
//! rather than by differencing.

use std::io::Write;

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::manifold::{torus_grid, T3Field, TorusPoint};
use crate::nodal::T2Eigenfunction;
use crate::vec3::{add, cross, dot, norm, scale, Vec3};
use crate::{Error, Result};

/// `cos(k.x) c + sin(k.x) s`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusMode {
    pub k: [i64; 3],
    pub cos: Vec3,
    pub sin: Vec3,
}

impl TorusMode {
    fn phase(&self, x: &Vec3) -> f64 {
        self.k[0] as f64 * x[0] + self.k[1] as f64 * x[1] + self.k[2] as f64 * x[2]
    }

    fn kf(&self) -> Vec3 {
        self.k.map(|c| c as f64)
    }
}

/// A positive curl eigenvalue kept as its square, which is an integer for
/// every field built here.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SquaredEigenvalue(pub u64);

impl SquaredEigenvalue {
    pub fn value(self) -> f64 {
        (self.0 as f64).sqrt()
    }
}

/// How a field was built, which decides the applicable classification.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum TorusOrigin {
    Wave(WaveSpec),
    Ansatz(T2Eigenfunction),
    Other,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusField {
    modes: Vec<TorusMode>,
    eigenvalue: Option<SquaredEigenvalue>,
    origin: TorusOrigin,
}

impl TorusField {
    pub fn new(modes: Vec<TorusMode>, eigenvalue: Option<SquaredEigenvalue>) -> Self {
        Self {
            modes,
            eigenvalue,
            origin: TorusOrigin::Other,
        }
    }

    pub fn modes(&self) -> &[TorusMode] {
        &self.modes
    }

    pub fn eigenvalue(&self) -> Option<SquaredEigenvalue> {
        self.eigenvalue
    }

    pub fn lambda(&self) -> Option<f64> {
        self.eigenvalue.map(SquaredEigenvalue::value)
    }

    pub fn origin(&self) -> &TorusOrigin {
        &self.origin
    }

    pub fn eval_at(&self, x: &Vec3) -> Vec3 {
        self.modes.iter().fold([0.0; 3], |acc, m| {
            let (s, c) = m.phase(x).sin_cos();
            add(&acc, &add(&scale(c, &m.cos), &scale(s, &m.sin)))
        })
    }

    /// Curl on the mode list: `curl(cos(k.x) c) = -sin(k.x) k x c` and
    /// `curl(sin(k.x) s) = cos(k.x) k x s`.
    pub fn curl(&self) -> TorusField {
        let modes = self
            .modes
            .iter()
            .map(|m| {
                let k = m.kf();
                TorusMode {
                    k: m.k,
                    cos: cross(&k, &m.sin),
                    sin: scale(-1.0, &cross(&k, &m.cos)),
                }
            })
            .collect();
        TorusField::new(modes, self.eigenvalue)
    }

    /// Largest coefficient of `curl V - lambda V`; zero up to coefficient
    /// roundoff for an eigenfield.
    pub fn eigen_coefficient_residual(&self) -> Option<f64> {
        let lambda = self.lambda()?;
        let c = self.curl();
        Some(
            c.modes
                .iter()
                .zip(&self.modes)
                .flat_map(|(a, b)| (0..3).flat_map(move |i| [a.cos[i] - lambda * b.cos[i], a.sin[i] - lambda * b.sin[i]]))
                .fold(0.0, |m: f64, r| m.max(r.abs())),
        )
    }

    /// Largest `|k . c|`, `|k . s|` over modes: zero iff the field is divergence free.
    pub fn divergence_coefficient(&self) -> f64 {
        self.modes
            .iter()
            .map(|m| dot(&m.kf(), &m.cos).abs().max(dot(&m.kf(), &m.sin).abs()))
            .fold(0.0, f64::max)
    }

    /// Jacobian rows `d V_i / d x_j`.
    pub fn jacobian(&self, x: &Vec3) -> [[f64; 3]; 3] {
        let mut j = [[0.0; 3]; 3];
        for m in &self.modes {
            let (s, c) = m.phase(x).sin_cos();
            let k = m.kf();
            for i in 0..3 {
                let d = -s * m.cos[i] + c * m.sin[i];
                for l in 0..3 {
                    j[i][l] += d * k[l];
                }
            }
        }
        j
    }

    /// Energy density `|d(V/c)|^2` of the normalized map when `|V| = c` is constant.
    pub fn gauss_energy_density(&self, x: &Vec3, c: f64) -> f64 {
        let j = self.jacobian(x);
        j.iter().flatten().map(|v| v * v).sum::<f64>() / (c * c)
    }

    /// Samples `x1,x2,x3,A,B,C` on an `n^3` grid.
    pub fn write_samples_csv<W: Write>(&self, n: usize, out: &mut W) -> Result<()> {
        writeln!(out, "x1,x2,x3,A,B,C")?;
        for p in torus_grid(n) {
            let v = self.eval_at(&p.x);
            writeln!(out, "{},{},{},{},{},{}", p.x[0], p.x[1], p.x[2], v[0], v[1], v[2])?;
        }
        Ok(())
    }
}

impl T3Field for TorusField {
    fn eval(&self, p: &TorusPoint) -> Vec3 {
        self.eval_at(&p.x)
    }

    fn exact_curl(&self, p: &TorusPoint) -> Option<Vec3> {
        Some(self.curl().eval_at(&p.x))
    }
}

/// Wave vector `k` and amplitude `b` with `b . k = 0` in exact arithmetic.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WaveSpec {
    pub k: [i64; 3],
    /// Numerators of `b` over the common denominator `den`.
    pub b_num: [i64; 3],
    pub den: i64,
}

impl WaveSpec {
    pub fn new(k: [i64; 3], b: [Rational64; 3]) -> Result<Self> {
        if k == [0; 3] {
            return Err(Error::InvalidArgument("wave vector k must be nonzero".into()));
        }
        if b.iter().all(Zero::is_zero) {
            return Err(Error::InvalidArgument("amplitude b must be nonzero".into()));
        }
        let den = b.iter().fold(1i64, |d, r| d.lcm(r.denom()));
        let b_num = b.map(|r| (r * Rational64::from_integer(den)).to_integer());
        let d = (0..3).map(|i| i128::from(b_num[i]) * i128::from(k[i])).sum::<i128>();
        if d != 0 {
            let dot = Rational64::new(1, den) * Rational64::from_integer(d as i64);
            return Err(Error::NotPerpendicular { dot: dot.to_string() });
        }
        Ok(Self { k, b_num, den })
    }

    pub fn from_integers(k: [i64; 3], b: [i64; 3]) -> Result<Self> {
        Self::new(k, b.map(Rational64::from_integer))
    }

    pub fn k_norm_sq(&self) -> u64 {
        self.k.iter().map(|c| (c * c) as u64).sum()
    }

    pub fn b(&self) -> Vec3 {
        self.b_num.map(|c| c as f64 / self.den as f64)
    }

    /// `k x (b x k) = |k|^2 b` and `b . k = 0` checked in integers. These
    /// are the identities behind `curl V_k = |k| V_k` and `|V_k| = |b|`.
    pub fn verify_identities(&self) -> bool {
        let k = self.k.map(i128::from);
        let b = self.b_num.map(i128::from);
        let cr = |a: [i128; 3], c: [i128; 3]| {
            [
                a[1] * c[2] - a[2] * c[1],
                a[2] * c[0] - a[0] * c[2],
                a[0] * c[1] - a[1] * c[0],
            ]
        };
        let bk = cr(b, k);
        let kk: i128 = k.iter().map(|c| c * c).sum();
        let lhs = cr(k, bk);
        let bk_sq: i128 = bk.iter().map(|c| c * c).sum();
        let b_sq: i128 = b.iter().map(|c| c * c).sum();
        (0..3).all(|i| lhs[i] == kk * b[i])
            && (0..3).map(|i| b[i] * k[i]).sum::<i128>() == 0
            && bk_sq == kk * b_sq
    }
}

/// Parses `p` or `p/q`.
pub fn parse_rational(s: &str) -> Result<Rational64> {
    let bad = || Error::InvalidArgument(format!("not a rational number: `{s}`"));
    let s = s.trim();
    match s.split_once('/') {
        Some((a, b)) => {
            let (a, b): (i64, i64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
            if b == 0 {
                return Err(bad());
            }
            Ok(Rational64::new(a, b))
        }
        None => Ok(Rational64::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// `V_k = cos(k.x) b + sin(k.x) (b x k) / |k|`, with `curl V_k = |k| V_k`.
pub fn build_vk(spec: &WaveSpec) -> TorusField {
    let k = spec.k.map(|c| c as f64);
    let b = spec.b();
    let kn = norm(&k);
    let mut f = TorusField::new(
        vec![TorusMode {
            k: spec.k,
            cos: b,
            sin: scale(1.0 / kn, &cross(&b, &k)),
        }],
        Some(SquaredEigenvalue(spec.k_norm_sq())),
    );
    f.origin = TorusOrigin::Wave(spec.clone());
    f
}

/// The standard form `sin(m x3) dx1 + cos(m x3) dx2` as a field, `m > 0`.
pub fn standard_form(m: i64) -> Result<TorusField> {
    if m <= 0 {
        return Err(Error::InvalidArgument(format!("standard form needs m > 0, got {m}")));
    }
    Ok(build_vk(&WaveSpec::from_integers([0, 0, m], [0, 1, 0])?))
}

/// `V = f_{x2} d/dx1 - f_{x1} d/dx2 + lambda f d/dx3` with `lambda^2` the
/// eigenvalue of `f`.
pub fn build_from_t2_eigenfunction(f: &T2Eigenfunction) -> TorusField {
    let lambda = f64::from(f.lambda()).sqrt();
    let modes = f
        .modes()
        .iter()
        .map(|m| {
            let (k1, k2) = (f64::from(m.k[0]), f64::from(m.k[1]));
            TorusMode {
                k: [i64::from(m.k[0]), i64::from(m.k[1]), 0],
                cos: [k2 * m.b, -k1 * m.b, lambda * m.a],
                sin: [-k2 * m.a, k1 * m.a, lambda * m.b],
            }
        })
        .collect();
    let mut v = TorusField::new(modes, Some(SquaredEigenvalue(u64::from(f.lambda()))));
    v.origin = TorusOrigin::Ansatz(f.clone());
    v
}

/// `V = sin(m x3) d/dx1 + cos(m x3) d/dx2` and `W = -sin(m x2) d/dx1 + cos(m x2) d/dx3`,
/// unit-norm eigenfields with eigenvalue `m` that align somewhere.
pub fn aligned_unit_pair(m: i64) -> Result<(TorusField, TorusField)> {
    if m <= 0 {
        return Err(Error::InvalidArgument(format!("m must be positive, got {m}")));
    }
    let v = standard_form(m)?;
    let w = TorusField::new(
        vec![TorusMode {
            k: [0, m, 0],
            cos: [0.0, 0.0, 1.0],
            sin: [-1.0, 0.0, 0.0],
        }],
        Some(SquaredEigenvalue((m * m) as u64)),
    );
    Ok((v, w))
}

/// `F(x) = slope x + sum_n (c_n cos(n x) + s_n sin(n x))`, so `F'` is periodic.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodicProfile {
    pub slope: f64,
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
}

impl PeriodicProfile {
    pub fn eval(&self, x: f64) -> f64 {
        let mut v = self.slope * x;
        for (i, c) in self.cos.iter().enumerate() {
            v += c * ((i + 1) as f64 * x).cos();
        }
        for (i, s) in self.sin.iter().enumerate() {
            v += s * ((i + 1) as f64 * x).sin();
        }
        v
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let mut v = self.slope;
        for (i, c) in self.cos.iter().enumerate() {
            let n = (i + 1) as f64;
            v -= c * n * (n * x).sin();
        }
        for (i, s) in self.sin.iter().enumerate() {
            let n = (i + 1) as f64;
            v += s * n * (n * x).cos();
        }
        v
    }
}

/// `V = cos(F(x3) - pi/4) d/dx1 + sin(F(x3) - pi/4) d/dx2`, a unit Beltrami
/// field with factor `-F'(x3)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShearBeltrami {
    profile: PeriodicProfile,
}

impl ShearBeltrami {
    /// Requires `F' < 0` on a grid of `n` points per period.
    pub fn new(profile: PeriodicProfile, n: usize) -> Result<Self> {
        let worst = (0..n.max(16))
            .map(|i| profile.derivative(std::f64::consts::TAU * i as f64 / n.max(16) as f64))
            .fold(f64::NEG_INFINITY, f64::max);
        if worst >= 0.0 {
            return Err(Error::InvalidArgument(format!("profile derivative reaches {worst}, must stay negative")));
        }
        Ok(Self { profile })
    }

    /// The profile `F(x) = -2x + cos x`, with factor `2 + sin x3`.
    pub fn standard() -> Self {
        Self {
            profile: PeriodicProfile {
                slope: -2.0,
                cos: vec![1.0],
                sin: vec![],
            },
        }
    }

    pub fn profile(&self) -> &PeriodicProfile {
        &self.profile
    }

    pub fn factor(&self, x: &Vec3) -> f64 {
        -self.profile.derivative(x[2])
    }
}

impl T3Field for ShearBeltrami {
    fn eval(&self, p: &TorusPoint) -> Vec3 {
        let (s, c) = (self.profile.eval(p.x[2]) - std::f64::consts::FRAC_PI_4).sin_cos();
        [c, s, 0.0]
    }

    fn exact_curl(&self, p: &TorusPoint) -> Option<Vec3> {
        Some(scale(self.factor(&p.x), &self.eval(p)))
    }
}
