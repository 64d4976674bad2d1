//! Small fixed-size vector helpers shared by the field modules.

pub type Vec3 = [f64; 3];
pub type Vec4 = [f64; 4];

#[inline]
pub fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub fn norm(a: &Vec3) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn scale(c: f64, a: &Vec3) -> Vec3 {
    [c * a[0], c * a[1], c * a[2]]
}

#[inline]
pub fn add(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn sub(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn max_abs(a: &Vec3) -> f64 {
    a[0].abs().max(a[1].abs()).max(a[2].abs())
}

#[inline]
pub fn dot4(a: &Vec4, b: &Vec4) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
}

#[inline]
pub fn axpy4(acc: &mut Vec4, c: f64, x: &Vec4) {
    for i in 0..4 {
        acc[i] += c * x[i];
    }
}

/// `|a x b| / (|a| |b|)`, the sine of the angle between two nonzero vectors.
#[inline]
pub fn normalized_cross(a: &Vec3, b: &Vec3) -> f64 {
    norm(&cross(a, b)) / (norm(a) * norm(b))
}
