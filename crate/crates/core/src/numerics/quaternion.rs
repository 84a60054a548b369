use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// `w + x i + y j + z k`, with `i^2 = j^2 = k^2 = ijk = -1`.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);

    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self { w, x, y, z }
    }

    pub const fn real(w: f64) -> Self {
        Self::new(w, 0.0, 0.0, 0.0)
    }

    pub fn norm(&self) -> f64 {
        (self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn vector_norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }

    /// A `k`-th root from the polar form `|q| (cos a + n sin a)`, taking
    /// `a / k`. Negative reals use the axis `i`.
    pub fn root(&self, k: u32) -> Self {
        assert!(k >= 1, "root order must be positive");
        let r = self.norm();
        if r == 0.0 {
            return Self::default();
        }
        let vn = self.vector_norm();
        let (nx, ny, nz) = if vn > 0.0 {
            (self.x / vn, self.y / vn, self.z / vn)
        } else {
            (1.0, 0.0, 0.0)
        };
        let angle = vn.atan2(self.w) / k as f64;
        let mag = r.powf(1.0 / k as f64);
        let (s, c) = angle.sin_cos();
        Self::new(mag * c, mag * s * nx, mag * s * ny, mag * s * nz)
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    fn sub(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        self.scale(-1.0)
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, o: Quaternion) -> Quaternion {
        Quaternion::new(
            self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z,
            self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y,
            self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x,
            self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w,
        )
    }
}

/// A square root `r` with `r * r = q`.
///
/// Roots are not unique: a negative real has a whole sphere of them
/// (`sqrt|q| * u` for any unit pure quaternion `u`). The one returned then
/// is `sqrt|q| * i`.
pub fn quaternion_sqrt(q: Quaternion) -> Quaternion {
    let r = q.norm();
    let vn = q.vector_norm();
    if vn == 0.0 {
        return if q.w >= 0.0 {
            Quaternion::real(q.w.sqrt())
        } else {
            Quaternion::I.scale((-q.w).sqrt())
        };
    }
    // Pick the branch that avoids cancellation in r + w or r - w.
    let (a, b) = if q.w >= 0.0 {
        let a = ((r + q.w) / 2.0).sqrt();
        (a, vn / (2.0 * a))
    } else {
        let b = ((r - q.w) / 2.0).sqrt();
        (vn / (2.0 * b), b)
    };
    Quaternion::new(a, b * q.x / vn, b * q.y / vn, b * q.z / vn)
}
