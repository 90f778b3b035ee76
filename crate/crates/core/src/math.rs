//! Small fixed-size vector and tensor types shared by all field computations.

use core::ops::{Add, AddAssign, Mul, Neg, Sub};

pub const X: usize = 0;
pub const Y: usize = 1;
pub const Z: usize = 2;

/// 2D Levi-Civita symbol, `eps2(0,1) = 1`.
#[inline]
pub fn eps2(a: usize, b: usize) -> f64 {
    match (a, b) {
        (X, Y) => 1.0,
        (Y, X) => -1.0,
        _ => 0.0,
    }
}

/// 3D Levi-Civita symbol, `eps3(0,1,2) = 1`.
#[inline]
pub fn eps3(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (X, Y, Z) | (Y, Z, X) | (Z, X, Y) => 1.0,
        (X, Z, Y) | (Z, Y, X) | (Y, X, Z) => -1.0,
        _ => 0.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    #[inline]
    pub fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    #[inline]
    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        libm::hypot(self.x, self.y)
    }

    /// Counterclockwise rotation by 90 degrees.
    #[inline]
    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    #[inline]
    pub fn get(self, a: usize) -> f64 {
        match a {
            X => self.x,
            Y => self.y,
            _ => panic!("Vec2 index out of range"),
        }
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    #[inline]
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    #[inline]
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    #[inline]
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl AddAssign for Vec2 {
    #[inline]
    fn add_assign(&mut self, o: Vec2) {
        self.x += o.x;
        self.y += o.y;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 0.0 };

    #[inline]
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    #[inline]
    pub fn dot(self, other: Vec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    #[inline]
    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    #[inline]
    pub fn norm(self) -> f64 {
        libm::sqrt(self.dot(self))
    }

    #[inline]
    pub fn get(self, k: usize) -> f64 {
        match k {
            X => self.x,
            Y => self.y,
            Z => self.z,
            _ => panic!("Vec3 index out of range"),
        }
    }

    #[inline]
    pub fn set(&mut self, k: usize, v: f64) {
        match k {
            X => self.x = v,
            Y => self.y = v,
            Z => self.z = v,
            _ => panic!("Vec3 index out of range"),
        }
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    #[inline]
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    #[inline]
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    #[inline]
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl AddAssign for Vec3 {
    #[inline]
    fn add_assign(&mut self, o: Vec3) {
        self.x += o.x;
        self.y += o.y;
        self.z += o.z;
    }
}

/// Symmetric 3x3 tensor stored by its six independent components.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SymTensor3 {
    pub xx: f64,
    pub yy: f64,
    pub zz: f64,
    pub yz: f64,
    pub xz: f64,
    pub xy: f64,
}

impl SymTensor3 {
    pub const ZERO: SymTensor3 = SymTensor3 {
        xx: 0.0,
        yy: 0.0,
        zz: 0.0,
        yz: 0.0,
        xz: 0.0,
        xy: 0.0,
    };

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        match (a, b) {
            (X, X) => self.xx,
            (Y, Y) => self.yy,
            (Z, Z) => self.zz,
            (Y, Z) => self.yz,
            (X, Z) => self.xz,
            (X, Y) => self.xy,
            _ => panic!("SymTensor3 index out of range"),
        }
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        match (a, b) {
            (X, X) => self.xx = v,
            (Y, Y) => self.yy = v,
            (Z, Z) => self.zz = v,
            (Y, Z) => self.yz = v,
            (X, Z) => self.xz = v,
            (X, Y) => self.xy = v,
            _ => panic!("SymTensor3 index out of range"),
        }
    }

    pub fn trace(&self) -> f64 {
        self.xx + self.yy + self.zz
    }

    pub fn max_abs(&self) -> f64 {
        let mut m = 0.0f64;
        for v in [self.xx, self.yy, self.zz, self.yz, self.xz, self.xy] {
            m = m.max(v.abs());
        }
        m
    }

    pub fn is_finite(&self) -> bool {
        [self.xx, self.yy, self.zz, self.yz, self.xz, self.xy]
            .iter()
            .all(|v| v.is_finite())
    }
}

impl Add for SymTensor3 {
    type Output = SymTensor3;
    fn add(self, o: SymTensor3) -> SymTensor3 {
        SymTensor3 {
            xx: self.xx + o.xx,
            yy: self.yy + o.yy,
            zz: self.zz + o.zz,
            yz: self.yz + o.yz,
            xz: self.xz + o.xz,
            xy: self.xy + o.xy,
        }
    }
}

impl Sub for SymTensor3 {
    type Output = SymTensor3;
    fn sub(self, o: SymTensor3) -> SymTensor3 {
        SymTensor3 {
            xx: self.xx - o.xx,
            yy: self.yy - o.yy,
            zz: self.zz - o.zz,
            yz: self.yz - o.yz,
            xz: self.xz - o.xz,
            xy: self.xy - o.xy,
        }
    }
}

impl Mul<f64> for SymTensor3 {
    type Output = SymTensor3;
    fn mul(self, s: f64) -> SymTensor3 {
        SymTensor3 {
            xx: self.xx * s,
            yy: self.yy * s,
            zz: self.zz * s,
            yz: self.yz * s,
            xz: self.xz * s,
            xy: self.xy * s,
        }
    }
}

impl AddAssign for SymTensor3 {
    fn add_assign(&mut self, o: SymTensor3) {
        *self = *self + o;
    }
}

/// Pairwise (cascade) summation: deterministic and accurate for long sums.
pub fn pairwise_sum(values: &mut [f64]) -> f64 {
    fn rec(v: &[f64]) -> f64 {
        match v.len() {
            0 => 0.0,
            1 => v[0],
            2 => v[0] + v[1],
            n => rec(&v[..n / 2]) + rec(&v[n / 2..]),
        }
    }
    rec(values)
}

/// Compensated (Kahan) accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    c: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, v: f64) {
        let y = v - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum
    }
}
