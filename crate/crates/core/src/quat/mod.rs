//! Quaternions, points of H^n, the 2x2 complex matrix model and loop arguments.

mod hpoint;
mod matrix;
mod path;

pub use hpoint::{scalar_product, HPoint};
pub use matrix::{mat_mul, MatrixModel};
pub use path::{delta_arg, PathSpec};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

/// Element of H in the basis {e, i, j, k}.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 4]", into = "[f64; 4]")]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const ZERO: Self = Self::new(0.0, 0.0, 0.0, 0.0);
    pub const E: Self = Self::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Self = Self::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Self = Self::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Self = Self::new(0.0, 0.0, 0.0, 1.0);
    /// The basis units S_1..S_4 = e, i, j, k.
    pub const BASIS: [Self; 4] = [Self::E, Self::I, Self::J, Self::K];

    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self { w, x, y, z }
    }

    pub const fn real(w: f64) -> Self {
        Self::new(w, 0.0, 0.0, 0.0)
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn component(self, m: usize) -> f64 {
        self.to_array()[m]
    }

    pub fn conj(self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn norm_sqr(self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Imaginary part as a quaternion.
    pub fn vector(self) -> Self {
        Self::new(0.0, self.x, self.y, self.z)
    }

    /// Euclidean inner product of the coefficient 4-vectors, Re(a~ b).
    pub fn dot(self, o: Self) -> f64 {
        self.w * o.w + self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn inv(self) -> Result<Self> {
        let n2 = self.norm_sqr();
        if n2 == 0.0 || !n2.is_finite() {
            return Err(Error::Domain("inverse of zero quaternion".into()));
        }
        Ok(self.conj() / n2)
    }

    /// Max-abs distance between coefficient vectors.
    pub fn dist_inf(self, o: Self) -> f64 {
        (self - o).to_array().iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }

    /// exp(a) = e^{Re a} (cos|v| + v/|v| sin|v|).
    pub fn exp(self) -> Self {
        let v = self.vector();
        let t = v.norm();
        let r = self.w.exp();
        if t == 0.0 {
            return Self::real(r);
        }
        (Self::real(t.cos()) + v * (t.sin() / t)) * r
    }

    /// Principal logarithm: angle in [0, pi] about the normalized imaginary axis.
    /// On the negative real axis the axis is taken to be i.
    pub fn ln(self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::Domain("logarithm of zero quaternion".into()));
        }
        let v = self.vector();
        let vn = v.norm();
        let theta = vn.atan2(self.w);
        let axis = if vn > 0.0 { v / vn } else { Self::I };
        Ok(Self::real(n.ln()) + axis * theta)
    }

    /// Real 4x4 matrix of q ↦ self * q, row-major over (w, x, y, z).
    pub fn left_matrix(self) -> [[f64; 4]; 4] {
        column_matrix(|b| self * b)
    }

    /// Real 4x4 matrix of q ↦ q * self.
    pub fn right_matrix(self) -> [[f64; 4]; 4] {
        column_matrix(|b| b * self)
    }
}

fn column_matrix(f: impl Fn(Quaternion) -> Quaternion) -> [[f64; 4]; 4] {
    let mut m = [[0.0; 4]; 4];
    for (c, s) in Quaternion::BASIS.iter().enumerate() {
        let img = f(*s).to_array();
        for r in 0..4 {
            m[r][c] = img[r];
        }
    }
    m
}

/// Free-function form of the Hamilton product.
pub fn qmul(a: Quaternion, b: Quaternion) -> Quaternion {
    a * b
}

pub fn qexp(a: Quaternion) -> Quaternion {
    a.exp()
}

pub fn qln(a: Quaternion) -> Result<Quaternion> {
    a.ln()
}

impl From<[f64; 4]> for Quaternion {
    fn from(a: [f64; 4]) -> Self {
        Self::from_array(a)
    }
}

impl From<Quaternion> for [f64; 4] {
    fn from(q: Quaternion) -> Self {
        q.to_array()
    }
}

impl Add for Quaternion {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Quaternion {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Quaternion {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.w, -self.x, -self.y, -self.z)
    }
}

impl AddAssign for Quaternion {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl SubAssign for Quaternion {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl Mul for Quaternion {
    type Output = Self;
    fn mul(self, b: Self) -> Self {
        let a = self;
        Self::new(
            a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
        )
    }
}

impl MulAssign for Quaternion {
    fn mul_assign(&mut self, o: Self) {
        *self = *self * o;
    }
}

impl Mul<f64> for Quaternion {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        Self::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }
}

impl Mul<Quaternion> for f64 {
    type Output = Quaternion;
    fn mul(self, q: Quaternion) -> Quaternion {
        q * self
    }
}

impl Div<f64> for Quaternion {
    type Output = Self;
    fn div(self, s: f64) -> Self {
        Self::new(self.w / s, self.x / s, self.y / s, self.z / s)
    }
}

impl std::iter::Sum for Quaternion {
    fn sum<I: Iterator<Item = Self>>(it: I) -> Self {
        it.fold(Self::ZERO, |a, b| a + b)
    }
}

impl std::fmt::Display for Quaternion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({:+.17e}, {:+.17e}, {:+.17e}, {:+.17e})", self.w, self.x, self.y, self.z)
    }
}

/// Unit purely imaginary quaternion M (M² = −e).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Quaternion", into = "Quaternion")]
pub struct PureUnit(Quaternion);

impl PureUnit {
    pub const I: Self = Self(Quaternion::I);
    pub const J: Self = Self(Quaternion::J);
    pub const K: Self = Self(Quaternion::K);

    /// Accepts q with vanishing real part and unit norm, both to 1e-12.
    pub fn new(q: Quaternion) -> Result<Self> {
        if q.w.abs() > 1e-12 || (q.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!("{q} is not a unit pure quaternion")));
        }
        Ok(Self(Quaternion::new(0.0, q.x, q.y, q.z)))
    }

    /// Normalizes the imaginary part of q.
    pub fn normalize(q: Quaternion) -> Result<Self> {
        let v = q.vector();
        let n = v.norm();
        if n == 0.0 {
            return Err(Error::Domain("zero imaginary part has no axis".into()));
        }
        Ok(Self(v / n))
    }

    pub fn get(self) -> Quaternion {
        self.0
    }

    /// exp(2 pi M s).
    pub fn turn(self, s: f64) -> Quaternion {
        (self.0 * (2.0 * PI * s)).exp()
    }
}

impl TryFrom<Quaternion> for PureUnit {
    type Error = Error;
    fn try_from(q: Quaternion) -> Result<Self> {
        Self::new(q)
    }
}

impl From<PureUnit> for Quaternion {
    fn from(m: PureUnit) -> Self {
        m.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q() -> impl Strategy<Value = Quaternion> {
        prop::array::uniform4(-3.0..3.0f64).prop_map(Quaternion::from_array)
    }

    #[test]
    fn units_multiply() {
        assert_eq!(Quaternion::I * Quaternion::J, Quaternion::K);
        assert_eq!(Quaternion::J * Quaternion::I, -Quaternion::K);
        for u in [Quaternion::I, Quaternion::J, Quaternion::K] {
            assert_eq!(u * u, -Quaternion::E);
        }
        let p = Quaternion::new(1.0, 1.0, 0.0, 0.0) * Quaternion::new(1.0, 0.0, 1.0, 0.0);
        assert_eq!(p, Quaternion::new(1.0, 1.0, 1.0, 1.0));
    }

    #[test]
    fn exp_and_ln_examples() {
        assert_eq!(qexp(Quaternion::ZERO), Quaternion::E);
        // truncated power series of exp(pi j)
        let a = Quaternion::J * PI;
        let mut term = Quaternion::E;
        let mut sum = Quaternion::E;
        for n in 1..60 {
            term = term * a / n as f64;
            sum += term;
        }
        assert!(qexp(a).dist_inf(sum) < 1e-12);
        assert!(qexp(a).dist_inf(-Quaternion::E) < 1e-12);
        assert!(qln(Quaternion::real(2.0)).unwrap().dist_inf(Quaternion::real(2f64.ln())) < 1e-15);
        assert!(qln(Quaternion::ZERO).is_err());
    }

    #[test]
    fn pure_unit_validation() {
        assert!(PureUnit::new(Quaternion::new(0.0, 0.6, 0.8, 0.0)).is_ok());
        assert!(PureUnit::new(Quaternion::new(0.1, 0.6, 0.8, 0.0)).is_err());
        let m = PureUnit::normalize(Quaternion::new(3.0, 1.0, 1.0, 0.0)).unwrap();
        assert!((m.get() * m.get()).dist_inf(-Quaternion::E) < 1e-15);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn associative_and_conj_reverses(a in q(), b in q(), c in q()) {
            prop_assert!(((a * b) * c).dist_inf(a * (b * c)) < 1e-12);
            prop_assert!((a * b).conj().dist_inf(b.conj() * a.conj()) < 1e-12);
        }

        #[test]
        fn norm_is_multiplicative(a in q(), b in q()) {
            prop_assert!(((a * b).norm() - a.norm() * b.norm()).abs() < 1e-12);
            prop_assert!((a.conj() * a).dist_inf(Quaternion::real(a.norm_sqr())) < 1e-12);
        }

        #[test]
        fn exp_modulus(a in q()) {
            prop_assert!((a.exp().norm() - a.w.exp()).abs() < 1e-12 * a.w.exp().max(1.0));
        }

        #[test]
        fn exp_inverts_ln(a in q()) {
            prop_assume!(a.norm() > 1e-6);
            let back = a.ln().unwrap().exp();
            prop_assert!(back.dist_inf(a) < 1e-12 * a.norm().max(1.0));
            let angle = a.ln().unwrap().vector().norm();
            prop_assert!((0.0..=PI).contains(&angle));
        }

        #[test]
        fn left_matrix_acts_like_product(a in q(), b in q()) {
            let m = a.left_matrix();
            let v = b.to_array();
            let img: Vec<f64> = (0..4).map(|r| (0..4).map(|c| m[r][c] * v[c]).sum()).collect();
            prop_assert!(Quaternion::from_array([img[0], img[1], img[2], img[3]]).dist_inf(a * b) < 1e-12);
        }
    }
}
