use super::Quaternion;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::ops::{Add, Index, IndexMut, Sub};

/// Point (¹z, …, ⁿz) of H^n.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HPoint(Vec<Quaternion>);

impl HPoint {
    pub fn new(coords: Vec<Quaternion>) -> Self {
        assert!(!coords.is_empty(), "HPoint needs at least one slot");
        Self(coords)
    }

    pub fn single(q: Quaternion) -> Self {
        Self(vec![q])
    }

    pub fn zeros(n: usize) -> Self {
        Self::new(vec![Quaternion::ZERO; n])
    }

    /// Builds a point from its 4n real coordinates.
    pub fn from_real(x: &[f64]) -> Self {
        assert!(x.len().is_multiple_of(4) && !x.is_empty(), "real length must be a positive multiple of 4");
        Self(x.chunks_exact(4).map(|c| Quaternion::new(c[0], c[1], c[2], c[3])).collect())
    }

    pub fn to_real(&self) -> Vec<f64> {
        self.0.iter().flat_map(|q| q.to_array()).collect()
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Quaternion] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Quaternion> {
        self.0.iter()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|q| q.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.iter().map(|q| *q * s).collect())
    }

    /// Slotwise left multiplication a·ˡz.
    pub fn left_mul(&self, a: Quaternion) -> Self {
        Self(self.0.iter().map(|q| a * *q).collect())
    }

    /// Slotwise right multiplication ˡz·b.
    pub fn right_mul(&self, b: Quaternion) -> Self {
        Self(self.0.iter().map(|q| *q * b).collect())
    }

    /// Adds `delta` to real coordinate `idx` (0-based over the 4n reals).
    pub fn shifted(&self, idx: usize, delta: f64) -> Self {
        let mut x = self.to_real();
        x[idx] += delta;
        Self::from_real(&x)
    }

    pub fn dist(&self, o: &Self) -> f64 {
        (self - o).norm()
    }

    /// Canonical scalar product ⟨ζ; z⟩ = Σ ˡζ~ ˡz.
    pub fn scalar_product(&self, z: &Self) -> Result<Quaternion> {
        if self.n() != z.n() {
            return Err(Error::Dimension { expected: self.n(), found: z.n() });
        }
        Ok(self.0.iter().zip(&z.0).map(|(a, b)| a.conj() * *b).sum())
    }
}

/// Free-function form of the canonical scalar product.
pub fn scalar_product(zeta: &HPoint, z: &HPoint) -> Result<Quaternion> {
    zeta.scalar_product(z)
}

impl Index<usize> for HPoint {
    type Output = Quaternion;
    fn index(&self, i: usize) -> &Quaternion {
        &self.0[i]
    }
}

impl IndexMut<usize> for HPoint {
    fn index_mut(&mut self, i: usize) -> &mut Quaternion {
        &mut self.0[i]
    }
}

impl Add for &HPoint {
    type Output = HPoint;
    fn add(self, o: &HPoint) -> HPoint {
        assert_eq!(self.n(), o.n(), "dimension mismatch");
        HPoint(self.0.iter().zip(&o.0).map(|(a, b)| *a + *b).collect())
    }
}

impl Sub for &HPoint {
    type Output = HPoint;
    fn sub(self, o: &HPoint) -> HPoint {
        assert_eq!(self.n(), o.n(), "dimension mismatch");
        HPoint(self.0.iter().zip(&o.0).map(|(a, b)| *a - *b).collect())
    }
}

impl From<Quaternion> for HPoint {
    fn from(q: Quaternion) -> Self {
        Self::single(q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pt(n: usize) -> impl Strategy<Value = HPoint> {
        prop::collection::vec(-2.0..2.0f64, 4 * n).prop_map(|v| HPoint::from_real(&v))
    }

    fn q() -> impl Strategy<Value = Quaternion> {
        prop::array::uniform4(-2.0..2.0f64).prop_map(Quaternion::from_array)
    }

    #[test]
    fn unit_examples() {
        let i = HPoint::single(Quaternion::I);
        let j = HPoint::single(Quaternion::J);
        assert_eq!(i.scalar_product(&i).unwrap(), Quaternion::E);
        assert_eq!(i.scalar_product(&j).unwrap(), -Quaternion::K);
        assert!(i.scalar_product(&HPoint::zeros(2)).is_err());
    }

    #[test]
    fn left_scalar_is_not_pulled_out_conjugated() {
        let zeta = HPoint::single(Quaternion::I);
        let z = HPoint::single(Quaternion::E);
        let a = Quaternion::J;
        let lhs = zeta.left_mul(a).scalar_product(&z).unwrap();
        let rhs = a.conj() * zeta.scalar_product(&z).unwrap();
        assert_eq!(lhs, Quaternion::K);
        assert_eq!(rhs, -Quaternion::K);
    }

    #[test]
    fn real_round_trip() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0];
        assert_eq!(HPoint::from_real(&x).to_real(), x.to_vec());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn scalar_product_axioms(z in pt(2), zeta in pt(2), xi in pt(2), a in q(), b in q()) {
            let sp = |u: &HPoint, v: &HPoint| u.scalar_product(v).unwrap();
            let s = sp(&zeta, &zeta);
            prop_assert!(s.vector().norm() < 1e-13 && s.w >= 0.0);
            prop_assert!(sp(&zeta, &(&z + &xi)).dist_inf(sp(&zeta, &z) + sp(&zeta, &xi)) < 1e-13);
            prop_assert!(sp(&(&zeta + &xi), &z).dist_inf(sp(&zeta, &z) + sp(&xi, &z)) < 1e-13);
            // homogeneity holds with the scalar acting on the right of each ζ slot
            let lhs = sp(&zeta.right_mul(a), &z.right_mul(b));
            prop_assert!(lhs.dist_inf(a.conj() * sp(&zeta, &z) * b) < 1e-12);
            prop_assert!(sp(&zeta, &z).conj().dist_inf(sp(&z, &zeta)) < 1e-13);
        }
    }
}
