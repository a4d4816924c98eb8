use super::Quaternion;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// z = t + u·j ↔ [[t, u], [−ū, t̄]] with t = w + x·i, u = y + z·i.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixModel {
    pub t: Complex64,
    pub u: Complex64,
}

impl MatrixModel {
    pub fn new(t: Complex64, u: Complex64) -> Self {
        Self { t, u }
    }

    pub fn to_quaternion(self) -> Quaternion {
        Quaternion::new(self.t.re, self.t.im, self.u.re, self.u.im)
    }

    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        [[self.t, self.u], [-self.u.conj(), self.t.conj()]]
    }

    /// Reads (t, u) back from the first row of a model matrix.
    pub fn from_matrix(m: [[Complex64; 2]; 2]) -> Self {
        Self::new(m[0][0], m[0][1])
    }

    pub fn norm_sqr(self) -> f64 {
        self.t.norm_sqr() + self.u.norm_sqr()
    }
}

impl From<Quaternion> for MatrixModel {
    fn from(q: Quaternion) -> Self {
        Self::new(Complex64::new(q.w, q.x), Complex64::new(q.y, q.z))
    }
}

impl From<MatrixModel> for Quaternion {
    fn from(m: MatrixModel) -> Self {
        m.to_quaternion()
    }
}

/// Product of two 2x2 complex matrices.
pub fn mat_mul(a: [[Complex64; 2]; 2], b: [[Complex64; 2]; 2]) -> [[Complex64; 2]; 2] {
    let mut c = [[Complex64::new(0.0, 0.0); 2]; 2];
    for r in 0..2 {
        for s in 0..2 {
            c[r][s] = a[r][0] * b[0][s] + a[r][1] * b[1][s];
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q() -> impl Strategy<Value = Quaternion> {
        prop::array::uniform4(-3.0..3.0f64).prop_map(Quaternion::from_array)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn round_trip_and_norm(a in q()) {
            let m = MatrixModel::from(a);
            prop_assert_eq!(m.to_quaternion(), a);
            prop_assert!((m.norm_sqr() - a.norm_sqr()).abs() < 1e-13);
        }

        #[test]
        fn product_is_matrix_product(a in q(), b in q()) {
            let prod = mat_mul(MatrixModel::from(a).matrix(), MatrixModel::from(b).matrix());
            let back = MatrixModel::from_matrix(prod).to_quaternion();
            prop_assert!(back.dist_inf(a * b) < 1e-12);
            // second row keeps the model shape
            prop_assert!((prod[1][0] + prod[0][1].conj()).norm() < 1e-12);
            prop_assert!((prod[1][1] - prod[0][0].conj()).norm() < 1e-12);
        }
    }
}
