use super::Layout;
use crate::error::{Error, Result};
use crate::forms::FormValue;
use crate::quat::{HPoint, Quaternion};
use std::f64::consts::PI;

/// Bochner-Martinelli kernel of C^N, N = 2n, in the complex coordinates
/// w = (t_1, ū_1, …, t_n, ū_n), with complex numbers embedded as span{e, i}.
///
/// K = c_N Σ_k (−1)^{k−1} (w̄_k − z̄_k) |w − z|^{−2N} dw̄_[k] ∧ dw, with
/// c_N = (N−1)!/(2πi)^N.
#[derive(Clone, Debug)]
pub struct MatrixModelKernel {
    n: usize,
    blocks: Vec<FormValue>,
}

fn complex_coords(g: Quaternion) -> [Quaternion; 2] {
    [Quaternion::new(g.w, g.x, 0.0, 0.0), Quaternion::new(g.y, -g.z, 0.0, 0.0)]
}

impl MatrixModelKernel {
    pub fn new(n: usize) -> Self {
        let layout = Layout::zeta(n);
        let dim = layout.dim();
        let mut dw = Vec::with_capacity(2 * n);
        for s in 0..n {
            let b = layout.zeta_index(s);
            dw.push(FormValue::one_form(dim, &[(b, Quaternion::E), (b + 1, Quaternion::I)]));
            dw.push(FormValue::one_form(dim, &[(b + 2, Quaternion::E), (b + 3, -Quaternion::I)]));
        }
        let dw_bar: Vec<FormValue> = dw.iter().map(|f| f.map(Quaternion::conj)).collect();
        let holo = dw.iter().fold(FormValue::scalar(dim, Quaternion::E), |acc, f| acc.wedge(f));
        let big_n = 2 * n;
        let fact: f64 = (1..big_n).map(|k| k as f64).product();
        let c = (0..big_n).fold(Quaternion::real(fact * (2.0 * PI).powi(-(big_n as i32))), |acc, _| acc * -Quaternion::I);
        let blocks = (0..big_n)
            .map(|k| {
                let anti = dw_bar
                    .iter()
                    .enumerate()
                    .filter(|(l, _)| *l != k)
                    .fold(FormValue::scalar(dim, Quaternion::E), |acc, (_, f)| acc.wedge(f));
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                anti.wedge(&holo).left_mul(c * sign)
            })
            .collect();
        Self { n, blocks }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn eval(&self, zeta: &HPoint, z: &HPoint) -> Result<FormValue> {
        if zeta.n() != self.n || z.n() != self.n {
            return Err(Error::Dimension { expected: self.n, found: zeta.n().min(z.n()) });
        }
        let g = zeta - z;
        let r2 = g.norm_sqr();
        if r2 == 0.0 {
            return Err(Error::Singular("kernel evaluated on the diagonal".into()));
        }
        let scale = r2.powi(-2 * self.n as i32);
        let mut total = FormValue::zero(4 * self.n);
        for (s, q) in g.iter().enumerate() {
            for (c, w) in complex_coords(*q).into_iter().enumerate() {
                // blocks carry constants in span{e,i}, which commute with conj(w)
                total = &total + &self.blocks[2 * s + c].left_mul(w.conj() * scale);
            }
        }
        Ok(total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficients_stay_complex() {
        let k = MatrixModelKernel::new(1);
        let f = k.eval(&HPoint::single(Quaternion::new(0.3, 0.4, -0.2, 0.7)), &HPoint::zeros(1)).unwrap();
        assert_eq!(f.degrees(), vec![3]);
        assert!(f.terms().all(|(_, q)| q.y == 0.0 && q.z == 0.0));
    }
}
