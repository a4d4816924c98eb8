use crate::func::HFunction;
use crate::quat::{HPoint, MatrixModel, Quaternion};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Channel pairs f₁₁ = G(t, ū), f₁₂ = H(u, t̄) on the first slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairKind {
    /// G = t, H = 2u.
    Linear,
    /// G = t² + ū, H = u² − 2t̄.
    Polynomial,
    /// G = eᵗ ū, H = u t̄².
    Exponential,
}

impl PairKind {
    pub const ALL: [PairKind; 3] = [PairKind::Linear, PairKind::Polynomial, PairKind::Exponential];

    /// (G, ∂G/∂t, ∂G/∂ū, H, ∂H/∂u, ∂H/∂t̄) at (t, u).
    fn channels(self, t: Complex64, u: Complex64) -> [Complex64; 6] {
        let (tb, ub) = (t.conj(), u.conj());
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        match self {
            PairKind::Linear => [t, one, zero, u * 2.0, one * 2.0, zero],
            PairKind::Polynomial => [t * t + ub, t * 2.0, one, u * u - tb * 2.0, u * 2.0, -one * 2.0],
            PairKind::Exponential => [t.exp() * ub, t.exp() * ub, t.exp(), u * tb * tb, tb * tb, u * tb * 2.0],
        }
    }
}

/// Test functions on H^n; all act on the first slot.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Corpus {
    Constant { c: Quaternion },
    /// a z b + c with b in span{e, i}.
    Affine { a: Quaternion, b: Complex64, c: Quaternion },
    ChannelPair { pair: PairKind },
    Conj,
    NormSq,
    /// amp · exp(1 − 1/(1 − s)), s = |z − center|²/radius², zero for s ≥ 1.
    Bump { amp: Quaternion, center: Vec<f64>, radius: f64 },
}

/// A corpus entry bound to a dimension.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusFunction {
    pub n: usize,
    pub f: Corpus,
}

fn complex(b: Complex64) -> Quaternion {
    Quaternion::new(b.re, b.im, 0.0, 0.0)
}

fn bump_profile(s: f64) -> (f64, f64) {
    if s >= 1.0 {
        return (0.0, 0.0);
    }
    let v = (1.0 - 1.0 / (1.0 - s)).exp();
    (v, -v / ((1.0 - s) * (1.0 - s)))
}

impl Corpus {
    pub fn on(self, n: usize) -> CorpusFunction {
        CorpusFunction { n, f: self }
    }

    /// Whether the matrix-model CR system holds identically.
    pub fn is_holomorphic(&self) -> bool {
        matches!(self, Corpus::Constant { .. } | Corpus::Affine { .. } | Corpus::ChannelPair { .. })
    }

    /// The holomorphic entries used by reproduction tests.
    pub fn holomorphic_set() -> Vec<Corpus> {
        let mut v = vec![
            Corpus::Constant { c: Quaternion::new(0.5, -1.0, 2.0, 0.25) },
            Corpus::Affine { a: Quaternion::new(1.0, 0.5, -0.5, 0.25), b: Complex64::new(0.5, -1.0), c: Quaternion::new(0.0, 1.0, 0.0, -1.0) },
        ];
        v.extend(PairKind::ALL.into_iter().map(|pair| Corpus::ChannelPair { pair }));
        v
    }

    pub fn label(&self) -> String {
        match self {
            Corpus::Constant { .. } => "constant".into(),
            Corpus::Affine { .. } => "azb+c".into(),
            Corpus::ChannelPair { pair } => format!("pair-{pair:?}").to_lowercase(),
            Corpus::Conj => "conj".into(),
            Corpus::NormSq => "norm-sq".into(),
            Corpus::Bump { .. } => "bump".into(),
        }
    }
}

impl HFunction for CorpusFunction {
    fn n(&self) -> usize {
        self.n
    }

    fn eval(&self, z: &HPoint) -> Quaternion {
        let q = z[0];
        match &self.f {
            Corpus::Constant { c } => *c,
            Corpus::Affine { a, b, c } => *a * q * complex(*b) + *c,
            Corpus::ChannelPair { pair } => {
                let m = MatrixModel::from(q);
                let ch = pair.channels(m.t, m.u);
                MatrixModel::new(ch[0], ch[3]).to_quaternion()
            }
            Corpus::Conj => q.conj(),
            Corpus::NormSq => Quaternion::real(q.norm_sqr()),
            Corpus::Bump { amp, center, radius } => {
                let s = z.to_real().iter().zip(center).map(|(x, c)| (x - c) * (x - c)).sum::<f64>() / (radius * radius);
                *amp * bump_profile(s).0
            }
        }
    }

    fn partials(&self, z: &HPoint) -> Option<Vec<Quaternion>> {
        let dim = 4 * self.n;
        let mut d = vec![Quaternion::ZERO; dim];
        let q = z[0];
        match &self.f {
            Corpus::Constant { .. } => {}
            Corpus::Affine { a, b, .. } => {
                for (m, s) in Quaternion::BASIS.into_iter().enumerate() {
                    d[m] = *a * s * complex(*b);
                }
            }
            Corpus::ChannelPair { pair } => {
                let m = MatrixModel::from(q);
                let [_, gt, gub, _, hu, htb] = pair.channels(m.t, m.u);
                let i = Complex64::i();
                let cols = [(gt, htb), (gt * i, -htb * i), (gub, hu), (-gub * i, hu * i)];
                for (a, (p, r)) in cols.into_iter().enumerate() {
                    d[a] = MatrixModel::new(p, r).to_quaternion();
                }
            }
            Corpus::Conj => {
                for (m, s) in Quaternion::BASIS.into_iter().enumerate() {
                    d[m] = s.conj();
                }
            }
            Corpus::NormSq => {
                for (m, x) in q.to_array().into_iter().enumerate() {
                    d[m] = Quaternion::real(2.0 * x);
                }
            }
            Corpus::Bump { amp, center, radius } => {
                let x = z.to_real();
                let r2 = radius * radius;
                let s = x.iter().zip(center).map(|(x, c)| (x - c) * (x - c)).sum::<f64>() / r2;
                let dp = bump_profile(s).1;
                for (a, (xa, ca)) in x.iter().zip(center).enumerate() {
                    d[a] = *amp * (dp * 2.0 * (xa - ca) / r2);
                }
            }
        }
        Some(d)
    }

    fn label(&self) -> String {
        self.f.label()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::func::partials_fd;

    fn point() -> HPoint {
        HPoint::single(Quaternion::new(0.3, -0.2, 0.4, 0.1))
    }

    #[test]
    fn analytic_partials_match_differences() {
        let mut all = Corpus::holomorphic_set();
        all.extend([Corpus::Conj, Corpus::NormSq, Corpus::Bump { amp: Quaternion::new(1.0, 0.0, 2.0, 0.0), center: vec![0.1, 0.0, 0.0, 0.2], radius: 0.8 }]);
        for c in all {
            let f = c.clone().on(1);
            let a = f.partials(&point()).unwrap();
            let b = partials_fd(&f, &point(), 1e-5);
            for (x, y) in a.iter().zip(&b) {
                assert!(x.dist_inf(*y) < 1e-8, "{}", c.label());
            }
        }
    }

    #[test]
    fn linear_pair_in_quaternion_form() {
        let f = Corpus::ChannelPair { pair: PairKind::Linear }.on(1);
        let q = point()[0];
        assert!(f.eval(&point()).dist_inf(Quaternion::new(q.w, q.x, 2.0 * q.y, 2.0 * q.z)) < 1e-15);
    }

    #[test]
    fn bump_vanishes_outside_support() {
        let f = Corpus::Bump { amp: Quaternion::E, center: vec![0.0; 4], radius: 0.5 }.on(1);
        assert_eq!(f.eval(&HPoint::single(Quaternion::real(0.6))), Quaternion::ZERO);
        assert!((f.eval(&HPoint::zeros(1)).w - 1.0).abs() < 1e-15);
    }
}
