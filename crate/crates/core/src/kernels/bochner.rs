use super::elementary::{nu2, nu2_pair, omega2, omega2_pair};
use super::{assemble, normalization, KernelFamily, Layout, MatrixModelKernel, Nu1Placement, SlotBlock};
use crate::error::{Error, Result};
use crate::forms::FormValue;
use crate::quat::{HPoint, Quaternion};
use serde::{Deserialize, Serialize};

/// θ(ζ,z) keeps ω₂(ζ) in the distinguished slot; θ̄(ζ,z) uses ω₂(ζ,z) throughout.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairVariant {
    Paired,
    Bar,
}

fn difference(zeta: &HPoint, z: &HPoint) -> Result<(HPoint, f64)> {
    if zeta.n() != z.n() {
        return Err(Error::Dimension { expected: zeta.n(), found: z.n() });
    }
    let g = zeta - z;
    let r2 = g.norm_sqr();
    if r2 == 0.0 || !r2.is_finite() {
        return Err(Error::Singular("kernel evaluated on the diagonal".into()));
    }
    Ok((g, r2))
}

/// θ_z(ζ) over the 4n ζ-generators, assembled slot by slot.
pub fn theta_z(zeta: &HPoint, z: &HPoint, placement: Nu1Placement) -> Result<FormValue> {
    let (g, r2) = difference(zeta, z)?;
    let n = g.n();
    let layout = Layout::zeta(n);
    let blocks: Vec<SlotBlock> = (0..n)
        .map(|s| {
            let w2 = omega2(&layout, s);
            SlotBlock { d1: layout.dzeta_conj(s), factor: g[s].conj(), other: nu2(&layout, s).wedge(&w2), omega2: w2 }
        })
        .collect();
    let pre = normalization(n) * r2.powi(-2 * n as i32);
    Ok(assemble(layout.dim(), &blocks, Quaternion::real(pre), placement))
}

/// θ_z in the requested kernel family.
pub fn theta_z_family(zeta: &HPoint, z: &HPoint, placement: Nu1Placement, family: KernelFamily) -> Result<FormValue> {
    match family {
        KernelFamily::Quaternionic => theta_z(zeta, z, placement),
        KernelFamily::MatrixModel => MatrixModelKernel::new(zeta.n()).eval(zeta, z),
    }
}

/// θ(ζ,z) or θ̄(ζ,z) over the (ζ, z) generators.
pub fn theta_pair(zeta: &HPoint, z: &HPoint, variant: PairVariant, placement: Nu1Placement) -> Result<FormValue> {
    let (g, r2) = difference(zeta, z)?;
    let n = g.n();
    let layout = Layout::pair(n);
    let blocks: Vec<SlotBlock> = (0..n)
        .map(|s| {
            let w2 = match variant {
                PairVariant::Paired => omega2(&layout, s),
                PairVariant::Bar => omega2_pair(&layout, s),
            };
            SlotBlock { d1: layout.ddiff_conj(s), factor: g[s].conj(), other: nu2_pair(&layout, s).wedge(&w2), omega2: w2 }
        })
        .collect();
    let pre = normalization(n) * r2.powi(-2 * n as i32);
    Ok(assemble(layout.dim(), &blocks, Quaternion::real(pre), placement))
}

/// θ_z with its constant form blocks precomputed.
///
/// Every ω₄(ζ) block has a real coefficient, so
/// θ_z = c|g|^{−4n} Σ_s (g̃_s T_s + T_s g̃_s) for trailing placement, with
/// T_s = ω₄ ∧ … ∧ (dζ̃_s ∧ ω₂(ζ_s)) ∧ … ∧ ω₄ constant.
#[derive(Clone, Debug)]
pub struct ThetaZKernel {
    n: usize,
    placement: Nu1Placement,
    t: Vec<FormValue>,
    /// Adjacent placement: blocks with dζ̃_s·S_m in place of dζ̃_s.
    adjacent: Vec<[FormValue; 4]>,
}

impl ThetaZKernel {
    pub fn new(n: usize, placement: Nu1Placement) -> Self {
        let layout = Layout::zeta(n);
        let dim = layout.dim();
        let w4: Vec<FormValue> = (0..n).map(|s| nu2(&layout, s).wedge(&omega2(&layout, s))).collect();
        debug_assert!(w4.iter().all(|f| f.terms().all(|(_, q)| q.vector().norm() == 0.0)));
        let surround = |s: usize, mid: &FormValue| {
            let mut acc = FormValue::scalar(dim, Quaternion::E);
            for (t, w) in w4.iter().enumerate() {
                acc = acc.wedge(if t == s { mid } else { w });
            }
            acc
        };
        let t = (0..n).map(|s| surround(s, &layout.dzeta_conj(s).wedge(&omega2(&layout, s)))).collect();
        let adjacent = (0..n)
            .map(|s| Quaternion::BASIS.map(|u| surround(s, &layout.dzeta_conj(s).right_mul(u).wedge(&omega2(&layout, s)))))
            .collect();
        Self { n, placement, t, adjacent }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn eval(&self, zeta: &HPoint, z: &HPoint) -> Result<FormValue> {
        let (g, r2) = difference(zeta, z)?;
        if g.n() != self.n {
            return Err(Error::Dimension { expected: self.n, found: g.n() });
        }
        let mut total = FormValue::zero(4 * self.n);
        for s in 0..self.n {
            let gt = g[s].conj();
            total = &total + &self.t[s].left_mul(gt);
            total = match self.placement {
                Nu1Placement::Trailing => &total + &self.t[s].right_mul(gt),
                Nu1Placement::Adjacent => {
                    let mut acc = total;
                    for (m, block) in self.adjacent[s].iter().enumerate() {
                        acc = &acc + &block.scale(gt.component(m));
                    }
                    acc
                }
            };
        }
        Ok(total.scale(normalization(self.n) * r2.powi(-2 * self.n as i32)))
    }
}
