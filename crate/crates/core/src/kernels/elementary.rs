use super::{conj_by_j, Layout};
use crate::error::{Error, Result};
use crate::forms::FormValue;
use crate::quat::HPoint;
use serde::{Deserialize, Serialize};

/// The named forms ω₁, ν₁, ω₂, ν₂, ω₄, ω̄₄ in their ζ, ζ−z and (ζ,z) variants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementaryKind {
    /// ζ̃ dζ̃
    Omega1,
    /// (ζ̃ − z̃) dζ̃
    Omega1Diff,
    /// (ζ̃ − z̃)(dζ̃ − dz̃)
    Omega1Pair,
    /// (dζ̃) ζ̃
    Nu1,
    /// (dζ̃)(ζ̃ − z̃)
    Nu1Diff,
    /// (dζ̃ − dz̃)(ζ̃ − z̃)
    Nu1Pair,
    /// (j dζ̃ j) ∧ (j dζ j)
    Omega2,
    /// j(dζ̃ − dz̃)j ∧ j(dζ − dz)j
    Omega2Pair,
    /// dζ̃ ∧ dζ̃
    Nu2,
    /// (dζ̃ − dz̃) ∧ (dζ̃ − dz̃)
    Nu2Pair,
    /// ν₂(ζ) ∧ ω₂(ζ)
    Omega4,
    /// ν₂(ζ,z) ∧ ω₂(ζ)
    Omega4Pair,
    /// ν₂(ζ,z) ∧ ω₂(ζ,z)
    Omega4Bar,
}

impl ElementaryKind {
    pub const ALL: [Self; 13] = [
        Self::Omega1,
        Self::Omega1Diff,
        Self::Omega1Pair,
        Self::Nu1,
        Self::Nu1Diff,
        Self::Nu1Pair,
        Self::Omega2,
        Self::Omega2Pair,
        Self::Nu2,
        Self::Nu2Pair,
        Self::Omega4,
        Self::Omega4Pair,
        Self::Omega4Bar,
    ];

    pub fn needs_z(self) -> bool {
        matches!(self, Self::Omega1Diff | Self::Nu1Diff) || self.is_paired()
    }

    /// Whether the form carries z-differentials.
    pub fn is_paired(self) -> bool {
        matches!(self, Self::Omega1Pair | Self::Nu1Pair | Self::Omega2Pair | Self::Nu2Pair | Self::Omega4Pair | Self::Omega4Bar)
    }
}

pub(crate) fn omega2(layout: &Layout, s: usize) -> FormValue {
    conj_by_j(&layout.dzeta_conj(s)).wedge(&conj_by_j(&layout.dzeta(s)))
}

pub(crate) fn omega2_pair(layout: &Layout, s: usize) -> FormValue {
    conj_by_j(&layout.ddiff_conj(s)).wedge(&conj_by_j(&layout.ddiff(s)))
}

pub(crate) fn nu2(layout: &Layout, s: usize) -> FormValue {
    let d = layout.dzeta_conj(s);
    d.wedge(&d)
}

pub(crate) fn nu2_pair(layout: &Layout, s: usize) -> FormValue {
    let d = layout.ddiff_conj(s);
    d.wedge(&d)
}

/// Evaluates a named form at frozen (ζ, z). Paired kinds use the (ζ, z) layout,
/// the others the ζ layout.
pub fn elementary_form(kind: ElementaryKind, slot: usize, zeta: &HPoint, z: Option<&HPoint>) -> Result<FormValue> {
    let n = zeta.n();
    if slot >= n {
        return Err(Error::Invalid(format!("slot {slot} out of range for n = {n}")));
    }
    let z = match (kind.needs_z(), z) {
        (true, Some(z)) if z.n() == n => Some(z),
        (true, Some(z)) => return Err(Error::Dimension { expected: n, found: z.n() }),
        (true, None) => return Err(Error::Invalid(format!("{kind:?} needs z"))),
        (false, _) => None,
    };
    let layout = if kind.is_paired() { Layout::pair(n) } else { Layout::zeta(n) };
    let diff = || {
        let z = z.expect("checked above");
        (zeta[slot] - z[slot]).conj()
    };
    let zt = zeta[slot].conj();
    Ok(match kind {
        ElementaryKind::Omega1 => layout.dzeta_conj(slot).left_mul(zt),
        ElementaryKind::Omega1Diff => layout.dzeta_conj(slot).left_mul(diff()),
        ElementaryKind::Omega1Pair => layout.ddiff_conj(slot).left_mul(diff()),
        ElementaryKind::Nu1 => layout.dzeta_conj(slot).right_mul(zt),
        ElementaryKind::Nu1Diff => layout.dzeta_conj(slot).right_mul(diff()),
        ElementaryKind::Nu1Pair => layout.ddiff_conj(slot).right_mul(diff()),
        ElementaryKind::Omega2 => omega2(&layout, slot),
        ElementaryKind::Omega2Pair => omega2_pair(&layout, slot),
        ElementaryKind::Nu2 => nu2(&layout, slot),
        ElementaryKind::Nu2Pair => nu2_pair(&layout, slot),
        ElementaryKind::Omega4 => nu2(&layout, slot).wedge(&omega2(&layout, slot)),
        ElementaryKind::Omega4Pair => nu2_pair(&layout, slot).wedge(&omega2(&layout, slot)),
        ElementaryKind::Omega4Bar => nu2_pair(&layout, slot).wedge(&omega2_pair(&layout, slot)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::Monomial;
    use crate::quat::Quaternion;

    fn zeta() -> HPoint {
        HPoint::single(Quaternion::new(0.4, -0.3, 0.2, 0.9))
    }

    #[test]
    fn omega1_at_unit_offset_is_dzeta_conj() {
        let z = HPoint::single(Quaternion::new(-0.6, -0.3, 0.2, 0.9));
        let w = elementary_form(ElementaryKind::Omega1Diff, 0, &zeta(), Some(&z)).unwrap();
        assert!(w.distance(&FormValue::dquat_conj(4, 0)) < 1e-15);
    }

    #[test]
    fn volume_element_identity() {
        let w4 = elementary_form(ElementaryKind::Omega4, 0, &zeta(), None).unwrap();
        assert_eq!(w4.len(), 1);
        assert!(w4.top_coefficient().dist_inf(Quaternion::real(4.0)) < 1e-14);
    }

    #[test]
    fn paired_kinds_need_z_and_valid_slot() {
        assert!(elementary_form(ElementaryKind::Nu1Pair, 0, &zeta(), None).is_err());
        assert!(elementary_form(ElementaryKind::Omega2, 1, &zeta(), None).is_err());
        let z = HPoint::single(Quaternion::E);
        let p = elementary_form(ElementaryKind::Omega2Pair, 0, &zeta(), Some(&z)).unwrap();
        assert_eq!(p.dim(), 8);
        // suppressing dz recovers ω₂(ζ)
        let lifted = elementary_form(ElementaryKind::Omega2, 0, &zeta(), None).unwrap().relabel(8, &[0, 1, 2, 3]);
        assert!(p.suppress(&[4, 5, 6, 7]).distance(&lifted) < 1e-15);
    }

    #[test]
    fn nu2_has_no_real_part() {
        let n2 = elementary_form(ElementaryKind::Nu2, 0, &zeta(), None).unwrap();
        assert!(n2.terms().all(|(m, q)| m.degree() == 2 && q.w.abs() < 1e-15));
        assert_eq!(n2.coefficient(Monomial::from_mask(0b11)), Quaternion::ZERO);
        assert!(n2.coefficient(Monomial::from_mask(0b110)).dist_inf(Quaternion::K * 2.0) < 1e-15);
    }
}
