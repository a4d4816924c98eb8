//! Elementary forms, Bochner-Martinelli type kernels, Leray forms and v_ρ.

mod bochner;
mod elementary;
pub mod identities;
mod leray;
mod reference;

pub use bochner::{theta_pair, theta_z, theta_z_family, PairVariant, ThetaZKernel};
pub use elementary::{elementary_form, ElementaryKind};
pub use identities::{form_identities, IdentityCheck};
pub use leray::{leray_eta, leray_phi, leray_phi_bar, v_rho, DifferenceMap, ADMISSIBILITY_TOL, LerayMap, VRhoMap};
pub use reference::MatrixModelKernel;

use crate::error::{Error, Result};
use crate::forms::FormValue;
use crate::quat::{HPoint, Quaternion};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

/// Placement of the function factor of ν₁ relative to the ω₂ block it is wedged with.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Nu1Placement {
    /// (dψ̃ ∧ ω₂)·ψ̃
    #[default]
    Trailing,
    /// (dψ̃·ψ̃) ∧ ω₂
    Adjacent,
}

/// Which boundary kernel an operator integrates against.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelFamily {
    /// θ_z assembled from ω₁, ν₁, ω₂, ω₄.
    #[default]
    Quaternionic,
    /// Bochner-Martinelli kernel of C^{2n} in the coordinates (t, ū) of each slot.
    MatrixModel,
}

/// Real generators: 4n for ζ, then optionally 4n for z, then optionally λ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Layout {
    pub n: usize,
    pub with_z: bool,
    pub with_lambda: bool,
}

impl Layout {
    pub fn zeta(n: usize) -> Self {
        Self { n, with_z: false, with_lambda: false }
    }

    pub fn pair(n: usize) -> Self {
        Self { n, with_z: true, with_lambda: false }
    }

    pub fn zeta_lambda(n: usize) -> Self {
        Self { n, with_z: false, with_lambda: true }
    }

    pub fn full(n: usize) -> Self {
        Self { n, with_z: true, with_lambda: true }
    }

    pub fn dim(&self) -> usize {
        4 * self.n * if self.with_z { 2 } else { 1 } + usize::from(self.with_lambda)
    }

    /// First generator of ζ slot s.
    pub fn zeta_index(&self, s: usize) -> usize {
        4 * s
    }

    /// First generator of z slot s.
    pub fn z_index(&self, s: usize) -> usize {
        assert!(self.with_z, "layout has no z generators");
        4 * self.n + 4 * s
    }

    pub fn lambda_index(&self) -> usize {
        assert!(self.with_lambda, "layout has no lambda generator");
        self.dim() - 1
    }

    pub fn z_generators(&self) -> Vec<usize> {
        if self.with_z {
            (4 * self.n..8 * self.n).collect()
        } else {
            Vec::new()
        }
    }

    pub fn dzeta(&self, s: usize) -> FormValue {
        FormValue::dquat(self.dim(), self.zeta_index(s))
    }

    pub fn dzeta_conj(&self, s: usize) -> FormValue {
        FormValue::dquat_conj(self.dim(), self.zeta_index(s))
    }

    /// dζ − dz on slot s (dζ when the layout has no z generators).
    pub fn ddiff(&self, s: usize) -> FormValue {
        if self.with_z {
            &self.dzeta(s) - &FormValue::dquat(self.dim(), self.z_index(s))
        } else {
            self.dzeta(s)
        }
    }

    /// dζ̃ − dz̃ on slot s.
    pub fn ddiff_conj(&self, s: usize) -> FormValue {
        if self.with_z {
            &self.dzeta_conj(s) - &FormValue::dquat_conj(self.dim(), self.z_index(s))
        } else {
            self.dzeta_conj(s)
        }
    }
}

/// j·F·j applied to every coefficient.
pub(crate) fn conj_by_j(f: &FormValue) -> FormValue {
    f.map(|q| Quaternion::J * q * Quaternion::J)
}

/// (2n−1)!(2π)^{−2n}.
pub fn normalization(n: usize) -> f64 {
    let fact: f64 = (1..2 * n).map(|k| k as f64).product();
    fact * (2.0 * PI).powi(-2 * n as i32)
}

/// Per-slot ingredients of a kernel of the shape Σ_s A_1∧…∧[ω₁∧ω₂ + ν₁∧ω₂]_s∧…∧A_n.
pub(crate) struct SlotBlock {
    /// The 1-form whose left/right scaling gives ω₁ and ν₁ (dζ̃, dζ̃−dz̃, dψ̃, dη̃).
    pub d1: FormValue,
    /// The function factor (ζ̃−z̃, ψ̃, η̃).
    pub factor: Quaternion,
    pub omega2: FormValue,
    /// The block used when this slot is not the distinguished one (ω₄ variants, ν₂∧ω₂).
    pub other: FormValue,
}

pub(crate) fn assemble(dim: usize, blocks: &[SlotBlock], prefactor: Quaternion, placement: Nu1Placement) -> FormValue {
    let mut total = FormValue::zero(dim);
    for (s, b) in blocks.iter().enumerate() {
        let w1 = b.d1.left_mul(b.factor).wedge(&b.omega2);
        let v1 = match placement {
            Nu1Placement::Trailing => b.d1.wedge(&b.omega2).right_mul(b.factor),
            Nu1Placement::Adjacent => b.d1.right_mul(b.factor).wedge(&b.omega2),
        };
        let middle = &w1 + &v1;
        let mut term = FormValue::scalar(dim, Quaternion::E);
        for (t, other) in blocks.iter().enumerate() {
            term = term.wedge(if t == s { &middle } else { &other.other });
        }
        total = &total + &term;
    }
    total.left_mul(prefactor)
}

/// Kind of kernel for [`KernelSpec`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    ThetaZ,
    Theta,
    ThetaBar,
    Phi,
    PhiBar,
}

/// A kernel choice bundled with its options.
#[derive(Clone)]
pub struct KernelSpec {
    pub kind: KernelKind,
    pub n: usize,
    pub placement: Nu1Placement,
    pub family: KernelFamily,
    pub leray: Option<Arc<dyn LerayMap>>,
}

impl std::fmt::Debug for KernelSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("KernelSpec")
            .field("kind", &self.kind)
            .field("n", &self.n)
            .field("placement", &self.placement)
            .field("family", &self.family)
            .field("leray", &self.leray.as_ref().map(|l| l.label()))
            .finish()
    }
}

impl KernelSpec {
    pub fn theta_z(n: usize) -> Self {
        Self { kind: KernelKind::ThetaZ, n, placement: Nu1Placement::default(), family: KernelFamily::default(), leray: None }
    }

    pub fn with_family(mut self, family: KernelFamily) -> Self {
        self.family = family;
        self
    }

    pub fn with_placement(mut self, placement: Nu1Placement) -> Self {
        self.placement = placement;
        self
    }

    pub fn phi(n: usize, leray: Arc<dyn LerayMap>) -> Self {
        Self { kind: KernelKind::Phi, n, placement: Nu1Placement::default(), family: KernelFamily::Quaternionic, leray: Some(leray) }
    }

    pub fn phi_bar(n: usize, leray: Arc<dyn LerayMap>) -> Self {
        Self { kind: KernelKind::PhiBar, ..Self::phi(n, leray) }
    }

    /// Degree in the generators that survive the function reduction.
    pub fn degree(&self) -> usize {
        4 * self.n - 1
    }

    /// Evaluates the kernel; θ and θ̄ live on the paired layout, φ̄ on (ζ, λ),
    /// θ_z and φ on ζ alone (z-differentials suppressed).
    pub fn evaluate(&self, zeta: &HPoint, z: &HPoint, lambda: f64) -> Result<FormValue> {
        let leray = || self.leray.as_deref().ok_or_else(|| Error::Invalid("Leray kernel needs a map".into()));
        match self.kind {
            KernelKind::ThetaZ => theta_z_family(zeta, z, self.placement, self.family),
            KernelKind::Theta => theta_pair(zeta, z, PairVariant::Paired, self.placement),
            KernelKind::ThetaBar => theta_pair(zeta, z, PairVariant::Bar, self.placement),
            KernelKind::Phi => leray_phi(leray()?, zeta, z, false, self.placement),
            KernelKind::PhiBar => leray_phi_bar(leray()?, zeta, z, lambda, false, self.placement),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_indices() {
        let l = Layout::full(2);
        assert_eq!(l.dim(), 17);
        assert_eq!(l.z_index(1), 12);
        assert_eq!(l.lambda_index(), 16);
        assert_eq!(Layout::zeta(2).dim(), 8);
        assert_eq!(Layout::pair(1).z_generators(), vec![4, 5, 6, 7]);
    }

    #[test]
    fn normalization_constants() {
        assert!((normalization(1) - 1.0 / (4.0 * PI * PI)).abs() < 1e-16);
        assert!((normalization(2) - 6.0 / (2.0 * PI).powi(4)).abs() < 1e-16);
    }
}
