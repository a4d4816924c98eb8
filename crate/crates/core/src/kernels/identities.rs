//! Exact identities between the elementary forms of one quaternion slot.

use super::elementary::{nu2, omega2};
use super::Layout;
use crate::forms::{wedge_all, FormValue, Monomial};
use crate::quat::Quaternion;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Residual of one identity: max over sample points of the largest coefficient of LHS − RHS.
#[derive(Clone, Debug, Serialize)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub formula: &'static str,
    pub residual: f64,
    pub points: usize,
}

impl IdentityCheck {
    pub fn passes(&self, tol: f64) -> bool {
        self.residual <= tol
    }
}

/// dα, dᾱ, dβ, dβ̄ for ξ = αe + βj with α = x0 + x1 i, β = x2 + x3 i.
struct Complex1Forms {
    da: FormValue,
    da_bar: FormValue,
    db: FormValue,
    db_bar: FormValue,
}

fn complex_forms() -> Complex1Forms {
    let i = Quaternion::I;
    let e = Quaternion::E;
    Complex1Forms {
        da: FormValue::one_form(4, &[(0, e), (1, i)]),
        da_bar: FormValue::one_form(4, &[(0, e), (1, -i)]),
        db: FormValue::one_form(4, &[(2, e), (3, i)]),
        db_bar: FormValue::one_form(4, &[(2, e), (3, -i)]),
    }
}

type Builder = fn() -> (FormValue, FormValue);

fn table() -> Vec<(&'static str, &'static str, Builder)> {
    vec![
        ("dbj-dbbarj", "dβj ∧ dβ̄j = 0", || {
            let c = complex_forms();
            (c.db.right_mul(Quaternion::J).wedge(&c.db_bar.right_mul(Quaternion::J)), FormValue::zero(4))
        }),
        ("nu2-expansion", "ν₂ = −dᾱ∧dβj − dβj∧dᾱ − dβ∧dβ̄e", || {
            let c = complex_forms();
            let l = Layout::zeta(1);
            let dbj = c.db.right_mul(Quaternion::J);
            let rhs = &(&(-&c.da_bar.wedge(&dbj)) - &dbj.wedge(&c.da_bar)) - &c.db.wedge(&c.db_bar);
            (nu2(&l, 0), rhs)
        }),
        ("omega2-expansion", "ω₂ = dα∧dᾱe + 2dα∧dβ̄j − dβ∧dβ̄e", || {
            let c = complex_forms();
            let rhs = &(&c.da.wedge(&c.da_bar) + &c.da.wedge(&c.db_bar).right_mul(Quaternion::J).scale(2.0))
                - &c.db.wedge(&c.db_bar);
            (omega2(&Layout::zeta(1), 0), rhs)
        }),
        ("dxi-dxiconj-expansion", "dξ∧dξ̃ = dα∧dᾱe − 2dα∧dβj + dβ∧dβ̄e", || {
            let c = complex_forms();
            let l = Layout::zeta(1);
            let rhs = &(&c.da.wedge(&c.da_bar) - &c.da.wedge(&c.db).right_mul(Quaternion::J).scale(2.0))
                + &c.db.wedge(&c.db_bar);
            (l.dzeta(0).wedge(&l.dzeta_conj(0)), rhs)
        }),
        ("dxi-dxiconj-omega2", "dξ∧dξ̃∧ω₂ = 0", || {
            let l = Layout::zeta(1);
            (wedge_all(4, [&l.dzeta(0), &l.dzeta_conj(0), &omega2(&l, 0)]), FormValue::zero(4))
        }),
        ("nu2-omega2", "ν₂∧ω₂ = −dα∧dᾱ∧dβ∧dβ̄e", || {
            let c = complex_forms();
            let l = Layout::zeta(1);
            (nu2(&l, 0).wedge(&omega2(&l, 0)), -&wedge_all(4, [&c.da, &c.da_bar, &c.db, &c.db_bar]))
        }),
        ("nu2-omega2-volume", "ν₂∧ω₂ = 4dα₀∧dα_i∧dβ₀∧dβ_i e", || {
            let l = Layout::zeta(1);
            (nu2(&l, 0).wedge(&omega2(&l, 0)), FormValue::term(4, Monomial::from_mask(0b1111), Quaternion::real(4.0)))
        }),
        ("dzeta-fourth-power", "dζ∧dζ∧dζ∧dζ = 0", || {
            let d = Layout::zeta(1).dzeta(0);
            (wedge_all(4, [&d, &d, &d, &d]), FormValue::zero(4))
        }),
        ("j-on-second", "dζ∧j dζ̃∧dζ̃∧dζ = 0", || {
            let l = Layout::zeta(1);
            let (d, dc) = (l.dzeta(0), l.dzeta_conj(0));
            (wedge_all(4, [&d, &dc.left_mul(Quaternion::J), &dc, &d]), FormValue::zero(4))
        }),
        ("j-on-third", "dζ∧dζ̃∧j dζ̃∧dζ = 0", || {
            let l = Layout::zeta(1);
            let (d, dc) = (l.dzeta(0), l.dzeta_conj(0));
            (wedge_all(4, [&d, &dc, &dc.left_mul(Quaternion::J), &d]), FormValue::zero(4))
        }),
        ("j-on-fourth", "dζ∧dζ̃∧dζ̃∧j dζ = 0", || {
            let l = Layout::zeta(1);
            let (d, dc) = (l.dzeta(0), l.dzeta_conj(0));
            (wedge_all(4, [&d, &dc, &dc, &d.left_mul(Quaternion::J)]), FormValue::zero(4))
        }),
        ("no-j", "dζ∧dζ̃∧dζ̃∧dζ = 0", || {
            let l = Layout::zeta(1);
            let (d, dc) = (l.dzeta(0), l.dzeta_conj(0));
            (wedge_all(4, [&d, &dc, &dc, &d]), FormValue::zero(4))
        }),
        ("j-on-second-third", "dζ∧j dζ̃∧j dζ̃∧dζ = 0", || {
            let l = Layout::zeta(1);
            let (d, dc) = (l.dzeta(0), l.dzeta_conj(0));
            let jdc = dc.left_mul(Quaternion::J);
            (wedge_all(4, [&d, &jdc, &jdc, &d]), FormValue::zero(4))
        }),
        ("j-sandwiched", "dζ∧j dζ̃∧j dζ̃ j∧j dζ j = 0", || {
            let l = Layout::zeta(1);
            let (d, dc) = (l.dzeta(0), l.dzeta_conj(0));
            let jdc = dc.left_mul(Quaternion::J);
            let jdcj = jdc.right_mul(Quaternion::J);
            let jdj = d.left_mul(Quaternion::J).right_mul(Quaternion::J);
            (wedge_all(4, [&d, &jdc, &jdcj, &jdj]), FormValue::zero(4))
        }),
    ]
}

/// Evaluates every identity at `points` random base points of a random slot
/// position inside H^n, n ∈ {1, 2}; the coefficients are constant, so each point
/// re-embeds the one-slot identity at a different slot and checks the residual.
pub fn form_identities(points: usize, seed: u64) -> Vec<IdentityCheck> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    table()
        .into_iter()
        .map(|(name, formula, build)| {
            let mut residual: f64 = 0.0;
            for _ in 0..points {
                let n = rng.gen_range(1..=2usize);
                let slot = rng.gen_range(0..n);
                let (lhs, rhs) = build();
                let map: Vec<usize> = (0..4).map(|a| 4 * slot + a).collect();
                let diff = (&lhs - &rhs).relabel(4 * n, &map);
                residual = residual.max(diff.max_abs());
            }
            IdentityCheck { name, formula, residual, points }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const BROKEN: [&str; 4] = ["j-on-second", "j-on-fourth", "j-on-second-third", "j-sandwiched"];

    #[test]
    fn exact_identities_hold() {
        let checks = form_identities(20, 1);
        assert_eq!(checks.len(), 14);
        for c in checks.iter().filter(|c| !BROKEN.contains(&c.name)) {
            assert!(c.passes(1e-12), "{} residual {}", c.name, c.residual);
        }
    }

    #[test]
    fn left_j_readings_leave_a_volume_term() {
        // the dvol coefficients are ±8j or ±8e, so the residual is exactly 8
        for c in form_identities(5, 2).iter().filter(|c| BROKEN.contains(&c.name)) {
            assert_eq!(c.residual, 8.0, "{}", c.name);
        }
    }
}
