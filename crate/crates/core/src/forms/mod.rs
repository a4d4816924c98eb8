//! Exterior algebra over real generators with quaternion coefficients.
//!
//! A monomial dx_{i1}∧…∧dx_{ik} is stored as a bitmask; coefficients sit to the
//! left of the monomial, so (p dx_a)∧(q dx_b) = pq dx_a∧dx_b.

mod field;
mod pullback;

pub use field::{ext_deriv, ext_deriv_central, FormField};
pub use pullback::{pullback, SurfacePatch};

use crate::quat::Quaternion;
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Write as _;

/// Maximum number of real generators.
pub const MAX_GENERATORS: usize = 64;

/// Exterior monomial as a set of generator indices (0-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(u64);

impl Monomial {
    pub const ONE: Self = Self(0);

    pub fn from_mask(mask: u64) -> Self {
        Self(mask)
    }

    /// Sorts `indices`, returning the monomial and the permutation sign,
    /// or `None` when an index repeats.
    pub fn from_indices(indices: &[usize]) -> Option<(Self, f64)> {
        let mut m = Self::ONE;
        let mut sign = 1.0;
        for &i in indices {
            let (next, s) = m.wedge(Self(1 << i))?;
            m = next;
            sign *= s;
        }
        Some((m, sign))
    }

    pub fn mask(self) -> u64 {
        self.0
    }

    pub fn degree(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 & (1 << i) != 0
    }

    pub fn indices(self) -> impl Iterator<Item = usize> {
        let m = self.0;
        (0..MAX_GENERATORS).filter(move |i| m & (1 << i) != 0)
    }

    /// self∧other as (monomial, sign), `None` when they share a generator.
    pub fn wedge(self, other: Self) -> Option<(Self, f64)> {
        if self.0 & other.0 != 0 {
            return None;
        }
        let mut swaps = 0u32;
        let mut b = other.0;
        while b != 0 {
            let j = b.trailing_zeros();
            let above = if j >= 63 { 0 } else { self.0 >> (j + 1) };
            swaps += above.count_ones();
            b &= b - 1;
        }
        let sign = if swaps.is_multiple_of(2) { 1.0 } else { -1.0 };
        Some((Self(self.0 | other.0), sign))
    }
}

impl Ord for Monomial {
    /// Degree first, then lexicographic order of the index tuples.
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal if self.0 == other.0 => Ordering::Equal,
            Ordering::Equal => {
                let low = (self.0 ^ other.0).trailing_zeros();
                if self.0 & (1 << low) != 0 {
                    Ordering::Less
                } else {
                    Ordering::Greater
                }
            }
            o => o,
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Quaternion-coefficient form over `dim` real generators.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct FormValue {
    dim: usize,
    terms: BTreeMap<Monomial, Quaternion>,
}

impl FormValue {
    pub fn zero(dim: usize) -> Self {
        assert!(dim <= MAX_GENERATORS, "at most {MAX_GENERATORS} generators");
        Self { dim, terms: BTreeMap::new() }
    }

    /// The 0-form q.
    pub fn scalar(dim: usize, q: Quaternion) -> Self {
        Self::term(dim, Monomial::ONE, q)
    }

    pub fn term(dim: usize, m: Monomial, q: Quaternion) -> Self {
        let mut f = Self::zero(dim);
        f.add_term(m, q);
        f
    }

    /// q·dx_i.
    pub fn generator(dim: usize, i: usize, q: Quaternion) -> Self {
        assert!(i < dim, "generator {i} out of range {dim}");
        Self::term(dim, Monomial(1 << i), q)
    }

    /// Σ_m S_m dx_{first+m}: the quaternion differential dζ on four consecutive generators.
    pub fn dquat(dim: usize, first: usize) -> Self {
        let mut f = Self::zero(dim);
        for (m, s) in Quaternion::BASIS.iter().enumerate() {
            f.add_term(Monomial(1 << (first + m)), *s);
        }
        f
    }

    /// Σ_m S̃_m dx_{first+m}: the conjugate differential dζ̃.
    pub fn dquat_conj(dim: usize, first: usize) -> Self {
        let mut f = Self::zero(dim);
        for (m, s) in Quaternion::BASIS.iter().enumerate() {
            f.add_term(Monomial(1 << (first + m)), s.conj());
        }
        f
    }

    /// Σ_m c_m dx_{first+m} for a quaternion-valued 1-form with per-generator coefficients.
    pub fn one_form(dim: usize, coeffs: &[(usize, Quaternion)]) -> Self {
        let mut f = Self::zero(dim);
        for &(i, q) in coeffs {
            f.add_term(Monomial(1 << i), q);
        }
        f
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (Monomial, Quaternion)> + '_ {
        self.terms.iter().map(|(m, q)| (*m, *q))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: Monomial) -> Quaternion {
        self.terms.get(&m).copied().unwrap_or_default()
    }

    pub fn add_term(&mut self, m: Monomial, q: Quaternion) {
        debug_assert!(m.0 >> self.dim == 0 || self.dim == MAX_GENERATORS, "monomial outside generator range");
        *self.terms.entry(m).or_default() += q;
    }

    /// Degrees present among the stored terms, ascending.
    pub fn degrees(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.terms.keys().map(|m| m.degree()).collect();
        d.dedup();
        d
    }

    /// Homogeneous part of the given degree.
    pub fn part(&self, degree: usize) -> Self {
        Self { dim: self.dim, terms: self.terms.iter().filter(|(m, _)| m.degree() == degree).map(|(m, q)| (*m, *q)).collect() }
    }

    pub fn wedge(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "generator count mismatch");
        let mut out = Self::zero(self.dim);
        for (ma, qa) in &self.terms {
            for (mb, qb) in &other.terms {
                if let Some((m, s)) = ma.wedge(*mb) {
                    out.add_term(m, (*qa * *qb) * s);
                }
            }
        }
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|q| q * s)
    }

    /// a·F (coefficients multiplied on the left).
    pub fn left_mul(&self, a: Quaternion) -> Self {
        self.map(|q| a * q)
    }

    /// F·b (coefficients multiplied on the right).
    pub fn right_mul(&self, b: Quaternion) -> Self {
        self.map(|q| q * b)
    }

    pub fn map(&self, f: impl Fn(Quaternion) -> Quaternion) -> Self {
        Self { dim: self.dim, terms: self.terms.iter().map(|(m, q)| (*m, f(*q))).collect() }
    }

    /// Drops every term containing one of the listed generators.
    pub fn suppress(&self, generators: &[usize]) -> Self {
        let mask = generators.iter().fold(0u64, |m, &g| m | (1 << g));
        Self { dim: self.dim, terms: self.terms.iter().filter(|(m, _)| m.0 & mask == 0).map(|(m, q)| (*m, *q)).collect() }
    }

    /// Re-embeds into `dim` generators with generator i sent to `map[i]`.
    pub fn relabel(&self, dim: usize, map: &[usize]) -> Self {
        let mut out = Self::zero(dim);
        for (m, q) in &self.terms {
            let idx: Vec<usize> = m.indices().map(|i| map[i]).collect();
            if let Some((mm, s)) = Monomial::from_indices(&idx) {
                out.add_term(mm, *q * s);
            }
        }
        out
    }

    /// Removes coefficients with max-abs component ≤ tol.
    pub fn clean(&self, tol: f64) -> Self {
        Self {
            dim: self.dim,
            terms: self.terms.iter().filter(|(_, q)| q.dist_inf(Quaternion::ZERO) > tol).map(|(m, q)| (*m, *q)).collect(),
        }
    }

    /// Largest coefficient component in absolute value.
    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|q| q.dist_inf(Quaternion::ZERO)).fold(0.0, f64::max)
    }

    /// Max-abs coefficient distance to another form.
    pub fn distance(&self, other: &Self) -> f64 {
        (self - other).max_abs()
    }

    /// Coefficient of dx_0∧…∧dx_{dim-1}.
    pub fn top_coefficient(&self) -> Quaternion {
        let mask = if self.dim == 64 { u64::MAX } else { (1u64 << self.dim) - 1 };
        self.coefficient(Monomial(mask))
    }

    /// One line per monomial in canonical order: `dx1^dx3 : w x y z` with 1-based indices.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for (m, q) in &self.terms {
            let name = if m.degree() == 0 {
                "1".to_string()
            } else {
                m.indices().map(|i| format!("dx{}", i + 1)).collect::<Vec<_>>().join("^")
            };
            let _ = writeln!(s, "{name} : {:+.15e} {:+.15e} {:+.15e} {:+.15e}", q.w, q.x, q.y, q.z);
        }
        s
    }
}

impl std::ops::Add for &FormValue {
    type Output = FormValue;
    fn add(self, o: &FormValue) -> FormValue {
        assert_eq!(self.dim, o.dim, "generator count mismatch");
        let mut out = self.clone();
        for (m, q) in &o.terms {
            out.add_term(*m, *q);
        }
        out
    }
}

impl std::ops::Sub for &FormValue {
    type Output = FormValue;
    fn sub(self, o: &FormValue) -> FormValue {
        self + &o.scale(-1.0)
    }
}

impl std::ops::Neg for &FormValue {
    type Output = FormValue;
    fn neg(self) -> FormValue {
        self.scale(-1.0)
    }
}

/// Free-function wedge.
pub fn wedge(a: &FormValue, b: &FormValue) -> FormValue {
    a.wedge(b)
}

/// Wedge of a sequence, left to right.
pub fn wedge_all<'a>(dim: usize, forms: impl IntoIterator<Item = &'a FormValue>) -> FormValue {
    forms.into_iter().fold(FormValue::scalar(dim, Quaternion::E), |acc, f| acc.wedge(f))
}
