use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::BasisTag;
use crate::error::{QError, QResult};

/// Exponents `(m, k, n)` of `left^m middle^k right^n`.
pub type Monomial = (i32, i32, i32);

/// Finite linear combination of ordered monomials in one basis.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalOrderedElement {
    tag: BasisTag,
    terms: BTreeMap<Monomial, Complex64>,
}

/// Serialized form of one term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TermRecord {
    pub m: i32,
    pub k: i32,
    pub n: i32,
    pub re: f64,
    pub im: f64,
}

impl NormalOrderedElement {
    pub fn zero(tag: BasisTag) -> Self {
        Self {
            tag,
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(tag: BasisTag, m: i32, k: i32, n: i32) -> Self {
        Self::term(tag, (m, k, n), Complex64::new(1.0, 0.0))
    }

    pub fn term(tag: BasisTag, mono: Monomial, c: Complex64) -> Self {
        let mut e = Self::zero(tag);
        e.add_term(mono, c);
        e
    }

    pub fn from_terms<I>(tag: BasisTag, terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, Complex64)>,
    {
        let mut e = Self::zero(tag);
        for (mono, c) in terms {
            e.add_term(mono, c);
        }
        e
    }

    pub fn tag(&self) -> BasisTag {
        self.tag
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Complex64> {
        &self.terms
    }

    pub fn coeff(&self, mono: Monomial) -> Complex64 {
        self.terms.get(&mono).copied().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `c` to the coefficient of `mono`, dropping it if it becomes zero.
    pub fn add_term(&mut self, mono: Monomial, c: Complex64) {
        if c == Complex64::default() {
            return;
        }
        let slot = self.terms.entry(mono).or_default();
        *slot += c;
        if *slot == Complex64::default() {
            self.terms.remove(&mono);
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::from_terms(self.tag, self.terms.iter().map(|(&k, &v)| (k, v * c)))
    }

    /// Removes coefficients with modulus below `tol` times the largest one.
    pub fn prune(&self, tol: f64) -> Self {
        let peak = self.max_abs();
        Self::from_terms(
            self.tag,
            self.terms
                .iter()
                .filter(|(_, v)| v.norm() > tol * peak)
                .map(|(&k, &v)| (k, v)),
        )
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn checked_add(&self, other: &Self) -> QResult<Self> {
        self.same_tag(other)?;
        let mut out = self.clone();
        for (&k, &v) in &other.terms {
            out.add_term(k, v);
        }
        Ok(out)
    }

    pub(crate) fn same_tag(&self, other: &Self) -> QResult<()> {
        if self.tag != other.tag {
            return Err(QError::TagMismatch {
                left: self.tag,
                right: other.tag,
            });
        }
        Ok(())
    }

    /// Evaluates the element with commuting scalar stand-ins for the three generators.
    pub fn eval_scalar(&self, a: Complex64, h: Complex64, b: Complex64) -> Complex64 {
        self.terms
            .iter()
            .map(|(&(m, k, n), &c)| c * a.powi(m) * h.powi(k) * b.powi(n))
            .sum()
    }

    pub fn to_records(&self) -> Vec<TermRecord> {
        self.terms
            .iter()
            .map(|(&(m, k, n), c)| TermRecord {
                m,
                k,
                n,
                re: c.re,
                im: c.im,
            })
            .collect()
    }

    pub fn from_records(tag: BasisTag, records: &[TermRecord]) -> Self {
        Self::from_terms(
            tag,
            records
                .iter()
                .map(|r| ((r.m, r.k, r.n), Complex64::new(r.re, r.im))),
        )
    }

    pub fn to_json(&self) -> QResult<String> {
        serde_json::to_string(&self.to_records()).map_err(|e| QError::Serialization(e.to_string()))
    }

    pub fn from_json(tag: BasisTag, s: &str) -> QResult<Self> {
        let recs: Vec<TermRecord> =
            serde_json::from_str(s).map_err(|e| QError::Serialization(e.to_string()))?;
        Ok(Self::from_records(tag, &recs))
    }
}

/// `max |f - g| / max(|f|, |g|)` over coefficients; zero when both vanish.
pub fn max_rel_diff(f: &NormalOrderedElement, g: &NormalOrderedElement) -> f64 {
    max_scaled_diff(f, g, 0.0)
}

/// `max |f - g| / max(|f|, |g|, floor)`, for comparisons where exact cancellation
/// can leave both sides at rounding level.
pub fn max_scaled_diff(f: &NormalOrderedElement, g: &NormalOrderedElement, floor: f64) -> f64 {
    let scale = f.max_abs().max(g.max_abs()).max(floor);
    if scale == 0.0 {
        return 0.0;
    }
    let mut worst: f64 = 0.0;
    for k in f.terms.keys().chain(g.terms.keys()) {
        worst = worst.max((f.coeff(*k) - g.coeff(*k)).norm());
    }
    worst / scale
}

impl Add for &NormalOrderedElement {
    type Output = NormalOrderedElement;

    /// Panics on basis mismatch; use [`NormalOrderedElement::checked_add`] otherwise.
    fn add(self, rhs: Self) -> NormalOrderedElement {
        self.checked_add(rhs).expect("basis mismatch in addition")
    }
}

impl Sub for &NormalOrderedElement {
    type Output = NormalOrderedElement;

    fn sub(self, rhs: Self) -> NormalOrderedElement {
        self + &(-rhs)
    }
}

impl Neg for &NormalOrderedElement {
    type Output = NormalOrderedElement;

    fn neg(self) -> NormalOrderedElement {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul<f64> for &NormalOrderedElement {
    type Output = NormalOrderedElement;

    fn mul(self, rhs: f64) -> NormalOrderedElement {
        self.scale(Complex64::new(rhs, 0.0))
    }
}
