use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{QError, QResult};
use crate::ncalg::{BasisTag, NormalOrderedElement};

/// `sum c_{l,k} (x*)^l H^k x^l`, keyed by `(l, k)`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RadialSeries {
    terms: BTreeMap<(i32, i32), Complex64>,
}

impl RadialSeries {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_terms<I: IntoIterator<Item = ((i32, i32), Complex64)>>(terms: I) -> Self {
        let mut s = Self::new();
        for (lk, c) in terms {
            s.add(lk, c);
        }
        s
    }

    pub fn add(&mut self, lk: (i32, i32), c: Complex64) {
        let v = self.terms.entry(lk).or_default();
        *v += c;
        if *v == Complex64::default() {
            self.terms.remove(&lk);
        }
    }

    pub fn terms(&self) -> &BTreeMap<(i32, i32), Complex64> {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Value at `x* = x = rho`, `H = h` (scalar legs).
    pub fn eval(&self, rho: f64, h: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|(&(l, k), c)| c * rho.powi(2 * l) * h.powi(k))
            .sum()
    }

    /// Terms with a given power of `H`, as `l -> c`.
    pub fn h_slice(&self, k: i32) -> BTreeMap<i32, Complex64> {
        self.terms
            .iter()
            .filter(|((_, kk), _)| *kk == k)
            .map(|(&(l, _), &c)| (l, c))
            .collect()
    }
}

/// Splits an element of the horospheric basis by `r = n - m`.
///
/// The component at `r > 0` is `phi_r` with `f = ... + phi_r x^r`, at `r < 0`
/// it is `phi_r` with `(x*)^{-r} phi_r`, and `r = 0` is the radial part.
pub fn radial_decompose(f: &NormalOrderedElement) -> QResult<BTreeMap<i32, RadialSeries>> {
    if f.tag() != BasisTag::XT {
        return Err(QError::UnsupportedBasis(f.tag()));
    }
    let mut out: BTreeMap<i32, RadialSeries> = BTreeMap::new();
    for (&(m, k, n), &c) in f.terms() {
        let r = n - m;
        let l = m.min(n);
        out.entry(r).or_default().add((l, k), c);
    }
    Ok(out)
}

/// Inverse of [`radial_decompose`].
pub fn radial_reassemble(parts: &BTreeMap<i32, RadialSeries>) -> NormalOrderedElement {
    let mut f = NormalOrderedElement::zero(BasisTag::XT);
    for (&r, series) in parts {
        for (&(l, k), &c) in series.terms() {
            let (m, n) = if r >= 0 { (l, l + r) } else { (l - r, l) };
            f.add_term((m, k, n), c);
        }
    }
    f
}
