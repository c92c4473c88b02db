//! Global parameters and the truncation policy shared by every module.

use serde::{Deserialize, Serialize};

use crate::error::{QError, QResult};

/// Parameters `q`, `delta`, `s` together with truncation and tolerance settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QContext {
    pub q: f64,
    pub delta: u8,
    pub s: f64,
    /// Jackson sums run over `|m| <= lattice_cutoff`.
    pub lattice_cutoff: i32,
    /// Relative increment below which series and products stop.
    pub series_tol: f64,
    pub max_terms: usize,
    /// Relative spread allowed over the last five partial Jackson sums.
    pub cauchy_tol: f64,
}

impl Default for QContext {
    fn default() -> Self {
        Self {
            q: 0.5,
            delta: 0,
            s: 1.0,
            lattice_cutoff: 60,
            series_tol: 1e-17,
            max_terms: 200_000,
            cauchy_tol: 1e-9,
        }
    }
}

impl QContext {
    pub fn new(q: f64, delta: u8) -> QResult<Self> {
        Self {
            q,
            delta,
            ..Self::default()
        }
        .validated()
    }

    pub fn with_s(mut self, s: f64) -> QResult<Self> {
        self.s = s;
        self.validated()
    }

    pub fn with_cutoff(mut self, m: i32) -> QResult<Self> {
        self.lattice_cutoff = m;
        self.validated()
    }

    pub fn with_series_tol(mut self, tol: f64) -> QResult<Self> {
        self.series_tol = tol;
        self.validated()
    }

    pub fn with_cauchy_tol(mut self, tol: f64) -> QResult<Self> {
        self.cauchy_tol = tol;
        self.validated()
    }

    pub fn validated(self) -> QResult<Self> {
        if !(self.q > 0.0 && self.q < 1.0) {
            return Err(QError::InvalidParameter(format!(
                "q = {} must lie in (0,1)",
                self.q
            )));
        }
        if self.delta > 2 {
            return Err(QError::InvalidParameter(format!(
                "delta = {} must be 0, 1 or 2",
                self.delta
            )));
        }
        if self.s == 0.0 || !self.s.is_finite() {
            return Err(QError::InvalidParameter(
                "s must be a nonzero finite real".into(),
            ));
        }
        if self.lattice_cutoff < 5 {
            return Err(QError::InvalidParameter(
                "lattice cutoff must be at least 5".into(),
            ));
        }
        if !(self.series_tol > 0.0 && self.cauchy_tol > 0.0) {
            return Err(QError::InvalidParameter(
                "tolerances must be positive".into(),
            ));
        }
        if self.max_terms < 8 {
            return Err(QError::InvalidParameter(
                "max_terms must be at least 8".into(),
            ));
        }
        Ok(self)
    }

    #[inline]
    pub fn q2(&self) -> f64 {
        self.q * self.q
    }

    #[inline]
    pub fn d(&self) -> f64 {
        f64::from(self.delta)
    }

    /// `q^x` for real `x`.
    #[inline]
    pub fn qp(&self, x: f64) -> f64 {
        self.q.powf(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_parameters() {
        assert!(QContext::new(1.0, 0).is_err());
        assert!(QContext::new(0.0, 0).is_err());
        assert!(QContext::new(0.5, 3).is_err());
        assert!(QContext::default().with_s(0.0).is_err());
        assert!(QContext::default().with_cutoff(2).is_err());
    }

    #[test]
    fn defaults() {
        let c = QContext::default();
        assert_eq!((c.q, c.delta, c.s, c.lattice_cutoff), (0.5, 0, 1.0, 60));
    }
}
