//! q^2-Bessel functions of kinds 1 and 2, the modified function `I^(2)`,
//! the Bessel-Macdonald function `K^(2)` and a classical `K_nu` oracle.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::context::QContext;
use crate::error::{QError, QResult};
use crate::qkernels::{qgamma_ext, qpoch, qpoch_ratio, PochLen};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BesselKind {
    J1,
    J2,
    I2,
    K2,
    ClassicalK,
}

/// A Bessel-type function together with the series normalization it uses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BesselSpec {
    pub kind: BesselKind,
    pub nu: f64,
    pub convention_note: String,
}

impl BesselSpec {
    pub fn new(kind: BesselKind, nu: f64) -> QResult<Self> {
        if kind == BesselKind::K2 {
            check_noninteger(nu)?;
        }
        let convention_note = match kind {
            BesselKind::J2 => "sum_m (-1)^m q^{2m^2} (t/2)^{2m} / (q^2;q^2)_m^2",
            BesselKind::J1 => "J2(t) / (-t^2/4; q^2)_inf",
            BesselKind::I2 => {
                "q^{-delta mu} sum_l q^{2l(l+mu)+delta|mu|l} (t/2)^{2l+mu} (q^{2mu+2l+2};q^2)_inf / ((q^2;q^2)_inf (q^2;q^2)_l)"
            }
            BesselKind::K2 => {
                "Gamma(nu)Gamma(1-nu)/2 q^{nu-nu^2-delta(nu^2/2+nu)} [I2(-nu,t) - I2(nu,t)]"
            }
            BesselKind::ClassicalK => "int_0^inf exp(-x cosh s) cosh(nu s) ds",
        }
        .to_string();
        Ok(Self {
            kind,
            nu,
            convention_note,
        })
    }

    pub fn eval(&self, t: f64, ctx: &QContext) -> QResult<f64> {
        match self.kind {
            BesselKind::J1 => j1_zero(t, ctx),
            BesselKind::J2 => j2_zero(t, ctx),
            BesselKind::I2 => i2(self.nu, t, ctx),
            BesselKind::K2 => k2(self.nu, t, ctx),
            BesselKind::ClassicalK => classical_k(self.nu, t),
        }
    }
}

pub(crate) fn check_noninteger(nu: f64) -> QResult<()> {
    if !nu.is_finite() || (nu - nu.round()).abs() < 1e-12 {
        return Err(QError::IntegerOrder(nu));
    }
    Ok(())
}

/// Sums `terms(l)` until the increment is negligible for 8 consecutive
/// indices beyond the running maximum.
fn sum_series<F>(mut term: F, ctx: &QContext) -> QResult<f64>
where
    F: FnMut(usize) -> f64,
{
    let mut sum = 0.0;
    let mut peak: f64 = 0.0;
    let mut quiet = 0;
    for l in 0..ctx.max_terms {
        let t = term(l);
        if !t.is_finite() {
            return Err(QError::Divergence {
                what: "bessel series".into(),
                spread: f64::INFINITY,
            });
        }
        sum += t;
        peak = peak.max(t.abs());
        if t.abs() <= ctx.series_tol * peak.max(sum.abs()) {
            quiet += 1;
            if quiet >= 8 && l >= 8 {
                return Ok(sum);
            }
        } else {
            quiet = 0;
        }
    }
    Err(QError::Divergence {
        what: "bessel series hit max_terms".into(),
        spread: f64::NAN,
    })
}

/// `J_0^{(2)}(t; q^2)`.
pub fn j2_zero(t: f64, ctx: &QContext) -> QResult<f64> {
    if t < 0.0 {
        return Err(QError::Domain("j2_zero requires t >= 0".into()));
    }
    let q2 = ctx.q2();
    let x = t * t / 4.0;
    // term_m = (-1)^m q^{2m^2} x^m / (q^2;q^2)_m^2, built recursively
    let mut term = 1.0;
    sum_series(
        |m| {
            if m > 0 {
                let mf = m as f64;
                let pm = 1.0 - q2.powi(m as i32);
                term *= -x * q2.powf(2.0 * mf - 1.0) / (pm * pm);
            }
            term
        },
        ctx,
    )
}

/// `J_0^{(1)}(t; q^2) = J_0^{(2)}(t; q^2) / (-t^2/4; q^2)_inf`.
pub fn j1_zero(t: f64, ctx: &QContext) -> QResult<f64> {
    let j2 = j2_zero(t, ctx)?;
    let p = qpoch(Complex64::new(-t * t / 4.0, 0.0), PochLen::Infinite, ctx).re;
    Ok(j2 / p)
}

/// `I_mu^{(2)}(x)` in the convention matched to the series of `Q_nu`.
pub fn i2(mu: f64, x: f64, ctx: &QContext) -> QResult<f64> {
    if x < 0.0 {
        return Err(QError::Domain("i2 requires x >= 0".into()));
    }
    if x == 0.0 {
        return if mu > 0.0 {
            Ok(0.0)
        } else if mu == 0.0 {
            Ok(1.0 / qgamma_ext(1.0, ctx)?)
        } else {
            Err(QError::Domain(
                "i2 with negative order is singular at x = 0".into(),
            ))
        };
    }
    let q2 = ctx.q2();
    let d = ctx.d();
    let half = x / 2.0;
    // (q^{2mu+2}; q^2)_inf / (q^2; q^2)_inf
    let mut pref = qpoch_ratio(
        Complex64::new(ctx.qp(2.0 * mu + 2.0), 0.0),
        Complex64::new(q2, 0.0),
        ctx,
    )
    .re;
    let lead = ctx.qp(-d * mu) * half.powf(mu);
    let mut inv_fact = 1.0;
    let step = ctx.qp(d * mu.abs()) * half * half;
    let mut power = 1.0;
    let s = sum_series(
        |l| {
            if l > 0 {
                let lf = (l - 1) as f64;
                // advance (q^{2mu+2l+2};q^2)_inf and 1/(q^2;q^2)_l
                pref /= 1.0 - ctx.qp(2.0 * mu + 2.0 * lf + 2.0);
                inv_fact /= 1.0 - q2.powi(l as i32);
                power *= step * q2.powf(2.0 * lf + 1.0 + mu);
            }
            power * pref * inv_fact
        },
        ctx,
    )?;
    Ok(lead * s)
}

/// `K_nu^{(2)}(x)` for non-integer `nu`.
pub fn k2(nu: f64, x: f64, ctx: &QContext) -> QResult<f64> {
    check_noninteger(nu)?;
    if !(x > 0.0) {
        return Err(QError::Domain("k2 requires x > 0".into()));
    }
    let d = ctx.d();
    let g = qgamma_ext(nu, ctx)? * qgamma_ext(1.0 - nu, ctx)? / 2.0;
    let pw = ctx.qp(nu - nu * nu - d * (nu * nu / 2.0 + nu));
    Ok(g * pw * (i2(-nu, x, ctx)? - i2(nu, x, ctx)?))
}

/// Classical `K_nu(x)` by the trapezoidal rule on `int_0^inf e^{-x cosh t} cosh(nu t) dt`.
pub fn classical_k(nu: f64, x: f64) -> QResult<f64> {
    if !(x > 0.0) {
        return Err(QError::Domain("classical_k requires x > 0".into()));
    }
    let h = 1e-3;
    let f = |t: f64| (-x * t.cosh() + nu * t).exp() / 2.0 + (-x * t.cosh() - nu * t).exp() / 2.0;
    let mut sum = f(0.0) / 2.0;
    let mut t = h;
    loop {
        let v = f(t);
        sum += v;
        if v < 1e-18 * sum && t > 1.0 {
            break;
        }
        t += h;
    }
    Ok(sum * h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn values_at_zero() {
        let ctx = QContext::default();
        assert_eq!(j2_zero(0.0, &ctx).unwrap(), 1.0);
        assert_eq!(j1_zero(0.0, &ctx).unwrap(), 1.0);
        assert_eq!(i2(0.5, 0.0, &ctx).unwrap(), 0.0);
        assert!(i2(-0.5, 0.0, &ctx).is_err());
    }

    #[test]
    fn j2_matches_lattice_display() {
        // sum_m (-1)^m (1-q^2)^{2m} q^{2m(m+1)} u^{2m} / (q^2;q^2)_m^2 at argument 2uq(1-q^2)
        let ctx = QContext::default();
        let (q, q2) = (ctx.q, ctx.q2());
        for u in [1.0f64, 0.3, 2.5] {
            let mut s = 0.0;
            for m in 0..40 {
                let p = qpoch(Complex64::new(q2, 0.0), PochLen::Finite(m), &ctx).re;
                let mf = m as f64;
                s += (-1f64).powi(m as i32)
                    * (1.0 - q2).powf(2.0 * mf)
                    * q.powf(2.0 * mf * (mf + 1.0))
                    * u.powf(2.0 * mf)
                    / (p * p);
            }
            let j = j2_zero(2.0 * u * q * (1.0 - q2), &ctx).unwrap();
            assert_relative_eq!(j, s, max_relative = 1e-13);
        }
    }

    #[test]
    fn j1_and_j2_agree_to_second_order() {
        let ctx = QContext::default();
        let t = 1e-3;
        let (a, b) = (j1_zero(t, &ctx).unwrap(), j2_zero(t, &ctx).unwrap());
        assert!((a - b).abs() < t * t);
        assert!((a - 1.0).abs() < t * t);
    }

    #[test]
    fn i2_direct_series() {
        let ctx = QContext::default();
        let (q2, mu, x) = (ctx.q2(), 0.5, 0.1);
        let mut s = 0.0;
        for l in 0..30 {
            let lf = l as f64;
            let num = qpoch(
                Complex64::new(ctx.qp(2.0 * mu + 2.0 * lf + 2.0), 0.0),
                PochLen::Infinite,
                &ctx,
            )
            .re;
            let den = qpoch(Complex64::new(q2, 0.0), PochLen::Infinite, &ctx).re
                * qpoch(Complex64::new(q2, 0.0), PochLen::Finite(l), &ctx).re;
            s += ctx.qp(2.0 * lf * (lf + mu)) * (x / 2.0f64).powf(2.0 * lf + mu) * num / den;
        }
        assert_relative_eq!(i2(mu, x, &ctx).unwrap(), s, max_relative = 1e-13);
    }

    #[test]
    fn k2_rejects_integer_order() {
        let ctx = QContext::default();
        assert!(matches!(k2(1.0, 0.5, &ctx), Err(QError::IntegerOrder(_))));
        assert!(matches!(
            BesselSpec::new(BesselKind::K2, 2.0),
            Err(QError::IntegerOrder(_))
        ));
    }

    #[test]
    fn classical_k_oracles() {
        let exact = (PI / 2.0).sqrt() * (-1.0f64).exp();
        assert_relative_eq!(classical_k(0.5, 1.0).unwrap(), exact, max_relative = 1e-8);
        assert_relative_eq!(
            classical_k(0.5, 1.0).unwrap(),
            0.4610685,
            max_relative = 1e-6
        );
        assert_relative_eq!(
            classical_k(1.3, 0.7).unwrap(),
            classical_k(-1.3, 0.7).unwrap(),
            max_relative = 1e-14
        );
        let mut prev = f64::INFINITY;
        for i in 1..20 {
            let v = classical_k(0.3, 0.25 * i as f64).unwrap();
            assert!(v < prev);
            prev = v;
        }
        assert!(classical_k(0.5, 0.0).is_err());
    }

    #[test]
    fn k2_approaches_classical_near_q_one() {
        let nu = 0.5;
        let mut prev = f64::INFINITY;
        for q in [0.9, 0.99, 0.999] {
            let ctx = QContext::new(q, 0).unwrap();
            let c = 2.0 * (1.0 - ctx.q2());
            let s = 1.0;
            let err =
                (k2(nu, c * s, &ctx).unwrap() / classical_k(nu, 2.0 * s).unwrap() - 1.0).abs();
            assert!(err < prev);
            prev = err;
        }
        assert!(prev < 5e-2);
    }
}
