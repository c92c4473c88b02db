//! Scalar q-calculus on base `q^2`: Pochhammer symbols, q-exponentials,
//! the q-Gamma function, `Theta_0`, the q-derivative and Jackson integrals.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::context::QContext;
use crate::error::{QError, QResult};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Length of a Pochhammer product.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PochLen {
    Finite(usize),
    Infinite,
}

/// Which q-exponential a tensor exponential wraps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExpKind {
    /// `e_{q^2}`, the reciprocal product.
    Small,
    /// `E_{q^2}`, the entire product.
    Big,
}

#[inline]
fn stop_infinite(j: usize, mag: f64, ctx: &QContext) -> bool {
    (j >= 8 && mag < ctx.series_tol) || j >= ctx.max_terms
}

/// Running complex product carried as `mantissa * 2^exp` so that huge or tiny
/// partial products neither overflow nor turn into NaN.
#[derive(Debug, Clone, Copy)]
struct ScaledProduct {
    mantissa: Complex64,
    exp: i64,
}

impl ScaledProduct {
    fn one() -> Self {
        Self {
            mantissa: Complex64::new(1.0, 0.0),
            exp: 0,
        }
    }

    fn mul(&mut self, f: Complex64) {
        self.mantissa *= f;
        let n = self.mantissa.norm();
        if n > 1e100 || (n < 1e-100 && n > 0.0) {
            let e = n.log2().round() as i64;
            self.mantissa /= 2f64.powi(e as i32);
            self.exp += e;
        }
    }

    fn scale(x: f64, e: i64) -> f64 {
        if x == 0.0 {
            return 0.0;
        }
        let e = e.clamp(-4000, 4000) as i32;
        // split so that intermediate powers stay finite where the result is
        let h = e / 2;
        x * 2f64.powi(h) * 2f64.powi(e - h)
    }

    fn value(self) -> Complex64 {
        Complex64::new(
            Self::scale(self.mantissa.re, self.exp),
            Self::scale(self.mantissa.im, self.exp),
        )
    }

    fn recip(self) -> Complex64 {
        let inv = Complex64::new(1.0, 0.0) / self.mantissa;
        Complex64::new(
            Self::scale(inv.re, -self.exp),
            Self::scale(inv.im, -self.exp),
        )
    }
}

fn qpoch_scaled(a: Complex64, n: PochLen, ctx: &QContext) -> ScaledProduct {
    let q2 = ctx.q2();
    let one = Complex64::new(1.0, 0.0);
    let mut prod = ScaledProduct::one();
    let mut t = a;
    match n {
        PochLen::Finite(n) => {
            for _ in 0..n {
                prod.mul(one - t);
                t *= q2;
            }
        }
        PochLen::Infinite => {
            let mut j = 0usize;
            while !stop_infinite(j, t.norm(), ctx) {
                prod.mul(one - t);
                t *= q2;
                j += 1;
            }
        }
    }
    prod
}

/// `(a; q^2)_n`.
pub fn qpoch(a: Complex64, n: PochLen, ctx: &QContext) -> Complex64 {
    qpoch_scaled(a, n, ctx).value()
}

/// Real `(a; q^2)_n`.
pub fn qpoch_real(a: f64, n: PochLen, ctx: &QContext) -> f64 {
    qpoch(Complex64::new(a, 0.0), n, ctx).re
}

/// `(a; q^2)_inf / (b; q^2)_inf`, multiplied factor by factor so that
/// neither product has to be representable on its own.
pub fn qpoch_ratio(a: Complex64, b: Complex64, ctx: &QContext) -> Complex64 {
    let q2 = ctx.q2();
    let one = Complex64::new(1.0, 0.0);
    let (mut ta, mut tb) = (a, b);
    let mut prod = ScaledProduct::one();
    let mut j = 0usize;
    while !stop_infinite(j, ta.norm().max(tb.norm()), ctx) {
        prod.mul((one - ta) / (one - tb));
        ta *= q2;
        tb *= q2;
        j += 1;
    }
    prod.value()
}

/// `e_{q^2}(z) = 1 / (z; q^2)_inf`.
pub fn qexp_e(z: Complex64, ctx: &QContext) -> QResult<Complex64> {
    let q2 = ctx.q2();
    let one = Complex64::new(1.0, 0.0);
    let mut t = z;
    let mut j = 0usize;
    while !stop_infinite(j, t.norm(), ctx) {
        if (one - t).norm() < ctx.series_tol.max(1e-14) {
            return Err(QError::Pole { z });
        }
        t *= q2;
        j += 1;
    }
    Ok(qpoch_scaled(z, PochLen::Infinite, ctx).recip())
}

/// `E_{q^2}(z) = (-z; q^2)_inf`.
#[allow(non_snake_case)]
pub fn qexp_E(z: Complex64, ctx: &QContext) -> Complex64 {
    qpoch(-z, PochLen::Infinite, ctx)
}

/// Tensor exponential at scalar legs: `e_{q^2}(i(1-q^2) y zeta)` or `E_{q^2}(...)`.
pub fn tensor_exp(
    kind: ExpKind,
    y: Complex64,
    zeta: Complex64,
    ctx: &QContext,
) -> QResult<Complex64> {
    let arg = I * (1.0 - ctx.q2()) * y * zeta;
    match kind {
        ExpKind::Small => qexp_e(arg, ctx),
        ExpKind::Big => Ok(qexp_E(arg, ctx)),
    }
}

/// `E(q^2 y zeta) * e(-u zeta)` evaluated as one product of factor ratios.
///
/// Both factors overflow or underflow separately on far lattice points,
/// while the ratio stays representable.
pub fn tensor_exp_pair(y: f64, u: f64, zeta: f64, ctx: &QContext) -> Complex64 {
    let c = 1.0 - ctx.q2();
    let a = I * (c * ctx.q2() * y * zeta);
    let b = I * (c * u * zeta);
    // E(q^2 y zeta) = (-a; q^2)_inf and e(-u zeta) = 1/(-b; q^2)_inf
    qpoch_ratio(-a, -b, ctx)
}

/// `Gamma_{q^2}(nu)` for `nu > 0`.
pub fn qgamma(nu: f64, ctx: &QContext) -> QResult<f64> {
    if !(nu > 0.0) {
        return Err(QError::Domain(format!("qgamma requires nu > 0, got {nu}")));
    }
    qgamma_ext(nu, ctx)
}

/// `Gamma_{q^2}` at any argument off the poles `0, -1, -2, ...`.
pub fn qgamma_ext(nu: f64, ctx: &QContext) -> QResult<f64> {
    if nu <= 0.0 && (nu - nu.round()).abs() < 1e-12 {
        return Err(QError::Domain(format!("qgamma has a pole at nu = {nu}")));
    }
    let q2 = ctx.q2();
    let ratio = qpoch_ratio(
        Complex64::new(q2, 0.0),
        Complex64::new(ctx.qp(2.0 * nu), 0.0),
        ctx,
    )
    .re;
    Ok(ratio * (1.0 - q2).powf(1.0 - nu))
}

/// `Q(z, q) = (1-q^2) sum_{|m|<=M} 1 / (z q^{2m} + z^{-1} q^{-2m})`.
pub fn theta_sum(z: f64, ctx: &QContext) -> f64 {
    let q2 = ctx.q2();
    let m = ctx.lattice_cutoff;
    (-m..=m)
        .map(|k| {
            let p = q2.powi(k);
            1.0 / (z * p + 1.0 / (z * p))
        })
        .sum::<f64>()
        * (1.0 - q2)
}

/// `Theta_0 = Q(1 - q^2, q)`.
pub fn theta0(ctx: &QContext) -> f64 {
    theta_sum(1.0 - ctx.q2(), ctx)
}

/// q^2-derivative `(f(z) - f(q^2 z)) / (z (1 - q^2))`.
pub fn qderiv<F>(f: F, z: Complex64, ctx: &QContext) -> QResult<Complex64>
where
    F: Fn(Complex64) -> Complex64,
{
    if z.norm() == 0.0 {
        return Err(QError::Domain("q-derivative is undefined at z = 0".into()));
    }
    Ok((f(z) - f(z * ctx.q2())) / (z * (1.0 - ctx.q2())))
}

/// A truncated Jackson sum with its convergence diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacksonSum {
    pub value: Complex64,
    /// Sum of absolute values of all terms.
    pub abs_sum: f64,
    /// Largest distance between the full sum and the four previous symmetric partial sums.
    pub spread: f64,
    pub converged: bool,
}

impl JacksonSum {
    fn from_shells(terms: &[(i32, Complex64)], cutoff: i32, ctx: &QContext) -> Self {
        let mut value = Complex64::new(0.0, 0.0);
        let mut abs_sum = 0.0;
        let mut finite = true;
        for &(_, t) in terms {
            value += t;
            abs_sum += t.norm();
            finite &= t.re.is_finite() && t.im.is_finite();
        }
        let mut shell_tail = Complex64::new(0.0, 0.0);
        let mut spread: f64 = 0.0;
        for k in 0..4 {
            let outer = cutoff - k;
            for &(m, t) in terms {
                if m.abs() == outer {
                    shell_tail += t;
                }
            }
            spread = spread.max(shell_tail.norm());
        }
        let scale = abs_sum.max(f64::MIN_POSITIVE);
        let converged = finite && spread <= ctx.cauchy_tol * scale;
        Self {
            value,
            abs_sum,
            spread: if finite { spread } else { f64::INFINITY },
            converged,
        }
    }

    pub fn into_result(self, what: &str) -> QResult<Complex64> {
        if self.converged {
            Ok(self.value)
        } else {
            Err(QError::Divergence {
                what: what.to_string(),
                spread: self.spread,
            })
        }
    }
}

/// Jackson sum over the signed lattice `{+-q^{2m}}` with diagnostics.
pub fn jackson_z_detailed<F>(f: F, ctx: &QContext) -> JacksonSum
where
    F: Fn(f64) -> Complex64,
{
    let q2 = ctx.q2();
    let m = ctx.lattice_cutoff;
    let terms: Vec<(i32, Complex64)> = (-m..=m)
        .map(|k| {
            let p = q2.powi(k);
            (k, (f(p) + f(-p)) * (p * (1.0 - q2)))
        })
        .collect();
    JacksonSum::from_shells(&terms, m, ctx)
}

/// `(1-q^2) sum_{|m|<=M} q^{2m} [f(q^{2m}) + f(-q^{2m})]`; divergence is an error.
pub fn jackson_z<F>(f: F, ctx: &QContext) -> QResult<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    jackson_z_detailed(f, ctx).into_result("jackson_z")
}

/// Jackson sum over the half line `{q^m}` with diagnostics.
pub fn jackson_halfline_detailed<F>(f: F, ctx: &QContext) -> JacksonSum
where
    F: Fn(f64) -> Complex64,
{
    let q = ctx.q;
    let m = ctx.lattice_cutoff;
    let terms: Vec<(i32, Complex64)> = (-m..=m)
        .map(|k| {
            let p = q.powi(k);
            (k, f(p) * (p * (1.0 - ctx.q2())))
        })
        .collect();
    JacksonSum::from_shells(&terms, m, ctx)
}

/// `(1-q^2) sum_{|m|<=M} q^m f(q^m)`; divergence is an error.
pub fn jackson_halfline<F>(f: F, ctx: &QContext) -> QResult<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    jackson_halfline_detailed(f, ctx).into_result("jackson_halfline")
}

/// Cauchy test on `sum q^{2m} (|f(q^{2m})| + |f(-q^{2m})|)`.
pub fn is_abs_integrable<F>(f: F, ctx: &QContext) -> bool
where
    F: Fn(f64) -> Complex64,
{
    jackson_z_detailed(|z| Complex64::new(f(z).norm(), 0.0), ctx).converged
}
