use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::radial::RadialSeries;
use crate::context::QContext;
use crate::error::{QError, QResult};
use crate::qbessel::{j1_zero, j2_zero};
use crate::qkernels::{jackson_halfline_detailed, theta0};

/// Radial samples `f(rho)` on `rho = q^m`, carrying the power of `H` they multiply.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub h_power: i32,
    pub values: BTreeMap<i32, Complex64>,
}

impl RadialProfile {
    pub fn new(h_power: i32) -> Self {
        Self {
            h_power,
            values: BTreeMap::new(),
        }
    }

    pub fn point(h_power: i32, m: i32, c: Complex64) -> Self {
        Self {
            h_power,
            values: BTreeMap::from([(m, c)]),
        }
    }

    /// Samples of the `H^k` slice of a radial series at `x* = x = q^m`, `|m| <= window`.
    pub fn from_series(series: &RadialSeries, k: i32, window: i32, ctx: &QContext) -> Self {
        let slice = series.h_slice(k);
        let values = (-window..=window)
            .map(|m| {
                let rho = ctx.q.powi(m);
                (
                    m,
                    slice
                        .iter()
                        .map(|(&l, c)| c * rho.powi(2 * l))
                        .sum::<Complex64>(),
                )
            })
            .filter(|(_, v)| *v != Complex64::default())
            .collect();
        Self { h_power: k, values }
    }

    pub fn is_zero(&self) -> bool {
        self.values.values().all(|v| *v == Complex64::default())
    }

    /// `max |f - g| / max |f|` over the union of supports.
    pub fn max_rel_diff(&self, other: &Self) -> f64 {
        let keys: Vec<i32> = self
            .values
            .keys()
            .chain(other.values.keys())
            .copied()
            .collect();
        let get = |p: &Self, m: i32| p.values.get(&m).copied().unwrap_or_default();
        let scale = keys
            .iter()
            .map(|&m| get(self, m).norm())
            .fold(0.0, f64::max);
        let diff = keys
            .iter()
            .map(|&m| (get(self, m) - get(other, m)).norm())
            .fold(0.0, f64::max);
        if scale == 0.0 {
            if diff == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            diff / scale
        }
    }
}

/// Inverse radial transform of a profile, kept as a function of `u = (y* y)^{1/2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct HankelImage {
    source: RadialProfile,
}

impl HankelImage {
    /// Power of `H` carried by the image (shifted down by two).
    pub fn h_power(&self) -> i32 {
        self.source.h_power - 2
    }

    /// `(1+q)/(4 Theta_0^2) int_0^inf J_0^{(2)}(2 u q (1-q^2) rho) f(rho) rho d_q rho`,
    /// the integral being the finite sum over the support of `f`.
    pub fn eval(&self, u: f64, ctx: &QContext) -> QResult<Complex64> {
        let q = ctx.q;
        let c = 1.0 - ctx.q2();
        let th = theta0(ctx);
        let mut sum = Complex64::default();
        for (&m, f) in &self.source.values {
            let rho = q.powi(m);
            sum += f * (j2_zero(2.0 * u * q * c * rho, ctx)? * rho * rho * c);
        }
        Ok(sum * ((1.0 + q) / (4.0 * th * th)))
    }

    pub fn sample(&self, window: i32, ctx: &QContext) -> QResult<RadialProfile> {
        let mut out = RadialProfile::new(self.h_power());
        for m in -window..=window {
            out.values.insert(m, self.eval(ctx.q.powi(m), ctx)?);
        }
        Ok(out)
    }
}

pub fn hankel_inverse(f: &RadialProfile) -> HankelImage {
    HankelImage { source: f.clone() }
}

/// Forward radial transform `(1+q) int_0^inf J_0^{(1)}(2x(1-q^2) r) g(r) r d_q r` of an
/// inverse image, at `x = q^n`, `|n| <= window`. The `r` sum runs over the full cutoff
/// and is subject to the Cauchy test; a term that cannot be evaluated counts as divergent.
pub fn hankel_forward(g: &HankelImage, window: i32, ctx: &QContext) -> QResult<RadialProfile> {
    let c = 1.0 - ctx.q2();
    let mut out = RadialProfile::new(g.h_power());
    for n in -window..=window {
        let x = ctx.q.powi(n);
        let sum = jackson_halfline_detailed(
            |r| match (j1_zero(2.0 * x * c * r, ctx), g.eval(r, ctx)) {
                (Ok(j), Ok(v)) => v * (j * r),
                _ => Complex64::new(f64::NAN, f64::NAN),
            },
            ctx,
        );
        let v = sum.into_result(&format!("radial forward transform at x = q^{n}"))?;
        out.values.insert(n, v * (1.0 + ctx.q));
    }
    Ok(out)
}

/// Forward after inverse on the support window of `f`.
pub fn hankel_roundtrip(f: &RadialProfile, ctx: &QContext) -> QResult<RadialProfile> {
    if f.is_zero() {
        return Ok(RadialProfile::new(f.h_power));
    }
    let window = f.values.keys().map(|m| m.abs()).max().unwrap_or(0);
    hankel_forward(&hankel_inverse(f), window, ctx)
}

/// Relative mismatch of the radial roundtrip; divergence of the forward sum maps to infinity.
pub fn hankel_roundtrip_residual(f: &RadialProfile, ctx: &QContext) -> f64 {
    match hankel_roundtrip(f, ctx) {
        Ok(back) => {
            let mut back = back;
            back.h_power = f.h_power;
            f.max_rel_diff(&back)
        }
        Err(QError::Divergence { .. }) => f64::INFINITY,
        Err(_) => f64::NAN,
    }
}
