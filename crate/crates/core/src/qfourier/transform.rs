use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::lattice::{LatticeFunction, LatticeKey, LatticePoint, Sign};
use crate::context::QContext;
use crate::error::{QError, QResult};
use crate::qkernels::{jackson_z_detailed, tensor_exp, tensor_exp_pair, theta0, ExpKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Forward,
    Inverse,
}

/// What to do with a non-convergent off-diagonal kernel sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Regularization {
    /// Report divergence.
    None,
    /// Set the integral of a q-derivative to zero, which gives `0` for every `y != u`.
    #[default]
    Derivative,
}

/// Outcome of one orthogonality kernel evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    pub value: Complex64,
    /// True when the Jackson sum itself converged.
    pub convergent: bool,
    /// True when the integrand is a polynomial in `zeta` (`y = u q^{-2j}`, `j >= 1`).
    pub polynomial: bool,
}

fn polynomial_ratio(y: f64, u: f64, ctx: &QContext) -> bool {
    if y == 0.0 || u == 0.0 || y.signum() != u.signum() {
        return false;
    }
    let j = (y / u).ln() / ctx.q2().ln();
    let jr = j.round();
    jr <= -1.0 && (j - jr).abs() < 1e-9
}

/// `int E(q^2 y zeta) e(-u zeta) d_{q^2} zeta` with convergence diagnostics.
pub fn lemma_kernel_detailed(
    y: f64,
    u: f64,
    reg: Regularization,
    ctx: &QContext,
) -> QResult<KernelValue> {
    let sum = jackson_z_detailed(|z| tensor_exp_pair(y, u, z, ctx), ctx);
    let polynomial = polynomial_ratio(y, u, ctx);
    if sum.converged {
        return Ok(KernelValue {
            value: sum.value,
            convergent: true,
            polynomial,
        });
    }
    match reg {
        Regularization::Derivative if y != u => Ok(KernelValue {
            value: Complex64::default(),
            convergent: false,
            polynomial,
        }),
        _ => Err(QError::Divergence {
            what: format!("orthogonality kernel at (y, u) = ({y}, {u})"),
            spread: sum.spread,
        }),
    }
}

/// Orthogonality kernel value; see [`lemma_kernel_detailed`].
pub fn lemma_kernel(y: f64, u: f64, reg: Regularization, ctx: &QContext) -> QResult<Complex64> {
    lemma_kernel_detailed(y, u, reg, ctx).map(|k| k.value)
}

/// The second form: `int E(q^2 y xi) e(-y zeta) d_{q^2} y`.
pub fn lemma_kernel_dual(
    xi: f64,
    zeta: f64,
    reg: Regularization,
    ctx: &QContext,
) -> QResult<Complex64> {
    let sum = jackson_z_detailed(|y| tensor_exp_pair(xi, zeta, y, ctx), ctx);
    if sum.converged {
        Ok(sum.value)
    } else if reg == Regularization::Derivative && xi != zeta {
        Ok(Complex64::default())
    } else {
        Err(QError::Divergence {
            what: format!("dual orthogonality kernel at (xi, zeta) = ({xi}, {zeta})"),
            spread: sum.spread,
        })
    }
}

/// The closed diagonal value `2 Theta_0 / ((1 - q^2) |u|)`.
pub fn lemma_diagonal(u: f64, ctx: &QContext) -> f64 {
    2.0 * theta0(ctx) / ((1.0 - ctx.q2()) * u.abs())
}

/// An element of the image space of the inverse transform, stored through its
/// kernel expansion `phi(zeta) = sum_u c_u E(-q^2 u zeta)` (one or two variables,
/// the two-variable kernel being the product of one-variable kernels).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZFunction {
    coeffs: LatticeFunction,
}

impl ZFunction {
    pub fn from_coeffs(coeffs: LatticeFunction) -> Self {
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &LatticeFunction {
        &self.coeffs
    }

    pub fn arity(&self) -> usize {
        self.coeffs.arity()
    }

    pub fn eval(&self, zeta: &[f64], ctx: &QContext) -> QResult<Complex64> {
        if zeta.len() != self.arity() {
            return Err(QError::InvalidParameter(
                "evaluation point has the wrong arity".into(),
            ));
        }
        let mut sum = Complex64::default();
        for (key, c) in self.coeffs.values() {
            let mut t = *c;
            for (p, &z) in key.iter().zip(zeta) {
                let u = p.value(ctx);
                t *= tensor_exp(
                    ExpKind::Big,
                    Complex64::new(-ctx.q2() * u, 0.0),
                    Complex64::new(z, 0.0),
                    ctx,
                )?;
            }
            sum += t;
        }
        Ok(sum)
    }

    /// Samples on both sectors of `[-window, window]`.
    pub fn sample(&self, window: i32, ctx: &QContext) -> QResult<LatticeFunction> {
        let mut out = LatticeFunction::zero(self.arity(), window)?;
        for key in LatticeFunction::window_points(self.arity(), window, false) {
            let z: Vec<f64> = key.iter().map(|p| p.value(ctx)).collect();
            let v = self.eval(&z, ctx)?;
            out.set(key, v)?;
        }
        Ok(out)
    }
}

fn normalization(arity: usize, ctx: &QContext) -> f64 {
    (2.0 * theta0(ctx)).powi(arity as i32).recip()
}

/// Inverse transform of a finite lattice function, as a kernel expansion.
///
/// `F^{-1} psi (zeta) = (2 Theta_0)^{-n} int psi(u) E(-q^2 u zeta) d_{q^2}u` per variable.
pub fn inverse_transform(psi: &LatticeFunction, ctx: &QContext) -> QResult<ZFunction> {
    let norm = normalization(psi.arity(), ctx);
    let mut coeffs = LatticeFunction::zero(psi.arity(), psi.window())?;
    for (key, v) in psi.values() {
        let w: f64 = key.iter().map(|p| p.weight(ctx)).product();
        coeffs.set(key.clone(), v * (w * norm))?;
    }
    Ok(ZFunction { coeffs })
}

fn kernel_row(
    u: LatticePoint,
    window: i32,
    ctx: &QContext,
) -> QResult<Vec<(LatticePoint, Complex64)>> {
    let u = u.value(ctx);
    LatticeFunction::window_points(1, window, false)
        .into_iter()
        .map(|key| {
            let xi = key[0];
            lemma_kernel(u, xi.value(ctx), Regularization::Derivative, ctx).map(|k| (xi, k))
        })
        .collect()
}

/// Forward transform `F phi (xi) = int e(xi zeta) phi(zeta) d_{q^2} zeta` of a kernel
/// expansion, evaluated on both sectors of `[-window, window]` by exchanging the
/// finite coefficient sum with the Jackson integral. Off-diagonal kernel sums that
/// do not converge are regularized to zero.
pub fn forward_transform(phi: &ZFunction, window: i32, ctx: &QContext) -> QResult<LatticeFunction> {
    let arity = phi.arity();
    let mut out = LatticeFunction::zero(arity, window)?;
    let mut rows: std::collections::BTreeMap<LatticePoint, Vec<(LatticePoint, Complex64)>> =
        Default::default();
    for key in phi.coeffs.values().keys() {
        for p in key {
            if !rows.contains_key(p) {
                rows.insert(*p, kernel_row(*p, window, ctx)?);
            }
        }
    }
    for (key, c) in phi.coeffs.values() {
        match arity {
            1 => {
                for &(xi, k) in &rows[&key[0]] {
                    let v = out.get(&[xi]) + c * k;
                    out.set(vec![xi], v)?;
                }
            }
            _ => {
                for &(xs, ks) in &rows[&key[0]] {
                    for &(x, k) in &rows[&key[1]] {
                        let v = out.get(&[xs, x]) + c * ks * k;
                        out.set(vec![xs, x], v)?;
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Literal transforms on stored lattice samples.
///
/// `Inverse` samples the kernel expansion of `f` on both sectors of `out_window`.
/// `Forward` is the Jackson sum of `e(xi zeta) f(zeta)` over the stored support of
/// `f`, evaluated on both sectors of `out_window`.
pub fn fourier_1d(
    f: &LatticeFunction,
    direction: Direction,
    out_window: i32,
    ctx: &QContext,
) -> QResult<LatticeFunction> {
    if f.arity() != 1 {
        return Err(QError::InvalidParameter(
            "fourier_1d needs a one-variable function".into(),
        ));
    }
    literal(f, direction, out_window, ctx)
}

/// Two-variable literal transform, separable in the two legs with `1/(4 Theta_0^2)`
/// on the inverse side.
pub fn fourier_2d(
    f: &LatticeFunction,
    direction: Direction,
    out_window: i32,
    ctx: &QContext,
) -> QResult<LatticeFunction> {
    if f.arity() != 2 {
        return Err(QError::InvalidParameter(
            "fourier_2d needs a two-variable function".into(),
        ));
    }
    literal(f, direction, out_window, ctx)
}

fn literal(
    f: &LatticeFunction,
    direction: Direction,
    out_window: i32,
    ctx: &QContext,
) -> QResult<LatticeFunction> {
    match direction {
        Direction::Inverse => inverse_transform(f, ctx)?.sample(out_window, ctx),
        Direction::Forward => {
            let mut out = LatticeFunction::zero(f.arity(), out_window)?;
            for xi in LatticeFunction::window_points(f.arity(), out_window, false) {
                let mut sum = Complex64::default();
                for (zeta, v) in f.values() {
                    let mut t = *v;
                    for (x, z) in xi.iter().zip(zeta) {
                        let e = tensor_exp(
                            ExpKind::Small,
                            Complex64::new(x.value(ctx), 0.0),
                            Complex64::new(z.value(ctx), 0.0),
                            ctx,
                        )?;
                        t *= e * z.weight(ctx);
                    }
                    sum += t;
                }
                out.set(xi, sum)?;
            }
            Ok(out)
        }
    }
}

/// `F(F^{-1} psi)` on the window of `psi`.
pub fn roundtrip_lattice(psi: &LatticeFunction, ctx: &QContext) -> QResult<LatticeFunction> {
    forward_transform(&inverse_transform(psi, ctx)?, psi.window(), ctx)
}

/// `F^{-1}(F phi)` as a kernel expansion.
pub fn roundtrip_z(phi: &ZFunction, ctx: &QContext) -> QResult<ZFunction> {
    inverse_transform(&forward_transform(phi, phi.coeffs.window(), ctx)?, ctx)
}

/// Positive-sector key with the given exponents.
pub fn positive_key(ms: &[i32]) -> LatticeKey {
    ms.iter()
        .map(|&m| LatticePoint {
            sign: Sign::Plus,
            m,
        })
        .collect()
}
