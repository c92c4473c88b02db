//! Right actions of `A, A*, B, C, D` on ordered monomials and the Casimir.

use num_complex::Complex64;

use super::element::NormalOrderedElement;
use super::ordering::normal_multiply;
use super::{BasisTag, Generator};
use crate::context::QContext;
use crate::error::{QError, QResult};

#[cfg(test)]
fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `(1 - q^{2j}) / (1 - q^2)` with real `j`.
fn bracket(q: f64, j: f64) -> f64 {
    (1.0 - q.powf(2.0 * j)) / (1.0 - q * q)
}

fn supported(tag: BasisTag) -> QResult<()> {
    if tag == BasisTag::YT {
        return Err(QError::UnsupportedBasis(tag));
    }
    Ok(())
}

/// Exponent `e` with `mono . A = q^e mono`.
fn a_exponent(tag: BasisTag, (m, k, n): (i32, i32, i32)) -> f64 {
    let (m, k, n) = (m as f64, k as f64, n as f64);
    match tag {
        BasisTag::W => -n + k / 2.0,
        _ => (m + k - n) / 2.0,
    }
}

/// Exponent of `A*` before division by `s`.
fn astar_exponent(tag: BasisTag, (m, k, n): (i32, i32, i32), d: f64) -> f64 {
    let (m, k, n) = (m as f64, k as f64, n as f64);
    match tag {
        BasisTag::W => (1.0 - d) * (-2.0 * m + k),
        BasisTag::XT => (1.0 - d) * (-m + k + n),
        _ => -m + k + n,
    }
}

fn act_monomial(
    tag: BasisTag,
    mono: (i32, i32, i32),
    x: Generator,
    ctx: &QContext,
    out: &mut NormalOrderedElement,
    c: Complex64,
) {
    let (q, d) = (ctx.q, ctx.d());
    let (m, k, n) = mono;
    let (mf, kf, nf) = (m as f64, k as f64, n as f64);
    match x {
        Generator::A => out.add_term(mono, c * q.powf(a_exponent(tag, mono))),
        Generator::D => out.add_term(mono, c * q.powf(-a_exponent(tag, mono))),
        Generator::Astar => out.add_term(mono, c * q.powf(astar_exponent(tag, mono, d) / ctx.s)),
        Generator::B => match tag {
            BasisTag::W => out.add_term(
                (m, k, n - 1),
                c * q.powf(-nf + (kf + 1.0) / 2.0) * bracket(q, nf),
            ),
            BasisTag::XT => out.add_term(
                (m, k + 1, n - 1),
                c * q.powf((mf + kf - nf + 1.0) / 2.0 - d * (nf - 1.0)) * bracket(q, nf),
            ),
            _ => out.add_term(
                (m, k + 1, n - 1),
                c * q.powf((mf + kf - nf + 1.0) / 2.0) * bracket(q, nf),
            ),
        },
        Generator::C => match tag {
            BasisTag::W => {
                out.add_term(
                    (m - 1, k - 2, n),
                    c * q.powf(nf - 3.0 * (kf - 1.0) / 2.0 + d * (kf - 1.0)) * bracket(q, mf),
                );
                out.add_term(
                    (m, k, n + 1),
                    -c * q.powf(-nf + (kf + 3.0) / 2.0) * bracket(q, nf - kf),
                );
            }
            BasisTag::XT => {
                let base = -(3.0 * mf + 3.0 * kf + nf - 3.0) / 2.0;
                out.add_term(
                    (m - 1, k - 1, n),
                    c * q.powf(base + d * (kf + nf)) * bracket(q, mf),
                );
                out.add_term(
                    (m, k - 1, n + 1),
                    c * q.powf(base + d * nf) * bracket(q, mf + kf),
                );
            }
            _ => {
                let base = -(3.0 * mf + 3.0 * kf + nf - 3.0) / 2.0;
                out.add_term((m, k - 1, n + 1), c * q.powf(base) * bracket(q, mf + kf));
            }
        },
    }
}

/// Right action `f . X`, extended linearly from the monomial formulas.
pub fn act(
    f: &NormalOrderedElement,
    x: Generator,
    ctx: &QContext,
) -> QResult<NormalOrderedElement> {
    supported(f.tag())?;
    let mut out = NormalOrderedElement::zero(f.tag());
    for (&mono, &c) in f.terms() {
        act_monomial(f.tag(), mono, x, ctx, &mut out, c);
    }
    Ok(out)
}

/// `f . (A*)^p` for real `p`.
pub fn act_astar_power(
    f: &NormalOrderedElement,
    p: f64,
    ctx: &QContext,
) -> QResult<NormalOrderedElement> {
    supported(f.tag())?;
    let (q, d) = (ctx.q, ctx.d());
    Ok(NormalOrderedElement::from_terms(
        f.tag(),
        f.terms().iter().map(|(&mono, &c)| {
            (
                mono,
                c * q.powf(astar_exponent(f.tag(), mono, d) * p / ctx.s),
            )
        }),
    ))
}

/// Casimir action from the closed monomial formulas.
pub fn casimir(f: &NormalOrderedElement, ctx: &QContext) -> QResult<NormalOrderedElement> {
    supported(f.tag())?;
    let (q, d) = (ctx.q, ctx.d());
    let den = (1.0 - q * q).powi(2);
    let mut out = NormalOrderedElement::zero(f.tag());
    for (&(m, k, n), &c) in f.terms() {
        let (mf, kf, nf) = (m as f64, k as f64, n as f64);
        let shift = (1.0 - q.powf(2.0 * mf)) * (1.0 - q.powf(2.0 * nf)) / den;
        match f.tag() {
            BasisTag::W => {
                out.add_term(
                    (m, k, n),
                    c * q.powf(-kf + 1.0) * (1.0 - q.powf(kf + 1.0)).powi(2) / den,
                );
                out.add_term(
                    (m - 1, k - 2, n - 1),
                    c * q.powf((d - 1.0) * (kf - 1.0)) * shift,
                );
            }
            tag => {
                let s = mf + kf + nf;
                let dd = if tag == BasisTag::XT { d } else { 0.0 };
                out.add_term(
                    (m, k, n),
                    c * q.powf(-s + 1.0) * (1.0 - q.powf(s + 1.0)).powi(2) / den,
                );
                out.add_term(
                    (m - 1, k, n - 1),
                    c * q.powf(-s + 1.0 + dd * (kf + 1.0)) * shift,
                );
            }
        }
    }
    Ok(out)
}

/// Casimir action composed from generator actions:
/// `[(q^{-1}+q)(A^2 + A^{-2}) - 4] / (2 (q^{-1}-q)^2) + (BC + CB)/2`.
pub fn casimir_composed(f: &NormalOrderedElement, ctx: &QContext) -> QResult<NormalOrderedElement> {
    Ok(casimir_composed_with_scale(f, ctx)?.0)
}

/// [`casimir_composed`] together with the largest coefficient among the summed
/// pieces, the natural scale for its rounding error.
pub fn casimir_composed_with_scale(
    f: &NormalOrderedElement,
    ctx: &QContext,
) -> QResult<(NormalOrderedElement, f64)> {
    supported(f.tag())?;
    let q = ctx.q;
    let w = 1.0 / q - q;
    let a2 =
        &act(&act(f, Generator::A, ctx)?, Generator::A, ctx)? * ((1.0 / q + q) / (2.0 * w * w));
    let d2 =
        &act(&act(f, Generator::D, ctx)?, Generator::D, ctx)? * ((1.0 / q + q) / (2.0 * w * w));
    let id = f * (4.0 / (2.0 * w * w));
    let bc = &act(&act(f, Generator::B, ctx)?, Generator::C, ctx)? * 0.5;
    let cb = &act(&act(f, Generator::C, ctx)?, Generator::B, ctx)? * 0.5;
    let scale = [&a2, &d2, &id, &bc, &cb]
        .iter()
        .map(|e| e.max_abs())
        .fold(0.0, f64::max);
    Ok((&(&(&a2 + &d2) - &id) + &(&bc + &cb), scale))
}

/// `c_nu = q^{2-nu} (1-q^nu)^2 / (1-q^2)^2`, the eigenvalue of the Casimir on
/// homogeneous elements of total degree `nu - 1`.
pub fn c_nu(nu: f64, ctx: &QContext) -> f64 {
    let q = ctx.q;
    q.powf(2.0 - nu) * ((1.0 - q.powf(nu)) / (1.0 - q * q)).powi(2)
}

/// The constant `q^{2-nu} (1-q^nu) / (1-q^2)` in its unsquared printed form.
pub fn c_nu_printed(nu: f64, ctx: &QContext) -> f64 {
    let q = ctx.q;
    q.powf(2.0 - nu) * (1.0 - q.powf(nu)) / (1.0 - q * q)
}

/// `f . Omega - c_nu f`.
pub fn omega_nu(
    f: &NormalOrderedElement,
    nu: f64,
    ctx: &QContext,
) -> QResult<NormalOrderedElement> {
    Ok(&casimir(f, ctx)? - &(f * c_nu(nu, ctx)))
}

/// Difference between `(f g) . X` and the coproduct-side expression for
/// `X in {A, B, C}` (twist `r = 0`):
/// `Delta(A) = A (x) A`, `Delta(B) = A (x) B + B (x) D (A*)^s`,
/// `Delta(C) = A (x) C + C (x) D (A*)^{-s}`.
/// Returns `(lhs, rhs)`.
pub fn coproduct_residual(
    f: &NormalOrderedElement,
    g: &NormalOrderedElement,
    x: Generator,
    ctx: &QContext,
) -> QResult<(NormalOrderedElement, NormalOrderedElement)> {
    let lhs = act(&normal_multiply(f, g, ctx)?, x, ctx)?;
    let fa = act(f, Generator::A, ctx)?;
    let rhs = match x {
        Generator::A => normal_multiply(&fa, &act(g, Generator::A, ctx)?, ctx)?,
        Generator::B | Generator::C => {
            let twist = if x == Generator::B { ctx.s } else { -ctx.s };
            let first = normal_multiply(&fa, &act(g, x, ctx)?, ctx)?;
            let gd = act_astar_power(&act(g, Generator::D, ctx)?, twist, ctx)?;
            let second = normal_multiply(&act(f, x, ctx)?, &gd, ctx)?;
            &first + &second
        }
        other => {
            return Err(QError::InvalidParameter(format!(
                "no coproduct check for {other:?}"
            )))
        }
    };
    Ok((lhs, rhs))
}
