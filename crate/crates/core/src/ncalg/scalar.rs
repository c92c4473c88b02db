//! The Casimir as a q-difference operator on scalar functions of `(a, h, b)`,
//! commuting stand-ins for `(x*, H, x)`.

use num_complex::Complex64;

use crate::context::QContext;

/// `D_a D_b g` at `(a, h, b)` with q^2-derivatives in `a` and `b`.
fn mixed_qderiv<G>(g: &G, a: f64, h: f64, b: f64, q2: f64) -> Complex64
where
    G: Fn(f64, f64, f64) -> Complex64,
{
    let num = g(a, h, b) - g(q2 * a, h, b) - g(a, h, q2 * b) + g(q2 * a, h, q2 * b);
    num / (a * b * (1.0 - q2).powi(2))
}

/// `f . Omega` at one point:
/// `[q f(a/q,h/q,b/q) + q^3 f(qa,qh,qb) - 2q^2 f] / (1-q^2)^2
///   + q^{delta-1} (D_a D_b f)(a/q, q^{delta-1} h, b/q)`.
pub fn casimir_scalar<G>(g: G, (a, h, b): (f64, f64, f64), ctx: &QContext) -> Complex64
where
    G: Fn(f64, f64, f64) -> Complex64,
{
    casimir_scalar_cone(|a, h, b, _| g(a, h, b), (a, h, b, 1.0), ctx)
}

/// Same operator on functions that also depend on the cone variable `alpha`,
/// which moves like `H` with `delta = 0`.
pub fn casimir_scalar_cone<G>(
    g: G,
    (a, h, b, al): (f64, f64, f64, f64),
    ctx: &QContext,
) -> Complex64
where
    G: Fn(f64, f64, f64, f64) -> Complex64,
{
    let (q, q2) = (ctx.q, ctx.q2());
    let den = (1.0 - q2).powi(2);
    let diag = (g(a / q, h / q, b / q, al / q) * q + g(q * a, q * h, q * b, q * al) * (q * q2)
        - g(a, h, b, al) * (2.0 * q2))
        / den;
    let hs = q.powf(ctx.d() - 1.0) * h;
    let shifted = |x: f64, _h: f64, y: f64| g(x, hs, y, al / q);
    diag + mixed_qderiv(&shifted, a / q, hs, b / q, q2) * q.powf(ctx.d() - 1.0)
}

/// Coefficients `(diagonal, shifted)` of the Casimir on `a^m h^k b^n`: the image is
/// `diagonal * a^m h^k b^n + shifted * a^{m-1} h^k b^{n-1}`.
pub fn casimir_scalar_monomial(m: i32, k: i32, n: i32, ctx: &QContext) -> (f64, f64) {
    let (q, d) = (ctx.q, ctx.d());
    let den = (1.0 - q * q).powi(2);
    let s = f64::from(m + k + n);
    let diag = q.powf(1.0 - s) * (1.0 - q.powf(s + 1.0)).powi(2) / den;
    let shift =
        q.powf(1.0 - s + d * (f64::from(k) + 1.0)) * (1.0 - q.powi(2 * m)) * (1.0 - q.powi(2 * n))
            / den;
    (diag, shift)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncalg::{casimir, BasisTag, NormalOrderedElement};

    #[test]
    fn reproduces_monomial_formula() {
        for d in 0..3u8 {
            let ctx = QContext::new(0.6, d).unwrap();
            let pt = (0.7, 1.3, 0.45);
            for m in -2..=2 {
                for k in -2..=2 {
                    for n in -2..=2 {
                        let f = move |a: f64, h: f64, b: f64| {
                            Complex64::new(a.powi(m) * h.powi(k) * b.powi(n), 0.0)
                        };
                        let got = casimir_scalar(f, pt, &ctx);
                        let el =
                            casimir(&NormalOrderedElement::monomial(BasisTag::XT, m, k, n), &ctx)
                                .unwrap();
                        let want = el.eval_scalar(
                            Complex64::new(pt.0, 0.0),
                            Complex64::new(pt.1, 0.0),
                            Complex64::new(pt.2, 0.0),
                        );
                        assert!(
                            (got - want).norm() <= 1e-11 * want.norm().max(1.0),
                            "{m} {k} {n}: {got} vs {want}"
                        );
                        let (dg, sh) = casimir_scalar_monomial(m, k, n, &ctx);
                        let coef = dg * f(pt.0, pt.1, pt.2).re
                            + sh * pt.0.powi(m - 1) * pt.1.powi(k) * pt.2.powi(n - 1);
                        assert!((coef - want.re).abs() <= 1e-11 * want.norm().max(1.0));
                    }
                }
            }
        }
    }

    #[test]
    fn constants_in_a_and_b_see_only_the_diagonal() {
        let ctx = QContext::new(0.5, 1).unwrap();
        let g = |_a: f64, h: f64, _b: f64| Complex64::new(h.powi(3), 0.0);
        let v = casimir_scalar(g, (0.3, 2.0, 5.0), &ctx);
        let q = ctx.q;
        let expect = (q * (2.0f64 / q).powi(3) + q.powi(3) * (2.0 * q).powi(3) - 2.0 * q * q * 8.0)
            / (1.0 - q * q).powi(2);
        assert!((v.re - expect).abs() < 1e-12);
    }

    #[test]
    fn linear_in_the_function() {
        let ctx = QContext::new(0.4, 2).unwrap();
        let f = |a: f64, h: f64, b: f64| Complex64::new(a * h + b, a - h * h);
        let g = |a: f64, h: f64, b: f64| Complex64::new((a * b).sqrt() / h, 0.0);
        let pt = (0.8, 1.1, 0.3);
        let lhs = casimir_scalar(|a, h, b| f(a, h, b) * 2.0 + g(a, h, b), pt, &ctx);
        let rhs = casimir_scalar(f, pt, &ctx) * 2.0 + casimir_scalar(g, pt, &ctx);
        assert!((lhs - rhs).norm() < 1e-12);
    }
}
