//! Reordering words into `left^m middle^k right^n` form.

use num_complex::Complex64;

use super::element::NormalOrderedElement;
use super::BasisTag;
use crate::context::QContext;
use crate::error::{QError, QResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Letter {
    L(i32),
    M(i32),
    R(i32),
}

impl Letter {
    fn rank(self) -> u8 {
        match self {
            Letter::L(_) => 0,
            Letter::M(_) => 1,
            Letter::R(_) => 2,
        }
    }

    fn exponent(self) -> i32 {
        match self {
            Letter::L(e) | Letter::M(e) | Letter::R(e) => e,
        }
    }

    fn bump(&mut self, by: i32) {
        match self {
            Letter::L(e) | Letter::M(e) | Letter::R(e) => *e += by,
        }
    }
}

/// Scalars of one basis: `right * left = lambda left * right + c middle^p`,
/// `middle * left = mu left * middle`, `right * middle = mu middle * right`.
#[derive(Debug, Clone, Copy)]
struct Relations {
    lambda: f64,
    c: f64,
    p: i32,
    mu: f64,
}

fn relations(tag: BasisTag, ctx: &QContext) -> QResult<Relations> {
    let (q, d) = (ctx.q, ctx.d());
    let one_minus = 1.0 - ctx.q2();
    match tag {
        BasisTag::W => Ok(Relations {
            lambda: q.powf(2.0 * d - 2.0),
            c: q.powf(d - 2.0) * one_minus,
            p: -2,
            mu: q.powf(-d),
        }),
        BasisTag::XT => Ok(Relations {
            lambda: q.powi(-2),
            c: q.powf(d - 2.0) * one_minus,
            p: 0,
            mu: q.powf(-d),
        }),
        BasisTag::V => Ok(Relations {
            lambda: q.powi(-2),
            c: 0.0,
            p: 0,
            mu: 1.0,
        }),
        BasisTag::YT => Err(QError::UnsupportedBasis(BasisTag::YT)),
    }
}

const MAX_REWRITES: usize = 2_000_000;

/// Rewrites a weighted word into normal order and accumulates it into `out`.
fn normalize(
    word: Vec<Letter>,
    coeff: Complex64,
    rel: &Relations,
    out: &mut NormalOrderedElement,
) -> QResult<()> {
    let mut stack = vec![(coeff, word)];
    let mut steps = 0usize;
    while let Some((c, mut w)) = stack.pop() {
        steps += 1;
        if steps > MAX_REWRITES {
            return Err(QError::NonPolynomialReorder(
                "rewrite budget exhausted".into(),
            ));
        }
        let mut merged: Vec<Letter> = Vec::with_capacity(w.len());
        for l in w.drain(..) {
            if l.exponent() == 0 {
                continue;
            }
            match merged.last_mut() {
                Some(last) if last.rank() == l.rank() => {
                    last.bump(l.exponent());
                    if last.exponent() == 0 {
                        merged.pop();
                    }
                }
                _ => merged.push(l),
            }
        }
        let pos = merged.windows(2).position(|p| p[0].rank() > p[1].rank());
        let Some(i) = pos else {
            let (mut m, mut k, mut n) = (0, 0, 0);
            for l in merged {
                match l {
                    Letter::L(e) => m = e,
                    Letter::M(e) => k = e,
                    Letter::R(e) => n = e,
                }
            }
            out.add_term((m, k, n), c);
            continue;
        };
        let (head, tail) = (merged[..i].to_vec(), merged[i + 2..].to_vec());
        let build = |mid: &[Letter]| -> Vec<Letter> {
            let mut v = head.clone();
            v.extend_from_slice(mid);
            v.extend_from_slice(&tail);
            v
        };
        match (merged[i], merged[i + 1]) {
            (Letter::M(k), Letter::L(m)) => {
                stack.push((c * rel.mu.powi(k * m), build(&[Letter::L(m), Letter::M(k)])));
            }
            (Letter::R(n), Letter::M(k)) => {
                stack.push((c * rel.mu.powi(n * k), build(&[Letter::M(k), Letter::R(n)])));
            }
            (Letter::R(n), Letter::L(m)) => {
                if rel.c == 0.0 {
                    stack.push((
                        c * rel.lambda.powi(n * m),
                        build(&[Letter::L(m), Letter::R(n)]),
                    ));
                    continue;
                }
                let (lam, cc, p) = (rel.lambda, rel.c, rel.p);
                match (n > 0, m > 0) {
                    (true, true) => {
                        stack.push((
                            c * lam,
                            build(&[
                                Letter::R(n - 1),
                                Letter::L(1),
                                Letter::R(1),
                                Letter::L(m - 1),
                            ]),
                        ));
                        stack.push((
                            c * cc,
                            build(&[Letter::R(n - 1), Letter::M(p), Letter::L(m - 1)]),
                        ));
                    }
                    (false, true) => {
                        stack.push((
                            c / lam,
                            build(&[
                                Letter::R(n + 1),
                                Letter::L(1),
                                Letter::R(-1),
                                Letter::L(m - 1),
                            ]),
                        ));
                        stack.push((
                            -c * cc / lam,
                            build(&[
                                Letter::R(n + 1),
                                Letter::R(-1),
                                Letter::M(p),
                                Letter::R(-1),
                                Letter::L(m - 1),
                            ]),
                        ));
                    }
                    (true, false) => {
                        stack.push((
                            c / lam,
                            build(&[
                                Letter::R(n - 1),
                                Letter::L(-1),
                                Letter::R(1),
                                Letter::L(m + 1),
                            ]),
                        ));
                        stack.push((
                            -c * cc / lam,
                            build(&[
                                Letter::R(n - 1),
                                Letter::L(-1),
                                Letter::M(p),
                                Letter::L(-1),
                                Letter::L(m + 1),
                            ]),
                        ));
                    }
                    (false, false) => {
                        return Err(QError::NonPolynomialReorder(format!(
                            "right^{n} * left^{m} with both exponents negative"
                        )));
                    }
                }
            }
            _ => unreachable!("only rank inversions are selected"),
        }
    }
    Ok(())
}

/// Product `f * g` rewritten into normal order.
pub fn normal_multiply(
    f: &NormalOrderedElement,
    g: &NormalOrderedElement,
    ctx: &QContext,
) -> QResult<NormalOrderedElement> {
    f.same_tag(g)?;
    let rel = relations(f.tag(), ctx)?;
    let mut out = NormalOrderedElement::zero(f.tag());
    for (&(m1, k1, n1), &c1) in f.terms() {
        for (&(m2, k2, n2), &c2) in g.terms() {
            let word = vec![
                Letter::L(m1),
                Letter::M(k1),
                Letter::R(n1),
                Letter::L(m2),
                Letter::M(k2),
                Letter::R(n2),
            ];
            normalize(word, c1 * c2, &rel, &mut out)?;
        }
    }
    Ok(out)
}

/// Conjugate-linear anti-involution with `middle* = middle` and `right* = left`.
pub fn star(f: &NormalOrderedElement, ctx: &QContext) -> QResult<NormalOrderedElement> {
    let rel = relations(f.tag(), ctx)?;
    let mut out = NormalOrderedElement::zero(f.tag());
    for (&(m, k, n), &c) in f.terms() {
        // (left^m middle^k right^n)* = left^n middle^k right^m
        normalize(
            vec![Letter::L(n), Letter::M(k), Letter::R(m)],
            c.conj(),
            &rel,
            &mut out,
        )?;
    }
    Ok(out)
}

fn require_yt(f: &NormalOrderedElement) -> QResult<()> {
    if f.tag() != BasisTag::YT {
        return Err(QError::UnsupportedBasis(f.tag()));
    }
    Ok(())
}

/// `y* f` in the Fourier-dual basis; the only order-preserving products there.
pub fn yt_left_mul(f: &NormalOrderedElement) -> QResult<NormalOrderedElement> {
    require_yt(f)?;
    Ok(NormalOrderedElement::from_terms(
        BasisTag::YT,
        f.terms().iter().map(|(&(m, k, n), &c)| ((m + 1, k, n), c)),
    ))
}

/// `f y` in the Fourier-dual basis.
pub fn yt_right_mul(f: &NormalOrderedElement) -> QResult<NormalOrderedElement> {
    require_yt(f)?;
    Ok(NormalOrderedElement::from_terms(
        BasisTag::YT,
        f.terms().iter().map(|(&(m, k, n), &c)| ((m, k, n + 1), c)),
    ))
}
