//! The Poisson kernel at scalar legs, its Fourier image `Q_nu` in series and
//! Bessel-Macdonald form, the difference equation on the Fourier side, the
//! normalization integral, and the two constructions of solutions `F_nu`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::context::QContext;
use crate::error::{QError, QResult};
use crate::ncalg::{c_nu, casimir_scalar_cone};
use crate::qbessel::{check_noninteger, k2};
use crate::qfourier::{
    forward_transform, LatticeFunction, LatticeKey, LatticePoint, Sign, ZFunction,
};
use crate::qkernels::{
    jackson_halfline_detailed, qgamma_ext, qpoch_ratio, tensor_exp, theta0, ExpKind,
};

/// Spectral parameter of the eigenvalue problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoissonParams {
    pub nu: f64,
}

impl PoissonParams {
    pub fn new(nu: f64) -> QResult<Self> {
        if !(nu > 0.0) || !nu.is_finite() {
            return Err(QError::InvalidParameter(format!(
                "nu must be positive, got {nu}"
            )));
        }
        check_noninteger(nu)?;
        Ok(Self { nu })
    }

    /// All `(q^i, q^j, q^k)` with `i, j, k` in `range`.
    pub fn lattice_grid(
        range: std::ops::RangeInclusive<i32>,
        ctx: &QContext,
    ) -> Vec<(f64, f64, f64)> {
        let pts: Vec<f64> = range.map(|m| ctx.q.powi(m)).collect();
        let mut out = Vec::with_capacity(pts.len().pow(3));
        for &a in &pts {
            for &h in &pts {
                for &b in &pts {
                    out.push((a, h, b));
                }
            }
        }
        out
    }
}

/// A residual of a linear equation together with the magnitude of its largest term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residual {
    pub value: Complex64,
    pub scale: f64,
}

impl Residual {
    pub fn relative(&self) -> f64 {
        if self.scale == 0.0 {
            self.value.norm()
        } else {
            self.value.norm() / self.scale
        }
    }
}

fn sum_until_small<F>(mut term: F, what: &str, ctx: &QContext) -> QResult<Complex64>
where
    F: FnMut(usize) -> Complex64,
{
    let mut sum = Complex64::default();
    let mut quiet = 0;
    for k in 0..ctx.max_terms {
        let t = term(k);
        if !(t.re.is_finite() && t.im.is_finite()) {
            return Err(QError::Divergence {
                what: what.to_string(),
                spread: f64::INFINITY,
            });
        }
        sum += t;
        if t.norm() <= ctx.series_tol * sum.norm() {
            quiet += 1;
            if quiet >= 8 {
                return Ok(sum);
            }
        } else {
            quiet = 0;
        }
    }
    Err(QError::Divergence {
        what: format!("{what}: no convergence within max_terms"),
        spread: f64::NAN,
    })
}

/// `sum_k (-1)^k (q^{2nu+2};q^2)_k / (q^2;q^2)_k q^{(2-nu delta-2delta)k} a^k h^{nu+1} b^k`.
///
/// The ratio of consecutive terms tends to `-q^{2-(nu+2)delta} ab`; when its modulus
/// is at least one the series diverges and this is reported.
pub fn pkernel_scalar(p: &PoissonParams, a: f64, h: f64, b: f64, ctx: &QContext) -> QResult<f64> {
    let (nu, q2, d) = (p.nu, ctx.q2(), ctx.d());
    let z = -ctx.qp(2.0 - nu * d - 2.0 * d) * a * b;
    if z.abs() >= 1.0 {
        return Err(QError::Divergence {
            what: format!("Poisson kernel series at (a, b) = ({a}, {b}): ratio {z}"),
            spread: z.abs(),
        });
    }
    let mut t = Complex64::new(1.0, 0.0);
    let s = sum_until_small(
        |k| {
            if k > 0 {
                let j = (k - 1) as f64;
                t *= z * (1.0 - ctx.qp(2.0 * nu + 2.0 + 2.0 * j)) / (1.0 - q2.powi(k as i32));
            }
            t
        },
        "Poisson kernel series",
        ctx,
    )?;
    Ok(s.re * h.powf(nu + 1.0))
}

/// Infinite-product side of the q-binomial resummation at `a = b = rho`, `h = 1`:
/// `(-q^{(2+nu)(2-delta)} rho^2; q^2)_inf / (-q^{2-(2+nu)delta} rho^2; q^2)_inf`.
pub fn qbinom_product(p: &PoissonParams, rho: f64, ctx: &QContext) -> f64 {
    let (nu, d) = (p.nu, ctx.d());
    let r2 = rho * rho;
    qpoch_ratio(
        Complex64::new(-ctx.qp((2.0 + nu) * (2.0 - d)) * r2, 0.0),
        Complex64::new(-ctx.qp(2.0 - (2.0 + nu) * d) * r2, 0.0),
        ctx,
    )
    .re
}

/// `(1+q)(1-q^2) q^{2nu} / (4 Theta_0^2 (1 - q^{2nu}))`.
pub fn qnu_prefactor(p: &PoissonParams, ctx: &QContext) -> f64 {
    let (q, nu) = (ctx.q, p.nu);
    let th = theta0(ctx);
    (1.0 + q) * (1.0 - q * q) * ctx.qp(2.0 * nu) / (4.0 * th * th * (1.0 - ctx.qp(2.0 * nu)))
}

/// The constant `B = (1+q) q^{nu^2+nu+delta(nu^2/2+nu)} / (2 Theta_0^2 Gamma_{q^2}(nu+1))`.
pub fn b_constant(p: &PoissonParams, ctx: &QContext) -> QResult<f64> {
    let (q, nu, d) = (ctx.q, p.nu, ctx.d());
    let th = theta0(ctx);
    Ok((1.0 + q) * ctx.qp(nu * nu + nu + d * (nu * nu / 2.0 + nu))
        / (2.0 * th * th * qgamma_ext(nu + 1.0, ctx)?))
}

/// The two multipliers of `Q_nu = Psi_1 + (ab)^nu Psi_2` at `t = ab`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QnuParts {
    pub regular: Complex64,
    pub singular: Complex64,
}

/// `Psi_1` and `Psi_2` from the two l-series, at a possibly complex product `t`.
pub fn qnu_parts(p: &PoissonParams, t: Complex64, h: f64, ctx: &QContext) -> QResult<QnuParts> {
    let (nu, q2, d) = (p.nu, ctx.q2(), ctx.d());
    let c2 = (1.0 - q2).powi(2);
    let step = ctx.qp(d * (nu + 2.0)) * c2;
    let pref = qnu_prefactor(p, ctx) * h.powf(nu + 1.0);
    let gamma_ratio = qgamma_ext(1.0 - nu, ctx)? / qgamma_ext(1.0 + nu, ctx)?;

    // term_l / term_{l-1} = q^{4l-2-2nu} c2 q^{delta(nu+2)} t / ((1-q^{2l})(1-q^{2l-2nu}))
    let mut a = Complex64::new(1.0, 0.0);
    let s1 = sum_until_small(
        |l| {
            if l > 0 {
                let lf = l as f64;
                a *= t * step * ctx.qp(4.0 * lf - 2.0 - 2.0 * nu)
                    / ((1.0 - q2.powi(l as i32)) * (1.0 - ctx.qp(2.0 * lf - 2.0 * nu)));
            }
            a
        },
        "regular l-series",
        ctx,
    )?;
    let mut b = Complex64::new(1.0, 0.0);
    let s2 = sum_until_small(
        |l| {
            if l > 0 {
                let lf = l as f64;
                b *= t * step * ctx.qp(4.0 * lf - 2.0 + 2.0 * nu)
                    / ((1.0 - q2.powi(l as i32)) * (1.0 - ctx.qp(2.0 * lf + 2.0 * nu)));
            }
            b
        },
        "singular l-series",
        ctx,
    )?;
    Ok(QnuParts {
        regular: s1 * pref,
        singular: -s2 * (pref * gamma_ratio),
    })
}

/// `Q_nu` at a complex product `t = ab`; the fractional power is the principal branch.
pub fn qnu_series_complex(
    p: &PoissonParams,
    t: Complex64,
    h: f64,
    ctx: &QContext,
) -> QResult<Complex64> {
    let parts = qnu_parts(p, t, h, ctx)?;
    let tnu = if t == Complex64::default() {
        Complex64::default()
    } else {
        t.powf(p.nu)
    };
    Ok(parts.regular + tnu * parts.singular)
}

/// `Q_nu(a, h, b)` from the two l-series.
pub fn qnu_series(p: &PoissonParams, a: f64, h: f64, b: f64, ctx: &QContext) -> QResult<f64> {
    if a < 0.0 || b < 0.0 || !(h > 0.0) {
        return Err(QError::Domain(
            "qnu_series needs a, b >= 0 and h > 0".into(),
        ));
    }
    Ok(qnu_series_complex(p, Complex64::new(a * b, 0.0), h, ctx)?.re)
}

/// `Q_nu(a, h, b) = B (ab)^{nu/2} h^{nu+1} K_nu^{(2)}(2 sqrt(ab) q^delta (1-q^2))`.
pub fn qnu_integral(p: &PoissonParams, a: f64, h: f64, b: f64, ctx: &QContext) -> QResult<f64> {
    if a < 0.0 || b < 0.0 || !(h > 0.0) {
        return Err(QError::Domain(
            "qnu_integral needs a, b >= 0 and h > 0".into(),
        ));
    }
    let (nu, q, d) = (p.nu, ctx.q, ctx.d());
    let bc = b_constant(p, ctx)?;
    let t = a * b;
    let radial = if t == 0.0 {
        // limit of t^{nu/2} K_nu^{(2)}: only the leading term of I^{(2)}_{-nu} survives
        let g = qgamma_ext(nu, ctx)? * qgamma_ext(1.0 - nu, ctx)? / 2.0;
        let pw = ctx.qp(nu - nu * nu - d * (nu * nu / 2.0 + nu));
        let lead = qpoch_ratio(
            Complex64::new(ctx.qp(2.0 - 2.0 * nu), 0.0),
            Complex64::new(q * q, 0.0),
            ctx,
        )
        .re;
        g * pw * (1.0 - q * q).powf(-nu) * lead
    } else {
        t.powf(nu / 2.0) * k2(nu, 2.0 * t.sqrt() * ctx.qp(d) * (1.0 - q * q), ctx)?
    };
    Ok(bc * radial * h.powf(nu + 1.0))
}

/// `psi` transported along the cone scaling; see [`product_solution_residual`].
fn difference_terms<G, P>(
    g: &G,
    psi: &P,
    alpha: f64,
    nu: f64,
    (a, h, b): (f64, f64, f64),
    ctx: &QContext,
) -> QResult<[Complex64; 4]>
where
    G: Fn(f64, f64, f64) -> QResult<Complex64>,
    P: Fn(f64, f64) -> Complex64,
{
    let (q, d) = (ctx.q, ctx.d());
    let (up, down) = (q * alpha, alpha / q);
    Ok([
        g(a / q, q * h, b / q)? * psi(up * (a / q), up * (b / q)) / q,
        -g(a, h, b)? * psi(alpha * a, alpha * b) * (ctx.qp(nu) + ctx.qp(-nu)),
        g(q * a, h / q, q * b)? * psi(down * (q * a), down * (q * b)) * q,
        -g(q * a, ctx.qp(d - 1.0) * h, q * b)?
            * psi(down * (q * a), down * (q * b))
            * ((1.0 - q * q).powi(2) * ctx.qp(d + 1.0) * a * b),
    ])
}

fn residual_of(terms: [Complex64; 4]) -> Residual {
    Residual {
        value: terms.iter().sum(),
        scale: terms.iter().map(|t| t.norm()).fold(0.0, f64::max),
    }
}

/// Left minus right side of the Fourier-side difference equation
/// `q^{-1} g(a/q, qh, b/q) - (q^nu + q^{-nu}) g + q g(qa, h/q, qb) = (1-q^2)^2 q^{delta+1} a g(qa, q^{delta-1}h, qb) b`.
pub fn omega_residual<G>(
    g: G,
    p: &PoissonParams,
    point: (f64, f64, f64),
    ctx: &QContext,
) -> QResult<Residual>
where
    G: Fn(f64, f64, f64) -> QResult<Complex64>,
{
    difference_terms(&g, &|_, _| Complex64::new(1.0, 0.0), 1.0, p.nu, point, ctx).map(residual_of)
}

/// Residual of the same equation for `g(a, h, b) psi(alpha a, alpha b)`, where `alpha`
/// moves like `H` at `delta = 0`: `alpha -> q alpha` when `h -> q h`, and
/// `alpha -> alpha / q` in the two terms where `a, b -> q a, q b`.
pub fn product_solution_residual<G, P>(
    g: G,
    psi: P,
    alpha: f64,
    p: &PoissonParams,
    point: (f64, f64, f64),
    ctx: &QContext,
) -> QResult<Residual>
where
    G: Fn(f64, f64, f64) -> QResult<Complex64>,
    P: Fn(f64, f64) -> Complex64,
{
    difference_terms(&g, &psi, alpha, p.nu, point, ctx).map(residual_of)
}

/// Point mass on the lattice as a function of two reals (with a relative snapping
/// tolerance, so that transported arguments hit the lattice point again).
pub fn lattice_point_mass(
    key: [LatticePoint; 2],
    c: Complex64,
    ctx: &QContext,
) -> impl Fn(f64, f64) -> Complex64 {
    let ctx = *ctx;
    move |x, y| match (
        LatticePoint::from_value(x, &ctx),
        LatticePoint::from_value(y, &ctx),
    ) {
        (Some(px), Some(py)) if px == key[0] && py == key[1] => c,
        _ => Complex64::default(),
    }
}

/// `int_0^inf d_q(rho^2) e_{q^2}(-q^{2-(2+nu)delta} rho^2) E_{q^2}(q^{(2+nu)(2-delta)} rho^2)`,
/// a half-line Jackson sum in the variable `s = rho^2`.
///
/// The integrand decays like `s^{-nu-1}`, so the lattice cutoff is raised until the
/// geometric tail `q^{nu M}` falls below double precision.
pub fn norm_integral(p: &PoissonParams, ctx: &QContext) -> QResult<f64> {
    let (nu, d) = (p.nu, ctx.d());
    let ratio = ctx.q.powf(nu.min(1.0));
    let needed = ((1e-17 * (1.0 - ratio)).ln() / ratio.ln()).ceil() as i32;
    let ctx = &ctx.with_cutoff(ctx.lattice_cutoff.max(needed))?;
    let big = ctx.qp((2.0 + nu) * (2.0 - d));
    let small = ctx.qp(2.0 - (2.0 + nu) * d);
    let sum = jackson_halfline_detailed(
        |s| {
            qpoch_ratio(
                Complex64::new(-big * s, 0.0),
                Complex64::new(-small * s, 0.0),
                ctx,
            )
        },
        ctx,
    );
    Ok(sum.into_result("normalization integral")?.re)
}

/// The closed value `-(1-q^2) / (1-q^{-2nu})`.
pub fn norm_integral_expected(p: &PoissonParams, ctx: &QContext) -> f64 {
    -(1.0 - ctx.q2()) / (1.0 - ctx.qp(-2.0 * p.nu))
}

/// `B` recovered from a value of the normalization integral through
/// `(1+q)/(4 Theta_0^2) I = B q^{-nu^2+nu-delta(nu^2/2+nu)} Gamma_{q^2}(nu) / 2`.
pub fn b_from_norm(p: &PoissonParams, integral: f64, ctx: &QContext) -> QResult<f64> {
    let (q, nu, d) = (ctx.q, p.nu, ctx.d());
    let th = theta0(ctx);
    Ok(
        (1.0 + q) * integral * ctx.qp(nu * nu - nu + d * (nu * nu / 2.0 + nu))
            / (2.0 * th * th * qgamma_ext(nu, ctx)?),
    )
}

/// A solution `F_nu(a, h, b, alpha) = sigma F[Q_nu psi](a, h, b)`, stored through its
/// finite boundary datum `psi`.
///
/// With `y = v / alpha` for the lattice points `v` of `psi`:
/// `F_nu = sum w(y*) w(y) e(-a y*) Q_nu(y*, h, y) psi(v*, v) e(-y b)`,
/// `w(y) = (1-q^2)|y|`. Products `y* y < 0` use the principal branch.
#[derive(Debug, Clone, PartialEq)]
pub struct PoissonSolution {
    params: PoissonParams,
    boundary: LatticeFunction,
}

impl PoissonSolution {
    pub fn boundary(&self) -> &LatticeFunction {
        &self.boundary
    }

    pub fn eval(
        &self,
        (a, h, b, alpha): (f64, f64, f64, f64),
        ctx: &QContext,
    ) -> QResult<Complex64> {
        if !(alpha > 0.0) {
            return Err(QError::Domain("the cone variable must be positive".into()));
        }
        let c = 1.0 - ctx.q2();
        let mut sum = Complex64::default();
        for (key, v) in self.boundary.values() {
            let ys = key[0].value(ctx) / alpha;
            let y = key[1].value(ctx) / alpha;
            let q = qnu_series_complex(&self.params, Complex64::new(ys * y, 0.0), h, ctx)?;
            let left = tensor_exp(
                ExpKind::Small,
                Complex64::new(-a, 0.0),
                Complex64::new(ys, 0.0),
                ctx,
            )?;
            let right = tensor_exp(
                ExpKind::Small,
                Complex64::new(y, 0.0),
                Complex64::new(-b, 0.0),
                ctx,
            )?;
            sum += v * left * q * right * (c * ys.abs() * c * y.abs());
        }
        Ok(sum)
    }

    pub fn sample(
        &self,
        points: &[(f64, f64, f64, f64)],
        ctx: &QContext,
    ) -> QResult<Vec<Complex64>> {
        points.iter().map(|&pt| self.eval(pt, ctx)).collect()
    }
}

/// Lower path of the diagram: multiply by `Q_nu`, then apply `sigma F`.
pub fn poisson_solve(
    p: &PoissonParams,
    psi: &LatticeFunction,
    _ctx: &QContext,
) -> QResult<PoissonSolution> {
    if psi.arity() != 2 {
        return Err(QError::InvalidParameter(
            "boundary datum must have two variables".into(),
        ));
    }
    Ok(PoissonSolution {
        params: *p,
        boundary: psi.clone(),
    })
}

/// Upper path of the diagram: the convolution `P_nu * phi` for `phi` in the image of
/// the inverse transform, evaluated through `sigma F(Q_nu F phi)` with `F phi`
/// computed on the lattice window `window` from the orthogonality kernels.
pub fn convolve(
    p: &PoissonParams,
    phi: &ZFunction,
    window: i32,
    ctx: &QContext,
) -> QResult<PoissonSolution> {
    if phi.arity() != 2 {
        return Err(QError::InvalidParameter(
            "convolution needs a two-variable function".into(),
        ));
    }
    let boundary = forward_transform(phi, window, ctx)?;
    Ok(PoissonSolution {
        params: *p,
        boundary,
    })
}

/// The convolution as a literal double Jackson sum of
/// `P_nu(a - zeta*, h, b - zeta) phi(zeta*, zeta)` over the lattice window of the
/// context. A point where the kernel series or the sum diverges is reported.
pub fn convolve_direct(
    p: &PoissonParams,
    phi: &ZFunction,
    (a, h, b): (f64, f64, f64),
    ctx: &QContext,
) -> QResult<Complex64> {
    let pts = LatticeFunction::window_points(1, ctx.lattice_cutoff, false);
    let mut sum = Complex64::default();
    let mut abs = 0.0;
    for zs in &pts {
        for z in &pts {
            let (zs, z) = (zs[0], z[0]);
            let (xs, x) = (zs.value(ctx), z.value(ctx));
            let kernel = pkernel_scalar(p, a - xs, h, b - x, ctx)?;
            let t = phi.eval(&[xs, x], ctx)? * kernel * (zs.weight(ctx) * z.weight(ctx));
            if !(t.re.is_finite() && t.im.is_finite()) {
                return Err(QError::Divergence {
                    what: format!("convolution term at (zeta*, zeta) = ({xs}, {x})"),
                    spread: f64::INFINITY,
                });
            }
            sum += t;
            abs += t.norm();
        }
    }
    if !abs.is_finite() {
        return Err(QError::Divergence {
            what: "convolution sum".into(),
            spread: abs,
        });
    }
    Ok(sum)
}

/// `(F . Omega - c_nu F)` at `(a, h, b, alpha)`, relative to the larger of the two sides.
pub fn solution_residual(
    sol: &PoissonSolution,
    point: (f64, f64, f64, f64),
    ctx: &QContext,
) -> QResult<Residual> {
    let failed = std::cell::RefCell::new(None);
    let f = |a: f64, h: f64, b: f64, al: f64| match sol.eval((a, h, b, al), ctx) {
        Ok(v) => v,
        Err(e) => {
            failed.borrow_mut().get_or_insert(e);
            Complex64::new(f64::NAN, f64::NAN)
        }
    };
    let omega = casimir_scalar_cone(f, point, ctx);
    if let Some(e) = failed.into_inner() {
        return Err(e);
    }
    let rhs = sol.eval(point, ctx)? * c_nu(sol.params.nu, ctx);
    Ok(Residual {
        value: omega - rhs,
        scale: omega.norm().max(rhs.norm()),
    })
}

/// Regular and singular parts of `Q_nu psi` on the lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularitySplit {
    pub nu: f64,
    /// `Psi_1 psi`.
    pub regular: LatticeFunction,
    /// `Psi_2 psi`; the full singular part is `(ab)^nu Psi_2 psi`.
    pub singular: LatticeFunction,
    /// Points where `ab < 0` and the principal branch was used.
    pub principal_branch: Vec<LatticeKey>,
}

impl SingularitySplit {
    /// `Psi_1 psi + (ab)^nu Psi_2 psi`.
    pub fn reassemble(&self, ctx: &QContext) -> QResult<LatticeFunction> {
        let mut out = self.regular.clone();
        for (key, v) in self.singular.values() {
            let t = Complex64::new(key[0].value(ctx) * key[1].value(ctx), 0.0);
            let s = out.get(key) + t.powf(self.nu) * v;
            out.set(key.clone(), s)?;
        }
        Ok(out)
    }
}

/// Splits `Q_nu psi` at fixed `h` into `Psi_1 psi` and `Psi_2 psi`.
pub fn singularity_split(
    p: &PoissonParams,
    psi: &LatticeFunction,
    h: f64,
    ctx: &QContext,
) -> QResult<SingularitySplit> {
    if psi.arity() != 2 {
        return Err(QError::InvalidParameter(
            "boundary datum must have two variables".into(),
        ));
    }
    let mut regular = LatticeFunction::zero(2, psi.window())?;
    let mut singular = LatticeFunction::zero(2, psi.window())?;
    let mut principal_branch = Vec::new();
    for (key, v) in psi.values() {
        if key[0].sign != key[1].sign {
            principal_branch.push(key.clone());
        }
        let t = key[0].value(ctx) * key[1].value(ctx);
        let parts = qnu_parts(p, Complex64::new(t, 0.0), h, ctx)?;
        regular.set(key.clone(), parts.regular * v)?;
        singular.set(key.clone(), parts.singular * v)?;
    }
    Ok(SingularitySplit {
        nu: p.nu,
        regular,
        singular,
        principal_branch,
    })
}

/// `Q_nu psi` on the lattice at fixed `h`.
pub fn qnu_times(
    p: &PoissonParams,
    psi: &LatticeFunction,
    h: f64,
    ctx: &QContext,
) -> QResult<LatticeFunction> {
    let mut out = LatticeFunction::zero(psi.arity(), psi.window())?;
    for (key, v) in psi.values() {
        let t = key.iter().map(|k| k.value(ctx)).product::<f64>();
        out.set(
            key.clone(),
            qnu_series_complex(p, Complex64::new(t, 0.0), h, ctx)? * v,
        )?;
    }
    Ok(out)
}

/// Positive-sector two-variable key.
pub fn pos_key(m1: i32, m2: i32) -> [LatticePoint; 2] {
    [
        LatticePoint {
            sign: Sign::Plus,
            m: m1,
        },
        LatticePoint {
            sign: Sign::Plus,
            m: m2,
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qfourier::inverse_transform;

    fn params(nu: f64) -> PoissonParams {
        PoissonParams::new(nu).unwrap()
    }

    #[test]
    fn params_reject_integers_and_nonpositive() {
        assert!(matches!(
            PoissonParams::new(2.0),
            Err(QError::IntegerOrder(_))
        ));
        assert!(PoissonParams::new(-0.5).is_err());
    }

    #[test]
    fn pkernel_at_zero_and_resummation() {
        let p = params(0.5);
        for d in 0..=2 {
            let ctx = QContext::new(0.5, d).unwrap();
            assert!(
                (pkernel_scalar(&p, 0.0, 2.0, 3.0, &ctx).unwrap() - 2f64.powf(1.5)).abs() < 1e-14
            );
            for m in 2..=8 {
                let rho = ctx.q.powi(m);
                let s = pkernel_scalar(&p, rho, 1.0, rho, &ctx).unwrap();
                let r = qbinom_product(&p, rho, &ctx);
                assert!((s - r).abs() < 1e-12 * r.abs(), "d={d} m={m}");
            }
        }
        let ctx = QContext::new(0.5, 2).unwrap();
        assert!(matches!(
            pkernel_scalar(&p, 1.0, 1.0, 1.0, &ctx),
            Err(QError::Divergence { .. })
        ));
    }

    #[test]
    fn pkernel_classical_binomial() {
        let ctx = QContext::new(0.999, 0).unwrap();
        let p = params(0.5);
        let v = pkernel_scalar(&p, 0.3, 1.0, 0.3, &ctx).unwrap();
        assert!((v - (1.0f64 + 0.09).powf(-1.5)).abs() < 1e-2);
    }

    #[test]
    fn qnu_leading_term_and_cross_check() {
        for q in [0.3, 0.5] {
            for d in 0..=2 {
                let ctx = QContext::new(q, d).unwrap();
                for nu in [0.3, 1.7] {
                    let p = params(nu);
                    let lead = qnu_series(&p, 0.0, 2.0, 0.0, &ctx).unwrap();
                    assert!(
                        (lead - qnu_prefactor(&p, &ctx) * 2f64.powf(nu + 1.0)).abs()
                            < 1e-14 * lead.abs()
                    );
                    for (a, h, b) in PoissonParams::lattice_grid(0..=2, &ctx) {
                        let s = qnu_series(&p, a, h, b, &ctx).unwrap();
                        let i = qnu_integral(&p, a, h, b, &ctx).unwrap();
                        assert!(
                            (s - i).abs() <= 1e-8 * s.abs(),
                            "q={q} d={d} nu={nu} {a} {h} {b}: {s} vs {i}"
                        );
                    }
                    let i0 = qnu_integral(&p, 0.0, 2.0, 0.0, &ctx).unwrap();
                    assert!((i0 - lead).abs() < 1e-10 * lead.abs());
                }
            }
        }
    }

    #[test]
    fn qnu_solves_the_difference_equation() {
        for d in 0..=2 {
            let ctx = QContext::new(0.5, d).unwrap();
            let p = params(0.5);
            for pt in PoissonParams::lattice_grid(0..=3, &ctx) {
                let r = omega_residual(
                    |a, h, b| qnu_series(&p, a, h, b, &ctx).map(Complex64::from),
                    &p,
                    pt,
                    &ctx,
                )
                .unwrap();
                assert!(r.relative() < 1e-12, "{pt:?}: {}", r.relative());
            }
            let poly = omega_residual(
                |a, h, b| Ok(Complex64::new(a * h + b * b, 0.0)),
                &p,
                (0.5, 1.0, 0.25),
                &ctx,
            )
            .unwrap();
            assert!(poly.relative() > 1e-3);
        }
    }

    #[test]
    fn product_with_point_mass_solves() {
        let ctx = QContext::new(0.5, 1).unwrap();
        let p = params(0.3);
        let psi = lattice_point_mass(pos_key(1, 2), Complex64::new(1.0, 0.0), &ctx);
        let alpha = 1.0;
        let (a, b) = (ctx.q2(), ctx.q2().powi(2));
        let r = product_solution_residual(
            |a, h, b| qnu_series(&p, a, h, b, &ctx).map(Complex64::from),
            &psi,
            alpha,
            &p,
            (a, 0.7, b),
            &ctx,
        )
        .unwrap();
        assert!(r.scale > 0.0 && r.relative() < 1e-12);
        let one = product_solution_residual(
            |a, h, b| qnu_series(&p, a, h, b, &ctx).map(Complex64::from),
            |_, _| Complex64::new(1.0, 0.0),
            2.0,
            &p,
            (a, 0.7, b),
            &ctx,
        )
        .unwrap();
        let plain = omega_residual(
            |a, h, b| qnu_series(&p, a, h, b, &ctx).map(Complex64::from),
            &p,
            (a, 0.7, b),
            &ctx,
        )
        .unwrap();
        assert_eq!(one, plain);
    }

    #[test]
    fn norm_integral_recovers_b_from_closed_value() {
        for d in 0..=2 {
            let ctx = QContext::new(0.5, d).unwrap();
            let p = params(0.5);
            let b = b_from_norm(&p, norm_integral_expected(&p, &ctx), &ctx).unwrap();
            assert!((b - b_constant(&p, &ctx).unwrap()).abs() < 1e-12 * b);
            assert!(norm_integral_expected(&p, &ctx) > 0.0);
            assert!(norm_integral(&p, &ctx).unwrap().is_finite());
        }
    }

    #[test]
    fn split_reassembles() {
        let ctx = QContext::default();
        let p = params(0.5);
        let mut psi = LatticeFunction::zero(2, 20).unwrap();
        for m in 10..=20 {
            psi.set(
                vec![LatticePoint::pos(m), LatticePoint::pos(m)],
                Complex64::new(1.0, 0.0),
            )
            .unwrap();
        }
        psi.set(
            vec![LatticePoint::neg(0), LatticePoint::pos(1)],
            Complex64::new(0.5, 0.0),
        )
        .unwrap();
        let split = singularity_split(&p, &psi, 1.0, &ctx).unwrap();
        let whole = qnu_times(&p, &psi, 1.0, &ctx).unwrap();
        assert!(split.reassemble(&ctx).unwrap().max_rel_diff(&whole) < 1e-15);
        assert_eq!(split.principal_branch.len(), 1);
        let tail = (10..=20)
            .map(|m| {
                split
                    .singular
                    .get(&[LatticePoint::pos(m), LatticePoint::pos(m)])
                    .norm()
            })
            .fold(0.0, f64::max);
        assert!(tail < 10.0);
        let zero = singularity_split(&p, &LatticeFunction::zero(2, 3).unwrap(), 1.0, &ctx).unwrap();
        assert!(zero.regular.is_zero() && zero.singular.is_zero());
    }

    #[test]
    fn diagram_paths_agree() {
        let ctx = QContext::default();
        let p = params(0.5);
        let mut psi = LatticeFunction::zero(2, 3).unwrap();
        psi.set(
            vec![LatticePoint::pos(1), LatticePoint::pos(2)],
            Complex64::new(1.0, 0.0),
        )
        .unwrap();
        psi.set(
            vec![LatticePoint::pos(0), LatticePoint::pos(1)],
            Complex64::new(0.0, -0.5),
        )
        .unwrap();
        let lower = poisson_solve(&p, &psi, &ctx).unwrap();
        let upper = convolve(&p, &inverse_transform(&psi, &ctx).unwrap(), 3, &ctx).unwrap();
        for &a in &[0.25, 1.0, 3.0] {
            for &b in &[0.5, 2.0] {
                let x = lower.eval((a, 1.1, b, 1.0), &ctx).unwrap();
                let y = upper.eval((a, 1.1, b, 1.0), &ctx).unwrap();
                assert!((x - y).norm() <= 1e-7 * x.norm(), "{a} {b}: {x} vs {y}");
            }
        }
        assert!(
            poisson_solve(&p, &LatticeFunction::zero(2, 3).unwrap(), &ctx)
                .unwrap()
                .eval((1.0, 1.0, 1.0, 1.0), &ctx)
                .unwrap()
                == Complex64::default()
        );
    }

    #[test]
    fn solutions_are_casimir_eigenfunctions() {
        for d in 0..=2 {
            let ctx = QContext::new(0.5, d).unwrap();
            let p = params(0.5);
            let mut psi = LatticeFunction::zero(2, 3).unwrap();
            psi.set(
                vec![LatticePoint::pos(1), LatticePoint::pos(2)],
                Complex64::new(1.0, 0.0),
            )
            .unwrap();
            let sol = poisson_solve(&p, &psi, &ctx).unwrap();
            for pt in [(0.5, 1.0, 0.25, 1.0), (0.3, 1.3, 0.7, 0.8)] {
                assert!(solution_residual(&sol, pt, &ctx).unwrap().relative() < 1e-10);
            }
        }
    }

    #[test]
    fn direct_convolution_reports_divergence() {
        let ctx = QContext::default().with_cutoff(8).unwrap();
        let p = params(0.5);
        let mut psi = LatticeFunction::zero(2, 3).unwrap();
        psi.set(
            vec![LatticePoint::pos(1), LatticePoint::pos(1)],
            Complex64::new(1.0, 0.0),
        )
        .unwrap();
        let phi = inverse_transform(&psi, &ctx).unwrap();
        assert!(matches!(
            convolve_direct(&p, &phi, (0.5, 1.0, 0.5), &ctx),
            Err(QError::Divergence { .. })
        ));
    }
}
