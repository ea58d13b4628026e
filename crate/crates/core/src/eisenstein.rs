//! Fourier coefficients of the incoherent Eisenstein series: the
//! archimedean Whittaker factor and the non-archimedean part `B(m, 0, s)`.

use rug::ops::Pow;
use std::collections::BTreeMap;

use rug::{Integer, Rational};

use crate::arith::ntheory::{factor, kronecker};
use crate::arith::{Context, Jet, Real};
use crate::densities::euler_factor;
use crate::error::{Error, Result};
use crate::quad;
use crate::spaces::SpaceSpec;
use crate::volume::{a_k, a_k_exact0};

const U_REL_TOL: f64 = 1e-13;

fn gamma_f64(x: f64) -> f64 {
    rug::Float::with_val(64, x).gamma().to_f64()
}

/// Confluent hypergeometric `U(a, b, z)` from
/// `U = Gamma(a)^-1 int_0^inf e^(-zt) t^(a-1) (1+t)^(b-a-1) dt`.
///
/// For `a <= 1` the integrand is rewritten as `z^-a` plus the integral
/// against `(1+t)^(b-a-1) - 1`, which converges for `a > -1` and makes the
/// `a -> 0` limit (`U = 1`) exact.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn hyper_u(a: f64, b: f64, z: f64) -> Result<f64> {
    // also rejects NaN
    if !(z > 0.0) {
        return Err(Error::InvalidInput("U needs z > 0".into()));
    }
    if a <= -1.0 {
        return Err(Error::InvalidInput("U quadrature needs a > -1".into()));
    }
    let c = b - a - 1.0;
    let growth = c.max(0.0) + a - 1.0;
    let bound_c = 2f64.powf(c.abs());
    if a > 1.0 {
        let f = |t: f64| (-z * t).exp() * t.powf(a - 1.0) * (1.0 + t).powf(c);
        let i = quad::integrate_exp_tail(f, z, growth, bound_c, U_REL_TOL)?;
        return Ok(i / gamma_f64(a));
    }
    let lead = z.powf(-a);
    if a == 0.0 {
        return Ok(lead);
    }
    // (1+t)^c - 1 via ln_1p/exp_m1 keeps accuracy near t = 0
    let f = |t: f64| {
        if t == 0.0 {
            return 0.0;
        }
        (-z * t).exp() * t.powf(a - 1.0) * (c * t.ln_1p()).exp_m1()
    };
    let i = quad::integrate_exp_tail(f, z, growth.max(0.0), bound_c + 1.0, U_REL_TOL)?;
    Ok(lead + i / gamma_f64(a))
}

/// `W_{kappa, mu}(z) = e^(-z/2) z^(1/2 + mu) U(1/2 + mu - kappa, 1 + 2 mu, z)`.
pub fn whittaker_kappa_mu(kappa: f64, mu: f64, z: f64) -> Result<f64> {
    let u = hyper_u(0.5 + mu - kappa, 1.0 + 2.0 * mu, z)?;
    Ok((-z / 2.0 + (0.5 + mu) * z.ln()).exp() * u)
}

/// `W_m(s, v) = (4 pi |m| v)^(-n/2) e^(2 pi m v) W_{sgn(m) n/2, s}(4 pi |m| v)`.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn whittaker_w(m: i64, n: u32, s: f64, v: f64) -> Result<f64> {
    if m == 0 || !(v > 0.0) {
        return Err(Error::InvalidInput("Whittaker factor needs m != 0, v > 0".into()));
    }
    let z = 4.0 * std::f64::consts::PI * m.unsigned_abs() as f64 * v;
    let kappa = m.signum() as f64 * n as f64 / 2.0;
    let u = hyper_u(0.5 + s - kappa, 1.0 + 2.0 * s, z)?;
    // combine the exponentials before exponentiating to avoid overflow
    let ex = 2.0 * std::f64::consts::PI * m as f64 * v - z / 2.0 + (0.5 + s - n as f64 / 2.0) * z.ln();
    Ok(ex.exp() * u)
}

/// `W_m(s_0, v)`: `1` for `m > 0`, `Gamma(1 - n, 4 pi |m| v)` for `m < 0`.
pub fn whittaker_s0(ctx: &Context, m: i64, n: u32, v: f64) -> Real {
    if m > 0 {
        ctx.real(1)
    } else {
        let x = ctx.f64(4.0 * std::f64::consts::PI * (-m) as f64 * v);
        incomplete_gamma_upper(ctx, 1 - n as i64, &x)
    }
}

/// `W_m'(s_0, v) = sum_{j=1}^{n-1} C(n-1, j) Gamma(j) / (4 pi m v)^j`.
pub fn whittaker_deriv_s0(ctx: &Context, m: u64, n: u32, v: &Real) -> Real {
    assert!(m >= 1 && n >= 1);
    let z = ctx.pi() * 4 * m as i64 * v;
    let mut acc = ctx.real(0);
    let mut fact = Integer::from(1);
    for j in 1..n {
        if j > 1 {
            fact *= j - 1;
        }
        let c = Integer::from(Integer::binomial_u(n - 1, j)) * &fact;
        acc = acc + Real::from_integer(ctx.bits(), &c) / z.powi(j as i32);
    }
    acc
}

/// `W_m'(s_0, v)` as `int_0^inf e^(-zt) ((1+t)^(n-1) - 1) dt / t` by quadrature.
pub fn whittaker_deriv_s0_quad(m: u64, n: u32, v: f64) -> Result<f64> {
    let z = 4.0 * std::f64::consts::PI * m as f64 * v;
    let c = n as f64 - 1.0;
    let f = |t: f64| {
        if t == 0.0 {
            c
        } else {
            (-z * t).exp() * (c * t.ln_1p()).exp_m1() / t
        }
    };
    quad::integrate_exp_tail(f, z, (c - 1.0).max(0.0), 2f64.powf(c), U_REL_TOL)
}

/// Centered five-point derivative of `W_m(s, v)` in `s`.
pub fn whittaker_deriv_numeric(m: i64, n: u32, s: f64, v: f64, h: f64) -> Result<f64> {
    let w = |k: f64| whittaker_w(m, n, s + k * h, v);
    Ok((w(-2.0)? - 8.0 * w(-1.0)? + 8.0 * w(1.0)? - w(2.0)?) / (12.0 * h))
}

fn e1(ctx: &Context, x: &Real) -> Real {
    let bits = ctx.bits() + 64;
    let x = x.with_prec(bits);
    let tol = Real::from_i64(bits, 2).powi(-(bits as i32));
    if x < 2 {
        // E1(x) = -gamma - ln x - sum_{k>=1} (-x)^k / (k k!)
        let mut acc = -Real::euler_gamma(bits) - x.ln();
        let mut term = Real::one(bits);
        let mut k = 1i64;
        loop {
            term = -(&term * &x) / k;
            let t = &term / k;
            acc = acc - &t;
            if t.abs() < tol {
                break;
            }
            k += 1;
        }
        acc.with_prec(ctx.bits())
    } else {
        // Lentz evaluation of e^-x / (x + 1 - 1^2/(x + 3 - 2^2/(x + 5 - ...)))
        let tiny = Real::from_i64(bits, 2).powi(-(2 * bits as i32));
        let mut b = &x + 1;
        let mut c = tiny.recip();
        let mut d = b.recip();
        let mut h = d.clone();
        let mut i = 1i64;
        loop {
            let an = Real::from_i64(bits, -i * i);
            b = b + 2;
            d = (&an * &d + &b).recip();
            c = &b + &an / &c;
            let del = &c * &d;
            h = &h * &del;
            if (del - 1).abs() < tol {
                break;
            }
            i += 1;
        }
        (h * (-x).exp()).with_prec(ctx.bits())
    }
}

/// `Gamma(a, x)` for integer `a <= 1`: `Gamma(1, x) = e^-x`, `Gamma(0, x) = E1(x)`,
/// then `Gamma(a, x) = (Gamma(a+1, x) - x^a e^-x)/a` downwards.
pub fn incomplete_gamma_upper(ctx: &Context, a: i64, x: &Real) -> Real {
    assert!(a <= 1, "only a <= 1 is supported");
    let bits = ctx.bits() + 64;
    let xw = x.with_prec(bits);
    if a == 1 {
        return (-x).exp();
    }
    let ex = (-&xw).exp();
    let mut g = e1(&ctx.widened(20), &xw).with_prec(bits);
    let mut k = 0i64;
    while k > a {
        k -= 1;
        g = (g - xw.powi(k as i32) * &ex) / k;
    }
    g.with_prec(ctx.bits())
}

/// `B(m, 0, s)` at `s_0 = (n-1)/2`: the exact rational value and the jet.
#[derive(Clone, Debug, PartialEq)]
pub struct CoeffValue {
    pub m: u64,
    pub value: Rational,
    pub jet: Jet,
}

/// A coefficient request anchored at `s_0 = (n-1)/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoeffRequest {
    pub spec: SpaceSpec,
    pub m: u64,
}

impl CoeffRequest {
    pub fn s0(&self) -> Rational {
        Rational::from((self.spec.n as i64 - 1, 2))
    }
}

fn check_dimension(spec: &SpaceSpec) -> Result<()> {
    if spec.n < 2 {
        return Err(Error::DimensionOutOfScope(
            "n = 1 coefficients vanish at s0 and their derivative is not implemented".into(),
        ));
    }
    Ok(())
}

/// Character twisting the unramified `gamma`-sums: trivial for even `n`,
/// `eps(p)` for odd `n`.
fn twist(spec: &SpaceSpec, p: u64) -> i32 {
    if spec.n.is_multiple_of(2) {
        1
    } else {
        spec.field.eps(p as i64)
    }
}

/// Exact `B(m, 0, s_0)`.
pub fn coeff_b_exact(spec: &SpaceSpec, m: u64) -> Result<Rational> {
    check_dimension(spec)?;
    if m == 0 {
        return Err(Error::InvalidInput("coefficient index must be positive".into()));
    }
    let n = spec.n;
    let d = spec.d();
    let mut acc = Rational::from(Integer::from(m).pow(n - 1));
    acc /= a_k_exact0(&spec.field, n);
    for (p, e) in factor(m) {
        if d.is_multiple_of(p) {
            continue;
        }
        let chi = twist(spec, p);
        let x = Rational::from((1, Integer::from(p).pow(n - 1))) * chi;
        let mut sum = Rational::from(1);
        let mut xp = Rational::from(1);
        for _ in 0..e {
            xp *= &x;
            sum += &xp;
        }
        acc *= sum;
    }
    for &l in &spec.field.primes {
        let poly = euler_factor(spec, l, m as i64)?;
        let x = Rational::from((1, Integer::from(l).pow(2 * n - 1)));
        acc *= poly.eval_rational(&x);
        if n.is_multiple_of(2) {
            acc /= Rational::from(1) - Rational::from((1, Integer::from(l).pow(n)));
        }
    }
    Ok(-acc)
}

/// `B(m, 0, s)` as a jet in `s`.
pub fn coeff_b_jet(ctx: &Context, spec: &SpaceSpec, m: u64, s: &Jet) -> Result<Jet> {
    check_dimension(spec)?;
    let n = spec.n as i64;
    let d = spec.d();
    let bits = ctx.bits();
    let s0 = ctx.rat(&Rational::from((n - 1, 2)));
    let shifted = s.add_const(&-&s0);
    let mut acc = Jet::int_pow(m, &s.add_const(&ctx.rat(&Rational::from((n - 1, 2)))));
    acc = &acc / &a_k(ctx, &spec.field, spec.n, &shifted)?;
    let minus_2s = s.scale_i(-2);
    for (p, e) in factor(m) {
        if d.is_multiple_of(p) {
            continue;
        }
        let chi = twist(spec, p) as i64;
        let x = Jet::int_pow(p, &minus_2s).scale_i(chi);
        let mut sum = Jet::constant(Real::one(bits));
        let mut xp = sum.clone();
        for _ in 0..e {
            xp = &xp * &x;
            sum = &sum + &xp;
        }
        acc = &acc * &sum;
    }
    for &l in &spec.field.primes {
        let poly = euler_factor(spec, l, m as i64)?;
        let x = Jet::int_pow(l, &minus_2s.add_i(-n));
        acc = &acc * &poly.eval_jet(&x);
        if n % 2 == 0 {
            let den = Jet::int_pow(l, &minus_2s.add_i(-1)).scale_i(-1).add_i(1);
            acc = &acc / &den;
        }
    }
    Ok(-acc)
}

/// `B(m, 0, s)` at `s_0`, with the jet checked against the exact value.
pub fn coeff_b(ctx: &Context, req: &CoeffRequest) -> Result<CoeffValue> {
    let value = coeff_b_exact(&req.spec, req.m)?;
    let s = Jet::variable(ctx.rat(&req.s0()));
    let jet = coeff_b_jet(ctx, &req.spec, req.m, &s)?;
    let exact = ctx.rat(&value);
    if (&jet.val - &exact).abs() > ctx.tol(5) * exact.abs().max(ctx.real(1)) {
        return Err(Error::PrecisionLoss(format!(
            "B({}, 0, s0) jet disagrees with the exact value",
            req.m
        )));
    }
    Ok(CoeffValue { m: req.m, value, jet })
}

/// `sum_m c(-m) B'(m, 0, s_0)`.
///
/// Needs `n > 2`, or `n = 2` with `V` anisotropic.
pub fn green_integral_rhs(ctx: &Context, spec: &SpaceSpec, coeffs: &BTreeMap<u64, i64>) -> Result<Real> {
    check_dimension(spec)?;
    if spec.n == 2 && !spec.is_anisotropic() {
        return Err(Error::DimensionOutOfScope("n = 2 requires an anisotropic space".into()));
    }
    let mut acc = ctx.real(0);
    for (&m, &c) in coeffs {
        if c == 0 {
            continue;
        }
        let b = coeff_b(ctx, &CoeffRequest { spec: spec.clone(), m })?;
        acc = acc + b.jet.der * c;
    }
    Ok(acc)
}

/// `B'/B` at `s_0` for a prime `p = 1 mod D` in closed form:
/// `-b'/b - sum_l log(l)/(1 + beta_l) + (p^(n-1) - 1)/(p^(n-1) + 1) log p`.
///
/// The sign of the `log p` term is the one obtained by differentiating
/// `p^(s + (n-1)/2) (1 + p^(-2s))` at `s_0`.
pub fn coeff_dlog_split_prime(ctx: &Context, spec: &SpaceSpec, p: u64) -> Result<Real> {
    if p % spec.d() != 1 {
        return Err(Error::BadPrime(p));
    }
    let b = crate::volume::b_vk(ctx, spec, spec.n, &Jet::var_at(ctx, 0))?;
    let mut acc = -b.dlog();
    for &l in &spec.field.primes {
        let beta = crate::spaces::beta_ell(spec, l);
        acc = acc - ctx.real(l as i64).ln() / ctx.rat(&(beta + 1u32));
    }
    let pn = Integer::from(p).pow(spec.n - 1);
    let ratio = Rational::from((Integer::from(&pn - 1u32), pn + 1u32));
    Ok(acc + ctx.rat(&ratio) * ctx.real(p as i64).ln())
}

/// `(-D/p)` helper for callers that need the splitting behaviour.
pub fn splits(spec: &SpaceSpec, p: u64) -> bool {
    kronecker(-(spec.d() as i64), p as i64) == 1
}
