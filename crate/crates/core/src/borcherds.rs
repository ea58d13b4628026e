//! Level-`D` Eisenstein coefficients `e_r(m)`, the constants `a`, `b_r`,
//! `gamma_r`, and the weight and vertical part of a Borcherds product.

use rug::ops::Pow;
use std::collections::BTreeMap;

use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::arith::ntheory::{divisors, epsilon_exponent, hilbert_int, is_prime, moebius, Place};
use crate::arith::{ComplexVal, Context, Jet, Real};
use crate::dirichlet::{l_value, tau_gauss, CharSpec, FieldData};
use crate::error::{Error, Result};
use crate::spaces::{beta_ell, SpaceSpec};
use crate::volume::b_vk_exact0;

/// Principal-part coefficients `c(-p)` of a weakly holomorphic form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BorcherdsInput {
    pub spec: SpaceSpec,
    pub coeffs: BTreeMap<u64, i64>,
}

impl BorcherdsInput {
    pub fn new(spec: SpaceSpec, coeffs: BTreeMap<u64, i64>) -> Result<Self> {
        let input = BorcherdsInput { spec, coeffs };
        input.validate()?;
        Ok(input)
    }

    pub fn validate(&self) -> Result<()> {
        check_dim(self.spec.n)?;
        let d = self.spec.d();
        for &p in self.coeffs.keys() {
            if !is_prime(p) || p % d != 1 {
                return Err(Error::BadPrime(p));
            }
        }
        Ok(())
    }
}

fn check_dim(n: u32) -> Result<()> {
    if n < 3 {
        return Err(Error::DimensionTooSmall(n, 3));
    }
    Ok(())
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `(-2 pi i)^n / (D^n Gamma(n) L_D(n, eps^n))`.
fn prefactor(ctx: &Context, field: &FieldData, n: u32) -> Result<ComplexVal> {
    let chi = field.eps_power(n);
    let l = l_value(ctx, &chi, &Jet::constant(ctx.real(n as i64)), &field.primes)?.val;
    let mut den = ctx.real(field.d as i64).powi(n as i32) * l;
    den = den * ctx.real(n as i64).gamma();
    let num = (ctx.pi() * -2).powi(n as i32) / den;
    Ok(ComplexVal::i_pow(ctx.bits(), n as i64).scale(&num))
}

fn sqrt_pow(ctx: &Context, r: u64, n: u32) -> Real {
    ctx.real(r as i64).sqrt().powi(n as i32)
}

fn e_r_with<T: Fn(u64) -> ComplexVal>(
    ctx: &Context,
    field: &FieldData,
    n: u32,
    r: u64,
    m: u64,
    pref: &ComplexVal,
    tau: &T,
) -> ComplexVal {
    if m == 0 {
        return ComplexVal::real(ctx.real((r == 1) as i64));
    }
    let d = field.d;
    let rp = d / r;
    let eps_r = CharSpec::epsilon_r(r);
    let eps_rp = CharSpec::epsilon_r(rp);
    let mut sum = Integer::new();
    for c in divisors(m) {
        if gcd(m / c, r) != 1 {
            continue;
        }
        let cn = Integer::from(c).pow(n - 1);
        if n.is_multiple_of(2) {
            let inner: i64 = divisors(gcd(c, rp))
                .into_iter()
                .map(|dd| dd as i64 * moebius(rp / dd) as i64)
                .sum();
            sum += cn * inner;
        } else {
            let sign = eps_r.eval((m / c) as i64) * eps_rp.eval(c as i64);
            sum += cn * sign;
        }
    }
    let mut out = pref.scale(&(sqrt_pow(ctx, r, n) * Real::from_integer(ctx.bits(), &sum)));
    if n % 2 == 1 {
        out = (&out * &tau(rp)).scale_i(eps_r.eval(rp as i64) as i64);
    }
    out
}

/// Fourier coefficient `e_r(m)` of the level-`D` Eisenstein series `E_r`.
pub fn e_r_coeff(ctx: &Context, field: &FieldData, n: u32, r: u64, m: u64) -> Result<ComplexVal> {
    check_dim(n)?;
    if !field.d.is_multiple_of(r) {
        return Err(Error::InvalidInput(format!("{r} does not divide D = {}", field.d)));
    }
    let pref = prefactor(ctx, field, n)?;
    Ok(e_r_with(ctx, field, n, r, m, &pref, &|q| tau_gauss(ctx, q)))
}

/// `e_r(m)` with the Gauss sums `tau(eps_r')` supplied by the caller.
pub fn e_r_coeff_tau<T: Fn(u64) -> ComplexVal>(
    ctx: &Context,
    field: &FieldData,
    n: u32,
    r: u64,
    m: u64,
    tau: T,
) -> Result<ComplexVal> {
    check_dim(n)?;
    let pref = prefactor(ctx, field, n)?;
    Ok(e_r_with(ctx, field, n, r, m, &pref, &tau))
}

#[derive(Clone, Debug)]
pub struct WeightConstants {
    pub a: ComplexVal,
    pub b: BTreeMap<u64, ComplexVal>,
    pub gamma: BTreeMap<u64, ComplexVal>,
    pub beta: BTreeMap<u64, Rational>,
}

fn gamma_ell(ctx: &Context, spec: &SpaceSpec, l: u64) -> ComplexVal {
    let n = spec.n as i64;
    let sign = hilbert_int(spec.d() as i64, l as i64, Place::Finite(l)).pow(spec.n) * spec.inv_at(l);
    ComplexVal::i_pow(ctx.bits(), -n * epsilon_exponent(l)).scale_i(sign as i64)
}

fn b_r(ctx: &Context, field: &FieldData, n: u32, r: u64) -> ComplexVal {
    let rn = sqrt_pow(ctx, r, n);
    if n.is_multiple_of(2) {
        ComplexVal::real(rn * moebius(r) as i64)
    } else {
        let rp = field.d / r;
        let t = &tau_gauss(ctx, rp) / &tau_gauss(ctx, field.d);
        t.scale(&rn).scale_i(CharSpec::epsilon_r(r).eval(rp as i64) as i64)
    }
}

/// `a`, `b_r`, `gamma_r` and `beta_r` for every `r | D`.
pub fn weight_constants(ctx: &Context, spec: &SpaceSpec) -> Result<WeightConstants> {
    check_dim(spec.n)?;
    let field = &spec.field;
    let n = spec.n;
    let d = spec.d();
    let mut a = prefactor(ctx, field, n)?;
    if n.is_multiple_of(2) {
        a = a.scale_i(moebius(d) as i64);
    } else {
        a = &a * &tau_gauss(ctx, d);
    }
    let mut b = BTreeMap::new();
    let mut gamma = BTreeMap::new();
    let mut beta = BTreeMap::new();
    for r in divisors(d) {
        let br = b_r(ctx, field, n, r);
        let mut g = ComplexVal::one(ctx.bits());
        let mut bprod = ComplexVal::one(ctx.bits());
        let mut be = Rational::from(1);
        for &l in field.primes.iter().filter(|&&l| r % l == 0) {
            g = &g * &gamma_ell(ctx, spec, l);
            bprod = &bprod * &b_r(ctx, field, n, l);
            be *= beta_ell(spec, l);
        }
        let err = (&bprod - &br).abs();
        assert!(err < ctx.tol(5), "b_r is not multiplicative at r = {r}");
        b.insert(r, br);
        gamma.insert(r, g);
        beta.insert(r, be);
    }
    Ok(WeightConstants { a, b, gamma, beta })
}

/// Residuals of `beta_r = gamma_r b_r` (worst over `r | D`) and of
/// `1/b_{V,n}(0) = -a prod (1 + beta_l)`.
pub fn beta_identity_residuals(ctx: &Context, spec: &SpaceSpec) -> Result<(Real, Real)> {
    let w = weight_constants(ctx, spec)?;
    let mut worst = ctx.real(0);
    for (r, be) in &w.beta {
        let prod = &w.gamma[r] * &w.b[r];
        let err = (&prod - &ComplexVal::real(ctx.rat(be))).abs();
        worst = worst.max(err);
    }
    let mut prod = Rational::from(1);
    for &l in &spec.field.primes {
        prod *= beta_ell(spec, l) + 1u32;
    }
    let inv_b = Rational::from(b_vk_exact0(spec, spec.n).recip_ref());
    let rhs = (-&w.a).scale(&ctx.rat(&prod));
    let err = (&rhs - &ComplexVal::real(ctx.rat(&inv_b))).abs();
    Ok((worst, err))
}

/// `k(f) = (1 / b_{V,n}(0)) sum c(-p) (p^(n-1) + 1)`.
pub fn borcherds_weight(input: &BorcherdsInput) -> Result<Rational> {
    input.validate()?;
    let n = input.spec.n;
    let mut sum = Integer::new();
    for (&p, &c) in &input.coeffs {
        sum += (Integer::from(p).pow(n - 1) + 1u32) * c;
    }
    Ok(Rational::from(sum) / b_vk_exact0(&input.spec, n))
}

/// `k(f) = sum_r gamma_r c_r(0)` with `c_r(0) = -sum c(-p) e_r(p)`, before
/// rational reconstruction.
pub fn weight_cross_check_value(ctx: &Context, input: &BorcherdsInput) -> Result<ComplexVal> {
    input.validate()?;
    let spec = &input.spec;
    let w = weight_constants(ctx, spec)?;
    let pref = prefactor(ctx, &spec.field, spec.n)?;
    let tau = |q| tau_gauss(ctx, q);
    let mut k = ComplexVal::zero(ctx.bits());
    for (r, g) in &w.gamma {
        let mut cr = ComplexVal::zero(ctx.bits());
        for (&p, &c) in &input.coeffs {
            let e = e_r_with(ctx, &spec.field, spec.n, *r, p, &pref, &tau);
            cr = &cr - &e.scale_i(c);
        }
        k = &k + &(g * &cr);
    }
    if k.im.abs() > ctx.tol(5) * k.re.abs().max(ctx.real(1)) {
        return Err(Error::PrecisionLoss(format!(
            "weight has imaginary part {}",
            k.im.to_string_digits(6)
        )));
    }
    Ok(k)
}

/// [`weight_cross_check_value`] reconstructed as a rational.
pub fn weight_cross_check(ctx: &Context, input: &BorcherdsInput) -> Result<Rational> {
    let k = weight_cross_check_value(ctx, input)?;
    let max_den = Integer::from(10).pow(ctx.digits() / 3);
    let q =
        k.re.to_rational_approx(&max_den)
            .ok_or_else(|| Error::PrecisionLoss("weight is not finite".into()))?;
    if (&k.re - &ctx.rat(&q)).abs() > ctx.tol(5) * k.re.abs().max(ctx.real(1)) {
        return Err(Error::PrecisionLoss("weight is not a small-height rational".into()));
    }
    Ok(q)
}

/// Coefficient of `log l` in the vertical part: `-k(f) / (1 + beta_l)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerticalCoeff {
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub rational: Rational,
    #[serde(serialize_with = "crate::report::ser_real")]
    pub value: Real,
}

pub fn vertical_log_coefficients(
    ctx: &Context,
    spec: &SpaceSpec,
    kf: &Rational,
) -> Result<BTreeMap<u64, VerticalCoeff>> {
    check_dim(spec.n)?;
    let mut out = BTreeMap::new();
    for &l in &spec.field.primes {
        let den = beta_ell(spec, l) + 1u32;
        if den == 0 {
            return Err(Error::BetaPole(l));
        }
        let rational = -Rational::from(kf / &den);
        let value = ctx.rat(&rational) * ctx.real(l as i64).ln();
        out.insert(l, VerticalCoeff { rational, value });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirichlet::tau_gauss_brute;

    fn input(d: i64, n: u32, inv: &[(u64, i32)], coeffs: &[(u64, i64)]) -> BorcherdsInput {
        let spec = SpaceSpec::from_parts(d, n, inv).unwrap();
        BorcherdsInput::new(spec, coeffs.iter().copied().collect()).unwrap()
    }

    #[test]
    fn weight_anchor_and_linearity() {
        let ctx = Context::default();
        let i = input(7, 3, &[(7, -1)], &[(29, 1)]);
        assert_eq!(borcherds_weight(&i).unwrap(), 5894);
        assert_eq!(weight_cross_check(&ctx, &i).unwrap(), 5894);
        let empty = input(7, 3, &[(7, -1)], &[]);
        assert_eq!(borcherds_weight(&empty).unwrap(), 0);
        let two = input(7, 3, &[(7, -1)], &[(29, 2), (43, -1)]);
        let expect = Rational::from(2 * 5894) - 7 * (43 * 43 + 1);
        assert_eq!(borcherds_weight(&two).unwrap(), expect);
        assert_eq!(weight_cross_check(&ctx, &two).unwrap(), expect);
    }

    #[test]
    fn bad_inputs() {
        let spec = SpaceSpec::from_parts(7, 3, &[(7, -1)]).unwrap();
        let r = BorcherdsInput::new(spec.clone(), [(31, 1)].into());
        assert_eq!(r, Err(Error::BadPrime(31)));
        let r = BorcherdsInput::new(spec.with_dim(2), [(29, 1)].into());
        assert!(matches!(r, Err(Error::DimensionTooSmall(2, 3))));
    }

    #[test]
    fn constant_terms_and_simplification() {
        let ctx = Context::default();
        for (d, n, inv) in [
            (7i64, 3u32, vec![(7u64, -1)]),
            (15, 4, vec![(3, 1), (5, -1)]),
            (15, 3, vec![(3, 1), (5, -1)]),
        ] {
            let spec = SpaceSpec::from_parts(d, n, &inv).unwrap();
            let w = weight_constants(&ctx, &spec).unwrap();
            for r in divisors(d as u64) {
                let e0 = e_r_coeff(&ctx, &spec.field, n, r, 0).unwrap();
                assert_eq!(e0.re, (r == 1) as i64);
                let p = if d == 7 { 29 } else { 31 };
                let e = e_r_coeff(&ctx, &spec.field, n, r, p).unwrap();
                let pn = ctx.real(p as i64).powi(n as i32 - 1) + 1;
                let expect = (&w.a * &w.b[&r]).scale(&pn);
                assert!((&e - &expect).abs() < ctx.tol(5) * pn.abs(), "D={d} n={n} r={r}");
                if n % 2 == 0 {
                    assert!(e.im.abs() < ctx.tol(20));
                }
            }
        }
    }

    #[test]
    fn beta_identities_hold() {
        let ctx = Context::default();
        for d in [7i64, 15] {
            let field = crate::dirichlet::make_field(d).unwrap();
            for n in 3..=5 {
                for spec in crate::spaces::enumerate_spaces(&field, n) {
                    let (a, b) = beta_identity_residuals(&ctx, &spec).unwrap();
                    assert!(a < ctx.tol(10) && b < ctx.tol(10), "{spec}");
                }
            }
        }
    }

    #[test]
    fn tau_brute_consistency() {
        let ctx = Context::default();
        let spec = SpaceSpec::from_parts(15, 5, &[(3, 1), (5, -1)]).unwrap();
        for r in [1u64, 3, 5, 15] {
            for m in [1u64, 2, 31, 12] {
                let a = e_r_coeff(&ctx, &spec.field, 5, r, m).unwrap();
                let b = e_r_coeff_tau(&ctx, &spec.field, 5, r, m, |q| tau_gauss_brute(&ctx, q)).unwrap();
                assert!((&a - &b).abs() < ctx.tol(5) * a.abs().max(ctx.real(1)));
            }
        }
    }

    #[test]
    fn even_coefficient_two_prime_expansion() {
        // for m = pq coprime to D the double sum is mu(r')(1 + p^(n-1))(1 + q^(n-1))
        let ctx = Context::default();
        let field = crate::dirichlet::make_field(15).unwrap();
        let n = 4;
        let pref = prefactor(&ctx, &field, n).unwrap();
        for r in [1u64, 3, 5, 15] {
            let e = e_r_coeff(&ctx, &field, n, r, 2 * 7).unwrap();
            let s = (1 + 2i64.pow(3)) * (1 + 7i64.pow(3)) * moebius(15 / r) as i64;
            let expect = pref.scale(&(sqrt_pow(&ctx, r, n) * s));
            assert!((&e - &expect).abs() < ctx.tol(5) * expect.abs().max(ctx.real(1)));
        }
    }

    #[test]
    fn vertical_coefficients() {
        let ctx = Context::default();
        let spec = SpaceSpec::from_parts(7, 3, &[(7, -1)]).unwrap();
        let v = vertical_log_coefficients(&ctx, &spec, &Rational::from(5894)).unwrap();
        assert_eq!(v[&7].rational, Rational::from((-5894, 8)));
        let z = vertical_log_coefficients(&ctx, &spec, &Rational::new()).unwrap();
        assert!(z[&7].value.is_zero());
    }

    #[test]
    fn input_json() {
        let i = input(7, 3, &[(7, -1)], &[(29, 1), (43, -2)]);
        let j = serde_json::to_string(&i).unwrap();
        assert!(j.contains("\"coeffs\":{\"29\":1,\"43\":-2}"));
        let back: BorcherdsInput = serde_json::from_str(&j).unwrap();
        assert_eq!(back, i);
    }
}
