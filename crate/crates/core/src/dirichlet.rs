//! Dirichlet L-functions of the quadratic character of `Q(sqrt(-D))`.
//!
//! Values and s-derivatives come from the Hurwitz decomposition
//! `L(s, chi) = q^-s sum_a chi(a) zeta(s, a/q)`, with each Hurwitz zeta
//! evaluated by Euler-Maclaurin summation over jets. Exact values at
//! non-positive integers come from generalized Bernoulli numbers.

use rug::Rational;
use serde::Serialize;

use crate::arith::bernoulli::{bernoulli, gen_bernoulli};
use crate::arith::forms::class_number_by_forms;
use crate::arith::ntheory::{is_squarefree, kronecker, prime_divisors};
use crate::arith::{ComplexVal, Context, Jet, Real};
use crate::error::{Error, Result};

/// Real character: the field character `eps`, a factor `eps_r(a) = (a/r)`
/// for `r | D`, or the trivial character.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum CharSpec {
    Trivial,
    Epsilon(u64),
    EpsilonR(u64),
}

impl CharSpec {
    pub fn trivial() -> Self {
        CharSpec::Trivial
    }

    pub fn epsilon(d: u64) -> Self {
        CharSpec::Epsilon(d)
    }

    pub fn epsilon_r(r: u64) -> Self {
        if r == 1 {
            CharSpec::Trivial
        } else {
            CharSpec::EpsilonR(r)
        }
    }

    pub fn modulus(&self) -> u64 {
        match *self {
            CharSpec::Trivial => 1,
            CharSpec::Epsilon(d) | CharSpec::EpsilonR(d) => d,
        }
    }

    pub fn eval(&self, a: i64) -> i32 {
        match *self {
            CharSpec::Trivial => 1,
            CharSpec::Epsilon(d) | CharSpec::EpsilonR(d) => kronecker(a, d as i64),
        }
    }

    pub fn is_trivial(&self) -> bool {
        matches!(self, CharSpec::Trivial)
    }

    /// `chi(-1) = 1`.
    pub fn is_even(&self) -> bool {
        self.eval(-1) == 1
    }
}

/// The imaginary quadratic field `Q(sqrt(-D))` with `D` odd.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FieldData {
    pub d: u64,
    pub primes: Vec<u64>,
    pub o_d: u32,
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub h: Rational,
    pub w: u32,
}

impl FieldData {
    pub fn epsilon(&self) -> CharSpec {
        CharSpec::Epsilon(self.d)
    }

    /// `eps(a) = (a/D)`.
    pub fn eps(&self, a: i64) -> i32 {
        kronecker(a, self.d as i64)
    }

    /// `eps^n`: trivial for even `n`.
    pub fn eps_power(&self, n: u32) -> CharSpec {
        if n.is_multiple_of(2) {
            CharSpec::Trivial
        } else {
            self.epsilon()
        }
    }

    pub fn h_over_w(&self) -> Rational {
        Rational::from(&self.h / self.w)
    }
}

/// Validates `D` and computes the class number from `L(0, eps) = 2h/w`.
pub fn make_field(d: i64) -> Result<FieldData> {
    if d <= 0 || d % 2 == 0 || d % 4 != 3 || !is_squarefree(d as u64) {
        return Err(Error::NotFundamental(d));
    }
    let d = d as u64;
    let w = if d == 3 { 6 } else { 2 };
    let l0 = l_nonpositive_exact(&CharSpec::Epsilon(d), 0);
    let h = l0 * w / 2;
    if d < 10_000_000 {
        assert_eq!(
            h,
            class_number_by_forms(d),
            "class number formula disagrees with the reduced-form count for D={d}"
        );
    }
    let primes = prime_divisors(d);
    Ok(FieldData {
        d,
        o_d: primes.len() as u32,
        primes,
        h,
        w,
    })
}

/// `L(1 - k, chi) = -B_{k,chi}/k` for `k >= 1`.
pub fn l_nonpositive_exact(chi: &CharSpec, one_minus_k: i64) -> Rational {
    assert!(one_minus_k <= 0, "argument must be a non-positive integer");
    let k = (1 - one_minus_k) as usize;
    let b = match chi {
        CharSpec::Trivial if k == 1 => Rational::from((1, 2)),
        CharSpec::Trivial => bernoulli(k),
        _ => gen_bernoulli(k, chi),
    };
    -b / Rational::from(k)
}

/// `(e^u - 1)/u` as a jet, by power series near zero.
fn exprel(u: &Jet) -> Jet {
    if u.val.abs().to_f64() < 0.5 {
        let bits = u.prec();
        let one = Jet::constant(Real::one(bits));
        let mut acc = one.clone();
        let mut term = one;
        let tol = Real::from_i64(bits, 2).powi(-(bits as i32) - 8);
        let mut k = 1i64;
        loop {
            term = (&term * u).scale(&(Real::from_i64(bits, 1) / (k + 1)));
            acc = &acc + &term;
            if term.val.abs() < tol && term.der.abs() < tol {
                break;
            }
            k += 1;
        }
        acc
    } else {
        (&u.exp().add_i(-1)) / u
    }
}

/// Euler-Maclaurin parameters: `N` direct terms, `M` Bernoulli corrections.
#[derive(Clone, Copy, Debug)]
struct EmParams {
    n: u64,
    m: usize,
}

/// Sum over the residues `a` of `weight(a) * zeta(s, a/q)`, omitting the
/// pole term's `1/(s-1)` part when the weights sum to zero.
fn hurwitz_combination(s: &Jet, q: u64, weights: &[(u64, i32)], params: EmParams, bits: u32) -> Result<Jet> {
    let total: i64 = weights.iter().map(|&(_, c)| c as i64).sum();
    let s = Jet::new(s.val.with_prec(bits), s.der.with_prec(bits));
    let zero = Jet::constant(Real::zero(bits));
    let t = s.add_i(-1);
    if total != 0 && t.val.is_zero() {
        return Err(Error::PoleAtOne);
    }
    let neg_s = -&s;
    let qr = Real::from_i64(bits, q as i64);

    // Bernoulli coefficients B_{2j}/(2j)!
    let mut coeffs = Vec::with_capacity(params.m);
    let mut fact = rug::Integer::from(1);
    for j in 1..=params.m {
        fact *= (2 * j - 1) as u32;
        fact *= (2 * j) as u32;
        let c = bernoulli(2 * j) / Rational::from(fact.clone());
        coeffs.push(Real::from_rational(bits, &c));
    }

    let mut acc = zero.clone();
    for &(a, c) in weights {
        if c == 0 {
            continue;
        }
        let x = Real::from_i64(bits, a as i64) / &qr;
        let mut part = zero.clone();
        for k in 0..params.n {
            let base = &x + k as i64;
            part = &part + &Jet::base_pow(&base, &neg_s);
        }
        let y = &x + params.n as i64;
        let y_neg_s = Jet::base_pow(&y, &neg_s);
        // y^(1-s)/(s-1)
        let pole = if total == 0 {
            let ly = y.ln();
            let u = t.scale(&-&ly);
            exprel(&u).scale(&-&ly)
        } else {
            (&y_neg_s.scale(&y)) / &t
        };
        part = &part + &pole;
        part = &part + &y_neg_s.scale(&Real::from_f64(bits, 0.5));
        // sum_j B_2j/(2j)! (s)_{2j-1} y^(-s-2j+1)
        let y_inv2 = (&y * &y).recip();
        let mut poch = s.clone();
        let mut ypow = y_neg_s.scale(&y.recip());
        for (j, cj) in coeffs.iter().enumerate() {
            let j = j as i64 + 1;
            if j > 1 {
                poch = &(&poch * &s.add_i(2 * j - 3)) * &s.add_i(2 * j - 2);
                ypow = ypow.scale(&y_inv2);
            }
            part = &part + &(&poch * &ypow).scale(cj);
        }
        acc = &acc + &part.scale_i(c as i64);
    }
    Ok(acc)
}

fn em_params(s: &Jet, digits: u32, scale: u64) -> EmParams {
    let m = (0.6 * digits as f64).ceil() as usize + 5;
    let n = (m as f64 + s.val.to_f64().abs()).ceil() as u64 * scale + 10;
    EmParams { n, m }
}

/// Guard bits covering the cancellation among direct terms of size
/// `N^(1 - Re s)` when `Re s < 0`.
fn cancellation_bits(s: &Jet, digits: u32, q: u64) -> u32 {
    let re = s.val.to_f64();
    if re >= 0.0 {
        return 0;
    }
    let n = em_params(s, digits, 8).n as f64 + q as f64;
    ((1.0 - re) * n.log2()).ceil() as u32
}

fn character_weights(chi: &CharSpec) -> (u64, Vec<(u64, i32)>) {
    let q = chi.modulus();
    let w = (1..=q).map(|a| (a, chi.eval(a as i64))).collect();
    (q, w)
}

/// `L(s, chi) * prod_{l in deplete_at} (1 - chi(l) l^-s)` as a jet.
///
/// Evaluated twice with the direct-sum length doubled; the two results must
/// agree to the context precision.
pub fn l_value(ctx: &Context, chi: &CharSpec, s: &Jet, deplete_at: &[u64]) -> Result<Jet> {
    let out_bits = ctx.bits().min(s.prec());
    let target = ctx.digits() + 10;
    let (q, weights) = character_weights(chi);
    let bits = out_bits + 64 + cancellation_bits(s, target, q);
    let qs = Jet::int_pow(q, &(-s));
    let qs = Jet::new(qs.val.with_prec(bits), qs.der.with_prec(bits));

    let mut prev: Option<Jet> = None;
    for scale in [1u64, 2, 4, 8] {
        let params = em_params(s, target, scale);
        let sum = hurwitz_combination(s, q, &weights, params, bits)?;
        let val = &qs * &sum;
        if let Some(p) = prev {
            let tol = Real::from_i64(bits, 10).powi(-(target as i32));
            let mag = val.val.abs().max(Real::one(bits));
            let dmag = val.der.abs().max(Real::one(bits));
            if (&val.val - &p.val).abs() <= &tol * &mag && (&val.der - &p.der).abs() <= &tol * &dmag {
                let mut out = val;
                for &l in deplete_at {
                    let c = chi.eval(l as i64);
                    if c != 0 {
                        let f = Jet::int_pow(l, &(-s)).scale_i(-(c as i64)).add_i(1);
                        out = &out * &f;
                    }
                }
                return Ok(Jet::new(out.val.with_prec(out_bits), out.der.with_prec(out_bits)));
            }
        }
        prev = Some(val);
    }
    Err(Error::PrecisionLoss(format!(
        "Euler-Maclaurin for L(s, chi mod {q}) did not settle at s = {}",
        s.val.to_f64()
    )))
}

/// Hurwitz zeta `zeta(s, x)` for `0 < x <= 1` rational.
pub fn hurwitz_zeta(ctx: &Context, s: &Jet, x: &Rational) -> Result<Jet> {
    let (num, den) = x.clone().into_numer_denom();
    let a = num
        .to_u64()
        .ok_or_else(|| Error::InvalidInput("x must be positive".into()))?;
    let q = den.to_u64().unwrap();
    let bits = ctx.bits() + 64 + cancellation_bits(s, ctx.digits() + 10, q);
    let params = em_params(s, ctx.digits() + 10, 2);
    let z = hurwitz_combination(s, q, &[(a, 1)], params, bits)?;
    Ok(Jet::new(z.val.with_prec(ctx.bits()), z.der.with_prec(ctx.bits())))
}

/// `L'(0, eps)/L(0, eps)` by the log-Gamma formula
/// `L'(0) = -log(D) L(0) + sum_a eps(a) log Gamma(a/D)`,
/// checked against the Euler-Maclaurin jet at `s = 0`.
pub fn l_dlog_at_0(ctx: &Context, field: &FieldData) -> Result<Real> {
    let via_gamma = l_dlog_at_0_log_gamma(ctx, field);
    let via_jet = l_dlog_at_0_jet(ctx, field)?;
    let tol = ctx.tol(5) * via_gamma.abs().max(ctx.real(1));
    if (&via_gamma - &via_jet).abs() > tol {
        return Err(Error::PrecisionLoss(format!(
            "L'(0)/L(0) routes disagree for D={}",
            field.d
        )));
    }
    Ok(via_gamma)
}

pub fn l_dlog_at_0_log_gamma(ctx: &Context, field: &FieldData) -> Real {
    let bits = ctx.bits() + 32;
    let d = field.d;
    let l0 = l_nonpositive_exact(&field.epsilon(), 0);
    let dr = Real::from_i64(bits, d as i64);
    let mut acc = -(dr.ln() * Real::from_rational(bits, &l0));
    for a in 1..d {
        let c = field.eps(a as i64);
        if c != 0 {
            let lg = (Real::from_i64(bits, a as i64) / &dr).ln_gamma();
            acc = acc + lg * c as i64;
        }
    }
    (acc / Real::from_rational(bits, &l0)).with_prec(ctx.bits())
}

pub fn l_dlog_at_0_jet(ctx: &Context, field: &FieldData) -> Result<Real> {
    let l = l_value(ctx, &field.epsilon(), &Jet::var_at(ctx, 0), &[])?;
    Ok(l.dlog())
}

/// Quadratic Gauss sum of `eps_r`: `sqrt(r)` or `i sqrt(r)`.
pub fn tau_gauss(ctx: &Context, r: u64) -> ComplexVal {
    let root = ctx.real(r as i64).sqrt();
    if r % 4 == 1 {
        ComplexVal::real(root)
    } else {
        ComplexVal::new(ctx.real(0), root)
    }
}

/// Character sum `sum_{a mod r} eps_r(a) e(a/r)`.
pub fn tau_gauss_brute(ctx: &Context, r: u64) -> ComplexVal {
    let chi = CharSpec::epsilon_r(r);
    let mut acc = ComplexVal::zero(ctx.bits());
    for a in 0..r {
        let c = chi.eval(a as i64);
        if c != 0 && (r == 1 || a != 0) {
            acc = acc + ComplexVal::e_frac(ctx.bits(), a as i64, r as i64).scale_i(c as i64);
        }
    }
    acc
}
