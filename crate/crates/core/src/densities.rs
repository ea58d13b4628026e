//! Gauss sums over `O_k / p^nu O_k`, representation numbers of self-dual
//! hermitian lattices modulo prime powers, and the Euler-factor polynomials
//! that package them.

use rug::ops::Pow;
use std::collections::HashMap;
use std::ops::Mul;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use rug::{Integer, Rational};
use serde::Serialize;

use crate::arith::ntheory::{epsilon_exponent, kronecker, least_nonresidue, valuation};
use crate::arith::{ComplexVal, Context, Jet, Real};
use crate::error::{Error, Result};
use crate::spaces::{local_gram, SpaceSpec};

/// `O_k / c O_k` as pairs `(x, y)` standing for `x + y w`, `w = (1 + sqrt(-D))/2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ResidueRing {
    pub c: u64,
    pub d: u64,
}

impl ResidueRing {
    pub fn new(c: u64, d: u64) -> Self {
        assert!(d % 4 == 3, "D must be 3 mod 4");
        ResidueRing { c, d }
    }

    /// `N(x + y w) = x^2 + xy + (1 + D)/4 y^2`, reduced mod `c`.
    pub fn norm(&self, x: u64, y: u64) -> u64 {
        let k = (1 + self.d) / 4 % self.c;
        let c = self.c as u128;
        let (x, y, k) = (x as u128, y as u128, k as u128);
        ((x * x + x * y + k * (y * y % c)) % c) as u64
    }

    /// Number of elements of each norm class mod `c`.
    pub fn norm_histogram(&self) -> Vec<u64> {
        let mut h = vec![0u64; self.c as usize];
        for x in 0..self.c {
            for y in 0..self.c {
                h[self.norm(x, y) as usize] += 1;
            }
        }
        h
    }
}

/// Element `c0 + c1 sqrt(p) + i (c2 + c3 sqrt(p))` of `Z[i, sqrt(p)]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaussExact {
    pub p: u64,
    pub c: [Integer; 4],
}

impl GaussExact {
    pub fn int(p: u64, v: Integer) -> Self {
        GaussExact {
            p,
            c: [v, Integer::new(), Integer::new(), Integer::new()],
        }
    }

    /// `i^e p^k (sqrt p)^h` times a sign.
    fn monomial(p: u64, sign: i32, i_exp: i64, p_exp: u32, half: bool) -> Self {
        let mut v = Integer::from(p).pow(p_exp);
        if sign < 0 {
            v = -v;
        }
        let mut c = [Integer::new(), Integer::new(), Integer::new(), Integer::new()];
        let slot = if half { 1 } else { 0 };
        match i_exp.rem_euclid(4) {
            0 => c[slot] = v,
            1 => c[2 + slot] = v,
            2 => c[slot] = -v,
            _ => c[2 + slot] = -v,
        }
        GaussExact { p, c }
    }

    pub fn to_complex(&self, bits: u32) -> ComplexVal {
        let s = Real::from_i64(bits, self.p as i64).sqrt();
        let part = |a: &Integer, b: &Integer| Real::from_integer(bits, a) + Real::from_integer(bits, b) * &s;
        ComplexVal::new(part(&self.c[0], &self.c[1]), part(&self.c[2], &self.c[3]))
    }
}

impl Mul<&GaussExact> for &GaussExact {
    type Output = GaussExact;
    fn mul(self, rhs: &GaussExact) -> GaussExact {
        assert_eq!(self.p, rhs.p);
        let p = self.p;
        // (a0 + a1 s)(b0 + b1 s) in Z[sqrt p]
        let m = |a0: &Integer, a1: &Integer, b0: &Integer, b1: &Integer| {
            (
                Integer::from(a0 * b0) + Integer::from(a1 * b1) * p,
                Integer::from(a0 * b1) + Integer::from(a1 * b0),
            )
        };
        let [x0, x1, y0, x3] = &self.c;
        let [u0, u1, v0, v1] = &rhs.c;
        let (ac0, ac1) = m(x0, x1, u0, u1);
        let (be0, be1) = m(y0, x3, v0, v1);
        let (ae0, ae1) = m(x0, x1, v0, v1);
        let (bc0, bc1) = m(y0, x3, u0, u1);
        GaussExact {
            p,
            c: [ac0 - be0, ac1 - be1, ae0 + bc0, ae1 + bc1],
        }
    }
}

fn split_alpha(a: i64, p: u64, nu: u32) -> (u32, i64) {
    if a.rem_euclid(p.pow(nu) as i64) == 0 {
        return (nu, 0);
    }
    let alpha = valuation(a, p).min(nu);
    (alpha, a / (p.pow(alpha) as i64))
}

/// `G(a, p^nu) = sum_{x in O_k/p^nu} e(a N(x)/p^nu)` in closed form.
pub fn gauss_sum_exact(a: i64, p: u64, nu: u32, d: u64) -> GaussExact {
    assert!(nu >= 1);
    let (alpha, a1) = split_alpha(a, p, nu);
    if alpha == nu {
        return GaussExact::int(p, Integer::from(p).pow(2 * nu));
    }
    if !d.is_multiple_of(p) {
        let chi = kronecker(-(d as i64), p as i64);
        let sign = if (nu - alpha) % 2 == 1 { chi } else { 1 };
        return GaussExact::monomial(p, sign, 0, alpha + nu, false);
    }
    let d1 = (d / p) as i64;
    let mut sign = kronecker(a1, p as i64);
    if (nu - alpha - 1) % 2 == 1 {
        sign *= kronecker(d1, p as i64);
    }
    GaussExact::monomial(p, sign, epsilon_exponent(p), alpha + nu, true)
}

pub fn gauss_sum_g(ctx: &Context, a: i64, p: u64, nu: u32, d: u64) -> ComplexVal {
    gauss_sum_exact(a, p, nu, d).to_complex(ctx.bits())
}

/// The defining exponential sum, grouped by the value of `N(x) mod p^nu`.
pub fn gauss_sum_brute(ctx: &Context, a: i64, p: u64, nu: u32, d: u64) -> ComplexVal {
    let q = p.pow(nu);
    let hist = ResidueRing::new(q, d).norm_histogram();
    exp_sum_from_histogram(ctx.bits(), a, &hist)
}

/// `sum_t hist[t] e(a t / q)` with `q = hist.len()`.
pub fn exp_sum_from_histogram(bits: u32, a: i64, hist: &[u64]) -> ComplexVal {
    let q = hist.len() as i64;
    let mut acc = ComplexVal::zero(bits);
    for (t, &cnt) in hist.iter().enumerate() {
        if cnt > 0 {
            let k = (a.rem_euclid(q) as i128 * t as i128 % q as i128) as i64;
            acc = acc + ComplexVal::e_frac(bits, k, q).scale_i(cnt as i64);
        }
    }
    acc
}

/// `G_L(a, p^nu)` as the product of one-variable sums over the diagonal units.
pub fn lattice_gauss_exact(a: i64, p: u64, nu: u32, units: &[u64], d: u64) -> GaussExact {
    let q = p.pow(nu) as i64;
    let mut acc = GaussExact::int(p, Integer::from(1));
    for &u in units {
        let au = (a.rem_euclid(q) as i128 * u as i128 % q as i128) as i64;
        acc = &acc * &gauss_sum_exact(au, p, nu, d);
    }
    acc
}

/// The three-case closed form of `G_L(a, p^nu)` in terms of `inv_p`.
pub fn lattice_gauss_closed(a: i64, p: u64, nu: u32, units: &[u64], d: u64) -> GaussExact {
    let n = units.len() as u32;
    let (alpha, a1) = split_alpha(a, p, nu);
    if alpha == nu {
        return GaussExact::int(p, Integer::from(p).pow(2 * n * nu));
    }
    if !d.is_multiple_of(p) {
        let chi = kronecker(-(d as i64), p as i64);
        let sign = if (n * (nu - alpha)) % 2 == 1 { chi } else { 1 };
        return GaussExact::monomial(p, sign, 0, n * (alpha + nu), false);
    }
    let inv: i32 = units.iter().map(|&u| kronecker(u as i64, p as i64)).product();
    let mut sign = inv;
    if n % 2 == 1 {
        sign *= kronecker(a1, p as i64);
    }
    if (n * (nu - alpha - 1)) % 2 == 1 {
        sign *= kronecker((d / p) as i64, p as i64);
    }
    let i_exp = epsilon_exponent(p) * n as i64;
    GaussExact::monomial(p, sign, i_exp, n * (alpha + nu) + n / 2, n % 2 == 1)
}

pub fn lattice_gauss_sum(ctx: &Context, a: i64, p: u64, nu: u32, units: &[u64], d: u64) -> ComplexVal {
    let g = lattice_gauss_exact(a, p, nu, units, d);
    debug_assert_eq!(g, lattice_gauss_closed(a, p, nu, units, d));
    g.to_complex(ctx.bits())
}

/// Direct exponential sum over `(O_k/p^nu)^n`, grouped by the value of
/// `sum u_i N(x_i) mod p^nu`.
pub fn lattice_gauss_brute(ctx: &Context, a: i64, p: u64, nu: u32, units: &[u64], d: u64) -> Result<ComplexVal> {
    let hist = enumerate_norms(p.pow(nu), d, units)?;
    Ok(exp_sum_from_histogram(ctx.bits(), a, &hist))
}

const ENUMERATION_LIMIT: u128 = 2_000_000_000;

/// Histogram of `sum u_i N(x_i) mod q` over all `q^(2n)` points, by direct
/// enumeration. The outer coordinate is split across threads; counts are
/// integers, so the reduction is exact and order-free.
pub fn enumerate_norms(q: u64, d: u64, units: &[u64]) -> Result<Vec<u64>> {
    let n = units.len();
    let ring = ResidueRing::new(q, d);
    let pts = (q * q) as usize;
    if (pts as u128).pow(n as u32) > ENUMERATION_LIMIT {
        return Err(Error::InvalidInput(format!(
            "enumeration of {q}^{} points exceeds the oracle budget",
            2 * n
        )));
    }
    let norms: Vec<u64> = (0..pts).map(|i| ring.norm(i as u64 / q, i as u64 % q)).collect();
    let scaled: Vec<Vec<u64>> = units
        .iter()
        .map(|&u| {
            norms
                .iter()
                .map(|&v| (v as u128 * u as u128 % q as u128) as u64)
                .collect()
        })
        .collect();
    if n == 0 {
        let mut h = vec![0u64; q as usize];
        h[0] = 1;
        return Ok(h);
    }
    let hist = (0..pts)
        .into_par_iter()
        .fold(
            || vec![0u64; q as usize],
            |mut h, first| {
                let base = scaled[0][first];
                let mut idx = vec![0usize; n - 1];
                loop {
                    let mut t = base;
                    for (k, &i) in idx.iter().enumerate() {
                        t += scaled[k + 1][i];
                    }
                    h[(t % q) as usize] += 1;
                    // odometer over the remaining coordinates
                    let mut k = 0;
                    loop {
                        if k == idx.len() {
                            return h;
                        }
                        idx[k] += 1;
                        if idx[k] < pts {
                            break;
                        }
                        idx[k] = 0;
                        k += 1;
                    }
                }
            },
        )
        .reduce(
            || vec![0u64; q as usize],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    Ok(hist)
}

/// Diagonal units of the local lattice: the ramified model from the spec, or
/// all ones at unramified primes.
pub fn local_units(spec: &SpaceSpec, p: u64) -> Vec<u64> {
    if spec.d().is_multiple_of(p) {
        local_gram(spec, p).units
    } else {
        vec![1; spec.n as usize]
    }
}

type RootTable = Arc<Vec<ComplexVal>>;

fn root_table(q: u64, bits: u32) -> RootTable {
    static CACHE: OnceLock<Mutex<HashMap<(u64, u32), RootTable>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = cache.lock().unwrap().get(&(q, bits)) {
        return t.clone();
    }
    let t: Vec<ComplexVal> = (0..q)
        .into_par_iter()
        .map(|k| ComplexVal::e_frac(bits, k as i64, q as i64))
        .collect();
    let t = Arc::new(t);
    cache.lock().unwrap().insert((q, bits), t.clone());
    t
}

/// Bits needed to hold `p^(2 n nu)` exactly.
fn magnitude_bits(p: u64, n: u32, nu: u32) -> u32 {
    Integer::from(p).pow(2 * n * nu).significant_bits()
}

/// `N_m(p^nu) = p^-nu sum_a G_L(a, p^nu) e(-am/p^nu)`.
///
/// The Gauss sum depends on `a` only through `v_p(a)` and, at ramified
/// primes, the Legendre symbol of the unit part, so the roots of unity are
/// accumulated per class and each class is multiplied by its Gauss sum once.
pub fn rep_number_units(ctx: &Context, m: i64, p: u64, nu: u32, units: &[u64], d: u64) -> Result<Integer> {
    assert!(nu >= 1);
    let n = units.len() as u32;
    let q = p.pow(nu);
    let bits = ctx.bits() + magnitude_bits(p, n, nu) + 64;
    let table = root_table(q, bits);
    let ramified = d.is_multiple_of(p);
    let mr = m.rem_euclid(q as i64) as u128;
    let slot = |alpha: u32, leg: i32| (alpha as usize) * 2 + usize::from(leg < 0);
    let mut buckets = vec![ComplexVal::zero(bits); 2 * (nu as usize + 1)];
    for a in 0..q {
        let (alpha, a1) = split_alpha(a as i64, p, nu);
        let leg = if ramified && alpha < nu {
            kronecker(a1, p as i64)
        } else {
            1
        };
        let k = (q as u128 - (a as u128 * mr) % q as u128) % q as u128;
        let b = &mut buckets[slot(alpha, leg)];
        *b = &*b + &table[k as usize];
    }
    let mut total = ComplexVal::zero(bits);
    for alpha in 0..=nu {
        for leg in [1, -1] {
            if leg < 0 && !(ramified && alpha < nu) {
                continue;
            }
            let unit = if leg < 0 { least_nonresidue(p) as i64 } else { 1 };
            let a = unit * p.pow(alpha) as i64;
            let g = lattice_gauss_exact(a, p, nu, units, d).to_complex(bits);
            total = total + &g * &buckets[slot(alpha, leg)];
        }
    }
    let val = total.scale(&Real::from_i64(bits, q as i64).recip());
    let (rounded, resid) = val
        .re
        .round_integer()
        .ok_or_else(|| Error::NonIntegral("non-finite inversion".into()))?;
    let resid = resid.abs().max(val.im.abs());
    if resid > Real::from_f64(bits, 1e-20) {
        return Err(Error::NonIntegral(format!("{:e}", resid.to_f64())));
    }
    Ok(rounded)
}

pub fn rep_number(ctx: &Context, m: i64, p: u64, nu: u32, spec: &SpaceSpec) -> Result<Integer> {
    rep_number_units(ctx, m, p, nu, &local_units(spec, p), spec.d())
}

/// `N_m(p^nu)` by counting points.
pub fn rep_number_enum(m: i64, p: u64, nu: u32, spec: &SpaceSpec) -> Result<Integer> {
    let q = p.pow(nu);
    let hist = enumerate_norms(q, spec.d(), &local_units(spec, p))?;
    Ok(Integer::from(hist[m.rem_euclid(q as i64) as usize]))
}

/// Polynomial `sum c_j X^j` in `X = p^-s`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EulerFactorPoly {
    pub p: u64,
    #[serde(serialize_with = "crate::report::ser_rational_vec")]
    pub coeffs: Vec<Rational>,
}

impl EulerFactorPoly {
    fn from_ints(p: u64, c: Vec<Integer>) -> Self {
        let mut coeffs: Vec<Rational> = c.into_iter().map(Rational::from).collect();
        while coeffs.len() > 1 && *coeffs.last().unwrap() == 0 {
            coeffs.pop();
        }
        EulerFactorPoly { p, coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval_rational(&self, x: &Rational) -> Rational {
        let mut acc = Rational::new();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_real(&self, x: &Real) -> Real {
        let bits = x.prec();
        let mut acc = Real::zero(bits);
        for c in self.coeffs.iter().rev() {
            acc = acc * x + Real::from_rational(bits, c);
        }
        acc
    }

    pub fn eval_jet(&self, x: &Jet) -> Jet {
        let bits = x.prec();
        let mut acc = Jet::constant(Real::zero(bits));
        for c in self.coeffs.iter().rev() {
            acc = (&acc * x).add_const(&Real::from_rational(bits, c));
        }
        acc
    }

    pub fn render(&self) -> String {
        let mut parts = Vec::new();
        for (j, c) in self.coeffs.iter().enumerate() {
            if *c == 0 {
                continue;
            }
            parts.push(match j {
                0 => c.to_string(),
                1 => format!("{c}*X"),
                _ => format!("{c}*X^{j}"),
            });
        }
        parts.join(" + ").replace("+ -", "- ")
    }
}

/// `chi_F(p) = eps(p)^n`, with `eps^even` trivial.
pub fn chi_f(spec: &SpaceSpec, p: u64) -> i32 {
    if spec.n.is_multiple_of(2) {
        1
    } else {
        kronecker(-(spec.d() as i64), p as i64)
    }
}

fn pow_i(p: u64, e: u32) -> Integer {
    Integer::from(p).pow(e)
}

/// `L^(p)_m(X)` in closed form.
pub fn euler_factor(spec: &SpaceSpec, p: u64, m: i64) -> Result<EulerFactorPoly> {
    if m == 0 {
        return Err(Error::InvalidInput("Euler factor needs m != 0".into()));
    }
    let n = spec.n;
    let beta = valuation(m, p);
    let m1 = m / p.pow(beta) as i64;
    let ramified = spec.d().is_multiple_of(p);
    let b = beta as usize;
    let mut c = vec![Integer::new(); b + 2];
    if n.is_multiple_of(2) {
        if !ramified {
            // (1 - p^(n-1) X) sum_{g<=beta} p^(n g) X^g
            for g in 0..=b {
                c[g] += pow_i(p, n * g as u32);
                c[g + 1] -= pow_i(p, n * g as u32 + n - 1);
            }
        } else {
            let sign = kronecker(-1, p as i64).pow(n / 2) * spec.inv_at(p);
            let cc = pow_i(p, n / 2) * sign;
            c[0] += 1;
            c[1] -= Integer::from(&cc * &pow_i(p, n - 1));
            for g in 1..=b {
                let t = Integer::from(&cc * &pow_i(p, n * g as u32));
                c[g + 1] -= Integer::from(&t * &pow_i(p, n - 1));
                c[g] += t;
            }
        }
    } else if !ramified {
        let chi = kronecker(-(spec.d() as i64), p as i64);
        for g in 0..=b {
            let s = chi.pow(g as u32);
            c[g] += pow_i(p, n * g as u32) * s;
            c[g + 1] -= pow_i(p, n * g as u32 + n - 1) * s * chi;
        }
    } else {
        let d1 = (spec.d() / p) as i64;
        let mut sign = spec.inv_at(p) * kronecker(-1, p as i64).pow((n - 1) / 2);
        sign *= kronecker(d1, p as i64).pow(beta) * kronecker(m1, p as i64);
        c[0] += 1;
        c[b + 1] += pow_i(p, beta * n + (3 * n - 1) / 2) * sign;
    }
    Ok(EulerFactorPoly::from_ints(p, c))
}

/// `(1 - p^(2n-1) X) sum_{nu <= nu_max} N_m(p^nu) X^nu` at a rational `X`,
/// the truncated series that defines the Euler factor.
pub fn euler_series(ctx: &Context, spec: &SpaceSpec, p: u64, m: i64, x: &Rational, nu_max: u32) -> Result<Rational> {
    let mut acc = Rational::from(1);
    let mut xp = Rational::from(1);
    for nu in 1..=nu_max {
        xp *= x;
        let nm = rep_number(ctx, m, p, nu, spec)?;
        acc += Rational::from(nm) * &xp;
    }
    let lead = Rational::from(pow_i(p, 2 * spec.n - 1)) * x;
    Ok(acc * (Rational::from(1) - lead))
}
