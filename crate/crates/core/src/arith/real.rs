//! Arbitrary-precision reals and complex numbers.
//!
//! A [`Real`] is an MPFR float tagged with its binary precision. Binary
//! operations produce a result at the smaller of the two operand
//! precisions, so a low-precision value can never be silently promoted.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

/// Extra binary digits carried beyond the requested decimal precision.
pub const GUARD_BITS: u32 = 40;

/// Working-precision configuration, fixed when the context is created.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Context {
    digits: u32,
}

impl Default for Context {
    fn default() -> Self {
        Context::new(60)
    }
}

impl Context {
    pub const DEFAULT_DIGITS: u32 = 60;

    pub fn new(digits: u32) -> Self {
        assert!(digits >= 1, "precision must be positive");
        Context { digits }
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    /// Binary precision used for every value created through this context.
    pub fn bits(&self) -> u32 {
        digits_to_bits(self.digits) + GUARD_BITS
    }

    /// `10^(k - digits)`: the relative tolerance scale used throughout.
    pub fn tol(&self, k: i32) -> Real {
        Real::from_i64(self.bits(), 10).powi(k - self.digits as i32)
    }

    pub fn real(&self, v: i64) -> Real {
        Real::from_i64(self.bits(), v)
    }

    pub fn rat(&self, q: &Rational) -> Real {
        Real::from_rational(self.bits(), q)
    }

    pub fn f64(&self, v: f64) -> Real {
        Real::from_f64(self.bits(), v)
    }

    pub fn pi(&self) -> Real {
        Real::pi(self.bits())
    }

    pub fn euler_gamma(&self) -> Real {
        Real::euler_gamma(self.bits())
    }

    /// A context with `extra` more decimal digits.
    pub fn widened(&self, extra: u32) -> Context {
        Context::new(self.digits + extra)
    }
}

pub fn digits_to_bits(digits: u32) -> u32 {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as u32
}

#[derive(Clone, Debug)]
pub struct Real(Float);

impl Real {
    pub fn from_float(f: Float) -> Self {
        Real(f)
    }

    pub fn from_i64(bits: u32, v: i64) -> Self {
        Real(Float::with_val(bits, v))
    }

    pub fn from_f64(bits: u32, v: f64) -> Self {
        Real(Float::with_val(bits, v))
    }

    pub fn from_integer(bits: u32, v: &Integer) -> Self {
        Real(Float::with_val(bits, v))
    }

    pub fn from_rational(bits: u32, q: &Rational) -> Self {
        Real(Float::with_val(bits, q))
    }

    pub fn zero(bits: u32) -> Self {
        Real::from_i64(bits, 0)
    }

    pub fn one(bits: u32) -> Self {
        Real::from_i64(bits, 1)
    }

    pub fn pi(bits: u32) -> Self {
        Real(Float::with_val(bits, Constant::Pi))
    }

    pub fn euler_gamma(bits: u32) -> Self {
        Real(Float::with_val(bits, Constant::Euler))
    }

    pub fn ln2(bits: u32) -> Self {
        Real(Float::with_val(bits, Constant::Log2))
    }

    pub fn prec(&self) -> u32 {
        self.0.prec()
    }

    pub fn as_float(&self) -> &Float {
        &self.0
    }

    pub fn into_float(self) -> Float {
        self.0
    }

    /// Same value at a different binary precision.
    pub fn with_prec(&self, bits: u32) -> Real {
        Real(Float::with_val(bits, &self.0))
    }

    /// Same precision as `self`, holding `v`.
    pub fn same(&self, v: i64) -> Real {
        Real::from_i64(self.prec(), v)
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.0.is_finite()
    }

    pub fn signum(&self) -> i32 {
        match self.0.cmp0() {
            Some(Ordering::Less) => -1,
            Some(Ordering::Greater) => 1,
            _ => 0,
        }
    }

    pub fn abs(&self) -> Real {
        Real(self.0.clone().abs())
    }

    pub fn sqrt(&self) -> Real {
        Real(self.0.clone().sqrt())
    }

    pub fn exp(&self) -> Real {
        Real(self.0.clone().exp())
    }

    pub fn ln(&self) -> Real {
        Real(self.0.clone().ln())
    }

    pub fn recip(&self) -> Real {
        Real(self.0.clone().recip())
    }

    pub fn sin_cos(&self) -> (Real, Real) {
        let (s, c) = self.0.clone().sin_cos(Float::new(self.prec()));
        (Real(s), Real(c))
    }

    pub fn powi(&self, k: i32) -> Real {
        Real(Float::with_val(self.prec(), (&self.0).pow(k)))
    }

    pub fn powf(&self, e: &Real) -> Real {
        let bits = self.prec().min(e.prec());
        Real(Float::with_val(bits, (&self.0).pow(&e.0)))
    }

    pub fn gamma(&self) -> Real {
        Real(self.0.clone().gamma())
    }

    pub fn ln_gamma(&self) -> Real {
        Real(self.0.clone().ln_gamma())
    }

    pub fn digamma(&self) -> Real {
        Real(self.0.clone().digamma())
    }

    pub fn floor_integer(&self) -> Option<Integer> {
        self.0.clone().floor().to_integer()
    }

    /// Nearest integer together with the absolute residual.
    pub fn round_integer(&self) -> Option<(Integer, Real)> {
        let r = self.0.clone().round();
        let n = r.to_integer()?;
        let resid = Real(Float::with_val(self.prec(), &self.0 - &r)).abs();
        Some((n, resid))
    }

    pub fn max(self, other: Real) -> Real {
        if self >= other {
            self
        } else {
            other
        }
    }

    /// Decimal rendering with `digits` significant digits.
    pub fn to_string_digits(&self, digits: u32) -> String {
        if self.0.is_zero() {
            return "0".to_string();
        }
        self.0.to_string_radix(10, Some(digits as usize))
    }

    /// Best rational approximation with denominator at most `max_den`,
    /// by continued fractions.
    pub fn to_rational_approx(&self, max_den: &Integer) -> Option<Rational> {
        if !self.0.is_finite() {
            return None;
        }
        let exact = self.0.to_rational()?;
        let (mut h0, mut h1) = (Integer::from(0), Integer::from(1));
        let (mut k0, mut k1) = (Integer::from(1), Integer::from(0));
        let mut x = exact;
        loop {
            let a = x.clone().floor().into_numer_denom().0;
            let h2 = Integer::from(&a * &h1) + &h0;
            let k2 = Integer::from(&a * &k1) + &k0;
            if &k2 > max_den {
                break;
            }
            h0 = std::mem::replace(&mut h1, h2);
            k0 = std::mem::replace(&mut k1, k2);
            let frac = &x - Rational::from(a);
            if frac == 0 {
                break;
            }
            x = frac.recip();
        }
        if k1 == 0 {
            return None;
        }
        Some(Rational::from((h1, k1)))
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

impl PartialEq<i64> for Real {
    fn eq(&self, other: &i64) -> bool {
        self.0 == *other
    }
}

impl PartialOrd<i64> for Real {
    fn partial_cmp(&self, other: &i64) -> Option<Ordering> {
        self.0.partial_cmp(other)
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = (self.prec().saturating_sub(GUARD_BITS) as f64 / std::f64::consts::LOG2_10)
            .floor()
            .max(1.0) as u32;
        f.write_str(&self.to_string_digits(digits))
    }
}

macro_rules! real_binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl $tr<&Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                let bits = self.prec().min(rhs.prec());
                Real(Float::with_val(bits, &self.0 $op &rhs.0))
            }
        }
        impl $tr<Real> for Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                (&self) $op (&rhs)
            }
        }
        impl $tr<&Real> for Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                (&self) $op rhs
            }
        }
        impl $tr<Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                self $op (&rhs)
            }
        }
        impl $tr<i64> for &Real {
            type Output = Real;
            fn $method(self, rhs: i64) -> Real {
                Real(Float::with_val(self.prec(), &self.0 $op rhs))
            }
        }
        impl $tr<i64> for Real {
            type Output = Real;
            fn $method(self, rhs: i64) -> Real {
                (&self) $op rhs
            }
        }
    };
}

real_binop!(Add, add, +);
real_binop!(Sub, sub, -);
real_binop!(Mul, mul, *);
real_binop!(Div, div, /);

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(-self.0)
    }
}

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(Float::with_val(self.prec(), -&self.0))
    }
}

impl std::iter::Sum for Real {
    fn sum<I: Iterator<Item = Real>>(mut iter: I) -> Real {
        let first = iter.next().expect("sum of an empty Real iterator has no precision");
        iter.fold(first, |acc, x| acc + x)
    }
}

/// Sum with a fixed pairwise reduction tree, independent of thread count.
pub fn pairwise_sum(terms: &[Real]) -> Option<Real> {
    match terms.len() {
        0 => None,
        1 => Some(terms[0].clone()),
        n => {
            let (l, r) = terms.split_at(n / 2);
            Some(pairwise_sum(l)? + pairwise_sum(r)?)
        }
    }
}

/// Complex number with [`Real`] components.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexVal {
    pub re: Real,
    pub im: Real,
}

impl ComplexVal {
    pub fn new(re: Real, im: Real) -> Self {
        ComplexVal { re, im }
    }

    pub fn real(re: Real) -> Self {
        let im = re.same(0);
        ComplexVal { re, im }
    }

    pub fn zero(bits: u32) -> Self {
        ComplexVal::new(Real::zero(bits), Real::zero(bits))
    }

    pub fn one(bits: u32) -> Self {
        ComplexVal::new(Real::one(bits), Real::zero(bits))
    }

    pub fn i(bits: u32) -> Self {
        ComplexVal::new(Real::zero(bits), Real::one(bits))
    }

    /// `i^k`.
    pub fn i_pow(bits: u32, k: i64) -> Self {
        match k.rem_euclid(4) {
            0 => ComplexVal::one(bits),
            1 => ComplexVal::i(bits),
            2 => ComplexVal::real(Real::from_i64(bits, -1)),
            _ => ComplexVal::new(Real::zero(bits), Real::from_i64(bits, -1)),
        }
    }

    /// `e(x) = exp(2 pi i x)`.
    pub fn e(x: &Real) -> Self {
        let theta = Real::pi(x.prec()) * 2 * x;
        let (s, c) = theta.sin_cos();
        ComplexVal::new(c, s)
    }

    /// `e(num/den)` with the fraction reduced before scaling.
    pub fn e_frac(bits: u32, num: i64, den: i64) -> Self {
        let r = num.rem_euclid(den);
        ComplexVal::e(&(Real::from_i64(bits, r) / den))
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().min(self.im.prec())
    }

    pub fn conj(&self) -> Self {
        ComplexVal::new(self.re.clone(), -&self.im)
    }

    pub fn scale(&self, k: &Real) -> Self {
        ComplexVal::new(&self.re * k, &self.im * k)
    }

    pub fn scale_i(&self, k: i64) -> Self {
        ComplexVal::new(&self.re * k, &self.im * k)
    }

    pub fn norm_sqr(&self) -> Real {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn abs(&self) -> Real {
        self.norm_sqr().sqrt()
    }

    pub fn recip(&self) -> Self {
        let n = self.norm_sqr();
        ComplexVal::new(&self.re / &n, -(&self.im / &n))
    }

    pub fn powi(&self, k: u32) -> Self {
        let mut acc = ComplexVal::one(self.prec());
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }
}

impl Add<&ComplexVal> for &ComplexVal {
    type Output = ComplexVal;
    fn add(self, rhs: &ComplexVal) -> ComplexVal {
        ComplexVal::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub<&ComplexVal> for &ComplexVal {
    type Output = ComplexVal;
    fn sub(self, rhs: &ComplexVal) -> ComplexVal {
        ComplexVal::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul<&ComplexVal> for &ComplexVal {
    type Output = ComplexVal;
    fn mul(self, rhs: &ComplexVal) -> ComplexVal {
        ComplexVal::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Div<&ComplexVal> for &ComplexVal {
    type Output = ComplexVal;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: &ComplexVal) -> ComplexVal {
        self * &rhs.recip()
    }
}

impl Neg for &ComplexVal {
    type Output = ComplexVal;
    fn neg(self) -> ComplexVal {
        ComplexVal::new(-&self.re, -&self.im)
    }
}

macro_rules! complex_owned {
    ($tr:ident, $method:ident, $op:tt) => {
        impl $tr<ComplexVal> for ComplexVal {
            type Output = ComplexVal;
            fn $method(self, rhs: ComplexVal) -> ComplexVal {
                (&self) $op (&rhs)
            }
        }
        impl $tr<&ComplexVal> for ComplexVal {
            type Output = ComplexVal;
            fn $method(self, rhs: &ComplexVal) -> ComplexVal {
                (&self) $op rhs
            }
        }
    };
}

complex_owned!(Add, add, +);
complex_owned!(Sub, sub, -);
complex_owned!(Mul, mul, *);
complex_owned!(Div, div, /);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precision_is_min_of_operands() {
        let a = Real::from_i64(100, 3);
        let b = Real::from_i64(300, 7);
        assert_eq!((&a + &b).prec(), 100);
        assert_eq!((&b * &a).prec(), 100);
    }

    #[test]
    fn rational_reconstruction() {
        let ctx = Context::default();
        let x = ctx.rat(&Rational::from((-5894, 7)));
        let q = x.to_rational_approx(&Integer::from(1_000_000)).unwrap();
        assert_eq!(q, Rational::from((-5894, 7)));
    }

    #[test]
    fn e_of_quarter_is_i() {
        let z = ComplexVal::e_frac(200, 1, 4);
        assert!(z.re.abs() < Real::from_f64(200, 1e-55));
        assert!((&z.im - 1i64).abs() < Real::from_f64(200, 1e-55));
    }
}
