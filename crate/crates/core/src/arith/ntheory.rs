//! Elementary number theory: factorisation, Kronecker and Hilbert symbols,
//! Moebius function, divisor sums.

use rug::{Integer, Rational};

use super::jet::Jet;
use super::real::{ComplexVal, Real};
use crate::error::{Error, Result};

/// Prime factorisation by trial division, as `(p, e)` pairs in increasing order.
pub fn factor(mut n: u64) -> Vec<(u64, u32)> {
    assert!(n >= 1, "factor of zero");
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn prime_divisors(n: u64) -> Vec<u64> {
    factor(n).into_iter().map(|(p, _)| p).collect()
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factor(n) == [(n, 1)]
}

pub fn is_squarefree(n: u64) -> bool {
    factor(n).iter().all(|&(_, e)| e == 1)
}

/// Positive divisors in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut ds = vec![1u64];
    for (p, e) in factor(n) {
        let len = ds.len();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                ds.push(ds[i] * pk);
            }
        }
    }
    ds.sort_unstable();
    ds
}

/// `p`-adic valuation of a nonzero integer.
pub fn valuation(n: i64, p: u64) -> u32 {
    assert!(n != 0, "valuation of zero");
    let mut n = n.unsigned_abs();
    let mut v = 0;
    while n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    v
}

/// Moebius function.
pub fn moebius(n: u64) -> i32 {
    assert!(n >= 1, "moebius of zero");
    let f = factor(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Jacobi symbol `(a/n)` for odd positive `n`.
fn jacobi(a: i64, n: u64) -> i32 {
    debug_assert!(n % 2 == 1);
    let mut a = a.rem_euclid(n as i64) as u64;
    let mut n = n;
    let mut t = 1;
    while a != 0 {
        while a.is_multiple_of(2) {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

/// Kronecker symbol `(a/b)`, extended to all integers `b` by the usual
/// conventions: `(a/2)` from `a mod 8`, `(a/-1) = sign(a)`, `(a/0) = [a = +-1]`.
pub fn kronecker(a: i64, b: i64) -> i32 {
    if b == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut result = 1;
    let mut b = b;
    if b < 0 {
        b = -b;
        if a < 0 {
            result = -result;
        }
    }
    let mut b = b as u64;
    let twos = b.trailing_zeros();
    if twos > 0 {
        if a % 2 == 0 {
            return 0;
        }
        if twos % 2 == 1 {
            let r = a.rem_euclid(8);
            if r == 3 || r == 5 {
                result = -result;
            }
        }
        b >>= twos;
    }
    if b == 1 {
        return result;
    }
    result * jacobi(a, b)
}

/// A place of the rationals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Place {
    Finite(u64),
    Infinity,
}

fn int_valuation(n: &Integer, p: u64) -> (u32, Integer) {
    let mut u = n.clone();
    let mut v = 0;
    while u.is_divisible_u(p as u32) {
        u /= p as u32;
        v += 1;
    }
    (v, u)
}

fn legendre_big(u: &Integer, p: u64) -> i32 {
    let r = Integer::from(u.mod_u(p as u32));
    kronecker(r.to_i64().unwrap(), p as i64)
}

/// Hilbert symbol `(a, b)_v` for nonzero rationals.
///
/// Each rational is replaced by `num * den`, which lies in the same square
/// class; the odd-prime and dyadic cases then use the unit/valuation formulas.
pub fn hilbert_symbol(a: &Rational, b: &Rational, place: Place) -> i32 {
    assert!(*a != 0 && *b != 0, "Hilbert symbol of zero");
    let a = Integer::from(a.numer() * a.denom());
    let b = Integer::from(b.numer() * b.denom());
    match place {
        Place::Infinity => {
            if a < 0 && b < 0 {
                -1
            } else {
                1
            }
        }
        Place::Finite(2) => {
            let (alpha, u) = int_valuation(&a, 2);
            let (beta, v) = int_valuation(&b, 2);
            let u8 = u.mod_u(8) as i64;
            let v8 = v.mod_u(8) as i64;
            let eps = |x: i64| ((x - 1) / 2) % 2;
            let omega = |x: i64| ((x * x - 1) / 8) % 2;
            let e = eps(u8) * eps(v8) + alpha as i64 * omega(v8) + beta as i64 * omega(u8);
            if e % 2 == 0 {
                1
            } else {
                -1
            }
        }
        Place::Finite(p) => {
            let (alpha, u) = int_valuation(&a, p);
            let (beta, v) = int_valuation(&b, p);
            let mut s = 1;
            if (alpha as u64 * beta as u64 * ((p - 1) / 2)) % 2 == 1 {
                s = -s;
            }
            if beta % 2 == 1 {
                s *= legendre_big(&u, p);
            }
            if alpha % 2 == 1 {
                s *= legendre_big(&v, p);
            }
            s
        }
    }
}

/// Hilbert symbol for small integers.
pub fn hilbert_int(a: i64, b: i64, place: Place) -> i32 {
    hilbert_symbol(&Rational::from(a), &Rational::from(b), place)
}

/// `epsilon_r`: `1` if `r = 1 mod 4`, `i` if `r = 3 mod 4`.
pub fn epsilon_factor(bits: u32, r: u64) -> Result<ComplexVal> {
    if r.is_multiple_of(2) {
        return Err(Error::InvalidInput(format!(
            "epsilon factor needs an odd modulus, got {r}"
        )));
    }
    Ok(if r % 4 == 1 {
        ComplexVal::one(bits)
    } else {
        ComplexVal::i(bits)
    })
}

/// Exponent `k` with `epsilon_r = i^k`.
pub fn epsilon_exponent(r: u64) -> i64 {
    if r % 4 == 1 {
        0
    } else {
        1
    }
}

/// `sigma_{s,chi}(m) = sum_{d | m} chi(d) d^s` as a jet in `s`.
pub fn divisor_sum(m: u64, s: &Jet, chi: Option<&dyn Fn(u64) -> i32>) -> Jet {
    assert!(m >= 1, "divisor sum of zero");
    let mut acc = Jet::constant(Real::zero(s.prec()));
    for d in divisors(m) {
        let c = chi.map_or(1, |f| f(d));
        if c == 0 {
            continue;
        }
        acc = &acc + &Jet::int_pow(d, s).scale_i(c as i64);
    }
    acc
}

/// Least positive quadratic non-residue modulo an odd prime.
pub fn least_nonresidue(p: u64) -> u64 {
    (2..p)
        .find(|&u| kronecker(u as i64, p as i64) == -1)
        .expect("odd prime has a non-residue")
}

/// Least prime `p = 1 mod m`.
pub fn least_prime_one_mod(m: u64) -> u64 {
    (1..).map(|k| k * m + 1).find(|&p| is_prime(p)).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::real::Context;

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker(-7, 3), -1);
        assert_eq!(kronecker(2, 7), 1);
        for m in 1..50 {
            assert_eq!(kronecker(1, m), 1);
        }
        assert_eq!(kronecker(-15, 2), 1);
        assert_eq!(kronecker(-7, 2), 1);
        assert_eq!(kronecker(-3, 2), -1);
    }

    #[test]
    fn kronecker_matches_euler_criterion() {
        for p in [3u64, 5, 7, 11, 13, 29] {
            for a in -40i64..40 {
                let r = a.rem_euclid(p as i64) as u64;
                let expect = if r == 0 {
                    0
                } else {
                    let mut acc = 1u64;
                    for _ in 0..(p - 1) / 2 {
                        acc = acc * r % p;
                    }
                    if acc == 1 {
                        1
                    } else {
                        -1
                    }
                };
                assert_eq!(kronecker(a, p as i64), expect, "({a}/{p})");
            }
        }
    }

    #[test]
    fn moebius_examples() {
        assert_eq!(moebius(1), 1);
        assert_eq!(moebius(12), 0);
        assert_eq!(moebius(105), -1);
        assert_eq!(moebius(6), 1);
    }

    #[test]
    fn hilbert_examples() {
        assert_eq!(hilbert_int(29, -7, Place::Finite(7)), 1);
        assert_eq!(hilbert_int(-1, -1, Place::Finite(2)), -1);
        assert_eq!(hilbert_int(-1, -1, Place::Infinity), -1);
        for a in [2i64, -3, 5, 14, -21] {
            for p in [2u64, 3, 5, 7] {
                assert_eq!(hilbert_int(a, -a, Place::Finite(p)), 1);
            }
        }
    }

    #[test]
    fn divisor_sum_examples() {
        let ctx = Context::default();
        let s = Jet::var_at(&ctx, 0);
        let sig = divisor_sum(6, &s, None);
        assert_eq!(sig.val, ctx.real(4));
        let expect = ctx.real(6).ln() + ctx.real(2).ln() + ctx.real(3).ln();
        assert!((&sig.der - &expect).abs() < ctx.tol(2));

        let one = divisor_sum(1, &Jet::variable(ctx.f64(1.3)), None);
        assert_eq!(one.val, ctx.real(1));
        assert!(one.der.is_zero());

        let eps7 = |d: u64| kronecker(d as i64, 7);
        let twisted = divisor_sum(29, &s, Some(&eps7));
        assert_eq!(twisted.val, ctx.real(2));
    }

    #[test]
    fn epsilon_factor_cases() {
        assert_eq!(epsilon_factor(64, 1).unwrap(), ComplexVal::one(64));
        assert_eq!(epsilon_factor(64, 7).unwrap(), ComplexVal::i(64));
        assert_eq!(epsilon_factor(64, 45).unwrap(), ComplexVal::one(64));
        assert!(epsilon_factor(64, 4).is_err());
    }

    #[test]
    fn divisors_and_factor() {
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(factor(231), vec![(3, 1), (7, 1), (11, 1)]);
        assert_eq!(least_nonresidue(7), 3);
        assert_eq!(least_nonresidue(5), 2);
        assert_eq!(least_prime_one_mod(7), 29);
    }
}
