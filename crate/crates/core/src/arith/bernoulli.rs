//! Bernoulli numbers (convention `B_1 = -1/2`), Bernoulli polynomials and
//! generalized Bernoulli numbers of real primitive characters.

use rug::ops::Pow;
use std::sync::{Mutex, OnceLock};

use rug::{Integer, Rational};

use crate::dirichlet::CharSpec;

fn table() -> &'static Mutex<Vec<Rational>> {
    static TABLE: OnceLock<Mutex<Vec<Rational>>> = OnceLock::new();
    TABLE.get_or_init(|| Mutex::new(vec![Rational::from(1)]))
}

pub fn binomial(n: u64, k: u64) -> Integer {
    Integer::from(Integer::binomial_u(n as u32, k as u32))
}

/// `B_k`.
pub fn bernoulli(k: usize) -> Rational {
    let mut t = table().lock().unwrap();
    while t.len() <= k {
        let m = t.len() as u64;
        let mut acc = Rational::from(0);
        for (j, b) in t.iter().enumerate() {
            acc += Rational::from(binomial(m + 1, j as u64) * b);
        }
        t.push(-acc / Rational::from(m + 1));
    }
    t[k].clone()
}

/// `B_k(x) = sum_j C(k, j) B_j x^(k - j)`.
pub fn bernoulli_poly(k: usize, x: &Rational) -> Rational {
    let mut acc = Rational::from(0);
    let mut xp = Rational::from(1);
    // accumulate from the highest power of B_j downwards: j = k .. 0
    for j in (0..=k).rev() {
        acc += Rational::from(binomial(k as u64, j as u64)) * bernoulli(j) * &xp;
        xp *= x;
    }
    acc
}

/// `B_{k,chi} = f^(k-1) sum_{a=1}^{f} chi(a) B_k(a/f)`; zero when the parity
/// of `chi` does not match `k`.
pub fn gen_bernoulli(k: usize, chi: &CharSpec) -> Rational {
    assert!(k >= 1);
    let f = chi.modulus();
    if f == 1 {
        // trivial character: B_{k,1} = B_k except B_{1,1} = +1/2
        return if k == 1 { Rational::from((1, 2)) } else { bernoulli(k) };
    }
    let parity_even = chi.eval(-1) == 1;
    if parity_even != k.is_multiple_of(2) {
        return Rational::from(0);
    }
    let mut acc = Rational::from(0);
    for a in 1..=f {
        let c = chi.eval(a as i64);
        if c == 0 {
            continue;
        }
        let b = bernoulli_poly(k, &Rational::from((a, f)));
        if c > 0 {
            acc += b;
        } else {
            acc -= b;
        }
    }
    acc * Rational::from(Integer::from(f).pow(k as u32 - 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_table() {
        assert_eq!(bernoulli(0), 1);
        assert_eq!(bernoulli(1), Rational::from((-1, 2)));
        assert_eq!(bernoulli(2), Rational::from((1, 6)));
        assert_eq!(bernoulli(3), 0);
        assert_eq!(bernoulli(4), Rational::from((-1, 30)));
        assert_eq!(bernoulli(12), Rational::from((-691, 2730)));
    }

    #[test]
    fn generalized_for_d7() {
        let eps = CharSpec::epsilon(7);
        assert_eq!(gen_bernoulli(3, &eps), Rational::from((48, 7)));
        assert_eq!(gen_bernoulli(2, &eps), 0);
        assert_eq!(gen_bernoulli(1, &eps), -1);
    }

    #[test]
    fn generalized_direct_sum_oracle() {
        // B_{3,eps} for D = 7 by summing the cubic polynomial directly:
        // B_3(x) = x^3 - 3/2 x^2 + 1/2 x.
        let eps = CharSpec::epsilon(7);
        let mut acc = Rational::from(0);
        for a in 1..=7i64 {
            let x = Rational::from((a, 7));
            let b3 = x.clone() * &x * &x - Rational::from((3, 2)) * &x * &x + Rational::from((1, 2)) * &x;
            acc += b3 * eps.eval(a);
        }
        acc *= 49;
        assert_eq!(acc, gen_bernoulli(3, &eps));
    }

    #[test]
    fn parity_rule() {
        for d in [3u64, 7, 11, 15, 23] {
            let eps = CharSpec::epsilon(d);
            for k in 1..8 {
                let z = gen_bernoulli(k, &eps) == 0;
                // eps is odd, so the value vanishes exactly for even k
                assert_eq!(z, k % 2 == 0, "D={d} k={k}");
            }
        }
    }
}
