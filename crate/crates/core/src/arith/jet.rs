//! First-order jets `f(s0) + f'(s0) ds` over [`Real`].
//!
//! Every s-dependent quantity in the crate is carried as a `Jet`, so the
//! derivative at the expansion point comes out of the same evaluation as
//! the value.

use std::ops::{Add, Div, Mul, Neg, Sub};

use super::real::{Context, Real};

#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    pub val: Real,
    pub der: Real,
}

impl Jet {
    pub fn new(val: Real, der: Real) -> Self {
        Jet { val, der }
    }

    /// The constant `c` (zero derivative).
    pub fn constant(c: Real) -> Self {
        let der = c.same(0);
        Jet { val: c, der }
    }

    /// The independent variable at `s0`.
    pub fn variable(s0: Real) -> Self {
        let der = s0.same(1);
        Jet { val: s0, der }
    }

    pub fn var_at(ctx: &Context, s0: i64) -> Self {
        Jet::variable(ctx.real(s0))
    }

    pub fn prec(&self) -> u32 {
        self.val.prec().min(self.der.prec())
    }

    pub fn one_like(&self) -> Jet {
        Jet::constant(self.val.same(1))
    }

    pub fn scale(&self, k: &Real) -> Jet {
        Jet::new(&self.val * k, &self.der * k)
    }

    pub fn scale_i(&self, k: i64) -> Jet {
        Jet::new(&self.val * k, &self.der * k)
    }

    pub fn add_const(&self, k: &Real) -> Jet {
        Jet::new(&self.val + k, self.der.clone())
    }

    pub fn add_i(&self, k: i64) -> Jet {
        Jet::new(&self.val + k, self.der.clone())
    }

    pub fn exp(&self) -> Jet {
        let e = self.val.exp();
        let d = &e * &self.der;
        Jet::new(e, d)
    }

    pub fn ln(&self) -> Jet {
        Jet::new(self.val.ln(), &self.der / &self.val)
    }

    pub fn recip(&self) -> Jet {
        let inv = self.val.recip();
        let d = -(&self.der * &inv * &inv);
        Jet::new(inv, d)
    }

    /// `self^k` for a fixed integer exponent.
    pub fn powi(&self, k: i32) -> Jet {
        if k == 0 {
            return self.one_like();
        }
        let v = self.val.powi(k);
        let d = self.val.powi(k - 1) * k as i64 * &self.der;
        Jet::new(v, d)
    }

    /// `self^e` with both base and exponent varying; requires `self.val > 0`.
    pub fn pow(&self, e: &Jet) -> Jet {
        (e * &self.ln()).exp()
    }

    /// `base^e` for a fixed positive base.
    pub fn base_pow(base: &Real, e: &Jet) -> Jet {
        let lb = base.ln();
        let v = base.powf(&e.val);
        let d = &v * &lb * &e.der;
        Jet::new(v, d)
    }

    /// `n^e` for a positive integer base.
    pub fn int_pow(n: u64, e: &Jet) -> Jet {
        Jet::base_pow(&Real::from_i64(e.prec(), n as i64), e)
    }

    /// Gamma function; at positive integers the value and the digamma
    /// factor are formed exactly (factorial, harmonic number minus gamma).
    pub fn gamma(&self) -> Jet {
        let (g, psi) = gamma_digamma(&self.val);
        let d = &g * &psi * &self.der;
        Jet::new(g, d)
    }

    /// `f'/f`.
    pub fn dlog(&self) -> Real {
        &self.der / &self.val
    }
}

/// `(Gamma(x), psi(x))`, exact up to Euler's constant at positive integers.
pub fn gamma_digamma(x: &Real) -> (Real, Real) {
    let bits = x.prec();
    if let Some(k) = positive_integer(x) {
        let mut fact = rug::Integer::from(1);
        let mut harmonic = rug::Rational::from(0);
        for j in 1..k {
            fact *= j;
            harmonic += rug::Rational::from((1, j));
        }
        let g = Real::from_integer(bits, &fact);
        let psi = Real::from_rational(bits, &harmonic) - Real::euler_gamma(bits);
        (g, psi)
    } else {
        (x.gamma(), x.digamma())
    }
}

fn positive_integer(x: &Real) -> Option<u64> {
    let f = x.as_float();
    if f.is_integer() && *f > 0 && *f < 1_000_000 {
        f.to_integer().and_then(|i| i.to_u64())
    } else {
        None
    }
}

impl Add<&Jet> for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        Jet::new(&self.val + &rhs.val, &self.der + &rhs.der)
    }
}

impl Sub<&Jet> for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        Jet::new(&self.val - &rhs.val, &self.der - &rhs.der)
    }
}

impl Mul<&Jet> for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        Jet::new(&self.val * &rhs.val, &self.val * &rhs.der + &self.der * &rhs.val)
    }
}

impl Div<&Jet> for &Jet {
    type Output = Jet;
    fn div(self, rhs: &Jet) -> Jet {
        let q = &self.val / &rhs.val;
        let d = (&self.der - &q * &rhs.der) / &rhs.val;
        Jet::new(q, d)
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet::new(-&self.val, -&self.der)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        -&self
    }
}

macro_rules! jet_owned {
    ($tr:ident, $method:ident, $op:tt) => {
        impl $tr<Jet> for Jet {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                (&self) $op (&rhs)
            }
        }
        impl $tr<&Jet> for Jet {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                (&self) $op rhs
            }
        }
        impl $tr<Jet> for &Jet {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                self $op (&rhs)
            }
        }
    };
}

jet_owned!(Add, add, +);
jet_owned!(Sub, sub, -);
jet_owned!(Mul, mul, *);
jet_owned!(Div, div, /);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_rule() {
        let ctx = Context::default();
        let s = Jet::variable(ctx.f64(0.75));
        let f = &s * &s.exp();
        // d/ds (s e^s) = (1 + s) e^s
        let expect = ctx.f64(1.75) * ctx.f64(0.75).exp();
        assert!((&f.der - &expect).abs() < ctx.tol(2));
    }

    #[test]
    fn gamma_at_integers_is_exact() {
        let ctx = Context::default();
        let g = Jet::variable(ctx.real(3)).gamma();
        assert_eq!(g.val, ctx.real(2));
        // Gamma'(3) = 2 (3/2 - gamma)
        let expect = ctx.real(2) * (ctx.f64(1.5) - ctx.euler_gamma());
        assert!((&g.der - &expect).abs() < ctx.tol(2));
    }
}
