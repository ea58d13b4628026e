use proptest::prelude::*;
use rug::ops::Pow;
use shimura_vol::arith::bernoulli::gen_bernoulli;
use shimura_vol::arith::forms::class_number_by_forms;
use shimura_vol::arith::ntheory::{hilbert_int, is_prime, kronecker, least_prime_one_mod, prime_divisors, Place};
use shimura_vol::densities::{euler_factor, euler_series, rep_number};
use shimura_vol::dirichlet::{l_nonpositive_exact, l_value, make_field, CharSpec};
use shimura_vol::eisenstein::{coeff_b, coeff_b_jet, CoeffRequest};
use shimura_vol::spaces::{companion_space, enumerate_spaces, validate_space, SpaceSpec};
use shimura_vol::volume::{a_v_exact0, t_n, vol_c_hodge_mw, vol_c_k, vol_c_l};
use shimura_vol::{Context, Integer, Jet, Rational, Real};

fn ctx() -> Context {
    Context::default()
}

// F(s) = exp(a s) * log(s + b) * (s + c)^d / (s + b)
fn composite(s: &Jet, a: i64, b: i64, c: i64, d: i32) -> Jet {
    let e = s.scale_i(a).scale(&Real::from_f64(s.prec(), 0.1)).exp();
    let l = s.add_i(b).ln();
    let p = s.add_i(c).powi(d);
    &(&(&e * &l) * &p) / &s.add_i(b)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn jet_matches_centered_difference(a in -5i64..5, b in 2i64..6, c in 1i64..4, d in -3i32..4, x in 0.1f64..2.0) {
        let ctx = ctx();
        let s0 = ctx.f64(x);
        let j = composite(&Jet::variable(s0.clone()), a, b, c, d);
        let h = ctx.real(10).powi(-8);
        let up = composite(&Jet::constant(&s0 + &h), a, b, c, d).val;
        let dn = composite(&Jet::constant(&s0 - &h), a, b, c, d).val;
        let fd = (up - dn) / (h * 2);
        prop_assert!((j.der - fd).abs() < ctx.real(10).powi(-15));
    }

    #[test]
    fn hilbert_reciprocity(a in -2000i64..2000, b in -2000i64..2000) {
        prop_assume!(a != 0 && b != 0);
        let mut places = vec![Place::Infinity, Place::Finite(2)];
        for p in prime_divisors((a * b).unsigned_abs()) {
            if p != 2 {
                places.push(Place::Finite(p));
            }
        }
        let prod: i32 = places.into_iter().map(|v| hilbert_int(a, b, v)).product();
        prop_assert_eq!(prod, 1);
    }

    #[test]
    fn kronecker_multiplicative(a1 in -500i64..500, a2 in -500i64..500, b in -500i64..500) {
        prop_assume!(b != 0);
        prop_assert_eq!(kronecker(a1 * a2, b), kronecker(a1, b) * kronecker(a2, b));
    }

    #[test]
    fn companion_of_split_prime_is_valid(idx in 0usize..3, k in 0u64..4000) {
        let d = [7i64, 15, 23][idx];
        let field = make_field(d).unwrap();
        let p = (k..).map(|j| 2 * j + 3).find(|&p| is_prime(p) && kronecker(-d, p as i64) == 1).unwrap();
        for n in 3..=5 {
            for spec in enumerate_spaces(&field, n) {
                let c = companion_space(&spec, p).unwrap();
                prop_assert!(validate_space(&c).is_ok());
                prop_assert_eq!(c.n, n - 1);
            }
        }
    }
}

#[test]
fn bernoulli_parity() {
    for chi in [
        CharSpec::trivial(),
        CharSpec::epsilon(7),
        CharSpec::epsilon(15),
        CharSpec::epsilon(23),
    ] {
        let odd = !chi.is_even();
        for k in 1..=12usize {
            if chi.is_trivial() && k == 1 {
                continue;
            }
            let wrong_parity = odd != (k % 2 == 1);
            assert_eq!(gen_bernoulli(k, &chi) == 0, wrong_parity, "{chi:?} k={k}");
        }
    }
}

#[test]
fn continued_l_values_match_bernoulli() {
    let ctx = ctx();
    for chi in [CharSpec::trivial(), CharSpec::epsilon(7), CharSpec::epsilon(15)] {
        for k in 1..=8i64 {
            let s = Jet::var_at(&ctx, 1 - k);
            let l = l_value(&ctx, &chi, &s, &[]).unwrap().val;
            let exact = ctx.rat(&l_nonpositive_exact(&chi, 1 - k));
            assert!((&l - &exact).abs() < ctx.tol(5), "{chi:?} k={k}");
        }
    }
}

#[test]
fn class_numbers_from_forms() {
    for d in [3i64, 7, 11, 15, 19, 23, 31, 35, 39] {
        let f = make_field(d).unwrap();
        assert_eq!(f.h, class_number_by_forms(d as u64), "D={d}");
    }
}

#[test]
fn completed_l_function_is_symmetric() {
    let ctx = ctx();
    for d in [7u64, 15, 23] {
        let chi = CharSpec::epsilon(d);
        let lam = |s: &Real| {
            let l = l_value(&ctx, &chi, &Jet::constant(s.clone()), &[]).unwrap().val;
            let half = (s + 1) / 2;
            (ctx.real(d as i64) / ctx.pi()).powf(&half) * half.gamma() * l
        };
        for x in [0.3, 0.7] {
            let s = ctx.f64(x);
            let e = (lam(&s) - lam(&(ctx.real(1) - &s))).abs();
            assert!(e < ctx.tol(5), "D={d} s={x}");
        }
    }
}

#[test]
fn depletion_is_multiplicative() {
    let ctx = ctx();
    let s = Jet::variable(ctx.f64(2.5));
    for chi in [CharSpec::trivial(), CharSpec::epsilon(15)] {
        let base = l_value(&ctx, &chi, &s, &[3]).unwrap();
        let both = l_value(&ctx, &chi, &s, &[3, 5, 7]).unwrap();
        let mut expect = base;
        for l in [5u64, 7] {
            let f = Jet::int_pow(l, &s.scale_i(-1))
                .scale_i(-(chi.eval(l as i64) as i64))
                .add_i(1);
            expect = &expect * &f;
        }
        assert!((&both.val - &expect.val).abs() < ctx.tol(5));
        assert!((&both.der - &expect.der).abs() < ctx.tol(5));
    }
}

#[test]
fn space_enumeration_and_companions() {
    for d in [7i64, 15, 23, 35, 195] {
        let field = make_field(d).unwrap();
        let p = least_prime_one_mod(d as u64);
        for n in 1..=5 {
            let all = enumerate_spaces(&field, n);
            assert_eq!(all.len(), 1 << (field.o_d - 1), "D={d} n={n}");
            for spec in all {
                validate_space(&spec).unwrap();
                if n >= 3 {
                    let c = companion_space(&spec, p).unwrap();
                    assert_eq!(c.inv, spec.inv);
                    assert_eq!(c.n, n - 1);
                }
            }
        }
    }
}

#[test]
fn euler_series_through_six() {
    let ctx = ctx();
    for d in [7i64, 15] {
        let field = make_field(d).unwrap();
        for n in 1..=4 {
            for spec in enumerate_spaces(&field, n) {
                for p in [3u64, 5, 7] {
                    let x = Rational::from((1, Integer::from(p).pow(2 * n + 2)));
                    let bound = Rational::from((10, Integer::from(p).pow(6)));
                    for m in 1..=10i64 {
                        let poly = euler_factor(&spec, p, m).unwrap().eval_rational(&x);
                        let ser = euler_series(&ctx, &spec, p, m, &x, 6).unwrap();
                        assert!(Rational::from(&poly - &ser).abs() < bound, "{spec} p={p} m={m}");
                    }
                }
            }
        }
    }
}

#[test]
fn inversion_is_integral_on_grid() {
    // rep_number errors with NonIntegral when the residual exceeds 1e-20
    let ctx = ctx();
    for spec in [
        SpaceSpec::from_parts(7, 2, &[(7, -1)]).unwrap(),
        SpaceSpec::from_parts(15, 3, &[(3, 1), (5, -1)]).unwrap(),
    ] {
        for p in [3u64, 5, 7] {
            for nu in 1..=3 {
                for m in [0i64, 1, 2, 3, 5, 7, 49] {
                    rep_number(&ctx, m, p, nu, &spec).unwrap();
                }
            }
        }
    }
}

#[test]
fn euler_factor_rejects_zero() {
    let spec = SpaceSpec::from_parts(7, 2, &[(7, -1)]).unwrap();
    assert!(euler_factor(&spec, 3, 0).is_err());
}

#[test]
fn coefficient_derivative_matches_difference() {
    let ctx = ctx();
    let h = ctx.real(10).powi(-8);
    for d in [7i64, 15] {
        let field = make_field(d).unwrap();
        for n in 2..=4 {
            let spec = enumerate_spaces(&field, n).remove(0);
            let req = |m| CoeffRequest { spec: spec.clone(), m };
            let s0 = ctx.rat(&req(1).s0());
            for m in 1..=20u64 {
                let b = coeff_b(&ctx, &req(m)).unwrap();
                assert!(b.value != 0 || b.jet.val.abs() < ctx.tol(5));
                let up = coeff_b_jet(&ctx, &spec, m, &Jet::constant(&s0 + &h)).unwrap().val;
                let dn = coeff_b_jet(&ctx, &spec, m, &Jet::constant(&s0 - &h)).unwrap().val;
                let fd = (up - dn) / (&h * 2);
                let scale = b.jet.der.abs().max(ctx.real(1));
                assert!((&b.jet.der - fd).abs() < ctx.real(10).powi(-10) * scale, "{spec} m={m}");
            }
        }
    }
}

#[test]
fn volumes_positive_and_parity_bridge() {
    for d in [7i64, 11, 15, 19, 23] {
        let field = make_field(d).unwrap();
        for n in 1..=5u32 {
            for spec in enumerate_spaces(&field, n) {
                let a0 = a_v_exact0(&spec);
                let mw = vol_c_hodge_mw(&spec, &a0);
                let k = vol_c_k(&spec, &a0);
                assert!(a0 > 0 && mw > 0 && k > 0 && vol_c_l(&spec, &a0) > 0, "{spec}");
                let e = if n % 2 == 1 {
                    n as i32 - 1
                } else {
                    n as i32 - field.o_d as i32
                };
                let two = Rational::from(2).pow(e);
                assert_eq!(mw, Rational::from(&a0 * &two), "{spec}");
                if n >= 2 {
                    assert_eq!(Rational::from(&mw * &t_n(&field, n)), k, "{spec}");
                }
            }
        }
    }
}
