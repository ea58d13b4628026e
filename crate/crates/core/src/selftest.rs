//! The oracle suite behind `shimura-vol selftest`: every closed form is
//! compared with its brute-force, series or alternate-route counterpart.

use rug::ops::Pow;
use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use rug::{Integer, Rational};
use serde::Serialize;

use crate::arith::forms::class_number_by_forms;
use crate::arith::{Context, Jet, Real};
use crate::borcherds::{beta_identity_residuals, borcherds_weight, weight_cross_check_value, BorcherdsInput};
use crate::densities::{
    enumerate_norms, euler_factor, euler_series, exp_sum_from_histogram, gauss_sum_brute, gauss_sum_g,
    lattice_gauss_sum, local_units, rep_number,
};
use crate::dirichlet::{l_dlog_at_0_jet, l_dlog_at_0_log_gamma, make_field, FieldData};
use crate::eisenstein::{
    coeff_b, coeff_b_exact, whittaker_deriv_s0, whittaker_deriv_s0_quad, whittaker_s0, whittaker_w, CoeffRequest,
};
use crate::error::Result;
use crate::spaces::{enumerate_spaces, SpaceSpec};
use crate::volume::{
    a_k, a_k_dlog0, a_k_dlog0_reflected, a_k_exact0, a_v_exact0, b_vk_exact0, base_case_a0, c0, c1, c2, c3,
    induction_residual, t_n, vol_c_hodge_mw, vol_c_k, vol_c_l,
};

#[derive(Clone, Debug, Serialize)]
pub struct Outcome {
    pub id: u32,
    pub title: &'static str,
    pub pass: bool,
    pub cases: usize,
    pub detail: String,
    pub seconds: f64,
    pub budget_seconds: f64,
}

/// Result of one criterion body: cases checked and the failures seen.
#[derive(Default)]
struct Tally {
    cases: usize,
    failures: Vec<String>,
    worst: f64,
}

impl Tally {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn err(&mut self, e: f64) {
        if e > self.worst {
            self.worst = e;
        }
    }

    fn merge(&mut self, other: Tally) {
        self.cases += other.cases;
        self.failures.extend(other.failures);
        self.err(other.worst);
    }
}

fn pow10(ctx: &Context, e: i32) -> Real {
    ctx.real(10).powi(e)
}

fn fields(ds: &[i64]) -> Vec<FieldData> {
    ds.iter().map(|&d| make_field(d).expect("grid discriminant")).collect()
}

fn spaces(ds: &[i64], ns: &[u32]) -> Vec<SpaceSpec> {
    let mut out = Vec::new();
    for f in fields(ds) {
        for &n in ns {
            out.extend(enumerate_spaces(&f, n));
        }
    }
    out
}

fn run(id: u32, title: &'static str, budget: f64, body: impl FnOnce() -> Result<Tally>) -> Outcome {
    let t0 = Instant::now();
    let res = body();
    let seconds = t0.elapsed().as_secs_f64();
    let (pass, cases, detail) = match res {
        Ok(t) if t.failures.is_empty() => (true, t.cases, format!("worst error {:.1e}", t.worst)),
        Ok(t) => (
            false,
            t.cases,
            t.failures.into_iter().take(3).collect::<Vec<_>>().join("; "),
        ),
        Err(e) => (false, 0, e.to_string()),
    };
    Outcome {
        id,
        title,
        pass: pass && seconds < budget,
        cases,
        detail,
        seconds,
        budget_seconds: budget,
    }
}

pub fn gauss_sums(ctx: &Context) -> Outcome {
    run(1, "Gauss-sum closed forms vs exponential sums", 60.0, || {
        let tol = pow10(ctx, -40);
        let mut t = Tally::default();
        for d in [7u64, 15] {
            for p in [3u64, 5, 7] {
                for nu in 1..=2u32 {
                    let q = p.pow(nu);
                    for a in 0..q as i64 {
                        let e = (&gauss_sum_g(ctx, a, p, nu, d) - &gauss_sum_brute(ctx, a, p, nu, d)).abs();
                        t.err(e.to_f64());
                        t.check(e < tol, || format!("G({a}, {p}^{nu}) D={d}"));
                    }
                }
            }
        }
        for spec in spaces(&[7, 15], &[1, 2]) {
            for p in [3u64, 5, 7] {
                let units = local_units(&spec, p);
                for nu in 1..=2u32 {
                    let q = p.pow(nu);
                    let hist = enumerate_norms(q, spec.d(), &units)?;
                    let sub: Vec<Tally> = (0..q as i64)
                        .into_par_iter()
                        .map(|a| {
                            let mut t = Tally::default();
                            let closed = lattice_gauss_sum(ctx, a, p, nu, &units, spec.d());
                            let e = (&closed - &exp_sum_from_histogram(ctx.bits(), a, &hist)).abs();
                            t.err(e.to_f64());
                            t.check(e < tol, || format!("G_L({a}, {p}^{nu}) {spec}"));
                            t
                        })
                        .collect();
                    sub.into_iter().for_each(|s| t.merge(s));
                }
            }
        }
        Ok(t)
    })
}

pub fn rep_numbers(ctx: &Context) -> Outcome {
    run(
        2,
        "Representation numbers: Fourier inversion vs enumeration",
        120.0,
        || {
            let mut t = Tally::default();
            for spec in spaces(&[7, 15], &[1, 2]) {
                for p in [3u64, 5, 7] {
                    let units = local_units(&spec, p);
                    let nus: &[u32] = if spec.n == 1 { &[1, 2] } else { &[1] };
                    for &nu in nus {
                        let q = p.pow(nu);
                        let hist = enumerate_norms(q, spec.d(), &units)?;
                        for m in 0..q as i64 {
                            let f = rep_number(ctx, m, p, nu, &spec)?;
                            t.check(f == hist[m as usize], || {
                                format!("N_{m}({p}^{nu}) {spec}: {f} vs {}", hist[m as usize])
                            });
                        }
                    }
                }
            }
            Ok(t)
        },
    )
}

pub fn euler_factors(ctx: &Context) -> Outcome {
    run(3, "Euler-factor polynomials vs truncated series", 30.0, || {
        let mut t = Tally::default();
        for spec in spaces(&[7, 15], &[1, 2, 3, 4]) {
            for p in [3u64, 5, 7] {
                let x = Rational::from((1, Integer::from(p).pow(2 * spec.n + 2)));
                let bound = Rational::from((10, Integer::from(p).pow(6)));
                for m in 1..=10i64 {
                    let poly = euler_factor(&spec, p, m)?.eval_rational(&x);
                    let ser = euler_series(ctx, &spec, p, m, &x, 2)?;
                    let diff = Rational::from(&poly - &ser).abs();
                    t.err(diff.to_f64());
                    t.check(diff < bound, || format!("L_{m}^({p}) {spec}"));
                }
            }
        }
        Ok(t)
    })
}

pub fn rational_ladder(ctx: &Context) -> Outcome {
    run(4, "Exact rational ladder a_k(0)", 10.0, || {
        let tol = pow10(ctx, -55);
        let mut t = Tally::default();
        let s = Jet::var_at(ctx, 0);
        for f in fields(&[3, 7, 11, 15, 19, 23]) {
            let h = class_number_by_forms(f.d);
            let hw = Rational::from((h, f.w));
            t.check(a_k_exact0(&f, 1) == hw, || format!("a_1(0) D={}", f.d));
            t.check(a_k_exact0(&f, 2) == Rational::from((f.d, 24)), || {
                format!("a_2(0) D={}", f.d)
            });
            for k in 1..=3 {
                let jet = a_k(ctx, &f, k, &s)?;
                let e = (&jet.val - &ctx.rat(&a_k_exact0(&f, k))).abs();
                t.err(e.to_f64());
                t.check(e < tol, || format!("jet a_{k}(0) D={}", f.d));
            }
        }
        let f7 = make_field(7)?;
        t.check(a_k_exact0(&f7, 3) == Rational::from((8, 49)), || "a_3(0) D=7".into());
        Ok(t)
    })
}

pub fn functional_equation(ctx: &Context) -> Outcome {
    run(5, "Direct vs reflected a_k'(0)/a_k(0)", 30.0, || {
        let tol = pow10(ctx, -50);
        let mut t = Tally::default();
        for f in fields(&[7, 15]) {
            for k in 1..=6 {
                let e = (a_k_dlog0(ctx, &f, k)? - a_k_dlog0_reflected(ctx, &f, k)?).abs();
                t.err(e.to_f64());
                t.check(e < tol, || format!("k={k} D={}", f.d));
            }
        }
        Ok(t)
    })
}

pub fn constant_web(ctx: &Context) -> Outcome {
    run(6, "C0 = 2 C1 + C2 + C3 and two L'(0) routes", 20.0, || {
        let tol = pow10(ctx, -50);
        let mut t = Tally::default();
        for f in fields(&[7, 11, 15]) {
            let e = (l_dlog_at_0_log_gamma(ctx, &f) - l_dlog_at_0_jet(ctx, &f)?).abs();
            t.err(e.to_f64());
            t.check(e < tol, || format!("L'/L(0) routes D={}", f.d));
            let one = c1(ctx, &f)?;
            for n in 2..=6 {
                let e = (c0(ctx, &f, n)? - (&one * 2 + c2(ctx, &f, n) + c3(ctx, &f, n)?)).abs();
                t.err(e.to_f64());
                t.check(e < tol, || format!("C0({n}) D={}", f.d));
            }
        }
        Ok(t)
    })
}

pub fn coefficient_anchor(ctx: &Context) -> Outcome {
    run(7, "B(p,0,s0) b_{V,n}(0) = -(p^(n-1)+1)", 10.0, || {
        let mut t = Tally::default();
        for spec in spaces(&[7], &[3, 4]) {
            let b = b_vk_exact0(&spec, spec.n);
            for p in [29u64, 43, 71] {
                let v = coeff_b(
                    ctx,
                    &CoeffRequest {
                        spec: spec.clone(),
                        m: p,
                    },
                )?
                .value;
                let expect = -Rational::from(Integer::from(p).pow(spec.n - 1) + 1u32);
                t.check(v * &b == expect, || format!("p={p} {spec}"));
            }
        }
        let spec = SpaceSpec::from_parts(7, 3, &[(7, -1)])?;
        t.check(coeff_b_exact(&spec, 29)? == -5894, || "B(29,0,1) != -5894".into());
        Ok(t)
    })
}

pub fn whittaker(ctx: &Context) -> Outcome {
    run(8, "Whittaker special values and derivative vs quadrature", 60.0, || {
        let mut t = Tally::default();
        for m in [1i64, -1, 5, -5] {
            for n in 2..=5u32 {
                let s0 = (n as f64 - 1.0) / 2.0;
                for v in [0.5, 1.0, 3.0] {
                    let quad = whittaker_w(m, n, s0, v)?;
                    let closed = whittaker_s0(ctx, m, n, v).to_f64();
                    let e = ((quad - closed) / closed).abs();
                    t.err(e);
                    t.check(e < 1e-8, || format!("W_{m}(s0) n={n} v={v}"));
                    if m > 0 {
                        let d = whittaker_deriv_s0(ctx, m as u64, n, &ctx.f64(v)).to_f64();
                        let q = whittaker_deriv_s0_quad(m as u64, n, v)?;
                        let e = ((d - q) / d).abs();
                        t.err(e);
                        t.check(e < 1e-8, || format!("W'_{m}(s0) n={n} v={v}"));
                    }
                }
            }
        }
        Ok(t)
    })
}

fn weight_grid() -> Result<Vec<BorcherdsInput>> {
    let mut out = Vec::new();
    for (d, p1, p2) in [(7i64, 29u64, 43u64), (15, 31, 61)] {
        let f = make_field(d)?;
        for n in 3..=5 {
            let spec = enumerate_spaces(&f, n).remove(0);
            for coeffs in [BTreeMap::from([(p1, 1i64)]), BTreeMap::from([(p1, 2), (p2, -1)])] {
                out.push(BorcherdsInput::new(spec.clone(), coeffs)?);
            }
        }
    }
    Ok(out)
}

pub fn weight_routes(ctx: &Context) -> Outcome {
    run(9, "Borcherds weight: closed form vs constant-term route", 30.0, || {
        let mut t = Tally::default();
        let tol = pow10(ctx, -40);
        for input in weight_grid()? {
            let k = borcherds_weight(&input)?;
            let v = weight_cross_check_value(ctx, &input)?;
            let e = (&v.re - &ctx.rat(&k)).abs().max(v.im.abs());
            t.err(e.to_f64());
            t.check(e < tol, || format!("{} {:?}", input.spec, input.coeffs));
            let q = crate::borcherds::weight_cross_check(ctx, &input)?;
            t.check(q == k, || format!("reconstruction {} {:?}", input.spec, input.coeffs));
        }
        let anchor = BorcherdsInput::new(SpaceSpec::from_parts(7, 3, &[(7, -1)])?, BTreeMap::from([(29, 1)]))?;
        t.check(borcherds_weight(&anchor)? == 5894, || "k(f) anchor".into());
        let tol = pow10(ctx, -50);
        for spec in spaces(&[7, 15], &[3, 4, 5]) {
            let (a, b) = beta_identity_residuals(ctx, &spec)?;
            t.err(a.to_f64().max(b.to_f64()));
            t.check(a < tol && b < tol, || format!("beta identities {spec}"));
        }
        Ok(t)
    })
}

pub fn volume_web(ctx: &Context) -> Outcome {
    run(10, "Volume identities", 60.0, || {
        let tol = pow10(ctx, -50);
        let mut t = Tally::default();
        for spec in spaces(&[7, 11, 15, 19, 23], &[1, 2, 3, 4, 5]) {
            let n = spec.n;
            let a0 = a_v_exact0(&spec);
            let k = vol_c_k(&spec, &a0);
            t.check(
                k == vol_c_l(&spec, &a0) * Rational::from(Integer::from(1) << (n - 1)),
                || format!("volC_K = 2^(n-1) volC_L {spec}"),
            );
            if n >= 2 {
                let mw = vol_c_hodge_mw(&spec, &a0) * t_n(&spec.field, n);
                t.check(mw == k, || format!("volC_MW t_n = volC_K {spec}"));
                let e = induction_residual(ctx, &spec)?;
                t.err(e.to_f64());
                t.check(e < tol, || format!("induction residual {spec}"));
            }
            if n == 2 {
                t.check(base_case_a0(&spec) == a0, || format!("base case {spec}"));
            }
        }
        let f7 = make_field(7)?;
        for (n, want) in [(2u32, (1, 3)), (3, (2, 21))] {
            let spec = enumerate_spaces(&f7, n).remove(0);
            let got = vol_c_hodge_mw(&spec, &a_v_exact0(&spec));
            t.check(got == Rational::from(want), || {
                format!("volC_hodge_MW D=7 n={n}: {got}")
            });
        }
        Ok(t)
    })
}

/// All criteria in order.
pub fn run_all(ctx: &Context) -> Vec<Outcome> {
    let suite: [fn(&Context) -> Outcome; 10] = [
        gauss_sums,
        rep_numbers,
        euler_factors,
        rational_ladder,
        functional_equation,
        constant_web,
        coefficient_anchor,
        whittaker,
        weight_routes,
        volume_web,
    ];
    suite.iter().map(|f| f(ctx)).collect()
}
