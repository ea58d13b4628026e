//! Acceptance suite: one line per criterion, each closed form checked
//! against an oracle that lives in this file where one is cheap to write.
//! Runs at 60 digits. Exits nonzero if any criterion fails or overruns.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use shimura_vol::arith::ntheory::kronecker;
use shimura_vol::borcherds::{
    beta_identity_residuals, borcherds_weight, weight_cross_check, weight_cross_check_value, BorcherdsInput,
};
use shimura_vol::densities::{euler_factor, euler_series, gauss_sum_g, lattice_gauss_sum, local_units, rep_number};
use shimura_vol::dirichlet::{l_dlog_at_0_jet, l_dlog_at_0_log_gamma, make_field, FieldData};
use shimura_vol::eisenstein::{coeff_b, coeff_b_exact, whittaker_deriv_s0, whittaker_s0, whittaker_w, CoeffRequest};
use shimura_vol::spaces::{enumerate_spaces, SpaceSpec};
use shimura_vol::volume::{
    a_k, a_k_dlog0, a_k_dlog0_reflected, a_k_exact0, a_v_exact0, b_vk_exact0, base_case_a0, c0, c1, c2, c3,
    induction_residual, t_n, vol_c_hodge_mw, vol_c_k, vol_c_l,
};
use shimura_vol::{ComplexVal, Context, Jet, Real};

const DIGITS: u32 = 60;

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
        self.worst = self.worst.max(e);
    }
}

type Body = fn(&Context) -> Result<Tally, String>;

fn fields(ds: &[i64]) -> Vec<FieldData> {
    ds.iter().map(|&d| make_field(d).unwrap()).collect()
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

fn pow10(ctx: &Context, e: i32) -> Real {
    ctx.real(10).powi(e)
}

// ---- local oracles ----

/// Histogram of `sum u_i N(x_i) mod q` over `(O_k/q)^n`: one-variable norm
/// counts from `N(x + y w) = x^2 + xy + (1+D)/4 y^2`, convolved per unit.
fn norm_histogram(q: u64, d: u64, units: &[u64]) -> Vec<u64> {
    let k = (1 + d) / 4;
    let mut single = vec![0u64; q as usize];
    for x in 0..q {
        for y in 0..q {
            single[((x * x + x * y + k * y * y) % q) as usize] += 1;
        }
    }
    let mut hist = vec![0u64; q as usize];
    hist[0] = 1;
    for &u in units {
        let mut next = vec![0u64; q as usize];
        for (s, &a) in hist.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (t, &b) in single.iter().enumerate() {
                next[((s as u64 + u * t as u64) % q) as usize] += a * b;
            }
        }
        hist = next;
    }
    hist
}

/// `sum_t hist[t] exp(2 pi i a t / q)` in MPFR.
fn exp_sum(bits: u32, a: i64, hist: &[u64]) -> (Float, Float) {
    let q = hist.len() as i64;
    let two_pi = Float::with_val(bits, rug::float::Constant::Pi) * 2u32;
    let mut re = Float::with_val(bits, 0);
    let mut im = Float::with_val(bits, 0);
    for (t, &c) in hist.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let k = (a.rem_euclid(q) * t as i64) % q;
        let theta = Float::with_val(bits, &two_pi * k) / q;
        let (s, co) = theta.sin_cos(Float::new(bits));
        re += co * c;
        im += s * c;
    }
    (re, im)
}

fn complex_gap(z: &ComplexVal, re: &Float, im: &Float) -> f64 {
    let a = Float::with_val(re.prec(), z.re.as_float() - re).abs();
    let b = Float::with_val(re.prec(), z.im.as_float() - im).abs();
    a.max(&b).to_f64()
}

/// Reduced primitive forms `(a, b, c)` of discriminant `-D`.
fn class_number(d: i64) -> u64 {
    let mut h = 0;
    let mut a = 1i64;
    while 3 * a * a <= d {
        for b in -a + 1..=a {
            let num = b * b + d;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a || (c == a && b < 0) {
                continue;
            }
            if Integer::from(a).gcd(&Integer::from(b)).gcd(&Integer::from(c)) == 1 {
                h += 1;
            }
        }
        a += 1;
    }
    h
}

fn bernoulli_numbers(k: usize) -> Vec<Rational> {
    let mut b = vec![Rational::from(1)];
    for m in 1..=k {
        let mut acc = Rational::new();
        for (j, bj) in b.iter().enumerate() {
            acc += Rational::from(Integer::binomial_u(m as u32 + 1, j as u32)) * bj;
        }
        b.push(-acc / (m as u32 + 1));
    }
    b
}

/// `B_{k,chi} = f^(k-1) sum_{a=1}^{f} chi(a) B_k(a/f)` for `chi = (-D/.)`.
fn gen_bernoulli(k: usize, d: i64) -> Rational {
    let b = bernoulli_numbers(k);
    let poly = |x: &Rational| {
        let mut acc = Rational::new();
        for (j, bj) in b.iter().enumerate() {
            let c = Rational::from(Integer::binomial_u(k as u32, j as u32)) * bj;
            acc += c * Rational::from(x.pow(k as i32 - j as i32));
        }
        acc
    };
    let mut acc = Rational::new();
    for a in 1..=d {
        let chi = kronecker(-d, a);
        if chi != 0 {
            acc += poly(&Rational::from((a, d))) * chi;
        }
    }
    acc * Integer::from(d).pow(k as u32 - 1)
}

/// `int_0^inf f(t) dt` by the trapezoid rule in `t = e^u`.
fn integrate_half_line(f: impl Fn(f64) -> f64, z: f64) -> f64 {
    let (lo, hi, h) = (-40.0, (80.0 / z).ln(), 1.0 / 128.0);
    let steps = ((hi - lo) / h).ceil() as usize;
    (0..=steps)
        .map(|i| {
            let t = (lo + i as f64 * h).exp();
            let w = if i == 0 || i == steps { 0.5 } else { 1.0 };
            w * f(t) * t
        })
        .sum::<f64>()
        * h
}

// ---- criteria ----

fn c1_gauss(ctx: &Context) -> Result<Tally, String> {
    let mut t = Tally::default();
    let bits = ctx.bits();
    let tol = 1e-40;
    for d in [7u64, 15] {
        for p in [3u64, 5, 7] {
            for nu in 1..=2 {
                let q = p.pow(nu);
                let hist = norm_histogram(q, d, &[1]);
                for a in 0..q as i64 {
                    let (re, im) = exp_sum(bits, a, &hist);
                    let e = complex_gap(&gauss_sum_g(ctx, a, p, nu, d), &re, &im);
                    t.err(e);
                    t.check(e < tol, || format!("G({a}, {p}^{nu}) D={d}"));
                }
            }
        }
    }
    for spec in spaces(&[7, 15], &[1, 2]) {
        for p in [3u64, 5, 7] {
            let units = local_units(&spec, p);
            for nu in 1..=2 {
                let q = p.pow(nu);
                let hist = norm_histogram(q, spec.d(), &units);
                for a in 0..q as i64 {
                    let (re, im) = exp_sum(bits, a, &hist);
                    let e = complex_gap(&lattice_gauss_sum(ctx, a, p, nu, &units, spec.d()), &re, &im);
                    t.err(e);
                    t.check(e < tol, || format!("G_L({a}, {p}^{nu}) {spec}"));
                }
            }
        }
    }
    Ok(t)
}

fn c2_rep_numbers(ctx: &Context) -> Result<Tally, String> {
    let mut t = Tally::default();
    for spec in spaces(&[7, 15], &[1, 2]) {
        for p in [3u64, 5, 7] {
            let nus: &[u32] = if spec.n == 1 { &[1, 2] } else { &[1] };
            for &nu in nus {
                let q = p.pow(nu);
                let hist = norm_histogram(q, spec.d(), &local_units(&spec, p));
                for m in 0..q as i64 {
                    let got = rep_number(ctx, m, p, nu, &spec).map_err(|e| e.to_string())?;
                    let want = hist[m as usize];
                    t.check(got == want, || format!("N_{m}({p}^{nu}) {spec}: {got} vs {want}"));
                }
            }
        }
    }
    Ok(t)
}

fn c3_euler_factors(ctx: &Context) -> Result<Tally, String> {
    let mut t = Tally::default();
    for spec in spaces(&[7, 15], &[1, 2, 3, 4]) {
        for p in [3u64, 5, 7] {
            let x = Rational::from((1, Integer::from(p).pow(2 * spec.n + 2)));
            let bound = Rational::from((10, Integer::from(p).pow(6)));
            for m in 1..=10i64 {
                let poly = euler_factor(&spec, p, m).map_err(|e| e.to_string())?.eval_rational(&x);
                let ser = euler_series(ctx, &spec, p, m, &x, 2).map_err(|e| e.to_string())?;
                let diff = Rational::from(&poly - &ser).abs();
                t.err(diff.to_f64());
                t.check(diff < bound, || format!("L_{m}^({p}) {spec}"));
            }
        }
    }
    Ok(t)
}

fn c4_ladder(ctx: &Context) -> Result<Tally, String> {
    let mut t = Tally::default();
    let tol = pow10(ctx, -55);
    let s = Jet::var_at(ctx, 0);
    for f in fields(&[3, 7, 11, 15, 19, 23]) {
        let d = f.d as i64;
        let hw = Rational::from((class_number(d), f.w));
        t.check(a_k_exact0(&f, 1) == hw, || format!("a_1(0) D={d}"));
        t.check(a_k_exact0(&f, 2) == Rational::from((d, 24)), || format!("a_2(0) D={d}"));
        // a_3(0) = B_{3,eps} / (6 D)
        let own = gen_bernoulli(3, d) / Rational::from(6 * d);
        t.check(a_k_exact0(&f, 3) == own, || format!("a_3(0) D={d}"));
        for k in 1..=3 {
            let jet = a_k(ctx, &f, k, &s).map_err(|e| e.to_string())?;
            let e = (&jet.val - &ctx.rat(&a_k_exact0(&f, k))).abs();
            t.err(e.to_f64());
            t.check(e < tol, || format!("jet a_{k}(0) D={d}"));
        }
    }
    let f7 = make_field(7).unwrap();
    t.check(a_k_exact0(&f7, 3) == Rational::from((8, 49)), || {
        "a_3(0) D=7 != 8/49".into()
    });
    Ok(t)
}

fn c5_functional_equation(ctx: &Context) -> Result<Tally, String> {
    let mut t = Tally::default();
    let tol = pow10(ctx, -50);
    for f in fields(&[7, 15]) {
        for k in 1..=6 {
            let direct = a_k(ctx, &f, k, &Jet::var_at(ctx, 0)).map_err(|e| e.to_string())?.dlog();
            let refl = a_k_dlog0_reflected(ctx, &f, k).map_err(|e| e.to_string())?;
            let e = (&direct - &refl).abs();
            t.err(e.to_f64());
            t.check(e < tol, || format!("k={k} D={}", f.d));
            t.check(a_k_dlog0(ctx, &f, k).is_ok(), || format!("a_k_dlog0 k={k} D={}", f.d));
        }
    }
    Ok(t)
}

fn c6_constants(ctx: &Context) -> Result<Tally, String> {
    let mut t = Tally::default();
    let tol = pow10(ctx, -50);
    for f in fields(&[7, 11, 15]) {
        let jet = l_dlog_at_0_jet(ctx, &f).map_err(|e| e.to_string())?;
        let e = (l_dlog_at_0_log_gamma(ctx, &f) - jet).abs();
        t.err(e.to_f64());
        t.check(e < tol, || format!("L'(0)/L(0) routes D={}", f.d));
        let one = c1(ctx, &f).map_err(|e| e.to_string())?;
        for n in 2..=6 {
            let zero = c0(ctx, &f, n).map_err(|e| e.to_string())?;
            let three = c3(ctx, &f, n).map_err(|e| e.to_string())?;
            let e = (zero - (&one * 2 + c2(ctx, &f, n) + three)).abs();
            t.err(e.to_f64());
            t.check(e < tol, || format!("C0({n}) D={}", f.d));
        }
    }
    Ok(t)
}

fn c7_anchor(ctx: &Context) -> Result<Tally, String> {
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
            )
            .map_err(|e| e.to_string())?
            .value;
            let want = -Rational::from(Integer::from(p).pow(spec.n - 1) + 1u32);
            t.check(v * &b == want, || format!("p={p} {spec}"));
        }
    }
    let spec = SpaceSpec::from_parts(7, 3, &[(7, -1)]).unwrap();
    let b = coeff_b_exact(&spec, 29).map_err(|e| e.to_string())?;
    t.check(b == -5894, || format!("B(29,0,1) = {b}"));
    Ok(t)
}

fn c8_whittaker(ctx: &Context) -> Result<Tally, String> {
    let mut t = Tally::default();
    let pi = std::f64::consts::PI;
    for m in [1i64, -1, 5, -5] {
        for n in 2..=5u32 {
            let s0 = (n as f64 - 1.0) / 2.0;
            for v in [0.5, 1.0, 3.0] {
                let z = 4.0 * pi * m.unsigned_abs() as f64 * v;
                let closed = whittaker_s0(ctx, m, n, v).to_f64();
                let lib = whittaker_w(m, n, s0, v).map_err(|e| e.to_string())?;
                // Gamma(1-n, z) = e^-z U(n, n, z)
                let own = if m > 0 {
                    1.0
                } else {
                    let g: f64 = (1..n).map(|j| j as f64).product();
                    let u = integrate_half_line(|x| (-z * x).exp() * x.powi(n as i32 - 1) / (1.0 + x), z) / g;
                    (-z).exp() * u
                };
                for (route, val) in [("quadrature", lib), ("trapezoid", own)] {
                    let e = ((val - closed) / closed).abs();
                    t.err(e);
                    t.check(e < 1e-8, || format!("W_{m}(s0) n={n} v={v} {route}"));
                }
                if m > 0 {
                    let d = whittaker_deriv_s0(ctx, m as u64, n, &ctx.f64(v)).to_f64();
                    let c = n as f64 - 1.0;
                    let q = integrate_half_line(|x| (-z * x).exp() * (c * x.ln_1p()).exp_m1() / x, z);
                    let e = ((d - q) / d).abs();
                    t.err(e);
                    t.check(e < 1e-8, || format!("W'_{m}(s0) n={n} v={v}"));
                }
            }
        }
    }
    Ok(t)
}

fn c9_weight(ctx: &Context) -> Result<Tally, String> {
    let mut t = Tally::default();
    let tol = pow10(ctx, -40);
    let mut grid = Vec::new();
    for (d, p1, p2) in [(7i64, 29u64, 43u64), (15, 31, 61)] {
        let f = make_field(d).unwrap();
        for n in 3..=5 {
            let spec = enumerate_spaces(&f, n).remove(0);
            grid.push((spec.clone(), BTreeMap::from([(p1, 1i64)])));
            grid.push((spec, BTreeMap::from([(p1, 2), (p2, -1)])));
        }
    }
    for (spec, coeffs) in grid {
        let input = BorcherdsInput::new(spec, coeffs).map_err(|e| e.to_string())?;
        let k = borcherds_weight(&input).map_err(|e| e.to_string())?;
        let v = weight_cross_check_value(ctx, &input).map_err(|e| e.to_string())?;
        let e = (&v.re - &ctx.rat(&k)).abs().max(v.im.abs());
        t.err(e.to_f64());
        t.check(e < tol, || format!("{} {:?}", input.spec, input.coeffs));
        let q = weight_cross_check(ctx, &input).map_err(|e| e.to_string())?;
        t.check(q == k, || format!("reconstructed {q} vs {k}"));
    }
    let anchor = BorcherdsInput::new(
        SpaceSpec::from_parts(7, 3, &[(7, -1)]).unwrap(),
        BTreeMap::from([(29, 1)]),
    )
    .unwrap();
    let k = borcherds_weight(&anchor).map_err(|e| e.to_string())?;
    t.check(k == 5894, || format!("k(f) anchor = {k}"));
    let tol = pow10(ctx, -50);
    for spec in spaces(&[7, 15], &[3, 4, 5]) {
        let (a, b) = beta_identity_residuals(ctx, &spec).map_err(|e| e.to_string())?;
        t.err(a.to_f64().max(b.to_f64()));
        t.check(a < tol && b < tol, || format!("beta identities {spec}"));
    }
    Ok(t)
}

fn c10_volumes(ctx: &Context) -> Result<Tally, String> {
    let mut t = Tally::default();
    let tol = pow10(ctx, -50);
    for spec in spaces(&[7, 11, 15, 19, 23], &[1, 2, 3, 4, 5]) {
        let n = spec.n;
        let a0 = a_v_exact0(&spec);
        let k = vol_c_k(&spec, &a0);
        let l = vol_c_l(&spec, &a0) * Rational::from(Integer::from(1) << (n - 1));
        t.check(k == l, || format!("volC_K vs volC_L {spec}"));
        if n >= 2 {
            let mw = vol_c_hodge_mw(&spec, &a0) * t_n(&spec.field, n);
            t.check(mw == k, || format!("volC_MW t_n vs volC_K {spec}"));
            let e = induction_residual(ctx, &spec).map_err(|e| e.to_string())?;
            t.err(e.to_f64());
            t.check(e < tol, || format!("induction residual {spec}"));
        }
        if n == 2 {
            t.check(base_case_a0(&spec) == a0, || format!("base case {spec}"));
        }
    }
    let f7 = make_field(7).unwrap();
    for (n, want) in [(2u32, (1, 3)), (3, (2, 21))] {
        let spec = enumerate_spaces(&f7, n).remove(0);
        let got = vol_c_hodge_mw(&spec, &a_v_exact0(&spec));
        t.check(got == Rational::from(want), || {
            format!("volC_hodge_MW D=7 n={n}: {got}")
        });
    }
    Ok(t)
}

fn main() -> ExitCode {
    let ctx = Context::new(DIGITS);
    let suite: [(u32, &str, f64, Body); 10] = [
        (1, "Gauss sums vs exponential sums", 60.0, c1_gauss),
        (2, "representation numbers vs enumeration", 120.0, c2_rep_numbers),
        (3, "Euler factors vs truncated series", 30.0, c3_euler_factors),
        (4, "rational ladder a_k(0)", 10.0, c4_ladder),
        (5, "direct vs reflected a_k'(0)/a_k(0)", 30.0, c5_functional_equation),
        (6, "constant web and L'(0) routes", 20.0, c6_constants),
        (7, "coefficient anchor", 10.0, c7_anchor),
        (8, "Whittaker values and derivative", 60.0, c8_whittaker),
        (9, "Borcherds weight dual route", 30.0, c9_weight),
        (10, "volume web", 60.0, c10_volumes),
    ];
    let total = Instant::now();
    let mut failed = 0;
    for (id, title, budget, body) in suite {
        let t0 = Instant::now();
        let res = body(&ctx);
        let secs = t0.elapsed().as_secs_f64();
        let (ok, info) = match res {
            Ok(t) if t.failures.is_empty() => (secs < budget, format!("{} cases, worst {:.1e}", t.cases, t.worst)),
            Ok(t) => (
                false,
                format!(
                    "{} of {} failed: {}",
                    t.failures.len(),
                    t.cases,
                    t.failures[..t.failures.len().min(3)].join("; ")
                ),
            ),
            Err(e) => (false, format!("error: {e}")),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {id:>2} {} {title}: {info} ({secs:.2}s / {budget:.0}s)",
            if ok { "PASS" } else { "FAIL" }
        );
    }
    let secs = total.elapsed().as_secs_f64();
    let ok = secs < 360.0;
    if !ok {
        failed += 1;
    }
    println!("total {} {secs:.2}s / 360s", if ok { "PASS" } else { "FAIL" });
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
