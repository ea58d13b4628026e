//! Special values `a_k(s)`, `b_{V,k}(s)`, `A_V(s)`, the Faltings-height
//! constants, and the complex and arithmetic volumes built from them.

use rug::ops::Pow;
use rug::{Integer, Rational};
use serde::Serialize;

use crate::arith::ntheory::kronecker;
use crate::arith::{Context, Jet, Real};
use crate::dirichlet::{l_dlog_at_0, l_nonpositive_exact, l_value, FieldData};
use crate::error::{Error, Result};
use crate::spaces::{companion_space, ell_star, SpaceSpec};

fn pow_rat(base: u64, e: i64) -> Rational {
    let p = Rational::from(Integer::from(base).pow(e.unsigned_abs() as u32));
    if e >= 0 {
        p
    } else {
        p.recip()
    }
}

fn two_pow(e: i64) -> Rational {
    pow_rat(2, e)
}

/// `a_k(s) = D^(k/2) Gamma(s+k) L(2s+k, eps^k) / (2^k pi^(s+k))`.
pub fn a_k(ctx: &Context, field: &FieldData, k: u32, s: &Jet) -> Result<Jet> {
    assert!(k >= 1);
    let bits = ctx.bits();
    let k = k as i64;
    let dk = Real::from_i64(bits, field.d as i64).sqrt().powi(k as i32);
    let gamma = s.add_i(k).gamma();
    let l = l_value(ctx, &field.eps_power(k as u32), &s.scale_i(2).add_i(k), &[])?;
    let pi_pow = Jet::base_pow(&ctx.pi(), &s.add_i(k));
    let num = (&gamma * &l).scale(&(dk / Real::from_i64(bits, 2).powi(k as i32)));
    Ok(&num / &pi_pow)
}

/// `a_k(0)` by the functional equation and `L(1-k, chi) = -B_{k,chi}/k`.
pub fn a_k_exact0(field: &FieldData, k: u32) -> Rational {
    assert!(k >= 1);
    let chi = field.eps_power(k);
    let l = l_nonpositive_exact(&chi, 1 - k as i64);
    let d = field.d;
    let (sign, dpow) = if k.is_multiple_of(2) {
        let h = (k / 2) as i64;
        (if h % 2 == 0 { 1 } else { -1 }, pow_rat(d, h))
    } else {
        let h = ((k - 1) / 2) as i64;
        (if h % 2 == 0 { 1 } else { -1 }, pow_rat(d, -h))
    };
    l * dpow * sign / 2
}

/// `a_k'(0)/a_k(0)` from the direct jet; the reflected form
/// `-2 L'(1-k)/L(1-k) - psi(k) + log(4 pi/D) + (-1)^k log D` must agree.
pub fn a_k_dlog0(ctx: &Context, field: &FieldData, k: u32) -> Result<Real> {
    let direct = a_k(ctx, field, k, &Jet::var_at(ctx, 0))?.dlog();
    let reflected = a_k_dlog0_reflected(ctx, field, k)?;
    let tol = ctx.tol(5) * direct.abs().max(ctx.real(1));
    if (&direct - &reflected).abs() > tol {
        return Err(Error::PrecisionLoss(format!(
            "a_{k}'(0)/a_{k}(0) routes disagree for D={}",
            field.d
        )));
    }
    Ok(direct)
}

pub fn a_k_dlog0_reflected(ctx: &Context, field: &FieldData, k: u32) -> Result<Real> {
    let chi = field.eps_power(k);
    let l = l_value(ctx, &chi, &Jet::var_at(ctx, 1 - k as i64), &[])?;
    let psi = crate::arith::jet::gamma_digamma(&ctx.real(k as i64)).1;
    let logd = ctx.real(field.d as i64).ln();
    let sign = if k.is_multiple_of(2) { 1 } else { -1 };
    Ok(-(l.dlog() * 2) - psi + (ctx.pi() * 4 / ctx.real(field.d as i64)).ln() + logd * sign)
}

/// Ramified factor `prod_l (1 + c_l l^(-s - shift))` with the per-prime
/// sign `c_l = (-1/l)^e inv_l`.
fn ramified_product(ctx: &Context, spec: &SpaceSpec, e: u32, shift: Rational, s: &Jet) -> Jet {
    let bits = ctx.bits();
    let mut acc = Jet::constant(Real::one(bits));
    for (&l, &inv) in &spec.inv {
        let c = kronecker(-1, l as i64).pow(e) * inv;
        let ex = (-s).add_const(&-Real::from_rational(bits, &shift));
        let f = Jet::int_pow(l, &ex).scale_i(c as i64).add_i(1);
        acc = &acc * &f;
    }
    acc
}

fn ramified_product_exact0(spec: &SpaceSpec, e: u32, shift2: i64) -> Rational {
    // shift2 = 2 * shift; only integral shifts occur at s = 0
    assert!(shift2 % 2 == 0);
    let mut acc = Rational::from(1);
    for (&l, &inv) in &spec.inv {
        let c = kronecker(-1, l as i64).pow(e) * inv;
        acc *= Rational::from(1) + pow_rat(l, -shift2 / 2) * c;
    }
    acc
}

/// `b_{V,k}(s)`.
pub fn b_vk(ctx: &Context, spec: &SpaceSpec, k: u32, s: &Jet) -> Result<Jet> {
    let a = a_k(ctx, &spec.field, k, s)?;
    Ok(if k == 1 {
        a
    } else if k.is_multiple_of(2) {
        &a * &ramified_product(ctx, spec, k / 2, Rational::from(k / 2), s)
    } else {
        let f = ramified_product(ctx, spec, (k - 1) / 2, Rational::from((k as i64 - 1) / 2), s);
        &a / &f
    })
}

pub fn b_vk_exact0(spec: &SpaceSpec, k: u32) -> Rational {
    let a = a_k_exact0(&spec.field, k);
    if k == 1 {
        a
    } else if k.is_multiple_of(2) {
        a * ramified_product_exact0(spec, k / 2, k as i64)
    } else {
        a / ramified_product_exact0(spec, (k - 1) / 2, k as i64 - 1)
    }
}

/// `A_V(s) = a_1(s) ... a_n(s)` times the even-`n` ramified factor.
pub fn a_v(ctx: &Context, spec: &SpaceSpec, s: &Jet) -> Result<Jet> {
    let mut acc = Jet::constant(Real::one(ctx.bits()));
    for k in 1..=spec.n {
        acc = &acc * &a_k(ctx, &spec.field, k, s)?;
    }
    if spec.n.is_multiple_of(2) {
        acc = &acc * &ramified_product(ctx, spec, spec.n / 2, Rational::from(spec.n / 2), s);
    }
    Ok(acc)
}

/// `A_V(s)` as the product of the `b_{V,k}(s)`.
pub fn a_v_factored(ctx: &Context, spec: &SpaceSpec, s: &Jet) -> Result<Jet> {
    let mut acc = Jet::constant(Real::one(ctx.bits()));
    for k in 1..=spec.n {
        acc = &acc * &b_vk(ctx, spec, k, s)?;
    }
    Ok(acc)
}

pub fn a_v_exact0(spec: &SpaceSpec) -> Rational {
    let mut acc = Rational::from(1);
    for k in 1..=spec.n {
        acc *= a_k_exact0(&spec.field, k);
    }
    if spec.n.is_multiple_of(2) {
        acc *= ramified_product_exact0(spec, spec.n / 2, spec.n as i64);
    }
    acc
}

pub fn a_v_factored_exact0(spec: &SpaceSpec) -> Rational {
    (1..=spec.n).map(|k| b_vk_exact0(spec, k)).product()
}

/// `A_V(0)` for `n = 2` as `h/(24 w) prod_l (1 + l*)`.
pub fn base_case_a0(spec: &SpaceSpec) -> Rational {
    assert_eq!(spec.n, 2);
    let mut acc = Rational::from(&spec.field.h / (24 * spec.field.w));
    for &l in spec.inv.keys() {
        acc *= Rational::from(1 + ell_star(spec, l));
    }
    acc
}

/// Constants built from `r = L'(0, eps)/L(0, eps)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldConstants {
    pub r: Real,
    pub h_falt: Real,
    pub c1: Real,
}

pub fn field_constants(ctx: &Context, field: &FieldData) -> Result<FieldConstants> {
    let r = l_dlog_at_0(ctx, field)?;
    let h_falt = h_falt_from(ctx, field, &r);
    let c1 = (ctx.pi() * 2).ln() + &h_falt * 2;
    Ok(FieldConstants { r, h_falt, c1 })
}

fn h_falt_from(ctx: &Context, field: &FieldData, r: &Real) -> Real {
    let pi = ctx.pi();
    let inner = &pi * &pi * 4 * field.d as i64;
    -(r / 2) - inner.ln() / 4
}

/// Faltings height of a CM elliptic curve: `-r/2 - log(4 pi^2 D)/4`.
pub fn h_falt(ctx: &Context, field: &FieldData) -> Result<Real> {
    Ok(field_constants(ctx, field)?.h_falt)
}

pub fn c1(ctx: &Context, field: &FieldData) -> Result<Real> {
    Ok(field_constants(ctx, field)?.c1)
}

/// `C_2(n) = 2 log(2 e^gamma / D) + (2 - n) log(2 pi)`.
pub fn c2(ctx: &Context, field: &FieldData, n: u32) -> Real {
    let g = ctx.euler_gamma();
    let t = (ctx.real(2) * g.exp() / field.d as i64).ln() * 2;
    t + (ctx.pi() * 2).ln() * (2 - n as i64)
}

/// `C_3(n) = (4 - 2n) h_falt + log(4 pi^2 D)`.
pub fn c3(ctx: &Context, field: &FieldData, n: u32) -> Result<Real> {
    let h = h_falt(ctx, field)?;
    let pi = ctx.pi();
    Ok(h * (4 - 2 * n as i64) + (&pi * &pi * 4 * field.d as i64).ln())
}

/// `C_0(n) = 2 log(4 pi e^gamma / sqrt D) + (n - 4)(r + log(D)/2)`.
pub fn c0(ctx: &Context, field: &FieldData, n: u32) -> Result<Real> {
    let r = l_dlog_at_0(ctx, field)?;
    Ok(c0_from(ctx, field, n, &r))
}

fn c0_from(ctx: &Context, field: &FieldData, n: u32, r: &Real) -> Real {
    let d = ctx.real(field.d as i64);
    let lead = (ctx.pi() * 4 * ctx.euler_gamma().exp() / d.sqrt()).ln() * 2;
    lead + (r + d.ln() / 2) * (n as i64 - 4)
}

/// One named internal identity and whether it held.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Constants {
    #[serde(rename = "C0", serialize_with = "crate::report::ser_real")]
    pub c0: Real,
    #[serde(rename = "C1", serialize_with = "crate::report::ser_real")]
    pub c1: Real,
    #[serde(rename = "C2", serialize_with = "crate::report::ser_opt_real")]
    pub c2: Option<Real>,
    #[serde(rename = "C3", serialize_with = "crate::report::ser_opt_real")]
    pub c3: Option<Real>,
    #[serde(rename = "hFalt", serialize_with = "crate::report::ser_real")]
    pub h_falt: Real,
}

/// Exceptional-divisor input: multiplicity `m_E` at characteristic `p`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Exceptional {
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub m_e: Rational,
    pub p: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VolumeReport {
    pub spec: SpaceSpec,
    pub digits: u32,
    #[serde(rename = "A0", serialize_with = "crate::report::ser_rational")]
    pub a0: Rational,
    #[serde(rename = "A_dlog", serialize_with = "crate::report::ser_real")]
    pub a_dlog: Real,
    #[serde(rename = "t_n", serialize_with = "crate::report::ser_rational")]
    pub t_n: Rational,
    #[serde(rename = "volC_hodge_MW", serialize_with = "crate::report::ser_rational")]
    pub vol_c_hodge_mw: Rational,
    #[serde(rename = "volC_L", serialize_with = "crate::report::ser_opt_rational")]
    pub vol_c_l: Option<Rational>,
    #[serde(rename = "volC_K", serialize_with = "crate::report::ser_opt_rational")]
    pub vol_c_k: Option<Rational>,
    #[serde(rename = "volC_hodge_SV", serialize_with = "crate::report::ser_opt_rational")]
    pub vol_c_hodge_sv: Option<Rational>,
    #[serde(rename = "volHat_hodge_MW", serialize_with = "crate::report::ser_real")]
    pub vol_hat_hodge_mw: Real,
    #[serde(rename = "volHat_K", serialize_with = "crate::report::ser_opt_real")]
    pub vol_hat_k: Option<Real>,
    #[serde(rename = "volHat_hodge_SV", serialize_with = "crate::report::ser_opt_real")]
    pub vol_hat_hodge_sv: Option<Real>,
    #[serde(rename = "volHat_L", serialize_with = "crate::report::ser_opt_real")]
    pub vol_hat_l: Option<Real>,
    #[serde(rename = "volHat_L_exceptional", serialize_with = "crate::report::ser_opt_real")]
    pub vol_hat_l_exceptional: Option<Real>,
    pub exceptional: Vec<Exceptional>,
    pub constants: Constants,
    pub checks: Vec<Check>,
    pub checks_pass: bool,
}

/// `t_n = (h/w)` for even `n`, `(h/w) 2^(1 - o(D))` for odd `n`.
pub fn t_n(field: &FieldData, n: u32) -> Rational {
    let hw = field.h_over_w();
    if n.is_multiple_of(2) {
        hw
    } else {
        hw * two_pow(1 - field.o_d as i64)
    }
}

/// `vol_C` of the Hodge bundle on `M_W`: `A(0) 2^(n-1)` (odd `n`) or `A(0) 2^(n-o(D))` (even `n`).
pub fn vol_c_hodge_mw(spec: &SpaceSpec, a0: &Rational) -> Rational {
    let n = spec.n as i64;
    let e = if n % 2 == 1 { n - 1 } else { n - spec.field.o_d as i64 };
    a0 * two_pow(e)
}

pub fn vol_c_k(spec: &SpaceSpec, a0: &Rational) -> Rational {
    let f = &spec.field;
    f.h_over_w() * two_pow(spec.n as i64 - f.o_d as i64) * a0
}

pub fn vol_c_l(spec: &SpaceSpec, a0: &Rational) -> Rational {
    let f = &spec.field;
    f.h_over_w() * two_pow(1 - f.o_d as i64) * a0
}

fn dlog_a_v(ctx: &Context, spec: &SpaceSpec) -> Result<(Jet, Rational)> {
    let a0 = a_v_exact0(spec);
    let factored = a_v_factored_exact0(spec);
    assert_eq!(a0, factored, "A_V(0) factorization failed for {spec}");
    let jet = a_v(ctx, spec, &Jet::var_at(ctx, 0))?;
    let exact = ctx.rat(&a0);
    if (&jet.val - &exact).abs() > ctx.tol(5) * &exact {
        return Err(Error::PrecisionLoss(format!(
            "A_V(0) jet disagrees with the exact value for {spec}"
        )));
    }
    Ok((jet, a0))
}

pub fn volume_report(ctx: &Context, spec: &SpaceSpec, exceptional: &[Exceptional]) -> Result<VolumeReport> {
    let field = &spec.field;
    let n = spec.n;
    let fc = field_constants(ctx, field)?;
    let c0n = c0_from(ctx, field, n, &fc.r);
    let logd = ctx.real(field.d as i64).ln();
    let (jet, a0) = dlog_a_v(ctx, spec)?;
    let a_dlog = jet.dlog();
    let mut checks = Vec::new();

    let hodge_mw = vol_c_hodge_mw(spec, &a0);
    let bracket_hodge = &a_dlog * 2 - &c0n * n as i64 + &logd;
    let vol_hat_hodge_mw = &bracket_hodge * ctx.rat(&hodge_mw);
    let tn = t_n(field, n);

    let mut rep = VolumeReport {
        spec: spec.clone(),
        digits: ctx.digits(),
        a0: a0.clone(),
        a_dlog: a_dlog.clone(),
        t_n: tn.clone(),
        vol_c_hodge_mw: hodge_mw.clone(),
        vol_c_l: None,
        vol_c_k: None,
        vol_c_hodge_sv: None,
        vol_hat_hodge_mw,
        vol_hat_k: None,
        vol_hat_hodge_sv: None,
        vol_hat_l: None,
        vol_hat_l_exceptional: None,
        exceptional: exceptional.to_vec(),
        constants: Constants {
            c0: c0n.clone(),
            c1: fc.c1.clone(),
            c2: None,
            c3: None,
            h_falt: fc.h_falt.clone(),
        },
        checks: Vec::new(),
        checks_pass: true,
    };

    if n == 1 {
        checks.push(Check {
            name: "A(0) = h/w".into(),
            pass: a0 == field.h_over_w(),
        });
    } else {
        let k = vol_c_k(spec, &a0);
        let l = vol_c_l(spec, &a0);
        let kr = ctx.rat(&k);
        let lr = ctx.rat(&l);
        let vol_hat_k = (&a_dlog * 2 + &logd) * &kr;
        let vol_hat_sv = &bracket_hodge * &kr;
        let mut exc = ctx.real(0);
        for e in exceptional {
            exc = exc + ctx.rat(&e.m_e) * ctx.real(e.p as i64).ln();
        }
        let sign = if n % 2 == 1 { 1 } else { -1 };
        let exc = exc * sign / 2;
        let vol_hat_l = (&a_dlog + &logd / 2) * &lr + &exc;

        checks.push(Check {
            name: "volC_K = 2^(n-1) volC_L".into(),
            pass: k == (&l * two_pow(n as i64 - 1)),
        });
        checks.push(Check {
            name: "volC_hodge_MW * t_n = volC_K".into(),
            pass: Rational::from(&hodge_mw * &tn) == k,
        });
        checks.push(Check {
            name: "volC entries positive".into(),
            pass: a0 > 0 && k > 0 && l > 0 && hodge_mw > 0,
        });
        if n == 2 {
            checks.push(Check {
                name: "A(0) = h/(24w) prod(1 + l*)".into(),
                pass: base_case_a0(spec) == a0,
            });
        }
        let c2n = c2(ctx, field, n);
        let c3n = {
            let pi = ctx.pi();
            &fc.h_falt * (4 - 2 * n as i64) + (&pi * &pi * 4 * field.d as i64).ln()
        };
        let resid = (&c0n - (&fc.c1 * 2 + &c2n + &c3n)).abs();
        checks.push(Check {
            name: "C0 = 2 C1 + C2 + C3".into(),
            pass: resid < ctx.tol(5),
        });
        rep.constants.c2 = Some(c2n);
        rep.constants.c3 = Some(c3n);
        rep.vol_c_k = Some(k.clone());
        rep.vol_c_hodge_sv = Some(k);
        rep.vol_c_l = Some(l);
        rep.vol_hat_k = Some(vol_hat_k);
        rep.vol_hat_hodge_sv = Some(vol_hat_sv);
        rep.vol_hat_l = Some(vol_hat_l);
        rep.vol_hat_l_exceptional = Some(exc);
    }
    rep.checks_pass = checks.iter().all(|c| c.pass);
    rep.checks = checks;
    Ok(rep)
}

/// `2 A_V'/A_V - 2 A_V''/A_V'' - 2 b_{V,n}'/b_{V,n}` at 0, with `V''` the
/// same invariants in dimension `n - 1`.
pub fn induction_residual(ctx: &Context, spec: &SpaceSpec) -> Result<Real> {
    assert!(spec.n >= 2);
    let s = Jet::var_at(ctx, 0);
    let lhs = a_v(ctx, spec, &s)?.dlog() * 2 - a_v(ctx, &spec.with_dim(spec.n - 1), &s)?.dlog() * 2;
    let rhs = b_vk(ctx, spec, spec.n, &s)?.dlog() * 2;
    Ok((lhs - rhs).abs())
}

/// Predicted arithmetic intersection numbers along the special divisor of
/// a split prime `p`; the heights are only determined modulo `Q log p`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KrPrediction {
    pub p: u64,
    pub companion: SpaceSpec,
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub chern_integral: Rational,
    #[serde(serialize_with = "crate::report::ser_real")]
    pub height_k_mod_logp: Real,
    #[serde(serialize_with = "crate::report::ser_real")]
    pub height_hodge_mod_logp: Real,
    pub ambiguity: String,
}

pub fn kr_predictions(ctx: &Context, spec: &SpaceSpec, p: u64) -> Result<KrPrediction> {
    let comp = companion_space(spec, p)?;
    let rep = volume_report(ctx, &comp, &[])?;
    let k = rep.vol_c_k.clone().expect("companion has n >= 2");
    let chern = Rational::from(Integer::from(p).pow(spec.n - 1) + 1) * &k;
    let r = l_dlog_at_0(ctx, &spec.field)?;
    let logd = ctx.real(spec.d() as i64).ln();
    let shift = (r + logd / 2) * (1 - spec.n as i64) * ctx.rat(&k);
    Ok(KrPrediction {
        p,
        companion: comp,
        chern_integral: chern,
        height_k_mod_logp: rep.vol_hat_k.unwrap(),
        height_hodge_mod_logp: rep.vol_hat_hodge_sv.unwrap() + shift,
        ambiguity: format!("modulo Q*log({p})"),
    })
}
