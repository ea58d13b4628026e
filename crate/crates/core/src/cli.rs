//! Command-line front end.

use rug::ops::Pow;
use std::collections::BTreeMap;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use rug::{Integer, Rational};
use serde_json::{json, Value};

use crate::arith::forms::class_number_by_forms;
use crate::arith::ntheory::is_prime;
use crate::arith::Context;
use crate::borcherds::{borcherds_weight, vertical_log_coefficients, weight_cross_check, BorcherdsInput};
use crate::densities::{enumerate_norms, euler_factor, euler_series, local_units, rep_number};
use crate::dirichlet::{l_dlog_at_0_jet, l_dlog_at_0_log_gamma, make_field};
use crate::eisenstein::{coeff_b, coeff_dlog_split_prime, CoeffRequest};
use crate::error::{Error, Result};
use crate::report::{envelope, error_object, real_string, to_csv};
use crate::spaces::{enumerate_spaces, parse_inv, SpaceSpec};
use crate::volume::{field_constants, volume_report, Exceptional};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_SELFTEST: i32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(
    name = "shimura-vol",
    version,
    about = "Volume constants of unitary Shimura varieties"
)]
pub struct Cli {
    #[command(flatten)]
    pub config: CliConfig,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Debug, Args)]
pub struct CliConfig {
    /// Working precision in decimal digits.
    #[arg(long, global = true, default_value_t = 60, value_parser = clap::value_parser!(u32).range(30..))]
    pub digits: u32,
    /// Run brute-force cross-checks alongside the closed forms.
    #[arg(long, global = true)]
    pub oracle: bool,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub threads: Option<u64>,
}

#[derive(Clone, Debug, Args)]
pub struct SpaceArgs {
    /// Full spec string, e.g. `D=7;n=3;inv=7:-1`.
    #[arg(long, conflicts_with_all = ["d", "n", "inv"])]
    pub spec: Option<String>,
    #[arg(short = 'D')]
    pub d: Option<i64>,
    #[arg(short = 'n')]
    pub n: Option<u32>,
    /// Ramified invariants, e.g. `3=1,5=-1`.
    #[arg(long, allow_hyphen_values = true)]
    pub inv: Option<String>,
}

impl SpaceArgs {
    pub fn resolve(&self) -> Result<SpaceSpec> {
        if let Some(s) = &self.spec {
            return s.parse();
        }
        let (Some(d), Some(n)) = (self.d, self.n) else {
            return Err(Error::InvalidInput("need --spec or both -D and -n".into()));
        };
        let field = make_field(d)?;
        let inv = match &self.inv {
            Some(s) => parse_inv(s)?,
            None => BTreeMap::new(),
        };
        SpaceSpec::new(field, n, inv)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Class number, Faltings height and L'(0)/L(0) of Q(sqrt(-D)).
    Field {
        #[arg(short = 'D', allow_hyphen_values = true)]
        d: i64,
    },
    /// Complex and arithmetic volumes of a hermitian space.
    Volume {
        #[command(flatten)]
        space: SpaceArgs,
        /// Exceptional multiplicities `mE@p,...`.
        #[arg(long)]
        exceptional: Option<String>,
    },
    /// Eisenstein coefficient B(m, 0, s0) and its derivative.
    Coeff {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(short = 'm')]
        m: u64,
    },
    /// Local Euler factor and representation numbers at p.
    Density {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(short = 'p')]
        p: u64,
        #[arg(short = 'm', allow_hyphen_values = true)]
        m: i64,
        /// Largest exponent nu for the listed N_m(p^nu).
        #[arg(long, default_value_t = 3)]
        nu_max: u32,
    },
    /// Borcherds weight k(f) and the vertical log-coefficients.
    Weight {
        #[command(flatten)]
        space: SpaceArgs,
        /// Principal-part coefficients `p:c,...` with p = 1 mod D.
        #[arg(long, allow_hyphen_values = true)]
        coeffs: String,
    },
    /// Volume summary for every space over a grid of fields and dimensions.
    Table {
        #[arg(long, value_delimiter = ',', default_value = "7,11,15,19,23")]
        ds: Vec<i64>,
        #[arg(long, default_value_t = 5)]
        n_max: u32,
    },
    /// Run the full oracle suite.
    Selftest,
}

pub fn parse_exceptional(s: &str) -> Result<Vec<Exceptional>> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (m, p) = part
            .split_once('@')
            .ok_or_else(|| Error::InvalidInput(format!("exceptional entry `{part}` is not mE@p")))?;
        let m_e: Rational = m
            .trim()
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad multiplicity `{m}`")))?;
        let p: u64 = p
            .trim()
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad prime `{p}`")))?;
        if !is_prime(p) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        out.push(Exceptional { m_e, p });
    }
    Ok(out)
}

pub fn parse_coeffs(s: &str) -> Result<BTreeMap<u64, i64>> {
    let mut out = BTreeMap::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (p, c) = part
            .split_once([':', '='])
            .ok_or_else(|| Error::InvalidInput(format!("coefficient entry `{part}` is not p:c")))?;
        let p: u64 = p
            .trim()
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad prime `{p}`")))?;
        let c: i64 = c
            .trim()
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad coefficient `{c}`")))?;
        if out.insert(p, c).is_some() {
            return Err(Error::InvalidInput(format!("prime {p} given twice")));
        }
    }
    Ok(out)
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

fn cmd_field(ctx: &Context, cfg: &CliConfig, d: i64) -> Result<Value> {
    let field = make_field(d)?;
    let fc = field_constants(ctx, &field)?;
    let mut v = to_value(&field);
    let obj = v.as_object_mut().unwrap();
    let d_val = obj.remove("d").unwrap();
    obj.insert("D".into(), d_val);
    obj.insert("h_over_w".into(), field.h_over_w().to_string().into());
    obj.insert("L_dlog_0".into(), real_string(&fc.r).into());
    obj.insert("hFalt".into(), real_string(&fc.h_falt).into());
    obj.insert("C1".into(), real_string(&fc.c1).into());
    if cfg.oracle {
        let forms = class_number_by_forms(field.d);
        let routes = (l_dlog_at_0_log_gamma(ctx, &field) - l_dlog_at_0_jet(ctx, &field)?).abs();
        obj.insert(
            "oracle".into(),
            json!({
                "h_by_forms": forms,
                "h_match": field.h == forms,
                "L_dlog_routes_diff": real_string(&routes),
                "L_dlog_routes_agree": routes < ctx.tol(10),
            }),
        );
    }
    Ok(v)
}

fn cmd_volume(ctx: &Context, space: &SpaceArgs, exceptional: Option<&str>) -> Result<Value> {
    let spec = space.resolve()?;
    let exc = match exceptional {
        Some(s) => parse_exceptional(s)?,
        None => Vec::new(),
    };
    let rep = volume_report(ctx, &spec, &exc)?;
    Ok(to_value(&rep))
}

fn cmd_coeff(ctx: &Context, cfg: &CliConfig, space: &SpaceArgs, m: u64) -> Result<Value> {
    let spec = space.resolve()?;
    let req = CoeffRequest { spec: spec.clone(), m };
    let b = coeff_b(ctx, &req)?;
    let mut v = json!({
        "spec": to_value(&spec),
        "m": m,
        "s0": req.s0().to_string(),
        "B": b.value.to_string(),
        "Bprime": real_string(&b.jet.der),
        "B_dlog": real_string(&b.jet.dlog()),
    });
    if cfg.oracle && is_prime(m) && m % spec.d() == 1 {
        let closed = coeff_dlog_split_prime(ctx, &spec, m)?;
        let diff = (b.jet.dlog() - closed).abs();
        v["oracle"] = json!({
            "B_dlog_closed_diff": real_string(&diff),
            "B_dlog_match": diff < ctx.tol(10),
        });
    }
    Ok(v)
}

fn cmd_density(ctx: &Context, cfg: &CliConfig, space: &SpaceArgs, p: u64, m: i64, nu_max: u32) -> Result<Value> {
    let spec = space.resolve()?;
    if !is_prime(p) {
        return Err(Error::InvalidInput(format!("{p} is not prime")));
    }
    let poly = euler_factor(&spec, p, m)?;
    let mut reps = Vec::new();
    for nu in 1..=nu_max {
        reps.push(rep_number(ctx, m, p, nu, &spec)?.to_string());
    }
    let mut v = json!({
        "spec": to_value(&spec),
        "p": p,
        "m": m,
        "polynomial": to_value(&poly),
        "rendered": poly.render(),
        "N_m": reps,
    });
    if cfg.oracle {
        let units = local_units(&spec, p);
        let mut matched = true;
        let mut checked = Vec::new();
        for nu in 1..=nu_max {
            let q = p.pow(nu);
            let Ok(hist) = enumerate_norms(q, spec.d(), &units) else {
                break;
            };
            let got = rep_number(ctx, m, p, nu, &spec)?;
            matched &= got == hist[m.rem_euclid(q as i64) as usize];
            checked.push(nu);
        }
        let x = Rational::from((1, Integer::from(p).pow(2 * spec.n + 2)));
        let series = euler_series(ctx, &spec, p, m, &x, nu_max.max(2))?;
        let diff = Rational::from(&poly.eval_rational(&x) - &series).abs();
        let bound = Rational::from((10, Integer::from(p).pow(6)));
        v["enumeration-match"] = json!(matched);
        v["enumeration-nu"] = json!(checked);
        v["series-match"] = json!(diff < bound);
    }
    Ok(v)
}

fn cmd_weight(ctx: &Context, space: &SpaceArgs, coeffs: &str) -> Result<Value> {
    let spec = space.resolve()?;
    let input = BorcherdsInput::new(spec, parse_coeffs(coeffs)?)?;
    let k = borcherds_weight(&input)?;
    let k2 = weight_cross_check(ctx, &input)?;
    let vert = vertical_log_coefficients(ctx, &input.spec, &k)?;
    Ok(json!({
        "input": to_value(&input),
        "k": k.to_string(),
        "k_cross_check": k2.to_string(),
        "routes_agree": k == k2,
        "vertical": to_value(&vert),
    }))
}

fn cmd_table(ctx: &Context, ds: &[i64], n_max: u32) -> Result<Value> {
    let mut specs = Vec::new();
    for &d in ds {
        let f = make_field(d)?;
        for n in 1..=n_max {
            specs.extend(enumerate_spaces(&f, n));
        }
    }
    let rows: Vec<Result<Value>> = specs
        .par_iter()
        .map(|spec| {
            let r = volume_report(ctx, spec, &[])?;
            let full = to_value(&r);
            let mut row = json!({
                "spec": spec.canonical(),
                "D": spec.d(),
                "n": spec.n,
                "checks_pass": r.checks_pass,
            });
            for key in [
                "A0",
                "volC_hodge_MW",
                "volC_K",
                "volC_L",
                "volHat_hodge_MW",
                "volHat_K",
                "volHat_L",
            ] {
                row[key] = full[key].clone();
            }
            Ok(row)
        })
        .collect();
    let rows: Vec<Value> = rows.into_iter().collect::<Result<_>>()?;
    Ok(json!({ "rows": rows }))
}

fn cmd_selftest(ctx: &Context) -> (Value, bool) {
    let outcomes = crate::selftest::run_all(ctx);
    let pass = outcomes.iter().all(|o| o.pass);
    (json!({ "pass": pass, "rows": to_value(&outcomes) }), pass)
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Field { .. } => "field",
        Command::Volume { .. } => "volume",
        Command::Coeff { .. } => "coeff",
        Command::Density { .. } => "density",
        Command::Weight { .. } => "weight",
        Command::Table { .. } => "table",
        Command::Selftest => "selftest",
    }
}

fn render(v: &Value, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(v).expect("json");
            s.push('\n');
            s
        }
        Format::Csv => to_csv(v),
    }
}

/// Runs a parsed command and returns the rendered output and exit code.
pub fn execute(cli: &Cli) -> (String, i32) {
    let cfg = &cli.config;
    let ctx = Context::new(cfg.digits);
    let res = match &cli.command {
        Command::Field { d } => cmd_field(&ctx, cfg, *d),
        Command::Volume { space, exceptional } => cmd_volume(&ctx, space, exceptional.as_deref()),
        Command::Coeff { space, m } => cmd_coeff(&ctx, cfg, space, *m),
        Command::Density { space, p, m, nu_max } => cmd_density(&ctx, cfg, space, *p, *m, *nu_max),
        Command::Weight { space, coeffs } => cmd_weight(&ctx, space, coeffs),
        Command::Table { ds, n_max } => cmd_table(&ctx, ds, *n_max),
        Command::Selftest => {
            let (v, pass) = cmd_selftest(&ctx);
            let out = render(&envelope("selftest", cfg.digits, v), cfg.format);
            return (out, if pass { EXIT_OK } else { EXIT_SELFTEST });
        }
    };
    match res {
        Ok(v) => (
            render(&envelope(command_name(&cli.command), cfg.digits, v), cfg.format),
            EXIT_OK,
        ),
        Err(e) => {
            let code = if e.is_numerical() { EXIT_NUMERICAL } else { EXIT_INPUT };
            (render(&error_object(&e), Format::Json), code)
        }
    }
}

/// Parses `args`, configures the worker pool and runs the command.
pub fn main_with_args<I, T>(args: I) -> (String, i32)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            return (e.render().to_string(), code);
        }
    };
    if let Some(t) = cli.config.threads {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t as usize).build_global();
    }
    execute(&cli)
}
