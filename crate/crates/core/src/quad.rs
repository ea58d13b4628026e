//! Adaptive Gauss-Kronrod quadrature in double precision.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Default evaluation budget.
pub const MAX_EVALS: usize = 1_000_000;

#[derive(Clone, Copy, Debug)]
struct Segment {
    a: f64,
    b: f64,
    val: f64,
    err: f64,
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    Segment {
        a,
        b,
        val: kron * h,
        err: ((kron - gauss) * h).abs(),
    }
}

/// `int_a^b f` to relative tolerance `rel` (or absolute `abs`), bisecting
/// the worst segment until the summed error estimate is small enough.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel: f64, abs: f64, max_evals: usize) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let mut segs = vec![gk15(&f, a, b)];
    let mut evals = 15;
    loop {
        let total: f64 = segs.iter().map(|s| s.val).sum();
        let err: f64 = segs.iter().map(|s| s.err).sum();
        if !total.is_finite() {
            return Err(Error::QuadratureFail("non-finite integrand".into()));
        }
        if err <= abs.max(rel * total.abs()) {
            return Ok(total);
        }
        if evals + 30 > max_evals {
            return Err(Error::QuadratureFail(format!(
                "error estimate {err:e} above tolerance after {evals} evaluations"
            )));
        }
        let (worst, _) = segs
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.err.total_cmp(&y.1.err))
            .unwrap();
        let s = segs.swap_remove(worst);
        let mid = 0.5 * (s.a + s.b);
        if mid <= s.a || mid >= s.b {
            return Err(Error::QuadratureFail("segment cannot be split further".into()));
        }
        segs.push(gk15(&f, s.a, mid));
        segs.push(gk15(&f, mid, s.b));
        evals += 30;
    }
}

/// `int_0^inf f` for an integrand bounded by `C t^k e^(-z t)` for `t >= 1`:
/// the cut-off `T` is doubled until that tail bound is negligible.
pub fn integrate_exp_tail<F: Fn(f64) -> f64>(f: F, z: f64, k: f64, c: f64, rel: f64) -> Result<f64> {
    let mut t = (40.0 / z).max(1.0);
    loop {
        // split at 1/z so that the peak region is resolved separately
        let knee = (1.0 / z).min(t);
        let head = integrate(&f, 0.0, knee, rel, 0.0, MAX_EVALS / 2)?;
        let body = integrate(&f, knee, t, rel, rel * head.abs() * 1e-2, MAX_EVALS / 2)?;
        let total = head + body;
        // int_T^inf t^k e^(-zt) <= T^k e^(-zT) / (z - k/T) when z > k/T
        let slope = z - k.max(0.0) / t;
        if slope > 0.5 * z {
            let bound = c * (k * t.ln() - z * t).exp() / slope;
            if bound <= 0.1 * rel * total.abs() || bound < 1e-300 {
                return Ok(total);
            }
        }
        t *= 2.0;
        if t > 1e8 {
            return Err(Error::QuadratureFail("tail cut-off did not settle".into()));
        }
    }
}
