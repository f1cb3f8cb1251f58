//! Adaptive integration of the radial functionals
//!
//! ```text
//! int_a^b r^mu |F^(k)(r)|^2 [W_N(r)] dr
//! ```
//!
//! over the support `[a, b]` of a profile, and an exact rational oracle for
//! polynomial profiles.
//!
//! Panels use the 21-point Gauss-Kronrod pair with the QUADPACK error
//! heuristic; the panel with the largest error estimate is bisected until
//! the summed estimate falls below the requested relative tolerance. Wide
//! supports (`b / a > 8`) are integrated in `t = ln r`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::log_weights::LogWeightSpec;
use crate::profile::{exact, poly_derivative, poly_mul, RadialProfile};

pub const MAX_PANELS: usize = 10_000;
/// Relative tolerance for identity checks.
pub const IDENTITY_TOL: f64 = 1e-10;
/// Relative tolerance for sweeps.
pub const SWEEP_TOL: f64 = 1e-8;
pub const MIN_REL_TOL: f64 = 1e-13;
pub const MAX_REL_TOL: f64 = 1e-3;

const LOG_SUBSTITUTION_RATIO: f64 = 8.0;

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_err_estimate: f64,
    pub subdivisions: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Panel {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut kronrod = fc * WGK[10];
    let mut gauss = 0.0;
    let mut abs = kronrod.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for k in 0..10 {
        let x = half * XGK[k];
        let (f1, f2) = (f(center - x), f(center + x));
        fv1[k] = f1;
        fv2[k] = f2;
        kronrod += WGK[k] * (f1 + f2);
        abs += WGK[k] * (f1.abs() + f2.abs());
        if k % 2 == 1 {
            gauss += WG[k / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[10] * (fc - mean).abs();
    for k in 0..10 {
        asc += WGK[k] * ((fv1[k] - mean).abs() + (fv2[k] - mean).abs());
    }
    let value = kronrod * half;
    let (abs, asc) = (abs * half.abs(), asc * half.abs());
    let mut err = ((kronrod - gauss) * half).abs();
    if asc != 0.0 && err != 0.0 {
        err = asc * (200.0 * err / asc).powf(1.5).min(1.0);
    }
    if abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * abs);
    }
    Panel { lo, hi, value, err }
}

/// Adaptive integral of `f` over `[lo, hi]` to relative tolerance `rel_tol`.
pub fn adaptive<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, rel_tol: f64) -> Result<QuadResult> {
    if !(MIN_REL_TOL..=MAX_REL_TOL).contains(&rel_tol) {
        return Err(Error::BadTolerance(rel_tol));
    }
    if hi <= lo {
        return Ok(QuadResult { value: 0.0, abs_err_estimate: 0.0, subdivisions: 0 });
    }
    let first = gauss_kronrod(&f, lo, hi);
    let mut total = first.value;
    let mut err = first.err;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    let mut panels = 1;
    while err > rel_tol * total.abs() {
        if panels >= MAX_PANELS {
            return Err(Error::ToleranceNotMet { value: total, abs_err: err, subdivisions: panels });
        }
        let worst = heap.pop().expect("heap holds every panel");
        let mid = 0.5 * (worst.lo + worst.hi);
        if mid <= worst.lo || mid >= worst.hi {
            // panel cannot be split further in double precision
            return Err(Error::ToleranceNotMet { value: total, abs_err: err, subdivisions: panels });
        }
        let left = gauss_kronrod(&f, worst.lo, mid);
        let right = gauss_kronrod(&f, mid, worst.hi);
        total += left.value + right.value - worst.value;
        err += left.err + right.err - worst.err;
        heap.push(left);
        heap.push(right);
        panels += 1;
        if err <= rel_tol * total.abs() {
            // resum to drop accumulated update drift before the final test
            total = heap.iter().map(|p| p.value).sum();
            err = heap.iter().map(|p| p.err).sum();
        }
    }
    let value: f64 = heap.iter().map(|p| p.value).sum();
    let err: f64 = heap.iter().map(|p| p.err).sum();
    Ok(QuadResult { value, abs_err_estimate: err, subdivisions: panels })
}

/// Integral of `f` over `[a, b]`, `0 < a < b`, switching to `t = ln r` when
/// the support spans more than a small ratio.
pub fn integrate_radial<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<QuadResult> {
    if b / a > LOG_SUBSTITUTION_RATIO {
        adaptive(
            |t: f64| {
                let r = t.exp();
                f(r) * r
            },
            a.ln(),
            b.ln(),
            rel_tol,
        )
    } else {
        adaptive(f, a, b, rel_tol)
    }
}

/// `int r^mu |F^(k)|^2 [W_N] dr` over the support of `F`.
#[derive(Debug, Clone, Copy)]
pub struct WeightedIntegral<'a> {
    pub profile: &'a RadialProfile,
    pub deriv_order: u8,
    pub mu: f64,
    /// Log weight factor; `None` or depth 0 means no factor.
    pub log_weight: Option<&'a LogWeightSpec>,
}

impl<'a> WeightedIntegral<'a> {
    pub fn new(profile: &'a RadialProfile, deriv_order: u8, mu: f64) -> Self {
        Self { profile, deriv_order, mu, log_weight: None }
    }

    pub fn with_log_weight(mut self, spec: &'a LogWeightSpec) -> Self {
        self.log_weight = Some(spec).filter(|s| s.depth() > 0);
        self
    }
}

pub fn integrate(w: &WeightedIntegral<'_>, rel_tol: f64) -> Result<QuadResult> {
    let (a, b) = w.profile.support();
    let k = w.deriv_order.min(2);
    let mu = w.mu;
    match w.log_weight {
        Some(spec) => {
            if !(b < spec.radius()) {
                return Err(Error::DomainError(format!(
                    "support ({a}, {b}) reaches the log weight radius {}",
                    spec.radius()
                )));
            }
            integrate_radial(
                |r| {
                    let d = w.profile.eval(r).order(k);
                    if d == 0.0 {
                        return 0.0;
                    }
                    r.powf(mu) * d * d * spec.factors_unchecked(r).weight
                },
                a,
                b,
                rel_tol,
            )
        }
        None => integrate_radial(
            |r| {
                let d = w.profile.eval(r).order(k);
                r.powf(mu) * d * d
            },
            a,
            b,
            rel_tol,
        ),
    }
}

/// Exact value `rational + log_coeff * ln(b / a)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleValue {
    pub rational: BigRational,
    pub log_coeff: BigRational,
    pub a: f64,
    pub b: f64,
}

impl OracleValue {
    /// The rational and logarithmic parts can cancel to many digits, so the
    /// logarithm is carried in high precision and only the sum is rounded.
    pub fn to_f64(&self) -> f64 {
        if self.log_coeff.is_zero() {
            return rational_to_f64(&self.rational);
        }
        let log = ln_rational(&(exact(self.b) / exact(self.a)), LOG_PRECISION_BITS);
        rational_to_f64(&(&self.rational + &self.log_coeff * log))
    }
}

const LOG_PRECISION_BITS: u64 = 384;

/// `2 atanh(z)` in fixed point with `bits` fractional bits, `|z| <= 1/3`.
fn two_atanh_fixed(z: &BigRational, bits: u64) -> BigInt {
    // shifts floor towards -inf, so run the series on |z| and use oddness
    if z.is_negative() {
        return -two_atanh_fixed(&-z, bits);
    }
    let one = BigInt::one() << bits as usize;
    let zf = (z.numer() * &one) / z.denom();
    let z2 = (&zf * &zf) >> bits as usize;
    let mut power = zf.clone();
    let mut sum = zf;
    let mut k = 1u64;
    loop {
        power = (&power * &z2) >> bits as usize;
        if power.is_zero() {
            break;
        }
        sum += &power / BigInt::from(2 * k + 1);
        k += 1;
    }
    sum * 2
}

/// `ln(x)` for positive rational `x`, accurate to about `2^-bits`.
fn ln_rational(x: &BigRational, bits: u64) -> BigRational {
    let guard = bits + 32;
    // x = 2^m y with y in [1/2, 2]
    let m = x.numer().bits() as i64 - x.denom().bits() as i64;
    let y = if m >= 0 {
        x / BigRational::from_integer(BigInt::one() << m as usize)
    } else {
        x * BigRational::from_integer(BigInt::one() << (-m) as usize)
    };
    let one = BigRational::one();
    let z = (&y - &one) / (&y + &one);
    let ln_y = two_atanh_fixed(&z, guard);
    let ln2 = two_atanh_fixed(&BigRational::new(1.into(), 3.into()), guard);
    let fixed = ln_y + ln2 * BigInt::from(m);
    BigRational::new(fixed, BigInt::one() << guard as usize)
}

/// Nearest-ish `f64` to a big rational: the integer quotient is taken with
/// at least 64 significant bits before scaling back.
pub fn rational_to_f64(x: &BigRational) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    let (num, den) = (x.numer(), x.denom());
    let shift = 64 + den.bits() as i64 - num.bits() as i64;
    let q = if shift >= 0 { (num << shift as usize) / den } else { num / (den << (-shift) as usize) };
    let mantissa = q.to_f64().unwrap_or(f64::NAN);
    // split the power of two so intermediate factors stay finite
    let half = (-shift / 2) as i32;
    mantissa * 2f64.powi(half) * 2f64.powi(-shift as i32 - half)
}

fn rational_pow(x: &BigRational, e: i64) -> BigRational {
    let base = if e < 0 { x.recip() } else { x.clone() };
    let mut acc = BigRational::one();
    for _ in 0..e.unsigned_abs() {
        acc *= &base;
    }
    acc
}

/// `int_a^b r^mu |F^(k)(r)|^2 dr` in exact arithmetic, for polynomial
/// profiles and integral `mu`. The square is expanded as a Laurent
/// polynomial and integrated term by term.
pub fn oracle_poly_power(profile: &RadialProfile, deriv_order: u8, mu: f64) -> Result<OracleValue> {
    if mu.fract() != 0.0 || !mu.is_finite() {
        return Err(Error::NonIntegerExponent(mu));
    }
    let mu = mu as i64;
    let mut poly = profile.exact_polynomial().ok_or(Error::NonPolynomialProfile)?;
    for _ in 0..deriv_order.min(2) {
        poly = poly_derivative(&poly);
    }
    let square = poly_mul(&poly, &poly);
    let (a, b) = profile.support();
    Ok(integrate_laurent(&square, mu, a, b))
}

/// `int_a^b r^mu sum_i c_i r^i dr` exactly, with `a, b` taken as the exact
/// binary values of the floats.
pub fn integrate_laurent(coeffs: &[BigRational], mu: i64, a: f64, b: f64) -> OracleValue {
    let (ea, eb) = (exact(a), exact(b));
    let mut rational = BigRational::zero();
    let mut log_coeff = BigRational::zero();
    for (i, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let e = i as i64 + mu;
        if e == -1 {
            log_coeff += c;
        } else {
            let span = rational_pow(&eb, e + 1) - rational_pow(&ea, e + 1);
            rational += c * span / BigRational::from_integer((e + 1).into());
        }
    }
    OracleValue { rational, log_coeff, a, b }
}
