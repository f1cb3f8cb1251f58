//! Compactly supported radial test functions with closed-form first and
//! second derivatives, and finite spherical-mode expansions built from them.

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{SphericalMode, ValidatedParameters};

/// Default bump exponent; `F''` is then `C^1`.
pub const DEFAULT_EXPONENT: u32 = 4;

/// `(F, F', F'')` at one point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet {
    /// Component of order 0, 1 or 2.
    #[inline]
    pub fn order(&self, k: u8) -> f64 {
        match k {
            0 => self.value,
            1 => self.d1,
            _ => self.d2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    /// `(r - a)^p (b - r)^p q(r)`
    Poly { p: u32, modulation: Vec<f64> },
    /// `r^s u^p (1 - u)^p q(u)` with `u = ln(r/a) / ln(b/a)`
    Log { p: u32, exponent: f64, modulation: Vec<f64> },
    /// `F(scale * r)`
    Scaled { base: Box<RadialProfile>, scale: f64 },
}

/// A `C^2` function on `(0, inf)` vanishing outside `[a, b]`, `a > 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "ProfileRecord", try_from = "ProfileRecord")]
pub struct RadialProfile {
    a: f64,
    b: f64,
    kind: Kind,
}

fn check_support(a: f64, b: f64) -> Result<()> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::BadSupport { a, b, reason: "left endpoint must be positive" });
    }
    if !(b > a) || !b.is_finite() {
        return Err(Error::BadSupport { a, b, reason: "need a < b" });
    }
    Ok(())
}

fn check_modulation(modulation: &[f64]) -> Result<Vec<f64>> {
    if modulation.is_empty() {
        return Ok(vec![1.0]);
    }
    if modulation.iter().any(|c| !c.is_finite()) {
        return Err(Error::Config("modulation coefficients must be finite".into()));
    }
    if modulation.iter().all(|&c| c == 0.0) {
        return Err(Error::ZeroProfile);
    }
    Ok(modulation.to_vec())
}

/// Value and two derivatives of the polynomial `sum c_i x^i`.
#[inline]
fn poly_jet(coeffs: &[f64], x: f64) -> (f64, f64, f64) {
    let (mut q, mut q1, mut q2) = (0.0, 0.0, 0.0);
    for &c in coeffs.iter().rev() {
        q2 = q2 * x + 2.0 * q1;
        q1 = q1 * x + q;
        q = q * x + c;
    }
    (q, q1, q2)
}

/// `(x - lo)^p (hi - x)^p q(x)` and its first two derivatives in `x`.
#[inline]
fn bump_jet(x: f64, lo: f64, hi: f64, p: u32, modulation: &[f64]) -> (f64, f64, f64) {
    let pf = p as f64;
    let (l, h) = (x - lo, hi - x);
    let (lp2, hp2) = (l.powi(p as i32 - 2), h.powi(p as i32 - 2));
    let (lp1, hp1) = (lp2 * l, hp2 * h);
    let (u, u1, u2) = (lp1 * l, pf * lp1, pf * (pf - 1.0) * lp2);
    let (v, v1, v2) = (hp1 * h, -pf * hp1, pf * (pf - 1.0) * hp2);
    let (q, q1, q2) = poly_jet(modulation, x);
    let uv = u * v;
    let uv1 = u1 * v + u * v1;
    let uv2 = u2 * v + 2.0 * u1 * v1 + u * v2;
    (uv * q, uv1 * q + uv * q1, uv2 * q + 2.0 * uv1 * q1 + uv * q2)
}

impl RadialProfile {
    /// `F(r) = (r - a)^p (b - r)^p q(r)` on `[a, b]`. An empty modulation
    /// means `q = 1`; coefficients are in increasing degree.
    pub fn poly_bump(a: f64, b: f64, p: u32, modulation: &[f64]) -> Result<Self> {
        check_support(a, b)?;
        if p < 3 {
            return Err(Error::SmoothnessTooLow(p));
        }
        let modulation = check_modulation(modulation)?;
        Ok(Self { a, b, kind: Kind::Poly { p, modulation } })
    }

    /// `F(r) = r^s u^p (1 - u)^p q(u)` with `u = ln(r/a) / ln(b/a)`: a power
    /// law cut off smoothly in logarithmic scale.
    pub fn log_bump(a: f64, b: f64, p: u32, exponent: f64, modulation: &[f64]) -> Result<Self> {
        check_support(a, b)?;
        if p < 3 {
            return Err(Error::SmoothnessTooLow(p));
        }
        if !exponent.is_finite() {
            return Err(Error::Config(format!("exponent {exponent} is not finite")));
        }
        let modulation = check_modulation(modulation)?;
        Ok(Self { a, b, kind: Kind::Log { p, exponent, modulation } })
    }

    pub fn support(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    /// Whether `F` is a polynomial in `r` on its support.
    pub fn is_polynomial(&self) -> bool {
        match &self.kind {
            Kind::Poly { .. } => true,
            Kind::Log { .. } => false,
            Kind::Scaled { base, .. } => base.is_polynomial(),
        }
    }

    /// `(F, F', F'')` at `r`; exactly zero outside the support.
    #[inline]
    pub fn eval(&self, r: f64) -> Jet {
        if !(r > self.a && r < self.b) {
            return Jet::default();
        }
        match &self.kind {
            Kind::Poly { p, modulation } => {
                let (value, d1, d2) = bump_jet(r, self.a, self.b, *p, modulation);
                Jet { value, d1, d2 }
            }
            Kind::Log { p, exponent, modulation } => {
                let width = (self.b / self.a).ln();
                let u = (r / self.a).ln() / width;
                let (g, gu, guu) = bump_jet(u, 0.0, 1.0, *p, modulation);
                let (g1, g2) = (gu / width, guu / (width * width));
                let s = *exponent;
                let rs = r.powf(s);
                Jet {
                    value: rs * g,
                    d1: rs / r * (s * g + g1),
                    d2: rs / (r * r) * (s * (s - 1.0) * g + (2.0 * s - 1.0) * g1 + g2),
                }
            }
            Kind::Scaled { base, scale } => {
                let j = base.eval(scale * r);
                Jet { value: j.value, d1: scale * j.d1, d2: scale * scale * j.d2 }
            }
        }
    }

    /// Exact coefficients of `F` as a polynomial in `r` on its support,
    /// in increasing degree, or `None` for non-polynomial profiles.
    pub fn exact_polynomial(&self) -> Option<Vec<BigRational>> {
        match &self.kind {
            Kind::Poly { p, modulation } => {
                let a = exact(self.a);
                let b = exact(self.b);
                let left = vec![-a, BigRational::one()];
                let right = vec![b, -BigRational::one()];
                let mut acc = vec![BigRational::one()];
                for _ in 0..*p {
                    acc = poly_mul(&acc, &left);
                    acc = poly_mul(&acc, &right);
                }
                let q: Vec<BigRational> = modulation.iter().map(|&c| exact(c)).collect();
                Some(poly_mul(&acc, &q))
            }
            Kind::Log { .. } => None,
            Kind::Scaled { base, scale } => {
                let coeffs = base.exact_polynomial()?;
                let s = exact(*scale);
                let mut power = BigRational::one();
                Some(
                    coeffs
                        .into_iter()
                        .map(|c| {
                            let out = c * &power;
                            power *= &s;
                            out
                        })
                        .collect(),
                )
            }
        }
    }

    /// Sample of the profile at the midpoint of its support, used to reject
    /// profiles that vanish identically.
    fn probe_nonzero(&self) -> bool {
        (1..16).any(|i| self.eval(self.a + (self.b - self.a) * i as f64 / 16.0).value != 0.0)
    }
}

pub(crate) fn exact(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float")
}

pub(crate) fn poly_mul(x: &[BigRational], y: &[BigRational]) -> Vec<BigRational> {
    if x.is_empty() || y.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); x.len() + y.len() - 1];
    for (i, xi) in x.iter().enumerate() {
        if xi.is_zero() {
            continue;
        }
        for (k, yk) in y.iter().enumerate() {
            out[i + k] += xi * yk;
        }
    }
    out
}

pub(crate) fn poly_derivative(x: &[BigRational]) -> Vec<BigRational> {
    x.iter().enumerate().skip(1).map(|(i, c)| c * BigRational::from_integer((i as i64).into())).collect()
}

/// `F_hat(y) = F(rho * y / R)`: a profile supported in `(0, rho)` mapped
/// into `(0, R)`.
pub fn rescale_to(profile: &RadialProfile, rho: f64, radius: f64) -> Result<RadialProfile> {
    let (a, b) = profile.support();
    if !(rho > 0.0) || !(radius > 0.0) {
        return Err(Error::BadSupport { a, b, reason: "rho and R must be positive" });
    }
    if !(b < rho) {
        return Err(Error::BadSupport { a, b, reason: "support must lie inside (0, rho)" });
    }
    let scale = rho / radius;
    let (na, nb) = (a / scale, b / scale);
    if !(na > 0.0) || !(nb < radius) {
        return Err(Error::BadSupport { a: na, b: nb, reason: "rescaled support touches 0 or R" });
    }
    Ok(RadialProfile { a: na, b: nb, kind: Kind::Scaled { base: Box::new(profile.clone()), scale } })
}

/// Shorthand for [`RadialProfile::eval`].
pub fn eval_with_derivs(profile: &RadialProfile, r: f64) -> Jet {
    profile.eval(r)
}

/// Seeded random polynomial bump inside `(0.05 R, 0.95 R)`.
pub fn random_poly_bump<G: Rng + ?Sized>(rng: &mut G, radius: f64) -> RadialProfile {
    let a = radius * rng.gen_range(0.05..0.45);
    let b = rng.gen_range(a + 0.1 * radius..0.95 * radius);
    let p = rng.gen_range(3..=5);
    let degree = rng.gen_range(0..=2);
    let mut modulation = vec![1.0];
    for k in 1..=degree {
        modulation.push(rng.gen_range(-0.5..0.5) / radius.powi(k));
    }
    RadialProfile::poly_bump(a, b, p, &modulation).expect("sampled support is valid")
}

/// Serialized form of a [`RadialProfile`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProfileRecord {
    PolyBump { a: f64, b: f64, p: u32, coefficients: Vec<f64> },
    LogBump { a: f64, b: f64, p: u32, exponent: f64, coefficients: Vec<f64> },
    Scaled { scale: f64, base: Box<ProfileRecord> },
}

impl From<RadialProfile> for ProfileRecord {
    fn from(p: RadialProfile) -> Self {
        match p.kind {
            Kind::Poly { p: exp, modulation } => {
                ProfileRecord::PolyBump { a: p.a, b: p.b, p: exp, coefficients: modulation }
            }
            Kind::Log { p: exp, exponent, modulation } => {
                ProfileRecord::LogBump { a: p.a, b: p.b, p: exp, exponent, coefficients: modulation }
            }
            Kind::Scaled { base, scale } => ProfileRecord::Scaled { scale, base: Box::new((*base).into()) },
        }
    }
}

impl TryFrom<ProfileRecord> for RadialProfile {
    type Error = Error;

    fn try_from(r: ProfileRecord) -> Result<Self> {
        match r {
            ProfileRecord::PolyBump { a, b, p, coefficients } => RadialProfile::poly_bump(a, b, p, &coefficients),
            ProfileRecord::LogBump { a, b, p, exponent, coefficients } => {
                RadialProfile::log_bump(a, b, p, exponent, &coefficients)
            }
            ProfileRecord::Scaled { scale, base } => {
                let base = RadialProfile::try_from(*base)?;
                if !(scale > 0.0) || !scale.is_finite() {
                    return Err(Error::Config(format!("scale {scale} must be positive")));
                }
                let (a, b) = base.support();
                let (na, nb) = (a / scale, b / scale);
                check_support(na, nb)?;
                Ok(RadialProfile { a: na, b: nb, kind: Kind::Scaled { base: Box::new(base), scale } })
            }
        }
    }
}

impl RadialProfile {
    /// One-line JSON record, stable across runs.
    pub fn to_record_string(&self) -> String {
        serde_json::to_string(self).expect("profile records serialize")
    }

    pub fn from_record_str(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Config(format!("bad profile record: {e}")))
    }
}

/// `f(r, theta) = sum_j F_j(r) phi_j(theta)`, one representative
/// eigenfunction per degree.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeExpansion {
    params: ValidatedParameters,
    terms: Vec<(SphericalMode, RadialProfile)>,
}

impl ModeExpansion {
    pub fn new(params: ValidatedParameters, terms: Vec<(SphericalMode, RadialProfile)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::EmptyExpansion);
        }
        let radius = params.radius();
        let mut seen = std::collections::BTreeSet::new();
        for (mode, profile) in &terms {
            if mode.n != params.n() {
                return Err(Error::ModeDimensionMismatch(params.n()));
            }
            if !seen.insert(mode.j) {
                return Err(Error::DuplicateMode(mode.j));
            }
            let (a, b) = profile.support();
            if !(b < radius) {
                return Err(Error::BadSupport { a, b, reason: "support must lie inside (0, R)" });
            }
            if !profile.probe_nonzero() {
                return Err(Error::ZeroProfile);
            }
        }
        Ok(Self { params, terms })
    }

    /// Build from degrees and profiles.
    pub fn from_degrees(
        params: ValidatedParameters,
        terms: impl IntoIterator<Item = (u32, RadialProfile)>,
    ) -> Result<Self> {
        let terms = terms.into_iter().map(|(j, f)| (params.mode(j), f)).collect();
        Self::new(params, terms)
    }

    /// Single separable term `F(r) phi_j(theta)`.
    pub fn single(params: ValidatedParameters, j: u32, profile: RadialProfile) -> Result<Self> {
        Self::from_degrees(params, [(j, profile)])
    }

    pub fn params(&self) -> &ValidatedParameters {
        &self.params
    }

    pub fn terms(&self) -> &[(SphericalMode, RadialProfile)] {
        &self.terms
    }

    /// Same terms under different parameters (same dimension).
    pub fn with_params(&self, params: ValidatedParameters) -> Result<Self> {
        Self::new(params, self.terms.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn bump_values() {
        let f = RadialProfile::poly_bump(0.2, 0.8, 4, &[]).unwrap();
        // 0.3^4 * 0.3^4
        assert!(rel(f.eval(0.5).value, 6.561e-5) < 1e-12);
        assert_eq!(f.eval(0.2), Jet::default());
        assert_eq!(f.eval(0.8), Jet::default());
        assert_eq!(f.eval(0.9), Jet::default());
        assert!(f.eval(0.5).d1.abs() < 1e-18);
        // one step inside the endpoint: F, F', F'' vanish to order 4, 3, 2
        let h = 1e-4;
        let j = f.eval(0.2 + h);
        assert!(j.value.abs() < 1e-15 && j.d1.abs() < 1e-10 && j.d2.abs() < 1e-6);
    }

    #[test]
    fn errors() {
        assert!(matches!(RadialProfile::poly_bump(0.5, 0.5, 4, &[]), Err(Error::BadSupport { .. })));
        assert!(matches!(RadialProfile::poly_bump(0.0, 0.5, 4, &[]), Err(Error::BadSupport { .. })));
        assert_eq!(RadialProfile::poly_bump(0.1, 0.5, 2, &[]), Err(Error::SmoothnessTooLow(2)));
        assert_eq!(RadialProfile::poly_bump(0.1, 0.5, 3, &[0.0, 0.0]), Err(Error::ZeroProfile));
    }

    #[test]
    fn modulated_first_derivative_matches_central_difference() {
        let f = RadialProfile::poly_bump(0.25, 0.75, 3, &[0.0, 1.0]).unwrap();
        let h = 1e-6;
        let fd = (f.eval(0.5 + h).value - f.eval(0.5 - h).value) / (2.0 * h);
        assert!(rel(f.eval(0.5).d1, fd) < 1e-7);
    }

    #[test]
    fn second_derivative_matches_second_difference() {
        let f = RadialProfile::poly_bump(0.2, 0.8, 4, &[]).unwrap();
        let h = 1e-4;
        let r = 0.4;
        let fd = (f.eval(r + h).value - 2.0 * f.eval(r).value + f.eval(r - h).value) / (h * h);
        assert!(rel(f.eval(r).d2, fd) < 1e-6);
    }

    #[test]
    fn random_bumps_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let f = random_poly_bump(&mut rng, 1.0);
            let (a, b) = f.support();
            // errors are measured against the sup norm of each derivative
            let grid = (1..200).map(|i| f.eval(a + (b - a) * i as f64 / 200.0));
            let (sup1, sup2) = grid.fold((0.0f64, 0.0f64), |(s1, s2), j| (s1.max(j.d1.abs()), s2.max(j.d2.abs())));
            for _ in 0..100 {
                let r = rng.gen_range(a + 0.01 * (b - a)..b - 0.01 * (b - a));
                let j = f.eval(r);
                let h1 = 1e-5 * (b - a);
                let d1 = (f.eval(r + h1).value - f.eval(r - h1).value) / (2.0 * h1);
                let h2 = 1e-4 * (b - a);
                let d2 = (f.eval(r + h2).value - 2.0 * j.value + f.eval(r - h2).value) / (h2 * h2);
                assert!((j.d1 - d1).abs() <= 1e-6 * sup1, "{r}: {} vs {d1}", j.d1);
                assert!((j.d2 - d2).abs() <= 1e-6 * sup2, "{r}: {} vs {d2}", j.d2);
            }
        }
    }

    #[test]
    fn log_bump_derivatives() {
        let f = RadialProfile::log_bump(1e-3, 0.9, 3, -0.5, &[1.0, 0.3]).unwrap();
        for &r in &[2e-3, 0.01, 0.1, 0.5] {
            let j = f.eval(r);
            let h = 1e-5 * r;
            let d1 = (f.eval(r + h).value - f.eval(r - h).value) / (2.0 * h);
            let d2 = (f.eval(r + h).d1 - f.eval(r - h).d1) / (2.0 * h);
            assert!(rel(j.d1, d1) < 1e-7, "{r}");
            assert!(rel(j.d2, d2) < 1e-7, "{r}");
        }
    }

    #[test]
    fn rescaling() {
        let f = RadialProfile::poly_bump(1.0, 2.0, 4, &[]).unwrap();
        let g = rescale_to(&f, 3.0, 1.0).unwrap();
        let (a, b) = g.support();
        assert!((a - 1.0 / 3.0).abs() < 1e-15 && (b - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(g.eval(0.5).value, f.eval(1.5).value);
        assert!(rel(g.eval(0.5).d2, 9.0 * f.eval(1.5).d2) < 1e-15);
        assert!(rescale_to(&f, 2.0, 1.0).is_err());
        assert!(rescale_to(&f, 1.5, 1.0).is_err());
    }

    #[test]
    fn exact_polynomial_agrees_with_eval() {
        use num_traits::ToPrimitive;
        let f = RadialProfile::poly_bump(0.2, 0.8, 4, &[1.0, -0.3]).unwrap();
        let g = rescale_to(&f, 2.0, 1.0).unwrap();
        for prof in [&f, &g] {
            let c = prof.exact_polynomial().unwrap();
            let (a, b) = prof.support();
            let r = 0.5 * (a + b);
            let v: f64 = c.iter().enumerate().map(|(i, c)| c.to_f64().unwrap() * r.powi(i as i32)).sum();
            assert!(rel(v, prof.eval(r).value) < 1e-9);
        }
        assert!(RadialProfile::log_bump(0.1, 0.5, 3, 0.0, &[]).unwrap().exact_polynomial().is_none());
    }

    #[test]
    fn record_round_trip() {
        let f = RadialProfile::log_bump(1e-6, 0.5, 3, 0.25, &[1.0, 0.1]).unwrap();
        let g = rescale_to(&RadialProfile::poly_bump(0.2, 0.8, 4, &[]).unwrap(), 2.0, 1.0).unwrap();
        for p in [f, g] {
            let s = p.to_record_string();
            assert_eq!(RadialProfile::from_record_str(&s).unwrap(), p);
        }
        let bad = r#"{"kind":"poly_bump","a":0.5,"b":0.2,"p":4,"coefficients":[]}"#;
        assert!(RadialProfile::from_record_str(bad).is_err());
    }
}
