//! Both sides of the one-dimensional log-refined Hardy inequality, its
//! factorization identity, and the `n`-dimensional weighted Hardy-Rellich
//! and Rellich inequalities after reduction to radial integrals over
//! spherical modes.
//!
//! For `f = sum_j F_j phi_j` with orthonormal eigenfunctions,
//!
//! ```text
//! int |x|^gamma |Delta f|^2
//!   = sum_j  int r^{gamma+n-1} |F_j''|^2
//!          + [2 lambda_j + (n-1)(1-gamma)] int r^{gamma+n-3} |F_j'|^2
//!          + lambda_j [lambda_j + (gamma+n-4)(2-gamma)] int r^{gamma+n-5} |F_j|^2
//! int g(|x|) |grad f|^2
//!   = sum_j int g(r) [|F_j'|^2 r^{n-1} + lambda_j |F_j|^2 r^{n-3}]
//! ```
//!
//! so every report is assembled from five radial integrals per mode.

use std::f64::consts::PI;

use serde::Serialize;

use crate::constants::{hardy_rellich_constant, rellich_constant};
use crate::error::{Error, Result};
use crate::log_weights::LogWeightSpec;
use crate::params::{Parameters, SphericalMode, ValidatedParameters};
use crate::profile::{ModeExpansion, RadialProfile};
use crate::quadrature::{integrate, integrate_radial, QuadResult, WeightedIntegral, SWEEP_TOL};

/// Relative floor of the pass/fail tolerance.
pub const VERDICT_REL_TOL: f64 = 1e-10;
/// Quadrature tolerance for factorization checks.
pub const FACTORIZATION_QUAD_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EngineOptions {
    /// Relative tolerance of every radial integral.
    pub rel_tol: f64,
    /// Multiplies the sharp constant before it enters a right-hand side.
    /// Anything other than 1 is a deliberate corruption used to check that
    /// the harness can fail.
    pub constant_scale: f64,
}

impl Default for EngineOptions {
    fn default() -> Self {
        Self { rel_tol: SWEEP_TOL, constant_scale: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportKind {
    Lemma21,
    Theorem23,
    Rellich17,
}

impl ReportKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ReportKind::Lemma21 => "lemma21",
            ReportKind::Theorem23 => "theorem23",
            ReportKind::Rellich17 => "rellich17",
        }
    }
}

/// Both sides of one inequality instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityReport {
    pub kind: ReportKind,
    pub params: Parameters,
    /// Constant multiplying the leading right-hand term.
    pub constant: f64,
    pub lhs: f64,
    /// Sharp-constant term.
    pub rhs_constant: f64,
    /// Logarithmic term (with the full gradient for theorem23).
    pub rhs_log: f64,
    /// Extra angular logarithmic term of theorem23; zero elsewhere.
    pub rhs_log_angular: f64,
    pub rhs_total: f64,
    pub slack: f64,
    /// Propagated quadrature error bound on `slack`.
    pub quad_err: f64,
    /// Largest absolute summand entering `slack`.
    pub magnitude: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl InequalityReport {
    #[allow(clippy::too_many_arguments)]
    fn assemble(
        kind: ReportKind,
        params: Parameters,
        constant: f64,
        lhs: f64,
        rhs: [f64; 3],
        quad_err: f64,
        magnitude: f64,
    ) -> Self {
        let rhs_total = rhs.iter().sum::<f64>();
        let slack = lhs - rhs_total;
        let magnitude = magnitude.max(lhs.abs()).max(rhs.iter().map(|x| x.abs()).sum());
        let tolerance = (10.0 * quad_err).max(VERDICT_REL_TOL * magnitude);
        Self {
            kind,
            params,
            constant,
            lhs,
            rhs_constant: rhs[0],
            rhs_log: rhs[1],
            rhs_log_angular: rhs[2],
            rhs_total,
            slack,
            quad_err,
            magnitude,
            tolerance,
            passed: slack >= -tolerance,
        }
    }

    /// Named right-hand terms.
    pub fn rhs_terms(&self) -> Vec<(&'static str, f64)> {
        match self.kind {
            ReportKind::Lemma21 => vec![("hardy", self.rhs_constant), ("log", self.rhs_log)],
            ReportKind::Theorem23 => vec![
                ("hardy_rellich", self.rhs_constant),
                ("log_gradient", self.rhs_log),
                ("log_angular", self.rhs_log_angular),
            ],
            ReportKind::Rellich17 => vec![("rellich", self.rhs_constant), ("log", self.rhs_log)],
        }
    }

    /// `slack / max(magnitude, 1)`; negative values mean a violation.
    pub fn relative_slack(&self) -> f64 {
        self.slack / self.magnitude.max(1.0)
    }
}

/// A computed value with its absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub abs_err: f64,
}

impl From<QuadResult> for Estimate {
    fn from(q: QuadResult) -> Self {
        Self { value: q.value, abs_err: q.abs_err_estimate }
    }
}

fn radial(profile: &RadialProfile, order: u8, mu: f64, log: Option<&LogWeightSpec>, tol: f64) -> Result<Estimate> {
    let mut w = WeightedIntegral::new(profile, order, mu);
    if let Some(spec) = log {
        if spec.depth() == 0 {
            return Ok(Estimate::default());
        }
        w = w.with_log_weight(spec);
    }
    integrate(&w, tol).map(Estimate::from)
}

fn require_inside(profile: &RadialProfile, radius: f64) -> Result<()> {
    let (a, b) = profile.support();
    if b < radius {
        Ok(())
    } else {
        Err(Error::BadSupport { a, b, reason: "support must lie inside (0, R)" })
    }
}

/// Lemma-type inequality on `(0, R)`:
/// `int r^alpha |F'|^2 >= (1-alpha)^2/4 int r^{alpha-2} |F|^2 + 1/4 int r^{alpha-2} W_N |F|^2`.
pub fn lemma21_report(
    profile: &RadialProfile,
    alpha: f64,
    spec: &LogWeightSpec,
    opts: &EngineOptions,
) -> Result<InequalityReport> {
    require_inside(profile, spec.radius())?;
    let tol = opts.rel_tol;
    let lhs = radial(profile, 1, alpha, None, tol)?;
    let plain = radial(profile, 0, alpha - 2.0, None, tol)?;
    let logw = radial(profile, 0, alpha - 2.0, Some(spec), tol)?;
    let constant = 0.25 * (1.0 - alpha).powi(2) * opts.constant_scale;
    let rhs = [constant * plain.value, 0.25 * logw.value, 0.0];
    let quad_err = lhs.abs_err + constant * plain.abs_err + 0.25 * logw.abs_err;
    let params = Parameters::new(1, alpha, spec.depth(), spec.radius(), spec.eta());
    Ok(InequalityReport::assemble(ReportKind::Lemma21, params, constant, lhs.value, rhs, quad_err, 0.0))
}

/// `int |T_{N,alpha} F|^2` computed directly, against the lemma's
/// `lhs - rhs_total`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FactorizationCheck {
    pub alpha: f64,
    pub depth: u32,
    pub square_norm: f64,
    pub difference: f64,
    pub lhs: f64,
    pub residual: f64,
    pub quad_err: f64,
}

/// `|int |T F|^2 - (lhs - rhs)| / lhs` with
/// `T F = r^{alpha/2} F' + (alpha-1)/2 r^{(alpha-2)/2} F + 1/2 r^{(alpha-2)/2} S_N F`
/// and `S_N = sum_k prod_p ln_p(eta/r)^{-1}`. Zero in exact arithmetic.
pub fn factorization_residual(
    profile: &RadialProfile,
    alpha: f64,
    spec: &LogWeightSpec,
    rel_tol: f64,
) -> Result<FactorizationCheck> {
    require_inside(profile, spec.radius())?;
    let opts = EngineOptions { rel_tol, constant_scale: 1.0 };
    let report = lemma21_report(profile, alpha, spec, &opts)?;
    let (a, b) = profile.support();
    let depth = spec.depth();
    let square = integrate_radial(
        |r| {
            let jet = profile.eval(r);
            let s = if depth > 0 { spec.factors_unchecked(r).first_order } else { 0.0 };
            let t = r.powf(0.5 * alpha) * jet.d1
                + r.powf(0.5 * (alpha - 2.0)) * jet.value * (0.5 * (alpha - 1.0) + 0.5 * s);
            t * t
        },
        a,
        b,
        rel_tol,
    )?;
    let difference = report.slack;
    let residual = (square.value - difference).abs() / report.lhs.max(f64::MIN_POSITIVE);
    Ok(FactorizationCheck {
        alpha,
        depth,
        square_norm: square.value,
        difference,
        lhs: report.lhs,
        residual,
        quad_err: square.abs_err_estimate + report.quad_err,
    })
}

/// The five radial integrals of one mode.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct ModeIntegrals {
    /// `int r^{gamma+n-1} |F''|^2`
    pub second: Estimate,
    /// `int r^{gamma+n-3} |F'|^2`
    pub first: Estimate,
    /// `int r^{gamma+n-5} |F|^2`
    pub zeroth: Estimate,
    /// `int W_N r^{gamma+n-3} |F'|^2`
    pub log_first: Estimate,
    /// `int W_N r^{gamma+n-5} |F|^2`
    pub log_zeroth: Estimate,
}

impl ModeIntegrals {
    pub fn compute(
        profile: &RadialProfile,
        params: &ValidatedParameters,
        with_log: bool,
        rel_tol: f64,
    ) -> Result<Self> {
        require_inside(profile, params.radius())?;
        let shift = params.gamma() + params.n() as f64;
        let spec = params.log_spec();
        let mut out = Self {
            second: radial(profile, 2, shift - 1.0, None, rel_tol)?,
            first: radial(profile, 1, shift - 3.0, None, rel_tol)?,
            zeroth: radial(profile, 0, shift - 5.0, None, rel_tol)?,
            ..Self::default()
        };
        if with_log && spec.depth() > 0 {
            out.log_first = radial(profile, 1, shift - 3.0, Some(spec), rel_tol)?;
            out.log_zeroth = radial(profile, 0, shift - 5.0, Some(spec), rel_tol)?;
        }
        Ok(out)
    }
}

/// Coefficients `(c1, c0)` of the per-mode Laplacian energy
/// `I2 + c1 I1 + c0 I0`.
pub fn mode_coefficients(n: u32, gamma: f64, lambda: f64) -> (f64, f64) {
    let nf = n as f64;
    (2.0 * lambda + (nf - 1.0) * (1.0 - gamma), lambda * (lambda + (gamma + nf - 4.0) * (2.0 - gamma)))
}

fn mode_energy(ints: &ModeIntegrals, n: u32, gamma: f64, lambda: f64) -> (Estimate, f64) {
    let (c1, c0) = mode_coefficients(n, gamma, lambda);
    let parts = [ints.second.value, c1 * ints.first.value, c0 * ints.zeroth.value];
    let value = parts.iter().sum();
    let abs_err = ints.second.abs_err + c1.abs() * ints.first.abs_err + c0.abs() * ints.zeroth.abs_err;
    let magnitude = parts.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    (Estimate { value, abs_err }, magnitude)
}

/// `int_{B_n(0;R)} |x|^gamma |Delta (F phi_j)|^2` through the radial
/// reduction.
pub fn mode_lhs(
    profile: &RadialProfile,
    mode: &SphericalMode,
    params: &ValidatedParameters,
    rel_tol: f64,
) -> Result<Estimate> {
    if mode.n != params.n() {
        return Err(Error::ModeDimensionMismatch(params.n()));
    }
    let ints = ModeIntegrals::compute(profile, params, false, rel_tol)?;
    Ok(mode_energy(&ints, params.n(), params.gamma(), mode.lambda).0)
}

struct ExpansionSums {
    lhs: Estimate,
    lhs_magnitude: f64,
    /// `sum_j (I1 + lambda_j I0)`
    gradient: Estimate,
    /// `sum_j (W1 + lambda_j W0)`
    log_gradient: Estimate,
    /// `sum_j lambda_j W0`
    log_angular: Estimate,
    /// `sum_j I0`
    zeroth: Estimate,
    /// `sum_j W0`
    log_zeroth: Estimate,
}

fn expansion_sums(expansion: &ModeExpansion, rel_tol: f64) -> Result<ExpansionSums> {
    let params = expansion.params();
    let (n, gamma) = (params.n(), params.gamma());
    let mut s = ExpansionSums {
        lhs: Estimate::default(),
        lhs_magnitude: 0.0,
        gradient: Estimate::default(),
        log_gradient: Estimate::default(),
        log_angular: Estimate::default(),
        zeroth: Estimate::default(),
        log_zeroth: Estimate::default(),
    };
    let add = |acc: &mut Estimate, v: f64, e: f64| {
        acc.value += v;
        acc.abs_err += e;
    };
    for (mode, profile) in expansion.terms() {
        let ints = ModeIntegrals::compute(profile, params, true, rel_tol)?;
        let lam = mode.lambda;
        let (energy, mag) = mode_energy(&ints, n, gamma, lam);
        add(&mut s.lhs, energy.value, energy.abs_err);
        s.lhs_magnitude = s.lhs_magnitude.max(mag);
        add(
            &mut s.gradient,
            ints.first.value + lam * ints.zeroth.value,
            ints.first.abs_err + lam * ints.zeroth.abs_err,
        );
        add(
            &mut s.log_gradient,
            ints.log_first.value + lam * ints.log_zeroth.value,
            ints.log_first.abs_err + lam * ints.log_zeroth.abs_err,
        );
        add(&mut s.log_angular, lam * ints.log_zeroth.value, lam * ints.log_zeroth.abs_err);
        add(&mut s.zeroth, ints.zeroth.value, ints.zeroth.abs_err);
        add(&mut s.log_zeroth, ints.log_zeroth.value, ints.log_zeroth.abs_err);
    }
    Ok(s)
}

/// Log-refined weighted Hardy-Rellich inequality
///
/// ```text
/// int |x|^gamma |Delta f|^2 >= A int |x|^{gamma-2} |grad f|^2
///     + 1/4 int |x|^{gamma-2} W_N |grad f|^2
///     + 1/4 int |x|^{gamma-4} W_N |grad_S f|^2
/// ```
pub fn theorem23_report(expansion: &ModeExpansion, opts: &EngineOptions) -> Result<InequalityReport> {
    let params = expansion.params();
    let a = hardy_rellich_constant(params.n(), params.gamma()).certified()?.value * opts.constant_scale;
    let s = expansion_sums(expansion, opts.rel_tol)?;
    let rhs = [a * s.gradient.value, 0.25 * s.log_gradient.value, 0.25 * s.log_angular.value];
    let quad_err =
        s.lhs.abs_err + a.abs() * s.gradient.abs_err + 0.25 * (s.log_gradient.abs_err + s.log_angular.abs_err);
    Ok(InequalityReport::assemble(ReportKind::Theorem23, params.raw(), a, s.lhs.value, rhs, quad_err, s.lhs_magnitude))
}

/// Log-refined weighted Rellich inequality
///
/// ```text
/// int |x|^gamma |Delta f|^2 >= C int |x|^{gamma-4} |f|^2
///     + [(n-gamma)^2 + (n+gamma-4)^2] / 16 int |x|^{gamma-4} W_N |f|^2
/// ```
pub fn rellich17_report(expansion: &ModeExpansion, opts: &EngineOptions) -> Result<InequalityReport> {
    let params = expansion.params();
    let gamma = params.gamma();
    let c = rellich_constant(params.n(), gamma).certified()?.value * opts.constant_scale;
    let log_coeff = rellich_log_coefficient(params.n(), gamma);
    let s = expansion_sums(expansion, opts.rel_tol)?;
    let rhs = [c * s.zeroth.value, log_coeff * s.log_zeroth.value, 0.0];
    let quad_err = s.lhs.abs_err + c.abs() * s.zeroth.abs_err + log_coeff * s.log_zeroth.abs_err;
    Ok(InequalityReport::assemble(ReportKind::Rellich17, params.raw(), c, s.lhs.value, rhs, quad_err, s.lhs_magnitude))
}

/// `[(n - gamma)^2 + (n + gamma - 4)^2] / 16`.
pub fn rellich_log_coefficient(n: u32, gamma: f64) -> f64 {
    let n = n as f64;
    ((n - gamma).powi(2) + (n + gamma - 4.0).powi(2)) / 16.0
}

/// Number of angular nodes of the disk oracle; the trapezoid rule on them
/// is exact for trigonometric polynomials of degree below this.
const DISK_ANGULAR_NODES: usize = 64;

/// `int_{B_2} |x|^gamma |Delta(F(r) phi_j(theta))|^2 d^2x` for the explicit
/// orthonormal harmonic `phi_j = cos(j theta) / sqrt(pi)` (`1 / sqrt(2 pi)`
/// for `j = 0`), with the polar Laplacian `F'' + F'/r - j^2 F / r^2` applied
/// to the profile and no integration by parts.
pub fn disk_direct_lhs(profile: &RadialProfile, j: u32, gamma: f64, rel_tol: f64) -> Result<Estimate> {
    assert!((j as usize) < DISK_ANGULAR_NODES / 2, "angular rule too coarse for degree {j}");
    let norm = if j == 0 { 1.0 / (2.0 * PI).sqrt() } else { 1.0 / PI.sqrt() };
    let h = 2.0 * PI / DISK_ANGULAR_NODES as f64;
    let angular: f64 = (0..DISK_ANGULAR_NODES)
        .map(|k| {
            let phi = norm * (j as f64 * k as f64 * h).cos();
            phi * phi
        })
        .sum::<f64>()
        * h;
    let j2 = (j * j) as f64;
    let (a, b) = profile.support();
    let radial = integrate_radial(
        |r| {
            let f = profile.eval(r);
            let lap = f.d2 + f.d1 / r - j2 * f.value / (r * r);
            r.powf(gamma + 1.0) * lap * lap
        },
        a,
        b,
        rel_tol,
    )?;
    Ok(Estimate { value: angular * radial.value, abs_err: angular * radial.abs_err_estimate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::log_weights::iter_exp;
    use crate::params::Parameters;
    use std::f64::consts::E;

    fn bump() -> RadialProfile {
        RadialProfile::poly_bump(0.2, 0.8, 4, &[]).unwrap()
    }

    fn tight() -> EngineOptions {
        EngineOptions { rel_tol: 1e-12, constant_scale: 1.0 }
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn lemma21_examples() {
        let spec = LogWeightSpec::new(1, E, 1.0).unwrap();
        let r = lemma21_report(&bump(), 0.0, &spec, &tight()).unwrap();
        assert!(r.slack > 0.0 && r.passed);
        assert!((r.rhs_total - r.rhs_terms().iter().map(|t| t.1).sum::<f64>()).abs() < 1e-15);

        let off = LogWeightSpec::disabled(1.0).unwrap();
        let r = lemma21_report(&bump(), 1.0, &off, &tight()).unwrap();
        assert_eq!(r.rhs_constant, 0.0);
        assert_eq!(r.slack, r.lhs);

        let eta = iter_exp(2).unwrap();
        let one = lemma21_report(&bump(), 0.0, &LogWeightSpec::new(1, eta, 1.0).unwrap(), &tight()).unwrap();
        let two = lemma21_report(&bump(), 0.0, &LogWeightSpec::new(2, eta, 1.0).unwrap(), &tight()).unwrap();
        assert!(two.rhs_total >= one.rhs_total);
        assert_eq!(two.lhs, one.lhs);
    }

    #[test]
    fn factorization_examples() {
        let spec = LogWeightSpec::new(1, E, 1.0).unwrap();
        assert!(factorization_residual(&bump(), 0.0, &spec, 1e-12).unwrap().residual <= 1e-8);
        assert!(factorization_residual(&bump(), 1.0, &spec, 1e-12).unwrap().residual <= 1e-8);
        let off = LogWeightSpec::disabled(1.0).unwrap();
        assert!(factorization_residual(&bump(), 0.0, &off, 1e-12).unwrap().residual <= 1e-10);
    }

    #[test]
    fn mode_zero_drops_lambda_terms() {
        let p = Parameters::new(3, 0.5, 0, 1.0, 1.0).validate().unwrap();
        let f = bump();
        let got = mode_lhs(&f, &p.mode(0), &p, 1e-12).unwrap().value;
        let i2 = integrate(&WeightedIntegral::new(&f, 2, 2.5), 1e-12).unwrap().value;
        let i1 = integrate(&WeightedIntegral::new(&f, 1, 0.5), 1e-12).unwrap().value;
        assert!(rel(got, i2 + 2.0 * 0.5 * i1) < 1e-12);
    }

    #[test]
    fn disk_oracle_matches_reduction() {
        let f = bump();
        for (j, gamma, tol) in [(0u32, 0.0, 1e-8), (1, 0.0, 1e-6), (1, 2.0, 1e-6), (3, -1.0, 1e-6)] {
            let p = Parameters::new(2, gamma, 0, 1.0, 1.0).validate().unwrap();
            let reduced = mode_lhs(&f, &p.mode(j), &p, 1e-12).unwrap().value;
            let direct = disk_direct_lhs(&f, j, gamma, 1e-12).unwrap().value;
            assert!(rel(reduced, direct) < tol, "j={j} gamma={gamma}: {reduced} vs {direct}");
        }
    }

    #[test]
    fn coefficient_identity() {
        // (n+gamma-2)^2/4 + (n-1)(1-gamma) = (n-gamma)^2/4
        let (n, g) = (4.0, 1.0);
        assert_eq!(0.25 * (n + g - 2.0f64).powi(2) + (n - 1.0) * (1.0 - g), 0.25 * (n - g).powi(2));
    }

    #[test]
    fn theorem23_examples() {
        let p = Parameters::new(5, 0.0, 1, 1.0, E).validate().unwrap();
        let e = ModeExpansion::single(p, 0, bump()).unwrap();
        let r = theorem23_report(&e, &EngineOptions::default()).unwrap();
        assert!(r.slack >= 0.0 && r.passed, "{r:?}");

        let p = Parameters::new(2, 2.0, 1, 1.0, 1.0).validate().unwrap();
        let e = ModeExpansion::single(p, 0, bump()).unwrap();
        let r = theorem23_report(&e, &EngineOptions::default()).unwrap();
        assert_eq!(r.constant, 0.0);
        assert_eq!(r.rhs_constant, 0.0);
        assert!(r.rhs_total > 0.0 && r.passed);

        let p = Parameters::new(3, 1.0, 0, 1.0, 1.0).validate().unwrap();
        let e = ModeExpansion::from_degrees(
            p,
            [(0, bump()), (2, RadialProfile::poly_bump(0.3, 0.9, 3, &[1.0, 0.4]).unwrap())],
        )
        .unwrap();
        assert!(theorem23_report(&e, &EngineOptions::default()).unwrap().passed);
    }

    #[test]
    fn rellich17_examples() {
        assert_eq!(rellich_log_coefficient(3, 1.0), 0.25);
        // both squares vanish at (n, gamma) = (2, 2)
        assert_eq!(rellich_log_coefficient(2, 2.0), 0.0);
        let p = Parameters::new(3, 1.0, 1, 1.0, 1.0).validate().unwrap();
        let r = rellich17_report(&ModeExpansion::single(p, 0, bump()).unwrap(), &EngineOptions::default()).unwrap();
        assert_eq!(r.rhs_constant, 0.0);
        assert!(r.rhs_log > 0.0 && r.slack >= 0.0 && r.passed);
        let p = Parameters::new(5, 0.0, 1, 1.0, E).validate().unwrap();
        let r = rellich17_report(&ModeExpansion::single(p, 0, bump()).unwrap(), &EngineOptions::default()).unwrap();
        assert!(r.passed);
    }

    #[test]
    fn support_must_fit_ball() {
        let spec = LogWeightSpec::new(1, 1.0, 0.5).unwrap();
        assert!(matches!(lemma21_report(&bump(), 0.0, &spec, &tight()), Err(Error::BadSupport { .. })));
    }
}
