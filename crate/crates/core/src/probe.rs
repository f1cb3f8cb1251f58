//! Rayleigh-quotient minimization towards the sharp constant `A_{n,gamma}`.
//!
//! Trial functions are separable, `g(x) = F(r) phi_j(theta)`, with `j` the
//! minimizing degree of `A_{n,gamma}`. The default family is a power law
//! `r^s` cut off smoothly in `ln r` over a wide support, which is the shape
//! near-extremals of these quotients take; the polynomial-bump family is
//! kept for comparison. Both quotients are invariant under `F -> cF` and the
//! second-order ratio under dilations, so only the log-width of the support
//! matters.

use serde::Serialize;

use crate::constants::hardy_rellich_constant;
use crate::engine::{mode_coefficients, ModeIntegrals};
use crate::error::{Error, Result};
use crate::params::ValidatedParameters;
use crate::profile::{ModeExpansion, RadialProfile, DEFAULT_EXPONENT};
use crate::quadrature::IDENTITY_TOL;

/// Cases where optimality of `A_{n,gamma}` is not known.
pub const OPEN_CASES: [(u32, f64); 2] = [(2, 2.0), (3, 1.0)];

/// Evaluated quotients may not drop below `A - LOWER_BOUND_TOL (1 + A)`.
pub const LOWER_BOUND_TOL: f64 = 1e-8;

/// Closest approach of the outer support endpoint to `R`, relative to `R`.
pub const EDGE_MARGIN: f64 = 1e-3;

/// Smallest inner support endpoint of the log-bump family, relative to `R`.
pub const LOG_FAMILY_INNER: f64 = 1e-16;

pub fn is_open_case(n: u32, gamma: f64) -> bool {
    OPEN_CASES.iter().any(|&(m, g)| m == n && g == gamma)
}

/// `int |x|^gamma |Delta f|^2 / int |x|^{gamma-2} |grad f|^2` through the
/// mode reduction.
pub fn rayleigh_quotient(expansion: &ModeExpansion) -> Result<f64> {
    rayleigh_quotient_tol(expansion, IDENTITY_TOL)
}

pub fn rayleigh_quotient_tol(expansion: &ModeExpansion, rel_tol: f64) -> Result<f64> {
    let params = expansion.params();
    let (n, gamma) = (params.n(), params.gamma());
    let mut num = 0.0;
    let mut den = 0.0;
    for (mode, profile) in expansion.terms() {
        let ints = ModeIntegrals::compute(profile, params, false, rel_tol)?;
        let (c1, c0) = mode_coefficients(n, gamma, mode.lambda);
        num += ints.second.value + c1 * ints.first.value + c0 * ints.zeroth.value;
        den += ints.first.value + mode.lambda * ints.zeroth.value;
    }
    if !(den > 0.0) {
        return Err(Error::ZeroDenominator);
    }
    Ok(num / den)
}

/// `int r^{gamma+n-1} |F''|^2 / int r^{gamma+n-5} |F|^2`.
pub fn second_order_ratio(profile: &RadialProfile, params: &ValidatedParameters) -> Result<f64> {
    let ints = ModeIntegrals::compute(profile, params, false, IDENTITY_TOL)?;
    if !(ints.zeroth.value > 0.0) {
        return Err(Error::ZeroDenominator);
    }
    Ok(ints.second.value / ints.zeroth.value)
}

/// Infimum of [`second_order_ratio`], `(2-gamma-n)^2 (4-gamma-n)^2 / 16`.
pub fn second_order_target(n: u32, gamma: f64) -> f64 {
    let s = gamma + n as f64;
    (2.0 - s).powi(2) * (4.0 - s).powi(2) / 16.0
}

/// Exponent `s` making `int r^{gamma+n-5} |r^s|^2 dr` dilation invariant.
pub fn critical_exponent(n: u32, gamma: f64) -> f64 {
    -(n as f64 + gamma - 4.0) / 2.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyShape {
    /// `r^s u^p (1-u)^p q(u)`, `u = ln(r/a) / ln(b/a)`; free: `s`, log-width,
    /// modulation.
    LogBump,
    /// `(r-a)^p (b-r)^p q(r/R)`; free: `a`, `b`, modulation.
    PolyBump,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialFamily {
    pub mode_j: u32,
    pub shape: FamilyShape,
    pub bump_exponent: u32,
    pub modulation_degree: usize,
    /// Lowest inner endpoint, relative to `R`.
    pub inner_limit: f64,
    /// Bound on the modulation coefficients.
    pub coefficient_bound: f64,
}

impl TrialFamily {
    /// Log-bump family on the minimizing degree of `A_{n,gamma}`.
    pub fn for_params(params: &ValidatedParameters) -> Result<Self> {
        let a = hardy_rellich_constant(params.n(), params.gamma()).certified()?;
        Ok(Self::log_bump(a.argmin_j))
    }

    pub fn log_bump(mode_j: u32) -> Self {
        Self {
            mode_j,
            shape: FamilyShape::LogBump,
            bump_exponent: 3,
            modulation_degree: 3,
            inner_limit: LOG_FAMILY_INNER,
            coefficient_bound: 4.0,
        }
    }

    pub fn poly_bump(mode_j: u32) -> Self {
        Self {
            mode_j,
            shape: FamilyShape::PolyBump,
            bump_exponent: DEFAULT_EXPONENT,
            modulation_degree: 4,
            inner_limit: EDGE_MARGIN,
            coefficient_bound: 20.0,
        }
    }

    fn dimension(&self) -> usize {
        2 + self.modulation_degree
    }

    fn start(&self, params: &ValidatedParameters) -> Vec<f64> {
        let mut x = vec![0.0; self.dimension()];
        match self.shape {
            FamilyShape::LogBump => {
                x[0] = critical_exponent(params.n(), params.gamma());
                x[1] = 3.0;
            }
            FamilyShape::PolyBump => {
                x[0] = -3.0;
                x[1] = 3.0;
            }
        }
        x
    }

    fn steps(&self) -> Vec<f64> {
        let mut s = vec![0.25; self.dimension()];
        s[1] = 1.0;
        s
    }

    /// Map an unconstrained point into the family.
    pub fn member(&self, x: &[f64], radius: f64) -> Result<RadialProfile> {
        let sigmoid = |y: f64| 1.0 / (1.0 + (-y).exp());
        let bound = self.coefficient_bound;
        let coeffs: Vec<f64> = std::iter::once(1.0).chain(x[2..].iter().map(|&c| bound * (c / bound).tanh())).collect();
        let outer = radius * (1.0 - EDGE_MARGIN);
        let inner = radius * self.inner_limit;
        match self.shape {
            FamilyShape::LogBump => {
                let max_width = (outer / inner).ln();
                let min_width = 2f64.ln();
                let width = min_width + (max_width - min_width) * sigmoid(x[1]);
                let a = (outer * (-width).exp()).max(inner);
                RadialProfile::log_bump(a, outer, self.bump_exponent, x[0], &coeffs)
            }
            FamilyShape::PolyBump => {
                let a = inner + (outer - inner) * 0.98 * sigmoid(x[0]);
                let b = a + (outer - a) * (0.02 + 0.98 * sigmoid(x[1]));
                let scaled: Vec<f64> = coeffs.iter().enumerate().map(|(k, c)| c / radius.powi(k as i32)).collect();
                RadialProfile::poly_bump(a, b.min(outer), self.bump_exponent, &scaled)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeResult {
    pub n: u32,
    pub gamma: f64,
    pub mode_j: u32,
    pub target: f64,
    pub best_quotient: f64,
    pub gap: f64,
    pub best_member: RadialProfile,
    pub second_order_ratio: f64,
    pub second_order_target: f64,
    pub iterations: usize,
    /// Smallest quotient over every evaluation.
    pub min_evaluated: f64,
    pub lower_bound_violations: usize,
    pub optimality_open: bool,
    pub budget_exhausted: bool,
}

impl ProbeResult {
    /// `gap / target`, or the gap itself when the target vanishes.
    pub fn relative_gap(&self) -> f64 {
        if self.target > 0.0 {
            self.gap / self.target
        } else {
            self.gap
        }
    }

    /// 5% of `A`, or 0.05 absolute when `A < 0.5`.
    pub fn within_target(&self) -> bool {
        let allowed = if self.target < 0.5 { 0.05 } else { 0.05 * self.target };
        self.gap <= allowed
    }
}

pub const DEFAULT_BUDGET: usize = 2000;

/// Untuned member of the log-bump family at the minimizing degree: widest
/// support and the dilation-invariant exponent. Its quotient sits within a
/// few percent of `A_{n,gamma}`.
pub fn near_extremal(params: &ValidatedParameters) -> Result<ModeExpansion> {
    let (n, gamma, radius) = (params.n(), params.gamma(), params.radius());
    let j = hardy_rellich_constant(n, gamma).certified()?.argmin_j;
    let profile = RadialProfile::log_bump(
        radius * LOG_FAMILY_INNER,
        radius * (1.0 - EDGE_MARGIN),
        3,
        critical_exponent(n, gamma),
        &[1.0],
    )?;
    ModeExpansion::single(*params, j, profile)
}

/// Minimize the Rayleigh quotient over `family`, with `budget` quotient
/// evaluations split across Nelder-Mead restarts.
pub fn minimize_quotient(family: &TrialFamily, params: &ValidatedParameters, budget: usize) -> Result<ProbeResult> {
    if budget < 100 {
        return Err(Error::Config(format!("budget {budget} is below 100 evaluations")));
    }
    let (n, gamma) = (params.n(), params.gamma());
    let target = hardy_rellich_constant(n, gamma).certified()?.value;
    let floor = target - LOWER_BOUND_TOL * (1.0 + target);
    let radius = params.radius();
    let plain = params.without_log();

    let mut min_evaluated = f64::INFINITY;
    let mut violations = 0;
    let mut objective = |x: &[f64]| -> f64 {
        let q = family
            .member(x, radius)
            .and_then(|f| ModeExpansion::single(plain, family.mode_j, f))
            .and_then(|e| rayleigh_quotient_tol(&e, IDENTITY_TOL));
        match q {
            Ok(q) if q.is_finite() => {
                min_evaluated = min_evaluated.min(q);
                if q < floor {
                    violations += 1;
                }
                q
            }
            _ => f64::INFINITY,
        }
    };

    let outcome = simplex::minimize(&mut objective, &family.start(params), &family.steps(), budget, 1e-12);
    let best_member = family.member(&outcome.x, radius)?;
    let second = second_order_ratio(&best_member, &plain)?;
    Ok(ProbeResult {
        n,
        gamma,
        mode_j: family.mode_j,
        target,
        best_quotient: outcome.value,
        gap: outcome.value - target,
        best_member,
        second_order_ratio: second,
        second_order_target: second_order_target(n, gamma),
        iterations: outcome.evaluations,
        min_evaluated,
        lower_bound_violations: violations,
        optimality_open: is_open_case(n, gamma),
        budget_exhausted: !outcome.converged,
    })
}

mod simplex {
    //! Nelder-Mead with dimension-adaptive coefficients and restarts from
    //! the incumbent.

    pub struct Outcome {
        pub x: Vec<f64>,
        pub value: f64,
        pub evaluations: usize,
        pub converged: bool,
    }

    pub fn minimize<F: FnMut(&[f64]) -> f64>(
        f: &mut F,
        start: &[f64],
        steps: &[f64],
        budget: usize,
        ftol: f64,
    ) -> Outcome {
        let dim = start.len();
        let d = dim as f64;
        let (alpha, gamma, rho, sigma) = (1.0, 1.0 + 2.0 / d, 0.75 - 1.0 / (2.0 * d), 1.0 - 1.0 / d);
        let mut evaluations = 0;
        let mut best_x = start.to_vec();
        let mut best_v = f64::INFINITY;
        let mut converged = false;
        let mut scale = 1.0;

        while evaluations + dim < budget {
            let mut pts: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
            let centre = best_x.clone();
            let v0 = if best_v.is_finite() {
                best_v
            } else {
                evaluations += 1;
                f(&centre)
            };
            pts.push((centre.clone(), v0));
            for i in 0..dim {
                let mut x = centre.clone();
                x[i] += scale * steps[i];
                evaluations += 1;
                let v = f(&x);
                pts.push((x, v));
            }
            let before = best_v;
            let mut local_converged = false;
            while evaluations + 2 <= budget {
                pts.sort_by(|a, b| a.1.total_cmp(&b.1));
                let (lo, hi) = (pts[0].1, pts[dim].1);
                if (hi - lo).abs() <= ftol * (lo.abs() + ftol) {
                    local_converged = true;
                    break;
                }
                let mut centroid = vec![0.0; dim];
                for (x, _) in &pts[..dim] {
                    for (c, xi) in centroid.iter_mut().zip(x) {
                        *c += xi / d;
                    }
                }
                let along =
                    |t: f64| -> Vec<f64> { centroid.iter().zip(&pts[dim].0).map(|(c, w)| c + t * (c - w)).collect() };
                let xr = along(alpha);
                evaluations += 1;
                let vr = f(&xr);
                if vr < pts[0].1 {
                    let xe = along(alpha * gamma);
                    evaluations += 1;
                    let ve = f(&xe);
                    pts[dim] = if ve < vr { (xe, ve) } else { (xr, vr) };
                } else if vr < pts[dim - 1].1 {
                    pts[dim] = (xr, vr);
                } else {
                    let (xc, vc) = if vr < pts[dim].1 {
                        let xc = along(alpha * rho);
                        evaluations += 1;
                        let vc = f(&xc);
                        (xc, vc)
                    } else {
                        let xc = along(-rho);
                        evaluations += 1;
                        let vc = f(&xc);
                        (xc, vc)
                    };
                    if vc < pts[dim].1.min(vr) {
                        pts[dim] = (xc, vc);
                    } else {
                        let x0 = pts[0].0.clone();
                        for (x, v) in pts.iter_mut().skip(1) {
                            for (xi, bi) in x.iter_mut().zip(&x0) {
                                *xi = bi + sigma * (*xi - bi);
                            }
                            if evaluations >= budget {
                                *v = f64::INFINITY;
                                continue;
                            }
                            evaluations += 1;
                            *v = f(x);
                        }
                    }
                }
            }
            pts.sort_by(|a, b| a.1.total_cmp(&b.1));
            if pts[0].1 < best_v {
                best_v = pts[0].1;
                best_x = pts[0].0.clone();
            }
            // a restart that gains nothing ends the search
            if local_converged && before.is_finite() && before - best_v <= ftol * best_v.abs().max(ftol) {
                converged = true;
                break;
            }
            scale *= 0.5;
        }
        Outcome { x: best_x, value: best_v, evaluations, converged }
    }

    #[cfg(test)]
    mod tests {
        use super::*;

        #[test]
        fn rosenbrock() {
            let mut f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
            let out = minimize(&mut f, &[-1.2, 1.0], &[0.5, 0.5], 5000, 1e-14);
            assert!(out.value < 1e-8, "{}", out.value);
            assert!((out.x[0] - 1.0).abs() < 1e-3);
            assert!(out.evaluations <= 5000);
        }

        #[test]
        fn respects_budget() {
            let mut calls = 0;
            let mut f = |x: &[f64]| {
                calls += 1;
                x.iter().map(|v| v.sin() + 0.01 * v * v).sum::<f64>()
            };
            let out = minimize(&mut f, &[3.0; 5], &[1.0; 5], 150, 0.0);
            assert!(out.evaluations <= 150);
            assert_eq!(calls, out.evaluations);
            assert!(!out.converged);
        }
    }
}
