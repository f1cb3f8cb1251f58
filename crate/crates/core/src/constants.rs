//! Sharp constants of the weighted Rellich and Hardy-Rellich inequalities.
//!
//! Both are minima over the sphere spectrum `lambda_j = j(j + n - 2)`:
//!
//! ```text
//! A_{n,gamma} = min_j alpha_{n,gamma,lambda_j}
//! alpha_{n,gamma,0}        = (n - gamma)^2 / 4
//! alpha_{n,gamma,lambda_j} = [(n+gamma-4)(n-gamma)/4 + lambda_j]^2 / [(n+gamma-4)^2/4 + lambda_j]
//! C_{n,gamma} = min_j ((n-2)^2/4 - (gamma-2)^2/4 + lambda_j)^2
//! ```
//!
//! The minimum is found by scanning `j` upwards. The scan stops once the
//! summand has risen for [`CONSECUTIVE_RISES`] steps in a row past the best
//! index, `j >= MIN_SCAN`, and `lambda_j` lies beyond the last critical
//! point of the summand viewed as a function of `lambda`, after which it is
//! increasing for good.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::eigenvalue;

pub const MIN_SCAN: u32 = 64;
pub const MAX_SCAN: u32 = 10_000;
pub const CONSECUTIVE_RISES: u32 = 3;

/// Relative tolerance of the constant-level inequality check.
pub const CONSTANT_INEQUALITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstantResult {
    pub value: f64,
    pub argmin_j: u32,
    pub scanned_up_to: u32,
    pub tail_certified: bool,
}

impl ConstantResult {
    /// Turns an uncertified scan into [`Error::TailNotCertified`].
    pub fn certified(self) -> Result<Self> {
        if self.tail_certified {
            Ok(self)
        } else {
            Err(Error::TailNotCertified {
                value: self.value,
                argmin_j: self.argmin_j,
                scanned_up_to: self.scanned_up_to,
            })
        }
    }
}

/// `alpha_{n,gamma,lambda_j}`.
pub fn alpha(n: u32, gamma: f64, j: u32) -> f64 {
    let n = n as f64;
    if j == 0 {
        return 0.25 * (n - gamma).powi(2);
    }
    let lambda = eigenvalue(n as u32, j);
    let shift = n + gamma - 4.0;
    let num = 0.25 * shift * (n - gamma) + lambda;
    num * num / (0.25 * shift * shift + lambda)
}

/// `j`-th summand of the Rellich constant.
pub fn rellich_summand(n: u32, gamma: f64, j: u32) -> f64 {
    let kappa = rellich_shift(n, gamma);
    (kappa + eigenvalue(n, j)).powi(2)
}

fn rellich_shift(n: u32, gamma: f64) -> f64 {
    0.25 * (n as f64 - 2.0).powi(2) - 0.25 * (gamma - 2.0).powi(2)
}

/// Scan `summand(j)` for its smallest minimizer. `monotone_from` is a
/// `lambda` beyond which the summand is known to increase.
fn scan_min(n: u32, summand: impl Fn(u32) -> f64, monotone_from: f64) -> ConstantResult {
    let mut best = summand(0);
    let mut argmin = 0;
    let mut prev = best;
    let mut rises = 0;
    let mut j = 0;
    let mut certified = false;
    while j < MAX_SCAN {
        j += 1;
        let v = summand(j);
        if v < best {
            best = v;
            argmin = j;
        }
        if j > argmin && v > prev {
            rises += 1;
        } else {
            rises = 0;
        }
        prev = v;
        if rises >= CONSECUTIVE_RISES && j >= MIN_SCAN && eigenvalue(n, j - CONSECUTIVE_RISES) >= monotone_from {
            certified = true;
            break;
        }
    }
    ConstantResult { value: best, argmin_j: argmin, scanned_up_to: j, tail_certified: certified }
}

/// `A_{n,gamma}` with its smallest minimizing degree.
pub fn hardy_rellich_constant(n: u32, gamma: f64) -> ConstantResult {
    assert!(n >= 2);
    // alpha(lambda) = (c + lambda)^2 / (d + lambda) has derivative
    // (c + lambda)(2d - c + lambda) / (d + lambda)^2.
    let nf = n as f64;
    let shift = nf + gamma - 4.0;
    let c = 0.25 * shift * (nf - gamma);
    let d = 0.25 * shift * shift;
    let monotone_from = (-c).max(c - 2.0 * d).max(0.0);
    scan_min(n, |j| alpha(n, gamma, j), monotone_from)
}

/// `C_{n,gamma}` with its smallest minimizing degree.
pub fn rellich_constant(n: u32, gamma: f64) -> ConstantResult {
    assert!(n >= 2);
    let kappa = rellich_shift(n, gamma);
    scan_min(n, |j| rellich_summand(n, gamma, j), (-kappa).max(0.0))
}

/// Worst case of the constant-level inequality
/// `lambda_j A <= (n+gamma-4)^2/4 [(n-gamma)^2/4 + 2 lambda_j - A] + lambda_j [lambda_j + (n+gamma-4)(2-gamma)]`
/// over `j = 0..=j_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstantInequalityReport {
    pub holds: bool,
    pub constant: f64,
    /// Smallest `(rhs - lhs) / (1 + |lhs| + |rhs|)` seen.
    pub worst_relative_slack: f64,
    pub worst_slack: f64,
    pub worst_j: u32,
    pub j_max: u32,
}

pub fn constant_inequality_sides(n: u32, gamma: f64, a: f64, j: u32) -> (f64, f64) {
    let nf = n as f64;
    let lambda = eigenvalue(n, j);
    let shift = nf + gamma - 4.0;
    let lhs = lambda * a;
    let rhs = 0.25 * shift * shift * (0.25 * (nf - gamma).powi(2) + 2.0 * lambda - a)
        + lambda * (lambda + shift * (2.0 - gamma));
    (lhs, rhs)
}

pub fn check_constant_inequality(n: u32, gamma: f64, j_max: u32) -> Result<ConstantInequalityReport> {
    let a = hardy_rellich_constant(n, gamma).certified()?.value;
    Ok(check_constant_inequality_with(n, gamma, a, j_max))
}

/// Same check against a caller-supplied constant.
pub fn check_constant_inequality_with(n: u32, gamma: f64, a: f64, j_max: u32) -> ConstantInequalityReport {
    let mut report = ConstantInequalityReport {
        holds: true,
        constant: a,
        worst_relative_slack: f64::INFINITY,
        worst_slack: f64::INFINITY,
        worst_j: 0,
        j_max,
    };
    for j in 0..=j_max {
        let (lhs, rhs) = constant_inequality_sides(n, gamma, a, j);
        let slack = rhs - lhs;
        let scale = 1.0 + lhs.abs() + rhs.abs();
        let rel = slack / scale;
        if rel < report.worst_relative_slack {
            report.worst_relative_slack = rel;
            report.worst_slack = slack;
            report.worst_j = j;
        }
        if slack < -CONSTANT_INEQUALITY_TOL * scale {
            report.holds = false;
        }
    }
    report
}
