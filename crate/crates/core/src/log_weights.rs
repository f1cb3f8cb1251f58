//! Iterated exponentials and logarithms, and the logarithmic refinement
//! weight
//!
//! ```text
//! W_N(r) = sum_{k=1..N} prod_{p=1..k} [ln_p(eta / r)]^{-2}
//! ```
//!
//! together with its companion `S_N(r) = sum_k prod_p [ln_p(eta / r)]^{-1}`
//! that appears in the first-order factorization operator. Both satisfy
//! `2 r S_N'(r) - S_N(r)^2 = W_N(r)`, which is what makes the factorization
//! identity close.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest refinement depth whose threshold `e_N` is finite in `f64`.
pub const MAX_DEPTH: u32 = 4;

/// Iterated exponential: `e_0 = 0`, `e_{j+1} = exp(e_j)`.
pub fn iter_exp(j: u32) -> Result<f64> {
    if j > MAX_DEPTH {
        return Err(Error::DepthOverflow(j));
    }
    Ok((0..j).fold(0.0_f64, |e, _| e.exp()))
}

/// Iterated logarithm `ln_k(x)`, with `ln_1 = ln` and `ln_{k+1} = ln . ln_k`.
pub fn iter_log(k: u32, x: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::DomainError("iterated log depth must be >= 1".into()));
    }
    let mut v = x;
    for level in 0..k {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::DomainError(format!("ln_{level} argument {v} is not a positive finite number")));
        }
        v = v.ln();
    }
    Ok(v)
}

/// Depth, anchor and domain radius of a logarithmic refinement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogWeightSpec {
    depth: u32,
    eta: f64,
    radius: f64,
}

/// `W_N(r)` and `S_N(r)` at one radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogFactors {
    /// `sum_k prod_p ln_p^{-2}`
    pub weight: f64,
    /// `sum_k prod_p ln_p^{-1}`
    pub first_order: f64,
}

impl LogWeightSpec {
    /// Checks `eta >= e_N * R` when `N >= 1`. Depth 0 switches the refinement
    /// off and accepts any positive `eta`.
    pub fn new(depth: u32, eta: f64, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::NonpositiveRadius(radius));
        }
        if depth > 0 {
            let threshold = iter_exp(depth)? * radius;
            if !(eta >= threshold) || !eta.is_finite() {
                return Err(Error::EtaBelowThreshold { eta, depth, threshold });
            }
        } else if !(eta > 0.0) {
            return Err(Error::DomainError(format!("eta = {eta} must be positive")));
        }
        Ok(Self { depth, eta, radius })
    }

    /// Depth `N` with the smallest admissible anchor `eta = e_N R`.
    pub fn critical(depth: u32, radius: f64) -> Result<Self> {
        let eta = if depth == 0 { radius } else { iter_exp(depth)? * radius };
        Self::new(depth, eta, radius)
    }

    /// No refinement.
    pub fn disabled(radius: f64) -> Result<Self> {
        Self::new(0, radius, radius)
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Same anchor and radius, different depth. Fails if the anchor is too
    /// small for the new depth.
    pub fn with_depth(&self, depth: u32) -> Result<Self> {
        Self::new(depth, self.eta, self.radius)
    }

    /// `W_N(r)` for `0 < r < R`.
    pub fn weight_sum(&self, r: f64) -> Result<f64> {
        self.factors(r).map(|f| f.weight)
    }

    /// `W_N(r)` and `S_N(r)` for `0 < r < R`.
    pub fn factors(&self, r: f64) -> Result<LogFactors> {
        if !(r > 0.0 && r < self.radius) {
            return Err(Error::DomainError(format!("r = {r} outside (0, {})", self.radius)));
        }
        let f = self.factors_unchecked(r);
        if !(f.weight.is_finite() && f.first_order.is_finite()) {
            return Err(Error::DomainError(format!("log weight not finite at r = {r}")));
        }
        Ok(f)
    }

    /// Running-product evaluation; callers guarantee `0 < r < R`.
    #[inline]
    pub(crate) fn factors_unchecked(&self, r: f64) -> LogFactors {
        let mut weight = 0.0;
        let mut first_order = 0.0;
        let mut prod = 1.0;
        let mut level = self.eta / r;
        for _ in 0..self.depth {
            level = level.ln();
            prod /= level;
            first_order += prod;
            weight += prod * prod;
        }
        LogFactors { weight, first_order }
    }

    /// `ln_p(eta / r)` for `p = 1..=N`.
    pub fn log_levels(&self, r: f64) -> Result<Vec<f64>> {
        (1..=self.depth).map(|p| iter_log(p, self.eta / r)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    #[test]
    fn iterated_exponentials() {
        assert_eq!(iter_exp(0).unwrap(), 0.0);
        assert_eq!(iter_exp(1).unwrap(), 1.0);
        assert_eq!(iter_exp(2).unwrap(), E);
        assert!((iter_exp(3).unwrap() - E.exp()).abs() < 1e-12);
        assert!(iter_exp(4).unwrap() > 3.8e6);
        assert_eq!(iter_exp(5), Err(Error::DepthOverflow(5)));
    }

    #[test]
    fn iterated_logs() {
        assert!((iter_log(1, E).unwrap() - 1.0).abs() < 1e-15);
        assert!((iter_log(2, E.exp()).unwrap() - 1.0).abs() < 1e-15);
        assert!(iter_log(2, E).unwrap().abs() < 1e-15);
        assert!(matches!(iter_log(2, 0.5), Err(Error::DomainError(_))));
        assert!(matches!(iter_log(1, -1.0), Err(Error::DomainError(_))));
    }

    #[test]
    fn weight_sum_examples() {
        let spec = LogWeightSpec::new(1, E, 1.0).unwrap();
        assert!((spec.weight_sum(0.5).unwrap() - (2.0 * E).ln().powi(-2)).abs() < 1e-15);
        // eta / r = e
        let spec = LogWeightSpec::new(1, E, 2.0).unwrap();
        assert!((spec.weight_sum(1.0).unwrap() - 1.0).abs() < 1e-15);
        // eta / r = e^e gives e^{-2} + e^{-2} * 1
        let spec = LogWeightSpec::new(2, E.exp(), 2.0).unwrap();
        let w = spec.weight_sum(1.0).unwrap();
        assert!((w - 2.0 * E.powi(-2)).abs() < 1e-14);
        assert!((w - 0.270670566).abs() < 1e-9);
        let off = LogWeightSpec::disabled(1.0).unwrap();
        assert_eq!(off.weight_sum(0.3).unwrap(), 0.0);
    }

    #[test]
    fn admissibility() {
        assert!(LogWeightSpec::new(2, 2.0, 1.0).is_err());
        assert!(LogWeightSpec::new(2, E, 1.0).is_ok());
        assert!(LogWeightSpec::new(1, 0.99, 1.0).is_err());
        assert!(LogWeightSpec::new(0, 0.1, 1.0).is_ok());
        assert!(LogWeightSpec::new(5, 1e300, 1.0).is_err());
        let spec = LogWeightSpec::critical(2, 1.0).unwrap();
        assert!(spec.weight_sum(1.0).is_err());
        assert!(spec.weight_sum(0.0).is_err());
    }

    #[test]
    fn blow_up_at_edge_and_decay_at_origin() {
        for depth in 1..=3 {
            let spec = LogWeightSpec::critical(depth, 1.0).unwrap();
            let edge: Vec<f64> = (2..=8).map(|k| spec.weight_sum(1.0 - 10f64.powi(-k)).unwrap()).collect();
            assert!(edge.windows(2).all(|w| w[1] > w[0]), "{edge:?}");
            let origin: Vec<f64> = (1..=12).map(|k| spec.weight_sum(10f64.powi(-k)).unwrap()).collect();
            assert!(origin.windows(2).all(|w| w[1] < w[0]), "{origin:?}");
        }
    }

    #[test]
    fn nesting_and_positive_levels() {
        let eta = iter_exp(3).unwrap();
        let specs: Vec<_> = (0..=3).map(|d| LogWeightSpec::new(d, eta, 1.0).unwrap()).collect();
        for i in 0..1000 {
            let r = 10f64.powf(-6.0 + 6.0 * (i as f64 + 0.5) / 1000.0);
            let r = r.min(1.0 - 1e-9);
            for d in 0..3 {
                assert!(specs[d + 1].weight_sum(r).unwrap() > specs[d].weight_sum(r).unwrap());
            }
            let crit = LogWeightSpec::critical(3, 1.0).unwrap();
            assert!(crit.log_levels(r).unwrap().iter().all(|&l| l > 0.0));
        }
    }

    #[test]
    fn first_order_relation() {
        // 2 r S' - S^2 = W, S' by central differences
        let spec = LogWeightSpec::critical(3, 1.0).unwrap();
        for &r in &[0.01, 0.1, 0.4, 0.7] {
            let h = 1e-5 * r;
            let sp = (spec.factors(r + h).unwrap().first_order - spec.factors(r - h).unwrap().first_order) / (2.0 * h);
            let f = spec.factors(r).unwrap();
            let lhs = 2.0 * r * sp - f.first_order * f.first_order;
            assert!((lhs - f.weight).abs() < 1e-7 * f.weight.max(1.0), "{r}: {lhs} vs {}", f.weight);
        }
    }
}
