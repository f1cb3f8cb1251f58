//! Parameter tuple `(n, gamma, N, R, eta)` and the spectrum of the
//! Laplace-Beltrami operator on the unit sphere `S^{n-1}`.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::log_weights::LogWeightSpec;

/// Raw, unchecked parameter tuple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Parameters {
    /// Space dimension, at least 2.
    pub n: u32,
    /// Power weight exponent.
    pub gamma: f64,
    /// Logarithmic refinement depth; 0 disables the log terms.
    pub depth: u32,
    /// Ball radius.
    pub radius: f64,
    /// Log anchor, at least `e_N * R` when `depth >= 1`.
    pub eta: f64,
}

impl Parameters {
    pub fn new(n: u32, gamma: f64, depth: u32, radius: f64, eta: f64) -> Self {
        Self { n, gamma, depth, radius, eta }
    }

    pub fn validate(self) -> Result<ValidatedParameters> {
        validate_params(self)
    }
}

/// Parameters that passed [`validate_params`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValidatedParameters {
    raw: Parameters,
    log_spec: LogWeightSpec,
}

impl ValidatedParameters {
    pub fn n(&self) -> u32 {
        self.raw.n
    }

    pub fn gamma(&self) -> f64 {
        self.raw.gamma
    }

    pub fn depth(&self) -> u32 {
        self.raw.depth
    }

    pub fn radius(&self) -> f64 {
        self.raw.radius
    }

    pub fn eta(&self) -> f64 {
        self.raw.eta
    }

    pub fn raw(&self) -> Parameters {
        self.raw
    }

    pub fn log_spec(&self) -> &LogWeightSpec {
        &self.log_spec
    }

    /// The same `(n, gamma, R)` with the log refinement switched off.
    pub fn without_log(&self) -> ValidatedParameters {
        let raw = Parameters { depth: 0, eta: self.raw.radius, ..self.raw };
        validate_params(raw).expect("dropping the refinement keeps parameters valid")
    }

    /// The spherical mode of degree `j` in this dimension.
    pub fn mode(&self, j: u32) -> SphericalMode {
        SphericalMode::new(self.raw.n, j)
    }
}

pub fn validate_params(p: Parameters) -> Result<ValidatedParameters> {
    if p.n < 2 {
        return Err(Error::DimensionTooSmall(p.n));
    }
    if !p.gamma.is_finite() {
        return Err(Error::Config(format!("gamma = {} is not finite", p.gamma)));
    }
    let log_spec = LogWeightSpec::new(p.depth, p.eta, p.radius)?;
    Ok(ValidatedParameters { raw: p, log_spec })
}

/// `lambda_j = j (j + n - 2)`.
pub fn eigenvalue(n: u32, j: u32) -> f64 {
    let j = j as f64;
    j * (j + n as f64 - 2.0)
}

fn binomial(m: u64, k: u64) -> BigUint {
    if k > m {
        return BigUint::zero();
    }
    let k = k.min(m - k);
    let mut acc = BigUint::one();
    for i in 1..=k {
        acc *= m - k + i;
        acc /= i;
    }
    acc
}

/// Dimension of the space of degree-`j` spherical harmonics on `S^{n-1}`,
/// `(2j + n - 2) / (j + n - 2) * C(j + n - 2, n - 2)`. The formula is `0/0`
/// for `n = 2, j = 0`; the constants span that eigenspace, so it is 1.
pub fn multiplicity(n: u32, j: u32) -> BigUint {
    assert!(n >= 2, "multiplicity needs n >= 2");
    if n == 2 && j == 0 {
        return BigUint::one();
    }
    let (n, j) = (n as u64, j as u64);
    let numerator = BigUint::from(2 * j + n - 2) * binomial(j + n - 2, n - 2);
    let denominator = BigUint::from(j + n - 2);
    debug_assert!((&numerator % &denominator).is_zero());
    numerator / denominator
}

/// One eigenspace of `-Delta_{S^{n-1}}`. The eigenfunctions themselves are
/// never evaluated; only `lambda_j` and orthonormality enter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphericalMode {
    pub n: u32,
    pub j: u32,
    pub lambda: f64,
    #[serde(with = "biguint_string")]
    pub mult: BigUint,
}

impl SphericalMode {
    pub fn new(n: u32, j: u32) -> Self {
        Self { n, j, lambda: eigenvalue(n, j), mult: multiplicity(n, j) }
    }

    /// Multiplicity as a float, for bookkeeping output.
    pub fn mult_f64(&self) -> f64 {
        self.mult.to_f64().unwrap_or(f64::INFINITY)
    }
}

mod biguint_string {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
