//! Two-body permutationally invariant Bell expressions and their evaluation
//! on symmetrized correlators.

use serde::{Deserialize, Serialize};

use crate::error::{PibiError, Result};

/// Coefficients of a two-body permutationally invariant Bell expression
///
/// ```text
/// I = alpha0·S0 + alpha1·S1 + alpha00·S00 + alpha01·S01 + alpha11·S11
/// ```
///
/// where `Sk` sums the single-party correlators of setting `k` and `Skl` the
/// two-party correlators over ordered pairs of distinct parties.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PibiCoefficients {
    pub alpha0: f64,
    pub alpha1: f64,
    pub alpha00: f64,
    pub alpha01: f64,
    pub alpha11: f64,
}

impl PibiCoefficients {
    pub fn new(alpha0: f64, alpha1: f64, alpha00: f64, alpha01: f64, alpha11: f64) -> Result<Self> {
        let c = PibiCoefficients {
            alpha0,
            alpha1,
            alpha00,
            alpha01,
            alpha11,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let vals = self.as_array();
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(PibiError::InvalidInput(
                "inequality coefficients must all be finite".into(),
            ));
        }
        if vals.iter().all(|v| *v == 0.0) {
            return Err(PibiError::InvalidInput(
                "inequality coefficients must not all be zero".into(),
            ));
        }
        Ok(())
    }

    pub fn as_array(&self) -> [f64; 5] {
        [self.alpha0, self.alpha1, self.alpha00, self.alpha01, self.alpha11]
    }

    /// Two-body coefficients in `(00, 01, 11)` order.
    pub fn two_body(&self) -> [f64; 3] {
        [self.alpha00, self.alpha01, self.alpha11]
    }

    /// One-body coefficients in `(0, 1)` order.
    pub fn one_body(&self) -> [f64; 2] {
        [self.alpha0, self.alpha1]
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        PibiCoefficients {
            alpha0: lambda * self.alpha0,
            alpha1: lambda * self.alpha1,
            alpha00: lambda * self.alpha00,
            alpha01: lambda * self.alpha01,
            alpha11: lambda * self.alpha11,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let c: PibiCoefficients = serde_json::from_str(text)
            .map_err(|e| PibiError::Parse(format!("inequality file: {e}")))?;
        c.validate()?;
        Ok(c)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializing five floats cannot fail")
    }
}

/// The bundled default inequality, `I = -2 S0 + S00/2 - S01 + S11/2`.
impl Default for PibiCoefficients {
    fn default() -> Self {
        PibiCoefficients {
            alpha0: -2.0,
            alpha1: 0.0,
            alpha00: 0.5,
            alpha01: -1.0,
            alpha11: 0.5,
        }
    }
}

/// Symmetrized one- and two-body correlators of an n-party behaviour.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelatorVector {
    pub s0: f64,
    pub s1: f64,
    pub s00: f64,
    pub s01: f64,
    pub s11: f64,
    pub n: usize,
}

impl CorrelatorVector {
    pub fn new(s0: f64, s1: f64, s00: f64, s01: f64, s11: f64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(PibiError::InvalidInput("party count must be positive".into()));
        }
        let nf = n as f64;
        let pair = nf * (nf - 1.0);
        let tol = 1e-9 * nf.max(1.0);
        if s0.abs() > nf + tol || s1.abs() > nf + tol {
            return Err(PibiError::InvalidInput(format!(
                "one-body correlators must lie in [-{n}, {n}]"
            )));
        }
        if s00.abs() > pair + tol || s11.abs() > pair + tol || s01.abs() > pair + tol {
            return Err(PibiError::InvalidInput(format!(
                "two-body correlators must lie in [-{pair}, {pair}]"
            )));
        }
        Ok(CorrelatorVector { s0, s1, s00, s01, s11, n })
    }
}

/// Value of the Bell expression on a correlator vector.
pub fn evaluate_expression(coeffs: &PibiCoefficients, corr: &CorrelatorVector) -> f64 {
    coeffs.alpha0 * corr.s0
        + coeffs.alpha1 * corr.s1
        + coeffs.alpha00 * corr.s00
        + coeffs.alpha01 * corr.s01
        + coeffs.alpha11 * corr.s11
}
