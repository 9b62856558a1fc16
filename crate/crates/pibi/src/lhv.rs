//! Exact classical (1-producible) bound by enumeration over deterministic
//! strategy counts.
//!
//! A deterministic local strategy assigns each party one of four outcome
//! pairs `(a0, a1) ∈ {(+,+), (+,-), (-,+), (-,-)}`. Permutation invariance
//! means only the multiplicities matter, so the minimum over all LHV models
//! is found by an O(n³) sweep over count tuples.

use serde::{Deserialize, Serialize};

use crate::error::{PibiError, Result};
use crate::exec;
use crate::ineq::{evaluate_expression, CorrelatorVector, PibiCoefficients};

/// Multiplicities of the four deterministic single-party strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrategyCounts {
    /// parties answering `(+1, +1)`
    pub n1: usize,
    /// parties answering `(+1, -1)`
    pub n2: usize,
    /// parties answering `(-1, +1)`
    pub n3: usize,
    /// parties answering `(-1, -1)`
    pub n4: usize,
}

impl StrategyCounts {
    pub fn new(n1: usize, n2: usize, n3: usize, n4: usize) -> Self {
        StrategyCounts { n1, n2, n3, n4 }
    }

    pub fn n(&self) -> usize {
        self.n1 + self.n2 + self.n3 + self.n4
    }

    fn as_tuple(&self) -> (usize, usize, usize, usize) {
        (self.n1, self.n2, self.n3, self.n4)
    }
}

/// Symmetrized correlators of the deterministic assignment with these counts.
pub fn correlators_from_counts(counts: &StrategyCounts) -> Result<CorrelatorVector> {
    let n = counts.n();
    if n == 0 {
        return Err(PibiError::InvalidInput("strategy counts sum to zero".into()));
    }
    let (n1, n2, n3, n4) = (
        counts.n1 as f64,
        counts.n2 as f64,
        counts.n3 as f64,
        counts.n4 as f64,
    );
    let s0 = n1 + n2 - n3 - n4;
    let s1 = n1 - n2 + n3 - n4;
    let c = n1 - n2 - n3 + n4; // Σ_i a0_i a1_i
    let nf = n as f64;
    CorrelatorVector::new(s0, s1, s0 * s0 - nf, s0 * s1 - c, s1 * s1 - nf, n)
}

/// Exact classical bound and one minimizing count tuple.
///
/// Ties break toward the lexicographically smallest `(n1, n2, n3, n4)`.
pub fn classical_bound(coeffs: &PibiCoefficients, n: usize) -> Result<(f64, StrategyCounts)> {
    if n == 0 {
        return Err(PibiError::InvalidInput("party count must be positive".into()));
    }
    coeffs.validate()?;
    let coeffs = *coeffs;

    let per_n1: Vec<(f64, StrategyCounts)> = exec::map_collect((0..=n).collect(), move |n1| {
        let mut best_val = f64::INFINITY;
        let mut best = StrategyCounts::new(n, 0, 0, 0);
        for n2 in 0..=(n - n1) {
            for n3 in 0..=(n - n1 - n2) {
                let counts = StrategyCounts::new(n1, n2, n3, n - n1 - n2 - n3);
                let corr = correlators_from_counts(&counts).expect("counts sum to n");
                let val = evaluate_expression(&coeffs, &corr);
                if val < best_val || (val == best_val && counts.as_tuple() < best.as_tuple()) {
                    best_val = val;
                    best = counts;
                }
            }
        }
        (best_val, best)
    });

    let idx = exec::argmin_by_key(&per_n1, |(v, c)| (*v, c.as_tuple())).expect("non-empty");
    Ok(per_n1[idx])
}
