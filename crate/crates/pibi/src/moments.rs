//! Per-block expectation bookkeeping shared by the variational optimizers.
//!
//! A product state over a partition enters the Bell expression only through
//! the block moments `⟨B_k⟩` and `⟨B_kl⟩`; everything downstream (objective
//! value, mean-field coefficients, correlators) is arithmetic on those.

use crate::ineq::{CorrelatorVector, PibiCoefficients};

/// First and second region moments of one block:
/// `b[k] = ⟨B_k⟩`, `t[i] = ⟨B_kl⟩` for `kl` in `(00, 01, 11)` order.
#[derive(Debug, Clone, Copy, Default)]
pub struct BlockMoments {
    pub b: [f64; 2],
    pub t: [f64; 3],
}

/// Bell expression value of a product state with these block moments.
pub fn combine_value(coeffs: &PibiCoefficients, moments: &[BlockMoments]) -> f64 {
    let mut within = 0.0;
    let mut sum_b = [0.0f64; 2];
    let mut sum_bb = [0.0f64; 3]; // Σ_A b0², Σ_A b0·b1, Σ_A b1²
    for m in moments {
        within += coeffs.alpha0 * m.b[0]
            + coeffs.alpha1 * m.b[1]
            + coeffs.alpha00 * m.t[0]
            + coeffs.alpha01 * m.t[1]
            + coeffs.alpha11 * m.t[2];
        sum_b[0] += m.b[0];
        sum_b[1] += m.b[1];
        sum_bb[0] += m.b[0] * m.b[0];
        sum_bb[1] += m.b[0] * m.b[1];
        sum_bb[2] += m.b[1] * m.b[1];
    }
    // crossed terms over ordered block pairs A ≠ A'
    let crossed = coeffs.alpha00 * (sum_b[0] * sum_b[0] - sum_bb[0])
        + coeffs.alpha01 * (sum_b[0] * sum_b[1] - sum_bb[1])
        + coeffs.alpha11 * (sum_b[1] * sum_b[1] - sum_bb[2]);
    within + crossed
}

/// Effective one-body coefficients of the dressed operator for `target`,
/// folding in the mean field of every other block.
pub fn mean_field_coefficients(
    coeffs: &PibiCoefficients,
    moments: &[BlockMoments],
    target: usize,
) -> [f64; 2] {
    let mut other = [0.0f64; 2];
    for (i, m) in moments.iter().enumerate() {
        if i != target {
            other[0] += m.b[0];
            other[1] += m.b[1];
        }
    }
    [
        coeffs.alpha0 + 2.0 * coeffs.alpha00 * other[0] + coeffs.alpha01 * other[1],
        coeffs.alpha1 + 2.0 * coeffs.alpha11 * other[1] + coeffs.alpha01 * other[0],
    ]
}

/// The part of the objective that does not involve `target` at all.
pub fn objective_without_block(
    coeffs: &PibiCoefficients,
    moments: &[BlockMoments],
    target: usize,
) -> f64 {
    let others: Vec<BlockMoments> = moments
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != target)
        .map(|(_, m)| *m)
        .collect();
    combine_value(coeffs, &others)
}

/// Symmetrized correlators of the product state with these block moments.
pub fn correlators(moments: &[BlockMoments], n: usize) -> CorrelatorVector {
    let mut s = [0.0f64; 2];
    let mut t = [0.0f64; 3];
    let mut bb = [0.0f64; 3];
    for m in moments {
        s[0] += m.b[0];
        s[1] += m.b[1];
        t[0] += m.t[0];
        t[1] += m.t[1];
        t[2] += m.t[2];
        bb[0] += m.b[0] * m.b[0];
        bb[1] += m.b[0] * m.b[1];
        bb[2] += m.b[1] * m.b[1];
    }
    CorrelatorVector {
        s0: s[0],
        s1: s[1],
        s00: t[0] + s[0] * s[0] - bb[0],
        s01: t[1] + s[0] * s[1] - bb[1],
        s11: t[2] + s[1] * s[1] - bb[2],
        n,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ineq::evaluate_expression;
    use approx::assert_abs_diff_eq;

    #[test]
    fn combine_matches_expression_on_correlators() {
        let coeffs = PibiCoefficients::new(0.7, -0.4, 0.3, -1.2, 0.9).unwrap();
        let moments = vec![
            BlockMoments { b: [0.5, -0.25], t: [1.5, 0.25, -0.75] },
            BlockMoments { b: [-1.0, 0.75], t: [0.5, -0.5, 2.0] },
            BlockMoments { b: [0.0, 0.1], t: [0.0, 0.0, 0.0] },
        ];
        let via_combine = combine_value(&coeffs, &moments);
        let via_corr = evaluate_expression(&coeffs, &correlators(&moments, 7));
        assert_abs_diff_eq!(via_combine, via_corr, epsilon = 1e-12);
    }

    #[test]
    fn mean_field_single_block_is_bare() {
        let coeffs = PibiCoefficients::default();
        let moments = vec![BlockMoments { b: [0.4, 0.6], t: [0.0; 3] }];
        assert_eq!(
            mean_field_coefficients(&coeffs, &moments, 0),
            [coeffs.alpha0, coeffs.alpha1]
        );
    }

    #[test]
    fn mean_field_zero_when_others_vanish() {
        let coeffs = PibiCoefficients::default();
        let moments = vec![
            BlockMoments { b: [0.4, 0.6], t: [0.1, 0.2, 0.3] },
            BlockMoments { b: [0.0, 0.0], t: [0.5, 0.5, 0.5] },
        ];
        assert_eq!(
            mean_field_coefficients(&coeffs, &moments, 0),
            [coeffs.alpha0, coeffs.alpha1]
        );
    }
}
