//! Qubit observables and dense Bell-operator assembly.
//!
//! Observables live in the x–z plane, so every operator here is real
//! symmetric. Party `i` owns bit `n - 1 - i` of the computational index,
//! which makes party 0 the leftmost factor in Kronecker products.

use ndarray::Array2;

use crate::error::{PibiError, Result};
use crate::ineq::PibiCoefficients;
use crate::settings::MeasurementSettings;

/// Default cap on `n` for dense `2^n` constructions.
pub const DENSE_CAP: usize = 12;

/// The measurement observable `cosθ σx + sinθ σz` as a 2×2 matrix.
pub fn observable(theta: f64) -> Result<[[f64; 2]; 2]> {
    if !theta.is_finite() {
        return Err(PibiError::InvalidInput("observable angle must be finite".into()));
    }
    let (s, c) = theta.sin_cos();
    Ok([[s, c], [c, -s]])
}

pub fn observable_matrix(theta: f64) -> Result<Array2<f64>> {
    let m = observable(theta)?;
    Ok(ndarray::arr2(&m))
}

/// Dense Bell operator on `n` qubits.
#[derive(Debug, Clone)]
pub struct BellOperator {
    pub n: usize,
    pub matrix: Array2<f64>,
}

/// Add `scale * M` acting on one site of an n-qubit operator.
pub(crate) fn add_one_site(mat: &mut Array2<f64>, m: &[[f64; 2]; 2], site: usize, n: usize, scale: f64) {
    let dim = 1usize << n;
    let bit = n - 1 - site;
    for r in 0..dim {
        let br = (r >> bit) & 1;
        for bc in 0..2 {
            let c = (r & !(1 << bit)) | (bc << bit);
            let v = m[br][bc];
            if v != 0.0 {
                mat[[r, c]] += scale * v;
            }
        }
    }
}

/// Add `scale * M ⊗ N` acting on two distinct sites.
pub(crate) fn add_two_site(
    mat: &mut Array2<f64>,
    mi: &[[f64; 2]; 2],
    mj: &[[f64; 2]; 2],
    site_i: usize,
    site_j: usize,
    n: usize,
    scale: f64,
) {
    debug_assert_ne!(site_i, site_j);
    let dim = 1usize << n;
    let bi = n - 1 - site_i;
    let bj = n - 1 - site_j;
    let mask = !((1usize << bi) | (1usize << bj));
    for r in 0..dim {
        let ri = (r >> bi) & 1;
        let rj = (r >> bj) & 1;
        let base = r & mask;
        for ci in 0..2 {
            let vi = mi[ri][ci];
            if vi == 0.0 {
                continue;
            }
            for cj in 0..2 {
                let v = vi * mj[rj][cj];
                if v == 0.0 {
                    continue;
                }
                let c = base | (ci << bi) | (cj << bj);
                mat[[r, c]] += scale * v;
            }
        }
    }
}

/// Assemble the full dense Bell operator for per-party settings.
pub fn build_bell_operator(
    coeffs: &PibiCoefficients,
    settings: &MeasurementSettings,
    n: usize,
) -> Result<BellOperator> {
    build_bell_operator_capped(coeffs, settings, n, DENSE_CAP)
}

pub fn build_bell_operator_capped(
    coeffs: &PibiCoefficients,
    settings: &MeasurementSettings,
    n: usize,
    cap: usize,
) -> Result<BellOperator> {
    if n == 0 {
        return Err(PibiError::InvalidInput("party count must be positive".into()));
    }
    if n > cap {
        return Err(PibiError::Capacity(format!(
            "dense Bell operator needs 2^{n} dimensions, cap is 2^{cap}"
        )));
    }
    if settings.num_units() != n {
        return Err(PibiError::Dimension(format!(
            "{} angle pairs for {n} parties",
            settings.num_units()
        )));
    }
    coeffs.validate()?;

    let obs: Vec<[[[f64; 2]; 2]; 2]> = (0..n)
        .map(|i| {
            Ok([
                observable(settings.angle(i, 0))?,
                observable(settings.angle(i, 1))?,
            ])
        })
        .collect::<Result<_>>()?;

    let dim = 1usize << n;
    let mut mat = Array2::zeros((dim, dim));
    let one_body = coeffs.one_body();
    for i in 0..n {
        for k in 0..2 {
            if one_body[k] != 0.0 {
                add_one_site(&mut mat, &obs[i][k], i, n, one_body[k]);
            }
        }
    }
    // ordered pairs (i, j), i measuring setting k and j setting l
    let pair_terms = [(0usize, 0usize, coeffs.alpha00), (0, 1, coeffs.alpha01), (1, 1, coeffs.alpha11)];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            for &(k, l, alpha) in &pair_terms {
                if alpha != 0.0 {
                    add_two_site(&mut mat, &obs[i][k], &obs[j][l], i, j, n, alpha);
                }
            }
        }
    }
    Ok(BellOperator { n, matrix: mat })
}

/// The region operators `B_k = Σ_i M_k^(i)` and `B_kl = Σ_{i≠j} M_k^(i) M_l^(j)`
/// for a block of parties with the given per-party angles.
#[derive(Debug, Clone)]
pub struct RegionOperators {
    pub size: usize,
    /// `B_0`, `B_1`.
    pub one_body: [Array2<f64>; 2],
    /// `B_00`, `B_01`, `B_11`.
    pub two_body: [Array2<f64>; 3],
}

pub fn region_operators(block_angles: &[[f64; 2]]) -> Result<RegionOperators> {
    region_operators_capped(block_angles, DENSE_CAP)
}

pub fn region_operators_capped(block_angles: &[[f64; 2]], cap: usize) -> Result<RegionOperators> {
    let s = block_angles.len();
    if s == 0 {
        return Err(PibiError::InvalidInput("region must contain at least one party".into()));
    }
    if s > cap {
        return Err(PibiError::Capacity(format!(
            "dense region operators need 2^{s} dimensions, cap is 2^{cap}"
        )));
    }
    let obs: Vec<[[[f64; 2]; 2]; 2]> = block_angles
        .iter()
        .map(|&[t0, t1]| Ok([observable(t0)?, observable(t1)?]))
        .collect::<Result<_>>()?;

    let dim = 1usize << s;
    let mut one_body = [Array2::zeros((dim, dim)), Array2::zeros((dim, dim))];
    for (k, ob) in one_body.iter_mut().enumerate() {
        for i in 0..s {
            add_one_site(ob, &obs[i][k], i, s, 1.0);
        }
    }
    let mut two_body = [
        Array2::zeros((dim, dim)),
        Array2::zeros((dim, dim)),
        Array2::zeros((dim, dim)),
    ];
    let kl = [(0usize, 0usize), (0, 1), (1, 1)];
    for (t, &(k, l)) in kl.iter().enumerate() {
        for i in 0..s {
            for j in 0..s {
                if i != j {
                    add_two_site(&mut two_body[t], &obs[i][k], &obs[j][l], i, j, s, 1.0);
                }
            }
        }
    }
    Ok(RegionOperators { size: s, one_body, two_body })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{asymmetry, kron};
    use approx::assert_abs_diff_eq;
    use ndarray::arr2;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    #[test]
    fn observable_special_angles() {
        let sx = observable(0.0).unwrap();
        assert_eq!(sx, [[0.0, 1.0], [1.0, 0.0]]);
        let sz = observable(FRAC_PI_2).unwrap();
        assert_abs_diff_eq!(sz[0][0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(sz[0][1], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(sz[1][1], -1.0, epsilon = 1e-15);
        let m = observable(FRAC_PI_4).unwrap();
        let h = 0.5f64.sqrt();
        assert_abs_diff_eq!(m[0][0], h, epsilon = 1e-15);
        assert_abs_diff_eq!(m[0][1], h, epsilon = 1e-15);
        assert_abs_diff_eq!(m[1][1], -h, epsilon = 1e-15);
        assert!(observable(f64::NAN).is_err());
    }

    #[test]
    fn observable_squares_to_identity() {
        for g in 0..100 {
            let theta = g as f64 / 100.0 * 2.0 * PI;
            let m = observable_matrix(theta).unwrap();
            let m2 = m.dot(&m);
            assert_abs_diff_eq!(m2[[0, 0]], 1.0, epsilon = 1e-14);
            assert_abs_diff_eq!(m2[[1, 1]], 1.0, epsilon = 1e-14);
            assert_abs_diff_eq!(m2[[0, 1]], 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn single_party_operator() {
        let c = PibiCoefficients::new(1.0, 0.5, 0.25, -1.0, 0.5).unwrap();
        let s = MeasurementSettings::per_party(vec![[0.2, 1.1]]).unwrap();
        let b = build_bell_operator(&c, &s, 1).unwrap();
        let want = observable_matrix(0.2).unwrap() * 1.0 + observable_matrix(1.1).unwrap() * 0.5;
        for i in 0..2 {
            for j in 0..2 {
                assert_abs_diff_eq!(b.matrix[[i, j]], want[[i, j]], epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn two_party_xx_double_count() {
        let c = PibiCoefficients::new(0.0, 0.0, 1.0, 0.0, 0.0).unwrap();
        let s = MeasurementSettings::uniform(crate::settings::SettingsMode::PerParty, 2, 0.0, 0.0).unwrap();
        let b = build_bell_operator(&c, &s, 2).unwrap();
        let sx = arr2(&[[0.0, 1.0], [1.0, 0.0]]);
        let want = kron(&sx, &sx) * 2.0;
        for i in 0..4 {
            for j in 0..4 {
                assert_abs_diff_eq!(b.matrix[[i, j]], want[[i, j]], epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn operator_is_symmetric() {
        let c = PibiCoefficients::default();
        let s = MeasurementSettings::per_party(vec![[0.3, 1.2], [2.1, 0.7], [0.0, 5.0], [1.0, 4.4]]).unwrap();
        let b = build_bell_operator(&c, &s, 4).unwrap();
        assert!(asymmetry(&b.matrix) < 1e-12);
    }

    #[test]
    fn capacity_error_over_cap() {
        let c = PibiCoefficients::default();
        let s = MeasurementSettings::uniform(crate::settings::SettingsMode::PerParty, 13, 0.0, 1.0).unwrap();
        assert!(matches!(
            build_bell_operator(&c, &s, 13),
            Err(PibiError::Capacity(_))
        ));
    }

    #[test]
    fn region_block_size_one_has_no_pairs() {
        let r = region_operators(&[[0.4, 1.3]]).unwrap();
        for t in &r.two_body {
            assert_abs_diff_eq!(t.iter().map(|x| x.abs()).sum::<f64>(), 0.0);
        }
    }

    #[test]
    fn region_two_qubits_theta_zero() {
        let r = region_operators(&[[0.0, 0.0], [0.0, 0.0]]).unwrap();
        let sx = arr2(&[[0.0, 1.0], [1.0, 0.0]]);
        let want = kron(&sx, &sx) * 2.0;
        for i in 0..4 {
            for j in 0..4 {
                assert_abs_diff_eq!(r.two_body[0][[i, j]], want[[i, j]], epsilon = 1e-14);
            }
        }
    }
}
