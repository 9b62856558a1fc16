//! Many-body bound estimates from a product of Gaussian superpositions of
//! Dicke states.
//!
//! Each block of the partition carries the amplitude profile
//! `ψ_m ∝ exp(−(m − μ)² / 4σ)` over its Dicke excitation index, renormalized
//! after truncation to `0..s`. The expectation of the block-collective Bell
//! operator on this product state is evaluated exactly; the four shared
//! parameters `(μ, σ, θ0, θ1)` are then minimized with a simplex search.

use ndarray::Array1;
use rand::Rng;

use crate::error::{PibiError, Result};
use crate::exec;
use crate::ineq::PibiCoefficients;
use crate::moments::{combine_value, BlockMoments};
use crate::optim::nelder_mead;
use crate::partition::Partition;
use crate::seesaw::{job_rng, SeesawOptions};
use crate::spin::{collective_moments, collective_region_operators, SpinBlock};

/// Per-block Gaussian parameters plus region angles.
#[derive(Debug, Clone)]
pub struct GaussianDickeParams {
    /// `(μ, σ)` per block, in Dicke-excitation units; `σ > 0`.
    pub blocks: Vec<(f64, f64)>,
    /// Region angles `(θ0, θ1)` per block.
    pub angles: Vec<[f64; 2]>,
}

impl GaussianDickeParams {
    pub fn validate(&self, partition: &Partition) -> Result<()> {
        if self.blocks.len() != partition.num_blocks() || self.angles.len() != partition.num_blocks() {
            return Err(PibiError::Dimension(
                "Gaussian parameters must match the partition's block count".into(),
            ));
        }
        if self.blocks.iter().any(|&(mu, sigma)| !mu.is_finite() || !(sigma > 0.0)) {
            return Err(PibiError::InvalidInput("need finite μ and σ > 0".into()));
        }
        Ok(())
    }

    /// Same `(μ, σ, θ0, θ1)` for every block.
    pub fn uniform(partition: &Partition, mu: f64, sigma: f64, theta0: f64, theta1: f64) -> Self {
        let m = partition.num_blocks();
        GaussianDickeParams {
            blocks: vec![(mu, sigma); m],
            angles: vec![[theta0, theta1]; m],
        }
    }
}

/// Normalized Gaussian amplitude vector over excitations `0..=s`.
pub fn gaussian_amplitudes(s: usize, mu: f64, sigma: f64) -> Result<Array1<f64>> {
    if !(sigma > 0.0) || !mu.is_finite() {
        return Err(PibiError::InvalidInput(format!(
            "gaussian amplitudes need σ > 0 and finite μ, got μ = {mu}, σ = {sigma}"
        )));
    }
    // shift the exponent so the largest amplitude is exp(0); keeps σ → 0 and
    // far-off-support μ finite
    let exponent = |m: usize| -(m as f64 - mu).powi(2) / (4.0 * sigma);
    let mut best = f64::NEG_INFINITY;
    for m in 0..=s {
        best = best.max(exponent(m));
    }
    let mut v = Array1::zeros(s + 1);
    for m in 0..=s {
        v[m] = (exponent(m) - best).exp();
    }
    let nrm = v.dot(&v).sqrt();
    Ok(v / nrm)
}

/// Exact Bell-operator expectation of the Gaussian–Dicke product state.
pub fn asymptotic_value(
    coeffs: &PibiCoefficients,
    partition: &Partition,
    params: &GaussianDickeParams,
) -> Result<f64> {
    coeffs.validate()?;
    params.validate(partition)?;
    let mut moments: Vec<BlockMoments> = Vec::with_capacity(partition.num_blocks());
    for (i, &s) in partition.sizes().iter().enumerate() {
        let (mu, sigma) = params.blocks[i];
        let state = gaussian_amplitudes(s, mu, sigma)?;
        let block = SpinBlock::maximal(s)?;
        let ops = collective_region_operators(&block, params.angles[i][0], params.angles[i][1]);
        moments.push(collective_moments(&ops, &state));
    }
    Ok(combine_value(coeffs, &moments))
}

/// Options for the ansatz optimization.
#[derive(Debug, Clone)]
pub struct AsymptoticOptions {
    pub restarts: usize,
    pub max_evals: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for AsymptoticOptions {
    fn default() -> Self {
        AsymptoticOptions {
            restarts: 10,
            max_evals: 4000,
            tol: 1e-10,
            seed: 0,
        }
    }
}

/// Result of [`optimize_asymptotic`].
#[derive(Debug, Clone)]
pub struct AsymptoticResult {
    pub n: usize,
    pub m: usize,
    /// Producibility class `k = ⌈n/m⌉` that the estimate upper-bounds.
    pub k: usize,
    pub value: f64,
    pub partition: Partition,
    pub params: GaussianDickeParams,
    pub converged: bool,
}

/// Near-balanced partition into `m` blocks: `m − 1` blocks of `⌈n/m⌉` and a
/// remainder block.
pub fn blocks_for(n: usize, m: usize) -> Result<Partition> {
    if m == 0 || m > n {
        return Err(PibiError::InvalidInput(format!(
            "block count m must satisfy 1 ≤ m ≤ n, got m = {m}, n = {n}"
        )));
    }
    let a = n.div_ceil(m);
    let mut sizes = Vec::with_capacity(m);
    let mut left = n;
    for _ in 0..m - 1 {
        let take = a.min(left.saturating_sub(1)).max(1);
        sizes.push(take);
        left -= take;
    }
    sizes.push(left);
    Partition::new(sizes, a)
}

/// Minimize the ansatz expectation over `(μ, σ, θ0, θ1)` shared across
/// identical blocks (the remainder block, when present, gets its own `μ, σ`).
pub fn optimize_asymptotic(
    coeffs: &PibiCoefficients,
    n: usize,
    m: usize,
    options: &AsymptoticOptions,
) -> Result<AsymptoticResult> {
    coeffs.validate()?;
    let partition = blocks_for(n, m)?;
    let sizes = partition.sizes().to_vec();
    let main_size = sizes[0];
    let has_remainder = *sizes.last().unwrap() != main_size;

    // parameter vector: [μ_main, ln σ_main, (μ_rem, ln σ_rem)?, θ0, θ1]
    let dim = if has_remainder { 6 } else { 4 };
    let unpack = |x: &[f64]| -> GaussianDickeParams {
        let mu_main = x[0];
        let sig_main = x[1].exp();
        let (mu_rem, sig_rem) = if has_remainder { (x[2], x[3].exp()) } else { (mu_main, sig_main) };
        let theta = [x[dim - 2], x[dim - 1]];
        let blocks = sizes
            .iter()
            .map(|&s| {
                if s == main_size {
                    (mu_main, sig_main)
                } else {
                    // scale to the remainder block's length
                    let f = s as f64 / main_size as f64;
                    (mu_rem * f, (sig_rem * f).max(1e-12))
                }
            })
            .collect();
        GaussianDickeParams {
            blocks,
            angles: vec![theta; sizes.len()],
        }
    };

    let objective = |x: &[f64]| -> f64 {
        let params = unpack(x);
        asymptotic_value(coeffs, &partition, &params).unwrap_or(f64::INFINITY)
    };

    // seed point: low excitation density, moderate width, angles near the
    // z-dominated optimum of the bundled inequality family
    let s0 = main_size as f64;
    let base = {
        let mut v = vec![0.05 * s0 + 0.5, (0.05 * s0 + 0.25).ln()];
        if has_remainder {
            v.push(0.05 * s0 + 0.5);
            v.push((0.05 * s0 + 0.25).ln());
        }
        v.push(std::f64::consts::FRAC_PI_2);
        v.push(std::f64::consts::FRAC_PI_2 + 0.3);
        v
    };

    let starts: Vec<Vec<f64>> = (0..options.restarts)
        .map(|r| {
            if r == 0 {
                base.clone()
            } else {
                let mut rng = job_rng(options.seed, 0xA5, r);
                base.iter()
                    .enumerate()
                    .map(|(i, &v)| {
                        let spread = if i < dim - 2 { 0.5 * (1.0 + 0.1 * s0) } else { 1.2 };
                        v + (rng.gen::<f64>() - 0.5) * 2.0 * spread
                    })
                    .collect()
            }
        })
        .collect();

    let runs = exec::map_collect(starts, |x0| {
        nelder_mead(objective, &x0, 0.3, options.tol, options.max_evals)
    });
    let best = exec::argmin_by_key(&runs, |r| r.value).expect("at least one restart");
    let winner = &runs[best];
    Ok(AsymptoticResult {
        n,
        m,
        k: partition.sizes()[0],
        value: winner.value,
        partition: partition.clone(),
        params: unpack(&winner.x),
        converged: winner.converged,
    })
}

/// Convenience: symmetric see-saw options scaled down for huge blocks.
pub fn large_n_seesaw_options(restarts: usize, seed: u64) -> SeesawOptions {
    SeesawOptions {
        restarts,
        max_sweeps: 300,
        tol: 1e-9,
        seed,
        ..Default::default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::kron;
    use crate::seesaw::StateMode;
    use approx::assert_abs_diff_eq;

    #[test]
    fn delta_limit_recovers_basis_vector() {
        let v = gaussian_amplitudes(8, 3.0, 1e-8).unwrap();
        for m in 0..=8 {
            let want = if m == 3 { 1.0 } else { 0.0 };
            assert_abs_diff_eq!(v[m], want, epsilon = 1e-12);
        }
    }

    #[test]
    fn centered_profile_is_palindromic() {
        for s in [4usize, 7, 10] {
            let v = gaussian_amplitudes(s, s as f64 / 2.0, 1.7).unwrap();
            for m in 0..=s {
                assert_abs_diff_eq!(v[m], v[s - m], epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn amplitudes_match_direct_formula() {
        // independent evaluation: compensated direct formula without the
        // max-shift rearrangement
        let (s, mu, sigma) = (10usize, 3.0, 2.0);
        let v = gaussian_amplitudes(s, mu, sigma).unwrap();
        let raw: Vec<f64> = (0..=s)
            .map(|m| (-(m as f64 - mu).powi(2) / (4.0 * sigma)).exp())
            .collect();
        let nrm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
        for m in 0..=s {
            assert_abs_diff_eq!(v[m], raw[m] / nrm, epsilon = 1e-14);
        }
    }

    #[test]
    fn sigma_zero_limit_value_is_deterministic() {
        // σ → 0, μ = 0, angles θ0 = θ1 = π/2 puts every block in its
        // zero-excitation state measured along z: the expression value is
        // exactly the all-(+1,+1) deterministic assignment
        let coeffs = PibiCoefficients::default();
        for (n, m) in [(6usize, 2usize), (9, 3)] {
            let partition = blocks_for(n, m).unwrap();
            let params = GaussianDickeParams::uniform(
                &partition,
                0.0,
                1e-9,
                std::f64::consts::FRAC_PI_2,
                std::f64::consts::FRAC_PI_2,
            );
            let v = asymptotic_value(&coeffs, &partition, &params).unwrap();
            assert_abs_diff_eq!(v, -2.0 * n as f64, epsilon = 1e-9);
        }
    }

    #[test]
    fn matches_dense_product_state_expectation() {
        // two equal blocks at n = 10: compare against the full 2^n operator
        let coeffs = PibiCoefficients::new(-1.3, 0.4, 0.35, -0.8, 0.55).unwrap();
        let n = 10;
        let partition = blocks_for(n, 2).unwrap();
        let params = GaussianDickeParams {
            blocks: vec![(1.2, 0.8), (2.1, 1.5)],
            angles: vec![[0.9, 2.2], [0.9, 2.2]],
        };
        let via_collective = asymptotic_value(&coeffs, &partition, &params).unwrap();

        let settings = crate::settings::MeasurementSettings::per_region(params.angles.clone())
            .unwrap()
            .expand_per_party(&partition)
            .unwrap();
        let bell = crate::bell::build_bell_operator(&coeffs, &settings, n).unwrap();
        let blocks: Vec<ndarray::Array1<f64>> = partition
            .sizes()
            .iter()
            .zip(&params.blocks)
            .map(|(&s, &(mu, sigma))| {
                let amp = gaussian_amplitudes(s, mu, sigma).unwrap();
                crate::spin::dicke_isometry(s).dot(&amp)
            })
            .collect();
        let psi_mat = kron(
            &blocks[0].clone().insert_axis(ndarray::Axis(1)),
            &blocks[1].clone().insert_axis(ndarray::Axis(1)),
        );
        let psi = psi_mat.column(0).to_owned();
        let dense = psi.dot(&bell.matrix.dot(&psi));
        assert_abs_diff_eq!(via_collective, dense, epsilon = 1e-9);

        let state = crate::seesaw::ProductStateDescriptor {
            mode: StateMode::Symmetric,
            blocks: partition
                .sizes()
                .iter()
                .zip(&params.blocks)
                .map(|(&s, &(mu, sigma))| gaussian_amplitudes(s, mu, sigma).unwrap())
                .collect(),
        };
        state.validate(&partition).unwrap();
    }

    #[test]
    fn equal_block_permutation_invariance() {
        let coeffs = PibiCoefficients::default();
        let partition = blocks_for(8, 2).unwrap();
        let a = GaussianDickeParams {
            blocks: vec![(1.0, 0.7), (1.0, 0.7)],
            angles: vec![[1.1, 2.3], [1.1, 2.3]],
        };
        let v1 = asymptotic_value(&coeffs, &partition, &a).unwrap();
        let b = GaussianDickeParams {
            blocks: vec![a.blocks[1], a.blocks[0]],
            angles: vec![a.angles[1], a.angles[0]],
        };
        let v2 = asymptotic_value(&coeffs, &partition, &b).unwrap();
        assert_eq!(v1.to_bits(), v2.to_bits());
    }

    #[test]
    fn single_qubit_blocks_reach_classical_bound() {
        let coeffs = PibiCoefficients::default();
        let n = 12;
        let r = optimize_asymptotic(&coeffs, n, n, &AsymptoticOptions::default()).unwrap();
        let (beta_c, _) = crate::lhv::classical_bound(&coeffs, n).unwrap();
        assert!(r.value >= beta_c - 1e-7, "ansatz beat the classical bound");
        assert_abs_diff_eq!(r.value, -2.0 * n as f64, epsilon = 1e-5);
    }

    #[test]
    fn variational_dominates_ground_state() {
        // the ansatz value can never undercut the ground energy of the same
        // block-collective operator
        let coeffs = PibiCoefficients::default();
        let n = 12;
        let partition = blocks_for(n, 2).unwrap();
        let params = GaussianDickeParams::uniform(&partition, 0.8, 0.9, 1.4, 2.8);
        let v = asymptotic_value(&coeffs, &partition, &params).unwrap();

        let opts = SeesawOptions {
            restarts: 8,
            partitions: crate::seesaw::PartitionPolicy::Explicit(vec![partition]),
            ..Default::default()
        };
        let sym = crate::spin::symmetric_upper_bound(&coeffs, n, 6, &opts).unwrap();
        assert!(v >= sym.beta_u - 1e-8);
    }
}
