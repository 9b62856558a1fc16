//! Collective spin operators per region and the symmetric-mode see-saw.
//!
//! Inside a spin sector of `s` qubits with equal angles across the region,
//! the region operators collapse to polynomials in the collective `Jx`, `Jz`
//! of a `(2J+1)`-dimensional representation:
//!
//! ```text
//! B_k   = 2 (cosθ_k Jx + sinθ_k Jz)
//! B_kk  = B_k² − s·1
//! B_01  = ½{B_0, B_1} − s cos(θ0−θ1)·1
//! ```
//!
//! Everything here is banded in the Dicke basis, so bound computations scale
//! to block sizes of 10⁴ and beyond. Production runs use the maximal sector
//! `J = s/2`; lower sectors exist for the saturation spot-check.

use ndarray::{Array1, Array2};
use rand::Rng;

use crate::error::{PibiError, Result};
use crate::exec;
use crate::ineq::PibiCoefficients;
use crate::linalg::{self, SymPenta, DENSE_EIG_DIM};
use crate::moments::{combine_value, mean_field_coefficients, BlockMoments};
use crate::optim::minimize_trig;
use crate::partition::Partition;
use crate::seesaw::{
    job_rng, random_unit_vector, BoundMeta, BoundMode, BoundResult, PartitionOutcome,
    ProductStateDescriptor, SeesawOptions, StateMode,
};
use crate::settings::MeasurementSettings;

/// Angular momentum matrices of one spin-j representation in the Dicke basis.
///
/// Basis index `m` counts excitations: `Jz|m⟩ = (j − m)|m⟩`, `m = 0..2j`.
#[derive(Debug, Clone)]
pub struct SpinMatrices {
    pub two_j: usize,
    /// Diagonal of `Jz`: `j - m`.
    pub jz: Vec<f64>,
    /// First off-diagonal of `Jx`.
    pub jx_off: Vec<f64>,
    pub jx2: SymPenta,
    pub jz2: SymPenta,
    /// Anticommutator `{Jx, Jz}`.
    pub acomm: SymPenta,
}

/// Build the spin matrices for half-integer `j = two_j / 2`.
pub fn spin_matrices(two_j: usize) -> SpinMatrices {
    let dim = two_j + 1;
    let j = two_j as f64 / 2.0;
    let jz: Vec<f64> = (0..dim).map(|m| j - m as f64).collect();
    // ladder coefficient between m and m+1: √((m+1)(2j−m))
    let ladder: Vec<f64> = (0..two_j)
        .map(|m| (((m + 1) * (two_j - m)) as f64).sqrt())
        .collect();
    let jx_off: Vec<f64> = ladder.iter().map(|l| l / 2.0).collect();

    let mut jx2 = SymPenta::zeros(dim);
    for m in 0..dim {
        let lo = if m > 0 { jx_off[m - 1] * jx_off[m - 1] } else { 0.0 };
        let hi = if m < two_j { jx_off[m] * jx_off[m] } else { 0.0 };
        jx2.d0[m] = lo + hi;
    }
    for m in 0..dim.saturating_sub(2) {
        jx2.d2[m] = jx_off[m] * jx_off[m + 1];
    }

    let mut jz2 = SymPenta::zeros(dim);
    for m in 0..dim {
        jz2.d0[m] = jz[m] * jz[m];
    }

    let mut acomm = SymPenta::zeros(dim);
    for m in 0..dim.saturating_sub(1) {
        acomm.d1[m] = jx_off[m] * (jz[m] + jz[m + 1]);
    }

    SpinMatrices { two_j, jz, jx_off, jx2, jz2, acomm }
}

impl SpinMatrices {
    pub fn dim(&self) -> usize {
        self.two_j + 1
    }

    pub fn jx_dense(&self) -> Array2<f64> {
        let mut m = Array2::zeros((self.dim(), self.dim()));
        for i in 0..self.two_j {
            m[[i, i + 1]] = self.jx_off[i];
            m[[i + 1, i]] = self.jx_off[i];
        }
        m
    }

    pub fn jz_dense(&self) -> Array2<f64> {
        Array2::from_diag(&Array1::from(self.jz.clone()))
    }

    /// Diagonal of `Jx² + Jy² + Jz²`, which must equal `j(j+1)` everywhere.
    /// `Jx² + Jy²` is `(J₊J₋ + J₋J₊)/2`, diagonal in this basis.
    pub fn casimir_diagonal(&self) -> Vec<f64> {
        (0..self.dim())
            .map(|m| {
                let lo = if m > 0 { self.jx_off[m - 1] * self.jx_off[m - 1] } else { 0.0 };
                let hi = if m < self.two_j { self.jx_off[m] * self.jx_off[m] } else { 0.0 };
                2.0 * (lo + hi) + self.jz[m] * self.jz[m]
            })
            .collect()
    }
}

/// One block in symmetric mode: size, spin sector and its operators.
#[derive(Debug, Clone)]
pub struct SpinBlock {
    /// Number of parties in the block.
    pub size: usize,
    /// Doubled spin length of the sector, `two_j ≤ size`.
    pub two_j: usize,
    pub ops: SpinMatrices,
}

impl SpinBlock {
    /// Maximal-spin sector of a block of `size` parties.
    pub fn maximal(size: usize) -> Result<Self> {
        Self::in_sector(size, size)
    }

    /// A specific sector. `two_j` must have the parity of `size` and satisfy
    /// `two_j ≤ size`.
    pub fn in_sector(size: usize, two_j: usize) -> Result<Self> {
        if size == 0 {
            return Err(PibiError::InvalidInput("block size must be positive".into()));
        }
        if two_j > size || (size - two_j) % 2 != 0 {
            return Err(PibiError::InvalidInput(format!(
                "sector 2J = {two_j} invalid for block size {size}"
            )));
        }
        Ok(SpinBlock {
            size,
            two_j,
            ops: spin_matrices(two_j),
        })
    }

    pub fn dim(&self) -> usize {
        self.two_j + 1
    }

    /// Doubled spin values of every sector of this block size, maximal first.
    pub fn sectors(size: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut two_j = size;
        loop {
            out.push(two_j);
            if two_j < 2 {
                break;
            }
            two_j -= 2;
        }
        out
    }
}

/// The collective region operators for one block at given angles.
#[derive(Debug, Clone)]
pub struct CollectiveRegionOps {
    pub size: usize,
    /// `B_0`, `B_1` (tridiagonal).
    pub one_body: [SymPenta; 2],
    /// `B_00`, `B_01`, `B_11` (pentadiagonal).
    pub two_body: [SymPenta; 3],
}

/// Assemble the region operators of `block` for region angles `(θ0, θ1)`.
pub fn collective_region_operators(block: &SpinBlock, theta0: f64, theta1: f64) -> CollectiveRegionOps {
    let dim = block.dim();
    let s = block.size as f64;
    let ops = &block.ops;

    let one = |theta: f64| -> SymPenta {
        let (sin, cos) = theta.sin_cos();
        let mut m = SymPenta::zeros(dim);
        for i in 0..dim {
            m.d0[i] = 2.0 * sin * ops.jz[i];
        }
        for i in 0..dim.saturating_sub(1) {
            m.d1[i] = 2.0 * cos * ops.jx_off[i];
        }
        m
    };

    // B_kl = 4 c_k c_l Jx² + 4 s_k s_l Jz² + 2 (c_k s_l + s_k c_l) {Jx,Jz} − s γ·1
    // with γ = 1 for k = l and cos(θ0−θ1) for k ≠ l
    let two = |ta: f64, tb: f64| -> SymPenta {
        let (sa, ca) = ta.sin_cos();
        let (sb, cb) = tb.sin_cos();
        let mut m = SymPenta::zeros(dim);
        m.scaled_add(4.0 * ca * cb, &ops.jx2);
        m.scaled_add(4.0 * sa * sb, &ops.jz2);
        m.scaled_add(2.0 * (ca * sb + sa * cb), &ops.acomm);
        m.add_identity(-s * (ta - tb).cos());
        m
    };

    CollectiveRegionOps {
        size: block.size,
        one_body: [one(theta0), one(theta1)],
        two_body: [two(theta0, theta0), two(theta0, theta1), two(theta1, theta1)],
    }
}

pub(crate) fn collective_moments(ops: &CollectiveRegionOps, state: &Array1<f64>) -> BlockMoments {
    let v = state.view();
    BlockMoments {
        b: [ops.one_body[0].expectation(&v), ops.one_body[1].expectation(&v)],
        t: [
            ops.two_body[0].expectation(&v),
            ops.two_body[1].expectation(&v),
            ops.two_body[2].expectation(&v),
        ],
    }
}

/// Symmetric-mode workspace: per-region angles, sector states and operators.
pub(crate) struct SymmetricWorkspace {
    pub coeffs: PibiCoefficients,
    pub blocks: Vec<SpinBlock>,
    pub angles: Vec<[f64; 2]>,
    pub ops: Vec<CollectiveRegionOps>,
    pub states: Vec<Array1<f64>>,
    pub moments: Vec<BlockMoments>,
}

impl SymmetricWorkspace {
    pub fn new(
        coeffs: &PibiCoefficients,
        blocks: Vec<SpinBlock>,
        angles: Vec<[f64; 2]>,
        states: Vec<Array1<f64>>,
    ) -> Result<Self> {
        if blocks.len() != angles.len() || blocks.len() != states.len() {
            return Err(PibiError::Dimension("blocks / angles / states length mismatch".into()));
        }
        for (b, st) in blocks.iter().zip(&states) {
            if st.len() != b.dim() {
                return Err(PibiError::Dimension(format!(
                    "state dim {} for sector dim {}",
                    st.len(),
                    b.dim()
                )));
            }
        }
        let ops: Vec<CollectiveRegionOps> = blocks
            .iter()
            .zip(&angles)
            .map(|(b, a)| collective_region_operators(b, a[0], a[1]))
            .collect();
        let moments = ops.iter().zip(&states).map(|(o, s)| collective_moments(o, s)).collect();
        Ok(SymmetricWorkspace {
            coeffs: *coeffs,
            blocks,
            angles,
            ops,
            states,
            moments,
        })
    }

    pub fn objective(&self) -> f64 {
        combine_value(&self.coeffs, &self.moments)
    }

    pub fn dressed(&self, target: usize) -> SymPenta {
        let c = mean_field_coefficients(&self.coeffs, &self.moments, target);
        let ops = &self.ops[target];
        let mut m = SymPenta::zeros(self.blocks[target].dim());
        m.scaled_add(c[0], &ops.one_body[0]);
        m.scaled_add(c[1], &ops.one_body[1]);
        m.scaled_add(self.coeffs.alpha00, &ops.two_body[0]);
        m.scaled_add(self.coeffs.alpha01, &ops.two_body[1]);
        m.scaled_add(self.coeffs.alpha11, &ops.two_body[2]);
        m
    }

    pub fn update_state(&mut self, target: usize) -> Result<()> {
        let dressed = self.dressed(target);
        let dim = dressed.dim();
        let vec = if dim <= DENSE_EIG_DIM {
            linalg::min_eigpair(&dressed.to_dense())?.1
        } else {
            let mv = |x: &ndarray::ArrayView1<f64>, out: &mut Array1<f64>| {
                dressed.matvec(x, out);
            };
            linalg::lanczos_min_eigpair(dim, &mv, Some(&self.states[target]), dressed.norm_inf(), 1e-12)?.1
        };
        self.states[target] = vec;
        self.moments[target] = collective_moments(&self.ops[target], &self.states[target]);
        Ok(())
    }

    pub fn update_angle(&mut self, region: usize, setting: usize) {
        let before = self.objective();
        let base = self.angles[region];
        let block = &self.blocks[region];
        let state = &self.states[region];
        let coeffs = self.coeffs;
        let moments = self.moments.clone();
        let f = |theta: f64| -> f64 {
            let mut a = base;
            a[setting] = theta;
            let ops = collective_region_operators(block, a[0], a[1]);
            let mut mom = moments.clone();
            mom[region] = collective_moments(&ops, state);
            combine_value(&coeffs, &mom)
        };
        let (theta_star, value) = minimize_trig(f);
        if value <= before + 1e-13 {
            self.angles[region][setting] = theta_star;
            self.ops[region] =
                collective_region_operators(&self.blocks[region], self.angles[region][0], self.angles[region][1]);
            self.moments[region] = collective_moments(&self.ops[region], &self.states[region]);
        }
    }

    pub fn settings(&self) -> MeasurementSettings {
        MeasurementSettings::per_region(self.angles.clone()).expect("finite angles")
    }
}

struct SymJobResult {
    value: f64,
    partition_idx: usize,
    restart: usize,
    angles: Vec<[f64; 2]>,
    states: Vec<Array1<f64>>,
    sweeps: usize,
    converged: bool,
}

fn run_symmetric_job(
    coeffs: &PibiCoefficients,
    partition: &Partition,
    sectors: Option<&[usize]>,
    partition_idx: usize,
    restart: usize,
    options: &SeesawOptions,
) -> Result<SymJobResult> {
    let mut rng = job_rng(options.seed, partition_idx, restart ^ 0x5f5f);
    let blocks: Vec<SpinBlock> = match sectors {
        None => partition
            .sizes()
            .iter()
            .map(|&s| SpinBlock::maximal(s))
            .collect::<Result<_>>()?,
        Some(list) => partition
            .sizes()
            .iter()
            .zip(list)
            .map(|(&s, &tj)| SpinBlock::in_sector(s, tj))
            .collect::<Result<_>>()?,
    };
    let angles: Vec<[f64; 2]> = blocks
        .iter()
        .map(|_| {
            [
                rng.gen::<f64>() * std::f64::consts::TAU,
                rng.gen::<f64>() * std::f64::consts::TAU,
            ]
        })
        .collect();
    let states: Vec<Array1<f64>> = blocks
        .iter()
        .map(|b| random_unit_vector(&mut rng, b.dim()))
        .collect();

    let mut ws = SymmetricWorkspace::new(coeffs, blocks, angles, states)?;
    let mut prev = ws.objective();
    let mut slow = 0;
    let mut sweeps = 0;
    let mut converged = false;
    while sweeps < options.max_sweeps {
        for b in 0..ws.blocks.len() {
            ws.update_state(b)?;
        }
        for r in 0..ws.blocks.len() {
            for setting in 0..2 {
                ws.update_angle(r, setting);
            }
        }
        sweeps += 1;
        let obj = ws.objective();
        if prev - obj < options.tol {
            slow += 1;
            if slow >= 2 {
                converged = true;
                prev = obj;
                break;
            }
        } else {
            slow = 0;
        }
        prev = obj;
    }
    Ok(SymJobResult {
        value: prev,
        partition_idx,
        restart,
        angles: ws.angles,
        states: ws.states,
        sweeps,
        converged,
    })
}

/// Symmetric-mode variational upper bound: block states restricted to the
/// maximal spin sector, two shared angles per region.
pub fn symmetric_upper_bound(
    coeffs: &PibiCoefficients,
    n: usize,
    k: usize,
    options: &SeesawOptions,
) -> Result<BoundResult> {
    symmetric_bound_in_sectors(coeffs, n, k, None, options)
}

/// As [`symmetric_upper_bound`] but with explicit spin sectors per block,
/// used by the maximal-sector saturation spot-check. `sectors[i]` is the
/// doubled spin of block `i` of each candidate partition; `None` means
/// maximal everywhere.
pub fn symmetric_bound_in_sectors(
    coeffs: &PibiCoefficients,
    n: usize,
    k: usize,
    sectors: Option<&[usize]>,
    options: &SeesawOptions,
) -> Result<BoundResult> {
    coeffs.validate()?;
    options.validate()?;
    if n == 0 || k == 0 || k > n {
        return Err(PibiError::InvalidInput(format!(
            "need 1 ≤ k ≤ n, got n = {n}, k = {k}"
        )));
    }
    let partitions = if sectors.is_some() {
        // sector lists only make sense against a fixed partition
        match &options.partitions {
            crate::seesaw::PartitionPolicy::Explicit(list) if list.len() == 1 => list.clone(),
            _ => {
                return Err(PibiError::InvalidInput(
                    "explicit single partition required when pinning sectors".into(),
                ))
            }
        }
    } else {
        options.partitions.candidates(n, k)?
    };

    let jobs: Vec<(usize, usize)> = (0..partitions.len())
        .flat_map(|p| (0..options.restarts).map(move |r| (p, r)))
        .collect();
    let results: Vec<Result<SymJobResult>> = exec::map_collect(jobs, |(p, r)| {
        run_symmetric_job(coeffs, &partitions[p], sectors, p, r, options)
    });
    let mut ok = Vec::with_capacity(results.len());
    for r in results {
        ok.push(r?);
    }
    let best_idx =
        exec::argmin_by_key(&ok, |j| (j.value, j.partition_idx, j.restart)).expect("jobs non-empty");

    let mut per_partition = Vec::new();
    for (p, partition) in partitions.iter().enumerate() {
        let best_for_p = ok
            .iter()
            .filter(|j| j.partition_idx == p)
            .min_by(|a, b| (a.value, a.restart).partial_cmp(&(b.value, b.restart)).unwrap());
        if let Some(j) = best_for_p {
            per_partition.push(PartitionOutcome {
                partition: partition.clone(),
                value: j.value,
                settings: MeasurementSettings::per_region(j.angles.clone())?,
            });
        }
    }

    let best = &ok[best_idx];
    Ok(BoundResult {
        n,
        k,
        beta_u: best.value,
        beta_l: None,
        partition: partitions[best.partition_idx].clone(),
        settings: MeasurementSettings::per_region(best.angles.clone())?,
        state: ProductStateDescriptor {
            mode: StateMode::Symmetric,
            blocks: best.states.clone(),
        },
        meta: BoundMeta {
            mode: BoundMode::Symmetric,
            converged: best.converged,
            sweeps: best.sweeps,
            restarts: options.restarts,
            per_partition,
        },
    })
}

/// Isometry from the Dicke basis of `s` qubits into the `2^s` computational
/// space; column `m` is the normalized sum of all weight-`m` bitstrings.
pub fn dicke_isometry(s: usize) -> Array2<f64> {
    let dim = 1usize << s;
    let mut v = Array2::zeros((dim, s + 1));
    let mut counts = vec![0usize; s + 1];
    for r in 0..dim {
        counts[(r as u64).count_ones() as usize] += 1;
    }
    for r in 0..dim {
        let m = (r as u64).count_ones() as usize;
        v[[r, m]] = 1.0 / (counts[m] as f64).sqrt();
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bell::region_operators;
    use approx::assert_abs_diff_eq;

    #[test]
    fn spin_half_matrices() {
        let m = spin_matrices(1);
        assert_eq!(m.jz, vec![0.5, -0.5]);
        assert_abs_diff_eq!(m.jx_off[0], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn spin_one_jz() {
        let m = spin_matrices(2);
        assert_eq!(m.jz, vec![1.0, 0.0, -1.0]);
    }

    #[test]
    fn casimir_identity_j5() {
        let two_j = 10;
        let m = spin_matrices(two_j);
        let j = two_j as f64 / 2.0;
        for c in m.casimir_diagonal() {
            assert_abs_diff_eq!(c, j * (j + 1.0), epsilon = 1e-10);
        }
    }

    #[test]
    fn pair_term_vanishes_for_single_party() {
        let block = SpinBlock::maximal(1).unwrap();
        let ops = collective_region_operators(&block, 0.7, 1.9);
        for t in &ops.two_body {
            let d = t.to_dense();
            assert!(d.iter().all(|x| x.abs() < 1e-12), "got {d:?}");
        }
    }

    #[test]
    fn two_qubit_b00_formula() {
        // s = 2, θ0 = 0: B00 = 4Jx² − 2·1
        let block = SpinBlock::maximal(2).unwrap();
        let ops = collective_region_operators(&block, 0.0, 1.3);
        let want = {
            let m = spin_matrices(2);
            let mut out = SymPenta::zeros(3);
            out.scaled_add(4.0, &m.jx2);
            out.add_identity(-2.0);
            out.to_dense()
        };
        let got = ops.two_body[0].to_dense();
        for i in 0..3 {
            for j in 0..3 {
                assert_abs_diff_eq!(got[[i, j]], want[[i, j]], epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn compression_matches_dense_region_operators() {
        // Π (dense op) Π restricted to the symmetric block equals the
        // collective operator, for every operator and random angles
        for s in 1..=6usize {
            let angles = [0.37 + 0.11 * s as f64, 2.05 - 0.07 * s as f64];
            let dense = region_operators(&vec![angles; s]).unwrap();
            let block = SpinBlock::maximal(s).unwrap();
            let coll = collective_region_operators(&block, angles[0], angles[1]);
            let v = dicke_isometry(s);
            let check = |d: &Array2<f64>, c: &SymPenta| {
                let compressed = v.t().dot(d).dot(&v);
                let want = c.to_dense();
                for i in 0..s + 1 {
                    for j in 0..s + 1 {
                        assert_abs_diff_eq!(compressed[[i, j]], want[[i, j]], epsilon = 1e-10);
                    }
                }
            };
            check(&dense.one_body[0], &coll.one_body[0]);
            check(&dense.one_body[1], &coll.one_body[1]);
            check(&dense.two_body[0], &coll.two_body[0]);
            check(&dense.two_body[1], &coll.two_body[1]);
            check(&dense.two_body[2], &coll.two_body[2]);
        }
    }

    #[test]
    fn symmetric_matches_full_mode_small() {
        let coeffs = PibiCoefficients::default();
        let opts = SeesawOptions {
            restarts: 10,
            partitions: crate::seesaw::PartitionPolicy::Exhaustive,
            ..Default::default()
        };
        for (n, k) in [(4usize, 2usize), (5, 5), (6, 3)] {
            let full = crate::seesaw::upper_bound(&coeffs, n, k, &opts).unwrap();
            let sym = symmetric_upper_bound(&coeffs, n, k, &opts).unwrap();
            assert_abs_diff_eq!(full.beta_u, sym.beta_u, epsilon = 1e-6);
        }
    }

    #[test]
    fn sector_list_shapes() {
        assert_eq!(SpinBlock::sectors(4), vec![4, 2, 0]);
        assert_eq!(SpinBlock::sectors(5), vec![5, 3, 1]);
        assert!(SpinBlock::in_sector(4, 3).is_err());
        assert!(SpinBlock::in_sector(4, 2).is_ok());
    }
}
