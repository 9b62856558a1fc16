//! Certified lower bounds from the marginal-consistency + PPT semidefinite
//! relaxation.
//!
//! For a fixed partition and measurement angles, the producible minimum is
//! relaxed to an SDP over block marginals `ρ_A` and pair marginals
//! `ρ_{A∪A'}`: positivity, unit traces, partial-trace consistency onto both
//! factors, and positivity under partial transposition of each pair. The
//! reported bound is always the objective of an explicitly repaired
//! dual-feasible point, so it stays a true lower bound whatever the solver's
//! termination state.

mod ipm;
mod splitting;

use ndarray::Array2;
use rand::Rng;

use crate::bell::region_operators_capped;
use crate::error::{PibiError, Result};
use crate::exec;
use crate::ineq::PibiCoefficients;
use crate::linalg::{self, kron};
use crate::partition::Partition;
use crate::seesaw::job_rng;
use crate::settings::MeasurementSettings;

/// Which tensor factor survives a partial trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keep {
    A,
    B,
}

/// Partial trace of a `dA·dB` square matrix over the discarded factor.
pub fn partial_trace(m: &Array2<f64>, dims: (usize, usize), keep: Keep) -> Result<Array2<f64>> {
    let (da, db) = dims;
    if m.nrows() != da * db || m.ncols() != da * db {
        return Err(PibiError::Dimension(format!(
            "partial trace of {}x{} with factor dims {da}x{db}",
            m.nrows(),
            m.ncols()
        )));
    }
    match keep {
        Keep::A => {
            let mut out = Array2::zeros((da, da));
            for i in 0..da {
                for j in 0..da {
                    let mut acc = 0.0;
                    for t in 0..db {
                        acc += m[[i * db + t, j * db + t]];
                    }
                    out[[i, j]] = acc;
                }
            }
            Ok(out)
        }
        Keep::B => {
            let mut out = Array2::zeros((db, db));
            for i in 0..db {
                for j in 0..db {
                    let mut acc = 0.0;
                    for t in 0..da {
                        acc += m[[t * db + i, t * db + j]];
                    }
                    out[[i, j]] = acc;
                }
            }
            Ok(out)
        }
    }
}

/// Partial transpose on the `A` factor of a `dA·dB` square matrix.
pub fn partial_transpose(m: &Array2<f64>, dims: (usize, usize)) -> Result<Array2<f64>> {
    let (da, db) = dims;
    if m.nrows() != da * db || m.ncols() != da * db {
        return Err(PibiError::Dimension(format!(
            "partial transpose of {}x{} with factor dims {da}x{db}",
            m.nrows(),
            m.ncols()
        )));
    }
    let mut out = Array2::zeros((da * db, da * db));
    for a in 0..da {
        for ap in 0..da {
            for b in 0..db {
                for bp in 0..db {
                    out[[a * db + b, ap * db + bp]] = m[[ap * db + b, a * db + bp]];
                }
            }
        }
    }
    Ok(out)
}

/// One linear equality constraint `⟨A, X⟩ = rhs` with the sparse symmetric
/// matrix `A` given by upper triangular triplets `(block, i, j, c)`;
/// the inner product counts off-diagonal entries twice.
#[derive(Debug, Clone)]
pub struct Constraint {
    pub rhs: f64,
    pub terms: Vec<(usize, u32, u32, f64)>,
}

impl Constraint {
    /// `⟨A, X⟩` for block matrices `x`.
    pub fn apply(&self, x: &[Array2<f64>]) -> f64 {
        let mut acc = 0.0;
        for &(blk, i, j, c) in &self.terms {
            let v = x[blk][[i as usize, j as usize]];
            acc += if i == j { c * v } else { 2.0 * c * v };
        }
        acc
    }

    /// Add `scale · A` into the block matrices `out`.
    pub fn add_scaled(&self, scale: f64, out: &mut [Array2<f64>]) {
        for &(blk, i, j, c) in &self.terms {
            out[blk][[i as usize, j as usize]] += scale * c;
            if i != j {
                out[blk][[j as usize, i as usize]] += scale * c;
            }
        }
    }
}

/// A PPT-linked pair of blocks: `blocks[tt_block] = T_A(blocks[var_block])`,
/// enforced by the contiguous constraint range `links`.
#[derive(Debug, Clone)]
pub struct PptLink {
    pub var_block: usize,
    pub tt_block: usize,
    pub dims: (usize, usize),
    pub links: std::ops::Range<usize>,
}

/// Dense-block standard-form SDP:
/// minimize `Σ ⟨C_j, X_j⟩` over `X_j ⪰ 0` with `⟨A_i, X⟩ = b_i`.
#[derive(Debug, Clone)]
pub struct SdpProblem {
    pub block_dims: Vec<usize>,
    pub objective: Vec<Array2<f64>>,
    pub constraints: Vec<Constraint>,
    /// The normalized identity on every block is feasible and interior.
    pub mixed_start: bool,
    /// Structural annotation of partial-transpose copies.
    pub ppt_links: Vec<PptLink>,
}

impl SdpProblem {
    pub fn total_dim(&self) -> usize {
        self.block_dims.iter().sum()
    }

    pub fn primal_value(&self, x: &[Array2<f64>]) -> f64 {
        self.objective
            .iter()
            .zip(x)
            .map(|(c, xj)| (c * xj).sum())
            .collect::<Vec<f64>>()
            .iter()
            .sum()
    }

    /// `Σ_i y_i A_i` assembled as block matrices, optionally skipping a
    /// constraint range.
    pub fn adjoint(&self, y: &[f64], skip: Option<&std::ops::Range<usize>>) -> Vec<Array2<f64>> {
        let mut out: Vec<Array2<f64>> = self.block_dims.iter().map(|&d| Array2::zeros((d, d))).collect();
        for (i, con) in self.constraints.iter().enumerate() {
            if let Some(range) = skip {
                if range.contains(&i) {
                    continue;
                }
            }
            if y[i] != 0.0 {
                con.add_scaled(y[i], &mut out);
            }
        }
        out
    }

    /// Write the instance in a plain-text sparse format:
    /// header `sdp m nblocks`, a `blocks` line with the dimensions, then
    /// `obj block i j value` and `con t rhs` / `t block i j value` lines
    /// (0-based indices, upper triangle, off-diagonal entries counted twice
    /// in inner products).
    pub fn write_sparse(&self, w: &mut impl std::io::Write) -> std::io::Result<()> {
        writeln!(w, "sdp {} {}", self.constraints.len(), self.block_dims.len())?;
        let dims: Vec<String> = self.block_dims.iter().map(|d| d.to_string()).collect();
        writeln!(w, "blocks {}", dims.join(" "))?;
        for (b, c) in self.objective.iter().enumerate() {
            let d = c.nrows();
            for i in 0..d {
                for j in i..d {
                    if c[[i, j]] != 0.0 {
                        writeln!(w, "obj {b} {i} {j} {}", c[[i, j]])?;
                    }
                }
            }
        }
        for (t, con) in self.constraints.iter().enumerate() {
            writeln!(w, "con {t} {}", con.rhs)?;
            for &(blk, i, j, v) in &con.terms {
                writeln!(w, "{t} {blk} {i} {j} {v}")?;
            }
        }
        Ok(())
    }
}

/// Solver exit state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdpStatus {
    Optimal,
    MaxIterations,
    Stalled,
}

/// Primal/dual output of a solve.
#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub primal_value: f64,
    pub dual_value: f64,
    pub gap: f64,
    pub iterations: usize,
    pub status: SdpStatus,
    pub x: Vec<Array2<f64>>,
    pub y: Vec<f64>,
    pub s: Vec<Array2<f64>>,
}

/// Engine selection for [`solve_sdp_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SdpEngine {
    /// Interior point below [`SdpOptions::ipm_max_constraints`], operator
    /// splitting above.
    #[default]
    Auto,
    InteriorPoint,
    Splitting,
}

#[derive(Debug, Clone)]
pub struct SdpOptions {
    pub tol: f64,
    pub max_iterations: usize,
    pub engine: SdpEngine,
    /// Constraint-count ceiling for the dense interior-point Schur system.
    pub ipm_max_constraints: usize,
}

impl Default for SdpOptions {
    fn default() -> Self {
        SdpOptions {
            tol: 1e-8,
            max_iterations: 0, // 0 = engine default
            engine: SdpEngine::Auto,
            ipm_max_constraints: 2600,
        }
    }
}

/// Solve with default options at the given duality-gap tolerance.
pub fn solve_sdp(problem: &SdpProblem, tol: f64) -> Result<SdpSolution> {
    solve_sdp_with(problem, &SdpOptions { tol, ..Default::default() })
}

pub fn solve_sdp_with(problem: &SdpProblem, options: &SdpOptions) -> Result<SdpSolution> {
    if problem.block_dims.is_empty() || problem.constraints.is_empty() {
        return Err(PibiError::InvalidInput("empty SDP".into()));
    }
    let engine = match options.engine {
        SdpEngine::Auto => {
            if problem.constraints.len() <= options.ipm_max_constraints {
                SdpEngine::InteriorPoint
            } else {
                SdpEngine::Splitting
            }
        }
        e => e,
    };
    match engine {
        SdpEngine::InteriorPoint => ipm::solve(problem, options),
        SdpEngine::Splitting => splitting::solve(problem, options),
        SdpEngine::Auto => unreachable!(),
    }
}

/// Identity of each region/pair structure inside a relaxation problem.
#[derive(Debug, Clone)]
pub struct RelaxationMeta {
    /// Variable block index of each region.
    pub region_blocks: Vec<usize>,
    /// Trace-constraint index of each region block.
    pub region_trace: Vec<usize>,
    pub pairs: Vec<PairMeta>,
    /// Constraints from this index on are partial-transpose links.
    pub link_start: usize,
}

#[derive(Debug, Clone)]
pub struct PairMeta {
    pub regions: (usize, usize),
    pub var_block: usize,
    pub tt_block: usize,
    pub dims: (usize, usize),
    pub trace_constraint: usize,
}

/// Default ceiling on `|A| + |A'|` (pair dimension `2^8 = 256`).
pub const DEFAULT_PAIR_EXPONENT_CAP: usize = 8;

/// Build the marginal + PPT relaxation for fixed angles and partition.
pub fn build_relaxation(
    coeffs: &PibiCoefficients,
    settings: &MeasurementSettings,
    partition: &Partition,
) -> Result<(SdpProblem, RelaxationMeta)> {
    build_relaxation_capped(coeffs, settings, partition, DEFAULT_PAIR_EXPONENT_CAP)
}

pub fn build_relaxation_capped(
    coeffs: &PibiCoefficients,
    settings: &MeasurementSettings,
    partition: &Partition,
    pair_exponent_cap: usize,
) -> Result<(SdpProblem, RelaxationMeta)> {
    coeffs.validate()?;
    if partition.max_pair_exponent() > pair_exponent_cap {
        return Err(PibiError::Capacity(format!(
            "partition {partition} needs pair dimension 2^{}, cap is 2^{pair_exponent_cap}",
            partition.max_pair_exponent()
        )));
    }
    let block_angles = settings.block_angles(partition)?;
    let m_regions = partition.num_blocks();
    let sizes = partition.sizes();

    // region operators and per-region objective C_A
    let mut block_dims: Vec<usize> = Vec::new();
    let mut objective: Vec<Array2<f64>> = Vec::new();
    let mut region_blocks = Vec::with_capacity(m_regions);
    let mut region_ops = Vec::with_capacity(m_regions);
    for angles in &block_angles {
        let ops = region_operators_capped(angles, pair_exponent_cap)?;
        let dim = 1usize << ops.size;
        let mut c = Array2::zeros((dim, dim));
        c.scaled_add(coeffs.alpha0, &ops.one_body[0]);
        c.scaled_add(coeffs.alpha1, &ops.one_body[1]);
        c.scaled_add(coeffs.alpha00, &ops.two_body[0]);
        c.scaled_add(coeffs.alpha01, &ops.two_body[1]);
        c.scaled_add(coeffs.alpha11, &ops.two_body[2]);
        region_blocks.push(block_dims.len());
        block_dims.push(dim);
        objective.push(c);
        region_ops.push(ops);
    }

    let mut constraints: Vec<Constraint> = Vec::new();
    let mut region_trace = Vec::with_capacity(m_regions);
    for (r, &blk) in region_blocks.iter().enumerate() {
        let d = 1usize << sizes[r];
        region_trace.push(constraints.len());
        constraints.push(Constraint {
            rhs: 1.0,
            terms: (0..d as u32).map(|i| (blk, i, i, 1.0)).collect(),
        });
    }

    // pair variables, their objectives, traces and marginal consistency
    let mut pairs: Vec<PairMeta> = Vec::new();
    let mut link_jobs: Vec<(usize, usize, (usize, usize))> = Vec::new(); // (var, tt, dims)
    for a in 0..m_regions {
        for b in (a + 1)..m_regions {
            let (da, db) = (1usize << sizes[a], 1usize << sizes[b]);
            let dim = da * db;
            let var_block = block_dims.len();
            block_dims.push(dim);
            let tt_block = block_dims.len();
            block_dims.push(dim);

            // C_p = Σ_{k≤l} α_kl (B_k^A ⊗ B_l^B + B_l^A ⊗ B_k^B)
            let mut cp = Array2::zeros((dim, dim));
            let kl = [
                (0usize, 0usize, coeffs.alpha00),
                (0, 1, coeffs.alpha01),
                (1, 1, coeffs.alpha11),
            ];
            for &(k, l, alpha) in &kl {
                if alpha == 0.0 {
                    continue;
                }
                let term = kron(&region_ops[a].one_body[k], &region_ops[b].one_body[l]);
                cp.scaled_add(alpha, &term);
                let term = kron(&region_ops[a].one_body[l], &region_ops[b].one_body[k]);
                cp.scaled_add(alpha, &term);
            }
            objective.push(cp);
            objective.push(Array2::zeros((dim, dim)));

            let trace_constraint = constraints.len();
            constraints.push(Constraint {
                rhs: 1.0,
                terms: (0..dim as u32).map(|i| (var_block, i, i, 1.0)).collect(),
            });

            // Tr_B ρ_p = ρ_A; the last diagonal entry is implied by the
            // traces and skipped to keep the constraints independent
            for i in 0..da {
                for j in i..da {
                    if i == j && i == da - 1 {
                        continue;
                    }
                    let mut terms: Vec<(usize, u32, u32, f64)> = Vec::with_capacity(db + 1);
                    let c = if i == j { 1.0 } else { 0.5 };
                    for t in 0..db {
                        terms.push((
                            var_block,
                            (i * db + t) as u32,
                            (j * db + t) as u32,
                            c,
                        ));
                    }
                    terms.push((region_blocks[a], i as u32, j as u32, -c));
                    constraints.push(Constraint { rhs: 0.0, terms });
                }
            }
            // Tr_A ρ_p = ρ_B
            for i in 0..db {
                for j in i..db {
                    if i == j && i == db - 1 {
                        continue;
                    }
                    let mut terms: Vec<(usize, u32, u32, f64)> = Vec::with_capacity(da + 1);
                    let c = if i == j { 1.0 } else { 0.5 };
                    for t in 0..da {
                        terms.push((
                            var_block,
                            (t * db + i) as u32,
                            (t * db + j) as u32,
                            c,
                        ));
                    }
                    terms.push((region_blocks[b], i as u32, j as u32, -c));
                    constraints.push(Constraint { rhs: 0.0, terms });
                }
            }

            pairs.push(PairMeta {
                regions: (a, b),
                var_block,
                tt_block,
                dims: (da, db),
                trace_constraint,
            });
            link_jobs.push((var_block, tt_block, (da, db)));
        }
    }

    // PPT links last, so solvers that eliminate the copies can slice them off
    let link_start = constraints.len();
    let mut ppt_links = Vec::with_capacity(link_jobs.len());
    for (var_block, tt_block, (da, db)) in link_jobs {
        let dim = da * db;
        let start = constraints.len();
        for u in 0..dim {
            for v in u..dim {
                let (a, bq) = (u / db, u % db);
                let (ap, bp) = (v / db, v % db);
                // T_A acts by swapping the A indices between row and column
                let p = ap * db + bq;
                let q = a * db + bp;
                let (p, q) = (p.min(q), p.max(q));
                let ct = if u == v { 1.0 } else { 0.5 };
                let cs = if p == q { 1.0 } else { 0.5 };
                constraints.push(Constraint {
                    rhs: 0.0,
                    terms: vec![
                        (tt_block, u as u32, v as u32, ct),
                        (var_block, p as u32, q as u32, -cs),
                    ],
                });
            }
        }
        ppt_links.push(PptLink {
            var_block,
            tt_block,
            dims: (da, db),
            links: start..constraints.len(),
        });
    }

    let problem = SdpProblem {
        block_dims,
        objective,
        constraints,
        mixed_start: true,
        ppt_links,
    };
    let meta = RelaxationMeta {
        region_blocks,
        region_trace,
        pairs,
        link_start,
    };
    Ok((problem, meta))
}

/// Repair an approximate dual point into an exactly feasible one and return
/// its objective: a sound lower bound regardless of solver accuracy.
///
/// The PPT multiplier is clipped to the PSD cone, each slack's negative part
/// is absorbed into the corresponding trace multiplier, and the adjusted
/// `bᵀy` is returned.
pub fn certified_lower_bound(
    problem: &SdpProblem,
    meta: &RelaxationMeta,
    solution: &SdpSolution,
) -> Result<f64> {
    let y = &solution.y;
    let link_range = meta.link_start..problem.constraints.len();
    // Σ y_i A_i without the link constraints
    let adj = problem.adjoint(y, Some(&link_range));

    // projected PPT multipliers, one per pair
    let mut z_proj: Vec<Array2<f64>> = Vec::with_capacity(meta.pairs.len());
    for pair in &meta.pairs {
        // Z = −(Σ_link y_i A_i) on the tt block
        let mut z = Array2::zeros((problem.block_dims[pair.tt_block], problem.block_dims[pair.tt_block]));
        for link in &problem.ppt_links {
            if link.tt_block != pair.tt_block {
                continue;
            }
            for idx in link.links.clone() {
                let c = &problem.constraints[idx];
                if y[idx] != 0.0 {
                    for &(blk, i, j, v) in &c.terms {
                        if blk == pair.tt_block {
                            z[[i as usize, j as usize]] -= y[idx] * v;
                            if i != j {
                                z[[j as usize, i as usize]] -= y[idx] * v;
                            }
                        }
                    }
                }
            }
        }
        let e = linalg::eigh(&z)?;
        z_proj.push(e.map_spectrum(|lam| lam.max(0.0)));
    }

    let mut certified = 0.0;
    // region slacks: C_A − (Σ y A)_A, repaired through the region trace y
    for (r, &blk) in meta.region_blocks.iter().enumerate() {
        let slack = &problem.objective[blk] - &adj[blk];
        let lam_min = linalg::eigvalsh(&slack)?[0];
        let u = y[meta.region_trace[r]] + lam_min.min(0.0);
        certified += u;
    }
    // pair slacks: C_p − (Σ y A)_p − T_A(Z)
    for (p, pair) in meta.pairs.iter().enumerate() {
        let tz = partial_transpose(&z_proj[p], pair.dims)?;
        let slack = &problem.objective[pair.var_block] - &adj[pair.var_block] - &tz;
        let lam_min = linalg::eigvalsh(&slack)?[0];
        let v = y[pair.trace_constraint] + lam_min.min(0.0);
        certified += v;
    }
    Ok(certified)
}

/// Options of the lower-bound angle search.
#[derive(Debug, Clone)]
pub struct LowerBoundOptions {
    /// Random perturbations of the seed settings per partition.
    pub perturbations: usize,
    /// Radians of uniform perturbation noise.
    pub perturb_scale: f64,
    /// Optional per-region coarse grid step (radians); only applied when the
    /// partition has at most two regions.
    pub grid_step: Option<f64>,
    pub seed: u64,
    pub pair_exponent_cap: usize,
    pub sdp: SdpOptions,
}

impl Default for LowerBoundOptions {
    fn default() -> Self {
        LowerBoundOptions {
            perturbations: 20,
            perturb_scale: 0.15,
            grid_step: None,
            seed: 0,
            pair_exponent_cap: DEFAULT_PAIR_EXPONENT_CAP,
            sdp: SdpOptions::default(),
        }
    }
}

/// Outcome of one certified partition.
#[derive(Debug, Clone)]
pub struct PartitionCertificate {
    pub partition: Partition,
    pub value: f64,
    pub solves: usize,
    pub status: SdpStatus,
}

/// Result of [`lower_bound`].
#[derive(Debug, Clone)]
pub struct LowerBoundOutcome {
    pub beta_l: f64,
    pub per_partition: Vec<PartitionCertificate>,
    pub total_solves: usize,
    /// Human-readable description of the θ-space actually searched.
    pub coverage: String,
    /// Partitions skipped for capacity, with the offending pair exponent.
    pub skipped: Vec<(Partition, usize)>,
}

/// Certified lower bound `β_k^L`: minimum over partitions and searched
/// angles of the repaired dual objective.
///
/// `seeds` carries one settings seed per candidate partition, normally the
/// see-saw optimum of that partition.
pub fn lower_bound(
    coeffs: &PibiCoefficients,
    n: usize,
    k: usize,
    seeds: &[(Partition, MeasurementSettings)],
    options: &LowerBoundOptions,
) -> Result<LowerBoundOutcome> {
    coeffs.validate()?;
    if seeds.is_empty() {
        return Err(PibiError::InvalidInput("lower_bound needs at least one partition seed".into()));
    }
    for (p, _) in seeds {
        if p.n() != n || p.sizes()[0] > k {
            return Err(PibiError::InvalidInput(format!(
                "seed partition {p} incompatible with n = {n}, k = {k}"
            )));
        }
    }

    let mut skipped = Vec::new();
    let mut jobs: Vec<(usize, MeasurementSettings)> = Vec::new();
    let mut grid_used = false;
    for (pi, (partition, seed_settings)) in seeds.iter().enumerate() {
        if partition.max_pair_exponent() > options.pair_exponent_cap {
            skipped.push((partition.clone(), partition.max_pair_exponent()));
            continue;
        }
        let per_party = seed_settings.expand_per_party(partition)?;
        jobs.push((pi, per_party.clone()));
        let mut rng = job_rng(options.seed, 0xC0DE ^ pi, 0);
        for _ in 0..options.perturbations {
            let angles: Vec<[f64; 2]> = per_party
                .angles()
                .iter()
                .map(|&[a, b]| {
                    [
                        a + (rng.gen::<f64>() - 0.5) * 2.0 * options.perturb_scale,
                        b + (rng.gen::<f64>() - 0.5) * 2.0 * options.perturb_scale,
                    ]
                })
                .collect();
            jobs.push((pi, MeasurementSettings::per_party(angles)?));
        }
        if let Some(step) = options.grid_step {
            if partition.num_blocks() <= 2 && step > 0.0 {
                grid_used = true;
                let points = (std::f64::consts::TAU / step).ceil() as usize;
                let m = partition.num_blocks();
                // equal angles inside each region
                let mut combos: Vec<Vec<[f64; 2]>> = vec![Vec::new()];
                for _ in 0..m {
                    let mut next = Vec::new();
                    for base in &combos {
                        for i0 in 0..points {
                            for i1 in 0..points {
                                let mut c = base.clone();
                                c.push([i0 as f64 * step, i1 as f64 * step]);
                                next.push(c);
                            }
                        }
                    }
                    combos = next;
                }
                for angles in combos {
                    jobs.push((pi, MeasurementSettings::per_region(angles)?.expand_per_party(partition)?));
                }
            }
        }
    }
    if jobs.is_empty() {
        return Err(PibiError::Capacity(
            "every candidate partition exceeds the pair-dimension cap".into(),
        ));
    }

    let results: Vec<Result<(usize, f64, SdpStatus)>> = exec::map_collect(jobs, |(pi, settings)| {
        let (problem, meta) =
            build_relaxation_capped(coeffs, &settings, &seeds[pi].0, options.pair_exponent_cap)?;
        let solution = solve_sdp_with(&problem, &options.sdp)?;
        let certified = certified_lower_bound(&problem, &meta, &solution)?;
        Ok((pi, certified, solution.status))
    });

    let mut per: std::collections::BTreeMap<usize, PartitionCertificate> = Default::default();
    let mut total = 0usize;
    for r in results {
        let (pi, value, status) = r?;
        total += 1;
        per.entry(pi)
            .and_modify(|c| {
                c.solves += 1;
                if value < c.value {
                    c.value = value;
                    c.status = status;
                }
            })
            .or_insert(PartitionCertificate {
                partition: seeds[pi].0.clone(),
                value,
                solves: 1,
                status,
            });
    }
    let per_partition: Vec<PartitionCertificate> = per.into_values().collect();
    let beta_l = per_partition
        .iter()
        .map(|c| c.value)
        .fold(f64::INFINITY, f64::min);
    let coverage = format!(
        "{} partitions x (seed + {} perturbations{}), {} SDP solves; local search only, no global claim",
        per_partition.len(),
        options.perturbations,
        if grid_used { " + coarse grid" } else { "" },
        total
    );
    Ok(LowerBoundOutcome {
        beta_l,
        per_partition,
        total_solves: total,
        coverage,
        skipped,
    })
}

#[cfg(test)]
mod tests;
