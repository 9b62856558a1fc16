//! Consensus-splitting engine for relaxations whose partial-transpose links
//! are too numerous for a dense Schur complement.
//!
//! The transpose-copy blocks are eliminated: the pair variable itself carries
//! both cone constraints. Three proximal copies run to consensus —
//! (objective + affine equalities), (PSD on every block), (PSD of the
//! partial transpose on pair blocks) — with over-relaxation and penalty
//! rebalancing. Iteration cost is one small dense solve plus one
//! eigendecomposition per cone block. Termination is driven by the repaired
//! dual value, so the reported bound stays sound at any accuracy.

use ndarray::{Array1, Array2};

use super::{partial_transpose, SdpOptions, SdpProblem, SdpSolution, SdpStatus};
use crate::error::{PibiError, Result};
use crate::linalg::{self, cholesky, CholeskyFactor};

const DEFAULT_MAX_ITER: usize = 40_000;
const RELAXATION: f64 = 1.7;
const CHECK_EVERY: usize = 25;

struct Reduced {
    /// kept original block indices, in order
    kept: Vec<usize>,
    /// original block index → reduced index
    map: Vec<Option<usize>>,
    dims: Vec<usize>,
    objective: Vec<Array2<f64>>,
    /// kept constraints as (original index, remapped terms, rhs)
    cons: Vec<(usize, Vec<(usize, u32, u32, f64)>, f64)>,
    /// reduced index of each PPT pair block with its factor dims
    ppt: Vec<(usize, (usize, usize))>,
}

fn reduce(problem: &SdpProblem) -> Result<Reduced> {
    let nblocks = problem.block_dims.len();
    let mut is_tt = vec![false; nblocks];
    let mut is_link = vec![false; problem.constraints.len()];
    for link in &problem.ppt_links {
        is_tt[link.tt_block] = true;
        for i in link.links.clone() {
            is_link[i] = true;
        }
    }
    let mut map = vec![None; nblocks];
    let mut kept = Vec::new();
    for b in 0..nblocks {
        if !is_tt[b] {
            map[b] = Some(kept.len());
            kept.push(b);
        }
    }
    let mut cons = Vec::new();
    for (i, c) in problem.constraints.iter().enumerate() {
        if is_link[i] {
            continue;
        }
        let mut terms = Vec::with_capacity(c.terms.len());
        for &(blk, r, s, v) in &c.terms {
            match map[blk] {
                Some(rb) => terms.push((rb, r, s, v)),
                None => {
                    return Err(PibiError::InvalidInput(
                        "non-link constraint touches a transpose copy".into(),
                    ))
                }
            }
        }
        cons.push((i, terms, c.rhs));
    }
    let ppt = problem
        .ppt_links
        .iter()
        .map(|l| (map[l.var_block].expect("pair block kept"), l.dims))
        .collect();
    Ok(Reduced {
        dims: kept.iter().map(|&b| problem.block_dims[b]).collect(),
        objective: kept.iter().map(|&b| problem.objective[b].clone()).collect(),
        kept,
        map,
        cons,
        ppt,
    })
}

type BlockVec = Vec<Array2<f64>>;

fn zeros(dims: &[usize]) -> BlockVec {
    dims.iter().map(|&d| Array2::zeros((d, d))).collect()
}

fn apply_terms(terms: &[(usize, u32, u32, f64)], x: &BlockVec) -> f64 {
    let mut acc = 0.0;
    for &(b, i, j, c) in terms {
        let v = x[b][[i as usize, j as usize]];
        acc += if i == j { c * v } else { 2.0 * c * v };
    }
    acc
}

fn add_terms(terms: &[(usize, u32, u32, f64)], scale: f64, out: &mut BlockVec) {
    for &(b, i, j, c) in terms {
        out[b][[i as usize, j as usize]] += scale * c;
        if i != j {
            out[b][[j as usize, i as usize]] += scale * c;
        }
    }
}

fn dist2(a: &BlockVec, b: &BlockVec) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = x - y;
            (&d * &d).sum()
        })
        .sum()
}

fn psd_projection(m: &Array2<f64>) -> Result<Array2<f64>> {
    let e = linalg::eigh(m)?;
    Ok(e.map_spectrum(|l| l.max(0.0)))
}

pub(super) fn solve(problem: &SdpProblem, options: &SdpOptions) -> Result<SdpSolution> {
    if problem.ppt_links.is_empty() && problem.constraints.len() > options.ipm_max_constraints {
        return Err(PibiError::Capacity(
            "instance too large for the interior-point engine and without transpose links to split".into(),
        ));
    }
    let red = reduce(problem)?;
    let m = red.cons.len();
    let max_iter = if options.max_iterations == 0 { DEFAULT_MAX_ITER } else { options.max_iterations };

    // Gram matrix of the kept constraints, factored once
    let mut gram = Array2::<f64>::zeros((m, m));
    {
        use std::collections::HashMap;
        let mut entry_map: Vec<HashMap<(u32, u32), Vec<(usize, f64)>>> =
            vec![HashMap::new(); red.dims.len()];
        for (q, (_, terms, _)) in red.cons.iter().enumerate() {
            for &(b, i, j, c) in terms {
                entry_map[b].entry((i, j)).or_default().push((q, c));
            }
        }
        for map in &entry_map {
            for ((i, j), list) in map {
                let w = if i == j { 1.0 } else { 2.0 };
                for &(p, cp) in list {
                    for &(q, cq) in list {
                        gram[[p, q]] += w * cp * cq;
                    }
                }
            }
        }
        let mean = (0..m).map(|i| gram[[i, i]]).sum::<f64>() / m.max(1) as f64;
        for i in 0..m {
            gram[[i, i]] += 1e-12 * mean.max(1e-300);
        }
    }
    let gram_factor: CholeskyFactor = cholesky(&gram)
        .map_err(|_| PibiError::Numerical("constraint Gram matrix not positive definite".into()))?;

    let c_norm = red.objective.iter().map(|c| (c * c).sum()).sum::<f64>().sqrt();
    let total_dim: f64 = red.dims.iter().map(|&d| d as f64).sum();
    let mut rho = (c_norm / total_dim.max(1.0)).max(0.5);

    let mut z: BlockVec = red.dims.iter().map(|&d| Array2::eye(d) / d as f64).collect();
    let mut u: [BlockVec; 3] = [zeros(&red.dims), zeros(&red.dims), zeros(&red.dims)];
    let mut lambda = Array1::<f64>::zeros(m);

    let mut status = SdpStatus::MaxIterations;
    let mut iterations = 0;
    let gap_target = options.tol.max(5e-7);
    // best repaired dual value seen, with the multipliers that produced it
    let mut best: Option<(f64, Array1<f64>, BlockVec)> = None;

    for iter in 0..max_iter {
        iterations = iter + 1;
        let z_prev = z.clone();

        let mut xs: [BlockVec; 3] = [zeros(&red.dims), zeros(&red.dims), zeros(&red.dims)];
        for copy in 0..3 {
            let mut v = z_prev.clone();
            for (vj, uj) in v.iter_mut().zip(&u[copy]) {
                *vj -= uj;
            }
            xs[copy] = match copy {
                0 => {
                    // prox of ⟨C,·⟩ + indicator(Ex = b)
                    let mut w = v;
                    for (wj, cj) in w.iter_mut().zip(&red.objective) {
                        wj.scaled_add(-1.0 / rho, cj);
                    }
                    let mut resid = Array1::<f64>::zeros(m);
                    for (q, (_, terms, rhs)) in red.cons.iter().enumerate() {
                        resid[q] = apply_terms(terms, &w) - rhs;
                    }
                    let nu = gram_factor.solve(&resid)?;
                    for (q, (_, terms, _)) in red.cons.iter().enumerate() {
                        if nu[q] != 0.0 {
                            add_terms(terms, -nu[q], &mut w);
                        }
                    }
                    lambda = nu * rho;
                    w
                }
                1 => {
                    let mut out = v;
                    for o in out.iter_mut() {
                        *o = psd_projection(o)?;
                    }
                    out
                }
                _ => {
                    let mut out = v;
                    for &(pb, dims) in &red.ppt {
                        let t = partial_transpose(&out[pb], dims)?;
                        let p = psd_projection(&t)?;
                        out[pb] = partial_transpose(&p, dims)?;
                    }
                    out
                }
            };
            for (xj, zj) in xs[copy].iter_mut().zip(&z_prev) {
                xj.mapv_inplace(|x| RELAXATION * x);
                xj.scaled_add(1.0 - RELAXATION, zj);
            }
        }

        for (bidx, zj) in z.iter_mut().enumerate() {
            let mut acc = Array2::zeros(zj.raw_dim());
            for x in &xs {
                acc += &x[bidx];
            }
            for uc in &u {
                acc += &uc[bidx];
            }
            *zj = acc / 3.0;
        }
        for (copy, uc) in u.iter_mut().enumerate() {
            for (bidx, uj) in uc.iter_mut().enumerate() {
                *uj += &xs[copy][bidx];
                *uj -= &z[bidx];
            }
        }

        if iterations % CHECK_EVERY == 0 || iterations == max_iter {
            let y = assemble_dual(problem, &red, &lambda, &u[2], rho);
            let trial = stub_solution(problem, &red, &z, &y);
            if let Some(cert) = repaired_dual_value(problem, &trial) {
                let pobj: f64 = red.objective.iter().zip(&z).map(|(c, x)| (c * x).sum()).sum();
                match &best {
                    Some((c0, _, _)) if *c0 >= cert => {}
                    _ => best = Some((cert, y.clone(), z.clone())),
                }
                let r_pri = (dist2(&xs[0], &z) + dist2(&xs[1], &z) + dist2(&xs[2], &z)).sqrt();
                let z_norm = z.iter().map(|b| (b * b).sum()).sum::<f64>().sqrt();
                if (pobj - cert).abs() <= gap_target * (1.0 + pobj.abs())
                    && r_pri <= 1e-6 * (1.0 + z_norm)
                {
                    status = SdpStatus::Optimal;
                    break;
                }
            }

            let r_pri = (dist2(&xs[0], &z) + dist2(&xs[1], &z) + dist2(&xs[2], &z)).sqrt();
            let r_dual = rho * (3.0 * dist2(&z, &z_prev)).sqrt();
            if r_pri > 10.0 * r_dual && r_dual.is_finite() {
                rho *= 2.0;
                for uc in u.iter_mut() {
                    for uj in uc.iter_mut() {
                        uj.mapv_inplace(|x| x / 2.0);
                    }
                }
            } else if r_dual > 10.0 * r_pri {
                rho /= 2.0;
                for uc in u.iter_mut() {
                    for uj in uc.iter_mut() {
                        uj.mapv_inplace(|x| x * 2.0);
                    }
                }
            }
        }
    }

    let (y_best, z_best) = match best {
        Some((_, y, zb)) => (y, zb),
        None => (assemble_dual(problem, &red, &lambda, &u[2], rho), z),
    };
    let mut sol = stub_solution(problem, &red, &z_best, &y_best);
    sol.iterations = iterations;
    sol.status = status;
    Ok(sol)
}

/// Full-problem dual vector: kept constraints carry `−λ`; link constraints
/// encode the PPT multiplier recovered from the third prox's scaled dual,
/// `Z = T(ρ·u₃)` clipped to the PSD cone.
fn assemble_dual(
    problem: &SdpProblem,
    red: &Reduced,
    lambda: &Array1<f64>,
    u3: &BlockVec,
    rho: f64,
) -> Array1<f64> {
    let mut y = Array1::<f64>::zeros(problem.constraints.len());
    for (q, (orig, _, _)) in red.cons.iter().enumerate() {
        y[*orig] = -lambda[q];
    }
    for link in &problem.ppt_links {
        let pb = red.map[link.var_block].expect("pair block kept");
        let scaled = u3[pb].mapv(|v| v * rho);
        let z_est = match partial_transpose(&scaled, link.dims) {
            Ok(t) => t,
            Err(_) => continue,
        };
        let z_psd = match linalg::eigh(&z_est) {
            Ok(e) => e.map_spectrum(|l| l.max(0.0)),
            Err(_) => continue,
        };
        // y on link (u,v): −Z[u,u] on the diagonal, −2·Z[u,v] above it
        let d = problem.block_dims[link.tt_block];
        let mut idx = link.links.start;
        for uu in 0..d {
            for vv in uu..d {
                y[idx] = if uu == vv { -z_psd[[uu, uu]] } else { -2.0 * z_psd[[uu, vv]] };
                idx += 1;
            }
        }
    }
    y
}

fn stub_solution(problem: &SdpProblem, red: &Reduced, z: &[Array2<f64>], y: &Array1<f64>) -> SdpSolution {
    let mut x: Vec<Array2<f64>> = problem
        .block_dims
        .iter()
        .map(|&d| Array2::zeros((d, d)))
        .collect();
    for (ri, &orig) in red.kept.iter().enumerate() {
        x[orig] = z[ri].clone();
    }
    for link in &problem.ppt_links {
        if let Ok(t) = partial_transpose(&x[link.var_block], link.dims) {
            x[link.tt_block] = t;
        }
    }
    let adj = problem.adjoint(y.as_slice().unwrap(), None);
    let s: Vec<Array2<f64>> = problem
        .objective
        .iter()
        .zip(&adj)
        .map(|(c, a)| c - a)
        .collect();
    let pobj = problem.primal_value(&x);
    let dobj: f64 = problem
        .constraints
        .iter()
        .zip(y.iter())
        .map(|(c, yi)| c.rhs * yi)
        .sum();
    SdpSolution {
        primal_value: pobj,
        dual_value: dobj,
        gap: pobj - dobj,
        iterations: 0,
        status: SdpStatus::MaxIterations,
        x,
        y: y.to_vec(),
        s,
    }
}

/// Repaired dual value of an arbitrary multiplier vector: PPT multipliers
/// clipped PSD, every slack's negative part absorbed into that block's trace
/// multiplier. `None` when some cone block has no trace constraint to shift.
fn repaired_dual_value(problem: &SdpProblem, sol: &SdpSolution) -> Option<f64> {
    let nblocks = problem.block_dims.len();
    let mut trace_con: Vec<Option<usize>> = vec![None; nblocks];
    for (q, c) in problem.constraints.iter().enumerate() {
        if c.rhs != 1.0 || c.terms.is_empty() {
            continue;
        }
        let blk = c.terms[0].0;
        if c.terms.len() == problem.block_dims[blk]
            && c.terms.iter().all(|&(b, i, j, v)| b == blk && i == j && v == 1.0)
        {
            trace_con[blk] = Some(q);
        }
    }
    let mut is_tt = vec![false; nblocks];
    let mut tz: Vec<Option<Array2<f64>>> = vec![None; nblocks];
    for link in &problem.ppt_links {
        is_tt[link.tt_block] = true;
        let d = problem.block_dims[link.tt_block];
        let mut zmat = Array2::<f64>::zeros((d, d));
        for idx in link.links.clone() {
            let yv = sol.y[idx];
            if yv == 0.0 {
                continue;
            }
            for &(b, i, j, c) in &problem.constraints[idx].terms {
                if b == link.tt_block {
                    zmat[[i as usize, j as usize]] -= yv * c;
                    if i != j {
                        zmat[[j as usize, i as usize]] -= yv * c;
                    }
                }
            }
        }
        let e = linalg::eigh(&zmat).ok()?;
        let zp = e.map_spectrum(|l| l.max(0.0));
        tz[link.var_block] = Some(partial_transpose(&zp, link.dims).ok()?);
    }

    let link_ranges: Vec<std::ops::Range<usize>> =
        problem.ppt_links.iter().map(|l| l.links.clone()).collect();

    let mut certified = 0.0;
    for blk in 0..nblocks {
        if is_tt[blk] {
            continue;
        }
        let mut slack = problem.objective[blk].clone();
        for (q, c) in problem.constraints.iter().enumerate() {
            if sol.y[q] == 0.0 || link_ranges.iter().any(|r| r.contains(&q)) {
                continue;
            }
            for &(b, i, j, v) in &c.terms {
                if b == blk {
                    slack[[i as usize, j as usize]] -= sol.y[q] * v;
                    if i != j {
                        slack[[j as usize, i as usize]] -= sol.y[q] * v;
                    }
                }
            }
        }
        if let Some(t) = &tz[blk] {
            slack -= t;
        }
        let lam = linalg::eigvalsh(&slack).ok()?[0];
        let tq = trace_con[blk]?;
        certified += sol.y[tq] + lam.min(0.0);
    }
    Some(certified)
}
