//! Dense primal-dual path-following interior-point solver with
//! Nesterov–Todd scaling on real symmetric blocks.
//!
//! Mehrotra-style predictor/corrector with a shared Schur factorization per
//! iteration. Intended for instances whose constraint count keeps the dense
//! Schur complement small; the operator-splitting engine covers the rest.

use ndarray::{Array1, Array2};

use super::{SdpOptions, SdpProblem, SdpSolution, SdpStatus};
use crate::error::{PibiError, Result};
use crate::linalg::{cholesky, eigh, CholeskyFactor};

const DEFAULT_MAX_ITER: usize = 80;
const STEP_FRACTION: f64 = 0.98;

fn inner(a: &[Array2<f64>], b: &[Array2<f64>]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x * y).sum()).sum()
}

fn frob(a: &[Array2<f64>]) -> f64 {
    inner(a, a).sqrt()
}

fn robust_cholesky(a: &Array2<f64>) -> Result<CholeskyFactor> {
    match cholesky(a) {
        Ok(f) => Ok(f),
        Err(_) => {
            let d = a.nrows();
            let tr = (0..d).map(|i| a[[i, i]].abs()).sum::<f64>().max(1e-300);
            let mut jitter = 1e-14 * tr / d as f64;
            for _ in 0..8 {
                let mut aj = a.clone();
                for i in 0..d {
                    aj[[i, i]] += jitter;
                }
                if let Ok(f) = cholesky(&aj) {
                    return Ok(f);
                }
                jitter *= 100.0;
            }
            Err(PibiError::Numerical("cholesky failed beyond jitter budget".into()))
        }
    }
}

/// Largest α ≤ 1 with `X + α ΔX ⪰ (1 − fraction)·boundary`.
fn max_step(x_factor: &CholeskyFactor, dx: &Array2<f64>) -> Result<f64> {
    let b = x_factor.whiten(dx);
    let lam_min = crate::linalg::eigvalsh(&b)?[0];
    if lam_min >= -1e-300 {
        Ok(1.0)
    } else {
        Ok((-(1.0 / lam_min) * STEP_FRACTION).min(1.0))
    }
}

/// `W A_q W` accumulated from the sparse triplets of one constraint.
fn sandwich(w: &Array2<f64>, terms: &[(u32, u32, f64)], out: &mut Array2<f64>) {
    let d = w.nrows();
    out.fill(0.0);
    for &(i, j, c) in terms {
        let (i, j) = (i as usize, j as usize);
        // c (W e_i e_jᵀ W + W e_j e_iᵀ W), halved contributions merge on diag
        for r in 0..d {
            let wri = w[[r, i]];
            let wrj = w[[r, j]];
            if wri == 0.0 && wrj == 0.0 {
                continue;
            }
            for cc in 0..d {
                out[[r, cc]] += c * (wri * w[[j, cc]] + wrj * w[[i, cc]]);
            }
        }
        if i == j {
            // the two rank-one terms double-counted the diagonal case
            for r in 0..d {
                let wri = w[[r, i]];
                if wri == 0.0 {
                    continue;
                }
                for cc in 0..d {
                    out[[r, cc]] -= c * wri * w[[i, cc]];
                }
            }
        }
    }
}

pub(super) fn solve(problem: &SdpProblem, options: &SdpOptions) -> Result<SdpSolution> {
    let m = problem.constraints.len();
    let nblocks = problem.block_dims.len();
    let max_iter = if options.max_iterations == 0 { DEFAULT_MAX_ITER } else { options.max_iterations };
    let tol = options.tol.max(1e-12);

    // constraint triplets grouped by block
    let mut per_block: Vec<Vec<(usize, Vec<(u32, u32, f64)>)>> = vec![Vec::new(); nblocks];
    for (q, con) in problem.constraints.iter().enumerate() {
        let mut grouped: std::collections::BTreeMap<usize, Vec<(u32, u32, f64)>> = Default::default();
        for &(blk, i, j, c) in &con.terms {
            grouped.entry(blk).or_default().push((i, j, c));
        }
        for (blk, terms) in grouped {
            per_block[blk].push((q, terms));
        }
    }

    let b: Array1<f64> = problem.constraints.iter().map(|c| c.rhs).collect();
    let b_norm = b.dot(&b).sqrt();
    let c_norm = frob(&problem.objective);
    let total_dim: f64 = problem.block_dims.iter().map(|&d| d as f64).sum();

    // start: maximally mixed when feasible, scaled identities otherwise
    let mut x: Vec<Array2<f64>> = problem
        .block_dims
        .iter()
        .map(|&d| {
            if problem.mixed_start {
                Array2::eye(d) / d as f64
            } else {
                Array2::eye(d) * (1.0 + b_norm / (1.0 + total_dim))
            }
        })
        .collect();
    let mut s: Vec<Array2<f64>> = problem
        .block_dims
        .iter()
        .map(|&d| Array2::eye(d) * (1.0 + c_norm / (1.0 + (d as f64).sqrt())))
        .collect();
    let mut y = Array1::<f64>::zeros(m);

    let mut status = SdpStatus::MaxIterations;
    let mut iterations = 0;
    let mut tiny_steps = 0usize;

    for iter in 0..max_iter {
        iterations = iter + 1;

        // residuals
        let mut r_p = b.clone();
        for (q, con) in problem.constraints.iter().enumerate() {
            r_p[q] -= con.apply(&x);
        }
        let adj = problem.adjoint(y.as_slice().unwrap(), None);
        let mut r_d: Vec<Array2<f64>> = Vec::with_capacity(nblocks);
        for j in 0..nblocks {
            r_d.push(&problem.objective[j] - &adj[j] - &s[j]);
        }

        let gap = inner(&x, &s);
        let pobj = problem.primal_value(&x);
        let dobj = b.dot(&y);
        let mu = gap / total_dim;
        let rel_gap = gap / (1.0 + pobj.abs() + dobj.abs());
        let p_inf = r_p.dot(&r_p).sqrt() / (1.0 + b_norm);
        let d_inf = frob(&r_d) / (1.0 + c_norm);

        if rel_gap <= tol && p_inf <= tol && d_inf <= tol {
            status = SdpStatus::Optimal;
            break;
        }

        // NT scaling per block: W = G Gᵀ with G = L Q Λ^{-1/4}
        let mut w_blocks: Vec<Array2<f64>> = Vec::with_capacity(nblocks);
        let mut x_factors: Vec<CholeskyFactor> = Vec::with_capacity(nblocks);
        let mut s_factors: Vec<CholeskyFactor> = Vec::with_capacity(nblocks);
        for j in 0..nblocks {
            let fx = robust_cholesky(&x[j])?;
            let fs = robust_cholesky(&s[j])?;
            let d = problem.block_dims[j];
            let mut l = Array2::zeros((d, d));
            for r in 0..d {
                for c in 0..=r {
                    l[[r, c]] = fx.l_entry(r, c);
                }
            }
            let lt_s_l = l.t().dot(&s[j]).dot(&l);
            let e = eigh(&lt_s_l)?;
            let q = e.vectors_t();
            let mut g = l.dot(&q);
            for (col, lam) in e.values.iter().enumerate() {
                let scale = lam.max(1e-300).powf(-0.25);
                g.column_mut(col).mapv_inplace(|v| v * scale);
            }
            let w = g.dot(&g.t());
            w_blocks.push(w);
            x_factors.push(fx);
            s_factors.push(fs);
        }

        // Schur complement M[p][q] = Σ_j ⟨A_p, W A_q W⟩
        let mut schur = Array2::<f64>::zeros((m, m));
        for j in 0..nblocks {
            let cons = &per_block[j];
            if cons.is_empty() {
                continue;
            }
            let d = problem.block_dims[j];
            let mut v = Array2::<f64>::zeros((d, d));
            for (qi, (q, tq)) in cons.iter().enumerate() {
                sandwich(&w_blocks[j], tq, &mut v);
                for (p, tp) in cons.iter().take(qi + 1) {
                    let mut acc = 0.0;
                    for &(i, jj, c) in tp {
                        let val = v[[i as usize, jj as usize]];
                        acc += if i == jj { c * val } else { 2.0 * c * val };
                    }
                    schur[[*p, *q]] += acc;
                    if p != q {
                        schur[[*q, *p]] += acc;
                    }
                }
            }
        }
        // tiny Tikhonov guard against residual linear dependence
        let diag_mean = (0..m).map(|i| schur[[i, i]]).sum::<f64>() / m as f64;
        for i in 0..m {
            schur[[i, i]] += 1e-13 * diag_mean.max(1e-300);
        }
        let schur_factor = robust_cholesky(&schur)?;

        let s_inv: Vec<Array2<f64>> = s_factors
            .iter()
            .map(|f| f.inverse())
            .collect::<Result<_>>()?;

        // one Newton solve for a given complementarity target R_c
        let newton = |r_c: &[Array2<f64>]| -> Result<(Vec<Array2<f64>>, Array1<f64>, Vec<Array2<f64>>)> {
            // P_j = R_c − W R_d W;   M Δy = r_p − A(P)
            let mut p_blocks: Vec<Array2<f64>> = Vec::with_capacity(nblocks);
            for j in 0..nblocks {
                let wrd = w_blocks[j].dot(&r_d[j]).dot(&w_blocks[j]);
                p_blocks.push(&r_c[j] - &wrd);
            }
            let mut rhs = r_p.clone();
            for (q, con) in problem.constraints.iter().enumerate() {
                rhs[q] -= con.apply(&p_blocks);
            }
            let dy = schur_factor.solve(&rhs)?;
            let adj_dy = problem.adjoint(dy.as_slice().unwrap(), None);
            let mut ds: Vec<Array2<f64>> = Vec::with_capacity(nblocks);
            let mut dx: Vec<Array2<f64>> = Vec::with_capacity(nblocks);
            for j in 0..nblocks {
                let dsj = &r_d[j] - &adj_dy[j];
                let wdsw = w_blocks[j].dot(&dsj).dot(&w_blocks[j]);
                let dxj = &r_c[j] - &wdsw;
                // keep exact symmetry
                let dxj = (&dxj + &dxj.t()) / 2.0;
                let dsj = (&dsj + &dsj.t()) / 2.0;
                dx.push(dxj);
                ds.push(dsj);
            }
            Ok((dx, dy, ds))
        };

        // predictor (affine scaling)
        let r_c_aff: Vec<Array2<f64>> = x.iter().map(|xj| -xj).collect();
        let (dx_aff, _dy_aff, ds_aff) = newton(&r_c_aff)?;
        let mut alpha_p: f64 = 1.0;
        let mut alpha_d: f64 = 1.0;
        for j in 0..nblocks {
            alpha_p = alpha_p.min(max_step(&x_factors[j], &dx_aff[j])?);
            alpha_d = alpha_d.min(max_step(&s_factors[j], &ds_aff[j])?);
        }
        let mut gap_aff = 0.0;
        for j in 0..nblocks {
            let xa = &x[j] + &(&dx_aff[j] * alpha_p);
            let sa = &s[j] + &(&ds_aff[j] * alpha_d);
            gap_aff += (&xa * &sa).sum();
        }
        let sigma = ((gap_aff / gap).max(0.0).powi(3)).clamp(1e-6, 0.9);

        // corrector toward σμ
        let r_c: Vec<Array2<f64>> = (0..nblocks)
            .map(|j| &(&s_inv[j] * (sigma * mu)) - &x[j])
            .collect();
        let (dx, dy, ds) = newton(&r_c)?;
        let mut ap: f64 = 1.0;
        let mut ad: f64 = 1.0;
        for j in 0..nblocks {
            ap = ap.min(max_step(&x_factors[j], &dx[j])?);
            ad = ad.min(max_step(&s_factors[j], &ds[j])?);
        }

        for j in 0..nblocks {
            x[j].scaled_add(ap, &dx[j]);
            s[j].scaled_add(ad, &ds[j]);
            x[j] = (&x[j] + &x[j].t()) / 2.0;
            s[j] = (&s[j] + &s[j].t()) / 2.0;
        }
        y.scaled_add(ad, &dy);

        if ap < 1e-7 && ad < 1e-7 {
            tiny_steps += 1;
            if tiny_steps >= 3 {
                status = SdpStatus::Stalled;
                break;
            }
        } else {
            tiny_steps = 0;
        }
    }

    let pobj = problem.primal_value(&x);
    let dobj = b.dot(&y);
    Ok(SdpSolution {
        primal_value: pobj,
        dual_value: dobj,
        gap: inner(&x, &s),
        iterations,
        status,
        x,
        y: y.to_vec(),
        s,
    })
}
