use super::*;
use crate::linalg::eigvalsh;
use crate::seesaw::{random_product_state, upper_bound, PartitionPolicy, SeesawOptions};
use approx::assert_abs_diff_eq;
use ndarray::arr2;

fn bell_pair_projector() -> Array2<f64> {
    // |Φ+⟩⟨Φ+| with |Φ+⟩ = (|00⟩ + |11⟩)/√2
    let mut m = Array2::zeros((4, 4));
    for &(i, j) in &[(0, 0), (0, 3), (3, 0), (3, 3)] {
        m[[i, j]] = 0.5;
    }
    m
}

#[test]
fn partial_trace_product_case() {
    let x = arr2(&[[1.0, 0.3], [0.3, -0.5]]);
    let y = arr2(&[[0.7, 0.1], [0.1, 0.3]]); // unit trace
    let m = kron(&x, &y);
    let got = partial_trace(&m, (2, 2), Keep::A).unwrap();
    for i in 0..2 {
        for j in 0..2 {
            assert_abs_diff_eq!(got[[i, j]], x[[i, j]], epsilon = 1e-14);
        }
    }
    let got_b = partial_trace(&m, (2, 2), Keep::B).unwrap();
    let trx = 0.5;
    for i in 0..2 {
        for j in 0..2 {
            assert_abs_diff_eq!(got_b[[i, j]], trx * y[[i, j]], epsilon = 1e-14);
        }
    }
}

#[test]
fn partial_trace_maximally_entangled() {
    let got = partial_trace(&bell_pair_projector(), (2, 2), Keep::A).unwrap();
    for i in 0..2 {
        for j in 0..2 {
            let want = if i == j { 0.5 } else { 0.0 };
            assert_abs_diff_eq!(got[[i, j]], want, epsilon = 1e-14);
        }
    }
}

#[test]
fn partial_trace_matches_index_oracle() {
    // naive loop oracle over the 4⊗2 index grid
    let (da, db) = (4, 2);
    let d = da * db;
    let m = Array2::from_shape_fn((d, d), |(r, c)| ((r * 31 + c * 17) % 13) as f64 - 6.0);
    let m = (&m + &m.t()) / 2.0;
    let got = partial_trace(&m, (da, db), Keep::A).unwrap();
    for i in 0..da {
        for j in 0..da {
            let mut acc = 0.0;
            for t in 0..db {
                acc += m[[i * db + t, j * db + t]];
            }
            assert_abs_diff_eq!(got[[i, j]], acc, epsilon = 1e-13);
        }
    }
    // trace preservation
    let tr_in: f64 = (0..d).map(|i| m[[i, i]]).sum();
    let tr_out: f64 = (0..da).map(|i| got[[i, i]]).sum();
    assert_abs_diff_eq!(tr_in, tr_out, epsilon = 1e-12);
}

#[test]
fn partial_transpose_product_and_involution() {
    let x = arr2(&[[0.2, 1.0], [-0.4, 0.9]]);
    let y = arr2(&[[1.0, 0.25], [0.25, -0.3]]);
    let m = kron(&x, &y);
    let t = partial_transpose(&m, (2, 2)).unwrap();
    let want = kron(&x.t().to_owned(), &y);
    for i in 0..4 {
        for j in 0..4 {
            assert_abs_diff_eq!(t[[i, j]], want[[i, j]], epsilon = 1e-14);
        }
    }
    // involution on a random symmetric 4⊗4 matrix
    let d = 16;
    let r = Array2::from_shape_fn((d, d), |(i, j)| ((i * 7 + j * 3) % 11) as f64 / 11.0);
    let r = (&r + &r.t()) / 2.0;
    let twice = partial_transpose(&partial_transpose(&r, (4, 4)).unwrap(), (4, 4)).unwrap();
    assert_eq!(twice, r);
}

#[test]
fn partial_transpose_entangled_spectrum() {
    let t = partial_transpose(&bell_pair_projector(), (2, 2)).unwrap();
    let vals = eigvalsh(&t).unwrap();
    assert_abs_diff_eq!(vals[0], -0.5, epsilon = 1e-12);
}

#[test]
fn solve_min_eigenvalue_dim2() {
    let problem = SdpProblem {
        block_dims: vec![2],
        objective: vec![arr2(&[[0.0, 1.0], [1.0, 0.0]])],
        constraints: vec![Constraint {
            rhs: 1.0,
            terms: vec![(0, 0, 0, 1.0), (0, 1, 1, 1.0)],
        }],
        mixed_start: true,
        ppt_links: vec![],
    };
    let sol = solve_sdp(&problem, 1e-9).unwrap();
    assert_abs_diff_eq!(sol.primal_value, -1.0, epsilon = 1e-8);
    assert_abs_diff_eq!(sol.dual_value, -1.0, epsilon = 1e-8);
    assert!(sol.status == SdpStatus::Optimal);
}

#[test]
fn solve_diagonal_lp_reduction() {
    // diagonal objective with a trace constraint picks the smallest entry
    let problem = SdpProblem {
        block_dims: vec![3],
        objective: vec![Array2::from_diag(&ndarray::arr1(&[3.0, 1.0, 2.0]))],
        constraints: vec![Constraint {
            rhs: 1.0,
            terms: (0..3).map(|i| (0, i, i, 1.0)).collect(),
        }],
        mixed_start: true,
        ppt_links: vec![],
    };
    let sol = solve_sdp(&problem, 1e-9).unwrap();
    assert_abs_diff_eq!(sol.primal_value, 1.0, epsilon = 1e-7);
    assert_abs_diff_eq!(sol.dual_value, 1.0, epsilon = 1e-7);
}

/// Feasible marginal assignment of a pure product state over the partition.
fn product_state_assignment(
    problem: &SdpProblem,
    meta: &RelaxationMeta,
    blocks: &[ndarray::Array1<f64>],
) -> Vec<Array2<f64>> {
    let mut x: Vec<Array2<f64>> = problem
        .block_dims
        .iter()
        .map(|&d| Array2::zeros((d, d)))
        .collect();
    let rho: Vec<Array2<f64>> = blocks
        .iter()
        .map(|v| {
            let col = v.clone().insert_axis(ndarray::Axis(1));
            col.dot(&col.t())
        })
        .collect();
    for (r, &blk) in meta.region_blocks.iter().enumerate() {
        x[blk] = rho[r].clone();
    }
    for pair in &meta.pairs {
        let joint = kron(&rho[pair.regions.0], &rho[pair.regions.1]);
        x[pair.tt_block] = partial_transpose(&joint, pair.dims).unwrap();
        x[pair.var_block] = joint;
    }
    x
}

#[test]
fn product_states_are_feasible_and_dominate_dual() {
    // relaxation soundness plus weak duality on random product states
    let coeffs = PibiCoefficients::default();
    let partition = Partition::new(vec![2, 2], 2).unwrap();
    let settings = MeasurementSettings::per_party(vec![[0.3, 1.8], [2.4, 0.9], [1.1, 0.2], [0.7, 2.9]]).unwrap();
    let (problem, meta) = build_relaxation(&coeffs, &settings, &partition).unwrap();
    let sol = solve_sdp(&problem, 1e-9).unwrap();
    let certified = certified_lower_bound(&problem, &meta, &sol).unwrap();

    for seed in 0..40u64 {
        let state = random_product_state(&partition, seed);
        let x = product_state_assignment(&problem, &meta, &state.blocks);
        for con in &problem.constraints {
            assert_abs_diff_eq!(con.apply(&x), con.rhs, epsilon = 1e-10);
        }
        let pval = problem.primal_value(&x);
        assert!(
            pval >= certified - 1e-7,
            "weak duality violated: product value {pval} < certified {certified}"
        );
    }
}

#[test]
fn chsh_pair_ppt_is_exact() {
    // I = S00/2 + S01 − S11/2 on two parties is CHSH; with partition [1,1]
    // the PPT condition is separability, so the certified bound must meet
    // the product-state minimum −2
    let coeffs = PibiCoefficients::new(0.0, 0.0, 0.5, 1.0, -0.5).unwrap();
    let opts = SeesawOptions {
        restarts: 12,
        partitions: PartitionPolicy::Explicit(vec![Partition::singletons(2)]),
        ..Default::default()
    };
    let ub = upper_bound(&coeffs, 2, 1, &opts).unwrap();
    assert_abs_diff_eq!(ub.beta_u, -2.0, epsilon = 1e-7);

    let (problem, meta) =
        build_relaxation(&coeffs, &ub.settings, &Partition::singletons(2)).unwrap();
    let sol = solve_sdp(&problem, 1e-9).unwrap();
    let certified = certified_lower_bound(&problem, &meta, &sol).unwrap();
    assert_abs_diff_eq!(certified, -2.0, epsilon = 1e-6);
    assert!(certified <= ub.beta_u + 1e-9);
}

#[test]
fn single_block_relaxation_is_min_eigenvalue() {
    let coeffs = PibiCoefficients::default();
    let settings = MeasurementSettings::per_party(vec![[0.4, 1.9], [1.2, 0.3], [2.8, 1.4]]).unwrap();
    let partition = Partition::single_block(3);
    let (problem, meta) = build_relaxation(&coeffs, &settings, &partition).unwrap();
    assert_eq!(problem.block_dims, vec![8]);
    assert_eq!(problem.constraints.len(), 1);

    let bell = crate::bell::build_bell_operator(&coeffs, &settings, 3).unwrap();
    let lam_min = eigvalsh(&bell.matrix).unwrap()[0];
    let sol = solve_sdp(&problem, 1e-9).unwrap();
    assert_abs_diff_eq!(sol.primal_value, lam_min, epsilon = 1e-7);
    let certified = certified_lower_bound(&problem, &meta, &sol).unwrap();
    assert_abs_diff_eq!(certified, lam_min, epsilon = 1e-7);
    assert!(certified <= lam_min + 1e-12);
}

#[test]
fn splitting_and_interior_point_agree() {
    let coeffs = PibiCoefficients::default();
    let partition = Partition::new(vec![2, 2], 2).unwrap();
    let settings =
        MeasurementSettings::per_party(vec![[1.3, 0.2], [0.8, 2.1], [2.9, 1.0], [0.1, 1.7]]).unwrap();
    let (problem, meta) = build_relaxation(&coeffs, &settings, &partition).unwrap();

    let ipm = solve_sdp_with(
        &problem,
        &SdpOptions { engine: SdpEngine::InteriorPoint, tol: 1e-9, ..Default::default() },
    )
    .unwrap();
    let cert_ipm = certified_lower_bound(&problem, &meta, &ipm).unwrap();

    let adm = solve_sdp_with(
        &problem,
        &SdpOptions { engine: SdpEngine::Splitting, tol: 1e-7, ..Default::default() },
    )
    .unwrap();
    let cert_adm = certified_lower_bound(&problem, &meta, &adm).unwrap();

    assert_abs_diff_eq!(cert_ipm, cert_adm, epsilon = 2e-5);
    // both certificates must sit below the interior-point primal value
    assert!(cert_ipm <= ipm.primal_value + 1e-9);
    assert!(cert_adm <= ipm.primal_value + 1e-7);
}

#[test]
fn lower_bound_closes_gap_n4_k2() {
    let coeffs = PibiCoefficients::default();
    let opts = SeesawOptions {
        restarts: 10,
        partitions: PartitionPolicy::Exhaustive,
        ..Default::default()
    };
    let ub = upper_bound(&coeffs, 4, 2, &opts).unwrap();

    let seeds: Vec<(Partition, MeasurementSettings)> = ub
        .meta
        .per_partition
        .iter()
        .map(|o| (o.partition.clone(), o.settings.clone()))
        .collect();
    let lb = lower_bound(
        &coeffs,
        4,
        2,
        &seeds,
        &LowerBoundOptions { perturbations: 2, ..Default::default() },
    )
    .unwrap();
    assert!(lb.beta_l <= ub.beta_u + 1e-9, "sandwich violated");
    assert!(
        ub.beta_u - lb.beta_l <= 1e-5 * ub.beta_u.abs().max(1.0),
        "gap not closed: U = {}, L = {}",
        ub.beta_u,
        lb.beta_l
    );
}

#[test]
fn capacity_error_over_pair_cap() {
    let coeffs = PibiCoefficients::default();
    let partition = Partition::new(vec![5, 5], 5).unwrap();
    let settings = MeasurementSettings::uniform(crate::settings::SettingsMode::PerRegion, 2, 0.0, 1.0).unwrap();
    assert!(matches!(
        build_relaxation(&coeffs, &settings, &partition),
        Err(PibiError::Capacity(_))
    ));
}

#[test]
fn sparse_dump_round_trips_shape() {
    let coeffs = PibiCoefficients::default();
    let partition = Partition::new(vec![1, 1], 1).unwrap();
    let settings = MeasurementSettings::uniform(crate::settings::SettingsMode::PerParty, 2, 0.2, 1.1).unwrap();
    let (problem, _) = build_relaxation(&coeffs, &settings, &partition).unwrap();
    let mut buf = Vec::new();
    problem.write_sparse(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let header = text.lines().next().unwrap();
    assert_eq!(header, format!("sdp {} {}", problem.constraints.len(), problem.block_dims.len()));
    assert!(text.lines().any(|l| l.starts_with("blocks 2 2 4 4")));
    assert!(text.contains("obj "));
}
