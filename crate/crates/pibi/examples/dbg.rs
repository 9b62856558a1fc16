use pibi::ineq::PibiCoefficients;
use pibi::partition::Partition;
use pibi::sdp::*;
use pibi::seesaw::*;

fn main() {
    let coeffs = PibiCoefficients::default();
    let opts = SeesawOptions { restarts: 10, partitions: PartitionPolicy::Exhaustive, ..Default::default() };
    let ub = upper_bound(&coeffs, 4, 2, &opts).unwrap();
    println!("beta_u = {} at {}", ub.beta_u, ub.partition);
    for o in &ub.meta.per_partition {
        let (problem, meta) = build_relaxation(&coeffs, &o.settings, &o.partition).unwrap();
        let sol = solve_sdp(&problem, 1e-9).unwrap();
        let cert = certified_lower_bound(&problem, &meta, &sol).unwrap();
        println!(
            "partition {:8} seesaw {:+.9} sdp-primal {:+.9} sdp-dual {:+.9} certified {:+.9} status {:?} iters {}",
            o.partition.to_string(), o.value, sol.primal_value, sol.dual_value, cert, sol.status, sol.iterations
        );
    }
}
