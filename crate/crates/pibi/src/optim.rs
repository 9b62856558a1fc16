//! Small deterministic optimizers: exact minimization of low-order
//! trigonometric polynomials (the single-angle subproblems) and a
//! Nelder–Mead simplex for the few-parameter ansatz fits.

use std::f64::consts::TAU;

/// Minimize `f(θ) = a + b cosθ + c sinθ + d cos2θ + e sin2θ` given a closure.
///
/// The coefficients are recovered exactly from five samples, then the minimum
/// located on a fine grid and polished by Newton steps. Every single-angle
/// slice of the Bell objective has this form: one-body and crossed terms are
/// linear in `(cosθ, sinθ)`, the same-region quadratic terms add the `2θ`
/// harmonics.
pub fn minimize_trig(f: impl Fn(f64) -> f64) -> (f64, f64) {
    // sample at 5 equally spaced angles and solve for the coefficients via
    // the discrete Fourier relations
    let k = 5;
    let samples: Vec<(f64, f64)> = (0..k)
        .map(|i| {
            let t = TAU * i as f64 / k as f64;
            (t, f(t))
        })
        .collect();
    let mut a = 0.0;
    let mut b = 0.0;
    let mut c = 0.0;
    let mut d = 0.0;
    let mut e = 0.0;
    for &(t, y) in &samples {
        a += y;
        b += y * t.cos();
        c += y * t.sin();
        d += y * (2.0 * t).cos();
        e += y * (2.0 * t).sin();
    }
    let kf = k as f64;
    a /= kf;
    b *= 2.0 / kf;
    c *= 2.0 / kf;
    d *= 2.0 / kf;
    e *= 2.0 / kf;

    let g = |t: f64| a + b * t.cos() + c * t.sin() + d * (2.0 * t).cos() + e * (2.0 * t).sin();
    let dg = |t: f64| -b * t.sin() + c * t.cos() - 2.0 * d * (2.0 * t).sin() + 2.0 * e * (2.0 * t).cos();
    let ddg = |t: f64| -b * t.cos() - c * t.sin() - 4.0 * d * (2.0 * t).cos() - 4.0 * e * (2.0 * t).sin();

    let grid = 256;
    let mut best_t = 0.0;
    let mut best_v = f64::INFINITY;
    for i in 0..grid {
        let t = TAU * i as f64 / grid as f64;
        let v = g(t);
        if v < best_v {
            best_v = v;
            best_t = t;
        }
    }
    for _ in 0..40 {
        let h = ddg(best_t);
        if h.abs() < 1e-300 {
            break;
        }
        let step = dg(best_t) / h;
        let cand = best_t - step;
        if h > 0.0 && g(cand) <= best_v + 1e-15 {
            best_t = cand;
            best_v = g(best_t);
            if step.abs() < 1e-14 {
                break;
            }
        } else {
            break;
        }
    }
    (best_t.rem_euclid(TAU), best_v)
}

/// Result of a simplex minimization.
#[derive(Debug, Clone)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Nelder–Mead with standard coefficients and a size-based stop.
pub fn nelder_mead(
    f: impl Fn(&[f64]) -> f64,
    start: &[f64],
    initial_step: f64,
    tol: f64,
    max_evals: usize,
) -> SimplexResult {
    let n = start.len();
    let evals = std::cell::Cell::new(0usize);
    let eval = |x: &[f64]| {
        evals.set(evals.get() + 1);
        f(x)
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let v0 = start.to_vec();
    let f0 = eval(&v0);
    simplex.push((v0, f0));
    for i in 0..n {
        let mut v = start.to_vec();
        v[i] += if v[i].abs() > 1e-8 { initial_step * v[i].abs() } else { initial_step };
        let fv = eval(&v);
        simplex.push((v, fv));
    }

    while evals.get() < max_evals {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        let spread = simplex[n].1 - simplex[0].1;
        let mut size: f64 = 0.0;
        for i in 1..=n {
            for j in 0..n {
                size = size.max((simplex[i].0[j] - simplex[0].0[j]).abs());
            }
        }
        if spread.abs() <= tol && size <= tol.max(1e-12) {
            return SimplexResult {
                x: simplex[0].0.clone(),
                value: simplex[0].1,
                evaluations: evals.get(),
                converged: true,
            };
        }

        let mut centroid = vec![0.0; n];
        for item in simplex.iter().take(n) {
            for j in 0..n {
                centroid[j] += item.0[j] / n as f64;
            }
        }
        let worst = simplex[n].clone();
        let point = |coef: f64| -> Vec<f64> {
            (0..n)
                .map(|j| centroid[j] + coef * (worst.0[j] - centroid[j]))
                .collect()
        };

        let refl = point(-1.0);
        let f_refl = eval(&refl);
        if f_refl < simplex[0].1 {
            let exp = point(-2.0);
            let f_exp = eval(&exp);
            simplex[n] = if f_exp < f_refl { (exp, f_exp) } else { (refl, f_refl) };
        } else if f_refl < simplex[n - 1].1 {
            simplex[n] = (refl, f_refl);
        } else {
            let contr = if f_refl < worst.1 { point(-0.5) } else { point(0.5) };
            let f_contr = eval(&contr);
            if f_contr < worst.1.min(f_refl) {
                simplex[n] = (contr, f_contr);
            } else {
                // shrink toward the best vertex
                let best = simplex[0].0.clone();
                for item in simplex.iter_mut().skip(1) {
                    for j in 0..n {
                        item.0[j] = best[j] + 0.5 * (item.0[j] - best[j]);
                    }
                    item.1 = eval(&item.0);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    SimplexResult {
        x: simplex[0].0.clone(),
        value: simplex[0].1,
        evaluations: evals.get(),
        converged: false,
    }
}
