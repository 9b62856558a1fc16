//! Dense symmetric eigensolvers, Cholesky solves and banded matrices.
//!
//! LAPACK (system OpenBLAS) is called directly for the dense kernels; a
//! Lanczos iteration with full reorthogonalization covers dimensions where a
//! full eigendecomposition would be wasteful.

use ndarray::{Array1, Array2, ArrayView1};

use crate::error::{PibiError, Result};

extern "C" {
    fn dsyevd_(
        jobz: *const u8,
        uplo: *const u8,
        n: *const i32,
        a: *mut f64,
        lda: *const i32,
        w: *mut f64,
        work: *mut f64,
        lwork: *const i32,
        iwork: *mut i32,
        liwork: *const i32,
        info: *mut i32,
    );
    fn dpotrf_(uplo: *const u8, n: *const i32, a: *mut f64, lda: *const i32, info: *mut i32);
    fn dpotrs_(
        uplo: *const u8,
        n: *const i32,
        nrhs: *const i32,
        a: *const f64,
        lda: *const i32,
        b: *mut f64,
        ldb: *const i32,
        info: *mut i32,
    );
    fn dpotri_(uplo: *const u8, n: *const i32, a: *mut f64, lda: *const i32, info: *mut i32);
}

/// Eigendecomposition of a real symmetric matrix.
///
/// Eigenvalues ascend; `vectors.row(j)` is the eigenvector of `values[j]`.
pub struct Eigh {
    pub values: Array1<f64>,
    vectors: Array2<f64>,
}

impl Eigh {
    pub fn vector(&self, j: usize) -> ArrayView1<'_, f64> {
        self.vectors.row(j)
    }

    /// Matrix whose columns are the eigenvectors, ordered like `values`.
    pub fn vectors_t(&self) -> Array2<f64> {
        self.vectors.t().to_owned()
    }

    /// Reassemble `f(A) = V diag(f(w)) V^T` for a spectral function `f`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> Array2<f64> {
        let n = self.values.len();
        let mut out = Array2::zeros((n, n));
        for j in 0..n {
            let fj = f(self.values[j]);
            if fj == 0.0 {
                continue;
            }
            let v = self.vectors.row(j);
            for r in 0..n {
                let s = fj * v[r];
                for c in 0..n {
                    out[[r, c]] += s * v[c];
                }
            }
        }
        out
    }
}

fn dsyevd(a: &Array2<f64>, jobz: u8) -> Result<(Array1<f64>, Array2<f64>)> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(PibiError::Dimension(format!(
            "eigh expects a square matrix, got {}x{}",
            n,
            a.ncols()
        )));
    }
    let ni = n as i32;
    // dsyevd reads the buffer column-major; symmetry makes the layout moot on
    // input, and the eigenvectors come back as rows of the row-major array.
    let mut m = a.to_owned();
    let mut w = Array1::zeros(n);
    let mut info = 0i32;
    let (mut wq, mut iwq) = ([0.0f64], [0i32]);
    let neg1 = -1i32;
    unsafe {
        dsyevd_(
            &jobz,
            b"L".as_ptr(),
            &ni,
            m.as_mut_ptr(),
            &ni,
            w.as_mut_ptr(),
            wq.as_mut_ptr(),
            &neg1,
            iwq.as_mut_ptr(),
            &neg1,
            &mut info,
        );
        let lwork = wq[0] as i32;
        let liwork = iwq[0];
        let mut work = vec![0.0f64; lwork.max(1) as usize];
        let mut iwork = vec![0i32; liwork.max(1) as usize];
        dsyevd_(
            &jobz,
            b"L".as_ptr(),
            &ni,
            m.as_mut_ptr(),
            &ni,
            w.as_mut_ptr(),
            work.as_mut_ptr(),
            &lwork,
            iwork.as_mut_ptr(),
            &liwork,
            &mut info,
        );
    }
    if info != 0 {
        return Err(PibiError::Numerical(format!("dsyevd failed, info = {info}")));
    }
    Ok((w, m))
}

/// Full symmetric eigendecomposition (ascending eigenvalues).
pub fn eigh(a: &Array2<f64>) -> Result<Eigh> {
    let (values, vectors) = dsyevd(a, b'V')?;
    Ok(Eigh { values, vectors })
}

/// Eigenvalues only, ascending.
pub fn eigvalsh(a: &Array2<f64>) -> Result<Array1<f64>> {
    Ok(dsyevd(a, b'N')?.0)
}

/// Smallest eigenvalue and its eigenvector of a dense symmetric matrix.
pub fn min_eigpair(a: &Array2<f64>) -> Result<(f64, Array1<f64>)> {
    let e = eigh(a)?;
    Ok((e.values[0], e.vector(0).to_owned()))
}

/// Cholesky factor of a symmetric positive definite matrix, reusable for
/// repeated solves.
pub struct CholeskyFactor {
    factor: Array2<f64>,
    n: usize,
}

pub fn cholesky(a: &Array2<f64>) -> Result<CholeskyFactor> {
    let n = a.nrows();
    let ni = n as i32;
    let mut m = a.to_owned();
    let mut info = 0i32;
    unsafe {
        dpotrf_(b"L".as_ptr(), &ni, m.as_mut_ptr(), &ni, &mut info);
    }
    if info != 0 {
        return Err(PibiError::Numerical(format!("dpotrf failed, info = {info}")));
    }
    Ok(CholeskyFactor { factor: m, n })
}

impl CholeskyFactor {
    /// LAPACK saw our row-major buffer column-major, so the factor `L` of
    /// `A = L Lᵀ` sits transposed in the upper triangle: row-major entry
    /// `[j, i]` (j ≤ i) holds `L[i, j]`.
    pub(crate) fn l_entry(&self, i: usize, j: usize) -> f64 {
        self.factor[[j, i]]
    }

    /// `L^{-1} M L^{-T}`, the congruence that whitens `A` to the identity.
    pub fn whiten(&self, m: &Array2<f64>) -> Array2<f64> {
        let n = self.n;
        let mut z = m.to_owned();
        let zs = z.as_slice_mut().expect("row-major contiguous");
        // rows: Z = L^{-1} M by forward substitution
        for i in 0..n {
            for j in 0..i {
                let lij = self.l_entry(i, j);
                if lij != 0.0 {
                    for c in 0..n {
                        zs[i * n + c] -= lij * zs[j * n + c];
                    }
                }
            }
            let d = self.l_entry(i, i);
            for c in 0..n {
                zs[i * n + c] /= d;
            }
        }
        // per row r: B[r, :] = Z[r, :] L^{-T}, i.e. solve L x = Z[r, :]ᵀ
        for r in 0..n {
            let row = &mut zs[r * n..(r + 1) * n];
            for i in 0..n {
                let mut acc = row[i];
                for j in 0..i {
                    acc -= self.l_entry(i, j) * row[j];
                }
                row[i] = acc / self.l_entry(i, i);
            }
        }
        z
    }

    /// The inverse `A^{-1}`.
    pub fn inverse(&self) -> Result<Array2<f64>> {
        let ni = self.n as i32;
        let mut m = self.factor.clone();
        let mut info = 0i32;
        unsafe {
            dpotri_(b"L".as_ptr(), &ni, m.as_mut_ptr(), &ni, &mut info);
        }
        if info != 0 {
            return Err(PibiError::Numerical(format!("dpotri failed, info = {info}")));
        }
        // LAPACK filled the column-major lower triangle = our upper triangle
        for i in 0..self.n {
            for j in 0..i {
                m[[i, j]] = m[[j, i]];
            }
        }
        Ok(m)
    }

    pub fn solve(&self, rhs: &Array1<f64>) -> Result<Array1<f64>> {
        if rhs.len() != self.n {
            return Err(PibiError::Dimension("cholesky solve rhs length".into()));
        }
        let ni = self.n as i32;
        let one = 1i32;
        let mut b = rhs.to_owned();
        let mut info = 0i32;
        unsafe {
            dpotrs_(
                b"L".as_ptr(),
                &ni,
                &one,
                self.factor.as_ptr(),
                &ni,
                b.as_mut_ptr(),
                &ni,
                &mut info,
            );
        }
        if info != 0 {
            return Err(PibiError::Numerical(format!("dpotrs failed, info = {info}")));
        }
        Ok(b)
    }
}

/// Smallest eigenvalue at which `a + shift I` stops being positive definite,
/// probed by attempting a Cholesky factorization. Used for step-length tests.
pub fn is_positive_definite(a: &Array2<f64>) -> bool {
    cholesky(a).is_ok()
}

/// Symmetric banded matrix with half-bandwidth 2 (pentadiagonal).
///
/// Collective-spin region operators never need more: Jx and Jz are at most
/// tridiagonal in the Dicke basis and their products reach two off-diagonals.
#[derive(Debug, Clone)]
pub struct SymPenta {
    /// Main diagonal, length `n`.
    pub d0: Vec<f64>,
    /// First off-diagonal (`a[i, i+1]`), length `n - 1`.
    pub d1: Vec<f64>,
    /// Second off-diagonal (`a[i, i+2]`), length `n - 2`.
    pub d2: Vec<f64>,
}

impl SymPenta {
    pub fn zeros(n: usize) -> Self {
        SymPenta {
            d0: vec![0.0; n],
            d1: vec![0.0; n.saturating_sub(1)],
            d2: vec![0.0; n.saturating_sub(2)],
        }
    }

    pub fn dim(&self) -> usize {
        self.d0.len()
    }

    pub fn scaled_add(&mut self, c: f64, other: &SymPenta) {
        for (a, b) in self.d0.iter_mut().zip(&other.d0) {
            *a += c * b;
        }
        for (a, b) in self.d1.iter_mut().zip(&other.d1) {
            *a += c * b;
        }
        for (a, b) in self.d2.iter_mut().zip(&other.d2) {
            *a += c * b;
        }
    }

    pub fn add_identity(&mut self, c: f64) {
        for a in self.d0.iter_mut() {
            *a += c;
        }
    }

    pub fn matvec(&self, x: &ArrayView1<f64>, out: &mut Array1<f64>) {
        let n = self.dim();
        for i in 0..n {
            let mut acc = self.d0[i] * x[i];
            if i >= 1 {
                acc += self.d1[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                acc += self.d1[i] * x[i + 1];
            }
            if i >= 2 {
                acc += self.d2[i - 2] * x[i - 2];
            }
            if i + 2 < n {
                acc += self.d2[i] * x[i + 2];
            }
            out[i] = acc;
        }
    }

    pub fn expectation(&self, x: &ArrayView1<f64>) -> f64 {
        let n = self.dim();
        let mut acc = 0.0;
        for i in 0..n {
            acc += self.d0[i] * x[i] * x[i];
            if i + 1 < n {
                acc += 2.0 * self.d1[i] * x[i] * x[i + 1];
            }
            if i + 2 < n {
                acc += 2.0 * self.d2[i] * x[i] * x[i + 2];
            }
        }
        acc
    }

    pub fn to_dense(&self) -> Array2<f64> {
        let n = self.dim();
        let mut m = Array2::zeros((n, n));
        for i in 0..n {
            m[[i, i]] = self.d0[i];
            if i + 1 < n {
                m[[i, i + 1]] = self.d1[i];
                m[[i + 1, i]] = self.d1[i];
            }
            if i + 2 < n {
                m[[i, i + 2]] = self.d2[i];
                m[[i + 2, i]] = self.d2[i];
            }
        }
        m
    }

    /// Infinity norm, used to scale Lanczos convergence thresholds.
    pub fn norm_inf(&self) -> f64 {
        let n = self.dim();
        let mut best: f64 = 0.0;
        for i in 0..n {
            let mut row = self.d0[i].abs();
            if i >= 1 {
                row += self.d1[i - 1].abs();
            }
            if i + 1 < n {
                row += self.d1[i].abs();
            }
            if i >= 2 {
                row += self.d2[i - 2].abs();
            }
            if i + 2 < n {
                row += self.d2[i].abs();
            }
            best = best.max(row);
        }
        best
    }
}

/// Dimension at or below which dense eigendecomposition is preferred over
/// Lanczos for ground-vector extraction.
pub const DENSE_EIG_DIM: usize = 256;

/// Smallest eigenpair of a symmetric operator given only its matvec.
///
/// Lanczos with full reorthogonalization, restarted on the best Ritz vector.
/// `start` warm-starts the iteration when available.
pub fn lanczos_min_eigpair(
    dim: usize,
    matvec: &dyn Fn(&ArrayView1<f64>, &mut Array1<f64>),
    start: Option<&Array1<f64>>,
    scale: f64,
    tol: f64,
) -> Result<(f64, Array1<f64>)> {
    assert!(dim > 0);
    let mut v0 = match start {
        Some(v) if v.len() == dim => v.to_owned(),
        _ => {
            // deterministic, unlikely to be orthogonal to the ground vector
            Array1::from_shape_fn(dim, |i| 1.0 + 0.37 * ((i as f64 * 0.61803).sin()))
        }
    };
    let nrm = v0.dot(&v0).sqrt();
    v0.mapv_inplace(|x| x / nrm);

    let max_basis = 60.min(dim);
    let max_restarts = 80;
    let threshold = tol * scale.max(1.0);

    let mut best_pair: Option<(f64, Array1<f64>)>;
    for _restart in 0..max_restarts {
        let mut basis: Vec<Array1<f64>> = vec![v0.clone()];
        let mut alphas: Vec<f64> = Vec::new();
        let mut betas: Vec<f64> = Vec::new();
        let mut w = Array1::zeros(dim);

        for j in 0..max_basis {
            matvec(&basis[j].view(), &mut w);
            let alpha = basis[j].dot(&w);
            alphas.push(alpha);
            w.scaled_add(-alpha, &basis[j]);
            if j > 0 {
                let b = betas[j - 1];
                w.scaled_add(-b, &basis[j - 1]);
            }
            // full reorthogonalization, twice for safety
            for _ in 0..2 {
                for q in &basis {
                    let c = q.dot(&w);
                    w.scaled_add(-c, q);
                }
            }
            let beta = w.dot(&w).sqrt();
            if beta < 1e-14 * scale.max(1.0) || j + 1 == max_basis || j + 1 == dim {
                break;
            }
            betas.push(beta);
            basis.push(&w / beta);
        }

        let k = alphas.len();
        let mut t = Array2::zeros((k, k));
        for i in 0..k {
            t[[i, i]] = alphas[i];
            if i + 1 < k {
                t[[i, i + 1]] = betas[i];
                t[[i + 1, i]] = betas[i];
            }
        }
        let te = eigh(&t)?;
        let theta = te.values[0];
        let y = te.vector(0);
        let mut ritz = Array1::zeros(dim);
        for (j, q) in basis.iter().enumerate() {
            ritz.scaled_add(y[j], q);
        }
        let nrm = ritz.dot(&ritz).sqrt();
        ritz.mapv_inplace(|x| x / nrm);

        // residual ||A v - theta v||
        matvec(&ritz.view(), &mut w);
        w.scaled_add(-theta, &ritz);
        let res = w.dot(&w).sqrt();
        best_pair = Some((theta, ritz.clone()));
        if res <= threshold || k >= dim {
            return Ok(best_pair.unwrap());
        }
        v0 = ritz;
    }
    Err(PibiError::Numerical(format!(
        "Lanczos did not converge (dim {dim}, tol {tol:.1e})"
    )))
}

/// Kronecker product of two dense matrices.
pub fn kron(a: &Array2<f64>, b: &Array2<f64>) -> Array2<f64> {
    let (ra, ca) = a.dim();
    let (rb, cb) = b.dim();
    let mut out = Array2::zeros((ra * rb, ca * cb));
    for i in 0..ra {
        for j in 0..ca {
            let aij = a[[i, j]];
            if aij == 0.0 {
                continue;
            }
            for p in 0..rb {
                for q in 0..cb {
                    out[[i * rb + p, j * cb + q]] = aij * b[[p, q]];
                }
            }
        }
    }
    out
}

/// Largest entrywise asymmetry `max |a - a^T|`.
pub fn asymmetry(a: &Array2<f64>) -> f64 {
    let n = a.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((a[[i, j]] - a[[j, i]]).abs());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn eigh_diagonal() {
        let mut a = Array2::zeros((3, 3));
        a[[0, 0]] = 3.0;
        a[[1, 1]] = -1.0;
        a[[2, 2]] = 2.0;
        let e = eigh(&a).unwrap();
        assert_abs_diff_eq!(e.values[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e.values[2], 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e.vector(0)[1].abs(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn cholesky_solve_roundtrip() {
        let a = ndarray::arr2(&[[4.0, 1.0], [1.0, 3.0]]);
        let f = cholesky(&a).unwrap();
        let x = f.solve(&ndarray::arr1(&[1.0, 2.0])).unwrap();
        let r = a.dot(&x);
        assert_abs_diff_eq!(r[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r[1], 2.0, epsilon = 1e-12);
    }

    #[test]
    fn whiten_and_inverse_consistent() {
        let n = 12;
        let mut a = Array2::<f64>::eye(n) * 3.0;
        for i in 0..n {
            for j in 0..n {
                let v = 0.3 * ((i * 5 + j * 3) % 7) as f64 / 7.0;
                a[[i, j]] += v;
                a[[j, i]] += v;
            }
        }
        let f = cholesky(&a).unwrap();
        // whiten(A) must be the identity
        let w = f.whiten(&a);
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(w[[i, j]], want, epsilon = 1e-10);
            }
        }
        let inv = f.inverse().unwrap();
        let prod = a.dot(&inv);
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(prod[[i, j]], want, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn lanczos_matches_dense() {
        let n = 400;
        let mut a = Array2::zeros((n, n));
        for i in 0..n {
            a[[i, i]] = (i as f64 * 0.83).cos() * 3.0;
            if i + 1 < n {
                a[[i, i + 1]] = 1.1;
                a[[i + 1, i]] = 1.1;
            }
        }
        let dense = eigvalsh(&a).unwrap()[0];
        let mv = |x: &ArrayView1<f64>, out: &mut Array1<f64>| {
            *out = a.dot(x);
        };
        let (lam, v) = lanczos_min_eigpair(n, &mv, None, 5.0, 1e-11).unwrap();
        assert_abs_diff_eq!(lam, dense, epsilon = 1e-9);
        let av = a.dot(&v);
        assert_abs_diff_eq!(av.dot(&v), lam, epsilon = 1e-9);
    }

    #[test]
    fn penta_matvec_matches_dense() {
        let mut p = SymPenta::zeros(6);
        for i in 0..6 {
            p.d0[i] = i as f64;
        }
        for i in 0..5 {
            p.d1[i] = 0.5 + i as f64;
        }
        for i in 0..4 {
            p.d2[i] = -1.0 + 0.3 * i as f64;
        }
        let x = Array1::from_shape_fn(6, |i| (i as f64 + 1.0).sin());
        let mut out = Array1::zeros(6);
        p.matvec(&x.view(), &mut out);
        let dense = p.to_dense().dot(&x);
        for i in 0..6 {
            assert_abs_diff_eq!(out[i], dense[i], epsilon = 1e-14);
        }
        assert_abs_diff_eq!(p.expectation(&x.view()), x.dot(&dense), epsilon = 1e-12);
    }
}
