//! Small dense complex linear algebra on top of `nalgebra`.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;

/// `(A + A*)/2`.
pub fn symmetrize(a: &CMat) -> CMat {
    (a + a.adjoint()).scale(0.5)
}

/// Eigenvalues (ascending) of the Hermitian part of `a`.
pub fn hermitian_eigenvalues(a: &CMat) -> Vec<f64> {
    if a.nrows() == 0 {
        return Vec::new();
    }
    let eig = symmetrize(a).symmetric_eigen();
    let mut v: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

pub fn min_hermitian_eigenvalue(a: &CMat) -> f64 {
    hermitian_eigenvalues(a).first().copied().unwrap_or(f64::INFINITY)
}

/// Singular values in descending order.
pub fn singular_values(a: &CMat) -> Vec<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Vec::new();
    }
    let mut v: Vec<f64> = a.clone().svd(false, false).singular_values.iter().copied().collect();
    v.sort_by(|x, y| y.total_cmp(x));
    v
}

/// Number of singular values at least `rel_tol · σ_max`.
pub fn numerical_rank(a: &CMat, rel_tol: f64) -> usize {
    let sv = singular_values(a);
    match sv.first() {
        Some(&smax) if smax > 0.0 => sv.iter().filter(|&&s| s >= rel_tol * smax).count(),
        _ => 0,
    }
}

/// Orthogonal projector onto the complement of the column space of `a`,
/// treating singular values below `rel_tol · σ_max` as zero.
pub fn complement_projector(a: &CMat, rel_tol: f64) -> CMat {
    let m = a.nrows();
    let mut p = CMat::identity(m, m);
    if a.ncols() == 0 || m == 0 {
        return p;
    }
    let svd = a.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    if smax == 0.0 {
        return p;
    }
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s >= rel_tol * smax {
            let col = u.column(k);
            p -= col * col.adjoint();
        }
    }
    p
}

/// Frobenius inner product `Σ a_ij · conj(b_ij)`.
pub fn frob_inner(a: &CMat, b: &CMat) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y.conj()).sum()
}

pub fn frob_norm2(a: &CMat) -> f64 {
    a.iter().map(Complex64::norm_sqr).sum()
}

/// Minimum-norm solution of the Hermitian PSD system `A x = b` by an
/// eigen-decomposition pseudo-inverse with relative cutoff `rel_tol`.
pub fn hermitian_pinv_solve(a: &CMat, b: &nalgebra::DVector<Complex64>, rel_tol: f64) -> nalgebra::DVector<Complex64> {
    let n = a.nrows();
    if n == 0 {
        return nalgebra::DVector::zeros(0);
    }
    // Jacobi scaling keeps the cutoff meaningful for badly scaled bases.
    let d: Vec<f64> = (0..n)
        .map(|i| {
            let v = a[(i, i)].re;
            if v > 0.0 {
                1.0 / v.sqrt()
            } else {
                1.0
            }
        })
        .collect();
    let scaled = CMat::from_fn(n, n, |i, j| a[(i, j)] * d[i] * d[j]);
    let eig = symmetrize(&scaled).symmetric_eigen();
    let lmax = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
    let rhs = nalgebra::DVector::from_fn(n, |i, _| b[i] * d[i]);
    let q = &eig.eigenvectors;
    let qtb = q.adjoint() * rhs;
    let mut y = nalgebra::DVector::zeros(n);
    for k in 0..n {
        let l = eig.eigenvalues[k];
        if l > rel_tol * lmax {
            y[k] = qtb[k] / l;
        }
    }
    let x = q * y;
    nalgebra::DVector::from_fn(n, |i, _| x[i] * d[i])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn eigen_and_rank() {
        let a = CMat::from_row_slice(2, 2, &[c(2.0), Complex64::new(0.0, 1.0), Complex64::new(0.0, -1.0), c(2.0)]);
        let ev = hermitian_eigenvalues(&a);
        assert!((ev[0] - 1.0).abs() < 1e-12 && (ev[1] - 3.0).abs() < 1e-12);
        let r1 = CMat::from_row_slice(2, 2, &[c(1.0), c(2.0), c(2.0), c(4.0)]);
        assert_eq!(numerical_rank(&r1, 1e-10), 1);
        assert_eq!(numerical_rank(&CMat::zeros(3, 2), 1e-10), 0);
    }

    #[test]
    fn projector_onto_complement() {
        let a = CMat::from_row_slice(2, 1, &[c(3.0), c(0.0)]);
        let p = complement_projector(&a, 1e-10);
        assert!((p[(0, 0)].norm()) < 1e-12);
        assert!((p[(1, 1)] - c(1.0)).norm() < 1e-12);
    }

    #[test]
    fn pinv_solve_singular() {
        let a = CMat::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(0.0)]);
        let b = nalgebra::DVector::from_vec(vec![c(2.0), c(0.0)]);
        let x = hermitian_pinv_solve(&a, &b, 1e-12);
        assert!((x[0] - c(2.0)).norm() < 1e-12 && x[1].norm() < 1e-12);
    }
}
