//! Finite-difference checks of the pointwise derivative, complex Hessian and
//! second-fundamental-form identities for `φ = log‖Φ‖²` under flat metrics.
//!
//! With `B_α = ∂_α Φ` and `⟨A, B⟩ = Σ A_ij · conj(B_ij)`:
//!
//! ```text
//! ∂_α φ      = e^{−φ} ⟨B_α, Φ⟩
//! ∂_α∂_β̄ φ  = e^{−φ} ( ⟨B_α, B_β⟩ − e^{−φ} ⟨B_α, Φ⟩⟨Φ, B_β⟩ )
//!            = e^{−φ} ⟨B⊥_α, B⊥_β⟩
//! ```
//!
//! where `B⊥_α` is the Frobenius-orthogonal projection of `B_α` away from `Φ`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exterior::NumExt;
use crate::koszul::{boundary_norm_multiplicity, numeric_boundary, KoszulError, KoszulSection};
use crate::linalg::{self, CMat};
use crate::poly::{PolyError, PolyMatrix};

pub const DEFAULT_STEP: f64 = 1e-3;
/// Relative singular-value cutoff for Hessian ranks.
pub const RANK_TOL: f64 = 1e-9;
/// Relative distance to the zero locus below which points are rejected.
pub const ZERO_LOCUS_TOL: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IdentError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Koszul(#[from] KoszulError),
    #[error("Φ vanishes at the point")]
    Singular,
    #[error("step {0} outside (0, 1e-2]")]
    BadStep(f64),
    #[error("family must be non-zero")]
    ZeroFamily,
}

/// Holomorphic matrix-valued map `z ↦ Φ(z)` with polynomial entries.
#[derive(Debug, Clone)]
pub struct HoloFamily {
    n: usize,
    matrix: PolyMatrix,
    partials: Vec<PolyMatrix>,
}

impl HoloFamily {
    pub fn new(matrix: PolyMatrix) -> Result<Self, IdentError> {
        if matrix.is_zero() {
            return Err(IdentError::ZeroFamily);
        }
        let n = matrix.nvars();
        let partials = (0..n).map(|a| matrix.derivative(a)).collect();
        Ok(Self { n, matrix, partials })
    }

    /// The `1 × r` row `(g_1 … g_r)` of a Koszul section.
    pub fn from_section(sec: &KoszulSection) -> Result<Self, IdentError> {
        let row = PolyMatrix::from_rows(vec![sec.generators().to_vec()])?;
        Self::new(row)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &PolyMatrix {
        &self.matrix
    }

    fn phi_norm2(&self, z: &[Complex64]) -> Result<f64, IdentError> {
        Ok(linalg::frob_norm2(&self.matrix.eval(z)?))
    }

    /// `φ(z) = log‖Φ(z)‖²`.
    pub fn log_norm2(&self, z: &[Complex64]) -> Result<f64, IdentError> {
        Ok(self.phi_norm2(z)?.ln())
    }

    pub fn sff(&self, z: &[Complex64]) -> Result<SffData, IdentError> {
        let phi = self.matrix.eval(z)?;
        let n2 = linalg::frob_norm2(&phi);
        if n2 == 0.0 {
            return Err(IdentError::Singular);
        }
        let b: Vec<CMat> = self.partials.iter().map(|m| m.eval(z)).collect::<Result<_, _>>()?;
        let bperp = b
            .iter()
            .map(|ba| ba - &phi * (linalg::frob_inner(ba, &phi) / n2))
            .collect();
        Ok(SffData { z: z.to_vec(), phi, b, bperp })
    }

    /// `e^{−φ} ⟨B_α, Φ⟩` for each `α`.
    pub fn analytic_gradient(&self, z: &[Complex64]) -> Result<Vec<Complex64>, IdentError> {
        let d = self.sff(z)?;
        let n2 = linalg::frob_norm2(&d.phi);
        Ok(d.b.iter().map(|ba| linalg::frob_inner(ba, &d.phi) / n2).collect())
    }

    /// Mixed Hessian `H[α][β] = ∂_α∂_β̄ φ` from the closed form.
    pub fn analytic_hessian(&self, z: &[Complex64]) -> Result<CMat, IdentError> {
        let d = self.sff(z)?;
        Ok(d.hessian_from_derivatives())
    }

    fn fd_point(z: &[Complex64], dirs: &[(usize, Complex64)]) -> Vec<Complex64> {
        let mut w = z.to_vec();
        for &(a, dz) in dirs {
            w[a] += dz;
        }
        w
    }

    /// Central-difference holomorphic gradient `½(∂_x − i∂_y)φ`.
    pub fn fd_gradient(&self, z: &[Complex64], h: f64) -> Result<Vec<Complex64>, IdentError> {
        (0..self.n)
            .map(|a| {
                let f = |dz: Complex64| self.log_norm2(&Self::fd_point(z, &[(a, dz)]));
                let dx = (f(Complex64::new(h, 0.0))? - f(Complex64::new(-h, 0.0))?) / (2.0 * h);
                let dy = (f(Complex64::new(0.0, h))? - f(Complex64::new(0.0, -h))?) / (2.0 * h);
                Ok(Complex64::new(0.5 * dx, -0.5 * dy))
            })
            .collect()
    }

    /// Mixed Hessian `¼[φ_{xαxβ} + φ_{yαyβ} + i(φ_{xαyβ} − φ_{yαxβ})]`. Mixed
    /// real second derivatives use the 4-point stencil
    /// `[f(+u+v) − f(+u−v) − f(−u+v) + f(−u−v)] / 4h²`, pure ones the
    /// 3-point `[f(+u) − 2f(0) + f(−u)] / h²`.
    pub fn fd_hessian(&self, z: &[Complex64], h: f64) -> Result<CMat, IdentError> {
        let n = self.n;
        let dir = |a: usize, imag: bool, s: f64| (a, if imag { Complex64::new(0.0, s * h) } else { Complex64::new(s * h, 0.0) });
        let d2 = |a: usize, ia: bool, b: usize, ib: bool| -> Result<f64, IdentError> {
            if a == b && ia == ib {
                let f = |sa: f64| self.log_norm2(&Self::fd_point(z, &[dir(a, ia, sa)]));
                return Ok((f(1.0)? - 2.0 * self.log_norm2(z)? + f(-1.0)?) / (h * h));
            }
            let f = |sa: f64, sb: f64| self.log_norm2(&Self::fd_point(z, &[dir(a, ia, sa), dir(b, ib, sb)]));
            Ok((f(1.0, 1.0)? - f(1.0, -1.0)? - f(-1.0, 1.0)? + f(-1.0, -1.0)?) / (4.0 * h * h))
        };
        let mut hess = CMat::zeros(n, n);
        for a in 0..n {
            for b in 0..n {
                let xx = d2(a, false, b, false)?;
                let yy = d2(a, true, b, true)?;
                let xy = d2(a, false, b, true)?;
                let yx = d2(a, true, b, false)?;
                hess[(a, b)] = Complex64::new(0.25 * (xx + yy), 0.25 * (xy - yx));
            }
        }
        Ok(hess)
    }
}

/// Derivative data of `Φ` at a point.
#[derive(Debug, Clone)]
pub struct SffData {
    pub z: Vec<Complex64>,
    pub phi: CMat,
    /// `B_α = ∂_α Φ(z)`.
    pub b: Vec<CMat>,
    /// `B_α` projected orthogonally to `Φ(z)`.
    pub bperp: Vec<CMat>,
}

impl SffData {
    pub fn hessian_from_derivatives(&self) -> CMat {
        let n = self.b.len();
        let n2 = linalg::frob_norm2(&self.phi);
        let inner_phi: Vec<Complex64> = self.b.iter().map(|ba| linalg::frob_inner(ba, &self.phi)).collect();
        CMat::from_fn(n, n, |a, b| {
            (linalg::frob_inner(&self.b[a], &self.b[b]) - inner_phi[a] * inner_phi[b].conj() / n2) / n2
        })
    }

    /// `e^{−φ} ⟨B⊥_α, B⊥_β⟩`.
    pub fn hessian_from_projection(&self) -> CMat {
        let n = self.bperp.len();
        let n2 = linalg::frob_norm2(&self.phi);
        CMat::from_fn(n, n, |a, b| linalg::frob_inner(&self.bperp[a], &self.bperp[b]) / n2)
    }

    /// Largest `|⟨B⊥_α, Φ⟩| / ‖Φ‖²`.
    pub fn orthogonality_defect(&self) -> f64 {
        let n2 = linalg::frob_norm2(&self.phi);
        self.bperp.iter().map(|bp| linalg::frob_inner(bp, &self.phi).norm() / n2).fold(0.0, f64::max)
    }
}

fn check_step(step: f64) -> Result<(), IdentError> {
    if !(step > 0.0 && step <= 1e-2) {
        return Err(IdentError::BadStep(step));
    }
    Ok(())
}

fn max_abs(a: &CMat, b: &CMat) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Worst `|FD ∂_α φ − e^{−φ}⟨B_α, Φ⟩|` over `α`.
pub fn grad_phi_check(fam: &HoloFamily, z: &[Complex64], step: f64) -> Result<f64, IdentError> {
    check_step(step)?;
    let exact = fam.analytic_gradient(z)?;
    let fd = fam.fd_gradient(z, step)?;
    Ok(exact.iter().zip(&fd).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HessianCheck {
    /// Worst entrywise `|FD − closed form|`.
    pub fd_error: f64,
    /// Worst entrywise gap between the closed form and the projected
    /// second-fundamental-form Gram matrix.
    pub sff_error: f64,
}

impl HessianCheck {
    pub fn sff_ok(&self) -> bool {
        self.sff_error <= 1e-8
    }
}

pub fn hessian_phi_check(fam: &HoloFamily, z: &[Complex64], step: f64) -> Result<HessianCheck, IdentError> {
    check_step(step)?;
    let d = fam.sff(z)?;
    let exact = d.hessian_from_derivatives();
    let fd = fam.fd_hessian(z, step)?;
    Ok(HessianCheck { fd_error: max_abs(&exact, &fd), sff_error: max_abs(&exact, &d.hessian_from_projection()) })
}

#[derive(Debug, Clone, PartialEq)]
pub struct KoszulSffReport {
    /// Worst `‖B_Φ(∂_α)ξ − B_s(∂_α)⌟ξ‖` over `α` and unit random `ξ ∈ ∧ᵖ`.
    pub err_interleave: f64,
    /// Worst `|‖B_Φ(∂_α)‖²_HS − m‖B_s(∂_α)‖²| / max(1, ‖B_s(∂_α)‖²)` with
    /// `m = C(r−1, p−1)`.
    pub err_norm: f64,
    /// `‖B_Φ(∂_α)‖²_HS` per `α`.
    pub bphi_norm2: Vec<f64>,
    /// `‖B_s(∂_α)‖²` per `α`.
    pub bs_norm2: Vec<f64>,
}

/// `B_s(∂_α) = (∂_α g)⊥` at `z`, orthogonal to `g(z)`.
pub fn section_sff(sec: &KoszulSection, z: &[Complex64]) -> Result<(Vec<Complex64>, Vec<Vec<Complex64>>), IdentError> {
    let g_at: Vec<Complex64> = sec.generators().iter().map(|p| p.eval(z)).collect::<Result<_, _>>()?;
    let s2: f64 = g_at.iter().map(Complex64::norm_sqr).sum();
    if s2 == 0.0 {
        return Err(KoszulError::ZeroLocus(0.0).into());
    }
    let bs = (0..sec.n())
        .map(|a| {
            let dg: Vec<Complex64> = sec
                .generators()
                .iter()
                .map(|p| p.derivative(a).eval(z))
                .collect::<Result<_, _>>()?;
            let c: Complex64 = dg.iter().zip(&g_at).map(|(x, y)| x * y.conj()).sum::<Complex64>() / s2;
            Ok(dg.iter().zip(&g_at).map(|(x, y)| x - c * y).collect())
        })
        .collect::<Result<Vec<Vec<Complex64>>, IdentError>>()?;
    Ok((g_at, bs))
}

pub fn koszul_sff_check(sec: &KoszulSection, p: usize, z: &[Complex64]) -> Result<KoszulSffReport, IdentError> {
    let (g_at, bs) = section_sff(sec, z)?;
    let bmat = sec.boundary_matrix(p)?;
    let phi = numeric_boundary(&g_at, p);
    let phi2 = linalg::frob_norm2(&phi);
    let r = sec.r();
    let mult = boundary_norm_multiplicity(r, p) as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(0x51ff);
    let mut report = KoszulSffReport { err_interleave: 0.0, err_norm: 0.0, bphi_norm2: Vec::new(), bs_norm2: Vec::new() };
    for (a, bs_a) in bs.iter().enumerate() {
        let d = bmat.derivative(a).eval(z)?;
        let bphi = &d - &phi * (linalg::frob_inner(&d, &phi) / phi2);
        for _ in 0..4 {
            let dim = bphi.ncols();
            let mut xi: Vec<Complex64> =
                (0..dim).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let nrm = xi.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
            xi.iter_mut().for_each(|x| *x /= nrm);
            let lhs = &bphi * nalgebra::DVector::from_vec(xi.clone());
            let rhs = NumExt::interior(bs_a, &NumExt::from_dense(r, p, &xi)).map_err(KoszulError::from)?.to_dense();
            let err = lhs.iter().zip(&rhs).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
            report.err_interleave = report.err_interleave.max(err);
        }
        let nphi = linalg::frob_norm2(&bphi);
        let ns: f64 = bs_a.iter().map(Complex64::norm_sqr).sum();
        report.err_norm = report.err_norm.max((nphi - mult * ns).abs() / ns.max(1.0));
        report.bphi_norm2.push(nphi);
        report.bs_norm2.push(ns);
    }
    Ok(report)
}

/// Closed-form Hessian of `log|s|²` at `z`.
pub fn koszul_hessian(sec: &KoszulSection, z: &[Complex64]) -> Result<CMat, IdentError> {
    HoloFamily::from_section(sec)?.analytic_hessian(z)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankBoundReport {
    /// `max (rank − min{n, r−1})` over accepted points.
    pub worst_excess: i64,
    pub ranks: Vec<usize>,
    /// Points rejected as too close to the zero locus.
    pub skipped: usize,
}

/// Numerical rank of the Hessian of `log|s|²` against `min{n, r−1}`.
pub fn rank_bound_check(sec: &KoszulSection, points: &[Vec<Complex64>]) -> Result<RankBoundReport, IdentError> {
    let bound = sec.n().min(sec.r().saturating_sub(1)) as i64;
    let fam = HoloFamily::from_section(sec)?;
    let norms: Vec<f64> = points
        .iter()
        .map(|z| fam.phi_norm2(z).map(f64::sqrt))
        .collect::<Result<_, _>>()?;
    let sup = norms.iter().copied().fold(0.0, f64::max);
    let mut report = RankBoundReport { worst_excess: i64::MIN, ranks: Vec::new(), skipped: 0 };
    for (z, &nrm) in points.iter().zip(&norms) {
        if nrm == 0.0 || nrm < ZERO_LOCUS_TOL * sup {
            report.skipped += 1;
            continue;
        }
        let h = fam.analytic_hessian(z)?;
        let rank = linalg::numerical_rank(&h, RANK_TOL);
        report.ranks.push(rank);
        report.worst_excess = report.worst_excess.max(rank as i64 - bound);
    }
    if report.ranks.is_empty() {
        report.worst_excess = 0;
    }
    Ok(report)
}

/// Flat-case check of `Σ_k a_k* H a_k = e^{−ψ} Σ_k ‖B_s(a_k)‖²` with
/// `e^{−ψ} = |s|^{−2}`, for the columns `a_k` of `coeffs` (`n × m`).
/// Returns the absolute gap relative to `max(1, rhs)`.
pub fn koszul_quadratic_form_check(sec: &KoszulSection, z: &[Complex64], coeffs: &CMat) -> Result<f64, IdentError> {
    let (g_at, bs) = section_sff(sec, z)?;
    let s2: f64 = g_at.iter().map(Complex64::norm_sqr).sum();
    let h = koszul_hessian(sec, z)?;
    let mut lhs = 0.0;
    let mut rhs = 0.0;
    for col in coeffs.column_iter() {
        let a = col.into_owned();
        lhs += (a.adjoint() * &h.transpose() * &a)[(0, 0)].re;
        let mut v = vec![Complex64::new(0.0, 0.0); sec.r()];
        for (alpha, bs_a) in bs.iter().enumerate() {
            for (vi, b) in v.iter_mut().zip(bs_a) {
                *vi += a[alpha] * b;
            }
        }
        rhs += v.iter().map(Complex64::norm_sqr).sum::<f64>() / s2;
    }
    Ok((lhs - rhs).abs() / rhs.max(1.0))
}

/// Smallest eigenvalue of the closed-form Hessian relative to its trace.
pub fn hessian_psd_margin(fam: &HoloFamily, z: &[Complex64]) -> Result<(f64, f64), IdentError> {
    let h = fam.analytic_hessian(z)?;
    let tr: f64 = (0..h.nrows()).map(|i| h[(i, i)].re).sum();
    Ok((linalg::min_hermitian_eigenvalue(&h), tr))
}
