//! Generalized trace `Tr_ρ D = Σ_i ρ(D u_i, u^i)` of a linear map
//! `D : U → V` with respect to a bilinear `ρ : V × U* → W`, and the bound
//! `‖Tr_ρ D‖ ≤ √rank(D) · ‖ρ‖ · ‖D‖_HS`.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exterior::{binomial, NumExt};
use crate::linalg::{self, CMat};

pub const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TraceError {
    #[error("incompatible shapes: {0}")]
    Shape(String),
    #[error("basis change matrix is singular")]
    SingularBasis,
}

/// The pairing `ρ`.
#[derive(Debug, Clone, PartialEq)]
pub enum BilinearMap {
    /// `V = W ⊗ U`, `ρ(w ⊗ u, α) = α(u) w`. Index `(a, i)` of `V` is `a·dim_u + i`.
    Contraction { dim_w: usize, dim_u: usize },
    /// `U = ∧ᵖV*` (dual `∧ᵖV`), `W = ∧ᵖ⁻¹`, `ρ(v, ξ) = v⌟ξ`, with `dim V = dim_v`.
    Interior { dim_v: usize, p: usize },
    /// Arbitrary 3-tensor, `ρ(v, α)_a = Σ t[a][i][j] v_i α_j`.
    Generic { dim_w: usize, dim_v: usize, dim_u: usize, tensor: Vec<Complex64> },
}

impl BilinearMap {
    pub fn dim_u(&self) -> usize {
        match *self {
            BilinearMap::Contraction { dim_u, .. } => dim_u,
            BilinearMap::Interior { dim_v, p } => binomial(dim_v, p),
            BilinearMap::Generic { dim_u, .. } => dim_u,
        }
    }

    pub fn dim_v(&self) -> usize {
        match *self {
            BilinearMap::Contraction { dim_w, dim_u } => dim_w * dim_u,
            BilinearMap::Interior { dim_v, .. } => dim_v,
            BilinearMap::Generic { dim_v, .. } => dim_v,
        }
    }

    pub fn dim_w(&self) -> usize {
        match *self {
            BilinearMap::Contraction { dim_w, .. } => dim_w,
            BilinearMap::Interior { dim_v, p } => {
                if p == 0 {
                    0
                } else {
                    binomial(dim_v, p - 1)
                }
            }
            BilinearMap::Generic { dim_w, .. } => dim_w,
        }
    }

    pub fn apply(&self, v: &[Complex64], alpha: &[Complex64]) -> Vec<Complex64> {
        debug_assert_eq!(v.len(), self.dim_v());
        debug_assert_eq!(alpha.len(), self.dim_u());
        match self {
            BilinearMap::Contraction { dim_w, dim_u } => (0..*dim_w)
                .map(|a| (0..*dim_u).map(|i| v[a * dim_u + i] * alpha[i]).sum())
                .collect(),
            BilinearMap::Interior { dim_v, p } => {
                if *p == 0 {
                    return Vec::new();
                }
                let xi = NumExt::from_dense(*dim_v, *p, alpha);
                NumExt::interior(v, &xi).expect("ranks agree by construction").to_dense()
            }
            BilinearMap::Generic { dim_w, dim_v, dim_u, tensor } => (0..*dim_w)
                .map(|a| {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for i in 0..*dim_v {
                        for j in 0..*dim_u {
                            acc += tensor[(a * dim_v + i) * dim_u + j] * v[i] * alpha[j];
                        }
                    }
                    acc
                })
                .collect(),
        }
    }

    /// Operator norm `max ‖ρ(v, α)‖` over unit `v`, `α`. Exactly 1 for the
    /// built-in pairings; estimated by alternating power iteration on
    /// seeded random starts otherwise.
    pub fn norm(&self) -> f64 {
        match self {
            BilinearMap::Contraction { dim_w, dim_u } => {
                if *dim_w == 0 || *dim_u == 0 {
                    0.0
                } else {
                    1.0
                }
            }
            BilinearMap::Interior { dim_v, p } => {
                if *p == 0 || *p > *dim_v {
                    0.0
                } else {
                    1.0
                }
            }
            BilinearMap::Generic { .. } => self.estimate_norm(0x5eed, 8, 1e-9),
        }
    }

    /// Matrix of `v ↦ ρ(v, α)` (shape `dim_w × dim_v`).
    fn left_matrix(&self, alpha: &[Complex64]) -> CMat {
        let (w, v) = (self.dim_w(), self.dim_v());
        let mut m = CMat::zeros(w, v);
        let mut e = vec![Complex64::new(0.0, 0.0); v];
        for i in 0..v {
            e[i] = Complex64::new(1.0, 0.0);
            for (a, x) in self.apply(&e, alpha).into_iter().enumerate() {
                m[(a, i)] = x;
            }
            e[i] = Complex64::new(0.0, 0.0);
        }
        m
    }

    /// Matrix of `α ↦ ρ(v, α)` (shape `dim_w × dim_u`).
    fn right_matrix(&self, v: &[Complex64]) -> CMat {
        let (w, u) = (self.dim_w(), self.dim_u());
        let mut m = CMat::zeros(w, u);
        let mut e = vec![Complex64::new(0.0, 0.0); u];
        for j in 0..u {
            e[j] = Complex64::new(1.0, 0.0);
            for (a, x) in self.apply(v, &e).into_iter().enumerate() {
                m[(a, j)] = x;
            }
            e[j] = Complex64::new(0.0, 0.0);
        }
        m
    }

    /// Alternating maximization: with one argument fixed, `ρ` is linear in
    /// the other and the best unit argument is a top right singular vector.
    pub fn estimate_norm(&self, seed: u64, restarts: usize, rel_tol: f64) -> f64 {
        let (v_dim, u_dim) = (self.dim_v(), self.dim_u());
        if v_dim == 0 || u_dim == 0 || self.dim_w() == 0 {
            return 0.0;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut best = 0.0f64;
        for _ in 0..restarts {
            let mut alpha = unit(random_vec(&mut rng, u_dim));
            let mut v = vec![Complex64::new(0.0, 0.0); v_dim];
            let mut last = 0.0;
            for _ in 0..500 {
                let (s, right) = top_singular(&self.left_matrix(&alpha));
                v = right;
                let (s2, right) = top_singular(&self.right_matrix(&v));
                alpha = right;
                let val = s.max(s2);
                if (val - last).abs() <= rel_tol * val.max(f64::MIN_POSITIVE) {
                    last = val;
                    break;
                }
                last = val;
            }
            best = best.max(last);
        }
        best
    }
}

fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

fn unit(v: Vec<Complex64>) -> Vec<Complex64> {
    let n = v.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
    if n == 0.0 {
        return v;
    }
    v.into_iter().map(|x| x / n).collect()
}

/// Largest singular value and its right singular vector.
fn top_singular(m: &CMat) -> (f64, Vec<Complex64>) {
    let svd = m.clone().svd(false, true);
    let vt = svd.v_t.expect("right singular vectors requested");
    let (k, s) = svd
        .singular_values
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, s)| if s > acc.1 { (i, s) } else { acc });
    // Row k of Vᵀ* is the conjugate of the right singular vector.
    (s, vt.row(k).iter().map(Complex64::conj).collect())
}

/// `D : U → V` as a `dim V × dim U` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearMap {
    pub matrix: CMat,
}

impl LinearMap {
    pub fn new(matrix: CMat) -> Self {
        Self { matrix }
    }

    pub fn domain_dim(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn codomain_dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `D(u) = w₀ ⊗ u` on `U = ℂᵏ`, into `W ⊗ U` with the contraction layout.
    pub fn tensor_with(w0: &[Complex64], k: usize) -> Self {
        let mut m = CMat::zeros(w0.len() * k, k);
        for (a, w) in w0.iter().enumerate() {
            for i in 0..k {
                m[(a * k + i, i)] = *w;
            }
        }
        Self::new(m)
    }

    pub fn hs_norm(&self) -> f64 {
        linalg::frob_norm2(&self.matrix).sqrt()
    }
}

fn check_shapes(d: &LinearMap, rho: &BilinearMap) -> Result<(), TraceError> {
    if d.domain_dim() != rho.dim_u() || d.codomain_dim() != rho.dim_v() {
        return Err(TraceError::Shape(format!(
            "D is {}x{}, ρ expects V of dim {} and U of dim {}",
            d.codomain_dim(),
            d.domain_dim(),
            rho.dim_v(),
            rho.dim_u()
        )));
    }
    Ok(())
}

/// `Tr_ρ D` in the standard basis and its dual.
pub fn gen_trace(d: &LinearMap, rho: &BilinearMap) -> Result<Vec<Complex64>, TraceError> {
    gen_trace_in_basis(d, rho, &CMat::identity(rho.dim_u(), rho.dim_u()))
}

/// `Tr_ρ D` computed with the basis `u_i = basis.column(i)` and its dual
/// basis `u^i = row i of basis⁻¹`.
pub fn gen_trace_in_basis(d: &LinearMap, rho: &BilinearMap, basis: &CMat) -> Result<Vec<Complex64>, TraceError> {
    check_shapes(d, rho)?;
    let k = rho.dim_u();
    if basis.shape() != (k, k) {
        return Err(TraceError::Shape(format!("basis matrix must be {k}x{k}")));
    }
    let inv = basis.clone().try_inverse().ok_or(TraceError::SingularBasis)?;
    let mut acc = vec![Complex64::new(0.0, 0.0); rho.dim_w()];
    for i in 0..k {
        let u: DVector<Complex64> = basis.column(i).into_owned();
        let du = &d.matrix * u;
        let dual: Vec<Complex64> = inv.row(i).iter().copied().collect();
        for (a, x) in rho.apply(du.as_slice(), &dual).into_iter().enumerate() {
            acc[a] += x;
        }
    }
    Ok(acc)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceBound {
    pub lhs: f64,
    pub rhs: f64,
    pub rank: usize,
}

impl TraceBound {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs * (1.0 + 1e-9)
    }
}

/// `(‖Tr_ρ D‖, √rank(D)·‖ρ‖·‖D‖_HS, rank(D))`.
pub fn trace_bound_check(d: &LinearMap, rho: &BilinearMap) -> Result<TraceBound, TraceError> {
    let tr = gen_trace(d, rho)?;
    let lhs = tr.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
    let rank = linalg::numerical_rank(&d.matrix, RANK_TOL);
    let rhs = (rank as f64).sqrt() * rho.norm() * d.hs_norm();
    Ok(TraceBound { lhs, rhs, rank })
}

/// Random unitary matrix (QR of a random complex matrix).
pub fn random_unitary(rng: &mut impl Rng, n: usize) -> CMat {
    let a = CMat::from_fn(n, n, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    a.qr().q()
}

/// Random `rows × cols` matrix of rank at most `rank`.
pub fn random_low_rank(rng: &mut impl Rng, rows: usize, cols: usize, rank: usize) -> CMat {
    let mut gen = |r: usize, c: usize| CMat::from_fn(r, c, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let left = gen(rows, rank);
    let right = gen(rank, cols);
    left * right
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct FuzzSummary {
    pub trials: usize,
    pub violations: usize,
    /// Largest `lhs / rhs` seen.
    pub max_ratio: f64,
}

/// Seeded random maps `D` of random rank against both built-in pairings,
/// alternating between them.
pub fn fuzz_trace_bound(seed: u64, trials: usize) -> FuzzSummary {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = FuzzSummary { trials, violations: 0, max_ratio: 0.0 };
    for t in 0..trials {
        let rho = if t % 2 == 0 {
            BilinearMap::Contraction { dim_w: rng.gen_range(1..=4), dim_u: rng.gen_range(1..=4) }
        } else {
            let dim_v = rng.gen_range(2..=5);
            BilinearMap::Interior { dim_v, p: rng.gen_range(1..=dim_v) }
        };
        let (rows, cols) = (rho.dim_v(), rho.dim_u());
        let rank = rng.gen_range(1..=rows.min(cols));
        let d = LinearMap::new(random_low_rank(&mut rng, rows, cols, rank));
        let b = trace_bound_check(&d, &rho).expect("shapes match by construction");
        if b.rhs > 0.0 {
            out.max_ratio = out.max_ratio.max(b.lhs / b.rhs);
        }
        if !b.holds() {
            out.violations += 1;
        }
    }
    out
}
