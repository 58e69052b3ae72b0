//! Matrix division `Φh = f` for a `q × p` polynomial matrix `Φ`, from scalar
//! division data by the maximal minors `δ_I` of `Φ`.
//!
//! Given `f = Σ_I δ_I u_I`, each `I` is bordered to a square matrix `Φ_I`
//! by unit rows at the complementary columns, so `det Φ_I = ±δ_I`. Then
//! `h_I = adj(Φ_I)·(u_I; v_I)` satisfies `Φ h_I = ±δ_I u_I` and
//! `h = Σ ±h_I` solves `Φh = f`.

use std::collections::BTreeMap;

use crate::exterior::{comp_sign, binomial, MultiIndex};
use crate::poly::{Poly, PolyError, PolyMatrix};
use crate::quad::{refine_and_estimate, DomainSpec, Psi, QuadError, Refinement, Weight};
use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AdjError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("scalar data does not reproduce f: defect [{}]", .0.join(", "))]
    Defect(Vec<String>),
    #[error("no single minor divides every component of f; supply u explicitly")]
    NoSingleDivisor,
    #[error("partial solution for {0} fails Φh_I = ±δ_I u_I")]
    PartialIdentity(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BorderedMatrix {
    pub base: PolyMatrix,
    pub index: MultiIndex,
    pub full: PolyMatrix,
    /// Sign of the permutation `(I, complement)`; `det full = sign·δ_I`.
    pub sign: i32,
}

pub fn build_bordered(phi: &PolyMatrix, index: &MultiIndex) -> Result<BorderedMatrix, AdjError> {
    let (q, p) = (phi.rows(), phi.cols());
    if q > p {
        return Err(AdjError::Shape(format!("Φ is {q}x{p}, need q <= p")));
    }
    if index.r() != p || index.len() != q {
        return Err(AdjError::Shape(format!("index {index} is not a {q}-subset of 1..{p}")));
    }
    let (sign, comp) = comp_sign(index, p);
    let mut full = PolyMatrix::zeros(p, p, phi.nvars());
    for i in 0..q {
        for j in 0..p {
            full.set(i, j, phi.get(i, j).clone());
        }
    }
    for (k, &j) in comp.indices().iter().enumerate() {
        full.set(q + k, j - 1, Poly::one(phi.nvars()));
    }
    Ok(BorderedMatrix { base: phi.clone(), index: index.clone(), full, sign })
}

/// `u_I` (length `q`) and the free fill `v_I` (length `p − q`, zero when
/// absent), per `q`-subset `I`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScalarDivisionData {
    pub u: BTreeMap<MultiIndex, Vec<Poly>>,
    pub v: BTreeMap<MultiIndex, Vec<Poly>>,
}

fn check_f(phi: &PolyMatrix, f: &[Poly]) -> Result<(), AdjError> {
    if f.len() != phi.rows() {
        return Err(AdjError::Shape(format!("f has {} components, Φ has {} rows", f.len(), phi.rows())));
    }
    if f.iter().any(|x| x.nvars() != phi.nvars()) {
        return Err(AdjError::Shape("f and Φ have different variables".into()));
    }
    Ok(())
}

/// `Σ_I δ_I u_I − f`.
pub fn scalar_defect(phi: &PolyMatrix, data: &ScalarDivisionData, f: &[Poly]) -> Result<Vec<Poly>, AdjError> {
    check_f(phi, f)?;
    let minors = phi.minors()?;
    let mut acc: Vec<Poly> = f.iter().map(|x| -x).collect();
    for (idx, u) in &data.u {
        let delta = minors
            .get(idx)
            .ok_or_else(|| AdjError::Shape(format!("{idx} is not a {}-subset of 1..{}", phi.rows(), phi.cols())))?;
        if u.len() != phi.rows() {
            return Err(AdjError::Shape(format!("u for {idx} has {} entries, expected {}", u.len(), phi.rows())));
        }
        for (a, ui) in acc.iter_mut().zip(u) {
            *a = &*a + &(delta * ui);
        }
    }
    Ok(acc)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdjugateSolution {
    pub h: Vec<Poly>,
    /// `h_I` before the signed sum.
    pub partials: BTreeMap<MultiIndex, Vec<Poly>>,
}

pub fn assemble_solution(phi: &PolyMatrix, data: &ScalarDivisionData, f: &[Poly]) -> Result<AdjugateSolution, AdjError> {
    let defect = scalar_defect(phi, data, f)?;
    if defect.iter().any(|d| !d.is_zero()) {
        return Err(AdjError::Defect(defect.iter().map(|d| d.to_string()).collect()));
    }
    let (q, p, n) = (phi.rows(), phi.cols(), phi.nvars());
    let minors = phi.minors()?;
    let mut h = vec![Poly::zero(n); p];
    let mut partials = BTreeMap::new();
    for (idx, u) in &data.u {
        if u.iter().all(Poly::is_zero) {
            continue;
        }
        let b = build_bordered(phi, idx)?;
        let v = data.v.get(idx).cloned().unwrap_or_else(|| vec![Poly::zero(n); p - q]);
        if v.len() != p - q {
            return Err(AdjError::Shape(format!("v for {idx} has {} entries, expected {}", v.len(), p - q)));
        }
        let ut: Vec<Poly> = u.iter().chain(&v).cloned().collect();
        let hi = b.full.adjugate()?.mul_vec(&ut)?;
        let delta = &minors[idx];
        let lhs = phi.mul_vec(&hi)?;
        let sign = Poly::constant(n, (b.sign as i64).into());
        if lhs.iter().zip(u).any(|(l, ui)| !(l - &(&(&sign * delta) * ui)).is_zero()) {
            return Err(AdjError::PartialIdentity(idx.to_string()));
        }
        for (acc, x) in h.iter_mut().zip(&hi) {
            *acc = if b.sign > 0 { &*acc + x } else { &*acc - x };
        }
        partials.insert(idx.clone(), hi);
    }
    Ok(AdjugateSolution { h, partials })
}

/// `u_I = f / δ_I` for the first `I` (lexicographic) whose minor divides
/// every component exactly.
pub fn scalar_backend_single(delta: &BTreeMap<MultiIndex, Poly>, f: &[Poly]) -> Result<ScalarDivisionData, AdjError> {
    for (idx, d) in delta {
        if d.is_zero() {
            continue;
        }
        let quotients: Option<Vec<Poly>> = f.iter().map(|fi| fi.exact_div(d)).collect();
        if let Some(u) = quotients {
            let mut data = ScalarDivisionData::default();
            data.u.insert(idx.clone(), u);
            return Ok(data);
        }
    }
    Err(AdjError::NoSingleDivisor)
}

/// `β = min{n, C(p, q) − 1}·α + 1`.
pub fn integrability_exponent(n: usize, p: usize, q: usize, alpha: f64) -> f64 {
    (n.min(binomial(p, q).saturating_sub(1))) as f64 * alpha + 1.0
}

struct MinorWeight {
    minors: Vec<crate::poly::CompiledPoly>,
    beta: f64,
    psi: Psi,
}

impl Weight for MinorWeight {
    fn eval(&self, z: &[Complex64]) -> f64 {
        let s: f64 = self.minors.iter().map(|m| m.eval(z).norm_sqr()).sum();
        s.powf(-self.beta) * (-self.psi.eval(z)).exp()
    }
}

/// Refinement of `∫ |f|² (Σ|δ_I|²)^{−β} e^{−ψ} dV`.
pub fn integrability_check(
    phi: &PolyMatrix,
    f: &[Poly],
    psi: &Psi,
    dom: &DomainSpec,
    alpha: f64,
    resolution: (usize, usize),
) -> Result<Refinement, AdjError> {
    check_f(phi, f)?;
    if alpha.is_nan() || alpha <= 1.0 {
        return Err(AdjError::Shape(format!("alpha = {alpha} must exceed 1")));
    }
    let minors = phi.minors()?;
    let w = MinorWeight {
        minors: minors.values().map(Poly::compile).collect(),
        beta: integrability_exponent(phi.nvars(), phi.cols(), phi.rows(), alpha),
        psi: psi.clone(),
    };
    Ok(refine_and_estimate(f, &w, dom, resolution)?)
}
