//! Koszul complex `∧ʳ → ∧ʳ⁻¹ → … → ∧⁰ → 0` with boundary `d_p = g⌟` for
//! polynomial generators `g = (g_1, …, g_r)`, under the flat fiber metric.

use num_complex::Complex64;

use crate::exterior::{binomial, ExtElem, ExteriorError, MultiIndex, NumExt, SymExt};
use crate::linalg::{self, CMat};
use crate::poly::{Poly, PolyError, PolyMatrix};

/// Tolerance on `‖ΨΦ‖_max` for accepting a numeric pair as a complex.
pub const COMPLEX_TOL: f64 = 1e-8;
/// Relative singular-value cutoff for the projector in [`exactness_score_single`].
pub const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum KoszulError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Exterior(#[from] ExteriorError),
    #[error("degree {p} outside 1..={r}")]
    DegreeOutOfRange { p: usize, r: usize },
    #[error("generators must be nonempty and share nvars = {0}")]
    Generators(usize),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("not a complex: max |ΨΦ| entry = {0:e}")]
    NotComplex(f64),
    #[error("the zero matrix has no single-map exactness score")]
    ZeroMatrix,
    #[error("point lies on the zero locus of s (|s|² = {0:e})")]
    ZeroLocus(f64),
    #[error("not a cycle at this point: |g⌟f| = {defect:e} vs |f| = {norm:e}")]
    NotCycleAtPoint { defect: f64, norm: f64 },
}

/// The section `s = Σ g_i e_i*` over `ℂⁿ`.
#[derive(Debug, Clone, PartialEq)]
pub struct KoszulSection {
    n: usize,
    g: Vec<Poly>,
}

impl KoszulSection {
    pub fn new(g: Vec<Poly>) -> Result<Self, KoszulError> {
        let n = g.first().map(Poly::nvars).ok_or(KoszulError::Generators(0))?;
        if g.iter().any(|p| p.nvars() != n) {
            return Err(KoszulError::Generators(n));
        }
        Ok(Self { n, g })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.g.len()
    }

    pub fn generators(&self) -> &[Poly] {
        &self.g
    }

    fn check_degree(&self, p: usize) -> Result<(), KoszulError> {
        if p == 0 || p > self.r() {
            return Err(KoszulError::DegreeOutOfRange { p, r: self.r() });
        }
        Ok(())
    }

    /// Matrix of `d_p = g⌟ : ∧ᵖ → ∧ᵖ⁻¹` in the lexicographic multi-index
    /// bases, of shape `C(r, p−1) × C(r, p)`.
    pub fn boundary_matrix(&self, p: usize) -> Result<PolyMatrix, KoszulError> {
        self.check_degree(p)?;
        let r = self.r();
        let rows = MultiIndex::all(r, p - 1);
        let cols = MultiIndex::all(r, p);
        let mut m = PolyMatrix::zeros(rows.len(), cols.len(), self.n);
        for (j, idx) in cols.iter().enumerate() {
            let image = SymExt::interior(&self.g, &SymExt::basis(idx.clone(), Poly::one(self.n)))?;
            for (i, row) in rows.iter().enumerate() {
                if let Some(c) = image.get(row) {
                    m.set(i, j, c.clone());
                }
            }
        }
        Ok(m)
    }

    /// `g⌟f`, exactly.
    pub fn cycle_defect(&self, p: usize, f: &SymExt) -> Result<SymExt, KoszulError> {
        self.check_degree(p)?;
        if f.degree() != p as isize - 1 {
            return Err(KoszulError::Shape(format!("target has degree {}, expected {}", f.degree(), p - 1)));
        }
        Ok(SymExt::interior(&self.g, f)?)
    }

    /// Whether `g⌟f = 0` exactly; vacuous for `p = 1`.
    pub fn is_cycle(&self, p: usize, f: &SymExt) -> Result<bool, KoszulError> {
        Ok(self.cycle_defect(p, f)?.is_zero())
    }

    pub fn frame(&self, z: &[Complex64]) -> Result<PointFrame, KoszulError> {
        let g_at = self.g.iter().map(|p| p.eval(z)).collect::<Result<Vec<_>, _>>()?;
        Ok(PointFrame::new(z.to_vec(), g_at))
    }
}

/// Pointwise data of the section at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointFrame {
    pub z: Vec<Complex64>,
    pub g_at: Vec<Complex64>,
    pub s_norm2: f64,
}

impl PointFrame {
    pub fn new(z: Vec<Complex64>, g_at: Vec<Complex64>) -> Self {
        let s_norm2 = g_at.iter().map(Complex64::norm_sqr).sum();
        Self { z, g_at, s_norm2 }
    }

    pub fn r(&self) -> usize {
        self.g_at.len()
    }

    /// `θ = ḡ` under the flat metric.
    pub fn theta(&self) -> Vec<Complex64> {
        self.g_at.iter().map(Complex64::conj).collect()
    }
}

/// Numeric `d_p` for a covector `s`, for any `p` (including the trivial
/// ends `p = 0` and `p = r + 1`, which give empty matrices).
pub fn numeric_boundary(s: &[Complex64], p: usize) -> CMat {
    let r = s.len();
    let rows = if p == 0 { Vec::new() } else { MultiIndex::all(r, p - 1) };
    let cols = MultiIndex::all(r, p);
    let mut m = CMat::zeros(rows.len(), cols.len());
    if p == 0 {
        return m;
    }
    for (j, idx) in cols.iter().enumerate() {
        for (a, &i) in idx.indices().iter().enumerate() {
            let target = idx.remove_at(a);
            let row = rows.binary_search(&target).expect("face of a basis index is a basis index");
            let v = s[i - 1];
            m[(row, j)] += if a % 2 == 0 { v } else { -v };
        }
    }
    m
}

/// The pair `(Φ, Ψ) = (d_{k+1}, d_k)` around `∧ᵏ`, `0 ≤ k ≤ r`.
pub fn koszul_pair(s: &[Complex64], k: usize) -> (CMat, CMat) {
    (numeric_boundary(s, k + 1), numeric_boundary(s, k))
}

/// Smallest eigenvalue of `Ψ*Ψ + ΦΦ*` on the middle space of
/// `E —Φ→ E′ —Ψ→ E″`; positive exactly when the pair is exact at `E′`.
pub fn exactness_score(phi: &CMat, psi: &CMat) -> Result<f64, KoszulError> {
    let mid = phi.nrows();
    if psi.ncols() != mid {
        return Err(KoszulError::Shape(format!(
            "Φ is {}x{}, Ψ is {}x{}",
            phi.nrows(),
            phi.ncols(),
            psi.nrows(),
            psi.ncols()
        )));
    }
    if mid == 0 {
        return Err(KoszulError::Shape("middle space is zero-dimensional".into()));
    }
    if psi.nrows() > 0 && phi.ncols() > 0 {
        let prod = psi * phi;
        let worst = prod.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if worst > COMPLEX_TOL {
            return Err(KoszulError::NotComplex(worst));
        }
    }
    let mut m = CMat::zeros(mid, mid);
    if psi.nrows() > 0 {
        m += psi.adjoint() * psi;
    }
    if phi.ncols() > 0 {
        m += phi * phi.adjoint();
    }
    Ok(linalg::min_hermitian_eigenvalue(&m).max(0.0))
}

/// Smallest eigenvalue of `P_⊥ + ΦΦ*`, with `P_⊥` the projector onto the
/// orthogonal complement of the image of `Φ`.
pub fn exactness_score_single(phi: &CMat) -> Result<f64, KoszulError> {
    if phi.iter().all(|c| c.norm() == 0.0) {
        return Err(KoszulError::ZeroMatrix);
    }
    let m = linalg::complement_projector(phi, RANK_TOL) + phi * phi.adjoint();
    Ok(linalg::min_hermitian_eigenvalue(&m))
}

/// Minimal pointwise solution `h = θ∧f / |s|²` of `g⌟h = f` for a numeric
/// cycle `f` of degree `p − 1`.
pub fn pointwise_lift(frame: &PointFrame, p: usize, f: &NumExt) -> Result<NumExt, KoszulError> {
    let r = frame.r();
    if p == 0 || p > r {
        return Err(KoszulError::DegreeOutOfRange { p, r });
    }
    if f.degree() != p as isize - 1 || f.r() != r {
        return Err(KoszulError::Shape(format!(
            "target of degree {} and rank {}, expected degree {} and rank {r}",
            f.degree(),
            f.r(),
            p - 1
        )));
    }
    if frame.s_norm2 <= 0.0 {
        return Err(KoszulError::ZeroLocus(frame.s_norm2));
    }
    let fnorm = f.norm2().sqrt();
    let defect = NumExt::interior(&frame.g_at, f)?.norm2().sqrt();
    if defect > 1e-9 * fnorm {
        return Err(KoszulError::NotCycleAtPoint { defect, norm: fnorm });
    }
    let theta = NumExt::from_vector(&frame.theta());
    Ok(theta.wedge(f)?.scale(&Complex64::new(1.0 / frame.s_norm2, 0.0)))
}

/// Multiplicity `m` in `‖d_p‖²_HS = m·|s|²`: each basis `p`-vector
/// containing a given index contributes that `|g_i|²` once, so
/// `m = C(r−1, p−1)`.
pub fn boundary_norm_multiplicity(r: usize, p: usize) -> usize {
    if p == 0 || r == 0 {
        return 0;
    }
    binomial(r - 1, p - 1)
}

/// Brute-force `Σ_I ‖g⌟e_I‖²` against `C(r−1, p−1)·|s|²`.
pub fn hom_norm2_check(frame: &PointFrame, p: usize) -> Result<(f64, f64), KoszulError> {
    let r = frame.r();
    if p == 0 || p > r {
        return Err(KoszulError::DegreeOutOfRange { p, r });
    }
    let norm2 = MultiIndex::all(r, p)
        .into_iter()
        .map(|idx| {
            NumExt::interior(&frame.g_at, &ExtElem::basis(idx, Complex64::new(1.0, 0.0))).map(|e| e.norm2())
        })
        .sum::<Result<f64, _>>()?;
    Ok((norm2, boundary_norm_multiplicity(r, p) as f64 * frame.s_norm2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse;

    fn sec(gs: &[&str], n: usize) -> KoszulSection {
        KoszulSection::new(gs.iter().map(|s| parse(s, n).unwrap()).collect()).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn mi(r: usize, v: &[usize]) -> MultiIndex {
        MultiIndex::new(r, v.to_vec()).unwrap()
    }

    #[test]
    fn boundary_examples() {
        let s = sec(&["z1", "z2"], 2);
        let d1 = s.boundary_matrix(1).unwrap();
        assert_eq!((d1.rows(), d1.cols()), (1, 2));
        assert_eq!(d1.get(0, 0), &parse("z1", 2).unwrap());
        assert_eq!(d1.get(0, 1), &parse("z2", 2).unwrap());
        let d2 = s.boundary_matrix(2).unwrap();
        assert_eq!((d2.rows(), d2.cols()), (2, 1));
        assert_eq!(d2.get(0, 0), &parse("-z2", 2).unwrap());
        assert_eq!(d2.get(1, 0), &parse("z1", 2).unwrap());
        assert!(d1.mul(&d2).unwrap().is_zero());

        let s = sec(&["z1", "z2^2", "z1*z2 + 1"], 2);
        let d2 = s.boundary_matrix(2).unwrap();
        let d3 = s.boundary_matrix(3).unwrap();
        assert_eq!((d2.rows(), d2.cols()), (3, 3));
        assert!(d2.mul(&d3).unwrap().is_zero());
        assert!(matches!(s.boundary_matrix(0), Err(KoszulError::DegreeOutOfRange { .. })));
        assert!(matches!(s.boundary_matrix(4), Err(KoszulError::DegreeOutOfRange { .. })));
    }

    #[test]
    fn cycle_examples() {
        let s = sec(&["z1", "z2"], 2);
        let f0 = SymExt::basis(MultiIndex::empty(2), parse("z1 + 7", 2).unwrap());
        assert!(s.is_cycle(1, &f0).unwrap());
        let f = SymExt::from_coeffs(
            2,
            1,
            [(mi(2, &[1]), parse("-z2", 2).unwrap()), (mi(2, &[2]), parse("z1", 2).unwrap())],
        )
        .unwrap();
        assert!(s.is_cycle(2, &f).unwrap());
        let e1 = SymExt::basis(mi(2, &[1]), Poly::one(2));
        assert!(!s.is_cycle(2, &e1).unwrap());
        assert!(s.is_cycle(2, &f0).is_err());
    }

    #[test]
    fn exactness_examples() {
        let g = [c(0.3, 1.0), c(-2.0, 0.5), c(0.0, 0.7)];
        let s2: f64 = g.iter().map(|z| z.norm_sqr()).sum();
        for k in 0..=3 {
            let (phi, psi) = koszul_pair(&g, k);
            let e = exactness_score(&phi, &psi).unwrap();
            assert!((e - s2).abs() < 1e-12 * s2, "k = {k}: {e} vs {s2}");
        }
        let z = CMat::zeros(2, 2);
        assert_eq!(exactness_score(&z, &z).unwrap(), 0.0);
        assert_eq!(exactness_score(&CMat::identity(2, 2), &CMat::zeros(0, 2)).unwrap(), 1.0);
        let bad = CMat::identity(2, 2);
        assert!(matches!(exactness_score(&bad, &bad), Err(KoszulError::NotComplex(_))));
        assert!(matches!(exactness_score(&bad, &CMat::zeros(1, 3)), Err(KoszulError::Shape(_))));
    }

    #[test]
    fn single_map_examples() {
        assert!((exactness_score_single(&CMat::identity(2, 2)).unwrap() - 1.0).abs() < 1e-12);
        let col = CMat::from_row_slice(2, 1, &[c(1.0, 0.0), c(0.0, 0.0)]);
        assert!((exactness_score_single(&col).unwrap() - 1.0).abs() < 1e-12);
        let col = CMat::from_row_slice(2, 1, &[c(0.3, 0.4), c(0.0, 0.0)]);
        assert!((exactness_score_single(&col).unwrap() - 0.25).abs() < 1e-12);
        assert!(matches!(exactness_score_single(&CMat::zeros(2, 2)), Err(KoszulError::ZeroMatrix)));
    }

    #[test]
    fn lift_examples() {
        let one = NumExt::basis(MultiIndex::empty(2), c(1.0, 0.0));
        let fr = PointFrame::new(vec![], vec![c(1.0, 0.0), c(0.0, 0.0)]);
        let h = pointwise_lift(&fr, 1, &one).unwrap();
        assert_eq!(h.to_dense(), vec![c(1.0, 0.0), c(0.0, 0.0)]);

        let fr = PointFrame::new(vec![], vec![c(1.0, 0.0), c(1.0, 0.0)]);
        let h = pointwise_lift(&fr, 1, &one).unwrap();
        assert_eq!(h.to_dense(), vec![c(0.5, 0.0), c(0.5, 0.0)]);
        assert!((h.norm2() - 0.5).abs() < 1e-15);

        // g = (z1, z2) at (1, i); f = −i e1 + e2 is a cycle: 1·(−i) + i·1 = 0.
        let s = sec(&["z1", "z2"], 2);
        let fr = s.frame(&[c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
        let f = NumExt::from_vector(&[c(0.0, -1.0), c(1.0, 0.0)]);
        let h = pointwise_lift(&fr, 2, &f).unwrap();
        let back = NumExt::interior(&fr.g_at, &h).unwrap();
        assert!(back.max_abs_diff(&f) < 1e-14);
        assert!((h.norm2() - f.norm2() / 2.0).abs() < 1e-14);

        let zero_fr = PointFrame::new(vec![], vec![c(0.0, 0.0); 2]);
        assert!(matches!(pointwise_lift(&zero_fr, 1, &one), Err(KoszulError::ZeroLocus(_))));
        let not_cycle = NumExt::from_vector(&[c(1.0, 0.0), c(0.0, 0.0)]);
        assert!(matches!(pointwise_lift(&fr, 2, &not_cycle), Err(KoszulError::NotCycleAtPoint { .. })));
    }

    /// Independent count: sum of |g⌟e_I|² over basis p-vectors, each row
    /// written out by hand from the interior-product formula.
    #[test]
    fn hom_norm_examples() {
        // r = 3, p = 2, |s|² = 1: e12 → |g1|²+|g2|², e13 → |g1|²+|g3|², e23 → |g2|²+|g3|²; total 2.
        let fr = PointFrame::new(vec![], vec![c(0.6, 0.0), c(0.0, 0.8), c(0.0, 0.0)]);
        let (n2, want) = hom_norm2_check(&fr, 2).unwrap();
        assert!((n2 - 2.0).abs() < 1e-12 && (want - 2.0).abs() < 1e-12);

        let fr = PointFrame::new(vec![], vec![c(1.0, 2.0), c(-0.5, 0.1), c(0.3, 0.3)]);
        let (n2, _) = hom_norm2_check(&fr, 1).unwrap();
        assert!((n2 - fr.s_norm2).abs() < 1e-12);

        // r = 4, p = 3: each of the 4 basis 3-vectors omits one index and sees the other three.
        let g = [c(0.2, -1.0), c(1.5, 0.0), c(0.0, 0.4), c(-0.7, 0.9)];
        let fr = PointFrame::new(vec![], g.to_vec());
        let brute: f64 = (0..4)
            .map(|omit| (0..4).filter(|&i| i != omit).map(|i| g[i].norm_sqr()).sum::<f64>())
            .sum();
        let (n2, want) = hom_norm2_check(&fr, 3).unwrap();
        assert!((n2 - brute).abs() < 1e-12);
        assert!((brute - 3.0 * fr.s_norm2).abs() < 1e-12);
        assert!((want - brute).abs() < 1e-12);
    }
}
