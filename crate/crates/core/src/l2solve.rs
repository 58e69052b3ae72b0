//! Least-norm polynomial division `g⌟h = f` under Skoda weights.
//!
//! The constraints are solved exactly over `ℚ(i)` first, giving an affine
//! solution set `x₀ + N·c`. The weighted norm is then minimized over `c` in
//! floating point. Since every column of `N` is an exact syzygy, snapping `c`
//! to rationals keeps the reported `h` an exact solution.

use nalgebra::DVector;
use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::exterior::{ExteriorError, MultiIndex, SymExt};
use crate::koszul::{KoszulError, KoszulSection};
use crate::linalg::{self, CMat};
use crate::poly::{CompiledPoly, GaussRat, Monomial, Poly};
use crate::quad::{
    polydisc_grid, refine_and_estimate, refine_compiled, skoda_weights, DomainSpec, QuadError,
    QuadratureGrid, Refinement, Weight, WeightSpec,
};

pub const UNCERTIFIED_NOTE: &str = "minimizer not found within degree-d subspace or quadrature unconverged";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum L2Error {
    #[error(transparent)]
    Koszul(#[from] KoszulError),
    #[error(transparent)]
    Exterior(#[from] ExteriorError),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error("target is not a cycle: g⌟f ≠ 0")]
    NotCycle,
    #[error("{0}")]
    Shape(String),
    #[error(
        "no polynomial solution up to degree {degree} (rank {rank}, augmented rank {augmented_rank}); \
         a holomorphic solution may still exist outside the polynomial module, try a larger degree"
    )]
    Infeasible { degree: u32, rank: usize, augmented_rank: usize },
    #[error("weighted norm of f diverges under refinement {values:?}: integrability hypothesis fails")]
    FNormDiverging { values: Vec<f64> },
}

#[derive(Debug, Clone)]
pub struct DivisionProblem {
    pub sec: KoszulSection,
    pub p: usize,
    /// Target of degree `p − 1`.
    pub f: SymExt,
    pub ws: WeightSpec,
    pub dom: DomainSpec,
    pub degree: u32,
}

impl DivisionProblem {
    /// `degree = None` selects [`DivisionProblem::default_degree`].
    pub fn new(
        sec: KoszulSection,
        p: usize,
        f: SymExt,
        ws: WeightSpec,
        dom: DomainSpec,
        degree: Option<u32>,
    ) -> Result<Self, L2Error> {
        if dom.n() != sec.n() {
            return Err(L2Error::Shape(format!("domain has dimension {}, generators {}", dom.n(), sec.n())));
        }
        if f.r() != sec.r() {
            return Err(L2Error::Shape(format!("target has rank {}, section {}", f.r(), sec.r())));
        }
        if f.coeffs().values().any(|c| c.nvars() != sec.n()) {
            return Err(L2Error::Shape("target variables differ from generators".into()));
        }
        ws.validate()?;
        if !sec.is_cycle(p, &f)? {
            return Err(L2Error::NotCycle);
        }
        let degree = degree.unwrap_or_else(|| Self::default_degree(&sec, &f));
        Ok(Self { sec, p, f, ws, dom, degree })
    }

    /// `max(deg f, max deg g_i) + 2`.
    pub fn default_degree(sec: &KoszulSection, f: &SymExt) -> u32 {
        let df = f.coeffs().values().filter_map(Poly::degree).max().unwrap_or(0);
        let dg = sec.generators().iter().filter_map(Poly::degree).max().unwrap_or(0);
        df.max(dg) + 2
    }

    /// Components of `f` in lexicographic order of `∧ᵖ⁻¹`.
    pub fn f_components(&self) -> Vec<Poly> {
        components(&self.f, self.p - 1, self.sec.n())
    }
}

fn components(e: &SymExt, degree: usize, n: usize) -> Vec<Poly> {
    MultiIndex::all(e.r(), degree)
        .iter()
        .map(|i| e.get(i).cloned().unwrap_or_else(|| Poly::zero(n)))
        .collect()
}

/// Exact coefficient-matching system for `g⌟h = f`. Unknown `k` is the
/// coefficient of `monomials[k % m]` in component `components[k / m]`.
#[derive(Debug, Clone)]
pub struct ConstraintSystem {
    pub r: usize,
    pub p: usize,
    pub nvars: usize,
    pub degree: u32,
    pub components: Vec<MultiIndex>,
    pub monomials: Vec<Monomial>,
    /// Equation labels: component of `∧ᵖ⁻¹` and monomial.
    pub equations: Vec<(MultiIndex, Monomial)>,
    pub matrix: Vec<Vec<GaussRat>>,
    pub rhs: Vec<GaussRat>,
}

pub fn assemble_constraints(prob: &DivisionProblem) -> Result<ConstraintSystem, L2Error> {
    let n = prob.sec.n();
    let r = prob.sec.r();
    let bmat = prob.sec.boundary_matrix(prob.p)?;
    let rows = MultiIndex::all(r, prob.p - 1);
    let components = MultiIndex::all(r, prob.p);
    let monomials = Monomial::up_to_degree(n, prob.degree);
    let nm = monomials.len();
    let mut eq_index = std::collections::BTreeMap::<(usize, Monomial), usize>::new();
    let mut entries: Vec<(usize, usize, GaussRat)> = Vec::new();
    for (j, _) in components.iter().enumerate() {
        for (k, m) in monomials.iter().enumerate() {
            for (i, _) in rows.iter().enumerate() {
                for (t, c) in bmat.get(i, j).terms() {
                    let key = (i, t.mul(m));
                    let next = eq_index.len();
                    let e = *eq_index.entry(key).or_insert(next);
                    entries.push((e, j * nm + k, c.clone()));
                }
            }
        }
    }
    let f = prob.f_components();
    for (i, fi) in f.iter().enumerate() {
        for (t, _) in fi.terms() {
            let next = eq_index.len();
            eq_index.entry((i, t.clone())).or_insert(next);
        }
    }
    let neq = eq_index.len();
    let mut matrix = vec![vec![GaussRat::zero(); components.len() * nm]; neq];
    for (e, u, c) in entries {
        matrix[e][u] += &c;
    }
    let mut rhs = vec![GaussRat::zero(); neq];
    let mut equations = vec![(MultiIndex::empty(r), Monomial::one(n)); neq];
    for ((i, m), e) in eq_index {
        rhs[e] = f[i].coeff(&m);
        equations[e] = (rows[i].clone(), m);
    }
    Ok(ConstraintSystem { r, p: prob.p, nvars: n, degree: prob.degree, components, monomials, equations, matrix, rhs })
}

/// `x₀ + span(nullspace)`, exactly.
#[derive(Debug, Clone)]
pub struct AffineSolution {
    pub particular: Vec<GaussRat>,
    pub nullspace: Vec<Vec<GaussRat>>,
    pub rank: usize,
}

impl ConstraintSystem {
    pub fn num_unknowns(&self) -> usize {
        self.components.len() * self.monomials.len()
    }

    pub fn num_equations(&self) -> usize {
        self.rhs.len()
    }

    /// Reduced row echelon form of `[A | b]`.
    pub fn solve_exact(&self) -> Result<AffineSolution, L2Error> {
        let nu = self.num_unknowns();
        let mut a: Vec<Vec<GaussRat>> = self
            .matrix
            .iter()
            .zip(&self.rhs)
            .map(|(row, b)| {
                let mut v = row.clone();
                v.push(b.clone());
                v
            })
            .collect();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..nu {
            let Some(piv) = (row..a.len()).find(|&i| !a[i][col].is_zero()) else { continue };
            a.swap(row, piv);
            let inv = a[row][col].inv().expect("non-zero pivot");
            for x in a[row].iter_mut() {
                *x = &*x * &inv;
            }
            let prow = a[row].clone();
            for (i, other) in a.iter_mut().enumerate() {
                if i == row || other[col].is_zero() {
                    continue;
                }
                let factor = other[col].clone();
                for (x, p) in other.iter_mut().zip(&prow) {
                    if !p.is_zero() {
                        *x -= &(&factor * p);
                    }
                }
            }
            pivots.push(col);
            row += 1;
            if row == a.len() {
                break;
            }
        }
        let rank = pivots.len();
        if a[rank..].iter().any(|r| !r[nu].is_zero()) {
            return Err(L2Error::Infeasible { degree: self.degree, rank, augmented_rank: rank + 1 });
        }
        let mut particular = vec![GaussRat::zero(); nu];
        for (i, &c) in pivots.iter().enumerate() {
            particular[c] = a[i][nu].clone();
        }
        let mut is_pivot = vec![false; nu];
        pivots.iter().for_each(|&c| is_pivot[c] = true);
        let nullspace = (0..nu)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = vec![GaussRat::zero(); nu];
                v[free] = GaussRat::one();
                for (i, &pc) in pivots.iter().enumerate() {
                    v[pc] = -&a[i][free];
                }
                v
            })
            .collect();
        Ok(AffineSolution { particular, nullspace, rank })
    }

    pub fn to_ext(&self, x: &[GaussRat]) -> SymExt {
        let nm = self.monomials.len();
        let terms = self.components.iter().enumerate().map(|(j, idx)| {
            let poly = Poly::from_terms(
                self.nvars,
                self.monomials.iter().enumerate().map(|(k, m)| (m.clone(), x[j * nm + k].clone())),
            );
            (idx.clone(), poly)
        });
        SymExt::from_coeffs(self.r, self.p, terms).expect("components have degree p")
    }

    /// Float components in the order of `self.components`.
    pub fn to_compiled(&self, x: &[Complex64]) -> Vec<CompiledPoly> {
        let nm = self.monomials.len();
        (0..self.components.len())
            .map(|j| {
                CompiledPoly::from_terms(
                    self.nvars,
                    self.monomials
                        .iter()
                        .enumerate()
                        .filter(|(k, _)| x[j * nm + k] != Complex64::new(0.0, 0.0))
                        .map(|(k, m)| (m.0.clone(), x[j * nm + k]))
                        .collect(),
                )
            })
            .collect()
    }
}

/// Block-diagonal Gram matrix; every component shares `block[m][m′] =
/// Σ weight·w·z^m·conj(z^{m′})`.
#[derive(Debug, Clone)]
pub struct GramMatrix {
    pub block: CMat,
    pub blocks: usize,
}

impl GramMatrix {
    pub fn full(&self) -> CMat {
        let m = self.block.nrows();
        let mut g = CMat::zeros(m * self.blocks, m * self.blocks);
        for b in 0..self.blocks {
            g.view_mut((b * m, b * m), (m, m)).copy_from(&self.block);
        }
        g
    }

    /// Smallest eigenvalue is at least `−1e−9·trace`.
    pub fn is_psd(&self) -> bool {
        let tr: f64 = (0..self.block.nrows()).map(|i| self.block[(i, i)].re).sum();
        linalg::min_hermitian_eigenvalue(&self.block) >= -1e-9 * tr
    }
}

pub fn gram_block<W: Weight + ?Sized>(
    monomials: &[Monomial],
    w: &W,
    grid: &QuadratureGrid,
) -> Result<CMat, QuadError> {
    let m = monomials.len();
    let acc = grid.reduce(
        || vec![Complex64::new(0.0, 0.0); m * (m + 1) / 2],
        |acc, z, wt| {
            let wz = w.eval(z);
            if !wz.is_finite() {
                return Err(QuadError::NonFiniteWeight { node: z.iter().map(|c| (c.re, c.im)).collect() });
            }
            let vals: Vec<Complex64> = monomials.iter().map(|mo| mo.eval(z)).collect();
            let s = wt * wz;
            let mut k = 0;
            for a in 0..m {
                let va = vals[a] * s;
                for vb in &vals[a..] {
                    acc[k] += va * vb.conj();
                    k += 1;
                }
            }
            Ok(())
        },
        |mut a, b| {
            a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
            a
        },
    )?;
    let mut g = CMat::zeros(m, m);
    let mut k = 0;
    for a in 0..m {
        for b in a..m {
            g[(a, b)] = acc[k];
            g[(b, a)] = acc[k].conj();
            k += 1;
        }
    }
    Ok(g)
}

/// Gram matrix of the degree-`d` basis under `w_num`.
pub fn gram_matrix(prob: &DivisionProblem, grid: &QuadratureGrid) -> Result<GramMatrix, L2Error> {
    let (w_num, _) = skoda_weights(&prob.sec, &prob.ws);
    let monomials = Monomial::up_to_degree(prob.sec.n(), prob.degree);
    let blocks = MultiIndex::all(prob.sec.r(), prob.p).len();
    Ok(GramMatrix { block: gram_block(&monomials, &w_num, grid)?, blocks })
}

#[derive(Debug, Clone)]
pub struct MinNormSolution {
    /// Exact solution with the nullspace coordinates snapped to rationals.
    pub h: SymExt,
    /// Float minimizer, one entry per unknown.
    pub coefficients: Vec<Complex64>,
    /// Discrete weighted norm of the float minimizer.
    pub discrete_norm2: f64,
    pub rank: usize,
    pub nullity: usize,
}

fn to_float(v: &[GaussRat]) -> DVector<Complex64> {
    DVector::from_iterator(v.len(), v.iter().map(GaussRat::to_complex))
}

pub fn solve_min_norm(cs: &ConstraintSystem, gram: &GramMatrix) -> Result<MinNormSolution, L2Error> {
    let sol = cs.solve_exact()?;
    let nu = cs.num_unknowns();
    if gram.block.nrows() * gram.blocks != nu {
        return Err(L2Error::Shape(format!("gram has size {}, system {}", gram.block.nrows() * gram.blocks, nu)));
    }
    // Quadratic form of ‖Σ c_m z^m‖² is conj(G).
    let q = gram.full().map(|x| x.conj());
    let x0 = to_float(&sol.particular);
    let k = sol.nullspace.len();
    let (coefficients, c) = if k == 0 {
        (x0.clone(), DVector::zeros(0))
    } else {
        let nmat = CMat::from_columns(&sol.nullspace.iter().map(|v| to_float(v)).collect::<Vec<_>>());
        let qn = &q * &nmat;
        let a = nmat.adjoint() * &qn;
        let b = -(qn.adjoint() * &x0);
        let c = linalg::hermitian_pinv_solve(&a, &b, 1e-12);
        (&x0 + &nmat * &c, c)
    };
    let discrete_norm2 = (coefficients.adjoint() * &q * &coefficients)[(0, 0)].re;
    let mut exact = sol.particular.clone();
    for (ck, v) in c.iter().zip(&sol.nullspace) {
        let cr = GaussRat::approximate(*ck, 1_000_000, 1e-12);
        if cr.is_zero() {
            continue;
        }
        for (x, vi) in exact.iter_mut().zip(v) {
            if !vi.is_zero() {
                *x += &(&cr * vi);
            }
        }
    }
    Ok(MinNormSolution {
        h: cs.to_ext(&exact),
        coefficients: coefficients.iter().copied().collect(),
        discrete_norm2,
        rank: sol.rank,
        nullity: k,
    })
}

#[derive(Debug, Clone)]
pub struct DivisionCertificate {
    pub h: SymExt,
    /// `g⌟h − f`, exactly zero.
    pub residual: SymExt,
    pub norm_h: f64,
    pub norm_f: f64,
    pub ratio: f64,
    pub bound: f64,
    pub satisfied: bool,
    pub quadrature_rel_change: f64,
    pub h_refinement: Refinement,
    pub f_refinement: Refinement,
    pub degree: u32,
    pub unknowns: usize,
    pub nullity: usize,
    /// Set when the bound is not met.
    pub note: Option<String>,
}

/// Solves, integrates both sides at `resolution` and its doublings, and
/// compares the ratio to `(1+ε)/ε` with tolerance `10·rel_change + 1e−6`.
pub fn skoda_report(prob: &DivisionProblem, resolution: (usize, usize)) -> Result<DivisionCertificate, L2Error> {
    let (w_num, w_den) = skoda_weights(&prob.sec, &prob.ws);
    let f_ref = refine_and_estimate(&prob.f_components(), &w_den, &prob.dom, resolution)?;
    if f_ref.diverging || !f_ref.value.is_finite() {
        return Err(L2Error::FNormDiverging { values: f_ref.values });
    }
    let cs = assemble_constraints(prob)?;
    let grid = polydisc_grid(&prob.dom, resolution.0, resolution.1)?;
    let gram = GramMatrix {
        block: gram_block(&cs.monomials, &w_num, &grid)?,
        blocks: cs.components.len(),
    };
    let sol = solve_min_norm(&cs, &gram)?;
    let h_ref = refine_compiled(&cs.to_compiled(&sol.coefficients), &w_num, &prob.dom, resolution)?;
    let residual = SymExt::interior(prob.sec.generators(), &sol.h)?.sub(&prob.f)?;
    let bound = prob.ws.bound();
    let ratio = h_ref.value / f_ref.value;
    let rel = h_ref.rel_change.max(f_ref.rel_change);
    let satisfied = residual.is_zero() && ratio <= bound * (1.0 + 10.0 * rel + 1e-6);
    Ok(DivisionCertificate {
        h: sol.h,
        residual,
        norm_h: h_ref.value,
        norm_f: f_ref.value,
        ratio,
        bound,
        satisfied,
        quadrature_rel_change: rel,
        degree: prob.degree,
        unknowns: cs.num_unknowns(),
        nullity: sol.nullity,
        note: (!satisfied).then(|| UNCERTIFIED_NOTE.to_string()),
        h_refinement: h_ref,
        f_refinement: f_ref,
    })
}
