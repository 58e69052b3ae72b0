//! Strictly increasing multi-indices and the exterior algebra `∧•ℂʳ`.
//!
//! Sign conventions: the wedge of basis vectors taken in increasing order is
//! `+e_I`, and the interior product contracts the first slot,
//!
//! ```text
//! s ⌟ (e_{i1} ∧ … ∧ e_{ip}) = Σ_a (−1)^{a−1} s_{ia} e_{i1} ∧ … ê_{ia} … ∧ e_{ip}.
//! ```
//!
//! With these choices `θ ∧ (s⌟ξ) + s⌟(θ ∧ ξ) = (s·θ) ξ` holds verbatim.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::poly::Poly;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExteriorError {
    #[error("ambient rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("index set {indices:?} is not strictly increasing within 1..={r}")]
    InvalidIndex { indices: Vec<usize>, r: usize },
    #[error("coefficient key of degree {got} in an element of degree {expected}")]
    DegreeMismatch { expected: isize, got: usize },
}

/// Strictly increasing tuple `i1 < … < ip` with entries in `1..=r`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MultiIndex {
    r: usize,
    indices: Vec<usize>,
}

impl MultiIndex {
    pub fn new(r: usize, indices: Vec<usize>) -> Result<Self, ExteriorError> {
        let ok = indices.windows(2).all(|w| w[0] < w[1]) && indices.iter().all(|&i| (1..=r).contains(&i));
        if !ok {
            return Err(ExteriorError::InvalidIndex { indices, r });
        }
        Ok(Self { r, indices })
    }

    pub fn empty(r: usize) -> Self {
        Self { r, indices: Vec::new() }
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    /// All increasing `p`-subsets of `1..=r`, in lexicographic order.
    pub fn all(r: usize, p: usize) -> Vec<MultiIndex> {
        fn rec(start: usize, r: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<MultiIndex>) {
            if left == 0 {
                out.push(MultiIndex { r, indices: cur.clone() });
                return;
            }
            for i in start..=r {
                if r - i + 1 < left {
                    break;
                }
                cur.push(i);
                rec(i + 1, r, left - 1, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        if p <= r {
            rec(1, r, p, &mut Vec::with_capacity(p), &mut out);
        }
        out
    }

    /// Increasing complement in `1..=r`.
    pub fn complement(&self) -> MultiIndex {
        MultiIndex {
            r: self.r,
            indices: (1..=self.r).filter(|i| !self.contains(*i)).collect(),
        }
    }

    /// The index with its `a`-th entry (0-based) removed.
    pub fn remove_at(&self, a: usize) -> MultiIndex {
        let mut indices = self.indices.clone();
        indices.remove(a);
        MultiIndex { r: self.r, indices }
    }

    /// Parses the comma-separated form used in problem files (`"1,3"`); the
    /// empty string is the empty index.
    pub fn parse(r: usize, text: &str) -> Result<Self, ExteriorError> {
        let t = text.trim();
        if t.is_empty() {
            return Ok(Self::empty(r));
        }
        let parsed: Result<Vec<usize>, _> = t.split(',').map(|s| s.trim().parse::<usize>()).collect();
        match parsed {
            Ok(v) => Self::new(r, v),
            Err(_) => Err(ExteriorError::InvalidIndex { indices: Vec::new(), r }),
        }
    }

    pub fn key(&self) -> String {
        self.indices.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.key())
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.key())
    }
}

/// Sign of `e_I ∧ e_J` relative to `e_{I∪J}`, or `None` when they overlap.
fn merge_sign(a: &MultiIndex, b: &MultiIndex) -> Option<(i32, MultiIndex)> {
    let mut inversions = 0usize;
    for &x in &a.indices {
        for &y in &b.indices {
            if x == y {
                return None;
            }
            if x > y {
                inversions += 1;
            }
        }
    }
    let mut merged: Vec<usize> = a.indices.iter().chain(&b.indices).copied().collect();
    merged.sort_unstable();
    let sign = if inversions % 2 == 0 { 1 } else { -1 };
    Some((sign, MultiIndex { r: a.r, indices: merged }))
}

/// Complement and sign of the permutation `(i1…iq j1…j_{p−q})` of `(1…p)`.
pub fn comp_sign(idx: &MultiIndex, p: usize) -> (i32, MultiIndex) {
    let ambient = MultiIndex { r: p, indices: idx.indices.clone() };
    let comp = ambient.complement();
    let (sign, _) = merge_sign(&ambient, &comp).expect("an index and its complement are disjoint");
    (sign, comp)
}

/// Coefficient ring for [`ExtElem`]: exact polynomials or complex floats.
pub trait Scalar: Clone + PartialEq + fmt::Debug {
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
}

impl Scalar for Poly {
    fn is_zero(&self) -> bool {
        Poly::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
}

impl Scalar for Complex64 {
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
}

/// Homogeneous element of degree `p` in `∧ᵖℂʳ`.
///
/// Degree `−1` is the distinguished null element returned by contracting a
/// scalar; it has no coefficients.
#[derive(Clone, PartialEq)]
pub struct ExtElem<S> {
    r: usize,
    degree: isize,
    coeffs: BTreeMap<MultiIndex, S>,
}

pub type NumExt = ExtElem<Complex64>;
pub type SymExt = ExtElem<Poly>;

impl<S: Scalar> ExtElem<S> {
    pub fn zero(r: usize, degree: isize) -> Self {
        Self { r, degree, coeffs: BTreeMap::new() }
    }

    pub fn basis(idx: MultiIndex, coeff: S) -> Self {
        let mut e = Self::zero(idx.r, idx.len() as isize);
        e.add_term(idx, coeff);
        e
    }

    pub fn from_coeffs(
        r: usize,
        degree: usize,
        coeffs: impl IntoIterator<Item = (MultiIndex, S)>,
    ) -> Result<Self, ExteriorError> {
        let mut e = Self::zero(r, degree as isize);
        for (idx, c) in coeffs {
            if idx.r != r {
                return Err(ExteriorError::RankMismatch(r, idx.r));
            }
            if idx.len() != degree {
                return Err(ExteriorError::DegreeMismatch { expected: degree as isize, got: idx.len() });
            }
            e.add_term(idx, c);
        }
        Ok(e)
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn degree(&self) -> isize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &BTreeMap<MultiIndex, S> {
        &self.coeffs
    }

    pub fn get(&self, idx: &MultiIndex) -> Option<&S> {
        self.coeffs.get(idx)
    }

    fn add_term(&mut self, idx: MultiIndex, c: S) {
        debug_assert_eq!(idx.len() as isize, self.degree);
        if c.is_zero() {
            return;
        }
        match self.coeffs.entry(idx) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().add(&c);
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    fn check_rank(&self, r: usize) -> Result<(), ExteriorError> {
        if self.r != r {
            return Err(ExteriorError::RankMismatch(self.r, r));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, ExteriorError> {
        self.check_rank(other.r)?;
        if self.degree != other.degree && !self.is_zero() && !other.is_zero() {
            return Err(ExteriorError::DegreeMismatch {
                expected: self.degree,
                got: other.degree.max(0) as usize,
            });
        }
        let mut out = if self.is_zero() { Self::zero(self.r, other.degree) } else { self.clone() };
        for (k, c) in &other.coeffs {
            out.add_term(k.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        self.map(|c| c.neg())
    }

    pub fn sub(&self, other: &Self) -> Result<Self, ExteriorError> {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: &S) -> Self {
        let mut out = Self::zero(self.r, self.degree);
        for (k, c) in &self.coeffs {
            out.add_term(k.clone(), c.mul(s));
        }
        out
    }

    /// Maps coefficients into another scalar ring, dropping new zeros.
    pub fn map<T: Scalar>(&self, mut f: impl FnMut(&S) -> T) -> ExtElem<T> {
        let mut out = ExtElem::zero(self.r, self.degree);
        for (k, c) in &self.coeffs {
            out.add_term(k.clone(), f(c));
        }
        out
    }

    pub fn try_map<T: Scalar, E>(&self, mut f: impl FnMut(&S) -> Result<T, E>) -> Result<ExtElem<T>, E> {
        let mut out = ExtElem::zero(self.r, self.degree);
        for (k, c) in &self.coeffs {
            out.add_term(k.clone(), f(c)?);
        }
        Ok(out)
    }

    /// `ξ ∧ η`; zero when `p + q > r`.
    pub fn wedge(&self, other: &Self) -> Result<Self, ExteriorError> {
        self.check_rank(other.r)?;
        let degree = self.degree + other.degree;
        let mut out = Self::zero(self.r, degree);
        if self.degree < 0 || other.degree < 0 || degree > self.r as isize {
            return Ok(out);
        }
        for (a, ca) in &self.coeffs {
            for (b, cb) in &other.coeffs {
                if let Some((sign, idx)) = merge_sign(a, b) {
                    let c = ca.mul(cb);
                    out.add_term(idx, if sign > 0 { c } else { c.neg() });
                }
            }
        }
        Ok(out)
    }

    /// Interior product `s ⌟ ξ` by a covector given by its `r` components.
    /// A degree-0 input contracts to the degree `−1` null element.
    pub fn interior(s: &[S], xi: &Self) -> Result<Self, ExteriorError> {
        xi.check_rank(s.len())?;
        let mut out = Self::zero(xi.r, xi.degree - 1);
        if xi.degree <= 0 {
            return Ok(out);
        }
        for (idx, c) in &xi.coeffs {
            for (a, &i) in idx.indices.iter().enumerate() {
                let sc = &s[i - 1];
                if sc.is_zero() {
                    continue;
                }
                let term = sc.mul(c);
                out.add_term(idx.remove_at(a), if a % 2 == 0 { term } else { term.neg() });
            }
        }
        Ok(out)
    }
}

impl ExtElem<Complex64> {
    /// `Σ_I |ξ_I|²` over increasing multi-indices.
    pub fn norm2(&self) -> f64 {
        self.coeffs.values().map(Complex64::norm_sqr).sum()
    }

    /// A covector or vector `Σ vᵢ eᵢ` as a degree-1 element.
    pub fn from_vector(v: &[Complex64]) -> Self {
        let r = v.len();
        let mut e = Self::zero(r, 1);
        for (i, c) in v.iter().enumerate() {
            e.add_term(MultiIndex { r, indices: vec![i + 1] }, *c);
        }
        e
    }

    /// Dense coefficient vector in the lexicographic basis of `∧ᵖ`.
    pub fn to_dense(&self) -> Vec<Complex64> {
        if self.degree < 0 {
            return Vec::new();
        }
        MultiIndex::all(self.r, self.degree as usize)
            .iter()
            .map(|k| self.coeffs.get(k).copied().unwrap_or_default())
            .collect()
    }

    pub fn from_dense(r: usize, degree: usize, v: &[Complex64]) -> Self {
        let basis = MultiIndex::all(r, degree);
        assert_eq!(basis.len(), v.len(), "dense vector length must be C(r, p)");
        let mut e = Self::zero(r, degree as isize);
        for (k, c) in basis.into_iter().zip(v) {
            e.add_term(k, *c);
        }
        e
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let keys: std::collections::BTreeSet<&MultiIndex> = self.coeffs.keys().chain(other.coeffs.keys()).collect();
        keys.into_iter()
            .map(|k| {
                let a = self.coeffs.get(k).copied().unwrap_or_default();
                let b = other.coeffs.get(k).copied().unwrap_or_default();
                (a - b).norm()
            })
            .fold(0.0, f64::max)
    }
}

/// `‖ξ‖²` for a numeric element.
pub fn ext_norm2(xi: &NumExt) -> f64 {
    xi.norm2()
}

impl<S: Scalar + fmt::Debug> fmt::Debug for ExtElem<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExtElem(r={}, p={}) {{", self.r, self.degree)?;
        for (k, c) in &self.coeffs {
            write!(f, " {k:?}: {c:?};")?;
        }
        write!(f, " }}")
    }
}

/// `C(n, k)`, zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi(r: usize, v: &[usize]) -> MultiIndex {
        MultiIndex::new(r, v.to_vec()).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn e(r: usize, v: &[usize]) -> NumExt {
        NumExt::basis(mi(r, v), c(1.0, 0.0))
    }

    #[test]
    fn multi_index_validation() {
        assert!(MultiIndex::new(3, vec![1, 3]).is_ok());
        assert!(MultiIndex::new(3, vec![3, 1]).is_err());
        assert!(MultiIndex::new(3, vec![1, 1]).is_err());
        assert!(MultiIndex::new(3, vec![0, 2]).is_err());
        assert!(MultiIndex::new(3, vec![4]).is_err());
        assert_eq!(MultiIndex::all(4, 2).len(), 6);
        assert_eq!(MultiIndex::all(4, 2)[1], mi(4, &[1, 3]));
        assert_eq!(MultiIndex::parse(3, "1,3").unwrap(), mi(3, &[1, 3]));
        assert_eq!(MultiIndex::parse(3, "").unwrap(), MultiIndex::empty(3));
        assert!(MultiIndex::parse(3, "2,1").is_err());
        assert!(MultiIndex::parse(3, "x").is_err());
    }

    #[test]
    fn wedge_examples() {
        assert_eq!(e(2, &[1]).wedge(&e(2, &[2])).unwrap(), e(2, &[1, 2]));
        assert_eq!(e(2, &[2]).wedge(&e(2, &[1])).unwrap(), e(2, &[1, 2]).neg());
        let z = e(3, &[1, 2]).wedge(&e(3, &[1])).unwrap();
        assert!(z.is_zero());
        assert_eq!(z.degree(), 3);
        assert!(matches!(e(2, &[1]).wedge(&e(3, &[1])), Err(ExteriorError::RankMismatch(2, 3))));
    }

    #[test]
    fn interior_examples() {
        // s = (g1, g2) on e1∧e2 gives g1 e2 − g2 e1
        let s = [c(2.0, 0.0), c(0.0, 5.0)];
        let out = NumExt::interior(&s, &e(2, &[1, 2])).unwrap();
        let want = e(2, &[2]).scale(&s[0]).sub(&e(2, &[1]).scale(&s[1])).unwrap();
        assert_eq!(out, want);

        let s1 = [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        assert_eq!(NumExt::interior(&s1, &e(3, &[1, 3])).unwrap(), e(3, &[3]));
        assert!(NumExt::interior(&s1, &e(3, &[2, 3])).unwrap().is_zero());

        let scalar = NumExt::basis(MultiIndex::empty(3), c(4.0, 0.0));
        let null = NumExt::interior(&s1, &scalar).unwrap();
        assert_eq!(null.degree(), -1);
        assert!(null.is_zero());
        assert!(NumExt::interior(&s, &e(3, &[1])).is_err());
    }

    #[test]
    fn comp_sign_examples() {
        assert_eq!(comp_sign(&mi(3, &[1, 2]), 3), (1, mi(3, &[3])));
        assert_eq!(comp_sign(&mi(3, &[1, 3]), 3), (-1, mi(3, &[2])));
        assert_eq!(comp_sign(&mi(3, &[2, 3]), 3), (1, mi(3, &[1])));
        assert_eq!(comp_sign(&mi(2, &[2]), 2), (-1, mi(2, &[1])));
    }

    #[test]
    fn norm_examples() {
        assert_eq!(NumExt::basis(mi(2, &[1, 2]), c(0.0, 3.0)).norm2(), 9.0);
        assert_eq!(NumExt::zero(4, 2).norm2(), 0.0);
        let x = NumExt::from_vector(&[c(1.0, 0.0), c(0.0, 2.0)]);
        assert_eq!(ext_norm2(&x), 5.0);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(3, 0), 1);
        assert_eq!(binomial(2, 3), 0);
        assert_eq!(binomial(6, 3), 20);
    }
}
