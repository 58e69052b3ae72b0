use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{One, Signed, Zero};

use super::{GaussRat, PolyError};

/// Exponent vector of a monomial, ordered graded-lexicographically:
/// first by total degree, then lexicographically with `z1 > z2 > …`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, idx: usize) -> Self {
        let mut e = vec![0; nvars];
        e[idx] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(Monomial)
    }

    pub fn eval(&self, point: &[Complex64]) -> Complex64 {
        self.0
            .iter()
            .zip(point)
            .fold(Complex64::new(1.0, 0.0), |acc, (&e, z)| acc * z.powu(e))
    }

    /// All monomials in `nvars` variables of total degree `<= max_degree`,
    /// in ascending graded-lex order.
    pub fn up_to_degree(nvars: usize, max_degree: u32) -> Vec<Monomial> {
        fn rec(nvars: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
            if cur.len() + 1 == nvars {
                cur.push(left);
                out.push(Monomial(cur.clone()));
                cur.pop();
                return;
            }
            for e in 0..=left {
                cur.push(e);
                rec(nvars, left - e, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        if nvars == 0 {
            out.push(Monomial(Vec::new()));
            return out;
        }
        for d in 0..=max_degree {
            rec(nvars, d, &mut Vec::with_capacity(nvars), &mut out);
        }
        out.sort();
        out
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Multivariate polynomial over [`GaussRat`] in the variables `z1..zn`.
///
/// Terms are kept in a map keyed by [`Monomial`], so two equal polynomials
/// always have the same representation. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Monomial, GaussRat>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: GaussRat) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::one(nvars), c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, GaussRat::one())
    }

    /// The variable `z_{idx+1}` (0-based index).
    pub fn var(nvars: usize, idx: usize) -> Self {
        Self::monomial(nvars, Monomial::var(nvars, idx), GaussRat::one())
    }

    pub fn monomial(nvars: usize, m: Monomial, c: GaussRat) -> Self {
        assert_eq!(m.0.len(), nvars, "exponent vector length must equal nvars");
        let mut p = Self::zero(nvars);
        p.add_term(m, c);
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, GaussRat)>) -> Self {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            assert_eq!(m.0.len(), nvars, "exponent vector length must equal nvars");
            p.add_term(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &GaussRat)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> GaussRat {
        self.terms.get(m).cloned().unwrap_or_else(GaussRat::zero)
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Monomial::degree)
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &GaussRat)> {
        self.terms.iter().next_back()
    }

    pub fn add_term(&mut self, m: Monomial, c: GaussRat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &GaussRat) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    fn check_same(&self, other: &Poly) {
        assert_eq!(self.nvars, other.nvars, "polynomials live in different rings");
    }

    /// Exact partial derivative with respect to `z_{idx+1}`.
    pub fn derivative(&self, idx: usize) -> Poly {
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[idx];
            if e == 0 {
                continue;
            }
            let mut dm = m.clone();
            dm.0[idx] -= 1;
            out.add_term(dm, c * &GaussRat::from_int(e as i64));
        }
        out
    }

    pub fn conj_coeffs(&self) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.conj())).collect(),
        }
    }

    /// Evaluates at a complex point, summing terms in canonical order.
    pub fn eval(&self, point: &[Complex64]) -> Result<Complex64, PolyError> {
        if point.len() != self.nvars {
            return Err(PolyError::DimensionMismatch { expected: self.nvars, got: point.len() });
        }
        Ok(self
            .terms
            .iter()
            .fold(Complex64::new(0.0, 0.0), |acc, (m, c)| acc + c.to_complex() * m.eval(point)))
    }

    /// Float snapshot of the coefficients for repeated evaluation.
    pub fn compile(&self) -> CompiledPoly {
        CompiledPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.0.clone(), c.to_complex())).collect(),
        }
    }

    /// Multivariate division by a single polynomial with graded-lex leading
    /// terms. Returns `(quotient, remainder)`; since `{divisor}` is a Gröbner
    /// basis of the principal ideal it generates, the remainder is zero
    /// exactly when `divisor` divides `self`.
    pub fn div_rem(&self, divisor: &Poly) -> Result<(Poly, Poly), PolyError> {
        self.check_same(divisor);
        let (lm, lc) = divisor.leading_term().ok_or(PolyError::DivisionByZero)?;
        let lc_inv = lc.inv().expect("leading coefficient is nonzero");
        let mut quot = Poly::zero(self.nvars);
        let mut rem = Poly::zero(self.nvars);
        let mut work = self.clone();
        while let Some((m, c)) = work.leading_term().map(|(m, c)| (m.clone(), c.clone())) {
            match m.div(lm) {
                Some(qm) => {
                    let qc = &c * &lc_inv;
                    let step = Poly::monomial(self.nvars, qm, qc);
                    work = &work - &(&step * divisor);
                    quot = &quot + &step;
                }
                None => {
                    work.terms.remove(&m);
                    rem.add_term(m, c);
                }
            }
        }
        Ok((quot, rem))
    }

    /// Exact quotient when `divisor | self`.
    pub fn exact_div(&self, divisor: &Poly) -> Option<Poly> {
        match self.div_rem(divisor) {
            Ok((q, r)) if r.is_zero() => Some(q),
            _ => None,
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one(self.nvars);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.check_same(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.check_same(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.check_same(rhs);
        let mut acc: BTreeMap<Monomial, GaussRat> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let c = ca * cb;
                let e = acc.entry(ma.mul(mb)).or_insert_with(GaussRat::zero);
                *e += &c;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Poly { nvars: self.nvars, terms: acc }
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl fmt::Display for Poly {
    /// Prints in the parser's grammar, leading term first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            match (k, c.sign_is_negative()) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let vars: Vec<String> = m
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| if e == 1 { format!("z{}", i + 1) } else { format!("z{}^{}", i + 1, e) })
                .collect();
            if vars.is_empty() {
                c.fmt_unsigned(f)?;
            } else if c.is_real() && c.re.abs().is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                c.fmt_unsigned(f)?;
                write!(f, "*{}", vars.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly[{}]({})", self.nvars, self)
    }
}

/// Float-coefficient copy of a [`Poly`] for fast repeated evaluation.
#[derive(Clone, Debug)]
pub struct CompiledPoly {
    nvars: usize,
    terms: Vec<(Vec<u32>, Complex64)>,
}

impl CompiledPoly {
    /// Builds from `(exponents, coefficient)` pairs.
    pub fn from_terms(nvars: usize, terms: Vec<(Vec<u32>, Complex64)>) -> Self {
        debug_assert!(terms.iter().all(|(e, _)| e.len() == nvars));
        Self { nvars, terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|(_, c)| *c == Complex64::new(0.0, 0.0))
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn max_exponent(&self) -> u32 {
        self.terms.iter().flat_map(|(e, _)| e.iter().copied()).max().unwrap_or(0)
    }

    pub fn eval(&self, point: &[Complex64]) -> Complex64 {
        self.terms.iter().fold(Complex64::new(0.0, 0.0), |acc, (e, c)| {
            acc + *c * e.iter().zip(point).fold(Complex64::new(1.0, 0.0), |m, (&k, z)| m * z.powu(k))
        })
    }

    /// Evaluates using `powers[j][k] = z_j^k`, which must cover
    /// [`CompiledPoly::max_exponent`].
    #[inline]
    pub fn eval_with_powers(&self, powers: &[&[Complex64]]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let mut m = *c;
            for (j, &k) in e.iter().enumerate() {
                if k > 0 {
                    m *= powers[j][k as usize];
                }
            }
            acc += m;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: usize, i: usize) -> Poly {
        Poly::var(n, i)
    }

    #[test]
    fn grlex_order() {
        let a = Monomial(vec![2, 0]);
        let b = Monomial(vec![0, 3]);
        let c = Monomial(vec![1, 1]);
        let d = Monomial(vec![0, 2]);
        assert!(b > a);
        assert!(a > c);
        assert!(c > d);
        let all = Monomial::up_to_degree(2, 2);
        assert_eq!(all.len(), 6);
        assert_eq!(all[0], Monomial::one(2));
        assert_eq!(all[5], Monomial(vec![2, 0]));
    }

    #[test]
    fn eval_examples() {
        let p = z(1, 0).pow(2);
        assert_eq!(p.eval(&[Complex64::new(2.0, 0.0)]).unwrap(), Complex64::new(4.0, 0.0));
        let p = &z(2, 0) + &z(2, 1);
        assert_eq!(
            p.eval(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)]).unwrap(),
            Complex64::new(1.0, 1.0)
        );
        // 2*3 - 5 = 1
        let p = &(&z(3, 0) * &z(3, 1)) - &z(3, 2);
        let pt = [2.0, 3.0, 5.0].map(|x| Complex64::new(x, 0.0));
        assert_eq!(p.eval(&pt).unwrap(), Complex64::new(1.0, 0.0));
        assert!(matches!(p.eval(&pt[..2]), Err(PolyError::DimensionMismatch { .. })));
    }

    #[test]
    fn cancellation_leaves_zero() {
        let p = &z(2, 0) * &z(2, 1);
        assert!((&p - &p).is_zero());
        assert_eq!((&p - &p).degree(), None);
    }

    #[test]
    fn division() {
        let f = &(&z(2, 0) * &z(2, 1)) + &z(2, 0).pow(2);
        let q = f.exact_div(&z(2, 0)).unwrap();
        assert_eq!(q, &z(2, 1) + &z(2, 0));
        assert!(z(2, 1).exact_div(&z(2, 0)).is_none());
        let (q, r) = (&z(2, 0).pow(2) + &Poly::one(2)).div_rem(&z(2, 0)).unwrap();
        assert_eq!(q, z(2, 0));
        assert_eq!(r, Poly::one(2));
        assert!(matches!(f.div_rem(&Poly::zero(2)), Err(PolyError::DivisionByZero)));
    }

    #[test]
    fn derivative() {
        let p = &z(2, 0).pow(3) * &z(2, 1);
        assert_eq!(p.derivative(0), &(&Poly::constant(2, GaussRat::from_int(3)) * &z(2, 0).pow(2)) * &z(2, 1));
        assert!(Poly::one(2).derivative(1).is_zero());
    }

    #[test]
    fn compiled_matches_exact_eval() {
        let p = &(&z(2, 0).pow(3) * &z(2, 1)).scale(&GaussRat::from_parts((1, 3), (2, 1))) - &Poly::one(2);
        let pt = [Complex64::new(0.3, -0.7), Complex64::new(1.1, 0.2)];
        let c = p.compile();
        let pw: Vec<Vec<Complex64>> = pt.iter().map(|z| (0..4).map(|k| z.powu(k)).collect()).collect();
        let refs: Vec<&[Complex64]> = pw.iter().map(|v| v.as_slice()).collect();
        let exact = p.eval(&pt).unwrap();
        assert!((c.eval(&pt) - exact).norm() < 1e-14);
        assert!((c.eval_with_powers(&refs) - exact).norm() < 1e-14);
    }
}
