//! Random instances and small independent oracles shared by the test targets.
#![allow(dead_code)]

use koszul_division::exterior::{MultiIndex, NumExt};
use koszul_division::poly::{GaussRat, Monomial, Poly, PolyMatrix};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

/// Up to `terms` terms of total degree ≤ `deg` with small Gaussian-integer
/// coefficients. Never zero.
pub fn random_poly(rng: &mut ChaCha8Rng, n: usize, deg: u32, terms: usize) -> Poly {
    let mut p = Poly::zero(n);
    for _ in 0..rng.gen_range(1..=terms) {
        let mut e = vec![0u32; n];
        let mut left = rng.gen_range(0..=deg);
        while left > 0 {
            e[rng.gen_range(0..n)] += 1;
            left -= 1;
        }
        let c = GaussRat::from_parts((rng.gen_range(-3..=3), 1), (rng.gen_range(-2..=2), 1));
        p.add_term(Monomial(e), c);
    }
    if p.is_zero() {
        p = Poly::one(n);
    }
    p
}

pub fn random_point(rng: &mut ChaCha8Rng, n: usize, radius: f64) -> Vec<Complex64> {
    (0..n).map(|_| Complex64::new(rng.gen_range(-radius..radius), rng.gen_range(-radius..radius))).collect()
}

pub fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    random_point(rng, n, 1.0)
}

pub fn random_ext(rng: &mut ChaCha8Rng, r: usize, p: usize) -> NumExt {
    let idx = MultiIndex::all(r, p);
    let v = random_vector(rng, idx.len());
    NumExt::from_dense(r, p, &v)
}

/// Determinant by Laplace expansion along the first row.
pub fn laplace_det(m: &[Vec<Poly>], nvars: usize) -> Poly {
    let k = m.len();
    if k == 0 {
        return Poly::one(nvars);
    }
    let mut acc = Poly::zero(nvars);
    for j in 0..k {
        let minor: Vec<Vec<Poly>> =
            m[1..].iter().map(|row| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, p)| p.clone()).collect()).collect();
        let term = &m[0][j] * &laplace_det(&minor, nvars);
        acc = if j % 2 == 0 { &acc + &term } else { &acc - &term };
    }
    acc
}

pub fn rows(m: &PolyMatrix) -> Vec<Vec<Poly>> {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| m.get(i, j).clone()).collect()).collect()
}

/// Contraction `s⌟ξ` written out directly: remove each slot of each basis
/// element with sign `(−1)^a`.
pub fn contract(s: &[Complex64], xi: &NumExt) -> Vec<(Vec<usize>, Complex64)> {
    let mut out: std::collections::BTreeMap<Vec<usize>, Complex64> = Default::default();
    for (idx, c) in xi.coeffs() {
        let ind = idx.indices();
        for a in 0..ind.len() {
            let mut rest = ind.to_vec();
            let i = rest.remove(a);
            let sign = if a % 2 == 0 { 1.0 } else { -1.0 };
            *out.entry(rest).or_default() += sign * s[i - 1] * c;
        }
    }
    out.into_iter().filter(|(_, c)| c.norm() > 0.0).collect()
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}
