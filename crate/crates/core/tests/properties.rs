//! Algebraic and numerical invariants on randomized inputs.

mod common;

use std::collections::BTreeMap;

use koszul_division::adjdiv::{assemble_solution, build_bordered, ScalarDivisionData};
use koszul_division::exterior::{comp_sign, MultiIndex, NumExt, SymExt};
use koszul_division::koszul::KoszulSection;
use koszul_division::l2solve::{assemble_constraints, gram_matrix, solve_min_norm, DivisionProblem};
use koszul_division::poly::{parse, GaussRat, Poly, PolyMatrix};
use koszul_division::quad::{polydisc_grid, weighted_norm2, DomainSpec, Psi, WeightSpec};
use koszul_division::trace::{trace_bound_check, BilinearMap, LinearMap};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;

use common::*;

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + a.norm().max(b.norm()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(seed in any::<u64>(), n in 1usize..=3) {
        let mut r = rng(seed);
        let [a, b, c] = [0, 1, 2].map(|_| random_poly(&mut r, n, 3, 4));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a + &b) - &b, a.clone());
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a * &Poly::one(n), a);
    }

    #[test]
    fn evaluation_is_a_homomorphism(seed in any::<u64>(), n in 1usize..=3) {
        let mut r = rng(seed);
        let a = random_poly(&mut r, n, 3, 4);
        let b = random_poly(&mut r, n, 3, 4);
        let z = random_point(&mut r, n, 1.5);
        let (ea, eb) = (a.eval(&z).unwrap(), b.eval(&z).unwrap());
        prop_assert!(close((&a * &b).eval(&z).unwrap(), ea * eb, 1e-12));
        prop_assert!(close((&a + &b).eval(&z).unwrap(), ea + eb, 1e-12));
        prop_assert!(close(a.compile().eval(&z), ea, 1e-12));
    }

    #[test]
    fn display_parses_back(seed in any::<u64>(), n in 1usize..=3) {
        let mut r = rng(seed);
        let a = random_poly(&mut r, n, 4, 5);
        prop_assert_eq!(parse(&a.to_string(), n).unwrap(), a);
    }

    #[test]
    fn division_with_remainder(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_poly(&mut r, 2, 2, 3);
        let b = random_poly(&mut r, 2, 2, 3);
        let prod = &a * &b;
        prop_assert_eq!(prod.exact_div(&b), Some(a));
        let c = random_poly(&mut r, 2, 3, 4);
        let (q, rem) = c.div_rem(&b).unwrap();
        prop_assert_eq!(&(&q * &b) + &rem, c);
    }

    #[test]
    fn determinant_is_multiplicative(seed in any::<u64>(), k in 1usize..=3) {
        let mut r = rng(seed);
        let mut m = || PolyMatrix::from_rows((0..k).map(|_| (0..k).map(|_| random_poly(&mut r, 2, 1, 2)).collect()).collect()).unwrap();
        let (a, b) = (m(), m());
        prop_assert_eq!(a.mul(&b).unwrap().det().unwrap(), &a.det().unwrap() * &b.det().unwrap());
        prop_assert_eq!(a.det().unwrap(), laplace_det(&rows(&a), 2));
        let adj = a.mul(&a.adjugate().unwrap()).unwrap();
        let d = a.det().unwrap();
        for i in 0..k {
            for j in 0..k {
                prop_assert_eq!(adj.get(i, j), &if i == j { d.clone() } else { Poly::zero(2) });
            }
        }
    }

    #[test]
    fn wedge_is_graded_anticommutative(seed in any::<u64>(), r in 1usize..=6) {
        let mut g = rng(seed);
        let p = g.gen_range(0..=r);
        let q = g.gen_range(0..=r - p);
        let (a, b) = (random_ext(&mut g, r, p), random_ext(&mut g, r, q));
        let ab = a.wedge(&b).unwrap();
        let ba = b.wedge(&a).unwrap();
        let sign = if (p * q) % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!(ab.max_abs_diff(&ba.scale(&Complex64::new(sign, 0.0))) < 1e-12);
    }

    #[test]
    fn contraction_identity(seed in any::<u64>(), r in 1usize..=6) {
        let mut g = rng(seed);
        let p = g.gen_range(1..=r);
        let s = random_vector(&mut g, r);
        let xi = random_ext(&mut g, r, p);
        let theta = NumExt::from_vector(&s.iter().map(Complex64::conj).collect::<Vec<_>>());
        let lhs = theta.wedge(&NumExt::interior(&s, &xi).unwrap()).unwrap()
            .add(&NumExt::interior(&s, &theta.wedge(&xi).unwrap()).unwrap()).unwrap();
        let s2: f64 = s.iter().map(Complex64::norm_sqr).sum();
        prop_assert!(lhs.max_abs_diff(&xi.scale(&Complex64::new(s2, 0.0))) < 1e-10);
        // The library contraction agrees with the one written out here.
        let direct = contract(&s, &xi);
        let lib = NumExt::interior(&s, &xi).unwrap();
        for (ind, c) in direct {
            prop_assert!((lib.get(&MultiIndex::new(r, ind).unwrap()).copied().unwrap_or_default() - c).norm() < 1e-12);
        }
    }

    #[test]
    fn contraction_squares_to_zero(seed in any::<u64>(), r in 2usize..=5) {
        let mut g = rng(seed);
        let p = g.gen_range(2..=r);
        let s: Vec<Poly> = (0..r).map(|_| random_poly(&mut g, 2, 2, 3)).collect();
        let xi = SymExt::from_coeffs(r, p, MultiIndex::all(r, p).into_iter().map(|i| (i, random_poly(&mut g, 2, 1, 2)))).unwrap();
        let once = SymExt::interior(&s, &xi).unwrap();
        prop_assert!(SymExt::interior(&s, &once).unwrap().is_zero());
        let sec = KoszulSection::new(s).unwrap();
        prop_assert!(sec.boundary_matrix(p - 1).unwrap().mul(&sec.boundary_matrix(p).unwrap()).unwrap().is_zero());
    }

    #[test]
    fn complement_sign_is_permutation_parity(seed in any::<u64>(), p in 1usize..=7) {
        let mut g = rng(seed);
        let q = g.gen_range(0..=p);
        let all = MultiIndex::all(p, q);
        let idx = &all[g.gen_range(0..all.len())];
        let (sign, comp) = comp_sign(idx, p);
        let perm: Vec<usize> = idx.indices().iter().chain(comp.indices()).copied().collect();
        let inv = (0..p).flat_map(|a| (a + 1..p).map(move |b| (a, b))).filter(|&(a, b)| perm[a] > perm[b]).count();
        prop_assert_eq!(sign, if inv % 2 == 0 { 1 } else { -1 });
        prop_assert_eq!(comp, idx.complement());
    }

    #[test]
    fn bordered_determinant_and_free_fill(seed in any::<u64>(), q in 1usize..=3, extra in 0usize..=2) {
        let mut g = rng(seed);
        let p = q + extra;
        let phi = PolyMatrix::from_rows((0..q).map(|_| (0..p).map(|_| random_poly(&mut g, 2, 1, 2)).collect()).collect()).unwrap();
        let minors = phi.minors().unwrap();
        let mut u = BTreeMap::new();
        let mut v = BTreeMap::new();
        let mut f = vec![Poly::zero(2); q];
        for idx in MultiIndex::all(p, q) {
            let b = build_bordered(&phi, &idx).unwrap();
            let d = b.full.det().unwrap();
            let delta = &minors[&idx];
            prop_assert_eq!(&d, &if b.sign == 1 { delta.clone() } else { -delta });
            let ui: Vec<Poly> = (0..q).map(|_| random_poly(&mut g, 2, 1, 2)).collect();
            for (acc, x) in f.iter_mut().zip(&ui) {
                *acc = &*acc + &(delta * x);
            }
            u.insert(idx.clone(), ui);
            v.insert(idx, (0..extra).map(|_| random_poly(&mut g, 2, 2, 2)).collect::<Vec<_>>());
        }
        let plain = assemble_solution(&phi, &ScalarDivisionData { u: u.clone(), v: BTreeMap::new() }, &f).unwrap();
        let filled = assemble_solution(&phi, &ScalarDivisionData { u, v }, &f).unwrap();
        prop_assert_eq!(phi.mul_vec(&plain.h).unwrap(), f.clone());
        prop_assert_eq!(phi.mul_vec(&filled.h).unwrap(), f);
    }

    #[test]
    fn trace_bound_holds(seed in any::<u64>()) {
        let mut g = rng(seed);
        let (dim_w, dim_u) = (g.gen_range(1..=3), g.gen_range(1..=3));
        let rho = BilinearMap::Contraction { dim_w, dim_u };
        let m = koszul_division::linalg::CMat::from_fn(dim_w * dim_u, dim_u, |_, _| Complex64::new(g.gen_range(-1.0..1.0), g.gen_range(-1.0..1.0)));
        let b = trace_bound_check(&LinearMap::new(m), &rho).unwrap();
        prop_assert!(b.lhs <= b.rhs * (1.0 + 1e-12));
    }

    #[test]
    fn rational_approximation_recovers_small_fractions(a in -50i64..50, b in 1i64..40, c in -50i64..50, d in 1i64..40) {
        let x = GaussRat::from_parts((a, b), (c, d));
        prop_assert_eq!(GaussRat::approximate(x.to_complex(), 1_000_000, 1e-12), x);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn quadrature_is_exact_on_monomials(j in 0u32..6, k in 0u32..6) {
        // ∫_{|z|<1} |z^j|² = π/(j+1), so ∫ over the bidisc of |z1^j z2^k|² is the product.
        let grid = polydisc_grid(&DomainSpec::unit_polydisc(2), 8, 16).unwrap();
        let f = [parse(&format!("z1^{j}*z2^{k}"), 2).unwrap()];
        let v = weighted_norm2(&f, &|_: &[Complex64]| 1.0, &grid).unwrap();
        let exact = std::f64::consts::PI.powi(2) / ((j + 1) * (k + 1)) as f64;
        prop_assert!((v - exact).abs() < 1e-12 * exact);
    }

    #[test]
    fn weighted_norm_is_monotone_in_the_weight(seed in any::<u64>(), c in 0.0f64..2.0) {
        let mut g = rng(seed);
        let f = [random_poly(&mut g, 1, 3, 3)];
        let grid = polydisc_grid(&DomainSpec::unit_polydisc(1), 6, 12).unwrap();
        let heavy = Psi::Quadratic(c);
        let light = Psi::Quadratic(c + 0.5);
        let a = weighted_norm2(&f, &|z: &[Complex64]| (-heavy.eval(z)).exp(), &grid).unwrap();
        let b = weighted_norm2(&f, &|z: &[Complex64]| (-light.eval(z)).exp(), &grid).unwrap();
        prop_assert!(b <= a);
    }

    #[test]
    fn minimal_norm_decreases_with_degree(seed in any::<u64>()) {
        let mut rg = rng(seed);
        let sec = KoszulSection::new(vec![parse("z1", 2).unwrap(), parse("z2 - 1", 2).unwrap()]).unwrap();
        let (a, b) = (random_poly(&mut rg, 2, 1, 2), random_poly(&mut rg, 2, 1, 2));
        let f = &(&a * &sec.generators()[0]) + &(&b * &sec.generators()[1]);
        let dom = DomainSpec::new(vec![Complex64::new(1.5, 0.0), Complex64::new(0.0, 0.0)], vec![1.0, 0.5]).unwrap();
        let ws = WeightSpec { psi: Psi::Quadratic(0.5), epsilon: 1.0, q: None };
        let grid = polydisc_grid(&dom, 6, 12).unwrap();
        let mut last = f64::INFINITY;
        for d in 2..=4 {
            let prob = DivisionProblem::new(sec.clone(), 1, SymExt::basis(MultiIndex::empty(2), f.clone()), ws.clone(), dom.clone(), Some(d)).unwrap();
            let sol = solve_min_norm(&assemble_constraints(&prob).unwrap(), &gram_matrix(&prob, &grid).unwrap()).unwrap();
            prop_assert!(sol.discrete_norm2 <= last * (1.0 + 1e-9), "degree {}: {} > {}", d, sol.discrete_norm2, last);
            last = sol.discrete_norm2;
        }
    }
}
