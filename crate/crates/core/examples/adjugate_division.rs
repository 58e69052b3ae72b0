//! Division by a q×p matrix through bordered minors and the adjugate.
use std::collections::BTreeMap;

use koszul_division::adjdiv::{assemble_solution, build_bordered, integrability_check, scalar_backend_single, ScalarDivisionData};
use koszul_division::exterior::MultiIndex;
use koszul_division::poly::{parse, PolyMatrix};
use koszul_division::quad::{DomainSpec, Psi};

fn main() {
    let p = |s: &str| parse(s, 2).unwrap();
    let phi = PolyMatrix::from_rows(vec![vec![p("z1"), p("z2")]]).unwrap();
    for idx in MultiIndex::all(2, 1) {
        let b = build_bordered(&phi, &idx).unwrap();
        println!("I = {idx}: sign {:+}, det = {}", b.sign, b.full.det().unwrap());
    }

    // f = z1² + z2² with u_(1) = z1, u_(2) = z2.
    let f = vec![p("z1^2 + z2^2")];
    let mut u = BTreeMap::new();
    u.insert(MultiIndex::new(2, vec![1]).unwrap(), vec![p("z1")]);
    u.insert(MultiIndex::new(2, vec![2]).unwrap(), vec![p("z2")]);
    let data = ScalarDivisionData { u, ..Default::default() };
    let sol = assemble_solution(&phi, &data, &f).unwrap();
    println!("h = ({}, {})", sol.h[0], sol.h[1]);
    println!("Φh − f = {}", &phi.mul_vec(&sol.h).unwrap()[0] - &f[0]);

    // When one minor divides f, the scalar data comes for free.
    let delta = phi.minors().unwrap();
    let data = scalar_backend_single(&delta, &[p("z1*z2")]).unwrap();
    let sol = assemble_solution(&phi, &data, &[p("z1*z2")]).unwrap();
    println!("f = z1 z2: h = ({}, {})", sol.h[0], sol.h[1]);

    let r = integrability_check(&phi, &f, &Psi::Zero, &DomainSpec::unit_polydisc(2), 1.5, (8, 16)).unwrap();
    println!("∫|f|²/(Σ|δ|²)^β = {:.6}  diverging {}", r.value, r.diverging);
}
