//! Galerkin least-norm division with a weighted L² certificate.
use koszul_division::exterior::{MultiIndex, SymExt};
use koszul_division::koszul::KoszulSection;
use koszul_division::l2solve::{skoda_report, DivisionProblem};
use koszul_division::poly::parse;
use koszul_division::quad::{DomainSpec, WeightSpec};

fn main() {
    // g = (z), f = z on the unit disc, ε = 1/2.
    let sec = KoszulSection::new(vec![parse("z1", 1).unwrap()]).unwrap();
    let f = SymExt::basis(MultiIndex::empty(1), parse("z1", 1).unwrap());
    let prob = DivisionProblem::new(sec, 1, f, WeightSpec::flat(0.5), DomainSpec::unit_polydisc(1), None).unwrap();
    let cert = skoda_report(&prob, (16, 16)).unwrap();
    println!("h = {:?}", cert.h);
    println!("ratio {:.9} ≤ bound {:.3}: {}", cert.ratio, cert.bound, cert.satisfied);

    // Top degree: g = (z1, z2), f = −z2 e1 + z1 e2, solved by h = e1∧e2.
    let sec = KoszulSection::new(vec![parse("z1", 2).unwrap(), parse("z2", 2).unwrap()]).unwrap();
    let f = SymExt::from_coeffs(2, 1, [
        (MultiIndex::new(2, vec![1]).unwrap(), parse("-z2", 2).unwrap()),
        (MultiIndex::new(2, vec![2]).unwrap(), parse("z1", 2).unwrap()),
    ])
    .unwrap();
    let prob = DivisionProblem::new(sec, 2, f, WeightSpec::flat(0.5), DomainSpec::unit_polydisc(2), None).unwrap();
    let cert = skoda_report(&prob, (16, 16)).unwrap();
    println!("h = {:?}  residual zero {}  ratio {:.9}  satisfied {}", cert.h, cert.residual.is_zero(), cert.ratio, cert.satisfied);
}
