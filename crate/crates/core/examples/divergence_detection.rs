//! A weighted norm that blows up under refinement is flagged, not reported.
use koszul_division::exterior::{MultiIndex, SymExt};
use koszul_division::koszul::KoszulSection;
use koszul_division::l2solve::{skoda_report, DivisionProblem, L2Error};
use koszul_division::poly::parse;
use koszul_division::quad::{refine_and_estimate, skoda_weights, DomainSpec, WeightSpec};

fn main() {
    // g = (z), f = 1, q = 0: ∫ |z|^{−2} diverges at the origin.
    let sec = KoszulSection::new(vec![parse("z1", 1).unwrap()]).unwrap();
    let ws = WeightSpec { q: Some(0), ..WeightSpec::flat(1.0) };
    let dom = DomainSpec::unit_polydisc(1);
    let (_, den) = skoda_weights(&sec, &ws);
    let r = refine_and_estimate(&[parse("1", 1).unwrap()], &den, &dom, (16, 16)).unwrap();
    println!("values {:?}  diverging {}", r.values, r.diverging);

    let f = SymExt::basis(MultiIndex::empty(1), parse("1", 1).unwrap());
    let prob = DivisionProblem::new(sec, 1, f, ws, dom, None).unwrap();
    match skoda_report(&prob, (16, 16)) {
        Err(L2Error::FNormDiverging { values }) => println!("refused: f-norm diverging {values:?}"),
        other => println!("unexpected: {other:?}"),
    }
}
