//! Pointwise minimal solution of g⌟h = f with |h|² = |f|²/|s|².
use koszul_division::exterior::{MultiIndex, NumExt};
use koszul_division::koszul::{pointwise_lift, KoszulSection};
use koszul_division::poly::parse;
use num_complex::Complex64;

fn main() {
    let sec = KoszulSection::new(vec![parse("1 + z1", 1).unwrap(), parse("z1^2", 1).unwrap(), parse("(0+2i)", 1).unwrap()]).unwrap();
    let z = [Complex64::new(0.4, -0.3)];
    let frame = sec.frame(&z).unwrap();

    // A cycle of degree 1: the boundary of an arbitrary 2-vector.
    let xi = NumExt::from_coeffs(3, 2, [
        (MultiIndex::new(3, vec![1, 2]).unwrap(), Complex64::new(1.0, 0.5)),
        (MultiIndex::new(3, vec![2, 3]).unwrap(), Complex64::new(-0.7, 0.0)),
    ])
    .unwrap();
    let f = NumExt::interior(&frame.g_at, &xi).unwrap();

    let h = pointwise_lift(&frame, 2, &f).unwrap();
    let back = NumExt::interior(&frame.g_at, &h).unwrap();
    println!("‖g⌟h − f‖       = {:.3e}", back.max_abs_diff(&f));
    println!("|h|²            = {:.12}", h.norm2());
    println!("|f|²/|s|²       = {:.12}", f.norm2() / frame.s_norm2);
    println!("|xi|² (any lift) = {:.12}", xi.norm2());
}
