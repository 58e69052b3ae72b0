//! Exact polynomial matrices: determinant, adjugate and maximal minors.
use koszul_division::poly::{parse, PolyMatrix};

fn main() {
    let n = 2;
    let p = |s: &str| parse(s, n).unwrap();
    let m = PolyMatrix::from_rows(vec![vec![p("z1"), p("z2")], vec![p("(1/2)*z2"), p("z1^2 - (0+1i)")]]).unwrap();
    let det = m.det().unwrap();
    println!("det  = {det}");

    let adj = m.adjugate().unwrap();
    let prod = m.mul(&adj).unwrap();
    println!("M·adj(M) = det·I: {}", (0..2).all(|i| (0..2).all(|j| {
        let want = if i == j { det.clone() } else { p("0") };
        prod.get(i, j) == &want
    })));

    let wide = PolyMatrix::from_rows(vec![vec![p("z1"), p("z2"), p("1")]]).unwrap();
    for (idx, minor) in wide.minors().unwrap() {
        println!("δ{idx} = {minor}");
    }

    let z = [num_complex::Complex64::new(0.5, -0.25), num_complex::Complex64::new(0.0, 1.0)];
    println!("det(z) = {:.6}", det.eval(&z).unwrap());
}
