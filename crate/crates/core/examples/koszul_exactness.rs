//! The Koszul complex of `s = (g_1, …, g_r)`: d∘d = 0, and the exactness
//! score of each pair equals |s|² away from the zero locus.
use koszul_division::koszul::{exactness_score, koszul_pair, KoszulSection};
use koszul_division::poly::parse;
use num_complex::Complex64;

fn main() {
    let n = 2;
    let sec = KoszulSection::new(["z1", "z2^2 - 1", "z1*z2"].iter().map(|s| parse(s, n).unwrap()).collect()).unwrap();
    let r = sec.r();
    for p in 2..=r {
        let dd = sec.boundary_matrix(p - 1).unwrap().mul(&sec.boundary_matrix(p).unwrap()).unwrap();
        println!("d{}∘d{} = 0: {}", p - 1, p, dd.is_zero());
    }

    for z in [[Complex64::new(0.3, 0.1), Complex64::new(-0.2, 0.4)], [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]] {
        let frame = sec.frame(&z).unwrap();
        print!("z = {z:?}  |s|² = {:.6}  E_k =", frame.s_norm2);
        for k in 0..=r {
            let (phi, psi) = koszul_pair(&frame.g_at, k);
            print!(" {:.6}", exactness_score(&phi, &psi).unwrap());
        }
        println!();
    }
}
