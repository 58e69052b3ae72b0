//! Tensor Gauss–Legendre × trapezoid quadrature on a polydisc.
use koszul_division::poly::parse;
use koszul_division::quad::{polydisc_grid, refine_and_estimate, weighted_norm2, DomainSpec};
use num_complex::Complex64;

fn main() {
    let dom = DomainSpec::unit_polydisc(2);
    let grid = polydisc_grid(&dom, 8, 16).unwrap();
    println!("{} nodes, total weight {:.12} (π² = {:.12})", grid.len(), grid.total_weight(), std::f64::consts::PI.powi(2));

    // ∫ |z1 z2|² = (π/2)².
    let f = [parse("z1*z2", 2).unwrap()];
    let flat = |_: &[Complex64]| 1.0;
    println!("∫|z1 z2|²  = {:.12} (exact {:.12})", weighted_norm2(&f, &flat, &grid).unwrap(), (std::f64::consts::PI / 2.0).powi(2));

    // Gaussian weight: integrand e^{−|z|²}, converges under refinement.
    let gauss = |z: &[Complex64]| (-z.iter().map(Complex64::norm_sqr).sum::<f64>()).exp();
    let one = [parse("1", 2).unwrap()];
    let r = refine_and_estimate(&one, &gauss, &dom, (8, 16)).unwrap();
    println!("∫e^(−|z|²) = {:.12}  rel_change {:.1e}  diverging {}", r.value, r.rel_change, r.diverging);

    let shifted = DomainSpec::new(vec![Complex64::new(1.0, 0.0)], vec![0.5]).unwrap();
    let g = polydisc_grid(&shifted, 4, 8).unwrap();
    println!("area of |z−1| < 1/2: {:.12}", g.total_weight());
}
