//! ∂∂̄ log(1+|z|²) = 1/(1+|z|²)², analytic vs finite differences, and the
//! second fundamental form of s = (1, z).
use koszul_division::identcheck::{hessian_phi_check, HoloFamily, DEFAULT_STEP};
use koszul_division::koszul::KoszulSection;
use koszul_division::poly::parse;
use num_complex::Complex64;

fn main() {
    let sec = KoszulSection::new(vec![parse("1", 1).unwrap(), parse("z1", 1).unwrap()]).unwrap();
    let fam = HoloFamily::from_section(&sec).unwrap();
    for x in [0.0, 0.3, 0.7] {
        let z = [Complex64::new(x, 0.5 * x)];
        let exact = 1.0 / (1.0 + z[0].norm_sqr()).powi(2);
        let an = fam.analytic_hessian(&z).unwrap()[(0, 0)].re;
        let fd = fam.fd_hessian(&z, DEFAULT_STEP).unwrap()[(0, 0)].re;
        let chk = hessian_phi_check(&fam, &z, DEFAULT_STEP).unwrap();
        println!("z = {:.2}: exact {exact:.10}  analytic {an:.10}  fd {fd:.10}  sff err {:.1e}", z[0], chk.sff_error);
    }

    let z = [Complex64::new(0.2, -0.1)];
    let e1 = (fam.fd_hessian(&z, 1e-3).unwrap() - fam.analytic_hessian(&z).unwrap()).norm();
    let e2 = (fam.fd_hessian(&z, 5e-4).unwrap() - fam.analytic_hessian(&z).unwrap()).norm();
    println!("error ratio under step halving: {:.3}", e1 / e2);
}
