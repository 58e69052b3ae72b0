//! |Tr_ρ D| ≤ √rank(D)·‖ρ‖·‖D‖: a seeded fuzz run and the sharp family w₀⊗u.
use koszul_division::trace::{fuzz_trace_bound, random_low_rank, trace_bound_check, BilinearMap, LinearMap};
use num_complex::Complex64;
use rand::SeedableRng;

fn main() {
    let summary = fuzz_trace_bound(7, 500);
    println!("{} trials, {} violations, max lhs/rhs {:.6}", summary.trials, summary.violations, summary.max_ratio);

    let w0 = [Complex64::new(1.0, 2.0), Complex64::new(-0.5, 0.0)];
    for k in 1..=4 {
        let d = LinearMap::tensor_with(&w0, k);
        let b = trace_bound_check(&d, &BilinearMap::Contraction { dim_w: 2, dim_u: k }).unwrap();
        println!("k = {k}: rank {} lhs {:.6} rhs {:.6} ratio {:.12}", b.rank, b.lhs, b.rhs, b.lhs / b.rhs);
    }

    // ρ(v, ξ) = v⌟ξ on ℂ⁴ × ∧²(ℂ⁴)*, D: ∧² → ℂ⁴ of rank 2.
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    let d = LinearMap::new(random_low_rank(&mut rng, 4, 6, 2));
    let b = trace_bound_check(&d, &BilinearMap::Interior { dim_v: 4, p: 2 }).unwrap();
    println!("interior ∧²: rank {} lhs {:.6} ≤ rhs {:.6}", b.rank, b.lhs, b.rhs);
}
