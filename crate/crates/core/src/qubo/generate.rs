//! Random dense instance generation.

use super::{QuboError, QuboProblem, TriMatrix};
use crate::seed::derive_seed;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

const DENSE_STREAM: u64 = 0x64_656e_7365; // "dense"

/// Fully dense random QUBO: every coefficient (diagonal included) drawn
/// i.i.d. uniform on [-1, 1]. Draw order is the packed row-major layout, so
/// a seed pins the instance exactly.
pub fn generate_dense_qubo(n: usize, seed: u64) -> Result<QuboProblem, QuboError> {
    if n == 0 {
        return Err(QuboError::InvalidInput("dimension must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(&[seed, DENSE_STREAM]));
    let vals: Vec<f64> = (0..n * (n + 1) / 2)
        .map(|_| rng.gen_range(-1.0..=1.0))
        .collect();
    let matrix = TriMatrix::from_packed(n, vals).expect("length computed above");
    Ok(QuboProblem::from_matrix(matrix, format!("dense-n{n}-s{seed}")).with_seed(seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::time::Instant;

    #[test]
    fn deterministic_per_seed() {
        let a = generate_dense_qubo(30, 9).unwrap();
        let b = generate_dense_qubo(30, 9).unwrap();
        assert_eq!(a, b);
        let c = generate_dense_qubo(30, 10).unwrap();
        assert_ne!(a.matrix(), c.matrix());
    }

    #[test]
    fn coefficients_are_bounded_and_complete() {
        let q = generate_dense_qubo(50, 1).unwrap();
        assert_eq!(q.coefficient_count(), 50 * 51 / 2);
        for v in q.matrix().packed() {
            assert!(v.abs() <= 1.0);
        }
    }

    #[test]
    fn thousand_variable_instance_is_fast() {
        let t = Instant::now();
        let q = generate_dense_qubo(1000, 4).unwrap();
        assert_eq!(q.coefficient_count(), 1000 * 1001 / 2);
        assert!(
            t.elapsed().as_secs_f64() < 1.0,
            "generation took {:?}",
            t.elapsed()
        );
    }
}
