//! Input fixtures for the benchmarks.

use dimgroup::decide::Mode;
use dimgroup::exactmat::IntMatrix;

/// A named pair for the decision benchmarks.
pub struct Pair {
    pub name: &'static str,
    pub a: IntMatrix,
    pub b: IntMatrix,
    pub mode: Mode,
}

/// The regression pairs, one per decision path.
pub fn decision_pairs() -> Vec<Pair> {
    dimgroup::corpus::examples()
        .into_iter()
        .map(|e| Pair { name: e.name, a: e.a, b: e.b, mode: e.mode })
        .collect()
}

/// Deterministic n×n matrix with entries in [1, 9].
pub fn dense(n: usize, seed: u64) -> IntMatrix {
    let mut x = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    let rows: Vec<Vec<i64>> = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| {
                    x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    1 + ((x >> 33) % 9) as i64
                })
                .collect()
        })
        .collect();
    IntMatrix::from_rows(&rows)
}
