//! Benchmark fixtures.

use mfw_core::{FeasibleSet, HalfspacePolytope, Matrix, NormBall};

pub fn l1_disk() -> FeasibleSet {
    HalfspacePolytope::l1_ball(1.0, vec![0.0, 0.0]).expect("unit l1 ball").into()
}

pub fn l2_disk() -> FeasibleSet {
    NormBall::unit(2.0, 2).expect("unit l2 ball").into()
}

/// `m` gradient rows spread around the circle, seen from `x = (0.1, 0.2)`.
pub fn gradients(m: usize) -> (Matrix, Vec<f64>) {
    let rows: Vec<Vec<f64>> = (0..m)
        .map(|j| {
            let t = 0.7 + 2.1 * j as f64 / m as f64;
            vec![t.cos(), t.sin()]
        })
        .collect();
    (Matrix::from_rows(&rows).expect("rectangular"), vec![0.1, 0.2])
}
