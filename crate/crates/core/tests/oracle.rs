use mfw_core::grid_oracle::grid_oracle;
use mfw_core::presets::preset;
use mfw_core::{default_start, solve_minmax, FeasibleSet, HalfspacePolytope, Matrix, NormBall};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_instance(rng: &mut ChaCha8Rng, set: &FeasibleSet) -> (Matrix, Vec<f64>) {
    let m = rng.random_range(1..=3);
    let rows: Vec<Vec<f64>> = (0..m)
        .map(|_| (0..2).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    (Matrix::from_rows(&rows).unwrap(), set.sample(rng).unwrap())
}

#[test]
fn solver_matches_grid_on_small_sample() {
    let sets: [FeasibleSet; 2] = [
        HalfspacePolytope::l1_ball(1.0, vec![0.0, 0.0]).unwrap().into(),
        NormBall::unit(2.0, 2).unwrap().into(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for set in &sets {
        for _ in 0..8 {
            let (g, x) = random_instance(&mut rng, set);
            let s = solve_minmax(&g, &x, set, 1e-10).unwrap();
            let grid = grid_oracle(&g, &x, set, 3).unwrap();
            assert!((s.theta_fw - grid.theta).abs() <= 1e-3, "{g:?} {x:?}");
            // the grid only sees feasible points, so it cannot beat the solver
            assert!(grid.theta >= s.theta_fw - 1e-9);
        }
    }
}

#[test]
fn first_step_of_example_1a_matches_grid() {
    let p = preset("1a").unwrap();
    let x = default_start(&p.set);
    let g = p.objective.gradients(&x).unwrap();
    let s = solve_minmax(&g, &x, &p.set, 1e-10).unwrap();
    let grid = grid_oracle(&g, &x, &p.set, 0).unwrap();
    assert!((s.theta_fw - grid.theta).abs() <= 1e-3);
}

#[test]
fn stationary_instances_have_zero_gap() {
    // x on the segment between the two targets inside the disk
    let set: FeasibleSet = NormBall::unit(2.0, 2).unwrap().into();
    let (b, c) = ([0.3, 0.0], [-0.3, 0.0]);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..20 {
        let t: f64 = rng.random_range(0.0..1.0);
        let x = [b[0] * t + c[0] * (1.0 - t), 0.0];
        let g = Matrix::from_rows(&[vec![x[0] - b[0], 0.0], vec![x[0] - c[0], 0.0]]).unwrap();
        let s = solve_minmax(&g, &x, &set, 1e-10).unwrap();
        assert!(s.stationary);
        assert!(s.theta_fw.abs() <= 1e-10);
    }
    // off the segment the gap is strictly negative
    let x = [0.0, 0.5];
    let g = Matrix::from_rows(&[vec![x[0] - b[0], x[1]], vec![x[0] - c[0], x[1]]]).unwrap();
    let s = solve_minmax(&g, &x, &set, 1e-10).unwrap();
    assert!(s.theta_fw < -1e-3);
    assert!(!s.stationary);
}
