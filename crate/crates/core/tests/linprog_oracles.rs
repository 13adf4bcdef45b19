mod common;

use common::{solve_square, subsets};
use dea_path::linprog::{feasible, solve, LinearProgram, LpStatus, DEFAULT_TOL};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `min cᵀz` s.t. `Az >= b`, `z >= 0` with positive `A`, `b`, `c`, so the
/// program is feasible and bounded.
fn random_covering_lp(rng: &mut ChaCha8Rng) -> (Vec<Vec<f64>>, Vec<f64>, Vec<f64>) {
    let n = rng.gen_range(1..=8);
    let rows = rng.gen_range(1..=6);
    let a = (0..rows).map(|_| (0..n).map(|_| rng.gen_range(0.1..5.0)).collect()).collect();
    let b = (0..rows).map(|_| rng.gen_range(0.5..10.0)).collect();
    let c = (0..n).map(|_| rng.gen_range(0.1..4.0)).collect();
    (a, b, c)
}

#[test]
fn duality_gap_closes_on_random_programs() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let (a, b, c) = random_covering_lp(&mut rng);
        let (rows, n) = (a.len(), c.len());

        let mut primal = LinearProgram::new(n);
        for (row, rhs) in a.iter().zip(&b) {
            primal.ge_row(row.clone(), *rhs);
        }
        let primal = solve(&primal.minimize(c.clone()), DEFAULT_TOL).unwrap();
        assert_eq!(primal.status, LpStatus::Optimal);

        // Dual: max bᵀw s.t. Aᵀw <= c, w >= 0 (solved as a minimisation).
        let mut dual = LinearProgram::new(rows);
        for j in 0..n {
            dual.le_row((0..rows).map(|i| a[i][j]).collect(), c[j]);
        }
        let dual = solve(&dual.minimize(b.iter().map(|v| -v).collect()), DEFAULT_TOL).unwrap();
        assert_eq!(dual.status, LpStatus::Optimal);
        let w = &dual.z;

        // Verify both certificates by direct arithmetic.
        for (row, rhs) in a.iter().zip(&b) {
            let lhs: f64 = row.iter().zip(&primal.z).map(|(p, q)| p * q).sum();
            assert!(lhs >= rhs - 1e-7);
        }
        assert!(primal.z.iter().all(|v| *v >= -1e-9));
        for j in 0..n {
            let lhs: f64 = (0..rows).map(|i| a[i][j] * w[i]).sum();
            assert!(lhs <= c[j] + 1e-7);
        }
        assert!(w.iter().all(|v| *v >= -1e-9));
        let primal_obj: f64 = c.iter().zip(&primal.z).map(|(p, q)| p * q).sum();
        let dual_obj: f64 = b.iter().zip(w).map(|(p, q)| p * q).sum();
        assert!(dual_obj <= primal_obj + 1e-7, "weak duality broken");
        assert!((primal_obj - dual_obj).abs() <= 10.0 * DEFAULT_TOL * (1.0 + primal_obj.abs()));
    }
}

/// Minimum of `cᵀz` over the vertices of `{Az <= b, 0 <= z <= u}`.
fn vertex_minimum(a: &[Vec<f64>], b: &[f64], u: &[f64], c: &[f64]) -> Option<f64> {
    let n = c.len();
    // All constraints as `g·z <= h`.
    let mut g: Vec<Vec<f64>> = a.to_vec();
    let mut h: Vec<f64> = b.to_vec();
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = -1.0;
        g.push(e.clone());
        h.push(0.0);
        e[j] = 1.0;
        g.push(e);
        h.push(u[j]);
    }
    let mut best: Option<f64> = None;
    for active in subsets(g.len(), n) {
        let sys = active.iter().map(|&k| g[k].clone()).collect();
        let Some(z) = solve_square(sys, active.iter().map(|&k| h[k]).collect()) else { continue };
        let ok = g.iter().zip(&h).all(|(row, rhs)| row.iter().zip(&z).map(|(p, q)| p * q).sum::<f64>() <= rhs + 1e-9);
        if ok {
            let v: f64 = c.iter().zip(&z).map(|(p, q)| p * q).sum();
            best = Some(best.map_or(v, |b| b.min(v)));
        }
    }
    best
}

#[test]
fn optimum_matches_vertex_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..300 {
        let n = rng.gen_range(1..=3);
        let rows = rng.gen_range(0..=4);
        let a: Vec<Vec<f64>> = (0..rows).map(|_| (0..n).map(|_| rng.gen_range(-3..=3) as f64).collect()).collect();
        let b: Vec<f64> = (0..rows).map(|_| rng.gen_range(-2..=6) as f64).collect();
        let u: Vec<f64> = (0..n).map(|_| rng.gen_range(1..=5) as f64).collect();
        let c: Vec<f64> = (0..n).map(|_| rng.gen_range(-4..=4) as f64).collect();

        let mut lp = LinearProgram::new(n);
        for (row, rhs) in a.iter().zip(&b) {
            lp.le_row(row.clone(), *rhs);
        }
        for (j, &hi) in u.iter().enumerate() {
            lp.bounds(j, 0.0, hi);
        }
        let sol = solve(&lp.minimize(c.clone()), DEFAULT_TOL).unwrap();
        match vertex_minimum(&a, &b, &u, &c) {
            Some(v) => {
                assert_eq!(sol.status, LpStatus::Optimal, "a={a:?} b={b:?}");
                assert!((sol.objective_value - v).abs() < 1e-7, "{} vs {v}", sol.objective_value);
            }
            None => assert_eq!(sol.status, LpStatus::Infeasible, "a={a:?} b={b:?}"),
        }
    }
}

/// Nonemptiness of `{z ∈ [-5, 5]² : Az <= b}` by checking every pairwise
/// intersection of boundary lines.
fn polygon_nonempty(a: &[[f64; 2]], b: &[f64]) -> bool {
    let mut g: Vec<[f64; 2]> = a.to_vec();
    let mut h = b.to_vec();
    for (row, rhs) in [([1.0, 0.0], 5.0), ([-1.0, 0.0], 5.0), ([0.0, 1.0], 5.0), ([0.0, -1.0], 5.0)] {
        g.push(row);
        h.push(rhs);
    }
    for pair in subsets(g.len(), 2) {
        let sys = pair.iter().map(|&k| g[k].to_vec()).collect();
        let Some(z) = solve_square(sys, pair.iter().map(|&k| h[k]).collect()) else { continue };
        if g.iter().zip(&h).all(|(row, rhs)| row[0] * z[0] + row[1] * z[1] <= rhs + 1e-9) {
            return true;
        }
    }
    false
}

#[test]
fn feasibility_matches_two_variable_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let (mut yes, mut no) = (0, 0);
    for _ in 0..500 {
        let rows = rng.gen_range(1..=6);
        let a: Vec<[f64; 2]> = (0..rows)
            .map(|_| [rng.gen_range(-4..=4) as f64, rng.gen_range(-4..=4) as f64])
            .collect();
        let b: Vec<f64> = (0..rows).map(|_| rng.gen_range(-8..=8) as f64).collect();
        let mut lp = LinearProgram::new(2);
        for (row, rhs) in a.iter().zip(&b) {
            lp.le_row(row.to_vec(), *rhs);
        }
        lp.bounds(0, -5.0, 5.0);
        lp.bounds(1, -5.0, 5.0);
        let expected = polygon_nonempty(&a, &b);
        assert_eq!(feasible(&lp, DEFAULT_TOL).unwrap(), expected, "a={a:?} b={b:?}");
        if expected { yes += 1 } else { no += 1 }
    }
    assert!(yes > 50 && no > 50, "oracle sample unbalanced: {yes} feasible, {no} infeasible");
}

#[test]
fn membership_examples_from_the_data_plumbing() {
    // {λ >= 0, Σλ = 1} with three variables.
    let mut lp = LinearProgram::new(3);
    lp.eq_row(vec![1.0; 3], 1.0);
    assert!(feasible(&lp, DEFAULT_TOL).unwrap());
    lp.ge_row(vec![1.0, 0.0, 0.0], 2.0);
    assert!(!feasible(&lp, DEFAULT_TOL).unwrap());
}
