//! Fixtures and brute-force oracles shared by the integration tests. The
//! oracles avoid the simplex code entirely: they enumerate basic solutions
//! by dense Gaussian elimination.
#![allow(dead_code)]

use dea_path::{Dataset, Point, TechnologySet};
use rand::Rng;

pub fn tech(rows: &[(&str, &[f64], &[f64])]) -> TechnologySet {
    let ids = rows.iter().map(|r| r.0.to_string()).collect();
    let units = rows.iter().map(|r| Point::new(r.1.to_vec(), r.2.to_vec())).collect();
    TechnologySet::new(Dataset::new(ids, units).unwrap())
}

pub fn example32() -> TechnologySet {
    tech(&[
        ("A", &[1.0], &[1.0]),
        ("B", &[1.0], &[2.0]),
        ("C", &[2.0], &[3.0]),
        ("D", &[3.0], &[3.0]),
        ("E", &[2.0], &[1.0]),
        ("F", &[3.0], &[1.0]),
        ("G", &[4.0], &[1.0]),
    ])
}

pub fn tech1() -> TechnologySet {
    tech(&[("A", &[3.0, 2.0], &[4.0]), ("B", &[2.0, 3.0], &[4.0]), ("C", &[2.0, 2.0], &[2.0])])
}

pub fn tech2() -> TechnologySet {
    tech(&[("A", &[3.0, 2.0], &[2.0]), ("B", &[2.0, 3.0], &[2.0]), ("C", &[3.0, 3.0], &[4.0])])
}

pub fn p(x: &[f64], y: &[f64]) -> Point {
    Point::new(x.to_vec(), y.to_vec())
}

/// Random dataset; integer data in 1..=4 produces the ties that make
/// ideal technologies likely, continuous data in [1, 10) rarely does.
pub fn random_tech<R: Rng>(rng: &mut R, n: usize, m: usize, s: usize, integer: bool) -> TechnologySet {
    let draw = |rng: &mut R| if integer { rng.gen_range(1..=4) as f64 } else { rng.gen_range(1.0..10.0) };
    let ids = (0..n).map(|j| format!("u{j}")).collect();
    let units = (0..n)
        .map(|_| {
            let x = (0..m).map(|_| draw(rng)).collect();
            let y = (0..s).map(|_| draw(rng)).collect();
            Point::new(x, y)
        })
        .collect();
    TechnologySet::new(Dataset::new(ids, units).unwrap())
}

/// Solves the square system `a z = b` with partial pivoting.
pub fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut z = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * z[k]).sum();
        z[row] = (b[row] - s) / a[row][row];
    }
    Some(z)
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Vertices of `{λ ∈ simplex : Xλ <= x, Yλ >= y}`. A vertex with support
/// `J` is fixed by `Σλ = 1` and `|J| − 1` active data rows, so trying every
/// row subset `R` with a support of size `|R| + 1` finds all of them.
pub fn envelope_vertices(tech: &TechnologySet, point: &Point, tol: f64) -> Vec<Vec<f64>> {
    let units = tech.dataset().units();
    let (n, m, s) = (tech.n(), tech.m(), tech.s());
    let row = |k: usize, j: usize| if k < m { units[j].x[k] } else { units[j].y[k - m] };
    let rhs = |k: usize| if k < m { point.x[k] } else { point.y[k - m] };
    let mut out = Vec::new();
    for size in 0..=(m + s).min(n - 1) {
        for rows in subsets(m + s, size) {
            for support in subsets(n, size + 1) {
                let mut a: Vec<Vec<f64>> = rows.iter().map(|&k| support.iter().map(|&j| row(k, j)).collect()).collect();
                a.push(vec![1.0; support.len()]);
                let mut b: Vec<f64> = rows.iter().map(|&k| rhs(k)).collect();
                b.push(1.0);
                let Some(z) = solve_square(a, b) else { continue };
                if z.iter().any(|v| *v < -tol) {
                    continue;
                }
                let mut lambda = vec![0.0; n];
                for (&j, v) in support.iter().zip(z) {
                    lambda[j] = v.max(0.0);
                }
                let env = tech.combine(&lambda);
                let ok = (0..m).all(|i| env.x[i] <= point.x[i] + tol * (1.0 + point.x[i].abs()))
                    && (0..s).all(|r| env.y[r] >= point.y[r] - tol * (1.0 + point.y[r].abs()));
                if ok {
                    out.push(lambda);
                }
            }
        }
    }
    out
}

pub fn brute_contains(tech: &TechnologySet, point: &Point) -> bool {
    !envelope_vertices(tech, point, 1e-9).is_empty()
}

/// Largest range-normalised slack of `point` over the vertices, or `None`
/// when the point is outside `T`.
pub fn brute_max_normalized_slack(tech: &TechnologySet, point: &Point) -> Option<f64> {
    let scales = tech.row_scales();
    envelope_vertices(tech, point, 1e-9)
        .iter()
        .map(|lambda| {
            let env = tech.combine(lambda);
            let sx: f64 = (0..tech.m()).map(|i| (point.x[i] - env.x[i]).max(0.0) / scales.x[i]).sum();
            let sy: f64 = (0..tech.s()).map(|r| (env.y[r] - point.y[r]).max(0.0) / scales.y[r]).sum();
            sx + sy
        })
        .reduce(f64::max)
}
