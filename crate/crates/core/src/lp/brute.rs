//! Vertex enumeration oracle. Exponential, meant for tests only.

use super::{LinearProgram, LpError, LpSolution};

pub const BRUTE_FORCE_MAX_DIM: usize = 6;
/// Upper limit on `m + 2d` candidate facets.
pub const BRUTE_FORCE_MAX_FACETS: usize = 24;

/// Tries every choice of `d` facets (rows of `A` plus the `2d` box faces),
/// solves for their intersection and keeps the best feasible vertex.
pub fn brute_force_solve(lp: &LinearProgram) -> Result<LpSolution, LpError> {
    let d = lp.num_vars();
    let facets = lp.num_constraints() + 2 * d;
    if d > BRUTE_FORCE_MAX_DIM || facets > BRUTE_FORCE_MAX_FACETS {
        return Err(LpError::TooLarge {
            dim: d,
            facets,
            max_dim: BRUTE_FORCE_MAX_DIM,
            max_facets: BRUTE_FORCE_MAX_FACETS,
        });
    }

    // Every facet as an equation a . u = b.
    let mut planes: Vec<(Vec<f64>, f64)> = lp
        .constraints()
        .iter()
        .cloned()
        .zip(lp.rhs().iter().copied())
        .collect();
    for j in 0..d {
        let mut e = vec![0.0; d];
        e[j] = 1.0;
        planes.push((e.clone(), lp.lower_bounds()[j]));
        planes.push((e, lp.upper_bounds()[j]));
    }

    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut chosen: Vec<usize> = (0..d).collect();
    loop {
        let a: Vec<Vec<f64>> = chosen.iter().map(|&i| planes[i].0.clone()).collect();
        let b: Vec<f64> = chosen.iter().map(|&i| planes[i].1).collect();
        if let Some(u) = solve_square(a, b) {
            if lp.is_feasible(&u) {
                let value = lp.objective_at(&u);
                if best.as_ref().is_none_or(|(_, v)| value > *v) {
                    best = Some((u, value));
                }
            }
        }
        if !next_combination(&mut chosen, planes.len()) {
            break;
        }
    }

    Ok(match best {
        Some((point, value)) => LpSolution::Optimal { point, value },
        None => LpSolution::Infeasible,
    })
}

/// Advances `idx` to the next `k`-subset of `0..n` in lexicographic order.
fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    for i in (0..k).rev() {
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Gaussian elimination with partial pivoting; `None` when singular.
fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        let scale = a[piv].iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if a[piv][col].abs() <= 1e-12 * scale.max(1.0) {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            if f != 0.0 {
                for c in col..n {
                    a[r][c] -= f * a[col][c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}
