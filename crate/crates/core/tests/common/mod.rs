#![allow(dead_code)]

use fclda::dataset::{select_binary, BinaryDataset, Dataset};
use fclda::lp::LinearProgram;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Gaussian elimination with partial pivoting; `None` when singular.
pub fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

/// Textbook two-class Fisher LDA with plain loops: unit `w`, midpoint `w0`.
pub fn fisher_oracle(class1: &[Vec<f64>], class2: &[Vec<f64>]) -> (Vec<f64>, f64) {
    let p = class1[0].len();
    let mean = |xs: &[Vec<f64>]| -> Vec<f64> {
        (0..p).map(|j| xs.iter().map(|x| x[j]).sum::<f64>() / xs.len() as f64).collect()
    };
    let (m1, m2) = (mean(class1), mean(class2));
    let mut s = vec![vec![0.0; p]; p];
    for (xs, m) in [(class1, &m1), (class2, &m2)] {
        for x in xs {
            for i in 0..p {
                for j in 0..p {
                    s[i][j] += (x[i] - m[i]) * (x[j] - m[j]);
                }
            }
        }
    }
    let diff: Vec<f64> = (0..p).map(|j| m1[j] - m2[j]).collect();
    let w = gauss_solve(s, diff).expect("oracle scatter is nonsingular");
    let n = w.iter().map(|x| x * x).sum::<f64>().sqrt();
    let w: Vec<f64> = w.iter().map(|x| x / n).collect();
    let w0 = -(0..p).map(|j| w[j] * (m1[j] + m2[j])).sum::<f64>() / 2.0;
    (w, w0)
}

pub fn binary_from_rows(rows: &[(Vec<f64>, &str)]) -> BinaryDataset {
    let p = rows[0].0.len();
    let names: Vec<String> = (1..=p).map(|j| format!("x{j}")).collect();
    let ds = Dataset::new(
        rows.iter().map(|(x, _)| x.clone()).collect(),
        rows.iter().map(|(_, l)| l.to_string()).collect(),
        names.clone(),
    )
    .unwrap();
    select_binary(&ds, "a", "b", &names).unwrap()
}

/// Random bounded LP with `d` variables and `m` rows; about a third of the
/// instances have a right-hand side that may exclude every point of the box.
pub fn random_lp(rng: &mut ChaCha8Rng, d: usize, m: usize) -> LinearProgram {
    let c: Vec<f64> = (0..d).map(|_| rng.random_range(-3.0..3.0)).collect();
    let a: Vec<Vec<f64>> = (0..m)
        .map(|_| (0..d).map(|_| rng.random_range(-3.0..3.0)).collect())
        .collect();
    let infeasible_bias = rng.random_bool(0.33);
    let b: Vec<f64> = (0..m)
        .map(|_| {
            if infeasible_bias {
                rng.random_range(-8.0..1.0)
            } else {
                rng.random_range(-1.0..5.0)
            }
        })
        .collect();
    let bound = rng.random_range(0.5..4.0);
    LinearProgram::with_symmetric_box(c, a, b, bound).unwrap()
}

pub fn relative_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}
