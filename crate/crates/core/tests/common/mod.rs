#![allow(dead_code)]

use splitbuf_core::Generator;

/// Stationary vector by plain Gaussian elimination on `G^T x = 0` with the
/// last balance equation replaced by `sum(x) = 1`.
pub fn dense_oracle(gen: &Generator) -> Vec<f64> {
    let n = gen.dim();
    let g = gen.to_dense();
    // a = G^T with the last row swapped for the normalization row.
    let mut a: Vec<Vec<f64>> = (0..n).map(|r| (0..n).map(|c| g[c][r]).collect()).collect();
    a[n - 1] = vec![1.0; n];
    let mut b = vec![0.0; n];
    b[n - 1] = 1.0;

    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let tail: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    x
}

/// Truncated-geometric stationary law of an M/M/1/K queue.
pub fn mm1k_distribution(lambda: f64, mu: f64, k: usize) -> Vec<f64> {
    let rho = lambda / mu;
    let weights: Vec<f64> = (0..=k).map(|j| rho.powi(j as i32)).collect();
    let total: f64 = weights.iter().sum();
    weights.iter().map(|w| w / total).collect()
}

/// `true` when `values` never drops by more than `slack`.
pub fn non_decreasing(values: &[f64], slack: f64) -> bool {
    values.windows(2).all(|w| w[1] >= w[0] - slack)
}

pub fn non_increasing(values: &[f64], slack: f64) -> bool {
    values.windows(2).all(|w| w[1] <= w[0] + slack)
}

/// Some interior point lies strictly above both endpoints.
pub fn has_interior_maximum(values: &[f64]) -> bool {
    if values.len() < 3 {
        return false;
    }
    let (first, last) = (values[0], values[values.len() - 1]);
    values[1..values.len() - 1].iter().any(|&v| v > first && v > last)
}
