//! Optimal assignment on small dense square weight tables.

use alloc::vec;
use alloc::vec::Vec;

/// Minimum-cost perfect assignment for an `n×n` row-major cost table.
///
/// Returns `col[i]`, the column assigned to row `i` (Hungarian method, O(n³)).
pub fn min_cost_assignment(cost: &[f64], n: usize) -> Vec<usize> {
    assert_eq!(cost.len(), n * n, "cost table must be n×n");
    let at = |i: usize, j: usize| cost[(i - 1) * n + (j - 1)];
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        owner[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = at(i0, j) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut col = vec![0usize; n];
    for j in 1..=n {
        if owner[j] > 0 {
            col[owner[j] - 1] = j - 1;
        }
    }
    col
}

/// Maximum-weight perfect assignment for an `n×n` row-major weight table.
pub fn max_weight_assignment(weight: &[f64], n: usize) -> Vec<usize> {
    let top = weight.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let cost: Vec<f64> = weight.iter().map(|w| top - w).collect();
    min_cost_assignment(&cost, n)
}
