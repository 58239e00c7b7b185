//! Minimum-cost perfect matching on a square cost matrix (Hungarian method,
//! shortest augmenting path form, O(n^3)).

/// Returns `perm` with `perm[row] = col` minimising `sum cost[row][perm[row]]`.
///
/// When the identity assignment is optimal up to round-off it is returned as
/// is, so ties never reorder rows.
pub fn min_cost_assignment(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    if n == 0 {
        return Vec::new();
    }
    assert!(cost.iter().all(|r| r.len() == n), "cost matrix must be square");

    // Potentials u (rows), v (cols); p[col] = row matched to col (1-based, 0 = none).
    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
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
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut perm = vec![0; n];
    for j in 1..=n {
        perm[p[j] - 1] = j - 1;
    }

    let total = |perm: &[usize]| -> f64 { perm.iter().enumerate().map(|(i, &j)| cost[i][j]).sum() };
    let best = total(&perm);
    let ident: f64 = (0..n).map(|i| cost[i][i]).sum();
    let scale = cost.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
    if ident <= best + 1e-12 * scale * n as f64 {
        return (0..n).collect();
    }
    perm
}
