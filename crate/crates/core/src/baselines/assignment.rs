//! Maximum-weight assignment (Hungarian method, shortest augmenting paths).

/// Maximum total weight of a matching that covers every row of a
/// `rows × cols` weight matrix with `rows <= cols` and weights in `[0, 1]`.
/// Returns the sum of the matched weights.
pub fn max_weight_assignment<F>(rows: usize, cols: usize, weight: F) -> f64
where
    F: Fn(usize, usize) -> f64,
{
    assert!(rows <= cols, "assignment needs rows <= cols");
    if rows == 0 {
        return 0.0;
    }
    // minimise 1 - w, 1-based with column 0 as the virtual start
    let cost = |i: usize, j: usize| 1.0 - weight(i - 1, j - 1);
    let mut pot_row = vec![0.0; rows + 1];
    let mut pot_col = vec![0.0; cols + 1];
    let mut owner = vec![0usize; cols + 1];
    let mut way = vec![0usize; cols + 1];
    let mut min_slack = vec![0.0; cols + 1];
    let mut used = vec![false; cols + 1];

    for i in 1..=rows {
        owner[0] = i;
        let mut j0 = 0;
        min_slack.fill(f64::INFINITY);
        used.fill(false);
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=cols {
                if used[j] {
                    continue;
                }
                let cur = cost(i0, j) - pot_row[i0] - pot_col[j];
                if cur < min_slack[j] {
                    min_slack[j] = cur;
                    way[j] = j0;
                }
                if min_slack[j] < delta {
                    delta = min_slack[j];
                    j1 = j;
                }
            }
            for j in 0..=cols {
                if used[j] {
                    pot_row[owner[j]] += delta;
                    pot_col[j] -= delta;
                } else {
                    min_slack[j] -= delta;
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
    (1..=cols)
        .filter(|&j| owner[j] != 0)
        .map(|j| weight(owner[j] - 1, j - 1))
        .sum()
}
