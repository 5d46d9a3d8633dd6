//! Dense two-phase simplex for the small master problems of the dual
//! saddle-point solver: minimize the worst linear cut over the simplex.
//!
//! Problem sizes stay tiny (tens to a few hundred rows), so a plain dense
//! tableau with Bland's anti-cycling rule is both adequate and predictable.

use crate::{Error, Result};

/// min c.x subject to A x = b, x >= 0 (b is made nonnegative internally).
/// Returns (x, objective).
pub fn solve_standard_form(
    c: &[f64],
    a_rows: &[Vec<f64>],
    b: &[f64],
) -> Result<(Vec<f64>, f64)> {
    let m = a_rows.len();
    let n = c.len();
    if b.len() != m || a_rows.iter().any(|r| r.len() != n) {
        return Err(Error::Numerical("inconsistent LP dimensions".into()));
    }

    // Tableau with artificial basis: columns = n structural + m artificial,
    // plus the rhs column.
    let cols = n + m;
    let mut t = vec![vec![0.0_f64; cols + 1]; m];
    for i in 0..m {
        let flip = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            t[i][j] = flip * a_rows[i][j];
        }
        t[i][n + i] = 1.0;
        t[i][cols] = flip * b[i];
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    // Phase 1: minimize the artificial sum.
    let mut phase1_cost = vec![0.0_f64; cols];
    for j in n..cols {
        phase1_cost[j] = 1.0;
    }
    simplex_core(&mut t, &mut basis, &phase1_cost, cols)?;
    let phase1_value: f64 = basis
        .iter()
        .enumerate()
        .map(|(i, &bj)| if bj >= n { t[i][cols] } else { 0.0 })
        .sum();
    if phase1_value > 1e-9 {
        return Err(Error::Numerical(format!(
            "infeasible master LP (phase-1 residual {phase1_value})"
        )));
    }
    // Pivot remaining artificials out of the basis where possible.
    for i in 0..m {
        if basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| t[i][j].abs() > 1e-9) {
                pivot(&mut t, &mut basis, i, j, cols);
            }
        }
    }

    // Phase 2 on the structural costs; artificial columns are frozen by
    // giving them a prohibitive cost.
    let mut phase2_cost = vec![0.0_f64; cols];
    phase2_cost[..n].copy_from_slice(c);
    for j in n..cols {
        phase2_cost[j] = 1e30;
    }
    simplex_core(&mut t, &mut basis, &phase2_cost, cols)?;

    let mut x = vec![0.0_f64; n];
    for (i, &bj) in basis.iter().enumerate() {
        if bj < n {
            x[bj] = t[i][cols];
        }
    }
    let obj = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    Ok((x, obj))
}

/// Bland-rule simplex iterations on a tableau in canonical form.
fn simplex_core(
    t: &mut [Vec<f64>],
    basis: &mut [usize],
    cost: &[f64],
    cols: usize,
) -> Result<()> {
    let m = t.len();
    for _ in 0..200_000 {
        // Simplex multipliers of the current basis.
        let mut y = vec![0.0_f64; m];
        for (i, &bj) in basis.iter().enumerate() {
            y[i] = cost[bj];
        }
        let mut enter = None;
        for j in 0..cols {
            let mut red = cost[j];
            for i in 0..m {
                red -= y[i] * t[i][j];
            }
            if red < -1e-9 {
                enter = Some(j);
                break; // Bland: smallest index
            }
        }
        let Some(j) = enter else {
            return Ok(());
        };
        // Ratio test, Bland tie-break on the leaving basis index.
        let mut leave: Option<usize> = None;
        let mut best = f64::INFINITY;
        for i in 0..m {
            if t[i][j] > 1e-11 {
                let ratio = t[i][cols] / t[i][j];
                let better = ratio < best - 1e-12
                    || ((ratio - best).abs() <= 1e-12
                        && leave.is_some_and(|l| basis[i] < basis[l]));
                if better {
                    best = ratio;
                    leave = Some(i);
                }
            }
        }
        let Some(i) = leave else {
            return Err(Error::Numerical("unbounded master LP".into()));
        };
        pivot(t, basis, i, j, cols);
    }
    Err(Error::Numerical("master LP iteration cap reached".into()))
}

fn pivot(t: &mut [Vec<f64>], basis: &mut [usize], row: usize, col: usize, cols: usize) {
    let p = t[row][col];
    for v in t[row].iter_mut() {
        *v /= p;
    }
    for i in 0..t.len() {
        if i != row {
            let f = t[i][col];
            if f != 0.0 {
                for j in 0..=cols {
                    t[i][j] -= f * t[row][j];
                }
            }
        }
    }
    basis[row] = col;
}

/// Master problem of the cutting-plane stage: minimize over the simplex the
/// worst collected cut, min_alpha max_v (r_v . alpha). Returns (alpha, value).
pub fn minimax_over_simplex(cuts: &[Vec<f64>], n: usize) -> Result<(Vec<f64>, f64)> {
    if cuts.is_empty() || n == 0 {
        return Err(Error::Numerical("empty master problem".into()));
    }
    let v = cuts.len();
    // Variables: alpha (n), z, slack s_v (v). Rows: sum alpha = 1;
    // z - r_v.alpha - s_v = 0. Cut values are masses in [0, 1], so z >= 0.
    let mut c = vec![0.0_f64; n + 1 + v];
    c[n] = 1.0;
    let mut rows = Vec::with_capacity(v + 1);
    let mut b = Vec::with_capacity(v + 1);
    let mut row0 = vec![0.0_f64; n + 1 + v];
    for j in 0..n {
        row0[j] = 1.0;
    }
    rows.push(row0);
    b.push(1.0);
    for (vi, cut) in cuts.iter().enumerate() {
        let mut row = vec![0.0_f64; n + 1 + v];
        for j in 0..n {
            row[j] = -cut[j];
        }
        row[n] = 1.0;
        row[n + 1 + vi] = -1.0;
        rows.push(row);
        b.push(0.0);
    }
    let (x, z) = solve_standard_form(&c, &rows, &b)?;
    let mut alpha = x[..n].to_vec();
    // Clean tiny negatives from pivoting noise and renormalize.
    let mut s = 0.0;
    for a in alpha.iter_mut() {
        *a = a.max(0.0);
        s += *a;
    }
    if s <= 0.0 {
        return Err(Error::Numerical("degenerate master solution".into()));
    }
    for a in alpha.iter_mut() {
        *a /= s;
    }
    Ok((alpha, z))
}
