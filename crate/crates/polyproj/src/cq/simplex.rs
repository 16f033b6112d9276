//! Dense two-phase simplex for the tiny linear programs behind the MFCQ
//! check. Problems arrive in standard form (minimize `c'x` subject to
//! `A x = b`, `x >= 0`) with at most a few dozen rows, so a plain tableau
//! with Bland's anti-cycling rule is all that is needed.

use crate::numerics::Matrix;
use crate::{Error, Result};

/// Entries below this magnitude are not eligible as pivots.
const PIVOT_TOL: f64 = 1e-9;

/// Phase-1 objective above this value means no feasible point exists.
const FEAS_TOL: f64 = 1e-7;

#[derive(Clone, Debug)]
pub(crate) enum LpOutcome {
    Optimal { x: Vec<f64>, objective: f64 },
    Unbounded,
    Infeasible,
}

enum Step {
    Optimal,
    Unbounded,
    Pivoted,
}

struct Tableau {
    ncols: usize,
    rows: Vec<Vec<f64>>,
    cost: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn rhs(&self, r: usize) -> f64 {
        self.rows[r][self.ncols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let piv = self.rows[r][c];
        for e in self.rows[r].iter_mut() {
            *e /= piv;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c] == 0.0 {
                continue;
            }
            let factor = row[c];
            for (e, &p) in row.iter_mut().zip(&pivot_row) {
                *e -= factor * p;
            }
            row[c] = 0.0;
        }
        if self.cost[c] != 0.0 {
            let factor = self.cost[c];
            for (e, &p) in self.cost.iter_mut().zip(&pivot_row) {
                *e -= factor * p;
            }
            self.cost[c] = 0.0;
        }
        self.basis[r] = c;
    }

    /// One Bland step over the first `allowed` columns: the entering column
    /// is the smallest index with a negative reduced cost, the leaving row
    /// minimizes the ratio with ties broken by smallest basic index.
    fn bland_step(&mut self, allowed: usize) -> Step {
        let Some(enter) = (0..allowed).find(|&j| self.cost[j] < -PIVOT_TOL) else {
            return Step::Optimal;
        };
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..self.rows.len() {
            let a = self.rows[i][enter];
            if a <= PIVOT_TOL {
                continue;
            }
            let ratio = self.rhs(i).max(0.0) / a;
            let better = match leave {
                None => true,
                Some((li, lr)) => {
                    ratio < lr - 1e-12 || (ratio < lr + 1e-12 && self.basis[i] < self.basis[li])
                }
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        match leave {
            Some((r, _)) => {
                self.pivot(r, enter);
                Step::Pivoted
            }
            None => Step::Unbounded,
        }
    }

    fn run(&mut self, allowed: usize, max_iter: usize) -> Result<bool> {
        for _ in 0..max_iter {
            match self.bland_step(allowed) {
                Step::Optimal => return Ok(true),
                Step::Unbounded => return Ok(false),
                Step::Pivoted => {}
            }
        }
        Err(Error::CycleLimit)
    }
}

/// Minimizes `c'x` subject to `a x = b`, `x >= 0`.
pub(crate) fn solve_standard(
    a: &Matrix,
    b: &[f64],
    c: &[f64],
    max_iter: usize,
) -> Result<LpOutcome> {
    let m = a.rows();
    let n = a.cols();
    if b.len() != m || c.len() != n {
        return Err(Error::InvalidInput("LP dimensions do not match".into()));
    }
    if m == 0 {
        // No constraints: bounded only if no cost entry rewards growth.
        return Ok(if c.iter().any(|&cj| cj < -PIVOT_TOL) {
            LpOutcome::Unbounded
        } else {
            LpOutcome::Optimal {
                x: vec![0.0; n],
                objective: 0.0,
            }
        });
    }

    // Phase 1: artificial columns n..n+m form the starting basis; rows are
    // sign-flipped so every right-hand side is nonnegative.
    let ncols = n + m;
    let mut rows = Vec::with_capacity(m);
    for i in 0..m {
        let sign = if b[i] < 0.0 { -1.0 } else { 1.0 };
        let mut row = vec![0.0; ncols + 1];
        for j in 0..n {
            row[j] = sign * a.get(i, j);
        }
        row[n + i] = 1.0;
        row[ncols] = sign * b[i];
        rows.push(row);
    }
    let mut cost = vec![0.0; ncols + 1];
    for row in &rows {
        for (cj, &e) in cost.iter_mut().zip(row) {
            *cj -= e;
        }
    }
    for j in n..ncols {
        cost[j] = 0.0;
    }
    let mut t = Tableau {
        ncols,
        rows,
        cost,
        basis: (n..ncols).collect(),
    };
    if !t.run(ncols, max_iter)? {
        return Err(Error::Numeric("phase-1 LP reported unbounded".into()));
    }
    if -t.cost[ncols] > FEAS_TOL {
        return Ok(LpOutcome::Infeasible);
    }

    // Drive leftover artificials out of the basis; rows that offer no
    // structural pivot are redundant and dropped.
    let mut r = 0;
    while r < t.rows.len() {
        if t.basis[r] >= n {
            if let Some(j) = (0..n).find(|&j| t.rows[r][j].abs() > PIVOT_TOL) {
                t.pivot(r, j);
            } else {
                t.rows.remove(r);
                t.basis.remove(r);
                continue;
            }
        }
        r += 1;
    }

    // Phase 2: real costs, artificial columns barred from entering.
    t.cost = vec![0.0; ncols + 1];
    t.cost[..n].copy_from_slice(c);
    for i in 0..t.rows.len() {
        let cb = c[t.basis[i]];
        if cb != 0.0 {
            let row = t.rows[i].clone();
            for (e, &p) in t.cost.iter_mut().zip(&row) {
                *e -= cb * p;
            }
        }
    }
    if !t.run(n, max_iter)? {
        return Ok(LpOutcome::Unbounded);
    }
    let mut x = vec![0.0; n];
    for (i, &bi) in t.basis.iter().enumerate() {
        if bi < n {
            x[bi] = t.rhs(i).max(0.0);
        }
    }
    let objective = x.iter().zip(c).map(|(xi, ci)| xi * ci).sum();
    Ok(LpOutcome::Optimal { x, objective })
}
