//! Euclidean projection onto a concrete [`Polyhedron`].
//!
//! The production path is [`project`], a dual active-set method: starting
//! from the equality-constrained minimizer it alternately enforces the most
//! violated inequality and drops working-set rows whose multipliers turn
//! negative, re-solving the equality-constrained subproblem each time.
//! Smallest-index tie-breaking is used for both the add and the drop choice,
//! and an iteration cap of `50 * m` turns potential cycling on degenerate
//! data into an explicit [`Error::CycleLimit`].
//!
//! [`project_bruteforce`] is an independent oracle that enumerates candidate
//! active sets outright. It exists so the two routes can be compared on
//! random instances; do not fold one into the other.

use crate::numerics::{
    add, all_finite, dist, greedy_independent_rows, norm, rank_scaled, recover_coefficients,
    solve_equality_kkt, KktSolution, Matrix, TAU_RANK,
};
use crate::scenario::Polyhedron;
use crate::{Error, Result};

/// Default feasibility tolerance, scaled per row by `1 + |b_i|`.
pub const TOL_FEAS: f64 = 1e-9;

/// Default activity tolerance for [`active_set`], scaled per row by
/// `1 + |b_i|`.
pub const TOL_ACT: f64 = 1e-8;

/// Default tolerance of the normal-cone membership test.
const TOL_NORMAL: f64 = 1e-8;

/// Working-set multipliers are allowed this much negativity before a drop.
const MULTIPLIER_FLOOR: f64 = -1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProjectionStatus {
    Optimal,
    Infeasible,
}

/// Outcome of a projection. When the status is `Infeasible`, `x`, `lambda`,
/// and `active` are empty.
#[derive(Clone, Debug)]
pub struct ProjectionResult {
    /// The projected point.
    pub x: Vec<f64>,
    /// One multiplier per constraint row; `v - x = sum_i lambda[i] * g_i`,
    /// exactly zero off the final working set, and `>= -1e-10` on
    /// inequality rows.
    pub lambda: Vec<f64>,
    /// Sorted global indices of rows active at `x` as reported by the
    /// solver: every equality row plus the final inequality working set.
    pub active: Vec<usize>,
    pub status: ProjectionStatus,
    /// Subproblem solves (or, for the brute-force oracle, subsets examined).
    pub iterations: usize,
}

impl ProjectionResult {
    fn infeasible(iterations: usize) -> ProjectionResult {
        ProjectionResult {
            x: Vec::new(),
            lambda: Vec::new(),
            active: Vec::new(),
            status: ProjectionStatus::Infeasible,
            iterations,
        }
    }
}

fn stack_rows(poly: &Polyhedron, indices: &[usize]) -> (Matrix, Vec<f64>) {
    let rows: Vec<&[f64]> = indices.iter().map(|&i| poly.row(i)).collect();
    let rhs: Vec<f64> = indices.iter().map(|&i| poly.rhs(i)).collect();
    (Matrix::from_rows(poly.n(), &rows), rhs)
}

fn validate_point(poly: &Polyhedron, v: &[f64]) -> Result<()> {
    if v.len() != poly.n() {
        return Err(Error::InvalidInput(format!(
            "point has {} entries, polyhedron lives in dimension {}",
            v.len(),
            poly.n()
        )));
    }
    if !all_finite(v) {
        return Err(Error::NonFinite);
    }
    Ok(())
}

/// Projects `v` onto the polyhedron with the default feasibility tolerance.
pub fn project(poly: &Polyhedron, v: &[f64]) -> Result<ProjectionResult> {
    project_with_tol(poly, v, TOL_FEAS)
}

/// Projects `v` onto the polyhedron. If the feasible set is empty the result
/// carries [`ProjectionStatus::Infeasible`]; structural failures (iteration
/// cap, non-finite data) surface as errors instead.
pub fn project_with_tol(poly: &Polyhedron, v: &[f64], tol_feas: f64) -> Result<ProjectionResult> {
    validate_point(poly, v)?;
    if !(tol_feas.is_finite() && tol_feas > 0.0) {
        return Err(Error::InvalidInput("tol_feas must be positive".into()));
    }
    let n = poly.n();
    let q = poly.q();
    let m = poly.m();

    // Keep a maximal independent subset of the equality block. Dependent
    // equality rows are constant on the affine set spanned by the kept ones,
    // so a single residual check after the first solve decides whether they
    // are redundant or contradictory.
    let eq_refs: Vec<&[f64]> = (0..q).map(|i| poly.row(i)).collect();
    let kept_eq: Vec<usize> = greedy_independent_rows(n, &eq_refs)?;
    let dropped_eq: Vec<usize> = (0..q).filter(|i| !kept_eq.contains(i)).collect();

    let cap = 50 * m.max(1);
    let mut working: Vec<usize> = Vec::new();
    let mut iterations = 0usize;
    let mut checked_dropped_eq = false;

    loop {
        if iterations >= cap {
            return Err(Error::CycleLimit);
        }
        iterations += 1;

        let list: Vec<usize> = kept_eq.iter().chain(working.iter()).copied().collect();
        let (rows, rhs) = stack_rows(poly, &list);
        let sol = solve_equality_kkt(&rows, &rhs, v)?;
        if !all_finite(&sol.x) {
            return Err(Error::NonFinite);
        }

        if !checked_dropped_eq {
            checked_dropped_eq = true;
            for &j in &dropped_eq {
                if poly.scaled_violation(j, &sol.x) > tol_feas {
                    return Ok(ProjectionResult::infeasible(iterations));
                }
            }
        }

        // Drop phase: the smallest-index working inequality whose multiplier
        // went negative leaves the set.
        let eq_len = kept_eq.len();
        if let Some(pos) = (0..working.len())
            .find(|&k| sol.multipliers[eq_len + k] < MULTIPLIER_FLOOR)
        {
            working.remove(pos);
            continue;
        }

        // Add phase: most violated inequality, smallest index on ties.
        let mut candidate: Option<(usize, f64)> = None;
        for i in q..m {
            if working.contains(&i) {
                continue;
            }
            let viol = poly.scaled_violation(i, &sol.x);
            if viol > tol_feas && candidate.map_or(true, |(_, best)| viol > best) {
                candidate = Some((i, viol));
            }
        }
        let Some((inew, _)) = candidate else {
            return Ok(assemble(poly, &list, sol, q, &working, iterations));
        };

        let mut cand_refs: Vec<&[f64]> = list.iter().map(|&i| poly.row(i)).collect();
        cand_refs.push(poly.row(inew));
        let independent =
            rank_scaled(&Matrix::from_rows(n, &cand_refs))?.rank == cand_refs.len();
        if independent {
            let at = working.partition_point(|&w| w < inew);
            working.insert(at, inew);
            continue;
        }

        // The new normal lies in the span of the working rows. Write
        // g_new = sum_k c_k g_k; if no working inequality contributes with a
        // positive coefficient, the combination is a certificate that the
        // violated row contradicts the working rows, so the whole system is
        // empty. Otherwise exchange: one positively-contributing inequality
        // leaves and the new row enters, preserving independence.
        let basis: Vec<Vec<f64>> = list.iter().map(|&i| poly.row(i).to_vec()).collect();
        match recover_coefficients(&basis, poly.row(inew), TAU_RANK) {
            Ok(coeffs) => {
                let positive: Vec<usize> = (0..working.len())
                    .filter(|&k| coeffs[eq_len + k] > 1e-10)
                    .collect();
                match positive.first() {
                    None => return Ok(ProjectionResult::infeasible(iterations)),
                    Some(&k) => {
                        working.remove(k);
                        let at = working.partition_point(|&w| w < inew);
                        working.insert(at, inew);
                    }
                }
            }
            // Borderline rank decision: treat the row as independent after
            // all and let the next equality solve arbitrate.
            Err(Error::NotInSpan) => {
                let at = working.partition_point(|&w| w < inew);
                working.insert(at, inew);
            }
            Err(e) => return Err(e),
        }
    }
}

fn assemble(
    poly: &Polyhedron,
    list: &[usize],
    sol: KktSolution,
    q: usize,
    working: &[usize],
    iterations: usize,
) -> ProjectionResult {
    let mut lambda = vec![0.0; poly.m()];
    for (slot, &gi) in list.iter().enumerate() {
        lambda[gi] = sol.multipliers[slot];
    }
    let mut active: Vec<usize> = (0..q).chain(working.iter().copied()).collect();
    active.sort_unstable();
    ProjectionResult {
        x: sol.x,
        lambda,
        active,
        status: ProjectionStatus::Optimal,
        iterations,
    }
}

/// Independent projection oracle: enumerates every candidate active set
/// `S` containing the equality block, solves the equality-constrained
/// subproblem on an independent subset of its rows, filters candidates by
/// feasibility, activity of all of `S`, and multiplier signs, and returns the
/// closest survivor. An empty constraint set yields an `Infeasible` status,
/// same as [`project`]. Exponential in the inequality count, hence the guard.
pub fn project_bruteforce(poly: &Polyhedron, v: &[f64]) -> Result<ProjectionResult> {
    validate_point(poly, v)?;
    let n = poly.n();
    let q = poly.q();
    let m = poly.m();
    if m > 20 {
        return Err(Error::TooManyConstraints);
    }
    let n_ineq = m - q;
    let mut best: Option<(f64, ProjectionResult)> = None;
    let mut subsets = 0usize;

    for mask in 0u32..(1u32 << n_ineq) {
        subsets += 1;
        let s_idx: Vec<usize> = (0..q)
            .chain((0..n_ineq).filter(|j| mask & (1 << j) != 0).map(|j| q + j))
            .collect();
        let refs: Vec<&[f64]> = s_idx.iter().map(|&i| poly.row(i)).collect();
        let kept_local = greedy_independent_rows(n, &refs)?;
        let kept: Vec<usize> = kept_local.iter().map(|&k| s_idx[k]).collect();
        let (rows, rhs) = stack_rows(poly, &kept);
        let sol = match solve_equality_kkt(&rows, &rhs, v) {
            Ok(s) => s,
            Err(Error::DependentRows) | Err(Error::Inconsistent) => continue,
            Err(e) => return Err(e),
        };
        if !all_finite(&sol.x) {
            continue;
        }
        // Every row of S must actually be active (dropped dependent rows may
        // contradict the kept ones) and the point must be globally feasible.
        let s_active = s_idx.iter().all(|&i| {
            poly.residual(i, &sol.x).abs() <= TOL_FEAS * (1.0 + poly.rhs(i).abs())
        });
        if !s_active || poly.max_scaled_violation(&sol.x) > TOL_FEAS {
            continue;
        }
        let signs_ok = kept
            .iter()
            .zip(&sol.multipliers)
            .all(|(&gi, &mu)| poly.is_eq(gi) || mu >= MULTIPLIER_FLOOR);
        if !signs_ok {
            continue;
        }
        let d = dist(&sol.x, v);
        if best.as_ref().map_or(true, |(bd, _)| d < *bd) {
            let mut lambda = vec![0.0; m];
            for (&gi, &mu) in kept.iter().zip(&sol.multipliers) {
                lambda[gi] = mu;
            }
            let result = ProjectionResult {
                x: sol.x,
                lambda,
                active: s_idx.clone(),
                status: ProjectionStatus::Optimal,
                iterations: subsets,
            };
            best = Some((d, result));
        }
    }
    match best {
        Some((_, mut r)) => {
            r.iterations = subsets;
            Ok(r)
        }
        None => Ok(ProjectionResult::infeasible(subsets)),
    }
}

/// Indices of rows active at `x` with the default tolerance.
pub fn active_set(poly: &Polyhedron, x: &[f64]) -> Result<Vec<usize>> {
    active_set_with_tol(poly, x, TOL_ACT)
}

/// Indices of rows holding with equality at `x`: the whole equality block
/// plus inequality rows with `|<g_i,x> - b_i| <= tol_act * (1 + |b_i|)`.
/// Fails with [`Error::NotFeasible`] if any row is violated beyond the
/// tolerance.
pub fn active_set_with_tol(poly: &Polyhedron, x: &[f64], tol_act: f64) -> Result<Vec<usize>> {
    validate_point(poly, x)?;
    if !(tol_act.is_finite() && tol_act > 0.0) {
        return Err(Error::InvalidInput("tol_act must be positive".into()));
    }
    for i in 0..poly.m() {
        if poly.scaled_violation(i, x) > tol_act {
            return Err(Error::NotFeasible);
        }
    }
    let mut out: Vec<usize> = (0..poly.q()).collect();
    for i in poly.q()..poly.m() {
        if poly.residual(i, x).abs() <= tol_act * (1.0 + poly.rhs(i).abs()) {
            out.push(i);
        }
    }
    Ok(out)
}

/// Normal-cone membership with the default tolerance.
pub fn normal_cone_contains(poly: &Polyhedron, x: &[f64], w: &[f64]) -> Result<bool> {
    normal_cone_contains_with_tol(poly, x, w, TOL_NORMAL)
}

/// Tests `w` against the normal cone of the polyhedron at `x` through the
/// projection characterization: `w` is normal at `x` exactly when `x` is the
/// projection of `x + w`.
pub fn normal_cone_contains_with_tol(
    poly: &Polyhedron,
    x: &[f64],
    w: &[f64],
    tol: f64,
) -> Result<bool> {
    validate_point(poly, x)?;
    validate_point(poly, w)?;
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    if poly.max_scaled_violation(x) > tol {
        return Err(Error::NotFeasible);
    }
    let shifted = add(x, w);
    let res = project(poly, &shifted)?;
    if res.status != ProjectionStatus::Optimal {
        return Err(Error::Numeric(
            "projection of a shifted feasible point reported infeasible".into(),
        ));
    }
    Ok(dist(&res.x, x) <= tol * (1.0 + norm(w)))
}
