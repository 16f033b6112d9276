//! Constraint-qualification diagnostics.
//!
//! Three qualifications are checked at a feasible point: LICQ (active rows
//! linearly independent), MFCQ (a direction exists that is orthogonal to the
//! equality rows and strictly decreases every active inequality, found by a
//! small box-bounded linear program), and RCRCQ (every index set between the
//! equality block and the full active set keeps a constant row rank for
//! parameters near the anchor, certified by sampling). The module also hosts
//! two smaller utilities in the same spirit: greedy removal of redundant
//! equality rows and a sampled rank-persistence check for a fixed row set.

mod simplex;

use crate::numerics::{dist, rank_scaled_rows, Matrix};
use crate::projection::{self, ProjectionStatus};
use crate::sampling::{self, StreamTag};
use crate::scenario::{Polyhedron, Scenario};
use crate::subsets::ordered_subsets;
use crate::{Error, Result};

/// MFCQ holds when the optimal margin of the direction LP exceeds this.
pub const MFCQ_MARGIN_TOL: f64 = 1e-9;

/// Default ceiling on the number of index sets scanned by [`rcrcq_check`].
pub const DEFAULT_SUBSET_CAP: usize = 4096;

/// Outcome of the MFCQ direction search.
#[derive(Clone, Debug)]
pub struct MfcqOutcome {
    pub holds: bool,
    /// A strictly feasible direction, present only when `holds`. The reported
    /// direction is the minimum-norm point of the optimal-margin slice, so it
    /// is unique and reproducible.
    pub certificate_h: Option<Vec<f64>>,
    /// Optimal value of the LP; `+inf` when no inequality is active.
    pub margin: f64,
}

/// Rank record for one index set scanned by [`rcrcq_check`].
#[derive(Clone, Debug, PartialEq)]
pub struct RcrcqSubset {
    /// Global row indices, equality block included, ascending.
    pub subset: Vec<usize>,
    pub rank_at_anchor: usize,
    /// Extremes over the sampled parameters only; they equal
    /// `rank_at_anchor` when no samples were requested.
    pub min_rank_sampled: usize,
    pub max_rank_sampled: usize,
    pub holds: bool,
}

/// Combined diagnostics at one anchor.
#[derive(Clone, Debug)]
pub struct CqReport {
    pub licq: bool,
    pub mfcq: MfcqOutcome,
    pub rcrcq: Vec<RcrcqSubset>,
    pub overall_rcrcq: bool,
}

/// True iff the rows active at `x` are linearly independent.
pub fn licq_check(poly: &Polyhedron, x: &[f64]) -> Result<bool> {
    let active = projection::active_set(poly, x)?;
    let rows: Vec<&[f64]> = active.iter().map(|&i| poly.row(i)).collect();
    Ok(rank_scaled_rows(poly.n(), &rows)? == rows.len())
}

/// MFCQ at `x`: maximizes `s` over directions `h` with `E h = 0`,
/// `<g_i, h> <= -s` for every active inequality, and `-1 <= h_j <= 1`.
///
/// The box bound makes the program finite; the qualification holds exactly
/// when the optimal margin is positive (above [`MFCQ_MARGIN_TOL`]). Equality
/// rows must be independent, mirroring the definition's precondition.
pub fn mfcq_check(poly: &Polyhedron, x: &[f64]) -> Result<MfcqOutcome> {
    let active = projection::active_set(poly, x)?;
    let n = poly.n();
    let q = poly.q();
    let eq_rows: Vec<&[f64]> = (0..q).map(|i| poly.row(i)).collect();
    if rank_scaled_rows(n, &eq_rows)? != q {
        return Err(Error::IndependenceViolation);
    }
    let act_ineq: Vec<usize> = active.into_iter().filter(|&i| i >= q).collect();
    if act_ineq.is_empty() {
        // Nothing to decrease: h = 0 certifies the condition vacuously.
        return Ok(MfcqOutcome {
            holds: true,
            certificate_h: Some(vec![0.0; n]),
            margin: f64::INFINITY,
        });
    }

    // Standard form with h = u - 1 (so 0 <= u <= 2), a margin variable s,
    // one slack per active inequality, and one slack per box row.
    let k = act_ineq.len();
    let cols = 2 * n + k + 1;
    let s_col = n;
    let mut lp_rows: Vec<Vec<f64>> = Vec::with_capacity(q + k + n);
    let mut rhs = Vec::with_capacity(q + k + n);
    for i in 0..q {
        let mut row = vec![0.0; cols];
        row[..n].copy_from_slice(poly.row(i));
        rhs.push(poly.row(i).iter().sum());
        lp_rows.push(row);
    }
    for (t, &gi) in act_ineq.iter().enumerate() {
        let mut row = vec![0.0; cols];
        row[..n].copy_from_slice(poly.row(gi));
        row[s_col] = 1.0;
        row[n + 1 + t] = 1.0;
        rhs.push(poly.row(gi).iter().sum());
        lp_rows.push(row);
    }
    for j in 0..n {
        let mut row = vec![0.0; cols];
        row[j] = 1.0;
        row[n + 1 + k + j] = 1.0;
        rhs.push(2.0);
        lp_rows.push(row);
    }
    let mut c = vec![0.0; cols];
    c[s_col] = -1.0;
    let out = simplex::solve_standard(&Matrix::from_vec_rows(cols, &lp_rows), &rhs, &c, 10_000)?;
    let (lp_x, margin) = match out {
        simplex::LpOutcome::Optimal { x, objective } => (x, -objective),
        simplex::LpOutcome::Unbounded => {
            return Err(Error::Numeric("MFCQ direction LP unbounded".into()))
        }
        simplex::LpOutcome::Infeasible => {
            return Err(Error::Numeric("MFCQ direction LP infeasible".into()))
        }
    };
    let holds = margin > MFCQ_MARGIN_TOL;
    let certificate_h = if holds {
        Some(certificate_direction(poly, &act_ineq, margin).unwrap_or_else(|| {
            lp_x[..n].iter().map(|&u| u - 1.0).collect()
        }))
    } else {
        None
    };
    Ok(MfcqOutcome {
        holds,
        certificate_h,
        margin,
    })
}

/// Minimum-norm direction attaining (slightly under) the optimal margin:
/// the projection of the origin onto the optimal slice of the direction LP.
fn certificate_direction(poly: &Polyhedron, act_ineq: &[usize], margin: f64) -> Option<Vec<f64>> {
    let n = poly.n();
    let q = poly.q();
    let slack = 1e-10 * (1.0 + margin.abs());
    let eq_rows: Vec<&[f64]> = (0..q).map(|i| poly.row(i)).collect();
    let mut ineq_rows: Vec<Vec<f64>> = Vec::with_capacity(act_ineq.len() + 2 * n);
    let mut ineq_rhs = Vec::with_capacity(act_ineq.len() + 2 * n);
    for &i in act_ineq {
        ineq_rows.push(poly.row(i).to_vec());
        ineq_rhs.push(-margin + slack);
    }
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        ineq_rows.push(e.clone());
        ineq_rhs.push(1.0);
        for v in e.iter_mut() {
            *v = -*v;
        }
        ineq_rows.push(e);
        ineq_rhs.push(1.0);
    }
    let slice = Polyhedron::new(
        Matrix::from_rows(n, &eq_rows),
        vec![0.0; q],
        Matrix::from_vec_rows(n, &ineq_rows),
        ineq_rhs,
    )
    .ok()?;
    let res = projection::project(&slice, &vec![0.0; n]).ok()?;
    (res.status == ProjectionStatus::Optimal).then_some(res.x)
}

/// Scans every index set `J` with `I1 ⊆ J ⊆ I(p̄, x̄)` and reports whether
/// the rank of the rows in `J` stays constant over `samples` parameters drawn
/// uniformly from the `radius`-ball around `pbar` (clipped to the scenario's
/// domain). The subsets are ordered by size, then lexicographically.
pub fn rcrcq_check(
    s: &Scenario,
    pbar: &[f64],
    xbar: &[f64],
    radius: f64,
    samples: usize,
    subset_cap: usize,
    seed: u64,
) -> Result<Vec<RcrcqSubset>> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::InvalidInput("radius must be positive".into()));
    }
    let anchor = s.instantiate(pbar)?;
    let active = projection::active_set(&anchor, xbar)?;
    let q = s.q();
    let free: Vec<usize> = active.into_iter().filter(|&i| i >= q).collect();
    let subsets = ordered_subsets(&free, subset_cap)?;
    let results = sampling::par_map(subsets.len(), |si| -> Result<RcrcqSubset> {
        let mut subset: Vec<usize> = (0..q).chain(subsets[si].iter().copied()).collect();
        subset.sort_unstable();
        let anchor_rows: Vec<&[f64]> = subset.iter().map(|&i| anchor.row(i)).collect();
        let rank_at_anchor = rank_scaled_rows(s.n(), &anchor_rows)?;
        let mut min_rank = usize::MAX;
        let mut max_rank = 0;
        for k in 0..samples {
            let mut rng = sampling::stream(seed, StreamTag::RcrcqSample, si as u64, k as u64);
            let p = sampling::sample_in_domain(&mut rng, s.domain_ball(), |g| {
                sampling::in_ball(g, pbar, radius)
            });
            let poly = s.instantiate(&p)?;
            let rows: Vec<&[f64]> = subset.iter().map(|&i| poly.row(i)).collect();
            let r = rank_scaled_rows(s.n(), &rows)?;
            min_rank = min_rank.min(r);
            max_rank = max_rank.max(r);
        }
        if samples == 0 {
            min_rank = rank_at_anchor;
            max_rank = rank_at_anchor;
        }
        Ok(RcrcqSubset {
            subset,
            rank_at_anchor,
            min_rank_sampled: min_rank,
            max_rank_sampled: max_rank,
            holds: min_rank == rank_at_anchor && max_rank == rank_at_anchor,
        })
    });
    results.into_iter().collect()
}

/// Runs all three checks at the instantiated anchor point.
pub fn full_report(
    s: &Scenario,
    pbar: &[f64],
    xbar: &[f64],
    radius: f64,
    samples: usize,
    subset_cap: usize,
    seed: u64,
) -> Result<CqReport> {
    let poly = s.instantiate(pbar)?;
    let licq = licq_check(&poly, xbar)?;
    let mfcq = mfcq_check(&poly, xbar)?;
    let rcrcq = rcrcq_check(s, pbar, xbar, radius, samples, subset_cap, seed)?;
    let overall_rcrcq = rcrcq.iter().all(|r| r.holds);
    Ok(CqReport {
        licq,
        mfcq,
        rcrcq,
        overall_rcrcq,
    })
}

/// A scenario with redundant equality rows dropped.
#[derive(Clone, Debug)]
pub struct ReducedEqualities {
    /// Indices of the retained equality rows (ascending, greedy selection).
    pub kept: Vec<usize>,
    /// Same scenario with only the kept equalities; inequalities unchanged.
    pub scenario: Scenario,
}

/// Greedy smallest-index selection of a maximal independent subset of the
/// equality rows at `pbar`. The selection is made at the anchor; it is only
/// meaningful where the equality block has locally constant rank.
pub fn reduce_equalities(s: &Scenario, pbar: &[f64]) -> Result<ReducedEqualities> {
    let poly = s.instantiate(pbar)?;
    let q = s.q();
    let eq_rows: Vec<&[f64]> = (0..q).map(|i| poly.row(i)).collect();
    let kept = crate::numerics::greedy_independent_rows(s.n(), &eq_rows)?;
    let mut constraints: Vec<_> = kept.iter().map(|&i| s.constraints()[i].clone()).collect();
    constraints.extend(s.constraints()[q..].iter().cloned());
    let scenario = Scenario::new(
        s.n(),
        s.d(),
        constraints,
        s.anchors().cloned(),
        s.domain().cloned(),
    )?;
    Ok(ReducedEqualities { kept, scenario })
}

/// True iff the rows `indices` keep full rank `|indices|` at every parameter
/// sampled from the `radius`-ball around `pbar`. The rows must already be
/// independent at the anchor.
pub fn rank_persistence_check(
    s: &Scenario,
    indices: &[usize],
    pbar: &[f64],
    radius: f64,
    samples: usize,
    seed: u64,
) -> Result<bool> {
    if indices.iter().any(|&i| i >= s.m()) {
        return Err(Error::InvalidInput("row index out of range".into()));
    }
    if indices.is_empty() {
        return Ok(true);
    }
    let anchor = s.instantiate(pbar)?;
    let rows: Vec<&[f64]> = indices.iter().map(|&i| anchor.row(i)).collect();
    if rank_scaled_rows(s.n(), &rows)? != indices.len() {
        return Err(Error::DependentAtAnchor);
    }
    for k in 0..samples {
        let mut rng = sampling::stream(seed, StreamTag::RankPersist, 0, k as u64);
        let p = sampling::sample_in_domain(&mut rng, s.domain_ball(), |g| {
            sampling::in_ball(g, pbar, radius)
        });
        let poly = s.instantiate(&p)?;
        let rows: Vec<&[f64]> = indices.iter().map(|&i| poly.row(i)).collect();
        if rank_scaled_rows(s.n(), &rows)? != indices.len() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Result of the sampled active-set inclusion check.
#[derive(Clone, Debug)]
pub struct InclusionCheck {
    pub holds: bool,
    /// Radius at which the verdict was reached.
    pub radius_used: f64,
    /// Number of times the radius was halved before success.
    pub halvings: u32,
    /// Violations at the final radius.
    pub violations: usize,
    /// Active set of the anchor projection; sampled active sets must be
    /// subsets of it.
    pub anchor_active: Vec<usize>,
}

/// Checks that active sets of nearby projections only shrink: for sampled `p`
/// near the anchor, every row active at `P(v̄, p)` is also active at the
/// anchor projection. Starts at `radius0` and halves the radius up to six
/// times if violations appear (activity is only locally monotone).
pub fn active_set_inclusion_check(
    s: &Scenario,
    radius0: f64,
    samples: usize,
    seed: u64,
) -> Result<InclusionCheck> {
    let a = s.require_anchors()?.clone();
    let anchor_poly = s.instantiate(&a.p)?;
    let anchor_res = projection::project(&anchor_poly, &a.v)?;
    if anchor_res.status != ProjectionStatus::Optimal {
        return Err(Error::AnchorInfeasible);
    }
    let anchor_active = projection::active_set(&anchor_poly, &anchor_res.x)?;
    let mut radius = radius0;
    let mut last_violations = 0;
    for halvings in 0..=6u32 {
        let mut violations = 0;
        for k in 0..samples {
            let mut rng = sampling::stream(seed, StreamTag::ActiveInclusion, halvings.into(), k as u64);
            let p = sampling::sample_in_domain(&mut rng, s.domain_ball(), |g| {
                sampling::in_ball(g, &a.p, radius)
            });
            let poly = s.instantiate(&p)?;
            let res = projection::project(&poly, &a.v)?;
            if res.status != ProjectionStatus::Optimal {
                violations += 1;
                continue;
            }
            let act = projection::active_set(&poly, &res.x)?;
            if !act.iter().all(|i| anchor_active.contains(i)) {
                violations += 1;
            }
        }
        if violations == 0 {
            return Ok(InclusionCheck {
                holds: true,
                radius_used: radius,
                halvings,
                violations: 0,
                anchor_active,
            });
        }
        last_violations = violations;
        radius /= 2.0;
    }
    Ok(InclusionCheck {
        holds: false,
        radius_used: radius * 2.0,
        halvings: 6,
        violations: last_violations,
        anchor_active,
    })
}

/// Result of the sampled distance-decay check.
#[derive(Clone, Debug)]
pub struct DecayCheck {
    pub holds: bool,
    /// Distance-to-radius ratio fitted on the outermost shell.
    pub l_est: f64,
    /// Largest `dist(x̄, C(p))` seen per shell, outermost first.
    pub shell_max_dist: Vec<f64>,
}

/// Empirical companion to the MFCQ check: fits `dist(x̄, C(p)) <= l · |p-p̄|`
/// on the outermost shell and verifies the bound (with 10% slack) on every
/// inner shell. A feasibility failure at any sampled parameter counts as an
/// infinite distance and fails the check.
pub fn mfcq_distance_decay(
    s: &Scenario,
    pbar: &[f64],
    xbar: &[f64],
    radii: &[f64],
    samples: usize,
    seed: u64,
) -> Result<DecayCheck> {
    validate_radii(radii)?;
    let mut shell_max_dist = Vec::with_capacity(radii.len());
    let mut l_est = 0.0f64;
    let mut holds = true;
    for (j, &r) in radii.iter().enumerate() {
        let mut shell_max = 0.0f64;
        for k in 0..samples {
            let mut rng = sampling::stream(seed, StreamTag::MfcqDecay, j as u64, k as u64);
            let p = sampling::sample_in_domain(&mut rng, s.domain_ball(), |g| {
                sampling::on_sphere(g, pbar, r)
            });
            let gap = dist(&p, pbar).max(1e-12);
            let poly = s.instantiate(&p)?;
            let res = projection::project(&poly, xbar)?;
            let d = if res.status == ProjectionStatus::Optimal {
                dist(xbar, &res.x)
            } else {
                f64::INFINITY
            };
            shell_max = shell_max.max(d);
            if j == 0 {
                l_est = l_est.max(d / gap);
            } else if d > l_est * gap * 1.1 + 1e-9 {
                holds = false;
            }
        }
        shell_max_dist.push(shell_max);
    }
    if !l_est.is_finite() {
        holds = false;
    }
    Ok(DecayCheck {
        holds,
        l_est,
        shell_max_dist,
    })
}

pub(crate) fn validate_radii(radii: &[f64]) -> Result<()> {
    if radii.is_empty() {
        return Err(Error::InvalidInput("need at least one radius".into()));
    }
    for w in radii.windows(2) {
        if !(w[1] < w[0]) {
            return Err(Error::InvalidInput(
                "radii must be strictly decreasing".into(),
            ));
        }
    }
    if radii.iter().any(|&r| !(r.is_finite() && r > 0.0)) {
        return Err(Error::InvalidInput("radii must be positive".into()));
    }
    Ok(())
}

/// Geometric shell radii `r0 * 2^-j`, `j = 0..count`.
pub fn geometric_radii(r0: f64, count: usize) -> Vec<f64> {
    (0..count).map(|j| r0 * 0.5f64.powi(j as i32)).collect()
}
