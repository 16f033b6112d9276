//! Equivalent and stable representations of a constraint family.
//!
//! At an anchor `(p̄, v̄)` with projection `x̄`, the normal `v̄ - x̄` can
//! usually be written over several different subsets of the active rows.
//! [`enumerate_kbar`] lists every base choice: an index set `K̄` of active
//! inequalities such that the equality rows plus `K̄` are independent and
//! carry strictly positive coefficients on `K̄`. For a fixed `K̄`,
//! [`enumerate_l`] lists the admissible extension sets `L`, and [`build_rkl`]
//! derives the scenario in which the rows of `K̄ ∪ L` are re-tagged as
//! equalities. A representation is stable when the anchor point can still be
//! approached inside every derived set as the parameter moves: this is
//! checked empirically by [`liminf_check`] over shrinking parameter shells,
//! and [`stable_representation_check`] quantifies over all `L`.

use crate::numerics::{dist, norm, rank_scaled_rows, recover_coefficients, sub};
use crate::projection::{self, ProjectionStatus};
use crate::sampling::{self, StreamTag};
use crate::scenario::{ConstraintKind, ConstraintSpec, Scenario};
use crate::subsets::ordered_subsets;
use crate::{Error, Result};

/// Innermost-shell distance below which a sampled liminf check passes.
pub const DIST_TOL: f64 = 1e-4;

/// Default shells for the liminf checks: geometric radii from 0.1 down to
/// about `5e-5`. The innermost shell must undercut [`DIST_TOL`] even for
/// sets whose distance decays only linearly in the parameter, which forces
/// twelve halvings rather than the looser seven used by the moduli fits.
pub fn default_liminf_radii() -> Vec<f64> {
    crate::cq::geometric_radii(0.1, 12)
}

/// Residual tolerance for representation coefficients.
const TOL_REPR: f64 = 1e-9;

/// Ceiling on enumerated subsets; active sets stay tiny at desk scale, so
/// hitting this indicates a misuse rather than a hard problem.
const SUBSET_CAP: usize = 1 << 20;

/// One base representation of the anchor normal.
#[derive(Clone, Debug, PartialEq)]
pub struct RepresentationChoice {
    /// Active inequality rows carrying the normal, ascending global indices.
    pub kbar: Vec<usize>,
    /// Coefficients over the equality block followed by `kbar`; strictly
    /// positive on the `kbar` entries.
    pub lambda_bar: Vec<f64>,
}

/// Lists all valid `K̄` at the anchor, ordered by size then lexicographically.
///
/// The anchor projection `x̄ = P(v̄, p̄)` is computed internally. A subset
/// qualifies when the equality rows plus the subset's rows are linearly
/// independent and the unique coefficient solve reproduces `v̄ - x̄` within
/// `1e-9` with strictly positive weights on the subset. `K̄ = ∅` qualifies
/// exactly when the normal lies in the span of the equality rows alone.
pub fn enumerate_kbar(
    s: &Scenario,
    pbar: &[f64],
    vbar: &[f64],
) -> Result<Vec<RepresentationChoice>> {
    let poly = s.instantiate(pbar)?;
    let res = projection::project(&poly, vbar)?;
    if res.status != ProjectionStatus::Optimal {
        return Err(Error::AnchorInfeasible);
    }
    let w = sub(vbar, &res.x);
    let active = projection::active_set(&poly, &res.x)?;
    let q = poly.q();
    let pool: Vec<usize> = active.into_iter().filter(|&i| i >= q).collect();
    let eq_rows: Vec<Vec<f64>> = (0..q).map(|i| poly.row(i).to_vec()).collect();
    let mut out = Vec::new();
    for subset in ordered_subsets(&pool, SUBSET_CAP)? {
        let mut basis = eq_rows.clone();
        basis.extend(subset.iter().map(|&i| poly.row(i).to_vec()));
        let coeffs = if basis.is_empty() {
            if norm(&w) > TOL_REPR * (1.0 + norm(vbar)) {
                continue;
            }
            Vec::new()
        } else {
            let refs: Vec<&[f64]> = basis.iter().map(|r| r.as_slice()).collect();
            if rank_scaled_rows(s.n(), &refs)? != basis.len() {
                continue;
            }
            match recover_coefficients(&basis, &w, TOL_REPR) {
                Ok(c) => c,
                Err(Error::DependentInput) | Err(Error::NotInSpan) => continue,
                Err(e) => return Err(e),
            }
        };
        if coeffs[q..].iter().any(|&c| c <= crate::numerics::TAU_POS) {
            continue;
        }
        out.push(RepresentationChoice {
            kbar: subset,
            lambda_bar: coeffs,
        });
    }
    if out.is_empty() {
        return Err(Error::NoRepresentation);
    }
    Ok(out)
}

/// Lists every extension set `L`: subsets of the active inequalities outside
/// `kbar` whose rows, together with the equality block and `kbar`, stay
/// linearly independent at `p̄`. The empty set is included whenever `kbar`
/// itself is admissible. Ordered by size, then lexicographically.
pub fn enumerate_l(
    s: &Scenario,
    pbar: &[f64],
    xbar: &[f64],
    kbar: &[usize],
) -> Result<Vec<Vec<usize>>> {
    let poly = s.instantiate(pbar)?;
    let q = poly.q();
    if kbar.iter().any(|&i| i < q || i >= poly.m()) {
        return Err(Error::InvalidInput(
            "kbar must index inequality rows".into(),
        ));
    }
    let active = projection::active_set(&poly, xbar)?;
    let pool: Vec<usize> = active
        .into_iter()
        .filter(|&i| i >= q && !kbar.contains(&i))
        .collect();
    let base: Vec<&[f64]> = (0..q).chain(kbar.iter().copied()).map(|i| poly.row(i)).collect();
    let mut out = Vec::new();
    for subset in ordered_subsets(&pool, SUBSET_CAP)? {
        let mut rows = base.clone();
        rows.extend(subset.iter().map(|&i| poly.row(i)));
        if rank_scaled_rows(s.n(), &rows)? == rows.len() {
            out.push(subset);
        }
    }
    Ok(out)
}

/// A derived scenario in which the rows of `K̄ ∪ L` are equalities.
#[derive(Clone, Debug)]
pub struct RklScenario {
    /// The re-tagged scenario. Its equality block is the original equality
    /// block followed by the promoted rows, in ascending base order; the
    /// remaining inequalities follow, also in base order.
    pub scenario: Scenario,
    pub kbar: Vec<usize>,
    pub l: Vec<usize>,
    /// Maps each derived row index to the base row it came from.
    pub to_base: Vec<usize>,
}

/// Re-tags the rows `kbar ∪ L` of `s` as equalities, keeping every
/// expression unchanged. When the scenario has anchors, the promoted rows
/// plus the equality block must be independent at the anchor parameter.
pub fn build_rkl(s: &Scenario, kbar: &[usize], l: &[usize]) -> Result<RklScenario> {
    let q = s.q();
    let m = s.m();
    let mut promoted: Vec<usize> = kbar.iter().chain(l.iter()).copied().collect();
    promoted.sort_unstable();
    if promoted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InadmissibleL);
    }
    if promoted.iter().any(|&i| i < q || i >= m) {
        return Err(Error::InadmissibleL);
    }
    if let Some(a) = s.anchors() {
        let poly = s.instantiate(&a.p)?;
        let rows: Vec<&[f64]> = (0..q)
            .chain(promoted.iter().copied())
            .map(|i| poly.row(i))
            .collect();
        if rank_scaled_rows(s.n(), &rows)? != rows.len() {
            return Err(Error::InadmissibleL);
        }
    }
    let mut to_base: Vec<usize> = (0..q).chain(promoted.iter().copied()).collect();
    to_base.extend((q..m).filter(|i| !promoted.contains(i)));
    let eq_count = q + promoted.len();
    let constraints: Vec<ConstraintSpec> = to_base
        .iter()
        .enumerate()
        .map(|(j, &i)| ConstraintSpec {
            kind: if j < eq_count {
                ConstraintKind::Eq
            } else {
                ConstraintKind::Ineq
            },
            ..s.constraints()[i].clone()
        })
        .collect();
    let scenario = Scenario::new(
        s.n(),
        s.d(),
        constraints,
        s.anchors().cloned(),
        s.domain().cloned(),
    )?;
    let mut kbar = kbar.to_vec();
    kbar.sort_unstable();
    let mut l = l.to_vec();
    l.sort_unstable();
    Ok(RklScenario {
        scenario,
        kbar,
        l,
        to_base,
    })
}

/// Result of a sampled lower-limit check.
#[derive(Clone, Debug)]
pub struct LiminfCheck {
    pub holds: bool,
    /// Largest `dist(x̄, C(p))` per shell, outermost first; infeasible
    /// parameters contribute `+inf`.
    pub shell_max_dist: Vec<f64>,
    /// Log-log slope of shell distance against shell radius, when at least
    /// two shells have finite positive distances.
    pub fitted_rate: Option<f64>,
}

/// Samples parameters on spheres of the given radii and measures how far
/// `x̄` is from the instantiated set. The check passes when the innermost
/// shell's worst distance is below [`DIST_TOL`] and the shell maxima are
/// non-increasing within 10% slack.
pub fn liminf_check(
    s: &Scenario,
    pbar: &[f64],
    xbar: &[f64],
    radii: &[f64],
    samples_per_radius: usize,
    seed: u64,
) -> Result<LiminfCheck> {
    crate::cq::validate_radii(radii)?;
    let mut shell_max_dist = Vec::with_capacity(radii.len());
    for (j, &r) in radii.iter().enumerate() {
        let dists = sampling::par_map(samples_per_radius, |k| -> Result<f64> {
            let mut rng = sampling::stream(seed, StreamTag::Liminf, j as u64, k as u64);
            let p = sampling::sample_in_domain(&mut rng, s.domain_ball(), |g| {
                sampling::on_sphere(g, pbar, r)
            });
            let poly = s.instantiate(&p)?;
            let res = projection::project(&poly, xbar)?;
            Ok(if res.status == ProjectionStatus::Optimal {
                dist(xbar, &res.x)
            } else {
                f64::INFINITY
            })
        });
        let mut shell_max = 0.0f64;
        for d in dists {
            shell_max = shell_max.max(d?);
        }
        shell_max_dist.push(shell_max);
    }
    let monotone = shell_max_dist
        .windows(2)
        .all(|w| w[1] <= 1.1 * w[0] + 1e-12);
    let holds = monotone && *shell_max_dist.last().unwrap() <= DIST_TOL;
    Ok(LiminfCheck {
        holds,
        fitted_rate: loglog_slope(radii, &shell_max_dist),
        shell_max_dist,
    })
}

/// Least-squares slope of `ln(dist)` against `ln(radius)` over shells with
/// finite positive distances.
fn loglog_slope(radii: &[f64], dists: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = radii
        .iter()
        .zip(dists)
        .filter(|(_, &d)| d.is_finite() && d > 0.0)
        .map(|(&r, &d)| (r.ln(), d.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Per-`L` outcome of [`stable_representation_check`].
#[derive(Clone, Debug)]
pub struct PerLCheck {
    pub l: Vec<usize>,
    pub check: LiminfCheck,
}

#[derive(Clone, Debug)]
pub struct StableCheck {
    /// True when the liminf check passes for every admissible `L`.
    pub stable: bool,
    pub per_l: Vec<PerLCheck>,
    /// Anchor projection the checks were run at.
    pub xbar: Vec<f64>,
}

/// Runs [`liminf_check`] on the derived scenario of every admissible `L`
/// for the given `kbar`. The representation is stable when all pass.
pub fn stable_representation_check(
    s: &Scenario,
    pbar: &[f64],
    vbar: &[f64],
    kbar: &[usize],
    radii: &[f64],
    samples_per_radius: usize,
    seed: u64,
) -> Result<StableCheck> {
    let poly = s.instantiate(pbar)?;
    let res = projection::project(&poly, vbar)?;
    if res.status != ProjectionStatus::Optimal {
        return Err(Error::AnchorInfeasible);
    }
    let xbar = res.x;
    let mut per_l = Vec::new();
    for l in enumerate_l(s, pbar, &xbar, kbar)? {
        let rkl = build_rkl(s, kbar, &l)?;
        let check = liminf_check(&rkl.scenario, pbar, &xbar, radii, samples_per_radius, seed)?;
        per_l.push(PerLCheck { l, check });
    }
    Ok(StableCheck {
        stable: !per_l.is_empty() && per_l.iter().all(|c| c.check.holds),
        per_l,
        xbar,
    })
}

/// Result of a sampled equivalence check between two scenarios.
#[derive(Clone, Debug)]
pub struct EquivalenceCheck {
    /// True when no sampled projection of either scenario strays more than
    /// `1e-7` from the other's set.
    pub equivalent: bool,
    pub max_mismatch: f64,
    pub pairs_checked: usize,
}

/// Spot-checks that two scenarios describe the same sets: for random
/// `(p, v)` near the given centers, each scenario's projection must lie
/// (within `1e-7`) in the other scenario's set. Both-empty sets agree;
/// one-sided emptiness counts as an infinite mismatch.
#[allow(clippy::too_many_arguments)]
pub fn equivalence_spot_check(
    a: &Scenario,
    b: &Scenario,
    pbar: &[f64],
    radius_p: f64,
    vbar: &[f64],
    radius_v: f64,
    pairs: usize,
    seed: u64,
) -> Result<EquivalenceCheck> {
    if a.n() != b.n() || a.d() != b.d() {
        return Err(Error::InvalidInput(
            "scenarios must share x and p dimensions".into(),
        ));
    }
    let mut max_mismatch = 0.0f64;
    for k in 0..pairs {
        let mut rng = sampling::stream(seed, StreamTag::Equivalence, 0, k as u64);
        let p = sampling::sample_in_domain(&mut rng, a.domain_ball(), |g| {
            sampling::in_ball(g, pbar, radius_p)
        });
        let v = sampling::in_ball(&mut rng, vbar, radius_v);
        let pa = a.instantiate(&p)?;
        let pb = b.instantiate(&p)?;
        let ra = projection::project(&pa, &v)?;
        let rb = projection::project(&pb, &v)?;
        let mismatch = match (ra.status, rb.status) {
            (ProjectionStatus::Infeasible, ProjectionStatus::Infeasible) => 0.0,
            (ProjectionStatus::Optimal, ProjectionStatus::Optimal) => {
                let into_b = projection::project(&pb, &ra.x)?;
                let into_a = projection::project(&pa, &rb.x)?;
                if into_b.status != ProjectionStatus::Optimal
                    || into_a.status != ProjectionStatus::Optimal
                {
                    f64::INFINITY
                } else {
                    dist(&ra.x, &into_b.x).max(dist(&rb.x, &into_a.x))
                }
            }
            _ => f64::INFINITY,
        };
        max_mismatch = max_mismatch.max(mismatch);
    }
    Ok(EquivalenceCheck {
        equivalent: max_mismatch <= 1e-7,
        max_mismatch,
        pairs_checked: pairs,
    })
}
