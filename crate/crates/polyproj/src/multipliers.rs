//! Lagrange multiplier analysis for projections.
//!
//! [`compute_multipliers`] finds one multiplier vector expressing a normal
//! direction over the active rows. The two reduction routines shrink a given
//! combination to a linearly independent support with the required sign
//! pattern, using a deterministic tie rule: smallest support first, then
//! lexicographically smallest index set. On top of those,
//! [`multiplier_bound_check`] and [`coefficient_band_probe`] sample a
//! neighborhood of the anchors and report how large reduced multipliers get
//! and whether they stay inside a prescribed band.

use crate::numerics::{all_finite, norm, rank_scaled, recover_coefficients, Matrix, TAU_POS};
use crate::projection::{self, ProjectionStatus};
use crate::sampling::{self, StreamTag};
use crate::scenario::{Polyhedron, Scenario};
use crate::subsets::ordered_subsets;
use crate::{Error, Result};

/// A multiplier vector over all rows of a polyhedron.
#[derive(Clone, Debug)]
pub struct MultiplierVector {
    /// One entry per constraint row, zero off the support.
    pub values: Vec<f64>,
    /// Sorted indices with nonzero values; always a subset of the active set.
    pub support: Vec<usize>,
}

/// A combination reduced to a linearly independent index set.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedCombination {
    /// Indices into the caller's vector list, ascending.
    pub indices: Vec<usize>,
    /// Coefficients aligned with `indices`.
    pub coefficients: Vec<f64>,
}

/// Residual tolerance for reduced combinations.
const TOL_REDUCE: f64 = 1e-9;

/// Residual tolerance of the cone membership in [`compute_multipliers`],
/// scaled by `1 + |w|`.
const TOL_CONE: f64 = 1e-8;

/// One multiplier vector for `w` over the rows active at `x`: `w` is written
/// as a combination with free coefficients on equality rows and nonnegative
/// coefficients on inequality rows.
///
/// The solve goes through the polar-cone route: projecting `w` onto the cone
/// `{ z : <g_i, z> = 0 on active equalities, <= 0 on active inequalities }`
/// splits `w` into that projection `z` plus the sought combination, and the
/// projection's own multipliers are the coefficients. `w` lies in the cone of
/// the active rows exactly when `z` is (numerically) zero; a residual above
/// `1e-8 * (1 + |w|)` is reported as [`Error::NotInCone`].
pub fn compute_multipliers(poly: &Polyhedron, x: &[f64], w: &[f64]) -> Result<MultiplierVector> {
    if w.len() != poly.n() {
        return Err(Error::InvalidInput("w has the wrong dimension".into()));
    }
    if !all_finite(w) {
        return Err(Error::NonFinite);
    }
    let active = projection::active_set(poly, x)?;
    let eq_idx: Vec<usize> = active.iter().copied().filter(|&i| poly.is_eq(i)).collect();
    let ineq_idx: Vec<usize> = active.iter().copied().filter(|&i| !poly.is_eq(i)).collect();
    let eq_rows: Vec<&[f64]> = eq_idx.iter().map(|&i| poly.row(i)).collect();
    let ineq_rows: Vec<&[f64]> = ineq_idx.iter().map(|&i| poly.row(i)).collect();
    let polar = Polyhedron::new(
        Matrix::from_rows(poly.n(), &eq_rows),
        vec![0.0; eq_idx.len()],
        Matrix::from_rows(poly.n(), &ineq_rows),
        vec![0.0; ineq_idx.len()],
    )?;
    let res = projection::project(&polar, w)?;
    if res.status != ProjectionStatus::Optimal {
        return Err(Error::Numeric("polar cone projection failed".into()));
    }
    if norm(&res.x) > TOL_CONE * (1.0 + norm(w)) {
        return Err(Error::NotInCone);
    }
    let mut values = vec![0.0; poly.m()];
    let local_order: Vec<usize> = eq_idx.iter().chain(ineq_idx.iter()).copied().collect();
    for (slot, &gi) in local_order.iter().enumerate() {
        values[gi] = res.lambda[slot];
    }
    let support: Vec<usize> = (0..poly.m()).filter(|&i| values[i] != 0.0).collect();
    Ok(MultiplierVector { values, support })
}

fn weighted_sum(vectors: &[Vec<f64>], lambda: &[f64]) -> Vec<f64> {
    let n = vectors.first().map_or(0, |v| v.len());
    let mut out = vec![0.0; n];
    for (v, &l) in vectors.iter().zip(lambda) {
        for (o, &e) in out.iter_mut().zip(v) {
            *o += l * e;
        }
    }
    out
}

fn validate_combination_input(vectors: &[Vec<f64>], lambda: &[f64]) -> Result<()> {
    if vectors.len() != lambda.len() {
        return Err(Error::InvalidInput(
            "vector and coefficient counts differ".into(),
        ));
    }
    let n = vectors.first().map_or(0, |v| v.len());
    for v in vectors {
        if v.len() != n {
            return Err(Error::InvalidInput("vectors differ in length".into()));
        }
        if !all_finite(v) {
            return Err(Error::NonFinite);
        }
    }
    if !all_finite(lambda) {
        return Err(Error::NonFinite);
    }
    Ok(())
}

/// Rewrites `sum_i lambda_i vectors_i` (all `lambda_i >= 0`) over a linearly
/// independent subset with strictly positive coefficients. Among all valid
/// subsets the smallest cardinality wins, then the lexicographically smallest
/// index set.
pub fn reduce_positive_combination(
    vectors: &[Vec<f64>],
    lambda: &[f64],
) -> Result<ReducedCombination> {
    validate_combination_input(vectors, lambda)?;
    if lambda.iter().any(|&l| l < -TAU_POS) {
        return Err(Error::InvalidInput(
            "coefficients must be nonnegative".into(),
        ));
    }
    let target = weighted_sum(vectors, lambda);
    let mass: f64 = vectors
        .iter()
        .zip(lambda)
        .map(|(v, &l)| l.abs() * norm(v))
        .sum();
    if norm(&target) <= TAU_POS * (1.0 + mass) {
        return Err(Error::ZeroSum);
    }
    reduce_over_subsets(&[], &[], vectors, &target)
}

/// Rewrites a combination with a sign-free block and a nonnegative block:
/// the free vectors are always kept (their coefficients may take any sign),
/// and a minimal subset of the nonnegative vectors joins them with strictly
/// positive coefficients, the whole support linearly independent. Indices in
/// the result refer to the concatenation `[free_vectors, nonneg_vectors]`.
pub fn reduce_mixed_combination(
    free_vectors: &[Vec<f64>],
    free_lambda: &[f64],
    nonneg_vectors: &[Vec<f64>],
    nonneg_lambda: &[f64],
) -> Result<ReducedCombination> {
    validate_combination_input(free_vectors, free_lambda)?;
    validate_combination_input(nonneg_vectors, nonneg_lambda)?;
    if nonneg_lambda.iter().any(|&l| l < -TAU_POS) {
        return Err(Error::InvalidInput(
            "nonnegative-block coefficients must be nonnegative".into(),
        ));
    }
    if !free_vectors.is_empty() {
        let n = free_vectors[0].len();
        if rank_scaled(&Matrix::from_vec_rows(n, free_vectors))?.rank != free_vectors.len() {
            return Err(Error::DependentFreePart);
        }
    }
    let mut target = weighted_sum(free_vectors, free_lambda);
    let nn = weighted_sum(nonneg_vectors, nonneg_lambda);
    if target.is_empty() {
        target = nn;
    } else {
        for (t, &e) in target.iter_mut().zip(&nn) {
            *t += e;
        }
    }
    reduce_over_subsets(free_vectors, free_lambda, nonneg_vectors, &target)
}

/// Shared search: keep all `free` vectors, scan subsets of the nonnegative
/// pool by (size, lex), and return the first subset whose joint basis is
/// independent, reproduces `target` within tolerance, and gets strictly
/// positive coefficients on the nonnegative part.
fn reduce_over_subsets(
    free_vectors: &[Vec<f64>],
    free_lambda: &[f64],
    nonneg_vectors: &[Vec<f64>],
    target: &[f64],
) -> Result<ReducedCombination> {
    let _ = free_lambda;
    let pool: Vec<usize> = (0..nonneg_vectors.len()).collect();
    let subsets = ordered_subsets(&pool, 1 << 20)?;
    let nf = free_vectors.len();
    for subset in subsets {
        let mut basis: Vec<Vec<f64>> = free_vectors.to_vec();
        basis.extend(subset.iter().map(|&j| nonneg_vectors[j].clone()));
        if basis.is_empty() {
            if norm(target) <= TOL_REDUCE {
                return Ok(ReducedCombination {
                    indices: Vec::new(),
                    coefficients: Vec::new(),
                });
            }
            continue;
        }
        let coeffs = match recover_coefficients(&basis, target, TOL_REDUCE) {
            Ok(c) => c,
            Err(Error::DependentInput) | Err(Error::NotInSpan) => continue,
            Err(e) => return Err(e),
        };
        if coeffs[nf..].iter().any(|&c| c <= TAU_POS) {
            continue;
        }
        let indices: Vec<usize> = (0..nf).chain(subset.iter().map(|&j| nf + j)).collect();
        return Ok(ReducedCombination {
            indices,
            coefficients: coeffs,
        });
    }
    Err(Error::Numeric(
        "no independent reduction with admissible signs found".into(),
    ))
}

/// Worst observed reduced multiplier mass over a sampled neighborhood.
#[derive(Clone, Debug)]
pub struct BoundCheck {
    /// True when `max_l1 <= bound`.
    pub ok: bool,
    /// Largest one-norm of reduced multipliers over all samples.
    pub max_l1: f64,
    /// One-norm per sample, in sample order.
    pub per_sample_l1: Vec<f64>,
    /// The `(p, v)` pair attaining `max_l1`.
    pub worst: Option<(Vec<f64>, Vec<f64>)>,
}

/// Samples `(p, v)` around the anchors, computes a multiplier vector for
/// `v - P(v,p)`, reduces it, and checks that the one-norm of the reduced
/// coefficients never exceeds `bound`.
#[allow(clippy::too_many_arguments)]
pub fn multiplier_bound_check(
    s: &Scenario,
    pbar: &[f64],
    vbar: &[f64],
    bound: f64,
    radius_p: f64,
    radius_v: f64,
    samples: usize,
    seed: u64,
) -> Result<BoundCheck> {
    if !(bound.is_finite() && bound >= 0.0) {
        return Err(Error::InvalidInput("bound must be finite".into()));
    }
    if samples == 0 {
        return Err(Error::InvalidInput("need at least one sample".into()));
    }
    let domain = s.domain_ball();
    let mut per_sample_l1 = Vec::with_capacity(samples);
    let mut max_l1 = 0.0f64;
    let mut worst = None;
    for k in 0..samples {
        let mut rng = sampling::stream(seed, StreamTag::BoundProbe, 0, k as u64);
        let p = sampling::sample_in_domain(&mut rng, domain, |r| {
            sampling::in_ball(r, pbar, radius_p)
        });
        let v = sampling::in_ball(&mut rng, vbar, radius_v);
        let poly = s.instantiate(&p)?;
        let res = projection::project(&poly, &v)?;
        if res.status != ProjectionStatus::Optimal {
            return Err(Error::Infeasible);
        }
        let w: Vec<f64> = v.iter().zip(&res.x).map(|(a, b)| a - b).collect();
        let l1 = if norm(&w) <= TOL_CONE * (1.0 + norm(&v)) {
            0.0
        } else {
            let mv = compute_multipliers(&poly, &res.x, &w)?;
            let reduced = reduce_active_multipliers(&poly, &mv)?;
            reduced.coefficients.iter().map(|c| c.abs()).sum()
        };
        per_sample_l1.push(l1);
        if l1 > max_l1 || worst.is_none() {
            max_l1 = l1.max(max_l1);
            if l1 >= max_l1 {
                worst = Some((p.clone(), v.clone()));
            }
        }
    }
    Ok(BoundCheck {
        ok: max_l1 <= bound,
        max_l1,
        per_sample_l1,
        worst,
    })
}

/// Splits a multiplier vector into its equality (sign-free) and inequality
/// (nonnegative) parts and reduces the combination. Tiny negative inequality
/// entries left by the solver are clamped to zero first.
fn reduce_active_multipliers(
    poly: &Polyhedron,
    mv: &MultiplierVector,
) -> Result<ReducedCombination> {
    let mut free_vectors = Vec::new();
    let mut free_lambda = Vec::new();
    let mut nonneg_vectors = Vec::new();
    let mut nonneg_lambda = Vec::new();
    for &i in &mv.support {
        if poly.is_eq(i) {
            free_vectors.push(poly.row(i).to_vec());
            free_lambda.push(mv.values[i]);
        } else {
            nonneg_vectors.push(poly.row(i).to_vec());
            nonneg_lambda.push(mv.values[i].max(0.0));
        }
    }
    reduce_mixed_combination(&free_vectors, &free_lambda, &nonneg_vectors, &nonneg_lambda)
}

/// Per-sample outcome of [`coefficient_band_probe`].
#[derive(Clone, Debug)]
pub struct BandSample {
    pub p: Vec<f64>,
    pub shell: usize,
    /// Worst band excess over the best admissible re-tagging set; zero when
    /// some representation fits entirely inside the band.
    pub violation: f64,
    /// The re-tagging set that attained the violation, if any representation
    /// existed at all.
    pub best_l: Option<Vec<usize>>,
}

#[derive(Clone, Debug)]
pub struct BandProbe {
    pub max_band_violation: f64,
    pub per_sample: Vec<BandSample>,
}

/// Checks how far sampled multiplier representations drift from a base
/// representation: for parameters `p` in shrinking balls around the anchor,
/// the normal `vbar - P(vbar, p)` is re-expressed over the rows `I1 ∪ kbar`
/// plus each admissible extension set `L`, and the coefficients are compared
/// against the band `[lambda_bar - eps, lambda_bar + eps]` (and `[0, eps]`
/// on `L`). Three geometric shells of `radius`, `radius/2`, `radius/4` are
/// sampled round-robin.
#[allow(clippy::too_many_arguments)]
pub fn coefficient_band_probe(
    s: &Scenario,
    pbar: &[f64],
    vbar: &[f64],
    kbar: &[usize],
    lambda_bar: &[f64],
    eps: f64,
    radius: f64,
    samples: usize,
    seed: u64,
) -> Result<BandProbe> {
    if !(eps.is_finite() && eps >= 0.0) {
        return Err(Error::InvalidInput("eps must be nonnegative".into()));
    }
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::InvalidInput("radius must be positive".into()));
    }
    let anchor_poly = s.instantiate(pbar)?;
    let anchor_res = projection::project(&anchor_poly, vbar)?;
    if anchor_res.status != ProjectionStatus::Optimal {
        return Err(Error::AnchorInfeasible);
    }
    let xbar = anchor_res.x.clone();
    let base: Vec<usize> = (0..s.q()).chain(kbar.iter().copied()).collect();
    if base.len() != lambda_bar.len() {
        return Err(Error::InvalidInput(
            "lambda_bar must align with I1 followed by kbar".into(),
        ));
    }
    let l_choices = crate::representations::enumerate_l(s, pbar, &xbar, kbar)?;
    let domain = s.domain_ball();
    let mut per_sample = Vec::with_capacity(samples);
    let mut max_violation = 0.0f64;

    for k in 0..samples {
        let shell = k % 3;
        let r = radius * 0.5f64.powi(shell as i32);
        let mut rng = sampling::stream(seed, StreamTag::BandProbe, shell as u64, k as u64);
        let p = sampling::sample_in_domain(&mut rng, domain, |g| sampling::in_ball(g, pbar, r));
        let poly = s.instantiate(&p)?;
        let res = projection::project(&poly, vbar)?;
        if res.status != ProjectionStatus::Optimal {
            return Err(Error::Infeasible);
        }
        let w: Vec<f64> = vbar.iter().zip(&res.x).map(|(a, b)| a - b).collect();

        let mut best: Option<(f64, Vec<usize>)> = None;
        for l in &l_choices {
            let idx: Vec<usize> = base.iter().chain(l.iter()).copied().collect();
            let basis: Vec<Vec<f64>> = idx.iter().map(|&i| poly.row(i).to_vec()).collect();
            let coeffs = match recover_coefficients(&basis, &w, TOL_REDUCE) {
                Ok(c) => c,
                Err(Error::DependentInput) | Err(Error::NotInSpan) => continue,
                Err(e) => return Err(e),
            };
            let mut excess = 0.0f64;
            for (j, &c) in coeffs.iter().enumerate() {
                if j < base.len() {
                    excess = excess.max((c - lambda_bar[j]).abs() - eps);
                } else {
                    excess = excess.max(-c).max(c - eps);
                }
            }
            let excess = excess.max(0.0);
            if best.as_ref().map_or(true, |(b, _)| excess < *b) {
                best = Some((excess, l.clone()));
            }
            if excess == 0.0 {
                break;
            }
        }
        let (violation, best_l) = match best {
            Some((v, l)) => (v, Some(l)),
            None => {
                // No admissible re-tagging can express the normal; make sure
                // a representation exists at all before reporting infinity.
                compute_multipliers(&poly, &res.x, &w)
                    .map_err(|_| Error::NoRepresentation)?;
                (f64::INFINITY, None)
            }
        };
        max_violation = max_violation.max(violation);
        per_sample.push(BandSample {
            p,
            shell,
            violation,
            best_l,
        });
    }
    Ok(BandProbe {
        max_band_violation: max_violation,
        per_sample,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::dist;
    use crate::scenario::builtin;

    fn cone_poly(rows: &[&[f64]]) -> Polyhedron {
        Polyhedron::new(
            Matrix::from_rows(rows[0].len(), &[]),
            vec![],
            Matrix::from_rows(rows[0].len(), rows),
            vec![0.0; rows.len()],
        )
        .unwrap()
    }

    #[test]
    fn halfspace_multiplier() {
        let poly = cone_poly(&[&[1.0, 0.0]]);
        let mv = compute_multipliers(&poly, &[0.0, 0.0], &[2.0, 0.0]).unwrap();
        assert!((mv.values[0] - 2.0).abs() < 1e-10);
        assert_eq!(mv.support, vec![0]);
    }

    #[test]
    fn ex5_anchor_multipliers() {
        let s = builtin("ex5").unwrap();
        let poly = s.instantiate(&[0.0]).unwrap();
        let mv = compute_multipliers(&poly, &[0.0, 0.0], &[0.0, 1.0]).unwrap();
        assert!((mv.values[0] - 1.0).abs() < 1e-10);
        assert!(mv.values[1].abs() < 1e-10);
        assert!(mv.values[2].abs() < 1e-10);
    }

    #[test]
    fn three_ray_cone_reconstruction() {
        let poly = cone_poly(&[&[1.0, 0.0], &[0.0, 1.0], &[1.0, 1.0]]);
        let w = [2.0, 2.0];
        let mv = compute_multipliers(&poly, &[0.0, 0.0], &w).unwrap();
        let recon = weighted_sum(
            &(0..3).map(|i| poly.row(i).to_vec()).collect::<Vec<_>>(),
            &mv.values,
        );
        assert!(dist(&recon, &w) <= 1e-8 * (1.0 + norm(&w)));
        assert!(mv.values.iter().all(|&l| l >= -1e-10));
    }

    #[test]
    fn outside_cone_rejected() {
        let poly = cone_poly(&[&[1.0, 0.0]]);
        assert_eq!(
            compute_multipliers(&poly, &[0.0, 0.0], &[-1.0, 0.0]).unwrap_err(),
            Error::NotInCone
        );
    }

    #[test]
    fn positive_reduction_tie_rules() {
        // Three rays, the diagonal replicates the sum of the axes.
        let vs = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]];
        let r = reduce_positive_combination(&vs, &[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(r.indices, vec![2]);
        assert!((r.coefficients[0] - 2.0).abs() < 1e-10);

        // Already independent input is unchanged.
        let vs2 = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        let r2 = reduce_positive_combination(&vs2, &[1.0, 1.0]).unwrap();
        assert_eq!(r2.indices, vec![0, 1]);

        // Proportional rows: the smaller index wins.
        let vs3 = vec![vec![1.0, 0.0], vec![2.0, 0.0]];
        let r3 = reduce_positive_combination(&vs3, &[1.0, 1.0]).unwrap();
        assert_eq!(r3.indices, vec![0]);
        assert!((r3.coefficients[0] - 3.0).abs() < 1e-10);
    }

    #[test]
    fn zero_sum_is_an_error() {
        let vs = vec![vec![1.0, 0.0], vec![-1.0, 0.0]];
        assert_eq!(
            reduce_positive_combination(&vs, &[1.0, 1.0]).unwrap_err(),
            Error::ZeroSum
        );
    }

    #[test]
    fn mixed_reduction_folds_dependent_nonneg_row() {
        let free = vec![vec![1.0, 0.0]];
        let nonneg = vec![vec![2.0, 0.0]];
        let r = reduce_mixed_combination(&free, &[1.0], &nonneg, &[1.0]).unwrap();
        assert_eq!(r.indices, vec![0]);
        assert!((r.coefficients[0] - 3.0).abs() < 1e-10);
    }

    #[test]
    fn mixed_reduction_delegates_when_free_empty() {
        let nonneg = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]];
        let r = reduce_mixed_combination(&[], &[], &nonneg, &[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(r.indices, vec![2]);
    }

    #[test]
    fn mixed_reduction_picks_smaller_index_on_tie() {
        let free = vec![vec![1.0, 0.0]];
        let nonneg = vec![vec![0.0, 1.0], vec![0.0, 2.0]];
        let r = reduce_mixed_combination(&free, &[1.0], &nonneg, &[1.0, 1.0]).unwrap();
        assert_eq!(r.indices, vec![0, 1]);
        assert!((r.coefficients[0] - 1.0).abs() < 1e-10);
        assert!((r.coefficients[1] - 3.0).abs() < 1e-10);
    }

    #[test]
    fn mixed_reduction_rejects_dependent_free_block() {
        let free = vec![vec![1.0, 0.0], vec![2.0, 0.0]];
        assert_eq!(
            reduce_mixed_combination(&free, &[1.0, 1.0], &[], &[]).unwrap_err(),
            Error::DependentFreePart
        );
    }

    #[test]
    fn reductions_reproduce_sum_and_stay_independent() {
        let vs = vec![
            vec![1.0, 0.0, 0.5],
            vec![0.0, 1.0, -0.5],
            vec![1.0, 1.0, 0.0],
            vec![0.5, 0.25, 0.25],
        ];
        let lam = [0.3, 0.7, 1.1, 0.2];
        let target = weighted_sum(&vs, &lam);
        let r = reduce_positive_combination(&vs, &lam).unwrap();
        let basis: Vec<Vec<f64>> = r.indices.iter().map(|&i| vs[i].clone()).collect();
        let recon = weighted_sum(&basis, &r.coefficients);
        assert!(dist(&recon, &target) <= 1e-9 * (1.0 + norm(&target)));
        assert!(r.coefficients.iter().all(|&c| c > TAU_POS));
        let rank = rank_scaled(&Matrix::from_vec_rows(3, &basis)).unwrap().rank;
        assert_eq!(rank, r.indices.len());
    }

    #[test]
    fn bound_check_on_fixed_normals() {
        let s = builtin("hatc-demo").unwrap();
        let a = s.anchors().unwrap().clone();
        let b = multiplier_bound_check(&s, &a.p, &a.v, 10.0, 0.1, 0.1, 16, 42).unwrap();
        assert!(b.ok, "max_l1 = {}", b.max_l1);
        assert!(b.max_l1 <= 3.0);

        let strict = multiplier_bound_check(&s, &a.p, &a.v, 0.0, 0.1, 0.1, 16, 42).unwrap();
        assert!(!strict.ok);
    }

    #[test]
    fn band_probe_zero_violation_on_stable_scenario() {
        let s = builtin("ex6s").unwrap();
        let a = s.anchors().unwrap().clone();
        let probe =
            coefficient_band_probe(&s, &a.p, &a.v, &[2], &[1.0], 0.2, 0.05, 24, 42).unwrap();
        assert_eq!(probe.max_band_violation, 0.0);
    }

    #[test]
    fn band_probe_shrinks_with_shells() {
        // With a very tight band the violation tracks |p|/2, so inner shells
        // must not be worse than the outer one.
        let s = builtin("ex6s").unwrap();
        let a = s.anchors().unwrap().clone();
        let probe =
            coefficient_band_probe(&s, &a.p, &a.v, &[2], &[1.0], 1e-9, 0.2, 48, 42).unwrap();
        let shell_max = |sh: usize| {
            probe
                .per_sample
                .iter()
                .filter(|b| b.shell == sh)
                .map(|b| b.violation)
                .fold(0.0f64, f64::max)
        };
        assert!(shell_max(1) <= shell_max(0) * 1.1 + 1e-12);
        assert!(shell_max(2) <= shell_max(1) * 1.1 + 1e-12);
        assert!(probe.max_band_violation > 0.0);
    }
}
