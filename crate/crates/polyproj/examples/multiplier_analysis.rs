//! Multiplier vectors behind a projection: compute one, reduce it to an
//! independent support, bound its mass over a sampled neighborhood, and
//! probe how far sampled coefficients drift from the anchor representation.
//!
//! Run with `cargo run --example multiplier_analysis`.

use polyproj::multipliers::{
    coefficient_band_probe, compute_multipliers, multiplier_bound_check,
    reduce_positive_combination,
};
use polyproj::numerics::sub;
use polyproj::projection::project;
use polyproj::scenario::builtin;

fn main() -> polyproj::Result<()> {
    let s = builtin("ex5").expect("builtin exists");
    let anchors = s.anchors().expect("builtins carry anchors").clone();
    let poly = s.instantiate(&anchors.p)?;
    let res = project(&poly, &anchors.v)?;
    let w = sub(&anchors.v, &res.x);

    // One multiplier vector for the normal w = v - P(v).
    let mv = compute_multipliers(&poly, &res.x, &w)?;
    println!(
        "ex5 anchor: x = {:?}, normal = {:?}, multipliers {:?} on rows {:?}",
        res.x, w, mv.values, mv.support
    );

    // Any nonnegative combination reduces to an independent support with
    // positive weights; here the first two rows are opposite at p = 0 and
    // collapse onto a single one.
    let rows: Vec<Vec<f64>> = (0..poly.m()).map(|i| poly.row(i).to_vec()).collect();
    let reduced = reduce_positive_combination(&rows, &[2.0, 1.0, 1.0])?;
    println!(
        "reduced combination: rows {:?} with coefficients {:.2?}",
        reduced.indices, reduced.coefficients
    );

    // Mass of reduced multipliers over a sampled (p, v)-neighborhood.
    let bound = multiplier_bound_check(&s, &anchors.p, &anchors.v, 10.0, 0.1, 0.1, 64, 42)?;
    println!(
        "multiplier one-norms stay below 10: {} (worst observed {:.3})",
        bound.ok, bound.max_l1
    );

    // Band probe: sampled coefficients over rows kbar = [0] plus admissible
    // extensions, compared against the anchor coefficients within eps.
    let probe = coefficient_band_probe(&s, &anchors.p, &anchors.v, &[0], &[1.0], 0.5, 0.1, 48, 42)?;
    println!(
        "coefficient band probe: worst excess {:.1e} over {} samples",
        probe.max_band_violation,
        probe.per_sample.len()
    );
    Ok(())
}
