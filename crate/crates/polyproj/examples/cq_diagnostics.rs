//! Constraint-qualification diagnostics: LICQ, MFCQ with a certified
//! direction, sampled constant-rank scans, and the distance-decay companion.
//!
//! Run with `cargo run --example cq_diagnostics`.

use polyproj::cq::{
    full_report, geometric_radii, mfcq_distance_decay, DEFAULT_SUBSET_CAP,
};
use polyproj::projection::project;
use polyproj::scenario::builtin;

fn diagnose(name: &str) -> polyproj::Result<()> {
    let s = builtin(name).expect("builtin exists");
    let anchors = s.anchors().expect("builtins carry anchors").clone();
    let poly = s.instantiate(&anchors.p)?;
    let xbar = project(&poly, &anchors.v)?.x;

    let rep = full_report(&s, &anchors.p, &xbar, 0.1, 16, DEFAULT_SUBSET_CAP, 42)?;
    println!("{name} at x = {xbar:.3?}:");
    println!("  licq: {}", rep.licq);
    match &rep.mfcq.certificate_h {
        Some(h) => println!(
            "  mfcq: true, margin {:.3}, inward direction {h:.3?}",
            rep.mfcq.margin
        ),
        None => println!("  mfcq: false (no strictly feasible direction)"),
    }
    println!(
        "  rcrcq: {} over {} active-row subsets",
        rep.overall_rcrcq,
        rep.rcrcq.len()
    );
    for sub in rep.rcrcq.iter().filter(|s| !s.holds) {
        println!(
            "    rank of rows {:?} moves: {} at the anchor, {}..{} sampled",
            sub.subset, sub.rank_at_anchor, sub.min_rank_sampled, sub.max_rank_sampled
        );
    }

    // MFCQ predicts linear decay of dist(xbar, C(p)) in |p - pbar|; measure it.
    let decay = mfcq_distance_decay(&s, &anchors.p, &xbar, &geometric_radii(0.1, 6), 24, 42)?;
    println!(
        "  distance decay: holds = {}, fitted slope {:.3}\n",
        decay.holds, decay.l_est
    );
    Ok(())
}

fn main() -> polyproj::Result<()> {
    // A well-behaved family: every qualification holds.
    diagnose("hatc-demo")?;
    // The pinched family: three normals meet at the anchor, LICQ and MFCQ
    // both fail, yet the projection map itself is perfectly Lipschitz.
    diagnose("ex2")?;
    Ok(())
}
