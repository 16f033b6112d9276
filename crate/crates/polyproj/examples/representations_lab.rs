//! Multiplier representations and their stability: enumerate the base sets
//! K̄, extend them by admissible L, re-tag rows into derived scenarios, and
//! run the shrinking-shell distance check that separates ex6 from ex6s.
//!
//! Run with `cargo run --example representations_lab`.

use polyproj::representations::{
    build_rkl, default_liminf_radii, enumerate_kbar, enumerate_l, equivalence_spot_check,
    stable_representation_check,
};
use polyproj::scenario::builtin;

fn survey(name: &str) -> polyproj::Result<()> {
    let s = builtin(name).expect("builtin exists");
    let anchors = s.anchors().expect("builtins carry anchors").clone();
    println!("{name}:");

    let radii = default_liminf_radii();
    for choice in enumerate_kbar(&s, &anchors.p, &anchors.v)? {
        let check = stable_representation_check(
            &s, &anchors.p, &anchors.v, &choice.kbar, &radii, 32, 42,
        )?;
        println!(
            "  kbar = {:?} with coefficients {:.3?}: stable = {}",
            choice.kbar, choice.lambda_bar, check.stable
        );
        for pl in &check.per_l {
            let rate = pl
                .check
                .fitted_rate
                .map(|r| format!("{r:.2}"))
                .unwrap_or_else(|| "-".into());
            println!(
                "    L = {:?}: liminf holds = {}, decay rate {rate}",
                pl.l, pl.check.holds
            );
        }

        // The derived scenarios re-tag kbar (and L) as equalities while
        // keeping every expression intact.
        for l in enumerate_l(&s, &anchors.p, &check.xbar, &choice.kbar)? {
            let rkl = build_rkl(&s, &choice.kbar, &l)?;
            println!(
                "    R with L = {l:?} has {} equalities, {} inequalities",
                rkl.scenario.q(),
                rkl.scenario.m() - rkl.scenario.q()
            );
        }
    }
    println!();
    Ok(())
}

fn main() -> polyproj::Result<()> {
    // Slab family: one base representation, three admissible extensions.
    survey("ex5")?;
    // Same feasible sets, different formulas: ex6 pins the corner rows with
    // parameter-independent right-hand sides and every representation is
    // unstable; ex6s writes the binding row as min(p0, 0) and is stable.
    survey("ex6")?;
    survey("ex6s")?;

    let a = builtin("ex6").unwrap();
    let b = builtin("ex6s").unwrap();
    let eq = equivalence_spot_check(&a, &b, &[0.0], 0.4, &[1.0, 1.0], 0.5, 64, 42)?;
    println!(
        "ex6 and ex6s describe the same sets: {} (max mismatch {:.1e} over {} pairs)",
        eq.equivalent, eq.max_mismatch, eq.pairs_checked
    );
    Ok(())
}
