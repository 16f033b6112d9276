//! Walk through every built-in scenario: instantiate it at its anchor
//! parameter, project the anchor point, and print the closed-form story.
//!
//! Run with `cargo run --example builtin_tour`.

use polyproj::projection::project;
use polyproj::scenario::{builtin, builtin_names, builtin_summary};
use polyproj::ProjectionStatus;

fn main() -> polyproj::Result<()> {
    for &name in builtin_names() {
        let s = builtin(name).expect("listed builtin exists");
        println!("{name}  (n = {}, d = {}, rows = {})", s.n(), s.d(), s.m());
        println!("  {}", builtin_summary(name).unwrap_or_default());

        let anchors = s.anchors().expect("builtins carry anchors");
        let poly = s.instantiate(&anchors.p)?;
        let res = project(&poly, &anchors.v)?;
        match res.status {
            ProjectionStatus::Optimal => println!(
                "  P({:?}, p = {:?}) = {:?}, active rows {:?}\n",
                anchors.v, anchors.p, res.x, res.active
            ),
            ProjectionStatus::Infeasible => {
                println!("  the set is empty at the anchor parameter\n")
            }
        }
    }
    Ok(())
}
