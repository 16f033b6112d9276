//! Project points onto a polyhedron built by hand, inspect the multipliers,
//! and cross-check the active-set solver against the brute-force oracle.
//!
//! Run with `cargo run --example project_basics`.

use polyproj::numerics::{dist, sub};
use polyproj::projection::{normal_cone_contains, project, project_bruteforce};
use polyproj::scenario::Polyhedron;
use polyproj::{Matrix, ProjectionStatus};

fn main() -> polyproj::Result<()> {
    // The triangle { x : x0 >= 0, x1 >= 0, x0 + x1 <= 1 }, written with
    // <=-rows: -x0 <= 0, -x1 <= 0, x0 + x1 <= 1. No equality block.
    let poly = Polyhedron::new(
        Matrix::zeros(0, 2),
        Vec::new(),
        Matrix::from_rows(2, &[&[-1.0, 0.0], &[0.0, -1.0], &[1.0, 1.0]]),
        vec![0.0, 0.0, 1.0],
    )?;

    for v in [
        vec![2.0, 2.0],   // outside the hypotenuse
        vec![-1.0, 0.5],  // left of the triangle
        vec![0.25, 0.25], // interior, projection is the identity
        vec![-3.0, -4.0], // the corner at the origin wins
    ] {
        let res = project(&poly, &v)?;
        assert_eq!(res.status, ProjectionStatus::Optimal);

        // The oracle enumerates every active subset instead of iterating.
        let oracle = project_bruteforce(&poly, &v)?;
        let gap = dist(&res.x, &oracle.x);

        // v - P(v) always lies in the normal cone at P(v).
        let w = sub(&v, &res.x);
        assert!(normal_cone_contains(&poly, &res.x, &w)?);

        println!(
            "v = {:>12}  ->  x = {:>12}  active = {:?}  lambda = {:?}",
            format!("{v:.2?}"),
            format!("{:.2?}", res.x),
            res.active,
            res.lambda
                .iter()
                .map(|l| (l * 100.0).round() / 100.0)
                .collect::<Vec<_>>(),
        );
        println!("               oracle agrees to {gap:.1e}");
    }
    Ok(())
}
