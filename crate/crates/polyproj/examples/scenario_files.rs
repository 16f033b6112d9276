//! Author a scenario as JSON, parse it, and use it like a built-in. The
//! format mirrors the library types: `g` holds one expression per
//! coordinate of x, `f` is the scalar right-hand side, both over p0..p{d-1}
//! with +, -, *, parentheses, min, max, and abs.
//!
//! Run with `cargo run --example scenario_files`.

use polyproj::projection::project;
use polyproj::scenario::parse_scenario;
use polyproj::ProjectionStatus;

const MOVING_BOX: &str = r#"{
  "n": 2,
  "d": 2,
  "constraints": [
    {"kind": "eq",   "g": ["1", "-1"], "f": "p0 - p1"},
    {"kind": "ineq", "g": ["1", "0"],  "f": "p0 + 1"},
    {"kind": "ineq", "g": ["-1", "0"], "f": "1 - p0"},
    {"kind": "ineq", "g": ["0", "1"],  "f": "p1 + 1"},
    {"kind": "ineq", "g": ["0", "-1"], "f": "1 - p1"}
  ],
  "anchors": {"p": [0.0, 0.0], "v": [2.0, 0.0]},
  "domain": {"center": [0.0, 0.0], "radius": 3.0}
}"#;

fn main() -> polyproj::Result<()> {
    // A unit box centered at (p0, p1), cut by the diagonal x0 - x1 = p0 - p1.
    let s = parse_scenario(MOVING_BOX)?;
    println!(
        "parsed scenario: n = {}, d = {}, {} equalities, {} inequalities",
        s.n(),
        s.d(),
        s.q(),
        s.m() - s.q()
    );

    // The feasible set translates with p, and so does the projection.
    for p in [[0.0, 0.0], [0.5, -0.25], [-1.0, 1.0]] {
        let poly = s.instantiate(&p)?;
        let res = project(&poly, &[2.0, 0.0])?;
        assert_eq!(res.status, ProjectionStatus::Optimal);
        println!("p = {p:>13.2?}  ->  P((2, 0)) = {:.4?}", res.x);
    }

    // Equalities are honored exactly: the projection satisfies the diagonal
    // cut at every parameter.
    let poly = s.instantiate(&[0.5, -0.25])?;
    let res = project(&poly, &[2.0, 0.0])?;
    let cut = res.x[0] - res.x[1] - (0.5 - (-0.25));
    println!("diagonal residual at the projection: {cut:.1e}");
    Ok(())
}
