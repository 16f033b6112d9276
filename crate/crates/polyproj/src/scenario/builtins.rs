//! Built-in scenario families. Each one exercises a specific behavior of the
//! projection map and is used heavily by the test suite and the examples.

use super::{parse_scenario, Scenario};

/// Two inequalities in the plane whose normals collapse at `p0 = 0`. The
/// projection of the anchor point `v = (-1,-1)` is `(0,0)` for `-1 < p0 < 0`
/// and `(0,-1)` for `0 <= p0 < 1`: a unit jump, so the projection map is not
/// continuous in the parameter.
const EX1: &str = r#"{
  "n": 2, "d": 1,
  "constraints": [
    {"kind": "ineq", "g": ["-1+p0", "0"], "f": "0"},
    {"kind": "ineq", "g": ["0", "p0"], "f": "0"}
  ],
  "anchors": {"p": [0.0], "v": [-1.0, -1.0]},
  "domain": {"center": [0.0], "radius": 0.9}
}"#;

/// Three inequalities whose feasible set is the single point `{p}`; the
/// projection map is the identity in `p` and perfectly Lipschitz, yet LICQ
/// and MFCQ both fail at the anchor because three normals meet in the plane.
const EX2: &str = r#"{
  "n": 2, "d": 2,
  "constraints": [
    {"kind": "ineq", "g": ["1-p0", "-p1"], "f": "p0-p0*p0-p1*p1"},
    {"kind": "ineq", "g": ["-p0", "1-p1"], "f": "p1-p0*p0-p1*p1"},
    {"kind": "ineq", "g": ["-1-p0", "-1-p1"], "f": "-p0-p0*p0-p1-p1*p1"}
  ],
  "anchors": {"p": [0.0, 0.0], "v": [1.0, 1.0]},
  "domain": {"center": [0.0, 0.0], "radius": 1.0}
}"#;

/// A slab `|x1| <= |p0|` under the halfplane `x2 <= 0`. The projection of
/// `v = (0,1)` is the origin for every parameter, and the multiplier vector
/// at the anchor is supported on the first row alone.
const EX5: &str = r#"{
  "n": 2, "d": 1,
  "constraints": [
    {"kind": "ineq", "g": ["0", "1"], "f": "0"},
    {"kind": "ineq", "g": ["1", "0"], "f": "abs(p0)"},
    {"kind": "ineq", "g": ["-1", "0"], "f": "abs(p0)"}
  ],
  "anchors": {"p": [0.0], "v": [0.0, 1.0]},
  "domain": {"center": [0.0], "radius": 1.0}
}"#;

/// Negative quadrant cut by `x1 + x2 <= p0`. The projection of `(1,1)` is
/// `(0,0)` for `p0 >= 0` and `(p0/2, p0/2)` for `p0 < 0`; the map is
/// Lipschitz, but both index-set representations of the anchor normal turn
/// out to be unstable under re-tagging.
const EX6: &str = r#"{
  "n": 2, "d": 1,
  "constraints": [
    {"kind": "ineq", "g": ["1", "0"], "f": "0"},
    {"kind": "ineq", "g": ["0", "1"], "f": "0"},
    {"kind": "ineq", "g": ["1", "1"], "f": "p0"}
  ],
  "anchors": {"p": [0.0], "v": [1.0, 1.0]},
  "domain": {"center": [0.0], "radius": 1.0}
}"#;

/// The stable reformulation of `ex6`: the third right-hand side becomes
/// `min(p0, 0)`, which leaves the feasible set unchanged but makes the
/// re-tagged family around the third row nonempty on both sides of `p0 = 0`.
const EX6S: &str = r#"{
  "n": 2, "d": 1,
  "constraints": [
    {"kind": "ineq", "g": ["1", "0"], "f": "0"},
    {"kind": "ineq", "g": ["0", "1"], "f": "0"},
    {"kind": "ineq", "g": ["1", "1"], "f": "min(p0,0)"}
  ],
  "anchors": {"p": [0.0], "v": [1.0, 1.0]},
  "domain": {"center": [0.0], "radius": 1.0}
}"#;

/// Fixed normal vectors with parameter-dependent right-hand sides only. Every
/// subset of rows has constant rank trivially, and the right-hand sides are
/// 1-Lipschitz, so the family is as well behaved as possible.
const HATC_DEMO: &str = r#"{
  "n": 2, "d": 1,
  "constraints": [
    {"kind": "ineq", "g": ["1", "0"], "f": "p0"},
    {"kind": "ineq", "g": ["0", "1"], "f": "abs(p0)"},
    {"kind": "ineq", "g": ["1", "1"], "f": "1+p0"}
  ],
  "anchors": {"p": [0.0], "v": [1.0, 1.0]},
  "domain": {"center": [0.0], "radius": 0.9}
}"#;

const NAMES: [&str; 6] = ["ex1", "ex2", "ex5", "ex6", "ex6s", "hatc-demo"];

/// Names accepted by [`builtin`], in listing order.
pub fn builtin_names() -> &'static [&'static str] {
    &NAMES
}

/// Returns the named built-in scenario.
pub fn builtin(name: &str) -> Option<Scenario> {
    let text = match name {
        "ex1" => EX1,
        "ex2" => EX2,
        "ex5" => EX5,
        "ex6" => EX6,
        "ex6s" => EX6S,
        "hatc-demo" => HATC_DEMO,
        _ => return None,
    };
    Some(parse_scenario(text).expect("built-in scenario parses"))
}

/// One-line description with the known closed form, for listings.
pub fn builtin_summary(name: &str) -> Option<&'static str> {
    match name {
        "ex1" => Some(
            "normals collapse at p0=0; P((-1,-1),p) = (0,0) for p<0 and (0,-1) for p>=0: \
             the projection jumps",
        ),
        "ex2" => Some(
            "feasible set is the single point {p}; P(v,p) = p for every v, while LICQ and \
             MFCQ fail at the anchor",
        ),
        "ex5" => Some(
            "slab |x1| <= |p0| under x2 <= 0; P((0,1),p) = (0,0) for all p, multiplier \
             support {1} at the anchor",
        ),
        "ex6" => Some(
            "negative quadrant cut by x1+x2 <= p0; P((1,1),p) = (min(p,0)/2)*(1,1), both \
             base representations unstable",
        ),
        "ex6s" => Some(
            "same set as ex6 with rhs min(p0,0); identical projection, and the third-row \
             representation becomes stable",
        ),
        "hatc-demo" => Some(
            "fixed normals, 1-Lipschitz right-hand sides; P((1,1),p) = (p, |p|) near p=0, \
             every rank condition holds",
        ),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::dist;

    #[test]
    fn all_names_resolve_and_parse() {
        assert_eq!(builtin_names().len(), 6);
        for name in builtin_names() {
            let s = builtin(name).unwrap_or_else(|| panic!("missing builtin {name}"));
            assert!(s.m() >= 1);
            assert!(s.anchors().is_some(), "{name} must carry anchors");
            assert!(builtin_summary(name).is_some());
        }
        assert!(builtin("nope").is_none());
    }

    /// Entrywise instantiation data at a parameter grid, checked against
    /// values computed by hand from the defining formulas.
    #[test]
    fn ex1_grid_data() {
        let s = builtin("ex1").unwrap();
        for p in [-0.5, -0.1, 0.0, 0.25, 0.5] {
            let poly = s.instantiate(&[p]).unwrap();
            assert!(dist(poly.row(0), &[-1.0 + p, 0.0]) <= 1e-12);
            assert!(dist(poly.row(1), &[0.0, p]) <= 1e-12);
            assert!(poly.rhs(0).abs() <= 1e-12 && poly.rhs(1).abs() <= 1e-12);
        }
    }

    #[test]
    fn ex2_grid_data() {
        let s = builtin("ex2").unwrap();
        for (p0, p1) in [(0.0, 0.0), (0.3, -0.2), (-0.5, 0.1), (0.2, 0.2), (-0.1, -0.4)] {
            let poly = s.instantiate(&[p0, p1]).unwrap();
            let sq = p0 * p0 + p1 * p1;
            assert!(dist(poly.row(0), &[1.0 - p0, -p1]) <= 1e-12);
            assert!(dist(poly.row(1), &[-p0, 1.0 - p1]) <= 1e-12);
            assert!(dist(poly.row(2), &[-1.0 - p0, -1.0 - p1]) <= 1e-12);
            assert!((poly.rhs(0) - (p0 - sq)).abs() <= 1e-12);
            assert!((poly.rhs(1) - (p1 - sq)).abs() <= 1e-12);
            assert!((poly.rhs(2) - (-p0 - p1 - sq)).abs() <= 1e-12);
        }
    }

    #[test]
    fn ex5_grid_data() {
        let s = builtin("ex5").unwrap();
        for p in [-1.0, -0.1, 0.0, 0.1, 1.0] {
            let poly = s.instantiate(&[p]).unwrap();
            assert!(dist(poly.row(0), &[0.0, 1.0]) <= 1e-12);
            assert!(dist(poly.row(1), &[1.0, 0.0]) <= 1e-12);
            assert!(dist(poly.row(2), &[-1.0, 0.0]) <= 1e-12);
            let b: Vec<f64> = (0..3).map(|i| poly.rhs(i)).collect();
            assert!(dist(&b, &[0.0, p.abs(), p.abs()]) <= 1e-12);
        }
    }

    #[test]
    fn ex6_and_ex6s_grid_data() {
        let s6 = builtin("ex6").unwrap();
        let s6s = builtin("ex6s").unwrap();
        for p in [-0.8, -0.3, 0.0, 0.3, 0.8] {
            let poly = s6.instantiate(&[p]).unwrap();
            let polys = s6s.instantiate(&[p]).unwrap();
            for poly in [&poly, &polys] {
                assert!(dist(poly.row(0), &[1.0, 0.0]) <= 1e-12);
                assert!(dist(poly.row(1), &[0.0, 1.0]) <= 1e-12);
                assert!(dist(poly.row(2), &[1.0, 1.0]) <= 1e-12);
            }
            assert!((poly.rhs(0)).abs() <= 1e-12);
            assert!((poly.rhs(1)).abs() <= 1e-12);
            assert!((poly.rhs(2) - p).abs() <= 1e-12);
            assert!((polys.rhs(0)).abs() <= 1e-12);
            assert!((polys.rhs(1)).abs() <= 1e-12);
            assert!((polys.rhs(2) - p.min(0.0)).abs() <= 1e-12);
        }
    }

    #[test]
    fn hatc_demo_grid_data() {
        let s = builtin("hatc-demo").unwrap();
        for p in [-0.6, -0.2, 0.0, 0.2, 0.6] {
            let poly = s.instantiate(&[p]).unwrap();
            assert!(dist(poly.row(0), &[1.0, 0.0]) <= 1e-12);
            assert!(dist(poly.row(1), &[0.0, 1.0]) <= 1e-12);
            assert!(dist(poly.row(2), &[1.0, 1.0]) <= 1e-12);
            let b: Vec<f64> = (0..3).map(|i| poly.rhs(i)).collect();
            assert!(dist(&b, &[p, p.abs(), 1.0 + p]) <= 1e-12);
        }
    }
}
