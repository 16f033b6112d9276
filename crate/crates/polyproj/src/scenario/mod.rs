//! Parametric constraint families and their file format.
//!
//! A [`Scenario`] holds `m` constraints over `x` in `R^n`, each given by a
//! normal vector of expressions `g_i(p)` and a right-hand side `f_i(p)` in
//! the parameter `p` in `R^d`, tagged as an equality or an inequality.
//! Equality rows come first by construction, so an index `i` below `q`
//! (the equality count) always refers to an equality row. [`instantiate`]
//! evaluates the family at a concrete `p` into a [`Polyhedron`].
//!
//! Scenario files are JSON documents:
//!
//! ```json
//! {
//!   "n": 2, "d": 1,
//!   "constraints": [
//!     {"kind": "ineq", "g": ["-1+p0", "0"], "f": "0"}
//!   ],
//!   "anchors": {"p": [0.0], "v": [-1.0, -1.0]},
//!   "domain": {"center": [0.0], "radius": 0.9}
//! }
//! ```
//!
//! `anchors` and `domain` are optional. Unknown fields are rejected. The
//! expression grammar is documented in [`expr`].
//!
//! [`instantiate`]: Scenario::instantiate

mod builtins;
mod expr;

pub use builtins::{builtin, builtin_names, builtin_summary};
pub use expr::Expr;

use crate::numerics::{all_finite, dot, Matrix};
use crate::sampling::{self, DomainBall, StreamTag};
use crate::{Error, Result};
use serde::Deserialize;

/// Fixed-length vector of expressions, one per coordinate of `x`.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorExpr {
    components: Vec<Expr>,
}

impl VectorExpr {
    pub fn new(components: Vec<Expr>) -> VectorExpr {
        VectorExpr { components }
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    pub fn eval(&self, p: &[f64]) -> Vec<f64> {
        self.components.iter().map(|e| e.eval(p)).collect()
    }

    pub fn max_param(&self) -> Option<usize> {
        self.components.iter().filter_map(|e| e.max_param()).max()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConstraintKind {
    Eq,
    Ineq,
}

/// One row of the family: `<x, g(p)> (= or <=) f(p)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstraintSpec {
    pub kind: ConstraintKind,
    pub g: VectorExpr,
    pub f: Expr,
}

/// Distinguished parameter and query point used by the anchored analyses.
#[derive(Clone, Debug, PartialEq)]
pub struct Anchors {
    pub p: Vec<f64>,
    pub v: Vec<f64>,
}

/// Closed ball restricting where parameters may be sampled.
#[derive(Clone, Debug, PartialEq)]
pub struct Domain {
    pub center: Vec<f64>,
    pub radius: f64,
}

/// A parametric family of polyhedra. Immutable after construction; the
/// constructor enforces every representation invariant, so downstream code
/// can index equality rows as `0..q` without re-checking.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    n: usize,
    d: usize,
    constraints: Vec<ConstraintSpec>,
    anchors: Option<Anchors>,
    domain: Option<Domain>,
}

impl Scenario {
    pub fn new(
        n: usize,
        d: usize,
        constraints: Vec<ConstraintSpec>,
        anchors: Option<Anchors>,
        domain: Option<Domain>,
    ) -> Result<Scenario> {
        if n == 0 {
            return Err(Error::Schema("n must be at least 1".into()));
        }
        if d == 0 {
            return Err(Error::Schema("d must be at least 1".into()));
        }
        if constraints.is_empty() {
            return Err(Error::Schema("at least one constraint is required".into()));
        }
        let mut seen_ineq = false;
        for (i, c) in constraints.iter().enumerate() {
            match c.kind {
                ConstraintKind::Ineq => seen_ineq = true,
                ConstraintKind::Eq if seen_ineq => {
                    return Err(Error::Schema(
                        "equality rows must precede inequality rows".into(),
                    ));
                }
                ConstraintKind::Eq => {}
            }
            if c.g.len() != n {
                return Err(Error::Schema(format!(
                    "constraint {i}: g has {} components, expected n = {n}",
                    c.g.len()
                )));
            }
            let used = c.g.max_param().max(c.f.max_param());
            if let Some(j) = used {
                if j >= d {
                    return Err(Error::Expr(format!(
                        "constraint {i}: parameter index p{j} out of range for d = {d}"
                    )));
                }
            }
        }
        if let Some(a) = &anchors {
            if a.p.len() != d {
                return Err(Error::Schema(format!(
                    "anchor p has {} entries, expected d = {d}",
                    a.p.len()
                )));
            }
            if a.v.len() != n {
                return Err(Error::Schema(format!(
                    "anchor v has {} entries, expected n = {n}",
                    a.v.len()
                )));
            }
            if !all_finite(&a.p) || !all_finite(&a.v) {
                return Err(Error::Schema("anchors must be finite".into()));
            }
        }
        if let Some(dom) = &domain {
            if dom.center.len() != d {
                return Err(Error::Schema(format!(
                    "domain center has {} entries, expected d = {d}",
                    dom.center.len()
                )));
            }
            if !all_finite(&dom.center) || !dom.radius.is_finite() || dom.radius <= 0.0 {
                return Err(Error::Schema(
                    "domain needs a finite center and a positive radius".into(),
                ));
            }
        }
        Ok(Scenario {
            n,
            d,
            constraints,
            anchors,
            domain,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Total constraint count.
    pub fn m(&self) -> usize {
        self.constraints.len()
    }

    /// Number of equality rows (they occupy indices `0..q`).
    pub fn q(&self) -> usize {
        self.constraints
            .iter()
            .filter(|c| c.kind == ConstraintKind::Eq)
            .count()
    }

    pub fn constraints(&self) -> &[ConstraintSpec] {
        &self.constraints
    }

    pub fn anchors(&self) -> Option<&Anchors> {
        self.anchors.as_ref()
    }

    pub fn require_anchors(&self) -> Result<&Anchors> {
        self.anchors.as_ref().ok_or(Error::MissingAnchors)
    }

    pub fn domain(&self) -> Option<&Domain> {
        self.domain.as_ref()
    }

    /// Domain restriction in the form the sampling helpers take.
    pub fn domain_ball(&self) -> Option<DomainBall<'_>> {
        self.domain.as_ref().map(|d| DomainBall {
            center: &d.center,
            radius: d.radius,
        })
    }

    /// Evaluates every row at `p`.
    pub fn instantiate(&self, p: &[f64]) -> Result<Polyhedron> {
        if p.len() != self.d {
            return Err(Error::InvalidInput(format!(
                "parameter has {} entries, expected d = {}",
                p.len(),
                self.d
            )));
        }
        if !all_finite(p) {
            return Err(Error::NonFinite);
        }
        let q = self.q();
        let mut eq_rows = Vec::with_capacity(q);
        let mut eq_rhs = Vec::with_capacity(q);
        let mut ineq_rows = Vec::with_capacity(self.m() - q);
        let mut ineq_rhs = Vec::with_capacity(self.m() - q);
        for c in &self.constraints {
            let row = c.g.eval(p);
            let rhs = c.f.eval(p);
            match c.kind {
                ConstraintKind::Eq => {
                    eq_rows.push(row);
                    eq_rhs.push(rhs);
                }
                ConstraintKind::Ineq => {
                    ineq_rows.push(row);
                    ineq_rhs.push(rhs);
                }
            }
        }
        Polyhedron::new(
            Matrix::from_vec_rows(self.n, &eq_rows),
            eq_rhs,
            Matrix::from_vec_rows(self.n, &ineq_rows),
            ineq_rhs,
        )
    }

    /// Serializes to the scenario file format. The output parses back to a
    /// scenario equal to `self`.
    pub fn to_json(&self) -> String {
        let constraints: Vec<serde_json::Value> = self
            .constraints
            .iter()
            .map(|c| {
                serde_json::json!({
                    "kind": match c.kind {
                        ConstraintKind::Eq => "eq",
                        ConstraintKind::Ineq => "ineq",
                    },
                    "g": c.g.components().iter().map(|e| e.to_string()).collect::<Vec<_>>(),
                    "f": c.f.to_string(),
                })
            })
            .collect();
        let mut doc = serde_json::json!({
            "n": self.n,
            "d": self.d,
            "constraints": constraints,
        });
        if let Some(a) = &self.anchors {
            doc["anchors"] = serde_json::json!({ "p": a.p, "v": a.v });
        }
        if let Some(dm) = &self.domain {
            doc["domain"] = serde_json::json!({ "center": dm.center, "radius": dm.radius });
        }
        serde_json::to_string_pretty(&doc).expect("scenario serializes")
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    n: usize,
    d: usize,
    constraints: Vec<RawConstraint>,
    #[serde(default)]
    anchors: Option<RawAnchors>,
    #[serde(default)]
    domain: Option<RawDomain>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConstraint {
    kind: String,
    g: Vec<String>,
    f: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAnchors {
    p: Vec<f64>,
    v: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDomain {
    center: Vec<f64>,
    radius: f64,
}

/// Parses a scenario document. See the module docs for the format.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let raw: RawScenario =
        serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
    let mut constraints = Vec::with_capacity(raw.constraints.len());
    for (i, rc) in raw.constraints.iter().enumerate() {
        let kind = match rc.kind.as_str() {
            "eq" => ConstraintKind::Eq,
            "ineq" => ConstraintKind::Ineq,
            other => {
                return Err(Error::Schema(format!(
                    "constraint {i}: unknown kind {other:?} (expected \"eq\" or \"ineq\")"
                )));
            }
        };
        let mut g = Vec::with_capacity(rc.g.len());
        for (k, comp) in rc.g.iter().enumerate() {
            let e = Expr::parse(comp)
                .map_err(|err| Error::Expr(format!("constraint {i}, g[{k}]: {err}")))?;
            g.push(e);
        }
        let f = Expr::parse(&rc.f)
            .map_err(|err| Error::Expr(format!("constraint {i}, f: {err}")))?;
        constraints.push(ConstraintSpec {
            kind,
            g: VectorExpr::new(g),
            f,
        });
    }
    Scenario::new(
        raw.n,
        raw.d,
        constraints,
        raw.anchors.map(|a| Anchors { p: a.p, v: a.v }),
        raw.domain.map(|d| Domain {
            center: d.center,
            radius: d.radius,
        }),
    )
}

/// A concrete polyhedron `{ x : E x = d, G x <= b }`. Global row indices run
/// over the equality block first (`0..q`), then the inequality block
/// (`q..m`), matching the scenario order.
#[derive(Clone, Debug, PartialEq)]
pub struct Polyhedron {
    eq_rows: Matrix,
    eq_rhs: Vec<f64>,
    ineq_rows: Matrix,
    ineq_rhs: Vec<f64>,
}

impl Polyhedron {
    pub fn new(
        eq_rows: Matrix,
        eq_rhs: Vec<f64>,
        ineq_rows: Matrix,
        ineq_rhs: Vec<f64>,
    ) -> Result<Polyhedron> {
        if eq_rows.rows() != eq_rhs.len() || ineq_rows.rows() != ineq_rhs.len() {
            return Err(Error::InvalidInput(
                "row counts and right-hand sides disagree".into(),
            ));
        }
        if eq_rows.rows() > 0 && ineq_rows.rows() > 0 && eq_rows.cols() != ineq_rows.cols() {
            return Err(Error::InvalidInput("blocks disagree on n".into()));
        }
        if !eq_rows.is_finite()
            || !ineq_rows.is_finite()
            || !all_finite(&eq_rhs)
            || !all_finite(&ineq_rhs)
        {
            return Err(Error::NonFinite);
        }
        Ok(Polyhedron {
            eq_rows,
            eq_rhs,
            ineq_rows,
            ineq_rhs,
        })
    }

    pub fn n(&self) -> usize {
        if self.eq_rows.rows() > 0 {
            self.eq_rows.cols()
        } else {
            self.ineq_rows.cols()
        }
    }

    pub fn q(&self) -> usize {
        self.eq_rows.rows()
    }

    pub fn m(&self) -> usize {
        self.eq_rows.rows() + self.ineq_rows.rows()
    }

    pub fn eq_rows(&self) -> &Matrix {
        &self.eq_rows
    }

    pub fn eq_rhs(&self) -> &[f64] {
        &self.eq_rhs
    }

    pub fn ineq_rows(&self) -> &Matrix {
        &self.ineq_rows
    }

    pub fn ineq_rhs(&self) -> &[f64] {
        &self.ineq_rhs
    }

    pub fn is_eq(&self, i: usize) -> bool {
        i < self.q()
    }

    /// Row by global index.
    pub fn row(&self, i: usize) -> &[f64] {
        if i < self.q() {
            self.eq_rows.row(i)
        } else {
            self.ineq_rows.row(i - self.q())
        }
    }

    /// Right-hand side by global index.
    pub fn rhs(&self, i: usize) -> f64 {
        if i < self.q() {
            self.eq_rhs[i]
        } else {
            self.ineq_rhs[i - self.q()]
        }
    }

    /// `<g_i, x> - b_i`; zero (equality) or nonpositive (inequality) means
    /// satisfied.
    pub fn residual(&self, i: usize, x: &[f64]) -> f64 {
        dot(self.row(i), x) - self.rhs(i)
    }

    /// Violation of row `i` at `x`, scaled by `1 + |b_i|`.
    pub fn scaled_violation(&self, i: usize, x: &[f64]) -> f64 {
        let r = self.residual(i, x);
        let scale = 1.0 + self.rhs(i).abs();
        if self.is_eq(i) {
            r.abs() / scale
        } else {
            r.max(0.0) / scale
        }
    }

    /// Largest scaled violation over all rows; `<= tol` means feasible.
    pub fn max_scaled_violation(&self, x: &[f64]) -> f64 {
        (0..self.m())
            .map(|i| self.scaled_violation(i, x))
            .fold(0.0, f64::max)
    }
}

/// Anything that maps a parameter vector to a point; the probe below works
/// uniformly for scalar and vector expressions.
pub trait ParamMap {
    fn eval_vec(&self, p: &[f64]) -> Vec<f64>;
}

impl ParamMap for Expr {
    fn eval_vec(&self, p: &[f64]) -> Vec<f64> {
        vec![self.eval(p)]
    }
}

impl ParamMap for VectorExpr {
    fn eval_vec(&self, p: &[f64]) -> Vec<f64> {
        self.eval(p)
    }
}

/// Empirical local Lipschitz constant of `map` near `pbar`: the maximum of
/// `|map(p1) - map(p2)| / |p1 - p2|` over sampled pairs in the radius ball.
/// A lower bound on the true local constant, deterministic in `seed`.
pub fn local_lipschitz_probe<M: ParamMap + ?Sized>(
    map: &M,
    pbar: &[f64],
    radius: f64,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::InvalidInput("radius must be positive".into()));
    }
    if samples < 2 {
        return Err(Error::InvalidInput("need at least 2 samples".into()));
    }
    if !all_finite(pbar) {
        return Err(Error::NonFinite);
    }
    let points: Vec<Vec<f64>> = (0..samples)
        .map(|i| {
            let mut rng = sampling::stream(seed, StreamTag::ExprProbe, 0, i as u64);
            sampling::in_ball(&mut rng, pbar, radius)
        })
        .collect();
    let values: Vec<Vec<f64>> = points.iter().map(|p| map.eval_vec(p)).collect();
    if values.iter().any(|v| !all_finite(v)) {
        return Err(Error::NonFinite);
    }
    let mut best = 0.0f64;
    for i in 0..samples {
        for j in 0..i {
            let dp = crate::numerics::dist(&points[i], &points[j]);
            if dp < 1e-12 {
                continue;
            }
            let dv = crate::numerics::dist(&values[i], &values[j]);
            best = best.max(dv / dp);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "n": 2, "d": 1,
        "constraints": [
            {"kind": "ineq", "g": ["1", "0"], "f": "0"}
        ]
    }"#;

    #[test]
    fn parses_minimal_document() {
        let s = parse_scenario(MINIMAL).unwrap();
        assert_eq!(s.n(), 2);
        assert_eq!(s.d(), 1);
        assert_eq!(s.m(), 1);
        assert_eq!(s.q(), 0);
        assert!(s.anchors().is_none());
    }

    #[test]
    fn rejects_equality_after_inequality() {
        let text = r#"{
            "n": 1, "d": 1,
            "constraints": [
                {"kind": "ineq", "g": ["1"], "f": "0"},
                {"kind": "eq", "g": ["1"], "f": "0"}
            ]
        }"#;
        match parse_scenario(text) {
            Err(Error::Schema(msg)) => assert!(msg.contains("precede")),
            other => panic!("expected schema error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_unknown_fields_and_bad_dims() {
        let unknown = r#"{"n": 1, "d": 1, "constraints": [], "extra": 1}"#;
        assert!(matches!(parse_scenario(unknown), Err(Error::Schema(_))));
        let bad_g = r#"{
            "n": 2, "d": 1,
            "constraints": [{"kind": "ineq", "g": ["1"], "f": "0"}]
        }"#;
        assert!(matches!(parse_scenario(bad_g), Err(Error::Schema(_))));
        let bad_param = r#"{
            "n": 1, "d": 1,
            "constraints": [{"kind": "ineq", "g": ["p1"], "f": "0"}]
        }"#;
        assert!(matches!(parse_scenario(bad_param), Err(Error::Expr(_))));
    }

    #[test]
    fn round_trip_preserves_scenario() {
        for name in builtin_names() {
            let s = builtin(name).unwrap();
            let back = parse_scenario(&s.to_json()).unwrap();
            assert_eq!(s, back, "round trip changed {name}");
        }
    }

    #[test]
    fn instantiate_ex1_at_half() {
        let s = builtin("ex1").unwrap();
        let poly = s.instantiate(&[0.5]).unwrap();
        assert_eq!(poly.q(), 0);
        assert_eq!(poly.m(), 2);
        assert_eq!(poly.row(0), &[-0.5, 0.0]);
        assert_eq!(poly.row(1), &[0.0, 0.5]);
        assert_eq!(poly.rhs(0), 0.0);
        assert_eq!(poly.rhs(1), 0.0);
    }

    #[test]
    fn instantiate_ex5_at_minus_two() {
        let s = builtin("ex5").unwrap();
        let poly = s.instantiate(&[-2.0]).unwrap();
        assert_eq!(poly.row(0), &[0.0, 1.0]);
        assert_eq!(poly.row(1), &[1.0, 0.0]);
        assert_eq!(poly.row(2), &[-1.0, 0.0]);
        assert_eq!(poly.ineq_rhs(), &[0.0, 2.0, 2.0]);
    }

    #[test]
    fn instantiate_ex6s_rhs_kink() {
        let s = builtin("ex6s").unwrap();
        assert_eq!(s.instantiate(&[-0.3]).unwrap().rhs(2), -0.3);
        assert_eq!(s.instantiate(&[0.7]).unwrap().rhs(2), 0.0);
    }

    #[test]
    fn polyhedron_scaled_violations() {
        let s = builtin("ex6").unwrap();
        let poly = s.instantiate(&[0.0]).unwrap();
        assert_eq!(poly.max_scaled_violation(&[0.0, 0.0]), 0.0);
        assert!((poly.max_scaled_violation(&[1.0, 0.0]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn probe_constant_zero_identity_one() {
        let c = Expr::parse("3.5").unwrap();
        assert_eq!(local_lipschitz_probe(&c, &[0.0], 1.0, 8, 1).unwrap(), 0.0);
        let id = Expr::parse("p0").unwrap();
        let l = local_lipschitz_probe(&id, &[0.0], 1.0, 16, 1).unwrap();
        assert!((l - 1.0).abs() < 1e-6, "identity probe {l}");
    }

    #[test]
    fn probe_abs_modulus_one() {
        let a = Expr::parse("abs(p0)").unwrap();
        let l = local_lipschitz_probe(&a, &[0.0], 1.0, 24, 7).unwrap();
        assert!((l - 1.0).abs() < 1e-3, "abs probe {l}");
        assert!(l <= 1.0 + 1e-12);
    }
}
