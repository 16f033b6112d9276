//! Acceptance battery: every numbered check prints one PASS/FAIL line
//! (visible with `--nocapture`) and enforces its stated tolerance and, where
//! given, its runtime budget.

use polyproj::cq::{
    active_set_inclusion_check, licq_check, mfcq_check, rcrcq_check, DEFAULT_SUBSET_CAP,
};
use polyproj::numerics::{dist, dot, norm, recover_coefficients, sub, Matrix};
use polyproj::projection::{project, project_bruteforce};
use polyproj::representations::{
    default_liminf_radii, enumerate_kbar, enumerate_l, stable_representation_check,
};
use polyproj::scenario::{builtin, builtin_names, Polyhedron};
use polyproj::stability::{
    discontinuity_probe, fit_estimate, gr_transplant_check, lipschitz_like_c, Alpha,
};
use polyproj::ProjectionStatus;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::{Duration, Instant};

fn criterion<F>(idx: usize, name: &str, budget: Option<Duration>, body: F)
where
    F: FnOnce() -> Result<(), String>,
{
    let start = Instant::now();
    let outcome = body();
    let elapsed = start.elapsed();
    let in_budget = budget.map_or(true, |b| elapsed <= b);
    match (&outcome, in_budget) {
        (Ok(()), true) => println!("criterion {idx:02} {name}: PASS ({elapsed:.2?})"),
        (Ok(()), false) => println!(
            "criterion {idx:02} {name}: FAIL (over budget: {elapsed:.2?} > {:?})",
            budget.unwrap()
        ),
        (Err(msg), _) => println!("criterion {idx:02} {name}: FAIL ({msg})"),
    }
    if let Err(msg) = outcome {
        panic!("criterion {idx:02} {name}: {msg}");
    }
    if !in_budget {
        panic!(
            "criterion {idx:02} {name}: runtime {elapsed:?} exceeds {:?}",
            budget.unwrap()
        );
    }
}

fn ensure(cond: bool, msg: impl Fn() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller; one value per call keeps the streams simple.
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn gaussian_vec(rng: &mut ChaCha8Rng, len: usize, scale: f64) -> Vec<f64> {
    (0..len).map(|_| scale * gaussian(rng)).collect()
}

/// Ball sample by rejection; independent of the library's samplers.
fn ball_vec(rng: &mut ChaCha8Rng, dim: usize, radius: f64) -> Vec<f64> {
    loop {
        let x: Vec<f64> = (0..dim).map(|_| rng.gen_range(-radius..radius)).collect();
        if norm(&x) <= radius {
            return x;
        }
    }
}

/// A random feasible polyhedron built around an interior-or-boundary point:
/// equality rows pass through `x0`, inequality rows get nonnegative slack
/// (exactly zero with probability ~0.3, so active rows occur).
fn random_feasible(rng: &mut ChaCha8Rng) -> (Polyhedron, usize) {
    let n = rng.gen_range(1..=4);
    let m = rng.gen_range(1..=6usize);
    let q = rng.gen_range(0..=2usize).min(m);
    let x0 = gaussian_vec(rng, n, 1.0);
    let mut eq_rows = Vec::new();
    let mut eq_rhs = Vec::new();
    for _ in 0..q {
        let g = gaussian_vec(rng, n, 1.0);
        eq_rhs.push(dot(&g, &x0));
        eq_rows.push(g);
    }
    let mut ineq_rows = Vec::new();
    let mut ineq_rhs = Vec::new();
    for _ in 0..(m - q) {
        let g = gaussian_vec(rng, n, 1.0);
        let slack = if rng.gen_bool(0.3) {
            0.0
        } else {
            gaussian(rng).abs()
        };
        ineq_rhs.push(dot(&g, &x0) + slack);
        ineq_rows.push(g);
    }
    let poly = Polyhedron::new(
        Matrix::from_vec_rows(n, &eq_rows),
        eq_rhs,
        Matrix::from_vec_rows(n, &ineq_rows),
        ineq_rhs,
    )
    .expect("finite rows");
    (poly, n)
}

#[test]
fn c01_jumping_family_closed_form_probe_and_verdict() {
    criterion(1, "jumping family", Some(Duration::from_secs(5)), || {
        let s = builtin("ex1").unwrap();
        for (p, expected) in [
            (-0.5, [0.0, 0.0]),
            (-0.1, [0.0, 0.0]),
            (-0.01, [0.0, 0.0]),
            (0.0, [0.0, -1.0]),
            (0.01, [0.0, -1.0]),
            (0.5, [0.0, -1.0]),
        ] {
            let poly = s.instantiate(&[p]).map_err(|e| e.to_string())?;
            let res = project(&poly, &[-1.0, -1.0]).map_err(|e| e.to_string())?;
            for (a, b) in res.x.iter().zip(&expected) {
                ensure((a - b).abs() <= 1e-8, || {
                    format!("P at p={p}: got {:?}, expected {expected:?}", res.x)
                })?;
            }
        }
        let probe = discontinuity_probe(&s, &[0.0], &[-1.0, -1.0], 0.1, 7, 32, 42)
            .map_err(|e| e.to_string())?;
        ensure(probe.max_jump >= 0.99, || {
            format!("innermost jump {} < 0.99", probe.max_jump)
        })?;
        let fit = fit_estimate(&s, &[0.0], &[-1.0, -1.0], Alpha::One, 0.1, 0.0, 7, 64, 42)
            .map_err(|e| e.to_string())?;
        ensure(fit.verdict == "not-lipschitz", || {
            format!("verdict {:?}, wanted not-lipschitz", fit.verdict)
        })
    });
}

#[test]
fn c02_pinched_family_identity_map_and_failed_cqs() {
    criterion(2, "pinched family", Some(Duration::from_secs(5)), || {
        let s = builtin("ex2").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0x_ACCE_0002);
        for _ in 0..100 {
            let p = ball_vec(&mut rng, 2, 0.3);
            let v = gaussian_vec(&mut rng, 2, 1.0);
            let poly = s.instantiate(&p).map_err(|e| e.to_string())?;
            let res = project(&poly, &v).map_err(|e| e.to_string())?;
            ensure(res.status == ProjectionStatus::Optimal, || {
                format!("infeasible at p={p:?}")
            })?;
            ensure(dist(&res.x, &p) <= 1e-8, || {
                format!("P(v,p) != p at p={p:?}: {:?}", res.x)
            })?;
        }
        let anchor = s.instantiate(&[0.0, 0.0]).map_err(|e| e.to_string())?;
        let xbar = project(&anchor, &[1.0, 1.0]).map_err(|e| e.to_string())?.x;
        let licq = licq_check(&anchor, &xbar).map_err(|e| e.to_string())?;
        let mfcq = mfcq_check(&anchor, &xbar).map_err(|e| e.to_string())?;
        ensure(!licq, || "licq unexpectedly holds".into())?;
        ensure(!mfcq.holds, || "mfcq unexpectedly holds".into())?;
        let like = lipschitz_like_c(&s, &[0.0, 0.0], &[0.0, 0.0], 0.1, 0.1, 200, 42)
            .map_err(|e| e.to_string())?;
        ensure((0.9..=1.1).contains(&like.l_est), || {
            format!("l_est {} outside [0.9, 1.1]", like.l_est)
        })
    });
}

#[test]
fn c03_slab_family_enumerations() {
    criterion(3, "slab family", Some(Duration::from_secs(2)), || {
        let s = builtin("ex5").unwrap();
        for p in [-1.0, -0.1, 0.0, 0.1, 1.0] {
            let poly = s.instantiate(&[p]).map_err(|e| e.to_string())?;
            let res = project(&poly, &[0.0, 1.0]).map_err(|e| e.to_string())?;
            ensure(norm(&res.x) <= 1e-8, || {
                format!("P((0,1),{p}) = {:?}, expected the origin", res.x)
            })?;
        }
        let choices = enumerate_kbar(&s, &[0.0], &[0.0, 1.0]).map_err(|e| e.to_string())?;
        let kbars: Vec<&[usize]> = choices.iter().map(|c| c.kbar.as_slice()).collect();
        ensure(kbars == vec![&[0][..]], || {
            format!("kbar candidates {kbars:?}, expected [[0]]")
        })?;
        let ls = enumerate_l(&s, &[0.0], &[0.0, 0.0], &[0]).map_err(|e| e.to_string())?;
        ensure(
            ls == vec![Vec::<usize>::new(), vec![1], vec![2]],
            || format!("L sets {ls:?}, expected [[], [1], [2]]"),
        )
    });
}

#[test]
fn c04_corner_pair_formula_stability_fit_and_transplant() {
    criterion(4, "corner pair", Some(Duration::from_secs(30)), || {
        let grid: [f64; 7] = [-0.5, -0.2, -0.1, 0.0, 0.01, 0.2, 0.5];
        for name in ["ex6", "ex6s"] {
            let s = builtin(name).unwrap();
            for p in grid {
                let half = p.min(0.0) / 2.0;
                let poly = s.instantiate(&[p]).map_err(|e| e.to_string())?;
                let res = project(&poly, &[1.0, 1.0]).map_err(|e| e.to_string())?;
                ensure(dist(&res.x, &[half, half]) <= 1e-8, || {
                    format!("{name} P((1,1),{p}) = {:?}, expected {:?}", res.x, [half, half])
                })?;
            }
        }

        let radii = default_liminf_radii();
        let ex6 = builtin("ex6").unwrap();
        for kbar in [vec![0, 1], vec![2]] {
            let check =
                stable_representation_check(&ex6, &[0.0], &[1.0, 1.0], &kbar, &radii, 32, 42)
                    .map_err(|e| e.to_string())?;
            ensure(!check.stable, || format!("ex6 kbar {kbar:?} should be unstable"))?;
        }
        let ex6s = builtin("ex6s").unwrap();
        let check = stable_representation_check(&ex6s, &[0.0], &[1.0, 1.0], &[2], &radii, 32, 42)
            .map_err(|e| e.to_string())?;
        ensure(check.stable, || "ex6s kbar [2] should be stable".into())?;

        let fit = fit_estimate(&ex6s, &[0.0], &[1.0, 1.0], Alpha::One, 0.1, 0.0, 7, 64, 42)
            .map_err(|e| e.to_string())?;
        ensure((1.34..=1.49).contains(&fit.fitted_l0), || {
            format!("fitted_l0 {} outside [1.34, 1.49]", fit.fitted_l0)
        })?;
        ensure(fit.verdict == "lipschitz-certified", || {
            format!("verdict {:?}, wanted lipschitz-certified", fit.verdict)
        })?;

        let t = gr_transplant_check(&ex6s, &[0.0], &[1.0, 1.0], &[2], 0.1, 64, 42, true)
            .map_err(|e| e.to_string())?;
        ensure(t.pass_rate == 1.0, || {
            format!("transplant pass rate {}", t.pass_rate)
        })
    });
}

#[test]
fn c05_solver_agrees_with_the_bruteforce_oracle() {
    criterion(5, "oracle equivalence", Some(Duration::from_secs(30)), || {
        let mut rng = ChaCha8Rng::seed_from_u64(0x_ACCE_0005);
        let mut disagreements = 0usize;
        let mut checked = 0usize;
        for k in 0..500 {
            let (mut poly, n) = random_feasible(&mut rng);
            if k % 10 == 3 && poly.m() <= 4 {
                // Append a contradicting inequality pair to exercise the
                // infeasible branch of both routes.
                let g = gaussian_vec(&mut rng, n, 1.0);
                let mut ineq_rows: Vec<Vec<f64>> = (poly.q()..poly.m())
                    .map(|i| poly.row(i).to_vec())
                    .collect();
                let mut ineq_rhs: Vec<f64> =
                    (poly.q()..poly.m()).map(|i| poly.rhs(i)).collect();
                ineq_rows.push(g.clone());
                ineq_rhs.push(0.0);
                ineq_rows.push(g.iter().map(|x| -x).collect());
                ineq_rhs.push(-1.0 - norm(&g));
                let eq_rows: Vec<Vec<f64>> =
                    (0..poly.q()).map(|i| poly.row(i).to_vec()).collect();
                let eq_rhs: Vec<f64> = (0..poly.q()).map(|i| poly.rhs(i)).collect();
                poly = Polyhedron::new(
                    Matrix::from_vec_rows(n, &eq_rows),
                    eq_rhs,
                    Matrix::from_vec_rows(n, &ineq_rows),
                    ineq_rhs,
                )
                .expect("finite rows");
            }
            let v = gaussian_vec(&mut rng, n, 2.0);
            let fast = project(&poly, &v).map_err(|e| format!("solver: {e}"))?;
            let slow = project_bruteforce(&poly, &v).map_err(|e| format!("oracle: {e}"))?;
            checked += 1;
            match (fast.status, slow.status) {
                (ProjectionStatus::Optimal, ProjectionStatus::Optimal) => {
                    if dist(&fast.x, &slow.x) > 1e-7 {
                        disagreements += 1;
                    }
                }
                (ProjectionStatus::Infeasible, ProjectionStatus::Infeasible) => {}
                _ => disagreements += 1,
            }
        }
        ensure(checked == 500, || format!("only {checked} instances"))?;
        ensure(disagreements == 0, || {
            format!("{disagreements} disagreements out of 500")
        })
    });
}

#[test]
fn c06_firm_nonexpansiveness_everywhere() {
    criterion(6, "firm nonexpansiveness", None, || {
        let mut polys = Vec::new();
        for &name in builtin_names() {
            let s = builtin(name).unwrap();
            let a = s.anchors().unwrap().clone();
            polys.push(s.instantiate(&a.p).map_err(|e| e.to_string())?);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x_ACCE_0006);
        for _ in 0..20 {
            polys.push(random_feasible(&mut rng).0);
        }
        for poly in &polys {
            for _ in 0..200 {
                let v1 = gaussian_vec(&mut rng, poly.n(), 2.0);
                let v2 = gaussian_vec(&mut rng, poly.n(), 2.0);
                let r1 = project(poly, &v1).map_err(|e| e.to_string())?;
                let r2 = project(poly, &v2).map_err(|e| e.to_string())?;
                if r1.status != ProjectionStatus::Optimal {
                    continue; // the whole set is empty; nothing to test
                }
                let dv = sub(&v1, &v2);
                let mut lhs = dv.clone();
                for ((l, a), b) in lhs.iter_mut().zip(&r1.x).zip(&r2.x) {
                    *l -= 2.0 * (a - b);
                }
                ensure(norm(&lhs) <= norm(&dv) + 1e-9, || {
                    format!(
                        "violation: |dv - 2 dP| = {} > |dv| = {}",
                        norm(&lhs),
                        norm(&dv)
                    )
                })?;
            }
        }
        Ok(())
    });
}

#[test]
fn c07_rank_scan_passes_and_fails_where_it_should() {
    criterion(7, "rank scan", Some(Duration::from_secs(10)), || {
        let hatc = builtin("hatc-demo").unwrap();
        let anchor = hatc.instantiate(&[0.0]).map_err(|e| e.to_string())?;
        let xbar = project(&anchor, &[1.0, 1.0]).map_err(|e| e.to_string())?.x;
        for radius in [0.1, 0.05, 0.025] {
            let scan = rcrcq_check(&hatc, &[0.0], &xbar, radius, 16, DEFAULT_SUBSET_CAP, 42)
                .map_err(|e| e.to_string())?;
            ensure(!scan.is_empty() && scan.iter().all(|s| s.holds), || {
                format!("hatc-demo rank scan failed at radius {radius}")
            })?;
        }

        let ex1 = builtin("ex1").unwrap();
        let a1 = ex1.instantiate(&[0.0]).map_err(|e| e.to_string())?;
        let x1 = project(&a1, &[-1.0, -1.0]).map_err(|e| e.to_string())?.x;
        let scan = rcrcq_check(&ex1, &[0.0], &x1, 0.1, 16, DEFAULT_SUBSET_CAP, 42)
            .map_err(|e| e.to_string())?;
        let row1 = scan
            .iter()
            .find(|s| s.subset == vec![1])
            .ok_or_else(|| "subset [1] not scanned".to_string())?;
        ensure(!row1.holds, || "subset [1] unexpectedly constant-rank".into())?;
        ensure(
            row1.rank_at_anchor == 0 && row1.min_rank_sampled == 1 && row1.max_rank_sampled == 1,
            || {
                format!(
                    "rank pattern ({}, {}..{}), expected (0, 1..1)",
                    row1.rank_at_anchor, row1.min_rank_sampled, row1.max_rank_sampled
                )
            },
        )
    });
}

#[test]
fn c08_recovered_coefficients_track_the_parameter_linearly() {
    criterion(8, "coefficient recovery", None, || {
        // At p in (0, 0.9) the first two rows of hatc-demo are active at
        // P((1,1), p) with coefficients (1-p, 1-p): the recovery error
        // against the anchor coefficients is sqrt(2) * p exactly, so the
        // constant fitted at n = 10 must keep working at 100 and 1000.
        let s = builtin("hatc-demo").unwrap();
        let vbar = [1.0, 1.0];
        let coeffs_at = |p: f64| -> Result<Vec<f64>, String> {
            let poly = s.instantiate(&[p]).map_err(|e| e.to_string())?;
            let res = project(&poly, &vbar).map_err(|e| e.to_string())?;
            let basis: Vec<Vec<f64>> = res.active.iter().map(|&i| poly.row(i).to_vec()).collect();
            let target = sub(&vbar, &res.x);
            recover_coefficients(&basis, &target, 1e-9).map_err(|e| e.to_string())
        };
        let base = coeffs_at(0.0)?;
        let error_at = |n: usize| -> Result<f64, String> {
            let c = coeffs_at(1.0 / n as f64)?;
            ensure(c.len() == base.len(), || {
                format!("active set changed: {} vs {} coefficients", c.len(), base.len())
            })?;
            Ok(dist(&c, &base))
        };
        let e10 = error_at(10)?;
        let e100 = error_at(100)?;
        let e1000 = error_at(1000)?;
        let c = 10.0 * e10;
        ensure(e100 <= c / 100.0 * (1.0 + 1e-9), || {
            format!("error(100) = {e100} exceeds C/100 = {}", c / 100.0)
        })?;
        ensure(e1000 <= c / 1000.0 * (1.0 + 1e-9), || {
            format!("error(1000) = {e1000} exceeds C/1000 = {}", c / 1000.0)
        })?;
        ensure(e10 / e100 >= 5.0 && e100 / e1000 >= 5.0, || {
            format!("decade factors {} and {} below 5", e10 / e100, e100 / e1000)
        })
    });
}

#[test]
fn c09_active_sets_only_shrink_nearby() {
    criterion(9, "active-set inclusion", None, || {
        for name in ["ex2", "ex5", "ex6s"] {
            let s = builtin(name).unwrap();
            let check =
                active_set_inclusion_check(&s, 0.1, 64, 42).map_err(|e| e.to_string())?;
            ensure(check.holds && check.violations == 0, || {
                format!(
                    "{name}: holds = {}, {} violations at radius {}",
                    check.holds, check.violations, check.radius_used
                )
            })?;
        }
        Ok(())
    });
}

#[test]
fn c10_reports_are_deterministic_modulo_timestamp() {
    criterion(10, "determinism", None, || {
        let run = || -> Result<String, String> {
            let out = std::process::Command::new(env!("CARGO_BIN_EXE_polyproj"))
                .args(["certify", "--scenario", "ex6s", "--seed", "42"])
                .output()
                .map_err(|e| e.to_string())?;
            ensure(out.status.code() == Some(0), || {
                format!("exit {:?}", out.status.code())
            })?;
            String::from_utf8(out.stdout).map_err(|e| e.to_string())
        };
        let a = run()?;
        let b = run()?;
        ensure(!a.is_empty(), || "empty report".into())?;
        serde_json::from_str::<serde_json::Value>(&a).map_err(|e| e.to_string())?;
        ensure(
            polyproj::report::strip_timestamp(&a) == polyproj::report::strip_timestamp(&b),
            || "reports differ beyond the timestamp".into(),
        )
    });
}
