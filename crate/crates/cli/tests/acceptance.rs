//! Acceptance criteria, one PASS/FAIL line each. Runs as a plain binary so
//! the lines are printed whether or not the run is captured.

use std::f64::consts::PI;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use blaschke_cli::verify::{
    boundary_calibration, circle_identity_error, random_automorphism, random_multiset,
    random_point, random_product, ratio_range, refinement_ratios, round_trip_distance,
    schedule_disagreement, CURVATURE_MAX_DEGREE, MATCH_TOL, REFINEMENT_RATIO, SCAN_FACTOR,
    SCAN_RADII,
};
use blaschke_core::{
    beta_eval, boundary_limit_scan, composition_check, curvature_residual, forward_phi, invert_phi,
    min_cost_assignment, vanishing_order, BlaschkeProduct, Complex64, DiskPoint, PointMultiset,
    SolverConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn round_trip() -> Outcome {
    let mut rng = rng(11);
    let start = Instant::now();
    let (mut worst, mut failures) = (0.0f64, 0);
    for _ in 0..200 {
        let d = rng.random_range(1..=8);
        match round_trip_distance(&random_multiset(&mut rng, d)) {
            Some(dist) => {
                worst = worst.max(dist);
                failures += usize::from(dist > MATCH_TOL);
            }
            None => failures += 1,
        }
    }
    let elapsed = start.elapsed();
    Outcome {
        passed: failures == 0 && elapsed <= Duration::from_secs(300),
        detail: format!(
            "200 trials, d <= 8: {failures} failed, worst {worst:.2e}, {:.1} s",
            elapsed.as_secs_f64()
        ),
    }
}

fn uniqueness() -> Outcome {
    let mut rng = rng(12);
    let (mut worst, mut failures) = (0.0f64, 0);
    for _ in 0..100 {
        let d = rng.random_range(1..=6);
        let target = random_multiset(&mut rng, d);
        match schedule_disagreement(&target, &mut rng) {
            Some(dist) => {
                worst = worst.max(dist);
                failures += usize::from(dist > MATCH_TOL);
            }
            None => failures += 1,
        }
    }
    Outcome {
        passed: failures == 0,
        detail: format!("100 targets, steps 0.1 vs 0.03 + perturbed predictor: {failures} failed, worst {worst:.2e}"),
    }
}

fn multiplicity() -> Outcome {
    let mut rng = rng(13);
    let (mut worst, mut failures) = (0.0f64, Vec::new());
    for _ in 0..10 {
        let c = random_point(&mut rng, 0.95);
        for m in [2usize, 3] {
            let ok = (|| {
                let report =
                    invert_phi(&PointMultiset::new(vec![c; m]), &SolverConfig::default()).ok()?;
                let image = forward_phi(&report.zeros).ok()?.critical_points;
                let radius = image
                    .values()
                    .map(|w| (w - c.value()).norm())
                    .fold(0.0, f64::max);
                worst = worst.max(radius);
                let order = vanishing_order(&BlaschkeProduct::new(report.zeros), c).ok()?;
                // R vanishes to order (local degree - 1) = m at an m-fold critical point
                Some(report.converged && radius <= 1e-6 && order == m as u32)
            })();
            if ok != Some(true) {
                failures.push((c.value(), m));
            }
        }
    }
    Outcome {
        passed: failures.is_empty(),
        detail: format!(
            "10 points x m in {{2, 3}}: worst cluster radius {worst:.2e}, vanishing order = local degree - 1, failures {failures:?}"
        ),
    }
}

fn schwarz_pick() -> Outcome {
    let mut rng = rng(14);
    let (mut max_ratio, mut not_strict) = (f64::NEG_INFINITY, 0);
    for _ in 0..50 {
        let f = random_product(&mut rng, 8);
        let (lo, hi) = ratio_range(&f, &mut rng, 200);
        max_ratio = max_ratio.max(hi);
        not_strict += usize::from(lo >= 1.0 - 1e-6);
    }
    Outcome {
        passed: max_ratio <= 1.0 + 1e-12 && not_strict == 0,
        detail: format!("10^4 samples over 50 maps: max R {max_ratio:.15}, maps without R < 1 - 1e-6: {not_strict}"),
    }
}

fn composition() -> Outcome {
    let mut rng = rng(15);
    let mut worst = 0.0f64;
    for k in 0..1000 {
        let z = random_point(&mut rng, 0.99).value();
        let f = random_product(&mut rng, 6);
        let g = random_product(&mut rng, 6);
        let s = random_automorphism(&mut rng);
        let t = random_automorphism(&mut rng);
        let (lhs, rhs) = match k % 4 {
            0 => composition_check(&f, &g, z),
            1 => composition_check(&f, &t, z),
            2 => composition_check(&s, &g, z),
            _ => composition_check(&s, &t, z),
        };
        worst = worst.max((lhs - rhs).abs());
    }
    Outcome {
        passed: worst <= 1e-11,
        detail: format!(
            "1000 triples, a quarter each of product/automorphism pairings: worst {worst:.2e}"
        ),
    }
}

fn boundary_limit() -> Outcome {
    let mut rng = rng(16);
    let calibration = boundary_calibration();
    let (mut worst, mut non_monotone, mut circle) = (0.0f64, 0, 0.0f64);
    for _ in 0..50 {
        let f = random_product(&mut rng, 6);
        let dev = boundary_limit_scan(&f, &SCAN_RADII, 256).expect("valid radii");
        worst = worst.max(dev[3] / calibration);
        non_monotone += usize::from(!dev.windows(2).all(|w| w[1] < w[0]));
        circle = circle.max(circle_identity_error(&f));
    }
    Outcome {
        passed: worst <= SCAN_FACTOR && non_monotone == 0 && circle <= 1e-10,
        detail: format!(
            "50 maps, d <= 6: worst deviation at 0.9999 is {worst:.2}x the calibration {calibration:.3e}, \
             {non_monotone} non-monotone, circle identity {circle:.2e}"
        ),
    }
}

fn curvature() -> Outcome {
    let mut rng = rng(17);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for _ in 0..10 {
        let f = random_product(&mut rng, CURVATURE_MAX_DEGREE);
        for r in refinement_ratios(&f) {
            lo = lo.min(r);
            hi = hi.max(r);
        }
    }
    let identity = curvature_residual(&BlaschkeProduct::identity(), 1e-3)
        .map(|r| r.max_residual)
        .unwrap_or(f64::INFINITY);
    Outcome {
        passed: REFINEMENT_RATIO.contains(&lo)
            && REFINEMENT_RATIO.contains(&hi)
            && identity <= 1e-3,
        detail: format!(
            "10 maps, d <= 4: ratios in [{lo:.4}, {hi:.4}], identity at 1e-3: {identity:.2e}"
        ),
    }
}

fn forward_structure() -> Outcome {
    let mut rng = rng(18);
    let (mut wrong_count, mut reflection, mut residual, mut errors) = (0, 0.0f64, 0.0f64, 0);
    for _ in 0..500 {
        let d = rng.random_range(1..=10);
        let zeros = random_multiset(&mut rng, d);
        let Ok(out) = forward_phi(&zeros) else {
            errors += 1;
            continue;
        };
        wrong_count += usize::from(out.critical_points.len() != d);
        residual = residual.max(out.max_residual());
        let mut mirrored: Vec<Complex64> = out
            .reflected_partners
            .iter()
            .map(|p| 1.0 / p.conj())
            .collect();
        mirrored.extend(std::iter::repeat_n(
            Complex64::new(0.0, 0.0),
            out.partners_at_infinity,
        ));
        let cost: Vec<Vec<f64>> = out
            .critical_points
            .values()
            .map(|c| mirrored.iter().map(|m| (c - m).norm()).collect())
            .collect();
        if cost.len() != mirrored.len() {
            wrong_count += 1;
            continue;
        }
        let (assign, _) = min_cost_assignment(&cost);
        for (i, &j) in assign.iter().enumerate() {
            reflection = reflection.max(cost[i][j]);
        }
    }
    Outcome {
        passed: errors == 0 && wrong_count == 0 && reflection <= 1e-8 && residual <= 1e-9,
        detail: format!(
            "500 maps, d <= 10: {errors} errors, {wrong_count} wrong counts, reflection {reflection:.2e}, max |f'(c)| {residual:.2e}"
        ),
    }
}

fn degeneration() -> Outcome {
    let direction = Complex64::from_polar(1.0, PI / 3.0);
    let at_origin = |dir: Complex64, k: i32| {
        let a = DiskPoint::from_complex(dir * (1.0 - 2f64.powi(-k))).expect("inside");
        beta_eval(a, Complex64::new(0.0, 0.0))
    };
    let moduli: Vec<f64> = (1..=40).map(|k| at_origin(direction, k).norm()).collect();
    let increasing = moduli[1..].windows(2).all(|w| w[1] > w[0]);
    let last = 1.0 - moduli[39];
    let real = (at_origin(Complex64::new(1.0, 0.0), 40) + 1.0).norm();
    Outcome {
        passed: increasing && last <= 1e-6 && real <= 1e-6,
        detail: format!(
            "|beta(0)| increasing for k >= 2: {increasing}, 1 - |beta(0)| at k = 40: {last:.2e}, real sequence |beta(0) + 1|: {real:.2e}"
        ),
    }
}

fn determinism() -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_blaschke"))
            .args([
                "verify",
                "--seed",
                "1",
                "--trials",
                "50",
                "--max-degree",
                "6",
            ])
            .output()
            .expect("binary runs")
    };
    let (a, b) = (run(), run());
    let same = a.stdout == b.stdout && !a.stdout.is_empty();
    let codes = (a.status.code(), b.status.code());
    Outcome {
        passed: same && codes == (Some(0), Some(0)),
        detail: format!("verify --seed 1 --trials 50 --max-degree 6 twice: identical {same}, exit codes {codes:?}"),
    }
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("round_trip", round_trip),
        ("uniqueness", uniqueness),
        ("multiplicity", multiplicity),
        ("schwarz_pick", schwarz_pick),
        ("composition", composition),
        ("boundary_limit", boundary_limit),
        ("curvature", curvature),
        ("forward_structure", forward_structure),
        ("degeneration", degeneration),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let outcome = check();
        let tag = if outcome.passed { "PASS" } else { "FAIL" };
        println!("{tag} {name}: {}", outcome.detail);
        failed += usize::from(!outcome.passed);
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
