//! The verification battery behind `mesodefect verify`: structural
//! validation, algebraic identities on the defect densities, loop jumps,
//! Stokes relations, distributional pairings against the predicted
//! incompatibility, and the decomposition invariants.

use mesodefect_core::decomp::{
    compatible_remainder, solenoidal_closed_form, weights_from_ensemble,
};
use mesodefect_core::fields::ensemble_strain;
use mesodefect_core::math::Vec2;
use mesodefect_core::model::{
    densities_from_ensemble, transform_reference_point, validate_ensemble, DefectEnsemble,
};
use mesodefect_core::multival::{jump_around_loop, stokes_check, verify_density_identities};
use mesodefect_core::pairing::{
    incompatibility_via_contortion, pair_divergence, pair_incompatibility_of,
    verify_main_theorem, predicted_incompatibility,
};
use mesodefect_core::quad::{BumpTestFunction, PolylinePath};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{auto_suite, inflated_bbox, RunConfig};
use crate::report::{Check, Report};

/// Relative tolerance for the quadrature pairings when neither the config
/// nor the command line provides one.
pub const DEFAULT_TOL: f64 = 1e-4;

/// Worker cap: hardware parallelism, further capped by MESODEFECT_THREADS.
pub fn thread_cap() -> usize {
    let hw = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1);
    match std::env::var("MESODEFECT_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
    {
        Some(n) if n >= 1 => hw.min(n),
        _ => hw,
    }
}

/// Order-preserving parallel map over independent work items, bounded by
/// `thread_cap()` workers.
pub fn parallel_map<I, T, F>(items: Vec<I>, f: F) -> Vec<T>
where
    I: Send,
    T: Send,
    F: Fn(I) -> T + Sync,
{
    let n = items.len();
    let threads = thread_cap().min(n.max(1));
    if threads <= 1 {
        return items.into_iter().map(f).collect();
    }
    let chunk = n.div_ceil(threads);
    let mut chunks: Vec<Vec<I>> = Vec::new();
    let mut it = items.into_iter();
    loop {
        let c: Vec<I> = it.by_ref().take(chunk).collect();
        if c.is_empty() {
            break;
        }
        chunks.push(c);
    }
    let f = &f;
    std::thread::scope(|scope| {
        let handles: Vec<_> = chunks
            .into_iter()
            .map(|c| scope.spawn(move || c.into_iter().map(f).collect::<Vec<T>>()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("verification worker panicked"))
            .collect()
    })
}

/// Deterministic probe points inside the inflated bounding box, at least
/// 1e-3 away from every line foot.
fn probe_points(e: &DefectEnsemble, count: usize, seed: u64) -> Vec<Vec2> {
    let (lo, hi) = inflated_bbox(e);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let p = Vec2::new(rng.gen_range(lo.x..=hi.x), rng.gen_range(lo.y..=hi.y));
        if e.distance_to_lines(p) > 1e-3 {
            out.push(p);
        }
    }
    out
}

fn algebra_checks(e: &DefectEnsemble) -> Vec<Check> {
    let mut checks = Vec::new();

    // contortion identity: both symbolic assemblies of the incompatibility
    // must agree coefficient by coefficient
    match densities_from_ensemble(e) {
        Ok(d) => {
            let direct = predicted_incompatibility(e);
            let via = incompatibility_via_contortion(&d);
            for k in 0..3 {
                let diff = direct[k].max_coefficient_difference(&via[k]);
                checks.push(Check::compare(
                    format!("contortion[k={k}]"),
                    diff,
                    0.0,
                    1e-14,
                ));
            }
        }
        Err(_) => checks.push(Check::inconclusive("contortion".into())),
    }

    // reference-point algebra: B.Omega per line is invariant and the shift
    // round-trips exactly
    let mut shift = Vec2::new(0.7312, -0.4281);
    let mut moved = transform_reference_point(e, e.x0 + shift);
    for _ in 0..8 {
        if moved.is_ok() {
            break;
        }
        shift = shift + Vec2::new(0.311, 0.173);
        moved = transform_reference_point(e, e.x0 + shift);
    }
    match moved.and_then(|m| transform_reference_point(&m, e.x0).map(|back| (m, back))) {
        Ok((m, back)) => {
            let mut scale = 1.0f64;
            let mut err_inv = 0.0f64;
            let mut err_rt = 0.0f64;
            for ((a, b), c) in e.lines.iter().zip(&m.lines).zip(&back.lines) {
                let ia = a.burgers.dot(a.frank());
                let ib = b.burgers.dot(b.frank());
                err_inv = err_inv.max((ia - ib).abs());
                err_rt = err_rt.max((a.burgers - c.burgers).norm());
                scale = scale.max(a.burgers.norm()).max(ia.abs());
            }
            checks.push(Check::compare(
                "reference_point_invariant".into(),
                err_inv,
                0.0,
                1e-14 * scale,
            ));
            checks.push(Check::compare(
                "reference_point_round_trip".into(),
                err_rt,
                0.0,
                1e-14 * scale,
            ));
        }
        Err(_) => checks.push(Check::inconclusive("reference_point".into())),
    }
    checks
}

/// One counterclockwise circle around line `i` only, kept clear of all
/// other lines.
fn line_loop(e: &DefectEnsemble, i: usize) -> PolylinePath {
    let p = e.lines[i].position;
    let nearest = e
        .lines
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != i)
        .map(|(_, l)| (l.position - p).norm())
        .fold(f64::INFINITY, f64::min);
    let r = (0.4 * nearest).min(0.3);
    PolylinePath::circle(p, r, 128, true)
}

fn jump_checks(e: &DefectEnsemble, tol: f64) -> Vec<Check> {
    let mut checks = Vec::new();
    for i in 0..e.lines.len() {
        let name = format!("jump[line {i}]");
        match jump_around_loop(e, &line_loop(e, i)) {
            Ok(j) => {
                let l = &e.lines[i];
                let err = (j.frank_jump - l.frank())
                    .norm()
                    .max((j.burgers_jump - l.burgers).norm());
                checks.push(Check::compare(name, err, 0.0, tol));
            }
            Err(_) => checks.push(Check::inconclusive(name)),
        }
    }
    checks
}

fn stokes_checks(e: &DefectEnsemble, tol: f64) -> Vec<Check> {
    let (lo, hi) = inflated_bbox(e);
    let center = (lo + hi) * 0.5;
    let r = e
        .lines
        .iter()
        .map(|l| (l.position - center).norm())
        .fold(0.0f64, f64::max)
        + 1.0;
    let path = PolylinePath::circle(center, r, 256, true);
    match stokes_check(e, &path, tol) {
        Ok(rep) => vec![Check::compare(
            "stokes[all lines]".into(),
            rep.max_abs_error,
            0.0,
            tol,
        )],
        Err(_) => vec![Check::inconclusive("stokes[all lines]".into())],
    }
}

/// All pairing checks for one test function: predicted incompatibility,
/// the two density identities, solenoidality of the closed-form part, and
/// compatibility of the remainder.
fn bump_checks(e: &DefectEnsemble, i: usize, phi: &BumpTestFunction, tol: f64) -> Vec<Check> {
    let mut checks = Vec::new();
    let single = std::slice::from_ref(phi);

    for (k, r) in verify_main_theorem(e, single, tol).into_iter().enumerate() {
        let mut c = Check::from(r);
        c.name = format!("incompatibility[bump {i}][k={k}]");
        checks.push(c);
    }

    match verify_density_identities(e, single, tol) {
        Ok(reports) => {
            for (j, r) in reports.into_iter().enumerate() {
                let mut c = Check::from(r);
                let (row, k) = if j < 3 { ("theta", j) } else { ("lambda", j - 3) };
                c.name = format!("{row}[bump {i}][k={k}]");
                checks.push(c);
            }
        }
        Err(_) => checks.push(Check::inconclusive(format!("density[bump {i}]"))),
    }

    let w = weights_from_ensemble(e);
    let feet = w.feet();
    let sol = |x: Vec2| solenoidal_closed_form(&w, x).ok();
    let mut worst = 0.0f64;
    let mut conclusive = true;
    for m in 0..3 {
        match pair_divergence(&sol, &feet, phi, m) {
            Ok(v) => worst = worst.max(v.abs()),
            Err(_) => conclusive = false,
        }
    }
    let name = format!("solenoidal_divergence[bump {i}]");
    if conclusive {
        checks.push(Check::compare(name, worst, 0.0, 1e-4));
    } else {
        checks.push(Check::inconclusive(name));
    }

    let rem = |x: Vec2| compatible_remainder(&w, e.wedge_params, x).ok();
    let mut worst = 0.0f64;
    let mut conclusive = true;
    for k in 0..3 {
        match pair_incompatibility_of(&rem, &feet, phi, k) {
            Ok(v) => worst = worst.max(v.abs()),
            Err(_) => conclusive = false,
        }
    }
    let name = format!("remainder_incompatibility[bump {i}]");
    if conclusive {
        checks.push(Check::compare(name, worst, 0.0, 1e-4));
    } else {
        checks.push(Check::inconclusive(name));
    }
    checks
}

fn reassembly_check(e: &DefectEnsemble) -> Check {
    let w = weights_from_ensemble(e);
    let probes = probe_points(e, 50, 0xD5);
    let mut worst = 0.0f64;
    let mut scale = 1.0f64;
    for p in probes {
        let (Ok(full), Ok(s), Ok(c)) = (
            ensemble_strain(e, p),
            solenoidal_closed_form(&w, p),
            compatible_remainder(&w, e.wedge_params, p),
        ) else {
            return Check::inconclusive("reassembly".into());
        };
        worst = worst.max((full - (s + c)).max_abs());
        scale = scale.max(full.max_abs());
    }
    Check::compare("reassembly".into(), worst, 0.0, 1e-10 * scale)
}

/// Runs the full battery. Structural violations short-circuit: nothing else
/// is well defined on an invalid ensemble.
pub fn run_verify(cfg: &RunConfig, tol_flag: Option<f64>) -> Report {
    let e = cfg.ensemble();
    let validation = validate_ensemble(&e);
    if !validation.ok {
        let checks = validation
            .messages()
            .into_iter()
            .map(|m| Check::fail(format!("validate: {m}")))
            .collect();
        return Report::new(checks);
    }
    let tol = tol_flag.or(cfg.tol).unwrap_or(DEFAULT_TOL);

    let mut suite = cfg.bump_suite(&e);
    if suite.is_empty() {
        suite = auto_suite(&e, 2, 0);
    }

    let mut checks = vec![Check::pass("validate".into())];
    checks.extend(algebra_checks(&e));
    checks.extend(jump_checks(&e, 1e-8));
    checks.extend(stokes_checks(&e, 1e-8));
    checks.push(reassembly_check(&e));
    let indexed: Vec<(usize, BumpTestFunction)> = suite.into_iter().enumerate().collect();
    let bump_results = parallel_map(indexed, |(i, phi)| bump_checks(&e, i, &phi, tol));
    checks.extend(bump_results.into_iter().flatten());
    Report::new(checks)
}

/// Structural validation only.
pub fn run_validate(cfg: &RunConfig) -> Report {
    let e = cfg.ensemble();
    let validation = validate_ensemble(&e);
    if validation.ok {
        Report::new(vec![Check::pass("validate".into())])
    } else {
        Report::new(
            validation
                .messages()
                .into_iter()
                .map(|m| Check::fail(format!("validate: {m}")))
                .collect(),
        )
    }
}
