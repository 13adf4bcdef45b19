//! Acceptance harness. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails. Reference values come from the
//! brute-force oracles in `common`, never from the solver under test.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{brute_contains, brute_max_normalized_slack, example32, p, random_tech, tech, tech1, tech2};
use dea_path::audit::{
    audit_all, audit_mo, has_strictly_monotone_flow, hierarchy_breaches, verify_ideal_guarantee, AuditOptions,
    AuditReport, Sampler, TechnologyKind, WeakBoundaryWitness,
};
use dea_path::geometry::{is_ideal_technology_iv, is_ideal_technology_v, is_trivial_technology, COINCIDENCE_TOL};
use dea_path::linprog::DEFAULT_TOL;
use dea_path::report::{table5_row, Table5};
use dea_path::{
    make_direction, solve_gs, solve_gs_direct_lp, DeaError, Direction, DirectionScheme, Model, PathSpec, Point,
    SolverOptions, TechnologySet,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self { pass, detail: detail.into() }
    }
}

/// Collects failure messages; a criterion passes when none were recorded.
#[derive(Default)]
struct Checks(Vec<String>);

impl Checks {
    fn ensure(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok {
            self.0.push(msg());
        }
    }

    fn finish(self, summary: String, elapsed: Duration, budget: Duration) -> Outcome {
        let mut failures = self.0;
        if elapsed > budget {
            failures.push(format!("took {elapsed:.2?}, budget {budget:.0?}"));
        }
        if failures.is_empty() {
            Outcome::new(true, format!("{summary} in {elapsed:.2?}"))
        } else {
            let shown: Vec<_> = failures.iter().take(3).cloned().collect();
            Outcome::new(false, format!("{} problem(s): {}", failures.len(), shown.join("; ")))
        }
    }
}

/// Path point computed straight from the catalog formulas.
fn catalog_point(kind: &str, d: &Direction, unit: &Point, theta: f64) -> Point {
    let (px, py) = match kind {
        "ddf" => (theta, 2.0 - theta),
        "hdf" => (theta, 1.0 / theta),
        _ => unreachable!(),
    };
    Point::new(
        unit.x.iter().zip(&d.gx).map(|(x, g)| x + (px - 1.0) * g).collect(),
        unit.y.iter().zip(&d.gy).map(|(y, g)| y + (py - 1.0) * g).collect(),
    )
}

/// Smallest θ in [lo, 1] whose DDF path point lies in `T`: a grid scan with
/// step 1e-3 followed by bisection, both on the vertex-enumeration oracle.
fn scan_theta(t: &TechnologySet, d: &Direction, unit: &Point, lo: f64) -> f64 {
    let inside = |th: f64| brute_contains(t, &catalog_point("ddf", d, unit, th));
    let steps = ((1.0 - lo) / 1e-3).ceil() as usize;
    let mut hi = 1.0;
    let mut below = lo;
    for k in 0..=steps {
        let th = (lo + k as f64 * 1e-3).min(1.0);
        if inside(th) {
            hi = th;
            below = (th - 1e-3).max(lo);
            break;
        }
    }
    if below == hi || inside(below) {
        return hi;
    }
    for _ in 0..60 {
        let mid = 0.5 * (below + hi);
        if inside(mid) {
            hi = mid;
        } else {
            below = mid;
        }
    }
    hi
}

fn is_strong(t: &TechnologySet, q: &Point, threshold: f64) -> bool {
    brute_max_normalized_slack(t, q).expect("point in T") <= threshold
}

fn criterion1() -> Outcome {
    let t = example32();
    let model = Model::new(PathSpec::ddf(), DirectionScheme::scaled_range(1.0, 3.0));
    // Intersections of each path with the frontier segments.
    let expected = [
        ("A", 5.0 / 6.0),
        ("B", 1.0),
        ("C", 1.0),
        ("D", 0.5),
        ("E", 5.0 / 7.0),
        ("F", 2.0 / 3.0),
        ("G", 2.0 / 3.0),
    ];
    let projections = [("A", p(&[1.0], &[2.0])), ("D", p(&[2.0], &[3.0])), ("F", p(&[7.0 / 3.0], &[3.0])), ("G", p(&[3.0], &[3.0]))];
    let mut c = Checks::default();
    let threshold = model.options.slack_rel_threshold;
    // Only the solver and the audit count against the time budget.
    let start = Instant::now();
    let results = model.evaluate_units(&t);
    let audit = audit_all(&t, &model, &AuditOptions::default());
    let elapsed = start.elapsed();
    for ((id, theta), r) in expected.into_iter().zip(results) {
        let j = t.dataset().index_of(id).unwrap();
        let unit = t.dataset().unit(j);
        let r = r.unwrap();
        c.ensure((r.theta_star - theta).abs() <= 1e-6, || format!("{id}: θ* {} vs {theta}", r.theta_star));
        let d = make_direction(&model.scheme, &model.spec, &t, Some(id), unit).unwrap();
        let scanned = scan_theta(&t, &d, unit, 0.0);
        c.ensure((scanned - theta).abs() <= 1e-6, || format!("{id}: scan oracle {scanned} vs {theta}"));
        let weak_expected = matches!(id, "F" | "G");
        c.ensure(r.strongly_efficient_projection != weak_expected, || format!("{id}: projection flag"));
        c.ensure(is_strong(&t, &r.projection, threshold) != weak_expected, || format!("{id}: oracle flag"));
        if let Some((_, proj)) = projections.iter().find(|(u, _)| *u == id) {
            c.ensure(r.projection.max_abs_diff(proj) <= 1e-6, || format!("{id}: projection {:?}", r.projection));
        }
    }
    let verdict = (audit.id_pass(), audit.pr_pass(), audit.mo_pass());
    c.ensure(verdict == (Some(true), Some(false), Some(false)), || format!("audit ID/PR/MO = {verdict:?}"));
    c.finish("7 scores, 5 flags, ID pass / PR fail / MO fail".into(), elapsed, Duration::from_secs(1))
}

fn lemma_datasets() -> Vec<(String, TechnologySet)> {
    let mut v = vec![("example".to_string(), example32()), ("tech1".into(), tech1()), ("tech2".into(), tech2())];
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for k in 0..5 {
        let (n, m, s) = (rng.gen_range(3..=12), rng.gen_range(1..=3), rng.gen_range(1..=3));
        v.push((format!("random{k}"), random_tech(&mut rng, n, m, s, k % 2 == 0)));
    }
    v
}

fn criterion2() -> Outcome {
    let mut c = Checks::default();
    let mut worst = Duration::ZERO;
    let mut units = 0;
    for (name, t) in lemma_datasets() {
        let start = Instant::now();
        let ideal = t.ideal_point();
        for (kind, theta_min) in [("ddf", 0.0), ("hdf", 0.5)] {
            let spec = if kind == "ddf" { PathSpec::ddf() } else { PathSpec::hdf() };
            let model = Model::new(spec.clone(), DirectionScheme::GsRange { theta_min });
            for (id, unit) in t.dataset().unit_ids().iter().zip(t.dataset().units()) {
                let r = model.evaluate(&t, Some(id), unit).unwrap();
                units += 1;
                c.ensure(r.theta_star >= theta_min - 1e-9, || format!("{name}/{kind}/{id}: θ* {}", r.theta_star));
                if unit.max_abs_diff(&ideal) == 0.0 {
                    continue;
                }
                let d = make_direction(&model.scheme, &spec, &t, Some(id), unit).unwrap();
                let gap = catalog_point(kind, &d, unit, theta_min).max_abs_diff(&ideal);
                c.ensure(gap <= 1e-9, || format!("{name}/{kind}/{id}: path misses the ideal point by {gap}"));
            }
        }
        worst = worst.max(start.elapsed());
    }
    c.finish(format!("{units} unit evaluations, slowest dataset"), worst, Duration::from_secs(1))
}

fn criterion3() -> Outcome {
    let start = Instant::now();
    let mut c = Checks::default();
    for (name, t, want) in [("tech1", tech1(), true), ("tech2", tech2(), false)] {
        let v = is_ideal_technology_v(&t, COINCIDENCE_TOL, DEFAULT_TOL).unwrap().is_ideal;
        let iv = is_ideal_technology_iv(&t, DEFAULT_TOL).unwrap().is_ideal;
        c.ensure(v == want && iv == want, || format!("{name}: v={v} iv={iv}, expected {want}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut ideal = 0;
    for k in 0..200 {
        let (n, m, s) = (rng.gen_range(1..=8), rng.gen_range(1..=3), rng.gen_range(1..=2));
        let t = random_tech(&mut rng, n, m, s, k % 4 != 0);
        let v = is_ideal_technology_v(&t, COINCIDENCE_TOL, DEFAULT_TOL).unwrap().is_ideal;
        let iv = is_ideal_technology_iv(&t, DEFAULT_TOL).unwrap().is_ideal;
        c.ensure(v == iv, || format!("random dataset {k}: v={v} iv={iv}"));
        ideal += usize::from(v);
    }
    c.finish(format!("tech1 ideal, tech2 not; 200 random datasets agree ({ideal} ideal)"), start.elapsed(), Duration::from_secs(30))
}

fn g2_models() -> [Model; 2] {
    [
        Model::new(PathSpec::ddf(), DirectionScheme::GsRange { theta_min: 0.0 }),
        Model::new(PathSpec::hdf(), DirectionScheme::GsRange { theta_min: 0.5 }),
    ]
}

fn criterion4(witnesses: &mut Vec<(String, WeakBoundaryWitness)>) -> Outcome {
    let start = Instant::now();
    let mut c = Checks::default();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut datasets = vec![tech1()];
    for _ in 0..50 {
        let n = rng.gen_range(1..=10);
        datasets.push(random_tech(&mut rng, n, 1, 1, false));
    }
    for (k, t) in datasets.iter().enumerate() {
        for model in g2_models() {
            for (id, unit) in t.dataset().unit_ids().iter().zip(t.dataset().units()) {
                let r = model.evaluate(t, Some(id), unit).unwrap();
                let oracle = is_strong(t, &r.projection, model.options.slack_rel_threshold);
                c.ensure(r.strongly_efficient_projection && oracle, || {
                    format!("dataset {k} {} unit {id}: weak projection", model.id())
                });
            }
        }
    }
    let opts = AuditOptions::default();
    for model in g2_models() {
        let theta_min = match model.scheme {
            DirectionScheme::GsRange { theta_min } => theta_min,
            _ => unreachable!(),
        };
        let s = verify_ideal_guarantee(&tech2(), &model.spec, theta_min, model.options, &opts).unwrap();
        match &s.witness {
            Some(w) => {
                let t = tech2();
                c.ensure(w.gx.iter().chain(&w.gy).all(|g| *g > 0.0), || format!("{}: direction not positive", s.model_id));
                c.ensure((w.theta_star - 1.0).abs() <= 1e-7, || format!("{}: witness θ* {}", s.model_id, w.theta_star));
                c.ensure(!w.strongly_efficient_projection, || format!("{}: witness projection strong", s.model_id));
                c.ensure(brute_contains(&t, &w.point), || format!("{}: witness outside T", s.model_id));
                c.ensure(!is_strong(&t, &w.point, 1e-6), || format!("{}: oracle calls witness strong", s.model_id));
                witnesses.push((s.model_id.clone(), w.clone()));
            }
            None => c.0.push(format!("{}: no weak-boundary witness on tech2", s.model_id)),
        }
    }
    c.finish("51 datasets fully strong under DDF-G2 and HDF-G2; tech2 witness found".into(), start.elapsed(), Duration::from_secs(60))
}

fn trivial_tech() -> TechnologySet {
    tech(&[
        ("U", &[1.0, 1.0], &[5.0]),
        ("V", &[2.0, 1.0], &[5.0]),
        ("W", &[1.0, 3.0], &[4.0]),
        ("Z", &[3.0, 3.0], &[2.0]),
    ])
}

fn criterion5() -> Outcome {
    let start = Instant::now();
    let mut c = Checks::default();
    let t = tech1();
    for model in g2_models() {
        let mut sampler = Sampler::new(&t, 5);
        let extra: Vec<Point> = (0..100)
            .flat_map(|_| {
                let (a, b) = sampler.dominance_pair();
                [a, b]
            })
            .collect();
        let r = audit_mo(&t, &model, &extra, &AuditOptions::default());
        c.ensure(r.failures.is_empty(), || format!("{}: {:?}", model.id(), r.failures.first()));
        c.ensure(r.mo_violations.is_empty(), || format!("{}: {} MO violations on tech1", model.id(), r.mo_violations.len()));
        c.ensure(r.mo_pairs_checked >= 100, || format!("{}: only {} pairs checked", model.id(), r.mo_pairs_checked));
    }
    let triv = trivial_tech();
    c.ensure(is_trivial_technology(&triv, DEFAULT_TOL).unwrap(), || "fixture is not trivial".into());
    for model in g2_models() {
        let DirectionScheme::GsRange { theta_min } = model.scheme else { unreachable!() };
        for (id, unit) in triv.dataset().unit_ids().iter().zip(triv.dataset().units()) {
            let r = model.evaluate(&triv, Some(id), unit).unwrap();
            let want = if id == "U" { 1.0 } else { theta_min };
            c.ensure((r.theta_star - want).abs() <= 1e-9, || format!("{} {id}: θ* {} vs {want}", model.id(), r.theta_star));
        }
        let s = verify_ideal_guarantee(&triv, &model.spec, theta_min, model.options, &AuditOptions::default()).unwrap();
        c.ensure(s.kind == TechnologyKind::Trivial && s.pass, || format!("{}: trivial guarantee {:?}", model.id(), s.kind));
        c.ensure(s.mo_violations > 0, || format!("{}: no MO violation reported on the trivial technology", model.id()));
    }
    c.finish("tech1 strictly monotone on generators + 100 pairs; trivial technology scores θ_min".into(), start.elapsed(), Duration::from_secs(60))
}

fn criterion6() -> Outcome {
    let start = Instant::now();
    let mut c = Checks::default();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut instances, mut flagged) = (0, 0);
    while instances < 100 {
        let (n, m, s) = (rng.gen_range(1..=8), rng.gen_range(1..=3), rng.gen_range(1..=2));
        let integer = rng.gen_bool(0.3);
        let t = random_tech(&mut rng, n, m, s, integer);
        let scheme = match rng.gen_range(0..4) {
            0 => DirectionScheme::Proportional,
            1 => DirectionScheme::GsRange { theta_min: 0.0 },
            2 => DirectionScheme::GlobalRange,
            _ => DirectionScheme::Average,
        };
        let model = Model::new(PathSpec::ddf(), scheme);
        let small = n <= 6 && m + s <= 3;
        for (id, unit) in t.dataset().unit_ids().iter().zip(t.dataset().units()) {
            let problem = match model.problem(&t, Some(id), unit) {
                Err(DeaError::ZeroDirection) => continue,
                other => other.unwrap(),
            };
            instances += 1;
            let a = solve_gs(&problem).unwrap();
            let b = solve_gs_direct_lp(&problem).unwrap();
            c.ensure((a.theta_star - b.theta_star).abs() <= 1e-6, || format!("{id}: {} vs {}", a.theta_star, b.theta_star));
            if small {
                let slack = brute_max_normalized_slack(&t, &a.projection).expect("projection in T");
                let thr = model.options.slack_rel_threshold;
                // Slacks within rounding of the threshold cannot be classified reliably.
                if (slack - thr).abs() > 1e-8 {
                    flagged += 1;
                    c.ensure(a.strongly_efficient_projection == (slack <= thr), || format!("{id}: flag vs oracle slack {slack}"));
                }
            }
        }
    }
    c.finish(format!("{instances} instances agree; {flagged} flags match the oracle"), start.elapsed(), Duration::from_secs(60))
}

fn criterion7(witnesses: &[(String, WeakBoundaryWitness)]) -> Outcome {
    let start = Instant::now();
    let mut c = Checks::default();
    let opts = AuditOptions {
        mo_sample_pairs: 50,
        ..AuditOptions::default()
    };
    let mut configs: Vec<(String, TechnologySet, Model)> = vec![(
        "example".into(),
        example32(),
        Model::new(PathSpec::ddf(), DirectionScheme::scaled_range(1.0, 3.0)),
    )];
    let mut datasets = lemma_datasets();
    datasets.push(("trivial".into(), trivial_tech()));
    for (name, t) in datasets {
        for model in g2_models() {
            configs.push((name.clone(), t.clone(), model));
        }
        for scheme in [DirectionScheme::Proportional, DirectionScheme::GlobalRange, DirectionScheme::Average] {
            configs.push((name.clone(), t.clone(), Model::new(PathSpec::ddf(), scheme)));
        }
    }
    let mut audited = 0;
    for (name, t, model) in &configs {
        let mut report: AuditReport = audit_all(t, model, &opts);
        if name == "tech2" && matches!(model.scheme, DirectionScheme::GsRange { .. }) {
            match witnesses.iter().find(|(id, _)| *id == model.id()) {
                Some((_, w)) => report.absorb_witness(w),
                None => c.0.push(format!("tech2 witness missing for {}", model.id())),
            }
        }
        let trivial = is_trivial_technology(t, DEFAULT_TOL).unwrap();
        let breaches = hierarchy_breaches(&report, has_strictly_monotone_flow(model, trivial));
        c.ensure(breaches.is_empty(), || format!("{name}: {}", breaches.join(", ")));
        audited += 1;
    }
    c.finish(format!("{audited} audited configurations consistent"), start.elapsed(), Duration::from_secs(120))
}

fn criterion8() -> Outcome {
    println!(
        "  note: the published strong-projection tables cannot be reproduced because only descriptive \
         statistics of the original datasets are available, not the raw data."
    );
    println!("  note: criteria 1 to 7 stand in for them; below is the same report format on synthetic data.");
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let rows = (0..2)
        .map(|k| table5_row(&format!("synthetic{k}"), &random_tech(&mut rng, 20, 3, 2, false), SolverOptions::default()))
        .collect::<Vec<_>>();
    let table = Table5::new(rows);
    for line in table.to_table().lines() {
        println!("  {line}");
    }
    let complete = table.rows.iter().all(|r| r.pct_strong.iter().all(|p| matches!(p, Some(v) if (0.0..=100.0).contains(v))));
    Outcome::new(complete, "non-reproducibility recorded; Table 5 format generated on two 20x3x2 synthetic datasets")
}

fn main() -> ExitCode {
    let mut witnesses = Vec::new();
    let results = [
        criterion1(),
        criterion2(),
        criterion3(),
        criterion4(&mut witnesses),
        criterion5(),
        criterion6(),
        criterion7(&witnesses),
        criterion8(),
    ];
    let mut all = true;
    for (k, r) in results.iter().enumerate() {
        println!("criterion {}: {} ({})", k + 1, if r.pass { "PASS" } else { "FAIL" }, r.detail);
        all &= r.pass;
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
