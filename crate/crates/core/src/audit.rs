//! Dataset-level checks of the indication (ID), strong-projection (PR) and
//! strict-monotonicity (MO) properties, path-flow monotonicity, and the
//! guarantees that GS range directions give on ideal technologies.
//!
//! The properties quantify over the whole technology set, so every check
//! runs on the generating units plus an optional set of sampled points.
//! Samples are mixtures of a few generators (which tend to sit on low
//! dimensional faces of the boundary) followed by free disposal along
//! random coordinates. All randomness comes from a seeded ChaCha stream.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::Serialize;

use crate::data::Point;
use crate::direction::{make_direction, DirectionScheme};
use crate::error::{DeaError, Result};
use crate::geometry::{self, classify_unit, dominance, TechnologySet, UnitClass};
use crate::path::{ModelKind, PathSpec};
use crate::solver::{path_point, EvaluationResult, Model, SolverOptions};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AuditOptions {
    /// Absolute tolerance on θ when comparing scores.
    pub score_tol: f64,
    /// Seed for sampled points and pairs.
    pub seed: u64,
    /// Number of sampled dominance pairs added to the MO check.
    pub mo_sample_pairs: usize,
    /// Number of sampled dominance pairs for the path-flow check.
    pub pathflow_samples: usize,
    /// θ at which the path-flow mapping is examined; `None` picks the
    /// midpoint of `(θ_min, 1]` for GS range directions and 0.5 otherwise.
    pub pathflow_theta: Option<f64>,
}

impl Default for AuditOptions {
    fn default() -> Self {
        Self {
            score_tol: 1e-7,
            seed: 0,
            mo_sample_pairs: 0,
            pathflow_samples: 200,
            pathflow_theta: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnitFailure {
    pub unit_id: String,
    pub error: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IdViolationKind {
    /// Scored 1 but does not lie on the strongly efficient frontier.
    ScoredOneNotStrong,
    /// Lies on the strongly efficient frontier but scored below 1.
    StrongScoredBelowOne,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdViolation {
    pub unit_id: String,
    pub kind: IdViolationKind,
    pub class: UnitClass,
    pub point: Point,
    pub theta_star: f64,
}

/// An ordered pair where the first point dominates the second but does not
/// score strictly (or, for the weak check, at least as) high.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MoViolation {
    pub dominating: String,
    pub dominated: String,
    pub dominating_point: Point,
    pub dominated_point: Point,
    pub theta_dominating: f64,
    pub theta_dominated: f64,
    pub projection_dominating: Point,
    pub projection_dominated: Point,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathflowViolationKind {
    /// The images are no longer ordered.
    NotMonotone,
    /// The images are ordered but coincide.
    NotStrict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathflowViolation {
    pub kind: PathflowViolationKind,
    pub theta: f64,
    pub dominating: Point,
    pub dominated: Point,
    pub image_dominating: Point,
    pub image_dominated: Point,
}

/// Per-unit score summary kept in the report so violations can be replayed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnitScore {
    pub unit_id: String,
    pub theta_star: f64,
    pub projection: Point,
    pub strongly_efficient_projection: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct AuditReport {
    pub model_id: String,
    pub n_units: usize,
    /// `None` until the PR check has run.
    pub pct_strong_projections: Option<f64>,
    pub weak_projection_units: Vec<String>,
    /// Points of `T` outside the generators whose projection is weak.
    pub pr_witnesses: Vec<Point>,
    pub scores: Vec<UnitScore>,
    pub id_checked: bool,
    pub id_violations: Vec<IdViolation>,
    pub mo_checked: bool,
    pub mo_pairs_checked: usize,
    pub mo_violations: Vec<MoViolation>,
    pub weak_mo_violations: Vec<MoViolation>,
    pub pathflow_theta: Option<f64>,
    pub pathflow_pairs_checked: usize,
    pub pathflow_violations: Vec<PathflowViolation>,
    pub pathflow_skipped: Option<String>,
    pub failures: Vec<UnitFailure>,
}

impl AuditReport {
    fn empty(tech: &TechnologySet, model: &Model) -> Self {
        Self {
            model_id: model.id(),
            n_units: tech.n(),
            ..Self::default()
        }
    }

    pub fn pr_pass(&self) -> Option<bool> {
        self.pct_strong_projections
            .map(|_| self.weak_projection_units.is_empty() && self.pr_witnesses.is_empty() && self.failures.is_empty())
    }

    pub fn id_pass(&self) -> Option<bool> {
        self.id_checked.then_some(self.id_violations.is_empty())
    }

    pub fn mo_pass(&self) -> Option<bool> {
        self.mo_checked.then_some(self.mo_violations.is_empty())
    }

    pub fn weak_mo_pass(&self) -> Option<bool> {
        self.mo_checked.then_some(self.weak_mo_violations.is_empty())
    }

    pub fn pathflow_pass(&self) -> Option<bool> {
        self.pathflow_theta.map(|_| self.pathflow_violations.is_empty())
    }

    /// Takes every section that `other` has filled in.
    /// Adds what a weak-boundary witness shows about the whole of `T`: a
    /// weak projection, and a violating pair when one was found.
    pub fn absorb_witness(&mut self, witness: &WeakBoundaryWitness) {
        if !witness.strongly_efficient_projection {
            self.pr_witnesses.push(witness.point.clone());
        }
        if let Some(v) = &witness.mo_violation {
            self.mo_violations.push(v.clone());
        }
    }

    pub fn merge(&mut self, other: AuditReport) {
        if other.pct_strong_projections.is_some() {
            self.pct_strong_projections = other.pct_strong_projections;
            self.weak_projection_units = other.weak_projection_units;
        }
        if self.scores.is_empty() {
            self.scores = other.scores;
        }
        if other.id_checked {
            self.id_checked = true;
            self.id_violations = other.id_violations;
        }
        if other.mo_checked {
            self.mo_checked = true;
            self.mo_pairs_checked = other.mo_pairs_checked;
            self.mo_violations = other.mo_violations;
            self.weak_mo_violations = other.weak_mo_violations;
        }
        if other.pathflow_theta.is_some() || other.pathflow_skipped.is_some() {
            self.pathflow_theta = other.pathflow_theta;
            self.pathflow_pairs_checked = other.pathflow_pairs_checked;
            self.pathflow_violations = other.pathflow_violations;
            self.pathflow_skipped = other.pathflow_skipped;
        }
        for f in other.failures {
            if !self.failures.contains(&f) {
                self.failures.push(f);
            }
        }
    }
}

/// Scores generators, in input order.
fn score_generators(tech: &TechnologySet, model: &Model) -> (Vec<Option<EvaluationResult>>, Vec<UnitFailure>) {
    let data = tech.dataset();
    let labelled: Vec<(String, Point, bool)> = (0..data.n())
        .map(|j| (data.unit_ids()[j].clone(), data.unit(j).clone(), true))
        .collect();
    score_points(tech, model, &labelled)
}

/// Scores labelled points; the flag says whether the label is a unit id
/// that per-unit direction schemes can look up.
fn score_points(
    tech: &TechnologySet,
    model: &Model,
    points: &[(String, Point, bool)],
) -> (Vec<Option<EvaluationResult>>, Vec<UnitFailure>) {
    let results: Vec<Result<EvaluationResult>> = points
        .par_iter()
        .map(|(id, p, is_unit)| {
            let mut r = model.evaluate(tech, is_unit.then_some(id.as_str()), p)?;
            r.unit_id = id.clone();
            Ok(r)
        })
        .collect();
    let mut failures = Vec::new();
    let scored = results
        .into_iter()
        .zip(points)
        .map(|(r, (id, _, _))| match r {
            Ok(r) => Some(r),
            Err(e) => {
                failures.push(UnitFailure {
                    unit_id: id.clone(),
                    error: e.to_string(),
                });
                None
            }
        })
        .collect();
    (scored, failures)
}

fn unit_scores(results: &[Option<EvaluationResult>]) -> Vec<UnitScore> {
    results
        .iter()
        .flatten()
        .map(|r| UnitScore {
            unit_id: r.unit_id.clone(),
            theta_star: r.theta_star,
            projection: r.projection.clone(),
            strongly_efficient_projection: r.strongly_efficient_projection,
        })
        .collect()
}

fn pr_section(report: &mut AuditReport, results: &[Option<EvaluationResult>]) {
    let strong = results.iter().flatten().filter(|r| r.strongly_efficient_projection).count();
    report.pct_strong_projections = Some(if report.n_units == 0 {
        100.0
    } else {
        100.0 * strong as f64 / report.n_units as f64
    });
    report.weak_projection_units = results
        .iter()
        .flatten()
        .filter(|r| !r.strongly_efficient_projection)
        .map(|r| r.unit_id.clone())
        .collect();
}

/// Strong-projection check over the generating units.
pub fn audit_pr(tech: &TechnologySet, model: &Model) -> AuditReport {
    let mut report = AuditReport::empty(tech, model);
    let (results, failures) = score_generators(tech, model);
    pr_section(&mut report, &results);
    report.scores = unit_scores(&results);
    report.failures = failures;
    report
}

fn id_section(
    report: &mut AuditReport,
    tech: &TechnologySet,
    options: &SolverOptions,
    score_tol: f64,
    results: &[Option<EvaluationResult>],
) {
    let data = tech.dataset();
    for (j, r) in results.iter().enumerate() {
        let Some(r) = r else { continue };
        let point = data.unit(j);
        let class = match classify_unit(tech, point, options.slack_rel_threshold) {
            Ok(c) => c,
            Err(e) => {
                report.failures.push(UnitFailure {
                    unit_id: r.unit_id.clone(),
                    error: e.to_string(),
                });
                continue;
            }
        };
        let scored_one = r.theta_star >= 1.0 - score_tol;
        let kind = match (scored_one, class == UnitClass::StrongFrontier) {
            (true, false) => IdViolationKind::ScoredOneNotStrong,
            (false, true) => IdViolationKind::StrongScoredBelowOne,
            _ => continue,
        };
        report.id_violations.push(IdViolation {
            unit_id: r.unit_id.clone(),
            kind,
            class,
            point: point.clone(),
            theta_star: r.theta_star,
        });
    }
    report.id_checked = true;
}

/// Indication check: a unit scores 1 exactly when it is strongly efficient.
pub fn audit_id(tech: &TechnologySet, model: &Model, options: &AuditOptions) -> AuditReport {
    let mut report = AuditReport::empty(tech, model);
    let (results, failures) = score_generators(tech, model);
    report.failures = failures;
    report.scores = unit_scores(&results);
    id_section(&mut report, tech, &model.options, options.score_tol, &results);
    report
}

fn mo_section(report: &mut AuditReport, labelled: &[(String, Point, bool)], results: &[Option<EvaluationResult>], tol: f64) {
    let scored: Vec<(&(String, Point, bool), &EvaluationResult)> =
        labelled.iter().zip(results).filter_map(|(l, r)| r.as_ref().map(|r| (l, r))).collect();
    let violation = |(lo, ro): (&(String, Point, bool), &EvaluationResult), (lp, rp): (&(String, Point, bool), &EvaluationResult)| {
        MoViolation {
            dominating: lo.0.clone(),
            dominated: lp.0.clone(),
            dominating_point: lo.1.clone(),
            dominated_point: lp.1.clone(),
            theta_dominating: ro.theta_star,
            theta_dominated: rp.theta_star,
            projection_dominating: ro.projection.clone(),
            projection_dominated: rp.projection.clone(),
        }
    };
    let mut pairs = 0;
    for (a, &o) in scored.iter().enumerate() {
        for (b, &p) in scored.iter().enumerate() {
            if a == b {
                continue;
            }
            let d = dominance(&o.0 .1, &p.0 .1);
            if !d.weakly() {
                continue;
            }
            pairs += 1;
            if d.strictly_partial() && o.1.theta_star <= p.1.theta_star + tol {
                report.mo_violations.push(violation(o, p));
            }
            if o.1.theta_star < p.1.theta_star - tol {
                report.weak_mo_violations.push(violation(o, p));
            }
        }
    }
    report.mo_pairs_checked = pairs;
    report.mo_checked = true;
}

/// Strict and weak monotonicity over all dominance-ordered pairs among the
/// generators and `extra_points` (which must lie in `T`).
pub fn audit_mo(tech: &TechnologySet, model: &Model, extra_points: &[Point], options: &AuditOptions) -> AuditReport {
    let mut report = AuditReport::empty(tech, model);
    let labelled = labelled_points(tech, extra_points);
    let (results, failures) = score_points(tech, model, &labelled);
    report.failures = failures;
    report.scores = unit_scores(&results[..tech.n()]);
    mo_section(&mut report, &labelled, &results, options.score_tol);
    report
}

fn labelled_points(tech: &TechnologySet, extra: &[Point]) -> Vec<(String, Point, bool)> {
    let data = tech.dataset();
    (0..data.n())
        .map(|j| (data.unit_ids()[j].clone(), data.unit(j).clone(), true))
        .chain(extra.iter().enumerate().map(|(k, p)| (format!("sample-{k}"), p.clone(), false)))
        .collect()
}

fn default_pathflow_theta(scheme: &DirectionScheme) -> f64 {
    match scheme {
        DirectionScheme::GsRange { theta_min } => 0.5 * (theta_min + 1.0),
        _ => 0.5,
    }
}

/// Samples dominance-ordered pairs in `T` and checks that the path-flow
/// mapping `(x_o, y_o) ↦ φ_o(θ)` at the fixed `theta` keeps the order
/// (monotone) and keeps the images distinct (strict).
pub fn audit_pathflow(
    tech: &TechnologySet,
    model: &Model,
    theta: f64,
    samples: usize,
    seed: u64,
) -> Result<AuditReport> {
    let mut report = AuditReport::empty(tech, model);
    if !model.spec.in_domain(theta) {
        return Err(DeaError::ThetaOutOfDomain {
            theta,
            lower: model.spec.domain_lower(),
        });
    }
    if let DirectionScheme::GsRange { theta_min } = model.scheme {
        if theta <= theta_min || theta > 1.0 {
            return Err(DeaError::InvalidConfig(format!(
                "path-flow theta {theta} must lie in ({theta_min}, 1] for range directions"
            )));
        }
    }
    if matches!(model.scheme, DirectionScheme::PerUnit(_)) {
        report.pathflow_skipped = Some("per-unit directions are undefined off the generators".into());
        return Ok(report);
    }
    let scales = tech.row_scales();
    let tol = model.options.feas_tol;
    let mut sampler = Sampler::new(tech, seed);
    let image = |p: &Point| -> Result<Point> {
        let d = make_direction(&model.scheme, &model.spec, tech, None, p)?;
        path_point(&model.spec, &d, p, theta)
    };
    for _ in 0..samples {
        let (u, v) = sampler.dominance_pair();
        let (fu, fv) = match (image(&u), image(&v)) {
            (Ok(a), Ok(b)) => (a, b),
            // Points whose direction is degenerate or invalid do not count.
            _ => continue,
        };
        report.pathflow_pairs_checked += 1;
        let gains = fu
            .x
            .iter()
            .zip(&fv.x)
            .zip(&scales.x)
            .map(|((a, b), w)| (b - a) / w)
            .chain(fu.y.iter().zip(&fv.y).zip(&scales.y).map(|((a, b), w)| (a - b) / w));
        let (worst, best) = gains.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), g| (lo.min(g), hi.max(g)));
        let kind = if worst < -tol {
            PathflowViolationKind::NotMonotone
        } else if best <= tol {
            PathflowViolationKind::NotStrict
        } else {
            continue;
        };
        report.pathflow_violations.push(PathflowViolation {
            kind,
            theta,
            dominating: u,
            dominated: v,
            image_dominating: fu,
            image_dominated: fv,
        });
    }
    report.pathflow_theta = Some(theta);
    Ok(report)
}

/// Runs every check on one model. Generators are scored once and shared
/// between sections; the MO section also scores `options.mo_sample_pairs`
/// sampled dominance pairs.
pub fn audit_all(tech: &TechnologySet, model: &Model, options: &AuditOptions) -> AuditReport {
    let mut report = AuditReport::empty(tech, model);
    let mut sampler = Sampler::new(tech, options.seed);
    // Per-unit directions exist only for the generators.
    let pairs = if matches!(model.scheme, DirectionScheme::PerUnit(_)) { 0 } else { options.mo_sample_pairs };
    let extra: Vec<Point> = (0..pairs)
        .flat_map(|_| {
            let (u, v) = sampler.dominance_pair();
            [u, v]
        })
        .collect();
    let labelled = labelled_points(tech, &extra);
    let (results, failures) = score_points(tech, model, &labelled);
    report.failures = failures;
    let generators = &results[..tech.n()];
    report.scores = unit_scores(generators);
    pr_section(&mut report, generators);
    id_section(&mut report, tech, &model.options, options.score_tol, generators);
    mo_section(&mut report, &labelled, &results, options.score_tol);
    let theta = options.pathflow_theta.unwrap_or_else(|| default_pathflow_theta(&model.scheme));
    match audit_pathflow(tech, model, theta, options.pathflow_samples, options.seed.wrapping_add(1)) {
        Ok(pf) => report.merge(pf),
        Err(e) => report.pathflow_skipped = Some(e.to_string()),
    }
    report
}

/// Whether a configuration has a continuous path-flow that is strictly
/// monotone at every score it can produce: catalog path functions with GS
/// range directions on a technology that does not contain its ideal point.
pub fn has_strictly_monotone_flow(model: &Model, trivial: bool) -> bool {
    !trivial && model.spec.kind != ModelKind::Custom && matches!(model.scheme, DirectionScheme::GsRange { .. })
}

/// Breaches of the implications PR ⇒ ID and, for strictly monotone
/// path-flows, PR ⇔ MO. Sections that were not run are ignored.
pub fn hierarchy_breaches(report: &AuditReport, strictly_monotone_flow: bool) -> Vec<String> {
    let mut out = Vec::new();
    if let (Some(true), Some(false)) = (report.pr_pass(), report.id_pass()) {
        out.push(format!("{}: PR passes but ID fails", report.model_id));
    }
    if strictly_monotone_flow {
        if let (Some(pr), Some(mo)) = (report.pr_pass(), report.mo_pass()) {
            if pr != mo {
                out.push(format!("{}: PR = {pr} but MO = {mo}", report.model_id));
            }
        }
    }
    out
}

/// Seeded generator of points in `T`.
pub struct Sampler<'a> {
    tech: &'a TechnologySet,
    scales: Point,
    rng: ChaCha8Rng,
}

impl<'a> Sampler<'a> {
    pub fn new(tech: &'a TechnologySet, seed: u64) -> Self {
        Self {
            tech,
            scales: tech.row_scales(),
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// A convex combination of at most `m + s` generators with Dirichlet(1)
    /// weights, then (with probability 1/2) disposal along one coordinate.
    pub fn point(&mut self) -> Point {
        let n = self.tech.n();
        let k = self.rng.gen_range(1..=n.min(self.tech.m() + self.tech.s()).max(1));
        let chosen = index::sample(&mut self.rng, n, k);
        let mut weights: Vec<f64> = (0..k).map(|_| self.rng.sample::<f64, _>(Exp1)).collect();
        let total: f64 = weights.iter().sum();
        if total > 0.0 {
            weights.iter_mut().for_each(|w| *w /= total);
        } else {
            weights = vec![1.0 / k as f64; k];
        }
        let mut lambda = vec![0.0; n];
        for (j, w) in chosen.iter().zip(weights) {
            lambda[j] = w;
        }
        let mut p = self.tech.combine(&lambda);
        if self.rng.gen_bool(0.5) {
            let c = self.rng.gen_range(0..self.tech.m() + self.tech.s());
            self.dispose(&mut p, c, 0.05, 0.5);
        }
        p
    }

    /// `(u, v)` with `u ⪸ v`, both in `T`: `v` is `u` after disposal along
    /// a random nonempty set of coordinates.
    pub fn dominance_pair(&mut self) -> (Point, Point) {
        let u = self.point();
        let mut v = u.clone();
        let dims = self.tech.m() + self.tech.s();
        let forced = self.rng.gen_range(0..dims);
        for c in 0..dims {
            if c == forced || self.rng.gen_bool(0.5) {
                self.dispose(&mut v, c, 0.1, 0.5);
            }
        }
        (u, v)
    }

    fn dispose(&mut self, p: &mut Point, coord: usize, lo: f64, hi: f64) {
        let frac = self.rng.gen_range(lo..hi);
        let m = self.tech.m();
        if coord < m {
            p.x[coord] += frac * self.scales.x[coord];
        } else {
            p.y[coord - m] -= frac * self.scales.y[coord - m];
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TechnologyKind {
    Trivial,
    Ideal,
    NonIdeal,
}

/// A point of `T` whose GS range direction is positive on the active
/// blocks, which lies on the weak frontier, and which nonetheless scores 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeakBoundaryWitness {
    pub point: Point,
    pub gx: Vec<f64>,
    pub gy: Vec<f64>,
    pub theta_star: f64,
    pub strongly_efficient_projection: bool,
    /// The slack-free point `(Xλ, Yλ)` of the second phase dominates the
    /// witness; when it does not score strictly higher the pair is kept.
    pub mo_violation: Option<MoViolation>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdealGuaranteeSummary {
    pub model_id: String,
    pub kind: TechnologyKind,
    pub ideal_report: geometry::IdealTechnologyReport,
    /// Verdict of the LP-based test; must agree with `ideal_report`.
    pub ideal_by_edge_lp: bool,
    pub pct_strong_projections: Option<f64>,
    pub mo_violations: usize,
    /// Units other than the ideal point whose score differs from θ_min
    /// (trivial technologies only).
    pub off_theta_min_units: Vec<String>,
    pub witness: Option<WeakBoundaryWitness>,
    pub candidates_examined: usize,
    pub failures: Vec<UnitFailure>,
    pub pass: bool,
}

/// Random candidates tried after the deterministic ones when looking for
/// a weak-boundary witness.
const WITNESS_RANDOM_CANDIDATES: usize = 2000;

/// Checks what GS range directions guarantee on this technology:
///
/// * ideal and not trivial: every unit is projected onto the strongly
///   efficient frontier and strict monotonicity holds on the generators
///   and `options.mo_sample_pairs` sampled pairs;
/// * trivial: every unit other than the ideal point scores `theta_min`;
/// * not ideal: some weak-frontier point with a positive direction scores 1.
pub fn verify_ideal_guarantee(
    tech: &TechnologySet,
    spec: &PathSpec,
    theta_min: f64,
    solver: SolverOptions,
    options: &AuditOptions,
) -> Result<IdealGuaranteeSummary> {
    let model = Model::new(spec.clone(), DirectionScheme::GsRange { theta_min }).with_options(solver);
    // Validates theta_min against the spec.
    crate::direction::range_denominators(spec, theta_min)?;
    let ideal_report = geometry::is_ideal_technology_v(tech, geometry::COINCIDENCE_TOL, solver.feas_tol)?;
    let ideal_by_edge_lp = geometry::is_ideal_technology_iv(tech, solver.feas_tol)?.is_ideal;
    let kind = if ideal_report.is_trivial {
        TechnologyKind::Trivial
    } else if ideal_report.is_ideal {
        TechnologyKind::Ideal
    } else {
        TechnologyKind::NonIdeal
    };
    let mut summary = IdealGuaranteeSummary {
        model_id: model.id(),
        kind,
        ideal_report,
        ideal_by_edge_lp,
        pct_strong_projections: None,
        mo_violations: 0,
        off_theta_min_units: Vec::new(),
        witness: None,
        candidates_examined: 0,
        failures: Vec::new(),
        pass: false,
    };
    match kind {
        TechnologyKind::Ideal | TechnologyKind::Trivial => {
            let mut audit_opts = *options;
            audit_opts.pathflow_samples = 0;
            let report = audit_all(tech, &model, &audit_opts);
            summary.pct_strong_projections = report.pct_strong_projections;
            summary.mo_violations = report.mo_violations.len();
            summary.failures = report.failures.clone();
            if kind == TechnologyKind::Ideal {
                summary.pass = report.pr_pass() == Some(true) && report.mo_violations.is_empty();
            } else {
                let ideal = tech.ideal_point();
                summary.off_theta_min_units = report
                    .scores
                    .iter()
                    .filter(|s| {
                        let j = tech.dataset().index_of(&s.unit_id).expect("score of a known unit");
                        tech.dataset().unit(j).max_abs_diff(&ideal) > 0.0
                            && (s.theta_star - theta_min).abs() > options.score_tol
                    })
                    .map(|s| s.unit_id.clone())
                    .collect();
                summary.pass = summary.failures.is_empty() && summary.off_theta_min_units.is_empty();
            }
        }
        TechnologyKind::NonIdeal => {
            let (witness, examined) = find_weak_boundary_witness(tech, &model, options)?;
            summary.candidates_examined = examined;
            summary.pass = witness.is_some();
            summary.witness = witness;
        }
    }
    Ok(summary)
}

fn active_positive(spec: &PathSpec, gx: &[f64], gy: &[f64]) -> bool {
    let x_ok = !spec.inputs_active() || gx.iter().all(|g| *g > 0.0);
    let y_ok = !spec.outputs_active() || gy.iter().all(|g| *g > 0.0);
    x_ok && y_ok && (spec.inputs_active() || spec.outputs_active())
}

/// Generators, pairwise midpoints, and each of those with half a data range
/// of disposal along one coordinate.
fn deterministic_candidates(tech: &TechnologySet) -> Vec<Point> {
    let units = tech.dataset().units();
    let scales = tech.row_scales();
    let m = tech.m();
    let mut bases: Vec<Point> = units.to_vec();
    for a in 0..units.len() {
        for b in a + 1..units.len() {
            let mid = tech_midpoint(&units[a], &units[b]);
            bases.push(mid);
        }
    }
    let mut out = Vec::new();
    for base in &bases {
        for c in 0..m + tech.s() {
            let mut p = base.clone();
            if c < m {
                p.x[c] += 0.5 * scales.x[c];
            } else {
                p.y[c - m] -= 0.5 * scales.y[c - m];
            }
            out.push(p);
        }
    }
    out
}

fn tech_midpoint(a: &Point, b: &Point) -> Point {
    let avg = |u: &[f64], v: &[f64]| u.iter().zip(v).map(|(p, q)| 0.5 * (p + q)).collect();
    Point::new(avg(&a.x, &b.x), avg(&a.y, &b.y))
}

fn find_weak_boundary_witness(
    tech: &TechnologySet,
    model: &Model,
    options: &AuditOptions,
) -> Result<(Option<WeakBoundaryWitness>, usize)> {
    let mut sampler = Sampler::new(tech, options.seed);
    let deterministic = deterministic_candidates(tech);
    let rel = model.options.slack_rel_threshold;
    let mut examined = 0;
    let random = std::iter::repeat_with(|| sampler.point()).take(WITNESS_RANDOM_CANDIDATES);
    for p in deterministic.into_iter().chain(random) {
        examined += 1;
        let Ok(d) = make_direction(&model.scheme, &model.spec, tech, None, &p) else {
            continue;
        };
        if !active_positive(&model.spec, &d.gx, &d.gy) {
            continue;
        }
        if classify_unit(tech, &p, rel)? != UnitClass::WeakFrontier {
            continue;
        }
        let Ok(r) = model.evaluate(tech, None, &p) else {
            continue;
        };
        if r.theta_star >= 1.0 - options.score_tol {
            let mo_violation = dominating_counterexample(tech, model, &p, &r, options.score_tol)?;
            return Ok((
                Some(WeakBoundaryWitness {
                    point: p,
                    gx: d.gx,
                    gy: d.gy,
                    theta_star: r.theta_star,
                    strongly_efficient_projection: r.strongly_efficient_projection,
                    mo_violation,
                }),
                examined,
            ));
        }
    }
    Ok((None, examined))
}

fn dominating_counterexample(
    tech: &TechnologySet,
    model: &Model,
    point: &Point,
    result: &EvaluationResult,
    tol: f64,
) -> Result<Option<MoViolation>> {
    let Some(slack) = geometry::max_slack(tech, &result.projection, model.options.feas_tol)? else {
        return Ok(None);
    };
    let better = tech.combine(&slack.lambda);
    if !dominance(&better, point).strictly_partial() {
        return Ok(None);
    }
    let Ok(rb) = model.evaluate(tech, None, &better) else {
        return Ok(None);
    };
    Ok((rb.theta_star <= result.theta_star + tol).then(|| MoViolation {
        dominating: "witness-envelope".into(),
        dominated: "witness".into(),
        dominating_point: better,
        dominated_point: point.clone(),
        theta_dominating: rb.theta_star,
        theta_dominated: result.theta_star,
        projection_dominating: rb.projection,
        projection_dominated: result.projection.clone(),
    }))
}
