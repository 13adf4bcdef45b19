//! Efficiency scores along a path, and the second phase that classifies the
//! resulting projection.
//!
//! For a unit `(x_o, y_o)` the score is
//! `θ* = min { θ : (x_o + (ψx(θ)−1)gx, y_o + (ψy(θ)−1)gy) ∈ T }`.
//! The feasible θ-set is an interval ending at 1 (the path is monotone), so
//! [`solve_gs`] brackets its lower end and bisects with an LP membership
//! test per step. For affine ψ the same program is one LP in `(θ, λ)`;
//! [`solve_gs_direct_lp`] solves that form and serves as a cross-check.

use rayon::prelude::*;
use serde::Serialize;

use crate::data::Point;
use crate::direction::{make_direction, Direction, DirectionScheme};
use crate::error::{DeaError, Result};
use crate::geometry::{self, TechnologySet};
use crate::linprog::{self, LinearProgram, LpStatus};
use crate::path::PathSpec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverOptions {
    /// Final bracket width of the bisection on θ.
    pub theta_tol: f64,
    /// LP feasibility tolerance (scaled rows).
    pub feas_tol: f64,
    /// A projection is strongly efficient when its second-phase slack,
    /// divided row-wise by the data range, sums to at most this value.
    pub slack_rel_threshold: f64,
    /// Overrides the domain-derived floor for the lower bracket search.
    pub lower_search_floor: Option<f64>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            theta_tol: 1e-9,
            feas_tol: linprog::DEFAULT_TOL,
            slack_rel_threshold: 1e-6,
            lower_search_floor: None,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v > 0.0 && v.is_finite();
        if !ok(self.theta_tol) || !ok(self.feas_tol) || !ok(self.slack_rel_threshold) {
            return Err(DeaError::InvalidConfig("solver tolerances must be positive".into()));
        }
        Ok(())
    }
}

/// Lowest θ the bracket search may probe: `lower + 1e-6` for a bounded
/// domain, `-1e6` otherwise.
pub fn search_floor(spec: &PathSpec, options: &SolverOptions) -> f64 {
    let lower = spec.domain_lower();
    let domain_floor = if lower.is_finite() { lower + 1e-6 } else { -1e6 };
    match options.lower_search_floor {
        Some(f) => f.max(domain_floor),
        None => domain_floor,
    }
}

#[derive(Debug, Clone)]
pub struct GsProblem<'a> {
    pub tech: &'a TechnologySet,
    pub spec: &'a PathSpec,
    pub direction: Direction,
    pub unit_id: String,
    pub unit: Point,
    pub options: SolverOptions,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ProjectionDiagnostics {
    /// Share of the way from `x_o` to `x_min` covered at θ* (GS range
    /// directions, non-trivial technology, θ* < 1).
    pub alpha_x: Option<f64>,
    pub alpha_y: Option<f64>,
    /// Rows whose second-phase slack is zero.
    pub binding_inputs: Vec<usize>,
    pub binding_outputs: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationResult {
    pub unit_id: String,
    pub theta_star: f64,
    pub lambda_star: Vec<f64>,
    pub projection: Point,
    pub strongly_efficient_projection: bool,
    pub slacks: Point,
    pub total_slack: f64,
    pub normalized_slack: f64,
    pub diagnostics: ProjectionDiagnostics,
    /// Lower end of the bracket handed to the bisection (a θ whose path
    /// point is outside `T`); equals θ* for degenerate and direct-LP results.
    pub theta_lower_bracket: f64,
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SecondPhaseResult {
    pub total_slack: f64,
    pub normalized_slack: f64,
    pub sx: Vec<f64>,
    pub sy: Vec<f64>,
    pub lambda: Vec<f64>,
}

/// `φ_o(θ) = (x_o + (ψx(θ)−1)·gx, y_o + (ψy(θ)−1)·gy)`.
pub fn path_point(spec: &PathSpec, direction: &Direction, unit: &Point, theta: f64) -> Result<Point> {
    if !spec.in_domain(theta) {
        return Err(DeaError::ThetaOutOfDomain {
            theta,
            lower: spec.domain_lower(),
        });
    }
    let fx = spec.psi_x.eval(theta) - 1.0;
    let fy = spec.psi_y.eval(theta) - 1.0;
    let x = unit.x.iter().zip(&direction.gx).map(|(v, g)| if *g == 0.0 { *v } else { v + fx * g }).collect();
    let y = unit.y.iter().zip(&direction.gy).map(|(v, g)| if *g == 0.0 { *v } else { v + fy * g }).collect();
    Ok(Point::new(x, y))
}

fn check_problem(problem: &GsProblem) -> Result<()> {
    problem.options.validate()?;
    problem.tech.check_dims(&problem.unit)?;
    let d = &problem.direction;
    if d.gx.len() != problem.tech.m() || d.gy.len() != problem.tech.s() {
        return Err(DeaError::DimensionMismatch("direction does not match the technology".into()));
    }
    if d.gx.iter().chain(&d.gy).any(|g| !(*g >= 0.0) || !g.is_finite()) {
        return Err(DeaError::InvalidDirection("components must be finite and nonnegative".into()));
    }
    if d.is_zero() && !d.degenerate {
        return Err(DeaError::ZeroDirection);
    }
    Ok(())
}

fn degenerate_result(problem: &GsProblem) -> Result<EvaluationResult> {
    let lambda = geometry::membership(problem.tech, &problem.unit, problem.options.feas_tol)?
        .ok_or(DeaError::NotInTechnology)?;
    finish(problem, 1.0, lambda, problem.unit.clone(), 1.0, true)
}

/// Score by bracket search and bisection on θ.
pub fn solve_gs(problem: &GsProblem) -> Result<EvaluationResult> {
    check_problem(problem)?;
    let GsProblem {
        tech,
        spec,
        direction,
        unit,
        options,
        ..
    } = problem;
    let tol = options.feas_tol;
    if !geometry::contains(tech, unit, tol)? {
        return Err(DeaError::NotInTechnology);
    }
    if direction.degenerate {
        return degenerate_result(problem);
    }
    // Probes use a tighter tolerance than the final membership check so
    // that the accepted end of the bracket is certainly inside T.
    let probe_tol = tol * 1e-4;
    let inside = |theta: f64| -> Result<bool> {
        let p = path_point(spec, direction, unit, theta)?;
        geometry::contains(tech, &p, probe_tol)
    };

    let floor = search_floor(spec, options);
    let mut hi = 1.0;
    let mut lo = None;
    // A GS range path reaches the ideal point at θ_min, which bounds θ* below.
    if let Some(tm) = direction.range_theta_min.filter(|&tm| tm >= floor && tm < 1.0) {
        if inside(tm)? {
            hi = tm;
        } else {
            lo = Some(tm);
        }
    }
    let mut step = 0.5;
    while lo.is_none() {
        if hi <= floor {
            return Err(DeaError::DomainExit { floor });
        }
        let t = (hi - step).max(floor);
        if inside(t)? {
            hi = t;
        } else {
            lo = Some(t);
        }
        step *= 2.0;
    }
    let mut lo = lo.unwrap_or(floor);
    let bracket_floor = lo;
    while hi - lo > options.theta_tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if inside(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let projection = path_point(spec, direction, unit, hi)?;
    let lambda = geometry::membership(tech, &projection, tol)?
        .ok_or_else(|| DeaError::Lp(linprog::LpError::Numeric("projection left T after bisection".into())))?;
    finish(problem, hi, lambda, projection, bracket_floor, false)
}

/// Score as a single LP in `(θ, λ)`; requires affine ψx and ψy.
pub fn solve_gs_direct_lp(problem: &GsProblem) -> Result<EvaluationResult> {
    check_problem(problem)?;
    let GsProblem {
        tech,
        spec,
        direction,
        unit,
        options,
        ..
    } = problem;
    let ((ax, bx), (ay, by)) = spec.affine_coefficients().ok_or_else(|| DeaError::NonAffineSpec(spec.name()))?;
    if !geometry::contains(tech, unit, options.feas_tol)? {
        return Err(DeaError::NotInTechnology);
    }
    if direction.degenerate {
        return degenerate_result(problem);
    }
    let n = tech.n();
    let data = tech.dataset();
    let mut lp = LinearProgram::new(n + 1);
    let mut sum = vec![1.0; n + 1];
    sum[n] = 0.0;
    lp.eq_row(sum, 1.0);
    for i in 0..tech.m() {
        let g = direction.gx[i];
        let mut row: Vec<f64> = data.input_row(i).collect();
        row.push(-bx * g);
        lp.le_row(row, unit.x[i] + (ax - 1.0) * g);
    }
    for r in 0..tech.s() {
        let g = direction.gy[r];
        let mut row: Vec<f64> = data.output_row(r).collect();
        row.push(-by * g);
        lp.ge_row(row, unit.y[r] + (ay - 1.0) * g);
    }
    lp.bounds(n, f64::NEG_INFINITY, f64::INFINITY);
    let mut c = vec![0.0; n + 1];
    c[n] = 1.0;
    let sol = linprog::solve(&lp.minimize(c), options.feas_tol)?;
    match sol.status {
        LpStatus::Optimal => {}
        LpStatus::Unbounded => {
            return Err(DeaError::DomainExit { floor: f64::NEG_INFINITY });
        }
        LpStatus::Infeasible => return Err(DeaError::NotInTechnology),
    }
    let theta = sol.z[n].min(1.0);
    let projection = path_point(spec, direction, unit, theta)?;
    finish(problem, theta, sol.z[..n].to_vec(), projection, theta, false)
}

fn finish(
    problem: &GsProblem,
    theta: f64,
    lambda: Vec<f64>,
    projection: Point,
    theta_lower_bracket: f64,
    degenerate: bool,
) -> Result<EvaluationResult> {
    let mut result = EvaluationResult {
        unit_id: problem.unit_id.clone(),
        theta_star: theta,
        lambda_star: lambda,
        projection,
        strongly_efficient_projection: false,
        slacks: Point::new(Vec::new(), Vec::new()),
        total_slack: 0.0,
        normalized_slack: 0.0,
        diagnostics: ProjectionDiagnostics::default(),
        theta_lower_bracket,
        degenerate,
    };
    let phase2 = second_phase(problem, &result)?;
    let scales = problem.tech.row_scales();
    let rel = problem.options.slack_rel_threshold;
    result.diagnostics.binding_inputs = (0..phase2.sx.len()).filter(|&i| phase2.sx[i] / scales.x[i] <= rel).collect();
    result.diagnostics.binding_outputs = (0..phase2.sy.len()).filter(|&r| phase2.sy[r] / scales.y[r] <= rel).collect();
    result.strongly_efficient_projection = phase2.normalized_slack <= rel;
    result.total_slack = phase2.total_slack;
    result.normalized_slack = phase2.normalized_slack;
    result.slacks = Point::new(phase2.sx, phase2.sy);

    if let Some(tm) = problem.direction.range_theta_min {
        if theta < 1.0 && !degenerate && !geometry::is_trivial_technology(problem.tech, problem.options.feas_tol)? {
            let spec = problem.spec;
            if spec.inputs_active() {
                result.diagnostics.alpha_x = Some((1.0 - spec.psi_x.eval(theta)) / (1.0 - spec.psi_x.eval(tm)));
            }
            if spec.outputs_active() {
                result.diagnostics.alpha_y = Some((spec.psi_y.eval(theta) - 1.0) / (spec.psi_y.eval(tm) - 1.0));
            }
        }
    }
    Ok(result)
}

/// Maximal slack at the projection:
/// `Xλ + sx = φx(θ*)`, `Yλ − sy = φy(θ*)`, `Σλ = 1`, all variables
/// nonnegative. Slacks enter the objective divided by the data range of
/// their row; `total_slack` reports the plain sum.
pub fn second_phase(problem: &GsProblem, result: &EvaluationResult) -> Result<SecondPhaseResult> {
    let sol = geometry::max_slack(problem.tech, &result.projection, problem.options.feas_tol)?.ok_or_else(|| {
        DeaError::Lp(linprog::LpError::Numeric("projection is not in the technology set".into()))
    })?;
    Ok(SecondPhaseResult {
        total_slack: sol.total(),
        normalized_slack: sol.normalized_total,
        sx: sol.sx,
        sy: sol.sy,
        lambda: sol.lambda,
    })
}

/// A fully specified model: path functions, direction scheme, tolerances.
#[derive(Debug, Clone)]
pub struct Model {
    pub spec: PathSpec,
    pub scheme: DirectionScheme,
    pub options: SolverOptions,
}

impl Model {
    pub fn new(spec: PathSpec, scheme: DirectionScheme) -> Self {
        Self {
            spec,
            scheme,
            options: SolverOptions::default(),
        }
    }

    pub fn with_options(mut self, options: SolverOptions) -> Self {
        self.options = options;
        self
    }

    pub fn id(&self) -> String {
        format!("{}/{}", self.spec.name(), self.scheme.name())
    }

    pub fn problem<'a>(&'a self, tech: &'a TechnologySet, unit_id: Option<&str>, point: &Point) -> Result<GsProblem<'a>> {
        let direction = make_direction(&self.scheme, &self.spec, tech, unit_id, point)?;
        Ok(GsProblem {
            tech,
            spec: &self.spec,
            direction,
            unit_id: unit_id.unwrap_or("").to_string(),
            unit: point.clone(),
            options: self.options,
        })
    }

    pub fn evaluate(&self, tech: &TechnologySet, unit_id: Option<&str>, point: &Point) -> Result<EvaluationResult> {
        solve_gs(&self.problem(tech, unit_id, point)?)
    }

    /// Evaluates every generating unit; results follow input order.
    pub fn evaluate_units(&self, tech: &TechnologySet) -> Vec<Result<EvaluationResult>> {
        let data = tech.dataset();
        (0..data.n())
            .into_par_iter()
            .map(|j| self.evaluate(tech, Some(&data.unit_ids()[j]), data.unit(j)))
            .collect()
    }

    /// As [`Model::evaluate_units`] on a pool of `jobs` threads.
    pub fn evaluate_units_with_jobs(&self, tech: &TechnologySet, jobs: usize) -> Vec<Result<EvaluationResult>> {
        match rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build() {
            Ok(pool) => pool.install(|| self.evaluate_units(tech)),
            Err(_) => self.evaluate_units(tech),
        }
    }
}
