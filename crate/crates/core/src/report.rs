//! Serializable reports and their plain-text renderings.
//!
//! Every document carries `"schema": "dea-path/1"`. Records keep the input
//! order of the units and contain no maps, so serialising the same report
//! twice yields identical bytes.

use std::fmt::Write as _;

use serde::Serialize;

use crate::audit::{self, AuditReport, IdealGuaranteeSummary};
use crate::data::{Padding, Point};
use crate::direction::DirectionScheme;
use crate::error::Result;
use crate::geometry::{self, IdealTechnologyReport, TechnologySet};
use crate::path::PathSpec;
use crate::solver::{EvaluationResult, Model, SolverOptions};

pub const SCHEMA: &str = "dea-path/1";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnitRecord {
    pub id: String,
    pub theta_star: Option<f64>,
    pub projection: Option<Point>,
    pub slacks: Option<Point>,
    pub total_slack: Option<f64>,
    pub strongly_efficient_projection: Option<bool>,
    pub lambda_star: Option<Vec<f64>>,
    pub alpha_x: Option<f64>,
    pub alpha_y: Option<f64>,
    pub degenerate: bool,
    pub error: Option<String>,
}

impl UnitRecord {
    fn from_result(id: &str, result: &Result<EvaluationResult>) -> Self {
        match result {
            Ok(r) => Self {
                id: id.to_string(),
                theta_star: Some(r.theta_star),
                projection: Some(r.projection.clone()),
                slacks: Some(r.slacks.clone()),
                total_slack: Some(r.total_slack),
                strongly_efficient_projection: Some(r.strongly_efficient_projection),
                lambda_star: Some(r.lambda_star.clone()),
                alpha_x: r.diagnostics.alpha_x,
                alpha_y: r.diagnostics.alpha_y,
                degenerate: r.degenerate,
                error: None,
            },
            Err(e) => Self {
                id: id.to_string(),
                theta_star: None,
                projection: None,
                slacks: None,
                total_slack: None,
                strongly_efficient_projection: None,
                lambda_star: None,
                alpha_x: None,
                alpha_y: None,
                degenerate: false,
                error: Some(e.to_string()),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationReport {
    pub schema: &'static str,
    pub model: String,
    pub direction: String,
    pub options: SolverOptions,
    pub n_units: usize,
    pub input_names: Vec<String>,
    pub output_names: Vec<String>,
    pub padding: Padding,
    pub n_strong: usize,
    pub n_failed: usize,
    pub pct_strong_projections: f64,
    pub units: Vec<UnitRecord>,
}

impl EvaluationReport {
    /// `results` must follow the unit order of `tech`.
    pub fn new(model: &Model, tech: &TechnologySet, results: &[Result<EvaluationResult>]) -> Self {
        let data = tech.dataset();
        let units: Vec<UnitRecord> = data
            .unit_ids()
            .iter()
            .zip(results)
            .map(|(id, r)| UnitRecord::from_result(id, r))
            .collect();
        let n_strong = units.iter().filter(|u| u.strongly_efficient_projection == Some(true)).count();
        let n_failed = units.iter().filter(|u| u.error.is_some()).count();
        Self {
            schema: SCHEMA,
            model: model.spec.name(),
            direction: model.scheme.name(),
            options: model.options,
            n_units: units.len(),
            input_names: data.input_names().to_vec(),
            output_names: data.output_names().to_vec(),
            padding: data.padding(),
            n_strong,
            n_failed,
            pct_strong_projections: percentage(n_strong, units.len()),
            units,
        }
    }

    /// Aligned text table, one line per unit, followed by the aggregate.
    pub fn to_table(&self) -> String {
        let header = ["id", "theta*", "projection", "slacks", "projection class"];
        let rows: Vec<[String; 5]> = self
            .units
            .iter()
            .map(|u| match &u.error {
                Some(e) => [u.id.clone(), "-".into(), "-".into(), "-".into(), format!("error: {e}")],
                None => [
                    u.id.clone(),
                    fmt_num(u.theta_star.unwrap_or(f64::NAN)),
                    fmt_point(u.projection.as_ref()),
                    fmt_point(u.slacks.as_ref()),
                    if u.strongly_efficient_projection == Some(true) { "strong" } else { "weak" }.into(),
                ],
            })
            .collect();
        let mut out = format!("model {} / direction {}\n", self.model, self.direction);
        out.push_str(&render_columns(&header, &rows));
        let _ = writeln!(
            out,
            "strong projections: {}/{} ({:.2}%), failures: {}",
            self.n_strong, self.n_units, self.pct_strong_projections, self.n_failed
        );
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditDocument {
    pub schema: &'static str,
    pub audit: AuditReport,
    pub id_pass: Option<bool>,
    pub pr_pass: Option<bool>,
    pub mo_pass: Option<bool>,
    pub weak_mo_pass: Option<bool>,
    pub pathflow_pass: Option<bool>,
    pub ideal_generator_test: IdealTechnologyReport,
    pub ideal_edge_lp_test: IdealTechnologyReport,
    pub hierarchy_breaches: Vec<String>,
    pub ideal_guarantee: Option<IdealGuaranteeSummary>,
    strictly_monotone_flow: bool,
}

impl AuditDocument {
    pub fn new(tech: &TechnologySet, model: &Model, audit: AuditReport) -> Result<Self> {
        let tol = model.options.feas_tol;
        let ideal_v = geometry::is_ideal_technology_v(tech, geometry::COINCIDENCE_TOL, tol)?;
        let ideal_iv = geometry::is_ideal_technology_iv(tech, tol)?;
        let strictly_monotone_flow = audit::has_strictly_monotone_flow(model, ideal_v.is_trivial);
        let breaches = audit::hierarchy_breaches(&audit, strictly_monotone_flow);
        Ok(Self {
            schema: SCHEMA,
            id_pass: audit.id_pass(),
            pr_pass: audit.pr_pass(),
            mo_pass: audit.mo_pass(),
            weak_mo_pass: audit.weak_mo_pass(),
            pathflow_pass: audit.pathflow_pass(),
            audit,
            ideal_generator_test: ideal_v,
            ideal_edge_lp_test: ideal_iv,
            hierarchy_breaches: breaches,
            ideal_guarantee: None,
            strictly_monotone_flow,
        })
    }

    /// Attaches the GS range guarantee check; a weak-boundary witness
    /// counts against PR and MO on the whole technology set.
    pub fn with_guarantee(mut self, summary: IdealGuaranteeSummary) -> Self {
        if let Some(w) = &summary.witness {
            self.audit.absorb_witness(w);
        }
        self.pr_pass = self.audit.pr_pass();
        self.mo_pass = self.audit.mo_pass();
        self.hierarchy_breaches = audit::hierarchy_breaches(&self.audit, self.strictly_monotone_flow);
        self.ideal_guarantee = Some(summary);
        self
    }

    pub fn to_table(&self) -> String {
        let verdict = |v: Option<bool>| match v {
            Some(true) => "pass",
            Some(false) => "fail",
            None => "not run",
        };
        let a = &self.audit;
        let rows = vec![
            ["ID".to_string(), verdict(self.id_pass).into(), format!("{} violations", a.id_violations.len())],
            [
                "PR".to_string(),
                verdict(self.pr_pass).into(),
                format!("{:.2}% strong", a.pct_strong_projections.unwrap_or(f64::NAN)),
            ],
            [
                "MO".to_string(),
                verdict(self.mo_pass).into(),
                format!("{} violations in {} ordered pairs", a.mo_violations.len(), a.mo_pairs_checked),
            ],
            [
                "weak MO".to_string(),
                verdict(self.weak_mo_pass).into(),
                format!("{} violations", a.weak_mo_violations.len()),
            ],
            [
                "path-flow".to_string(),
                verdict(self.pathflow_pass).into(),
                match &a.pathflow_skipped {
                    Some(why) => format!("skipped: {why}"),
                    None => format!("{} violations in {} pairs", a.pathflow_violations.len(), a.pathflow_pairs_checked),
                },
            ],
        ];
        let mut out = format!("audit of {} on {} units\n", a.model_id, a.n_units);
        out.push_str(&render_columns(&["property", "verdict", "detail"], &rows));
        let _ = writeln!(
            out,
            "ideal point {}; trivial: {}; ideal (generator test): {}; ideal (edge LP test): {}",
            fmt_point(Some(&self.ideal_generator_test.ideal_point)),
            self.ideal_generator_test.is_trivial,
            self.ideal_generator_test.is_ideal,
            self.ideal_edge_lp_test.is_ideal
        );
        if let Some(g) = &self.ideal_guarantee {
            let _ = writeln!(
                out,
                "range-direction guarantee ({:?}): {}",
                g.kind,
                if g.pass { "holds" } else { "not confirmed" }
            );
            if let Some(w) = &g.witness {
                let _ = writeln!(
                    out,
                    "weak-boundary witness {} scores {}",
                    fmt_point(Some(&w.point)),
                    fmt_num(w.theta_star)
                );
            }
        }
        for f in &a.failures {
            let _ = writeln!(out, "failure {}: {}", f.unit_id, f.error);
        }
        for b in &self.hierarchy_breaches {
            let _ = writeln!(out, "hierarchy breach: {b}");
        }
        out
    }
}

/// One θ along a unit's path and whether that point lies in `T`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathSample {
    pub theta: f64,
    pub point: Point,
    pub inside: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathSampleDocument {
    pub schema: &'static str,
    pub model: String,
    pub direction: String,
    pub unit_id: String,
    pub theta_star: f64,
    pub samples: Vec<PathSample>,
}

impl PathSampleDocument {
    pub fn to_table(&self) -> String {
        let rows: Vec<[String; 3]> = self
            .samples
            .iter()
            .map(|s| [fmt_num(s.theta), fmt_point(Some(&s.point)), if s.inside { "inside" } else { "outside" }.into()])
            .collect();
        let mut out = format!(
            "path of {} under {} / {} (theta* = {})\n",
            self.unit_id,
            self.model,
            self.direction,
            fmt_num(self.theta_star)
        );
        out.push_str(&render_columns(&["theta", "point", "in T"], &rows));
        out
    }
}

/// Column labels of [`table5_row`], in order.
pub const TABLE5_COLUMNS: [&str; 8] =
    ["DDF-g1", "DDF-g2", "DDF-g3", "DDF-g4", "HDF-g1", "HDF-g2", "HDF-g3", "HDF-g4"];

/// θ_min used for the GS range directions of the DDF and HDF columns.
pub const TABLE5_THETA_MIN: (f64, f64) = (0.0, 0.1);

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table5Row {
    pub dataset: String,
    pub n: usize,
    pub m: usize,
    pub s: usize,
    /// Percentage of units projected onto the strongly efficient frontier,
    /// one entry per [`TABLE5_COLUMNS`] label; `None` if a unit failed.
    pub pct_strong: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table5 {
    pub schema: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Table5Row>,
}

/// Strong-projection percentages of one dataset under DDF and HDF with the
/// four direction choices.
pub fn table5_row(name: &str, tech: &TechnologySet, options: SolverOptions) -> Table5Row {
    let schemes = |theta_min: f64| {
        [
            DirectionScheme::Proportional,
            DirectionScheme::GsRange { theta_min },
            DirectionScheme::GlobalRange,
            DirectionScheme::Average,
        ]
    };
    let models = schemes(TABLE5_THETA_MIN.0)
        .into_iter()
        .map(|g| Model::new(PathSpec::ddf(), g))
        .chain(schemes(TABLE5_THETA_MIN.1).into_iter().map(|g| Model::new(PathSpec::hdf(), g)));
    let pct_strong = models
        .map(|model| {
            let results = model.with_options(options).evaluate_units(tech);
            let mut strong = 0;
            for r in &results {
                match r {
                    Ok(r) if r.strongly_efficient_projection => strong += 1,
                    Ok(_) => {}
                    Err(_) => return None,
                }
            }
            Some(percentage(strong, results.len()))
        })
        .collect();
    Table5Row {
        dataset: name.to_string(),
        n: tech.n(),
        m: tech.m(),
        s: tech.s(),
        pct_strong,
    }
}

impl Table5 {
    pub fn new(rows: Vec<Table5Row>) -> Self {
        Self {
            schema: SCHEMA,
            columns: TABLE5_COLUMNS.to_vec(),
            rows,
        }
    }

    pub fn to_table(&self) -> String {
        let mut header = vec!["dataset", "n", "m", "s"];
        header.extend(TABLE5_COLUMNS);
        let rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| {
                let mut cells = vec![r.dataset.clone(), r.n.to_string(), r.m.to_string(), r.s.to_string()];
                cells.extend(r.pct_strong.iter().map(|p| match p {
                    Some(v) => format!("{v:.1}"),
                    None => "fail".into(),
                }));
                cells
            })
            .collect();
        render_columns(&header, &rows)
    }
}

fn percentage(count: usize, total: usize) -> f64 {
    if total == 0 {
        0.0
    } else {
        100.0 * count as f64 / total as f64
    }
}

fn fmt_num(v: f64) -> String {
    format!("{v:.6}")
}

/// `(x1, ...; y1, ...)` with six decimals, `-` when absent.
pub fn fmt_point(p: Option<&Point>) -> String {
    match p {
        None => "-".into(),
        Some(p) => {
            let join = |v: &[f64]| v.iter().map(|a| fmt_num(*a)).collect::<Vec<_>>().join(", ");
            format!("({}; {})", join(&p.x), join(&p.y))
        }
    }
}

/// Left-aligned columns separated by two spaces.
fn render_columns<R: AsRef<[String]>>(header: &[&str], rows: &[R]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row.as_ref()) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let mut line = |cells: Vec<&str>| {
        let text: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        out.push_str(text.join("  ").trim_end());
        out.push('\n');
    };
    line(header.to_vec());
    for row in rows {
        line(row.as_ref().iter().map(String::as_str).collect());
    }
    out
}
