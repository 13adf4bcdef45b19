//! Command-line front end for `dea-path`.
//!
//! The binary is a thin wrapper: argument parsing lives in [`Args`], the
//! validated configuration in [`RunConfig`], and each sub-task writes its
//! report files into the output directory.

use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use dea_path::audit::{self, AuditOptions};
use dea_path::geometry::{self, TechnologySet};
use dea_path::report::{fmt_point, AuditDocument, EvaluationReport, PathSample, PathSampleDocument, Table5, SCHEMA};
use dea_path::solver::{path_point, Model, SolverOptions};
use dea_path::{load_dataset, DataFormat, DeaError, DirectionScheme, PathSpec};
use serde::Serialize;
use thiserror::Error;

/// Environment variable that overrides `--seed`.
pub const SEED_ENV: &str = "DEA_PATH_SEED";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("cannot read {path}: {source}")]
    Input { path: PathBuf, source: DeaError },
    #[error("cannot write {path}: {source}")]
    Output { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Model(#[from] DeaError),
    #[error("{failed} unit(s) could not be evaluated")]
    UnitFailures { failed: usize },
}

impl CliError {
    /// 1 for configuration and input problems, 2 when units failed.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::UnitFailures { .. } => 2,
            _ => 1,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    #[value(name = "bcc-i")]
    BccI,
    #[value(name = "bcc-o")]
    BccO,
    Ddf,
    Hdf,
    Gdf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DirectionArg {
    G1,
    G2,
    G3,
    G4,
    Constant,
    File,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Json,
    Table,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum OutputKind {
    Scores,
    Projections,
    Slacks,
    Audit,
    IdealReport,
    PathSamples,
}

impl OutputKind {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "scores" => OutputKind::Scores,
            "projections" => OutputKind::Projections,
            "slacks" => OutputKind::Slacks,
            "audit" => OutputKind::Audit,
            "ideal-report" => OutputKind::IdealReport,
            "path-samples" => OutputKind::PathSamples,
            _ => return None,
        })
    }
}

/// Evaluate DEA units under a path-based model.
#[derive(Debug, Parser)]
#[command(name = "dea-path", version, about)]
pub struct Args {
    /// Dataset CSV: header `id,i:<name>...,o:<name>...` (`u:` columns are
    /// undesirable outputs, treated as inputs).
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long, value_enum, default_value = "ddf")]
    pub model: ModelArg,
    /// Exponent of the generalized distance function, in [0, 1].
    #[arg(long, default_value_t = 0.5)]
    pub gdf_p: f64,
    #[arg(long, value_enum, default_value = "g2")]
    pub direction: DirectionArg,
    /// θ at which GS range paths reach the ideal point. Defaults to 0 when
    /// the path domain is unbounded below and 0.1 otherwise.
    #[arg(long)]
    pub theta_min: Option<f64>,
    /// Per-unit directions: header `id,gx:<name>...,gy:<name>...`.
    #[arg(long)]
    pub directions_file: Option<PathBuf>,
    /// Constant direction as `gx1,gx2,...;gy1,...`.
    #[arg(long)]
    pub constant_direction: Option<String>,
    /// Comma-separated subset of scores, projections, slacks, audit,
    /// ideal-report, path-samples.
    #[arg(long, default_value = "scores,projections,slacks")]
    pub outputs: String,
    /// Also run the property audit and the ideal-technology report.
    #[arg(long)]
    pub audit: bool,
    /// Emit `<count>` path points for a unit, as `<unit_id>:<count>`.
    #[arg(long)]
    pub paths: Option<String>,
    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub tol_theta: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub tol_feas: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Sampled dominance pairs added to the monotonicity audit.
    #[arg(long, default_value_t = 50)]
    pub mo_samples: usize,
    /// Also write a strong-projection percentage table for DDF and HDF
    /// under directions g1 to g4.
    #[arg(long)]
    pub table5: bool,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "both")]
    pub format: FormatArg,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub dataset: PathBuf,
    pub model: ModelArg,
    pub gdf_p: f64,
    pub direction: DirectionArg,
    pub theta_min: Option<f64>,
    pub directions_file: Option<PathBuf>,
    pub constant_direction: Option<String>,
    pub outputs: BTreeSet<OutputKind>,
    pub paths: Option<(String, usize)>,
    pub jobs: usize,
    pub options: SolverOptions,
    pub seed: u64,
    pub mo_samples: usize,
    pub table5: bool,
    pub out: PathBuf,
    pub format: FormatArg,
}

impl RunConfig {
    /// Validates arguments. `env_seed` is the value of [`SEED_ENV`], if set.
    pub fn from_args(args: Args, env_seed: Option<String>) -> CliResult<Self> {
        let mut outputs = BTreeSet::new();
        for item in args.outputs.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            outputs.insert(OutputKind::parse(item).ok_or_else(|| CliError::Config(format!("unknown output {item:?}")))?);
        }
        if args.audit {
            outputs.insert(OutputKind::Audit);
            outputs.insert(OutputKind::IdealReport);
        }
        let paths = match args.paths {
            Some(spec) => {
                let (id, count) = spec
                    .rsplit_once(':')
                    .ok_or_else(|| CliError::Config(format!("--paths expects <unit_id>:<count>, got {spec:?}")))?;
                let count: usize = count
                    .parse()
                    .map_err(|_| CliError::Config(format!("invalid sample count {count:?}")))?;
                if count < 2 {
                    return Err(CliError::Config("--paths needs at least 2 samples".into()));
                }
                outputs.insert(OutputKind::PathSamples);
                Some((id.to_string(), count))
            }
            None => None,
        };
        if outputs.contains(&OutputKind::PathSamples) && paths.is_none() {
            return Err(CliError::Config("path-samples output requires --paths <unit_id>:<count>".into()));
        }
        if outputs.is_empty() && !args.table5 {
            return Err(CliError::Config("no outputs requested".into()));
        }
        let seed = match env_seed {
            Some(v) => v
                .trim()
                .parse()
                .map_err(|_| CliError::Config(format!("{SEED_ENV}={v:?} is not an unsigned integer")))?,
            None => args.seed,
        };
        let options = SolverOptions {
            theta_tol: args.tol_theta,
            feas_tol: args.tol_feas,
            ..SolverOptions::default()
        };
        options.validate().map_err(|e| CliError::Config(e.to_string()))?;
        if args.direction == DirectionArg::File && args.directions_file.is_none() {
            return Err(CliError::Config("--direction file requires --directions-file".into()));
        }
        if args.direction == DirectionArg::Constant && args.constant_direction.is_none() {
            return Err(CliError::Config("--direction constant requires --constant-direction".into()));
        }
        Ok(Self {
            dataset: args.dataset,
            model: args.model,
            gdf_p: args.gdf_p,
            direction: args.direction,
            theta_min: args.theta_min,
            directions_file: args.directions_file,
            constant_direction: args.constant_direction,
            outputs,
            paths,
            jobs: args.jobs,
            options,
            seed,
            mo_samples: args.mo_samples,
            table5: args.table5,
            out: args.out,
            format: args.format,
        })
    }

    pub fn spec(&self) -> CliResult<PathSpec> {
        Ok(match self.model {
            ModelArg::BccI => PathSpec::bcc_input(),
            ModelArg::BccO => PathSpec::bcc_output(),
            ModelArg::Ddf => PathSpec::ddf(),
            ModelArg::Hdf => PathSpec::hdf(),
            ModelArg::Gdf => PathSpec::gdf(self.gdf_p)
                .ok_or_else(|| CliError::Config(format!("--gdf-p {} is outside [0, 1]", self.gdf_p)))?,
        })
    }

    pub fn theta_min(&self, spec: &PathSpec) -> f64 {
        self.theta_min
            .unwrap_or(if spec.domain_lower().is_finite() { 0.1 } else { 0.0 })
    }

    fn wants(&self, kind: OutputKind) -> bool {
        self.outputs.contains(&kind)
    }

    fn wants_evaluation(&self) -> bool {
        [OutputKind::Scores, OutputKind::Projections, OutputKind::Slacks]
            .iter()
            .any(|k| self.wants(*k))
    }
}

/// Dataset, technology and model built from a configuration.
pub struct Session {
    pub tech: TechnologySet,
    pub model: Model,
}

impl Session {
    pub fn open(config: &RunConfig) -> CliResult<Self> {
        let dataset = load_dataset(&config.dataset, DataFormat::Csv).map_err(|source| CliError::Input {
            path: config.dataset.clone(),
            source,
        })?;
        let tech = TechnologySet::new(dataset);
        let spec = config.spec()?;
        let scheme = match config.direction {
            DirectionArg::G1 => DirectionScheme::Proportional,
            DirectionArg::G2 => {
                let theta_min = config.theta_min(&spec);
                dea_path::direction::range_denominators(&spec, theta_min)
                    .map_err(|e| CliError::Config(format!("--theta-min: {e}")))?;
                DirectionScheme::GsRange { theta_min }
            }
            DirectionArg::G3 => DirectionScheme::GlobalRange,
            DirectionArg::G4 => DirectionScheme::Average,
            DirectionArg::Constant => parse_constant(config.constant_direction.as_deref().unwrap_or(""), &tech)?,
            DirectionArg::File => {
                let path = config.directions_file.as_ref().expect("checked in RunConfig");
                DirectionScheme::PerUnit(read_directions(path, &tech)?)
            }
        };
        let model = Model::new(spec, scheme).with_options(config.options);
        Ok(Self { tech, model })
    }
}

fn parse_list(s: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(|v| v.parse::<f64>().map_err(|_| CliError::Config(format!("invalid number {v:?} in direction"))))
        .collect()
}

fn parse_constant(text: &str, tech: &TechnologySet) -> CliResult<DirectionScheme> {
    let (gx, gy) = text
        .split_once(';')
        .ok_or_else(|| CliError::Config("--constant-direction expects gx1,...;gy1,...".into()))?;
    let (gx, gy) = pad_direction(parse_list(gx)?, parse_list(gy)?, tech)
        .ok_or_else(|| CliError::Config("--constant-direction has the wrong number of components".into()))?;
    Ok(DirectionScheme::Constant { gx, gy })
}

/// Accepts directions written against the unpadded data and appends a zero
/// for a synthesised constant row.
fn pad_direction(mut gx: Vec<f64>, mut gy: Vec<f64>, tech: &TechnologySet) -> Option<(Vec<f64>, Vec<f64>)> {
    let padding = tech.dataset().padding();
    if padding.inputs && gx.is_empty() {
        gx.push(0.0);
    }
    if padding.outputs && gy.is_empty() {
        gy.push(0.0);
    }
    (gx.len() == tech.m() && gy.len() == tech.s()).then_some((gx, gy))
}

/// Input and output direction components keyed by unit id.
pub type DirectionMap = HashMap<String, (Vec<f64>, Vec<f64>)>;

/// Reads a per-unit direction sidecar keyed by unit id.
pub fn read_directions(path: &Path, tech: &TechnologySet) -> CliResult<DirectionMap> {
    let input_err = |source: DeaError| CliError::Input {
        path: path.to_path_buf(),
        source,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| input_err(e.into()))?;
    let headers = rdr.headers().map_err(|e| input_err(e.into()))?.clone();
    if headers.get(0) != Some("id") {
        return Err(input_err(DeaError::MalformedHeader("first column must be \"id\"".into())));
    }
    let mut is_x = Vec::new();
    for h in headers.iter().skip(1) {
        match h.split_once(':').map(|(tag, _)| tag) {
            Some("gx") => is_x.push(true),
            Some("gy") => is_x.push(false),
            _ => {
                return Err(input_err(DeaError::MalformedHeader(format!(
                    "direction column {h:?} must be tagged gx: or gy:"
                ))))
            }
        }
    }
    let mut map = HashMap::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| input_err(e.into()))?;
        let id = rec.get(0).unwrap_or_default().to_string();
        let (mut gx, mut gy) = (Vec::new(), Vec::new());
        for (k, x) in is_x.iter().enumerate() {
            let cell = rec.get(k + 1).unwrap_or_default();
            let v: f64 = cell.parse().map_err(|_| {
                input_err(DeaError::NonNumeric {
                    row: row + 1,
                    column: headers[k + 1].to_string(),
                    value: cell.to_string(),
                })
            })?;
            if *x { gx.push(v) } else { gy.push(v) }
        }
        let dir = pad_direction(gx, gy, tech).ok_or_else(|| {
            input_err(DeaError::DimensionMismatch(format!("direction of {id:?} does not match the dataset")))
        })?;
        if map.insert(id.clone(), dir).is_some() {
            return Err(input_err(DeaError::DuplicateId(id)));
        }
    }
    if let Some(missing) = tech.dataset().unit_ids().iter().find(|id| !map.contains_key(*id)) {
        return Err(input_err(DeaError::UnknownUnit(format!("{missing} has no direction"))));
    }
    Ok(map)
}

/// Files written by one run, in the order they were produced.
#[derive(Debug, Default)]
pub struct RunSummary {
    pub files: Vec<PathBuf>,
    pub failed_units: usize,
}

fn write_document<T: Serialize>(
    config: &RunConfig,
    stem: &str,
    doc: &T,
    table: impl FnOnce() -> String,
    summary: &mut RunSummary,
) -> CliResult<()> {
    fs::create_dir_all(&config.out).map_err(|source| CliError::Output {
        path: config.out.clone(),
        source,
    })?;
    let mut write = |ext: &str, body: String| -> CliResult<()> {
        let path = config.out.join(format!("{stem}.{ext}"));
        fs::write(&path, body).map_err(|source| CliError::Output { path: path.clone(), source })?;
        summary.files.push(path);
        Ok(())
    };
    if matches!(config.format, FormatArg::Json | FormatArg::Both) {
        let mut body = serde_json::to_string_pretty(doc).expect("reports serialise");
        body.push('\n');
        write("json", body)?;
    }
    if matches!(config.format, FormatArg::Table | FormatArg::Both) {
        write("txt", table())?;
    }
    Ok(())
}

/// Drops per-unit fields the user did not ask for.
fn filter_units(config: &RunConfig, report: &EvaluationReport) -> serde_json::Value {
    let mut value = serde_json::to_value(report).expect("reports serialise");
    let mut drop = Vec::new();
    if !config.wants(OutputKind::Scores) {
        drop.extend(["theta_star", "lambda_star", "alpha_x", "alpha_y"]);
    }
    if !config.wants(OutputKind::Projections) {
        drop.push("projection");
    }
    if !config.wants(OutputKind::Slacks) {
        drop.extend(["slacks", "total_slack"]);
    }
    if let Some(units) = value.get_mut("units").and_then(|u| u.as_array_mut()) {
        for unit in units {
            if let Some(obj) = unit.as_object_mut() {
                for key in &drop {
                    obj.remove(*key);
                }
            }
        }
    }
    value
}

/// Scores every unit and writes `evaluation.json` / `evaluation.txt`.
pub fn run_evaluate(config: &RunConfig, session: &Session, summary: &mut RunSummary) -> CliResult<EvaluationReport> {
    let results = if config.jobs == 0 {
        session.model.evaluate_units(&session.tech)
    } else {
        session.model.evaluate_units_with_jobs(&session.tech, config.jobs)
    };
    let report = EvaluationReport::new(&session.model, &session.tech, &results);
    summary.failed_units += report.n_failed;
    let doc = filter_units(config, &report);
    write_document(config, "evaluation", &doc, || report.to_table(), summary)?;
    Ok(report)
}

/// Runs every property check and writes `audit.json` / `audit.txt`. With GS
/// range directions the ideal-technology guarantee is checked as well.
pub fn run_audit(config: &RunConfig, session: &Session, summary: &mut RunSummary) -> CliResult<AuditDocument> {
    let opts = AuditOptions {
        seed: config.seed,
        mo_sample_pairs: config.mo_samples,
        ..AuditOptions::default()
    };
    let report = audit::audit_all(&session.tech, &session.model, &opts);
    summary.failed_units += report.failures.len();
    let mut doc = AuditDocument::new(&session.tech, &session.model, report)?;
    if let DirectionScheme::GsRange { theta_min } = session.model.scheme {
        let guarantee =
            audit::verify_ideal_guarantee(&session.tech, &session.model.spec, theta_min, session.model.options, &opts)?;
        doc = doc.with_guarantee(guarantee);
    }
    write_document(config, "audit", &doc, || doc.to_table(), summary)?;
    Ok(doc)
}

#[derive(Debug, Serialize)]
struct IdealDocument {
    schema: &'static str,
    generator_test: geometry::IdealTechnologyReport,
    edge_lp_test: geometry::IdealTechnologyReport,
    agree: bool,
}

/// Writes `ideal.json` / `ideal.txt`.
pub fn run_ideal_report(config: &RunConfig, session: &Session, summary: &mut RunSummary) -> CliResult<()> {
    let tol = config.options.feas_tol;
    let v = geometry::is_ideal_technology_v(&session.tech, geometry::COINCIDENCE_TOL, tol)?;
    let iv = geometry::is_ideal_technology_iv(&session.tech, tol)?;
    let doc = IdealDocument {
        schema: SCHEMA,
        agree: v.is_ideal == iv.is_ideal,
        generator_test: v,
        edge_lp_test: iv,
    };
    let table = || {
        let fmt = |w: &[Option<usize>]| {
            w.iter()
                .map(|o| o.map_or("-".to_string(), |j| session.tech.dataset().unit_ids()[j].clone()))
                .collect::<Vec<_>>()
                .join(" ")
        };
        format!(
            "ideal point: {}\ntrivial: {}\nideal (generator test): {} [witnesses: {}]\nideal (edge LP test): {}\n",
            fmt_point(Some(&doc.generator_test.ideal_point)),
            doc.generator_test.is_trivial,
            doc.generator_test.is_ideal,
            fmt(&doc.generator_test.witnesses_v),
            doc.edge_lp_test.is_ideal
        )
    };
    write_document(config, "ideal", &doc, table, summary)
}

/// Writes `count` equally spaced points of a unit's path on
/// `[θ_lower_bracket, 1]` to `paths-<unit_id>.json` / `.txt`.
pub fn emit_path_samples(
    config: &RunConfig,
    session: &Session,
    unit_id: &str,
    count: usize,
    summary: &mut RunSummary,
) -> CliResult<PathSampleDocument> {
    let data = session.tech.dataset();
    let j = data
        .index_of(unit_id)
        .ok_or_else(|| CliError::Config(format!("unknown unit id {unit_id:?}")))?;
    let unit = data.unit(j);
    let problem = session.model.problem(&session.tech, Some(unit_id), unit)?;
    let result = dea_path::solve_gs(&problem)?;
    let lo = result.theta_lower_bracket;
    let mut samples = Vec::with_capacity(count);
    for k in 0..count {
        let theta = if k + 1 == count {
            1.0
        } else {
            lo + (1.0 - lo) * k as f64 / (count - 1) as f64
        };
        let point = path_point(&session.model.spec, &problem.direction, unit, theta)?;
        let inside = geometry::contains(&session.tech, &point, config.options.feas_tol)?;
        samples.push(PathSample { theta, point, inside });
    }
    let doc = PathSampleDocument {
        schema: SCHEMA,
        model: session.model.spec.name(),
        direction: session.model.scheme.name(),
        unit_id: unit_id.to_string(),
        theta_star: result.theta_star,
        samples,
    };
    let stem = format!("paths-{}", sanitize(unit_id));
    write_document(config, &stem, &doc, || doc.to_table(), summary)?;
    Ok(doc)
}

fn sanitize(id: &str) -> String {
    id.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

/// Writes `table5.json` / `table5.txt` for the dataset.
pub fn run_table5(config: &RunConfig, session: &Session, summary: &mut RunSummary) -> CliResult<Table5> {
    let name = config
        .dataset
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".into());
    let table = Table5::new(vec![dea_path::report::table5_row(&name, &session.tech, config.options)]);
    write_document(config, "table5", &table, || table.to_table(), summary)?;
    Ok(table)
}

/// Everything the binary does after parsing arguments.
pub fn run(config: &RunConfig) -> CliResult<RunSummary> {
    let session = Session::open(config)?;
    let mut summary = RunSummary::default();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| CliError::Config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| -> CliResult<()> {
        if config.wants_evaluation() {
            run_evaluate(config, &session, &mut summary)?;
        }
        if config.wants(OutputKind::Audit) {
            run_audit(config, &session, &mut summary)?;
        }
        if config.wants(OutputKind::IdealReport) {
            run_ideal_report(config, &session, &mut summary)?;
        }
        if let Some((id, count)) = &config.paths {
            emit_path_samples(config, &session, id, *count, &mut summary)?;
        }
        if config.table5 {
            run_table5(config, &session, &mut summary)?;
        }
        Ok(())
    })?;
    Ok(summary)
}
