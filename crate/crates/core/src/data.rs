//! Observed input/output data and CSV ingestion.

use std::collections::HashSet;
use std::io::Read;
use std::path::Path;

use serde::Serialize;

use crate::error::{DeaError, Result};

/// A point of the input-output space: `x` are inputs, `y` outputs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Point {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl Point {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Self {
        Self { x, y }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.x.len(), self.y.len())
    }

    pub fn max_abs_diff(&self, other: &Point) -> f64 {
        self.x
            .iter()
            .zip(&other.x)
            .chain(self.y.iter().zip(&other.y))
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// Which column families were synthesised on load.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Padding {
    pub inputs: bool,
    pub outputs: bool,
}

/// Observed DMUs. Unit `j` is the column `(X[.][j], Y[.][j])`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    unit_ids: Vec<String>,
    input_names: Vec<String>,
    output_names: Vec<String>,
    units: Vec<Point>,
    padding: Padding,
}

impl Dataset {
    /// Builds a dataset from unit columns. Zero-input or zero-output data are
    /// padded with a constant-1 row.
    pub fn new(unit_ids: Vec<String>, units: Vec<Point>) -> Result<Self> {
        let (m, s) = units.first().map(Point::dims).unwrap_or((0, 0));
        let input_names = (1..=m).map(|i| format!("x{i}")).collect();
        let output_names = (1..=s).map(|r| format!("y{r}")).collect();
        Self::with_names(unit_ids, input_names, output_names, units)
    }

    pub fn with_names(
        unit_ids: Vec<String>,
        mut input_names: Vec<String>,
        mut output_names: Vec<String>,
        mut units: Vec<Point>,
    ) -> Result<Self> {
        if units.is_empty() {
            return Err(DeaError::EmptyFile);
        }
        if unit_ids.len() != units.len() {
            return Err(DeaError::InvalidDataset(format!(
                "{} ids for {} units",
                unit_ids.len(),
                units.len()
            )));
        }
        let (m, s) = (input_names.len(), output_names.len());
        if m + s == 0 {
            return Err(DeaError::InvalidDataset("no input or output columns".into()));
        }
        let mut seen = HashSet::new();
        for id in &unit_ids {
            if !seen.insert(id.as_str()) {
                return Err(DeaError::DuplicateId(id.clone()));
            }
        }
        for (id, u) in unit_ids.iter().zip(&units) {
            if u.dims() != (m, s) {
                return Err(DeaError::DimensionMismatch(format!(
                    "unit {id:?} has {:?} inputs/outputs, expected ({m}, {s})",
                    u.dims()
                )));
            }
            if u.x.iter().chain(&u.y).any(|v| !v.is_finite()) {
                return Err(DeaError::InvalidDataset(format!("unit {id:?} has a non-finite entry")));
            }
        }
        let mut padding = Padding::default();
        if m == 0 {
            padding.inputs = true;
            input_names.push("unit_input".into());
            units.iter_mut().for_each(|u| u.x.push(1.0));
        }
        if s == 0 {
            padding.outputs = true;
            output_names.push("unit_output".into());
            units.iter_mut().for_each(|u| u.y.push(1.0));
        }
        Ok(Self {
            unit_ids,
            input_names,
            output_names,
            units,
            padding,
        })
    }

    pub fn n(&self) -> usize {
        self.units.len()
    }

    pub fn m(&self) -> usize {
        self.input_names.len()
    }

    pub fn s(&self) -> usize {
        self.output_names.len()
    }

    pub fn unit_ids(&self) -> &[String] {
        &self.unit_ids
    }

    pub fn input_names(&self) -> &[String] {
        &self.input_names
    }

    pub fn output_names(&self) -> &[String] {
        &self.output_names
    }

    pub fn units(&self) -> &[Point] {
        &self.units
    }

    pub fn unit(&self, j: usize) -> &Point {
        &self.units[j]
    }

    pub fn padding(&self) -> Padding {
        self.padding
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.unit_ids.iter().position(|u| u == id)
    }

    /// Row `i` of X.
    pub fn input_row(&self, i: usize) -> impl Iterator<Item = f64> + '_ {
        self.units.iter().map(move |u| u.x[i])
    }

    /// Row `r` of Y.
    pub fn output_row(&self, r: usize) -> impl Iterator<Item = f64> + '_ {
        self.units.iter().map(move |u| u.y[r])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataFormat {
    Csv,
}

pub fn load_dataset(path: impl AsRef<Path>, format: DataFormat) -> Result<Dataset> {
    let file = std::fs::File::open(path)?;
    match format {
        DataFormat::Csv => read_csv(file),
    }
}

#[derive(Clone, Copy)]
enum Column {
    Input,
    Output,
}

/// Reads the `id, i:<name>…, o:<name>…, u:<name>…` layout. `u:` columns are
/// undesirable outputs and are stored as inputs.
pub fn read_csv<R: Read>(reader: R) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
        return Err(DeaError::EmptyFile);
    }
    if &headers[0] != "id" {
        return Err(DeaError::MalformedHeader(format!(
            "first column must be \"id\", found {:?}",
            &headers[0]
        )));
    }
    let mut columns = Vec::with_capacity(headers.len() - 1);
    let (mut input_names, mut output_names) = (Vec::new(), Vec::new());
    for h in headers.iter().skip(1) {
        let (tag, name) = h
            .split_once(':')
            .ok_or_else(|| DeaError::MalformedHeader(format!("column {h:?} lacks an i:/o:/u: tag")))?;
        if name.is_empty() {
            return Err(DeaError::MalformedHeader(format!("column {h:?} has an empty name")));
        }
        match tag {
            "i" | "u" => {
                columns.push(Column::Input);
                input_names.push(name.to_string());
            }
            "o" => {
                columns.push(Column::Output);
                output_names.push(name.to_string());
            }
            _ => {
                return Err(DeaError::MalformedHeader(format!("unknown column tag {tag:?} in {h:?}")));
            }
        }
    }
    if columns.is_empty() {
        return Err(DeaError::MalformedHeader("no input or output columns".into()));
    }

    let mut ids = Vec::new();
    let mut units = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let id = rec.get(0).unwrap_or_default().to_string();
        if id.is_empty() {
            return Err(DeaError::InvalidDataset(format!("row {} has an empty id", row + 1)));
        }
        let mut p = Point::new(Vec::with_capacity(input_names.len()), Vec::with_capacity(output_names.len()));
        for (k, col) in columns.iter().enumerate() {
            let cell = rec.get(k + 1).unwrap_or_default();
            let v: f64 = cell.parse().ok().filter(|v: &f64| v.is_finite()).ok_or_else(|| DeaError::NonNumeric {
                row: row + 1,
                column: headers[k + 1].to_string(),
                value: cell.to_string(),
            })?;
            match col {
                Column::Input => p.x.push(v),
                Column::Output => p.y.push(v),
            }
        }
        ids.push(id);
        units.push(p);
    }
    if units.is_empty() {
        return Err(DeaError::EmptyFile);
    }
    Dataset::with_names(ids, input_names, output_names, units)
}
