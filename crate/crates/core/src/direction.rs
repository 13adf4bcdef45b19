//! Direction vectors `g_o = (gx, gy)` and the schemes that assign them.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::data::Point;
use crate::error::{DeaError, Result};
use crate::geometry::{TechnologySet, COINCIDENCE_TOL};
use crate::path::PathSpec;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Direction {
    pub gx: Vec<f64>,
    pub gy: Vec<f64>,
    /// Zero GS range direction at the ideal point; the score is 1 by convention.
    pub degenerate: bool,
    /// Set when the direction is a GS range direction through the ideal
    /// point at this θ.
    pub range_theta_min: Option<f64>,
}

impl Direction {
    pub fn new(gx: Vec<f64>, gy: Vec<f64>) -> Self {
        Self {
            gx,
            gy,
            degenerate: false,
            range_theta_min: None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.gx.iter().chain(&self.gy).all(|v| *v == 0.0)
    }

    pub fn is_positive(&self) -> bool {
        self.gx.iter().chain(&self.gy).all(|v| *v > 0.0)
    }
}

pub type DirectionFn = Arc<dyn Fn(&TechnologySet, &Point) -> (Vec<f64>, Vec<f64>) + Send + Sync>;

#[derive(Clone)]
pub enum DirectionScheme {
    /// G1: `(|x_o|, |y_o|)`.
    Proportional,
    /// G2: paths pass through the ideal point at `theta_min`.
    GsRange { theta_min: f64 },
    /// G3: `(x_max − x_min, y_max − y_min)`.
    GlobalRange,
    /// G4: absolute mean input and output vectors.
    Average,
    Constant { gx: Vec<f64>, gy: Vec<f64> },
    /// Directions keyed by unit id (e.g. read from a sidecar file).
    PerUnit(HashMap<String, (Vec<f64>, Vec<f64>)>),
    Custom { name: String, f: DirectionFn },
}

impl DirectionScheme {
    pub fn custom(
        name: impl Into<String>,
        f: impl Fn(&TechnologySet, &Point) -> (Vec<f64>, Vec<f64>) + Send + Sync + 'static,
    ) -> Self {
        DirectionScheme::Custom {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    /// `(kx·(x_o − x_min), ky·(y_max − y_o))`.
    pub fn scaled_range(kx: f64, ky: f64) -> Self {
        Self::custom(format!("range({kx},{ky})"), move |tech, p| {
            let gx = p.x.iter().zip(tech.x_min()).map(|(v, lo)| kx * (v - lo)).collect();
            let gy = p.y.iter().zip(tech.y_max()).map(|(v, hi)| ky * (hi - v)).collect();
            (gx, gy)
        })
    }

    pub fn name(&self) -> String {
        match self {
            DirectionScheme::Proportional => "g1".into(),
            DirectionScheme::GsRange { theta_min } => format!("g2(theta_min={theta_min})"),
            DirectionScheme::GlobalRange => "g3".into(),
            DirectionScheme::Average => "g4".into(),
            DirectionScheme::Constant { .. } => "constant".into(),
            DirectionScheme::PerUnit(_) => "file".into(),
            DirectionScheme::Custom { name, .. } => name.clone(),
        }
    }

    /// Whether `g_o` is independent of the evaluated unit.
    pub fn is_unit_independent(&self) -> bool {
        matches!(
            self,
            DirectionScheme::GlobalRange | DirectionScheme::Average | DirectionScheme::Constant { .. }
        )
    }
}

impl fmt::Debug for DirectionScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Checks that `theta_min` is admissible for a GS range direction under
/// `spec` and returns the two denominators `(1 − ψx(θ), ψy(θ) − 1)`.
pub fn range_denominators(spec: &PathSpec, theta_min: f64) -> Result<(f64, f64)> {
    if !(0.0..1.0).contains(&theta_min) || !spec.in_domain(theta_min) {
        return Err(DeaError::ThetaOutOfDomain {
            theta: theta_min,
            lower: spec.domain_lower().max(0.0),
        });
    }
    let dx = 1.0 - spec.psi_x.eval(theta_min);
    let dy = spec.psi_y.eval(theta_min) - 1.0;
    if spec.inputs_active() && !(dx > 0.0 && dx.is_finite()) {
        return Err(DeaError::InvalidDirection(format!("1 - psi_x(theta_min) = {dx} is not positive")));
    }
    if spec.outputs_active() && !(dy > 0.0 && dy.is_finite()) {
        return Err(DeaError::InvalidDirection(format!("psi_y(theta_min) - 1 = {dy} is not positive")));
    }
    Ok((dx, dy))
}

/// Direction for one unit. `unit_id` is needed only by per-unit schemes.
/// Blocks the model does not use (e.g. outputs under an input-oriented
/// model) are zeroed.
pub fn make_direction(
    scheme: &DirectionScheme,
    spec: &PathSpec,
    tech: &TechnologySet,
    unit_id: Option<&str>,
    unit: &Point,
) -> Result<Direction> {
    tech.check_dims(unit)?;
    let abs = |v: &[f64]| v.iter().map(|a| a.abs()).collect::<Vec<_>>();
    let mut range_theta_min = None;
    let (mut gx, mut gy) = match scheme {
        DirectionScheme::Proportional => (abs(&unit.x), abs(&unit.y)),
        DirectionScheme::GsRange { theta_min } => {
            let (dx, dy) = range_denominators(spec, *theta_min)?;
            range_theta_min = Some(*theta_min);
            let clip = |v: f64, scale: f64| if v.abs() <= COINCIDENCE_TOL * (1.0 + scale.abs()) { 0.0 } else { v };
            let gx = unit
                .x
                .iter()
                .zip(tech.x_min())
                .map(|(&v, &lo)| if spec.inputs_active() { clip(v - lo, lo) / dx } else { 0.0 })
                .collect();
            let gy = unit
                .y
                .iter()
                .zip(tech.y_max())
                .map(|(&v, &hi)| if spec.outputs_active() { clip(hi - v, hi) / dy } else { 0.0 })
                .collect();
            (gx, gy)
        }
        DirectionScheme::GlobalRange => (
            tech.x_max().iter().zip(tech.x_min()).map(|(a, b)| a - b).collect(),
            tech.y_max().iter().zip(tech.y_min()).map(|(a, b)| a - b).collect(),
        ),
        DirectionScheme::Average => {
            let n = tech.n() as f64;
            let d = tech.dataset();
            (
                (0..tech.m()).map(|i| (d.input_row(i).sum::<f64>() / n).abs()).collect(),
                (0..tech.s()).map(|r| (d.output_row(r).sum::<f64>() / n).abs()).collect(),
            )
        }
        DirectionScheme::Constant { gx, gy } => (gx.clone(), gy.clone()),
        DirectionScheme::PerUnit(map) => {
            let id = unit_id.ok_or_else(|| DeaError::InvalidDirection("per-unit directions need a unit id".into()))?;
            map.get(id).cloned().ok_or_else(|| DeaError::UnknownUnit(id.to_string()))?
        }
        DirectionScheme::Custom { f, .. } => f(tech, unit),
    };
    if gx.len() != tech.m() || gy.len() != tech.s() {
        return Err(DeaError::DimensionMismatch(format!(
            "direction has ({}, {}) components, expected ({}, {})",
            gx.len(),
            gy.len(),
            tech.m(),
            tech.s()
        )));
    }
    for g in gx.iter_mut().chain(gy.iter_mut()) {
        if !g.is_finite() {
            return Err(DeaError::InvalidDirection("non-finite component".into()));
        }
        if *g < 0.0 {
            if range_theta_min.is_some() && *g > -1e-9 {
                *g = 0.0;
            } else {
                return Err(DeaError::InvalidDirection(format!("negative component {g}")));
            }
        }
    }
    if !spec.inputs_active() {
        gx.iter_mut().for_each(|g| *g = 0.0);
    }
    if !spec.outputs_active() {
        gy.iter_mut().for_each(|g| *g = 0.0);
    }
    let mut dir = Direction {
        gx,
        gy,
        degenerate: false,
        range_theta_min,
    };
    if dir.is_zero() {
        if range_theta_min.is_some() {
            // The unit sits at the ideal point in every coordinate the model moves.
            dir.degenerate = true;
        } else {
            return Err(DeaError::ZeroDirection);
        }
    }
    Ok(dir)
}
