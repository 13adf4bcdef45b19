//! Path functions and the model catalogue.
//!
//! A model evaluates unit `(x_o, y_o)` along
//! `x(θ) = x_o + (ψx(θ) − 1)·gx`, `y(θ) = y_o + (ψy(θ) − 1)·gy`.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

/// A scalar path function.
#[derive(Clone)]
pub enum PathFn {
    /// `intercept + slope·θ`
    Affine { intercept: f64, slope: f64 },
    /// `1/θ`
    Reciprocal,
    /// `θ^exponent`, θ > 0
    Power(f64),
    Custom {
        name: String,
        f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        domain_lower: f64,
    },
}

impl PathFn {
    pub fn identity() -> Self {
        PathFn::Affine {
            intercept: 0.0,
            slope: 1.0,
        }
    }

    pub fn custom(
        name: impl Into<String>,
        domain_lower: f64,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        PathFn::Custom {
            name: name.into(),
            f: Arc::new(f),
            domain_lower,
        }
    }

    pub fn eval(&self, theta: f64) -> f64 {
        match self {
            PathFn::Affine { intercept, slope } => intercept + slope * theta,
            PathFn::Reciprocal => 1.0 / theta,
            PathFn::Power(e) => {
                if *e == 0.0 {
                    1.0
                } else {
                    theta.powf(*e)
                }
            }
            PathFn::Custom { f, .. } => f(theta),
        }
    }

    /// Open lower end of the domain: `-inf` or `0`.
    pub fn domain_lower(&self) -> f64 {
        match self {
            PathFn::Affine { .. } => f64::NEG_INFINITY,
            PathFn::Power(e) if *e == 0.0 => f64::NEG_INFINITY,
            PathFn::Reciprocal | PathFn::Power(_) => 0.0,
            PathFn::Custom { domain_lower, .. } => *domain_lower,
        }
    }

    /// `(intercept, slope)` when the function is affine in θ.
    pub fn affine(&self) -> Option<(f64, f64)> {
        match self {
            PathFn::Affine { intercept, slope } => Some((*intercept, *slope)),
            PathFn::Power(e) if *e == 0.0 => Some((1.0, 0.0)),
            PathFn::Power(e) if *e == 1.0 => Some((0.0, 1.0)),
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.affine(), Some((_, s)) if s == 0.0)
    }
}

impl fmt::Debug for PathFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathFn::Affine { intercept, slope } => write!(f, "{intercept} + {slope}·θ"),
            PathFn::Reciprocal => write!(f, "1/θ"),
            PathFn::Power(e) => write!(f, "θ^{e}"),
            PathFn::Custom { name, .. } => write!(f, "{name}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    BccI,
    BccO,
    Ddf,
    Hdf,
    Gdf,
    Custom,
}

/// Which direction blocks the model uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Orientation {
    Both,
    InputOnly,
    OutputOnly,
}

/// The pair `(ψx, ψy)` identifying one model of the family.
#[derive(Debug, Clone)]
pub struct PathSpec {
    pub kind: ModelKind,
    pub psi_x: PathFn,
    pub psi_y: PathFn,
    pub orientation: Orientation,
    pub gdf_p: Option<f64>,
}

impl PathSpec {
    /// Radial input contraction; output direction is ignored.
    pub fn bcc_input() -> Self {
        Self {
            kind: ModelKind::BccI,
            psi_x: PathFn::identity(),
            psi_y: PathFn::Affine {
                intercept: 2.0,
                slope: -1.0,
            },
            orientation: Orientation::InputOnly,
            gdf_p: None,
        }
    }

    /// Radial output expansion `y/θ`; input direction is ignored.
    pub fn bcc_output() -> Self {
        Self {
            kind: ModelKind::BccO,
            psi_x: PathFn::identity(),
            psi_y: PathFn::Reciprocal,
            orientation: Orientation::OutputOnly,
            gdf_p: None,
        }
    }

    pub fn ddf() -> Self {
        Self {
            kind: ModelKind::Ddf,
            psi_x: PathFn::identity(),
            psi_y: PathFn::Affine {
                intercept: 2.0,
                slope: -1.0,
            },
            orientation: Orientation::Both,
            gdf_p: None,
        }
    }

    pub fn hdf() -> Self {
        Self {
            kind: ModelKind::Hdf,
            psi_x: PathFn::identity(),
            psi_y: PathFn::Reciprocal,
            orientation: Orientation::Both,
            gdf_p: None,
        }
    }

    /// `ψx = θ^(1−p)`, `ψy = θ^(−p)`. At `p = 1` the input side is constant
    /// and the model is output oriented; at `p = 0` it is input oriented.
    pub fn gdf(p: f64) -> Option<Self> {
        if !(0.0..=1.0).contains(&p) {
            return None;
        }
        let orientation = if p == 1.0 {
            Orientation::OutputOnly
        } else if p == 0.0 {
            Orientation::InputOnly
        } else {
            Orientation::Both
        };
        Some(Self {
            kind: ModelKind::Gdf,
            psi_x: PathFn::Power(1.0 - p),
            psi_y: PathFn::Power(-p),
            orientation,
            gdf_p: Some(p),
        })
    }

    pub fn custom(psi_x: PathFn, psi_y: PathFn) -> Self {
        Self {
            kind: ModelKind::Custom,
            psi_x,
            psi_y,
            orientation: Orientation::Both,
            gdf_p: None,
        }
    }

    pub fn name(&self) -> String {
        match self.kind {
            ModelKind::BccI => "bcc-i".into(),
            ModelKind::BccO => "bcc-o".into(),
            ModelKind::Ddf => "ddf".into(),
            ModelKind::Hdf => "hdf".into(),
            ModelKind::Gdf => format!("gdf({})", self.gdf_p.unwrap_or(f64::NAN)),
            ModelKind::Custom => format!("custom[{:?}; {:?}]", self.psi_x, self.psi_y),
        }
    }

    /// Lower end of the common domain `dom ψx ∩ dom ψy` (open).
    pub fn domain_lower(&self) -> f64 {
        self.psi_x.domain_lower().max(self.psi_y.domain_lower())
    }

    pub fn in_domain(&self, theta: f64) -> bool {
        theta.is_finite() && theta > self.domain_lower()
    }

    pub fn inputs_active(&self) -> bool {
        self.orientation != Orientation::OutputOnly && !self.psi_x.is_constant()
    }

    pub fn outputs_active(&self) -> bool {
        self.orientation != Orientation::InputOnly && !self.psi_y.is_constant()
    }

    /// Both path functions affine: the program is a single LP in (θ, λ).
    pub fn affine_coefficients(&self) -> Option<((f64, f64), (f64, f64))> {
        Some((self.psi_x.affine()?, self.psi_y.affine()?))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathViolation {
    pub message: String,
    pub theta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub grid: Vec<f64>,
    pub violations: Vec<PathViolation>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, message: &str) -> bool {
        self.violations.iter().any(|v| v.message == message)
    }
}

pub const DEFAULT_VALIDATION_GRID: usize = 101;
const GRID_UPPER: f64 = 10.0;

/// Numerical check of monotonicity, curvature and normalisation of ψx, ψy
/// on `grid` equally spaced points of `[max(lower + 1e-6, 1e-6), 10]`.
pub fn validate_pathspec(spec: &PathSpec, grid: usize) -> ValidationReport {
    let grid = grid.max(3);
    let lo = (spec.domain_lower() + 1e-6).max(1e-6);
    let h = (GRID_UPPER - lo) / (grid - 1) as f64;
    let thetas: Vec<f64> = (0..grid).map(|k| lo + h * k as f64).collect();
    let mut violations = Vec::new();

    let at_one = (spec.psi_x.eval(1.0), spec.psi_y.eval(1.0));
    if (at_one.0 - 1.0).abs() > 1e-12 {
        violations.push(PathViolation {
            message: "psi_x(1) != 1".into(),
            theta: Some(1.0),
        });
    }
    if (at_one.1 - 1.0).abs() > 1e-12 {
        violations.push(PathViolation {
            message: "psi_y(1) != 1".into(),
            theta: Some(1.0),
        });
    }

    let check = |f: &PathFn, increasing: bool, concave: bool, label: &str, out: &mut Vec<PathViolation>| {
        let vals: Vec<f64> = thetas.iter().map(|&t| f.eval(t)).collect();
        let mut first_mono = None;
        let mut first_curv = None;
        let mut first_nan = None;
        for k in 0..vals.len() {
            if !vals[k].is_finite() && first_nan.is_none() {
                first_nan = Some(thetas[k]);
            }
            if k + 1 < vals.len() {
                let d = vals[k + 1] - vals[k];
                let eps = 1e-12 * (1.0 + vals[k].abs() + vals[k + 1].abs());
                let bad = if increasing { d < -eps } else { d > eps };
                if bad && first_mono.is_none() {
                    first_mono = Some(thetas[k]);
                }
            }
            if k > 0 && k + 1 < vals.len() {
                let dd = vals[k - 1] - 2.0 * vals[k] + vals[k + 1];
                let eps = 1e-9 * (vals[k - 1].abs() + 2.0 * vals[k].abs() + vals[k + 1].abs());
                let bad = if concave { dd > eps } else { dd < -eps };
                if bad && first_curv.is_none() {
                    first_curv = Some(thetas[k]);
                }
            }
        }
        if let Some(t) = first_nan {
            out.push(PathViolation {
                message: format!("{label} not finite on domain"),
                theta: Some(t),
            });
        }
        if let Some(t) = first_mono {
            out.push(PathViolation {
                message: format!("{label} not {}", if increasing { "increasing" } else { "decreasing" }),
                theta: Some(t),
            });
        }
        if let Some(t) = first_curv {
            out.push(PathViolation {
                message: format!("{label} not {}", if concave { "concave" } else { "convex" }),
                theta: Some(t),
            });
        }
    };
    check(&spec.psi_x, true, true, "psi_x", &mut violations);
    check(&spec.psi_y, false, false, "psi_y", &mut violations);

    ValidationReport {
        grid: thetas,
        violations,
    }
}
