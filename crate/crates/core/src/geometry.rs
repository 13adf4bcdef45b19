//! Queries on the VRS technology set
//! `T = {(x, y) : Xλ <= x, Yλ >= y, Σλ = 1, λ >= 0}`.

use serde::Serialize;

use crate::data::{Dataset, Point};
use crate::error::{DeaError, Result};
use crate::linprog::{self, LinearProgram, LpStatus};

/// Relative factor for coordinate coincidence with the ideal point.
pub const COINCIDENCE_TOL: f64 = 1e-9;

/// The technology generated by a dataset, with its ideal point and
/// per-coordinate data ranges.
#[derive(Debug, Clone)]
pub struct TechnologySet {
    dataset: Dataset,
    x_min: Vec<f64>,
    x_max: Vec<f64>,
    y_min: Vec<f64>,
    y_max: Vec<f64>,
}

impl TechnologySet {
    pub fn new(dataset: Dataset) -> Self {
        let fold = |it: &mut dyn Iterator<Item = f64>| {
            it.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
        };
        let (x_min, x_max) = (0..dataset.m()).map(|i| fold(&mut dataset.input_row(i))).unzip();
        let (y_min, y_max) = (0..dataset.s()).map(|r| fold(&mut dataset.output_row(r))).unzip();
        Self {
            dataset,
            x_min,
            x_max,
            y_min,
            y_max,
        }
    }

    pub fn dataset(&self) -> &Dataset {
        &self.dataset
    }

    pub fn m(&self) -> usize {
        self.dataset.m()
    }

    pub fn s(&self) -> usize {
        self.dataset.s()
    }

    pub fn n(&self) -> usize {
        self.dataset.n()
    }

    pub fn x_min(&self) -> &[f64] {
        &self.x_min
    }

    pub fn x_max(&self) -> &[f64] {
        &self.x_max
    }

    pub fn y_min(&self) -> &[f64] {
        &self.y_min
    }

    pub fn y_max(&self) -> &[f64] {
        &self.y_max
    }

    pub fn ideal_point(&self) -> Point {
        Point::new(self.x_min.clone(), self.y_max.clone())
    }

    /// Data range of every input row followed by every output row. A row
    /// without spread uses `max(1, |value|)`.
    pub fn row_scales(&self) -> Point {
        let scale = |lo: f64, hi: f64| {
            let r = hi - lo;
            if r > 0.0 {
                r
            } else {
                hi.abs().max(1.0)
            }
        };
        Point::new(
            self.x_min.iter().zip(&self.x_max).map(|(&a, &b)| scale(a, b)).collect(),
            self.y_min.iter().zip(&self.y_max).map(|(&a, &b)| scale(a, b)).collect(),
        )
    }

    pub(crate) fn check_dims(&self, p: &Point) -> Result<()> {
        if p.dims() != (self.m(), self.s()) {
            return Err(DeaError::DimensionMismatch(format!(
                "point has {:?} inputs/outputs, technology has ({}, {})",
                p.dims(),
                self.m(),
                self.s()
            )));
        }
        Ok(())
    }

    /// Constraint block `Xλ <= x, Yλ >= y, Σλ = 1` over the first `n`
    /// variables of an LP with `nvars` variables.
    pub(crate) fn envelope_lp(&self, point: &Point, nvars: usize) -> LinearProgram {
        let n = self.n();
        let mut lp = LinearProgram::new(nvars);
        let mut sum = vec![0.0; nvars];
        sum[..n].iter_mut().for_each(|v| *v = 1.0);
        lp.eq_row(sum, 1.0);
        for i in 0..self.m() {
            let mut row = vec![0.0; nvars];
            row[..n].iter_mut().zip(self.dataset.input_row(i)).for_each(|(a, v)| *a = v);
            lp.le_row(row, point.x[i]);
        }
        for r in 0..self.s() {
            let mut row = vec![0.0; nvars];
            row[..n].iter_mut().zip(self.dataset.output_row(r)).for_each(|(a, v)| *a = v);
            lp.ge_row(row, point.y[r]);
        }
        lp
    }

    pub fn combine(&self, lambda: &[f64]) -> Point {
        let mut p = Point::new(vec![0.0; self.m()], vec![0.0; self.s()]);
        for (u, &l) in self.dataset.units().iter().zip(lambda) {
            p.x.iter_mut().zip(&u.x).for_each(|(a, v)| *a += l * v);
            p.y.iter_mut().zip(&u.y).for_each(|(a, v)| *a += l * v);
        }
        p
    }
}

/// Intensity vector certifying `point ∈ T`, if any.
pub fn membership(tech: &TechnologySet, point: &Point, tol: f64) -> Result<Option<Vec<f64>>> {
    tech.check_dims(point)?;
    let lp = tech.envelope_lp(point, tech.n());
    let sol = linprog::solve(&lp, tol)?;
    Ok(match sol.status {
        LpStatus::Optimal => Some(sol.z),
        _ => None,
    })
}

pub fn contains(tech: &TechnologySet, point: &Point, tol: f64) -> Result<bool> {
    tech.check_dims(point)?;
    Ok(linprog::feasible(&tech.envelope_lp(point, tech.n()), tol)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Dominance {
    /// `u` is at least as good in every coordinate and equal to `v`.
    Weak,
    /// At least as good everywhere and different.
    StrictPartial,
    /// Strictly better in every coordinate.
    Strict,
    None,
}

impl Dominance {
    /// `u ⪰ v` in any form.
    pub fn weakly(self) -> bool {
        self != Dominance::None
    }

    /// `u ⪸ v` (includes strict).
    pub fn strictly_partial(self) -> bool {
        matches!(self, Dominance::StrictPartial | Dominance::Strict)
    }
}

/// Dominance of `u` over `v`: fewer inputs and more outputs is better.
pub fn dominance(u: &Point, v: &Point) -> Dominance {
    let pairs = u
        .x
        .iter()
        .zip(&v.x)
        .map(|(a, b)| (b, a))
        .chain(u.y.iter().zip(&v.y));
    let (mut all_ge, mut all_gt, mut any_gt) = (true, true, false);
    for (better, worse) in pairs {
        if better < worse {
            all_ge = false;
        }
        if better > worse {
            any_gt = true;
        } else {
            all_gt = false;
        }
    }
    if !all_ge {
        Dominance::None
    } else if all_gt {
        Dominance::Strict
    } else if any_gt {
        Dominance::StrictPartial
    } else {
        Dominance::Weak
    }
}

/// Optimum of the additive slack program at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct SlackSolution {
    pub lambda: Vec<f64>,
    pub sx: Vec<f64>,
    pub sy: Vec<f64>,
    /// `Σ sx_i / scale_i + Σ sy_r / scale_r` with the row scales of the data.
    pub normalized_total: f64,
}

impl SlackSolution {
    pub fn total(&self) -> f64 {
        self.sx.iter().chain(&self.sy).sum()
    }
}

/// Maximises the scale-normalised slack of `point` against `T`:
/// `max Σ (x − Xλ)_i / w_i + Σ (Yλ − y)_r / w_r` over the envelope of `point`.
/// Returns `None` when `point ∉ T`.
pub fn max_slack(tech: &TechnologySet, point: &Point, tol: f64) -> Result<Option<SlackSolution>> {
    tech.check_dims(point)?;
    let n = tech.n();
    let scales = tech.row_scales();
    let mut c = vec![0.0; n];
    for (j, u) in tech.dataset().units().iter().enumerate() {
        let cx: f64 = u.x.iter().zip(&scales.x).map(|(v, w)| v / w).sum();
        let cy: f64 = u.y.iter().zip(&scales.y).map(|(v, w)| v / w).sum();
        c[j] = cx - cy;
    }
    let lp = tech.envelope_lp(point, n).minimize(c);
    let sol = linprog::solve(&lp, tol)?;
    match sol.status {
        LpStatus::Infeasible => Ok(None),
        LpStatus::Unbounded => Err(DeaError::Lp(linprog::LpError::Numeric(
            "slack program unbounded".into(),
        ))),
        LpStatus::Optimal => {
            let lambda = sol.z;
            let env = tech.combine(&lambda);
            let sx: Vec<f64> = point.x.iter().zip(&env.x).map(|(p, e)| (p - e).max(0.0)).collect();
            let sy: Vec<f64> = env.y.iter().zip(&point.y).map(|(e, p)| (e - p).max(0.0)).collect();
            let normalized_total = sx.iter().zip(&scales.x).map(|(s, w)| s / w).sum::<f64>()
                + sy.iter().zip(&scales.y).map(|(s, w)| s / w).sum::<f64>();
            Ok(Some(SlackSolution {
                lambda,
                sx,
                sy,
                normalized_total,
            }))
        }
    }
}

/// Largest `t` with `(x − t·w, y + t·w) ∈ T` for the row scales `w`.
pub fn interior_depth(tech: &TechnologySet, point: &Point, tol: f64) -> Result<Option<f64>> {
    tech.check_dims(point)?;
    let n = tech.n();
    let scales = tech.row_scales();
    let mut lp = LinearProgram::new(n + 1);
    let mut sum = vec![0.0; n + 1];
    sum[..n].iter_mut().for_each(|v| *v = 1.0);
    lp.eq_row(sum, 1.0);
    for i in 0..tech.m() {
        let mut row: Vec<f64> = tech.dataset().input_row(i).collect();
        row.push(scales.x[i]);
        lp.le_row(row, point.x[i]);
    }
    for r in 0..tech.s() {
        let mut row: Vec<f64> = tech.dataset().output_row(r).collect();
        row.push(-scales.y[r]);
        lp.ge_row(row, point.y[r]);
    }
    lp.bounds(n, f64::NEG_INFINITY, f64::INFINITY);
    let mut c = vec![0.0; n + 1];
    c[n] = -1.0;
    let lp = lp.minimize(c);
    let sol = linprog::solve(&lp, tol)?;
    Ok(match sol.status {
        LpStatus::Optimal => Some(sol.z[n]),
        _ => None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum UnitClass {
    Interior,
    WeakFrontier,
    StrongFrontier,
    Outside,
}

/// `tol` is relative: slacks and interior depth are compared after
/// division by the row scales.
pub fn classify_unit(tech: &TechnologySet, point: &Point, tol: f64) -> Result<UnitClass> {
    let Some(slack) = max_slack(tech, point, linprog::DEFAULT_TOL)? else {
        return Ok(UnitClass::Outside);
    };
    if slack.normalized_total <= tol {
        return Ok(UnitClass::StrongFrontier);
    }
    let depth = interior_depth(tech, point, linprog::DEFAULT_TOL)?.unwrap_or(0.0);
    Ok(if depth > tol {
        UnitClass::Interior
    } else {
        UnitClass::WeakFrontier
    })
}

pub fn ideal_point(tech: &TechnologySet) -> Point {
    tech.ideal_point()
}

pub fn is_trivial_technology(tech: &TechnologySet, tol: f64) -> Result<bool> {
    contains(tech, &tech.ideal_point(), tol)
}

fn coincides(value: f64, target: f64, rel: f64) -> bool {
    (value - target).abs() <= rel * (1.0 + target.abs())
}

/// Index sets `I = {i : x_i = x_min_i}` and `R = {r : y_r = y_max_r}`.
pub fn coincidence_sets(tech: &TechnologySet, point: &Point, rel: f64) -> (Vec<usize>, Vec<usize>) {
    let i = (0..tech.m()).filter(|&i| coincides(point.x[i], tech.x_min[i], rel)).collect();
    let r = (0..tech.s()).filter(|&r| coincides(point.y[r], tech.y_max[r], rel)).collect();
    (i, r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IdealTest {
    /// A generating unit matching the ideal point off one coordinate.
    GeneratorWitness,
    /// A point of `T` matching the ideal point off one coordinate (LP).
    EdgeLp,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdealTechnologyReport {
    pub test: IdealTest,
    pub ideal_point: Point,
    pub is_trivial: bool,
    pub is_ideal: bool,
    /// Per coordinate (inputs then outputs): generator index witnessing it.
    pub witnesses_v: Vec<Option<usize>>,
    /// Per coordinate: smallest departure δ >= 0 along that coordinate
    /// that stays in `T`.
    pub witnesses_iv: Vec<Option<f64>>,
}

impl IdealTechnologyReport {
    pub fn unwitnessed(&self) -> Vec<usize> {
        let flags: Vec<bool> = match self.test {
            IdealTest::GeneratorWitness => self.witnesses_v.iter().map(Option::is_some).collect(),
            IdealTest::EdgeLp => self.witnesses_iv.iter().map(Option::is_some).collect(),
        };
        flags.iter().enumerate().filter(|(_, ok)| !**ok).map(|(k, _)| k).collect()
    }
}

/// Searches, for every coordinate, a generator equal to the ideal point in
/// all other coordinates. `rel` is the relative coincidence tolerance.
pub fn is_ideal_technology_v(tech: &TechnologySet, rel: f64, lp_tol: f64) -> Result<IdealTechnologyReport> {
    let (m, s) = (tech.m(), tech.s());
    let units = tech.dataset().units();
    let matches = |u: &Point, skip: usize| {
        (0..m).all(|i| i == skip || coincides(u.x[i], tech.x_min[i], rel))
            && (0..s).all(|r| m + r == skip || coincides(u.y[r], tech.y_max[r], rel))
    };
    let witnesses_v: Vec<Option<usize>> = (0..m + s).map(|k| units.iter().position(|u| matches(u, k))).collect();
    Ok(IdealTechnologyReport {
        test: IdealTest::GeneratorWitness,
        ideal_point: tech.ideal_point(),
        is_trivial: is_trivial_technology(tech, lp_tol)?,
        is_ideal: witnesses_v.iter().all(Option::is_some),
        witnesses_v,
        witnesses_iv: Vec::new(),
    })
}

/// For every coordinate, `min δ >= 0` such that the ideal point moved by `δ`
/// in that coordinate (worse direction) lies in `T`.
pub fn is_ideal_technology_iv(tech: &TechnologySet, lp_tol: f64) -> Result<IdealTechnologyReport> {
    let (n, m, s) = (tech.n(), tech.m(), tech.s());
    let ideal = tech.ideal_point();
    let mut witnesses_iv = Vec::with_capacity(m + s);
    for k in 0..m + s {
        let mut lp = tech.envelope_lp(&ideal, n + 1);
        // Inequality rows are the m input rows followed by the s output rows,
        // the latter stored negated; both relax by −δ.
        lp.ub_lhs[k][n] = -1.0;
        let mut c = vec![0.0; n + 1];
        c[n] = 1.0;
        let lp = lp.minimize(c);
        let sol = linprog::solve(&lp, lp_tol)?;
        witnesses_iv.push(match sol.status {
            LpStatus::Optimal => Some(sol.z[n].max(0.0)),
            _ => None,
        });
    }
    Ok(IdealTechnologyReport {
        test: IdealTest::EdgeLp,
        ideal_point: ideal,
        is_trivial: is_trivial_technology(tech, lp_tol)?,
        is_ideal: witnesses_iv.iter().all(Option::is_some),
        witnesses_v: Vec::new(),
        witnesses_iv,
    })
}
