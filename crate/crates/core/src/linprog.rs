//! Dense two-phase primal simplex.
//!
//! Problems are stated as
//!
//! ```text
//!    min  c'z
//!    s.t. A_eq z  = b_eq
//!         A_ub z <= b_ub
//!         lower <= z <= upper      (bounds may be infinite)
//! ```
//!
//! and rewritten internally into `min c'w, Aw = b, w >= 0` with slacks and
//! artificials. Pivoting follows Bland's rule throughout, so the pivot
//! sequence (and therefore the returned vertex) is a deterministic function
//! of the input. Each constraint row is scaled by its largest absolute
//! coefficient before the tableau is built.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("iteration limit of {0} pivots reached")]
    IterationLimit(usize),
}

/// A linear program in minimisation form.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub eq_lhs: Vec<Vec<f64>>,
    pub eq_rhs: Vec<f64>,
    /// Rows encode `a·z <= b`.
    pub ub_lhs: Vec<Vec<f64>>,
    pub ub_rhs: Vec<f64>,
    pub var_lower: Vec<f64>,
    pub var_upper: Vec<f64>,
}

impl LinearProgram {
    /// `n` nonnegative variables, zero objective, no constraints.
    pub fn new(n: usize) -> Self {
        Self {
            objective: vec![0.0; n],
            eq_lhs: Vec::new(),
            eq_rhs: Vec::new(),
            ub_lhs: Vec::new(),
            ub_rhs: Vec::new(),
            var_lower: vec![0.0; n],
            var_upper: vec![f64::INFINITY; n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn minimize(mut self, c: Vec<f64>) -> Self {
        self.objective = c;
        self
    }

    pub fn eq_row(&mut self, row: Vec<f64>, rhs: f64) -> &mut Self {
        self.eq_lhs.push(row);
        self.eq_rhs.push(rhs);
        self
    }

    pub fn le_row(&mut self, row: Vec<f64>, rhs: f64) -> &mut Self {
        self.ub_lhs.push(row);
        self.ub_rhs.push(rhs);
        self
    }

    pub fn ge_row(&mut self, row: Vec<f64>, rhs: f64) -> &mut Self {
        self.ub_lhs.push(row.into_iter().map(|v| -v).collect());
        self.ub_rhs.push(-rhs);
        self
    }

    pub fn bounds(&mut self, var: usize, lower: f64, upper: f64) -> &mut Self {
        self.var_lower[var] = lower;
        self.var_upper[var] = upper;
        self
    }

    fn validate(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        if self.var_lower.len() != n || self.var_upper.len() != n {
            return Err(LpError::DimensionMismatch(format!(
                "{} variables but {} lower / {} upper bounds",
                n,
                self.var_lower.len(),
                self.var_upper.len()
            )));
        }
        if self.eq_lhs.len() != self.eq_rhs.len() || self.ub_lhs.len() != self.ub_rhs.len() {
            return Err(LpError::DimensionMismatch(
                "constraint rows and right-hand sides differ in length".into(),
            ));
        }
        for row in self.eq_lhs.iter().chain(&self.ub_lhs) {
            if row.len() != n {
                return Err(LpError::DimensionMismatch(format!(
                    "constraint row of length {} for {} variables",
                    row.len(),
                    n
                )));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(LpError::NonFinite("constraint matrix"));
            }
        }
        if self.objective.iter().any(|v| !v.is_finite()) {
            return Err(LpError::NonFinite("objective"));
        }
        if self.eq_rhs.iter().chain(&self.ub_rhs).any(|v| !v.is_finite()) {
            return Err(LpError::NonFinite("right-hand side"));
        }
        for (lo, hi) in self.var_lower.iter().zip(&self.var_upper) {
            if lo.is_nan() || hi.is_nan() || *lo == f64::INFINITY || *hi == f64::NEG_INFINITY {
                return Err(LpError::NonFinite("variable bounds"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Primal point; meaningful only when `status == Optimal`.
    pub z: Vec<f64>,
    pub objective_value: f64,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

pub const DEFAULT_TOL: f64 = 1e-8;

const PIVOT_TOL: f64 = 1e-11;
const COST_TOL: f64 = 1e-10;

pub fn solve(lp: &LinearProgram, tol: f64) -> Result<LpSolution, LpError> {
    run(lp, tol, true)
}

/// Phase one only: is the constraint polyhedron of `lp` nonempty?
pub fn feasible(lp: &LinearProgram, tol: f64) -> Result<bool, LpError> {
    Ok(run(lp, tol, false)?.status != LpStatus::Infeasible)
}

#[derive(Debug, Clone, Copy)]
enum VarMap {
    /// z = lower + w
    Shifted { col: usize, lower: f64 },
    /// z = upper - w
    Mirrored { col: usize, upper: f64 },
    /// z = w+ - w-
    Split { pos: usize, neg: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum RowKind {
    Eq,
    Le,
}

struct StandardForm {
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    kinds: Vec<RowKind>,
    cost: Vec<f64>,
    vars: Vec<VarMap>,
    ncols: usize,
}

impl StandardForm {
    fn build(lp: &LinearProgram, tol: f64) -> Result<Option<Self>, LpError> {
        let mut vars = Vec::with_capacity(lp.num_vars());
        let mut ncols = 0;
        let mut bound_rows: Vec<(usize, f64)> = Vec::new();
        for (&lo, &hi) in lp.var_lower.iter().zip(&lp.var_upper) {
            if lo.is_finite() {
                vars.push(VarMap::Shifted { col: ncols, lower: lo });
                if hi.is_finite() {
                    bound_rows.push((ncols, hi - lo));
                }
                ncols += 1;
            } else if hi.is_finite() {
                vars.push(VarMap::Mirrored { col: ncols, upper: hi });
                ncols += 1;
            } else {
                vars.push(VarMap::Split { pos: ncols, neg: ncols + 1 });
                ncols += 2;
            }
        }

        let map_row = |row: &[f64], rhs: f64| -> (Vec<f64>, f64) {
            let mut out = vec![0.0; ncols];
            let mut b = rhs;
            for (a, v) in row.iter().zip(&vars) {
                match *v {
                    VarMap::Shifted { col, lower } => {
                        out[col] += a;
                        b -= a * lower;
                    }
                    VarMap::Mirrored { col, upper } => {
                        out[col] -= a;
                        b -= a * upper;
                    }
                    VarMap::Split { pos, neg } => {
                        out[pos] += a;
                        out[neg] -= a;
                    }
                }
            }
            (out, b)
        };

        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        let mut kinds = Vec::new();
        let mut push = |row: Vec<f64>, b: f64, kind: RowKind| -> bool {
            let scale = row.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if scale == 0.0 {
                // Empty row: either vacuous or a contradiction.
                return match kind {
                    RowKind::Eq => b.abs() <= tol,
                    RowKind::Le => b >= -tol,
                };
            }
            rows.push(row.into_iter().map(|v| v / scale).collect());
            rhs.push(b / scale);
            kinds.push(kind);
            true
        };

        for (row, &b) in lp.eq_lhs.iter().zip(&lp.eq_rhs) {
            let (r, b) = map_row(row, b);
            if !push(r, b, RowKind::Eq) {
                return Ok(None);
            }
        }
        for (row, &b) in lp.ub_lhs.iter().zip(&lp.ub_rhs) {
            let (r, b) = map_row(row, b);
            if !push(r, b, RowKind::Le) {
                return Ok(None);
            }
        }
        for (col, width) in bound_rows {
            let mut r = vec![0.0; ncols];
            r[col] = 1.0;
            if !push(r, width, RowKind::Le) {
                return Ok(None);
            }
        }

        let (cost, _) = map_row(&lp.objective, 0.0);
        if rhs.iter().any(|v: &f64| !v.is_finite()) {
            return Err(LpError::NonFinite("scaled right-hand side"));
        }
        Ok(Some(Self {
            rows,
            rhs,
            kinds,
            cost,
            vars,
            ncols,
        }))
    }

    fn recover(&self, w: &[f64]) -> Vec<f64> {
        self.vars
            .iter()
            .map(|v| match *v {
                VarMap::Shifted { col, lower } => lower + w[col],
                VarMap::Mirrored { col, upper } => upper - w[col],
                VarMap::Split { pos, neg } => w[pos] - w[neg],
            })
            .collect()
    }
}

/// Dense simplex tableau. The last row holds reduced costs, the last
/// column the basic values; `tab[obj][rhs]` is minus the objective.
struct Tableau {
    data: Vec<f64>,
    width: usize,
    nrows: usize,
    basis: Vec<usize>,
}

impl Tableau {
    #[inline]
    fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.width + c]
    }

    #[inline]
    fn rhs(&self, r: usize) -> f64 {
        self.data[r * self.width + self.width - 1]
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let w = self.width;
        let p = self.at(pr, pc);
        for c in 0..w {
            self.data[pr * w + c] /= p;
        }
        self.data[pr * w + pc] = 1.0;
        for r in 0..=self.nrows {
            if r == pr {
                continue;
            }
            let f = self.data[r * w + pc];
            if f == 0.0 {
                continue;
            }
            for c in 0..w {
                let v = self.data[pr * w + c];
                if v != 0.0 {
                    self.data[r * w + c] -= f * v;
                }
            }
            self.data[r * w + pc] = 0.0;
        }
        self.basis[pr] = pc;
    }

    /// Load `cost` into the objective row as reduced costs.
    fn set_objective(&mut self, cost: &[f64]) {
        let w = self.width;
        let obj = self.nrows;
        for c in 0..w {
            self.data[obj * w + c] = if c < cost.len() { cost[c] } else { 0.0 };
        }
        for r in 0..self.nrows {
            let cb = cost.get(self.basis[r]).copied().unwrap_or(0.0);
            if cb == 0.0 {
                continue;
            }
            for c in 0..w {
                self.data[obj * w + c] -= cb * self.data[r * w + c];
            }
        }
    }

    /// Bland's rule iterations over columns `0..eligible`.
    fn optimize(&mut self, eligible: usize, max_iter: usize) -> Result<bool, LpError> {
        let obj = self.nrows;
        for _ in 0..max_iter {
            let entering = (0..eligible).find(|&c| self.at(obj, c) < -COST_TOL);
            let Some(pc) = entering else {
                return Ok(true);
            };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.nrows {
                let a = self.at(r, pc);
                if a <= PIVOT_TOL {
                    continue;
                }
                let ratio = self.rhs(r).max(0.0) / a;
                leave = match leave {
                    None => Some((r, ratio)),
                    Some((br, best)) => {
                        let tie = (ratio - best).abs() <= 1e-12 * (1.0 + best.abs());
                        if ratio < best && !tie || tie && self.basis[r] < self.basis[br] {
                            Some((r, ratio))
                        } else {
                            Some((br, best))
                        }
                    }
                };
            }
            let Some((pr, _)) = leave else {
                return Ok(false);
            };
            self.pivot(pr, pc);
            if !self.rhs(obj).is_finite() {
                return Err(LpError::Numeric("objective overflow".into()));
            }
        }
        Err(LpError::IterationLimit(max_iter))
    }
}

fn run(lp: &LinearProgram, tol: f64, optimize: bool) -> Result<LpSolution, LpError> {
    if !(tol > 0.0) {
        return Err(LpError::Numeric(format!("tolerance must be positive, got {tol}")));
    }
    lp.validate()?;
    let n = lp.num_vars();
    let infeasible = || LpSolution {
        status: LpStatus::Infeasible,
        z: vec![f64::NAN; n],
        objective_value: f64::NAN,
    };
    let Some(sf) = StandardForm::build(lp, tol)? else {
        return Ok(infeasible());
    };

    let nrows = sf.rows.len();
    let nslack = sf.kinds.iter().filter(|k| **k == RowKind::Le).count();
    let mut needs_art = vec![false; nrows];
    for r in 0..nrows {
        needs_art[r] = sf.kinds[r] == RowKind::Eq || sf.rhs[r] < 0.0;
    }
    let nart = needs_art.iter().filter(|b| **b).count();
    let art_start = sf.ncols + nslack;
    let total = art_start + nart;
    let width = total + 1;

    let mut data = vec![0.0; (nrows + 1) * width];
    let mut basis = vec![0; nrows];
    let (mut next_slack, mut next_art) = (sf.ncols, art_start);
    for r in 0..nrows {
        let sign = if sf.rhs[r] < 0.0 { -1.0 } else { 1.0 };
        for c in 0..sf.ncols {
            data[r * width + c] = sign * sf.rows[r][c];
        }
        data[r * width + total] = sign * sf.rhs[r];
        if sf.kinds[r] == RowKind::Le {
            data[r * width + next_slack] = sign;
            if sign > 0.0 {
                basis[r] = next_slack;
            }
            next_slack += 1;
        }
        if needs_art[r] {
            data[r * width + next_art] = 1.0;
            basis[r] = next_art;
            next_art += 1;
        }
    }
    let mut tab = Tableau {
        data,
        width,
        nrows,
        basis,
    };
    let max_iter = 50_000 + 200 * (nrows + total);

    // Phase one.
    if nart > 0 {
        let mut cost = vec![0.0; total];
        cost[art_start..].iter_mut().for_each(|c| *c = 1.0);
        tab.set_objective(&cost);
        tab.optimize(total, max_iter)?;
        let infeas = -tab.rhs(nrows);
        if infeas > tol {
            return Ok(infeasible());
        }
        // Drive artificials out of the basis where possible; rows where this
        // fails are redundant and keep a zero-valued artificial.
        for r in 0..nrows {
            if tab.basis[r] < art_start {
                continue;
            }
            let col = (0..art_start)
                .filter(|&c| tab.at(r, c).abs() > 1e-9)
                .max_by(|&a, &b| tab.at(r, a).abs().total_cmp(&tab.at(r, b).abs()));
            if let Some(c) = col {
                tab.pivot(r, c);
            }
        }
    }

    let mut status = LpStatus::Optimal;
    if optimize {
        let mut cost = sf.cost.clone();
        cost.resize(total, 0.0);
        tab.set_objective(&cost);
        if !tab.optimize(art_start, max_iter)? {
            status = LpStatus::Unbounded;
        }
    }

    let mut w = vec![0.0; total];
    for r in 0..nrows {
        w[tab.basis[r]] = tab.rhs(r).max(0.0);
    }
    let z = sf.recover(&w[..sf.ncols]);
    if z.iter().any(|v| !v.is_finite()) {
        return Err(LpError::Numeric("non-finite primal values".into()));
    }
    let objective_value = lp.objective.iter().zip(&z).map(|(c, v)| c * v).sum();
    if status == LpStatus::Optimal {
        check_residuals(lp, &z, tol)?;
    }
    Ok(LpSolution {
        status,
        z,
        objective_value,
    })
}

fn check_residuals(lp: &LinearProgram, z: &[f64], tol: f64) -> Result<(), LpError> {
    let slack = |row: &[f64], b: f64| -> (f64, f64) {
        let lhs: f64 = row.iter().zip(z).map(|(a, v)| a * v).sum();
        let scale = row.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
        ((lhs - b) / scale, 1.0 + row.iter().zip(z).map(|(a, v)| (a * v).abs()).sum::<f64>() / scale)
    };
    let limit = |mag: f64| (1e3 * tol).max(1e-9 * mag);
    for (row, &b) in lp.eq_lhs.iter().zip(&lp.eq_rhs) {
        let (r, mag) = slack(row, b);
        if r.abs() > limit(mag) {
            return Err(LpError::Numeric(format!("equality residual {r:e}")));
        }
    }
    for (row, &b) in lp.ub_lhs.iter().zip(&lp.ub_rhs) {
        let (r, mag) = slack(row, b);
        if r > limit(mag) {
            return Err(LpError::Numeric(format!("inequality residual {r:e}")));
        }
    }
    Ok(())
}
