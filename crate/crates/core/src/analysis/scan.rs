use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Alignment, ModelParams, QuantumState};
use crate::spectra::{self, Branch, EnergyResult, KgParams};

/// Closed-form energy expression a curve is drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Formula {
    /// Dirac energy with position-dependent mass.
    Dirac,
    /// Klein-Gordon energy for equal vector and scalar potentials.
    KleinGordon,
    /// Klein-Gordon energy at `Z = mu = 1` in terms of `(n, D)`.
    KleinGordonSimplified,
    /// Dirac energy at `Z = mu0 = 1` in terms of `(n, D)`.
    DiracSimplified,
}

impl Formula {
    pub fn name(self) -> &'static str {
        match self {
            Formula::Dirac => "dirac",
            Formula::KleinGordon => "kg",
            Formula::KleinGordonSimplified => "kg-simplified",
            Formula::DiracSimplified => "dirac-simplified",
        }
    }

    /// True for the `(n, D)` formulas.
    pub fn is_simplified(self) -> bool {
        matches!(self, Formula::KleinGordonSimplified | Formula::DiracSimplified)
    }
}

impl std::str::FromStr for Formula {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "dirac" => Ok(Formula::Dirac),
            "kg" | "klein-gordon" => Ok(Formula::KleinGordon),
            "kg-simplified" | "kg-simple" => Ok(Formula::KleinGordonSimplified),
            "dirac-simplified" | "dirac-simple" => Ok(Formula::DiracSimplified),
            other => Err(Error::Parameter(format!("unknown formula '{other}'"))),
        }
    }
}

impl std::fmt::Display for Formula {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Alpha,
    Dimension,
}

/// Level selector: a full state for the Dirac/KG formulas, `(n, D)` for the
/// simplified ones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Level {
    State {
        n_r: u32,
        ell: u32,
        dim: f64,
        alignment: Alignment,
    },
    Principal {
        n: u32,
        dim: f64,
    },
}

impl Level {
    pub fn state(n_r: u32, ell: u32, dim: f64, alignment: Alignment) -> Self {
        Level::State { n_r, ell, dim, alignment }
    }

    pub fn principal(n: u32, dim: f64) -> Self {
        Level::Principal { n, dim }
    }

    pub fn dim(&self) -> f64 {
        match *self {
            Level::State { dim, .. } | Level::Principal { dim, .. } => dim,
        }
    }

    pub fn with_dim(self, dim: f64) -> Self {
        match self {
            Level::State { n_r, ell, alignment, .. } => Level::State { n_r, ell, dim, alignment },
            Level::Principal { n, .. } => Level::Principal { n, dim },
        }
    }

    /// Quantum state, continuous in `D` when `D` is not an integer.
    pub fn to_state(&self) -> Result<QuantumState<f64>> {
        match *self {
            Level::State { n_r, ell, dim, alignment } => {
                if dim.fract() == 0.0 && dim >= 1.0 && dim <= f64::from(u32::MAX) {
                    QuantumState::new(n_r, ell, dim as u32, alignment)
                } else {
                    QuantumState::continuous(n_r, ell, dim, alignment)
                }
            }
            Level::Principal { .. } => Err(Error::InvalidState(
                "a principal-number level has no (n_r, ell) decomposition".into(),
            )),
        }
    }
}

/// Everything needed to re-evaluate a curve at an arbitrary abscissa.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurveLabel {
    pub formula: Formula,
    pub level: Level,
    pub branch: Branch,
    pub z: f64,
    pub mu0: f64,
    /// Screening value held fixed along a dimension scan.
    pub alpha: Option<f64>,
}

impl CurveLabel {
    pub fn new(formula: Formula, level: Level) -> Self {
        Self {
            formula,
            level,
            branch: Branch::Minus,
            z: 1.0,
            mu0: 1.0,
            alpha: None,
        }
    }

    pub fn with_branch(mut self, branch: Branch) -> Self {
        self.branch = branch;
        self
    }

    pub fn with_coupling(mut self, z: f64, mu0: f64) -> Self {
        self.z = z;
        self.mu0 = mu0;
        self
    }

    /// Energy at screening `alpha` and the level's dimension.
    pub fn energy_at_alpha(&self, alpha: f64) -> Result<EnergyResult<f64>> {
        evaluate(self.formula, &self.level, alpha, self.branch, self.z, self.mu0)
    }

    /// Energy along `axis` at abscissa `x`.
    pub fn energy_at(&self, axis: Axis, x: f64) -> Result<EnergyResult<f64>> {
        match axis {
            Axis::Alpha => self.energy_at_alpha(x),
            Axis::Dimension => {
                let alpha = self
                    .alpha
                    .ok_or_else(|| Error::Parameter("dimension curve without a fixed alpha".into()))?;
                evaluate(self.formula, &self.level.with_dim(x), alpha, self.branch, self.z, self.mu0)
            }
        }
    }

    pub fn describe(&self) -> String {
        let lvl = match self.level {
            Level::State { n_r, ell, dim, alignment } => format!("n_r={n_r} l={ell} D={dim} {alignment}"),
            Level::Principal { n, dim } => format!("n={n} D={dim}"),
        };
        format!("{} {lvl}", self.formula)
    }
}

pub fn evaluate(formula: Formula, level: &Level, alpha: f64, branch: Branch, z: f64, mu0: f64) -> Result<EnergyResult<f64>> {
    match (formula, *level) {
        (Formula::KleinGordonSimplified, Level::Principal { n, dim }) => spectra::kg_energy_simplified(n, dim, alpha),
        (Formula::DiracSimplified, Level::Principal { n, dim }) => spectra::dirac_energy_simplified(n, dim, alpha),
        (Formula::Dirac, lvl @ Level::State { .. }) => {
            let p = ModelParams::new(z, alpha, mu0)?;
            Ok(spectra::dirac_energy(&lvl.to_state()?, &p, branch))
        }
        (Formula::KleinGordon, lvl @ Level::State { .. }) => {
            if !(alpha > 0.0) {
                return Err(Error::domain("alpha must be > 0", alpha));
            }
            let p = KgParams { z, mu: mu0, alpha };
            Ok(spectra::kg_energy(&lvl.to_state()?, &p, branch))
        }
        (f, _) => Err(Error::Parameter(format!(
            "formula '{f}' needs a {} level",
            if f.is_simplified() { "principal-number" } else { "full-state" }
        ))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanPoint {
    pub x: f64,
    pub energy: EnergyResult<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanCurve {
    pub label: CurveLabel,
    pub axis: Axis,
    pub points: Vec<ScanPoint>,
}

impl ScanCurve {
    /// `(x, E)` for the real-status points.
    pub fn real_points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.points.iter().filter_map(|p| p.energy.value().map(|e| (p.x, e)))
    }

    /// Largest abscissa of the leading run of real-status points.
    pub fn real_prefix_end(&self) -> Option<f64> {
        self.points.iter().take_while(|p| p.energy.is_real()).last().map(|p| p.x)
    }

    /// Real-status points form one leading run.
    pub fn status_is_prefix(&self) -> bool {
        let first_imag = self.points.iter().position(|p| !p.energy.is_real());
        match first_imag {
            None => true,
            Some(i) => self.points[i..].iter().all(|p| !p.energy.is_real()),
        }
    }
}

fn check_grid(grid: &[f64], what: &str) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Parameter(format!("empty {what} grid")));
    }
    if grid.iter().any(|x| !x.is_finite()) {
        return Err(Error::Parameter(format!("non-finite value in {what} grid")));
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Parameter(format!("{what} grid must be strictly increasing")));
    }
    Ok(())
}

fn scan_curve(label: CurveLabel, axis: Axis, grid: &[f64]) -> Result<ScanCurve> {
    let points = grid
        .par_iter()
        .map(|&x| label.energy_at(axis, x).map(|energy| ScanPoint { x, energy }))
        .collect::<Result<Vec<_>>>()?;
    Ok(ScanCurve { label, axis, points })
}

/// One curve per label over a strictly increasing `alpha` grid.
pub fn alpha_scan(labels: &[CurveLabel], alphas: &[f64]) -> Result<Vec<ScanCurve>> {
    check_grid(alphas, "alpha")?;
    if alphas[0] <= 0.0 {
        return Err(Error::domain("alpha grid must be positive", alphas[0]));
    }
    labels.iter().map(|l| scan_curve(*l, Axis::Alpha, alphas)).collect()
}

/// Convenience form of [`alpha_scan`] for one formula over several levels.
pub fn alpha_scan_levels(formula: Formula, levels: &[Level], alphas: &[f64]) -> Result<Vec<ScanCurve>> {
    let labels: Vec<_> = levels.iter().map(|l| CurveLabel::new(formula, *l)).collect();
    alpha_scan(&labels, alphas)
}

/// Continuous-`D` curves at fixed `alpha`. For the simplified formulas each
/// `n` is a principal number; for the others it is `n_r` with `ell = 0`
/// (unaligned).
pub fn dimension_scan(formula: Formula, ns: &[u32], alpha: f64, dims: &[f64]) -> Result<Vec<ScanCurve>> {
    check_grid(dims, "dimension")?;
    if dims[0] <= 0.0 {
        return Err(Error::domain("dimension grid must be positive", dims[0]));
    }
    ns.iter()
        .map(|&n| {
            let level = if formula.is_simplified() {
                Level::principal(n, dims[0])
            } else {
                Level::state(n, 0, dims[0], Alignment::Unaligned)
            };
            let mut label = CurveLabel::new(formula, level);
            label.alpha = Some(alpha);
            scan_curve(label, Axis::Dimension, dims)
        })
        .collect()
}

/// `points` log-spaced values on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo) || points < 2 {
        return Err(Error::Parameter(format!("bad log grid [{lo}, {hi}] with {points} points")));
    }
    let (a, b) = (lo.ln(), hi.ln());
    let mut g: Vec<f64> = (0..points)
        .map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp())
        .collect();
    g[0] = lo;
    g[points - 1] = hi;
    Ok(g)
}

/// `points` evenly spaced values on `[lo, hi]`.
pub fn linear_grid(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>> {
    if !(hi > lo) || points < 2 {
        if points == 1 && lo.is_finite() {
            return Ok(vec![lo]);
        }
        return Err(Error::Parameter(format!("bad grid [{lo}, {hi}] with {points} points")));
    }
    Ok((0..points).map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64).collect())
}

/// 512 log-spaced values on `[1e-3, 1.5]`.
pub fn default_alpha_grid() -> Vec<f64> {
    log_grid(1e-3, 1.5, 512).expect("valid default grid")
}

/// 256 values on `[2, 12]`.
pub fn default_dimension_grid() -> Vec<f64> {
    linear_grid(2.0, 12.0, 256).expect("valid default grid")
}

/// Parses `lo:hi:count[:log|lin]`, or a comma-separated list.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let spec = spec.trim();
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if !(3..=4).contains(&parts.len()) {
            return Err(Error::Parameter(format!("grid '{spec}' is not lo:hi:count[:log|lin]")));
        }
        let num = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parameter(format!("bad number '{s}' in grid '{spec}'")))
        };
        let lo = num(parts[0])?;
        let hi = num(parts[1])?;
        let count: usize = parts[2]
            .trim()
            .parse()
            .map_err(|_| Error::Parameter(format!("bad count '{}' in grid '{spec}'", parts[2])))?;
        match parts.get(3).map(|s| s.trim()) {
            None | Some("lin") => linear_grid(lo, hi, count),
            Some("log") => log_grid(lo, hi, count),
            Some(other) => Err(Error::Parameter(format!("unknown grid spacing '{other}'"))),
        }
    } else {
        let g = spec
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Parameter(format!("bad number '{s}' in grid '{spec}'")))
            })
            .collect::<Result<Vec<_>>>()?;
        check_grid(&g, "list")?;
        Ok(g)
    }
}

/// Smallest `alpha` in `[lo, hi]` at which the curve's energy turns
/// imaginary, located by a log scan and bisection; `None` if it stays real.
pub fn imaginary_onset(label: &CurveLabel, lo: f64, hi: f64) -> Option<f64> {
    let is_real = |a: f64| label.energy_at_alpha(a).map(|e| e.is_real()).unwrap_or(false);
    let grid = log_grid(lo, hi, 400).ok()?;
    if !is_real(grid[0]) {
        return Some(grid[0]);
    }
    let i = grid.iter().position(|&a| !is_real(a))?;
    let (mut a, mut b) = (grid[i - 1], grid[i]);
    while b - a > 1e-13 * b {
        let m = 0.5 * (a + b);
        if is_real(m) {
            a = m;
        } else {
            b = m;
        }
    }
    Some(b)
}
