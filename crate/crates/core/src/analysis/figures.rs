use serde::Serialize;

use super::scan::{alpha_scan_levels, default_alpha_grid, default_dimension_grid, dimension_scan, Formula, Level, ScanCurve};
use crate::error::Result;

/// Curve set behind one of the four spectrum figures.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FigureData {
    pub name: &'static str,
    pub title: &'static str,
    pub x_label: &'static str,
    pub y_label: &'static str,
    pub curves: Vec<ScanCurve>,
}

fn principal_levels(ns: &[u32], dims: &[u32]) -> Vec<Level> {
    ns.iter()
        .flat_map(|&n| dims.iter().map(move |&d| Level::principal(n, f64::from(d))))
        .collect()
}

/// Klein-Gordon energy against alpha, `n = 1..3`, `D = 2..5`.
pub fn fig1(alphas: Option<&[f64]>) -> Result<FigureData> {
    let grid = alphas.map(<[f64]>::to_vec).unwrap_or_else(default_alpha_grid);
    Ok(FigureData {
        name: "fig1",
        title: "Klein-Gordon-Hulthen energy against alpha",
        x_label: "alpha",
        y_label: "E",
        curves: alpha_scan_levels(Formula::KleinGordonSimplified, &principal_levels(&[1, 2, 3], &[2, 3, 4, 5]), &grid)?,
    })
}

/// Dirac energy against alpha, `n = 1..3`, `D = 2..5`.
pub fn fig2(alphas: Option<&[f64]>) -> Result<FigureData> {
    let grid = alphas.map(<[f64]>::to_vec).unwrap_or_else(default_alpha_grid);
    Ok(FigureData {
        name: "fig2",
        title: "Dirac-Hulthen energy against alpha",
        x_label: "alpha",
        y_label: "E",
        curves: alpha_scan_levels(Formula::DiracSimplified, &principal_levels(&[1, 2, 3], &[2, 3, 4, 5]), &grid)?,
    })
}

/// Klein-Gordon energy against continuous D for `n = 3, 4, 5` at `alpha`.
pub fn fig3(alpha: f64, dims: Option<&[f64]>) -> Result<FigureData> {
    let grid = dims.map(<[f64]>::to_vec).unwrap_or_else(default_dimension_grid);
    Ok(FigureData {
        name: "fig3",
        title: "Klein-Gordon-Hulthen energy against D",
        x_label: "D",
        y_label: "E",
        curves: dimension_scan(Formula::KleinGordonSimplified, &[3, 4, 5], alpha, &grid)?,
    })
}

/// Dirac energy against continuous D for `n = 1..4` at `alpha`.
pub fn fig4(alpha: f64, dims: Option<&[f64]>) -> Result<FigureData> {
    let grid = dims.map(<[f64]>::to_vec).unwrap_or_else(default_dimension_grid);
    Ok(FigureData {
        name: "fig4",
        title: "Dirac-Hulthen energy against D",
        x_label: "D",
        y_label: "E",
        curves: dimension_scan(Formula::DiracSimplified, &[1, 2, 3, 4], alpha, &grid)?,
    })
}

pub const FIG3_ALPHA: f64 = 1e-6;
pub const FIG4_ALPHA: f64 = 0.1;

pub fn all_figures() -> Result<Vec<FigureData>> {
    Ok(vec![fig1(None)?, fig2(None)?, fig3(FIG3_ALPHA, None)?, fig4(FIG4_ALPHA, None)?])
}
