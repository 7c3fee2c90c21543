//! Scans, crossings, threshold tables and formula-consistency reports over
//! the closed-form spectra, in `f64`.

pub mod figures;
pub mod intersect;
pub mod report;
pub mod scan;
pub mod verify;

pub use figures::{all_figures, FigureData};
pub use intersect::{find_intersections, near_degeneracies, IntersectionRecord, NearDegeneracy};
pub use report::{
    approximation_error_report, consistency_report, threshold_map, ApproximationRow, ConsistencyReport,
    OracleSettings, RatioFit, Sample, ThresholdTable,
};
pub use scan::{
    alpha_scan, alpha_scan_levels, default_alpha_grid, default_dimension_grid, dimension_scan, parse_grid, Axis,
    imaginary_onset, CurveLabel, Formula, Level, ScanCurve, ScanPoint,
};
