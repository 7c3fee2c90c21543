use serde::Serialize;

use super::scan::{Axis, CurveLabel, ScanCurve};
use crate::error::{Error, Result};

/// Bisection stops once the bracket is this narrow in the scan variable.
pub const CROSSING_TOLERANCE: f64 = 1e-10;
/// A refined crossing is accepted when the energies agree this closely.
pub const VERIFY_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntersectionRecord {
    pub first: CurveLabel,
    pub second: CurveLabel,
    pub axis: Axis,
    /// Crossing abscissa (`alpha*` on an alpha scan).
    pub x_star: f64,
    pub energy: f64,
    /// `|E_first - E_second|` re-evaluated at `x_star`.
    pub gap: f64,
    pub tolerance: f64,
    pub verified: bool,
}

fn difference(a: &CurveLabel, b: &CurveLabel, axis: Axis, x: f64) -> Option<(f64, f64)> {
    let ea = a.energy_at(axis, x).ok()?.value()?;
    let eb = b.energy_at(axis, x).ok()?.value()?;
    Some((ea - eb, ea))
}

/// Sign changes of `E_a - E_b` on the real-status overlap of two curves
/// sharing an axis, refined by bisection.
///
/// Identical curves (and curves whose difference vanishes at every common
/// real point) are rejected as degenerate input.
pub fn find_intersections(a: &ScanCurve, b: &ScanCurve) -> Result<Vec<IntersectionRecord>> {
    if a.axis != b.axis {
        return Err(Error::Parameter("curves are scanned along different axes".into()));
    }
    if a.label == b.label {
        return Err(Error::DegenerateInput(format!("identical curves ({})", a.label.describe())));
    }
    let axis = a.axis;
    let (lo_b, hi_b) = match (b.points.first(), b.points.last()) {
        (Some(f), Some(l)) => (f.x, l.x),
        _ => return Ok(Vec::new()),
    };
    // Differences at a's abscissae inside b's range, both real.
    let samples: Vec<(f64, f64, f64)> = a
        .points
        .iter()
        .filter(|p| p.x >= lo_b && p.x <= hi_b)
        .filter_map(|p| {
            let ea = p.energy.value()?;
            let (d, _) = difference(&a.label, &b.label, axis, p.x)?;
            Some((p.x, d, ea))
        })
        .collect();
    if samples.is_empty() {
        return Ok(Vec::new());
    }
    if samples.iter().all(|s| s.1 == 0.0) {
        return Err(Error::DegenerateInput(format!(
            "{} and {} coincide on their whole overlap",
            a.label.describe(),
            b.label.describe()
        )));
    }

    let mut out = Vec::new();
    let mut push = |x: f64| {
        if let Some((gap, e)) = difference(&a.label, &b.label, axis, x) {
            out.push(IntersectionRecord {
                first: a.label,
                second: b.label,
                axis,
                x_star: x,
                energy: e,
                gap: gap.abs(),
                tolerance: CROSSING_TOLERANCE,
                verified: gap.abs() < VERIFY_TOLERANCE,
            });
        }
    };
    for w in samples.windows(2) {
        let (x0, d0, _) = w[0];
        let (x1, d1, _) = w[1];
        if d0 == 0.0 {
            push(x0);
            continue;
        }
        if d1 == 0.0 || d0.signum() == d1.signum() {
            continue;
        }
        // The real-status overlap must be contiguous across the bracket.
        let (mut lo, mut hi, mut dlo) = (x0, x1, d0);
        let mut ok = true;
        while hi - lo > CROSSING_TOLERANCE * (1.0 + lo.abs()) {
            let mid = 0.5 * (lo + hi);
            match difference(&a.label, &b.label, axis, mid) {
                Some((dm, _)) if dm == 0.0 => {
                    lo = mid;
                    hi = mid;
                }
                Some((dm, _)) if dm.signum() == dlo.signum() => {
                    lo = mid;
                    dlo = dm;
                }
                Some(_) => hi = mid,
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            push(0.5 * (lo + hi));
        }
    }
    if let Some(&(x, d, _)) = samples.last() {
        if d == 0.0 && samples.len() > 1 {
            push(x);
        }
    }
    Ok(out)
}

/// Smallest gap between two curves at common real-status abscissae.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NearDegeneracy {
    pub first: CurveLabel,
    pub second: CurveLabel,
    pub x: f64,
    pub gap: f64,
}

/// Pairs of curves whose closest approach on a shared grid is below `tol`.
pub fn near_degeneracies(curves: &[ScanCurve], tol: f64) -> Vec<NearDegeneracy> {
    let mut out = Vec::new();
    for (i, a) in curves.iter().enumerate() {
        for b in &curves[i + 1..] {
            if a.axis != b.axis || a.points.len() != b.points.len() {
                continue;
            }
            let best = a
                .points
                .iter()
                .zip(&b.points)
                .filter(|(p, q)| p.x == q.x)
                .filter_map(|(p, q)| Some((p.x, (p.energy.value()? - q.energy.value()?).abs())))
                .min_by(|u, v| u.1.total_cmp(&v.1));
            if let Some((x, gap)) = best {
                if gap < tol {
                    out.push(NearDegeneracy {
                        first: a.label,
                        second: b.label,
                        x,
                        gap,
                    });
                }
            }
        }
    }
    out
}
