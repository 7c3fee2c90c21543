use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::model::{mass_derivative, potential_derivative, Alignment, ModelParams, QuantumState};
use crate::oracle::{find_eigenvalues, CentrifugalMode, ShootingProblem};
use crate::spectra::{
    self, alpha_threshold, Branch, DeltaPolicy, EnergyResult, KgParams, PrincipalNumber, ThresholdKind,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdEntry {
    pub n: u32,
    pub dim: u32,
    /// `None` where `2n + D - 3 <= 0`.
    pub alpha: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdTable {
    pub kind: ThresholdKind,
    pub entries: Vec<ThresholdEntry>,
}

impl ThresholdTable {
    pub fn get(&self, n: u32, dim: u32) -> Option<f64> {
        self.entries.iter().find(|e| e.n == n && e.dim == dim).and_then(|e| e.alpha)
    }
}

/// `alpha_threshold` over `ns x dims`, row-major in `n`.
pub fn threshold_map(
    kind: ThresholdKind,
    ns: std::ops::RangeInclusive<u32>,
    dims: std::ops::RangeInclusive<u32>,
) -> ThresholdTable {
    let mut entries = Vec::new();
    for n in ns {
        for dim in dims.clone() {
            entries.push(ThresholdEntry {
                n,
                dim,
                alpha: alpha_threshold(kind, n, f64::from(dim)).ok(),
            });
        }
    }
    ThresholdTable { kind, entries }
}

/// States and screening values a report is evaluated over.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sample {
    pub n_r: Vec<u32>,
    pub ell: Vec<u32>,
    pub dims: Vec<u32>,
    pub alphas: Vec<f64>,
    pub alignment: Alignment,
}

impl Default for Sample {
    fn default() -> Self {
        Self {
            n_r: vec![0, 1, 2, 3],
            ell: vec![0, 1, 2],
            dims: vec![2, 3, 4, 5, 6],
            alphas: vec![0.05, 0.1, 0.2, 0.4],
            alignment: Alignment::Unaligned,
        }
    }
}

impl Sample {
    pub fn states(&self) -> Vec<QuantumState<f64>> {
        let mut out = Vec::new();
        for &d in &self.dims {
            for &l in &self.ell {
                for &n in &self.n_r {
                    if let Ok(s) = QuantumState::new(n, l, d, self.alignment) {
                        out.push(s);
                    }
                }
            }
        }
        out
    }
}

/// Least-squares constant `c` in `second = c * first` plus deviations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioFit {
    pub pairs: usize,
    pub skipped_imaginary: usize,
    pub skipped_invalid: usize,
    pub constant: Option<f64>,
    /// `max |second/first - c|`.
    pub max_ratio_deviation: Option<f64>,
    pub min_ratio: Option<f64>,
    pub max_ratio: Option<f64>,
    /// `max |second - first|`.
    pub max_difference: Option<f64>,
    /// Ratio constant to `1e-9` relative over every pair.
    pub constant_relation: bool,
}

#[derive(Default)]
struct RatioAcc {
    pairs: Vec<(f64, f64)>,
    imaginary: usize,
    invalid: usize,
}

impl RatioAcc {
    fn push(&mut self, first: Result<EnergyResult<f64>>, second: Result<EnergyResult<f64>>) {
        match (first, second) {
            (Ok(f), Ok(s)) => match (f.value(), s.value()) {
                (Some(f), Some(s)) => self.pairs.push((f, s)),
                _ => self.imaginary += 1,
            },
            _ => self.invalid += 1,
        }
    }

    fn fit(self) -> RatioFit {
        let pairs = self.pairs;
        let usable: Vec<_> = pairs.iter().copied().filter(|p| p.0 != 0.0).collect();
        let (num, den) = usable.iter().fold((0.0, 0.0), |(n, d), (f, s)| (n + f * s, d + f * f));
        let constant = (den > 0.0).then(|| num / den);
        let ratios: Vec<f64> = usable.iter().map(|(f, s)| s / f).collect();
        let max_dev = constant.map(|c| ratios.iter().fold(0.0f64, |m, r| m.max((r - c).abs())));
        let max_diff = (!pairs.is_empty()).then(|| pairs.iter().fold(0.0f64, |m, (f, s)| m.max((s - f).abs())));
        let min_ratio = ratios.iter().copied().reduce(f64::min);
        let max_ratio = ratios.iter().copied().reduce(f64::max);
        let constant_relation = match (constant, max_dev) {
            (Some(c), Some(d)) => d <= 1e-9 * c.abs().max(1e-300),
            _ => false,
        };
        RatioFit {
            pairs: pairs.len(),
            skipped_imaginary: self.imaginary,
            skipped_invalid: self.invalid,
            constant,
            max_ratio_deviation: max_dev,
            min_ratio,
            max_ratio,
            max_difference: max_diff,
            constant_relation,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InterpretedFit {
    pub interpretation: PrincipalNumber,
    pub fit: RatioFit,
}

/// Termination residual of the closed-form Dirac energies.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuantizationSummary {
    pub branch: Branch,
    pub evaluated: usize,
    pub skipped: usize,
    pub max_residual: Option<f64>,
    pub min_residual: Option<f64>,
    /// Same with `epsilon -> -epsilon`.
    pub max_reflected_residual: Option<f64>,
    pub below_1e9: usize,
    pub reflected_below_1e9: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoulombLimitSummary {
    pub alpha: f64,
    pub states: usize,
    pub max_relative_deviation: f64,
    pub worst_state: Option<(u32, u32, u32)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MassRelationSummary {
    /// `max |dmu/dr - dV/dr|` on the sample radii.
    pub max_difference_of_slopes: f64,
    /// `max |dmu/dr + dV/dr|`.
    pub max_sum_of_slopes: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyReport {
    pub sample: Sample,
    /// Klein-Gordon simplified over general formula (`Z = mu = 1`, lower root).
    pub kg: Vec<InterpretedFit>,
    /// Dirac simplified over general formula (`Z = mu0 = 1`, lower root).
    pub dirac: Vec<InterpretedFit>,
    pub quantization: Vec<QuantizationSummary>,
    pub coulomb_limit: CoulombLimitSummary,
    pub mass_relation: MassRelationSummary,
}

const INTERPRETATIONS: [PrincipalNumber; 2] = [PrincipalNumber::RadialPlusOrbital, PrincipalNumber::RadialPlusKappa];

/// Compares the claimed-equivalent formula pairs over `sample` at
/// `Z = mu = mu0 = 1`. Deterministic: evaluation order is fixed.
pub fn consistency_report(sample: &Sample) -> ConsistencyReport {
    let states = sample.states();
    let mut kg = Vec::new();
    let mut dirac = Vec::new();
    for interp in INTERPRETATIONS {
        let mut kg_acc = RatioAcc::default();
        let mut d_acc = RatioAcc::default();
        for s in &states {
            for &alpha in &sample.alphas {
                let Some(n) = interp.of(s) else {
                    kg_acc.invalid += 1;
                    d_acc.invalid += 1;
                    continue;
                };
                let kp = KgParams { z: 1.0, mu: 1.0, alpha };
                kg_acc.push(
                    Ok(spectra::kg_energy(s, &kp, Branch::Minus)),
                    spectra::kg_energy_simplified(n, s.dim(), alpha),
                );
                let p = ModelParams::new(1.0, alpha, 1.0).expect("positive sample alpha");
                d_acc.push(
                    Ok(spectra::dirac_energy(s, &p, Branch::Minus)),
                    spectra::dirac_energy_simplified(n, s.dim(), alpha),
                );
            }
        }
        kg.push(InterpretedFit { interpretation: interp, fit: kg_acc.fit() });
        dirac.push(InterpretedFit { interpretation: interp, fit: d_acc.fit() });
    }

    let quantization = [Branch::Minus, Branch::Plus]
        .into_iter()
        .map(|branch| {
            let mut res = Vec::new();
            let mut refl = Vec::new();
            let mut skipped = 0;
            for s in &states {
                for &alpha in &sample.alphas {
                    let p = ModelParams::new(1.0, alpha, 1.0).expect("positive sample alpha");
                    let Some(e) = spectra::dirac_energy(s, &p, branch).value() else {
                        skipped += 1;
                        continue;
                    };
                    match (
                        spectra::quantization_residual(e, s, &p, DeltaPolicy::Consistent),
                        spectra::reflected_quantization_residual(e, s, &p, DeltaPolicy::Consistent),
                    ) {
                        (Ok(r), Ok(q)) => {
                            res.push(r.abs());
                            refl.push(q.abs());
                        }
                        _ => skipped += 1,
                    }
                }
            }
            QuantizationSummary {
                branch,
                evaluated: res.len(),
                skipped,
                max_residual: res.iter().copied().reduce(f64::max),
                min_residual: res.iter().copied().reduce(f64::min),
                max_reflected_residual: refl.iter().copied().reduce(f64::max),
                below_1e9: res.iter().filter(|r| **r < 1e-9).count(),
                reflected_below_1e9: refl.iter().filter(|r| **r < 1e-9).count(),
            }
        })
        .collect();

    let coulomb_limit = coulomb_limit_summary(&states, 1e-8);

    let p = ModelParams::new(1.0, 1.0, 1.0).expect("unit parameters");
    let (mut diff, mut sum) = (0.0f64, 0.0f64);
    for i in 1..=200 {
        let r = 0.05 * f64::from(i);
        let dm = mass_derivative(r, &p).expect("r > 0");
        let dv = potential_derivative(r, &p).expect("r > 0");
        diff = diff.max((dm - dv).abs());
        sum = sum.max((dm + dv).abs());
    }

    ConsistencyReport {
        sample: sample.clone(),
        kg,
        dirac,
        quantization,
        coulomb_limit,
        mass_relation: MassRelationSummary {
            max_difference_of_slopes: diff,
            max_sum_of_slopes: sum,
        },
    }
}

/// Lower-branch Dirac energy at small `alpha` against the Coulomb-like limit.
pub fn coulomb_limit_summary(states: &[QuantumState<f64>], alpha: f64) -> CoulombLimitSummary {
    let mut max = 0.0f64;
    let mut worst = None;
    for s in states {
        let p = ModelParams::new(1.0, alpha, 1.0).expect("positive alpha");
        let reference = spectra::coulomb_limit_energy(s, 1.0, 1.0);
        let dev = match spectra::dirac_energy(s, &p, Branch::Minus).value() {
            Some(e) => ((e - reference) / reference).abs(),
            None => f64::INFINITY,
        };
        if worst.is_none() || dev > max {
            max = dev;
            worst = Some((s.n_r(), s.ell(), s.dim() as u32));
        }
    }
    CoulombLimitSummary {
        alpha,
        states: states.len(),
        max_relative_deviation: max,
        worst_state: worst,
    }
}

/// One state at one screening value: closed form against both shooting modes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApproximationRow {
    pub n_r: u32,
    pub ell: u32,
    pub dim: u32,
    pub kappa: f64,
    pub alpha: f64,
    pub e_closed_form: EnergyResult<f64>,
    pub e_oracle_approx: Option<f64>,
    pub e_oracle_exact: Option<f64>,
    /// `|E_closed - E_oracle_approx|`.
    pub gap_approx: Option<f64>,
    /// `|E_closed - E_oracle_exact|`.
    pub gap_exact: Option<f64>,
    pub diagnostic: Option<String>,
}

/// Oracle options for [`approximation_error_report`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleSettings {
    pub scan_points: usize,
    pub rtol: f64,
    pub approximated: bool,
    pub exact: bool,
}

impl Default for OracleSettings {
    fn default() -> Self {
        Self {
            scan_points: ShootingProblem::<f64>::DEFAULT_SCAN_POINTS,
            rtol: 1e-10,
            approximated: true,
            exact: true,
        }
    }
}

impl OracleSettings {
    pub fn only(mode: CentrifugalMode) -> Self {
        Self {
            approximated: mode == CentrifugalMode::Approximated,
            exact: mode == CentrifugalMode::Exact,
            ..Self::default()
        }
    }
}

/// Oracle eigenvalue with `n_r` nodes, or a diagnostic.
pub fn oracle_level(
    state: &QuantumState<f64>,
    p: &ModelParams<f64>,
    mode: CentrifugalMode,
    settings: &OracleSettings,
) -> std::result::Result<f64, String> {
    let problem = ShootingProblem::new(*state, *p, mode)
        .with_scan_points(settings.scan_points)
        .with_rtol(settings.rtol);
    let search = find_eigenvalues(&problem, usize::MAX).map_err(|e| format!("{mode:?}: {e}"))?;
    match search.with_nodes(state.n_r() as usize) {
        Some(pair) => pair.energy.value().ok_or_else(|| "imaginary oracle value".into()),
        None => Err(format!(
            "{}: no eigenvalue with {} nodes in ({:.6}, {:.6}); {} found, {} failed shots",
            match mode {
                CentrifugalMode::Approximated => "approximated",
                CentrifugalMode::Exact => "exact",
            },
            state.n_r(),
            problem.window.0,
            problem.window.1,
            search.eigenvalues.len(),
            search.failed_shots
        )),
    }
}

/// Closed-form energies against the approximated-equation and
/// exact-centrifugal oracles for each state and `alpha` (parallel, ordered
/// output).
pub fn approximation_error_report(
    states: &[QuantumState<f64>],
    alphas: &[f64],
    settings: &OracleSettings,
) -> Result<Vec<ApproximationRow>> {
    let cells: Vec<(QuantumState<f64>, f64)> =
        states.iter().flat_map(|s| alphas.iter().map(move |a| (*s, *a))).collect();
    cells
        .par_iter()
        .map(|(s, alpha)| {
            let p = ModelParams::new(1.0, *alpha, 1.0)?;
            let closed = spectra::dirac_energy(s, &p, Branch::Minus);
            let run = |on: bool, mode| {
                if on {
                    oracle_level(s, &p, mode, settings)
                } else {
                    Err("not requested".to_string())
                }
            };
            let approx = run(settings.approximated, CentrifugalMode::Approximated);
            let exact = run(settings.exact, CentrifugalMode::Exact);
            let gap = |o: &std::result::Result<f64, String>| match (closed.value(), o) {
                (Some(c), Ok(v)) => Some((c - v).abs()),
                _ => None,
            };
            let mut notes = Vec::new();
            if !closed.is_real() {
                notes.push("closed form imaginary".to_string());
            }
            for (on, o) in [(settings.approximated, &approx), (settings.exact, &exact)] {
                if let (true, Err(e)) = (on, o) {
                    notes.push(e.clone());
                }
            }
            Ok(ApproximationRow {
                n_r: s.n_r(),
                ell: s.ell(),
                dim: s.dim() as u32,
                kappa: s.kappa(),
                alpha: *alpha,
                e_closed_form: closed,
                gap_approx: gap(&approx),
                gap_exact: gap(&exact),
                e_oracle_approx: approx.ok(),
                e_oracle_exact: exact.ok(),
                diagnostic: (!notes.is_empty()).then(|| notes.join("; ")),
            })
        })
        .collect()
}
