//! Shooting eigensolver for the upper-component radial equation.
//!
//! Two equations are available:
//!
//! * [`CentrifugalMode::Approximated`] integrates the transformed equation
//!   `F'' + F'/s - [kappa(kappa+1)/(s(1-s)^2) + eps^2/s^2 + (beta1+beta2)/(s(1-s))] F = 0`
//!   with `epsilon`, `beta1`, `beta2` taken from [`spectra::epsilon_beta`].
//! * [`CentrifugalMode::Exact`] integrates the second-order radial equation in
//!   `r` with the exact `kappa(kappa+1)/r^2` term and the product
//!   `[mu(r) + E - V(r)][mu(r) - E + V(r)]` built from the model functions.
//!
//! Both are integrated in the log variable `x = alpha r = -ln s`, where the
//! equations are free of the `1/s^2` stiffness at `s -> 0`. The energy enters
//! non-linearly, so each trial energy is one full shot and the eigenvalue
//! search is a scalar root-find on the matching mismatch.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{mass_unchecked, potential_unchecked, ModelParams, QuantumState};
use crate::ode::{Dopri, Endpoint};
use crate::real::Real;
use crate::spectra::{self, regular_exponent, Branch, DeltaPolicy, EnergyResult, EnergySource};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CentrifugalMode {
    Approximated,
    Exact,
}

/// Mismatch of the inward and outward solutions at the matching point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Mismatch<T> {
    /// `F'/F` (outward) minus `F'/F` (inward), derivatives in `r`. Has poles
    /// where either solution vanishes at the matching point.
    pub log_derivative: T,
    /// Wronskian of the two solutions divided by the norms of their
    /// `(F, F')` vectors: continuous in `E`, zero exactly at eigenvalues.
    pub wronskian: T,
    /// Nodes of the outward solution inside the matching point plus nodes of
    /// the inward solution outside it.
    pub nodes: usize,
}

/// Shoots `F'' = q(x) F` from both ends to `x_match`.
///
/// `inner` and `outer` give the start point and `(F, F')` there.
pub fn shoot_linear<T: Real, Q: Fn(T) -> T>(
    q: Q,
    inner: (T, [T; 2]),
    outer: (T, [T; 2]),
    x_match: T,
    solver: &Dopri<T>,
) -> Result<Mismatch<T>> {
    if !(inner.0 < x_match && x_match < outer.0) {
        return Err(Error::Parameter(format!(
            "matching point {} outside ({}, {})",
            x_match, inner.0, outer.0
        )));
    }
    let out = solver.linear(&q, inner.0, inner.1, x_match)?;
    let inw = solver.linear(&q, outer.0, outer.1, x_match)?;
    Ok(compare(&out, &inw))
}

fn compare<T: Real>(out: &Endpoint<T>, inw: &Endpoint<T>) -> Mismatch<T> {
    let (a, b) = (out.y, inw.y);
    let na = (a[0] * a[0] + a[1] * a[1]).sqrt();
    let nb = (b[0] * b[0] + b[1] * b[1]).sqrt();
    Mismatch {
        log_derivative: out.log_derivative() - inw.log_derivative(),
        wronskian: (a[0] * b[1] - a[1] * b[0]) / (na * nb),
        nodes: out.sign_changes + inw.sign_changes,
    }
}

/// Everything needed to search one state's spectrum numerically.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShootingProblem<T> {
    pub state: QuantumState<T>,
    pub params: ModelParams<T>,
    pub mode: CentrifugalMode,
    /// Energy window `(E_lo, E_hi)` scanned for sign changes.
    pub window: (T, T),
    pub scan_points: usize,
    /// Matching radius `r_m`.
    pub matching_radius: T,
    /// Start offset: the outer start sits at `s = s0`, the inner one at
    /// `1 - s = s0`.
    pub start_offset: T,
    pub rtol: T,
    /// Absolute bisection tolerance on the energy.
    pub energy_tol: T,
}

impl<T: Real> ShootingProblem<T> {
    pub const DEFAULT_SCAN_POINTS: usize = 400;

    /// Defaults: window `±0.999 (mu0 + Z alpha)`, 400 scan points,
    /// `r_m = 1/alpha`, `s0 = 1e-8`, relative tolerance `1e-10`, energy
    /// tolerance `1e-10`.
    pub fn new(state: QuantumState<T>, params: ModelParams<T>, mode: CentrifugalMode) -> Self {
        let edge = T::lit(0.999) * params.asymptotic_mass();
        Self {
            state,
            params,
            mode,
            window: (-edge, edge),
            scan_points: Self::DEFAULT_SCAN_POINTS,
            matching_radius: params.alpha().recip(),
            start_offset: T::lit(1e-8),
            rtol: T::lit(1e-10),
            energy_tol: T::lit(1e-10),
        }
    }

    pub fn with_window(mut self, lo: T, hi: T) -> Self {
        self.window = (lo, hi);
        self
    }

    pub fn with_scan_points(mut self, n: usize) -> Self {
        self.scan_points = n;
        self
    }

    pub fn with_rtol(mut self, rtol: T) -> Self {
        self.rtol = rtol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.window;
        if !(lo < hi) {
            return Err(Error::Parameter(format!("energy window must satisfy E_lo < E_hi ({lo}, {hi})")));
        }
        if self.scan_points < 2 {
            return Err(Error::Parameter("need at least 2 scan points".into()));
        }
        if !(self.start_offset > T::zero() && self.start_offset < T::lit(0.1)) {
            return Err(Error::Parameter("start offset must lie in (0, 0.1)".into()));
        }
        let x_m = self.params.alpha() * self.matching_radius;
        let (x_in, x_out) = (self.inner_x(), self.outer_x_base());
        if !(x_in < x_m && x_m < x_out) {
            return Err(Error::Parameter(format!(
                "matching radius {} outside the integration range",
                self.matching_radius
            )));
        }
        Ok(())
    }

    fn solver(&self) -> Dopri<T> {
        Dopri::with_rtol(self.rtol)
    }

    /// `x` at `1 - s = s0`.
    fn inner_x(&self) -> T {
        -(-self.start_offset).ln_1p()
    }

    /// `x` at `s = s0`.
    fn outer_x_base(&self) -> T {
        -self.start_offset.ln()
    }

    /// Matching mismatch at a trial energy.
    pub fn mismatch(&self, energy: T) -> Result<Mismatch<T>> {
        self.validate()?;
        match self.mode {
            CentrifugalMode::Approximated => self.shoot_transformed(energy),
            CentrifugalMode::Exact => self.shoot_exact(energy),
        }
    }

    fn shoot_transformed(&self, energy: T) -> Result<Mismatch<T>> {
        let aux = spectra::epsilon_beta(energy, &self.state, &self.params, DeltaPolicy::Literal);
        let eps = aux.require_epsilon()?;
        let kappa = self.state.kappa();
        let ll = kappa * (kappa + T::one());
        let coupling = aux.coupling();
        let eps2 = aux.epsilon_sq;
        let q = move |x: T| {
            let s = (-x).exp();
            let oms = -(-x).exp_m1();
            ll * s / (oms * oms) + eps2 + coupling * s / oms
        };

        // s -> 1: F ~ x^g (1 + c x), centrifugal ~ L/x^2, coupling ~ A/x.
        let x0 = self.inner_x();
        let inner = frobenius_start(x0, regular_exponent(kappa), coupling);

        // s -> 0: F ~ s^eps (1 + c s).
        let x1 = self.outer_x_base();
        let s1 = self.start_offset;
        let c = (ll + coupling) / (T::two() * eps + T::one());
        let outer = (x1, [T::one() + c * s1, -eps - c * (eps + T::one()) * s1]);

        let x_m = self.params.alpha() * self.matching_radius;
        let mut m = shoot_linear(q, inner, outer, x_m, &self.solver())?;
        m.log_derivative = m.log_derivative * self.params.alpha();
        Ok(m)
    }

    fn shoot_exact(&self, energy: T) -> Result<Mismatch<T>> {
        let p = self.params;
        let alpha = p.alpha();
        let aux = spectra::epsilon_beta(energy, &self.state, &p, DeltaPolicy::Literal);
        let eps = aux.require_epsilon()?;
        let kappa = self.state.kappa();
        let ll = kappa * (kappa + T::one());
        let a2 = alpha * alpha;
        let q = move |x: T| {
            let r = x / alpha;
            let mu = mass_unchecked(r, &p);
            let v = potential_unchecked(r, &p);
            ll / (x * x) + (mu + energy - v) * (mu - energy + v) / a2
        };

        // r -> 0: mu + E - V ~ 2 Z / r, so the 1/x coefficient is
        // 2 Z (mu0 + Z alpha - E) / alpha.
        let x0 = self.inner_x();
        let b = T::two() * p.z() * (p.asymptotic_mass() - energy) / alpha;
        let inner = frobenius_start(x0, regular_exponent(kappa), b);

        // The exact centrifugal tail is a power law, so start further out when
        // the decay is slow and use the WKB log-derivative.
        let x_m = alpha * self.matching_radius;
        let reach = T::lit(40.0) / eps.max(T::lit(0.05));
        let x1 = self.outer_x_base().max(x_m + reach).min(T::lit(5000.0));
        let outer = (x1, [T::one(), wkb_log_derivative(&q, x1)]);

        let mut m = shoot_linear(q, inner, outer, x_m, &self.solver())?;
        m.log_derivative = m.log_derivative * alpha;
        Ok(m)
    }
}

/// Two-term start `x^g (1 + c x)` for `F'' = (g(g-1)/x^2 + b/x + ...) F`,
/// `c = b / (2 g)`.
fn frobenius_start<T: Real>(x0: T, g: T, b: T) -> (T, [T; 2]) {
    let c = b / (T::two() * g);
    let f = x0.powf(g) * (T::one() + c * x0);
    let df = x0.powf(g - T::one()) * (g + c * (g + T::one()) * x0);
    (x0, [f, df])
}

/// Decaying WKB log-derivative `-sqrt(q) - q'/(4 q)`.
fn wkb_log_derivative<T: Real, Q: Fn(T) -> T>(q: &Q, x: T) -> T {
    let h = T::lit(1e-4) * (T::one() + x.abs());
    let qx = q(x);
    let dq = (q(x + h) - q(x - h)) / (T::two() * h);
    -qx.sqrt() - dq / (T::lit(4.0) * qx)
}

/// Mismatch of the approximated (transformed) equation with default settings.
pub fn shoot_approximated<T: Real>(state: &QuantumState<T>, p: &ModelParams<T>, energy: T) -> Result<Mismatch<T>> {
    ShootingProblem::new(*state, *p, CentrifugalMode::Approximated).mismatch(energy)
}

/// Mismatch of the exact-centrifugal equation with default settings.
pub fn shoot_exact_centrifugal<T: Real>(
    state: &QuantumState<T>,
    p: &ModelParams<T>,
    energy: T,
) -> Result<Mismatch<T>> {
    ShootingProblem::new(*state, *p, CentrifugalMode::Exact).mismatch(energy)
}

/// One converged eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Eigenpair<T> {
    pub energy: EnergyResult<T>,
    /// Node count of the eigenfunction.
    pub nodes: usize,
    pub mismatch: Mismatch<T>,
}

/// One point of the energy scan. `mismatch` is `None` where the shot failed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanSample<T> {
    pub energy: T,
    pub wronskian: Option<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenSearch<T> {
    pub eigenvalues: Vec<Eigenpair<T>>,
    /// The scan record; empty when `count == 0`.
    pub scan: Vec<ScanSample<T>>,
    pub failed_shots: usize,
}

impl<T: Real> EigenSearch<T> {
    /// Eigenvalue whose eigenfunction has `nodes` nodes.
    pub fn with_nodes(&self, nodes: usize) -> Option<&Eigenpair<T>> {
        self.eigenvalues.iter().find(|e| e.nodes == nodes)
    }
}

/// Scans the problem's energy window for sign changes of the mismatch,
/// refines each by bisection and returns up to `count` eigenvalues in
/// ascending order.
pub fn find_eigenvalues<T: Real>(problem: &ShootingProblem<T>, count: usize) -> Result<EigenSearch<T>> {
    problem.validate()?;
    if count == 0 {
        return Ok(EigenSearch {
            eigenvalues: Vec::new(),
            scan: Vec::new(),
            failed_shots: 0,
        });
    }
    let roots = find_roots(|e| problem.mismatch(e), problem.window, problem.scan_points, problem.energy_tol)?;
    let eigenvalues = roots
        .roots
        .into_iter()
        .take(count)
        .map(|(e, m)| Eigenpair {
            energy: EnergyResult::real(e, Branch::Minus, EnergySource::Oracle),
            nodes: m.nodes,
            mismatch: m,
        })
        .collect();
    Ok(EigenSearch {
        eigenvalues,
        scan: roots.scan,
        failed_shots: roots.failed,
    })
}

/// Roots of a mismatch family together with the scan that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct RootScan<T> {
    pub roots: Vec<(T, Mismatch<T>)>,
    pub scan: Vec<ScanSample<T>>,
    pub failed: usize,
}

/// Generic bracket-and-bisect driver over any mismatch family. Scan points
/// are evaluated in parallel; the result is independent of thread count.
pub fn find_roots<T, F>(f: F, window: (T, T), points: usize, tol: T) -> Result<RootScan<T>>
where
    T: Real,
    F: Fn(T) -> Result<Mismatch<T>> + Sync,
{
    let (lo, hi) = window;
    if !(lo < hi) || points < 2 {
        return Err(Error::Parameter("invalid scan window".into()));
    }
    let step = (hi - lo) / T::of_usize(points - 1);
    let grid: Vec<T> = (0..points).map(|i| lo + step * T::of_usize(i)).collect();
    let values: Vec<Option<Mismatch<T>>> = grid.par_iter().map(|&e| f(e).ok()).collect();
    let scan: Vec<ScanSample<T>> = grid
        .iter()
        .zip(&values)
        .map(|(&energy, m)| ScanSample {
            energy,
            wronskian: m.map(|m| m.wronskian),
        })
        .collect();
    let failed = values.iter().filter(|v| v.is_none()).count();

    let brackets: Vec<(T, T, T)> = (0..points - 1)
        .filter_map(|i| match (values[i], values[i + 1]) {
            (Some(a), Some(b)) if a.wronskian == T::zero() => Some((grid[i], grid[i], a.wronskian.signum() * b.wronskian.signum())),
            (Some(a), Some(b)) if a.wronskian.signum() != b.wronskian.signum() => Some((grid[i], grid[i + 1], a.wronskian)),
            _ => None,
        })
        .collect();

    let refined: Vec<Option<(T, Mismatch<T>)>> = brackets
        .par_iter()
        .map(|&(a, b, fa)| bisect(&f, a, b, fa, tol))
        .collect();
    let mut roots: Vec<(T, Mismatch<T>)> = refined.into_iter().flatten().collect();
    roots.dedup_by(|x, y| (x.0 - y.0).abs() <= tol);
    Ok(RootScan { roots, scan, failed })
}

fn bisect<T, F>(f: &F, mut a: T, mut b: T, mut fa: T, tol: T) -> Option<(T, Mismatch<T>)>
where
    T: Real,
    F: Fn(T) -> Result<Mismatch<T>>,
{
    if a == b {
        return f(a).ok().map(|m| (a, m));
    }
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        let mid = (a + b) * T::half();
        let fm = f(mid).ok()?.wronskian;
        if fm == T::zero() {
            a = mid;
            b = mid;
            break;
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    let root = (a + b) * T::half();
    f(root).ok().map(|m| (root, m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Alignment;
    use crate::specfun::jacobi_unchecked;

    /// Hydrogen-like `F'' = [l(l+1)/r^2 - 2/r + k^2] F`; bound states at
    /// `k = 1/(n_r + l + 1)`.
    fn hydrogen_mismatch(l: f64, k: f64, rtol: f64) -> Result<Mismatch<f64>> {
        let q = move |r: f64| l * (l + 1.0) / (r * r) - 2.0 / r + k * k;
        let g = l + 1.0;
        let inner = frobenius_start(1e-6, g, -2.0);
        let r1 = 60.0 / k;
        let outer = (r1, [1.0, wkb_log_derivative(&q, r1)]);
        shoot_linear(q, inner, outer, 1.5, &Dopri::with_rtol(rtol))
    }

    #[test]
    fn hydrogen_levels_are_recovered() {
        for l in [0.0, 1.0, 2.0] {
            let scan = find_roots(|k| hydrogen_mismatch(l, k, 1e-10), (0.12, 1.2), 200, 1e-11).unwrap();
            let ks: Vec<f64> = scan.roots.iter().map(|r| r.0).collect();
            let expected: Vec<f64> = (0..8)
                .map(|n| 1.0 / (f64::from(n) + l + 1.0))
                .filter(|k| (0.12..1.2).contains(k))
                .rev()
                .collect();
            assert_eq!(ks.len(), expected.len(), "l={l}: {ks:?}");
            for ((k, m), e) in scan.roots.iter().zip(&expected) {
                assert!((k - e).abs() < 1e-8, "l={l}: {k} vs {e}");
                let n_r = (1.0 / e - l - 1.0).round() as usize;
                assert_eq!(m.nodes, n_r);
            }
        }
    }

    #[test]
    fn hydrogen_refinement_is_converged() {
        let a = find_roots(|k| hydrogen_mismatch(1.0, k, 1e-10), (0.4, 0.6), 40, 1e-12).unwrap();
        let b = find_roots(|k| hydrogen_mismatch(1.0, k, 1e-11), (0.4, 0.6), 40, 1e-12).unwrap();
        assert_eq!(a.roots.len(), 1);
        assert!((a.roots[0].0 - b.roots[0].0).abs() < 1e-8);
    }

    /// For an attractive coupling `A = -(N^2 + 2 N eps)` with `N = n_r + kappa + 1`
    /// the transformed equation has the terminating solution
    /// `s^eps (1-s)^(kappa+1) P_n^{(2 eps, 2 kappa + 1)}(1 - 2 s)`.
    #[test]
    fn transformed_equation_matches_jacobi_solution() {
        let kappa = 1.0f64;
        let eps = 0.8f64;
        let solver = Dopri::with_rtol(1e-11);
        for n_r in 0..3u32 {
            let big_n = f64::from(n_r) + kappa + 1.0;
            let exact_a = -(big_n * big_n + 2.0 * big_n * eps);
            let mismatch = |coupling: f64| {
                let ll = kappa * (kappa + 1.0);
                let q = move |x: f64| {
                    let s = (-x).exp();
                    let oms = -(-x).exp_m1();
                    ll * s / (oms * oms) + eps * eps + coupling * s / oms
                };
                let x0 = 1e-8;
                let inner = frobenius_start(x0, kappa + 1.0, coupling);
                let s1 = 1e-8f64;
                let c = (ll + coupling) / (2.0 * eps + 1.0);
                let outer = (-s1.ln(), [1.0 + c * s1, -eps - c * (eps + 1.0) * s1]);
                shoot_linear(q, inner, outer, 1.0, &solver)
            };
            let m = mismatch(exact_a).unwrap();
            assert!(m.wronskian.abs() < 1e-8, "n_r={n_r}: {m:?}");
            assert_eq!(m.nodes, n_r as usize);

            let scan = find_roots(mismatch, (exact_a - 0.5, exact_a + 0.5), 11, 1e-12).unwrap();
            assert_eq!(scan.roots.len(), 1);
            assert!((scan.roots[0].0 - exact_a).abs() < 1e-7);

            // log-derivative of the analytic solution at x = 1
            let f = |x: f64| {
                let s = (-x).exp();
                s.powf(eps) * (1.0 - s).powf(kappa + 1.0) * jacobi_unchecked(n_r, 2.0 * eps, 2.0 * kappa + 1.0, 1.0 - 2.0 * s)
            };
            let h = 1e-6;
            let ld = (f(1.0 + h) - f(1.0 - h)) / (2.0 * h) / f(1.0);
            let out = solver.linear(
                |x: f64| {
                    let s = (-x).exp();
                    let oms = -(-x).exp_m1();
                    2.0 * s / (oms * oms) + eps * eps + exact_a * s / oms
                },
                1e-8,
                frobenius_start(1e-8, kappa + 1.0, exact_a).1,
                1.0,
            );
            let out = out.unwrap();
            assert!((out.log_derivative() - ld).abs() < 1e-6 * ld.abs().max(1.0));
        }
    }

    fn st(n_r: u32, ell: u32, dim: u32, a: Alignment) -> QuantumState<f64> {
        QuantumState::new(n_r, ell, dim, a).unwrap()
    }

    #[test]
    fn count_zero_is_empty() {
        let p = ModelParams::new(1.0, 0.2, 1.0).unwrap();
        let prob = ShootingProblem::new(st(0, 0, 3, Alignment::Unaligned), p, CentrifugalMode::Approximated);
        let res = find_eigenvalues(&prob, 0).unwrap();
        assert!(res.eigenvalues.is_empty());
        assert!(res.scan.is_empty());
    }

    #[test]
    fn invalid_problems() {
        let p = ModelParams::new(1.0, 0.2, 1.0).unwrap();
        let prob = ShootingProblem::new(st(0, 0, 3, Alignment::Unaligned), p, CentrifugalMode::Exact).with_window(1.0, 0.0);
        assert!(prob.validate().is_err());
        let mut prob = ShootingProblem::new(st(0, 0, 3, Alignment::Unaligned), p, CentrifugalMode::Exact);
        prob.matching_radius = 1e6;
        assert!(prob.mismatch(0.0).is_err());
    }

    #[test]
    fn mismatch_is_finite_across_window() {
        let p = ModelParams::new(1.0, 0.2, 1.0).unwrap();
        for mode in [CentrifugalMode::Approximated, CentrifugalMode::Exact] {
            for align in [Alignment::Aligned, Alignment::Unaligned] {
                let prob = ShootingProblem::new(st(1, 1, 3, align), p, mode);
                for i in 0..9 {
                    let e = -1.1 + 0.27 * f64::from(i);
                    let m = prob.mismatch(e).unwrap();
                    assert!(m.wronskian.is_finite() && m.wronskian.abs() <= 1.0 + 1e-12);
                }
            }
        }
    }

    #[test]
    fn physical_equations_have_no_bound_states_in_window() {
        // Both effective potentials are repulsive throughout the window
        // (mu + E - V > 0 and mu - E + V > 0), so the scan finds nothing.
        let p = ModelParams::new(1.0, 0.2, 1.0).unwrap();
        for mode in [CentrifugalMode::Approximated, CentrifugalMode::Exact] {
            let prob = ShootingProblem::new(st(0, 0, 3, Alignment::Unaligned), p, mode).with_scan_points(60);
            let res = find_eigenvalues(&prob, 5).unwrap();
            assert!(res.eigenvalues.is_empty(), "{mode:?}: {:?}", res.eigenvalues);
            assert_eq!(res.scan.len(), 60);
            assert_eq!(res.failed_shots, 0);
        }
    }
}
