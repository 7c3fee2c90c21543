//! Upper and lower spinor components.
//!
//! The upper component is evaluated in its Jacobi form
//!
//! `F(s) = C s^eps (1-s)^delta P_{n_r}^{(2 eps, 2 delta - 1)}(1 - 2s)`, `s = e^{-alpha r}`,
//!
//! and the lower one from the exact first-order relation
//! `G = [(d/dr + kappa/r) F] / [mu(r) + E - V(r)]`, with `dF/dr` taken
//! analytically through the Jacobi derivative and the chain rule in `s`.
//! `ln s` is always evaluated as `-alpha r`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{mass_unchecked, one_minus_s, potential_unchecked, ModelParams, QuantumState, RadialGrid};
use crate::real::Real;
use crate::specfun::{self, hyp2f1_terminating, jacobi_derivative_unchecked, jacobi_endpoint_factor, JacobiParams, Quadrature};
use crate::spectra::{self, DeltaPolicy, EnergyResult};

/// Closed-form spinor for one state at one energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpinorSolution<T> {
    state: QuantumState<T>,
    params: ModelParams<T>,
    energy: EnergyResult<T>,
    e: T,
    epsilon: T,
    delta: T,
    kappa: T,
    coupling: T,
    jacobi: JacobiParams<T>,
    amplitude: T,
}

/// Derivatives of `F` at one radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpperJet<T> {
    pub f: T,
    pub df: T,
    pub d2f: T,
}

impl<T: Real> SpinorSolution<T> {
    /// Requires a real-status energy with a real `epsilon`.
    pub fn new(
        state: &QuantumState<T>,
        params: &ModelParams<T>,
        energy: &EnergyResult<T>,
        policy: DeltaPolicy,
    ) -> Result<Self> {
        let e = energy.require_real()?;
        let aux = spectra::epsilon_beta(e, state, params, policy);
        let epsilon = aux.require_epsilon()?;
        let jacobi = JacobiParams::new(state.n_r(), T::two() * epsilon, T::two() * aux.delta - T::one())?;
        Ok(Self {
            state: *state,
            params: *params,
            energy: *energy,
            e,
            epsilon,
            delta: aux.delta,
            kappa: state.kappa(),
            coupling: aux.coupling(),
            jacobi,
            amplitude: T::one(),
        })
    }

    pub fn state(&self) -> &QuantumState<T> {
        &self.state
    }

    pub fn params(&self) -> &ModelParams<T> {
        &self.params
    }

    pub fn energy(&self) -> &EnergyResult<T> {
        &self.energy
    }

    pub fn epsilon(&self) -> T {
        self.epsilon
    }

    pub fn delta(&self) -> T {
        self.delta
    }

    pub fn amplitude(&self) -> T {
        self.amplitude
    }

    pub fn jacobi(&self) -> &JacobiParams<T> {
        &self.jacobi
    }

    pub fn scaled(mut self, factor: T) -> Self {
        self.amplitude = self.amplitude * factor;
        self
    }

    /// `F`, `dF/dr`, `d^2F/dr^2` at `r > 0`.
    pub fn upper_jet(&self, r: T) -> UpperJet<T> {
        let alpha = self.params.alpha();
        let (eps, delta) = (self.epsilon, self.delta);
        let s = (-alpha * r).exp();
        let oms = one_minus_s(r, alpha);
        let envelope = (-eps * alpha * r + delta * oms.ln()).exp() * self.amplitude;
        let x = T::one() - T::two() * s;
        let (n, a, b) = (self.jacobi.degree, self.jacobi.a, self.jacobi.b);
        let p0 = jacobi_derivative_unchecked(n, a, b, x, 0);
        let p1 = jacobi_derivative_unchecked(n, a, b, x, 1);
        let p2 = jacobi_derivative_unchecked(n, a, b, x, 2);
        // d/dr of the envelope is envelope * h.
        let h = -alpha * eps + delta * alpha * s / oms;
        let dh = -delta * alpha * alpha * s / (oms * oms);
        let dx = T::two() * alpha * s;
        let d2x = -T::two() * alpha * alpha * s;
        UpperJet {
            f: envelope * p0,
            df: envelope * (h * p0 + p1 * dx),
            d2f: envelope * ((h * h + dh) * p0 + T::two() * h * p1 * dx + p2 * dx * dx + p1 * d2x),
        }
    }

    pub fn upper(&self, r: T) -> T {
        self.upper_jet(r).f
    }

    /// `mu(r) + E - V(r)`.
    pub fn coupling_plus(&self, r: T) -> T {
        mass_unchecked(r, &self.params) + self.e - potential_unchecked(r, &self.params)
    }

    /// `mu(r) - E + V(r)`.
    pub fn coupling_minus(&self, r: T) -> T {
        mass_unchecked(r, &self.params) - self.e + potential_unchecked(r, &self.params)
    }

    /// `G` and `dG/dr` at `r > 0`.
    pub fn lower_jet(&self, r: T) -> (T, T) {
        let j = self.upper_jet(r);
        let m = self.coupling_plus(r);
        // d/dr (mu - V) = -2 dV/dr for this mass function.
        let dm = crate::model::mass_derivative(r, &self.params).unwrap_or_else(|_| T::nan())
            - crate::model::potential_derivative(r, &self.params).unwrap_or_else(|_| T::nan());
        let k = self.kappa;
        let num = j.df + k * j.f / r;
        let dnum = j.d2f + k * j.df / r - k * j.f / (r * r);
        (num / m, dnum / m - num * dm / (m * m))
    }

    pub fn lower(&self, r: T) -> T {
        self.lower_jet(r).0
    }

    /// Residuals of the coupled first-order equations at `r`, each divided by
    /// the sum of the magnitudes of its terms:
    /// `(d/dr + kappa/r) F - (mu + E - V) G` and
    /// `(d/dr - kappa/r) G - (mu - E + V) F`.
    pub fn pair_residuals(&self, r: T) -> (T, T) {
        let j = self.upper_jet(r);
        let (g, dg) = self.lower_jet(r);
        let k = self.kappa;
        let mp = self.coupling_plus(r);
        let mm = self.coupling_minus(r);
        let rel = |res: T, scale: T| {
            if scale == T::zero() {
                res.abs()
            } else {
                res.abs() / scale
            }
        };
        let r8 = j.df + k * j.f / r - mp * g;
        let s8 = j.df.abs() + (k * j.f / r).abs() + (mp * g).abs();
        let r9 = dg - k * g / r - mm * j.f;
        let s9 = dg.abs() + (k * g / r).abs() + (mm * j.f).abs();
        (rel(r8, s8), rel(r9, s9))
    }

    /// Upper component through the terminating hypergeometric series,
    /// `s^eps (1-s)^delta c_n 2F1(-n_r, b; 1 + 2 eps; s)` with `c_n` the Jacobi
    /// endpoint factor, for a given second parameter `b`.
    pub fn upper_via_series(&self, r: T, b: T) -> Result<T> {
        let alpha = self.params.alpha();
        let s = (-alpha * r).exp();
        let oms = one_minus_s(r, alpha);
        let envelope = (-self.epsilon * alpha * r + self.delta * oms.ln()).exp() * self.amplitude;
        let c = T::one() + T::two() * self.epsilon;
        let n = self.state.n_r();
        Ok(envelope * jacobi_endpoint_factor(n, T::two() * self.epsilon) * hyp2f1_terminating(n, b, c, s)?)
    }

    /// Second series parameter implied by the Jacobi form:
    /// `2 eps + 2 delta + n_r`.
    pub fn series_parameter_jacobi(&self) -> T {
        T::two() * self.epsilon + T::two() * self.delta + T::of_u32(self.state.n_r())
    }

    /// Second series parameter as written in the hypergeometric solution,
    /// `delta + eps + sqrt(eps^2 - (beta1 + beta2))`. Equals
    /// [`series_parameter_jacobi`](Self::series_parameter_jacobi) only where the
    /// termination condition holds.
    pub fn series_parameter_literal(&self) -> Result<T> {
        let inner = self.epsilon * self.epsilon - self.coupling;
        if inner < T::zero() {
            return Err(Error::ComplexBranch {
                what: "epsilon^2 - (beta1 + beta2)",
                value: inner.as_f64(),
            });
        }
        Ok(self.delta + self.epsilon + inner.sqrt())
    }

    /// Least-squares check of the two-polynomial form of the lower component,
    /// `G = A1(s) P_n^{(2eps, 2kappa+1)} + A2(s) P_{n-1}^{(2eps+1, 2kappa+2)}`
    /// with `A1 = C s^eps (1-s)^kappa [eps/s - alpha kappa (1-s)/ln s] / (mu + E - V)`
    /// and `A2 = B s^eps (1-s)^kappa / (mu + E - V)`. Returns the fitted `B`
    /// (`None` for `n_r = 0`, where the second term is absent) and the RMS
    /// residual relative to the RMS of `G`.
    pub fn two_term_lower_fit(&self, radii: &[T]) -> (Option<T>, T) {
        let alpha = self.params.alpha();
        let k = self.kappa;
        let (eps, n) = (self.epsilon, self.state.n_r());
        let b1 = T::two() * k + T::one();
        let mut rows = Vec::with_capacity(radii.len());
        for &r in radii {
            let s = (-alpha * r).exp();
            let oms = one_minus_s(r, alpha);
            let ln_s = -alpha * r;
            let m = self.coupling_plus(r);
            let env = (eps * ln_s + k * oms.ln()).exp() / m;
            let x = T::one() - T::two() * s;
            let first = self.amplitude * env * (eps / s - alpha * k * oms / ln_s)
                * specfun::jacobi_unchecked(n, T::two() * eps, b1, x);
            let basis = if n == 0 {
                T::zero()
            } else {
                env * specfun::jacobi_unchecked(n - 1, T::two() * eps + T::one(), b1 + T::one(), x)
            };
            rows.push((self.lower(r), first, basis));
        }
        let b = if n == 0 {
            None
        } else {
            let num = rows.iter().fold(T::zero(), |acc, &(g, f, bs)| acc + bs * (g - f));
            let den = rows.iter().fold(T::zero(), |acc, &(_, _, bs)| acc + bs * bs);
            Some(if den > T::zero() { num / den } else { T::zero() })
        };
        let bb = b.unwrap_or_else(T::zero);
        let (mut res, mut norm) = (T::zero(), T::zero());
        for (g, f, bs) in rows {
            let d = g - f - bb * bs;
            res = res + d * d;
            norm = norm + g * g;
        }
        let rel = if norm > T::zero() { (res / norm).sqrt() } else { res.sqrt() };
        (b, rel)
    }

    /// `∫ (F^2 + G^2) dr` over `(0, breakpoints.last]`, adaptive Simpson on
    /// each sub-interval.
    pub fn norm_integral(&self, breakpoints: &[T]) -> Result<T> {
        let mut pts = Vec::with_capacity(breakpoints.len() + 1);
        pts.push(T::zero());
        pts.extend(breakpoints.iter().copied().filter(|&r| r > T::zero()));
        let density = |r: T| {
            if r <= T::zero() {
                return T::zero();
            }
            let f = self.upper(r);
            let g = self.lower(r);
            f * f + g * g
        };
        // Coarse trapezoid estimate sets the absolute tolerance scale.
        let coarse = pts
            .windows(2)
            .fold(T::zero(), |acc, w| acc + (w[1] - w[0]) * (density(w[0]) + density(w[1])) * T::half());
        let quad = Quadrature {
            abs_tol: (coarse * T::lit(1e-13)).max(T::min_positive_value()),
            max_depth: 40,
        };
        quad.integrate_on(density, &pts)
    }
}

/// Sampled spinor on a radial grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialFunction<T> {
    pub state: QuantumState<T>,
    pub params: ModelParams<T>,
    pub energy: EnergyResult<T>,
    pub grid: Vec<T>,
    pub f_values: Vec<T>,
    pub g_values: Vec<T>,
    pub norm_constant: Option<T>,
    /// `(epsilon, delta)`: exponents of `s` at `r -> inf` and of `1 - s` at `r -> 0`.
    pub endpoint_exponents: (T, T),
    /// Termination residual at this energy (diagnostic).
    pub quantization_residual: Option<T>,
    #[serde(skip)]
    solution: SpinorSolution<T>,
}

impl<T: Real> RadialFunction<T> {
    /// Samples `F` and `G` of `solution` on `grid`.
    pub fn sample(solution: SpinorSolution<T>, grid: &RadialGrid<T>, policy: DeltaPolicy) -> Result<Self> {
        check_no_pole(&solution, grid.points())?;
        let mut f_values = Vec::with_capacity(grid.len());
        let mut g_values = Vec::with_capacity(grid.len());
        for &r in grid.points() {
            let f = solution.upper(r);
            let g = solution.lower(r);
            if !f.is_finite() || !g.is_finite() {
                return Err(Error::Integration {
                    at: r.as_f64(),
                    reason: format!("non-finite spinor sample (F={f}, G={g})"),
                });
            }
            f_values.push(f);
            g_values.push(g);
        }
        let e = solution.e;
        Ok(Self {
            state: solution.state,
            params: solution.params,
            energy: solution.energy,
            grid: grid.points().to_vec(),
            f_values,
            g_values,
            norm_constant: None,
            endpoint_exponents: (solution.epsilon, solution.delta),
            quantization_residual: spectra::quantization_residual(e, &solution.state, &solution.params, policy).ok(),
            solution,
        })
    }

    pub fn solution(&self) -> &SpinorSolution<T> {
        &self.solution
    }

    /// Multiplies both components (and the underlying amplitude) by `factor`.
    pub fn scaled(&self, factor: T) -> Self {
        let mut out = self.clone();
        out.solution = out.solution.scaled(factor);
        out.f_values.iter_mut().for_each(|v| *v = *v * factor);
        out.g_values.iter_mut().for_each(|v| *v = *v * factor);
        out
    }

    pub fn nodes(&self) -> usize {
        node_count(&self.f_values)
    }

    pub fn is_normalized(&self) -> bool {
        self.norm_constant.is_some()
    }
}

fn check_no_pole<T: Real>(solution: &SpinorSolution<T>, radii: &[T]) -> Result<()> {
    let mut prev: Option<(T, T)> = None;
    for &r in radii {
        let m = solution.coupling_plus(r);
        if m == T::zero() || !m.is_finite() {
            return Err(Error::Pole { r: r.as_f64() });
        }
        if let Some((r0, m0)) = prev {
            if m0.signum() != m.signum() {
                return Err(Error::Pole {
                    r: ((r0 + r) * T::half()).as_f64(),
                });
            }
        }
        prev = Some((r, m));
    }
    Ok(())
}

/// Unnormalized `F` on the grid.
pub fn upper_component<T: Real>(
    state: &QuantumState<T>,
    p: &ModelParams<T>,
    energy: &EnergyResult<T>,
    grid: &RadialGrid<T>,
    policy: DeltaPolicy,
) -> Result<Vec<T>> {
    let sol = SpinorSolution::new(state, p, energy, policy)?;
    Ok(grid.points().iter().map(|&r| sol.upper(r)).collect())
}

/// `G` on the grid, consistent with [`upper_component`].
pub fn lower_component<T: Real>(
    state: &QuantumState<T>,
    p: &ModelParams<T>,
    energy: &EnergyResult<T>,
    grid: &RadialGrid<T>,
    policy: DeltaPolicy,
) -> Result<Vec<T>> {
    let sol = SpinorSolution::new(state, p, energy, policy)?;
    check_no_pole(&sol, grid.points())?;
    Ok(grid.points().iter().map(|&r| sol.lower(r)).collect())
}

/// Scales both components so that `∫ (F^2 + G^2) dr = 1` and records the
/// constant applied.
pub fn normalize<T: Real>(rf: &RadialFunction<T>) -> Result<RadialFunction<T>> {
    let norm = rf.solution.norm_integral(&rf.grid)?;
    if !(norm > T::zero()) || !norm.is_finite() {
        return Err(Error::DegenerateNorm { norm: norm.as_f64() });
    }
    let factor = norm.sqrt().recip();
    let mut out = rf.scaled(factor);
    out.norm_constant = Some(out.solution.amplitude);
    Ok(out)
}

/// Strict sign changes, ignoring samples below `1e-12 max|F|`.
pub fn node_count<T: Real>(samples: &[T]) -> usize {
    specfun::sign_changes(samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Alignment;
    use crate::spectra::{dirac_energy, Branch};
    use approx::assert_relative_eq;

    fn fixture(n_r: u32, ell: u32, dim: u32, alpha: f64) -> (QuantumState<f64>, ModelParams<f64>, EnergyResult<f64>) {
        let s = QuantumState::new(n_r, ell, dim, Alignment::Unaligned).unwrap();
        let p = ModelParams::new(1.0, alpha, 1.0).unwrap();
        let e = dirac_energy(&s, &p, Branch::Minus);
        (s, p, e)
    }

    fn sampled(n_r: u32, ell: u32, dim: u32, alpha: f64, points: usize) -> RadialFunction<f64> {
        let (s, p, e) = fixture(n_r, ell, dim, alpha);
        let sol = SpinorSolution::new(&s, &p, &e, DeltaPolicy::Consistent).unwrap();
        RadialFunction::sample(sol, &RadialGrid::hybrid(alpha, points).unwrap(), DeltaPolicy::Consistent).unwrap()
    }

    #[test]
    fn ground_state_has_no_nodes() {
        let rf = sampled(0, 0, 3, 0.2, 800);
        assert_eq!(rf.nodes(), 0);
        assert!(rf.f_values.iter().all(|&f| f >= 0.0));
    }

    #[test]
    fn node_counts_follow_radial_number() {
        for n_r in 1..=3 {
            assert_eq!(sampled(n_r, 0, 3, 0.1, 4000).nodes(), n_r as usize);
        }
    }

    #[test]
    fn vanishes_at_both_ends() {
        let rf = sampled(1, 1, 3, 0.2, 800);
        let peak = rf.f_values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(rf.f_values[0].abs() < 1e-9 * peak);
        assert!(rf.f_values.last().unwrap().abs() < 1e-9 * peak);
    }

    #[test]
    fn imaginary_energy_is_rejected() {
        let (s, p, e) = fixture(2, 2, 5, 0.4);
        assert!(!e.is_real());
        let err = SpinorSolution::new(&s, &p, &e, DeltaPolicy::Consistent).unwrap_err();
        assert!(matches!(err, Error::ImaginaryEnergy { .. }));
    }

    #[test]
    fn derivatives_match_finite_differences() {
        for (n_r, ell, dim) in [(0, 0, 3), (2, 1, 4), (3, 0, 5)] {
            let (s, p, e) = fixture(n_r, ell, dim, 0.2);
            let sol = SpinorSolution::new(&s, &p, &e, DeltaPolicy::Consistent).unwrap();
            let grid = RadialGrid::hybrid(0.2, 200).unwrap();
            let pts = grid.points();
            for &r in &pts[10..190] {
                let h = 1e-6 * r;
                let j = sol.upper_jet(r);
                let fd = (sol.upper(r + h) - sol.upper(r - h)) / (2.0 * h);
                let scale = j.df.abs().max(1e-10 * sol.upper(r).abs().max(1e-300));
                assert!((j.df - fd).abs() <= 1e-5 * scale.max(fd.abs()) + 1e-14, "r={r} {} {fd}", j.df);
                let fd2 = (sol.upper_jet(r + h).df - sol.upper_jet(r - h).df) / (2.0 * h);
                assert!((j.d2f - fd2).abs() <= 1e-4 * j.d2f.abs().max(fd2.abs()) + 1e-12);
                let (g, dg) = sol.lower_jet(r);
                let fdg = (sol.lower(r + h) - sol.lower(r - h)) / (2.0 * h);
                assert!((dg - fdg).abs() <= 1e-4 * dg.abs().max(fdg.abs()) + 1e-12 * g.abs().max(1.0));
            }
        }
    }

    #[test]
    fn first_pair_equation_holds_by_construction() {
        let (s, p, e) = fixture(1, 0, 3, 0.2);
        let sol = SpinorSolution::new(&s, &p, &e, DeltaPolicy::Consistent).unwrap();
        for &r in RadialGrid::hybrid(0.2, 100).unwrap().points() {
            assert!(sol.pair_residuals(r).0 < 1e-12);
        }
    }

    #[test]
    fn jacobi_and_series_forms_agree() {
        for n_r in 0..4 {
            let (s, p, e) = fixture(n_r, 1, 3, 0.1);
            let sol = SpinorSolution::new(&s, &p, &e, DeltaPolicy::Consistent).unwrap();
            let b = sol.series_parameter_jacobi();
            let grid = RadialGrid::hybrid(0.1, 300).unwrap();
            let peak = grid.points().iter().fold(0.0f64, |m, &r| m.max(sol.upper(r).abs()));
            for &r in grid.points() {
                let d = sol.upper(r) - sol.upper_via_series(r, b).unwrap();
                assert!(d.abs() < 1e-10 * peak);
            }
        }
    }

    #[test]
    fn literal_series_parameter_departs_off_termination() {
        // At the closed-form energy the termination condition fails for
        // eps >= 0, so the written series parameter differs from the
        // Jacobi-implied one (irrelevant for n_r = 0 where the series is 1).
        let (s, p, e) = fixture(1, 0, 3, 0.1);
        let sol = SpinorSolution::new(&s, &p, &e, DeltaPolicy::Consistent).unwrap();
        let lit = sol.series_parameter_literal().unwrap();
        assert!((lit - sol.series_parameter_jacobi()).abs() > 1e-3);
    }

    #[test]
    fn normalization() {
        let rf = sampled(1, 0, 3, 0.2, 400);
        let n = normalize(&rf).unwrap();
        let c = n.norm_constant.unwrap();
        let check = n.solution().norm_integral(&n.grid).unwrap();
        assert!((check - 1.0).abs() < 1e-8);

        let seven = normalize(&rf.scaled(7.0)).unwrap();
        for (a, b) in n.f_values.iter().zip(&seven.f_values) {
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-300) + 1e-15);
        }

        let fine = normalize(&sampled(1, 0, 3, 0.2, 800)).unwrap();
        assert_relative_eq!(fine.norm_constant.unwrap(), c, max_relative = 1e-6);
    }

    #[test]
    fn norm_integral_grid_refinement() {
        let a = sampled(2, 0, 3, 0.2, 300);
        let b = sampled(2, 0, 3, 0.2, 600);
        let ia = a.solution().norm_integral(&a.grid).unwrap();
        let ib = b.solution().norm_integral(&b.grid).unwrap();
        assert!((ia - ib).abs() <= 1e-8 * ia);
    }

    #[test]
    fn two_term_fit_shapes() {
        let (s, p, e) = fixture(0, 0, 3, 0.2);
        let sol = SpinorSolution::new(&s, &p, &e, DeltaPolicy::Consistent).unwrap();
        let grid = RadialGrid::hybrid(0.2, 200).unwrap();
        let (b, rel) = sol.two_term_lower_fit(&grid.points()[10..190]);
        assert!(b.is_none());
        assert!(rel.is_finite());
        let (s, p, e) = fixture(2, 0, 3, 0.2);
        let sol = SpinorSolution::new(&s, &p, &e, DeltaPolicy::Consistent).unwrap();
        let (b, rel) = sol.two_term_lower_fit(&grid.points()[10..190]);
        assert!(b.unwrap().is_finite());
        assert!(rel.is_finite());
    }

    #[test]
    fn boundary_limits() {
        let (s, p, e) = fixture(2, 1, 4, 0.2);
        let sol = SpinorSolution::new(&s, &p, &e, DeltaPolicy::Consistent).unwrap();
        let (eps, delta) = (sol.epsilon(), sol.delta());
        let far = |r: f64| sol.upper(r) / (-0.2 * r * eps).exp();
        assert_relative_eq!(far(150.0), far(200.0), max_relative = 1e-6);
        assert!(far(200.0).abs() > 0.0);
        let near = |r: f64| sol.upper(r) / (-(-0.2 * r).exp_m1()).powf(delta);
        assert_relative_eq!(near(1e-7), near(1e-8), max_relative = 1e-5);
        assert!(near(1e-8).abs() > 0.0);
    }

    #[test]
    fn node_count_basics() {
        assert_eq!(node_count(&[1.0, 2.0, 0.5]), 0);
        assert_eq!(node_count(&[1.0, -2.0, 0.5, -1e-30]), 2);
    }
}
