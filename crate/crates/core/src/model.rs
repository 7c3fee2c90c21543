//! Physical parameters, quantum numbers and the three radial functions that
//! define the problem: the Hulthén potential, the position-dependent mass and
//! the exponential approximation of the centrifugal term.
//!
//! Natural units (ħ = c = 1) throughout.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::real::Real;

/// Potential strength `Z`, screening `alpha` (inverse length) and the mass
/// integration constant `mu0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams<T> {
    z: T,
    alpha: T,
    mu0: T,
}

impl<T: Real> ModelParams<T> {
    pub fn new(z: T, alpha: T, mu0: T) -> Result<Self> {
        if !(z > T::zero()) || !z.is_finite() {
            return Err(Error::InvalidParams(format!("Z must be > 0, got {z}")));
        }
        if !(alpha > T::zero()) || !alpha.is_finite() {
            return Err(Error::InvalidParams(format!("alpha must be > 0, got {alpha}")));
        }
        if !(mu0 >= T::zero()) || !mu0.is_finite() {
            return Err(Error::InvalidParams(format!("mu0 must be >= 0, got {mu0}")));
        }
        Ok(Self { z, alpha, mu0 })
    }

    pub fn z(&self) -> T {
        self.z
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn mu0(&self) -> T {
        self.mu0
    }

    /// Same parameters with a different screening value.
    pub fn with_alpha(&self, alpha: T) -> Result<Self> {
        Self::new(self.z, alpha, self.mu0)
    }

    /// `mu0 + Z alpha`, the asymptotic value of the mass function and the
    /// edge of the bound-state energy window.
    pub fn asymptotic_mass(&self) -> T {
        self.mu0 + self.z * self.alpha
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Alignment {
    /// `j = ell + 1/2`, negative kappa.
    Aligned,
    /// `j = ell - 1/2`, positive kappa.
    Unaligned,
}

impl std::str::FromStr for Alignment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "aligned" | "a" | "-" => Ok(Alignment::Aligned),
            "unaligned" | "u" | "+" => Ok(Alignment::Unaligned),
            other => Err(Error::Parameter(format!("unknown alignment '{other}'"))),
        }
    }
}

impl std::fmt::Display for Alignment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Alignment::Aligned => "aligned",
            Alignment::Unaligned => "unaligned",
        })
    }
}

/// Radial number, orbital number, spatial dimension and spin alignment.
///
/// Integer-dimension states are built with [`QuantumState::new`]; the
/// continuous-dimension analysis uses [`QuantumState::continuous`], which
/// accepts any positive real `D`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuantumState<T> {
    n_r: u32,
    ell: u32,
    dim: T,
    continuous: bool,
    alignment: Alignment,
}

impl<T: Real> QuantumState<T> {
    pub fn new(n_r: u32, ell: u32, dim: u32, alignment: Alignment) -> Result<Self> {
        if dim < 1 {
            return Err(Error::InvalidState(format!("dimension must be >= 1, got {dim}")));
        }
        Ok(Self {
            n_r,
            ell,
            dim: T::of_u32(dim),
            continuous: false,
            alignment,
        })
    }

    pub fn continuous(n_r: u32, ell: u32, dim: T, alignment: Alignment) -> Result<Self> {
        if !(dim > T::zero()) || !dim.is_finite() {
            return Err(Error::InvalidState(format!("dimension must be > 0, got {dim}")));
        }
        Ok(Self {
            n_r,
            ell,
            dim,
            continuous: true,
            alignment,
        })
    }

    pub fn n_r(&self) -> u32 {
        self.n_r
    }

    pub fn ell(&self) -> u32 {
        self.ell
    }

    pub fn dim(&self) -> T {
        self.dim
    }

    pub fn is_continuous(&self) -> bool {
        self.continuous
    }

    pub fn alignment(&self) -> Alignment {
        self.alignment
    }

    /// `|kappa| = (2 ell + D - 1) / 2`.
    pub fn kappa_abs(&self) -> T {
        (T::two() * T::of_u32(self.ell) + self.dim - T::one()) * T::half()
    }

    pub fn kappa(&self) -> T {
        kappa_of(self)
    }
}

/// Signed spin-orbit number: `+|kappa|` for unaligned, `-|kappa|` for aligned.
pub fn kappa_of<T: Real>(state: &QuantumState<T>) -> T {
    let k = state.kappa_abs();
    match state.alignment {
        Alignment::Aligned => -k,
        Alignment::Unaligned => k,
    }
}

#[inline]
fn check_radius<T: Real>(r: T) -> Result<()> {
    if r > T::zero() && r.is_finite() {
        Ok(())
    } else {
        Err(Error::domain("radial coordinate must be > 0", r))
    }
}

/// `1 - e^{-alpha r}` without cancellation at small `alpha r`.
#[inline]
pub(crate) fn one_minus_s<T: Real>(r: T, alpha: T) -> T {
    -(-alpha * r).exp_m1()
}

/// `V(r) = -Z alpha e^{-alpha r} / (1 - e^{-alpha r})`.
pub fn hulthen_potential<T: Real>(r: T, p: &ModelParams<T>) -> Result<T> {
    check_radius(r)?;
    Ok(potential_unchecked(r, p))
}

/// `mu(r) = mu0 + Z alpha / (1 - e^{-alpha r})`.
pub fn mass_function<T: Real>(r: T, p: &ModelParams<T>) -> Result<T> {
    check_radius(r)?;
    Ok(mass_unchecked(r, p))
}

#[inline]
pub(crate) fn potential_unchecked<T: Real>(r: T, p: &ModelParams<T>) -> T {
    let s = (-p.alpha * r).exp();
    -p.z * p.alpha * s / one_minus_s(r, p.alpha)
}

#[inline]
pub(crate) fn mass_unchecked<T: Real>(r: T, p: &ModelParams<T>) -> T {
    p.mu0 + p.z * p.alpha / one_minus_s(r, p.alpha)
}

/// `dV/dr = Z alpha^2 e^{-alpha r} / (1 - e^{-alpha r})^2`.
pub fn potential_derivative<T: Real>(r: T, p: &ModelParams<T>) -> Result<T> {
    check_radius(r)?;
    let s = (-p.alpha * r).exp();
    let q = one_minus_s(r, p.alpha);
    Ok(p.z * p.alpha * p.alpha * s / (q * q))
}

/// `dmu/dr = -Z alpha^2 e^{-alpha r} / (1 - e^{-alpha r})^2`, the negative of
/// [`potential_derivative`]: `mu + V = mu0 + Z alpha` is the constant combination.
pub fn mass_derivative<T: Real>(r: T, p: &ModelParams<T>) -> Result<T> {
    check_radius(r)?;
    let s = (-p.alpha * r).exp();
    let q = one_minus_s(r, p.alpha);
    Ok(-p.z * p.alpha * p.alpha * s / (q * q))
}

/// `1 / r^2`.
pub fn centrifugal_exact<T: Real>(r: T) -> Result<T> {
    check_radius(r)?;
    Ok((r * r).recip())
}

/// `alpha^2 e^{-alpha r} / (1 - e^{-alpha r})^2`.
pub fn centrifugal_approx<T: Real>(r: T, alpha: T) -> Result<T> {
    check_radius(r)?;
    if !(alpha > T::zero()) {
        return Err(Error::domain("alpha must be > 0", alpha));
    }
    let s = (-alpha * r).exp();
    let q = one_minus_s(r, alpha);
    Ok(alpha * alpha * s / (q * q))
}

/// Sample points for radial functions: log-spaced from `r_min` up to `1/alpha`,
/// then linear out to `r_max`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadialGrid<T> {
    points: Vec<T>,
}

impl<T: Real> RadialGrid<T> {
    /// Cutoff `r_max = 50 / alpha`.
    pub const CUTOFF_FACTOR: f64 = 50.0;
    /// Innermost point `r_min = 1e-6 / alpha`.
    pub const INNER_FACTOR: f64 = 1e-6;

    /// Hybrid grid with `points` samples split evenly between the log and
    /// linear sections.
    pub fn hybrid(alpha: T, points: usize) -> Result<Self> {
        let r_min = T::lit(Self::INNER_FACTOR) / alpha;
        let r_max = T::lit(Self::CUTOFF_FACTOR) / alpha;
        Self::hybrid_range(alpha, r_min, r_max, points)
    }

    pub fn hybrid_range(alpha: T, r_min: T, r_max: T, points: usize) -> Result<Self> {
        if points < 4 {
            return Err(Error::Parameter(format!("grid needs at least 4 points, got {points}")));
        }
        if !(alpha > T::zero()) || !(r_min > T::zero()) {
            return Err(Error::Parameter("grid needs alpha > 0 and r_min > 0".into()));
        }
        let knee = alpha.recip();
        if !(r_min < knee && knee < r_max) {
            return Err(Error::Parameter(format!(
                "grid requires r_min < 1/alpha < r_max ({r_min}, {knee}, {r_max})"
            )));
        }
        let n_log = points / 2;
        let n_lin = points - n_log;
        let mut out = Vec::with_capacity(points);
        let (lo, hi) = (r_min.ln(), knee.ln());
        for i in 0..n_log {
            let t = T::of_usize(i) / T::of_usize(n_log);
            out.push((lo + (hi - lo) * t).exp());
        }
        for i in 0..n_lin {
            let t = T::of_usize(i) / T::of_usize(n_lin - 1);
            out.push(knee + (r_max - knee) * t);
        }
        Ok(Self { points: out })
    }

    pub fn from_points(points: Vec<T>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Parameter("empty grid".into()));
        }
        if points[0] <= T::zero() {
            return Err(Error::Parameter("grid points must be > 0".into()));
        }
        if points.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Parameter("grid points must be strictly increasing".into()));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[T] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn first(&self) -> T {
        self.points[0]
    }

    pub fn last(&self) -> T {
        self.points[self.points.len() - 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit() -> ModelParams<f64> {
        ModelParams::new(1.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn potential_at_ln2() {
        let v = hulthen_potential(2f64.ln(), &unit()).unwrap();
        assert_relative_eq!(v, -1.0, epsilon = 1e-15);
    }

    #[test]
    fn potential_coulomb_limit() {
        let r = 1e-6;
        let v = hulthen_potential(r, &unit()).unwrap();
        assert_relative_eq!(r * v, -1.0, max_relative = 1e-4);
        let p = ModelParams::new(2.5, 0.3, 0.0).unwrap();
        assert_relative_eq!(r * hulthen_potential(r, &p).unwrap(), -2.5, max_relative = 1e-4);
    }

    #[test]
    fn potential_high_precision_fixture() {
        // 50-digit reference: -1.54149408253679828413110344447...
        let p = ModelParams::new(2.0, 0.5, 0.0).unwrap();
        let v: f64 = hulthen_potential(1.0, &p).unwrap();
        assert!((v - -1.541_494_082_536_798_3).abs() < 1e-14);
    }

    #[test]
    fn mass_values() {
        assert_relative_eq!(mass_function(2f64.ln(), &unit()).unwrap(), 3.0, epsilon = 1e-14);
        assert_relative_eq!(mass_function(200.0, &unit()).unwrap(), 2.0, epsilon = 1e-14);
        assert_relative_eq!(unit().asymptotic_mass(), 2.0);
    }

    #[test]
    fn mass_plus_potential_is_flat() {
        let p = ModelParams::new(1.3, 0.7, 0.4).unwrap();
        let h = 1e-8;
        for i in 1..200 {
            let r = 0.05 * f64::from(i);
            let dm = mass_derivative(r, &p).unwrap();
            let dv = potential_derivative(r, &p).unwrap();
            assert!((dm + dv).abs() < 1e-10 * dv.abs().max(1.0));
            let g = |r: f64| mass_function(r, &p).unwrap() + hulthen_potential(r, &p).unwrap();
            let fd = (g(r + h) - g(r - h)) / (2.0 * h);
            assert!(fd.abs() < 1e-6, "r={r} fd={fd}");
            assert_relative_eq!(g(r), p.asymptotic_mass(), max_relative = 1e-13);
        }
    }

    #[test]
    fn mass_minus_potential_is_not_flat() {
        // The difference mu - V has slope -2 dV/dr, nonzero for every r.
        let p = ModelParams::new(1.0, 1.0, 1.0).unwrap();
        for r in [0.1, 1.0, 5.0] {
            let d = mass_derivative(r, &p).unwrap() - potential_derivative(r, &p).unwrap();
            assert_relative_eq!(d, -2.0 * potential_derivative(r, &p).unwrap(), max_relative = 1e-14);
            assert!(d < 0.0);
        }
    }

    #[test]
    fn centrifugal_values() {
        let ratio: f64 = centrifugal_approx(0.01, 1.0).unwrap() / centrifugal_exact(0.01).unwrap();
        assert!((ratio - 1.0).abs() < 1e-4);
        let r = 2f64.ln();
        assert_relative_eq!(centrifugal_approx(r, 1.0).unwrap(), 2.0, epsilon = 1e-14);
        assert_relative_eq!(centrifugal_exact(r).unwrap(), 2.081_368_981, epsilon = 1e-9);
        // 50-digit reference at alpha r = 2: -0.27593833903368953359...
        let rel: f64 = centrifugal_approx(2.0, 1.0).unwrap() / centrifugal_exact(2.0).unwrap() - 1.0;
        assert!((rel - -0.275_938_339_033_689_53).abs() < 1e-14);
    }

    #[test]
    fn centrifugal_underestimates_on_log_grid() {
        for alpha in [0.05, 0.3, 1.0, 4.0] {
            for i in -60..=40 {
                let r = 10f64.powf(f64::from(i) / 10.0);
                assert!(centrifugal_approx(r, alpha).unwrap() <= centrifugal_exact(r).unwrap());
            }
        }
    }

    #[test]
    fn non_positive_radius_is_rejected() {
        for r in [0.0, -1.0, f64::NAN] {
            assert!(matches!(hulthen_potential(r, &unit()), Err(Error::Domain { .. })));
            assert!(mass_function(r, &unit()).is_err());
            assert!(centrifugal_exact(r).is_err());
            assert!(centrifugal_approx(r, 1.0).is_err());
        }
    }

    #[test]
    fn kappa_values() {
        let k = |ell, dim, a| QuantumState::<f64>::new(0, ell, dim, a).unwrap().kappa();
        assert_eq!(k(0, 3, Alignment::Unaligned), 1.0);
        assert_eq!(k(1, 3, Alignment::Aligned), -2.0);
        assert_eq!(k(0, 4, Alignment::Unaligned), 1.5);
        let c = QuantumState::continuous(0, 0, 3.5, Alignment::Aligned).unwrap();
        assert_eq!(c.kappa(), -1.25);
        assert!(c.is_continuous());
    }

    #[test]
    fn invalid_inputs() {
        assert!(ModelParams::new(0.0, 1.0, 1.0).is_err());
        assert!(ModelParams::new(1.0, 0.0, 1.0).is_err());
        assert!(ModelParams::new(1.0, 1.0, -0.1).is_err());
        assert!(QuantumState::<f64>::new(0, 0, 0, Alignment::Aligned).is_err());
        assert!(QuantumState::continuous(0, 0, -1.0, Alignment::Aligned).is_err());
    }

    #[test]
    fn hybrid_grid_shape() {
        let g = RadialGrid::hybrid(0.2, 400).unwrap();
        assert_eq!(g.len(), 400);
        assert!(g.points().windows(2).all(|w| w[1] > w[0]));
        assert_relative_eq!(g.first(), 5e-6, max_relative = 1e-12);
        assert_relative_eq!(g.last(), 250.0, max_relative = 1e-12);
        assert!(RadialGrid::from_points(vec![1.0, 1.0]).is_err());
    }

    proptest::proptest! {
        #[test]
        fn potential_negative_and_increasing(r in 1e-4f64..40.0, z in 0.1f64..5.0, a in 0.01f64..3.0) {
            let p = ModelParams::new(z, a, 1.0).unwrap();
            let v1 = hulthen_potential(r, &p).unwrap();
            let v2 = hulthen_potential(r * 1.01, &p).unwrap();
            proptest::prop_assert!(v1 < 0.0);
            proptest::prop_assert!(v2 >= v1);
            let m1 = mass_function(r, &p).unwrap();
            let m2 = mass_function(r * 1.01, &p).unwrap();
            proptest::prop_assert!(m2 <= m1);
        }
    }
}
