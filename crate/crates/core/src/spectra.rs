//! Closed-form energy formulas, the auxiliary quantities of the transformed
//! radial equation, the termination (quantization) residual and the
//! imaginary-energy thresholds.
//!
//! Energies whose square-root argument is negative come back as
//! [`EnergyValue::Imaginary`] rather than as errors, so parameter scans can run
//! straight through a threshold.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{ModelParams, QuantumState};
use crate::real::Real;

/// Sign in front of the square root.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Plus,
    #[default]
    Minus,
}

impl Branch {
    pub fn sign<T: Real>(self) -> T {
        match self {
            Branch::Plus => T::one(),
            Branch::Minus => -T::one(),
        }
    }
}

impl std::str::FromStr for Branch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "plus" | "+" => Ok(Branch::Plus),
            "minus" | "-" => Ok(Branch::Minus),
            other => Err(Error::Parameter(format!("unknown branch '{other}'"))),
        }
    }
}

impl std::fmt::Display for Branch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Branch::Plus => "plus",
            Branch::Minus => "minus",
        })
    }
}

/// Which formula (or the numerical oracle) produced an energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergySource {
    /// Dirac spectrum, general `Z`, `mu0`.
    Dirac,
    /// Coulomb-like limit of the Dirac spectrum.
    Coulomb,
    /// Klein-Gordon spectrum for equal vector and scalar potentials.
    KleinGordon,
    /// Klein-Gordon spectrum at `Z = mu = 1` in terms of the principal number.
    KgSimplified,
    /// Dirac spectrum at `Z = mu0 = 1` in terms of the principal number.
    DiracSimplified,
    Oracle,
}

impl EnergySource {
    pub fn name(self) -> &'static str {
        match self {
            EnergySource::Dirac => "dirac",
            EnergySource::Coulomb => "coulomb",
            EnergySource::KleinGordon => "kg",
            EnergySource::KgSimplified => "kg_simplified",
            EnergySource::DiracSimplified => "dirac_simplified",
            EnergySource::Oracle => "oracle",
        }
    }
}

impl std::fmt::Display for EnergySource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", content = "value", rename_all = "lowercase")]
pub enum EnergyValue<T> {
    Real(T),
    Imaginary,
}

/// A branch-tagged energy together with the square-root argument it came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyResult<T> {
    pub value: EnergyValue<T>,
    pub branch: Branch,
    pub source: EnergySource,
    /// Argument of the square root in the source formula. Imaginary status
    /// holds exactly when this is negative. Oracle results carry zero.
    pub radicand: T,
}

impl<T: Real> EnergyResult<T> {
    /// Builds `base + sign * scale * sqrt(radicand)`, or imaginary status.
    pub fn from_radicand(base: T, scale: T, radicand: T, branch: Branch, source: EnergySource) -> Self {
        let value = if radicand < T::zero() || radicand.is_nan() {
            EnergyValue::Imaginary
        } else {
            EnergyValue::Real(base + branch.sign::<T>() * scale * radicand.sqrt())
        };
        Self {
            value,
            branch,
            source,
            radicand,
        }
    }

    pub fn real(value: T, branch: Branch, source: EnergySource) -> Self {
        Self {
            value: EnergyValue::Real(value),
            branch,
            source,
            radicand: T::zero(),
        }
    }

    pub fn is_real(&self) -> bool {
        matches!(self.value, EnergyValue::Real(_))
    }

    pub fn value(&self) -> Option<T> {
        match self.value {
            EnergyValue::Real(v) => Some(v),
            EnergyValue::Imaginary => None,
        }
    }

    /// The real value, or [`Error::ImaginaryEnergy`].
    pub fn require_real(&self) -> Result<T> {
        self.value().ok_or(Error::ImaginaryEnergy {
            radicand: self.radicand.as_f64(),
        })
    }
}

/// How the exponent `delta` at `s -> 1` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DeltaPolicy {
    /// `delta = |kappa| + 1` for both alignments; matches the
    /// `(n_r + |kappa| + 1)` structure of the closed-form Dirac energy.
    #[default]
    Consistent,
    /// The positive root of `delta^2 - delta - kappa(kappa+1) = 0`:
    /// `kappa + 1` for `kappa >= 0`, `-kappa` for `kappa < 0`.
    Literal,
}

impl DeltaPolicy {
    pub fn delta<T: Real>(self, kappa: T) -> T {
        match self {
            DeltaPolicy::Consistent => kappa.abs() + T::one(),
            DeltaPolicy::Literal => regular_exponent(kappa),
        }
    }
}

impl std::str::FromStr for DeltaPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "consistent" | "default" => Ok(DeltaPolicy::Consistent),
            "literal" => Ok(DeltaPolicy::Literal),
            other => Err(Error::Parameter(format!("unknown delta policy '{other}'"))),
        }
    }
}

/// Larger root of `delta^2 - delta - kappa(kappa+1) = 0`, i.e.
/// `max(kappa + 1, -kappa)`.
pub fn regular_exponent<T: Real>(kappa: T) -> T {
    (kappa + T::one()).max(-kappa)
}

/// Quantities of the transformed equation at a trial energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AuxiliaryQuantities<T> {
    /// `epsilon^2 = (mu0^2 + beta1 alpha^2 - E^2) / alpha^2`; may be negative.
    pub epsilon_sq: T,
    pub beta1: T,
    pub beta2: T,
    pub delta: T,
    /// `(n_r + |kappa| + 1)^2 + Z^2`.
    pub eta: T,
}

impl<T: Real> AuxiliaryQuantities<T> {
    /// Non-negative `epsilon`, or `None` when `epsilon^2 < 0`.
    pub fn epsilon(&self) -> Option<T> {
        if self.epsilon_sq >= T::zero() {
            Some(self.epsilon_sq.sqrt())
        } else {
            None
        }
    }

    pub fn require_epsilon(&self) -> Result<T> {
        self.epsilon().ok_or(Error::ComplexBranch {
            what: "epsilon^2",
            value: self.epsilon_sq.as_f64(),
        })
    }

    /// `beta1 + beta2`, the coefficient of `1/(s(1-s))`.
    pub fn coupling(&self) -> T {
        self.beta1 + self.beta2
    }
}

/// `beta1 = (2 Z mu0 + Z^2 alpha)/alpha`, `beta2 = (2 Z E + Z^2 alpha)/alpha`,
/// `epsilon = sqrt(mu0^2 + beta1 alpha^2 - E^2)/alpha`.
pub fn epsilon_beta<T: Real>(
    energy: T,
    state: &QuantumState<T>,
    p: &ModelParams<T>,
    policy: DeltaPolicy,
) -> AuxiliaryQuantities<T> {
    let (z, a, mu0) = (p.z(), p.alpha(), p.mu0());
    let two = T::two();
    let beta1 = (two * z * mu0 + z * z * a) / a;
    let beta2 = (two * z * energy + z * z * a) / a;
    let epsilon_sq = (mu0 * mu0 + beta1 * a * a - energy * energy) / (a * a);
    let big_n = T::of_u32(state.n_r()) + state.kappa_abs() + T::one();
    AuxiliaryQuantities {
        epsilon_sq,
        beta1,
        beta2,
        delta: policy.delta(state.kappa()),
        eta: big_n * big_n + z * z,
    }
}

/// Square-root argument of the closed-form Dirac energy,
/// `4 (mu0 + alpha^2 beta1) eta - alpha^2 (eta + beta1)^2`.
pub fn dirac_radicand<T: Real>(state: &QuantumState<T>, p: &ModelParams<T>) -> T {
    let aux = epsilon_beta(T::zero(), state, p, DeltaPolicy::Consistent);
    let a2 = p.alpha() * p.alpha();
    let sum = aux.eta + aux.beta1;
    T::lit(4.0) * (p.mu0() + a2 * aux.beta1) * aux.eta - a2 * sum * sum
}

/// Closed-form Dirac energy
///
/// `E = -Z alpha (eta + beta1)/(2 eta) ± (n_r + |kappa| + 1)/(2 eta) sqrt(R)`
///
/// with `R` from [`dirac_radicand`].
pub fn dirac_energy<T: Real>(state: &QuantumState<T>, p: &ModelParams<T>, branch: Branch) -> EnergyResult<T> {
    let aux = epsilon_beta(T::zero(), state, p, DeltaPolicy::Consistent);
    let big_n = T::of_u32(state.n_r()) + state.kappa_abs() + T::one();
    let two_eta = T::two() * aux.eta;
    let base = -p.z() * p.alpha() * (aux.eta + aux.beta1) / two_eta;
    EnergyResult::from_radicand(
        base,
        big_n / two_eta,
        dirac_radicand(state, p),
        branch,
        EnergySource::Dirac,
    )
}

/// `sqrt(mu0) [1 + Z^2/(n_r + |kappa| + 1)^2]^{-1/2}`.
pub fn coulomb_limit_energy<T: Real>(state: &QuantumState<T>, z: T, mu0: T) -> T {
    let big_n = T::of_u32(state.n_r()) + state.kappa_abs() + T::one();
    mu0.sqrt() / (T::one() + z * z / (big_n * big_n)).sqrt()
}

/// Parameters of the Klein-Gordon spectrum (`mu` is a constant mass here).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KgParams<T> {
    pub z: T,
    pub mu: T,
    pub alpha: T,
}

/// Square-root argument `4 mu^2 - alpha (2 Z mu - gamma)` of the KG energy.
pub fn kg_radicand<T: Real>(state: &QuantumState<T>, p: &KgParams<T>) -> T {
    let (gamma, _) = kg_gamma_eta(state, p);
    T::lit(4.0) * p.mu * p.mu - p.alpha * (T::two() * p.z * p.mu - gamma)
}

fn kg_gamma_eta<T: Real>(state: &QuantumState<T>, p: &KgParams<T>) -> (T, T) {
    let v1 = (state.dim() + T::two() * T::of_u32(state.ell()) - T::one()) * T::half();
    let q = T::of_u32(state.n_r()) + v1;
    let gamma = T::two() * p.z * p.mu - p.alpha * q * q;
    (gamma, q * q + p.z * p.z)
}

/// Klein-Gordon energy for equal vector and scalar potentials,
///
/// `E = -Z gamma/(2 eta) ± (n_r + v1)^2/(2 eta) sqrt(4 mu^2 - alpha (2 Z mu - gamma))`,
///
/// `v1 = (D + 2 ell - 1)/2`, `gamma = 2 Z mu - alpha (n_r + v1)^2`,
/// `eta = (n_r + v1)^2 + Z^2`.
pub fn kg_energy<T: Real>(state: &QuantumState<T>, p: &KgParams<T>, branch: Branch) -> EnergyResult<T> {
    let (gamma, eta) = kg_gamma_eta(state, p);
    let q2 = eta - p.z * p.z;
    let two_eta = T::two() * eta;
    EnergyResult::from_radicand(
        -p.z * gamma / two_eta,
        q2 / two_eta,
        kg_radicand(state, p),
        branch,
        EnergySource::KleinGordon,
    )
}

fn check_principal<T: Real>(n: u32, dim: T) -> Result<T> {
    if n < 1 {
        return Err(Error::domain("principal number must be >= 1", n));
    }
    let k = T::two() * T::of_u32(n) + dim - T::lit(3.0);
    if !(k > T::zero()) {
        return Err(Error::domain("2n + D - 3 must be > 0", k));
    }
    Ok(k)
}

/// `rho1 = (2n + D - 3)^2`.
pub fn rho1<T: Real>(n: u32, dim: T) -> T {
    let k = T::two() * T::of_u32(n) + dim - T::lit(3.0);
    k * k
}

/// `rho2 = (n + (D - 1)/2)^2`.
pub fn rho2<T: Real>(n: u32, dim: T) -> T {
    let k = T::of_u32(n) + (dim - T::one()) * T::half();
    k * k
}

/// Simplified KG energy at `Z = mu = 1`, negative root:
///
/// `E = (2 alpha rho1 - 16)/(4 + rho1) - rho1/(4 + rho1) sqrt(16 - alpha^2 rho1)`.
pub fn kg_energy_simplified<T: Real>(n: u32, dim: T, alpha: T) -> Result<EnergyResult<T>> {
    check_principal(n, dim)?;
    let r1 = rho1(n, dim);
    let four = T::lit(4.0);
    let den = four + r1;
    Ok(EnergyResult::from_radicand(
        (T::two() * alpha * r1 - T::lit(16.0)) / den,
        r1 / den,
        T::lit(16.0) - alpha * alpha * r1,
        Branch::Minus,
        EnergySource::KgSimplified,
    ))
}

/// Square-root argument of the simplified Dirac energy,
/// `4 (rho2 + 1)(alpha + 1)^2 - [alpha (rho2 + 2) + 2]^2`.
pub fn dirac_simplified_radicand<T: Real>(n: u32, dim: T, alpha: T) -> T {
    let r2 = rho2(n, dim);
    let one = T::one();
    let t = alpha * (r2 + T::two()) + T::two();
    T::lit(4.0) * (r2 + one) * (alpha + one) * (alpha + one) - t * t
}

/// Simplified Dirac energy at `Z = mu0 = 1`, negative root:
///
/// `E = -[alpha (rho2 + 1) + (alpha + 2)]/(2(rho2 + 1)) - rho2/(2(rho2 + 1)) sqrt(R)`.
pub fn dirac_energy_simplified<T: Real>(n: u32, dim: T, alpha: T) -> Result<EnergyResult<T>> {
    if n < 1 {
        return Err(Error::domain("principal number must be >= 1", n));
    }
    let r2 = rho2(n, dim);
    let den = T::two() * (r2 + T::one());
    Ok(EnergyResult::from_radicand(
        -(alpha * (r2 + T::one()) + (alpha + T::two())) / den,
        r2 / den,
        dirac_simplified_radicand(n, dim, alpha),
        Branch::Minus,
        EnergySource::DiracSimplified,
    ))
}

/// How a state maps to the principal number used by the simplified formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PrincipalNumber {
    /// `n = n_r + ell + 1`.
    RadialPlusOrbital,
    /// `n = n_r + |kappa| + 1`; only an integer when `D` is odd.
    RadialPlusKappa,
}

impl PrincipalNumber {
    /// Principal number for a state, or `None` when it is not a positive
    /// integer under this interpretation.
    pub fn of<T: Real>(self, state: &QuantumState<T>) -> Option<u32> {
        match self {
            PrincipalNumber::RadialPlusOrbital => Some(state.n_r() + state.ell() + 1),
            PrincipalNumber::RadialPlusKappa => {
                let n = T::of_u32(state.n_r()) + state.kappa_abs() + T::one();
                (n.fract() == T::zero()).then(|| n.to_u32()).flatten()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ThresholdKind {
    Kg,
    Dirac,
}

impl std::str::FromStr for ThresholdKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "kg" | "klein-gordon" => Ok(ThresholdKind::Kg),
            "dirac" => Ok(ThresholdKind::Dirac),
            other => Err(Error::Parameter(format!("unknown threshold kind '{other}'"))),
        }
    }
}

/// Screening value above which the simplified energy turns imaginary:
/// `4/(2n + D - 3)` for KG, `2 (1 + sqrt(1 + rho2))/rho2` for Dirac.
pub fn alpha_threshold<T: Real>(kind: ThresholdKind, n: u32, dim: T) -> Result<T> {
    let k = check_principal(n, dim)?;
    Ok(match kind {
        ThresholdKind::Kg => T::lit(4.0) / k,
        ThresholdKind::Dirac => {
            let r2 = rho2(n, dim);
            T::two() * (T::one() + (T::one() + r2).sqrt()) / r2
        }
    })
}

/// Residual of the termination condition,
/// `n_r + delta + epsilon - sqrt(epsilon^2 - (beta1 + beta2))`, with the
/// non-negative `epsilon`.
pub fn quantization_residual<T: Real>(
    energy: T,
    state: &QuantumState<T>,
    p: &ModelParams<T>,
    policy: DeltaPolicy,
) -> Result<T> {
    let aux = epsilon_beta(energy, state, p, policy);
    let eps = aux.require_epsilon()?;
    residual_with_epsilon(eps, &aux, state.n_r())
}

/// Same residual with `epsilon` replaced by `-epsilon`. A zero here (with a
/// non-zero [`quantization_residual`]) means the energy terminates the series
/// only for the solution that grows as `s^{-epsilon}` at large `r`.
pub fn reflected_quantization_residual<T: Real>(
    energy: T,
    state: &QuantumState<T>,
    p: &ModelParams<T>,
    policy: DeltaPolicy,
) -> Result<T> {
    let aux = epsilon_beta(energy, state, p, policy);
    let eps = aux.require_epsilon()?;
    residual_with_epsilon(-eps, &aux, state.n_r())
}

fn residual_with_epsilon<T: Real>(eps: T, aux: &AuxiliaryQuantities<T>, n_r: u32) -> Result<T> {
    let inner = eps * eps - aux.coupling();
    if inner < T::zero() {
        return Err(Error::ComplexBranch {
            what: "epsilon^2 - (beta1 + beta2)",
            value: inner.as_f64(),
        });
    }
    Ok(T::of_u32(n_r) + aux.delta + eps - inner.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Alignment;
    use approx::assert_relative_eq;

    fn unit(alpha: f64) -> ModelParams<f64> {
        ModelParams::new(1.0, alpha, 1.0).unwrap()
    }

    fn st(n_r: u32, ell: u32, dim: u32) -> QuantumState<f64> {
        QuantumState::new(n_r, ell, dim, Alignment::Unaligned).unwrap()
    }

    #[test]
    fn auxiliary_quantities() {
        let aux = epsilon_beta(0.0, &st(0, 0, 3), &unit(1.0), DeltaPolicy::Consistent);
        assert_relative_eq!(aux.beta1, 3.0);
        assert_relative_eq!(aux.beta2, 1.0);
        assert_relative_eq!(aux.epsilon().unwrap(), 2.0);
        let aux = epsilon_beta(1.0, &st(0, 0, 3), &unit(1.0), DeltaPolicy::Consistent);
        assert_relative_eq!(aux.beta2, 3.0);
        assert_relative_eq!(aux.epsilon().unwrap(), 3f64.sqrt());
        let aux = epsilon_beta(5.0, &st(0, 0, 3), &unit(1.0), DeltaPolicy::Consistent);
        assert!(aux.epsilon().is_none());
        assert!(aux.require_epsilon().is_err());
    }

    #[test]
    fn delta_policies() {
        assert_eq!(DeltaPolicy::Consistent.delta(-2.0), 3.0);
        assert_eq!(DeltaPolicy::Literal.delta(-2.0), 2.0);
        assert_eq!(DeltaPolicy::Literal.delta(1.5), 2.5);
        assert_eq!(DeltaPolicy::Literal.delta(-0.5), 0.5);
        for k in [-3.5, -1.0, -0.5, 0.0, 0.5, 2.0] {
            let d: f64 = regular_exponent(k);
            assert!((d * d - d - k * (k + 1.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn coulomb_limit_values() {
        let s = st(0, 0, 3);
        assert_relative_eq!(coulomb_limit_energy(&s, 1.0, 1.0), 2.0 / 5f64.sqrt(), epsilon = 1e-15);
        assert_relative_eq!(coulomb_limit_energy(&s, 1e-12, 4.0), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn dirac_energy_small_alpha_limit() {
        // The closed form tends to mu0 (±N^2 - Z^2)/(N^2 + Z^2) as alpha -> 0.
        let s = st(0, 0, 3);
        let plus = dirac_energy(&s, &unit(1e-9), Branch::Plus).value().unwrap();
        let minus = dirac_energy(&s, &unit(1e-9), Branch::Minus).value().unwrap();
        assert_relative_eq!(plus, 0.6, epsilon = 1e-7);
        assert_relative_eq!(minus, -1.0, epsilon = 1e-7);
    }

    #[test]
    fn kg_fixture_and_threshold() {
        // 50-digit reference: -0.85912291827592711064740817497...
        let p = KgParams { z: 1.0, mu: 1.0, alpha: 0.5 };
        let e = kg_energy(&st(0, 0, 3), &p, Branch::Minus).value().unwrap();
        assert!((e - -0.859_122_918_275_927_1).abs() < 1e-14);

        for n in 1..=5u32 {
            for dim in 2..=8u32 {
                let d = f64::from(dim);
                let a = alpha_threshold(ThresholdKind::Kg, n, d).unwrap();
                for ell in 0..n {
                    let s = st(n - 1 - ell, ell, dim);
                    let rad = kg_radicand(&s, &KgParams { z: 1.0, mu: 1.0, alpha: a });
                    assert!(rad.abs() < 1e-10, "n={n} D={dim} rad={rad}");
                }
            }
        }
    }

    #[test]
    fn kg_simplified_values() {
        let e = kg_energy_simplified(1, 3.0, 1.0).unwrap().value().unwrap();
        assert!((e - (-1.0 - 3f64.sqrt())).abs() < 1e-14);
        let at = kg_energy_simplified(1, 3.0, 2.0).unwrap();
        assert_eq!(at.radicand, 0.0);
        assert!(at.is_real());
        assert!(!kg_energy_simplified(1, 3.0, 2.0001).unwrap().is_real());
        for n in 1..5 {
            let e: f64 = kg_energy_simplified(n, 4.0, 1e-12).unwrap().value().unwrap();
            assert!((e + 4.0).abs() < 1e-10);
        }
        assert!(kg_energy_simplified(1, 1.0, 0.1).is_err());
        assert!(kg_energy_simplified(0, 5.0, 0.1).is_err());
    }

    #[test]
    fn dirac_simplified_values() {
        // 50-digit reference: -2.28885438199983175712733893498...
        let e: f64 = dirac_energy_simplified(1, 3.0, 0.5).unwrap().value().unwrap();
        assert!((e - -2.288_854_381_999_831_7).abs() < 1e-14);
        let th = alpha_threshold(ThresholdKind::Dirac, 1, 3.0).unwrap();
        assert_relative_eq!(th, (1.0 + 5f64.sqrt()) / 2.0, epsilon = 1e-15);
        assert!(dirac_simplified_radicand(1, 3.0, th).abs() < 1e-12);
        assert!(dirac_simplified_radicand(1, 3.0, th * (1.0 + 1e-6)) < 0.0);
        assert!(dirac_simplified_radicand(1, 3.0, th * (1.0 - 1e-6)) > 0.0);
    }

    #[test]
    fn threshold_values() {
        assert_eq!(alpha_threshold(ThresholdKind::Kg, 1, 3.0).unwrap(), 2.0);
        assert!(alpha_threshold(ThresholdKind::Kg, 1, 1.0).is_err());
        for kind in [ThresholdKind::Kg, ThresholdKind::Dirac] {
            for n in 1..=4 {
                let a: f64 = alpha_threshold(kind, n, 3.0).unwrap();
                let radicand = |x: f64| match kind {
                    ThresholdKind::Kg => kg_energy_simplified(n, 3.0, x).unwrap().radicand,
                    ThresholdKind::Dirac => dirac_simplified_radicand(n, 3.0, x),
                };
                assert!(radicand(a * (1.0 + 1e-6)) < 0.0);
                assert!(radicand(a * (1.0 - 1e-6)) > 0.0);
            }
        }
    }

    #[test]
    fn dirac_radicand_changes_sign_with_alpha() {
        // Large screening drives the closed-form radicand negative.
        let s = st(1, 0, 3);
        assert!(dirac_energy(&s, &unit(0.1), Branch::Minus).is_real());
        let e = dirac_energy(&s, &unit(3.0), Branch::Minus);
        assert!(!e.is_real());
        assert!(e.radicand < 0.0);
        assert!(e.require_real().is_err());
    }

    #[test]
    fn residual_is_not_zero_at_closed_form_energy() {
        // The closed-form energy solves the squared termination condition but
        // with epsilon < 0: the principal residual is 2 min(N, eps) and the
        // reflected one vanishes.
        let s = st(0, 0, 3);
        let p = unit(0.1);
        let e = dirac_energy(&s, &p, Branch::Minus).value().unwrap();
        let r = quantization_residual(e, &s, &p, DeltaPolicy::Consistent).unwrap();
        let eps = epsilon_beta(e, &s, &p, DeltaPolicy::Consistent).epsilon().unwrap();
        assert_relative_eq!(r, 2.0 * eps.min(2.0), epsilon = 1e-9);
        let refl = reflected_quantization_residual(e, &s, &p, DeltaPolicy::Consistent).unwrap();
        assert!(refl.abs() < 1e-9, "{refl}");
    }

    #[test]
    fn residual_complex_branch() {
        // beta1 + beta2 > epsilon^2 makes the inner root complex.
        let s = st(0, 0, 3);
        let err = quantization_residual(0.95, &s, &unit(0.1), DeltaPolicy::Consistent).unwrap_err();
        assert!(matches!(err, Error::ComplexBranch { .. }));
    }

    #[test]
    fn principal_numbers() {
        let s = st(1, 1, 3);
        assert_eq!(PrincipalNumber::RadialPlusOrbital.of(&s), Some(3));
        assert_eq!(PrincipalNumber::RadialPlusKappa.of(&s), Some(4));
        assert_eq!(PrincipalNumber::RadialPlusKappa.of(&st(0, 0, 4)), None);
    }

    #[test]
    fn kg_degeneracy_under_shift() {
        for n in 1..6u32 {
            for dim in 3..12u32 {
                let d = f64::from(dim);
                assert_eq!(rho1(n, d), rho1(n + 1, d - 2.0));
                let a = kg_energy_simplified(n, d, 0.05).unwrap();
                let b = kg_energy_simplified(n + 1, d - 2.0, 0.05).unwrap();
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn f32_agrees_with_f64() {
        let s32 = QuantumState::<f32>::new(1, 1, 3, Alignment::Aligned).unwrap();
        let p32 = ModelParams::<f32>::new(1.0, 0.2, 1.0).unwrap();
        let s64 = QuantumState::<f64>::new(1, 1, 3, Alignment::Aligned).unwrap();
        let e32 = dirac_energy(&s32, &p32, Branch::Minus).value().unwrap();
        let e64 = dirac_energy(&s64, &unit(0.2), Branch::Minus).value().unwrap();
        assert!((f64::from(e32) - e64).abs() < 1e-5);
    }

    proptest::proptest! {
        #[test]
        fn epsilon_identity(e in -2.0f64..2.0, z in 0.2f64..3.0, a in 0.01f64..2.0, mu0 in 0.0f64..3.0) {
            let p = ModelParams::new(z, a, mu0).unwrap();
            let aux = epsilon_beta(e, &st(0, 1, 3), &p, DeltaPolicy::Consistent);
            if let Some(eps) = aux.epsilon() {
                let lhs = a * a * eps * eps + e * e - mu0 * mu0 - aux.beta1 * a * a;
                proptest::prop_assert!(lhs.abs() < 1e-12 * (1.0 + aux.beta1 * a * a));
            }
        }

        #[test]
        fn plus_branch_not_below_minus(n_r in 0u32..5, ell in 0u32..3, dim in 2u32..8, a in 0.001f64..2.0) {
            let p = unit(a);
            let s = st(n_r, ell, dim);
            let plus = dirac_energy(&s, &p, Branch::Plus);
            let minus = dirac_energy(&s, &p, Branch::Minus);
            proptest::prop_assert_eq!(plus.is_real(), minus.is_real());
            if let (Some(x), Some(y)) = (plus.value(), minus.value()) {
                proptest::prop_assert!(x >= y);
            }
            let kp = KgParams { z: 1.0, mu: 1.0, alpha: a };
            if let (Some(x), Some(y)) = (kg_energy(&s, &kp, Branch::Plus).value(), kg_energy(&s, &kp, Branch::Minus).value()) {
                proptest::prop_assert!(x >= y);
            }
        }
    }
}
