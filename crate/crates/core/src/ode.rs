//! Adaptive Dormand-Prince 5(4) integration of second-order linear equations
//! written as first-order pairs `(F, F')`.
//!
//! The state is rescaled whenever it grows large, so exponentially growing
//! solutions can be followed over long ranges; only the direction of the
//! final state (and hence its log-derivative) is meaningful.

use crate::error::{Error, Result};
use crate::real::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dopri<T> {
    pub rtol: T,
    pub atol: T,
    /// Upper bound on `|h|`; keeps sign changes of `F` from hiding inside a
    /// single step.
    pub max_step: T,
    pub max_steps: usize,
}

impl<T: Real> Default for Dopri<T> {
    fn default() -> Self {
        Self {
            rtol: T::lit(1e-10),
            atol: T::lit(1e-300),
            max_step: T::lit(0.5),
            max_steps: 2_000_000,
        }
    }
}

/// End state of an integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Endpoint<T> {
    pub x: T,
    /// `(F, F')`, up to the positive factor `exp(log_scale)`.
    pub y: [T; 2],
    pub log_scale: T,
    /// Sign changes of `F` seen between accepted steps.
    pub sign_changes: usize,
    pub steps: usize,
}

impl<T: Real> Endpoint<T> {
    pub fn log_derivative(&self) -> T {
        self.y[1] / self.y[0]
    }
}

const RESCALE_AT: f64 = 1e100;

// Dormand-Prince tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Difference between the 5th- and 4th-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

impl<T: Real> Dopri<T> {
    pub fn with_rtol(rtol: T) -> Self {
        Self {
            rtol,
            ..Self::default()
        }
    }

    /// Integrates `F'' = q(x) F` from `x0` to `x1` (either direction).
    pub fn linear<Q: Fn(T) -> T>(&self, q: Q, x0: T, y0: [T; 2], x1: T) -> Result<Endpoint<T>> {
        self.integrate(|x, y: [T; 2]| [y[1], q(x) * y[0]], x0, y0, x1)
    }

    pub fn integrate<R>(&self, rhs: R, x0: T, y0: [T; 2], x1: T) -> Result<Endpoint<T>>
    where
        R: Fn(T, [T; 2]) -> [T; 2],
    {
        let lit = T::lit;
        let span = x1 - x0;
        let dir = if span >= T::zero() { T::one() } else { -T::one() };
        let mut x = x0;
        let mut y = y0;
        let mut log_scale = T::zero();
        let mut sign_changes = 0usize;
        let mut steps = 0usize;
        if span == T::zero() {
            return Ok(Endpoint { x, y, log_scale, sign_changes, steps });
        }
        let max_h = self.max_step.min(span.abs());
        let mut h = (span.abs() * lit(1e-4)).min(max_h).max(lit(1e-14) * (T::one() + x0.abs()));
        let mut k1 = rhs(x, y);
        check_finite(x, &k1)?;

        while (x1 - x) * dir > T::zero() {
            if steps >= self.max_steps {
                return Err(Error::Integration {
                    at: x.as_f64(),
                    reason: format!("step budget of {} exhausted", self.max_steps),
                });
            }
            let remaining = (x1 - x).abs();
            let last = h >= remaining;
            let hh = if last { remaining } else { h } * dir;

            let stage = |c: f64, a: &[(f64, [T; 2])]| -> [T; 2] {
                let mut yy = y;
                for (coef, k) in a {
                    yy[0] = yy[0] + hh * lit(*coef) * k[0];
                    yy[1] = yy[1] + hh * lit(*coef) * k[1];
                }
                rhs(x + hh * lit(c), yy)
            };
            let k2 = stage(C2, &[(A21, k1)]);
            let k3 = stage(C3, &[(A31, k1), (A32, k2)]);
            let k4 = stage(C4, &[(A41, k1), (A42, k2), (A43, k3)]);
            let k5 = stage(C5, &[(A51, k1), (A52, k2), (A53, k3), (A54, k4)]);
            let k6 = stage(1.0, &[(A61, k1), (A62, k2), (A63, k3), (A64, k4), (A65, k5)]);
            let mut y_new = y;
            for i in 0..2 {
                y_new[i] = y[i]
                    + hh * (lit(B1) * k1[i] + lit(B3) * k3[i] + lit(B4) * k4[i] + lit(B5) * k5[i]
                        + lit(B6) * k6[i]);
            }
            let x_new = if last { x1 } else { x + hh };
            let k7 = rhs(x_new, y_new);

            let scale = self.rtol * norm_inf(&y).max(norm_inf(&y_new)) + self.atol;
            let mut err = T::zero();
            for i in 0..2 {
                let e = hh
                    * (lit(E1) * k1[i] + lit(E3) * k3[i] + lit(E4) * k4[i] + lit(E5) * k5[i]
                        + lit(E6) * k6[i]
                        + lit(E7) * k7[i]);
                err = err.max(e.abs() / scale);
            }
            if !err.is_finite() || !y_new[0].is_finite() || !y_new[1].is_finite() {
                if h <= lit(1e-15) * (T::one() + x.abs()) {
                    return Err(Error::Integration {
                        at: x.as_f64(),
                        reason: format!("non-finite state after {steps} steps"),
                    });
                }
                h = h * lit(0.1);
                continue;
            }

            if err <= T::one() {
                if (y_new[0] > T::zero() && y[0] < T::zero()) || (y_new[0] < T::zero() && y[0] > T::zero()) {
                    sign_changes += 1;
                }
                x = x_new;
                y = y_new;
                k1 = k7;
                steps += 1;
                let mag = norm_inf(&y);
                if mag > lit(RESCALE_AT) || (mag < lit(1.0 / RESCALE_AT) && mag > T::zero()) {
                    y = [y[0] / mag, y[1] / mag];
                    k1 = [k1[0] / mag, k1[1] / mag];
                    log_scale = log_scale + mag.ln();
                }
            }
            let factor = if err == T::zero() {
                lit(5.0)
            } else {
                (lit(0.9) * err.powf(lit(-0.2))).min(lit(5.0)).max(lit(0.2))
            };
            h = (h * factor).min(max_h);
            if h <= lit(1e-15) * (T::one() + x.abs()) {
                return Err(Error::Integration {
                    at: x.as_f64(),
                    reason: "step size underflow".into(),
                });
            }
        }
        Ok(Endpoint { x, y, log_scale, sign_changes, steps })
    }
}

fn norm_inf<T: Real>(y: &[T; 2]) -> T {
    y[0].abs().max(y[1].abs())
}

fn check_finite<T: Real>(x: T, k: &[T; 2]) -> Result<()> {
    if k[0].is_finite() && k[1].is_finite() {
        Ok(())
    } else {
        Err(Error::Integration {
            at: x.as_f64(),
            reason: "non-finite derivative at start".into(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator() {
        let d = Dopri::<f64>::default();
        let end = d.linear(|_| -1.0, 0.0, [0.0, 1.0], 10.0).unwrap();
        assert!((end.y[0] - 10f64.sin()).abs() < 1e-8);
        assert!((end.y[1] - 10f64.cos()).abs() < 1e-8);
        assert_eq!(end.sign_changes, 3);
    }

    #[test]
    fn backward_exponential_with_rescaling() {
        let d = Dopri::<f64>::default();
        // F = e^{-3x} integrated from x = 400 back to 0 grows by e^{1200}.
        let end = d.linear(|_| 9.0, 400.0, [1.0, -3.0], 0.0).unwrap();
        assert!((end.log_derivative() + 3.0).abs() < 1e-9);
        let log_f = end.log_scale + end.y[0].abs().ln();
        assert!((log_f - 1200.0).abs() < 1e-6);
    }

    #[test]
    fn airy_like_reference() {
        // F'' = x F from 0 to 2 vs a tight-tolerance run.
        let coarse = Dopri::<f64>::with_rtol(1e-8).linear(|x| x, 0.0, [1.0, 0.0], 2.0).unwrap();
        let fine = Dopri::<f64>::with_rtol(1e-12).linear(|x| x, 0.0, [1.0, 0.0], 2.0).unwrap();
        assert!((coarse.y[0] - fine.y[0]).abs() < 1e-7 * fine.y[0].abs());
    }

    #[test]
    fn non_finite_rhs_is_reported() {
        let err = Dopri::<f64>::default()
            .linear(|x| 1.0 / (x - 0.5), 0.0, [1.0, 0.0], 1.0)
            .unwrap_err();
        assert!(matches!(err, Error::Integration { .. }));
    }
}
