//! Jacobi polynomials, the terminating Gauss hypergeometric series and the
//! adaptive quadrature used for normalization.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::real::Real;

/// Degree and parameters of `P_n^{(a,b)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JacobiParams<T> {
    pub degree: u32,
    pub a: T,
    pub b: T,
}

impl<T: Real> JacobiParams<T> {
    pub fn new(degree: u32, a: T, b: T) -> Result<Self> {
        if !(a > -T::one()) {
            return Err(Error::domain("Jacobi parameter a must be > -1", a));
        }
        if !(b > -T::one()) {
            return Err(Error::domain("Jacobi parameter b must be > -1", b));
        }
        Ok(Self { degree, a, b })
    }
}

/// `P_n^{(a,b)}(x)` by the three-term recurrence.
pub fn jacobi_poly<T: Real>(jp: &JacobiParams<T>, x: T) -> Result<T> {
    let jp = JacobiParams::new(jp.degree, jp.a, jp.b)?;
    Ok(jacobi_unchecked(jp.degree, jp.a, jp.b, x))
}

/// Derivative `d/dx P_n^{(a,b)}(x) = (n + a + b + 1)/2 P_{n-1}^{(a+1,b+1)}(x)`.
pub fn jacobi_derivative<T: Real>(jp: &JacobiParams<T>, x: T) -> Result<T> {
    let jp = JacobiParams::new(jp.degree, jp.a, jp.b)?;
    Ok(jacobi_derivative_unchecked(jp.degree, jp.a, jp.b, x, 1))
}

/// `k`-th derivative via repeated use of the shift relation.
pub(crate) fn jacobi_derivative_unchecked<T: Real>(n: u32, a: T, b: T, x: T, k: u32) -> T {
    if k > n {
        return T::zero();
    }
    let mut factor = T::one();
    for j in 0..k {
        let deg = T::of_u32(n - j);
        let shift = T::of_u32(2 * j);
        factor = factor * (deg + a + b + shift + T::one()) * T::half();
    }
    let kk = T::of_u32(k);
    factor * jacobi_unchecked(n - k, a + kk, b + kk, x)
}

pub(crate) fn jacobi_unchecked<T: Real>(n: u32, a: T, b: T, x: T) -> T {
    let one = T::one();
    let two = T::two();
    let p0 = one;
    if n == 0 {
        return p0;
    }
    let p1 = (a + one) + (a + b + two) * (x - one) * T::half();
    if n == 1 {
        return p1;
    }
    let (mut prev, mut cur) = (p0, p1);
    let ab = a + b;
    for m in 2..=n {
        let m = T::of_u32(m);
        let c = two * m + ab;
        let lead = two * m * (m + ab) * (c - two);
        let mid = (c - one) * (c * (c - two) * x + a * a - b * b);
        let back = two * (m + a - one) * (m + b - one) * c;
        let next = (mid * cur - back * prev) / lead;
        prev = cur;
        cur = next;
    }
    cur
}

/// Finite sum of `2F1(-n, b; c; s)`.
pub fn hyp2f1_terminating<T: Real>(n: u32, b: T, c: T, s: T) -> Result<T> {
    // Poles: c + k = 0 for some k in 0..n.
    for k in 0..n {
        let d = c + T::of_u32(k);
        if d == T::zero() {
            return Err(Error::domain("2F1 denominator parameter hits a pole", c));
        }
    }
    let mut term = T::one();
    let mut sum = T::one();
    for k in 0..n {
        let kk = T::of_u32(k);
        let num = (kk - T::of_u32(n)) * (b + kk);
        let den = (c + kk) * (kk + T::one());
        term = term * num / den * s;
        sum = sum + term;
    }
    Ok(sum)
}

/// Prefactor `Gamma(n+a+1) / (n! Gamma(a+1)) = prod_{k=1..n} (a+k)/k`.
pub fn jacobi_endpoint_factor<T: Real>(n: u32, a: T) -> T {
    (1..=n).fold(T::one(), |acc, k| {
        let kk = T::of_u32(k);
        acc * (a + kk) / kk
    })
}

/// `P_n^{(a,b)}(x)` through its hypergeometric representation. Kept as an
/// independent route for cross-checks; the recurrence is the primary
/// evaluator.
pub fn jacobi_via_hypergeometric<T: Real>(jp: &JacobiParams<T>, x: T) -> Result<T> {
    let jp = JacobiParams::new(jp.degree, jp.a, jp.b)?;
    let n = jp.degree;
    let b2 = jp.a + jp.b + T::of_u32(n) + T::one();
    let c = T::one() + jp.a;
    let f = hyp2f1_terminating(n, b2, c, (T::one() - x) * T::half())?;
    Ok(jacobi_endpoint_factor(n, jp.a) * f)
}

/// [`jacobi_via_hypergeometric`] carried out in double-double arithmetic.
/// The terminating series alternates in sign and its largest terms exceed the
/// result by several orders of magnitude near `x = 0`, which costs the plain
/// `f64` sum up to `1e-9` absolute at degree 10.
pub fn jacobi_via_hypergeometric_dd(jp: &JacobiParams<f64>, x: f64) -> Result<f64> {
    use twofloat::TwoFloat;
    let jp = JacobiParams::new(jp.degree, jp.a, jp.b)?;
    let n = jp.degree;
    let nn = TwoFloat::from(f64::from(n));
    let a = TwoFloat::from(jp.a);
    let b2 = a + jp.b + nn + 1.0;
    let c = a + 1.0;
    for k in 0..n {
        if c + f64::from(k) == TwoFloat::from(0.0) {
            return Err(Error::domain("2F1 denominator parameter hits a pole", jp.a + 1.0));
        }
    }
    let s = (TwoFloat::from(1.0) - x) * 0.5;
    let mut term = TwoFloat::from(1.0);
    let mut sum = TwoFloat::from(1.0);
    let mut prefactor = TwoFloat::from(1.0);
    for k in 0..n {
        let kk = TwoFloat::from(f64::from(k));
        term = term * (kk - nn) * (b2 + kk) * dd_recip((c + kk) * (kk + 1.0)) * s;
        sum += term;
        prefactor = prefactor * (a + kk + 1.0) / f64::from(k + 1);
    }
    Ok(f64::from(prefactor * sum))
}

/// Reciprocal refined by one Newton step; `TwoFloat / TwoFloat` in the
/// `twofloat` crate only delivers `f64` accuracy.
fn dd_recip(d: twofloat::TwoFloat) -> twofloat::TwoFloat {
    let r = twofloat::TwoFloat::from(d.hi().recip());
    r + r * (1.0 - d * r)
}

/// Number of strict sign changes, ignoring samples with magnitude below
/// `1e-12 * max|f|`.
pub fn sign_changes<T: Real>(samples: &[T]) -> usize {
    let peak = samples
        .iter()
        .fold(T::zero(), |m, v| if v.abs() > m { v.abs() } else { m });
    if peak == T::zero() {
        return 0;
    }
    let floor = peak * T::lit(1e-12);
    let mut last: Option<bool> = None;
    let mut count = 0;
    for v in samples {
        if v.abs() <= floor {
            continue;
        }
        let pos = *v > T::zero();
        if let Some(prev) = last {
            if prev != pos {
                count += 1;
            }
        }
        last = Some(pos);
    }
    count
}

/// Adaptive Simpson settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature<T> {
    pub abs_tol: T,
    pub max_depth: u32,
}

impl<T: Real> Default for Quadrature<T> {
    fn default() -> Self {
        Self {
            abs_tol: T::lit(1e-10),
            max_depth: 40,
        }
    }
}

impl<T: Real> Quadrature<T> {
    /// Integrates `f` over `[a, b]`.
    pub fn integrate<F: Fn(T) -> T>(&self, f: F, a: T, b: T) -> Result<T> {
        let fa = eval(&f, a)?;
        let fb = eval(&f, b)?;
        let m = (a + b) * T::half();
        let fm = eval(&f, m)?;
        let whole = simpson(a, b, fa, fm, fb);
        self.recurse(&f, a, b, fa, fm, fb, whole, self.abs_tol, self.max_depth)
    }

    /// Integrates over consecutive breakpoints, splitting the tolerance in
    /// proportion to the interval length.
    pub fn integrate_on<F: Fn(T) -> T>(&self, f: F, breakpoints: &[T]) -> Result<T> {
        if breakpoints.len() < 2 {
            return Err(Error::Parameter("need at least two breakpoints".into()));
        }
        let span = breakpoints[breakpoints.len() - 1] - breakpoints[0];
        let mut total = T::zero();
        for w in breakpoints.windows(2) {
            let sub = Quadrature {
                abs_tol: self.abs_tol * (w[1] - w[0]) / span,
                max_depth: self.max_depth,
            };
            total = total + sub.integrate(&f, w[0], w[1])?;
        }
        Ok(total)
    }

    #[allow(clippy::too_many_arguments)]
    fn recurse<F: Fn(T) -> T>(
        &self,
        f: &F,
        a: T,
        b: T,
        fa: T,
        fm: T,
        fb: T,
        whole: T,
        tol: T,
        depth: u32,
    ) -> Result<T> {
        let m = (a + b) * T::half();
        let lm = (a + m) * T::half();
        let rm = (m + b) * T::half();
        let flm = eval(f, lm)?;
        let frm = eval(f, rm)?;
        let left = simpson(a, m, fa, flm, fm);
        let right = simpson(m, b, fm, frm, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= T::lit(15.0) * tol {
            return Ok(left + right + delta / T::lit(15.0));
        }
        let half = tol * T::half();
        Ok(self.recurse(f, a, m, fa, flm, fm, left, half, depth - 1)?
            + self.recurse(f, m, b, fm, frm, fb, right, half, depth - 1)?)
    }
}

#[inline]
fn simpson<T: Real>(a: T, b: T, fa: T, fm: T, fb: T) -> T {
    (b - a) / T::lit(6.0) * (fa + T::lit(4.0) * fm + fb)
}

#[inline]
fn eval<T: Real, F: Fn(T) -> T>(f: &F, x: T) -> Result<T> {
    let v = f(x);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Integration {
            at: x.as_f64(),
            reason: format!("non-finite integrand value {v}"),
        })
    }
}

/// Adaptive Simpson with the default tolerance (1e-10) and depth (40).
pub fn integrate<T: Real, F: Fn(T) -> T>(f: F, a: T, b: T) -> Result<T> {
    Quadrature::default().integrate(f, a, b)
}
