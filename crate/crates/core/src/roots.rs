//! Bracketed scalar root finding (Brent's method: bisection, secant and
//! inverse quadratic steps, never leaving the bracket).

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Root<T> {
    pub x: T,
    pub residual: T,
    pub iterations: usize,
}

/// Finds `x` in `[lo, hi]` with `f(x) = 0`, given `f(lo)` and `f(hi)` of
/// opposite sign (or one of them zero). Stops when the bracket is narrower
/// than `tol` (plus a few ulps of `x`).
pub fn brent<T, F>(mut f: F, lo: T, hi: T, tol: T, max_iterations: usize) -> Result<Root<T>>
where
    T: Real,
    F: FnMut(T) -> T,
{
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == T::zero() {
        return Ok(Root { x: a, residual: fa, iterations: 0 });
    }
    if fb == T::zero() {
        return Ok(Root { x: b, residual: fb, iterations: 0 });
    }
    if fa.is_nan() || fb.is_nan() || (fa > T::zero()) == (fb > T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "root not bracketed: f({lo}) = {fa}, f({hi}) = {fb}"
        )));
    }

    let two = T::two();
    let half = T::lit(0.5);
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;

    for iteration in 1..=max_iterations {
        if (fb > T::zero()) == (fc > T::zero()) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = two * T::epsilon() * b.abs() + half * tol;
        let xm = half * (c - b);
        if xm.abs() <= tol1 || fb == T::zero() {
            return Ok(Root { x: b, residual: fb, iterations: iteration });
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                // secant
                p = two * xm * s;
                q = T::one() - s;
            } else {
                // inverse quadratic interpolation
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (two * xm * qa * (qa - r) - (b - a) * (r - T::one()));
                q = (qa - T::one()) * (r - T::one()) * (s - T::one());
            }
            if p > T::zero() {
                q = -q;
            }
            p = p.abs();
            let bound1 = T::lit(3.0) * xm * q - (tol1 * q).abs();
            let bound2 = (e * q).abs();
            if two * p < bound1.min(bound2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b = if d.abs() > tol1 {
            b + d
        } else {
            b + tol1.copysign(xm)
        };
        fb = f(b);
        if fb.is_nan() {
            return Err(Error::NonConvergence {
                what: "bracketed root search (NaN)",
                iterations: iteration,
                residual: f64::NAN,
            });
        }
    }
    Err(Error::NonConvergence {
        what: "bracketed root search",
        iterations: max_iterations,
        residual: fb.approx_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn finds_sqrt_two() {
        let r = brent(|x: f64| x * x - 2.0, 0.0, 2.0, 1e-14, 100).unwrap();
        assert_abs_diff_eq!(r.x, 2f64.sqrt(), epsilon = 1e-13);
    }

    #[test]
    fn works_in_f32() {
        let r = brent(|x: f32| x.cos() - x, 0.0, 1.0, 1e-6, 100).unwrap();
        assert!((r.x - 0.739_085_1).abs() < 1e-5);
    }

    #[test]
    fn endpoint_roots() {
        assert_eq!(brent(|x: f64| x, 0.0, 1.0, 1e-12, 10).unwrap().x, 0.0);
        assert_eq!(brent(|x: f64| x - 1.0, 0.0, 1.0, 1e-12, 10).unwrap().x, 1.0);
    }

    #[test]
    fn unbracketed_is_rejected() {
        assert!(brent(|x: f64| x * x + 1.0, -1.0, 1.0, 1e-12, 10).is_err());
    }

    #[test]
    fn iteration_cap_reports_residual() {
        let err = brent(|x: f64| x.powi(3) - 0.3, 0.0, 1.0, 1e-15, 2).unwrap_err();
        assert!(matches!(err, Error::NonConvergence { iterations: 2, .. }));
    }

    #[test]
    fn steep_monotone_function() {
        // shape of the CC turning ratio near its pole
        let f = |x: f64| 1.0 / (std::f64::consts::PI - x).powi(2) - 1e12;
        let r = brent(f, 0.0, std::f64::consts::PI - 1e-9, 1e-15, 200).unwrap();
        assert_abs_diff_eq!(r.x, std::f64::consts::PI - 1e-6, epsilon = 1e-12);
    }
}
