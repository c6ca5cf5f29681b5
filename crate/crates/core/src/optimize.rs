//! One-dimensional maximization.

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq)]
pub struct Maximum<T, V> {
    pub x: T,
    pub value: V,
    /// Every evaluation in order, endpoints first.
    pub trace: Vec<(T, V)>,
}

/// Golden-section search for the maximum of `f` on `[lo, hi]`, stopping when
/// the bracket is shorter than `tol`. `key` extracts the number to compare
/// from each evaluation. The endpoints are evaluated too, so a monotone
/// objective returns the better endpoint exactly.
pub fn golden_section_max<T, V, F, K>(mut f: F, key: K, lo: T, hi: T, tol: T, max_iterations: usize) -> Result<Maximum<T, V>>
where
    T: Real,
    V: Clone,
    F: FnMut(T) -> Result<V>,
    K: Fn(&V) -> T,
{
    if !(lo <= hi) || !(tol > T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "golden section needs lo <= hi and tol > 0 (got [{lo}, {hi}], tol {tol})"
        )));
    }
    let mut trace = Vec::new();
    let mut eval = |x: T, trace: &mut Vec<(T, V)>| -> Result<T> {
        let v = f(x)?;
        let k = key(&v);
        trace.push((x, v));
        Ok(k)
    };
    eval(lo, &mut trace)?;
    if hi > lo {
        eval(hi, &mut trace)?;
        let inv_phi = (T::lit(5.0).sqrt() - T::one()) / T::two();
        let (mut a, mut b) = (lo, hi);
        let mut c = b - inv_phi * (b - a);
        let mut d = a + inv_phi * (b - a);
        let mut fc = eval(c, &mut trace)?;
        let mut fd = eval(d, &mut trace)?;
        for _ in 0..max_iterations {
            if b - a <= tol {
                break;
            }
            if fc >= fd {
                b = d;
                d = c;
                fd = fc;
                c = b - inv_phi * (b - a);
                fc = eval(c, &mut trace)?;
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + inv_phi * (b - a);
                fd = eval(d, &mut trace)?;
            }
        }
    }
    // first maximal entry wins ties
    let mut best = 0;
    for (i, (_, v)) in trace.iter().enumerate() {
        if key(v) > key(&trace[best].1) {
            best = i;
        }
    }
    let (x, value) = trace[best].clone();
    Ok(Maximum { x, value, trace })
}
