//! Trigonometric combinations that cancel catastrophically near zero, with
//! Taylor series below a switch-over point.

use crate::scalar::Real;

const SERIES_BELOW: f64 = 0.5;

fn alternating_series<T: Real>(x: T, first_power: i32, mut coeff: impl FnMut(usize) -> T) -> T {
    let x2 = x * x;
    let mut term = x.powi(first_power);
    let mut sum = T::zero();
    for k in 0..40 {
        let contrib = term * coeff(k);
        sum = if k % 2 == 0 { sum + contrib } else { sum - contrib };
        if contrib.abs() <= T::epsilon() * sum.abs() {
            break;
        }
        term = term * x2;
    }
    sum
}

/// `2 phi - sin(2 phi)`; behaves like `(4/3) phi^3` at zero.
pub fn two_phi_minus_sin_two_phi<T: Real>(phi: T) -> T {
    let x = phi + phi;
    if phi.abs() < T::lit(SERIES_BELOW) {
        // x - sin x = x^3/3! - x^5/5! + ...
        let mut fact = T::lit(6.0);
        alternating_series(x, 3, |k| {
            if k > 0 {
                let a = T::count(2 * k + 2);
                let b = T::count(2 * k + 3);
                fact = fact * a * b;
            }
            T::one() / fact
        })
    } else {
        x - x.sin()
    }
}

/// `sin phi - phi cos phi`; behaves like `phi^3 / 3` at zero.
pub fn sin_minus_phi_cos<T: Real>(phi: T) -> T {
    if phi.abs() < T::lit(SERIES_BELOW) {
        // sum_{k>=1} (-1)^{k+1} 2k phi^{2k+1} / (2k+1)!
        let mut fact = T::lit(6.0);
        alternating_series(phi, 3, |k| {
            if k > 0 {
                let a = T::count(2 * k + 2);
                let b = T::count(2 * k + 3);
                fact = fact * a * b;
            }
            T::count(2 * k + 2) / fact
        })
    } else {
        phi.sin() - phi * phi.cos()
    }
}

/// `sin(phi) / phi` with value 1 at zero.
pub fn sinc<T: Real>(phi: T) -> T {
    if phi.abs() < T::lit(1e-4) {
        let p2 = phi * phi;
        T::one() - p2 / T::lit(6.0) + p2 * p2 / T::lit(120.0)
    } else {
        phi.sin() / phi
    }
}

/// `(2 phi - sin 2 phi) / (2 phi^2)`: the central coordinate of the unit CC
/// sphere point with turning parameter `phi` and `|chi| = 1`. Zero at zero.
pub fn sphere_height<T: Real>(phi: T) -> T {
    if phi == T::zero() {
        return T::zero();
    }
    two_phi_minus_sin_two_phi(phi) / (T::two() * phi * phi)
}

/// `mu(phi) = (2 phi - sin 2 phi) / (2 sin^2 phi)`, the ratio `|t| / |z|^2` along
/// the CC sphere. Strictly increasing from 0 on `[0, pi)`, with a pole at `pi`.
pub fn turning_ratio<T: Real>(phi: T) -> T {
    if phi == T::zero() {
        return T::zero();
    }
    let s = phi.sin();
    two_phi_minus_sin_two_phi(phi) / (T::two() * s * s)
}
