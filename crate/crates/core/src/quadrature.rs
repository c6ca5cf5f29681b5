//! Globally adaptive Gauss-Kronrod (7/15) quadrature on a finite interval.
//!
//! The interval with the largest error estimate is bisected until the summed
//! estimate `sum |K15 - G7|` drops below the absolute tolerance.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the odd-indexed Kronrod nodes (XGK[1], XGK[3], XGK[5], XGK[7]).
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            max_subdivisions: 500,
        }
    }
}

impl QuadratureConfig {
    pub fn with_tol(abs_tol: f64) -> Self {
        Self {
            abs_tol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || self.max_subdivisions == 0 {
            return Err(Error::InvalidParameter(format!(
                "quadrature needs abs_tol > 0 and max_subdivisions >= 1, got {self:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureResult<T> {
    pub value: T,
    pub error: T,
    pub evaluations: usize,
    pub subdivisions: usize,
}

#[derive(Clone, Copy)]
struct Panel<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

fn gauss_kronrod<T: Real, F: FnMut(T) -> T>(f: &mut F, a: T, b: T) -> Panel<T> {
    let half = T::lit(0.5);
    let center = half * (a + b);
    let radius = half * (b - a);
    let fc = f(center);
    let mut kronrod = fc * T::lit(WGK[7]);
    let mut gauss = fc * T::lit(WG[3]);
    for i in 0..7 {
        let dx = radius * T::lit(XGK[i]);
        let pair = f(center - dx) + f(center + dx);
        kronrod = kronrod + pair * T::lit(WGK[i]);
        if i % 2 == 1 {
            gauss = gauss + pair * T::lit(WG[i / 2]);
        }
    }
    Panel {
        a,
        b,
        value: kronrod * radius,
        error: ((kronrod - gauss) * radius).abs(),
    }
}

/// Integrates `f` over `[a, b]`.
pub fn integrate<T, F>(mut f: F, a: T, b: T, config: &QuadratureConfig) -> Result<QuadratureResult<T>>
where
    T: Real,
    F: FnMut(T) -> T,
{
    config.validate()?;
    let tol = T::lit(config.abs_tol);
    let mut panels = vec![gauss_kronrod(&mut f, a, b)];
    let mut evaluations = 15;
    loop {
        let value = panels.iter().fold(T::zero(), |s, p| s + p.value);
        let error = panels.iter().fold(T::zero(), |s, p| s + p.error);
        if error.is_nan() || value.is_nan() {
            return Err(Error::QuadratureNonConvergence {
                achieved: f64::NAN,
                requested: config.abs_tol,
            });
        }
        if error <= tol {
            return Ok(QuadratureResult {
                value,
                error,
                evaluations,
                subdivisions: panels.len(),
            });
        }
        if panels.len() >= config.max_subdivisions {
            return Err(Error::QuadratureNonConvergence {
                achieved: error.approx_f64(),
                requested: config.abs_tol,
            });
        }
        let worst = (0..panels.len())
            .max_by(|&i, &j| panels[i].error.partial_cmp(&panels[j].error).unwrap())
            .unwrap();
        let p = panels.swap_remove(worst);
        let mid = T::lit(0.5) * (p.a + p.b);
        if !(mid > p.a && mid < p.b) {
            // interval exhausted at working precision
            return Err(Error::QuadratureNonConvergence {
                achieved: error.approx_f64(),
                requested: config.abs_tol,
            });
        }
        panels.push(gauss_kronrod(&mut f, p.a, mid));
        panels.push(gauss_kronrod(&mut f, mid, p.b));
        evaluations += 30;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn polynomials_are_exact() {
        // K15 integrates degree <= 22 exactly
        let r = integrate(|x: f64| x.powi(20), 0.0, 1.0, &QuadratureConfig::default()).unwrap();
        assert_abs_diff_eq!(r.value, 1.0 / 21.0, epsilon = 1e-15);
    }

    #[test]
    fn smooth_oscillatory() {
        let r = integrate(|x: f64| (10.0 * x).sin(), 0.0, PI, &QuadratureConfig::default()).unwrap();
        assert_abs_diff_eq!(r.value, 0.0, epsilon = 1e-12);
        let r = integrate(|x: f64| x.exp(), 0.0, 3.0, &QuadratureConfig::default()).unwrap();
        assert_abs_diff_eq!(r.value, 3f64.exp() - 1.0, epsilon = 1e-11);
        assert!(r.error <= 1e-12);
    }

    #[test]
    fn endpoint_singular_derivative_converges() {
        let cfg = QuadratureConfig::with_tol(1e-10);
        let r = integrate(|x: f64| (1.0 - x * x).max(0.0).sqrt(), -1.0, 1.0, &cfg).unwrap();
        assert_abs_diff_eq!(r.value, PI / 2.0, epsilon = 1e-9);
    }

    #[test]
    fn subdivision_cap_is_reported() {
        let cfg = QuadratureConfig {
            abs_tol: 1e-14,
            max_subdivisions: 3,
        };
        let err = integrate(|x: f64| x.abs().sqrt(), -1.0, 1.0, &cfg).unwrap_err();
        assert!(matches!(err, Error::QuadratureNonConvergence { .. }));
    }

    #[test]
    fn rejects_bad_config() {
        let cfg = QuadratureConfig {
            abs_tol: 0.0,
            max_subdivisions: 10,
        };
        assert!(integrate(|x: f64| x, 0.0, 1.0, &cfg).is_err());
    }

    #[test]
    fn f32_integration() {
        let cfg = QuadratureConfig::with_tol(1e-5);
        let r = integrate(|x: f32| x.cos(), 0.0, 1.0, &cfg).unwrap();
        assert!((r.value - 1f32.sin()).abs() < 1e-5);
    }
}
