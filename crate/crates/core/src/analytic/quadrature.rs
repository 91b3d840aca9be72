//! Globally adaptive Gauss–Kronrod (7/15) integration.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
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

// Gauss weights for the odd Kronrod abscissae (indices 1, 3, 5, 7).
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Segment {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, (&x, &w)) in XGK[..7].iter().zip(&WGK[..7]).enumerate() {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kronrod += w * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Segment {
        lo,
        hi,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

/// Integrate `f` over the union of consecutive intervals given by `breaks`
/// (sorted, at least two points) until the summed error estimate drops below
/// `max(abs_tol, rel_tol * |value|)`.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    breaks: &[f64],
    rel_tol: f64,
    abs_tol: f64,
    max_segments: usize,
) -> Result<Estimate> {
    assert!(breaks.len() >= 2, "need at least one interval");
    let mut heap: BinaryHeap<Segment> = breaks
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| gauss_kronrod(&f, w[0], w[1]))
        .collect();
    let mut evaluations = 15 * heap.len();
    loop {
        let value: f64 = heap.iter().map(|s| s.value).sum();
        let error: f64 = heap.iter().map(|s| s.error).sum();
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::Numeric {
                message: "integrand produced a non-finite value".into(),
                lo: breaks[0],
                hi: breaks[breaks.len() - 1],
                estimate: value,
                error,
            });
        }
        if error <= abs_tol.max(rel_tol * value.abs()) {
            return Ok(Estimate {
                value,
                error,
                evaluations,
            });
        }
        if heap.len() >= max_segments {
            return Err(Error::Numeric {
                message: format!("quadrature did not converge within {max_segments} segments"),
                lo: breaks[0],
                hi: breaks[breaks.len() - 1],
                estimate: value,
                error,
            });
        }
        let Some(worst) = heap.pop() else {
            return Ok(Estimate {
                value: 0.0,
                error: 0.0,
                evaluations,
            });
        };
        let mid = 0.5 * (worst.lo + worst.hi);
        heap.push(gauss_kronrod(&f, worst.lo, mid));
        heap.push(gauss_kronrod(&f, mid, worst.hi));
        evaluations += 30;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomials_are_exact() {
        let est = integrate(|x| x.powi(5) - 3.0 * x * x, &[0.0, 2.0], 1e-12, 0.0, 10).unwrap();
        assert_relative_eq!(est.value, 64.0 / 6.0 - 8.0, max_relative = 1e-13);
    }

    #[test]
    fn peaked_integrand() {
        let est = integrate(|x| (-x * x / 1e-4).exp(), &[-1.0, 0.0, 1.0], 1e-10, 0.0, 1000).unwrap();
        assert_relative_eq!(est.value, (std::f64::consts::PI * 1e-4).sqrt(), max_relative = 1e-9);
    }

    #[test]
    fn non_convergence_is_reported() {
        let err = integrate(|x| 1.0 / x.abs().sqrt().max(1e-300), &[-1.0, 1.0], 1e-14, 0.0, 4).unwrap_err();
        assert!(matches!(err, Error::Numeric { .. }));
    }
}
