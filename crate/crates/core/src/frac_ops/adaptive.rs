//! Globally adaptive Gauss–Kronrod quadrature for integrands with
//! integrable endpoint singularities.
//!
//! Each panel is integrated with the 7-point Gauss rule embedded in the
//! 15-point Kronrod extension; the panel with the largest error estimate is
//! bisected until the summed estimate meets the tolerance. Endpoints are
//! never sampled. Callers place the singular point at the left end, where
//! doubles are densest, and the initial partition is graded geometrically
//! towards it.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

/// Evaluation budget before adaptivity gives up.
pub const MAX_EVALUATIONS: usize = 1 << 20;

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

// Gauss weights for the odd-indexed Kronrod nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

/// Tolerances for [`integrate`]: stop when `error <= max(abs, rel * |value|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub fn absolute(abs: f64) -> Self {
        Self { abs, rel: 0.0 }
    }

    pub fn relative(rel: f64) -> Self {
        Self { abs: 0.0, rel }
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    magnitude: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn kronrod_panel<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    let mut magnitude = WGK[7] * fc.abs();
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        kronrod += WGK[j] * (f1 + f2);
        magnitude += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    Panel {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
        magnitude: magnitude * half.abs(),
    }
}

/// Integrates `f` over `(a, b)`.
///
/// `grading` geometric levels are laid towards `a` before adaptivity starts
/// (0 for a uniform start); use it when `f` is singular at `a`.
pub fn integrate<F>(mut f: F, a: f64, b: f64, tol: Tolerance, grading: u32) -> Result<Estimate>
where
    F: FnMut(f64) -> f64,
{
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::invalid(format!("integration limits must be finite (got {a}, {b})")));
    }
    if a == b {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    if a > b {
        let est = integrate(f, b, a, tol, 0)?;
        return Ok(Estimate {
            value: -est.value,
            ..est
        });
    }

    let mut heap = BinaryHeap::new();
    let mut evaluations = 0usize;
    let mut value = 0.0;
    let mut error = 0.0;
    let mut magnitude = 0.0;
    let mut push = |heap: &mut BinaryHeap<Panel>, p: Panel| {
        value += p.value;
        error += p.error;
        magnitude += p.magnitude;
        heap.push(p);
    };

    let mut right = b;
    for _ in 0..grading {
        let left = a + 0.5 * (right - a);
        push(&mut heap, kronrod_panel(&mut f, left, right));
        evaluations += 15;
        right = left;
    }
    push(&mut heap, kronrod_panel(&mut f, a, right));
    evaluations += 15;

    // Recompute the sums from the panels at each step so they do not drift.
    let totals = |heap: &BinaryHeap<Panel>| {
        let mut panels: Vec<&Panel> = heap.iter().collect();
        panels.sort_by(|p, q| p.a.total_cmp(&q.a));
        panels.iter().fold((0.0, 0.0, 0.0), |(v, e, m), p| (v + p.value, e + p.error, m + p.magnitude))
    };
    let mut since_refresh = 0usize;

    loop {
        if !value.is_finite() {
            return Err(Error::NonFinite("integrand produced a non-finite value".into()));
        }
        let target = tol.abs.max(tol.rel * value.abs()).max(50.0 * f64::EPSILON * magnitude);
        if error <= target {
            let (v, e, _) = totals(&heap);
            return Ok(Estimate {
                value: v,
                error: e,
                evaluations,
            });
        }
        if evaluations + 30 > MAX_EVALUATIONS {
            let (v, e, _) = totals(&heap);
            return Err(Error::NoConvergence {
                context: "adaptive quadrature",
                estimate: v,
                error_bound: e,
            });
        }
        let worst = heap.pop().expect("heap holds at least one panel");
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // Panel can no longer be split in floating point.
            let (v, e, _) = totals(&heap);
            let e = e + worst.error;
            return Err(Error::NoConvergence {
                context: "adaptive quadrature",
                estimate: v + worst.value,
                error_bound: e,
            });
        }
        let left = kronrod_panel(&mut f, worst.a, mid);
        let right = kronrod_panel(&mut f, mid, worst.b);
        evaluations += 30;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        magnitude += left.magnitude + right.magnitude - worst.magnitude;
        heap.push(left);
        heap.push(right);
        since_refresh += 1;
        if since_refresh == 64 {
            (value, error, magnitude) = totals(&heap);
            since_refresh = 0;
        }
    }
}
