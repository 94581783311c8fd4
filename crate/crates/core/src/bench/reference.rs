//! Reference integrals by iterated adaptive Gauss–Kronrod quadrature in
//! polar coordinates.

use std::cell::Cell;
use std::collections::BinaryHeap;
use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::bench::functions::TestFunctionId;
use crate::domains::{r_alpha, DomainSpec};
use crate::{Domain, Point};

/// Absolute tolerance of the outer (angular) integral.
pub const REFERENCE_TOL: f64 = 1e-10;
const INNER_TOL: f64 = 1e-13;
const MAX_INTERVALS: usize = 2000;

#[allow(clippy::excessive_precision)]
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
#[allow(clippy::excessive_precision)]
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
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Quadrature value with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quadrature {
    pub value: f64,
    pub est_error: f64,
    pub converged: bool,
}

/// 15-point Kronrod estimate and `|K15 − G7|` on `[a, b]`.
fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for k in 0..7 {
        let dx = h * XGK[k];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[k] * s;
        if k % 2 == 1 {
            gauss += WG[k / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

#[derive(PartialEq)]
struct Panel {
    err: f64,
    a: f64,
    b: f64,
    value: f64,
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Globally adaptive bisection driven by the largest panel error.
pub fn adaptive_gk15<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, abs_tol: f64) -> Quadrature {
    if a == b {
        return Quadrature {
            value: 0.0,
            est_error: 0.0,
            converged: true,
        };
    }
    let (value, err) = gk15(&mut f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Panel { err, a, b, value });
    let mut total_err = err;
    while total_err > abs_tol && heap.len() < MAX_INTERVALS {
        let worst = heap.pop().expect("heap never empties");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            heap.push(worst);
            break;
        }
        let (v1, e1) = gk15(&mut f, worst.a, mid);
        let (v2, e2) = gk15(&mut f, mid, worst.b);
        total_err += e1 + e2 - worst.err;
        heap.push(Panel { err: e1, a: worst.a, b: mid, value: v1 });
        heap.push(Panel { err: e2, a: mid, b: worst.b, value: v2 });
    }
    let mut panels: Vec<Panel> = heap.into_vec();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let value = panels.iter().map(|p| p.value).sum();
    let est_error: f64 = panels.iter().map(|p| p.err).sum();
    Quadrature {
        value,
        est_error,
        converged: est_error <= abs_tol,
    }
}

/// `∫_Ω f` by iterated quadrature: outer in angle, inner in radius between
/// the domain's boundary curves.
pub fn reference_integral_with<F: Fn(Point) -> f64>(dom: &Domain, f: F) -> Quadrature {
    let inner_err = Cell::new(0.0f64);
    let inner_ok = Cell::new(true);
    let radial = |phi: f64| {
        let (lo, hi) = radial_limits(dom, phi);
        let (s, c) = phi.sin_cos();
        let q = adaptive_gk15(|r| f(Point::new(r * c, r * s)) * r, lo, hi, INNER_TOL);
        inner_err.set(inner_err.get().max(q.est_error));
        inner_ok.set(inner_ok.get() && q.converged);
        q.value
    };
    let breaks = angular_breaks(dom);
    let share = REFERENCE_TOL / (breaks.len() - 1) as f64;
    let mut value = 0.0;
    let mut est_error = 0.0;
    let mut converged = true;
    for w in breaks.windows(2) {
        let q = adaptive_gk15(&radial, w[0], w[1], share);
        value += q.value;
        est_error += q.est_error;
        converged &= q.converged;
    }
    est_error += TAU * inner_err.get();
    Quadrature {
        value,
        est_error,
        converged: converged && inner_ok.get(),
    }
}

pub fn reference_integral(dom: &Domain, id: TestFunctionId) -> Quadrature {
    reference_integral_with(dom, |p| id.eval(p))
}

fn radial_limits(dom: &Domain, phi: f64) -> (f64, f64) {
    match *dom {
        DomainSpec::Disk => (0.0, 1.0),
        DomainSpec::Ellipse { a, b, alpha_rot } => {
            let (s, c) = (phi - alpha_rot).sin_cos();
            (0.0, a * b / (b * b * c * c + a * a * s * s).sqrt())
        }
        DomainSpec::Annulus { outer, h } => (h * outer, outer),
        DomainSpec::Polygon { p } => (0.0, r_alpha(p, phi)),
    }
}

fn angular_breaks(dom: &Domain) -> Vec<f64> {
    match *dom {
        DomainSpec::Polygon { p } => {
            let alpha = PI / p as f64;
            (0..=p).map(|j| alpha + 2.0 * alpha * j as f64).collect()
        }
        _ => vec![0.0, TAU],
    }
}
