//! Globally adaptive 15-point Gauss-Kronrod quadrature (QUADPACK `qag` style)
//! with a nested variant for rectangular 2-D domains.

#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

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

// Gauss weights for the odd Kronrod nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            abs_tol: 1e-14,
            rel_tol: 1e-10,
            max_intervals: 2000,
        }
    }
}

impl QuadOptions {
    pub fn rel(rel_tol: f64) -> Self {
        QuadOptions {
            rel_tol,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
    pub converged: bool,
}

/// One 15-point Kronrod panel: (kronrod value, |kronrod - gauss|).
pub fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
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
        self.error.total_cmp(&other.error)
    }
}

/// Integrate `f` over `[a, b]`, bisecting the panel with the largest error
/// estimate until `error <= max(abs_tol, rel_tol·|value|)`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: QuadOptions) -> QuadResult {
    if a == b {
        return QuadResult {
            value: 0.0,
            error: 0.0,
            intervals: 0,
            converged: true,
        };
    }
    let (v, e) = gk15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Panel {
        a,
        b,
        value: v,
        error: e,
    });
    let mut value = v;
    let mut error = e;
    while error > opts.abs_tol.max(opts.rel_tol * value.abs()) && heap.len() < opts.max_intervals {
        let worst = heap.pop().expect("non-empty heap");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // panel cannot be split further in floating point
            heap.push(worst);
            break;
        }
        let (v1, e1) = gk15(&f, worst.a, mid);
        let (v2, e2) = gk15(&f, mid, worst.b);
        value += v1 + v2 - worst.value;
        error += e1 + e2 - worst.error;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
    }
    // re-sum to shed drift from the running updates
    let mut panels: Vec<Panel> = heap.into_vec();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    let vals: Vec<f64> = panels.iter().map(|p| p.value).collect();
    let errs: Vec<f64> = panels.iter().map(|p| p.error).collect();
    let value = super::pairwise_sum(&vals);
    let error = super::pairwise_sum(&errs);
    QuadResult {
        value,
        error,
        intervals: panels.len(),
        converged: error <= opts.abs_tol.max(opts.rel_tol * value.abs()),
    }
}

/// Iterated integral `∫_{a}^{b} ∫_{c(x)}^{d(x)} f(x, y) dy dx`.
pub fn integrate_2d<F, C, D>(
    f: F,
    a: f64,
    b: f64,
    c: C,
    d: D,
    opts: QuadOptions,
) -> QuadResult
where
    F: Fn(f64, f64) -> f64,
    C: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let inner_opts = QuadOptions {
        rel_tol: opts.rel_tol * 0.1,
        abs_tol: opts.abs_tol * 0.1,
        ..opts
    };
    let inner_ok = std::cell::Cell::new(true);
    let outer = integrate(
        |x| {
            let r = integrate(|y| f(x, y), c(x), d(x), inner_opts);
            if !r.converged {
                inner_ok.set(false);
            }
            r.value
        },
        a,
        b,
        opts,
    );
    QuadResult {
        converged: outer.converged && inner_ok.get(),
        ..outer
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronrod_is_exact_for_degree_22() {
        // 15-point Kronrod integrates polynomials up to degree 3·7+1 = 22
        let (v, _) = gk15(&|x: f64| x.powi(22), -1.0, 1.0);
        assert!((v - 2.0 / 23.0).abs() < 1e-15);
    }

    #[test]
    fn gauss_part_is_exact_for_degree_13() {
        // error estimate vanishes when both rules are exact
        let (v, e) = gk15(&|x: f64| x.powi(13) + x.powi(12), -1.0, 1.0);
        assert!((v - 2.0 / 13.0).abs() < 1e-15);
        assert!(e < 1e-15);
    }

    #[test]
    fn weights_sum_to_two() {
        let k: f64 = WGK[7] + 2.0 * WGK[..7].iter().sum::<f64>();
        let g: f64 = WG[3] + 2.0 * WG[..3].iter().sum::<f64>();
        assert!((k - 2.0).abs() < 1e-15);
        assert!((g - 2.0).abs() < 1e-15);
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        let r = integrate(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, QuadOptions::rel(1e-10));
        assert!((r.value - 2.0).abs() < 1e-9, "{r:?}");
    }

    #[test]
    fn adaptive_handles_kink() {
        let r = integrate(|x: f64| (x - 0.3).abs(), 0.0, 1.0, QuadOptions::rel(1e-12));
        assert!((r.value - (0.045 + 0.245)).abs() < 1e-12);
        assert!(r.converged);
    }

    #[test]
    fn quarter_disc_area() {
        let r = integrate_2d(
            |_, _| 1.0,
            0.0,
            1.0,
            |_| 0.0,
            |x| (1.0 - x * x).max(0.0).sqrt(),
            QuadOptions::rel(1e-10),
        );
        assert!((r.value - std::f64::consts::FRAC_PI_4).abs() < 1e-9);
    }
}
