//! Sampled bounds for the cut-off multiplier
//! `M₂(η,ξ) = iλξ₁ χ(1 + ωη/s) / N(η,ξ)`, `N = is + iωη − iλξ₁ + |ξ|²`,
//! after reducing `s` to `|s| <= ω/2`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{halton, smoothstep};
use crate::params::Params;
use crate::spectral::C64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeBox {
    pub eta_max: f64,
    pub xi_max: f64,
    pub samples: usize,
}

impl Default for ProbeBox {
    fn default() -> Self {
        ProbeBox {
            eta_max: 1e3,
            xi_max: 1e3,
            samples: 100_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbePoint {
    pub eta: f64,
    pub xi: [f64; 3],
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub s_reduced: f64,
    pub samples: usize,
    /// Sampled sup of `(|s|+|ωη|+|λξ₁|)/|N|` over `|s+ωη| >= |s|/2`.
    pub sup_ratio: ProbePoint,
    /// The point `η = −3s/(2ω)`, `ξ = (−s/(2λ), 0, 0)` on the region's edge.
    pub witness_ratio: ProbePoint,
    /// Sampled sup of `|η^α ξ^β ∂_η^α ∂_ξ^β M₂|`, `α ∈ {0,1}`, `β ∈ {0,1}³`.
    pub sup_derivatives: f64,
    /// `1 + λ²/|s|`.
    pub growth: f64,
    /// `sup_ratio / growth`.
    pub fitted_c_ratio: f64,
    /// `sup_derivatives / growth³`.
    pub fitted_c_derivatives: f64,
}

fn chi(x: f64) -> f64 {
    smoothstep(x.abs(), 0.5, 1.0)
}

fn n_symbol(p: &Params, s: f64, eta: f64, xi: [f64; 3]) -> C64 {
    let r2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
    C64::new(r2, s + p.omega * eta - p.lambda * xi[0])
}

fn ratio_at(p: &Params, s: f64, eta: f64, xi: [f64; 3]) -> f64 {
    (s.abs() + (p.omega * eta).abs() + (p.lambda * xi[0]).abs()) / n_symbol(p, s, eta, xi).norm()
}

fn m2(p: &Params, s: f64, x: [f64; 4]) -> C64 {
    let (eta, xi) = (x[0], [x[1], x[2], x[3]]);
    let c = chi(1.0 + p.omega * eta / s);
    if c == 0.0 {
        return C64::default();
    }
    C64::new(0.0, p.lambda * xi[0] * c) / n_symbol(p, s, eta, xi)
}

/// `max_{α,β} |x^γ ∂^γ M₂|` at one point, with `x_a ∂_a` taken as the
/// derivative along the log-scaling `x_a ↦ x_a e^t`.
fn scaled_derivative_sup(p: &Params, s: f64, x: [f64; 4]) -> f64 {
    const STEP: f64 = 1e-4;
    let mut best = 0.0f64;
    for mask in 0u32..16 {
        let active: Vec<usize> = (0..4).filter(|a| mask >> a & 1 == 1).collect();
        let mut acc = C64::default();
        for signs in 0u32..(1 << active.len()) {
            let mut y = x;
            let mut sign = 1.0;
            for (bit, &a) in active.iter().enumerate() {
                let plus = signs >> bit & 1 == 1;
                y[a] *= if plus { STEP.exp() } else { (-STEP).exp() };
                if !plus {
                    sign = -sign;
                }
            }
            acc += m2(p, s, y) * sign;
        }
        let v = acc.norm() / (2.0 * STEP).powi(active.len() as i32);
        best = best.max(v);
    }
    best
}

/// Sample point `i`: log-uniform `|s+ωη|` in `[|s|/2, ω·η_max]`, log-uniform
/// `|ξ|`, half of the points on the ξ₁-axis.
fn sample(p: &Params, s: f64, bx: &ProbeBox, i: u64) -> Option<(f64, [f64; 3])> {
    let u = halton(i, 6);
    let lo = (s.abs() / 2.0).ln();
    let hi = (p.omega * bx.eta_max).max(s.abs()).ln();
    let a = (lo + u[0] * (hi - lo)).exp();
    let shifted = if u[1] < 0.5 { a } else { -a };
    let eta = (shifted - s) / p.omega;
    if eta.abs() > bx.eta_max {
        return None;
    }
    let rlo = (1e-6 * s.abs().min(1.0)).ln();
    let rhi = bx.xi_max.ln();
    let r = (rlo + u[2] * (rhi - rlo)).exp();
    let xi = if u[3] < 0.5 {
        let sgn = if u[4] < 0.5 { 1.0 } else { -1.0 };
        [sgn * r, 0.0, 0.0]
    } else {
        let c = 2.0 * u[4] - 1.0;
        let sn = (1.0 - c * c).max(0.0).sqrt();
        let phi = std::f64::consts::TAU * u[5];
        [r * c, r * sn * phi.cos(), r * sn * phi.sin()]
    };
    Some((eta, xi))
}

pub fn marcinkiewicz_probe(params: &Params, bx: &ProbeBox) -> Result<ProbeReport> {
    params.validate()?;
    let s = params.s - params.omega * (params.s / params.omega).round();
    if s == 0.0 {
        return Err(Error::SingularPoint(
            "s lies on ωℤ; the cut-off multiplier is undefined there".into(),
        ));
    }
    if bx.samples == 0 || !(bx.eta_max > 0.0 && bx.xi_max > 0.0) {
        return Err(Error::invalid("sample_box", "needs positive ranges and samples"));
    }
    let results: Vec<Option<(ProbePoint, f64)>> = (0..bx.samples as u64)
        .into_par_iter()
        .map(|i| {
            let (eta, xi) = sample(params, s, bx, i)?;
            if (s + params.omega * eta).abs() < s.abs() / 2.0 {
                return None;
            }
            let value = ratio_at(params, s, eta, xi);
            let der = scaled_derivative_sup(params, s, [eta, xi[0], xi[1], xi[2]]);
            Some((ProbePoint { eta, xi, value }, der))
        })
        .collect();
    let mut sup = ProbePoint {
        eta: 0.0,
        xi: [0.0; 3],
        value: 0.0,
    };
    let mut sup_der = 0.0f64;
    for (pt, der) in results.into_iter().flatten() {
        if pt.value > sup.value {
            sup = pt;
        }
        sup_der = sup_der.max(der);
    }
    let w_eta = -1.5 * s / params.omega;
    let w_xi = [-s / (2.0 * params.lambda), 0.0, 0.0];
    let witness = ProbePoint {
        eta: w_eta,
        xi: w_xi,
        value: ratio_at(params, s, w_eta, w_xi),
    };
    let growth = 1.0 + params.lambda * params.lambda / s.abs();
    Ok(ProbeReport {
        s_reduced: s,
        samples: bx.samples,
        sup_ratio: sup,
        witness_ratio: witness,
        sup_derivatives: sup_der,
        growth,
        fitted_c_ratio: sup.value / growth,
        fitted_c_derivatives: sup_der / growth.powi(3),
    })
}
