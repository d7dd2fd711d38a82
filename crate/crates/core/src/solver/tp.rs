//! Time-periodic solutions as finite Fourier series in time, assembled
//! mode by mode from resolvent solves with `s = (2π/T)k`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::rotating::solve_resolvent_rotating;
use crate::error::{Error, Result};
use crate::estimates::{estimate_terms, EstimateReport, TermSet};
use crate::params::Params;
use crate::resonance::{
    check_smallness, min_positive_element, EstimateConfig, Lattice, Ratio, RatioClass, SmallnessMode,
};
use crate::spectral::{lq_norm, NormReport, PhysicalBox, SpectralField, SpectralGrid};

/// `f(t) = Σ_k f_k e^{i(2π/T)kt}` with finitely many modes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TPSeries {
    pub period: f64,
    pub modes: BTreeMap<i64, SpectralField>,
}

impl TPSeries {
    pub fn new(period: f64) -> Self {
        TPSeries {
            period,
            modes: BTreeMap::new(),
        }
    }

    pub fn with_mode(mut self, k: i64, f: impl Into<SpectralField>) -> Self {
        self.modes.insert(k, f.into());
        self
    }

    /// `Σ_k ‖f_k‖_q`.
    pub fn a_norm(&self, q: f64, grid: &SpectralGrid, bx: Option<&PhysicalBox>) -> Result<f64> {
        let mut total = 0.0;
        for f in self.modes.values() {
            total += lq_norm(f, q, grid, bx)?.value;
        }
        Ok(total)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModeReport {
    pub k: i64,
    pub s: f64,
    pub residual_interior: f64,
    pub kernel_mode_dropped: bool,
    /// Resolvent smallness with the same θ as the time-periodic condition.
    pub resolvent_smallness: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TpAssembly {
    pub u: TPSeries,
    pub p: TPSeries,
    pub modes: Vec<ModeReport>,
    /// Every term summed over modes (A-norms) against `‖f‖_A`.
    pub report: EstimateReport,
    pub min_positive: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct TpOptions<'a> {
    pub n_time_nodes: usize,
    /// `(2π/T)/ω`; classified from the floats when absent.
    pub ratio: Option<Ratio>,
    pub config: EstimateConfig,
    pub c0: f64,
    pub physical_box: Option<&'a PhysicalBox>,
}

/// Exact `(c, d)` with `(2π/T)/ω = c/d`, or `IrrationalRatio`.
fn rational_ratio(params: &Params, ratio: Option<Ratio>) -> Result<(u64, u64)> {
    let ratio = match ratio {
        Some(r) => r,
        None => Ratio::from_float(params.alpha() / params.omega)?,
    };
    let (c, d) = ratio.as_rational().ok_or(Error::IrrationalRatio)?;
    let want = params.alpha() / params.omega;
    if ((c as f64 / d as f64) - want).abs() > 1e-12 * want {
        return Err(Error::invalid(
            "ratio",
            format!("{c}/{d} does not match (2π/T)/ω = {want}"),
        ));
    }
    Ok((c, d))
}

pub fn assemble_tp(
    f: &TPSeries,
    params: &Params,
    grid: &SpectralGrid,
    opts: &TpOptions<'_>,
) -> Result<TpAssembly> {
    params.validate()?;
    if (f.period - params.period).abs() > 1e-12 * params.period {
        return Err(Error::invalid("period", "series period differs from params.period"));
    }
    if f.modes.is_empty() {
        return Err(Error::invalid("f", "needs at least one mode"));
    }
    let (c, d) = rational_ratio(params, opts.ratio)?;
    let ratio = Ratio::rational(c, d)?;
    let class = Lattice::new(params.omega, ratio)?.classify();
    if !matches!(class, RatioClass::Rational { .. }) {
        return Err(Error::IrrationalRatio);
    }
    let min_positive = min_positive_element(&class, params.omega)?;
    let terms_kind = if params.q == 2.0 {
        TermSet::L2
    } else {
        params.require_q_below(2.0, "(1, 2)")?;
        TermSet::Full
    };

    let mut u = TPSeries::new(f.period);
    let mut p = TPSeries::new(f.period);
    let mut modes = Vec::with_capacity(f.modes.len());
    let mut terms = NormReport::default();
    let mut rhs_norm = 0.0;
    for (&k, fk) in &f.modes {
        let s = params.alpha() * k as f64;
        let pk = params.with_s(s);
        let rep = solve_resolvent_rotating(fk, &pk, opts.n_time_nodes, grid)?;
        let small = check_smallness(&pk, &opts.config, SmallnessMode::Resolvent, None)?;
        let mode_terms =
            estimate_terms(&rep.velocity, &rep.pressure, &pk, grid, opts.physical_box, terms_kind, false)?;
        for e in mode_terms.entries {
            match terms.entries.iter_mut().find(|x| x.label == e.label) {
                Some(x) => x.value += e.value,
                None => terms.push(e.label, e.q, e.value),
            }
        }
        rhs_norm += lq_norm(fk, params.q, grid, opts.physical_box)?.value;
        modes.push(ModeReport {
            k,
            s,
            residual_interior: rep.residual_interior,
            kernel_mode_dropped: rep.flags.kernel_mode_dropped,
            resolvent_smallness: small.pass,
        });
        u.modes.insert(k, rep.velocity);
        p.modes.insert(k, rep.pressure);
    }
    // C₀·P(λ²/min{a > 0 : a ∈ (2π/T)ℤ + ωℤ})
    let theta = params.lambda * params.lambda / min_positive;
    let report = EstimateReport::new(terms, rhs_norm, opts.c0, theta, opts.physical_box.copied());
    Ok(TpAssembly {
        u,
        p,
        modes,
        report,
        min_positive,
    })
}

/// `u = u⁽¹⁾ + u⁽²⁾` with `u⁽¹⁾` the modes where `(2π/T)k ∈ ωℤ`. With
/// `(2π/T)/ω = c/d` in lowest terms that is exactly `d | k`.
pub fn split_modes(
    u: &TPSeries,
    omega: f64,
    ratio: Option<Ratio>,
) -> Result<(TPSeries, TPSeries)> {
    let params = Params::new(1.0, omega, 0.0, u.period, 2.0)?;
    let (_, d) = rational_ratio(&params, ratio).map_err(|e| match e {
        Error::IrrationalRatio => Error::RationalRequired,
        e => e,
    })?;
    let mut u1 = TPSeries::new(u.period);
    let mut u2 = TPSeries::new(u.period);
    for (&k, f) in &u.modes {
        if k.rem_euclid(d as i64) == 0 {
            u1.modes.insert(k, f.clone());
        } else {
            u2.modes.insert(k, f.clone());
        }
    }
    Ok((u1, u2))
}
