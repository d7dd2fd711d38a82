use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::field::SpectralField;
use super::grid::{PhysicalBox, SpectralGrid};
use super::profile::Profile;
use super::transform::inverse_transform;
use crate::error::{Error, Result};
use crate::numerics::pairwise_sum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormMethod {
    /// Analytic integral of a closed form.
    Exact,
    /// Riemann sum of |v̂|² on the spectral grid.
    FourierRiemann,
    /// Riemann sum of |v|^q after inverse transform to a physical box.
    PhysicalRiemann,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LqNorm {
    pub q: f64,
    pub value: f64,
    pub method: NormMethod,
    /// Set on every physical-box result: the box cuts off the tail.
    pub truncated: bool,
    /// Share of Σ|v|^q carried by the outermost shell of the box.
    pub tail_fraction: f64,
    pub physical_box: Option<PhysicalBox>,
}

/// Labelled norm terms of an estimate, each `(label, q, value)`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub entries: Vec<NormEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormEntry {
    pub label: String,
    pub q: f64,
    pub value: f64,
}

impl NormReport {
    pub fn push(&mut self, label: impl Into<String>, q: f64, value: f64) {
        self.entries.push(NormEntry {
            label: label.into(),
            q,
            value,
        });
    }

    pub fn total(&self) -> f64 {
        let v: Vec<f64> = self.entries.iter().map(|e| e.value).collect();
        pairwise_sum(&v)
    }

    pub fn get(&self, label: &str) -> Option<f64> {
        self.entries.iter().find(|e| e.label == label).map(|e| e.value)
    }
}

/// Squared L² norm of closed forms whose integral is known exactly.
pub fn exact_l2_sq(p: &Profile) -> Option<f64> {
    use std::f64::consts::PI;
    match p {
        Profile::Zero { .. } => Some(0.0),
        Profile::Indicator(f) => Some(PI / (4.0 * f.lambda * (f.n as f64).powi(3))),
        Profile::SwirlSlab(f) => Some(PI / (4.0 * f.lambda)),
        Profile::SwirlSlabMean(f) => Some(1.0 / (2.0 * f.lambda * PI * (f.ell as f64).powi(2))),
        Profile::Scaled { inner, factor } => exact_l2_sq(inner).map(|v| v * factor.norm_sqr()),
        Profile::Rotated { inner, .. } => exact_l2_sq(inner),
        Profile::Projected { inner } if inner.is_solenoidal() => exact_l2_sq(inner),
        _ => None,
    }
}

/// L^q norm of a Fourier-space field. q = 2 is evaluated in ξ-space
/// (Plancherel); other exponents need a physical box.
pub fn lq_norm(
    field: &SpectralField,
    q: f64,
    grid: &SpectralGrid,
    physical_box: Option<&PhysicalBox>,
) -> Result<LqNorm> {
    if !(q.is_finite() && q > 1.0) {
        return Err(Error::ExponentOutOfRange { q, range: "(1, ∞)" });
    }
    if q == 2.0 {
        if let SpectralField::ClosedForm(p) = field {
            if let Some(sq) = exact_l2_sq(p) {
                return Ok(LqNorm {
                    q,
                    value: sq.sqrt(),
                    method: NormMethod::Exact,
                    truncated: false,
                    tail_fraction: 0.0,
                    physical_box: None,
                });
            }
        }
        let g = field.sample(grid)?;
        let sq: Vec<f64> = g.values.par_iter().map(|v| v.norm_sqr()).collect();
        return Ok(LqNorm {
            q,
            value: (pairwise_sum(&sq) * grid.cell_volume()).sqrt(),
            method: NormMethod::FourierRiemann,
            truncated: false,
            tail_fraction: 0.0,
            physical_box: None,
        });
    }
    let bx = physical_box.ok_or_else(|| {
        Error::invalid("physical_box", format!("required for q = {q} ≠ 2"))
    })?;
    let g = field.sample(grid)?;
    let pf = inverse_transform(&g, bx);
    let (all, shell): (Vec<f64>, Vec<f64>) = (0..bx.len())
        .into_par_iter()
        .map(|idx| {
            let v = pf.magnitude_sq(idx).powf(q / 2.0);
            (v, if pf.is_shell(idx) { v } else { 0.0 })
        })
        .unzip();
    let total = pairwise_sum(&all);
    let tail = pairwise_sum(&shell);
    Ok(LqNorm {
        q,
        value: (total * bx.cell_volume()).powf(1.0 / q),
        method: NormMethod::PhysicalRiemann,
        truncated: true,
        tail_fraction: if total > 0.0 { tail / total } else { 0.0 },
        physical_box: Some(*bx),
    })
}
