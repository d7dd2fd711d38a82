use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::Params;
use crate::spectral::C64;

/// Which Fourier multiplier to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Symbol {
    /// `1/D`
    M,
    /// `is/D`
    M0,
    /// `iωk/D`
    M1,
    /// `iλξ₁/D`
    M2,
    /// `−ξ_j ξ_l / D` (indices 0-based)
    Mjl(usize, usize),
}

/// `D = i(s + ωk − λξ₁) + |ξ|²`; `k` may be a continuous time frequency.
pub fn denominator(params: &Params, k: f64, xi: [f64; 3]) -> C64 {
    let r2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
    C64::new(r2, params.s + params.omega * k - params.lambda * xi[0])
}

pub fn eval_symbol(params: &Params, k: f64, xi: [f64; 3], which: Symbol) -> Result<C64> {
    let d = denominator(params, k, xi);
    if d == C64::new(0.0, 0.0) {
        return Err(Error::SingularPoint(format!(
            "k = {k}, ξ = {xi:?}: s + ωk = 0 at ξ = 0"
        )));
    }
    let num = match which {
        Symbol::M => C64::new(1.0, 0.0),
        Symbol::M0 => C64::new(0.0, params.s),
        Symbol::M1 => C64::new(0.0, params.omega * k),
        Symbol::M2 => C64::new(0.0, params.lambda * xi[0]),
        Symbol::Mjl(j, l) => {
            if j > 2 || l > 2 {
                return Err(Error::invalid("symbol", "indices must be 0, 1 or 2"));
            }
            C64::new(-xi[j] * xi[l], 0.0)
        }
    };
    Ok(num / d)
}
