use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical parameters of the rotating Oseen resolvent problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    /// Translational speed λ.
    pub lambda: f64,
    /// Angular speed ω.
    pub omega: f64,
    /// Resolvent parameter s.
    pub s: f64,
    /// Time period T.
    pub period: f64,
    /// Lebesgue exponent q.
    pub q: f64,
}

impl Params {
    pub fn new(lambda: f64, omega: f64, s: f64, period: f64, q: f64) -> Result<Self> {
        let p = Params {
            lambda,
            omega,
            s,
            period,
            q,
        };
        p.validate()?;
        Ok(p)
    }

    /// Parameters for a resolvent solve; period defaults to one rotation and q to 2.
    pub fn resolvent(lambda: f64, omega: f64, s: f64) -> Result<Self> {
        Self::new(lambda, omega, s, std::f64::consts::TAU / omega, 2.0)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::invalid(name, format!("must be finite and > 0, got {v}")))
            }
        };
        positive("lambda", self.lambda)?;
        positive("omega", self.omega)?;
        positive("period", self.period)?;
        if !self.s.is_finite() {
            return Err(Error::invalid("s", "must be finite"));
        }
        if !(self.q.is_finite() && self.q > 1.0) {
            return Err(Error::ExponentOutOfRange {
                q: self.q,
                range: "(1, ∞)",
            });
        }
        Ok(())
    }

    /// Angular frequency 2π/T of the time period.
    pub fn alpha(&self) -> f64 {
        std::f64::consts::TAU / self.period
    }

    pub fn with_s(self, s: f64) -> Self {
        Params { s, ..self }
    }

    /// Fails unless `lo < q < hi` (open interval).
    pub fn require_q_below(&self, hi: f64, range: &'static str) -> Result<()> {
        if self.q > 1.0 && self.q < hi {
            Ok(())
        } else {
            Err(Error::ExponentOutOfRange { q: self.q, range })
        }
    }
}
