use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ops::{leray_at, rotation_matrix_angle, Mat3};
use super::{C64, V3, ZERO3};
use crate::solver::RotatingSolve;

/// `coeff · ξ₁^a ξ₂^b ξ₃^c` placed in one vector component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub component: usize,
    pub powers: [u32; 3],
    pub coeff: Complex64,
}

/// Parameters of the swirling slab family: spectrum supported on
/// `{1/(2λn) < ξ₁ < 1/(λn), |ξ'| < 1/n, ξ₃ > 0}`, time harmonic `ℓ`,
/// resonance gap `σ = s + ωℓ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlabFamily {
    pub n: u64,
    pub lambda: f64,
    pub sigma: f64,
    pub ell: i64,
}

impl SlabFamily {
    pub fn xi1_lo(&self) -> f64 {
        1.0 / (2.0 * self.lambda * self.n as f64)
    }
    pub fn xi1_hi(&self) -> f64 {
        1.0 / (self.lambda * self.n as f64)
    }
    pub fn radial_hi(&self) -> f64 {
        1.0 / self.n as f64
    }
    pub fn in_slab(&self, xi1: f64) -> bool {
        xi1 > self.xi1_lo() && xi1 < self.xi1_hi()
    }
    pub fn in_region(&self, xi: [f64; 3]) -> bool {
        let r = xi[1].hypot(xi[2]);
        self.in_slab(xi[0]) && r < self.radial_hi() && xi[2] > 0.0
    }
    pub fn amplitude(&self) -> f64 {
        (self.n as f64).powf(1.5)
    }
    /// `1/(iσ + |ξ|² − iλξ₁)`.
    pub fn multiplier(&self, xi: [f64; 3]) -> C64 {
        let r2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
        C64::new(r2, self.sigma - self.lambda * xi[0]).inv()
    }
}

/// Closed-form Fourier-space profiles, evaluable at any ξ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Profile {
    Zero {
        components: usize,
    },
    /// `exp(−|ξ|²/(2w²)) · Σ monomials`.
    GaussianPoly {
        components: usize,
        width: f64,
        terms: Vec<Monomial>,
    },
    /// Scalar indicator of the slab region.
    Indicator(SlabFamily),
    /// `n^{3/2} 1_I(ξ) (0, ξ₃, −ξ₂)/|ξ'|`.
    SwirlSlab(SlabFamily),
    /// `SwirlSlab / (iσ + |ξ|² − iλξ₁)`.
    SwirlSlabSolution(SlabFamily),
    /// Time mean of the rotated swirl slab against `e^{iωℓt}`.
    SwirlSlabMean(SlabFamily),
    SwirlSlabMeanSolution(SlabFamily),
    /// `Q(θ) f(Q(θ)ᵀ ξ)`.
    Rotated {
        inner: Box<Profile>,
        angle: f64,
    },
    Projected {
        inner: Box<Profile>,
    },
    Scaled {
        inner: Box<Profile>,
        factor: Complex64,
    },
    /// Velocity of a rotating resolvent solve, evaluated by time quadrature.
    RotatingSolution {
        solve: Box<RotatingSolve>,
    },
    /// Pressure of the same solve.
    RotatingPressure {
        solve: Box<RotatingSolve>,
    },
}

fn gaussian(xi: [f64; 3], width: f64) -> f64 {
    let r2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
    (-r2 / (2.0 * width * width)).exp()
}

fn swirl_direction(xi: [f64; 3]) -> [f64; 3] {
    let r = xi[1].hypot(xi[2]);
    [0.0, xi[2] / r, -xi[1] / r]
}

impl Profile {
    /// Unit vector along e₁ times a Gaussian: axisymmetric and e₁-directed.
    pub fn axial_gaussian(width: f64) -> Self {
        Profile::GaussianPoly {
            components: 3,
            width,
            terms: vec![Monomial {
                component: 0,
                powers: [0, 0, 0],
                coeff: C64::new(1.0, 0.0),
            }],
        }
    }

    /// `(e₁∧ξ) exp(−|ξ|²/(2w²))`: solenoidal and axisymmetric.
    pub fn swirl_gaussian(width: f64) -> Self {
        Profile::GaussianPoly {
            components: 3,
            width,
            terms: vec![
                Monomial {
                    component: 1,
                    powers: [0, 0, 1],
                    coeff: C64::new(-1.0, 0.0),
                },
                Monomial {
                    component: 2,
                    powers: [0, 1, 0],
                    coeff: C64::new(1.0, 0.0),
                },
            ],
        }
    }

    /// `ξ exp(−|ξ|²/(2w²))`, a pure gradient.
    pub fn gradient_gaussian(width: f64) -> Self {
        let terms = (0..3)
            .map(|j| {
                let mut powers = [0; 3];
                powers[j] = 1;
                Monomial {
                    component: j,
                    powers,
                    coeff: C64::new(1.0, 0.0),
                }
            })
            .collect();
        Profile::GaussianPoly {
            components: 3,
            width,
            terms,
        }
    }

    pub fn radial_scalar(width: f64) -> Self {
        Profile::GaussianPoly {
            components: 1,
            width,
            terms: vec![Monomial {
                component: 0,
                powers: [0, 0, 0],
                coeff: C64::new(1.0, 0.0),
            }],
        }
    }

    pub fn components(&self) -> usize {
        match self {
            Profile::Zero { components } | Profile::GaussianPoly { components, .. } => *components,
            Profile::Indicator(_) | Profile::RotatingPressure { .. } => 1,
            Profile::SwirlSlab(_)
            | Profile::SwirlSlabSolution(_)
            | Profile::SwirlSlabMean(_)
            | Profile::SwirlSlabMeanSolution(_)
            | Profile::Projected { .. }
            | Profile::RotatingSolution { .. } => 3,
            Profile::Rotated { inner, .. } | Profile::Scaled { inner, .. } => inner.components(),
        }
    }

    /// Largest angular frequency about e₁ of `θ ↦ f(Q(θ)ᵀξ)`, if finite.
    pub fn angular_bandwidth(&self) -> Option<usize> {
        match self {
            Profile::Zero { .. } => Some(0),
            Profile::GaussianPoly { terms, .. } => Some(
                terms
                    .iter()
                    .map(|t| (t.powers[1] + t.powers[2]) as usize)
                    .max()
                    .unwrap_or(0),
            ),
            Profile::SwirlSlabMean(f) | Profile::SwirlSlabMeanSolution(f) => {
                Some(f.ell.unsigned_abs() as usize)
            }
            Profile::Rotated { inner, .. }
            | Profile::Scaled { inner, .. }
            | Profile::Projected { inner } => inner.angular_bandwidth(),
            Profile::RotatingSolution { solve } | Profile::RotatingPressure { solve } => {
                solve.rhs.angular_bandwidth()
            }
            Profile::Indicator(_) | Profile::SwirlSlab(_) | Profile::SwirlSlabSolution(_) => None,
        }
    }

    /// True if ξ·f(ξ) = 0 identically.
    pub fn is_solenoidal(&self) -> bool {
        match self {
            Profile::Zero { components } => *components == 3,
            Profile::SwirlSlab(_)
            | Profile::SwirlSlabSolution(_)
            | Profile::SwirlSlabMean(_)
            | Profile::SwirlSlabMeanSolution(_)
            | Profile::Projected { .. }
            | Profile::RotatingSolution { .. } => true,
            Profile::Rotated { inner, .. } | Profile::Scaled { inner, .. } => inner.is_solenoidal(),
            _ => false,
        }
    }

    /// Evaluate at ξ. Scalars occupy slot 0.
    pub fn eval(&self, xi: [f64; 3]) -> V3 {
        match self {
            Profile::Zero { .. } => ZERO3,
            Profile::GaussianPoly { width, terms, .. } => {
                let g = gaussian(xi, *width);
                let mut out = ZERO3;
                for t in terms {
                    let mono = xi[0].powi(t.powers[0] as i32)
                        * xi[1].powi(t.powers[1] as i32)
                        * xi[2].powi(t.powers[2] as i32);
                    out[t.component] += t.coeff * (mono * g);
                }
                out
            }
            Profile::Indicator(f) => {
                let v = if f.in_region(xi) { 1.0 } else { 0.0 };
                [C64::new(v, 0.0), C64::default(), C64::default()]
            }
            Profile::SwirlSlab(f) => {
                if !f.in_region(xi) {
                    return ZERO3;
                }
                let d = swirl_direction(xi);
                let a = f.amplitude();
                d.map(|x| C64::new(a * x, 0.0))
            }
            Profile::SwirlSlabSolution(f) => {
                let m = f.multiplier(xi);
                Profile::SwirlSlab(*f).eval(xi).map(|x| x * m)
            }
            Profile::SwirlSlabMean(f) => {
                let r = xi[1].hypot(xi[2]);
                if !(f.in_slab(xi[0]) && r > 0.0 && r < f.radial_hi()) {
                    return ZERO3;
                }
                // −n^{3/2} e_θ(φ) · i e^{−iℓφ}/(πℓ), e_θ = (0, −sin φ, cos φ)
                let phi = xi[2].atan2(xi[1]);
                let ell = f.ell as f64;
                let phase = C64::from_polar(1.0, -ell * phi) * C64::new(0.0, 1.0)
                    / (std::f64::consts::PI * ell);
                let a = -f.amplitude();
                [
                    C64::default(),
                    phase * (-a * phi.sin()),
                    phase * (a * phi.cos()),
                ]
            }
            Profile::SwirlSlabMeanSolution(f) => {
                let m = f.multiplier(xi);
                Profile::SwirlSlabMean(*f).eval(xi).map(|x| x * m)
            }
            Profile::Rotated { inner, angle } => {
                let q = rotation_matrix_angle(*angle);
                let back = q.transpose_apply(xi);
                let v = inner.eval(back);
                if inner.components() == 3 {
                    q.apply_c(v)
                } else {
                    v
                }
            }
            Profile::Projected { inner } => leray_at(xi, inner.eval(xi)),
            Profile::Scaled { inner, factor } => inner.eval(xi).map(|x| x * *factor),
            Profile::RotatingSolution { solve } => solve.velocity(xi).0,
            Profile::RotatingPressure { solve } => [solve.pressure(xi), C64::default(), C64::default()],
        }
    }

    /// Rotation by `angle`, merging nested rotations; a full cancellation
    /// returns the original profile.
    pub fn rotated(&self, angle: f64) -> Profile {
        if angle == 0.0 {
            return self.clone();
        }
        match self {
            Profile::Rotated { inner, angle: a } => {
                let total = a + angle;
                if total == 0.0 {
                    (**inner).clone()
                } else {
                    Profile::Rotated {
                        inner: inner.clone(),
                        angle: total,
                    }
                }
            }
            _ => Profile::Rotated {
                inner: Box::new(self.clone()),
                angle,
            },
        }
    }
}

impl Mat3 {
    pub(crate) fn apply_c(&self, v: V3) -> V3 {
        let m = &self.0;
        let mut out = ZERO3;
        for (r, row) in m.iter().enumerate() {
            out[r] = v[0] * row[0] + v[1] * row[1] + v[2] * row[2];
        }
        out
    }

    pub(crate) fn transpose_apply_c(&self, v: V3) -> V3 {
        let m = &self.0;
        let mut out = ZERO3;
        for (c, o) in out.iter_mut().enumerate() {
            *o = v[0] * m[0][c] + v[1] * m[1][c] + v[2] * m[2][c];
        }
        out
    }
}
