use crate::error::Result;
use crate::params::Params;
use crate::spectral::ops::leray_at;
use crate::spectral::{GridField, SpectralField, SpectralGrid, C64, V3, ZERO3};

use super::symbol::denominator;

/// Pointwise solution of `(is + iωk − iλξ₁ + |ξ|²)û + iξp̂ = ĝ`, `ξ·û = 0`.
/// Returns `(û, p̂, kernel_dropped)`.
pub fn aux_at(params: &Params, k: f64, xi: [f64; 3], g: V3) -> (V3, C64, bool) {
    let r2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
    let p = if r2 > 0.0 {
        let dot = g[0] * xi[0] + g[1] * xi[1] + g[2] * xi[2];
        dot * C64::new(0.0, -1.0 / r2)
    } else {
        C64::default()
    };
    let d = denominator(params, k, xi);
    if d == C64::new(0.0, 0.0) {
        let dropped = g.iter().any(|c| *c != C64::default());
        return (ZERO3, p, dropped);
    }
    let m = d.inv();
    (leray_at(xi, g).map(|c| c * m), p, false)
}

#[derive(Debug, Clone)]
pub struct AuxSolution {
    pub velocity: GridField,
    pub pressure: GridField,
    pub kernel_mode_dropped: bool,
}

/// Per-mode multiplier solve on a grid: `p̂ = −iξ·ĝ/|ξ|²`,
/// `û = m(k,ξ)(I − ξξᵀ/|ξ|²)ĝ`.
pub fn solve_aux_mode(
    g: &SpectralField,
    k: i64,
    params: &Params,
    grid: &SpectralGrid,
) -> Result<AuxSolution> {
    g.require_components(3)?;
    let gg = g.sample(grid)?;
    let kf = k as f64;
    let n = grid.len();
    let mut velocity = GridField::zeros(*grid, 3);
    let mut pressure = GridField::zeros(*grid, 1);
    let mut dropped = false;
    for idx in 0..n {
        let (u, p, d) = aux_at(params, kf, grid.node(idx), gg.at(idx));
        for c in 0..3 {
            velocity.values[c * n + idx] = u[c];
        }
        pressure.values[idx] = p;
        dropped |= d;
    }
    Ok(AuxSolution {
        velocity,
        pressure,
        kernel_mode_dropped: dropped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Profile;

    #[test]
    fn zero_rhs() {
        let grid = SpectralGrid::new(1.0, 5).unwrap();
        let p = Params::resolvent(1.0, 1.0, 0.3).unwrap();
        let z: SpectralField = Profile::Zero { components: 3 }.into();
        let s = solve_aux_mode(&z, 2, &p, &grid).unwrap();
        assert!(s.velocity.values.iter().all(|v| *v == C64::default()));
        assert!(s.pressure.values.iter().all(|v| *v == C64::default()));
    }

    #[test]
    fn gradient_goes_to_pressure() {
        let grid = SpectralGrid::new(2.0, 7).unwrap();
        let p = Params::resolvent(1.0, 1.0, 0.3).unwrap();
        let w = 0.9;
        let g: SpectralField = Profile::gradient_gaussian(w).into();
        let s = solve_aux_mode(&g, 0, &p, &grid).unwrap();
        for idx in 0..grid.len() {
            let xi = grid.node(idx);
            let u = s.velocity.at(idx);
            assert!(u.iter().all(|c| c.norm() < 1e-15));
            let r2 = xi.iter().map(|x| x * x).sum::<f64>();
            if r2 > 0.0 {
                let phi = (-r2 / (2.0 * w * w)).exp();
                assert!((s.pressure.values[idx] - C64::new(0.0, -phi)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn kernel_node_is_flagged() {
        let grid = SpectralGrid::new(1.0, 3).unwrap();
        let p = Params::resolvent(1.0, 2.0, -4.0).unwrap();
        let g: SpectralField = Profile::axial_gaussian(1.0).into();
        assert!(solve_aux_mode(&g, 2, &p, &grid).unwrap().kernel_mode_dropped);
        assert!(!solve_aux_mode(&g, 1, &p, &grid).unwrap().kernel_mode_dropped);
    }
}
