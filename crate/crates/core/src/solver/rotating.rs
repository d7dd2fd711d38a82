//! Resolvent solve in the rotating frame: conjugate by `Q_ω(t)`, solve each
//! time mode with the non-rotating multipliers, rotate back and average.
//!
//! On uniform trapezoid nodes the three steps collapse algebraically to
//! `v̂(ξ) = Σ_k m(k,ξ) P(ξ) ĥ_{−k}(ξ)` with
//! `ĥ_j(ξ) = (1/N) Σ_c Q(t_c)ᵀ ĝ(Q(t_c)ξ) e^{−iωj t_c}`, which costs
//! `O(N·K)` per point. The literal chain is kept as a reference.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::aux::aux_at;
use crate::error::{Error, Result};
use crate::numerics::halton;
use crate::params::Params;
use crate::spectral::ops::rotation_matrix_angle;
use crate::spectral::{
    apply_resolvent_operator, interior_residual, GridField, Profile, SpectralField, SpectralGrid,
    C64, V3, ZERO3,
};

/// A rotating-frame solve of a closed-form right-hand side, evaluable at
/// any ξ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RotatingSolve {
    pub rhs: Profile,
    pub lambda: f64,
    pub omega: f64,
    pub s: f64,
    pub n_time_nodes: usize,
    /// Time modes `|k| <= max_mode` are kept.
    pub max_mode: usize,
}

/// `ĥ_j` for `j = −K..=K` at one point, from a right-hand side evaluator.
fn time_modes<F: Fn([f64; 3]) -> V3>(eval: &F, xi: [f64; 3], n: usize, kmax: usize) -> Vec<V3> {
    let width = 2 * kmax + 1;
    let mut modes = vec![ZERO3; width];
    let inv_n = 1.0 / n as f64;
    for c in 0..n {
        let theta = std::f64::consts::TAU * c as f64 / n as f64;
        let q = rotation_matrix_angle(theta);
        let h = q.transpose_apply_c(eval(q.apply(xi)));
        if h == ZERO3 {
            continue;
        }
        // e^{−ijθ} for j = −K..K by recurrence from j = −K
        let step = C64::from_polar(1.0, -theta);
        let mut w = C64::from_polar(1.0, theta * kmax as f64);
        for m in modes.iter_mut() {
            for a in 0..3 {
                m[a] += h[a] * w;
            }
            w *= step;
        }
    }
    for m in modes.iter_mut() {
        for a in m.iter_mut() {
            *a *= inv_n;
        }
    }
    modes
}

/// Velocity, pressure and kernel flag at one point.
fn solve_point<F: Fn([f64; 3]) -> V3>(
    eval: &F,
    params: &Params,
    xi: [f64; 3],
    n: usize,
    kmax: usize,
) -> (V3, C64, bool) {
    let modes = time_modes(eval, xi, n, kmax);
    let mut v = ZERO3;
    let mut total = ZERO3;
    let mut dropped = false;
    let k_lo = -(kmax as i64);
    for (off, h) in modes.iter().enumerate() {
        // modes[off] holds ĥ_j with j = off − K; it feeds time mode k = −j
        let k = -(k_lo + off as i64);
        let (u, _, d) = aux_at(params, k as f64, xi, *h);
        dropped |= d;
        for a in 0..3 {
            v[a] += u[a];
            total[a] += h[a];
        }
    }
    let r2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
    let p = if r2 > 0.0 {
        let dot = total[0] * xi[0] + total[1] * xi[1] + total[2] * xi[2];
        dot * C64::new(0.0, -1.0 / r2)
    } else {
        C64::default()
    };
    (v, p, dropped)
}

impl RotatingSolve {
    fn params(&self) -> Params {
        Params {
            lambda: self.lambda,
            omega: self.omega,
            s: self.s,
            period: std::f64::consts::TAU / self.omega,
            q: 2.0,
        }
    }

    /// `(v̂(ξ), kernel_dropped)`.
    pub fn velocity(&self, xi: [f64; 3]) -> (V3, bool) {
        let (v, _, d) = solve_point(&|x| self.rhs.eval(x), &self.params(), xi, self.n_time_nodes, self.max_mode);
        (v, d)
    }

    pub fn pressure(&self, xi: [f64; 3]) -> C64 {
        solve_point(&|x| self.rhs.eval(x), &self.params(), xi, self.n_time_nodes, self.max_mode).1
    }

    /// The literal three-step chain: rotated right-hand-side modes, per-mode
    /// multiplier solve at the rotated point, rotation back and time mean.
    /// `O(N²K)` per point.
    pub fn velocity_literal(&self, xi: [f64; 3]) -> V3 {
        let n = self.n_time_nodes;
        let kmax = self.max_mode as i64;
        let params = self.params();
        let theta = |c: usize| std::f64::consts::TAU * c as f64 / n as f64;
        // f̃_k(η) = (1/N) Σ_c Q_c ĝ(Q_cᵀ η) e^{−ikθ_c}
        let ftilde = |k: i64, eta: [f64; 3]| -> V3 {
            let mut acc = ZERO3;
            for c in 0..n {
                let q = rotation_matrix_angle(theta(c));
                let g = q.apply_c(self.rhs.eval(q.transpose_apply(eta)));
                let w = C64::from_polar(1.0 / n as f64, -(k as f64) * theta(c));
                for a in 0..3 {
                    acc[a] += g[a] * w;
                }
            }
            acc
        };
        let mut v = ZERO3;
        for a_idx in 0..n {
            let q = rotation_matrix_angle(theta(a_idx));
            let eta = q.apply(xi);
            let mut sum = ZERO3;
            for k in -kmax..=kmax {
                let (u, _, _) = aux_at(&params, k as f64, eta, ftilde(k, eta));
                let w = C64::from_polar(1.0, k as f64 * theta(a_idx));
                for a in 0..3 {
                    sum[a] += u[a] * w;
                }
            }
            let back = q.transpose_apply_c(sum);
            for a in 0..3 {
                v[a] += back[a] / n as f64;
            }
        }
        v
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveFlags {
    pub kernel_mode_dropped: bool,
    pub boundary_layer_excluded: bool,
    /// No angular bandwidth was declared; all resolvable modes were kept.
    pub bandwidth_unknown: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveReport {
    pub velocity: SpectralField,
    pub pressure: SpectralField,
    pub flags: SolveFlags,
    pub residual_interior: f64,
    pub max_mode: usize,
    /// Relative change when halving the time nodes; only without a bandwidth.
    pub quadrature_error_estimate: Option<f64>,
}

/// Time nodes required for angular bandwidth `m`.
pub fn required_time_nodes(m: usize) -> usize {
    4 * (m + 2)
}

/// Resolvent solve with rotation. Closed-form right-hand sides give a
/// closed-form velocity evaluable anywhere; grid input gives grid output
/// (rotations by trilinear interpolation).
pub fn solve_resolvent_rotating(
    g: &SpectralField,
    params: &Params,
    n_time_nodes: usize,
    grid: &SpectralGrid,
) -> Result<SolveReport> {
    g.require_components(3)?;
    params.validate()?;
    let mut flags = SolveFlags::default();
    let (max_mode, check_nodes) = match g.angular_bandwidth() {
        Some(m) => {
            let needed = required_time_nodes(m);
            if n_time_nodes < needed {
                return Err(Error::InsufficientTimeNodes {
                    got: n_time_nodes,
                    needed,
                    bandwidth: m,
                });
            }
            (m + 1, None)
        }
        None => {
            if n_time_nodes < 8 {
                return Err(Error::InsufficientTimeNodes {
                    got: n_time_nodes,
                    needed: 8,
                    bandwidth: 0,
                });
            }
            flags.bandwidth_unknown = true;
            ((n_time_nodes - 1) / 2, Some(n_time_nodes / 2))
        }
    };
    match g {
        SpectralField::ClosedForm(rhs) => {
            let solve = RotatingSolve {
                rhs: rhs.clone(),
                lambda: params.lambda,
                omega: params.omega,
                s: params.s,
                n_time_nodes,
                max_mode,
            };
            flags.kernel_mode_dropped = solve.velocity([0.0; 3]).1;
            let velocity: SpectralField = Profile::RotatingSolution { solve: Box::new(solve.clone()) }.into();
            let pressure: SpectralField = Profile::RotatingPressure { solve: Box::new(solve.clone()) }.into();
            let quadrature_error_estimate = check_nodes.map(|half| {
                let coarse = RotatingSolve {
                    n_time_nodes: half,
                    max_mode: (half - 1) / 2,
                    ..solve.clone()
                };
                let pts: Vec<[f64; 3]> = (0..64)
                    .map(|i| halton(i, 3))
                    .map(|u| [0, 1, 2].map(|a| (2.0 * u[a] - 1.0) * grid.half_width))
                    .collect();
                let (mut num, mut den) = (0.0, 0.0);
                for p in pts {
                    let a = solve.velocity(p).0;
                    let b = coarse.velocity(p).0;
                    for c in 0..3 {
                        num += (a[c] - b[c]).norm_sqr();
                        den += a[c].norm_sqr();
                    }
                }
                if den > 0.0 {
                    (num / den).sqrt()
                } else {
                    num.sqrt()
                }
            });
            let applied = apply_resolvent_operator(&velocity, &pressure, params, grid)?;
            let gg = g.sample(grid)?;
            let residual_interior = interior_residual(&applied.field, &gg);
            Ok(SolveReport {
                velocity,
                pressure,
                flags,
                residual_interior,
                max_mode,
                quadrature_error_estimate,
            })
        }
        SpectralField::Grid(gg) => {
            if gg.grid != *grid {
                return Err(Error::GridMismatch("right-hand side grid differs".into()));
            }
            let (vel, pre, dropped) = solve_on_grid(gg, params, n_time_nodes, max_mode);
            flags.kernel_mode_dropped = dropped;
            let quadrature_error_estimate = check_nodes.map(|half| {
                let (coarse, _, _) = solve_on_grid(gg, params, half, (half - 1) / 2);
                interior_residual(&coarse, &vel)
            });
            let velocity: SpectralField = vel.into();
            let pressure: SpectralField = pre.into();
            let applied = apply_resolvent_operator(&velocity, &pressure, params, grid)?;
            flags.boundary_layer_excluded = applied.boundary_layer_excluded;
            let residual_interior = interior_residual(&applied.field, gg);
            Ok(SolveReport {
                velocity,
                pressure,
                flags,
                residual_interior,
                max_mode,
                quadrature_error_estimate,
            })
        }
    }
}

fn solve_on_grid(
    g: &GridField,
    params: &Params,
    n: usize,
    kmax: usize,
) -> (GridField, GridField, bool) {
    let grid = g.grid;
    let per_node: Vec<(V3, C64, bool)> = (0..grid.len())
        .into_par_iter()
        .map(|idx| solve_point(&|x| g.interpolate(x), params, grid.node(idx), n, kmax))
        .collect();
    let len = grid.len();
    let mut vel = GridField::zeros(grid, 3);
    let mut pre = GridField::zeros(grid, 1);
    let mut dropped = false;
    for (idx, (v, p, d)) in per_node.into_iter().enumerate() {
        for c in 0..3 {
            vel.values[c * len + idx] = v[c];
        }
        pre.values[idx] = p;
        dropped |= d;
    }
    vel.angular_bandwidth = g.angular_bandwidth;
    (vel, pre, dropped)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::aux::solve_aux_mode;
    use crate::spectral::{Monomial, SlabFamily};

    fn close(a: V3, b: V3) -> f64 {
        (0..3).map(|c| (a[c] - b[c]).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn fast_chain_equals_literal_chain() {
        let rhs = Profile::GaussianPoly {
            components: 3,
            width: 1.1,
            terms: vec![
                Monomial { component: 0, powers: [0, 1, 0], coeff: C64::new(1.0, 0.5) },
                Monomial { component: 1, powers: [1, 0, 1], coeff: C64::new(-0.3, 0.0) },
                Monomial { component: 2, powers: [0, 2, 0], coeff: C64::new(0.0, 0.7) },
            ],
        };
        let solve = RotatingSolve {
            rhs,
            lambda: 0.8,
            omega: 1.3,
            s: 0.45,
            n_time_nodes: 16,
            max_mode: 3,
        };
        for xi in [[0.3, -0.4, 0.9], [1.2, 0.1, -0.2], [0.0, 0.5, 0.5]] {
            let fast = solve.velocity(xi).0;
            let slow = solve.velocity_literal(xi);
            assert!(close(fast, slow) < 1e-13, "{xi:?}");
        }
    }

    #[test]
    fn axisymmetric_input_reduces_to_single_mode() {
        let grid = SpectralGrid::new(2.0, 5).unwrap();
        let params = Params::resolvent(0.6, 1.7, 0.35).unwrap();
        let g: SpectralField = Profile::axial_gaussian(0.8).into();
        let rep = solve_resolvent_rotating(&g, &params, 8, &grid).unwrap();
        let aux = solve_aux_mode(&g, 0, &params, &grid).unwrap();
        for idx in 0..grid.len() {
            let v = rep.velocity.eval(grid.node(idx));
            assert!(close(v, aux.velocity.at(idx)) < 1e-15);
        }
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let grid = SpectralGrid::new(1.0, 5).unwrap();
        let params = Params::resolvent(1.0, 1.0, 0.2).unwrap();
        let g: SpectralField = Profile::Zero { components: 3 }.into();
        let rep = solve_resolvent_rotating(&g, &params, 8, &grid).unwrap();
        assert_eq!(rep.residual_interior, 0.0);
        assert_eq!(rep.velocity.eval([0.3, 0.2, 0.1]), ZERO3);
    }

    #[test]
    fn residual_is_small_for_bandlimited_rhs() {
        let grid = SpectralGrid::new(2.5, 9).unwrap();
        let params = Params::resolvent(0.9, 1.4, 0.3).unwrap();
        let g: SpectralField = Profile::swirl_gaussian(1.0).into();
        let rep = solve_resolvent_rotating(&g, &params, 12, &grid).unwrap();
        assert!(rep.residual_interior < 1e-6, "{}", rep.residual_interior);
    }

    #[test]
    fn too_few_nodes_rejected() {
        let grid = SpectralGrid::new(1.0, 5).unwrap();
        let params = Params::resolvent(1.0, 1.0, 0.2).unwrap();
        let g: SpectralField = Profile::swirl_gaussian(1.0).into();
        assert!(matches!(
            solve_resolvent_rotating(&g, &params, 11, &grid),
            Err(Error::InsufficientTimeNodes { needed: 12, .. })
        ));
    }

    #[test]
    fn slab_mean_solution_matches_closed_form() {
        let f = SlabFamily { n: 8, lambda: 1.0, sigma: 0.1326, ell: 5 };
        let s = f.sigma - 5.0;
        let solve = RotatingSolve {
            rhs: Profile::SwirlSlabMean(f),
            lambda: 1.0,
            omega: 1.0,
            s,
            n_time_nodes: 28,
            max_mode: 6,
        };
        let xi = [0.09, 0.05, -0.07];
        let want = Profile::SwirlSlabMeanSolution(f).eval(xi);
        assert!(close(solve.velocity(xi).0, want) < 1e-10);
    }
}
