use rayon::prelude::*;

use super::field::{GridField, SpectralField};
use super::grid::SpectralGrid;
use super::profile::Profile;
use super::{C64, V3};
use crate::error::{Error, Result};
use crate::params::Params;

/// Real 3×3 matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat3(pub [[f64; 3]; 3]);

impl Mat3 {
    pub fn apply(&self, x: [f64; 3]) -> [f64; 3] {
        let m = &self.0;
        [0, 1, 2].map(|r| m[r][0] * x[0] + m[r][1] * x[1] + m[r][2] * x[2])
    }

    pub fn transpose_apply(&self, x: [f64; 3]) -> [f64; 3] {
        let m = &self.0;
        [0, 1, 2].map(|c| m[0][c] * x[0] + m[1][c] * x[1] + m[2][c] * x[2])
    }

    pub fn transpose(&self) -> Mat3 {
        let m = &self.0;
        Mat3([0, 1, 2].map(|r| [m[0][r], m[1][r], m[2][r]]))
    }

    pub fn mul(&self, other: &Mat3) -> Mat3 {
        let (a, b) = (&self.0, &other.0);
        Mat3([0, 1, 2].map(|r| [0, 1, 2].map(|c| (0..3).map(|k| a[r][k] * b[k][c]).sum())))
    }
}

/// Rotation about e₁ by `angle`.
pub fn rotation_matrix_angle(angle: f64) -> Mat3 {
    let (s, c) = angle.sin_cos();
    Mat3([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])
}

/// `Q_ω(t)`: rotation about e₁ by the angle ωt.
pub fn rotation_matrix(t: f64, omega: f64) -> Mat3 {
    rotation_matrix_angle(omega * t)
}

/// `e₁ ∧ v`.
pub fn e1_cross(v: V3) -> V3 {
    [C64::default(), -v[2], v[1]]
}

/// `(I − ξξᵀ/|ξ|²) v`, identity at ξ = 0.
pub fn leray_at(xi: [f64; 3], v: V3) -> V3 {
    let r2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
    if r2 == 0.0 {
        return v;
    }
    let dot = (v[0] * xi[0] + v[1] * xi[1] + v[2] * xi[2]) / r2;
    [v[0] - dot * xi[0], v[1] - dot * xi[1], v[2] - dot * xi[2]]
}

pub fn leray_project(field: &SpectralField) -> Result<SpectralField> {
    field.require_components(3)?;
    Ok(match field {
        SpectralField::ClosedForm(p) if p.is_solenoidal() => field.clone(),
        SpectralField::ClosedForm(p) => Profile::Projected { inner: Box::new(p.clone()) }.into(),
        SpectralField::Grid(g) => {
            let mut out = GridField::from_fn(g.grid, 3, |idx, xi| leray_at(xi, g.at(idx)));
            out.angular_bandwidth = g.angular_bandwidth;
            out.into()
        }
    })
}

/// `Q_ω(t) f(Q_ω(t)ᵀ ξ)`; exact for closed forms, trilinear on grids.
pub fn rotate_spectral(field: &SpectralField, t: f64, omega: f64) -> SpectralField {
    let angle = omega * t;
    match field {
        SpectralField::ClosedForm(p) => p.rotated(angle).into(),
        SpectralField::Grid(g) => {
            if angle == 0.0 {
                return field.clone();
            }
            let q = rotation_matrix_angle(angle);
            let mut out = GridField::from_fn(g.grid, g.components, |_, xi| {
                let v = g.interpolate(q.transpose_apply(xi));
                if g.components == 3 {
                    q.apply_c(v)
                } else {
                    v
                }
            });
            out.angular_bandwidth = g.angular_bandwidth;
            out.into()
        }
    }
}

/// Result of applying the rotating Oseen resolvent operator on a grid.
#[derive(Debug, Clone)]
pub struct Applied {
    pub field: GridField,
    /// Boundary nodes used one-sided differences and should be excluded.
    pub boundary_layer_excluded: bool,
}

fn finite_diff_axis(f: &GridField, c: usize, idx: usize, axis: usize) -> C64 {
    let g = &f.grid;
    let n = g.points_per_axis;
    let h = g.spacing();
    let (i, j, k) = g.unflat(idx);
    let pos = [i, j, k][axis];
    let at = |p: usize| {
        let mut ijk = [i, j, k];
        ijk[axis] = p;
        f.values[c * g.len() + g.flat(ijk[0], ijk[1], ijk[2])]
    };
    if pos == 0 {
        (at(0) * -3.0 + at(1) * 4.0 - at(2)) / (2.0 * h)
    } else if pos == n - 1 {
        (at(n - 1) * 3.0 - at(n - 2) * 4.0 + at(n - 3)) / (2.0 * h)
    } else {
        (at(pos + 1) - at(pos - 1)) / (2.0 * h)
    }
}

/// Symbol part `(is + |ξ|² − iλξ₁)v + ω e₁∧v + iξ p` shared by both paths;
/// the angular advection is subtracted by the caller.
fn local_part(xi: [f64; 3], v: V3, p: C64, params: &Params) -> V3 {
    let r2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
    let d = C64::new(r2, params.s - params.lambda * xi[0]);
    let rot = e1_cross(v);
    let ip = C64::new(0.0, 1.0) * p;
    [0, 1, 2].map(|j| d * v[j] + rot[j] * params.omega + ip * xi[j])
}

/// Orbit step for closed-form angular derivatives.
fn orbit_step(v: &Profile) -> f64 {
    1e-5 / (1.0 + v.angular_bandwidth().unwrap_or(0) as f64)
}

/// Forward operator in Fourier space:
/// `ĝ = (is + |ξ|² − iλξ₁) v̂ − ω((e₁∧ξ)·∇_ξ v̂ − e₁∧v̂) + iξ p̂`.
///
/// Grid velocities use centered differences for the angular derivative
/// (one-sided on the faces); closed forms differentiate along the rotation
/// orbit `θ ↦ v̂(Q(θ)ξ)`.
pub fn apply_resolvent_operator(
    v: &SpectralField,
    p: &SpectralField,
    params: &Params,
    grid: &SpectralGrid,
) -> Result<Applied> {
    v.require_components(3)?;
    p.require_components(1)?;
    if grid.points_per_axis < 3 {
        return Err(Error::invalid("points_per_axis", "grid needs at least 3 points"));
    }
    let pg = p.sample(grid)?;
    match v {
        SpectralField::Grid(vg) => {
            if vg.grid != *grid {
                return Err(Error::GridMismatch("velocity grid differs".into()));
            }
            let field = GridField::from_fn(*grid, 3, |idx, xi| {
                let vv = vg.at(idx);
                let mut out = local_part(xi, vv, pg.at(idx)[0], params);
                for (c, o) in out.iter_mut().enumerate() {
                    let d2 = finite_diff_axis(vg, c, idx, 1);
                    let d3 = finite_diff_axis(vg, c, idx, 2);
                    let adv = d2 * (-xi[2]) + d3 * xi[1];
                    *o -= adv * params.omega;
                }
                out
            });
            Ok(Applied {
                field,
                boundary_layer_excluded: true,
            })
        }
        SpectralField::ClosedForm(prof) => {
            let delta = orbit_step(prof);
            let qp = rotation_matrix_angle(delta);
            let field = GridField::from_fn(*grid, 3, |idx, xi| {
                let vv = prof.eval(xi);
                let mut out = local_part(xi, vv, pg.at(idx)[0], params);
                if xi[1] != 0.0 || xi[2] != 0.0 {
                    let fwd = prof.eval(qp.apply(xi));
                    let bwd = prof.eval(qp.transpose_apply(xi));
                    for c in 0..3 {
                        out[c] -= (fwd[c] - bwd[c]) / (2.0 * delta) * params.omega;
                    }
                }
                out
            });
            Ok(Applied {
                field,
                boundary_layer_excluded: false,
            })
        }
    }
}

/// Relative L² mismatch `‖a − b‖/‖b‖` over nodes off the grid faces (and
/// off the origin). Absolute when `b` vanishes there.
pub fn interior_residual(a: &GridField, b: &GridField) -> f64 {
    let g = &a.grid;
    let origin = g.origin_index();
    let n = g.len();
    let comps = a.components.min(b.components);
    let (num, den): (Vec<f64>, Vec<f64>) = (0..n)
        .into_par_iter()
        .filter(|&idx| idx != origin && !g.is_boundary(idx))
        .map(|idx| {
            let mut d = 0.0;
            let mut r = 0.0;
            for c in 0..comps {
                d += (a.values[c * n + idx] - b.values[c * n + idx]).norm_sqr();
                r += b.values[c * n + idx].norm_sqr();
            }
            (d, r)
        })
        .unzip();
    let num = crate::numerics::pairwise_sum(&num).sqrt();
    let den = crate::numerics::pairwise_sum(&den).sqrt();
    if den > 0.0 {
        num / den
    } else {
        num
    }
}

/// Pointwise product with a scalar symbol, evaluated at each node.
pub fn multiply_symbol<F>(f: &GridField, symbol: F) -> GridField
where
    F: Fn([f64; 3]) -> C64 + Sync,
{
    let mut out = GridField::from_fn(f.grid, f.components, |idx, xi| {
        let m = symbol(xi);
        f.at(idx).map(|x| x * m)
    });
    out.angular_bandwidth = f.angular_bandwidth;
    out
}

/// Scalar-to-vector gradient `iξ p̂`.
pub fn gradient_scalar(p: &GridField) -> GridField {
    GridField::from_fn(p.grid, 3, |idx, xi| {
        let v = p.at(idx)[0] * C64::new(0.0, 1.0);
        [v * xi[0], v * xi[1], v * xi[2]]
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: V3, b: V3, tol: f64) -> bool {
        (0..3).all(|c| (a[c] - b[c]).norm() <= tol)
    }

    #[test]
    fn quarter_turn_maps_axes() {
        let q = rotation_matrix(std::f64::consts::FRAC_PI_2, 1.0);
        let e2 = q.apply([0.0, 1.0, 0.0]);
        let e3 = q.apply([0.0, 0.0, 1.0]);
        assert!((e2[2] - 1.0).abs() < 1e-15 && e2[1].abs() < 1e-15);
        assert!((e3[1] + 1.0).abs() < 1e-15 && e3[2].abs() < 1e-15);
        assert_eq!(rotation_matrix(0.0, 3.0), Mat3([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]));
    }

    #[test]
    fn rotation_derivative_is_e1_cross() {
        let (omega, t, h) = (1.7, 0.4, 1e-6);
        let x = [0.3, -1.2, 0.8];
        let qx = rotation_matrix(t, omega).apply(x);
        let fwd = rotation_matrix(t + h, omega).apply(x);
        let bwd = rotation_matrix(t - h, omega).apply(x);
        let expected = [0.0, -omega * qx[2], omega * qx[1]];
        for a in 0..3 {
            assert!(((fwd[a] - bwd[a]) / (2.0 * h) - expected[a]).abs() < 1e-8);
        }
    }

    #[test]
    fn rotation_is_orthogonal_and_periodic() {
        let omega = 0.7;
        let q = rotation_matrix(1.3, omega);
        let id = q.transpose().mul(&q);
        for r in 0..3 {
            for c in 0..3 {
                let want = if r == c { 1.0 } else { 0.0 };
                assert!((id.0[r][c] - want).abs() < 1e-15);
            }
        }
        let t_period = std::f64::consts::TAU / omega;
        let q2 = rotation_matrix(1.3 + t_period, omega);
        for r in 0..3 {
            for c in 0..3 {
                assert!((q.0[r][c] - q2.0[r][c]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn leray_kills_gradient_and_fixes_orthogonal() {
        let xi = [0.3, -0.4, 1.1];
        let grad = xi.map(|x| C64::new(2.0 * x, -x));
        assert!(close(leray_at(xi, grad), crate::spectral::ZERO3, 1e-15));
        let e1 = [C64::new(1.0, 0.0), C64::default(), C64::default()];
        assert_eq!(leray_at([0.0, 1.0, 0.0], e1), e1);
        assert_eq!(leray_at([0.0; 3], e1), e1);
    }

    #[test]
    fn axisymmetric_e1_field_has_no_rotation_term() {
        let grid = SpectralGrid::new(3.0, 9).unwrap();
        let params = Params::resolvent(0.8, 2.5, 0.3).unwrap();
        let v = SpectralField::from(Profile::axial_gaussian(1.0));
        let p = SpectralField::from(Profile::radial_scalar(0.7));
        let pg = p.sample(&grid).unwrap();
        let vg = v.sample(&grid).unwrap();
        let exact = apply_resolvent_operator(&v, &p, &params, &grid).unwrap();
        let fd = apply_resolvent_operator(&vg.clone().into(), &p, &params, &grid).unwrap();
        assert!(fd.boundary_layer_excluded);
        for idx in 0..grid.len() {
            let xi = grid.node(idx);
            let want = local_part(xi, vg.at(idx), pg.at(idx)[0], &params);
            assert!(close(exact.field.at(idx), want, 1e-9));
            if !grid.is_boundary(idx) {
                // second-order FD of a radial profile: O(h²) leftover
                assert!(close(fd.field.at(idx), want, 0.1 * params.omega));
            }
        }
    }

    #[test]
    fn closed_form_rotate_round_trip_is_exact() {
        let f: SpectralField = Profile::swirl_gaussian(1.2).into();
        let back = rotate_spectral(&rotate_spectral(&f, 0.9, 1.3), -0.9, 1.3);
        assert_eq!(back, f);
    }
}
