use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Odd-sized symmetric Cartesian sampling of ξ-space, `[-L, L]³` with `N`
/// points per axis. The origin is node `(N-1)/2` on every axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralGrid {
    pub half_width: f64,
    pub points_per_axis: usize,
}

impl SpectralGrid {
    pub fn new(half_width: f64, points_per_axis: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::invalid("half_width", "must be finite and > 0"));
        }
        if points_per_axis < 3 || points_per_axis % 2 == 0 {
            return Err(Error::invalid(
                "points_per_axis",
                format!("must be odd and >= 3, got {points_per_axis}"),
            ));
        }
        Ok(SpectralGrid {
            half_width,
            points_per_axis,
        })
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.points_per_axis - 1) as f64
    }

    pub fn len(&self) -> usize {
        self.points_per_axis.pow(3)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn center(&self) -> usize {
        (self.points_per_axis - 1) / 2
    }

    pub fn coord(&self, i: usize) -> f64 {
        (i as f64 - self.center() as f64) * self.spacing()
    }

    /// Flat index with the first axis fastest.
    pub fn flat(&self, i: usize, j: usize, k: usize) -> usize {
        let n = self.points_per_axis;
        (k * n + j) * n + i
    }

    pub fn unflat(&self, idx: usize) -> (usize, usize, usize) {
        let n = self.points_per_axis;
        (idx % n, (idx / n) % n, idx / (n * n))
    }

    pub fn node(&self, idx: usize) -> [f64; 3] {
        let (i, j, k) = self.unflat(idx);
        [self.coord(i), self.coord(j), self.coord(k)]
    }

    pub fn origin_index(&self) -> usize {
        let c = self.center();
        self.flat(c, c, c)
    }

    /// True when the node touches a face of the box.
    pub fn is_boundary(&self, idx: usize) -> bool {
        let (i, j, k) = self.unflat(idx);
        let last = self.points_per_axis - 1;
        [i, j, k].iter().any(|&a| a == 0 || a == last)
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(3)
    }
}

/// Physical-space sample box `[-X, X]³` used for the L^q norms with q ≠ 2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalBox {
    pub half_width: f64,
    pub points_per_axis: usize,
}

impl PhysicalBox {
    pub fn new(half_width: f64, points_per_axis: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::invalid("box half_width", "must be finite and > 0"));
        }
        if points_per_axis < 2 {
            return Err(Error::invalid("box points_per_axis", "must be >= 2"));
        }
        Ok(PhysicalBox {
            half_width,
            points_per_axis,
        })
    }

    /// The box dual to `grid`: spacing `2π/(N·Δξ)` with the same `N`, so the
    /// discrete transform is unitary and Plancherel holds exactly.
    pub fn reciprocal(grid: &SpectralGrid) -> Self {
        let n = grid.points_per_axis;
        let dx = std::f64::consts::TAU / (n as f64 * grid.spacing());
        PhysicalBox {
            half_width: dx * (n - 1) as f64 / 2.0,
            points_per_axis: n,
        }
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.points_per_axis - 1) as f64
    }

    pub fn coord(&self, i: usize) -> f64 {
        -self.half_width + i as f64 * self.spacing()
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(3)
    }

    pub fn len(&self) -> usize {
        self.points_per_axis.pow(3)
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_contains_origin_once() {
        let g = SpectralGrid::new(2.0, 5).unwrap();
        let zeros = (0..g.len()).filter(|&i| g.node(i) == [0.0; 3]).count();
        assert_eq!(zeros, 1);
        assert_eq!(g.node(g.origin_index()), [0.0; 3]);
        assert!((g.spacing() * 4.0 - 4.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_even_or_tiny_grids() {
        assert!(SpectralGrid::new(1.0, 4).is_err());
        assert!(SpectralGrid::new(1.0, 1).is_err());
        assert!(SpectralGrid::new(-1.0, 5).is_err());
    }

    #[test]
    fn flat_round_trip() {
        let g = SpectralGrid::new(1.0, 7).unwrap();
        for idx in [0, 5, 48, 200, g.len() - 1] {
            let (i, j, k) = g.unflat(idx);
            assert_eq!(g.flat(i, j, k), idx);
        }
    }

    #[test]
    fn reciprocal_box_spacing() {
        let g = SpectralGrid::new(4.0, 9).unwrap();
        let b = PhysicalBox::reciprocal(&g);
        assert!((b.spacing() * 9.0 * g.spacing() - std::f64::consts::TAU).abs() < 1e-12);
        assert!((b.coord(4)).abs() < 1e-12);
    }
}
