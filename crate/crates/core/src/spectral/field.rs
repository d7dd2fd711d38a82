use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::SpectralGrid;
use super::profile::Profile;
use super::{C64, V3, ZERO3};
use crate::error::{Error, Result};

/// Sampled field on a [`SpectralGrid`], component-major with ξ₁ fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridField {
    pub grid: SpectralGrid,
    pub components: usize,
    pub values: Vec<C64>,
    /// Declared angular bandwidth about e₁, when known.
    #[serde(default)]
    pub angular_bandwidth: Option<usize>,
}

impl GridField {
    pub fn zeros(grid: SpectralGrid, components: usize) -> Self {
        GridField {
            grid,
            components,
            values: vec![C64::default(); components * grid.len()],
            angular_bandwidth: None,
        }
    }

    pub fn from_values(grid: SpectralGrid, components: usize, values: Vec<C64>) -> Result<Self> {
        if components != 1 && components != 3 {
            return Err(Error::invalid("components", "must be 1 or 3"));
        }
        if values.len() != components * grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} values for {} components on {}³ nodes",
                values.len(),
                components,
                grid.points_per_axis
            )));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::invalid("values", "grid values must be finite"));
        }
        Ok(GridField {
            grid,
            components,
            values,
            angular_bandwidth: None,
        })
    }

    /// Build from a per-node closure, in parallel.
    pub fn from_fn<F>(grid: SpectralGrid, components: usize, f: F) -> Self
    where
        F: Fn(usize, [f64; 3]) -> V3 + Sync,
    {
        let per_node: Vec<V3> = (0..grid.len())
            .into_par_iter()
            .map(|idx| f(idx, grid.node(idx)))
            .collect();
        let n = grid.len();
        let mut values = vec![C64::default(); components * n];
        for (idx, v) in per_node.iter().enumerate() {
            for c in 0..components {
                values[c * n + idx] = v[c];
            }
        }
        GridField {
            grid,
            components,
            values,
            angular_bandwidth: None,
        }
    }

    pub fn at(&self, idx: usize) -> V3 {
        let n = self.grid.len();
        let mut out = ZERO3;
        for (c, o) in out.iter_mut().enumerate().take(self.components) {
            *o = self.values[c * n + idx];
        }
        out
    }

    pub fn component(&self, c: usize) -> &[C64] {
        let n = self.grid.len();
        &self.values[c * n..(c + 1) * n]
    }

    /// Trilinear interpolation; zero outside the box.
    pub fn interpolate(&self, p: [f64; 3]) -> V3 {
        let g = &self.grid;
        let n = g.points_per_axis;
        let h = g.spacing();
        let mut base = [0usize; 3];
        let mut frac = [0.0; 3];
        for a in 0..3 {
            let u = (p[a] + g.half_width) / h;
            if !(u >= -1e-12 && u <= (n - 1) as f64 + 1e-12) {
                return ZERO3;
            }
            let i0 = (u.floor().max(0.0) as usize).min(n - 2);
            base[a] = i0;
            frac[a] = (u - i0 as f64).clamp(0.0, 1.0);
        }
        let mut out = ZERO3;
        for corner in 0..8usize {
            let mut w = 1.0;
            let mut idx = [0usize; 3];
            for a in 0..3 {
                let bit = (corner >> a) & 1;
                idx[a] = base[a] + bit;
                w *= if bit == 1 { frac[a] } else { 1.0 - frac[a] };
            }
            if w == 0.0 {
                continue;
            }
            let v = self.at(g.flat(idx[0], idx[1], idx[2]));
            for c in 0..self.components {
                out[c] += v[c] * w;
            }
        }
        out
    }
}

/// A complex Fourier-space field: either grid samples or a closed form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "repr", rename_all = "snake_case")]
pub enum SpectralField {
    Grid(GridField),
    ClosedForm(Profile),
}

impl From<Profile> for SpectralField {
    fn from(p: Profile) -> Self {
        SpectralField::ClosedForm(p)
    }
}

impl From<GridField> for SpectralField {
    fn from(g: GridField) -> Self {
        SpectralField::Grid(g)
    }
}

impl SpectralField {
    pub fn components(&self) -> usize {
        match self {
            SpectralField::Grid(g) => g.components,
            SpectralField::ClosedForm(p) => p.components(),
        }
    }

    pub fn angular_bandwidth(&self) -> Option<usize> {
        match self {
            SpectralField::Grid(g) => g.angular_bandwidth,
            SpectralField::ClosedForm(p) => p.angular_bandwidth(),
        }
    }

    /// Value at ξ; grid fields interpolate.
    pub fn eval(&self, xi: [f64; 3]) -> V3 {
        match self {
            SpectralField::Grid(g) => g.interpolate(xi),
            SpectralField::ClosedForm(p) => p.eval(xi),
        }
    }

    /// Sample onto `grid`. Grid fields must already live on it.
    pub fn sample(&self, grid: &SpectralGrid) -> Result<GridField> {
        match self {
            SpectralField::Grid(g) => {
                if g.grid != *grid {
                    return Err(Error::GridMismatch(format!(
                        "field grid {:?} vs requested {:?}",
                        g.grid, grid
                    )));
                }
                Ok(g.clone())
            }
            SpectralField::ClosedForm(p) => {
                let mut out = GridField::from_fn(*grid, p.components(), |_, xi| p.eval(xi));
                out.angular_bandwidth = p.angular_bandwidth();
                Ok(out)
            }
        }
    }

    pub fn require_components(&self, expected: usize) -> Result<()> {
        let found = self.components();
        if found == expected {
            Ok(())
        } else {
            Err(Error::ComponentMismatch { expected, found })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolation_is_exact_for_affine_data() {
        let grid = SpectralGrid::new(1.0, 5).unwrap();
        let f = GridField::from_fn(grid, 1, |_, x| {
            [C64::new(1.0 + 2.0 * x[0] - x[1] + 0.5 * x[2], x[2]), C64::default(), C64::default()]
        });
        let p = [0.123, -0.77, 0.31];
        let v = f.interpolate(p)[0];
        assert!((v - C64::new(1.0 + 0.246 + 0.77 + 0.155, 0.31)).norm() < 1e-14);
        assert_eq!(f.interpolate([1.5, 0.0, 0.0]), ZERO3);
    }

    #[test]
    fn sampling_rejects_foreign_grid() {
        let g1 = SpectralGrid::new(1.0, 5).unwrap();
        let g2 = SpectralGrid::new(1.0, 7).unwrap();
        let f = SpectralField::Grid(GridField::zeros(g1, 3));
        assert!(f.sample(&g2).is_err());
    }

    #[test]
    fn from_values_checks_length_and_finiteness() {
        let g = SpectralGrid::new(1.0, 3).unwrap();
        assert!(GridField::from_values(g, 3, vec![C64::default(); 10]).is_err());
        let mut v = vec![C64::default(); 27];
        v[3] = C64::new(f64::NAN, 0.0);
        assert!(GridField::from_values(g, 1, v).is_err());
    }
}
