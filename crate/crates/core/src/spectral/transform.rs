use rayon::prelude::*;

use super::field::GridField;
use super::grid::PhysicalBox;
use super::C64;

/// Samples of an inverse-transformed field on a [`PhysicalBox`],
/// component-major with x₁ fastest.
#[derive(Debug, Clone)]
pub struct PhysicalField {
    pub physical_box: PhysicalBox,
    pub components: usize,
    pub values: Vec<C64>,
}

/// `E[a][i] = (2π)^{-1/2} h e^{i x_a ξ_i}` for one axis.
fn kernel(field: &GridField, bx: &PhysicalBox) -> Vec<C64> {
    let n = field.grid.points_per_axis;
    let m = bx.points_per_axis;
    let w = field.grid.spacing() / std::f64::consts::TAU.sqrt();
    let mut e = Vec::with_capacity(m * n);
    for a in 0..m {
        let x = bx.coord(a);
        for i in 0..n {
            e.push(C64::from_polar(w, x * field.grid.coord(i)));
        }
    }
    e
}

/// Riemann-sum inverse transform
/// `v(x) = (2π)^{-3/2} Σ_ξ v̂(ξ) e^{i x·ξ} h³`, applied one axis at a time.
pub fn inverse_transform(field: &GridField, bx: &PhysicalBox) -> PhysicalField {
    let n = field.grid.points_per_axis;
    let m = bx.points_per_axis;
    let e = kernel(field, bx);
    let mut values = Vec::with_capacity(field.components * m * m * m);
    for c in 0..field.components {
        let src = field.component(c);
        // axis 1: (k, j, i) -> (k, j, a)
        let mut t1 = vec![C64::default(); n * n * m];
        t1.par_chunks_mut(m).enumerate().for_each(|(kj, out)| {
            let row = &src[kj * n..(kj + 1) * n];
            for (a, o) in out.iter_mut().enumerate() {
                let ek = &e[a * n..(a + 1) * n];
                *o = row.iter().zip(ek).map(|(v, w)| v * w).sum();
            }
        });
        // axis 2: (k, j, a) -> (k, b, a)
        let mut t2 = vec![C64::default(); n * m * m];
        t2.par_chunks_mut(m * m).enumerate().for_each(|(k, out)| {
            for b in 0..m {
                let ek = &e[b * n..(b + 1) * n];
                for a in 0..m {
                    let mut acc = C64::default();
                    for j in 0..n {
                        acc += t1[(k * n + j) * m + a] * ek[j];
                    }
                    out[b * m + a] = acc;
                }
            }
        });
        // axis 3: (k, b, a) -> (c3, b, a)
        let mut t3 = vec![C64::default(); m * m * m];
        t3.par_chunks_mut(m * m).enumerate().for_each(|(c3, out)| {
            let ek = &e[c3 * n..(c3 + 1) * n];
            for (ba, o) in out.iter_mut().enumerate() {
                let mut acc = C64::default();
                for k in 0..n {
                    acc += t2[k * m * m + ba] * ek[k];
                }
                *o = acc;
            }
        });
        values.extend(t3);
    }
    PhysicalField {
        physical_box: *bx,
        components: field.components,
        values,
    }
}

impl PhysicalField {
    pub fn magnitude_sq(&self, idx: usize) -> f64 {
        let n = self.physical_box.len();
        (0..self.components)
            .map(|c| self.values[c * n + idx].norm_sqr())
            .sum()
    }

    pub fn is_shell(&self, idx: usize) -> bool {
        let m = self.physical_box.points_per_axis;
        let (i, j, k) = (idx % m, (idx / m) % m, idx / (m * m));
        [i, j, k].iter().any(|&a| a == 0 || a == m - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::grid::SpectralGrid;

    #[test]
    fn gaussian_transforms_to_gaussian() {
        // F^{-1}[e^{-|ξ|²/2}] = e^{-|x|²/2} under the symmetric convention
        let grid = SpectralGrid::new(8.0, 41).unwrap();
        let f = GridField::from_fn(grid, 1, |_, xi| {
            let r2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
            [C64::new((-r2 / 2.0).exp(), 0.0), C64::default(), C64::default()]
        });
        let bx = PhysicalBox::new(2.0, 5).unwrap();
        let pf = inverse_transform(&f, &bx);
        for idx in 0..bx.len() {
            let (i, j, k) = (idx % 5, (idx / 5) % 5, idx / 25);
            let x = [bx.coord(i), bx.coord(j), bx.coord(k)];
            let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
            assert!((pf.values[idx] - C64::new((-r2 / 2.0).exp(), 0.0)).norm() < 1e-10);
        }
    }
}
