//! Block-Toeplitz G₀ convolution on a uniform grid via zero-padded 3D FFTs.

use std::sync::Arc;

use nalgebra::Vector3;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::operator::SelfTerm;
use super::PermittivityGrid;
use crate::em::free_space_green_offset;

/// Tensor components stored for the symmetric kernel.
const COMPONENTS: [(usize, usize); 6] = [(0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2)];

fn component(r: usize, c: usize) -> usize {
    match (r.min(c), r.max(c)) {
        (0, 0) => 0,
        (1, 1) => 1,
        (2, 2) => 2,
        (0, 1) => 3,
        (0, 2) => 4,
        _ => 5,
    }
}

struct Fft3 {
    shape: [usize; 3],
    forward: [Arc<dyn Fft<f64>>; 3],
    inverse: [Arc<dyn Fft<f64>>; 3],
}

impl Fft3 {
    fn new(shape: [usize; 3]) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            shape,
            forward: shape.map(|n| planner.plan_fft_forward(n)),
            inverse: shape.map(|n| planner.plan_fft_inverse(n)),
        }
    }

    fn len(&self) -> usize {
        self.shape.iter().product()
    }

    fn run(&self, data: &mut [Complex64], inverse: bool) {
        let plans = if inverse { &self.inverse } else { &self.forward };
        let [mx, my, mz] = self.shape;
        // z is contiguous
        plans[2].process(data);
        let mut line = vec![Complex64::new(0.0, 0.0); mx.max(my)];
        for ix in 0..mx {
            for iz in 0..mz {
                let buf = &mut line[..my];
                for (iy, b) in buf.iter_mut().enumerate() {
                    *b = data[(ix * my + iy) * mz + iz];
                }
                plans[1].process(buf);
                for (iy, b) in buf.iter().enumerate() {
                    data[(ix * my + iy) * mz + iz] = *b;
                }
            }
        }
        for iy in 0..my {
            for iz in 0..mz {
                let buf = &mut line[..mx];
                for (ix, b) in buf.iter_mut().enumerate() {
                    *b = data[(ix * my + iy) * mz + iz];
                }
                plans[0].process(buf);
                for (ix, b) in buf.iter().enumerate() {
                    data[(ix * my + iy) * mz + iz] = *b;
                }
            }
        }
    }
}

/// Precomputed spectrum of the free-space kernel for one grid geometry.
pub struct InteractionFft {
    dims: [usize; 3],
    fft: Fft3,
    kernel: [Vec<Complex64>; 6],
}

impl InteractionFft {
    pub fn new(grid: &PermittivityGrid, k: f64) -> Self {
        let dims = grid.dims;
        let padded = dims.map(|n| 2 * n);
        let fft = Fft3::new(padded);
        let total = fft.len();
        let mut kernel: [Vec<Complex64>; 6] = std::array::from_fn(|_| vec![Complex64::new(0.0, 0.0); total]);
        let offset = |m: usize, n: usize| -> Option<i64> {
            if m < n {
                Some(m as i64)
            } else if m > n {
                Some(m as i64 - 2 * n as i64)
            } else {
                None
            }
        };
        let h = grid.spacing;
        for mx in 0..padded[0] {
            let Some(ox) = offset(mx, dims[0]) else { continue };
            for my in 0..padded[1] {
                let Some(oy) = offset(my, dims[1]) else { continue };
                for mz in 0..padded[2] {
                    let Some(oz) = offset(mz, dims[2]) else { continue };
                    if ox == 0 && oy == 0 && oz == 0 {
                        continue;
                    }
                    let rv = Vector3::new(ox as f64 * h, oy as f64 * h, oz as f64 * h);
                    let g = free_space_green_offset(&rv, k).0;
                    let idx = (mx * padded[1] + my) * padded[2] + mz;
                    for (c, &(r, s)) in COMPONENTS.iter().enumerate() {
                        kernel[c][idx] = g[(r, s)];
                    }
                }
            }
        }
        for comp in kernel.iter_mut() {
            fft.run(comp, false);
        }
        Self { dims, fft, kernel }
    }

    /// y_i = Σ_{j≠i} G₀(rᵢ − rⱼ)·u_j for voxel-major 3-vectors.
    pub fn apply(&self, u: &[Complex64]) -> Vec<Complex64> {
        let [nx, ny, nz] = self.dims;
        let [_, py, pz] = self.fft.shape;
        let total = self.fft.len();
        let zero = Complex64::new(0.0, 0.0);
        let mut spectra: [Vec<Complex64>; 3] = std::array::from_fn(|_| vec![zero; total]);
        for ix in 0..nx {
            for iy in 0..ny {
                for iz in 0..nz {
                    let v = (ix * ny + iy) * nz + iz;
                    let p = (ix * py + iy) * pz + iz;
                    for (a, s) in spectra.iter_mut().enumerate() {
                        s[p] = u[3 * v + a];
                    }
                }
            }
        }
        for s in spectra.iter_mut() {
            self.fft.run(s, false);
        }
        let mut out: [Vec<Complex64>; 3] = std::array::from_fn(|_| vec![zero; total]);
        for p in 0..total {
            let uin = [spectra[0][p], spectra[1][p], spectra[2][p]];
            for (r, o) in out.iter_mut().enumerate() {
                o[p] = (0..3).map(|c| self.kernel[component(r, c)][p] * uin[c]).sum();
            }
        }
        for o in out.iter_mut() {
            self.fft.run(o, true);
        }
        let scale = 1.0 / total as f64;
        let mut y = vec![zero; 3 * nx * ny * nz];
        for ix in 0..nx {
            for iy in 0..ny {
                for iz in 0..nz {
                    let v = (ix * ny + iy) * nz + iz;
                    let p = (ix * py + iy) * pz + iz;
                    for (a, o) in out.iter().enumerate() {
                        y[3 * v + a] = o[p] * scale;
                    }
                }
            }
        }
        y
    }
}

/// Matrix-free Lippmann–Schwinger operator backed by [`InteractionFft`].
pub struct FftOperator<'g> {
    grid: &'g PermittivityGrid,
    k: f64,
    self_coeff: Complex64,
    chi: Vec<Complex64>,
    conv: InteractionFft,
}

impl<'g> FftOperator<'g> {
    pub fn new(grid: &'g PermittivityGrid, k: f64, self_term: SelfTerm) -> Self {
        Self {
            grid,
            k,
            self_coeff: self_term.value(grid.spacing, k),
            chi: grid.contrast(),
            conv: InteractionFft::new(grid, k),
        }
    }

    /// A·x
    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let u: Vec<Complex64> = x.iter().enumerate().map(|(i, v)| v * self.chi[i / 3]).collect();
        let coupled = self.conv.apply(&u);
        let scale = Complex64::new(self.k * self.k * self.grid.voxel_volume(), 0.0);
        x.iter()
            .zip(u.iter())
            .zip(coupled.iter())
            .map(|((xi, ui), ci)| xi - self.self_coeff * ui - scale * ci)
            .collect()
    }
}

/// One FFT-accelerated application of the full operator.
pub fn fft_matvec(grid: &PermittivityGrid, k: f64, self_term: SelfTerm, x: &[Complex64]) -> Vec<Complex64> {
    FftOperator::new(grid, k, self_term).apply(x)
}
