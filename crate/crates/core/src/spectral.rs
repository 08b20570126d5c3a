//! FFT derivatives on the periodic grid.
//!
//! Wavenumbers follow the standard DFT ordering: bin `j < n/2` carries
//! `k = pi j / L`, bin `j >= n/2` carries `k = pi (j - n) / L`, so the
//! covered range is `[-n/2, n/2) * pi / L`. The Nyquist bin is dropped for
//! odd derivatives and kept for even ones.

use std::sync::Arc;

use nalgebra::Vector2;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::grid::Grid2D;

pub struct Spectral2D {
    grid: Grid2D,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    wavenumbers: Vec<f64>,
}

impl std::fmt::Debug for Spectral2D {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Spectral2D").field("grid", &self.grid).finish()
    }
}

/// Wavenumber of DFT bin `j` on an `n`-point periodic axis of length `2L`.
pub fn wavenumber(j: usize, n: usize, half_extent: f64) -> f64 {
    let signed = if j < n / 2 { j as f64 } else { j as f64 - n as f64 };
    std::f64::consts::PI * signed / half_extent
}

impl Spectral2D {
    pub fn new(grid: Grid2D) -> Self {
        let n = grid.n();
        let mut planner = FftPlanner::new();
        Spectral2D {
            grid,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            wavenumbers: (0..n).map(|j| wavenumber(j, n, grid.half_extent())).collect(),
        }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    /// Wavenumber used for first derivatives (Nyquist bin zeroed).
    fn odd_k(&self, j: usize) -> f64 {
        if j == self.grid.n() / 2 {
            0.0
        } else {
            self.wavenumbers[j]
        }
    }

    fn transform(&self, data: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
        let n = self.grid.n();
        assert_eq!(data.len(), n * n);
        // rows (x direction)
        fft.process(data);
        // columns (y direction)
        let mut column = vec![Complex64::new(0.0, 0.0); n];
        for ix in 0..n {
            for iy in 0..n {
                column[iy] = data[iy * n + ix];
            }
            fft.process(&mut column);
            for iy in 0..n {
                data[iy * n + ix] = column[iy];
            }
        }
    }

    /// Unnormalized forward transform in place.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.transform(data, &self.forward);
    }

    /// Inverse transform in place, normalized so that `inverse(forward(f)) = f`.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.transform(data, &self.inverse);
        let scale = 1.0 / (self.grid.len() as f64);
        data.iter_mut().for_each(|v| *v *= scale);
    }

    /// Spectral gradient `(d/dx f, d/dy f)` of a complex field.
    pub fn gradient(&self, f: &[Complex64]) -> (Vec<Complex64>, Vec<Complex64>) {
        let n = self.grid.n();
        let mut hat = f.to_vec();
        self.forward(&mut hat);
        let mut dx = hat.clone();
        let mut dy = hat;
        for iy in 0..n {
            let ky = self.odd_k(iy);
            for ix in 0..n {
                let kx = self.odd_k(ix);
                let i = iy * n + ix;
                dx[i] *= Complex64::new(0.0, kx);
                dy[i] *= Complex64::new(0.0, ky);
            }
        }
        self.inverse(&mut dx);
        self.inverse(&mut dy);
        (dx, dy)
    }

    /// Spectral gradient of a real field.
    pub fn gradient_real(&self, f: &[f64]) -> Vec<Vector2<f64>> {
        let complex: Vec<Complex64> = f.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let (dx, dy) = self.gradient(&complex);
        dx.iter().zip(&dy).map(|(a, b)| Vector2::new(a.re, b.re)).collect()
    }

    /// Spectral divergence of a real vector field.
    pub fn divergence(&self, v: &[Vector2<f64>]) -> Vec<f64> {
        let n = self.grid.n();
        let mut hx: Vec<Complex64> = v.iter().map(|w| Complex64::new(w.x, 0.0)).collect();
        let mut hy: Vec<Complex64> = v.iter().map(|w| Complex64::new(w.y, 0.0)).collect();
        self.forward(&mut hx);
        self.forward(&mut hy);
        for iy in 0..n {
            let ky = self.odd_k(iy);
            for ix in 0..n {
                let kx = self.odd_k(ix);
                let i = iy * n + ix;
                hx[i] = Complex64::new(0.0, kx) * hx[i] + Complex64::new(0.0, ky) * hy[i];
            }
        }
        self.inverse(&mut hx);
        hx.iter().map(|c| c.re).collect()
    }

    /// Spectral Laplacian of a complex field.
    pub fn laplacian(&self, f: &[Complex64]) -> Vec<Complex64> {
        let n = self.grid.n();
        let mut hat = f.to_vec();
        self.forward(&mut hat);
        for iy in 0..n {
            let ky = self.wavenumbers[iy];
            for ix in 0..n {
                let kx = self.wavenumbers[ix];
                hat[iy * n + ix] *= -(kx * kx + ky * ky);
            }
        }
        self.inverse(&mut hat);
        hat
    }
}
