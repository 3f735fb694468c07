use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform 1-D grid with both end points included. The wavefunction is
/// taken to vanish one step beyond either end (hard walls).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
    pub dx: f64,
}

impl Grid1D {
    pub const MIN_POINTS: usize = 16;

    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite() && x_max > x_min) {
            return Err(Error::invalid(
                "grid",
                format!("need x_max > x_min, got [{x_min:e}, {x_max:e}]"),
            ));
        }
        if n_points < Self::MIN_POINTS {
            return Err(Error::invalid(
                "grid.n_points",
                format!("need at least {} points, got {n_points}", Self::MIN_POINTS),
            ));
        }
        Ok(Grid1D {
            x_min,
            x_max,
            n_points,
            dx: (x_max - x_min) / (n_points - 1) as f64,
        })
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.x_min + self.dx * i as f64
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.x(i)).collect()
    }

    /// True when point `i` and point `n-1-i` are mirror images about x = 0.
    pub fn is_symmetric(&self) -> bool {
        (self.x_min + self.x_max).abs() <= 1e-12 * (self.x_max - self.x_min)
    }
}

/// Complex amplitudes on a [`Grid1D`], normalized so that `sum |psi|^2 dx = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Wavefunction {
    pub grid: Grid1D,
    pub amplitudes: Vec<C64>,
}

impl Wavefunction {
    /// Wraps raw amplitudes and normalizes them.
    pub fn new(grid: Grid1D, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != grid.n_points {
            return Err(Error::invalid(
                "wavefunction",
                format!(
                    "{} amplitudes for a {}-point grid",
                    amplitudes.len(),
                    grid.n_points
                ),
            ));
        }
        let mut psi = Wavefunction { grid, amplitudes };
        let norm = psi.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::invalid(
                "wavefunction",
                "cannot normalize a zero or non-finite state",
            ));
        }
        psi.scale(1.0 / norm.sqrt());
        Ok(psi)
    }

    pub fn from_real(grid: Grid1D, values: &[f64]) -> Result<Self> {
        Self::new(grid, values.iter().map(|&v| C64::new(v, 0.0)).collect())
    }

    /// Normalized Gaussian packet `exp(-(x-x0)^2/(4 sigma^2) + i k0 x)`.
    pub fn gaussian(grid: Grid1D, x0: f64, sigma: f64, k0: f64) -> Result<Self> {
        let amps = grid
            .points()
            .into_iter()
            .map(|x| {
                let u = x - x0;
                C64::from_polar((-u * u / (4.0 * sigma * sigma)).exp(), k0 * x)
            })
            .collect();
        Self::new(grid, amps)
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.grid.dx
    }

    pub fn scale(&mut self, s: f64) {
        for a in &mut self.amplitudes {
            *a *= s;
        }
    }

    /// `<self|other>` with the grid measure.
    pub fn inner(&self, other: &Wavefunction) -> C64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum::<C64>()
            * self.grid.dx
    }

    pub fn probability_density(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn position_moments(&self) -> (f64, f64) {
        let mut m1 = 0.0;
        let mut m2 = 0.0;
        for (i, a) in self.amplitudes.iter().enumerate() {
            let x = self.grid.x(i);
            let p = a.norm_sqr();
            m1 += x * p;
            m2 += x * x * p;
        }
        let dx = self.grid.dx;
        (m1 * dx, m2 * dx)
    }

    /// Standard deviation of the position distribution.
    pub fn width(&self) -> f64 {
        let (m1, m2) = self.position_moments();
        (m2 - m1 * m1).max(0.0).sqrt()
    }

    /// Largest of the two end-point magnitudes relative to the peak magnitude.
    pub fn edge_amplitude(&self) -> f64 {
        let peak = self.amplitudes.iter().map(|a| a.norm()).fold(0.0, f64::max);
        if peak == 0.0 {
            return 0.0;
        }
        let n = self.amplitudes.len();
        self.amplitudes[0].norm().max(self.amplitudes[n - 1].norm()) / peak
    }

    /// Mirror image `psi(-x)`; only meaningful on a symmetric grid.
    pub fn reflected(&self) -> Wavefunction {
        let mut amplitudes = self.amplitudes.clone();
        amplitudes.reverse();
        Wavefunction {
            grid: self.grid,
            amplitudes,
        }
    }
}
