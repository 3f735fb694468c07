//! Singlet and triplet ground energies of two electrons on the product
//! grid `x1 (x) x2`.
//!
//! The exchange-symmetric (singlet) and exchange-antisymmetric (triplet)
//! spatial sectors are handled by projecting every Krylov vector onto the
//! sector. Each sector's lowest level is found by Lanczos iteration on
//! `(H - sigma)^-1` with `sigma` a rigorous lower bound of the spectrum,
//! using a banded Cholesky factorization of the shifted product-grid
//! Hamiltonian.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::physcore::{EPS0, E_CHARGE};
use crate::qdyn1d::{eigen, kinetic_scale, stationary_states_of, Grid1D};

/// Largest grid accepted by the exact two-electron solver.
pub const MAX_EXCHANGE_POINTS: usize = 256;

/// Softened Coulomb repulsion `strength e^2 / (4 pi eps0 eps_r sqrt(d^2 + a^2))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SoftCoulomb {
    /// Dimensionless multiplier; 0 switches the interaction off.
    pub strength: f64,
    /// Relative permittivity of the host.
    pub eps_r: f64,
    /// Softening length (m). Raised to two grid steps when smaller.
    pub softening: f64,
}

impl Default for SoftCoulomb {
    fn default() -> Self {
        SoftCoulomb {
            strength: 1.0,
            eps_r: 11.7,
            softening: 0.0,
        }
    }
}

impl SoftCoulomb {
    pub fn none() -> Self {
        SoftCoulomb {
            strength: 0.0,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.strength >= 0.0 && self.strength.is_finite()) {
            return Err(Error::invalid(
                "interaction.strength",
                "must be finite and >= 0",
            ));
        }
        if !(self.eps_r > 0.0 && self.eps_r.is_finite()) {
            return Err(Error::invalid(
                "interaction.eps_r",
                "must be finite and > 0",
            ));
        }
        if !(self.softening >= 0.0 && self.softening.is_finite()) {
            return Err(Error::invalid(
                "interaction.softening",
                "must be finite and >= 0",
            ));
        }
        Ok(())
    }

    pub fn effective_softening(&self, grid: &Grid1D) -> f64 {
        self.softening.max(2.0 * grid.dx)
    }

    /// Interaction energy at separation `d` (J).
    pub fn energy(&self, d: f64, grid: &Grid1D) -> f64 {
        let a = self.effective_softening(grid);
        self.strength * E_CHARGE * E_CHARGE
            / (4.0 * std::f64::consts::PI * EPS0 * self.eps_r * (d * d + a * a).sqrt())
    }

    /// `u[k]` is the interaction at separation `k dx`.
    pub fn table(&self, grid: &Grid1D) -> Vec<f64> {
        (0..grid.n_points)
            .map(|k| self.energy(k as f64 * grid.dx, grid))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sector {
    /// Spatially symmetric: pairs with the spin singlet.
    Singlet,
    /// Spatially antisymmetric: pairs with the spin triplet.
    Triplet,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Splitting {
    pub e_singlet: f64,
    pub e_triplet: f64,
    /// `e_triplet - e_singlet`.
    pub j: f64,
    pub iterations: usize,
}

/// Product-grid Hamiltonian in row-major order `p = i1 * n + i2`.
struct ProductHamiltonian {
    n: usize,
    kin: f64,
    v: Vec<f64>,
    u: Vec<f64>,
}

impl ProductHamiltonian {
    fn diagonal(&self, i1: usize, i2: usize) -> f64 {
        4.0 * self.kin + self.v[i1] + self.v[i2] + self.u[i1.abs_diff(i2)]
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let n = self.n;
        for i1 in 0..n {
            for i2 in 0..n {
                let p = i1 * n + i2;
                let mut s = self.diagonal(i1, i2) * x[p];
                if i2 > 0 {
                    s -= self.kin * x[p - 1];
                }
                if i2 + 1 < n {
                    s -= self.kin * x[p + 1];
                }
                if i1 > 0 {
                    s -= self.kin * x[p - n];
                }
                if i1 + 1 < n {
                    s -= self.kin * x[p + n];
                }
                y[p] = s;
            }
        }
    }
}

/// Cholesky factor of a symmetric positive definite band matrix, stored by
/// rows: row `i` holds columns `i - bw ..= i`.
struct BandCholesky {
    dim: usize,
    bw: usize,
    l: Vec<f64>,
}

impl BandCholesky {
    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        i * (self.bw + 1) + (j + self.bw - i)
    }

    /// Factors `H - shift`. Returns `None` if the shifted matrix is not
    /// positive definite.
    fn factor(h: &ProductHamiltonian, shift: f64) -> Option<Self> {
        let n = h.n;
        let dim = n * n;
        let bw = n;
        let mut f = BandCholesky {
            dim,
            bw,
            l: vec![0.0; dim * (bw + 1)],
        };
        for p in 0..dim {
            let (i1, i2) = (p / n, p % n);
            let d = f.idx(p, p);
            f.l[d] = h.diagonal(i1, i2) - shift;
            if i2 > 0 {
                let k = f.idx(p, p - 1);
                f.l[k] = -h.kin;
            }
            if i1 > 0 {
                let k = f.idx(p, p - n);
                f.l[k] = -h.kin;
            }
        }
        let w = bw + 1;
        for j in 0..dim {
            let j0 = j.saturating_sub(bw);
            let rj = j * w;
            let mut s = f.l[rj + bw];
            for k in j0..j {
                let v = f.l[rj + (k + bw - j)];
                s -= v * v;
            }
            if !(s > 0.0) {
                return None;
            }
            let djj = s.sqrt();
            f.l[rj + bw] = djj;
            let i_end = (j + bw + 1).min(dim);
            for i in j + 1..i_end {
                let ri = i * w;
                let k0 = i.saturating_sub(bw).max(j0);
                let mut s = f.l[ri + (j + bw - i)];
                for k in k0..j {
                    s -= f.l[ri + (k + bw - i)] * f.l[rj + (k + bw - j)];
                }
                f.l[ri + (j + bw - i)] = s / djj;
            }
        }
        Some(f)
    }

    fn solve(&self, x: &mut [f64]) {
        let (dim, bw, w) = (self.dim, self.bw, self.bw + 1);
        for i in 0..dim {
            let ri = i * w;
            let mut s = x[i];
            for k in i.saturating_sub(bw)..i {
                s -= self.l[ri + (k + bw - i)] * x[k];
            }
            x[i] = s / self.l[ri + bw];
        }
        for i in (0..dim).rev() {
            x[i] /= self.l[i * w + bw];
            let xi = x[i];
            let ri = i * w;
            for k in i.saturating_sub(bw)..i {
                x[k] -= self.l[ri + (k + bw - i)] * xi;
            }
        }
    }
}

fn project(v: &mut [f64], n: usize, sector: Sector) {
    let sign = match sector {
        Sector::Singlet => 1.0,
        Sector::Triplet => -1.0,
    };
    for i in 0..n {
        if sector == Sector::Triplet {
            v[i * n + i] = 0.0;
        }
        for j in i + 1..n {
            let a = v[i * n + j];
            let b = v[j * n + i];
            let s = 0.5 * (a + sign * b);
            v[i * n + j] = s;
            v[j * n + i] = sign * s;
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

const LANCZOS_TOL: f64 = 1e-11;

/// Lowest eigenvalue of `h` in `sector`, by shift-invert Lanczos with full
/// reorthogonalization. Returns the Rayleigh quotient of the Ritz vector.
fn lowest_in_sector(
    h: &ProductHamiltonian,
    chol: &BandCholesky,
    mut start: Vec<f64>,
    sector: Sector,
) -> Result<(f64, usize)> {
    let n = h.n;
    let dim = n * n;
    let sector_dim = match sector {
        Sector::Singlet => n * (n + 1) / 2,
        Sector::Triplet => n * (n - 1) / 2,
    };
    let max_iter = sector_dim.min(400);
    project(&mut start, n, sector);
    let s0 = dot(&start, &start).sqrt();
    if !(s0 > 0.0) {
        return Err(Error::invalid(
            "start vector",
            "vanishes in the requested sector",
        ));
    }
    start.iter_mut().for_each(|x| *x /= s0);

    let mut basis: Vec<Vec<f64>> = vec![start];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut ritz: Vec<f64> = Vec::new();
    let mut residual = f64::INFINITY;

    for k in 0..max_iter {
        let mut w = basis[k].clone();
        chol.solve(&mut w);
        project(&mut w, n, sector);
        let a = dot(&basis[k], &w);
        alpha.push(a);
        axpy(-a, &basis[k], &mut w);
        if k > 0 {
            axpy(-beta[k - 1], &basis[k - 1], &mut w);
        }
        for _ in 0..2 {
            for q in &basis {
                let c = dot(q, &w);
                axpy(-c, q, &mut w);
            }
        }
        let b = dot(&w, &w).sqrt();
        let (mu, s) = if alpha.len() == 1 {
            (alpha[0], vec![1.0])
        } else {
            eigen::highest_eigenpair(&alpha, &beta)?
        };
        residual = b * s[s.len() - 1].abs();
        ritz = s;
        if residual <= LANCZOS_TOL * mu.abs() || b <= 1e-300 || k + 1 == sector_dim {
            let mut y = vec![0.0; dim];
            for (q, c) in basis.iter().zip(&ritz) {
                axpy(*c, q, &mut y);
            }
            let mut hy = vec![0.0; dim];
            h.apply(&y, &mut hy);
            return Ok((dot(&y, &hy) / dot(&y, &y), k + 1));
        }
        beta.push(b);
        w.iter_mut().for_each(|x| *x /= b);
        basis.push(w);
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        residual,
        context: format!(
            "{sector:?} sector shift-invert Lanczos on a {n}x{n} product grid ({} Ritz components)",
            ritz.len()
        ),
    })
}

/// Deterministic small perturbation so that start vectors overlap every
/// eigenvector.
fn jitter(dim: usize, seed: u64) -> Vec<f64> {
    let mut state = seed
        .wrapping_mul(6_364_136_223_846_793_005)
        .wrapping_add(1_442_695_040_888_963_407);
    (0..dim)
        .map(|_| {
            state = state
                .wrapping_mul(6_364_136_223_846_793_005)
                .wrapping_add(1_442_695_040_888_963_407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        })
        .collect()
}

/// Singlet and triplet ground energies for a potential sampled on `grid`.
pub fn singlet_triplet(
    v: &[f64],
    grid: &Grid1D,
    mass: f64,
    interaction: &SoftCoulomb,
) -> Result<Splitting> {
    let n = grid.n_points;
    if n > MAX_EXCHANGE_POINTS {
        return Err(Error::Budget(format!(
            "{n}-point grid gives a {}-dimensional product space; use at most {MAX_EXCHANGE_POINTS} points",
            n * n
        )));
    }
    if v.len() != n {
        return Err(Error::invalid(
            "potential",
            "sample count does not match grid",
        ));
    }
    interaction.validate()?;
    let single = stationary_states_of(v, grid, mass, 2)?;
    let (e0, e1) = (single[0].energy, single[1].energy);
    let phi0: Vec<f64> = single[0].psi.amplitudes.iter().map(|a| a.re).collect();
    let phi1: Vec<f64> = single[1].psi.amplitudes.iter().map(|a| a.re).collect();

    let h = ProductHamiltonian {
        n,
        kin: kinetic_scale(grid, mass),
        v: v.to_vec(),
        u: interaction.table(grid),
    };
    let u_min = h.u.iter().cloned().fold(f64::INFINITY, f64::min);
    let bound = 2.0 * e0 + u_min;
    let mut margin = 0.25 * (e1 - e0) + 1e-6 * h.kin;
    let chol = loop {
        if let Some(c) = BandCholesky::factor(&h, bound - margin) {
            break c;
        }
        margin *= 4.0;
        if margin > 1e3 * h.kin {
            return Err(Error::Singular(
                "shifted two-electron Hamiltonian never became positive definite".into(),
            ));
        }
    };

    let dim = n * n;
    let noise_s = jitter(dim, 1);
    let noise_t = jitter(dim, 2);
    let peak = phi0
        .iter()
        .chain(&phi1)
        .map(|x| x.abs())
        .fold(0.0, f64::max);
    let eps = 1e-3 * peak * peak;
    let mut start_s = vec![0.0; dim];
    let mut start_t = vec![0.0; dim];
    for i in 0..n {
        for j in 0..n {
            let p = i * n + j;
            start_s[p] = phi0[i] * phi0[j] + eps * noise_s[p];
            start_t[p] = phi0[i] * phi1[j] - phi1[i] * phi0[j] + eps * noise_t[p];
        }
    }
    let (e_singlet, it_s) = lowest_in_sector(&h, &chol, start_s, Sector::Singlet)?;
    let (e_triplet, it_t) = lowest_in_sector(&h, &chol, start_t, Sector::Triplet)?;
    Ok(Splitting {
        e_singlet,
        e_triplet,
        j: e_triplet - e_singlet,
        iterations: it_s + it_t,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn band_cholesky_solves_a_small_system() {
        let h = ProductHamiltonian {
            n: 4,
            kin: 1.0,
            v: vec![0.3, -0.2, 0.1, 0.5],
            u: vec![0.4, 0.2, 0.1, 0.05],
        };
        let chol = BandCholesky::factor(&h, -1.0).unwrap();
        let x: Vec<f64> = (0..16).map(|i| (i as f64 * 0.37).sin()).collect();
        let mut b = vec![0.0; 16];
        h.apply(&x, &mut b);
        axpy(1.0, &x, &mut b);
        chol.solve(&mut b);
        for (u, v) in b.iter().zip(&x) {
            assert!((u - v).abs() < 1e-12);
        }
    }

    #[test]
    fn projection_is_idempotent() {
        let n = 5;
        let mut v = jitter(n * n, 9);
        project(&mut v, n, Sector::Triplet);
        let w = v.clone();
        project(&mut v, n, Sector::Triplet);
        assert_eq!(v, w);
        for i in 0..n {
            assert_eq!(v[i * n + i], 0.0);
        }
    }

    #[test]
    fn budget_is_enforced() {
        let g = Grid1D::new(-1e-8, 1e-8, MAX_EXCHANGE_POINTS + 1).unwrap();
        let v = vec![0.0; g.n_points];
        let r = singlet_triplet(&v, &g, 1e-31, &SoftCoulomb::default());
        assert!(matches!(r, Err(Error::Budget(_))));
    }
}
