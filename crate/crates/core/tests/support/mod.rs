//! Brute-force reference implementations shared by the integration tests.
//!
//! Everything here is written directly from the textbook definitions with
//! dense nalgebra matrices and does not call into the library's solvers.

#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;

pub const HBAR: f64 = 1.054_571_817e-34;
pub const E: f64 = 1.602_176_634e-19;
pub const EPS0: f64 = 8.854_187_812_8e-12;
pub const M_E: f64 = 9.109_383_701_5e-31;

pub fn grid_points(x_min: f64, x_max: f64, n: usize) -> (Vec<f64>, f64) {
    let dx = (x_max - x_min) / (n - 1) as f64;
    ((0..n).map(|i| x_min + dx * i as f64).collect(), dx)
}

/// Dense finite-difference single-particle spectrum, ascending.
pub fn dense_single_particle(v: &[f64], dx: f64, mass: f64) -> Vec<f64> {
    let n = v.len();
    let t = HBAR * HBAR / (2.0 * mass * dx * dx);
    let h = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            2.0 * t + v[i]
        } else if i.abs_diff(j) == 1 {
            -t
        } else {
            0.0
        }
    });
    let mut e: Vec<f64> = h.symmetric_eigenvalues().iter().cloned().collect();
    e.sort_by(|a, b| a.total_cmp(b));
    e
}

/// Eigenpairs of a dense single-particle Hamiltonian, ascending by energy;
/// vectors have unit Euclidean norm.
pub fn dense_single_particle_pairs(v: &[f64], dx: f64, mass: f64) -> Vec<(f64, Vec<f64>)> {
    let n = v.len();
    let t = HBAR * HBAR / (2.0 * mass * dx * dx);
    let h = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            2.0 * t + v[i]
        } else if i.abs_diff(j) == 1 {
            -t
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(h);
    let mut out: Vec<(f64, Vec<f64>)> = (0..n)
        .map(|k| {
            (
                eig.eigenvalues[k],
                eig.eigenvectors.column(k).iter().cloned().collect(),
            )
        })
        .collect();
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

/// Lowest singlet and triplet energies of two electrons with softened
/// Coulomb repulsion `strength e^2 / (4 pi eps0 eps_r sqrt(d^2 + a^2))`,
/// by dense diagonalization in the symmetrized / antisymmetrized pair
/// basis `|i j> +- |j i>`.
pub fn dense_singlet_triplet(
    v: &[f64],
    dx: f64,
    mass: f64,
    strength: f64,
    eps_r: f64,
    softening: f64,
) -> (f64, f64) {
    let n = v.len();
    let t = HBAR * HBAR / (2.0 * mass * dx * dx);
    let a = softening.max(2.0 * dx);
    let u = |i: usize, j: usize| {
        let d = (i as f64 - j as f64) * dx;
        strength * E * E / (4.0 * std::f64::consts::PI * EPS0 * eps_r * (d * d + a * a).sqrt())
    };
    // full product-space operator applied to a sparse product vector
    let apply = |comps: &[((usize, usize), f64)]| {
        let mut out: std::collections::HashMap<(usize, usize), f64> =
            std::collections::HashMap::new();
        for &((i, j), c) in comps {
            *out.entry((i, j)).or_default() += c * (4.0 * t + v[i] + v[j] + u(i, j));
            if i > 0 {
                *out.entry((i - 1, j)).or_default() -= c * t;
            }
            if i + 1 < n {
                *out.entry((i + 1, j)).or_default() -= c * t;
            }
            if j > 0 {
                *out.entry((i, j - 1)).or_default() -= c * t;
            }
            if j + 1 < n {
                *out.entry((i, j + 1)).or_default() -= c * t;
            }
        }
        out
    };
    let r2 = std::f64::consts::FRAC_1_SQRT_2;

    let mut sym: Vec<(usize, usize)> = Vec::new();
    for i in 0..n {
        for j in i..n {
            sym.push((i, j));
        }
    }
    let index_s: std::collections::HashMap<(usize, usize), usize> =
        sym.iter().enumerate().map(|(k, &p)| (p, k)).collect();
    let mut hs = DMatrix::<f64>::zeros(sym.len(), sym.len());
    for (col, &(i, j)) in sym.iter().enumerate() {
        let comps = if i == j {
            vec![((i, i), 1.0)]
        } else {
            vec![((i, j), r2), ((j, i), r2)]
        };
        let hv = apply(&comps);
        for (&(p, q), &c) in &hv {
            let (lo, hi) = if p <= q { (p, q) } else { (q, p) };
            let row = index_s[&(lo, hi)];
            let w = if lo == hi { 1.0 } else { r2 };
            hs[(row, col)] += w * c;
        }
    }

    let mut anti: Vec<(usize, usize)> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            anti.push((i, j));
        }
    }
    let index_a: std::collections::HashMap<(usize, usize), usize> =
        anti.iter().enumerate().map(|(k, &p)| (p, k)).collect();
    let mut ha = DMatrix::<f64>::zeros(anti.len(), anti.len());
    for (col, &(i, j)) in anti.iter().enumerate() {
        let hv = apply(&[((i, j), r2), ((j, i), -r2)]);
        for (&(p, q), &c) in &hv {
            if p == q {
                continue;
            }
            let (row, sign) = if p < q {
                (index_a[&(p, q)], 1.0)
            } else {
                (index_a[&(q, p)], -1.0)
            };
            ha[(row, col)] += sign * r2 * c;
        }
    }
    let lowest = |m: DMatrix<f64>| {
        m.symmetric_eigenvalues()
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
    };
    (lowest(hs), lowest(ha))
}

/// Dense `2^n x 2^n` exchange unitary on qubits `i`, `j` of an `n`-qubit
/// register, from `exp(-i theta S_i.S_j) = e^{i theta/4} (cos(theta/2) - i sin(theta/2) SWAP_ij)`.
pub fn dense_exchange(n: usize, i: usize, j: usize, theta: f64) -> DMatrix<C64> {
    let dim = 1usize << n;
    let phase = C64::from_polar(1.0, theta / 4.0);
    let c = phase * (theta / 2.0).cos();
    let s = phase * C64::new(0.0, -(theta / 2.0).sin());
    let mut m = DMatrix::<C64>::zeros(dim, dim);
    for b in 0..dim {
        let bi = (b >> i) & 1;
        let bj = (b >> j) & 1;
        let swapped = (b & !(1 << i) & !(1 << j)) | (bj << i) | (bi << j);
        m[(b, b)] += c;
        m[(swapped, b)] += s;
    }
    m
}

/// Deterministic double-well potential samples used by several tests:
/// two Gaussian wells of depth `depth` at `+-x0` and a Gaussian barrier.
pub fn double_well(
    x: &[f64],
    depth: f64,
    x0: f64,
    width: f64,
    barrier: f64,
    barrier_width: f64,
) -> Vec<f64> {
    let g = |u: f64, w: f64| (-u * u / (2.0 * w * w)).exp();
    x.iter()
        .map(|&xi| {
            -depth * (g(xi - x0, width) + g(xi + x0, width)) + barrier * g(xi, barrier_width)
        })
        .collect()
}

/// Two-electron parameter sets: (depth meV, x0 nm, width nm, barrier meV,
/// coulomb strength, eps_r, softening nm, tilt meV across 8 nm).
///
/// Each J lies well above the resolution of a dense diagonalization, so
/// relative comparisons at 1e-8 are meaningful.
pub const CASES: [(f64, f64, f64, f64, f64, f64, f64, f64); 10] = [
    (200.0, 2.0, 1.2, 0.0, 1.0, 11.7, 0.0, 0.0),
    (150.0, 2.0, 1.5, 50.0, 0.5, 11.7, 0.0, 0.0),
    (300.0, 2.5, 1.2, 100.0, 0.2, 11.7, 0.0, 3.0),
    (250.0, 2.0, 1.0, 150.0, 1.0, 20.0, 1.0, 0.0),
    (100.0, 2.5, 1.5, 0.0, 1.0, 11.7, 0.0, -4.0),
    (400.0, 1.8, 1.0, 200.0, 0.3, 11.7, 0.5, 0.0),
    (200.0, 2.2, 1.3, 80.0, 1.0, 8.0, 0.0, 6.0),
    (120.0, 3.0, 1.8, 20.0, 0.8, 11.7, 0.0, 0.0),
    (350.0, 2.0, 1.1, 300.0, 0.0, 11.7, 0.0, 2.0),
    (180.0, 1.5, 1.0, 400.0, 1.0, 11.7, 0.8, 0.0),
];

pub const CASE_MASS_RATIO: f64 = 0.19;

/// Potential of one entry of [`CASES`] on the points `x` (m).
pub fn case_potential(x: &[f64], c: &(f64, f64, f64, f64, f64, f64, f64, f64)) -> Vec<f64> {
    let mev = 1e-3 * E;
    let mut v = double_well(x, c.0 * mev, c.1 * 1e-9, c.2 * 1e-9, c.3 * mev, 1e-9);
    for (vi, xi) in v.iter_mut().zip(x) {
        *vi += c.7 * mev * xi / 8e-9;
    }
    v
}
