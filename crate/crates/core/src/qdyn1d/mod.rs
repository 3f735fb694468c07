//! One-dimensional single-electron dynamics along the nanowire.
//!
//! The Hamiltonian is the three-point finite-difference operator
//! `H = -hbar^2/(2m) d^2/dx^2 + V(x, t)` with hard walls just outside the
//! grid. Stationary states come from [`eigen`]; time evolution uses the
//! Cayley (Crank-Nicolson) form with the potential taken at the half step.

pub mod eigen;
mod grid;
mod potential;

use std::io::Write;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::physcore::HBAR;

pub use grid::{Grid1D, Wavefunction};
pub use potential::{
    evaluate_potential, BoundPotential, DoubleWell, PotentialModel, SampledPotential, TransientTerm,
};

/// `hbar^2 / (2 m dx^2)`, the off-diagonal magnitude of `H`.
pub fn kinetic_scale(grid: &Grid1D, mass: f64) -> f64 {
    HBAR * HBAR / (2.0 * mass * grid.dx * grid.dx)
}

#[derive(Debug, Clone)]
pub struct Eigenstate {
    pub energy: f64,
    pub psi: Wavefunction,
}

/// Eigenpairs of `H` for a potential already sampled on `grid`.
pub fn stationary_states_of(
    v: &[f64],
    grid: &Grid1D,
    mass: f64,
    k: usize,
) -> Result<Vec<Eigenstate>> {
    if v.len() != grid.n_points {
        return Err(Error::invalid(
            "potential",
            "sample count does not match grid",
        ));
    }
    if k == 0 || 4 * k >= grid.n_points {
        return Err(Error::invalid(
            "k",
            format!("need 0 < k < n_points/4 ({}), got {k}", grid.n_points / 4),
        ));
    }
    let kin = kinetic_scale(grid, mass);
    let diag: Vec<f64> = v.iter().map(|vi| 2.0 * kin + vi).collect();
    let off = vec![-kin; grid.n_points - 1];
    let inv_sqrt_dx = 1.0 / grid.dx.sqrt();
    eigen::lowest_eigenpairs(&diag, &off, k)?
        .into_iter()
        .map(|(energy, mut vec)| {
            let lead = vec.iter().map(|x| x.abs()).fold(0.0, f64::max) * 1e-2;
            if vec
                .iter()
                .find(|x| x.abs() >= lead)
                .is_some_and(|x| *x < 0.0)
            {
                vec.iter_mut().for_each(|x| *x = -*x);
            }
            let amplitudes = vec
                .into_iter()
                .map(|x| C64::new(x * inv_sqrt_dx, 0.0))
                .collect();
            Ok(Eigenstate {
                energy,
                psi: Wavefunction {
                    grid: *grid,
                    amplitudes,
                },
            })
        })
        .collect()
}

/// The `k` lowest stationary states of the instantaneous potential at `t`.
pub fn stationary_states(
    potential: &BoundPotential,
    t: f64,
    grid: &Grid1D,
    mass: f64,
    k: usize,
) -> Result<Vec<Eigenstate>> {
    let v = potential.on_grid(grid).at(t);
    stationary_states_of(&v, grid, mass, k)
}

/// `H psi` for potential samples `v`.
pub fn apply_hamiltonian(psi: &[C64], v: &[f64], kin: f64) -> Vec<C64> {
    let n = psi.len();
    (0..n)
        .map(|i| {
            let mut s = psi[i] * (2.0 * kin + v[i]);
            if i > 0 {
                s -= psi[i - 1] * kin;
            }
            if i + 1 < n {
                s -= psi[i + 1] * kin;
            }
            s
        })
        .collect()
}

pub fn energy_expectation(psi: &Wavefunction, v: &[f64], mass: f64) -> f64 {
    let kin = kinetic_scale(&psi.grid, mass);
    let h = apply_hamiltonian(&psi.amplitudes, v, kin);
    let num: C64 = psi
        .amplitudes
        .iter()
        .zip(&h)
        .map(|(a, b)| a.conj() * b)
        .sum();
    let den: f64 = psi.amplitudes.iter().map(|a| a.norm_sqr()).sum();
    num.re / den
}

/// Factorized Cayley step `(1 + i dt H / 2 hbar) psi' = (1 - i dt H / 2 hbar) psi`.
struct CayleyStep {
    kin: f64,
    beta: f64,
    v: Vec<f64>,
    /// Thomas-algorithm modified super-diagonal and inverse pivots.
    c_prime: Vec<C64>,
    inv_pivot: Vec<C64>,
}

impl CayleyStep {
    fn new(v: &[f64], kin: f64, dt: f64) -> Result<Self> {
        let mut s = CayleyStep {
            kin,
            beta: dt / (2.0 * HBAR),
            v: v.to_vec(),
            c_prime: vec![C64::new(0.0, 0.0); v.len()],
            inv_pivot: vec![C64::new(0.0, 0.0); v.len()],
        };
        s.factor()?;
        Ok(s)
    }

    fn refactor(&mut self, v: &[f64]) -> Result<()> {
        self.v.copy_from_slice(v);
        self.factor()
    }

    fn factor(&mut self) -> Result<()> {
        let n = self.v.len();
        let off = C64::new(0.0, -self.beta * self.kin);
        let mut prev_c = C64::new(0.0, 0.0);
        for i in 0..n {
            let d = C64::new(1.0, self.beta * (2.0 * self.kin + self.v[i]));
            let pivot = if i == 0 { d } else { d - off * prev_c };
            if pivot.norm() < 1e-300 || !pivot.is_finite() {
                return Err(Error::Singular(format!("Cayley step pivot {i} vanished")));
            }
            let inv = pivot.inv();
            self.inv_pivot[i] = inv;
            prev_c = off * inv;
            self.c_prime[i] = prev_c;
        }
        Ok(())
    }

    fn apply(&self, psi: &mut [C64], scratch: &mut Vec<C64>) {
        let n = psi.len();
        let ib = C64::new(0.0, self.beta);
        let off = C64::new(0.0, -self.beta * self.kin);
        // rhs = (1 - i beta H) psi
        scratch.clear();
        scratch.extend((0..n).map(|i| {
            let mut h = psi[i] * (2.0 * self.kin + self.v[i]);
            if i > 0 {
                h -= psi[i - 1] * self.kin;
            }
            if i + 1 < n {
                h -= psi[i + 1] * self.kin;
            }
            psi[i] - ib * h
        }));
        // forward sweep
        let mut prev = C64::new(0.0, 0.0);
        for i in 0..n {
            let r = if i == 0 {
                scratch[0]
            } else {
                scratch[i] - off * prev
            };
            prev = r * self.inv_pivot[i];
            psi[i] = prev;
        }
        for i in (0..n - 1).rev() {
            psi[i] = psi[i] - self.c_prime[i] * psi[i + 1];
        }
    }
}

/// States at one requested time, with the potential they feel.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub time: f64,
    pub states: Vec<Wavefunction>,
    pub potential: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub snapshots: Vec<Snapshot>,
    pub final_states: Vec<Wavefunction>,
    pub t_end: f64,
    pub steps: usize,
    pub max_norm_drift: f64,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Default)]
pub struct PropagationOptions {
    /// Extra output times inside `[t_start, t_end]`.
    pub snapshot_times: Vec<f64>,
    /// Abort if any state's edge amplitude relative to its peak exceeds this.
    pub edge_limit: Option<f64>,
}

/// Evolves every state in `states` from `t_start` to `t_end` under the
/// same time-dependent potential, with steps no longer than `dt`.
///
/// Steps are aligned so that every requested snapshot time is hit exactly.
pub fn propagate_many(
    states: &[Wavefunction],
    potential: &SampledPotential,
    mass: f64,
    t_start: f64,
    t_end: f64,
    dt: f64,
    options: &PropagationOptions,
) -> Result<Trajectory> {
    if states.is_empty() {
        return Err(Error::invalid("states", "nothing to propagate"));
    }
    if !(dt > 0.0 && dt.is_finite()) || !(t_end >= t_start) {
        return Err(Error::invalid("dt", "need dt > 0 and t_end >= t_start"));
    }
    let grid = states[0].grid;
    if potential.len() != grid.n_points || states.iter().any(|s| s.grid != grid) {
        return Err(Error::invalid(
            "states",
            "all states and the potential must share one grid",
        ));
    }
    let span = (t_end - t_start).abs().max(dt);
    let mut targets: Vec<f64> = options.snapshot_times.clone();
    for &t in &targets {
        if t < t_start - 1e-9 * span || t > t_end + 1e-9 * span {
            return Err(Error::invalid(
                "snapshot_times",
                format!("{t:e} s is outside [{t_start:e}, {t_end:e}]"),
            ));
        }
    }
    targets.sort_by(|a, b| a.total_cmp(b));
    targets.dedup();

    let mut warnings = Vec::new();
    if let Some(tau) = potential.fastest_transient() {
        if dt > tau / 50.0 {
            warnings.push(format!(
                "dt = {dt:e} s exceeds tau/50 = {:e} s; transients may be under-resolved",
                tau / 50.0
            ));
        }
    }

    let kin = kinetic_scale(&grid, mass);
    let mut psis: Vec<Vec<C64>> = states.iter().map(|s| s.amplitudes.clone()).collect();
    let norms0: Vec<f64> = states.iter().map(|s| s.norm()).collect();
    let mut v = potential.at(t_start);
    let mut stepper: Option<(f64, CayleyStep)> = None;
    let mut scratch = Vec::with_capacity(grid.n_points);
    let mut snapshots = Vec::new();
    let mut t = t_start;
    let mut steps = 0usize;
    let mut max_drift = 0.0f64;

    let take = |t: f64, psis: &[Vec<C64>], v: &mut Vec<f64>| -> Snapshot {
        potential.fill(t, v);
        Snapshot {
            time: t,
            states: psis
                .iter()
                .map(|a| Wavefunction {
                    grid,
                    amplitudes: a.clone(),
                })
                .collect(),
            potential: v.clone(),
        }
    };

    let mut boundaries: Vec<f64> = targets.iter().cloned().filter(|&x| x > t_start).collect();
    if boundaries.last().is_none_or(|&b| b < t_end) {
        boundaries.push(t_end);
    }
    if targets.first().is_some_and(|&x| x <= t_start) {
        snapshots.push(take(t_start, &psis, &mut v));
    }

    for &b in &boundaries {
        let len = b - t;
        let m = ((len / dt) - 1e-9).ceil().max(1.0) as usize;
        let h = len / m as f64;
        if len > 0.0 {
            for s in 0..m {
                let t_mid = t + (s as f64 + 0.5) * h;
                potential.fill(t_mid, &mut v);
                let reuse = matches!(&stepper, Some((hh, _)) if *hh == h);
                if !reuse {
                    stepper = Some((h, CayleyStep::new(&v, kin, h)?));
                } else if !potential.is_static() {
                    stepper.as_mut().expect("stepper").1.refactor(&v)?;
                }
                let st = &stepper.as_ref().expect("stepper").1;
                for psi in psis.iter_mut() {
                    st.apply(psi, &mut scratch);
                }
                steps += 1;
                if let Some(limit) = options.edge_limit {
                    let now = t + (s as f64 + 1.0) * h;
                    for psi in &psis {
                        let peak = psi.iter().map(|a| a.norm()).fold(0.0, f64::max);
                        let edge = psi[0].norm().max(psi[psi.len() - 1].norm()) / peak;
                        if edge > limit {
                            return Err(Error::EdgeAmplitude {
                                amplitude: edge,
                                limit,
                                time: now,
                            });
                        }
                    }
                }
            }
        }
        t = b;
        for (psi, n0) in psis.iter().zip(&norms0) {
            let n = psi.iter().map(|a| a.norm_sqr()).sum::<f64>() * grid.dx;
            max_drift = max_drift.max((n - n0).abs());
        }
        if targets.iter().any(|&x| x == b) {
            snapshots.push(take(b, &psis, &mut v));
        }
    }

    Ok(Trajectory {
        snapshots,
        final_states: psis
            .into_iter()
            .map(|a| Wavefunction {
                grid,
                amplitudes: a,
            })
            .collect(),
        t_end,
        steps,
        max_norm_drift: max_drift,
        warnings,
    })
}

/// Single-state convenience wrapper around [`propagate_many`].
pub fn propagate(
    psi: &Wavefunction,
    potential: &SampledPotential,
    mass: f64,
    t_start: f64,
    t_end: f64,
    dt: f64,
    options: &PropagationOptions,
) -> Result<Trajectory> {
    propagate_many(
        std::slice::from_ref(psi),
        potential,
        mass,
        t_start,
        t_end,
        dt,
        options,
    )
}

/// Writes one snapshot as CSV: position, then real part, imaginary part
/// and density for each state, then the potential.
pub fn write_snapshot_csv<W: Write>(out: &mut W, snap: &Snapshot) -> std::io::Result<()> {
    let grid = snap.states[0].grid;
    write!(out, "# t = {:e} s; x in m, psi in m^-1/2, |psi|^2 in m^-1 (sum of |psi|^2 column = 1/dx, dx = {:e} m), v in J", snap.time, grid.dx)?;
    writeln!(out)?;
    write!(out, "x")?;
    for k in 0..snap.states.len() {
        write!(out, ",re_psi{k},im_psi{k},abs2_psi{k}")?;
    }
    writeln!(out, ",v")?;
    for i in 0..grid.n_points {
        write!(out, "{:e}", grid.x(i))?;
        for s in &snap.states {
            let a = s.amplitudes[i];
            write!(out, ",{:e},{:e},{:e}", a.re, a.im, a.norm_sqr())?;
        }
        writeln!(out, ",{:e}", snap.potential[i])?;
    }
    Ok(())
}
