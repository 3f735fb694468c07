//! Two-electron exchange: singlet-triplet splitting on the instantaneous
//! potential, accumulation of the exchange angle, the exchange unitary,
//! and the adiabaticity diagnostics of a gate run.
//!
//! Sign convention: `J = E_triplet - E_singlet`, so an ordinary double dot
//! has `J > 0` and the exchange angle grows with time.

mod gate;
mod scenario;
mod two_electron;

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optics::uniform_step;
use crate::physcore::HBAR;
use crate::qdyn1d::{stationary_states_of, BoundPotential, Grid1D, Trajectory};

pub use gate::{exchange_unitary, gate_fidelity, spin_dot, total_s2, total_sz, Gate4};
pub use scenario::{exchange_samples, run_swap_scenario, scenario_theta, Scenario, ScenarioReport};
pub use two_electron::{singlet_triplet, Sector, SoftCoulomb, Splitting, MAX_EXCHANGE_POINTS};

/// Two electrons in a (possibly time-dependent) nanowire potential.
#[derive(Debug, Clone)]
pub struct TwoElectronProblem {
    pub grid: Grid1D,
    pub potential: BoundPotential,
    pub mass: f64,
    pub interaction: SoftCoulomb,
}

impl TwoElectronProblem {
    pub fn splitting(&self, t: f64) -> Result<Splitting> {
        if self.grid.n_points > MAX_EXCHANGE_POINTS {
            return Err(Error::Budget(format!(
                "exchange grid has {} points; coarsen it to at most {MAX_EXCHANGE_POINTS}",
                self.grid.n_points
            )));
        }
        let v = self.potential.on_grid(&self.grid).at(t);
        singlet_triplet(&v, &self.grid, self.mass, &self.interaction)
    }
}

/// `E_triplet - E_singlet` of the instantaneous potential at `t` (J).
pub fn exchange_splitting(prob: &TwoElectronProblem, t: f64) -> Result<f64> {
    Ok(prob.splitting(t)?.j)
}

/// J(t) and its running integral `theta(t) = (1/hbar) int J dt`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExchangeTrace {
    pub times: Vec<f64>,
    pub j: Vec<f64>,
    pub theta: Vec<f64>,
}

impl ExchangeTrace {
    pub fn final_theta(&self) -> f64 {
        self.theta.last().copied().unwrap_or(0.0)
    }

    pub fn write_csv<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "# t in s, J in J, theta_running in rad")?;
        writeln!(out, "t,J,theta_running")?;
        for ((t, j), th) in self.times.iter().zip(&self.j).zip(&self.theta) {
            writeln!(out, "{t:e},{j:e},{th:e}")?;
        }
        Ok(())
    }
}

/// Composite-trapezoid exchange angle for uniformly sampled J(t).
pub fn exchange_angle(times: &[f64], j: &[f64]) -> Result<ExchangeTrace> {
    if times.len() != j.len() {
        return Err(Error::invalid("trace", "times and J differ in length"));
    }
    let dt = uniform_step(times)?;
    let mut theta = Vec::with_capacity(j.len());
    let mut acc = 0.0;
    theta.push(0.0);
    for w in j.windows(2) {
        acc += 0.5 * dt * (w[0] + w[1]) / HBAR;
        theta.push(acc);
    }
    Ok(ExchangeTrace {
        times: times.to_vec(),
        j: j.to_vec(),
        theta,
    })
}

/// Monotone piecewise-cubic Hermite interpolation (Fritsch-Carlson slopes).
/// Preserves the sign and monotonicity of the samples.
pub fn pchip(xs: &[f64], ys: &[f64], at: &[f64]) -> Vec<f64> {
    let n = xs.len();
    assert!(n >= 2 && ys.len() == n);
    let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|k| (ys[k + 1] - ys[k]) / h[k]).collect();
    let mut d = vec![0.0; n];
    for k in 1..n - 1 {
        if delta[k - 1] * delta[k] > 0.0 {
            let w1 = 2.0 * h[k] + h[k - 1];
            let w2 = h[k] + 2.0 * h[k - 1];
            d[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
        }
    }
    let end_slope = |h0: f64, h1: f64, d0: f64, d1: f64| {
        let s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if s * d0 <= 0.0 {
            0.0
        } else if d0 * d1 <= 0.0 && s.abs() > 3.0 * d0.abs() {
            3.0 * d0
        } else {
            s
        }
    };
    if n == 2 {
        d[0] = delta[0];
        d[1] = delta[0];
    } else {
        d[0] = end_slope(h[0], h[1], delta[0], delta[1]);
        d[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    }
    at.iter()
        .map(|&x| {
            let k = match xs.binary_search_by(|p| p.total_cmp(&x)) {
                Ok(i) => return ys[i],
                Err(0) => 0,
                Err(i) if i >= n => n - 2,
                Err(i) => i - 1,
            };
            let s = (x - xs[k]) / h[k];
            let (s2, s3) = (s * s, s * s * s);
            let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
            let h10 = s3 - 2.0 * s2 + s;
            let h01 = -2.0 * s3 + 3.0 * s2;
            let h11 = s3 - s2;
            h00 * ys[k] + h10 * h[k] * d[k] + h01 * ys[k + 1] + h11 * h[k] * d[k + 1]
        })
        .collect()
}

/// `1 - |<phi_level(t_end)|psi_k(t_end)>|^2` for each propagated state
/// `psi_k` of `traj`, paired with the instantaneous eigenstate `levels[k]`
/// of the potential at the end of the run.
pub fn adiabatic_leakage(
    traj: &Trajectory,
    potential: &BoundPotential,
    mass: f64,
    levels: &[usize],
) -> Result<Vec<f64>> {
    if levels.len() != traj.final_states.len() {
        return Err(Error::invalid(
            "levels",
            "one target level per propagated state",
        ));
    }
    let grid = traj.final_states[0].grid;
    let v = potential.on_grid(&grid).at(traj.t_end);
    let k = levels.iter().max().map_or(1, |m| m + 1);
    let inst = stationary_states_of(&v, &grid, mass, k)?;
    Ok(traj
        .final_states
        .iter()
        .zip(levels)
        .map(|(psi, &l)| (1.0 - inst[l].psi.inner(psi).norm_sqr()).clamp(0.0, 1.0))
        .collect())
}

/// Population of each propagated state outside the span of the `dim`
/// lowest instantaneous eigenstates at the end of the run.
pub fn subspace_leakage(
    traj: &Trajectory,
    potential: &BoundPotential,
    mass: f64,
    dim: usize,
) -> Result<Vec<f64>> {
    let grid = traj.final_states[0].grid;
    let v = potential.on_grid(&grid).at(traj.t_end);
    let inst = stationary_states_of(&v, &grid, mass, dim)?;
    Ok(traj
        .final_states
        .iter()
        .map(|psi| {
            let kept: f64 = inst.iter().map(|phi| phi.psi.inner(psi).norm_sqr()).sum();
            (1.0 - kept).clamp(0.0, 1.0)
        })
        .collect())
}
