//! End-to-end exchange-gate run: single-particle propagation through the
//! pulse sequence, J(t) from the instantaneous two-electron problem, the
//! accumulated angle, leakage and the resulting spin-gate fidelity.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::optics::uniform_times;
use crate::physcore::{LaserParams, MaterialParams};
use crate::qdyn1d::{
    propagate_many, stationary_states_of, Grid1D, PotentialModel, PropagationOptions, Snapshot,
};

use super::{
    exchange_angle, exchange_unitary, gate_fidelity, pchip, singlet_triplet, subspace_leakage,
    ExchangeTrace, Gate4, SoftCoulomb,
};

/// Everything needed to run one gate, in SI units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub material: MaterialParams,
    pub laser: LaserParams,
    pub model: PotentialModel,
    pub interaction: SoftCoulomb,
    /// Fine grid for single-particle propagation.
    pub grid: Grid1D,
    /// Coarse grid for the two-electron problem.
    pub exchange_grid: Grid1D,
    pub t_start: f64,
    pub t_end: f64,
    pub dt: f64,
    /// Number of instantaneous J evaluations across the window.
    pub j_samples: usize,
    /// Interpolation points per J sample interval.
    pub refine: usize,
    pub snapshot_times: Vec<f64>,
    pub leakage_threshold: f64,
    pub edge_limit: f64,
    pub target_theta: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub theta: f64,
    pub target_theta: f64,
    pub leakage: f64,
    pub swap_fidelity: f64,
    pub target_fidelity: f64,
    pub j_static: f64,
    pub j_peak: f64,
    pub norm_drift: f64,
    pub flags: Vec<String>,
    pub warnings: Vec<String>,
    #[serde(skip)]
    pub samples: Option<ExchangeTrace>,
    #[serde(skip)]
    pub trace: Option<ExchangeTrace>,
    #[serde(skip)]
    pub snapshots: Vec<Snapshot>,
}

impl Scenario {
    pub fn mass(&self) -> f64 {
        self.material.effective_mass()
    }

    fn j_at(&self, t: f64, bound: &crate::qdyn1d::BoundPotential) -> Result<f64> {
        let v = bound.on_grid(&self.exchange_grid).at(t);
        Ok(singlet_triplet(&v, &self.exchange_grid, self.mass(), &self.interaction)?.j)
    }

    /// J of the static wells alone.
    pub fn static_exchange(&self) -> Result<f64> {
        let v: Vec<f64> = self
            .exchange_grid
            .points()
            .iter()
            .map(|&x| self.model.wells.value(x))
            .collect();
        Ok(singlet_triplet(&v, &self.exchange_grid, self.mass(), &self.interaction)?.j)
    }

    pub fn with_pulse_scale(&self, factor: f64) -> Scenario {
        let mut s = self.clone();
        for t in &mut s.model.transients {
            t.scale *= factor;
        }
        s
    }
}

/// J at `j_samples` uniform times and its interpolated, integrated trace.
///
/// Samples are evaluated in parallel and collected in time order, so the
/// result does not depend on the thread count.
pub fn exchange_samples(sc: &Scenario) -> Result<(ExchangeTrace, ExchangeTrace)> {
    sc.model.validate()?;
    let bound = sc.model.bind(&sc.material, &sc.laser);
    let n = sc.j_samples.max(2);
    let times = uniform_times(sc.t_start, sc.t_end, n);
    let j_static = if sc.model.transients.iter().all(|t| t.scale == 0.0) {
        Some(sc.static_exchange()?)
    } else {
        None
    };
    let j: Vec<f64> = match j_static {
        Some(j0) => vec![j0; n],
        None => times
            .par_iter()
            .map(|&t| sc.j_at(t, &bound))
            .collect::<Result<Vec<_>>>()?,
    };
    let samples = exchange_angle(&times, &j)?;
    let fine_t = uniform_times(sc.t_start, sc.t_end, (n - 1) * sc.refine.max(1) + 1);
    let fine_j = pchip(&times, &j, &fine_t);
    let trace = exchange_angle(&fine_t, &fine_j)?;
    Ok((samples, trace))
}

/// Accumulated exchange angle of the scenario, without propagation.
pub fn scenario_theta(sc: &Scenario) -> Result<f64> {
    Ok(exchange_samples(sc)?.1.final_theta())
}

pub fn run_swap_scenario(sc: &Scenario) -> Result<ScenarioReport> {
    let (samples, trace) = exchange_samples(sc)?;
    let theta = trace.final_theta();
    let j_static = sc.static_exchange()?;
    let j_peak = samples.j.iter().cloned().fold(f64::NEG_INFINITY, f64::max);

    let mass = sc.mass();
    let bound = sc.model.bind(&sc.material, &sc.laser);
    let sampled = bound.on_grid(&sc.grid);
    let initial = stationary_states_of(&sampled.at(sc.t_start), &sc.grid, mass, 2)?;
    let states: Vec<_> = initial.into_iter().map(|e| e.psi).collect();
    let opts = PropagationOptions {
        snapshot_times: sc.snapshot_times.clone(),
        edge_limit: Some(sc.edge_limit),
    };
    let traj = propagate_many(&states, &sampled, mass, sc.t_start, sc.t_end, sc.dt, &opts)?;
    let leakage = subspace_leakage(&traj, &bound, mass, 2)?
        .into_iter()
        .fold(0.0, f64::max);

    let actual = exchange_unitary(theta);
    let swap_fidelity = gate_fidelity(&Gate4::swap(), &actual);
    let target_fidelity = gate_fidelity(&exchange_unitary(sc.target_theta), &actual);
    let mut flags = Vec::new();
    if leakage > sc.leakage_threshold {
        flags.push("non-adiabatic".to_string());
    }
    let mut warnings = traj.warnings.clone();
    if j_peak < 0.0 {
        warnings.push("J(t) negative at every sample".to_string());
    }
    Ok(ScenarioReport {
        theta,
        target_theta: sc.target_theta,
        leakage,
        swap_fidelity,
        target_fidelity,
        j_static,
        j_peak,
        norm_drift: traj.max_norm_drift,
        flags,
        warnings,
        samples: Some(samples),
        trace: Some(trace),
        snapshots: traj.snapshots,
    })
}
