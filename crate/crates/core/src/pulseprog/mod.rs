//! Pulse schedules: the line-oriented `.fgs` format, the canonical
//! three-pulse exchange template and amplitude calibration.
//!
//! ```text
//! # two side pulses, then a weaker pulse on the barrier
//! device lever_arm=5e-16 tau=100fs
//! grid x_min=-40nm x_max=40nm n=512 t_start=-200fs t_end=600fs
//! well depth=400meV x0=3nm width=1.2nm barrier=2.5eV barrier_width=1nm
//! pulse t0=-100fs x0=-0.5nm sigma_x=1.2nm tau=100fs scale=0.9 polarity=+1
//! pulse t0=-100fs x0=0.5nm sigma_x=1.2nm tau=100fs scale=0.9 polarity=+1
//! pulse t0=450fs x0=0nm sigma_x=1.2nm tau=100fs scale=0.27 polarity=-1
//! gate i=0 j=1 theta=1.0pi
//! ```
//!
//! Blocks that are absent take their default values; keys absent from a
//! present block do too.

mod calibrate;
mod parse;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exchange::{Scenario, SoftCoulomb};
use crate::optics::{EnvelopeShape, PulseEnvelope};
use crate::physcore::{LaserParams, MaterialParams};
use crate::qdyn1d::{DoubleWell, Grid1D, PotentialModel, TransientTerm};
use crate::spinreg::ExchangeEvent;

pub use calibrate::{
    calibrate_pulse, calibrate_with, Calibration, CalibrationBounds, DEFAULT_MAX_EVALUATIONS,
};
pub use parse::{
    parameter_unit, parameter_value, parse_quantity, parse_schedule, parse_schedule_bytes,
    parse_schedule_with_warnings, serialize_schedule, set_parameter, Dimension, Warning,
};

const FS: f64 = 1e-15;
const NM: f64 = 1e-9;
const MEV: f64 = 1e-3 * crate::physcore::E_CHARGE;

/// Times of the six reference snapshots of a gate run (s).
pub const FIG3_SNAPSHOTS: [f64; 6] = [
    -200.0 * FS,
    -100.0 * FS,
    0.0,
    150.0 * FS,
    450.0 * FS,
    600.0 * FS,
];

/// Film, laser and interaction parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviceSpec {
    /// Electrooptic coefficient (m/V).
    pub r: f64,
    pub n_index: f64,
    /// Spontaneous polarization (C/m^2).
    pub p_s: f64,
    /// Effective mass in units of the electron mass.
    pub mass_ratio: f64,
    pub i_avg: f64,
    pub d: f64,
    pub rep_rate: f64,
    /// Reference optical pulse duration (s).
    pub tau: f64,
    /// Channel potential shift per unit film polarization (J m^2 / C).
    pub lever_arm: f64,
    pub eps_r: f64,
    pub softening: f64,
    /// Multiplier on the Coulomb repulsion.
    pub coulomb: f64,
}

impl Default for DeviceSpec {
    fn default() -> Self {
        let m = MaterialParams::batio3();
        let l = LaserParams::reference();
        let c = SoftCoulomb::default();
        DeviceSpec {
            r: m.r,
            n_index: m.n,
            p_s: m.p_s,
            mass_ratio: m.effective_mass_ratio,
            i_avg: l.i_avg,
            d: l.d,
            rep_rate: l.rep_rate,
            tau: l.tau_opt,
            lever_arm: 5e-16,
            eps_r: c.eps_r,
            softening: c.softening,
            coulomb: c.strength,
        }
    }
}

/// Spatial grids, time window and run controls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
    pub exchange_x_min: f64,
    pub exchange_x_max: f64,
    pub exchange_n: usize,
    pub t_start: f64,
    pub t_end: f64,
    pub dt: f64,
    pub j_samples: usize,
    pub refine: usize,
    pub leakage_threshold: f64,
    pub edge_limit: f64,
    pub snapshots: Vec<f64>,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            x_min: -40.0 * NM,
            x_max: 40.0 * NM,
            n: 512,
            exchange_x_min: -8.0 * NM,
            exchange_x_max: 8.0 * NM,
            exchange_n: 64,
            t_start: -200.0 * FS,
            t_end: 600.0 * FS,
            dt: 0.1 * FS,
            j_samples: 81,
            refine: 8,
            leakage_threshold: 0.01,
            edge_limit: 1e-8,
            snapshots: FIG3_SNAPSHOTS.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WellSpec {
    pub depth: f64,
    pub x0: f64,
    pub width: f64,
    pub barrier: f64,
    pub barrier_width: f64,
    /// Wall height of the wire channel; 0 leaves it open.
    pub channel: f64,
    pub channel_half_length: f64,
    pub channel_edge: f64,
}

impl Default for WellSpec {
    fn default() -> Self {
        WellSpec {
            depth: 400.0 * MEV,
            x0: 3.0 * NM,
            width: 1.2 * NM,
            barrier: 2500.0 * MEV,
            barrier_width: 1.0 * NM,
            channel: 10000.0 * MEV,
            channel_half_length: 20.0 * NM,
            channel_edge: 1.0 * NM,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseSpec {
    pub t0: f64,
    pub x0: f64,
    pub sigma_x: f64,
    pub tau: f64,
    pub scale: f64,
    /// +1 lowers the channel potential under the pulse, -1 raises it.
    pub polarity: f64,
    pub shape: EnvelopeShape,
}

impl PulseSpec {
    fn term(&self) -> TransientTerm {
        TransientTerm {
            envelope: PulseEnvelope {
                t0: self.t0,
                tau: self.tau,
                shape: self.shape,
            },
            center: self.x0,
            sigma_x: self.sigma_x,
            scale: self.scale,
            polarity: self.polarity,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub device: Option<DeviceSpec>,
    pub grid: Option<GridSpec>,
    pub well: Option<WellSpec>,
    /// Sorted by `t0`; equal times keep file order.
    pub pulses: Vec<PulseSpec>,
    pub gates: Vec<ExchangeEvent>,
}

impl Schedule {
    pub fn device(&self) -> DeviceSpec {
        self.device.unwrap_or_default()
    }

    pub fn grid(&self) -> GridSpec {
        self.grid.clone().unwrap_or_default()
    }

    pub fn well(&self) -> WellSpec {
        self.well.unwrap_or_default()
    }

    pub fn sort_pulses(&mut self) {
        self.pulses.sort_by(|a, b| a.t0.total_cmp(&b.t0));
    }

    /// Every pulse scale multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Schedule {
        let mut s = self.clone();
        for p in &mut s.pulses {
            p.scale *= factor;
        }
        s
    }

    /// Mirror image in time about the centre of the run window.
    pub fn time_reversed(&self) -> Schedule {
        let g = self.grid();
        let mut s = self.clone();
        for p in &mut s.pulses {
            p.t0 = g.t_start + g.t_end - p.t0;
        }
        s.sort_pulses();
        s
    }
}

/// Knobs of the canonical template.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fig3Params {
    /// Side-pulse scale `s`.
    pub scale: f64,
    /// Centre-pulse scale relative to the side pulses, `0 <= w < 1`.
    /// This ratio is a modelling choice; 0 drops the centre pulse.
    pub weak_ratio: f64,
    /// Side pulses sit at `+-x0` (m).
    pub x0: f64,
    pub sigma_x: f64,
    pub tau: f64,
    pub side_t0: f64,
    pub center_t0: f64,
}

impl Default for Fig3Params {
    fn default() -> Self {
        Fig3Params {
            scale: 1.0,
            weak_ratio: 0.3,
            x0: 0.5 * NM,
            sigma_x: 1.2 * NM,
            tau: 100.0 * FS,
            side_t0: -100.0 * FS,
            center_t0: 450.0 * FS,
        }
    }
}

/// Two symmetric side pulses that open the tunnel barrier, then a weaker
/// pulse of opposite polarity on the barrier that closes it again.
pub fn canonical_fig3_schedule(p: &Fig3Params) -> Schedule {
    let side = |x0: f64| PulseSpec {
        t0: p.side_t0,
        x0,
        sigma_x: p.sigma_x,
        tau: p.tau,
        scale: p.scale,
        polarity: 1.0,
        shape: EnvelopeShape::Gaussian,
    };
    let mut pulses = vec![side(-p.x0), side(p.x0)];
    if p.weak_ratio > 0.0 {
        pulses.push(PulseSpec {
            t0: p.center_t0,
            x0: 0.0,
            scale: p.weak_ratio * p.scale,
            polarity: -1.0,
            ..side(0.0)
        });
    }
    let mut s = Schedule {
        device: Some(DeviceSpec::default()),
        grid: Some(GridSpec::default()),
        well: Some(WellSpec::default()),
        pulses,
        gates: Vec::new(),
    };
    s.sort_pulses();
    s
}

impl Scenario {
    pub fn from_schedule(s: &Schedule) -> Result<Scenario> {
        let d = s.device();
        let g = s.grid();
        let w = s.well();
        let material = MaterialParams::new(d.r, d.n_index, d.p_s, d.mass_ratio, "schedule")?;
        let laser = LaserParams::new(d.i_avg, d.d, d.rep_rate, d.tau)?;
        let interaction = SoftCoulomb {
            strength: d.coulomb,
            eps_r: d.eps_r,
            softening: d.softening,
        };
        interaction.validate()?;
        let wells = DoubleWell::new(w.depth, w.x0, w.width, w.barrier, w.barrier_width)
            .with_channel(w.channel, w.channel_half_length, w.channel_edge);
        let model = PotentialModel {
            wells,
            lever_arm: d.lever_arm,
            transients: s.pulses.iter().map(|p| p.term()).collect(),
        };
        model.validate()?;
        if !(g.t_end > g.t_start) {
            return Err(Error::invalid("grid.t_end", "must be later than t_start"));
        }
        if !(g.dt > 0.0) {
            return Err(Error::invalid("grid.dt", "must be > 0"));
        }
        if g.j_samples < 2 || g.refine < 1 {
            return Err(Error::invalid(
                "grid.j_samples",
                "need j_samples >= 2 and refine >= 1",
            ));
        }
        if !(g.leakage_threshold >= 0.0 && g.edge_limit > 0.0) {
            return Err(Error::invalid(
                "grid.leakage_threshold",
                "thresholds must be >= 0",
            ));
        }
        Ok(Scenario {
            material,
            laser,
            model,
            interaction,
            grid: Grid1D::new(g.x_min, g.x_max, g.n)?,
            exchange_grid: Grid1D::new(g.exchange_x_min, g.exchange_x_max, g.exchange_n)?,
            t_start: g.t_start,
            t_end: g.t_end,
            dt: g.dt,
            j_samples: g.j_samples,
            refine: g.refine,
            snapshot_times: g
                .snapshots
                .iter()
                .copied()
                .filter(|t| (g.t_start..=g.t_end).contains(t))
                .collect(),
            leakage_threshold: g.leakage_threshold,
            edge_limit: g.edge_limit,
            target_theta: std::f64::consts::PI,
        })
    }
}
