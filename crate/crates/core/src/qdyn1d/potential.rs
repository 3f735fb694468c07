use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optics::{rectified_polarization_peak, PulseEnvelope};
use crate::physcore::{LaserParams, MaterialParams};

use super::grid::Grid1D;

#[inline]
fn gauss(u: f64, w: f64) -> f64 {
    (-u * u / (2.0 * w * w)).exp()
}

/// Static confinement along the nanowire: two Gaussian wells at
/// `+-center` separated by a Gaussian tunnel barrier at the origin,
/// inside a channel whose walls rise smoothly to `channel_height` beyond
/// `+-channel_half_length`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoubleWell {
    /// Well depth (J), positive.
    pub depth: f64,
    /// Distance of each well from the origin (m).
    pub center: f64,
    /// Gaussian width of each well (m).
    pub width: f64,
    /// Barrier height (J).
    pub barrier_height: f64,
    /// Gaussian width of the barrier (m).
    pub barrier_width: f64,
    /// Height of the channel walls (J); 0 leaves the wire open.
    #[serde(default)]
    pub channel_height: f64,
    #[serde(default)]
    pub channel_half_length: f64,
    /// Rise length of the walls (m).
    #[serde(default = "default_channel_edge")]
    pub channel_edge: f64,
}

fn default_channel_edge() -> f64 {
    1e-9
}

impl DoubleWell {
    /// Open wire, no channel walls.
    pub fn new(
        depth: f64,
        center: f64,
        width: f64,
        barrier_height: f64,
        barrier_width: f64,
    ) -> Self {
        DoubleWell {
            depth,
            center,
            width,
            barrier_height,
            barrier_width,
            channel_height: 0.0,
            channel_half_length: 0.0,
            channel_edge: default_channel_edge(),
        }
    }

    pub fn with_channel(self, height: f64, half_length: f64, edge: f64) -> Self {
        DoubleWell {
            channel_height: height,
            channel_half_length: half_length,
            channel_edge: edge,
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.width > 0.0 && self.barrier_width > 0.0 && self.channel_edge > 0.0) {
            return Err(Error::invalid("well", "widths must be > 0"));
        }
        if !(self.channel_height >= 0.0
            && self.channel_height.is_finite()
            && self.channel_half_length >= 0.0)
        {
            return Err(Error::invalid(
                "well.channel",
                "height and half length must be finite and >= 0",
            ));
        }
        for (name, v) in [
            ("well.depth", self.depth),
            ("well.x0", self.center),
            ("well.barrier", self.barrier_height),
        ] {
            if !v.is_finite() {
                return Err(Error::invalid(name, "must be finite"));
            }
        }
        Ok(())
    }

    pub fn value(&self, x: f64) -> f64 {
        let mut v = -self.depth
            * (gauss(x - self.center, self.width) + gauss(x + self.center, self.width))
            + self.barrier_height * gauss(x, self.barrier_width);
        if self.channel_height > 0.0 {
            // logistic step, written to stay accurate deep inside the channel
            let u = (x.abs() - self.channel_half_length) / self.channel_edge;
            v += self.channel_height / (1.0 + (-2.0 * u).exp());
        }
        v
    }
}

/// One optically rectified transient: a pulse envelope in time, a
/// Gaussian footprint along the wire, an intensity scale and a sign set
/// by the local domain orientation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransientTerm {
    pub envelope: PulseEnvelope,
    pub center: f64,
    pub sigma_x: f64,
    /// Multiplier on the reference pulse energy (>= 0).
    pub scale: f64,
    /// +1 lowers the local potential, -1 raises it.
    pub polarity: f64,
}

/// V(x, t) = V_static(x) - lever_arm * sum_k polarity_k P_k(t) exp(-(x - x_k)^2 / 2 sigma_k^2).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialModel {
    pub wells: DoubleWell,
    /// Potential energy shift per unit film polarization (J m^2 / C).
    pub lever_arm: f64,
    pub transients: Vec<TransientTerm>,
}

impl PotentialModel {
    pub fn static_only(wells: DoubleWell) -> Self {
        PotentialModel {
            wells,
            lever_arm: 0.0,
            transients: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.wells.validate()?;
        if !self.lever_arm.is_finite() {
            return Err(Error::invalid("lever_arm", "must be finite"));
        }
        for t in &self.transients {
            t.envelope.validate()?;
            if !(t.sigma_x > 0.0) {
                return Err(Error::invalid("pulse.sigma_x", "must be > 0"));
            }
            if !(t.scale >= 0.0 && t.scale.is_finite()) {
                return Err(Error::invalid("pulse.scale", "must be finite and >= 0"));
            }
        }
        Ok(())
    }

    /// Resolve the pulse amplitudes against a film and a laser.
    ///
    /// Each pulse delivers `scale` times the laser's pulse energy over its
    /// own duration, so shorter pulses give proportionally higher peaks.
    pub fn bind(&self, mat: &MaterialParams, laser: &LaserParams) -> BoundPotential {
        let coefficients = self
            .transients
            .iter()
            .map(|t| {
                let l = LaserParams {
                    tau_opt: t.envelope.tau,
                    ..*laser
                };
                self.lever_arm * t.polarity * t.scale * rectified_polarization_peak(mat, &l)
            })
            .collect();
        BoundPotential {
            model: self.clone(),
            coefficients,
        }
    }

    /// Shortest pulse duration among the transients.
    pub fn fastest_transient(&self) -> Option<f64> {
        self.transients
            .iter()
            .map(|t| t.envelope.tau)
            .reduce(f64::min)
    }
}

/// A [`PotentialModel`] with the peak potential shift of every transient
/// term resolved to energy units.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundPotential {
    pub model: PotentialModel,
    /// `lever_arm * polarity * peak polarization` per term (J).
    pub coefficients: Vec<f64>,
}

impl BoundPotential {
    pub fn value(&self, x: f64, t: f64) -> f64 {
        let mut v = self.model.wells.value(x);
        for (term, &c) in self.model.transients.iter().zip(&self.coefficients) {
            let e = term.envelope.value(t);
            if e != 0.0 {
                v -= c * e * gauss(x - term.center, term.sigma_x);
            }
        }
        v
    }

    pub fn on_grid(&self, grid: &Grid1D) -> SampledPotential {
        let x = grid.points();
        SampledPotential {
            static_part: x.iter().map(|&xi| self.model.wells.value(xi)).collect(),
            shapes: self
                .model
                .transients
                .iter()
                .zip(&self.coefficients)
                .map(|(term, &c)| {
                    x.iter()
                        .map(|&xi| c * gauss(xi - term.center, term.sigma_x))
                        .collect()
                })
                .collect(),
            envelopes: self.model.transients.iter().map(|t| t.envelope).collect(),
        }
    }
}

/// Potential pre-evaluated on a grid, cheap to re-evaluate at any time.
#[derive(Debug, Clone)]
pub struct SampledPotential {
    static_part: Vec<f64>,
    shapes: Vec<Vec<f64>>,
    envelopes: Vec<PulseEnvelope>,
}

impl SampledPotential {
    pub fn from_values(values: Vec<f64>) -> Self {
        SampledPotential {
            static_part: values,
            shapes: Vec::new(),
            envelopes: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.static_part.len()
    }

    pub fn is_empty(&self) -> bool {
        self.static_part.is_empty()
    }

    pub fn is_static(&self) -> bool {
        self.shapes.is_empty()
    }

    pub fn fastest_transient(&self) -> Option<f64> {
        self.envelopes.iter().map(|e| e.tau).reduce(f64::min)
    }

    pub fn at(&self, t: f64) -> Vec<f64> {
        let mut v = self.static_part.clone();
        self.fill(t, &mut v);
        v
    }

    /// Overwrites `out` with V(x_i, t).
    pub fn fill(&self, t: f64, out: &mut [f64]) {
        out.copy_from_slice(&self.static_part);
        for (shape, env) in self.shapes.iter().zip(&self.envelopes) {
            let e = env.value(t);
            if e == 0.0 {
                continue;
            }
            for (o, s) in out.iter_mut().zip(shape) {
                *o -= e * s;
            }
        }
    }
}

/// V(x, t) for a model bound to the given film and laser.
pub fn evaluate_potential(
    model: &PotentialModel,
    mat: &MaterialParams,
    laser: &LaserParams,
    x: f64,
    t: f64,
) -> f64 {
    model.bind(mat, laser).value(x, t)
}
