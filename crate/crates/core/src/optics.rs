//! Second-order nonlinear response of the ferroelectric film: difference
//! frequency mixing, optical rectification of a femtosecond pulse, the
//! bound-charge sheet density and the magnetic field of the resulting
//! displacement current.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::physcore::{peak_intensity, LaserParams, MaterialParams, C, E_CHARGE, MU0};

const FOUR_LN2: f64 = 4.0 * std::f64::consts::LN_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvelopeShape {
    Rectangular,
    Gaussian,
}

/// Normalized optical intensity envelope, peak value 1.
///
/// For [`EnvelopeShape::Gaussian`] `tau` is the intensity FWHM; for
/// [`EnvelopeShape::Rectangular`] it is the full duration of the flat top.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseEnvelope {
    pub t0: f64,
    pub tau: f64,
    pub shape: EnvelopeShape,
}

impl PulseEnvelope {
    pub fn gaussian(t0: f64, tau: f64) -> Self {
        PulseEnvelope {
            t0,
            tau,
            shape: EnvelopeShape::Gaussian,
        }
    }

    pub fn rectangular(t0: f64, tau: f64) -> Self {
        PulseEnvelope {
            t0,
            tau,
            shape: EnvelopeShape::Rectangular,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau.is_finite() && self.tau > 0.0) {
            return Err(Error::invalid("envelope.tau", "must be finite and > 0"));
        }
        if !self.t0.is_finite() {
            return Err(Error::invalid("envelope.t0", "must be finite"));
        }
        Ok(())
    }

    pub fn value(&self, t: f64) -> f64 {
        let s = t - self.t0;
        match self.shape {
            EnvelopeShape::Rectangular => {
                if s.abs() <= 0.5 * self.tau {
                    1.0
                } else {
                    0.0
                }
            }
            EnvelopeShape::Gaussian => (-FOUR_LN2 * s * s / (self.tau * self.tau)).exp(),
        }
    }

    /// Analytic time integral of the envelope.
    pub fn integral(&self) -> f64 {
        match self.shape {
            EnvelopeShape::Rectangular => self.tau,
            EnvelopeShape::Gaussian => self.tau * (std::f64::consts::PI / FOUR_LN2).sqrt(),
        }
    }
}

/// Sampled rectified polarization P(t) on a uniform time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransientPolarization {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub dt: f64,
}

/// `n` uniformly spaced samples on `[start, end]`, endpoints included.
pub fn uniform_times(start: f64, end: f64, n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![start];
    }
    let h = (end - start) / (n - 1) as f64;
    (0..n).map(|i| start + h * i as f64).collect()
}

/// Returns the common step of `t`, or an error if the samples are not
/// strictly increasing and uniform.
pub fn uniform_step(t: &[f64]) -> Result<f64> {
    if t.len() < 2 {
        return Err(Error::invalid("t_samples", "need at least two samples"));
    }
    let dt = (t[t.len() - 1] - t[0]) / (t.len() - 1) as f64;
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::invalid(
            "t_samples",
            "samples must be strictly increasing",
        ));
    }
    let scale = t[0].abs().max(t[t.len() - 1].abs()).max(dt);
    for (i, w) in t.windows(2).enumerate() {
        if ((w[1] - w[0]) - dt).abs() > 1e-9 * dt + 4.0 * f64::EPSILON * scale {
            return Err(Error::invalid(
                "t_samples",
                format!(
                    "non-uniform sampling at index {}: step {:e} vs mean {:e}",
                    i,
                    w[1] - w[0],
                    dt
                ),
            ));
        }
    }
    Ok(dt)
}

/// Difference-frequency polarization amplitude `2 chi2 E1 E2*`.
///
/// `chi2` carries units of polarization per squared field (C/V^2), i.e.
/// the vacuum permittivity is absorbed into it.
pub fn dfg_polarization(chi2: f64, e1: C64, e2: C64) -> C64 {
    2.0 * chi2 * e1 * e2.conj()
}

/// Peak rectified polarization `r n^3 I_peak / (2c)` (C/m^2).
pub fn rectified_polarization_peak(mat: &MaterialParams, laser: &LaserParams) -> f64 {
    mat.r * mat.n.powi(3) / (2.0 * C) * peak_intensity(laser)
}

/// P(t) following the optical intensity envelope.
pub fn rectified_polarization_profile(
    mat: &MaterialParams,
    laser: &LaserParams,
    env: &PulseEnvelope,
    t_samples: &[f64],
) -> Result<TransientPolarization> {
    env.validate()?;
    let dt = uniform_step(t_samples)?;
    let p_max = rectified_polarization_peak(mat, laser);
    Ok(TransientPolarization {
        times: t_samples.to_vec(),
        values: t_samples.iter().map(|&t| p_max * env.value(t)).collect(),
        dt,
    })
}

/// Areal density of bound charge `|P| / e` (m^-2).
pub fn sheet_density(p: f64) -> f64 {
    p.abs() / E_CHARGE
}

/// Headline displacement-current field estimate `mu0 R P_max / tau_opt` (T).
///
/// This is the order-of-magnitude formula as usually quoted. A uniform
/// current through a cylinder produces only half of this at its surface;
/// [`displacement_b_profile`] carries that factor.
pub fn displacement_bmax(radius: f64, p_max: f64, tau_opt: f64) -> f64 {
    MU0 * radius * p_max / tau_opt
}

/// First derivative of uniformly sampled data: central differences in the
/// interior, second-order one-sided stencils at the ends.
pub fn time_derivative(values: &[f64], dt: f64) -> Vec<f64> {
    let n = values.len();
    let mut d = vec![0.0; n];
    if n < 3 {
        if n == 2 {
            let s = (values[1] - values[0]) / dt;
            d[0] = s;
            d[1] = s;
        }
        return d;
    }
    for i in 1..n - 1 {
        d[i] = (values[i + 1] - values[i - 1]) / (2.0 * dt);
    }
    d[0] = (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * dt);
    d[n - 1] = (3.0 * values[n - 1] - 4.0 * values[n - 2] + values[n - 3]) / (2.0 * dt);
    d
}

/// Magnetic field of a uniform displacement current `J_d(t) = dP/dt`
/// filling a cylinder of radius `radius`, at distance `rho` from its axis.
///
/// Returns one sample per entry of `t_samples`.
pub fn displacement_b_profile(
    radius: f64,
    p_max: f64,
    env: &PulseEnvelope,
    rho: f64,
    t_samples: &[f64],
) -> Result<Vec<f64>> {
    if !(rho >= 0.0) {
        return Err(Error::Domain(format!(
            "radial coordinate must be >= 0, got {rho}"
        )));
    }
    if !(radius >= 0.0) {
        return Err(Error::Domain(format!(
            "cylinder radius must be >= 0, got {radius}"
        )));
    }
    env.validate()?;
    let dt = uniform_step(t_samples)?;
    let p: Vec<f64> = t_samples.iter().map(|&t| p_max * env.value(t)).collect();
    let geometry = if rho <= radius {
        0.5 * MU0 * rho
    } else {
        0.5 * MU0 * radius * radius / rho
    };
    Ok(time_derivative(&p, dt)
        .into_iter()
        .map(|j| geometry * j)
        .collect())
}
