//! Physical constants, material and laser parameter sets, and the thermal
//! spin-polarization estimate used for register initialization.
//!
//! Everything in this crate computes in strict SI units. Human-friendly
//! units only appear at the command-line boundary (see [`units`]).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// CODATA 2018 values. Frozen; the acceptance tolerances assume them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Speed of light in vacuum (m/s).
    pub c: f64,
    /// Vacuum permeability (H/m).
    pub mu0: f64,
    /// Vacuum permittivity (F/m).
    pub eps0: f64,
    /// Reduced Planck constant (J s).
    pub hbar: f64,
    /// Elementary charge (C).
    pub e_charge: f64,
    /// Boltzmann constant (J/K).
    pub k_b: f64,
    /// Bohr magneton (J/T).
    pub mu_b: f64,
    /// Electron rest mass (kg).
    pub m_e: f64,
}

pub const CODATA2018: PhysicalConstants = PhysicalConstants {
    c: 299_792_458.0,
    mu0: 1.256_637_062_12e-6,
    eps0: 8.854_187_812_8e-12,
    hbar: 1.054_571_817e-34,
    e_charge: 1.602_176_634e-19,
    k_b: 1.380_649e-23,
    mu_b: 9.274_010_078_3e-24,
    m_e: 9.109_383_701_5e-31,
};

pub const C: f64 = CODATA2018.c;
pub const MU0: f64 = CODATA2018.mu0;
pub const EPS0: f64 = CODATA2018.eps0;
pub const HBAR: f64 = CODATA2018.hbar;
pub const E_CHARGE: f64 = CODATA2018.e_charge;
pub const K_B: f64 = CODATA2018.k_b;
pub const MU_B: f64 = CODATA2018.mu_b;
pub const M_E: f64 = CODATA2018.m_e;

/// Reported T2 range for donor electrons in Si (s). Context only; the
/// register simulation has no decoherence channel.
pub const DONOR_T2_RANGE: (f64, f64) = (1e-5, 1e-4);

/// Electrooptic and ferroelectric constants of the film, plus the
/// conduction-band effective mass of the adjacent semiconductor channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaterialParams {
    /// Electrooptic coefficient (m/V).
    pub r: f64,
    /// Refractive index.
    pub n: f64,
    /// Spontaneous polarization (C/m^2).
    pub p_s: f64,
    /// m*/m_e of the channel electrons.
    pub effective_mass_ratio: f64,
    pub label: String,
}

impl MaterialParams {
    pub fn new(
        r: f64,
        n: f64,
        p_s: f64,
        effective_mass_ratio: f64,
        label: impl Into<String>,
    ) -> Result<Self> {
        let m = MaterialParams {
            r,
            n,
            p_s,
            effective_mass_ratio,
            label: label.into(),
        };
        m.validate()?;
        Ok(m)
    }

    /// BaTiO3 film on a Si channel (transverse effective mass 0.19).
    pub fn batio3() -> Self {
        MaterialParams {
            r: 1.95e-11,
            n: 2.45,
            p_s: 0.26,
            effective_mass_ratio: 0.19,
            label: "BaTiO3".to_string(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r.is_finite() && self.r > 0.0) {
            return Err(Error::invalid("material.r", "must be finite and > 0"));
        }
        if !(self.n.is_finite() && self.n >= 1.0) {
            return Err(Error::invalid("material.n", "must be finite and >= 1"));
        }
        if !(self.p_s.is_finite() && self.p_s >= 0.0) {
            return Err(Error::invalid("material.p_s", "must be finite and >= 0"));
        }
        if !(self.effective_mass_ratio.is_finite() && self.effective_mass_ratio > 0.0) {
            return Err(Error::invalid(
                "material.effective_mass_ratio",
                "must be finite and > 0",
            ));
        }
        Ok(())
    }

    pub fn effective_mass(&self) -> f64 {
        self.effective_mass_ratio * M_E
    }
}

impl Default for MaterialParams {
    fn default() -> Self {
        Self::batio3()
    }
}

/// Mode-locked laser parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaserParams {
    /// Average power (W).
    pub i_avg: f64,
    /// Spot diameter (m).
    pub d: f64,
    /// Repetition rate (Hz).
    pub rep_rate: f64,
    /// Pulse width (s).
    pub tau_opt: f64,
}

impl LaserParams {
    pub fn new(i_avg: f64, d: f64, rep_rate: f64, tau_opt: f64) -> Result<Self> {
        let l = LaserParams {
            i_avg,
            d,
            rep_rate,
            tau_opt,
        };
        l.validate()?;
        Ok(l)
    }

    /// 10 mW average, diffraction-limited 1 um spot, 76 MHz, 100 fs.
    pub fn reference() -> Self {
        LaserParams {
            i_avg: 10e-3,
            d: 1e-6,
            rep_rate: 76e6,
            tau_opt: 100e-15,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("laser.i_avg", self.i_avg),
            ("laser.d", self.d),
            ("laser.rep_rate", self.rep_rate),
            ("laser.tau_opt", self.tau_opt),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(name, "must be finite and > 0"));
            }
        }
        Ok(())
    }
}

impl Default for LaserParams {
    fn default() -> Self {
        Self::reference()
    }
}

/// Peak optical intensity (W/m^2) for a rectangular pulse on a square
/// spot of side `d`: pulse energy `i_avg / rep_rate` delivered over
/// `tau_opt` through area `d^2`.
pub fn peak_intensity(laser: &LaserParams) -> f64 {
    laser.i_avg / (laser.rep_rate * laser.tau_opt * laser.d * laser.d)
}

/// Thermal-equilibrium polarization of a spin-1/2 ensemble with
/// g-factor `g` in field `b` (T) at temperature `t` (K).
pub fn equilibrium_polarization(g: f64, b: f64, t: f64) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("temperature must be > 0 K, got {t}")));
    }
    // mu_B B / k_B T, written as a function of B/T alone so that
    // f(2B, 2T) == f(B, T) holds bit-for-bit.
    let ratio = b / t;
    Ok((0.5 * g * (MU_B / K_B) * ratio).tanh())
}

/// Conversion factors between SI and the units the CLI reports in.
pub mod units {
    pub const FS: f64 = 1e-15;
    pub const NM: f64 = 1e-9;
    pub const UM: f64 = 1e-6;
    pub const MW: f64 = 1e-3;
    pub const MHZ: f64 = 1e6;
    pub const EV: f64 = super::E_CHARGE;
    pub const MEV: f64 = 1e-3 * super::E_CHARGE;
    pub const GAUSS: f64 = 1e-4;
    /// 1 uC/cm^2 in C/m^2.
    pub const UC_PER_CM2: f64 = 1e-2;
    /// 1 cm^-2 in m^-2.
    pub const PER_CM2: f64 = 1e4;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_peak_intensity() {
        let i = peak_intensity(&LaserParams::reference());
        assert!((i / 1.3158e15 - 1.0).abs() < 1e-4, "{i}");
    }

    #[test]
    fn peak_intensity_scalings() {
        let base = LaserParams::reference();
        let i0 = peak_intensity(&base);
        let doubled = LaserParams {
            i_avg: 2.0 * base.i_avg,
            ..base
        };
        assert!((peak_intensity(&doubled) / i0 - 2.0).abs() < 1e-14);
        let wide = LaserParams {
            d: 2.0 * base.d,
            ..base
        };
        assert!((peak_intensity(&wide) / i0 - 0.25).abs() < 1e-14);
    }

    #[test]
    fn polarization_examples() {
        assert_eq!(equilibrium_polarization(2.0, 0.0, 1.0).unwrap(), 0.0);
        // mu_B / k_B in K/T, independent of the code path above
        let ratio: f64 = 9.274_010_078_3e-24 / 1.380_649e-23;
        assert!((ratio - 0.6717).abs() < 1e-4);
        let p = equilibrium_polarization(2.0, 1.0, 0.1).unwrap();
        assert!((p - 0.999997).abs() < 5e-7, "{p}");
        let small = equilibrium_polarization(2.0, 0.01, 10.0).unwrap();
        let lin = 2.0 * MU_B * 0.01 / (2.0 * K_B * 10.0);
        assert!(lin < 0.1);
        assert!((small / lin - 1.0).abs() < 0.01);
    }

    #[test]
    fn polarization_rejects_nonpositive_temperature() {
        assert!(equilibrium_polarization(2.0, 1.0, 0.0).is_err());
        assert!(equilibrium_polarization(2.0, 1.0, -3.0).is_err());
    }

    #[test]
    fn polarization_depends_on_ratio_only() {
        for &(b, t) in &[(0.3, 0.05), (1.0, 0.1), (7.0, 3.0), (-2.0, 0.4)] {
            let a = equilibrium_polarization(2.0, b, t).unwrap();
            let s = equilibrium_polarization(2.0, 2.0 * b, 2.0 * t).unwrap();
            assert_eq!(a, s);
        }
    }

    #[test]
    fn material_validation() {
        assert!(MaterialParams::new(-1.0, 2.0, 0.1, 0.2, "x").is_err());
        assert!(MaterialParams::new(1e-11, 0.5, 0.1, 0.2, "x").is_err());
        assert!(MaterialParams::new(1e-11, 2.0, -0.1, 0.2, "x").is_err());
        assert!(MaterialParams::new(1e-11, 2.0, 0.1, 0.0, "x").is_err());
        assert!(LaserParams::new(1.0, 0.0, 1.0, 1.0).is_err());
        MaterialParams::batio3().validate().unwrap();
    }
}
