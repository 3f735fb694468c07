use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exchange::{scenario_theta, Scenario};

use super::Schedule;

pub const DEFAULT_MAX_EVALUATIONS: usize = 40;

/// Search interval for the pulse scale multiplier.
///
/// The upper end starts at `upper` and doubles, up to `max_upper`, until
/// the target is bracketed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationBounds {
    pub lower: f64,
    pub upper: f64,
    pub max_upper: f64,
    pub tolerance: f64,
    pub max_evaluations: usize,
}

impl Default for CalibrationBounds {
    fn default() -> Self {
        CalibrationBounds {
            lower: 0.0,
            upper: 1.0,
            max_upper: 64.0,
            tolerance: 1e-3,
            max_evaluations: DEFAULT_MAX_EVALUATIONS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub scale: f64,
    pub theta: f64,
    pub target_theta: f64,
    pub evaluations: usize,
    /// Every `(scale, theta)` evaluated, in order.
    pub history: Vec<(f64, f64)>,
}

/// Finds `s` in the bounds with `|theta(s) - target| < tolerance` by
/// geometric bracket expansion followed by bisection.
pub fn calibrate_with<F>(
    target: f64,
    bounds: &CalibrationBounds,
    mut theta: F,
) -> Result<Calibration>
where
    F: FnMut(f64) -> Result<f64>,
{
    let b = *bounds;
    if !(b.lower.is_finite()
        && b.upper > b.lower
        && b.max_upper >= b.upper
        && b.max_upper.is_finite())
    {
        return Err(Error::invalid(
            "bounds",
            "need lower < upper <= max_upper, all finite",
        ));
    }
    if !(b.tolerance > 0.0) || !target.is_finite() {
        return Err(Error::invalid(
            "tolerance",
            "need tolerance > 0 and a finite target",
        ));
    }
    let mut history = Vec::new();
    let mut eval = |s: f64, history: &mut Vec<(f64, f64)>| -> Result<f64> {
        if history.len() >= b.max_evaluations {
            return Err(Error::NoConvergence {
                iterations: history.len(),
                residual: history
                    .last()
                    .map_or(f64::NAN, |&(_, t): &(f64, f64)| (t - target).abs()),
                context: format!(
                    "calibration budget of {} evaluations exhausted",
                    b.max_evaluations
                ),
            });
        }
        let th = theta(s)?;
        history.push((s, th));
        Ok(th)
    };
    let done = |s: f64, th: f64, history: Vec<(f64, f64)>| Calibration {
        scale: s,
        theta: th,
        target_theta: target,
        evaluations: history.len(),
        history,
    };

    let (mut lo, mut hi) = (b.lower, b.upper);
    let f_lo = eval(lo, &mut history)? - target;
    if f_lo.abs() < b.tolerance {
        return Ok(done(lo, f_lo + target, history));
    }
    let mut f_hi = eval(hi, &mut history)? - target;
    while f_hi.abs() >= b.tolerance && f_hi.signum() == f_lo.signum() {
        if hi >= b.max_upper {
            return Err(Error::Unreachable(format!(
                "theta - target keeps the sign of {f_lo:e} on [{}, {}]",
                b.lower, b.max_upper
            )));
        }
        hi = (2.0 * hi).min(b.max_upper);
        f_hi = eval(hi, &mut history)? - target;
    }
    if f_hi.abs() < b.tolerance {
        return Ok(done(hi, f_hi + target, history));
    }
    loop {
        let mid = 0.5 * (lo + hi);
        let f_mid = eval(mid, &mut history)? - target;
        if f_mid.abs() < b.tolerance {
            return Ok(done(mid, f_mid + target, history));
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// Calibrates the multiplier applied to every pulse scale of `template`
/// so that the scenario's exchange angle hits `target`.
pub fn calibrate_pulse(
    target: f64,
    template: &Schedule,
    bounds: &CalibrationBounds,
) -> Result<Calibration> {
    let base = Scenario::from_schedule(template)?;
    calibrate_with(target, bounds, |s| {
        scenario_theta(&base.with_pulse_scale(s))
    })
}
