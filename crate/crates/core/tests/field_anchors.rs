use ferrogate::optics::*;
use ferrogate::physcore::units::*;
use ferrogate::physcore::*;
use proptest::prelude::*;

// Reference numbers recomputed by hand from I = I_avg / (Omega tau D^2)
// and P = r n^3 I / 2c.
const I_PEAK: f64 = 10e-3 / (76e6 * 100e-15 * 1e-12);

#[test]
fn peak_intensity_matches_hand_computation() {
    let i = peak_intensity(&LaserParams::reference());
    assert!((i / 1.3158e15 - 1.0).abs() < 5e-5);
    assert!((i / I_PEAK - 1.0).abs() < 1e-14);
    let p = 1.95e-11 * 2.45f64.powi(3) * I_PEAK / (2.0 * 299_792_458.0);
    let lib = rectified_polarization_peak(&MaterialParams::batio3(), &LaserParams::reference());
    assert!((lib / p - 1.0).abs() < 1e-14);
}

#[test]
fn printed_polarization_and_field() {
    let p = rectified_polarization_peak(&MaterialParams::batio3(), &LaserParams::reference());
    assert!((p / UC_PER_CM2 / 6.29e-2 - 1.0).abs() < 5e-3);
    let b = displacement_bmax(0.5 * UM, p, 100.0 * FS);
    assert!((b / GAUSS / 39.6 - 1.0).abs() < 5e-3, "{}", b / GAUSS);
}

#[test]
fn sheet_densities() {
    let s = sheet_density(26.0 * UC_PER_CM2) / PER_CM2;
    assert!((s / 1.6e14 - 1.0).abs() < 0.02);
    let s = sheet_density(6.29e-2 * UC_PER_CM2) / PER_CM2;
    assert!((s / 3.93e11 - 1.0).abs() < 2e-3);
    // the printed 3.93e12 is ten times this
    assert!((3.93e12 / s - 10.0).abs() < 0.02);
}

#[test]
fn b_profile_at_surface_is_half_the_headline_estimate() {
    let p = 0.37;
    let r = 0.5 * UM;
    let env = PulseEnvelope::rectangular(0.0, 100.0 * FS);
    let t = uniform_times(-200.0 * FS, 200.0 * FS, 400);
    let b = displacement_b_profile(r, p, &env, r, &t).unwrap();
    let peak = b.iter().map(|x| x.abs()).fold(0.0, f64::max);
    // the sampled edge rises by P over one central-difference span
    let dpdt = time_derivative(
        &t.iter().map(|&x| p * env.value(x)).collect::<Vec<_>>(),
        t[1] - t[0],
    );
    let jmax = dpdt.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let tau_edge = p / jmax;
    let ratio = peak / displacement_bmax(r, p, tau_edge);
    assert!((ratio - 0.5).abs() < 1e-6, "{ratio}");
}

#[test]
fn b_profile_integrates_to_zero() {
    for env in [
        PulseEnvelope::gaussian(5.0 * FS, 80.0 * FS),
        PulseEnvelope::rectangular(0.0, 100.0 * FS),
    ] {
        let t = uniform_times(-500.0 * FS, 500.0 * FS, 2001);
        let b = displacement_b_profile(1e-6, 1.0, &env, 3e-7, &t).unwrap();
        let dt = t[1] - t[0];
        let total: f64 = dt * (b.iter().sum::<f64>() - 0.5 * (b[0] + b[b.len() - 1]));
        let scale: f64 = dt * b.iter().map(|x| x.abs()).sum::<f64>();
        assert!(total.abs() < 1e-9 * scale);
    }
}

#[test]
fn thermal_polarization_reference() {
    let p = equilibrium_polarization(2.0, 1.0, 0.1).unwrap();
    let x: f64 = 9.274_010_078_3e-24 / (1.380_649e-23 * 0.1);
    assert!((p - x.tanh()).abs() < 1e-12);
    assert!((p - 0.999997).abs() < 5e-7);
}

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

proptest! {
    #[test]
    fn polarization_scalings(
        r in 1e-13f64..1e-9,
        n in 1.0f64..4.0,
        i_avg in 1e-4f64..1.0,
        d in 1e-7f64..1e-4,
        k in 0.1f64..10.0,
    ) {
        let m = MaterialParams { r, n, ..MaterialParams::batio3() };
        let l = LaserParams { i_avg, d, ..LaserParams::reference() };
        let p0 = rectified_polarization_peak(&m, &l);
        let pi = rectified_polarization_peak(&m, &LaserParams { i_avg: k * i_avg, ..l });
        prop_assert!(rel(pi, k * p0) < 1e-12);
        let pr = rectified_polarization_peak(&MaterialParams { r: k * r, ..m.clone() }, &l);
        prop_assert!(rel(pr, k * p0) < 1e-12);
        let pn = rectified_polarization_peak(&MaterialParams { n: k * n, ..m.clone() }, &l);
        prop_assert!(rel(pn, k.powi(3) * p0) < 1e-12);
        let pd = rectified_polarization_peak(&m, &LaserParams { d: k * d, ..l });
        prop_assert!(rel(pd, p0 / (k * k)) < 1e-12);
    }

    #[test]
    fn peak_intensity_is_separable(
        i_avg in 1e-4f64..1.0,
        d in 1e-7f64..1e-4,
        rep in 1e5f64..1e9,
        tau in 1e-15f64..1e-12,
    ) {
        let l = LaserParams { i_avg, d, rep_rate: rep, tau_opt: tau };
        let unit = LaserParams { i_avg: 1.0, d: 1.0, rep_rate: 1.0, tau_opt: 1.0 };
        let f = |p: LaserParams| peak_intensity(&p);
        let product = f(LaserParams { i_avg, ..unit })
            * f(LaserParams { d, ..unit })
            * f(LaserParams { rep_rate: rep, ..unit })
            * f(LaserParams { tau_opt: tau, ..unit })
            / f(unit).powi(3);
        prop_assert!(rel(f(l), product) < 1e-12);
    }

    #[test]
    fn thermal_polarization_properties(g in 0.5f64..3.0, b in 1e-3f64..10.0, t in 1e-3f64..10.0) {
        let p = equilibrium_polarization(g, b, t).unwrap();
        prop_assert!(p > 0.0 && p <= 1.0);
        prop_assert_eq!(equilibrium_polarization(g, -b, t).unwrap(), -p);
        prop_assert_eq!(equilibrium_polarization(g, 2.0 * b, 2.0 * t).unwrap(), p);
        prop_assert!(equilibrium_polarization(g, 1.1 * b, t).unwrap() >= p);
        prop_assert!(equilibrium_polarization(g, b, 1.1 * t).unwrap() <= p);
        // strictly inside (-1, 1) whenever tanh has not saturated in f64
        let x = 0.5 * g * MU_B * b / (K_B * t);
        if x < 18.0 {
            prop_assert!(p < 1.0);
        }
    }

    #[test]
    fn sheet_density_inverts_charge(sigma in 0.0f64..1e19) {
        let back = sheet_density(E_CHARGE * sigma);
        prop_assert!((back - sigma).abs() <= 1e-15 * sigma.max(1.0));
    }
}
