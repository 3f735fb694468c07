use std::f64::consts::PI;

use ferrogate::exchange::*;
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn pi_is_swap_up_to_phase() {
    let want = Gate4::swap().scale(C64::from_polar(1.0, -PI / 4.0));
    let u = exchange_unitary(PI);
    for r in 0..4 {
        for c in 0..4 {
            assert!((u.0[r][c] - want.0[r][c]).norm() < 1e-12);
        }
    }
    assert!((gate_fidelity(&Gate4::swap(), &u) - 1.0).abs() < 1e-12);
}

#[test]
fn two_pi_is_minus_i() {
    let u = exchange_unitary(2.0 * PI);
    assert!(u.max_abs_diff(&Gate4::identity().scale(C64::new(0.0, -1.0))) < 1e-12);
}

#[test]
fn half_pi_squares_to_swap() {
    let r = exchange_unitary(PI / 2.0);
    assert!(((r * r).max_abs_diff(&exchange_unitary(PI))) < 1e-12);
}

#[test]
fn one_parameter_group_over_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let a: f64 = rng.random_range(-4.0 * PI..4.0 * PI);
        let b: f64 = rng.random_range(-4.0 * PI..4.0 * PI);
        let lhs = exchange_unitary(a) * exchange_unitary(b);
        assert!(
            lhs.max_abs_diff(&exchange_unitary(a + b)) < 1e-12,
            "{a} {b}"
        );
    }
}

#[test]
fn spin_dot_spectrum() {
    // triplet states |uu>, (|ud>+|du>)/sqrt2, |dd> and the singlet
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let z = C64::new(0.0, 0.0);
    let o = C64::new(1.0, 0.0);
    let h = C64::new(s, 0.0);
    let sd = spin_dot();
    for (v, e) in [
        ([o, z, z, z], 0.25),
        ([z, h, h, z], 0.25),
        ([z, z, z, o], 0.25),
        ([z, h, -h, z], -0.75),
    ] {
        let w = sd.apply(&v);
        for k in 0..4 {
            assert!((w[k] - v[k] * e).norm() < 1e-15);
        }
    }
}

fn gate_close(a: &Gate4, b: &Gate4) -> bool {
    a.max_abs_diff(b) < 1e-12
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn group_property(a in -20.0f64..20.0, b in -20.0f64..20.0) {
        prop_assert!(gate_close(&(exchange_unitary(a) * exchange_unitary(b)), &exchange_unitary(a + b)));
    }

    #[test]
    fn conserves_total_spin(theta in -20.0f64..20.0) {
        let u = exchange_unitary(theta);
        for op in [total_sz(), total_s2()] {
            prop_assert!(gate_close(&(u * op), &(op * u)));
        }
        prop_assert!(gate_close(&(u.adjoint() * u), &Gate4::identity()));
    }

    #[test]
    fn inverse_is_negated_angle(theta in -20.0f64..20.0) {
        prop_assert!(gate_close(&exchange_unitary(-theta), &exchange_unitary(theta).adjoint()));
    }

    #[test]
    fn fidelity_is_phase_blind(theta in -20.0f64..20.0, phi in -10.0f64..10.0) {
        let u = exchange_unitary(theta);
        let f = gate_fidelity(&u, &u.scale(C64::from_polar(1.0, phi)));
        prop_assert!((f - 1.0).abs() < 1e-12);
        let g = gate_fidelity(&Gate4::swap(), &u);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&g));
    }
}
