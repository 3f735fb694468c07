use std::ops::Mul;

use num_complex::Complex64 as C64;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Two-spin operator in the basis `|b_i b_j>` with local index
/// `b_i + 2 b_j`; bit 0 is spin up.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gate4(pub [[C64; 4]; 4]);

impl Gate4 {
    pub fn zero() -> Self {
        Gate4([[ZERO; 4]; 4])
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        for i in 0..4 {
            m.0[i][i] = ONE;
        }
        m
    }

    pub fn swap() -> Self {
        let mut m = Self::zero();
        m.0[0][0] = ONE;
        m.0[1][2] = ONE;
        m.0[2][1] = ONE;
        m.0[3][3] = ONE;
        m
    }

    /// Tensor product `a (x) b` with `a` acting on the low bit.
    pub fn kron(low: &[[C64; 2]; 2], high: &[[C64; 2]; 2]) -> Self {
        let mut m = Self::zero();
        for r in 0..4 {
            for c in 0..4 {
                m.0[r][c] = low[r & 1][c & 1] * high[r >> 1][c >> 1];
            }
        }
        m
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut m = *self;
        m.0.iter_mut().flatten().for_each(|x| *x *= s);
        m
    }

    pub fn add(&self, other: &Gate4) -> Self {
        let mut m = *self;
        for r in 0..4 {
            for c in 0..4 {
                m.0[r][c] += other.0[r][c];
            }
        }
        m
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zero();
        for r in 0..4 {
            for c in 0..4 {
                m.0[r][c] = self.0[c][r].conj();
            }
        }
        m
    }

    pub fn trace(&self) -> C64 {
        (0..4).map(|i| self.0[i][i]).sum()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Gate4) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn apply(&self, v: &[C64; 4]) -> [C64; 4] {
        let mut out = [ZERO; 4];
        for (r, o) in out.iter_mut().enumerate() {
            *o = (0..4).map(|c| self.0[r][c] * v[c]).sum();
        }
        out
    }
}

impl Mul for Gate4 {
    type Output = Gate4;

    fn mul(self, rhs: Gate4) -> Gate4 {
        let mut m = Gate4::zero();
        for r in 0..4 {
            for c in 0..4 {
                m.0[r][c] = (0..4).map(|k| self.0[r][k] * rhs.0[k][c]).sum();
            }
        }
        m
    }
}

fn pauli() -> [[[C64; 2]; 2]; 3] {
    let i = C64::new(0.0, 1.0);
    [
        [[ZERO, ONE], [ONE, ZERO]],
        [[ZERO, -i], [i, ZERO]],
        [[ONE, ZERO], [ZERO, -ONE]],
    ]
}

/// `S1 . S2` for two spin-1/2 particles (hbar = 1).
pub fn spin_dot() -> Gate4 {
    let p = pauli();
    let mut m = Gate4::zero();
    for s in &p {
        m = m.add(&Gate4::kron(s, s));
    }
    m.scale(C64::new(0.25, 0.0))
}

/// Total `S_z` of the pair.
pub fn total_sz() -> Gate4 {
    let p = pauli();
    let id = [[ONE, ZERO], [ZERO, ONE]];
    Gate4::kron(&p[2], &id)
        .add(&Gate4::kron(&id, &p[2]))
        .scale(C64::new(0.5, 0.0))
}

/// Total `S^2 = 3/2 + 2 S1 . S2` of the pair.
pub fn total_s2() -> Gate4 {
    Gate4::identity()
        .scale(C64::new(1.5, 0.0))
        .add(&spin_dot().scale(C64::new(2.0, 0.0)))
}

/// `exp(-i theta S1 . S2)` from the spectral decomposition of `S1 . S2`:
/// eigenvalue +1/4 on the triplet, -3/4 on the singlet.
pub fn exchange_unitary(theta: f64) -> Gate4 {
    let sd = spin_dot();
    let id = Gate4::identity();
    let p_triplet = sd.add(&id.scale(C64::new(0.75, 0.0)));
    let p_singlet = id
        .scale(C64::new(0.25, 0.0))
        .add(&sd.scale(C64::new(-1.0, 0.0)));
    p_triplet
        .scale(C64::from_polar(1.0, -0.25 * theta))
        .add(&p_singlet.scale(C64::from_polar(1.0, 0.75 * theta)))
}

/// Phase-insensitive gate fidelity `|Tr(U_ideal^dagger U_actual)| / 4`.
pub fn gate_fidelity(ideal: &Gate4, actual: &Gate4) -> f64 {
    (ideal.adjoint() * *actual).trace().norm() / 4.0
}
