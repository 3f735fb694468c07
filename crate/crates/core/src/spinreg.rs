//! Dense state-vector simulation of an n-spin register driven only by
//! pairwise exchange gates.
//!
//! Basis convention: little-endian, qubit 0 is the least significant bit
//! of the basis index, and a 0 bit is spin up (`S_z = +1/2`).

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exchange::{exchange_unitary, Gate4};

pub const MAX_QUBITS: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct SpinState {
    n: usize,
    amplitudes: Vec<C64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExchangeEvent {
    pub i: usize,
    pub j: usize,
    pub theta: f64,
}

impl ExchangeEvent {
    pub fn new(i: usize, j: usize, theta: f64) -> Self {
        ExchangeEvent { i, j, theta }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.i == self.j {
            return Err(Error::InvalidPair(format!(
                "qubit {} paired with itself",
                self.i
            )));
        }
        for q in [self.i, self.j] {
            if q >= n {
                return Err(Error::QubitIndex { index: q, n });
            }
        }
        if !self.theta.is_finite() {
            return Err(Error::invalid("theta", "must be finite"));
        }
        Ok(())
    }
}

/// Expectation values after one step of [`run_sequence`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    pub norm: f64,
    pub sz_total: f64,
    pub s2_total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinExpectations {
    pub sz: Vec<f64>,
    pub sz_total: f64,
    pub s2_total: f64,
}

#[derive(Serialize, Deserialize)]
struct StateFile {
    n: usize,
    amplitudes: Vec<[f64; 2]>,
}

impl SpinState {
    fn check_n(n: usize) -> Result<()> {
        if !(2..=MAX_QUBITS).contains(&n) {
            return Err(Error::invalid(
                "n",
                format!("register size must be in 2..={MAX_QUBITS}, got {n}"),
            ));
        }
        Ok(())
    }

    /// Computational basis state; bit `q` of `bits` set means qubit `q` is down.
    pub fn basis(n: usize, bits: usize) -> Result<Self> {
        Self::check_n(n)?;
        if bits >= 1 << n {
            return Err(Error::invalid(
                "bits",
                format!("{bits} is not an {n}-qubit basis index"),
            ));
        }
        let mut amplitudes = vec![C64::new(0.0, 0.0); 1 << n];
        amplitudes[bits] = C64::new(1.0, 0.0);
        Ok(SpinState { n, amplitudes })
    }

    pub fn all_up(n: usize) -> Result<Self> {
        Self::basis(n, 0)
    }

    /// Builds a state from spins listed qubit 0 first; `true` is up.
    pub fn from_spins(spins: &[bool]) -> Result<Self> {
        let bits = spins
            .iter()
            .enumerate()
            .filter(|(_, &up)| !up)
            .map(|(q, _)| 1 << q)
            .sum();
        Self::basis(spins.len(), bits)
    }

    /// Normalizes `amplitudes`; the length must be a power of two.
    pub fn from_amplitudes(amplitudes: Vec<C64>) -> Result<Self> {
        let len = amplitudes.len();
        if !len.is_power_of_two() {
            return Err(Error::invalid(
                "amplitudes",
                format!("length {len} is not a power of two"),
            ));
        }
        let n = len.trailing_zeros() as usize;
        Self::check_n(n)?;
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::invalid(
                "amplitudes",
                "state has zero or non-finite norm",
            ));
        }
        let s = 1.0 / norm.sqrt();
        Ok(SpinState {
            n,
            amplitudes: amplitudes.into_iter().map(|a| a * s).collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn inner(&self, other: &SpinState) -> C64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|<self|other>|^2`, insensitive to global phase.
    pub fn fidelity(&self, other: &SpinState) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// Applies a two-spin gate to qubits `(i, j)`; `i` is the low local bit.
    pub fn apply_gate(&mut self, i: usize, j: usize, gate: &Gate4) -> Result<()> {
        ExchangeEvent::new(i, j, 0.0).validate(self.n)?;
        let (bi, bj) = (1usize << i, 1usize << j);
        for base in 0..self.amplitudes.len() {
            if base & (bi | bj) != 0 {
                continue;
            }
            let idx = [base, base | bi, base | bj, base | bi | bj];
            let v = [
                self.amplitudes[idx[0]],
                self.amplitudes[idx[1]],
                self.amplitudes[idx[2]],
                self.amplitudes[idx[3]],
            ];
            let w = gate.apply(&v);
            for (k, &p) in idx.iter().enumerate() {
                self.amplitudes[p] = w[k];
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(StateFile {
            n: self.n,
            amplitudes: self.amplitudes.iter().map(|a| [a.re, a.im]).collect(),
        })
        .expect("state serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let f: StateFile = serde_json::from_value(value.clone())
            .map_err(|e| Error::invalid("state", format!("malformed state JSON: {e}")))?;
        if f.amplitudes.len() != 1 << f.n.min(63) {
            return Err(Error::invalid(
                "state",
                format!("{} amplitudes for n = {}", f.amplitudes.len(), f.n),
            ));
        }
        Self::from_amplitudes(
            f.amplitudes
                .into_iter()
                .map(|[re, im]| C64::new(re, im))
                .collect(),
        )
    }
}

/// Applies `exp(-i theta S_i . S_j)` to the register.
pub fn apply_exchange(state: &SpinState, ev: &ExchangeEvent) -> Result<SpinState> {
    ev.validate(state.n)?;
    let mut out = state.clone();
    out.apply_gate(ev.i, ev.j, &exchange_unitary(ev.theta))?;
    Ok(out)
}

/// Moves the content of `path[0]` to `path[last]` by swapping along
/// consecutive pairs of the path.
pub fn route_swap(state: &SpinState, path: &[usize]) -> Result<(SpinState, Vec<ExchangeEvent>)> {
    if path.len() < 2 {
        return Err(Error::InvalidPair(
            "a routing path needs at least two qubits".into(),
        ));
    }
    for (k, q) in path.iter().enumerate() {
        if path[..k].contains(q) {
            return Err(Error::InvalidPair(format!(
                "qubit {q} appears twice in the routing path"
            )));
        }
    }
    let events: Vec<ExchangeEvent> = path
        .windows(2)
        .map(|w| ExchangeEvent::new(w[0], w[1], std::f64::consts::PI))
        .collect();
    let (s, _) = run_sequence(state, &events)?;
    Ok((s, events))
}

/// Applies `events` left to right, recording norm and total-spin
/// expectations after every step.
pub fn run_sequence(
    state: &SpinState,
    events: &[ExchangeEvent],
) -> Result<(SpinState, Vec<StepRecord>)> {
    for ev in events {
        ev.validate(state.n)?;
    }
    let mut s = state.clone();
    let mut log = Vec::with_capacity(events.len() + 1);
    let record = |step: usize, s: &SpinState| {
        let e = spin_expectations(s);
        StepRecord {
            step,
            norm: s.norm(),
            sz_total: e.sz_total,
            s2_total: e.s2_total,
        }
    };
    log.push(record(0, &s));
    for (k, ev) in events.iter().enumerate() {
        s.apply_gate(ev.i, ev.j, &exchange_unitary(ev.theta))?;
        log.push(record(k + 1, &s));
    }
    Ok((s, log))
}

/// Per-qubit `<S_z>`, total `<S_z>` and `<S^2>` (hbar = 1).
pub fn spin_expectations(state: &SpinState) -> SpinExpectations {
    let n = state.n;
    let mut sz = vec![0.0; n];
    let mut sz_total = 0.0;
    let mut sz2 = 0.0;
    for (b, a) in state.amplitudes.iter().enumerate() {
        let p = a.norm_sqr();
        let down = b.count_ones() as f64;
        let m = 0.5 * (n as f64 - 2.0 * down);
        sz_total += p * m;
        sz2 += p * m * m;
        for (q, s) in sz.iter_mut().enumerate() {
            *s += if b & (1 << q) == 0 { 0.5 * p } else { -0.5 * p };
        }
    }
    // S^2 = S_- S_+ + S_z^2 + S_z and <S_- S_+> = |S_+ psi|^2
    let mut raised = vec![C64::new(0.0, 0.0); state.amplitudes.len()];
    for (b, a) in state.amplitudes.iter().enumerate() {
        for q in 0..n {
            if b & (1 << q) != 0 {
                raised[b & !(1 << q)] += a;
            }
        }
    }
    let plus: f64 = raised.iter().map(|a| a.norm_sqr()).sum();
    SpinExpectations {
        sz,
        sz_total,
        s2_total: plus + sz2 + sz_total,
    }
}
