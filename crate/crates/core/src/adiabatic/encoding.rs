//! Three-qubit encoding of the six-state particle used by adiabatic constructions.
//!
//! Two phase qubits select unborn, first, second or dead; the third carries the
//! computational bit, held at 0 while unborn or dead. Kets list `qubits[0]` first.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{Axis, Hamiltonian, PauliString};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParticleState {
    Unborn,
    First(bool),
    Second(bool),
    Dead,
}

/// Each legal particle state and its three bits.
pub const PARTICLE_ENCODING: [(ParticleState, [bool; 3]); 6] = [
    (ParticleState::Unborn, [false, false, false]),
    (ParticleState::First(false), [false, true, false]),
    (ParticleState::First(true), [false, true, true]),
    (ParticleState::Second(false), [true, false, false]),
    (ParticleState::Second(true), [true, false, true]),
    (ParticleState::Dead, [true, true, false]),
];

/// The two bit patterns outside the encoding.
pub const FORBIDDEN_STATES: [[bool; 3]; 2] = [[false, false, true], [true, true, true]];

impl ParticleState {
    pub fn bits(self) -> [bool; 3] {
        PARTICLE_ENCODING.iter().find(|(s, _)| *s == self).map(|(_, b)| *b).unwrap()
    }

    pub fn decode(bits: [bool; 3]) -> Option<ParticleState> {
        PARTICLE_ENCODING.iter().find(|(_, b)| *b == bits).map(|(s, _)| *s)
    }
}

/// `|b⟩⟨b|` on three qubits, as a sum of Z strings.
fn projector<T: Real>(n: usize, qubits: [usize; 3], bits: [bool; 3]) -> Result<Hamiltonian<T>> {
    let mut h = Hamiltonian::identity(n, T::one());
    for (q, b) in qubits.into_iter().zip(bits) {
        let sign = if b { -T::one() } else { T::one() };
        let factor = Hamiltonian::from_terms(
            n,
            [(T::lit(0.5), PauliString::identity()), (sign * T::lit(0.5), PauliString::single(q, Axis::Z))],
        )?;
        h = h.jordan(&factor);
    }
    Ok(h)
}

/// `weight · (|001⟩⟨001| + |111⟩⟨111|)` on `qubits`, lifting the non-particle states.
pub fn forbidden_penalty<T: Real>(n: usize, qubits: [usize; 3], weight: T) -> Result<Hamiltonian<T>> {
    if let Some(&q) = qubits.iter().find(|&&q| q >= n) {
        return Err(Error::InvalidParameter(format!("qubit {q} outside a register of {n}")));
    }
    if qubits[0] == qubits[1] || qubits[1] == qubits[2] || qubits[0] == qubits[2] {
        return Err(Error::InvalidParameter(format!("repeated qubit in {qubits:?}")));
    }
    let mut h = Hamiltonian::zero(n);
    for bits in FORBIDDEN_STATES {
        h = h.add(&projector(n, qubits, bits)?);
    }
    Ok(h.scale(weight))
}
