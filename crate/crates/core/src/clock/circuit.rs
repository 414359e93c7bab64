use nalgebra::DMatrix;
use num_complex::Complex;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::{Real, C};

/// The single non-trivial gate of one round, on row columns.
#[derive(Clone, Debug, PartialEq)]
pub struct Gate<T: Real> {
    pub qubits: Vec<usize>,
    pub matrix: DMatrix<C<T>>,
}

impl<T: Real> Gate<T> {
    pub fn new(qubits: Vec<usize>, matrix: DMatrix<C<T>>) -> Self {
        Gate { qubits, matrix }
    }

    pub fn from_real(qubits: Vec<usize>, rows: &[&[f64]]) -> Self {
        let d = rows.len();
        let m = DMatrix::from_fn(d, d, |i, j| Complex::new(T::lit(rows[i][j]), T::zero()));
        Gate { qubits, matrix: m }
    }

    pub fn x(q: usize) -> Self {
        Self::from_real(vec![q], &[&[0.0, 1.0], &[1.0, 0.0]])
    }

    pub fn hadamard(q: usize) -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self::from_real(vec![q], &[&[s, s], &[s, -s]])
    }

    /// `Z` phase gate: diag(1, -1).
    pub fn z(q: usize) -> Self {
        Self::from_real(vec![q], &[&[1.0, 0.0], &[0.0, -1.0]])
    }

    /// CNOT with `control` first in the matrix index.
    pub fn cnot(control: usize, target: usize) -> Self {
        // index = control + 2·target
        Self::from_real(
            vec![control, target],
            &[&[1.0, 0.0, 0.0, 0.0], &[0.0, 0.0, 0.0, 1.0], &[0.0, 0.0, 1.0, 0.0], &[0.0, 1.0, 0.0, 0.0]],
        )
    }
}

/// A circuit of `rounds.len()` rounds on rows of `row_len` qubits, one gate per round.
#[derive(Clone, Debug, PartialEq)]
pub struct CircuitIR<T: Real> {
    pub n_inputs: usize,
    pub row_len: usize,
    pub rounds: Vec<Gate<T>>,
}

impl<T: Real> CircuitIR<T> {
    pub fn new(n_inputs: usize, row_len: usize, rounds: Vec<Gate<T>>) -> Result<Self> {
        let c = CircuitIR { n_inputs, row_len, rounds };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::MalformedCircuit(m));
        if self.row_len == 0 || self.rounds.is_empty() {
            return bad("need at least one qubit per row and one round".into());
        }
        if self.n_inputs > self.row_len {
            return bad(format!("{} inputs on a row of {}", self.n_inputs, self.row_len));
        }
        for (r, g) in self.rounds.iter().enumerate() {
            let k = g.qubits.len();
            if k == 0 || k > 2 {
                return bad(format!("round {r}: a round holds one gate on 1 or 2 qubits, got {k}"));
            }
            if g.qubits.iter().any(|&q| q >= self.row_len) {
                return bad(format!("round {r}: qubit outside the row"));
            }
            if k == 2 && g.qubits[0].abs_diff(g.qubits[1]) != 1 {
                return bad(format!("round {r}: two-qubit gates must act on neighbouring columns"));
            }
            let d = 1 << k;
            if g.matrix.nrows() != d || g.matrix.ncols() != d {
                return bad(format!("round {r}: expected a {d}x{d} matrix"));
            }
            let err = (g.matrix.adjoint() * &g.matrix - DMatrix::identity(d, d))
                .iter()
                .fold(T::zero(), |s, c| s.max(c.norm_sqr().sqrt()));
            if err > T::lit(1e-10) {
                return bad(format!("round {r}: gate is not unitary (deviation {err})"));
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct RoundJson {
    gate_qubits: Vec<usize>,
    matrix_re: Vec<f64>,
    #[serde(default)]
    matrix_im: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct CircuitJson {
    n_inputs: usize,
    #[serde(rename = "N")]
    row_len: usize,
    rounds: Vec<RoundJson>,
}

impl<T: Real> Serialize for CircuitIR<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rounds = self
            .rounds
            .iter()
            .map(|g| {
                // Row-major flattening.
                let d = g.matrix.nrows();
                let mut re = Vec::with_capacity(d * d);
                let mut im = Vec::with_capacity(d * d);
                for i in 0..d {
                    for j in 0..d {
                        re.push(g.matrix[(i, j)].re.to_f64_lossy());
                        im.push(g.matrix[(i, j)].im.to_f64_lossy());
                    }
                }
                RoundJson { gate_qubits: g.qubits.clone(), matrix_re: re, matrix_im: im }
            })
            .collect();
        CircuitJson { n_inputs: self.n_inputs, row_len: self.row_len, rounds }.serialize(s)
    }
}

impl<'de, T: Real> Deserialize<'de> for CircuitIR<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = CircuitJson::deserialize(d)?;
        let mut rounds = Vec::with_capacity(j.rounds.len());
        for r in j.rounds {
            let dim = 1usize << r.gate_qubits.len().min(8);
            if r.matrix_re.len() != dim * dim || !(r.matrix_im.is_empty() || r.matrix_im.len() == dim * dim) {
                return Err(D::Error::custom(format!("gate on {:?} needs {} matrix entries", r.gate_qubits, dim * dim)));
            }
            let m = DMatrix::from_fn(dim, dim, |i, k| {
                let im = r.matrix_im.get(i * dim + k).copied().unwrap_or(0.0);
                Complex::new(T::lit(r.matrix_re[i * dim + k]), T::lit(im))
            });
            rounds.push(Gate { qubits: r.gate_qubits, matrix: m });
        }
        CircuitIR::new(j.n_inputs, j.row_len, rounds).map_err(D::Error::custom)
    }
}
