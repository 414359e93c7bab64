//! Circuit-to-Hamiltonian compilation with a snake-ordered unary clock.
//!
//! Computational qubit `(row r, column j)` has id `r·N + j`; clock qubit `c_t`
//! (`t = 1..T`) has id `M + t - 1`. Gate matrices index their qubits
//! least-significant first, like the rest of the crate.

mod circuit;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Point;
use crate::pauli::{Hamiltonian, DEFAULT_DENSE_CAP};
use crate::scalar::{Real, C};
use crate::spectral::hermitian_eigenvalues;

pub use circuit::{CircuitIR, Gate};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    /// The round's non-trivial gate.
    Gate,
    /// Identity on one qubit of the gate row.
    Identity,
    /// Clock tick whose qubit was already covered by a two-qubit gate.
    Idle,
    /// Swap between row `r` and row `r + 1`.
    Swap,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Real"))]
pub struct ClockStep<T: Real> {
    pub t: usize,
    pub kind: StepKind,
    /// Global ids, least-significant first in `matrix`.
    pub qubits: Vec<usize>,
    #[serde(skip)]
    pub matrix: DMatrix<C<T>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound(serialize = "T: Real"))]
pub struct ClockLayout<T: Real> {
    pub n_inputs: usize,
    pub row_len: usize,
    pub rounds: usize,
    pub num_computational: usize,
    pub num_clock: usize,
    pub coords: Vec<Point>,
    pub steps: Vec<ClockStep<T>>,
    /// Earliest cursor time on each computational qubit.
    pub t_q: Vec<usize>,
    pub q_out: usize,
    pub inputs: Vec<usize>,
    /// How `H_in` was formed where `c_{t_q-1}` or `c_{t_q+1}` does not exist.
    pub boundary_notes: Vec<String>,
}

impl<T: Real> ClockLayout<T> {
    pub fn num_qubits(&self) -> usize {
        self.num_computational + self.num_clock
    }

    pub fn clock(&self, t: usize) -> usize {
        self.num_computational + t - 1
    }

    /// Number of scheduled operations touching computational qubit `q`.
    pub fn operations_on(&self, q: usize) -> usize {
        self.steps.iter().filter(|s| s.qubits.contains(&q)).count()
    }

    /// Basis index of computational state `b` with clock at time `t`.
    pub fn legal_index(&self, b: u64, t: usize) -> u64 {
        b | (((1u64 << t) - 1) << self.num_computational)
    }

    /// Legal-clock basis, ordered by time then computational state.
    pub fn legal_basis(&self) -> Vec<u64> {
        let m = self.num_computational;
        (0..=self.num_clock)
            .flat_map(|t| (0..1u64 << m).map(move |b| (b, t)))
            .map(|(b, t)| self.legal_index(b, t))
            .collect()
    }

    /// Basis states whose clock register is not of the form `1^t 0^{T-t}`.
    pub fn illegal_basis(&self) -> Vec<u64> {
        let m = self.num_computational;
        let tt = self.num_clock;
        let legal: Vec<u64> = (0..=tt).map(|t| (1u64 << t) - 1).collect();
        let mut out = Vec::new();
        for clock in 0..1u64 << tt {
            if legal.contains(&clock) {
                continue;
            }
            for b in 0..1u64 << m {
                out.push(b | (clock << m));
            }
        }
        out
    }
}

/// Snake schedule: gate rounds left to right, swap rounds right to left.
pub fn layout_and_schedule<T: Real>(c: &CircuitIR<T>) -> Result<ClockLayout<T>> {
    c.validate()?;
    let n = c.row_len;
    let r = c.rounds.len();
    let m = r * n;
    let tt = (2 * r - 1) * n;
    let id = |row: usize, col: usize| row * n + col;
    let eye = |k: usize| DMatrix::<C<T>>::identity(1 << k, 1 << k);

    let mut coords = Vec::with_capacity(m + tt);
    for row in 0..r {
        for col in 0..n {
            coords.push(Point::new(2.0 * col as f64, 2.0 * row as f64));
        }
    }
    let mut steps = Vec::with_capacity(tt);
    let mut clock_coords = Vec::with_capacity(tt);
    let mut t_q = vec![0usize; m];
    for (row, gate) in c.rounds.iter().enumerate() {
        let lo = *gate.qubits.iter().min().unwrap();
        for col in 0..n {
            let t = steps.len() + 1;
            let step = if col == lo {
                ClockStep {
                    t,
                    kind: StepKind::Gate,
                    qubits: gate.qubits.iter().map(|&j| id(row, j)).collect(),
                    matrix: gate.matrix.clone(),
                }
            } else if gate.qubits.contains(&col) {
                ClockStep { t, kind: StepKind::Idle, qubits: vec![], matrix: eye(0) }
            } else {
                ClockStep { t, kind: StepKind::Identity, qubits: vec![id(row, col)], matrix: eye(1) }
            };
            if row == 0 {
                for &q in &step.qubits {
                    t_q[q] = t;
                }
            }
            clock_coords.push(Point::new(2.0 * col as f64, 2.0 * row as f64 + 0.5));
            steps.push(step);
        }
        if row + 1 == r {
            break;
        }
        for col in (0..n).rev() {
            let t = steps.len() + 1;
            t_q[id(row + 1, col)] = t;
            let mut swap = DMatrix::from_element(4, 4, Complex::new(T::zero(), T::zero()));
            for (a, b) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
                swap[(a, b)] = Complex::new(T::one(), T::zero());
            }
            steps.push(ClockStep { t, kind: StepKind::Swap, qubits: vec![id(row, col), id(row + 1, col)], matrix: swap });
            clock_coords.push(Point::new(2.0 * col as f64, 2.0 * row as f64 + 1.0));
        }
    }
    coords.extend(clock_coords);
    let mut boundary_notes = Vec::new();
    for (q, &t) in t_q.iter().enumerate() {
        if q < c.n_inputs {
            continue;
        }
        if t == 1 || t == tt {
            boundary_notes.push(format!(
                "qubit {q}: t_q = {t}, H_in uses clock window {:?}",
                clock_window(t, tt)
            ));
        }
    }
    Ok(ClockLayout {
        n_inputs: c.n_inputs,
        row_len: n,
        rounds: r,
        num_computational: m,
        num_clock: tt,
        coords,
        steps,
        t_q,
        q_out: m - 1,
        inputs: (0..c.n_inputs).collect(),
        boundary_notes,
    })
}

/// Clock times `t-1, t, t+1` clipped to `1..=T`.
fn clock_window(t: usize, tt: usize) -> Vec<usize> {
    (t.saturating_sub(1).max(1)..=(t + 1).min(tt)).collect()
}

/// Bit pattern of the clock window at time `time` (number of ones so far).
fn window_bits(window: &[usize], time: usize) -> usize {
    window.iter().enumerate().filter(|(_, &s)| s <= time).fold(0, |acc, (k, _)| acc | (1 << k))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct ClockHamiltonian<T> {
    pub h_in: Hamiltonian<T>,
    pub h_out: Hamiltonian<T>,
    pub h_clock: Hamiltonian<T>,
    /// `H_evolv(t)` for `t = 1..T`.
    pub h_evolv: Vec<Hamiltonian<T>>,
    /// `H_in + H_out + H_clock + ½ Σ H_evolv(t)`.
    pub total: Hamiltonian<T>,
}

fn projector<T: Real>(n: usize, q: usize, one: bool) -> Hamiltonian<T> {
    let e = Hamiltonian::excitation(n, q, T::one());
    if one {
        e
    } else {
        Hamiltonian::identity(n, T::one()).sub(&e)
    }
}

fn product<T: Real>(n: usize, factors: &[(usize, bool)]) -> Hamiltonian<T> {
    factors
        .iter()
        .fold(Hamiltonian::identity(n, T::one()), |acc, &(q, b)| acc.jordan(&projector(n, q, b)))
}

pub fn build_h5<T: Real>(layout: &ClockLayout<T>) -> Result<ClockHamiltonian<T>> {
    let n = layout.num_qubits();
    let tt = layout.num_clock;
    let mut h_in = Hamiltonian::zero(n);
    for q in 0..layout.num_computational {
        if layout.inputs.contains(&q) {
            continue;
        }
        let t = layout.t_q[q];
        let window = clock_window(t, tt);
        let bits = window_bits(&window, t - 1);
        let mut factors = vec![(q, true)];
        for (k, &s) in window.iter().enumerate() {
            factors.push((layout.clock(s), bits >> k & 1 == 1));
        }
        h_in = h_in.add(&product(n, &factors));
    }
    let h_out = product(n, &[(layout.q_out, false), (layout.clock(tt), true)]);
    let mut h_clock = Hamiltonian::zero(n);
    for t in 1..tt {
        h_clock = h_clock.add(&product(n, &[(layout.clock(t), false), (layout.clock(t + 1), true)]));
    }
    let mut h_evolv = Vec::with_capacity(tt);
    for step in &layout.steps {
        h_evolv.push(evolv_term(layout, step)?);
    }
    let half = T::lit(0.5);
    let total = h_evolv
        .iter()
        .fold(h_in.add(&h_out).add(&h_clock), |acc, e| acc.add(&e.scale(half)));
    Ok(ClockHamiltonian { h_in, h_out, h_clock, h_evolv, total })
}

fn evolv_term<T: Real>(layout: &ClockLayout<T>, step: &ClockStep<T>) -> Result<Hamiltonian<T>> {
    let t = step.t;
    let window = clock_window(t, layout.num_clock);
    let k = step.qubits.len();
    let before = window_bits(&window, t - 1);
    let after = window_bits(&window, t);
    let dim = 1usize << (k + window.len());
    let du = 1usize << k;
    let zero = Complex::new(T::zero(), T::zero());
    let one = Complex::new(T::one(), T::zero());
    let mut m = DMatrix::from_element(dim, dim, zero);
    for a in 0..du {
        m[(a | before << k, a | before << k)] += one;
        m[(a | after << k, a | after << k)] += one;
        for b in 0..du {
            let u = step.matrix[(a, b)];
            m[(a | after << k, b | before << k)] -= u;
            m[(b | before << k, a | after << k)] -= u.conj();
        }
    }
    let mut support = step.qubits.clone();
    support.extend(window.iter().map(|&s| layout.clock(s)));
    Hamiltonian::from_local_matrix(layout.num_qubits(), &support, &m)
}

/// Apply a local operator on `qubits` (least-significant first) to a state on `num` qubits.
fn apply_local<T: Real>(state: &DVector<C<T>>, qubits: &[usize], u: &DMatrix<C<T>>) -> DVector<C<T>> {
    let mut out = DVector::from_element(state.len(), Complex::new(T::zero(), T::zero()));
    let mask: usize = qubits.iter().map(|&q| 1usize << q).sum();
    for (i, &amp) in state.iter().enumerate() {
        if amp == Complex::new(T::zero(), T::zero()) {
            continue;
        }
        let local_in = qubits.iter().enumerate().fold(0, |acc, (k, &q)| acc | ((i >> q & 1) << k));
        let rest = i & !mask;
        for local_out in 0..u.nrows() {
            let c = u[(local_out, local_in)];
            if c == Complex::new(T::zero(), T::zero()) {
                continue;
            }
            let j = qubits.iter().enumerate().fold(rest, |acc, (k, &q)| acc | ((local_out >> k & 1) << q));
            out[j] += c * amp;
        }
    }
    out
}

/// Circuit states `ξ_0 .. ξ_T` on the computational register.
pub fn circuit_states<T: Real>(layout: &ClockLayout<T>, witness: &[C<T>]) -> Result<Vec<DVector<C<T>>>> {
    let m = layout.num_computational;
    if m > 24 {
        return Err(Error::DenseDimensionExceeded { num_qubits: m, cap: 24 });
    }
    if witness.len() != 1 << layout.n_inputs {
        return Err(Error::DimensionMismatch { expected: 1 << layout.n_inputs, found: witness.len() });
    }
    let norm = witness.iter().fold(T::zero(), |s, c| s + c.norm_sqr()).sqrt();
    if (norm - T::one()).abs() > T::lit(1e-10) {
        return Err(Error::InvalidParameter(format!("witness norm {norm} is not 1")));
    }
    // Inputs are the lowest qubit ids, so the witness index is the low part of the basis index.
    let mut xi = DVector::from_element(1 << m, Complex::new(T::zero(), T::zero()));
    for (i, &c) in witness.iter().enumerate() {
        xi[i] = c;
    }
    let mut out = vec![xi.clone()];
    for s in &layout.steps {
        xi = apply_local(&xi, &s.qubits, &s.matrix);
        out.push(xi.clone());
    }
    Ok(out)
}

/// History state in the legal-clock basis of [`ClockLayout::legal_basis`].
pub fn history_state_legal<T: Real>(layout: &ClockLayout<T>, witness: &[C<T>]) -> Result<DVector<C<T>>> {
    let xs = circuit_states(layout, witness)?;
    let per = 1usize << layout.num_computational;
    let scale = T::one() / T::lit((layout.num_clock + 1) as f64).sqrt();
    let mut v = DVector::from_element(per * xs.len(), Complex::new(T::zero(), T::zero()));
    for (t, xi) in xs.iter().enumerate() {
        for (b, &c) in xi.iter().enumerate() {
            v[t * per + b] = c * scale;
        }
    }
    Ok(v)
}

/// History state on the full register (dense; limited by `cap` qubits).
pub fn history_state<T: Real>(layout: &ClockLayout<T>, witness: &[C<T>], cap: usize) -> Result<DVector<C<T>>> {
    let n = layout.num_qubits();
    if n > cap {
        return Err(Error::DenseDimensionExceeded { num_qubits: n, cap });
    }
    let legal = history_state_legal(layout, witness)?;
    let mut v = DVector::from_element(1 << n, Complex::new(T::zero(), T::zero()));
    for (k, &i) in layout.legal_basis().iter().enumerate() {
        v[i as usize] = legal[k];
    }
    Ok(v)
}

/// Probability that `q_out` reads 1 at the end of the circuit.
pub fn accept_probability<T: Real>(layout: &ClockLayout<T>, witness: &[C<T>]) -> Result<T> {
    let xs = circuit_states(layout, witness)?;
    let last = xs.last().unwrap();
    Ok(last
        .iter()
        .enumerate()
        .filter(|(i, _)| i >> layout.q_out & 1 == 1)
        .fold(T::zero(), |s, (_, c)| s + c.norm_sqr()))
}

fn expectation<T: Real>(h: &Hamiltonian<T>, basis: &[u64], v: &DVector<C<T>>) -> T {
    let (m, _) = h.matrix_in_basis(basis);
    (v.adjoint() * m * v)[(0, 0)].re
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lemma1Report {
    pub num_computational: usize,
    pub num_clock: usize,
    pub legal_dim: usize,
    pub accept_probability: f64,
    pub accepting: bool,
    /// Lowest eigenvalue on the legal-clock space.
    pub lambda_legal: f64,
    /// Lowest eigenvalue on the illegal-clock space, when it was small enough to build.
    pub illegal_min: Option<f64>,
    pub lambda: f64,
    pub lambda_t3: f64,
    pub history_energy: f64,
    /// Energy of the history state under `H_in + H_clock + ½ΣH_evolv`.
    pub history_energy_without_out: f64,
    /// Largest weight `H⁽⁵⁾` sends from a legal basis state out of the legal space.
    pub legal_leak: f64,
    pub yes_bound: f64,
    pub passed: bool,
    pub failures: Vec<String>,
}

/// Numerical check of the YES/NO energy separation.
///
/// `illegal_dim_cap` bounds the size of the illegal-clock block that is diagonalized.
pub fn lemma1_check<T: Real>(
    layout: &ClockLayout<T>,
    witness: &[C<T>],
    illegal_dim_cap: usize,
) -> Result<Lemma1Report> {
    let ham = build_h5(layout)?;
    let legal = layout.legal_basis();
    let (m_legal, leak) = ham.total.matrix_in_basis(&legal);
    let lambda_legal = hermitian_eigenvalues(&m_legal)[0];
    let illegal_dim = (1usize << layout.num_computational) * ((1usize << layout.num_clock) - layout.num_clock - 1);
    let illegal_min = if illegal_dim > 0 && illegal_dim <= illegal_dim_cap {
        let (mi, _) = ham.total.matrix_in_basis(&layout.illegal_basis());
        Some(hermitian_eigenvalues(&mi)[0])
    } else {
        None
    };
    let lambda = match illegal_min {
        Some(x) => lambda_legal.min(x),
        None => lambda_legal,
    };
    let psi = history_state_legal(layout, witness)?;
    let history_energy = expectation(&ham.total, &legal, &psi);
    let rest = ham.total.sub(&ham.h_out);
    let history_energy_without_out = expectation(&rest, &legal, &psi);
    let p = accept_probability(layout, witness)?;
    let accepting = p > T::lit(0.5);
    let tt = T::lit(layout.num_clock as f64);
    let yes_bound = (T::one() - p) / (tt + T::one());
    let mut failures = Vec::new();
    let tol = T::lit(1e-10);
    if leak > tol {
        failures.push(format!("H⁽⁵⁾ leaks {leak} out of the legal clock space"));
    }
    if history_energy_without_out.abs() > T::lit(1e-12) {
        failures.push(format!("history state energy {history_energy_without_out} without H_out"));
    }
    if accepting {
        if lambda > yes_bound + tol {
            failures.push(format!("YES instance λ = {lambda} above (1-p)/(T+1) = {yes_bound}"));
        }
    } else if !(lambda > T::zero()) {
        failures.push(format!("NO instance λ = {lambda} not positive"));
    }
    if let Some(x) = illegal_min {
        if x < T::one() - tol {
            failures.push(format!("illegal clock sector reaches {x} < 1"));
        }
    }
    let f = |x: T| x.to_f64_lossy();
    Ok(Lemma1Report {
        num_computational: layout.num_computational,
        num_clock: layout.num_clock,
        legal_dim: legal.len(),
        accept_probability: f(p),
        accepting,
        lambda_legal: f(lambda_legal),
        illegal_min: illegal_min.map(f),
        lambda: f(lambda),
        lambda_t3: f(lambda * tt * tt * tt),
        history_energy: f(history_energy),
        history_energy_without_out: f(history_energy_without_out),
        legal_leak: f(leak),
        yes_bound: f(yes_bound),
        passed: failures.is_empty(),
        failures,
    })
}

/// Default illegal-sector size used by [`lemma1_check`] callers.
pub const ILLEGAL_DIM_CAP: usize = 1 << 10;

/// Dense cap used when building full-register history states.
pub const HISTORY_CAP: usize = DEFAULT_DENSE_CAP;
