//! Real-weighted sums of Pauli strings.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::string::{Axis, PauliString};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliTerm<T> {
    pub coeff: T,
    #[serde(rename = "paulis")]
    pub string: PauliString,
}

impl<T: Real> PauliTerm<T> {
    pub fn new(coeff: T, string: PauliString) -> Self {
        Self { coeff, string }
    }
}

/// Canonical Pauli sum: strings unique, sorted, no negligible coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct Hamiltonian<T> {
    num_qubits: usize,
    terms: Vec<PauliTerm<T>>,
}

fn check_support(num_qubits: usize, s: &PauliString) -> Result<()> {
    match s.max_qubit() {
        Some(q) if q >= num_qubits => Err(Error::DimensionMismatch {
            expected: num_qubits,
            found: q + 1,
        }),
        _ => Ok(()),
    }
}

impl<T: Real> Hamiltonian<T> {
    pub fn zero(num_qubits: usize) -> Self {
        Self {
            num_qubits,
            terms: Vec::new(),
        }
    }

    /// Canonical sum of the given terms using the default threshold.
    pub fn from_terms<I>(num_qubits: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (T, PauliString)>,
    {
        Self::from_terms_with(num_qubits, terms, T::lit(T::CANON_THRESHOLD))
    }

    pub fn from_terms_with<I>(num_qubits: usize, terms: I, threshold: T) -> Result<Self>
    where
        I: IntoIterator<Item = (T, PauliString)>,
    {
        let mut acc: BTreeMap<PauliString, T> = BTreeMap::new();
        for (c, s) in terms {
            if !c.is_finite() {
                return Err(Error::InvalidParameter(format!("non-finite coefficient on {s}")));
            }
            check_support(num_qubits, &s)?;
            *acc.entry(s).or_insert_with(T::zero) += c;
        }
        Ok(Self::from_map(num_qubits, acc, threshold))
    }

    fn from_map(num_qubits: usize, acc: BTreeMap<PauliString, T>, threshold: T) -> Self {
        let terms = acc
            .into_iter()
            .filter(|(_, c)| c.abs() > threshold)
            .map(|(string, coeff)| PauliTerm { coeff, string })
            .collect();
        Self { num_qubits, terms }
    }

    /// A single term.
    pub fn term(num_qubits: usize, coeff: T, pairs: &[(usize, Axis)]) -> Result<Self> {
        let s = PauliString::from_pairs(pairs.iter().copied())?;
        Self::from_terms(num_qubits, [(coeff, s)])
    }

    pub fn identity(num_qubits: usize, coeff: T) -> Self {
        Self::from_terms(num_qubits, [(coeff, PauliString::identity())]).unwrap()
    }

    /// Projector `|1><1|_q = (I - Z_q)/2`, scaled.
    pub fn excitation(num_qubits: usize, q: usize, scale: T) -> Self {
        let half = scale / T::lit(2.0);
        Self::from_terms(
            num_qubits,
            [
                (half, PauliString::identity()),
                (-half, PauliString::single(q, Axis::Z)),
            ],
        )
        .unwrap()
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn terms(&self) -> &[PauliTerm<T>] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff_of(&self, s: &PauliString) -> T {
        self.terms
            .binary_search_by(|t| t.string.cmp(s))
            .map(|i| self.terms[i].coeff)
            .unwrap_or_else(|_| T::zero())
    }

    /// Re-merge and drop terms at or below `threshold`.
    pub fn canonicalize(&self, threshold: T) -> Self {
        let mut acc = BTreeMap::new();
        for t in &self.terms {
            *acc.entry(t.string.clone()).or_insert_with(T::zero) += t.coeff;
        }
        Self::from_map(self.num_qubits, acc, threshold)
    }

    /// Same operator viewed on a larger register.
    pub fn with_num_qubits(&self, num_qubits: usize) -> Result<Self> {
        for t in &self.terms {
            check_support(num_qubits, &t.string)?;
        }
        Ok(Self {
            num_qubits,
            terms: self.terms.clone(),
        })
    }

    /// Largest locality among non-identity terms.
    pub fn locality(&self) -> usize {
        self.terms.iter().map(|t| t.string.weight()).max().unwrap_or(0)
    }

    pub fn identity_coeff(&self) -> T {
        self.coeff_of(&PauliString::identity())
    }

    /// True when the matrix is real (no string carries an odd number of Y).
    pub fn is_real(&self) -> bool {
        self.terms.iter().all(|t| t.string.y_count() % 2 == 0)
    }

    pub fn is_diagonal(&self) -> bool {
        self.terms.iter().all(|t| t.string.is_diagonal())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.num_qubits.max(other.num_qubits);
        Self::from_terms(
            n,
            self.iter_pairs().chain(other.iter_pairs()),
        )
        .unwrap()
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-T::one()))
    }

    pub fn scale(&self, k: T) -> Self {
        Self::from_terms(self.num_qubits, self.terms.iter().map(|t| (t.coeff * k, t.string.clone())))
            .unwrap()
    }

    fn iter_pairs(&self) -> impl Iterator<Item = (T, PauliString)> + '_ {
        self.terms.iter().map(|t| (t.coeff, t.string.clone()))
    }

    /// Symmetrized product `(AB + BA)/2`, always Hermitian with real weights.
    pub fn jordan(&self, other: &Self) -> Self {
        let n = self.num_qubits.max(other.num_qubits);
        let mut out = Vec::new();
        for a in &self.terms {
            for b in &other.terms {
                if !a.string.commutes_with(&b.string) {
                    continue;
                }
                let (ph, s) = a.string.multiply(&b.string);
                let sign = ph.sign().expect("commuting Hermitian strings have a real product");
                out.push((a.coeff * b.coeff * T::lit(sign as f64), s));
            }
        }
        Self::from_terms(n, out).unwrap()
    }

    pub fn square(&self) -> Self {
        self.jordan(self)
    }

    /// Tensor with single-qubit Pauli `axis` on qubit `q` (which must be outside the support).
    pub fn tensor_pauli(&self, q: usize, axis: Axis, num_qubits: usize) -> Result<Self> {
        let mut out = Vec::with_capacity(self.len());
        for t in &self.terms {
            if t.string.axis(q).is_some() {
                return Err(Error::SharedSupport(format!("qubit {q} already in {}", t.string)));
            }
            let mut s = t.string.clone();
            s.set(q, Some(axis));
            out.push((t.coeff, s));
        }
        Self::from_terms(num_qubits, out)
    }

    /// `self ⊗ |1><1|_q`.
    pub fn tensor_excited(&self, q: usize, num_qubits: usize) -> Result<Self> {
        let z = self.tensor_pauli(q, Axis::Z, num_qubits)?;
        let i = self.with_num_qubits(num_qubits)?;
        Ok(i.sub(&z).scale(T::lit(0.5)))
    }

    /// Terms that touch at least one of the given qubits, and the rest.
    pub fn partition_touching(&self, qubits: &[usize]) -> (Self, Self) {
        let (a, b): (Vec<_>, Vec<_>) = self
            .terms
            .iter()
            .cloned()
            .partition(|t| qubits.iter().any(|&q| t.string.axis(q).is_some()));
        (
            Self { num_qubits: self.num_qubits, terms: a },
            Self { num_qubits: self.num_qubits, terms: b },
        )
    }

    /// Remove the term with exactly this string, returning its coefficient.
    pub fn without(&self, s: &PauliString) -> Option<(T, Self)> {
        let i = self.terms.binary_search_by(|t| t.string.cmp(s)).ok()?;
        let mut terms = self.terms.clone();
        let t = terms.remove(i);
        Some((t.coeff, Self { num_qubits: self.num_qubits, terms }))
    }

    /// Fix qubits that only ever appear as `Z` to a computational value,
    /// producing the operator on the remaining qubits (relabelled densely).
    pub fn fix_z(&self, fixed: &[(usize, bool)]) -> Result<(Self, Vec<usize>)> {
        let is_fixed = |q: usize| fixed.iter().find(|f| f.0 == q).map(|f| f.1);
        let keep: Vec<usize> = (0..self.num_qubits).filter(|&q| is_fixed(q).is_none()).collect();
        let mut index = vec![usize::MAX; self.num_qubits];
        for (i, &q) in keep.iter().enumerate() {
            index[q] = i;
        }
        let mut out = Vec::with_capacity(self.len());
        for t in &self.terms {
            let mut sign = T::one();
            let mut s = PauliString::identity();
            for (q, a) in t.string.pairs() {
                match is_fixed(q) {
                    Some(bit) => {
                        if a != Axis::Z {
                            return Err(Error::InvalidParameter(format!(
                                "qubit {q} is not conserved: {a:?} in {}",
                                t.string
                            )));
                        }
                        if bit {
                            sign = -sign;
                        }
                    }
                    None => s.set(index[q], Some(a)),
                }
            }
            out.push((t.coeff * sign, s));
        }
        Ok((Self::from_terms(keep.len(), out)?, keep))
    }

    /// Qubits on which every term acts as `I` or `Z`.
    pub fn conserved_qubits(&self) -> Vec<usize> {
        (0..self.num_qubits)
            .filter(|&q| {
                self.terms
                    .iter()
                    .all(|t| matches!(t.string.axis(q), None | Some(Axis::Z)))
            })
            .collect()
    }

    /// Rename qubits through `map` (old index -> new index).
    pub fn relabel(&self, map: &[usize], num_qubits: usize) -> Result<Self> {
        let mut out = Vec::with_capacity(self.len());
        for t in &self.terms {
            let mut s = PauliString::identity();
            for (q, a) in t.string.pairs() {
                let nq = *map.get(q).ok_or(Error::UnknownVertex(q))?;
                s.set(nq, Some(a));
            }
            out.push((t.coeff, s));
        }
        Self::from_terms(num_qubits, out)
    }

    /// `max |coeff(self) - coeff(other)|` over the union of strings.
    pub fn max_coeff_diff(&self, other: &Self) -> T {
        let mut m = T::zero();
        for t in &self.terms {
            m = m.max((t.coeff - other.coeff_of(&t.string)).abs());
        }
        for t in &other.terms {
            m = m.max((t.coeff - self.coeff_of(&t.string)).abs());
        }
        m
    }
}

/// `(-A + B)^2 / 2`.
pub fn square_half_difference<T: Real>(a: &Hamiltonian<T>, b: &Hamiltonian<T>) -> Hamiltonian<T> {
    b.sub(a).square().scale(T::lit(0.5))
}

impl<T: Real> fmt::Display for Hamiltonian<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}·{}", t.coeff, t.string)?;
        }
        Ok(())
    }
}
