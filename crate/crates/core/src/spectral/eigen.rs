//! Dense and sector-decomposed eigensolvers.

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::pauli::Hamiltonian;
use crate::scalar::{Real, C};

use super::lanczos::{lanczos, LanczosOptions};

/// Ascending eigenvalues, optionally with eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct Spectrum<T: Real> {
    pub values: Vec<T>,
    pub vectors: Option<DMatrix<C<T>>>,
}

impl<T: Real> Spectrum<T> {
    pub fn ground(&self) -> T {
        self.values[0]
    }

    /// `values[1] - values[0]`, if there are two levels.
    pub fn gap(&self) -> Option<T> {
        (self.values.len() > 1).then(|| self.values[1] - self.values[0])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EigenMode {
    Dense,
    Iterative,
}

#[derive(Clone, Debug)]
pub struct EigenRequest {
    /// Number of lowest levels; `None` asks for all (dense only).
    pub k: Option<usize>,
    pub mode: EigenMode,
    pub vectors: bool,
    pub dense_cap: usize,
    pub seed: u64,
}

impl Default for EigenRequest {
    fn default() -> Self {
        Self {
            k: None,
            mode: EigenMode::Dense,
            vectors: false,
            dense_cap: crate::pauli::DEFAULT_DENSE_CAP,
            seed: 7,
        }
    }
}

fn sorted_order<T: Real>(vals: &[T]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..vals.len()).collect();
    idx.sort_by(|&a, &b| vals[a].partial_cmp(&vals[b]).unwrap_or(std::cmp::Ordering::Equal));
    idx
}

fn is_real_matrix<T: Real>(m: &DMatrix<C<T>>) -> bool {
    m.iter().all(|c| c.im == T::zero())
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues<T: Real>(m: &DMatrix<C<T>>) -> Vec<T> {
    let mut v: Vec<T> = if is_real_matrix(m) {
        m.map(|c| c.re).symmetric_eigenvalues().iter().copied().collect()
    } else {
        m.clone().symmetric_eigenvalues().iter().copied().collect()
    };
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    v
}

/// Ascending eigenpairs of a Hermitian matrix.
pub fn hermitian_eigh<T: Real>(m: &DMatrix<C<T>>) -> (Vec<T>, DMatrix<C<T>>) {
    let (vals, vecs): (Vec<T>, DMatrix<C<T>>) = if is_real_matrix(m) {
        let e = m.map(|c| c.re).symmetric_eigen();
        (e.eigenvalues.iter().copied().collect(), e.eigenvectors.map(|x| Complex::new(x, T::zero())))
    } else {
        let e = m.clone().symmetric_eigen();
        (e.eigenvalues.iter().copied().collect(), e.eigenvectors)
    };
    let order = sorted_order(&vals);
    let values = order.iter().map(|&i| vals[i]).collect();
    let vectors = DMatrix::from_fn(vecs.nrows(), order.len(), |r, c| vecs[(r, order[c])]);
    (values, vectors)
}

/// All eigenvalues of `h`, ascending, via the real path when possible.
pub fn dense_eigenvalues<T: Real>(h: &Hamiltonian<T>, cap: usize) -> Result<Vec<T>> {
    if h.is_real() {
        let m = h.to_real_matrix_capped(cap)?;
        let mut v: Vec<T> = m.symmetric_eigenvalues().iter().copied().collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        Ok(v)
    } else {
        Ok(hermitian_eigenvalues(&h.to_matrix_capped(cap)?))
    }
}

pub fn eigensolve<T: Real>(h: &Hamiltonian<T>, req: &EigenRequest) -> Result<Spectrum<T>> {
    match req.mode {
        EigenMode::Dense => {
            let mut spec = if req.vectors {
                let (values, vectors) = hermitian_eigh(&h.to_matrix_capped(req.dense_cap)?);
                Spectrum { values, vectors: Some(vectors) }
            } else {
                Spectrum { values: dense_eigenvalues(h, req.dense_cap)?, vectors: None }
            };
            if let Some(k) = req.k {
                let k = k.min(spec.values.len());
                spec.values.truncate(k);
                if let Some(v) = spec.vectors.take() {
                    spec.vectors = Some(v.columns(0, k).into_owned());
                }
            }
            Ok(spec)
        }
        EigenMode::Iterative => {
            let k = req.k.ok_or_else(|| Error::InvalidParameter("iterative mode needs k".into()))?;
            let opts = LanczosOptions { seed: req.seed, ..LanczosOptions::default() };
            lanczos(h, k, &opts, req.vectors)
        }
    }
}

/// Lowest `k` eigenvalues, splitting on qubits that only ever carry `Z`.
///
/// Each conserved qubit halves the dense problem; the sectors are solved
/// separately and merged. Useful when mediator penalties dominate the register.
pub fn sectored_lowest<T: Real>(h: &Hamiltonian<T>, k: usize, cap: usize) -> Result<Vec<T>> {
    let conserved = h.conserved_qubits();
    let free = h.num_qubits() - conserved.len();
    if free > cap {
        return Err(Error::DenseDimensionExceeded { num_qubits: free, cap });
    }
    if conserved.len() > 24 {
        return Err(Error::DenseDimensionExceeded { num_qubits: h.num_qubits(), cap });
    }
    let mut all = Vec::new();
    for bits in 0..(1u64 << conserved.len()) {
        let fixed: Vec<(usize, bool)> = conserved
            .iter()
            .enumerate()
            .map(|(i, &q)| (q, bits >> i & 1 == 1))
            .collect();
        let (sub, _) = h.fix_z(&fixed)?;
        let vals = if sub.num_qubits() == 0 {
            vec![sub.identity_coeff()]
        } else {
            dense_eigenvalues(&sub, cap)?
        };
        all.extend(vals.into_iter().take(k));
        all.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        all.truncate(k);
    }
    Ok(all)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{Axis, PauliString};

    #[test]
    fn sectors_match_full_spectrum() {
        let h = Hamiltonian::<f64>::from_terms(
            4,
            [
                (1.0, PauliString::from_pairs([(0, Axis::Z), (1, Axis::Z)]).unwrap()),
                (0.5, PauliString::from_pairs([(1, Axis::X), (2, Axis::X)]).unwrap()),
                (-0.3, PauliString::from_pairs([(2, Axis::Y), (3, Axis::Z)]).unwrap()),
                (0.2, PauliString::from_pairs([(1, Axis::Z)]).unwrap()),
            ],
        )
        .unwrap();
        let full = dense_eigenvalues(&h, 14).unwrap();
        let sect = sectored_lowest(&h, 16, 14).unwrap();
        for (a, b) in full.iter().zip(&sect) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
