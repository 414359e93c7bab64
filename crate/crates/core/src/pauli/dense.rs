//! Dense matrices and matrix-free products.
//!
//! Basis index bit `q` is the value of qubit `q` (qubit 0 is least significant).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{Real, C};

use super::hamiltonian::Hamiltonian;
use super::string::{Phase, PauliString};

pub const DEFAULT_DENSE_CAP: usize = 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormMode {
    Exact,
    UpperBound,
}

fn phase_c<T: Real>(p: Phase) -> C<T> {
    let (a, b) = p.value();
    Complex::new(T::lit(a as f64), T::lit(b as f64))
}

impl<T: Real> Hamiltonian<T> {
    fn check_cap(&self, cap: usize) -> Result<usize> {
        if self.num_qubits() > cap || self.num_qubits() >= 63 {
            return Err(Error::DenseDimensionExceeded {
                num_qubits: self.num_qubits(),
                cap,
            });
        }
        Ok(1usize << self.num_qubits())
    }

    pub fn to_matrix(&self) -> Result<DMatrix<C<T>>> {
        self.to_matrix_capped(DEFAULT_DENSE_CAP)
    }

    pub fn to_matrix_capped(&self, cap: usize) -> Result<DMatrix<C<T>>> {
        let dim = self.check_cap(cap)?;
        let mut m = DMatrix::from_element(dim, dim, Complex::new(T::zero(), T::zero()));
        for t in self.terms() {
            for j in 0..dim {
                let (i, ph) = t.string.act(j as u64);
                m[(i as usize, j)] += phase_c::<T>(ph) * t.coeff;
            }
        }
        Ok(m)
    }

    /// Real symmetric matrix; only valid when [`Hamiltonian::is_real`] holds.
    pub fn to_real_matrix_capped(&self, cap: usize) -> Result<DMatrix<T>> {
        let dim = self.check_cap(cap)?;
        if !self.is_real() {
            return Err(Error::InvalidParameter("Hamiltonian has complex matrix elements".into()));
        }
        let mut m = DMatrix::zeros(dim, dim);
        for t in self.terms() {
            for j in 0..dim {
                let (i, ph) = t.string.act(j as u64);
                // An even number of Y factors keeps the phase real.
                let s = T::lit(ph.sign().unwrap() as f64);
                m[(i as usize, j)] += s * t.coeff;
            }
        }
        Ok(m)
    }

    /// Matrix-free product `H v`.
    pub fn apply(&self, v: &[C<T>]) -> Result<Vec<C<T>>> {
        let mut out = vec![Complex::new(T::zero(), T::zero()); v.len()];
        self.apply_into(v, &mut out)?;
        Ok(out)
    }

    pub fn apply_into(&self, v: &[C<T>], out: &mut [C<T>]) -> Result<()> {
        let n = self.num_qubits();
        if n >= 63 || v.len() != 1usize << n || out.len() != v.len() {
            return Err(Error::DimensionMismatch {
                expected: if n < 63 { 1usize << n } else { usize::MAX },
                found: v.len(),
            });
        }
        out.iter_mut().for_each(|o| *o = Complex::new(T::zero(), T::zero()));
        for t in self.terms() {
            let (x, z) = t.string.low_masks();
            let base = phase_c::<T>(Phase(((x & z).count_ones() & 3) as u8)) * t.coeff;
            let neg = -base;
            for (j, &vj) in v.iter().enumerate() {
                let c = if (j as u64 & z).count_ones() % 2 == 0 { base } else { neg };
                out[j ^ x as usize] += c * vj;
            }
        }
        Ok(())
    }

    pub fn apply_vector(&self, v: &DVector<C<T>>) -> Result<DVector<C<T>>> {
        Ok(DVector::from_vec(self.apply(v.as_slice())?))
    }

    pub fn norm(&self, mode: NormMode) -> Result<T> {
        match mode {
            NormMode::UpperBound => Ok(self.norm_upper_bound()),
            NormMode::Exact => {
                let s = crate::spectral::dense_eigenvalues(self, DEFAULT_DENSE_CAP)?;
                Ok(s.iter().fold(T::zero(), |m, x| m.max(x.abs())))
            }
        }
    }

    /// `Σ |coeff|`.
    pub fn norm_upper_bound(&self) -> T {
        self.terms().iter().fold(T::zero(), |s, t| s + t.coeff.abs())
    }

    /// Matrix of `H` restricted to a set of computational basis states, plus
    /// the largest weight `H` sends outside that set.
    pub fn matrix_in_basis(&self, basis: &[u64]) -> (DMatrix<C<T>>, T) {
        let mut pos = std::collections::HashMap::with_capacity(basis.len());
        for (i, &b) in basis.iter().enumerate() {
            pos.insert(b, i);
        }
        let d = basis.len();
        let zero = Complex::new(T::zero(), T::zero());
        let mut m = DMatrix::from_element(d, d, zero);
        let mut leak = vec![std::collections::HashMap::<u64, C<T>>::new(); d];
        for t in self.terms() {
            for (j, &b) in basis.iter().enumerate() {
                let (i, ph) = t.string.act(b);
                let c = phase_c::<T>(ph) * t.coeff;
                match pos.get(&i) {
                    Some(&ii) => m[(ii, j)] += c,
                    None => *leak[j].entry(i).or_insert(zero) += c,
                }
            }
        }
        let mut worst = T::zero();
        for l in leak {
            let s = l.values().fold(T::zero(), |s, c| s + c.norm_sqr());
            worst = worst.max(s.sqrt());
        }
        (m, worst)
    }

    /// Pauli expansion of a Hermitian matrix acting on `support` (basis bit
    /// `k` of the local matrix is qubit `support[k]`).
    pub fn from_local_matrix(num_qubits: usize, support: &[usize], m: &DMatrix<C<T>>) -> Result<Self> {
        let k = support.len();
        let dim = 1usize << k;
        if m.nrows() != dim || m.ncols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: m.nrows() });
        }
        let scale = T::lit(1.0 / dim as f64);
        let mut terms = Vec::new();
        for code in 0..(1usize << (2 * k)) {
            let mut local = PauliString::identity();
            let mut global = PauliString::identity();
            for (b, &q) in support.iter().enumerate() {
                let axis = match (code >> (2 * b)) & 3 {
                    0 => None,
                    1 => Some(super::Axis::X),
                    2 => Some(super::Axis::Y),
                    _ => Some(super::Axis::Z),
                };
                local.set(b, axis);
                global.set(q, axis);
            }
            let mut tr = Complex::new(T::zero(), T::zero());
            for j in 0..dim {
                let (i, ph) = local.act(j as u64);
                // <j|P = (P|j>)^† since P is Hermitian.
                tr += phase_c::<T>(ph).conj() * m[(i as usize, j)];
            }
            terms.push((tr.re * scale, global));
        }
        Self::from_terms(num_qubits, terms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::Axis;

    fn h(n: usize, terms: &[(f64, &[(usize, Axis)])]) -> Hamiltonian<f64> {
        Hamiltonian::from_terms(
            n,
            terms
                .iter()
                .map(|(c, p)| (*c, PauliString::from_pairs(p.iter().copied()).unwrap())),
        )
        .unwrap()
    }

    #[test]
    fn small_matrices() {
        let z = h(1, &[(1.0, &[(0, Axis::Z)])]).to_matrix().unwrap();
        assert_eq!(z[(0, 0)].re, 1.0);
        assert_eq!(z[(1, 1)].re, -1.0);
        let xx = h(2, &[(1.0, &[(0, Axis::X), (1, Axis::X)])]).to_matrix().unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i + j == 3 { 1.0 } else { 0.0 };
                assert_eq!(xx[(i, j)], Complex::new(want, 0.0));
            }
        }
        let zero = Hamiltonian::<f64>::zero(2).to_matrix().unwrap();
        assert_eq!(zero.shape(), (4, 4));
        assert!(zero.iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn apply_on_basis_states() {
        let x = h(1, &[(1.0, &[(0, Axis::X)])]);
        let one = Complex::new(1.0, 0.0);
        let zero = Complex::new(0.0, 0.0);
        assert_eq!(x.apply(&[one, zero]).unwrap(), vec![zero, one]);
        let z = h(1, &[(1.0, &[(0, Axis::Z)])]);
        assert_eq!(z.apply(&[zero, one]).unwrap(), vec![zero, -one]);
        assert!(z.apply(&[one]).is_err());
    }

    #[test]
    fn cap_is_enforced() {
        let big = Hamiltonian::<f64>::zero(15);
        assert!(matches!(big.to_matrix(), Err(Error::DenseDimensionExceeded { .. })));
    }

    #[test]
    fn local_matrix_round_trip() {
        let ham = h(
            3,
            &[
                (0.3, &[(0, Axis::Y), (2, Axis::X)]),
                (-1.1, &[(2, Axis::Z)]),
                (0.7, &[]),
            ],
        );
        let m = ham.to_matrix().unwrap();
        let back = Hamiltonian::from_local_matrix(3, &[0, 1, 2], &m).unwrap();
        assert!(back.max_coeff_diff(&ham) < 1e-14);
        // Relabelled support: local bit 0 -> qubit 2, bit 2 -> qubit 0.
        let swapped = Hamiltonian::from_local_matrix(3, &[2, 1, 0], &m).unwrap();
        assert!((swapped.coeff_of(&PauliString::from_pairs([(0, Axis::X), (2, Axis::Y)]).unwrap()) - 0.3).abs() < 1e-14);
    }
}
