//! Block split of a perturbed Hamiltonian `H̃ = H + V` around a cut `λ*`.

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::pauli::Hamiltonian;
use crate::scalar::{Real, C};

use super::eigen::{hermitian_eigenvalues, hermitian_eigh};

#[derive(Clone, Debug)]
enum Split<T: Real> {
    /// `H` diagonal: the low space is spanned by basis states.
    Coordinates { low: Vec<usize>, high: Vec<usize> },
    /// General `H`: isometries onto the two eigenspaces.
    Isometry { low: DMatrix<C<T>>, high: DMatrix<C<T>> },
}

/// Dense data for one perturbed system, shared by every self-energy evaluation.
#[derive(Clone, Debug)]
pub struct SplitSystem<T: Real> {
    pub dim: usize,
    pub lambda_star: T,
    /// Largest eigenvalue of `H` below `λ*`.
    pub lambda_minus: T,
    /// Smallest eigenvalue of `H` above `λ*`.
    pub lambda_plus: T,
    pub norm_v: T,
    pub h_tilde: DMatrix<C<T>>,
    pub h_tilde_values: Vec<T>,
    pub h_tilde_vectors: DMatrix<C<T>>,
    h: DMatrix<C<T>>,
    v: DMatrix<C<T>>,
    split: Split<T>,
    // Schur data: Σ(z) = H̃₋₋ + K diag(1/(z - μ)) K†.
    ht_ll: DMatrix<C<T>>,
    schur_k: DMatrix<C<T>>,
    schur_mu: Vec<T>,
}

impl<T: Real> SplitSystem<T> {
    pub fn new(h: &Hamiltonian<T>, v: &Hamiltonian<T>, lambda_star: T, cap: usize) -> Result<Self> {
        let n = h.num_qubits().max(v.num_qubits());
        let h = h.with_num_qubits(n)?;
        let v = v.with_num_qubits(n)?;
        let hm = h.to_matrix_capped(cap)?;
        let vm = v.to_matrix_capped(cap)?;
        let dim = hm.nrows();
        let (split, h_vals) = if h.is_diagonal() {
            let diag: Vec<T> = (0..dim).map(|i| hm[(i, i)].re).collect();
            let low: Vec<usize> = (0..dim).filter(|&i| diag[i] < lambda_star).collect();
            let high: Vec<usize> = (0..dim).filter(|&i| diag[i] >= lambda_star).collect();
            (Split::Coordinates { low, high }, diag)
        } else {
            let (vals, vecs) = hermitian_eigh(&hm);
            let d = vals.iter().filter(|&&x| x < lambda_star).count();
            let low = vecs.columns(0, d).into_owned();
            let high = vecs.columns(d, dim - d).into_owned();
            (Split::Isometry { low, high }, vals)
        };
        let lambda_minus = h_vals.iter().copied().filter(|&x| x < lambda_star).fold(T::min_value().unwrap_or(-T::one()), T::max);
        let lambda_plus = h_vals.iter().copied().filter(|&x| x >= lambda_star).fold(T::max_value().unwrap_or(T::one()), T::min);
        let norm_v = hermitian_eigenvalues(&vm).iter().fold(T::zero(), |m, x| m.max(x.abs()));
        let h_tilde = &hm + &vm;
        let (h_tilde_values, h_tilde_vectors) = hermitian_eigh(&h_tilde);
        let mut sys = Self {
            dim,
            lambda_star,
            lambda_minus,
            lambda_plus,
            norm_v,
            h_tilde,
            h_tilde_values,
            h_tilde_vectors,
            h: hm,
            v: vm,
            split,
            ht_ll: DMatrix::zeros(0, 0),
            schur_k: DMatrix::zeros(0, 0),
            schur_mu: Vec::new(),
        };
        let ht_ll = sys.block(&sys.h_tilde, true, true);
        let ht_lh = sys.block(&sys.h_tilde, true, false);
        let ht_hh = sys.block(&sys.h_tilde, false, false);
        let (mu, w) = hermitian_eigh(&ht_hh);
        sys.schur_k = ht_lh * w;
        sys.schur_mu = mu;
        sys.ht_ll = ht_ll;
        Ok(sys)
    }

    /// Convenience constructor for gadget outputs: `λ* = Δ/2`.
    pub fn from_gadget(h: &Hamiltonian<T>, v: &Hamiltonian<T>, delta: T, cap: usize) -> Result<Self> {
        Self::new(h, v, delta / T::lit(2.0), cap)
    }

    pub fn low_dim(&self) -> usize {
        match &self.split {
            Split::Coordinates { low, .. } => low.len(),
            Split::Isometry { low, .. } => low.ncols(),
        }
    }

    /// Gap of `H` around the cut.
    pub fn delta(&self) -> T {
        self.lambda_plus - self.lambda_minus
    }

    /// Block of a full-space matrix: rows/cols in the low (`true`) or high space.
    pub fn block(&self, m: &DMatrix<C<T>>, rows_low: bool, cols_low: bool) -> DMatrix<C<T>> {
        match &self.split {
            Split::Coordinates { low, high } => {
                let r = if rows_low { low } else { high };
                let c = if cols_low { low } else { high };
                DMatrix::from_fn(r.len(), c.len(), |i, j| m[(r[i], c[j])])
            }
            Split::Isometry { low, high } => {
                let r = if rows_low { low } else { high };
                let c = if cols_low { low } else { high };
                r.adjoint() * m * c
            }
        }
    }

    /// `Π₋ op Π₋` as a matrix on the low space.
    pub fn restrict_low(&self, op: &Hamiltonian<T>) -> Result<DMatrix<C<T>>> {
        let n = (self.dim as f64).log2().round() as usize;
        let m = op.with_num_qubits(n)?.to_matrix_capped(n)?;
        Ok(self.block(&m, true, true))
    }

    /// Full-space operator `U₋ m U₋†`.
    pub fn embed_low(&self, m: &DMatrix<C<T>>) -> DMatrix<C<T>> {
        match &self.split {
            Split::Coordinates { low, .. } => {
                let mut out = DMatrix::from_element(self.dim, self.dim, Complex::new(T::zero(), T::zero()));
                for (i, &r) in low.iter().enumerate() {
                    for (j, &c) in low.iter().enumerate() {
                        out[(r, c)] = m[(i, j)];
                    }
                }
                out
            }
            Split::Isometry { low, .. } => low * m * low.adjoint(),
        }
    }

    pub fn h_matrix(&self) -> &DMatrix<C<T>> {
        &self.h
    }

    pub fn v_matrix(&self) -> &DMatrix<C<T>> {
        &self.v
    }

    /// `Σ₋(z)` through the Feshbach (Schur complement) route.
    pub fn self_energy_schur(&self, z: C<T>) -> Result<DMatrix<C<T>>> {
        let mut dist = T::max_value().unwrap_or(T::one());
        for &m in &self.schur_mu {
            dist = dist.min(cabs(z - Complex::new(m, T::zero())));
        }
        if dist <= T::lit(1e-300) {
            return Err(Error::SingularResolvent { condition: f64::INFINITY });
        }
        let inv: Vec<C<T>> = self.schur_mu.iter().map(|&m| (z - Complex::new(m, T::zero())).inv()).collect();
        let k = &self.schur_k;
        let scaled = DMatrix::from_fn(k.nrows(), k.ncols(), |i, j| k[(i, j)] * inv[j]);
        Ok(&self.ht_ll + scaled * k.adjoint())
    }

    /// `Σ₋(z) = zI₋ - G̃₋₋(z)⁻¹`.
    pub fn self_energy_resolvent(&self, z: C<T>) -> Result<(DMatrix<C<T>>, f64)> {
        let mut lo = f64::INFINITY;
        let mut hi: f64 = 0.0;
        for &l in &self.h_tilde_values {
            let d = cabs(z - Complex::new(l, T::zero())).to_f64_lossy();
            lo = lo.min(d);
            hi = hi.max(d);
        }
        let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
        if condition > 1e12 {
            return Err(Error::SingularResolvent { condition });
        }
        let w = &self.h_tilde_vectors;
        let inv: Vec<C<T>> = self.h_tilde_values.iter().map(|&l| (z - Complex::new(l, T::zero())).inv()).collect();
        let scaled = DMatrix::from_fn(w.nrows(), w.ncols(), |i, j| w[(i, j)] * inv[j]);
        let g = scaled * w.adjoint();
        let g_ll = self.block(&g, true, true);
        let d = g_ll.nrows();
        let g_inv = g_ll.try_inverse().ok_or(Error::SingularResolvent { condition: f64::INFINITY })?;
        let zi = DMatrix::from_diagonal_element(d, d, z);
        Ok((zi - g_inv, condition))
    }

    /// Perturbative self-energy truncated at order 2 or 3.
    pub fn self_energy_series(&self, z: C<T>, order: usize) -> Result<DMatrix<C<T>>> {
        if !(2..=3).contains(&order) {
            return Err(Error::InvalidParameter(format!("series order {order} (must be 2 or 3)")));
        }
        let h_ll = self.block(&self.h, true, true);
        let h_hh = self.block(&self.h, false, false);
        let v_ll = self.block(&self.v, true, true);
        let v_lh = self.block(&self.v, true, false);
        let v_hl = self.block(&self.v, false, true);
        // H₊ is diagonal in its own eigenbasis; G₊ through an eigendecomposition.
        let (mu, w) = hermitian_eigh(&h_hh);
        let mut dist = T::max_value().unwrap_or(T::one());
        for &m in &mu {
            dist = dist.min(cabs(z - Complex::new(m, T::zero())));
        }
        if self.norm_v >= dist {
            return Err(Error::DivergentExpansion {
                norm_v: self.norm_v.to_f64_lossy(),
                distance: dist.to_f64_lossy(),
            });
        }
        let inv: Vec<C<T>> = mu.iter().map(|&m| (z - Complex::new(m, T::zero())).inv()).collect();
        let scaled = DMatrix::from_fn(w.nrows(), w.ncols(), |i, j| w[(i, j)] * inv[j]);
        let g_plus = scaled * w.adjoint();
        let second = &v_lh * &g_plus * &v_hl;
        let mut out = h_ll + v_ll + second;
        if order == 3 {
            let v_hh = self.block(&self.v, false, false);
            out += &v_lh * &g_plus * v_hh * &g_plus * &v_hl;
        }
        Ok(out)
    }

    /// Eigenvalues of `H̃` strictly below `λ*`.
    pub fn low_eigenvalues(&self) -> Vec<T> {
        self.h_tilde_values.iter().copied().filter(|&x| x < self.lambda_star).collect()
    }
}

pub(crate) fn cabs<T: Real>(c: C<T>) -> T {
    c.norm_sqr().sqrt()
}

/// Spectral norm of `a - b`.
pub fn operator_distance<T: Real>(a: &DMatrix<C<T>>, b: &DMatrix<C<T>>) -> Result<T> {
    if a.shape() != b.shape() {
        return Err(Error::DimensionMismatch { expected: a.nrows(), found: b.nrows() });
    }
    let d = a - b;
    let skew = (&d - d.adjoint()).iter().fold(T::zero(), |m, c| m.max(cabs(*c)));
    let size = d.iter().fold(T::zero(), |m, c| m.max(cabs(*c)));
    let herm = skew <= T::lit(1e-12) * (T::one() + size);
    if herm {
        let s = (&d + d.adjoint()) * Complex::new(T::lit(0.5), T::zero());
        Ok(hermitian_eigenvalues(&s).iter().fold(T::zero(), |m, x| m.max(x.abs())))
    } else {
        let g = d.adjoint() * &d;
        let top = hermitian_eigenvalues(&g).iter().fold(T::zero(), |m, x| m.max(*x));
        Ok(top.max(T::zero()).sqrt())
    }
}

/// Distance between two Hamiltonians on the same register.
pub fn hamiltonian_distance<T: Real>(a: &Hamiltonian<T>, b: &Hamiltonian<T>, cap: usize) -> Result<T> {
    if a.num_qubits() != b.num_qubits() {
        return Err(Error::DimensionMismatch { expected: a.num_qubits(), found: b.num_qubits() });
    }
    let d = a.sub(b);
    super::eigen::dense_eigenvalues(&d, cap).map(|v| v.iter().fold(T::zero(), |m, x| m.max(x.abs())))
}
