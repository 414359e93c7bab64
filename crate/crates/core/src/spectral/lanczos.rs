//! Matrix-free Lanczos with full reorthogonalization.

use nalgebra::DMatrix;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::pauli::Hamiltonian;
use crate::scalar::{Real, C};

use super::eigen::{hermitian_eigh, Spectrum};

#[derive(Clone, Debug)]
pub struct LanczosOptions {
    pub max_dim: usize,
    /// Residual tolerance relative to `Σ|coeff|`.
    pub rel_tol: f64,
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self { max_dim: 400, rel_tol: 1e-8, seed: 7 }
    }
}

fn dot<T: Real>(a: &[C<T>], b: &[C<T>]) -> C<T> {
    a.iter().zip(b).fold(Complex::new(T::zero(), T::zero()), |s, (x, y)| s + x.conj() * y)
}

fn norm<T: Real>(a: &[C<T>]) -> T {
    a.iter().fold(T::zero(), |s, x| s + x.norm_sqr()).sqrt()
}

fn orthogonalize<T: Real>(w: &mut [C<T>], basis: &[Vec<C<T>>]) {
    // Two passes of classical Gram-Schmidt keep the basis orthonormal to machine precision.
    for _ in 0..2 {
        for q in basis {
            let c = dot(q, w);
            w.iter_mut().zip(q).for_each(|(x, y)| *x -= *y * c);
        }
    }
}

fn random_vector<T: Real>(rng: &mut ChaCha8Rng, dim: usize) -> Vec<C<T>> {
    (0..dim)
        .map(|_| Complex::new(T::lit(rng.gen::<f64>() - 0.5), T::lit(rng.gen::<f64>() - 0.5)))
        .collect()
}

/// Lowest `k` eigenpairs of `h` without forming the dense matrix.
pub fn lanczos<T: Real>(
    h: &Hamiltonian<T>,
    k: usize,
    opts: &LanczosOptions,
    want_vectors: bool,
) -> Result<Spectrum<T>> {
    let n = h.num_qubits();
    if n > 30 {
        return Err(Error::DenseDimensionExceeded { num_qubits: n, cap: 30 });
    }
    let dim = 1usize << n;
    if k == 0 || k > dim {
        return Err(Error::InvalidParameter(format!("k = {k} for dimension {dim}")));
    }
    let scale = h.norm_upper_bound().max(T::lit(1e-300));
    let tol = T::lit(opts.rel_tol) * scale;
    let max_dim = opts.max_dim.max(k + 1).min(dim);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    let mut basis: Vec<Vec<C<T>>> = Vec::new();
    let mut images: Vec<Vec<C<T>>> = Vec::new();
    let mut w = random_vector::<T>(&mut rng, dim);
    let mut last_residual = f64::INFINITY;
    // A single Krylov sequence sees one vector per degenerate eigenspace, so
    // every convergence is followed by a restart from a fresh direction; the
    // result is accepted once a restart leaves the Ritz values unchanged.
    let mut accepted: Option<Vec<T>> = None;
    let mut restart = false;

    loop {
        let mut nw = norm(&w);
        if nw <= T::lit(1e-10) * scale.max(T::one()) || !nw.is_finite() {
            // Krylov space exhausted; continue from a fresh direction.
            w = random_vector(&mut rng, dim);
            orthogonalize(&mut w, &basis);
            nw = norm(&w);
        }
        let q: Vec<C<T>> = w.iter().map(|x| *x / nw).collect();
        let hq = h.apply(&q)?;
        basis.push(q);
        images.push(hq.clone());
        let m = basis.len();

        if m >= k && (m % 8 == 0 || m == max_dim) {
            let proj = DMatrix::from_fn(m, m, |i, j| dot(&basis[i], &images[j]));
            let proj = (&proj + proj.adjoint()) * Complex::new(T::lit(0.5), T::zero());
            let (vals, vecs) = hermitian_eigh(&proj);
            let mut worst = T::zero();
            let mut ritz = Vec::with_capacity(k);
            for c in 0..k {
                let y = vecs.column(c);
                let mut v = vec![Complex::new(T::zero(), T::zero()); dim];
                let mut r = v.clone();
                for (j, yj) in y.iter().enumerate() {
                    for i in 0..dim {
                        v[i] += basis[j][i] * *yj;
                        r[i] += images[j][i] * *yj;
                    }
                }
                r.iter_mut().zip(&v).for_each(|(ri, vi)| *ri -= *vi * vals[c]);
                worst = worst.max(norm(&r));
                ritz.push(v);
            }
            last_residual = worst.to_f64_lossy();
            if worst <= tol {
                let same = accepted.as_ref().is_some_and(|prev| {
                    prev.iter().zip(&vals).all(|(a, b)| (*a - *b).abs() <= tol)
                });
                if !same && m < max_dim {
                    accepted = Some(vals[..k].to_vec());
                    restart = true;
                }
            }
            if worst <= tol && !restart {
                let vectors = want_vectors.then(|| {
                    DMatrix::from_fn(dim, k, |i, c| ritz[c][i])
                });
                return Ok(Spectrum { values: vals[..k].to_vec(), vectors });
            }
            if m == max_dim {
                return Err(Error::NoConvergence { residual: last_residual });
            }
        }
        if m == max_dim {
            return Err(Error::NoConvergence { residual: last_residual });
        }
        if restart {
            restart = false;
            w = random_vector(&mut rng, dim);
        } else {
            w = hq;
        }
        orthogonalize(&mut w, &basis);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{Axis, PauliString};
    use crate::spectral::dense_eigenvalues;

    #[test]
    fn agrees_with_dense_including_degeneracy() {
        // Two decoupled copies give exactly degenerate levels.
        let mut terms = Vec::new();
        for &(a, b) in &[(0, 1), (2, 3), (4, 5)] {
            terms.push((1.0, PauliString::from_pairs([(a, Axis::Z), (b, Axis::Z)]).unwrap()));
            terms.push((0.4, PauliString::single(a, Axis::X)));
            terms.push((0.4, PauliString::single(b, Axis::X)));
        }
        let h = Hamiltonian::<f64>::from_terms(6, terms).unwrap();
        let dense = dense_eigenvalues(&h, 14).unwrap();
        let it = lanczos(&h, 4, &LanczosOptions::default(), true).unwrap();
        for i in 0..4 {
            assert!((dense[i] - it.values[i]).abs() < 1e-7, "{} vs {}", dense[i], it.values[i]);
        }
    }
}
