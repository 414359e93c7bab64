//! Self-energy evaluation records and the perturbation-theory bound checkers.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Real, C};

use super::eigen::{hermitian_eigenvalues, hermitian_eigh};
use super::system::{operator_distance, SplitSystem};

/// Comparison of the exact and truncated self-energy at one `z`.
#[derive(Clone, Debug)]
pub struct SelfEnergyEval<T: Real> {
    pub z: C<T>,
    pub lambda_star: T,
    pub delta: T,
    pub lambda_plus: T,
    pub lambda_minus: T,
    pub exact: DMatrix<C<T>>,
    pub series: DMatrix<C<T>>,
    pub order: usize,
    pub discrepancy_norm: T,
    pub condition: f64,
}

pub fn evaluate_self_energy<T: Real>(sys: &SplitSystem<T>, z: C<T>, order: usize) -> Result<SelfEnergyEval<T>> {
    let (exact, condition) = sys.self_energy_resolvent(z)?;
    let series = sys.self_energy_series(z, order)?;
    let discrepancy_norm = operator_distance(&exact, &series)?;
    Ok(SelfEnergyEval {
        z,
        lambda_star: sys.lambda_star,
        delta: sys.delta(),
        lambda_plus: sys.lambda_plus,
        lambda_minus: sys.lambda_minus,
        exact,
        series,
        order,
        discrepancy_norm,
        condition,
    })
}

/// Outcome of one inequality check with every parameter echoed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub passed: bool,
    pub hypothesis_violated: bool,
    pub violations: Vec<String>,
    pub params: BTreeMap<String, f64>,
}

impl BoundCheck {
    fn new(name: &str, lhs: f64, rhs: f64, violations: Vec<String>, params: BTreeMap<String, f64>) -> Self {
        Self {
            name: name.to_string(),
            lhs,
            rhs,
            passed: lhs <= rhs + 1e-9,
            hypothesis_violated: !violations.is_empty(),
            violations,
            params,
        }
    }

    /// Passed with all hypotheses satisfied.
    pub fn certified(&self) -> bool {
        self.passed && !self.hypothesis_violated
    }
}

/// Sample points covering a disk: 32 on the circle and 9 along the real diameter.
pub fn disk_samples<T: Real>(center: T, r: T, boundary: usize) -> Vec<C<T>> {
    let mut out = Vec::with_capacity(boundary + 9);
    for k in 0..boundary {
        let th = 2.0 * std::f64::consts::PI * k as f64 / boundary as f64;
        out.push(Complex::new(center + r * T::lit(th.cos()), r * T::lit(th.sin())));
    }
    for k in 0..9 {
        out.push(Complex::new(center + r * T::lit(-1.0 + 2.0 * k as f64 / 8.0), T::zero()));
    }
    out
}

/// Largest `‖Σ₋(z) - H_eff‖` over the given points (Schur route).
pub fn sup_self_energy_error<T: Real>(
    sys: &SplitSystem<T>,
    h_eff: &DMatrix<C<T>>,
    points: &[C<T>],
) -> Result<T> {
    let mut worst = T::zero();
    for &z in points {
        let s = sys.self_energy_schur(z)?;
        worst = worst.max(operator_distance(&s, h_eff)?);
    }
    Ok(worst)
}

fn check_low_shape<T: Real>(sys: &SplitSystem<T>, h_eff: &DMatrix<C<T>>) -> Result<()> {
    if h_eff.nrows() != sys.low_dim() || h_eff.ncols() != sys.low_dim() {
        return Err(Error::DimensionMismatch { expected: sys.low_dim(), found: h_eff.nrows() });
    }
    Ok(())
}

fn f<T: Real>(x: T) -> f64 {
    x.to_f64_lossy()
}

/// Ascending eigenvalues of `H̃` below the cut against those of `H_eff`.
pub fn check_theorem4<T: Real>(
    sys: &SplitSystem<T>,
    h_eff: &DMatrix<C<T>>,
    epsilon: T,
    z_samples: usize,
) -> Result<BoundCheck> {
    check_low_shape(sys, h_eff)?;
    let eff = hermitian_eigenvalues(h_eff);
    let (a, b) = (eff[0], eff[eff.len() - 1]);
    let low = sys.low_eigenvalues();
    let mut violations = Vec::new();
    let half_gap = sys.delta() / T::lit(2.0);
    if sys.norm_v > half_gap {
        violations.push(format!("|V| = {} exceeds Δ/2 = {}", sys.norm_v, half_gap));
    }
    if b >= sys.lambda_star - epsilon {
        violations.push(format!("b = {b} not below λ* - ε = {}", sys.lambda_star - epsilon));
    }
    if low.len() != eff.len() {
        violations.push(format!("{} eigenvalues of H̃ below λ*, low space has dimension {}", low.len(), eff.len()));
    }
    let n = z_samples.max(2);
    let pts: Vec<C<T>> = (0..n)
        .map(|k| {
            let t = T::lit(k as f64 / (n - 1) as f64);
            Complex::new(a - epsilon + (b - a + epsilon + epsilon) * t, T::zero())
        })
        .collect();
    let sup = sup_self_energy_error(sys, h_eff, &pts)?;
    if sup > epsilon {
        violations.push(format!("sup |Σ(z) - H_eff| = {sup} exceeds ε = {epsilon} on [a-ε, b+ε]"));
    }
    let mut dev = T::zero();
    for (x, y) in low.iter().zip(&eff) {
        dev = dev.max((*x - *y).abs());
    }
    let params = BTreeMap::from([
        ("a".into(), f(a)),
        ("b".into(), f(b)),
        ("epsilon".into(), f(epsilon)),
        ("norm_v".into(), f(sys.norm_v)),
        ("delta".into(), f(sys.delta())),
        ("lambda_star".into(), f(sys.lambda_star)),
        ("measured_sup".into(), f(sup)),
        ("d".into(), eff.len() as f64),
    ]);
    Ok(BoundCheck::new("theorem4", f(dev), f(epsilon), violations, params))
}

/// Operator bound on `H̃` below the cut, applied after centring `H_eff` at zero.
pub fn check_theorem5<T: Real>(
    sys: &SplitSystem<T>,
    h_eff: &DMatrix<C<T>>,
    r: T,
    epsilon: T,
    boundary_samples: usize,
) -> Result<BoundCheck> {
    check_low_shape(sys, h_eff)?;
    let eff = hermitian_eigenvalues(h_eff);
    let (a, b) = (eff[0], eff[eff.len() - 1]);
    let z0 = (a + b) / T::lit(2.0);
    let w_eff = (b - a) / T::lit(2.0);
    // Shifting by -z0 leaves spectra and projectors unchanged and makes |H_eff| = w_eff.
    let lambda_plus = sys.lambda_plus - z0;
    let lambda_star = sys.lambda_star - z0;
    let mut violations = Vec::new();
    if sys.norm_v > sys.delta() / T::lit(2.0) {
        violations.push(format!("|V| = {} exceeds Δ/2", sys.norm_v));
    }
    if !(w_eff + epsilon < r) {
        violations.push(format!("b + ε < z0 + r fails (r = {r}, w_eff = {w_eff}, ε = {epsilon})"));
    }
    if !(r < lambda_star) {
        violations.push(format!("z0 + r < λ* fails (r = {r}, λ* - z0 = {lambda_star})"));
    }
    let sup = sup_self_energy_error(sys, h_eff, &disk_samples(z0, r, boundary_samples))?;
    if sup > epsilon {
        violations.push(format!("sup over the disk |Σ(z) - H_eff| = {sup} exceeds ε = {epsilon}"));
    }
    let denom1 = lambda_plus - w_eff - epsilon;
    let denom2 = (r - w_eff) * (r - w_eff - epsilon);
    if denom1 <= T::zero() || denom2 <= T::zero() {
        violations.push("bound denominators are not positive".into());
    }
    let rhs = T::lit(3.0) * (w_eff + epsilon) * sys.norm_v / denom1 + r * r * epsilon / denom2;

    // Low part of H̃ and H_eff, both in the shifted frame.
    let vals = &sys.h_tilde_values;
    let w = &sys.h_tilde_vectors;
    let k = vals.iter().filter(|&&x| x < sys.lambda_star).count();
    let low_vecs = w.columns(0, k);
    let diag = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        k,
        vals[..k].iter().map(|&x| Complex::new(x - z0, T::zero())),
    ));
    let ht_low = &low_vecs * diag * low_vecs.adjoint();
    let shifted_eff = h_eff - DMatrix::from_diagonal_element(h_eff.nrows(), h_eff.ncols(), Complex::new(z0, T::zero()));
    let lhs = operator_distance(&ht_low, &sys.embed_low(&shifted_eff))?;

    let params = BTreeMap::from([
        ("a".into(), f(a)),
        ("b".into(), f(b)),
        ("z0".into(), f(z0)),
        ("w_eff".into(), f(w_eff)),
        ("r".into(), f(r)),
        ("epsilon".into(), f(epsilon)),
        ("norm_v".into(), f(sys.norm_v)),
        ("lambda_plus".into(), f(sys.lambda_plus)),
        ("lambda_star".into(), f(sys.lambda_star)),
        ("energy_shift".into(), f(-z0)),
        ("norm_h_eff_shifted".into(), f(w_eff)),
        ("measured_sup".into(), f(sup)),
    ]);
    Ok(BoundCheck::new("theorem5", f(lhs), f(rhs), violations, params))
}

/// Projector bound for the `d`-fold ground space, applied with `λ_{0,eff}` shifted to zero.
pub fn check_lemma3<T: Real>(
    sys: &SplitSystem<T>,
    h_eff: &DMatrix<C<T>>,
    d: usize,
    r: T,
    epsilon: T,
    boundary_samples: usize,
) -> Result<BoundCheck> {
    check_low_shape(sys, h_eff)?;
    let (eff, eff_vecs) = hermitian_eigh(h_eff);
    if d == 0 || d >= eff.len() {
        return Err(Error::InvalidParameter(format!("d = {d} for a low space of dimension {}", eff.len())));
    }
    let scale = T::one().max(eff[eff.len() - 1].abs()).max(eff[0].abs());
    let tol = T::lit(1e-8) * scale;
    if eff[d] - eff[d - 1] < tol {
        return Err(Error::DegeneracyMismatch { expected: d, found: eff.iter().filter(|&&x| x - eff[0] < tol).count() });
    }
    let l0 = eff[0];
    let delta_eff = eff[d] - l0;
    let lambda_plus = sys.lambda_plus - l0;
    let mut violations = Vec::new();
    if eff[d - 1] - l0 >= tol {
        violations.push(format!("H_eff ground space is not {d}-fold degenerate"));
    }
    if sys.norm_v > sys.delta() / T::lit(2.0) {
        violations.push(format!("|V| = {} exceeds Δ/2", sys.norm_v));
    }
    if !(epsilon < r && r < delta_eff - epsilon) {
        violations.push(format!("ε < r < Δ_eff - ε fails (r = {r}, Δ_eff = {delta_eff}, ε = {epsilon})"));
    }
    let sup = sup_self_energy_error(sys, h_eff, &disk_samples(l0, r, boundary_samples))?;
    if sup > epsilon {
        violations.push(format!("sup over the disk |Σ(z) - H_eff| = {sup} exceeds ε = {epsilon}"));
    }
    let rhs = T::lit(3.0) * sys.norm_v / (lambda_plus - epsilon) + epsilon * r / (r * (r - epsilon));

    let low_t = sys.h_tilde_vectors.columns(0, d);
    let p_tilde = &low_t * low_t.adjoint();
    let g = eff_vecs.columns(0, d);
    let p_eff = sys.embed_low(&(&g * g.adjoint()));
    let lhs = operator_distance(&p_tilde, &p_eff)?;

    let params = BTreeMap::from([
        ("d".into(), d as f64),
        ("r".into(), f(r)),
        ("epsilon".into(), f(epsilon)),
        ("norm_v".into(), f(sys.norm_v)),
        ("lambda_plus".into(), f(sys.lambda_plus)),
        ("lambda_0_eff".into(), f(l0)),
        ("lambda_1_eff".into(), f(eff[d])),
        ("delta_eff".into(), f(delta_eff)),
        ("energy_shift".into(), f(-l0)),
        ("measured_sup".into(), f(sup)),
    ]);
    Ok(BoundCheck::new("lemma3", f(lhs), f(rhs), violations, params))
}
