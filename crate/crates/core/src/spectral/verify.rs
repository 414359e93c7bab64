//! One-call certification of a gadget round against the three bound checkers.

use serde::{Deserialize, Serialize};

use super::bounds::{check_lemma3, check_theorem4, check_theorem5, BoundCheck};
use super::eigen::hermitian_eigenvalues;
use super::system::SplitSystem;
use crate::error::Result;
use crate::gadget::GadgetApplication;
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    /// Fixed ε for every check. When absent each check takes 1.01× its measured self-energy error.
    pub epsilon: Option<f64>,
    /// Real-axis samples for the theorem-4 sup.
    pub z_samples: usize,
    /// Circle samples for the contour checks.
    pub boundary_samples: usize,
    pub dense_cap: usize,
    /// Relative tolerance for counting the ground-space degeneracy of `H_eff`.
    pub degeneracy_tol: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { epsilon: None, z_samples: 16, boundary_samples: 32, dense_cap: 12, degeneracy_tol: 1e-8 }
    }
}

const MARGIN: f64 = 1.01;

fn measured(c: &BoundCheck) -> f64 {
    c.params.get("measured_sup").copied().unwrap_or(f64::INFINITY)
}

/// Theorem 4, Theorem 5 and, when `H_eff` has a ground space smaller than the low space,
/// Lemma 3 for one gadget round. `H_eff` is the round's target restricted to mediators in `|0⟩`.
pub fn verify_gadget<T: Real>(app: &GadgetApplication<T>, opts: &VerifyOptions) -> Result<Vec<BoundCheck>> {
    let sys = SplitSystem::from_gadget(&app.unperturbed, &app.perturbation, app.delta, opts.dense_cap)?;
    let eff = sys.restrict_low(&app.target)?;
    let lit = T::lit;
    let pick = |probe: &BoundCheck| lit(opts.epsilon.unwrap_or(MARGIN * measured(probe)).max(1e-300));

    let seed = lit(opts.epsilon.unwrap_or(1.0));
    let t4 = check_theorem4(&sys, &eff, seed, opts.z_samples)?;
    let eps4 = pick(&t4);
    let t4 = check_theorem4(&sys, &eff, eps4, opts.z_samples)?;

    let vals = hermitian_eigenvalues(&eff);
    let (a, b) = (vals[0], vals[vals.len() - 1]);
    let z0 = (a + b) / lit(2.0);
    let w_eff = (b - a) / lit(2.0);
    // Geometric mean of the two ends of the admissible radius range.
    let room = sys.lambda_star - z0;
    let r5 = ((w_eff + eps4).max(lit(1e-3)) * room).sqrt();
    let t5 = check_theorem5(&sys, &eff, r5, eps4, opts.boundary_samples)?;
    let t5 = check_theorem5(&sys, &eff, r5, pick(&t5), opts.boundary_samples)?;
    let mut out = vec![t4, t5];

    let scale = a.abs().max(b.abs()).max(T::one());
    let d = vals.iter().filter(|&&x| x - a < lit(opts.degeneracy_tol) * scale).count();
    if d < vals.len() {
        let gap = vals[d] - a;
        let r3 = gap / lit(2.0);
        let l3 = check_lemma3(&sys, &eff, d, r3, eps4.min(r3 / lit(4.0)), opts.boundary_samples)?;
        let l3 = check_lemma3(&sys, &eff, d, r3, pick(&l3), opts.boundary_samples)?;
        out.push(l3);
    }
    Ok(out)
}
