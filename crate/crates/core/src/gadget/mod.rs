//! Perturbation gadgets as rewrites `H_target -> H̃ = H + V`.
//!
//! Every gadget round allocates fresh mediator qubits after the existing
//! register, penalizes them with `Δ|1><1|`, and couples them to the operators
//! whose product it must reproduce. Compensation terms are recorded apart from
//! the couplings so the rewrite can be audited.

mod plan;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::geometry::{segment_intersection, Intersection};
use crate::graph::Point;
use crate::pauli::{Axis, Hamiltonian, PauliString};
use crate::scalar::Real;

pub use plan::{
    reduce_k_to_2, replay_plan, triangle_gadget, DeltaPolicy, ReductionConfig, ReductionPlan, RoundLedger, RoundSpec,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GadgetKind {
    Subdivision,
    ParallelSubdivision,
    ThreeToTwo,
    Cross,
    Fork,
    Triangle,
}

/// One rewrite inside a round, addressed by the Pauli strings it consumes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GadgetJob {
    /// Split `term` into the factor on `left` and the factor on the rest of its support.
    Subdivide { term: PauliString, left: Vec<usize> },
    /// Third-order gadget on a 3-local term; factors `A, B, C` in ascending qubit order.
    ThreeToTwo { term: PauliString },
    /// Remove the crossing between edges `ad` and `bc`.
    Cross { ad: PauliString, bc: PauliString },
    /// Merge edges `ab` and `ac` at `vertex`.
    Fork { vertex: usize, ab: PauliString, ac: PauliString },
}

impl GadgetJob {
    pub(crate) fn consumed(&self) -> Vec<&PauliString> {
        match self {
            GadgetJob::Subdivide { term, .. } | GadgetJob::ThreeToTwo { term } => vec![term],
            GadgetJob::Cross { ad, bc } => vec![ad, bc],
            GadgetJob::Fork { ab, ac, .. } => vec![ab, ac],
        }
    }

    fn kind(&self) -> GadgetKind {
        match self {
            GadgetJob::Subdivide { .. } => GadgetKind::Subdivision,
            GadgetJob::ThreeToTwo { .. } => GadgetKind::ThreeToTwo,
            GadgetJob::Cross { .. } => GadgetKind::Cross,
            GadgetJob::Fork { .. } => GadgetKind::Fork,
        }
    }
}

/// The operator a mediator couples to, and the product it is meant to produce.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct Coupling<T> {
    pub mediator: usize,
    /// `-A + B` (for the cross and fork gadgets, the full bracket of the coupling).
    pub operator: Hamiltonian<T>,
    /// `A⊗B⊗C`-type term generated at low energy.
    pub produced: Hamiltonian<T>,
}

/// One perturbative round: several jobs sharing a single `Δ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct GadgetApplication<T> {
    pub kind: GadgetKind,
    pub label: String,
    pub jobs: Vec<GadgetJob>,
    #[serde(rename = "mediator_qubits")]
    pub mediators: Vec<usize>,
    pub delta: T,
    pub epsilon_target: Option<T>,
    /// ε implied by `Δ` through the Δ-choice formula, with `C₂ = c2`.
    /// Absent for the 3-to-2 gadget, which has no closed-form Δ rule.
    pub epsilon_implied: Option<T>,
    pub c2: T,
    pub norm_h_else_prime: T,
    pub r: T,
    pub unperturbed: Hamiltonian<T>,
    pub perturbation: Hamiltonian<T>,
    #[serde(rename = "compensation_terms")]
    pub compensation: Hamiltonian<T>,
    pub couplings: Vec<Coupling<T>>,
    /// Hamiltonian reproduced on the low-energy space (identity on the mediators).
    pub target: Hamiltonian<T>,
    pub norm_v_bound: T,
    pub norm_ok: bool,
    pub warnings: Vec<String>,
}

impl<T: Real> GadgetApplication<T> {
    /// `H + V`.
    pub fn emitted(&self) -> Hamiltonian<T> {
        self.unperturbed.add(&self.perturbation)
    }

    pub fn num_qubits(&self) -> usize {
        self.unperturbed.num_qubits()
    }

    /// Cut between the mediator-free space and everything else.
    pub fn lambda_star(&self) -> T {
        self.delta / T::lit(2.0)
    }
}

/// Δ from the Δ-choice formula: `(|H_else'| + C₂ r)⁶ / ε²`.
pub fn choose_delta<T: Real>(norm_h_else_prime: T, r: T, epsilon: T, c2: T) -> Result<T> {
    if !(epsilon > T::zero()) || !(r > T::zero()) || c2 < T::lit(2f64.sqrt()) - T::lit(1e-12) || norm_h_else_prime < T::zero() {
        return Err(Error::InvalidParameter(format!(
            "choose_delta needs ε > 0, r > 0, C₂ ≥ √2, |H_else'| ≥ 0 (got ε={epsilon}, r={r}, C₂={c2}, norm={norm_h_else_prime})"
        )));
    }
    Ok((norm_h_else_prime + c2 * r).powi(6) / (epsilon * epsilon))
}

/// Inverse of [`choose_delta`]: `(|H_else'| + C₂ r)³ / √Δ`.
pub fn implied_epsilon<T: Real>(norm_h_else_prime: T, r: T, delta: T, c2: T) -> T {
    (norm_h_else_prime + c2 * r).powi(3) / delta.sqrt()
}

fn edge_parts<T: Real>(h: &Hamiltonian<T>, s: &PauliString) -> Result<(T, [(usize, Axis); 2])> {
    let pairs = s.pairs();
    if pairs.len() != 2 {
        return Err(Error::InvalidParameter(format!("{s} is not a 2-local edge")));
    }
    let c = h.coeff_of(s);
    if c == T::zero() {
        return Err(Error::InvalidParameter(format!("edge {s} is not a term of the Hamiltonian")));
    }
    Ok((c, [pairs[0], pairs[1]]))
}

fn pauli<T: Real>(n: usize, c: T, q: usize, a: Axis) -> Hamiltonian<T> {
    Hamiltonian::from_terms(n, [(c, PauliString::single(q, a))]).unwrap()
}

/// How the coefficient of a factored term is shared between its factors.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefficientSplit {
    /// Equal magnitudes on every factor, sign on the first.
    #[default]
    Balanced,
    /// The whole coefficient on the first factor. Keeps the gadget polynomial in the coefficient.
    Literal,
}

impl CoefficientSplit {
    fn split<T: Real>(self, c: T, root: T) -> (T, T) {
        match self {
            CoefficientSplit::Balanced => {
                let m = c.abs().powf(root);
                (if c < T::zero() { -m } else { m }, m)
            }
            CoefficientSplit::Literal => (c, T::one()),
        }
    }
}

enum Piece<T: Real> {
    Second { k: Hamiltonian<T>, produced: Hamiltonian<T> },
    Third { a: Hamiltonian<T>, b: Hamiltonian<T>, c: Hamiltonian<T> },
}

fn piece_for<T: Real>(
    h: &Hamiltonian<T>,
    job: &GadgetJob,
    n: usize,
    coords: Option<&[Point]>,
    split: CoefficientSplit,
) -> Result<Piece<T>> {
    match job {
        GadgetJob::Subdivide { term, left } => {
            let c = h.coeff_of(term);
            if c == T::zero() {
                return Err(Error::NotFactorable(format!("{term} is not a term of the Hamiltonian")));
            }
            let support = term.support();
            let left_set: BTreeSet<usize> = left.iter().copied().collect();
            if left_set.is_empty()
                || left_set.len() >= support.len()
                || !left_set.iter().all(|q| support.contains(q))
            {
                return Err(Error::NotFactorable(format!("split {left:?} of {term}")));
            }
            let right: Vec<usize> = support.iter().copied().filter(|q| !left_set.contains(q)).collect();
            let (ca, cb) = split.split(c, T::lit(0.5));
            let l: Vec<usize> = left_set.into_iter().collect();
            let a = Hamiltonian::from_terms(n, [(ca, term.restrict(&l))])?;
            let b = Hamiltonian::from_terms(n, [(cb, term.restrict(&right))])?;
            Ok(Piece::Second { k: b.sub(&a), produced: Hamiltonian::from_terms(n, [(c, term.clone())])? })
        }
        GadgetJob::ThreeToTwo { term } => {
            let c = h.coeff_of(term);
            let pairs = term.pairs();
            if c == T::zero() || pairs.len() != 3 {
                return Err(Error::NotFactorable(format!("{term} is not a 3-local term of the Hamiltonian")));
            }
            let (ca, cb) = split.split(c, T::lit(1.0 / 3.0));
            Ok(Piece::Third {
                a: pauli(n, ca, pairs[0].0, pairs[0].1),
                b: pauli(n, cb, pairs[1].0, pairs[1].1),
                c: pauli(n, cb, pairs[2].0, pairs[2].1),
            })
        }
        GadgetJob::Cross { ad, bc } => {
            let (alpha_ad, [(a, pa), (d, pd)]) = edge_parts(h, ad)?;
            let (alpha_bc, [(b, pb), (c, pc)]) = edge_parts(h, bc)?;
            let ids: BTreeSet<usize> = [a, b, c, d].into_iter().collect();
            if ids.len() != 4 {
                return Err(Error::NotCrossing(format!("{ad} and {bc} share a vertex")));
            }
            let pts = coords.ok_or(Error::MissingCoordinates(a))?;
            let get = |v: usize| pts.get(v).copied().ok_or(Error::MissingCoordinates(v));
            match segment_intersection(get(a)?, get(d)?, get(b)?, get(c)?) {
                Some(Intersection::Point(_)) => {}
                _ => return Err(Error::NotCrossing(format!("segments of {ad} and {bc} do not cross"))),
            }
            let k = pauli(n, -alpha_ad, a, pa)
                .add(&pauli(n, -alpha_bc, b, pb))
                .add(&pauli(n, T::one(), c, pc))
                .add(&pauli(n, T::one(), d, pd));
            let produced = Hamiltonian::from_terms(n, [(alpha_ad, ad.clone()), (alpha_bc, bc.clone())])?;
            Ok(Piece::Second { k, produced })
        }
        GadgetJob::Fork { vertex, ab, ac } => {
            let (alpha_ab, e1) = edge_parts(h, ab)?;
            let (alpha_ac, e2) = edge_parts(h, ac)?;
            let at = |e: [(usize, Axis); 2]| -> Result<(Axis, usize, Axis)> {
                if e[0].0 == *vertex {
                    Ok((e[0].1, e[1].0, e[1].1))
                } else if e[1].0 == *vertex {
                    Ok((e[1].1, e[0].0, e[0].1))
                } else {
                    Err(Error::InvalidParameter(format!("edge does not touch vertex {vertex}")))
                }
            };
            let (pa1, b, pb) = at(e1)?;
            let (pa2, c, pc) = at(e2)?;
            if pa1 != pa2 {
                return Err(Error::MismatchedAxis(format!("{ab} and {ac} at {vertex}")));
            }
            if b == c {
                return Err(Error::InvalidParameter(format!("{ab} and {ac} join the same pair")));
            }
            let k = pauli(n, T::one(), *vertex, pa1)
                .add(&pauli(n, -alpha_ab, b, pb))
                .add(&pauli(n, -alpha_ac, c, pc));
            let produced = Hamiltonian::from_terms(n, [(alpha_ab, ab.clone()), (alpha_ac, ac.clone())])?;
            Ok(Piece::Second { k, produced })
        }
    }
}

/// Apply `jobs` in parallel with a shared `Δ`.
///
/// `coords` is only consulted by the cross gadget to confirm the crossing.
pub fn apply_round<T: Real>(
    h: &Hamiltonian<T>,
    jobs: &[GadgetJob],
    delta: T,
    coords: Option<&[Point]>,
) -> Result<GadgetApplication<T>> {
    apply_round_with(h, jobs, delta, coords, CoefficientSplit::Balanced)
}

/// [`apply_round`] with an explicit rule for splitting factored coefficients.
pub fn apply_round_with<T: Real>(
    h: &Hamiltonian<T>,
    jobs: &[GadgetJob],
    delta: T,
    coords: Option<&[Point]>,
    split: CoefficientSplit,
) -> Result<GadgetApplication<T>> {
    if !(delta > T::zero()) {
        return Err(Error::InvalidParameter(format!("Δ must be positive, got {delta}")));
    }
    let mut seen: BTreeSet<&PauliString> = BTreeSet::new();
    for j in jobs {
        for s in j.consumed() {
            if !seen.insert(s) {
                return Err(Error::OverlappingJobs(format!("{s} is consumed twice")));
            }
        }
    }
    let n0 = h.num_qubits();
    let mut warnings = Vec::new();
    let mut pieces = Vec::new();
    for job in jobs {
        // Validate against the unexpanded register; mediators are added below.
        let p = piece_for(h, job, n0, coords, split)?;
        match &p {
            Piece::Second { k, .. } if k.is_empty() => {
                warnings.push(format!("coupling -A+B vanishes for {job:?}; job left as pass-through"));
                continue;
            }
            Piece::Third { a, b, c } => {
                if c.is_empty() {
                    warnings.push("three_to_two with C = 0 reduces to a plain subdivision".into());
                }
                if b.sub(a).is_empty() {
                    warnings.push("three_to_two with A = B: the X_w coupling vanishes".into());
                }
            }
            _ => {}
        }
        pieces.push((job.clone(), p));
    }
    let mut h_else = h.clone();
    for (job, _) in &pieces {
        for s in job.consumed() {
            h_else = h_else.without(s).map(|(_, rest)| rest).unwrap_or(h_else);
        }
    }
    assemble(h, &h_else, pieces, delta, warnings)
}

fn magnitudes<T: Real>(h: &Hamiltonian<T>) -> Hamiltonian<T> {
    Hamiltonian::from_terms(h.num_qubits(), h.terms().iter().map(|t| (t.coeff.abs(), t.string.clone())))
        .expect("same register")
}

fn assemble<T: Real>(
    h: &Hamiltonian<T>,
    h_else: &Hamiltonian<T>,
    pieces: Vec<(GadgetJob, Piece<T>)>,
    delta: T,
    mut warnings: Vec<String>,
) -> Result<GadgetApplication<T>> {
    let n0 = h.num_qubits();
    let n = n0 + pieces.len();
    let lift = |x: &Hamiltonian<T>| x.with_num_qubits(n).unwrap();
    let h_else = lift(h_else);
    let mut unperturbed = Hamiltonian::zero(n);
    let mut compensation = Hamiltonian::zero(n);
    // Per-string sum of |coefficients| fed into the compensation, the scale of any cancellation.
    let mut gross = Hamiltonian::zero(n);
    let mut coupling_sum = Hamiltonian::zero(n);
    let mut couplings = Vec::new();
    let mut mediators = Vec::new();
    let mut r = T::zero();
    let mut third_order = false;
    let half_delta_sqrt = (delta / T::lit(2.0)).sqrt();
    for (i, (job, piece)) in pieces.iter().enumerate() {
        let w = n0 + i;
        mediators.push(w);
        unperturbed = unperturbed.add(&Hamiltonian::excitation(n, w, delta));
        match piece {
            Piece::Second { k, produced } => {
                let (k, produced) = (lift(k), lift(produced));
                // Σ at z = 0 yields -K²/2; the compensation restores the intended product.
                let half_square = k.square().scale(T::lit(0.5));
                gross = gross.add(&magnitudes(&produced)).add(&magnitudes(&half_square));
                compensation = compensation.add(&produced).add(&half_square);
                coupling_sum = coupling_sum.add(&k.tensor_pauli(w, Axis::X, n)?.scale(half_delta_sqrt));
                r = r.max(k.norm_upper_bound() / T::lit(2.0));
                couplings.push(Coupling { mediator: w, operator: k, produced });
            }
            Piece::Third { a, b, c } => {
                third_order = true;
                let (a, b, c) = (lift(a), lift(b), lift(c));
                let k = b.sub(&a);
                let d13 = delta.powf(T::lit(1.0 / 3.0));
                let d23 = d13 * d13;
                let v_extra = k
                    .square()
                    .scale(d13 / T::lit(2.0))
                    .add(&a.square().add(&b.square()).jordan(&c).scale(T::lit(0.5)));
                gross = gross.add(&magnitudes(&v_extra));
                compensation = compensation.add(&v_extra);
                let x_part = k.tensor_pauli(w, Axis::X, n)?.scale(d23 / T::lit(2f64.sqrt()));
                let n_part = c.tensor_excited(w, n)?.scale(-d23);
                coupling_sum = coupling_sum.add(&x_part).add(&n_part);
                r = r
                    .max(a.norm_upper_bound())
                    .max(b.norm_upper_bound())
                    .max(c.norm_upper_bound());
                let produced = a.jordan(&b).jordan(&c);
                couplings.push(Coupling { mediator: w, operator: k, produced });
            }
        }
        let _ = job;
    }
    // Compensations cancel consumed terms only up to rounding; drop what is left of them.
    let tol = T::default_epsilon() * T::lit(64.0);
    let gross = gross.add(&magnitudes(&h_else));
    let sum = h_else.add(&compensation);
    let kept = sum.terms().iter().filter(|t| t.coeff.abs() > tol * gross.coeff_of(&t.string));
    let h_else_prime = Hamiltonian::from_terms(n, kept.map(|t| (t.coeff, t.string.clone())))?;
    let perturbation = h_else_prime.add(&coupling_sum);
    let c2 = T::lit(2f64.sqrt());
    let norm_h_else_prime = h_else_prime.norm_upper_bound();
    let epsilon_implied = if pieces.is_empty() {
        Some(T::zero())
    } else if third_order {
        None
    } else {
        Some(implied_epsilon(norm_h_else_prime, r, delta, c2))
    };
    let norm_v_bound = perturbation.norm_upper_bound();
    let norm_ok = norm_v_bound <= delta / T::lit(2.0);
    if !norm_ok && !pieces.is_empty() {
        warnings.push(format!("|V| ≤ {norm_v_bound} may exceed Δ/2 = {}", delta / T::lit(2.0)));
    }
    let kinds: BTreeSet<_> = pieces.iter().map(|(j, _)| j.kind() as u8).collect();
    let kind = match (pieces.first().map(|(j, _)| j.kind()), pieces.len(), kinds.len()) {
        (Some(GadgetKind::Subdivision), l, 1) if l > 1 => GadgetKind::ParallelSubdivision,
        (Some(k), _, _) => k,
        (None, _, _) => GadgetKind::ParallelSubdivision,
    };
    Ok(GadgetApplication {
        kind,
        label: format!("{kind:?}"),
        jobs: pieces.iter().map(|(j, _)| j.clone()).collect(),
        mediators,
        delta,
        epsilon_target: None,
        epsilon_implied,
        c2,
        norm_h_else_prime,
        r,
        unperturbed,
        perturbation,
        compensation,
        couplings,
        target: lift(h),
        norm_v_bound,
        norm_ok,
        warnings,
    })
}

/// Single subdivision of `term` along `left | rest`.
pub fn subdivide<T: Real>(h: &Hamiltonian<T>, term: &PauliString, left: &[usize], delta: T) -> Result<GadgetApplication<T>> {
    apply_round(h, &[GadgetJob::Subdivide { term: term.clone(), left: left.to_vec() }], delta, None)
}

/// Parallel subdivision: one mediator per job, one shared Δ.
pub fn subdivide_parallel<T: Real>(
    h: &Hamiltonian<T>,
    jobs: &[(PauliString, Vec<usize>)],
    delta: T,
) -> Result<GadgetApplication<T>> {
    let jobs: Vec<GadgetJob> = jobs
        .iter()
        .map(|(t, l)| GadgetJob::Subdivide { term: t.clone(), left: l.clone() })
        .collect();
    apply_round(h, &jobs, delta, None)
}

/// 3-to-2 gadget for `H_else + A⊗B⊗C` with explicit single-qubit factors.
pub fn three_to_two_factors<T: Real>(
    h_else: &Hamiltonian<T>,
    a: &Hamiltonian<T>,
    b: &Hamiltonian<T>,
    c: &Hamiltonian<T>,
    delta: T,
) -> Result<GadgetApplication<T>> {
    if !(delta > T::zero()) {
        return Err(Error::InvalidParameter(format!("Δ must be positive, got {delta}")));
    }
    let n = h_else.num_qubits();
    let mut qubits = Vec::new();
    let mut string = PauliString::identity();
    for f in [a, b, c] {
        if f.num_qubits() != n {
            return Err(Error::DimensionMismatch { expected: n, found: f.num_qubits() });
        }
        let t = match f.terms() {
            [t] if t.string.weight() == 1 => t,
            [] => {
                qubits.push(usize::MAX);
                continue;
            }
            _ => return Err(Error::InvalidParameter("three_to_two factors must be single-qubit Pauli terms".into())),
        };
        let (q, ax) = t.string.pairs()[0];
        if qubits.contains(&q) {
            return Err(Error::SharedSupport(format!("qubit {q} carries two factors")));
        }
        qubits.push(q);
        string.set(q, Some(ax));
    }
    let product = a.jordan(b).jordan(c);
    let h = h_else.add(&product);
    let mut warnings = Vec::new();
    if c.is_empty() {
        warnings.push("three_to_two with C = 0 reduces to a plain subdivision".into());
    }
    if b.sub(a).is_empty() {
        warnings.push("three_to_two with A = B: the X_w coupling vanishes".into());
    }
    let piece = Piece::Third { a: a.clone(), b: b.clone(), c: c.clone() };
    assemble(&h, h_else, vec![(GadgetJob::ThreeToTwo { term: string }, piece)], delta, warnings)
}

/// 3-to-2 gadget on a 3-local term of `h`.
pub fn three_to_two<T: Real>(h: &Hamiltonian<T>, term: &PauliString, delta: T) -> Result<GadgetApplication<T>> {
    apply_round(h, &[GadgetJob::ThreeToTwo { term: term.clone() }], delta, None)
}

pub fn cross_gadget<T: Real>(
    h: &Hamiltonian<T>,
    coords: &[Point],
    ad: &PauliString,
    bc: &PauliString,
    delta: T,
) -> Result<GadgetApplication<T>> {
    apply_round(h, &[GadgetJob::Cross { ad: ad.clone(), bc: bc.clone() }], delta, Some(coords))
}

pub fn fork_gadget<T: Real>(
    h: &Hamiltonian<T>,
    vertex: usize,
    ab: &PauliString,
    ac: &PauliString,
    delta: T,
) -> Result<GadgetApplication<T>> {
    apply_round(h, &[GadgetJob::Fork { vertex, ab: ab.clone(), ac: ac.clone() }], delta, None)
}

/// Balanced split of a support: the lower `⌈k/2⌉` qubits go left.
pub fn balanced_split(term: &PauliString) -> Vec<usize> {
    let s = term.support();
    s[..s.len().div_ceil(2)].to_vec()
}
