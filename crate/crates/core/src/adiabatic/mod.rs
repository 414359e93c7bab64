//! Hamiltonian families polynomial in `s`, their gadget rewrites, and spectral-gap scans.

mod encoding;

use std::collections::BTreeSet;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gadget::GadgetJob;
use crate::pauli::{Axis, Hamiltonian, PauliString};
use crate::scalar::Real;
use crate::spectral::sectored_lowest;

pub use encoding::{forbidden_penalty, ParticleState, FORBIDDEN_STATES, PARTICLE_ENCODING};

/// `H(s) = Σᵢ sⁱ Hᵢ` on one register.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(
    into = "PathRepr<T>",
    try_from = "PathRepr<T>",
    bound(serialize = "T: Real", deserialize = "T: Real")
)]
pub struct PolyPath<T: Real> {
    components: Vec<Hamiltonian<T>>,
}

#[derive(Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
struct PathComponent<T: Real> {
    degree: usize,
    hamiltonian: Hamiltonian<T>,
}

#[derive(Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
struct PathRepr<T: Real> {
    num_qubits: usize,
    components: Vec<PathComponent<T>>,
}

impl<T: Real> From<PolyPath<T>> for PathRepr<T> {
    fn from(p: PolyPath<T>) -> Self {
        let num_qubits = p.num_qubits();
        let components = p
            .components
            .into_iter()
            .enumerate()
            .map(|(degree, hamiltonian)| PathComponent { degree, hamiltonian })
            .collect();
        PathRepr { num_qubits, components }
    }
}

impl<T: Real> TryFrom<PathRepr<T>> for PolyPath<T> {
    type Error = Error;

    fn try_from(r: PathRepr<T>) -> Result<Self> {
        let p = r.components.iter().map(|c| c.degree + 1).max().unwrap_or(1);
        let mut components = vec![Hamiltonian::zero(r.num_qubits); p];
        for c in r.components {
            let h = c.hamiltonian.with_num_qubits(r.num_qubits)?;
            components[c.degree] = components[c.degree].add(&h);
        }
        PolyPath::new(components)
    }
}

impl<T: Real> PolyPath<T> {
    pub fn new(components: Vec<Hamiltonian<T>>) -> Result<Self> {
        let n = components
            .first()
            .ok_or_else(|| Error::InvalidParameter("a path needs at least one component".into()))?
            .num_qubits();
        if let Some(h) = components.iter().find(|h| h.num_qubits() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: h.num_qubits() });
        }
        Ok(PolyPath { components }.trimmed())
    }

    pub fn constant(h: Hamiltonian<T>) -> Self {
        PolyPath { components: vec![h] }
    }

    /// `(1 − s)·start + s·end`.
    pub fn interpolate(start: &Hamiltonian<T>, end: &Hamiltonian<T>) -> Result<Self> {
        PolyPath::new(vec![start.clone(), end.sub(start)])
    }

    fn trimmed(mut self) -> Self {
        while self.components.len() > 1 && self.components.last().is_some_and(|h| h.is_empty()) {
            self.components.pop();
        }
        self
    }

    pub fn num_qubits(&self) -> usize {
        self.components[0].num_qubits()
    }

    /// Highest power of `s` with a non-zero component.
    pub fn degree(&self) -> usize {
        self.components.len() - 1
    }

    pub fn components(&self) -> &[Hamiltonian<T>] {
        &self.components
    }

    pub fn component(&self, i: usize) -> Hamiltonian<T> {
        self.components.get(i).cloned().unwrap_or_else(|| Hamiltonian::zero(self.num_qubits()))
    }

    /// Upper bound on `‖Hᵢ‖` for every component.
    pub fn norm_ledger(&self) -> Vec<T> {
        self.components.iter().map(|h| h.norm_upper_bound()).collect()
    }

    /// Coefficient of `s` powers for one Pauli string.
    pub fn coeff_poly(&self, s: &PauliString) -> Vec<T> {
        self.components.iter().map(|h| h.coeff_of(s)).collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        let p = self.components.len().max(other.components.len());
        let components = (0..p).map(|i| self.component(i).add(&other.component(i))).collect();
        PolyPath { components }.trimmed()
    }

    pub fn scale(&self, k: T) -> Self {
        PolyPath { components: self.components.iter().map(|h| h.scale(k)).collect() }.trimmed()
    }

    /// Symmetrized product `(PQ + QP)/2`; degrees add.
    pub fn jordan(&self, other: &Self) -> Self {
        let n = self.num_qubits();
        let mut components = vec![Hamiltonian::zero(n); self.components.len() + other.components.len() - 1];
        for (i, a) in self.components.iter().enumerate() {
            for (j, b) in other.components.iter().enumerate() {
                if !a.is_empty() && !b.is_empty() {
                    components[i + j] = components[i + j].add(&a.jordan(b));
                }
            }
        }
        PolyPath { components }.trimmed()
    }

    pub fn square(&self) -> Self {
        self.jordan(self)
    }

    fn map(&self, f: impl Fn(&Hamiltonian<T>) -> Result<Hamiltonian<T>>) -> Result<Self> {
        Ok(PolyPath { components: self.components.iter().map(f).collect::<Result<_>>()? }.trimmed())
    }

    pub fn with_num_qubits(&self, n: usize) -> Result<Self> {
        self.map(|h| h.with_num_qubits(n))
    }

    /// The path with the Pauli string `s` removed from every component.
    pub fn without(&self, s: &PauliString) -> Self {
        let components = self
            .components
            .iter()
            .map(|h| h.without(s).map(|(_, rest)| rest).unwrap_or_else(|| h.clone()))
            .collect();
        PolyPath { components }.trimmed()
    }

    /// `c(s)·s_string` for the coefficient polynomial `c`.
    fn monomial(n: usize, c: &[T], s: &PauliString) -> Result<Self> {
        let components = c
            .iter()
            .map(|&x| Hamiltonian::from_terms(n, [(x, s.clone())]))
            .collect::<Result<Vec<_>>>()?;
        Ok(PolyPath { components }.trimmed())
    }
}

/// `Σ sⁱ Hᵢ` at one point of `[0, 1]`.
pub fn eval_path<T: Real>(path: &PolyPath<T>, s: T) -> Result<Hamiltonian<T>> {
    if !(s >= T::zero() && s <= T::one()) {
        return Err(Error::OutOfRange(format!("s = {s} is outside [0, 1]")));
    }
    let mut out = Hamiltonian::zero(path.num_qubits());
    let mut power = T::one();
    for h in &path.components {
        out = out.add(&h.scale(power));
        power *= s;
    }
    Ok(out)
}

/// Degree and norm bookkeeping for one gadget round applied to a path.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct PathRoundLedger<T> {
    pub delta: T,
    pub degree_in: usize,
    pub degree_out: usize,
    pub norms_in: Vec<T>,
    pub norms_out: Vec<T>,
    pub mediators: Vec<usize>,
}

impl<T: Real> PathRoundLedger<T> {
    /// Degree can at most double in one round.
    pub fn degree_ok(&self) -> bool {
        self.degree_out <= 2 * self.degree_in
    }
}

fn edge<T: Real>(path: &PolyPath<T>, s: &PauliString) -> Result<(Vec<T>, [(usize, Axis); 2])> {
    let pairs = s.pairs();
    if pairs.len() != 2 {
        return Err(Error::InvalidParameter(format!("{s} is not a Pauli edge")));
    }
    Ok((nonzero(path, s)?, [pairs[0], pairs[1]]))
}

fn nonzero<T: Real>(path: &PolyPath<T>, s: &PauliString) -> Result<Vec<T>> {
    let c = path.coeff_poly(s);
    if c.iter().all(|&x| x == T::zero()) {
        return Err(Error::NotFactorable(format!("{s} is not a term of the path")));
    }
    Ok(c)
}

fn pauli<T: Real>(n: usize, q: usize, a: Axis) -> PolyPath<T> {
    PolyPath::constant(Hamiltonian::from_terms(n, [(T::one(), PauliString::single(q, a))]).unwrap())
}

/// Apply one parallel gadget round to every `H(s)` at once.
///
/// Coefficients of gadgetized terms sit entirely on one factor, so couplings stay linear and
/// compensations quadratic in them. The result agrees term by term with
/// [`apply_round_with`](crate::gadget::apply_round_with) under
/// [`CoefficientSplit::Literal`](crate::gadget::CoefficientSplit::Literal) at every `s`.
pub fn gadgetize_path<T: Real>(
    path: &PolyPath<T>,
    jobs: &[GadgetJob],
    delta: T,
) -> Result<(PolyPath<T>, PathRoundLedger<T>)> {
    if !(delta > T::zero()) {
        return Err(Error::InvalidParameter(format!("Δ must be positive, got {delta}")));
    }
    let mut seen = BTreeSet::new();
    for j in jobs {
        for s in j.consumed() {
            if !seen.insert(s.clone()) {
                return Err(Error::OverlappingJobs(format!("{s} is consumed twice")));
            }
        }
    }
    let n0 = path.num_qubits();
    let n = n0 + jobs.len();
    let mut h_else = path.clone();
    for s in &seen {
        h_else = h_else.without(s);
    }
    let mut out = h_else.with_num_qubits(n)?;
    let half_delta_sqrt = (delta / T::lit(2.0)).sqrt();
    let one = |q: usize, a: Axis| pauli::<T>(n, q, a);
    for (i, job) in jobs.iter().enumerate() {
        let w = n0 + i;
        out = out.add(&PolyPath::constant(Hamiltonian::excitation(n, w, delta)));
        let (k, produced) = match job {
            GadgetJob::Subdivide { term, left } => {
                let c = nonzero(path, term)?;
                let support = term.support();
                if left.is_empty() || left.len() >= support.len() || !left.iter().all(|q| support.contains(q)) {
                    return Err(Error::NotFactorable(format!("split {left:?} of {term}")));
                }
                let right: Vec<usize> = support.iter().copied().filter(|q| !left.contains(q)).collect();
                let a = PolyPath::monomial(n, &c, &term.restrict(left))?;
                let b = PolyPath::monomial(n, &[T::one()], &term.restrict(&right))?;
                (b.add(&a.scale(-T::one())), PolyPath::monomial(n, &c, term)?)
            }
            GadgetJob::Fork { vertex, ab, ac } => {
                let (alpha_ab, e1) = edge(path, ab)?;
                let (alpha_ac, e2) = edge(path, ac)?;
                let far = |e: [(usize, Axis); 2]| if e[0].0 == *vertex { (e[0].1, e[1]) } else { (e[1].1, e[0]) };
                let ((pa, (b, pb)), (pa2, (c, pc))) = (far(e1), far(e2));
                if pa != pa2 {
                    return Err(Error::MismatchedAxis(format!("{ab} and {ac} at {vertex}")));
                }
                let k = one(*vertex, pa)
                    .add(&PolyPath::monomial(n, &alpha_ab, &PauliString::single(b, pb))?.scale(-T::one()))
                    .add(&PolyPath::monomial(n, &alpha_ac, &PauliString::single(c, pc))?.scale(-T::one()));
                let produced = PolyPath::monomial(n, &alpha_ab, ab)?.add(&PolyPath::monomial(n, &alpha_ac, ac)?);
                (k, produced)
            }
            GadgetJob::Cross { ad, bc } => {
                let (alpha_ad, [(a, pa), (d, pd)]) = edge(path, ad)?;
                let (alpha_bc, [(b, pb), (c, pc)]) = edge(path, bc)?;
                let k = PolyPath::monomial(n, &alpha_ad, &PauliString::single(a, pa))?
                    .add(&PolyPath::monomial(n, &alpha_bc, &PauliString::single(b, pb))?)
                    .scale(-T::one())
                    .add(&one(c, pc))
                    .add(&one(d, pd));
                let produced = PolyPath::monomial(n, &alpha_ad, ad)?.add(&PolyPath::monomial(n, &alpha_bc, bc)?);
                (k, produced)
            }
            GadgetJob::ThreeToTwo { term } => {
                let c = nonzero(path, term)?;
                let p = term.pairs();
                if p.len() != 3 {
                    return Err(Error::NotFactorable(format!("{term} is not 3-local")));
                }
                let a = PolyPath::monomial(n, &c, &PauliString::single(p[0].0, p[0].1))?;
                let (b, cc) = (one(p[1].0, p[1].1), one(p[2].0, p[2].1));
                let k = b.add(&a.scale(-T::one()));
                let d13 = delta.powf(T::lit(1.0 / 3.0));
                let d23 = d13 * d13;
                let v_extra = k
                    .square()
                    .scale(d13 / T::lit(2.0))
                    .add(&a.square().add(&b.square()).jordan(&cc).scale(T::lit(0.5)));
                let x_part = k.map(|h| h.tensor_pauli(w, Axis::X, n))?.scale(d23 / T::lit(2f64.sqrt()));
                let n_part = cc.map(|h| h.tensor_excited(w, n))?.scale(-d23);
                out = out.add(&v_extra).add(&x_part).add(&n_part);
                continue;
            }
        };
        out = out
            .add(&produced)
            .add(&k.square().scale(T::lit(0.5)))
            .add(&k.map(|h| h.tensor_pauli(w, Axis::X, n))?.scale(half_delta_sqrt));
    }
    let ledger = PathRoundLedger {
        delta,
        degree_in: path.degree(),
        degree_out: out.degree(),
        norms_in: path.norm_ledger(),
        norms_out: out.norm_ledger(),
        mediators: (n0..n).collect(),
    };
    Ok((out, ledger))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapScanConfig {
    /// Uniform grid size on `[0, 1]`.
    pub points: usize,
    /// Bisection around the smallest sampled gap stops at this spacing.
    pub refine_to: f64,
    /// Gaps below this are reported as zero and flagged degenerate.
    pub degeneracy_tol: f64,
    /// Largest number of non-conserved qubits handed to the dense solver.
    pub dense_cap: usize,
}

impl Default for GapScanConfig {
    fn default() -> Self {
        GapScanConfig { points: 101, refine_to: 1e-4, degeneracy_tol: 1e-9, dense_cap: 14 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct GapPoint<T> {
    pub s: T,
    pub lambda0: T,
    pub lambda1: T,
    pub gap: T,
    pub degenerate: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct GapScan<T> {
    /// Sorted by `s`.
    pub curve: Vec<GapPoint<T>>,
    pub min_gap: T,
    pub argmin: T,
    /// `s` values where neighbouring gaps differ by more than the Lipschitz bound.
    pub undersampled: Vec<T>,
}

impl<T: Real> GapScan<T> {
    /// Curve as CSV with columns `s,lambda0,lambda1,gap`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let io = |e: csv::Error| Error::Parse(e.to_string());
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["s", "lambda0", "lambda1", "gap"]).map_err(io)?;
        for p in &self.curve {
            w.write_record([p.s, p.lambda0, p.lambda1, p.gap].map(|x| x.to_string())).map_err(io)?;
        }
        w.flush().map_err(|e| Error::Parse(e.to_string()))
    }
}

fn gap_at<T: Real>(path: &PolyPath<T>, s: T, cfg: &GapScanConfig) -> Result<GapPoint<T>> {
    let h = eval_path(path, s)?;
    let low = sectored_lowest(&h, 2, cfg.dense_cap)?;
    let (lambda0, lambda1) = match low.as_slice() {
        [a, b, ..] => (*a, *b),
        [a] => (*a, *a),
        [] => return Err(Error::InvalidParameter("empty spectrum".into())),
    };
    let raw = lambda1 - lambda0;
    let degenerate = raw < T::lit(cfg.degeneracy_tol);
    Ok(GapPoint { s, lambda0, lambda1, gap: if degenerate { T::zero() } else { raw }, degenerate })
}

/// Gap between the two lowest levels across `s ∈ [0, 1]`, refined around the minimum.
pub fn gap_scan<T: Real>(path: &PolyPath<T>, cfg: &GapScanConfig) -> Result<GapScan<T>> {
    let m = cfg.points.max(2);
    let grid: Vec<T> = (0..m).map(|i| T::lit(i as f64 / (m - 1) as f64)).collect();
    gap_scan_on(path, &grid, cfg)
}

/// [`gap_scan`] on a caller-chosen grid.
pub fn gap_scan_on<T: Real>(path: &PolyPath<T>, grid: &[T], cfg: &GapScanConfig) -> Result<GapScan<T>> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("empty s grid".into()));
    }
    let mut curve: Vec<GapPoint<T>> = grid.par_iter().map(|&s| gap_at(path, s, cfg)).collect::<Result<_>>()?;
    let by_s = |a: &GapPoint<T>, b: &GapPoint<T>| a.s.partial_cmp(&b.s).unwrap();
    curve.sort_by(by_s);
    curve.dedup_by(|a, b| a.s == b.s);
    let argmin_index = |c: &[GapPoint<T>]| {
        (0..c.len()).min_by(|&i, &j| c[i].gap.partial_cmp(&c[j].gap).unwrap().then(i.cmp(&j))).unwrap()
    };
    // Bisect the two intervals around the current minimum until they are short enough.
    loop {
        let i = argmin_index(&curve);
        let lo = curve[i.saturating_sub(1)].s;
        let hi = curve[(i + 1).min(curve.len() - 1)].s;
        let s = curve[i].s;
        let half = T::lit(0.5);
        let mut fresh = Vec::new();
        if s - lo > T::lit(cfg.refine_to) {
            fresh.push((lo + s) * half);
        }
        if hi - s > T::lit(cfg.refine_to) {
            fresh.push((s + hi) * half);
        }
        if fresh.is_empty() {
            break;
        }
        let pts: Vec<GapPoint<T>> = fresh.par_iter().map(|&s| gap_at(path, s, cfg)).collect::<Result<_>>()?;
        curve.extend(pts);
        curve.sort_by(by_s);
    }
    let lip = T::lit(2.0) * path.norm_ledger().into_iter().fold(T::zero(), |a, b| a + b);
    let undersampled = curve
        .windows(2)
        .filter(|w| (w[1].gap - w[0].gap).abs() > lip * (w[1].s - w[0].s))
        .map(|w| w[0].s)
        .collect();
    let i = argmin_index(&curve);
    Ok(GapScan { min_gap: curve[i].gap, argmin: curve[i].s, curve, undersampled })
}
