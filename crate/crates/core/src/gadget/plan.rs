use serde::{Deserialize, Serialize};

use super::{apply_round, balanced_split, choose_delta, GadgetApplication, GadgetJob, GadgetKind};
use crate::error::{Error, Result};
use crate::graph::Point;
use crate::pauli::{Hamiltonian, PauliString};
use crate::scalar::Real;

/// How each round's Δ is picked.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum DeltaPolicy<T> {
    /// `Δ_k = base · growth^k` for round `k`; the implied ε is reported.
    Fixed { base: T, growth: T },
    /// Δ from the Δ-choice formula for second-order rounds; 3-to-2 rounds use `three_to_two_delta`.
    Formula { epsilon: T, c2: T, three_to_two_delta: T },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionConfig<T> {
    pub policy: DeltaPolicy<T>,
    pub max_rounds: usize,
}

impl<T: Real> Default for ReductionConfig<T> {
    fn default() -> Self {
        ReductionConfig { policy: DeltaPolicy::Fixed { base: T::lit(1e3), growth: T::lit(1e3) }, max_rounds: 16 }
    }
}

impl<T: Real> DeltaPolicy<T> {
    /// Δ for serial round `k` (zero-based) when the policy is fixed.
    pub fn fixed(&self, k: usize) -> Option<T> {
        match self {
            DeltaPolicy::Fixed { base, growth } => Some(*base * growth.powi(k as i32)),
            DeltaPolicy::Formula { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundLedger<T> {
    pub round: usize,
    pub kind: GadgetKind,
    pub label: String,
    pub delta: T,
    pub epsilon_implied: Option<T>,
    pub norm_in: T,
    pub norm_out: T,
    pub num_qubits: usize,
    pub locality: usize,
    pub mediators: Vec<usize>,
    pub norm_ok: bool,
}

/// Everything needed to reapply a round.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundSpec<T> {
    pub label: String,
    pub jobs: Vec<GadgetJob>,
    pub delta: T,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<Point>>,
}

/// Rounds applied in series; jobs inside a round act in parallel.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct ReductionPlan<T> {
    pub input: Hamiltonian<T>,
    pub specs: Vec<RoundSpec<T>>,
    #[serde(skip)]
    pub rounds: Vec<GadgetApplication<T>>,
    pub ledger: Vec<RoundLedger<T>>,
}

impl<T: Real> ReductionPlan<T> {
    pub fn new(input: Hamiltonian<T>) -> Self {
        ReductionPlan { input, specs: Vec::new(), rounds: Vec::new(), ledger: Vec::new() }
    }

    /// The Hamiltonian the next round acts on.
    pub fn current(&self) -> Hamiltonian<T> {
        self.rounds.last().map(|r| r.emitted()).unwrap_or_else(|| self.input.clone())
    }

    pub fn output(&self) -> Hamiltonian<T> {
        self.current()
    }

    pub fn serial_rounds(&self) -> usize {
        self.rounds.len()
    }

    /// Sum of the per-round implied ε; absent when some round has no closed form.
    pub fn epsilon_budget(&self) -> Option<T> {
        self.ledger.iter().try_fold(T::zero(), |acc, l| l.epsilon_implied.map(|e| acc + e))
    }

    /// Original qubits followed by every mediator in allocation order.
    pub fn mediators(&self) -> Vec<usize> {
        self.rounds.iter().flat_map(|r| r.mediators.iter().copied()).collect()
    }

    /// Apply one more round on top of [`Self::current`].
    pub fn push_round(
        &mut self,
        label: &str,
        jobs: Vec<GadgetJob>,
        delta: T,
        coords: Option<Vec<Point>>,
    ) -> Result<&GadgetApplication<T>> {
        let h = self.current();
        let mut app = apply_round(&h, &jobs, delta, coords.as_deref())?;
        app.label = label.to_string();
        let out = app.emitted();
        self.ledger.push(RoundLedger {
            round: self.rounds.len(),
            kind: app.kind,
            label: label.to_string(),
            delta,
            epsilon_implied: app.epsilon_implied,
            norm_in: h.norm_upper_bound(),
            norm_out: out.norm_upper_bound(),
            num_qubits: out.num_qubits(),
            locality: out.locality(),
            mediators: app.mediators.clone(),
            norm_ok: app.norm_ok,
        });
        self.specs.push(RoundSpec { label: label.to_string(), jobs, delta, coords });
        self.rounds.push(app);
        Ok(self.rounds.last().unwrap())
    }

    /// Append all rounds of `other`, which must start from this plan's current output.
    pub fn extend(&mut self, other: ReductionPlan<T>) -> Result<()> {
        for s in other.specs {
            self.push_round(&s.label, s.jobs, s.delta, s.coords)?;
        }
        Ok(())
    }
}

/// Rebuild a plan from its input and round specs.
pub fn replay_plan<T: Real>(input: &Hamiltonian<T>, specs: &[RoundSpec<T>]) -> Result<ReductionPlan<T>> {
    let mut plan = ReductionPlan::new(input.clone());
    for s in specs {
        plan.push_round(&s.label, s.jobs.clone(), s.delta, s.coords.clone())?;
    }
    Ok(plan)
}

fn round_delta<T: Real>(cfg: &ReductionConfig<T>, k: usize, h: &Hamiltonian<T>, jobs: &[GadgetJob]) -> Result<T> {
    match &cfg.policy {
        DeltaPolicy::Fixed { .. } => Ok(cfg.policy.fixed(k).unwrap()),
        DeltaPolicy::Formula { epsilon, c2, three_to_two_delta } => {
            if matches!(jobs.first(), Some(GadgetJob::ThreeToTwo { .. })) {
                return Ok(*three_to_two_delta);
            }
            // H_else' and r do not depend on Δ for second-order gadgets.
            let probe = apply_round(h, jobs, T::one(), None)?;
            choose_delta(probe.norm_h_else_prime, probe.r, *epsilon, *c2)
        }
    }
}

/// Parallel subdivision rounds down to 3-local, then 3-to-2 rounds down to 2-local.
pub fn reduce_k_to_2<T: Real>(h: &Hamiltonian<T>, cfg: &ReductionConfig<T>) -> Result<ReductionPlan<T>> {
    let mut plan = ReductionPlan::new(h.clone());
    loop {
        let cur = plan.current();
        let k = cur.locality();
        if k <= 2 {
            break;
        }
        if plan.serial_rounds() >= cfg.max_rounds {
            return Err(Error::PlanInfeasible(format!("locality {k} left after {} rounds", cfg.max_rounds)));
        }
        let (jobs, label): (Vec<GadgetJob>, _) = if k >= 4 {
            let jobs = cur
                .terms()
                .iter()
                .filter(|t| t.string.weight() >= 4)
                .map(|t| GadgetJob::Subdivide { term: t.string.clone(), left: balanced_split(&t.string) })
                .collect();
            (jobs, format!("subdivide {k}-local"))
        } else {
            let jobs = cur
                .terms()
                .iter()
                .filter(|t| t.string.weight() == 3)
                .map(|t| GadgetJob::ThreeToTwo { term: t.string.clone() })
                .collect();
            (jobs, "three_to_two".to_string())
        };
        let delta = round_delta(cfg, plan.serial_rounds(), &cur, &jobs)?;
        plan.push_round(&label, jobs, delta, None)?;
        if plan.current().locality() >= k {
            return Err(Error::PlanInfeasible(format!("round did not lower locality {k}")));
        }
    }
    Ok(plan)
}

/// Subdivide `ab` and `ac` next to `a`, then fork the two stubs.
pub fn triangle_gadget<T: Real>(
    h: &Hamiltonian<T>,
    a: usize,
    ab: &PauliString,
    ac: &PauliString,
    deltas: (T, T),
) -> Result<ReductionPlan<T>> {
    let mut plan = ReductionPlan::new(h.clone());
    let n0 = h.num_qubits();
    plan.push_round(
        "triangle subdivide",
        vec![
            GadgetJob::Subdivide { term: ab.clone(), left: vec![a] },
            GadgetJob::Subdivide { term: ac.clone(), left: vec![a] },
        ],
        deltas.0,
        None,
    )?;
    let stub = |w: usize| -> Result<PauliString> {
        let cur = plan.current();
        cur.terms()
            .iter()
            .map(|t| &t.string)
            .find(|s| s.weight() == 2 && s.axis(a).is_some() && s.axis(w).is_some())
            .cloned()
            .ok_or_else(|| Error::PlanInfeasible(format!("no stub between {a} and {w}")))
    };
    let (s1, s2) = (stub(n0)?, stub(n0 + 1)?);
    plan.push_round("triangle fork", vec![GadgetJob::Fork { vertex: a, ab: s1, ac: s2 }], deltas.1, None)?;
    for l in plan.ledger.iter_mut() {
        l.kind = GadgetKind::Triangle;
    }
    Ok(plan)
}
