use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use hamlower_core::adiabatic::{gap_scan, GapScanConfig, PolyPath};
use hamlower_core::clock::{build_h5, layout_and_schedule, CircuitIR};
use hamlower_core::gadget::{
    reduce_k_to_2, replay_plan, subdivide, DeltaPolicy, GadgetApplication, ReductionConfig, ReductionPlan,
};
use hamlower_core::graph::{build_graph, Point};
use hamlower_core::lattice::{self, lattice_violations, match_path_lengths, snap_and_route, PlanarizeConfig, RouteConfig};
use hamlower_core::pauli::{Axis, PauliString};
use hamlower_core::spectral::{verify_gadget, BoundCheck, VerifyOptions};
use hamlower_core::{Error, Hamiltonian, Result};

use crate::report::{read_json, Artifacts};
use crate::Options;

pub enum Outcome {
    Pass,
    BoundFailure,
}

fn params(opts: &Options, extra: Value) -> Value {
    let mut v = serde_json::to_value(opts).expect("options serialize");
    if let (Some(m), Value::Object(e)) = (v.as_object_mut(), extra) {
        m.extend(e);
    }
    v
}

pub fn compile(opts: &Options, circuit: &Path) -> Result<Outcome> {
    let c: CircuitIR<f64> = read_json(circuit)?;
    let layout = layout_and_schedule(&c)?;
    let ham = build_h5(&layout)?;
    let mut out = Artifacts::new(&opts.out_dir)?;
    let digest = out.json("h5.json", &ham.total)?;
    out.json("h5_parts.json", &ham)?;
    out.json("layout.json", &layout)?;
    let body = json!({
        "num_qubits": layout.num_qubits(),
        "num_computational": layout.num_computational,
        "T": layout.num_clock,
        "locality": ham.total.locality(),
        "num_terms": ham.total.len(),
        "h5_sha256": digest,
    });
    println!(
        "compile: N={} R={} -> {} qubits, T={}, {}-local, {} terms",
        c.row_len,
        c.rounds.len(),
        layout.num_qubits(),
        layout.num_clock,
        ham.total.locality(),
        ham.total.len()
    );
    out.finish("compile", params(opts, json!({ "circuit": circuit })), body, "pass")?;
    Ok(Outcome::Pass)
}

fn round_summary(app: &GadgetApplication<f64>) -> Value {
    json!({
        "label": app.label,
        "delta": app.delta,
        "epsilon_implied": app.epsilon_implied,
        "norm_h_else_prime": app.norm_h_else_prime,
        "r": app.r,
        "c2": app.c2,
        "norm_v_bound": app.norm_v_bound,
        "norm_ok": app.norm_ok,
        "mediators": app.mediators,
        "warnings": app.warnings,
    })
}

pub fn gadgetize(opts: &Options, path: &Path) -> Result<Outcome> {
    let h: Hamiltonian = read_json(path)?;
    let policy = match opts.epsilon {
        Some(epsilon) => DeltaPolicy::Formula { epsilon, c2: opts.c2, three_to_two_delta: opts.three_to_two_delta },
        None => DeltaPolicy::Fixed { base: opts.delta.unwrap_or(1e3), growth: opts.delta_growth.unwrap_or(1e3) },
    };
    let cfg = ReductionConfig { policy: policy.clone(), ..Default::default() };
    let plan = reduce_k_to_2(&h, &cfg)?;
    let output = plan.output();
    let mut out = Artifacts::new(&opts.out_dir)?;
    out.json("plan.json", &plan)?;
    let digest = out.json("hamiltonian.json", &output)?;
    let body = json!({
        "policy": policy,
        "rounds": plan.rounds.iter().map(round_summary).collect::<Vec<_>>(),
        "epsilon_budget": plan.epsilon_budget(),
        "num_qubits": output.num_qubits(),
        "locality": output.locality(),
        "output_sha256": digest,
    });
    println!("gadgetize: locality {} -> {} in {} rounds", h.locality(), output.locality(), plan.serial_rounds());
    for app in &plan.rounds {
        println!("  {:<24} Δ = {:.6e}  ε_implied = {:?}", app.label, app.delta, app.epsilon_implied);
    }
    out.finish("gadgetize", params(opts, json!({ "hamiltonian": path })), body, "pass")?;
    Ok(Outcome::Pass)
}

pub fn planarize(opts: &Options, path: &Path, coords: &Path) -> Result<Outcome> {
    let h: Hamiltonian = read_json(path)?;
    let pts: Vec<Point> = read_json(coords)?;
    let mut cfg = PlanarizeConfig::default();
    cfg.delta_base = opts.delta.unwrap_or(cfg.delta_base);
    cfg.delta_growth = opts.delta_growth.unwrap_or(cfg.delta_growth);
    let p = lattice::planarize(&h, &pts, &cfg)?;
    let g = p.graph();
    let mut out = Artifacts::new(&opts.out_dir)?;
    out.json("planarized.json", &p)?;
    out.json("coords.json", &p.coords)?;
    let digest = out.json("hamiltonian.json", &p.hamiltonian)?;
    let crossings = p.crossings().len();
    let body = json!({
        "config": cfg,
        "num_qubits": p.hamiltonian.num_qubits(),
        "num_original": p.num_original,
        "crossings": crossings,
        "max_pauli_degree": g.max_pauli_degree(),
        "stages": p.stages,
        "rounds": p.plan.rounds.iter().map(round_summary).collect::<Vec<_>>(),
        "output_sha256": digest,
    });
    println!(
        "planarize: {} -> {} qubits, {} crossings, max Pauli degree {}",
        h.num_qubits(),
        p.hamiltonian.num_qubits(),
        crossings,
        g.max_pauli_degree()
    );
    out.finish("planarize", params(opts, json!({ "hamiltonian": path, "coords": coords })), body, "pass")?;
    Ok(Outcome::Pass)
}

pub fn embed(opts: &Options, path: &Path, coords: &Path) -> Result<Outcome> {
    let h: Hamiltonian = read_json(path)?;
    let pts: Vec<Point> = read_json(coords)?;
    let g = build_graph(&h).with_coords(&pts)?;
    let mut cfg = RouteConfig::default();
    cfg.max_refinements = opts.grid_refinements.unwrap_or(cfg.max_refinements);
    let emb = snap_and_route(&g, &cfg)?;
    let delta = opts.delta.unwrap_or(1e5);
    let growth = opts.delta_growth.unwrap_or(1e2);
    let lat = match_path_lengths(&h, &emb, delta, growth)?;
    let violations = lattice_violations(&lat.hamiltonian, &lat.positions);
    let mut out = Artifacts::new(&opts.out_dir)?;
    out.json("embedding.json", &emb)?;
    out.json("lattice.json", &lat)?;
    let digest = out.json("hamiltonian.json", &lat.hamiltonian)?;
    let body = json!({
        "route": cfg,
        "spacing": emb.spacing,
        "refinements": emb.refinements,
        "path_lengths": emb.edges.iter().map(|e| e.len()).collect::<Vec<_>>(),
        "warnings": emb.warnings,
        "num_qubits": lat.hamiltonian.num_qubits(),
        "lattice_violations": violations.len(),
        "rounds": lat.plan.rounds.iter().map(round_summary).collect::<Vec<_>>(),
        "output_sha256": digest,
    });
    println!(
        "embed: spacing {} after {} refinements, {} qubits on the lattice",
        emb.spacing,
        emb.refinements,
        lat.hamiltonian.num_qubits()
    );
    out.finish("embed", params(opts, json!({ "hamiltonian": path, "coords": coords })), body, "pass")?;
    Ok(Outcome::Pass)
}

/// A plan file, or any report object carrying one under `"plan"`.
fn read_plan(path: &Path) -> Result<ReductionPlan<f64>> {
    let v: Value = read_json(path)?;
    let v = match v.get("plan") {
        Some(p) => p.clone(),
        None => v,
    };
    let plan: ReductionPlan<f64> = serde_json::from_value(v).map_err(|e| Error::Parse(e.to_string()))?;
    replay_plan(&plan.input, &plan.specs)
}

/// A 2-local target on `n ≤ 3` qubits with one term to subdivide.
fn random_instance(rng: &mut ChaCha8Rng, delta: f64) -> Result<GadgetApplication<f64>> {
    let n = rng.gen_range(2..=3);
    let axes = [Axis::X, Axis::Y, Axis::Z];
    let mut pick = || axes[rng.gen_range(0..3)];
    let (pa, pb) = (pick(), pick());
    let term = PauliString::from_pairs([(0, pa), (1, pb)])?;
    let mut terms = vec![(rng.gen_range(0.3..1.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 }, term.clone())];
    for q in 0..n {
        terms.push((rng.gen_range(-0.5..0.5), PauliString::single(q, axes[rng.gen_range(0..3)])));
    }
    if n == 3 {
        terms.push((rng.gen_range(-0.5..0.5), PauliString::from_pairs([(1, axes[rng.gen_range(0..3)]), (2, Axis::Z)])?));
    }
    let h = Hamiltonian::from_terms(n, terms)?;
    subdivide(&h, &term, &[0], delta)
}

pub fn verify(opts: &Options, plan: Option<&Path>, random: Option<usize>) -> Result<Outcome> {
    let vo = VerifyOptions {
        epsilon: opts.epsilon,
        z_samples: opts.z_samples,
        dense_cap: opts.dense_cap,
        ..Default::default()
    };
    let (apps, source): (Vec<GadgetApplication<f64>>, Value) = match (plan, random) {
        (Some(p), None) => (read_plan(p)?.rounds, json!({ "plan": p })),
        (None, Some(count)) => {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            let delta = opts.delta.unwrap_or(1e4);
            ((0..count).map(|_| random_instance(&mut rng, delta)).collect::<Result<_>>()?, json!({ "random": count }))
        }
        _ => return Err(Error::InvalidParameter("give either a plan file or --random".into())),
    };
    let mut rounds = Vec::new();
    let mut all: Vec<BoundCheck> = Vec::new();
    let mut skipped = 0;
    for (i, app) in apps.iter().enumerate() {
        match verify_gadget(app, &vo) {
            Ok(checks) => {
                rounds.push(json!({ "index": i, "label": app.label, "delta": app.delta, "checks": checks }));
                all.extend(checks);
            }
            Err(Error::DenseDimensionExceeded { num_qubits, cap }) => {
                skipped += 1;
                rounds.push(json!({ "index": i, "label": app.label, "skipped": format!("{num_qubits} qubits over the dense cap {cap}") }));
            }
            Err(e) => return Err(e),
        }
    }
    if all.is_empty() {
        return Err(Error::DenseDimensionExceeded { num_qubits: apps.iter().map(|a| a.num_qubits()).min().unwrap_or(0), cap: opts.dense_cap });
    }
    let failed = all.iter().filter(|c| !c.passed).count();
    let uncertified = all.iter().filter(|c| c.hypothesis_violated).count();
    let status = if failed == 0 { "pass" } else { "bound_failure" };
    let out = Artifacts::new(&opts.out_dir)?;
    let body = json!({
        "rounds": rounds,
        "checks": all.len(),
        "failed": failed,
        "hypothesis_violated": uncertified,
        "skipped_rounds": skipped,
    });
    println!("verify: {} checks, {} failed, {} with violated hypotheses, {} rounds skipped", all.len(), failed, uncertified, skipped);
    for c in all.iter().filter(|c| !c.passed) {
        println!("  FAIL {}: {} > {}", c.name, c.lhs, c.rhs);
    }
    out.finish("verify", params(opts, source), body, status)?;
    Ok(if failed == 0 { Outcome::Pass } else { Outcome::BoundFailure })
}

pub fn scan_gap(opts: &Options, path: &Path, points: usize) -> Result<Outcome> {
    let p: PolyPath<f64> = read_json(path)?;
    let mut cfg = GapScanConfig { points, degeneracy_tol: opts.tol, dense_cap: opts.dense_cap, ..Default::default() };
    if let Some(k) = opts.grid_refinements {
        cfg.refine_to = 1.0 / (points.max(2) - 1) as f64 / 2f64.powi(k as i32);
    }
    let scan = gap_scan(&p, &cfg)?;
    let mut csv = Vec::new();
    scan.write_csv(&mut csv)?;
    let mut out = Artifacts::new(&opts.out_dir)?;
    out.raw("gap_curve.csv", &csv)?;
    out.json("gap_scan.json", &scan)?;
    let body = json!({
        "config": cfg,
        "degree": p.degree(),
        "norms": p.norm_ledger(),
        "min_gap": scan.min_gap,
        "argmin": scan.argmin,
        "samples": scan.curve.len(),
        "undersampled": scan.undersampled,
    });
    println!("scan-gap: min gap {} at s = {} over {} samples", scan.min_gap, scan.argmin, scan.curve.len());
    out.finish("scan-gap", params(opts, json!({ "path": path })), body, "pass")?;
    Ok(Outcome::Pass)
}

pub fn replay(opts: &Options, path: &Path) -> Result<Outcome> {
    let plan = read_plan(path)?;
    let output = plan.output();
    let mut out = Artifacts::new(&opts.out_dir)?;
    let digest = out.json("hamiltonian.json", &output)?;
    let body = json!({ "rounds": plan.serial_rounds(), "num_qubits": output.num_qubits(), "output_sha256": digest });
    println!("replay: {} rounds -> {}", plan.serial_rounds(), digest);
    out.finish("replay", params(opts, json!({ "plan": path })), body, "pass")?;
    Ok(Outcome::Pass)
}
