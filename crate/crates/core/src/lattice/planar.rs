//! Planarization: localize, halve degrees, thin and localize crossings,
//! remove them with cross gadgets, then fix the degree-4 mediators.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gadget::{GadgetJob, ReductionPlan};
use crate::graph::geometry::{convex_hull, in_convex, segment_intersection};
use crate::graph::{audit_geometry, build_graph, Crossing, InteractionGraph, PauliEdge, Point, SparsityLimits};
use crate::pauli::{Axis, Hamiltonian, PauliString};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanarizeConfig<T> {
    /// Δ of serial round `k` is `delta_base · delta_growth^k`.
    pub delta_base: T,
    pub delta_growth: T,
    /// Where a localizing mediator sits along an edge, measured from the vertex.
    pub localize_fraction: f64,
    /// Distance of crossing-localization mediators from the crossing, relative to the shorter half-edge.
    pub crossing_offset: f64,
    pub max_localize_rounds: usize,
    pub limits: SparsityLimits,
}

impl<T: Real> Default for PlanarizeConfig<T> {
    fn default() -> Self {
        PlanarizeConfig {
            delta_base: T::lit(1e2),
            delta_growth: T::lit(1e2),
            localize_fraction: 0.25,
            crossing_offset: 0.25,
            max_localize_rounds: 4,
            limits: SparsityLimits::default(),
        }
    }
}

/// Rounds `first..last` of the plan belong to one proof step.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stage {
    pub name: String,
    pub first_round: usize,
    pub end_round: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct Planarized<T> {
    pub hamiltonian: Hamiltonian<T>,
    pub plan: ReductionPlan<T>,
    pub coords: Vec<Point>,
    pub num_original: usize,
    pub stages: Vec<Stage>,
}

impl<T: Real> Planarized<T> {
    pub fn graph(&self) -> InteractionGraph<T> {
        build_graph(&self.hamiltonian).with_coords(&self.coords).expect("coordinates cover every qubit")
    }

    pub fn crossings(&self) -> Vec<Crossing> {
        crossings_of(&self.hamiltonian, &self.coords)
    }

    pub fn stage(&self, name: &str) -> Option<&Stage> {
        self.stages.iter().find(|s| s.name == name)
    }
}

fn crossings_of<T: Real>(h: &Hamiltonian<T>, coords: &[Point]) -> Vec<Crossing> {
    let g = build_graph(h).with_coords(coords).expect("coordinates cover every qubit");
    let loose = SparsityLimits {
        max_hyperedges_per_vertex: usize::MAX,
        max_overlaps_per_hyperedge: usize::MAX,
        max_hyperedge_area: f64::INFINITY,
        max_term_diameter: None,
    };
    audit_geometry(&g, &loose).expect("coordinates present").1
}

struct Work<'a, T: Real> {
    plan: ReductionPlan<T>,
    coords: Vec<Point>,
    cfg: &'a PlanarizeConfig<T>,
    stages: Vec<Stage>,
}

impl<T: Real> Work<'_, T> {
    fn current(&self) -> Hamiltonian<T> {
        self.plan.current()
    }

    fn graph(&self) -> InteractionGraph<T> {
        build_graph(&self.current()).with_coords(&self.coords).expect("coordinates cover every qubit")
    }

    fn push(&mut self, label: &str, jobs: Vec<GadgetJob>, positions: Vec<Point>) -> Result<()> {
        if jobs.is_empty() {
            return Ok(());
        }
        let k = self.plan.serial_rounds() as i32;
        let delta = self.cfg.delta_base * self.cfg.delta_growth.powi(k);
        let n_jobs = jobs.len();
        let app = self.plan.push_round(label, jobs, delta, Some(self.coords.clone()))?;
        if app.mediators.len() != n_jobs {
            return Err(Error::PlanInfeasible(format!("{label}: a job degenerated to a pass-through")));
        }
        self.coords.extend(positions);
        Ok(())
    }

    fn stage<F: FnOnce(&mut Self) -> Result<()>>(&mut self, name: &str, f: F) -> Result<()> {
        let first = self.plan.serial_rounds();
        f(self)?;
        self.stages.push(Stage { name: name.into(), first_round: first, end_round: self.plan.serial_rounds() });
        Ok(())
    }

    /// The 2-local term on exactly `{u, v}`.
    fn edge_between(&self, u: usize, v: usize) -> Result<PauliString> {
        self.current()
            .terms()
            .iter()
            .map(|t| &t.string)
            .find(|s| s.weight() == 2 && s.axis(u).is_some() && s.axis(v).is_some())
            .cloned()
            .ok_or_else(|| Error::PlanInfeasible(format!("no edge between {u} and {v}")))
    }
}

fn high_original<T: Real>(g: &InteractionGraph<T>, v: usize) -> bool {
    let d = g.pauli_degrees(v).unwrap();
    d.total > 3 || d.max_axis() > 1
}

fn angle(from: Point, to: Point) -> f64 {
    (to.y - from.y).atan2(to.x - from.x)
}

/// Widest opening a mediator triangle is given at its vertex.
const MAX_WEDGE: f64 = 2.0 * std::f64::consts::FRAC_PI_3;

/// Signed angle in `(-π, π]`.
fn wrap(t: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let t = t.rem_euclid(TAU);
    if t > PI {
        t - TAU
    } else {
        t
    }
}

/// Pair angularly consecutive edges, choosing the offset whose widest pair is narrowest.
fn angular_pairs(p: Point, ends: &[(usize, Point)]) -> Vec<(usize, usize)> {
    let mut es: Vec<(f64, usize)> = ends.iter().map(|&(i, q)| (angle(p, q), i)).collect();
    es.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let k = es.len();
    if k < 2 {
        return Vec::new();
    }
    let pairs_at = |s: usize| -> Vec<(usize, usize)> {
        (0..k / 2).map(|i| (es[(s + 2 * i) % k].1, es[(s + 2 * i + 1) % k].1)).collect()
    };
    let widest = |s: usize| {
        (0..k / 2)
            .map(|i| wrap(es[(s + 2 * i + 1) % k].0 - es[(s + 2 * i) % k].0).abs())
            .fold(0.0, f64::max)
    };
    let offsets = if k % 2 == 0 { 2 } else { k };
    let best = (0..offsets)
        .min_by(|&a, &b| widest(a).partial_cmp(&widest(b)).unwrap().then(a.cmp(&b)))
        .unwrap();
    pairs_at(best)
}

/// Pauli-edge indices at `v` in counter-clockwise order.
fn angular_edges<T: Real>(g: &InteractionGraph<T>, v: usize, coords: &[Point]) -> Vec<usize> {
    let mut e = g.incident(v);
    e.sort_by(|&i, &j| {
        let ai = angle(coords[v], coords[g.pauli_edges[i].other(v)]);
        let aj = angle(coords[v], coords[g.pauli_edges[j].other(v)]);
        ai.partial_cmp(&aj).unwrap()
    });
    e
}

/// Point of the triangle farthest from all three sides.
fn incenter(a: Point, b: Point, c: Point) -> Point {
    let (la, lb, lc) = (b.dist(c), a.dist(c), a.dist(b));
    let s = la + lb + lc;
    Point::new((la * a.x + lb * b.x + lc * c.x) / s, (la * a.y + lb * b.y + lc * c.y) / s)
}

/// Subdivide `edges` next to their vertex, then fork the stubs pairwise.
fn triangle_round<T: Real>(w: &mut Work<'_, T>, label: &str, pairs: &[(usize, PauliString, PauliString)]) -> Result<()> {
    let f = w.cfg.localize_fraction;
    let n0 = w.current().num_qubits();
    let mut jobs = Vec::new();
    let mut pos = Vec::new();
    for (v, e1, e2) in pairs {
        let others = [e1, e2].map(|e| e.support().into_iter().find(|q| q != v).unwrap());
        // Same distance along both edges keeps the mediator triangle isosceles.
        let p = w.coords[*v];
        let d = f * others.iter().map(|&o| p.dist(w.coords[o])).fold(f64::INFINITY, f64::min);
        let (t1, t2) = (angle(p, w.coords[others[0]]), angle(p, w.coords[others[1]]));
        let wedge = wrap(t2 - t1);
        let dirs = if wedge.abs() > MAX_WEDGE {
            // A nearly straight pair would give a flat triangle; fold the stubs towards each other.
            let mid = t1 + wedge / 2.0;
            let half = MAX_WEDGE / 2.0 * wedge.signum();
            [mid - half, mid + half]
        } else {
            [t1, t2]
        };
        for (e, t) in [e1, e2].into_iter().zip(dirs) {
            jobs.push(GadgetJob::Subdivide { term: e.clone(), left: vec![*v] });
            pos.push(Point::new(p.x + d * t.cos(), p.y + d * t.sin()));
        }
    }
    w.push(&format!("{label}: subdivide"), jobs, pos)?;
    let mut jobs = Vec::new();
    let mut pos = Vec::new();
    for (i, (v, _, _)) in pairs.iter().enumerate() {
        let (m1, m2) = (n0 + 2 * i, n0 + 2 * i + 1);
        let (s1, s2) = (w.edge_between(*v, m1)?, w.edge_between(*v, m2)?);
        jobs.push(GadgetJob::Fork { vertex: *v, ab: s1, ac: s2 });
        pos.push(incenter(w.coords[*v], w.coords[m1], w.coords[m2]));
    }
    w.push(&format!("{label}: fork"), jobs, pos)
}

/// Rewrite a drawn 2-local Hamiltonian into a planar one of Pauli degree at most 3.
pub fn planarize<T: Real>(h: &Hamiltonian<T>, coords: &[Point], cfg: &PlanarizeConfig<T>) -> Result<Planarized<T>> {
    if h.locality() > 2 {
        return Err(Error::PlanInfeasible(format!("input is {}-local; reduce to 2-local first", h.locality())));
    }
    let n0 = h.num_qubits();
    let g0 = build_graph(h).with_coords(coords)?;
    let (report, _) = audit_geometry(&g0, &cfg.limits)?;
    if !report.passes() {
        return Err(Error::AuditFailed(report.violations.join("; ")));
    }
    let mut w = Work { plan: ReductionPlan::new(h.clone()), coords: coords[..n0].to_vec(), cfg, stages: Vec::new() };

    w.stage("localize vertices", |w| {
        let g = w.graph();
        let high: BTreeSet<usize> = (0..n0).filter(|&v| high_original(&g, v)).collect();
        let mut jobs = Vec::new();
        let mut pos = Vec::new();
        for e in &g.pauli_edges {
            let (ha, hb) = (high.contains(&e.a), high.contains(&e.b));
            if !(ha || hb) {
                continue;
            }
            let (pa, pb) = (w.coords[e.a], w.coords[e.b]);
            let (left, p) = match (ha, hb) {
                (true, true) => (e.a, pa.lerp(pb, 0.5)),
                (true, false) => (e.a, pa.lerp(pb, cfg.localize_fraction)),
                _ => (e.b, pb.lerp(pa, cfg.localize_fraction)),
            };
            jobs.push(GadgetJob::Subdivide { term: e.string(), left: vec![left] });
            pos.push(p);
        }
        w.push("localize vertices", jobs, pos)
    })?;

    w.stage("halve degrees", |w| {
        for round in 0.. {
            let g = w.graph();
            let high: Vec<usize> = (0..n0).filter(|&v| high_original(&g, v)).collect();
            if high.is_empty() {
                break;
            }
            if round >= 8 {
                return Err(Error::PlanInfeasible("degree halving did not terminate".into()));
            }
            let mut pairs = Vec::new();
            for v in high {
                for axis in Axis::ALL {
                    let ends: Vec<(usize, Point)> = g
                        .incident(v)
                        .into_iter()
                        .filter(|&i| g.pauli_edges[i].axis_at(v) == Some(axis))
                        .map(|i| (i, w.coords[g.pauli_edges[i].other(v)]))
                        .collect();
                    for (a, b) in angular_pairs(w.coords[v], &ends) {
                        pairs.push((v, g.pauli_edges[a].string(), g.pauli_edges[b].string()));
                    }
                }
            }
            triangle_round(w, &format!("halve degrees {round}"), &pairs)?;
        }
        Ok(())
    })?;

    w.stage("thin crossings", |w| {
        for round in 0.. {
            let g = w.graph();
            let cr = crossings_of(&w.current(), &w.coords);
            if let Some(c) = cr.iter().find(|c| c.collinear) {
                return Err(Error::PlanInfeasible(format!("collinear overlap at ({}, {})", c.point.x, c.point.y)));
            }
            let mut jobs = Vec::new();
            let mut pos = Vec::new();
            for (i, e) in g.pauli_edges.iter().enumerate() {
                let (pa, pb) = (w.coords[e.a], w.coords[e.b]);
                let mut ts: Vec<f64> = cr
                    .iter()
                    .filter(|c| c.edge_a == i || c.edge_b == i)
                    .map(|c| c.point.dist(pa) / pa.dist(pb))
                    .collect();
                if ts.len() < 2 {
                    continue;
                }
                ts.sort_by(|x, y| x.partial_cmp(y).unwrap());
                let k = ts.len() / 2;
                jobs.push(GadgetJob::Subdivide { term: e.string(), left: vec![e.a] });
                pos.push(pa.lerp(pb, (ts[k - 1] + ts[k]) / 2.0));
            }
            if jobs.is_empty() {
                break;
            }
            if round >= 8 {
                return Err(Error::PlanInfeasible("crossing thinning did not terminate".into()));
            }
            w.push(&format!("thin crossings {round}"), jobs, pos)?;
        }
        Ok(())
    })?;

    w.stage("localize crossings", |w| {
        for round in 0.. {
            let g = w.graph();
            let cr = crossings_of(&w.current(), &w.coords);
            let mut jobs = Vec::new();
            let mut pos = Vec::new();
            for c in &cr {
                let (e, f) = (&g.pauli_edges[c.edge_a], &g.pauli_edges[c.edge_b]);
                let mut d = f64::INFINITY;
                for x in [e.a, e.b, f.a, f.b] {
                    d = d.min(w.coords[x].dist(c.point));
                }
                d *= cfg.crossing_offset;
                let quad_ok = localized(w, &g, c, e, f, n0);
                for edge in [e, f] {
                    // Endpoints that are originals, busy, or far from the crossing still need a mediator.
                    let far = [edge.a, edge.b].into_iter().find(|&x| {
                        x < n0 || g.pauli_degrees(x).unwrap().total > 2 || !quad_ok
                    });
                    if let Some(x) = far {
                        let dir = w.coords[x];
                        let len = dir.dist(c.point);
                        jobs.push(GadgetJob::Subdivide { term: edge.string(), left: vec![x] });
                        pos.push(c.point.lerp(dir, d / len));
                    }
                }
            }
            if jobs.is_empty() {
                break;
            }
            if round >= cfg.max_localize_rounds {
                return Err(Error::PlanInfeasible(format!("crossings not localized after {round} rounds")));
            }
            w.push(&format!("localize crossings {round}"), jobs, pos)?;
        }
        Ok(())
    })?;

    w.stage("cross", |w| {
        let g = w.graph();
        let cr = crossings_of(&w.current(), &w.coords);
        let jobs = cr
            .iter()
            .map(|c| GadgetJob::Cross { ad: g.pauli_edges[c.edge_a].string(), bc: g.pauli_edges[c.edge_b].string() })
            .collect();
        let pos = cr.iter().map(|c| c.point).collect();
        w.push("cross", jobs, pos)
    })?;

    w.stage("trim mediators", |w| {
        for round in 0.. {
            let g = w.graph();
            let heavy: Vec<usize> = (0..g.num_vertices).filter(|&v| g.pauli_degrees(v).unwrap().total > 3).collect();
            if heavy.is_empty() {
                break;
            }
            if round >= 4 {
                return Err(Error::PlanInfeasible("degree-4 vertices remain".into()));
            }
            let options: Vec<Vec<(usize, usize)>> = heavy
                .iter()
                .map(|&v| {
                    let es = angular_edges(&g, v, &w.coords);
                    let k = es.len();
                    let mut pairs: Vec<(usize, usize)> = (0..k)
                        .map(|i| (es[i], es[(i + 1) % k]))
                        .filter(|(a, b)| g.pauli_edges[*a].axis_at(v) == g.pauli_edges[*b].axis_at(v))
                        .collect();
                    // Narrow wedges first: they give the fattest mediator triangles.
                    let wedge = |&(a, b): &(usize, usize)| {
                        let p = w.coords[v];
                        let ta = angle(p, w.coords[g.pauli_edges[a].other(v)]);
                        let tb = angle(p, w.coords[g.pauli_edges[b].other(v)]);
                        (tb - ta).rem_euclid(std::f64::consts::TAU)
                    };
                    pairs.sort_by(|x, y| wedge(x).partial_cmp(&wedge(y)).unwrap());
                    pairs
                })
                .collect();
            let choice = pick_disjoint(&options)
                .ok_or_else(|| Error::PlanInfeasible("no edge-disjoint pairing for the triangle round".into()))?;
            let pairs: Vec<_> = heavy
                .iter()
                .zip(&choice)
                .map(|(&v, &(a, b))| (v, g.pauli_edges[a].string(), g.pauli_edges[b].string()))
                .collect();
            triangle_round(w, &format!("trim mediators {round}"), &pairs)?;
        }
        Ok(())
    })?;

    let hamiltonian = w.current();
    if !crossings_of(&hamiltonian, &w.coords).is_empty() {
        return Err(Error::PlanInfeasible("crossings remain after the cross gadgets".into()));
    }
    Ok(Planarized { hamiltonian, plan: w.plan, coords: w.coords, num_original: n0, stages: w.stages })
}

/// The quadrilateral of a crossing holds only its four corners and the crossing edges.
fn localized<T: Real>(w: &Work<'_, T>, g: &InteractionGraph<T>, c: &Crossing, e: &PauliEdge<T>, f: &PauliEdge<T>, n0: usize) -> bool {
    let corners = [e.a, e.b, f.a, f.b];
    if corners.iter().any(|&x| x < n0) {
        return false;
    }
    let hull = convex_hull(&corners.iter().map(|&x| w.coords[x]).collect::<Vec<_>>());
    for v in 0..g.num_vertices {
        if !corners.contains(&v) && in_convex(&hull, w.coords[v]) {
            return false;
        }
    }
    for (i, o) in g.pauli_edges.iter().enumerate() {
        if i == c.edge_a || i == c.edge_b {
            continue;
        }
        let touches = |x: usize| corners.contains(&x);
        if touches(o.a) || touches(o.b) {
            continue;
        }
        let (p, q) = (w.coords[o.a], w.coords[o.b]);
        let k = hull.len();
        if in_convex(&hull, p) || in_convex(&hull, q) {
            return false;
        }
        for j in 0..k {
            if segment_intersection(p, q, hull[j], hull[(j + 1) % k]).is_some() {
                return false;
            }
        }
    }
    true
}

/// One pair per vertex, no edge used twice.
fn pick_disjoint(options: &[Vec<(usize, usize)>]) -> Option<Vec<(usize, usize)>> {
    fn go(i: usize, options: &[Vec<(usize, usize)>], used: &mut BTreeSet<usize>, out: &mut Vec<(usize, usize)>) -> bool {
        if i == options.len() {
            return true;
        }
        for &(a, b) in &options[i] {
            if used.contains(&a) || used.contains(&b) {
                continue;
            }
            used.insert(a);
            used.insert(b);
            out.push((a, b));
            if go(i + 1, options, used, out) {
                return true;
            }
            out.pop();
            used.remove(&a);
            used.remove(&b);
        }
        false
    }
    let mut out = Vec::new();
    go(0, options, &mut BTreeSet::new(), &mut out).then_some(out)
}
