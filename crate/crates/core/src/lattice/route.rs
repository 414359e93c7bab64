//! Square-lattice representation of a planar degree-3 drawing.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gadget::{GadgetJob, ReductionPlan};
use crate::graph::geometry::point_segment_distance;
use crate::graph::{audit_geometry, InteractionGraph, Point, SparsityLimits};
use crate::pauli::{Hamiltonian, PauliString};
use crate::scalar::Real;

pub type GridPoint = [i64; 2];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RouteConfig {
    /// Grid spacing before any refinement, in drawing units.
    pub initial_spacing: f64,
    pub max_refinements: usize,
    /// Half-width, in grid units, of the band around a segment a path may use.
    pub corridor: f64,
    /// Smallest half-size, in grid units, of the square around each vertex where paths may detour.
    /// Vertices with narrow angles get a larger square.
    pub vertex_box: i64,
    pub max_path_len: usize,
    pub min_angle_deg: f64,
}

impl Default for RouteConfig {
    fn default() -> Self {
        RouteConfig {
            initial_spacing: 0.5,
            max_refinements: 6,
            corridor: 1.0,
            vertex_box: 2,
            max_path_len: 1024,
            min_angle_deg: 15.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgePath {
    pub a: usize,
    pub b: usize,
    pub term: PauliString,
    /// Grid points from `a` to `b`, one unit step apart.
    pub path: Vec<GridPoint>,
}

impl EdgePath {
    pub fn len(&self) -> usize {
        self.path.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.path.len() <= 1
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeEmbedding {
    pub spacing: f64,
    pub refinements: usize,
    pub vertices: Vec<GridPoint>,
    pub edges: Vec<EdgePath>,
    pub warnings: Vec<String>,
}

fn l1(p: GridPoint, q: GridPoint) -> i64 {
    (p[0] - q[0]).abs() + (p[1] - q[1]).abs()
}

impl LatticeEmbedding {
    /// Every structural invariant; returns the first violation found.
    pub fn validate(&self, max_path_len: usize) -> Result<()> {
        let bad = |m: String| Err(Error::RoutingFailed { refinements: self.refinements, reason: m });
        let mut owner: HashMap<GridPoint, usize> = HashMap::new();
        for (v, &p) in self.vertices.iter().enumerate() {
            if owner.insert(p, usize::MAX - v).is_some() {
                return bad(format!("two vertices on grid point {p:?}"));
            }
        }
        for (i, e) in self.edges.iter().enumerate() {
            if e.path.first() != Some(&self.vertices[e.a]) || e.path.last() != Some(&self.vertices[e.b]) {
                return bad(format!("path {i} does not join its endpoints"));
            }
            if e.len() > max_path_len {
                return bad(format!("path {i} has length {} > {max_path_len}", e.len()));
            }
            for w in e.path.windows(2) {
                if l1(w[0], w[1]) != 1 {
                    return bad(format!("path {i} takes a non-unit step"));
                }
            }
            for &p in &e.path[1..e.path.len() - 1] {
                if let Some(o) = owner.insert(p, i) {
                    return bad(format!("path {i} collides with {} at {p:?}", describe(o)));
                }
            }
        }
        Ok(())
    }
}

fn describe(owner: usize) -> String {
    if owner > usize::MAX / 2 {
        format!("vertex {}", usize::MAX - owner)
    } else {
        format!("path {owner}")
    }
}

fn snap(p: Point, h: f64) -> GridPoint {
    [(p.x / h).round() as i64, (p.y / h).round() as i64]
}

/// Smallest angle between two edges at a common vertex, in degrees.
fn min_angle<T: Real>(g: &InteractionGraph<T>, coords: &[Point]) -> f64 {
    (0..g.num_vertices).map(|v| angle_at(g, coords, v)).fold(180.0, f64::min)
}

fn angle_at<T: Real>(g: &InteractionGraph<T>, coords: &[Point], v: usize) -> f64 {
    let mut best = 180.0f64;
    let inc = g.incident(v);
    for i in 0..inc.len() {
        for j in i + 1..inc.len() {
            let p = coords[g.pauli_edges[inc[i]].other(v)];
            let q = coords[g.pauli_edges[inc[j]].other(v)];
            let a = (p.y - coords[v].y).atan2(p.x - coords[v].x);
            let b = (q.y - coords[v].y).atan2(q.x - coords[v].x);
            let mut d = (a - b).abs().to_degrees();
            if d > 180.0 {
                d = 360.0 - d;
            }
            best = best.min(d);
        }
    }
    best
}

/// Snap vertices to a grid and route each edge as a lattice path, refining on failure.
pub fn snap_and_route<T: Real>(g: &InteractionGraph<T>, cfg: &RouteConfig) -> Result<LatticeEmbedding> {
    let mut coords = Vec::with_capacity(g.num_vertices);
    for v in 0..g.num_vertices {
        coords.push(g.coord(v)?);
    }
    if g.max_pauli_degree() > 3 {
        return Err(Error::InvalidParameter(format!("Pauli degree {} exceeds 3", g.max_pauli_degree())));
    }
    if !g.hyper_edges.is_empty() {
        return Err(Error::InvalidParameter("hyperedges cannot be routed; reduce to 2-local first".into()));
    }
    let loose = SparsityLimits {
        max_hyperedges_per_vertex: usize::MAX,
        max_overlaps_per_hyperedge: usize::MAX,
        max_hyperedge_area: f64::INFINITY,
        max_term_diameter: None,
    };
    if let Some(c) = audit_geometry(g, &loose)?.1.first() {
        return Err(Error::InvalidParameter(format!("drawing is not planar: edges {} and {} cross", c.edge_a, c.edge_b)));
    }
    let mut warnings = Vec::new();
    let angle = min_angle(g, &coords);
    if angle < cfg.min_angle_deg {
        warnings.push(format!("smallest angle {angle:.2}° is below {}°", cfg.min_angle_deg));
    }
    let mut last = String::new();
    for k in 0..=cfg.max_refinements {
        let h = cfg.initial_spacing / f64::powi(2.0, k as i32);
        match route_once(g, &coords, h, cfg) {
            Ok(edges) => {
                let emb = LatticeEmbedding {
                    spacing: h,
                    refinements: k,
                    vertices: coords.iter().map(|&p| snap(p, h)).collect(),
                    edges,
                    warnings,
                };
                emb.validate(cfg.max_path_len)?;
                return Ok(emb);
            }
            Err(reason) => last = reason,
        }
    }
    Err(Error::RoutingFailed { refinements: cfg.max_refinements, reason: last })
}

fn route_once<T: Real>(
    g: &InteractionGraph<T>,
    coords: &[Point],
    h: f64,
    cfg: &RouteConfig,
) -> std::result::Result<Vec<EdgePath>, String> {
    let grid: Vec<GridPoint> = coords.iter().map(|&p| snap(p, h)).collect();
    // Corridors of edges leaving a vertex at angle θ overlap out to about c / sin(θ/2).
    let boxes: Vec<i64> = (0..g.num_vertices)
        .map(|v| {
            let half = (angle_at(g, coords, v) / 2.0).to_radians().sin().max(1e-3);
            cfg.vertex_box.max(((cfg.corridor + 1.0) / half).ceil() as i64)
        })
        .collect();
    let mut owner: HashMap<GridPoint, usize> = HashMap::new();
    for (v, &p) in grid.iter().enumerate() {
        if let Some(o) = owner.insert(p, usize::MAX - v) {
            return Err(format!("vertices {} and {v} snap to {p:?}", describe(o)));
        }
    }
    let mut order: Vec<usize> = (0..g.pauli_edges.len()).collect();
    let len = |i: usize| {
        let e = &g.pauli_edges[i];
        coords[e.a].dist(coords[e.b])
    };
    order.sort_by(|&i, &j| len(i).partial_cmp(&len(j)).unwrap().then(i.cmp(&j)));
    let mut out: BTreeMap<usize, EdgePath> = BTreeMap::new();
    for i in order {
        let e = &g.pauli_edges[i];
        let (s, t) = (grid[e.a], grid[e.b]);
        let (sp, tp) = (Point::new(s[0] as f64, s[1] as f64), Point::new(t[0] as f64, t[1] as f64));
        let allowed = |q: GridPoint| {
            if q == t {
                return true;
            }
            if owner.contains_key(&q) {
                return false;
            }
            let near_box = |c: GridPoint, r: i64| (q[0] - c[0]).abs().max((q[1] - c[1]).abs()) <= r;
            near_box(s, boxes[e.a]) || near_box(t, boxes[e.b]) || point_segment_distance(Point::new(q[0] as f64, q[1] as f64), sp, tp) <= cfg.corridor
        };
        let Some(path) = shortest_path(s, t, (sp, tp), &allowed) else {
            let mut blockers: Vec<usize> = owner
                .iter()
                .filter(|&(&q, _)| q != s && q != t && point_segment_distance(Point::new(q[0] as f64, q[1] as f64), sp, tp) <= cfg.corridor)
                .map(|(_, &o)| o)
                .collect();
            blockers.sort_unstable();
            blockers.dedup();
            let with = blockers.first().map(|&o| describe(o)).unwrap_or_else(|| "the vertex boxes".into());
            return Err(format!("edge {i} ({}–{}) is blocked by {with} at spacing {h}", e.a, e.b));
        };
        if path.len() - 1 > cfg.max_path_len {
            return Err(format!("edge {i} needs a path of length {}", path.len() - 1));
        }
        for &p in &path[1..path.len() - 1] {
            owner.insert(p, i);
        }
        out.insert(i, EdgePath { a: e.a, b: e.b, term: e.string(), path });
    }
    Ok(out.into_values().collect())
}

/// Cheapest lattice path from `s` to `t`; each step costs 1 plus a penalty for straying
/// from `line`, so paths hug their segment and leave room for neighbours. Ties follow the
/// neighbour order E, N, W, S.
fn shortest_path(
    s: GridPoint,
    t: GridPoint,
    line: (Point, Point),
    allowed: &impl Fn(GridPoint) -> bool,
) -> Option<Vec<GridPoint>> {
    let step_cost = |q: GridPoint| {
        let d = point_segment_distance(Point::new(q[0] as f64, q[1] as f64), line.0, line.1);
        1000 + (250.0 * d).round() as u64
    };
    let mut prev: HashMap<GridPoint, GridPoint> = HashMap::new();
    let mut best: HashMap<GridPoint, u64> = HashMap::from([(s, 0)]);
    let mut heap = BinaryHeap::from([Reverse((0u64, 0u64, s))]);
    let mut seq = 0u64;
    while let Some(Reverse((c, _, p))) = heap.pop() {
        if best.get(&p).is_some_and(|&b| b < c) {
            continue;
        }
        if p == t {
            let mut path = vec![t];
            let mut q = t;
            while q != s {
                q = prev[&q];
                path.push(q);
            }
            path.reverse();
            return Some(path);
        }
        for d in [[1, 0], [0, 1], [-1, 0], [0, -1]] {
            let n = [p[0] + d[0], p[1] + d[1]];
            if !allowed(n) {
                continue;
            }
            let nc = c + step_cost(n);
            if best.get(&n).is_none_or(|&b| nc < b) {
                best.insert(n, nc);
                prev.insert(n, p);
                seq += 1;
                heap.push(Reverse((nc, seq, n)));
            }
        }
    }
    None
}

/// Result of turning every lattice path into a chain of nearest-neighbour couplings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct LatticeHamiltonian<T> {
    pub hamiltonian: Hamiltonian<T>,
    pub plan: ReductionPlan<T>,
    /// Grid position of every qubit, mediators included.
    pub positions: Vec<GridPoint>,
}

/// 2-local terms whose qubits are not lattice neighbours.
pub fn lattice_violations<T: Real>(h: &Hamiltonian<T>, positions: &[GridPoint]) -> Vec<PauliString> {
    h.terms()
        .iter()
        .filter(|t| t.string.weight() == 2)
        .filter(|t| {
            let s = t.string.support();
            l1(positions[s[0]], positions[s[1]]) != 1
        })
        .map(|t| t.string.clone())
        .collect()
}

/// Subdivide every edge along its path until each coupling spans one lattice step.
///
/// Round `k` uses `Δ = delta · growth^k`; an edge of length `L` needs `⌈log₂ L⌉` rounds.
pub fn match_path_lengths<T: Real>(
    h: &Hamiltonian<T>,
    emb: &LatticeEmbedding,
    delta: T,
    growth: T,
) -> Result<LatticeHamiltonian<T>> {
    let mut paths: Vec<(usize, usize, Vec<GridPoint>)> = Vec::new();
    for t in h.terms().iter().filter(|t| t.string.weight() == 2) {
        let e = emb
            .edges
            .iter()
            .find(|e| e.term == t.string)
            .ok_or_else(|| Error::PlanInfeasible(format!("edge {} has no lattice path", t.string)))?;
        paths.push((e.a, e.b, e.path.clone()));
    }
    if h.terms().iter().any(|t| t.string.weight() > 2) {
        return Err(Error::PlanInfeasible("input is not 2-local".into()));
    }
    let mut plan = ReductionPlan::new(h.clone());
    let mut positions = emb.vertices.clone();
    for k in 0.. {
        let cur = plan.current();
        let long: Vec<usize> = (0..paths.len()).filter(|&i| paths[i].2.len() > 2).collect();
        if long.is_empty() {
            break;
        }
        let n0 = cur.num_qubits();
        let mut jobs = Vec::new();
        for &i in &long {
            let (a, b, _) = &paths[i];
            jobs.push(GadgetJob::Subdivide { term: term_between(&cur, *a, *b)?, left: vec![*a] });
        }
        plan.push_round(&format!("match path lengths {k}"), jobs, delta * growth.powi(k), None)?;
        let mut next = Vec::new();
        for (i, p) in paths.into_iter().enumerate() {
            match long.iter().position(|&j| j == i) {
                Some(slot) => {
                    let w = n0 + slot;
                    let mid = (p.2.len() - 1) / 2;
                    positions.push(p.2[mid]);
                    next.push((p.0, w, p.2[..=mid].to_vec()));
                    next.push((w, p.1, p.2[mid..].to_vec()));
                }
                None => next.push(p),
            }
        }
        paths = next;
    }
    let hamiltonian = plan.current();
    let bad = lattice_violations(&hamiltonian, &positions);
    if let Some(s) = bad.first() {
        return Err(Error::PlanInfeasible(format!("{s} does not couple lattice neighbours")));
    }
    Ok(LatticeHamiltonian { hamiltonian, plan, positions })
}

fn term_between<T: Real>(h: &Hamiltonian<T>, a: usize, b: usize) -> Result<PauliString> {
    h.terms()
        .iter()
        .map(|t| &t.string)
        .find(|s| s.weight() == 2 && s.axis(a).is_some() && s.axis(b).is_some())
        .cloned()
        .ok_or_else(|| Error::PlanInfeasible(format!("no term between {a} and {b}")))
}
