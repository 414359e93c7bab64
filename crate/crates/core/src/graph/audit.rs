//! Crossing detection and spatial-sparsity audit of a drawn graph.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::scalar::Real;

use super::geometry::{convex_hull, diameter, hulls_intersect, polygon_area, segment_intersection, Intersection, Point};
use super::InteractionGraph;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparsityLimits {
    pub max_hyperedges_per_vertex: usize,
    pub max_overlaps_per_hyperedge: usize,
    pub max_hyperedge_area: f64,
    /// Largest allowed distance between two qubits of one term.
    pub max_term_diameter: Option<f64>,
}

impl Default for SparsityLimits {
    fn default() -> Self {
        Self {
            max_hyperedges_per_vertex: 9,
            max_overlaps_per_hyperedge: 16,
            max_hyperedge_area: 25.0,
            max_term_diameter: Some(5.0),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparsityReport {
    pub max_hyperedges_per_vertex: usize,
    pub max_overlaps_per_hyperedge: usize,
    pub max_hyperedge_area: f64,
    pub max_term_diameter: f64,
    pub limits: SparsityLimits,
    pub violations: Vec<String>,
}

impl SparsityReport {
    pub fn passes(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Two Pauli edges whose straight segments meet away from a shared endpoint.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub edge_a: usize,
    pub edge_b: usize,
    pub point: Point,
    pub collinear: bool,
}

pub fn audit_geometry<T: Real>(
    g: &InteractionGraph<T>,
    limits: &SparsityLimits,
) -> Result<(SparsityReport, Vec<Crossing>)> {
    let mut pts = Vec::with_capacity(g.num_vertices);
    for v in 0..g.num_vertices {
        pts.push(g.coord(v)?);
    }
    let crossings = find_crossings(g, &pts);

    let hulls: Vec<Vec<Point>> = g
        .hyper_edges
        .iter()
        .map(|h| convex_hull(&h.vertices.iter().map(|&v| pts[v]).collect::<Vec<_>>()))
        .collect();
    let per_vertex = (0..g.num_vertices)
        .map(|v| g.hyper_edges.iter().filter(|h| h.vertices.contains(&v)).count())
        .max()
        .unwrap_or(0);
    let mut overlaps = 0;
    for (i, a) in hulls.iter().enumerate() {
        let n = hulls.iter().enumerate().filter(|(j, b)| *j != i && hulls_intersect(a, b)).count();
        overlaps = overlaps.max(n);
    }
    let area = hulls.iter().map(|h| polygon_area(h)).fold(0.0, f64::max);
    let mut diam: f64 = 0.0;
    for e in &g.pauli_edges {
        diam = diam.max(pts[e.a].dist(pts[e.b]));
    }
    for h in &g.hyper_edges {
        diam = diam.max(diameter(&h.vertices.iter().map(|&v| pts[v]).collect::<Vec<_>>()));
    }

    let mut violations = Vec::new();
    if per_vertex > limits.max_hyperedges_per_vertex {
        violations.push(format!(
            "a vertex lies in {per_vertex} hyperedges (limit {})",
            limits.max_hyperedges_per_vertex
        ));
    }
    if overlaps > limits.max_overlaps_per_hyperedge {
        violations.push(format!(
            "a hyperedge overlaps {overlaps} others (limit {})",
            limits.max_overlaps_per_hyperedge
        ));
    }
    if area > limits.max_hyperedge_area {
        violations.push(format!("hyperedge hull area {area} (limit {})", limits.max_hyperedge_area));
    }
    if let Some(d) = limits.max_term_diameter {
        if diam > d {
            violations.push(format!("term diameter {diam} (limit {d})"));
        }
    }
    let report = SparsityReport {
        max_hyperedges_per_vertex: per_vertex,
        max_overlaps_per_hyperedge: overlaps,
        max_hyperedge_area: area,
        max_term_diameter: diam,
        limits: limits.clone(),
        violations,
    };
    Ok((report, crossings))
}

fn find_crossings<T: Real>(g: &InteractionGraph<T>, pts: &[Point]) -> Vec<Crossing> {
    let mut out = Vec::new();
    let e = &g.pauli_edges;
    for i in 0..e.len() {
        for j in i + 1..e.len() {
            let (a, b) = (&e[i], &e[j]);
            if a.a == b.a || a.a == b.b || a.b == b.a || a.b == b.b {
                continue;
            }
            if let Some(x) = segment_intersection(pts[a.a], pts[a.b], pts[b.a], pts[b.b]) {
                out.push(Crossing {
                    edge_a: i,
                    edge_b: j,
                    point: x.point(),
                    collinear: matches!(x, Intersection::Overlap(_)),
                });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;
    use crate::pauli::{Axis, Hamiltonian, PauliString};

    fn zz(n: usize, edges: &[(usize, usize)]) -> Hamiltonian<f64> {
        Hamiltonian::from_terms(
            n,
            edges.iter().map(|&(a, b)| (1.0, PauliString::from_pairs([(a, Axis::Z), (b, Axis::Z)]).unwrap())),
        )
        .unwrap()
    }

    #[test]
    fn square_diagonals_cross_once() {
        let g = build_graph(&zz(4, &[(0, 1), (2, 3)]))
            .with_coords(&[Point::new(0., 0.), Point::new(1., 1.), Point::new(0., 1.), Point::new(1., 0.)])
            .unwrap();
        let (_, c) = audit_geometry(&g, &SparsityLimits::default()).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c[0].point, Point::new(0.5, 0.5));
    }

    #[test]
    fn path_on_a_line() {
        let g = build_graph(&zz(4, &[(0, 1), (1, 2), (2, 3)]))
            .with_coords(&(0..4).map(|i| Point::new(i as f64, 0.)).collect::<Vec<_>>())
            .unwrap();
        let (r, c) = audit_geometry(&g, &SparsityLimits::default()).unwrap();
        assert!(c.is_empty());
        assert!(r.passes());
    }

    #[test]
    fn missing_coordinates() {
        let g = build_graph(&zz(2, &[(0, 1)]));
        assert!(audit_geometry(&g, &SparsityLimits::default()).is_err());
    }
}
