//! Interaction (hyper)graphs of Pauli sums, Pauli degrees and drawing audits.

mod audit;
pub mod geometry;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{Axis, Hamiltonian, PauliString, PauliTerm};
use crate::scalar::Real;

pub use audit::{audit_geometry, Crossing, SparsityLimits, SparsityReport};
pub use geometry::Point;

/// 2-local term `coeff · P_a ⊗ P_b` with `a < b`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliEdge<T> {
    pub a: usize,
    pub b: usize,
    pub pa: Axis,
    pub pb: Axis,
    pub coeff: T,
}

impl<T: Real> PauliEdge<T> {
    pub fn string(&self) -> PauliString {
        PauliString::from_pairs([(self.a, self.pa), (self.b, self.pb)]).unwrap()
    }

    pub fn axis_at(&self, v: usize) -> Option<Axis> {
        if v == self.a {
            Some(self.pa)
        } else if v == self.b {
            Some(self.pb)
        } else {
            None
        }
    }

    pub fn other(&self, v: usize) -> usize {
        if v == self.a {
            self.b
        } else {
            self.a
        }
    }
}

/// Maximal support shared by one or more terms of locality three or more.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HyperEdge<T> {
    pub vertices: Vec<usize>,
    /// Indices into the term list of the source Hamiltonian.
    pub term_ids: Vec<usize>,
    pub terms: Vec<PauliTerm<T>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VertexTerm<T> {
    pub vertex: usize,
    pub axis: Axis,
    pub coeff: T,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InteractionGraph<T> {
    pub num_vertices: usize,
    pub coords: Vec<Option<Point>>,
    pub pauli_edges: Vec<PauliEdge<T>>,
    pub hyper_edges: Vec<HyperEdge<T>>,
    pub vertex_terms: Vec<VertexTerm<T>>,
    pub offset: T,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PauliDegrees {
    pub x: usize,
    pub y: usize,
    pub z: usize,
    pub total: usize,
    /// Hyperedges containing the vertex; not part of the Pauli degree.
    pub hyper: usize,
}

impl PauliDegrees {
    pub fn axis(&self, a: Axis) -> usize {
        match a {
            Axis::X => self.x,
            Axis::Y => self.y,
            Axis::Z => self.z,
        }
    }

    pub fn max_axis(&self) -> usize {
        self.x.max(self.y).max(self.z)
    }
}

pub fn build_graph<T: Real>(h: &Hamiltonian<T>) -> InteractionGraph<T> {
    let mut g = InteractionGraph {
        num_vertices: h.num_qubits(),
        coords: vec![None; h.num_qubits()],
        pauli_edges: Vec::new(),
        hyper_edges: Vec::new(),
        vertex_terms: Vec::new(),
        offset: T::zero(),
    };
    let mut supports: Vec<(Vec<usize>, usize)> = Vec::new();
    for (id, t) in h.terms().iter().enumerate() {
        let pairs = t.string.pairs();
        match pairs.len() {
            0 => g.offset += t.coeff,
            1 => g.vertex_terms.push(VertexTerm { vertex: pairs[0].0, axis: pairs[0].1, coeff: t.coeff }),
            2 => g.pauli_edges.push(PauliEdge {
                a: pairs[0].0,
                b: pairs[1].0,
                pa: pairs[0].1,
                pb: pairs[1].1,
                coeff: t.coeff,
            }),
            _ => supports.push((pairs.iter().map(|p| p.0).collect(), id)),
        }
    }
    // Supports contained in a larger one join that hyperedge.
    let mut maximal: Vec<Vec<usize>> = Vec::new();
    let mut by_size = supports.clone();
    by_size.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then(a.0.cmp(&b.0)));
    for (s, _) in &by_size {
        if !maximal.iter().any(|m| s.iter().all(|v| m.contains(v))) {
            maximal.push(s.clone());
        }
    }
    maximal.sort();
    for m in maximal {
        g.hyper_edges.push(HyperEdge { vertices: m, term_ids: Vec::new(), terms: Vec::new() });
    }
    for (s, id) in supports {
        let e = g
            .hyper_edges
            .iter_mut()
            .find(|e| s.iter().all(|v| e.vertices.contains(v)))
            .expect("every support has a maximal cover");
        e.term_ids.push(id);
        e.terms.push(h.terms()[id].clone());
    }
    g
}

impl<T: Real> InteractionGraph<T> {
    pub fn with_coords(mut self, coords: &[Point]) -> Result<Self> {
        if coords.len() != self.num_vertices {
            return Err(Error::DimensionMismatch { expected: self.num_vertices, found: coords.len() });
        }
        for p in coords {
            if !p.is_finite() {
                return Err(Error::InvalidParameter(format!("non-finite coordinate {p:?}")));
            }
        }
        self.coords = coords.iter().copied().map(Some).collect();
        Ok(self)
    }

    pub fn coord(&self, v: usize) -> Result<Point> {
        self.coords
            .get(v)
            .ok_or(Error::UnknownVertex(v))?
            .ok_or(Error::MissingCoordinates(v))
    }

    pub fn pauli_degrees(&self, v: usize) -> Result<PauliDegrees> {
        if v >= self.num_vertices {
            return Err(Error::UnknownVertex(v));
        }
        let mut d = PauliDegrees::default();
        for e in &self.pauli_edges {
            match e.axis_at(v) {
                Some(Axis::X) => d.x += 1,
                Some(Axis::Y) => d.y += 1,
                Some(Axis::Z) => d.z += 1,
                None => {}
            }
        }
        d.total = d.x + d.y + d.z;
        d.hyper = self.hyper_edges.iter().filter(|e| e.vertices.contains(&v)).count();
        Ok(d)
    }

    pub fn max_pauli_degree(&self) -> usize {
        (0..self.num_vertices)
            .map(|v| self.pauli_degrees(v).unwrap().total)
            .max()
            .unwrap_or(0)
    }

    /// Edges incident to `v`, as indices into `pauli_edges`.
    pub fn incident(&self, v: usize) -> Vec<usize> {
        (0..self.pauli_edges.len())
            .filter(|&i| self.pauli_edges[i].axis_at(v).is_some())
            .collect()
    }

    /// Re-sum every component into a Hamiltonian.
    pub fn to_hamiltonian(&self) -> Hamiltonian<T> {
        let mut terms = vec![(self.offset, PauliString::identity())];
        for t in &self.vertex_terms {
            terms.push((t.coeff, PauliString::single(t.vertex, t.axis)));
        }
        for e in &self.pauli_edges {
            terms.push((e.coeff, e.string()));
        }
        for h in &self.hyper_edges {
            for t in &h.terms {
                terms.push((t.coeff, t.string.clone()));
            }
        }
        Hamiltonian::from_terms(self.num_vertices, terms).expect("graph terms stay in range")
    }
}
