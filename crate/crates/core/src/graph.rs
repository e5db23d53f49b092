//! Metric graphs, directed bonds and vertex traces.
//!
//! Edge `e` (1-based id) carries the coordinate `x ∈ [0, L_e]` running from
//! its `from` vertex to its `to` vertex. It yields two bonds: bond `e` in the
//! `from → to` direction and bond `e + E` for the reversal. Every matrix in the
//! crate is indexed by bonds in this order, so results depend on edge ids only.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub id: usize,
    pub from: String,
    pub to: String,
    pub length: f64,
}

impl Edge {
    pub fn new(id: usize, from: impl Into<String>, to: impl Into<String>, length: f64) -> Self {
        Edge {
            id,
            from: from.into(),
            to: to.into(),
            length,
        }
    }

    pub fn is_loop(&self) -> bool {
        self.from == self.to
    }
}

/// A directed edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bond {
    /// 1-based bond index in `[1, 2E]`.
    pub index: usize,
    pub edge_id: usize,
    pub reversed: bool,
}

impl Bond {
    /// 0-based matrix slot.
    #[inline]
    pub fn slot(&self) -> usize {
        self.index - 1
    }
}

/// Outgoing bonds at a vertex in canonical order: ascending edge id, and for
/// a loop the forward bond before the reversed one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexTrace {
    pub vertex: String,
    pub incident_bonds: Vec<Bond>,
}

impl VertexTrace {
    pub fn degree(&self) -> usize {
        self.incident_bonds.len()
    }

    /// Number of incident edge ends sitting at coordinate `x = 0`.
    pub fn origin_count(&self) -> usize {
        self.incident_bonds.iter().filter(|b| !b.reversed).count()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricGraph {
    vertices: Vec<String>,
    edges: Vec<Edge>,
    traces: BTreeMap<String, VertexTrace>,
    inserted: BTreeSet<String>,
}

impl MetricGraph {
    /// Validates the edge list and computes bonds and vertex traces.
    ///
    /// `vertex_ids` may be empty, in which case the vertex set is taken from
    /// the edge endpoints.
    pub fn build(vertex_ids: &[String], edges: Vec<Edge>) -> Result<Self> {
        if edges.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let mut vertices: Vec<String> = Vec::new();
        let mut known = BTreeSet::new();
        if vertex_ids.is_empty() {
            for e in &edges {
                for v in [&e.from, &e.to] {
                    if known.insert(v.clone()) {
                        vertices.push(v.clone());
                    }
                }
            }
        } else {
            for v in vertex_ids {
                if !known.insert(v.clone()) {
                    return Err(Error::DuplicateVertex(v.clone()));
                }
                vertices.push(v.clone());
            }
        }

        let mut edges = edges;
        edges.sort_by_key(|e| e.id);
        let mut seen = BTreeSet::new();
        for e in &edges {
            if !seen.insert(e.id) {
                return Err(Error::DuplicateEdge(e.id));
            }
            if !(e.length.is_finite() && e.length > 0.0) {
                return Err(Error::InvalidLength {
                    edge: e.id,
                    length: e.length,
                });
            }
            for v in [&e.from, &e.to] {
                if !known.contains(v) {
                    return Err(Error::DanglingEndpoint {
                        edge: e.id,
                        vertex: v.clone(),
                    });
                }
            }
        }
        let count = edges.len();
        if let Some(missing) = (1..=count).find(|id| !seen.contains(id)) {
            return Err(Error::NonContiguousEdgeIds { count, missing });
        }

        let mut traces: BTreeMap<String, VertexTrace> = vertices
            .iter()
            .map(|v| {
                (
                    v.clone(),
                    VertexTrace {
                        vertex: v.clone(),
                        incident_bonds: Vec::new(),
                    },
                )
            })
            .collect();
        for e in &edges {
            let forward = Bond {
                index: e.id,
                edge_id: e.id,
                reversed: false,
            };
            let backward = Bond {
                index: e.id + count,
                edge_id: e.id,
                reversed: true,
            };
            traces.get_mut(&e.from).unwrap().incident_bonds.push(forward);
            traces.get_mut(&e.to).unwrap().incident_bonds.push(backward);
        }
        if let Some(t) = traces.values().find(|t| t.incident_bonds.is_empty()) {
            return Err(Error::IsolatedVertex(t.vertex.clone()));
        }

        Ok(MetricGraph {
            vertices,
            edges,
            traces,
            inserted: BTreeSet::new(),
        })
    }

    pub fn from_edges(edges: Vec<Edge>) -> Result<Self> {
        Self::build(&[], edges)
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    /// Edges sorted by id.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn bond_count(&self) -> usize {
        2 * self.edges.len()
    }

    pub fn edge(&self, id: usize) -> Option<&Edge> {
        id.checked_sub(1).and_then(|i| self.edges.get(i))
    }

    pub fn total_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length).sum()
    }

    /// Bond lengths in slot order, `(L_1, …, L_E, L_1, …, L_E)`.
    pub fn bond_lengths(&self) -> Vec<f64> {
        self.edges.iter().chain(self.edges.iter()).map(|e| e.length).collect()
    }

    pub fn bond(&self, index: usize) -> Option<Bond> {
        let e = self.edge_count();
        if index == 0 || index > 2 * e {
            return None;
        }
        Some(if index <= e {
            Bond {
                index,
                edge_id: index,
                reversed: false,
            }
        } else {
            Bond {
                index,
                edge_id: index - e,
                reversed: true,
            }
        })
    }

    pub fn reversal(&self, b: Bond) -> Bond {
        let e = self.edge_count();
        let index = if b.reversed { b.index - e } else { b.index + e };
        Bond {
            index,
            edge_id: b.edge_id,
            reversed: !b.reversed,
        }
    }

    /// Vertex at the start of the bond.
    pub fn origin(&self, b: Bond) -> &str {
        let e = &self.edges[b.edge_id - 1];
        if b.reversed {
            &e.to
        } else {
            &e.from
        }
    }

    /// Vertex at the end of the bond.
    pub fn terminus(&self, b: Bond) -> &str {
        let e = &self.edges[b.edge_id - 1];
        if b.reversed {
            &e.from
        } else {
            &e.to
        }
    }

    pub fn vertex_trace(&self, v: &str) -> Result<&VertexTrace> {
        self.traces.get(v).ok_or_else(|| Error::UnknownVertex(v.to_string()))
    }

    pub fn traces(&self) -> impl Iterator<Item = &VertexTrace> {
        self.traces.values()
    }

    pub fn degree(&self, v: &str) -> Result<usize> {
        Ok(self.vertex_trace(v)?.degree())
    }

    /// Vertices added by [`MetricGraph::simplify`].
    pub fn inserted_vertices(&self) -> &BTreeSet<String> {
        &self.inserted
    }

    pub fn is_simple(&self) -> bool {
        let mut pairs = BTreeSet::new();
        self.edges
            .iter()
            .all(|e| !e.is_loop() && pairs.insert(unordered(&e.from, &e.to)))
    }

    /// Subdivides loops and repeated edges with fresh degree-2 vertices at
    /// their midpoints until the graph is simple. A loop needs two passes: its
    /// first subdivision produces a parallel pair.
    pub fn simplify(&self) -> MetricGraph {
        let mut g = self.clone();
        let mut counter = 0usize;
        while !g.is_simple() {
            g = g.subdivide_once(&mut counter);
        }
        g
    }

    fn fresh_label(&self, taken: &BTreeSet<String>, counter: &mut usize) -> String {
        loop {
            *counter += 1;
            let label = format!("_s{counter}");
            if !taken.contains(&label) && !self.traces.contains_key(&label) {
                return label;
            }
        }
    }

    fn subdivide_once(&self, counter: &mut usize) -> MetricGraph {
        let mut seen = BTreeSet::new();
        let mut taken: BTreeSet<String> = self.vertices.iter().cloned().collect();
        let mut vertices = self.vertices.clone();
        let mut inserted = self.inserted.clone();
        let mut edges = Vec::with_capacity(self.edges.len() + 1);
        for e in &self.edges {
            let split = e.is_loop() || !seen.insert(unordered(&e.from, &e.to));
            if split {
                let mid = self.fresh_label(&taken, counter);
                taken.insert(mid.clone());
                vertices.push(mid.clone());
                inserted.insert(mid.clone());
                let half = e.length / 2.0;
                edges.push(Edge::new(edges.len() + 1, e.from.clone(), mid.clone(), half));
                edges.push(Edge::new(edges.len() + 1, mid, e.to.clone(), half));
            } else {
                edges.push(Edge::new(edges.len() + 1, e.from.clone(), e.to.clone(), e.length));
            }
        }
        let mut g = MetricGraph::build(&vertices, edges).expect("subdivision preserves validity");
        g.inserted = inserted;
        g
    }
}

fn unordered(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}
