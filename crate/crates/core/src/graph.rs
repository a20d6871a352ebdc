//! Finite graphs with ferromagnetic pair couplings and a distinguished
//! varying edge.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const GRAPH_SCHEMA: &str = "leeyang-graph/1";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("graph must have at least one vertex")]
    NoVertices,
    #[error("edge ({u}, {v}) references a vertex outside 0..{n}")]
    VertexOutOfRange { u: usize, v: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("edge ({u}, {v}) has negative coupling {coupling}")]
    NegativeCoupling { u: usize, v: usize, coupling: f64 },
    #[error("edge ({u}, {v}) has non-finite coupling")]
    NonFiniteCoupling { u: usize, v: usize },
    #[error("varying edge ({0}, {1}) is not in the edge list")]
    VaryingEdgeNotFound(usize, usize),
    #[error("graph has no varying edge")]
    NoVaryingEdge,
    #[error("unsupported graph schema {0:?}, expected {GRAPH_SCHEMA:?}")]
    Schema(String),
    #[error("malformed graph document: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub coupling: f64,
}

/// Validated graph; edges are stored with `u < v`, sorted lexicographically.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingGraph {
    n: usize,
    edges: Vec<Edge>,
    varying: Option<usize>,
}

impl CouplingGraph {
    /// Validates and canonicalises an edge list. Endpoints may be given in
    /// either order.
    pub fn new(
        n: usize,
        edges: &[(usize, usize, f64)],
        varying_edge: Option<(usize, usize)>,
    ) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::NoVertices);
        }
        let mut canonical = Vec::with_capacity(edges.len());
        for &(a, b, coupling) in edges {
            if a >= n || b >= n {
                return Err(GraphError::VertexOutOfRange { u: a, v: b, n });
            }
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            let (u, v) = if a < b { (a, b) } else { (b, a) };
            if !coupling.is_finite() {
                return Err(GraphError::NonFiniteCoupling { u, v });
            }
            if coupling < 0.0 {
                return Err(GraphError::NegativeCoupling { u, v, coupling });
            }
            canonical.push(Edge { u, v, coupling });
        }
        canonical.sort_by_key(|e| (e.u, e.v));
        for pair in canonical.windows(2) {
            if (pair[0].u, pair[0].v) == (pair[1].u, pair[1].v) {
                return Err(GraphError::DuplicateEdge(pair[0].u, pair[0].v));
            }
        }
        let mut graph = Self {
            n,
            edges: canonical,
            varying: None,
        };
        if let Some((a, b)) = varying_edge {
            graph.varying = Some(graph.find_edge(a, b).ok_or(GraphError::VaryingEdgeNotFound(a, b))?);
        }
        Ok(graph)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn varying_index(&self) -> Option<usize> {
        self.varying
    }

    pub fn varying_edge(&self) -> Option<Edge> {
        self.varying.map(|i| self.edges[i])
    }

    pub fn require_varying_edge(&self) -> Result<Edge, GraphError> {
        self.varying_edge().ok_or(GraphError::NoVaryingEdge)
    }

    pub fn find_edge(&self, a: usize, b: usize) -> Option<usize> {
        let key = if a < b { (a, b) } else { (b, a) };
        self.edges.binary_search_by_key(&key, |e| (e.u, e.v)).ok()
    }

    /// Returns a copy with the varying edge replaced.
    pub fn with_varying_edge(&self, a: usize, b: usize) -> Result<Self, GraphError> {
        let idx = self.find_edge(a, b).ok_or(GraphError::VaryingEdgeNotFound(a, b))?;
        Ok(Self {
            varying: Some(idx),
            ..self.clone()
        })
    }

    /// Couplings with `t` added to the varying edge (if any).
    pub fn effective_couplings(&self, t: f64) -> Vec<f64> {
        self.edges
            .iter()
            .enumerate()
            .map(|(i, e)| if Some(i) == self.varying { e.coupling + t } else { e.coupling })
            .collect()
    }

    /// Whether `G_{>0}` at the base couplings is connected.
    pub fn hypothesis_met(&self) -> bool {
        is_connected(&positive_subgraph(self, 0.0))
    }

    pub fn from_json_str(text: &str) -> Result<Self, GraphError> {
        let doc: GraphDocument = serde_json::from_str(text).map_err(|e| GraphError::Parse(e.to_string()))?;
        doc.into_graph()
    }

    pub fn to_document(&self) -> GraphDocument {
        GraphDocument {
            schema: GRAPH_SCHEMA.to_string(),
            n: self.n,
            edges: self.edges.iter().map(|e| (e.u, e.v, e.coupling)).collect(),
            varying_edge: self.varying_edge().map(|e| (e.u, e.v)),
        }
    }
}

/// On-disk graph configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphDocument {
    pub schema: String,
    pub n: usize,
    pub edges: Vec<(usize, usize, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub varying_edge: Option<(usize, usize)>,
}

impl GraphDocument {
    pub fn into_graph(self) -> Result<CouplingGraph, GraphError> {
        if self.schema != GRAPH_SCHEMA {
            return Err(GraphError::Schema(self.schema));
        }
        CouplingGraph::new(self.n, &self.edges, self.varying_edge)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PositiveSubgraph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

/// Edges whose effective coupling (base plus `t` on the varying edge) is
/// strictly positive.
pub fn positive_subgraph(g: &CouplingGraph, t: f64) -> PositiveSubgraph {
    let edges = g
        .edges()
        .iter()
        .zip(g.effective_couplings(t))
        .filter(|(_, j)| *j > 0.0)
        .map(|(e, _)| (e.u, e.v))
        .collect();
    PositiveSubgraph { n: g.n(), edges }
}

pub fn is_connected(s: &PositiveSubgraph) -> bool {
    if s.n == 0 {
        return true;
    }
    let mut adjacency = vec![Vec::new(); s.n];
    for &(u, v) in &s.edges {
        adjacency[u].push(v);
        adjacency[v].push(u);
    }
    let mut seen = vec![false; s.n];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    let mut reached = 1;
    while let Some(u) = queue.pop_front() {
        for &w in &adjacency[u] {
            if !seen[w] {
                seen[w] = true;
                reached += 1;
                queue.push_back(w);
            }
        }
    }
    reached == s.n
}

/// Complete graph `K_n` with a uniform pair coupling and no varying edge.
pub fn complete_graph(n: usize, coupling: f64) -> CouplingGraph {
    let mut edges = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for u in 0..n {
        for v in (u + 1)..n {
            edges.push((u, v, coupling));
        }
    }
    CouplingGraph::new(n.max(1), &edges, None).expect("complete graph is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn minimal_instance_with_zero_coupling_varying_edge() {
        let g = CouplingGraph::new(2, &[(0, 1, 0.0)], Some((0, 1))).unwrap();
        assert_eq!(g.varying_index(), Some(0));
        assert_eq!(g.edges().len(), 1);
    }

    #[test]
    fn diagnostics_are_distinct() {
        assert_eq!(
            CouplingGraph::new(3, &[(0, 1, 1.0), (0, 1, 2.0)], None),
            Err(GraphError::DuplicateEdge(0, 1))
        );
        assert_eq!(
            CouplingGraph::new(3, &[(0, 1, 1.0), (1, 0, 2.0)], None),
            Err(GraphError::DuplicateEdge(0, 1))
        );
        assert_eq!(CouplingGraph::new(3, &[(2, 2, 1.0)], None), Err(GraphError::SelfLoop(2)));
        assert!(matches!(
            CouplingGraph::new(3, &[(0, 1, -0.5)], None),
            Err(GraphError::NegativeCoupling { .. })
        ));
        assert!(matches!(
            CouplingGraph::new(3, &[(0, 3, 0.5)], None),
            Err(GraphError::VertexOutOfRange { .. })
        ));
        assert_eq!(
            CouplingGraph::new(3, &[(0, 1, 0.5)], Some((1, 2))),
            Err(GraphError::VaryingEdgeNotFound(1, 2))
        );
        assert_eq!(CouplingGraph::new(0, &[], None), Err(GraphError::NoVertices));
    }

    #[test]
    fn edges_are_canonical_and_sorted() {
        let g = CouplingGraph::new(4, &[(3, 2, 1.0), (1, 0, 0.5)], Some((2, 3))).unwrap();
        let pairs: Vec<_> = g.edges().iter().map(|e| (e.u, e.v)).collect();
        assert_eq!(pairs, vec![(0, 1), (2, 3)]);
        assert_eq!(g.varying_edge().unwrap().coupling, 1.0);
    }

    #[test]
    fn positive_subgraph_thresholds_effective_couplings() {
        let g = CouplingGraph::new(2, &[(0, 1, 0.0)], None).unwrap();
        assert!(positive_subgraph(&g, 0.0).edges.is_empty());
        let g = g.with_varying_edge(0, 1).unwrap();
        assert_eq!(positive_subgraph(&g, 0.5).edges, vec![(0, 1)]);
        let g = CouplingGraph::new(3, &[(0, 1, 1.0), (1, 2, 0.0)], None).unwrap();
        assert_eq!(positive_subgraph(&g, 0.0).edges, vec![(0, 1)]);
    }

    #[test]
    fn connectivity() {
        assert!(is_connected(&PositiveSubgraph { n: 1, edges: vec![] }));
        assert!(!is_connected(&PositiveSubgraph { n: 3, edges: vec![(0, 1)] }));
        assert!(is_connected(&positive_subgraph(&complete_graph(4, 1.0), 0.0)));
    }

    #[test]
    fn complete_graph_sizes() {
        assert_eq!(complete_graph(1, 1.0).edges().len(), 0);
        assert_eq!(complete_graph(2, 1.0).edges().len(), 1);
        assert_eq!(complete_graph(4, 1.0).edges().len(), 6);
    }

    #[test]
    fn json_document_round_trip_and_schema_check() {
        let g = CouplingGraph::new(3, &[(0, 1, 0.25), (1, 2, 1.5)], Some((1, 2))).unwrap();
        let text = serde_json::to_string(&g.to_document()).unwrap();
        assert_eq!(CouplingGraph::from_json_str(&text).unwrap(), g);
        let bad = text.replace(GRAPH_SCHEMA, "leeyang-graph/9");
        assert!(matches!(CouplingGraph::from_json_str(&bad), Err(GraphError::Schema(_))));
        assert!(matches!(CouplingGraph::from_json_str("{"), Err(GraphError::Parse(_))));
    }

    fn arb_graph() -> impl Strategy<Value = CouplingGraph> {
        (2usize..8).prop_flat_map(|n| {
            let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| ((u + 1)..n).map(move |v| (u, v))).collect();
            let m = pairs.len();
            (Just(n), Just(pairs), proptest::collection::vec((any::<bool>(), 0.0f64..2.0), m), 0..m)
        })
        .prop_map(|(n, pairs, picks, var)| {
            let mut edges: Vec<_> = pairs
                .iter()
                .zip(&picks)
                .filter(|(_, (keep, _))| *keep)
                .map(|(&(u, v), &(_, j))| (u, v, j))
                .collect();
            let (vu, vv) = pairs[var];
            if !edges.iter().any(|&(u, v, _)| (u, v) == (vu, vv)) {
                edges.push((vu, vv, 0.0));
            }
            CouplingGraph::new(n, &edges, Some((vu, vv))).unwrap()
        })
    }

    proptest! {
        #[test]
        fn positive_t_always_includes_varying_edge(g in arb_graph(), t in 1e-6f64..5.0) {
            let e = g.varying_edge().unwrap();
            prop_assert!(positive_subgraph(&g, t).edges.contains(&(e.u, e.v)));
        }

        #[test]
        fn connectivity_is_monotone_in_edges(g in arb_graph(), extra in (0usize..8, 0usize..8)) {
            let s = positive_subgraph(&g, 0.0);
            let (a, b) = (extra.0 % g.n(), extra.1 % g.n());
            let mut bigger = s.clone();
            if a != b {
                bigger.edges.push((a.min(b), a.max(b)));
            }
            if is_connected(&s) {
                prop_assert!(is_connected(&bigger));
            }
        }
    }
}
