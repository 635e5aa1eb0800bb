//! Weighted dual resolution graphs with strict-transform arrows.
//!
//! Vertex order is the file order and fixes the indexing of every vector the
//! crate produces. Arrow entries are kept as a branch list: matrix-level
//! computations sum the weights per `(kind, vertex)`, the blowup calculus
//! addresses entries individually.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, rat, RatMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArrowKind {
    F,
    G,
    Polar,
}

impl fmt::Display for ArrowKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ArrowKind::F => "f",
            ArrowKind::G => "g",
            ArrowKind::Polar => "polar",
        })
    }
}

impl std::str::FromStr for ArrowKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "f" => Ok(ArrowKind::F),
            "g" => Ok(ArrowKind::G),
            "polar" => Ok(ArrowKind::Polar),
            other => Err(Error::Parse(format!("unknown arrow kind `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub id: String,
    /// Self-intersection `E_v^2`.
    pub self_int: i64,
    pub genus: u32,
}

/// One strict-transform entry attached to a vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrow {
    pub kind: ArrowKind,
    pub vertex: usize,
    /// Intersection number with `E_v`, at least one.
    pub weight: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResolutionGraph {
    vertices: Vec<Vertex>,
    edges: Vec<(usize, usize)>,
    arrows: Vec<Arrow>,
    index: HashMap<String, usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    vertices: Vec<VertexRecord>,
    #[serde(default)]
    edges: Vec<[String; 2]>,
    #[serde(default)]
    arrows: Vec<ArrowRecord>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VertexRecord {
    id: String,
    self_int: i64,
    #[serde(default)]
    genus: u32,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ArrowRecord {
    kind: ArrowKind,
    vertex: String,
    weight: u64,
}

impl ResolutionGraph {
    pub fn new(vertices: Vec<Vertex>, edges: Vec<(usize, usize)>, arrows: Vec<Arrow>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::Parse("graph has no vertices".into()));
        }
        let mut index = HashMap::with_capacity(vertices.len());
        for (i, v) in vertices.iter().enumerate() {
            if index.insert(v.id.clone(), i).is_some() {
                return Err(Error::DuplicateVertex(v.id.clone()));
            }
        }
        let n = vertices.len();
        if let Some(&(a, b)) = edges.iter().find(|&&(a, b)| a >= n || b >= n) {
            return Err(Error::UnknownVertex(format!("index {}", a.max(b))));
        }
        for a in &arrows {
            if a.vertex >= n {
                return Err(Error::UnknownVertex(format!("index {}", a.vertex)));
            }
            if a.weight == 0 {
                return Err(Error::Parse(format!(
                    "{} arrow at `{}` has weight 0",
                    a.kind, vertices[a.vertex].id
                )));
            }
        }
        Ok(ResolutionGraph { vertices, edges, arrows, index })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: GraphFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let vertices: Vec<Vertex> = file
            .vertices
            .into_iter()
            .map(|r| Vertex { id: r.id, self_int: r.self_int, genus: r.genus })
            .collect();
        let lookup: HashMap<&str, usize> =
            vertices.iter().enumerate().map(|(i, v)| (v.id.as_str(), i)).collect();
        let find = |id: &str| lookup.get(id).copied().ok_or_else(|| Error::UnknownVertex(id.to_string()));
        let edges = file
            .edges
            .iter()
            .map(|[a, b]| Ok((find(a)?, find(b)?)))
            .collect::<Result<Vec<_>>>()?;
        let arrows = file
            .arrows
            .iter()
            .map(|a| Ok(Arrow { kind: a.kind, vertex: find(&a.vertex)?, weight: a.weight }))
            .collect::<Result<Vec<_>>>()?;
        Self::new(vertices, edges, arrows)
    }

    pub fn to_json(&self) -> String {
        let file = GraphFile {
            vertices: self
                .vertices
                .iter()
                .map(|v| VertexRecord { id: v.id.clone(), self_int: v.self_int, genus: v.genus })
                .collect(),
            edges: self.edges.iter().map(|&(a, b)| [self.id(a).to_string(), self.id(b).to_string()]).collect(),
            arrows: self
                .arrows
                .iter()
                .map(|a| ArrowRecord { kind: a.kind, vertex: self.id(a.vertex).to_string(), weight: a.weight })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("graph serialization cannot fail")
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn id(&self, v: usize) -> &str {
        &self.vertices[v].id
    }

    pub fn vertex_index(&self, id: &str) -> Result<usize> {
        self.index.get(id).copied().ok_or_else(|| Error::UnknownVertex(id.to_string()))
    }

    /// `(edge index, other endpoint)` for every edge at `v`, self-loops excluded.
    pub fn incident(&self, v: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().enumerate().filter_map(move |(e, &(a, b))| {
            if a == b {
                None
            } else if a == v {
                Some((e, b))
            } else if b == v {
                Some((e, a))
            } else {
                None
            }
        })
    }

    /// Number of edge endpoints at `v`; arrows are not counted.
    pub fn valency(&self, v: usize) -> u64 {
        self.edges.iter().map(|&(a, b)| u64::from(a == v) + u64::from(b == v)).sum()
    }

    pub fn valency_of(&self, id: &str) -> Result<u64> {
        Ok(self.valency(self.vertex_index(id)?))
    }

    /// Intersection numbers `E_i . E_j` as integers.
    pub fn int_matrix(&self) -> Vec<Vec<i64>> {
        let n = self.vertex_count();
        let mut m = vec![vec![0i64; n]; n];
        for (i, v) in self.vertices.iter().enumerate() {
            m[i][i] = v.self_int;
        }
        for &(a, b) in &self.edges {
            if a != b {
                m[a][b] += 1;
                m[b][a] += 1;
            }
        }
        m
    }

    pub fn intersection_matrix(&self) -> RatMatrix {
        RatMatrix::from_int_rows(&self.int_matrix()).expect("square by construction")
    }

    /// Summed arrow weight of the given kind at every vertex.
    pub fn arrow_weights(&self, kind: ArrowKind) -> Vec<u64> {
        let mut w = vec![0u64; self.vertex_count()];
        for a in self.arrows.iter().filter(|a| a.kind == kind) {
            w[a.vertex] += a.weight;
        }
        w
    }

    /// Vertices carrying at least one arrow of the given kind.
    pub fn nodes(&self, kind: ArrowKind) -> Vec<usize> {
        self.arrow_weights(kind).iter().enumerate().filter(|(_, &w)| w > 0).map(|(v, _)| v).collect()
    }

    pub fn has_arrows(&self, kind: ArrowKind) -> bool {
        self.arrows.iter().any(|a| a.kind == kind)
    }

    /// Entries of one kind at one vertex, in file order, as indices into `arrows()`.
    pub fn branches(&self, kind: ArrowKind, v: usize) -> Vec<usize> {
        self.arrows
            .iter()
            .enumerate()
            .filter(|(_, a)| a.kind == kind && a.vertex == v)
            .map(|(i, _)| i)
            .collect()
    }

    /// Same graph with every polar arrow replaced by one entry per nonzero
    /// coordinate of `p`.
    pub fn with_polar(&self, p: &[u64]) -> Result<Self> {
        if p.len() != self.vertex_count() {
            return Err(Error::DimensionMismatch(format!(
                "P-vector has {} entries for {} vertices",
                p.len(),
                self.vertex_count()
            )));
        }
        let mut arrows: Vec<Arrow> = self.arrows.iter().filter(|a| a.kind != ArrowKind::Polar).cloned().collect();
        arrows.extend(
            p.iter()
                .enumerate()
                .filter(|(_, &w)| w > 0)
                .map(|(v, &w)| Arrow { kind: ArrowKind::Polar, vertex: v, weight: w }),
        );
        Self::new(self.vertices.clone(), self.edges.clone(), arrows)
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for (_, w) in self.incident(v) {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn validate(&self) -> ValidationReport {
        let mut issues = Vec::new();
        if !self.is_connected() {
            issues.push(Issue::Disconnected);
        }
        for &(a, b) in &self.edges {
            if a == b {
                issues.push(Issue::SelfLoop { vertex: self.id(a).to_string() });
            }
        }
        for v in &self.vertices {
            if v.self_int >= 0 {
                issues.push(Issue::NonNegativeSelfIntersection { vertex: v.id.clone(), self_int: v.self_int });
            }
        }
        if !linalg::is_negative_definite(&self.intersection_matrix()).unwrap_or(false) {
            issues.push(Issue::NotNegativeDefinite);
        }
        let mut seen = HashMap::new();
        for a in &self.arrows {
            let count = seen.entry((a.kind, a.vertex)).or_insert(0u32);
            *count += 1;
            if *count == 2 {
                issues.push(Issue::DuplicateArrow { kind: a.kind, vertex: self.id(a.vertex).to_string() });
            }
        }
        ValidationReport { issues }
    }

    pub(crate) fn push_vertex(&mut self, vertex: Vertex) -> usize {
        let i = self.vertices.len();
        self.index.insert(vertex.id.clone(), i);
        self.vertices.push(vertex);
        i
    }

    pub(crate) fn vertex_mut(&mut self, v: usize) -> &mut Vertex {
        &mut self.vertices[v]
    }

    pub(crate) fn edges_mut(&mut self) -> &mut Vec<(usize, usize)> {
        &mut self.edges
    }

    pub(crate) fn arrows_mut(&mut self) -> &mut Vec<Arrow> {
        &mut self.arrows
    }

    /// First id of the form `{prefix}{k}`, k = 1, 2, ..., not already in use.
    pub fn fresh_id(&self, prefix: &str) -> String {
        (1..).map(|k| format!("{prefix}{k}")).find(|id| !self.index.contains_key(id)).expect("unbounded")
    }

    /// `K_pi`: valency + 2 genus - 2 at every vertex.
    pub fn canonical_vector(&self) -> Vec<i64> {
        (0..self.vertex_count())
            .map(|v| self.valency(v) as i64 + 2 * i64::from(self.vertices[v].genus) - 2)
            .collect()
    }

    pub fn self_intersections(&self) -> Vec<i64> {
        self.vertices.iter().map(|v| v.self_int).collect()
    }

    pub fn diagonal(&self) -> Vec<linalg::Rational> {
        self.vertices.iter().map(|v| rat(v.self_int)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "issue", rename_all = "snake_case")]
pub enum Issue {
    Disconnected,
    SelfLoop { vertex: String },
    NonNegativeSelfIntersection { vertex: String, self_int: i64 },
    NotNegativeDefinite,
    /// Repeated `(kind, vertex)` entries; legal as a branch list, reported
    /// as a warning.
    DuplicateArrow { kind: ArrowKind, vertex: String },
}

impl Issue {
    pub fn is_warning(&self) -> bool {
        matches!(self, Issue::DuplicateArrow { .. })
    }
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Issue::Disconnected => write!(f, "graph is disconnected"),
            Issue::SelfLoop { vertex } => write!(f, "self-loop at `{vertex}`"),
            Issue::NonNegativeSelfIntersection { vertex, self_int } => {
                write!(f, "vertex `{vertex}` has self-intersection {self_int} >= 0")
            }
            Issue::NotNegativeDefinite => write!(f, "intersection matrix is not negative definite"),
            Issue::DuplicateArrow { kind, vertex } => {
                write!(f, "warning: several {kind} arrow entries at `{vertex}` (treated as branches)")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.iter().all(Issue::is_warning)
    }

    pub fn contains(&self, pred: impl Fn(&Issue) -> bool) -> bool {
        self.issues.iter().any(pred)
    }
}
