//! Multiplicities, inner rates, Hironaka quotients and the metric-graph
//! quantities built from them.

use std::collections::VecDeque;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{ArrowKind, ResolutionGraph};
use crate::linalg::{self, is_integer, rat, RatVector, Rational};

/// Which of the two functions of the morphism `(g, f)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Function {
    F,
    G,
}

impl Function {
    pub fn arrow_kind(self) -> ArrowKind {
        match self {
            Function::F => ArrowKind::F,
            Function::G => ArrowKind::G,
        }
    }
}

impl fmt::Display for Function {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.arrow_kind().fmt(f)
    }
}

impl std::str::FromStr for Function {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "f" => Ok(Function::F),
            "g" => Ok(Function::G),
            other => Err(Error::Parse(format!("expected `f` or `g`, got `{other}`"))),
        }
    }
}

/// Arrow weights and multiplicity vector of one function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionData {
    pub kind: Function,
    /// Summed arrow weight `h* . E_v` per vertex.
    pub weights: Vec<u64>,
    /// Orders of vanishing `m_v(h)`.
    pub m: RatVector,
    pub integral: bool,
    pub positive: bool,
}

impl FunctionData {
    pub fn is_valid(&self) -> bool {
        self.integral && self.positive
    }

    pub fn nodes(&self) -> Vec<usize> {
        self.weights.iter().enumerate().filter(|(_, &w)| w > 0).map(|(v, _)| v).collect()
    }

    /// Multiplicities as machine integers; fails unless valid.
    pub fn m_i64(&self) -> Result<Vec<i64>> {
        if !self.is_valid() {
            return Err(Error::NonIntegralMultiplicities(self.kind.to_string()));
        }
        self.m
            .iter()
            .map(|x| x.numer().to_i64().ok_or_else(|| Error::Overflow(format!("m = {x}"))))
            .collect()
    }
}

/// Solves `M m = -w` for the arrow weights `w` of one function.
pub fn multiplicities(graph: &ResolutionGraph, kind: Function) -> Result<FunctionData> {
    let weights = graph.arrow_weights(kind.arrow_kind());
    if weights.iter().all(|&w| w == 0) {
        return Err(Error::NoArrows(kind.to_string()));
    }
    let rhs: RatVector = weights.iter().map(|&w| -rat(w as i64)).collect();
    let m = linalg::solve_linear(&graph.intersection_matrix(), &rhs)?;
    let integral = m.iter().all(is_integer);
    let positive = m.iter().all(Signed::is_positive);
    Ok(FunctionData { kind, weights, m, integral, positive })
}

/// `val(v) + 2 g_v - 2` for every vertex.
pub fn k_vector(graph: &ResolutionGraph) -> RatVector {
    graph.canonical_vector().into_iter().map(rat).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InnerRateData {
    /// `a_v = m_v(f) q_v`.
    pub a: RatVector,
    /// Inner rates `q_v`.
    pub q: RatVector,
    pub a_integral: bool,
    pub a_positive: bool,
}

/// `K + F - P`.
pub fn inner_rate_rhs(graph: &ResolutionGraph, f: &FunctionData, p: &[u64]) -> Result<RatVector> {
    let n = graph.vertex_count();
    if p.len() != n || f.weights.len() != n {
        return Err(Error::DimensionMismatch(format!("{n} vertices, P has {} entries", p.len())));
    }
    Ok(graph
        .canonical_vector()
        .into_iter()
        .zip(&f.weights)
        .zip(p)
        .map(|((k, &fw), &pw)| rat(k + fw as i64 - pw as i64))
        .collect())
}

/// Inner rates from the linear system `M a = K + F - P`.
pub fn inner_rates(graph: &ResolutionGraph, f: &FunctionData, p: &[u64]) -> Result<InnerRateData> {
    let rhs = inner_rate_rhs(graph, f, p)?;
    let a = linalg::solve_linear(&graph.intersection_matrix(), &rhs)?;
    let q = a
        .iter()
        .zip(&f.m)
        .map(|(a, m)| if m.is_zero() { Err(Error::SingularMatrix) } else { Ok(a / m) })
        .collect::<Result<RatVector>>()?;
    let a_integral = a.iter().all(is_integer);
    let a_positive = a.iter().all(Signed::is_positive);
    Ok(InnerRateData { a, q, a_integral, a_positive })
}

/// Hironaka quotients `m_v(g) / m_v(f)`.
pub fn hironaka(f: &FunctionData, g: &FunctionData) -> RatVector {
    g.m.iter().zip(&f.m).map(|(mg, mf)| mg / mf).collect()
}

/// Edge lengths `1 / (m_v(f) m_v'(f))`, indexed like `graph.edges()`.
pub fn edge_lengths(graph: &ResolutionGraph, f: &FunctionData) -> RatVector {
    graph
        .edges()
        .iter()
        .map(|&(a, b)| Rational::from_integer(BigInt::from(1)) / (&f.m[a] * &f.m[b]))
        .collect()
}

/// Sum of outgoing slopes of a vertex function with respect to `length_f`.
pub fn laplacian(graph: &ResolutionGraph, f: &FunctionData, values: &[Rational]) -> Result<RatVector> {
    let n = graph.vertex_count();
    if values.len() != n {
        return Err(Error::DimensionMismatch(format!("{n} vertices, {} values", values.len())));
    }
    let lengths = edge_lengths(graph, f);
    Ok((0..n)
        .map(|v| {
            graph
                .incident(v)
                .map(|(e, w)| (&values[w] - &values[v]) / &lengths[e])
                .sum()
        })
        .collect())
}

/// `K_Gamma + F_Gamma - P_Gamma`, the divisor the inner rates function has
/// as Laplacian.
pub fn laplacian_divisor(
    graph: &ResolutionGraph,
    f: &FunctionData,
    g: &FunctionData,
    p: &[u64],
) -> Result<RatVector> {
    let n = graph.vertex_count();
    if p.len() != n {
        return Err(Error::DimensionMismatch(format!("{n} vertices, P has {} entries", p.len())));
    }
    let k = graph.canonical_vector();
    Ok((0..n)
        .map(|v| {
            &f.m[v] * rat(k[v]) + (&f.m[v] + &g.m[v]) * rat(f.weights[v] as i64) - &f.m[v] * rat(p[v] as i64)
        })
        .collect())
}

/// `chi'_v = 2 - 2 g_v - val(v) - f*.E_v - g*.E_v`.
pub fn chi_prime(graph: &ResolutionGraph, f: &FunctionData, g: &FunctionData) -> Vec<i64> {
    (0..graph.vertex_count())
        .map(|v| {
            2 - 2 * i64::from(graph.vertices()[v].genus)
                - graph.valency(v) as i64
                - f.weights[v] as i64
                - g.weights[v] as i64
        })
        .collect()
}

/// The subgraph `A` of strictly increasing f-to-g paths and the zones of its
/// complement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkeletonData {
    pub h: RatVector,
    pub a_vertices: Vec<usize>,
    pub a_edges: Vec<usize>,
    /// Connected components of the closure of the complement of `A`.
    pub zones: Vec<Vec<usize>>,
    /// Vertices outside that closure.
    pub singletons: Vec<usize>,
}

impl SkeletonData {
    pub fn in_a(&self, v: usize) -> bool {
        self.a_vertices.binary_search(&v).is_ok()
    }

    /// Indices of zones on which `h` is not constant.
    pub fn non_constant_zones(&self) -> Vec<usize> {
        self.zones
            .iter()
            .enumerate()
            .filter(|(_, z)| z.iter().any(|&v| self.h[v] != self.h[z[0]]))
            .map(|(i, _)| i)
            .collect()
    }
}

/// Builds `A` by orienting every edge towards strictly larger Hironaka
/// quotient; equal-quotient edges get no orientation. A vertex or edge is in
/// `A` iff it is forward-reachable from an f-node and backward-reachable from
/// a g-node in that DAG.
pub fn a_subgraph(graph: &ResolutionGraph, f: &FunctionData, g: &FunctionData) -> Result<SkeletonData> {
    let f_nodes = f.nodes();
    let g_nodes = g.nodes();
    if f_nodes.is_empty() {
        return Err(Error::NoArrows("f".into()));
    }
    if g_nodes.is_empty() {
        return Err(Error::NoArrows("g".into()));
    }
    let h = hironaka(f, g);
    let n = graph.vertex_count();
    let oriented: Vec<Option<(usize, usize)>> = graph
        .edges()
        .iter()
        .map(|&(a, b)| match h[a].cmp(&h[b]) {
            std::cmp::Ordering::Less => Some((a, b)),
            std::cmp::Ordering::Greater => Some((b, a)),
            std::cmp::Ordering::Equal => None,
        })
        .collect();

    let reach = |starts: &[usize], forward: bool| {
        let mut seen = vec![false; n];
        let mut queue: VecDeque<usize> = starts.iter().copied().collect();
        for &s in starts {
            seen[s] = true;
        }
        while let Some(v) = queue.pop_front() {
            for &(from, to) in oriented.iter().flatten() {
                let (src, dst) = if forward { (from, to) } else { (to, from) };
                if src == v && !seen[dst] {
                    seen[dst] = true;
                    queue.push_back(dst);
                }
            }
        }
        seen
    };
    let fwd = reach(&f_nodes, true);
    let bwd = reach(&g_nodes, false);

    let a_vertices: Vec<usize> = (0..n).filter(|&v| fwd[v] && bwd[v]).collect();
    let a_edges: Vec<usize> = oriented
        .iter()
        .enumerate()
        .filter_map(|(e, o)| o.filter(|&(from, to)| fwd[from] && bwd[to]).map(|_| e))
        .collect();

    let in_a_vertex: Vec<bool> = (0..n).map(|v| fwd[v] && bwd[v]).collect();
    let mut in_a_edge = vec![false; graph.edges().len()];
    for &e in &a_edges {
        in_a_edge[e] = true;
    }

    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        let mut c = x;
        while parent[c] != r {
            let next = parent[c];
            parent[c] = r;
            c = next;
        }
        r
    }
    let mut in_closure: Vec<bool> = in_a_vertex.iter().map(|&a| !a).collect();
    for (e, &(a, b)) in graph.edges().iter().enumerate() {
        if in_a_edge[e] {
            continue;
        }
        in_closure[a] = true;
        in_closure[b] = true;
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    let mut zones: Vec<Vec<usize>> = Vec::new();
    let mut zone_of_root = vec![usize::MAX; n];
    for v in (0..n).filter(|&v| in_closure[v]) {
        let r = find(&mut parent, v);
        if zone_of_root[r] == usize::MAX {
            zone_of_root[r] = zones.len();
            zones.push(Vec::new());
        }
        zones[zone_of_root[r]].push(v);
    }
    let singletons = (0..n).filter(|&v| !in_closure[v]).collect();
    Ok(SkeletonData { h, a_vertices, a_edges, zones, singletons })
}

/// Vertices reachable from `f_nodes` along edges on which `q` strictly
/// increases, `f_nodes` included. Sorted.
pub fn monotone_reach(graph: &ResolutionGraph, q: &[Rational], f_nodes: &[usize]) -> Vec<usize> {
    let n = graph.vertex_count();
    let mut seen = vec![false; n];
    let mut stack: Vec<usize> = f_nodes.to_vec();
    for &s in f_nodes {
        seen[s] = true;
    }
    while let Some(v) = stack.pop() {
        for (_, w) in graph.incident(v) {
            if !seen[w] && q[w] > q[v] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    (0..n).filter(|&v| seen[v]).collect()
}

/// `m_v(f) (2 g_v - 2 + val(v) + f*.E_v - sum_i m_i(f) q_i E_i.E_v)`.
pub fn curvature_constant(
    graph: &ResolutionGraph,
    f: &FunctionData,
    q: &[Rational],
    v: &str,
) -> Result<Rational> {
    let v = graph.vertex_index(v)?;
    let row = &graph.int_matrix()[v];
    let pairing: Rational = row
        .iter()
        .enumerate()
        .filter(|(_, &e)| e != 0)
        .map(|(i, &e)| &f.m[i] * &q[i] * rat(e))
        .sum();
    let local = rat(2 * i64::from(graph.vertices()[v].genus) - 2 + graph.valency(v) as i64 + f.weights[v] as i64);
    Ok(&f.m[v] * (local - pairing))
}
