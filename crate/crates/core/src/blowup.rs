//! Blowing up a point of the exceptional divisor, with the multiplicities
//! and inner rates carried along by local update rules.

use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::graph::{Arrow, ArrowKind, ResolutionGraph, Vertex};
use crate::invariants::{self, Function};
use crate::linalg::{rat, RatVector, Rational};

/// A graph together with `m(f)`, `m(g)` and the inner rates `q`, which are
/// computed from its polar arrows (no polar arrows means `P = 0`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlowupState {
    pub graph: ResolutionGraph,
    pub m_f: RatVector,
    pub m_g: RatVector,
    pub q: RatVector,
}

impl BlowupState {
    pub fn from_graph(graph: ResolutionGraph) -> Result<Self> {
        let f = invariants::multiplicities(&graph, Function::F)?;
        let g = invariants::multiplicities(&graph, Function::G)?;
        let p = graph.arrow_weights(ArrowKind::Polar);
        let rates = invariants::inner_rates(&graph, &f, &p)?;
        Ok(BlowupState { graph, m_f: f.m, m_g: g.m, q: rates.q })
    }

    /// Fails unless the stored data is what the graph itself determines.
    pub fn check(&self) -> Result<()> {
        let fresh = Self::from_graph(self.graph.clone())?;
        for (name, ours, theirs) in [("m_f", &self.m_f, &fresh.m_f), ("m_g", &self.m_g, &fresh.m_g), ("q", &self.q, &fresh.q)] {
            if ours != theirs {
                return Err(Error::InconsistentState(format!("stored {name} does not match the graph")));
            }
        }
        Ok(())
    }

    pub fn hironaka(&self, v: usize) -> Rational {
        &self.m_g[v] / &self.m_f[v]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlowupSite {
    /// A smooth point of `E_v` meeting no other curve.
    FreePoint { vertex: usize },
    /// The point where branch `branch` (among entries of `kind` at `vertex`)
    /// meets `E_v`.
    OnBranch { kind: ArrowKind, vertex: usize, branch: usize },
    /// The intersection point of the two curves of edge `edge`.
    DoublePoint { edge: usize },
}

fn split_index(s: &str) -> Result<(&str, usize)> {
    match s.rsplit_once('#') {
        None => Ok((s, 0)),
        Some((head, idx)) => idx.parse().map(|i| (head, i)).map_err(|_| Error::UnknownSite(s.to_string())),
    }
}

impl BlowupSite {
    /// Parses `free:v`, `f:v#k`, `g:v#k`, `polar:v#k` or `edge:v-w#k`; a
    /// missing `#k` means `#0`.
    pub fn parse(graph: &ResolutionGraph, text: &str) -> Result<Self> {
        let unknown = || Error::UnknownSite(text.to_string());
        let (tag, rest) = text.split_once(':').ok_or_else(unknown)?;
        let site = match tag {
            "free" => BlowupSite::FreePoint { vertex: graph.vertex_index(rest).map_err(|_| unknown())? },
            "f" | "g" | "polar" => {
                let (id, branch) = split_index(rest)?;
                let kind: ArrowKind = tag.parse()?;
                BlowupSite::OnBranch { kind, vertex: graph.vertex_index(id).map_err(|_| unknown())?, branch }
            }
            "edge" => {
                let (pair, k) = split_index(rest)?;
                // ids may themselves contain '-', so try every split
                let ends = pair
                    .match_indices('-')
                    .map(|(i, _)| (&pair[..i], &pair[i + 1..]))
                    .find_map(|(a, b)| Some((graph.vertex_index(a).ok()?, graph.vertex_index(b).ok()?)))
                    .ok_or_else(unknown)?;
                let edge = graph
                    .edges()
                    .iter()
                    .enumerate()
                    .filter(|(_, &(a, b))| (a, b) == ends || (b, a) == ends)
                    .map(|(e, _)| e)
                    .nth(k)
                    .ok_or_else(unknown)?;
                BlowupSite::DoublePoint { edge }
            }
            _ => return Err(unknown()),
        };
        site.resolve(graph)?;
        Ok(site)
    }

    /// Checks the site exists; returns the arrow index for branch sites.
    fn resolve(&self, graph: &ResolutionGraph) -> Result<Option<usize>> {
        match *self {
            BlowupSite::FreePoint { vertex } if vertex < graph.vertex_count() => Ok(None),
            BlowupSite::OnBranch { kind, vertex, branch } if vertex < graph.vertex_count() => {
                graph.branches(kind, vertex).get(branch).copied().map(Some).ok_or_else(|| {
                    Error::UnknownSite(format!("no {kind} branch #{branch} at {}", graph.id(vertex)))
                })
            }
            BlowupSite::DoublePoint { edge } => match graph.edges().get(edge) {
                Some(&(a, b)) if a != b => Ok(None),
                Some(_) => Err(Error::UnknownSite(format!("edge #{edge} is a loop"))),
                None => Err(Error::UnknownSite(format!("no edge #{edge}"))),
            },
            _ => Err(Error::UnknownSite(format!("{self:?}"))),
        }
    }

    /// Every site of the graph: one free point per vertex, one per arrow
    /// entry and one per edge.
    pub fn all(graph: &ResolutionGraph) -> Vec<BlowupSite> {
        let mut sites: Vec<BlowupSite> = (0..graph.vertex_count()).map(|vertex| BlowupSite::FreePoint { vertex }).collect();
        for kind in [ArrowKind::F, ArrowKind::G, ArrowKind::Polar] {
            for vertex in 0..graph.vertex_count() {
                let count = graph.branches(kind, vertex).len();
                sites.extend((0..count).map(|branch| BlowupSite::OnBranch { kind, vertex, branch }));
            }
        }
        sites.extend(
            graph
                .edges()
                .iter()
                .enumerate()
                .filter(|(_, &(a, b))| a != b)
                .map(|(edge, _)| BlowupSite::DoublePoint { edge }),
        );
        sites
    }

    pub fn display<'a>(&'a self, graph: &'a ResolutionGraph) -> impl fmt::Display + 'a {
        SiteDisplay { site: self, graph }
    }
}

struct SiteDisplay<'a> {
    site: &'a BlowupSite,
    graph: &'a ResolutionGraph,
}

impl fmt::Display for SiteDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = self.graph;
        match *self.site {
            BlowupSite::FreePoint { vertex } => write!(f, "free:{}", g.id(vertex)),
            BlowupSite::OnBranch { kind, vertex, branch } => write!(f, "{kind}:{}#{branch}", g.id(vertex)),
            BlowupSite::DoublePoint { edge } => {
                let (a, b) = g.edges()[edge];
                let k = g.edges()[..edge].iter().filter(|&&e| e == (a, b) || e == (b, a)).count();
                write!(f, "edge:{}-{}#{k}", g.id(a), g.id(b))
            }
        }
    }
}

/// Blows up `site`. The new vertex is appended last. An f or g entry of
/// weight k stands for k curvettes, of which exactly one moves to the new
/// vertex; a polar entry moves whole.
pub fn blow_up(state: &BlowupState, site: BlowupSite) -> Result<BlowupState> {
    let arrow = site.resolve(&state.graph)?;
    state.check()?;
    let mut graph = state.graph.clone();
    let (mut m_f, mut m_g, mut q) = (state.m_f.clone(), state.m_g.clone(), state.q.clone());
    let id = graph.fresh_id("e");
    let w = graph.push_vertex(Vertex { id, self_int: -1, genus: 0 });

    let (mf_w, mg_w, q_w) = match site {
        BlowupSite::FreePoint { vertex: v } => {
            graph.vertex_mut(v).self_int -= 1;
            graph.edges_mut().push((v, w));
            (m_f[v].clone(), m_g[v].clone(), &q[v] + rat(1) / &m_f[v])
        }
        BlowupSite::OnBranch { kind, vertex: v, branch } => {
            let idx = arrow.expect("branch sites resolve to an arrow");
            if kind != ArrowKind::Polar && q[v] != state.hironaka(v) {
                return Err(Error::InconsistentState(format!(
                    "q differs from m(g)/m(f) at {}, which carries {kind} branch #{branch}",
                    graph.id(v)
                )));
            }
            graph.vertex_mut(v).self_int -= 1;
            graph.edges_mut().push((v, w));
            let weight = graph.arrows()[idx].weight;
            let arrows = graph.arrows_mut();
            if kind == ArrowKind::Polar || weight == 1 {
                arrows[idx].vertex = w;
            } else {
                arrows[idx].weight -= 1;
                arrows.push(Arrow { kind, vertex: w, weight: 1 });
            }
            match kind {
                ArrowKind::F => {
                    let mf_w = &m_f[v] + rat(1);
                    let q_w = &m_f[v] * &q[v] / &mf_w;
                    (mf_w, m_g[v].clone(), q_w)
                }
                ArrowKind::G => (m_f[v].clone(), &m_g[v] + rat(1), &q[v] + rat(1) / &m_f[v]),
                ArrowKind::Polar => {
                    (m_f[v].clone(), m_g[v].clone(), &q[v] + rat(1 + weight as i64) / &m_f[v])
                }
            }
        }
        BlowupSite::DoublePoint { edge } => {
            let (a, b) = graph.edges()[edge];
            graph.vertex_mut(a).self_int -= 1;
            graph.vertex_mut(b).self_int -= 1;
            graph.edges_mut()[edge] = (a, w);
            graph.edges_mut().push((w, b));
            let mf_w = &m_f[a] + &m_f[b];
            let q_w = (&q[a] * &m_f[a] + &q[b] * &m_f[b]) / &mf_w;
            (mf_w, &m_g[a] + &m_g[b], q_w)
        }
    };
    if mf_w.is_zero() {
        return Err(Error::InconsistentState("zero multiplicity at the new vertex".into()));
    }
    m_f.push(mf_w);
    m_g.push(mg_w);
    q.push(q_w);
    Ok(BlowupState { graph, m_f, m_g, q })
}
