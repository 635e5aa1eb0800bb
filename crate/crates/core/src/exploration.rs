//! Polar exploration: every polar intersection vector compatible with a
//! fixed topological type of `(g, f)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Arrow, ArrowKind, ResolutionGraph, Vertex};
use crate::invariants::{self, Function, FunctionData, SkeletonData};
use crate::linalg::{self, ratvec_serde, RatVector, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ZoneEquation {
    pub vertices: Vec<usize>,
    /// `m_v(f)` for each vertex of the zone.
    pub coefficients: Vec<u64>,
    pub rhs: u64,
}

/// Michel's relations: a forced value at every singleton and one linear
/// equation per zone.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MichelSystem {
    pub vertex_count: usize,
    pub forced: Vec<(usize, u64)>,
    pub zones: Vec<ZoneEquation>,
}

impl MichelSystem {
    /// Whether `p` satisfies every relation exactly.
    pub fn satisfied_by(&self, p: &[u64]) -> bool {
        p.len() == self.vertex_count
            && self.forced.iter().all(|&(v, x)| p[v] == x)
            && self
                .zones
                .iter()
                .all(|z| z.vertices.iter().zip(&z.coefficients).map(|(&v, &c)| c * p[v]).sum::<u64>() == z.rhs)
    }
}

pub fn michel_system(
    graph: &ResolutionGraph,
    f: &FunctionData,
    g: &FunctionData,
    skeleton: &SkeletonData,
) -> Result<MichelSystem> {
    let m = f.m_i64()?;
    let chi = invariants::chi_prime(graph, f, g);
    let mut forced = Vec::with_capacity(skeleton.singletons.len());
    for &v in &skeleton.singletons {
        let value = -chi[v];
        if value < 0 {
            return Err(Error::Infeasible(format!("P at {} would be {value}", graph.id(v))));
        }
        forced.push((v, value as u64));
    }
    let mut zones = Vec::with_capacity(skeleton.zones.len());
    for zone in &skeleton.zones {
        let rhs: i64 = -zone.iter().map(|&v| m[v] * chi[v]).sum::<i64>();
        if rhs < 0 {
            let ids: Vec<&str> = zone.iter().map(|&v| graph.id(v)).collect();
            return Err(Error::Infeasible(format!("zone {{{}}} has right-hand side {rhs}", ids.join(", "))));
        }
        zones.push(ZoneEquation {
            vertices: zone.clone(),
            coefficients: zone.iter().map(|&v| m[v] as u64).collect(),
            rhs: rhs as u64,
        });
    }
    Ok(MichelSystem { vertex_count: graph.vertex_count(), forced, zones })
}

/// Lazily enumerates the solutions of a Michel system, zone by zone, by
/// backtracking with `P_v <= R_Z / m_v(f)`.
pub struct Candidates<'a> {
    system: &'a MichelSystem,
    base: Vec<u64>,
    // flattened (vertex, coefficient, zone rhs if first in zone, closes zone)
    slots: Vec<(usize, u64, Option<u64>, bool)>,
    values: Vec<u64>,
    remaining: Vec<u64>,
    started: bool,
    done: bool,
}

pub fn enumerate_candidates(system: &MichelSystem) -> Candidates<'_> {
    let mut base = vec![0; system.vertex_count];
    for &(v, x) in &system.forced {
        base[v] = x;
    }
    let mut slots = Vec::new();
    for z in &system.zones {
        let last = z.vertices.len() - 1;
        for (i, (&v, &c)) in z.vertices.iter().zip(&z.coefficients).enumerate() {
            slots.push((v, c, (i == 0).then_some(z.rhs), i == last));
        }
    }
    let len = slots.len();
    Candidates { system, base, slots, values: vec![0; len], remaining: vec![0; len], started: false, done: false }
}

impl Candidates<'_> {
    fn first(&mut self, i: usize) -> bool {
        let (_, c, start, closes) = self.slots[i];
        self.remaining[i] = match start {
            Some(rhs) => rhs,
            None => self.remaining[i - 1] - self.slots[i - 1].1 * self.values[i - 1],
        };
        let r = self.remaining[i];
        if closes {
            self.values[i] = r / c;
            r.is_multiple_of(c)
        } else {
            self.values[i] = 0;
            true
        }
    }

    fn bump(&mut self, i: usize) -> bool {
        let (_, c, _, closes) = self.slots[i];
        if closes || (self.values[i] + 1) * c > self.remaining[i] {
            return false;
        }
        self.values[i] += 1;
        true
    }

    fn emit(&self) -> Vec<u64> {
        let mut p = self.base.clone();
        for (&(v, ..), &x) in self.slots.iter().zip(&self.values) {
            p[v] = x;
        }
        p
    }

    pub fn system(&self) -> &MichelSystem {
        self.system
    }
}

impl Iterator for Candidates<'_> {
    type Item = Vec<u64>;

    fn next(&mut self) -> Option<Vec<u64>> {
        if self.done {
            return None;
        }
        let len = self.slots.len();
        if len == 0 {
            self.done = true;
            return Some(self.base.clone());
        }
        let (mut i, mut fresh) = if self.started { (len - 1, false) } else { (0, true) };
        self.started = true;
        loop {
            let ok = if fresh { self.first(i) } else { self.bump(i) };
            if ok {
                if i + 1 == len {
                    return Some(self.emit());
                }
                i += 1;
                fresh = true;
            } else {
                if i == 0 {
                    self.done = true;
                    return None;
                }
                i -= 1;
                fresh = false;
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rejection {
    NonIntegralA,
    NonPositiveQ,
    HironakaMismatch,
    MonotoneFail,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RejectionCounts {
    pub non_integral_a: u64,
    pub non_positive_q: u64,
    pub hironaka_mismatch: u64,
    pub monotone_fail: u64,
}

impl RejectionCounts {
    fn add(&mut self, r: Rejection) {
        match r {
            Rejection::NonIntegralA => self.non_integral_a += 1,
            Rejection::NonPositiveQ => self.non_positive_q += 1,
            Rejection::HironakaMismatch => self.hironaka_mismatch += 1,
            Rejection::MonotoneFail => self.monotone_fail += 1,
        }
    }

    fn merge(mut self, other: Self) -> Self {
        self.non_integral_a += other.non_integral_a;
        self.non_positive_q += other.non_positive_q;
        self.hironaka_mismatch += other.hironaka_mismatch;
        self.monotone_fail += other.monotone_fail;
        self
    }

    pub fn total(&self) -> u64 {
        self.non_integral_a + self.non_positive_q + self.hironaka_mismatch + self.monotone_fail
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Admissible {
    #[serde(rename = "P")]
    pub p: Vec<u64>,
    #[serde(with = "ratvec_serde")]
    pub q: RatVector,
    #[serde(with = "ratvec_serde")]
    pub a: RatVector,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExplorationResult {
    pub michel_count: u64,
    pub admissible: Vec<Admissible>,
    pub rejected: RejectionCounts,
    #[serde(skip)]
    pub warnings: Vec<String>,
    #[serde(skip)]
    pub system: MichelSystem,
}

impl ExplorationResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data")
    }
}

/// Vertices where `q` must equal `h`: `A` and every f- or g-node.
fn pinned_vertices(f: &FunctionData, g: &FunctionData, skeleton: &SkeletonData) -> Vec<usize> {
    let mut pinned: Vec<usize> =
        skeleton.a_vertices.iter().copied().chain(f.nodes()).chain(g.nodes()).collect();
    pinned.sort_unstable();
    pinned.dedup();
    pinned
}

fn judge(
    graph: &ResolutionGraph,
    f: &FunctionData,
    g: &FunctionData,
    pinned: &[usize],
    a: &[Rational],
) -> std::result::Result<RatVector, Rejection> {
    if !a.iter().all(linalg::is_integer) {
        return Err(Rejection::NonIntegralA);
    }
    if !a.iter().all(Signed::is_positive) {
        return Err(Rejection::NonPositiveQ);
    }
    let q: RatVector = a.iter().zip(&f.m).map(|(a, m)| a / m).collect();
    if pinned.iter().any(|&v| a[v] != g.m[v]) {
        return Err(Rejection::HironakaMismatch);
    }
    if invariants::monotone_reach(graph, &q, &f.nodes()).len() != graph.vertex_count() {
        return Err(Rejection::MonotoneFail);
    }
    Ok(q)
}

/// The filters applied to one polar vector, solving the inner rates system
/// from scratch. Returns `(a, q)` or the first filter that fails.
pub fn admissibility(
    graph: &ResolutionGraph,
    f: &FunctionData,
    g: &FunctionData,
    skeleton: &SkeletonData,
    p: &[u64],
) -> Result<std::result::Result<(RatVector, RatVector), Rejection>> {
    let rates = invariants::inner_rates(graph, f, p)?;
    let pinned = pinned_vertices(f, g, skeleton);
    Ok(judge(graph, f, g, &pinned, &rates.a).map(|q| (rates.a, q)))
}

/// `a = (adj (K + F) - adj P) / det`, with the adjugate of the intersection
/// matrix precomputed once.
struct FastSolver {
    adj_t: Vec<Vec<BigInt>>,
    base: Vec<BigInt>,
    det: BigInt,
}

impl FastSolver {
    fn new(graph: &ResolutionGraph, f: &FunctionData) -> Result<Self> {
        let m = graph.intersection_matrix();
        let det = linalg::determinant(&m)?;
        let inv = linalg::inverse(&m)?;
        let n = graph.vertex_count();
        let det = det.to_integer();
        // column v of the adjugate, as a row
        let adj_t: Vec<Vec<BigInt>> = (0..n)
            .map(|c| (0..n).map(|r| (inv.get(r, c) * Rational::from_integer(det.clone())).to_integer()).collect())
            .collect();
        let rhs = invariants::inner_rate_rhs(graph, f, &vec![0; n])?;
        let base = (0..n)
            .map(|r| (0..n).map(|c| &adj_t[c][r] * rhs[c].to_integer()).sum())
            .collect();
        Ok(FastSolver { adj_t, base, det })
    }

    fn solve(&self, p: &[u64]) -> RatVector {
        let mut num = self.base.clone();
        for (v, &x) in p.iter().enumerate().filter(|(_, &x)| x > 0) {
            let x = BigInt::from(x);
            for (acc, adj) in num.iter_mut().zip(&self.adj_t[v]) {
                *acc -= adj * &x;
            }
        }
        num.into_iter()
            .map(|n| {
                if n.is_multiple_of(&self.det) {
                    Rational::from_integer(n / &self.det)
                } else {
                    Rational::new(n, self.det.clone())
                }
            })
            .collect()
    }
}

const CHUNK: usize = 4096;

/// Enumerates Michel candidates and keeps the ones passing every filter.
/// Polar arrows already present in `graph` are ignored.
pub fn explore(graph: &ResolutionGraph) -> Result<ExplorationResult> {
    let mut warnings = Vec::new();
    let graph = if graph.has_arrows(ArrowKind::Polar) {
        warnings.push("polar arrows in the input are ignored".to_string());
        graph.with_polar(&vec![0; graph.vertex_count()])?
    } else {
        graph.clone()
    };
    let f = invariants::multiplicities(&graph, Function::F)?;
    let g = invariants::multiplicities(&graph, Function::G)?;
    for d in [&f, &g] {
        if !d.is_valid() {
            return Err(Error::NonIntegralMultiplicities(d.kind.to_string()));
        }
    }
    let skeleton = invariants::a_subgraph(&graph, &f, &g)?;
    for z in skeleton.non_constant_zones() {
        let ids: Vec<&str> = skeleton.zones[z].iter().map(|&v| graph.id(v)).collect();
        warnings.push(format!("m(g)/m(f) is not constant on zone {{{}}}", ids.join(", ")));
    }
    let system = michel_system(&graph, &f, &g, &skeleton)?;
    let solver = FastSolver::new(&graph, &f)?;
    let pinned = pinned_vertices(&f, &g, &skeleton);

    let mut candidates = enumerate_candidates(&system);
    let mut michel_count = 0u64;
    let mut admissible = Vec::new();
    let mut rejected = RejectionCounts::default();
    loop {
        let chunk: Vec<Vec<u64>> = candidates.by_ref().take(CHUNK).collect();
        if chunk.is_empty() {
            break;
        }
        michel_count += chunk.len() as u64;
        let (kept, counts) = chunk
            .into_par_iter()
            .map(|p| {
                let a = solver.solve(&p);
                match judge(&graph, &f, &g, &pinned, &a) {
                    Ok(q) => (vec![Admissible { p, q, a }], RejectionCounts::default()),
                    Err(r) => {
                        let mut c = RejectionCounts::default();
                        c.add(r);
                        (Vec::new(), c)
                    }
                }
            })
            .reduce(
                || (Vec::new(), RejectionCounts::default()),
                |(mut x, cx), (y, cy)| {
                    x.extend(y);
                    (x, cx.merge(cy))
                },
            );
        admissible.extend(kept);
        rejected = rejected.merge(counts);
    }
    admissible.sort_by(|x, y| x.p.cmp(&y.p));
    if admissible.iter().any(|x| x.a.iter().any(Zero::is_zero)) {
        return Err(Error::InconsistentState("admissible vector with a zero rate".into()));
    }
    Ok(ExplorationResult { michel_count, admissible, rejected, warnings, system })
}

/// The graph `Gamma_n` of the family of morphisms with `n + 5` polar
/// vectors. Vertex order: `v1..v_{4n}`, `w_{2n}`, `w_{2n+1}`, `w2`, `w1`.
pub fn generate_famille(n: usize) -> Result<ResolutionGraph> {
    if n < 2 {
        return Err(Error::BadParameter(format!("n must be at least 2, got {n}")));
    }
    let chain = 4 * n;
    let mut vertices: Vec<Vertex> = (1..=chain)
        .map(|k| Vertex { id: format!("v{k}"), self_int: if k == 3 { -3 } else { -2 }, genus: 0 })
        .collect();
    for (id, self_int) in [(2 * n, -2), (2 * n + 1, -2), (2, -(n as i64) - 1), (1, -2)] {
        vertices.push(Vertex { id: format!("w{id}"), self_int, genus: 0 });
    }
    let (w2n, w2n1, w2, w1) = (chain, chain + 1, chain + 2, chain + 3);
    let mut edges: Vec<(usize, usize)> = (1..chain).map(|k| (k - 1, k)).collect();
    edges.extend([(chain - 1, w2n), (chain - 1, w2n1), (w2n1, w2), (w2, w1)]);
    let arrows = vec![
        Arrow { kind: ArrowKind::G, vertex: 0, weight: 6 },
        Arrow { kind: ArrowKind::F, vertex: 0, weight: 9 },
        Arrow { kind: ArrowKind::G, vertex: 2, weight: 1 },
    ];
    ResolutionGraph::new(vertices, edges, arrows)
}
