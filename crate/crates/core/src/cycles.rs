//! Cycles on the exceptional divisor: pairing, Euler characteristic and
//! Laufer's minimal cycle.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::ResolutionGraph;
use crate::linalg::{self, ratio, Rational};

/// Integer coefficients on the exceptional curves, in vertex order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CycleDivisor(pub Vec<i64>);

impl CycleDivisor {
    pub fn zero(n: usize) -> Self {
        CycleDivisor(vec![0; n])
    }

    pub fn unit(n: usize, v: usize) -> Self {
        let mut d = Self::zero(n);
        d.0[v] = 1;
        d
    }

    pub fn is_effective(&self) -> bool {
        self.0.iter().all(|&c| c >= 0)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

impl std::ops::Add for &CycleDivisor {
    type Output = CycleDivisor;

    fn add(self, other: &CycleDivisor) -> CycleDivisor {
        CycleDivisor(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

fn check_len(graph: &ResolutionGraph, d: &CycleDivisor) -> Result<()> {
    if d.len() != graph.vertex_count() {
        return Err(Error::DimensionMismatch(format!(
            "cycle has {} coefficients for {} vertices",
            d.len(),
            graph.vertex_count()
        )));
    }
    Ok(())
}

/// `D1 . D2`.
pub fn pair(graph: &ResolutionGraph, d1: &CycleDivisor, d2: &CycleDivisor) -> Result<i64> {
    check_len(graph, d1)?;
    check_len(graph, d2)?;
    let m = graph.int_matrix();
    Ok(pair_with(&m, &d1.0, &d2.0))
}

fn pair_with(m: &[Vec<i64>], d1: &[i64], d2: &[i64]) -> i64 {
    m.iter()
        .zip(d1)
        .filter(|(_, &c)| c != 0)
        .map(|(row, &c)| c * row.iter().zip(d2).map(|(e, x)| e * x).sum::<i64>())
        .sum()
}

/// `chi(D) = -1/2 D.(D + K)`, with `K.E_v` from adjunction.
pub fn chi_cycle(graph: &ResolutionGraph, d: &CycleDivisor) -> Result<Rational> {
    let dd = pair(graph, d, d)?;
    let dk: i64 = graph
        .vertices()
        .iter()
        .zip(&d.0)
        .map(|(v, &c)| c * (-v.self_int + 2 * i64::from(v.genus) - 2))
        .sum();
    Ok(ratio(-(dd + dk), 2))
}

/// Laufer's algorithm: start from the reduced exceptional divisor and add
/// `E_v` at the lowest-index vertex pairing positively until none does.
pub fn laufer_min_cycle(graph: &ResolutionGraph) -> Result<CycleDivisor> {
    if !linalg::is_negative_definite(&graph.intersection_matrix())? {
        return Err(Error::NotNegativeDefinite);
    }
    let m = graph.int_matrix();
    let n = graph.vertex_count();
    let mut z = vec![1i64; n];
    // z . E_v, kept up to date as z grows
    let mut pairings: Vec<i64> = m.iter().map(|row| row.iter().sum()).collect();
    while let Some(v) = pairings.iter().position(|&p| p > 0) {
        z[v] += 1;
        for (p, row) in pairings.iter_mut().zip(&m) {
            *p += row[v];
        }
    }
    Ok(CycleDivisor(z))
}

/// Whether `D . E_v <= 0` for every vertex.
pub fn is_topological(graph: &ResolutionGraph, d: &CycleDivisor) -> Result<bool> {
    check_len(graph, d)?;
    if !d.is_effective() {
        return Err(Error::NotEffective);
    }
    let m = graph.int_matrix();
    Ok(m.iter().all(|row| row.iter().zip(&d.0).map(|(e, c)| e * c).sum::<i64>() <= 0))
}

/// Whether `chi(Z_min) = 1`. When it holds, Artin's theorem identifies
/// topological and analytic cycles.
pub fn is_rational(graph: &ResolutionGraph) -> Result<bool> {
    let z = laufer_min_cycle(graph)?;
    Ok(chi_cycle(graph, &z)? == linalg::rat(1))
}
