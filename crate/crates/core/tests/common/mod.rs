//! Fixtures and independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use dualgraph::ResolutionGraph;
use rand::RngExt;

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

pub fn load(name: &str) -> ResolutionGraph {
    let text = std::fs::read_to_string(data_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"));
    ResolutionGraph::from_json(&text).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// The three polar vectors of the six-vertex example with f of order 60 at
/// the (-1)-curve, in file order (m5, m10, m12, m24, m35, m60).
pub const PATRICIO_VECTORS: [[u64; 6]; 3] = [[0, 0, 4, 0, 0, 0], [0, 0, 2, 1, 0, 0], [0, 0, 0, 2, 0, 0]];

/// Tail coordinates (w_{2n}, w_{2n+1}, w_2, w_1) of the polar vectors
/// allowed for the family graph.
pub fn famille_tails(n: u64) -> BTreeSet<[u64; 4]> {
    let mut set: BTreeSet<[u64; 4]> = [[1, 0, 1, 0], [1, 0, 0, 2], [0, 1, 0, 1]].into_iter().collect();
    set.extend((0..=n + 1).map(|k| [0, 0, k, 2 * n + 2 - 2 * k]));
    set
}

pub fn famille_vector(n: usize, tail: [u64; 4]) -> Vec<u64> {
    let mut p = vec![0; 4 * n + 4];
    p[0] = 14;
    p[4 * n..].copy_from_slice(&tail);
    p
}

/// `E_{v1}+E_{v2}+E_{v3} + 2(E_{v4}+...+E_{v_{4n}}+E_{w_{2n+1}}) + E_{w2}+E_{w1}+E_{w_{2n}}`
/// in the vertex order `v1..v_{4n}, w_{2n}, w_{2n+1}, w2, w1`.
pub fn famille_min_cycle(n: usize) -> Vec<i64> {
    let mut z = vec![1, 1, 1];
    z.extend(std::iter::repeat_n(2, 4 * n - 3));
    z.extend([1, 2, 1, 1]);
    z
}

/// Graphs with full polar data: the bundled six-vertex example, the three
/// polar vectors on its polar-free twin and every family vector for
/// `n = 2..=6`.
pub fn full_data_examples() -> Vec<(String, ResolutionGraph)> {
    let mut out = vec![("example35".to_string(), load("example35.json"))];
    let patricio = load("patricio.json");
    for p in PATRICIO_VECTORS {
        out.push((format!("patricio {p:?}"), patricio.with_polar(&p).unwrap()));
    }
    for n in 2..=6 {
        let g = dualgraph::generate_famille(n).unwrap();
        for tail in famille_tails(n as u64) {
            out.push((format!("famille n={n} tail {tail:?}"), g.with_polar(&famille_vector(n, tail)).unwrap()));
        }
    }
    out
}

/// Determinant by expansion over all permutations.
pub fn leibniz_det(m: &[Vec<i64>]) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut total = 0i128;
    permute(&mut perm, 0, m, &mut total);
    total
}

fn permute(perm: &mut Vec<usize>, k: usize, m: &[Vec<i64>], total: &mut i128) {
    let n = perm.len();
    if k == n {
        let mut sign = 1i128;
        let mut seen = vec![false; n];
        for i in 0..n {
            if seen[i] {
                continue;
            }
            let mut len = 0;
            let mut j = i;
            while !seen[j] {
                seen[j] = true;
                j = perm[j];
                len += 1;
            }
            if len % 2 == 0 {
                sign = -sign;
            }
        }
        let prod: i128 = (0..n).map(|i| i128::from(m[i][perm[i]])).product();
        *total += sign * prod;
        return;
    }
    for i in k..n {
        perm.swap(k, i);
        permute(perm, k + 1, m, total);
        perm.swap(k, i);
    }
}

fn minor(m: &[Vec<i64>], row: usize, col: usize) -> Vec<Vec<i64>> {
    m.iter()
        .enumerate()
        .filter(|&(r, _)| r != row)
        .map(|(_, rv)| rv.iter().enumerate().filter(|&(c, _)| c != col).map(|(_, &x)| x).collect())
        .collect()
}

/// Classical adjugate from cofactors.
pub fn adjugate(m: &[Vec<i64>]) -> Vec<Vec<i128>> {
    let n = m.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
                    sign * leibniz_det(&minor(m, j, i))
                })
                .collect()
        })
        .collect()
}

/// Sylvester: `(-1)^k det_k > 0` for every leading minor.
pub fn negative_definite_oracle(m: &[Vec<i64>]) -> bool {
    (1..=m.len()).all(|k| {
        let lead: Vec<Vec<i64>> = m[..k].iter().map(|r| r[..k].to_vec()).collect();
        let d = leibniz_det(&lead);
        if k % 2 == 0 {
            d > 0
        } else {
            d < 0
        }
    })
}

/// Number of nonnegative integer solutions of `sum c_i x_i = rhs`.
pub fn count_solutions(coefficients: &[u64], rhs: u64) -> u64 {
    let mut ways = vec![0u64; rhs as usize + 1];
    ways[0] = 1;
    for &c in coefficients {
        for t in c as usize..=rhs as usize {
            ways[t] += ways[t - c as usize];
        }
    }
    ways[rhs as usize]
}

/// Partitions of `n` into parts of size at most `k`.
pub fn partitions(n: u64, k: u64) -> u64 {
    if n == 0 {
        return 1;
    }
    if k == 0 {
        return 0;
    }
    (0..=n / k).map(|j| partitions(n - j * k, k - 1)).sum()
}

/// Least effective nonzero cycle with coefficients `<= bound` pairing
/// non-positively with every curve, by exhaustion. `None` when the set of
/// such cycles is empty or has no least element.
pub fn brute_min_cycle(m: &[Vec<i64>], bound: i64) -> Option<Vec<i64>> {
    let n = m.len();
    let mut d = vec![0i64; n];
    let mut found: Vec<Vec<i64>> = Vec::new();
    loop {
        let mut i = 0;
        while i < n && d[i] == bound {
            d[i] = 0;
            i += 1;
        }
        if i == n {
            break;
        }
        d[i] += 1;
        if m.iter().all(|row| row.iter().zip(&d).map(|(e, c)| e * c).sum::<i64>() <= 0) {
            found.push(d.clone());
        }
    }
    let least: Vec<i64> = (0..n).map(|v| found.iter().map(|c| c[v]).min()).collect::<Option<_>>()?;
    found.contains(&least).then_some(least)
}

/// Connected simple graphs on `n` labelled vertices, as edge lists.
pub fn connected_simple_graphs(n: usize) -> Vec<Vec<(usize, usize)>> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    (0u32..1 << pairs.len())
        .map(|mask| pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e).collect::<Vec<_>>())
        .filter(|edges| {
            let mut seen = vec![false; n];
            let mut stack = vec![0];
            seen[0] = true;
            while let Some(v) = stack.pop() {
                for &(a, b) in edges {
                    for (x, y) in [(a, b), (b, a)] {
                        if x == v && !seen[y] {
                            seen[y] = true;
                            stack.push(y);
                        }
                    }
                }
            }
            seen.iter().all(|&s| s)
        })
        .collect()
}

pub fn graph_from_parts(
    self_ints: &[i64],
    edges: &[(usize, usize)],
    f_weights: &[u64],
    g_weights: &[u64],
) -> ResolutionGraph {
    let vertices: Vec<String> = self_ints
        .iter()
        .enumerate()
        .map(|(i, s)| format!(r#"{{"id":"u{i}","self_int":{s}}}"#))
        .collect();
    let edges: Vec<String> = edges.iter().map(|(a, b)| format!(r#"["u{a}","u{b}"]"#)).collect();
    let mut arrows = Vec::new();
    for (kind, weights) in [("f", f_weights), ("g", g_weights)] {
        for (v, &w) in weights.iter().enumerate().filter(|(_, &w)| w > 0) {
            arrows.push(format!(r#"{{"kind":"{kind}","vertex":"u{v}","weight":{w}}}"#));
        }
    }
    ResolutionGraph::from_json(&format!(
        r#"{{"vertices":[{}],"edges":[{}],"arrows":[{}]}}"#,
        vertices.join(","),
        edges.join(","),
        arrows.join(",")
    ))
    .unwrap()
}

/// A random sequence of point blowups starting from one (-1)-curve crossed
/// by a few f- and g-curvettes, stopped at `size` curves.
pub fn random_blowup_graph(rng: &mut impl rand::Rng, size: usize) -> ResolutionGraph {
    let mut self_ints = vec![-1i64];
    let mut edges: Vec<(usize, usize)> = Vec::new();
    // (is_f, vertex) per curvette
    let mut curvettes: Vec<(bool, usize)> = Vec::new();
    let nf = rng.random_range(1..=3usize);
    let ng = rng.random_range(1..=3usize);
    curvettes.extend(std::iter::repeat_n((true, 0), nf));
    curvettes.extend(std::iter::repeat_n((false, 0), ng));
    while self_ints.len() < size {
        let w = self_ints.len();
        self_ints.push(-1);
        match rng.random_range(0..3u8) {
            0 => {
                let v = rng.random_range(0..w);
                self_ints[v] -= 1;
                edges.push((v, w));
            }
            1 if !edges.is_empty() => {
                let e = rng.random_range(0..edges.len());
                let (a, b) = edges[e];
                self_ints[a] -= 1;
                self_ints[b] -= 1;
                edges[e] = (a, w);
                edges.push((w, b));
            }
            _ => {
                let c = rng.random_range(0..curvettes.len());
                let v = curvettes[c].1;
                self_ints[v] -= 1;
                edges.push((v, w));
                curvettes[c].1 = w;
            }
        }
    }
    let mut f = vec![0u64; size];
    let mut g = vec![0u64; size];
    for (is_f, v) in curvettes {
        if is_f {
            f[v] += 1;
        } else {
            g[v] += 1;
        }
    }
    graph_from_parts(&self_ints, &edges, &f, &g)
}

/// Every `P` in `[0, bound]^n` that passes the admissibility filters, found
/// by direct enumeration. Candidates whose inner rates system has no
/// positive integral solution matching `m(g)` where the quotient is pinned
/// (checked with an exact cofactor adjugate) are dropped before the library
/// filters run.
pub fn brute_force_admissible(graph: &ResolutionGraph, bound: u64) -> BTreeSet<Vec<u64>> {
    use dualgraph::invariants::{self, Function};

    let n = graph.vertex_count();
    let m = graph.int_matrix();
    let det = leibniz_det(&m);
    let adj = adjugate(&m);
    let mut rhs = vec![-2i128; n];
    for &(a, b) in graph.edges() {
        rhs[a] += 1;
        rhs[b] += 1;
    }
    for arrow in graph.arrows().iter().filter(|a| a.kind == dualgraph::ArrowKind::F) {
        rhs[arrow.vertex] += i128::from(arrow.weight);
    }
    for (v, vertex) in graph.vertices().iter().enumerate() {
        rhs[v] += 2 * i128::from(vertex.genus);
    }
    let mut num: Vec<i128> = (0..n).map(|i| (0..n).map(|j| adj[i][j] * rhs[j]).sum()).collect();

    let f = invariants::multiplicities(graph, Function::F).unwrap();
    let g = invariants::multiplicities(graph, Function::G).unwrap();
    let skeleton = invariants::a_subgraph(graph, &f, &g).unwrap();
    // vertices where a_v must equal m_v(g)
    let pinned: Vec<(usize, i128)> = (0..n)
        .filter(|&v| skeleton.in_a(v) || f.weights[v] > 0 || g.weights[v] > 0)
        .map(|v| (v, g.m[v].to_integer().try_into().unwrap()))
        .collect();
    let mut found = BTreeSet::new();
    let mut p = vec![0u64; n];
    loop {
        let passes = num.iter().all(|x| x % det == 0 && x.signum() == det.signum())
            && pinned.iter().all(|&(v, m)| num[v] == m * det);
        if passes {
            if let Ok(Ok(_)) = dualgraph::exploration::admissibility(graph, &f, &g, &skeleton, &p) {
                found.insert(p.clone());
            }
        }
        let mut i = 0;
        while i < n && p[i] == bound {
            p[i] = 0;
            for r in 0..n {
                num[r] += adj[r][i] * i128::from(bound);
            }
            i += 1;
        }
        if i == n {
            break;
        }
        p[i] += 1;
        for r in 0..n {
            num[r] -= adj[r][i];
        }
    }
    found
}
