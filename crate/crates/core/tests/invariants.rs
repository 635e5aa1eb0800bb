mod common;

use std::collections::BTreeSet;

use dualgraph::invariants::{
    a_subgraph, chi_prime, curvature_constant, edge_lengths, hironaka, inner_rates, k_vector, laplacian,
    laplacian_divisor, monotone_reach, multiplicities,
};
use dualgraph::linalg::{format_rational, rat, ratio};
use dualgraph::{generate_famille, Error, Function, ResolutionGraph, Rational};

use common::{adjugate, full_data_examples, leibniz_det, load, PATRICIO_VECTORS};

fn strings(v: &[Rational]) -> Vec<String> {
    v.iter().map(format_rational).collect()
}

fn by_id(g: &ResolutionGraph, values: &[Rational], ids: &[&str]) -> Vec<String> {
    ids.iter().map(|id| format_rational(&values[g.vertex_index(id).unwrap()])).collect()
}

/// Union of vertices on paths from an f-node to a g-node along which `h`
/// strictly increases.
fn increasing_path_vertices(g: &ResolutionGraph, h: &[Rational], from: &[usize], to: &[usize]) -> BTreeSet<usize> {
    fn walk(g: &ResolutionGraph, h: &[Rational], path: &mut Vec<usize>, to: &[usize], out: &mut BTreeSet<usize>) {
        let v = *path.last().unwrap();
        if to.contains(&v) {
            out.extend(path.iter().copied());
        }
        for (_, w) in g.incident(v) {
            if !path.contains(&w) && h[w] > h[v] {
                path.push(w);
                walk(g, h, path, to, out);
                path.pop();
            }
        }
    }
    let mut out = BTreeSet::new();
    for &s in from {
        walk(g, h, &mut vec![s], to, &mut out);
    }
    out
}

#[test]
fn multiplicities_from_cofactors() {
    for (name, g) in full_data_examples().into_iter().take(4) {
        let m = g.int_matrix();
        let det = leibniz_det(&m);
        let adj = adjugate(&m);
        for kind in [Function::F, Function::G] {
            let data = multiplicities(&g, kind).unwrap();
            for (i, mi) in data.m.iter().enumerate() {
                // m = -M^{-1} w
                let num: i128 = -(0..m.len()).map(|j| adj[i][j] * data.weights[j] as i128).sum::<i128>();
                assert_eq!(*mi, ratio(num as i64, det as i64), "{name} {kind} at {i}");
            }
            assert!(data.is_valid(), "{name} {kind}");
        }
    }
}

#[test]
fn first_example_values() {
    let g = load("example1.json");
    let ids = ["v1", "v2", "v3", "v4", "v5", "v6"];
    let f = multiplicities(&g, Function::F).unwrap();
    let gm = multiplicities(&g, Function::G).unwrap();
    assert_eq!(by_id(&g, &f.m, &ids), ["5", "10", "12", "24", "35", "60"]);
    assert_eq!(by_id(&g, &gm.m, &ids), ["1", "1", "1", "2", "3", "5"]);
    let h = hironaka(&f, &gm);
    assert_eq!(by_id(&g, &h, &ids), ["1/5", "1/10", "1/12", "1/12", "3/35", "1/12"]);
    assert_eq!(by_id(&g, &k_vector(&g), &ids), ["-1", "0", "-1", "0", "0", "0"]);

    let lengths = edge_lengths(&g, &f);
    let v1v2 = g.edges().iter().position(|&(a, b)| g.id(a) == "v1" && g.id(b) == "v2").unwrap();
    let v4v3 = g.edges().iter().position(|&(a, b)| g.id(a) == "v4" && g.id(b) == "v3").unwrap();
    assert_eq!(lengths[v1v2], ratio(1, 50));
    assert_eq!(lengths[v4v3], ratio(1, 288));
}

#[test]
fn chi_prime_values() {
    let g = load("patricio.json");
    let f = multiplicities(&g, Function::F).unwrap();
    let gm = multiplicities(&g, Function::G).unwrap();
    assert_eq!(chi_prime(&g, &f, &gm), [0, 0, 1, 0, 0, -1]);

    let fam = generate_famille(2).unwrap();
    let f = multiplicities(&fam, Function::F).unwrap();
    let gm = multiplicities(&fam, Function::G).unwrap();
    let chi = chi_prime(&fam, &f, &gm);
    assert_eq!(chi[0], -14);
    assert_eq!(chi, [-14, 0, -1, 0, 0, 0, 0, -1, 1, 0, 0, 1]);
}

#[test]
fn famille_multiplicities() {
    let g = generate_famille(2).unwrap();
    let f = multiplicities(&g, Function::F).unwrap();
    let gm = multiplicities(&g, Function::G).unwrap();
    assert_eq!(strings(&f.m), ["7", "5", "3", "4", "5", "6", "7", "8", "4", "5", "2", "1"]);
    assert_eq!(strings(&gm.m), ["5", "4", "3", "4", "5", "6", "7", "8", "4", "5", "2", "1"]);
    let h = hironaka(&f, &gm);
    assert_eq!(h[0], ratio(5, 7));
    assert!(h[2..].iter().all(|x| *x == rat(1)));
}

#[test]
fn skeleton_matches_path_oracle() {
    let mut graphs: Vec<ResolutionGraph> = vec![load("example1.json"), load("patricio.json")];
    graphs.extend((2..=5).map(|n| generate_famille(n).unwrap()));
    for g in graphs {
        let f = multiplicities(&g, Function::F).unwrap();
        let gm = multiplicities(&g, Function::G).unwrap();
        let s = a_subgraph(&g, &f, &gm).unwrap();
        let expected = increasing_path_vertices(&g, &s.h, &f.nodes(), &gm.nodes());
        assert_eq!(s.a_vertices.iter().copied().collect::<BTreeSet<_>>(), expected);

        // zones and singletons partition the vertex set up to the A vertices shared with zones
        let mut covered: BTreeSet<usize> = s.singletons.iter().copied().collect();
        for z in &s.zones {
            covered.extend(z.iter().copied());
        }
        assert_eq!(covered.len(), g.vertex_count());
        assert!(s.singletons.iter().all(|&v| s.in_a(v)));
        assert!(s.non_constant_zones().is_empty());
    }
}

#[test]
fn skeleton_of_examples() {
    let g = load("patricio.json");
    let f = multiplicities(&g, Function::F).unwrap();
    let gm = multiplicities(&g, Function::G).unwrap();
    let s = a_subgraph(&g, &f, &gm).unwrap();
    let ids = |vs: &[usize]| vs.iter().map(|&v| g.id(v).to_string()).collect::<Vec<_>>();
    assert_eq!(ids(&s.a_vertices), ["m5", "m10", "m35", "m60"]);
    assert_eq!(s.a_edges.len(), 3);
    assert_eq!(s.zones.len(), 1);
    assert_eq!(ids(&s.zones[0]), ["m12", "m24", "m60"]);
    assert_eq!(ids(&s.singletons), ["m5", "m10", "m35"]);

    let fam = generate_famille(2).unwrap();
    let f = multiplicities(&fam, Function::F).unwrap();
    let gm = multiplicities(&fam, Function::G).unwrap();
    let s = a_subgraph(&fam, &f, &gm).unwrap();
    assert_eq!(s.a_vertices, [0, 1, 2]);
    assert_eq!(s.singletons, [0, 1]);
    assert_eq!(s.zones, vec![(2..12).collect::<Vec<_>>()]);
}

#[test]
fn skeleton_needs_both_functions() {
    let g = ResolutionGraph::from_json(
        r#"{"vertices":[{"id":"a","self_int":-1}],"arrows":[{"kind":"f","vertex":"a","weight":1}]}"#,
    )
    .unwrap();
    let f = multiplicities(&g, Function::F).unwrap();
    assert_eq!(multiplicities(&g, Function::G), Err(Error::NoArrows("g".into())));
    let mut fake = f.clone();
    fake.kind = Function::G;
    fake.weights = vec![0];
    assert_eq!(a_subgraph(&g, &f, &fake), Err(Error::NoArrows("g".into())));
}

#[test]
fn inner_rates_of_polar_vectors() {
    let base = load("patricio.json");
    let expected_q = [
        ["1/5", "1/10", "1/3", "1/8", "3/35", "1/12"],
        ["1/5", "1/10", "1/4", "1/8", "3/35", "1/12"],
        ["1/5", "1/10", "1/6", "1/8", "3/35", "1/12"],
    ];
    for (p, q) in PATRICIO_VECTORS.iter().zip(expected_q) {
        let g = base.with_polar(p).unwrap();
        let f = multiplicities(&g, Function::F).unwrap();
        let rates = inner_rates(&g, &f, p).unwrap();
        assert_eq!(strings(&rates.q), q);
        assert!(rates.a_integral && rates.a_positive);
        assert_eq!(monotone_reach(&g, &rates.q, &f.nodes()), (0..6).collect::<Vec<_>>());
    }
}

#[test]
fn laplacian_identity_by_hand() {
    for (name, g) in full_data_examples() {
        let f = multiplicities(&g, Function::F).unwrap();
        let gm = multiplicities(&g, Function::G).unwrap();
        let p = g.arrow_weights(dualgraph::ArrowKind::Polar);
        let q = inner_rates(&g, &f, &p).unwrap().q;
        let lap = laplacian(&g, &f, &q).unwrap();
        assert_eq!(lap, laplacian_divisor(&g, &f, &gm, &p).unwrap(), "{name}");
        for v in 0..g.vertex_count() {
            let mut by_hand = Rational::from_integer(0.into());
            for &(a, b) in g.edges() {
                let w = if a == v { b } else if b == v { a } else { continue };
                by_hand += &f.m[v] * &f.m[w] * (&q[w] - &q[v]);
            }
            assert_eq!(lap[v], by_hand, "{name} at {}", g.id(v));
        }
    }
}

#[test]
fn curvature_is_polar_weight_times_multiplicity() {
    for (name, g) in full_data_examples() {
        let f = multiplicities(&g, Function::F).unwrap();
        let p = g.arrow_weights(dualgraph::ArrowKind::Polar);
        let q = inner_rates(&g, &f, &p).unwrap().q;
        for v in 0..g.vertex_count() {
            let c = curvature_constant(&g, &f, &q, g.id(v)).unwrap();
            assert_eq!(c, &f.m[v] * rat(p[v] as i64), "{name} at {}", g.id(v));
        }
    }
    let g = load("example35.json");
    let f = multiplicities(&g, Function::F).unwrap();
    let q = inner_rates(&g, &f, &g.arrow_weights(dualgraph::ArrowKind::Polar)).unwrap().q;
    assert_eq!(curvature_constant(&g, &f, &q, "v3").unwrap(), rat(24));
    assert_eq!(curvature_constant(&g, &f, &q, "v4").unwrap(), rat(24));
    assert_eq!(curvature_constant(&g, &f, &q, "zz"), Err(Error::UnknownVertex("zz".into())));
}

#[test]
fn monotone_reach_stops_at_plateaus() {
    let g = load("example1.json");
    let q = vec![rat(1), rat(2), rat(2), rat(1), rat(3), rat(4)];
    // order v1 v2 v5 v6 v4 v3, path v1-v2-v5-v6-v4-v3
    assert_eq!(monotone_reach(&g, &q, &[0]), [0, 1]);
    assert_eq!(monotone_reach(&g, &q, &[3]), [2, 3, 4, 5]);
    assert_eq!(monotone_reach(&g, &q, &[0, 3]), [0, 1, 2, 3, 4, 5]);
}

#[test]
fn dimension_checks() {
    let g = load("example1.json");
    let f = multiplicities(&g, Function::F).unwrap();
    assert!(matches!(inner_rates(&g, &f, &[0, 0]), Err(Error::DimensionMismatch(_))));
    assert!(matches!(laplacian(&g, &f, &[rat(1)]), Err(Error::DimensionMismatch(_))));
}
