use super::*;
use crate::catalog::{chain_g, chain_s, map_g, map_s};
use crate::graph::Dir;
use crate::ltt::ltt_of_map;
use crate::pff::PffDecomposition;
use crate::pnp::{pnp_search, PnpFree, PnpVerdict, SearchOptions};
use crate::train_track::is_train_track;
use crate::whitehead::whitehead_data;

fn free(d: &PffDecomposition) -> PnpFree {
    let PnpVerdict::NoPnp { free, .. } = pnp_search(d, SearchOptions::default()).unwrap() else {
        panic!("pnp")
    };
    free
}

fn spec_of(g: &GraphMap) -> IwgSpec {
    IwgSpec::new(whitehead_data(g).unwrap().ideal, g.domain().betti()).unwrap()
}

fn automaton_of(d: &PffDecomposition, v: &dyn AutomatonVariant) -> Automaton {
    let s = ltt_of_map(d.compose(), &free(d)).unwrap();
    let opts = BuildOptions {
        seeds: vec![s],
        ..Default::default()
    };
    build(v, &spec_of(d.compose()), &opts).unwrap()
}

fn cycle(n: usize) -> SimpleGraph {
    let mut g = SimpleGraph::new((0..n).map(|i| format!("x{i}")).collect());
    for i in 0..n {
        g.add_edge(i, (i + 1) % n);
    }
    g
}

/// All signed permutations of the rose's edges.
fn rose_relabelings(r: usize) -> Vec<EdgePermutation> {
    let mut out = Vec::new();
    let mut perms = vec![vec![]];
    for k in 0..r {
        perms = perms
            .into_iter()
            .flat_map(|p: Vec<usize>| {
                (0..=p.len()).map(move |i| {
                    let mut q = p.clone();
                    q.insert(i, k);
                    q
                })
            })
            .collect();
    }
    for p in perms {
        for signs in 0..1u32 << r {
            let edges = (0..r)
                .map(|i| Dir::new(p[i], signs >> i & 1 == 1))
                .collect();
            out.push(EdgePermutation::on_rose(edges).unwrap());
        }
    }
    out
}

fn equivalent(a: &LttStructure, b: &LttStructure, relabelings: &[EdgePermutation]) -> bool {
    relabelings.iter().any(|p| {
        let x = a.symmetry_action(p).unwrap();
        x.colors() == b.colors() && x.colored_edges() == b.colored_edges()
    })
}

#[test]
fn spec_checks() {
    let mut two = cycle(3);
    two.labels.push("y0".into());
    two.labels.push("y1".into());
    let two = {
        let mut g = SimpleGraph::new(two.labels.clone());
        for (a, b) in two.edges() {
            g.add_edge(a, b);
        }
        g.add_edge(3, 4);
        g
    };
    let spec = IwgSpec::new(two, 3).unwrap();
    assert!(FullySingular.check_spec(&spec).is_err());
    assert!(LoneAxis.check_spec(&spec).is_err());
    let five = IwgSpec::new(cycle(5), 3).unwrap();
    assert!(LoneAxis.check_spec(&five).is_ok());
    let mut bowtie = SimpleGraph::new((0..5).map(|i| i.to_string()).collect());
    for (a, b) in [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2)] {
        bowtie.add_edge(a, b);
    }
    assert!(LoneAxis
        .check_spec(&IwgSpec::new(bowtie, 3).unwrap())
        .is_err());
    assert!(
        variant("lone-axis").is_some()
            && variant("fully-singular").is_some()
            && variant("other").is_none()
    );
    assert!(IwgSpec::new(cycle(4), 1).is_err());
}

#[test]
fn s_round_trip() {
    let d = chain_s();
    let a = automaton_of(&d, &FullySingular);
    for (i, v) in a.vertices().iter().enumerate() {
        assert!(v.structure.is_birecurrent());
        assert!(a.out_edges(i).next().is_some());
    }
    let (l, psi0) = decomposition_to_loop(&a, &d, &free(&d)).unwrap();
    let folds = l
        .edges
        .iter()
        .filter(|&&i| matches!(a.edges()[i].mv, Move::Fold(_)))
        .count();
    assert_eq!(folds, 4);
    assert_eq!(l.edges.len(), 4);
    let comps: BTreeSet<usize> = l
        .edges
        .iter()
        .map(|&i| a.scc_of(a.edges()[i].source))
        .collect();
    assert_eq!(comps.len(), 1);
    let lm = loop_to_map(&a, &l).unwrap();
    let carrier = a.vertices()[l.start].structure.carrier();
    assert_eq!(lm.map, conjugate(&map_s(), &psi0, carrier).unwrap());
    match certify_loop(&a, &l, SearchOptions::default()).unwrap() {
        LoopVerdict::Certified(c) => {
            assert!(c.fully_singular);
            assert!(!c.lone_axis);
            assert_eq!(c.index_sum, HalfInt::from_int(-1));
            assert!(whitehead_data(&c.map)
                .unwrap()
                .ideal
                .is_isomorphic(&cycle(4)));
        }
        other => panic!("{}", other.kind()),
    }
}

#[test]
fn edge_count_matches_recount() {
    let a = automaton_of(&chain_s(), &FullySingular);
    let rel = rose_relabelings(3);
    let spec = a.spec().clone();
    let mut count = 0;
    for (u, vu) in a.vertices().iter().enumerate() {
        let s = &vu.structure;
        for (v, vv) in a.vertices().iter().enumerate() {
            if a.scc_of(u) != a.scc_of(v) {
                continue;
            }
            for e in s.carrier().dirs() {
                for e2 in s.carrier().dirs() {
                    if !s.tt_friendly_pff_check(e, e2).ok {
                        continue;
                    }
                    let t = s.pff_action(Fold::new(e, e2)).unwrap();
                    if admissible(&t, &spec, &FullySingular) && equivalent(&t, &vv.structure, &rel)
                    {
                        count += 1;
                    }
                }
            }
            if u == v {
                count += rel
                    .iter()
                    .filter(|p| !p.is_identity() && s.symmetry_action(p).unwrap() == *s)
                    .count();
            }
        }
    }
    assert_eq!(count, a.edges().len());
}

#[test]
fn random_loops_are_train_tracks() {
    let a = automaton_of(&chain_s(), &FullySingular);
    let loops = random_loops(&a, 100, 6, 7);
    assert_eq!(loops.len(), 100);
    assert_eq!(loops, random_loops(&a, 100, 6, 7));
    for l in &loops {
        let lm = loop_to_map(&a, l).unwrap();
        assert!(is_train_track(&lm.map).unwrap().witness.is_none());
    }
    let empty = Loop {
        start: 0,
        edges: vec![],
    };
    let lm = loop_to_map(&a, &empty).unwrap();
    assert_eq!(
        lm.map,
        GraphMap::identity(a.vertices()[0].structure.carrier())
    );
    assert!(lm.decomposition.is_none());
    assert!(loop_to_map(
        &a,
        &Loop {
            start: 0,
            edges: vec![a.edges().len()]
        }
    )
    .is_err());
}

#[test]
fn some_loop_fails_pf() {
    let a = automaton_of(&chain_s(), &FullySingular);
    let sym = a
        .edges()
        .iter()
        .position(|e| matches!(e.mv, Move::Symmetry(_)));
    if let Some(i) = sym {
        let l = Loop {
            start: a.edges()[i].source,
            edges: vec![i],
        };
        assert!(matches!(
            certify_loop(&a, &l, SearchOptions::default()).unwrap(),
            LoopVerdict::Failed {
                condition: "pf",
                ..
            }
        ));
    }
    let pf = random_loops(&a, 200, 3, 11).into_iter().find(|l| {
        matches!(
            certify_loop(&a, l, SearchOptions::default()).unwrap(),
            LoopVerdict::Failed {
                condition: "pf",
                ..
            }
        )
    });
    let l = pf.expect("a loop with a reducible transition matrix");
    let m = crate::matrix::transition_matrix(&loop_to_map(&a, &l).unwrap().map);
    assert!(!crate::matrix::is_pf(&m));
}

#[test]
fn json_round_trip_and_dot() {
    let a = automaton_of(&chain_s(), &FullySingular);
    let j = a.to_json();
    let b = Automaton::from_json(&j).unwrap();
    assert_eq!(b.to_json(), j);
    let mut tampered = j.clone();
    tampered["edges"][0]["target"] = json!((a.edges()[0].target + 1) % a.vertices().len());
    if a.vertices().len() > 1 {
        assert!(Automaton::from_json(&tampered).is_err());
    }
    let dot = a.to_dot();
    assert!(dot.contains("subgraph cluster_0"));
    let l = random_loops(&a, 1, 4, 3).remove(0);
    assert_eq!(Loop::from_json(&l.to_json()).unwrap(), l);
}

#[test]
fn exhaustive_generation_contains_closure() {
    let d = chain_s();
    let spec = spec_of(d.compose());
    let all = rose_structures(&spec, &FullySingular).unwrap();
    assert!(!all.is_empty());
    let keys: BTreeSet<Vec<i64>> = all.iter().map(|s| s.canonical_key()).collect();
    let a = automaton_of(&d, &FullySingular);
    for v in a.vertices() {
        assert!(keys.contains(&v.key));
    }
    let full = build(
        &FullySingular,
        &spec,
        &BuildOptions {
            exhaustive: true,
            ..Default::default()
        },
    )
    .unwrap();
    assert!(full.vertices().len() >= a.vertices().len());
}

#[test]
fn lone_axis_rose_structures() {
    let spec = IwgSpec::new(cycle(5), 3).unwrap();
    let all = rose_structures(&spec, &LoneAxis).unwrap();
    assert!(!all.is_empty());
    for s in &all {
        assert_eq!(s.red_vertices().len(), 1);
        assert_eq!(s.index(), HalfInt::from_twice(-3));
        assert!(s.validate_lone_axis().is_empty());
        assert!(s.is_birecurrent());
    }
    let bad = IwgSpec::new(cycle(4), 3).unwrap();
    assert!(rose_structures(&bad, &LoneAxis).is_ok());
}

#[test]
fn g_loop() {
    let d = chain_g();
    let a = automaton_of(&d, &FullySingular);
    let (l, psi0) = decomposition_to_loop(&a, &d, &free(&d)).unwrap();
    let folds = l
        .edges
        .iter()
        .filter(|&&i| matches!(a.edges()[i].mv, Move::Fold(_)))
        .count();
    assert_eq!(folds, 28);
    assert_eq!(l.edges.len(), 28);
    let lm = loop_to_map(&a, &l).unwrap();
    assert_eq!(
        lm.map,
        conjugate(&map_g(), &psi0, a.vertices()[l.start].structure.carrier()).unwrap()
    );
    match certify_loop(&a, &l, SearchOptions::default()).unwrap() {
        LoopVerdict::Certified(c) => {
            assert!(c.index_sum < HalfInt::from_int(0) && c.index_sum > HalfInt::from_int(-2));
        }
        other => panic!("{}", other.kind()),
    }
}
