use super::*;
use crate::catalog::{chain_g, chain_s};
use crate::pff::{PffDecomposition, Step};
use crate::pnp::{pnp_search, PnpVerdict, SearchOptions};

fn structure(d: &PffDecomposition) -> LttStructure {
    let PnpVerdict::NoPnp { free, .. } = pnp_search(d, SearchOptions::default()).unwrap() else {
        panic!("pnp")
    };
    ltt_of_map(d.compose(), &free).unwrap()
}

fn dir_names(g: &Graph, ds: &[Dir]) -> Vec<String> {
    ds.iter().map(|&d| g.dir_name(d)).collect()
}

fn turn_names(g: &Graph, ts: &[Turn]) -> Vec<String> {
    ts.iter().map(|&t| g.turn_name(t)).collect()
}

/// Structures along the chain, pushed forward step by step from the structure of the composite.
fn pushed(d: &PffDecomposition) -> Vec<LttStructure> {
    let mut out = vec![structure(d)];
    for k in 0..d.len() {
        let next = match d.step(k) {
            Step::Fold(f) => out[k].pff_action(f).unwrap(),
            Step::Perm(p) => out[k].symmetry_action(&p).unwrap(),
        };
        out.push(next);
    }
    out
}

fn rose2(turns: &[&str]) -> LttStructure {
    let g = Graph::standard_rose(2);
    let edges = turns
        .iter()
        .map(|s| {
            let p = g.parse_word(s).unwrap();
            (Turn::new(p.0[0], p.0[1]), Color::Purple)
        })
        .collect();
    LttStructure::new(g, vec![Color::Purple; 4], edges, HalfInt::from_int(-1)).unwrap()
}

#[test]
fn structure_of_s() {
    let s = structure(&chain_s());
    let g = s.carrier();
    assert_eq!(dir_names(g, &s.red_vertices()), vec!["b", "B"]);
    assert_eq!(turn_names(g, &s.red_edges()), vec!["{b,C}", "{B,c}"]);
    assert_eq!(s.colored_edges().len(), 6);
    assert_eq!(s.index(), HalfInt::from_int(-1));
    assert!(s.validate().is_empty(), "{:?}", s.validate());
    let axioms: Vec<&str> = s.validate_lone_axis().iter().map(|v| v.axiom).collect();
    assert!(axioms.contains(&"ltt-vii") && axioms.contains(&"ltt-viii"));
    assert_eq!(s.ideal_whitehead().num_vertices(), 4);
}

#[test]
fn structure_of_g() {
    let s = structure(&chain_g());
    let g = s.carrier();
    assert_eq!(dir_names(g, &s.red_vertices()), vec!["a", "A"]);
    assert!(s.validate().is_empty());
}

#[test]
fn actions_follow_rotations() {
    for d in [chain_s(), chain_g()] {
        let states = pushed(&d);
        for (k, st) in states.iter().enumerate() {
            let want = structure(&d.rotate(k % d.len()).unwrap());
            assert_eq!(st, &want, "stage {k}");
            assert_eq!(st.red_vertices().len(), states[0].red_vertices().len());
        }
    }
}

#[test]
fn red_edges_misbehave_along_g() {
    let states = pushed(&chain_g());
    let counts: Vec<usize> = states.iter().map(|s| s.red_edges().len()).collect();
    assert!(counts.iter().any(|&c| c != counts[0]));
    let joins_reds = |s: &LttStructure| {
        s.red_edges()
            .iter()
            .any(|t| s.color(t.0) == Color::Red && s.color(t.1) == Color::Red)
    };
    assert!(states.iter().any(joins_reds));
    let doubled = |s: &LttStructure| {
        s.red_vertices()
            .iter()
            .any(|&d| s.red_edges().iter().filter(|t| t.contains(d)).count() >= 2)
    };
    assert!(states.iter().any(doubled));
}

#[test]
fn axiom_violations() {
    let s = structure(&chain_s());
    let mut edges = s.colored_edges().clone();
    let g = s.carrier();
    let lone = g
        .dirs()
        .map(|d| {
            edges
                .keys()
                .filter(|t| t.contains(d))
                .copied()
                .collect::<Vec<_>>()
        })
        .find(|ts| ts.len() == 1)
        .unwrap();
    edges.remove(&lone[0]);
    let broken = LttStructure::new(g.clone(), s.colors().to_vec(), edges, s.index()).unwrap();
    assert!(broken.validate().iter().any(|v| v.axiom == "ltt-v"));

    let purple = vec![Color::Purple; g.num_dirs()];
    let edges = color_turns(&purple, s.colored_edges().keys().copied());
    let recolored = LttStructure::new(g.clone(), purple, edges, s.index()).unwrap();
    assert!(recolored.validate().iter().any(|v| v.axiom == "ltt-ii"));
}

#[test]
fn json_round_trip() {
    for d in [chain_s(), chain_g()] {
        let s = structure(&d);
        let back = LttStructure::from_json(&s.to_json()).unwrap();
        assert_eq!(back, s);
        assert!(s.to_dot("x").contains("color=red"));
    }
}

#[test]
fn fold_check_conditions() {
    let s = structure(&chain_s());
    let g = s.carrier();
    let d = |x: &str| g.parse_dir(x).unwrap();
    assert!(
        s.tt_friendly_pff_check(d("a"), d("b")).ok || s.tt_friendly_pff_check(d("b"), d("a")).ok
    );
    let both_purple = s.tt_friendly_pff_check(d("a"), d("c"));
    assert_eq!(both_purple.failed, Some("tt-pff-ii"));
    let colored = s.tt_friendly_pff_check(d("B"), d("c"));
    assert_eq!(colored.failed, Some("tt-pff-iii"));
    assert!(s.pff_action(Fold::new(d("a"), d("c"))).is_err());
}

#[test]
fn birecurrence() {
    for d in [chain_s(), chain_g()] {
        let s = structure(&d);
        assert!(s.is_birecurrent());
        let w = s.witness_loop().unwrap();
        let covered: BTreeSet<Turn> = w.colored_turns().into_iter().collect();
        assert_eq!(covered, s.colored_edges().keys().copied().collect());
        let p = w.black_projection();
        assert!(p.is_contiguous(s.carrier()));
        assert_eq!(
            s.carrier().init(p.0[0]),
            s.carrier().term(*p.0.last().unwrap())
        );
    }
    let full = rose2(&["ab", "aB", "aA", "Ab", "AB", "bB"]);
    assert!(full.is_birecurrent());
    // From a and b only {a,B} and {A,b} are available; {A,B} can be crossed once but never again.
    let trap = rose2(&["aB", "Ab", "AB"]);
    assert!(trap.local_whitehead(0).is_connected());
    assert!(!trap.is_birecurrent());
    assert!(trap.witness_loop().is_none());
}

#[test]
fn symmetry_action_is_a_group_action() {
    let s = structure(&chain_s());
    let g = s.carrier();
    let sigma = EdgePermutation::parse("a->b;b->C;c->a", g).unwrap();
    let tau = EdgePermutation::parse("b->B", g).unwrap();
    let once = s.symmetry_action(&tau).unwrap();
    assert_eq!(once.symmetry_action(&tau).unwrap(), s);
    let two = s
        .symmetry_action(&tau)
        .unwrap()
        .symmetry_action(&sigma)
        .unwrap();
    assert_eq!(two, s.symmetry_action(&sigma.compose(&tau)).unwrap());
}

#[test]
fn canonical_form_forgets_labels() {
    for d in [chain_s(), chain_g()] {
        let s = structure(&d);
        let c = s.canonical();
        assert_eq!(
            s.symmetry_action(&c.relabel).unwrap().canonical().key,
            c.key
        );
        for p in ["a->b;b->a", "b->B", "a->C;c->b;b->a", "a->A;c->C"] {
            let sigma = EdgePermutation::parse(p, s.carrier()).unwrap();
            let t = s.symmetry_action(&sigma).unwrap();
            let ct = t.canonical();
            assert_eq!(ct.key, c.key, "{p}");
            assert_eq!(ct.structure, c.structure, "{p}");
        }
        for a in s.automorphisms() {
            assert_eq!(s.symmetry_action(&a).unwrap(), s);
        }
    }
    let s = structure(&chain_s());
    let g = structure(&chain_g());
    assert_ne!(s.canonical_key(), g.canonical_key());
}
