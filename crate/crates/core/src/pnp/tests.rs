use super::*;
use crate::catalog::{chain_g, chain_s, map_fibonacci};
use crate::map::parse_map;
use crate::pff::factor_pff;

fn names(g: &Graph, xs: &[(u8, Dir)]) -> Vec<String> {
    xs.iter()
        .map(|&(s, d)| format!("{s}:{}", g.dir_name(d)))
        .collect()
}

#[test]
fn s_branches_die_where_expected() {
    let d = chain_s();
    let v = pnp_search(&d, SearchOptions::default()).unwrap();
    assert_eq!(v.kind(), "no_pnp");
    let cert = v.certificate();
    let g = d.start();
    let roots: Vec<String> = cert
        .roots
        .iter()
        .map(|r| g.turn_name(r.residual.unwrap()))
        .collect();
    assert_eq!(roots, vec!["{a,b}", "{B,C}"]);

    let (ext, leaf) = deepest_branch(&cert.roots[0]);
    assert_eq!(names(g, &ext), vec!["2:c", "1:a", "2:c"]);
    assert_eq!(leaf.stage, 6);
    assert_eq!(leaf.rule, Rule::Legal);
    assert_eq!(g.turn_name(leaf.residual.unwrap()), "{a,c}");

    let (ext, leaf) = deepest_branch(&cert.roots[1]);
    assert!(ext.is_empty());
    assert_eq!(leaf.stage, 4);
    assert_eq!(g.turn_name(leaf.residual.unwrap()), "{A,B}");
}

#[test]
fn rotations_are_pnp_free() {
    for d in [chain_s(), chain_g()] {
        for k in 0..d.len() {
            let v = pnp_search(&d.rotate(k).unwrap(), SearchOptions::default()).unwrap();
            assert_eq!(v.kind(), "no_pnp", "rotation {k}");
        }
    }
}

#[test]
fn pnp_free_token_follows_rotation() {
    let d = chain_s();
    let PnpVerdict::NoPnp { free, .. } = pnp_search(&d, SearchOptions::default()).unwrap() else {
        panic!()
    };
    assert_eq!(free.map(), d.compose());
    let r = free.for_rotation(&d, 2).unwrap();
    assert_eq!(r.map(), d.rotate(2).unwrap().compose());
    assert!(free.for_rotation(&chain_g(), 0).is_err());
}

#[test]
fn finds_nielsen_paths() {
    let cases = [
        ("a->ab;b->a", "ab", "ba"),
        ("a->caa;b->cab;c->ca", "a", "b"),
        ("a->cba;b->cbb;c->cb", "a", "b"),
    ];
    for (m, l1, l2) in cases {
        let g = parse_map(m, None).unwrap();
        let d = factor_pff(&g).unwrap();
        match pnp_search(&d, SearchOptions::default()).unwrap() {
            PnpVerdict::CandidateFound { rho1, rho2, .. } => {
                assert_eq!(d.start().path_name(&rho1), l1);
                assert_eq!(d.start().path_name(&rho2), l2);
                assert!(inp_shape_check(&g, &rho1.reversed().concat(&rho2)).unwrap());
            }
            other => panic!("{m}: {}", other.kind()),
        }
    }
}

#[test]
fn shape_check_rejects_non_nielsen() {
    let g = map_fibonacci();
    let gr = g.domain();
    assert!(inp_shape_check(&g, &gr.parse_word("BAba").unwrap()).unwrap());
    assert!(!inp_shape_check(&g, &gr.parse_word("Ab").unwrap()).unwrap());
    assert!(!inp_shape_check(&g, &gr.parse_word("ab").unwrap()).unwrap());
    assert!(!inp_shape_check(&g, &gr.parse_word("aA").unwrap()).unwrap());
}

#[test]
fn dangerous_long_turns() {
    let g = map_fibonacci();
    let gr = g.domain();
    let lt = |a: &str, b: &str| LongTurn {
        alpha: gr.parse_word(a).unwrap(),
        beta: gr.parse_word(b).unwrap(),
    };
    assert!(is_dangerous(&g, &lt("a", "ba")).unwrap());
    assert!(!is_dangerous(&g, &lt("a", "b")).unwrap());
    assert!(
        is_dangerous(&g, &lt("a", "aa")).is_err() || !is_dangerous(&g, &lt("a", "aa")).unwrap()
    );
    assert!(is_dangerous(&g, &lt("", "b")).is_err());
}

#[test]
fn certificate_round_trip_and_replay() {
    for d in [chain_s(), chain_g()] {
        let v = pnp_search(&d, SearchOptions::default()).unwrap();
        let json = v.certificate().to_json(d.start());
        let (g, cert) = SearchCertificate::from_json(&json).unwrap();
        assert!(g.same_labels(d.start()));
        assert_eq!(&cert, v.certificate());
        let check = verify_certificate(&d, &cert).unwrap();
        assert!(check.ok(), "{check:?}");
        assert!(check.leaves_checked > 0);
    }
}

#[test]
fn tampered_certificate_is_rejected() {
    let d = chain_s();
    let v = pnp_search(&d, SearchOptions::default()).unwrap();
    let mut cert = v.certificate().clone();
    cert.roots[1].children.clear();
    assert!(!verify_certificate(&d, &cert).unwrap().ok());

    let mut cert = v.certificate().clone();
    let t = cert.roots[0].residual.unwrap();
    cert.roots[0].residual = Some(Turn::new(t.0, t.0.rev()));
    let check = verify_certificate(&d, &cert).unwrap();
    assert!(!check.ok());
}

#[test]
fn tiny_budget_is_inconclusive() {
    let d = chain_g();
    let v = pnp_search(
        &d,
        SearchOptions {
            max_stages: Some(2),
            ..Default::default()
        },
    )
    .unwrap();
    assert_eq!(v.kind(), "inconclusive");
    let v = pnp_search(
        &d,
        SearchOptions {
            node_budget: 3,
            ..Default::default()
        },
    )
    .unwrap();
    assert_eq!(v.kind(), "inconclusive");
}

fn ext(g: &Graph, xs: &[(u8, &str)]) -> Vec<(u8, Dir)> {
    xs.iter()
        .map(|&(s, e)| (s, g.parse_dir(e).unwrap()))
        .collect()
}

#[test]
fn g_branches_with_taken_turn_extensions() {
    let d = chain_g();
    let g = d.start();
    let v = pnp_search(&d, SearchOptions::default()).unwrap();
    assert_eq!(v.kind(), "no_pnp");
    let cert = v.certificate();
    let leaf = cert.roots[1].follow(&[]).unwrap();
    assert_eq!(
        (leaf.stage, g.turn_name(leaf.residual.unwrap())),
        (6, "{c,C}".to_string())
    );
    let leaf = cert.roots[0]
        .follow(&ext(g, &[(2, "c"), (1, "c")]))
        .unwrap();
    assert_eq!(
        (leaf.stage, g.turn_name(leaf.residual.unwrap())),
        (2, "{a,c}".to_string())
    );
    assert!(cert.roots[0]
        .follow(&ext(g, &[(2, "c"), (1, "B")]))
        .is_none());
}

#[test]
fn g_branches_with_legal_extensions() {
    let d = chain_g();
    let g = d.start();
    let opts = SearchOptions {
        extension: ExtensionRule::Legal,
        ..Default::default()
    };
    let v = pnp_search(&d, opts).unwrap();
    assert_eq!(v.kind(), "no_pnp");
    let cert = v.certificate();
    let leaf = cert.roots[0]
        .follow(&ext(g, &[(2, "c"), (1, "B"), (2, "c"), (1, "C")]))
        .unwrap();
    assert_eq!(leaf.rule, Rule::Legal);
    assert_eq!(
        (leaf.stage, g.turn_name(leaf.residual.unwrap())),
        (5, "{a,A}".to_string())
    );
    assert!(verify_certificate(&d, cert).unwrap().ok());
}
