//! Worked examples on the rank three rose.

use crate::graph::Graph;
use crate::map::{parse_map, EdgePermutation, GraphMap};
use crate::pff::{parse_chain, Fold, PffDecomposition, Step};

/// `a ↦ cbca, b ↦ cbc, c ↦ ac`.
pub fn map_s() -> GraphMap {
    parse_map("a->cbca;b->cbc;c->ac", None).expect("valid map")
}

/// Four fold decomposition of [`map_s`].
pub fn chain_s() -> PffDecomposition {
    parse_chain(
        "fold a over b; fold c over a; fold b over c; fold B over C",
        &Graph::standard_rose(3),
    )
    .expect("valid chain")
}

const HALF_G: &str = "fold a over B; fold c over a; fold B over c; fold a over B; fold a over C; fold C over A; \
                      fold C over A; fold B over C; fold b over a; fold b over C; fold C over B; fold C over B; \
                      fold a over b; fold A over C";

/// Twenty-eight folds: fourteen folds followed by their conjugates under `b ↔ B`.
pub fn chain_g() -> PffDecomposition {
    let g = Graph::standard_rose(3);
    let half = parse_chain(HALF_G, &g).expect("valid chain");
    let sigma = EdgePermutation::parse("b->B", &g).expect("valid permutation");
    let folds: Vec<Fold> = half
        .folds()
        .iter()
        .chain(
            half.folds()
                .iter()
                .map(|f| f.relabel(&sigma))
                .collect::<Vec<_>>()
                .iter(),
        )
        .copied()
        .collect();
    PffDecomposition::from_steps(g, folds.into_iter().map(Step::Fold).collect())
        .expect("valid chain")
}

/// Composite of [`chain_g`].
pub fn map_g() -> GraphMap {
    chain_g().compose().clone()
}

/// `a ↦ ab, b ↦ a`: a train track map whose lone indivisible Nielsen path crosses an illegal turn.
pub fn map_fibonacci() -> GraphMap {
    parse_map("a->ab;b->a", None).expect("valid map")
}

/// Per-fold turn data for the first fourteen folds of [`chain_g`]: the turn taken by the fold,
/// then the image under the fold's direction map of the turns taken by the preceding prefix.
/// Turns are written as two direction letters, uppercase for reversed.
pub const G_TURN_TABLE: [(&str, &[&str]); 14] = [
    ("ab", &[]),
    ("Ac", &["ab"]),
    ("BC", &["ab", "Ac"]),
    ("ab", &["Bb", "BC", "Ac"]),
    ("ac", &["Bb", "BC", "Ac", "Cb"]),
    ("aC", &["Bb", "ac", "BA", "Ac", "Ab"]),
    ("aC", &["Bb", "Ac", "BA", "Ab", "ac", "Aa"]),
    ("cB", &["Cb", "Ac", "CA", "Ab", "ac", "Aa", "aC"]),
    ("Ab", &["Aa", "Ac", "CA", "ac", "aC", "Bc"]),
    ("bc", &["Aa", "Ac", "CA", "ac", "aC", "Bc"]),
    ("bC", &["Aa", "Ac", "BA", "ac", "aB", "bc", "Bc"]),
    ("bC", &["Aa", "Ac", "Bb", "BA", "ac", "aB", "bc", "Bc"]),
    ("aB", &["Ab", "Ac", "Bb", "BA", "bc", "bC", "Bc"]),
    ("Ac", &["Cb", "Cc", "Bb", "BC", "bc", "aB", "Bc"]),
];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Turn;
    use crate::pff::decomposition_taken_turns_prefix;
    use crate::train_track::{gates_and_illegal_turns, is_train_track, taken_turns};
    use std::collections::BTreeSet;

    #[test]
    fn g_turn_table() {
        let d = chain_g();
        let g = d.start();
        let turn = |s: &str| {
            let p = g.parse_word(s).unwrap();
            Turn::new(p.0[0], p.0[1])
        };
        for (k, (new, images)) in G_TURN_TABLE.iter().enumerate() {
            let fold = d.folds()[k];
            assert_eq!(fold.taken_turn(), turn(new), "fold {}", k + 1);
            let before = taken_turns(&d.prefix(k));
            let pushed: BTreeSet<Turn> = before
                .iter()
                .map(|t| t.map(|x| fold.dir_image(x)))
                .filter(|t| !t.is_degenerate())
                .collect();
            let want: BTreeSet<Turn> = images.iter().map(|s| turn(s)).collect();
            assert_eq!(pushed, want, "fold {}", k + 1);
            let mut all = pushed.clone();
            all.insert(turn(new));
            assert_eq!(
                decomposition_taken_turns_prefix(&d, k + 1),
                all,
                "fold {}",
                k + 1
            );
            assert_eq!(taken_turns(&d.prefix(k + 1)), all, "fold {}", k + 1);
        }
    }

    #[test]
    fn g_prefixes() {
        let d = chain_g();
        assert_eq!(d.len(), 28);
        assert_eq!(d.prefix(3).to_dsl(), "a->cBa;b->bC;c->ac");
        assert_eq!(d.prefix(6).to_dsl(), "a->caBBACa;b->bAC;c->BACaca");
    }

    #[test]
    fn g_is_train_track() {
        let g = map_g();
        assert!(is_train_track(&g).unwrap().is_train_track);
        let gd = gates_and_illegal_turns(&g).unwrap();
        let names: Vec<String> = gd
            .illegal_turns
            .iter()
            .map(|&t| g.domain().turn_name(t))
            .collect();
        assert_eq!(names, vec!["{a,B}", "{A,C}"]);
    }
}
