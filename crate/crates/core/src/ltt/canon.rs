//! Canonical labeling of ltt structures up to signed edge relabeling.

use std::collections::BTreeMap;

use super::{Color, LttStructure};
use crate::graph::{Dir, Graph, Turn};
use crate::map::EdgePermutation;

/// A canonical representative with the relabeling that produces it.
#[derive(Clone, Debug)]
pub struct Canonical {
    pub structure: LttStructure,
    /// `relabel · original = structure`.
    pub relabel: EdgePermutation,
    pub key: Vec<i64>,
}

/// Color refinement of directions. Returns a rank per direction that is invariant under relabeling.
fn refine(ltt: &LttStructure) -> Vec<usize> {
    let g = ltt.carrier();
    let n = g.num_dirs();
    let mut nbrs: Vec<Vec<usize>> = vec![Vec::new(); n];
    for t in ltt.colored_edges().keys() {
        nbrs[t.0.index()].push(t.1.index());
        nbrs[t.1.index()].push(t.0.index());
    }
    let init: Vec<Vec<i64>> = g
        .dirs()
        .map(|d| {
            let v = g.init(d);
            let red_deg = ltt
                .colored_edges()
                .iter()
                .filter(|(t, &c)| c == Color::Red && t.contains(d))
                .count();
            vec![
                (ltt.color(d) == Color::Red) as i64,
                nbrs[d.index()].len() as i64,
                red_deg as i64,
                g.valence(v) as i64,
                (g.init(d) == g.term(d)) as i64,
            ]
        })
        .collect();
    let mut rank = ranks(&init);
    for _ in 0..n {
        let sig: Vec<Vec<i64>> = g
            .dirs()
            .map(|d| {
                let mut s = vec![rank[d.index()] as i64, rank[d.rev().index()] as i64];
                let mut nb: Vec<i64> = nbrs[d.index()].iter().map(|&x| rank[x] as i64).collect();
                nb.sort_unstable();
                s.push(-1);
                s.extend(nb);
                let mut here: Vec<i64> = g
                    .directions_at(g.init(d))
                    .iter()
                    .filter(|&&x| x != d)
                    .map(|x| rank[x.index()] as i64)
                    .collect();
                here.sort_unstable();
                s.push(-1);
                s.extend(here);
                s
            })
            .collect();
        let next = ranks(&sig);
        let stable = distinct(&next) == distinct(&rank);
        rank = next;
        if stable {
            break;
        }
    }
    rank
}

fn distinct(r: &[usize]) -> usize {
    let mut v = r.to_vec();
    v.sort_unstable();
    v.dedup();
    v.len()
}

fn ranks<T: Ord + Clone>(xs: &[T]) -> Vec<usize> {
    let mut u: Vec<T> = xs.to_vec();
    u.sort();
    u.dedup();
    xs.iter().map(|x| u.binary_search(x).unwrap()).collect()
}

/// Serialized form of `σ · ltt` with vertices numbered by first appearance.
fn serialize(ltt: &LttStructure, sigma_inv: &[Dir]) -> (Vec<i64>, Vec<usize>) {
    let g = ltt.carrier();
    let ne = g.num_edges();
    let mut vnum = vec![usize::MAX; g.num_vertices()];
    let mut next = 0;
    let mut key = vec![g.num_vertices() as i64, ne as i64];
    for &x in sigma_inv.iter().take(ne) {
        for v in [g.init(x), g.term(x)] {
            if vnum[v] == usize::MAX {
                vnum[v] = next;
                next += 1;
            }
            key.push(vnum[v] as i64);
        }
    }
    // sigma_inv is indexed by new direction.
    for &x in sigma_inv {
        key.push((ltt.color(x) == Color::Red) as i64);
    }
    let mut fwd = vec![Dir(0); 2 * ne];
    for (new, &old) in sigma_inv.iter().enumerate() {
        fwd[old.index()] = Dir::from_index(new);
    }
    let mut edges: Vec<(Turn, Color)> = ltt
        .colored_edges()
        .iter()
        .map(|(&t, &c)| (t.map(|d| fwd[d.index()]), c))
        .collect();
    edges.sort();
    for (t, c) in edges {
        key.extend([t.0 .0 as i64, t.1 .0 as i64, (c == Color::Red) as i64]);
    }
    key.push(ltt.index().twice());
    (key, vnum)
}

impl LttStructure {
    /// All relabelings consistent with the refined invariants, as inverse direction tables.
    fn candidate_relabelings(&self) -> Vec<Vec<Dir>> {
        let g = self.carrier();
        let rank = refine(self);
        let ne = g.num_edges();
        let key = |e: usize| {
            let (a, b) = (rank[2 * e], rank[2 * e + 1]);
            (a.min(b), a.max(b))
        };
        let mut order: Vec<usize> = (0..ne).collect();
        order.sort_by_key(|&e| key(e));
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for &e in &order {
            match groups.last_mut() {
                Some(gr) if key(gr[0]) == key(e) => gr.push(e),
                _ => groups.push(vec![e]),
            }
        }
        // Orientation choices per old edge: the direction that becomes the new positive one.
        let orient = |e: usize| -> Vec<Dir> {
            let (a, b) = (rank[2 * e], rank[2 * e + 1]);
            if a < b {
                vec![Dir::pos(e)]
            } else if b < a {
                vec![Dir::new(e, true)]
            } else {
                vec![Dir::pos(e), Dir::new(e, true)]
            }
        };
        let mut out: Vec<Vec<Dir>> = vec![Vec::new()];
        for gr in &groups {
            let mut next = Vec::new();
            for perm in permutations(gr) {
                let mut partial: Vec<Vec<Dir>> = vec![Vec::new()];
                for &e in &perm {
                    let mut p2 = Vec::new();
                    for p in &partial {
                        for d in orient(e) {
                            let mut q = p.clone();
                            q.push(d);
                            p2.push(q);
                        }
                    }
                    partial = p2;
                }
                for base in &out {
                    for p in &partial {
                        let mut q = base.clone();
                        q.extend(p);
                        next.push(q);
                    }
                }
            }
            out = next;
        }
        // Expand positive new edges to full inverse tables indexed by new direction.
        out.into_iter()
            .map(|pos| {
                let mut inv = vec![Dir(0); 2 * ne];
                for (i, &x) in pos.iter().enumerate() {
                    inv[2 * i] = x;
                    inv[2 * i + 1] = x.rev();
                }
                inv
            })
            .collect()
    }

    fn relabeling_from(&self, sigma_inv: &[Dir], vnum: &[usize]) -> EdgePermutation {
        let ne = self.carrier().num_edges();
        let mut edges = vec![Dir(0); ne];
        for (new, &old) in sigma_inv.iter().enumerate().take(2 * ne).step_by(2) {
            edges[old.edge()] = Dir::new(new / 2, old.is_reversed());
        }
        EdgePermutation::new(edges, vnum.to_vec()).expect("relabeling is a permutation")
    }

    /// Minimum serialized form over all invariant-consistent relabelings.
    pub fn canonical(&self) -> Canonical {
        let mut best: Option<(Vec<i64>, Vec<Dir>, Vec<usize>)> = None;
        for inv in self.candidate_relabelings() {
            let (key, vnum) = serialize(self, &inv);
            if best.as_ref().map_or(true, |b| key < b.0) {
                best = Some((key, inv, vnum));
            }
        }
        let (key, inv, vnum) = best.expect("at least one relabeling");
        let relabel = self.relabeling_from(&inv, &vnum);
        let structure = self
            .symmetry_action(&relabel)
            .expect("relabeling fits the carrier");
        let structure = rename_vertices(structure);
        Canonical {
            structure,
            relabel,
            key,
        }
    }

    pub fn canonical_key(&self) -> Vec<i64> {
        self.canonical().key
    }

    /// Color-preserving relabelings fixing the structure, identity included.
    pub fn automorphisms(&self) -> Vec<EdgePermutation> {
        let (own, _) = serialize(self, &identity_inv(self.carrier()));
        let mut out: Vec<EdgePermutation> = self
            .candidate_relabelings()
            .into_iter()
            .filter_map(|inv| {
                let (key, vnum) = serialize(self, &inv);
                if key != own {
                    return None;
                }
                let p = self.relabeling_from(&inv, &vnum);
                (self.symmetry_action(&p).ok()? == *self).then_some(p)
            })
            .collect();
        if out.is_empty() {
            out.push(EdgePermutation::identity(
                self.carrier().num_edges(),
                self.carrier().num_vertices(),
            ));
        }
        out.sort();
        out.dedup();
        out
    }
}

fn identity_inv(g: &Graph) -> Vec<Dir> {
    g.dirs().collect()
}

/// Canonical vertex names: `v` for a rose, `v0, v1, ...` otherwise.
fn rename_vertices(ltt: LttStructure) -> LttStructure {
    let g = ltt.carrier();
    let names: Vec<String> = if g.num_vertices() == 1 {
        vec!["v".into()]
    } else {
        (0..g.num_vertices()).map(|i| format!("v{i}")).collect()
    };
    if names == g.vertex_names() {
        return ltt;
    }
    let carrier = Graph::new(names, g.edge_names().to_vec(), g.ends().to_vec())
        .expect("renaming keeps the graph valid");
    let colors = ltt.colors().to_vec();
    let edges: BTreeMap<Turn, Color> = ltt.colored_edges().clone();
    LttStructure::new(carrier, colors, edges, ltt.index()).expect("same shape")
}

fn permutations(xs: &[usize]) -> Vec<Vec<usize>> {
    if xs.len() <= 1 {
        return vec![xs.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..xs.len() {
        let mut rest = xs.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}
