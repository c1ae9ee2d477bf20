//! Exhaustive generation of admissible structures on the rose.

use std::collections::{BTreeMap, BTreeSet};

use super::{admissible, AutomatonVariant, IwgSpec};
use crate::error::{Error, Result};
use crate::graph::{Dir, Graph, Turn};
use crate::ltt::{color_turns, Color, LttStructure};

/// Largest number of optional red turns tried as a power set.
const MAX_RED_TURNS: usize = 16;

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// Every admissible structure on the rose of the spec's rank, one per relabeling class, in canonical form.
pub fn rose_structures(
    spec: &IwgSpec,
    variant: &dyn AutomatonVariant,
) -> Result<Vec<LttStructure>> {
    if spec.rank > 3 {
        return Err(Error::Automaton(format!(
            "exhaustive generation is limited to rank 3, got {}",
            spec.rank
        )));
    }
    let g = Graph::standard_rose(spec.rank as usize);
    let n = g.num_dirs();
    let k = spec.graph.num_vertices();
    let reds = spec.index_sum().twice() + 2 * (spec.rank - 1);
    if k > n || reds != (n - k) as i64 {
        return Err(Error::Automaton(format!(
            "{k} purple and {reds} red directions do not fit the {n} directions of the rose"
        )));
    }
    let iw_edges = spec.graph.edges();
    let mut out: BTreeMap<Vec<i64>, LttStructure> = BTreeMap::new();
    for purple in combinations(n, k) {
        let purple: Vec<Dir> = purple.into_iter().map(Dir::from_index).collect();
        let mut colors = vec![Color::Red; n];
        for d in &purple {
            colors[d.index()] = Color::Purple;
        }
        let red: Vec<Dir> = g
            .dirs()
            .filter(|d| colors[d.index()] == Color::Red)
            .collect();
        let embeddings: BTreeSet<BTreeSet<Turn>> = permutations(k)
            .into_iter()
            .map(|p| {
                iw_edges
                    .iter()
                    .map(|&(a, b)| Turn::new(purple[p[a]], purple[p[b]]))
                    .collect()
            })
            .collect();
        let red_turns: Vec<Turn> = g
            .all_turns()
            .into_iter()
            .filter(|t| red.contains(&t.0) || red.contains(&t.1))
            .collect();
        if red_turns.len() > MAX_RED_TURNS {
            return Err(Error::Automaton(format!(
                "{} optional red turns is too many to enumerate",
                red_turns.len()
            )));
        }
        for purple_edges in &embeddings {
            for mask in 1u32..1 << red_turns.len() {
                let chosen: Vec<Turn> = (0..red_turns.len())
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| red_turns[i])
                    .collect();
                if !red.iter().all(|&d| chosen.iter().any(|t| t.contains(d))) {
                    continue;
                }
                let turns = purple_edges.iter().copied().chain(chosen);
                let s = LttStructure::new(
                    g.clone(),
                    colors.clone(),
                    color_turns(&colors, turns),
                    spec.index_sum(),
                )?;
                if !admissible(&s, spec, variant) {
                    continue;
                }
                let c = s.canonical();
                out.entry(c.key).or_insert(c.structure);
            }
        }
    }
    Ok(out.into_values().collect())
}
