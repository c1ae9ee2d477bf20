//! Smooth paths: alternating black and colored edge traversals.

use std::collections::VecDeque;

use serde::Serialize;

use super::LttStructure;
use crate::graph::{Dir, EdgePath, Turn};
use crate::scc;

/// One traversal in a smooth path.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SmoothStep {
    /// The black edge of `dir`, from the vertex `dir` to the vertex `dir` reversed.
    Black {
        dir: Dir,
    },
    Colored {
        from: Dir,
        to: Dir,
    },
}

/// A closed smooth path through every colored edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessLoop {
    pub steps: Vec<SmoothStep>,
}

impl WitnessLoop {
    /// The closed carrier path read off the black traversals.
    pub fn black_projection(&self) -> EdgePath {
        EdgePath(
            self.steps
                .iter()
                .filter_map(|s| match s {
                    SmoothStep::Black { dir } => Some(*dir),
                    _ => None,
                })
                .collect(),
        )
    }

    pub fn colored_turns(&self) -> Vec<Turn> {
        self.steps
            .iter()
            .filter_map(|s| match s {
                SmoothStep::Colored { from, to } => Some(Turn::new(*from, *to)),
                _ => None,
            })
            .collect()
    }
}

/// The smooth-transition digraph. Nodes `0..2E` are black traversals, the rest are
/// colored traversals in both directions.
struct Transitions {
    num_dirs: usize,
    turns: Vec<Turn>,
    adj: Vec<Vec<usize>>,
}

impl Transitions {
    fn new(ltt: &LttStructure) -> Self {
        let num_dirs = ltt.carrier().num_dirs();
        let turns: Vec<Turn> = ltt.colored_edges().keys().copied().collect();
        let n = num_dirs + 2 * turns.len();
        let mut adj = vec![Vec::new(); n];
        // Colored traversals leaving each direction-vertex.
        let mut leaving: Vec<Vec<usize>> = vec![Vec::new(); num_dirs];
        for (i, t) in turns.iter().enumerate() {
            leaving[t.0.index()].push(num_dirs + 2 * i);
            leaving[t.1.index()].push(num_dirs + 2 * i + 1);
        }
        for d in 0..num_dirs {
            let end = Dir::from_index(d).rev();
            adj[d] = leaving[end.index()].clone();
        }
        for (i, t) in turns.iter().enumerate() {
            adj[num_dirs + 2 * i] = vec![t.1.index()];
            adj[num_dirs + 2 * i + 1] = vec![t.0.index()];
        }
        Transitions {
            num_dirs,
            turns,
            adj,
        }
    }

    fn step(&self, node: usize) -> SmoothStep {
        if node < self.num_dirs {
            SmoothStep::Black {
                dir: Dir::from_index(node),
            }
        } else {
            let i = (node - self.num_dirs) / 2;
            let t = self.turns[i];
            if (node - self.num_dirs) % 2 == 0 {
                SmoothStep::Colored { from: t.0, to: t.1 }
            } else {
                SmoothStep::Colored { from: t.1, to: t.0 }
            }
        }
    }

    /// Traversal pairs, one pair per edge of the structure.
    fn edge_pairs(&self) -> Vec<[usize; 2]> {
        let mut out: Vec<[usize; 2]> = (0..self.num_dirs / 2).map(|e| [2 * e, 2 * e + 1]).collect();
        out.extend(
            (0..self.turns.len()).map(|i| [self.num_dirs + 2 * i, self.num_dirs + 2 * i + 1]),
        );
        out
    }

    /// A strongly connected component meeting every edge pair.
    fn covering_component(&self) -> Option<Vec<usize>> {
        let pairs = self.edge_pairs();
        scc::tarjan(&self.adj).into_iter().find(|comp| {
            scc::is_cyclic(&self.adj, comp)
                && pairs
                    .iter()
                    .all(|p| p.iter().any(|x| comp.binary_search(x).is_ok()))
        })
    }
}

impl LttStructure {
    /// Some strongly connected part of the smooth-transition digraph traverses every edge.
    pub fn is_birecurrent(&self) -> bool {
        Transitions::new(self).covering_component().is_some()
    }

    /// A closed smooth path traversing every edge, when the structure is birecurrent.
    pub fn witness_loop(&self) -> Option<WitnessLoop> {
        let tr = Transitions::new(self);
        let comp = tr.covering_component()?;
        let inside = |x: usize| comp.binary_search(&x).is_ok();
        let targets: Vec<usize> = tr
            .edge_pairs()
            .iter()
            .map(|p| if inside(p[0]) { p[0] } else { p[1] })
            .collect();
        let start = targets[0];
        let mut walk = vec![start];
        let mut cur = start;
        let mut goals: Vec<usize> = targets[1..].to_vec();
        goals.push(start);
        for goal in goals {
            if walk.contains(&goal) && goal != start {
                continue;
            }
            // Breadth-first search inside the component for a path of length at least one.
            const SOURCE: usize = usize::MAX - 1;
            let mut prev = vec![usize::MAX; tr.adj.len()];
            let mut queue = VecDeque::new();
            for &w in &tr.adj[cur] {
                if inside(w) && prev[w] == usize::MAX {
                    prev[w] = SOURCE;
                    queue.push_back(w);
                }
            }
            while let Some(v) = queue.pop_front() {
                if v == goal {
                    break;
                }
                for &w in &tr.adj[v] {
                    if inside(w) && prev[w] == usize::MAX {
                        prev[w] = v;
                        queue.push_back(w);
                    }
                }
            }
            let mut path = vec![goal];
            let mut x = goal;
            while prev[x] != SOURCE {
                x = prev[x];
                path.push(x);
            }
            path.reverse();
            walk.extend(path);
            cur = goal;
        }
        walk.pop();
        Some(WitnessLoop {
            steps: walk.into_iter().map(|n| tr.step(n)).collect(),
        })
    }
}
