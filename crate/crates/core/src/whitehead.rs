//! Whitehead graphs, index sums and singularity invariants.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::graph::{Dir, Turn};
use crate::halfint::HalfInt;
use crate::map::GraphMap;
use crate::train_track::{gates_and_illegal_turns, taken_turns_infinity, GateData};

/// A finite simple undirected graph with labeled vertices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SimpleGraph {
    pub labels: Vec<String>,
    adj: Vec<BTreeSet<usize>>,
}

#[derive(Serialize, Deserialize)]
struct SimpleGraphJson {
    vertices: Vec<String>,
    edges: Vec<[String; 2]>,
}

impl SimpleGraph {
    pub fn new(labels: Vec<String>) -> Self {
        let n = labels.len();
        SimpleGraph {
            labels,
            adj: vec![BTreeSet::new(); n],
        }
    }

    pub fn add_edge(&mut self, a: usize, b: usize) {
        if a != b {
            self.adj[a].insert(b);
            self.adj[b].insert(a);
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.labels.len()
    }

    pub fn neighbors(&self, v: usize) -> &BTreeSet<usize> {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a].contains(&b)
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.adj.len())
            .flat_map(|a| {
                self.adj[a]
                    .iter()
                    .filter(move |&&b| a < b)
                    .map(move |&b| (a, b))
            })
            .collect()
    }

    pub fn num_edges(&self) -> usize {
        self.edges().len()
    }

    fn components_avoiding(&self, skip: Option<usize>) -> Vec<Vec<usize>> {
        let n = self.num_vertices();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] || Some(s) == skip {
                continue;
            }
            let mut comp = vec![s];
            seen[s] = true;
            let mut i = 0;
            while i < comp.len() {
                let v = comp[i];
                i += 1;
                for &w in &self.adj[v] {
                    if !seen[w] && Some(w) != skip {
                        seen[w] = true;
                        comp.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn components(&self) -> Vec<Vec<usize>> {
        self.components_avoiding(None)
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    pub fn induced(&self, vs: &[usize]) -> SimpleGraph {
        let mut g = SimpleGraph::new(vs.iter().map(|&v| self.labels[v].clone()).collect());
        for (i, &a) in vs.iter().enumerate() {
            for (j, &b) in vs.iter().enumerate() {
                if self.has_edge(a, b) {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    /// A vertex whose removal disconnects its component.
    pub fn cut_vertex(&self) -> Option<usize> {
        let base = self.components().len();
        (0..self.num_vertices()).find(|&v| {
            let isolated = self.adj[v].is_empty();
            self.components_avoiding(Some(v)).len() > base - usize::from(isolated)
        })
    }

    pub fn has_cut_vertex(&self) -> bool {
        self.cut_vertex().is_some()
    }

    /// Sum of `1 - k/2` over components with `k` vertices.
    pub fn index_sum(&self) -> HalfInt {
        self.components()
            .iter()
            .map(|c| HalfInt::from_twice(2 - c.len() as i64))
            .sum()
    }

    pub fn is_isomorphic(&self, other: &SimpleGraph) -> bool {
        self.isomorphism(other).is_some()
    }

    /// A vertex bijection `self → other` preserving adjacency.
    pub fn isomorphism(&self, other: &SimpleGraph) -> Option<Vec<usize>> {
        let n = self.num_vertices();
        if n != other.num_vertices() || self.num_edges() != other.num_edges() {
            return None;
        }
        let mut da: Vec<usize> = (0..n).map(|v| self.degree(v)).collect();
        let mut db: Vec<usize> = (0..n).map(|v| other.degree(v)).collect();
        let (da_s, db_s) = (da.clone(), db.clone());
        da.sort_unstable();
        db.sort_unstable();
        if da != db {
            return None;
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&v| std::cmp::Reverse(da_s[v]));
        let mut map = vec![usize::MAX; n];
        let mut used = vec![false; n];
        fn go(
            i: usize,
            order: &[usize],
            a: &SimpleGraph,
            b: &SimpleGraph,
            da: &[usize],
            db: &[usize],
            map: &mut [usize],
            used: &mut [bool],
        ) -> bool {
            if i == order.len() {
                return true;
            }
            let v = order[i];
            for w in 0..b.num_vertices() {
                if used[w] || da[v] != db[w] {
                    continue;
                }
                let ok = order[..i]
                    .iter()
                    .all(|&u| a.has_edge(u, v) == b.has_edge(map[u], w));
                if ok {
                    map[v] = w;
                    used[w] = true;
                    if go(i + 1, order, a, b, da, db, map, used) {
                        return true;
                    }
                    used[w] = false;
                    map[v] = usize::MAX;
                }
            }
            false
        }
        go(0, &order, self, other, &da_s, &db_s, &mut map, &mut used).then_some(map)
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "vertices": self.labels,
            "edges": self.edges().iter().map(|&(a, b)| [self.labels[a].clone(), self.labels[b].clone()]).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let s: SimpleGraphJson =
            serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        let mut g = SimpleGraph::new(s.vertices.clone());
        for [a, b] in &s.edges {
            let find = |x: &str| {
                s.vertices
                    .iter()
                    .position(|y| y == x)
                    .ok_or_else(|| Error::Parse(format!("unknown vertex {x}")))
            };
            let (i, j) = (find(a)?, find(b)?);
            if i == j {
                return Err(Error::Parse(format!("loop at {a}")));
            }
            g.add_edge(i, j);
        }
        Ok(g)
    }

    /// Graphviz rendering.
    pub fn to_dot(&self, name: &str) -> String {
        let mut s = format!("graph \"{name}\" {{\n");
        for l in &self.labels {
            s += &format!("  \"{l}\";\n");
        }
        for (a, b) in self.edges() {
            s += &format!("  \"{}\" -- \"{}\";\n", self.labels[a], self.labels[b]);
        }
        s + "}\n"
    }
}

/// Local Whitehead graph at one vertex: directions at the vertex joined by turns of `τ_∞`.
#[derive(Clone, Debug)]
pub struct LocalWhitehead {
    pub vertex: usize,
    pub dirs: Vec<Dir>,
    pub graph: SimpleGraph,
}

#[derive(Clone, Debug)]
pub struct WhiteheadData {
    pub local: Vec<LocalWhitehead>,
    /// Stable Whitehead graphs at periodic vertices, restricted to periodic directions.
    pub stable: Vec<LocalWhitehead>,
    /// Disjoint union of the stable graphs, keeping components with at least three vertices.
    pub ideal: SimpleGraph,
    pub index_sum: HalfInt,
    /// `index_sum + rank - 1`.
    pub index_deficit: HalfInt,
    pub rank: i64,
}

fn local_graph(g: &GraphMap, v: usize, dirs: Vec<Dir>, turns: &BTreeSet<Turn>) -> LocalWhitehead {
    let gr = g.domain();
    let mut graph = SimpleGraph::new(dirs.iter().map(|&d| gr.dir_name(d)).collect());
    for (i, &a) in dirs.iter().enumerate() {
        for (j, &b) in dirs.iter().enumerate() {
            if i < j && turns.contains(&Turn::new(a, b)) {
                graph.add_edge(i, j);
            }
        }
    }
    LocalWhitehead {
        vertex: v,
        dirs,
        graph,
    }
}

/// Whitehead graph data. Meaningful for train track maps without periodic Nielsen paths.
pub fn whitehead_data(g: &GraphMap) -> Result<WhiteheadData> {
    let gd = gates_and_illegal_turns(g)?;
    let turns = taken_turns_infinity(g)?;
    whitehead_from_parts(g, &gd, &turns)
}

pub(crate) fn whitehead_from_parts(
    g: &GraphMap,
    gd: &GateData,
    turns: &BTreeSet<Turn>,
) -> Result<WhiteheadData> {
    let gr = g.domain();
    let local: Vec<LocalWhitehead> = (0..gr.num_vertices())
        .map(|v| local_graph(g, v, gr.directions_at(v), turns))
        .collect();
    let stable: Vec<LocalWhitehead> = (0..gr.num_vertices())
        .filter(|&v| gd.is_periodic_vertex(v))
        .map(|v| {
            let dirs: Vec<Dir> = gr
                .directions_at(v)
                .into_iter()
                .filter(|&d| gd.is_periodic_dir(d))
                .collect();
            local_graph(g, v, dirs, turns)
        })
        .collect();
    let mut labels = Vec::new();
    let mut edges = Vec::new();
    for sw in &stable {
        for comp in sw.graph.components() {
            if comp.len() < 3 {
                continue;
            }
            let base = labels.len();
            for &i in &comp {
                labels.push(sw.graph.labels[i].clone());
            }
            for (x, &i) in comp.iter().enumerate() {
                for (y, &j) in comp.iter().enumerate() {
                    if x < y && sw.graph.has_edge(i, j) {
                        edges.push((base + x, base + y));
                    }
                }
            }
        }
    }
    let mut ideal = SimpleGraph::new(labels);
    for (a, b) in edges {
        ideal.add_edge(a, b);
    }
    let index_sum = ideal.index_sum();
    let rank = gr.betti();
    Ok(WhiteheadData {
        local,
        stable,
        ideal,
        index_sum,
        index_deficit: index_sum + HalfInt::from_int(rank - 1),
        rank,
    })
}

/// Sum over gates of `|gate| - 1`.
pub fn directional_surplus(g: &GraphMap) -> Result<usize> {
    Ok(gates_and_illegal_turns(g)?
        .gates
        .iter()
        .map(|gt| gt.len() - 1)
        .sum())
}

/// Periodic vertices with at least three periodic directions.
pub fn principal_vertices(g: &GraphMap) -> Result<Vec<usize>> {
    let gd = gates_and_illegal_turns(g)?;
    let gr = g.domain();
    Ok((0..gr.num_vertices())
        .filter(|&v| {
            gd.is_periodic_vertex(v)
                && gr
                    .directions_at(v)
                    .iter()
                    .filter(|&&d| gd.is_periodic_dir(d))
                    .count()
                    >= 3
        })
        .collect())
}

pub fn is_fully_singular(g: &GraphMap) -> Result<bool> {
    Ok(principal_vertices(g)?.len() == g.domain().num_vertices())
}

/// Every vertex has at least three gates.
pub fn is_fully_preprincipal(g: &GraphMap) -> Result<bool> {
    let gd = gates_and_illegal_turns(g)?;
    let gr = g.domain();
    Ok((0..gr.num_vertices()).all(|v| {
        let gates: BTreeSet<usize> = gr
            .directions_at(v)
            .iter()
            .map(|d| gd.gate_of[d.index()])
            .collect();
        gates.len() >= 3
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::parse_map;

    fn cycle(n: usize) -> SimpleGraph {
        let mut g = SimpleGraph::new((0..n).map(|i| i.to_string()).collect());
        for i in 0..n {
            g.add_edge(i, (i + 1) % n);
        }
        g
    }

    #[test]
    fn s_invariants() {
        let s = parse_map("a->cbca;b->cbc;c->ac", None).unwrap();
        let w = whitehead_data(&s).unwrap();
        assert!(w.local.iter().all(|l| l.graph.is_connected()));
        assert_eq!(w.ideal.num_vertices(), 4);
        assert!(w.ideal.is_isomorphic(&cycle(4)));
        assert_eq!(w.index_sum, HalfInt::from_int(-1));
        assert_eq!(w.index_deficit, HalfInt::from_int(1));
        assert_eq!(directional_surplus(&s).unwrap(), 2);
        assert_eq!(principal_vertices(&s).unwrap(), vec![0]);
        assert!(is_fully_preprincipal(&s).unwrap());
    }

    #[test]
    fn cut_vertices() {
        assert!(!cycle(4).has_cut_vertex());
        let mut path = SimpleGraph::new(vec!["x".into(), "y".into(), "z".into()]);
        path.add_edge(0, 1);
        path.add_edge(1, 2);
        assert_eq!(path.cut_vertex(), Some(1));
        let mut two = cycle(3);
        two.labels.push("w".into());
        two.adj.push(BTreeSet::new());
        assert!(!two.has_cut_vertex());
    }

    #[test]
    fn isomorphism_search() {
        let mut star = SimpleGraph::new((0..4).map(|i| i.to_string()).collect());
        for i in 1..4 {
            star.add_edge(0, i);
        }
        let mut path = SimpleGraph::new((0..4).map(|i| i.to_string()).collect());
        for i in 0..3 {
            path.add_edge(i, i + 1);
        }
        assert!(!star.is_isomorphic(&path));
        let mut relabeled = SimpleGraph::new((0..4).map(|i| i.to_string()).collect());
        for (a, b) in [(2, 0), (0, 3), (3, 1), (1, 2)] {
            relabeled.add_edge(a, b);
        }
        let iso = cycle(4).isomorphism(&relabeled).unwrap();
        for (a, b) in cycle(4).edges() {
            assert!(relabeled.has_edge(iso[a], iso[b]));
        }
        assert_eq!(SimpleGraph::from_json(&star.to_json()).unwrap(), star);
    }
}
