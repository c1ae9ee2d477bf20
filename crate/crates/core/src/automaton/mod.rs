//! Automata of lamination train track structures.
//!
//! Vertices are structures (up to relabeling) whose ideal Whitehead graph is a prescribed
//! graph. Edges are tt-friendly proper full folds and automorphism relabelings. Loops in
//! the strongly connected components give train track maps whose ideal Whitehead graph
//! matches, once the irreducibility criterion is checked.

mod enumerate;
mod loops;
mod variant;

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde_json::json;

use crate::error::{Error, Result};
use crate::graph::{Dir, EdgePath, Graph};
use crate::halfint::HalfInt;
use crate::ltt::{Canonical, LttStructure};
use crate::map::{EdgePermutation, GraphMap};
use crate::pff::Fold;
use crate::scc;
use crate::whitehead::SimpleGraph;

pub use enumerate::rose_structures;
pub use loops::{
    certify_loop, conjugate, decomposition_to_loop, loop_to_map, random_loops, shortest_path, Loop,
    LoopCertificate, LoopMap, LoopVerdict,
};
pub use variant::{variant, variants, AutomatonVariant, FullySingular, LoneAxis};

/// The target ideal Whitehead graph and rank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IwgSpec {
    pub graph: SimpleGraph,
    pub rank: i64,
}

impl IwgSpec {
    pub fn new(graph: SimpleGraph, rank: i64) -> Result<Self> {
        if rank < 2 {
            return Err(Error::Automaton(format!("rank {rank} is below 2")));
        }
        Ok(IwgSpec { graph, rank })
    }

    /// Sum of `1 - k/2` over the components.
    pub fn index_sum(&self) -> HalfInt {
        self.graph.index_sum()
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({ "schema": "traintrack.iwg/1", "rank": self.rank, "graph": self.graph.to_json() })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let rank = v["rank"]
            .as_i64()
            .ok_or_else(|| Error::Parse("missing integer field `rank`".into()))?;
        IwgSpec::new(SimpleGraph::from_json(&v["graph"])?, rank)
    }
}

/// An automaton edge label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Move {
    Fold(Fold),
    Symmetry(EdgePermutation),
}

#[derive(Clone, Debug)]
pub struct Vertex {
    /// Canonical representative.
    pub structure: LttStructure,
    pub key: Vec<i64>,
}

/// For a fold, `relabel · (fold · source) = target`; for a symmetry, `relabel` is the identity.
#[derive(Clone, Debug)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
    pub mv: Move,
    pub relabel: EdgePermutation,
}

#[derive(Clone, Debug)]
pub struct BuildOptions {
    pub seeds: Vec<LttStructure>,
    /// Also generate every admissible structure on the rose (rank 3 or less).
    pub exhaustive: bool,
    pub max_vertices: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            seeds: Vec::new(),
            exhaustive: false,
            max_vertices: 100_000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Automaton {
    variant: &'static str,
    lone_axis: bool,
    spec: IwgSpec,
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    sccs: Vec<Vec<usize>>,
    scc_of: Vec<usize>,
    invariant: Vec<bool>,
    explored: usize,
}

/// The isomorphism `from → to` given by a relabeling of `from`'s labels. `to` must have the relabeled shape.
pub(crate) fn perm_map(sigma: &EdgePermutation, from: &Graph, to: &Graph) -> Result<GraphMap> {
    GraphMap::new(
        from.clone(),
        to.clone(),
        sigma.vertices().to_vec(),
        sigma.edges().iter().map(|&d| EdgePath::single(d)).collect(),
    )
}

/// Conditions every vertex must satisfy, whatever the variant.
pub fn admissible(ltt: &LttStructure, spec: &IwgSpec, variant: &dyn AutomatonVariant) -> bool {
    ltt.rank() == spec.rank
        && ltt.index() == spec.index_sum()
        && ltt.validate().is_empty()
        && ltt.ideal_whitehead().is_isomorphic(&spec.graph)
        && variant.accepts(ltt)
        && ltt.is_birecurrent()
}

/// Outgoing moves of a canonical structure: admissible tt-friendly folds and nontrivial automorphisms.
fn moves(
    ltt: &LttStructure,
    spec: &IwgSpec,
    variant: &dyn AutomatonVariant,
) -> Vec<(Move, Canonical)> {
    let g = ltt.carrier();
    let mut out = Vec::new();
    for e in g.dirs() {
        for e2 in g.dirs() {
            if !ltt.tt_friendly_pff_check(e, e2).ok {
                continue;
            }
            let fold = Fold::new(e, e2);
            let Ok(t) = ltt.pff_action(fold) else {
                continue;
            };
            if !admissible(&t, spec, variant) {
                continue;
            }
            out.push((Move::Fold(fold), t.canonical()));
        }
    }
    let id = EdgePermutation::identity(g.num_edges(), g.num_vertices());
    for a in ltt.automorphisms() {
        if !a.is_identity() {
            out.push((
                Move::Symmetry(a),
                Canonical {
                    structure: ltt.clone(),
                    relabel: id.clone(),
                    key: Vec::new(),
                },
            ));
        }
    }
    out
}

/// Build the automaton: closure of the seeds (and optionally all rose structures) under moves,
/// restricted to its nontrivial strongly connected components.
pub fn build(
    variant: &dyn AutomatonVariant,
    spec: &IwgSpec,
    opts: &BuildOptions,
) -> Result<Automaton> {
    variant.check_spec(spec)?;
    let mut starts = Vec::new();
    for s in &opts.seeds {
        if !admissible(s, spec, variant) {
            let mut why: Vec<String> = s.validate().iter().map(|v| v.to_string()).collect();
            if why.is_empty() {
                why.push(
                    "index, rank, ideal Whitehead graph, variant condition or birecurrence differs"
                        .into(),
                );
            }
            return Err(Error::Automaton(format!(
                "seed is not admissible: {}",
                why.join("; ")
            )));
        }
        starts.push(s.canonical());
    }
    if opts.exhaustive {
        for s in rose_structures(spec, variant)? {
            starts.push(s.canonical());
        }
    }
    if starts.is_empty() {
        return Err(Error::Automaton("no seeds".into()));
    }

    let mut index: BTreeMap<Vec<i64>, usize> = BTreeMap::new();
    let mut all: Vec<Vertex> = Vec::new();
    let mut queue = VecDeque::new();
    let mut insert = |s: LttStructure,
                      key: Vec<i64>,
                      all: &mut Vec<Vertex>,
                      queue: &mut VecDeque<usize>|
     -> Result<usize> {
        if let Some(&i) = index.get(&key) {
            return Ok(i);
        }
        if all.len() >= opts.max_vertices {
            return Err(Error::Automaton(format!(
                "more than {} vertices",
                opts.max_vertices
            )));
        }
        index.insert(key.clone(), all.len());
        all.push(Vertex { structure: s, key });
        queue.push_back(all.len() - 1);
        Ok(all.len() - 1)
    };
    for c in starts {
        insert(c.structure, c.key, &mut all, &mut queue)?;
    }
    let mut raw: Vec<Edge> = Vec::new();
    while let Some(v) = queue.pop_front() {
        let st = all[v].structure.clone();
        for (mv, c) in moves(&st, spec, variant) {
            let t = match &mv {
                Move::Symmetry(_) => v,
                Move::Fold(_) => insert(c.structure, c.key, &mut all, &mut queue)?,
            };
            raw.push(Edge {
                source: v,
                target: t,
                mv,
                relabel: c.relabel,
            });
        }
    }
    let explored = all.len();

    let mut adj = vec![Vec::new(); all.len()];
    for e in &raw {
        adj[e.source].push(e.target);
    }
    let mut comps: Vec<Vec<usize>> = scc::tarjan(&adj)
        .into_iter()
        .filter(|c| scc::is_cyclic(&adj, c))
        .collect();
    comps.sort();
    let mut renumber = vec![usize::MAX; all.len()];
    let mut vertices = Vec::new();
    let mut scc_of = Vec::new();
    let mut sccs = Vec::new();
    for (ci, comp) in comps.iter().enumerate() {
        let mut ids = Vec::new();
        for &v in comp {
            renumber[v] = vertices.len();
            ids.push(vertices.len());
            vertices.push(all[v].clone());
            scc_of.push(ci);
        }
        sccs.push(ids);
    }
    let edges: Vec<Edge> = raw
        .into_iter()
        .filter(|e| renumber[e.source] != usize::MAX && renumber[e.target] != usize::MAX)
        .filter(|e| scc_of[renumber[e.source]] == scc_of[renumber[e.target]])
        .map(|e| Edge {
            source: renumber[e.source],
            target: renumber[e.target],
            ..e
        })
        .collect();
    let mut a = Automaton {
        variant: variant.name(),
        lone_axis: variant.certifies_lone_axis(),
        spec: spec.clone(),
        vertices,
        edges,
        sccs,
        scc_of,
        invariant: Vec::new(),
        explored,
    };
    a.invariant = (0..a.sccs.len())
        .map(|c| a.has_invariant_subgraph(c))
        .collect::<Result<_>>()?;
    Ok(a)
}

impl Automaton {
    pub fn variant_name(&self) -> &'static str {
        self.variant
    }
    pub fn spec(&self) -> &IwgSpec {
        &self.spec
    }
    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }
    pub fn sccs(&self) -> &[Vec<usize>] {
        &self.sccs
    }
    pub fn scc_of(&self, v: usize) -> usize {
        self.scc_of[v]
    }
    /// Vertices reached before the restriction to strongly connected components.
    pub fn explored(&self) -> usize {
        self.explored
    }
    /// Some proper subgraph with a cycle is invariant under every edge map of the component.
    pub fn has_invariant(&self, scc: usize) -> bool {
        self.invariant[scc]
    }

    pub fn vertex_by_key(&self, key: &[i64]) -> Option<usize> {
        self.vertices.iter().position(|v| v.key == key)
    }

    pub fn out_edges(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges
            .iter()
            .enumerate()
            .filter(move |(_, e)| e.source == v)
            .map(|(i, _)| i)
    }

    pub fn find_edge(&self, source: usize, mv: &Move) -> Option<usize> {
        self.out_edges(source).find(|&i| &self.edges[i].mv == mv)
    }

    /// The map of an edge, from the source carrier to the target carrier.
    pub fn edge_map(&self, i: usize) -> Result<GraphMap> {
        let e = &self.edges[i];
        let from = self.vertices[e.source].structure.carrier();
        let to = self.vertices[e.target].structure.carrier();
        match &e.mv {
            Move::Symmetry(a) => perm_map(a, from, to),
            Move::Fold(f) => {
                let fm = f.to_map(from)?;
                perm_map(&e.relabel, fm.codomain(), to)?.compose(&fm)
            }
        }
    }

    pub fn move_name(&self, i: usize) -> String {
        let e = &self.edges[i];
        let g = self.vertices[e.source].structure.carrier();
        match &e.mv {
            Move::Fold(f) => f.name(g),
            Move::Symmetry(a) => format!("symmetry {}", a.to_dsl(g)),
        }
    }

    fn has_invariant_subgraph(&self, c: usize) -> Result<bool> {
        let comp = &self.sccs[c];
        let local: BTreeMap<usize, usize> = comp.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let maps: Vec<(usize, usize, GraphMap)> = self
            .edges
            .iter()
            .enumerate()
            .filter(|(_, e)| self.scc_of[e.source] == c)
            .map(|(i, e)| Ok((local[&e.source], local[&e.target], self.edge_map(i)?)))
            .collect::<Result<_>>()?;
        let carriers: Vec<&Graph> = comp
            .iter()
            .map(|&v| self.vertices[v].structure.carrier())
            .collect();
        let m = carriers[0].num_edges();
        if m > 16 {
            return Err(Error::Automaton(format!(
                "{m} edges is too many for the invariant subgraph search"
            )));
        }
        for mask in 1u32..(1 << m) - 1 {
            let mut sets: Vec<Option<BTreeSet<usize>>> = vec![None; comp.len()];
            sets[0] = Some((0..m).filter(|&i| mask >> i & 1 == 1).collect());
            let mut work = vec![0usize];
            let mut proper = true;
            while let Some(u) = work.pop() {
                let h = sets[u].clone().expect("queued sets exist");
                for (s, t, f) in &maps {
                    if *s != u {
                        continue;
                    }
                    let image: BTreeSet<usize> = h
                        .iter()
                        .flat_map(|&i| f.images()[i].0.iter().map(|d: &Dir| d.edge()))
                        .collect();
                    let entry = sets[*t].get_or_insert_with(BTreeSet::new);
                    let before = entry.len();
                    entry.extend(image);
                    if entry.len() == m {
                        proper = false;
                        break;
                    }
                    if entry.len() != before {
                        work.push(*t);
                    }
                }
                if !proper {
                    break;
                }
            }
            let cyclic = sets
                .iter()
                .zip(&carriers)
                .any(|(h, g)| h.as_ref().is_some_and(|h| has_cycle(g, h)));
            if proper && cyclic {
                return Ok(true);
            }
        }
        Ok(false)
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "schema": "traintrack.automaton/1",
            "variant": self.variant,
            "spec": self.spec.to_json(),
            "explored": self.explored,
            "vertices": self.vertices.iter().enumerate().map(|(i, v)| json!({
                "id": i,
                "scc": self.scc_of[i],
                "ltt": v.structure.to_json(),
            })).collect::<Vec<_>>(),
            "edges": self.edges.iter().enumerate().map(|(i, e)| {
                let g = self.vertices[e.source].structure.carrier();
                let mut j = json!({ "id": i, "source": e.source, "target": e.target });
                match &e.mv {
                    Move::Fold(f) => {
                        j["fold"] = json!([g.dir_name(f.folded), g.dir_name(f.over)]);
                        j["relabel"] = json!(e.relabel.edges().iter().map(|&d| g.dir_name(d)).collect::<Vec<_>>());
                        j["relabel_vertices"] = json!(e.relabel.vertices());
                    }
                    Move::Symmetry(a) => {
                        j["symmetry"] = json!(a.edges().iter().map(|&d| g.dir_name(d)).collect::<Vec<_>>());
                        j["symmetry_vertices"] = json!(a.vertices());
                    }
                }
                j
            }).collect::<Vec<_>>(),
            "sccs": self.sccs.iter().enumerate().map(|(c, vs)| json!({
                "vertices": vs,
                "invariant_subgraph": self.invariant[c],
            })).collect::<Vec<_>>(),
        })
    }

    /// Parse an automaton and re-derive every edge: folds must be tt-friendly and land on the
    /// recorded target, symmetries must be automorphisms.
    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let bad = |m: &str| Error::Parse(format!("automaton: {m}"));
        if v["schema"] != "traintrack.automaton/1" {
            return Err(bad("unknown schema"));
        }
        let name = v["variant"]
            .as_str()
            .ok_or_else(|| bad("missing variant"))?;
        let var = variant(name).ok_or_else(|| bad("unknown variant"))?;
        let spec = IwgSpec::from_json(&v["spec"])?;
        let vs = v["vertices"]
            .as_array()
            .ok_or_else(|| bad("missing vertices"))?;
        let mut vertices = Vec::new();
        let mut scc_of = Vec::new();
        for x in vs {
            let s = LttStructure::from_json(&x["ltt"])?;
            let c = s.canonical();
            if c.structure != s {
                return Err(bad("vertex is not in canonical form"));
            }
            if !admissible(&s, &spec, var.as_ref()) {
                return Err(bad("vertex is not admissible"));
            }
            vertices.push(Vertex {
                structure: s,
                key: c.key,
            });
            scc_of.push(x["scc"].as_u64().ok_or_else(|| bad("missing scc"))? as usize);
        }
        let dirs = |g: &Graph, x: &serde_json::Value| -> Result<Vec<Dir>> {
            x.as_array()
                .ok_or_else(|| bad("expected a list of directions"))?
                .iter()
                .map(|d| g.parse_dir(d.as_str().unwrap_or("")))
                .collect()
        };
        let ids = |x: &serde_json::Value| -> Result<Vec<usize>> {
            x.as_array()
                .ok_or_else(|| bad("expected a list of vertex ids"))?
                .iter()
                .map(|i| i.as_u64().map(|i| i as usize).ok_or_else(|| bad("bad id")))
                .collect()
        };
        let mut edges = Vec::new();
        for x in v["edges"].as_array().ok_or_else(|| bad("missing edges"))? {
            let source = x["source"].as_u64().ok_or_else(|| bad("missing source"))? as usize;
            let target = x["target"].as_u64().ok_or_else(|| bad("missing target"))? as usize;
            if source >= vertices.len() || target >= vertices.len() {
                return Err(bad("edge endpoint out of range"));
            }
            let st = &vertices[source].structure;
            let g = st.carrier();
            if !x["fold"].is_null() {
                let fd = dirs(g, &x["fold"])?;
                if fd.len() != 2 {
                    return Err(bad("fold needs two directions"));
                }
                let fold = Fold::new(fd[0], fd[1]);
                if !st.tt_friendly_pff_check(fold.folded, fold.over).ok {
                    return Err(bad("fold is not tt-friendly"));
                }
                let relabel =
                    EdgePermutation::new(dirs(g, &x["relabel"])?, ids(&x["relabel_vertices"])?)?;
                let t = st.pff_action(fold)?;
                let moved = t.symmetry_action(&relabel)?;
                if moved.canonical().key != vertices[target].key
                    || moved.colored_edges() != vertices[target].structure.colored_edges()
                {
                    return Err(bad("fold does not reach its target"));
                }
                edges.push(Edge {
                    source,
                    target,
                    mv: Move::Fold(fold),
                    relabel,
                });
            } else {
                let a =
                    EdgePermutation::new(dirs(g, &x["symmetry"])?, ids(&x["symmetry_vertices"])?)?;
                if source != target || st.symmetry_action(&a)? != *st {
                    return Err(bad("symmetry is not an automorphism"));
                }
                let id = EdgePermutation::identity(g.num_edges(), g.num_vertices());
                edges.push(Edge {
                    source,
                    target,
                    mv: Move::Symmetry(a),
                    relabel: id,
                });
            }
        }
        let nscc = scc_of.iter().max().map_or(0, |m| m + 1);
        let mut sccs = vec![Vec::new(); nscc];
        for (i, &c) in scc_of.iter().enumerate() {
            sccs[c].push(i);
        }
        let mut a = Automaton {
            variant: var.name(),
            lone_axis: var.certifies_lone_axis(),
            spec,
            vertices,
            edges,
            sccs,
            scc_of,
            invariant: Vec::new(),
            explored: v["explored"].as_u64().unwrap_or(0) as usize,
        };
        a.invariant = (0..a.sccs.len())
            .map(|c| a.has_invariant_subgraph(c))
            .collect::<Result<_>>()?;
        Ok(a)
    }

    /// Graphviz rendering with one cluster per strongly connected component.
    pub fn to_dot(&self) -> String {
        let mut s = format!(
            "digraph \"{}\" {{\n  node [shape=box, fontname=monospace];\n",
            self.variant
        );
        for (c, vs) in self.sccs.iter().enumerate() {
            let style = if self.invariant[c] {
                " style=dashed;"
            } else {
                ""
            };
            s += &format!("  subgraph cluster_{c} {{\n    label=\"scc {c}\";{style}\n");
            for &v in vs {
                let st = &self.vertices[v].structure;
                let g = st.carrier();
                let red: Vec<String> = st.red_vertices().iter().map(|&d| g.dir_name(d)).collect();
                s += &format!("    v{v} [label=\"{v}\\nred {}\"];\n", red.join(","));
            }
            s += "  }\n";
        }
        for (i, e) in self.edges.iter().enumerate() {
            let style = if matches!(e.mv, Move::Symmetry(_)) {
                ", style=dotted"
            } else {
                ""
            };
            s += &format!(
                "  v{} -> v{} [label=\"{}: {}\"{style}];\n",
                e.source,
                e.target,
                i,
                self.move_name(i)
            );
        }
        s + "}\n"
    }

    /// The automaton without components flagged by [`has_invariant`](Self::has_invariant).
    pub fn without_invariant(&self) -> Automaton {
        let keep: Vec<usize> = (0..self.sccs.len())
            .filter(|&c| !self.invariant[c])
            .collect();
        let mut renumber = vec![usize::MAX; self.vertices.len()];
        let mut out = Automaton {
            vertices: Vec::new(),
            edges: Vec::new(),
            sccs: Vec::new(),
            scc_of: Vec::new(),
            invariant: Vec::new(),
            ..self.clone()
        };
        for (ci, &c) in keep.iter().enumerate() {
            let mut ids = Vec::new();
            for &v in &self.sccs[c] {
                renumber[v] = out.vertices.len();
                ids.push(out.vertices.len());
                out.vertices.push(self.vertices[v].clone());
                out.scc_of.push(ci);
            }
            out.sccs.push(ids);
            out.invariant.push(false);
        }
        out.edges = self
            .edges
            .iter()
            .filter(|e| renumber[e.source] != usize::MAX)
            .map(|e| Edge {
                source: renumber[e.source],
                target: renumber[e.target],
                ..e.clone()
            })
            .collect();
        out
    }

    /// Whether loops are certified as lone axis automorphisms.
    pub fn certifies_lone_axis(&self) -> bool {
        self.lone_axis
    }
}

/// The edge set `h` of `g` contains a cycle.
fn has_cycle(g: &Graph, h: &BTreeSet<usize>) -> bool {
    let mut parent: Vec<usize> = (0..g.num_vertices()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        if p[x] != x {
            let r = find(p, p[x]);
            p[x] = r;
        }
        p[x]
    }
    for &e in h {
        let (a, b) = g.ends()[e];
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra == rb {
            return true;
        }
        parent[ra] = rb;
    }
    false
}

#[cfg(test)]
mod tests;
