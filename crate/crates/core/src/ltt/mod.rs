//! Lamination train track structures.
//!
//! The vertices of a structure are the directions of its carrier graph, colored red or
//! purple. Each carrier edge contributes a black edge joining its two directions, and
//! colored edges join pairs of directions at a common vertex.

mod canon;
mod smooth;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::graph::{Dir, Graph, Turn};
use crate::halfint::HalfInt;
use crate::map::{EdgePermutation, GraphMap};
use crate::pff::Fold;
use crate::pnp::PnpFree;
use crate::train_track::{gates_and_illegal_turns, taken_turns_infinity};
use crate::whitehead::{whitehead_from_parts, SimpleGraph};

pub use canon::Canonical;
pub use smooth::{SmoothStep, WitnessLoop};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Purple,
    Red,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LttStructure {
    carrier: Graph,
    colors: Vec<Color>,
    edges: BTreeMap<Turn, Color>,
    index: HalfInt,
}

/// A violated axiom.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub axiom: &'static str,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) {}", self.axiom, self.detail)
    }
}

fn violation(axiom: &'static str, detail: impl Into<String>) -> Violation {
    Violation {
        axiom,
        detail: detail.into(),
    }
}

/// Outcome of the tt-friendly fold test.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FoldCheck {
    pub ok: bool,
    /// The first failed condition, e.g. `tt-pff-ii`.
    pub failed: Option<&'static str>,
    pub reason: String,
}

impl LttStructure {
    /// Build a structure. Only index ranges and turn shapes are checked here; axioms are checked by [`validate`](Self::validate).
    pub fn new(
        carrier: Graph,
        colors: Vec<Color>,
        edges: BTreeMap<Turn, Color>,
        index: HalfInt,
    ) -> Result<Self> {
        if colors.len() != carrier.num_dirs() {
            return Err(Error::InvalidLtt(
                "one color per direction is required".into(),
            ));
        }
        for t in edges.keys() {
            if t.1.index() >= carrier.num_dirs() {
                return Err(Error::InvalidLtt(
                    "colored edge uses an unknown direction".into(),
                ));
            }
        }
        Ok(LttStructure {
            carrier,
            colors,
            edges,
            index,
        })
    }

    pub fn carrier(&self) -> &Graph {
        &self.carrier
    }
    pub fn color(&self, d: Dir) -> Color {
        self.colors[d.index()]
    }
    pub fn colors(&self) -> &[Color] {
        &self.colors
    }
    pub fn colored_edges(&self) -> &BTreeMap<Turn, Color> {
        &self.edges
    }
    pub fn index(&self) -> HalfInt {
        self.index
    }
    pub fn rank(&self) -> i64 {
        self.carrier.betti()
    }
    pub fn red_vertices(&self) -> Vec<Dir> {
        self.carrier
            .dirs()
            .filter(|&d| self.color(d) == Color::Red)
            .collect()
    }
    pub fn purple_vertices(&self) -> Vec<Dir> {
        self.carrier
            .dirs()
            .filter(|&d| self.color(d) == Color::Purple)
            .collect()
    }
    pub fn red_edges(&self) -> Vec<Turn> {
        self.edges
            .iter()
            .filter(|(_, &c)| c == Color::Red)
            .map(|(&t, _)| t)
            .collect()
    }
    pub fn purple_edges(&self) -> Vec<Turn> {
        self.edges
            .iter()
            .filter(|(_, &c)| c == Color::Purple)
            .map(|(&t, _)| t)
            .collect()
    }
    pub fn has_colored_edge(&self, t: Turn) -> bool {
        self.edges.contains_key(&t)
    }

    /// The colored edges at vertex `v` as a graph on the directions at `v`.
    pub fn local_whitehead(&self, v: usize) -> SimpleGraph {
        let dirs = self.carrier.directions_at(v);
        let mut g = SimpleGraph::new(dirs.iter().map(|&d| self.carrier.dir_name(d)).collect());
        for (i, &a) in dirs.iter().enumerate() {
            for (j, &b) in dirs.iter().enumerate() {
                if i < j && self.edges.contains_key(&Turn::new(a, b)) {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    /// Purple vertices and purple edges.
    pub fn ideal_whitehead(&self) -> SimpleGraph {
        let purple = self.purple_vertices();
        let mut g = SimpleGraph::new(purple.iter().map(|&d| self.carrier.dir_name(d)).collect());
        for (t, &c) in &self.edges {
            if c == Color::Purple {
                if let (Some(i), Some(j)) = (
                    purple.iter().position(|&d| d == t.0),
                    purple.iter().position(|&d| d == t.1),
                ) {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    /// Component id of each direction in the colored subgraph.
    pub fn colored_components(&self) -> Vec<usize> {
        let n = self.carrier.num_dirs();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let nx = p[y];
                p[y] = r;
                y = nx;
            }
            r
        }
        for t in self.edges.keys() {
            let (a, b) = (
                find(&mut parent, t.0.index()),
                find(&mut parent, t.1.index()),
            );
            parent[a] = b;
        }
        (0..n).map(|x| find(&mut parent, x)).collect()
    }

    /// Axioms (ltt-i)–(ltt-vi) and color coherence.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let g = &self.carrier;
        if self.colors.len() != g.num_dirs() {
            out.push(violation(
                "ltt-i",
                "color list does not match the direction set",
            ));
        }
        let reds = self.red_vertices().len() as i64;
        let expected = self.index.twice() + 2 * (self.rank() - 1);
        if reds != expected {
            out.push(violation(
                "ltt-ii",
                format!(
                    "{reds} red vertices, expected 2(I + r - 1) with I = {} and r = {}",
                    self.index,
                    self.rank()
                ),
            ));
        }
        let red_degree = |d: Dir| {
            self.edges
                .iter()
                .filter(|(t, &c)| c == Color::Red && t.contains(d))
                .count()
        };
        if !self.red_vertices().into_iter().any(|d| red_degree(d) == 1) {
            out.push(violation(
                "ltt-iii",
                "no red vertex lies in exactly one red edge",
            ));
        }
        if g.num_edges() == 0 {
            out.push(violation("ltt-iv", "carrier has no edges"));
        }
        for &t in self.edges.keys() {
            if t.is_degenerate() {
                out.push(violation(
                    "ltt-v",
                    format!("colored edge {} is a loop", g.turn_name(t)),
                ));
            } else if g.init(t.0) != g.init(t.1) {
                out.push(violation(
                    "ltt-v",
                    format!(
                        "colored edge {} joins directions at different vertices",
                        g.turn_name(t)
                    ),
                ));
            }
        }
        for d in g.dirs() {
            if !self.edges.keys().any(|t| t.contains(d)) {
                out.push(violation(
                    "ltt-v",
                    format!("vertex {} lies in no colored edge", g.dir_name(d)),
                ));
            }
        }
        for v in 0..g.num_vertices() {
            if !self.local_whitehead(v).is_connected() {
                out.push(violation(
                    "ltt-vi",
                    format!(
                        "local Whitehead graph at {} is disconnected",
                        g.vertex_name(v)
                    ),
                ));
            }
        }
        for (&t, &c) in &self.edges {
            let has_red = self.color(t.0) == Color::Red || self.color(t.1) == Color::Red;
            if has_red != (c == Color::Red) {
                out.push(violation(
                    "coherence",
                    format!("colored edge {} has color {c:?}", g.turn_name(t)),
                ));
            }
        }
        out
    }

    /// [`validate`](Self::validate) plus (ltt-vii)–(ltt-ix).
    pub fn validate_lone_axis(&self) -> Vec<Violation> {
        let mut out = self.validate();
        let reds = self.red_vertices();
        if reds.len() != 1 {
            out.push(violation(
                "ltt-vii",
                format!("{} red vertices, expected exactly one", reds.len()),
            ));
        }
        let want = HalfInt::from_twice(3 - 2 * self.rank());
        if self.index != want {
            out.push(violation(
                "ltt-viii",
                format!("index {} differs from 3/2 - r = {want}", self.index),
            ));
        }
        let iw = self.ideal_whitehead();
        for comp in iw.components() {
            if let Some(v) = iw.induced(&comp).cut_vertex() {
                out.push(violation(
                    "ltt-ix",
                    format!("component of IW has cut vertex {}", iw.labels[comp[v]]),
                ));
            }
        }
        if self.red_edges().len() != 1 {
            out.push(violation(
                "ltt-vii",
                format!("{} red edges, expected exactly one", self.red_edges().len()),
            ));
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// Conditions (tt-pff-i)–(tt-pff-iv) for folding `e` over `e2`.
    pub fn tt_friendly_pff_check(&self, e: Dir, e2: Dir) -> FoldCheck {
        let g = &self.carrier;
        let fail = |c: &'static str, r: String| FoldCheck {
            ok: false,
            failed: Some(c),
            reason: r,
        };
        if e.index() >= g.num_dirs() || e2.index() >= g.num_dirs() || e == e2 {
            return fail(
                "tt-pff-iv",
                "directions must be distinct directions of the carrier".into(),
            );
        }
        let comp = self.colored_components();
        if comp[e.index()] != comp[e2.index()] {
            return fail(
                "tt-pff-i",
                format!(
                    "{} and {} lie in different colored components",
                    g.dir_name(e),
                    g.dir_name(e2)
                ),
            );
        }
        if self.color(e) != Color::Red && self.color(e2) != Color::Red {
            return fail(
                "tt-pff-ii",
                format!("{} and {} are both purple", g.dir_name(e), g.dir_name(e2)),
            );
        }
        if self.has_colored_edge(Turn::new(e, e2)) {
            return fail(
                "tt-pff-iii",
                format!("[{}, {}] is a colored edge", g.dir_name(e2), g.dir_name(e)),
            );
        }
        if e2.rev() == e {
            return fail("tt-pff-iii", "the directions are inverse".into());
        }
        if let Err(err) = Fold::new(e, e2).apply_graph(g) {
            return fail("tt-pff-iv", err.to_string());
        }
        FoldCheck {
            ok: true,
            failed: None,
            reason: String::new(),
        }
    }

    /// The structure induced on the folded carrier.
    pub fn pff_action(&self, fold: Fold) -> Result<LttStructure> {
        let (e1, e2) = (fold.folded, fold.over);
        if self.color(e1) != Color::Red && self.color(e2) != Color::Red {
            return Err(Error::Precondition(format!(
                "neither {} nor {} is red",
                self.carrier.dir_name(e1),
                self.carrier.dir_name(e2)
            )));
        }
        let carrier = fold.apply_graph(&self.carrier)?;
        let mut colors = self.colors.clone();
        if self.color(e1) == Color::Purple {
            colors[e1.index()] = Color::Red;
            colors[e2.index()] = Color::Purple;
        }
        let mut turns = BTreeSet::new();
        for &t in self.edges.keys() {
            let t2 = t.map(|d| fold.dir_image(d));
            if t2.is_degenerate() {
                return Err(Error::Precondition(format!(
                    "colored edge {} collapses under the fold",
                    self.carrier.turn_name(t)
                )));
            }
            turns.insert(t2);
        }
        turns.insert(fold.taken_turn());
        let edges = color_turns(&colors, turns);
        LttStructure::new(carrier, colors, edges, self.index)
    }

    /// Relabel by a graph isomorphism of the carrier.
    pub fn symmetry_action(&self, sigma: &EdgePermutation) -> Result<LttStructure> {
        let carrier = sigma.apply_to_graph(&self.carrier)?;
        let mut colors = vec![Color::Purple; self.colors.len()];
        for d in self.carrier.dirs() {
            colors[sigma.apply(d).index()] = self.color(d);
        }
        let edges = self
            .edges
            .iter()
            .map(|(t, &c)| (t.map(|d| sigma.apply(d)), c))
            .collect();
        LttStructure::new(carrier, colors, edges, self.index)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let g = &self.carrier;
        json!({
            "schema": "traintrack.ltt/1",
            "carrier": g.to_json(),
            "red": self.red_vertices().iter().map(|&d| g.dir_name(d)).collect::<Vec<_>>(),
            "edges": self.edges.iter().map(|(&t, c)| json!({
                "turn": [g.dir_name(t.0), g.dir_name(t.1)],
                "color": c,
            })).collect::<Vec<_>>(),
            "index": self.index,
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        #[derive(Deserialize)]
        struct EdgeJ {
            turn: [String; 2],
            color: Color,
        }
        #[derive(Deserialize)]
        struct LttJ {
            carrier: serde_json::Value,
            red: Vec<String>,
            edges: Vec<EdgeJ>,
            index: HalfInt,
        }
        let j: LttJ = serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        let carrier = Graph::from_json(&j.carrier)?;
        let mut colors = vec![Color::Purple; carrier.num_dirs()];
        for r in &j.red {
            let d = carrier.parse_dir(r)?;
            if colors[d.index()] == Color::Red {
                return Err(Error::InvalidLtt(format!("direction {r} listed twice")));
            }
            colors[d.index()] = Color::Red;
        }
        let mut edges = BTreeMap::new();
        for e in &j.edges {
            let t = Turn::new(
                carrier.parse_dir(&e.turn[0])?,
                carrier.parse_dir(&e.turn[1])?,
            );
            if edges.insert(t, e.color).is_some() {
                return Err(Error::InvalidLtt(format!(
                    "parallel colored edges {}",
                    carrier.turn_name(t)
                )));
            }
        }
        LttStructure::new(carrier, colors, edges, j.index)
    }

    /// Graphviz rendering: direction vertices, bold black edges, colored turn edges.
    pub fn to_dot(&self, name: &str) -> String {
        let g = &self.carrier;
        let mut s = format!("graph \"{name}\" {{\n  node [shape=circle];\n");
        for d in g.dirs() {
            let c = match self.color(d) {
                Color::Red => "red",
                Color::Purple => "purple",
            };
            s += &format!("  \"{}\" [color={c}];\n", g.dir_name(d));
        }
        for e in 0..g.num_edges() {
            let d = Dir::pos(e);
            s += &format!(
                "  \"{}\" -- \"{}\" [color=black, style=bold];\n",
                g.dir_name(d),
                g.dir_name(d.rev())
            );
        }
        for (t, c) in &self.edges {
            let c = match c {
                Color::Red => "red",
                Color::Purple => "purple",
            };
            s += &format!(
                "  \"{}\" -- \"{}\" [color={c}];\n",
                g.dir_name(t.0),
                g.dir_name(t.1)
            );
        }
        s + "}\n"
    }
}

/// Red exactly when some endpoint is red.
pub(crate) fn color_turns(
    colors: &[Color],
    turns: impl IntoIterator<Item = Turn>,
) -> BTreeMap<Turn, Color> {
    turns
        .into_iter()
        .map(|t| {
            let c = if colors[t.0.index()] == Color::Red || colors[t.1.index()] == Color::Red {
                Color::Red
            } else {
                Color::Purple
            };
            (t, c)
        })
        .collect()
}

/// The structure of a train track map without periodic Nielsen paths: purple vertices are the
/// periodic directions and colored edges are the turns taken by iterates.
pub fn ltt_of_map(g: &GraphMap, pnp_free: &PnpFree) -> Result<LttStructure> {
    if pnp_free.map() != g {
        return Err(Error::InvalidCertificate(
            "certificate was issued for a different map".into(),
        ));
    }
    let gd = gates_and_illegal_turns(g)?;
    let turns: BTreeSet<Turn> = taken_turns_infinity(g)?
        .into_iter()
        .filter(|t| !t.is_degenerate())
        .collect();
    let colors: Vec<Color> = g
        .domain()
        .dirs()
        .map(|d| {
            if gd.is_periodic_dir(d) {
                Color::Purple
            } else {
                Color::Red
            }
        })
        .collect();
    let index = whitehead_from_parts(g, &gd, &turns)?.index_sum;
    let edges = color_turns(&colors, turns);
    LttStructure::new(g.domain().clone(), colors, edges, index)
}

#[cfg(test)]
mod tests;
