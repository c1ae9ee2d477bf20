//! Finite connected graphs with oriented edges, directions, turns and edge paths.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An oriented edge. Bit 0 records reversal, the rest is the edge index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Dir(pub u32);

impl Dir {
    pub fn new(edge: usize, reversed: bool) -> Self {
        Dir(((edge as u32) << 1) | reversed as u32)
    }
    pub fn pos(edge: usize) -> Self {
        Dir::new(edge, false)
    }
    pub fn edge(self) -> usize {
        (self.0 >> 1) as usize
    }
    pub fn is_reversed(self) -> bool {
        self.0 & 1 == 1
    }
    pub fn rev(self) -> Self {
        Dir(self.0 ^ 1)
    }
    pub fn index(self) -> usize {
        self.0 as usize
    }
    pub fn from_index(i: usize) -> Self {
        Dir(i as u32)
    }
}

/// Unordered pair of directions. Stored with the smaller direction first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Turn(pub Dir, pub Dir);

impl Turn {
    pub fn new(a: Dir, b: Dir) -> Self {
        if a <= b {
            Turn(a, b)
        } else {
            Turn(b, a)
        }
    }
    pub fn is_degenerate(self) -> bool {
        self.0 == self.1
    }
    pub fn contains(self, d: Dir) -> bool {
        self.0 == d || self.1 == d
    }
    /// The other direction of the turn, if `d` belongs to it.
    pub fn other(self, d: Dir) -> Option<Dir> {
        if self.0 == d {
            Some(self.1)
        } else if self.1 == d {
            Some(self.0)
        } else {
            None
        }
    }
    pub fn map(self, f: impl Fn(Dir) -> Dir) -> Self {
        Turn::new(f(self.0), f(self.1))
    }
}

/// A finite graph with labeled vertices and edges. Edge `i` runs from `ends[i].0` to `ends[i].1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Graph {
    vertex_names: Vec<String>,
    edge_names: Vec<String>,
    ends: Vec<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    vertices: Vec<String>,
    edges: Vec<EdgeJson>,
}

#[derive(Serialize, Deserialize)]
struct EdgeJson {
    id: String,
    from: String,
    to: String,
}

impl Graph {
    pub fn new(
        vertex_names: Vec<String>,
        edge_names: Vec<String>,
        ends: Vec<(usize, usize)>,
    ) -> Result<Self> {
        if edge_names.len() != ends.len() {
            return Err(Error::InvalidGraph(
                "edge name count differs from edge count".into(),
            ));
        }
        if vertex_names.is_empty() {
            return Err(Error::InvalidGraph("graph has no vertices".into()));
        }
        for &(a, b) in &ends {
            if a >= vertex_names.len() || b >= vertex_names.len() {
                return Err(Error::InvalidGraph("edge endpoint out of range".into()));
            }
        }
        for (i, n) in edge_names.iter().enumerate() {
            if !valid_edge_name(n) {
                return Err(Error::InvalidGraph(format!(
                    "edge name {n:?} must be a lowercase letter optionally followed by digits"
                )));
            }
            if edge_names[..i].contains(n) {
                return Err(Error::InvalidGraph(format!("duplicate edge name {n}")));
            }
        }
        for (i, n) in vertex_names.iter().enumerate() {
            if vertex_names[..i].contains(n) {
                return Err(Error::InvalidGraph(format!("duplicate vertex name {n}")));
            }
        }
        let g = Graph {
            vertex_names,
            edge_names,
            ends,
        };
        if !g.is_connected() {
            return Err(Error::InvalidGraph("graph is not connected".into()));
        }
        Ok(g)
    }

    /// The rose with one vertex `v` and the given petals.
    pub fn rose(names: &[&str]) -> Result<Self> {
        Graph::new(
            vec!["v".to_string()],
            names.iter().map(|s| s.to_string()).collect(),
            vec![(0, 0); names.len()],
        )
    }

    /// The rose of rank `r` with petals `a, b, c, ...` (or `e1, e2, ...` beyond 26).
    pub fn standard_rose(r: usize) -> Self {
        let names: Vec<String> = (0..r)
            .map(|i| {
                if r <= 26 {
                    ((b'a' + i as u8) as char).to_string()
                } else {
                    format!("e{}", i + 1)
                }
            })
            .collect();
        Graph {
            vertex_names: vec!["v".into()],
            edge_names: names,
            ends: vec![(0, 0); r],
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.vertex_names.len()
    }
    pub fn num_edges(&self) -> usize {
        self.ends.len()
    }
    pub fn num_dirs(&self) -> usize {
        2 * self.ends.len()
    }
    pub fn dirs(&self) -> impl Iterator<Item = Dir> {
        (0..self.num_dirs()).map(Dir::from_index)
    }
    pub fn ends(&self) -> &[(usize, usize)] {
        &self.ends
    }
    pub fn vertex_names(&self) -> &[String] {
        &self.vertex_names
    }
    pub fn edge_names(&self) -> &[String] {
        &self.edge_names
    }
    pub fn vertex_name(&self, v: usize) -> &str {
        &self.vertex_names[v]
    }
    pub fn edge_name(&self, e: usize) -> &str {
        &self.edge_names[e]
    }

    pub fn init(&self, d: Dir) -> usize {
        let (a, b) = self.ends[d.edge()];
        if d.is_reversed() {
            b
        } else {
            a
        }
    }
    pub fn term(&self, d: Dir) -> usize {
        self.init(d.rev())
    }

    /// Directions whose initial vertex is `v`.
    pub fn directions_at(&self, v: usize) -> Vec<Dir> {
        self.dirs().filter(|&d| self.init(d) == v).collect()
    }

    pub fn valence(&self, v: usize) -> usize {
        self.dirs().filter(|&d| self.init(d) == v).count()
    }

    pub fn min_valence(&self) -> usize {
        (0..self.num_vertices())
            .map(|v| self.valence(v))
            .min()
            .unwrap_or(0)
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.num_vertices() as i64 - self.num_edges() as i64
    }

    /// Rank of the fundamental group.
    pub fn betti(&self) -> i64 {
        1 - self.euler_characteristic()
    }

    pub fn is_rose(&self) -> bool {
        self.num_vertices() == 1
    }

    fn is_connected(&self) -> bool {
        let n = self.num_vertices();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &(a, b) in &self.ends {
                for (x, y) in [(a, b), (b, a)] {
                    if x == v && !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Same graph with edge `e` re-attached to new endpoints.
    pub(crate) fn with_ends(&self, ends: Vec<(usize, usize)>) -> Self {
        Graph {
            vertex_names: self.vertex_names.clone(),
            edge_names: self.edge_names.clone(),
            ends,
        }
    }

    /// All turns at all vertices, degenerate ones excluded.
    pub fn all_turns(&self) -> Vec<Turn> {
        let mut out = Vec::new();
        for a in self.dirs() {
            for b in self.dirs() {
                if a < b && self.init(a) == self.init(b) {
                    out.push(Turn(a, b));
                }
            }
        }
        out
    }

    pub fn edge_by_name(&self, name: &str) -> Option<usize> {
        self.edge_names.iter().position(|n| n == name)
    }

    pub fn vertex_by_name(&self, name: &str) -> Option<usize> {
        self.vertex_names.iter().position(|n| n == name)
    }

    /// Display name of a direction: the edge name, uppercased when reversed.
    pub fn dir_name(&self, d: Dir) -> String {
        let n = &self.edge_names[d.edge()];
        if d.is_reversed() {
            n.to_uppercase()
        } else {
            n.clone()
        }
    }

    pub fn turn_name(&self, t: Turn) -> String {
        format!("{{{},{}}}", self.dir_name(t.0), self.dir_name(t.1))
    }

    pub fn path_name(&self, p: &EdgePath) -> String {
        p.0.iter().map(|&d| self.dir_name(d)).collect()
    }

    /// Parse a direction name: `a`, `A`, `a\u{305}` or `e12`, `E12`.
    pub fn parse_dir(&self, s: &str) -> Result<Dir> {
        let toks = tokenize_dirs(s)?;
        match toks.as_slice() {
            [(name, rev)] => {
                let e = self
                    .edge_by_name(name)
                    .ok_or_else(|| Error::Parse(format!("unknown edge {name}")))?;
                Ok(Dir::new(e, *rev))
            }
            _ => Err(Error::Parse(format!(
                "expected a single direction, got {s:?}"
            ))),
        }
    }

    /// Parse a word such as `cbcA` into an edge path. Does not check contiguity.
    pub fn parse_word(&self, s: &str) -> Result<EdgePath> {
        let mut out = Vec::new();
        for (name, rev) in tokenize_dirs(s)? {
            let e = self
                .edge_by_name(&name)
                .ok_or_else(|| Error::Parse(format!("unknown edge {name}")))?;
            out.push(Dir::new(e, rev));
        }
        Ok(EdgePath(out))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let g = GraphJson {
            vertices: self.vertex_names.clone(),
            edges: (0..self.num_edges())
                .map(|i| EdgeJson {
                    id: self.edge_names[i].clone(),
                    from: self.vertex_names[self.ends[i].0].clone(),
                    to: self.vertex_names[self.ends[i].1].clone(),
                })
                .collect(),
        };
        serde_json::to_value(g).expect("graph serializes")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let g: GraphJson =
            serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        let find = |n: &str| {
            g.vertices
                .iter()
                .position(|x| x == n)
                .ok_or_else(|| Error::Parse(format!("unknown vertex {n}")))
        };
        let mut ends = Vec::new();
        for e in &g.edges {
            ends.push((find(&e.from)?, find(&e.to)?));
        }
        Graph::new(
            g.vertices.clone(),
            g.edges.iter().map(|e| e.id.clone()).collect(),
            ends,
        )
    }

    /// Two graphs with the same edge labels and vertex count are the same labeled graph.
    pub fn same_labels(&self, other: &Graph) -> bool {
        self.edge_names == other.edge_names
            && self.ends == other.ends
            && self.vertex_names.len() == other.vertex_names.len()
    }
}

pub(crate) fn valid_edge_name(n: &str) -> bool {
    let mut cs = n.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_lowercase()) && cs.all(|c| c.is_ascii_digit())
}

/// Split a word into (edge name, reversed) tokens.
pub(crate) fn tokenize_dirs(s: &str) -> Result<Vec<(String, bool)>> {
    let cs: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if !c.is_ascii_alphabetic() {
            return Err(Error::Parse(format!("unexpected character {c:?} in {s:?}")));
        }
        let mut name = c.to_ascii_lowercase().to_string();
        let mut rev = c.is_ascii_uppercase();
        i += 1;
        while i < cs.len() && cs[i].is_ascii_digit() {
            name.push(cs[i]);
            i += 1;
        }
        while i < cs.len() && matches!(cs[i], '\u{305}' | '\u{304}') {
            rev = !rev;
            i += 1;
        }
        out.push((name, rev));
    }
    Ok(out)
}

/// A finite sequence of directions.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgePath(pub Vec<Dir>);

impl EdgePath {
    pub fn single(d: Dir) -> Self {
        EdgePath(vec![d])
    }
    pub fn len(&self) -> usize {
        self.0.len()
    }
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
    pub fn first(&self) -> Option<Dir> {
        self.0.first().copied()
    }
    pub fn last(&self) -> Option<Dir> {
        self.0.last().copied()
    }
    pub fn reversed(&self) -> Self {
        EdgePath(self.0.iter().rev().map(|d| d.rev()).collect())
    }

    /// Consecutive directions meet: `term(a_i) = init(a_{i+1})`.
    pub fn is_contiguous(&self, g: &Graph) -> bool {
        self.0.windows(2).all(|w| g.term(w[0]) == g.init(w[1]))
    }

    pub fn is_tight(&self) -> bool {
        self.0.windows(2).all(|w| w[1] != w[0].rev())
    }

    /// Free reduction. Cancels adjacent inverse pairs until none remain.
    pub fn tighten(&self) -> Self {
        let mut out: Vec<Dir> = Vec::with_capacity(self.0.len());
        for &d in &self.0 {
            if out.last() == Some(&d.rev()) {
                out.pop();
            } else {
                out.push(d);
            }
        }
        EdgePath(out)
    }

    /// Turns `{ā_i, a_{i+1}}` crossed by the path, degenerate ones included.
    pub fn taken_turns(&self) -> BTreeSet<Turn> {
        self.0
            .windows(2)
            .map(|w| Turn::new(w[0].rev(), w[1]))
            .collect()
    }

    pub fn concat(&self, other: &EdgePath) -> Self {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        EdgePath(v)
    }

    pub fn is_prefix_of(&self, other: &EdgePath) -> bool {
        other.0.starts_with(&self.0)
    }
}

impl fmt::Display for EdgePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.0 {
            write!(f, "{}{}", d.edge(), if d.is_reversed() { "'" } else { "" })?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rose_counts() {
        let g = Graph::standard_rose(3);
        assert_eq!(g.euler_characteristic(), -2);
        assert_eq!(g.betti(), 3);
        assert_eq!(g.directions_at(0).len(), 6);
        assert_eq!(g.all_turns().len(), 15);
    }

    #[test]
    fn theta_graph() {
        let g = Graph::new(
            vec!["p".into(), "q".into()],
            vec!["a".into(), "b".into(), "c".into()],
            vec![(0, 1); 3],
        )
        .unwrap();
        assert_eq!(g.betti(), 2);
        assert_eq!(
            g.directions_at(1),
            vec![Dir::new(0, true), Dir::new(1, true), Dir::new(2, true)]
        );
        let back = Graph::from_json(&g.to_json()).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn disconnected_rejected() {
        let r = Graph::new(vec!["p".into(), "q".into()], vec!["a".into()], vec![(0, 0)]);
        assert!(r.is_err());
    }

    #[test]
    fn parse_words() {
        let g = Graph::standard_rose(3);
        let p = g.parse_word("cbCa\u{305}").unwrap();
        assert_eq!(
            p.0,
            vec![
                Dir::pos(2),
                Dir::pos(1),
                Dir::new(2, true),
                Dir::new(0, true)
            ]
        );
        assert_eq!(g.path_name(&p), "cbCA");
    }

    #[test]
    fn tighten_and_turns() {
        let g = Graph::standard_rose(2);
        let p = g.parse_word("abBAab").unwrap();
        assert_eq!(g.path_name(&p.tighten()), "ab");
        let t = g.parse_word("ab").unwrap().taken_turns();
        assert_eq!(
            t.into_iter().collect::<Vec<_>>(),
            vec![Turn::new(Dir::new(0, true), Dir::pos(1))]
        );
        assert!(g
            .parse_word("aA")
            .unwrap()
            .taken_turns()
            .iter()
            .all(|t| t.is_degenerate()));
    }
}
