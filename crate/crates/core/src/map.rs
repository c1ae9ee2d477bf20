//! Graph maps, signed edge permutations and the map DSL.

use serde_json::json;

use crate::error::{Error, Result};
use crate::graph::{valid_edge_name, Dir, EdgePath, Graph};

/// A cellular map sending vertices to vertices and each edge to a nonempty edge path.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GraphMap {
    domain: Graph,
    codomain: Graph,
    vertex_map: Vec<usize>,
    images: Vec<EdgePath>,
}

impl GraphMap {
    pub fn new(
        domain: Graph,
        codomain: Graph,
        vertex_map: Vec<usize>,
        images: Vec<EdgePath>,
    ) -> Result<Self> {
        if vertex_map.len() != domain.num_vertices() || images.len() != domain.num_edges() {
            return Err(Error::InvalidMap("size mismatch with domain".into()));
        }
        if vertex_map.iter().any(|&v| v >= codomain.num_vertices()) {
            return Err(Error::InvalidMap("vertex image out of range".into()));
        }
        for (e, img) in images.iter().enumerate() {
            let name = domain.edge_name(e);
            if img.is_empty() {
                return Err(Error::InvalidMap(format!("image of {name} is empty")));
            }
            if img.0.iter().any(|d| d.edge() >= codomain.num_edges()) {
                return Err(Error::InvalidMap(format!(
                    "image of {name} uses an unknown edge"
                )));
            }
            if !img.is_contiguous(&codomain) {
                return Err(Error::InvalidMap(format!(
                    "image of {name} is not an edge path"
                )));
            }
            let (a, b) = domain.ends()[e];
            if codomain.init(img.first().unwrap()) != vertex_map[a]
                || codomain.term(img.last().unwrap()) != vertex_map[b]
            {
                return Err(Error::InvalidMap(format!(
                    "image of {name} does not match the vertex map"
                )));
            }
        }
        Ok(GraphMap {
            domain,
            codomain,
            vertex_map,
            images,
        })
    }

    /// Build a map inferring the vertex map from the first letters of edge images.
    pub fn from_images(domain: Graph, codomain: Graph, images: Vec<EdgePath>) -> Result<Self> {
        let mut vm = vec![usize::MAX; domain.num_vertices()];
        for (e, img) in images.iter().enumerate() {
            let (Some(f), Some(l)) = (img.first(), img.last()) else {
                return Err(Error::InvalidMap(format!(
                    "image of {} is empty",
                    domain.edge_name(e)
                )));
            };
            if f.edge() >= codomain.num_edges() || l.edge() >= codomain.num_edges() {
                return Err(Error::InvalidMap("image uses an unknown edge".into()));
            }
            let (a, b) = domain.ends()[e];
            for (v, w) in [(a, codomain.init(f)), (b, codomain.term(l))] {
                if vm[v] == usize::MAX {
                    vm[v] = w;
                } else if vm[v] != w {
                    return Err(Error::InvalidMap(format!(
                        "inconsistent image of vertex {}",
                        domain.vertex_name(v)
                    )));
                }
            }
        }
        if vm.contains(&usize::MAX) {
            return Err(Error::InvalidMap("isolated vertex".into()));
        }
        GraphMap::new(domain, codomain, vm, images)
    }

    pub fn identity(g: &Graph) -> Self {
        GraphMap {
            domain: g.clone(),
            codomain: g.clone(),
            vertex_map: (0..g.num_vertices()).collect(),
            images: (0..g.num_edges())
                .map(|e| EdgePath::single(Dir::pos(e)))
                .collect(),
        }
    }

    pub fn domain(&self) -> &Graph {
        &self.domain
    }
    pub fn codomain(&self) -> &Graph {
        &self.codomain
    }
    pub fn vertex_map(&self) -> &[usize] {
        &self.vertex_map
    }
    pub fn images(&self) -> &[EdgePath] {
        &self.images
    }

    pub fn is_self_map(&self) -> bool {
        self.domain == self.codomain
    }

    pub(crate) fn require_self_map(&self) -> Result<()> {
        if self.is_self_map() {
            Ok(())
        } else {
            Err(Error::InvalidMap("expected a self-map".into()))
        }
    }

    /// Image of an oriented edge.
    pub fn image(&self, d: Dir) -> EdgePath {
        let p = &self.images[d.edge()];
        if d.is_reversed() {
            p.reversed()
        } else {
            p.clone()
        }
    }

    /// Image of a path by concatenation, without tightening.
    pub fn apply(&self, p: &EdgePath) -> EdgePath {
        let mut out = Vec::new();
        for &d in &p.0 {
            out.extend(self.image(d).0);
        }
        EdgePath(out)
    }

    /// `self ∘ g`. Raw concatenation of images.
    pub fn compose(&self, g: &GraphMap) -> Result<GraphMap> {
        if g.codomain != self.domain {
            return Err(Error::InvalidMap(
                "composition: codomain and domain differ".into(),
            ));
        }
        Ok(GraphMap {
            domain: g.domain.clone(),
            codomain: self.codomain.clone(),
            vertex_map: g.vertex_map.iter().map(|&v| self.vertex_map[v]).collect(),
            images: g.images.iter().map(|p| self.apply(p)).collect(),
        })
    }

    pub fn power(&self, k: usize) -> Result<GraphMap> {
        self.require_self_map()?;
        let mut out = GraphMap::identity(&self.domain);
        for _ in 0..k {
            out = self.compose(&out)?;
        }
        Ok(out)
    }

    /// Tighten each edge image.
    pub fn tightened(&self) -> Result<GraphMap> {
        let images: Vec<EdgePath> = self.images.iter().map(|p| p.tighten()).collect();
        GraphMap::new(
            self.domain.clone(),
            self.codomain.clone(),
            self.vertex_map.clone(),
            images,
        )
    }

    pub fn is_tight(&self) -> bool {
        self.images.iter().all(|p| p.is_tight())
    }

    /// First-letter map on directions, indexed by direction.
    pub fn direction_map(&self) -> Vec<Dir> {
        self.domain
            .dirs()
            .map(|d| self.image(d).first().unwrap())
            .collect()
    }

    pub fn dir_image(&self, d: Dir) -> Dir {
        let p = &self.images[d.edge()];
        if d.is_reversed() {
            p.last().unwrap().rev()
        } else {
            p.first().unwrap()
        }
    }

    /// Total length of all edge images.
    pub fn size(&self) -> usize {
        self.images.iter().map(|p| p.len()).sum()
    }

    /// `a->cbca;b->cbc;c->ac`.
    pub fn to_dsl(&self) -> String {
        (0..self.domain.num_edges())
            .map(|e| {
                format!(
                    "{}->{}",
                    self.domain.edge_name(e),
                    self.codomain.path_name(&self.images[e])
                )
            })
            .collect::<Vec<_>>()
            .join(";")
    }

    pub fn to_json(&self) -> serde_json::Value {
        let images: serde_json::Map<String, serde_json::Value> = (0..self.domain.num_edges())
            .map(|e| {
                (
                    self.domain.edge_name(e).to_string(),
                    json!(self.codomain.path_name(&self.images[e])),
                )
            })
            .collect();
        json!({
            "domain": self.domain.to_json(),
            "codomain": self.codomain.to_json(),
            "vertex_map": self.vertex_map.iter().map(|&v| self.codomain.vertex_name(v)).collect::<Vec<_>>(),
            "images": images,
        })
    }
}

/// Parse `a->cbca;b->cbc;c->ac` on a given carrier, or on the rose spanned by the listed letters.
pub fn parse_map(text: &str, carrier: Option<&Graph>) -> Result<GraphMap> {
    let mut names = Vec::new();
    let mut words = Vec::new();
    for clause in text.split(';').map(str::trim).filter(|c| !c.is_empty()) {
        let (lhs, rhs) = clause
            .split_once("->")
            .ok_or_else(|| Error::Parse(format!("expected `x->word` in {clause:?}")))?;
        let lhs = lhs.trim();
        if !valid_edge_name(lhs) {
            return Err(Error::Parse(format!("bad edge name {lhs:?}")));
        }
        if names.iter().any(|n| n == lhs) {
            return Err(Error::Parse(format!("edge {lhs} listed twice")));
        }
        names.push(lhs.to_string());
        words.push(rhs.trim().to_string());
    }
    let g = match carrier {
        Some(g) => g.clone(),
        None => {
            let refs: Vec<&str> = names.iter().map(String::as_str).collect();
            Graph::rose(&refs)?
        }
    };
    if names.len() != g.num_edges() {
        return Err(Error::Parse(format!(
            "expected images for {} edges, got {}",
            g.num_edges(),
            names.len()
        )));
    }
    let mut images = vec![EdgePath::default(); g.num_edges()];
    for (n, w) in names.iter().zip(&words) {
        let e = g
            .edge_by_name(n)
            .ok_or_else(|| Error::Parse(format!("unknown edge {n}")))?;
        images[e] = g.parse_word(w)?;
    }
    GraphMap::from_images(g.clone(), g, images)
}

/// A graph isomorphism sending each edge to a single oriented edge.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgePermutation {
    edges: Vec<Dir>,
    vertices: Vec<usize>,
}

impl EdgePermutation {
    pub fn new(edges: Vec<Dir>, vertices: Vec<usize>) -> Result<Self> {
        let n = edges.len();
        let mut seen = vec![false; n];
        for d in &edges {
            if d.edge() >= n || std::mem::replace(&mut seen[d.edge()], true) {
                return Err(Error::InvalidMap(
                    "edge images do not form a permutation".into(),
                ));
            }
        }
        let mut seen = vec![false; vertices.len()];
        for &v in &vertices {
            if v >= vertices.len() || std::mem::replace(&mut seen[v], true) {
                return Err(Error::InvalidMap(
                    "vertex images do not form a permutation".into(),
                ));
            }
        }
        Ok(EdgePermutation { edges, vertices })
    }

    pub fn identity(num_edges: usize, num_vertices: usize) -> Self {
        EdgePermutation {
            edges: (0..num_edges).map(Dir::pos).collect(),
            vertices: (0..num_vertices).collect(),
        }
    }

    /// Signed permutation on a rose.
    pub fn on_rose(edges: Vec<Dir>) -> Result<Self> {
        EdgePermutation::new(edges, vec![0])
    }

    pub fn is_identity(&self) -> bool {
        self.edges
            .iter()
            .enumerate()
            .all(|(i, d)| *d == Dir::pos(i))
            && self.vertices.iter().enumerate().all(|(i, &v)| i == v)
    }

    pub fn edges(&self) -> &[Dir] {
        &self.edges
    }
    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn apply(&self, d: Dir) -> Dir {
        let x = self.edges[d.edge()];
        if d.is_reversed() {
            x.rev()
        } else {
            x
        }
    }

    pub fn apply_vertex(&self, v: usize) -> usize {
        self.vertices[v]
    }

    pub fn inverse(&self) -> Self {
        let mut edges = vec![Dir(0); self.edges.len()];
        for (i, &d) in self.edges.iter().enumerate() {
            edges[d.edge()] = Dir::new(i, d.is_reversed());
        }
        let mut vertices = vec![0; self.vertices.len()];
        for (i, &v) in self.vertices.iter().enumerate() {
            vertices[v] = i;
        }
        EdgePermutation { edges, vertices }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &EdgePermutation) -> Self {
        EdgePermutation {
            edges: other.edges.iter().map(|&d| self.apply(d)).collect(),
            vertices: other.vertices.iter().map(|&v| self.vertices[v]).collect(),
        }
    }

    /// The relabeled graph `σ(Γ)`, on which `σ` is the identity of labels.
    pub fn apply_to_graph(&self, g: &Graph) -> Result<Graph> {
        if g.num_edges() != self.edges.len() || g.num_vertices() != self.vertices.len() {
            return Err(Error::InvalidMap(
                "permutation size differs from graph".into(),
            ));
        }
        let mut ends = vec![(0, 0); g.num_edges()];
        for (i, &d) in self.edges.iter().enumerate() {
            let (a, b) = g.ends()[i];
            let (a, b) = (self.vertices[a], self.vertices[b]);
            ends[d.edge()] = if d.is_reversed() { (b, a) } else { (a, b) };
        }
        Ok(g.with_ends(ends))
    }

    /// The isomorphism `Γ → σ(Γ)` as a graph map.
    pub fn to_map(&self, g: &Graph) -> Result<GraphMap> {
        let target = self.apply_to_graph(g)?;
        GraphMap::new(
            g.clone(),
            target,
            self.vertices.clone(),
            self.edges.iter().map(|&d| EdgePath::single(d)).collect(),
        )
    }

    /// Recover a permutation from a map whose edge images are single edges forming a bijection.
    pub fn from_map(m: &GraphMap) -> Option<Self> {
        if m.images().iter().any(|p| p.len() != 1)
            || m.domain().num_vertices() != m.codomain().num_vertices()
        {
            return None;
        }
        let p = EdgePermutation::new(
            m.images().iter().map(|p| p.0[0]).collect(),
            m.vertex_map().to_vec(),
        )
        .ok()?;
        (p.apply_to_graph(m.domain()).ok()? == *m.codomain()).then_some(p)
    }

    /// `b->B` or `a->b;b->a`; unlisted edges are fixed.
    pub fn parse(text: &str, g: &Graph) -> Result<Self> {
        let mut edges: Vec<Dir> = (0..g.num_edges()).map(Dir::pos).collect();
        for clause in text.split(';').map(str::trim).filter(|c| !c.is_empty()) {
            let (lhs, rhs) = clause
                .split_once("->")
                .ok_or_else(|| Error::Parse(format!("expected `x->y` in {clause:?}")))?;
            let l = g.parse_dir(lhs.trim())?;
            let r = g.parse_dir(rhs.trim())?;
            if l.is_reversed() {
                edges[l.edge()] = r.rev();
            } else {
                edges[l.edge()] = r;
            }
        }
        let images: Vec<EdgePath> = edges.iter().map(|&d| EdgePath::single(d)).collect();
        let m = GraphMap::from_images(g.clone(), g.clone(), images)
            .map_err(|e| Error::Parse(format!("permutation is not a graph automorphism: {e}")))?;
        EdgePermutation::new(edges, m.vertex_map().to_vec())
    }

    pub fn to_dsl(&self, g: &Graph) -> String {
        self.edges
            .iter()
            .enumerate()
            .filter(|(i, d)| **d != Dir::pos(*i))
            .map(|(i, &d)| format!("{}->{}", g.edge_name(i), g.dir_name(d)))
            .collect::<Vec<_>>()
            .join(";")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        let f = parse_map("a->cbca;b->cbc;c->ac", None).unwrap();
        assert_eq!(f.to_dsl(), "a->cbca;b->cbc;c->ac");
        assert_eq!(f.size(), 9);
        assert!(f.is_self_map());
    }

    #[test]
    fn composition_is_raw() {
        let f = parse_map("a->ab;b->B", None).unwrap();
        let g = parse_map("a->aB;b->b", None).unwrap();
        let fg = f.compose(&g).unwrap();
        assert_eq!(fg.to_dsl(), "a->abb;b->B");
        let gf = g.compose(&f).unwrap();
        assert_eq!(gf.to_dsl(), "a->aBb;b->B");
        assert!(!gf.is_tight());
        assert_eq!(gf.tightened().unwrap().to_dsl(), "a->a;b->B");
    }

    #[test]
    fn direction_map_of_reversed() {
        let f = parse_map("a->cbca;b->cbc;c->ac", None).unwrap();
        let g = f.domain();
        let dm = f.direction_map();
        let name = |d: Dir| g.dir_name(d);
        let got: Vec<String> = g
            .dirs()
            .map(|d| format!("{}>{}", name(d), name(dm[d.index()])))
            .collect();
        assert_eq!(got, vec!["a>c", "A>A", "b>c", "B>C", "c>a", "C>C"]);
    }

    #[test]
    fn theta_map_vertex_inference() {
        let theta = Graph::new(
            vec!["p".into(), "q".into()],
            vec!["a".into(), "b".into(), "c".into()],
            vec![(0, 1); 3],
        )
        .unwrap();
        let m = parse_map("a->a;b->aBc;c->c", Some(&theta)).unwrap();
        assert_eq!(m.vertex_map(), &[0, 1]);
        assert!(parse_map("a->A;b->b;c->c", Some(&theta)).is_err());
    }

    #[test]
    fn permutation_roundtrip() {
        let g = Graph::standard_rose(3);
        let s = EdgePermutation::parse("a->B;b->c;c->a", &g).unwrap();
        assert_eq!(s.compose(&s.inverse()), EdgePermutation::identity(3, 1));
        assert_eq!(s.to_dsl(&g), "a->B;b->c;c->a");
        let m = s.to_map(&g).unwrap();
        assert_eq!(EdgePermutation::from_map(&m), Some(s));
    }
}
