//! Proper full folds and decompositions of train track maps into them.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::graph::{Dir, EdgePath, Graph, Turn};
use crate::map::{EdgePermutation, GraphMap};
use crate::train_track::require_train_track;

/// The fold of `folded` over `over`: `folded ↦ over · folded`, every other edge fixed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fold {
    pub folded: Dir,
    pub over: Dir,
}

impl Fold {
    pub fn new(folded: Dir, over: Dir) -> Self {
        Fold { folded, over }
    }

    pub fn validate(&self, g: &Graph) -> Result<()> {
        let (e, e2) = (self.folded, self.over);
        if e.edge() >= g.num_edges() || e2.edge() >= g.num_edges() {
            return Err(Error::InvalidFold("unknown edge".into()));
        }
        if e == e2 {
            return Err(Error::InvalidFold(format!(
                "cannot fold {} over itself",
                g.dir_name(e)
            )));
        }
        if e2 == e.rev() {
            return Err(Error::InvalidFold(format!(
                "cannot fold {} over its inverse",
                g.dir_name(e)
            )));
        }
        if g.init(e) != g.init(e2) {
            return Err(Error::InvalidFold(format!(
                "{} and {} do not share an initial vertex",
                g.dir_name(e),
                g.dir_name(e2)
            )));
        }
        Ok(())
    }

    /// The graph after folding: `folded` now runs from the end of `over` to its old end.
    pub fn apply_graph(&self, g: &Graph) -> Result<Graph> {
        self.validate(g)?;
        let (e, e2) = (self.folded, self.over);
        let v = g.init(e);
        let u = g.term(e2);
        let w = g.term(e);
        let mut ends = g.ends().to_vec();
        ends[e.edge()] = if e.is_reversed() { (w, u) } else { (u, w) };
        let out = g.with_ends(ends);
        if u != v && out.valence(v) < 3 {
            return Err(Error::InvalidFold(format!(
                "vertex {} would drop below valence 3",
                g.vertex_name(v)
            )));
        }
        Ok(out)
    }

    pub fn to_map(&self, g: &Graph) -> Result<GraphMap> {
        let target = self.apply_graph(g)?;
        let mut images: Vec<EdgePath> = (0..g.num_edges())
            .map(|i| EdgePath::single(Dir::pos(i)))
            .collect();
        let (e, e2) = (self.folded, self.over);
        images[e.edge()] = if e.is_reversed() {
            EdgePath(vec![Dir::pos(e.edge()), e2.rev()])
        } else {
            EdgePath(vec![e2, e])
        };
        GraphMap::new(g.clone(), target, (0..g.num_vertices()).collect(), images)
    }

    pub fn dir_image(&self, d: Dir) -> Dir {
        if d == self.folded {
            self.over
        } else {
            d
        }
    }

    /// The turn `{over̄, folded}` taken by the image of `folded`.
    pub fn taken_turn(&self) -> Turn {
        Turn::new(self.over.rev(), self.folded)
    }

    /// The pair of directions identified by the fold.
    pub fn collision(&self) -> Turn {
        Turn::new(self.folded, self.over)
    }

    /// `fold(σE over σE')`.
    pub fn relabel(&self, sigma: &EdgePermutation) -> Fold {
        Fold {
            folded: sigma.apply(self.folded),
            over: sigma.apply(self.over),
        }
    }

    pub fn name(&self, g: &Graph) -> String {
        format!(
            "fold {} over {}",
            g.dir_name(self.folded),
            g.dir_name(self.over)
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Step {
    Fold(Fold),
    Perm(EdgePermutation),
}

impl Step {
    pub fn dir_image(&self, d: Dir) -> Dir {
        match self {
            Step::Fold(f) => f.dir_image(d),
            Step::Perm(p) => p.apply(d),
        }
    }

    pub fn image(&self, d: Dir) -> EdgePath {
        match self {
            Step::Fold(f) if d == f.folded => EdgePath(vec![f.over, d]),
            Step::Fold(f) if d == f.folded.rev() => EdgePath(vec![d, f.over.rev()]),
            Step::Fold(_) => EdgePath::single(d),
            Step::Perm(p) => EdgePath::single(p.apply(d)),
        }
    }

    pub fn apply_graph(&self, g: &Graph) -> Result<Graph> {
        match self {
            Step::Fold(f) => f.apply_graph(g),
            Step::Perm(p) => p.apply_to_graph(g),
        }
    }

    pub fn to_map(&self, g: &Graph) -> Result<GraphMap> {
        match self {
            Step::Fold(f) => f.to_map(g),
            Step::Perm(p) => p.to_map(g),
        }
    }
}

/// A chain of proper full folds followed by an edge permutation, returning to the start graph.
#[derive(Debug)]
pub struct PffDecomposition {
    graphs: Vec<Graph>,
    folds: Vec<Fold>,
    perm: EdgePermutation,
    composite: OnceLock<GraphMap>,
}

impl Clone for PffDecomposition {
    fn clone(&self) -> Self {
        PffDecomposition {
            graphs: self.graphs.clone(),
            folds: self.folds.clone(),
            perm: self.perm.clone(),
            composite: self.composite.clone(),
        }
    }
}

impl PartialEq for PffDecomposition {
    fn eq(&self, other: &Self) -> bool {
        self.graphs[0] == other.graphs[0] && self.folds == other.folds && self.perm == other.perm
    }
}

impl PffDecomposition {
    /// Build from steps in order of application. Interior permutations are pushed to the end.
    pub fn from_steps(start: Graph, steps: Vec<Step>) -> Result<Self> {
        let mut pending = EdgePermutation::identity(start.num_edges(), start.num_vertices());
        let mut folds = Vec::new();
        let mut graphs = vec![start.clone()];
        // The actual graph after each original step, to validate steps in their own labels.
        let mut actual = start.clone();
        for s in steps {
            actual = s.apply_graph(&actual)?;
            match s {
                Step::Fold(f) => {
                    let inv = pending.inverse();
                    let f2 = f.relabel(&inv);
                    let next = f2.apply_graph(graphs.last().unwrap())?;
                    graphs.push(next);
                    folds.push(f2);
                }
                Step::Perm(p) => pending = p.compose(&pending),
            }
        }
        debug_assert_eq!(
            pending.apply_to_graph(graphs.last().unwrap()).ok().as_ref(),
            Some(&actual)
        );
        if folds.is_empty() {
            return Err(Error::InvalidDecomposition("no folds".into()));
        }
        if actual != start {
            return Err(Error::InvalidDecomposition(
                "chain does not return to its start graph".into(),
            ));
        }
        Ok(PffDecomposition {
            graphs,
            folds,
            perm: pending,
            composite: OnceLock::new(),
        })
    }

    pub fn new(start: Graph, folds: Vec<Fold>, perm: Option<EdgePermutation>) -> Result<Self> {
        let mut steps: Vec<Step> = folds.into_iter().map(Step::Fold).collect();
        if let Some(p) = perm {
            steps.push(Step::Perm(p));
        }
        PffDecomposition::from_steps(start, steps)
    }

    pub fn start(&self) -> &Graph {
        &self.graphs[0]
    }
    pub fn folds(&self) -> &[Fold] {
        &self.folds
    }
    pub fn permutation(&self) -> &EdgePermutation {
        &self.perm
    }
    pub fn has_permutation(&self) -> bool {
        !self.perm.is_identity()
    }

    /// Folds, then the terminal permutation when it is not the identity.
    pub fn steps(&self) -> Vec<Step> {
        let mut s: Vec<Step> = self.folds.iter().copied().map(Step::Fold).collect();
        if self.has_permutation() {
            s.push(Step::Perm(self.perm.clone()));
        }
        s
    }

    /// Number of steps `n`.
    pub fn len(&self) -> usize {
        self.folds.len() + usize::from(self.has_permutation())
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `Γ_i` for `0 ≤ i ≤ n`, with `Γ_n = Γ_0`.
    pub fn graph(&self, i: usize) -> &Graph {
        if i < self.graphs.len() {
            &self.graphs[i]
        } else {
            &self.graphs[0]
        }
    }

    /// Step `i` (0-based), a map `Γ_i → Γ_{i+1}`.
    pub fn step(&self, i: usize) -> Step {
        if i < self.folds.len() {
            Step::Fold(self.folds[i])
        } else {
            Step::Perm(self.perm.clone())
        }
    }

    pub fn step_map(&self, i: usize) -> GraphMap {
        self.step(i)
            .to_map(self.graph(i))
            .expect("validated at construction")
    }

    /// `g_{k,1}`: the first `k` steps composed.
    pub fn prefix(&self, k: usize) -> GraphMap {
        let mut m = GraphMap::identity(self.start());
        for i in 0..k {
            m = self
                .step_map(i)
                .compose(&m)
                .expect("consecutive steps compose");
        }
        m
    }

    /// The full composite, computed once.
    pub fn compose(&self) -> &GraphMap {
        self.composite.get_or_init(|| self.prefix(self.len()))
    }

    /// The chain starting after step `k`: steps `k+1..n` then `1..k`.
    pub fn rotate(&self, k: usize) -> Result<PffDecomposition> {
        let n = self.len();
        if k >= n {
            return Err(Error::InvalidDecomposition(format!(
                "rotation {k} out of range 0..{n}"
            )));
        }
        let steps = self.steps();
        let rotated: Vec<Step> = steps[k..].iter().chain(&steps[..k]).cloned().collect();
        PffDecomposition::from_steps(self.graph(k).clone(), rotated)
    }

    /// `fold a over B; fold c over a; perm b->B`.
    pub fn to_dsl(&self) -> String {
        let mut parts: Vec<String> = self
            .folds
            .iter()
            .enumerate()
            .map(|(i, f)| f.name(self.graph(i)))
            .collect();
        if self.has_permutation() {
            parts.push(format!(
                "perm {}",
                self.perm.to_dsl(self.graph(self.folds.len()))
            ));
        }
        parts.join("; ")
    }
}

impl fmt::Display for PffDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_dsl())
    }
}

/// Parse a chain such as `fold a over b; fold c over a; perm b->B` starting at `start`.
pub fn parse_chain(text: &str, start: &Graph) -> Result<PffDecomposition> {
    // A `perm` clause owns the bare `x->y` clauses that follow it.
    let mut clauses: Vec<String> = Vec::new();
    for c in text.split(';').map(str::trim).filter(|c| !c.is_empty()) {
        match clauses.last_mut() {
            Some(last)
                if last.starts_with("perm ")
                    && !c.starts_with("fold ")
                    && !c.starts_with("perm ") =>
            {
                last.push(';');
                last.push_str(c);
            }
            _ => clauses.push(c.to_string()),
        }
    }
    let mut steps = Vec::new();
    let mut g = start.clone();
    for clause in &clauses {
        let step = if let Some(rest) = clause.strip_prefix("fold ") {
            let (a, b) = rest
                .split_once(" over ")
                .ok_or_else(|| Error::Parse(format!("expected `fold X over Y` in {clause:?}")))?;
            Step::Fold(Fold::new(g.parse_dir(a.trim())?, g.parse_dir(b.trim())?))
        } else if let Some(rest) = clause.strip_prefix("perm ") {
            Step::Perm(EdgePermutation::parse(rest, &g)?)
        } else {
            return Err(Error::Parse(format!("unknown step {clause:?}")));
        };
        g = step.apply_graph(&g)?;
        steps.push(step);
    }
    PffDecomposition::from_steps(start.clone(), steps)
}

/// Turns taken by the composite, built step by step: `τ(g_n) ∪ ⋃_k Dg_{n,k+1}(τ(g_k))`.
pub fn decomposition_taken_turns(d: &PffDecomposition) -> BTreeSet<Turn> {
    decomposition_taken_turns_prefix(d, d.len())
}

/// Turns taken by `g_{k,1}`.
pub fn decomposition_taken_turns_prefix(d: &PffDecomposition, k: usize) -> BTreeSet<Turn> {
    let mut acc: BTreeSet<Turn> = BTreeSet::new();
    for i in 0..k {
        let s = d.step(i);
        acc = acc.iter().map(|t| t.map(|x| s.dir_image(x))).collect();
        if let Step::Fold(f) = s {
            acc.insert(f.taken_turn());
        }
    }
    acc
}

/// Illegal turns of the composite, found by pushing each turn around the cyclic chain
/// until it hits a fold collision or its state repeats.
pub fn decomposition_illegal_turns(d: &PffDecomposition) -> BTreeSet<Turn> {
    let g = d.start();
    let n = d.len();
    let steps = d.steps();
    g.all_turns()
        .into_iter()
        .filter(|&t| {
            let mut seen = HashSet::new();
            let mut cur = t;
            let mut i = 0;
            loop {
                if !seen.insert((i, cur)) {
                    return false;
                }
                let s = &steps[i];
                if let Step::Fold(f) = s {
                    if f.collision() == cur {
                        return true;
                    }
                }
                cur = cur.map(|x| s.dir_image(x));
                i = (i + 1) % n;
            }
        })
        .collect()
}

/// Peel proper full folds off a train track map until an edge permutation remains.
pub fn factor_pff(g: &GraphMap) -> Result<PffDecomposition> {
    g.require_self_map()?;
    require_train_track(g)?;
    let target = g.codomain().clone();
    let mut cur = g.domain().clone();
    let mut images: Vec<EdgePath> = g.images().to_vec();
    let vertex_map = g.vertex_map().to_vec();
    let mut folds = Vec::new();
    let image = |images: &[EdgePath], d: Dir| {
        let p = &images[d.edge()];
        if d.is_reversed() {
            p.reversed()
        } else {
            p.clone()
        }
    };
    loop {
        if images.iter().all(|p| p.len() == 1) {
            let residual = GraphMap::new(
                cur.clone(),
                target.clone(),
                vertex_map.clone(),
                images.clone(),
            )
            .map_err(|e| Error::NotPffFactorable(e.to_string()))?;
            let perm = EdgePermutation::from_map(&residual).ok_or_else(|| {
                Error::NotPffFactorable(
                    "residual single-edge map is not a graph isomorphism".into(),
                )
            })?;
            return PffDecomposition::new(g.domain().clone(), folds, Some(perm));
        }
        let mut cands: Vec<(usize, Dir, Dir)> = Vec::new();
        for e in cur.dirs() {
            let he = image(&images, e);
            for e2 in cur.dirs() {
                if e2 == e || e2 == e.rev() || cur.init(e) != cur.init(e2) {
                    continue;
                }
                let he2 = image(&images, e2);
                if he2.len() < he.len() && he2.is_prefix_of(&he) {
                    cands.push((he.len(), e, e2));
                }
            }
        }
        cands.sort();
        let mut applied = false;
        for (_, e, e2) in cands {
            let f = Fold::new(e, e2);
            let Ok(next) = f.apply_graph(&cur) else {
                continue;
            };
            let he = image(&images, e);
            let k = image(&images, e2).len();
            let suffix = EdgePath(he.0[k..].to_vec());
            images[e.edge()] = if e.is_reversed() {
                suffix.reversed()
            } else {
                suffix
            };
            cur = next;
            folds.push(f);
            applied = true;
            break;
        }
        if !applied {
            return Err(Error::NotPffFactorable(format!(
                "no proper full fold is available after {} folds",
                folds.len()
            )));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::parse_map;
    use crate::train_track::{gates_and_illegal_turns, taken_turns};

    fn rose3() -> Graph {
        Graph::standard_rose(3)
    }

    #[test]
    fn single_folds() {
        let g = rose3();
        let d = parse_chain("fold B over C", &g).unwrap();
        assert_eq!(d.compose().to_dsl(), "a->a;b->bc;c->c");
        let d = parse_chain("fold a over B", &g).unwrap();
        assert_eq!(d.compose().to_dsl(), "a->Ba;b->b;c->c");
        assert!(parse_chain("fold a over A", &g).is_err());
        assert!(parse_chain("fold a over a", &g).is_err());
    }

    #[test]
    fn s_chain_composes() {
        let g = rose3();
        let d = parse_chain(
            "fold a over b; fold c over a; fold b over c; fold B over C",
            &g,
        )
        .unwrap();
        assert_eq!(d.len(), 4);
        assert_eq!(d.prefix(2).to_dsl(), "a->ba;b->b;c->ac");
        assert_eq!(d.prefix(3).to_dsl(), "a->cba;b->cb;c->ac");
        assert_eq!(d.compose().to_dsl(), "a->cbca;b->cbc;c->ac");
    }

    #[test]
    fn factor_recovers_s_chain() {
        let s = parse_map("a->cbca;b->cbc;c->ac", None).unwrap();
        let d = factor_pff(&s).unwrap();
        assert_eq!(
            d.to_dsl(),
            "fold a over b; fold c over a; fold b over c; fold B over C"
        );
        assert_eq!(d.compose(), &s);
    }

    #[test]
    fn interior_permutation_is_pushed_to_the_end() {
        let g = rose3();
        let d = parse_chain("fold a over b; perm a->b;b->a; fold c over a", &g).unwrap();
        let raw = {
            let f1 = Fold::new(Dir::pos(0), Dir::pos(1)).to_map(&g).unwrap();
            let p = EdgePermutation::parse("a->b;b->a", &g)
                .unwrap()
                .to_map(&g)
                .unwrap();
            let f2 = Fold::new(Dir::pos(2), Dir::pos(0)).to_map(&g).unwrap();
            f2.compose(&p.compose(&f1).unwrap()).unwrap()
        };
        assert_eq!(d.compose(), &raw);
        assert_eq!(d.to_dsl(), "fold a over b; fold c over b; perm a->b;b->a");
    }

    #[test]
    fn rotations_of_s() {
        let s = parse_map("a->cbca;b->cbc;c->ac", None).unwrap();
        let d = factor_pff(&s).unwrap();
        let expect = [
            ["{a,b}", "{B,C}"],
            ["{a,c}", "{B,C}"],
            ["{b,c}", "{B,C}"],
            ["{a,b}", "{B,C}"],
        ];
        for (k, want) in expect.iter().enumerate() {
            let f = d.rotate(k).unwrap();
            let gd = gates_and_illegal_turns(f.compose()).unwrap();
            let got: Vec<String> = gd
                .illegal_turns
                .iter()
                .map(|&t| s.domain().turn_name(t))
                .collect();
            assert_eq!(got, want.to_vec(), "rotation {k}");
            assert_eq!(decomposition_illegal_turns(&f), gd.illegal_turns);
            assert_eq!(decomposition_taken_turns(&f), taken_turns(f.compose()));
        }
    }

    #[test]
    fn theta_fold_moves_endpoint() {
        let theta = Graph::new(
            vec!["p".into(), "q".into()],
            vec!["a".into(), "b".into(), "c".into(), "d".into(), "e".into()],
            vec![(0, 1), (0, 1), (0, 1), (0, 1), (0, 0)],
        )
        .unwrap();
        let f = Fold::new(Dir::pos(0), Dir::pos(4));
        let g2 = f.apply_graph(&theta).unwrap();
        assert_eq!(g2.ends()[0], (0, 1));
        let f = Fold::new(Dir::new(0, true), Dir::new(1, true));
        let g2 = f.apply_graph(&theta).unwrap();
        assert_eq!(g2.ends()[0], (0, 0));
        assert!(Fold::new(Dir::pos(0), Dir::new(1, true))
            .apply_graph(&theta)
            .is_err());
        assert!(Fold::new(Dir::new(1, true), Dir::new(2, true))
            .apply_graph(&g2)
            .is_err());
    }
}
