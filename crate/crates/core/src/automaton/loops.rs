//! Loops in the automaton and the train track maps they realize.

use std::collections::{BTreeSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use super::{perm_map, Automaton, Move};
use crate::error::{Error, Result};
use crate::fic::{fic_certify, FicFailure, FicVerdict};
use crate::graph::Turn;
use crate::halfint::HalfInt;
use crate::ltt::ltt_of_map;
use crate::map::{EdgePermutation, GraphMap};
use crate::matrix::{is_pf, transition_matrix};
use crate::pff::{PffDecomposition, Step};
use crate::pnp::{PnpFree, SearchCertificate, SearchOptions};
use crate::train_track::{gates_and_illegal_turns, is_train_track, taken_turns_infinity};
use crate::whitehead::{is_fully_singular, whitehead_data};

/// A closed directed path of automaton edges, by edge id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Loop {
    pub start: usize,
    pub edges: Vec<usize>,
}

impl Loop {
    pub fn validate(&self, a: &Automaton) -> Result<()> {
        let bad = |m: String| Err(Error::Automaton(format!("not a loop: {m}")));
        if self.start >= a.vertices().len() {
            return bad(format!("vertex {} does not exist", self.start));
        }
        let mut at = self.start;
        for &i in &self.edges {
            let Some(e) = a.edges().get(i) else {
                return bad(format!("edge {i} does not exist"));
            };
            if e.source != at {
                return bad(format!("edge {i} leaves {} rather than {at}", e.source));
            }
            at = e.target;
        }
        if at != self.start {
            return bad(format!("ends at {at} rather than {}", self.start));
        }
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({ "schema": "traintrack.loop/1", "start": self.start, "edges": self.edges })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let bad =
            || Error::Parse("loop: expected `start` and a list of edge ids in `edges`".into());
        let start = v["start"].as_u64().ok_or_else(bad)? as usize;
        let edges = v["edges"]
            .as_array()
            .ok_or_else(bad)?
            .iter()
            .map(|x| x.as_u64().map(|i| i as usize).ok_or_else(bad))
            .collect::<Result<_>>()?;
        Ok(Loop { start, edges })
    }
}

/// The self-map of the start carrier realized by a loop.
#[derive(Clone, Debug)]
pub struct LoopMap {
    pub map: GraphMap,
    /// Present when the loop contains a fold.
    pub decomposition: Option<PffDecomposition>,
}

pub fn loop_to_map(a: &Automaton, l: &Loop) -> Result<LoopMap> {
    l.validate(a)?;
    let carrier = a.vertices()[l.start].structure.carrier().clone();
    let mut map = GraphMap::identity(&carrier);
    let mut steps = Vec::new();
    for &i in &l.edges {
        map = a.edge_map(i)?.compose(&map)?;
        let e = &a.edges()[i];
        match &e.mv {
            Move::Fold(f) => {
                steps.push(Step::Fold(*f));
                if !e.relabel.is_identity() {
                    steps.push(Step::Perm(e.relabel.clone()));
                }
            }
            Move::Symmetry(p) => steps.push(Step::Perm(p.clone())),
        }
    }
    if !steps.iter().any(|s| matches!(s, Step::Fold(_))) {
        return Ok(LoopMap {
            map,
            decomposition: None,
        });
    }
    let d = PffDecomposition::from_steps(carrier, steps)?;
    if d.compose() != &map {
        return Err(Error::InvalidDecomposition(
            "loop steps do not compose to the loop map".into(),
        ));
    }
    Ok(LoopMap {
        map,
        decomposition: Some(d),
    })
}

/// The loop traced by a PNP-free decomposition from the canonical form of its structure,
/// with the relabeling `ψ` such that the loop map is `ψ g ψ⁻¹`. Among the relabelings
/// differing by an automorphism of the start vertex, one needing no closing symmetry edge is preferred.
pub fn decomposition_to_loop(
    a: &Automaton,
    d: &PffDecomposition,
    free: &PnpFree,
) -> Result<(Loop, EdgePermutation)> {
    let g = d.compose();
    let c0 = ltt_of_map(g, free)?.canonical();
    let start = a.vertex_by_key(&c0.key).ok_or_else(|| {
        Error::Automaton("the structure of the map is not a vertex of the automaton".into())
    })?;
    let mut best: Option<(Loop, EdgePermutation)> = None;
    let mut last_err = None;
    for alpha in a.vertices()[start].structure.automorphisms() {
        match trace(a, d, start, alpha.compose(&c0.relabel)) {
            Ok(found) => {
                if best
                    .as_ref()
                    .map_or(true, |b| found.0.edges.len() < b.0.edges.len())
                {
                    best = Some(found);
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    best.ok_or_else(|| last_err.unwrap_or_else(|| Error::Automaton("no relabeling".into())))
}

fn trace(
    a: &Automaton,
    d: &PffDecomposition,
    start: usize,
    psi0: EdgePermutation,
) -> Result<(Loop, EdgePermutation)> {
    let mut psi = psi0.clone();
    let mut at = start;
    let mut edges = Vec::new();
    for step in d.steps() {
        match step {
            Step::Fold(f) => {
                let mv = Move::Fold(f.relabel(&psi));
                let i = a.find_edge(at, &mv).ok_or_else(|| {
                    Error::Automaton(format!("no edge `{}` at vertex {at}", f.name(d.start())))
                })?;
                let e = &a.edges()[i];
                psi = e.relabel.compose(&psi);
                at = e.target;
                edges.push(i);
            }
            Step::Perm(p) => psi = psi.compose(&p.inverse()),
        }
    }
    if at != start {
        return Err(Error::Automaton(
            "the chain does not close up in the automaton".into(),
        ));
    }
    let beta = psi0.compose(&psi.inverse());
    if !beta.is_identity() {
        let i = a
            .find_edge(start, &Move::Symmetry(beta))
            .ok_or_else(|| Error::Automaton("closing symmetry is not an automaton edge".into()))?;
        edges.push(i);
    }
    Ok((Loop { start, edges }, psi0))
}

/// `σ ∘ g ∘ σ⁻¹` on the relabeled carrier.
pub fn conjugate(
    g: &GraphMap,
    sigma: &EdgePermutation,
    target: &crate::graph::Graph,
) -> Result<GraphMap> {
    let s = perm_map(sigma, g.domain(), target)?;
    let si = perm_map(&sigma.inverse(), target, g.domain())?;
    s.compose(g)?.compose(&si)
}

#[derive(Clone, Debug)]
pub struct LoopCertificate {
    pub map: GraphMap,
    pub decomposition: PffDecomposition,
    pub certificate: SearchCertificate,
    pub index_sum: HalfInt,
    pub fully_singular: bool,
    pub lone_axis: bool,
}

#[derive(Clone, Debug)]
pub enum LoopVerdict {
    Certified(Box<LoopCertificate>),
    Failed {
        condition: &'static str,
        detail: String,
    },
    Inconclusive {
        reason: String,
    },
}

#[derive(Serialize)]
struct FailedJson<'a> {
    condition: &'a str,
    detail: &'a str,
}

impl LoopVerdict {
    pub fn kind(&self) -> &'static str {
        match self {
            LoopVerdict::Certified(_) => "certified",
            LoopVerdict::Failed { .. } => "failed",
            LoopVerdict::Inconclusive { .. } => "inconclusive",
        }
    }

    pub fn to_json(&self, l: &Loop) -> serde_json::Value {
        let mut v = json!({ "schema": "traintrack.loop-verdict/1", "loop": l.to_json(), "verdict": self.kind() });
        match self {
            LoopVerdict::Certified(c) => {
                v["map"] = json!(c.map.to_dsl());
                v["decomposition"] = json!(c.decomposition.to_dsl());
                v["index_sum"] = json!(c.index_sum);
                v["fully_singular"] = json!(c.fully_singular);
                v["lone_axis"] = json!(c.lone_axis);
                v["pnp_certificate"] = c.certificate.to_json(c.decomposition.start());
            }
            LoopVerdict::Failed { condition, detail } => {
                v["failure"] =
                    serde_json::to_value(FailedJson { condition, detail }).expect("serializable")
            }
            LoopVerdict::Inconclusive { reason } => v["reason"] = json!(reason),
        }
        v
    }
}

/// Decide whether a loop realizes an ageometric fully irreducible map with the automaton's ideal Whitehead graph.
pub fn certify_loop(a: &Automaton, l: &Loop, opts: SearchOptions) -> Result<LoopVerdict> {
    let fail =
        |condition: &'static str, detail: String| Ok(LoopVerdict::Failed { condition, detail });
    let lm = loop_to_map(a, l)?;
    let Some(d) = lm.decomposition else {
        return fail(
            "pf",
            "the loop has no folds, so its map is a finite order relabeling".into(),
        );
    };
    let g = d.compose();
    let base = &a.vertices()[l.start].structure;
    if let Some(w) = is_train_track(g)?.witness {
        return fail("train_track", format!("{w:?}"));
    }
    if !is_pf(&transition_matrix(g)) {
        return fail("pf", "transition matrix is not Perron-Frobenius".into());
    }
    let turns: BTreeSet<Turn> = taken_turns_infinity(g)?
        .into_iter()
        .filter(|t| !t.is_degenerate())
        .collect();
    let colored: BTreeSet<Turn> = base.colored_edges().keys().copied().collect();
    if turns != colored {
        return fail(
            "taken_turns",
            "eventually taken turns differ from the colored edges of the start vertex".into(),
        );
    }
    let gates = gates_and_illegal_turns(g)?;
    if gates.periodic_dirs() != base.purple_vertices() {
        return fail(
            "periodic_directions",
            "periodic directions differ from the purple vertices".into(),
        );
    }
    let carrier = g.domain();
    for v in 0..carrier.num_vertices() {
        let k = carrier
            .directions_at(v)
            .iter()
            .filter(|&&x| gates.is_periodic_dir(x))
            .count();
        if k < 3 {
            return fail(
                "principal",
                format!(
                    "vertex {} has {k} periodic directions",
                    carrier.vertex_name(v)
                ),
            );
        }
    }
    let (structure, certificate) = match fic_certify(g, Some(&d), opts)? {
        FicVerdict::Certified(r) => (r.structure, r.certificate),
        FicVerdict::Failed(FicFailure::NielsenPath { rho1, rho2, stage }) => {
            return fail(
                "pnp",
                format!("periodic Nielsen path candidate {rho1} / {rho2} at stage {stage}"),
            )
        }
        FicVerdict::Failed(f) => return fail("fic", format!("{f:?}")),
        FicVerdict::Inconclusive { reason } => return Ok(LoopVerdict::Inconclusive { reason }),
    };
    if structure != *base {
        return fail(
            "structure",
            "the structure of the loop map differs from the start vertex".into(),
        );
    }
    if !whitehead_data(g)?.ideal.is_isomorphic(&a.spec().graph) {
        return fail(
            "ideal_whitehead",
            "ideal Whitehead graph differs from the target".into(),
        );
    }
    Ok(LoopVerdict::Certified(Box::new(LoopCertificate {
        map: g.clone(),
        index_sum: structure.index(),
        fully_singular: is_fully_singular(g)?,
        lone_axis: a.certifies_lone_axis(),
        decomposition: d,
        certificate,
    })))
}

/// Seeded random loops: a random walk inside a component, closed by a shortest path back.
pub fn random_loops(a: &Automaton, count: usize, max_walk: usize, seed: u64) -> Vec<Loop> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let starts: Vec<usize> = (0..a.vertices().len())
        .filter(|&v| a.out_edges(v).next().is_some())
        .collect();
    let mut out = Vec::new();
    if starts.is_empty() {
        return out;
    }
    while out.len() < count {
        let start = starts[rng.gen_range(0..starts.len())];
        let mut edges = Vec::new();
        let mut at = start;
        for _ in 0..rng.gen_range(1..=max_walk.max(1)) {
            let outs: Vec<usize> = a.out_edges(at).collect();
            let i = outs[rng.gen_range(0..outs.len())];
            edges.push(i);
            at = a.edges()[i].target;
        }
        edges.extend(shortest_path(a, at, start).expect("components are strongly connected"));
        out.push(Loop { start, edges });
    }
    out
}

/// Edge ids of a shortest path from `from` to `to`.
pub fn shortest_path(a: &Automaton, from: usize, to: usize) -> Option<Vec<usize>> {
    let mut prev: Vec<Option<usize>> = vec![None; a.vertices().len()];
    let mut seen = vec![false; a.vertices().len()];
    let mut q = VecDeque::from([from]);
    seen[from] = true;
    while let Some(v) = q.pop_front() {
        if v == to {
            let mut path = Vec::new();
            let mut x = to;
            while x != from {
                let i = prev[x].expect("reached vertices have a predecessor");
                path.push(i);
                x = a.edges()[i].source;
            }
            path.reverse();
            return Some(path);
        }
        for i in a.out_edges(v) {
            let t = a.edges()[i].target;
            if !seen[t] {
                seen[t] = true;
                prev[t] = Some(i);
                q.push_back(t);
            }
        }
    }
    None
}
