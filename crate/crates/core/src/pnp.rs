//! Periodic Nielsen path detection.
//!
//! An indivisible Nielsen path of a train track map has the form `ρ̄₁ρ₂` with legal legs
//! meeting at an illegal turn. Pushing such a path along a fold decomposition, the
//! uncancelled tails of the two legs must meet at an illegal turn of every rotation of
//! the chain. [`pnp_search`] tracks those tails symbolically, branching on how the legs
//! continue, and records each contradiction in a replayable search tree.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::graph::{Dir, EdgePath, Graph, Turn};
use crate::map::GraphMap;
use crate::pff::{decomposition_illegal_turns, PffDecomposition, Step};
use crate::train_track::{gates_and_illegal_turns, is_train_track, taken_turns_infinity};

/// Evidence that a map has no periodic Nielsen paths. Issued only by a `NoPnp` verdict.
#[derive(Clone, Debug)]
pub struct PnpFree {
    map: GraphMap,
}

impl PnpFree {
    pub fn map(&self) -> &GraphMap {
        &self.map
    }

    /// A rotation of a PNP-free chain is PNP-free: an indivisible Nielsen path of a
    /// rotation pushes forward along the chain to one of the original map.
    pub fn for_rotation(&self, d: &PffDecomposition, k: usize) -> Result<PnpFree> {
        if d.compose() != &self.map {
            return Err(Error::InvalidCertificate(
                "decomposition does not compose to the certified map".into(),
            ));
        }
        Ok(PnpFree {
            map: d.rotate(k)?.compose().clone(),
        })
    }
}

/// A pair of legal paths from a common vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LongTurn {
    pub alpha: EdgePath,
    pub beta: EdgePath,
}

fn is_legal(path: &EdgePath, illegal: &BTreeSet<Turn>) -> bool {
    path.is_tight() && path.taken_turns().iter().all(|t| !illegal.contains(t))
}

/// The images of the two legs cancel down to an illegal turn, and neither image is an initial subpath of the other.
pub fn is_dangerous(g: &GraphMap, lt: &LongTurn) -> Result<bool> {
    let gr = g.domain();
    let gd = gates_and_illegal_turns(g)?;
    for p in [&lt.alpha, &lt.beta] {
        if p.is_empty() || !p.is_contiguous(gr) || !is_legal(p, &gd.illegal_turns) {
            return Err(Error::Precondition(
                "long turn legs must be nonempty legal paths".into(),
            ));
        }
    }
    if gr.init(lt.alpha.0[0]) != gr.init(lt.beta.0[0]) {
        return Err(Error::Precondition(
            "long turn legs must share their initial vertex".into(),
        ));
    }
    let a = g.apply(&lt.alpha).tighten();
    let b = g.apply(&lt.beta).tighten();
    if a.is_prefix_of(&b) || b.is_prefix_of(&a) {
        return Ok(false);
    }
    let k = a.0.iter().zip(&b.0).take_while(|(x, y)| x == y).count();
    Ok(gd.is_illegal(Turn::new(a.0[k], b.0[k])))
}

/// `ρ = ρ̄₁ρ₂` with legal legs meeting at a single nondegenerate illegal turn, fixed by `g_#^R`.
pub fn inp_shape_check(g: &GraphMap, rho: &EdgePath) -> Result<bool> {
    let gd = gates_and_illegal_turns(g)?;
    if rho.len() < 2 || !rho.is_tight() || !rho.is_contiguous(g.domain()) {
        return Ok(false);
    }
    let illegal_at: Vec<usize> = (0..rho.len() - 1)
        .filter(|&i| gd.is_illegal(Turn::new(rho.0[i].rev(), rho.0[i + 1])))
        .collect();
    if illegal_at.len() != 1 {
        return Ok(false);
    }
    let r = gd.rotationless_power;
    let mut p = rho.clone();
    for _ in 0..r {
        p = g.apply(&p).tighten();
        if p.len() > 64 * rho.len() {
            return Ok(false);
        }
    }
    Ok(&p == rho)
}

/// Why a search node ended, or how it continued.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    /// The residual turn is illegal for the current rotation; the search continues.
    Illegal,
    /// The residual turn is legal for the current rotation: contradiction.
    Legal,
    /// A leg is used up; children extend it.
    Extend,
    /// A leg is used up and no taken turn continues it: contradiction.
    NoExtension,
    /// Repeated state confirmed as a Nielsen path.
    Candidate,
    /// Stage or node budget exhausted.
    Depth,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchNode {
    pub stage: usize,
    pub residual: Option<Turn>,
    pub rule: Rule,
    /// `(side, edge)` when this node follows an extension of leg `side` (1 or 2) by `edge`.
    pub extension: Option<(u8, Dir)>,
    pub children: Vec<SearchNode>,
}

impl SearchNode {
    fn leaf_count(&self) -> usize {
        if self.children.is_empty() {
            1
        } else {
            self.children.iter().map(SearchNode::leaf_count).sum()
        }
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(SearchNode::size).sum::<usize>()
    }

    /// Visit every node.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a SearchNode)) {
        f(self);
        for c in &self.children {
            c.walk(f);
        }
    }

    /// Follow a sequence of extensions to the leaf it leads to.
    pub fn follow(&self, path: &[(u8, Dir)]) -> Option<&SearchNode> {
        let mut node = self;
        let mut rest = path;
        loop {
            match node.rule {
                Rule::Extend => {
                    let (&want, tail) = rest.split_first()?;
                    node = node.children.iter().find(|c| c.extension == Some(want))?;
                    rest = tail;
                }
                _ if node.children.len() == 1 => node = &node.children[0],
                _ => return rest.is_empty().then_some(node),
            }
        }
    }

    fn to_json(&self, g: &Graph) -> serde_json::Value {
        let mut v = json!({
            "stage": self.stage,
            "residual": self.residual.map(|t| [g.dir_name(t.0), g.dir_name(t.1)]),
            "rule": self.rule,
        });
        if let Some((side, e)) = self.extension {
            v["extend"] = json!({ "side": side, "edge": g.dir_name(e) });
        }
        if !self.children.is_empty() {
            v["children"] = self.children.iter().map(|c| c.to_json(g)).collect();
        }
        v
    }

    fn from_json(v: &serde_json::Value, g: &Graph) -> Result<Self> {
        let bad = |m: &str| Error::InvalidCertificate(m.to_string());
        let stage = v["stage"].as_u64().ok_or_else(|| bad("missing stage"))? as usize;
        let residual = match &v["residual"] {
            serde_json::Value::Null => None,
            serde_json::Value::Array(a) if a.len() == 2 => {
                let p = |x: &serde_json::Value| g.parse_dir(x.as_str().unwrap_or(""));
                Some(Turn::new(p(&a[0])?, p(&a[1])?))
            }
            _ => return Err(bad("bad residual")),
        };
        let rule: Rule =
            serde_json::from_value(v["rule"].clone()).map_err(|e| bad(&e.to_string()))?;
        let extension = match v.get("extend") {
            None => None,
            Some(x) => {
                let side = x["side"].as_u64().ok_or_else(|| bad("bad side"))? as u8;
                Some((side, g.parse_dir(x["edge"].as_str().unwrap_or(""))?))
            }
        };
        let children = match v.get("children") {
            None => Vec::new(),
            Some(serde_json::Value::Array(cs)) => cs
                .iter()
                .map(|c| SearchNode::from_json(c, g))
                .collect::<Result<_>>()?,
            Some(_) => return Err(bad("bad children")),
        };
        Ok(SearchNode {
            stage,
            residual,
            rule,
            extension,
            children,
        })
    }
}

/// The search tree: one root per illegal turn of the composite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchCertificate {
    pub chain: String,
    pub max_stages: usize,
    pub extension: ExtensionRule,
    pub roots: Vec<SearchNode>,
}

impl SearchCertificate {
    pub fn to_json(&self, g: &Graph) -> serde_json::Value {
        json!({
            "schema": "traintrack.pnp-certificate/1",
            "carrier": g.to_json(),
            "chain": self.chain,
            "max_stages": self.max_stages,
            "extension": self.extension,
            "roots": self.roots.iter().map(|r| r.to_json(g)).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<(Graph, Self)> {
        let bad = |m: &str| Error::InvalidCertificate(m.to_string());
        let g = Graph::from_json(&v["carrier"])?;
        let chain = v["chain"]
            .as_str()
            .ok_or_else(|| bad("missing chain"))?
            .to_string();
        let max_stages = v["max_stages"]
            .as_u64()
            .ok_or_else(|| bad("missing max_stages"))? as usize;
        let extension: ExtensionRule =
            serde_json::from_value(v["extension"].clone()).map_err(|e| bad(&e.to_string()))?;
        let roots = v["roots"]
            .as_array()
            .ok_or_else(|| bad("missing roots"))?
            .iter()
            .map(|r| SearchNode::from_json(r, &g))
            .collect::<Result<_>>()?;
        Ok((
            g,
            SearchCertificate {
                chain,
                max_stages,
                extension,
                roots,
            },
        ))
    }

    pub fn leaf_count(&self) -> usize {
        self.roots.iter().map(SearchNode::leaf_count).sum()
    }
}

#[derive(Clone, Debug)]
pub enum PnpVerdict {
    NoPnp {
        certificate: SearchCertificate,
        free: PnpFree,
    },
    CandidateFound {
        rho1: EdgePath,
        rho2: EdgePath,
        stage: usize,
        certificate: SearchCertificate,
    },
    Inconclusive {
        depth: usize,
        reason: String,
        certificate: SearchCertificate,
    },
}

impl PnpVerdict {
    pub fn certificate(&self) -> &SearchCertificate {
        match self {
            PnpVerdict::NoPnp { certificate, .. }
            | PnpVerdict::CandidateFound { certificate, .. }
            | PnpVerdict::Inconclusive { certificate, .. } => certificate,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            PnpVerdict::NoPnp { .. } => "no_pnp",
            PnpVerdict::CandidateFound { .. } => "candidate_found",
            PnpVerdict::Inconclusive { .. } => "inconclusive",
        }
    }
}

/// Which turns may join consecutive edges of a leg.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtensionRule {
    /// Turns taken by some iterate of the map. Legs of a Nielsen path are leaf segments.
    #[default]
    Taken,
    /// Any nondegenerate legal turn. Weaker pruning, larger trees.
    Legal,
}

#[derive(Clone, Copy, Debug)]
pub struct SearchOptions {
    /// Stage limit; `None` means four periods of the chain.
    pub max_stages: Option<usize>,
    pub node_budget: usize,
    /// Residual letters compared in repeated-state detection.
    pub state_window: usize,
    pub extension: ExtensionRule,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            max_stages: None,
            node_budget: 1_000_000,
            state_window: 16,
            extension: ExtensionRule::Taken,
        }
    }
}

/// One leg: Γ₀ letters revealed so far and the lazy residual (top of stack first).
#[derive(Clone, Debug)]
struct Leg {
    prefix: Vec<Dir>,
    stack: Vec<(Dir, usize)>,
}

struct Searcher<'a> {
    d: &'a PffDecomposition,
    steps: Vec<Step>,
    n: usize,
    illegal: Vec<BTreeSet<Turn>>,
    admissible: BTreeSet<Turn>,
    g: &'a GraphMap,
    max_stages: usize,
    opts: SearchOptions,
    nodes: usize,
    candidate: Option<(EdgePath, EdgePath, usize)>,
    inconclusive: Option<String>,
}

impl Leg {
    fn new(d: Dir) -> Self {
        Leg {
            prefix: vec![d],
            stack: vec![(d, 0)],
        }
    }

    /// Front letter of the residual at stage `k`, expanding lazily.
    fn peek(&mut self, k: usize, steps: &[Step]) -> Option<Dir> {
        let n = steps.len();
        loop {
            let &(x, s) = self.stack.last()?;
            if s == k {
                return Some(x);
            }
            self.stack.pop();
            let img = steps[s % n].image(x);
            for &y in img.0.iter().rev() {
                self.stack.push((y, s + 1));
            }
        }
    }

    fn front(&self, k: usize, steps: &[Step], len: usize) -> Vec<Dir> {
        let mut c = self.clone();
        let mut out = Vec::new();
        while out.len() < len {
            match c.peek(k, steps) {
                Some(x) => {
                    out.push(x);
                    c.stack.pop();
                }
                None => break,
            }
        }
        out
    }
}

type StateKey = (usize, Vec<Dir>, Vec<Dir>, Dir, Dir);

impl<'a> Searcher<'a> {
    fn extensions(&self, last: Dir) -> Vec<Dir> {
        let gr = self.d.start();
        gr.directions_at(gr.term(last))
            .into_iter()
            .filter(|&e| e != last.rev() && self.admissible.contains(&Turn::new(last.rev(), e)))
            .collect()
    }

    /// Run one branch from stage `k`, before cancellation at that stage.
    fn run(
        &mut self,
        mut legs: [Leg; 2],
        k: usize,
        extension: Option<(u8, Dir)>,
        mut seen: HashMap<StateKey, usize>,
    ) -> SearchNode {
        self.nodes += 1;
        let mut node = SearchNode {
            stage: k,
            residual: None,
            rule: Rule::Depth,
            extension,
            children: Vec::new(),
        };
        if self.nodes > self.opts.node_budget {
            self.inconclusive
                .get_or_insert_with(|| "node budget exhausted".into());
            return node;
        }
        // Cancel common initial letters.
        let turn = loop {
            let a = legs[0].peek(k, &self.steps);
            let b = legs[1].peek(k, &self.steps);
            match (a, b) {
                (Some(x), Some(y)) if x == y => {
                    legs[0].stack.pop();
                    legs[1].stack.pop();
                }
                (Some(x), Some(y)) => break Turn::new(x, y),
                _ => {
                    let side = if a.is_none() { 0 } else { 1 };
                    let last = *legs[side].prefix.last().unwrap();
                    let exts = self.extensions(last);
                    node.rule = if exts.is_empty() {
                        Rule::NoExtension
                    } else {
                        Rule::Extend
                    };
                    for e in exts {
                        let mut child = legs.clone();
                        child[side].prefix.push(e);
                        child[side].stack.push((e, 0));
                        let c = self.run(child, k, Some((side as u8 + 1, e)), seen.clone());
                        node.children.push(c);
                        if self.candidate.is_some() {
                            break;
                        }
                    }
                    return node;
                }
            }
        };
        node.residual = Some(turn);
        if !self.illegal[k % self.n].contains(&turn) {
            node.rule = Rule::Legal;
            return node;
        }
        let w = self.opts.state_window;
        let key: StateKey = (
            k % self.n,
            legs[0].front(k, &self.steps, w),
            legs[1].front(k, &self.steps, w),
            *legs[0].prefix.last().unwrap(),
            *legs[1].prefix.last().unwrap(),
        );
        if let Some(&k0) = seen.get(&key) {
            if k >= 2 * self.n && k - k0 >= self.n {
                let rho1 = EdgePath(legs[0].prefix.clone());
                let rho2 = EdgePath(legs[1].prefix.clone());
                let rho = rho1.reversed().concat(&rho2);
                if inp_shape_check(self.g, &rho).unwrap_or(false) {
                    node.rule = Rule::Candidate;
                    self.candidate = Some((rho1, rho2, k));
                    return node;
                }
            }
        } else {
            seen.insert(key, k);
        }
        if k >= self.max_stages {
            node.rule = Rule::Depth;
            self.inconclusive
                .get_or_insert_with(|| format!("stage limit {} reached", self.max_stages));
            return node;
        }
        node.rule = Rule::Illegal;
        let child = self.run(legs, k + 1, None, seen);
        node.children.push(child);
        node
    }
}

/// Search for indivisible periodic Nielsen paths along the decomposition.
pub fn pnp_search(d: &PffDecomposition, opts: SearchOptions) -> Result<PnpVerdict> {
    let g = d.compose();
    let tt = is_train_track(g)?;
    if !tt.is_train_track {
        return Err(Error::NotTrainTrack(format!("{:?}", tt.witness)));
    }
    let n = d.len();
    let mut illegal = Vec::with_capacity(n);
    for k in 0..n {
        illegal.push(decomposition_illegal_turns(&d.rotate(k)?));
    }
    let max_stages = opts.max_stages.unwrap_or(4 * n);
    let admissible: BTreeSet<Turn> = match opts.extension {
        ExtensionRule::Taken => taken_turns_infinity(g)?,
        ExtensionRule::Legal => {
            let gd = gates_and_illegal_turns(g)?;
            g.domain()
                .all_turns()
                .into_iter()
                .filter(|&t| !t.is_degenerate() && !gd.is_illegal(t))
                .collect()
        }
    };
    let mut s = Searcher {
        d,
        steps: d.steps(),
        n,
        admissible,
        illegal,
        g,
        max_stages,
        opts,
        nodes: 0,
        candidate: None,
        inconclusive: None,
    };
    let mut roots = Vec::new();
    for t in s.illegal[0].clone() {
        let root = s.run([Leg::new(t.0), Leg::new(t.1)], 0, None, HashMap::new());
        roots.push(root);
        if s.candidate.is_some() {
            break;
        }
    }
    let certificate = SearchCertificate {
        chain: d.to_dsl(),
        max_stages,
        extension: opts.extension,
        roots,
    };
    Ok(if let Some((rho1, rho2, stage)) = s.candidate {
        PnpVerdict::CandidateFound {
            rho1,
            rho2,
            stage,
            certificate,
        }
    } else if let Some(reason) = s.inconclusive {
        PnpVerdict::Inconclusive {
            depth: max_stages,
            reason,
            certificate,
        }
    } else {
        PnpVerdict::NoPnp {
            certificate,
            free: PnpFree { map: g.clone() },
        }
    })
}

/// Outcome of replaying a certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CertificateCheck {
    pub replay_matches: bool,
    pub leaves_checked: usize,
    pub bad_leaves: Vec<String>,
}

impl CertificateCheck {
    pub fn ok(&self) -> bool {
        self.replay_matches && self.bad_leaves.is_empty()
    }
}

/// Replay the search and independently re-check every residual turn against the gates of the rotation.
pub fn verify_certificate(
    d: &PffDecomposition,
    cert: &SearchCertificate,
) -> Result<CertificateCheck> {
    let opts = SearchOptions {
        max_stages: Some(cert.max_stages),
        extension: cert.extension,
        ..Default::default()
    };
    let replay = pnp_search(d, opts)?;
    let replay_matches = replay.certificate() == cert && cert.chain == d.to_dsl();
    let n = d.len();
    let mut gates = Vec::with_capacity(n);
    for k in 0..n {
        gates.push(gates_and_illegal_turns(d.rotate(k)?.compose())?);
    }
    let mut bad = Vec::new();
    let mut checked = 0;
    for root in &cert.roots {
        root.walk(&mut |node| {
            if let Some(t) = node.residual {
                let illegal = gates[node.stage % n].is_illegal(t);
                let want = match node.rule {
                    Rule::Legal => Some(false),
                    Rule::Illegal | Rule::Depth | Rule::Candidate => Some(true),
                    _ => None,
                };
                if let Some(w) = want {
                    checked += 1;
                    if w != illegal {
                        bad.push(format!(
                            "stage {}: turn {} misclassified",
                            node.stage,
                            d.start().turn_name(t)
                        ));
                    }
                }
            }
        });
    }
    Ok(CertificateCheck {
        replay_matches,
        leaves_checked: checked,
        bad_leaves: bad,
    })
}

/// Deepest chain of extensions under a root, with the node where it ends.
pub fn deepest_branch(root: &SearchNode) -> (Vec<(u8, Dir)>, &SearchNode) {
    fn go<'a>(
        n: &'a SearchNode,
        acc: &mut Vec<(u8, Dir)>,
        best: &mut (Vec<(u8, Dir)>, &'a SearchNode),
    ) {
        let mut here = acc.clone();
        if let Some(e) = n.extension {
            here.push(e);
        }
        if n.children.is_empty() {
            if n.stage > best.1.stage || (n.stage == best.1.stage && here.len() > best.0.len()) {
                *best = (here, n);
            }
            return;
        }
        for c in &n.children {
            go(c, &mut here.clone(), best);
        }
    }
    let mut best = (Vec::new(), root);
    go(root, &mut Vec::new(), &mut best);
    best
}

#[cfg(test)]
mod tests;
