//! Subcommand implementations. Each produces a report body, a one-line summary and an outcome.

use std::collections::BTreeSet;

use serde_json::{json, Value};
use traintrack::automaton::{
    build, certify_loop, decomposition_to_loop, random_loops, variant, Automaton, BuildOptions,
    IwgSpec, Loop, LoopVerdict,
};
use traintrack::fic::{fic_certify, FicVerdict};
use traintrack::ltt::{ltt_of_map, LttStructure, SmoothStep};
use traintrack::matrix::{is_irreducible, is_pf, pf_data, transition_matrix};
use traintrack::pff::{
    decomposition_illegal_turns, decomposition_taken_turns, factor_pff, parse_chain,
    PffDecomposition, Step,
};
use traintrack::pnp::{
    deepest_branch, pnp_search, verify_certificate, PnpFree, PnpVerdict, SearchCertificate,
    SearchNode, SearchOptions,
};
use traintrack::train_track::{
    gates_and_illegal_turns, is_train_track, taken_turns, taken_turns_infinity, TtWitness,
};
use traintrack::whitehead::whitehead_data;
use traintrack::{Dir, Error, Graph, GraphMap, Turn};

use crate::input::{
    load_chain, load_graph, map_and_chain, read_json, require_map, CliError, CliResult,
};
use crate::{Command, Output, SearchArgs, EXIT_FAILED, EXIT_INCONCLUSIVE, EXIT_OK};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    Failed,
    Inconclusive,
}

impl Outcome {
    pub fn code(self) -> i32 {
        match self {
            Outcome::Ok => EXIT_OK,
            Outcome::Failed => EXIT_FAILED,
            Outcome::Inconclusive => EXIT_INCONCLUSIVE,
        }
    }
}

pub struct Report {
    pub body: String,
    pub summary: String,
    pub outcome: Outcome,
}

fn report(v: Value, summary: impl Into<String>, outcome: Outcome) -> CliResult<Report> {
    let mut body = serde_json::to_string_pretty(&v).expect("JSON values serialize");
    body.push('\n');
    Ok(Report {
        body,
        summary: summary.into(),
        outcome,
    })
}

fn text(body: String, summary: impl Into<String>) -> CliResult<Report> {
    Ok(Report {
        body,
        summary: summary.into(),
        outcome: Outcome::Ok,
    })
}

pub fn output_of(c: &Command) -> &Output {
    match c {
        Command::VerifyTt(x) | Command::Gates(x) | Command::Factor(x) => &x.output,
        Command::Ltt(x) | Command::WitnessLoop(x) => &x.output,
        Command::PnpCheck(x) | Command::Fic(x) => &x.output,
        Command::VerifyCertificate(x) => &x.output,
        Command::Compose(x) => &x.output,
        Command::BuildAutomaton(x) => &x.output,
        Command::TraceLoop(x) => &x.output,
        Command::SampleLoops(x) => &x.output,
        Command::CertifyLoop(x) => &x.output,
        Command::ExportDot(x) => &x.output,
    }
}

pub fn execute(c: &Command) -> CliResult<Report> {
    match c {
        Command::VerifyTt(x) => verify_tt(&require_map(&x.input)?),
        Command::Gates(x) => gates(&require_map(&x.input)?),
        Command::Ltt(x) => ltt(x),
        Command::PnpCheck(x) => pnp_check(x),
        Command::VerifyCertificate(x) => verify_cert(x),
        Command::Fic(x) => fic(x),
        Command::Factor(x) => factor(&require_map(&x.input)?),
        Command::Compose(x) => compose(x),
        Command::BuildAutomaton(x) => build_automaton(x),
        Command::TraceLoop(x) => trace_loop(x),
        Command::SampleLoops(x) => sample_loops(x),
        Command::CertifyLoop(x) => certify(x),
        Command::WitnessLoop(x) => witness(x),
        Command::ExportDot(x) => export_dot(x),
    }
}

fn dirs(g: &Graph, ds: impl IntoIterator<Item = Dir>) -> Vec<String> {
    ds.into_iter().map(|d| g.dir_name(d)).collect()
}

fn turn(g: &Graph, t: Turn) -> Value {
    json!([g.dir_name(t.0), g.dir_name(t.1)])
}

fn turns<'a>(g: &Graph, ts: impl IntoIterator<Item = &'a Turn>) -> Vec<Value> {
    ts.into_iter().map(|&t| turn(g, t)).collect()
}

fn turn_list(g: &Graph, ts: &BTreeSet<Turn>) -> String {
    ts.iter()
        .map(|&t| g.turn_name(t))
        .collect::<Vec<_>>()
        .join(", ")
}

fn options(s: &SearchArgs) -> SearchOptions {
    SearchOptions {
        max_stages: s.max_stages,
        node_budget: s.node_budget,
        extension: s.extension.into(),
        ..Default::default()
    }
}

fn verify_tt(g: &GraphMap) -> CliResult<Report> {
    let v = is_train_track(g)?;
    let gr = g.domain();
    let witness = match &v.witness {
        None => Value::Null,
        Some(TtWitness::NonTightImage { edge }) => {
            json!({ "kind": "non_tight_image", "edge": gr.edge_name(*edge), "image": gr.path_name(&g.images()[*edge]) })
        }
        Some(TtWitness::IllegalTurn {
            turn: t,
            taken_at,
            collapse_after,
            power,
        }) => json!({
            "kind": "illegal_turn",
            "turn": turn(gr, *t),
            "taken_at": taken_at,
            "collapse_after": collapse_after,
            "power": power,
        }),
    };
    let v2 = json!({
        "schema": "traintrack.verify-tt/1",
        "map": g.to_dsl(),
        "train_track": v.is_train_track,
        "witness": witness,
    });
    if v.is_train_track {
        report(v2, "train track map", Outcome::Ok)
    } else {
        let why = v
            .witness
            .as_ref()
            .map(|w| witness_text(gr, w))
            .unwrap_or_default();
        report(v2, format!("not a train track map: {why}"), Outcome::Failed)
    }
}

fn witness_text(gr: &Graph, w: &TtWitness) -> String {
    match w {
        TtWitness::NonTightImage { edge } => format!("the image of {} is not tight", gr.edge_name(*edge)),
        TtWitness::IllegalTurn { turn: t, taken_at, collapse_after, power } => format!(
            "turn {} is taken by g^{taken_at} and collapses after {collapse_after} more steps, so g^{power} backtracks",
            gr.turn_name(*t)
        ),
    }
}

fn gates(g: &GraphMap) -> CliResult<Report> {
    let gd = gates_and_illegal_turns(g)?;
    let gr = g.domain();
    let m = transition_matrix(g);
    let pf = is_pf(&m);
    let eigen = if pf {
        json!(pf_data(&m)?.eigenvalue)
    } else {
        Value::Null
    };
    let periodic = gd.periodic_dirs();
    let nonperiodic: Vec<Dir> = gr.dirs().filter(|d| !gd.is_periodic_dir(*d)).collect();
    let tau_inf: BTreeSet<Turn> = taken_turns_infinity(g)?
        .into_iter()
        .filter(|t| !t.is_degenerate())
        .collect();
    let v = json!({
        "schema": "traintrack.gates/1",
        "map": g.to_dsl(),
        "gates": gd.gates.iter().map(|gate| dirs(gr, gate.iter().copied())).collect::<Vec<_>>(),
        "illegal_turns": turns(gr, &gd.illegal_turns),
        "periodic_directions": dirs(gr, periodic),
        "nonperiodic_directions": dirs(gr, nonperiodic.iter().copied()),
        "taken_turns": turns(gr, &taken_turns(g)),
        "taken_turns_infinity": turns(gr, &tau_inf),
        "transition_matrix": m,
        "irreducible": is_irreducible(&m),
        "pf": pf,
        "pf_eigenvalue": eigen,
        "rotationless_power": gd.rotationless_power,
        "train_track": is_train_track(g)?.is_train_track,
    });
    report(
        v,
        format!("illegal turns {}", turn_list(gr, &gd.illegal_turns)),
        Outcome::Ok,
    )
}

/// The decomposition to search along: the given one, or a greedy factorization.
fn decomposition(
    g: &GraphMap,
    d: Option<PffDecomposition>,
) -> CliResult<Result<PffDecomposition, String>> {
    match d {
        Some(d) => Ok(Ok(d)),
        None => match factor_pff(g) {
            Ok(d) => Ok(Ok(d)),
            Err(Error::NotPffFactorable(why)) => Ok(Err(why)),
            Err(e) => Err(e.into()),
        },
    }
}

/// The structure of a map given by flags, or the reason there is none.
fn structure_of(x: &crate::LttCmd) -> CliResult<Result<LttStructure, (Outcome, String)>> {
    if let Some(p) = &x.ltt {
        return Ok(Ok(LttStructure::from_json(&read_json(p)?)?));
    }
    let (g, d) = map_and_chain(&x.input, &x.chain)?;
    if let Some(w) = is_train_track(&g)?.witness {
        return Ok(Err((
            Outcome::Failed,
            format!("not a train track map: {}", witness_text(g.domain(), &w)),
        )));
    }
    let d = match decomposition(&g, d)? {
        Ok(d) => d,
        Err(why) => {
            return Ok(Err((
                Outcome::Inconclusive,
                format!("no fold decomposition: {why}"),
            )))
        }
    };
    match pnp_search(&d, SearchOptions::default())? {
        PnpVerdict::NoPnp { free, .. } => Ok(Ok(ltt_of_map(&g, &free)?)),
        PnpVerdict::CandidateFound { .. } => Ok(Err((
            Outcome::Failed,
            "the map has a periodic Nielsen path".into(),
        ))),
        PnpVerdict::Inconclusive { reason, .. } => Ok(Err((Outcome::Inconclusive, reason))),
    }
}

fn no_structure(schema: &str, outcome: Outcome, why: String) -> CliResult<Report> {
    report(
        json!({ "schema": schema, "error": why }),
        why.clone(),
        outcome,
    )
}

fn ltt(x: &crate::LttCmd) -> CliResult<Report> {
    let s = match structure_of(x)? {
        Ok(s) => s,
        Err((o, why)) => return no_structure("traintrack.ltt-report/1", o, why),
    };
    let g = s.carrier();
    let violations: Vec<Value> = s
        .validate()
        .iter()
        .map(|v| json!({ "axiom": v.axiom, "detail": v.detail }))
        .collect();
    let lone: Vec<Value> = s
        .validate_lone_axis()
        .iter()
        .map(|v| json!({ "axiom": v.axiom, "detail": v.detail }))
        .collect();
    let v = json!({
        "schema": "traintrack.ltt-report/1",
        "ltt": s.to_json(),
        "red_edges": turns(g, &s.red_edges()),
        "purple_edges": turns(g, &s.purple_edges()),
        "violations": violations,
        "lone_axis_violations": lone,
        "birecurrent": s.is_birecurrent(),
        "ideal_whitehead": s.ideal_whitehead().to_json(),
        "canonical_key": s.canonical_key(),
    });
    let summary = format!(
        "{} red vertices, {} colored edges, index {}",
        s.red_vertices().len(),
        s.colored_edges().len(),
        s.index()
    );
    report(v, summary, Outcome::Ok)
}

fn witness(x: &crate::LttCmd) -> CliResult<Report> {
    let s = match structure_of(x)? {
        Ok(s) => s,
        Err((o, why)) => return no_structure("traintrack.witness-loop/1", o, why),
    };
    let g = s.carrier();
    let Some(w) = s.witness_loop() else {
        let v = json!({ "schema": "traintrack.witness-loop/1", "birecurrent": false, "ltt": s.to_json() });
        return report(
            v,
            "not birecurrent: no smooth loop covers every colored edge",
            Outcome::Failed,
        );
    };
    let steps: Vec<Value> = w
        .steps
        .iter()
        .map(|st| match st {
            SmoothStep::Black { dir } => json!({ "black": g.dir_name(*dir) }),
            SmoothStep::Colored { from, to } => {
                json!({ "colored": [g.dir_name(*from), g.dir_name(*to)] })
            }
        })
        .collect();
    let covered: BTreeSet<Turn> = w.colored_turns().into_iter().collect();
    let all: BTreeSet<Turn> = s.colored_edges().keys().copied().collect();
    let v = json!({
        "schema": "traintrack.witness-loop/1",
        "birecurrent": true,
        "steps": steps,
        "black_projection": g.path_name(&w.black_projection()),
        "covers_all_colored_edges": covered == all,
    });
    report(
        v,
        format!(
            "smooth loop of {} steps covering {} colored edges",
            w.steps.len(),
            covered.len()
        ),
        Outcome::Ok,
    )
}

/// Leaves reported per root before the list is cut short.
const MAX_LEAVES: usize = 256;

fn extensions(g: &Graph, ext: &[(u8, Dir)]) -> Vec<Value> {
    ext.iter()
        .map(|&(side, d)| json!({ "side": side, "edge": g.dir_name(d) }))
        .collect()
}

fn leaf(g: &Graph, ext: &[(u8, Dir)], n: &SearchNode) -> Value {
    json!({
        "extensions": extensions(g, ext),
        "stage": n.stage,
        "residual": n.residual.map(|t| turn(g, t)),
        "rule": n.rule,
    })
}

fn leaves<'a>(
    n: &'a SearchNode,
    path: &mut Vec<(u8, Dir)>,
    out: &mut Vec<(Vec<(u8, Dir)>, &'a SearchNode)>,
) {
    if out.len() > MAX_LEAVES {
        return;
    }
    if let Some(e) = n.extension {
        path.push(e);
    }
    if n.children.is_empty() {
        out.push((path.clone(), n));
    }
    for c in &n.children {
        leaves(c, path, out);
    }
    if n.extension.is_some() {
        path.pop();
    }
}

fn branch_summary(g: &Graph, cert: &SearchCertificate) -> Vec<Value> {
    cert.roots
        .iter()
        .map(|r| {
            let (ext, deepest) = deepest_branch(r);
            let mut all = Vec::new();
            leaves(r, &mut Vec::new(), &mut all);
            let truncated = all.len() > MAX_LEAVES;
            all.truncate(MAX_LEAVES);
            json!({
                "root": r.residual.map(|t| turn(g, t)),
                "deepest": leaf(g, &ext, deepest),
                "leaves": all.iter().map(|(p, n)| leaf(g, p, n)).collect::<Vec<_>>(),
                "leaves_truncated": truncated,
            })
        })
        .collect()
}

fn pnp_check(x: &crate::PnpCmd) -> CliResult<Report> {
    let (g, d) = map_and_chain(&x.input, &x.chain)?;
    let d = match decomposition(&g, d)? {
        Ok(d) => d,
        Err(why) => {
            let v = json!({ "schema": "traintrack.pnp-check/1", "map": g.to_dsl(), "verdict": "inconclusive", "reason": why });
            return report(
                v,
                "inconclusive: no fold decomposition",
                Outcome::Inconclusive,
            );
        }
    };
    let verdict = pnp_search(&d, options(&x.search))?;
    let gr = d.start();
    let cert = verdict.certificate();
    let mut v = json!({
        "schema": "traintrack.pnp-check/1",
        "map": g.to_dsl(),
        "decomposition": d.to_dsl(),
        "verdict": verdict.kind(),
        "nodes": cert.roots.iter().map(|r| r.size()).sum::<usize>(),
        "branches": branch_summary(gr, cert),
        "certificate": cert.to_json(gr),
    });
    let (summary, outcome) = match &verdict {
        PnpVerdict::NoPnp { .. } => ("no periodic Nielsen paths".to_string(), Outcome::Ok),
        PnpVerdict::CandidateFound {
            rho1, rho2, stage, ..
        } => {
            v["rho1"] = json!(gr.path_name(rho1));
            v["rho2"] = json!(gr.path_name(rho2));
            v["stage"] = json!(stage);
            (
                format!(
                    "periodic Nielsen path {} / {} at stage {stage}",
                    gr.path_name(rho1),
                    gr.path_name(rho2)
                ),
                Outcome::Failed,
            )
        }
        PnpVerdict::Inconclusive { depth, reason, .. } => {
            v["depth"] = json!(depth);
            v["reason"] = json!(reason);
            (format!("inconclusive: {reason}"), Outcome::Inconclusive)
        }
    };
    report(v, summary, outcome)
}

fn verify_cert(x: &crate::VerifyCmd) -> CliResult<Report> {
    let doc = read_json(&x.certificate)?;
    let doc = if doc.get("pnp_certificate").is_some() {
        doc["pnp_certificate"].clone()
    } else if doc.get("certificate").is_some() {
        doc["certificate"].clone()
    } else {
        doc
    };
    let (g, cert) = SearchCertificate::from_json(&doc)?;
    let d = parse_chain(&cert.chain, &g)?;
    if let Some(m) = crate::input::load_map(&x.input)? {
        if d.compose() != &m {
            return Err(CliError::usage(
                "the certified chain does not compose to the given map",
            ));
        }
    }
    let check = verify_certificate(&d, &cert)?;
    let v = json!({
        "schema": "traintrack.certificate-check/1",
        "map": d.compose().to_dsl(),
        "chain": cert.chain,
        "replay_matches": check.replay_matches,
        "leaves_checked": check.leaves_checked,
        "bad_leaves": check.bad_leaves,
        "ok": check.ok(),
    });
    if check.ok() {
        report(
            v,
            format!("certificate verified ({} leaves)", check.leaves_checked),
            Outcome::Ok,
        )
    } else {
        report(v, "certificate rejected", Outcome::Failed)
    }
}

fn fic(x: &crate::PnpCmd) -> CliResult<Report> {
    let (g, d) = map_and_chain(&x.input, &x.chain)?;
    let verdict = fic_certify(&g, d.as_ref(), options(&x.search))?;
    let outcome = match &verdict {
        FicVerdict::Certified(_) => Outcome::Ok,
        FicVerdict::Failed(_) => Outcome::Failed,
        FicVerdict::Inconclusive { .. } => Outcome::Inconclusive,
    };
    let summary = match &verdict {
        FicVerdict::Certified(r) => format!(
            "certified ageometric fully irreducible: index {}, rank {}, fully singular {}, lone axis {}",
            r.index_sum, r.rank, r.fully_singular, r.lone_axis
        ),
        FicVerdict::Failed(f) => format!("failed: {f:?}"),
        FicVerdict::Inconclusive { reason } => format!("inconclusive: {reason}"),
    };
    report(verdict.to_json(&g), summary, outcome)
}

fn factor(g: &GraphMap) -> CliResult<Report> {
    let d = match factor_pff(g) {
        Ok(d) => d,
        Err(Error::NotPffFactorable(why)) => {
            let v = json!({ "schema": "traintrack.factor/1", "map": g.to_dsl(), "error": why });
            return report(
                v,
                format!("no proper full fold decomposition: {why}"),
                Outcome::Failed,
            );
        }
        Err(e) => return Err(e.into()),
    };
    let rotations = (0..d.len())
        .map(|k| {
            let r = d.rotate(k)?;
            Ok(json!({
                "k": k,
                "map": r.compose().to_dsl(),
                "illegal_turns": turns(r.start(), &decomposition_illegal_turns(&r)),
            }))
        })
        .collect::<traintrack::Result<Vec<_>>>()?;
    let v = json!({
        "schema": "traintrack.factor/1",
        "map": g.to_dsl(),
        "decomposition": d.to_dsl(),
        "folds": d.folds().len(),
        "permutation": d.has_permutation().then(|| d.permutation().to_dsl(d.graph(d.folds().len()))),
        "composes": d.compose() == g,
        "rotations": rotations,
    });
    report(
        v,
        format!("{} proper full folds", d.folds().len()),
        Outcome::Ok,
    )
}

fn compose(x: &crate::ComposeCmd) -> CliResult<Report> {
    let carrier = x.graph.as_deref().map(load_graph).transpose()?;
    let d = load_chain(&x.chain, carrier.as_ref())?
        .ok_or_else(|| CliError::usage("a chain is required (--chain or --chain-file)"))?;
    let g = d.compose();
    let gr = d.start();
    let dm = g.direction_map();
    let image: BTreeSet<Dir> = dm.iter().copied().collect();
    let unachieved: Vec<Dir> = gr.dirs().filter(|d| !image.contains(d)).collect();
    let tau_inf: BTreeSet<Turn> = taken_turns_infinity(g)?
        .into_iter()
        .filter(|t| !t.is_degenerate())
        .collect();
    let mut v = json!({
        "schema": "traintrack.compose/1",
        "chain": d.to_dsl(),
        "map": g.to_dsl(),
        "steps": d.len(),
        "train_track": is_train_track(g)?.is_train_track,
        "illegal_turns": turns(gr, &decomposition_illegal_turns(&d)),
        "unachieved_directions": dirs(gr, unachieved),
        "taken_turns": turns(gr, &decomposition_taken_turns(&d)),
        "taken_turns_infinity": turns(gr, &tau_inf),
    });
    if x.tables {
        let rows: Vec<Value> = (0..d.len())
            .map(|k| {
                let s = d.step(k);
                let before = taken_turns(&d.prefix(k));
                let pushed: BTreeSet<Turn> =
                    before.iter().map(|t| t.map(|y| s.dir_image(y))).filter(|t| !t.is_degenerate()).collect();
                let (name, new) = match &s {
                    Step::Fold(f) => (f.name(d.graph(k)), json!(turn(gr, f.taken_turn()))),
                    Step::Perm(p) => (format!("perm {}", p.to_dsl(d.graph(k))), Value::Null),
                };
                json!({ "step": k + 1, "move": name, "new_turn": new, "pushed_turns": turns(gr, &pushed) })
            })
            .collect();
        v["tables"] = json!(rows);
    }
    let summary = format!("{} steps composing to a map of size {}", d.len(), g.size());
    report(v, summary, Outcome::Ok)
}

/// Decomposition and PNP-freeness token of a certified map given by flags.
fn certified(
    input: &crate::MapInput,
    chain: &crate::ChainInput,
) -> CliResult<(PffDecomposition, PnpFree)> {
    let (g, d) = map_and_chain(input, chain)?;
    let d = decomposition(&g, d)?.map_err(|why| CliError {
        code: EXIT_INCONCLUSIVE,
        message: why,
    })?;
    match pnp_search(&d, SearchOptions::default())? {
        PnpVerdict::NoPnp { free, .. } => Ok((d, free)),
        other => Err(CliError {
            code: EXIT_FAILED,
            message: format!("the map is not PNP-free ({})", other.kind()),
        }),
    }
}

fn build_automaton(x: &crate::BuildCmd) -> CliResult<Report> {
    let var = variant(if x.lone_axis {
        "lone-axis"
    } else {
        "fully-singular"
    })
    .expect("registered variants");
    let has_map = x.input.map.is_some()
        || x.input.map_file.is_some()
        || x.chain.chain.is_some()
        || x.chain.chain_file.is_some();
    let seed = if has_map {
        let (d, free) = certified(&x.input, &x.chain)?;
        Some((ltt_of_map(d.compose(), &free)?, d.compose().clone()))
    } else {
        None
    };
    let mut spec = match (&x.iwg, &seed) {
        (Some(p), _) => IwgSpec::from_json(&read_json(p)?)?,
        (None, Some((_, g))) => IwgSpec::new(whitehead_data(g)?.ideal, g.domain().betti())?,
        (None, None) => return Err(CliError::usage("give --iwg or a seed map")),
    };
    if let Some(r) = x.rank {
        spec = IwgSpec::new(spec.graph, r)?;
    }
    let opts = BuildOptions {
        seeds: seed.into_iter().map(|(s, _)| s).collect(),
        exhaustive: x.exhaustive,
        max_vertices: x.max_vertices,
    };
    let mut a = build(var.as_ref(), &spec, &opts)?;
    if x.drop_invariant {
        a = a.without_invariant();
    }
    let summary = format!(
        "{} vertices, {} edges, {} strongly connected components",
        a.vertices().len(),
        a.edges().len(),
        a.sccs().len()
    );
    report(a.to_json(), summary, Outcome::Ok)
}

fn load_automaton(p: &std::path::Path) -> CliResult<Automaton> {
    Ok(Automaton::from_json(&read_json(p)?)?)
}

fn trace_loop(x: &crate::TraceCmd) -> CliResult<Report> {
    let a = load_automaton(&x.automaton)?;
    let (d, free) = certified(&x.input, &x.chain)?;
    let (l, psi) = decomposition_to_loop(&a, &d, &free)?;
    let mut v = l.to_json();
    v["relabel"] = json!(psi.to_dsl(d.start()));
    v["map"] = json!(d.compose().to_dsl());
    report(
        v,
        format!("loop of {} edges at vertex {}", l.edges.len(), l.start),
        Outcome::Ok,
    )
}

fn sample_loops(x: &crate::SampleCmd) -> CliResult<Report> {
    let a = load_automaton(&x.automaton)?;
    let loops = random_loops(&a, x.count, x.max_walk, x.seed);
    let v = json!({
        "schema": "traintrack.loops/1",
        "seed": x.seed,
        "loops": loops.iter().map(Loop::to_json).collect::<Vec<_>>(),
    });
    report(v, format!("{} loops", loops.len()), Outcome::Ok)
}

fn certify(x: &crate::CertifyCmd) -> CliResult<Report> {
    let a = load_automaton(&x.automaton)?;
    let l = match (&x.loop_file, x.start, &x.edges) {
        (Some(p), None, None) => Loop::from_json(&read_json(p)?)?,
        (None, Some(start), Some(edges)) => Loop {
            start,
            edges: edges.clone(),
        },
        _ => return Err(CliError::usage("give --loop FILE, or --start and --edges")),
    };
    let verdict = certify_loop(&a, &l, options(&x.search))?;
    let (summary, outcome) = match &verdict {
        LoopVerdict::Certified(c) => (
            format!(
                "certified: {} (index {}, lone axis {})",
                c.map.to_dsl(),
                c.index_sum,
                c.lone_axis
            ),
            Outcome::Ok,
        ),
        LoopVerdict::Failed { condition, detail } => {
            (format!("failed {condition}: {detail}"), Outcome::Failed)
        }
        LoopVerdict::Inconclusive { reason } => {
            (format!("inconclusive: {reason}"), Outcome::Inconclusive)
        }
    };
    report(verdict.to_json(&l), summary, outcome)
}

fn export_dot(x: &crate::DotCmd) -> CliResult<Report> {
    if let Some(p) = &x.automaton {
        let a = load_automaton(p)?;
        return text(a.to_dot(), format!("{} vertices", a.vertices().len()));
    }
    let cmd = crate::LttCmd {
        input: x.input.clone(),
        chain: x.chain.clone(),
        ltt: x.ltt.clone(),
        output: x.output.clone(),
    };
    match structure_of(&cmd)? {
        Ok(s) => text(
            s.to_dot("ltt"),
            format!("{} colored edges", s.colored_edges().len()),
        ),
        Err((o, why)) => Err(CliError {
            code: o.code(),
            message: why,
        }),
    }
}
