//! Gates, illegal turns, taken turns and the train track test.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Dir, EdgePath, Turn};
use crate::map::GraphMap;

/// Gate structure and periodicity data of a self-map.
#[derive(Clone, Debug)]
pub struct GateData {
    /// Gates, each a sorted list of directions at one vertex.
    pub gates: Vec<Vec<Dir>>,
    /// Gate index of each direction.
    pub gate_of: Vec<usize>,
    pub illegal_turns: BTreeSet<Turn>,
    /// Period of each direction under `Dg`, if periodic.
    pub dir_period: Vec<Option<usize>>,
    /// Period of each vertex under the vertex map, if periodic.
    pub vertex_period: Vec<Option<usize>>,
    /// Least common multiple of all direction and vertex periods.
    pub rotationless_power: usize,
}

impl GateData {
    pub fn is_periodic_dir(&self, d: Dir) -> bool {
        self.dir_period[d.index()].is_some()
    }
    pub fn periodic_dirs(&self) -> Vec<Dir> {
        (0..self.dir_period.len())
            .map(Dir::from_index)
            .filter(|&d| self.is_periodic_dir(d))
            .collect()
    }
    pub fn is_periodic_vertex(&self, v: usize) -> bool {
        self.vertex_period[v].is_some()
    }
    pub fn is_illegal(&self, t: Turn) -> bool {
        !t.is_degenerate() && self.gate_of[t.0.index()] == self.gate_of[t.1.index()]
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// Period of `x` under `f`, if `x` lies on a cycle.
fn period(f: &[usize], x: usize) -> Option<usize> {
    let mut y = f[x];
    for k in 1..=f.len() {
        if y == x {
            return Some(k);
        }
        y = f[y];
    }
    None
}

fn iterate(f: &[usize], x: usize, k: usize) -> usize {
    (0..k).fold(x, |y, _| f[y])
}

pub fn gates_and_illegal_turns(g: &GraphMap) -> Result<GateData> {
    g.require_self_map()?;
    let gr = g.domain();
    let dm: Vec<usize> = g.direction_map().iter().map(|d| d.index()).collect();
    let n = dm.len();
    // Two directions are eventually identified iff their n-th iterates agree.
    let mut groups: BTreeMap<(usize, usize), Vec<Dir>> = BTreeMap::new();
    for d in gr.dirs() {
        groups
            .entry((gr.init(d), iterate(&dm, d.index(), n)))
            .or_default()
            .push(d);
    }
    let gates: Vec<Vec<Dir>> = groups.into_values().collect();
    let mut gate_of = vec![0; n];
    let mut illegal_turns = BTreeSet::new();
    for (i, gate) in gates.iter().enumerate() {
        for (a, &x) in gate.iter().enumerate() {
            gate_of[x.index()] = i;
            for &y in &gate[a + 1..] {
                illegal_turns.insert(Turn::new(x, y));
            }
        }
    }
    let dir_period: Vec<Option<usize>> = (0..n).map(|x| period(&dm, x)).collect();
    let vm = g.vertex_map();
    let vertex_period: Vec<Option<usize>> = (0..vm.len()).map(|v| period(vm, v)).collect();
    let rotationless_power = dir_period
        .iter()
        .chain(&vertex_period)
        .flatten()
        .fold(1, |a, &p| lcm(a, p));
    Ok(GateData {
        gates,
        gate_of,
        illegal_turns,
        dir_period,
        vertex_period,
        rotationless_power,
    })
}

/// Turns taken by the edge images of `g`, degenerate turns included.
pub fn taken_turns(g: &GraphMap) -> BTreeSet<Turn> {
    g.images().iter().flat_map(EdgePath::taken_turns).collect()
}

/// For each turn taken by some iterate `g^k`, the least such `k ≥ 1`.
pub fn taken_turns_with_first_power(g: &GraphMap) -> Result<BTreeMap<Turn, usize>> {
    g.require_self_map()?;
    let ne = g.domain().num_edges();
    let per_edge: Vec<BTreeSet<Turn>> = g.images().iter().map(EdgePath::taken_turns).collect();
    let supp_of: Vec<Vec<usize>> = g
        .images()
        .iter()
        .map(|p| {
            let s: BTreeSet<usize> = p.0.iter().map(|d| d.edge()).collect();
            s.into_iter().collect()
        })
        .collect();
    let dm = g.direction_map();
    let mut first: BTreeMap<Turn, usize> = BTreeMap::new();
    // State of iterate k: (edges in the support of g^{k-1}, turns of g^k).
    let mut supp: Vec<bool> = vec![true; ne];
    let mut turns: BTreeSet<Turn> = per_edge.iter().flatten().copied().collect();
    let mut seen: HashSet<(Vec<bool>, BTreeSet<Turn>)> = HashSet::new();
    let mut k = 1;
    loop {
        for &t in &turns {
            first.entry(t).or_insert(k);
        }
        if !seen.insert((supp.clone(), turns.clone())) {
            break;
        }
        let mut next_supp = vec![false; ne];
        for e in (0..ne).filter(|&e| supp[e]) {
            for &x in &supp_of[e] {
                next_supp[x] = true;
            }
        }
        let mut next: BTreeSet<Turn> = (0..ne)
            .filter(|&e| next_supp[e])
            .flat_map(|e| per_edge[e].iter().copied())
            .collect();
        next.extend(turns.iter().map(|t| t.map(|d| dm[d.index()])));
        supp = next_supp;
        turns = next;
        k += 1;
    }
    Ok(first)
}

/// All turns taken by some iterate of `g`.
pub fn taken_turns_infinity(g: &GraphMap) -> Result<BTreeSet<Turn>> {
    Ok(taken_turns_with_first_power(g)?.into_keys().collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TtWitness {
    /// An edge image of `g` itself backtracks.
    NonTightImage { edge: usize },
    /// `turn` is taken by `g^taken_at` and degenerates under `Dg^collapse_after`,
    /// so `g^power` has a non-tight edge image with `power = taken_at + collapse_after`.
    IllegalTurn {
        turn: Turn,
        taken_at: usize,
        collapse_after: usize,
        power: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TtVerdict {
    pub is_train_track: bool,
    pub witness: Option<TtWitness>,
}

/// Least `j ≥ 1` with `Dg^j` identifying the two directions of `t`.
fn collapse_time(dm: &[Dir], t: Turn) -> Option<usize> {
    let (mut a, mut b) = (t.0, t.1);
    for j in 1..=dm.len() {
        a = dm[a.index()];
        b = dm[b.index()];
        if a == b {
            return Some(j);
        }
    }
    None
}

pub fn is_train_track(g: &GraphMap) -> Result<TtVerdict> {
    g.require_self_map()?;
    if let Some(e) = g.images().iter().position(|p| !p.is_tight()) {
        return Ok(TtVerdict {
            is_train_track: false,
            witness: Some(TtWitness::NonTightImage { edge: e }),
        });
    }
    let dm = g.direction_map();
    let mut best: Option<TtWitness> = None;
    for (t, k) in taken_turns_with_first_power(g)? {
        if let Some(j) = collapse_time(&dm, t) {
            let better = match &best {
                Some(TtWitness::IllegalTurn { power, .. }) => k + j < *power,
                _ => true,
            };
            if better {
                best = Some(TtWitness::IllegalTurn {
                    turn: t,
                    taken_at: k,
                    collapse_after: j,
                    power: k + j,
                });
            }
        }
    }
    Ok(TtVerdict {
        is_train_track: best.is_none(),
        witness: best,
    })
}

pub(crate) fn require_train_track(g: &GraphMap) -> Result<()> {
    let v = is_train_track(g)?;
    if v.is_train_track {
        Ok(())
    } else {
        Err(Error::NotTrainTrack(format!("{:?}", v.witness)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::parse_map;

    fn names(g: &GraphMap, ts: &BTreeSet<Turn>) -> BTreeSet<String> {
        ts.iter().map(|&t| g.domain().turn_name(t)).collect()
    }

    fn set(xs: &[&str]) -> BTreeSet<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn gates_of_s() {
        let s = parse_map("a->cbca;b->cbc;c->ac", None).unwrap();
        let gd = gates_and_illegal_turns(&s).unwrap();
        assert_eq!(names(&s, &gd.illegal_turns), set(&["{a,b}", "{B,C}"]));
        assert_eq!(gd.rotationless_power, 2);
        let nonper: Vec<String> = s
            .domain()
            .dirs()
            .filter(|&d| !gd.is_periodic_dir(d))
            .map(|d| s.domain().dir_name(d))
            .collect();
        assert_eq!(nonper, vec!["b", "B"]);
    }

    #[test]
    fn turns_of_s() {
        let s = parse_map("a->cbca;b->cbc;c->ac", None).unwrap();
        assert_eq!(
            names(&s, &taken_turns(&s)),
            set(&["{A,c}", "{a,C}", "{b,C}", "{B,c}"])
        );
        assert_eq!(
            names(&s, &taken_turns_infinity(&s).unwrap()),
            set(&["{a,A}", "{A,c}", "{a,C}", "{b,C}", "{B,c}", "{c,C}"])
        );
        assert!(is_train_track(&s).unwrap().is_train_track);
    }

    #[test]
    fn non_train_track_witness() {
        let f = parse_map("a->Ab;b->ab", None).unwrap();
        let v = is_train_track(&f).unwrap();
        assert!(!v.is_train_track);
        let Some(TtWitness::IllegalTurn { power, .. }) = v.witness else {
            panic!()
        };
        assert!(!f.power(power).unwrap().is_tight());
        assert!(f.power(power - 1).unwrap().is_tight());
    }
}
