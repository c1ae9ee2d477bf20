//! Shared generators and direct computations for the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use traintrack::pff::{Fold, PffDecomposition};
use traintrack::{Dir, EdgePath, EdgePermutation, Graph, GraphMap, Turn};

/// A random chain of proper full folds on the rank `r` rose, closed by a random signed permutation.
pub fn random_chain(rng: &mut impl Rng, r: usize, folds: usize) -> PffDecomposition {
    let g = Graph::standard_rose(r);
    let fs: Vec<Fold> = (0..folds)
        .map(|_| {
            let e = rng.gen_range(0..r);
            let mut e2 = rng.gen_range(0..r - 1);
            if e2 >= e {
                e2 += 1;
            }
            Fold::new(Dir::new(e, rng.gen()), Dir::new(e2, rng.gen()))
        })
        .collect();
    let mut order: Vec<usize> = (0..r).collect();
    order.shuffle(rng);
    let perm = rng.gen_bool(0.5).then(|| {
        EdgePermutation::on_rose(order.iter().map(|&i| Dir::new(i, rng.gen())).collect())
            .expect("signed permutation")
    });
    PffDecomposition::new(g, fs, perm).expect("folds on a rose are proper")
}

/// The image of a direction under one fold, written out by hand: `E ↦ E'E`, `Ē ↦ ĒĒ'`.
fn fold_image(f: Fold, d: Dir) -> Vec<Dir> {
    if d == f.folded {
        vec![f.over, d]
    } else if d == f.folded.rev() {
        vec![d, f.over.rev()]
    } else {
        vec![d]
    }
}

/// Edge images of the composite chain by direct substitution, without tightening.
pub fn substituted_images(d: &PffDecomposition) -> Vec<Vec<Dir>> {
    let r = d.start().num_edges();
    (0..r)
        .map(|e| {
            let mut w = vec![Dir::pos(e)];
            for f in d.folds() {
                w = w.iter().flat_map(|&x| fold_image(*f, x)).collect();
            }
            w.iter().map(|&x| d.permutation().apply(x)).collect()
        })
        .collect()
}

/// Turns `{x̄, y}` at consecutive letters `x y`, degenerate ones included.
pub fn turns_of(words: &[Vec<Dir>]) -> BTreeSet<Turn> {
    words
        .iter()
        .flat_map(|w| w.windows(2).map(|p| Turn::new(p[0].rev(), p[1])))
        .collect()
}

/// The direction map read off the first letters of edge images.
pub fn first_letters(words: &[Vec<Dir>]) -> Vec<Dir> {
    let n = words.len() * 2;
    (0..n)
        .map(|i| {
            let d = Dir::from_index(i);
            let w = &words[d.edge()];
            if d.is_reversed() {
                w.last().unwrap().rev()
            } else {
                w[0]
            }
        })
        .collect()
}

/// Turns identified by some iterate of the direction map.
pub fn orbit_illegal_turns(dm: &[Dir]) -> BTreeSet<Turn> {
    let n = dm.len();
    let mut out = BTreeSet::new();
    for i in 0..n {
        for j in i + 1..n {
            let (mut a, mut b) = (Dir::from_index(i), Dir::from_index(j));
            for _ in 0..n * n {
                a = dm[a.index()];
                b = dm[b.index()];
                if a == b {
                    out.insert(Turn::new(Dir::from_index(i), Dir::from_index(j)));
                    break;
                }
            }
        }
    }
    out
}

/// Free reduction with a stack, written independently of the library.
pub fn reduce(w: &[Dir]) -> Vec<Dir> {
    let mut out: Vec<Dir> = Vec::new();
    for &x in w {
        match out.last() {
            Some(&y) if y == x.rev() => {
                out.pop();
            }
            _ => out.push(x),
        }
    }
    out
}

/// `g_#(ρ)`: the reduced image of a path.
pub fn push_path(images: &[Vec<Dir>], rho: &[Dir]) -> Vec<Dir> {
    let mut w = Vec::new();
    for &x in rho {
        let im = &images[x.edge()];
        if x.is_reversed() {
            w.extend(im.iter().rev().map(|d| d.rev()));
        } else {
            w.extend(im.iter().copied());
        }
    }
    reduce(&w)
}

pub fn images_of(g: &GraphMap) -> Vec<Vec<Dir>> {
    g.images().iter().map(|p| p.0.clone()).collect()
}

pub fn path(w: &[Dir]) -> EdgePath {
    EdgePath(w.to_vec())
}
