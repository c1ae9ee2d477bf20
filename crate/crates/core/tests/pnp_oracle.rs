//! Nielsen path search verdicts against exhaustive search over short tight loops.

mod common;

use std::time::Instant;

use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use traintrack::catalog::chain_s;
use traintrack::matrix::{is_pf, transition_matrix};
use traintrack::pff::PffDecomposition;
use traintrack::pnp::{pnp_search, PnpVerdict, SearchOptions};
use traintrack::train_track::is_train_track;
use traintrack::Dir;

const MAX_RHO: usize = 8;
const MAX_IMAGE: usize = 6;
const MAX_PERIOD: usize = 12;
/// Orbit members longer than this are abandoned. Expanding maps rarely shrink a path back.
const MAX_ORBIT_LEN: usize = 96;

/// `g_#(ρ)` into `out`, abandoned once the result must exceed `cap` letters.
fn push_capped(images: &[Vec<Dir>], rho: &[Dir], cap: usize, out: &mut Vec<Dir>) -> bool {
    out.clear();
    let mut remaining: usize = rho.iter().map(|x| images[x.edge()].len()).sum();
    for &x in rho {
        let im = &images[x.edge()];
        remaining -= im.len();
        for i in 0..im.len() {
            let d = if x.is_reversed() {
                im[im.len() - 1 - i].rev()
            } else {
                im[i]
            };
            if out.last() == Some(&d.rev()) {
                out.pop();
            } else {
                out.push(d);
            }
        }
        // Each remaining letter cancels at most one letter already written.
        if out.len() > cap + remaining {
            return false;
        }
    }
    true
}

fn is_periodic(images: &[Vec<Dir>], rho: &[Dir]) -> bool {
    let (mut cur, mut next) = (rho.to_vec(), Vec::new());
    for _ in 0..MAX_PERIOD {
        if !push_capped(images, &cur, MAX_ORBIT_LEN, &mut next) {
            return false;
        }
        std::mem::swap(&mut cur, &mut next);
        if cur == rho {
            return true;
        }
        if cur.is_empty() {
            return false;
        }
    }
    false
}

/// Depth first over tight loops extending `rho`. A loop and its reverse are periodic together,
/// so only the lexicographically smaller of the two is pushed forward.
fn search(images: &[Vec<Dir>], dirs: &[Dir], rho: &mut Vec<Dir>) -> Option<Vec<Dir>> {
    let rev: Vec<Dir> = rho.iter().rev().map(|d| d.rev()).collect();
    if *rho <= rev && is_periodic(images, rho) {
        return Some(rho.clone());
    }
    if rho.len() < MAX_RHO {
        let last = *rho.last().unwrap();
        for &d in dirs {
            if d != last.rev() {
                rho.push(d);
                let found = search(images, dirs, rho);
                rho.pop();
                if found.is_some() {
                    return found;
                }
            }
        }
    }
    None
}

/// A tight loop `ρ` at the rose vertex of length at most `MAX_RHO` with `g_#^R(ρ) = ρ` for some `R ≤ MAX_PERIOD`.
fn brute_force_pnp(images: &[Vec<Dir>]) -> Option<Vec<Dir>> {
    let dirs: Vec<Dir> = (0..images.len() * 2).map(Dir::from_index).collect();
    dirs.iter()
        .find_map(|&d| search(images, &dirs, &mut vec![d]))
}

fn family(count: usize) -> Vec<PffDecomposition> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0a11);
    let mut out = vec![chain_s()];
    let mut tries = 0;
    while out.len() < count && tries < 100_000 {
        tries += 1;
        let n = rng.gen_range(2..=5);
        let d = random_chain(&mut rng, 3, n);
        let g = d.compose();
        // The search targets expanding irreducible maps; a fixed edge is a legal Nielsen path it does not look for.
        if g.images().iter().any(|p| p.len() > MAX_IMAGE)
            || !is_train_track(g).unwrap().is_train_track
            || !is_pf(&transition_matrix(g))
        {
            continue;
        }
        if out.iter().any(|e| e.compose() == g) {
            continue;
        }
        out.push(d);
    }
    out
}

#[test]
fn no_pnp_verdicts_survive_exhaustive_search() {
    let t = Instant::now();
    let (mut free, mut found, mut open) = (0, 0, 0);
    for d in family(40) {
        let images = images_of(d.compose());
        match pnp_search(&d, SearchOptions::default()).unwrap() {
            PnpVerdict::NoPnp { .. } => {
                free += 1;
                if let Some(rho) = brute_force_pnp(&images) {
                    panic!(
                        "{} has the periodic Nielsen path {:?}",
                        d.compose().to_dsl(),
                        path(&rho)
                    );
                }
                // A Nielsen path of the composite would push forward to every rotation.
                for k in 1..d.len() {
                    let v = pnp_search(&d.rotate(k).unwrap(), SearchOptions::default()).unwrap();
                    assert_eq!(v.kind(), "no_pnp", "rotation {k} of {}", d.to_dsl());
                }
            }
            PnpVerdict::CandidateFound { .. } => found += 1,
            PnpVerdict::Inconclusive { .. } => open += 1,
        }
    }
    eprintln!(
        "no pnp {free}, candidates {found}, inconclusive {open}, {:?}",
        t.elapsed()
    );
    assert!(free >= 5, "too few PNP-free maps in the family ({free})");
    assert!(t.elapsed().as_secs() < 60);
}

#[test]
fn exhaustive_search_finds_planted_nielsen_paths() {
    // a -> ab, b -> b: the loop b is fixed.
    let g = traintrack::parse_map("a->ab;b->b;c->ca", None).unwrap();
    assert!(brute_force_pnp(&images_of(&g)).is_some());
}
