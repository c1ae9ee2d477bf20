//! Transition matrices and their Perron-Frobenius data.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::map::GraphMap;
use crate::scc;

/// `M[i][j]` counts the occurrences of edge `j`, in either orientation, in the image of edge `i`.
pub fn transition_matrix(g: &GraphMap) -> Vec<Vec<u64>> {
    let n = g.codomain().num_edges();
    g.images()
        .iter()
        .map(|p| {
            let mut row = vec![0; n];
            for d in &p.0 {
                row[d.edge()] += 1;
            }
            row
        })
        .collect()
}

fn support(m: &[Vec<u64>]) -> Vec<Vec<usize>> {
    m.iter()
        .map(|row| (0..row.len()).filter(|&j| row[j] > 0).collect())
        .collect()
}

pub fn is_irreducible(m: &[Vec<u64>]) -> bool {
    !m.is_empty() && scc::tarjan(&support(m)).len() == 1
}

fn bool_mul(a: &[Vec<bool>], b: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let n = a.len();
    let mut c = vec![vec![false; n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] {
                for j in 0..n {
                    c[i][j] |= b[k][j];
                }
            }
        }
    }
    c
}

/// Primitive: some power is strictly positive. Checked at the Wielandt bound `(n-1)^2 + 1`.
pub fn is_pf(m: &[Vec<u64>]) -> bool {
    let n = m.len();
    if n == 0 {
        return false;
    }
    let mut exp = (n - 1) * (n - 1) + 1;
    let mut base: Vec<Vec<bool>> = m
        .iter()
        .map(|r| r.iter().map(|&x| x > 0).collect())
        .collect();
    let mut acc: Option<Vec<Vec<bool>>> = None;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = Some(match acc {
                None => base.clone(),
                Some(a) => bool_mul(&a, &base),
            });
        }
        exp >>= 1;
        if exp > 0 {
            base = bool_mul(&base, &base);
        }
    }
    acc.unwrap().iter().all(|r| r.iter().all(|&x| x))
}

/// Edges whose image lengths stay bounded under iteration.
pub fn bounded_edges(m: &[Vec<u64>]) -> Vec<usize> {
    let adj = support(m);
    let (id, comps) = scc::component_ids(&adj);
    // A cyclic component is closed simple when it is a single cycle with unit weights and no exits.
    let closed_simple: Vec<bool> = comps
        .iter()
        .map(|c| {
            scc::is_cyclic(&adj, c)
                && c.iter().all(|&i| {
                    let row = &m[i];
                    row.iter().sum::<u64>() == 1
                        && c.contains(&row.iter().position(|&x| x > 0).unwrap())
                })
        })
        .collect();
    let n = m.len();
    (0..n)
        .filter(|&e| {
            let mut seen = vec![false; n];
            let mut stack = vec![e];
            seen[e] = true;
            while let Some(v) = stack.pop() {
                let c = id[v];
                if scc::is_cyclic(&adj, &comps[c]) && !closed_simple[c] {
                    return false;
                }
                for &w in &adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            true
        })
        .collect()
}

/// Every edge has unbounded image length under iteration.
pub fn is_expanding(m: &[Vec<u64>]) -> bool {
    bounded_edges(m).is_empty()
}

#[derive(Clone, Debug, Serialize)]
pub struct PfData {
    pub eigenvalue: f64,
    /// Right eigenvector `Mv = λv`, normalized to sum 1.
    pub right: Vec<f64>,
    /// Left eigenvector `wM = λw`, normalized to sum 1.
    pub left: Vec<f64>,
    pub residual: f64,
}

pub const PF_TOLERANCE: f64 = 1e-12;

fn power_iterate(m: &[Vec<f64>]) -> Result<(f64, Vec<f64>, f64)> {
    let n = m.len();
    let mut v = vec![1.0 / n as f64; n];
    let mut lambda = 0.0;
    for _ in 0..200_000 {
        let w: Vec<f64> = (0..n)
            .map(|i| (0..n).map(|j| m[i][j] * v[j]).sum())
            .collect();
        let s: f64 = w.iter().sum();
        if !(s > 0.0) {
            return Err(Error::Numerical("power iteration collapsed".into()));
        }
        lambda = s;
        let next: Vec<f64> = w.iter().map(|x| x / s).collect();
        let res = residual(m, &next, lambda);
        v = next;
        if res <= PF_TOLERANCE {
            return Ok((lambda, v, res));
        }
    }
    let res = residual(m, &v, lambda);
    Err(Error::Numerical(format!(
        "power iteration did not converge (residual {res:e})"
    )))
}

/// `‖Mv − λv‖∞ / (λ‖v‖∞)`.
fn residual(m: &[Vec<f64>], v: &[f64], lambda: f64) -> f64 {
    let n = v.len();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let mv: f64 = (0..n).map(|j| m[i][j] * v[j]).sum();
        worst = worst.max((mv - lambda * v[i]).abs());
    }
    let norm = v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    worst / (lambda * norm)
}

pub fn pf_data(m: &[Vec<u64>]) -> Result<PfData> {
    if !is_pf(m) {
        return Err(Error::Precondition(
            "transition matrix is not Perron-Frobenius".into(),
        ));
    }
    let n = m.len();
    let mf: Vec<Vec<f64>> = m
        .iter()
        .map(|r| r.iter().map(|&x| x as f64).collect())
        .collect();
    let mt: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| mf[j][i]).collect()).collect();
    let (eigenvalue, right, r1) = power_iterate(&mf)?;
    let (_, left, r2) = power_iterate(&mt)?;
    Ok(PfData {
        eigenvalue,
        right,
        left,
        residual: r1.max(r2),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::parse_map;

    #[test]
    fn matrix_of_s() {
        let s = parse_map("a->cbca;b->cbc;c->ac", None).unwrap();
        let m = transition_matrix(&s);
        assert_eq!(m, vec![vec![1, 1, 2], vec![0, 1, 2], vec![1, 0, 1]]);
        assert!(is_irreducible(&m));
        assert!(is_pf(&m));
        assert!(is_expanding(&m));
    }

    #[test]
    fn reducible_and_bounded() {
        // a->ab, b->b: b is fixed, a grows linearly.
        let m = vec![vec![1, 1], vec![0, 1]];
        assert!(!is_irreducible(&m));
        assert_eq!(bounded_edges(&m), vec![1]);
        // Permutation: irreducible, not primitive, all bounded.
        let p = vec![vec![0, 1], vec![1, 0]];
        assert!(is_irreducible(&p));
        assert!(!is_pf(&p));
        assert_eq!(bounded_edges(&p), vec![0, 1]);
        assert!(pf_data(&p).is_err());
    }

    #[test]
    fn golden_ratio() {
        let m = vec![vec![1, 1], vec![1, 0]];
        let pf = pf_data(&m).unwrap();
        assert!((pf.eigenvalue - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-12);
        assert!(pf.residual <= PF_TOLERANCE);
    }

    #[test]
    fn wielandt_extremal() {
        // The Wielandt matrix needs exactly (n-1)^2 + 1 steps to become positive.
        let n = 5;
        let mut m = vec![vec![0u64; n]; n];
        for i in 0..n - 1 {
            m[i][i + 1] = 1;
        }
        m[n - 1][0] = 1;
        m[n - 1][1] = 1;
        assert!(is_pf(&m));
    }
}
