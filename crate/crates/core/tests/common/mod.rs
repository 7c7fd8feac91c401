//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use lwc::assignment::CostMatrix;
use lwc::graph::{RootedTree, NO_PARENT};
use num_complex::Complex64;

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    // lexicographic order
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in 0..n {
        for rest in permutations(n - 1) {
            let mut p = vec![first];
            p.extend(rest.into_iter().map(|x| if x >= first { x + 1 } else { x }));
            out.push(p);
        }
    }
    out
}

/// Lexicographically smallest optimal permutation by exhaustive search.
pub fn brute_force(m: &CostMatrix, perms: &[Vec<usize>]) -> (Vec<usize>, f64) {
    let best = perms.iter().map(|p| m.cost_of(p)).fold(f64::INFINITY, f64::min);
    let tol = 1e-9 * (1.0 + best.abs());
    let p = perms.iter().find(|p| m.cost_of(p) <= best + tol).unwrap();
    (p.clone(), best)
}

/// All growth sequences of a recursive tree on `n` vertices, each with
/// probability 1/(n-1)!.
pub fn all_recursive_trees(n: usize) -> Vec<RootedTree> {
    let mut out = vec![vec![NO_PARENT]];
    for i in 1..n {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..i).map(move |q| {
                    let mut p = p.clone();
                    p.push(q);
                    p
                })
            })
            .collect();
    }
    out.into_iter().map(RootedTree::from_growth).collect()
}

/// Inverse of a dense complex matrix by Gauss-Jordan with partial pivoting.
pub fn dense_inverse(mut a: Vec<Vec<Complex64>>) -> Vec<Vec<Complex64>> {
    let n = a.len();
    let mut inv: Vec<Vec<Complex64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| Complex64::new(f64::from(u8::from(i == j)), 0.0))
                .collect()
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&x, &y| a[x][col].norm().total_cmp(&a[y][col].norm()))
            .unwrap();
        a.swap(col, piv);
        inv.swap(col, piv);
        let d = a[col][col];
        for j in 0..n {
            a[col][j] /= d;
            inv[col][j] /= d;
        }
        for i in 0..n {
            if i != col {
                let f = a[i][col];
                if f != Complex64::new(0.0, 0.0) {
                    for j in 0..n {
                        let (ac, ic) = (a[col][j], inv[col][j]);
                        a[i][j] -= f * ac;
                        inv[i][j] -= f * ic;
                    }
                }
            }
        }
    }
    inv
}

pub fn shifted_adjacency(t: &RootedTree, z: Complex64) -> Vec<Vec<Complex64>> {
    let n = t.n();
    let mut a = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for v in 0..n {
        a[v][v] = -z;
        if let Some(p) = t.parent(v) {
            a[v][p] += 1.0;
            a[p][v] += 1.0;
        }
    }
    a
}
