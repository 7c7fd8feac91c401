//! Dense symmetric eigenvalues: Householder reduction to tridiagonal form
//! followed by the implicit QL iteration.

use crate::error::{Error, Result};

/// Symmetric matrix stored as its packed lower triangle, row by row.
#[derive(Debug, Clone, PartialEq)]
pub struct PackedSymmetric {
    n: usize,
    data: Vec<f64>,
}

impl PackedSymmetric {
    pub fn zeros(n: usize) -> Self {
        PackedSymmetric {
            n,
            data: vec![0.0; n * (n + 1) / 2],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn offset(i: usize) -> usize {
        i * (i + 1) / 2
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        self.data[Self::offset(i) + j]
    }

    pub fn add(&mut self, i: usize, j: usize, x: f64) {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        self.data[Self::offset(i) + j] += x;
    }

    fn row_mut(&mut self, i: usize) -> &mut [f64] {
        let o = Self::offset(i);
        &mut self.data[o..o + i + 1]
    }

    /// Eigenvalues in ascending order. Consumes the matrix.
    pub fn eigenvalues(mut self) -> Result<Vec<f64>> {
        let (d, e) = self.tridiagonalize();
        tridiagonal_eigenvalues(d, e)
    }

    /// Householder reduction. Returns the diagonal and the subdiagonal
    /// (`e[i]` couples `i - 1` and `i`, `e[0] = 0`).
    ///
    /// Each step's rank-two update of the remaining block is applied lazily in
    /// the same sweep that computes the next step's matrix-vector product, so
    /// the packed matrix is streamed through memory once per step.
    fn tridiagonalize(&mut self) -> (Vec<f64>, Vec<f64>) {
        let n = self.n;
        let mut d = vec![0.0; n];
        let mut e = vec![0.0; n];
        if n == 0 {
            return (d, e);
        }
        let mut pending: Option<(Vec<f64>, Vec<f64>)> = None;
        let mut p = vec![0.0; n];
        for i in (1..n).rev() {
            if let Some((u, q)) = &pending {
                apply_update(self.row_mut(i), u, q, i);
            }
            let row = self.row_mut(i);
            d[i] = row[i];
            let x = &row[..i];
            let norm2: f64 = x.iter().map(|v| v * v).sum();
            let l = i - 1;
            if i == 1 || norm2 == 0.0 {
                e[i] = x[l];
                if let Some((u, q)) = pending.take() {
                    for j in 0..i {
                        apply_update(self.row_mut(j), &u, &q, j);
                    }
                }
                continue;
            }
            let alpha = -x[l].signum() * norm2.sqrt();
            e[i] = alpha;
            let h = norm2 - x[l] * alpha;
            let mut u = x.to_vec();
            u[l] -= alpha;
            let p = &mut p[..i];
            p.fill(0.0);
            let prev = pending.take();
            for j in 0..i {
                let row = self.row_mut(j);
                if let Some((pu, pq)) = &prev {
                    apply_update(row, pu, pq, j);
                }
                // row j of the lower triangle holds A[j][0..=j]
                let uj = u[j];
                p[j] += row[j] * uj + dot_axpy(&row[..j], &u[..j], &mut p[..j], uj);
            }
            let mut k_dot = 0.0;
            for (pk, &uk) in p.iter_mut().zip(&u) {
                *pk /= h;
                k_dot += *pk * uk;
            }
            let k = k_dot / (2.0 * h);
            let q: Vec<f64> = p.iter().zip(&u).map(|(&pk, &uk)| pk - k * uk).collect();
            pending = Some((u, q));
        }
        if let Some((u, q)) = pending.take() {
            apply_update(self.row_mut(0), &u, &q, 0);
        }
        d[0] = self.data[0];
        (d, e)
    }
}

/// Returns `a · u` and adds `s * a` into `p`, with independent partial sums
/// so the reduction vectorizes.
#[inline]
fn dot_axpy(a: &[f64], u: &[f64], p: &mut [f64], s: f64) -> f64 {
    let mut acc = [0.0f64; 8];
    let chunks = a.len() / 8;
    for c in 0..chunks {
        let r = c * 8..c * 8 + 8;
        let (a8, u8, p8) = (&a[r.clone()], &u[r.clone()], &mut p[r]);
        for l in 0..8 {
            acc[l] += a8[l] * u8[l];
            p8[l] += a8[l] * s;
        }
    }
    let mut tail = 0.0;
    for k in chunks * 8..a.len() {
        tail += a[k] * u[k];
        p[k] += a[k] * s;
    }
    acc.iter().sum::<f64>() + tail
}

/// `row[k] -= u[j] q[k] + q[j] u[k]` for `k <= j`.
#[inline]
fn apply_update(row: &mut [f64], u: &[f64], q: &[f64], j: usize) {
    let (uj, qj) = (u[j], q[j]);
    for ((a, &uk), &qk) in row[..=j].iter_mut().zip(&u[..=j]).zip(&q[..=j]) {
        *a -= uj * qk + qj * uk;
    }
}

/// Eigenvalues of a symmetric tridiagonal matrix by implicit QL with Wilkinson
/// shifts. `e[i]` couples `i - 1` and `i`.
pub fn tridiagonal_eigenvalues(mut d: Vec<f64>, mut e: Vec<f64>) -> Result<Vec<f64>> {
    let n = d.len();
    if n == 0 {
        return Ok(d);
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 100 {
                return Err(Error::NonConvergence("tridiagonal QL iteration".into()));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_unstable_by(f64::total_cmp);
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from_dense(a: &[&[f64]]) -> PackedSymmetric {
        let n = a.len();
        let mut m = PackedSymmetric::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                m.add(i, j, a[i][j]);
            }
        }
        m
    }

    #[test]
    fn small_matrices() {
        let ev = from_dense(&[&[0.0, 1.0], &[1.0, 0.0]]).eigenvalues().unwrap();
        assert!((ev[0] + 1.0).abs() < 1e-14 && (ev[1] - 1.0).abs() < 1e-14);
        let tri = from_dense(&[&[0.0, 1.0, 1.0], &[1.0, 0.0, 1.0], &[1.0, 1.0, 0.0]]);
        let ev = tri.eigenvalues().unwrap();
        for (a, b) in ev.iter().zip([-1.0, -1.0, 2.0]) {
            assert!((a - b).abs() < 1e-12, "{ev:?}");
        }
        let ev = from_dense(&[&[3.0]]).eigenvalues().unwrap();
        assert_eq!(ev, vec![3.0]);
    }

    #[test]
    fn diagonal_and_tridiagonal_inputs() {
        let ev = from_dense(&[&[2.0, 0.0, 0.0], &[0.0, -1.0, 0.0], &[0.0, 0.0, 5.0]])
            .eigenvalues()
            .unwrap();
        assert_eq!(ev, vec![-1.0, 2.0, 5.0]);
        // path on 5 vertices: 2 cos(k pi / 6)
        let d = vec![0.0; 5];
        let e = vec![0.0, 1.0, 1.0, 1.0, 1.0];
        let ev = tridiagonal_eigenvalues(d, e).unwrap();
        let mut want: Vec<f64> = (1..=5)
            .map(|k| 2.0 * (k as f64 * std::f64::consts::PI / 6.0).cos())
            .collect();
        want.sort_unstable_by(f64::total_cmp);
        for (a, b) in ev.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
