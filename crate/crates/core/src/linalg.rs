//! Thin wrappers over nalgebra's Hermitian eigensolver that return
//! ascending eigenvalues.

use alloc::vec::Vec;

use nalgebra::DMatrix;
// float methods are inherent whenever std is linked anywhere in the build
#[allow(unused_imports)]
use num_traits::Float;

use crate::lattice::C64;

pub fn hermitian_eigenvalues(m: DMatrix<C64>) -> Vec<f64> {
    let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Ascending eigenvalues of a Hermitian cyclic tridiagonal matrix: nonzeros
/// only on the diagonal and between ring neighbours `k`, `k ± 1 (mod n)`.
///
/// The zig-zag ordering `0, 1, n-1, 2, n-2, …` turns the ring into a band of
/// half-width two, which Givens bulge chasing reduces to tridiagonal form in
/// `O(n²)`. A diagonal phase gauge makes the tridiagonal real and implicit QL
/// finishes. Falls back to the dense solver if QL fails to converge.
pub fn cyclic_tridiagonal_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    let n = m.nrows();
    if n == 0 {
        return Vec::new();
    }
    let mut order = alloc::vec![0];
    let (mut lo, mut hi) = (1, n - 1);
    while lo <= hi {
        order.push(lo);
        lo += 1;
        if lo <= hi {
            order.push(hi);
            hi -= 1;
        }
    }
    let mut a: Vec<C64> = Vec::with_capacity(n * n);
    for c in 0..n {
        for r in 0..n {
            a.push(m[(order[r], order[c])]);
        }
    }
    debug_assert!((0..n).all(|c| (0..n).all(|r| r.abs_diff(c) <= 2 || a[r + c * n] == C64::new(0.0, 0.0))));

    // Rotates planes (i, i+1) so that entry (i+1, col) vanishes.
    let rotate = |a: &mut Vec<C64>, i: usize, col: usize| {
        let at = |r: usize, c: usize| r + c * n;
        let (x, b) = (a[at(i, col)], a[at(i + 1, col)]);
        if b == C64::new(0.0, 0.0) {
            return;
        }
        let (xn, bn) = (x.norm_sqr().sqrt(), b.norm_sqr().sqrt());
        let norm = hypot(xn, bn);
        let (c, s) = if xn == 0.0 { (0.0, b.conj() / bn) } else { (xn / norm, x / xn * b.conj() / norm) };
        // rows i and i+1 are nonzero only within the band plus one bulge
        let window = i.saturating_sub(3)..(i + 5).min(n);
        for k in window.clone() {
            let (u, v) = (a[at(i, k)], a[at(i + 1, k)]);
            a[at(i, k)] = u * c + s * v;
            a[at(i + 1, k)] = -s.conj() * u + v * c;
        }
        for k in window {
            let (u, v) = (a[at(k, i)], a[at(k, i + 1)]);
            a[at(k, i)] = u * c + v * s.conj();
            a[at(k, i + 1)] = -u * s + v * c;
        }
        a[at(i + 1, col)] = C64::new(0.0, 0.0);
        a[at(col, i + 1)] = C64::new(0.0, 0.0);
    };
    for k in 0..n.saturating_sub(2) {
        rotate(&mut a, k + 1, k);
        // the bulge at (j+3, j) moves two rows down per rotation
        let mut j = k + 1;
        while j + 3 < n {
            rotate(&mut a, j + 2, j);
            j += 2;
        }
    }

    let mut d: Vec<f64> = (0..n).map(|k| a[k + k * n].re).collect();
    let mut e: Vec<f64> = (0..n).map(|k| if k + 1 < n { a[k + 1 + k * n].norm_sqr().sqrt() } else { 0.0 }).collect();
    if !tridiagonal_ql(&mut d, &mut e) {
        return hermitian_eigenvalues(m.clone());
    }
    d.sort_by(f64::total_cmp);
    d
}

// Entries are O(1) here, so the overflow guard of a library hypot (slow in
// the software float path) buys nothing.
fn hypot(a: f64, b: f64) -> f64 {
    (a * a + b * b).sqrt()
}

/// Implicit QL with Wilkinson shifts on a real symmetric tridiagonal;
/// `e[k]` couples `k` and `k + 1`. Eigenvalues are left in `d`, unsorted.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64]) -> bool {
    let n = d.len();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() + dd == dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return false;
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + if g >= 0.0 { r } else { -r });
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = hypot(f, g);
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
    true
}

/// Eigenvalues in ascending order with the matching unit eigenvectors as columns.
pub fn hermitian_eigen(m: DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let eig = m.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(eig.eigenvectors.nrows(), order.len(), |r, c| {
        eig.eigenvectors[(r, order[c])]
    });
    (values, vectors)
}

pub fn hermiticity_residual(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for a in 0..n {
        for b in a..n {
            worst = worst.max((m[(a, b)] - m[(b, a)].conj()).norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_pairs_are_sorted_and_consistent() {
        let m = DMatrix::from_row_slice(
            3,
            3,
            &[
                C64::new(2.0, 0.0),
                C64::new(0.0, 1.0),
                C64::new(0.5, 0.0),
                C64::new(0.0, -1.0),
                C64::new(-1.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.5, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.3, 0.0),
            ],
        );
        let (vals, vecs) = hermitian_eigen(m.clone());
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        for (k, &e) in vals.iter().enumerate() {
            let v = vecs.column(k);
            let r = &m * v - v * C64::new(e, 0.0);
            assert!(r.norm() < 1e-12);
        }
        let only = hermitian_eigenvalues(m);
        for (a, b) in only.iter().zip(&vals) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    fn cyclic(n: usize, seed: u64) -> DMatrix<C64> {
        // small deterministic LCG keeps the test free of extra dependencies
        let mut x = seed;
        let mut next = move || {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (x >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let mut m = DMatrix::from_element(n, n, C64::new(0.0, 0.0));
        for k in 0..n {
            m[(k, k)] += C64::new(next(), 0.0);
            let j = (k + 1) % n;
            let z = C64::new(next(), next());
            if j == k {
                m[(k, k)] += z + z.conj();
            } else {
                m[(j, k)] += z;
                m[(k, j)] += z.conj();
            }
        }
        m
    }

    #[test]
    fn cyclic_path_matches_dense_solver() {
        for n in 1..24 {
            let m = cyclic(n, n as u64);
            let fast = cyclic_tridiagonal_eigenvalues(&m);
            let dense = hermitian_eigenvalues(m);
            assert_eq!(fast.len(), n);
            for (a, b) in fast.iter().zip(&dense) {
                assert!((a - b).abs() < 1e-13, "n = {n}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn cyclic_path_resolves_degenerate_spectra() {
        let mut m = DMatrix::from_element(6, 6, C64::new(0.0, 0.0));
        for k in 0..6 {
            m[((k + 1) % 6, k)] = C64::new(1.0, 0.0);
            m[(k, (k + 1) % 6)] = C64::new(1.0, 0.0);
        }
        let ev = cyclic_tridiagonal_eigenvalues(&m);
        let expect = [-2.0, -1.0, -1.0, 1.0, 1.0, 2.0];
        for (a, b) in ev.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-14);
        }
    }
}
