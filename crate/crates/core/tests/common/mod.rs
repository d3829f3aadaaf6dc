//! Independent reference implementations used by the integration suites.
//!
//! Nothing here calls into the crate's vertex or hopping code: the density
//! equation is evaluated by brute-force summation over every index with its
//! own vertex functions, and gap labels come from the Diophantine relation.
#![allow(dead_code)]

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64 as C;
use rand::Rng;

#[derive(Clone, Copy)]
pub struct Model {
    pub l: usize,
    pub lambda: f64,
    pub omega: f64,
    pub delta: f64,
    pub kappa: f64,
    pub phi: f64,
}

type S = (i64, i64);

impl Model {
    fn inside(&self, s: S) -> bool {
        let l = self.l as i64;
        (0..l).contains(&s.0) && (0..l).contains(&s.1)
    }

    /// `λ δ_{i,i'+1} δ_{j,j'} + Ω e^{i2π iΦ} δ_{i,i'} δ_{j,j'+1}`
    pub fn v1(&self, a: S, b: S) -> C {
        if !self.inside(a) || !self.inside(b) {
            return C::new(0.0, 0.0);
        }
        let mut v = C::new(0.0, 0.0);
        if a.0 == b.0 + 1 && a.1 == b.1 {
            v += self.lambda;
        }
        if a.0 == b.0 && a.1 == b.1 + 1 {
            v += C::from_polar(self.omega, TAU * a.0 as f64 * self.phi);
        }
        v
    }

    /// `λ δ_{i+1,i'} δ_{j,j'} + Ω e^{-i2π iΦ} δ_{i,i'} δ_{j+1,j'}`
    pub fn v2(&self, a: S, b: S) -> C {
        if !self.inside(a) || !self.inside(b) {
            return C::new(0.0, 0.0);
        }
        let mut v = C::new(0.0, 0.0);
        if a.0 + 1 == b.0 && a.1 == b.1 {
            v += self.lambda;
        }
        if a.0 == b.0 && a.1 + 1 == b.1 {
            v += C::from_polar(self.omega, -TAU * a.0 as f64 * self.phi);
        }
        v
    }

    fn sites(&self) -> Vec<S> {
        let l = self.l as i64;
        (0..l).flat_map(|i| (0..l).map(move |j| (i, j))).collect()
    }

    fn r(&self, rho: &DMatrix<C>, a: S, b: S) -> C {
        if !self.inside(a) || !self.inside(b) {
            return C::new(0.0, 0.0);
        }
        let l = self.l as i64;
        rho[((a.0 * l + a.1) as usize, (b.0 * l + b.1) as usize)]
    }

    /// The three groups of the density equation (coherent, single-ρ
    /// dissipative, bilinear) summed literally over every index.
    pub fn literal_rhs(&self, alpha: C, rho: &DMatrix<C>) -> [DMatrix<C>; 3] {
        let n = self.l * self.l;
        let k = self.kappa / (self.delta * self.delta + self.kappa * self.kappa);
        let sites = self.sites();
        let i_ = C::new(0.0, 1.0);
        let ac = alpha.conj();
        let mut out = [DMatrix::zeros(n, n), DMatrix::zeros(n, n), DMatrix::zeros(n, n)];
        for (ai, &(i, j)) in sites.iter().enumerate() {
            for (bi, &(ip, jp)) in sites.iter().enumerate() {
                let (a, b) = ((i, j), (ip, jp));
                let r = |x: S, y: S| self.r(rho, x, y);
                let e = |m: i64| C::from_polar(1.0, TAU * m as f64 * self.phi);

                let mut co = i_ * self.lambda
                    * (ac * r(a, (ip - 1, jp)) + alpha * r(a, (ip + 1, jp))
                        - ac * r((i + 1, j), b)
                        - alpha * r((i - 1, j), b));
                co += i_ * self.omega
                    * (ac * e(ip) * r(a, (ip, jp - 1)) + alpha * e(ip).conj() * r(a, (ip, jp + 1))
                        - ac * e(i) * r((i, j + 1), b)
                        - alpha * e(i).conj() * r((i, j - 1), b));

                let mut line3 = C::new(0.0, 0.0);
                let mut line4 = C::new(0.0, 0.0);
                let mut line5 = C::new(0.0, 0.0);
                for &c in &sites {
                    for &d in &sites {
                        // (αβ) = c, (ml) = d
                        line3 += self.v1(b, c) * self.v2(c, d) * r(a, d) + self.v1(d, c) * self.v2(c, a) * r(d, b);
                        // (αβ) = c, (α'β') = d
                        line4 += self.v2(b, c) * self.v1(d, a) * r(d, c);
                        for &ml in &sites {
                            // (αβ) = c, (α'β') = d
                            let vb1 = self.v1(b, c) * self.v2(d, ml);
                            let vb2 = self.v2(b, c) * self.v1(d, ml);
                            let vp1 = self.v1(ml, c) * self.v2(d, a);
                            let vp2 = self.v2(ml, c) * self.v1(d, a);
                            line5 += (vb1 - vb2) * r(d, c) * r(a, ml) + (vp1 - vp2) * r(ml, b) * r(d, c);
                        }
                    }
                }
                out[0][(ai, bi)] = co;
                out[1][(ai, bi)] = -line3 * k + line4 * (2.0 * k);
                out[2][(ai, bi)] = line5 * k;
            }
        }
        out
    }

    /// Cavity equation with the bond sum written out.
    pub fn literal_cavity(&self, alpha: C, rho: &DMatrix<C>) -> C {
        let mut s = C::new(0.0, 0.0);
        for &(i, j) in &self.sites() {
            s += self.lambda * self.r(rho, (i + 1, j), (i, j))
                + C::from_polar(self.omega, TAU * i as f64 * self.phi) * self.r(rho, (i, j + 1), (i, j));
        }
        -C::new(0.0, 1.0) * C::new(self.delta, -self.kappa) * alpha + C::new(0.0, 1.0) * s
    }

    /// Quantum bond currents substituted term by term from their printed form.
    pub fn literal_quantum_current(&self, rho: &DMatrix<C>) -> (Vec<f64>, Vec<f64>) {
        let k = self.kappa / (self.delta * self.delta + self.kappa * self.kappa);
        let phi = TAU * self.phi;
        let sites = self.sites();
        let mut jx = vec![0.0; sites.len()];
        let mut jy = vec![0.0; sites.len()];
        for (ai, &(i, j)) in sites.iter().enumerate() {
            let (mut sx, mut sy) = (0.0, 0.0);
            for &(m, l) in &sites {
                let base = self.r(rho, (i, j), (m, l));
                sx += self.lambda * self.lambda * (self.r(rho, (m + 1, l), (i + 1, j)) * base).re
                    + self.lambda
                        * self.omega
                        * (C::from_polar(1.0, phi * m as f64) * self.r(rho, (m, l + 1), (i + 1, j)) * base).re;
                sy += self.lambda
                    * self.omega
                    * (C::from_polar(1.0, -phi * i as f64) * self.r(rho, (m + 1, l), (i, j + 1)) * base).re
                    + self.omega
                        * self.omega
                        * (C::from_polar(1.0, phi * (m - i) as f64) * self.r(rho, (m, l - 1), (i, j + 1)) * base).re;
            }
            jx[ai] = 2.0 * k * sx;
            jy[ai] = 2.0 * k * sy;
        }
        (jx, jy)
    }
}

/// Gap label `t` from `r = s q + t p` with `|t| <= q/2`.
pub fn diophantine_t(p: i64, q: i64, r: i64) -> i64 {
    for t in -q / 2..=q / 2 {
        if (r - t * p).rem_euclid(q) == 0 {
            return t;
        }
    }
    panic!("no solution for r = {r}, p/q = {p}/{q}");
}

pub fn random_hermitian<R: Rng>(rng: &mut R, n: usize, scale: f64) -> DMatrix<C> {
    let a = DMatrix::from_fn(n, n, |_, _| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    (&a + a.adjoint()) * C::new(0.5 * scale, 0.0)
}

pub fn max_abs(m: &DMatrix<C>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
