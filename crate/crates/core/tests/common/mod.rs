//! Oracles shared by the integration tests. Nothing here calls into the
//! library's numerics; states are only read back as plain vectors.

#![allow(dead_code)]

use num_complex::Complex64;

pub const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Dense square complex matrix, row-major.
#[derive(Clone, Debug)]
pub struct Dense {
    pub n: usize,
    pub data: Vec<Complex64>,
}

impl Dense {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.n + j] = v;
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// Max absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j).norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * v[j]).sum())
            .collect()
    }
}

/// exp(A) by scaling and squaring around a Taylor series; the series is
/// summed until the term drops below 1e-17 relative.
pub fn expm(a: &Dense) -> Dense {
    let norm = a.norm_inf();
    let mut s = 0;
    while norm / f64::from(1u32 << s.min(30)) > 0.5 {
        s += 1;
    }
    let scaled = a.scale(Complex64::new(1.0 / f64::from(1u32 << s), 0.0));
    let mut sum = Dense::identity(a.n);
    let mut term = Dense::identity(a.n);
    for k in 1..60 {
        term = term.mul(&scaled).scale(Complex64::new(1.0 / k as f64, 0.0));
        sum = sum.add(&term);
        if term.norm_inf() < 1e-17 * sum.norm_inf() {
            break;
        }
    }
    for _ in 0..s {
        sum = sum.mul(&sum);
    }
    sum
}

/// `xi a†b† - conj(xi) ab` on rungs 0..dim of the charge-q ladder.
pub fn two_mode_squeeze_generator(xi: Complex64, q: u32, dim: usize) -> Dense {
    let mut h = Dense::zeros(dim);
    for n in 0..dim - 1 {
        let m = ((n as f64 + 1.0) * (n as f64 + f64::from(q) + 1.0)).sqrt();
        // <n+1| a†b† |n> = m, <n| ab |n+1> = m
        h.set(n + 1, n, xi * m);
        h.set(n, n + 1, -xi.conj() * m);
    }
    h
}

/// `|<u|v>| / (|u| |v|)` on plain vectors, zero-padding the shorter one.
pub fn vec_fidelity(u: &[Complex64], v: &[Complex64]) -> f64 {
    let len = u.len().max(v.len());
    let at = |w: &[Complex64], i: usize| w.get(i).copied().unwrap_or(ZERO);
    let ip: Complex64 = (0..len).map(|i| at(u, i).conj() * at(v, i)).sum();
    let nu = u.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let nv = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    ip.norm() / (nu * nv)
}

pub fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// sum over n of `sign(n) / (n!)^2`, summed until the terms stop mattering.
pub fn inverse_factorial_square_sum(alternate: bool) -> f64 {
    let mut sum = 0.0;
    for n in 0..40u32 {
        let t = 1.0 / (factorial(n) * factorial(n));
        sum += if alternate && n % 2 == 1 { -t } else { t };
    }
    sum
}

/// Unnormalized pair-state amplitudes from the closed form
/// `zeta^n sqrt(q! / (n! (n+q)!))`.
pub fn pair_closed_form(zeta: Complex64, q: u32, len: usize) -> Vec<Complex64> {
    (0..len as u32)
        .map(|n| {
            let w = (factorial(q) / (factorial(n) * factorial(n + q))).sqrt();
            zeta.powu(n) * w
        })
        .collect()
}
