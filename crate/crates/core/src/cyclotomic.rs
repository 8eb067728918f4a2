//! Exact character sums as multiplicity vectors over the p-th roots of unity.
//!
//! A sum `sum_x w_x psi(x)` with integer weights is stored as the vector
//! `(m_0, ..., m_{p-1})` of total weight landing on each `zeta_p^t`. Two vectors
//! name the same element of Z[zeta_p] iff they differ by a constant, since
//! `1 + zeta + ... + zeta^(p-1) = 0`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::gf::root_of_unity;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CountVector {
    counts: Vec<i64>,
}

impl CountVector {
    pub fn zero(p: u32) -> Self {
        CountVector { counts: vec![0; p as usize] }
    }

    pub fn from_counts(counts: Vec<i64>) -> Self {
        assert!(!counts.is_empty());
        CountVector { counts }
    }

    pub fn p(&self) -> u32 {
        self.counts.len() as u32
    }

    pub fn counts(&self) -> &[i64] {
        &self.counts
    }

    /// Adds weight `w` on `zeta^t`.
    pub fn push(&mut self, t: u32, w: i64) {
        self.counts[t as usize] += w;
    }

    /// Sum of multiplicities, i.e. the value under the trivial character.
    pub fn total(&self) -> i64 {
        self.counts.iter().sum()
    }

    pub fn add_assign(&mut self, other: &CountVector) {
        assert_eq!(self.p(), other.p());
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
    }

    pub fn sub(&self, other: &CountVector) -> CountVector {
        assert_eq!(self.p(), other.p());
        CountVector {
            counts: self.counts.iter().zip(&other.counts).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scaled(&self, k: i64) -> CountVector {
        CountVector { counts: self.counts.iter().map(|a| a * k).collect() }
    }

    /// Multiplication by `zeta^s`.
    pub fn shifted(&self, s: u32) -> CountVector {
        let p = self.counts.len();
        let mut out = vec![0; p];
        for (t, &c) in self.counts.iter().enumerate() {
            out[(t + s as usize) % p] = c;
        }
        CountVector { counts: out }
    }

    /// Complex conjugate: `zeta^t -> zeta^(-t)`.
    pub fn conj(&self) -> CountVector {
        let p = self.counts.len();
        let mut out = vec![0; p];
        for (t, &c) in self.counts.iter().enumerate() {
            out[(p - t) % p] = c;
        }
        CountVector { counts: out }
    }

    /// Canonical representative in Z[zeta_p]: the last coordinate is zero.
    pub fn canonical(&self) -> CountVector {
        let last = *self.counts.last().unwrap();
        CountVector { counts: self.counts.iter().map(|a| a - last).collect() }
    }

    /// Equality as elements of Z[zeta_p].
    pub fn same_value(&self, other: &CountVector) -> bool {
        self.canonical() == other.canonical()
    }

    /// The rational integer this element equals, if it is one.
    pub fn as_integer(&self) -> Option<i64> {
        let c = self.canonical();
        if c.counts[1..].iter().all(|&x| x == 0) {
            Some(c.counts[0])
        } else {
            None
        }
    }

    pub fn value(&self) -> Complex64 {
        let p = self.p();
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(t, &c)| root_of_unity(p, t as u32) * c as f64)
            .sum()
    }

    /// `|value|`, computed from `|value|^2 = sum_{s,t} m_s m_t cos(2 pi (s - t)/p)`.
    pub fn magnitude(&self) -> f64 {
        if let Some(n) = self.as_integer() {
            return n.unsigned_abs() as f64;
        }
        let p = self.p() as usize;
        // Autocorrelation is exact in integers; only the cosines are floats.
        let mut auto = vec![0i128; p];
        for s in 0..p {
            for t in 0..p {
                auto[(s + p - t) % p] += self.counts[s] as i128 * self.counts[t] as i128;
            }
        }
        let sq: f64 = auto
            .iter()
            .enumerate()
            .map(|(d, &a)| a as f64 * root_of_unity(p as u32, d as u32).re)
            .sum();
        sq.max(0.0).sqrt()
    }

    pub fn phase(&self) -> f64 {
        self.value().arg()
    }
}
