//! The polynomial ring F_q[t]: arithmetic, reversal, Rabin irreducibility,
//! deterministic enumeration of M(n) and P(n), factorization, divisors and
//! the von Mangoldt function.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::gf::{prime_factors, FieldElement, Fq};

/// A polynomial over F_q, constant term first, with no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Poly {
    coeffs: Vec<FieldElement>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let idx: Vec<u32> = self.coeffs.iter().map(|c| c.index()).collect();
        write!(f, "Poly{idx:?}")
    }
}

impl Poly {
    pub fn from_coeffs(mut coeffs: Vec<FieldElement>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly { coeffs: vec![FieldElement::ONE] }
    }

    pub fn constant(c: FieldElement) -> Self {
        Poly::from_coeffs(vec![c])
    }

    /// `c t^k`.
    pub fn monomial(c: FieldElement, k: usize) -> Self {
        let mut coeffs = vec![FieldElement::ZERO; k + 1];
        coeffs[k] = c;
        Poly::from_coeffs(coeffs)
    }

    /// The indeterminate `t`.
    pub fn t() -> Self {
        Poly::monomial(FieldElement::ONE, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> FieldElement {
        self.coeffs.get(i).copied().unwrap_or(FieldElement::ZERO)
    }

    pub fn leading(&self) -> Option<FieldElement> {
        self.coeffs.last().copied()
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == Some(FieldElement::ONE)
    }

    /// Digit vector of length `len`, zero padded. Panics if the polynomial does not fit.
    pub fn digits(&self, len: usize) -> Vec<FieldElement> {
        assert!(self.coeffs.len() <= len, "polynomial of length {} exceeds {len} digits", self.coeffs.len());
        let mut d = self.coeffs.clone();
        d.resize(len, FieldElement::ZERO);
        d
    }

    /// `t^k * self`.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut coeffs = vec![FieldElement::ZERO; k];
        coeffs.extend_from_slice(&self.coeffs);
        Poly { coeffs }
    }
}

/// Factorization `unit * prod pi_i^{m_i}` into distinct monic irreducibles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorMultiset {
    pub unit: FieldElement,
    pub factors: Vec<(Poly, u32)>,
}

impl FactorMultiset {
    pub fn tau(&self) -> u64 {
        self.factors.iter().map(|(_, m)| *m as u64 + 1).product()
    }
}

/// How equal-degree splitting picks its random elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorMode {
    /// Distinct-degree then Cantor-Zassenhaus with a seeded ChaCha stream.
    Randomized { seed: u64 },
    /// Trial division by enumerated irreducibles up to degree 12, seeded
    /// Cantor-Zassenhaus (seed 0) above that.
    Deterministic,
}

impl Default for FactorMode {
    fn default() -> Self {
        FactorMode::Randomized { seed: 0 }
    }
}

const TRIAL_DIVISION_MAX_DEGREE: usize = 12;

/// F_q[t] over a fixed field.
#[derive(Debug, Clone)]
pub struct PolyRing {
    fq: Fq,
}

impl PolyRing {
    pub fn new(fq: Fq) -> Self {
        PolyRing { fq }
    }

    pub fn field(&self) -> &Fq {
        &self.fq
    }

    pub fn add(&self, a: &Poly, b: &Poly) -> Poly {
        let n = a.coeffs.len().max(b.coeffs.len());
        Poly::from_coeffs((0..n).map(|i| self.fq.add(a.coeff(i), b.coeff(i))).collect())
    }

    pub fn sub(&self, a: &Poly, b: &Poly) -> Poly {
        let n = a.coeffs.len().max(b.coeffs.len());
        Poly::from_coeffs((0..n).map(|i| self.fq.sub(a.coeff(i), b.coeff(i))).collect())
    }

    pub fn neg(&self, a: &Poly) -> Poly {
        Poly { coeffs: a.coeffs.iter().map(|&c| self.fq.neg(c)).collect() }
    }

    pub fn scale(&self, a: &Poly, c: FieldElement) -> Poly {
        Poly::from_coeffs(a.coeffs.iter().map(|&x| self.fq.mul(x, c)).collect())
    }

    pub fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        if a.is_zero() || b.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![FieldElement::ZERO; a.coeffs.len() + b.coeffs.len() - 1];
        for (i, &x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, &y) in b.coeffs.iter().enumerate() {
                out[i + j] = self.fq.add(out[i + j], self.fq.mul(x, y));
            }
        }
        Poly::from_coeffs(out)
    }

    pub fn pow(&self, a: &Poly, k: u32) -> Poly {
        (0..k).fold(Poly::one(), |acc, _| self.mul(&acc, a))
    }

    pub fn divrem(&self, a: &Poly, b: &Poly) -> Result<(Poly, Poly)> {
        let db = b.degree().ok_or(Error::DivisionByZero)?;
        let inv_lead = self.fq.inv(b.leading().unwrap())?;
        let mut rem = a.coeffs.clone();
        if rem.len() <= db {
            return Ok((Poly::zero(), a.clone()));
        }
        let mut quot = vec![FieldElement::ZERO; rem.len() - db];
        for k in (db..rem.len()).rev() {
            let c = self.fq.mul(rem[k], inv_lead);
            if c.is_zero() {
                continue;
            }
            quot[k - db] = c;
            for (i, &bi) in b.coeffs.iter().enumerate() {
                let idx = k - db + i;
                rem[idx] = self.fq.sub(rem[idx], self.fq.mul(c, bi));
            }
        }
        Ok((Poly::from_coeffs(quot), Poly::from_coeffs(rem)))
    }

    pub fn rem(&self, a: &Poly, b: &Poly) -> Result<Poly> {
        Ok(self.divrem(a, b)?.1)
    }

    /// Exact quotient; errors if `b` does not divide `a`.
    pub fn div_exact(&self, a: &Poly, b: &Poly) -> Result<Poly> {
        let (q, r) = self.divrem(a, b)?;
        if !r.is_zero() {
            return Err(Error::InvalidParams("inexact polynomial division".into()));
        }
        Ok(q)
    }

    pub fn divides(&self, d: &Poly, a: &Poly) -> bool {
        !d.is_zero() && self.rem(a, d).map(|r| r.is_zero()).unwrap_or(false)
    }

    /// Scales to leading coefficient 1; zero stays zero.
    pub fn make_monic(&self, a: &Poly) -> Poly {
        match a.leading() {
            None => Poly::zero(),
            Some(c) => self.scale(a, self.fq.inv(c).expect("leading coefficient is nonzero")),
        }
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(&self, a: &Poly, b: &Poly) -> Poly {
        let (mut x, mut y) = (a.clone(), b.clone());
        while !y.is_zero() {
            let r = self.rem(&x, &y).expect("divisor is nonzero");
            x = y;
            y = r;
        }
        self.make_monic(&x)
    }

    pub fn mulmod(&self, a: &Poly, b: &Poly, m: &Poly) -> Poly {
        self.rem(&self.mul(a, b), m).expect("modulus is nonzero")
    }

    pub fn powmod(&self, a: &Poly, mut k: u64, m: &Poly) -> Poly {
        let mut base = self.rem(a, m).expect("modulus is nonzero");
        let mut acc = self.rem(&Poly::one(), m).expect("modulus is nonzero");
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mulmod(&acc, &base, m);
            }
            base = self.mulmod(&base, &base, m);
            k >>= 1;
        }
        acc
    }

    pub fn derivative(&self, a: &Poly) -> Poly {
        Poly::from_coeffs(
            a.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| self.fq.mul(self.fq.from_int(i as i64), c))
                .collect(),
        )
    }

    /// `a^*(t) = t^deg(a) a(1/t)`.
    pub fn reciprocal_star(&self, a: &Poly) -> Result<Poly> {
        if a.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        Ok(Poly::from_coeffs(a.coeffs.iter().rev().copied().collect()))
    }

    /// Order of vanishing at t = 0.
    pub fn ord_at_zero(&self, g: &Poly) -> Result<usize> {
        if g.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        Ok(g.coeffs.iter().take_while(|c| c.is_zero()).count())
    }

    /// Splits `g = t^r g_0` with `g_0(0) != 0`.
    pub fn remove_zero_factor(&self, g: &Poly) -> Result<(usize, Poly)> {
        let r = self.ord_at_zero(g)?;
        Ok((r, Poly { coeffs: g.coeffs[r..].to_vec() }))
    }

    /// Rabin's test: `t^(q^n) = t mod f` and `gcd(t^(q^(n/l)) - t, f) = 1` for primes `l | n`.
    pub fn is_irreducible(&self, f: &Poly) -> Result<bool> {
        if f.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if !f.is_monic() {
            return Err(Error::NotMonic);
        }
        let n = f.degree().unwrap();
        if n == 0 {
            return Err(Error::InvalidParams("irreducibility needs degree >= 1".into()));
        }
        if n == 1 {
            return Ok(true);
        }
        if f.coeff(0).is_zero() {
            return Ok(false);
        }
        let q = self.fq.q() as u64;
        let t = Poly::t();
        let mut frob = vec![self.rem(&t, f)?];
        for i in 0..n {
            let next = self.powmod(&frob[i], q, f);
            frob.push(next);
        }
        if frob[n] != frob[0] {
            return Ok(false);
        }
        for l in prime_factors(n as u64) {
            let h = self.sub(&frob[n / l as usize], &t);
            if self.gcd(&h, f) != Poly::one() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `|M(n)| = q^n`, if it fits in a u64.
    pub fn count_monic(&self, n: usize) -> Option<u64> {
        (self.fq.q() as u64).checked_pow(n as u32)
    }

    /// The `index`-th element of M(n): digit `i` of `index` in base q is `f_i`.
    pub fn monic_from_index(&self, n: usize, mut index: u64) -> Poly {
        let q = self.fq.q() as u64;
        let mut coeffs = Vec::with_capacity(n + 1);
        for _ in 0..n {
            coeffs.push(self.fq.from_index((index % q) as u32).expect("digit below q"));
            index /= q;
        }
        coeffs.push(FieldElement::ONE);
        Poly { coeffs }
    }

    /// Inverse of [`monic_from_index`](Self::monic_from_index) on monic polynomials.
    pub fn monic_index(&self, f: &Poly) -> u64 {
        let q = self.fq.q() as u64;
        let n = f.degree().unwrap_or(0);
        f.coeffs[..n].iter().rev().fold(0u64, |acc, c| acc * q + c.index() as u64)
    }

    /// The `index`-th element of `V_N` (degree `<= n`): base-q digits are `f_0, f_1, ...`.
    pub fn poly_from_index(&self, n: usize, mut index: u64) -> Poly {
        let q = self.fq.q() as u64;
        let mut coeffs = Vec::with_capacity(n + 1);
        for _ in 0..=n {
            coeffs.push(self.fq.from_index((index % q) as u32).expect("digit below q"));
            index /= q;
        }
        Poly::from_coeffs(coeffs)
    }

    /// Streams `V_N`, all polynomials of degree `<= n` including 0, in index order.
    pub fn enumerate_all(&self, n: usize) -> impl Iterator<Item = Poly> + '_ {
        let total = self.count_monic(n + 1).expect("q^(n+1) overflows u64");
        (0..total).map(move |i| self.poly_from_index(n, i))
    }

    /// Streams M(n) in index order. Restartable: each call yields a fresh stream.
    pub fn enumerate_monic(&self, n: usize) -> impl Iterator<Item = Poly> + '_ {
        let total = self.count_monic(n).expect("q^n overflows u64");
        (0..total).map(move |i| self.monic_from_index(n, i))
    }

    /// Streams P(n) in the order of M(n).
    pub fn enumerate_irreducible(&self, n: usize) -> impl Iterator<Item = Poly> + '_ {
        assert!(n >= 1, "irreducibles have degree >= 1");
        self.enumerate_monic(n)
            .filter(move |f| self.is_irreducible(f).expect("monic of degree >= 1"))
    }

    /// Streams M^x(k) = {g in M(k) : g(0) != 0} in the order of M(k).
    pub fn enumerate_monic_nonzero_const(&self, k: usize) -> impl Iterator<Item = Poly> + '_ {
        self.enumerate_monic(k).filter(move |g| k == 0 || !g.coeff(0).is_zero())
    }

    /// Maps `f` over M(n) in parallel. The index range is cut into contiguous
    /// blocks (fixed top digits) and results come back in index order.
    pub fn par_map_monic<R, F>(&self, n: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(Poly) -> R + Sync + Send,
    {
        let total = self.count_monic(n).expect("q^n overflows u64");
        (0..total as usize)
            .into_par_iter()
            .with_min_len(64)
            .map(|i| f(self.monic_from_index(n, i as u64)))
            .collect()
    }

    /// `|P(n)| = (1/n) sum_{d | n} mu(d) q^(n/d)`.
    pub fn count_irreducible(&self, n: usize) -> BigInt {
        assert!(n >= 1);
        let q = BigInt::from(self.fq.q());
        let mut total = BigInt::zero();
        for d in 1..=n {
            if !n.is_multiple_of(d) {
                continue;
            }
            match mobius(d as u64) {
                0 => {}
                mu => total += BigInt::from(mu) * num_traits::pow(q.clone(), n / d),
            }
        }
        total / BigInt::from(n)
    }

    pub fn factorize(&self, f: &Poly) -> Result<FactorMultiset> {
        self.factorize_with(f, FactorMode::default())
    }

    pub fn factorize_with(&self, f: &Poly, mode: FactorMode) -> Result<FactorMultiset> {
        let unit = f.leading().ok_or(Error::ZeroPolynomial)?;
        let g = self.make_monic(f);
        let mut factors: Vec<(Poly, u32)> = Vec::new();
        if g.degree().unwrap() > 0 {
            if mode == FactorMode::Deterministic && g.degree().unwrap() <= TRIAL_DIVISION_MAX_DEGREE {
                factors = self.trial_division(&g)?;
            } else {
                let seed = match mode {
                    FactorMode::Randomized { seed } => seed,
                    FactorMode::Deterministic => 0,
                };
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                for (s, m) in self.squarefree(&g) {
                    for (part, d) in self.distinct_degree(&s)? {
                        for pi in self.equal_degree(&part, d, &mut rng)? {
                            factors.push((pi, m));
                        }
                    }
                }
            }
        }
        factors.sort_by(|(a, _), (b, _)| {
            a.degree().cmp(&b.degree()).then_with(|| self.monic_index(a).cmp(&self.monic_index(b)))
        });
        Ok(FactorMultiset { unit, factors })
    }

    fn trial_division(&self, f: &Poly) -> Result<Vec<(Poly, u32)>> {
        let mut rest = f.clone();
        let mut out = Vec::new();
        let mut d = 1;
        while 2 * d <= rest.degree().unwrap() {
            for pi in self.enumerate_irreducible(d) {
                let mut m = 0;
                while let Ok(qt) = self.div_exact(&rest, &pi) {
                    rest = qt;
                    m += 1;
                }
                if m > 0 {
                    out.push((pi, m));
                }
            }
            d += 1;
        }
        if rest.degree().unwrap() > 0 {
            match out.iter_mut().find(|(pi, _)| *pi == rest) {
                Some((_, m)) => *m += 1,
                None => out.push((rest, 1)),
            }
        }
        Ok(out)
    }

    fn pth_root_poly(&self, f: &Poly) -> Poly {
        let p = self.fq.p() as usize;
        Poly::from_coeffs(f.coeffs.iter().step_by(p).map(|&c| self.fq.pth_root(c)).collect())
    }

    /// Squarefree decomposition of a monic polynomial in characteristic p.
    fn squarefree(&self, f: &Poly) -> Vec<(Poly, u32)> {
        let one = Poly::one();
        let mut out = Vec::new();
        let p = self.fq.p();
        let df = self.derivative(f);
        if df.is_zero() {
            for (g, m) in self.squarefree(&self.pth_root_poly(f)) {
                out.push((g, m * p));
            }
            return out;
        }
        let mut c = self.gcd(f, &df);
        let mut w = self.div_exact(f, &c).unwrap();
        let mut i = 1;
        while w != one {
            let y = self.gcd(&w, &c);
            let z = self.div_exact(&w, &y).unwrap();
            if z != one {
                out.push((z, i));
            }
            i += 1;
            w = y;
            c = self.div_exact(&c, &w).unwrap();
        }
        if c != one {
            for (g, m) in self.squarefree(&self.pth_root_poly(&c)) {
                out.push((g, m * p));
            }
        }
        out
    }

    /// Splits a squarefree monic polynomial into products of same-degree irreducibles.
    fn distinct_degree(&self, f: &Poly) -> Result<Vec<(Poly, usize)>> {
        let q = self.fq.q() as u64;
        let t = Poly::t();
        let mut rest = f.clone();
        let mut h = self.rem(&t, &rest)?;
        let mut out = Vec::new();
        let mut d = 1;
        while rest.degree().unwrap() >= 2 * d {
            h = self.powmod(&h, q, &rest);
            let g = self.gcd(&self.sub(&h, &t), &rest);
            if g != Poly::one() {
                rest = self.div_exact(&rest, &g)?;
                h = self.rem(&h, &rest)?;
                out.push((g, d));
            }
            d += 1;
        }
        if rest.degree().unwrap() > 0 {
            let d = rest.degree().unwrap();
            out.push((rest, d));
        }
        Ok(out)
    }

    /// Cantor-Zassenhaus splitting of a product of distinct degree-`d` irreducibles.
    fn equal_degree(&self, f: &Poly, d: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Poly>> {
        let n = f.degree().unwrap();
        if n == d {
            return Ok(vec![f.clone()]);
        }
        let q = self.fq.q();
        let one = Poly::one();
        loop {
            let a = Poly::from_coeffs(
                (0..n).map(|_| self.fq.from_index(rng.gen_range(0..q)).unwrap()).collect(),
            );
            if a.degree().is_none_or(|k| k == 0) {
                continue;
            }
            // a^((q^d - 1)/2) = (a^(1 + q + ... + q^(d-1)))^((q - 1)/2)
            let mut frob = self.rem(&a, f)?;
            let mut norm = frob.clone();
            for _ in 1..d {
                frob = self.powmod(&frob, q as u64, f);
                norm = self.mulmod(&norm, &frob, f);
            }
            let b = self.powmod(&norm, (q as u64 - 1) / 2, f);
            let g = self.gcd(&self.sub(&b, &one), f);
            let dg = g.degree().unwrap_or(0);
            if dg > 0 && dg < n {
                let mut out = self.equal_degree(&g, d, rng)?;
                out.extend(self.equal_degree(&self.div_exact(f, &g)?, d, rng)?);
                return Ok(out);
            }
        }
    }

    pub fn tau(&self, f: &Poly) -> Result<u64> {
        Ok(self.factorize(f)?.tau())
    }

    /// All monic divisors in mixed-radix order over the factor exponents
    /// (first factor's exponent varies fastest).
    pub fn divisors(&self, f: &Poly) -> Result<Vec<Poly>> {
        let fm = self.factorize(f)?;
        let mut out = vec![Poly::one()];
        for (pi, m) in &fm.factors {
            let mut next = Vec::with_capacity(out.len() * (*m as usize + 1));
            let mut power = Poly::one();
            let mut powers = Vec::new();
            for _ in 0..=*m {
                powers.push(power.clone());
                power = self.mul(&power, pi);
            }
            for pw in &powers {
                for d in &out {
                    next.push(self.mul(d, pw));
                }
            }
            out = next;
        }
        Ok(out)
    }

    /// `deg pi` if `f = pi^j` for a monic irreducible `pi`, else 0.
    pub fn von_mangoldt(&self, f: &Poly) -> Result<u64> {
        if f.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if !f.is_monic() {
            return Err(Error::NotMonic);
        }
        if f.degree() == Some(0) {
            return Err(Error::InvalidParams("von Mangoldt needs degree >= 1".into()));
        }
        let fm = self.factorize(f)?;
        Ok(match fm.factors.as_slice() {
            [(pi, _)] => pi.degree().unwrap() as u64,
            _ => 0,
        })
    }

    /// Human-readable form, highest degree first: `t^4 + 2`, `(1,2)t + 1`.
    pub fn format(&self, f: &Poly) -> String {
        if f.is_zero() {
            return "0".into();
        }
        let mut terms = Vec::new();
        for (k, &c) in f.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let coef = self.fq.format_element(c);
            let term = match (k, c == FieldElement::ONE) {
                (0, _) => coef,
                (1, true) => "t".into(),
                (1, false) => format!("{coef}t"),
                (_, true) => format!("t^{k}"),
                (_, false) => format!("{coef}t^{k}"),
            };
            terms.push(term);
        }
        terms.join(" + ")
    }

    /// Parses `c_k t^k +/- ... +/- c_0`. Coefficients are integers (reduced
    /// into the prime field) or residue tuples `(c_0,...,c_{e-1})`; `*` between
    /// coefficient and variable is optional, and `x` or `z` may stand for `t`.
    pub fn parse(&self, s: &str) -> Result<Poly> {
        parse_poly(&self.fq, s)
    }

    /// JSON form: array of coefficient arrays, constant term first.
    pub fn to_json(&self, f: &Poly) -> Value {
        Value::Array(
            f.coeffs
                .iter()
                .map(|&c| Value::Array(self.fq.coeffs(c).into_iter().map(Value::from).collect()))
                .collect(),
        )
    }

    pub fn from_json(&self, v: &Value) -> Result<Poly> {
        let arr = v.as_array().ok_or_else(|| Error::Parse("polynomial must be a JSON array".into()))?;
        let coeffs = arr
            .iter()
            .map(|c| element_from_json(&self.fq, c))
            .collect::<Result<Vec<_>>>()?;
        Ok(Poly::from_coeffs(coeffs))
    }
}

/// A field element from JSON: a residue array, or a bare integer in the prime field.
pub fn element_from_json(fq: &Fq, v: &Value) -> Result<FieldElement> {
    match v {
        Value::Number(n) => {
            let x = n.as_i64().ok_or_else(|| Error::Parse(format!("bad coefficient {n}")))?;
            Ok(fq.from_int(x))
        }
        Value::Array(items) => {
            let digits = items
                .iter()
                .map(|d| {
                    d.as_u64()
                        .and_then(|x| x.to_u32())
                        .ok_or_else(|| Error::Parse(format!("bad residue {d}")))
                })
                .collect::<Result<Vec<_>>>()?;
            fq.element(&digits)
        }
        _ => Err(Error::Parse(format!("bad field element {v}"))),
    }
}

pub fn element_to_json(fq: &Fq, x: FieldElement) -> Value {
    Value::Array(fq.coeffs(x).into_iter().map(Value::from).collect())
}

fn mobius(mut n: u64) -> i64 {
    let mut mu = 1;
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            n /= d;
            if n.is_multiple_of(d) {
                return 0;
            }
            mu = -mu;
        }
        d += 1;
    }
    if n > 1 {
        mu = -mu;
    }
    mu
}

fn parse_poly(fq: &Fq, s: &str) -> Result<Poly> {
    let src: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
    if src.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    let mut coeffs: Vec<FieldElement> = Vec::new();
    let mut pos = 0;
    let bad = |msg: &str| Error::Parse(format!("{msg} in {s:?}"));
    while pos < src.len() {
        let mut negative = false;
        if src[pos] == '+' || src[pos] == '-' {
            negative = src[pos] == '-';
            pos += 1;
        } else if pos != 0 {
            return Err(bad("expected '+' or '-'"));
        }
        let mut coef: Option<FieldElement> = None;
        if pos < src.len() && src[pos] == '(' {
            let close = src[pos..].iter().position(|&c| c == ')').ok_or_else(|| bad("unclosed '('"))? + pos;
            let inner: String = src[pos + 1..close].iter().collect();
            let digits = inner
                .split(',')
                .map(|d| d.parse::<u32>().map_err(|_| bad("bad residue")))
                .collect::<Result<Vec<_>>>()?;
            coef = Some(fq.element(&digits)?);
            pos = close + 1;
        } else {
            let start = pos;
            while pos < src.len() && src[pos].is_ascii_digit() {
                pos += 1;
            }
            if pos > start {
                let text: String = src[start..pos].iter().collect();
                let n: i64 = text.parse().map_err(|_| bad("bad integer"))?;
                coef = Some(fq.from_int(n));
            }
        }
        if pos < src.len() && src[pos] == '*' {
            pos += 1;
        }
        let mut exp = 0usize;
        if pos < src.len() && matches!(src[pos], 't' | 'x' | 'z') {
            pos += 1;
            exp = 1;
            if pos < src.len() && src[pos] == '^' {
                pos += 1;
                let start = pos;
                while pos < src.len() && src[pos].is_ascii_digit() {
                    pos += 1;
                }
                let text: String = src[start..pos].iter().collect();
                exp = text.parse().map_err(|_| bad("bad exponent"))?;
            }
        } else if coef.is_none() {
            return Err(bad("expected a term"));
        }
        let mut c = coef.unwrap_or(FieldElement::ONE);
        if negative {
            c = fq.neg(c);
        }
        if coeffs.len() <= exp {
            coeffs.resize(exp + 1, FieldElement::ZERO);
        }
        coeffs[exp] = fq.add(coeffs[exp], c);
    }
    Ok(Poly::from_coeffs(coeffs))
}
