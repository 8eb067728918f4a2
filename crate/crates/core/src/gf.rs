//! Arithmetic in F_q for odd prime powers q = p^e, and the additive
//! characters x -> exp(2 pi i Tr(a x) / p).
//!
//! Elements are stored as the packed index `c_0 + c_1 p + ... + c_{e-1} p^{e-1}`
//! of their residue vector modulo the defining polynomial. Multiplication goes
//! through discrete log tables built once per field.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polyring::{Poly, PolyRing};

/// Largest field size supported by the log/exp tables.
pub const MAX_Q: u64 = 1 << 20;

/// The coefficient field: `p` odd prime, `e >= 1`, and a monic irreducible
/// `modulus` of degree `e` over F_p (constant term first, length `e + 1`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u32,
    pub e: u32,
    pub modulus: Vec<u32>,
}

impl FieldSpec {
    /// The field of order `p^e` with the deterministic default modulus.
    pub fn new(p: u32, e: u32) -> Result<Self> {
        let modulus = generate_modulus(p, e)?;
        Ok(FieldSpec { p, e, modulus })
    }

    /// The prime field F_p.
    pub fn prime(p: u32) -> Result<Self> {
        Self::new(p, 1)
    }

    pub fn q(&self) -> u64 {
        (self.p as u64).pow(self.e)
    }
}

/// An element of F_q in packed canonical form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FieldElement(u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    /// Packed index in `[0, q)`.
    pub fn index(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// A nonzero scale `a` selecting the character `x -> psi(a x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CharacterSelector {
    scale: FieldElement,
}

impl CharacterSelector {
    pub fn new(scale: FieldElement) -> Result<Self> {
        if scale.is_zero() {
            return Err(Error::InvalidParams("character scale must be nonzero".into()));
        }
        Ok(CharacterSelector { scale })
    }

    pub fn scale(&self) -> FieldElement {
        self.scale
    }
}

/// An additive character of F_q: trivial, or `psi(a .)` for a nonzero `a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Character {
    Trivial,
    Scaled(CharacterSelector),
}

impl Character {
    /// The character with the given scale; scale 0 gives the trivial one.
    pub fn from_scale(scale: FieldElement) -> Self {
        match CharacterSelector::new(scale) {
            Ok(sel) => Character::Scaled(sel),
            Err(_) => Character::Trivial,
        }
    }

    pub fn scale(&self) -> FieldElement {
        match self {
            Character::Trivial => FieldElement::ZERO,
            Character::Scaled(sel) => sel.scale,
        }
    }
}

struct FqInner {
    spec: FieldSpec,
    q: u32,
    /// exp[i] = g^i for a fixed generator g, i in [0, q - 1).
    exp: Vec<u32>,
    /// log[x] for x != 0; log[0] unused.
    log: Vec<u32>,
    trace: Vec<u32>,
}

/// A finite field context. Cheap to clone and safe to share across threads.
#[derive(Clone)]
pub struct Fq {
    inner: Arc<FqInner>,
}

impl fmt::Debug for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Fq").field("spec", &self.inner.spec).finish()
    }
}

impl PartialEq for Fq {
    fn eq(&self, other: &Self) -> bool {
        self.inner.spec == other.inner.spec
    }
}

impl Eq for Fq {}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Schoolbook product of residue vectors reduced by a monic modulus.
fn slow_mul(p: u32, modulus: &[u32], a: &[u32], b: &[u32]) -> Vec<u32> {
    let e = modulus.len() - 1;
    let p64 = p as u64;
    let mut prod = vec![0u64; 2 * e - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p64;
        }
    }
    for k in (e..prod.len()).rev() {
        let c = prod[k];
        if c == 0 {
            continue;
        }
        prod[k] = 0;
        for i in 0..e {
            let sub = c * modulus[i] as u64 % p64;
            prod[k - e + i] = (prod[k - e + i] + p64 - sub) % p64;
        }
    }
    prod.truncate(e);
    prod.into_iter().map(|x| x as u32).collect()
}

fn unpack(p: u32, e: u32, mut x: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(e as usize);
    for _ in 0..e {
        out.push(x % p);
        x /= p;
    }
    out
}

fn pack(p: u32, digits: &[u32]) -> u32 {
    digits.iter().rev().fold(0u32, |acc, &d| acc * p + d)
}

impl Fq {
    pub fn new(spec: FieldSpec) -> Result<Self> {
        let FieldSpec { p, e, .. } = spec;
        if p == 2 || !is_prime(p) {
            return Err(Error::InvalidField(format!("p = {p} is not an odd prime")));
        }
        if e == 0 {
            return Err(Error::InvalidField("extension degree must be >= 1".into()));
        }
        let q = (p as u64)
            .checked_pow(e)
            .filter(|&q| q <= MAX_Q)
            .ok_or_else(|| Error::InvalidField(format!("q = {p}^{e} exceeds {MAX_Q}")))?;
        let mut spec = spec;
        if e == 1 {
            spec.modulus = vec![0, 1];
        } else {
            validate_modulus(p, e, &spec.modulus)?;
        }
        let q = q as u32;
        let modulus = spec.modulus.clone();
        let mul = |a: u32, b: u32| -> u32 {
            if e == 1 {
                ((a as u64 * b as u64) % p as u64) as u32
            } else {
                pack(p, &slow_mul(p, &modulus, &unpack(p, e, a), &unpack(p, e, b)))
            }
        };
        let pow = |mut base: u32, mut k: u64| -> u32 {
            let mut acc = 1u32;
            while k > 0 {
                if k & 1 == 1 {
                    acc = mul(acc, base);
                }
                base = mul(base, base);
                k >>= 1;
            }
            acc
        };
        let order = q as u64 - 1;
        let factors = prime_factors(order);
        let generator = (1..q)
            .find(|&g| factors.iter().all(|&l| pow(g, order / l) != 1))
            .expect("multiplicative group of a finite field is cyclic");
        let mut exp = Vec::with_capacity(order as usize);
        let mut log = vec![0u32; q as usize];
        let mut x = 1u32;
        for i in 0..order as u32 {
            exp.push(x);
            log[x as usize] = i;
            x = mul(x, generator);
        }
        let mut trace = vec![0u32; q as usize];
        for (idx, slot) in trace.iter_mut().enumerate() {
            let mut t = 0u32;
            let mut y = idx as u32;
            for _ in 0..e {
                t = add_packed(p, e, t, y);
                y = pow(y, p as u64);
            }
            debug_assert!(t < p, "trace must land in the prime field");
            *slot = t;
        }
        Ok(Fq { inner: Arc::new(FqInner { spec, q, exp, log, trace }) })
    }

    pub fn prime(p: u32) -> Result<Self> {
        Self::new(FieldSpec { p, e: 1, modulus: vec![0, 1] })
    }

    /// F_{p^e} with the default (lexicographically first) modulus.
    pub fn with_degree(p: u32, e: u32) -> Result<Self> {
        Self::new(FieldSpec::new(p, e)?)
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.inner.spec
    }

    pub fn p(&self) -> u32 {
        self.inner.spec.p
    }

    pub fn e(&self) -> u32 {
        self.inner.spec.e
    }

    pub fn q(&self) -> u32 {
        self.inner.q
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement::ZERO
    }

    pub fn one(&self) -> FieldElement {
        FieldElement::ONE
    }

    /// Element from its residue vector `(c_0, ..., c_{e-1})`; shorter vectors are zero-padded.
    pub fn element(&self, coeffs: &[u32]) -> Result<FieldElement> {
        let (p, e) = (self.p(), self.e() as usize);
        if coeffs.len() > e {
            return Err(Error::InvalidElement(format!(
                "{} coordinates given, field has degree {e}",
                coeffs.len()
            )));
        }
        if let Some(&c) = coeffs.iter().find(|&&c| c >= p) {
            return Err(Error::InvalidElement(format!("residue {c} not in [0, {p})")));
        }
        Ok(FieldElement(pack(p, coeffs)))
    }

    /// Element from a packed index in `[0, q)`.
    pub fn from_index(&self, index: u32) -> Result<FieldElement> {
        if index >= self.q() {
            return Err(Error::InvalidElement(format!("index {index} not in [0, {})", self.q())));
        }
        Ok(FieldElement(index))
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> FieldElement {
        FieldElement(n.rem_euclid(self.p() as i64) as u32)
    }

    pub fn coeffs(&self, x: FieldElement) -> Vec<u32> {
        unpack(self.p(), self.e(), x.0)
    }

    /// All elements in packed-index order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + Clone {
        (0..self.q()).map(FieldElement)
    }

    pub fn add(&self, x: FieldElement, y: FieldElement) -> FieldElement {
        FieldElement(add_packed(self.p(), self.e(), x.0, y.0))
    }

    pub fn neg(&self, x: FieldElement) -> FieldElement {
        let p = self.p();
        if self.e() == 1 {
            return FieldElement((p - x.0) % p);
        }
        let digits: Vec<u32> = self.coeffs(x).into_iter().map(|d| (p - d) % p).collect();
        FieldElement(pack(p, &digits))
    }

    pub fn sub(&self, x: FieldElement, y: FieldElement) -> FieldElement {
        self.add(x, self.neg(y))
    }

    pub fn mul(&self, x: FieldElement, y: FieldElement) -> FieldElement {
        if x.0 == 0 || y.0 == 0 {
            return FieldElement::ZERO;
        }
        let inner = &*self.inner;
        let order = inner.q - 1;
        let s = (inner.log[x.0 as usize] + inner.log[y.0 as usize]) % order;
        FieldElement(inner.exp[s as usize])
    }

    pub fn inv(&self, x: FieldElement) -> Result<FieldElement> {
        if x.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let inner = &*self.inner;
        let order = inner.q - 1;
        let l = inner.log[x.0 as usize];
        Ok(FieldElement(inner.exp[((order - l) % order) as usize]))
    }

    pub fn div(&self, x: FieldElement, y: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(x, self.inv(y)?))
    }

    pub fn pow(&self, x: FieldElement, k: u64) -> FieldElement {
        if k == 0 {
            return FieldElement::ONE;
        }
        if x.is_zero() {
            return FieldElement::ZERO;
        }
        let inner = &*self.inner;
        let order = (inner.q - 1) as u64;
        let l = inner.log[x.0 as usize] as u64;
        FieldElement(inner.exp[((l * (k % order)) % order) as usize])
    }

    /// `x^(1/p)`: the inverse of the Frobenius map.
    pub fn pth_root(&self, x: FieldElement) -> FieldElement {
        self.pow(x, (self.q() / self.p()) as u64)
    }

    /// 1/2, which exists because q is odd.
    pub fn half(&self) -> FieldElement {
        self.inv(self.from_int(2)).expect("q is odd")
    }

    /// Absolute trace `Tr(x) = x + x^p + ... + x^(p^(e-1))` as a residue in `[0, p)`.
    pub fn trace(&self, x: FieldElement) -> u32 {
        self.inner.trace[x.0 as usize]
    }

    /// The exponent `t` in `psi(x) = exp(2 pi i t / p)`.
    pub fn char_index(&self, ch: Character, x: FieldElement) -> u32 {
        match ch {
            Character::Trivial => 0,
            Character::Scaled(sel) => self.trace(self.mul(sel.scale, x)),
        }
    }

    pub fn char_value(&self, ch: Character, x: FieldElement) -> Complex64 {
        root_of_unity(self.p(), self.char_index(ch, x))
    }

    /// Nonzero scales in packed-index order, one per nontrivial character.
    pub fn nontrivial_characters(&self) -> impl Iterator<Item = Character> + '_ {
        self.elements()
            .skip(1)
            .map(|a| Character::Scaled(CharacterSelector { scale: a }))
    }

    /// The element's residue vector as a short string: `2` or `(1,2)`.
    pub fn format_element(&self, x: FieldElement) -> String {
        if self.e() == 1 {
            x.0.to_string()
        } else {
            let parts: Vec<String> = self.coeffs(x).iter().map(|c| c.to_string()).collect();
            format!("({})", parts.join(","))
        }
    }
}

/// `exp(2 pi i t / p)`.
pub fn root_of_unity(p: u32, t: u32) -> Complex64 {
    let theta = 2.0 * std::f64::consts::PI * t as f64 / p as f64;
    Complex64::new(theta.cos(), theta.sin())
}

fn add_packed(p: u32, e: u32, x: u32, y: u32) -> u32 {
    if e == 1 {
        return (x + y) % p;
    }
    let (mut x, mut y) = (x, y);
    let mut out = 0u32;
    let mut scale = 1u32;
    for _ in 0..e {
        out += ((x % p + y % p) % p) * scale;
        x /= p;
        y /= p;
        scale = scale.wrapping_mul(p);
    }
    out
}

fn validate_modulus(p: u32, e: u32, modulus: &[u32]) -> Result<()> {
    if modulus.len() != e as usize + 1 || modulus[e as usize] != 1 {
        return Err(Error::InvalidField(format!(
            "modulus must be monic of degree {e} (got {modulus:?})"
        )));
    }
    if modulus.iter().any(|&c| c >= p) {
        return Err(Error::InvalidField("modulus coefficients must lie in [0, p)".into()));
    }
    let fp = Fq::prime(p)?;
    let ring = PolyRing::new(fp.clone());
    let poly = Poly::from_coeffs(modulus.iter().map(|&c| fp.from_int(c as i64)).collect());
    if !ring.is_irreducible(&poly)? {
        return Err(Error::InvalidField(format!("modulus {modulus:?} is reducible over F_{p}")));
    }
    Ok(())
}

/// The first monic irreducible of degree `e` over F_p, candidates ordered by
/// the packed index of `(c_0, ..., c_{e-1})` (so `c_{e-1}` is most significant).
/// Returned with its leading 1, constant term first.
pub fn generate_modulus(p: u32, e: u32) -> Result<Vec<u32>> {
    if p == 2 || !is_prime(p) {
        return Err(Error::InvalidField(format!("p = {p} is not an odd prime")));
    }
    if e == 0 {
        return Err(Error::InvalidField("extension degree must be >= 1".into()));
    }
    let fp = Fq::prime(p)?;
    let ring = PolyRing::new(fp.clone());
    let count = (p as u64)
        .checked_pow(e)
        .filter(|&c| c <= MAX_Q)
        .ok_or_else(|| Error::InvalidField(format!("q = {p}^{e} exceeds {MAX_Q}")))?;
    for idx in 0..count {
        let mut digits = unpack(p, e, idx as u32);
        digits.push(1);
        let poly = Poly::from_coeffs(digits.iter().map(|&c| fp.from_int(c as i64)).collect());
        if ring.is_irreducible(&poly)? {
            return Ok(digits);
        }
    }
    unreachable!("irreducible polynomials of every degree exist")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f9() -> Fq {
        Fq::new(FieldSpec { p: 3, e: 2, modulus: vec![1, 0, 1] }).unwrap()
    }

    #[test]
    fn prime_field_examples() {
        let f3 = Fq::prime(3).unwrap();
        assert_eq!(f3.add(f3.from_int(2), f3.from_int(2)), f3.from_int(1));
        assert_eq!(f3.inv(f3.from_int(2)).unwrap(), f3.from_int(2));
        let f5 = Fq::prime(5).unwrap();
        assert_eq!(f5.mul(f5.from_int(2), f5.from_int(3)), f5.one());
        assert_eq!(f5.inv(f5.from_int(2)).unwrap(), f5.from_int(3));
        assert_eq!(f5.inv(f5.zero()), Err(Error::DivisionByZero));
    }

    #[test]
    fn f9_examples() {
        let f = f9();
        let x = f.element(&[1, 2]).unwrap();
        let y = f.element(&[2, 2]).unwrap();
        assert_eq!(f.coeffs(f.add(x, y)), vec![0, 1]);
        let t = f.element(&[0, 1]).unwrap();
        assert_eq!(f.coeffs(f.mul(t, t)), vec![2, 0]);
        assert_eq!(f.coeffs(f.inv(t).unwrap()), vec![0, 2]);
        assert_eq!(f.trace(t), 0);
        assert_eq!(f.trace(f.one()), 2);
        let ch = Character::Scaled(CharacterSelector::new(f.one()).unwrap());
        assert!((f.char_value(ch, t) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn trace_is_identity_on_prime_field() {
        let f7 = Fq::prime(7).unwrap();
        for x in f7.elements() {
            assert_eq!(f7.trace(x), x.index());
        }
    }

    #[test]
    fn character_examples() {
        let f3 = Fq::prime(3).unwrap();
        let ch = Character::Scaled(CharacterSelector::new(f3.one()).unwrap());
        assert_eq!(f3.char_value(ch, f3.zero()), Complex64::new(1.0, 0.0));
        let w = f3.char_value(ch, f3.one());
        assert!((w - root_of_unity(3, 1)).norm() < 1e-15);
        assert!(CharacterSelector::new(f3.zero()).is_err());
    }

    #[test]
    fn modulus_generation() {
        assert_eq!(generate_modulus(3, 1).unwrap(), vec![0, 1]);
        assert_eq!(generate_modulus(3, 2).unwrap(), vec![1, 0, 1]);
        assert_eq!(generate_modulus(5, 2).unwrap(), vec![2, 0, 1]);
    }

    #[test]
    fn modulus_oracle_by_root_search() {
        // A monic quadratic over F_p is irreducible iff it has no root.
        for p in [3u32, 5, 7] {
            let mut expected = None;
            'outer: for idx in 0..p * p {
                let (c0, c1) = (idx % p, idx / p);
                for x in 0..p {
                    if (x * x + c1 * x + c0) % p == 0 {
                        continue 'outer;
                    }
                }
                expected = Some(vec![c0, c1, 1]);
                break;
            }
            assert_eq!(generate_modulus(p, 2).unwrap(), expected.unwrap());
        }
    }

    #[test]
    fn rejects_bad_fields() {
        assert!(Fq::prime(2).is_err());
        assert!(Fq::prime(9).is_err());
        assert!(Fq::new(FieldSpec { p: 3, e: 2, modulus: vec![2, 0, 1] }).is_err());
        assert!(Fq::new(FieldSpec { p: 3, e: 2, modulus: vec![1, 0, 2] }).is_err());
        let f = f9();
        assert!(f.element(&[3, 0]).is_err());
        assert!(f.element(&[1, 1, 1]).is_err());
    }

    #[test]
    fn field_axioms_exhaustive_small() {
        for (p, e) in [(3, 1), (5, 1), (3, 2), (5, 2), (7, 1)] {
            let f = Fq::with_degree(p, e).unwrap();
            let els: Vec<_> = f.elements().collect();
            for &x in &els {
                assert_eq!(f.add(x, f.neg(x)), f.zero());
                if !x.is_zero() {
                    assert_eq!(f.mul(x, f.inv(x).unwrap()), f.one());
                }
                for &y in &els {
                    assert_eq!(f.add(x, y), f.add(y, x));
                    assert_eq!(f.mul(x, y), f.mul(y, x));
                    for &z in els.iter().step_by(3) {
                        assert_eq!(f.mul(x, f.add(y, z)), f.add(f.mul(x, y), f.mul(x, z)));
                        assert_eq!(f.mul(f.mul(x, y), z), f.mul(x, f.mul(y, z)));
                        assert_eq!(f.add(f.add(x, y), z), f.add(x, f.add(y, z)));
                    }
                }
            }
        }
    }

    #[test]
    fn trace_linear_and_surjective() {
        for (p, e) in [(3, 1), (3, 2), (3, 3), (3, 4), (5, 2), (7, 2)] {
            let f = Fq::with_degree(p, e).unwrap();
            let mut hit = vec![false; p as usize];
            for x in f.elements() {
                hit[f.trace(x) as usize] = true;
                for y in f.elements().step_by(7) {
                    assert_eq!(f.trace(f.add(x, y)), (f.trace(x) + f.trace(y)) % p);
                }
                for c in 0..p {
                    let cx = f.mul(f.from_int(c as i64), x);
                    assert_eq!(f.trace(cx), (c * f.trace(x)) % p);
                }
            }
            assert!(hit.iter().all(|&h| h));
        }
    }

    #[test]
    fn complete_character_sums_vanish() {
        for (p, e) in [(3, 1), (5, 1), (3, 2), (5, 2), (3, 3)] {
            let f = Fq::with_degree(p, e).unwrap();
            for ch in f.nontrivial_characters() {
                let s: Complex64 = f.elements().map(|x| f.char_value(ch, x)).sum();
                assert!(s.norm() < 1e-9);
                for x in f.elements() {
                    for y in f.elements() {
                        let lhs = f.char_value(ch, f.add(x, y));
                        let rhs = f.char_value(ch, x) * f.char_value(ch, y);
                        assert!((lhs - rhs).norm() < 1e-12);
                    }
                }
            }
        }
    }
}
