//! The band quadratic digit form
//! `Q_A(f) = sum_{j<=m} c_j S^(j)(f) + l_n(f)`, its Laurent symbols `A` and
//! `P = z^m A`, and the half-polar form `B_A(f, h) = CT A(z) f(z) h(1/z)`.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::gf::{FieldElement, Fq};
use crate::polyring::{element_from_json, element_to_json, Poly, PolyRing};

/// `S^(j)(f) = sum_{i=j}^{n} f_i f_{i-j}` on a digit vector `(f_0, ..., f_n)`.
pub fn correlation_sj(fq: &Fq, digits: &[FieldElement], j: usize) -> FieldElement {
    (j..digits.len()).fold(FieldElement::ZERO, |acc, i| {
        fq.add(acc, fq.mul(digits[i], digits[i - j]))
    })
}

/// The fixed band `(c_0, ..., c_m)`, `c_m != 0`, and the per-degree linear forms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BandSpec {
    c: Vec<FieldElement>,
    linear: BTreeMap<usize, Vec<FieldElement>>,
}

impl BandSpec {
    pub fn new(c: Vec<FieldElement>, linear: BTreeMap<usize, Vec<FieldElement>>) -> Result<Self> {
        match c.last() {
            None => return Err(Error::InvalidBand("band needs at least c_0".into())),
            Some(cm) if cm.is_zero() => {
                return Err(Error::InvalidBand("top band coefficient c_m must be nonzero".into()))
            }
            _ => {}
        }
        for (n, lam) in &linear {
            if lam.len() != n + 1 {
                return Err(Error::InvalidBand(format!(
                    "linear form for degree {n} needs {} coefficients, got {}",
                    n + 1,
                    lam.len()
                )));
            }
        }
        Ok(BandSpec { c, linear })
    }

    /// A band with every linear form zero.
    pub fn quadratic(c: Vec<FieldElement>) -> Result<Self> {
        Self::new(c, BTreeMap::new())
    }

    pub fn m(&self) -> usize {
        self.c.len() - 1
    }

    pub fn c(&self) -> &[FieldElement] {
        &self.c
    }

    pub fn linear(&self) -> &BTreeMap<usize, Vec<FieldElement>> {
        &self.linear
    }

    pub fn linear_form(&self, n: usize) -> Option<&[FieldElement]> {
        self.linear.get(&n).map(Vec::as_slice)
    }

    pub fn to_json(&self, fq: &Fq) -> Value {
        let linear: Map<String, Value> = self
            .linear
            .iter()
            .map(|(n, lam)| {
                (n.to_string(), Value::Array(lam.iter().map(|&x| element_to_json(fq, x)).collect()))
            })
            .collect();
        json!({
            "m": self.m(),
            "c": self.c.iter().map(|&x| element_to_json(fq, x)).collect::<Vec<_>>(),
            "linear": linear,
        })
    }

    pub fn from_json(fq: &Fq, v: &Value) -> Result<Self> {
        let c = v
            .get("c")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("band needs a \"c\" array".into()))?
            .iter()
            .map(|x| element_from_json(fq, x))
            .collect::<Result<Vec<_>>>()?;
        let mut linear = BTreeMap::new();
        if let Some(obj) = v.get("linear") {
            let obj = obj.as_object().ok_or_else(|| Error::Parse("\"linear\" must be an object".into()))?;
            for (k, lam) in obj {
                let n: usize = k.parse().map_err(|_| Error::Parse(format!("bad degree key {k:?}")))?;
                let lam = lam
                    .as_array()
                    .ok_or_else(|| Error::Parse("linear form must be an array".into()))?
                    .iter()
                    .map(|x| element_from_json(fq, x))
                    .collect::<Result<Vec<_>>>()?;
                linear.insert(n, lam);
            }
        }
        let spec = BandSpec::new(c, linear)?;
        if let Some(m) = v.get("m") {
            if m.as_u64() != Some(spec.m() as u64) {
                return Err(Error::Parse(format!("\"m\" = {m} disagrees with the length of \"c\"")));
            }
        }
        Ok(spec)
    }
}

/// A finitely supported Laurent polynomial `sum_{k=lo}^{hi} s_k z^k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct LaurentSymbol {
    lo: i64,
    coeffs: Vec<FieldElement>,
}

impl LaurentSymbol {
    /// Trims zero coefficients from both ends.
    pub fn new(lo: i64, coeffs: Vec<FieldElement>) -> Self {
        let Some(first) = coeffs.iter().position(|c| !c.is_zero()) else {
            return LaurentSymbol::zero();
        };
        let last = coeffs.iter().rposition(|c| !c.is_zero()).unwrap();
        LaurentSymbol { lo: lo + first as i64, coeffs: coeffs[first..=last].to_vec() }
    }

    pub fn zero() -> Self {
        LaurentSymbol { lo: 0, coeffs: Vec::new() }
    }

    pub fn constant(c: FieldElement) -> Self {
        LaurentSymbol::new(0, vec![c])
    }

    pub fn from_poly(f: &Poly) -> Self {
        LaurentSymbol::new(0, f.coeffs().to_vec())
    }

    /// `f(1/z)`.
    pub fn from_poly_inverted(f: &Poly) -> Self {
        match f.degree() {
            None => LaurentSymbol::zero(),
            Some(d) => LaurentSymbol::new(-(d as i64), f.coeffs().iter().rev().copied().collect()),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, k: i64) -> FieldElement {
        if k < self.lo {
            return FieldElement::ZERO;
        }
        self.coeffs.get((k - self.lo) as usize).copied().unwrap_or(FieldElement::ZERO)
    }

    /// `(min, max)` exponents carrying nonzero coefficients.
    pub fn support(&self) -> Option<(i64, i64)> {
        (!self.is_zero()).then(|| (self.lo, self.lo + self.coeffs.len() as i64 - 1))
    }

    /// `S(1/z)`.
    pub fn reflect(&self) -> Self {
        match self.support() {
            None => LaurentSymbol::zero(),
            Some((_, hi)) => LaurentSymbol::new(-hi, self.coeffs.iter().rev().copied().collect()),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        *self == self.reflect()
    }

    pub fn constant_term(&self) -> FieldElement {
        self.coeff(0)
    }

    /// `z^k S` as an ordinary polynomial; `None` if that has negative exponents.
    pub fn shifted_poly(&self, k: i64) -> Option<Poly> {
        match self.support() {
            None => Some(Poly::zero()),
            Some((lo, _)) if lo + k < 0 => None,
            Some((lo, _)) => {
                let mut coeffs = vec![FieldElement::ZERO; (lo + k) as usize];
                coeffs.extend_from_slice(&self.coeffs);
                Some(Poly::from_coeffs(coeffs))
            }
        }
    }

    pub fn add(&self, fq: &Fq, other: &Self) -> Self {
        self.combine(other, |a, b| fq.add(a, b))
    }

    pub fn sub(&self, fq: &Fq, other: &Self) -> Self {
        self.combine(other, |a, b| fq.sub(a, b))
    }

    fn combine(&self, other: &Self, op: impl Fn(FieldElement, FieldElement) -> FieldElement) -> Self {
        let (a, b) = match (self.support(), other.support()) {
            (None, None) => return LaurentSymbol::zero(),
            (Some(s), None) | (None, Some(s)) => s,
            (Some((l1, h1)), Some((l2, h2))) => (l1.min(l2), h1.max(h2)),
        };
        LaurentSymbol::new(a, (a..=b).map(|k| op(self.coeff(k), other.coeff(k))).collect())
    }

    pub fn mul(&self, fq: &Fq, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return LaurentSymbol::zero();
        }
        let mut out = vec![FieldElement::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &x) in self.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, &y) in other.coeffs.iter().enumerate() {
                out[i + j] = fq.add(out[i + j], fq.mul(x, y));
            }
        }
        LaurentSymbol::new(self.lo + other.lo, out)
    }

    pub fn scale(&self, fq: &Fq, c: FieldElement) -> Self {
        LaurentSymbol::new(self.lo, self.coeffs.iter().map(|&x| fq.mul(x, c)).collect())
    }
}

/// A band spec bound to its coefficient ring.
#[derive(Debug, Clone)]
pub struct BandForm {
    ring: PolyRing,
    spec: BandSpec,
}

impl BandForm {
    pub fn new(ring: PolyRing, spec: BandSpec) -> Self {
        BandForm { ring, spec }
    }

    pub fn ring(&self) -> &PolyRing {
        &self.ring
    }

    pub fn field(&self) -> &Fq {
        self.ring.field()
    }

    pub fn spec(&self) -> &BandSpec {
        &self.spec
    }

    pub fn m(&self) -> usize {
        self.spec.m()
    }

    /// `sum_j c_j S^(j)` on a digit vector.
    pub fn quadratic_part(&self, digits: &[FieldElement]) -> FieldElement {
        let fq = self.field();
        self.spec
            .c
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .fold(FieldElement::ZERO, |acc, (j, &c)| fq.add(acc, fq.mul(c, correlation_sj(fq, digits, j))))
    }

    /// `l_n` on the digit vector `(f_0, ..., f_n)`, zero for unspecified degrees.
    pub fn linear_part(&self, digits: &[FieldElement]) -> FieldElement {
        let fq = self.field();
        let Some(n) = digits.len().checked_sub(1) else {
            return FieldElement::ZERO;
        };
        match self.spec.linear_form(n) {
            None => FieldElement::ZERO,
            Some(lam) => lam
                .iter()
                .zip(digits)
                .fold(FieldElement::ZERO, |acc, (&l, &d)| fq.add(acc, fq.mul(l, d))),
        }
    }

    /// `Q_A` on an explicit digit vector `(f_0, ..., f_n)`; `n = digits.len() - 1`.
    pub fn q_value(&self, digits: &[FieldElement]) -> FieldElement {
        self.field().add(self.quadratic_part(digits), self.linear_part(digits))
    }

    /// `Q_A(f)` with `n = deg f`.
    pub fn q_value_poly(&self, f: &Poly) -> Result<FieldElement> {
        let n = f.degree().ok_or(Error::ZeroPolynomial)?;
        Ok(self.q_value(&f.digits(n + 1)))
    }

    /// `A(z) = c_0 + (1/2) sum_{l >= 1} c_l (z^l + z^-l)`.
    pub fn symbol_a(&self) -> LaurentSymbol {
        let fq = self.field();
        let m = self.m() as i64;
        let half = fq.half();
        let coeffs = (-m..=m)
            .map(|k| {
                let c = self.spec.c[k.unsigned_abs() as usize];
                if k == 0 {
                    c
                } else {
                    fq.mul(half, c)
                }
            })
            .collect();
        LaurentSymbol::new(-m, coeffs)
    }

    /// `P(z) = z^m A(z)`.
    pub fn symbol_p(&self) -> Poly {
        self.symbol_a().shifted_poly(self.m() as i64).expect("A is supported in [-m, m]")
    }

    /// `g(z) g(1/z)`.
    pub fn gg_bar(&self, g: &Poly) -> LaurentSymbol {
        LaurentSymbol::from_poly(g).mul(self.field(), &LaurentSymbol::from_poly_inverted(g))
    }

    /// `CT A(z) f(z) f(1/z)`.
    pub fn quadratic_part_ct(&self, f: &Poly) -> FieldElement {
        self.half_polar(f, f)
    }

    /// `B_A(f, h) = CT A(z) f(z) h(1/z)`.
    pub fn half_polar(&self, f: &Poly, h: &Poly) -> FieldElement {
        let fq = self.field();
        let a = self.symbol_a();
        // CT A f h(1/z) = sum_{s, b} A_s f_{b-s} h_b
        let mut acc = FieldElement::ZERO;
        for (b, &hb) in h.coeffs().iter().enumerate() {
            if hb.is_zero() {
                continue;
            }
            let m = self.m() as i64;
            for s in -m..=m {
                let idx = b as i64 - s;
                if idx < 0 {
                    continue;
                }
                let fi = f.coeff(idx as usize);
                if fi.is_zero() {
                    continue;
                }
                acc = fq.add(acc, fq.mul(a.coeff(s), fq.mul(fi, hb)));
            }
        }
        acc
    }

    /// `H = A(z) (g1(z) g1(1/z) - g2(z) g2(1/z))` for `deg g1 = deg g2`.
    pub fn symbol_of_pair_difference(&self, g1: &Poly, g2: &Poly) -> Result<LaurentSymbol> {
        let k1 = g1.degree().ok_or(Error::ZeroPolynomial)?;
        let k2 = g2.degree().ok_or(Error::ZeroPolynomial)?;
        if k1 != k2 {
            return Err(Error::DegreeMismatch(k1, k2));
        }
        let fq = self.field();
        Ok(self.symbol_a().mul(fq, &self.gg_bar(g1).sub(fq, &self.gg_bar(g2))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring3() -> PolyRing {
        PolyRing::new(Fq::prime(3).unwrap())
    }

    fn band(r: &PolyRing, c: &[i64]) -> BandForm {
        let fq = r.field();
        BandForm::new(r.clone(), BandSpec::quadratic(c.iter().map(|&x| fq.from_int(x)).collect()).unwrap())
    }

    fn fixture_bands(r: &PolyRing) -> Vec<BandForm> {
        [&[1][..], &[0, 1], &[1, 2], &[2, 1, 1], &[0, 0, 1], &[1, 0, 2]]
            .iter()
            .map(|c| band(r, c))
            .collect()
    }

    fn all_polys_up_to(r: &PolyRing, max_deg: usize) -> Vec<Poly> {
        let q = r.field().q() as u64;
        let total = q.pow(max_deg as u32 + 1);
        (0..total)
            .map(|mut i| {
                let mut c = Vec::new();
                for _ in 0..=max_deg {
                    c.push(r.field().from_index((i % q) as u32).unwrap());
                    i /= q;
                }
                Poly::from_coeffs(c)
            })
            .collect()
    }

    #[test]
    fn correlation_examples() {
        let r = ring3();
        let fq = r.field();
        let f = r.parse("t^2+2t+1").unwrap();
        assert_eq!(correlation_sj(fq, &f.digits(3), 1), fq.from_int(1));
        let g = r.parse("2t^3+t+2").unwrap();
        assert_eq!(correlation_sj(fq, &g.digits(4), 3), fq.mul(fq.from_int(2), fq.from_int(2)));
        assert_eq!(correlation_sj(fq, &Poly::zero().digits(4), 1), fq.zero());
        assert_eq!(correlation_sj(fq, &f.digits(3), 5), fq.zero());
    }

    #[test]
    fn q_value_examples() {
        let r = ring3();
        let fq = r.field();
        let f = r.parse("t^2+2t+1").unwrap();
        let diag = band(&r, &[1]);
        let sum_sq = f.coeffs().iter().fold(fq.zero(), |a, &x| fq.add(a, fq.mul(x, x)));
        assert_eq!(diag.q_value_poly(&f).unwrap(), sum_sq);
        let rs = band(&r, &[0, 1]);
        assert_eq!(rs.q_value_poly(&f).unwrap(), fq.from_int(1));
        assert_eq!(rs.quadratic_part_ct(&f), fq.from_int(1));
        let mut linear = BTreeMap::new();
        linear.insert(3, vec![fq.one(); 4]);
        let lin = BandForm::new(r.clone(), BandSpec::new(vec![fq.one()], linear).unwrap());
        assert_eq!(lin.q_value(&Poly::zero().digits(4)), fq.zero());
        // f = t^3: S^(0) = 1, l_3 = 1
        assert_eq!(lin.q_value_poly(&r.parse("t^3").unwrap()).unwrap(), fq.from_int(2));
    }

    #[test]
    fn symbol_examples() {
        let r = ring3();
        let fq = r.field();
        let one = band(&r, &[1]);
        assert_eq!(one.symbol_a(), LaurentSymbol::constant(fq.one()));
        assert_eq!(one.symbol_p(), Poly::one());
        let rs = band(&r, &[0, 1]);
        let two = fq.from_int(2);
        assert_eq!(rs.symbol_a(), LaurentSymbol::new(-1, vec![two, fq.zero(), two]));
        assert_eq!(rs.symbol_p(), r.parse("2t^2+2").unwrap());
        for b in fixture_bands(&r) {
            assert!(b.symbol_a().is_symmetric());
            let p = b.symbol_p();
            assert!(!p.coeff(0).is_zero());
            assert_eq!(p.degree(), Some(2 * b.m()));
            assert_eq!(r.reciprocal_star(&p).unwrap(), p);
        }
    }

    #[test]
    fn band_validation() {
        let fq = Fq::prime(3).unwrap();
        assert!(BandSpec::quadratic(vec![fq.one(), fq.zero()]).is_err());
        assert!(BandSpec::quadratic(vec![]).is_err());
        let mut linear = BTreeMap::new();
        linear.insert(2, vec![fq.one(); 2]);
        assert!(BandSpec::new(vec![fq.one()], linear).is_err());
    }

    #[test]
    fn band_json_roundtrip() {
        let fq = Fq::prime(5).unwrap();
        let mut linear = BTreeMap::new();
        linear.insert(2, vec![fq.from_int(1), fq.from_int(4), fq.zero()]);
        let spec = BandSpec::new(vec![fq.from_int(3), fq.zero(), fq.from_int(2)], linear).unwrap();
        let v = spec.to_json(&fq);
        assert_eq!(v.to_string(), r#"{"c":[[3],[0],[2]],"linear":{"2":[[1],[4],[0]]},"m":2}"#);
        assert_eq!(BandSpec::from_json(&fq, &v).unwrap(), spec);
        let bare: Value = serde_json::from_str(r#"{"m":1,"c":[0,1]}"#).unwrap();
        assert_eq!(BandSpec::from_json(&fq, &bare).unwrap().m(), 1);
        let wrong_m: Value = serde_json::from_str(r#"{"m":2,"c":[0,1]}"#).unwrap();
        assert!(BandSpec::from_json(&fq, &wrong_m).is_err());
    }

    #[test]
    fn constant_term_matches_correlations_exhaustive() {
        let r = ring3();
        let polys = all_polys_up_to(&r, 4);
        for b in fixture_bands(&r) {
            for f in &polys {
                assert_eq!(b.quadratic_part_ct(f), b.quadratic_part(&f.digits(5)));
            }
        }
    }

    #[test]
    fn half_polar_facts() {
        let r = ring3();
        let fq = r.field();
        let one = band(&r, &[1]);
        let polys = all_polys_up_to(&r, 2);
        for f in &polys {
            assert_eq!(one.half_polar(f, &Poly::zero()), fq.zero());
            for h in &polys {
                let dot = (0..3).fold(fq.zero(), |a, i| fq.add(a, fq.mul(f.coeff(i), h.coeff(i))));
                assert_eq!(one.half_polar(f, h), dot);
            }
        }
        for b in fixture_bands(&r) {
            for f in &polys {
                for h in &polys {
                    let lhs = fq.sub(
                        fq.sub(b.quadratic_part_ct(&r.add(f, h)), b.quadratic_part_ct(f)),
                        b.quadratic_part_ct(h),
                    );
                    assert_eq!(lhs, fq.mul(fq.from_int(2), b.half_polar(f, h)));
                }
            }
        }
    }

    #[test]
    fn linear_remainder_is_additive() {
        let r = ring3();
        let fq = r.field();
        let mut linear = BTreeMap::new();
        linear.insert(3, vec![fq.from_int(1), fq.from_int(2), fq.from_int(0), fq.from_int(1)]);
        let b = BandForm::new(r.clone(), BandSpec::new(vec![fq.one(), fq.from_int(2)], linear).unwrap());
        let polys = all_polys_up_to(&r, 3);
        let rest = |f: &Poly| {
            let d = f.digits(4);
            fq.sub(b.q_value(&d), b.quadratic_part_ct(f))
        };
        for f in polys.iter().step_by(5) {
            for h in polys.iter().step_by(7) {
                assert_eq!(rest(&r.add(f, h)), fq.add(rest(f), rest(h)));
            }
        }
    }

    #[test]
    fn pair_difference_vanishes_exactly_on_reciprocal_equal_pairs() {
        let r = ring3();
        for b in fixture_bands(&r) {
            for k in 0..=3 {
                let gs: Vec<Poly> = r.enumerate_monic(k).collect();
                for g1 in &gs {
                    let s1 = r.mul(&r.reciprocal_star(g1).unwrap(), g1);
                    for g2 in &gs {
                        let h = b.symbol_of_pair_difference(g1, g2).unwrap();
                        let s2 = r.mul(&r.reciprocal_star(g2).unwrap(), g2);
                        assert_eq!(h.is_zero(), s1 == s2);
                        if let Some((lo, hi)) = h.support() {
                            let bound = (k + b.m()) as i64;
                            assert!(lo >= -bound && hi <= bound);
                        }
                    }
                }
            }
        }
        let b = band(&r, &[0, 1]);
        assert!(b
            .symbol_of_pair_difference(&r.parse("t").unwrap(), &r.parse("t^2").unwrap())
            .is_err());
    }
}
