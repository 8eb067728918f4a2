//! Exhaustive experiments over P(n) and M(n): value counts, character sums,
//! the Vaughan sums, complete quadratic Gauss sums and the exponent audit.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigUint;
use num_rational::Rational64;
use num_traits::{Signed, Zero};
use rand::Rng;
use rayon::prelude::*;

use crate::bandform::BandForm;
use crate::budget::{qpow, Budget};
use crate::cyclotomic::CountVector;
use crate::error::{Error, Result};
use crate::gf::{Character, FieldElement, Fq};
use crate::polyring::{Poly, PolyRing};
use crate::ranklab::{delta_a, MatrixFq};

/// Rough per-polynomial cost of an irreducibility test or factorization.
fn poly_cost(n: usize) -> u128 {
    ((n + 1) * (n + 1) * (n + 1)) as u128
}

fn monic_count(ring: &PolyRing, n: usize) -> Result<u64> {
    ring.count_monic(n)
        .ok_or_else(|| Error::InvalidParams(format!("q^{n} does not fit in 64 bits")))
}

/// `Q_A(f)` for every `f` in M(n), by monic index.
fn q_table(form: &BandForm, n: usize) -> Vec<FieldElement> {
    form.ring().par_map_monic(n, |f| form.q_value(&f.digits(n + 1)))
}

/// `(Q_A(f), [f irreducible])` for every `f` in M(n).
fn q_table_irreducible(form: &BandForm, n: usize) -> Vec<(FieldElement, bool)> {
    let ring = form.ring();
    ring.par_map_monic(n, |f| {
        let irr = ring.is_irreducible(&f).expect("monic of degree >= 1");
        (form.q_value(&f.digits(n + 1)), irr)
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanResult {
    pub n: usize,
    /// Counts keyed by the requested values of gamma.
    pub counts: BTreeMap<FieldElement, u64>,
    /// `|P(n)|`.
    pub total: u64,
}

impl ScanResult {
    /// `|P(n)| / q`, the equidistributed count.
    pub fn reference(&self, q: u32) -> f64 {
        self.total as f64 / q as f64
    }
}

/// Counts `f` in P(n) with `Q_A(f) = gamma`, for each gamma in `gammas` (all of F_q if `None`).
pub fn scan_counts(
    form: &BandForm,
    n: usize,
    gammas: Option<&[FieldElement]>,
    budget: &Budget,
) -> Result<ScanResult> {
    if n == 0 {
        return Err(Error::InvalidParams("scan needs n >= 1".into()));
    }
    let fq = form.field();
    let ring = form.ring();
    let size = monic_count(ring, n)?;
    budget.charge(size as u128 * poly_cost(n))?;
    let mut all = vec![0u64; fq.q() as usize];
    let mut total = 0;
    for (v, irr) in q_table_irreducible(form, n) {
        if irr {
            all[v.index() as usize] += 1;
            total += 1;
        }
    }
    let keys: Vec<FieldElement> = match gammas {
        Some(g) => g.to_vec(),
        None => fq.elements().collect(),
    };
    let counts = keys.into_iter().map(|g| (g, all[g.index() as usize])).collect();
    Ok(ScanResult { n, counts, total })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CharSumResult {
    pub counts: CountVector,
    /// Number of summands counted with their weights.
    pub weight: i64,
    pub magnitude: f64,
    pub phase: f64,
}

impl CharSumResult {
    fn from_counts(counts: CountVector) -> Self {
        CharSumResult {
            weight: counts.total(),
            magnitude: counts.magnitude(),
            phase: counts.phase(),
            counts,
        }
    }
}

/// `sum_{f in P(n)} psi(Q_A(f))`.
pub fn charsum_irreducible(form: &BandForm, n: usize, ch: Character, budget: &Budget) -> Result<CharSumResult> {
    if n == 0 {
        return Err(Error::InvalidParams("character sums need n >= 1".into()));
    }
    let fq = form.field();
    let size = monic_count(form.ring(), n)?;
    budget.charge(size as u128 * poly_cost(n))?;
    let mut cv = CountVector::zero(fq.p());
    for (v, irr) in q_table_irreducible(form, n) {
        if irr {
            cv.push(fq.char_index(ch, v), 1);
        }
    }
    Ok(CharSumResult::from_counts(cv))
}

/// `V_n(psi) = sum_{f in M(n)} Lambda(f) psi(Q_A(f))`.
pub fn charsum_vonmangoldt(form: &BandForm, n: usize, ch: Character, budget: &Budget) -> Result<CharSumResult> {
    if n == 0 {
        return Err(Error::InvalidParams("character sums need n >= 1".into()));
    }
    let fq = form.field();
    let ring = form.ring();
    let size = monic_count(ring, n)?;
    budget.charge(size as u128 * poly_cost(n))?;
    let rows = ring.par_map_monic(n, |f| {
        let lam = ring.von_mangoldt(&f).expect("monic of degree >= 1");
        (form.q_value(&f.digits(n + 1)), lam)
    });
    let mut cv = CountVector::zero(fq.p());
    for (v, lam) in rows {
        if lam > 0 {
            cv.push(fq.char_index(ch, v), lam as i64);
        }
    }
    Ok(CharSumResult::from_counts(cv))
}

/// `sum (deg pi) psi(Q_A(pi^j))` over monic irreducible `pi` with `j >= 2`, `j deg pi = n`,
/// built from the irreducibles of each proper divisor degree.
pub fn prime_power_correction(form: &BandForm, n: usize, ch: Character, budget: &Budget) -> Result<CountVector> {
    let fq = form.field();
    let ring = form.ring();
    let mut cv = CountVector::zero(fq.p());
    for d in (1..n).filter(|d| n.is_multiple_of(*d)) {
        let size = monic_count(ring, d)?;
        budget.charge(size as u128 * poly_cost(n))?;
        for pi in ring.enumerate_irreducible(d) {
            let f = ring.pow(&pi, (n / d) as u32);
            cv.push(fq.char_index(ch, form.q_value(&f.digits(n + 1))), d as i64);
        }
    }
    Ok(cv)
}

/// Rebuilds `q * #{f : Q_A(f) = gamma}` from the character sums
/// `S_a = sum psi(a Q_A(f))` over all `a` in F_q, via
/// `q N(gamma) = sum_a psi(-a gamma) S_a`. Fails unless every result is an
/// integer multiple of q.
pub fn reconstruct_counts(fq: &Fq, sums: &[(Character, CountVector)]) -> Result<BTreeMap<FieldElement, u64>> {
    let q = fq.q() as i64;
    let mut out = BTreeMap::new();
    for gamma in fq.elements() {
        let mut acc = CountVector::zero(fq.p());
        for (ch, s) in sums {
            acc.add_assign(&s.shifted(fq.char_index(*ch, fq.neg(gamma))));
        }
        let total = acc
            .as_integer()
            .ok_or_else(|| Error::InvalidParams("character sums do not reconstruct to an integer".into()))?;
        if total < 0 || total % q != 0 {
            return Err(Error::InvalidParams(format!("reconstructed q*count {total} is not a multiple of q")));
        }
        out.insert(gamma, (total / q) as u64);
    }
    Ok(out)
}

/// Character sums over P(n) for every character (trivial included), in field-element order of the scale.
pub fn all_charsums_irreducible(form: &BandForm, n: usize, budget: &Budget) -> Result<Vec<(Character, CountVector)>> {
    form.field()
        .elements()
        .map(|a| {
            let ch = Character::from_scale(a);
            Ok((ch, charsum_irreducible(form, n, ch, budget)?.counts))
        })
        .collect()
}

/// Cutoffs for the Vaughan decomposition of a degree-n sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VaughanParams {
    pub n: usize,
    pub u: usize,
    pub v: usize,
}

impl VaughanParams {
    pub fn new(n: usize, u: usize, v: usize) -> Result<Self> {
        if u + v >= n {
            return Err(Error::InvalidParams(format!("cutoffs need u + v < n, got u={u}, v={v}, n={n}")));
        }
        Ok(VaughanParams { n, u, v })
    }

    /// `u = floor(n/5)`, `v = floor(7n/10)`.
    pub fn standard(n: usize) -> Result<Self> {
        Self::new(n, n / 5, 7 * n / 10)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sigma1Result {
    pub value: f64,
    /// `T_k = sum_{g in M(k)} |sum_{h in M(n-k)} Psi(g h)|` for `k = 0..=u+v`.
    pub table: Vec<f64>,
}

/// `Sigma_1 = sum_{k <= u+v} sum_{g in M(k)} |sum_{h in M(n-k)} Psi(g h)|`.
pub fn sigma1(form: &BandForm, params: VaughanParams, ch: Character, budget: &Budget) -> Result<Sigma1Result> {
    let VaughanParams { n, u, v } = params;
    let fq = form.field();
    let ring = form.ring();
    let size = monic_count(ring, n)?;
    budget.charge(size as u128 * (u + v + 2) as u128 * poly_cost(n))?;
    let psi: Vec<u32> = q_table(form, n).into_iter().map(|x| fq.char_index(ch, x)).collect();
    let table: Vec<f64> = (0..=u + v)
        .map(|k| {
            ring.par_map_monic(k, |g| {
                let mut cv = CountVector::zero(fq.p());
                for h in ring.enumerate_monic(n - k) {
                    cv.push(psi[ring.monic_index(&ring.mul(&g, &h)) as usize], 1);
                }
                cv.magnitude()
            })
            .into_iter()
            .sum()
        })
        .collect();
    Ok(Sigma1Result { value: table.iter().sum(), table })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sigma2Row {
    pub i: usize,
    pub g1: Poly,
    /// `sum_{g2} |sum_h Psi(h g1) conj(Psi(h g2))|`.
    pub value: f64,
    /// Number of `g2` with `g2* g2 = g1* g1`.
    pub exceptional: u64,
    pub tau: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sigma2Result {
    pub value: f64,
    pub witness_i: usize,
    pub witness_g1: Poly,
    pub rows: Vec<Sigma2Row>,
}

impl Sigma2Result {
    pub fn exceptional_ok(&self) -> bool {
        self.rows.iter().all(|r| r.exceptional <= r.tau)
    }
}

/// Inner sum `sum_{h in M(i)} Psi(h g1) conj(Psi(h g2))` for a pair of Psi rows.
pub fn sigma2_inner(p: u32, row1: &[u32], row2: &[u32]) -> CountVector {
    let mut cv = CountVector::zero(p);
    for (&a, &b) in row1.iter().zip(row2) {
        cv.push((a + p - b) % p, 1);
    }
    cv
}

/// `Sigma_2 = max_{v <= i <= n-u} max_{g1 in M(n-i)} sum_{g2 in M(n-i)} |sum_{h in M(i)} Psi(h g1) conj(Psi(h g2))|`.
pub fn sigma2(form: &BandForm, params: VaughanParams, ch: Character, budget: &Budget) -> Result<Sigma2Result> {
    let VaughanParams { n, u, v } = params;
    if v > n - u {
        return Err(Error::InvalidParams(format!("empty range v={v} > n-u={}", n - u)));
    }
    let fq = form.field();
    let ring = form.ring();
    let p = fq.p();
    let q = fq.q();
    let cost: u128 = (v..=n - u)
        .map(|i| qpow(q, n - i).saturating_mul(qpow(q, n - i)).saturating_mul(qpow(q, i)))
        .sum::<u128>()
        + monic_count(ring, n)? as u128 * poly_cost(n);
    budget.charge(cost)?;
    let psi: Vec<u32> = q_table(form, n).into_iter().map(|x| fq.char_index(ch, x)).collect();
    let mut rows = Vec::new();
    for i in v..=n - u {
        let k = n - i;
        let gs: Vec<Poly> = ring.enumerate_monic(k).collect();
        let psi_rows: Vec<Vec<u32>> = gs
            .par_iter()
            .map(|g| {
                ring.enumerate_monic(i)
                    .map(|h| psi[ring.monic_index(&ring.mul(&h, g)) as usize])
                    .collect()
            })
            .collect();
        let syms: Vec<Poly> = gs
            .iter()
            .map(|g| ring.mul(&ring.reciprocal_star(g).expect("monic"), g))
            .collect();
        let part: Vec<Sigma2Row> = (0..gs.len())
            .into_par_iter()
            .map(|a| {
                let value = (0..gs.len())
                    .map(|b| sigma2_inner(p, &psi_rows[a], &psi_rows[b]).magnitude())
                    .sum();
                let exceptional = syms.iter().filter(|s| **s == syms[a]).count() as u64;
                Sigma2Row {
                    i,
                    g1: gs[a].clone(),
                    value,
                    exceptional,
                    tau: ring.tau(&gs[a]).expect("monic"),
                }
            })
            .collect();
        rows.extend(part);
    }
    // First maximum in (i, g1) order.
    let best = rows
        .iter()
        .fold(None::<&Sigma2Row>, |acc, r| match acc {
            Some(b) if b.value >= r.value => Some(b),
            _ => Some(r),
        })
        .expect("nonempty range");
    Ok(Sigma2Result {
        value: best.value,
        witness_i: best.i,
        witness_g1: best.g1.clone(),
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReciprocalCandidate {
    pub divisor: Poly,
    /// `d * b1(0)^{-1} * b1*` where `b = d b1`; `None` when `b1(0) = 0`.
    pub candidate: Option<Poly>,
    pub is_solution: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReciprocalReport {
    /// All monic `a` of degree `deg b` with `a* a = b* b`, by exhaustive search.
    pub solutions: Vec<Poly>,
    pub candidates: Vec<ReciprocalCandidate>,
    pub tau: u64,
}

impl ReciprocalReport {
    /// Each exhaustive solution equals the candidate built from `gcd(a, b)`,
    /// and no two solutions share that gcd.
    pub fn matches_construction(&self, ring: &PolyRing, b: &Poly) -> bool {
        let mut seen = BTreeSet::new();
        self.solutions.iter().all(|a| {
            let d = ring.gcd(a, b);
            let hit = self
                .candidates
                .iter()
                .any(|c| c.divisor == d && c.candidate.as_ref() == Some(a));
            hit && seen.insert(d)
        })
    }

    pub fn within_tau(&self) -> bool {
        self.solutions.len() as u64 <= self.tau
    }
}

pub fn reciprocal_symbol(ring: &PolyRing, a: &Poly) -> Result<Poly> {
    Ok(ring.mul(&ring.reciprocal_star(a)?, a))
}

/// Solutions of `a* a = b* b` in M(deg b).
pub fn reciprocal_solutions(ring: &PolyRing, b: &Poly, budget: &Budget) -> Result<ReciprocalReport> {
    if !b.is_monic() {
        return Err(if b.is_zero() { Error::ZeroPolynomial } else { Error::NotMonic });
    }
    let k = b.degree().unwrap();
    let size = monic_count(ring, k)?;
    budget.charge(size as u128 * poly_cost(2 * k))?;
    let target = reciprocal_symbol(ring, b)?;
    let solutions: Vec<Poly> = ring
        .par_map_monic(k, |a| (reciprocal_symbol(ring, &a).expect("monic") == target).then_some(a))
        .into_iter()
        .flatten()
        .collect();
    let fq = ring.field();
    let candidates = ring
        .divisors(b)?
        .into_iter()
        .map(|d| {
            let b1 = ring.div_exact(b, &d).expect("divisor");
            let candidate = fq.inv(b1.coeff(0)).ok().map(|c| {
                let star = ring.reciprocal_star(&b1).expect("nonzero");
                ring.scale(&ring.mul(&d, &star), c)
            });
            let is_solution = candidate
                .as_ref()
                .is_some_and(|a| reciprocal_symbol(ring, a).expect("monic") == target);
            ReciprocalCandidate { divisor: d, candidate, is_solution }
        })
        .collect();
    Ok(ReciprocalReport { solutions, candidates, tau: ring.tau(b)? })
}

/// `Q(x) = sum_{i <= j} a_ij x_i x_j`, stored as the upper-triangular matrix `(a_ij)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticForm {
    upper: MatrixFq,
}

impl QuadraticForm {
    pub fn new(upper: MatrixFq) -> Result<Self> {
        if upper.rows() != upper.cols() {
            return Err(Error::InvalidParams("quadratic form matrix must be square".into()));
        }
        for r in 0..upper.rows() {
            for c in 0..r {
                if !upper.get(r, c).is_zero() {
                    return Err(Error::InvalidParams("quadratic form matrix must be upper triangular".into()));
                }
            }
        }
        Ok(QuadraticForm { upper })
    }

    pub fn random<R: Rng>(fq: &Fq, dim: usize, rng: &mut R) -> Self {
        let mut upper = MatrixFq::zeros(dim, dim);
        for r in 0..dim {
            for c in r..dim {
                upper.set(r, c, fq.from_index(rng.gen_range(0..fq.q())).unwrap());
            }
        }
        QuadraticForm { upper }
    }

    pub fn dim(&self) -> usize {
        self.upper.rows()
    }

    pub fn upper(&self) -> &MatrixFq {
        &self.upper
    }

    pub fn eval(&self, fq: &Fq, x: &[FieldElement]) -> FieldElement {
        let mut acc = fq.zero();
        for r in 0..self.dim() {
            for c in r..self.dim() {
                let a = self.upper.get(r, c);
                if !a.is_zero() {
                    acc = fq.add(acc, fq.mul(a, fq.mul(x[r], x[c])));
                }
            }
        }
        acc
    }

    /// The polar matrix `B(x, y) = Q(x + y) - Q(x) - Q(y)`.
    pub fn polar(&self, fq: &Fq) -> MatrixFq {
        let t = self.upper.transpose();
        let mut b = self.upper.clone();
        for r in 0..self.dim() {
            for c in 0..self.dim() {
                b.set(r, c, fq.add(b.get(r, c), t.get(r, c)));
            }
        }
        b
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussCheck {
    pub counts: CountVector,
    pub magnitude: f64,
    pub rank: usize,
    /// `q^{N - r/2}`.
    pub bound: f64,
    pub vanishes: bool,
    pub verdict: bool,
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

/// The complete sum `sum_{x in F_q^N} psi(Q(x) + M(x))` and the dichotomy
/// `|sum| in {0, q^{N - r/2}}` with `r` the polar rank.
pub fn gauss_sum_check(
    fq: &Fq,
    form: &QuadraticForm,
    linear: &[FieldElement],
    ch: Character,
    budget: &Budget,
) -> Result<GaussCheck> {
    let dim = form.dim();
    if linear.len() != dim {
        return Err(Error::InvalidParams("linear form length differs from the quadratic form".into()));
    }
    let q = fq.q();
    budget.charge(qpow(q, dim).saturating_mul(((dim + 1) * (dim + 1)) as u128))?;
    let mut counts = CountVector::zero(fq.p());
    let mut x = vec![fq.zero(); dim];
    let total = qpow(q, dim) as u64;
    for idx in 0..total {
        let mut rest = idx;
        for xi in x.iter_mut() {
            *xi = fq.from_index((rest % q as u64) as u32)?;
            rest /= q as u64;
        }
        let lin = x
            .iter()
            .zip(linear)
            .fold(fq.zero(), |acc, (&a, &b)| fq.add(acc, fq.mul(a, b)));
        counts.push(fq.char_index(ch, fq.add(form.eval(fq, &x), lin)), 1);
    }
    let rank = form.polar(fq).rank(fq);
    let magnitude = counts.magnitude();
    let bound = (q as f64).powf(dim as f64 - rank as f64 / 2.0);
    let vanishes = magnitude <= 1e-6 * bound;
    let verdict = vanishes || rel_close(magnitude, bound, 1e-6);
    Ok(GaussCheck { counts, magnitude, rank, bound, vanishes, verdict })
}

/// Exponents, as fractions of n, of the three terms balanced in the final estimate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExponentAudit {
    pub u: Rational64,
    pub v: Rational64,
    /// Type I: `max(19/20, (1 + u + v)/2)`.
    pub type_i: Rational64,
    /// Non-exceptional Type II, small `i`: `1 - (u+v)/2 + (1-u)/2`.
    pub type_ii_low: Rational64,
    /// Non-exceptional Type II, large `i`: `1 - (u+v)/2 + (3/2 - v)/2`.
    pub type_ii_high: Rational64,
    pub max: Rational64,
}

impl ExponentAudit {
    /// Whether every exponent is below 1.
    pub fn saves(&self) -> bool {
        self.max < Rational64::from_integer(1)
    }
}

pub fn exponent_audit(u: Rational64, v: Rational64) -> Result<ExponentAudit> {
    let one = Rational64::from_integer(1);
    let half = Rational64::new(1, 2);
    if u.is_negative() || v.is_negative() || u + v >= one {
        return Err(Error::InvalidParams(format!("invalid cutoffs u={u}, v={v}")));
    }
    let type_i = Rational64::new(19, 20).max((one + u + v) * half);
    let type_ii_low = one - (u + v) * half + (one - u) * half;
    let type_ii_high = one - (u + v) * half + (Rational64::new(3, 2) - v) * half;
    let max = type_i.max(type_ii_low).max(type_ii_high);
    Ok(ExponentAudit { u, v, type_i, type_ii_low, type_ii_high, max })
}

/// Rationals in `[0, 1)` with denominator at most `den`.
pub fn farey_points(den: i64) -> Vec<Rational64> {
    let set: BTreeSet<Rational64> = (1..=den)
        .flat_map(|b| (0..b).map(move |a| Rational64::new(a, b)))
        .collect();
    set.into_iter().collect()
}

/// Minimum of the audited maximum over all valid `(u, v)` with denominators at most `den`,
/// together with every minimizer.
pub fn exponent_grid_search(den: i64) -> (Rational64, Vec<(Rational64, Rational64)>) {
    let pts = farey_points(den);
    let mut best: Option<Rational64> = None;
    let mut argmin = Vec::new();
    for &u in &pts {
        for &v in &pts {
            let Ok(a) = exponent_audit(u, v) else { continue };
            match best {
                Some(b) if a.max > b => {}
                Some(b) if a.max == b => argmin.push((u, v)),
                _ => {
                    best = Some(a.max);
                    argmin = vec![(u, v)];
                }
            }
        }
    }
    (best.unwrap_or_else(Rational64::zero), argmin)
}

/// `a + b sqrt(q)`, exact.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SqrtQSum {
    pub integer: BigUint,
    pub sqrt_q: BigUint,
}

impl SqrtQSum {
    /// Adds `q^{delta/2}`.
    pub fn add_half_power(&mut self, q: u32, delta: usize) {
        let base = BigUint::from(q).pow((delta / 2) as u32);
        if delta.is_multiple_of(2) {
            self.integer += base;
        } else {
            self.sqrt_q += base;
        }
    }

    pub fn value(&self, q: u32) -> f64 {
        let f = |x: &BigUint| x.to_string().parse::<f64>().unwrap();
        f(&self.integer) + f(&self.sqrt_q) * (q as f64).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CentralHalfReport {
    pub kappa: usize,
    pub n: usize,
    pub sum: SqrtQSum,
    /// `kappa + 3N/8`, for comparison only.
    pub reference_exponent: f64,
    pub observed_exponent: f64,
    /// Largest fiber of `g -> P g g*`.
    pub max_fiber: u64,
    /// Every fiber has size at most `tau(g g*)`.
    pub fibers_ok: bool,
}

/// `sum_{g in M^x(kappa)} q^{Delta_A(g; N)/2}` with the fiber check for `g -> P g g*`.
pub fn central_half_sum(form: &BandForm, kappa: usize, n: usize, budget: &Budget) -> Result<CentralHalfReport> {
    let fq = form.field();
    let ring = form.ring();
    let q = fq.q();
    let size = monic_count(ring, kappa)?;
    let dim = n + kappa + form.m() + 1;
    budget.charge(size as u128 * (dim * dim * (n + 1)) as u128)?;
    let gs: Vec<Poly> = ring.enumerate_monic_nonzero_const(kappa).collect();
    let deltas: Vec<usize> = gs
        .par_iter()
        .map(|g| delta_a(form, g, n).map(|r| r.dimension))
        .collect::<Result<_>>()?;
    let mut sum = SqrtQSum::default();
    for &d in &deltas {
        sum.add_half_power(q, d);
    }
    let p = form.symbol_p();
    let mut fibers: BTreeMap<Poly, u64> = BTreeMap::new();
    for g in &gs {
        *fibers.entry(ring.mul(&p, &reciprocal_symbol(ring, g)?)).or_default() += 1;
    }
    let mut fibers_ok = true;
    for (t, &count) in &fibers {
        let quotient = ring.div_exact(t, &p)?;
        fibers_ok &= count <= ring.tau(&quotient)?;
    }
    let value = sum.value(q);
    Ok(CentralHalfReport {
        kappa,
        n,
        observed_exponent: if value > 0.0 { value.ln() / (q as f64).ln() } else { f64::NEG_INFINITY },
        sum,
        reference_exponent: kappa as f64 + 3.0 * n as f64 / 8.0,
        max_fiber: fibers.values().copied().max().unwrap_or(0),
        fibers_ok,
    })
}
