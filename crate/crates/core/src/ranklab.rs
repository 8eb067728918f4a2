//! Exact linear algebra over F_q for the polar and Toeplitz forms: ranks,
//! radicals, the rank defects `Delta_A(g; N)` and `Delta(T; N)`, the
//! reciprocal-symbol space `R_d`, the map `L_H`, and the `(T, H)` incidence count.
//!
//! Polar matrices returned here are the full polar form
//! `Q(x + y) - Q(x) - Q(y) = 2 B(x, y)`; Toeplitz matrices built from a symbol
//! carry no factor 2. Since q is odd the two differ by a unit and have equal rank.

use num_bigint::BigUint;
use num_traits::Zero;
use serde::Serialize;
use serde_json::Value;

use crate::bandform::{BandForm, LaurentSymbol};
use crate::budget::{qpow, Budget};
use crate::error::{Error, Result};
use crate::gf::{FieldElement, Fq};
use crate::polyring::{Poly, PolyRing};

/// A dense matrix over F_q, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MatrixFq {
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
}

impl MatrixFq {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        MatrixFq { rows, cols, data: vec![FieldElement::ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, FieldElement::ONE);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<FieldElement>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        MatrixFq { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> FieldElement {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, x: FieldElement) {
        self.data[r * self.cols + c] = x;
    }

    pub fn row(&self, r: usize) -> &[FieldElement] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn mul(&self, fq: &Fq, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let v = fq.add(out.get(r, c), fq.mul(a, other.get(k, c)));
                    out.set(r, c, v);
                }
            }
        }
        out
    }

    pub fn sub(&self, fq: &Fq, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        MatrixFq {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| fq.sub(a, b)).collect(),
        }
    }

    pub fn scale(&self, fq: &Fq, c: FieldElement) -> Self {
        MatrixFq { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&a| fq.mul(a, c)).collect() }
    }

    /// `s` with `self = s * other` and `s != 0`, if one exists.
    pub fn scalar_multiple_of(&self, fq: &Fq, other: &Self) -> Option<FieldElement> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return None;
        }
        let pos = other.data.iter().position(|x| !x.is_zero())?;
        let s = fq.div(self.data[pos], other.data[pos]).ok()?;
        (!s.is_zero() && *self == other.scale(fq, s)).then_some(s)
    }

    /// Reduced row echelon form and pivot columns. Pivots are taken column by
    /// column, left to right, from the first row at or below the current one
    /// with a nonzero entry.
    pub fn rref(&self, fq: &Fq) -> (MatrixFq, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(pr) = (row..m.rows).find(|&r| !m.get(r, col).is_zero()) else {
                continue;
            };
            if pr != row {
                for c in 0..m.cols {
                    m.data.swap(pr * m.cols + c, row * m.cols + c);
                }
            }
            let inv = fq.inv(m.get(row, col)).expect("pivot is nonzero");
            for c in col..m.cols {
                let v = fq.mul(m.get(row, c), inv);
                m.set(row, c, v);
            }
            for r in 0..m.rows {
                if r == row {
                    continue;
                }
                let f = m.get(r, col);
                if f.is_zero() {
                    continue;
                }
                for c in col..m.cols {
                    let v = fq.sub(m.get(r, c), fq.mul(f, m.get(row, c)));
                    m.set(r, c, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    /// Exact rank by elimination.
    pub fn rank(&self, fq: &Fq) -> usize {
        self.rref(fq).1.len()
    }

    /// Basis of `{x : self x = 0}`, one vector per free column (free entry 1).
    pub fn kernel(&self, fq: &Fq) -> Vec<Vec<FieldElement>> {
        let (r, pivots) = self.rref(fq);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![FieldElement::ZERO; self.cols];
                v[f] = FieldElement::ONE;
                for (i, &pc) in pivots.iter().enumerate() {
                    v[pc] = fq.neg(r.get(i, f));
                }
                v
            })
            .collect()
    }
}

/// Exact rank over F_q.
pub fn rank_fq(fq: &Fq, m: &MatrixFq) -> usize {
    m.rank(fq)
}

/// Canonical (RREF, zero rows dropped) basis of the span of `vectors` in F_q^len.
pub fn span_canonical(fq: &Fq, vectors: &[Vec<FieldElement>], len: usize) -> MatrixFq {
    if vectors.is_empty() {
        return MatrixFq::zeros(0, len);
    }
    let (r, pivots) = MatrixFq::from_rows(vectors.to_vec()).rref(fq);
    MatrixFq::from_rows((0..pivots.len()).map(|i| r.row(i).to_vec()).collect())
}

/// `(N+1) x (N+1)` matrix with entry `(a, b) = H_{b-a}`.
pub fn toeplitz_from_symbol(h: &LaurentSymbol, n: usize) -> MatrixFq {
    let mut m = MatrixFq::zeros(n + 1, n + 1);
    for a in 0..=n {
        for b in 0..=n {
            m.set(a, b, h.coeff(b as i64 - a as i64));
        }
    }
    m
}

/// Polar matrix of `h -> Q_{A,2}(g h)` on `V_N` in the basis `1, t, ..., t^N`,
/// computed by polarizing the digit correlations:
/// entry `(a, b) = Q2(g t^a + g t^b) - Q2(g t^a) - Q2(g t^b)`.
pub fn polar_matrix_multiplier(form: &BandForm, g: &Poly, n: usize) -> Result<MatrixFq> {
    let k = g.degree().ok_or(Error::ZeroPolynomial)?;
    let fq = form.field();
    let len = k + n + 1;
    let shifted: Vec<Vec<FieldElement>> = (0..=n).map(|a| g.shift(a).digits(len)).collect();
    let diag: Vec<FieldElement> = shifted.iter().map(|x| form.quadratic_part(x)).collect();
    let mut m = MatrixFq::zeros(n + 1, n + 1);
    for a in 0..=n {
        for b in a..=n {
            let sum: Vec<FieldElement> =
                shifted[a].iter().zip(&shifted[b]).map(|(&x, &y)| fq.add(x, y)).collect();
            let v = fq.sub(fq.sub(form.quadratic_part(&sum), diag[a]), diag[b]);
            m.set(a, b, v);
            m.set(b, a, v);
        }
    }
    Ok(m)
}

/// A radical: its dimension and an explicit basis in `V_N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RadicalReport {
    pub n: usize,
    pub dimension: usize,
    pub basis: Vec<Poly>,
}

impl RadicalReport {
    fn from_kernel(n: usize, kernel: Vec<Vec<FieldElement>>) -> Self {
        RadicalReport {
            n,
            dimension: kernel.len(),
            basis: kernel.into_iter().map(Poly::from_coeffs).collect(),
        }
    }

    pub fn canonical_span(&self, fq: &Fq) -> MatrixFq {
        let vecs: Vec<Vec<FieldElement>> = self.basis.iter().map(|b| b.digits(self.n + 1)).collect();
        span_canonical(fq, &vecs, self.n + 1)
    }

    pub fn same_span(&self, fq: &Fq, other: &RadicalReport) -> bool {
        self.n == other.n && self.canonical_span(fq) == other.canonical_span(fq)
    }
}

/// `Delta_A(g; N) = N + 1 - rank B_{g,N}` with the radical itself.
pub fn delta_a(form: &BandForm, g: &Poly, n: usize) -> Result<RadicalReport> {
    let m = polar_matrix_multiplier(form, g, n)?;
    Ok(RadicalReport::from_kernel(n, m.kernel(form.field())))
}

/// `F_{g0} = P g0 g0^*` and `d0 = deg g0 + m` for `g = t^r g0`.
pub fn gap_symbol(form: &BandForm, g: &Poly) -> Result<(Poly, usize)> {
    let ring = form.ring();
    let (_, g0) = ring.remove_zero_factor(g)?;
    let f = ring.mul(&ring.mul(&form.symbol_p(), &g0), &ring.reciprocal_star(&g0)?);
    Ok((f, g0.degree().unwrap() + form.m()))
}

/// The radical of `B_{g,N}` as the solutions of `[z^j] F_{g0}(z) h(z) = 0`
/// for `d0 <= j <= d0 + N`.
pub fn radical_via_gap(form: &BandForm, g: &Poly, n: usize) -> Result<RadicalReport> {
    let (f, d0) = gap_symbol(form, g)?;
    let m = middle_coefficient_matrix(&f, d0, n);
    Ok(RadicalReport::from_kernel(n, m.kernel(form.field())))
}

/// Rows `e = d..=d+N`, columns `b = 0..=N`, entry `F_{e-b}`: the map
/// `h -> ([z^e] F h)_e` on `V_N`.
fn middle_coefficient_matrix(f: &Poly, d: usize, n: usize) -> MatrixFq {
    let mut m = MatrixFq::zeros(n + 1, n + 1);
    for j in 0..=n {
        let e = d + j;
        for b in 0..=n.min(e) {
            m.set(j, b, f.coeff(e - b));
        }
    }
    m
}

/// A palindromic `T = x_0 z^d + sum_{a>=1} x_a (z^{d+a} + z^{d-a})` in `R_d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ReciprocalSymbol {
    d: usize,
    half: Vec<FieldElement>,
}

impl ReciprocalSymbol {
    pub fn new(d: usize, half: Vec<FieldElement>) -> Result<Self> {
        if half.len() != d + 1 {
            return Err(Error::InvalidParams(format!(
                "R_{d} needs {} coordinates, got {}",
                d + 1,
                half.len()
            )));
        }
        Ok(ReciprocalSymbol { d, half })
    }

    /// Reads coordinates off a polynomial; errors unless `T_s = T_{2d-s}` and `deg T <= 2d`.
    pub fn from_poly(t: &Poly, d: usize) -> Result<Self> {
        if t.degree().is_some_and(|k| k > 2 * d) {
            return Err(Error::InvalidParams(format!("degree exceeds 2d = {}", 2 * d)));
        }
        if (0..=2 * d).any(|s| t.coeff(s) != t.coeff(2 * d - s)) {
            return Err(Error::InvalidParams("polynomial is not palindromic about d".into()));
        }
        Ok(ReciprocalSymbol { d, half: (0..=d).map(|a| t.coeff(d + a)).collect() })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn half(&self) -> &[FieldElement] {
        &self.half
    }

    /// `(T_0, ..., T_{2d})`.
    pub fn expand(&self) -> Vec<FieldElement> {
        let d = self.d as i64;
        (0..=2 * d).map(|s| self.half[(s - d).unsigned_abs() as usize]).collect()
    }

    pub fn to_poly(&self) -> Poly {
        Poly::from_coeffs(self.expand())
    }

    /// The `index`-th element of `R_d`: base-q digits of `index` are `x_0, x_1, ...`.
    pub fn from_index(fq: &Fq, d: usize, mut index: u64) -> Self {
        let q = fq.q() as u64;
        let half = (0..=d)
            .map(|_| {
                let x = fq.from_index((index % q) as u32).unwrap();
                index /= q;
                x
            })
            .collect();
        ReciprocalSymbol { d, half }
    }

    /// All of `R_d` in index order.
    pub fn enumerate(fq: &Fq, d: usize) -> impl Iterator<Item = ReciprocalSymbol> + '_ {
        let total = (fq.q() as u64).pow(d as u32 + 1);
        (0..total).map(move |i| ReciprocalSymbol::from_index(fq, d, i))
    }
}

/// `Delta(T; N) = dim {H in V_N : [z^e] T H = 0, d <= e <= d + N}`.
pub fn delta_t(fq: &Fq, t: &ReciprocalSymbol, n: usize) -> usize {
    let m = middle_coefficient_matrix(&t.to_poly(), t.d, n);
    n + 1 - m.rank(fq)
}


/// Matrix of `L_H : T -> ([z^{d+j}] T H)_{0<=j<=N}` in the coordinates `x_0..x_d`
/// of `R_d`: row `j` is `C_j = sum_b H_b x_{|j-b|}` with `x_a = 0` for `a > d`.
pub fn build_lh(fq: &Fq, h: &Poly, d: usize, n: usize) -> MatrixFq {
    let mut m = MatrixFq::zeros(n + 1, d + 1);
    for j in 0..=n {
        for (b, &hb) in h.coeffs().iter().enumerate() {
            let a = j.abs_diff(b);
            if hb.is_zero() || a > d {
                continue;
            }
            let v = fq.add(m.get(j, a), hb);
            m.set(j, a, v);
        }
    }
    m
}

/// Size of the explicit triangular pivot set
/// `J = {j : max(0, R - d) <= j <= floor((R - 1)/2)}`, `R = deg H - ord_t H`.
pub fn lh_rank_floor(h: &Poly, d: usize, n: usize) -> Result<usize> {
    let deg = h.degree().ok_or(Error::ZeroPolynomial)?;
    if deg > n {
        return Err(Error::InvalidParams(format!("deg H = {deg} exceeds N = {n}")));
    }
    let ord = h.coeffs().iter().take_while(|c| c.is_zero()).count();
    let r = (deg - ord) as i64;
    let top = (r - 1).div_euclid(2);
    let bottom = (r - d as i64).max(0);
    Ok((top - bottom + 1).max(0) as usize)
}

/// Both evaluation orders of the `(T, H) in R_d x V_N` incidence count.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IncidenceReport {
    pub d: usize,
    pub n: usize,
    /// `sum_{T in R_d} q^{Delta(T; N)}`.
    #[serde(serialize_with = "ser_biguint")]
    pub by_symbol: BigUint,
    /// `sum_{H in V_N} |ker L_H|`.
    #[serde(serialize_with = "ser_biguint")]
    pub by_multiplier: BigUint,
    /// `d + 3N/4 + 1`, the comparison exponent (monitoring only).
    pub reference_exponent: f64,
    /// `log_q` of the count.
    pub observed_exponent: f64,
}

pub(crate) fn ser_biguint<S: serde::Serializer>(x: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

impl IncidenceReport {
    pub fn agrees(&self) -> bool {
        self.by_symbol == self.by_multiplier
    }
}

fn elimination_cost(rows: usize, cols: usize) -> u128 {
    (rows * cols * rows.min(cols).max(1)) as u128
}

pub fn incidence_sum(fq: &Fq, d: usize, n: usize, budget: &Budget) -> Result<IncidenceReport> {
    let q = fq.q();
    let cost = qpow(q, d + 1).saturating_mul(elimination_cost(n + 1, n + 1))
        + qpow(q, n + 1).saturating_mul(elimination_cost(n + 1, d + 1));
    budget.charge(cost)?;
    let qb = BigUint::from(q);
    let by_symbol = ReciprocalSymbol::enumerate(fq, d)
        .fold(BigUint::zero(), |acc, t| acc + qb.pow(delta_t(fq, &t, n) as u32));
    let ring = PolyRing::new(fq.clone());
    let by_multiplier = ring.enumerate_all(n).fold(BigUint::zero(), |acc, h| {
        let rank = build_lh(fq, &h, d, n).rank(fq);
        acc + qb.pow((d + 1 - rank) as u32)
    });
    let observed_exponent = log_q(&by_symbol, q);
    Ok(IncidenceReport {
        d,
        n,
        by_symbol,
        by_multiplier,
        reference_exponent: d as f64 + 0.75 * n as f64 + 1.0,
        observed_exponent,
    })
}

pub(crate) fn log_q(x: &BigUint, q: u32) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    let shift = bits.saturating_sub(52);
    let mantissa: f64 = (x >> shift).to_string().parse().unwrap();
    (mantissa.ln() + shift as f64 * std::f64::consts::LN_2) / (q as f64).ln()
}

/// An exact rank with the explicit lower bound it must meet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RankCheck {
    pub rank: usize,
    pub floor: usize,
}

impl RankCheck {
    pub fn ok(&self) -> bool {
        self.rank >= self.floor
    }
}

fn positive_part(x: i64) -> usize {
    x.max(0) as usize
}

/// Rank of `h -> Q_{A,2}(h g1) - Q_{A,2}(h g2)` on `V_i` against `max(0, i - k - m + 1)`.
pub fn type_ii_rank_check(form: &BandForm, g1: &Poly, g2: &Poly, i: usize) -> Result<RankCheck> {
    let k1 = g1.degree().ok_or(Error::ZeroPolynomial)?;
    let k2 = g2.degree().ok_or(Error::ZeroPolynomial)?;
    if k1 != k2 {
        return Err(Error::DegreeMismatch(k1, k2));
    }
    let ring = form.ring();
    let s1 = ring.mul(&ring.reciprocal_star(g1)?, g1);
    let s2 = ring.mul(&ring.reciprocal_star(g2)?, g2);
    if s1 == s2 {
        return Err(Error::ExceptionalPair);
    }
    let fq = form.field();
    let m = polar_matrix_multiplier(form, g1, i)?.sub(fq, &polar_matrix_multiplier(form, g2, i)?);
    Ok(RankCheck {
        rank: m.rank(fq),
        floor: positive_part(i as i64 - k1 as i64 - form.m() as i64 + 1),
    })
}

/// Rank of `h -> Q_{A,2}(g h)` on `V_N` against `max(0, N - k - m + 1)`.
pub fn type_i_rank_check(form: &BandForm, g: &Poly, n: usize) -> Result<RankCheck> {
    let k = g.degree().ok_or(Error::ZeroPolynomial)?;
    let m = polar_matrix_multiplier(form, g, n)?;
    Ok(RankCheck {
        rank: m.rank(form.field()),
        floor: positive_part(n as i64 - k as i64 - form.m() as i64 + 1),
    })
}

/// The affine hyperplane `{x : <normal, x> = offset}` of F_q^dim.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hyperplane {
    pub normal: Vec<FieldElement>,
    pub offset: FieldElement,
}

impl Hyperplane {
    pub fn new(normal: Vec<FieldElement>, offset: FieldElement) -> Result<Self> {
        if normal.iter().all(|x| x.is_zero()) {
            return Err(Error::InvalidParams("hyperplane normal must be nonzero".into()));
        }
        Ok(Hyperplane { normal, offset })
    }

    /// `x_i = offset`.
    pub fn coordinate(dim: usize, i: usize, offset: FieldElement) -> Self {
        let mut normal = vec![FieldElement::ZERO; dim];
        normal[i] = FieldElement::ONE;
        Hyperplane { normal, offset }
    }

    /// The monic slice of `V_N`: top coordinate equal to 1.
    pub fn monic(dim: usize) -> Self {
        Self::coordinate(dim, dim - 1, FieldElement::ONE)
    }

    /// Basis of the direction space `{x : <normal, x> = 0}` as columns.
    pub fn direction_basis(&self, fq: &Fq) -> MatrixFq {
        let kernel = MatrixFq::from_rows(vec![self.normal.clone()]).kernel(fq);
        let mut w = MatrixFq::zeros(self.normal.len(), kernel.len());
        for (c, v) in kernel.iter().enumerate() {
            for (r, &x) in v.iter().enumerate() {
                w.set(r, c, x);
            }
        }
        w
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SliceRank {
    pub ambient: usize,
    pub restricted: usize,
}

impl SliceRank {
    pub fn drop(&self) -> i64 {
        self.ambient as i64 - self.restricted as i64
    }
}

/// Rank of the bilinear form `m` restricted to the direction space of `plane`.
pub fn monic_slice_rank(fq: &Fq, m: &MatrixFq, plane: &Hyperplane) -> Result<SliceRank> {
    if m.rows() != m.cols() || plane.normal.len() != m.rows() {
        return Err(Error::InvalidParams("form and hyperplane dimensions disagree".into()));
    }
    let w = plane.direction_basis(fq);
    let restricted = w.transpose().mul(fq, m).mul(fq, &w);
    Ok(SliceRank { ambient: m.rank(fq), restricted: restricted.rank(fq) })
}

/// One JSON-lines sweep record.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub input: Value,
    pub rank: i64,
    pub floor: i64,
    pub ok: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bandform::BandSpec;

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

    fn appendix_matrix(fq: &Fq) -> MatrixFq {
        MatrixFq::from_rows(
            (0..7)
                .map(|a| (0..7).map(|b| fq.from_int(((a + b) % 2) as i64)).collect())
                .collect(),
        )
    }

    /// Brute-force radical size: count h in V_N with B_A(g h, g t^b) = 0 for all b.
    fn radical_count_brute(form: &BandForm, g: &Poly, n: usize) -> usize {
        let r = form.ring();
        r.enumerate_all(n)
            .filter(|h| {
                let gh = r.mul(g, h);
                (0..=n).all(|b| form.half_polar(&gh, &g.shift(b)).is_zero())
            })
            .count()
    }

    #[test]
    fn rank_examples() {
        let fq = Fq::prime(3).unwrap();
        assert_eq!(rank_fq(&fq, &MatrixFq::identity(5)), 5);
        assert_eq!(rank_fq(&fq, &MatrixFq::zeros(4, 6)), 0);
        assert_eq!(rank_fq(&fq, &appendix_matrix(&fq)), 2);
    }

    #[test]
    fn kernel_is_annihilated() {
        let fq = Fq::prime(5).unwrap();
        let m = MatrixFq::from_rows(vec![
            vec![fq.from_int(1), fq.from_int(2), fq.from_int(3), fq.from_int(4)],
            vec![fq.from_int(2), fq.from_int(4), fq.from_int(1), fq.from_int(3)],
            vec![fq.from_int(3), fq.from_int(1), fq.from_int(4), fq.from_int(2)],
        ]);
        let ker = m.kernel(&fq);
        assert_eq!(ker.len() + m.rank(&fq), 4);
        for v in ker {
            let col = MatrixFq::from_rows(v.into_iter().map(|x| vec![x]).collect());
            assert!(m.mul(&fq, &col).is_zero());
        }
    }

    #[test]
    fn toeplitz_examples() {
        let r = ring3();
        let fq = r.field();
        assert_eq!(toeplitz_from_symbol(&LaurentSymbol::constant(fq.one()), 4), MatrixFq::identity(5));
        let tri = toeplitz_from_symbol(&LaurentSymbol::new(-1, vec![fq.one(), fq.zero(), fq.one()]), 3);
        for a in 0..4usize {
            for b in 0..4usize {
                let expect = if a.abs_diff(b) == 1 { fq.one() } else { fq.zero() };
                assert_eq!(tri.get(a, b), expect);
            }
        }
        let rs = band(&r, &[0, 1]);
        let g = r.parse("t^4-1").unwrap();
        let h = rs.symbol_a().mul(fq, &rs.gg_bar(&g));
        let m = toeplitz_from_symbol(&h, 6);
        assert!(m.scalar_multiple_of(fq, &appendix_matrix(fq)).is_some());
    }

    #[test]
    fn polar_matrix_is_twice_the_toeplitz_matrix() {
        let r = ring3();
        let fq = r.field();
        let two = fq.from_int(2);
        for b in fixture_bands(&r) {
            for k in 0..=2 {
                for g in r.enumerate_monic(k) {
                    for n in 0..=4 {
                        let polar = polar_matrix_multiplier(&b, &g, n).unwrap();
                        let sym = b.symbol_a().mul(fq, &b.gg_bar(&g));
                        assert_eq!(polar, toeplitz_from_symbol(&sym, n).scale(fq, two));
                    }
                }
            }
        }
    }

    #[test]
    fn polar_examples() {
        let r = ring3();
        let fq = r.field();
        let c0 = band(&r, &[2]);
        let m = polar_matrix_multiplier(&c0, &Poly::one(), 4).unwrap();
        assert_eq!(m, MatrixFq::identity(5).scale(fq, fq.mul(fq.from_int(2), fq.from_int(2))));
        let rs = band(&r, &[0, 1]);
        let g0 = r.parse("t+2").unwrap();
        for shift in 0..3 {
            let gr = g0.shift(shift);
            assert_eq!(
                polar_matrix_multiplier(&rs, &gr, 5).unwrap().rank(fq),
                polar_matrix_multiplier(&rs, &g0, 5).unwrap().rank(fq)
            );
        }
        let g = r.parse("t^4-1").unwrap();
        assert_eq!(polar_matrix_multiplier(&rs, &g, 6).unwrap().rank(fq), 2);
        assert_eq!(polar_matrix_multiplier(&rs, &Poly::zero(), 3), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn appendix_delta_by_brute_force() {
        let r = ring3();
        let rs = band(&r, &[0, 1]);
        let g = r.parse("t^4-1").unwrap();
        // q^Delta solutions among the 3^7 elements of V_6
        assert_eq!(radical_count_brute(&rs, &g, 6), 243);
        let direct = delta_a(&rs, &g, 6).unwrap();
        let gap = radical_via_gap(&rs, &g, 6).unwrap();
        assert_eq!(direct.dimension, 5);
        assert_eq!(gap.dimension, 5);
        assert!(direct.same_span(r.field(), &gap));
    }

    #[test]
    fn delta_matches_brute_force_small() {
        let r = ring3();
        for b in fixture_bands(&r).iter().take(3) {
            for k in 0..=2 {
                for g in r.enumerate_monic(k) {
                    for n in 0..=3 {
                        let dim = delta_a(b, &g, n).unwrap().dimension;
                        assert_eq!(3usize.pow(dim as u32), radical_count_brute(b, &g, n));
                    }
                }
            }
        }
    }

    #[test]
    fn radical_basis_annihilates() {
        let r = ring3();
        let fq = r.field();
        let b = band(&r, &[2, 1, 1]);
        let g = r.parse("t^3+t+1").unwrap();
        let rad = delta_a(&b, &g, 6).unwrap();
        for h in &rad.basis {
            for w in 0..=6 {
                assert!(b.half_polar(&r.mul(&g, h), &g.shift(w)).is_zero());
            }
        }
        let _ = fq;
    }

    #[test]
    fn delta_examples() {
        let r = ring3();
        let c0 = band(&r, &[1]);
        assert_eq!(delta_a(&c0, &Poly::one(), 5).unwrap().dimension, 0);
        assert_eq!(radical_via_gap(&c0, &Poly::one(), 5).unwrap().dimension, 0);
        assert!(delta_a(&c0, &Poly::zero(), 2).is_err());
    }

    #[test]
    fn gap_equivalence_and_symbol_equality_sweep() {
        let r = ring3();
        let fq = r.field();
        for b in fixture_bands(&r) {
            for k in 0..=3 {
                for g in r.enumerate_monic(k) {
                    for n in 0..=5 {
                        let direct = delta_a(&b, &g, n).unwrap();
                        let gap = radical_via_gap(&b, &g, n).unwrap();
                        assert!(direct.same_span(fq, &gap));
                        if !g.coeff(0).is_zero() {
                            let (f, d) = gap_symbol(&b, &g).unwrap();
                            let t = ReciprocalSymbol::from_poly(&f, d).unwrap();
                            assert_eq!(delta_t(fq, &t, n), direct.dimension);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn delta_t_examples() {
        let fq = Fq::prime(3).unwrap();
        for d in 0..=3 {
            for n in 0..=4 {
                let zero = ReciprocalSymbol::new(d, vec![fq.zero(); d + 1]).unwrap();
                assert_eq!(delta_t(&fq, &zero, n), n + 1);
                let mut half = vec![fq.zero(); d + 1];
                half[0] = fq.one();
                let zd = ReciprocalSymbol::new(d, half).unwrap();
                assert_eq!(zd.to_poly(), Poly::monomial(fq.one(), d));
                assert_eq!(delta_t(&fq, &zd, n), 0);
            }
        }
    }

    #[test]
    fn reciprocal_symbol_roundtrip() {
        let fq = Fq::prime(3).unwrap();
        let all: Vec<_> = ReciprocalSymbol::enumerate(&fq, 2).collect();
        assert_eq!(all.len(), 27);
        for t in &all {
            assert_eq!(&ReciprocalSymbol::from_poly(&t.to_poly(), 2).unwrap(), t);
        }
        let r = ring3();
        assert!(ReciprocalSymbol::from_poly(&r.parse("t^2+t").unwrap(), 1).is_err());
        assert!(ReciprocalSymbol::new(2, vec![fq.one()]).is_err());
    }

    #[test]
    fn lh_examples() {
        let r = ring3();
        let fq = r.field();
        assert_eq!(build_lh(fq, &Poly::one(), 3, 5).rank(fq), 4);
        for d in 0..=4 {
            for n in 0..=5 {
                assert_eq!(build_lh(fq, &Poly::one(), d, n).rank(fq), n.min(d) + 1);
            }
        }
        let h = r.parse("t^5+t+1").unwrap();
        assert_eq!(lh_rank_floor(&h, 4, 5).unwrap(), 2);
        assert!(build_lh(fq, &h, 4, 5).rank(fq) >= 2);
        assert_eq!(lh_rank_floor(&Poly::zero(), 4, 5), Err(Error::ZeroPolynomial));
        assert_eq!(lh_rank_floor(&Poly::one(), 4, 5).unwrap(), 0);
    }

    #[test]
    fn lh_matches_middle_coefficients() {
        // L_H(T) computed by the matrix equals the coefficients of T H directly.
        let r = ring3();
        let fq = r.field();
        for d in 0..=2 {
            for t in ReciprocalSymbol::enumerate(fq, d) {
                for h in r.enumerate_all(2) {
                    let n = 3;
                    let m = build_lh(fq, &h, d, n);
                    let th = r.mul(&t.to_poly(), &h);
                    for j in 0..=n {
                        let lhs = (0..=d).fold(fq.zero(), |acc, a| fq.add(acc, fq.mul(m.get(j, a), t.half()[a])));
                        assert_eq!(lhs, th.coeff(d + j));
                    }
                }
            }
        }
    }

    #[test]
    fn lh_floor_holds_small() {
        let r = ring3();
        let fq = r.field();
        for n in 0..=4 {
            for h in r.enumerate_all(n).skip(1) {
                for d in 0..=3 {
                    assert!(build_lh(fq, &h, d, n).rank(fq) >= lh_rank_floor(&h, d, n).unwrap());
                }
            }
        }
    }

    #[test]
    fn incidence_examples() {
        let fq = Fq::prime(3).unwrap();
        let rep = incidence_sum(&fq, 0, 0, &Budget::default()).unwrap();
        assert_eq!(rep.by_symbol, BigUint::from(5u32));
        assert!(rep.agrees());
        for d in 0..=2 {
            for n in 0..=3 {
                assert!(incidence_sum(&fq, d, n, &Budget::default()).unwrap().agrees());
            }
        }
        assert!(matches!(
            incidence_sum(&fq, 3, 4, &Budget::new(100)),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn rank_check_examples() {
        let r = ring3();
        let rs = band(&r, &[0, 1]);
        let t = r.parse("t").unwrap();
        let t1 = r.parse("t+1").unwrap();
        let chk = type_ii_rank_check(&rs, &t, &t1, 4).unwrap();
        assert_eq!(chk.floor, 3);
        assert!(chk.rank >= 3);
        assert_eq!(type_ii_rank_check(&rs, &t, &t, 4), Err(Error::ExceptionalPair));
        assert_eq!(type_ii_rank_check(&rs, &t, &t1, 1).unwrap().floor, 0);
        assert!(type_ii_rank_check(&rs, &t, &r.parse("t^2").unwrap(), 3).is_err());

        let c0 = band(&r, &[1]);
        let chk = type_i_rank_check(&c0, &Poly::one(), 5).unwrap();
        assert_eq!((chk.rank, chk.floor), (6, 6));
        let g = r.parse("t^4-1").unwrap();
        let chk = type_i_rank_check(&rs, &g, 6).unwrap();
        assert_eq!((chk.rank, chk.floor), (2, 2));
    }

    #[test]
    fn toeplitz_extreme_diagonal_floor() {
        let r = ring3();
        let fq = r.field();
        for idx in 1..3u64.pow(5) {
            let p = r.poly_from_index(4, idx);
            let h = LaurentSymbol::new(-2, p.digits(5));
            let (lo, hi) = h.support().unwrap();
            let dd = lo.abs().max(hi.abs()) as usize;
            for n in dd..=6 {
                assert!(toeplitz_from_symbol(&h, n).rank(fq) > n - dd);
            }
        }
    }

    #[test]
    fn slice_examples() {
        let fq = Fq::prime(3).unwrap();
        for dim in 1..=4 {
            for i in 0..dim {
                let plane = Hyperplane::coordinate(dim, i, fq.zero());
                let s = monic_slice_rank(&fq, &MatrixFq::identity(dim), &plane).unwrap();
                assert!((0..=2).contains(&s.drop()));
                let z = monic_slice_rank(&fq, &MatrixFq::zeros(dim, dim), &plane).unwrap();
                assert_eq!(z.restricted, 0);
            }
        }
        assert!(Hyperplane::new(vec![fq.zero(); 3], fq.one()).is_err());
        // hyperbolic plane: restricting to x_1 = 0 drops the rank by 2
        let h = MatrixFq::from_rows(vec![vec![fq.zero(), fq.one()], vec![fq.one(), fq.zero()]]);
        let s = monic_slice_rank(&fq, &h, &Hyperplane::monic(2)).unwrap();
        assert_eq!((s.ambient, s.restricted), (2, 0));
    }
}
