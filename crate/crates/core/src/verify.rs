//! Named exhaustive verification suites. Each suite returns one row per case
//! and passes only if every exact check holds.

use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bandform::{BandForm, BandSpec};
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::gf::{Character, Fq};
use crate::polyring::{Poly, PolyRing};
use crate::ranklab::{
    build_lh, delta_a, delta_t, gap_symbol, incidence_sum, lh_rank_floor, monic_slice_rank,
    polar_matrix_multiplier, radical_via_gap, type_i_rank_check, type_ii_rank_check, Hyperplane,
    MatrixFq, ReciprocalSymbol,
};
use crate::sieve::{exponent_audit, exponent_grid_search, gauss_sum_check, reciprocal_solutions, QuadraticForm};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Suite {
    Gap,
    DeltaSymbol,
    TypeIIRank,
    TypeIRank,
    Reciprocal,
    Gauss,
    MonicSlice,
    Incidence,
    AppendixA,
    Exponents,
}

impl Suite {
    pub const ALL: [Suite; 10] = [
        Suite::Gap,
        Suite::DeltaSymbol,
        Suite::TypeIIRank,
        Suite::TypeIRank,
        Suite::Reciprocal,
        Suite::Gauss,
        Suite::MonicSlice,
        Suite::Incidence,
        Suite::AppendixA,
        Suite::Exponents,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Gap => "gap",
            Suite::DeltaSymbol => "delta-symbol",
            Suite::TypeIIRank => "typeII-rank",
            Suite::TypeIRank => "typeI-rank",
            Suite::Reciprocal => "reciprocal",
            Suite::Gauss => "gauss",
            Suite::MonicSlice => "monic-slice",
            Suite::Incidence => "incidence",
            Suite::AppendixA => "appendix-A",
            Suite::Exponents => "exponents",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown suite '{s}'")))
    }
}

/// Sweep bounds shared by the suites.
#[derive(Debug, Clone)]
pub struct VerifyParams {
    pub bands: Vec<BandSpec>,
    pub max_deg: usize,
    pub max_n: usize,
    /// Largest `d` for the reciprocal-symbol suites.
    pub max_d: usize,
    pub samples: usize,
    pub seed: u64,
}

impl VerifyParams {
    pub fn defaults(fq: &Fq) -> Self {
        VerifyParams {
            bands: fixture_bands(fq),
            max_deg: 3,
            max_n: 5,
            max_d: 3,
            samples: 500,
            seed: 0,
        }
    }
}

/// Six bands with `m <= 2`, coefficients read mod p.
pub fn fixture_bands(fq: &Fq) -> Vec<BandSpec> {
    [&[1][..], &[0, 1], &[1, 2], &[2, 1, 1], &[0, 0, 1], &[1, 0, 2]]
        .iter()
        .map(|c| BandSpec::quadratic(c.iter().map(|&x| fq.from_int(x)).collect()).unwrap())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CaseRow {
    pub case: String,
    pub detail: String,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub suite: String,
    pub cases: Vec<CaseRow>,
    pub ok: bool,
}

struct Rows(Vec<CaseRow>);

impl Rows {
    fn push(&mut self, case: impl Into<String>, detail: impl Into<String>, ok: bool) {
        self.0.push(CaseRow { case: case.into(), detail: detail.into(), ok });
    }
}

fn band_label(fq: &Fq, b: &BandSpec) -> String {
    let c: Vec<String> = b.c().iter().map(|&x| fq.format_element(x)).collect();
    format!("band({})", c.join(","))
}

pub fn run_suite(ring: &PolyRing, suite: Suite, params: &VerifyParams, budget: &Budget) -> Result<VerifyReport> {
    let mut rows = Rows(Vec::new());
    match suite {
        Suite::Gap => gap(ring, params, &mut rows)?,
        Suite::DeltaSymbol => delta_symbol(ring, params, &mut rows)?,
        Suite::TypeIIRank => type_ii(ring, params, &mut rows)?,
        Suite::TypeIRank => type_i(ring, params, &mut rows)?,
        Suite::Reciprocal => reciprocal(ring, params, budget, &mut rows)?,
        Suite::Gauss => gauss(ring.field(), params, budget, &mut rows)?,
        Suite::MonicSlice => monic_slice(ring.field(), params, &mut rows)?,
        Suite::Incidence => incidence(ring.field(), params, budget, &mut rows)?,
        Suite::AppendixA => appendix_a(&mut rows)?,
        Suite::Exponents => exponents(&mut rows)?,
    }
    let ok = rows.0.iter().all(|r| r.ok);
    Ok(VerifyReport { suite: suite.name().into(), cases: rows.0, ok })
}

fn gap(ring: &PolyRing, params: &VerifyParams, rows: &mut Rows) -> Result<()> {
    let fq = ring.field();
    for spec in &params.bands {
        let form = BandForm::new(ring.clone(), spec.clone());
        let (mut cases, mut good) = (0, 0);
        for k in 0..=params.max_deg {
            for g in ring.enumerate_monic(k) {
                for n in 0..=params.max_n {
                    let a = delta_a(&form, &g, n)?;
                    let b = radical_via_gap(&form, &g, n)?;
                    cases += 1;
                    good += usize::from(a.dimension == b.dimension && a.same_span(fq, &b));
                }
            }
        }
        rows.push(band_label(fq, spec), format!("{good}/{cases} identical radicals"), good == cases);
    }
    Ok(())
}

fn delta_symbol(ring: &PolyRing, params: &VerifyParams, rows: &mut Rows) -> Result<()> {
    let fq = ring.field();
    for spec in &params.bands {
        let form = BandForm::new(ring.clone(), spec.clone());
        let (mut cases, mut good) = (0, 0);
        for k in 0..=params.max_deg {
            for g in ring.enumerate_monic_nonzero_const(k) {
                let (f, d) = gap_symbol(&form, &g)?;
                let t = ReciprocalSymbol::from_poly(&f, d)?;
                for n in 0..=params.max_n {
                    let base = delta_a(&form, &g, n)?.dimension;
                    cases += 1;
                    let mut ok = delta_t(fq, &t, n) == base;
                    for r in 1..=3 {
                        ok &= delta_a(&form, &g.shift(r), n)?.dimension == base;
                    }
                    good += usize::from(ok);
                }
            }
        }
        rows.push(band_label(fq, spec), format!("{good}/{cases} symbol and shift equalities"), good == cases);
    }
    Ok(())
}

fn type_ii(ring: &PolyRing, params: &VerifyParams, rows: &mut Rows) -> Result<()> {
    let fq = ring.field();
    let max_i = params.max_n + 1;
    for spec in &params.bands {
        let form = BandForm::new(ring.clone(), spec.clone());
        let (mut cases, mut good, mut exceptional) = (0, 0, 0);
        for k in 0..=params.max_deg {
            let gs: Vec<Poly> = ring.enumerate_monic(k).collect();
            for g1 in &gs {
                for g2 in &gs {
                    for i in 0..=max_i {
                        match type_ii_rank_check(&form, g1, g2, i) {
                            Ok(chk) => {
                                cases += 1;
                                good += usize::from(chk.ok());
                            }
                            Err(Error::ExceptionalPair) => exceptional += 1,
                            Err(e) => return Err(e),
                        }
                    }
                }
            }
        }
        rows.push(
            band_label(fq, spec),
            format!("{good}/{cases} ranks meet the floor, {exceptional} exceptional skipped"),
            good == cases,
        );
    }
    Ok(())
}

fn type_i(ring: &PolyRing, params: &VerifyParams, rows: &mut Rows) -> Result<()> {
    let fq = ring.field();
    let max_n = params.max_n + 1;
    for spec in &params.bands {
        let form = BandForm::new(ring.clone(), spec.clone());
        let (mut cases, mut good) = (0, 0);
        for k in 0..=params.max_deg {
            for g in ring.enumerate_monic(k) {
                for n in 0..=max_n {
                    cases += 1;
                    good += usize::from(type_i_rank_check(&form, &g, n)?.ok());
                }
            }
        }
        rows.push(band_label(fq, spec), format!("{good}/{cases} ranks meet the floor"), good == cases);
    }
    let (mut cases, mut good) = (0, 0);
    for n in 0..=params.max_n {
        for h in ring.enumerate_all(n).skip(1) {
            for d in 0..=params.max_d + 1 {
                cases += 1;
                good += usize::from(build_lh(fq, &h, d, n).rank(fq) >= lh_rank_floor(&h, d, n)?);
            }
        }
    }
    rows.push("L_H", format!("{good}/{cases} ranks meet the pivot floor"), good == cases);
    Ok(())
}

fn reciprocal(ring: &PolyRing, params: &VerifyParams, budget: &Budget, rows: &mut Rows) -> Result<()> {
    for k in 0..=params.max_deg + 2 {
        let (mut cases, mut good, mut max_sol) = (0, 0, 0);
        for b in ring.enumerate_monic(k) {
            let rep = reciprocal_solutions(ring, &b, budget)?;
            cases += 1;
            max_sol = max_sol.max(rep.solutions.len());
            good += usize::from(rep.within_tau() && rep.matches_construction(ring, &b));
        }
        rows.push(
            format!("deg {k}"),
            format!("{good}/{cases} within tau and constructive, max {max_sol} solutions"),
            good == cases,
        );
    }
    Ok(())
}

fn random_linear<R: Rng>(fq: &Fq, dim: usize, rng: &mut R) -> Vec<crate::gf::FieldElement> {
    (0..dim).map(|_| fq.from_index(rng.gen_range(0..fq.q())).unwrap()).collect()
}

fn gauss(fq: &Fq, params: &VerifyParams, budget: &Budget, rows: &mut Rows) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let max_dim = params.max_deg.clamp(1, 4);
    for dim in 1..=max_dim {
        let (mut good, mut vanishing) = (0, 0);
        for _ in 0..params.samples {
            let form = QuadraticForm::random(fq, dim, &mut rng);
            let lin = random_linear(fq, dim, &mut rng);
            let ch = Character::from_scale(fq.from_index(rng.gen_range(1..fq.q())).unwrap());
            let chk = gauss_sum_check(fq, &form, &lin, ch, budget)?;
            good += usize::from(chk.verdict);
            vanishing += usize::from(chk.vanishes);
        }
        rows.push(
            format!("N={dim}"),
            format!("{good}/{} in {{0, q^(N-r/2)}}, {vanishing} vanish", params.samples),
            good == params.samples,
        );
    }
    Ok(())
}

fn monic_slice(fq: &Fq, params: &VerifyParams, rows: &mut Rows) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let max_dim = params.max_deg.clamp(1, 4);
    for dim in 1..=max_dim {
        let (mut cases, mut good) = (0, 0);
        for _ in 0..params.samples {
            let polar = QuadraticForm::random(fq, dim, &mut rng).polar(fq);
            let mut planes: Vec<Hyperplane> = (0..dim).map(|i| Hyperplane::coordinate(dim, i, fq.zero())).collect();
            planes.push(Hyperplane::monic(dim));
            for plane in &planes {
                let s = monic_slice_rank(fq, &polar, plane)?;
                cases += 1;
                good += usize::from((0..=2).contains(&s.drop()));
            }
        }
        rows.push(format!("N={dim}"), format!("{good}/{cases} drops in {{0,1,2}}"), good == cases);
    }
    Ok(())
}

fn incidence(fq: &Fq, params: &VerifyParams, budget: &Budget, rows: &mut Rows) -> Result<()> {
    for d in 0..=params.max_d {
        for n in 0..=params.max_n.min(4) {
            let rep = incidence_sum(fq, d, n, budget)?;
            rows.push(
                format!("d={d} N={n}"),
                format!(
                    "{} vs {}, log_q {:.3} (reference {:.2})",
                    rep.by_symbol, rep.by_multiplier, rep.observed_exponent, rep.reference_exponent
                ),
                rep.agrees(),
            );
        }
    }
    Ok(())
}

/// The 7x7 matrix with entry 1 where `a + b` is odd.
pub fn appendix_matrix(fq: &Fq) -> MatrixFq {
    MatrixFq::from_rows(
        (0..7)
            .map(|a| (0..7).map(|b| if (a + b) % 2 == 1 { fq.one() } else { fq.zero() }).collect())
            .collect(),
    )
}

fn appendix_a(rows: &mut Rows) -> Result<()> {
    let ring = PolyRing::new(Fq::prime(3)?);
    let fq = ring.field();
    let form = BandForm::new(ring.clone(), BandSpec::quadratic(vec![fq.zero(), fq.one()])?);
    let g = ring.parse("t^4 - 1")?;
    let polar = polar_matrix_multiplier(&form, &g, 6)?;
    let scalar = polar.scalar_multiple_of(fq, &appendix_matrix(fq));
    rows.push(
        "matrix",
        format!("scalar {}", scalar.map_or("none".into(), |s| fq.format_element(s))),
        scalar.is_some(),
    );
    let rank = polar.rank(fq);
    rows.push("rank", format!("{rank}"), rank == 2);
    let delta = delta_a(&form, &g, 6)?.dimension;
    rows.push("delta", format!("{delta}"), delta == 5);
    Ok(())
}

fn exponents(rows: &mut Rows) -> Result<()> {
    let a = exponent_audit(Rational64::new(1, 5), Rational64::new(7, 10))?;
    let target = Rational64::new(19, 20);
    rows.push(
        "u=1/5 v=7/10",
        format!("{} {} {} max {}", a.type_i, a.type_ii_low, a.type_ii_high, a.max),
        a.type_i == target && a.type_ii_low == target && a.type_ii_high == target,
    );
    let z = exponent_audit(Rational64::new(0, 1), Rational64::new(0, 1))?;
    rows.push("u=0 v=0", format!("max {} (no saving)", z.max), !z.saves());
    let (best, argmin) = exponent_grid_search(20);
    rows.push(
        "grid den<=20",
        format!("min {best} at {} points", argmin.len()),
        best == target && argmin.contains(&(Rational64::new(1, 5), Rational64::new(7, 10))),
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_roundtrip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn all_suites_pass_on_small_bounds() {
        let ring = PolyRing::new(Fq::prime(3).unwrap());
        let mut params = VerifyParams::defaults(ring.field());
        params.max_deg = 2;
        params.max_n = 3;
        params.max_d = 2;
        params.samples = 40;
        for s in Suite::ALL {
            let rep = run_suite(&ring, s, &params, &Budget::default()).unwrap();
            assert!(rep.ok, "{rep:?}");
            assert!(!rep.cases.is_empty());
        }
    }
}
