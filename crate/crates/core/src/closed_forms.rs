//! Closed formulas: the stratum count `F(A)` with its `I(A)` factor, the
//! grouped counts `F_{p,p',q,q',r}` and `α`, the monomial expansions of the
//! real and complex moments, their `(I_l, I_m)` specialisations, and a few
//! special coefficients.
//!
//! Boundary strata where the stratum formula degenerates are never resolved
//! by guessing a limit; they come back flagged in [`StratumValue`] and the
//! expansion assembler substitutes oracle counts for them.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{
    factorial, falling, inv_factorial, multinomial, multinomial_int, odd_double_factorial, pow2, ExactRational,
};
use crate::oracle::{self, group_key, ClassTable, PartitionedTallies};
use crate::partition::{aut, partitions_of, Partition};
use crate::strata::{distribute, enumerate_m, ArrayKind, ArrayTuple, Cells};
use crate::symfun::MonomialExpansion;

/// A formula value with a flag for guarded degenerate evaluations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StratumValue {
    pub value: ExactRational,
    pub well_defined: bool,
    pub diagnostics: Vec<String>,
}

impl StratumValue {
    fn exact(value: ExactRational) -> Self {
        Self {
            value,
            well_defined: true,
            diagnostics: Vec::new(),
        }
    }

    fn flag(&mut self, why: impl Into<String>) {
        self.well_defined = false;
        self.diagnostics.push(why.into());
    }
}

fn q(v: i64) -> ExactRational {
    ExactRational::from(v)
}

fn fact(x: i64) -> ExactRational {
    ExactRational::from_integer(factorial(x as u64))
}

struct Sums {
    s1: i64,
    s2: i64,
    s3: i64,
}

fn sums(a: &ArrayTuple, n: i64) -> Sums {
    let q_count = a.q_count() as i64;
    let r = a.r() as i64;
    let (i0, j0) = (a.i0 as i64, a.j0 as i64);
    let mut s = Sums { s1: 0, s2: 0, s3: 0 };
    for (&(i, j), &c) in &a.q_prime {
        let (i, j, c) = (i as i64, j as i64, c as i64);
        s.s1 += j * c;
        s.s2 += ((n - q_count) * j - i * r) * c;
    }
    for (&(i, j), &c) in &a.p {
        let (i, j, c) = (i as i64, j as i64, c as i64);
        s.s3 += (i0 * j - j0 * (i - 1)) * c;
    }
    s
}

/// `I(A)`: `i₀` when `r = 0`, otherwise
/// `binom(i₀; j₀, j₀)·[i₀ − 2j₀ + S₁(j₀(n−p) − r i₀)/r² + S₂S₃/(r²(n−q−2r))]`.
pub fn i_of_a(a: &ArrayTuple, n: u32) -> StratumValue {
    let n = n as i64;
    let r = a.r() as i64;
    let (i0, j0) = (a.i0 as i64, a.j0 as i64);
    if r == 0 {
        return StratumValue::exact(q(i0));
    }
    let p = a.p_count() as i64;
    let qc = a.q_count() as i64;
    let s = sums(a, n);
    let r2 = q(r * r);
    let head = q(i0 - 2 * j0) + q(s.s1 * (j0 * (n - p) - r * i0)) * r2.recip().expect("r > 0");
    let d = n - qc - 2 * r;
    let mut out = StratumValue::exact(ExactRational::zero());
    let third = if d == 0 {
        if s.s3 == 0 {
            out.flag("n-q-2r = 0 with S3 = 0: third term of I(A) taken as 0");
            ExactRational::zero()
        } else {
            out.flag("n-q-2r = 0 with S3 != 0: I(A) undefined");
            return out;
        }
    } else {
        q(s.s2 * s.s3) * q(r * r * d).recip().expect("non-zero")
    };
    out.value = multinomial_int(i0, &[j0, j0]) * (head + third);
    out
}

/// `Π binom(i−1; j, j)^{(P+Q)_{ij}} binom(i−1; j, j−1)^{(P'+Q')_{ij}}`.
fn binomial_weight(a: &ArrayTuple) -> ExactRational {
    let mut w = ExactRational::one();
    for (kind, shift) in [
        (ArrayKind::P, 0),
        (ArrayKind::Q, 0),
        (ArrayKind::PPrime, 1),
        (ArrayKind::QPrime, 1),
    ] {
        for (&(i, j), &c) in a.cells(kind) {
            let b = multinomial_int(i as i64 - 1, &[j as i64, j as i64 - shift]);
            w *= b.pow(c as i32).expect("non-negative exponent");
        }
    }
    w
}

/// `F(A)`, the number of permuted forests of degree `A`.
///
/// `I(A)`'s last term is multiplied by `(n−q−2r)!` after the cancellation
/// `(n−q−2r)!/(n−q−2r) = (n−q−2r−1)!`. Negative arguments in the
/// `(n−p−q−2r)!` denominator give 0; negative arguments in a numerator
/// factorial flag the stratum.
pub fn f_formula(a: &ArrayTuple, n: u32) -> StratumValue {
    let n = n as i64;
    let r = a.r() as i64;
    let p = a.p_count() as i64;
    let qc = a.q_count() as i64;
    let pp = a.p_prime_count() as i64;
    let qp = a.q_prime_count() as i64;
    let (i0, j0) = (a.i0 as i64, a.j0 as i64);

    let mut out = StratumValue::exact(ExactRational::zero());
    let nq = n - qc - 2 * r;
    let np = n - 1 - p - 2 * r;
    if np < 0 {
        out.flag(format!("numerator factorial (n-1-p-2r)! has argument {np}"));
        return out;
    }

    // I(A)·(n−q−2r)!
    let i_times = if r == 0 {
        if nq < 0 {
            out.flag(format!("numerator factorial (n-q-2r)! has argument {nq}"));
            return out;
        }
        q(i0) * fact(nq)
    } else {
        let s = sums(a, n);
        let r2inv = q(r * r).recip().expect("r > 0");
        let head = q(i0 - 2 * j0) + q(s.s1 * (j0 * (n - p) - r * i0)) * &r2inv;
        if nq < 0 {
            out.flag(format!("numerator factorial (n-q-2r)! has argument {nq}"));
            return out;
        }
        let third = if nq == 0 {
            if s.s3 == 0 {
                out.flag("n-q-2r = 0 with S3 = 0: third term of I(A) taken as 0");
                ExactRational::zero()
            } else {
                out.flag("n-q-2r = 0 with S3 != 0: I(A) undefined");
                return out;
            }
        } else {
            q(s.s2 * s.s3) * r2inv * fact(nq - 1)
        };
        multinomial_int(i0, &[j0, j0]) * (head * fact(nq) + third)
    };

    let a_fact = ExactRational::from_integer(a.factorial());
    out.value = i_times * a_fact.recip().expect("positive")
        * fact(r)
        * fact(r)
        * fact(np)
        * inv_factorial(n - p - qc - 2 * r)
        * pow2(pp + qp - 2 * r)
        * binomial_weight(a);
    out
}

/// `α_{r,p,q,p',q'}`. For `r > 0` the term `aq/((p+2r)(q+b))` is read as 0
/// whenever `aq = 0`.
pub fn alpha(r: u32, p: u32, q_: u32, pp: u32, qp: u32) -> ExactRational {
    if r == 0 {
        return if pp == 0 && qp == 0 {
            ExactRational::one()
        } else {
            ExactRational::zero()
        };
    }
    let (r, p, qq, pp, qp) = (r as i64, p as i64, q_ as i64, pp as i64, qp as i64);
    let mut s = ExactRational::zero();
    for a in 0..=pp {
        for b in 0..=qp {
            let mut bracket = ExactRational::one();
            if a * qq != 0 {
                bracket += q(a * qq) * q((p + 2 * r) * (qq + b)).recip().expect("positive");
            }
            let lead = q(p) * q(p + a).recip().expect("p >= 1");
            let half_p = ExactRational::new(-(p + a), 2).expect("non-zero");
            let half_q = ExactRational::new(-(qq + b), 2).expect("non-zero");
            let mut t = lead
                * bracket
                * multinomial(&half_p, &[r])
                * multinomial(&half_q, &[r])
                * multinomial_int(pp, &[a])
                * multinomial_int(qp, &[b]);
            if (pp + qp - a - b) % 2 != 0 {
                t = -t;
            }
            s += t;
        }
    }
    s
}

fn f_counts_with(p: u32, pp: u32, qq: u32, qp: u32, r: u32, n: u32, two_power: i64) -> StratumValue {
    let (pi, ppi, qi, qpi, ri, ni) = (p as i64, pp as i64, qq as i64, qp as i64, r as i64, n as i64);
    let top = ni + 2 * ri - 1;
    let norm = multinomial_int(top, &[ri, ri]);
    if norm.is_zero() {
        let mut v = StratumValue::exact(ExactRational::zero());
        v.flag("binom(n+2r-1; r, r) vanishes");
        return v;
    }
    let lead = fact(ni)
        * (fact(pi) * fact(ppi) * fact(qi) * fact(qpi))
            .recip()
            .expect("positive");
    let value = lead
        * multinomial_int(top, &[pi + 2 * ri - 1, qi + 2 * ri - 1])
        * norm.recip().expect("checked")
        * pow2(two_power)
        * alpha(r, p, qq, pp, qp);
    StratumValue::exact(value)
}

/// `F_{p,p',q,q',r}`, the number of forests with `p−1` non-root white
/// vertices (the seed root counts in `p`), `p'` white non-seed roots, `q`
/// non-root and `q'` root black vertices, and `r` loops per colour.
///
/// Uses the power `2^{2r}`; [`f_counts_uncorrected`] keeps the
/// `2^{2r−p'−q'}` variant, which is short by `2^{p'+q'}` against the
/// enumerated forests.
pub fn f_counts(p: u32, pp: u32, qq: u32, qp: u32, r: u32, n: u32) -> StratumValue {
    f_counts_with(p, pp, qq, qp, r, n, 2 * r as i64)
}

pub fn f_counts_uncorrected(p: u32, pp: u32, qq: u32, qp: u32, r: u32, n: u32) -> StratumValue {
    f_counts_with(p, pp, qq, qp, r, n, 2 * r as i64 - pp as i64 - qp as i64)
}

/// `(p, p', q, q', r)` index ranges outside which `F_{p,p',q,q',r} = 0`:
/// `p+p' ≤ n`, `q+q' ≤ n`, `p + q + 2r ≤ n + 1`.
pub fn group_indices(n: u32) -> Vec<[u32; 5]> {
    let mut out = Vec::new();
    for r in 0..=n / 2 {
        for p in 1..=n {
            for qq in 0..=n {
                if p + qq + 2 * r > n + 1 {
                    continue;
                }
                for pp in 0..=n - p {
                    for qp in 0..=n - qq {
                        if qq + qp >= 1 {
                            out.push([p, pp, qq, qp, r]);
                        }
                    }
                }
            }
        }
    }
    out
}

/// Where oracle values for flagged strata come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleBounds {
    /// Largest `n` for per-stratum counts by partitioned enumeration.
    pub partitioned_max_n: usize,
    /// Largest `n` for the pairing table (group residuals beyond the above).
    pub pairing_max_n: usize,
}

impl Default for OracleBounds {
    fn default() -> Self {
        Self {
            partitioned_max_n: oracle::PARTITIONED_MAX_N,
            pairing_max_n: oracle::PAIRING_MAX_N,
        }
    }
}

/// One flagged stratum in a discrepancy report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscrepancyEntry {
    pub n: u32,
    pub lambda: Partition,
    pub mu: Partition,
    pub r: u32,
    #[serde(rename = "A")]
    pub a: ArrayTuple,
    pub formula_status: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub oracle_value: Option<ExactRational>,
    /// `stratum` for a per-stratum count, `group-residual` when only the sum
    /// over the flagged strata of `(λ, μ, r)` is known.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub oracle_source: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub group_residual: Option<ExactRational>,
}

/// Every stratum of order `n` with its formula value.
pub fn all_strata(n: u32) -> Vec<(Partition, Partition, u32, ArrayTuple, StratumValue)> {
    let mut out = Vec::new();
    for lambda in partitions_of(n) {
        for mu in partitions_of(n) {
            for r in 0..=n / 2 {
                for a in enumerate_m(&lambda, &mu, r) {
                    let v = f_formula(&a, n);
                    out.push((lambda.clone(), mu.clone(), r, a, v));
                }
            }
        }
    }
    out
}

/// Flagged strata of order `n`, without oracle values.
pub fn flagged_strata(n: u32) -> Vec<DiscrepancyEntry> {
    all_strata(n)
        .into_iter()
        .filter(|s| !s.4.well_defined)
        .map(|(lambda, mu, r, a, v)| DiscrepancyEntry {
            n,
            lambda,
            mu,
            r,
            a,
            formula_status: format!("flagged: {}", v.diagnostics.join("; ")),
            oracle_value: None,
            oracle_source: None,
            group_residual: None,
        })
        .collect()
}

/// The expansion of the real moment with its discrepancy report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealExpansion {
    pub expansion: MonomialExpansion,
    pub report: Vec<DiscrepancyEntry>,
}

enum OracleSource {
    Strata(PartitionedTallies),
    Classes(ClassTable),
}

fn oracle_for(n: u32, bounds: OracleBounds) -> Result<OracleSource> {
    if (n as usize) <= bounds.partitioned_max_n {
        Ok(OracleSource::Strata(oracle::partitioned_tallies(n as usize, bounds.partitioned_max_n)?))
    } else if (n as usize) <= bounds.pairing_max_n {
        let l = oracle::l_table_bounded(n as usize, bounds.pairing_max_n)?;
        Ok(OracleSource::Classes(oracle::lp_from_l(&l)))
    } else {
        Err(Error::BoundExceeded {
            what: "oracle values for flagged strata",
            n: n as usize,
            bound: bounds.pairing_max_n,
        })
    }
}

/// Coefficients `Aut_λ Aut_μ Σ_r Σ_{A ∈ M^r} F(A)` of `m_λ(X) m_μ(Y)`, with
/// oracle counts substituted on flagged strata.
pub fn real_expansion(n: u32, bounds: OracleBounds) -> Result<RealExpansion> {
    let strata = all_strata(n);
    let any_flag = strata.iter().any(|s| !s.4.well_defined);
    let source = if any_flag { Some(oracle_for(n, bounds)?) } else { None };

    let mut sums: BTreeMap<(Partition, Partition), ExactRational> = BTreeMap::new();
    let mut report = Vec::new();
    // Flagged strata and clean partial sums per (λ, μ, r), for residuals.
    let mut pending: BTreeMap<(Partition, Partition, u32), (ExactRational, Vec<DiscrepancyEntry>)> = BTreeMap::new();

    for (lambda, mu, r, a, v) in strata {
        let key = (lambda.clone(), mu.clone(), r);
        let slot = pending.entry(key).or_insert_with(|| (ExactRational::zero(), Vec::new()));
        if v.well_defined {
            slot.0 += &v.value;
            continue;
        }
        slot.1.push(DiscrepancyEntry {
            n,
            lambda,
            mu,
            r,
            a,
            formula_status: format!("flagged: {}", v.diagnostics.join("; ")),
            oracle_value: None,
            oracle_source: None,
            group_residual: None,
        });
    }

    for ((lambda, mu, r), (clean, mut flagged)) in pending {
        let mut total = clean.clone();
        if !flagged.is_empty() {
            match source.as_ref().expect("oracle loaded when flags exist") {
                OracleSource::Strata(t) => {
                    for e in &mut flagged {
                        let v = ExactRational::from(t.lp(&e.a) as i64);
                        total += &v;
                        e.oracle_value = Some(v);
                        e.oracle_source = Some("stratum".into());
                    }
                }
                OracleSource::Classes(lp) => {
                    let residual = ExactRational::from(lp.get(&lambda, &mu, r as usize) as i64) - &clean;
                    total += &residual;
                    for e in &mut flagged {
                        e.oracle_source = Some("group-residual".into());
                        e.group_residual = Some(residual.clone());
                    }
                }
            }
            report.extend(flagged);
        }
        *sums.entry((lambda, mu)).or_insert_with(ExactRational::zero) += total;
    }

    let mut expansion = MonomialExpansion::new(n);
    for ((lambda, mu), s) in sums {
        let w = ExactRational::from_integer(aut(&lambda) * aut(&mu));
        expansion.add_term(lambda, mu, w * s)?;
    }
    Ok(RealExpansion { expansion, report })
}

/// The formula-only expansion, or the flagged strata if there are any.
pub fn real_expansion_strict(n: u32) -> std::result::Result<MonomialExpansion, Vec<DiscrepancyEntry>> {
    let flagged = flagged_strata(n);
    if !flagged.is_empty() {
        return Err(flagged);
    }
    let mut expansion = MonomialExpansion::new(n);
    for (lambda, mu, _, _, v) in all_strata(n) {
        let w = ExactRational::from_integer(aut(&lambda) * aut(&mu));
        expansion
            .add_term(lambda, mu, w * v.value)
            .expect("keys are partitions of n");
    }
    Ok(expansion)
}

/// `n (n−ℓ(λ))! (n−ℓ(μ))! / (n+1−ℓ(λ)−ℓ(μ))!`.
pub fn complex_coeff(n: u32, lambda: &Partition, mu: &Partition) -> ExactRational {
    let n = n as i64;
    let (l, m) = (lambda.len() as i64, mu.len() as i64);
    if l > n || m > n {
        return ExactRational::zero();
    }
    q(n) * fact(n - l) * fact(n - m) * inv_factorial(n + 1 - l - m)
}

pub fn complex_expansion(n: u32) -> MonomialExpansion {
    let mut e = MonomialExpansion::new(n);
    for lambda in partitions_of(n) {
        for mu in partitions_of(n) {
            let c = complex_coeff(n, &lambda, &mu);
            e.add_term(lambda.clone(), mu, c).expect("keys are partitions of n");
        }
    }
    e
}

fn falling_q(l: i64, p: u32) -> ExactRational {
    ExactRational::from_integer(falling(l, p as u64))
}

/// `P^ℝ_n(I_l, I_m) = Σ F_{p,p',q,q',r} (l)_{p+p'} (m)_{q+q'}`.
pub fn q_real(n: u32, l: i64, m: i64) -> ExactRational {
    group_indices(n)
        .into_iter()
        .map(|[p, pp, qq, qp, r]| {
            f_counts(p, pp, qq, qp, r, n).value * falling_q(l, p + pp) * falling_q(m, qq + qp)
        })
        .sum()
}

/// `P^ℂ_n(I_l, I_m) = n! Σ_{p,q ≥ 1} C(l,p) C(m,q) binom(n−1; p−1, q−1)`.
pub fn q_compl(n: u32, l: i64, m: i64) -> ExactRational {
    let n = n as i64;
    let mut s = ExactRational::zero();
    for p in 1..=n {
        for qq in 1..=n {
            s += multinomial_int(l, &[p]) * multinomial_int(m, &[qq]) * multinomial_int(n - 1, &[p - 1, qq - 1]);
        }
    }
    s * fact(n)
}

/// `[m_λ(X) m_n(Y)] P^ℝ_n = binom(n; λ) (2λ−1)!!`.
pub fn coeff_m_lambda_m_n(n: u32, lambda: &Partition) -> BigInt {
    let parts: Vec<i64> = lambda.parts().iter().map(|&x| x as i64).collect();
    let multi = multinomial_int(n as i64, &parts)
        .to_integer()
        .expect("integer multinomial");
    lambda
        .parts()
        .iter()
        .fold(multi, |acc, &x| acc * odd_double_factorial(x as u64))
}

/// `[m_{n−a,1^a}(X) m_{n−a,1^a}(Y)] P^ℝ_n = n(n−2a)((n−a−1)!/(n−2a)!)²(2n−4a−1)!!`
/// for `2a ≤ n−1`, and 0 otherwise.
pub fn coeff_hook(n: u32, a: u32) -> BigInt {
    if n == 0 || 2 * a > n - 1 {
        return BigInt::from(0);
    }
    let (n, a) = (n as i64, a as i64);
    let ratio = fact(n - a - 1) * fact(n - 2 * a).recip().expect("positive");
    let v = q(n * (n - 2 * a))
        * ratio.clone()
        * ratio
        * ExactRational::from_integer(odd_double_factorial((n - 2 * a) as u64));
    v.to_integer().expect("the hook coefficient is an integer")
}

/// The hook `(n−a, 1^a)`.
pub fn hook(n: u32, a: u32) -> Partition {
    let mut parts = vec![n - a];
    parts.extend(std::iter::repeat_n(1, a as usize));
    Partition::new(parts)
}

fn remark_term(qc: &Cells, qpc: &Cells) -> ExactRational {
    let mut t = ExactRational::one();
    for (cells, root) in [(qc, false), (qpc, true)] {
        for (&(i, j), &c) in cells {
            let (i, j, c) = (i as i64, j as i64, c as i64);
            let b = if root {
                multinomial_int(i - 1, &[j, j - 1])
            } else {
                multinomial_int(i - 1, &[j, j])
            };
            let two = if root { c - 2 * j * c } else { -2 * j * c };
            t *= pow2(two) * b.pow(c as i32).expect("ok") * fact(c).recip().expect("positive");
        }
    }
    t
}

/// Left and right sides of the `(2λ−1)!!/(λ! Aut_λ)` sum identity.
pub fn remark_identity_sides(lambda: &Partition) -> (ExactRational, ExactRational) {
    let rows: Vec<(u32, u32)> = lambda.multiplicities().into_iter().collect();
    let lhs: ExactRational = distribute(&rows, ArrayKind::Q, ArrayKind::QPrime, None)
        .iter()
        .map(|(qc, qpc)| remark_term(qc, qpc))
        .sum();
    let numer: BigInt = lambda.parts().iter().map(|&x| odd_double_factorial(x as u64)).product();
    let denom: BigInt = lambda.parts().iter().map(|&x| factorial(x as u64)).product::<BigInt>() * aut(lambda);
    let rhs = ExactRational::new(numer, denom).expect("positive denominator");
    (lhs, rhs)
}

pub fn remark_identity_check(lambda: &Partition) -> bool {
    let (l, r) = remark_identity_sides(lambda);
    l == r
}

/// `Σ_A F(A)` over the strata with the given group key, skipping flagged
/// ones; the flag is `false` if any stratum of the group was flagged.
pub fn group_formula_sums(n: u32) -> BTreeMap<[u32; 5], (ExactRational, bool)> {
    let mut out: BTreeMap<[u32; 5], (ExactRational, bool)> = BTreeMap::new();
    for (_, _, _, a, v) in all_strata(n) {
        let e = out.entry(group_key(&a)).or_insert((ExactRational::zero(), true));
        if v.well_defined {
            e.0 += v.value;
        } else {
            e.1 = false;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn part(s: &str) -> Partition {
        s.parse().unwrap()
    }

    fn tuple(s: &str) -> ArrayTuple {
        s.parse().unwrap()
    }

    fn r(s: &str) -> ExactRational {
        s.parse().unwrap()
    }

    #[test]
    fn i_of_a_examples() {
        let a = tuple("P:0|P':0|Q:E2,0|Q':0|i0=2|j0=0");
        assert_eq!(i_of_a(&a, 2), StratumValue::exact(q(2)));
        let b = tuple("P:0|P':0|Q:0|Q':E2,1|i0=2|j0=1");
        let v = i_of_a(&b, 2);
        assert!(!v.well_defined);
        assert!(v.value.is_zero());
    }

    #[test]
    fn f_formula_examples() {
        assert_eq!(f_formula(&tuple("P:0|P':0|Q:E1,0|Q':0|i0=1|j0=0"), 1).value, q(1));
        assert_eq!(f_formula(&tuple("P:0|P':0|Q:E2,0|Q':0|i0=2|j0=0"), 2).value, q(2));
        let v = f_formula(&tuple("P:0|P':0|Q:0|Q':E2,1|i0=2|j0=1"), 2);
        assert!(!v.well_defined);
    }

    #[test]
    fn alpha_examples() {
        assert_eq!(alpha(0, 3, 2, 0, 0), q(1));
        assert_eq!(alpha(0, 3, 2, 1, 0), q(0));
        assert_eq!(alpha(1, 1, 1, 0, 0), r("1/4"));
        // q = b = 0 must not divide by zero.
        let _ = alpha(1, 1, 0, 1, 1);
    }

    #[test]
    fn f_counts_examples() {
        assert_eq!(f_counts(1, 0, 1, 0, 0, 1).value, q(1));
        assert_eq!(f_counts(1, 0, 1, 0, 0, 2).value, q(2));
        assert_eq!(f_counts(1, 0, 0, 1, 1, 2).value, q(1));
        assert_eq!(f_counts_uncorrected(1, 0, 0, 1, 1, 2).value, r("1/2"));
    }

    #[test]
    fn f_counts_r0_reduction() {
        // r = 0, p' = q' = 0: n!/(p!q!)·binom(n−1; p−1, q−1).
        for n in 1..=5u32 {
            for p in 1..=n {
                for qq in 1..=n {
                    let direct = fact(n as i64)
                        * (fact(p as i64) * fact(qq as i64)).recip().unwrap()
                        * multinomial_int(n as i64 - 1, &[p as i64 - 1, qq as i64 - 1]);
                    assert_eq!(f_counts(p, 0, qq, 0, 0, n).value, direct);
                }
            }
        }
    }

    #[test]
    fn f_counts_vanish_outside_group_indices() {
        for n in 1..=5u32 {
            let inside: std::collections::BTreeSet<_> = group_indices(n).into_iter().collect();
            for p in 1..=n + 1 {
                for pp in 0..=n + 2 {
                    for qq in 0..=n + 1 {
                        for qp in 0..=n + 2 {
                            for rr in 0..=n / 2 + 1 {
                                if !inside.contains(&[p, pp, qq, qp, rr]) {
                                    assert!(f_counts(p, pp, qq, qp, rr, n).value.is_zero(), "{n} {p} {pp} {qq} {qp} {rr}");
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn formula_matches_oracle_on_clean_strata() {
        for n in 1..=4u32 {
            let t = oracle::partitioned_tallies(n as usize, 5).unwrap();
            for (_, _, _, a, v) in all_strata(n) {
                if v.well_defined {
                    assert_eq!(v.value, ExactRational::from(t.lp(&a) as i64), "n = {n}, A = {a}");
                }
            }
            // Every oracle stratum is enumerated.
            let listed: std::collections::BTreeSet<_> = all_strata(n).into_iter().map(|s| s.3).collect();
            for a in t.by_array.keys() {
                assert!(listed.contains(a), "{a} missing");
            }
        }
    }

    #[test]
    fn real_expansion_small_n() {
        let e1 = real_expansion(1, OracleBounds::default()).unwrap();
        assert_eq!(e1.expansion.coeff(&part("1"), &part("1")), q(1));
        assert!(e1.report.is_empty());
        let e2 = real_expansion(2, OracleBounds::default()).unwrap();
        assert_eq!(e2.expansion.coeff(&part("2"), &part("2")), q(3));
        assert_eq!(e2.expansion.coeff(&part("2"), &part("1,1")), q(2));
        assert_eq!(e2.expansion.coeff(&part("1,1"), &part("2")), q(2));
        assert_eq!(e2.expansion.coeff(&part("1,1"), &part("1,1")), q(0));
        assert_eq!(e2.report.len(), 1);
        assert_eq!(e2.report[0].oracle_value, Some(q(1)));
        assert!(real_expansion_strict(1).is_ok());
        assert_eq!(real_expansion_strict(2).unwrap_err().len(), 1);
    }

    #[test]
    fn residual_route_agrees_with_strata_route() {
        let by_strata = real_expansion(4, OracleBounds::default()).unwrap();
        let by_classes = real_expansion(
            4,
            OracleBounds {
                partitioned_max_n: 3,
                pairing_max_n: 7,
            },
        )
        .unwrap();
        assert_eq!(by_strata.expansion, by_classes.expansion);
        assert!(by_classes.report.iter().all(|e| e.oracle_source.as_deref() == Some("group-residual")));
    }

    #[test]
    fn complex_coefficients() {
        assert_eq!(complex_coeff(1, &part("1"), &part("1")), q(1));
        assert_eq!(complex_coeff(2, &part("2"), &part("1,1")), q(2));
        assert_eq!(complex_coeff(2, &part("1,1"), &part("1,1")), q(0));
    }

    #[test]
    fn specialisations() {
        for l in 0..=4 {
            for m in 0..=4 {
                assert_eq!(q_real(1, l, m), q(l * m));
                assert_eq!(q_compl(1, l, m), q(l * m));
            }
        }
        assert_eq!(q_compl(2, 2, 2), q(16));
        assert_eq!(q_real(2, 2, 2), q(20));
    }

    #[test]
    fn special_coefficients() {
        assert_eq!(coeff_m_lambda_m_n(2, &part("2")), BigInt::from(3));
        assert_eq!(coeff_m_lambda_m_n(2, &part("1,1")), BigInt::from(2));
        assert_eq!(coeff_m_lambda_m_n(1, &part("1")), BigInt::from(1));
        assert_eq!(coeff_hook(2, 0), BigInt::from(3));
        assert_eq!(coeff_hook(3, 1), BigInt::from(3));
        assert_eq!(coeff_hook(2, 1), BigInt::from(0));
        assert_eq!(hook(4, 2), part("2,1,1"));
    }

    #[test]
    fn remark_identity_small() {
        assert!(remark_identity_check(&part("1")));
        assert_eq!(remark_identity_sides(&part("2")).0, r("3/2"));
        assert!(remark_identity_check(&part("2")));
        assert!(remark_identity_check(&part("2,1")));
    }

    #[test]
    fn discrepancy_json() {
        let e = &real_expansion(2, OracleBounds::default()).unwrap().report[0];
        let js = serde_json::to_value(e).unwrap();
        assert_eq!(js["A"], "P:0|P':0|Q:0|Q':E2,1|i0=2|j0=1");
        assert_eq!(js["oracle_value"], "1/1");
        assert_eq!(js["lambda"], "2");
    }
}
