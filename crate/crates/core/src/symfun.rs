//! Monomial and power-sum symmetric functions in two alphabets, and the
//! power-sum to monomial change of basis for bilinear series
//! `Σ c_{λ,μ} f_λ(X) f_μ(Y)`.

use std::collections::BTreeMap;
use std::marker::PhantomData;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{falling, ExactRational};
use crate::partition::{aut, partitions_of, refinement_count, Partition};

/// Marker for the `m_λ(X) m_μ(Y)` basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Monomial;

/// Marker for the `p_λ(X) p_μ(Y)` basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct PowerSum;

/// Sparse bilinear expansion of order `n`: absent keys are zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bilinear<B> {
    n: u32,
    coeffs: BTreeMap<(Partition, Partition), ExactRational>,
    basis: PhantomData<B>,
}

pub type MonomialExpansion = Bilinear<Monomial>;
pub type PowerSumExpansion = Bilinear<PowerSum>;

/// One `{lambda, mu, coeff}` record of the JSON form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpansionRecord {
    pub lambda: Partition,
    pub mu: Partition,
    pub coeff: ExactRational,
}

impl<B> Bilinear<B> {
    pub fn new(n: u32) -> Self {
        Self {
            n,
            coeffs: BTreeMap::new(),
            basis: PhantomData,
        }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Adds `value` to the coefficient of `(λ, μ)`; zero results are dropped.
    pub fn add_term(&mut self, lambda: Partition, mu: Partition, value: ExactRational) -> Result<()> {
        if lambda.size() != self.n || mu.size() != self.n {
            return Err(Error::Invalid(format!(
                "key ({lambda:?}, {mu:?}) is not a pair of partitions of {}",
                self.n
            )));
        }
        let key = (lambda, mu);
        let entry = self.coeffs.entry(key.clone()).or_insert_with(ExactRational::zero);
        *entry += value;
        if entry.is_zero() {
            self.coeffs.remove(&key);
        }
        Ok(())
    }

    pub fn coeff(&self, lambda: &Partition, mu: &Partition) -> ExactRational {
        self.coeffs
            .get(&(lambda.clone(), mu.clone()))
            .cloned()
            .unwrap_or_else(ExactRational::zero)
    }

    /// Non-zero terms in canonical key order.
    pub fn terms(&self) -> impl Iterator<Item = (&Partition, &Partition, &ExactRational)> {
        self.coeffs.iter().map(|((l, m), c)| (l, m, c))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Swaps the roles of the two alphabets.
    pub fn transposed(&self) -> Self {
        let mut out = Self::new(self.n);
        for (l, m, c) in self.terms() {
            out.coeffs.insert((m.clone(), l.clone()), c.clone());
        }
        out
    }

    pub fn records(&self) -> Vec<ExpansionRecord> {
        self.terms()
            .map(|(l, m, c)| ExpansionRecord {
                lambda: l.clone(),
                mu: m.clone(),
                coeff: c.clone(),
            })
            .collect()
    }

    pub fn from_records(n: u32, records: &[ExpansionRecord]) -> Result<Self> {
        let mut out = Self::new(n);
        for r in records {
            out.add_term(r.lambda.clone(), r.mu.clone(), r.coeff.clone())?;
        }
        Ok(out)
    }
}

impl MonomialExpansion {
    /// Value at the eigenvalue lists of `X` and `Y`.
    pub fn evaluate(&self, x: &[ExactRational], y: &[ExactRational]) -> ExactRational {
        let mut cache_x = BTreeMap::new();
        let mut cache_y = BTreeMap::new();
        self.terms()
            .map(|(l, m, c)| {
                let mx = cache_x
                    .entry(l.clone())
                    .or_insert_with(|| eval_monomial(l, x))
                    .clone();
                let my = cache_y
                    .entry(m.clone())
                    .or_insert_with(|| eval_monomial(m, y))
                    .clone();
                c * &(mx * my)
            })
            .sum()
    }

    /// Value at `X = I_l`, `Y = I_m` (first `l` resp. `m` eigenvalues 1).
    pub fn evaluate_ones(&self, l: i64, m: i64) -> ExactRational {
        self.terms()
            .map(|(lam, mu, c)| c * &(eval_monomial_ones(lam, l) * eval_monomial_ones(mu, m)))
            .sum()
    }
}

impl PowerSumExpansion {
    pub fn evaluate(&self, x: &[ExactRational], y: &[ExactRational]) -> ExactRational {
        self.terms()
            .map(|(l, m, c)| c * &(eval_power_sum(l, x) * eval_power_sum(m, y)))
            .sum()
    }
}

/// Coefficients of `p_λ` in the monomial basis: `Aut_μ R̄_{λ,μ}` on every
/// coarsening `μ` of `λ`.
pub fn p_in_m_basis(lambda: &Partition) -> BTreeMap<Partition, BigInt> {
    partitions_of(lambda.size())
        .into_iter()
        .filter_map(|mu| {
            let r = refinement_count(lambda, &mu);
            (r > 0).then(|| {
                let c = aut(&mu) * r;
                (mu, c)
            })
        })
        .collect()
}

/// Rewrites a power-sum series in the monomial basis, alphabet by alphabet.
pub fn to_monomial(series: &PowerSumExpansion) -> MonomialExpansion {
    let mut basis_cache: BTreeMap<Partition, BTreeMap<Partition, BigInt>> = BTreeMap::new();
    let mut expand = |l: &Partition| {
        basis_cache
            .entry(l.clone())
            .or_insert_with(|| p_in_m_basis(l))
            .clone()
    };
    let mut out = MonomialExpansion::new(series.n());
    for (l, m, c) in series.terms() {
        let left = expand(l);
        let right = expand(m);
        for (nu, a) in &left {
            for (rho, b) in &right {
                let term = c * &ExactRational::from_integer(a * b);
                out.add_term(nu.clone(), rho.clone(), term)
                    .expect("coarsenings keep the order");
            }
        }
    }
    out
}

/// `p_λ` at an explicit alphabet.
pub fn eval_power_sum(lambda: &Partition, eigs: &[ExactRational]) -> ExactRational {
    lambda
        .parts()
        .iter()
        .map(|&k| eigs.iter().map(|x| x.pow(k as i32).expect("positive power")).sum::<ExactRational>())
        .product()
}

/// `m_λ` at an explicit alphabet: the sum of all distinct monomials whose
/// exponent vector is a rearrangement of `λ` padded with zeros.
pub fn eval_monomial(lambda: &Partition, eigs: &[ExactRational]) -> ExactRational {
    if lambda.len() > eigs.len() {
        return ExactRational::zero();
    }
    // Distinct exponents with multiplicity, zero included to fill the alphabet.
    let mut remaining: Vec<(u32, usize)> = lambda
        .multiplicities()
        .into_iter()
        .map(|(i, m)| (i, m as usize))
        .collect();
    remaining.push((0, eigs.len() - lambda.len()));

    fn rec(pos: usize, eigs: &[ExactRational], remaining: &mut [(u32, usize)], acc: &ExactRational) -> ExactRational {
        if pos == eigs.len() {
            return acc.clone();
        }
        let mut total = ExactRational::zero();
        for k in 0..remaining.len() {
            if remaining[k].1 == 0 {
                continue;
            }
            remaining[k].1 -= 1;
            let e = remaining[k].0;
            let factor = if e == 0 {
                acc.clone()
            } else {
                acc * &eigs[pos].pow(e as i32).expect("positive power")
            };
            if !factor.is_zero() {
                total += rec(pos + 1, eigs, remaining, &factor);
            }
            remaining[k].1 += 1;
        }
        total
    }
    rec(0, eigs, &mut remaining, &ExactRational::one())
}

/// `m_λ(I_l) = (l)_{ℓ(λ)} / Aut_λ`.
pub fn eval_monomial_ones(lambda: &Partition, l: i64) -> ExactRational {
    ExactRational::from_integer(falling(l, lambda.len() as u64))
        .checked_div(&ExactRational::from_integer(aut(lambda)))
        .expect("Aut is positive")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Partition {
        s.parse().unwrap()
    }

    fn q(s: &str) -> ExactRational {
        s.parse().unwrap()
    }

    fn ints(v: &[i64]) -> Vec<ExactRational> {
        v.iter().map(|&x| ExactRational::from(x)).collect()
    }

    #[test]
    fn p_in_m_examples() {
        let two = p_in_m_basis(&p("2"));
        assert_eq!(two, BTreeMap::from([(p("2"), BigInt::from(1))]));
        let oneone = p_in_m_basis(&p("1,1"));
        assert_eq!(
            oneone,
            BTreeMap::from([(p("2"), BigInt::from(1)), (p("1,1"), BigInt::from(2))])
        );
        for n in 1..=7 {
            assert_eq!(
                p_in_m_basis(&Partition::single(n)),
                BTreeMap::from([(Partition::single(n), BigInt::from(1))])
            );
        }
    }

    #[test]
    fn to_monomial_examples() {
        let mut s = PowerSumExpansion::new(2);
        s.add_term(p("2"), p("1,1"), q("1")).unwrap();
        let m = to_monomial(&s);
        assert_eq!(m.coeff(&p("2"), &p("2")), q("1"));
        assert_eq!(m.coeff(&p("2"), &p("1,1")), q("2"));
        assert_eq!(m.len(), 2);

        let mut s1 = PowerSumExpansion::new(1);
        s1.add_term(p("1"), p("1"), q("1")).unwrap();
        assert_eq!(to_monomial(&s1).records().len(), 1);

        // p2 p11 + p11 p2 + p2 p2, expanded by hand:
        // p2 = m2, p11 = m2 + 2 m11.
        let mut s2 = PowerSumExpansion::new(2);
        s2.add_term(p("2"), p("1,1"), q("1")).unwrap();
        s2.add_term(p("1,1"), p("2"), q("1")).unwrap();
        s2.add_term(p("2"), p("2"), q("1")).unwrap();
        let m2 = to_monomial(&s2);
        assert_eq!(m2.coeff(&p("2"), &p("2")), q("3"));
        assert_eq!(m2.coeff(&p("2"), &p("1,1")), q("2"));
        assert_eq!(m2.coeff(&p("1,1"), &p("2")), q("2"));
        assert_eq!(m2.coeff(&p("1,1"), &p("1,1")), q("0"));
        assert_eq!(m2.len(), 3);
    }

    #[test]
    fn add_term_rejects_wrong_order() {
        let mut s = MonomialExpansion::new(3);
        assert!(s.add_term(p("2"), p("2,1"), q("1")).is_err());
    }

    #[test]
    fn monomial_evaluation_examples() {
        assert_eq!(eval_monomial_ones(&p("1,1"), 3), q("3"));
        assert_eq!(eval_monomial(&p("2"), &ints(&[1, 1])), q("2"));
        // m_{21}(a, b) = a^2 b + a b^2
        for (a, b) in [(2, 3), (-1, 5), (0, 7)] {
            let expected = a * a * b + a * b * b;
            assert_eq!(eval_monomial(&p("2,1"), &ints(&[a, b])), ExactRational::from(expected));
        }
        assert_eq!(eval_monomial(&p("1,1,1"), &ints(&[1, 2])), q("0"));
    }

    #[test]
    fn ones_specialization_matches_explicit_alphabet() {
        for n in 1..=8 {
            for lambda in partitions_of(n) {
                for l in 0..=6 {
                    let ones = vec![ExactRational::one(); l as usize];
                    assert_eq!(
                        eval_monomial(&lambda, &ones),
                        eval_monomial_ones(&lambda, l),
                        "{lambda:?} l = {l}"
                    );
                }
            }
        }
    }

    #[test]
    fn records_round_trip_through_json() {
        let mut s = MonomialExpansion::new(2);
        s.add_term(p("2"), p("1,1"), q("-3/4")).unwrap();
        s.add_term(p("1,1"), p("2"), q("2")).unwrap();
        let json = serde_json::to_string(&s.records()).unwrap();
        assert_eq!(
            json,
            r#"[{"lambda":"2","mu":"1,1","coeff":"-3/4"},{"lambda":"1,1","mu":"2","coeff":"2/1"}]"#
        );
        let back: Vec<ExpansionRecord> = serde_json::from_str(&json).unwrap();
        assert_eq!(MonomialExpansion::from_records(2, &back).unwrap(), s);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn alphabet() -> impl Strategy<Value = Vec<ExactRational>> {
            proptest::collection::vec((-6i64..7, 1i64..5), 0..=5).prop_map(|v| {
                v.into_iter()
                    .map(|(a, b)| ExactRational::new(a, b).unwrap())
                    .collect()
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]
            #[test]
            fn power_sum_agrees_with_its_monomial_expansion(n in 1u32..=8, idx in 0usize..64, eigs in alphabet()) {
                let all = partitions_of(n);
                let lambda = &all[idx % all.len()];
                let direct = eval_power_sum(lambda, &eigs);
                let via_m: ExactRational = p_in_m_basis(lambda)
                    .iter()
                    .map(|(mu, c)| ExactRational::from_integer(c.clone()) * eval_monomial(mu, &eigs))
                    .sum();
                prop_assert_eq!(direct, via_m);
            }
        }
    }
}
