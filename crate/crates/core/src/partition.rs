//! Integer partitions and the small combinatorial statistics attached to
//! them (`Aut`, `z`, refinement counts).

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;
use crate::exact::factorial;

/// An integer partition, parts stored in weakly decreasing order.
///
/// `Ord` is the canonical table order: by size, then reverse lexicographic
/// on the parts, so `(4) < (3,1) < (2,2) < (2,1,1) < (1,1,1,1)`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    /// Builds a partition from parts in any order; zero parts are dropped.
    pub fn new(mut parts: Vec<u32>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Self { parts }
    }

    /// The one-part partition `(n)`; empty for `n = 0`.
    pub fn single(n: u32) -> Self {
        Self::new(vec![n])
    }

    /// `(1^n)`.
    pub fn ones(n: u32) -> Self {
        Self::new(vec![1; n as usize])
    }

    /// Builds from a multiplicity map `i -> n_i`.
    pub fn from_multiplicities(mults: &BTreeMap<u32, u32>) -> Self {
        let parts = mults
            .iter()
            .flat_map(|(&i, &m)| std::iter::repeat_n(i, m as usize))
            .collect();
        Self::new(parts)
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    /// `|λ|`.
    pub fn size(&self) -> u32 {
        self.parts.iter().sum()
    }

    /// `ℓ(λ)`.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// `n_i(λ)`; zero for `i = 0` by convention.
    pub fn multiplicity(&self, i: u32) -> u32 {
        if i == 0 {
            return 0;
        }
        self.parts.iter().filter(|&&p| p == i).count() as u32
    }

    /// Map `i -> n_i(λ)` over the distinct parts.
    pub fn multiplicities(&self) -> BTreeMap<u32, u32> {
        let mut out = BTreeMap::new();
        for &p in &self.parts {
            *out.entry(p).or_insert(0) += 1;
        }
        out
    }

    /// `[1^a 2^b ...]` notation.
    pub fn to_exponent_string(&self) -> String {
        let body: Vec<String> = self
            .multiplicities()
            .iter()
            .map(|(i, m)| format!("{i}^{m}"))
            .collect();
        format!("[{}]", body.join(" "))
    }
}

impl Ord for Partition {
    fn cmp(&self, other: &Self) -> Ordering {
        self.size()
            .cmp(&other.size())
            .then_with(|| other.parts.cmp(&self.parts))
    }
}

impl PartialOrd for Partition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Partition {
    /// Comma list, e.g. `3,2,1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: Vec<String> = self.parts.iter().map(u32::to_string).collect();
        f.write_str(&body.join(","))
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({self})")
    }
}

impl FromStr for Partition {
    type Err = Error;

    /// Accepts `3,2,1`, `(3,2,1)`, and `[1^1 2^1 3^1]` (a bare `i` inside
    /// brackets means `i^1`). The empty string and `[]` give the empty
    /// partition.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = |why: &str| Error::Parse(format!("invalid partition `{s}`: {why}"));
        if let Some(inner) = s.strip_prefix('[').and_then(|t| t.strip_suffix(']')) {
            let mut mults = BTreeMap::new();
            for tok in inner.split_whitespace() {
                let (part, mult) = match tok.split_once('^') {
                    Some((p, m)) => (p, m),
                    None => (tok, "1"),
                };
                let part: u32 = part.parse().map_err(|_| bad("bad part"))?;
                let mult: u32 = mult.parse().map_err(|_| bad("bad multiplicity"))?;
                if part == 0 {
                    return Err(bad("zero part"));
                }
                *mults.entry(part).or_insert(0) += mult;
            }
            return Ok(Self::from_multiplicities(&mults));
        }
        let inner = s
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .unwrap_or(s);
        if inner.trim().is_empty() {
            return Ok(Self::default());
        }
        let parts = inner
            .split(',')
            .map(|t| t.trim().parse::<u32>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| bad("bad part"))?;
        if parts.contains(&0) {
            return Err(bad("zero part"));
        }
        Ok(Self::new(parts))
    }
}

impl Serialize for Partition {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Partition {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// All partitions of `n` in reverse lexicographic order.
pub fn partitions_of(n: u32) -> Vec<Partition> {
    fn rec(remaining: u32, max_part: u32, prefix: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if remaining == 0 {
            out.push(Partition {
                parts: prefix.clone(),
            });
            return;
        }
        for first in (1..=remaining.min(max_part)).rev() {
            prefix.push(first);
            rec(remaining - first, first, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

/// `Aut_λ = Π n_i(λ)!`.
pub fn aut(lambda: &Partition) -> BigInt {
    lambda
        .multiplicities()
        .values()
        .map(|&m| factorial(m as u64))
        .product()
}

/// `z_λ = Π i^{n_i} n_i!`.
pub fn z(lambda: &Partition) -> BigInt {
    lambda
        .multiplicities()
        .iter()
        .fold(BigInt::one(), |acc, (&i, &m)| {
            acc * num_traits::pow(BigInt::from(i), m as usize) * factorial(m as u64)
        })
}

/// `R̄_{λ,ν}`: the number of unordered set partitions of the part indices of
/// `λ` whose block sums are the parts of `ν`. Zero unless `λ` refines `ν`.
///
/// Counts ordered assignments of the parts of `λ` onto the parts of `ν`
/// (every part of `ν` exactly filled) and divides by `Aut_ν`, the number of
/// ways to permute equal target parts.
pub fn refinement_count(lambda: &Partition, nu: &Partition) -> u64 {
    if lambda.size() != nu.size() || lambda.len() < nu.len() {
        return 0;
    }
    fn assign(parts: &[u32], capacity: &mut [u32]) -> u64 {
        let Some((&first, rest)) = parts.split_first() else {
            return u64::from(capacity.iter().all(|&c| c == 0));
        };
        let mut total = 0;
        for slot in 0..capacity.len() {
            if capacity[slot] >= first {
                capacity[slot] -= first;
                total += assign(rest, capacity);
                capacity[slot] += first;
            }
        }
        total
    }
    let mut capacity = nu.parts.clone();
    let ordered = assign(&lambda.parts, &mut capacity);
    let aut_nu: u64 = nu
        .multiplicities()
        .values()
        .map(|&m| (1..=m as u64).product::<u64>())
        .product();
    debug_assert_eq!(ordered % aut_nu, 0);
    ordered / aut_nu
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Partition {
        s.parse().unwrap()
    }

    /// Euler's pentagonal recurrence, independent of the generator.
    fn euler_count(n: usize) -> u64 {
        let mut table = vec![0i64; n + 1];
        table[0] = 1;
        for i in 1..=n {
            let mut acc = 0i64;
            for k in 1i64.. {
                let g1 = (k * (3 * k - 1) / 2) as usize;
                if g1 > i {
                    break;
                }
                let sign = if k % 2 == 1 { 1 } else { -1 };
                acc += sign * table[i - g1];
                let g2 = (k * (3 * k + 1) / 2) as usize;
                if g2 <= i {
                    acc += sign * table[i - g2];
                }
            }
            table[i] = acc;
        }
        table[n] as u64
    }

    /// Brute force over all set partitions of the part indices.
    fn refinement_by_set_partitions(lambda: &Partition, nu: &Partition) -> u64 {
        fn set_partitions(k: usize) -> Vec<Vec<Vec<usize>>> {
            if k == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for sp in set_partitions(k - 1) {
                for b in 0..sp.len() {
                    let mut next = sp.clone();
                    next[b].push(k - 1);
                    out.push(next);
                }
                let mut next = sp.clone();
                next.push(vec![k - 1]);
                out.push(next);
            }
            out
        }
        set_partitions(lambda.len())
            .into_iter()
            .filter(|sp| {
                let sums = sp
                    .iter()
                    .map(|b| b.iter().map(|&i| lambda.parts()[i]).sum())
                    .collect();
                Partition::new(sums) == *nu
            })
            .count() as u64
    }

    /// Every partition reachable by repeatedly merging two parts.
    fn coarsenings(lambda: &Partition) -> std::collections::BTreeSet<Partition> {
        let mut seen = std::collections::BTreeSet::new();
        let mut stack = vec![lambda.clone()];
        while let Some(cur) = stack.pop() {
            if !seen.insert(cur.clone()) {
                continue;
            }
            let parts = cur.parts();
            for a in 0..parts.len() {
                for b in a + 1..parts.len() {
                    let mut next: Vec<u32> = parts
                        .iter()
                        .enumerate()
                        .filter(|&(i, _)| i != a && i != b)
                        .map(|(_, &x)| x)
                        .collect();
                    next.push(parts[a] + parts[b]);
                    stack.push(Partition::new(next));
                }
            }
        }
        seen
    }

    #[test]
    fn partitions_counts_and_order() {
        assert_eq!(partitions_of(0), vec![Partition::default()]);
        assert_eq!(partitions_of(1), vec![p("1")]);
        assert_eq!(partitions_of(4).len(), 5);
        assert_eq!(
            partitions_of(4),
            ["4", "3,1", "2,2", "2,1,1", "1,1,1,1"].map(p).to_vec()
        );
        for n in 0..=12 {
            let all = partitions_of(n);
            assert_eq!(all.len() as u64, euler_count(n as usize), "n = {n}");
            assert!(all.windows(2).all(|w| w[0] < w[1]), "order at n = {n}");
            assert!(all.iter().all(|l| l.size() == n));
        }
        assert_eq!(euler_count(8), 22);
    }

    #[test]
    fn parse_both_notations() {
        assert_eq!(p("3,2,1"), Partition::new(vec![1, 2, 3]));
        assert_eq!(p("[1^2 2^1]"), p("2,1,1"));
        assert_eq!(p("[1^1 2^2 3^1 4^1]"), p("4,3,2,2,1"));
        assert_eq!(p("(2,2)"), p("[2^2]"));
        assert_eq!(p("[3 1]"), p("3,1"));
        assert!(p("").is_empty());
        assert!("3,x".parse::<Partition>().is_err());
        assert!("3,0".parse::<Partition>().is_err());
        assert_eq!(p("2,1,1").to_exponent_string(), "[1^2 2^1]");
        assert_eq!(p("2,1,1").to_string(), "2,1,1");
    }

    #[test]
    fn aut_and_z_examples() {
        assert_eq!(aut(&p("2,2,1")), BigInt::from(2));
        assert_eq!(z(&p("2,2,1")), BigInt::from(8));
        for n in 1..=9 {
            assert_eq!(z(&Partition::single(n)), BigInt::from(n));
        }
    }

    #[test]
    fn class_sizes_sum_to_factorial() {
        for n in 0..=8u32 {
            let total: BigInt = partitions_of(n)
                .iter()
                .map(|l| factorial(n as u64) / z(l))
                .sum();
            assert_eq!(total, factorial(n as u64), "n = {n}");
        }
    }

    #[test]
    fn refinement_examples() {
        assert_eq!(refinement_count(&p("1,1"), &p("2")), 1);
        assert_eq!(refinement_count(&p("1,1,1,1"), &p("2,2")), 3);
        assert_eq!(refinement_by_set_partitions(&p("1,1,1,1"), &p("2,2")), 3);
        for n in 1..=6 {
            for l in partitions_of(n) {
                assert_eq!(refinement_count(&l, &l), 1);
            }
        }
        assert_eq!(refinement_count(&p("2"), &p("1,1")), 0);
        assert_eq!(refinement_count(&p("3,1"), &p("2,2")), 0);
    }

    #[test]
    fn refinement_matches_set_partition_search_and_merge_reachability() {
        for n in 1..=8 {
            let all = partitions_of(n);
            for lambda in &all {
                let reachable = coarsenings(lambda);
                for nu in &all {
                    let count = refinement_count(lambda, nu);
                    assert_eq!(count, refinement_by_set_partitions(lambda, nu), "{lambda:?} {nu:?}");
                    assert_eq!(count > 0, reachable.contains(nu), "{lambda:?} {nu:?}");
                }
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn display_parse_round_trip(parts in proptest::collection::vec(1u32..9, 0..8)) {
                let lambda = Partition::new(parts);
                prop_assert_eq!(lambda.to_string().parse::<Partition>().unwrap(), lambda.clone());
                prop_assert_eq!(lambda.to_exponent_string().parse::<Partition>().unwrap(), lambda);
            }
        }
    }
}
