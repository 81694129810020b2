//! Brute-force ground truth: every pairing `f₃` of `[n] ∪ [n̂]`, classified
//! by the half cycle types of `f₃∘f₁` and `f₃∘f₂` and by `r`, plus the
//! partitioned hypermaps built on top of them.
//!
//! Enumeration is sharded by the partner of label 1 and shards are merged in
//! shard order, so every table is deterministic regardless of thread count.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_bound, Error, Result};
use crate::exact::factorial;
use crate::pairing::{compose, cycle_type, halve_cycle_type, Pairing, SetPartition};
use crate::partition::{partitions_of, refinement_count, Partition};
use crate::strata::{ArrayKind, ArrayTuple};

/// Default largest `n` for the full pairing space.
pub const PAIRING_MAX_N: usize = 7;
/// Default largest `n` for partitioned-hypermap enumeration.
pub const PARTITIONED_MAX_N: usize = 5;

/// Runs `visit` on every fixed-point-free involution of `2n` points whose
/// point 0 is paired with `partner`.
fn for_each_pairing_with(n: usize, partner: usize, visit: &mut dyn FnMut(&[usize])) {
    let mut image = vec![usize::MAX; 2 * n];
    image[0] = partner;
    image[partner] = 0;
    fill(&mut image, visit);
}

fn fill(image: &mut [usize], visit: &mut dyn FnMut(&[usize])) {
    let Some(x) = image.iter().position(|&v| v == usize::MAX) else {
        visit(image);
        return;
    };
    for y in x + 1..image.len() {
        if image[y] != usize::MAX {
            continue;
        }
        image[x] = y;
        image[y] = x;
        fill(image, visit);
        image[x] = usize::MAX;
        image[y] = usize::MAX;
    }
}

/// Visits all `(2n-1)!!` pairings, sequentially.
pub fn for_each_pairing(n: usize, mut visit: impl FnMut(&[usize])) {
    for partner in 1..2 * n {
        for_each_pairing_with(n, partner, &mut visit);
    }
}

/// Parallel fold over the pairing space, one accumulator per shard,
/// returned in shard order.
fn sharded<T: Send>(n: usize, init: impl Fn() -> T + Sync, step: impl Fn(&mut T, &[usize]) + Sync) -> Vec<T> {
    (1..2 * n)
        .into_par_iter()
        .map(|partner| {
            let mut acc = init();
            for_each_pairing_with(n, partner, &mut |img| step(&mut acc, img));
            acc
        })
        .collect()
}

fn merge_counts<K: Ord>(into: &mut BTreeMap<K, u64>, from: BTreeMap<K, u64>) {
    for (k, v) in from {
        *into.entry(k).or_insert(0) += v;
    }
}

/// Counts keyed by `(λ, μ, r)`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ClassTable {
    pub n: usize,
    pub entries: BTreeMap<(Partition, Partition, usize), u64>,
}

impl ClassTable {
    pub fn get(&self, lambda: &Partition, mu: &Partition, r: usize) -> u64 {
        self.entries
            .get(&(lambda.clone(), mu.clone(), r))
            .copied()
            .unwrap_or(0)
    }

    /// `Σ_r` of the entries for `(λ, μ)`.
    pub fn summed(&self, lambda: &Partition, mu: &Partition) -> u64 {
        (0..=self.n / 2).map(|r| self.get(lambda, mu, r)).sum()
    }

    pub fn total(&self) -> u64 {
        self.entries.values().sum()
    }
}

fn classify(n: usize, f1: &[usize], f2: &[usize], f3: &[usize]) -> (Partition, Partition, usize) {
    let lam = halve_cycle_type(&cycle_type(&compose(f3, f1))).expect("pairing products have type λλ");
    let mu = halve_cycle_type(&cycle_type(&compose(f3, f2))).expect("pairing products have type λλ");
    let r = (n..2 * n).filter(|&x| f3[x] >= n).count() / 2;
    (lam, mu, r)
}

/// `L^n_{λ,μ,r}`: pairings `f₃` with `f₃∘f₁ ∈ C_{λλ}`, `f₃∘f₂ ∈ C_{μμ}` and
/// `r` hat/hat pairs.
pub fn l_table(n: usize) -> Result<ClassTable> {
    l_table_bounded(n, PAIRING_MAX_N)
}

pub fn l_table_bounded(n: usize, bound: usize) -> Result<ClassTable> {
    check_bound("pairing enumeration", n, bound)?;
    if n == 0 {
        return Err(Error::Invalid("n must be at least 1".into()));
    }
    let f1 = Pairing::canonical_f1(n);
    let f2 = Pairing::canonical_f2(n);
    let shards = sharded(n, BTreeMap::new, |acc, f3| {
        *acc.entry(classify(n, f1.image(), f2.image(), f3)).or_insert(0) += 1;
    });
    let mut entries = BTreeMap::new();
    for s in shards {
        merge_counts(&mut entries, s);
    }
    Ok(ClassTable { n, entries })
}

/// `b^n_{λ,μ} = 2ⁿ n! Σ_r L^n_{λ,μ,r}` for every pair of partitions of `n`.
pub fn b_from_l(table: &ClassTable) -> BTreeMap<(Partition, Partition), BigInt> {
    let bn = BigInt::from(2).pow(table.n as u32) * factorial(table.n as u64);
    let parts = partitions_of(table.n as u32);
    let mut out = BTreeMap::new();
    for lam in &parts {
        for mu in &parts {
            out.insert((lam.clone(), mu.clone()), &bn * table.summed(lam, mu));
        }
    }
    out
}

/// `c^n_{λ,μ} = L^n_{λ,μ,0}` for every pair of partitions of `n`.
pub fn c_from_l(table: &ClassTable) -> BTreeMap<(Partition, Partition), u64> {
    let parts = partitions_of(table.n as u32);
    let mut out = BTreeMap::new();
    for lam in &parts {
        for mu in &parts {
            out.insert((lam.clone(), mu.clone()), table.get(lam, mu, 0));
        }
    }
    out
}

/// `LP^n_{ν,ρ,r} = Σ R̄_{λν} R̄_{μρ} L^n_{λ,μ,r}` over refinements.
pub fn lp_from_l(table: &ClassTable) -> ClassTable {
    let parts = partitions_of(table.n as u32);
    let mut entries = BTreeMap::new();
    for ((lam, mu, r), &count) in &table.entries {
        for nu in &parts {
            let a = refinement_count(lam, nu);
            if a == 0 {
                continue;
            }
            for rho in &parts {
                let b = refinement_count(mu, rho);
                if b == 0 {
                    continue;
                }
                *entries.entry((nu.clone(), rho.clone(), *r)).or_insert(0) += a * b * count;
            }
        }
    }
    ClassTable { n: table.n, entries }
}

/// A triple `(f₃, π₁, π₂)` with `π₁` stable under `f₁, f₃` and `π₂` stable
/// under `f₂, f₃`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartitionedHypermap {
    f3: Pairing,
    pi1: SetPartition,
    pi2: SetPartition,
}

impl PartitionedHypermap {
    pub fn new(f3: Pairing, pi1: SetPartition, pi2: SetPartition) -> Result<Self> {
        let n = f3.n();
        if pi1.n() != n || pi2.n() != n {
            return Err(Error::Invalid("pairing and set partitions have different n".into()));
        }
        let f1 = Pairing::canonical_f1(n);
        let f2 = Pairing::canonical_f2(n);
        if !pi1.is_stable_under(&f1) || !pi1.is_stable_under(&f3) {
            return Err(Error::Invalid("pi1 is not stable under f1 and f3".into()));
        }
        if !pi2.is_stable_under(&f2) || !pi2.is_stable_under(&f3) {
            return Err(Error::Invalid("pi2 is not stable under f2 and f3".into()));
        }
        for block in pi1.blocks().iter().chain(pi2.blocks()) {
            let hats = block.iter().filter(|l| l.hat).count();
            if 2 * hats != block.len() {
                return Err(Error::Invalid(format!("block {block:?} is not balanced")));
            }
        }
        Ok(Self { f3, pi1, pi2 })
    }

    pub fn n(&self) -> usize {
        self.f3.n()
    }

    pub fn f3(&self) -> &Pairing {
        &self.f3
    }

    pub fn pi1(&self) -> &SetPartition {
        &self.pi1
    }

    pub fn pi2(&self) -> &SetPartition {
        &self.pi2
    }

    pub fn r(&self) -> usize {
        crate::pairing::r_statistic(&self.f3)
    }

    /// Three-line rendering with hats: `f3`, then `π₁` and `π₂` as pair lists.
    pub fn pretty(&self) -> String {
        let n = self.n();
        format!(
            "f3 = {}\npi1 = {}\npi2 = {}",
            self.f3.cycle_notation(),
            self.pi1.notation_by_pairs(&Pairing::canonical_f1(n), true),
            self.pi2.notation_by_pairs(&Pairing::canonical_f2(n), false)
        )
    }
}

/// JSON form: `{n, f3: [["1","4"], ...], pi1: [[...]], pi2: [[...]]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypermapJson {
    pub n: usize,
    pub f3: Vec<(crate::Label, crate::Label)>,
    pub pi1: Vec<Vec<crate::Label>>,
    pub pi2: Vec<Vec<crate::Label>>,
}

impl From<&PartitionedHypermap> for HypermapJson {
    fn from(h: &PartitionedHypermap) -> Self {
        Self {
            n: h.n(),
            f3: h.f3.pairs(),
            pi1: h.pi1.blocks().to_vec(),
            pi2: h.pi2.blocks().to_vec(),
        }
    }
}

impl TryFrom<HypermapJson> for PartitionedHypermap {
    type Error = Error;

    fn try_from(j: HypermapJson) -> Result<Self> {
        let f3 = Pairing::from_pairs(j.n, &j.f3)?;
        PartitionedHypermap::new(f3, SetPartition::new(j.n, j.pi1)?, SetPartition::new(j.n, j.pi2)?)
    }
}

impl Serialize for PartitionedHypermap {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        HypermapJson::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PartitionedHypermap {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let j = HypermapJson::deserialize(deserializer)?;
        PartitionedHypermap::try_from(j).map_err(serde::de::Error::custom)
    }
}

/// Orbits of `⟨f, g⟩` as index lists, ordered by smallest element.
pub(crate) fn orbits(f: &[usize], g: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; f.len()];
    let mut out = Vec::new();
    for start in 0..f.len() {
        if seen[start] {
            continue;
        }
        let mut orbit = vec![start];
        seen[start] = true;
        let mut k = 0;
        while k < orbit.len() {
            let x = orbit[k];
            for y in [f[x], g[x]] {
                if !seen[y] {
                    seen[y] = true;
                    orbit.push(y);
                }
            }
            k += 1;
        }
        orbit.sort_unstable();
        out.push(orbit);
    }
    out
}

/// All set partitions of `0..k`, as restricted growth strings.
pub(crate) fn set_partitions(k: usize) -> Vec<Vec<usize>> {
    fn rec(pos: usize, k: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if pos == k {
            out.push(cur.clone());
            return;
        }
        for b in 0..=max {
            cur.push(b);
            rec(pos + 1, k, if b == max { max + 1 } else { max }, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k == 0 {
        out.push(Vec::new());
    } else {
        rec(0, k, 0, &mut Vec::with_capacity(k), &mut out);
    }
    out
}

fn merge_orbits(orbits: &[Vec<usize>], rgs: &[usize]) -> Vec<Vec<usize>> {
    let nblocks = rgs.iter().max().map_or(0, |m| m + 1);
    let mut blocks = vec![Vec::new(); nblocks];
    for (o, &b) in orbits.iter().zip(rgs) {
        blocks[b].extend_from_slice(o);
    }
    blocks
}

/// Visits every partitioned hypermap built on the pairing `f3`.
fn for_each_on(n: usize, f1: &[usize], f2: &[usize], f3: &[usize], visit: &mut dyn FnMut(PartitionedHypermap)) {
    let white = orbits(f1, f3);
    let black = orbits(f2, f3);
    let pw = set_partitions(white.len());
    let pb = set_partitions(black.len());
    let pairing = Pairing::from_image(n, f3.to_vec()).expect("enumerated pairing");
    for a in &pw {
        let pi1 = SetPartition::from_index_blocks(n, merge_orbits(&white, a));
        for b in &pb {
            let pi2 = SetPartition::from_index_blocks(n, merge_orbits(&black, b));
            visit(PartitionedHypermap {
                f3: pairing.clone(),
                pi1: pi1.clone(),
                pi2: pi2.clone(),
            });
        }
    }
}

/// Streams every partitioned hypermap of order `n`, sequentially.
pub fn enumerate_partitioned(n: usize, bound: usize, mut visit: impl FnMut(PartitionedHypermap)) -> Result<()> {
    check_bound("partitioned hypermap enumeration", n, bound)?;
    let f1 = Pairing::canonical_f1(n);
    let f2 = Pairing::canonical_f2(n);
    for_each_pairing(n, |f3| for_each_on(n, f1.image(), f2.image(), f3, &mut visit));
    Ok(())
}

/// Per-class and per-stratum counts of partitioned hypermaps.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PartitionedTallies {
    pub n: usize,
    /// `LP^n_{ν,ρ,r}`.
    pub by_class: ClassTable,
    /// `LP(A)`.
    pub by_array: BTreeMap<ArrayTuple, u64>,
}

impl PartitionedTallies {
    pub fn lp(&self, a: &ArrayTuple) -> u64 {
        self.by_array.get(a).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.by_array.values().sum()
    }

    /// Totals grouped by `(p, p', q, q', r)` with `p = |P| + 1`.
    pub fn by_group(&self) -> BTreeMap<[u32; 5], u64> {
        let mut out = BTreeMap::new();
        for (a, &v) in &self.by_array {
            *out.entry(group_key(a)).or_insert(0) += v;
        }
        out
    }
}

/// `(p, p', q, q', r)` of a stratum, counting the seed root in `p`.
pub fn group_key(a: &ArrayTuple) -> [u32; 5] {
    [a.p_count() + 1, a.p_prime_count(), a.q_count(), a.q_prime_count(), a.r()]
}

/// Parallel tallies of [`enumerate_partitioned`].
pub fn partitioned_tallies(n: usize, bound: usize) -> Result<PartitionedTallies> {
    check_bound("partitioned hypermap enumeration", n, bound)?;
    let f1 = Pairing::canonical_f1(n);
    let f2 = Pairing::canonical_f2(n);
    type Acc = (BTreeMap<(Partition, Partition, usize), u64>, BTreeMap<ArrayTuple, u64>);
    let shards = sharded(n, Acc::default, |acc, f3| {
        for_each_on(n, f1.image(), f2.image(), f3, &mut |h| {
            let key = (h.pi1.half_type(), h.pi2.half_type(), h.r());
            *acc.0.entry(key).or_insert(0) += 1;
            *acc.1.entry(degree_array(&h)).or_insert(0) += 1;
        });
    });
    let mut out = PartitionedTallies {
        n,
        by_class: ClassTable { n, entries: BTreeMap::new() },
        by_array: BTreeMap::new(),
    };
    for (c, a) in shards {
        merge_counts(&mut out.by_class.entries, c);
        merge_counts(&mut out.by_array, a);
    }
    Ok(out)
}

/// The stratum `A` of a partitioned hypermap.
pub fn degree_array(h: &PartitionedHypermap) -> ArrayTuple {
    let n = h.n();
    let f3 = h.f3.image();
    let is_hat = |x: usize| x >= n;
    let mut a = ArrayTuple::default();
    for block in h.pi1.blocks() {
        let idx: Vec<usize> = block.iter().map(|l| l.index(n)).collect();
        let i = (idx.len() / 2) as u32;
        let j = (idx.iter().filter(|&&x| !is_hat(x) && !is_hat(f3[x])).count() / 2) as u32;
        if idx.contains(&0) {
            a.i0 = i;
            a.j0 = j;
            continue;
        }
        let max = *idx.iter().filter(|&&x| !is_hat(x)).max().expect("balanced block");
        let kind = if is_hat(f3[max]) { ArrayKind::P } else { ArrayKind::PPrime };
        a.add(kind, i, j);
    }
    for block in h.pi2.blocks() {
        let idx: Vec<usize> = block.iter().map(|l| l.index(n)).collect();
        let i = (idx.len() / 2) as u32;
        let j = (idx.iter().filter(|&&x| is_hat(x) && is_hat(f3[x])).count() / 2) as u32;
        let max = *idx.iter().filter(|&&x| is_hat(x)).max().expect("balanced block");
        let kind = if is_hat(f3[max]) { ArrayKind::QPrime } else { ArrayKind::Q };
        a.add(kind, i, j);
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::odd_double_factorial;
    use crate::pairing::Label;

    fn part(s: &str) -> Partition {
        s.parse().unwrap()
    }

    #[test]
    fn pairing_counts() {
        for n in 1..=5 {
            let mut count = 0u64;
            for_each_pairing(n, |_| count += 1);
            assert_eq!(BigInt::from(count), odd_double_factorial(n as u64));
        }
    }

    #[test]
    fn l_table_small_cases() {
        let t1 = l_table(1).unwrap();
        assert_eq!(t1.entries.len(), 1);
        assert_eq!(t1.get(&part("1"), &part("1"), 0), 1);
        let t2 = l_table(2).unwrap();
        assert_eq!(t2.get(&part("2"), &part("1,1"), 0), 1);
        assert_eq!(t2.get(&part("1,1"), &part("2"), 0), 1);
        assert_eq!(t2.get(&part("2"), &part("2"), 1), 1);
        assert_eq!(t2.total(), 3);
        assert!(matches!(l_table(8), Err(Error::BoundExceeded { bound: 7, .. })));
    }

    #[test]
    fn b_and_c_small_cases() {
        let t2 = l_table(2).unwrap();
        let b = b_from_l(&t2);
        let c = c_from_l(&t2);
        assert_eq!(b[&(part("2"), part("1,1"))], BigInt::from(8));
        assert_eq!(b[&(part("2"), part("2"))], BigInt::from(8));
        assert_eq!(c[&(part("2"), part("1,1"))], 1);
        assert_eq!(c[&(part("2"), part("2"))], 0);
        let b1 = b_from_l(&l_table(1).unwrap());
        assert_eq!(b1[&(part("1"), part("1"))], BigInt::from(2));
    }

    #[test]
    fn b_and_c_are_symmetric() {
        for n in 1..=6 {
            let t = l_table(n).unwrap();
            let b = b_from_l(&t);
            let c = c_from_l(&t);
            for ((l, m), v) in &b {
                assert_eq!(v, &b[&(m.clone(), l.clone())]);
                assert_eq!(c[&(l.clone(), m.clone())], c[&(m.clone(), l.clone())]);
            }
        }
    }

    #[test]
    fn set_partition_counts_are_bell_numbers() {
        let bell = [1, 1, 2, 5, 15, 52, 203];
        for (k, &b) in bell.iter().enumerate() {
            assert_eq!(set_partitions(k).len(), b);
        }
    }

    #[test]
    fn partitioned_n2() {
        let t = partitioned_tallies(2, 5).unwrap();
        assert_eq!(t.by_class.summed(&part("2"), &part("2")), 3);
        assert_eq!(t.by_class.summed(&part("2"), &part("1,1")), 1);
        assert_eq!(t.by_class.summed(&part("1,1"), &part("2")), 1);
        let a: ArrayTuple = "P:0|P':0|Q:0|Q':E2,1|i0=2|j0=1".parse().unwrap();
        assert_eq!(t.lp(&a), 1);
        let b: ArrayTuple = "P:0|P':0|Q:E2,0|Q':0|i0=2|j0=0".parse().unwrap();
        assert_eq!(t.lp(&b), 2);
    }

    #[test]
    fn prop_refinement_identity() {
        for n in 1..=5 {
            let t = partitioned_tallies(n, 5).unwrap();
            let lp = lp_from_l(&l_table(n).unwrap());
            assert_eq!(t.by_class, lp, "n = {n}");
        }
    }

    #[test]
    fn streamed_objects_are_valid() {
        for n in 1..=4 {
            let mut count = 0;
            enumerate_partitioned(n, 5, |h| {
                let rebuilt = PartitionedHypermap::new(h.f3.clone(), h.pi1.clone(), h.pi2.clone()).unwrap();
                assert_eq!(rebuilt, h);
                count += 1;
            })
            .unwrap();
            assert_eq!(count as u64, partitioned_tallies(n, 5).unwrap().total());
        }
    }

    #[test]
    fn degree_array_n1_and_n2() {
        let mut seen = Vec::new();
        enumerate_partitioned(1, 5, |h| seen.push(degree_array(&h))).unwrap();
        assert_eq!(seen, vec!["P:0|P':0|Q:E1,0|Q':0|i0=1|j0=0".parse().unwrap()]);

        let f3: Pairing = "(1 2)(1^ 2^)".parse().unwrap();
        let all = |n| SetPartition::new(n, vec![(1..=n as u32).flat_map(|i| [Label::plain(i), Label::hat(i)]).collect()]).unwrap();
        let h = PartitionedHypermap::new(f3, all(2), all(2)).unwrap();
        assert_eq!(degree_array(&h).to_string(), "P:0|P':0|Q:0|Q':E2,1|i0=2|j0=1");
    }

    #[test]
    fn hypermap_json_round_trip() {
        let mut first = None;
        enumerate_partitioned(3, 5, |h| {
            if first.is_none() && h.pi1.blocks().len() > 1 {
                first = Some(h);
            }
        })
        .unwrap();
        let h = first.unwrap();
        let js = serde_json::to_string(&h).unwrap();
        let back: PartitionedHypermap = serde_json::from_str(&js).unwrap();
        assert_eq!(back, h);
    }

    #[test]
    fn unstable_partitions_are_rejected() {
        let f3 = Pairing::canonical_f2(2);
        let split = SetPartition::new(2, vec![vec![Label::plain(1), Label::hat(1)], vec![Label::plain(2), Label::hat(2)]]).unwrap();
        let all = SetPartition::new(2, vec![vec![Label::plain(1), Label::hat(1), Label::plain(2), Label::hat(2)]]).unwrap();
        // {1, 1̂} is not f1-stable since f1(1) = 2̂.
        assert!(PartitionedHypermap::new(f3.clone(), split.clone(), all.clone()).is_err());
        assert!(PartitionedHypermap::new(f3, all, split).is_ok());
    }
}
